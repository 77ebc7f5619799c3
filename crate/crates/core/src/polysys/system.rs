use std::fmt;
use std::sync::OnceLock;

use nalgebra::DMatrix;

use super::poly::{SparsePoly, C64};
use crate::error::{Error, Result};

/// An ordered collection of polynomials over a shared variable set.
#[derive(Clone)]
pub struct PolySystem {
    polys: Vec<SparsePoly>,
    var_names: Vec<String>,
    derivatives: OnceLock<Vec<Vec<SparsePoly>>>,
}

impl PolySystem {
    pub fn new(polys: Vec<SparsePoly>) -> Result<Self> {
        let nvars = polys.first().map(SparsePoly::nvars).unwrap_or(0);
        let names = (1..=nvars).map(|i| format!("x{i}")).collect();
        Self::with_names(polys, names)
    }

    pub fn with_names(polys: Vec<SparsePoly>, var_names: Vec<String>) -> Result<Self> {
        let nvars = var_names.len();
        for p in &polys {
            if p.nvars() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    got: p.nvars(),
                });
            }
        }
        Ok(PolySystem {
            polys,
            var_names,
            derivatives: OnceLock::new(),
        })
    }

    pub fn polys(&self) -> &[SparsePoly] {
        &self.polys
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn nvars(&self) -> usize {
        self.var_names.len()
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn is_square(&self) -> bool {
        self.polys.len() == self.nvars()
    }

    pub fn ensure_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotSquare {
                polys: self.polys.len(),
                vars: self.nvars(),
            })
        }
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.polys.iter().map(SparsePoly::total_degree).collect()
    }

    pub fn evaluate(&self, x: &[C64]) -> Result<Vec<C64>> {
        self.polys.iter().map(|p| p.evaluate(x)).collect()
    }

    /// ‖F(x)‖∞.
    pub fn residual(&self, x: &[C64]) -> Result<f64> {
        Ok(self
            .evaluate(x)?
            .iter()
            .map(|v| v.norm())
            .fold(0.0, |m, a| if a.is_nan() { f64::INFINITY } else { m.max(a) }))
    }

    /// Symbolic partial derivatives, computed on first use.
    pub fn derivative_polys(&self) -> &[Vec<SparsePoly>] {
        self.derivatives.get_or_init(|| {
            self.polys
                .iter()
                .map(|p| (0..self.nvars()).map(|v| p.derivative(v)).collect())
                .collect()
        })
    }

    pub fn jacobian(&self, x: &[C64]) -> Result<DMatrix<C64>> {
        self.ensure_square()?;
        if x.len() != self.nvars() {
            return Err(Error::DimensionMismatch {
                expected: self.nvars(),
                got: x.len(),
            });
        }
        let d = self.derivative_polys();
        let n = self.nvars();
        let mut j = DMatrix::zeros(self.polys.len(), n);
        for (i, row) in d.iter().enumerate() {
            for (v, p) in row.iter().enumerate() {
                j[(i, v)] = p.evaluate(x)?;
            }
        }
        Ok(j)
    }

    /// Product of total degrees.
    pub fn bezout_bound(&self) -> u128 {
        self.polys
            .iter()
            .map(|p| p.total_degree() as u128)
            .product()
    }

    pub fn map_polys(&self, f: impl Fn(&SparsePoly) -> SparsePoly) -> Self {
        PolySystem {
            polys: self.polys.iter().map(f).collect(),
            var_names: self.var_names.clone(),
            derivatives: OnceLock::new(),
        }
    }
}

impl fmt::Display for PolySystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "variables: {}", self.var_names.join(", "))?;
        for (i, p) in self.polys.iter().enumerate() {
            writeln!(f, "f{} = {}", i + 1, p.to_text(&self.var_names))?;
        }
        Ok(())
    }
}

impl fmt::Debug for PolySystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
