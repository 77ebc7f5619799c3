use crate::error::{Error, Result};
use crate::moments::{mixture_moment_in, Knowns, MomentKey, MomentTable, ParamLayout};
use crate::polysys::{PolySystem, C64};

use super::class::ModelClass;

/// Square moment system of a model class, with the layout that maps its
/// variables back to mixture parameters.
#[derive(Clone, Debug)]
pub struct MomentSystem {
    pub class: ModelClass,
    pub k: usize,
    pub layout: ParamLayout,
    pub system: PolySystem,
}

/// Checks that `knowns` fixes exactly what `class` treats as known.
pub fn check_knowns(class: ModelClass, k: usize, knowns: &Knowns) -> Result<()> {
    let bad = |m: &str| Err(Error::InvalidParams(format!("{class}: {m}")));
    if let Some(w) = &knowns.weights {
        if w.len() != k {
            return bad("wrong number of weights");
        }
        let s: f64 = w.iter().sum();
        if (s - 1.0).abs() > 1e-9 {
            return bad(&format!("known weights sum to {s}, not 1"));
        }
    }
    let ok = match class {
        ModelClass::LambdaWeighted => {
            knowns.weights.is_some() && knowns.means.is_none() && knowns.vars.is_none() && !knowns.shared_variance
        }
        ModelClass::Homoscedastic => {
            knowns.weights.is_some() && knowns.means.is_none() && knowns.vars.is_none() && knowns.shared_variance
        }
        ModelClass::KnownVarianceMeansOnly => knowns.weights.is_some() && knowns.means.is_none() && knowns.vars.is_some(),
        ModelClass::General => knowns.weights.is_none() && knowns.means.is_none() && knowns.vars.is_none(),
    };
    if !ok {
        return bad(match class {
            ModelClass::LambdaWeighted => "needs known weights only",
            ModelClass::Homoscedastic => "needs known weights and a shared unknown variance",
            ModelClass::KnownVarianceMeansOnly => "needs known weights and variances",
            ModelClass::General => "takes no known parameters",
        });
    }
    Ok(())
}

/// `f_i = Σ λ_ℓ M_i(µ_ℓ, σ_ℓ²) − m̄_i` for the orders of `class`, in the
/// class's variable order.
pub fn build_system(class: ModelClass, k: usize, knowns: &Knowns, target: &MomentTable) -> Result<MomentSystem> {
    check_knowns(class, k, knowns)?;
    if target.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: target.dim(),
        });
    }
    let layout = ParamLayout::new(k, knowns)?;
    let mut polys = Vec::new();
    for i in class.orders(k) {
        let m = target.require(&MomentKey::new(vec![i as u32]))?;
        polys.push(mixture_moment_in(i, &layout) - C64::new(m, 0.0));
    }
    let system = PolySystem::with_names(polys, layout.names.clone())?;
    system.ensure_square()?;
    Ok(MomentSystem {
        class,
        k,
        layout,
        system,
    })
}

/// Affine change of variable `y = (x − shift) / scale`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Standardization {
    pub shift: f64,
    pub scale: f64,
}

impl Standardization {
    pub const IDENTITY: Standardization = Standardization { shift: 0.0, scale: 1.0 };

    /// Shift by `m̄₁`, scale by `(m̄₂ − m̄₁²)^{1/2}`; `None` when the
    /// second central moment is not positive or missing.
    pub fn from_moments(target: &MomentTable) -> Option<Self> {
        let m1 = target.get(&MomentKey::new(vec![1]))?;
        let m2 = target.get(&MomentKey::new(vec![2]))?;
        let v = m2 - m1 * m1;
        if v.is_finite() && v > 1e-12 * m2.abs().max(1.0) {
            Some(Standardization {
                shift: m1,
                scale: v.sqrt(),
            })
        } else {
            None
        }
    }

    /// Moments of `y` from those of `x` (univariate table).
    pub fn moments(&self, target: &MomentTable) -> Result<MomentTable> {
        let max = target.iter().map(|(k, _)| k.order()).max().unwrap_or(0);
        let raw: Vec<f64> = (0..=max)
            .map(|i| target.require(&MomentKey::new(vec![i])))
            .collect::<Result<_>>()?;
        let mut out = MomentTable::new(1);
        for (key, _) in target.iter() {
            let i = key.order() as usize;
            // E[(x − a)^i] / b^i
            let mut acc = 0.0;
            let mut binom = 1.0;
            for j in 0..=i {
                if j > 0 {
                    binom = binom * (i - j + 1) as f64 / j as f64;
                }
                acc += binom * raw[j] * (-self.shift).powi((i - j) as i32);
            }
            out.insert(key.clone(), acc / self.scale.powi(i as i32))?;
        }
        Ok(out)
    }

    pub fn knowns(&self, knowns: &Knowns) -> Knowns {
        Knowns {
            weights: knowns.weights.clone(),
            means: knowns.means.as_ref().map(|m| m.iter().map(|v| (v - self.shift) / self.scale).collect()),
            vars: knowns.vars.as_ref().map(|m| m.iter().map(|v| v / (self.scale * self.scale)).collect()),
            shared_variance: knowns.shared_variance,
        }
    }

    pub fn mean_back(&self, y: C64) -> C64 {
        y * self.scale + self.shift
    }

    pub fn var_back(&self, y: C64) -> C64 {
        y * (self.scale * self.scale)
    }
}
