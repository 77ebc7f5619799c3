use super::poly::C64;
use super::system::PolySystem;

const MAX_FACTORS: usize = 32;

/// Flattened form of a square-or-not [`PolySystem`] for repeated evaluation
/// of values and Jacobians. Constant terms are held separately so that
/// systems differing only in their constants share one compiled body.
#[derive(Clone, Debug)]
pub struct CompiledSystem {
    nvars: usize,
    max_exp: Vec<u32>,
    pow_offset: Vec<usize>,
    pow_len: usize,
    poly_start: Vec<usize>,
    constants: Vec<C64>,
    coeffs: Vec<C64>,
    factor_start: Vec<usize>,
    factors: Vec<(u32, u32)>,
}

/// Scratch space for one evaluating thread.
#[derive(Clone, Debug, Default)]
pub struct EvalWorkspace {
    powers: Vec<C64>,
}

impl CompiledSystem {
    pub fn new(system: &PolySystem) -> Self {
        let nvars = system.nvars();
        let mut max_exp = vec![0u32; nvars];
        let mut poly_start = vec![0];
        let mut constants = Vec::with_capacity(system.len());
        let mut coeffs = Vec::new();
        let mut factor_start = vec![0];
        let mut factors = Vec::new();
        for p in system.polys() {
            let mut constant = C64::new(0.0, 0.0);
            for (e, c) in p.terms() {
                if e.is_constant() {
                    constant = *c;
                    continue;
                }
                coeffs.push(*c);
                for (v, &pw) in e.as_slice().iter().enumerate() {
                    if pw > 0 {
                        factors.push((v as u32, pw as u32));
                        max_exp[v] = max_exp[v].max(pw as u32);
                    }
                }
                assert!(
                    factors.len() - factor_start.last().unwrap() <= MAX_FACTORS,
                    "monomial with more than {MAX_FACTORS} variables"
                );
                factor_start.push(factors.len());
            }
            constants.push(constant);
            poly_start.push(coeffs.len());
        }
        let mut pow_offset = Vec::with_capacity(nvars);
        let mut pow_len = 0;
        for &m in &max_exp {
            pow_offset.push(pow_len);
            pow_len += m as usize + 1;
        }
        CompiledSystem {
            nvars,
            max_exp,
            pow_offset,
            pow_len,
            poly_start,
            constants,
            coeffs,
            factor_start,
            factors,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn npolys(&self) -> usize {
        self.constants.len()
    }

    pub fn constants(&self) -> &[C64] {
        &self.constants
    }

    pub fn set_constants(&mut self, constants: &[C64]) {
        assert_eq!(constants.len(), self.constants.len());
        self.constants.copy_from_slice(constants);
    }

    pub fn workspace(&self) -> EvalWorkspace {
        EvalWorkspace {
            powers: vec![C64::new(0.0, 0.0); self.pow_len],
        }
    }

    fn fill_powers(&self, x: &[C64], ws: &mut EvalWorkspace) {
        if ws.powers.len() < self.pow_len {
            ws.powers.resize(self.pow_len, C64::new(0.0, 0.0));
        }
        for v in 0..self.nvars {
            let off = self.pow_offset[v];
            let mut acc = C64::new(1.0, 0.0);
            ws.powers[off] = acc;
            for e in 1..=self.max_exp[v] as usize {
                acc *= x[v];
                ws.powers[off + e] = acc;
            }
        }
    }

    /// Writes F(x) into `values` and, when requested, the row-major
    /// Jacobian into `jac`.
    pub fn eval(&self, x: &[C64], ws: &mut EvalWorkspace, values: &mut [C64], jac: Option<&mut [C64]>) {
        debug_assert_eq!(x.len(), self.nvars);
        self.fill_powers(x, ws);
        let pw = &ws.powers;
        let n = self.nvars;
        let mut jac = jac;
        if let Some(j) = jac.as_deref_mut() {
            j.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        }
        let mut vals = [C64::new(0.0, 0.0); MAX_FACTORS];
        let mut prefix = [C64::new(0.0, 0.0); MAX_FACTORS + 1];
        for (i, out) in values.iter_mut().enumerate().take(self.npolys()) {
            let mut acc = self.constants[i];
            for t in self.poly_start[i]..self.poly_start[i + 1] {
                let fs = &self.factors[self.factor_start[t]..self.factor_start[t + 1]];
                let c = self.coeffs[t];
                prefix[0] = C64::new(1.0, 0.0);
                for (j, &(v, e)) in fs.iter().enumerate() {
                    vals[j] = pw[self.pow_offset[v as usize] + e as usize];
                    prefix[j + 1] = prefix[j] * vals[j];
                }
                acc += c * prefix[fs.len()];
                if let Some(jm) = jac.as_deref_mut() {
                    let row = &mut jm[i * n..(i + 1) * n];
                    let mut suffix = C64::new(1.0, 0.0);
                    for j in (0..fs.len()).rev() {
                        let (v, e) = fs[j];
                        let d = pw[self.pow_offset[v as usize] + e as usize - 1] * (e as f64);
                        row[v as usize] += c * d * prefix[j] * suffix;
                        suffix *= vals[j];
                    }
                }
            }
            *out = acc;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polysys::SparsePoly;

    #[test]
    fn compiled_matches_symbolic() {
        let c = |re: f64, im: f64| C64::new(re, im);
        let p1 = SparsePoly::from_terms(
            3,
            vec![
                (vec![2, 1, 0], c(1.5, 0.0)),
                (vec![0, 0, 3], c(0.0, -2.0)),
                (vec![1, 1, 1], c(0.3, 0.7)),
                (vec![0, 0, 0], c(-4.0, 0.0)),
            ],
        )
        .unwrap();
        let p2 = SparsePoly::from_terms(3, vec![(vec![0, 4, 0], c(1.0, 0.0)), (vec![1, 0, 0], c(2.0, 0.0))]).unwrap();
        let p3 = SparsePoly::variable(3, 2);
        let sys = PolySystem::new(vec![p1, p2, p3]).unwrap();
        let comp = CompiledSystem::new(&sys);
        let x = [c(0.4, -1.1), c(-0.7, 0.2), c(1.3, 0.5)];
        let mut ws = comp.workspace();
        let mut f = [C64::default(); 3];
        let mut j = [C64::default(); 9];
        comp.eval(&x, &mut ws, &mut f, Some(&mut j));
        let fe = sys.evaluate(&x).unwrap();
        let je = sys.jacobian(&x).unwrap();
        for i in 0..3 {
            assert!((f[i] - fe[i]).norm() < 1e-13);
            for v in 0..3 {
                assert!((j[i * 3 + v] - je[(i, v)]).norm() < 1e-13);
            }
        }
    }
}
