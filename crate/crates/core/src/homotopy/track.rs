use serde::{Deserialize, Serialize};

use super::family::Homotopy;
use super::linalg::Lu;
use super::settings::{TrackerSettings, SINGULAR_CONDITION};
use crate::polysys::C64;

/// Hard cap on accepted steps per path.
const MAX_STEPS: usize = 20_000;
/// Newton updates below this (relative) level count as settled when the
/// corrector stalls at rounding error.
const STALL_TOL: f64 = 1e-9;
const REFINE_ITERS: usize = 8;
/// Fraction of `min_step` a nonsingular path may reach past `endgame_start`.
const ENDGAME_FLOOR: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathStatus {
    Converged,
    Diverged,
    Singular,
    StepLimit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathResult {
    pub endpoint: Vec<C64>,
    /// `‖F(x)‖∞` at the endpoint.
    pub residual: f64,
    pub status: PathStatus,
    pub steps_taken: usize,
    /// Value of `t` reached.
    pub t: f64,
    /// Jacobian condition estimate at the endpoint.
    pub condition: f64,
}

impl PathResult {
    pub fn is_converged(&self) -> bool {
        self.status == PathStatus::Converged
    }
}

/// `‖v‖∞`, infinite if any entry is NaN (`f64::max` would drop it).
fn inf_norm(v: &[C64]) -> f64 {
    v.iter()
        .map(|z| z.norm())
        .fold(0.0, |m, a| if a.is_nan() { f64::INFINITY } else { m.max(a) })
}

/// Per-thread tracking state for one homotopy.
pub struct Tracker<'a, H: Homotopy> {
    h: &'a H,
    settings: &'a TrackerSettings,
    ws: H::Workspace,
    n: usize,
    hv: Vec<C64>,
    hx: Vec<C64>,
    ht: Vec<C64>,
    lu: Lu,
    k: [Vec<C64>; 4],
    tmp: Vec<C64>,
}

impl<'a, H: Homotopy> Tracker<'a, H> {
    pub fn new(h: &'a H, settings: &'a TrackerSettings) -> Self {
        let n = h.nvars();
        let z = vec![C64::new(0.0, 0.0); n];
        Tracker {
            h,
            settings,
            ws: h.workspace(),
            n,
            hv: z.clone(),
            hx: vec![C64::new(0.0, 0.0); n * n],
            ht: z.clone(),
            lu: Lu::new(n),
            k: [z.clone(), z.clone(), z.clone(), z.clone()],
            tmp: z,
        }
    }

    /// `dx/dt = −H_x⁻¹ H_t` into `self.k[slot]`.
    fn velocity(&mut self, x: &[C64], t: f64, slot: usize) -> bool {
        self.h
            .evaluate(x, t, &mut self.ws, &mut self.hv, Some(&mut self.hx), Some(&mut self.ht));
        if !self.lu.factor(&self.hx) {
            return false;
        }
        let out = &mut self.k[slot];
        for i in 0..self.n {
            out[i] = -self.ht[i];
        }
        self.lu.solve(out);
        out.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Classical RK4 step from `(x, t)` to `t + dt`, written into `out`.
    fn predict(&mut self, x: &[C64], t: f64, dt: f64, out: &mut [C64]) -> bool {
        let n = self.n;
        if !self.velocity(x, t, 0) {
            return false;
        }
        for (stage, (frac, prev)) in [(0.5, 0), (0.5, 1), (1.0, 2)].into_iter().enumerate() {
            for i in 0..n {
                self.tmp[i] = x[i] + self.k[prev][i] * (frac * dt);
            }
            let probe = std::mem::take(&mut self.tmp);
            let ok = self.velocity(&probe, t + frac * dt, stage + 1);
            self.tmp = probe;
            if !ok {
                return false;
            }
        }
        for i in 0..n {
            out[i] = x[i] + (self.k[0][i] + (self.k[1][i] + self.k[2][i]) * 2.0 + self.k[3][i]) * (dt / 6.0);
        }
        true
    }

    /// Newton on `H(·; t)`; true once the update is below tolerance.
    fn correct(&mut self, x: &mut [C64], t: f64) -> bool {
        let mut prev = f64::INFINITY;
        let mut last = f64::INFINITY;
        for it in 0..self.settings.max_newton_iters {
            self.h.evaluate(x, t, &mut self.ws, &mut self.hv, Some(&mut self.hx), None);
            // an ill-conditioned Jacobian can keep the update large after
            // the residual has settled
            if it > 0 && inf_norm(&self.hv) <= self.settings.newton_tol {
                return true;
            }
            if !self.lu.factor(&self.hx) {
                return false;
            }
            for i in 0..self.n {
                self.tmp[i] = -self.hv[i];
            }
            self.lu.solve(&mut self.tmp);
            let norm = inf_norm(&self.tmp);
            if !norm.is_finite() {
                return false;
            }
            for i in 0..self.n {
                x[i] += self.tmp[i];
            }
            let scale = 1.0 + inf_norm(x);
            if norm <= self.settings.newton_tol * scale {
                return true;
            }
            if it > 0 && norm > 0.5 * prev && norm > STALL_TOL * scale {
                return false;
            }
            prev = norm;
            last = norm / scale;
        }
        last <= STALL_TOL
    }

    fn condition_at(&mut self, x: &[C64], t: f64) -> f64 {
        self.h.evaluate(x, t, &mut self.ws, &mut self.hv, Some(&mut self.hx), None);
        if !self.lu.factor(&self.hx) {
            return f64::INFINITY;
        }
        self.lu.condition()
    }

    /// Newton on the target at `t = 1`; returns the residual of the best
    /// iterate, which is left in `x`.
    fn refine(&mut self, x: &mut [C64]) -> f64 {
        let mut best = x.to_vec();
        let mut best_res = f64::INFINITY;
        for _ in 0..=REFINE_ITERS {
            self.h.evaluate_target(x, &mut self.ws, &mut self.hv, Some(&mut self.hx));
            let res = inf_norm(&self.hv);
            if !res.is_finite() {
                break;
            }
            if res < best_res {
                best_res = res;
                best.copy_from_slice(x);
            } else if res >= best_res && best_res < self.settings.final_tol {
                break;
            }
            if res == 0.0 || !self.lu.factor(&self.hx) {
                break;
            }
            for i in 0..self.n {
                self.tmp[i] = -self.hv[i];
            }
            self.lu.solve(&mut self.tmp);
            for i in 0..self.n {
                x[i] += self.tmp[i];
            }
        }
        x.copy_from_slice(&best);
        best_res
    }

    fn finish(&mut self, x: Vec<C64>, t: f64, steps: usize, status: PathStatus) -> PathResult {
        let mut x = x;
        let mut residual = f64::INFINITY;
        let mut condition = f64::INFINITY;
        let mut status = status;
        if status == PathStatus::Converged {
            residual = self.refine(&mut x);
            condition = self.condition_at(&x, 1.0);
            if residual >= self.settings.final_tol {
                status = if inf_norm(&x) > self.settings.divergence_norm {
                    PathStatus::Diverged
                } else {
                    PathStatus::Singular
                };
            }
        } else if x.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            self.h.evaluate_target(&x, &mut self.ws, &mut self.hv, None);
            residual = inf_norm(&self.hv);
        }
        PathResult {
            endpoint: x,
            residual,
            status,
            steps_taken: steps,
            t,
            condition,
        }
    }

    /// Newton-refines `x` on the target and classifies it as a path that
    /// reached `t = 1` after `steps` steps.
    pub fn polish(&mut self, x: Vec<C64>, steps: usize) -> PathResult {
        self.finish(x, 1.0, steps, PathStatus::Converged)
    }

    /// Follows the path starting at `start` (a root of `H(·; 0)`).
    pub fn track(&mut self, start: &[C64]) -> PathResult {
        let s = self.settings;
        let mut x = start.to_vec();
        let mut xp = x.clone();
        let mut t = 0.0;
        let mut h = s.initial_step;
        let mut streak = 0;
        let mut steps = 0;
        while t < 1.0 {
            if steps >= MAX_STEPS {
                return self.finish(x, t, steps, PathStatus::StepLimit);
            }
            let (dt, t1) = if t + h >= 1.0 { (1.0 - t, 1.0) } else { (h, t + h) };
            let ok = self.predict(&x, t, dt, &mut xp) && self.correct(&mut xp, t1);
            if ok {
                std::mem::swap(&mut x, &mut xp);
                t = t1;
                steps += 1;
                streak += 1;
                if streak >= 3 {
                    h = (2.0 * h).min(s.max_step);
                    streak = 0;
                }
                if inf_norm(&x) > s.divergence_norm {
                    return self.finish(x, t, steps, PathStatus::Diverged);
                }
            } else {
                h *= 0.5;
                streak = 0;
                if h < s.min_step {
                    // a nonsingular path may keep halving near t = 1, where
                    // roots of large condition turn sharply
                    if t >= s.endgame_start
                        && h >= s.min_step * ENDGAME_FLOOR
                        && self.condition_at(&x, t) < SINGULAR_CONDITION
                    {
                        continue;
                    }
                    let status = if t >= s.endgame_start && self.condition_at(&x, t) > SINGULAR_CONDITION {
                        PathStatus::Singular
                    } else {
                        PathStatus::StepLimit
                    };
                    return self.finish(x, t, steps, status);
                }
            }
        }
        self.finish(x, 1.0, steps, PathStatus::Converged)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_entries_make_the_norm_infinite() {
        let v = [C64::new(1.0, 0.0), C64::new(f64::NAN, 0.0), C64::new(3.0, 0.0)];
        assert_eq!(inf_norm(&v), f64::INFINITY);
        assert_eq!(inf_norm(&v[..1]), 1.0);
    }
}
