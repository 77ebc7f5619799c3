use crate::polysys::{CompiledSystem, EvalWorkspace, C64};

/// A square family `H(x; t)` for `t ∈ [0, 1]` with its partial derivatives.
pub trait Homotopy: Sync {
    type Workspace: Send;

    fn nvars(&self) -> usize;

    fn workspace(&self) -> Self::Workspace;

    /// Writes `H(x; t)` into `h`, optionally `∂H/∂x` (row-major) into `hx`
    /// and `∂H/∂t` into `ht`.
    fn evaluate(
        &self,
        x: &[C64],
        t: f64,
        ws: &mut Self::Workspace,
        h: &mut [C64],
        hx: Option<&mut [C64]>,
        ht: Option<&mut [C64]>,
    );

    /// Target system `F = H(·; 1)` and its Jacobian.
    fn evaluate_target(&self, x: &[C64], ws: &mut Self::Workspace, f: &mut [C64], jac: Option<&mut [C64]>) {
        self.evaluate(x, 1.0, ws, f, jac, None);
    }
}

/// `H = γ(1 − t)G + tF`.
#[derive(Clone, Debug)]
pub struct StraightLineHomotopy {
    start: CompiledSystem,
    target: CompiledSystem,
    gamma: C64,
}

pub struct StraightLineWorkspace {
    ws_g: EvalWorkspace,
    ws_f: EvalWorkspace,
    g: Vec<C64>,
    f: Vec<C64>,
    gj: Vec<C64>,
    fj: Vec<C64>,
}

impl StraightLineHomotopy {
    pub fn new(start: CompiledSystem, target: CompiledSystem, gamma: C64) -> Self {
        assert_eq!(start.nvars(), target.nvars(), "start and target differ in variables");
        assert_eq!(start.npolys(), target.npolys(), "start and target differ in size");
        assert_eq!(target.npolys(), target.nvars(), "homotopy must be square");
        StraightLineHomotopy { start, target, gamma }
    }

    pub fn gamma(&self) -> C64 {
        self.gamma
    }
}

impl Homotopy for StraightLineHomotopy {
    type Workspace = StraightLineWorkspace;

    fn nvars(&self) -> usize {
        self.target.nvars()
    }

    fn workspace(&self) -> StraightLineWorkspace {
        let n = self.nvars();
        let z = C64::new(0.0, 0.0);
        StraightLineWorkspace {
            ws_g: self.start.workspace(),
            ws_f: self.target.workspace(),
            g: vec![z; n],
            f: vec![z; n],
            gj: vec![z; n * n],
            fj: vec![z; n * n],
        }
    }

    fn evaluate(
        &self,
        x: &[C64],
        t: f64,
        ws: &mut StraightLineWorkspace,
        h: &mut [C64],
        hx: Option<&mut [C64]>,
        ht: Option<&mut [C64]>,
    ) {
        let want_j = hx.is_some();
        let a = self.gamma * (1.0 - t);
        if want_j {
            self.start.eval(x, &mut ws.ws_g, &mut ws.g, Some(&mut ws.gj));
            self.target.eval(x, &mut ws.ws_f, &mut ws.f, Some(&mut ws.fj));
        } else {
            self.start.eval(x, &mut ws.ws_g, &mut ws.g, None);
            self.target.eval(x, &mut ws.ws_f, &mut ws.f, None);
        }
        for i in 0..h.len() {
            h[i] = a * ws.g[i] + ws.f[i] * t;
        }
        if let Some(hx) = hx {
            for i in 0..hx.len() {
                hx[i] = a * ws.gj[i] + ws.fj[i] * t;
            }
        }
        if let Some(ht) = ht {
            for i in 0..ht.len() {
                ht[i] = ws.f[i] - self.gamma * ws.g[i];
            }
        }
    }

    fn evaluate_target(&self, x: &[C64], ws: &mut StraightLineWorkspace, f: &mut [C64], jac: Option<&mut [C64]>) {
        self.target.eval(x, &mut ws.ws_f, f, jac);
    }
}

/// `H(x; t) = P(x) + (1 − t)c₀ + t c₁` where `P` is a system without
/// constant terms and `c₀`, `c₁` are the constant vectors at both ends.
#[derive(Clone, Debug)]
pub struct ParameterHomotopy {
    body: CompiledSystem,
    c0: Vec<C64>,
    c1: Vec<C64>,
}

impl ParameterHomotopy {
    /// `body`'s own constants are ignored.
    pub fn new(body: &CompiledSystem, c0: Vec<C64>, c1: Vec<C64>) -> Self {
        let mut body = body.clone();
        assert_eq!(body.npolys(), body.nvars(), "homotopy must be square");
        assert_eq!(c0.len(), body.npolys());
        assert_eq!(c1.len(), body.npolys());
        body.set_constants(&vec![C64::new(0.0, 0.0); c0.len()]);
        ParameterHomotopy { body, c0, c1 }
    }
}

impl Homotopy for ParameterHomotopy {
    type Workspace = EvalWorkspace;

    fn nvars(&self) -> usize {
        self.body.nvars()
    }

    fn workspace(&self) -> EvalWorkspace {
        self.body.workspace()
    }

    fn evaluate(&self, x: &[C64], t: f64, ws: &mut EvalWorkspace, h: &mut [C64], hx: Option<&mut [C64]>, ht: Option<&mut [C64]>) {
        self.body.eval(x, ws, h, hx);
        for i in 0..h.len() {
            h[i] += self.c0[i] * (1.0 - t) + self.c1[i] * t;
        }
        if let Some(ht) = ht {
            for i in 0..ht.len() {
                ht[i] = self.c1[i] - self.c0[i];
            }
        }
    }
}
