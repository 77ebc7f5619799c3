use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;

use gmm_moments::homotopy::PathStats;
use gmm_moments::modelsolve::{
    dedup_label_swap, general_total_degree, precompute_general_start, prepared_system, solve_class, ModelClass,
    UnivariateSolution, DEFAULT_PATH_BUDGET,
};
use gmm_moments::moments::{
    exact_moments, permutations, sample_moments, Knowns, MixtureParams, MomentKey, MomentTable, Samples,
};
use gmm_moments::recover::{algorithm1, algorithm2, RecoveryPlan};
use gmm_moments::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::args::{Algorithm, BenchmarkArgs, MomentsArgs, PrecomputeArgs, RecoverArgs, SelftestArgs, SolveArgs};
use crate::config::RunConfig;
use crate::sampler::ModelSampler;
use crate::{EXIT_NO_MEANINGFUL, EXIT_OK, EXIT_SOLVER};

/// Writes `text` to `path`, or to stdout.
fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

fn load_samples(path: &Path) -> Result<Samples> {
    Samples::from_csv(BufReader::new(File::open(path)?))
}

fn load_moments(path: &Path) -> Result<MomentTable> {
    MomentTable::from_json_str(&std::fs::read_to_string(path)?)
}

/// Parses `"1,0;2,1"` into moment keys.
pub fn parse_keys(spec: &str) -> Result<Vec<MomentKey>> {
    spec.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.split(',')
                .map(|v| v.trim().parse::<u32>().map_err(|e| Error::Parse(format!("moment key '{s}': {e}"))))
                .collect::<Result<Vec<u32>>>()
                .map(MomentKey::new)
        })
        .collect()
}

fn plan_for(k: usize, n: usize, algorithm: Algorithm, cfg: &RunConfig) -> Result<RecoveryPlan> {
    match algorithm {
        Algorithm::One => RecoveryPlan::algorithm1(k, n, &cfg.recovery()),
        Algorithm::Two => RecoveryPlan::algorithm2(k, n),
    }
}

pub fn moments(args: &MomentsArgs, cfg: &RunConfig) -> Result<i32> {
    let samples = load_samples(&args.samples)?;
    let n = samples.dim();
    let keys = if let Some(spec) = &args.keys {
        parse_keys(spec)?
    } else if let Some(max) = args.max_order {
        (0..n).flat_map(|s| (1..=max).map(move |c| MomentKey::axis(n, s, c))).collect()
    } else if let Some(k) = args.k {
        plan_for(k, n, args.algorithm, cfg)?.required_moments()
    } else {
        return Err(Error::InvalidParams("give one of --k, --max-order or --keys".into()));
    };
    let table = sample_moments(&samples, &keys)?;
    emit(args.output.as_deref(), &table.to_json_string()?)?;
    Ok(EXIT_OK)
}

fn solve_knowns(args: &SolveArgs) -> Result<Knowns> {
    let k = args.k;
    let need_weights = || {
        args.weights
            .clone()
            .ok_or_else(|| Error::InvalidParams(format!("--class {} needs --weights", args.class)))
    };
    Ok(match args.class {
        ModelClass::General => Knowns::none(),
        ModelClass::LambdaWeighted => Knowns::weights(need_weights()?),
        ModelClass::Homoscedastic => Knowns {
            shared_variance: true,
            ..Knowns::weights(need_weights()?)
        },
        ModelClass::KnownVarianceMeansOnly => {
            let vars = match (&args.vars, args.variance) {
                (Some(v), _) => v.clone(),
                (None, Some(v)) => vec![v; k],
                (None, None) => return Err(Error::InvalidParams("means-only needs --vars or --variance".into())),
            };
            Knowns {
                weights: Some(args.weights.clone().unwrap_or_else(|| vec![1.0 / k as f64; k])),
                vars: Some(vars),
                ..Knowns::none()
            }
        }
    })
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    class: ModelClass,
    k: usize,
    paths: PathStats,
    meaningful: usize,
    solutions: &'a [UnivariateSolution],
}

pub fn solve(args: &SolveArgs, cfg: &RunConfig) -> Result<i32> {
    let table = load_moments(&args.moments)?;
    if args.coordinate == 0 || args.coordinate > table.dim() {
        return Err(Error::InvalidParams(format!(
            "coordinate {} is outside 1..={}",
            args.coordinate,
            table.dim()
        )));
    }
    let max = *args.class.orders(args.k).end() as u32;
    let target = table.marginal(args.coordinate - 1, max)?;
    let knowns = solve_knowns(args)?;
    if args.dump_system {
        let (ms, _) = prepared_system(args.class, args.k, &knowns, &target, &cfg.solve)?;
        let names = ms.system.var_names();
        for (i, p) in ms.system.polys().iter().enumerate() {
            eprintln!("f{} = {}", i + 1, p.to_text(names));
        }
    }
    let cs = solve_class(args.class, args.k, &knowns, &target, &cfg.tracker, &cfg.solve)?;
    let meaningful = cs.solutions.iter().filter(|s| s.meaningful).count();
    let out = SolveOutput {
        class: cs.class,
        k: cs.k,
        paths: cs.stats,
        meaningful,
        solutions: &cs.solutions,
    };
    emit(args.output.as_deref(), &serde_json::to_string_pretty(&out)?)?;
    Ok(if meaningful == 0 { EXIT_NO_MEANINGFUL } else { EXIT_OK })
}

pub fn recover(args: &RecoverArgs, cfg: &RunConfig) -> Result<i32> {
    let mut opts = cfg.recovery();
    if args.known_weights.is_some() {
        opts.known_weights = args.known_weights.clone();
    }
    opts.extended_selection |= args.extended_selection;
    let known_cov: Option<Vec<Vec<f64>>> = match &args.uniform_equal_cov {
        Some(p) => Some(serde_json::from_str(&std::fs::read_to_string(p)?)?),
        None => None,
    };
    let k = args.k;
    let table = match (&args.moments, &args.samples) {
        (Some(p), _) => load_moments(p)?,
        (None, Some(p)) => {
            let samples = load_samples(p)?;
            let n = samples.dim();
            let plan = match known_cov {
                Some(_) => RecoveryPlan::algorithm2(k, n)?,
                None => RecoveryPlan::algorithm1(k, n, &opts)?,
            };
            sample_moments(&samples, &plan.required_moments())?
        }
        (None, None) => return Err(Error::InvalidParams("give --moments or --samples".into())),
    };
    let n = table.dim();
    let mut report = match &known_cov {
        Some(cov) => algorithm2(&table, k, n, cov, &opts)?,
        None => algorithm1(&table, k, n, &opts)?,
    };
    if let Some(p) = &args.truth {
        let truth = MixtureParams::from_json_str(&std::fs::read_to_string(p)?)?;
        report = report.with_truth(&truth);
    }
    emit(args.output.as_deref(), &report.params.to_json_string()?)?;
    let text = report.to_json_string()?;
    match &args.report {
        Some(p) => std::fs::write(p, text)?,
        None => eprintln!("{text}"),
    }
    Ok(EXIT_OK)
}

/// Observed solution counts for one class and `k`.
#[derive(Clone, Debug, Serialize)]
pub struct CountRow {
    pub class: ModelClass,
    pub k: usize,
    pub expected: u128,
    /// Distinct solutions with residual below 1e−10, per target.
    pub observed: Vec<usize>,
    /// Label-swap orbits per target (general class only).
    pub orbits: Option<Vec<usize>>,
    /// Every solution set closed under relabelling (uniform classes only).
    pub closed: Option<bool>,
    pub skipped: bool,
    pub pass: bool,
}

/// Univariate target for `class` drawn from the model sampler: the
/// moments of a random mixture of the class plus the knowns it fixes.
pub fn random_target(class: ModelClass, k: usize, rng: &mut ChaCha8Rng) -> Result<(Knowns, MomentTable)> {
    let s = ModelSampler::default();
    let means = s.means(k, rng);
    let (weights, vars, knowns) = match class {
        ModelClass::General | ModelClass::LambdaWeighted => {
            let w = s.weights(k, rng)?;
            let v: Vec<f64> = (0..k).map(|_| s.variance(rng)).collect();
            let knowns = if class == ModelClass::General {
                Knowns::none()
            } else {
                Knowns::weights(w.clone())
            };
            (w, v, knowns)
        }
        ModelClass::Homoscedastic => {
            let w = s.weights(k, rng)?;
            let v = vec![s.variance(rng); k];
            let knowns = Knowns {
                shared_variance: true,
                ..Knowns::weights(w.clone())
            };
            (w, v, knowns)
        }
        ModelClass::KnownVarianceMeansOnly => {
            let w = vec![1.0 / k as f64; k];
            let v = vec![s.variance(rng); k];
            let knowns = Knowns {
                weights: Some(w.clone()),
                vars: Some(v.clone()),
                ..Knowns::none()
            };
            (w, v, knowns)
        }
    };
    let params = MixtureParams::univariate(weights, means, vars)?;
    let max = *class.orders(k).end() as u32;
    let keys: Vec<MomentKey> = (1..=max).map(|c| MomentKey::new(vec![c])).collect();
    Ok((knowns, exact_moments(&params, &keys)?))
}

fn closed_under_relabelling(solutions: &[UnivariateSolution], tol: f64) -> bool {
    let k = solutions.first().map_or(0, |s| s.k());
    let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + x.abs()));
    solutions.iter().all(|s| {
        permutations(k).iter().all(|p| {
            let q = s.permuted(p);
            solutions.iter().any(|o| close(&o.means, &q.means) && close(&o.vars, &q.vars) && close(&o.weights, &q.weights))
        })
    })
}

pub fn count_row(class: ModelClass, k: usize, trials: usize, cfg: &RunConfig) -> Result<CountRow> {
    let expected = class.expected_solutions(k);
    let mut row = CountRow {
        class,
        k,
        expected,
        observed: Vec::new(),
        orbits: None,
        closed: None,
        skipped: false,
        pass: true,
    };
    // a bundled parameter-homotopy start would make the count circular, so
    // large general systems run by total degree or not at all
    if class == ModelClass::General && general_total_degree(k) > DEFAULT_PATH_BUDGET && !cfg.solve.allow_large {
        row.skipped = true;
        return Ok(row);
    }
    let tol = cfg.solve.tolerances.dedup_tol;
    let perms = permutations(k).len();
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.tracker.seed);
        rng.set_stream(1 + t as u64);
        let (knowns, target) = random_target(class, k, &mut rng)?;
        let cs = solve_class(class, k, &knowns, &target, &cfg.tracker, &cfg.solve)?;
        let good: Vec<UnivariateSolution> = cs.solutions.into_iter().filter(|s| s.residual < 1e-10).collect();
        row.observed.push(good.len());
        row.pass &= good.len() as u128 == expected;
        match class {
            ModelClass::General => {
                let o = dedup_label_swap(good, tol).len();
                row.pass &= (o * perms) as u128 == expected;
                row.orbits.get_or_insert_with(Vec::new).push(o);
            }
            ModelClass::KnownVarianceMeansOnly => {
                let c = closed_under_relabelling(&good, tol);
                row.pass &= c;
                row.closed = Some(row.closed.unwrap_or(true) && c);
            }
            _ => {}
        }
    }
    Ok(row)
}

pub fn format_count_row(r: &CountRow) -> String {
    let status = if r.skipped {
        "skipped (needs --allow-large)".to_string()
    } else if r.pass {
        "pass".to_string()
    } else {
        "FAIL".to_string()
    };
    let observed = if r.skipped {
        "-".to_string()
    } else {
        let lo = r.observed.iter().min().copied().unwrap_or(0);
        let hi = r.observed.iter().max().copied().unwrap_or(0);
        if lo == hi {
            format!("{lo}/{}", r.expected)
        } else {
            format!("{lo}..{hi}/{}", r.expected)
        }
    };
    let mut extra = String::new();
    if let Some(o) = &r.orbits {
        let _ = write!(extra, " orbits {:?}", o);
    }
    if let Some(c) = r.closed {
        let _ = write!(extra, " closed {c}");
    }
    format!("{:<26} k={} {:>12}  {}{}", r.class.name(), r.k, observed, status, extra)
}

pub fn selftest(args: &SelftestArgs, cfg: &RunConfig) -> Result<i32> {
    if args.k_max == 0 || args.k_max > 3 {
        return Err(Error::InvalidParams("--k-max must be in 1..=3".into()));
    }
    let mut all = true;
    for k in 1..=args.k_max {
        for class in ModelClass::ALL {
            let row = count_row(class, k, args.trials, cfg)?;
            all &= row.pass;
            println!("{}", format_count_row(&row));
        }
    }
    Ok(if all { EXIT_OK } else { EXIT_SOLVER })
}

/// Averages of one benchmark configuration.
#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub k: usize,
    pub n: usize,
    pub trials: usize,
    pub wall_s: f64,
    /// Mean wall time of one Step-3 coordinate solve.
    pub step3_coord_ms: f64,
    /// `‖v − v̂‖₂` after label alignment.
    pub error: f64,
    /// `error` over the parameter count, `(2n + 1)k`.
    pub normalized_error: f64,
    pub paths: u128,
}

pub fn benchmark_row(k: usize, n: usize, trials: usize, cfg: &RunConfig) -> Result<BenchRow> {
    let sampler = ModelSampler::default();
    let opts = cfg.recovery();
    let plan = RecoveryPlan::algorithm1(k, n, &opts)?;
    let keys = plan.required_moments();
    let mut row = BenchRow {
        k,
        n,
        trials,
        wall_s: 0.0,
        step3_coord_ms: 0.0,
        error: 0.0,
        normalized_error: 0.0,
        paths: 0,
    };
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.tracker.seed);
        rng.set_stream(((k as u64) << 40) | ((n as u64) << 8) | t as u64);
        let truth = sampler.diagonal_model(k, n, &mut rng)?;
        let table = exact_moments(&truth, &keys)?;
        let report = algorithm1(&table, k, n, &opts)?;
        let ct = &report.coordinate_times_ms;
        row.wall_s += report.wall_time_ms / 1e3;
        row.step3_coord_ms += if ct.is_empty() { 0.0 } else { ct.iter().sum::<f64>() / ct.len() as f64 };
        row.error += truth.aligned_error(&report.params, true);
        row.normalized_error += truth.normalized_error(&report.params, true);
        row.paths = report.paths_tracked;
    }
    let d = trials.max(1) as f64;
    row.wall_s /= d;
    row.step3_coord_ms /= d;
    row.error /= d;
    row.normalized_error /= d;
    Ok(row)
}

pub fn benchmark(args: &BenchmarkArgs, cfg: &RunConfig) -> Result<i32> {
    let mut rows = Vec::new();
    println!(
        "{:>3} {:>7} {:>6} {:>10} {:>14} {:>11} {:>11} {:>7}",
        "k", "n", "trials", "wall_s", "step3_coord_ms", "error", "norm_error", "paths"
    );
    for &n in &args.n {
        let r = benchmark_row(args.k, n, args.trials, cfg)?;
        println!(
            "{:>3} {:>7} {:>6} {:>10.3} {:>14.3} {:>11.3e} {:>11.3e} {:>7}",
            r.k, r.n, r.trials, r.wall_s, r.step3_coord_ms, r.error, r.normalized_error, r.paths
        );
        rows.push(r);
    }
    if let Some(p) = &args.csv {
        let mut w = csv::Writer::from_path(p)?;
        for r in &rows {
            w.serialize(r)?;
        }
        w.flush()?;
    }
    Ok(EXIT_OK)
}

pub fn precompute(args: &PrecomputeArgs, cfg: &RunConfig) -> Result<i32> {
    let start = precompute_general_start(args.k, cfg.tracker.seed, &cfg.tracker, |done, total| {
        eprintln!("{done}/{total} paths");
    })?;
    let expected = ModelClass::General.expected_solutions(args.k);
    eprintln!(
        "{} orbit representatives, {} solutions (expected {expected})",
        start.representatives.len(),
        start.solution_count()
    );
    std::fs::write(&args.output, start.to_json_string()?)?;
    Ok(if start.solution_count() as u128 == expected { EXIT_OK } else { EXIT_SOLVER })
}
