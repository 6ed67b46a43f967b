//! Expected-improvement Bayesian optimization over a box.
//!
//! The surrogate works in unit-cube coordinates with standardized targets,
//! so the kernel's signal variance is 1 and the length-scale grid is
//! relative to the box. A run keeps one shifted Halton candidate pool and
//! maintains `L⁻¹ K(X, pool)` row by row as observations arrive, which
//! makes scoring the whole pool linear in the number of observations.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::acquisition::expected_improvement;
use super::halton::{halton_points, MAX_DIM};
use super::model::{sq_dist, GpModel, HyperGrid, Kernel};
use super::GpError;
use crate::rng;

/// Standard deviation, in unit-cube coordinates, of the perturbation applied
/// to a repeated suggestion after a new evaluation.
const PERTURBATION: f64 = 1e-3;
const MAX_DOUBLINGS: i32 = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct BoConfig {
    pub bounds: Vec<(f64, f64)>,
    pub n_init: usize,
    /// Number of new (non-cached) evaluations.
    pub eval_budget: usize,
    pub xi: f64,
    pub pool_size: usize,
    /// Pool candidates refined by coordinate search.
    pub acquisition_restarts: usize,
    /// Acquisition evaluations shared by all refinement starts.
    pub refine_evals: usize,
    pub hyper: HyperGrid,
    /// Length scales are re-selected every iteration up to this many
    /// observations, then every `refit_every` iterations on a subsample of
    /// this size.
    pub full_refit_limit: usize,
    pub refit_every: usize,
    /// Proposals allowed per unit of budget.
    pub proposal_factor: usize,
    /// Cached outcomes join the surrogate only while it holds fewer than
    /// `surrogate_factor × eval_budget` observations.
    pub surrogate_factor: usize,
    pub seed: u64,
}

impl BoConfig {
    pub fn new(bounds: Vec<(f64, f64)>) -> Self {
        Self {
            bounds,
            n_init: 300,
            eval_budget: 2000,
            xi: 0.01,
            pool_size: 4096,
            acquisition_restarts: 8,
            refine_evals: 64,
            hyper: HyperGrid::default(),
            full_refit_limit: 500,
            refit_every: 10,
            proposal_factor: 10,
            surrogate_factor: 1,
            seed: 0,
        }
    }

    /// The square `(-half, half)^dim`.
    pub fn symmetric(dim: usize, half: f64) -> Self {
        Self::new(vec![(-half, half); dim])
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn max_proposals(&self) -> usize {
        self.eval_budget.saturating_mul(self.proposal_factor)
    }

    pub fn validate(&self) -> Result<(), GpError> {
        let bad = |m: String| Err(GpError::Config(m));
        if self.bounds.is_empty() || self.bounds.len() > MAX_DIM {
            return bad(format!("dimension must be 1..={MAX_DIM}, got {}", self.bounds.len()));
        }
        for (i, &(lo, hi)) in self.bounds.iter().enumerate() {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return bad(format!("bounds for dimension {i} must satisfy lo < hi, got ({lo}, {hi})"));
            }
        }
        if self.n_init == 0 || self.n_init > self.eval_budget {
            return bad(format!(
                "need 1 <= n_init <= eval_budget, got {} and {}",
                self.n_init, self.eval_budget
            ));
        }
        if self.pool_size == 0 || self.proposal_factor == 0 || self.surrogate_factor == 0 || self.refit_every == 0 || self.full_refit_limit == 0 {
            return bad("pool_size, proposal_factor, surrogate_factor, refit_every and full_refit_limit must be positive".into());
        }
        if !(self.xi >= 0.0 && self.xi.is_finite()) {
            return bad(format!("xi must be non-negative, got {}", self.xi));
        }
        if self.hyper.length_scales.is_empty() || self.hyper.length_scales.iter().any(|&l| !(l > 0.0)) {
            return bad("length-scale grid must be non-empty and positive".into());
        }
        if !(self.hyper.noise_ratio >= 0.0) {
            return bad("noise ratio must be non-negative".into());
        }
        Ok(())
    }

    fn from_unit(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .zip(&self.bounds)
            .map(|(&v, &(lo, hi))| (lo + v * (hi - lo)).clamp(lo, hi))
            .collect()
    }
}

/// Result of one objective call.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    /// A fresh evaluation; counts toward the budget.
    New(f64),
    /// A value already known to the objective; free.
    Cached(f64),
    /// The point could not be evaluated; skipped.
    Failed(String),
    /// Stop the run.
    Abort(String),
}

pub trait Objective {
    fn evaluate(&mut self, x: &[f64]) -> Outcome;
}

/// Adapts a plain function; non-finite values count as failures.
pub struct FnObjective<F>(pub F);

impl<F: FnMut(&[f64]) -> f64> Objective for FnObjective<F> {
    fn evaluate(&mut self, x: &[f64]) -> Outcome {
        let v = (self.0)(x);
        if v.is_finite() {
            Outcome::New(v)
        } else {
            Outcome::Failed(format!("objective returned {v}"))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalKind {
    New,
    Cached,
    Failed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    /// Proposal index, from 0.
    pub iter: usize,
    pub point: Vec<f64>,
    pub kind: EvalKind,
    pub value: Option<f64>,
    /// Running maximum including this proposal; `None` before any value.
    pub best_so_far: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BoHistory {
    pub evaluations: Vec<Evaluation>,
    pub unique: usize,
}

impl BoHistory {
    pub fn best(&self) -> Option<&Evaluation> {
        let target = self.evaluations.last()?.best_so_far?;
        self.evaluations.iter().find(|e| e.value == Some(target))
    }

    /// `iter,x0,...,value,best_so_far`; missing values are left empty.
    pub fn to_csv(&self) -> String {
        let dim = self.evaluations.first().map_or(0, |e| e.point.len());
        let mut out = String::from("iter");
        for i in 0..dim {
            out.push_str(&format!(",x{i}"));
        }
        out.push_str(",value,best_so_far\n");
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for e in &self.evaluations {
            out.push_str(&e.iter.to_string());
            for v in &e.point {
                out.push_str(&format!(",{v}"));
            }
            out.push_str(&format!(",{},{}\n", opt(e.value), opt(e.best_so_far)));
        }
        out
    }
}

/// Maximizes a plain function.
pub fn bo_maximize(f: impl FnMut(&[f64]) -> f64, config: &BoConfig) -> Result<BoHistory, GpError> {
    bo_loop(&mut FnObjective(f), config)
}

/// `n_init` uniform draws, then fit → suggest → evaluate until
/// `eval_budget` new evaluations or the proposal cap is reached.
///
/// Cached outcomes are free but still inform the surrogate, up to its
/// capacity. A suggestion that coincides with an earlier proposal is
/// perturbed, more widely the longer the run has gone without a new
/// evaluation, and a failed evaluation is followed by a uniform draw.
pub fn bo_loop(objective: &mut dyn Objective, config: &BoConfig) -> Result<BoHistory, GpError> {
    config.validate()?;
    let dim = config.dim();
    let mut init_rng = rng::stream(config.seed, 0);
    let mut pool_rng = rng::stream(config.seed, 1);
    let mut perturb_rng = rng::stream(config.seed, 2);
    let shift: Vec<f64> = (0..dim).map(|_| pool_rng.random::<f64>()).collect();
    let mut history = BoHistory::default();
    let mut xs_unit: Vec<Vec<f64>> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    let mut best: Option<f64> = None;
    let mut surrogate: Option<Surrogate> = None;
    let cap = config.max_proposals();
    let jitter = Normal::new(0.0, 1.0).expect("valid sigma");
    // cached outcomes since the last new one; each doubles the perturbation
    let mut streak = 0i32;
    let mut last_failed = false;
    let capacity = config.surrogate_factor.saturating_mul(config.eval_budget);
    let mut proposed: Vec<Vec<f64>> = Vec::new();
    // suggestion from the current data, reused until the data changes
    let mut pending: Option<Vec<f64>> = None;

    while history.unique < config.eval_budget && history.evaluations.len() < cap {
        // the surrogate never sees failed points, so follow a failure with a random draw
        let u: Vec<f64> = if history.unique < config.n_init || ys.is_empty() || last_failed {
            (0..dim).map(|_| init_rng.random::<f64>()).collect()
        } else {
            let mut u = match &pending {
                Some(u) => u.clone(),
                None => {
                    let s = match surrogate.as_mut() {
                        Some(s) => {
                            s.update(&xs_unit, &ys, config)?;
                            s
                        }
                        None => surrogate.insert(Surrogate::new(&xs_unit, &ys, config, &shift)?),
                    };
                    let u = s.suggest(best.expect("have values"), config);
                    pending = Some(u.clone());
                    u
                }
            };
            if proposed.iter().any(|p| sq_dist(p, &u) < 1e-18) {
                for v in &mut u {
                    let sigma = PERTURBATION * 2f64.powi(streak.min(MAX_DOUBLINGS));
                    *v = (*v + sigma * jitter.sample(&mut perturb_rng)).clamp(0.0, 1.0);
                }
            }
            u
        };
        let x = config.from_unit(&u);
        let (kind, value) = match objective.evaluate(&x) {
            Outcome::New(v) if v.is_finite() => (EvalKind::New, Some(v)),
            Outcome::Cached(v) if v.is_finite() => (EvalKind::Cached, Some(v)),
            Outcome::New(_) | Outcome::Cached(_) | Outcome::Failed(_) => (EvalKind::Failed, None),
            Outcome::Abort(msg) => return Err(GpError::Objective(msg)),
        };
        match kind {
            EvalKind::New => {
                history.unique += 1;
                streak = 0;
            }
            EvalKind::Cached => streak += 1,
            EvalKind::Failed => {}
        }
        last_failed = kind == EvalKind::Failed;
        if let Some(v) = value {
            best = Some(best.map_or(v, |b: f64| b.max(v)));
            if kind == EvalKind::New || xs_unit.len() < capacity {
                xs_unit.push(u.clone());
                ys.push(v);
                pending = None;
            }
        }
        proposed.push(u);
        history.evaluations.push(Evaluation {
            iter: history.evaluations.len(),
            point: x,
            kind,
            value,
            best_so_far: best,
        });
    }
    Ok(history)
}

fn standardize(ys: &[f64]) -> (f64, f64, Vec<f64>) {
    let n = ys.len() as f64;
    let mean = ys.iter().sum::<f64>() / n;
    let var = ys.iter().map(|y| (y - mean) * (y - mean)).sum::<f64>() / n;
    let sd = if var > 1e-24 { var.sqrt() } else { 1.0 };
    (mean, sd, ys.iter().map(|y| (y - mean) / sd).collect())
}

/// Length scale with the best marginal likelihood on (a strided subsample
/// of) the data.
fn select_length_scale(xs: &[Vec<f64>], ys_std: &[f64], config: &BoConfig) -> Result<f64, GpError> {
    let limit = config.full_refit_limit;
    let (sx, sy): (Vec<Vec<f64>>, Vec<f64>) = if xs.len() > limit {
        let stride = xs.len().div_ceil(limit);
        xs.iter().zip(ys_std).step_by(stride).map(|(x, y)| (x.clone(), *y)).unzip()
    } else {
        (xs.to_vec(), ys_std.to_vec())
    };
    let gp = GpModel::fit_select(&sx, &sy, &config.hyper)?;
    Ok(gp.kernel().length_scale)
}

struct Surrogate {
    gp: GpModel,
    pool: Vec<Vec<f64>>,
    /// `rows[i][j] = (L⁻¹ K(X, pool))[i][j]`.
    rows: Vec<Vec<f64>>,
    /// Column sums of squares of `rows`.
    explained: Vec<f64>,
    mean: f64,
    sd: f64,
    since_select: usize,
}

impl Surrogate {
    fn kernel(ls: f64, config: &BoConfig) -> Result<Kernel, GpError> {
        Kernel::new(ls, 1.0, config.hyper.noise_ratio)
    }

    fn new(xs: &[Vec<f64>], ys: &[f64], config: &BoConfig, shift: &[f64]) -> Result<Self, GpError> {
        let (mean, sd, ys_std) = standardize(ys);
        let ls = select_length_scale(xs, &ys_std, config)?;
        let gp = GpModel::fit(xs, &ys_std, Self::kernel(ls, config)?)?;
        let pool = halton_points(config.dim(), config.pool_size, shift);
        let mut s = Self {
            explained: vec![0.0; pool.len()],
            gp,
            pool,
            rows: Vec::new(),
            mean,
            sd,
            since_select: 0,
        };
        s.rebuild_rows();
        Ok(s)
    }

    fn rebuild_rows(&mut self) {
        self.rows.clear();
        self.explained.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.gp.len() {
            self.push_row(i);
        }
    }

    fn push_row(&mut self, i: usize) {
        let l = self.gp.chol().row(i);
        let kernel = *self.gp.kernel();
        let xi = self.gp.input(i);
        let mut row: Vec<f64> = self.pool.iter().map(|p| kernel.eval(xi, p)).collect();
        for (prev, &lij) in self.rows.iter().zip(&l[..i]) {
            for (r, &p) in row.iter_mut().zip(prev) {
                *r -= lij * p;
            }
        }
        let inv = 1.0 / l[i];
        for (r, e) in row.iter_mut().zip(self.explained.iter_mut()) {
            *r *= inv;
            *e += *r * *r;
        }
        self.rows.push(row);
    }

    fn update(&mut self, xs: &[Vec<f64>], ys: &[f64], config: &BoConfig) -> Result<(), GpError> {
        let (mean, sd, ys_std) = standardize(ys);
        self.mean = mean;
        self.sd = sd;
        self.since_select += 1;
        let old_ls = self.gp.kernel().length_scale;
        let reselect = xs.len() <= config.full_refit_limit || self.since_select >= config.refit_every;
        let ls = if reselect {
            self.since_select = 0;
            select_length_scale(xs, &ys_std, config)?
        } else {
            old_ls
        };
        if ls != old_ls {
            self.gp = GpModel::fit(xs, &ys_std, Self::kernel(ls, config)?)?;
            self.rebuild_rows();
            return Ok(());
        }
        let jitter = self.gp.jitter();
        for i in self.gp.len()..xs.len() {
            self.gp.append(&xs[i], ys_std[i])?;
        }
        if self.gp.jitter() != jitter {
            self.rebuild_rows();
        } else {
            for i in self.rows.len()..self.gp.len() {
                self.push_row(i);
            }
        }
        self.gp.retarget(ys_std, 0.0);
        Ok(())
    }

    fn ei_raw(&self, mean_std: f64, var_std: f64, best: f64, xi: f64) -> f64 {
        let mu = self.mean + self.sd * mean_std;
        let sd = self.sd * var_std.max(0.0).sqrt();
        expected_improvement(mu, sd, best, xi)
    }

    fn suggest(&self, best: f64, config: &BoConfig) -> Vec<f64> {
        let beta = self.gp.beta();
        let mut means = vec![0.0; self.pool.len()];
        for (row, &b) in self.rows.iter().zip(beta) {
            for (m, &r) in means.iter_mut().zip(row) {
                *m += r * b;
            }
        }
        let signal = self.gp.kernel().signal_variance;
        let scores: Vec<f64> = means
            .iter()
            .zip(&self.explained)
            .map(|(&m, &e)| self.ei_raw(m, signal - e, best, config.xi))
            .collect();
        let ei_at = |u: &[f64]| {
            let (m, v) = self.gp.posterior(u);
            self.ei_raw(m, v, best, config.xi)
        };
        refine(&self.pool, &scores, &ei_at, config)
    }
}

/// Best pool candidate after coordinate-search refinement of the top
/// `acquisition_restarts` candidates. Works in unit coordinates.
fn refine(pool: &[Vec<f64>], scores: &[f64], ei_at: &dyn Fn(&[f64]) -> f64, config: &BoConfig) -> Vec<f64> {
    let mut order: Vec<usize> = (0..pool.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let starts = config.acquisition_restarts.min(pool.len());
    let mut best_u = pool[order[0]].clone();
    let mut best_v = scores[order[0]];
    if starts == 0 || config.refine_evals == 0 {
        return best_u;
    }
    let dim = config.dim();
    let per_start = (config.refine_evals / starts).max(1);
    let initial_step = 0.5 * (pool.len() as f64).powf(-1.0 / dim as f64);
    for &idx in &order[..starts] {
        let mut u = pool[idx].clone();
        let mut v = scores[idx];
        let mut step = initial_step;
        let mut used = 0;
        'search: while used < per_start && step > 1e-6 {
            let mut improved = false;
            for d in 0..dim {
                for sign in [1.0, -1.0] {
                    if used >= per_start {
                        break 'search;
                    }
                    let mut cand = u.clone();
                    cand[d] = (cand[d] + sign * step).clamp(0.0, 1.0);
                    if cand[d] == u[d] {
                        continue;
                    }
                    used += 1;
                    let cv = ei_at(&cand);
                    if cv > v {
                        u = cand;
                        v = cv;
                        improved = true;
                        break;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        if v > best_v {
            best_v = v;
            best_u = u;
        }
    }
    best_u
}

/// Expected-improvement maximizer for an already fitted model in the
/// coordinates of `config.bounds`, with the pool shift drawn from `rng`.
/// The incumbent is the largest training target.
pub fn suggest<R: Rng + ?Sized>(gp: &GpModel, config: &BoConfig, rng: &mut R) -> Result<Vec<f64>, GpError> {
    config.validate()?;
    if gp.dim() != config.dim() {
        return Err(GpError::Shape {
            expected: config.dim(),
            got: gp.dim(),
        });
    }
    let best = gp.targets().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let shift: Vec<f64> = (0..config.dim()).map(|_| rng.random::<f64>()).collect();
    let pool = halton_points(config.dim(), config.pool_size, &shift);
    let ei_at = |u: &[f64]| {
        let (m, v) = gp.posterior(&config.from_unit(u));
        expected_improvement(m, v.sqrt(), best, config.xi)
    };
    let scores: Vec<f64> = pool.iter().map(|u| ei_at(u)).collect();
    Ok(config.from_unit(&refine(&pool, &scores, &ei_at, config)))
}
