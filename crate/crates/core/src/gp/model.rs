use super::cholesky::{dot, PackedLower};
use super::GpError;

/// Relative predictive variance treated as exactly zero.
pub const VARIANCE_FLOOR: f64 = 1e-12;

/// Escalating diagonal jitter tried when a factorization fails.
pub const JITTER_LADDER: [f64; 8] = [0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4];

/// Squared-exponential kernel with an isotropic length scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel {
    pub length_scale: f64,
    pub signal_variance: f64,
    pub noise_variance: f64,
}

impl Kernel {
    pub fn new(length_scale: f64, signal_variance: f64, noise_variance: f64) -> Result<Self, GpError> {
        let k = Self {
            length_scale,
            signal_variance,
            noise_variance,
        };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<(), GpError> {
        if !(self.length_scale > 0.0 && self.length_scale.is_finite())
            || !(self.signal_variance > 0.0 && self.signal_variance.is_finite())
            || !(self.noise_variance >= 0.0 && self.noise_variance.is_finite())
        {
            return Err(GpError::Config(format!("invalid kernel parameters {self:?}")));
        }
        Ok(())
    }

    #[inline]
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        self.signal_variance * (-0.5 * sq_dist(a, b) / (self.length_scale * self.length_scale)).exp()
    }
}

#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Log-spaced length-scale grid searched by [`GpModel::fit_select`].
#[derive(Debug, Clone, PartialEq)]
pub struct HyperGrid {
    pub length_scales: Vec<f64>,
    /// Noise variance as a fraction of the signal variance.
    pub noise_ratio: f64,
}

impl HyperGrid {
    pub fn log_spaced(lo: f64, hi: f64, count: usize, noise_ratio: f64) -> Self {
        let length_scales = if count == 1 {
            vec![lo]
        } else {
            (0..count)
                .map(|i| match i {
                    0 => lo,
                    i if i == count - 1 => hi,
                    i => (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (count - 1) as f64).exp(),
                })
                .collect()
        };
        Self {
            length_scales,
            noise_ratio,
        }
    }
}

impl Default for HyperGrid {
    fn default() -> Self {
        Self::log_spaced(0.05, 20.0, 16, 1e-6)
    }
}

/// Gaussian-process regressor with a constant prior mean.
#[derive(Debug, Clone)]
pub struct GpModel {
    dim: usize,
    inputs: Vec<f64>,
    targets: Vec<f64>,
    kernel: Kernel,
    prior_mean: f64,
    jitter: f64,
    chol: PackedLower,
    /// `L⁻¹ (y - m)`.
    beta: Vec<f64>,
    /// `(K + σ_n² I)⁻¹ (y - m)`.
    alpha: Vec<f64>,
}

fn check_data(inputs: &[Vec<f64>], targets: &[f64]) -> Result<usize, GpError> {
    if inputs.is_empty() {
        return Err(GpError::Empty);
    }
    if inputs.len() != targets.len() {
        return Err(GpError::Shape {
            expected: inputs.len(),
            got: targets.len(),
        });
    }
    let dim = inputs[0].len();
    if dim == 0 {
        return Err(GpError::Config("inputs must have at least one dimension".into()));
    }
    for x in inputs {
        if x.len() != dim {
            return Err(GpError::Shape {
                expected: dim,
                got: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(GpError::NonFinite);
        }
    }
    if targets.iter().any(|v| !v.is_finite()) {
        return Err(GpError::NonFinite);
    }
    Ok(dim)
}

impl GpModel {
    /// Fits with fixed hyperparameters and a zero prior mean.
    pub fn fit(inputs: &[Vec<f64>], targets: &[f64], kernel: Kernel) -> Result<Self, GpError> {
        Self::fit_with_mean(inputs, targets, kernel, 0.0)
    }

    pub fn fit_with_mean(inputs: &[Vec<f64>], targets: &[f64], kernel: Kernel, prior_mean: f64) -> Result<Self, GpError> {
        kernel.validate()?;
        let dim = check_data(inputs, targets)?;
        let flat: Vec<f64> = inputs.iter().flatten().copied().collect();
        Self::build(dim, flat, targets.to_vec(), kernel, prior_mean)
    }

    /// Fits with the prior mean and signal variance matched to the target
    /// mean and variance and the length scale chosen by log marginal
    /// likelihood over `grid`. Ties go to the larger length scale.
    pub fn fit_select(inputs: &[Vec<f64>], targets: &[f64], grid: &HyperGrid) -> Result<Self, GpError> {
        let dim = check_data(inputs, targets)?;
        if grid.length_scales.is_empty() {
            return Err(GpError::Config("empty length-scale grid".into()));
        }
        let n = targets.len() as f64;
        let mean = targets.iter().sum::<f64>() / n;
        let var = targets.iter().map(|y| (y - mean) * (y - mean)).sum::<f64>() / n;
        let signal = if var > 1e-300 { var } else { 1.0 };
        let flat: Vec<f64> = inputs.iter().flatten().copied().collect();
        let mut best: Option<(f64, GpModel)> = None;
        let mut scales = grid.length_scales.clone();
        scales.sort_by(|a, b| b.total_cmp(a));
        let mut last_err = None;
        for &ls in &scales {
            let kernel = Kernel::new(ls, signal, grid.noise_ratio * signal)?;
            match Self::build(dim, flat.clone(), targets.to_vec(), kernel, mean) {
                Ok(m) => {
                    let lml = m.log_marginal_likelihood();
                    if best.as_ref().is_none_or(|(b, _)| lml > *b) {
                        best = Some((lml, m));
                    }
                }
                Err(e) => last_err = Some(e),
            }
        }
        match best {
            Some((_, m)) => Ok(m),
            None => Err(last_err.expect("grid non-empty")),
        }
    }

    fn build(dim: usize, inputs: Vec<f64>, targets: Vec<f64>, kernel: Kernel, prior_mean: f64) -> Result<Self, GpError> {
        let n = targets.len();
        let mut last = 0.0;
        for &jitter in &JITTER_LADDER {
            last = jitter;
            if let Some(chol) = factor(dim, &inputs, n, &kernel, jitter) {
                let mut m = Self {
                    dim,
                    inputs,
                    targets,
                    kernel,
                    prior_mean,
                    jitter,
                    chol,
                    beta: Vec::new(),
                    alpha: Vec::new(),
                };
                m.refresh_weights();
                return Ok(m);
            }
        }
        Err(GpError::Conditioning { jitter: last })
    }

    fn refresh_weights(&mut self) {
        let centred: Vec<f64> = self.targets.iter().map(|y| y - self.prior_mean).collect();
        self.beta = self.chol.forward(&centred);
        self.alpha = self.chol.backward(&self.beta);
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn prior_mean(&self) -> f64 {
        self.prior_mean
    }

    /// Jitter added to the diagonal on top of the noise variance.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn input(&self, i: usize) -> &[f64] {
        &self.inputs[i * self.dim..(i + 1) * self.dim]
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub(crate) fn chol(&self) -> &PackedLower {
        &self.chol
    }

    pub(crate) fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub(crate) fn diagonal(&self) -> f64 {
        self.kernel.signal_variance + self.kernel.noise_variance + self.jitter
    }

    pub fn kernel_vector(&self, x: &[f64]) -> Vec<f64> {
        (0..self.len()).map(|i| self.kernel.eval(self.input(i), x)).collect()
    }

    pub fn log_marginal_likelihood(&self) -> f64 {
        let n = self.len() as f64;
        -0.5 * dot(&self.beta, &self.beta) - self.chol.log_det_half() - 0.5 * n * (2.0 * std::f64::consts::PI).ln()
    }

    /// Predictive mean and variance of the latent function at `x`.
    pub fn posterior(&self, x: &[f64]) -> (f64, f64) {
        assert_eq!(x.len(), self.dim, "query dimension mismatch");
        self.moments(&self.chol.forward(&self.kernel_vector(x)))
    }

    fn moments(&self, v: &[f64]) -> (f64, f64) {
        let mean = self.prior_mean + dot(v, &self.beta);
        let var = self.kernel.signal_variance - dot(v, v);
        // cancellation leaves roundoff-sized residues at training points
        let var = if var <= VARIANCE_FLOOR * self.kernel.signal_variance { 0.0 } else { var };
        (mean, var)
    }

    pub fn posterior_mean(&self, x: &[f64]) -> f64 {
        self.prior_mean + dot(&self.kernel_vector(x), &self.alpha)
    }

    /// Adds one observation, extending the factor by a row when possible
    /// and refactoring with escalated jitter otherwise.
    pub fn append(&mut self, x: &[f64], y: f64) -> Result<(), GpError> {
        if x.len() != self.dim {
            return Err(GpError::Shape {
                expected: self.dim,
                got: x.len(),
            });
        }
        if !y.is_finite() || x.iter().any(|v| !v.is_finite()) {
            return Err(GpError::NonFinite);
        }
        let k = self.kernel_vector(x);
        let ok = self.chol.push_row(&k, self.diagonal());
        self.inputs.extend_from_slice(x);
        self.targets.push(y);
        if ok {
            self.refresh_weights();
            Ok(())
        } else {
            let n = self.targets.len();
            let start = JITTER_LADDER.iter().position(|&j| j > self.jitter).unwrap_or(JITTER_LADDER.len());
            for &jitter in &JITTER_LADDER[start..] {
                if let Some(chol) = factor(self.dim, &self.inputs, n, &self.kernel, jitter) {
                    self.chol = chol;
                    self.jitter = jitter;
                    self.refresh_weights();
                    return Ok(());
                }
            }
            self.inputs.truncate(self.inputs.len() - self.dim);
            self.targets.pop();
            Err(GpError::Conditioning {
                jitter: *JITTER_LADDER.last().expect("non-empty"),
            })
        }
    }

    /// Replaces the targets and prior mean, keeping inputs and kernel.
    pub(crate) fn retarget(&mut self, targets: Vec<f64>, prior_mean: f64) {
        debug_assert_eq!(targets.len(), self.len());
        self.targets = targets;
        self.prior_mean = prior_mean;
        self.refresh_weights();
    }
}

fn factor(dim: usize, inputs: &[f64], n: usize, kernel: &Kernel, jitter: f64) -> Option<PackedLower> {
    let mut chol = PackedLower::default();
    let diag = kernel.signal_variance + kernel.noise_variance + jitter;
    let mut row = Vec::with_capacity(n);
    for i in 0..n {
        row.clear();
        let xi = &inputs[i * dim..(i + 1) * dim];
        row.extend((0..i).map(|j| kernel.eval(&inputs[j * dim..(j + 1) * dim], xi)));
        if !chol.push_row(&row, diag) {
            return None;
        }
    }
    Some(chol)
}
