//! Fully connected networks with hand-written backpropagation.
//!
//! Activations are processed a batch at a time as row-major
//! `batch × width` matrices. Hidden layers use the rectifier; the output
//! layer is linear or logistic.

use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Linear,
    Sigmoid,
}

impl Activation {
    pub(crate) fn code(self) -> u8 {
        match self {
            Activation::Linear => 0,
            Activation::Sigmoid => 1,
        }
    }

    pub(crate) fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Activation::Linear),
            1 => Some(Activation::Sigmoid),
            _ => None,
        }
    }
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Row-major matrix, one sample per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Batch {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged batch");
            data.extend_from_slice(r);
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let i = 4 * c;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in 4 * chunks..a.len() {
        s += a[i] * b[i];
    }
    s
}

#[inline]
fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Affine layer `y = W x + b` with `W` stored `outputs × inputs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Dense {
    fn forward(&self, x: &Batch) -> Batch {
        let mut y = Batch::zeros(x.rows, self.outputs);
        for s in 0..x.rows {
            let xr = x.row(s);
            let yr = y.row_mut(s);
            for (j, out) in yr.iter_mut().enumerate() {
                *out = dot(&self.weights[j * self.inputs..(j + 1) * self.inputs], xr) + self.biases[j];
            }
        }
        y
    }
}

/// Cached per-layer values from a forward pass.
#[derive(Debug, Clone)]
pub struct Trace {
    /// `inputs[l]` is the input to layer `l`.
    inputs: Vec<Batch>,
    /// Pre-activations of every layer.
    pre: Vec<Batch>,
    pub output: Batch,
}

/// Gradient buffers shaped like the network's parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<(Vec<f64>, Vec<f64>)>,
}

impl Gradients {
    pub fn flat(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (w, b) in &self.layers {
            out.extend_from_slice(w);
            out.extend_from_slice(b);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    pub layers: Vec<Dense>,
    pub output: Activation,
}

impl Mlp {
    /// He-uniform initialisation for rectifier layers, Glorot-uniform for
    /// the output layer, zero biases.
    pub fn new<R: Rng + ?Sized>(sizes: &[usize], output: Activation, rng: &mut R) -> Self {
        assert!(sizes.len() >= 2, "need input and output widths");
        let last = sizes.len() - 2;
        let layers = sizes
            .windows(2)
            .enumerate()
            .map(|(l, w)| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let limit = if l == last {
                    (6.0 / (fan_in + fan_out) as f64).sqrt()
                } else {
                    (6.0 / fan_in as f64).sqrt()
                };
                Dense {
                    inputs: fan_in,
                    outputs: fan_out,
                    weights: (0..fan_in * fan_out).map(|_| rng.random_range(-limit..limit)).collect(),
                    biases: vec![0.0; fan_out],
                }
            })
            .collect();
        Self { layers, output }
    }

    /// Network with every parameter zero.
    pub fn zeros(sizes: &[usize], output: Activation) -> Self {
        let layers = sizes
            .windows(2)
            .map(|w| Dense {
                inputs: w[0],
                outputs: w[1],
                weights: vec![0.0; w[0] * w[1]],
                biases: vec![0.0; w[1]],
            })
            .collect();
        Self { layers, output }
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![self.layers[0].inputs];
        s.extend(self.layers.iter().map(|l| l.outputs));
        s
    }

    pub fn input_width(&self) -> usize {
        self.layers[0].inputs
    }

    pub fn output_width(&self) -> usize {
        self.layers[self.layers.len() - 1].outputs
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.biases.len()).sum()
    }

    /// Parameters in document order: per layer, weights row-major, then biases.
    pub fn flat_params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for l in &self.layers {
            out.extend_from_slice(&l.weights);
            out.extend_from_slice(&l.biases);
        }
        out
    }

    pub fn set_flat_params(&mut self, params: &[f64]) {
        assert_eq!(params.len(), self.param_count());
        let mut at = 0;
        for l in &mut self.layers {
            let nw = l.weights.len();
            l.weights.copy_from_slice(&params[at..at + nw]);
            at += nw;
            let nb = l.biases.len();
            l.biases.copy_from_slice(&params[at..at + nb]);
            at += nb;
        }
    }

    pub fn zero_gradients(&self) -> Gradients {
        Gradients {
            layers: self
                .layers
                .iter()
                .map(|l| (vec![0.0; l.weights.len()], vec![0.0; l.biases.len()]))
                .collect(),
        }
    }

    pub fn forward_trace(&self, x: &Batch) -> Trace {
        assert_eq!(x.cols, self.input_width(), "input width mismatch");
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut current = x.clone();
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            let z = layer.forward(&current);
            let mut a = z.clone();
            if l < last {
                a.data.iter_mut().for_each(|v| *v = v.max(0.0));
            } else if self.output == Activation::Sigmoid {
                a.data.iter_mut().for_each(|v| *v = sigmoid(*v));
            }
            inputs.push(current);
            pre.push(z);
            current = a;
        }
        Trace {
            inputs,
            pre,
            output: current,
        }
    }

    pub fn forward(&self, x: &Batch) -> Batch {
        self.forward_trace(x).output
    }

    pub fn forward_one(&self, x: &[f64]) -> Vec<f64> {
        self.forward(&Batch::from_rows(&[x.to_vec()])).data
    }

    /// Accumulates parameter gradients into `grads` given the loss gradient
    /// with respect to the output layer's pre-activation, and returns the
    /// gradient with respect to the network input.
    pub fn backward(&self, trace: &Trace, d_output_pre: &Batch, grads: &mut Gradients) -> Batch {
        let mut delta = d_output_pre.clone();
        for l in (0..self.layers.len()).rev() {
            let layer = &self.layers[l];
            let input = &trace.inputs[l];
            let (gw, gb) = &mut grads.layers[l];
            for s in 0..delta.rows {
                let d = delta.row(s);
                let x = input.row(s);
                for (j, &dj) in d.iter().enumerate() {
                    if dj != 0.0 {
                        axpy(dj, x, &mut gw[j * layer.inputs..(j + 1) * layer.inputs]);
                        gb[j] += dj;
                    }
                }
            }
            let mut d_in = Batch::zeros(delta.rows, layer.inputs);
            for s in 0..delta.rows {
                let d = delta.row(s).to_vec();
                let out = d_in.row_mut(s);
                for (j, &dj) in d.iter().enumerate() {
                    if dj != 0.0 {
                        axpy(dj, &layer.weights[j * layer.inputs..(j + 1) * layer.inputs], out);
                    }
                }
            }
            if l > 0 {
                // rectifier derivative of the previous layer
                let z = &trace.pre[l - 1];
                for (g, &zv) in d_in.data.iter_mut().zip(&z.data) {
                    if zv <= 0.0 {
                        *g = 0.0;
                    }
                }
            }
            delta = d_in;
        }
        delta
    }
}
