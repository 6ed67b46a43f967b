//! The three networks and their binary file format.
//!
//! Layout, all integers little-endian:
//! `AAEMODEL` magic, `u32` version, then for encoder, decoder and
//! discriminator a `u32` width count, the widths as `u32` and a `u8`
//! output-activation code; then every parameter as `f64` in the same
//! network order (per layer, weights row-major then biases).

use std::fs;
use std::path::Path;

use rand::Rng;

use super::mlp::{Activation, Batch, Mlp};
use super::AaeError;
use crate::codec::RelaxedVector;

pub const MODEL_MAGIC: &[u8; 8] = b"AAEMODEL";
pub const MODEL_VERSION: u32 = 1;

/// Network widths. Hidden layers use the rectifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Architecture {
    pub input: usize,
    pub latent: usize,
    pub encoder_hidden: Vec<usize>,
    pub decoder_hidden: Vec<usize>,
    pub discriminator_hidden: Vec<usize>,
}

impl Default for Architecture {
    fn default() -> Self {
        Self {
            input: crate::codec::DEFAULT_LAYERS,
            latent: 2,
            encoder_hidden: vec![64, 32],
            decoder_hidden: vec![64, 128],
            discriminator_hidden: vec![16],
        }
    }
}

impl Architecture {
    pub fn with_input(input: usize) -> Self {
        Self {
            input,
            ..Self::default()
        }
    }

    fn widths(first: usize, hidden: &[usize], last: usize) -> Vec<usize> {
        let mut w = vec![first];
        w.extend_from_slice(hidden);
        w.push(last);
        w
    }

    pub fn validate(&self) -> Result<(), AaeError> {
        let all = [self.input, self.latent]
            .into_iter()
            .chain(self.encoder_hidden.iter().copied())
            .chain(self.decoder_hidden.iter().copied())
            .chain(self.discriminator_hidden.iter().copied());
        for w in all {
            if w == 0 {
                return Err(AaeError::Config("layer widths must be positive".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AaeModel {
    pub encoder: Mlp,
    pub decoder: Mlp,
    pub discriminator: Mlp,
}

impl AaeModel {
    pub fn new<R: Rng + ?Sized>(arch: &Architecture, rng: &mut R) -> Result<Self, AaeError> {
        arch.validate()?;
        let encoder = Mlp::new(
            &Architecture::widths(arch.input, &arch.encoder_hidden, arch.latent),
            Activation::Linear,
            rng,
        );
        let decoder = Mlp::new(
            &Architecture::widths(arch.latent, &arch.decoder_hidden, arch.input),
            Activation::Sigmoid,
            rng,
        );
        let discriminator = Mlp::new(
            &Architecture::widths(arch.latent, &arch.discriminator_hidden, 1),
            Activation::Sigmoid,
            rng,
        );
        Ok(Self {
            encoder,
            decoder,
            discriminator,
        })
    }

    fn check_shapes(&self) -> Result<(), AaeError> {
        let latent = self.encoder.output_width();
        let checks = [
            (self.decoder.input_width(), latent),
            (self.discriminator.input_width(), latent),
            (self.decoder.output_width(), self.encoder.input_width()),
            (self.discriminator.output_width(), 1),
        ];
        for (got, expected) in checks {
            if got != expected {
                return Err(AaeError::Shape { expected, got });
            }
        }
        if self.encoder.output != Activation::Linear
            || self.decoder.output != Activation::Sigmoid
            || self.discriminator.output != Activation::Sigmoid
        {
            return Err(AaeError::Config("unexpected output activations".into()));
        }
        Ok(())
    }

    pub fn input_dim(&self) -> usize {
        self.encoder.input_width()
    }

    pub fn latent_dim(&self) -> usize {
        self.encoder.output_width()
    }

    pub fn encode(&self, x: &[f64]) -> Result<Vec<f64>, AaeError> {
        if x.len() != self.input_dim() {
            return Err(AaeError::Shape {
                expected: self.input_dim(),
                got: x.len(),
            });
        }
        Ok(self.encoder.forward_one(x))
    }

    pub fn encode_all(&self, xs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, AaeError> {
        if let Some(bad) = xs.iter().find(|x| x.len() != self.input_dim()) {
            return Err(AaeError::Shape {
                expected: self.input_dim(),
                got: bad.len(),
            });
        }
        if xs.is_empty() {
            return Ok(Vec::new());
        }
        Ok(self.encoder.forward(&Batch::from_rows(xs)).to_rows())
    }

    /// Decoder probabilities, clamped to the open unit interval.
    pub fn decode(&self, z: &[f64]) -> Result<RelaxedVector, AaeError> {
        if z.len() != self.latent_dim() {
            return Err(AaeError::Shape {
                expected: self.latent_dim(),
                got: z.len(),
            });
        }
        let p = self
            .decoder
            .forward_one(z)
            .into_iter()
            .map(|v| v.clamp(super::PROB_CLAMP, 1.0 - super::PROB_CLAMP))
            .collect();
        Ok(RelaxedVector::new(p).expect("probabilities are finite"))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MODEL_MAGIC);
        out.extend_from_slice(&MODEL_VERSION.to_le_bytes());
        let nets = [&self.encoder, &self.decoder, &self.discriminator];
        for net in nets {
            let sizes = net.sizes();
            out.extend_from_slice(&(sizes.len() as u32).to_le_bytes());
            for s in sizes {
                out.extend_from_slice(&(s as u32).to_le_bytes());
            }
            out.push(net.output.code());
        }
        for net in nets {
            for p in net.flat_params() {
                out.extend_from_slice(&p.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, AaeError> {
        let mut r = Reader { bytes, at: 0 };
        let magic = r.take(MODEL_MAGIC.len(), "magic")?;
        if magic != MODEL_MAGIC {
            return Err(r.error_at(0, "bad magic"));
        }
        let version = r.u32("version")?;
        if version != MODEL_VERSION {
            return Err(r.error_at(8, &format!("unsupported version {version}")));
        }
        let mut nets = Vec::with_capacity(3);
        for _ in 0..3 {
            let start = r.at;
            let count = r.u32("width count")? as usize;
            if !(2..=64).contains(&count) {
                return Err(r.error_at(start, &format!("implausible width count {count}")));
            }
            let mut sizes = Vec::with_capacity(count);
            for _ in 0..count {
                let at = r.at;
                let w = r.u32("width")? as usize;
                if w == 0 || w > 1 << 16 {
                    return Err(r.error_at(at, &format!("implausible width {w}")));
                }
                sizes.push(w);
            }
            let at = r.at;
            let code = r.take(1, "activation")?[0];
            let act = Activation::from_code(code).ok_or_else(|| r.error_at(at, &format!("bad activation code {code}")))?;
            nets.push(Mlp::zeros(&sizes, act));
        }
        for net in &mut nets {
            let n = net.param_count();
            let mut params = Vec::with_capacity(n);
            for _ in 0..n {
                let at = r.at;
                let v = f64::from_le_bytes(r.take(8, "parameter")?.try_into().expect("8 bytes"));
                if !v.is_finite() {
                    return Err(r.error_at(at, "non-finite parameter"));
                }
                params.push(v);
            }
            net.set_flat_params(&params);
        }
        if r.at != bytes.len() {
            return Err(r.error_at(r.at, "trailing bytes"));
        }
        let discriminator = nets.pop().expect("three nets");
        let decoder = nets.pop().expect("three nets");
        let encoder = nets.pop().expect("three nets");
        let model = Self {
            encoder,
            decoder,
            discriminator,
        };
        model.check_shapes()?;
        Ok(model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), AaeError> {
        let path = path.as_ref();
        fs::write(path, self.to_bytes()).map_err(|e| AaeError::Io(format!("{}: {e}", path.display())))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, AaeError> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| AaeError::Io(format!("{}: {e}", path.display())))?;
        Self::from_bytes(&bytes)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl Reader<'_> {
    fn error_at(&self, offset: usize, message: &str) -> AaeError {
        AaeError::Format {
            offset,
            message: message.to_string(),
        }
    }

    fn take(&mut self, n: usize, what: &str) -> Result<&[u8], AaeError> {
        if self.bytes.len() - self.at < n {
            return Err(self.error_at(self.at, &format!("truncated while reading {what}")));
        }
        let s = &self.bytes[self.at..self.at + n];
        self.at += n;
        Ok(s)
    }

    fn u32(&mut self, what: &str) -> Result<u32, AaeError> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().expect("4 bytes")))
    }
}
