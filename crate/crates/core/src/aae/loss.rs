//! Loss functions. Probabilities are clamped before taking logs; the
//! gradient helpers are taken with respect to the logits.

pub const PROB_CLAMP: f64 = 1e-7;

#[inline]
fn clamp_p(p: f64) -> f64 {
    p.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP)
}

/// Mean binary cross entropy between a target `x` and a reconstruction `x_hat`.
pub fn reconstruction_loss(x: &[f64], x_hat: &[f64]) -> f64 {
    assert_eq!(x.len(), x_hat.len(), "length mismatch");
    let sum: f64 = x
        .iter()
        .zip(x_hat)
        .map(|(&t, &p)| {
            let p = clamp_p(p);
            -(t * p.ln() + (1.0 - t) * (1.0 - p).ln())
        })
        .sum();
    sum / x.len() as f64
}

/// Gradient of [`reconstruction_loss`] with respect to the decoder's
/// pre-sigmoid outputs: `(x_hat - x) / n`.
pub fn reconstruction_grad(x: &[f64], x_hat: &[f64]) -> Vec<f64> {
    let n = x.len() as f64;
    x.iter().zip(x_hat).map(|(&t, &p)| (p - t) / n).collect()
}

/// `-mean log D(real) - mean log(1 - D(fake))`.
pub fn discriminator_loss(d_real: &[f64], d_fake: &[f64]) -> f64 {
    let real: f64 = d_real.iter().map(|&p| -clamp_p(p).ln()).sum::<f64>() / d_real.len() as f64;
    let fake: f64 = d_fake.iter().map(|&p| -(1.0 - clamp_p(p)).ln()).sum::<f64>() / d_fake.len() as f64;
    real + fake
}

/// Non-saturating generator loss `-mean log D(fake)`.
pub fn generator_loss(d_fake: &[f64]) -> f64 {
    d_fake.iter().map(|&p| -clamp_p(p).ln()).sum::<f64>() / d_fake.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn perfect_reconstruction_is_near_zero() {
        let x = [0.0, 1.0, 1.0, 0.0];
        assert!(reconstruction_loss(&x, &x) <= 1e-6);
        assert!(reconstruction_loss(&x, &x) >= 0.0);
    }

    #[test]
    fn half_output_is_ln2() {
        let x = [0.0, 1.0, 1.0, 0.0, 1.0];
        assert!((reconstruction_loss(&x, &[0.5; 5]) - LN_2).abs() < 1e-15);
    }

    #[test]
    fn confused_discriminator() {
        assert!((discriminator_loss(&[0.5; 7], &[0.5; 3]) - 2.0 * LN_2).abs() < 1e-15);
        assert!((generator_loss(&[0.5; 4]) - LN_2).abs() < 1e-15);
    }

    #[test]
    fn saturated_probabilities_stay_finite() {
        assert!(discriminator_loss(&[0.0], &[1.0]).is_finite());
        assert!(generator_loss(&[0.0]).is_finite());
        assert!(reconstruction_loss(&[1.0, 0.0], &[0.0, 1.0]).is_finite());
    }

    #[test]
    fn grad_matches_finite_difference_through_sigmoid() {
        use crate::aae::mlp::sigmoid;
        let x = [0.0, 1.0, 1.0, 0.3];
        let z = [0.4, -1.2, 2.0, 0.1];
        let p: Vec<f64> = z.iter().map(|&v| sigmoid(v)).collect();
        let g = reconstruction_grad(&x, &p);
        for i in 0..4 {
            let h = 1e-6;
            let mut zp = z;
            zp[i] += h;
            let mut zm = z;
            zm[i] -= h;
            let f = |zz: &[f64; 4]| reconstruction_loss(&x, &zz.map(sigmoid));
            let fd = (f(&zp) - f(&zm)) / (2.0 * h);
            assert!((fd - g[i]).abs() < 1e-8 * g[i].abs().max(1.0), "{fd} vs {}", g[i]);
        }
    }
}
