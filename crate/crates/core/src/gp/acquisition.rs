use std::f64::consts::{FRAC_1_SQRT_2, PI};

pub fn normal_pdf(u: f64) -> f64 {
    (-0.5 * u * u).exp() / (2.0 * PI).sqrt()
}

pub fn normal_cdf(u: f64) -> f64 {
    0.5 * libm::erfc(-u * FRAC_1_SQRT_2)
}

/// Closed-form expected improvement for maximization from the predictive
/// mean and standard deviation.
pub fn expected_improvement(mean: f64, sd: f64, best: f64, xi: f64) -> f64 {
    let gain = mean - best - xi;
    if !(sd > 0.0) {
        return gain.max(0.0);
    }
    let u = gain / sd;
    (gain * normal_cdf(u) + sd * normal_pdf(u)).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spot_values() {
        assert_eq!(expected_improvement(0.5, 0.0, 1.0, 0.01), 0.0);
        assert!((expected_improvement(1.31, 0.0, 1.0, 0.01) - 0.3).abs() < 1e-12);
        let v = expected_improvement(1.01, 1.0, 1.0, 0.01);
        assert!((v - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn cdf_reference_points() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert!((normal_cdf(1.96) - 0.975_002_104_851_780).abs() < 1e-12);
        assert!(normal_cdf(-40.0) >= 0.0);
    }

    #[test]
    fn non_negative_and_monotone() {
        let mut prev = 0.0;
        for i in 0..200 {
            let mu = -5.0 + i as f64 * 0.05;
            let e = expected_improvement(mu, 0.7, 0.0, 0.0);
            assert!(e >= prev && e >= 0.0);
            prev = e;
        }
    }
}
