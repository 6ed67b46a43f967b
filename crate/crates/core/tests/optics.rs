use std::f64::consts::PI;

use emitter_core::optics::{reflectance, reflection_coefficient, LayerStack, Material, PlaneWaveQuery, Polarization};
use num_complex::Complex64;
use proptest::prelude::*;

fn layer() -> impl Strategy<Value = (f64, f64, f64)> {
    (1.0..4.5f64, 0.0..3.0f64, 0.0..1.5f64)
}

fn stack_of(layers: &[(f64, f64, f64)], substrate: (f64, f64)) -> LayerStack {
    let mut s = LayerStack::bare(Material::constant(substrate.0, substrate.1));
    for &(n, k, d) in layers {
        s.push(Material::constant(n, k), d);
    }
    s
}

fn pol() -> impl Strategy<Value = Polarization> {
    prop_oneof![Just(Polarization::S), Just(Polarization::P)]
}

/// Closed-form film on a substrate, s-polarized, ambient index 1.
fn airy_s(film: Complex64, d: f64, substrate: Complex64, lambda: f64, angle_deg: f64) -> Complex64 {
    let sin0 = angle_deg.to_radians().sin();
    let normal = |n: Complex64| {
        let q = (n * n - sin0 * sin0).sqrt();
        if q.im < 0.0 {
            -q
        } else {
            q
        }
    };
    let (q0, q1, q2) = (Complex64::new(angle_deg.to_radians().cos(), 0.0), normal(film), normal(substrate));
    let r01 = (q0 - q1) / (q0 + q1);
    let r12 = (q1 - q2) / (q1 + q2);
    let phase = (Complex64::i() * 4.0 * PI * q1 * d / lambda).exp();
    (r01 + r12 * phase) / (1.0 + r01 * r12 * phase)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn passive_stacks_stay_within_unit_bounds(
        layers in prop::collection::vec(layer(), 0..6),
        substrate in (0.5..30.0f64, 0.0..40.0f64),
        lambda in 0.5..20.0f64,
        angle in 0.0..89.9f64,
        pol in pol(),
    ) {
        let stack = stack_of(&layers, substrate);
        let r = reflection_coefficient(&stack, &PlaneWaveQuery::new(lambda, angle, pol)).unwrap().norm_sqr();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&r), "R = {r}");
    }
}

proptest! {
    #[test]
    fn polarizations_agree_at_normal_incidence(
        layers in prop::collection::vec(layer(), 0..8),
        substrate in (0.5..30.0f64, 0.0..40.0f64),
        lambda in 1.0..10.0f64,
    ) {
        let stack = stack_of(&layers, substrate);
        let s = reflectance(&stack, &PlaneWaveQuery::new(lambda, 0.0, Polarization::S)).unwrap();
        let p = reflectance(&stack, &PlaneWaveQuery::new(lambda, 0.0, Polarization::P)).unwrap();
        prop_assert!((s - p).abs() <= 1e-12, "{s} vs {p}");
    }

    #[test]
    fn splitting_a_layer_changes_nothing(
        layers in prop::collection::vec(layer(), 1..6),
        pick in 0usize..6,
        substrate in (0.5..30.0f64, 0.0..40.0f64),
        lambda in 1.0..10.0f64,
        angle in 0.0..80.0f64,
        pol in pol(),
    ) {
        let i = pick % layers.len();
        let (n, k, d) = layers[i];
        let mut split = layers.clone();
        split[i].2 = d / 2.0;
        split.insert(i, (n, k, d / 2.0));
        let q = PlaneWaveQuery::new(lambda, angle, pol);
        let a = reflectance(&stack_of(&layers, substrate), &q).unwrap();
        let b = reflectance(&stack_of(&split, substrate), &q).unwrap();
        prop_assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
    }

    #[test]
    fn single_films_match_the_airy_formula(
        film in layer(),
        substrate in (0.5..30.0f64, 0.0..40.0f64),
        angle in 0.0..80.0f64,
    ) {
        let (n, k, d) = film;
        let stack = stack_of(&[film], substrate);
        for i in 0..1000 {
            let lambda = 2.0 + 8.0 * i as f64 / 999.0;
            let r = reflection_coefficient(&stack, &PlaneWaveQuery::new(lambda, angle, Polarization::S)).unwrap();
            let want = airy_s(Complex64::new(n, k), d, Complex64::new(substrate.0, substrate.1), lambda, angle);
            prop_assert!((r.norm_sqr() - want.norm_sqr()).abs() <= 1e-10, "λ = {lambda}: {} vs {}", r.norm_sqr(), want.norm_sqr());
        }
    }

    #[test]
    fn vanishing_layers_have_no_effect(
        layers in prop::collection::vec(layer(), 0..5),
        extra in (1.0..4.5f64, 0.0..3.0f64),
        at in 0usize..6,
        substrate in (0.5..30.0f64, 0.0..40.0f64),
        lambda in 1.0..10.0f64,
        angle in 0.0..80.0f64,
        pol in pol(),
    ) {
        let mut with = layers.clone();
        with.insert(at.min(layers.len()), (extra.0, extra.1, 1e-9));
        let q = PlaneWaveQuery::new(lambda, angle, pol);
        let a = reflectance(&stack_of(&layers, substrate), &q).unwrap();
        let b = reflectance(&stack_of(&with, substrate), &q).unwrap();
        prop_assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    }
}
