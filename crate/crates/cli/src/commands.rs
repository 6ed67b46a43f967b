use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use emitter_core::aae::{self, AaeModel};
use emitter_core::codec::{self, generate_training_set, to_stack, Dataset, MaterialMap, StructureVector};
use emitter_core::optics::{angular_map, emission_spectrum, field_profile};
use emitter_core::pipeline::{self, brute_force, run_file_name, run_rounds, ExperimentConfig, Mode};
use emitter_core::scoring::Scorer;
use emitter_core::spectra::FomReport;

use crate::config::CliConfig;
use crate::svg::{line_plot, Series};
use crate::{Analysis, Cli, CliError, Command, Design};

type Overrides = Vec<(String, String)>;

fn push<T: ToString>(o: &mut Overrides, key: &str, value: Option<T>) {
    if let Some(v) = value {
        o.push((key.to_string(), v.to_string()));
    }
}

fn quoted(s: &Option<String>) -> Option<String> {
    s.as_ref().map(|v| format!("\"{v}\""))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| CliError::Data(format!("{}: {e}", parent.display())))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn core<T, E: Into<emitter_core::Error>>(r: Result<T, E>) -> Result<T, CliError> {
    r.map_err(|e| CliError::from(e.into()))
}

fn materials(config: &CliConfig) -> Result<MaterialMap, CliError> {
    if config.paths.materials.is_empty() {
        Ok(MaterialMap::default())
    } else {
        core(MaterialMap::load_dir(&config.paths.materials))
    }
}

fn scorer(config: &CliConfig) -> Result<Scorer, CliError> {
    core(Scorer::new(materials(config)?, config.fom_config()))
}

fn design(d: &Design) -> Result<StructureVector, CliError> {
    StructureVector::parse(&d.bits).map_err(|e| CliError::Data(format!("--bits: {e}")))
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let g = &cli.global;
    let mut o: Overrides = Vec::new();
    push(&mut o, "seed", g.seed);
    for kv in &g.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        o.push((k.trim().to_string(), v.trim().to_string()));
    }
    let name = match &cli.command {
        Command::GenData {
            target,
            count,
            min_fom,
            max_attempts,
            augment_factor,
        } => {
            push(&mut o, "fom.target_um", *target);
            push(&mut o, "data.count", *count);
            push(&mut o, "data.min_fom", *min_fom);
            push(&mut o, "data.max_attempts", *max_attempts);
            push(&mut o, "data.augment_factor", *augment_factor);
            "gen-data"
        }
        Command::Train { epochs, .. } => {
            push(&mut o, "aae.epochs", *epochs);
            "train"
        }
        Command::Optimize {
            mode,
            target,
            rounds,
            budget,
            n_init,
            parallel_rounds,
            ..
        } => {
            push(&mut o, "experiment.mode", quoted(mode));
            push(&mut o, "fom.target_um", *target);
            push(&mut o, "experiment.rounds", *rounds);
            push(&mut o, "bo.budget", *budget);
            push(&mut o, "bo.n_init", *n_init);
            push(&mut o, "experiment.parallel_rounds", *parallel_rounds);
            "optimize"
        }
        Command::Analyze { what } => match what {
            Analysis::Spectrum {
                design,
                angle,
                polarization,
                ..
            } => {
                push(&mut o, "fom.target_um", design.target);
                push(&mut o, "analyze.angle_deg", *angle);
                push(&mut o, "analyze.polarization", quoted(polarization));
                "analyze-spectrum"
            }
            Analysis::Angular { design, polarization } => {
                push(&mut o, "fom.target_um", design.target);
                push(&mut o, "analyze.polarization", quoted(polarization));
                "analyze-angular"
            }
            Analysis::Field { design, wavelength } => {
                push(&mut o, "fom.target_um", design.target);
                push(&mut o, "analyze.wavelength_um", *wavelength);
                "analyze-field"
            }
            Analysis::Fom { design } => {
                push(&mut o, "fom.target_um", design.target);
                "analyze-fom"
            }
        },
        Command::Compare { rounds, .. } => {
            push(&mut o, "experiment.rounds", *rounds);
            "compare"
        }
        Command::BruteForce { target, .. } => {
            push(&mut o, "fom.target_um", *target);
            "brute-force"
        }
    };
    let config = CliConfig::resolve(g.config.as_deref(), &o)?;
    let out = g.out.as_path();
    write(&out.join(format!("{name}.config.toml")), &config.to_toml())?;
    match &cli.command {
        Command::GenData { .. } => gen_data(&config, out),
        Command::Train { data, .. } => train(&config, out, data.clone()),
        Command::Optimize { model, .. } => optimize(&config, out, model.clone()),
        Command::Analyze { what } => analyze(&config, out, what),
        Command::Compare { runs, svg, .. } => compare(&config, out, runs, *svg),
        Command::BruteForce { layers, threads, .. } => brute(&config, out, *layers, *threads),
    }
}

fn gen_data(config: &CliConfig, out: &Path) -> Result<(), CliError> {
    let scorer = scorer(config)?;
    let (mut dataset, status) = generate_training_set(&scorer, &config.generation_config());
    let seeds = dataset.len();
    if config.data.augment_factor > 0 && seeds > 0 {
        let variants = core(codec::augment(&dataset, &config.augment_config()))?;
        dataset.extend(variants);
    }
    let dir = config.dataset_dir(out);
    core(dataset.save(&dir))?;
    let mut manifest = String::new();
    let _ = writeln!(manifest, "target_um={}", config.fom.target_um);
    let _ = writeln!(manifest, "seeds={seeds}");
    let _ = writeln!(manifest, "records={}", dataset.len());
    let _ = writeln!(manifest, "attempts={}", status.attempts);
    let _ = writeln!(manifest, "complete={}", status.complete);
    if let Some(m) = dataset.min_seed_fom() {
        let _ = writeln!(manifest, "min_seed_fom={m}");
    }
    write(&dir.join("manifest.txt"), &manifest)?;
    println!("{seeds} seeds, {} records in {}", dataset.len(), dir.display());
    if !status.complete {
        return Err(CliError::Data(format!(
            "only {seeds} of {} seeds reached fom >= {} within {} attempts",
            config.data.count, config.data.min_fom, config.data.max_attempts
        )));
    }
    Ok(())
}

fn train(config: &CliConfig, out: &Path, data: Option<PathBuf>) -> Result<(), CliError> {
    let dir = data.unwrap_or_else(|| config.dataset_dir(out));
    let dataset = core(Dataset::load(&dir))?;
    let (model, history) = core(aae::train(&dataset, &config.train_config()))?;
    let path = config.model_path(out);
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| CliError::Data(format!("{}: {e}", parent.display())))?;
    }
    core(model.save(&path))?;
    write(&out.join("history.csv"), &history.to_csv())?;
    let last = history.epochs.last().expect("at least one epoch");
    println!(
        "trained {} epochs on {} records: reconstruction {:.4}, energy distance {:.4} (initial {:.4})",
        history.epochs.len(),
        dataset.len(),
        last.reconstruction_loss,
        last.energy_distance,
        history.initial.energy_distance
    );
    Ok(())
}

fn optimize(config: &CliConfig, out: &Path, model: Option<PathBuf>) -> Result<(), CliError> {
    let experiment: ExperimentConfig = config.experiment_config()?;
    if experiment.mode == Mode::BruteForce {
        return Err(CliError::Data("use the brute-force command for exhaustive search".into()));
    }
    let scorer = scorer(config)?;
    let model = match experiment.mode {
        Mode::Hybrid => {
            let path = model.unwrap_or_else(|| config.model_path(out));
            Some(core(AaeModel::load(&path))?)
        }
        _ => None,
    };
    let dir = config.runs_dir(out);
    let runs = core(run_rounds(
        &experiment,
        &scorer,
        model.as_ref(),
        Some(&dir),
        config.experiment.parallel_rounds,
    ))?;
    let summary = core(pipeline::compare(&runs))?;
    let (_, table) = summary
        .tables()
        .into_iter()
        .find(|(n, _)| *n == "summary.csv")
        .expect("summary table");
    write(&out.join(format!("{}_summary.csv", experiment.mode)), &table)?;
    for r in &runs {
        println!(
            "{} round {}: best {:.4} after {} structures ({} proposals)",
            r.mode,
            r.round,
            r.best_fom().unwrap_or(f64::NAN),
            r.unique_count(),
            r.proposals()
        );
    }
    Ok(())
}

fn compare(config: &CliConfig, out: &Path, dirs: &[PathBuf], svg: bool) -> Result<(), CliError> {
    let dirs = if dirs.is_empty() {
        vec![config.runs_dir(out)]
    } else {
        dirs.to_vec()
    };
    let rounds = config.experiment.rounds;
    let mut runs = Vec::new();
    for dir in &dirs {
        let mut found = false;
        for mode in [Mode::Hybrid, Mode::Direct] {
            let prefix = run_file_name(mode, 0);
            let prefix = &prefix[..prefix.find("round").expect("round in name") + 5];
            let present = std::fs::read_dir(dir)
                .map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))?
                .filter_map(|e| e.ok())
                .any(|e| e.file_name().to_string_lossy().starts_with(prefix));
            if present {
                found = true;
                runs.extend(core(pipeline::load_runs(dir, mode, rounds))?);
            }
        }
        if !found {
            return Err(CliError::Data(format!("no run files in {}", dir.display())));
        }
    }
    let summary = core(pipeline::compare(&runs))?;
    core(summary.write_tables(out))?;
    for m in &summary.modes {
        println!(
            "{}: {} rounds, final mean max {:.4}, best {:.4}",
            m.mode,
            m.rounds.len(),
            m.final_mean_max(),
            m.best_fom()
        );
    }
    if svg {
        let series: Vec<Series> = summary
            .modes
            .iter()
            .map(|m| Series {
                label: m.mode.to_string(),
                points: m.mean_trace.iter().enumerate().map(|(i, &v)| ((i + 1) as f64, v)).collect(),
            })
            .collect();
        write(
            &out.join("fig2b.svg"),
            &line_plot(&series, "calculated structures", "mean maximum FOM"),
        )?;
    }
    Ok(())
}

fn brute(config: &CliConfig, out: &Path, layers: usize, threads: usize) -> Result<(), CliError> {
    let scorer = scorer(config)?;
    let table = core(brute_force(&scorer, layers, threads))?;
    write(&out.join(format!("brute_force_{layers}.csv")), &table.to_csv())?;
    let (best, report) = table.best();
    println!(
        "best of {} designs: {best} fom {} (top 1% threshold {})",
        table.len(),
        report.total,
        table.top_fraction_threshold(0.01)
    );
    Ok(())
}

fn analyze(config: &CliConfig, out: &Path, what: &Analysis) -> Result<(), CliError> {
    let map = materials(config)?;
    let fom = config.fom_config();
    core(fom.validate())?;
    let grid = fom.evaluation_grid();
    match what {
        Analysis::Spectrum { design: d, svg, .. } => {
            let s = design(d)?;
            let spectrum = core(emission_spectrum(
                &to_stack(&s, &map),
                &grid,
                config.analyze.angle_deg,
                config.polarization()?,
            ))?;
            let mut text = String::from("wavelength_um,emissivity\n");
            for (w, v) in spectrum.wavelengths().iter().zip(spectrum.values()) {
                let _ = writeln!(text, "{w},{v}");
            }
            write(&out.join("spectrum.csv"), &text)?;
            if *svg {
                let points = spectrum.wavelengths().iter().copied().zip(spectrum.values().iter().copied()).collect();
                let series = [Series {
                    label: s.to_string(),
                    points,
                }];
                write(&out.join("spectrum.svg"), &line_plot(&series, "wavelength (um)", "emissivity"))?;
            }
        }
        Analysis::Angular { design: d, .. } => {
            let s = design(d)?;
            let a = &config.analyze;
            if !(a.angle_step_deg > 0.0) {
                return Err(CliError::Data("analyze.angle_step_deg must be positive".into()));
            }
            let steps = ((a.angle_stop_deg - a.angle_start_deg) / a.angle_step_deg + 1e-9).floor();
            let angles: Vec<f64> = (0..=steps.max(0.0) as usize)
                .map(|i| a.angle_start_deg + i as f64 * a.angle_step_deg)
                .collect();
            let pol = config.polarization()?;
            let map = core(angular_map(&to_stack(&s, &map), &grid, &angles, pol))?;
            let mut text = String::from("angle_deg,wavelength_um,emissivity\n");
            for (angle, row) in map.angles_deg.iter().zip(&map.values) {
                for (w, v) in map.wavelengths.iter().zip(row) {
                    let _ = writeln!(text, "{angle},{w},{v}");
                }
            }
            write(&out.join(format!("angular_{pol}.csv")), &text)?;
        }
        Analysis::Field { design: d, .. } => {
            let s = design(d)?;
            let profile = core(field_profile(
                &to_stack(&s, &map),
                config.analyze.wavelength_um,
                config.analyze.samples_per_layer,
            ))?;
            let mut text = String::from("depth_um,amplitude\n");
            for (z, v) in profile.depths.iter().zip(&profile.amplitudes) {
                let _ = writeln!(text, "{z},{v}");
            }
            write(&out.join("field.csv"), &text)?;
        }
        Analysis::Fom { design: d } => {
            let s = design(d)?;
            let report = scorer(config)?.fom(&s);
            write(
                &out.join("fom.csv"),
                &format!("bits,{}\n{s},{}\n", FomReport::CSV_HEADER, report.to_csv_row()),
            )?;
            print!("{}", report.to_key_values());
        }
    }
    Ok(())
}
