//! Subcommand implementations. Each returns `Ok(())` for exit 0 or a
//! [`CliError`] whose `exit_code` distinguishes suite failures (1) from
//! usage/I/O problems (2).

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use sass_core::data::Dataset;
use sass_core::model::argmax;
use sass_core::rng::SplitMix64;
use sass_core::spectral::{assign_exact, fit_kernel, kernel_l2_error, SpectralKernel};
use sass_core::ssm::{discretize, random_stable_system, unroll_kernel};
use sass_core::train::Trainer;

use crate::bench::{fit_loglog_slope, run_scaling, to_csv, BenchPath};
use crate::checkpoint;
use crate::config::{TaskKind, TrainConfig};
use crate::dataset_io;
use crate::error::CliError;
use crate::suites;

pub const METRICS_HEADER: &str = "epoch,split,loss,accuracy";

fn load_config(path: &Path) -> Result<TrainConfig, CliError> {
    let text = std::fs::read_to_string(path)?;
    TrainConfig::parse(&text).map_err(CliError::Config)
}

fn build_dataset(cfg: &TrainConfig) -> Result<Dataset, CliError> {
    if let Some(path) = &cfg.dataset {
        return dataset_io::read_file(Path::new(path));
    }
    let ds = match cfg.task {
        TaskKind::Freq => sass_core::data::gen_freq_task(&cfg.freq_spec())?,
        TaskKind::Shapes => sass_core::data::gen_shape_images(&cfg.shape_spec())?,
    };
    Ok(ds)
}

/// Train per the config file: metrics CSV to stdout and `metrics_out`,
/// final checkpoint to `checkpoint_out`.
pub fn cmd_train(config_path: &Path) -> Result<(), CliError> {
    let cfg = load_config(config_path)?;
    let data = build_dataset(&cfg)?;
    let mut trainer = Trainer::new(cfg.model_config(), data, &cfg.train_settings())?;

    let mut csv = String::from(METRICS_HEADER);
    csv.push('\n');
    println!("{METRICS_HEADER}");
    for _ in 0..cfg.epochs {
        let m = trainer.run_epoch().map_err(|e| match e {
            sass_core::Error::NonFinite(_) => {
                CliError::Suite("training loss became non-finite".into())
            }
            other => CliError::Core(other),
        })?;
        for (split, loss, acc) in [
            ("train", m.train_loss, m.train_acc),
            ("holdout", m.holdout_loss, m.holdout_acc),
        ] {
            let line = format!("{},{},{:.6},{:.6}", m.epoch, split, loss, acc);
            println!("{line}");
            csv.push_str(&line);
            csv.push('\n');
        }
    }

    std::fs::write(&cfg.metrics_out, csv)?;
    checkpoint::write_file(
        Path::new(&cfg.checkpoint_out),
        &cfg,
        &mut trainer.net,
        &trainer.opt,
        &trainer.shuffle_rng,
    )?;
    eprintln!("wrote {} and {}", cfg.metrics_out, cfg.checkpoint_out);
    Ok(())
}

/// Generate the dataset a config describes and write it as a dataset file.
pub fn cmd_gen_data(config_path: &Path, out: &Path) -> Result<(), CliError> {
    let mut cfg = load_config(config_path)?;
    cfg.dataset = None;
    let ds = build_dataset(&cfg)?;
    dataset_io::write_file(out, &ds)?;
    eprintln!("wrote {} samples to {}", ds.len(), out.display());
    Ok(())
}

/// Evaluate a checkpoint on a dataset file: accuracy plus confusion counts
/// as CSV on stdout.
pub fn cmd_eval(checkpoint_path: &Path, dataset_path: &Path) -> Result<(), CliError> {
    let ckpt = checkpoint::read_file(checkpoint_path)?;
    let data = dataset_io::read_file(dataset_path)?;
    let model_cfg = ckpt.config.model_config();
    if data.input_len != model_cfg.input_len() {
        return Err(CliError::Format(format!(
            "dataset sample length {} does not match the checkpointed model ({})",
            data.input_len,
            model_cfg.input_len()
        )));
    }
    if data.num_classes as usize != model_cfg.num_classes {
        return Err(CliError::Format(format!(
            "dataset has {} classes, model has {}",
            data.num_classes, model_cfg.num_classes
        )));
    }

    let classes = model_cfg.num_classes;
    let mut confusion = vec![0u64; classes * classes];
    let mut correct = 0usize;
    for i in 0..data.len() {
        let (logits, _) = ckpt.net.forward(data.sample(i))?;
        let pred = argmax(&logits);
        let truth = data.labels[i] as usize;
        confusion[truth * classes + pred] += 1;
        if pred == truth {
            correct += 1;
        }
    }

    let mut out = String::new();
    let _ = writeln!(out, "accuracy,{:.6}", correct as f64 / data.len() as f64);
    let _ = writeln!(out, "true,pred,count");
    for t in 0..classes {
        for p in 0..classes {
            let _ = writeln!(out, "{t},{p},{}", confusion[t * classes + p]);
        }
    }
    print!("{out}");
    Ok(())
}

fn report(results: &[suites::SuiteResult]) -> Result<(), CliError> {
    let mut failures = 0;
    for r in results {
        println!("{r}");
        if !r.pass {
            failures += 1;
        }
    }
    if failures > 0 {
        Err(CliError::Suite(format!("{failures} suite(s) failed")))
    } else {
        Ok(())
    }
}

/// Gradient checks for every differentiable op and the full model.
pub fn cmd_gradcheck(seeds: usize) -> Result<(), CliError> {
    report(&suites::gradient_suites(seeds))
}

/// Oracle equivalences: FFT vs direct DFT, convolution theorem, scan vs
/// kernel, saturated-gate parity, and gate invariants.
pub fn cmd_oracle(cases: usize) -> Result<(), CliError> {
    report(&suites::oracle_suites(cases))
}

/// Fit a directly-parameterized kernel to the unrolled kernel of a random
/// stable (A, B, C, Δ) system and report the L2 error trajectory endpoints.
pub fn cmd_kernel_fit(
    state_dim: usize,
    seq_len: usize,
    steps: usize,
    lr: f64,
    seed: u64,
) -> Result<(), CliError> {
    let mut rng = SplitMix64::new(seed);
    let system = random_stable_system(state_dim.max(1), 0.3, 0.95, &mut rng);
    let d = discretize(&system)?;
    let target = unroll_kernel(&d, seq_len)?;

    let mut kernel = SpectralKernel::init("fit", 1, seq_len, 0.02, false, &mut rng)?;
    let initial = kernel_l2_error(&target, &kernel);
    let exact = {
        let mut copy = kernel.clone();
        assign_exact(&target, &mut copy)?
    };
    let fitted = fit_kernel(&target, &mut kernel, steps, lr)?;

    println!("target: unrolled kernel of random stable system (N={state_dim}, L={seq_len})");
    println!("assign_exact error: {exact:e}");
    println!("initial ||K_target - K_learn||_2: {initial:.6e}");
    println!("after {steps} gd steps (lr={lr}):  {fitted:.6e}");

    if exact != 0.0 {
        return Err(CliError::Suite(
            "assign_exact failed to reach zero error".into(),
        ));
    }
    Ok(())
}

/// Scaling benchmark: CSV records (stdout and optional file) plus fitted
/// log-log slopes on stderr.
pub fn cmd_bench(
    paths: &[BenchPath],
    lengths: &[usize],
    repeats: usize,
    out: Option<&Path>,
    seed: u64,
) -> Result<(), CliError> {
    if repeats < 5 {
        return Err(CliError::Config("repeats must be >= 5".into()));
    }
    let records = run_scaling(lengths, paths, repeats, seed);
    let csv = to_csv(&records);
    print!("{csv}");
    if let Some(path) = out {
        let mut f = std::fs::File::create(path)?;
        f.write_all(csv.as_bytes())?;
    }
    for path in paths {
        let subset: Vec<_> = records
            .iter()
            .filter(|r| r.path == *path)
            .cloned()
            .collect();
        if subset.len() >= 2 {
            eprintln!("slope {path}: {:.3}", fit_loglog_slope(&subset));
        }
    }
    Ok(())
}
