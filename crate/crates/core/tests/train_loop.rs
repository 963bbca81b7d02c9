//! End-to-end training-loop behavior: determinism, learning on the easy
//! frequency task, and split hygiene.

use sass_core::data::{gen_freq_task, FreqTaskSpec};
use sass_core::model::ModelConfig;
use sass_core::train::{stratified_split, TrainSettings, Trainer};

fn easy_spec(seed: u64) -> FreqTaskSpec {
    FreqTaskSpec {
        seq_len: 64,
        num_classes: 3,
        bands: vec![(3, 5), (11, 13), (19, 21)],
        noise_sigma: 0.1,
        samples_per_class: 40,
        amp_range: (1.0, 1.0),
        seed,
    }
}

fn settings(seed: u64, epochs: usize) -> TrainSettings {
    TrainSettings {
        epochs,
        seed,
        ..TrainSettings::default()
    }
}

#[test]
fn training_learns_easy_task_quickly() {
    let data = gen_freq_task(&easy_spec(3)).unwrap();
    let cfg = ModelConfig::desk_signal(64, 3);
    let mut trainer = Trainer::new(cfg, data, &settings(3, 8)).unwrap();
    let mut best = 0.0f64;
    for _ in 0..8 {
        best = best.max(trainer.run_epoch().unwrap().holdout_acc);
    }
    assert!(best >= 0.9, "holdout accuracy only {best}");
}

#[test]
fn identical_seeds_give_bit_identical_trajectories() {
    let run = || {
        let data = gen_freq_task(&easy_spec(7)).unwrap();
        let cfg = ModelConfig::desk_signal(64, 3);
        let mut trainer = Trainer::new(cfg, data, &settings(9, 3)).unwrap();
        let mut bits = Vec::new();
        for _ in 0..3 {
            let m = trainer.run_epoch().unwrap();
            bits.push(m.train_loss.to_bits());
            bits.push(m.holdout_loss.to_bits());
            bits.push(m.train_acc.to_bits());
            bits.push(m.holdout_acc.to_bits());
        }
        bits
    };
    assert_eq!(run(), run());
}

#[test]
fn different_seeds_diverge() {
    let run = |seed| {
        let data = gen_freq_task(&easy_spec(7)).unwrap();
        let cfg = ModelConfig::desk_signal(64, 3);
        let mut trainer = Trainer::new(cfg, data, &settings(seed, 1)).unwrap();
        trainer.run_epoch().unwrap().train_loss
    };
    assert_ne!(run(1).to_bits(), run(2).to_bits());
}

#[test]
fn stratified_split_is_balanced_and_disjoint() {
    let data = gen_freq_task(&easy_spec(11)).unwrap();
    let (train, holdout) = stratified_split(&data, 0.2);
    assert_eq!(train.len() + holdout.len(), data.len());
    for class in 0..3u32 {
        let in_hold = holdout.iter().filter(|&&i| data.labels[i] == class).count();
        assert_eq!(in_hold, 8); // 20% of 40
    }
    let mut all: Vec<usize> = train.iter().chain(holdout.iter()).copied().collect();
    all.sort_unstable();
    all.dedup();
    assert_eq!(all.len(), data.len());
}

#[test]
fn trainer_rejects_mismatched_dataset() {
    let data = gen_freq_task(&easy_spec(13)).unwrap();
    let cfg = ModelConfig::desk_signal(32, 3); // wrong length
    assert!(Trainer::new(cfg, data, &settings(1, 1)).is_err());

    let data = gen_freq_task(&easy_spec(13)).unwrap();
    let cfg = ModelConfig::desk_signal(64, 5); // wrong class count
    assert!(Trainer::new(cfg, data, &settings(1, 1)).is_err());
}
