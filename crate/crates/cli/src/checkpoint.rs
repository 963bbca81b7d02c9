//! On-disk checkpoint format.
//!
//! ```text
//! magic     8 bytes  "SASSCKPT"
//! version   u32 LE   (currently 1)
//! cfg_len   u32 LE   length of the embedded canonical config text
//! cfg       cfg_len bytes UTF-8
//! rng       u64 LE state word, u8 spare flag, f64 LE spare normal
//! n_params  u32 LE
//! per parameter (model visit order):
//!   name_len u32 LE, name UTF-8, count u32 LE, count f64 LE values
//! opt_step  u64 LE
//! n_moments u32 LE   (0 if the optimizer never stepped, else n_params)
//! per moment pair:   count f64 LE first moments, count f64 LE second moments
//! crc       u32 LE   CRC-32 of every preceding byte
//! ```
//!
//! Serialization order equals the model's parameter visit order, so
//! write → read → write reproduces the file byte for byte.

use std::io::{Read, Write};
use std::path::Path;

use sass_core::autodiff::{MomentPair, OptimState, ParamSet};
use sass_core::model::Network;
use sass_core::rng::SplitMix64;

use crate::config::TrainConfig;
use crate::crc32::crc32;
use crate::error::CliError;

pub const MAGIC: &[u8; 8] = b"SASSCKPT";
pub const VERSION: u32 = 1;

pub struct Checkpoint {
    pub config: TrainConfig,
    pub net: Network,
    pub opt: OptimState,
    pub rng: SplitMix64,
}

pub fn encode(
    config: &TrainConfig,
    net: &mut Network,
    opt: &OptimState,
    rng: &SplitMix64,
) -> Vec<u8> {
    let mut buf = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());

    let cfg_text = config.to_canonical_text();
    buf.extend_from_slice(&(cfg_text.len() as u32).to_le_bytes());
    buf.extend_from_slice(cfg_text.as_bytes());

    let (state, spare) = rng.state();
    buf.extend_from_slice(&state.to_le_bytes());
    buf.push(spare.is_some() as u8);
    buf.extend_from_slice(&spare.unwrap_or(0.0).to_le_bytes());

    let mut blobs: Vec<(String, Vec<f64>)> = Vec::new();
    net.visit_params(&mut |p| blobs.push((p.name.clone(), p.data.clone())));
    buf.extend_from_slice(&(blobs.len() as u32).to_le_bytes());
    for (name, data) in &blobs {
        buf.extend_from_slice(&(name.len() as u32).to_le_bytes());
        buf.extend_from_slice(name.as_bytes());
        buf.extend_from_slice(&(data.len() as u32).to_le_bytes());
        for v in data {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }

    buf.extend_from_slice(&opt.step.to_le_bytes());
    buf.extend_from_slice(&(opt.moments.len() as u32).to_le_bytes());
    for pair in &opt.moments {
        for v in &pair.m {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        for v in &pair.v {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }

    let crc = crc32(&buf);
    buf.extend_from_slice(&crc.to_le_bytes());
    buf
}

pub fn decode(bytes: &[u8]) -> Result<Checkpoint, CliError> {
    let fail = |msg: String| CliError::Format(format!("checkpoint: {msg}"));
    if bytes.len() < MAGIC.len() + 8 {
        return Err(fail("truncated header".into()));
    }
    if &bytes[..8] != MAGIC {
        return Err(fail("bad magic".into()));
    }
    let (body, crc_bytes) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(crc_bytes.try_into().unwrap());
    if crc32(body) != stored {
        return Err(fail("checksum mismatch".into()));
    }

    let mut at = 8usize;
    let take = |at: &mut usize, n: usize| -> Result<&[u8], CliError> {
        if *at + n > body.len() {
            return Err(CliError::Format("checkpoint: truncated body".into()));
        }
        let s = &body[*at..*at + n];
        *at += n;
        Ok(s)
    };
    let read_u32 = |at: &mut usize| -> Result<u32, CliError> {
        Ok(u32::from_le_bytes(take(at, 4)?.try_into().unwrap()))
    };
    let read_u64 = |at: &mut usize| -> Result<u64, CliError> {
        Ok(u64::from_le_bytes(take(at, 8)?.try_into().unwrap()))
    };
    let read_f64 = |at: &mut usize| -> Result<f64, CliError> {
        Ok(f64::from_le_bytes(take(at, 8)?.try_into().unwrap()))
    };

    let version = read_u32(&mut at)?;
    if version != VERSION {
        return Err(fail(format!("unsupported version {version}")));
    }

    let cfg_len = read_u32(&mut at)? as usize;
    let cfg_text = std::str::from_utf8(take(&mut at, cfg_len)?)
        .map_err(|e| fail(format!("config text not UTF-8: {e}")))?
        .to_string();
    let config =
        TrainConfig::parse(&cfg_text).map_err(|e| fail(format!("embedded config: {e}")))?;

    let rng_state = read_u64(&mut at)?;
    let has_spare = take(&mut at, 1)?[0] != 0;
    let spare = read_f64(&mut at)?;
    let rng = SplitMix64::from_state(rng_state, has_spare.then_some(spare));

    // The init values are irrelevant: every parameter is overwritten below.
    let mut init_rng = SplitMix64::new(0);
    let mut net = Network::init(config.model_config(), &mut init_rng)
        .map_err(|e| fail(format!("rebuilding model: {e}")))?;

    let n_params = read_u32(&mut at)? as usize;
    let mut blobs: Vec<(String, Vec<f64>)> = Vec::with_capacity(n_params);
    for _ in 0..n_params {
        let name_len = read_u32(&mut at)? as usize;
        let name = std::str::from_utf8(take(&mut at, name_len)?)
            .map_err(|e| fail(format!("parameter name not UTF-8: {e}")))?
            .to_string();
        let count = read_u32(&mut at)? as usize;
        let mut data = Vec::with_capacity(count);
        for _ in 0..count {
            data.push(read_f64(&mut at)?);
        }
        blobs.push((name, data));
    }

    let mut idx = 0usize;
    let mut mismatch: Option<String> = None;
    net.visit_params(&mut |p| {
        if mismatch.is_some() {
            return;
        }
        match blobs.get(idx) {
            Some((name, data)) if *name == p.name && data.len() == p.len() => {
                p.data.copy_from_slice(data);
            }
            Some((name, _)) => {
                mismatch = Some(format!(
                    "parameter {idx}: expected '{}', found '{name}'",
                    p.name
                ))
            }
            None => mismatch = Some(format!("missing parameter blob for '{}'", p.name)),
        }
        idx += 1;
    });
    if let Some(m) = mismatch {
        return Err(fail(m));
    }
    if idx != blobs.len() {
        return Err(fail(format!(
            "checkpoint has {} parameter blobs, model expects {idx}",
            blobs.len()
        )));
    }

    let step = read_u64(&mut at)?;
    let n_moments = read_u32(&mut at)? as usize;
    if n_moments != 0 && n_moments != n_params {
        return Err(fail(format!(
            "moment count {n_moments} matches neither 0 nor {n_params}"
        )));
    }
    // Schedule endpoints are not stored; a restored optimizer is only used
    // for inspection, not for resuming the cosine schedule.
    let settings = config.train_settings();
    let mut opt = OptimState::new(settings.lr, settings.weight_decay, 0, 0);
    opt.beta1 = settings.beta1;
    opt.beta2 = settings.beta2;
    opt.grad_clip = settings.grad_clip;
    opt.step = step;
    for i in 0..n_moments {
        let count = blobs[i].1.len();
        let mut m = Vec::with_capacity(count);
        for _ in 0..count {
            m.push(read_f64(&mut at)?);
        }
        let mut v = Vec::with_capacity(count);
        for _ in 0..count {
            v.push(read_f64(&mut at)?);
        }
        opt.moments.push(MomentPair {
            name: blobs[i].0.clone(),
            m,
            v,
        });
    }
    if at != body.len() {
        return Err(fail(format!(
            "{} trailing bytes after optimizer state",
            body.len() - at
        )));
    }

    Ok(Checkpoint {
        config,
        net,
        opt,
        rng,
    })
}

pub fn write_file(
    path: &Path,
    config: &TrainConfig,
    net: &mut Network,
    opt: &OptimState,
    rng: &SplitMix64,
) -> Result<(), CliError> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(&encode(config, net, opt, rng))?;
    Ok(())
}

pub fn read_file(path: &Path) -> Result<Checkpoint, CliError> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use sass_core::autodiff::adamw_step;

    fn tiny_trained() -> (TrainConfig, Network, OptimState, SplitMix64) {
        let mut config = TrainConfig::default();
        config.seq_len = 8;
        config.embed_dim = 4;
        config.state_dim = 3;
        config.gate_dim = 3;
        config.samples_per_class = 2;
        config.bands = vec![(1, 1), (2, 2), (3, 3)];
        let mut rng = SplitMix64::new(5);
        let mut net = Network::init(config.model_config(), &mut rng).unwrap();
        let mut opt = OptimState::new(1e-3, 0.05, 2, 10);
        // One fake step so the moments are nontrivial.
        net.visit_params(&mut |p| p.grad.fill(0.01));
        adamw_step(&mut net, &mut opt).unwrap();
        (config, net, opt, rng)
    }

    #[test]
    fn write_read_write_is_byte_identical() {
        let (config, mut net, opt, rng) = tiny_trained();
        let bytes = encode(&config, &mut net, &opt, &rng);
        let mut ckpt = decode(&bytes).unwrap();
        let again = encode(&ckpt.config, &mut ckpt.net, &ckpt.opt, &ckpt.rng);
        assert_eq!(bytes, again);
    }

    #[test]
    fn restored_model_reproduces_outputs() {
        let (config, mut net, opt, rng) = tiny_trained();
        let signal: Vec<f64> = (0..8).map(|i| (i as f64 * 0.7).sin()).collect();
        let (logits, _) = net.forward(&signal).unwrap();

        let bytes = encode(&config, &mut net, &opt, &rng);
        let ckpt = decode(&bytes).unwrap();
        let (restored, _) = ckpt.net.forward(&signal).unwrap();
        for (a, b) in logits.iter().zip(&restored) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(ckpt.opt.step, opt.step);
    }

    #[test]
    fn corruption_and_version_checks() {
        let (config, mut net, opt, rng) = tiny_trained();
        let bytes = encode(&config, &mut net, &opt, &rng);

        let mut flipped = bytes.clone();
        let mid = flipped.len() / 2;
        flipped[mid] ^= 0x10;
        assert!(decode(&flipped).is_err());

        let mut bad_version = bytes.clone();
        bad_version[8] = 9;
        assert!(decode(&bad_version).is_err());

        assert!(decode(&bytes[..40]).is_err());
    }
}
