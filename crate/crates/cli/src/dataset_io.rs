//! On-disk dataset format.
//!
//! ```text
//! magic   7 bytes  "SASSDS1"
//! n       u32 LE   sample count
//! len     u32 LE   values per sample (L for signals, side² for images)
//! classes u32 LE
//! data    n·len f64 LE, sample-major
//! labels  n u32 LE
//! crc     u32 LE   CRC-32 of every preceding byte
//! ```

use std::io::{Read, Write};
use std::path::Path;

use sass_core::data::Dataset;

use crate::crc32::crc32;
use crate::error::CliError;

pub const MAGIC: &[u8; 7] = b"SASSDS1";

pub fn encode(ds: &Dataset) -> Vec<u8> {
    let mut buf = Vec::with_capacity(19 + ds.inputs.len() * 8 + ds.labels.len() * 4);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(ds.len() as u32).to_le_bytes());
    buf.extend_from_slice(&(ds.input_len as u32).to_le_bytes());
    buf.extend_from_slice(&ds.num_classes.to_le_bytes());
    for v in &ds.inputs {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    for l in &ds.labels {
        buf.extend_from_slice(&l.to_le_bytes());
    }
    let crc = crc32(&buf);
    buf.extend_from_slice(&crc.to_le_bytes());
    buf
}

pub fn decode(bytes: &[u8]) -> Result<Dataset, CliError> {
    let fail = |msg: &str| CliError::Format(format!("dataset: {msg}"));
    if bytes.len() < MAGIC.len() + 16 {
        return Err(fail("truncated header"));
    }
    if &bytes[..7] != MAGIC {
        return Err(fail("bad magic"));
    }
    let (body, crc_bytes) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(crc_bytes.try_into().unwrap());
    if crc32(body) != stored {
        return Err(fail("checksum mismatch"));
    }

    let mut at = 7usize;
    let read_u32 = |at: &mut usize| -> u32 {
        let v = u32::from_le_bytes(body[*at..*at + 4].try_into().unwrap());
        *at += 4;
        v
    };
    let n = read_u32(&mut at) as usize;
    let len = read_u32(&mut at) as usize;
    let classes = read_u32(&mut at);

    let need = at + n * len * 8 + n * 4;
    if body.len() != need {
        return Err(fail(&format!(
            "payload length {} does not match header (expected {need})",
            body.len()
        )));
    }

    let mut inputs = Vec::with_capacity(n * len);
    for _ in 0..n * len {
        inputs.push(f64::from_le_bytes(body[at..at + 8].try_into().unwrap()));
        at += 8;
    }
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let l = u32::from_le_bytes(body[at..at + 4].try_into().unwrap());
        at += 4;
        if l >= classes {
            return Err(fail(&format!("label {l} >= class count {classes}")));
        }
        labels.push(l);
    }

    Ok(Dataset {
        inputs,
        input_len: len,
        labels,
        num_classes: classes,
    })
}

pub fn write_file(path: &Path, ds: &Dataset) -> Result<(), CliError> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(&encode(ds))?;
    Ok(())
}

pub fn read_file(path: &Path) -> Result<Dataset, CliError> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use sass_core::data::{gen_freq_task, FreqTaskSpec};

    fn tiny_dataset() -> Dataset {
        gen_freq_task(&FreqTaskSpec {
            seq_len: 16,
            num_classes: 2,
            bands: vec![(2, 3), (5, 6)],
            noise_sigma: 0.1,
            samples_per_class: 3,
            amp_range: (0.5, 2.0),
            seed: 1,
        })
        .unwrap()
    }

    #[test]
    fn encode_decode_round_trip_is_exact() {
        let ds = tiny_dataset();
        let bytes = encode(&ds);
        let back = decode(&bytes).unwrap();
        assert_eq!(ds, back);
        // Byte-level: re-encoding reproduces the file exactly.
        assert_eq!(bytes, encode(&back));
    }

    #[test]
    fn truncated_file_is_a_format_error() {
        let bytes = encode(&tiny_dataset());
        for cut in [3usize, 12, bytes.len() - 5] {
            assert!(decode(&bytes[..cut]).is_err(), "cut at {cut} accepted");
        }
    }

    #[test]
    fn corrupted_payload_fails_checksum() {
        let mut bytes = encode(&tiny_dataset());
        let mid = bytes.len() / 2;
        bytes[mid] ^= 0x01;
        let err = decode(&bytes).unwrap_err();
        assert!(format!("{err}").contains("checksum"));
    }

    #[test]
    fn bad_magic_rejected() {
        let mut bytes = encode(&tiny_dataset());
        bytes[0] = b'X';
        assert!(decode(&bytes).is_err());
    }
}
