//! Scaling benchmark: does the spectral path really grow like L·log L?
//!
//! Three implementations of the same sequence operator are timed over a
//! doubling ladder of lengths and their log-log slopes compared:
//! `Spectral` (FFT → pointwise product → inverse FFT), `DirectConv` (the
//! O(L²) reference convolution), and `RecurrentScan` (the sequential
//! recurrence, O(L·N²)). Absolute times are machine noise; the acceptance
//! signal is slope separation, so each configuration reports the median of
//! repeated runs with warmup, and repeats widen automatically when a
//! measurement is too close to timer resolution.

use std::fmt;
use std::hint::black_box;
use std::str::FromStr;
use std::time::Instant;

use sass_core::numerics::{fft, ifft, pointwise_mul, ComplexVec};
use sass_core::rng::SplitMix64;
use sass_core::ssm::{
    circular_convolution, discretize, scan_recurrent, DiscreteSsm, KernelVec, StateSpaceParams,
};

use crate::error::CliError;

/// Which implementation a record timed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchPath {
    Spectral,
    DirectConv,
    RecurrentScan,
}

impl fmt::Display for BenchPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BenchPath::Spectral => "Spectral",
            BenchPath::DirectConv => "DirectConv",
            BenchPath::RecurrentScan => "RecurrentScan",
        };
        f.write_str(s)
    }
}

impl FromStr for BenchPath {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "spectral" => Ok(BenchPath::Spectral),
            "direct" | "directconv" => Ok(BenchPath::DirectConv),
            "scan" | "recurrentscan" => Ok(BenchPath::RecurrentScan),
            other => Err(format!(
                "unknown path '{other}' (expected spectral|direct|scan)"
            )),
        }
    }
}

/// One timed configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub path: BenchPath,
    pub l: usize,
    pub h: usize,
    pub repeats: usize,
    pub median_ns: u64,
    pub p10_ns: u64,
    pub p90_ns: u64,
}

/// Below this, a single measurement is considered too coarse and the repeat
/// count widens.
const MIN_MEDIAN_NS: u64 = 1_000;
const MAX_REPEATS: usize = 1 << 14;

/// State dimension used by the recurrent-scan path.
const SCAN_STATE_DIM: usize = 4;

fn percentile(sorted: &[u64], q: f64) -> u64 {
    let idx = (q * (sorted.len() - 1) as f64).round() as usize;
    sorted[idx]
}

fn time_once(op: &mut dyn FnMut()) -> u64 {
    let start = Instant::now();
    op();
    start.elapsed().as_nanos() as u64
}

fn measure(mut op: impl FnMut(), mut repeats: usize) -> (usize, u64, u64, u64) {
    // Warmup runs are discarded.
    op();
    op();
    loop {
        let mut samples: Vec<u64> = (0..repeats).map(|_| time_once(&mut op)).collect();
        samples.sort_unstable();
        let median = percentile(&samples, 0.5);
        if median >= MIN_MEDIAN_NS || repeats >= MAX_REPEATS {
            return (
                repeats,
                median,
                percentile(&samples, 0.1),
                percentile(&samples, 0.9),
            );
        }
        repeats = (repeats * 2).min(MAX_REPEATS);
    }
}

fn stable_scan_system(rng: &mut SplitMix64) -> DiscreteSsm {
    let n = SCAN_STATE_DIM;
    // A diagonally-shifted random matrix; the shift keeps it comfortably
    // stable without a search loop.
    let mut a = vec![0.0; n * n];
    for (i, v) in a.iter_mut().enumerate() {
        *v = 0.2 * rng.normal();
        if i % (n + 1) == 0 {
            *v -= 2.0;
        }
    }
    let b: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
    let c: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
    let params = StateSpaceParams::new(a, b, c, 0.3).expect("valid dims");
    discretize(&params).expect("well-conditioned by construction")
}

/// Time each requested path at each length. Inputs are deterministic per
/// seed; the timed regions are single-threaded.
pub fn run_scaling(
    lengths: &[usize],
    paths: &[BenchPath],
    repeats: usize,
    seed: u64,
) -> Vec<BenchRecord> {
    assert!(repeats >= 5, "repeats must be >= 5");
    let mut records = Vec::new();
    for &path in paths {
        for &l in lengths {
            let mut rng = SplitMix64::new(seed ^ (l as u64).wrapping_mul(0x9E37));
            let u: Vec<f64> = (0..l).map(|_| rng.uniform(-1.0, 1.0)).collect();

            let (reps, median, p10, p90) = match path {
                BenchPath::Spectral => {
                    let kernel = ComplexVec::new(
                        (0..l).map(|_| rng.uniform(-1.0, 1.0)).collect(),
                        (0..l).map(|_| rng.uniform(-1.0, 1.0)).collect(),
                    )
                    .unwrap();
                    let signal = ComplexVec::from_real(&u);
                    measure(
                        || {
                            let u_hat = fft(black_box(&signal)).unwrap();
                            let k_hat = fft(black_box(&kernel)).unwrap();
                            let prod = pointwise_mul(&u_hat, &k_hat).unwrap();
                            black_box(ifft(&prod).unwrap());
                        },
                        repeats,
                    )
                }
                BenchPath::DirectConv => {
                    let kernel = KernelVec {
                        values: (0..l).map(|_| rng.uniform(-1.0, 1.0)).collect(),
                    };
                    measure(
                        || {
                            black_box(
                                circular_convolution(black_box(&kernel), black_box(&u)).unwrap(),
                            );
                        },
                        repeats,
                    )
                }
                BenchPath::RecurrentScan => {
                    let system = stable_scan_system(&mut rng);
                    measure(
                        || {
                            black_box(scan_recurrent(black_box(&system), black_box(&u)));
                        },
                        repeats,
                    )
                }
            };

            records.push(BenchRecord {
                path,
                l,
                h: 1,
                repeats: reps,
                median_ns: median,
                p10_ns: p10,
                p90_ns: p90,
            });
        }
    }
    records
}

/// Ordinary least squares on (ln L, ln median_ns) over the given records.
pub fn fit_loglog_slope(records: &[BenchRecord]) -> f64 {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .map(|r| ((r.l as f64).ln(), (r.median_ns.max(1) as f64).ln()))
        .collect();
    let n = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in &pts {
        num += (x - mean_x) * (y - mean_y);
        den += (x - mean_x) * (x - mean_x);
    }
    num / den
}

pub const CSV_HEADER: &str = "path,L,H,repeats,median_ns,p10_ns,p90_ns";

pub fn to_csv(records: &[BenchRecord]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in records {
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.path, r.l, r.h, r.repeats, r.median_ns, r.p10_ns, r.p90_ns
        ));
    }
    s
}

pub fn from_csv(text: &str) -> Result<Vec<BenchRecord>, CliError> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Format("bench csv: empty".into()))?;
    if header != CSV_HEADER {
        return Err(CliError::Format(format!(
            "bench csv: bad header '{header}'"
        )));
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(CliError::Format(format!(
                "bench csv line {}: expected 7 fields",
                i + 2
            )));
        }
        let parse_u = |s: &str| -> Result<u64, CliError> {
            s.parse()
                .map_err(|e| CliError::Format(format!("bench csv line {}: {e}", i + 2)))
        };
        records.push(BenchRecord {
            path: fields[0]
                .parse()
                .map_err(|e: String| CliError::Format(format!("bench csv line {}: {e}", i + 2)))?,
            l: parse_u(fields[1])? as usize,
            h: parse_u(fields[2])? as usize,
            repeats: parse_u(fields[3])? as usize,
            median_ns: parse_u(fields[4])?,
            p10_ns: parse_u(fields[5])?,
            p90_ns: parse_u(fields[6])?,
        });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(path: BenchPath, f: impl Fn(usize) -> u64) -> Vec<BenchRecord> {
        [256usize, 512, 1024, 2048, 4096]
            .iter()
            .map(|&l| BenchRecord {
                path,
                l,
                h: 1,
                repeats: 9,
                median_ns: f(l),
                p10_ns: f(l) - 1,
                p90_ns: f(l) + 1,
            })
            .collect()
    }

    #[test]
    fn slope_of_exact_quadratic_is_two() {
        let recs = synthetic(BenchPath::DirectConv, |l| (l * l) as u64);
        assert!((fit_loglog_slope(&recs) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn slope_of_exact_linear_is_one() {
        let recs = synthetic(BenchPath::RecurrentScan, |l| (1000 * l) as u64);
        assert!((fit_loglog_slope(&recs) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn empty_lengths_give_empty_records() {
        let recs = run_scaling(&[], &[BenchPath::Spectral], 5, 1);
        assert!(recs.is_empty());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let recs = synthetic(BenchPath::Spectral, |l| (l as u64) * 17 + 3);
        let csv = to_csv(&recs);
        let back = from_csv(&csv).unwrap();
        assert_eq!(recs, back);
        assert_eq!(csv, to_csv(&back));
    }

    #[test]
    fn csv_rejects_bad_header_and_fields() {
        assert!(from_csv("nope\n1,2,3").is_err());
        let bad = format!("{CSV_HEADER}\nSpectral,16,1,9,abc,1,2\n");
        assert!(from_csv(&bad).is_err());
    }

    #[test]
    fn repeats_widen_when_ops_are_faster_than_the_floor() {
        // A no-op's median sits far below MIN_MEDIAN_NS no matter the load,
        // so the repeat count must grow beyond the requested 5.
        let (repeats, median, p10, p90) = measure(|| {}, 5);
        assert!(repeats > 5, "expected widened repeats, got {repeats}");
        assert!(p10 <= median && median <= p90);
    }

    #[test]
    fn records_have_consistent_quantiles() {
        let recs = run_scaling(&[64, 128], &[BenchPath::Spectral], 5, 7);
        for r in &recs {
            assert!(r.repeats >= 5);
            assert!(r.p10_ns <= r.median_ns && r.median_ns <= r.p90_ns);
        }
    }

    #[test]
    fn measured_slopes_separate_on_a_small_ladder() {
        // Tiny ladder so the unit test stays fast; the acceptance suite runs
        // the full one.
        let lengths = [256usize, 512, 1024, 2048];
        let spec = run_scaling(&lengths, &[BenchPath::Spectral], 7, 3);
        let direct = run_scaling(&lengths, &[BenchPath::DirectConv], 7, 3);
        let s_spec = fit_loglog_slope(&spec);
        let s_direct = fit_loglog_slope(&direct);
        assert!(
            s_direct > s_spec,
            "direct {s_direct:.2} should exceed spectral {s_spec:.2}"
        );
    }
}
