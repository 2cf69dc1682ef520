//! Rate-distortion benchmark: seeded trials over a set of rates, per-trial
//! records, per-rate summaries against the Shannon bound, CSV output.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::code::{decode, distortion, generate_code, DegreeDistribution};
use crate::decimate::{encode, DecimationPolicy};
use crate::error::{Error, Result};
use crate::mp::MpParams;
use crate::mrf::Weights;

pub const TRIALS_HEADER: &str =
    "rate,n,seed,trial,distortion,rounds,total_iters,converged_fraction,wall_time,failed";
pub const SUMMARY_HEADER: &str = "rate,mean_distortion,shannon_distortion,trials_ok,trials_failed";

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// The distortion `D` in `(0, 1/2)` with `1 - H(D) = rate`.
pub fn shannon_distortion(rate: f64) -> Result<f64> {
    if !(rate > 0.0 && rate < 1.0) {
        return Err(Error::InvalidArgument(format!("rate {rate} is outside (0, 1)")));
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        // 1 - H(D) decreases on (0, 1/2)
        if 1.0 - binary_entropy(mid) > rate {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Distortion of storing `m = rate * n` source bits verbatim and guessing
/// the rest.
pub fn trivial_distortion(rate: f64) -> f64 {
    0.5 * (1.0 - rate)
}

/// Mean check degree targeted by [`default_distribution`].
pub const DEFAULT_CHECK_MEAN: f64 = 2.5;

/// Built-in degree distribution for a rate: information degrees are the two
/// integers around `DEFAULT_CHECK_MEAN / rate` (at least 2), check degrees
/// the two integers around the mean implied by the edge count
/// `m * mean_info = n * mean_check`.
pub fn default_distribution(rate: f64) -> Result<DegreeDistribution> {
    if !(rate > 0.0 && rate < 1.0) {
        return Err(Error::InvalidArgument(format!("rate {rate} is outside (0, 1)")));
    }
    let mean_info = (DEFAULT_CHECK_MEAN / rate).max(2.0);
    DegreeDistribution::new(adjacent_pair(mean_info), adjacent_pair(rate * mean_info))
}

/// Fractions on `floor(mean)` and `floor(mean) + 1` with the given mean.
fn adjacent_pair(mean: f64) -> Vec<(usize, f64)> {
    let lo = mean.floor().max(1.0);
    let frac_hi = (mean - lo).clamp(0.0, 1.0);
    let lo = lo as usize;
    if frac_hi < 1e-9 {
        vec![(lo, 1.0)]
    } else {
        vec![(lo, 1.0 - frac_hi), (lo + 1, frac_hi)]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub rates: Vec<f64>,
    pub n: usize,
    pub trials: usize,
    /// `None` uses [`default_distribution`] for each rate.
    pub dist: Option<DegreeDistribution>,
    pub w_sou: f64,
    pub w_info: f64,
    /// `None` interpolates per rate.
    pub gamma: Option<f64>,
    pub mp: MpParams,
    pub policy: DecimationPolicy,
    pub seed: u64,
    /// Record wall-clock seconds per trial; off keeps CSVs reproducible.
    pub timing: bool,
    /// Worker threads; 0 uses the available parallelism.
    pub threads: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            rates: vec![0.3, 0.5, 0.7, 0.9],
            n: 10_000,
            trials: 15,
            dist: None,
            w_sou: Weights::DEFAULT_W_SOU,
            w_info: Weights::DEFAULT_W_INFO,
            gamma: None,
            mp: MpParams::default(),
            policy: DecimationPolicy::default(),
            seed: 0,
            timing: false,
            threads: 0,
        }
    }
}

impl BenchConfig {
    pub fn weights(&self, rate: f64) -> Result<Weights> {
        let base = Weights::for_rate(rate);
        Weights::new(self.w_sou, self.w_info, self.gamma.unwrap_or(base.gamma))
    }

    pub fn validate(&self) -> Result<()> {
        if self.rates.is_empty() {
            return Err(Error::InvalidArgument("no rates given".into()));
        }
        for &r in &self.rates {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::InvalidArgument(format!("rate {r} is outside (0, 1)")));
            }
        }
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be positive".into()));
        }
        self.mp.validate()?;
        self.policy.validate()?;
        self.weights(self.rates[0]).map(|_| ())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub rate: f64,
    pub n: usize,
    pub seed: u64,
    pub trial: usize,
    /// `None` when the encoder hit a contradiction.
    pub distortion: Option<f64>,
    pub rounds: usize,
    pub total_iters: usize,
    pub converged_fraction: f64,
    pub wall_time: f64,
}

impl TrialRecord {
    pub fn failed(&self) -> bool {
        self.distortion.is_none()
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.rate,
            self.n,
            self.seed,
            self.trial,
            self.distortion.map(|d| d.to_string()).unwrap_or_default(),
            self.rounds,
            self.total_iters,
            self.converged_fraction,
            self.wall_time,
            u8::from(self.failed())
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateSummary {
    pub rate: f64,
    /// Mean over successful trials; NaN if none succeeded.
    pub mean_distortion: f64,
    pub min_distortion: f64,
    pub max_distortion: f64,
    pub shannon_distortion: f64,
    pub trials_ok: usize,
    pub trials_failed: usize,
}

impl RateSummary {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.rate, self.mean_distortion, self.shannon_distortion, self.trials_ok, self.trials_failed
        )
    }
}

/// Mixes a master seed with a label into an independent seed.
pub fn split_seed(master: u64, label: &[u64]) -> u64 {
    let mut h = master ^ 0x6A09_E667_F3BC_C909;
    for &v in label {
        h = (h ^ v).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        h ^= h >> 31;
        h = h.wrapping_mul(0xBF58_476D_1CE4_E5B9);
        h ^= h >> 29;
    }
    h
}

pub fn random_source(n: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| u8::from(rng.random_bool(0.5))).collect()
}

/// Runs one trial; code errors are returned, encoder contradictions become
/// a failed record.
pub fn run_trial(cfg: &BenchConfig, rate_index: usize, trial: usize) -> Result<TrialRecord> {
    let rate = cfg.rates[rate_index];
    let seed = split_seed(cfg.seed, &[rate_index as u64, trial as u64]);
    let dist = match &cfg.dist {
        Some(d) => d.clone(),
        None => default_distribution(rate)?,
    };
    let w = cfg.weights(rate)?;
    let start = Instant::now();
    let code = generate_code(cfg.n, rate, &dist, split_seed(seed, &[0]))?;
    let y = random_source(cfg.n, split_seed(seed, &[1]));
    let mut record = TrialRecord {
        rate,
        n: cfg.n,
        seed,
        trial,
        distortion: None,
        rounds: 0,
        total_iters: 0,
        converged_fraction: 0.0,
        wall_time: 0.0,
    };
    match encode(&code, &y, &w, &cfg.mp, &cfg.policy, split_seed(seed, &[2])) {
        Ok((x, stats)) => {
            record.distortion = Some(distortion(&y, &decode(&code, &x)?)?);
            record.rounds = stats.rounds;
            record.total_iters = stats.total_iterations;
            record.converged_fraction = stats.converged_fraction();
        }
        Err(e) if e.is_contradiction() => {}
        Err(e) => return Err(e),
    }
    if cfg.timing {
        record.wall_time = start.elapsed().as_secs_f64();
    }
    Ok(record)
}

/// All `(rate, trial)` records in rate-major order.
pub fn run_rd_sweep(cfg: &BenchConfig) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    let jobs: Vec<(usize, usize)> = (0..cfg.rates.len())
        .flat_map(|r| (0..cfg.trials).map(move |t| (r, t)))
        .collect();
    let threads = match cfg.threads {
        0 => std::thread::available_parallelism().map_or(1, |p| p.get()),
        t => t,
    }
    .min(jobs.len());
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<TrialRecord>>>> = Mutex::new(jobs.iter().map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..threads {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(r, t)) = jobs.get(k) else { break };
                let out = run_trial(cfg, r, t);
                slots.lock().unwrap()[k] = Some(out);
            });
        }
    });
    slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|slot| slot.expect("every job ran"))
        .collect()
}

/// Per-rate aggregates in first-appearance order of the rates.
pub fn summarize(records: &[TrialRecord]) -> Result<Vec<RateSummary>> {
    let mut rates: Vec<f64> = Vec::new();
    for r in records {
        if !rates.contains(&r.rate) {
            rates.push(r.rate);
        }
    }
    rates
        .into_iter()
        .map(|rate| {
            let ok: Vec<f64> = records
                .iter()
                .filter(|r| r.rate == rate)
                .filter_map(|r| r.distortion)
                .collect();
            let failed = records.iter().filter(|r| r.rate == rate && r.failed()).count();
            let mean = if ok.is_empty() {
                f64::NAN
            } else {
                ok.iter().sum::<f64>() / ok.len() as f64
            };
            Ok(RateSummary {
                rate,
                mean_distortion: mean,
                min_distortion: ok.iter().copied().fold(f64::NAN, f64::min),
                max_distortion: ok.iter().copied().fold(f64::NAN, f64::max),
                shannon_distortion: shannon_distortion(rate)?,
                trials_ok: ok.len(),
                trials_failed: failed,
            })
        })
        .collect()
}

pub fn trials_csv(records: &[TrialRecord]) -> String {
    let mut out = String::from(TRIALS_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

pub fn summary_csv(summaries: &[RateSummary]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for s in summaries {
        out.push_str(&s.csv_row());
        out.push('\n');
    }
    out
}
