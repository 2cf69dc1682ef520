//! Pseudomarginals, bias-ranked bit fixing, and the outer encode loop.

use serde::{Deserialize, Serialize};

use crate::code::{decode, distortion, LdgmCode, ReducedCode};
use crate::error::{Contradiction, Error, Result};
use crate::mp::{self, MessageState, Message5, MpParams};
use crate::mrf::Weights;

/// Belief of an information bit over `{0, 1, *}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pseudomarginal {
    pub mu0: f64,
    pub mu1: f64,
    pub mu_star: f64,
}

impl Pseudomarginal {
    /// Normalizes a nonnegative triple; `None` if it is all zero.
    pub fn from_weights(mu0: f64, mu1: f64, mu_star: f64) -> Option<Self> {
        let total = mu0 + mu1 + mu_star;
        (total > 0.0 && total.is_finite()).then(|| Pseudomarginal {
            mu0: mu0 / total,
            mu1: mu1 / total,
            mu_star: mu_star / total,
        })
    }

    pub fn bias(&self) -> f64 {
        (self.mu1 - self.mu0).abs()
    }

    /// The more likely concrete value, 0 on ties.
    pub fn preferred(&self) -> u8 {
        u8::from(self.mu1 > self.mu0)
    }

    pub fn sum(&self) -> f64 {
        self.mu0 + self.mu1 + self.mu_star
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CleanupRule {
    /// Bits still free at the end become 0.
    ZeroFill,
    /// Bits still free at the end take the argmax of their last
    /// pseudomarginal over `{0, 1}`, 0 on ties.
    ArgmaxMu,
}

impl std::str::FromStr for CleanupRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero_fill" | "zero-fill" => Ok(CleanupRule::ZeroFill),
            "argmax_mu" | "argmax-mu" => Ok(CleanupRule::ArgmaxMu),
            _ => Err(Error::InvalidArgument(format!("unknown cleanup rule {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecimationPolicy {
    /// Bits with bias at least this are candidates for fixing.
    pub bias_threshold: f64,
    /// Per-round cap as a fraction of the number of information bits.
    pub max_fix_fraction: f64,
    /// Bits fixed when no candidate clears the threshold.
    pub min_fix_count: usize,
    pub cleanup_rule: CleanupRule,
    /// Keep surviving messages between rounds instead of reinitializing.
    pub warm_start: bool,
    /// Stop decimating once every remaining bias is below this value and
    /// hand the remaining bits to the cleanup rule.
    pub stop_bias: Option<f64>,
}

impl Default for DecimationPolicy {
    fn default() -> Self {
        DecimationPolicy {
            bias_threshold: 0.05,
            max_fix_fraction: 0.02,
            min_fix_count: 1,
            cleanup_rule: CleanupRule::ArgmaxMu,
            warm_start: true,
            stop_bias: None,
        }
    }
}

impl DecimationPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.bias_threshold > 0.0 && self.bias_threshold <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "bias threshold {} is outside (0, 1]",
                self.bias_threshold
            )));
        }
        if !(self.max_fix_fraction > 0.0 && self.max_fix_fraction <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "max fix fraction {} is outside (0, 1]",
                self.max_fix_fraction
            )));
        }
        if self.min_fix_count == 0 {
            return Err(Error::InvalidArgument("min fix count must be positive".into()));
        }
        if let Some(b) = self.stop_bias {
            if !(0.0..=1.0).contains(&b) {
                return Err(Error::InvalidArgument(format!("stop bias {b} is outside [0, 1]")));
            }
        }
        Ok(())
    }

    /// Most bits fixed in one round on a code with `m` information bits.
    pub fn round_cap(&self, m: usize) -> usize {
        ((self.max_fix_fraction * m as f64 - 1e-9).ceil() as usize).max(1)
    }
}

/// Pseudomarginals of the active bits, in increasing bit order.
pub fn pseudomarginals(
    rc: &ReducedCode<'_>,
    state: &MessageState,
    w: &Weights,
) -> std::result::Result<Vec<(usize, Pseudomarginal)>, Contradiction> {
    let code = rc.base();
    rc.active_bits()
        .map(|i| {
            let incoming = code.bit_edges(i).iter().map(|&e| &state.check_to_bit[e]);
            let [mu0, mu1, mu_star] = mp::bit_belief(incoming, w.w_info);
            Pseudomarginal::from_weights(mu0, mu1, mu_star)
                .map(|pm| (i, pm))
                .ok_or(Contradiction::Marginal { bit: i })
        })
        .collect()
}

/// Orders by descending bias, then ascending bit index.
fn by_bias(a: &(usize, Pseudomarginal), b: &(usize, Pseudomarginal)) -> std::cmp::Ordering {
    b.1.bias().total_cmp(&a.1.bias()).then(a.0.cmp(&b.0))
}

/// Fixes the highest-bias candidates to their preferred values and returns
/// the fixed `(bit, value)` pairs in ranking order.
pub fn select_and_fix(
    rc: &mut ReducedCode<'_>,
    marginals: &[(usize, Pseudomarginal)],
    policy: &DecimationPolicy,
) -> Result<Vec<(usize, u8)>> {
    if marginals.is_empty() {
        return Err(Error::InvalidArgument("no active bits to fix".into()));
    }
    let mut ranked = marginals.to_vec();
    ranked.sort_by(by_bias);
    let above = ranked
        .iter()
        .take_while(|(_, pm)| pm.bias() >= policy.bias_threshold)
        .count();
    let take = if above > 0 {
        above.min(policy.round_cap(rc.base().m()))
    } else {
        policy.min_fix_count.min(ranked.len())
    };
    let mut fixed = Vec::with_capacity(take);
    for &(i, pm) in &ranked[..take] {
        let v = pm.preferred();
        rc.fix_bit(i, v)?;
        fixed.push((i, v));
    }
    Ok(fixed)
}

/// Drops messages on edges of fixed bits and renormalizes the rest.
pub fn warm_start_messages(state: &MessageState, rc: &ReducedCode<'_>) -> MessageState {
    let code = rc.base();
    let mut next = state.clone();
    for e in 0..code.num_edges() {
        if rc.is_active(code.edge_bit(e)) {
            for slot in [&mut next.bit_to_check[e], &mut next.check_to_bit[e]] {
                *slot = slot.normalized().unwrap_or(Message5::UNIFORM);
            }
        } else {
            next.bit_to_check[e] = Message5::ZERO;
            next.check_to_bit[e] = Message5::ZERO;
        }
    }
    next.residual = f64::INFINITY;
    next
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodeStats {
    pub rounds: usize,
    pub iterations_per_round: Vec<usize>,
    pub converged: Vec<bool>,
    pub fixed_per_round: Vec<usize>,
    pub total_iterations: usize,
    /// Bits left free when decimation stopped and set by the cleanup rule.
    pub residual_free: usize,
    pub distortion: f64,
}

impl EncodeStats {
    pub fn converged_fraction(&self) -> f64 {
        if self.converged.is_empty() {
            return 1.0;
        }
        self.converged.iter().filter(|&&c| c).count() as f64 / self.converged.len() as f64
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("stats serialize")
    }
}

/// Hooks into the encode loop.
pub trait EncodeObserver {
    fn on_sweep(&mut self, _round: usize, _rc: &ReducedCode<'_>, _state: &MessageState) {}
    fn on_marginals(&mut self, _round: usize, _marginals: &[(usize, Pseudomarginal)]) {}
}

impl EncodeObserver for () {}

/// Encodes `y` to information bits `x` by message passing and decimation.
pub fn encode(
    code: &LdgmCode,
    y: &[u8],
    w: &Weights,
    mp_params: &MpParams,
    policy: &DecimationPolicy,
    seed: u64,
) -> Result<(Vec<u8>, EncodeStats)> {
    encode_observed(code, y, w, mp_params, policy, seed, &mut ())
}

fn round_seed(seed: u64, round: usize) -> u64 {
    seed ^ (round as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn in_round(round: usize, e: Error) -> Error {
    match e {
        Error::Contradiction(c) => Error::Contradiction(Contradiction::InRound {
            round,
            cause: Box::new(c),
        }),
        other => other,
    }
}

pub fn encode_observed(
    code: &LdgmCode,
    y: &[u8],
    w: &Weights,
    mp_params: &MpParams,
    policy: &DecimationPolicy,
    seed: u64,
    observer: &mut dyn EncodeObserver,
) -> Result<(Vec<u8>, EncodeStats)> {
    if y.len() != code.n() {
        return Err(Error::LengthMismatch {
            expected: code.n(),
            actual: y.len(),
        });
    }
    if let Some(bad) = y.iter().find(|&&b| b > 1) {
        return Err(Error::InvalidArgument(format!("source symbol {bad} is not a bit")));
    }
    w.validate()?;
    mp_params.validate()?;
    policy.validate()?;

    let mut rc = ReducedCode::new(code);
    let mut state = mp::init_messages(&rc, seed);
    let mut stats = EncodeStats {
        rounds: 0,
        iterations_per_round: Vec::new(),
        converged: Vec::new(),
        fixed_per_round: Vec::new(),
        total_iterations: 0,
        residual_free: 0,
        distortion: 0.0,
    };
    let mut last: Vec<(usize, Pseudomarginal)> = Vec::new();

    while rc.num_active() > 0 {
        let round = stats.rounds;
        let outcome = mp::run_mp_observed(&rc, y, w, mp_params, &mut state, &mut |s| {
            observer.on_sweep(round, &rc, s)
        })
        .map_err(|e| in_round(round, e))?;
        stats.rounds += 1;
        stats.iterations_per_round.push(outcome.iters);
        stats.converged.push(outcome.converged);
        stats.total_iterations += outcome.iters;

        last = pseudomarginals(&rc, &state, w).map_err(|c| in_round(round, c.into()))?;
        observer.on_marginals(round, &last);

        if let Some(stop) = policy.stop_bias {
            if last.iter().all(|(_, pm)| pm.bias() < stop) {
                stats.fixed_per_round.push(0);
                break;
            }
        }
        let fixed = select_and_fix(&mut rc, &last, policy)?;
        stats.fixed_per_round.push(fixed.len());
        if rc.num_active() == 0 {
            break;
        }
        state = if policy.warm_start {
            warm_start_messages(&state, &rc)
        } else {
            mp::init_messages(&rc, round_seed(seed, stats.rounds))
        };
    }

    stats.residual_free = rc.num_active();
    for (i, pm) in last.iter().filter(|(i, _)| rc.is_active(*i)).copied().collect::<Vec<_>>() {
        let v = match policy.cleanup_rule {
            CleanupRule::ZeroFill => 0,
            CleanupRule::ArgmaxMu => pm.preferred(),
        };
        rc.fix_bit(i, v)?;
    }
    let x = rc.assignment().expect("every bit is fixed after cleanup");
    stats.distortion = distortion(y, &decode(code, &x)?)?;
    Ok((x, stats))
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::code::{generate_code, DegreeDistribution};
    use crate::mrf::exact_extended_marginals;

    fn pm(mu0: f64, mu1: f64, mu_star: f64) -> Pseudomarginal {
        Pseudomarginal::from_weights(mu0, mu1, mu_star).unwrap()
    }

    fn star_code(m: usize) -> LdgmCode {
        // every check sees every information bit
        LdgmCode::from_check_lists(m, vec![(0..m).collect(); 2 * m]).unwrap()
    }

    #[test]
    fn pseudomarginal_basics() {
        let p = pm(2.0, 6.0, 2.0);
        assert!((p.sum() - 1.0).abs() < 1e-15);
        assert!((p.bias() - 0.4).abs() < 1e-15);
        assert_eq!(p.preferred(), 1);
        assert_eq!(pm(1.0, 1.0, 0.0).preferred(), 0);
        assert!(Pseudomarginal::from_weights(0.0, 0.0, 0.0).is_none());
    }

    #[test]
    fn degree_one_bit_has_star_marginal() {
        let code = LdgmCode::from_check_lists(2, vec![vec![0, 1], vec![1], vec![0, 1]]).unwrap();
        let rc = ReducedCode::new(&code);
        let state = mp::init_messages(&rc, 0);
        let w = Weights::for_rate(0.5);
        assert_eq!(pseudomarginals(&rc, &state, &w).unwrap().len(), 2);
        let code = LdgmCode::from_check_lists(2, vec![vec![0], vec![1], vec![1]]).unwrap();
        let rc = ReducedCode::new(&code);
        let state = mp::init_messages(&rc, 0);
        let marg = pseudomarginals(&rc, &state, &w).unwrap();
        assert_eq!(marg[0], (0, pm(0.0, 0.0, 1.0)));
    }

    #[test]
    fn zero_info_weight_removes_star_mass() {
        let code = star_code(4);
        let rc = ReducedCode::new(&code);
        let mut state = mp::init_messages(&rc, 1);
        let w = Weights::new(1.1, 0.0, 0.8).unwrap();
        mp::sweep(&rc, &[0, 1, 1, 0, 1, 0, 0, 1], &w, 0.0, &mut state).unwrap();
        for (_, p) in pseudomarginals(&rc, &state, &w).unwrap() {
            assert_eq!(p.mu_star, 0.0);
        }
    }

    #[test]
    fn single_candidate_is_fixed_to_argmax() {
        let code = LdgmCode::from_check_lists(100, (0..150).map(|a| vec![a % 100]).collect()).unwrap();
        let mut rc = ReducedCode::new(&code);
        let mut marg: Vec<_> = (0..100).map(|i| (i, pm(0.3, 0.3, 0.4))).collect();
        marg[17].1 = pm(0.0, 0.9, 0.1);
        let policy = DecimationPolicy {
            bias_threshold: 0.5,
            ..DecimationPolicy::default()
        };
        assert_eq!(select_and_fix(&mut rc, &marg, &policy).unwrap(), vec![(17, 1)]);
        assert_eq!(rc.fixed_value(17), Some(1));
        assert_eq!(rc.num_active(), 99);
    }

    #[test]
    fn cap_limits_round_to_two_percent() {
        let m = 10_000;
        let code = LdgmCode::from_check_lists(m, (0..m + 1).map(|a| vec![a % m]).collect()).unwrap();
        let mut rc = ReducedCode::new(&code);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let marg: Vec<_> = (0..m)
            .map(|i| {
                let p = if i % 33 == 0 && i / 33 < 300 {
                    let b = rng.random_range(0.2..0.9);
                    pm((1.0 - b) / 2.0, (1.0 + b) / 2.0, 0.0)
                } else {
                    pm(0.4, 0.4, 0.2)
                };
                (i, p)
            })
            .collect();
        let fixed = select_and_fix(&mut rc, &marg, &DecimationPolicy::default()).unwrap();
        assert_eq!(fixed.len(), 200);
        let mut biases: Vec<f64> = marg.iter().map(|(_, p)| p.bias()).collect();
        biases.sort_by(|a, b| b.total_cmp(a));
        let weakest = fixed.iter().map(|&(i, _)| marg[i].1.bias()).fold(1.0, f64::min);
        assert_eq!(weakest, biases[199]);
        assert!(biases[200] <= weakest);
    }

    #[test]
    fn forced_progress_fixes_lowest_index_to_zero() {
        let code = star_code(5);
        let mut rc = ReducedCode::new(&code);
        let marg: Vec<_> = (0..5).map(|i| (i, pm(0.25, 0.25, 0.5))).collect();
        let fixed = select_and_fix(&mut rc, &marg, &DecimationPolicy::default()).unwrap();
        assert_eq!(fixed, vec![(0, 0)]);
        let policy = DecimationPolicy {
            min_fix_count: 3,
            ..DecimationPolicy::default()
        };
        let marg: Vec<_> = (1..5).map(|i| (i, pm(0.25, 0.25, 0.5))).collect();
        assert_eq!(select_and_fix(&mut rc, &marg, &policy).unwrap(), vec![(1, 0), (2, 0), (3, 0)]);
    }

    #[test]
    fn ties_in_bias_break_by_index() {
        let code = star_code(6);
        let mut rc = ReducedCode::new(&code);
        let marg = vec![
            (5, pm(0.1, 0.7, 0.2)),
            (2, pm(0.7, 0.1, 0.2)),
            (4, pm(0.1, 0.7, 0.2)),
            (1, pm(0.3, 0.4, 0.3)),
        ];
        let policy = DecimationPolicy {
            bias_threshold: 0.5,
            max_fix_fraction: 1.0,
            ..DecimationPolicy::default()
        };
        assert_eq!(select_and_fix(&mut rc, &marg, &policy).unwrap(), vec![(2, 0), (4, 1), (5, 1)]);
    }

    #[test]
    fn warm_start_drops_fixed_edges() {
        let code = star_code(3);
        let mut rc = ReducedCode::new(&code);
        let state = mp::init_messages(&rc, 3);
        rc.fix_bit(1, 1).unwrap();
        let next = warm_start_messages(&state, &rc);
        for e in 0..code.num_edges() {
            if code.edge_bit(e) == 1 {
                assert_eq!(next.check_to_bit[e], Message5::ZERO);
            } else {
                assert!(next.check_to_bit[e].max_abs_diff(&state.check_to_bit[e]) < 1e-15);
                assert!((next.bit_to_check[e].sum() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tree_marginals_match_exhaustive() {
        // bits 0..3 each on two or three checks, no cycles
        let lists = vec![vec![0], vec![0, 1], vec![1], vec![1, 2], vec![2], vec![0, 3], vec![3]];
        let code = LdgmCode::from_check_lists(4, lists).unwrap();
        assert!(code.is_forest());
        let y = [1, 0, 1, 1, 0, 0, 1];
        let w = Weights::new(1.1, 1.0, 0.9).unwrap();
        let rc = ReducedCode::new(&code);
        let mut state = mp::init_messages(&rc, 0);
        let params = MpParams {
            alpha: 0.0,
            tol: 1e-15,
            max_iters: 100,
        };
        assert!(mp::run_mp(&rc, &y, &w, &params, &mut state).unwrap().converged);
        let exact = exact_extended_marginals(&code, &y, &w).unwrap();
        for (i, p) in pseudomarginals(&rc, &state, &w).unwrap() {
            let [e0, e1, es] = exact.info[i];
            assert!((p.mu0 - e0).abs() < 1e-12 && (p.mu1 - e1).abs() < 1e-12 && (p.mu_star - es).abs() < 1e-12);
        }
    }

    fn exhaustive_optimum(code: &LdgmCode, y: &[u8]) -> f64 {
        let m = code.m();
        (0..1u32 << m)
            .map(|mask| {
                let x: Vec<u8> = (0..m).map(|k| (mask >> k & 1) as u8).collect();
                distortion(y, &decode(code, &x).unwrap()).unwrap()
            })
            .fold(1.0, f64::min)
    }

    #[test]
    fn encode_outputs_full_vector_and_consistent_stats() {
        let dist = DegreeDistribution::new(vec![(3, 1.0)], vec![(1, 0.2), (2, 0.8)]).unwrap();
        let code = generate_code(200, 0.6, &dist, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let y: Vec<u8> = (0..200).map(|_| rng.random_range(0..2)).collect();
        let w = Weights::for_rate(0.6);
        let (x, stats) = encode(&code, &y, &w, &MpParams::default(), &DecimationPolicy::default(), 9).unwrap();
        assert_eq!(x.len(), code.m());
        assert!(x.iter().all(|&b| b <= 1));
        assert_eq!(stats.rounds, stats.iterations_per_round.len());
        assert_eq!(stats.rounds, stats.fixed_per_round.len());
        assert_eq!(stats.total_iterations, stats.iterations_per_round.iter().sum::<usize>());
        assert_eq!(stats.fixed_per_round.iter().sum::<usize>() + stats.residual_free, code.m());
        assert!(stats.rounds <= code.m());
        assert_eq!(stats.distortion, distortion(&y, &decode(&code, &x).unwrap()).unwrap());
        let again = encode(&code, &y, &w, &MpParams::default(), &DecimationPolicy::default(), 9).unwrap();
        assert_eq!((x, stats), again);
        let parsed: EncodeStats = serde_json::from_str(&again.1.to_json()).unwrap();
        assert_eq!(parsed, again.1);
    }

    #[test]
    fn encode_is_close_to_optimum_on_toy_codes() {
        let dist = DegreeDistribution::new(vec![(3, 1.0)], vec![(1, 0.5), (2, 0.5)]).unwrap();
        let mut good = 0;
        for seed in 0..10 {
            let code = generate_code(12, 0.5, &dist, seed).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
            let y: Vec<u8> = (0..12).map(|_| rng.random_range(0..2)).collect();
            let (_, stats) = encode(
                &code,
                &y,
                &Weights::for_rate(0.5),
                &MpParams::default(),
                &DecimationPolicy::default(),
                seed,
            )
            .unwrap();
            if stats.distortion <= exhaustive_optimum(&code, &y) + 1.0 / 12.0 + 1e-12 {
                good += 1;
            }
        }
        assert!(good >= 8, "{good} of 10 within 1/n of optimum");
    }

    #[test]
    fn encode_codeword_source_beats_trivial_bound() {
        let dist = DegreeDistribution::new(vec![(3, 1.0)], vec![(1, 0.5), (2, 0.5)]).unwrap();
        let code = generate_code(300, 0.5, &dist, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let xbar: Vec<u8> = (0..code.m()).map(|_| rng.random_range(0..2)).collect();
        let y = decode(&code, &xbar).unwrap();
        let w = Weights::new(1.1, 1.0, 3.0).unwrap();
        let (_, stats) = encode(&code, &y, &w, &MpParams::default(), &DecimationPolicy::default(), 1).unwrap();
        assert!(stats.distortion <= 0.25, "{}", stats.distortion);
    }

    #[test]
    fn pure_bp_decimation_runs() {
        let dist = DegreeDistribution::new(vec![(3, 1.0)], vec![(1, 0.5), (2, 0.5)]).unwrap();
        let code = generate_code(200, 0.5, &dist, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let y: Vec<u8> = (0..200).map(|_| rng.random_range(0..2)).collect();
        let w = Weights::new(0.0, 0.0, 0.9).unwrap();
        let (x, stats) = encode(&code, &y, &w, &MpParams::default(), &DecimationPolicy::default(), 3).unwrap();
        assert_eq!(x.len(), code.m());
        assert!(stats.distortion <= 0.5);
    }

    #[test]
    fn stop_bias_hands_rest_to_cleanup() {
        let dist = DegreeDistribution::new(vec![(3, 1.0)], vec![(1, 0.5), (2, 0.5)]).unwrap();
        let code = generate_code(100, 0.5, &dist, 6).unwrap();
        let y = vec![0; 100];
        let w = Weights::new(1.1, 1.0, 0.0).unwrap();
        // gamma = 0 leaves 0 and 1 symmetric, so every bias is 0
        for rule in [CleanupRule::ZeroFill, CleanupRule::ArgmaxMu] {
            let policy = DecimationPolicy {
                stop_bias: Some(1e-6),
                cleanup_rule: rule,
                ..DecimationPolicy::default()
            };
            let (x, stats) = encode(&code, &y, &w, &MpParams::default(), &policy, 0).unwrap();
            assert_eq!(stats.rounds, 1);
            assert_eq!(stats.residual_free, code.m());
            if rule == CleanupRule::ZeroFill {
                assert!(x.iter().all(|&b| b == 0));
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let code = star_code(2);
        let w = Weights::for_rate(0.5);
        let p = MpParams::default();
        let d = DecimationPolicy::default();
        assert!(encode(&code, &[0, 1], &w, &p, &d, 0).is_err());
        assert!(encode(&code, &[0, 1, 2, 0], &w, &p, &d, 0).is_err());
        let bad = DecimationPolicy {
            bias_threshold: 0.0,
            ..d
        };
        assert!(encode(&code, &[0, 1, 1, 0], &w, &p, &bad, 0).is_err());
        assert_eq!(d.round_cap(10_000), 200);
        assert_eq!(d.round_cap(10), 1);
        assert_eq!(d.round_cap(51), 2);
    }
}
