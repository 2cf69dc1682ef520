//! Message passing on the extended field over generalized codewords.
//!
//! Every directed edge carries a normalized 5-vector `(F0, F1, W0, W1, S)`:
//! forced zero / forced one by the receiving check, weak zero / weak one
//! (forced by some other set of checks), and star. Messages live in dense
//! arrays indexed by the code's edge ids.
//!
//! A sweep is synchronous: all bit-to-check messages are recomputed from the
//! previous check-to-bit messages, then all check-to-bit messages from the
//! fresh bit-to-check messages. Each new message is mixed with the stored one
//! as `(1 - alpha) * new + alpha * old` and renormalized.
//!
//! The per-node updates use leave-one-out prefix/suffix products over small
//! counting states (how many neighbors are forcing, how many are starred,
//! parity), which equal the closed-form products and differences without
//! subtracting nearly equal quantities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::code::ReducedCode;
use crate::error::{Contradiction, Error, Result};
use crate::mrf::{NodeWeights, Weights};

/// Components below this are flushed to zero.
pub const UNDERFLOW: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Message5 {
    pub f0: f64,
    pub f1: f64,
    pub w0: f64,
    pub w1: f64,
    pub s: f64,
}

impl Message5 {
    pub const UNIFORM: Message5 = Message5 {
        f0: 0.2,
        f1: 0.2,
        w0: 0.2,
        w1: 0.2,
        s: 0.2,
    };

    pub const ZERO: Message5 = Message5 {
        f0: 0.0,
        f1: 0.0,
        w0: 0.0,
        w1: 0.0,
        s: 0.0,
    };

    pub fn new(f0: f64, f1: f64, w0: f64, w1: f64, s: f64) -> Self {
        Message5 { f0, f1, w0, w1, s }
    }

    pub fn to_array(self) -> [f64; 5] {
        [self.f0, self.f1, self.w0, self.w1, self.s]
    }

    pub fn from_array(v: [f64; 5]) -> Self {
        Message5::new(v[0], v[1], v[2], v[3], v[4])
    }

    pub fn sum(&self) -> f64 {
        self.f0 + self.f1 + self.w0 + self.w1 + self.s
    }

    /// Flushes tiny components and scales to unit sum; `None` when nothing
    /// is left.
    pub fn normalized(self) -> Option<Message5> {
        let v = self.to_array().map(|c| if c < UNDERFLOW { 0.0 } else { c });
        let total: f64 = v.iter().sum();
        if total > 0.0 && total.is_finite() {
            Some(Message5::from_array(v.map(|c| c / total)))
        } else {
            None
        }
    }

    pub fn max_abs_diff(&self, other: &Message5) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `(1 - alpha) * self + alpha * previous`.
    pub fn mix(self, previous: &Message5, alpha: f64) -> Message5 {
        let a = self.to_array();
        let b = previous.to_array();
        Message5::from_array(std::array::from_fn(|k| (1.0 - alpha) * a[k] + alpha * b[k]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpParams {
    /// Damping in `[0, 1)`.
    pub alpha: f64,
    /// Convergence threshold on the largest componentwise change of a sweep.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for MpParams {
    fn default() -> Self {
        MpParams {
            alpha: 0.50,
            tol: 1e-4,
            max_iters: 300,
        }
    }
}

impl MpParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.alpha) {
            return Err(Error::InvalidArgument(format!("alpha {} is outside [0, 1)", self.alpha)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tol {} must be positive", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be positive".into()));
        }
        Ok(())
    }
}

/// Messages in both directions for every edge of the base code.
#[derive(Debug, Clone, PartialEq)]
pub struct MessageState {
    pub bit_to_check: Vec<Message5>,
    pub check_to_bit: Vec<Message5>,
    /// Sweeps performed since initialization.
    pub iteration: usize,
    /// Largest componentwise change in the last sweep.
    pub residual: f64,
}

/// Relative amplitude of the initialization noise.
pub const INIT_NOISE: f64 = 0.01;

/// Uniform messages perturbed by i.i.d. factors in `[1 - eps, 1 + eps]`,
/// normalized. Check-to-bit messages share one factor between `W0` and
/// `W1`. Deterministic for a given seed.
pub fn init_messages(rc: &ReducedCode<'_>, seed: u64) -> MessageState {
    init_messages_with_noise(rc, seed, INIT_NOISE)
}

pub fn init_messages_with_noise(rc: &ReducedCode<'_>, seed: u64, eps: f64) -> MessageState {
    let edges = rc.base().num_edges();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng, tied_weak: bool| {
        let mut v: [f64; 5] = std::array::from_fn(|_| {
            if eps == 0.0 {
                1.0
            } else {
                1.0 + rng.random_range(-eps..=eps)
            }
        });
        if tied_weak {
            v[3] = v[2];
        }
        Message5::from_array(v).normalized().expect("positive entries")
    };
    let bit_to_check = (0..edges).map(|_| draw(&mut rng, false)).collect();
    let check_to_bit = (0..edges).map(|_| draw(&mut rng, true)).collect();
    MessageState {
        bit_to_check,
        check_to_bit,
        iteration: 0,
        residual: f64::INFINITY,
    }
}

/// Fixed message from source bit `a` to its check: `(lam0, lam1, 0, 0,
/// w_sou)` normalized, with `lam1 = e^{+-gamma}` according to `y_a`.
pub fn source_bit_message(y_a: u8, gamma: f64, w_sou: f64) -> Message5 {
    let nw = NodeWeights::source(y_a, gamma);
    Message5::new(nw.lam0, nw.lam1, 0.0, 0.0, w_sou)
        .normalized()
        .expect("lam0 and lam1 are positive")
}

/// Counting state over a set of neighbors: weight with none, exactly one,
/// and at least two neighbors in the marked class.
#[derive(Debug, Clone, Copy)]
struct Count3 {
    none: f64,
    one: f64,
    many: f64,
}

impl Count3 {
    const IDENTITY: Count3 = Count3 {
        none: 1.0,
        one: 0.0,
        many: 0.0,
    };

    /// A single neighbor with weight `marked` in the class and `other`
    /// outside it.
    fn leaf(marked: f64, other: f64) -> Count3 {
        Count3 {
            none: other,
            one: marked,
            many: 0.0,
        }
    }

    fn total(&self) -> f64 {
        self.none + self.one + self.many
    }

    fn combine(self, rhs: Count3) -> Count3 {
        Count3 {
            none: self.none * rhs.none,
            one: self.none * rhs.one + self.one * rhs.none,
            many: self.many * rhs.total() + self.one * (rhs.one + rhs.many) + self.none * rhs.many,
        }
    }
}

/// Even/odd parity weights over a set of neighbors.
#[derive(Debug, Clone, Copy)]
struct Parity {
    even: f64,
    odd: f64,
}

impl Parity {
    const IDENTITY: Parity = Parity { even: 1.0, odd: 0.0 };

    fn combine(self, rhs: Parity) -> Parity {
        Parity {
            even: self.even * rhs.even + self.odd * rhs.odd,
            odd: self.even * rhs.odd + self.odd * rhs.even,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct BitAcc {
    zero: Count3,
    one: Count3,
    star: f64,
}

impl BitAcc {
    const IDENTITY: BitAcc = BitAcc {
        zero: Count3::IDENTITY,
        one: Count3::IDENTITY,
        star: 1.0,
    };

    fn leaf(m: &Message5) -> BitAcc {
        BitAcc {
            zero: Count3::leaf(m.f0, m.w0),
            one: Count3::leaf(m.f1, m.w1),
            star: m.s,
        }
    }

    fn combine(self, rhs: BitAcc) -> BitAcc {
        BitAcc {
            zero: self.zero.combine(rhs.zero),
            one: self.one.combine(rhs.one),
            star: self.star * rhs.star,
        }
    }

    /// Outgoing bit message given the accumulated incoming messages of all
    /// other checks: forced needs at least one other forcing check, weak
    /// needs at least two.
    fn emit(&self, nw: NodeWeights, w_info: f64) -> Message5 {
        Message5 {
            f0: nw.lam0 * (self.zero.one + self.zero.many),
            f1: nw.lam1 * (self.one.one + self.one.many),
            w0: nw.lam0 * self.zero.many,
            w1: nw.lam1 * self.one.many,
            s: w_info * self.star,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct CheckAcc {
    parity: Parity,
    stars: Count3,
}

impl CheckAcc {
    const IDENTITY: CheckAcc = CheckAcc {
        parity: Parity::IDENTITY,
        stars: Count3::IDENTITY,
    };

    fn leaf(m: &Message5) -> CheckAcc {
        CheckAcc {
            parity: Parity { even: m.f0, odd: m.f1 },
            stars: Count3::leaf(m.s, m.w0 + m.w1),
        }
    }

    fn combine(self, rhs: CheckAcc) -> CheckAcc {
        CheckAcc {
            parity: self.parity.combine(rhs.parity),
            stars: self.stars.combine(rhs.stars),
        }
    }

    /// Forcing outputs follow parity; the free check needs one star among
    /// the others for `S`, two for the weak outputs.
    fn emit(&self) -> Message5 {
        let weak = self.stars.many;
        Message5 {
            f0: self.parity.even,
            f1: self.parity.odd,
            w0: weak,
            w1: weak,
            s: self.stars.one + self.stars.many,
        }
    }
}

/// Pseudomarginal triple `(mu0, mu1, mu_star)` before normalization, from
/// all incoming check-to-bit messages of a bit.
pub(crate) fn bit_belief<'m>(incoming: impl Iterator<Item = &'m Message5>, w_info: f64) -> [f64; 3] {
    let acc = incoming.fold(BitAcc::IDENTITY, |acc, m| acc.combine(BitAcc::leaf(m)));
    [acc.zero.many, acc.one.many, w_info * acc.star]
}

/// Reusable buffers for the leave-one-out products.
#[derive(Debug, Default)]
struct Scratch {
    edges: Vec<usize>,
    bits: Vec<usize>,
    bit_prefix: Vec<BitAcc>,
    check_prefix: Vec<CheckAcc>,
}

fn mix_and_store(
    slot: &mut Message5,
    computed: Message5,
    alpha: f64,
    residual: &mut f64,
    contradiction: impl FnOnce() -> Contradiction,
) -> std::result::Result<(), Contradiction> {
    let fresh = computed.normalized().ok_or_else(contradiction)?;
    let mixed = if alpha == 0.0 {
        fresh
    } else {
        fresh.mix(slot, alpha).normalized().expect("convex combination of normalized vectors")
    };
    *residual = residual.max(mixed.max_abs_diff(slot));
    *slot = mixed;
    Ok(())
}

fn bit_half_sweep(
    rc: &ReducedCode<'_>,
    state: &mut MessageState,
    w_info: f64,
    alpha: f64,
    scratch: &mut Scratch,
) -> std::result::Result<f64, Contradiction> {
    let code = rc.base();
    let mut residual: f64 = 0.0;
    for i in rc.active_bits() {
        let edges = code.bit_edges(i);
        let prefix = &mut scratch.bit_prefix;
        prefix.clear();
        prefix.push(BitAcc::IDENTITY);
        for &e in edges {
            let next = prefix.last().unwrap().combine(BitAcc::leaf(&state.check_to_bit[e]));
            prefix.push(next);
        }
        let mut suffix = BitAcc::IDENTITY;
        for (k, &e) in edges.iter().enumerate().rev() {
            let others = prefix[k].combine(suffix);
            let computed = others.emit(NodeWeights::INFO, w_info);
            mix_and_store(&mut state.bit_to_check[e], computed, alpha, &mut residual, || {
                Contradiction::BitToCheck {
                    bit: i,
                    check: code.edge_check(e),
                }
            })?;
            suffix = BitAcc::leaf(&state.check_to_bit[e]).combine(suffix);
        }
    }
    Ok(residual)
}

fn check_half_sweep(
    rc: &ReducedCode<'_>,
    y: &[u8],
    state: &mut MessageState,
    w: &Weights,
    alpha: f64,
    scratch: &mut Scratch,
) -> std::result::Result<f64, Contradiction> {
    let code = rc.base();
    let mut residual: f64 = 0.0;
    for a in 0..code.n() {
        if rc.active_degree(a) == 0 {
            continue;
        }
        scratch.edges.clear();
        scratch.bits.clear();
        for (e, i) in rc.active_neighbors(a) {
            scratch.edges.push(e);
            scratch.bits.push(i);
        }
        let source = source_bit_message(y[a] ^ rc.check_offset(a), w.gamma, w.w_sou);
        let prefix = &mut scratch.check_prefix;
        prefix.clear();
        prefix.push(CheckAcc::leaf(&source));
        for &e in &scratch.edges {
            let next = prefix.last().unwrap().combine(CheckAcc::leaf(&state.bit_to_check[e]));
            prefix.push(next);
        }
        let mut suffix = CheckAcc::IDENTITY;
        for (k, &e) in scratch.edges.iter().enumerate().rev() {
            let computed = prefix[k].combine(suffix).emit();
            let bit = scratch.bits[k];
            mix_and_store(&mut state.check_to_bit[e], computed, alpha, &mut residual, || {
                Contradiction::CheckToBit { check: a, bit }
            })?;
            suffix = CheckAcc::leaf(&state.bit_to_check[e]).combine(suffix);
        }
    }
    Ok(residual)
}

/// One synchronous sweep; returns the largest componentwise change.
pub fn sweep(
    rc: &ReducedCode<'_>,
    y: &[u8],
    w: &Weights,
    alpha: f64,
    state: &mut MessageState,
) -> std::result::Result<f64, Contradiction> {
    let mut scratch = Scratch::default();
    sweep_with(rc, y, w, alpha, state, &mut scratch)
}

fn sweep_with(
    rc: &ReducedCode<'_>,
    y: &[u8],
    w: &Weights,
    alpha: f64,
    state: &mut MessageState,
    scratch: &mut Scratch,
) -> std::result::Result<f64, Contradiction> {
    let r1 = bit_half_sweep(rc, state, w.w_info, alpha, scratch)?;
    let r2 = check_half_sweep(rc, y, state, w, alpha, scratch)?;
    state.iteration += 1;
    state.residual = r1.max(r2);
    Ok(state.residual)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MpOutcome {
    pub converged: bool,
    pub iters: usize,
}

/// Sweeps until the residual drops below `params.tol` or `params.max_iters`
/// sweeps have run.
pub fn run_mp(
    rc: &ReducedCode<'_>,
    y: &[u8],
    w: &Weights,
    params: &MpParams,
    state: &mut MessageState,
) -> Result<MpOutcome> {
    run_mp_observed(rc, y, w, params, state, &mut |_| {})
}

/// [`run_mp`] that also appends `(iteration, residual)` after every sweep.
pub fn run_mp_traced(
    rc: &ReducedCode<'_>,
    y: &[u8],
    w: &Weights,
    params: &MpParams,
    state: &mut MessageState,
    trace: &mut Vec<(usize, f64)>,
) -> Result<MpOutcome> {
    run_mp_observed(rc, y, w, params, state, &mut |s| trace.push((s.iteration, s.residual)))
}

/// [`run_mp`] calling `on_sweep` with the message state after every sweep.
pub fn run_mp_observed(
    rc: &ReducedCode<'_>,
    y: &[u8],
    w: &Weights,
    params: &MpParams,
    state: &mut MessageState,
    on_sweep: &mut dyn FnMut(&MessageState),
) -> Result<MpOutcome> {
    params.validate()?;
    w.validate()?;
    let code = rc.base();
    if y.len() != code.n() {
        return Err(Error::LengthMismatch {
            expected: code.n(),
            actual: y.len(),
        });
    }
    if state.bit_to_check.len() != code.num_edges() || state.check_to_bit.len() != code.num_edges() {
        return Err(Error::LengthMismatch {
            expected: code.num_edges(),
            actual: state.bit_to_check.len(),
        });
    }
    let mut scratch = Scratch::default();
    for iters in 1..=params.max_iters {
        let residual = sweep_with(rc, y, w, params.alpha, state, &mut scratch)?;
        on_sweep(state);
        if residual < params.tol {
            return Ok(MpOutcome {
                converged: true,
                iters,
            });
        }
    }
    Ok(MpOutcome {
        converged: false,
        iters: params.max_iters,
    })
}

/// Residual trace as `iter,residual` CSV.
pub fn residual_csv(trace: &[(usize, f64)]) -> String {
    let mut out = String::from("iter,residual\n");
    for (iter, r) in trace {
        out.push_str(&format!("{iter},{r:e}\n"));
    }
    out
}

fn product<I: Iterator<Item = f64>>(it: I) -> f64 {
    it.product()
}

/// Bit-to-check update for edge `(i, a)`, evaluated directly from the
/// closed-form products over `b in C(i) \ {a}`:
///
/// ```text
/// F0 = lam0 (prod[F0 + W0] - prod W0)
/// W0 = lam0 (prod[F0 + W0] - prod W0 - sum_c F0_c prod_{b != c} W0)
/// S  = w_info prod S
/// ```
///
/// and symmetrically for `F1`, `W1`. The result is normalized.
pub fn update_bit_to_check(
    rc: &ReducedCode<'_>,
    state: &MessageState,
    i: usize,
    a: usize,
    nw: NodeWeights,
    w_info: f64,
) -> std::result::Result<Message5, Contradiction> {
    let code = rc.base();
    let incoming: Vec<Message5> = code
        .bit_neighbors(i)
        .iter()
        .zip(code.bit_edges(i))
        .filter(|&(&b, _)| b != a)
        .map(|(_, &e)| state.check_to_bit[e])
        .collect();
    let side = |f: fn(&Message5) -> f64, wk: fn(&Message5) -> f64, lam: f64| {
        let all = product(incoming.iter().map(|m| f(m) + wk(m)));
        let weak = product(incoming.iter().map(wk));
        let single: f64 = (0..incoming.len())
            .map(|c| {
                f(&incoming[c])
                    * product(incoming.iter().enumerate().filter(|&(b, _)| b != c).map(|(_, m)| wk(m)))
            })
            .sum();
        (lam * (all - weak).max(0.0), lam * (all - weak - single).max(0.0))
    };
    let (f0, w0) = side(|m| m.f0, |m| m.w0, nw.lam0);
    let (f1, w1) = side(|m| m.f1, |m| m.w1, nw.lam1);
    let s = w_info * product(incoming.iter().map(|m| m.s));
    Message5::new(f0, f1, w0, w1, s)
        .normalized()
        .ok_or(Contradiction::BitToCheck { bit: i, check: a })
}

/// Check-to-bit update for edge `(a, i)` over `j in V(a) \ {i}` plus the
/// source bit of `a`, evaluated directly from
///
/// ```text
/// F0 = 1/2 [prod(F0 + F1) + prod(F0 - F1)]
/// F1 = 1/2 [prod(F0 + F1) - prod(F0 - F1)]
/// W0 = prod[S + W1 + W0] - prod[W1 + W0] - sum_k S_k prod_{j != k}[W1 + W0]
/// W1 = W0
/// S  = prod[S + W1 + W0] - prod[W1 + W0]
/// ```
///
/// The source bit uses the observation `y_a` flipped by the check offset.
pub fn update_check_to_bit(
    rc: &ReducedCode<'_>,
    state: &MessageState,
    a: usize,
    i: usize,
    y: &[u8],
    gamma: f64,
    w_sou: f64,
) -> std::result::Result<Message5, Contradiction> {
    let mut incoming = vec![source_bit_message(y[a] ^ rc.check_offset(a), gamma, w_sou)];
    incoming.extend(
        rc.active_neighbors(a)
            .filter(|&(_, j)| j != i)
            .map(|(e, _)| state.bit_to_check[e]),
    );
    let sum = product(incoming.iter().map(|m| m.f0 + m.f1));
    let diff = product(incoming.iter().map(|m| m.f0 - m.f1));
    let any = product(incoming.iter().map(|m| m.s + m.w1 + m.w0));
    let none = product(incoming.iter().map(|m| m.w1 + m.w0));
    let single: f64 = (0..incoming.len())
        .map(|k| {
            incoming[k].s
                * product(
                    incoming
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != k)
                        .map(|(_, m)| m.w1 + m.w0),
                )
        })
        .sum();
    let weak = (any - none - single).max(0.0);
    Message5::new(
        0.5 * (sum + diff),
        (0.5 * (sum - diff)).max(0.0),
        weak,
        weak,
        (any - none).max(0.0),
    )
    .normalized()
    .ok_or(Contradiction::CheckToBit { check: a, bit: i })
}
