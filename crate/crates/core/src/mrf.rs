//! Weighted distribution over generalized codewords and its representation
//! as a Markov random field with forcing-set variables.
//!
//! Each bit carries a pair `(value, P)`, where `P` is the set of checks
//! forcing it together with a polarity. The exhaustive routines here are
//! test oracles and are only meant for codes with a handful of bits.

use crate::code::LdgmCode;
use crate::error::{Error, Result};
use crate::genword::{advance, is_generalized_codeword, Assignment, Symbol};

/// Weights of `*` source bits, `*` information bits, and source fidelity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights {
    pub w_sou: f64,
    pub w_info: f64,
    pub gamma: f64,
}

impl Weights {
    pub const DEFAULT_W_SOU: f64 = 1.10;
    pub const DEFAULT_W_INFO: f64 = 1.0;

    pub fn new(w_sou: f64, w_info: f64, gamma: f64) -> Result<Self> {
        let w = Weights {
            w_sou,
            w_info,
            gamma,
        };
        w.validate()?;
        Ok(w)
    }

    /// Default star weights with `gamma` interpolated for `rate`.
    pub fn for_rate(rate: f64) -> Self {
        Weights {
            w_sou: Self::DEFAULT_W_SOU,
            w_info: Self::DEFAULT_W_INFO,
            gamma: gamma_for_rate(rate),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("w_sou", self.w_sou), ("w_info", self.w_info), ("gamma", self.gamma)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Weights under which [`weighted_score`] is proportional to the
    /// extended field's `(x, z)` marginal.
    ///
    /// A concrete source bit contributes `lam1 = e^gamma` when it agrees
    /// with `y_a` and `lam0 = e^-gamma` when it does not, i.e.
    /// `e^gamma * e^(-2 gamma [z_a != y_a])`, while a `*` source bit
    /// contributes `w_sou`. Dividing out the global `e^(gamma n)` leaves
    /// `w_sou e^-gamma` per `*` source bit.
    pub fn weighted_equivalent(&self) -> Weights {
        Weights {
            w_sou: self.w_sou * (-self.gamma).exp(),
            ..*self
        }
    }
}

/// Linear interpolation of `gamma` between 0.70 at rate 0.30 and 1.45 at
/// rate 0.90, clamped outside that range.
pub fn gamma_for_rate(rate: f64) -> f64 {
    let t = ((rate - 0.30) / 0.60).clamp(0.0, 1.0);
    0.70 + t * (1.45 - 0.70)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    None,
    Zero,
    One,
}

/// Forcing set of one bit: a polarity and a subset of the bit's checks.
///
/// `members` is a bitmask over positions in `C(i)` (bit `k` is the `k`-th
/// check of the bit); a source bit has the single position 0 for its own
/// check. Both polarities can never be populated at once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ForcingSet {
    polarity: Polarity,
    members: u64,
}

impl ForcingSet {
    pub const EMPTY: ForcingSet = ForcingSet {
        polarity: Polarity::None,
        members: 0,
    };

    pub fn new(polarity: Polarity, members: u64) -> Result<Self> {
        if (polarity == Polarity::None) != (members == 0) {
            return Err(Error::InvalidArgument(
                "a forcing set has a polarity exactly when it is non-empty".into(),
            ));
        }
        Ok(ForcingSet { polarity, members })
    }

    pub fn polarity(&self) -> Polarity {
        self.polarity
    }

    pub fn members(&self) -> u64 {
        self.members
    }

    pub fn len(&self) -> u32 {
        self.members.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.members == 0
    }

    pub fn contains(&self, position: usize) -> bool {
        self.members >> position & 1 == 1
    }

    /// All `2^(degree + 1) - 1` forcing sets of a bit with `degree` checks.
    pub fn all(degree: usize) -> impl Iterator<Item = ForcingSet> {
        assert!(degree < 64, "degree {degree} too large for a forcing-set mask");
        let full = 1u64 << degree;
        std::iter::once(ForcingSet::EMPTY).chain([Polarity::Zero, Polarity::One].into_iter().flat_map(
            move |polarity| (1..full).map(move |members| ForcingSet { polarity, members }),
        ))
    }
}

/// Per-node weights for the values 0 and 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeWeights {
    pub lam0: f64,
    pub lam1: f64,
}

impl NodeWeights {
    pub const INFO: NodeWeights = NodeWeights { lam0: 1.0, lam1: 1.0 };

    /// `lam1 = e^gamma` if `y_a = 1`, else `e^-gamma`; `lam0 = 1 / lam1`.
    pub fn source(y_a: u8, gamma: f64) -> NodeWeights {
        let lam1 = if y_a == 1 { gamma.exp() } else { (-gamma).exp() };
        NodeWeights {
            lam0: 1.0 / lam1,
            lam1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Info,
    Source,
}

/// Variable compatibility `psi(value, P)`.
///
/// Information bits: `lam_v` when `value = v` is forced with matching
/// polarity by at least two checks, `w_info` for `*` with an empty set.
/// Source bits: `lam_v` when `value = v` is forced by its own check alone,
/// `w_sou` for `*` with an empty set. Everything else has weight 0.
pub fn variable_compat(
    kind: NodeKind,
    value: Symbol,
    p: &ForcingSet,
    nw: NodeWeights,
    w: &Weights,
) -> f64 {
    let (star_weight, forced_ok) = match kind {
        NodeKind::Info => (w.w_info, p.len() >= 2),
        NodeKind::Source => (w.w_sou, p.members == 1),
    };
    match (value, p.polarity) {
        (Symbol::Star, Polarity::None) => star_weight,
        (Symbol::Zero, Polarity::Zero) if forced_ok => nw.lam0,
        (Symbol::One, Polarity::One) if forced_ok => nw.lam1,
        _ => 0.0,
    }
}

/// Local validity of check `a`: a `{0, 1}` local codeword, or `z_a = *`
/// with at least one `*` information neighbor. Returns whether the check is
/// forcing, or `None` when the configuration is invalid.
pub fn check_local_state(local_x: &[Symbol], local_z: Symbol) -> Option<bool> {
    let mut parity = 0u8;
    let mut star = false;
    for s in local_x {
        match s.bit() {
            Some(b) => parity ^= b,
            None => star = true,
        }
    }
    match local_z.bit() {
        None if star => Some(false),
        Some(z) if !star && z == parity => Some(true),
        _ => None,
    }
}

/// Check compatibility `phi_a`: 1 when the local configuration is valid and
/// `a` belongs to each neighbor's forcing set exactly when `a` is forcing.
///
/// `local_x` and `local_sets` are aligned with `code.check_neighbors(a)`.
pub fn check_compat(
    code: &LdgmCode,
    a: usize,
    local_x: &[Symbol],
    local_z: Symbol,
    local_sets: &[ForcingSet],
) -> u8 {
    let Some(forcing) = check_local_state(local_x, local_z) else {
        return 0;
    };
    let consistent = code.check_neighbors(a).iter().zip(local_sets).all(|(&i, set)| {
        let pos = code
            .bit_neighbors(i)
            .iter()
            .position(|&b| b == a)
            .expect("transpose adjacency");
        set.contains(pos) == forcing
    });
    u8::from(consistent)
}

/// Unnormalized weight `w_sou^{#* in z} * w_info^{#* in x} * exp(-2 gamma d)`
/// of a generalized codeword, where `d` counts disagreements between `y` and
/// the concrete entries of `z`. Invalid assignments score 0.
pub fn weighted_score(code: &LdgmCode, asg: &Assignment, y: &[u8], w: &Weights) -> Result<f64> {
    asg.check_dims(code)?;
    if y.len() != code.n() {
        return Err(Error::LengthMismatch {
            expected: code.n(),
            actual: y.len(),
        });
    }
    if !is_generalized_codeword(code, asg) {
        return Ok(0.0);
    }
    let mismatches = asg
        .z
        .iter()
        .zip(y)
        .filter(|(z, &ya)| z.bit().is_some_and(|b| b != ya))
        .count();
    Ok(w.w_sou.powi(asg.source_stars() as i32)
        * w.w_info.powi(asg.info_stars() as i32)
        * (-2.0 * w.gamma * mismatches as f64).exp())
}

/// Neumaier compensated sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Exact distribution of the extended field, projected onto `(x, z)`.
#[derive(Debug, Clone)]
pub struct ExtendedMarginals {
    /// Normalized probability of every `(z, x)` with positive mass.
    pub joint: Vec<(Assignment, f64)>,
    /// Per information bit, probabilities of `[0, 1, *]`.
    pub info: Vec<[f64; 3]>,
    /// Per source bit, probabilities of `[0, 1, *]`.
    pub source: Vec<[f64; 3]>,
}

/// Work budget of [`exact_extended_marginals`], in compatibility evaluations.
pub const MAX_ENUMERATION_WORK: f64 = 5e8;

/// Exhaustive marginals of the product of all variable and check
/// compatibilities.
///
/// Every `(x, z)` in `{0, 1, *}^(m + n)` is visited. For a fixed `(x, z)`
/// the check compatibilities factor into local validity times one
/// membership test per edge, so the sum over all forcing-set configurations
/// is the product over bits of a sum over that bit's own forcing sets.
pub fn exact_extended_marginals(code: &LdgmCode, y: &[u8], w: &Weights) -> Result<ExtendedMarginals> {
    w.validate()?;
    let (n, m) = (code.n(), code.m());
    if y.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: y.len(),
        });
    }
    let per_config: f64 = (0..m)
        .map(|i| 2f64.powi(code.bit_degree(i) as i32 + 1) - 1.0)
        .sum::<f64>()
        + 3.0 * n as f64;
    let work = 3f64.powi((n + m) as i32) * per_config;
    if (0..m).any(|i| code.bit_degree(i) >= 63) || work > MAX_ENUMERATION_WORK {
        return Err(Error::TooLarge(format!(
            "about {work:.3e} evaluations exceeds {MAX_ENUMERATION_WORK:.0e}"
        )));
    }

    let source_nw: Vec<NodeWeights> = y.iter().map(|&ya| NodeWeights::source(ya, w.gamma)).collect();
    let source_sets = [
        ForcingSet::EMPTY,
        ForcingSet { polarity: Polarity::Zero, members: 1 },
        ForcingSet { polarity: Polarity::One, members: 1 },
    ];
    let info_sets: Vec<Vec<ForcingSet>> =
        (0..m).map(|i| ForcingSet::all(code.bit_degree(i)).collect()).collect();

    let mut joint = Vec::new();
    let mut total = CompensatedSum::default();
    let mut forcing = vec![false; n];
    let mut all = vec![Symbol::Zero; n + m];
    loop {
        let (z, x) = all.split_at(n);
        let mut valid = true;
        for a in 0..n {
            let local_x: Vec<Symbol> = code.check_neighbors(a).iter().map(|&i| x[i]).collect();
            match check_local_state(&local_x, z[a]) {
                Some(f) => forcing[a] = f,
                None => {
                    valid = false;
                    break;
                }
            }
        }
        if valid {
            let mut weight = 1.0;
            for a in 0..n {
                weight *= source_sets
                    .iter()
                    .map(|p| variable_compat(NodeKind::Source, z[a], p, source_nw[a], w))
                    .sum::<f64>();
            }
            for i in 0..m {
                if weight == 0.0 {
                    break;
                }
                let checks = code.bit_neighbors(i);
                let mut s = 0.0;
                for p in &info_sets[i] {
                    let psi = variable_compat(NodeKind::Info, x[i], p, NodeWeights::INFO, w);
                    if psi == 0.0 {
                        continue;
                    }
                    if checks.iter().enumerate().all(|(k, &a)| p.contains(k) == forcing[a]) {
                        s += psi;
                    }
                }
                weight *= s;
            }
            if weight > 0.0 {
                total.add(weight);
                joint.push((
                    Assignment {
                        z: z.to_vec(),
                        x: x.to_vec(),
                    },
                    weight,
                ));
            }
        }
        if !advance(&mut all) {
            break;
        }
    }

    let z_total = total.value();
    if z_total <= 0.0 {
        return Err(Error::ZeroPartition);
    }
    let mut info = vec![[CompensatedSum::default(); 3]; m];
    let mut source = vec![[CompensatedSum::default(); 3]; n];
    for (asg, p) in &mut joint {
        *p /= z_total;
        for (acc, s) in info.iter_mut().zip(&asg.x) {
            acc[s.index()].add(*p);
        }
        for (acc, s) in source.iter_mut().zip(&asg.z) {
            acc[s.index()].add(*p);
        }
    }
    let finish = |v: Vec<[CompensatedSum; 3]>| -> Vec<[f64; 3]> {
        v.into_iter().map(|c| c.map(|s| s.value())).collect()
    };
    Ok(ExtendedMarginals {
        joint,
        info: finish(info),
        source: finish(source),
    })
}

/// Normalized weighted distribution over an explicit list of assignments.
pub fn normalized_scores(
    code: &LdgmCode,
    words: &[Assignment],
    y: &[u8],
    w: &Weights,
) -> Result<Vec<(Assignment, f64)>> {
    let mut total = CompensatedSum::default();
    let mut out = Vec::with_capacity(words.len());
    for asg in words {
        let s = weighted_score(code, asg, y, w)?;
        total.add(s);
        out.push((asg.clone(), s));
    }
    let z = total.value();
    if z <= 0.0 {
        return Err(Error::ZeroPartition);
    }
    for (_, s) in &mut out {
        *s /= z;
    }
    out.retain(|(_, s)| *s > 0.0);
    Ok(out)
}

/// Formats per-bit marginals as a text table with one row per bit.
pub fn marginal_table(info: &[[f64; 3]], source: &[[f64; 3]]) -> String {
    let mut out = String::from("node,p0,p1,pstar\n");
    for (k, p) in info.iter().enumerate() {
        out.push_str(&format!("x{k},{:.12e},{:.12e},{:.12e}\n", p[0], p[1], p[2]));
    }
    for (k, p) in source.iter().enumerate() {
        out.push_str(&format!("z{k},{:.12e},{:.12e},{:.12e}\n", p[0], p[1], p[2]));
    }
    out
}
