//! LDGM codes as bipartite factor graphs.
//!
//! A code has `m` information bits and `n` checks. Every check `a` carries
//! one source bit `z_a` and the parity constraint `z_a = XOR_{i in V(a)} x_i`.
//! Edges are stored check-major: the edge ids of check `a` are the contiguous
//! range `check_start[a]..check_start[a + 1]`, so `V(a)` is a slice of
//! `edge_bit`. The bit side keeps the transposed adjacency as edge ids.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::ops::Range;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const FRACTION_TOL: f64 = 1e-9;
const REPAIR_ATTEMPTS: usize = 100;
const RESAMPLE_ATTEMPTS: usize = 100;

/// Node-perspective degree distribution for both sides of the graph.
///
/// Check degrees count information-bit neighbors only; the dedicated source
/// bit of each check is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    pub info_bit_degrees: Vec<(usize, f64)>,
    pub check_info_degrees: Vec<(usize, f64)>,
}

impl DegreeDistribution {
    pub fn new(
        info_bit_degrees: Vec<(usize, f64)>,
        check_info_degrees: Vec<(usize, f64)>,
    ) -> Result<Self> {
        let dist = DegreeDistribution {
            info_bit_degrees,
            check_info_degrees,
        };
        dist.validate()?;
        Ok(dist)
    }

    /// Every information bit of degree `info`, every check of degree `check`.
    pub fn regular(info: usize, check: usize) -> Result<Self> {
        Self::new(vec![(info, 1.0)], vec![(check, 1.0)])
    }

    pub fn validate(&self) -> Result<()> {
        for (side, list, min_degree) in [
            ("info", &self.info_bit_degrees, 2),
            ("check", &self.check_info_degrees, 1),
        ] {
            if list.is_empty() {
                return Err(Error::InvalidDistribution(format!("{side} side is empty")));
            }
            let mut total = 0.0;
            for &(degree, fraction) in list {
                if degree < min_degree {
                    return Err(Error::InvalidDistribution(format!(
                        "{side} degree {degree} is below the minimum {min_degree}"
                    )));
                }
                if !(0.0..=1.0).contains(&fraction) {
                    return Err(Error::InvalidDistribution(format!(
                        "{side} fraction {fraction} for degree {degree} is outside [0, 1]"
                    )));
                }
                total += fraction;
            }
            if (total - 1.0).abs() > FRACTION_TOL {
                return Err(Error::InvalidDistribution(format!(
                    "{side} fractions sum to {total}, not 1"
                )));
            }
            let mut degrees: Vec<usize> = list.iter().map(|&(d, _)| d).collect();
            degrees.sort_unstable();
            if degrees.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidDistribution(format!(
                    "{side} side lists a degree twice"
                )));
            }
        }
        Ok(())
    }

    pub fn mean_info_degree(&self) -> f64 {
        mean_degree(&self.info_bit_degrees)
    }

    pub fn mean_check_degree(&self) -> f64 {
        mean_degree(&self.check_info_degrees)
    }

    /// Parses the text format:
    ///
    /// ```text
    /// # comment
    /// info 2 0.4
    /// info 3 0.6
    /// check 3 1.0
    /// ```
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut info = Vec::new();
        let mut check = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| Error::Parse {
                path: origin.to_path_buf(),
                line: lineno + 1,
                msg: msg.to_string(),
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(err("expected `info|check <degree> <fraction>`"));
            }
            let degree: usize = fields[1].parse().map_err(|_| err("bad degree"))?;
            let fraction: f64 = fields[2].parse().map_err(|_| err("bad fraction"))?;
            match fields[0] {
                "info" => info.push((degree, fraction)),
                "check" => check.push((degree, fraction)),
                _ => return Err(err("expected `info` or `check`")),
            }
        }
        Self::new(info, check)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for &(d, f) in &self.info_bit_degrees {
            let _ = writeln!(out, "info {d} {f}");
        }
        for &(d, f) in &self.check_info_degrees {
            let _ = writeln!(out, "check {d} {f}");
        }
        out
    }
}

fn mean_degree(list: &[(usize, f64)]) -> f64 {
    list.iter().map(|&(d, f)| d as f64 * f).sum()
}

/// Largest-remainder rounding of `fractions * total` to integers summing to
/// `total`. Ties go to the earlier entry.
fn apportion(fractions: &[f64], total: usize) -> Vec<usize> {
    let exact: Vec<f64> = fractions.iter().map(|f| f * total as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..fractions.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &k in order.iter().take(total.saturating_sub(assigned)) {
        counts[k] += 1;
    }
    counts
}

/// Expands per-class node counts into a per-node degree sequence.
fn degree_sequence(list: &[(usize, f64)], nodes: usize) -> Vec<usize> {
    let fractions: Vec<f64> = list.iter().map(|&(_, f)| f).collect();
    let counts = apportion(&fractions, nodes);
    let mut out = Vec::with_capacity(nodes);
    for (&(degree, _), &count) in list.iter().zip(&counts) {
        out.extend(std::iter::repeat_n(degree, count));
    }
    out
}

/// Makes the check-side degree sum equal `target` edges.
///
/// Whole nodes are moved between the distribution's own degree classes while
/// that shrinks the gap; any remainder is absorbed by unit changes on single
/// checks of the most populous class.
fn reconcile_check_degrees(degrees: &mut [usize], target: usize, max_degree: usize) -> Result<()> {
    let mut classes: Vec<usize> = degrees.to_vec();
    classes.sort_unstable();
    classes.dedup();
    let sum = |d: &[usize]| d.iter().sum::<usize>() as i64;
    let mut gap = target as i64 - sum(degrees);

    while gap != 0 {
        // best single move between existing classes
        let mut best: Option<(usize, usize, i64)> = None;
        for &from in &classes {
            for &to in &classes {
                let step = to as i64 - from as i64;
                if step == 0
                    || (step > 0) != (gap > 0)
                    || step.abs() > gap.abs()
                    || !degrees.contains(&from)
                {
                    continue;
                }
                if best.is_none_or(|(_, _, s)| step.abs() > s.abs()) {
                    best = Some((from, to, step));
                }
            }
        }
        let Some((from, to, step)) = best else { break };
        let pos = degrees.iter().position(|&d| d == from).expect("class is populated");
        degrees[pos] = to;
        gap -= step;
    }

    if gap != 0 {
        let mut counts: Vec<(usize, usize)> = classes
            .iter()
            .map(|&c| (c, degrees.iter().filter(|&&d| d == c).count()))
            .collect();
        counts.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        let class = counts[0].0;
        let candidates: Vec<usize> = (0..degrees.len()).filter(|&k| degrees[k] == class).collect();
        let mut idx = candidates.into_iter();
        while gap != 0 {
            let Some(pos) = idx.next() else { break };
            if gap > 0 && degrees[pos] < max_degree {
                degrees[pos] += 1;
                gap -= 1;
            } else if gap < 0 && degrees[pos] > 1 {
                degrees[pos] -= 1;
                gap += 1;
            }
        }
    }
    if gap != 0 {
        return Err(Error::Infeasible(format!(
            "cannot reconcile check degrees with {target} edges"
        )));
    }
    Ok(())
}

/// Immutable LDGM code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LdgmCode {
    n: usize,
    m: usize,
    check_start: Vec<usize>,
    edge_bit: Vec<usize>,
    edge_check: Vec<usize>,
    bit_start: Vec<usize>,
    bit_edge_ids: Vec<usize>,
    bit_adj: Vec<usize>,
}

impl LdgmCode {
    /// Builds a code from the per-check information-bit lists `V(a)`.
    pub fn from_check_lists(m: usize, lists: Vec<Vec<usize>>) -> Result<Self> {
        let n = lists.len();
        if n == 0 || m == 0 {
            return Err(Error::InvalidArgument("code needs n >= 1 and m >= 1".into()));
        }
        let mut check_start = Vec::with_capacity(n + 1);
        let mut edge_bit = Vec::new();
        let mut edge_check = Vec::new();
        check_start.push(0);
        for (a, list) in lists.iter().enumerate() {
            for (k, &i) in list.iter().enumerate() {
                if i >= m {
                    return Err(Error::Malformed(format!(
                        "check {a} references bit {i} but m = {m}"
                    )));
                }
                if list[..k].contains(&i) {
                    return Err(Error::Malformed(format!("duplicate edge ({a}, {i})")));
                }
                edge_bit.push(i);
                edge_check.push(a);
            }
            check_start.push(edge_bit.len());
        }

        let mut degree = vec![0usize; m];
        for &i in &edge_bit {
            degree[i] += 1;
        }
        let mut bit_start = Vec::with_capacity(m + 1);
        bit_start.push(0);
        for d in &degree {
            bit_start.push(bit_start.last().unwrap() + d);
        }
        let mut fill = bit_start.clone();
        let mut bit_edge_ids = vec![0; edge_bit.len()];
        let mut bit_adj = vec![0; edge_bit.len()];
        for (e, &i) in edge_bit.iter().enumerate() {
            bit_edge_ids[fill[i]] = e;
            bit_adj[fill[i]] = edge_check[e];
            fill[i] += 1;
        }

        Ok(LdgmCode {
            n,
            m,
            check_start,
            edge_bit,
            edge_check,
            bit_start,
            bit_edge_ids,
            bit_adj,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn rate(&self) -> f64 {
        self.m as f64 / self.n as f64
    }

    pub fn num_edges(&self) -> usize {
        self.edge_bit.len()
    }

    /// `V(a)`, in stored order.
    pub fn check_neighbors(&self, a: usize) -> &[usize] {
        &self.edge_bit[self.check_edges(a)]
    }

    /// Edge ids of check `a`; position `k` in the range pairs with
    /// `check_neighbors(a)[k]`.
    pub fn check_edges(&self, a: usize) -> Range<usize> {
        self.check_start[a]..self.check_start[a + 1]
    }

    /// `C(i)`, in ascending check order.
    pub fn bit_neighbors(&self, i: usize) -> &[usize] {
        &self.bit_adj[self.bit_start[i]..self.bit_start[i + 1]]
    }

    /// Edge ids of bit `i`, aligned with `bit_neighbors(i)`.
    pub fn bit_edges(&self, i: usize) -> &[usize] {
        &self.bit_edge_ids[self.bit_start[i]..self.bit_start[i + 1]]
    }

    pub fn check_degree(&self, a: usize) -> usize {
        self.check_start[a + 1] - self.check_start[a]
    }

    pub fn bit_degree(&self, i: usize) -> usize {
        self.bit_start[i + 1] - self.bit_start[i]
    }

    pub fn edge_bit(&self, e: usize) -> usize {
        self.edge_bit[e]
    }

    pub fn edge_check(&self, e: usize) -> usize {
        self.edge_check[e]
    }

    pub fn edge_id(&self, a: usize, i: usize) -> Option<usize> {
        self.check_edges(a).find(|&e| self.edge_bit[e] == i)
    }

    pub fn check_lists(&self) -> Vec<Vec<usize>> {
        (0..self.n).map(|a| self.check_neighbors(a).to_vec()).collect()
    }

    /// True when the information/check graph has no cycle.
    pub fn is_forest(&self) -> bool {
        // union-find over m bits followed by n checks
        let mut parent: Vec<usize> = (0..self.n + self.m).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in 0..self.num_edges() {
            let u = find(&mut parent, self.edge_bit[e]);
            let v = find(&mut parent, self.m + self.edge_check[e]);
            if u == v {
                return false;
            }
            parent[u] = v;
        }
        true
    }

    /// Serializes to the `LDGM v1` text format.
    pub fn to_text(&self) -> String {
        let mut out = format!("LDGM v1 n={} m={}\n", self.n, self.m);
        for a in 0..self.n {
            let line: Vec<String> = self.check_neighbors(a).iter().map(|i| i.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Parse {
            path: origin.to_path_buf(),
            line,
            msg,
        };
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
        let (n, m) = parse_header(header).ok_or_else(|| {
            err(1, format!("expected `LDGM v1 n=<n> m=<m>`, found `{header}`"))
        })?;
        let mut lists = Vec::with_capacity(n);
        for (k, line) in lines.enumerate() {
            if lists.len() == n {
                if line.trim().is_empty() {
                    continue;
                }
                return Err(err(k + 2, format!("more than n = {n} check lines")));
            }
            let list = line
                .split_whitespace()
                .map(|tok| tok.parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| err(k + 2, format!("bad bit index: {e}")))?;
            lists.push(list);
        }
        if lists.len() != n {
            return Err(err(
                lists.len() + 1,
                format!("expected {n} check lines, found {}", lists.len()),
            ));
        }
        Self::from_check_lists(m, lists)
    }
}

fn parse_header(line: &str) -> Option<(usize, usize)> {
    let mut it = line.split_whitespace();
    if it.next()? != "LDGM" || it.next()? != "v1" {
        return None;
    }
    let n = it.next()?.strip_prefix("n=")?.parse().ok()?;
    let m = it.next()?.strip_prefix("m=")?.parse().ok()?;
    if it.next().is_some() {
        return None;
    }
    Some((n, m))
}

/// Samples a random code from `dist` with the configuration model.
///
/// `m = round(n * rate)`. Sockets of both sides are matched after a seeded
/// shuffle; repeated edges are repaired by random socket swaps, and after
/// 100 failed repair passes the whole graph is resampled.
pub fn generate_code(n: usize, rate: f64, dist: &DegreeDistribution, seed: u64) -> Result<LdgmCode> {
    if !(rate > 0.0 && rate < 1.0) {
        return Err(Error::InvalidArgument(format!("rate {rate} is outside (0, 1)")));
    }
    dist.validate()?;
    let m = (n as f64 * rate).round() as usize;
    if m == 0 || m >= n {
        return Err(Error::Infeasible(format!("n = {n}, rate = {rate} gives m = {m}")));
    }

    let info_degrees = degree_sequence(&dist.info_bit_degrees, m);
    let mut check_degrees = degree_sequence(&dist.check_info_degrees, n);
    if let Some(&d) = info_degrees.iter().max().filter(|&&d| d > n) {
        return Err(Error::Infeasible(format!("information degree {d} exceeds n = {n}")));
    }
    if let Some(&d) = check_degrees.iter().max().filter(|&&d| d > m) {
        return Err(Error::Infeasible(format!("check degree {d} exceeds m = {m}")));
    }

    let edges: usize = info_degrees.iter().sum();
    let check_edges: usize = check_degrees.iter().sum();
    let slack: usize = dist.info_bit_degrees.iter().map(|&(d, _)| d).sum::<usize>()
        + dist.check_info_degrees.iter().map(|&(d, _)| d).sum::<usize>()
        + info_degrees.iter().copied().max().unwrap_or(0);
    if edges.abs_diff(check_edges) > slack {
        return Err(Error::Infeasible(format!(
            "information side implies {edges} edges but check side implies {check_edges}; \
             at rate {rate} the mean check degree must be about {:.4}",
            rate * dist.mean_info_degree()
        )));
    }
    reconcile_check_degrees(&mut check_degrees, edges, m)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RESAMPLE_ATTEMPTS {
        if let Some(lists) = configuration_model(&info_degrees, &check_degrees, &mut rng) {
            return LdgmCode::from_check_lists(m, lists);
        }
    }
    Err(Error::Infeasible(
        "could not sample a graph without repeated edges".into(),
    ))
}

fn configuration_model(
    info_degrees: &[usize],
    check_degrees: &[usize],
    rng: &mut ChaCha8Rng,
) -> Option<Vec<Vec<usize>>> {
    let mut bit_sockets: Vec<usize> = info_degrees
        .iter()
        .enumerate()
        .flat_map(|(i, &d)| std::iter::repeat_n(i, d))
        .collect();
    let check_sockets: Vec<usize> = check_degrees
        .iter()
        .enumerate()
        .flat_map(|(a, &d)| std::iter::repeat_n(a, d))
        .collect();
    bit_sockets.shuffle(rng);
    let total = bit_sockets.len();

    let mut multiplicity: HashMap<(usize, usize), u32> = HashMap::with_capacity(total);
    for (&a, &i) in check_sockets.iter().zip(&bit_sockets) {
        *multiplicity.entry((a, i)).or_default() += 1;
    }

    for _ in 0..REPAIR_ATTEMPTS {
        let repeated: Vec<usize> = (0..total)
            .filter(|&p| multiplicity[&(check_sockets[p], bit_sockets[p])] > 1)
            .collect();
        if repeated.is_empty() {
            let mut lists = vec![Vec::new(); check_degrees.len()];
            for (&a, &i) in check_sockets.iter().zip(&bit_sockets) {
                lists[a].push(i);
            }
            for list in &mut lists {
                list.sort_unstable();
            }
            return Some(lists);
        }
        for p in repeated {
            let (a, i) = (check_sockets[p], bit_sockets[p]);
            if multiplicity[&(a, i)] <= 1 {
                continue;
            }
            let q = rng.random_range(0..total);
            let (b, j) = (check_sockets[q], bit_sockets[q]);
            if a == b || i == j {
                continue;
            }
            if multiplicity.get(&(a, j)).copied().unwrap_or(0) > 0
                || multiplicity.get(&(b, i)).copied().unwrap_or(0) > 0
            {
                continue;
            }
            for key in [(a, i), (b, j)] {
                *multiplicity.get_mut(&key).unwrap() -= 1;
            }
            *multiplicity.entry((a, j)).or_default() += 1;
            *multiplicity.entry((b, i)).or_default() += 1;
            bit_sockets.swap(p, q);
        }
    }
    None
}

fn check_bits(bits: &[u8]) -> Result<()> {
    match bits.iter().position(|&b| b > 1) {
        Some(k) => Err(Error::InvalidArgument(format!(
            "entry {k} is {}, expected 0 or 1",
            bits[k]
        ))),
        None => Ok(()),
    }
}

/// Reconstruction `y_hat = A x` over GF(2).
pub fn decode(code: &LdgmCode, x: &[u8]) -> Result<Vec<u8>> {
    if x.len() != code.m() {
        return Err(Error::LengthMismatch {
            expected: code.m(),
            actual: x.len(),
        });
    }
    check_bits(x)?;
    Ok((0..code.n())
        .map(|a| code.check_neighbors(a).iter().fold(0u8, |acc, &i| acc ^ x[i]))
        .collect())
}

/// Normalized Hamming distortion.
pub fn distortion(y: &[u8], yhat: &[u8]) -> Result<f64> {
    if y.len() != yhat.len() {
        return Err(Error::LengthMismatch {
            expected: y.len(),
            actual: yhat.len(),
        });
    }
    if y.is_empty() {
        return Err(Error::InvalidArgument("empty sequences".into()));
    }
    check_bits(y)?;
    check_bits(yhat)?;
    let diff = y.iter().zip(yhat).filter(|(a, b)| a != b).count();
    Ok(diff as f64 / y.len() as f64)
}

/// A code with some information bits fixed.
///
/// Fixed bits are removed from the active graph; their values are folded
/// into `check_offset`, so the residual problem for check `a` sees the
/// source observation `y_a XOR check_offset[a]`.
#[derive(Debug, Clone)]
pub struct ReducedCode<'a> {
    base: &'a LdgmCode,
    fixed: Vec<Option<u8>>,
    check_offset: Vec<u8>,
    active_degree: Vec<usize>,
    num_active: usize,
}

impl<'a> ReducedCode<'a> {
    pub fn new(base: &'a LdgmCode) -> Self {
        ReducedCode {
            base,
            fixed: vec![None; base.m()],
            check_offset: vec![0; base.n()],
            active_degree: (0..base.n()).map(|a| base.check_degree(a)).collect(),
            num_active: base.m(),
        }
    }

    pub fn base(&self) -> &'a LdgmCode {
        self.base
    }

    pub fn is_active(&self, i: usize) -> bool {
        self.fixed[i].is_none()
    }

    pub fn fixed_value(&self, i: usize) -> Option<u8> {
        self.fixed[i]
    }

    pub fn fixed_bits(&self) -> impl Iterator<Item = (usize, u8)> + '_ {
        self.fixed
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| (i, v)))
    }

    pub fn num_active(&self) -> usize {
        self.num_active
    }

    pub fn active_bits(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.base.m()).filter(|&i| self.fixed[i].is_none())
    }

    pub fn check_offset(&self, a: usize) -> u8 {
        self.check_offset[a]
    }

    pub fn check_offsets(&self) -> &[u8] {
        &self.check_offset
    }

    pub fn active_degree(&self, a: usize) -> usize {
        self.active_degree[a]
    }

    /// `(edge id, bit)` pairs of the unfixed neighbors of check `a`.
    pub fn active_neighbors(&self, a: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.base
            .check_edges(a)
            .map(|e| (e, self.base.edge_bit(e)))
            .filter(|&(_, i)| self.fixed[i].is_none())
    }

    pub fn fix_bit(&mut self, i: usize, v: u8) -> Result<()> {
        if i >= self.base.m() {
            return Err(Error::InvalidArgument(format!("bit {i} out of range")));
        }
        if v > 1 {
            return Err(Error::InvalidArgument(format!("bit value {v}")));
        }
        if self.fixed[i].is_some() {
            return Err(Error::AlreadyFixed(i));
        }
        self.fixed[i] = Some(v);
        self.num_active -= 1;
        for &a in self.base.bit_neighbors(i) {
            self.check_offset[a] ^= v;
            self.active_degree[a] -= 1;
        }
        Ok(())
    }

    /// The information vector once every bit is fixed.
    pub fn assignment(&self) -> Option<Vec<u8>> {
        self.fixed.iter().copied().collect()
    }
}

/// Parses a bit sequence of ASCII `0`/`1`; whitespace is ignored.
pub fn parse_bits(text: &str) -> Result<Vec<u8>> {
    text.chars()
        .filter(|c| !c.is_whitespace())
        .enumerate()
        .map(|(k, c)| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(Error::Malformed(format!(
                "character {other:?} at position {k} is not a bit"
            ))),
        })
        .collect()
}

pub fn format_bits(bits: &[u8]) -> String {
    let mut s: String = bits.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect();
    s.push('\n');
    s
}

pub fn read_bits(path: impl AsRef<Path>) -> Result<Vec<u8>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_bits(&text)
}

pub fn write_bits(path: impl AsRef<Path>, bits: &[u8]) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_bits(bits)).map_err(|e| Error::io(path, e))
}

pub fn save_code(code: &LdgmCode, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, code.to_text()).map_err(|e| Error::io(path, e))
}

pub fn load_code(path: impl AsRef<Path>) -> Result<LdgmCode> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    LdgmCode::parse(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn dense_product(lists: &[Vec<usize>], m: usize, x: &[u8]) -> Vec<u8> {
        // independent dense GF(2) matrix-vector product
        let rows: Vec<Vec<u8>> = lists
            .iter()
            .map(|l| {
                let mut row = vec![0u8; m];
                for &i in l {
                    row[i] = 1;
                }
                row
            })
            .collect();
        rows.iter()
            .map(|row| row.iter().zip(x).map(|(r, v)| r & v).sum::<u8>() % 2)
            .collect()
    }

    fn small_dist() -> DegreeDistribution {
        DegreeDistribution::new(vec![(2, 0.5), (3, 0.5)], vec![(1, 0.75), (2, 0.25)]).unwrap()
    }

    #[test]
    fn forced_single_bit_code() {
        let dist = DegreeDistribution::regular(3, 1).unwrap();
        let code = generate_code(3, 1.0 / 3.0, &dist, 1).unwrap();
        assert_eq!(code.m(), 1);
        assert_eq!(code.check_lists(), vec![vec![0], vec![0], vec![0]]);
        assert_eq!(code.bit_neighbors(0), &[0, 1, 2]);
    }

    #[test]
    fn degree_exceeding_n_is_rejected() {
        let dist = DegreeDistribution::new(vec![(5, 1.0)], vec![(5, 1.0)]).unwrap();
        assert!(matches!(generate_code(4, 0.5, &dist, 0), Err(Error::Infeasible(_))));
    }

    #[test]
    fn inconsistent_sides_are_infeasible() {
        let dist = DegreeDistribution::regular(3, 6).unwrap();
        assert!(matches!(generate_code(100, 0.5, &dist, 0), Err(Error::Infeasible(_))));
    }

    #[test]
    fn validator_rejects_bad_distributions() {
        assert!(DegreeDistribution::new(vec![(1, 1.0)], vec![(3, 1.0)]).is_err());
        assert!(DegreeDistribution::new(vec![(2, 0.5)], vec![(3, 1.0)]).is_err());
        assert!(DegreeDistribution::new(vec![(2, 1.0)], vec![(0, 1.0)]).is_err());
        assert!(DegreeDistribution::new(vec![(2, 0.5), (2, 0.5)], vec![(1, 1.0)]).is_err());
    }

    #[test]
    fn degree_counts_match_distribution() {
        // mean info degree 4.0, mean check degree 2.0: consistent at rate 0.5
        let dist = DegreeDistribution::new(
            vec![(2, 0.5), (4, 0.25), (8, 0.25)],
            vec![(1, 0.25), (2, 0.5), (3, 0.25)],
        )
        .unwrap();
        let n = 10_000;
        let code = generate_code(n, 0.5, &dist, 7).unwrap();
        assert_eq!(code.m(), 5_000);
        for &(d, f) in &dist.info_bit_degrees {
            let count = (0..code.m()).filter(|&i| code.bit_degree(i) == d).count();
            assert!((count as f64 - f * 5_000.0).abs() <= 1.0, "info degree {d}: {count}");
        }
        for &(d, f) in &dist.check_info_degrees {
            let count = (0..n).filter(|&a| code.check_degree(a) == d).count();
            assert!((count as f64 - f * n as f64).abs() <= 1.0, "check degree {d}: {count}");
        }
        assert!((0..code.m()).all(|i| code.bit_degree(i) >= 2));
    }

    #[test]
    fn rounding_gap_is_reconciled() {
        let dist = small_dist();
        let code = generate_code(101, 0.5, &dist, 3).unwrap();
        let info_edges: usize = (0..code.m()).map(|i| code.bit_degree(i)).sum();
        assert_eq!(info_edges, code.num_edges());
        assert!((0..code.n()).all(|a| code.check_degree(a) >= 1));
    }

    #[test]
    fn generation_is_deterministic() {
        let dist = small_dist();
        let a = generate_code(500, 0.5, &dist, 11).unwrap();
        let b = generate_code(500, 0.5, &dist, 11).unwrap();
        let c = generate_code(500, 0.5, &dist, 12).unwrap();
        assert_eq!(a.to_text(), b.to_text());
        assert_ne!(a.to_text(), c.to_text());
    }

    #[test]
    fn decode_examples() {
        let code = LdgmCode::from_check_lists(2, vec![vec![0, 1]]).unwrap();
        assert_eq!(decode(&code, &[1, 1]).unwrap(), vec![0]);
        assert_eq!(decode(&code, &[0, 0]).unwrap(), vec![0]);
        assert!(matches!(
            decode(&code, &[1]),
            Err(Error::LengthMismatch { expected: 2, actual: 1 })
        ));
        assert!(decode(&code, &[1, 2]).is_err());
    }

    #[test]
    fn decode_matches_dense_product() {
        let dist = DegreeDistribution::new(vec![(3, 1.0)], vec![(2, 1.0)]).unwrap();
        let code = generate_code(12, 8.0 / 12.0, &dist, 5).unwrap();
        assert_eq!(code.m(), 8);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..20 {
            let x: Vec<u8> = (0..8).map(|_| rng.random_range(0..2)).collect();
            assert_eq!(decode(&code, &x).unwrap(), dense_product(&code.check_lists(), 8, &x));
        }
    }

    #[test]
    fn distortion_examples() {
        assert_eq!(distortion(&[0, 1, 1, 0], &[0, 1, 1, 0]).unwrap(), 0.0);
        assert_eq!(distortion(&[0, 1, 1, 0], &[1, 0, 0, 1]).unwrap(), 1.0);
        assert_eq!(distortion(&[0, 1, 1, 0], &[0, 0, 1, 1]).unwrap(), 0.5);
        assert!(distortion(&[0, 1], &[0]).is_err());
    }

    #[test]
    fn fix_bit_updates_offsets() {
        let code = LdgmCode::from_check_lists(3, vec![vec![0, 1], vec![0, 2], vec![1, 2]]).unwrap();
        let mut rc = ReducedCode::new(&code);
        rc.fix_bit(1, 0).unwrap();
        assert_eq!(rc.check_offsets(), &[0, 0, 0]);
        assert_eq!(rc.active_degree(0), 1);
        assert!(rc.active_neighbors(0).all(|(_, i)| i != 1));
        rc.fix_bit(0, 1).unwrap();
        assert_eq!(rc.check_offsets(), &[1, 1, 0]);
        assert!(matches!(rc.fix_bit(0, 0), Err(Error::AlreadyFixed(0))));
        assert_eq!(rc.num_active(), 1);
    }

    #[test]
    fn fixing_every_subset_reproduces_decode() {
        let code = LdgmCode::from_check_lists(
            6,
            vec![vec![0, 1, 2], vec![2, 3], vec![3, 4, 5], vec![0, 5], vec![1, 4], vec![0, 3]],
        )
        .unwrap();
        for xs in 0u32..64 {
            let x: Vec<u8> = (0..6).map(|i| ((xs >> i) & 1) as u8).collect();
            let expected = decode(&code, &x).unwrap();
            for subset in 0u32..64 {
                let mut rc = ReducedCode::new(&code);
                for i in (0..6).filter(|i| subset >> i & 1 == 1) {
                    rc.fix_bit(i, x[i]).unwrap();
                }
                // offsets equal the parity of the fixed neighbors
                for a in 0..code.n() {
                    let parity = code
                        .check_neighbors(a)
                        .iter()
                        .filter(|&&i| !rc.is_active(i))
                        .fold(0, |p, &i| p ^ x[i]);
                    assert_eq!(rc.check_offset(a), parity);
                }
                for i in (0..6).filter(|i| subset >> i & 1 == 0) {
                    rc.fix_bit(i, x[i]).unwrap();
                }
                assert_eq!(rc.check_offsets(), expected.as_slice());
                assert_eq!(rc.assignment().unwrap(), x);
            }
        }
    }

    #[test]
    fn text_round_trip_and_errors() {
        let dist = small_dist();
        let code = generate_code(40, 0.5, &dist, 2).unwrap();
        let text = code.to_text();
        assert!(text.starts_with("LDGM v1 n=40 m=20\n"));
        let back = LdgmCode::parse(&text, Path::new("mem")).unwrap();
        assert_eq!(back, code);

        let origin = Path::new("mem");
        assert!(LdgmCode::parse("LDGM v2 n=1 m=1\n0\n", origin).is_err());
        assert!(LdgmCode::parse("LDGM v1 n=2 m=1\n0\n", origin).is_err());
        assert!(matches!(
            LdgmCode::parse("LDGM v1 n=1 m=1\n0 3\n", origin),
            Err(Error::Malformed(_))
        ));
        assert!(matches!(
            LdgmCode::parse("LDGM v1 n=1 m=2\n1 1\n", origin),
            Err(Error::Malformed(_))
        ));
        assert!(matches!(
            LdgmCode::parse("LDGM v1 n=1 m=2\n1 x\n", origin),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.ldgm");
        let code = generate_code(30, 0.5, &DegreeDistribution::regular(2, 1).unwrap(), 4).unwrap();
        save_code(&code, &path).unwrap();
        assert_eq!(load_code(&path).unwrap(), code);
        assert!(load_code(dir.path().join("missing")).is_err());
    }

    #[test]
    fn distribution_text_round_trip() {
        let dist = small_dist();
        let back = DegreeDistribution::parse(&dist.to_text(), Path::new("mem")).unwrap();
        assert_eq!(back, dist);
        assert!(DegreeDistribution::parse("info 2\n", Path::new("mem")).is_err());
    }

    #[test]
    fn bits_parse() {
        assert_eq!(parse_bits("0110\n").unwrap(), vec![0, 1, 1, 0]);
        assert!(parse_bits("01a").is_err());
        assert_eq!(format_bits(&[1, 0]), "10\n");
    }

    proptest! {
        #[test]
        fn transpose_is_consistent(seed in 0u64..1000, n in 8usize..60) {
            let code = generate_code(n, 0.5, &small_dist(), seed).unwrap();
            for a in 0..code.n() {
                for &i in code.check_neighbors(a) {
                    prop_assert!(code.bit_neighbors(i).contains(&a));
                }
            }
            for i in 0..code.m() {
                for (&a, &e) in code.bit_neighbors(i).iter().zip(code.bit_edges(i)) {
                    prop_assert!(code.check_neighbors(a).contains(&i));
                    prop_assert_eq!(code.edge_check(e), a);
                    prop_assert_eq!(code.edge_bit(e), i);
                }
            }
        }

        #[test]
        fn decode_is_linear(seed in 0u64..1000, xs in any::<u64>(), ys in any::<u64>()) {
            let code = generate_code(40, 0.5, &small_dist(), seed).unwrap();
            let x: Vec<u8> = (0..20).map(|i| (xs >> i & 1) as u8).collect();
            let y: Vec<u8> = (0..20).map(|i| (ys >> i & 1) as u8).collect();
            let xy: Vec<u8> = x.iter().zip(&y).map(|(a, b)| a ^ b).collect();
            let lhs = decode(&code, &xy).unwrap();
            let rhs: Vec<u8> = decode(&code, &x).unwrap().iter()
                .zip(decode(&code, &y).unwrap())
                .map(|(a, b)| a ^ b)
                .collect();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
