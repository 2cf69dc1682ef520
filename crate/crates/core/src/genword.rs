//! Generalized codewords over `{0, 1, *}` and the peeling procedure.
//!
//! A check is *forcing* when its source bit and all its information bits
//! are concrete and satisfy parity, and *free* when its source bit is `*`
//! and at least one information neighbor is `*`. An assignment is a
//! generalized codeword when every check is forcing or free and every
//! concrete information bit has at least two forcing checks.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use crate::code::LdgmCode;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Zero,
    One,
    Star,
}

impl Symbol {
    pub const ALL: [Symbol; 3] = [Symbol::Zero, Symbol::One, Symbol::Star];

    pub fn from_bit(b: u8) -> Symbol {
        if b == 0 {
            Symbol::Zero
        } else {
            Symbol::One
        }
    }

    pub fn bit(self) -> Option<u8> {
        match self {
            Symbol::Zero => Some(0),
            Symbol::One => Some(1),
            Symbol::Star => None,
        }
    }

    pub fn is_star(self) -> bool {
        self == Symbol::Star
    }

    /// Index into `[0, 1, *]`-ordered arrays.
    pub fn index(self) -> usize {
        match self {
            Symbol::Zero => 0,
            Symbol::One => 1,
            Symbol::Star => 2,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Symbol::Zero => '0',
            Symbol::One => '1',
            Symbol::Star => '*',
        }
    }

    pub fn from_char(c: char) -> Option<Symbol> {
        match c {
            '0' => Some(Symbol::Zero),
            '1' => Some(Symbol::One),
            '*' => Some(Symbol::Star),
            _ => None,
        }
    }
}

/// Source part `z` (one per check) and information part `x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    pub z: Vec<Symbol>,
    pub x: Vec<Symbol>,
}

impl Assignment {
    pub fn new(z: Vec<Symbol>, x: Vec<Symbol>) -> Self {
        Assignment { z, x }
    }

    pub fn all_star(n: usize, m: usize) -> Self {
        Assignment {
            z: vec![Symbol::Star; n],
            x: vec![Symbol::Star; m],
        }
    }

    /// The ordinary codeword `(A x, x)`.
    pub fn from_codeword(code: &LdgmCode, x: &[u8]) -> Result<Self> {
        let z = crate::code::decode(code, x)?;
        Ok(Assignment {
            z: z.into_iter().map(Symbol::from_bit).collect(),
            x: x.iter().map(|&b| Symbol::from_bit(b)).collect(),
        })
    }

    pub fn source_stars(&self) -> usize {
        self.z.iter().filter(|s| s.is_star()).count()
    }

    pub fn info_stars(&self) -> usize {
        self.x.iter().filter(|s| s.is_star()).count()
    }

    pub fn is_all_star(&self) -> bool {
        self.z.iter().chain(&self.x).all(|s| s.is_star())
    }

    pub fn check_dims(&self, code: &LdgmCode) -> Result<()> {
        if self.z.len() != code.n() {
            return Err(Error::LengthMismatch {
                expected: code.n(),
                actual: self.z.len(),
            });
        }
        if self.x.len() != code.m() {
            return Err(Error::LengthMismatch {
                expected: code.m(),
                actual: self.x.len(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z: String = self.z.iter().map(|s| s.as_char()).collect();
        let x: String = self.x.iter().map(|s| s.as_char()).collect();
        write!(f, "{z}|{x}")
    }
}

impl FromStr for Assignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (z, x) = s
            .split_once('|')
            .ok_or_else(|| Error::Malformed(format!("assignment `{s}` has no `|` separator")))?;
        let parse = |part: &str| {
            part.chars()
                .map(|c| {
                    Symbol::from_char(c).ok_or_else(|| {
                        Error::Malformed(format!("symbol {c:?} is not one of 0, 1, *"))
                    })
                })
                .collect::<Result<Vec<_>>>()
        };
        Ok(Assignment {
            z: parse(z)?,
            x: parse(x)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckState {
    Forcing,
    Free,
    Invalid,
}

impl fmt::Display for CheckState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckState::Forcing => "forcing",
            CheckState::Free => "free",
            CheckState::Invalid => "invalid",
        })
    }
}

/// State of check `a`; panics if `a` or the assignment is out of range.
pub fn check_state(code: &LdgmCode, asg: &Assignment, a: usize) -> CheckState {
    let mut parity = 0u8;
    let mut info_star = false;
    for &i in code.check_neighbors(a) {
        match asg.x[i].bit() {
            Some(b) => parity ^= b,
            None => info_star = true,
        }
    }
    match asg.z[a].bit() {
        None if info_star => CheckState::Free,
        None => CheckState::Invalid,
        Some(_) if info_star => CheckState::Invalid,
        Some(z) if z == parity => CheckState::Forcing,
        Some(_) => CheckState::Invalid,
    }
}

/// Definition of validity: all checks forcing or free, and every concrete
/// information bit forced by at least two checks.
pub fn is_generalized_codeword(code: &LdgmCode, asg: &Assignment) -> bool {
    if asg.check_dims(code).is_err() {
        return false;
    }
    let mut forcing = vec![false; code.n()];
    for (a, f) in forcing.iter_mut().enumerate() {
        match check_state(code, asg, a) {
            CheckState::Invalid => return false,
            CheckState::Forcing => *f = true,
            CheckState::Free => {}
        }
    }
    (0..code.m()).all(|i| {
        asg.x[i].is_star() || code.bit_neighbors(i).iter().filter(|&&a| forcing[a]).count() >= 2
    })
}

/// Peels a full candidate `(z, x)` down to a generalized codeword.
///
/// Checks whose concrete source bit does not make them forcing are erased
/// first. Then any concrete information bit with fewer than two forcing
/// checks is set to `*` together with the source bit of its (at most one)
/// forcing check, until every remaining concrete bit is doubly forced.
/// Finally every free check with no free information neighbor takes its
/// parity. Bits are visited from a queue seeded in ascending index order.
pub fn peel(code: &LdgmCode, asg: &Assignment) -> Result<Assignment> {
    let order: Vec<usize> = (0..code.m()).collect();
    peel_in_order(code, asg, &order)
}

/// [`peel`] with an explicit initial visiting order for the bit queue.
pub fn peel_in_order(code: &LdgmCode, asg: &Assignment, order: &[usize]) -> Result<Assignment> {
    Ok(peel_impl(code, asg, order, None)?)
}

/// [`peel`] that also returns a snapshot after every erasure.
pub fn peel_traced(code: &LdgmCode, asg: &Assignment) -> Result<(Assignment, Vec<Assignment>)> {
    let order: Vec<usize> = (0..code.m()).collect();
    let mut trace = Vec::new();
    let out = peel_impl(code, asg, &order, Some(&mut trace))?;
    Ok((out, trace))
}

fn peel_impl(
    code: &LdgmCode,
    asg: &Assignment,
    order: &[usize],
    mut trace: Option<&mut Vec<Assignment>>,
) -> Result<Assignment> {
    asg.check_dims(code)?;
    let mut out = asg.clone();
    let mut forcing = vec![false; code.n()];

    for a in 0..code.n() {
        match check_state(code, &out, a) {
            CheckState::Forcing => forcing[a] = true,
            _ if !out.z[a].is_star() => {
                out.z[a] = Symbol::Star;
                if let Some(t) = trace.as_deref_mut() {
                    t.push(out.clone());
                }
            }
            _ => {}
        }
    }

    let mut support: Vec<usize> = (0..code.m())
        .map(|i| code.bit_neighbors(i).iter().filter(|&&a| forcing[a]).count())
        .collect();
    let mut queued = vec![false; code.m()];
    let mut queue: VecDeque<usize> = VecDeque::with_capacity(code.m());
    for &i in order {
        if i < code.m() && !queued[i] {
            queued[i] = true;
            queue.push_back(i);
        }
    }

    while let Some(i) = queue.pop_front() {
        queued[i] = false;
        if out.x[i].is_star() || support[i] >= 2 {
            continue;
        }
        out.x[i] = Symbol::Star;
        for &a in code.bit_neighbors(i) {
            if !forcing[a] {
                continue;
            }
            forcing[a] = false;
            out.z[a] = Symbol::Star;
            for &j in code.check_neighbors(a) {
                if j != i && !out.x[j].is_star() {
                    support[j] -= 1;
                    if support[j] < 2 && !queued[j] {
                        queued[j] = true;
                        queue.push_back(j);
                    }
                }
            }
        }
        if let Some(t) = trace.as_deref_mut() {
            t.push(out.clone());
        }
    }

    for a in 0..code.n() {
        if !out.z[a].is_star() {
            continue;
        }
        let mut parity = 0u8;
        let mut free_neighbor = false;
        for &i in code.check_neighbors(a) {
            match out.x[i].bit() {
                Some(b) => parity ^= b,
                None => free_neighbor = true,
            }
        }
        if !free_neighbor {
            out.z[a] = Symbol::from_bit(parity);
        }
    }
    Ok(out)
}

/// Largest `n + m` accepted by [`enumerate_generalized_codewords`].
pub const MAX_ENUMERATION_SIZE: usize = 20;

/// Every generalized codeword of a tiny code, in lexicographic order of `x`.
///
/// For a fixed `x` at most one `z_a` keeps check `a` forcing or free (its
/// parity when all neighbors are concrete, `*` otherwise); every other
/// choice makes the check invalid, so scanning `x` and testing that single
/// completion covers all of `{0, 1, *}^(n + m)`.
pub fn enumerate_generalized_codewords(code: &LdgmCode) -> Result<Vec<Assignment>> {
    let (n, m) = (code.n(), code.m());
    if n + m > MAX_ENUMERATION_SIZE {
        return Err(Error::TooLarge(format!(
            "n + m = {} exceeds {MAX_ENUMERATION_SIZE}",
            n + m
        )));
    }
    let mut found = Vec::new();
    let mut x = vec![Symbol::Zero; m];
    loop {
        let z = (0..n)
            .map(|a| {
                let mut parity = 0u8;
                for &i in code.check_neighbors(a) {
                    match x[i].bit() {
                        Some(b) => parity ^= b,
                        None => return Symbol::Star,
                    }
                }
                Symbol::from_bit(parity)
            })
            .collect();
        let asg = Assignment { z, x: x.clone() };
        if is_generalized_codeword(code, &asg) {
            found.push(asg);
        }
        if !advance(&mut x) {
            break;
        }
    }
    Ok(found)
}

/// Odometer step over `{0, 1, *}` with the last position fastest.
pub(crate) fn advance(v: &mut [Symbol]) -> bool {
    for s in v.iter_mut().rev() {
        match *s {
            Symbol::Zero => {
                *s = Symbol::One;
                return true;
            }
            Symbol::One => {
                *s = Symbol::Star;
                return true;
            }
            Symbol::Star => *s = Symbol::Zero,
        }
    }
    false
}
