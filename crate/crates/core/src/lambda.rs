//! Pure lambda terms with a binder-index internal representation.
//!
//! Bound variables are de Bruijn indices, free variables are names, and
//! every abstraction keeps the surface name purely as a printing hint.
//! Equality ignores the hints, so alpha-equivalent terms compare equal.
//! Terms handed to the public API are locally closed (every index points
//! at an enclosing binder), which makes grafting under binders safe
//! without index shifting.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

pub const DEFAULT_FUEL: u64 = 10_000;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum LambdaTerm {
    Free(String),
    Bound(usize),
    Abs(String, Box<LambdaTerm>),
    App(Box<LambdaTerm>, Box<LambdaTerm>),
}

impl PartialEq for LambdaTerm {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (LambdaTerm::Free(a), LambdaTerm::Free(b)) => a == b,
            (LambdaTerm::Bound(i), LambdaTerm::Bound(j)) => i == j,
            // binder hints are presentation only
            (LambdaTerm::Abs(_, a), LambdaTerm::Abs(_, b)) => a == b,
            (LambdaTerm::App(f, a), LambdaTerm::App(g, b)) => f == g && a == b,
            _ => false,
        }
    }
}

impl Eq for LambdaTerm {}

impl std::hash::Hash for LambdaTerm {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        match self {
            LambdaTerm::Free(a) => {
                0u8.hash(state);
                a.hash(state);
            }
            LambdaTerm::Bound(i) => {
                1u8.hash(state);
                i.hash(state);
            }
            LambdaTerm::Abs(_, b) => {
                2u8.hash(state);
                b.hash(state);
            }
            LambdaTerm::App(f, a) => {
                3u8.hash(state);
                f.hash(state);
                a.hash(state);
            }
        }
    }
}

impl LambdaTerm {
    pub fn free(name: impl Into<String>) -> LambdaTerm {
        LambdaTerm::Free(name.into())
    }

    pub fn abs(hint: impl Into<String>, body: LambdaTerm) -> LambdaTerm {
        LambdaTerm::Abs(hint.into(), Box::new(body))
    }

    pub fn app(fun: LambdaTerm, arg: LambdaTerm) -> LambdaTerm {
        LambdaTerm::App(Box::new(fun), Box::new(arg))
    }

    /// Binds every free occurrence of `name`, producing an abstraction.
    pub fn bind(name: &str, body: LambdaTerm) -> LambdaTerm {
        LambdaTerm::abs(name, close(body, name, 0))
    }

    pub fn size(&self) -> usize {
        match self {
            LambdaTerm::Free(_) | LambdaTerm::Bound(_) => 1,
            LambdaTerm::Abs(_, b) => 1 + b.size(),
            LambdaTerm::App(f, a) => 1 + f.size() + a.size(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        fn go(t: &LambdaTerm, out: &mut BTreeSet<String>) {
            match t {
                LambdaTerm::Free(x) => {
                    out.insert(x.clone());
                }
                LambdaTerm::Bound(_) => {}
                LambdaTerm::Abs(_, b) => go(b, out),
                LambdaTerm::App(f, a) => {
                    go(f, out);
                    go(a, out);
                }
            }
        }
        go(self, &mut out);
        out
    }

    fn uses_index(&self, k: usize) -> bool {
        match self {
            LambdaTerm::Free(_) => false,
            LambdaTerm::Bound(i) => *i == k,
            LambdaTerm::Abs(_, b) => b.uses_index(k + 1),
            LambdaTerm::App(f, a) => f.uses_index(k) || a.uses_index(k),
        }
    }
}

fn close(t: LambdaTerm, name: &str, depth: usize) -> LambdaTerm {
    match t {
        LambdaTerm::Free(x) if x == name => LambdaTerm::Bound(depth),
        v @ LambdaTerm::Free(_) => v,
        v @ LambdaTerm::Bound(_) => v,
        LambdaTerm::Abs(h, b) => LambdaTerm::Abs(h, Box::new(close(*b, name, depth + 1))),
        LambdaTerm::App(f, a) => LambdaTerm::App(
            Box::new(close(*f, name, depth)),
            Box::new(close(*a, name, depth)),
        ),
    }
}

/// Increments every loose index (>= cutoff) by `by`; used when an
/// argument with indices pointing at enclosing binders is grafted under
/// additional binders.
fn shift_loose(t: &LambdaTerm, by: usize, cutoff: usize) -> LambdaTerm {
    match t {
        LambdaTerm::Free(x) => LambdaTerm::Free(x.clone()),
        LambdaTerm::Bound(i) => {
            if *i >= cutoff {
                LambdaTerm::Bound(i + by)
            } else {
                LambdaTerm::Bound(*i)
            }
        }
        LambdaTerm::Abs(h, b) => LambdaTerm::Abs(h.clone(), Box::new(shift_loose(b, by, cutoff + 1))),
        LambdaTerm::App(f, a) => LambdaTerm::App(
            Box::new(shift_loose(f, by, cutoff)),
            Box::new(shift_loose(a, by, cutoff)),
        ),
    }
}

/// Replaces index `depth` by `arg` (shifted past the binders it crosses)
/// and pulls the outer indices down by one: exactly stripping a binder.
fn open(t: &LambdaTerm, depth: usize, arg: &LambdaTerm) -> LambdaTerm {
    match t {
        LambdaTerm::Free(x) => LambdaTerm::Free(x.clone()),
        LambdaTerm::Bound(i) => {
            if *i == depth {
                shift_loose(arg, depth, 0)
            } else if *i > depth {
                LambdaTerm::Bound(i - 1)
            } else {
                LambdaTerm::Bound(*i)
            }
        }
        LambdaTerm::Abs(h, b) => LambdaTerm::Abs(h.clone(), Box::new(open(b, depth + 1, arg))),
        LambdaTerm::App(f, a) => LambdaTerm::App(
            Box::new(open(f, depth, arg)),
            Box::new(open(a, depth, arg)),
        ),
    }
}

/// Opens the body of an abstraction with `arg`: the beta contractum.
pub fn open_with(body: &LambdaTerm, arg: &LambdaTerm) -> LambdaTerm {
    open(body, 0, arg)
}

/// Capture-avoiding substitution of `arg` for the free variable `x`.
pub fn subst_l(body: &LambdaTerm, x: &str, arg: &LambdaTerm) -> LambdaTerm {
    match body {
        LambdaTerm::Free(y) if y == x => arg.clone(),
        LambdaTerm::Free(y) => LambdaTerm::Free(y.clone()),
        LambdaTerm::Bound(i) => LambdaTerm::Bound(*i),
        LambdaTerm::Abs(h, b) => LambdaTerm::Abs(h.clone(), Box::new(subst_l(b, x, arg))),
        LambdaTerm::App(f, a) => LambdaTerm::App(
            Box::new(subst_l(f, x, arg)),
            Box::new(subst_l(a, x, arg)),
        ),
    }
}

/// Alpha-equality, which on this representation is plain equality.
pub fn alpha_eq(m: &LambdaTerm, n: &LambdaTerm) -> bool {
    m == n
}

/// Which conversions a normalization pass may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormMode {
    Beta,
    BetaEta,
}

/// Drops an unused binder: `\x. f x` to `f` when index 0 is unused in `f`.
fn eta_strip(f: &LambdaTerm) -> LambdaTerm {
    open(f, 0, &LambdaTerm::Free("#eta".into()))
}

/// One leftmost-outermost reduction step, `None` on normal forms.
fn reduce_once(t: &LambdaTerm, eta: bool) -> Option<LambdaTerm> {
    if let LambdaTerm::App(f, a) = t {
        if let LambdaTerm::Abs(_, body) = f.as_ref() {
            return Some(open_with(body, a));
        }
        if let Some(f2) = reduce_once(f, eta) {
            return Some(LambdaTerm::app(f2, a.as_ref().clone()));
        }
        if let Some(a2) = reduce_once(a, eta) {
            return Some(LambdaTerm::app(f.as_ref().clone(), a2));
        }
        return None;
    }
    if let LambdaTerm::Abs(h, body) = t {
        if eta {
            if let LambdaTerm::App(f, arg) = body.as_ref() {
                if matches!(arg.as_ref(), LambdaTerm::Bound(0)) && !f.uses_index(0) {
                    return Some(eta_strip(f));
                }
            }
        }
        if let Some(b2) = reduce_once(body, eta) {
            return Some(LambdaTerm::Abs(h.clone(), Box::new(b2)));
        }
        return None;
    }
    None
}

/// Leftmost-outermost normalization. Returns the normal form when it is
/// reached within `fuel` steps, `None` on fuel exhaustion. Exhaustion is
/// never a divergence proof.
pub fn normalize(m: &LambdaTerm, mode: NormMode, fuel: u64) -> Option<LambdaTerm> {
    let eta = mode == NormMode::BetaEta;
    let mut cur = m.clone();
    let mut left = fuel;
    loop {
        match reduce_once(&cur, eta) {
            None => return Some(cur),
            Some(next) => {
                if left == 0 {
                    return None;
                }
                left -= 1;
                cur = next;
            }
        }
    }
}

/// Equivalence relations usable as the strong-pair side condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rel {
    /// syntactic identity modulo alpha
    Syn,
    Beta,
    BetaEta,
}

impl Rel {
    pub const ALL: [Rel; 3] = [Rel::Syn, Rel::Beta, Rel::BetaEta];

    pub fn parse(s: &str) -> Option<Rel> {
        match s.to_ascii_lowercase().as_str() {
            "syn" => Some(Rel::Syn),
            "beta" => Some(Rel::Beta),
            "betaeta" => Some(Rel::BetaEta),
            _ => None,
        }
    }
}

/// syn below beta below betaEta.
pub fn rel_leq(r1: Rel, r2: Rel) -> bool {
    fn rank(r: Rel) -> u8 {
        match r {
            Rel::Syn => 0,
            Rel::Beta => 1,
            Rel::BetaEta => 2,
        }
    }
    rank(r1) <= rank(r2)
}

impl std::fmt::Display for Rel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Rel::Syn => "syn",
            Rel::Beta => "beta",
            Rel::BetaEta => "betaeta",
        };
        f.write_str(s)
    }
}

/// Verdict of a relation check. `Unknown` only arises for the conversion
/// relations, when normalization runs out of fuel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RelVerdict {
    Holds,
    Fails,
    Unknown { fuel: u64 },
}

/// Decides (semi-decides, for the conversion relations) `m R n`.
pub fn rel_check(r: Rel, m: &LambdaTerm, n: &LambdaTerm, fuel: u64) -> RelVerdict {
    if alpha_eq(m, n) {
        return RelVerdict::Holds;
    }
    let mode = match r {
        Rel::Syn => return RelVerdict::Fails,
        Rel::Beta => NormMode::Beta,
        Rel::BetaEta => NormMode::BetaEta,
    };
    match (normalize(m, mode, fuel), normalize(n, mode, fuel)) {
        (Some(nm), Some(nn)) => {
            if alpha_eq(&nm, &nn) {
                RelVerdict::Holds
            } else {
                RelVerdict::Fails
            }
        }
        _ => RelVerdict::Unknown { fuel },
    }
}
