//! One-step and multistep reduction: beta, the two projections, and eta,
//! under the plain contextual closure, the synchronous closure (which
//! steps both components of a strong pair together and re-checks that
//! their essences agree), and the parallel closure with its complete
//! development.
//!
//! Constant indices are opaque: no redex inside `u[t]` is ever reported
//! or contracted, even though substitution propagates into them. A
//! coerced abstraction is not a redex either: `(\x:s. t)^s u` is stuck.

use crate::lambda;
use crate::term::{essence, open_with, Proj, Term};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RedexKind {
    Beta,
    Proj1,
    Proj2,
    Eta,
}

impl fmt::Display for RedexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RedexKind::Beta => "beta",
            RedexKind::Proj1 => "pr1",
            RedexKind::Proj2 => "pr2",
            RedexKind::Eta => "eta",
        };
        f.write_str(s)
    }
}

/// Child selectors for stable paths into a term. Paths never address the
/// inside of a constant index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PathStep {
    AbsBody,
    AppFun,
    AppArg,
    PairLeft,
    PairRight,
    ProjBody,
    CoerceBody,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Position(pub Vec<PathStep>);

impl Position {
    pub fn root() -> Position {
        Position(Vec::new())
    }

    pub fn child(&self, step: PathStep) -> Position {
        let mut v = self.0.clone();
        v.push(step);
        Position(v)
    }

    pub fn starts_with(&self, prefix: &Position) -> bool {
        self.0.len() >= prefix.0.len() && self.0[..prefix.0.len()] == prefix.0[..]
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("@");
        }
        for s in &self.0 {
            let c = match s {
                PathStep::AbsBody => 'b',
                PathStep::AppFun => 'f',
                PathStep::AppArg => 'a',
                PathStep::PairLeft => 'l',
                PathStep::PairRight => 'r',
                PathStep::ProjBody => 'p',
                PathStep::CoerceBody => 'c',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReduceError {
    #[error("no {kind} redex at position {at}")]
    InvalidPosition { at: Position, kind: RedexKind },
    #[error("invalid parallel choice at position {at}")]
    InvalidChoice { at: Position },
    #[error("synchronous reduction stuck on the pair at {at}")]
    SyncViolation { at: Position },
}

/// What kind of redex, if any, sits at the root of `t`.
fn redex_at(t: &Term) -> Option<RedexKind> {
    match t {
        Term::App(f, _) if matches!(f.as_ref(), Term::Abs(..)) => Some(RedexKind::Beta),
        Term::Proj(p, body) if matches!(body.as_ref(), Term::Pair(..)) => Some(match p {
            Proj::Fst => RedexKind::Proj1,
            Proj::Snd => RedexKind::Proj2,
        }),
        Term::Abs(_, _, body) => match body.as_ref() {
            Term::App(f, arg)
                if matches!(arg.as_ref(), Term::Bound(0)) && !f.uses_index(0) =>
            {
                Some(RedexKind::Eta)
            }
            _ => None,
        },
        _ => None,
    }
}

/// All redex occurrences of the requested kinds, pre-order (leftmost
/// outermost first), skipping constant indices.
pub fn redexes(t: &Term, kinds: &BTreeSet<RedexKind>) -> Vec<(Position, RedexKind)> {
    let mut out = Vec::new();
    fn walk(
        t: &Term,
        here: Position,
        kinds: &BTreeSet<RedexKind>,
        out: &mut Vec<(Position, RedexKind)>,
    ) {
        if let Some(k) = redex_at(t) {
            if kinds.contains(&k) {
                out.push((here.clone(), k));
            }
        }
        match t {
            Term::Free(_) | Term::Bound(_) | Term::UConst(_) => {}
            Term::Abs(_, _, b) => walk(b, here.child(PathStep::AbsBody), kinds, out),
            Term::App(f, a) => {
                walk(f, here.child(PathStep::AppFun), kinds, out);
                walk(a, here.child(PathStep::AppArg), kinds, out);
            }
            Term::Pair(l, r) => {
                walk(l, here.child(PathStep::PairLeft), kinds, out);
                walk(r, here.child(PathStep::PairRight), kinds, out);
            }
            Term::Proj(_, b) => walk(b, here.child(PathStep::ProjBody), kinds, out),
            Term::Coerce(b, _) => walk(b, here.child(PathStep::CoerceBody), kinds, out),
        }
    }
    walk(t, Position::root(), kinds, &mut out);
    out
}

pub fn all_redex_kinds() -> BTreeSet<RedexKind> {
    [RedexKind::Beta, RedexKind::Proj1, RedexKind::Proj2]
        .into_iter()
        .collect()
}

pub fn all_redex_kinds_eta() -> BTreeSet<RedexKind> {
    [
        RedexKind::Beta,
        RedexKind::Proj1,
        RedexKind::Proj2,
        RedexKind::Eta,
    ]
    .into_iter()
    .collect()
}

fn contract(t: &Term, kind: RedexKind) -> Option<Term> {
    match (kind, t) {
        (RedexKind::Beta, Term::App(f, a)) => match f.as_ref() {
            Term::Abs(_, _, body) => Some(open_with(body, a)),
            _ => None,
        },
        (RedexKind::Proj1, Term::Proj(Proj::Fst, b)) => match b.as_ref() {
            Term::Pair(l, _) => Some(l.as_ref().clone()),
            _ => None,
        },
        (RedexKind::Proj2, Term::Proj(Proj::Snd, b)) => match b.as_ref() {
            Term::Pair(_, r) => Some(r.as_ref().clone()),
            _ => None,
        },
        (RedexKind::Eta, Term::Abs(_, _, body)) => match body.as_ref() {
            Term::App(f, arg)
                if matches!(arg.as_ref(), Term::Bound(0)) && !f.uses_index(0) =>
            {
                // strip the binder: indices above it shift down
                Some(open_with(f, &Term::free("#eta")))
            }
            _ => None,
        },
        _ => None,
    }
}

fn replace_at(t: &Term, at: &[PathStep], with: &dyn Fn(&Term) -> Option<Term>) -> Option<Term> {
    match at.split_first() {
        None => with(t),
        Some((step, rest)) => match (step, t) {
            (PathStep::AbsBody, Term::Abs(h, ty, b)) => Some(Term::Abs(
                h.clone(),
                ty.clone(),
                Box::new(replace_at(b, rest, with)?),
            )),
            (PathStep::AppFun, Term::App(f, a)) => Some(Term::App(
                Box::new(replace_at(f, rest, with)?),
                a.clone(),
            )),
            (PathStep::AppArg, Term::App(f, a)) => Some(Term::App(
                f.clone(),
                Box::new(replace_at(a, rest, with)?),
            )),
            (PathStep::PairLeft, Term::Pair(l, r)) => Some(Term::Pair(
                Box::new(replace_at(l, rest, with)?),
                r.clone(),
            )),
            (PathStep::PairRight, Term::Pair(l, r)) => Some(Term::Pair(
                l.clone(),
                Box::new(replace_at(r, rest, with)?),
            )),
            (PathStep::ProjBody, Term::Proj(p, b)) => {
                Some(Term::Proj(*p, Box::new(replace_at(b, rest, with)?)))
            }
            (PathStep::CoerceBody, Term::Coerce(b, ty)) => Some(Term::Coerce(
                Box::new(replace_at(b, rest, with)?),
                ty.clone(),
            )),
            _ => None,
        },
    }
}

fn subterm_at<'a>(t: &'a Term, at: &[PathStep]) -> Option<&'a Term> {
    match at.split_first() {
        None => Some(t),
        Some((step, rest)) => match (step, t) {
            (PathStep::AbsBody, Term::Abs(_, _, b)) => subterm_at(b, rest),
            (PathStep::AppFun, Term::App(f, _)) => subterm_at(f, rest),
            (PathStep::AppArg, Term::App(_, a)) => subterm_at(a, rest),
            (PathStep::PairLeft, Term::Pair(l, _)) => subterm_at(l, rest),
            (PathStep::PairRight, Term::Pair(_, r)) => subterm_at(r, rest),
            (PathStep::ProjBody, Term::Proj(_, b)) => subterm_at(b, rest),
            (PathStep::CoerceBody, Term::Coerce(b, _)) => subterm_at(b, rest),
            _ => None,
        },
    }
}

/// Contracts the redex of the given kind at the given position. The redex
/// is re-validated at the path.
pub fn step(t: &Term, at: &Position, kind: RedexKind) -> Result<Term, ReduceError> {
    replace_at(t, &at.0, &|sub| contract(sub, kind)).ok_or(ReduceError::InvalidPosition {
        at: at.clone(),
        kind,
    })
}

/// Steps both components of a strong pair at once. The two selections
/// must address redexes in the left and right component of a common pair;
/// the step is returned only when the reduced components still have
/// alpha-equal essences, `None` when the pair would desynchronize.
pub fn step_sync(
    t: &Term,
    left_sel: (&Position, RedexKind),
    right_sel: (&Position, RedexKind),
) -> Result<Option<Term>, ReduceError> {
    let (lpos, lkind) = left_sel;
    let (rpos, rkind) = right_sel;
    let common: usize = lpos
        .0
        .iter()
        .zip(rpos.0.iter())
        .take_while(|(a, b)| a == b)
        .count();
    let prefix = Position(lpos.0[..common].to_vec());
    let l_rest = &lpos.0[common..];
    let r_rest = &rpos.0[common..];
    let pair_ok = matches!(
        subterm_at(t, &prefix.0),
        Some(Term::Pair(..))
    ) && l_rest.first() == Some(&PathStep::PairLeft)
        && r_rest.first() == Some(&PathStep::PairRight);
    if !pair_ok {
        return Err(ReduceError::InvalidPosition {
            at: lpos.clone(),
            kind: lkind,
        });
    }
    let stepped = step(t, lpos, lkind)?;
    let stepped = step(&stepped, rpos, rkind)?;
    match subterm_at(&stepped, &prefix.0) {
        Some(Term::Pair(l, r)) if essence(l) == essence(r) => Ok(Some(stepped)),
        Some(Term::Pair(..)) => Ok(None),
        _ => unreachable!("pair survives stepping inside its components"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Closure {
    /// ordinary contextual closure
    Plain,
    /// synchronous closure: strong-pair components step together
    Sync,
}

#[derive(Debug, Clone)]
pub struct NormalizeOpts {
    pub closure: Closure,
    pub fuel: u64,
    /// eta steps are off by default and enabled per call
    pub eta: bool,
}

impl Default for NormalizeOpts {
    fn default() -> Self {
        NormalizeOpts {
            closure: Closure::Plain,
            fuel: lambda::DEFAULT_FUEL,
            eta: false,
        }
    }
}

/// One record per contraction, for traces: position, kind, and the whole
/// term after the step. A synchronous pair step emits two records that
/// share the resulting term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRecord {
    pub position: Position,
    pub kind: RedexKind,
    pub term: Term,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalizeOutcome {
    Normal(Term),
    /// fuel ran out; never a divergence proof
    Exhausted,
}

/// First redex not under any strong pair, pre-order.
fn first_free_redex(t: &Term, kinds: &BTreeSet<RedexKind>) -> Option<(Position, RedexKind)> {
    fn walk(t: &Term, here: Position, kinds: &BTreeSet<RedexKind>) -> Option<(Position, RedexKind)> {
        if let Some(k) = redex_at(t) {
            if kinds.contains(&k) {
                return Some((here, k));
            }
        }
        match t {
            Term::Free(_) | Term::Bound(_) | Term::UConst(_) | Term::Pair(..) => None,
            Term::Abs(_, _, b) => walk(b, here.child(PathStep::AbsBody), kinds),
            Term::App(f, a) => walk(f, here.child(PathStep::AppFun), kinds)
                .or_else(|| walk(a, here.child(PathStep::AppArg), kinds)),
            Term::Proj(_, b) => walk(b, here.child(PathStep::ProjBody), kinds),
            Term::Coerce(b, _) => walk(b, here.child(PathStep::CoerceBody), kinds),
        }
    }
    walk(t, Position::root(), kinds)
}

/// Outermost pair that still contains redexes, pre-order.
fn first_reducible_pair(t: &Term, kinds: &BTreeSet<RedexKind>) -> Option<Position> {
    fn walk(t: &Term, here: Position, kinds: &BTreeSet<RedexKind>) -> Option<Position> {
        match t {
            Term::Pair(l, r) => {
                if !redexes(l, kinds).is_empty() || !redexes(r, kinds).is_empty() {
                    Some(here)
                } else {
                    None
                }
            }
            Term::Free(_) | Term::Bound(_) | Term::UConst(_) => None,
            Term::Abs(_, _, b) => walk(b, here.child(PathStep::AbsBody), kinds),
            Term::App(f, a) => walk(f, here.child(PathStep::AppFun), kinds)
                .or_else(|| walk(a, here.child(PathStep::AppArg), kinds)),
            Term::Proj(_, b) => walk(b, here.child(PathStep::ProjBody), kinds),
            Term::Coerce(b, _) => walk(b, here.child(PathStep::CoerceBody), kinds),
        }
    }
    walk(t, Position::root(), kinds)
}

/// One step of the synchronous closure: the leftmost redex outside any
/// pair when there is one, otherwise a synchronized step of the leftmost
/// outermost reducible pair, recursively: every pair along the way must
/// step in both components and keep its component essences aligned.
/// `Ok(None)` means the term is normal for this closure.
fn sync_step_once(
    t: &Term,
    here: &Position,
    kinds: &BTreeSet<RedexKind>,
) -> Result<Option<(Term, Vec<(Position, RedexKind)>)>, ReduceError> {
    if let Some((pos, kind)) = first_free_redex(t, kinds) {
        let stepped = step(t, &pos, kind)?;
        let mut abs = here.clone();
        abs.0.extend(pos.0);
        return Ok(Some((stepped, vec![(abs, kind)])));
    }
    let Some(pair_pos) = first_reducible_pair(t, kinds) else {
        return Ok(None);
    };
    let Some(Term::Pair(l, r)) = subterm_at(t, &pair_pos.0) else {
        unreachable!("first_reducible_pair returns pair positions");
    };
    let mut at_pair = here.clone();
    at_pair.0.extend(pair_pos.0.clone());
    let left = sync_step_once(l, &at_pair.child(PathStep::PairLeft), kinds)?;
    let right = sync_step_once(r, &at_pair.child(PathStep::PairRight), kinds)?;
    let (Some((l2, mut recs)), Some((r2, rrecs))) = (left, right) else {
        return Err(ReduceError::SyncViolation { at: at_pair });
    };
    if essence(&l2) != essence(&r2) {
        return Err(ReduceError::SyncViolation { at: at_pair });
    }
    let replaced = replace_at(t, &pair_pos.0, &|_| {
        Some(Term::Pair(Box::new(l2.clone()), Box::new(r2.clone())))
    })
    .expect("pair position is valid");
    recs.extend(rrecs);
    Ok(Some((replaced, recs)))
}

/// Multistep reduction to normal form under the chosen closure.
///
/// Plain mode contracts the leftmost-outermost redex until none remain.
/// Sync mode does the same for redexes not under a strong pair; once only
/// pair-internal redexes remain it pairs the leftmost redex of each
/// component of the outermost reducible pair, steps both, and checks the
/// synchronization side condition. A reducible pair with a redex-free
/// component, or a pairing whose essences disagree after the step, is a
/// `SyncViolation`.
pub fn normalize_d(
    t: &Term,
    opts: &NormalizeOpts,
) -> Result<(NormalizeOutcome, Vec<StepRecord>), ReduceError> {
    let kinds = if opts.eta {
        all_redex_kinds_eta()
    } else {
        all_redex_kinds()
    };
    let mut cur = t.clone();
    let mut fuel = opts.fuel;
    let mut trace = Vec::new();
    loop {
        match opts.closure {
            Closure::Plain => {
                let found = redexes(&cur, &kinds).into_iter().next();
                match found {
                    None => return Ok((NormalizeOutcome::Normal(cur), trace)),
                    Some((pos, kind)) => {
                        if fuel == 0 {
                            return Ok((NormalizeOutcome::Exhausted, trace));
                        }
                        fuel -= 1;
                        cur = step(&cur, &pos, kind)?;
                        trace.push(StepRecord {
                            position: pos,
                            kind,
                            term: cur.clone(),
                        });
                    }
                }
            }
            Closure::Sync => {
                match sync_step_once(&cur, &Position::root(), &kinds)? {
                    None => return Ok((NormalizeOutcome::Normal(cur), trace)),
                    Some((next, recs)) => {
                        if fuel == 0 {
                            return Ok((NormalizeOutcome::Exhausted, trace));
                        }
                        fuel -= 1;
                        cur = next;
                        for (position, kind) in recs {
                            trace.push(StepRecord {
                                position,
                                kind,
                                term: cur.clone(),
                            });
                        }
                    }
                }
            }
        }
    }
}

/// One parallel step contracting exactly the selected redexes, nested
/// selections allowed: inner redexes are contracted before the node that
/// contains them, mirroring the development order. The empty selection is
/// the identity.
pub fn par_step(t: &Term, choice: &BTreeSet<Position>) -> Result<Term, ReduceError> {
    let legal: BTreeSet<Position> = redexes(t, &all_redex_kinds())
        .into_iter()
        .map(|(p, _)| p)
        .collect();
    if let Some(bad) = choice.iter().find(|p| !legal.contains(*p)) {
        return Err(ReduceError::InvalidChoice { at: bad.clone() });
    }
    Ok(par_rec(t, choice, &Position::root()))
}

fn par_rec(t: &Term, choice: &BTreeSet<Position>, here: &Position) -> Term {
    let selected = choice.contains(here);
    match t {
        Term::Free(_) | Term::Bound(_) | Term::UConst(_) => t.clone(),
        Term::Abs(h, ty, b) => {
            let b2 = par_rec(b, choice, &here.child(PathStep::AbsBody));
            Term::Abs(h.clone(), ty.clone(), Box::new(b2))
        }
        Term::App(f, a) => {
            let a2 = par_rec(a, choice, &here.child(PathStep::AppArg));
            if selected {
                // the function part is an abstraction; develop its body
                let Term::Abs(_, _, body) = f.as_ref() else {
                    unreachable!("validated beta redex");
                };
                let body2 = par_rec(
                    body,
                    choice,
                    &here.child(PathStep::AppFun).child(PathStep::AbsBody),
                );
                open_with(&body2, &a2)
            } else {
                let f2 = par_rec(f, choice, &here.child(PathStep::AppFun));
                Term::App(Box::new(f2), Box::new(a2))
            }
        }
        Term::Pair(l, r) => Term::Pair(
            Box::new(par_rec(l, choice, &here.child(PathStep::PairLeft))),
            Box::new(par_rec(r, choice, &here.child(PathStep::PairRight))),
        ),
        Term::Proj(p, b) => {
            if selected {
                let Term::Pair(l, r) = b.as_ref() else {
                    unreachable!("validated projection redex");
                };
                let inner = here.child(PathStep::ProjBody);
                match p {
                    Proj::Fst => par_rec(l, choice, &inner.child(PathStep::PairLeft)),
                    Proj::Snd => par_rec(r, choice, &inner.child(PathStep::PairRight)),
                }
            } else {
                Term::Proj(*p, Box::new(par_rec(b, choice, &here.child(PathStep::ProjBody))))
            }
        }
        Term::Coerce(b, ty) => Term::Coerce(
            Box::new(par_rec(b, choice, &here.child(PathStep::CoerceBody))),
            ty.clone(),
        ),
    }
}

/// The complete development: contracts every beta and projection redex
/// existing in the term simultaneously, leaving constant indices alone.
pub fn complete_dev(t: &Term) -> Term {
    match t {
        Term::Free(_) | Term::Bound(_) | Term::UConst(_) => t.clone(),
        Term::Abs(h, ty, b) => Term::Abs(h.clone(), ty.clone(), Box::new(complete_dev(b))),
        Term::App(f, a) => match f.as_ref() {
            Term::Abs(_, _, body) => open_with(&complete_dev(body), &complete_dev(a)),
            _ => Term::App(Box::new(complete_dev(f)), Box::new(complete_dev(a))),
        },
        Term::Pair(l, r) => Term::Pair(Box::new(complete_dev(l)), Box::new(complete_dev(r))),
        Term::Proj(p, b) => match b.as_ref() {
            Term::Pair(l, r) => match p {
                Proj::Fst => complete_dev(l),
                Proj::Snd => complete_dev(r),
            },
            _ => Term::Proj(*p, Box::new(complete_dev(b))),
        },
        Term::Coerce(b, ty) => Term::Coerce(Box::new(complete_dev(b)), ty.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ty::TypeExpr;

    fn a() -> TypeExpr {
        TypeExpr::atom("a")
    }
    fn x() -> Term {
        Term::free("x")
    }
    fn y() -> Term {
        Term::free("y")
    }
    fn idterm(ty: TypeExpr) -> Term {
        Term::bind("x", ty, x())
    }

    #[test]
    fn projection_redex_is_reported() {
        let t = Term::proj(Proj::Fst, Term::pair(x(), y()));
        let found = redexes(&t, &all_redex_kinds());
        assert_eq!(found, vec![(Position::root(), RedexKind::Proj1)]);
    }

    #[test]
    fn coerced_abstraction_is_not_a_redex() {
        let t = Term::app(Term::coerce(idterm(a()), a()), y());
        assert!(redexes(&t, &all_redex_kinds()).is_empty());
    }

    #[test]
    fn no_redexes_inside_constant_index() {
        let t = Term::uconst(Term::app(idterm(a()), y()));
        assert!(redexes(&t, &all_redex_kinds_eta()).is_empty());
    }

    #[test]
    fn beta_step_at_root() {
        let t = Term::app(idterm(a()), y());
        assert_eq!(step(&t, &Position::root(), RedexKind::Beta), Ok(y()));
    }

    #[test]
    fn proj2_step_at_root() {
        let t = Term::proj(Proj::Snd, Term::pair(y(), Term::free("z")));
        assert_eq!(
            step(&t, &Position::root(), RedexKind::Proj2),
            Ok(Term::free("z"))
        );
    }

    #[test]
    fn eta_step_at_root() {
        // \x:a. z x -> z
        let t = Term::bind("x", a(), Term::app(Term::free("z"), x()));
        assert_eq!(
            step(&t, &Position::root(), RedexKind::Eta),
            Ok(Term::free("z"))
        );
    }

    #[test]
    fn step_rejects_wrong_position() {
        let t = Term::app(idterm(a()), y());
        assert!(step(&t, &Position::root(), RedexKind::Proj1).is_err());
        assert!(step(&t, &Position(vec![PathStep::AppArg]), RedexKind::Beta).is_err());
    }

    fn sync_pair() -> Term {
        let redex = || Term::app(idterm(a()), y());
        Term::pair(redex(), redex())
    }

    #[test]
    fn sync_step_reduces_both_components() {
        let t = sync_pair();
        let l = (Position(vec![PathStep::PairLeft]), RedexKind::Beta);
        let r = (Position(vec![PathStep::PairRight]), RedexKind::Beta);
        let out = step_sync(&t, (&l.0, l.1), (&r.0, r.1)).unwrap();
        assert_eq!(out, Some(Term::pair(y(), y())));
    }

    #[test]
    fn plain_step_desynchronizes_where_sync_refuses() {
        let t = sync_pair();
        // a plain step on the left alone produces the asymmetric pair
        let asym = step(&t, &Position(vec![PathStep::PairLeft]), RedexKind::Beta).unwrap();
        assert_eq!(asym, Term::pair(y(), Term::app(idterm(a()), y())));
        assert!(!crate::term::is_synchronous(&asym));
        // and no sync selection can produce it: the only sync outcome is <y,y>
        let l = (Position(vec![PathStep::PairLeft]), RedexKind::Beta);
        let r = (Position(vec![PathStep::PairRight]), RedexKind::Beta);
        let out = step_sync(&t, (&l.0, l.1), (&r.0, r.1)).unwrap().unwrap();
        assert_ne!(out, asym);
    }

    #[test]
    fn sync_step_needs_redexes() {
        let t = Term::pair(idterm(a()), idterm(TypeExpr::atom("b")));
        let l = (Position(vec![PathStep::PairLeft]), RedexKind::Beta);
        let r = (Position(vec![PathStep::PairRight]), RedexKind::Beta);
        assert!(step_sync(&t, (&l.0, l.1), (&r.0, r.1)).is_err());
    }

    #[test]
    fn normalize_two_beta_steps() {
        // (\x:a.\y:b. x) u v -> u
        let inner = Term::bind("y", TypeExpr::atom("b"), x());
        let f = Term::bind("x", a(), inner);
        let t = Term::app(Term::app(f, Term::free("u")), Term::free("v"));
        let (out, trace) = normalize_d(&t, &NormalizeOpts::default()).unwrap();
        assert_eq!(out, NormalizeOutcome::Normal(Term::free("u")));
        assert_eq!(trace.len(), 2);
    }

    #[test]
    fn sync_normalize_projects_then_reduces() {
        let t = Term::proj(Proj::Fst, sync_pair());
        let opts = NormalizeOpts {
            closure: Closure::Sync,
            ..Default::default()
        };
        let (out, _) = normalize_d(&t, &opts).unwrap();
        assert_eq!(out, NormalizeOutcome::Normal(y()));
        // agrees with plain mode
        let (plain, _) = normalize_d(&t, &NormalizeOpts::default()).unwrap();
        assert_eq!(plain, NormalizeOutcome::Normal(y()));
    }

    #[test]
    fn sync_normalize_steps_nested_pairs_on_all_sides() {
        // <<r, r>, <r, r>> with r = (\x:a. x) y: one synchronous step
        // must contract all four redexes, keeping the inner pairs aligned
        let r = || Term::app(idterm(a()), y());
        let inner = || Term::pair(r(), r());
        let t = Term::pair(inner(), inner());
        assert!(crate::term::is_synchronous(&t));
        let opts = NormalizeOpts {
            closure: Closure::Sync,
            ..Default::default()
        };
        let (out, trace) = normalize_d(&t, &opts).unwrap();
        let settled = Term::pair(Term::pair(y(), y()), Term::pair(y(), y()));
        assert_eq!(out, NormalizeOutcome::Normal(settled));
        assert_eq!(trace.len(), 4);
        for rec in &trace {
            assert!(crate::term::is_synchronous(&rec.term), "at {}", rec.position);
        }
    }

    #[test]
    fn sync_normalize_rejects_one_sided_pair() {
        let t = Term::pair(Term::app(idterm(a()), y()), y());
        let opts = NormalizeOpts {
            closure: Closure::Sync,
            ..Default::default()
        };
        assert!(matches!(
            normalize_d(&t, &opts),
            Err(ReduceError::SyncViolation { .. })
        ));
    }

    #[test]
    fn self_application_freezes_after_one_step() {
        // (\x:omega. x^(omega->omega) x) ((\x:omega. x^(omega->omega) x) ^ omega)
        // has a looping skeleton, but the annotated term normalizes: the
        // one beta step leaves a coerced abstraction at the head, which
        // is not a redex.
        let oo = TypeExpr::arrow(TypeExpr::Omega, TypeExpr::Omega);
        let half = Term::bind(
            "x",
            TypeExpr::Omega,
            Term::app(Term::coerce(x(), oo), x()),
        );
        let t = Term::app(half.clone(), Term::coerce(half, TypeExpr::Omega));
        let (out, trace) = normalize_d(&t, &NormalizeOpts::default()).unwrap();
        assert_eq!(trace.len(), 1);
        match out {
            NormalizeOutcome::Normal(nf) => {
                assert!(redexes(&nf, &all_redex_kinds_eta()).is_empty());
            }
            other => panic!("expected a normal form, got {other:?}"),
        }
        // the skeleton of the original term does diverge
        assert_eq!(
            crate::lambda::normalize(
                &crate::term::essence(&t),
                crate::lambda::NormMode::Beta,
                500
            ),
            None
        );
    }

    #[test]
    fn par_step_contracts_selected_redexes() {
        // (\x:a. x) ((\y:a. y) z) with both redexes selected goes to z
        let inner = Term::app(Term::bind("y", a(), y()), Term::free("z"));
        let t = Term::app(idterm(a()), inner);
        let all: BTreeSet<Position> = redexes(&t, &all_redex_kinds())
            .into_iter()
            .map(|(p, _)| p)
            .collect();
        assert_eq!(all.len(), 2);
        assert_eq!(par_step(&t, &all), Ok(Term::free("z")));
    }

    #[test]
    fn par_step_partial_selection() {
        // pr1 <(\x:a. x) y, w> contracting only the projection
        let t = Term::proj(
            Proj::Fst,
            Term::pair(Term::app(idterm(a()), y()), Term::free("w")),
        );
        let only_proj: BTreeSet<Position> = [Position::root()].into();
        assert_eq!(par_step(&t, &only_proj), Ok(Term::app(idterm(a()), y())));
    }

    #[test]
    fn par_step_empty_choice_is_identity() {
        let t = Term::app(idterm(a()), y());
        assert_eq!(par_step(&t, &BTreeSet::new()), Ok(t));
    }

    #[test]
    fn par_step_rejects_non_redex_positions() {
        let t = Term::app(idterm(a()), y());
        let bad: BTreeSet<Position> = [Position(vec![PathStep::AppArg])].into();
        assert!(matches!(
            par_step(&t, &bad),
            Err(ReduceError::InvalidChoice { .. })
        ));
    }

    #[test]
    fn complete_dev_examples() {
        let t = Term::app(idterm(a()), y());
        assert_eq!(complete_dev(&t), y());

        let t2 = Term::proj(Proj::Fst, Term::pair(x(), y()));
        assert_eq!(complete_dev(&t2), x());

        let t3 = Term::app(x(), y());
        assert_eq!(complete_dev(&t3), t3);
    }

    #[test]
    fn complete_dev_equals_par_step_on_all_redexes() {
        let inner = Term::app(Term::bind("y", a(), y()), Term::free("z"));
        let t = Term::app(idterm(a()), Term::pair(inner.clone(), inner));
        let all: BTreeSet<Position> = redexes(&t, &all_redex_kinds())
            .into_iter()
            .map(|(p, _)| p)
            .collect();
        assert_eq!(par_step(&t, &all), Ok(complete_dev(&t)));
    }
}
