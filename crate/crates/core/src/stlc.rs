//! Simply typed lambda calculus with pairs: the target of the forgetful
//! embedding behind the strong-normalization argument. It has a single
//! base type, one constant of the base type, and a family of constants
//! `c_s : s` materialized on demand, one per coercion image.

use crate::term::{open_free, Proj, Term};
use crate::ty::TypeExpr;
use crate::typing::{derivation_with_fuel, Basis, SystemId, TypingError};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SimpleType {
    Base,
    SArrow(Box<SimpleType>, Box<SimpleType>),
    SProd(Box<SimpleType>, Box<SimpleType>),
}

impl SimpleType {
    pub fn arrow(dom: SimpleType, cod: SimpleType) -> SimpleType {
        SimpleType::SArrow(Box::new(dom), Box::new(cod))
    }

    pub fn prod(l: SimpleType, r: SimpleType) -> SimpleType {
        SimpleType::SProd(Box::new(l), Box::new(r))
    }
}

impl fmt::Display for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimpleType::Base => f.write_str("o"),
            SimpleType::SArrow(l, r) => {
                if matches!(l.as_ref(), SimpleType::SArrow(..)) {
                    write!(f, "({l}) -> {r}")
                } else {
                    write!(f, "{l} -> {r}")
                }
            }
            SimpleType::SProd(l, r) => {
                let wrap = |t: &SimpleType| !matches!(t, SimpleType::Base);
                match (wrap(l), wrap(r)) {
                    (true, true) => write!(f, "({l}) x ({r})"),
                    (true, false) => write!(f, "({l}) x {r}"),
                    (false, true) => write!(f, "{l} x ({r})"),
                    (false, false) => write!(f, "{l} x {r}"),
                }
            }
        }
    }
}

/// Church-style target terms. `ConstU` is the distinguished constant of
/// the base type; `ConstC` carries its exact type.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum StlcTerm {
    Free(String),
    Bound(usize),
    Abs(String, SimpleType, Box<StlcTerm>),
    App(Box<StlcTerm>, Box<StlcTerm>),
    Pair(Box<StlcTerm>, Box<StlcTerm>),
    Proj(Proj, Box<StlcTerm>),
    ConstU,
    ConstC(SimpleType),
}

impl PartialEq for StlcTerm {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (StlcTerm::Free(a), StlcTerm::Free(b)) => a == b,
            (StlcTerm::Bound(i), StlcTerm::Bound(j)) => i == j,
            (StlcTerm::Abs(_, s, a), StlcTerm::Abs(_, t, b)) => s == t && a == b,
            (StlcTerm::App(f, a), StlcTerm::App(g, b)) => f == g && a == b,
            (StlcTerm::Pair(l, r), StlcTerm::Pair(l2, r2)) => l == l2 && r == r2,
            (StlcTerm::Proj(i, a), StlcTerm::Proj(j, b)) => i == j && a == b,
            (StlcTerm::ConstU, StlcTerm::ConstU) => true,
            (StlcTerm::ConstC(s), StlcTerm::ConstC(t)) => s == t,
            _ => false,
        }
    }
}

impl Eq for StlcTerm {}

impl StlcTerm {
    pub fn app(f: StlcTerm, a: StlcTerm) -> StlcTerm {
        StlcTerm::App(Box::new(f), Box::new(a))
    }

    pub fn pair(l: StlcTerm, r: StlcTerm) -> StlcTerm {
        StlcTerm::Pair(Box::new(l), Box::new(r))
    }

    pub fn bind(name: &str, annot: SimpleType, body: StlcTerm) -> StlcTerm {
        StlcTerm::Abs(name.to_owned(), annot, Box::new(close(body, name, 0)))
    }
}

fn close(t: StlcTerm, name: &str, depth: usize) -> StlcTerm {
    match t {
        StlcTerm::Free(x) if x == name => StlcTerm::Bound(depth),
        v @ (StlcTerm::Free(_) | StlcTerm::Bound(_) | StlcTerm::ConstU | StlcTerm::ConstC(_)) => v,
        StlcTerm::Abs(h, ty, b) => StlcTerm::Abs(h, ty, Box::new(close(*b, name, depth + 1))),
        StlcTerm::App(f, a) => StlcTerm::App(
            Box::new(close(*f, name, depth)),
            Box::new(close(*a, name, depth)),
        ),
        StlcTerm::Pair(l, r) => StlcTerm::Pair(
            Box::new(close(*l, name, depth)),
            Box::new(close(*r, name, depth)),
        ),
        StlcTerm::Proj(p, b) => StlcTerm::Proj(p, Box::new(close(*b, name, depth))),
    }
}

fn shift_loose(t: &StlcTerm, by: usize, cutoff: usize) -> StlcTerm {
    match t {
        StlcTerm::Free(x) => StlcTerm::Free(x.clone()),
        StlcTerm::Bound(i) => {
            if *i >= cutoff {
                StlcTerm::Bound(i + by)
            } else {
                StlcTerm::Bound(*i)
            }
        }
        StlcTerm::ConstU => StlcTerm::ConstU,
        StlcTerm::ConstC(s) => StlcTerm::ConstC(s.clone()),
        StlcTerm::Abs(h, ty, b) => {
            StlcTerm::Abs(h.clone(), ty.clone(), Box::new(shift_loose(b, by, cutoff + 1)))
        }
        StlcTerm::App(f, a) => StlcTerm::App(
            Box::new(shift_loose(f, by, cutoff)),
            Box::new(shift_loose(a, by, cutoff)),
        ),
        StlcTerm::Pair(l, r) => StlcTerm::Pair(
            Box::new(shift_loose(l, by, cutoff)),
            Box::new(shift_loose(r, by, cutoff)),
        ),
        StlcTerm::Proj(p, b) => StlcTerm::Proj(*p, Box::new(shift_loose(b, by, cutoff))),
    }
}

fn open(t: &StlcTerm, depth: usize, arg: &StlcTerm) -> StlcTerm {
    match t {
        StlcTerm::Free(x) => StlcTerm::Free(x.clone()),
        StlcTerm::Bound(i) => {
            if *i == depth {
                shift_loose(arg, depth, 0)
            } else if *i > depth {
                StlcTerm::Bound(i - 1)
            } else {
                StlcTerm::Bound(*i)
            }
        }
        StlcTerm::ConstU => StlcTerm::ConstU,
        StlcTerm::ConstC(s) => StlcTerm::ConstC(s.clone()),
        StlcTerm::Abs(h, ty, b) => {
            StlcTerm::Abs(h.clone(), ty.clone(), Box::new(open(b, depth + 1, arg)))
        }
        StlcTerm::App(f, a) => {
            StlcTerm::App(Box::new(open(f, depth, arg)), Box::new(open(a, depth, arg)))
        }
        StlcTerm::Pair(l, r) => {
            StlcTerm::Pair(Box::new(open(l, depth, arg)), Box::new(open(r, depth, arg)))
        }
        StlcTerm::Proj(p, b) => StlcTerm::Proj(*p, Box::new(open(b, depth, arg))),
    }
}

/// Forgets the intersection structure of a type: atoms and omega collapse
/// to the base type, intersections become products.
pub fn forget_type(ty: &TypeExpr) -> SimpleType {
    match ty {
        TypeExpr::Atom(_) | TypeExpr::Omega => SimpleType::Base,
        TypeExpr::Arrow(l, r) => SimpleType::arrow(forget_type(l), forget_type(r)),
        TypeExpr::Inter(l, r) => SimpleType::prod(forget_type(l), forget_type(r)),
    }
}

/// Structure-preserving image of a typable term: constants forget their
/// index, strong pairs become products, and a coercion becomes an applied
/// constant at the forgotten function type. Typing is needed to know the
/// coercion source, hence the basis.
pub fn forget_term(sys: SystemId, basis: &Basis, d: &Term) -> Result<StlcTerm, TypingError> {
    match d {
        Term::Free(x) => Ok(StlcTerm::Free(x.clone())),
        Term::Bound(_) => unreachable!("terms at the API are locally closed"),
        Term::UConst(_) => Ok(StlcTerm::ConstU),
        Term::Abs(hint, annot, body) => {
            let mut avoid: BTreeSet<String> = basis.names();
            avoid.extend(crate::term::free_vars(body));
            let x = fresh(hint, &avoid);
            let opened = open_free(body, &x);
            let inner = basis.extended(x.clone(), annot.clone());
            let out = forget_term(sys, &inner, &opened)?;
            Ok(StlcTerm::bind(&x, forget_type(annot), out))
        }
        Term::App(f, a) => Ok(StlcTerm::app(
            forget_term(sys, basis, f)?,
            forget_term(sys, basis, a)?,
        )),
        Term::Pair(l, r) => Ok(StlcTerm::pair(
            forget_term(sys, basis, l)?,
            forget_term(sys, basis, r)?,
        )),
        Term::Proj(p, b) => Ok(StlcTerm::Proj(*p, Box::new(forget_term(sys, basis, b)?))),
        Term::Coerce(body, target) => {
            let src = derivation_with_fuel(sys, basis, body, crate::lambda::DEFAULT_FUEL)?.ty;
            let c = StlcTerm::ConstC(SimpleType::arrow(forget_type(&src), forget_type(target)));
            Ok(StlcTerm::app(c, forget_term(sys, basis, body)?))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StlcError {
    #[error("unbound variable `{name}`")]
    UnboundVar { name: String },
    #[error("expected a function, found `{found}`")]
    NotAFunction { found: SimpleType },
    #[error("expected a product, found `{found}`")]
    NotAProduct { found: SimpleType },
    #[error("argument type `{found}` does not match the domain `{expected}`")]
    Mismatch {
        expected: SimpleType,
        found: SimpleType,
    },
}

/// Standard checking for the target calculus.
pub fn stlc_check(basis: &[(String, SimpleType)], t: &StlcTerm) -> Result<SimpleType, StlcError> {
    match t {
        StlcTerm::Free(x) => basis
            .iter()
            .rev()
            .find(|(n, _)| n == x)
            .map(|(_, ty)| ty.clone())
            .ok_or_else(|| StlcError::UnboundVar { name: x.clone() }),
        StlcTerm::Bound(_) => unreachable!("terms at the API are locally closed"),
        StlcTerm::ConstU => Ok(SimpleType::Base),
        StlcTerm::ConstC(s) => Ok(s.clone()),
        StlcTerm::Abs(hint, annot, body) => {
            let mut avoid: BTreeSet<String> = basis.iter().map(|(n, _)| n.clone()).collect();
            avoid.extend(stlc_free_vars(body));
            let x = fresh(hint, &avoid);
            let mut inner = basis.to_vec();
            inner.push((x.clone(), annot.clone()));
            let opened = open(body, 0, &StlcTerm::Free(x));
            let cod = stlc_check(&inner, &opened)?;
            Ok(SimpleType::arrow(annot.clone(), cod))
        }
        StlcTerm::App(f, a) => {
            let fun_ty = stlc_check(basis, f)?;
            let arg_ty = stlc_check(basis, a)?;
            match fun_ty {
                SimpleType::SArrow(dom, cod) => {
                    if *dom == arg_ty {
                        Ok(*cod)
                    } else {
                        Err(StlcError::Mismatch {
                            expected: *dom,
                            found: arg_ty,
                        })
                    }
                }
                other => Err(StlcError::NotAFunction { found: other }),
            }
        }
        StlcTerm::Pair(l, r) => Ok(SimpleType::prod(
            stlc_check(basis, l)?,
            stlc_check(basis, r)?,
        )),
        StlcTerm::Proj(p, b) => match stlc_check(basis, b)? {
            SimpleType::SProd(l, r) => Ok(match p {
                Proj::Fst => *l,
                Proj::Snd => *r,
            }),
            other => Err(StlcError::NotAProduct { found: other }),
        },
    }
}

fn stlc_free_vars(t: &StlcTerm) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    fn go(t: &StlcTerm, out: &mut BTreeSet<String>) {
        match t {
            StlcTerm::Free(x) => {
                out.insert(x.clone());
            }
            StlcTerm::Bound(_) | StlcTerm::ConstU | StlcTerm::ConstC(_) => {}
            StlcTerm::Abs(_, _, b) | StlcTerm::Proj(_, b) => go(b, out),
            StlcTerm::App(f, a) => {
                go(f, out);
                go(a, out);
            }
            StlcTerm::Pair(l, r) => {
                go(l, out);
                go(r, out);
            }
        }
    }
    go(t, &mut out);
    out
}

/// All one-step beta and projection reducts, used to check that source
/// steps are simulated in the target.
pub fn stlc_steps(t: &StlcTerm) -> Vec<StlcTerm> {
    let mut out = Vec::new();
    match t {
        StlcTerm::Free(_) | StlcTerm::Bound(_) | StlcTerm::ConstU | StlcTerm::ConstC(_) => {}
        StlcTerm::Abs(h, ty, b) => {
            for b2 in stlc_steps(b) {
                out.push(StlcTerm::Abs(h.clone(), ty.clone(), Box::new(b2)));
            }
        }
        StlcTerm::App(f, a) => {
            if let StlcTerm::Abs(_, _, body) = f.as_ref() {
                out.push(open(body, 0, a));
            }
            for f2 in stlc_steps(f) {
                out.push(StlcTerm::app(f2, a.as_ref().clone()));
            }
            for a2 in stlc_steps(a) {
                out.push(StlcTerm::app(f.as_ref().clone(), a2));
            }
        }
        StlcTerm::Pair(l, r) => {
            for l2 in stlc_steps(l) {
                out.push(StlcTerm::pair(l2, r.as_ref().clone()));
            }
            for r2 in stlc_steps(r) {
                out.push(StlcTerm::pair(l.as_ref().clone(), r2));
            }
        }
        StlcTerm::Proj(p, b) => {
            if let StlcTerm::Pair(l, r) = b.as_ref() {
                out.push(match p {
                    Proj::Fst => l.as_ref().clone(),
                    Proj::Snd => r.as_ref().clone(),
                });
            }
            for b2 in stlc_steps(b) {
                out.push(StlcTerm::Proj(*p, Box::new(b2)));
            }
        }
    }
    out
}

fn fresh(hint: &str, avoid: &BTreeSet<String>) -> String {
    let base = if hint.is_empty() { "x" } else { hint };
    if !avoid.contains(base) {
        return base.to_owned();
    }
    let mut n = 1usize;
    loop {
        let cand = format!("{base}{n}");
        if !avoid.contains(&cand) {
            return cand;
        }
        n += 1;
    }
}
