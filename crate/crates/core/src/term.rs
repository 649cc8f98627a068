//! The explicitly typed calculus: terms with type-annotated binders,
//! strong pairs, projections, explicit coercions and the indexed
//! universal constants `u[t]`.
//!
//! Terms share the binder-index representation of the pure calculus:
//! equality ignores binder hints, so alpha-equivalence is representation
//! identity. Only abstractions bind; pairs, projections, coercions and
//! constant indices are transparent for indices.

use crate::lambda::LambdaTerm;
use crate::ty::TypeExpr;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Proj {
    Fst,
    Snd,
}

impl Proj {
    pub fn index(self) -> u8 {
        match self {
            Proj::Fst => 1,
            Proj::Snd => 2,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Term {
    /// universal constant indexed by an arbitrary term, written `u[t]`
    UConst(Box<Term>),
    Free(String),
    Bound(usize),
    Abs(String, TypeExpr, Box<Term>),
    App(Box<Term>, Box<Term>),
    /// strong pair
    Pair(Box<Term>, Box<Term>),
    Proj(Proj, Box<Term>),
    /// explicit coercion `t ^ T`
    Coerce(Box<Term>, TypeExpr),
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Term::UConst(a), Term::UConst(b)) => a == b,
            (Term::Free(a), Term::Free(b)) => a == b,
            (Term::Bound(i), Term::Bound(j)) => i == j,
            (Term::Abs(_, s, a), Term::Abs(_, t, b)) => s == t && a == b,
            (Term::App(f, a), Term::App(g, b)) => f == g && a == b,
            (Term::Pair(l, r), Term::Pair(l2, r2)) => l == l2 && r == r2,
            (Term::Proj(i, a), Term::Proj(j, b)) => i == j && a == b,
            (Term::Coerce(a, s), Term::Coerce(b, t)) => a == b && s == t,
            _ => false,
        }
    }
}

impl Eq for Term {}

impl Term {
    pub fn free(name: impl Into<String>) -> Term {
        Term::Free(name.into())
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::App(Box::new(fun), Box::new(arg))
    }

    pub fn pair(left: Term, right: Term) -> Term {
        Term::Pair(Box::new(left), Box::new(right))
    }

    pub fn proj(p: Proj, of: Term) -> Term {
        Term::Proj(p, Box::new(of))
    }

    pub fn coerce(of: Term, target: TypeExpr) -> Term {
        Term::Coerce(Box::new(of), target)
    }

    pub fn uconst(index: Term) -> Term {
        Term::UConst(Box::new(index))
    }

    /// Binds every free occurrence of `name` under a new annotated binder.
    pub fn bind(name: &str, annot: TypeExpr, body: Term) -> Term {
        Term::Abs(name.to_owned(), annot, Box::new(close(body, name, 0)))
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Free(_) | Term::Bound(_) => 1,
            Term::UConst(t) => 1 + t.size(),
            Term::Abs(_, _, b) => 1 + b.size(),
            Term::App(f, a) => 1 + f.size() + a.size(),
            Term::Pair(l, r) => 1 + l.size() + r.size(),
            Term::Proj(_, t) => 1 + t.size(),
            Term::Coerce(t, _) => 1 + t.size(),
        }
    }

    pub(crate) fn uses_index(&self, k: usize) -> bool {
        match self {
            Term::Free(_) => false,
            Term::Bound(i) => *i == k,
            Term::UConst(t) => t.uses_index(k),
            Term::Abs(_, _, b) => b.uses_index(k + 1),
            Term::App(f, a) => f.uses_index(k) || a.uses_index(k),
            Term::Pair(l, r) => l.uses_index(k) || r.uses_index(k),
            Term::Proj(_, t) => t.uses_index(k),
            Term::Coerce(t, _) => t.uses_index(k),
        }
    }
}

fn close(t: Term, name: &str, depth: usize) -> Term {
    match t {
        Term::Free(x) if x == name => Term::Bound(depth),
        v @ Term::Free(_) => v,
        v @ Term::Bound(_) => v,
        Term::UConst(i) => Term::UConst(Box::new(close(*i, name, depth))),
        Term::Abs(h, ty, b) => Term::Abs(h, ty, Box::new(close(*b, name, depth + 1))),
        Term::App(f, a) => Term::App(
            Box::new(close(*f, name, depth)),
            Box::new(close(*a, name, depth)),
        ),
        Term::Pair(l, r) => Term::Pair(
            Box::new(close(*l, name, depth)),
            Box::new(close(*r, name, depth)),
        ),
        Term::Proj(p, b) => Term::Proj(p, Box::new(close(*b, name, depth))),
        Term::Coerce(b, ty) => Term::Coerce(Box::new(close(*b, name, depth)), ty),
    }
}

fn shift_loose(t: &Term, by: usize, cutoff: usize) -> Term {
    match t {
        Term::Free(x) => Term::Free(x.clone()),
        Term::Bound(i) => {
            if *i >= cutoff {
                Term::Bound(i + by)
            } else {
                Term::Bound(*i)
            }
        }
        Term::UConst(ix) => Term::UConst(Box::new(shift_loose(ix, by, cutoff))),
        Term::Abs(h, ty, b) => {
            Term::Abs(h.clone(), ty.clone(), Box::new(shift_loose(b, by, cutoff + 1)))
        }
        Term::App(f, a) => Term::App(
            Box::new(shift_loose(f, by, cutoff)),
            Box::new(shift_loose(a, by, cutoff)),
        ),
        Term::Pair(l, r) => Term::Pair(
            Box::new(shift_loose(l, by, cutoff)),
            Box::new(shift_loose(r, by, cutoff)),
        ),
        Term::Proj(p, b) => Term::Proj(*p, Box::new(shift_loose(b, by, cutoff))),
        Term::Coerce(b, ty) => Term::Coerce(Box::new(shift_loose(b, by, cutoff)), ty.clone()),
    }
}

fn open(t: &Term, depth: usize, arg: &Term) -> Term {
    match t {
        Term::Free(x) => Term::Free(x.clone()),
        Term::Bound(i) => {
            if *i == depth {
                shift_loose(arg, depth, 0)
            } else if *i > depth {
                Term::Bound(i - 1)
            } else {
                Term::Bound(*i)
            }
        }
        Term::UConst(ix) => Term::UConst(Box::new(open(ix, depth, arg))),
        Term::Abs(h, ty, b) => Term::Abs(h.clone(), ty.clone(), Box::new(open(b, depth + 1, arg))),
        Term::App(f, a) => Term::App(Box::new(open(f, depth, arg)), Box::new(open(a, depth, arg))),
        Term::Pair(l, r) => Term::Pair(Box::new(open(l, depth, arg)), Box::new(open(r, depth, arg))),
        Term::Proj(p, b) => Term::Proj(*p, Box::new(open(b, depth, arg))),
        Term::Coerce(b, ty) => Term::Coerce(Box::new(open(b, depth, arg)), ty.clone()),
    }
}

/// Opens the body of an abstraction with `arg`: the beta contractum.
pub fn open_with(body: &Term, arg: &Term) -> Term {
    open(body, 0, arg)
}

/// Opens an abstraction body with a fresh free variable; inverse of
/// `Term::bind` up to the chosen name.
pub fn open_free(body: &Term, name: &str) -> Term {
    open(body, 0, &Term::free(name))
}

/// Capture-avoiding substitution for a free variable. Pushes into
/// constant indices and through coercions.
pub fn subst_d(body: &Term, x: &str, arg: &Term) -> Term {
    match body {
        Term::Free(y) if y == x => arg.clone(),
        Term::Free(y) => Term::Free(y.clone()),
        Term::Bound(i) => Term::Bound(*i),
        Term::UConst(ix) => Term::UConst(Box::new(subst_d(ix, x, arg))),
        Term::Abs(h, ty, b) => Term::Abs(h.clone(), ty.clone(), Box::new(subst_d(b, x, arg))),
        Term::App(f, a) => Term::App(Box::new(subst_d(f, x, arg)), Box::new(subst_d(a, x, arg))),
        Term::Pair(l, r) => Term::Pair(Box::new(subst_d(l, x, arg)), Box::new(subst_d(r, x, arg))),
        Term::Proj(p, b) => Term::Proj(*p, Box::new(subst_d(b, x, arg))),
        Term::Coerce(b, ty) => Term::Coerce(Box::new(subst_d(b, x, arg)), ty.clone()),
    }
}

/// Erases a term to its pure skeleton: annotations and coercions vanish,
/// projections and constant indices are transparent, and a strong pair
/// contributes its left component.
pub fn essence(d: &Term) -> LambdaTerm {
    match d {
        Term::UConst(ix) => essence(ix),
        Term::Free(x) => LambdaTerm::Free(x.clone()),
        Term::Bound(i) => LambdaTerm::Bound(*i),
        Term::Abs(h, _, b) => LambdaTerm::Abs(h.clone(), Box::new(essence(b))),
        Term::App(f, a) => LambdaTerm::app(essence(f), essence(a)),
        Term::Pair(l, _) => essence(l),
        Term::Proj(_, b) => essence(b),
        Term::Coerce(b, _) => essence(b),
    }
}

/// Free variables, including those inside constant indices and coercion
/// bodies.
pub fn free_vars(d: &Term) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    fn go(t: &Term, out: &mut BTreeSet<String>) {
        match t {
            Term::Free(x) => {
                out.insert(x.clone());
            }
            Term::Bound(_) => {}
            Term::UConst(ix) => go(ix, out),
            Term::Abs(_, _, b) => go(b, out),
            Term::App(f, a) => {
                go(f, out);
                go(a, out);
            }
            Term::Pair(l, r) => {
                go(l, out);
                go(r, out);
            }
            Term::Proj(_, b) => go(b, out),
            Term::Coerce(b, _) => go(b, out),
        }
    }
    go(d, &mut out);
    out
}

/// True iff every strong pair in the term (constant indices included) has
/// alpha-equal component essences.
pub fn is_synchronous(d: &Term) -> bool {
    match d {
        Term::Free(_) | Term::Bound(_) => true,
        Term::UConst(ix) => is_synchronous(ix),
        Term::Abs(_, _, b) | Term::Proj(_, b) | Term::Coerce(b, _) => is_synchronous(b),
        Term::App(f, a) => is_synchronous(f) && is_synchronous(a),
        Term::Pair(l, r) => {
            essence(l) == essence(r) && is_synchronous(l) && is_synchronous(r)
        }
    }
}
