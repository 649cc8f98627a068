//! Type reconstruction and checking for the annotated calculus, generic
//! over a type theory and an essence relation.
//!
//! The rules are syntax-directed: coercions are explicit nodes, so no
//! subsumption search happens anywhere else and every term has at most
//! one type. A strong pair checks its components and then compares their
//! essences under the system's relation; in the conversion systems that
//! comparison is fuel-bounded and can come back unknown, which surfaces
//! as a distinct error instead of divergence.

use crate::lambda::{rel_check, rel_leq, LambdaTerm, Rel, RelVerdict, DEFAULT_FUEL};
use crate::subtype::{derive_subtype, subtype, SubDeriv};
use crate::term::{essence, free_vars, open_free, Proj, Term};
use crate::ty::{theory_leq, well_formed, Theory, TheoryId, TypeError, TypeExpr};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// One of the ten admitted systems: any theory with the syntactic or the
/// beta relation, and the two arrow-scheme theories with beta-eta.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SystemId {
    theory: TheoryId,
    relation: Rel,
}

impl SystemId {
    pub fn new(theory: TheoryId, relation: Rel) -> Option<SystemId> {
        let ok = match relation {
            Rel::Syn | Rel::Beta => true,
            Rel::BetaEta => matches!(theory, TheoryId::CDV | TheoryId::BCD),
        };
        ok.then_some(SystemId { theory, relation })
    }

    pub fn theory_id(&self) -> TheoryId {
        self.theory
    }

    pub fn theory(&self) -> Theory {
        Theory::get(self.theory)
    }

    pub fn relation(&self) -> Rel {
        self.relation
    }

    /// The ten systems, weakest theory first.
    pub fn all() -> Vec<SystemId> {
        let mut out = Vec::new();
        for t in TheoryId::ALL {
            for r in Rel::ALL {
                if let Some(s) = SystemId::new(t, r) {
                    out.push(s);
                }
            }
        }
        out
    }
}

impl fmt::Display for SystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.theory, self.relation)
    }
}

/// Judgment inclusion between systems.
pub fn system_leq(s1: SystemId, s2: SystemId) -> bool {
    theory_leq(s1.theory, s2.theory) && rel_leq(s1.relation, s2.relation)
}

/// An ordered typing context. Later bindings shadow earlier ones.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Basis(Vec<(String, TypeExpr)>);

impl Basis {
    pub fn new() -> Basis {
        Basis(Vec::new())
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (String, TypeExpr)>) -> Basis {
        Basis(pairs.into_iter().collect())
    }

    pub fn lookup(&self, name: &str) -> Option<&TypeExpr> {
        self.0.iter().rev().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn extended(&self, name: impl Into<String>, ty: TypeExpr) -> Basis {
        let mut v = self.0.clone();
        v.push((name.into(), ty));
        Basis(v)
    }

    pub fn names(&self) -> BTreeSet<String> {
        self.0.iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(String, TypeExpr)> {
        self.0.iter()
    }

    /// Keeps only the bindings whose names appear in `keep`.
    pub fn restricted(&self, keep: &BTreeSet<String>) -> Basis {
        Basis(
            self.0
                .iter()
                .filter(|(n, _)| keep.contains(n))
                .cloned()
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TypingError {
    #[error("unbound variable `{name}`")]
    UnboundVar { name: String },
    #[error("expected an arrow type, found `{found}`")]
    ArrowExpected { found: TypeExpr },
    #[error("expected an intersection type, found `{found}`")]
    InterExpected { found: TypeExpr },
    #[error("argument type `{found}` does not match the domain `{expected}`")]
    DomainMismatch { expected: TypeExpr, found: TypeExpr },
    #[error("strong pair components have unrelated skeletons")]
    PairEssenceMismatch {
        left: LambdaTerm,
        right: LambdaTerm,
        verdict: RelVerdict,
    },
    #[error("`{from}` is not a subtype of `{to}` in this theory")]
    CoercionFails { from: TypeExpr, to: TypeExpr },
    #[error("the universal constant needs omega in the theory")]
    TopUnavailable,
    #[error("skeleton comparison ran out of fuel ({fuel} steps)")]
    RelUnknown { fuel: u64 },
    #[error(transparent)]
    IllFormed(#[from] TypeError),
}

impl TypingError {
    /// Stable short code, used by the corpus format and the JSON output.
    pub fn code(&self) -> &'static str {
        match self {
            TypingError::UnboundVar { .. } => "UnboundVar",
            TypingError::ArrowExpected { .. } => "ArrowExpected",
            TypingError::InterExpected { .. } => "InterExpected",
            TypingError::DomainMismatch { .. } => "DomainMismatch",
            TypingError::PairEssenceMismatch { .. } => "PairEssenceMismatch",
            TypingError::CoercionFails { .. } => "CoercionFails",
            TypingError::TopUnavailable => "TopUnavailable",
            TypingError::RelUnknown { .. } => "RelUnknown",
            TypingError::IllFormed(_) => "IllFormedType",
        }
    }
}

/// A typing derivation: each node records the judgment it concludes and
/// the rule instance that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deriv {
    pub basis: Basis,
    pub term: Term,
    pub ty: TypeExpr,
    pub rule: DerivRule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DerivRule {
    /// u[t] : omega
    Top,
    Ax,
    ArrowI {
        bound: String,
        premise: Box<Deriv>,
    },
    ArrowE {
        fun: Box<Deriv>,
        arg: Box<Deriv>,
    },
    InterI {
        left: Box<Deriv>,
        right: Box<Deriv>,
        verdict: RelVerdict,
    },
    InterE1 {
        premise: Box<Deriv>,
    },
    InterE2 {
        premise: Box<Deriv>,
    },
    Leq {
        premise: Box<Deriv>,
        sub: SubDeriv,
    },
}

struct Ctx {
    sys: SystemId,
    theory: Theory,
    fuel: u64,
}

fn fresh_name(hint: &str, avoid: &BTreeSet<String>) -> String {
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

impl Ctx {
    fn infer(&self, basis: &Basis, d: &Term) -> Result<Deriv, TypingError> {
        match d {
            Term::UConst(_) => {
                if !self.theory.has_omega {
                    return Err(TypingError::TopUnavailable);
                }
                Ok(Deriv {
                    basis: basis.clone(),
                    term: d.clone(),
                    ty: TypeExpr::Omega,
                    rule: DerivRule::Top,
                })
            }
            Term::Free(x) => {
                let ty = basis
                    .lookup(x)
                    .cloned()
                    .ok_or_else(|| TypingError::UnboundVar { name: x.clone() })?;
                Ok(Deriv {
                    basis: basis.clone(),
                    term: d.clone(),
                    ty,
                    rule: DerivRule::Ax,
                })
            }
            Term::Bound(_) => unreachable!("terms at the API are locally closed"),
            Term::Abs(hint, annot, body) => {
                well_formed(&self.theory, annot)?;
                let mut avoid = basis.names();
                avoid.extend(free_vars(body));
                let x = fresh_name(hint, &avoid);
                let opened = open_free(body, &x);
                let inner = basis.extended(x.clone(), annot.clone());
                let premise = self.infer(&inner, &opened)?;
                let ty = TypeExpr::arrow(annot.clone(), premise.ty.clone());
                Ok(Deriv {
                    basis: basis.clone(),
                    term: d.clone(),
                    ty,
                    rule: DerivRule::ArrowI {
                        bound: x,
                        premise: Box::new(premise),
                    },
                })
            }
            Term::App(f, a) => {
                let fun = self.infer(basis, f)?;
                let arg = self.infer(basis, a)?;
                let TypeExpr::Arrow(dom, cod) = &fun.ty else {
                    return Err(TypingError::ArrowExpected {
                        found: fun.ty.clone(),
                    });
                };
                if arg.ty != **dom {
                    return Err(TypingError::DomainMismatch {
                        expected: dom.as_ref().clone(),
                        found: arg.ty.clone(),
                    });
                }
                let ty = cod.as_ref().clone();
                Ok(Deriv {
                    basis: basis.clone(),
                    term: d.clone(),
                    ty,
                    rule: DerivRule::ArrowE {
                        fun: Box::new(fun),
                        arg: Box::new(arg),
                    },
                })
            }
            Term::Pair(l, r) => {
                let left = self.infer(basis, l)?;
                let right = self.infer(basis, r)?;
                let el = essence(l);
                let er = essence(r);
                let verdict = rel_check(self.sys.relation, &el, &er, self.fuel);
                match verdict {
                    RelVerdict::Holds => {}
                    RelVerdict::Fails => {
                        return Err(TypingError::PairEssenceMismatch {
                            left: el,
                            right: er,
                            verdict,
                        })
                    }
                    RelVerdict::Unknown { fuel } => {
                        return Err(TypingError::RelUnknown { fuel })
                    }
                }
                let ty = TypeExpr::inter(left.ty.clone(), right.ty.clone());
                Ok(Deriv {
                    basis: basis.clone(),
                    term: d.clone(),
                    ty,
                    rule: DerivRule::InterI {
                        left: Box::new(left),
                        right: Box::new(right),
                        verdict,
                    },
                })
            }
            Term::Proj(p, body) => {
                let premise = self.infer(basis, body)?;
                let TypeExpr::Inter(lt, rt) = &premise.ty else {
                    return Err(TypingError::InterExpected {
                        found: premise.ty.clone(),
                    });
                };
                let (ty, rule) = match p {
                    Proj::Fst => (
                        lt.as_ref().clone(),
                        DerivRule::InterE1 {
                            premise: Box::new(premise),
                        },
                    ),
                    Proj::Snd => (
                        rt.as_ref().clone(),
                        DerivRule::InterE2 {
                            premise: Box::new(premise),
                        },
                    ),
                };
                Ok(Deriv {
                    basis: basis.clone(),
                    term: d.clone(),
                    ty,
                    rule,
                })
            }
            Term::Coerce(body, target) => {
                well_formed(&self.theory, target)?;
                let premise = self.infer(basis, body)?;
                if !subtype(&self.theory, &premise.ty, target)? {
                    return Err(TypingError::CoercionFails {
                        from: premise.ty.clone(),
                        to: target.clone(),
                    });
                }
                let sub = derive_subtype(&self.theory, &premise.ty, target)?
                    .expect("derivation exists for a positive subtype answer");
                Ok(Deriv {
                    basis: basis.clone(),
                    term: d.clone(),
                    ty: target.clone(),
                    rule: DerivRule::Leq {
                        premise: Box::new(premise),
                        sub,
                    },
                })
            }
        }
    }
}

/// Reconstructs the unique type of `d` under `basis`.
pub fn infer(sys: SystemId, basis: &Basis, d: &Term) -> Result<TypeExpr, TypingError> {
    infer_with_fuel(sys, basis, d, DEFAULT_FUEL)
}

pub fn infer_with_fuel(
    sys: SystemId,
    basis: &Basis,
    d: &Term,
    fuel: u64,
) -> Result<TypeExpr, TypingError> {
    derivation_with_fuel(sys, basis, d, fuel).map(|deriv| deriv.ty)
}

/// True iff the reconstructed type is structurally equal to `sigma`.
/// Type equality here is structural: callers wanting subtype slack must
/// write explicit coercion nodes.
pub fn check(
    sys: SystemId,
    basis: &Basis,
    d: &Term,
    sigma: &TypeExpr,
) -> Result<bool, TypingError> {
    check_with_fuel(sys, basis, d, sigma, DEFAULT_FUEL)
}

pub fn check_with_fuel(
    sys: SystemId,
    basis: &Basis,
    d: &Term,
    sigma: &TypeExpr,
    fuel: u64,
) -> Result<bool, TypingError> {
    Ok(infer_with_fuel(sys, basis, d, fuel)? == *sigma)
}

/// Full derivation tree for the judgment, one rule instance per node.
pub fn derivation(sys: SystemId, basis: &Basis, d: &Term) -> Result<Deriv, TypingError> {
    derivation_with_fuel(sys, basis, d, DEFAULT_FUEL)
}

pub fn derivation_with_fuel(
    sys: SystemId,
    basis: &Basis,
    d: &Term,
    fuel: u64,
) -> Result<Deriv, TypingError> {
    let ctx = Ctx {
        sys,
        theory: sys.theory(),
        fuel,
    };
    ctx.infer(basis, d)
}
