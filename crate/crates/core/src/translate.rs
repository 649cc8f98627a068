//! Coercion elimination: subtype derivations compile to coercion
//! functions whose skeleton is the identity, and every coercion node of a
//! typable term compiles to an application of such a function. The output
//! is coercion-free and typechecks in a target system whose relation is
//! beta for the theories without arrow schemes and beta-eta for the two
//! with them.

use crate::lambda::Rel;
use crate::subtype::{derive_subtype, validate_subderiv, SubDeriv};
use crate::term::{open_free, Proj, Term};
use crate::ty::{Theory, TheoryId, TypeExpr};
use crate::typing::{derivation_with_fuel, Basis, SystemId, TypingError};
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("the subtype derivation does not validate in theory {theory}")]
pub struct InvalidDerivation {
    pub theory: TheoryId,
}

/// Compiles a validating derivation of `s <= t` into a closed,
/// coercion-free term of type `s -> t` whose skeleton converts to the
/// identity.
pub fn coercion_term(theory: &Theory, d: &SubDeriv) -> Result<Term, InvalidDerivation> {
    let Some((lhs, rhs)) = d.conclusion() else {
        return Err(InvalidDerivation { theory: theory.id });
    };
    if !validate_subderiv(theory, d, &lhs, &rhs) {
        return Err(InvalidDerivation { theory: theory.id });
    }
    Ok(build(d))
}

fn build(d: &SubDeriv) -> Term {
    let x = || Term::free("x");
    let f = || Term::free("f");
    match d {
        SubDeriv::Refl(s) => Term::bind("x", s.clone(), x()),
        SubDeriv::Incl1(s, t) => Term::bind(
            "x",
            TypeExpr::inter(s.clone(), t.clone()),
            Term::proj(Proj::Fst, x()),
        ),
        SubDeriv::Incl2(s, t) => Term::bind(
            "x",
            TypeExpr::inter(s.clone(), t.clone()),
            Term::proj(Proj::Snd, x()),
        ),
        SubDeriv::Glb(d1, d2) => {
            let (rho, _) = d1.conclusion().expect("validated");
            let c1 = build(d1);
            let c2 = build(d2);
            Term::bind(
                "x",
                rho,
                Term::pair(Term::app(c1, x()), Term::app(c2, x())),
            )
        }
        SubDeriv::Trans(d1, d2) => {
            let (s, _) = d1.conclusion().expect("validated");
            let c1 = build(d1);
            let c2 = build(d2);
            Term::bind("x", s, Term::app(c2, Term::app(c1, x())))
        }
        SubDeriv::OmegaTop(s) => Term::bind("x", s.clone(), Term::uconst(x())),
        SubDeriv::OmegaArrow(s) => Term::bind(
            "f",
            TypeExpr::Omega,
            Term::bind("x", s.clone(), Term::uconst(Term::app(f(), x()))),
        ),
        SubDeriv::ArrowInter(s, t, r) => {
            let xi = TypeExpr::inter(
                TypeExpr::arrow(s.clone(), t.clone()),
                TypeExpr::arrow(s.clone(), r.clone()),
            );
            Term::bind(
                "f",
                xi,
                Term::bind(
                    "x",
                    s.clone(),
                    Term::pair(
                        Term::app(Term::proj(Proj::Fst, f()), x()),
                        Term::app(Term::proj(Proj::Snd, f()), x()),
                    ),
                ),
            )
        }
        SubDeriv::ArrowMono(contra, cov) => {
            let (s2, s1) = contra.conclusion().expect("validated");
            let (t1, _t2) = cov.conclusion().expect("validated");
            let c_contra = build(contra);
            let c_cov = build(cov);
            Term::bind(
                "f",
                TypeExpr::arrow(s1, t1),
                Term::bind(
                    "x",
                    s2,
                    Term::app(c_cov, Term::app(f(), Term::app(c_contra, x()))),
                ),
            )
        }
    }
}

/// Target system of the coercion-elimination translation: the theory is
/// preserved; the relation is beta for CD and CDS sources and beta-eta
/// for CDV and BCD sources, whatever the source relation.
pub fn target_system(source: SystemId) -> SystemId {
    let rel = match source.theory_id() {
        TheoryId::CD | TheoryId::CDS => Rel::Beta,
        TheoryId::CDV | TheoryId::BCD => Rel::BetaEta,
    };
    SystemId::new(source.theory_id(), rel).expect("target relation is admitted for the theory")
}

/// Rewrites a typable term into a coercion-free one: homomorphic on every
/// constructor except coercions, which become applications of the
/// compiled coercion function for the inferred source type. Constant
/// indices are translated as well.
pub fn translate(sys: SystemId, basis: &Basis, d: &Term) -> Result<Term, TypingError> {
    translate_with_fuel(sys, basis, d, crate::lambda::DEFAULT_FUEL)
}

pub fn translate_with_fuel(
    sys: SystemId,
    basis: &Basis,
    d: &Term,
    fuel: u64,
) -> Result<Term, TypingError> {
    let theory = sys.theory();
    match d {
        Term::Free(_) | Term::Bound(_) => Ok(d.clone()),
        Term::UConst(ix) => Ok(Term::uconst(translate_with_fuel(sys, basis, ix, fuel)?)),
        Term::Abs(hint, annot, body) => {
            let mut avoid: BTreeSet<String> = basis.names();
            avoid.extend(crate::term::free_vars(body));
            let x = fresh(hint, &avoid);
            let opened = open_free(body, &x);
            let inner = basis.extended(x.clone(), annot.clone());
            let out = translate_with_fuel(sys, &inner, &opened, fuel)?;
            Ok(Term::bind(&x, annot.clone(), out))
        }
        Term::App(f, a) => Ok(Term::app(
            translate_with_fuel(sys, basis, f, fuel)?,
            translate_with_fuel(sys, basis, a, fuel)?,
        )),
        Term::Pair(l, r) => Ok(Term::pair(
            translate_with_fuel(sys, basis, l, fuel)?,
            translate_with_fuel(sys, basis, r, fuel)?,
        )),
        Term::Proj(p, b) => Ok(Term::proj(*p, translate_with_fuel(sys, basis, b, fuel)?)),
        Term::Coerce(body, target) => {
            let source_ty = derivation_with_fuel(sys, basis, body, fuel)?.ty;
            let sub = derive_subtype(&theory, &source_ty, target)?.ok_or_else(|| {
                TypingError::CoercionFails {
                    from: source_ty.clone(),
                    to: target.clone(),
                }
            })?;
            let coercion = coercion_term(&theory, &sub)
                .expect("derive_subtype output always validates");
            let inner = translate_with_fuel(sys, basis, body, fuel)?;
            Ok(Term::app(coercion, inner))
        }
    }
}

/// True iff the term contains no coercion node anywhere, constant indices
/// included.
pub fn coercion_free(d: &Term) -> bool {
    match d {
        Term::Free(_) | Term::Bound(_) => true,
        Term::UConst(ix) => coercion_free(ix),
        Term::Abs(_, _, b) | Term::Proj(_, b) => coercion_free(b),
        Term::App(f, a) => coercion_free(f) && coercion_free(a),
        Term::Pair(l, r) => coercion_free(l) && coercion_free(r),
        Term::Coerce(..) => false,
    }
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
