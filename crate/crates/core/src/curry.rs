//! Curry-style type assignment for pure terms: derivations, their
//! validation, erasure of typing derivations for the annotated calculus
//! down to assignment derivations (the sound direction), synthesis of
//! annotated terms from assignment derivations (the complete direction),
//! and a depth-bounded exhaustive proof search used as an oracle for
//! non-derivability evidence.

use crate::lambda::{rel_check, LambdaTerm, Rel, RelVerdict, DEFAULT_FUEL};
use crate::subtype::{derive_subtype, subtype, validate_subderiv, SubDeriv};
use crate::term::Term;
use crate::ty::{well_formed, Theory, TheoryId, TypeExpr};
use crate::typing::{Basis, Deriv, DerivRule, SystemId};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};

/// An assignment derivation. Every node carries its full judgment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurryDeriv {
    pub basis: Basis,
    pub subject: LambdaTerm,
    pub ty: TypeExpr,
    pub rule: CurryRule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CurryRule {
    Ax,
    ArrowI {
        bound: String,
        premise: Box<CurryDeriv>,
    },
    ArrowE {
        fun: Box<CurryDeriv>,
        arg: Box<CurryDeriv>,
    },
    /// both premises share the subject
    InterI {
        left: Box<CurryDeriv>,
        right: Box<CurryDeriv>,
    },
    /// admissible variant: the premises' subjects may differ but must be
    /// beta-convertible
    InterIAdm {
        left: Box<CurryDeriv>,
        right: Box<CurryDeriv>,
    },
    InterE1 {
        premise: Box<CurryDeriv>,
    },
    InterE2 {
        premise: Box<CurryDeriv>,
    },
    /// any subject gets omega
    Top,
    Leq {
        premise: Box<CurryDeriv>,
        sub: SubDeriv,
    },
}

fn open_lambda(body: &LambdaTerm, name: &str) -> LambdaTerm {
    crate::lambda::open_with(body, &LambdaTerm::free(name))
}

/// Checks that every node of `deriv` is a correct rule instance for the
/// theory. The admissible intersection introduction is accepted only when
/// `allow_adm` is set and its subjects are beta-convertible within the
/// default fuel.
pub fn validate_curry(theory: &Theory, deriv: &CurryDeriv, allow_adm: bool) -> bool {
    validate_curry_with_fuel(theory, deriv, allow_adm, DEFAULT_FUEL)
}

pub fn validate_curry_with_fuel(
    theory: &Theory,
    deriv: &CurryDeriv,
    allow_adm: bool,
    fuel: u64,
) -> bool {
    if well_formed(theory, &deriv.ty).is_err() {
        return false;
    }
    match &deriv.rule {
        CurryRule::Ax => match &deriv.subject {
            LambdaTerm::Free(x) => deriv.basis.lookup(x) == Some(&deriv.ty),
            _ => false,
        },
        CurryRule::ArrowI { bound, premise } => {
            let TypeExpr::Arrow(dom, cod) = &deriv.ty else {
                return false;
            };
            let LambdaTerm::Abs(_, body) = &deriv.subject else {
                return false;
            };
            if deriv.basis.lookup(bound).is_some() {
                return false;
            }
            premise.basis == deriv.basis.extended(bound.clone(), dom.as_ref().clone())
                && premise.subject == open_lambda(body, bound)
                && premise.ty == **cod
                && validate_curry_with_fuel(theory, premise, allow_adm, fuel)
        }
        CurryRule::ArrowE { fun, arg } => {
            let LambdaTerm::App(f, a) = &deriv.subject else {
                return false;
            };
            let TypeExpr::Arrow(dom, cod) = &fun.ty else {
                return false;
            };
            fun.basis == deriv.basis
                && arg.basis == deriv.basis
                && fun.subject == **f
                && arg.subject == **a
                && arg.ty == **dom
                && deriv.ty == **cod
                && validate_curry_with_fuel(theory, fun, allow_adm, fuel)
                && validate_curry_with_fuel(theory, arg, allow_adm, fuel)
        }
        CurryRule::InterI { left, right } => {
            let TypeExpr::Inter(lt, rt) = &deriv.ty else {
                return false;
            };
            left.basis == deriv.basis
                && right.basis == deriv.basis
                && left.subject == deriv.subject
                && right.subject == deriv.subject
                && left.ty == **lt
                && right.ty == **rt
                && validate_curry_with_fuel(theory, left, allow_adm, fuel)
                && validate_curry_with_fuel(theory, right, allow_adm, fuel)
        }
        CurryRule::InterIAdm { left, right } => {
            if !allow_adm {
                return false;
            }
            let TypeExpr::Inter(lt, rt) = &deriv.ty else {
                return false;
            };
            left.basis == deriv.basis
                && right.basis == deriv.basis
                && left.subject == deriv.subject
                && rel_check(Rel::Beta, &left.subject, &right.subject, fuel) == RelVerdict::Holds
                && left.ty == **lt
                && right.ty == **rt
                && validate_curry_with_fuel(theory, left, allow_adm, fuel)
                && validate_curry_with_fuel(theory, right, allow_adm, fuel)
        }
        CurryRule::InterE1 { premise } => {
            matches!(&premise.ty, TypeExpr::Inter(lt, _) if **lt == deriv.ty)
                && premise.basis == deriv.basis
                && premise.subject == deriv.subject
                && validate_curry_with_fuel(theory, premise, allow_adm, fuel)
        }
        CurryRule::InterE2 { premise } => {
            matches!(&premise.ty, TypeExpr::Inter(_, rt) if **rt == deriv.ty)
                && premise.basis == deriv.basis
                && premise.subject == deriv.subject
                && validate_curry_with_fuel(theory, premise, allow_adm, fuel)
        }
        CurryRule::Top => theory.has_omega && deriv.ty == TypeExpr::Omega,
        CurryRule::Leq { premise, sub } => {
            premise.basis == deriv.basis
                && premise.subject == deriv.subject
                && validate_subderiv(theory, sub, &premise.ty, &deriv.ty)
                && validate_curry_with_fuel(theory, premise, allow_adm, fuel)
        }
    }
}

/// Erasure refused: the system is one of the four where assignment
/// soundness fails.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("essence erasure is unsupported for {system}: assignment soundness fails there")]
pub struct EraseUnsupported {
    pub system: SystemId,
}

/// True for the systems whose typing derivations erase to valid
/// assignment derivations: the four syntactic systems, and the two
/// omega-top theories under beta.
pub fn erasure_supported(sys: SystemId) -> bool {
    match sys.relation() {
        Rel::Syn => true,
        Rel::Beta => matches!(sys.theory_id(), TheoryId::CDS | TheoryId::BCD),
        Rel::BetaEta => false,
    }
}

/// Erases a typing derivation to an assignment derivation for the same
/// basis and type, with the term replaced by its skeleton. Intersection
/// introductions erase to the admissible rule in the beta systems.
pub fn erase_derivation(sys: SystemId, deriv: &Deriv) -> Result<CurryDeriv, EraseUnsupported> {
    if !erasure_supported(sys) {
        return Err(EraseUnsupported { system: sys });
    }
    Ok(erase_node(sys, deriv))
}

fn erase_node(sys: SystemId, deriv: &Deriv) -> CurryDeriv {
    let subject = crate::term::essence(&deriv.term);
    let rule = match &deriv.rule {
        DerivRule::Top => CurryRule::Top,
        DerivRule::Ax => CurryRule::Ax,
        DerivRule::ArrowI { bound, premise } => CurryRule::ArrowI {
            bound: bound.clone(),
            premise: Box::new(erase_node(sys, premise)),
        },
        DerivRule::ArrowE { fun, arg } => CurryRule::ArrowE {
            fun: Box::new(erase_node(sys, fun)),
            arg: Box::new(erase_node(sys, arg)),
        },
        DerivRule::InterI { left, right, .. } => {
            let l = Box::new(erase_node(sys, left));
            let r = Box::new(erase_node(sys, right));
            match sys.relation() {
                Rel::Syn => CurryRule::InterI { left: l, right: r },
                _ => CurryRule::InterIAdm { left: l, right: r },
            }
        }
        DerivRule::InterE1 { premise } => CurryRule::InterE1 {
            premise: Box::new(erase_node(sys, premise)),
        },
        DerivRule::InterE2 { premise } => CurryRule::InterE2 {
            premise: Box::new(erase_node(sys, premise)),
        },
        DerivRule::Leq { premise, sub } => CurryRule::Leq {
            premise: Box::new(erase_node(sys, premise)),
            sub: sub.clone(),
        },
    };
    CurryDeriv {
        basis: deriv.basis.clone(),
        subject,
        ty: deriv.ty.clone(),
        rule,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SynthesizeError {
    #[error("synthesis requires plain intersection introductions")]
    AdmissibleNode,
    #[error("synthesis found a malformed derivation node")]
    Malformed,
}

/// Builds an annotated term from an assignment derivation: its essence is
/// the derivation subject and it reconstructs to the derivation type.
/// The omega rule decorates the subject's binders with omega and wraps it
/// in a constant index, which need not itself be typable.
pub fn synthesize_term(sys: SystemId, deriv: &CurryDeriv) -> Result<Term, SynthesizeError> {
    let _ = sys;
    synth(deriv)
}

fn synth(deriv: &CurryDeriv) -> Result<Term, SynthesizeError> {
    match &deriv.rule {
        CurryRule::Ax => match &deriv.subject {
            LambdaTerm::Free(x) => Ok(Term::free(x.clone())),
            _ => Err(SynthesizeError::Malformed),
        },
        CurryRule::ArrowI { bound, premise } => {
            let TypeExpr::Arrow(dom, _) = &deriv.ty else {
                return Err(SynthesizeError::Malformed);
            };
            let body = synth(premise)?;
            Ok(Term::bind(bound, dom.as_ref().clone(), body))
        }
        CurryRule::ArrowE { fun, arg } => Ok(Term::app(synth(fun)?, synth(arg)?)),
        CurryRule::InterI { left, right } => Ok(Term::pair(synth(left)?, synth(right)?)),
        CurryRule::InterIAdm { .. } => Err(SynthesizeError::AdmissibleNode),
        CurryRule::InterE1 { premise } => {
            Ok(Term::proj(crate::term::Proj::Fst, synth(premise)?))
        }
        CurryRule::InterE2 { premise } => {
            Ok(Term::proj(crate::term::Proj::Snd, synth(premise)?))
        }
        CurryRule::Top => Ok(Term::uconst(decorate_omega(&deriv.subject))),
        CurryRule::Leq { premise, .. } => Ok(Term::coerce(synth(premise)?, deriv.ty.clone())),
    }
}

/// Annotates every binder of a pure term with omega.
pub fn decorate_omega(m: &LambdaTerm) -> Term {
    match m {
        LambdaTerm::Free(x) => Term::free(x.clone()),
        LambdaTerm::Bound(i) => Term::Bound(*i),
        LambdaTerm::Abs(h, b) => Term::Abs(h.clone(), TypeExpr::Omega, Box::new(decorate_omega(b))),
        LambdaTerm::App(f, a) => Term::app(decorate_omega(f), decorate_omega(a)),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SearchOutcome {
    Derivable(CurryDeriv),
    /// exhaustive within the bound, so evidence of non-derivability, not
    /// a proof
    NotWithin(u32),
}

/// Exhaustive search for an assignment derivation of `basis |- m : sigma`
/// with tree height at most `depth`. Instantiation types (application
/// arguments, intersection-elimination premises, subsumption sources) are
/// drawn from a fixed pool: the subterm closure of the goal type and the
/// basis types, omega when the theory has it, and binary intersections of
/// those. The fixed pool keeps the search finite; a negative answer is
/// therefore evidence relative to the pool and the depth, not a proof.
pub fn bounded_curry_search(
    theory: &Theory,
    basis: &Basis,
    m: &LambdaTerm,
    sigma: &TypeExpr,
    depth: u32,
) -> SearchOutcome {
    let mut base: BTreeSet<TypeExpr> = BTreeSet::new();
    collect_subterms(sigma, &mut base);
    for (_, t) in basis.iter() {
        collect_subterms(t, &mut base);
    }
    if theory.has_omega {
        base.insert(TypeExpr::Omega);
    }
    let mut pool: BTreeSet<TypeExpr> = base.clone();
    for l in &base {
        for r in &base {
            pool.insert(TypeExpr::inter(l.clone(), r.clone()));
        }
    }
    let mut search = Search {
        theory,
        candidates: base.into_iter().collect(),
        pool: pool.into_iter().collect(),
        fail_memo: HashMap::new(),
        hit_memo: HashMap::new(),
    };
    match search.go(basis, m, sigma, depth, true) {
        Some(d) => SearchOutcome::Derivable(d),
        None => SearchOutcome::NotWithin(depth),
    }
}

fn collect_subterms(t: &TypeExpr, out: &mut BTreeSet<TypeExpr>) {
    out.insert(t.clone());
    match t {
        TypeExpr::Atom(_) | TypeExpr::Omega => {}
        TypeExpr::Arrow(l, r) | TypeExpr::Inter(l, r) => {
            collect_subterms(l, out);
            collect_subterms(r, out);
        }
    }
}

type SearchKey = (Vec<(String, TypeExpr)>, LambdaTerm, TypeExpr, bool);

struct Search<'t> {
    theory: &'t Theory,
    /// subterm closure of the original goal and basis types
    candidates: Vec<TypeExpr>,
    /// candidates plus their binary intersections
    pool: Vec<TypeExpr>,
    /// goal -> largest depth at which it is known to fail
    fail_memo: HashMap<SearchKey, u32>,
    hit_memo: HashMap<SearchKey, CurryDeriv>,
}

impl<'t> Search<'t> {
    fn go(
        &mut self,
        basis: &Basis,
        m: &LambdaTerm,
        goal: &TypeExpr,
        depth: u32,
        allow_leq: bool,
    ) -> Option<CurryDeriv> {
        if depth == 0 {
            return None;
        }
        let key: SearchKey = (
            basis.iter().cloned().collect(),
            m.clone(),
            goal.clone(),
            allow_leq,
        );
        if let Some(hit) = self.hit_memo.get(&key) {
            return Some(hit.clone());
        }
        if let Some(&failed_at) = self.fail_memo.get(&key) {
            if depth <= failed_at {
                return None;
            }
        }
        let found = self.go_uncached(basis, m, goal, depth, allow_leq);
        match &found {
            Some(d) => {
                self.hit_memo.insert(key, d.clone());
            }
            None => {
                let entry = self.fail_memo.entry(key).or_insert(0);
                if depth > *entry {
                    *entry = depth;
                }
            }
        }
        found
    }

    fn go_uncached(
        &mut self,
        basis: &Basis,
        m: &LambdaTerm,
        goal: &TypeExpr,
        depth: u32,
        allow_leq: bool,
    ) -> Option<CurryDeriv> {
        let node = |rule: CurryRule| CurryDeriv {
            basis: basis.clone(),
            subject: m.clone(),
            ty: goal.clone(),
            rule,
        };

        // omega is assignable to anything
        if self.theory.has_omega && *goal == TypeExpr::Omega {
            return Some(node(CurryRule::Top));
        }

        if let LambdaTerm::Free(x) = m {
            if basis.lookup(x) == Some(goal) {
                return Some(node(CurryRule::Ax));
            }
        }

        if let (LambdaTerm::Abs(hint, body), TypeExpr::Arrow(dom, cod)) = (m, goal) {
            let mut avoid = basis.names();
            avoid.extend(m.free_vars());
            let x = pick_fresh(hint, &avoid);
            let inner = basis.extended(x.clone(), dom.as_ref().clone());
            let opened = open_lambda(body, &x);
            if let Some(premise) = self.go(&inner, &opened, cod, depth - 1, true) {
                return Some(node(CurryRule::ArrowI {
                    bound: x,
                    premise: Box::new(premise),
                }));
            }
        }

        if let TypeExpr::Inter(lt, rt) = goal {
            let left = self.go(basis, m, lt, depth - 1, true);
            if let Some(left) = left {
                if let Some(right) = self.go(basis, m, rt, depth - 1, true) {
                    return Some(node(CurryRule::InterI {
                        left: Box::new(left),
                        right: Box::new(right),
                    }));
                }
            }
        }

        if let LambdaTerm::App(f, a) = m {
            let cands = self.candidates.clone();
            for d_arg in &cands {
                let fun_ty = TypeExpr::arrow(d_arg.clone(), goal.clone());
                if let Some(fun) = self.go(basis, f, &fun_ty, depth - 1, true) {
                    if let Some(arg) = self.go(basis, a, d_arg, depth - 1, true) {
                        return Some(node(CurryRule::ArrowE {
                            fun: Box::new(fun),
                            arg: Box::new(arg),
                        }));
                    }
                }
            }
        }

        // intersection elimination from a pool type with the goal as the
        // matching component
        let pool = self.pool.clone();
        for cand in &pool {
            let TypeExpr::Inter(lt, rt) = cand else {
                continue;
            };
            if **lt == *goal {
                if let Some(premise) = self.go(basis, m, cand, depth - 1, true) {
                    return Some(node(CurryRule::InterE1 {
                        premise: Box::new(premise),
                    }));
                }
            }
            if **rt == *goal {
                if let Some(premise) = self.go(basis, m, cand, depth - 1, true) {
                    return Some(node(CurryRule::InterE2 {
                        premise: Box::new(premise),
                    }));
                }
            }
        }

        // subsumption from a pool source; two in a row are never needed,
        // transitivity folds into the derivation
        if allow_leq {
            for src in &pool {
                if src == goal {
                    continue;
                }
                if subtype(self.theory, src, goal) != Ok(true) {
                    continue;
                }
                if let Some(premise) = self.go(basis, m, src, depth - 1, false) {
                    let sub = derive_subtype(self.theory, src, goal)
                        .expect("well-formed candidates")
                        .expect("derivation for a positive answer");
                    return Some(node(CurryRule::Leq {
                        premise: Box::new(premise),
                        sub,
                    }));
                }
            }
        }

        None
    }
}

fn pick_fresh(hint: &str, avoid: &BTreeSet<String>) -> String {
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::Rel;
    use crate::ty::{CD, CDS};
    use crate::typing::{derivation, infer};

    fn a() -> TypeExpr {
        TypeExpr::atom("a")
    }
    fn b() -> TypeExpr {
        TypeExpr::atom("b")
    }
    fn c() -> TypeExpr {
        TypeExpr::atom("c")
    }
    fn arr(l: TypeExpr, r: TypeExpr) -> TypeExpr {
        TypeExpr::arrow(l, r)
    }
    fn inter(l: TypeExpr, r: TypeExpr) -> TypeExpr {
        TypeExpr::inter(l, r)
    }
    fn sys(t: TheoryId, r: Rel) -> SystemId {
        SystemId::new(t, r).unwrap()
    }

    fn identity_pair_deriv() -> CurryDeriv {
        // |- \x. x : (a -> a) & (b -> b) via InterI over two ArrowI
        let id = LambdaTerm::bind("x", LambdaTerm::free("x"));
        fn side(id: &LambdaTerm, dom: TypeExpr) -> CurryDeriv {
            CurryDeriv {
                basis: Basis::new(),
                subject: id.clone(),
                ty: TypeExpr::arrow(dom.clone(), dom.clone()),
                rule: CurryRule::ArrowI {
                    bound: "x".into(),
                    premise: Box::new(CurryDeriv {
                        basis: Basis::new().extended("x", dom.clone()),
                        subject: LambdaTerm::free("x"),
                        ty: dom,
                        rule: CurryRule::Ax,
                    }),
                },
            }
        }
        CurryDeriv {
            basis: Basis::new(),
            subject: id.clone(),
            ty: inter(arr(a(), a()), arr(b(), b())),
            rule: CurryRule::InterI {
                left: Box::new(side(&id, a())),
                right: Box::new(side(&id, b())),
            },
        }
    }

    #[test]
    fn identity_pair_validates() {
        assert!(validate_curry(&CD, &identity_pair_deriv(), false));
    }

    #[test]
    fn top_rule_needs_omega() {
        let d = CurryDeriv {
            basis: Basis::new(),
            subject: LambdaTerm::free("x"),
            ty: TypeExpr::Omega,
            rule: CurryRule::Top,
        };
        assert!(!validate_curry(&CD, &d, false));
        assert!(validate_curry(&CDS, &d, false));
    }

    #[test]
    fn plain_inter_i_requires_shared_subject() {
        let left = CurryDeriv {
            basis: Basis::new().extended("x", a()).extended("y", b()),
            subject: LambdaTerm::free("x"),
            ty: a(),
            rule: CurryRule::Ax,
        };
        let right = CurryDeriv {
            basis: Basis::new().extended("x", a()).extended("y", b()),
            subject: LambdaTerm::free("y"),
            ty: b(),
            rule: CurryRule::Ax,
        };
        let d = CurryDeriv {
            basis: Basis::new().extended("x", a()).extended("y", b()),
            subject: LambdaTerm::free("x"),
            ty: inter(a(), b()),
            rule: CurryRule::InterI {
                left: Box::new(left),
                right: Box::new(right),
            },
        };
        assert!(!validate_curry(&CD, &d, false));
    }

    #[test]
    fn erase_identity_pair_from_syn_system() {
        let t = Term::pair(
            Term::bind("x", a(), Term::free("x")),
            Term::bind("x", b(), Term::free("x")),
        );
        let s = sys(TheoryId::CD, Rel::Syn);
        let deriv = derivation(s, &Basis::new(), &t).unwrap();
        let curry = erase_derivation(s, &deriv).unwrap();
        assert!(matches!(curry.rule, CurryRule::InterI { .. }));
        assert!(validate_curry(&CD, &curry, false));
        assert_eq!(curry.subject, LambdaTerm::bind("x", LambdaTerm::free("x")));
    }

    #[test]
    fn erase_beta_pair_uses_admissible_rule() {
        // <x, (\y:a. y) x> under x:a in the beta system over CDS
        let t = Term::pair(
            Term::free("x"),
            Term::app(Term::bind("y", a(), Term::free("y")), Term::free("x")),
        );
        let basis = Basis::new().extended("x", a());
        let s = sys(TheoryId::CDS, Rel::Beta);
        let deriv = derivation(s, &basis, &t).unwrap();
        let curry = erase_derivation(s, &deriv).unwrap();
        assert!(matches!(curry.rule, CurryRule::InterIAdm { .. }));
        assert!(validate_curry(&CDS, &curry, true));
        assert!(!validate_curry(&CDS, &curry, false));
    }

    #[test]
    fn erase_refuses_unsound_systems() {
        let t = Term::bind("x", a(), Term::free("x"));
        let s = sys(TheoryId::CD, Rel::Beta);
        let deriv = derivation(s, &Basis::new(), &t).unwrap();
        assert!(erase_derivation(s, &deriv).is_err());
    }

    #[test]
    fn synthesize_identity_pair() {
        let s = sys(TheoryId::CD, Rel::Syn);
        let d = identity_pair_deriv();
        let t = synthesize_term(s, &d).unwrap();
        assert_eq!(
            t,
            Term::pair(
                Term::bind("x", a(), Term::free("x")),
                Term::bind("x", b(), Term::free("x")),
            )
        );
        assert_eq!(crate::term::essence(&t), d.subject);
        assert_eq!(infer(s, &Basis::new(), &t), Ok(d.ty));
    }

    #[test]
    fn synthesize_top_decorates_with_omega() {
        let subject = LambdaTerm::bind("x", LambdaTerm::free("x"));
        let d = CurryDeriv {
            basis: Basis::new(),
            subject: subject.clone(),
            ty: TypeExpr::Omega,
            rule: CurryRule::Top,
        };
        let s = sys(TheoryId::CDS, Rel::Syn);
        let t = synthesize_term(s, &d).unwrap();
        assert_eq!(
            t,
            Term::uconst(Term::bind("x", TypeExpr::Omega, Term::free("x")))
        );
        assert_eq!(crate::term::essence(&t), subject);
        assert_eq!(infer(s, &Basis::new(), &t), Ok(TypeExpr::Omega));
    }

    #[test]
    fn search_finds_identity() {
        let id = LambdaTerm::bind("x", LambdaTerm::free("x"));
        let out = bounded_curry_search(&CD, &Basis::new(), &id, &arr(a(), a()), 4);
        match out {
            SearchOutcome::Derivable(d) => {
                assert!(validate_curry(&CD, &d, false));
                assert_eq!(d.subject, id);
            }
            SearchOutcome::NotWithin(_) => panic!("identity must be derivable"),
        }
    }

    fn sks() -> LambdaTerm {
        let s_comb = LambdaTerm::bind(
            "x",
            LambdaTerm::bind(
                "y",
                LambdaTerm::bind(
                    "z",
                    LambdaTerm::app(
                        LambdaTerm::app(LambdaTerm::free("x"), LambdaTerm::free("z")),
                        LambdaTerm::app(LambdaTerm::free("y"), LambdaTerm::free("z")),
                    ),
                ),
            ),
        );
        let k_comb = LambdaTerm::bind("x", LambdaTerm::bind("y", LambdaTerm::free("x")));
        LambdaTerm::app(LambdaTerm::app(s_comb.clone(), k_comb), s_comb)
    }

    #[test]
    fn search_does_not_find_sks_identity_type() {
        let out = bounded_curry_search(&CD, &Basis::new(), &sks(), &arr(a(), a()), 8);
        assert_eq!(out, SearchOutcome::NotWithin(8));
    }

    #[test]
    fn search_does_not_find_eta_expansion_at_conjunct() {
        // x : (a -> b) & c |- \y. x y : c is not derivable
        let basis = Basis::new().extended("x", inter(arr(a(), b()), c()));
        let m = LambdaTerm::bind("y", LambdaTerm::app(LambdaTerm::free("x"), LambdaTerm::free("y")));
        let out = bounded_curry_search(&crate::ty::CDV, &basis, &m, &c(), 8);
        assert_eq!(out, SearchOutcome::NotWithin(8));
    }
}
