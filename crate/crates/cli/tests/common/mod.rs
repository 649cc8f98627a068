//! Shared machinery for the acceptance suite: a deterministic generator
//! of well-typed terms, an enumeration of small types, and a declarative
//! subtyping oracle that searches the axiomatic rules directly (bounded
//! derivation depth, cut types confined to the enumerated universe). The
//! oracle is independent of the kernel's decision procedure on purpose.

// different test targets use different subsets of these helpers
#![allow(dead_code)]

use interlam_core::lambda::Rel;
use interlam_core::subtype::subtype;
use interlam_core::term::{Proj, Term};
use interlam_core::ty::{Theory, TypeExpr};
use interlam_core::typing::{infer, Basis, SystemId};
use std::collections::HashMap;

// ---- deterministic rng (splitmix64) ----

pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Rng {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    pub fn chance(&mut self, percent: u64) -> bool {
        self.next_u64() % 100 < percent
    }
}

// ---- type universe ----

/// All types with at most `max_size` constructor nodes over two atoms,
/// with omega included exactly when the theory has it.
pub fn universe(theory: &Theory, max_size: usize) -> Vec<TypeExpr> {
    let mut by_size: Vec<Vec<TypeExpr>> = vec![Vec::new(); max_size + 1];
    if max_size >= 1 {
        by_size[1].push(TypeExpr::atom("a"));
        by_size[1].push(TypeExpr::atom("b"));
        if theory.has_omega {
            by_size[1].push(TypeExpr::Omega);
        }
    }
    for n in 2..=max_size {
        let mut batch = Vec::new();
        for left_size in 1..n - 1 {
            let right_size = n - 1 - left_size;
            for l in &by_size[left_size] {
                for r in &by_size[right_size] {
                    batch.push(TypeExpr::arrow(l.clone(), r.clone()));
                    batch.push(TypeExpr::inter(l.clone(), r.clone()));
                }
            }
        }
        by_size[n] = batch;
    }
    by_size.into_iter().flatten().collect()
}

// ---- declarative oracle ----

/// The subtype relation over `types`, computed by saturating the
/// axiomatic rules for `rounds` rounds starting from the axiom instances.
/// A sentence is in the result iff it has a derivation of depth at most
/// `rounds + 1` whose transitivity cuts stay inside `types`. Rows are
/// bitsets indexed like `types`.
pub struct Oracle {
    index: HashMap<TypeExpr, usize>,
    rows: Vec<Vec<u64>>,
}

impl Oracle {
    pub fn build(theory: &Theory, types: Vec<TypeExpr>, rounds: usize) -> Oracle {
        let n = types.len();
        let words = n.div_ceil(64);
        let index: HashMap<TypeExpr, usize> = types
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, t)| (t, i))
            .collect();
        let mut rows = vec![vec![0u64; words]; n];
        let set = |rows: &mut Vec<Vec<u64>>, i: usize, j: usize| {
            rows[i][j / 64] |= 1u64 << (j % 64);
        };
        let get = |rows: &Vec<Vec<u64>>, i: usize, j: usize| -> bool {
            rows[i][j / 64] & (1u64 << (j % 64)) != 0
        };

        // axiom instances
        for (i, s) in types.iter().enumerate() {
            // refl
            set(&mut rows, i, i);
            // incl
            if let TypeExpr::Inter(l, r) = s {
                if let Some(&j) = index.get(l.as_ref()) {
                    set(&mut rows, i, j);
                }
                if let Some(&j) = index.get(r.as_ref()) {
                    set(&mut rows, i, j);
                }
            }
            // omega top
            if theory.has_omega_top {
                if let Some(&j) = index.get(&TypeExpr::Omega) {
                    set(&mut rows, i, j);
                }
            }
            // omega arrow
            if theory.has_omega_arrow && *s == TypeExpr::Omega {
                for (j, t) in types.iter().enumerate() {
                    if matches!(t, TypeExpr::Arrow(_, c) if **c == TypeExpr::Omega) {
                        set(&mut rows, i, j);
                    }
                }
            }
            // (-> cap): (s -> t) & (s -> r) <= s -> (t & r)
            if theory.has_arrow_schemes {
                if let TypeExpr::Inter(l, r) = s {
                    if let (TypeExpr::Arrow(d1, c1), TypeExpr::Arrow(d2, c2)) =
                        (l.as_ref(), r.as_ref())
                    {
                        if d1 == d2 {
                            let fused = TypeExpr::arrow(
                                d1.as_ref().clone(),
                                TypeExpr::inter(c1.as_ref().clone(), c2.as_ref().clone()),
                            );
                            if let Some(&j) = index.get(&fused) {
                                set(&mut rows, i, j);
                            }
                        }
                    }
                }
            }
        }

        // pre-index the shapes the closure rules need
        let inters: Vec<(usize, usize, usize)> = types
            .iter()
            .enumerate()
            .filter_map(|(k, t)| match t {
                TypeExpr::Inter(l, r) => match (index.get(l.as_ref()), index.get(r.as_ref())) {
                    (Some(&li), Some(&ri)) => Some((k, li, ri)),
                    _ => None,
                },
                _ => None,
            })
            .collect();
        let arrows: Vec<(usize, usize, usize)> = types
            .iter()
            .enumerate()
            .filter_map(|(k, t)| match t {
                TypeExpr::Arrow(l, r) => match (index.get(l.as_ref()), index.get(r.as_ref())) {
                    (Some(&li), Some(&ri)) => Some((k, li, ri)),
                    _ => None,
                },
                _ => None,
            })
            .collect();

        for _ in 0..rounds {
            let mut next = rows.clone();
            // trans: row(i) grows by row(k) for every i <= k
            for i in 0..n {
                for k in 0..n {
                    if get(&rows, i, k) {
                        let (head, tail) = next.split_at_mut(std::cmp::max(i, k));
                        let (ri, rk): (&mut Vec<u64>, &Vec<u64>) = if i < k {
                            (&mut head[i], &tail[0])
                        } else if k < i {
                            (&mut tail[0], &head[k])
                        } else {
                            continue;
                        };
                        for w in 0..ri.len() {
                            ri[w] |= rk[w];
                        }
                    }
                }
            }
            // glb: i <= l and i <= r give i <= l & r
            for &(k, li, ri) in &inters {
                for i in 0..n {
                    if get(&next, i, li) && get(&next, i, ri) {
                        next[i][k / 64] |= 1u64 << (k % 64);
                    }
                }
            }
            // (->): s2 <= s1 and t1 <= t2 give s1 -> t1 <= s2 -> t2
            if theory.has_arrow_schemes {
                for &(k1, d1, c1) in &arrows {
                    for &(k2, d2, c2) in &arrows {
                        if get(&next, d2, d1) && get(&next, c1, c2) {
                            next[k1][k2 / 64] |= 1u64 << (k2 % 64);
                        }
                    }
                }
            }
            if next == rows {
                break;
            }
            rows = next;
        }

        let _ = types;
        Oracle { index, rows }
    }

    pub fn holds(&self, s: &TypeExpr, t: &TypeExpr) -> bool {
        let i = self.index[s];
        let j = self.index[t];
        self.rows[i][j / 64] & (1u64 << (j % 64)) != 0
    }
}

// ---- well-typed term generator ----

pub struct TypedGen {
    pub rng: Rng,
    pub sys: SystemId,
    pub theory: Theory,
    pub pool: Vec<TypeExpr>,
    fresh: u64,
}

/// A standard ambient basis for generation: variables at a few small
/// types, extended with omega material when the theory has it.
pub fn standard_basis(theory: &Theory) -> Basis {
    let a = TypeExpr::atom("a");
    let b = TypeExpr::atom("b");
    let mut pairs = vec![
        ("x".to_owned(), a.clone()),
        ("y".to_owned(), b.clone()),
        ("f".to_owned(), TypeExpr::arrow(a.clone(), b.clone())),
        ("g".to_owned(), TypeExpr::arrow(a.clone(), a.clone())),
        ("p".to_owned(), TypeExpr::inter(TypeExpr::arrow(a.clone(), b.clone()), a.clone())),
        ("q".to_owned(), TypeExpr::inter(a.clone(), b.clone())),
    ];
    if theory.has_omega {
        pairs.push(("w".to_owned(), TypeExpr::Omega));
        pairs.push(("m".to_owned(), TypeExpr::arrow(TypeExpr::Omega, TypeExpr::Omega)));
    }
    Basis::from_pairs(pairs)
}

impl TypedGen {
    pub fn new(seed: u64, sys: SystemId) -> TypedGen {
        let theory = sys.theory();
        let a = TypeExpr::atom("a");
        let b = TypeExpr::atom("b");
        let mut pool = vec![
            a.clone(),
            b.clone(),
            TypeExpr::arrow(a.clone(), b.clone()),
            TypeExpr::arrow(a.clone(), a.clone()),
            TypeExpr::inter(a.clone(), b.clone()),
        ];
        if theory.has_omega {
            pool.push(TypeExpr::Omega);
        }
        TypedGen {
            rng: Rng::new(seed),
            sys,
            theory,
            pool,
            fresh: 0,
        }
    }

    fn fresh_name(&mut self) -> String {
        self.fresh += 1;
        format!("v{}", self.fresh)
    }

    fn pick_pool(&mut self) -> TypeExpr {
        let i = self.rng.below(self.pool.len());
        self.pool[i].clone()
    }

    /// A term of exactly the target type under the basis, or `None` when
    /// the budget runs out before a shape fits.
    pub fn gen(&mut self, basis: &Basis, target: &TypeExpr, depth: usize) -> Option<Term> {
        // variables with the exact type are always an option
        let vars: Vec<&str> = basis
            .iter()
            .filter(|(_, t)| t == target)
            .map(|(n, _)| n.as_str())
            .collect();
        if depth == 0 {
            if !vars.is_empty() {
                let v = vars[self.rng.below(vars.len())];
                return Some(Term::free(v));
            }
            if *target == TypeExpr::Omega && self.theory.has_omega {
                return Some(Term::uconst(Term::free("x")));
            }
            return None;
        }

        for _attempt in 0..6 {
            let roll = self.rng.below(100);
            let made = match target {
                _ if roll < 20 && !vars.is_empty() => {
                    let v = vars[self.rng.below(vars.len())];
                    Some(Term::free(v))
                }
                TypeExpr::Arrow(dom, cod) if roll < 55 => self
                    .gen_under_binder(basis, dom, cod, depth)
                    .map(|(name, body)| Term::bind(&name, dom.as_ref().clone(), body)),
                TypeExpr::Inter(l, r) if roll < 60 => self.gen_pair(basis, l, r, depth),
                TypeExpr::Omega if roll < 60 => Some(Term::uconst(self.gen_raw_index(depth))),
                _ if roll < 70 => {
                    // beta redex at the root
                    let arg_ty = self.pick_pool();
                    let (name, body) = self.gen_under_binder(basis, &arg_ty, target, depth)?;
                    let arg = self.gen(basis, &arg_ty, depth - 1)?;
                    Some(Term::app(
                        Term::bind(&name, arg_ty.clone(), body),
                        arg,
                    ))
                }
                _ if roll < 80 => {
                    // application of a generated function
                    let arg_ty = self.pick_pool();
                    let fun_ty = TypeExpr::arrow(arg_ty.clone(), target.clone());
                    let fun = self.gen(basis, &fun_ty, depth - 1)?;
                    let arg = self.gen(basis, &arg_ty, depth - 1)?;
                    Some(Term::app(fun, arg))
                }
                _ if roll < 90 => {
                    // projection from a generated pair source
                    let partner = if self.rng.chance(50) {
                        target.clone()
                    } else {
                        self.pick_pool()
                    };
                    if self.rng.chance(50) {
                        let src = TypeExpr::inter(target.clone(), partner);
                        let t = self.gen(basis, &src, depth - 1)?;
                        Some(Term::proj(Proj::Fst, t))
                    } else {
                        let src = TypeExpr::inter(partner, target.clone());
                        let t = self.gen(basis, &src, depth - 1)?;
                        Some(Term::proj(Proj::Snd, t))
                    }
                }
                _ => {
                    // identity coercion noise
                    let t = self.gen(basis, target, depth - 1)?;
                    Some(Term::coerce(t, target.clone()))
                }
            };
            if let Some(t) = made {
                return Some(t);
            }
        }
        // fallbacks so generation rarely dies
        if !vars.is_empty() {
            let v = vars[self.rng.below(vars.len())];
            return Some(Term::free(v));
        }
        match target {
            TypeExpr::Arrow(dom, cod) => {
                let (name, body) = self.gen_under_binder(basis, dom, cod, depth)?;
                Some(Term::bind(&name, dom.as_ref().clone(), body))
            }
            TypeExpr::Inter(l, r) => self.gen_pair(basis, l, r, depth),
            TypeExpr::Omega if self.theory.has_omega => {
                Some(Term::uconst(Term::free("x")))
            }
            _ => None,
        }
    }

    fn gen_under_binder(
        &mut self,
        basis: &Basis,
        dom: &TypeExpr,
        cod: &TypeExpr,
        depth: usize,
    ) -> Option<(String, Term)> {
        let name = self.fresh_name();
        if basis.lookup(&name).is_some() {
            return None;
        }
        let inner = basis.extended(name.clone(), dom.clone());
        let body = self.gen(&inner, cod, depth - 1)?;
        Some((name, body))
    }

    /// Strong pairs need component skeletons related under the system's
    /// relation; each strategy below guarantees that by construction.
    fn gen_pair(&mut self, basis: &Basis, l: &TypeExpr, r: &TypeExpr, depth: usize) -> Option<Term> {
        // a basis variable at exactly this intersection splits into its
        // two projections, which share their skeleton
        let sources: Vec<&str> = basis
            .iter()
            .filter(|(_, t)| matches!(t, TypeExpr::Inter(tl, tr) if tl.as_ref() == l && tr.as_ref() == r))
            .map(|(n, _)| n.as_str())
            .collect();
        if !sources.is_empty() && self.rng.chance(30) {
            let v = Term::free(sources[self.rng.below(sources.len())]);
            return Some(Term::pair(
                Term::proj(Proj::Fst, v.clone()),
                Term::proj(Proj::Snd, v),
            ));
        }
        // left component plus a coerced copy when the types line up
        if subtype(&self.theory, l, r) == Ok(true) {
            if let Some(t) = self.gen(basis, l, depth - 1) {
                let right = Term::coerce(t.clone(), r.clone());
                return Some(Term::pair(t, right));
            }
        }
        if l == r {
            let t = self.gen(basis, l, depth - 1)?;
            let variant = self.variant_same_type(&t, l);
            return Some(Term::pair(t, variant));
        }
        // distinct halves: generate the left and retarget it to the right
        // through a projection pair when possible, otherwise fail
        None
    }

    /// A term with the same type whose skeleton is related to the
    /// original under the system's relation.
    fn variant_same_type(&mut self, t: &Term, ty: &TypeExpr) -> Term {
        let roll = self.rng.below(100);
        match self.sys.relation() {
            Rel::Syn => {
                if roll < 50 {
                    t.clone()
                } else {
                    // a coercion is invisible to the skeleton
                    Term::coerce(t.clone(), ty.clone())
                }
            }
            Rel::Beta => {
                if roll < 40 {
                    t.clone()
                } else {
                    // wrap in an identity application
                    let name = self.fresh_name();
                    Term::app(
                        Term::bind(&name, ty.clone(), Term::free(&name)),
                        t.clone(),
                    )
                }
            }
            Rel::BetaEta => {
                if let TypeExpr::Arrow(dom, _) = ty {
                    if roll < 60 {
                        // eta-expand
                        let name = self.fresh_name();
                        return Term::bind(
                            &name,
                            dom.as_ref().clone(),
                            Term::app(t.clone(), Term::free(&name)),
                        );
                    }
                }
                if roll < 50 {
                    t.clone()
                } else {
                    let name = self.fresh_name();
                    Term::app(
                        Term::bind(&name, ty.clone(), Term::free(&name)),
                        t.clone(),
                    )
                }
            }
        }
    }

    /// Arbitrary small index for a universal constant; it does not need
    /// to be typable.
    fn gen_raw_index(&mut self, depth: usize) -> Term {
        if depth == 0 || self.rng.chance(40) {
            return Term::free("x");
        }
        match self.rng.below(3) {
            0 => Term::bind("z", self.pick_pool(), Term::free("z")),
            1 => Term::app(self.gen_raw_index(depth - 1), self.gen_raw_index(depth - 1)),
            _ => Term::free("y"),
        }
    }
}

/// Generates `want` well-typed judgments of bounded size across the given
/// systems, round-robin. Every produced triple satisfies
/// `infer(sys, basis, term) == Ok(ty)`.
pub fn generate_corpus(
    seed: u64,
    systems: &[SystemId],
    want: usize,
    max_size: usize,
) -> Vec<(SystemId, Basis, Term, TypeExpr)> {
    let mut out = Vec::new();
    let mut attempts = 0usize;
    let mut cursor = 0usize;
    let mut gens: Vec<TypedGen> = systems
        .iter()
        .enumerate()
        .map(|(i, &s)| TypedGen::new(seed.wrapping_add(i as u64), s))
        .collect();
    while out.len() < want && attempts < want * 200 {
        attempts += 1;
        let i = cursor % systems.len();
        cursor += 1;
        let sys = systems[i];
        let gen = &mut gens[i];
        let basis = standard_basis(&gen.theory);
        let target = {
            // bias toward structured targets
            let roll = gen.rng.below(100);
            let a = TypeExpr::atom("a");
            let b = TypeExpr::atom("b");
            if roll < 25 {
                TypeExpr::inter(a.clone(), b.clone())
            } else if roll < 45 {
                TypeExpr::arrow(a.clone(), b.clone())
            } else if roll < 60 {
                TypeExpr::inter(
                    TypeExpr::arrow(a.clone(), b.clone()),
                    TypeExpr::arrow(a.clone(), b.clone()),
                )
            } else if roll < 75 {
                a.clone()
            } else if roll < 85 {
                TypeExpr::arrow(b.clone(), a.clone())
            } else if gen.theory.has_omega {
                TypeExpr::Omega
            } else {
                b.clone()
            }
        };
        let depth = 2 + gen.rng.below(3);
        let Some(term) = gen.gen(&basis, &target, depth) else {
            continue;
        };
        if term.size() > max_size {
            continue;
        }
        match infer(sys, &basis, &term) {
            Ok(ty) => {
                assert_eq!(ty, target, "generator produced a mistyped term");
                out.push((sys, basis, term, ty));
            }
            Err(e) => panic!("generator produced an untypable term in {sys}: {e} ({term})"),
        }
    }
    out
}

/// Path to the workspace root, for tests that read checked-in data.
pub fn workspace_root() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("..")
        .join("..")
        .canonicalize()
        .expect("workspace root exists")
}
