//! Intersection type syntax and the four type theories.
//!
//! Types are atoms, the universal type `omega`, arrows and binary
//! intersections. Intersection is a plain binary constructor: the kernel
//! never flattens, commutes or deduplicates at construction time, so
//! `a & (b & c)` and `(a & b) & c` are different values. Commutativity and
//! associativity only arise through the subtype relation.

use serde::{Deserialize, Serialize};
use std::fmt;

/// An intersection type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TypeExpr {
    Atom(String),
    Omega,
    Arrow(Box<TypeExpr>, Box<TypeExpr>),
    Inter(Box<TypeExpr>, Box<TypeExpr>),
}

impl TypeExpr {
    pub fn atom(name: impl Into<String>) -> TypeExpr {
        TypeExpr::Atom(name.into())
    }

    pub fn arrow(dom: TypeExpr, cod: TypeExpr) -> TypeExpr {
        TypeExpr::Arrow(Box::new(dom), Box::new(cod))
    }

    pub fn inter(left: TypeExpr, right: TypeExpr) -> TypeExpr {
        TypeExpr::Inter(Box::new(left), Box::new(right))
    }

    /// Number of constructor nodes.
    pub fn size(&self) -> usize {
        match self {
            TypeExpr::Atom(_) | TypeExpr::Omega => 1,
            TypeExpr::Arrow(l, r) | TypeExpr::Inter(l, r) => 1 + l.size() + r.size(),
        }
    }

    pub fn contains_omega(&self) -> bool {
        match self {
            TypeExpr::Atom(_) => false,
            TypeExpr::Omega => true,
            TypeExpr::Arrow(l, r) | TypeExpr::Inter(l, r) => {
                l.contains_omega() || r.contains_omega()
            }
        }
    }

    /// All atom names occurring in the type.
    pub fn atoms(&self) -> Vec<&str> {
        fn go<'a>(t: &'a TypeExpr, out: &mut Vec<&'a str>) {
            match t {
                TypeExpr::Atom(a) => out.push(a),
                TypeExpr::Omega => {}
                TypeExpr::Arrow(l, r) | TypeExpr::Inter(l, r) => {
                    go(l, out);
                    go(r, out);
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }
}

/// Splits top-level intersections into their conjunct list, left to right.
/// Members are atoms, omega or arrows; nothing is flattened under arrows.
pub fn flatten(ty: &TypeExpr) -> Vec<&TypeExpr> {
    fn go<'a>(t: &'a TypeExpr, out: &mut Vec<&'a TypeExpr>) {
        match t {
            TypeExpr::Inter(l, r) => {
                go(l, out);
                go(r, out);
            }
            other => out.push(other),
        }
    }
    let mut out = Vec::new();
    go(ty, &mut out);
    out
}

/// Builds the right-nested intersection of a nonempty list.
pub fn inter_all(mut parts: Vec<TypeExpr>) -> TypeExpr {
    assert!(!parts.is_empty(), "inter_all needs at least one type");
    let mut acc = parts.pop().unwrap();
    while let Some(t) = parts.pop() {
        acc = TypeExpr::inter(t, acc);
    }
    acc
}

/// Identifier of one of the four supported type theories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TheoryId {
    CD,
    CDS,
    CDV,
    BCD,
}

impl TheoryId {
    pub const ALL: [TheoryId; 4] = [TheoryId::CD, TheoryId::CDS, TheoryId::CDV, TheoryId::BCD];

    pub fn parse(s: &str) -> Option<TheoryId> {
        match s.to_ascii_uppercase().as_str() {
            "CD" => Some(TheoryId::CD),
            "CDS" => Some(TheoryId::CDS),
            "CDV" => Some(TheoryId::CDV),
            "BCD" => Some(TheoryId::BCD),
            _ => None,
        }
    }
}

impl fmt::Display for TheoryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TheoryId::CD => "CD",
            TheoryId::CDS => "CDS",
            TheoryId::CDV => "CDV",
            TheoryId::BCD => "BCD",
        };
        f.write_str(s)
    }
}

/// A type theory: the minimal preorder plus a selection of axiom and rule
/// schemes. The four named theories fix the flags as follows:
///
/// | theory | omega | omega_top | omega_arrow | arrow schemes |
/// |--------|-------|-----------|-------------|----------------|
/// | CD     |  no   |    no     |     no      |      no        |
/// | CDS    |  yes  |    yes    |     no      |      no        |
/// | CDV    |  no   |    no     |     no      |      yes       |
/// | BCD    |  yes  |    yes    |     yes     |      yes       |
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Theory {
    pub id: TheoryId,
    /// omega is part of the type alphabet.
    pub has_omega: bool,
    /// axiom: sigma <= omega
    pub has_omega_top: bool,
    /// axiom: omega <= sigma -> omega
    pub has_omega_arrow: bool,
    /// schemes (->) and (-> cap)
    pub has_arrow_schemes: bool,
}

pub const CD: Theory = Theory {
    id: TheoryId::CD,
    has_omega: false,
    has_omega_top: false,
    has_omega_arrow: false,
    has_arrow_schemes: false,
};

pub const CDS: Theory = Theory {
    id: TheoryId::CDS,
    has_omega: true,
    has_omega_top: true,
    has_omega_arrow: false,
    has_arrow_schemes: false,
};

pub const CDV: Theory = Theory {
    id: TheoryId::CDV,
    has_omega: false,
    has_omega_top: false,
    has_omega_arrow: false,
    has_arrow_schemes: true,
};

pub const BCD: Theory = Theory {
    id: TheoryId::BCD,
    has_omega: true,
    has_omega_top: true,
    has_omega_arrow: true,
    has_arrow_schemes: true,
};

impl Theory {
    pub fn get(id: TheoryId) -> Theory {
        match id {
            TheoryId::CD => CD,
            TheoryId::CDS => CDS,
            TheoryId::CDV => CDV,
            TheoryId::BCD => BCD,
        }
    }
}

/// Inclusion order on theories: CD below CDS and CDV, everything below BCD,
/// CDS and CDV incomparable.
pub fn theory_leq(t1: TheoryId, t2: TheoryId) -> bool {
    use TheoryId::*;
    match (t1, t2) {
        (a, b) if a == b => true,
        (CD, _) => true,
        (_, BCD) => true,
        _ => false,
    }
}

/// Errors raised by the type layer.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TypeError {
    #[error("ill-formed type `{ty}`: omega is not available in theory {theory}")]
    IllFormedType { theory: TheoryId, ty: TypeExpr },
    #[error("unknown atom `{atom}`: not in the declared alphabet")]
    UnknownAtom { atom: String },
}

/// Checks that `ty` only uses omega when the theory provides it.
pub fn well_formed(theory: &Theory, ty: &TypeExpr) -> Result<(), TypeError> {
    if !theory.has_omega && ty.contains_omega() {
        return Err(TypeError::IllFormedType {
            theory: theory.id,
            ty: ty.clone(),
        });
    }
    Ok(())
}
