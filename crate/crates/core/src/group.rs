//! Exact arithmetic for the finitely generated groups studied here.
//!
//! Elements are canonical integer coordinate vectors:
//!
//! * `Z^d`: the vector itself, multiplication is addition.
//! * `H3`: `(a, b, c)` stands for the unipotent matrix `[[1,a,c],[0,1,b],[0,0,1]]`,
//!   so `(a,b,c)·(a',b',c') = (a+a', b+b', c+c'+a·b')`.
//! * `G × H`: concatenation of the factor coordinates.
//!
//! All arithmetic is overflow-checked.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// An element of a group, stored in canonical coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement(pub Vec<i64>);

impl GroupElement {
    pub fn new(coords: impl Into<Vec<i64>>) -> Self {
        GroupElement(coords.into())
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<i64>> for GroupElement {
    fn from(v: Vec<i64>) -> Self {
        GroupElement(v)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Polynomial growth order `d` of a group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GrowthOrder(pub u32);

impl GrowthOrder {
    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroupKind {
    IntegerLattice(u32),
    Heisenberg3,
    DirectProduct(Box<GroupKind>, Box<GroupKind>),
}

impl GroupKind {
    pub fn dim(&self) -> usize {
        match self {
            GroupKind::IntegerLattice(d) => *d as usize,
            GroupKind::Heisenberg3 => 3,
            GroupKind::DirectProduct(l, r) => l.dim() + r.dim(),
        }
    }

    pub fn growth_order(&self) -> GrowthOrder {
        match self {
            GroupKind::IntegerLattice(d) => GrowthOrder(*d),
            GroupKind::Heisenberg3 => GrowthOrder(4),
            GroupKind::DirectProduct(l, r) => GrowthOrder(l.growth_order().0 + r.growth_order().0),
        }
    }

    fn mul_into(&self, x: &[i64], y: &[i64], out: &mut Vec<i64>) -> Result<()> {
        match self {
            GroupKind::IntegerLattice(_) => {
                for (a, b) in x.iter().zip(y) {
                    out.push(a.checked_add(*b).ok_or(Error::Overflow)?);
                }
            }
            GroupKind::Heisenberg3 => {
                let (a, b, c) = (x[0], x[1], x[2]);
                let (a2, b2, c2) = (y[0], y[1], y[2]);
                let twist = a.checked_mul(b2).ok_or(Error::Overflow)?;
                out.push(a.checked_add(a2).ok_or(Error::Overflow)?);
                out.push(b.checked_add(b2).ok_or(Error::Overflow)?);
                out.push(
                    c.checked_add(c2)
                        .and_then(|s| s.checked_add(twist))
                        .ok_or(Error::Overflow)?,
                );
            }
            GroupKind::DirectProduct(l, r) => {
                let k = l.dim();
                l.mul_into(&x[..k], &y[..k], out)?;
                r.mul_into(&x[k..], &y[k..], out)?;
            }
        }
        Ok(())
    }

    fn inv_into(&self, x: &[i64], out: &mut Vec<i64>) -> Result<()> {
        match self {
            GroupKind::IntegerLattice(_) => {
                for a in x {
                    out.push(a.checked_neg().ok_or(Error::Overflow)?);
                }
            }
            GroupKind::Heisenberg3 => {
                let (a, b, c) = (x[0], x[1], x[2]);
                out.push(a.checked_neg().ok_or(Error::Overflow)?);
                out.push(b.checked_neg().ok_or(Error::Overflow)?);
                out.push(
                    a.checked_mul(b)
                        .and_then(|ab| ab.checked_sub(c))
                        .ok_or(Error::Overflow)?,
                );
            }
            GroupKind::DirectProduct(l, r) => {
                let k = l.dim();
                l.inv_into(&x[..k], out)?;
                r.inv_into(&x[k..], out)?;
            }
        }
        Ok(())
    }

    fn standard_generators(&self) -> Vec<GroupElement> {
        match self {
            GroupKind::IntegerLattice(d) => {
                let d = *d as usize;
                let mut gens = Vec::with_capacity(2 * d);
                for i in 0..d {
                    for sign in [1, -1] {
                        let mut v = vec![0; d];
                        v[i] = sign;
                        gens.push(GroupElement(v));
                    }
                }
                gens
            }
            GroupKind::Heisenberg3 => vec![
                GroupElement(vec![1, 0, 0]),
                GroupElement(vec![-1, 0, 0]),
                GroupElement(vec![0, 1, 0]),
                GroupElement(vec![0, -1, 0]),
            ],
            GroupKind::DirectProduct(l, r) => {
                let (dl, dr) = (l.dim(), r.dim());
                let left = l.standard_generators().into_iter().map(|g| {
                    let mut v = g.0;
                    v.extend(std::iter::repeat_n(0, dr));
                    GroupElement(v)
                });
                let right = r.standard_generators().into_iter().map(|g| {
                    let mut v = vec![0; dl];
                    v.extend(g.0);
                    GroupElement(v)
                });
                left.chain(right).collect()
            }
        }
    }

    /// True when the group is a bare `Z^d`.
    pub fn as_lattice(&self) -> Option<u32> {
        match self {
            GroupKind::IntegerLattice(d) => Some(*d),
            _ => None,
        }
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKind::IntegerLattice(d) => write!(f, "Z^{d}"),
            GroupKind::Heisenberg3 => write!(f, "H3"),
            GroupKind::DirectProduct(l, r) => write!(f, "{l} x {r}"),
        }
    }
}

impl FromStr for GroupKind {
    type Err = Error;

    /// Parses `Z^d`, `H3`, and products such as `Z^1 x H3` (right-nested).
    fn from_str(s: &str) -> Result<Self> {
        let err = |reason: &str| Error::GroupParse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let factors: Vec<&str> = s
            .split(['x', '×', '*'])
            .map(str::trim)
            .collect();
        if factors.iter().any(|f| f.is_empty()) {
            return Err(err("empty factor"));
        }
        let mut kinds = Vec::with_capacity(factors.len());
        for f in factors {
            let kind = if f.eq_ignore_ascii_case("H3") || f.eq_ignore_ascii_case("H") {
                GroupKind::Heisenberg3
            } else if let Some(rest) = f.strip_prefix('Z').or_else(|| f.strip_prefix('z')) {
                let digits = rest.strip_prefix('^').unwrap_or(rest);
                let d: u32 = digits
                    .parse()
                    .map_err(|_| err(&format!("bad lattice rank in `{f}`")))?;
                if d == 0 {
                    return Err(err("lattice rank must be positive"));
                }
                GroupKind::IntegerLattice(d)
            } else {
                return Err(err(&format!("unknown factor `{f}`")));
            };
            kinds.push(kind);
        }
        let mut it = kinds.into_iter().rev();
        let mut acc = it.next().expect("at least one factor");
        for k in it {
            acc = GroupKind::DirectProduct(Box::new(k), Box::new(acc));
        }
        Ok(acc)
    }
}

/// A group together with a symmetric generating set `S` not containing `e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSpec {
    kind: GroupKind,
    generators: Vec<GroupElement>,
}

impl GroupSpec {
    /// The group with its standard generators.
    pub fn new(kind: GroupKind) -> Self {
        let generators = kind.standard_generators();
        GroupSpec { kind, generators }
    }

    pub fn lattice(d: u32) -> Self {
        Self::new(GroupKind::IntegerLattice(d))
    }

    pub fn heisenberg() -> Self {
        Self::new(GroupKind::Heisenberg3)
    }

    /// The group with a caller-supplied generating set, validated for
    /// symmetry, distinctness and identity exclusion.
    pub fn with_generators(kind: GroupKind, generators: Vec<GroupElement>) -> Result<Self> {
        let spec = GroupSpec {
            kind,
            generators: Vec::new(),
        };
        if generators.is_empty() {
            return Err(Error::InvalidGenerators("generating set is empty".into()));
        }
        let e = spec.identity();
        let mut seen = HashSet::with_capacity(generators.len());
        for g in &generators {
            spec.check(g)?;
            if *g == e {
                return Err(Error::InvalidGenerators(
                    "identity is in the generating set".into(),
                ));
            }
            if !seen.insert(g.clone()) {
                return Err(Error::InvalidGenerators(format!("duplicate generator {g}")));
            }
        }
        for g in &generators {
            let inv = spec.inverse(g)?;
            if !seen.contains(&inv) {
                return Err(Error::InvalidGenerators(format!(
                    "generator {g} has no inverse {inv} in the set"
                )));
            }
        }
        Ok(GroupSpec { generators, ..spec })
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn dim(&self) -> usize {
        self.kind.dim()
    }

    pub fn growth_order(&self) -> GrowthOrder {
        self.kind.growth_order()
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(vec![0; self.dim()])
    }

    pub fn check(&self, x: &GroupElement) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::InvalidElement {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn multiply(&self, x: &GroupElement, y: &GroupElement) -> Result<GroupElement> {
        self.check(x)?;
        self.check(y)?;
        let mut out = Vec::with_capacity(self.dim());
        self.kind.mul_into(&x.0, &y.0, &mut out)?;
        Ok(GroupElement(out))
    }

    pub fn inverse(&self, x: &GroupElement) -> Result<GroupElement> {
        self.check(x)?;
        let mut out = Vec::with_capacity(self.dim());
        self.kind.inv_into(&x.0, &mut out)?;
        Ok(GroupElement(out))
    }

    /// The default symmetric generating set of the group kind.
    pub fn standard_generators(&self) -> Vec<GroupElement> {
        self.kind.standard_generators()
    }

    /// Right translates `x·s` over the generating set, deduplicated, in
    /// generator order.
    pub fn neighbors(&self, x: &GroupElement) -> Result<Vec<GroupElement>> {
        let mut out: Vec<GroupElement> = Vec::with_capacity(self.generators.len());
        for s in &self.generators {
            let y = self.multiply(x, s)?;
            if !out.contains(&y) {
                out.push(y);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)
    }
}
