//! Group oracles: a group given by identity, multiplication, and inversion,
//! with an optional length function.
//!
//! Finite groups are Cayley tables (validated exhaustively on construction)
//! or cyclic groups; ℤ and additive ℚ are built in with `|·|` as their
//! length. Neighborhoods of the identity are finite symmetric subsets or,
//! on the built-in infinite groups, closed balls of the length.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::algebra::{all_elements, Elem, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::pathology::MAX_ATOMS_LP;
use crate::rational::parse_rational;
use crate::submeasure::SetFunc;

/// Cap on explicit Cayley tables supplied from outside (validated `k³`-exhaustively).
pub const MAX_CAYLEY_ELEMENTS: usize = 256;

/// A group element. Which variant carries meaning depends on the group kind:
/// `Idx` for Cayley tables and cyclic groups, `Int` for ℤ, `Rat` for ℚ.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum GElem {
    Idx(usize),
    Int(i64),
    Rat(BigRational),
}

impl fmt::Display for GElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GElem::Idx(i) => write!(f, "#{i}"),
            GElem::Int(n) => write!(f, "{n}"),
            GElem::Rat(r) => write!(f, "{r}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupKind {
    /// Explicit finite group: element names, flat `k×k` multiplication table
    /// (index `i*k + j` holds `i·j`), inverse table, identity index.
    Table { elements: Vec<String>, mul: Vec<u32>, inv: Vec<u32>, identity: usize },
    /// ℤ/kℤ with addition.
    Cyclic { order: usize },
    /// ℤ with addition; length `|n|`.
    Integers,
    /// ℚ with addition; length `|q|`.
    RationalsAdd,
}

/// A declared length function: `f(e) = 0`, `f(g⁻¹) = f(g) ≥ 0`,
/// `f(gh) ≤ f(g) + f(h)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LengthFn {
    /// `|·|` on the built-in infinite groups.
    Abs,
    /// Per-element values on a finite group, indexed like the element list.
    Table(Vec<BigRational>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupOracle {
    kind: GroupKind,
    length: Option<LengthFn>,
}

impl GroupOracle {
    pub fn cyclic(order: usize) -> Result<Arc<Self>> {
        if order == 0 {
            return Err(Error::InvalidInput("cyclic group needs positive order".into()));
        }
        Ok(Arc::new(GroupOracle { kind: GroupKind::Cyclic { order }, length: None }))
    }

    pub fn integers() -> Arc<Self> {
        Arc::new(GroupOracle { kind: GroupKind::Integers, length: Some(LengthFn::Abs) })
    }

    pub fn rationals_additive() -> Arc<Self> {
        Arc::new(GroupOracle { kind: GroupKind::RationalsAdd, length: Some(LengthFn::Abs) })
    }

    /// Builds a finite group from an explicit table. Group axioms are
    /// verified exhaustively: closure by type, a two-sided identity,
    /// two-sided inverses, and associativity over all `k³` triples.
    pub fn from_cayley_table(
        elements: Vec<String>,
        mul: Vec<u32>,
        inv: Vec<u32>,
    ) -> Result<Arc<Self>> {
        let k = elements.len();
        if k == 0 {
            return Err(Error::InvalidInput("empty element list".into()));
        }
        if k > MAX_CAYLEY_ELEMENTS {
            return Err(Error::CapacityExceeded {
                what: "explicit Cayley table".into(),
                limit: MAX_CAYLEY_ELEMENTS,
                requested: k,
            });
        }
        for (i, e) in elements.iter().enumerate() {
            if elements[..i].contains(e) {
                return Err(Error::InvalidInput(format!("duplicate element name {e:?}")));
            }
        }
        if mul.len() != k * k {
            return Err(Error::InvalidInput(format!(
                "multiplication table has {} entries, expected {}",
                mul.len(),
                k * k
            )));
        }
        if inv.len() != k {
            return Err(Error::InvalidInput("inverse table has wrong length".into()));
        }
        if mul.iter().any(|&v| v as usize >= k) || inv.iter().any(|&v| v as usize >= k) {
            return Err(Error::InvalidInput("table entry out of range".into()));
        }
        let at = |i: usize, j: usize| mul[i * k + j] as usize;
        let identity = (0..k)
            .find(|&e| (0..k).all(|g| at(e, g) == g && at(g, e) == g))
            .ok_or_else(|| Error::InvalidInput("no two-sided identity in table".into()))?;
        for g in 0..k {
            let gi = inv[g] as usize;
            if at(g, gi) != identity || at(gi, g) != identity {
                return Err(Error::InvalidInput(format!(
                    "inverse law fails for element {}",
                    elements[g]
                )));
            }
        }
        for a in 0..k {
            for b in 0..k {
                let ab = at(a, b);
                for c in 0..k {
                    if at(ab, c) != at(a, at(b, c)) {
                        return Err(Error::InvalidInput(format!(
                            "associativity fails on ({}, {}, {})",
                            elements[a], elements[b], elements[c]
                        )));
                    }
                }
            }
        }
        Ok(Arc::new(GroupOracle {
            kind: GroupKind::Table { elements, mul, inv, identity },
            length: None,
        }))
    }

    /// Trusted internal constructor for tables whose axioms hold by
    /// construction (used for symmetric-difference groups of an algebra).
    pub(crate) fn from_cayley_table_unchecked(
        elements: Vec<String>,
        mul: Vec<u32>,
        inv: Vec<u32>,
        identity: usize,
        length: Option<LengthFn>,
    ) -> Arc<Self> {
        Arc::new(GroupOracle { kind: GroupKind::Table { elements, mul, inv, identity }, length })
    }

    /// The symmetric group on `degree ≤ 5` points, elements named by
    /// one-line notation, multiplication `(σ·τ)(x) = σ(τ(x))`.
    pub fn symmetric(degree: usize) -> Result<Arc<Self>> {
        if degree == 0 || degree > 5 {
            return Err(Error::InvalidInput("symmetric group supported for degree 1..=5".into()));
        }
        let mut perms: Vec<Vec<usize>> = vec![vec![]];
        for d in 0..degree {
            let mut next = Vec::new();
            for p in &perms {
                for slot in 0..=d {
                    let mut q = p.clone();
                    q.insert(slot, d);
                    next.push(q);
                }
            }
            perms = next;
        }
        perms.sort();
        let k = perms.len();
        let index_of = |p: &Vec<usize>| perms.binary_search(p).expect("closed under composition");
        let mut mul = vec![0u32; k * k];
        for (i, a) in perms.iter().enumerate() {
            for (j, b) in perms.iter().enumerate() {
                let composed: Vec<usize> = (0..degree).map(|x| a[b[x]]).collect();
                mul[i * k + j] = index_of(&composed) as u32;
            }
        }
        let mut inv = vec![0u32; k];
        for (i, a) in perms.iter().enumerate() {
            let mut ai = vec![0usize; degree];
            for (x, &y) in a.iter().enumerate() {
                ai[y] = x;
            }
            inv[i] = index_of(&ai) as u32;
        }
        let names =
            perms.iter().map(|p| p.iter().map(|d| d.to_string()).collect::<String>()).collect();
        let identity = index_of(&(0..degree).collect());
        Ok(Arc::new(GroupOracle {
            kind: GroupKind::Table { elements: names, mul, inv, identity },
            length: None,
        }))
    }

    /// Attaches a validated length function. For finite kinds the three
    /// length laws are checked over all pairs; the built-in infinite groups
    /// already carry `|·|` and do not accept tables.
    pub fn with_length(self: &Arc<Self>, length: LengthFn) -> Result<Arc<Self>> {
        match (&self.kind, &length) {
            (GroupKind::Integers | GroupKind::RationalsAdd, LengthFn::Abs) => {}
            (GroupKind::Integers | GroupKind::RationalsAdd, LengthFn::Table(_)) => {
                return Err(Error::InvalidInput(
                    "a finite table cannot be a total length function on an infinite group".into(),
                ));
            }
            (_, LengthFn::Abs) => {
                return Err(Error::InvalidInput("|·| is only defined on ℤ and ℚ".into()));
            }
            (_, LengthFn::Table(values)) => {
                let k = self.order().expect("finite kind");
                if values.len() != k {
                    return Err(Error::InvalidInput("length table has wrong size".into()));
                }
                if values.iter().any(|v| v.is_negative()) {
                    return Err(Error::InvalidInput("negative length value".into()));
                }
                let e = self.identity_index().expect("finite kind");
                if !values[e].is_zero() {
                    return Err(Error::InvalidInput("length of the identity is not 0".into()));
                }
                for i in 0..k {
                    let gi = self.inv_index(i);
                    if values[gi] != values[i] {
                        return Err(Error::InvalidInput(format!(
                            "length is not symmetric at {}",
                            self.name_of(i)
                        )));
                    }
                    for j in 0..k {
                        let ij = self.mul_index(i, j);
                        if values[ij] > &values[i] + &values[j] {
                            return Err(Error::InvalidInput(format!(
                                "length subadditivity fails on ({}, {})",
                                self.name_of(i),
                                self.name_of(j)
                            )));
                        }
                    }
                }
            }
        }
        Ok(Arc::new(GroupOracle { kind: self.kind.clone(), length: Some(length) }))
    }

    /// The word-metric length on ℤ/kℤ: `min(i, k − i)`.
    pub fn cyclic_word_length(order: usize) -> LengthFn {
        LengthFn::Table(
            (0..order)
                .map(|i| BigRational::from_integer((i.min(order - i) as i64).into()))
                .collect(),
        )
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn declared_length(&self) -> Option<&LengthFn> {
        self.length.as_ref()
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.kind, GroupKind::Table { .. } | GroupKind::Cyclic { .. })
    }

    /// Number of elements for finite kinds.
    pub fn order(&self) -> Option<usize> {
        match &self.kind {
            GroupKind::Table { elements, .. } => Some(elements.len()),
            GroupKind::Cyclic { order } => Some(*order),
            _ => None,
        }
    }

    fn identity_index(&self) -> Option<usize> {
        match &self.kind {
            GroupKind::Table { identity, .. } => Some(*identity),
            GroupKind::Cyclic { .. } => Some(0),
            _ => None,
        }
    }

    fn mul_index(&self, i: usize, j: usize) -> usize {
        match &self.kind {
            GroupKind::Table { elements, mul, .. } => mul[i * elements.len() + j] as usize,
            GroupKind::Cyclic { order } => (i + j) % order,
            _ => unreachable!("index multiplication on infinite kind"),
        }
    }

    fn inv_index(&self, i: usize) -> usize {
        match &self.kind {
            GroupKind::Table { inv, .. } => inv[i] as usize,
            GroupKind::Cyclic { order } => (order - i) % order,
            _ => unreachable!("index inversion on infinite kind"),
        }
    }

    fn name_of(&self, i: usize) -> String {
        match &self.kind {
            GroupKind::Table { elements, .. } => elements[i].clone(),
            _ => i.to_string(),
        }
    }

    pub fn identity(&self) -> GElem {
        match &self.kind {
            GroupKind::Table { identity, .. } => GElem::Idx(*identity),
            GroupKind::Cyclic { .. } => GElem::Idx(0),
            GroupKind::Integers => GElem::Int(0),
            GroupKind::RationalsAdd => GElem::Rat(BigRational::zero()),
        }
    }

    pub fn contains(&self, g: &GElem) -> bool {
        match (&self.kind, g) {
            (GroupKind::Table { elements, .. }, GElem::Idx(i)) => *i < elements.len(),
            (GroupKind::Cyclic { order }, GElem::Idx(i)) => i < order,
            (GroupKind::Integers, GElem::Int(_)) => true,
            (GroupKind::RationalsAdd, GElem::Rat(_)) => true,
            _ => false,
        }
    }

    fn check_member(&self, g: &GElem, op: &str) -> Result<()> {
        if !self.contains(g) {
            return Err(Error::GroupMismatch { context: format!("{op}: {g} is not an element") });
        }
        Ok(())
    }

    pub fn mul(&self, a: &GElem, b: &GElem) -> Result<GElem> {
        self.check_member(a, "multiplication")?;
        self.check_member(b, "multiplication")?;
        Ok(match (&self.kind, a, b) {
            (GroupKind::Table { .. } | GroupKind::Cyclic { .. }, GElem::Idx(i), GElem::Idx(j)) => {
                GElem::Idx(self.mul_index(*i, *j))
            }
            (GroupKind::Integers, GElem::Int(x), GElem::Int(y)) => GElem::Int(
                x.checked_add(*y)
                    .ok_or_else(|| Error::InvalidInput("integer label overflow".into()))?,
            ),
            (GroupKind::RationalsAdd, GElem::Rat(x), GElem::Rat(y)) => GElem::Rat(x + y),
            _ => unreachable!("membership checked above"),
        })
    }

    pub fn inv(&self, a: &GElem) -> Result<GElem> {
        self.check_member(a, "inversion")?;
        Ok(match (&self.kind, a) {
            (GroupKind::Table { .. } | GroupKind::Cyclic { .. }, GElem::Idx(i)) => {
                GElem::Idx(self.inv_index(*i))
            }
            (GroupKind::Integers, GElem::Int(x)) => GElem::Int(
                x.checked_neg()
                    .ok_or_else(|| Error::InvalidInput("integer label overflow".into()))?,
            ),
            (GroupKind::RationalsAdd, GElem::Rat(x)) => GElem::Rat(-x),
            _ => unreachable!("membership checked above"),
        })
    }

    /// All elements of a finite group, in index order.
    pub fn elements(&self) -> Result<Vec<GElem>> {
        match self.order() {
            Some(k) => Ok((0..k).map(GElem::Idx).collect()),
            None => Err(Error::precondition("element enumeration needs a finite group")),
        }
    }

    /// Multiplicative order of an element of a finite group.
    pub fn element_order(&self, g: &GElem) -> Result<u64> {
        self.check_member(g, "element order")?;
        if !self.is_finite() {
            return Err(Error::precondition("element order is computed on finite groups only"));
        }
        let e = self.identity();
        let mut acc = g.clone();
        let mut ord = 1u64;
        while acc != e {
            acc = self.mul(&acc, g)?;
            ord += 1;
        }
        Ok(ord)
    }

    /// The declared (or built-in) length of an element.
    pub fn length(&self, g: &GElem) -> Result<BigRational> {
        self.check_member(g, "length")?;
        let Some(length) = &self.length else {
            return Err(Error::precondition("this group has no length function"));
        };
        Ok(match (length, g) {
            (LengthFn::Abs, GElem::Int(x)) => BigRational::from_integer(x.abs().into()),
            (LengthFn::Abs, GElem::Rat(x)) => x.abs(),
            (LengthFn::Table(values), GElem::Idx(i)) => values[*i].clone(),
            _ => unreachable!("length kind matches group kind by construction"),
        })
    }

    pub fn format_elem(&self, g: &GElem) -> String {
        match (&self.kind, g) {
            (GroupKind::Table { elements, .. }, GElem::Idx(i)) => elements[*i].clone(),
            (GroupKind::Cyclic { .. }, GElem::Idx(i)) => i.to_string(),
            _ => g.to_string(),
        }
    }

    pub fn parse_elem(&self, s: &str) -> Result<GElem> {
        let s = s.trim();
        match &self.kind {
            GroupKind::Table { elements, .. } => elements
                .iter()
                .position(|e| e == s)
                .map(GElem::Idx)
                .ok_or_else(|| Error::InvalidInput(format!("unknown group element {s:?}"))),
            GroupKind::Cyclic { order } => {
                let i: usize = s
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad cyclic label {s:?}")))?;
                if i >= *order {
                    return Err(Error::InvalidInput(format!(
                        "cyclic label {i} out of range 0..{order}"
                    )));
                }
                Ok(GElem::Idx(i))
            }
            GroupKind::Integers => s
                .parse::<i64>()
                .map(GElem::Int)
                .map_err(|_| Error::InvalidInput(format!("bad integer label {s:?}"))),
            GroupKind::RationalsAdd => Ok(GElem::Rat(parse_rational(s)?)),
        }
    }
}

/// The algebra as a finite group under symmetric difference, with
/// `ℓ(A) = φ(A)` as its length.
///
/// Requires `φ` to be a submeasure (verified exactly): then `ℓ(0) = 0`,
/// `ℓ(A⁻¹) = ℓ(A)` since every element is its own inverse, and
/// `ℓ(A△B) ≤ ℓ(A∨B) ≤ ℓ(A) + ℓ(B)` by monotonicity and subadditivity, so
/// the length laws hold without a pair scan. Element index equals the
/// subset mask.
pub fn symm_diff_group(algebra: &Arc<FiniteAlgebra>, phi: &SetFunc) -> Result<Arc<GroupOracle>> {
    if phi.algebra() != algebra {
        return Err(Error::AlgebraMismatch { context: "symmetric-difference group".into() });
    }
    let n = algebra.atom_count();
    if n > MAX_ATOMS_LP {
        return Err(Error::CapacityExceeded {
            what: "symmetric-difference group".into(),
            limit: MAX_ATOMS_LP,
            requested: n,
        });
    }
    if let Some(cx) = phi.find_subadditivity_violation() {
        return Err(Error::precondition_with(
            "symmetric-difference group needs a submeasure length",
            cx.to_string(),
        ));
    }
    let size = algebra.size();
    let elements: Vec<String> = all_elements(algebra).map(|e| e.to_string()).collect();
    let mut mul = vec![0u32; size * size];
    for a in 0..size {
        for b in 0..size {
            mul[a * size + b] = (a ^ b) as u32;
        }
    }
    let inv: Vec<u32> = (0..size as u32).collect();
    let length = LengthFn::Table(phi.values().to_vec());
    Ok(GroupOracle::from_cayley_table_unchecked(elements, mul, inv, 0, Some(length)))
}

/// The element of a symmetric-difference group corresponding to an algebra
/// element (index = mask).
pub fn symm_diff_elem(a: &Elem) -> GElem {
    GElem::Idx(a.mask() as usize)
}

/// A symmetric identity neighborhood: an explicit finite subset or a closed
/// ball of the built-in length on ℤ or ℚ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Neighborhood {
    FiniteSubset(BTreeSet<GElem>),
    Ball(BigRational),
}

impl Neighborhood {
    /// An explicit finite subset; must contain the identity and be symmetric.
    pub fn finite(group: &GroupOracle, elems: impl IntoIterator<Item = GElem>) -> Result<Self> {
        let set: BTreeSet<GElem> = elems.into_iter().collect();
        for g in &set {
            if !group.contains(g) {
                return Err(Error::GroupMismatch {
                    context: format!("neighborhood member {g} is not a group element"),
                });
            }
        }
        if !set.contains(&group.identity()) {
            return Err(Error::InvalidInput("neighborhood must contain the identity".into()));
        }
        for g in &set {
            if !set.contains(&group.inv(g)?) {
                return Err(Error::InvalidInput(format!(
                    "neighborhood is not symmetric: misses the inverse of {g}"
                )));
            }
        }
        Ok(Neighborhood::FiniteSubset(set))
    }

    /// `{g : |g| ≤ r}` on ℤ or ℚ.
    pub fn ball(group: &GroupOracle, radius: BigRational) -> Result<Self> {
        if !matches!(group.kind(), GroupKind::Integers | GroupKind::RationalsAdd) {
            return Err(Error::precondition(
                "balls are defined on ℤ and ℚ; use sublevel sets on finite groups",
            ));
        }
        if radius.is_negative() {
            return Err(Error::InvalidInput(
                "a ball of negative radius misses the identity".into(),
            ));
        }
        Ok(Neighborhood::Ball(radius))
    }

    /// The sublevel set `{g : f(g) ≤ r}` of a length function on a finite group.
    pub fn sublevel(group: &GroupOracle, r: &BigRational) -> Result<Self> {
        if !group.is_finite() {
            return Err(Error::precondition("sublevel neighborhoods need a finite group"));
        }
        if r.is_negative() {
            return Err(Error::InvalidInput(
                "sublevel at negative radius misses the identity".into(),
            ));
        }
        let mut set = BTreeSet::new();
        for g in group.elements()? {
            if group.length(&g)? <= *r {
                set.insert(g);
            }
        }
        Ok(Neighborhood::FiniteSubset(set))
    }

    pub fn contains(&self, group: &GroupOracle, g: &GElem) -> Result<bool> {
        match self {
            Neighborhood::FiniteSubset(set) => Ok(set.contains(g)),
            Neighborhood::Ball(r) => Ok(group.length(g)? <= *r),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    #[test]
    fn cyclic_group_laws() {
        let g = GroupOracle::cyclic(4).unwrap();
        let e = g.identity();
        for i in 0..4 {
            let a = GElem::Idx(i);
            assert_eq!(g.mul(&a, &g.inv(&a).unwrap()).unwrap(), e);
            for j in 0..4 {
                let b = GElem::Idx(j);
                assert_eq!(g.mul(&a, &b).unwrap(), GElem::Idx((i + j) % 4));
            }
        }
        assert_eq!(g.element_order(&GElem::Idx(1)).unwrap(), 4);
        assert_eq!(g.element_order(&GElem::Idx(2)).unwrap(), 2);
    }

    #[test]
    fn symmetric_group_s3() {
        let s3 = GroupOracle::symmetric(3).unwrap();
        assert_eq!(s3.order(), Some(6));
        // Non-abelian witness.
        let elems = s3.elements().unwrap();
        let non_commuting = elems
            .iter()
            .any(|a| elems.iter().any(|b| s3.mul(a, b).unwrap() != s3.mul(b, a).unwrap()));
        assert!(non_commuting);
        // Exhaustive group laws (the constructor validated them; replay a few).
        let e = s3.identity();
        for a in &elems {
            assert_eq!(s3.mul(a, &s3.inv(a).unwrap()).unwrap(), e);
        }
    }

    #[test]
    fn cayley_validation_rejects_bad_tables() {
        // Broken associativity / identity: a 2-element "table" with wrong entries.
        let bad = GroupOracle::from_cayley_table(
            vec!["e".into(), "a".into()],
            vec![0, 1, 1, 1],
            vec![0, 1],
        );
        assert!(bad.is_err());
        // Z2 works.
        let z2 = GroupOracle::from_cayley_table(
            vec!["e".into(), "a".into()],
            vec![0, 1, 1, 0],
            vec![0, 1],
        )
        .unwrap();
        assert_eq!(z2.identity(), GElem::Idx(0));
    }

    #[test]
    fn integer_and_rational_oracles() {
        let z = GroupOracle::integers();
        assert_eq!(z.mul(&GElem::Int(3), &GElem::Int(-5)).unwrap(), GElem::Int(-2));
        assert_eq!(z.length(&GElem::Int(-7)).unwrap(), rat_int(7));
        let q = GroupOracle::rationals_additive();
        assert_eq!(
            q.mul(&GElem::Rat(rat(1, 2)), &GElem::Rat(rat(1, 3))).unwrap(),
            GElem::Rat(rat(5, 6))
        );
        assert_eq!(q.length(&GElem::Rat(rat(-2, 3))).unwrap(), rat(2, 3));
        // Variant mismatch is a group mismatch.
        assert!(z.mul(&GElem::Int(1), &GElem::Idx(0)).is_err());
    }

    #[test]
    fn length_table_validation() {
        let z4 = GroupOracle::cyclic(4).unwrap();
        let good = z4.with_length(GroupOracle::cyclic_word_length(4)).unwrap();
        assert_eq!(good.length(&GElem::Idx(3)).unwrap(), rat_int(1));
        // Asymmetric length rejected.
        let bad =
            z4.with_length(LengthFn::Table(vec![rat_int(0), rat_int(1), rat_int(1), rat_int(2)]));
        assert!(bad.is_err());
        // Nonzero at identity rejected.
        let bad = z4.with_length(LengthFn::Table(vec![rat_int(1); 4]));
        assert!(bad.is_err());
        // Subadditivity violation rejected: f(1)=f(3)=1 but f(2)=5 > 2.
        let bad =
            z4.with_length(LengthFn::Table(vec![rat_int(0), rat_int(1), rat_int(5), rat_int(1)]));
        assert!(bad.is_err());
    }

    #[test]
    fn symm_diff_group_is_elementary_abelian() {
        let alg = FiniteAlgebra::numbered(2).unwrap();
        let phi = SetFunc::atom_measure(&alg, vec![rat(1, 2), rat(1, 2)]).unwrap();
        let g = symm_diff_group(&alg, &phi).unwrap();
        assert_eq!(g.order(), Some(4));
        let e = g.identity();
        for i in 0..4usize {
            let a = GElem::Idx(i);
            // Every element is an involution.
            assert_eq!(g.mul(&a, &a).unwrap(), e);
        }
        // Length is φ:
        assert_eq!(g.length(&GElem::Idx(0b11)).unwrap(), rat_int(1));
        // Length subadditivity for all pairs (n = 2, exhaustive).
        for i in 0..4usize {
            for j in 0..4usize {
                let lij = g.length(&g.mul(&GElem::Idx(i), &GElem::Idx(j)).unwrap()).unwrap();
                assert!(
                    lij <= g.length(&GElem::Idx(i)).unwrap() + g.length(&GElem::Idx(j)).unwrap()
                );
            }
        }
    }

    #[test]
    fn symm_diff_group_rejects_non_submeasure() {
        let alg = FiniteAlgebra::numbered(2).unwrap();
        let vals = vec![rat_int(0), rat_int(1), rat_int(1), rat_int(3)];
        let phi = SetFunc::from_table(&alg, vals).unwrap();
        assert!(symm_diff_group(&alg, &phi).is_err());
    }

    #[test]
    fn neighborhood_validation() {
        let z4 = GroupOracle::cyclic(4).unwrap();
        // Missing identity.
        assert!(Neighborhood::finite(&z4, [GElem::Idx(1), GElem::Idx(3)]).is_err());
        // Not symmetric (1⁻¹ = 3 missing).
        assert!(Neighborhood::finite(&z4, [GElem::Idx(0), GElem::Idx(1)]).is_err());
        // Good.
        let u = Neighborhood::finite(&z4, [GElem::Idx(0), GElem::Idx(1), GElem::Idx(3)]).unwrap();
        assert!(u.contains(&z4, &GElem::Idx(1)).unwrap());
        assert!(!u.contains(&z4, &GElem::Idx(2)).unwrap());
        // Balls only on ℤ/ℚ.
        assert!(Neighborhood::ball(&z4, rat_int(1)).is_err());
        let z = GroupOracle::integers();
        let b = Neighborhood::ball(&z, rat(5, 2)).unwrap();
        assert!(b.contains(&z, &GElem::Int(-2)).unwrap());
        assert!(!b.contains(&z, &GElem::Int(3)).unwrap());
        assert!(Neighborhood::ball(&z, rat_int(-1)).is_err());
        // Sublevel on finite groups with length.
        let z4l = z4.with_length(GroupOracle::cyclic_word_length(4)).unwrap();
        let s = Neighborhood::sublevel(&z4l, &rat_int(1)).unwrap();
        assert!(s.contains(&z4l, &GElem::Idx(3)).unwrap());
        assert!(!s.contains(&z4l, &GElem::Idx(2)).unwrap());
    }

    #[test]
    fn parse_and_format_elements() {
        let z = GroupOracle::integers();
        assert_eq!(z.parse_elem("-3").unwrap(), GElem::Int(-3));
        let z4 = GroupOracle::cyclic(4).unwrap();
        assert_eq!(z4.parse_elem("2").unwrap(), GElem::Idx(2));
        assert!(z4.parse_elem("4").is_err());
        let s3 = GroupOracle::symmetric(3).unwrap();
        let g = s3.parse_elem("021").unwrap();
        assert_eq!(s3.format_elem(&g), "021");
    }
}
