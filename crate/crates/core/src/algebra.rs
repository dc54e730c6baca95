//! Finite Boolean algebras: powersets of a named atom set.
//!
//! Elements are encoded as subset bitmasks, so every lattice operation is a
//! single bitwise instruction and equality is exact. Partitions of unity,
//! two-valued homomorphisms, atom-generated ideals with their quotients, and
//! general join-monoid homomorphisms (join- and zero-preserving maps, stored
//! as full tables) live here as well.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Hard cap on atom count: masks fit in a `u32` and tables in memory.
pub const MAX_ATOMS: usize = 16;
/// Cap for exhaustive enumeration of partitions of unity.
pub const MAX_ATOMS_PARTITION_ENUM: usize = 10;
/// Cap for exhaustive scans over all pairs of elements.
pub const MAX_ATOMS_EXHAUSTIVE_PAIRS: usize = 8;

/// The powerset Boolean algebra on an ordered list of named atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAlgebra {
    atoms: Vec<String>,
}

impl FiniteAlgebra {
    pub fn new(atoms: Vec<String>) -> Result<Arc<Self>> {
        if atoms.is_empty() {
            return Err(Error::InvalidInput("an algebra needs at least one atom".into()));
        }
        if atoms.len() > MAX_ATOMS {
            return Err(Error::CapacityExceeded {
                what: "atom count".into(),
                limit: MAX_ATOMS,
                requested: atoms.len(),
            });
        }
        for (i, a) in atoms.iter().enumerate() {
            if a.is_empty() {
                return Err(Error::InvalidInput(format!("atom {i} has an empty name")));
            }
            if atoms[..i].contains(a) {
                return Err(Error::InvalidInput(format!("duplicate atom name {a:?}")));
            }
        }
        Ok(Arc::new(FiniteAlgebra { atoms }))
    }

    /// Convenience constructor with atom names `"0".."n-1"`.
    pub fn numbered(n: usize) -> Result<Arc<Self>> {
        Self::new((0..n).map(|i| i.to_string()).collect())
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom_names(&self) -> &[String] {
        &self.atoms
    }

    pub fn atom_index(&self, name: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a == name)
    }

    /// Number of elements, `2^n`.
    pub fn size(&self) -> usize {
        1usize << self.atoms.len()
    }

    fn full_mask(&self) -> u32 {
        ((1u64 << self.atoms.len()) - 1) as u32
    }
}

/// An element of a [`FiniteAlgebra`], canonically a subset bitmask.
#[derive(Clone)]
pub struct Elem {
    algebra: Arc<FiniteAlgebra>,
    mask: u32,
}

impl PartialEq for Elem {
    fn eq(&self, other: &Self) -> bool {
        self.mask == other.mask && self.algebra == other.algebra
    }
}
impl Eq for Elem {}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Elem({self})")
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.atom_names().join(","))
    }
}

impl Elem {
    pub fn from_mask(algebra: &Arc<FiniteAlgebra>, mask: u32) -> Result<Self> {
        if u64::from(mask) > u64::from(algebra.full_mask()) {
            return Err(Error::InvalidInput(format!(
                "mask {mask} out of range for an algebra on {} atoms",
                algebra.atom_count()
            )));
        }
        Ok(Elem { algebra: Arc::clone(algebra), mask })
    }

    pub fn from_atom_names(
        algebra: &Arc<FiniteAlgebra>,
        names: &[impl AsRef<str>],
    ) -> Result<Self> {
        let mut mask = 0u32;
        for name in names {
            let name = name.as_ref();
            let idx = algebra
                .atom_index(name)
                .ok_or_else(|| Error::InvalidInput(format!("unknown atom {name:?}")))?;
            mask |= 1 << idx;
        }
        Ok(Elem { algebra: Arc::clone(algebra), mask })
    }

    pub fn zero(algebra: &Arc<FiniteAlgebra>) -> Self {
        Elem { algebra: Arc::clone(algebra), mask: 0 }
    }

    pub fn one(algebra: &Arc<FiniteAlgebra>) -> Self {
        Elem { algebra: Arc::clone(algebra), mask: algebra.full_mask() }
    }

    pub fn atom(algebra: &Arc<FiniteAlgebra>, index: usize) -> Result<Self> {
        if index >= algebra.atom_count() {
            return Err(Error::InvalidInput(format!(
                "atom index {index} out of range (n = {})",
                algebra.atom_count()
            )));
        }
        Ok(Elem { algebra: Arc::clone(algebra), mask: 1 << index })
    }

    pub fn algebra(&self) -> &Arc<FiniteAlgebra> {
        &self.algebra
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn is_zero(&self) -> bool {
        self.mask == 0
    }

    pub fn is_one(&self) -> bool {
        self.mask == self.algebra.full_mask()
    }

    /// Number of atoms below this element.
    pub fn atom_cardinality(&self) -> u32 {
        self.mask.count_ones()
    }

    /// Indices of the atoms below this element, ascending.
    pub fn atom_indices(&self) -> Vec<usize> {
        (0..self.algebra.atom_count()).filter(|i| self.mask & (1 << i) != 0).collect()
    }

    /// Names of the atoms below this element, in atom order.
    pub fn atom_names(&self) -> Vec<String> {
        self.atom_indices().iter().map(|&i| self.algebra.atoms[i].clone()).collect()
    }

    fn check_same_algebra(&self, other: &Elem, op: &str) -> Result<()> {
        if self.algebra != other.algebra {
            return Err(Error::AlgebraMismatch {
                context: format!("{op} on elements of different algebras ({self} vs {other})"),
            });
        }
        Ok(())
    }

    pub fn meet(&self, other: &Elem) -> Result<Elem> {
        self.check_same_algebra(other, "meet")?;
        Ok(Elem { algebra: Arc::clone(&self.algebra), mask: self.mask & other.mask })
    }

    pub fn join(&self, other: &Elem) -> Result<Elem> {
        self.check_same_algebra(other, "join")?;
        Ok(Elem { algebra: Arc::clone(&self.algebra), mask: self.mask | other.mask })
    }

    pub fn complement(&self) -> Elem {
        Elem { algebra: Arc::clone(&self.algebra), mask: !self.mask & self.algebra.full_mask() }
    }

    pub fn symm_diff(&self, other: &Elem) -> Result<Elem> {
        self.check_same_algebra(other, "symmetric difference")?;
        Ok(Elem { algebra: Arc::clone(&self.algebra), mask: self.mask ^ other.mask })
    }

    /// Relative complement `self ∧ ¬other`.
    pub fn minus(&self, other: &Elem) -> Result<Elem> {
        self.check_same_algebra(other, "difference")?;
        Ok(Elem { algebra: Arc::clone(&self.algebra), mask: self.mask & !other.mask })
    }

    /// Boolean-algebra order: `self ≤ other` as subset containment.
    pub fn leq(&self, other: &Elem) -> Result<bool> {
        self.check_same_algebra(other, "order comparison")?;
        Ok(self.mask & !other.mask == 0)
    }
}

/// Iterator over all elements of an algebra, in mask order.
pub fn all_elements(algebra: &Arc<FiniteAlgebra>) -> impl Iterator<Item = Elem> + '_ {
    let alg = Arc::clone(algebra);
    (0..algebra.size() as u32).map(move |m| Elem { algebra: Arc::clone(&alg), mask: m })
}

/// Why a cell set fails to be a partition of unity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionViolation {
    ZeroCell,
    NotDisjoint { first: u32, second: u32 },
    JoinNotOne { join: u32 },
    Mixed,
}

impl fmt::Display for PartitionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartitionViolation::ZeroCell => write!(f, "a cell is 0"),
            PartitionViolation::NotDisjoint { first, second } => {
                write!(f, "cells with masks {first} and {second} are not disjoint")
            }
            PartitionViolation::JoinNotOne { join } => {
                write!(f, "join of all cells has mask {join}, not 1")
            }
            PartitionViolation::Mixed => write!(f, "cells come from different algebras"),
        }
    }
}

/// A finite partition of unity: nonzero, pairwise disjoint cells joining to 1.
///
/// Cells are kept sorted by mask, so two partitions are equal iff they have
/// the same cell set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionOfUnity {
    algebra: Arc<FiniteAlgebra>,
    cells: Vec<Elem>,
}

/// Checks the partition-of-unity clauses and names the first violated one.
pub fn check_partition(algebra: &Arc<FiniteAlgebra>, cells: &[Elem]) -> Option<PartitionViolation> {
    if cells.iter().any(|c| c.algebra() != algebra) {
        return Some(PartitionViolation::Mixed);
    }
    if let Some(z) = cells.iter().find(|c| c.is_zero()) {
        let _ = z;
        return Some(PartitionViolation::ZeroCell);
    }
    for (i, a) in cells.iter().enumerate() {
        for b in &cells[i + 1..] {
            if a.mask & b.mask != 0 {
                return Some(PartitionViolation::NotDisjoint { first: a.mask, second: b.mask });
            }
        }
    }
    let join = cells.iter().fold(0u32, |acc, c| acc | c.mask);
    if join != algebra.full_mask() {
        return Some(PartitionViolation::JoinNotOne { join });
    }
    None
}

impl PartitionOfUnity {
    pub fn new(algebra: &Arc<FiniteAlgebra>, cells: Vec<Elem>) -> Result<Self> {
        if let Some(v) = check_partition(algebra, &cells) {
            return Err(Error::InvalidInput(format!("not a partition of unity: {v}")));
        }
        let mut cells = cells;
        cells.sort_by_key(|c| c.mask);
        cells.dedup_by_key(|c| c.mask);
        Ok(PartitionOfUnity { algebra: Arc::clone(algebra), cells })
    }

    /// The finest partition: one cell per atom.
    pub fn atoms(algebra: &Arc<FiniteAlgebra>) -> Self {
        let cells = (0..algebra.atom_count())
            .map(|i| Elem { algebra: Arc::clone(algebra), mask: 1 << i })
            .collect();
        PartitionOfUnity { algebra: Arc::clone(algebra), cells }
    }

    /// The coarsest partition `{1}`.
    pub fn trivial(algebra: &Arc<FiniteAlgebra>) -> Self {
        PartitionOfUnity { algebra: Arc::clone(algebra), cells: vec![Elem::one(algebra)] }
    }

    pub fn algebra(&self) -> &Arc<FiniteAlgebra> {
        &self.algebra
    }

    pub fn cells(&self) -> &[Elem] {
        &self.cells
    }

    /// `self ⪯ other`: every cell of `other` lies below some cell of `self`,
    /// i.e. `other` refines `self`.
    pub fn coarsens(&self, other: &PartitionOfUnity) -> Result<bool> {
        if self.algebra != other.algebra {
            return Err(Error::AlgebraMismatch { context: "partition comparison".into() });
        }
        Ok(other.cells.iter().all(|q| self.cells.iter().any(|p| q.mask & !p.mask == 0)))
    }

    /// Common refinement: the partition of all nonzero pairwise meets.
    /// The result refines both inputs.
    pub fn common_refinement(&self, other: &PartitionOfUnity) -> Result<PartitionOfUnity> {
        if self.algebra != other.algebra {
            return Err(Error::AlgebraMismatch { context: "common refinement".into() });
        }
        let mut cells = Vec::new();
        for p in &self.cells {
            for q in &other.cells {
                let m = p.mask & q.mask;
                if m != 0 {
                    cells.push(Elem { algebra: Arc::clone(&self.algebra), mask: m });
                }
            }
        }
        PartitionOfUnity::new(&self.algebra, cells)
    }
}

/// Enumerates every partition of unity of the algebra exactly once.
///
/// Cells of a partition of unity are unions of atoms, so these are exactly
/// the set partitions of the atom set; the count is the Bell number `B(n)`.
/// Enumeration is by restricted-growth strings, so the order is deterministic.
pub fn enumerate_partitions(algebra: &Arc<FiniteAlgebra>) -> Result<Vec<PartitionOfUnity>> {
    let n = algebra.atom_count();
    if n > MAX_ATOMS_PARTITION_ENUM {
        return Err(Error::CapacityExceeded {
            what: "partition enumeration".into(),
            limit: MAX_ATOMS_PARTITION_ENUM,
            requested: n,
        });
    }
    let mut out = Vec::new();
    // Restricted-growth string: rgs[0] = 0, rgs[i] <= 1 + max(rgs[..i]).
    let mut rgs = vec![0usize; n];
    loop {
        let blocks = rgs.iter().copied().max().unwrap_or(0) + 1;
        let mut masks = vec![0u32; blocks];
        for (atom, &b) in rgs.iter().enumerate() {
            masks[b] |= 1 << atom;
        }
        let cells =
            masks.into_iter().map(|m| Elem { algebra: Arc::clone(algebra), mask: m }).collect();
        out.push(PartitionOfUnity::new(algebra, cells)?);

        // Advance to the next restricted-growth string.
        let mut i = n;
        loop {
            if i == 1 {
                return Ok(out);
            }
            i -= 1;
            let max_prefix = rgs[..i].iter().copied().max().unwrap_or(0);
            if rgs[i] <= max_prefix {
                rgs[i] += 1;
                for v in rgs[i + 1..].iter_mut() {
                    *v = 0;
                }
                break;
            }
        }
    }
}

/// A two-valued homomorphism `χ: 𝒜 → 2`, i.e. the principal ultrafilter at
/// one atom: `χ(A) = 1` iff the atom lies below `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoValuedHom {
    algebra: Arc<FiniteAlgebra>,
    atom: usize,
}

impl TwoValuedHom {
    pub fn new(algebra: &Arc<FiniteAlgebra>, atom: usize) -> Result<Self> {
        if atom >= algebra.atom_count() {
            return Err(Error::InvalidInput(format!(
                "atom index {atom} out of range (n = {})",
                algebra.atom_count()
            )));
        }
        Ok(TwoValuedHom { algebra: Arc::clone(algebra), atom })
    }

    pub fn atom(&self) -> usize {
        self.atom
    }

    pub fn eval(&self, a: &Elem) -> Result<bool> {
        if a.algebra() != &self.algebra {
            return Err(Error::AlgebraMismatch { context: "two-valued hom evaluation".into() });
        }
        Ok(a.mask & (1 << self.atom) != 0)
    }

    pub fn all(algebra: &Arc<FiniteAlgebra>) -> Vec<TwoValuedHom> {
        (0..algebra.atom_count())
            .map(|atom| TwoValuedHom { algebra: Arc::clone(algebra), atom })
            .collect()
    }
}

/// A join- and zero-preserving map between algebras, stored as a full table.
///
/// These are strictly more general than Boolean homomorphisms (they need not
/// respect meets or complements), which is why the full `2^n`-entry table is
/// kept instead of atom images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VeeMonoidHom {
    source: Arc<FiniteAlgebra>,
    target: Arc<FiniteAlgebra>,
    table: Vec<u32>,
}

impl VeeMonoidHom {
    /// Builds a hom from a full table, verifying `θ(0)=0` and
    /// `θ(A∨B)=θ(A)∨θ(B)` exhaustively. Requires `n ≤ MAX_ATOMS_EXHAUSTIVE_PAIRS`;
    /// use [`VeeMonoidHom::new_sampled`] above that.
    pub fn new(
        source: &Arc<FiniteAlgebra>,
        target: &Arc<FiniteAlgebra>,
        table: Vec<u32>,
    ) -> Result<Self> {
        let n = source.atom_count();
        if n > MAX_ATOMS_EXHAUSTIVE_PAIRS {
            return Err(Error::CapacityExceeded {
                what: "exhaustive join-monoid hom verification".into(),
                limit: MAX_ATOMS_EXHAUSTIVE_PAIRS,
                requested: n,
            });
        }
        let hom = Self::check_shape(source, target, table)?;
        for a in 0..hom.source.size() as u32 {
            for b in 0..hom.source.size() as u32 {
                if hom.table[(a | b) as usize] != hom.table[a as usize] | hom.table[b as usize] {
                    return Err(Error::InvalidInput(format!(
                        "join law fails: θ({} ∨ {}) ≠ θ({}) ∨ θ({})",
                        a, b, a, b
                    )));
                }
            }
        }
        Ok(hom)
    }

    /// Builds a hom with seeded sampled verification of the join law, for
    /// sources too large to scan exhaustively.
    pub fn new_sampled(
        source: &Arc<FiniteAlgebra>,
        target: &Arc<FiniteAlgebra>,
        table: Vec<u32>,
        seed: u64,
        samples: usize,
    ) -> Result<Self> {
        let hom = Self::check_shape(source, target, table)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let size = hom.source.size() as u32;
        for _ in 0..samples {
            let a = rng.gen_range(0..size);
            let b = rng.gen_range(0..size);
            if hom.table[(a | b) as usize] != hom.table[a as usize] | hom.table[b as usize] {
                return Err(Error::InvalidInput(format!(
                    "join law fails on sampled pair (masks {a}, {b})"
                )));
            }
        }
        Ok(hom)
    }

    fn check_shape(
        source: &Arc<FiniteAlgebra>,
        target: &Arc<FiniteAlgebra>,
        table: Vec<u32>,
    ) -> Result<Self> {
        if table.len() != source.size() {
            return Err(Error::InvalidInput(format!(
                "hom table has {} entries, source algebra has {}",
                table.len(),
                source.size()
            )));
        }
        let tmax = ((1u64 << target.atom_count()) - 1) as u32;
        if table.iter().any(|&m| u64::from(m) > u64::from(tmax)) {
            return Err(Error::InvalidInput("hom table entry out of target range".into()));
        }
        if table[0] != 0 {
            return Err(Error::InvalidInput("θ(0) ≠ 0".into()));
        }
        Ok(VeeMonoidHom { source: Arc::clone(source), target: Arc::clone(target), table })
    }

    pub fn identity(algebra: &Arc<FiniteAlgebra>) -> Self {
        VeeMonoidHom {
            source: Arc::clone(algebra),
            target: Arc::clone(algebra),
            table: (0..algebra.size() as u32).collect(),
        }
    }

    /// The map sending everything to 0 (a valid join-monoid hom).
    pub fn constant_zero(source: &Arc<FiniteAlgebra>, target: &Arc<FiniteAlgebra>) -> Self {
        VeeMonoidHom {
            source: Arc::clone(source),
            target: Arc::clone(target),
            table: vec![0; source.size()],
        }
    }

    pub fn source(&self) -> &Arc<FiniteAlgebra> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteAlgebra> {
        &self.target
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub fn apply(&self, a: &Elem) -> Result<Elem> {
        if a.algebra() != &self.source {
            return Err(Error::AlgebraMismatch { context: "hom application".into() });
        }
        Elem::from_mask(&self.target, self.table[a.mask() as usize])
    }
}

/// An ideal of the powerset algebra. Every ideal of a finite powerset algebra
/// is generated by a set of atoms, so that is the stored form: members are
/// exactly the subsets of the generator set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ideal {
    algebra: Arc<FiniteAlgebra>,
    generators: u32,
}

impl Ideal {
    pub fn generated_by_atoms(
        algebra: &Arc<FiniteAlgebra>,
        atom_indices: &[usize],
    ) -> Result<Self> {
        let mut generators = 0u32;
        for &i in atom_indices {
            if i >= algebra.atom_count() {
                return Err(Error::InvalidInput(format!("atom index {i} out of range")));
            }
            generators |= 1 << i;
        }
        Ok(Ideal { algebra: Arc::clone(algebra), generators })
    }

    pub fn trivial(algebra: &Arc<FiniteAlgebra>) -> Self {
        Ideal { algebra: Arc::clone(algebra), generators: 0 }
    }

    pub fn contains(&self, a: &Elem) -> Result<bool> {
        if a.algebra() != &self.algebra {
            return Err(Error::AlgebraMismatch { context: "ideal membership".into() });
        }
        Ok(a.mask() & !self.generators == 0)
    }

    pub fn generator_mask(&self) -> u32 {
        self.generators
    }
}

/// Quotients the algebra by an atom-generated ideal.
///
/// The quotient algebra keeps the surviving atoms and the projection is
/// `θ(A) = A ∖ S`, a Boolean homomorphism (hence in particular a join-monoid
/// homomorphism). Rejects the degenerate case where no atom survives.
pub fn quotient_by_ideal(
    algebra: &Arc<FiniteAlgebra>,
    ideal: &Ideal,
) -> Result<(Arc<FiniteAlgebra>, VeeMonoidHom)> {
    if &ideal.algebra != algebra {
        return Err(Error::AlgebraMismatch { context: "quotient".into() });
    }
    let surviving: Vec<usize> =
        (0..algebra.atom_count()).filter(|i| ideal.generators & (1 << i) == 0).collect();
    if surviving.is_empty() {
        return Err(Error::InvalidInput(
            "quotient by the whole algebra is degenerate (no surviving atom)".into(),
        ));
    }
    let quotient =
        FiniteAlgebra::new(surviving.iter().map(|&i| algebra.atoms[i].clone()).collect())?;
    let mut table = Vec::with_capacity(algebra.size());
    for mask in 0..algebra.size() as u32 {
        let mut image = 0u32;
        for (new_idx, &old_idx) in surviving.iter().enumerate() {
            if mask & (1 << old_idx) != 0 {
                image |= 1 << new_idx;
            }
        }
        table.push(image);
    }
    let hom = VeeMonoidHom { source: Arc::clone(algebra), target: Arc::clone(&quotient), table };
    Ok((quotient, hom))
}
