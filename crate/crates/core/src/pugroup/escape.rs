//! Escape dynamics: shrinking neighborhoods `(1/n)U`, traps, escape
//! functions, and the Følner-set counting inequality.
//!
//! `(1/n)U = {g : g¹, …, gⁿ ∈ U}` decreases in `n` and, on a finite group,
//! stabilizes at the maximal element order to `trap(U)`, the union of all
//! subgroups contained in `U`. Whether a length function is an escape
//! function for `U` is therefore decidable exactly: it holds iff the
//! function vanishes on `trap(U)`. On ℤ with `U = Ball(r)` one has
//! `(1/n)U = Ball(⌊r/n⌋)` and `trap(U) = {0}`, so every length function
//! escapes there.

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::floor_int;

use super::group::{GElem, GroupKind, GroupOracle, LengthFn, Neighborhood};

/// `(1/n)U = {g : g¹, …, gⁿ ∈ U}`. Exact on finite groups and on ℤ-balls
/// (`= Ball(⌊r/n⌋)`); refused on ℚ, where no stabilization exists.
pub fn one_over_n(group: &GroupOracle, u: &Neighborhood, n: u64) -> Result<Neighborhood> {
    if n == 0 {
        return Err(Error::InvalidInput("(1/n)U needs n ≥ 1".into()));
    }
    match (group.kind(), u) {
        (GroupKind::Integers, Neighborhood::Ball(r)) => {
            // |kg| ≤ r for k = 1..n is tightest at k = n.
            let shrunk =
                BigRational::from_integer(floor_int(&(r / BigRational::from_integer(n.into()))));
            Ok(Neighborhood::Ball(shrunk))
        }
        (GroupKind::Integers | GroupKind::RationalsAdd, _) => {
            Err(Error::precondition("(1/n)U is computed on finite groups and on ℤ-balls only"))
        }
        (_, _) => {
            let mut kept = BTreeSet::new();
            for g in group.elements()? {
                let mut power = g.clone();
                let mut inside = true;
                for _ in 0..n {
                    if !u.contains(group, &power)? {
                        inside = false;
                        break;
                    }
                    power = group.mul(&power, &g)?;
                }
                if inside {
                    kept.insert(g);
                }
            }
            Ok(Neighborhood::FiniteSubset(kept))
        }
    }
}

/// `trap(U)`: the union of all subgroups contained in `U`, equivalently
/// `{g : ⟨g⟩ ⊆ U} = ∩_n (1/n)U`. On a finite group the intersection
/// stabilizes at the maximal element order; on ℤ-balls it is `{0}`.
pub fn trap(group: &GroupOracle, u: &Neighborhood) -> Result<Neighborhood> {
    match (group.kind(), u) {
        (GroupKind::Integers, Neighborhood::Ball(_)) => {
            // No nontrivial subgroup of ℤ fits in a finite ball.
            Ok(Neighborhood::FiniteSubset([GElem::Int(0)].into()))
        }
        (GroupKind::Integers | GroupKind::RationalsAdd, _) => {
            Err(Error::precondition("trap is computed on finite groups and on ℤ-balls only"))
        }
        (_, _) => {
            let mut kept = BTreeSet::new();
            for g in group.elements()? {
                let ord = group.element_order(&g)?;
                let mut power = g.clone();
                let mut inside = true;
                for _ in 0..ord {
                    if !u.contains(group, &power)? {
                        inside = false;
                        break;
                    }
                    power = group.mul(&power, &g)?;
                }
                if inside {
                    kept.insert(g);
                }
            }
            Ok(Neighborhood::FiniteSubset(kept))
        }
    }
}

/// The index at which `(1/n)U` stabilizes on a finite group: the maximal
/// element order.
pub fn stabilization_index(group: &GroupOracle) -> Result<u64> {
    let mut max = 1;
    for g in group.elements()? {
        max = max.max(group.element_order(&g)?);
    }
    Ok(max)
}

/// The verdict of an escape-function check, with the per-ε trace of minimal
/// shrink indices.
#[derive(Debug, Clone)]
pub struct EscapeVerdict {
    pub is_escape: bool,
    /// An element of `trap(U)` with positive length, when not an escape function.
    pub witness: Option<GElem>,
    /// For each requested ε: the minimal `n ≤ n_max` with
    /// `(1/n)U ⊆ f⁻¹([0,ε))`, if any.
    pub trace: Vec<(BigRational, Option<u64>)>,
}

/// Decides exactly whether `f` (a length function on the group) is an escape
/// function with escape neighborhood `U`.
///
/// On finite groups: `(1/n)U` stabilizes to `trap(U)`, so the defining
/// `∀ε ∃n` quantifier is equivalent to `f ≡ 0` on `trap(U)` — no sampling.
/// On ℤ with a ball: `trap = {0}` and `f(0) = 0`, so every length function
/// escapes. Refused on ℚ.
pub fn is_escape_function(
    group: &GroupOracle,
    f: &LengthFn,
    u: &Neighborhood,
    eps_grid: &[BigRational],
    n_max: u64,
) -> Result<EscapeVerdict> {
    if let (LengthFn::Table(values), Some(k)) = (f, group.order()) {
        if values.len() != k {
            return Err(Error::InvalidInput(format!(
                "length table has {} entries for a group of order {k}",
                values.len()
            )));
        }
    }
    let eval = |g: &GElem| -> Result<BigRational> {
        match (f, g) {
            (LengthFn::Abs, GElem::Int(x)) => Ok(BigRational::from_integer(x.abs().into())),
            (LengthFn::Table(values), GElem::Idx(i)) => Ok(values[*i].clone()),
            _ => Err(Error::InvalidInput("length function does not match the group kind".into())),
        }
    };
    match group.kind() {
        GroupKind::RationalsAdd => {
            Err(Error::precondition("escape checks on ℚ have no stabilization; refused"))
        }
        GroupKind::Integers => {
            let Neighborhood::Ball(radius) = u else {
                return Err(Error::precondition("escape checks on ℤ use ball neighborhoods"));
            };
            if !matches!(f, LengthFn::Abs) {
                return Err(Error::InvalidInput("the length on ℤ is |·|".into()));
            }
            // trap(U) = {0} and f(0) = 0: always an escape function. The
            // trace uses the closed form (1/n)Ball(r) = Ball(⌊r/n⌋).
            let mut trace = Vec::new();
            for eps in eps_grid {
                let mut found = None;
                for n in 1..=n_max {
                    let shrunk = floor_int(&(radius / BigRational::from_integer(n.into())));
                    if BigRational::from_integer(shrunk) < *eps {
                        found = Some(n);
                        break;
                    }
                }
                trace.push((eps.clone(), found));
            }
            Ok(EscapeVerdict { is_escape: true, witness: None, trace })
        }
        _ => {
            let trap_set = trap(group, u)?;
            let Neighborhood::FiniteSubset(trap_elems) = &trap_set else { unreachable!() };
            let mut witness = None;
            for g in trap_elems {
                if !eval(g)?.is_zero() {
                    witness = Some(g.clone());
                    break;
                }
            }
            let n_stab = stabilization_index(group)?;
            let mut trace = Vec::new();
            for eps in eps_grid {
                let mut found = None;
                for n in 1..=n_max.min(n_stab) {
                    let shrunk = one_over_n(group, u, n)?;
                    let Neighborhood::FiniteSubset(members) = &shrunk else { unreachable!() };
                    let mut all_below = true;
                    for g in members {
                        if eval(g)? >= *eps {
                            all_below = false;
                            break;
                        }
                    }
                    if all_below {
                        found = Some(n);
                        break;
                    }
                }
                trace.push((eps.clone(), found));
            }
            Ok(EscapeVerdict { is_escape: witness.is_none(), witness, trace })
        }
    }
}

/// All four quantities of the Følner counting inequality.
#[derive(Debug, Clone)]
pub struct FolnerReport {
    /// `|F △ gF| / |F|`.
    pub boundary_ratio: BigRational,
    /// `|F ∖ A| / |F|`.
    pub outside_ratio: BigRational,
    /// Whether `boundary_ratio ≤ ε`.
    pub premise_holds: bool,
    /// `(1 − ε)/2`, the bound the conclusion compares against.
    pub conclusion_bound: BigRational,
}

/// Verifies the implication: if `A ∩ gA = ∅` and `|F△gF|/|F| ≤ ε`, then
/// `|F∖A|/|F| ≥ (1−ε)/2`.
///
/// `A` is given as a predicate. The disjointness precondition is checked
/// over the whole group when it is finite, and over the window
/// `F ∪ gF ∪ g⁻¹F` otherwise (the counting only involves that window).
/// A premise that holds with a failing conclusion is a hard internal error.
pub fn folner_check(
    group: &GroupOracle,
    f_set: &BTreeSet<GElem>,
    a_pred: &dyn Fn(&GElem) -> bool,
    g: &GElem,
    epsilon: &BigRational,
) -> Result<FolnerReport> {
    if f_set.is_empty() {
        return Err(Error::precondition("Følner check needs a nonempty finite set F"));
    }
    for x in f_set {
        if !group.contains(x) {
            return Err(Error::GroupMismatch { context: format!("{x} is not a group element") });
        }
    }
    if !group.contains(g) {
        return Err(Error::GroupMismatch { context: format!("{g} is not a group element") });
    }

    // x ∈ A ∩ gA ⟺ a_pred(x) ∧ a_pred(g⁻¹x).
    let g_inv = group.inv(g)?;
    let in_both = |x: &GElem| -> Result<bool> { Ok(a_pred(x) && a_pred(&group.mul(&g_inv, x)?)) };
    let check_window: Vec<GElem> = if group.is_finite() {
        group.elements()?
    } else {
        let mut w = BTreeSet::new();
        for x in f_set {
            w.insert(x.clone());
            w.insert(group.mul(g, x)?);
            w.insert(group.mul(&g_inv, x)?);
        }
        w.into_iter().collect()
    };
    for x in &check_window {
        if in_both(x)? {
            return Err(Error::precondition_with(
                "A ∩ gA must be empty",
                format!("{x} lies in both A and gA"),
            ));
        }
    }

    let gf: BTreeSet<GElem> = f_set.iter().map(|x| group.mul(g, x)).collect::<Result<_>>()?;
    let sym_diff = f_set.symmetric_difference(&gf).count() as i64;
    let outside = f_set.iter().filter(|x| !a_pred(x)).count() as i64;
    let size = f_set.len() as i64;
    let boundary_ratio = BigRational::new(sym_diff.into(), size.into());
    let outside_ratio = BigRational::new(outside.into(), size.into());
    let premise_holds = boundary_ratio <= *epsilon;
    let conclusion_bound =
        (BigRational::from_integer(1.into()) - epsilon) / BigRational::from_integer(2.into());
    if premise_holds && outside_ratio < conclusion_bound {
        return Err(Error::VerificationFailed(format!(
            "counting inequality failed: |F∖A|/|F| = {outside_ratio} < {conclusion_bound}"
        )));
    }
    Ok(FolnerReport { boundary_ratio, outside_ratio, premise_holds, conclusion_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    #[test]
    fn one_over_n_on_integer_balls() {
        let z = GroupOracle::integers();
        let u = Neighborhood::ball(&z, rat_int(5)).unwrap();
        let half = one_over_n(&z, &u, 2).unwrap();
        assert_eq!(half, Neighborhood::Ball(rat_int(2)));
        // Definition replay: g ∈ (1/2)U iff |g| ≤ 5 and |2g| ≤ 5.
        for g in -6..=6i64 {
            let by_def = g.abs() <= 5 && (2 * g).abs() <= 5;
            assert_eq!(half.contains(&z, &GElem::Int(g)).unwrap(), by_def, "g = {g}");
        }
        assert!(one_over_n(&z, &u, 0).is_err());
    }

    #[test]
    fn trap_on_integer_balls_is_origin() {
        let z = GroupOracle::integers();
        let u = Neighborhood::ball(&z, rat_int(5)).unwrap();
        let t = trap(&z, &u).unwrap();
        assert_eq!(t, Neighborhood::FiniteSubset([GElem::Int(0)].into()));
    }

    #[test]
    fn trap_whole_group_is_whole_group() {
        let z4 = GroupOracle::cyclic(4).unwrap();
        let all = Neighborhood::finite(&z4, (0..4).map(GElem::Idx)).unwrap();
        let t = trap(&z4, &all).unwrap();
        let Neighborhood::FiniteSubset(set) = t else { panic!() };
        assert_eq!(set.len(), 4);
    }

    #[test]
    fn trap_collects_small_subgroups() {
        // In ℤ₄ with U = {0, 2, 1, 3}? take U = {0, 2}: ⟨2⟩ = {0,2} ⊆ U but
        // ⟨1⟩ = everything ⊄ U.
        let z4 = GroupOracle::cyclic(4).unwrap();
        let u = Neighborhood::finite(&z4, [GElem::Idx(0), GElem::Idx(2)]).unwrap();
        let t = trap(&z4, &u).unwrap();
        let Neighborhood::FiniteSubset(set) = t else { panic!() };
        assert_eq!(set, [GElem::Idx(0), GElem::Idx(2)].into());
    }

    #[test]
    fn escape_on_integers() {
        let z = GroupOracle::integers();
        let u = Neighborhood::ball(&z, rat_int(5)).unwrap();
        let grid = vec![rat_int(1), rat(1, 2)];
        let v = is_escape_function(&z, &LengthFn::Abs, &u, &grid, 20).unwrap();
        assert!(v.is_escape);
        // For ε = 1: need ⌊5/n⌋ < 1, so n = 6. For ε = 1/2: same index.
        assert_eq!(v.trace[0].1, Some(6));
        assert_eq!(v.trace[1].1, Some(6));
    }

    #[test]
    fn escape_on_finite_group_depends_on_trap() {
        // ℤ₄, U = {0, 2}: trap(U) = {0, 2}. The word length vanishes only
        // at 0, so it is not an escape function for this U.
        let z4 = GroupOracle::cyclic(4).unwrap();
        let u = Neighborhood::finite(&z4, [GElem::Idx(0), GElem::Idx(2)]).unwrap();
        let word = GroupOracle::cyclic_word_length(4);
        let v = is_escape_function(&z4, &word, &u, &[], 8).unwrap();
        assert!(!v.is_escape);
        assert_eq!(v.witness, Some(GElem::Idx(2)));
        // A length vanishing on trap(U) escapes.
        let flat = LengthFn::Table(vec![rat_int(0), rat_int(1), rat_int(0), rat_int(1)]);
        let v = is_escape_function(&z4, &flat, &u, &[rat(1, 2)], 8).unwrap();
        assert!(v.is_escape);
        assert!(v.trace[0].1.is_some());
    }

    #[test]
    fn escape_refused_on_rationals() {
        let q = GroupOracle::rationals_additive();
        let u = Neighborhood::ball(&q, rat_int(1)).unwrap();
        assert!(is_escape_function(&q, &LengthFn::Abs, &u, &[], 4).is_err());
    }

    #[test]
    fn folner_integer_window_example() {
        // F = {0..9}, A = evens, g = 1: |F△gF|/|F| = 2/10 = 1/5,
        // |F∖A|/|F| = 1/2 ≥ (1 − 1/5)/2 = 2/5.
        let z = GroupOracle::integers();
        let f: BTreeSet<GElem> = (0..10).map(GElem::Int).collect();
        let evens = |x: &GElem| matches!(x, GElem::Int(n) if n.rem_euclid(2) == 0);
        let report = folner_check(&z, &f, &evens, &GElem::Int(1), &rat(1, 5)).unwrap();
        assert_eq!(report.boundary_ratio, rat(1, 5));
        assert_eq!(report.outside_ratio, rat(1, 2));
        assert!(report.premise_holds);
        assert_eq!(report.conclusion_bound, rat(2, 5));
    }

    #[test]
    fn folner_rejects_overlapping_translate() {
        let z = GroupOracle::integers();
        let f: BTreeSet<GElem> = (0..4).map(GElem::Int).collect();
        let all = |_: &GElem| true;
        let err = folner_check(&z, &f, &all, &GElem::Int(1), &rat(1, 2));
        assert!(matches!(err, Err(Error::PreconditionFailed { .. })));
    }

    #[test]
    fn folner_singleton_trivial() {
        // F = {e}: boundary ratio is 0 or 2; with ε ≥ 2 the implication is
        // trivially satisfiable.
        let z = GroupOracle::integers();
        let f: BTreeSet<GElem> = [GElem::Int(0)].into();
        let a = |x: &GElem| matches!(x, GElem::Int(n) if *n >= 100);
        let report = folner_check(&z, &f, &a, &GElem::Int(1), &rat_int(2)).unwrap();
        assert!(report.premise_holds);
        assert_eq!(report.outside_ratio, rat_int(1));
    }
}
