//! Functions of positive type with exact Gaussian-rational scalars.
//!
//! A function `f: G → ℂ` on a finite group is of positive type when every
//! Gram matrix `[f(g_j⁻¹ g_i)]` is Hermitian positive semidefinite. With
//! Gaussian-rational values this is decidable exactly by a pivoted LDL*
//! elimination: a Hermitian matrix is PSD iff the elimination never meets a
//! negative pivot and every zero-pivot row is entirely zero. Squared moduli
//! replace absolute values throughout, so no roots are ever taken.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{one, zero};
use crate::submeasure::SetFunc;

use super::group::{GElem, GroupOracle};
use super::PUFunc;

/// An exact complex scalar: Gaussian rational.
pub type CxRat = Complex<BigRational>;

pub fn cx(re: BigRational, im: BigRational) -> CxRat {
    Complex::new(re, im)
}

pub fn cx_zero() -> CxRat {
    Complex::new(zero(), zero())
}

pub fn cx_one() -> CxRat {
    Complex::new(one(), zero())
}

/// `|z|²` — rational, so comparisons need no square roots.
pub fn norm_sq(z: &CxRat) -> BigRational {
    &z.re * &z.re + &z.im * &z.im
}

/// Exact positive-semidefiniteness of a Hermitian matrix by pivoted LDL*.
///
/// Returns an error (not `false`) when the matrix is not square or not
/// Hermitian; `false` means genuinely Hermitian-but-indefinite.
pub fn hermitian_psd(matrix: &[Vec<CxRat>]) -> Result<bool> {
    let n = matrix.len();
    for row in matrix {
        if row.len() != n {
            return Err(Error::InvalidInput("matrix is not square".into()));
        }
    }
    for i in 0..n {
        for j in 0..n {
            if matrix[i][j] != matrix[j][i].conj() {
                return Err(Error::InvalidInput(format!("matrix is not Hermitian at ({i}, {j})")));
            }
        }
    }
    let mut m = matrix.to_vec();
    let mut remaining: Vec<usize> = (0..n).collect();
    while !remaining.is_empty() {
        // Pick any remaining index with a positive diagonal pivot.
        let pivot_pos = remaining.iter().position(|&i| m[i][i].re.is_positive());
        let Some(pos) = pivot_pos else {
            // No positive pivots left: PSD iff the remaining block is zero.
            for &i in &remaining {
                if m[i][i].re.is_negative() {
                    return Ok(false);
                }
                for &j in &remaining {
                    if !m[i][j].is_zero() {
                        return Ok(false);
                    }
                }
            }
            return Ok(true);
        };
        let k = remaining.remove(pos);
        let d = m[k][k].re.clone();
        // Schur complement on the remaining block: m[i][j] -= v_i conj(v_j)/d.
        let col: BTreeMap<usize, CxRat> = remaining.iter().map(|&i| (i, m[i][k].clone())).collect();
        for &i in &remaining {
            for &j in &remaining {
                let delta = &col[&i] * col[&j].conj();
                let scaled = Complex::new(&delta.re / &d, &delta.im / &d);
                m[i][j] = m[i][j].clone() - scaled;
            }
        }
    }
    Ok(true)
}

/// A function of positive type on a finite group, with the PSD property of
/// its full Gram matrix verified exactly at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PosTypeFn {
    group: Arc<GroupOracle>,
    /// One value per element index.
    values: Vec<CxRat>,
}

impl PosTypeFn {
    /// Builds and verifies: the value table must be total on a finite group
    /// and the Gram matrix `[f(g_j⁻¹ g_i)]` Hermitian PSD.
    pub fn new(group: &Arc<GroupOracle>, values: Vec<CxRat>) -> Result<Self> {
        let Some(k) = group.order() else {
            return Err(Error::precondition("positive-type functions need a finite group"));
        };
        if values.len() != k {
            return Err(Error::InvalidInput(format!(
                "{} values for a group of order {k}",
                values.len()
            )));
        }
        match check_values(group, &values)? {
            true => Ok(PosTypeFn { group: Arc::clone(group), values }),
            false => Err(Error::InvalidInput(
                "values are not of positive type (Gram matrix is not PSD)".into(),
            )),
        }
    }

    pub fn group(&self) -> &Arc<GroupOracle> {
        &self.group
    }

    pub fn value(&self, g: &GElem) -> Result<CxRat> {
        match g {
            GElem::Idx(i) if *i < self.values.len() => Ok(self.values[*i].clone()),
            _ => Err(Error::GroupMismatch { context: format!("{g} has no tabulated value") }),
        }
    }

    pub fn values(&self) -> &[CxRat] {
        &self.values
    }

    pub fn at_identity(&self) -> CxRat {
        self.value(&self.group.identity()).expect("identity is always an element")
    }
}

/// The Gram matrix of a candidate value table over all group elements.
pub fn gram_matrix(group: &GroupOracle, values: &[CxRat]) -> Result<Vec<Vec<CxRat>>> {
    let elems = group.elements()?;
    let mut gram = Vec::with_capacity(elems.len());
    for gi in &elems {
        let mut row = Vec::with_capacity(elems.len());
        for gj in &elems {
            let idx = group.mul(&group.inv(gj)?, gi)?;
            let GElem::Idx(t) = idx else { unreachable!("finite group indices") };
            row.push(values[t].clone());
        }
        gram.push(row);
    }
    Ok(gram)
}

fn check_values(group: &GroupOracle, values: &[CxRat]) -> Result<bool> {
    // Hermitianness of the Gram matrix amounts to f(g⁻¹) = conj(f(g)).
    for (i, v) in values.iter().enumerate() {
        let gi = group.inv(&GElem::Idx(i))?;
        let GElem::Idx(ii) = gi else { unreachable!() };
        if values[ii] != v.conj() {
            return Ok(false);
        }
    }
    hermitian_psd(&gram_matrix(group, values)?)
}

/// Whether a value table is of positive type on the group (total, finite).
pub fn pos_type_check(group: &Arc<GroupOracle>, values: &[CxRat]) -> Result<bool> {
    let Some(k) = group.order() else {
        return Err(Error::precondition("positive-type checks need a finite group"));
    };
    if values.len() != k {
        return Err(Error::InvalidInput(format!("{} values for order {k}", values.len())));
    }
    check_values(group, values)
}

/// A character of ℤ/kℤ with Gaussian-rational values: `m ↦ i^(4jm/k)`,
/// defined exactly when `4j ≡ 0 (mod k)` (all characters for `k ∈ {1,2,4}`).
pub fn cyclic_character(k: usize, j: usize) -> Result<Vec<CxRat>> {
    if k == 0 {
        return Err(Error::InvalidInput("order must be positive".into()));
    }
    if !(4 * j).is_multiple_of(k) {
        return Err(Error::InvalidInput(format!(
            "character {j} of ℤ/{k}ℤ takes values outside the Gaussian rationals"
        )));
    }
    let quarter_turns = 4 * j / k; // χ(1) = i^quarter_turns
    let unit = |q: usize| -> CxRat {
        match q % 4 {
            0 => cx_one(),
            1 => cx(zero(), one()),
            2 => cx(-one(), zero()),
            _ => cx(zero(), -one()),
        }
    };
    Ok((0..k).map(|m| unit(quarter_turns * m)).collect())
}

/// Lifts a positive-type function through a measure:
/// `f′(a) = (1/μ(1)) Σ_g f(g)·μ(a(g))`.
///
/// Requires `μ` to be a measure (additivity over disjoint pairs is verified
/// exactly) with `μ(1) > 0`, on `a`'s algebra, and `f` on `a`'s label group.
/// The postconditions `f′(η(g)) = f(g)` and `|f′(a)|² ≤ f(e)²` are replayed
/// on every call.
pub fn pos_type_lift(f: &PosTypeFn, mu: &SetFunc, a: &PUFunc) -> Result<CxRat> {
    if mu.algebra() != a.algebra() {
        return Err(Error::AlgebraMismatch { context: "positive-type lift".into() });
    }
    if f.group() != a.group() {
        return Err(Error::GroupMismatch { context: "positive-type lift".into() });
    }
    require_measure(mu)?;
    let total = mu.total();
    if total.is_zero() {
        return Err(Error::precondition("positive-type lift needs μ(1) > 0"));
    }

    let value = lift_value(f, mu, a, &total)?;

    // f = f′ ∘ η: check on every group element (the group is finite).
    for g in f.group().elements()? {
        let eta_g = PUFunc::eta(a.algebra(), a.group(), g.clone())?;
        let through = lift_value(f, mu, &eta_g, &total)?;
        if through != f.value(&g)? {
            return Err(Error::VerificationFailed(
                "lift does not extend the function through the embedding".into(),
            ));
        }
    }
    // |f′(a)|² ≤ f(e)², the squared form of |f(g)| ≤ f(e).
    let fe = f.at_identity();
    if norm_sq(&value) > norm_sq(&fe) {
        return Err(Error::VerificationFailed("lifted value exceeds the identity value".into()));
    }
    Ok(value)
}

fn lift_value(f: &PosTypeFn, mu: &SetFunc, a: &PUFunc, total: &BigRational) -> Result<CxRat> {
    let mut acc = cx_zero();
    for (g, img) in a.label_map() {
        let weight = mu.eval_mask(img.mask()) / total;
        let fg = f.value(g)?;
        acc += Complex::new(&fg.re * &weight, &fg.im * &weight);
    }
    Ok(acc)
}

fn require_measure(mu: &SetFunc) -> Result<()> {
    // Additivity over disjoint pairs is the definition; with nonnegativity
    // (held by construction) it implies monotonicity.
    let values = mu.values();
    let size = mu.algebra().size() as u32;
    for a in 0..size {
        let comp = (size - 1) & !a;
        let mut b = comp;
        loop {
            if values[(a | b) as usize] != &values[a as usize] + &values[b as usize] {
                return Err(Error::precondition_with(
                    "positive-type lift needs a measure",
                    format!("additivity fails on masks ({a}, {b})"),
                ));
            }
            if b == 0 {
                break;
            }
            b = (b - 1) & comp;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Elem, FiniteAlgebra};
    use crate::rational::{rat, rat_int};

    fn ri(n: i64) -> CxRat {
        cx(rat_int(n), rat_int(0))
    }

    #[test]
    fn psd_basics() {
        // Identity is PSD.
        let id = vec![vec![ri(1), ri(0)], vec![ri(0), ri(1)]];
        assert!(hermitian_psd(&id).unwrap());
        // [[1,2],[2,1]] has a negative eigenvalue.
        let bad = vec![vec![ri(1), ri(2)], vec![ri(2), ri(1)]];
        assert!(!hermitian_psd(&bad).unwrap());
        // Zero diagonal with nonzero off-diagonal is indefinite.
        let off = vec![vec![ri(0), ri(1)], vec![ri(1), ri(0)]];
        assert!(!hermitian_psd(&off).unwrap());
        // Rank-one complex Gram vv* is PSD: v = (1, i).
        let i_unit = cx(rat_int(0), rat_int(1));
        let v = [cx_one(), i_unit];
        let gram: Vec<Vec<CxRat>> =
            (0..2).map(|r| (0..2).map(|c| v[r].clone() * v[c].conj()).collect()).collect();
        assert!(hermitian_psd(&gram).unwrap());
        // Non-Hermitian input is an error, not "false".
        let nh = vec![vec![ri(1), ri(2)], vec![ri(3), ri(1)]];
        assert!(hermitian_psd(&nh).is_err());
        // All-zero matrix is PSD.
        let zero_m = vec![vec![ri(0), ri(0)], vec![ri(0), ri(0)]];
        assert!(hermitian_psd(&zero_m).unwrap());
    }

    #[test]
    fn characters_are_positive_type() {
        for (k, j) in
            [(1usize, 0usize), (2, 0), (2, 1), (4, 0), (4, 1), (4, 2), (4, 3), (6, 0), (6, 3)]
        {
            let z = GroupOracle::cyclic(k).unwrap();
            let values = cyclic_character(k, j).unwrap();
            assert!(pos_type_check(&z, &values).unwrap(), "character {j} of Z{k}");
            PosTypeFn::new(&z, values).unwrap();
        }
        // ω for ℤ₃ is not Gaussian rational.
        assert!(cyclic_character(3, 1).is_err());
    }

    #[test]
    fn rejects_non_positive_type_values() {
        let z2 = GroupOracle::cyclic(2).unwrap();
        // f = (1, 2): Gram [[1,2],[2,1]] is not PSD.
        let bad = vec![ri(1), ri(2)];
        assert!(!pos_type_check(&z2, &bad).unwrap());
        assert!(PosTypeFn::new(&z2, bad).is_err());
        // f(g⁻¹) ≠ conj(f(g)) is caught (ℤ₄: f(1) = i but f(3) = i too).
        let z4 = GroupOracle::cyclic(4).unwrap();
        let i_unit = cx(rat_int(0), rat_int(1));
        let asym = vec![cx_one(), i_unit.clone(), ri(-1), i_unit];
        assert!(!pos_type_check(&z4, &asym).unwrap());
    }

    #[test]
    fn lift_worked_example() {
        // G = ℤ₂, f = (1, −1), μ uniform 1/2 on 2 atoms,
        // a = {1↦{p}, 0↦{q}}: f′(a) = (−1)(1/2) + (1)(1/2) = 0.
        let alg = FiniteAlgebra::new(vec!["p".into(), "q".into()]).unwrap();
        let z2 = GroupOracle::cyclic(2).unwrap();
        let f = PosTypeFn::new(&z2, vec![ri(1), ri(-1)]).unwrap();
        let mu = SetFunc::atom_measure(&alg, vec![rat(1, 2), rat(1, 2)]).unwrap();
        let a = PUFunc::new(
            &alg,
            &z2,
            [
                (GElem::Idx(1), Elem::from_atom_names(&alg, &["p"]).unwrap()),
                (GElem::Idx(0), Elem::from_atom_names(&alg, &["q"]).unwrap()),
            ],
        )
        .unwrap();
        assert_eq!(pos_type_lift(&f, &mu, &a).unwrap(), cx_zero());
    }

    #[test]
    fn constant_one_lifts_to_constant_one() {
        let alg = FiniteAlgebra::numbered(3).unwrap();
        let z4 = GroupOracle::cyclic(4).unwrap();
        let f = PosTypeFn::new(&z4, vec![ri(1); 4]).unwrap();
        let mu = SetFunc::atom_measure(&alg, vec![rat(1, 3); 3]).unwrap();
        let a = PUFunc::sigma(
            &z4,
            &crate::algebra::PartitionOfUnity::atoms(&alg),
            &[GElem::Idx(1), GElem::Idx(2), GElem::Idx(0)],
        )
        .unwrap();
        assert_eq!(pos_type_lift(&f, &mu, &a).unwrap(), cx_one());
    }

    #[test]
    fn lift_rejects_non_measure() {
        let alg = FiniteAlgebra::numbered(2).unwrap();
        let z2 = GroupOracle::cyclic(2).unwrap();
        let f = PosTypeFn::new(&z2, vec![ri(1), ri(-1)]).unwrap();
        // max of two measures is not additive.
        let mu = SetFunc::max_of(&alg, vec![vec![one(), zero()], vec![zero(), one()]]).unwrap();
        let a = PUFunc::identity(&alg, &z2);
        assert!(matches!(pos_type_lift(&f, &mu, &a), Err(Error::PreconditionFailed { .. })));
        // Zero measure rejected.
        let zero_mu = SetFunc::zero_func(&alg);
        assert!(pos_type_lift(&f, &zero_mu, &a).is_err());
    }

    #[test]
    fn lifted_function_is_positive_type_on_samples() {
        // Gram of f′ over a finite sample of labeled partitions is PSD.
        let alg = FiniteAlgebra::numbered(2).unwrap();
        let z2 = GroupOracle::cyclic(2).unwrap();
        let f = PosTypeFn::new(&z2, vec![ri(1), ri(-1)]).unwrap();
        let mu = SetFunc::atom_measure(&alg, vec![rat(1, 2), rat(1, 2)]).unwrap();
        let total = mu.total();
        let mut sample = Vec::new();
        for mask in 0..4u32 {
            let img = Elem::from_mask(&alg, mask).unwrap();
            sample.push(
                PUFunc::new(
                    &alg,
                    &z2,
                    [(GElem::Idx(1), img.clone()), (GElem::Idx(0), img.complement())],
                )
                .unwrap(),
            );
        }
        let mut gram = Vec::new();
        for ai in &sample {
            let mut row = Vec::new();
            for aj in &sample {
                let prod = aj.inverse().unwrap().mul(ai).unwrap();
                row.push(lift_value(&f, &mu, &prod, &total).unwrap());
            }
            gram.push(row);
        }
        assert!(hermitian_psd(&gram).unwrap());
    }
}
