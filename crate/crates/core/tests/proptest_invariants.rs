//! Property tests for the algebra and the convolution group.

use proptest::prelude::*;

use pucalc_core::algebra::{Elem, FiniteAlgebra};
use pucalc_core::pugroup::{d_phi, GElem, GroupOracle, PUFunc};
use pucalc_core::rational::{format_rational, parse_rational, rat};
use pucalc_core::submeasure::SetFunc;

fn algebra4() -> std::sync::Arc<FiniteAlgebra> {
    FiniteAlgebra::numbered(4).unwrap()
}

/// A labeled partition over ℤ₄ from an arbitrary atom → label assignment.
fn pufunc_from_assignment(assign: &[usize]) -> PUFunc {
    let alg = algebra4();
    let z4 = GroupOracle::cyclic(4).unwrap();
    let mut cells: Vec<(GElem, u32)> = Vec::new();
    for (atom, &label) in assign.iter().enumerate() {
        let g = GElem::Idx(label % 4);
        match cells.iter_mut().find(|(h, _)| *h == g) {
            Some((_, mask)) => *mask |= 1 << atom,
            None => cells.push((g, 1 << atom)),
        }
    }
    let pairs: Vec<(GElem, Elem)> =
        cells.into_iter().map(|(g, m)| (g, Elem::from_mask(&alg, m).unwrap())).collect();
    PUFunc::new(&alg, &z4, pairs).unwrap()
}

proptest! {
    #[test]
    fn lattice_laws(a in 0u32..16, b in 0u32..16, c in 0u32..16) {
        let alg = algebra4();
        let ea = Elem::from_mask(&alg, a).unwrap();
        let eb = Elem::from_mask(&alg, b).unwrap();
        let ec = Elem::from_mask(&alg, c).unwrap();
        prop_assert_eq!(ea.join(&eb).unwrap(), eb.join(&ea).unwrap());
        prop_assert_eq!(
            ea.meet(&eb.join(&ec).unwrap()).unwrap(),
            ea.meet(&eb).unwrap().join(&ea.meet(&ec).unwrap()).unwrap()
        );
        prop_assert_eq!(
            ea.meet(&eb).unwrap().complement(),
            ea.complement().join(&eb.complement()).unwrap()
        );
        prop_assert_eq!(
            ea.symm_diff(&eb).unwrap(),
            ea.join(&eb).unwrap().meet(&ea.meet(&eb).unwrap().complement()).unwrap()
        );
    }

    #[test]
    fn convolution_group_laws(
        a in proptest::collection::vec(0usize..4, 4),
        b in proptest::collection::vec(0usize..4, 4),
        c in proptest::collection::vec(0usize..4, 4),
    ) {
        let x = pufunc_from_assignment(&a);
        let y = pufunc_from_assignment(&b);
        let z = pufunc_from_assignment(&c);
        prop_assert_eq!(x.mul(&y).unwrap().mul(&z).unwrap(), x.mul(&y.mul(&z).unwrap()).unwrap());
        prop_assert!(x.mul(&x.inverse().unwrap()).unwrap().is_identity());
        // Support joins to 1 after any product.
        prop_assert!(x.mul(&y).unwrap().support_where(|_| true).is_one());
    }

    #[test]
    fn pseudometric_laws(
        a in proptest::collection::vec(0usize..4, 4),
        b in proptest::collection::vec(0usize..4, 4),
        c in proptest::collection::vec(0usize..4, 4),
    ) {
        let alg = algebra4();
        let phi = SetFunc::atom_measure(&alg, vec![rat(1, 4); 4]).unwrap();
        let x = pufunc_from_assignment(&a);
        let y = pufunc_from_assignment(&b);
        let z = pufunc_from_assignment(&c);
        let dxy = d_phi(&phi, &x, &y).unwrap();
        prop_assert_eq!(dxy.clone(), d_phi(&phi, &y, &x).unwrap());
        prop_assert!(d_phi(&phi, &x, &z).unwrap() <= dxy.clone() + d_phi(&phi, &y, &z).unwrap());
        prop_assert_eq!(d_phi(&phi, &x.mul(&z).unwrap(), &y.mul(&z).unwrap()).unwrap(), dxy);
    }

    #[test]
    fn rational_string_round_trip(n in -10_000i64..10_000, d in 1i64..500) {
        let r = rat(n, d);
        let s = format_rational(&r);
        prop_assert_eq!(parse_rational(&s).unwrap(), r);
    }
}
