//! Values are immutable and operations pure, so everything is shareable
//! across threads; the lazy value table must give all readers one view.

use std::sync::Arc;
use std::thread;

use pucalc_core::algebra::FiniteAlgebra;
use pucalc_core::pathology::{copoints, max_dominated_measure};
use pucalc_core::pugroup::{GElem, GroupOracle, PUFunc, PuHom};
use pucalc_core::submeasure::SetFunc;

#[test]
fn core_values_are_send_and_sync() {
    fn assert_send_sync<T: Send + Sync>() {}
    assert_send_sync::<FiniteAlgebra>();
    assert_send_sync::<SetFunc>();
    assert_send_sync::<GroupOracle>();
    assert_send_sync::<PUFunc>();
    assert_send_sync::<PuHom>();
}

#[test]
fn concurrent_readers_observe_one_materialization() {
    let phi = Arc::new(copoints(4).unwrap());
    let mut handles = Vec::new();
    for t in 0..8 {
        let phi = Arc::clone(&phi);
        handles.push(thread::spawn(move || {
            let mut values = Vec::new();
            for m in 0..16u32 {
                values.push(phi.eval_mask((m + t) % 16));
            }
            values
        }));
    }
    let results: Vec<_> = handles.into_iter().map(|h| h.join().unwrap()).collect();
    for (t, values) in results.iter().enumerate() {
        for (i, v) in values.iter().enumerate() {
            let m = (i as u32 + t as u32) % 16;
            assert_eq!(*v, phi.eval_mask(m));
        }
    }
}

#[test]
fn independent_lp_solves_run_concurrently() {
    let handles: Vec<_> = (2..=5)
        .map(|n| {
            thread::spawn(move || {
                let phi = copoints(n).unwrap();
                max_dominated_measure(&phi).unwrap().value
            })
        })
        .collect();
    let values: Vec<_> = handles.into_iter().map(|h| h.join().unwrap()).collect();
    // M(copoints n) = n/(n−1).
    for (i, v) in values.iter().enumerate() {
        let n = (i + 2) as i64;
        assert_eq!(*v, pucalc_core::rational::rat(n, n - 1));
    }
}

#[test]
fn shared_hom_verification_is_consistent() {
    let alg = FiniteAlgebra::numbered(2).unwrap();
    let z2 = GroupOracle::cyclic(2).unwrap();
    let labels: Vec<GElem> = vec![GElem::Idx(0), GElem::Idx(1)];
    let pi = Arc::new(
        PuHom::from_fn(&z2, &alg, &z2, labels, |g| PUFunc::eta(&alg, &z2, g.clone())).unwrap(),
    );
    let a = Arc::new(PUFunc::identity(&alg, &z2));
    let handles: Vec<_> = (0..8)
        .map(|_| {
            let pi = Arc::clone(&pi);
            let a = Arc::clone(&a);
            thread::spawn(move || pi.lift(&a).unwrap())
        })
        .collect();
    for h in handles {
        assert_eq!(h.join().unwrap(), *a);
    }
}
