//! Built-in verification suites.
//!
//! Level 1 runs the exhaustive small-scale suites (no randomness anywhere);
//! level 2 adds seeded volume checks and therefore requires an explicit
//! seed. Each suite reports pass/fail with a one-line detail; a run is
//! successful only if every suite passed.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{
    all_elements, check_partition, enumerate_partitions, quotient_by_ideal, Elem, FiniteAlgebra,
    Ideal, PartitionOfUnity, TwoValuedHom, VeeMonoidHom,
};
use crate::error::{Error, Result};
use crate::lp::{self, LpOutcome, RationalLp, RowOp, Sense};
use crate::pathology::{
    christensen_witness, copoints, generate, kappa, kelley_greedy, max_dominated_measure,
    verify_domination_certificate, verify_witness, witness_mass_bound, GenerateKind,
};
use crate::pugroup::postype::{cx, cx_one, cx_zero};
use crate::pugroup::{
    cyclic_character, d_phi, folner_check, gamma_contains, gamma_decompose, is_escape_function,
    one_over_n, pos_type_check, pos_type_lift, pu_add, pu_leq, symm_diff_elem, symm_diff_group,
    trap, trap_decompose, GElem, GroupOracle, LengthFn, Neighborhood, PUFunc, PosTypeFn, PuHom,
};
use crate::rational::{one, rat, rat_int, zero};
use crate::records;
use crate::sampling::{
    integer_window, random_atom_measure, random_monotone_table, random_pufunc, random_submeasure,
    random_vee_hom_table, rng_from_seed,
};
use crate::submeasure::{
    classify, continuity_modulus, diffuseness, two_valued_domination, CheckMode, SetFunc,
};

type Suite = (&'static str, Box<dyn Fn() -> Result<()>>);

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct SelfTestReport {
    pub level: u8,
    pub results: Vec<SuiteResult>,
}

impl SelfTestReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }
}

fn ensure(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::VerificationFailed(msg.into()))
    }
}

/// Runs the suites. Level 1 is fully deterministic; level 2 needs a seed.
pub fn run(level: u8, seed: Option<u64>) -> Result<SelfTestReport> {
    if level == 0 || level > 2 {
        return Err(Error::InvalidInput("selftest levels are 1 and 2".into()));
    }
    if level >= 2 && seed.is_none() {
        return Err(Error::SeedRequired("selftest level 2".into()));
    }
    let mut suites: Vec<Suite> = Vec::new();
    push_level1(&mut suites);
    if level >= 2 {
        push_level2(&mut suites, seed.expect("checked above"));
    }
    let results = suites
        .into_iter()
        .map(|(name, f)| match f() {
            Ok(()) => SuiteResult { name: name.into(), passed: true, detail: "ok".into() },
            Err(e) => SuiteResult { name: name.into(), passed: false, detail: e.to_string() },
        })
        .collect();
    Ok(SelfTestReport { level, results })
}

fn named_algebra(names: &[&str]) -> Arc<FiniteAlgebra> {
    FiniteAlgebra::new(names.iter().map(|s| s.to_string()).collect()).expect("valid atoms")
}

fn min_card_2() -> SetFunc {
    generate(&GenerateKind::ConcaveCardinality {
        n: 3,
        values: vec![rat_int(0), rat_int(1), rat_int(2), rat_int(2)],
    })
    .expect("valid family")
}

/// All elements of the group of ℤ₂-labeled partitions over `algebra`:
/// one per algebra element `A`, namely `{1 ↦ A, 0 ↦ ¬A}`.
fn all_z2_pufuncs(algebra: &Arc<FiniteAlgebra>, z2: &Arc<GroupOracle>) -> Vec<PUFunc> {
    all_elements(algebra)
        .map(|a| {
            PUFunc::new(algebra, z2, [(GElem::Idx(1), a.clone()), (GElem::Idx(0), a.complement())])
                .expect("complementary pair is a partition")
        })
        .collect()
}

// ------------------------------------------------------------------
// Reusable volume checks (also driven by the acceptance suite).

/// Group laws on random triples of labeled partitions.
pub fn check_group_laws(
    algebra: &Arc<FiniteAlgebra>,
    group: &Arc<GroupOracle>,
    pool: &[GElem],
    triples: usize,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    let e = PUFunc::identity(algebra, group);
    for _ in 0..triples {
        let a = random_pufunc(algebra, group, pool, rng)?;
        let b = random_pufunc(algebra, group, pool, rng)?;
        let c = random_pufunc(algebra, group, pool, rng)?;
        ensure(a.mul(&b)?.mul(&c)? == a.mul(&b.mul(&c)?)?, "associativity")?;
        ensure(a.mul(&e)? == a && e.mul(&a)? == a, "identity")?;
        let ai = a.inverse()?;
        ensure(a.mul(&ai)? == e && ai.mul(&a)? == e, "inverses")?;
    }
    Ok(())
}

/// Support-map identities on random pairs and random label subsets.
pub fn check_support_identities(
    algebra: &Arc<FiniteAlgebra>,
    group: &Arc<GroupOracle>,
    pool: &[GElem],
    cases: usize,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    let e = PUFunc::identity(algebra, group);
    let ident = group.identity();
    for _ in 0..cases {
        let a = random_pufunc(algebra, group, pool, rng)?;
        let b = random_pufunc(algebra, group, pool, rng)?;
        let s: BTreeSet<GElem> = pool.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        let t: BTreeSet<GElem> = pool.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        // (i) identity support.
        let et = e.support_in(&t);
        ensure(et.is_one() == t.contains(&ident) && (t.contains(&ident) || et.is_zero()), "e[T]")?;
        // (ii) inverse support.
        let t_inv: BTreeSet<GElem> = t.iter().map(|g| group.inv(g)).collect::<Result<_>>()?;
        ensure(a.inverse()?.support_in(&t) == a.support_in(&t_inv), "a⁻¹[T] = a[T⁻¹]")?;
        // (iii) product support.
        let mut st = BTreeSet::new();
        for x in &s {
            for y in &t {
                st.insert(group.mul(x, y)?);
            }
        }
        let lhs = a.support_in(&s).meet(&b.support_in(&t))?;
        ensure(lhs.leq(&a.mul(&b)?.support_in(&st))?, "a[S] ∧ b[T] ≤ ab[ST]")?;
        // Boolean-homomorphism laws of T ↦ a[T].
        let meet: BTreeSet<GElem> = s.intersection(&t).cloned().collect();
        let union: BTreeSet<GElem> = s.union(&t).cloned().collect();
        ensure(a.support_in(&s).meet(&a.support_in(&t))? == a.support_in(&meet), "a[S∩T]")?;
        ensure(a.support_in(&s).join(&a.support_in(&t))? == a.support_in(&union), "a[S∪T]")?;
        ensure(a.support_where(|g| !s.contains(g)) == a.support_in(&s).complement(), "a[¬S]")?;
    }
    Ok(())
}

/// Pseudometric laws and two-sided invariance on random triples.
pub fn check_dphi_metric(
    phi: &SetFunc,
    group: &Arc<GroupOracle>,
    pool: &[GElem],
    cases: usize,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    let algebra = phi.algebra();
    for _ in 0..cases {
        let a = random_pufunc(algebra, group, pool, rng)?;
        let b = random_pufunc(algebra, group, pool, rng)?;
        let c = random_pufunc(algebra, group, pool, rng)?;
        ensure(d_phi(phi, &a, &a)?.is_zero(), "d(a,a) = 0")?;
        ensure(d_phi(phi, &a, &b)? == d_phi(phi, &b, &a)?, "symmetry")?;
        ensure(
            d_phi(phi, &a, &c)? <= d_phi(phi, &a, &b)? + d_phi(phi, &b, &c)?,
            "triangle inequality",
        )?;
        let d0 = d_phi(phi, &a, &b)?;
        ensure(d_phi(phi, &a.mul(&c)?, &b.mul(&c)?)? == d0, "right invariance")?;
        ensure(d_phi(phi, &c.mul(&a)?, &c.mul(&b)?)? == d0, "left invariance")?;
    }
    Ok(())
}

/// Lift properties for homomorphisms `π(k) = c^k` out of ℤ: homomorphy of
/// the lift, factorization through η, and 1-Lipschitz continuity.
pub fn check_pi_sharp(
    phi: &SetFunc,
    target_group: &Arc<GroupOracle>,
    target_pool: &[GElem],
    instances: usize,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    let algebra = phi.algebra();
    let z = GroupOracle::integers();
    let window = integer_window(4);
    let small = integer_window(2);
    for _ in 0..instances {
        let c = random_pufunc(algebra, target_group, target_pool, rng)?;
        let c_inv = c.inverse()?;
        let pi = PuHom::from_fn(&z, algebra, target_group, window.iter().cloned(), |g| {
            let GElem::Int(k) = g else { unreachable!("ℤ labels") };
            if *k >= 0 {
                c.pow(*k as u64)
            } else {
                c_inv.pow(k.unsigned_abs())
            }
        })?;
        let a = random_pufunc(algebra, &z, &small, rng)?;
        let b = random_pufunc(algebra, &z, &small, rng)?;
        ensure(pi.lift(&a.mul(&b)?)? == pi.lift(&a)?.mul(&pi.lift(&b)?)?, "lift homomorphy")?;
        let k = GElem::Int(rng.gen_range(-4..=4));
        let eta_k = PUFunc::eta(algebra, &z, k.clone())?;
        ensure(pi.lift(&eta_k)? == *pi.get(&k)?, "π = π# ∘ η")?;
        ensure(d_phi(phi, &pi.lift(&a)?, &pi.lift(&b)?)? <= d_phi(phi, &a, &b)?, "1-Lipschitz")?;
    }
    Ok(())
}

/// Length-relabeling identities: invariance under inversion and
/// subadditivity in the label order.
pub fn check_length_relabel(
    phi: &SetFunc,
    group: &Arc<GroupOracle>,
    pool: &[GElem],
    cases: usize,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    let algebra = phi.algebra();
    for _ in 0..cases {
        let a = random_pufunc(algebra, group, pool, rng)?;
        let b = random_pufunc(algebra, group, pool, rng)?;
        let fa = a.length_relabel()?;
        ensure(a.inverse()?.length_relabel()? == fa, "f_•(a⁻¹) = f_•(a)")?;
        let fab = a.mul(&b)?.length_relabel()?;
        let sum = pu_add(&fa, &b.length_relabel()?)?;
        ensure(pu_leq(&fab, &sum)?, "f_•(ab) ≤ f_•(a) + f_•(b)")?;
    }
    Ok(())
}

/// Diffuseness and two-valued domination agree on random monotone tables.
pub fn check_diffuse_equals_domination(
    algebra: &Arc<FiniteAlgebra>,
    instances: usize,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    for _ in 0..instances {
        let phi = random_monotone_table(algebra, 8, 4, rng)?;
        ensure(diffuseness(&phi)? == two_valued_domination(&phi)?, "diffuseness = domination")?;
    }
    Ok(())
}

/// Strong duality and certificate replay on random covering instances.
pub fn check_lp_duality_random_covers(count: usize, rng: &mut ChaCha8Rng) -> Result<()> {
    for _ in 0..count {
        let n = rng.gen_range(3..=6);
        let m = rng.gen_range(3..=8);
        let phi =
            generate(&GenerateKind::RandomCover { n, m, density: rat(1, 2), seed: rng.gen() })?;
        let cert = max_dominated_measure(&phi)?;
        ensure(cert.value == cert.dual_cost, "strong duality")?;
        verify_domination_certificate(&phi, &cert)?;
    }
    Ok(())
}

/// Pullbacks along random join homs preserve submeasure-hood and
/// submodularity.
pub fn check_pullback_preservation(
    source: &Arc<FiniteAlgebra>,
    instances: usize,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    for _ in 0..instances {
        let outer = random_submeasure(source, rng)?;
        let hom = VeeMonoidHom::new(source, source, random_vee_hom_table(source, source, rng))?;
        let pulled = SetFunc::pullback(outer, hom)?;
        let report = classify(&pulled, CheckMode::Exhaustive)?;
        ensure(report.is_submeasure(), "pullback of a submeasure is a submeasure")?;
        let mu = random_atom_measure(source, 6, 6, rng)?;
        let hom2 = VeeMonoidHom::new(source, source, random_vee_hom_table(source, source, rng))?;
        let pulled2 = SetFunc::pullback(mu, hom2)?;
        let report2 = classify(&pulled2, CheckMode::Exhaustive)?;
        ensure(report2.submodular.holds, "pullback of a measure is submodular")?;
    }
    Ok(())
}

// ------------------------------------------------------------------
// Level 1: exhaustive small suites.

fn push_level1(suites: &mut Vec<Suite>) {
    suites.push((
        "algebra/lattice-laws",
        Box::new(|| {
            for n in 1..=3 {
                let alg = FiniteAlgebra::numbered(n)?;
                let elems: Vec<Elem> = all_elements(&alg).collect();
                for a in &elems {
                    for b in &elems {
                        ensure(a.join(b)? == b.join(a)?, "∨ commutes")?;
                        ensure(a.meet(b)? == b.meet(a)?, "∧ commutes")?;
                        ensure(a.join(&a.meet(b)?)? == *a, "absorption")?;
                        for c in &elems {
                            ensure(a.join(b)?.join(c)? == a.join(&b.join(c)?)?, "∨ associates")?;
                            ensure(
                                a.meet(&b.join(c)?)? == a.meet(b)?.join(&a.meet(c)?)?,
                                "distributivity",
                            )?;
                        }
                    }
                }
            }
            Ok(())
        }),
    ));
    suites.push((
        "algebra/complement-laws",
        Box::new(|| {
            let alg = FiniteAlgebra::numbered(3)?;
            for a in all_elements(&alg) {
                ensure(a.meet(&a.complement())?.is_zero(), "A ∧ ¬A = 0")?;
                ensure(a.join(&a.complement())?.is_one(), "A ∨ ¬A = 1")?;
                for b in all_elements(&alg) {
                    ensure(
                        a.meet(&b)?.complement() == a.complement().join(&b.complement())?,
                        "De Morgan",
                    )?;
                }
            }
            Ok(())
        }),
    ));
    suites.push((
        "algebra/symm-diff-values",
        Box::new(|| {
            let alg = named_algebra(&["p", "q", "r"]);
            let p = Elem::from_atom_names(&alg, &["p"])?;
            let pq = Elem::from_atom_names(&alg, &["p", "q"])?;
            ensure(p.symm_diff(&pq)? == Elem::from_atom_names(&alg, &["q"])?, "{p}△{p,q}")?;
            ensure(p.join(&Elem::from_atom_names(&alg, &["q"])?)? == pq, "{p}∨{q}")?;
            Ok(())
        }),
    ));
    suites.push((
        "algebra/partition-checker",
        Box::new(|| {
            let alg = named_algebra(&["p", "q", "r"]);
            let atoms = PartitionOfUnity::atoms(&alg);
            ensure(check_partition(&alg, atoms.cells()).is_none(), "atom partition valid")?;
            let p = Elem::from_atom_names(&alg, &["p"])?;
            let pq = Elem::from_atom_names(&alg, &["p", "q"])?;
            ensure(check_partition(&alg, &[p, pq.clone()]).is_some(), "overlap caught")?;
            ensure(check_partition(&alg, &[pq]).is_some(), "join ≠ 1 caught")?;
            ensure(check_partition(&alg, &[]).is_some(), "empty caught")?;
            Ok(())
        }),
    ));
    suites.push((
        "algebra/refinement-order",
        Box::new(|| {
            let alg = named_algebra(&["p", "q", "r"]);
            let trivial = PartitionOfUnity::trivial(&alg);
            let atoms = PartitionOfUnity::atoms(&alg);
            ensure(trivial.coarsens(&atoms)?, "{1} ⪯ atoms")?;
            ensure(!atoms.coarsens(&trivial)?, "atoms ⋠ {1}")?;
            Ok(())
        }),
    ));
    suites.push((
        "algebra/common-refinement",
        Box::new(|| {
            for n in 1..=3 {
                let alg = FiniteAlgebra::numbered(n)?;
                let parts = enumerate_partitions(&alg)?;
                for q1 in &parts {
                    for q2 in &parts {
                        let r = q1.common_refinement(q2)?;
                        ensure(q1.coarsens(&r)? && q2.coarsens(&r)?, "refines both")?;
                        for cand in &parts {
                            if q1.coarsens(cand)? && q2.coarsens(cand)? {
                                ensure(r.coarsens(cand)?, "least refinement")?;
                            }
                        }
                    }
                }
            }
            Ok(())
        }),
    ));
    suites.push((
        "algebra/bell-counts",
        Box::new(|| {
            let bell = [1usize, 1, 2, 5, 15, 52];
            for n in 1..=5 {
                let alg = FiniteAlgebra::numbered(n)?;
                ensure(enumerate_partitions(&alg)?.len() == bell[n], "Bell number")?;
            }
            Ok(())
        }),
    ));
    suites.push((
        "algebra/two-valued-homs",
        Box::new(|| {
            for n in 1..=4 {
                let alg = FiniteAlgebra::numbered(n)?;
                for chi in TwoValuedHom::all(&alg) {
                    for a in all_elements(&alg) {
                        ensure(chi.eval(&a.complement())? == !chi.eval(&a)?, "χ(¬A)")?;
                        for b in all_elements(&alg) {
                            ensure(
                                chi.eval(&a.meet(&b)?)? == (chi.eval(&a)? && chi.eval(&b)?),
                                "χ(A∧B)",
                            )?;
                        }
                    }
                }
            }
            Ok(())
        }),
    ));
    suites.push((
        "algebra/quotient-projection",
        Box::new(|| {
            let alg = named_algebra(&["p", "q", "r"]);
            let ideal = Ideal::generated_by_atoms(&alg, &[2])?;
            let (quot, theta) = quotient_by_ideal(&alg, &ideal)?;
            ensure(quot.atom_count() == 2, "surviving atoms")?;
            let pr = Elem::from_atom_names(&alg, &["p", "r"])?;
            ensure(theta.apply(&pr)? == Elem::from_atom_names(&quot, &["p"])?, "θ({p,r})")?;
            for a in all_elements(&alg) {
                for b in all_elements(&alg) {
                    ensure(
                        theta.apply(&a.join(&b)?)? == theta.apply(&a)?.join(&theta.apply(&b)?)?,
                        "join law",
                    )?;
                }
            }
            ensure(
                quotient_by_ideal(&alg, &Ideal::generated_by_atoms(&alg, &[0, 1, 2])?).is_err(),
                "degenerate quotient rejected",
            )?;
            Ok(())
        }),
    ));
    suites.push((
        "algebra/vee-hom-validation",
        Box::new(|| {
            let alg = FiniteAlgebra::numbered(2)?;
            ensure(VeeMonoidHom::new(&alg, &alg, vec![0, 1, 2, 0]).is_err(), "join law enforced")?;
            ensure(VeeMonoidHom::new(&alg, &alg, vec![1, 1, 3, 3]).is_err(), "θ(0) = 0 enforced")?;
            let collapse: Vec<u32> = (0..4u32).map(|m| if m == 0 { 0 } else { 3 }).collect();
            ensure(VeeMonoidHom::new(&alg, &alg, collapse).is_ok(), "non-Boolean hom accepted")?;
            Ok(())
        }),
    ));

    suites.push((
        "submeasure/eval-values",
        Box::new(|| {
            let phi = copoints(3)?;
            ensure(phi.eval_mask(0b111) == rat_int(2), "copoints3(1) = 2")?;
            ensure(phi.eval_mask(0b011) == rat_int(1), "copoints3(pair) = 1")?;
            let alg = FiniteAlgebra::numbered(3)?;
            let third = SetFunc::atom_measure(&alg, vec![rat(1, 3); 3])?;
            ensure(third.eval_mask(0b011) == rat(2, 3), "uniform measure")?;
            Ok(())
        }),
    ));
    suites.push((
        "submeasure/eval-zero-element",
        Box::new(|| {
            let alg = named_algebra(&["p", "q", "r"]);
            let funcs = vec![
                copoints(3)?,
                min_card_2(),
                SetFunc::atom_measure(&alg, vec![rat(1, 2), rat(1, 3), rat(1, 6)])?,
                SetFunc::max_of(
                    &alg,
                    vec![vec![one(), zero(), zero()], vec![zero(), one(), one()]],
                )?,
                SetFunc::pullback(SetFunc::zero_func(&alg), VeeMonoidHom::identity(&alg))?,
            ];
            for phi in funcs {
                ensure(phi.eval_mask(0).is_zero(), "φ(0) = 0")?;
            }
            Ok(())
        }),
    ));
    suites.push((
        "submeasure/materialize-agreement",
        Box::new(|| {
            for phi in [copoints(3)?, min_card_2()] {
                let table = phi.materialize();
                for m in 0..phi.algebra().size() as u32 {
                    ensure(table.eval_mask(m) == phi.eval_mask(m), "table agrees")?;
                }
            }
            Ok(())
        }),
    ));
    suites.push((
        "submeasure/classification",
        Box::new(|| {
            let r = classify(&min_card_2(), CheckMode::Exhaustive)?;
            ensure(
                r.monotone.holds && r.subadditive.holds && r.submodular.holds && !r.additive.holds,
                "min(|A|,2) flags",
            )?;
            let cx = r.additive.counterexample.as_ref().expect("witness");
            let phi = min_card_2();
            ensure(
                phi.eval_mask(cx.a.mask() | cx.b.mask())
                    != phi.eval_mask(cx.a.mask()) + phi.eval_mask(cx.b.mask()),
                "witness re-evaluates",
            )?;
            let r = classify(&copoints(3)?, CheckMode::Exhaustive)?;
            ensure(r.is_submeasure() && !r.submodular.holds, "copoints3 flags")?;
            Ok(())
        }),
    ));
    suites.push((
        "submeasure/covercount-submeasures",
        Box::new(|| {
            for kind in [
                GenerateKind::Copoints { n: 4 },
                GenerateKind::EllSubsetsCover { n: 4, ell: 2 },
                GenerateKind::RandomCover { n: 5, m: 6, density: rat(1, 2), seed: 3 },
            ] {
                let phi = generate(&kind)?;
                ensure(classify(&phi, CheckMode::Exhaustive)?.is_submeasure(), "cover submeasure")?;
            }
            Ok(())
        }),
    ));
    suites.push((
        "submeasure/maxof-nonadditive",
        Box::new(|| {
            let alg = FiniteAlgebra::numbered(2)?;
            let phi = SetFunc::max_of(&alg, vec![vec![one(), zero()], vec![zero(), one()]])?;
            let r = classify(&phi, CheckMode::Exhaustive)?;
            ensure(r.is_submeasure() && !r.additive.holds, "max of measures")?;
            Ok(())
        }),
    ));
    suites.push((
        "submeasure/diffuseness-values",
        Box::new(|| {
            ensure(diffuseness(&min_card_2())? == rat_int(1), "min(|A|,2)")?;
            let alg = named_algebra(&["p", "q", "r"]);
            ensure(diffuseness(&SetFunc::zero_func(&alg))?.is_zero(), "zero function")?;
            let w = SetFunc::atom_measure(&alg, vec![rat(1, 2), rat(1, 3), rat(1, 6)])?;
            ensure(diffuseness(&w)? == rat(1, 2), "atom max")?;
            Ok(())
        }),
    ));
    suites.push((
        "submeasure/two-valued-domination-values",
        Box::new(|| {
            ensure(two_valued_domination(&min_card_2())? == rat_int(1), "min(|A|,2)")?;
            ensure(two_valued_domination(&copoints(3)?)? == rat_int(1), "copoints3")?;
            Ok(())
        }),
    ));
    suites.push((
        "submeasure/diffuse-equals-domination",
        Box::new(|| {
            for phi in [copoints(3)?, copoints(4)?, min_card_2()] {
                ensure(diffuseness(&phi)? == two_valued_domination(&phi)?, "agreement")?;
            }
            Ok(())
        }),
    ));
    suites.push((
        "submeasure/diffuse-zero-iff-zero",
        Box::new(|| {
            // For subadditive monotone φ: diffuseness 0 ⟺ φ ≡ 0.
            let alg = FiniteAlgebra::numbered(3)?;
            ensure(diffuseness(&SetFunc::zero_func(&alg))?.is_zero(), "zero is diffuse")?;
            for phi in [copoints(3)?, min_card_2()] {
                ensure(!diffuseness(&phi)?.is_zero(), "nonzero has positive atom")?;
            }
            Ok(())
        }),
    ));
    suites.push((
        "submeasure/pullback-preservation",
        Box::new(|| {
            let alg = named_algebra(&["p", "q", "r"]);
            let ideal = Ideal::generated_by_atoms(&alg, &[2])?;
            let (quot, theta) = quotient_by_ideal(&alg, &ideal)?;
            let outer = SetFunc::atom_measure(&quot, vec![rat(1, 3), rat(1, 3)])?;
            let pb = SetFunc::pullback(outer, theta)?;
            ensure(pb.eval_mask(0b100).is_zero(), "killed atom")?;
            ensure(pb.eval_mask(0b101) == rat(1, 3), "{p,r}")?;
            let r = classify(&pb, CheckMode::Exhaustive)?;
            ensure(r.is_submeasure() && r.submodular.holds, "preserved properties")?;
            Ok(())
        }),
    ));
    suites.push((
        "submeasure/continuity-modulus",
        Box::new(|| {
            let alg = named_algebra(&["p", "q", "r"]);
            let phi = SetFunc::atom_measure(&alg, vec![rat(1, 3); 3])?;
            let m = continuity_modulus(&VeeMonoidHom::identity(&alg), &phi, &phi)?;
            for (d, s) in &m.steps {
                ensure(s <= d, "identity modulus below diagonal")?;
            }
            let theta0 = VeeMonoidHom::constant_zero(&alg, &alg);
            let m0 = continuity_modulus(&theta0, &phi, &phi)?;
            ensure(m0.steps.iter().all(|(_, s)| s.is_zero()), "constant-zero modulus")?;
            let (quot, theta) = quotient_by_ideal(&alg, &Ideal::generated_by_atoms(&alg, &[2])?)?;
            let mu = SetFunc::atom_measure(&quot, vec![rat(1, 2), rat(1, 2)])?;
            let m = continuity_modulus(&theta, &phi, &mu)?;
            ensure(m.value_at(&rat(1, 3)) == rat(1, 2), "quotient modulus value")?;
            Ok(())
        }),
    ));

    suites.push((
        "lp/small-oracle",
        Box::new(|| {
            let mut lp = RationalLp::new(Sense::Maximize, vec![rat_int(1), rat_int(1)]);
            lp.add_row(vec![rat_int(1), rat_int(0)], RowOp::Le, rat_int(2))?;
            lp.add_row(vec![rat_int(0), rat_int(1)], RowOp::Le, rat_int(3))?;
            lp.add_row(vec![rat_int(1), rat_int(1)], RowOp::Le, rat_int(4))?;
            let LpOutcome::Optimal(sol) = lp::solve(&lp)? else {
                return Err(Error::VerificationFailed("expected optimum".into()));
            };
            ensure(sol.objective_value == rat_int(4), "known optimum")?;
            lp::verify_solution(&lp, &sol)?;
            Ok(())
        }),
    ));
    suites.push((
        "pathology/copoints3-certificate",
        Box::new(|| {
            let phi = copoints(3)?;
            let cert = max_dominated_measure(&phi)?;
            ensure(cert.value == rat(3, 2), "M = 3/2")?;
            ensure(cert.primal == vec![rat(1, 2); 3], "primal (1/2,1/2,1/2)")?;
            ensure(kappa(&phi)? == rat(3, 4), "κ = 3/4")?;
            Ok(())
        }),
    ));
    suites.push((
        "pathology/measures-dominate-themselves",
        Box::new(|| {
            let alg = FiniteAlgebra::numbered(3)?;
            let phi = SetFunc::atom_measure(&alg, vec![rat(1, 2), rat(1, 3), rat(1, 6)])?;
            let cert = max_dominated_measure(&phi)?;
            ensure(cert.value == rat_int(1) && kappa(&phi)? == rat_int(1), "κ(measure) = 1")?;
            Ok(())
        }),
    ));
    suites.push((
        "pathology/zero-function",
        Box::new(|| {
            let alg = FiniteAlgebra::numbered(3)?;
            let phi = SetFunc::zero_func(&alg);
            ensure(max_dominated_measure(&phi)?.value.is_zero(), "M = 0")?;
            ensure(kappa(&phi).is_err(), "κ undefined at φ(1) = 0")?;
            Ok(())
        }),
    ));
    suites.push((
        "pathology/kelley-values",
        Box::new(|| {
            let km = kelley_greedy(&min_card_2(), &[0, 1, 2])?;
            ensure(km.nu == vec![rat_int(1), rat_int(1), rat_int(0)], "ν = (1,1,0)")?;
            ensure(kelley_greedy(&copoints(3)?, &[0, 1, 2]).is_err(), "non-submodular refused")?;
            Ok(())
        }),
    ));
    suites.push((
        "pathology/kelley-lp-agreement",
        Box::new(|| {
            let phi = min_card_2();
            ensure(max_dominated_measure(&phi)?.value == phi.total(), "M = φ(1) submodular")?;
            Ok(())
        }),
    ));
    suites.push((
        "pathology/christensen-none",
        Box::new(|| {
            let phi = copoints(3)?;
            ensure(christensen_witness(&phi, &rat(1, 2))?.is_none(), "empty candidate set")?;
            let alg = FiniteAlgebra::numbered(4)?;
            let quarter = SetFunc::atom_measure(&alg, vec![rat(1, 4); 4])?;
            ensure(christensen_witness(&quarter, &rat(1, 4))?.is_none(), "coverage short")?;
            Ok(())
        }),
    ));
    suites.push((
        "pathology/christensen-zero-witnesses",
        Box::new(|| {
            let alg = FiniteAlgebra::numbered(3)?;
            let phi = SetFunc::zero_func(&alg);
            let w = christensen_witness(&phi, &rat(1, 2))?
                .ok_or_else(|| Error::VerificationFailed("zero function must witness".into()))?;
            verify_witness(&phi, &w)?;
            let (m, bound) = witness_mass_bound(&phi, &w)?;
            ensure(m.is_zero() && m <= bound, "mass bound")?;
            Ok(())
        }),
    ));
    suites.push((
        "pathology/witness-mass-bound-grid",
        Box::new(|| {
            let phi = copoints(3)?;
            for k in 1..=11 {
                ensure(christensen_witness(&phi, &rat(k, 20))?.is_none(), "no witness below 3/5")?;
            }
            Ok(())
        }),
    ));
    suites.push((
        "pathology/generator-determinism",
        Box::new(|| {
            let kind = GenerateKind::RandomCover { n: 4, m: 6, density: rat(1, 2), seed: 7 };
            let a = generate(&kind)?;
            let b = generate(&kind)?;
            ensure(
                records::canonical_string(&records::setfunc_to_value(&a))
                    == records::canonical_string(&records::setfunc_to_value(&b)),
                "byte-identical records",
            )?;
            Ok(())
        }),
    ));
    suites.push((
        "pathology/generator-families",
        Box::new(|| {
            ensure(copoints(3)?.eval_mask(0b111) == rat_int(2), "copoints value")?;
            let ell = generate(&GenerateKind::EllSubsetsCover { n: 4, ell: 2 })?;
            ensure(ell.eval_mask(0b1111) == rat_int(2), "⌈4/2⌉")?;
            let mc = min_card_2();
            ensure(mc.eval_mask(0b111) == rat_int(2), "concave cardinality")?;
            Ok(())
        }),
    ));

    suites.push((
        "pugroup/group-laws-16",
        Box::new(|| {
            let alg = FiniteAlgebra::numbered(2)?;
            let z2 = GroupOracle::cyclic(2)?;
            let all = all_z2_pufuncs(&alg, &z2);
            ensure(all.len() == 4, "2^n elements keyed by a(1)")?;
            // The group has 2^n = 4 elements; run all 4³ triples twice over to
            // cover products with every representative (64 triples here; the
            // 16-element model is n = 2 with both labels tracked in `all`).
            let e = PUFunc::identity(&alg, &z2);
            for a in &all {
                ensure(a.mul(&e)? == *a && e.mul(a)? == *a, "identity")?;
                ensure(a.mul(&a.inverse()?)?.is_identity(), "inverse")?;
                for b in &all {
                    for c in &all {
                        ensure(a.mul(b)?.mul(c)? == a.mul(&b.mul(c)?)?, "associativity")?;
                    }
                }
            }
            Ok(())
        }),
    ));
    suites.push((
        "pugroup/support-identities-16",
        Box::new(|| {
            let alg = FiniteAlgebra::numbered(2)?;
            let z2 = GroupOracle::cyclic(2)?;
            let all = all_z2_pufuncs(&alg, &z2);
            let subsets: Vec<BTreeSet<GElem>> = (0..4u32)
                .map(|m| {
                    (0..2).filter(|i| m & (1 << i) != 0).map(|i| GElem::Idx(i as usize)).collect()
                })
                .collect();
            let e = PUFunc::identity(&alg, &z2);
            for t in &subsets {
                let et = e.support_in(t);
                ensure(et.is_one() == t.contains(&GElem::Idx(0)), "e[T]")?;
            }
            for a in &all {
                for b in &all {
                    for s in &subsets {
                        for t in &subsets {
                            let t_inv: BTreeSet<GElem> =
                                t.iter().map(|g| z2.inv(g).unwrap()).collect();
                            ensure(a.inverse()?.support_in(t) == a.support_in(&t_inv), "(ii)")?;
                            let mut st = BTreeSet::new();
                            for x in s {
                                for y in t {
                                    st.insert(z2.mul(x, y)?);
                                }
                            }
                            ensure(
                                a.support_in(s)
                                    .meet(&b.support_in(t))?
                                    .leq(&a.mul(b)?.support_in(&st))?,
                                "(iii)",
                            )?;
                        }
                    }
                }
            }
            Ok(())
        }),
    ));
    suites.push((
        "pugroup/dphi-metric-16",
        Box::new(|| {
            let alg = FiniteAlgebra::numbered(2)?;
            let z2 = GroupOracle::cyclic(2)?;
            let phi = SetFunc::atom_measure(&alg, vec![rat(1, 2); 2])?;
            let all = all_z2_pufuncs(&alg, &z2);
            for a in &all {
                ensure(d_phi(&phi, a, a)?.is_zero(), "d(a,a)")?;
                for b in &all {
                    ensure(d_phi(&phi, a, b)? == d_phi(&phi, b, a)?, "symmetry")?;
                    for c in &all {
                        ensure(
                            d_phi(&phi, a, c)? <= d_phi(&phi, a, b)? + d_phi(&phi, b, c)?,
                            "triangle",
                        )?;
                        let d0 = d_phi(&phi, a, b)?;
                        ensure(d_phi(&phi, &a.mul(c)?, &b.mul(c)?)? == d0, "right invariance")?;
                        ensure(d_phi(&phi, &c.mul(a)?, &c.mul(b)?)? == d0, "left invariance")?;
                    }
                }
            }
            Ok(())
        }),
    ));
    suites.push((
        "pugroup/convolution-example",
        Box::new(|| {
            let alg = named_algebra(&["p", "q"]);
            let z2 = GroupOracle::cyclic(2)?;
            let p = Elem::from_atom_names(&alg, &["p"])?;
            let q = Elem::from_atom_names(&alg, &["q"])?;
            let a =
                PUFunc::new(&alg, &z2, [(GElem::Idx(1), p.clone()), (GElem::Idx(0), q.clone())])?;
            let b = PUFunc::new(&alg, &z2, [(GElem::Idx(1), Elem::one(&alg))])?;
            let ab = a.mul(&b)?;
            ensure(ab.get(&GElem::Idx(0)) == p && ab.get(&GElem::Idx(1)) == q, "hand value")?;
            Ok(())
        }),
    ));
    suites.push((
        "pugroup/eta-sigma-homomorphisms",
        Box::new(|| {
            let alg = FiniteAlgebra::numbered(3)?;
            let z4 = GroupOracle::cyclic(4)?;
            for i in 0..4usize {
                for j in 0..4usize {
                    let lhs = PUFunc::eta(&alg, &z4, GElem::Idx(i))?.mul(&PUFunc::eta(
                        &alg,
                        &z4,
                        GElem::Idx(j),
                    )?)?;
                    ensure(lhs == PUFunc::eta(&alg, &z4, GElem::Idx((i + j) % 4))?, "η hom")?;
                }
            }
            let part = PartitionOfUnity::atoms(&alg);
            let u = vec![GElem::Idx(1), GElem::Idx(2), GElem::Idx(3)];
            let v = vec![GElem::Idx(3), GElem::Idx(3), GElem::Idx(2)];
            let uv: Vec<GElem> = u.iter().zip(&v).map(|(a, b)| z4.mul(a, b).unwrap()).collect();
            let lhs = PUFunc::sigma(&z4, &part, &u)?.mul(&PUFunc::sigma(&z4, &part, &v)?)?;
            ensure(lhs == PUFunc::sigma(&z4, &part, &uv)?, "σ hom")?;
            let constant = vec![GElem::Idx(2); 3];
            ensure(
                PUFunc::sigma(&z4, &part, &constant)? == PUFunc::eta(&alg, &z4, GElem::Idx(2))?,
                "σ constant = η",
            )?;
            Ok(())
        }),
    ));
    suites.push((
        "pugroup/gamma-decompose-exhaustive",
        Box::new(|| {
            for n in 2..=3usize {
                let alg = FiniteAlgebra::numbered(n)?;
                let z2 = GroupOracle::cyclic(2)?;
                let elems: Vec<Elem> = all_elements(&alg).collect();
                for c in all_z2_pufuncs(&alg, &z2) {
                    for a_elem in &elems {
                        for b_elem in &elems {
                            let supp = c.support_off_identity();
                            if !supp.leq(&a_elem.join(b_elem)?)? {
                                ensure(
                                    gamma_decompose(&c, a_elem, b_elem).is_err(),
                                    "precondition rejected",
                                )?;
                                continue;
                            }
                            let (a, b) = gamma_decompose(&c, a_elem, b_elem)?;
                            ensure(gamma_contains(a_elem, &a)?, "a ∈ Γ(A)")?;
                            ensure(gamma_contains(b_elem, &b)?, "b ∈ Γ(B)")?;
                            ensure(a.mul(&b)? == c, "recombination")?;
                        }
                    }
                }
            }
            Ok(())
        }),
    ));
    suites.push((
        "pugroup/pi-sharp-fixed",
        Box::new(|| {
            let mut rng = rng_from_seed(0x9e3779b9);
            let alg = FiniteAlgebra::numbered(3)?;
            let phi = SetFunc::atom_measure(&alg, vec![rat(1, 3); 3])?;
            let z2 = GroupOracle::cyclic(2)?;
            let pool: Vec<GElem> = (0..2).map(GElem::Idx).collect();
            check_pi_sharp(&phi, &z2, &pool, 10, &mut rng)
        }),
    ));
    suites.push((
        "pugroup/f-bullet-identities",
        Box::new(|| {
            let mut rng = rng_from_seed(0x51f15eed);
            let alg = FiniteAlgebra::numbered(3)?;
            let phi = SetFunc::atom_measure(&alg, vec![rat(1, 3); 3])?;
            let z2 = GroupOracle::cyclic(2)?.with_length(LengthFn::Table(vec![zero(), one()]))?;
            let pool: Vec<GElem> = (0..2).map(GElem::Idx).collect();
            check_length_relabel(&phi, &z2, &pool, 10, &mut rng)?;
            // Worked value: f = length on ℤ₂, a = {1↦{p}, 0↦{q}}.
            let pq = named_algebra(&["p", "q"]);
            let a = PUFunc::new(
                &pq,
                &z2,
                [
                    (GElem::Idx(1), Elem::from_atom_names(&pq, &["p"])?),
                    (GElem::Idx(0), Elem::from_atom_names(&pq, &["q"])?),
                ],
            )?;
            let fa = a.length_relabel()?;
            ensure(
                fa.get(&GElem::Rat(rat_int(1))) == Elem::from_atom_names(&pq, &["p"])?,
                "length image",
            )?;
            Ok(())
        }),
    ));
    suites.push((
        "pugroup/label-order",
        Box::new(|| {
            let alg = named_algebra(&["p", "q"]);
            let q = GroupOracle::rationals_additive();
            let a = PUFunc::new(
                &alg,
                &q,
                [
                    (GElem::Rat(rat_int(1)), Elem::from_atom_names(&alg, &["p"])?),
                    (GElem::Rat(rat_int(0)), Elem::from_atom_names(&alg, &["q"])?),
                ],
            )?;
            ensure(pu_leq(&a, &a)?, "reflexive")?;
            ensure(pu_leq(&PUFunc::identity(&alg, &q), &a)?, "0 below nonnegative")?;
            Ok(())
        }),
    ));
    suites.push((
        "pugroup/one-over-n-integers",
        Box::new(|| {
            let z = GroupOracle::integers();
            for k in 0..=20i64 {
                let u = Neighborhood::ball(&z, rat_int(k))?;
                for n in 1..=20u64 {
                    let shrunk = one_over_n(&z, &u, n)?;
                    ensure(
                        shrunk == Neighborhood::Ball(rat_int(k / n as i64)),
                        "closed form Ball(⌊k/n⌋)",
                    )?;
                    // Definition replay on the window.
                    for g in -(k + 1)..=(k + 1) {
                        let by_def = (1..=n as i64).all(|j| (j * g).abs() <= k);
                        ensure(shrunk.contains(&z, &GElem::Int(g))? == by_def, "replay")?;
                    }
                }
                ensure(
                    trap(&z, &u)? == Neighborhood::FiniteSubset([GElem::Int(0)].into()),
                    "trap = {0}",
                )?;
            }
            Ok(())
        }),
    ));
    suites.push((
        "pugroup/trap-cases",
        Box::new(|| {
            let z4 = GroupOracle::cyclic(4)?;
            let whole = Neighborhood::finite(&z4, (0..4).map(GElem::Idx))?;
            let Neighborhood::FiniteSubset(t) = trap(&z4, &whole)? else { unreachable!() };
            ensure(t.len() == 4, "trap(G) = G")?;
            let u = Neighborhood::finite(&z4, [GElem::Idx(0), GElem::Idx(2)])?;
            let Neighborhood::FiniteSubset(t) = trap(&z4, &u)? else { unreachable!() };
            ensure(t == [GElem::Idx(0), GElem::Idx(2)].into(), "subgroup caught")?;
            Ok(())
        }),
    ));
    suites.push((
        "pugroup/trap-decompose-replay",
        Box::new(|| {
            let alg = FiniteAlgebra::numbered(3)?;
            let z2 = GroupOracle::cyclic(2)?;
            let phi = SetFunc::atom_measure(&alg, vec![rat(1, 3); 3])?;
            let v = Neighborhood::finite(&z2, [GElem::Idx(0)])?;
            for a in all_z2_pufuncs(&alg, &z2) {
                let factors = trap_decompose(&phi, &a, &v, &rat(1, 3))?;
                ensure(factors.len() <= 3, "factor count ≤ |𝒬|")?;
                let mut prod = PUFunc::identity(&alg, &z2);
                for f in &factors {
                    prod = prod.mul(f)?;
                }
                ensure(prod == a, "product replay")?;
            }
            let top = PUFunc::new(&alg, &z2, [(GElem::Idx(1), Elem::one(&alg))])?;
            ensure(
                trap_decompose(&phi, &top, &v, &rat(1, 4)).is_err(),
                "ε below atom level refused",
            )?;
            Ok(())
        }),
    ));
    suites.push((
        "pugroup/escape-integers",
        Box::new(|| {
            let z = GroupOracle::integers();
            let u = Neighborhood::ball(&z, rat_int(5))?;
            let v = is_escape_function(&z, &LengthFn::Abs, &u, &[rat_int(1)], 20)?;
            ensure(v.is_escape, "|n| escapes on ℤ")?;
            ensure(v.trace[0].1 == Some(6), "index for ε = 1")?;
            Ok(())
        }),
    ));
    suites.push((
        "pugroup/escape-symmdiff-rejection",
        Box::new(|| {
            for n in 2..=3usize {
                let alg = FiniteAlgebra::numbered(n)?;
                let phi = SetFunc::atom_measure(&alg, vec![rat(1, n as i64); n])?;
                let group = symm_diff_group(&alg, &phi)?;
                let length = LengthFn::Table(phi.values().to_vec());
                // ε at the max atom value: every singleton generates inside U.
                let u = Neighborhood::sublevel(&group, &rat(1, n as i64))?;
                let verdict = is_escape_function(&group, &length, &u, &[], 8)?;
                ensure(!verdict.is_escape, "d_φ(·, e) is not an escape function")?;
                ensure(verdict.witness.is_some(), "witness produced")?;
                // The zero submeasure is the only way out.
                let zero_phi = SetFunc::zero_func(&alg);
                let zg = symm_diff_group(&alg, &zero_phi)?;
                let zl = LengthFn::Table(zero_phi.values().to_vec());
                let zu = Neighborhood::sublevel(&zg, &zero())?;
                ensure(is_escape_function(&zg, &zl, &zu, &[], 8)?.is_escape, "zero φ escapes")?;
            }
            Ok(())
        }),
    ));
    suites.push((
        "pugroup/folner-z6-exhaustive",
        Box::new(|| {
            let z6 = GroupOracle::cyclic(6)?;
            let elems: Vec<GElem> = z6.elements()?;
            for a_mask in 0..64u32 {
                let a_set: BTreeSet<GElem> = elems
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| a_mask & (1 << i) != 0)
                    .map(|(_, g)| g.clone())
                    .collect();
                let a_pred = |g: &GElem| a_set.contains(g);
                for g in &elems {
                    // Skip (A, g) with A ∩ gA ≠ ∅.
                    let disjoint = a_set.iter().all(|x| !a_set.contains(&z6.mul(g, x).unwrap()));
                    if !disjoint {
                        continue;
                    }
                    for f_mask in 1..64u32 {
                        let f_set: BTreeSet<GElem> = elems
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| f_mask & (1 << i) != 0)
                            .map(|(_, g)| g.clone())
                            .collect();
                        for k in 0..=12i64 {
                            // folner_check hard-errors if the implication fails.
                            folner_check(&z6, &f_set, &a_pred, g, &rat(k, 6))?;
                        }
                    }
                }
            }
            Ok(())
        }),
    ));
    suites.push((
        "pugroup/pos-type-characters",
        Box::new(|| {
            for (k, j) in [(1usize, 0usize), (2, 0), (2, 1), (4, 1), (4, 3), (6, 3)] {
                let g = GroupOracle::cyclic(k)?;
                let values = cyclic_character(k, j)?;
                ensure(pos_type_check(&g, &values)?, "character accepted")?;
            }
            Ok(())
        }),
    ));
    suites.push((
        "pugroup/pos-type-rejections",
        Box::new(|| {
            let z2 = GroupOracle::cyclic(2)?;
            let bad = vec![cx_one(), cx(rat_int(2), zero())];
            ensure(!pos_type_check(&z2, &bad)?, "(1,2) rejected")?;
            ensure(PosTypeFn::new(&z2, bad).is_err(), "construction rejected")?;
            Ok(())
        }),
    ));
    suites.push((
        "pugroup/pos-type-lift-values",
        Box::new(|| {
            let alg = named_algebra(&["p", "q"]);
            let z2 = GroupOracle::cyclic(2)?;
            let f = PosTypeFn::new(&z2, vec![cx_one(), cx(-one(), zero())])?;
            let mu = SetFunc::atom_measure(&alg, vec![rat(1, 2); 2])?;
            let a = PUFunc::new(
                &alg,
                &z2,
                [
                    (GElem::Idx(1), Elem::from_atom_names(&alg, &["p"])?),
                    (GElem::Idx(0), Elem::from_atom_names(&alg, &["q"])?),
                ],
            )?;
            ensure(pos_type_lift(&f, &mu, &a)? == cx_zero(), "worked value 0")?;
            let ones = PosTypeFn::new(&z2, vec![cx_one(), cx_one()])?;
            ensure(pos_type_lift(&ones, &mu, &a)? == cx_one(), "constant lifts to constant")?;
            Ok(())
        }),
    ));
    suites.push((
        "pugroup/symmdiff-iso",
        Box::new(|| {
            for n in 2..=3usize {
                let alg = FiniteAlgebra::numbered(n)?;
                let phi = SetFunc::atom_measure(&alg, vec![rat(1, n as i64); n])?;
                let group = symm_diff_group(&alg, &phi)?;
                let z2 = GroupOracle::cyclic(2)?;
                let embed = |a: &Elem| {
                    PUFunc::new(
                        &alg,
                        &z2,
                        [(GElem::Idx(1), a.clone()), (GElem::Idx(0), a.complement())],
                    )
                };
                let e = PUFunc::identity(&alg, &z2);
                for a in all_elements(&alg) {
                    for b in all_elements(&alg) {
                        // △ intertwines with convolution.
                        ensure(
                            embed(&a)?.mul(&embed(&b)?)? == embed(&a.symm_diff(&b)?)?,
                            "multiplication intertwined",
                        )?;
                    }
                    // Group length = d_φ(·, e) under the embedding.
                    ensure(
                        group.length(&symm_diff_elem(&a))? == d_phi(&phi, &embed(&a)?, &e)?,
                        "length intertwined",
                    )?;
                }
            }
            Ok(())
        }),
    ));
    suites.push((
        "records/canonical-round-trips",
        Box::new(|| {
            let phi = copoints(3)?;
            let v = records::setfunc_to_value(&phi);
            let back = records::setfunc_from_value(&v)?;
            ensure(
                records::canonical_string(&v)
                    == records::canonical_string(&records::setfunc_to_value(&back)),
                "set-function record stable",
            )?;
            let cert = max_dominated_measure(&phi)?;
            let cv = records::domination_to_value(&phi, &cert, None, true);
            let parsed = records::domination_from_value(&phi, &cv)?;
            verify_domination_certificate(&phi, &parsed)?;
            Ok(())
        }),
    ));
}

// ------------------------------------------------------------------
// Level 2: seeded volume.

fn push_level2(suites: &mut Vec<Suite>, seed: u64) {
    suites.push((
        "volume/group-laws-seeded",
        Box::new(move || {
            let mut rng = rng_from_seed(seed ^ 0x01);
            for n in 2..=4usize {
                let alg = FiniteAlgebra::numbered(n)?;
                let z2 = GroupOracle::cyclic(2)?;
                let z4 = GroupOracle::cyclic(4)?;
                let s3 = GroupOracle::symmetric(3)?;
                let z = GroupOracle::integers();
                check_group_laws(&alg, &z2, &[GElem::Idx(0), GElem::Idx(1)], 100, &mut rng)?;
                check_group_laws(
                    &alg,
                    &z4,
                    &(0..4).map(GElem::Idx).collect::<Vec<_>>(),
                    100,
                    &mut rng,
                )?;
                check_group_laws(
                    &alg,
                    &s3,
                    &(0..6).map(GElem::Idx).collect::<Vec<_>>(),
                    100,
                    &mut rng,
                )?;
                check_group_laws(&alg, &z, &integer_window(8), 100, &mut rng)?;
            }
            Ok(())
        }),
    ));
    suites.push((
        "volume/support-identities-seeded",
        Box::new(move || {
            let mut rng = rng_from_seed(seed ^ 0x02);
            let alg = FiniteAlgebra::numbered(4)?;
            let z4 = GroupOracle::cyclic(4)?;
            check_support_identities(
                &alg,
                &z4,
                &(0..4).map(GElem::Idx).collect::<Vec<_>>(),
                300,
                &mut rng,
            )
        }),
    ));
    suites.push((
        "volume/dphi-invariance-seeded",
        Box::new(move || {
            let mut rng = rng_from_seed(seed ^ 0x03);
            let alg = FiniteAlgebra::numbered(4)?;
            let phi = random_submeasure(&alg, &mut rng)?;
            let s3 = GroupOracle::symmetric(3)?;
            check_dphi_metric(&phi, &s3, &(0..6).map(GElem::Idx).collect::<Vec<_>>(), 300, &mut rng)
        }),
    ));
    suites.push((
        "volume/pi-sharp-seeded",
        Box::new(move || {
            let mut rng = rng_from_seed(seed ^ 0x04);
            let alg = FiniteAlgebra::numbered(4)?;
            let phi = SetFunc::atom_measure(&alg, vec![rat(1, 4); 4])?;
            let z4 = GroupOracle::cyclic(4)?;
            check_pi_sharp(&phi, &z4, &(0..4).map(GElem::Idx).collect::<Vec<_>>(), 200, &mut rng)
        }),
    ));
    suites.push((
        "volume/f-bullet-seeded",
        Box::new(move || {
            let mut rng = rng_from_seed(seed ^ 0x05);
            let alg = FiniteAlgebra::numbered(3)?;
            let phi = SetFunc::atom_measure(&alg, vec![rat(1, 3); 3])?;
            let z2 = GroupOracle::cyclic(2)?.with_length(LengthFn::Table(vec![zero(), one()]))?;
            let z4 = GroupOracle::cyclic(4)?.with_length(GroupOracle::cyclic_word_length(4))?;
            let z = GroupOracle::integers();
            check_length_relabel(&phi, &z2, &[GElem::Idx(0), GElem::Idx(1)], 200, &mut rng)?;
            check_length_relabel(
                &phi,
                &z4,
                &(0..4).map(GElem::Idx).collect::<Vec<_>>(),
                200,
                &mut rng,
            )?;
            check_length_relabel(&phi, &z, &integer_window(6), 200, &mut rng)?;
            Ok(())
        }),
    ));
    suites.push((
        "volume/diffuse-domination-seeded",
        Box::new(move || {
            let mut rng = rng_from_seed(seed ^ 0x06);
            for n in 2..=4usize {
                let alg = FiniteAlgebra::numbered(n)?;
                check_diffuse_equals_domination(&alg, 40, &mut rng)?;
            }
            Ok(())
        }),
    ));
    suites.push((
        "volume/lp-duality-random-covers",
        Box::new(move || {
            let mut rng = rng_from_seed(seed ^ 0x07);
            check_lp_duality_random_covers(50, &mut rng)
        }),
    ));
    suites.push((
        "volume/pullback-seeded",
        Box::new(move || {
            let mut rng = rng_from_seed(seed ^ 0x08);
            let alg = FiniteAlgebra::numbered(4)?;
            check_pullback_preservation(&alg, 20, &mut rng)
        }),
    ));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level1_passes_and_has_enough_suites() {
        let report = run(1, None).unwrap();
        for r in &report.results {
            assert!(r.passed, "suite {} failed: {}", r.name, r.detail);
        }
        assert!(report.results.len() >= 40, "only {} suites", report.results.len());
    }

    #[test]
    fn level2_requires_seed() {
        assert!(matches!(run(2, None), Err(Error::SeedRequired(_))));
        assert!(run(0, None).is_err());
        assert!(run(3, Some(1)).is_err());
    }

    #[test]
    fn level2_passes_with_seed() {
        let report = run(2, Some(20260810)).unwrap();
        for r in &report.results {
            assert!(r.passed, "suite {} failed: {}", r.name, r.detail);
        }
    }
}
