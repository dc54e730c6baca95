//! Subcommand implementations.

use std::path::Path;
use std::time::Instant;

use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Map, Value};

use pucalc_core::algebra::MAX_ATOMS_EXHAUSTIVE_PAIRS;
use pucalc_core::pathology::{
    self, christensen_witness, kelley_greedy, max_dominated_measure, verify_domination_certificate,
    verify_witness, witness_mass_bound, GenerateKind, MAX_ATOMS_LP,
};
use pucalc_core::pugroup::{pos_type_lift, PUFunc};
use pucalc_core::rational::{format_rational, parse_nonneg_rational, parse_rational};
use pucalc_core::records::{
    self, canonical_string, complex_to_value, domination_from_value, domination_to_value,
    group_from_value, kelley_to_value, labels_from_value, parse_value, postype_from_value,
    setfunc_from_value, witness_from_value, witness_to_value,
};
use pucalc_core::selftest;
use pucalc_core::submeasure::{classify, diffuseness, two_valued_domination, CheckMode, SetFunc};
use pucalc_core::Error;

use crate::output::{digest, emit, CliError, CliResult, OutputMode};

const SAMPLED_CLASSIFY_PAIRS: usize = 4000;

fn read_input(path: &Path) -> CliResult<(String, String)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    let d = digest(text.as_bytes());
    Ok((text, d))
}

fn load_setfunc(path: &Path, max_n: Option<usize>) -> CliResult<(SetFunc, String)> {
    let (text, d) = read_input(path)?;
    let phi = setfunc_from_value(&parse_value(&text)?)?;
    if let Some(cap) = max_n {
        let n = phi.algebra().atom_count();
        if n > cap {
            return Err(Error::CapacityExceeded {
                what: "requested --max-n".into(),
                limit: cap,
                requested: n,
            }
            .into());
        }
    }
    Ok((phi, d))
}

fn flag_line(name: &str, check: &pucalc_core::submeasure::PropCheck) -> String {
    match (&check.holds, &check.counterexample) {
        (true, _) => format!("{name:<18} yes"),
        (false, Some(cx)) => format!("{name:<18} no   ({cx})"),
        (false, None) => format!("{name:<18} no"),
    }
}

pub fn cmd_analyze(
    input: &Path,
    mode: OutputMode,
    seed: Option<u64>,
    max_n: Option<usize>,
) -> CliResult<()> {
    let start = Instant::now();
    let (phi, input_digest) = load_setfunc(input, max_n)?;
    let n = phi.algebra().atom_count();
    let check_mode = if n <= MAX_ATOMS_EXHAUSTIVE_PAIRS {
        CheckMode::Exhaustive
    } else {
        let seed = seed.ok_or_else(|| {
            CliError::input(format!(
                "classification at n = {n} is sampled; pass an explicit --seed"
            ))
        })?;
        CheckMode::Sampled { seed, samples: SAMPLED_CLASSIFY_PAIRS }
    };
    let report = classify(&phi, check_mode)?;

    let mut record = Map::new();
    let mut text = Vec::new();
    text.push(format!("input sha256: {input_digest}"));
    text.push(format!("atoms: {}", n));
    let mut classification = Map::new();
    for (name, check) in [
        ("monotone", &report.monotone),
        ("subadditive", &report.subadditive),
        ("submodular", &report.submodular),
        ("additive", &report.additive),
        ("strictly_positive", &report.strictly_positive),
    ] {
        classification.insert(name.into(), Value::Bool(check.holds));
        text.push(flag_line(name, check));
    }
    classification.insert("sampled".into(), Value::Bool(report.sampled));
    classification.insert("verdict".into(), Value::String(report.verdict().into()));
    text.push(format!("verdict: {}", report.verdict()));
    record.insert("classification".into(), Value::Object(classification));

    // Diffuseness, domination, and the κ preview rely on their own exact
    // internal precondition checks, not on the (possibly sampled) report;
    // they are skipped quietly when a precondition genuinely fails.
    if let (Ok(diff), Ok(dom)) = (diffuseness(&phi), two_valued_domination(&phi)) {
        text.push(format!("diffuseness: {}", format_rational(&diff)));
        text.push(format!("two-valued domination: {}", format_rational(&dom)));
        record.insert("diffuseness".into(), Value::String(format_rational(&diff)));
        record.insert("two_valued_domination".into(), Value::String(format_rational(&dom)));
    }
    if n <= MAX_ATOMS_LP && !phi.total().is_zero() {
        if let Ok(cert) = max_dominated_measure(&phi) {
            let kappa = &cert.value / phi.total();
            text.push(format!(
                "M(φ) = {}, κ(φ) = {}",
                format_rational(&cert.value),
                format_rational(&kappa)
            ));
            record.insert("M".into(), Value::String(format_rational(&cert.value)));
            record.insert("kappa".into(), Value::String(format_rational(&kappa)));
        }
    }
    emit(mode, &Value::Object(record), &text, start.elapsed());
    Ok(())
}

pub fn cmd_kappa(
    input: &Path,
    mode: OutputMode,
    max_n: Option<usize>,
    verify: Option<&Path>,
) -> CliResult<()> {
    let start = Instant::now();
    let (phi, input_digest) = load_setfunc(input, max_n)?;
    let cert = match verify {
        Some(cert_path) => {
            let (text, _) = read_input(cert_path)?;
            let cert = domination_from_value(&phi, &parse_value(&text)?)?;
            verify_domination_certificate(&phi, &cert)?;
            cert
        }
        None => max_dominated_measure(&phi)?,
    };
    let total = phi.total();
    let kappa = if total.is_zero() { None } else { Some(&cert.value / &total) };
    let record = domination_to_value(&phi, &cert, kappa.as_ref(), true);
    let mut text = vec![
        format!("input sha256: {input_digest}"),
        format!("M(φ) = {}", format_rational(&cert.value)),
    ];
    match &kappa {
        Some(k) => text.push(format!("κ(φ) = {}", format_rational(k))),
        None => text.push("κ undefined: φ(1) = 0".into()),
    }
    text.push(format!(
        "primal: ({})",
        cert.primal.iter().map(format_rational).collect::<Vec<_>>().join(", ")
    ));
    text.push(format!(
        "dual weights on {} sets, cost {}",
        cert.dual.len(),
        format_rational(&cert.dual_cost)
    ));
    text.push("certificate verified: true".into());
    emit(mode, &record, &text, start.elapsed());
    Ok(())
}

pub fn cmd_kelley(
    input: &Path,
    order: Option<&str>,
    mode: OutputMode,
    max_n: Option<usize>,
) -> CliResult<()> {
    let start = Instant::now();
    let (phi, input_digest) = load_setfunc(input, max_n)?;
    let n = phi.algebra().atom_count();
    let order: Vec<usize> = match order {
        None => (0..n).collect(),
        Some(s) => s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| CliError::input(format!("bad --order entry {p:?}")))
            })
            .collect::<CliResult<_>>()?,
    };
    let km = kelley_greedy(&phi, &order)?;
    let record = kelley_to_value(&phi, &km, true);
    let names = phi.algebra().atom_names();
    let text = vec![
        format!("input sha256: {input_digest}"),
        format!(
            "order: {}",
            km.order.iter().map(|&i| names[i].clone()).collect::<Vec<_>>().join(", ")
        ),
        format!("ν = ({})", km.nu.iter().map(format_rational).collect::<Vec<_>>().join(", ")),
        format!("ν(1) = {} = φ(1)", format_rational(&km.nu.iter().sum())),
        "verified: ν ≤ φ on every element".into(),
    ];
    emit(mode, &record, &text, start.elapsed());
    Ok(())
}

pub fn cmd_christensen(
    input: &Path,
    epsilon: &str,
    mode: OutputMode,
    max_n: Option<usize>,
    verify: Option<&Path>,
) -> CliResult<()> {
    let start = Instant::now();
    let (phi, input_digest) = load_setfunc(input, max_n)?;
    let eps = parse_rational(epsilon)?;
    let witness = match verify {
        Some(path) => {
            let (text, _) = read_input(path)?;
            let w = witness_from_value(&phi, &parse_value(&text)?)?;
            if let Some(w) = &w {
                verify_witness(&phi, w)?;
            }
            w
        }
        None => christensen_witness(&phi, &eps)?,
    };
    let mut text = vec![format!("input sha256: {input_digest}")];
    let record = match &witness {
        None => {
            text.push(format!("no covering witness at ε = {}", format_rational(&eps)));
            witness_to_value(&phi, None, None)
        }
        Some(w) => {
            let (m_val, bound) = witness_mass_bound(&phi, w)?;
            text.push(format!(
                "witness at ε = {}: m = {}, {} distinct sets, min coverage {}",
                format_rational(&w.epsilon),
                w.m,
                w.sets.len(),
                w.min_coverage
            ));
            text.push(format!(
                "mass bound: M(φ) = {} ≤ ε/(1−ε) = {}",
                format_rational(&m_val),
                format_rational(&bound)
            ));
            witness_to_value(&phi, Some(w), Some((&m_val, &bound)))
        }
    };
    emit(mode, &record, &text, start.elapsed());
    Ok(())
}

pub fn cmd_lift(input: &Path, mode: OutputMode) -> CliResult<()> {
    let start = Instant::now();
    let (text_in, input_digest) = read_input(input)?;
    let v = parse_value(&text_in)?;
    let obj = v.as_object().ok_or_else(|| CliError::input("lift job must be an object"))?;
    let get = |k: &str| -> CliResult<&Value> {
        obj.get(k).ok_or_else(|| CliError::input(format!("lift job is missing field {k:?}")))
    };
    let algebra = records::algebra_from_value(get("algebra")?)?;
    let group = group_from_value(get("group")?)?;
    let f = postype_from_value(&group, get("f")?)?;
    let mu = records::setfunc_from_value_in(&algebra, get("mu")?)?;
    let a: PUFunc = labels_from_value(&algebra, &group, get("a")?)?;
    let value = pos_type_lift(&f, &mu, &a)?;
    let record = json!({
        "value": complex_to_value(&value),
        "extends": true,
        "verified": true,
    });
    let text = vec![
        format!("input sha256: {input_digest}"),
        format!("f′(a) = {}", canonical_string(&complex_to_value(&value)).trim().to_string()),
        "extends f through η: true".into(),
        "|f′(a)|² ≤ f(e)²: true".into(),
    ];
    emit(mode, &record, &text, start.elapsed());
    Ok(())
}

pub fn cmd_generate(
    kind: &str,
    params: &[String],
    seed: Option<u64>,
    mode: OutputMode,
) -> CliResult<()> {
    let want = |n: usize| -> CliResult<()> {
        if params.len() != n {
            return Err(CliError::input(format!(
                "generate {kind} takes {n} parameter(s), got {}",
                params.len()
            )));
        }
        Ok(())
    };
    let parse_n = |s: &str| -> CliResult<usize> {
        s.parse().map_err(|_| CliError::input(format!("bad integer parameter {s:?}")))
    };
    let gen_kind = match kind {
        "copoints" => {
            want(1)?;
            GenerateKind::Copoints { n: parse_n(&params[0])? }
        }
        "ell_subsets_cover" => {
            want(2)?;
            GenerateKind::EllSubsetsCover { n: parse_n(&params[0])?, ell: parse_n(&params[1])? }
        }
        "random_cover" => {
            want(3)?;
            let seed = seed
                .ok_or_else(|| CliError::input("generate random_cover needs an explicit --seed"))?;
            GenerateKind::RandomCover {
                n: parse_n(&params[0])?,
                m: parse_n(&params[1])?,
                density: parse_nonneg_rational(&params[2])?,
                seed,
            }
        }
        "concave_cardinality" => {
            want(2)?;
            let n = parse_n(&params[0])?;
            let values = params[1]
                .split(',')
                .map(|p| parse_nonneg_rational(p.trim()))
                .collect::<Result<Vec<BigRational>, _>>()?;
            GenerateKind::ConcaveCardinality { n, values }
        }
        other => return Err(CliError::input(format!("unknown generate kind {other:?}"))),
    };
    let phi = pathology::generate(&gen_kind)?;
    // The record is the artifact; emit it canonically in both modes.
    let _ = mode;
    print!("{}", canonical_string(&records::setfunc_to_value(&phi)));
    Ok(())
}

pub fn cmd_selftest(level: u8, seed: Option<u64>, mode: OutputMode) -> CliResult<()> {
    let start = Instant::now();
    let report = selftest::run(level, seed)?;
    let passed = report.results.iter().filter(|r| r.passed).count();
    let total = report.results.len();
    let mut text = Vec::new();
    for r in &report.results {
        if r.passed {
            text.push(format!("suite {:<42} ok", r.name));
        } else {
            text.push(format!("suite {:<42} FAILED: {}", r.name, r.detail));
        }
    }
    text.push(format!("{total} suites, {passed} passed"));
    let record = json!({
        "level": level,
        "suites": report
            .results
            .iter()
            .map(|r| json!({ "name": r.name, "passed": r.passed }))
            .collect::<Vec<_>>(),
        "passed": passed == total,
    });
    emit(mode, &record, &text, start.elapsed());
    if passed != total {
        return Err(CliError::new(5, format!("{} suite(s) failed", total - passed)));
    }
    Ok(())
}
