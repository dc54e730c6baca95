//! The line-oriented evaluation language behind `pucalc group`.
//!
//! A script is a sequence of statements separated by newlines or `;`:
//!
//! ```text
//! # context
//! algebra {"atoms":["p","q"]}
//! group   {"kind":"cyclic","order":2}
//! phi     {"kind":"measure","weights":{"p":"1/2","q":"1/2"}}
//!
//! a = pu {1:[p], 0:[q]}
//! assert mul(a, inv(a)) == id
//! assert dphi(a, id) == 1/2
//! d = gamma_decompose(a, [p], [q])
//! assert mul(d.0, d.1) == a
//! ```
//!
//! Expressions: `id`, identifiers (with `.N` tuple indexing), `pu {…}`
//! literals, `[atom,…]` element literals, rational literals, and the calls
//! `mul`, `inv`, `eta`, `sigma`, `support`, `dphi`, `pisharp`, `fbullet`,
//! `gamma_decompose`, `trap_decompose`, `lift`. Structured arguments are
//! strict JSON. There are no loops; each bound value is printed, and a
//! failed `assert` stops the run with both sides shown.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};

use pucalc_core::algebra::{Elem, FiniteAlgebra};
use pucalc_core::pugroup::{
    d_phi, gamma_decompose, trap_decompose, CxRat, GElem, GroupOracle, Neighborhood, PUFunc, PuHom,
};
use pucalc_core::rational::parse_rational;
use pucalc_core::records::{
    self, algebra_from_value, group_from_value, labels_from_value, parse_value,
    partition_from_value, postype_from_value, setfunc_from_value_in,
};
use pucalc_core::submeasure::SetFunc;

use crate::output::{emit, CliError, CliResult, OutputMode};

#[derive(Debug, Clone, PartialEq)]
enum ScriptValue {
    Pu(PUFunc),
    El(Elem),
    Rat(BigRational),
    Cx(CxRat),
    Bool(bool),
    Tuple(Vec<ScriptValue>),
}

impl ScriptValue {
    fn equals(&self, other: &ScriptValue) -> bool {
        match (self, other) {
            (ScriptValue::Rat(r), ScriptValue::Cx(c))
            | (ScriptValue::Cx(c), ScriptValue::Rat(r)) => c.im.is_zero() && c.re == *r,
            _ => self == other,
        }
    }
}

impl fmt::Display for ScriptValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScriptValue::Pu(a) => write!(f, "{a}"),
            ScriptValue::El(e) => write!(f, "{e}"),
            ScriptValue::Rat(r) => write!(f, "{r}"),
            ScriptValue::Cx(c) => {
                if c.im.is_zero() {
                    write!(f, "{}", c.re)
                } else {
                    write!(f, "({} + {}·i)", c.re, c.im)
                }
            }
            ScriptValue::Bool(b) => write!(f, "{b}"),
            ScriptValue::Tuple(items) => {
                write!(f, "(")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, ")")
            }
        }
    }
}

struct Context {
    algebra: Option<Arc<FiniteAlgebra>>,
    group: Option<Arc<GroupOracle>>,
    phi: Option<SetFunc>,
    vars: BTreeMap<String, ScriptValue>,
}

impl Context {
    fn algebra(&self, line: usize) -> CliResult<&Arc<FiniteAlgebra>> {
        self.algebra
            .as_ref()
            .ok_or_else(|| CliError::input(format!("line {line}: no algebra declared yet")))
    }

    fn group(&self, line: usize) -> CliResult<&Arc<GroupOracle>> {
        self.group
            .as_ref()
            .ok_or_else(|| CliError::input(format!("line {line}: no group declared yet")))
    }

    fn phi(&self, line: usize) -> CliResult<&SetFunc> {
        self.phi
            .as_ref()
            .ok_or_else(|| CliError::input(format!("line {line}: no phi declared yet")))
    }
}

/// Splits source text into `(line, statement)` pairs at newlines and `;`
/// outside of strings, braces, and brackets. `#` starts a full-line comment.
fn split_statements(text: &str) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut start_line = 1usize;
    let mut line = 1usize;
    let mut depth = 0i32;
    let mut in_string = false;
    let mut flush = |buf: &mut String, at: usize| {
        let stmt = buf.trim();
        if !stmt.is_empty() && !stmt.starts_with('#') {
            out.push((at, stmt.to_string()));
        }
        buf.clear();
    };
    for ch in text.chars() {
        match ch {
            '"' => {
                in_string = !in_string;
                current.push(ch);
            }
            '{' | '[' if !in_string => {
                depth += 1;
                current.push(ch);
            }
            '}' | ']' if !in_string => {
                depth -= 1;
                current.push(ch);
            }
            '\n' => {
                if depth == 0 && !in_string {
                    flush(&mut current, start_line);
                    start_line = line + 1;
                } else {
                    current.push(' ');
                }
                line += 1;
            }
            ';' if depth == 0 && !in_string => {
                flush(&mut current, start_line);
                start_line = line;
            }
            _ => current.push(ch),
        }
    }
    flush(&mut current, start_line);
    out
}

/// Splits on top-level commas (depth 0, outside strings).
fn split_args(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut depth = 0i32;
    let mut in_string = false;
    for ch in s.chars() {
        match ch {
            '"' => {
                in_string = !in_string;
                current.push(ch);
            }
            '{' | '[' | '(' if !in_string => {
                depth += 1;
                current.push(ch);
            }
            '}' | ']' | ')' if !in_string => {
                depth -= 1;
                current.push(ch);
            }
            ',' if depth == 0 && !in_string => {
                out.push(current.trim().to_string());
                current.clear();
            }
            _ => current.push(ch),
        }
    }
    if !current.trim().is_empty() {
        out.push(current.trim().to_string());
    }
    out
}

/// Finds a top-level occurrence of `needle` outside strings and brackets.
fn find_top_level(s: &str, needle: &str) -> Option<usize> {
    let bytes = s.as_bytes();
    let mut depth = 0i32;
    let mut in_string = false;
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i] as char;
        match ch {
            '"' => in_string = !in_string,
            '{' | '[' | '(' if !in_string => depth += 1,
            '}' | ']' | ')' if !in_string => depth -= 1,
            _ => {}
        }
        if depth == 0 && !in_string && s[i..].starts_with(needle) {
            return Some(i);
        }
        i += 1;
    }
    None
}

fn strip_quotes(s: &str) -> &str {
    let s = s.trim();
    s.strip_prefix('"').and_then(|x| x.strip_suffix('"')).unwrap_or(s)
}

fn is_rational_literal(s: &str) -> bool {
    let s = s.trim();
    let body = s.strip_prefix('-').unwrap_or(s);
    if body.is_empty() {
        return false;
    }
    match body.split_once('/') {
        None => body.chars().all(|c| c.is_ascii_digit()),
        Some((n, d)) => {
            !n.is_empty()
                && !d.is_empty()
                && n.chars().all(|c| c.is_ascii_digit())
                && d.chars().all(|c| c.is_ascii_digit())
        }
    }
}

pub fn run_script(text: &str, mode: OutputMode) -> CliResult<()> {
    let start = std::time::Instant::now();
    let mut ctx = Context { algebra: None, group: None, phi: None, vars: BTreeMap::new() };
    let mut transcript: Vec<Value> = Vec::new();
    let mut text_lines: Vec<String> = Vec::new();
    let mut asserts = 0usize;

    for (line, stmt) in split_statements(text) {
        if let Some(rest) = stmt.strip_prefix("algebra ") {
            ctx.algebra = Some(algebra_from_value(&parse_json(rest, line)?)?);
            continue;
        }
        if let Some(rest) = stmt.strip_prefix("group ") {
            ctx.group = Some(group_from_value(&parse_json(rest, line)?)?);
            continue;
        }
        if let Some(rest) = stmt.strip_prefix("phi ") {
            let algebra = ctx.algebra(line)?.clone();
            ctx.phi = Some(setfunc_from_value_in(&algebra, &parse_json(rest, line)?)?);
            continue;
        }
        if let Some(rest) = stmt.strip_prefix("assert ") {
            asserts += 1;
            match find_top_level(rest, "==") {
                Some(pos) => {
                    let lhs = eval(&ctx, rest[..pos].trim(), line)?;
                    let rhs = eval(&ctx, rest[pos + 2..].trim(), line)?;
                    if !lhs.equals(&rhs) {
                        return Err(CliError::assertion(format!(
                            "line {line}: assertion failed: {stmt}\n  left:  {lhs}\n  right: {rhs}"
                        )));
                    }
                }
                None => {
                    let v = eval(&ctx, rest.trim(), line)?;
                    match v {
                        ScriptValue::Bool(true) => {}
                        ScriptValue::Bool(false) => {
                            return Err(CliError::assertion(format!(
                                "line {line}: assertion failed: {stmt}"
                            )))
                        }
                        other => {
                            return Err(CliError::input(format!(
                                "line {line}: assert needs a comparison or boolean, got {other}"
                            )))
                        }
                    }
                }
            }
            continue;
        }
        // Binding: ident = expr (a single top-level '=', not '==').
        if let Some(pos) = find_binding_eq(&stmt) {
            let name = stmt[..pos].trim();
            if name.is_empty()
                || !name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            {
                return Err(CliError::input(format!("line {line}: bad binding name {name:?}")));
            }
            let value = eval(&ctx, stmt[pos + 1..].trim(), line)?;
            text_lines.push(format!("{name} = {value}"));
            transcript.push(json!({ "bind": name, "value": value.to_string() }));
            ctx.vars.insert(name.to_string(), value);
            continue;
        }
        return Err(CliError::input(format!("line {line}: cannot parse statement {stmt:?}")));
    }
    text_lines.push(format!("{asserts} assertion(s) passed"));
    let record = json!({ "transcript": transcript, "asserts_passed": asserts });
    emit(mode, &record, &text_lines, start.elapsed());
    Ok(())
}

fn find_binding_eq(s: &str) -> Option<usize> {
    let pos = find_top_level(s, "=")?;
    if s[pos..].starts_with("==") || (pos > 0 && s.as_bytes()[pos - 1] == b'=') {
        return None;
    }
    Some(pos)
}

fn parse_json(s: &str, line: usize) -> CliResult<Value> {
    parse_value(s.trim()).map_err(|e| CliError::input(format!("line {line}: {e}")))
}

fn eval(ctx: &Context, expr: &str, line: usize) -> CliResult<ScriptValue> {
    let expr = expr.trim();
    if expr.is_empty() {
        return Err(CliError::input(format!("line {line}: empty expression")));
    }
    if expr == "id" {
        return Ok(ScriptValue::Pu(PUFunc::identity(ctx.algebra(line)?, ctx.group(line)?)));
    }
    if expr == "true" {
        return Ok(ScriptValue::Bool(true));
    }
    if expr == "false" {
        return Ok(ScriptValue::Bool(false));
    }
    if let Some(rest) = expr.strip_prefix("pu") {
        let rest = rest.trim_start();
        if rest.starts_with('{') {
            return pu_literal(ctx, rest, line);
        }
    }
    if expr.starts_with('[') && expr.ends_with(']') {
        return Ok(ScriptValue::El(elem_literal(ctx, expr, line)?));
    }
    if is_rational_literal(expr) {
        return Ok(ScriptValue::Rat(parse_rational(expr)?));
    }
    // Call?
    if let Some(open) = expr.find('(') {
        let name = expr[..open].trim();
        if expr.ends_with(')') && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            let args = split_args(&expr[open + 1..expr.len() - 1]);
            return call(ctx, name, &args, line);
        }
    }
    // Identifier with optional tuple index.
    let (base, indices) = match expr.split_once('.') {
        None => (expr, Vec::new()),
        Some((b, idx)) => {
            let parts: Vec<usize> = idx
                .split('.')
                .map(|p| {
                    p.parse::<usize>()
                        .map_err(|_| CliError::input(format!("line {line}: bad index {p:?}")))
                })
                .collect::<CliResult<_>>()?;
            (b, parts)
        }
    };
    let mut value =
        ctx.vars.get(base).cloned().ok_or_else(|| {
            CliError::input(format!("line {line}: undefined identifier {base:?}"))
        })?;
    for idx in indices {
        match value {
            ScriptValue::Tuple(items) => {
                value = items.get(idx).cloned().ok_or_else(|| {
                    CliError::input(format!("line {line}: index {idx} out of range"))
                })?;
            }
            other => {
                return Err(CliError::input(format!(
                    "line {line}: {other} is not a tuple, cannot index"
                )))
            }
        }
    }
    Ok(value)
}

/// `pu {1:[p], 0:[q]}` with bare or quoted tokens.
fn pu_literal(ctx: &Context, body: &str, line: usize) -> CliResult<ScriptValue> {
    let algebra = ctx.algebra(line)?;
    let group = ctx.group(line)?;
    let inner = body
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| CliError::input(format!("line {line}: malformed pu literal")))?;
    let mut pairs = Vec::new();
    for entry in split_args(inner) {
        if entry.is_empty() {
            continue;
        }
        let (key, value) = entry
            .split_once(':')
            .ok_or_else(|| CliError::input(format!("line {line}: pu entry needs label:cell")))?;
        let label = group.parse_elem(strip_quotes(key))?;
        let cell = elem_literal(ctx, value.trim(), line)?;
        pairs.push((label, cell));
    }
    Ok(ScriptValue::Pu(PUFunc::new(algebra, group, pairs)?))
}

/// `[p,q]` with bare or quoted atom names; `[]` is the zero element.
fn elem_literal(ctx: &Context, s: &str, line: usize) -> CliResult<Elem> {
    let algebra = ctx.algebra(line)?;
    let inner =
        s.trim().strip_prefix('[').and_then(|x| x.strip_suffix(']')).ok_or_else(|| {
            CliError::input(format!("line {line}: malformed element literal {s:?}"))
        })?;
    let names: Vec<&str> = inner.split(',').map(strip_quotes).filter(|n| !n.is_empty()).collect();
    Ok(Elem::from_atom_names(algebra, &names)?)
}

fn expect_pu(v: ScriptValue, line: usize, what: &str) -> CliResult<PUFunc> {
    match v {
        ScriptValue::Pu(a) => Ok(a),
        other => Err(CliError::input(format!(
            "line {line}: {what} needs a labeled partition, got {other}"
        ))),
    }
}

fn expect_el(v: ScriptValue, line: usize, what: &str) -> CliResult<Elem> {
    match v {
        ScriptValue::El(e) => Ok(e),
        other => Err(CliError::input(format!("line {line}: {what} needs an element, got {other}"))),
    }
}

fn want_args(name: &str, args: &[String], n: usize, line: usize) -> CliResult<()> {
    if args.len() != n {
        return Err(CliError::input(format!(
            "line {line}: {name} takes {n} argument(s), got {}",
            args.len()
        )));
    }
    Ok(())
}

fn call(ctx: &Context, name: &str, args: &[String], line: usize) -> CliResult<ScriptValue> {
    match name {
        "mul" => {
            want_args(name, args, 2, line)?;
            let a = expect_pu(eval(ctx, &args[0], line)?, line, "mul")?;
            let b = expect_pu(eval(ctx, &args[1], line)?, line, "mul")?;
            Ok(ScriptValue::Pu(a.mul(&b)?))
        }
        "inv" => {
            want_args(name, args, 1, line)?;
            let a = expect_pu(eval(ctx, &args[0], line)?, line, "inv")?;
            Ok(ScriptValue::Pu(a.inverse()?))
        }
        "eta" => {
            want_args(name, args, 1, line)?;
            let g = ctx.group(line)?.parse_elem(strip_quotes(&args[0]))?;
            Ok(ScriptValue::Pu(PUFunc::eta(ctx.algebra(line)?, ctx.group(line)?, g)?))
        }
        "sigma" => {
            want_args(name, args, 1, line)?;
            let v = parse_json(&args[0], line)?;
            let obj = v
                .as_object()
                .ok_or_else(|| CliError::input(format!("line {line}: sigma needs an object")))?;
            let cells_v = obj
                .get("cells")
                .ok_or_else(|| CliError::input(format!("line {line}: sigma needs cells")))?;
            let labels_v = obj
                .get("labels")
                .ok_or_else(|| CliError::input(format!("line {line}: sigma needs labels")))?;
            let partition = partition_from_value(ctx.algebra(line)?, cells_v)?;
            let group = ctx.group(line)?;
            let labels = labels_v
                .as_array()
                .ok_or_else(|| CliError::input(format!("line {line}: labels must be an array")))?
                .iter()
                .map(|l| {
                    let s = l.as_str().ok_or_else(|| {
                        CliError::input(format!("line {line}: label must be a string"))
                    })?;
                    Ok(group.parse_elem(s)?)
                })
                .collect::<CliResult<Vec<GElem>>>()?;
            Ok(ScriptValue::Pu(PUFunc::sigma(group, &partition, &labels)?))
        }
        "support" => {
            want_args(name, args, 2, line)?;
            let a = expect_pu(eval(ctx, &args[0], line)?, line, "support")?;
            let group = ctx.group(line)?;
            let inner =
                args[1].trim().strip_prefix('[').and_then(|x| x.strip_suffix(']')).ok_or_else(
                    || CliError::input(format!("line {line}: support needs a [label,…] set")),
                )?;
            let labels = inner
                .split(',')
                .map(strip_quotes)
                .filter(|t| !t.is_empty())
                .map(|t| Ok(group.parse_elem(t)?))
                .collect::<CliResult<std::collections::BTreeSet<GElem>>>()?;
            Ok(ScriptValue::El(a.support_in(&labels)))
        }
        "dphi" => {
            want_args(name, args, 2, line)?;
            let a = expect_pu(eval(ctx, &args[0], line)?, line, "dphi")?;
            let b = expect_pu(eval(ctx, &args[1], line)?, line, "dphi")?;
            Ok(ScriptValue::Rat(d_phi(ctx.phi(line)?, &a, &b)?))
        }
        "pisharp" => {
            want_args(name, args, 2, line)?;
            let spec = parse_json(&args[0], line)?;
            let a = expect_pu(eval(ctx, &args[1], line)?, line, "pisharp")?;
            let obj = spec
                .as_object()
                .ok_or_else(|| CliError::input(format!("line {line}: pisharp needs an object")))?;
            let target = match obj.get("target") {
                Some(t) => group_from_value(t)?,
                None => ctx.group(line)?.clone(),
            };
            let map_v = obj
                .get("map")
                .ok_or_else(|| CliError::input(format!("line {line}: pisharp needs a map")))?;
            let map_obj = map_v
                .as_object()
                .ok_or_else(|| CliError::input(format!("line {line}: map must be an object")))?;
            let algebra = ctx.algebra(line)?;
            let source = ctx.group(line)?;
            let mut table = BTreeMap::new();
            for (k, labels) in map_obj {
                let g = source.parse_elem(k)?;
                let value = labels_from_value(algebra, &target, labels)?;
                table.insert(g, value);
            }
            let pi = PuHom::new(source, algebra, &target, table)?;
            Ok(ScriptValue::Pu(pi.lift(&a)?))
        }
        "fbullet" => {
            want_args(name, args, 2, line)?;
            let a = expect_pu(eval(ctx, &args[1], line)?, line, "fbullet")?;
            let arg0 = args[0].trim();
            if arg0 == "length" {
                return Ok(ScriptValue::Pu(a.length_relabel()?));
            }
            let spec = parse_json(arg0, line)?;
            let obj = spec
                .as_object()
                .ok_or_else(|| CliError::input(format!("line {line}: fbullet needs an object")))?;
            let target = match obj.get("target") {
                Some(t) => group_from_value(t)?,
                None => ctx.group(line)?.clone(),
            };
            let map_v = obj
                .get("map")
                .ok_or_else(|| CliError::input(format!("line {line}: fbullet needs a map")))?;
            let map = records::label_map_from_value(ctx.group(line)?, &target, map_v)?;
            let out = a.relabel(&target, |g| {
                map.get(g).cloned().ok_or_else(|| {
                    pucalc_core::Error::InvalidInput(format!("fbullet map has no entry for {g}"))
                })
            })?;
            Ok(ScriptValue::Pu(out))
        }
        "gamma_decompose" => {
            want_args(name, args, 3, line)?;
            let c = expect_pu(eval(ctx, &args[0], line)?, line, "gamma_decompose")?;
            let a = expect_el(eval(ctx, &args[1], line)?, line, "gamma_decompose")?;
            let b = expect_el(eval(ctx, &args[2], line)?, line, "gamma_decompose")?;
            let (x, y) = gamma_decompose(&c, &a, &b)?;
            Ok(ScriptValue::Tuple(vec![ScriptValue::Pu(x), ScriptValue::Pu(y)]))
        }
        "trap_decompose" => {
            want_args(name, args, 3, line)?;
            let a = expect_pu(eval(ctx, &args[0], line)?, line, "trap_decompose")?;
            let nbhd = neighborhood_from_json(ctx, &args[1], line)?;
            let eps = parse_rational(args[2].trim())?;
            let factors = trap_decompose(ctx.phi(line)?, &a, &nbhd, &eps)?;
            Ok(ScriptValue::Tuple(factors.into_iter().map(ScriptValue::Pu).collect()))
        }
        "lift" => {
            want_args(name, args, 2, line)?;
            let spec = parse_json(&args[0], line)?;
            let a = expect_pu(eval(ctx, &args[1], line)?, line, "lift")?;
            let f = postype_from_value(ctx.group(line)?, &spec)?;
            let value = pucalc_core::pugroup::pos_type_lift(&f, ctx.phi(line)?, &a)?;
            Ok(ScriptValue::Cx(value))
        }
        other => Err(CliError::input(format!("line {line}: unknown function {other:?}"))),
    }
}

/// `{"set":["0","1"]}` or `{"ball":"5"}` against the context group.
fn neighborhood_from_json(ctx: &Context, s: &str, line: usize) -> CliResult<Neighborhood> {
    let v = parse_json(s, line)?;
    let obj = v
        .as_object()
        .ok_or_else(|| CliError::input(format!("line {line}: neighborhood must be an object")))?;
    let group = ctx.group(line)?;
    if let Some(set) = obj.get("set") {
        let members = set
            .as_array()
            .ok_or_else(|| CliError::input(format!("line {line}: set must be an array")))?
            .iter()
            .map(|m| {
                let s = m.as_str().ok_or_else(|| {
                    CliError::input(format!("line {line}: set member must be a string"))
                })?;
                Ok(group.parse_elem(s)?)
            })
            .collect::<CliResult<Vec<GElem>>>()?;
        return Ok(Neighborhood::finite(group, members)?);
    }
    if let Some(ball) = obj.get("ball") {
        let r = parse_rational(ball.as_str().ok_or_else(|| {
            CliError::input(format!("line {line}: ball radius must be a string"))
        })?)?;
        return Ok(Neighborhood::ball(group, r)?);
    }
    Err(CliError::input(format!("line {line}: neighborhood needs \"set\" or \"ball\"")))
}
