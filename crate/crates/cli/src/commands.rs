use std::fmt::Write as _;
use std::time::Instant;

use orthosep_core::orbits::{
    orbit_count_formula, orbit_reps_brute_force, orbit_reps_grammar, type_breakdown, OrbitCount,
};
use orthosep_core::separate::{
    beta_sep, ceil_log, gamma_sep_check, is_minimal, is_separating, main_set,
    min_separating_subset, sigma_sep_bounded, OrbitTable, SeparationReport,
};
use orthosep_core::{Error, Field, Group};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::sets::{self, Claim};
use crate::{Expect, SetArgs};

/// Why a command stopped before producing a verdict.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Budget(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Budget(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(msg) => write!(f, "{msg}"),
            Failure::Budget(msg) => write!(f, "budget exceeded: {msg}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            other => Failure::Config(other.to_string()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Config(format!("{e:#}"))
    }
}

/// Result of a command that ran to completion.
pub struct Outcome {
    pub report: Value,
    pub human: String,
    /// Header and rows for CSV output; otherwise the report's scalar fields
    /// form a single row.
    pub csv: Option<(Vec<&'static str>, Vec<Vec<String>>)>,
    /// Whether every checked claim held.
    pub passed: bool,
    pub warnings: Vec<String>,
}

impl Outcome {
    fn new(report: Value, human: String, passed: bool) -> Self {
        Outcome {
            report,
            human,
            csv: None,
            passed,
            warnings: Vec::new(),
        }
    }
}

fn status(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

fn field(q: u64) -> Result<Field, Failure> {
    Ok(Field::new(q)?)
}

fn check_m(m: usize) -> Result<(), Failure> {
    if m == 0 {
        return Err(Failure::Config("m must be at least 1".into()));
    }
    Ok(())
}

/// `q^(2m)`, or `None` when it does not fit comfortably in 128 bits.
fn point_count(q: u64, m: usize) -> Option<u128> {
    let n = u128::from(q).checked_pow(u32::try_from(2 * m).ok()?)?;
    (n < u128::MAX / 8).then_some(n)
}

/// The orbit count, refusing when the orbit table would exceed `budget`.
fn orbit_budget(q: u64, m: usize, budget: u128) -> Result<OrbitCount, Failure> {
    let too_big = || Failure::Budget(format!("orbit table for q={q} m={m} exceeds {budget}"));
    point_count(q, m).ok_or_else(too_big)?;
    let count = orbit_count_formula(m, q as usize);
    if count.kappa > budget {
        return Err(too_big());
    }
    Ok(count)
}

fn insert(report: &mut Value, key: &str, value: impl Serialize) {
    report.as_object_mut().expect("reports are objects").insert(
        key.to_string(),
        serde_json::to_value(value).expect("serializable"),
    );
}

pub fn orbits(q: u64, m: usize, list: bool, budget: u128) -> Result<Outcome, Failure> {
    let start = Instant::now();
    let field = field(q)?;
    check_m(m)?;
    let count = orbit_budget(q, m, budget)?;
    let group = Group::new(&field);
    let grammar = orbit_reps_grammar(&group, m);
    let mut warnings = Vec::new();
    let points = point_count(q, m).expect("checked by orbit_budget");
    let brute = if points <= budget {
        Some(orbit_reps_brute_force(&group, m, budget)?)
    } else {
        warnings.push(format!(
            "brute force skipped: {points} points exceed budget {budget}"
        ));
        None
    };
    let [zero, a, b, c] = type_breakdown(&grammar);
    let agree = brute.as_ref().map(|reps| *reps == grammar);
    let passed = grammar.len() as u128 == count.kappa
        && [a, b, c] == [count.kappa1, count.kappa2, count.kappa3]
        && zero == 1
        && agree != Some(false);
    let listed = list || grammar.len() <= 100;

    let mut report = json!({
        "q": q,
        "m": m,
        "kappa": grammar.len(),
        "formula": count,
        "breakdown": {"zero": zero, "a": a, "b": b, "c": c},
        "brute_force": brute.is_some(),
        "status": status(passed),
    });
    if let Some(agree) = agree {
        insert(&mut report, "strategies_agree", agree);
    }
    if listed {
        let reps: Vec<Value> = grammar
            .iter()
            .map(|r| json!({"point": r.point, "type": r.otype, "shape": r.shape}))
            .collect();
        insert(&mut report, "representatives", reps);
    }
    insert(&mut report, "runtime_ms", start.elapsed().as_millis());

    let mut human = String::new();
    writeln!(human, "GF({q}), m = {m}").unwrap();
    writeln!(
        human,
        "orbits       {} (formula {})",
        grammar.len(),
        count.kappa
    )
    .unwrap();
    writeln!(human, "by type      0: {zero}  a: {a}  b: {b}  c: {c}").unwrap();
    match agree {
        Some(true) => writeln!(human, "brute force  agrees").unwrap(),
        Some(false) => writeln!(human, "brute force  DISAGREES").unwrap(),
        None => writeln!(human, "brute force  skipped").unwrap(),
    }
    if listed {
        for r in &grammar {
            writeln!(human, "  {}  {}", r.otype, r.point).unwrap();
        }
    }
    writeln!(human, "status       {}", status(passed)).unwrap();
    let rows = grammar
        .iter()
        .map(|r| vec![r.otype.to_string(), r.point.to_string()])
        .collect();
    let mut out = Outcome::new(report, human, passed);
    out.csv = Some((vec!["type", "point"], rows));
    out.warnings = warnings;
    Ok(out)
}

fn claim_holds(claim: &Claim, report: &SeparationReport) -> bool {
    let sep_ok = claim.separating.map_or(true, |c| c == report.separating);
    let min_ok = match (claim.minimal, report.minimal) {
        (Some(c), Some(found)) => c == found,
        _ => true,
    };
    sep_ok && min_ok
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn render_separation(report: &SeparationReport, human: &mut String) {
    writeln!(
        human,
        "set          {} ({} members)",
        report.set, report.size
    )
    .unwrap();
    writeln!(
        human,
        "GF({}), m = {}, {} orbits",
        report.q, report.m, report.kappa
    )
    .unwrap();
    writeln!(human, "separating   {}", yes_no(report.separating)).unwrap();
    if let Some(minimal) = report.minimal {
        writeln!(human, "minimal      {}", yes_no(minimal)).unwrap();
    }
    for w in &report.witnesses {
        let prefix = match &w.removed {
            Some(label) => format!("without {label}"),
            None => "collision".to_string(),
        };
        let values: Vec<String> = w.fingerprint.0.iter().map(|x| x.to_string()).collect();
        writeln!(
            human,
            "  {prefix}: {} ~ {}  [{}]",
            w.left,
            w.right,
            values.join(" ")
        )
        .unwrap();
    }
}

pub fn verify(
    q: u64,
    m: usize,
    args: &SetArgs,
    minimality: bool,
    expect: Expect,
    budget: u128,
) -> Result<Outcome, Failure> {
    let field = field(q)?;
    check_m(m)?;
    orbit_budget(q, m, budget)?;
    let set = sets::build(&field, m, args)?;
    let claim = sets::claim_for(expect, args.set, &field, m);
    let table = OrbitTable::new(&field, m);
    let mut report = is_separating(&table, &set)?;
    if minimality && report.separating {
        report = is_minimal(&table, &set)?;
    }
    let passed = claim_holds(&claim, &report);
    let verdict = if claim.is_empty() {
        "NO_CLAIM"
    } else {
        status(passed)
    };

    let mut value = serde_json::to_value(&report).expect("serializable");
    insert(&mut value, "claim", claim);
    insert(&mut value, "status", verdict);
    let mut human = String::new();
    render_separation(&report, &mut human);
    writeln!(human, "status       {verdict}").unwrap();
    Ok(Outcome::new(value, human, passed))
}

pub fn expected_beta(q: u64) -> u32 {
    if q == 2 {
        2
    } else {
        q as u32 - 1
    }
}

pub fn beta(q: u64, m: usize, max_degree: u32, budget: u128) -> Result<Outcome, Failure> {
    let start = Instant::now();
    let field = field(q)?;
    check_m(m)?;
    orbit_budget(q, m, budget)?;
    let expected = expected_beta(q);
    let (value, found) = match beta_sep(m, &field, max_degree) {
        Ok(r) => (serde_json::to_value(&r).expect("serializable"), Some(r)),
        Err(Error::NotFoundWithinBudget(d)) if expected <= d => (
            json!({"q": q, "m": m, "beta_sep": null, "runtime_ms": start.elapsed().as_millis()}),
            None,
        ),
        Err(Error::NotFoundWithinBudget(d)) => {
            return Err(Failure::Budget(format!(
                "no separating degree bound up to {d}; raise --max-degree to at least {expected}"
            )))
        }
        Err(e) => return Err(e.into()),
    };
    let passed = found.as_ref().map(|r| r.beta_sep) == Some(expected);
    let mut value = value;
    insert(&mut value, "expected", expected);
    insert(&mut value, "max_degree", max_degree);
    insert(&mut value, "status", status(passed));

    let mut human = String::new();
    writeln!(human, "GF({q}), m = {m}").unwrap();
    match &found {
        Some(r) => {
            writeln!(human, "beta_sep     {} (expected {expected})", r.beta_sep).unwrap();
            let dims: Vec<String> = r.dims.iter().map(|d| d.to_string()).collect();
            writeln!(
                human,
                "dimensions   {} (degrees 1..={})",
                dims.join(" "),
                r.beta_sep
            )
            .unwrap();
            if let Some(w) = &r.below {
                writeln!(human, "below it     {} ~ {}", w.left, w.right).unwrap();
            }
        }
        None => writeln!(
            human,
            "beta_sep     not found up to degree {max_degree} (expected {expected})"
        )
        .unwrap(),
    }
    writeln!(human, "status       {}", status(passed)).unwrap();
    Ok(Outcome::new(value, human, passed))
}

pub fn sigma(q: u64, max_m: usize, budget: u128) -> Result<Outcome, Failure> {
    let field = field(q)?;
    orbit_budget(q, max_m.max(2), budget)?;
    let r = sigma_sep_bounded(&field, max_m)?;
    let passed = r.sigma_sep == Some(2);
    let mut value = serde_json::to_value(&r).expect("serializable");
    insert(&mut value, "status", status(passed));

    let mut human = String::new();
    writeln!(human, "GF({q})").unwrap();
    render_separation(&r.base_one, &mut human);
    for e in &r.expansions {
        writeln!(
            human,
            "{} at m = {}: {} over {} orbits",
            e.set,
            e.m,
            if e.separating {
                "separating"
            } else {
                "NOT separating"
            },
            e.kappa
        )
        .unwrap();
    }
    match r.sigma_sep {
        Some(s) => writeln!(
            human,
            "sigma_sep    {s} (verified up to m = {})",
            r.verified_up_to
        )
        .unwrap(),
        None => writeln!(human, "sigma_sep    not established").unwrap(),
    }
    writeln!(human, "status       {}", status(passed)).unwrap();
    Ok(Outcome::new(value, human, passed))
}

pub fn gamma(q: u64, m: usize, pool: Option<&SetArgs>, budget: u128) -> Result<Outcome, Failure> {
    let start = Instant::now();
    let field = field(q)?;
    check_m(m)?;
    if point_count(q, m).is_none() {
        return Err(Failure::Budget(format!(
            "orbit count for q={q} m={m} is too large"
        )));
    }
    let pool = match pool {
        Some(args) => {
            orbit_budget(q, m, budget)?;
            Some(sets::build(&field, m, args)?)
        }
        None => None,
    };
    let r = gamma_sep_check(m, &field, pool.as_ref())?;
    let passed = r.within_bound && r.pool.as_ref().map_or(true, |p| p.ok);
    let mut value = serde_json::to_value(&r).expect("serializable");
    insert(&mut value, "status", status(passed));
    insert(&mut value, "runtime_ms", start.elapsed().as_millis());

    let mut human = String::new();
    writeln!(human, "GF({q}), m = {m}, {} orbits", r.kappa).unwrap();
    writeln!(
        human,
        "gamma_sep    {} <= 2m = {}: {}",
        r.gamma,
        r.bound,
        yes_no(r.within_bound)
    )
    .unwrap();
    if let Some(p) = &r.pool {
        let smallest = p.smallest.map_or("none".to_string(), |s| s.to_string());
        writeln!(
            human,
            "pool {} ({} members): smallest separating subset {smallest}",
            p.set, p.size
        )
        .unwrap();
    }
    writeln!(human, "status       {}", status(passed)).unwrap();
    Ok(Outcome::new(value, human, passed))
}

pub fn search(
    q: u64,
    m: usize,
    args: &SetArgs,
    size_cap: usize,
    budget: u128,
) -> Result<Outcome, Failure> {
    let start = Instant::now();
    let field = field(q)?;
    check_m(m)?;
    let count = orbit_budget(q, m, budget)?;
    let pool = sets::build(&field, m, args)?;
    let gamma = ceil_log(u128::from(q), count.kappa);
    let mut value = json!({
        "q": q,
        "m": m,
        "pool": pool.name,
        "pool_size": pool.len(),
        "size_cap": size_cap,
        "gamma": gamma,
    });
    let mut human = String::new();
    writeln!(
        human,
        "pool         {} ({} members), GF({q}), m = {m}",
        pool.name,
        pool.len()
    )
    .unwrap();
    let passed = match min_separating_subset(&pool, size_cap) {
        Ok(found) => {
            let labels: Vec<String> = found.set.members().iter().map(|x| x.label()).collect();
            insert(&mut value, "found", true);
            insert(&mut value, "size", found.indices.len());
            insert(&mut value, "indices", &found.indices);
            insert(&mut value, "members", &labels);
            insert(&mut value, "tried", found.tried);
            writeln!(
                human,
                "smallest     {} members: {}",
                labels.len(),
                labels.join(", ")
            )
            .unwrap();
            found.indices.len() >= gamma as usize
        }
        Err(Error::NotFound(cap)) => {
            insert(&mut value, "found", false);
            writeln!(human, "smallest     none with at most {cap} members").unwrap();
            true
        }
        Err(e) => return Err(e.into()),
    };
    writeln!(human, "lower bound  {gamma}").unwrap();
    writeln!(human, "status       {}", status(passed)).unwrap();
    insert(&mut value, "status", status(passed));
    insert(&mut value, "runtime_ms", start.elapsed().as_millis());
    Ok(Outcome::new(value, human, passed))
}

#[derive(Debug, Clone, Serialize)]
struct Cell {
    q: u64,
    m: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa: Option<u128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta_sep: Option<u32>,
    set: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    set_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    separating: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    minimal: Option<bool>,
    status: &'static str,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    notes: Vec<String>,
}

pub const TABLE_COLUMNS: [&str; 10] = [
    "q",
    "m",
    "kappa",
    "gamma",
    "beta_sep",
    "set",
    "set_size",
    "separating",
    "minimal",
    "status",
];

impl Cell {
    fn csv_row(&self) -> Vec<String> {
        fn opt<T: ToString>(x: &Option<T>) -> String {
            x.as_ref().map(|v| v.to_string()).unwrap_or_default()
        }
        vec![
            self.q.to_string(),
            self.m.to_string(),
            opt(&self.kappa),
            opt(&self.gamma),
            opt(&self.beta_sep),
            self.set.clone(),
            opt(&self.set_size),
            opt(&self.separating),
            opt(&self.minimal),
            self.status.to_string(),
        ]
    }
}

fn run_cell(field: &Field, m: usize, budget: u128) -> Result<Cell, Error> {
    let q = field.q() as u64;
    let mut cell = Cell {
        q,
        m,
        kappa: None,
        gamma: None,
        beta_sep: None,
        set: if q == 2 {
            format!("T_{m}^(2)")
        } else {
            format!("T_{m}")
        },
        set_size: None,
        separating: None,
        minimal: None,
        status: "SKIPPED",
        notes: Vec::new(),
    };
    let count = match orbit_budget(q, m, budget) {
        Ok(count) => count,
        Err(e) => {
            cell.notes.push(e.to_string());
            return Ok(cell);
        }
    };
    let mut ok = true;
    cell.kappa = Some(count.kappa);
    let gamma = ceil_log(u128::from(q), count.kappa);
    cell.gamma = Some(gamma);
    ok &= gamma as usize <= 2 * m;

    let table = OrbitTable::new(field, m);
    if table.kappa() as u128 != count.kappa {
        cell.notes
            .push(format!("enumerated {} orbits", table.kappa()));
        ok = false;
    }
    let set = main_set(m, field)?;
    cell.set = set.name.clone();
    cell.set_size = Some(set.len());
    let report = is_minimal(&table, &set).or_else(|e| match e {
        Error::NotSeparating(_) => is_separating(&table, &set),
        other => Err(other),
    })?;
    cell.separating = Some(report.separating);
    cell.minimal = Some(report.minimal == Some(true));
    ok &= report.separating && report.minimal == Some(true);

    let expected = expected_beta(q);
    match beta_sep(m, field, expected) {
        Ok(r) => {
            cell.beta_sep = Some(r.beta_sep);
            ok &= r.beta_sep == expected;
        }
        Err(Error::NotFoundWithinBudget(_)) => {
            cell.notes
                .push(format!("no separating degree bound up to {expected}"));
            ok = false;
        }
        Err(e @ Error::BudgetExceeded { .. }) => {
            cell.notes.push(format!("beta_sep: {e}"));
            cell.status = "SKIPPED";
            return Ok(cell);
        }
        Err(e) => return Err(e),
    }
    cell.status = status(ok);
    Ok(cell)
}

pub fn tables(
    qs: &[u64],
    ms: &[usize],
    workers: Option<usize>,
    budget: u128,
) -> Result<Outcome, Failure> {
    let start = Instant::now();
    let fields: Vec<Field> = qs.iter().map(|&q| field(q)).collect::<Result<_, _>>()?;
    for &m in ms {
        check_m(m)?;
    }
    let grid: Vec<(&Field, usize)> = fields
        .iter()
        .flat_map(|f| ms.iter().map(move |&m| (f, m)))
        .collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        if w == 0 {
            return Err(Failure::Config("--workers must be at least 1".into()));
        }
        builder = builder.num_threads(w);
    }
    let pool = builder
        .build()
        .map_err(|e| Failure::Config(format!("thread pool: {e}")))?;
    let cells: Vec<Cell> = pool.install(|| {
        grid.par_iter()
            .map(|&(f, m)| run_cell(f, m, budget))
            .collect::<Result<_, _>>()
    })?;

    let passed = cells.iter().all(|c| c.status != "FAIL");
    let warnings = cells
        .iter()
        .filter(|c| c.status == "SKIPPED")
        .map(|c| format!("q={} m={} skipped: {}", c.q, c.m, c.notes.join("; ")))
        .collect();
    let rows: Vec<Vec<String>> = cells.iter().map(Cell::csv_row).collect();

    let mut human = String::new();
    let widths: Vec<usize> = (0..TABLE_COLUMNS.len())
        .map(|i| {
            rows.iter()
                .map(|r| r[i].len())
                .chain([TABLE_COLUMNS[i].len()])
                .max()
                .unwrap()
        })
        .collect();
    let line = |cols: Vec<&str>| -> String {
        let cells: Vec<String> = cols
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        cells.join("  ").trim_end().to_string()
    };
    writeln!(human, "{}", line(TABLE_COLUMNS.to_vec())).unwrap();
    for r in &rows {
        writeln!(human, "{}", line(r.iter().map(String::as_str).collect())).unwrap();
    }

    let report = json!({
        "cells": cells,
        "runtime_ms": start.elapsed().as_millis(),
        "status": status(passed),
    });
    Ok(Outcome {
        report,
        human,
        csv: Some((TABLE_COLUMNS.to_vec(), rows)),
        passed,
        warnings,
    })
}

pub fn manifest(q: u64, m: usize, args: &SetArgs) -> Result<Outcome, Failure> {
    let field = field(q)?;
    check_m(m)?;
    let set = sets::build(&field, m, args)?;
    let report = serde_json::to_value(set.manifest()).expect("serializable");
    let human = serde_json::to_string_pretty(&report).expect("serializable") + "\n";
    Ok(Outcome::new(report, human, true))
}
