//! Deterministic report generation for the CLI: run configuration with
//! precedence merging, the versioned report schema, and drivers for the
//! five subcommands.  All rationals are emitted as `num/den` strings and
//! map keys are sorted, so identical configs yield byte-identical reports.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use serde_json::{json, Value};
use thiserror::Error;

use crate::brst::{build_complex, differential_commutator, differential_lemma, TruncationSpec};
use crate::catalog::{
    central_charges, level_table, predict_reduction, AdmissibleLevel, ModuleDescriptor,
    ModuleKind, Reduction,
};
use crate::exactlin::Rational;
use crate::homology::{self, BettiTable, Stability};
use crate::specseq::{
    boson_antighost_basis, c0_li_complex, conformal_boundedness, convergence_audit,
    detect_collapse, filtered_from_states, page, FilteredComplex,
};
use crate::structural::{cartan_complex, gauged_complex, gauged_lattice_window_complex};

pub const SCHEMA_VERSION: &str = "brstlab-report/1";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("computation failed: {0}")]
    Internal(String),
}

fn internal(e: impl std::fmt::Display) -> ReportError {
    ReportError::Internal(e.to_string())
}

/// The named checks a verify run can request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Check {
    D2,
    Grade,
    Lemma,
    Betti,
    Structural,
    Pages,
    Audit,
}

impl Check {
    pub fn parse(s: &str) -> Result<Check, ReportError> {
        Ok(match s.trim() {
            "d2" => Check::D2,
            "grade" => Check::Grade,
            "lemma" => Check::Lemma,
            "betti" => Check::Betti,
            "structural" => Check::Structural,
            "pages" => Check::Pages,
            "audit" => Check::Audit,
            other => return Err(ReportError::Config(format!("unknown check `{other}`"))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Check::D2 => "d2",
            Check::Grade => "grade",
            Check::Lemma => "lemma",
            Check::Betti => "betti",
            Check::Structural => "structural",
            Check::Pages => "pages",
            Check::Audit => "audit",
        }
    }

    pub fn default_set() -> BTreeSet<Check> {
        [Check::D2, Check::Grade, Check::Lemma, Check::Betti, Check::Structural]
            .into_iter()
            .collect()
    }
}

pub fn parse_checks(s: &str) -> Result<BTreeSet<Check>, ReportError> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(Check::parse).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Text,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<OutputFormat, ReportError> {
        match s.trim() {
            "json" => Ok(OutputFormat::Json),
            "text" => Ok(OutputFormat::Text),
            other => Err(ReportError::Config(format!("unknown output format `{other}`"))),
        }
    }
}

/// Effective configuration of a run, after merging flags over config file
/// over defaults.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub flow: i64,
    pub max_grade: i64,
    pub window: i64,
    pub module_dims: BTreeMap<i64, usize>,
    pub checks: BTreeSet<Check>,
    pub format: OutputFormat,
    /// emit real per-phase wall times; off by default so reports stay
    /// byte-identical across runs
    pub timings: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            flow: 0,
            max_grade: 6,
            window: 4,
            module_dims: BTreeMap::from([(0, 1)]),
            checks: Check::default_set(),
            format: OutputFormat::Json,
            timings: false,
        }
    }
}

impl RunConfig {
    pub fn spec(&self) -> TruncationSpec {
        TruncationSpec::new(self.flow, self.max_grade, self.window)
            .with_module_dims(self.module_dims.clone())
    }
}

/// Parse an inline module-dims map of the form `0:1,1:2,2:3`.
pub fn parse_module_dims(s: &str) -> Result<BTreeMap<i64, usize>, ReportError> {
    let mut out = BTreeMap::new();
    for piece in s.split(',') {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        let (g, d) = piece
            .split_once(':')
            .ok_or_else(|| ReportError::Config(format!("bad module-dims entry `{piece}`")))?;
        let grade: i64 =
            g.trim().parse().map_err(|_| ReportError::Config(format!("bad grade `{g}`")))?;
        let dim: usize =
            d.trim().parse().map_err(|_| ReportError::Config(format!("bad dim `{d}`")))?;
        out.insert(grade, dim);
    }
    if out.is_empty() {
        return Err(ReportError::Config("empty module-dims map".into()));
    }
    Ok(out)
}

/// Parse a module-dims file: one `grade dim` pair per line, `#` comments.
pub fn parse_module_dims_file(text: &str) -> Result<BTreeMap<i64, usize>, ReportError> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(g), Some(d), None) = (it.next(), it.next(), it.next()) else {
            return Err(ReportError::Config(format!(
                "line {}: expected `grade dim`, got `{raw}`",
                lineno + 1
            )));
        };
        let grade: i64 = g
            .parse()
            .map_err(|_| ReportError::Config(format!("line {}: bad grade `{g}`", lineno + 1)))?;
        let dim: usize = d
            .parse()
            .map_err(|_| ReportError::Config(format!("line {}: bad dim `{d}`", lineno + 1)))?;
        out.insert(grade, dim);
    }
    if out.is_empty() {
        return Err(ReportError::Config("module-dims file has no entries".into()));
    }
    Ok(out)
}

/// A finished report plus the process exit code it implies.
#[derive(Debug, Clone)]
pub struct Report {
    pub value: Value,
    pub format: OutputFormat,
    pub exit_code: i32,
}

impl Report {
    pub fn render(&self) -> String {
        match self.format {
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(&self.value).expect("serializable");
                s.push('\n');
                s
            }
            OutputFormat::Text => {
                let mut out = String::new();
                render_text(&self.value, 0, &mut out);
                out
            }
        }
    }
}

fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                match val {
                    Value::Object(_) | Value::Array(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_text(val, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}{k}: {}\n", scalar_text(val))),
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                match item {
                    Value::Object(_) | Value::Array(_) => {
                        out.push_str(&format!("{pad}-\n"));
                        render_text(item, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}- {}\n", scalar_text(item))),
                }
            }
        }
        _ => out.push_str(&format!("{pad}{}\n", scalar_text(v))),
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Render an exact rational as `num/den` (denominator always shown).
pub fn rational_str(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn stability_str(s: Stability) -> &'static str {
    match s {
        Stability::Unchecked => "unchecked",
        Stability::Stable => "stable",
        Stability::Artifact => "artifact",
    }
}

fn betti_json(t: &BettiTable) -> Value {
    let rows: Vec<Value> = t
        .entries
        .iter()
        .map(|(&(p, w), &d)| {
            json!({
                "ghost": p,
                "grade": w,
                "dim": d,
                "stability": stability_str(
                    t.stability.get(&(p, w)).copied().unwrap_or(Stability::Unchecked)
                ),
            })
        })
        .collect();
    Value::Array(rows)
}

fn table_diff(a: &BettiTable, b: &BettiTable) -> Vec<(i64, i64)> {
    let mut keys: BTreeSet<(i64, i64)> = a.entries.keys().copied().collect();
    keys.extend(b.entries.keys().copied());
    keys.into_iter()
        .filter(|&(p, w)| a.dim(p, w) != b.dim(p, w))
        .collect()
}

fn config_json(cfg: &RunConfig) -> Value {
    json!({
        "flow": cfg.flow,
        "max_grade": cfg.max_grade,
        "window": cfg.window,
        "module_dims": cfg.module_dims.iter()
            .map(|(g, d)| json!({"grade": g, "dim": d})).collect::<Vec<_>>(),
        "checks": cfg.checks.iter().map(|c| c.name()).collect::<Vec<_>>(),
        "format": match cfg.format { OutputFormat::Json => "json", OutputFormat::Text => "text" },
    })
}

struct PhaseClock {
    enabled: bool,
    phases: Vec<(String, u128)>,
    last: Instant,
}

impl PhaseClock {
    fn new(enabled: bool) -> Self {
        PhaseClock { enabled, phases: Vec::new(), last: Instant::now() }
    }

    fn mark(&mut self, name: &str) {
        let elapsed = if self.enabled { self.last.elapsed().as_millis() } else { 0 };
        self.phases.push((name.to_string(), elapsed));
        self.last = Instant::now();
    }

    fn json(&self) -> Value {
        Value::Array(
            self.phases
                .iter()
                .map(|(n, ms)| json!({"phase": n, "wall_ms": ms}))
                .collect(),
        )
    }
}

/// Structural sanity check of a finished report against the schema this
/// binary emits; every driver runs it before returning.
pub fn validate_schema(v: &Value) -> bool {
    let Some(obj) = v.as_object() else { return false };
    obj.get("schema_version").and_then(Value::as_str) == Some(SCHEMA_VERSION)
        && obj.get("subcommand").map(Value::is_string).unwrap_or(false)
        && obj.get("config").map(Value::is_object).unwrap_or(false)
        && obj.get("checks").map(Value::is_object).unwrap_or(false)
        && obj.get("timings").map(Value::is_array).unwrap_or(false)
}

fn finish(
    subcommand: &str,
    cfg: &RunConfig,
    checks: Value,
    extra: Vec<(&str, Value)>,
    clock: &PhaseClock,
) -> Result<Report, ReportError> {
    let mut obj = serde_json::Map::new();
    obj.insert("schema_version".into(), json!(SCHEMA_VERSION));
    obj.insert("subcommand".into(), json!(subcommand));
    obj.insert("config".into(), config_json(cfg));
    obj.insert("checks".into(), checks);
    for (k, v) in extra {
        obj.insert(k.into(), v);
    }
    obj.insert("timings".into(), clock.json());
    let value = Value::Object(obj);
    if !validate_schema(&value) {
        return Err(ReportError::Internal("report failed schema validation".into()));
    }
    let all_passed = value["checks"]
        .as_object()
        .unwrap()
        .values()
        .all(|c| c["passed"].as_bool() == Some(true));
    Ok(Report { value, format: cfg.format, exit_code: if all_passed { 0 } else { 1 } })
}

fn check_json(passed: bool, failures: &[(i64, i64)]) -> Value {
    json!({
        "passed": passed,
        "failures": failures.iter().map(|&(p, w)| json!([p, w])).collect::<Vec<_>>(),
    })
}

fn pages_dump(fc: &FilteredComplex, r_max: i64) -> Result<Value, ReportError> {
    let mut pages = Vec::new();
    for r in 0..=r_max {
        let pg = page(fc, r).map_err(internal)?;
        let dims: Vec<Value> =
            pg.dims.iter().map(|(&(p, q), &d)| json!([p, q, d])).collect();
        let diffs: Vec<Value> = pg
            .differentials
            .iter()
            .filter(|(_, m)| !m.is_zero())
            .map(|(&(p, q), m)| {
                json!({
                    "p": p,
                    "q": q,
                    "entries": m.iter()
                        .map(|(i, j, v)| json!([i, j, rational_str(v)]))
                        .collect::<Vec<_>>(),
                })
            })
            .collect();
        pages.push(json!({"r": r, "dims": dims, "d": diffs}));
    }
    Ok(Value::Array(pages))
}

/// `verify`: run the requested mathematical checks on one truncation.
pub fn run_verify(cfg: &RunConfig) -> Result<Report, ReportError> {
    let spec = cfg.spec();
    spec.validate().map_err(|e| ReportError::Config(e.to_string()))?;
    let mut clock = PhaseClock::new(cfg.timings);
    let mut checks = serde_json::Map::new();
    let mut tables = serde_json::Map::new();
    let mut extra: Vec<(&str, Value)> = Vec::new();

    let core: BTreeSet<Check> =
        [Check::D2, Check::Grade, Check::Lemma, Check::Betti, Check::Structural]
            .into_iter()
            .filter(|c| cfg.checks.contains(c))
            .collect();
    if !core.is_empty() {
        let vr = homology::verify(&spec).map_err(internal)?;
        clock.mark("verify");
        if core.contains(&Check::D2) {
            let failures =
                if vr.d_squared_zero { Vec::new() } else { failing_blocks_d2(&spec)? };
            checks.insert("d2".into(), check_json(vr.d_squared_zero, &failures));
        }
        if core.contains(&Check::Grade) {
            checks.insert("grade".into(), check_json(vr.grade_preserved, &[]));
        }
        if core.contains(&Check::Lemma) {
            let failures =
                if vr.lemma_equivalence { Vec::new() } else { failing_blocks_lemma(&spec)? };
            checks.insert("lemma".into(), check_json(vr.lemma_equivalence, &failures));
        }
        if core.contains(&Check::Betti) {
            let failures = table_diff(&vr.stabilized, &vr.predicted);
            checks.insert("betti".into(), check_json(vr.betti_matches_prediction, &failures));
        }
        if core.contains(&Check::Structural) {
            let failures = table_diff(&vr.stabilized, &vr.structural);
            checks
                .insert("structural".into(), check_json(vr.structural_path_agrees, &failures));
        }
        tables.insert("raw".into(), betti_json(&vr.raw));
        tables.insert("stabilized".into(), betti_json(&vr.stabilized));
        tables.insert("predicted".into(), betti_json(&vr.predicted));
        tables.insert("structural".into(), betti_json(&vr.structural));
        clock.mark("tables");
    }

    if cfg.checks.contains(&Check::Pages) {
        let mut failures = Vec::new();
        let mut dumps = Vec::new();
        for grade in 0..=cfg.max_grade {
            let fc = c0_li_complex(grade).map_err(internal)?;
            let collapse = detect_collapse(&fc).map_err(internal)?;
            let e1 = page(&fc, 1).map_err(internal)?;
            let expected = usize::from(grade == 0);
            if e1.total() != expected || collapse.collapse_at > 1 {
                failures.push((1, grade));
            }
            dumps.push(json!({
                "grade": grade,
                "collapse_at": collapse.collapse_at,
                "pages": pages_dump(&fc, 1)?,
            }));
        }
        checks.insert("pages".into(), check_json(failures.is_empty(), &failures));
        extra.push(("pages", Value::Array(dumps)));
        clock.mark("pages");
    }

    if cfg.checks.contains(&Check::Audit) {
        let mut failures = Vec::new();
        for grade in 0..=cfg.max_grade {
            let fc = c0_li_complex(grade).map_err(internal)?;
            let audit = convergence_audit(&fc).map_err(internal)?;
            if !audit.passed() {
                failures.push((0, grade));
            }
        }
        let bounded = conformal_boundedness(cfg.max_grade);
        checks.insert("audit".into(), check_json(failures.is_empty() && bounded, &failures));
        extra.push(("audit", json!({"conformal_boundedness": bounded})));
        clock.mark("audit");
    }

    extra.insert(0, ("tables", Value::Object(tables)));
    finish("verify", cfg, Value::Object(checks), extra, &clock)
}

fn failing_blocks_d2(spec: &TruncationSpec) -> Result<Vec<(i64, i64)>, ReportError> {
    let cx = build_complex(spec).map_err(internal)?;
    let mut out = Vec::new();
    for (&(p, w), b) in &cx.blocks {
        if let Some(up) = cx.block(p + 1, w) {
            let sq = up.boundary.compose(&b.boundary).map_err(internal)?;
            if !sq.is_zero() {
                out.push((p, w));
            }
        }
    }
    Ok(out)
}

fn failing_blocks_lemma(spec: &TruncationSpec) -> Result<Vec<(i64, i64)>, ReportError> {
    let cx = build_complex(spec).map_err(internal)?;
    let mut out = Vec::new();
    for (&(p, w), b) in &cx.blocks {
        for s in &b.basis {
            let a = differential_commutator(s).map_err(internal)?;
            let c = differential_lemma(s).map_err(internal)?;
            if a != c {
                out.push((p, w));
                break;
            }
        }
    }
    Ok(out)
}

/// `pages`: dump the filtration spectral sequence of the boson/antighost
/// complex, one entry per grade.
pub fn run_pages(cfg: &RunConfig, trivial_filtration: bool) -> Result<Report, ReportError> {
    if cfg.max_grade < 0 {
        return Err(ReportError::Config(format!("max_grade {} must be >= 0", cfg.max_grade)));
    }
    let mut clock = PhaseClock::new(cfg.timings);
    let mut per_grade = Vec::new();
    let mut all_delta = true;
    for grade in 0..=cfg.max_grade {
        let fc = if trivial_filtration {
            let states = boson_antighost_basis(grade);
            filtered_from_states(&states, |_| 0).map_err(internal)?
        } else {
            c0_li_complex(grade).map_err(internal)?
        };
        let collapse = detect_collapse(&fc).map_err(internal)?;
        if !trivial_filtration {
            let e1 = page(&fc, 1).map_err(internal)?;
            let expected = if grade == 0 { 1 } else { 0 };
            all_delta &= e1.total() == expected && collapse.collapse_at <= 1;
        }
        per_grade.push(json!({
            "grade": grade,
            "collapse_at": collapse.collapse_at,
            "pages": pages_dump(&fc, collapse.collapse_at.max(1))?,
        }));
    }
    clock.mark("pages");
    let passed = trivial_filtration || all_delta;
    let checks = json!({"pages": check_json(passed, &[])});
    finish("pages", cfg, checks, vec![("pages", Value::Array(per_grade))], &clock)
}

/// `appendix-b`: run the three model complexes standalone and compare with
/// their closed-form cohomology.
pub fn run_appendix(cfg: &RunConfig, zero_mode_cap: i64) -> Result<Report, ReportError> {
    if cfg.max_grade < 0 || cfg.window < 1 || zero_mode_cap < 1 {
        return Err(ReportError::Config(
            "appendix-b needs max_grade >= 0, window >= 1, cap >= 1".into(),
        ));
    }
    let mut clock = PhaseClock::new(cfg.timings);
    let mut checks = serde_json::Map::new();
    let mut tables = serde_json::Map::new();

    let expect_point = |t: &BettiTable| t.total() == 1 && t.dim(0, 0) == 1;
    let runs: Vec<(&str, BettiTable)> = vec![
        ("gauged", gauged_complex(cfg.max_grade, zero_mode_cap).map_err(internal)?.betti()),
        (
            "gauged_lattice_window",
            gauged_lattice_window_complex(cfg.max_grade, cfg.window)
                .map_err(internal)?
                .betti(),
        ),
        ("cartan", cartan_complex(cfg.max_grade).map_err(internal)?.betti()),
    ];
    for (name, betti) in runs {
        let ok = expect_point(&betti);
        let failures: Vec<(i64, i64)> = if ok {
            Vec::new()
        } else {
            betti.entries.keys().copied().filter(|&k| k != (0, 0)).collect()
        };
        checks.insert(name.into(), check_json(ok, &failures));
        tables.insert(name.into(), betti_json(&betti));
    }
    clock.mark("appendix-b");
    finish(
        "appendix-b",
        cfg,
        Value::Object(checks),
        vec![("tables", Value::Object(tables))],
        &clock,
    )
}

/// `catalog`: exact weight tables and reduction predictions for one level.
pub fn run_catalog(cfg: &RunConfig, u: i64, v: i64) -> Result<Report, ReportError> {
    let level = AdmissibleLevel::new(u, v).map_err(|e| ReportError::Config(e.to_string()))?;
    let mut clock = PhaseClock::new(cfg.timings);
    let charges = central_charges(&level).map_err(internal)?;
    let rows: Vec<Value> = level_table(&level)
        .iter()
        .map(|row| {
            json!({
                "r": row.r,
                "s": row.s,
                "lambda": rational_str(&row.lambda),
                "delta": rational_str(&row.delta),
                "h": rational_str(&row.h),
                "canonical": [row.canonical.0, row.canonical.1],
            })
        })
        .collect();
    let mut reductions = Vec::new();
    for r in 1..u {
        for s in 1..v {
            for (kind, name) in [
                (ModuleKind::RelaxedE, "relaxed_E"),
                (ModuleKind::RelaxedEminus, "relaxed_Eminus"),
                (ModuleKind::ProjectiveP, "projective_P"),
            ] {
                if kind == ModuleKind::ProjectiveP && s > v - 2 {
                    continue;
                }
                for flow in -2..=2 {
                    let m = ModuleDescriptor::new(kind, r, s, flow);
                    let red = predict_reduction(&level, &m).map_err(internal)?;
                    reductions.push(json!({
                        "kind": name,
                        "r": r,
                        "s": s,
                        "flow": flow,
                        "result": reduction_json(&red),
                    }));
                }
            }
        }
    }
    clock.mark("catalog");
    let checks = json!({"catalog": check_json(true, &[])});
    let extra = vec![
        (
            "level",
            json!({
                "u": u,
                "v": v,
                "k": rational_str(&level.k()),
                "c_vir": rational_str(&charges.c_vir),
                "c_lattice": rational_str(&charges.c_lattice),
                "c_sl2": rational_str(&charges.c_sl2),
            }),
        ),
        ("weights", Value::Array(rows)),
        ("reductions", Value::Array(reductions)),
    ];
    finish("catalog", cfg, checks, extra, &clock)
}

fn reduction_json(r: &Reduction) -> Value {
    match r {
        Reduction::Vir { r, s, multiplicity } => {
            json!({"kind": "vir", "r": r, "s": s, "multiplicity": multiplicity})
        }
        Reduction::Zero => json!({"kind": "zero"}),
        Reduction::OutOfScope => json!({"kind": "out_of_scope"}),
    }
}

/// `reduce`: compare the predicted reduction of a user module against the
/// computed stabilized table.
pub fn run_reduce(cfg: &RunConfig) -> Result<Report, ReportError> {
    let spec = cfg.spec();
    spec.validate().map_err(|e| ReportError::Config(e.to_string()))?;
    let mut clock = PhaseClock::new(cfg.timings);
    let predicted = homology::predict(&spec);
    let st = homology::stabilize(&spec).map_err(internal)?;
    clock.mark("reduce");
    let ok = st.stabilized.same_entries(&predicted);
    let failures = table_diff(&st.stabilized, &predicted);
    let checks = json!({"betti": check_json(ok, &failures)});
    let tables = json!({
        "raw": betti_json(&st.raw),
        "stabilized": betti_json(&st.stabilized),
        "predicted": betti_json(&predicted),
    });
    finish("reduce", cfg, checks, vec![("tables", tables)], &clock)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn module_dims_parsers() {
        assert_eq!(
            parse_module_dims("0:1, 1:2,2:3").unwrap(),
            BTreeMap::from([(0, 1), (1, 2), (2, 3)])
        );
        assert!(parse_module_dims("0=1").is_err());
        let text = "# toy dims\n0 1\n1 2  # inline note\n\n2 3\n";
        assert_eq!(
            parse_module_dims_file(text).unwrap(),
            BTreeMap::from([(0, 1), (1, 2), (2, 3)])
        );
        assert!(parse_module_dims_file("# nothing\n").is_err());
        assert!(parse_module_dims_file("0 1 2\n").is_err());
    }

    #[test]
    fn check_parsing() {
        assert_eq!(
            parse_checks("d2,betti").unwrap(),
            BTreeSet::from([Check::D2, Check::Betti])
        );
        assert!(parse_checks("d2,nope").is_err());
    }

    #[test]
    fn verify_report_is_deterministic_and_passes() {
        let cfg = RunConfig { max_grade: 4, window: 3, ..RunConfig::default() };
        let a = run_verify(&cfg).unwrap();
        let b = run_verify(&cfg).unwrap();
        assert_eq!(a.exit_code, 0);
        assert_eq!(a.render(), b.render());
        assert!(validate_schema(&a.value));
    }

    #[test]
    fn verify_rejects_bad_config() {
        let cfg = RunConfig { max_grade: -1, ..RunConfig::default() };
        assert!(matches!(run_verify(&cfg), Err(ReportError::Config(_))));
    }

    #[test]
    fn text_rendering_covers_the_same_data() {
        let cfg = RunConfig {
            max_grade: 3,
            window: 2,
            format: OutputFormat::Text,
            checks: BTreeSet::from([Check::D2, Check::Betti]),
            ..RunConfig::default()
        };
        let rep = run_verify(&cfg).unwrap();
        let text = rep.render();
        assert!(text.contains("schema_version: brstlab-report/1"));
        assert!(text.contains("d2"));
        assert!(!text.trim().is_empty());
    }

    #[test]
    fn catalog_report_has_ising_row() {
        let cfg = RunConfig::default();
        let rep = run_catalog(&cfg, 3, 4).unwrap();
        assert_eq!(rep.exit_code, 0);
        let weights = rep.value["weights"].as_array().unwrap();
        assert!(weights.iter().any(|w| w["h"] == "1/16"));
        assert_eq!(rep.value["level"]["c_vir"], "1/2");
        assert!(matches!(run_catalog(&cfg, 4, 2), Err(ReportError::Config(_))));
    }

    #[test]
    fn appendix_report_passes() {
        let cfg = RunConfig { max_grade: 5, window: 3, ..RunConfig::default() };
        let rep = run_appendix(&cfg, 2).unwrap();
        assert_eq!(rep.exit_code, 0);
    }

    #[test]
    fn pages_report_collapses() {
        let cfg = RunConfig { max_grade: 4, ..RunConfig::default() };
        let rep = run_pages(&cfg, false).unwrap();
        assert_eq!(rep.exit_code, 0);
        let trivial = run_pages(&cfg, true).unwrap();
        assert_eq!(trivial.exit_code, 0);
    }

    #[test]
    fn reduce_matches_prediction_on_toy_dims() {
        let cfg = RunConfig {
            max_grade: 4,
            window: 3,
            module_dims: BTreeMap::from([(0, 1), (1, 2), (2, 3)]),
            ..RunConfig::default()
        };
        let rep = run_reduce(&cfg).unwrap();
        assert_eq!(rep.exit_code, 0);
    }
}
