//! Tabular reports rendered as CSV or markdown.
//!
//! Numbers are written with five decimals. Metadata goes into `#` comment
//! lines (CSV) or HTML comments (markdown), never into data rows, and nothing
//! time-dependent is emitted, so identical inputs render byte-identically.

use std::fmt;
use std::str::FromStr;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::buyback::{FleetSummary, SchemeResult, SchemeSpec};
use crate::categories::{CategoryTotals, Comparison};
use crate::engine::EmissionBreakdown;
use crate::model::{quality_summary, ProductSystem};
use crate::scenario::{ScenarioOutcome, SweepParam, SweepPoint};
use crate::validate::ValidationReport;

/// Decimal places for every real-valued cell.
pub const DECIMALS: usize = 5;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("row {row} has {got} cells, header has {expected}")]
    Ragged { row: usize, got: usize, expected: usize },
    #[error("unknown output format `{0}` (expected csv or md)")]
    UnknownFormat(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportKind {
    BreakdownTable,
    CategoryTable,
    ComparisonTable,
    SweepSeries,
    ScenarioTable,
    SchemeTable,
    FleetSummary,
    QualitySummary,
    ValidationFindings,
}

impl ReportKind {
    pub fn label(self) -> &'static str {
        match self {
            ReportKind::BreakdownTable => "breakdown-table",
            ReportKind::CategoryTable => "category-table",
            ReportKind::ComparisonTable => "comparison-table",
            ReportKind::SweepSeries => "sweep-series",
            ReportKind::ScenarioTable => "scenario-table",
            ReportKind::SchemeTable => "scheme-table",
            ReportKind::FleetSummary => "fleet-summary",
            ReportKind::QualitySummary => "quality-summary",
            ReportKind::ValidationFindings => "validation-findings",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Num(f64),
    Int(i64),
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    fn is_numeric(&self) -> bool {
        !matches!(self, Cell::Text(_))
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Text(s) => f.write_str(s),
            Cell::Int(i) => write!(f, "{i}"),
            Cell::Num(x) => f.write_str(&format_number(*x)),
        }
    }
}

/// Fixed five-decimal rendering; negative zero prints as zero.
pub fn format_number(x: f64) -> String {
    let s = format!("{x:.DECIMALS$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Markdown,
}

impl FromStr for Format {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "md" | "markdown" => Ok(Format::Markdown),
            other => Err(ReportError::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportDocument {
    pub kind: ReportKind,
    pub metadata: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub footer: Option<Vec<Cell>>,
}

impl ReportDocument {
    pub fn new(kind: ReportKind, header: &[&str]) -> Self {
        Self {
            kind,
            metadata: vec![("kind".into(), kind.label().into())],
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
            footer: None,
        }
    }

    pub fn meta(mut self, key: impl Into<String>, value: impl fmt::Display) -> Self {
        self.metadata.push((key.into(), value.to_string()));
        self
    }

    pub fn push_meta(&mut self, key: impl Into<String>, value: impl fmt::Display) {
        self.metadata.push((key.into(), value.to_string()));
    }

    fn check(&self) -> Result<(), ReportError> {
        let expected = self.header.len();
        for (i, row) in self.rows.iter().chain(self.footer.iter()).enumerate() {
            if row.len() != expected {
                return Err(ReportError::Ragged {
                    row: i,
                    got: row.len(),
                    expected,
                });
            }
        }
        Ok(())
    }

    pub fn render(&self, format: Format) -> Result<String, ReportError> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Markdown => self.to_markdown(),
        }
    }

    pub fn to_csv(&self) -> Result<String, ReportError> {
        self.check()?;
        let mut out = String::new();
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in self.rows.iter().chain(self.footer.iter()) {
            w.write_record(row.iter().map(|c| c.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
        out.push_str(&String::from_utf8(bytes).expect("csv output is utf-8"));
        Ok(out)
    }

    pub fn to_markdown(&self) -> Result<String, ReportError> {
        self.check()?;
        let mut out = String::new();
        for (k, v) in &self.metadata {
            out.push_str(&format!("<!-- {k}: {v} -->\n"));
        }
        let escape = |s: &str| s.replace('|', "\\|");
        out.push_str(&format!(
            "| {} |\n",
            self.header.iter().map(|h| escape(h)).collect::<Vec<_>>().join(" | ")
        ));
        let numeric_col = |i: usize| self.rows.iter().chain(self.footer.iter()).any(|r| r[i].is_numeric());
        let align: Vec<&str> = (0..self.header.len())
            .map(|i| if numeric_col(i) { "---:" } else { "---" })
            .collect();
        out.push_str(&format!("| {} |\n", align.join(" | ")));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| escape(&c.to_string())).collect();
            out.push_str(&format!("| {} |\n", cells.join(" | ")));
        }
        if let Some(footer) = &self.footer {
            let cells: Vec<String> = footer
                .iter()
                .map(|c| match c {
                    Cell::Text(s) if s.is_empty() => String::new(),
                    c => format!("**{}**", escape(&c.to_string())),
                })
                .collect();
            out.push_str(&format!("| {} |\n", cells.join(" | ")));
        }
        Ok(out)
    }
}

/// Header and records of a rendered CSV report, metadata lines skipped.
pub fn parse_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<String>>), ReportError> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec?.iter().map(str::to_string).collect());
    }
    Ok((header, rows))
}

/// Hex SHA-256 over the given inputs, each length-prefixed.
pub fn input_hash<I, B>(inputs: I) -> String
where
    I: IntoIterator<Item = B>,
    B: AsRef<[u8]>,
{
    let mut h = Sha256::new();
    for input in inputs {
        let bytes = input.as_ref();
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    hex::encode(h.finalize())
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

pub fn breakdown_report(bd: &EmissionBreakdown) -> ReportDocument {
    let mut doc = ReportDocument::new(
        ReportKind::BreakdownTable,
        &["stage", "flow", "category", "kg_co2eq", "proportion"],
    )
    .meta("system", &bd.system)
    .meta("unit", "kg CO2eq per functional unit");
    for f in &bd.flows {
        doc.rows.push(vec![
            Cell::text(&f.stage),
            Cell::text(&f.flow),
            Cell::text(&f.category),
            Cell::Num(f.kg_co2eq),
            Cell::Num(f.proportion),
        ]);
    }
    for entry in &bd.log.entries {
        doc.push_meta("log", entry);
    }
    doc.footer = Some(vec![
        Cell::text("Total"),
        Cell::text(""),
        Cell::text(""),
        Cell::Num(bd.total),
        Cell::Num(if bd.total > 0.0 { 1.0 } else { 0.0 }),
    ]);
    doc
}

pub fn stage_report(bd: &EmissionBreakdown) -> ReportDocument {
    let mut doc = ReportDocument::new(ReportKind::BreakdownTable, &["stage", "kg_co2eq"])
        .meta("system", &bd.system)
        .meta("by", "stage");
    for (stage, kg) in &bd.per_stage {
        doc.rows.push(vec![Cell::text(stage), Cell::Num(*kg)]);
    }
    doc.footer = Some(vec![Cell::text("Total"), Cell::Num(bd.total)]);
    doc
}

pub fn category_report(t: &CategoryTotals) -> ReportDocument {
    let mut doc = ReportDocument::new(ReportKind::CategoryTable, &["category", "kg_co2eq"]).meta("system", &t.system);
    for (c, kg) in &t.totals {
        doc.rows.push(vec![Cell::text(c), Cell::Num(*kg)]);
    }
    doc.footer = Some(vec![Cell::text("Total"), Cell::Num(t.total)]);
    doc
}

pub fn comparison_report(cmp: &Comparison) -> ReportDocument {
    let mut doc = ReportDocument::new(
        ReportKind::ComparisonTable,
        &["category", "baseline", "alternative", "delta"],
    )
    .meta("baseline", &cmp.baseline)
    .meta("alternative", &cmp.alternative);
    match cmp.relative_saving {
        Some(s) => doc.push_meta("relative_saving", format_number(s)),
        None => doc.push_meta("relative_saving", "undefined"),
    }
    for r in &cmp.rows {
        doc.rows.push(vec![
            Cell::text(&r.category),
            Cell::Num(r.baseline),
            Cell::Num(r.alternative),
            Cell::Num(r.delta),
        ]);
    }
    doc.footer = Some(vec![
        Cell::text("Total"),
        Cell::Num(cmp.baseline_total),
        Cell::Num(cmp.alternative_total),
        Cell::Num(cmp.delta_total),
    ]);
    doc
}

pub fn sweep_report(param: SweepParam, points: &[SweepPoint]) -> ReportDocument {
    let mut doc = ReportDocument::new(ReportKind::SweepSeries, &[param.code(), "total", "per_life", "per_turn"])
        .meta("parameter", param);
    for p in points {
        doc.rows.push(vec![
            Cell::text(p.value.to_string()),
            Cell::Num(p.total),
            Cell::Num(p.per_life),
            Cell::Num(p.per_turn),
        ]);
    }
    doc
}

pub fn scenario_report(outcomes: &[ScenarioOutcome]) -> ReportDocument {
    let mut doc = ReportDocument::new(
        ReportKind::ScenarioTable,
        &[
            "scenario",
            "location",
            "rejection_rate",
            "turns",
            "rejection_mode",
            "e_reman",
            "per_life",
            "per_turn",
            "life_saving",
        ],
    );
    for o in outcomes {
        doc.rows.push(vec![
            Cell::text(&o.params.name),
            Cell::text(o.params.location.code()),
            Cell::Num(o.params.rejection_rate),
            Cell::Int(i64::from(o.params.turns)),
            Cell::text(o.params.rejection_mode.to_string()),
            Cell::Num(o.e_reman),
            Cell::Num(o.per_life),
            Cell::Num(o.per_turn),
            Cell::Num(o.life_saving),
        ]);
    }
    doc
}

/// One scheme row: spec, analytic result and saving (if defined).
pub type SchemeRow<'a> = (&'a SchemeSpec, &'a SchemeResult, Option<f64>);

pub fn scheme_report(rows: &[SchemeRow<'_>]) -> ReportDocument {
    let mut doc = ReportDocument::new(
        ReportKind::SchemeTable,
        &[
            "scheme",
            "uses",
            "turns",
            "rejection_rate",
            "injection",
            "e_virgin",
            "e_reman",
            "total",
            "per_turn",
            "saving",
        ],
    );
    for (i, (spec, res, saving)) in rows.iter().enumerate() {
        let name = spec.name.clone().unwrap_or_else(|| format!("scheme-{}", i + 1));
        doc.rows.push(vec![
            Cell::Text(name),
            Cell::Int(spec.uses as i64),
            Cell::Int(i64::from(spec.turns)),
            Cell::Num(spec.rejection_rate),
            Cell::Int(res.injection as i64),
            Cell::Num(spec.e_virgin),
            Cell::Num(spec.e_reman),
            Cell::Num(res.total),
            Cell::Num(res.per_turn),
            saving.map_or(Cell::text(""), Cell::Num),
        ]);
    }
    doc
}

pub fn fleet_report(name: &str, f: &FleetSummary) -> ReportDocument {
    let mut doc = ReportDocument::new(
        ReportKind::FleetSummary,
        &["metric", "mean", "std_dev", "ci95_low", "ci95_high"],
    )
    .meta("scheme", name)
    .meta("injection", f.injection)
    .meta("seed", f.seed)
    .meta("replications", f.replications)
    .meta("expected_uses", format_number(f.expected_uses));
    for (metric, e) in [("uses", &f.uses), ("kg_co2eq", &f.emissions)] {
        doc.rows.push(vec![
            Cell::text(metric),
            Cell::Num(e.mean),
            Cell::Num(e.std_dev),
            Cell::Num(e.ci_low),
            Cell::Num(e.ci_high),
        ]);
    }
    doc
}

pub fn quality_report(sys: &ProductSystem) -> ReportDocument {
    let mut doc =
        ReportDocument::new(ReportKind::QualitySummary, &["overall_rating", "flows"]).meta("system", sys.name());
    let summary = quality_summary(sys);
    let mut total = 0;
    for (rating, n) in &summary {
        total += n;
        doc.rows.push(vec![Cell::text(rating.label()), Cell::Int(*n as i64)]);
    }
    doc.footer = Some(vec![Cell::text("Total"), Cell::Int(total as i64)]);
    doc
}

pub fn validation_report(subject: &str, report: &ValidationReport) -> ReportDocument {
    let mut doc = ReportDocument::new(
        ReportKind::ValidationFindings,
        &["severity", "code", "subject", "message"],
    )
    .meta("input", subject)
    .meta("errors", report.error_count())
    .meta("warnings", report.warning_count());
    for f in &report.findings {
        doc.rows.push(vec![
            Cell::text(f.severity.to_string()),
            Cell::text(f.code),
            Cell::text(&f.subject),
            Cell::text(&f.message),
        ]);
    }
    doc
}
