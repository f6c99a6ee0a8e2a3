//! Rate tables and machine-readable exports of attribution reports.
//!
//! Reporting never computes rates; every number printed is a stored report
//! field passed through [`format_number`].

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attribution::{AttributionError, AttributionReport, PooledRow};
use crate::taxonomy::{Action, Category, InteractionRef};

pub const DOC_FORMAT: &str = "websuite-report";
pub const DOC_VERSION: u32 = 1;

pub const SECTION_BY_ACTION: &str = "individual-by-action";
pub const SECTION_BY_INTERACTION: &str = "individual-by-interaction";
pub const SECTION_CHECKPOINTS: &str = "e2e-checkpoints";
pub const SECTION_E2E_INTERACTIONS: &str = "e2e-interactions";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("unknown report format {0:?} (expected md, csv or doc)")]
    UnknownFormat(String),
    #[error("runs cover different suites (only in first: {only_a:?}; only in second: {only_b:?})")]
    SuiteMismatch { only_a: Vec<String>, only_b: Vec<String> },
    #[error("malformed report document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported report document {format:?} version {version}")]
    Version { format: String, version: u32 },
    #[error(transparent)]
    Invalid(#[from] AttributionError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Markdown,
    Csv,
    Doc,
}

impl FromStr for Format {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "md" | "markdown" => Ok(Format::Markdown),
            "csv" => Ok(Format::Csv),
            "doc" | "json" => Ok(Format::Doc),
            other => Err(ReportError::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    pub name: String,
    pub content: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportDocument {
    pub format: Format,
    pub sections: Vec<Section>,
}

impl ReportDocument {
    pub fn section(&self, name: &str) -> Option<&str> {
        self.sections
            .iter()
            .find(|s| s.name == name)
            .map(|s| s.content.as_str())
    }
}

impl fmt::Display for ReportDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.sections.iter().enumerate() {
            match self.format {
                Format::Markdown => {
                    if i > 0 {
                        writeln!(f)?;
                    }
                    writeln!(f, "## {}\n", s.name)?;
                    f.write_str(&s.content)?;
                }
                Format::Csv | Format::Doc => f.write_str(&s.content)?,
            }
        }
        Ok(())
    }
}

/// Two decimals, trailing zeros dropped: 85.16, 100, 12.5.
pub fn format_number(x: f64) -> String {
    let r = (x * 100.0).round() / 100.0;
    if r == 0.0 {
        "0".to_string()
    } else {
        format!("{r}")
    }
}

pub fn format_percent(x: f64) -> String {
    format!("{}%", format_number(x))
}

#[derive(Serialize, Deserialize)]
struct Doc {
    format: String,
    version: u32,
    reports: Vec<AttributionReport>,
}

/// One table cell per report; `None` renders blank.
struct Row {
    label: String,
    sub: String,
    count: String,
    cells: Vec<Option<String>>,
}

struct Table {
    head: Vec<String>,
    rows: Vec<Row>,
}

impl Table {
    fn new(head: &[&str], reports: &[AttributionReport]) -> Self {
        let mut head: Vec<String> = head.iter().map(|h| h.to_string()).collect();
        head.extend(reports.iter().map(|r| r.agent.clone()));
        Table { head, rows: Vec::new() }
    }

    fn markdown(&self, with_sub: bool) -> String {
        let mut out = String::new();
        let head: Vec<&str> = self
            .head
            .iter()
            .enumerate()
            .filter(|(i, _)| with_sub || *i != 1)
            .map(|(_, h)| h.as_str())
            .collect();
        let _ = writeln!(out, "| {} |", head.join(" | "));
        let _ = writeln!(out, "|{}", "---|".repeat(head.len()));
        for r in &self.rows {
            let mut cols = vec![r.label.clone()];
            if with_sub {
                cols.push(r.sub.clone());
            }
            cols.push(r.count.clone());
            cols.extend(r.cells.iter().map(|c| c.clone().unwrap_or_default()));
            out += &md_line(&cols);
        }
        out
    }
}

/// Table row; empty cells render as `| |`.
fn md_line(cols: &[String]) -> String {
    let mut line = String::from("|");
    for c in cols {
        if c.is_empty() {
            line.push_str(" |");
        } else {
            let _ = write!(line, " {c} |");
        }
    }
    line.push('\n');
    line
}

fn combined(name: &str) -> String {
    format!("{name} (combined)")
}

fn with_ci(cell: String, ci: Option<u32>, show: bool) -> String {
    match ci {
        Some(h) if show => format!("{cell} (±{h})"),
        _ => cell,
    }
}

fn first_some<T, F: Fn(&AttributionReport) -> Option<T>>(reports: &[AttributionReport], f: F) -> Option<T> {
    reports.iter().find_map(f)
}

fn individual_actions(reports: &[AttributionReport]) -> BTreeSet<Action> {
    reports
        .iter()
        .flat_map(|r| r.individual.actions.iter().map(|a| a.key))
        .collect()
}

fn individual_refs(reports: &[AttributionReport]) -> BTreeSet<InteractionRef> {
    reports
        .iter()
        .flat_map(|r| r.individual.interactions.iter().map(|a| a.target))
        .collect()
}

fn by_action_table(reports: &[AttributionReport]) -> Table {
    let mut t = Table::new(&["Action", "", "Trials"], reports);
    let actions = individual_actions(reports);
    for c in Category::ALL {
        let under: Vec<Action> = actions.iter().copied().filter(|a| a.category() == c).collect();
        if under.is_empty() {
            continue;
        }
        let category = |r: &AttributionReport| r.individual.categories.iter().find(|x| x.key == c).cloned();
        if under.len() >= 2 {
            t.rows.push(Row {
                label: combined(&c.to_string()),
                sub: String::new(),
                count: first_some(reports, |r| category(r).map(|x| format_number(x.weighted_trials)))
                    .unwrap_or_default(),
                cells: reports
                    .iter()
                    .map(|r| category(r).map(|x| format_percent(x.rate)))
                    .collect(),
            });
        }
        for a in under {
            let action = |r: &AttributionReport| r.individual.actions.iter().find(|x| x.key == a).cloned();
            t.rows.push(Row {
                label: a.display_name().to_string(),
                sub: String::new(),
                count: first_some(reports, |r| action(r).map(|x| format_number(x.weighted_trials))).unwrap_or_default(),
                cells: reports
                    .iter()
                    .map(|r| action(r).map(|x| format_percent(x.rate)))
                    .collect(),
            });
        }
    }
    t
}

fn by_interaction_table(reports: &[AttributionReport], ci: bool) -> Table {
    let mut t = Table::new(&["Action", "Interaction", "Trials"], reports);
    let refs = individual_refs(reports);
    for a in individual_actions(reports) {
        let under: Vec<InteractionRef> = refs.iter().copied().filter(|r| r.action() == a).collect();
        if under.len() >= 2 {
            let action = |r: &AttributionReport| r.individual.actions.iter().find(|x| x.key == a).cloned();
            t.rows.push(Row {
                label: combined(a.display_name()),
                sub: String::new(),
                count: first_some(reports, |r| action(r).map(|x| format_number(x.weighted_trials))).unwrap_or_default(),
                cells: reports
                    .iter()
                    .map(|r| action(r).map(|x| format_percent(x.rate)))
                    .collect(),
            });
        }
        for target in under {
            let row = |r: &AttributionReport| r.individual.interactions.iter().find(|x| x.target == target).cloned();
            t.rows.push(Row {
                label: a.display_name().to_string(),
                sub: target.interaction().display_name().to_string(),
                count: first_some(reports, |r| row(r).map(|x| x.trials.to_string())).unwrap_or_default(),
                cells: reports
                    .iter()
                    .map(|r| row(r).map(|x| with_ci(format_percent(x.rate), x.ci, ci)))
                    .collect(),
            });
        }
    }
    t
}

fn pooled_cell<K>(row: Option<&PooledRow<K>>) -> Option<String> {
    let row = row?;
    row.rate
        .map(|rate| format!("{} ({})", format_percent(rate), row.instances))
}

fn e2e_interactions_table(reports: &[AttributionReport]) -> Table {
    let mut t = Table::new(&["Action", "Interaction", ""], reports);
    let refs: BTreeSet<InteractionRef> = reports
        .iter()
        .flat_map(|r| r.e2e.interactions.iter().map(|x| x.key))
        .collect();
    for c in Category::ALL {
        let actions: BTreeSet<Action> = refs.iter().filter(|r| r.category() == c).map(|r| r.action()).collect();
        if actions.is_empty() {
            continue;
        }
        if actions.len() >= 2 {
            t.rows.push(Row {
                label: combined(&c.to_string()),
                sub: String::new(),
                count: String::new(),
                cells: reports
                    .iter()
                    .map(|r| pooled_cell(r.e2e.categories.iter().find(|x| x.key == c)))
                    .collect(),
            });
        }
        for a in actions {
            let under: Vec<InteractionRef> = refs.iter().copied().filter(|r| r.action() == a).collect();
            if under.len() >= 2 {
                t.rows.push(Row {
                    label: combined(a.display_name()),
                    sub: String::new(),
                    count: String::new(),
                    cells: reports
                        .iter()
                        .map(|r| pooled_cell(r.e2e.actions.iter().find(|x| x.key == a)))
                        .collect(),
                });
            }
            for target in under {
                t.rows.push(Row {
                    label: a.display_name().to_string(),
                    sub: target.interaction().display_name().to_string(),
                    count: String::new(),
                    cells: reports
                        .iter()
                        .map(|r| pooled_cell(r.e2e.interactions.iter().find(|x| x.key == target)))
                        .collect(),
                });
            }
        }
    }
    t
}

/// One table per E2E task: a row per report with the task rate followed by
/// each checkpoint's conditional rate and reached count.
fn checkpoint_tables(reports: &[AttributionReport], ci: bool) -> Vec<(String, Vec<String>, Vec<Vec<String>>)> {
    let tasks: Vec<&str> = {
        let mut seen = Vec::new();
        for r in reports {
            for t in &r.e2e_tasks {
                if !seen.contains(&t.task_id.as_str()) {
                    seen.push(t.task_id.as_str());
                }
            }
        }
        seen
    };
    tasks
        .into_iter()
        .map(|task_id| {
            let ids: Vec<String> = first_some(reports, |r| {
                r.e2e_task(task_id)
                    .map(|t| t.checkpoints.iter().map(|c| c.id.clone()).collect())
            })
            .unwrap_or_default();
            let mut head = vec!["Agent".to_string(), "E2E".to_string()];
            head.extend(ids.iter().cloned());
            let rows = reports
                .iter()
                .map(|r| {
                    let mut row = vec![r.agent.clone()];
                    match r.e2e_task(task_id) {
                        Some(t) => {
                            row.push(
                                t.rate
                                    .map(|rate| with_ci(format!("{} ({})", format_percent(rate), t.trials), t.ci, ci))
                                    .unwrap_or_default(),
                            );
                            for id in &ids {
                                let c = t.checkpoints.iter().find(|c| &c.id == id);
                                row.push(
                                    c.and_then(|c| {
                                        c.rate.map(|rate| format!("{} ({})", format_percent(rate), c.reached))
                                    })
                                    .unwrap_or_default(),
                                );
                            }
                        }
                        None => row.extend(std::iter::repeat_n(String::new(), ids.len() + 1)),
                    }
                    row
                })
                .collect();
            (task_id.to_string(), head, rows)
        })
        .collect()
}

fn markdown_rows(head: &[String], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "| {} |", head.join(" | "));
    let _ = writeln!(out, "|{}", "---|".repeat(head.len()));
    for r in rows {
        out += &md_line(r);
    }
    out
}

fn csv_line(fields: &[&str]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(fields).expect("writing to memory");
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("fields are utf-8")
}

const CSV_HEAD: [&str; 7] = ["section", "level", "name", "agent", "rate", "count", "ci"];

fn csv_sections(reports: &[AttributionReport]) -> Vec<Section> {
    let mut by_action = String::new();
    let mut by_interaction = String::new();
    let mut checkpoints = String::new();
    let mut e2e = String::new();
    let opt = |x: Option<f64>| x.map(format_number).unwrap_or_default();
    let ci = |x: Option<u32>| x.map(|c| c.to_string()).unwrap_or_default();
    for r in reports {
        let agent = r.agent.as_str();
        for c in &r.individual.categories {
            by_action += &csv_line(&[
                SECTION_BY_ACTION,
                "category",
                &c.key.to_string(),
                agent,
                &format_number(c.rate),
                &format_number(c.weighted_trials),
                "",
            ]);
        }
        for a in &r.individual.actions {
            by_action += &csv_line(&[
                SECTION_BY_ACTION,
                "action",
                a.key.display_name(),
                agent,
                &format_number(a.rate),
                &format_number(a.weighted_trials),
                "",
            ]);
        }
        for i in &r.individual.interactions {
            by_interaction += &csv_line(&[
                SECTION_BY_INTERACTION,
                "interaction",
                &i.target.path(),
                agent,
                &format_number(i.rate),
                &i.trials.to_string(),
                &ci(i.ci),
            ]);
        }
        for t in &r.e2e_tasks {
            checkpoints += &csv_line(&[
                SECTION_CHECKPOINTS,
                "task",
                &t.task_id,
                agent,
                &opt(t.rate),
                &t.trials.to_string(),
                &ci(t.ci),
            ]);
            for c in &t.checkpoints {
                let name = format!("{}#{}", t.task_id, c.id);
                checkpoints += &csv_line(&[
                    SECTION_CHECKPOINTS,
                    "checkpoint",
                    &name,
                    agent,
                    &opt(c.rate),
                    &c.reached.to_string(),
                    "",
                ]);
            }
        }
        for c in &r.e2e.categories {
            e2e += &csv_line(&[
                SECTION_E2E_INTERACTIONS,
                "category",
                &c.key.to_string(),
                agent,
                &opt(c.rate),
                &c.instances.to_string(),
                "",
            ]);
        }
        for a in &r.e2e.actions {
            e2e += &csv_line(&[
                SECTION_E2E_INTERACTIONS,
                "action",
                a.key.display_name(),
                agent,
                &opt(a.rate),
                &a.instances.to_string(),
                "",
            ]);
        }
        for i in &r.e2e.interactions {
            e2e += &csv_line(&[
                SECTION_E2E_INTERACTIONS,
                "interaction",
                &i.key.path(),
                agent,
                &opt(i.rate),
                &i.instances.to_string(),
                "",
            ]);
        }
    }
    let head = csv_line(&CSV_HEAD);
    vec![
        Section {
            name: "header".into(),
            content: head,
        },
        Section {
            name: SECTION_BY_ACTION.into(),
            content: by_action,
        },
        Section {
            name: SECTION_BY_INTERACTION.into(),
            content: by_interaction,
        },
        Section {
            name: SECTION_CHECKPOINTS.into(),
            content: checkpoints,
        },
        Section {
            name: SECTION_E2E_INTERACTIONS.into(),
            content: e2e,
        },
    ]
}

/// Renders reports side by side, one column per report.
pub fn render(reports: &[AttributionReport], format: Format, ci: bool) -> ReportDocument {
    let sections = match format {
        Format::Doc => {
            let doc = Doc {
                format: DOC_FORMAT.into(),
                version: DOC_VERSION,
                reports: reports.to_vec(),
            };
            let mut content = serde_json::to_string_pretty(&doc).expect("reports serialize");
            content.push('\n');
            vec![Section {
                name: "document".into(),
                content,
            }]
        }
        Format::Csv => csv_sections(reports),
        Format::Markdown => {
            let checkpoints = checkpoint_tables(reports, ci)
                .into_iter()
                .map(|(task, head, rows)| format!("**{task}**\n\n{}", markdown_rows(&head, &rows)))
                .collect::<Vec<_>>()
                .join("\n");
            vec![
                Section {
                    name: SECTION_BY_ACTION.into(),
                    content: by_action_table(reports).markdown(false),
                },
                Section {
                    name: SECTION_BY_INTERACTION.into(),
                    content: by_interaction_table(reports, ci).markdown(true),
                },
                Section {
                    name: SECTION_CHECKPOINTS.into(),
                    content: checkpoints,
                },
                Section {
                    name: SECTION_E2E_INTERACTIONS.into(),
                    content: e2e_interactions_markdown(reports),
                },
            ]
        }
    };
    ReportDocument { format, sections }
}

fn e2e_interactions_markdown(reports: &[AttributionReport]) -> String {
    let t = e2e_interactions_table(reports);
    let mut head = vec![t.head[0].clone(), t.head[1].clone()];
    head.extend(t.head[3..].iter().cloned());
    let rows: Vec<Vec<String>> = t
        .rows
        .iter()
        .map(|r| {
            let mut row = vec![r.label.clone(), r.sub.clone()];
            row.extend(r.cells.iter().map(|c| c.clone().unwrap_or_default()));
            row
        })
        .collect();
    markdown_rows(&head, &rows)
}

/// Reads a structured document and re-validates every report in it.
pub fn parse_document(text: &str) -> Result<Vec<AttributionReport>, ReportError> {
    let doc: Doc = serde_json::from_str(text)?;
    if doc.format != DOC_FORMAT || doc.version != DOC_VERSION {
        return Err(ReportError::Version {
            format: doc.format,
            version: doc.version,
        });
    }
    for r in &doc.reports {
        r.validate()?;
    }
    Ok(doc.reports)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffRow {
    /// `individual` or `e2e`.
    pub kind: &'static str,
    #[serde(rename = "ref")]
    pub target: InteractionRef,
    pub a: Option<f64>,
    pub b: Option<f64>,
    /// `b - a` in percentage points; `None` unless both sides have a rate.
    pub delta: Option<f64>,
}

/// Per-interaction rate changes from `a` to `b`, largest change first.
pub fn diff_rows(a: &AttributionReport, b: &AttributionReport) -> Result<Vec<DiffRow>, ReportError> {
    let sa: BTreeSet<&String> = a.suite.iter().collect();
    let sb: BTreeSet<&String> = b.suite.iter().collect();
    if sa != sb {
        return Err(ReportError::SuiteMismatch {
            only_a: sa.difference(&sb).map(|s| s.to_string()).collect(),
            only_b: sb.difference(&sa).map(|s| s.to_string()).collect(),
        });
    }
    let mut rows = Vec::new();
    for target in individual_refs(&[a.clone(), b.clone()]) {
        let (x, y) = (a.interaction_rate(target), b.interaction_rate(target));
        rows.push(DiffRow {
            kind: "individual",
            target,
            a: x,
            b: y,
            delta: x.zip(y).map(|(x, y)| y - x),
        });
    }
    let e2e_refs: BTreeSet<InteractionRef> = a
        .e2e
        .interactions
        .iter()
        .chain(&b.e2e.interactions)
        .map(|r| r.key)
        .collect();
    for target in e2e_refs {
        let x = a.e2e_interaction(target).and_then(|r| r.rate);
        let y = b.e2e_interaction(target).and_then(|r| r.rate);
        rows.push(DiffRow {
            kind: "e2e",
            target,
            a: x,
            b: y,
            delta: x.zip(y).map(|(x, y)| y - x),
        });
    }
    rows.sort_by(|p, q| {
        let mag = |d: Option<f64>| d.map_or(-1.0, f64::abs);
        mag(q.delta)
            .total_cmp(&mag(p.delta))
            .then_with(|| p.target.cmp(&q.target))
            .then_with(|| p.kind.cmp(q.kind))
    });
    Ok(rows)
}

fn signed(d: f64) -> String {
    let s = format_number(d);
    if d > 0.0 && s != "0" {
        format!("+{s}")
    } else {
        s
    }
}

/// Markdown table of [`diff_rows`].
pub fn diff_runs(a: &AttributionReport, b: &AttributionReport) -> Result<ReportDocument, ReportError> {
    let rows = diff_rows(a, b)?;
    let head: Vec<String> = ["Kind", "Interaction", a.agent.as_str(), b.agent.as_str(), "Delta"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.kind.to_string(),
                r.target.path(),
                r.a.map(format_percent).unwrap_or_default(),
                r.b.map(format_percent).unwrap_or_default(),
                r.delta.map(signed).unwrap_or_default(),
            ]
        })
        .collect();
    Ok(ReportDocument {
        format: Format::Markdown,
        sections: vec![Section {
            name: "diff".into(),
            content: markdown_rows(&head, &body),
        }],
    })
}
