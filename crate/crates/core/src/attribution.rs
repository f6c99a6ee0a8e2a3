//! Interaction-level diagnostics from finished runs.
//!
//! Individual tasks aggregate with equal weight per interaction; E2E tasks
//! pool instances. The two rules disagree on the same data, so they are kept
//! apart all the way into the report.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logmodel::{debounce_type_entries, LogEntry, LogStream, DEFAULT_DEBOUNCE};
use crate::runner::RunArchive;
use crate::tasks::{match_goldens, E2ETask, Suite, TaskRef};
use crate::taxonomy::{Action, Category, InteractionRef};

pub const Z_95: f64 = 1.96;
/// Slack for comparing stored aggregates against a recomputation.
const EPS: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum AttributionError {
    #[error("run references unknown task {0:?}")]
    UnknownTask(String),
    #[error("stored {what} disagrees with recomputation")]
    Inconsistent { what: String },
}

/// Successes over trials for one individual task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskStat {
    pub task_id: String,
    pub interaction: InteractionRef,
    pub successes: u32,
    pub trials: u32,
}

impl TaskStat {
    pub fn rate(&self) -> f64 {
        percent(self.successes, self.trials).unwrap_or(0.0)
    }
}

/// Successes over instances for one interaction during E2E tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteractionStat {
    #[serde(rename = "ref")]
    pub target: InteractionRef,
    pub successes: u32,
    pub instances: u32,
}

fn percent(successes: u32, n: u32) -> Option<f64> {
    (n > 0).then(|| 100.0 * f64::from(successes) / f64::from(n))
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Wald half-width in whole percentage points; `None` when `n == 0`.
pub fn wald_ci(successes: u32, n: u32) -> Option<u32> {
    percent(successes, n).and_then(|p| wald_ci_rate(p, f64::from(n)))
}

/// As [`wald_ci`] for a rate already in percent.
pub fn wald_ci_rate(rate: f64, n: f64) -> Option<u32> {
    if n <= 0.0 {
        return None;
    }
    let p = rate / 100.0;
    Some((100.0 * Z_95 * (p * (1.0 - p) / n).sqrt()).round() as u32)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndividualInteractionRow {
    #[serde(rename = "ref")]
    pub target: InteractionRef,
    pub rate: f64,
    /// Raw trial count over all of the interaction's tasks.
    pub trials: u32,
    pub tasks: u32,
    pub ci: Option<u32>,
}

impl IndividualInteractionRow {
    /// Trials normalized by task count; what action rows add up.
    pub fn weighted_trials(&self) -> f64 {
        f64::from(self.trials) / f64::from(self.tasks.max(1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedRow<K> {
    pub key: K,
    pub rate: f64,
    pub weighted_trials: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndividualAggregate {
    pub interactions: Vec<IndividualInteractionRow>,
    pub actions: Vec<WeightedRow<Action>>,
    pub categories: Vec<WeightedRow<Category>>,
}

/// Equal weighting: an interaction is the mean of its task rates, an action
/// the mean of its interactions, and a category the mean of every
/// descendant interaction (not of its actions).
pub fn aggregate_individual(stats: &[TaskStat]) -> IndividualAggregate {
    let mut by_ref: BTreeMap<InteractionRef, Vec<&TaskStat>> = BTreeMap::new();
    for s in stats {
        by_ref.entry(s.interaction).or_default().push(s);
    }
    let interactions: Vec<IndividualInteractionRow> = by_ref
        .iter()
        .map(|(r, tasks)| {
            let rates: Vec<f64> = tasks.iter().map(|t| t.rate()).collect();
            let rate = mean(&rates).expect("grouped rows are non-empty");
            let trials = tasks.iter().map(|t| t.trials).sum();
            IndividualInteractionRow {
                target: *r,
                rate,
                trials,
                tasks: tasks.len() as u32,
                ci: wald_ci_rate(rate, f64::from(trials)),
            }
        })
        .collect();
    let weighted = |rows: Vec<&IndividualInteractionRow>| {
        let rates: Vec<f64> = rows.iter().map(|r| r.rate).collect();
        mean(&rates).map(|rate| (rate, rows.iter().map(|r| r.weighted_trials()).sum()))
    };
    let actions = Action::ALL
        .into_iter()
        .filter_map(|a| {
            let (rate, weighted_trials) = weighted(interactions.iter().filter(|r| r.target.action() == a).collect())?;
            Some(WeightedRow {
                key: a,
                rate,
                weighted_trials,
            })
        })
        .collect();
    let categories = Category::ALL
        .into_iter()
        .filter_map(|c| {
            let (rate, weighted_trials) = weighted(interactions.iter().filter(|r| r.target.category() == c).collect())?;
            Some(WeightedRow {
                key: c,
                rate,
                weighted_trials,
            })
        })
        .collect();
    IndividualAggregate {
        interactions,
        actions,
        categories,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PooledRow<K> {
    pub key: K,
    pub successes: u32,
    pub instances: u32,
    /// `None` when nothing under this level was encountered.
    pub rate: Option<f64>,
}

impl<K> PooledRow<K> {
    fn pool<'a>(key: K, leaves: impl Iterator<Item = &'a InteractionStat>) -> Self {
        let (successes, instances) = leaves.fold((0, 0), |(s, n), l| (s + l.successes, n + l.instances));
        PooledRow {
            key,
            successes,
            instances,
            rate: percent(successes, instances),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct E2EAggregate {
    pub interactions: Vec<PooledRow<InteractionRef>>,
    pub actions: Vec<PooledRow<Action>>,
    pub categories: Vec<PooledRow<Category>>,
}

/// Instance pooling at every level: Σ successes / Σ instances.
pub fn aggregate_e2e(stats: &[InteractionStat]) -> E2EAggregate {
    let mut merged: BTreeMap<InteractionRef, InteractionStat> = BTreeMap::new();
    for s in stats {
        let m = merged.entry(s.target).or_insert(InteractionStat {
            target: s.target,
            successes: 0,
            instances: 0,
        });
        m.successes += s.successes;
        m.instances += s.instances;
    }
    let leaves: Vec<InteractionStat> = merged.into_values().collect();
    let actions_present: BTreeSet<Action> = leaves.iter().map(|l| l.target.action()).collect();
    let categories_present: BTreeSet<Category> = leaves.iter().map(|l| l.target.category()).collect();
    E2EAggregate {
        interactions: leaves
            .iter()
            .map(|l| PooledRow::pool(l.target, std::iter::once(l)))
            .collect(),
        actions: actions_present
            .into_iter()
            .map(|a| PooledRow::pool(a, leaves.iter().filter(|l| l.target.action() == a)))
            .collect(),
        categories: categories_present
            .into_iter()
            .map(|c| PooledRow::pool(c, leaves.iter().filter(|l| l.target.category() == c)))
            .collect(),
    }
}

/// Label of a checkpoint segment; the preamble is scored with the first
/// checkpoint since the agent starts on its page.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment<'a> {
    pub checkpoint: usize,
    pub entries: Vec<&'a LogEntry>,
}

/// Splits a stream at navs onto checkpoint pages. A nav opens checkpoint
/// `j` only once checkpoint `j - 1` has been reached, so reach is monotone.
/// Returns the segments and the per-checkpoint reached flags.
pub fn segment_by_checkpoints<'a>(task: &E2ETask, stream: &'a LogStream) -> (Vec<Segment<'a>>, Vec<bool>) {
    let n = task.checkpoints.len();
    let mut reached = vec![false; n];
    if n == 0 {
        return (Vec::new(), reached);
    }
    reached[0] = true;
    let mut segments = vec![Segment {
        checkpoint: 0,
        entries: Vec::new(),
    }];
    for e in &stream.entries {
        if e.is_nav() {
            let opened =
                (0..n).find(|&j| (j == 0 || reached[j - 1]) && task.checkpoints[j].path_pattern.matches(&e.payload));
            if let Some(j) = opened {
                reached[j] = true;
                segments.push(Segment {
                    checkpoint: j,
                    entries: Vec::new(),
                });
            }
        } else {
            segments.last_mut().expect("seeded with one segment").entries.push(e);
        }
    }
    (segments, reached)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckpointScore {
    pub id: String,
    pub reached: bool,
    /// Per golden, whether it matched within the checkpoint's segments.
    pub matched: Vec<bool>,
    pub completed: bool,
}

/// One trial of one E2E task, scored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialScore {
    pub checkpoints: Vec<CheckpointScore>,
    pub instances: Vec<(InteractionRef, bool)>,
    /// Unmatched logs inside reached checkpoints; not penalized.
    pub extras: Vec<(String, String)>,
    pub success: bool,
}

/// Scores a finished E2E trial against its checkpoints.
pub fn score_trial(task: &E2ETask, stream: &LogStream) -> TrialScore {
    let stream = debounce_type_entries(stream, DEFAULT_DEBOUNCE);
    let verified = crate::tasks::verify_e2e(task, &stream);
    let (segments, reached) = segment_by_checkpoints(task, &stream);
    let n = task.checkpoints.len();
    let mut checkpoints = Vec::with_capacity(n);
    let mut instances = Vec::new();
    let mut extras = Vec::new();
    for (k, spec) in task.checkpoints.iter().enumerate() {
        let union: Vec<&LogEntry> = segments
            .iter()
            .filter(|s| s.checkpoint == k)
            .flat_map(|s| s.entries.iter().copied())
            .collect();
        let matching = match_goldens(&spec.goldens, &union);
        let matched: Vec<bool> = matching.iter().map(Option::is_some).collect();
        let advanced = if k + 1 < n { reached[k + 1] } else { verified };
        let completed = reached[k] && matched.iter().all(|m| *m) && advanced;
        if reached[k] {
            match spec.override_ref {
                Some(r) => instances.push((r, completed)),
                None => {
                    for (g, m) in spec.goldens.iter().zip(&matched) {
                        instances.extend(g.refs.iter().map(|r| (*r, *m)));
                    }
                    let used: BTreeSet<usize> = matching.iter().flatten().copied().collect();
                    extras.extend(
                        union
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| !used.contains(i))
                            .map(|(_, e)| (spec.id.clone(), e.line())),
                    );
                }
            }
        }
        checkpoints.push(CheckpointScore {
            id: spec.id.clone(),
            reached: reached[k],
            matched,
            completed,
        });
    }
    TrialScore {
        checkpoints,
        instances,
        extras,
        success: verified,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointRate {
    pub id: String,
    pub completed: u32,
    pub reached: u32,
    /// Completed over reached; `None` when no trial got there.
    pub rate: Option<f64>,
}

/// Conditional completion rates: the denominator is the number of trials
/// that reached each checkpoint, not the number of trials.
pub fn checkpoint_rates(task: &E2ETask, scores: &[TrialScore]) -> Vec<CheckpointRate> {
    task.checkpoints
        .iter()
        .enumerate()
        .map(|(k, spec)| {
            let reached = scores.iter().filter(|s| s.checkpoints[k].reached).count() as u32;
            let completed = scores.iter().filter(|s| s.checkpoints[k].completed).count() as u32;
            CheckpointRate {
                id: spec.id.clone(),
                completed,
                reached,
                rate: percent(completed, reached),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtraLog {
    pub task_id: String,
    pub trial: u32,
    pub checkpoint: String,
    pub line: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct E2ETaskReport {
    pub task_id: String,
    pub successes: u32,
    pub trials: u32,
    pub rate: Option<f64>,
    pub ci: Option<u32>,
    pub checkpoints: Vec<CheckpointRate>,
}

impl E2ETaskReport {
    pub fn new(task_id: &str, successes: u32, trials: u32, checkpoints: Vec<CheckpointRate>) -> Self {
        E2ETaskReport {
            task_id: task_id.to_string(),
            successes,
            trials,
            rate: percent(successes, trials),
            ci: wald_ci(successes, trials),
            checkpoints,
        }
    }
}

/// Everything reporting needs. Aggregates are stored for readability but
/// are always derivable from `task_stats` and `e2e_stats`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributionReport {
    pub agent: String,
    pub run_id: String,
    pub suite: Vec<String>,
    pub task_stats: Vec<TaskStat>,
    pub e2e_stats: Vec<InteractionStat>,
    pub individual: IndividualAggregate,
    pub e2e: E2EAggregate,
    pub e2e_tasks: Vec<E2ETaskReport>,
    pub extras: Vec<ExtraLog>,
}

impl AttributionReport {
    /// Builds a report from leaf statistics.
    pub fn from_leaves(
        agent: &str,
        run_id: &str,
        suite: Vec<String>,
        task_stats: Vec<TaskStat>,
        e2e_stats: Vec<InteractionStat>,
        e2e_tasks: Vec<E2ETaskReport>,
        extras: Vec<ExtraLog>,
    ) -> Self {
        AttributionReport {
            agent: agent.to_string(),
            run_id: run_id.to_string(),
            suite,
            individual: aggregate_individual(&task_stats),
            e2e: aggregate_e2e(&e2e_stats),
            task_stats,
            e2e_stats,
            e2e_tasks,
            extras,
        }
    }

    /// Checks every stored aggregate against a recomputation from leaves.
    pub fn validate(&self) -> Result<(), AttributionError> {
        let bad = |what: &str| Err(AttributionError::Inconsistent { what: what.to_string() });
        if !individual_close(&self.individual, &aggregate_individual(&self.task_stats)) {
            return bad("individual aggregate");
        }
        if self.e2e != aggregate_e2e(&self.e2e_stats) {
            return bad("e2e aggregate");
        }
        for t in &self.e2e_tasks {
            if *t != E2ETaskReport::new(&t.task_id, t.successes, t.trials, t.checkpoints.clone()) {
                return bad(&format!("{} task rate", t.task_id));
            }
            for c in &t.checkpoints {
                if c.completed > c.reached || c.rate != percent(c.completed, c.reached) {
                    return bad(&format!("{} checkpoint {}", t.task_id, c.id));
                }
            }
        }
        Ok(())
    }

    pub fn interaction_rate(&self, r: InteractionRef) -> Option<f64> {
        self.individual
            .interactions
            .iter()
            .find(|row| row.target == r)
            .map(|row| row.rate)
    }

    pub fn e2e_interaction(&self, r: InteractionRef) -> Option<&PooledRow<InteractionRef>> {
        self.e2e.interactions.iter().find(|row| row.key == r)
    }

    pub fn e2e_task(&self, task_id: &str) -> Option<&E2ETaskReport> {
        self.e2e_tasks.iter().find(|t| t.task_id == task_id)
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= EPS
}

fn individual_close(a: &IndividualAggregate, b: &IndividualAggregate) -> bool {
    a.interactions.len() == b.interactions.len()
        && a.actions.len() == b.actions.len()
        && a.categories.len() == b.categories.len()
        && a.interactions.iter().zip(&b.interactions).all(|(x, y)| {
            x.target == y.target && x.trials == y.trials && x.tasks == y.tasks && x.ci == y.ci && close(x.rate, y.rate)
        })
        && a.actions
            .iter()
            .zip(&b.actions)
            .all(|(x, y)| x.key == y.key && close(x.rate, y.rate) && close(x.weighted_trials, y.weighted_trials))
        && a.categories
            .iter()
            .zip(&b.categories)
            .all(|(x, y)| x.key == y.key && close(x.rate, y.rate) && close(x.weighted_trials, y.weighted_trials))
}

struct TaskAttribution {
    task_stat: Option<TaskStat>,
    e2e_stats: Vec<InteractionStat>,
    e2e_task: Option<E2ETaskReport>,
    extras: Vec<ExtraLog>,
}

fn attribute_task(task: TaskRef<'_>, archive: &RunArchive) -> TaskAttribution {
    let records: Vec<_> = archive.records_for(task.id()).collect();
    let trials = records.len() as u32;
    let successes = records.iter().filter(|r| r.passed).count() as u32;
    match task {
        TaskRef::Individual(t) => TaskAttribution {
            task_stat: Some(TaskStat {
                task_id: t.id.clone(),
                interaction: t.interaction,
                successes,
                trials,
            }),
            e2e_stats: Vec::new(),
            e2e_task: None,
            extras: Vec::new(),
        },
        TaskRef::E2E(t) => {
            let scores: Vec<TrialScore> = records.iter().map(|r| score_trial(t, &r.log)).collect();
            let mut stats: BTreeMap<InteractionRef, InteractionStat> = BTreeMap::new();
            for (r, ok) in scores.iter().flat_map(|s| &s.instances) {
                let s = stats.entry(*r).or_insert(InteractionStat {
                    target: *r,
                    successes: 0,
                    instances: 0,
                });
                s.instances += 1;
                s.successes += u32::from(*ok);
            }
            let extras = records
                .iter()
                .zip(&scores)
                .flat_map(|(rec, s)| {
                    s.extras.iter().map(|(cp, line)| ExtraLog {
                        task_id: t.id.clone(),
                        trial: rec.trial,
                        checkpoint: cp.clone(),
                        line: line.clone(),
                    })
                })
                .collect();
            TaskAttribution {
                task_stat: None,
                e2e_stats: stats.into_values().collect(),
                e2e_task: Some(E2ETaskReport::new(
                    &t.id,
                    successes,
                    trials,
                    checkpoint_rates(t, &scores),
                )),
                extras,
            }
        }
    }
}

#[cfg(feature = "parallel")]
fn attribute_all(tasks: &[TaskRef<'_>], archive: &RunArchive) -> Vec<TaskAttribution> {
    use rayon::prelude::*;
    tasks.par_iter().map(|t| attribute_task(*t, archive)).collect()
}

#[cfg(not(feature = "parallel"))]
fn attribute_all(tasks: &[TaskRef<'_>], archive: &RunArchive) -> Vec<TaskAttribution> {
    tasks.iter().map(|t| attribute_task(*t, archive)).collect()
}

/// Attributes a finished run. Tasks with no records are left out.
pub fn attribute(suite: &Suite, archive: &RunArchive) -> Result<AttributionReport, AttributionError> {
    if let Some(r) = archive.records.iter().find(|r| suite.task(&r.task_id).is_none()) {
        return Err(AttributionError::UnknownTask(r.task_id.clone()));
    }
    let present: BTreeSet<&str> = archive.records.iter().map(|r| r.task_id.as_str()).collect();
    let tasks: Vec<TaskRef<'_>> = suite.tasks().filter(|t| present.contains(t.id())).collect();
    let parts = attribute_all(&tasks, archive);

    let mut task_stats = Vec::new();
    let mut e2e_stats = Vec::new();
    let mut e2e_tasks = Vec::new();
    let mut extras = Vec::new();
    for p in parts {
        task_stats.extend(p.task_stat);
        e2e_stats.extend(p.e2e_stats);
        e2e_tasks.extend(p.e2e_task);
        extras.extend(p.extras);
    }
    // merge per-task E2E leaves into one row per interaction
    let pooled: Vec<InteractionStat> = aggregate_e2e(&e2e_stats)
        .interactions
        .iter()
        .map(|row| InteractionStat {
            target: row.key,
            successes: row.successes,
            instances: row.instances,
        })
        .collect();
    Ok(AttributionReport::from_leaves(
        &archive.agent.name,
        &archive.run_id,
        tasks.iter().map(|t| t.id().to_string()).collect(),
        task_stats,
        pooled,
        e2e_tasks,
        extras,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tasks::builtin_suite;
    use crate::taxonomy::refs::*;
    use crate::taxonomy::LogRef;

    fn e(r: InteractionRef, payload: &str) -> LogEntry {
        LogEntry::new(r.into(), payload)
    }

    fn nav(path: &str) -> LogEntry {
        LogEntry::new(LogRef::Navigation, path)
    }

    fn order() -> E2ETask {
        builtin_suite().e2e.into_iter().find(|t| t.id == "e2e/order").unwrap()
    }

    fn stat(r: InteractionRef, successes: u32, instances: u32) -> InteractionStat {
        InteractionStat {
            target: r,
            successes,
            instances,
        }
    }

    #[test]
    fn wald_examples() {
        assert_eq!(wald_ci(2, 8), Some(30));
        assert_eq!(wald_ci(1, 8), Some(23));
        assert_eq!(wald_ci(7, 8), Some(23));
        assert_eq!(wald_ci(0, 8), Some(0));
        assert_eq!(wald_ci(0, 0), None);
    }

    #[test]
    fn stream_without_navs_is_one_preamble_segment() {
        let stream = LogStream::new("s", vec![e(TYPE_TEXT, "Search=mac"), e(CLICK_BUTTON, "x")]);
        let (segs, reached) = segment_by_checkpoints(&order(), &stream);
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].entries.len(), 2);
        assert_eq!(reached, [true, false, false, false]);
    }

    #[test]
    fn nav_to_later_page_does_not_skip_checkpoints() {
        let stream = LogStream::new("s", vec![nav("/item?id=mbp-m3"), e(CLICK_BUTTON, "Add to cart")]);
        let (segs, reached) = segment_by_checkpoints(&order(), &stream);
        assert_eq!(reached, [true, false, false, false]);
        assert_eq!(segs.len(), 1);
    }

    #[test]
    fn revisits_are_scored_as_a_union() {
        let task = order();
        let stream = LogStream::new(
            "s",
            vec![
                e(TYPE_TEXT, "Search=macbook pro m3"),
                e(CLICK_ICON_BUTTON, "Search"),
                nav("/search?query=macbook%20pro%20m3"),
                nav("/"),
                nav("/search?query=macbook%20pro%20m3"),
                e(CLICK_LINK, "MacBook Pro M3"),
                nav("/item?id=mbp-m3"),
            ],
        );
        let score = score_trial(&task, &stream);
        let reached: Vec<bool> = score.checkpoints.iter().map(|c| c.reached).collect();
        assert_eq!(reached, [true, true, true, false]);
        assert!(score.checkpoints[0].completed);
        assert!(score.checkpoints[1].completed);
        assert!(!score.checkpoints[2].completed);
        // one instance per golden ref, not per visit
        let links = score.instances.iter().filter(|(r, _)| *r == CLICK_LINK).count();
        assert_eq!(links, 1);
    }

    #[test]
    fn unreached_checkpoints_contribute_nothing() {
        let task = order();
        let stream = LogStream::new("s", vec![e(TYPE_TEXT, "Search=macbook pro m3")]);
        let score = score_trial(&task, &stream);
        assert_eq!(score.instances, vec![(TYPE_TEXT, true), (CLICK_ICON_BUTTON, false)]);
        assert!(!score.success);
    }

    #[test]
    fn pooled_example_rows() {
        let seeact = [
            stat(CLICK_ICON_BUTTON, 13, 16),
            stat(CLICK_LINK, 0, 13),
            stat(TYPE_TEXT, 16, 16),
            stat(SEARCH_SELECT_RESULT, 0, 13),
        ];
        let agg = aggregate_e2e(&seeact);
        let click = agg.actions.iter().find(|r| r.key == Action::Click).unwrap();
        assert_eq!((click.successes, click.instances), (13, 29));
        assert!((click.rate.unwrap() - 1300.0 / 29.0).abs() < 1e-9);
        assert!(agg.actions.iter().all(|r| r.key != Action::Fill));
    }

    #[test]
    fn equal_weighting_ignores_trial_counts() {
        let stats = [
            TaskStat {
                task_id: "a".into(),
                interaction: CLICK_SLIDER,
                successes: 8,
                trials: 8,
            },
            TaskStat {
                task_id: "b".into(),
                interaction: CLICK_SLIDER,
                successes: 0,
                trials: 8,
            },
            TaskStat {
                task_id: "c".into(),
                interaction: CLICK_BUTTON,
                successes: 8,
                trials: 8,
            },
        ];
        let agg = aggregate_individual(&stats);
        let slider = agg.interactions.iter().find(|r| r.target == CLICK_SLIDER).unwrap();
        assert_eq!(slider.rate, 50.0);
        assert_eq!(slider.trials, 16);
        let click = &agg.actions[0];
        assert_eq!(click.rate, 75.0);
        assert_eq!(click.weighted_trials, 16.0);
    }

    #[test]
    fn validate_catches_tampering() {
        let mut r = AttributionReport::from_leaves(
            "x",
            "x-1",
            vec!["t".into()],
            vec![TaskStat {
                task_id: "t".into(),
                interaction: CLICK_BUTTON,
                successes: 3,
                trials: 8,
            }],
            vec![stat(CLICK_LINK, 1, 2)],
            vec![E2ETaskReport::new("e", 1, 2, Vec::new())],
            Vec::new(),
        );
        r.validate().unwrap();
        r.individual.actions[0].rate = 99.0;
        assert!(r.validate().is_err());
    }
}
