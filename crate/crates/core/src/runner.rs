//! Drives agents through tasks: the agent protocol, per-trial orchestration
//! with time and log-count limits, and run persistence.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::environment::{ActionCommand, ElementManifest, EnvError, Environment, PageDoc, SessionOptions, Verb};
use crate::logmodel::{log_file_path, read_session_files, LogError, LogStream};
use crate::tasks::{check_individual, verify_e2e, Suite, TaskRef};

pub const ARCHIVE_FILE: &str = "archive.json";
pub const RECORD_FILE: &str = "record.json";
pub const DEFAULT_TRIALS: u32 = 8;
pub const DEFAULT_STEP_MS: u64 = 1000;
pub const DEFAULT_STEP_TIMEOUT: Duration = Duration::from_secs(30);

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Log(#[from] LogError),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("bad archive {path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("archive in {0} belongs to a different run configuration")]
    ArchiveMismatch(PathBuf),
    #[error("unknown agent {0:?}")]
    UnknownAgent(String),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AgentError {
    #[error("agent transport failed: {0}")]
    Transport(String),
    #[error("agent returned a malformed command: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentIdentity {
    pub name: String,
    pub version: String,
}

/// What the agent sees before each step.
#[derive(Debug, Clone, Serialize)]
pub struct Observation {
    pub session_id: String,
    pub goal: String,
    pub url: String,
    pub title: String,
    pub body_html: String,
    pub elements: Vec<ElementManifest>,
    pub step_index: u32,
    pub remaining_ms: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub last_error: Option<String>,
}

impl Observation {
    pub fn page(&self) -> PageDoc {
        PageDoc {
            path: self.url.clone(),
            title: self.title.clone(),
            body_html: self.body_html.clone(),
            elements: self.elements.clone(),
        }
    }
}

/// How trial time is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Clock {
    /// Each step costs a fixed amount; used for scripted agents.
    Virtual {
        step_ms: u64,
    },
    Wall,
}

/// Per-trial agent state; one command per call.
pub trait AgentSession: Send {
    fn step(&mut self, obs: &Observation) -> Result<ActionCommand, AgentError>;
}

pub trait Agent: Send + Sync {
    fn identity(&self) -> AgentIdentity;
    fn clock(&self) -> Clock;
    fn start(&self, task: TaskRef<'_>, seed: u64) -> Box<dyn AgentSession + '_>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Success,
    Failure,
    Timeout,
    StopCondition,
    AgentError,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub task_id: String,
    pub trial: u32,
    pub session_id: String,
    pub outcome: Outcome,
    /// Criterion result; may be true after Timeout or StopCondition.
    pub passed: bool,
    pub steps: u32,
    /// Virtual or wall milliseconds, per the agent's clock.
    pub elapsed_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Log file relative to the run directory; empty for in-memory runs.
    pub log_file: String,
    #[serde(skip)]
    pub log: LogStream,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub trials: u32,
    pub seed: u64,
    pub step_ms: u64,
    pub tasks: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunArchive {
    pub run_id: String,
    pub agent: AgentIdentity,
    pub config: RunConfig,
    pub records: Vec<TrialRecord>,
}

impl RunArchive {
    /// Reads `archive.json` and every referenced log file.
    pub fn load(dir: &Path) -> Result<RunArchive, RunError> {
        let path = dir.join(ARCHIVE_FILE);
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        let mut archive: RunArchive = serde_json::from_str(&text).map_err(|source| RunError::Json {
            path: path.clone(),
            source,
        })?;
        for r in &mut archive.records {
            r.log = read_session_files(&dir.join(trial_dir(&r.task_id, r.trial)), &r.session_id)?;
        }
        Ok(archive)
    }

    fn save(&self, dir: &Path) -> Result<(), RunError> {
        let path = dir.join(ARCHIVE_FILE);
        let tmp = dir.join(format!("{ARCHIVE_FILE}.tmp"));
        let mut text = serde_json::to_string_pretty(self).expect("archive serializes");
        text.push('\n');
        fs::write(&tmp, text).map_err(io_err(&tmp))?;
        fs::rename(&tmp, &path).map_err(io_err(&path))
    }

    pub fn records_for<'a>(&'a self, task_id: &'a str) -> impl Iterator<Item = &'a TrialRecord> + 'a {
        self.records.iter().filter(move |r| r.task_id == task_id)
    }
}

/// Directory of one trial relative to the run directory.
pub fn trial_dir(task_id: &str, trial: u32) -> PathBuf {
    let mut p = PathBuf::new();
    for part in task_id.split('/') {
        p.push(part);
    }
    p.push(trial.to_string());
    p
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    Sequential,
    /// Global rayon pool. Sequential without the `parallel` feature.
    #[default]
    Parallel,
    Threads(usize),
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub trials: u32,
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    pub parallelism: Parallelism,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            trials: DEFAULT_TRIALS,
            seed: 0,
            out_dir: None,
            parallelism: Parallelism::default(),
        }
    }
}

fn fnv1a(bytes: &[u8], mut h: u64) -> u64 {
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    h
}

/// Deterministic per-trial seed.
pub fn trial_seed(seed: u64, task_id: &str, trial: u32) -> u64 {
    let h = fnv1a(&seed.to_le_bytes(), 0xcbf2_9ce4_8422_2325);
    let h = fnv1a(task_id.as_bytes(), h);
    fnv1a(&trial.to_le_bytes(), h)
}

fn session_id_for(seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    format!("s{:016x}", rng.random::<u64>())
}

/// Runs one trial in a fresh session.
pub fn run_trial(
    env: &Environment,
    agent: &dyn Agent,
    task: TaskRef<'_>,
    trial: u32,
    seed: u64,
    log_dir: Option<&Path>,
) -> Result<TrialRecord, RunError> {
    let trial_seed = trial_seed(seed, task.id(), trial);
    let session_id = session_id_for(trial_seed);
    env.create_session_with(
        task.id(),
        SessionOptions {
            session_id: Some(session_id.clone()),
            log_dir: log_dir.map(Path::to_path_buf),
        },
    )?;
    let constraints = task.constraints();
    let limit_ms = constraints.time_limit_s * 1000;
    let clock = agent.clock();
    let started = Instant::now();
    let elapsed = |steps: u32| match clock {
        Clock::Virtual { step_ms } => u64::from(steps) * step_ms,
        Clock::Wall => started.elapsed().as_millis() as u64,
    };

    let mut policy = agent.start(task, trial_seed);
    let mut steps = 0u32;
    let mut last_error = None;
    let mut interactions = 0usize;
    let mut agent_error = None;
    let outcome_kind = loop {
        let now = elapsed(steps);
        if now >= limit_ms {
            break Outcome::Timeout;
        }
        let page = env.current_page(&session_id)?;
        let obs = Observation {
            session_id: session_id.clone(),
            goal: task.goal().to_string(),
            url: page.path,
            title: page.title,
            body_html: page.body_html,
            elements: page.elements,
            step_index: steps,
            remaining_ms: limit_ms - now,
            last_error: last_error.take(),
        };
        let cmd = match policy.step(&obs) {
            Ok(cmd) => cmd,
            Err(e) => {
                agent_error = Some(e.to_string());
                break Outcome::AgentError;
            }
        };
        if cmd.verb == Verb::Stop {
            break Outcome::Success;
        }
        if constraints.max_logs.is_some_and(|max| interactions >= max) {
            break Outcome::StopCondition;
        }
        let result = match clock {
            Clock::Virtual { step_ms } => env.apply_action_at(&session_id, &cmd, u64::from(steps) * step_ms),
            Clock::Wall => env.apply_action(&session_id, &cmd),
        };
        steps += 1;
        match result {
            Ok(out) => {
                interactions += out.emitted.iter().filter(|e| !e.is_nav()).count();
                if out.done {
                    break Outcome::Success;
                }
            }
            Err(e) if e.is_agent_fault() => last_error = Some(e.to_string()),
            Err(e) => return Err(e.into()),
        }
    };
    drop(policy);
    let elapsed_ms = elapsed(steps);
    let result = env.close_session(&session_id)?;

    let passed = match task {
        TaskRef::Individual(t) => {
            let evaluated = match constraints.max_logs {
                Some(max) => result.log.truncated_to_interactions(max),
                None => result.log.clone(),
            };
            outcome_kind != Outcome::AgentError && check_individual(t, &evaluated, &result.state)
        }
        TaskRef::E2E(t) => outcome_kind != Outcome::AgentError && verify_e2e(t, &result.log),
    };
    let outcome = match outcome_kind {
        Outcome::Success if !passed => Outcome::Failure,
        other => other,
    };
    let log_file = match log_dir {
        Some(_) => {
            let rel = trial_dir(task.id(), trial).join(log_file_path(Path::new(""), &session_id));
            rel.to_string_lossy().replace('\\', "/")
        }
        None => String::new(),
    };
    Ok(TrialRecord {
        task_id: task.id().to_string(),
        trial,
        session_id,
        outcome,
        passed,
        steps,
        elapsed_ms,
        error: agent_error,
        log_file,
        log: result.log,
    })
}

fn step_ms(agent: &dyn Agent) -> u64 {
    match agent.clock() {
        Clock::Virtual { step_ms } => step_ms,
        Clock::Wall => 0,
    }
}

/// Runs `trials` trials of every task. With an output directory the run is
/// persisted and resumable: completed `(task, trial)` pairs are skipped.
pub fn run_suite(agent: &dyn Agent, suite: &Suite, opts: &RunOptions) -> Result<RunArchive, RunError> {
    let identity = agent.identity();
    let config = RunConfig {
        trials: opts.trials,
        seed: opts.seed,
        step_ms: step_ms(agent),
        tasks: suite.tasks().map(|t| t.id().to_string()).collect(),
    };
    let fresh = RunArchive {
        run_id: format!(
            "{}-{}-{:x}",
            identity.name.replace([':', '/'], "_"),
            identity.version,
            opts.seed
        ),
        agent: identity,
        config,
        records: Vec::new(),
    };
    let archive = match &opts.out_dir {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(io_err(dir))?;
            if dir.join(ARCHIVE_FILE).exists() {
                let existing = RunArchive::load(dir)?;
                if existing.agent != fresh.agent || existing.config != fresh.config {
                    return Err(RunError::ArchiveMismatch(dir.clone()));
                }
                existing
            } else {
                fresh
            }
        }
        None => fresh,
    };
    let done: std::collections::HashSet<(String, u32)> =
        archive.records.iter().map(|r| (r.task_id.clone(), r.trial)).collect();
    let order: BTreeMap<&str, usize> = suite.tasks().enumerate().map(|(i, t)| (t.id(), i)).collect();
    let pending: Vec<(TaskRef<'_>, u32)> = suite
        .tasks()
        .flat_map(|t| (0..opts.trials).map(move |i| (t, i)))
        .filter(|(t, i)| !done.contains(&(t.id().to_string(), *i)))
        .collect();

    let env = Environment::new(Arc::new(suite.clone()));
    let shared = Mutex::new(archive);
    let run_one = |(task, trial): (TaskRef<'_>, u32)| -> Result<(), RunError> {
        let dir = opts.out_dir.as_ref().map(|d| d.join(trial_dir(task.id(), trial)));
        if let Some(dir) = &dir {
            if dir.exists() {
                fs::remove_dir_all(dir).map_err(io_err(dir))?;
            }
        }
        let record = run_trial(&env, agent, task, trial, opts.seed, dir.as_deref())?;
        if let Some(dir) = &dir {
            let path = dir.join(RECORD_FILE);
            let text = serde_json::to_string_pretty(&record).expect("record serializes");
            fs::write(&path, text + "\n").map_err(io_err(&path))?;
        }
        let mut archive = shared.lock().unwrap();
        archive.records.push(record);
        archive
            .records
            .sort_by_key(|r| (order.get(r.task_id.as_str()).copied().unwrap_or(usize::MAX), r.trial));
        if let Some(out) = &opts.out_dir {
            archive.save(out)?;
        }
        Ok(())
    };
    execute(pending, opts.parallelism, run_one)?;
    let archive = shared.into_inner().unwrap();
    if let Some(out) = &opts.out_dir {
        archive.save(out)?;
    }
    Ok(archive)
}

#[cfg(feature = "parallel")]
fn execute<T, F>(items: Vec<T>, parallelism: Parallelism, f: F) -> Result<(), RunError>
where
    T: Send,
    F: Fn(T) -> Result<(), RunError> + Sync,
{
    use rayon::prelude::*;
    match parallelism {
        Parallelism::Sequential => items.into_iter().try_for_each(f),
        Parallelism::Parallel => items.into_par_iter().try_for_each(&f),
        Parallelism::Threads(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool builds")
            .install(|| items.into_par_iter().try_for_each(&f)),
    }
}

#[cfg(not(feature = "parallel"))]
fn execute<T, F>(items: Vec<T>, _parallelism: Parallelism, f: F) -> Result<(), RunError>
where
    T: Send,
    F: Fn(T) -> Result<(), RunError> + Sync,
{
    items.into_iter().try_for_each(f)
}

/// Agent reached over HTTP: each step POSTs the observation as JSON and
/// expects one `ActionCommand` back.
pub struct RemoteAgent {
    endpoint: String,
    http: ureq::Agent,
}

impl RemoteAgent {
    pub fn new(endpoint: &str) -> Self {
        Self::with_timeout(endpoint, DEFAULT_STEP_TIMEOUT)
    }

    pub fn with_timeout(endpoint: &str, step_timeout: Duration) -> Self {
        let config = ureq::Agent::config_builder().timeout_global(Some(step_timeout)).build();
        RemoteAgent {
            endpoint: endpoint.to_string(),
            http: config.into(),
        }
    }
}

/// One request/response exchange with a remote agent.
pub fn remote_agent_step(http: &ureq::Agent, endpoint: &str, obs: &Observation) -> Result<ActionCommand, AgentError> {
    let mut resp = http
        .post(endpoint)
        .send_json(obs)
        .map_err(|e| AgentError::Transport(e.to_string()))?;
    let value: serde_json::Value = resp
        .body_mut()
        .read_json()
        .map_err(|e| AgentError::Malformed(e.to_string()))?;
    let cmd: ActionCommand = serde_json::from_value(value).map_err(|e| AgentError::Malformed(e.to_string()))?;
    cmd.validate().map_err(|e| AgentError::Malformed(e.to_string()))?;
    Ok(cmd)
}

struct RemoteSession<'a> {
    agent: &'a RemoteAgent,
}

impl AgentSession for RemoteSession<'_> {
    fn step(&mut self, obs: &Observation) -> Result<ActionCommand, AgentError> {
        remote_agent_step(&self.agent.http, &self.agent.endpoint, obs)
    }
}

impl Agent for RemoteAgent {
    fn identity(&self) -> AgentIdentity {
        AgentIdentity {
            name: self.endpoint.clone(),
            version: "remote".into(),
        }
    }

    fn clock(&self) -> Clock {
        Clock::Wall
    }

    fn start(&self, _task: TaskRef<'_>, _seed: u64) -> Box<dyn AgentSession + '_> {
        Box::new(RemoteSession { agent: self })
    }
}
