//! Deterministic page-state machine for individual task pages and the
//! shopping playground.
//!
//! All page state lives in the location string: in-page changes (typing,
//! toggling, opening a dialog) rewrite the current query without a
//! navigation entry, while page changes emit a `nav` log line right after
//! the interaction that caused them. Rendering is a pure function of
//! `(task, location)`.

mod catalog;
mod forms;
mod individual;
mod page;
mod query;
mod shop;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock, TryLockError};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use catalog::{
    cart_json, catalog, decode_cart, decode_shipping, encode_cart, encode_shipping, find_item, search_catalog,
    CartState, CatalogItem, CustomizationGroup, ShippingAddress,
};
pub use page::{escape, Control, ElementManifest, PageDoc};
pub use query::{decode_component, encode_component, Location};

use crate::logmodel::{LogEntry, LogError, LogStore, LogStream};
use crate::tasks::{Suite, TaskRef};
use crate::taxonomy::{refs, InteractionRef, LogRef};
use page::PageBuilder;

pub type FieldMap = BTreeMap<String, String>;

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("unknown task {0:?}")]
    UnknownTask(String),
    #[error("unknown session {0:?}")]
    UnknownSession(String),
    #[error("no page at {0:?}")]
    NotFound(String),
    #[error("no element {0:?} on this page")]
    UnknownElement(String),
    #[error("verb {verb} does not apply to element {element:?}")]
    IncompatibleVerb { verb: Verb, element: String },
    #[error("malformed command: {0}")]
    MalformedCommand(String),
    #[error("invalid payload {0:?}")]
    InvalidPayload(String),
    #[error("malformed cart")]
    MalformedCart,
    #[error("malformed shipping address")]
    MalformedShipping,
    #[error("session is busy with another action")]
    Busy,
    #[error(transparent)]
    Log(#[from] LogError),
}

impl EnvError {
    /// Errors caused by what the agent asked for, as opposed to harness faults.
    pub fn is_agent_fault(&self) -> bool {
        matches!(
            self,
            EnvError::NotFound(_)
                | EnvError::UnknownElement(_)
                | EnvError::IncompatibleVerb { .. }
                | EnvError::MalformedCommand(_)
                | EnvError::InvalidPayload(_)
                | EnvError::MalformedCart
                | EnvError::MalformedShipping
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verb {
    Click,
    Type,
    Select,
    Hover,
    Drag,
    Navigate,
    Submit,
    Stop,
}

impl fmt::Display for Verb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("verb serializes");
        f.write_str(s.as_str().unwrap_or("?"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionCommand {
    pub verb: Verb,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload: Option<String>,
}

impl ActionCommand {
    fn new(verb: Verb, target: Option<&str>, payload: Option<&str>) -> Self {
        ActionCommand {
            verb,
            target: target.map(str::to_string),
            payload: payload.map(str::to_string),
        }
    }

    pub fn click(target: &str) -> Self {
        Self::new(Verb::Click, Some(target), None)
    }

    pub fn type_text(target: &str, text: &str) -> Self {
        Self::new(Verb::Type, Some(target), Some(text))
    }

    pub fn select(target: &str, option: &str) -> Self {
        Self::new(Verb::Select, Some(target), Some(option))
    }

    pub fn hover(target: &str) -> Self {
        Self::new(Verb::Hover, Some(target), None)
    }

    pub fn drag(target: &str, value: i64) -> Self {
        Self::new(Verb::Drag, Some(target), Some(&value.to_string()))
    }

    pub fn navigate(path: &str) -> Self {
        Self::new(Verb::Navigate, None, Some(path))
    }

    pub fn submit(target: &str) -> Self {
        Self::new(Verb::Submit, Some(target), None)
    }

    pub fn stop() -> Self {
        Self::new(Verb::Stop, None, None)
    }

    /// Checks verb/target/payload compatibility.
    pub fn validate(&self) -> Result<(), EnvError> {
        let bad = |m: &str| Err(EnvError::MalformedCommand(format!("{}: {m}", self.verb)));
        match self.verb {
            Verb::Click | Verb::Hover | Verb::Submit => {
                if self.target.is_none() {
                    return bad("target required");
                }
                if self.payload.is_some() {
                    return bad("payload not allowed");
                }
            }
            Verb::Type | Verb::Select | Verb::Drag => {
                if self.target.is_none() {
                    return bad("target required");
                }
                if self.payload.is_none() {
                    return bad("payload required");
                }
            }
            Verb::Navigate => {
                if self.target.is_some() {
                    return bad("target not allowed");
                }
                if self.payload.is_none() {
                    return bad("path required");
                }
            }
            Verb::Stop => {}
        }
        if self.payload.as_deref().is_some_and(|p| p.contains(['\n', '\r'])) {
            return bad("payload contains a line break");
        }
        Ok(())
    }
}

/// Operation handed to a page once the command has been validated against
/// the element's control type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Op {
    Click,
    Type(String),
    Select(String),
    Drag(i64),
    Hover,
}

#[derive(Debug, Clone)]
pub(crate) struct Emit {
    target: InteractionRef,
    payload: String,
    element: Option<String>,
}

#[derive(Debug, Clone)]
pub(crate) struct Transition {
    next: Location,
    emits: Vec<Emit>,
    navigate: bool,
    submitted: Option<FieldMap>,
}

impl Transition {
    pub fn stay(next: Location) -> Self {
        Transition {
            next,
            emits: Vec::new(),
            navigate: false,
            submitted: None,
        }
    }

    pub fn go(next: Location) -> Self {
        Transition {
            navigate: true,
            ..Self::stay(next)
        }
    }

    /// Logs `el.kind // payload` attributed to `el`.
    pub fn log(mut self, el: &ElementManifest, payload: impl Into<String>) -> Self {
        self.emits.push(Emit {
            target: el.kind,
            payload: payload.into(),
            element: Some(el.element_id.clone()),
        });
        self
    }

    /// Logs `el.kind // el.label`.
    pub fn log_label(self, el: &ElementManifest) -> Self {
        let label = el.label.clone();
        self.log(el, label)
    }

    /// Composite (informational) entry not tied to a single element.
    pub fn composite(mut self, target: InteractionRef, payload: impl Into<String>) -> Self {
        self.emits.push(Emit {
            target,
            payload: payload.into(),
            element: None,
        });
        self
    }

    pub fn submit(mut self, fields: FieldMap) -> Self {
        self.submitted = Some(fields);
        self
    }
}

pub(crate) trait Page {
    fn render(&self, loc: &Location) -> Result<PageBuilder, EnvError>;
    fn act(&self, loc: &Location, el: &ElementManifest, op: &Op) -> Result<Transition, EnvError>;
}

/// What kind of site a session's task lives on.
#[derive(Debug, Clone)]
pub(crate) enum Site {
    /// A single individual-task page family: `path?test=<variant>`.
    Individual { path: String, test: String },
    /// The shopping playground; `final_path` is the task's terminal page.
    Shop { final_path: String },
}

impl Site {
    fn for_task(task: TaskRef<'_>) -> Site {
        match task {
            TaskRef::Individual(t) => {
                let loc = Location::parse(&t.start_path).expect("start paths are valid");
                Site::Individual {
                    path: loc.path().to_string(),
                    test: loc.get("test").unwrap_or_default().to_string(),
                }
            }
            TaskRef::E2E(t) => Site::Shop {
                final_path: t.verifier.path.clone(),
            },
        }
    }

    fn page(&self, loc: &Location) -> Result<Box<dyn Page>, EnvError> {
        let not_found = || EnvError::NotFound(loc.to_string());
        match self {
            Site::Individual { path, test } => {
                if loc.path() != path || loc.get("test") != Some(test.as_str()) {
                    return Err(not_found());
                }
                individual::page(path, test).ok_or_else(not_found)
            }
            Site::Shop { final_path } => shop::page(loc.path(), final_path).ok_or_else(not_found),
        }
    }

    fn render(&self, loc: &Location) -> Result<PageDoc, EnvError> {
        Ok(self.page(loc)?.render(loc)?.finish(loc.to_string()))
    }

    fn is_final(&self, loc: &Location) -> bool {
        matches!(self, Site::Shop { final_path } if loc.path() == final_path)
    }
}

/// Renders a page for `task_id` from its location alone.
pub fn render_for_task(suite: &Suite, task_id: &str, path: &str) -> Result<PageDoc, EnvError> {
    let task = suite
        .task(task_id)
        .ok_or_else(|| EnvError::UnknownTask(task_id.to_string()))?;
    let loc = Location::parse(path).ok_or_else(|| EnvError::NotFound(path.to_string()))?;
    Site::for_task(task).render(&loc)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionInfo {
    pub session_id: String,
    pub start_path: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionOutcome {
    pub new_path: String,
    pub emitted: Vec<LogEntry>,
    pub done: bool,
}

/// Observable end state of a session, used by success criteria.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinalState {
    pub path: String,
    pub element_states: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub submitted: Option<FieldMap>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionResult {
    pub session_id: String,
    pub task_id: String,
    pub done: bool,
    pub state: FinalState,
    pub log: LogStream,
}

#[derive(Debug, Clone, Default)]
pub struct SessionOptions {
    /// Explicit session id; generated when absent.
    pub session_id: Option<String>,
    /// Directory for the `.log`/`.meta` files; memory only when absent.
    pub log_dir: Option<PathBuf>,
}

struct Session {
    task_id: String,
    site: Site,
    location: Location,
    done: bool,
    submitted: Option<FieldMap>,
    created: Instant,
}

/// Owns sessions and their logs. Sessions are independent; actions within a
/// session are serialized and a concurrent second call fails with `Busy`.
pub struct Environment {
    suite: Arc<Suite>,
    logs: LogStore,
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    counter: AtomicU64,
}

impl Environment {
    pub fn new(suite: Arc<Suite>) -> Self {
        Environment {
            suite,
            logs: LogStore::new(),
            sessions: RwLock::new(HashMap::new()),
            counter: AtomicU64::new(0),
        }
    }

    pub fn suite(&self) -> &Suite {
        &self.suite
    }

    pub fn create_session(&self, task_id: &str) -> Result<SessionInfo, EnvError> {
        self.create_session_with(task_id, SessionOptions::default())
    }

    pub fn create_session_with(&self, task_id: &str, opts: SessionOptions) -> Result<SessionInfo, EnvError> {
        let task = self
            .suite
            .task(task_id)
            .ok_or_else(|| EnvError::UnknownTask(task_id.to_string()))?;
        let start_path = task.start_path().to_string();
        let location = Location::parse(&start_path).expect("start paths are valid");
        let session_id = opts
            .session_id
            .unwrap_or_else(|| format!("session-{}", self.counter.fetch_add(1, Ordering::Relaxed) + 1));
        self.logs.open_session(&session_id, opts.log_dir.as_deref())?;
        let session = Session {
            task_id: task_id.to_string(),
            site: Site::for_task(task),
            location,
            done: false,
            submitted: None,
            created: Instant::now(),
        };
        self.sessions
            .write()
            .unwrap()
            .insert(session_id.clone(), Arc::new(Mutex::new(session)));
        Ok(SessionInfo { session_id, start_path })
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, EnvError> {
        self.sessions
            .read()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| EnvError::UnknownSession(id.to_string()))
    }

    fn site(&self, id: &str) -> Result<Site, EnvError> {
        let session = self.session(id)?;
        let guard = session.lock().unwrap();
        Ok(guard.site.clone())
    }

    /// Renders `path` for the session's task. Side-effect free.
    pub fn render_page(&self, session_id: &str, path: &str) -> Result<PageDoc, EnvError> {
        let site = self.site(session_id)?;
        let loc = Location::parse(path).ok_or_else(|| EnvError::NotFound(path.to_string()))?;
        site.render(&loc)
    }

    pub fn current_path(&self, session_id: &str) -> Result<String, EnvError> {
        let session = self.session(session_id)?;
        let guard = session.lock().unwrap();
        Ok(guard.location.to_string())
    }

    pub fn current_page(&self, session_id: &str) -> Result<PageDoc, EnvError> {
        let session = self.session(session_id)?;
        let guard = session.lock().unwrap();
        guard.site.render(&guard.location)
    }

    /// Applies a command, timestamping its log entries by wall time since
    /// the session was created.
    pub fn apply_action(&self, session_id: &str, cmd: &ActionCommand) -> Result<ActionOutcome, EnvError> {
        self.apply(session_id, cmd, None)
    }

    /// Applies a command with an explicit log timestamp (virtual clocks).
    pub fn apply_action_at(
        &self,
        session_id: &str,
        cmd: &ActionCommand,
        at_ms: u64,
    ) -> Result<ActionOutcome, EnvError> {
        self.apply(session_id, cmd, Some(at_ms))
    }

    fn apply(&self, session_id: &str, cmd: &ActionCommand, at_ms: Option<u64>) -> Result<ActionOutcome, EnvError> {
        let session = self.session(session_id)?;
        let mut guard = match session.try_lock() {
            Ok(g) => g,
            Err(TryLockError::WouldBlock) => return Err(EnvError::Busy),
            Err(TryLockError::Poisoned(p)) => p.into_inner(),
        };
        cmd.validate()?;
        let at_ms = at_ms.unwrap_or_else(|| guard.created.elapsed().as_millis() as u64);
        if cmd.verb == Verb::Stop {
            return Ok(ActionOutcome {
                new_path: guard.location.to_string(),
                emitted: Vec::new(),
                done: guard.done,
            });
        }
        let transition = if cmd.verb == Verb::Navigate {
            let path = cmd.payload.as_deref().unwrap_or_default();
            let next = Location::parse(path).ok_or_else(|| EnvError::NotFound(path.to_string()))?;
            // terminal pages are only reachable through their form
            if guard.site.is_final(&next) {
                return Err(EnvError::NotFound(next.to_string()));
            }
            guard.site.render(&next)?;
            let mut t = Transition::go(next.clone());
            t.emits.push(Emit {
                target: refs::NAVIGATE_URL,
                payload: next.to_string(),
                element: None,
            });
            t
        } else {
            let page = guard.site.page(&guard.location)?;
            let doc = page.render(&guard.location)?.finish(guard.location.to_string());
            let target = cmd.target.as_deref().unwrap_or_default();
            let el = doc
                .element(target)
                .ok_or_else(|| EnvError::UnknownElement(target.to_string()))?;
            let op = op_for(cmd, el)?;
            if op == Op::Hover && el.control != Control::HoverTarget {
                Transition::stay(guard.location.clone())
            } else {
                page.act(&guard.location, el, &op)?
            }
        };

        let mut emitted = Vec::new();
        for emit in transition.emits {
            let entry = LogEntry {
                seq: 0,
                at_ms,
                target: emit.target.into(),
                payload: emit.payload,
                element: emit.element,
            };
            let seq = self.logs.append(session_id, entry.clone())?;
            emitted.push(LogEntry { seq, ..entry });
        }
        if transition.navigate {
            let entry = LogEntry {
                seq: 0,
                at_ms,
                target: LogRef::Navigation,
                payload: transition.next.to_string(),
                element: None,
            };
            let seq = self.logs.append(session_id, entry.clone())?;
            emitted.push(LogEntry { seq, ..entry });
        }
        if let Some(fields) = transition.submitted {
            guard.submitted = Some(fields);
        }
        if guard.site.is_final(&transition.next) {
            guard.done = true;
        }
        guard.location = transition.next;
        Ok(ActionOutcome {
            new_path: guard.location.to_string(),
            emitted,
            done: guard.done,
        })
    }

    /// Appends a log entry reported by an instrumented client.
    pub fn ingest_log(&self, session_id: &str, ref_path: &str, payload: &str, client_ms: u64) -> Result<u64, EnvError> {
        self.session(session_id)?;
        let target = crate::taxonomy::parse_ref(ref_path).map_err(|e| EnvError::InvalidPayload(e.to_string()))?;
        let entry = LogEntry {
            seq: 0,
            at_ms: client_ms,
            target,
            payload: payload.to_string(),
            element: None,
        };
        self.logs.append(session_id, entry).map_err(|e| match e {
            LogError::InvalidPayload => EnvError::InvalidPayload(payload.to_string()),
            other => other.into(),
        })
    }

    fn snapshot(&self, session_id: &str, session: &Session, log: LogStream) -> SessionResult {
        let doc = session.site.render(&session.location).ok();
        let element_states = doc
            .map(|d| d.elements.into_iter().map(|e| (e.element_id, e.state)).collect())
            .unwrap_or_default();
        SessionResult {
            session_id: session_id.to_string(),
            task_id: session.task_id.clone(),
            done: session.done,
            state: FinalState {
                path: session.location.to_string(),
                element_states,
                submitted: session.submitted.clone(),
            },
            log,
        }
    }

    pub fn result(&self, session_id: &str) -> Result<SessionResult, EnvError> {
        let session = self.session(session_id)?;
        let guard = session.lock().unwrap();
        let log = self.logs.stream(session_id)?;
        Ok(self.snapshot(session_id, &guard, log))
    }

    /// Ends a session, flushing its log files and returning its final state.
    pub fn close_session(&self, session_id: &str) -> Result<SessionResult, EnvError> {
        let session = self
            .sessions
            .write()
            .unwrap()
            .remove(session_id)
            .ok_or_else(|| EnvError::UnknownSession(session_id.to_string()))?;
        let guard = session.lock().unwrap();
        let log = self.logs.close_session(session_id)?;
        Ok(self.snapshot(session_id, &guard, log))
    }
}

fn op_for(cmd: &ActionCommand, el: &ElementManifest) -> Result<Op, EnvError> {
    let incompatible = || EnvError::IncompatibleVerb {
        verb: cmd.verb,
        element: el.element_id.clone(),
    };
    let payload = cmd.payload.clone().unwrap_or_default();
    match (cmd.verb, el.control) {
        (Verb::Hover, _) => Ok(Op::Hover),
        (Verb::Click, Control::Button | Control::Link | Control::Checkbox | Control::Switch) => Ok(Op::Click),
        (Verb::Submit, Control::Button) => Ok(Op::Click),
        (Verb::Type, Control::TextInput) => Ok(Op::Type(payload)),
        (Verb::Select, Control::Select) => {
            if el.options.contains(&payload) {
                Ok(Op::Select(payload))
            } else {
                Err(EnvError::InvalidPayload(payload))
            }
        }
        (Verb::Drag, Control::Slider) => payload
            .trim()
            .parse()
            .map(Op::Drag)
            .map_err(|_| EnvError::InvalidPayload(payload)),
        _ => Err(incompatible()),
    }
}

#[cfg(test)]
mod tests;
