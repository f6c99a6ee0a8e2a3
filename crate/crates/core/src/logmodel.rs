//! Interaction log grammar and the per-session append-only log store.
//!
//! The canonical form of an entry is a single line `<ref> // <payload>`.
//! Sequence numbers, timestamps and the element key live in a `.meta`
//! sidecar next to the `.log` file, one JSON record per line.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::taxonomy::{parse_ref, Action, LogRef};

pub const SEPARATOR: &str = " // ";
pub const DEFAULT_DEBOUNCE: Duration = Duration::from_millis(500);

#[derive(Debug, Error)]
pub enum LogError {
    #[error("malformed log line {0:?}")]
    MalformedLine(String),
    #[error("unknown session {0:?}")]
    UnknownSession(String),
    #[error("session {0:?} already exists")]
    DuplicateSession(String),
    #[error("payload contains a line break")]
    InvalidPayload,
    #[error("log sidecar does not match log file: {0}")]
    Sidecar(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogEntry {
    pub seq: u64,
    pub at_ms: u64,
    #[serde(rename = "ref")]
    pub target: LogRef,
    pub payload: String,
    /// Element the entry came from; debounce groups on it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element: Option<String>,
}

impl LogEntry {
    pub fn new(target: LogRef, payload: impl Into<String>) -> Self {
        LogEntry {
            seq: 0,
            at_ms: 0,
            target,
            payload: payload.into(),
            element: None,
        }
    }

    pub fn line(&self) -> String {
        format_line(self)
    }

    pub fn is_nav(&self) -> bool {
        self.target.is_nav()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogStream {
    pub session_id: String,
    pub entries: Vec<LogEntry>,
}

impl LogStream {
    pub fn new(session_id: impl Into<String>, entries: Vec<LogEntry>) -> Self {
        LogStream {
            session_id: session_id.into(),
            entries,
        }
    }

    pub fn lines(&self) -> Vec<String> {
        self.entries.iter().map(format_line).collect()
    }

    pub fn non_nav(&self) -> impl Iterator<Item = &LogEntry> {
        self.entries.iter().filter(|e| !e.is_nav())
    }

    pub fn navs(&self) -> impl Iterator<Item = &LogEntry> {
        self.entries.iter().filter(|e| e.is_nav())
    }

    /// Prefix of the stream holding at most `n` non-nav entries.
    pub fn truncated_to_interactions(&self, n: usize) -> LogStream {
        let mut seen = 0;
        let mut entries = Vec::new();
        for e in &self.entries {
            if !e.is_nav() {
                if seen == n {
                    break;
                }
                seen += 1;
            }
            entries.push(e.clone());
        }
        LogStream::new(self.session_id.clone(), entries)
    }
}

pub fn format_line(entry: &LogEntry) -> String {
    format_parts(entry.target, &entry.payload)
}

pub fn format_parts(target: LogRef, payload: &str) -> String {
    format!("{target}{SEPARATOR}{payload}")
}

/// Parses a canonical line back into its reference and payload.
pub fn parse_line(line: &str) -> Result<(LogRef, String), LogError> {
    let malformed = || LogError::MalformedLine(line.to_string());
    if line.contains(['\n', '\r']) {
        return Err(malformed());
    }
    let (head, payload) = line.split_once(SEPARATOR).ok_or_else(malformed)?;
    let target = parse_ref(head).map_err(|_| malformed())?;
    Ok((target, payload.to_string()))
}

fn debounce_key(entry: &LogEntry) -> Option<(LogRef, String)> {
    let r = entry.target.interaction()?;
    if r.action() != Action::Type {
        return None;
    }
    let key = match &entry.element {
        Some(el) => el.clone(),
        None => entry
            .payload
            .split_once('=')
            .map(|(label, _)| label.to_string())
            .unwrap_or_default(),
    };
    Some((entry.target, key))
}

/// Collapses bursts of typed input on the same element into their final value.
///
/// Two adjacent type entries on the same element merge when their `at_ms`
/// gap is below `window`; the later entry survives.
pub fn debounce_type_entries(stream: &LogStream, window: Duration) -> LogStream {
    let window_ms = window.as_millis() as u64;
    let mut out: Vec<LogEntry> = Vec::with_capacity(stream.entries.len());
    for entry in &stream.entries {
        if let (Some(prev), Some(key)) = (out.last(), debounce_key(entry)) {
            if debounce_key(prev).as_ref() == Some(&key) && entry.at_ms.saturating_sub(prev.at_ms) < window_ms {
                *out.last_mut().unwrap() = entry.clone();
                continue;
            }
        }
        out.push(entry.clone());
    }
    LogStream::new(stream.session_id.clone(), out)
}

#[derive(Serialize, Deserialize)]
struct MetaRecord {
    seq: u64,
    at_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    element: Option<String>,
}

struct SessionFiles {
    log: File,
    meta: File,
}

struct SessionLog {
    entries: Vec<LogEntry>,
    files: Option<SessionFiles>,
}

/// Append-only store of per-session interaction logs.
///
/// Appends to one session are serialized by that session's lock; distinct
/// sessions append concurrently.
#[derive(Default)]
pub struct LogStore {
    sessions: RwLock<HashMap<String, Arc<Mutex<SessionLog>>>>,
}

pub fn log_file_path(dir: &Path, session_id: &str) -> PathBuf {
    dir.join(format!("{session_id}.log"))
}

pub fn meta_file_path(dir: &Path, session_id: &str) -> PathBuf {
    dir.join(format!("{session_id}.meta"))
}

impl LogStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Opens a session. With `dir`, entries are also written to
    /// `<dir>/<session_id>.log` and `.meta`, truncating earlier contents.
    pub fn open_session(&self, session_id: &str, dir: Option<&Path>) -> Result<(), LogError> {
        let mut sessions = self.sessions.write().unwrap();
        if sessions.contains_key(session_id) {
            return Err(LogError::DuplicateSession(session_id.to_string()));
        }
        let files = match dir {
            Some(dir) => {
                fs::create_dir_all(dir)?;
                let open = |p: PathBuf| OpenOptions::new().create(true).write(true).truncate(true).open(p);
                Some(SessionFiles {
                    log: open(log_file_path(dir, session_id))?,
                    meta: open(meta_file_path(dir, session_id))?,
                })
            }
            None => None,
        };
        sessions.insert(
            session_id.to_string(),
            Arc::new(Mutex::new(SessionLog {
                entries: Vec::new(),
                files,
            })),
        );
        Ok(())
    }

    fn session(&self, session_id: &str) -> Result<Arc<Mutex<SessionLog>>, LogError> {
        self.sessions
            .read()
            .unwrap()
            .get(session_id)
            .cloned()
            .ok_or_else(|| LogError::UnknownSession(session_id.to_string()))
    }

    /// Appends an entry and returns its sequence number (starting at 1).
    ///
    /// `seq` and `at_ms` on the passed entry are ignored; the store assigns
    /// the next sequence number and clamps time to be non-decreasing.
    pub fn append(&self, session_id: &str, mut entry: LogEntry) -> Result<u64, LogError> {
        if entry.payload.contains(['\n', '\r']) {
            return Err(LogError::InvalidPayload);
        }
        let session = self.session(session_id)?;
        let mut log = session.lock().unwrap();
        let (last_seq, last_at) = log.entries.last().map(|e| (e.seq, e.at_ms)).unwrap_or((0, 0));
        entry.seq = last_seq + 1;
        entry.at_ms = entry.at_ms.max(last_at);
        if let Some(files) = log.files.as_mut() {
            writeln!(files.log, "{}", format_line(&entry))?;
            let meta = MetaRecord {
                seq: entry.seq,
                at_ms: entry.at_ms,
                element: entry.element.clone(),
            };
            writeln!(files.meta, "{}", serde_json::to_string(&meta).expect("meta serializes"))?;
            files.log.flush()?;
            files.meta.flush()?;
        }
        let seq = entry.seq;
        log.entries.push(entry);
        Ok(seq)
    }

    pub fn stream(&self, session_id: &str) -> Result<LogStream, LogError> {
        let session = self.session(session_id)?;
        let log = session.lock().unwrap();
        Ok(LogStream::new(session_id, log.entries.clone()))
    }

    /// Closes a session and returns its final stream; later appends fail.
    pub fn close_session(&self, session_id: &str) -> Result<LogStream, LogError> {
        let session = self
            .sessions
            .write()
            .unwrap()
            .remove(session_id)
            .ok_or_else(|| LogError::UnknownSession(session_id.to_string()))?;
        let log = session.lock().unwrap();
        if let Some(files) = &log.files {
            files.log.sync_data()?;
            files.meta.sync_data()?;
        }
        Ok(LogStream::new(session_id, log.entries.clone()))
    }
}

/// Reads a session back from its `.log` file and `.meta` sidecar.
pub fn read_session_files(dir: &Path, session_id: &str) -> Result<LogStream, LogError> {
    let log = fs::read_to_string(log_file_path(dir, session_id))?;
    let meta = fs::read_to_string(meta_file_path(dir, session_id))?;
    let lines: Vec<&str> = log.lines().collect();
    let metas: Vec<&str> = meta.lines().collect();
    if lines.len() != metas.len() {
        return Err(LogError::Sidecar(format!(
            "{} lines vs {} records",
            lines.len(),
            metas.len()
        )));
    }
    let mut entries = Vec::with_capacity(lines.len());
    for (line, meta) in lines.into_iter().zip(metas) {
        let (target, payload) = parse_line(line)?;
        let meta: MetaRecord = serde_json::from_str(meta).map_err(|e| LogError::Sidecar(e.to_string()))?;
        entries.push(LogEntry {
            seq: meta.seq,
            at_ms: meta.at_ms,
            target,
            payload,
            element: meta.element,
        });
    }
    Ok(LogStream::new(session_id, entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taxonomy::refs;
    use proptest::prelude::*;

    fn typed(payload: &str, at_ms: u64) -> LogEntry {
        LogEntry {
            seq: 0,
            at_ms,
            target: refs::TYPE_TEXT.into(),
            payload: payload.into(),
            element: Some("name".into()),
        }
    }

    #[test]
    fn format_examples() {
        let e = LogEntry::new(refs::CLICK_ICON_BUTTON.into(), "Search");
        assert_eq!(format_line(&e), "click/iconbutton // Search");
        let e = LogEntry::new(LogRef::Navigation, "/thanks?cart=x");
        assert_eq!(format_line(&e), "nav // /thanks?cart=x");
        let e = LogEntry::new(refs::TYPE_TEXT.into(), "Name=John Doe");
        assert_eq!(format_line(&e), "type/text // Name=John Doe");
    }

    #[test]
    fn parse_examples() {
        assert_eq!(
            parse_line("click/iconbutton // Search").unwrap(),
            (refs::CLICK_ICON_BUTTON.into(), "Search".to_string())
        );
        assert_eq!(
            parse_line("nav // /search?query=macbook").unwrap(),
            (LogRef::Navigation, "/search?query=macbook".to_string())
        );
        assert!(matches!(parse_line("garbage"), Err(LogError::MalformedLine(_))));
        assert!(matches!(parse_line("zoom/pinch // x"), Err(LogError::MalformedLine(_))));
        // payloads may themselves contain the separator
        assert_eq!(parse_line("type/text // a // b").unwrap().1, "a // b".to_string());
    }

    #[test]
    fn debounce_examples() {
        let s = LogStream::new("s", vec![typed("Name=Jo", 0), typed("Name=John", 200)]);
        let d = debounce_type_entries(&s, DEFAULT_DEBOUNCE);
        assert_eq!(d.lines(), vec!["type/text // Name=John"]);

        let s = LogStream::new("s", vec![typed("Name=Jo", 0), typed("Name=John", 800)]);
        assert_eq!(debounce_type_entries(&s, DEFAULT_DEBOUNCE).entries.len(), 2);

        let empty = LogStream::new("s", vec![]);
        assert!(debounce_type_entries(&empty, DEFAULT_DEBOUNCE).entries.is_empty());
    }

    #[test]
    fn debounce_leaves_other_entries_alone() {
        let mut other = typed("Email=a", 100);
        other.element = Some("email".into());
        let click = LogEntry {
            at_ms: 50,
            ..LogEntry::new(refs::CLICK_BUTTON.into(), "Submit")
        };
        let s = LogStream::new(
            "s",
            vec![
                typed("Name=J", 0),
                other.clone(),
                typed("Name=Jo", 150),
                click.clone(),
                typed("Name=Joe", 160),
            ],
        );
        let d = debounce_type_entries(&s, DEFAULT_DEBOUNCE);
        assert_eq!(d.entries.len(), 5);
    }

    #[test]
    fn store_assigns_gapless_seqs_and_persists() {
        let dir = tempfile::tempdir().unwrap();
        let store = LogStore::new();
        store.open_session("s1", Some(dir.path())).unwrap();
        let a = store
            .append("s1", LogEntry::new(refs::CLICK_BUTTON.into(), "Submit"))
            .unwrap();
        let b = store.append("s1", LogEntry::new(LogRef::Navigation, "/next")).unwrap();
        assert_eq!((a, b), (1, 2));
        let text = fs::read_to_string(log_file_path(dir.path(), "s1")).unwrap();
        assert_eq!(text, "click/button // Submit\nnav // /next\n");
        let back = read_session_files(dir.path(), "s1").unwrap();
        assert_eq!(back, store.stream("s1").unwrap());
    }

    #[test]
    fn closed_or_missing_session_rejected() {
        let store = LogStore::new();
        store.open_session("s", None).unwrap();
        store.close_session("s").unwrap();
        let err = store
            .append("s", LogEntry::new(refs::CLICK_BUTTON.into(), "x"))
            .unwrap_err();
        assert!(matches!(err, LogError::UnknownSession(_)));
        assert!(matches!(
            store.open_session("t", None).and(store.open_session("t", None)),
            Err(LogError::DuplicateSession(_))
        ));
    }

    #[test]
    fn newline_payload_rejected() {
        let store = LogStore::new();
        store.open_session("s", None).unwrap();
        assert!(matches!(
            store.append("s", LogEntry::new(refs::TYPE_TEXT.into(), "a\nb")),
            Err(LogError::InvalidPayload)
        ));
    }

    #[test]
    fn timestamps_never_decrease() {
        let store = LogStore::new();
        store.open_session("s", None).unwrap();
        store.append("s", typed("Name=a", 500)).unwrap();
        store.append("s", typed("Name=b", 100)).unwrap();
        let s = store.stream("s").unwrap();
        assert_eq!(s.entries[1].at_ms, 500);
    }

    #[test]
    fn truncation_counts_interactions_only() {
        let s = LogStream::new(
            "s",
            vec![
                LogEntry::new(refs::CLICK_LINK.into(), "a"),
                LogEntry::new(LogRef::Navigation, "/x"),
                LogEntry::new(refs::CLICK_LINK.into(), "b"),
                LogEntry::new(refs::CLICK_LINK.into(), "c"),
            ],
        );
        assert_eq!(s.truncated_to_interactions(2).entries.len(), 3);
    }

    fn arb_entries() -> impl Strategy<Value = Vec<LogEntry>> {
        let refs: Vec<LogRef> = crate::taxonomy::canonical_registry().refs().map(LogRef::from).collect();
        prop::collection::vec(
            (
                prop::sample::select(refs),
                0u64..2000,
                prop::sample::select(vec!["a", "b"]),
                "[a-z]{0,4}",
            ),
            0..30,
        )
        .prop_map(|items| {
            let mut at = 0;
            items
                .into_iter()
                .map(|(target, gap, el, val)| {
                    at += gap;
                    LogEntry {
                        seq: 0,
                        at_ms: at,
                        target,
                        payload: format!("{el}={val}"),
                        element: Some(el.to_string()),
                    }
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn debounce_is_idempotent(entries in arb_entries()) {
            let s = LogStream::new("s", entries);
            let once = debounce_type_entries(&s, DEFAULT_DEBOUNCE);
            let twice = debounce_type_entries(&once, DEFAULT_DEBOUNCE);
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn store_reads_back_n_lines(n in 0usize..40) {
            let dir = tempfile::tempdir().unwrap();
            let store = LogStore::new();
            store.open_session("p", Some(dir.path())).unwrap();
            for i in 0..n {
                store.append("p", LogEntry::new(refs::CLICK_BUTTON.into(), format!("b{i}"))).unwrap();
            }
            let back = read_session_files(dir.path(), "p").unwrap();
            prop_assert_eq!(back.entries.len(), n);
            for (i, e) in back.entries.iter().enumerate() {
                prop_assert_eq!(e.seq, i as u64 + 1);
            }
        }
    }
}
