//! Streaming parser for newline-delimited JSON event archives.
//!
//! Each line holds one event object (`id`, `type`, `actor`, `repo`,
//! `payload`, `public`, `created_at`). Files may be plain or gzip-compressed
//! (multi-member gzip streams included); compression is detected from the
//! leading magic bytes, not the file name. Malformed lines never abort a
//! stream — they are counted, with line numbers, in a [`SkipReport`].
//!
//! Parsing is single-pass: memory use is bounded by one line (capped) plus
//! constant state, so arbitrarily large archives stream through.

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use flate2::bufread::MultiGzDecoder;
use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::model::RepoEvent;

/// Default cap on a single line; longer lines are skipped, not buffered.
pub const DEFAULT_MAX_LINE_BYTES: usize = 16 * 1024 * 1024;
/// How many skipped-line details are retained verbatim per report.
const MAX_SKIP_DETAILS: usize = 64;

/// Outcome counters for one parsed stream.
#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize)]
pub struct SkipReport {
    pub lines_total: u64,
    pub events_parsed: u64,
    pub lines_skipped: u64,
    /// Line numbers and reasons for the first few skips.
    pub details: Vec<SkippedLine>,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct SkippedLine {
    pub line: u64,
    pub reason: String,
}

impl SkipReport {
    fn record(&mut self, line: u64, reason: impl Into<String>) {
        self.lines_skipped += 1;
        if self.details.len() < MAX_SKIP_DETAILS {
            self.details.push(SkippedLine {
                line,
                reason: reason.into(),
            });
        }
    }

    /// Merge `other` (from a later shard) into `self`, renumbering its lines
    /// to follow on from this report's last line.
    fn absorb(&mut self, other: SkipReport) {
        let base = self.lines_total;
        self.lines_total += other.lines_total;
        self.events_parsed += other.events_parsed;
        self.lines_skipped += other.lines_skipped;
        for mut d in other.details {
            if self.details.len() >= MAX_SKIP_DETAILS {
                break;
            }
            d.line += base;
            self.details.push(d);
        }
    }
}

/// Pull-based event stream over any buffered reader.
pub struct EventStream<R> {
    reader: R,
    label: PathBuf,
    buf: Vec<u8>,
    line_no: u64,
    max_line_bytes: usize,
    report: SkipReport,
}

impl<R: BufRead> EventStream<R> {
    pub fn new(reader: R) -> Self {
        Self::with_label(reader, "<stream>")
    }

    /// `label` names the source in fatal I/O errors.
    pub fn with_label(reader: R, label: impl Into<PathBuf>) -> Self {
        Self {
            reader,
            label: label.into(),
            buf: Vec::new(),
            line_no: 0,
            max_line_bytes: DEFAULT_MAX_LINE_BYTES,
            report: SkipReport::default(),
        }
    }

    pub fn with_max_line_bytes(mut self, cap: usize) -> Self {
        self.max_line_bytes = cap.max(2);
        self
    }

    /// Next well-formed event, or `None` at end of stream. Malformed lines
    /// are recorded and passed over; only unreadable input is fatal.
    pub fn next_event(&mut self) -> Result<Option<RepoEvent>> {
        loop {
            self.buf.clear();
            let n = (&mut self.reader)
                .take(self.max_line_bytes as u64)
                .read_until(b'\n', &mut self.buf)
                .map_err(|e| Error::io(self.label.clone(), e))?;
            if n == 0 {
                return Ok(None);
            }
            self.line_no += 1;
            self.report.lines_total += 1;

            if self.buf.last() != Some(&b'\n') && n == self.max_line_bytes {
                // Oversized line: drain the remainder without buffering it.
                self.discard_to_newline()?;
                self.report.record(
                    self.line_no,
                    format!("line exceeds {} bytes", self.max_line_bytes),
                );
                continue;
            }

            while matches!(self.buf.last(), Some(b'\n') | Some(b'\r')) {
                self.buf.pop();
            }
            if self.buf.iter().all(u8::is_ascii_whitespace) {
                self.report.record(self.line_no, "blank line");
                continue;
            }

            match parse_event_line(&self.buf) {
                Ok(event) => {
                    self.report.events_parsed += 1;
                    return Ok(Some(event));
                }
                Err(reason) => {
                    self.report.record(self.line_no, reason);
                }
            }
        }
    }

    fn discard_to_newline(&mut self) -> Result<()> {
        let mut chunk = [0u8; 8192];
        loop {
            let available = self
                .reader
                .fill_buf()
                .map_err(|e| Error::io(self.label.clone(), e))?;
            if available.is_empty() {
                return Ok(());
            }
            if let Some(pos) = available.iter().position(|&b| b == b'\n') {
                self.reader.consume(pos + 1);
                return Ok(());
            }
            let len = available.len().min(chunk.len());
            chunk[..len].copy_from_slice(&available[..len]);
            self.reader.consume(len);
        }
    }

    /// Counters accumulated so far; final once `next_event` returns `None`.
    pub fn report(&self) -> &SkipReport {
        &self.report
    }

    pub fn into_report(self) -> SkipReport {
        self.report
    }
}

/// Parse one event line. Returns a human-readable reason on failure.
fn parse_event_line(line: &[u8]) -> std::result::Result<RepoEvent, String> {
    let raw: RawEvent = serde_json::from_slice(line).map_err(|e| e.to_string())?;
    if raw.id.is_empty() {
        return Err("empty event id".into());
    }
    if raw.event_type.is_empty() {
        return Err("empty event type".into());
    }
    if raw.repo.name.is_empty() {
        return Err("empty repo name".into());
    }
    let created_at = DateTime::parse_from_rfc3339(&raw.created_at)
        .map_err(|e| format!("bad created_at {:?}: {e}", raw.created_at))?
        .with_timezone(&Utc);
    let push_size = if raw.event_type == "PushEvent" {
        raw.payload
            .and_then(|p| p.size)
            .and_then(|s| u32::try_from(s).ok())
    } else {
        None
    };
    Ok(RepoEvent {
        event_id: raw.id,
        event_type: raw.event_type,
        repo_name: raw.repo.name,
        actor_id: raw.actor.map(|a| a.identity()).unwrap_or_default(),
        created_at,
        public: raw.public,
        push_size,
    })
}

#[derive(Deserialize)]
struct RawEvent {
    id: String,
    #[serde(rename = "type")]
    event_type: String,
    actor: Option<RawActor>,
    repo: RawRepo,
    payload: Option<RawPayload>,
    #[serde(default = "default_true")]
    public: bool,
    created_at: String,
}

fn default_true() -> bool {
    true
}

#[derive(Deserialize)]
struct RawActor {
    id: Option<IdValue>,
    login: Option<String>,
}

impl RawActor {
    fn identity(self) -> String {
        match (self.id, self.login) {
            (Some(IdValue::Num(n)), _) => n.to_string(),
            (Some(IdValue::Str(s)), _) if !s.is_empty() => s,
            (_, Some(login)) => login,
            _ => String::new(),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum IdValue {
    Num(i64),
    Str(String),
}

#[derive(Deserialize)]
struct RawRepo {
    name: String,
}

#[derive(Deserialize)]
struct RawPayload {
    size: Option<i64>,
}

/// Open an event file, transparently decoding gzip (detected by magic
/// bytes, so misnamed files still work; concatenated members are handled).
pub fn open_event_reader(path: &Path) -> Result<Box<dyn BufRead + Send>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::with_capacity(256 * 1024, file);
    let head = reader.fill_buf().map_err(|e| Error::io(path, e))?;
    if head.starts_with(&[0x1f, 0x8b]) {
        Ok(Box::new(BufReader::with_capacity(
            256 * 1024,
            MultiGzDecoder::new(reader),
        )))
    } else {
        Ok(Box::new(reader))
    }
}

/// Parse one file into memory. For corpora too large to hold, drive
/// [`EventStream`] directly instead.
pub fn read_events_from_path(path: &Path) -> Result<(Vec<RepoEvent>, SkipReport)> {
    let mut stream = EventStream::with_label(open_event_reader(path)?, path);
    let mut events = Vec::new();
    while let Some(event) = stream.next_event()? {
        events.push(event);
    }
    Ok((events, stream.into_report()))
}

/// Parse several hourly files, in parallel, concatenating results in the
/// given path order so the output is independent of scheduling.
pub fn read_events_from_paths(paths: &[PathBuf]) -> Result<(Vec<RepoEvent>, SkipReport)> {
    let shards: Vec<(Vec<RepoEvent>, SkipReport)> = paths
        .par_iter()
        .map(|p| read_events_from_path(p))
        .collect::<Result<_>>()?;
    let mut events = Vec::new();
    let mut report = SkipReport::default();
    for (shard_events, shard_report) in shards {
        events.extend(shard_events);
        report.absorb(shard_report);
    }
    Ok((events, report))
}
