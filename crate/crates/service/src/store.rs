use std::fs::{self, File, OpenOptions};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Result, ServiceError};
use crate::model::{Event, LoggedEvent, ProjectSpec, ProjectState};

pub const LOG_FILE: &str = "events.jsonl";
pub const SNAPSHOT_FILE: &str = "snapshot.json";
const SNAPSHOT_TMP: &str = "snapshot.json.tmp";

/// Events appended between snapshots unless configured otherwise.
pub const DEFAULT_SNAPSHOT_EVERY: usize = 64;

/// Append-only event log for one project, with periodic snapshots.
///
/// Each event is one JSON line, written and synced before the in-memory
/// state changes. Snapshots are written to a temporary file and renamed
/// into place. On open, the snapshot (if readable) is loaded and later
/// events replayed; an incomplete final line left by a crash is cut off.
pub struct ProjectStore {
    dir: PathBuf,
    log: File,
    /// Bytes of complete events in the log.
    len: u64,
    state: ProjectState,
    since_snapshot: usize,
    snapshot_every: usize,
}

fn corrupt(path: &Path, message: impl Into<String>) -> ServiceError {
    ServiceError::Corrupt {
        path: path.display().to_string(),
        message: message.into(),
    }
}

fn sync_dir(dir: &Path) -> Result<()> {
    // Directory fsync makes renames and new files durable on Unix.
    if cfg!(unix) {
        File::open(dir)?.sync_all()?;
    }
    Ok(())
}

impl ProjectStore {
    pub fn create(dir: impl Into<PathBuf>, spec: ProjectSpec, snapshot_every: usize) -> Result<Self> {
        let dir = dir.into();
        if dir.join(LOG_FILE).exists() {
            return Err(ServiceError::Conflict(format!("project {} already exists", spec.id)));
        }
        fs::create_dir_all(&dir)?;
        let log = OpenOptions::new().create(true).append(true).open(dir.join(LOG_FILE))?;
        let first = LoggedEvent { seq: 1, event: Event::Created { spec } };
        let state = ProjectState::from_event(&first)?;
        let mut store = Self {
            dir,
            log,
            len: 0,
            state,
            since_snapshot: 0,
            snapshot_every: snapshot_every.max(1),
        };
        store.write_line(&first)?;
        sync_dir(&store.dir)?;
        Ok(store)
    }

    pub fn open(dir: impl Into<PathBuf>, snapshot_every: usize) -> Result<Self> {
        let dir = dir.into();
        let log_path = dir.join(LOG_FILE);
        let mut bytes = Vec::new();
        File::open(&log_path)?.read_to_end(&mut bytes)?;
        let complete = bytes.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1);
        if complete < bytes.len() {
            log::warn!("{}: dropping {} byte(s) of incomplete trailing event", log_path.display(), bytes.len() - complete);
            OpenOptions::new().write(true).open(&log_path)?.set_len(complete as u64)?;
        }
        let text = std::str::from_utf8(&bytes[..complete]).map_err(|e| corrupt(&log_path, e.to_string()))?;

        let mut state = Self::read_snapshot(&dir);
        let mut replayed = 0;
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let event: LoggedEvent =
                serde_json::from_str(line).map_err(|e| corrupt(&log_path, format!("line {}: {e}", i + 1)))?;
            match &mut state {
                None => state = Some(ProjectState::from_event(&event)?),
                Some(s) if event.seq <= s.seq => {}
                Some(s) => {
                    s.apply(&event)?;
                    replayed += 1;
                }
            }
        }
        let state = state.ok_or_else(|| corrupt(&log_path, "log holds no events"))?;
        let log = OpenOptions::new().append(true).open(&log_path)?;
        Ok(Self {
            dir,
            log,
            len: complete as u64,
            state,
            since_snapshot: replayed,
            snapshot_every: snapshot_every.max(1),
        })
    }

    fn read_snapshot(dir: &Path) -> Option<ProjectState> {
        let text = fs::read_to_string(dir.join(SNAPSHOT_FILE)).ok()?;
        match serde_json::from_str(&text) {
            Ok(s) => Some(s),
            Err(e) => {
                log::warn!("{}: ignoring unreadable snapshot: {e}", dir.display());
                None
            }
        }
    }

    pub fn state(&self) -> &ProjectState {
        &self.state
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn write_line(&mut self, e: &LoggedEvent) -> Result<()> {
        let mut line = serde_json::to_string(e)?;
        line.push('\n');
        let written = self.log.write_all(line.as_bytes()).and_then(|_| self.log.sync_data());
        if let Err(e) = written {
            // Cut any partial line so later appends start on a line boundary.
            let _ = self.log.set_len(self.len);
            return Err(e.into());
        }
        self.len += line.len() as u64;
        Ok(())
    }

    /// Durably appends one event and applies it.
    pub fn append(&mut self, event: Event) -> Result<&ProjectState> {
        let logged = LoggedEvent { seq: self.state.seq + 1, event };
        let mut next = self.state.clone();
        next.apply(&logged)?;
        self.write_line(&logged)?;
        self.state = next;
        self.since_snapshot += 1;
        if self.since_snapshot >= self.snapshot_every {
            self.snapshot()?;
        }
        Ok(&self.state)
    }

    pub fn snapshot(&mut self) -> Result<()> {
        let tmp = self.dir.join(SNAPSHOT_TMP);
        {
            let mut f = File::create(&tmp)?;
            f.write_all(serde_json::to_string(&self.state)?.as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, self.dir.join(SNAPSHOT_FILE))?;
        sync_dir(&self.dir)?;
        self.since_snapshot = 0;
        Ok(())
    }
}
