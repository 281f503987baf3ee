//! Replayable JSON-lines event log.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

/// One log record. Serialized as `{"tick":..,"kind":..,"payload":{..}}` with
/// a fixed key order so logs can be compared byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub tick: u64,
    #[serde(flatten)]
    pub body: EventBody,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum EventBody {
    /// A controller resolved a decision point; `slot` is `None` for a no-op.
    Decision {
        robot: usize,
        candidates: Vec<u32>,
        slot: Option<usize>,
    },
    Commit {
        robot: usize,
        object: u32,
        intercept_x: f64,
        intercept_y: f64,
        intercept_time: f64,
        carry_end_time: f64,
        t_process: f64,
    },
    Pick {
        robot: usize,
        object: u32,
        reward: f64,
    },
    Missed {
        object: u32,
    },
    Idle {
        robot: usize,
    },
    Done {
        n_picked: usize,
        n_missed: usize,
        completion_time: f64,
        terminal_reward: f64,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EventLog {
    pub events: Vec<Event>,
}

impl EventLog {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Event> {
        self.events.iter()
    }

    /// One JSON object per line, each line terminated by `\n`.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("event serialization"));
            out.push('\n');
        }
        out
    }

    pub fn write_jsonl(&self, path: impl AsRef<Path>) -> io::Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(self.to_jsonl().as_bytes())?;
        w.flush()
    }

    pub fn from_jsonl(text: &str) -> serde_json::Result<Self> {
        let events = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect::<Result<_, _>>()?;
        Ok(Self { events })
    }

    pub fn read_jsonl(path: impl AsRef<Path>) -> io::Result<Self> {
        let mut events = Vec::new();
        for line in BufReader::new(File::open(path)?).lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            events.push(serde_json::from_str(&line).map_err(io::Error::other)?);
        }
        Ok(Self { events })
    }

    /// Slots chosen at each decision point, in order.
    pub fn decisions(&self) -> impl Iterator<Item = (usize, Option<usize>)> + '_ {
        self.events.iter().filter_map(|e| match &e.body {
            EventBody::Decision { robot, slot, .. } => Some((*robot, *slot)),
            _ => None,
        })
    }
}
