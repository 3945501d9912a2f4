//! JSON-lines event trace, one record per gluing.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::GlueEvent;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventRecord {
    pub i: usize,
    pub a: u32,
    pub b: u32,
    pub case: String,
    pub closed: Vec<u32>,
    pub boundary: usize,
}

impl From<&GlueEvent> for EventRecord {
    fn from(e: &GlueEvent) -> Self {
        EventRecord {
            i: e.step,
            a: e.peeled.0,
            b: e.partner.0,
            case: e.case.as_str().to_string(),
            closed: e.closed.clone(),
            boundary: e.boundary,
        }
    }
}

pub fn encode_event_trace(events: &[GlueEvent]) -> Vec<u8> {
    let mut out = Vec::new();
    for e in events {
        serde_json::to_writer(&mut out, &EventRecord::from(e)).expect("in-memory write");
        out.push(b'\n');
    }
    out
}

pub fn write_event_trace(path: &Path, events: &[GlueEvent]) -> Result<()> {
    crate::io::write_atomic(path, &encode_event_trace(events))
}
