use std::io::{BufRead, BufReader, Write};
use std::net::{TcpStream, ToSocketAddrs};

use serde::{Deserialize, Serialize};

use super::obs::ObsVector;
use super::protocol::PROTOCOL_VERSION;
use crate::sim::{Choice, Controller, ControllerError, DecisionRequest, WorldConfig};

/// What [`PolicyClient`] sends for each decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyQuery {
    pub v: u32,
    pub obs: Vec<f64>,
    pub mask: Vec<u8>,
    pub info: QueryInfo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryInfo {
    pub sim_time: f64,
    pub deciding_robot: usize,
    pub candidate_ids: Vec<u32>,
}

/// Expected answer: a slot index, or `null` to wait.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyReply {
    pub slot: Option<i64>,
}

/// Controller backed by a remote policy server speaking one JSON line per
/// query and per reply. Masked or missing slots become no-ops.
#[derive(Debug)]
pub struct PolicyClient {
    cfg: WorldConfig,
    reader: BufReader<TcpStream>,
    writer: TcpStream,
}

impl PolicyClient {
    pub fn connect(addr: impl ToSocketAddrs, cfg: &WorldConfig) -> std::io::Result<Self> {
        let stream = TcpStream::connect(addr)?;
        stream.set_nodelay(true)?;
        Ok(Self {
            cfg: cfg.clone(),
            reader: BufReader::new(stream.try_clone()?),
            writer: stream,
        })
    }

    pub fn query(&self, request: &DecisionRequest) -> PolicyQuery {
        let obs = ObsVector::encode(&self.cfg, Some(request));
        PolicyQuery {
            v: PROTOCOL_VERSION,
            obs: obs.flat(),
            mask: obs.mask_bits(),
            info: QueryInfo {
                sim_time: request.sim_time,
                deciding_robot: request.robot_index,
                candidate_ids: request.candidates.iter().map(|c| c.object_id).collect(),
            },
        }
    }
}

impl Controller for PolicyClient {
    fn decide(&mut self, request: &DecisionRequest) -> Result<Choice, ControllerError> {
        let io = |e: std::io::Error| ControllerError::new(format!("policy server: {e}"));
        let mut line = serde_json::to_string(&self.query(request)).expect("query serialization");
        line.push('\n');
        self.writer.write_all(line.as_bytes()).map_err(io)?;
        self.writer.flush().map_err(io)?;
        let mut answer = String::new();
        if self.reader.read_line(&mut answer).map_err(io)? == 0 {
            return Err(ControllerError::new("policy server closed the connection"));
        }
        let reply: PolicyReply = serde_json::from_str(answer.trim())
            .map_err(|e| ControllerError::new(format!("bad policy reply {:?}: {e}", answer.trim())))?;
        Ok(match reply.slot {
            Some(s) if s >= 0 && (s as usize) < request.candidates.len() => Choice::Pick(s as usize),
            _ => Choice::Noop,
        })
    }
}
