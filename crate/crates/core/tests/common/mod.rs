#![allow(dead_code)]

use std::io::{BufRead, BufReader, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::thread;

use beltsort::bridge::{PolicyQuery, PolicyReply, StepReply, FEATURES_PER_SLOT};

/// SPT over a wire observation: lowest t_process among unmasked slots, ties
/// to the lowest object id.
pub fn spt_slot(obs: &[f64], mask: &[u8], ids: &[u32]) -> Option<usize> {
    (0..mask.len())
        .filter(|&s| mask[s] == 1)
        .min_by(|&a, &b| {
            let ta = obs[a * FEATURES_PER_SLOT + 2];
            let tb = obs[b * FEATURES_PER_SLOT + 2];
            ta.total_cmp(&tb).then(ids[a].cmp(&ids[b]))
        })
}

pub fn send(stream: &mut TcpStream, reader: &mut BufReader<TcpStream>, line: &str) -> String {
    stream.write_all(line.as_bytes()).unwrap();
    stream.write_all(b"\n").unwrap();
    let mut reply = String::new();
    reader.read_line(&mut reply).unwrap();
    reply.trim_end().to_string()
}

pub fn connect(addr: SocketAddr) -> (TcpStream, BufReader<TcpStream>) {
    let stream = TcpStream::connect(addr).unwrap();
    let reader = BufReader::new(stream.try_clone().unwrap());
    (stream, reader)
}

/// Drives one episode with SPT over an open bridge session. Returns every
/// reply line and the parsed final reply.
pub fn play_spt(stream: &mut TcpStream, reader: &mut BufReader<TcpStream>, reset: &str) -> (Vec<String>, Vec<StepReply>) {
    let mut lines = vec![send(stream, reader, reset)];
    let mut steps: Vec<StepReply> = vec![serde_json::from_str(&lines[0]).unwrap()];
    while !steps.last().unwrap().done {
        let last = steps.last().unwrap();
        let slot = spt_slot(&last.obs, &last.mask, &last.info.candidate_ids).expect("a decision has candidates");
        let line = send(stream, reader, &format!(r#"{{"cmd":"act","slot":{slot}}}"#));
        steps.push(serde_json::from_str(&line).unwrap());
        lines.push(line);
    }
    (lines, steps)
}

/// Policy server answering every query with SPT, one thread per connection.
pub fn spawn_spt_policy() -> SocketAddr {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    thread::spawn(move || {
        for stream in listener.incoming() {
            let stream = stream.unwrap();
            thread::spawn(move || {
                let mut writer = stream.try_clone().unwrap();
                for line in BufReader::new(stream).lines() {
                    let q: PolicyQuery = serde_json::from_str(&line.unwrap()).unwrap();
                    let slot = spt_slot(&q.obs, &q.mask, &q.info.candidate_ids).map(|s| s as i64);
                    let reply = serde_json::to_string(&PolicyReply { slot }).unwrap();
                    writer.write_all(reply.as_bytes()).unwrap();
                    writer.write_all(b"\n").unwrap();
                }
            });
        }
    });
    addr
}
