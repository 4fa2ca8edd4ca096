//! Running the `anp` binary and talking to `anp serve` over a socket.
#![allow(dead_code)]

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Output, Stdio};

pub const ANP: &str = env!("CARGO_BIN_EXE_anp");

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl From<Output> for Run {
    fn from(o: Output) -> Self {
        Self {
            code: o.status.code().unwrap_or(-1),
            stdout: String::from_utf8_lossy(&o.stdout).into_owned(),
            stderr: String::from_utf8_lossy(&o.stderr).into_owned(),
        }
    }
}

pub fn anp(args: &[&str]) -> Run {
    Command::new(ANP)
        .args(args)
        .env("ANP_NO_COLOR", "1")
        .output()
        .unwrap()
        .into()
}

pub fn anp_with_input(args: &[&str], input: &str) -> Run {
    let mut child = Command::new(ANP)
        .args(args)
        .env("ANP_NO_COLOR", "1")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap().into()
}

pub fn write_model(dir: &Path, name: &str, doc: &anp_core::ModelDocument) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, anp_core::save(doc)).unwrap();
    path
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// `anp serve` on an ephemeral loopback port, killed on drop.
pub struct Server {
    child: Child,
    pub addr: String,
}

impl Server {
    pub fn start(store: &Path) -> Self {
        let mut child = Command::new(ANP)
            .args(["serve", "--addr", "127.0.0.1:0", "--store-dir", s(store)])
            .env("ANP_NO_COLOR", "1")
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .unwrap();
        let mut line = String::new();
        BufReader::new(child.stdout.take().unwrap())
            .read_line(&mut line)
            .unwrap();
        let addr = line
            .split("http://")
            .nth(1)
            .and_then(|rest| rest.split_whitespace().next())
            .unwrap_or_else(|| panic!("unexpected banner {line:?}"))
            .to_string();
        Self { child, addr }
    }

    /// One HTTP/1.1 request; returns status and body.
    pub fn request(&self, method: &str, path: &str, body: &[u8]) -> (u16, Vec<u8>) {
        let mut stream = TcpStream::connect(&self.addr).unwrap();
        let head = format!(
            "{method} {path} HTTP/1.1\r\nHost: {}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
            self.addr,
            body.len()
        );
        stream.write_all(head.as_bytes()).unwrap();
        stream.write_all(body).unwrap();
        let mut raw = Vec::new();
        stream.read_to_end(&mut raw).unwrap();
        let split = raw
            .windows(4)
            .position(|w| w == b"\r\n\r\n")
            .expect("header end");
        let head = String::from_utf8_lossy(&raw[..split]).into_owned();
        let status = head.split_whitespace().nth(1).unwrap().parse().unwrap();
        let mut body = raw[split + 4..].to_vec();
        if head
            .to_ascii_lowercase()
            .contains("transfer-encoding: chunked")
        {
            body = dechunk(&body);
        }
        (status, body)
    }
}

fn dechunk(mut data: &[u8]) -> Vec<u8> {
    let mut out = Vec::new();
    loop {
        let eol = data.windows(2).position(|w| w == b"\r\n").unwrap();
        let size =
            usize::from_str_radix(std::str::from_utf8(&data[..eol]).unwrap().trim(), 16).unwrap();
        if size == 0 {
            return out;
        }
        out.extend_from_slice(&data[eol + 2..eol + 2 + size]);
        data = &data[eol + 4 + size..];
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// Goal feeding a three-cluster cycle of single nodes: the weighted
/// supermatrix is a period-3 permutation and has no limit.
pub fn cyclic_model() -> anp_core::ModelDocument {
    use anp_core::model::{Dependency, Metadata, Topology};
    use anp_core::{Cluster, ClusterKind, ModelDocument};
    let dep = |control: &str, cluster: &str| Dependency {
        control: control.into(),
        cluster: cluster.into(),
    };
    ModelDocument::new(
        Metadata {
            title: "cycle".into(),
            ..Default::default()
        },
        Topology {
            clusters: vec![
                Cluster::new("goal", "Goal", ClusterKind::Goal, &[("g", "Goal")]),
                Cluster::new("crit", "Criteria", ClusterKind::Criteria, &[("c", "C")]),
                Cluster::new("mid", "Other", ClusterKind::Other, &[("o", "O")]),
                Cluster::new(
                    "alts",
                    "Alternatives",
                    ClusterKind::Alternatives,
                    &[("a", "A")],
                ),
            ],
            dependencies: vec![
                dep("g", "crit"),
                dep("c", "mid"),
                dep("o", "alts"),
                dep("a", "crit"),
            ],
        },
    )
}

/// Answers to `anp rate` that re-enter every judgment of `full` into an
/// emptied copy, declining each re-rate offer.
pub fn rating_script(full: &anp_core::ModelDocument) -> (anp_core::ModelDocument, String) {
    let mut empty = full.clone();
    for slot in full.judgments.keys() {
        empty.clear_slot(slot);
    }
    let opts = full.solve_options(None, Some(false)).unwrap();
    let solution = anp_core::solve(&full.to_network(), &opts).unwrap();
    let mut script = String::new();
    for pending in empty.pending() {
        let given = &full.judgments[&pending.slot];
        for pair in &pending.missing {
            let j = given
                .get(pair)
                .copied()
                .unwrap_or_else(|| given[&pair.reversed()].reciprocal());
            script.push_str(&format!("{j}\n"));
        }
        let verdict = &solution
            .slots
            .iter()
            .find(|s| s.slot == pending.slot)
            .unwrap()
            .verdict;
        if !verdict.is_pass() {
            script.push_str("n\n");
        }
    }
    (empty, script)
}
