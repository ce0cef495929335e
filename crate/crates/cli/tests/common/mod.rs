#![allow(dead_code)]

use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Output, Stdio};
use std::time::Duration;

pub fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn corpus_files() -> Vec<PathBuf> {
    ["naakosenda.ttl", "cde_saare.ttl", "club_2_0.ttl"].iter().map(|f| root().join("corpus").join(f)).collect()
}

pub fn ontosoc(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ontosoc"));
    cmd.args(args).current_dir(root()).env_remove("ONTOSOC_SCHEMA").env_remove("RUST_LOG");
    cmd
}

pub fn run(args: &[&str]) -> Output {
    ontosoc(args).output().expect("binary runs")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

pub const CORPUS_ARGS: [&str; 3] = ["corpus/naakosenda.ttl", "corpus/cde_saare.ttl", "corpus/club_2_0.ttl"];

/// `ontosoc serve` on a free port.
pub struct Server {
    child: Child,
    pub base: String,
}

impl Server {
    pub fn start(data: &Path, seed: &[PathBuf]) -> Server {
        let mut cmd = ontosoc(&["serve", "--port", "0", "--data"]);
        cmd.arg(data).args(seed).stdout(Stdio::null()).stderr(Stdio::piped());
        let mut child = cmd.spawn().expect("server starts");
        let mut lines = BufReader::new(child.stderr.take().unwrap()).lines();
        let base = loop {
            let line = lines.next().expect("server printed its address").unwrap();
            if let Some(rest) = line.strip_prefix("listening on ") {
                break rest.split_whitespace().next().unwrap().to_string();
            }
        };
        // Keep draining so request logging never blocks the server.
        std::thread::spawn(move || for _ in lines {});
        Server { child, base }
    }

    pub fn client() -> reqwest::blocking::Client {
        reqwest::blocking::Client::builder().timeout(Duration::from_secs(10)).build().unwrap()
    }

    pub fn url(&self, path: &str) -> String {
        format!("{}{path}", self.base)
    }

    pub fn health(&self) -> serde_json::Value {
        Self::client().get(self.url("/health")).send().unwrap().json().unwrap()
    }

    pub fn post(&self, turtle: &str) -> (u16, String) {
        let r = Self::client().post(self.url("/graph")).body(turtle.to_string()).send().unwrap();
        (r.status().as_u16(), r.text().unwrap())
    }

    pub fn query(&self, text: &str) -> (u16, serde_json::Value) {
        let r = Self::client().get(self.url("/sparql")).query(&[("query", text)]).send().unwrap();
        (r.status().as_u16(), r.json().unwrap())
    }

    /// SIGKILL, no chance to flush anything.
    pub fn kill(mut self) {
        self.child.kill().unwrap();
        self.child.wait().unwrap();
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

pub const NEW_CLUB: &str = "@prefix os: <http://maroua-univ/ns/ontosoc#> .
@prefix ex: <http://example.org/> .
ex:NewClub a os:SportCommunity ; os:isLocatedIn ex:Garoua .
ex:Garoua a os:Town .
ex:Aissatou a os:Individual ; os:isMemberOf ex:NewClub .
";
