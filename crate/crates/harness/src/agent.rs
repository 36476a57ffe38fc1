//! External responders: a command fed the prompt on stdin, or a directory of
//! stored responses keyed by prompt hash. Also parses their final answers.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::time::Duration;

use thiserror::Error;
use wait_timeout::ChildExt;
use walkest_core::graph::Family;
use walkest_core::promptgen::{PromptArtifact, Task, OFFSET_RANGE};

use crate::benchmark::sha256_hex;

pub const RESPONSE_EXTENSION: &str = "txt";

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("agent process failed: {0}")]
    ProcessFailure(String),
    #[error("agent timed out after {0:?}")]
    Timeout(Duration),
    #[error("no stored response {0}")]
    MissingResponse(PathBuf),
    #[error("response has no usable answer")]
    Unparsable,
}

#[derive(Clone, Debug)]
pub enum Agent {
    /// Runs `program args...` once per prompt.
    Exec {
        program: String,
        args: Vec<String>,
        timeout: Duration,
    },
    /// Reads `<dir>/<prompt hash>.txt`.
    Replay { dir: PathBuf },
}

/// File stem under which a prompt's response is stored.
pub fn prompt_hash(prompt: &PromptArtifact) -> String {
    sha256_hex(prompt.text.as_bytes())
}

impl Agent {
    pub fn exec_shell(command: &str, timeout: Duration) -> Self {
        Agent::Exec {
            program: "sh".to_string(),
            args: vec!["-c".to_string(), command.to_string()],
            timeout,
        }
    }

    /// Raw response text for `prompt`.
    pub fn respond(&self, prompt: &PromptArtifact) -> Result<String, AgentError> {
        match self {
            Agent::Replay { dir } => {
                let path = dir.join(format!("{}.{RESPONSE_EXTENSION}", prompt_hash(prompt)));
                std::fs::read_to_string(&path).map_err(|_| AgentError::MissingResponse(path))
            }
            Agent::Exec { program, args, timeout } => run_command(program, args, &prompt.text, *timeout),
        }
    }
}

fn run_command(program: &str, args: &[String], input: &str, timeout: Duration) -> Result<String, AgentError> {
    let fail = |e: std::io::Error| AgentError::ProcessFailure(e.to_string());
    let mut child = Command::new(program)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(fail)?;
    let mut stdin = child.stdin.take().expect("stdin piped");
    let input = input.to_owned();
    let writer = std::thread::spawn(move || {
        // a responder that exits without reading closes the pipe; that is not an error here
        let _ = stdin.write_all(input.as_bytes());
    });
    let mut stdout = child.stdout.take().expect("stdout piped");
    let reader = std::thread::spawn(move || {
        let mut out = String::new();
        stdout.read_to_string(&mut out).map(|_| out)
    });
    let status = match child.wait_timeout(timeout).map_err(fail)? {
        Some(status) => status,
        None => {
            let _ = child.kill();
            let _ = child.wait();
            return Err(AgentError::Timeout(timeout));
        }
    };
    let _ = writer.join();
    let out = reader
        .join()
        .map_err(|_| AgentError::ProcessFailure("reader thread panicked".into()))?
        .map_err(fail)?;
    if !status.success() {
        return Err(AgentError::ProcessFailure(format!("exit status {status}")));
    }
    Ok(out)
}

/// A parsed agent answer.
#[derive(Clone, Debug, PartialEq)]
pub enum Answer {
    Number(f64),
    Label(Family),
    Names(Vec<u64>),
}

/// Numbers in `s`, allowing `1,234` thousands separators and exponents.
fn numbers(s: &str) -> Vec<f64> {
    let cleaned: String = {
        let chars: Vec<char> = s.chars().collect();
        chars
            .iter()
            .enumerate()
            .filter(|&(i, &c)| {
                !(c == ','
                    && i > 0
                    && chars[i - 1].is_ascii_digit()
                    && chars.get(i + 1..i + 4).is_some_and(|w| w.iter().all(char::is_ascii_digit))
                    && chars.get(i + 4).is_none_or(|n| !n.is_ascii_digit()))
            })
            .map(|(_, &c)| c)
            .collect()
    };
    let mut out = Vec::new();
    let bytes = cleaned.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i].is_ascii_digit() || (bytes[i] == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let token = cleaned[start..i].trim_end_matches('.');
            if let Ok(x) = token.parse::<f64>() {
                out.push(x);
            }
        } else {
            i += 1;
        }
    }
    out
}

fn labels(s: &str) -> Vec<Family> {
    s.split(|c: char| !c.is_ascii_alphanumeric())
        .filter_map(|w| match w.to_ascii_lowercase().as_str() {
            "ba" => Some(Family::BA),
            "er" => Some(Family::ER),
            "lfr" => Some(Family::LFR),
            "grid" => Some(Family::Grid),
            _ => None,
        })
        .collect()
}

/// Anonymized node names (integers at or above the offset floor) in order, deduplicated.
fn names(s: &str) -> Vec<u64> {
    let mut seen = std::collections::HashSet::new();
    s.split(|c: char| !c.is_ascii_digit())
        .filter_map(|t| t.parse::<u64>().ok())
        .filter(|&x| x >= OFFSET_RANGE.start && seen.insert(x))
        .collect()
}

/// Text after the last `ANSWER:` marker, if any.
fn answer_line(response: &str) -> Option<&str> {
    response.lines().rev().find_map(|line| {
        let t = line.trim().trim_start_matches(['*', '`', '#', '>', ' ', '-']);
        let upper = t.get(..7)?.to_ascii_uppercase();
        (upper == "ANSWER:").then(|| t[7..].trim().trim_matches(['*', '`', ' ']))
    })
}

fn parse_value(task: Task, text: &str, from_end: bool) -> Option<Answer> {
    let pick = |v: Vec<f64>| if from_end { v.last().copied() } else { v.first().copied() };
    match task {
        Task::Size => pick(numbers(text)).filter(|x| x.is_finite()).map(Answer::Number),
        Task::Community => pick(numbers(text))
            .filter(|x| x.is_finite() && *x >= 0.0)
            .map(|x| Answer::Number(x.round())),
        Task::Structure => {
            let l = labels(text);
            if from_end { l.last() } else { l.first() }.copied().map(Answer::Label)
        }
        Task::Topk => Some(names(text)).filter(|n| !n.is_empty()).map(Answer::Names),
    }
}

/// Reads the final `ANSWER:` line, falling back to the last number or label
/// anywhere in the response.
pub fn parse_answer(task: Task, response: &str) -> Result<Answer, AgentError> {
    answer_line(response)
        .and_then(|line| parse_value(task, line, false))
        .or_else(|| parse_value(task, response, true))
        .ok_or(AgentError::Unparsable)
}
