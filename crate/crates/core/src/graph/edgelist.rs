//! SNAP-style whitespace edgelists.

use std::io::{BufRead, Write};

use super::{Graph, GraphError, Result};

/// Parses `u v` pairs, one per line. Extra columns are ignored.
///
/// With `skip_comments`, lines whose first non-blank character is `#` are skipped;
/// otherwise they are reported as parse errors. Blank lines are always skipped.
/// Directed inputs are symmetrized by [`Graph::from_edges`].
pub fn load_edgelist<R: BufRead>(source: R, skip_comments: bool) -> Result<Graph> {
    let mut edges = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        let line_no = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || (skip_comments && trimmed.starts_with('#')) {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let mut next_id = |what: &str| -> Result<u64> {
            let tok = tokens.next().ok_or_else(|| GraphError::Parse {
                line: line_no,
                message: format!("missing {what} node id"),
            })?;
            tok.parse::<u64>().map_err(|_| GraphError::Parse {
                line: line_no,
                message: format!("invalid node id {tok:?}"),
            })
        };
        let u = next_id("source")?;
        let v = next_id("target")?;
        edges.push((u, v));
    }
    Graph::from_edges(&edges)
}

/// Writes the canonical form: `u v` with `u < v` in ascending order, LF-terminated,
/// using internal ids.
pub fn save_edgelist<W: Write>(g: &Graph, mut out: W) -> std::io::Result<()> {
    let mut buf = itoa_buf();
    for (u, v) in g.edges() {
        buf.clear();
        push_num(&mut buf, u);
        buf.push(b' ');
        push_num(&mut buf, v);
        buf.push(b'\n');
        out.write_all(&buf)?;
    }
    out.flush()
}

fn itoa_buf() -> Vec<u8> {
    Vec::with_capacity(32)
}

fn push_num(buf: &mut Vec<u8>, mut x: usize) {
    let start = buf.len();
    loop {
        buf.push(b'0' + (x % 10) as u8);
        x /= 10;
        if x == 0 {
            break;
        }
    }
    buf[start..].reverse();
}
