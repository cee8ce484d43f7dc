//! Versioned text checkpoints for long searches.
//!
//! ```text
//! ckpt 1
//! n 9
//! mode multiset
//! target prove 12
//! next 17
//! prefix 0 1 2 x2;0 3 4
//! best 10
//! nodes 123456
//! witness
//! trifam 1
//! ...
//! end
//! ```
//!
//! `next` is the first work item not yet finished and `prefix` its member
//! path; every item before it is complete. Witness blocks are TRIFAM v1.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::family::{Mode, ParseError, Triangle, TriangleFamily};

use super::Target;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("checkpoint I/O: {0}")]
    Io(#[from] io::Error),
    #[error("checkpoint line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("checkpoint witness: {0}")]
    Witness(#[from] ParseError),
    #[error("checkpoint does not match this search: {0}")]
    Mismatch(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Checkpoint {
    pub n: usize,
    pub mode: Mode,
    pub target: Target,
    pub next: usize,
    pub prefix: Vec<(Triangle, u8)>,
    pub best: usize,
    pub nodes: u64,
    pub witnesses: Vec<TriangleFamily>,
}

fn target_text(t: Target) -> String {
    match t {
        Target::Maximize => "maximize".into(),
        Target::EnumerateExtremal => "enumerate-extremal".into(),
        Target::ProveSize(k) => format!("prove {k}"),
    }
}

impl Checkpoint {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "ckpt 1");
        let _ = writeln!(s, "n {}", self.n);
        let _ = writeln!(s, "mode {}", self.mode);
        let _ = writeln!(s, "target {}", target_text(self.target));
        let _ = writeln!(s, "next {}", self.next);
        let prefix: Vec<String> = self
            .prefix
            .iter()
            .map(|(t, m)| {
                if *m == 2 {
                    format!("{t} x2")
                } else {
                    t.to_string()
                }
            })
            .collect();
        let _ = writeln!(s, "prefix {}", prefix.join(";"));
        let _ = writeln!(s, "best {}", self.best);
        let _ = writeln!(s, "nodes {}", self.nodes);
        for w in &self.witnesses {
            s.push_str("witness\n");
            s.push_str(&w.to_trifam());
            s.push_str("end\n");
        }
        s
    }

    pub fn parse(text: &str) -> Result<Checkpoint, CheckpointError> {
        let lines: Vec<&str> = text.lines().collect();
        let bad = |line: usize, message: &str| CheckpointError::Malformed {
            line: line + 1,
            message: message.to_string(),
        };
        let field = |i: usize, key: &str| -> Result<&str, CheckpointError> {
            let line = lines
                .get(i)
                .ok_or_else(|| bad(i, &format!("missing `{key}`")))?;
            match line.split_once(' ') {
                Some((k, v)) if k == key => Ok(v),
                None if *line == key => Ok(""),
                _ => Err(bad(i, &format!("expected `{key}`"))),
            }
        };
        let number = |i: usize, key: &str| -> Result<u64, CheckpointError> {
            field(i, key)?
                .trim()
                .parse()
                .map_err(|_| bad(i, &format!("`{key}` is not a number")))
        };

        if field(0, "ckpt")? != "1" {
            return Err(bad(0, "unsupported checkpoint version"));
        }
        let n = number(1, "n")? as usize;
        let mode: Mode = field(2, "mode")?.parse().map_err(|_| bad(2, "bad mode"))?;
        let target = match field(3, "target")?
            .split_whitespace()
            .collect::<Vec<_>>()
            .as_slice()
        {
            ["maximize"] => Target::Maximize,
            ["enumerate-extremal"] => Target::EnumerateExtremal,
            ["prove", k] => Target::ProveSize(k.parse().map_err(|_| bad(3, "bad target"))?),
            _ => return Err(bad(3, "bad target")),
        };
        let next = number(4, "next")? as usize;
        let mut prefix = Vec::new();
        for part in field(5, "prefix")?
            .split(';')
            .filter(|p| !p.trim().is_empty())
        {
            let fields: Vec<&str> = part.split_whitespace().collect();
            let (verts, m) = match fields.as_slice() {
                [a, b, c] => ([*a, *b, *c], 1),
                [a, b, c, "x2"] => ([*a, *b, *c], 2),
                _ => return Err(bad(5, "bad prefix member")),
            };
            let v: Vec<usize> = verts
                .iter()
                .map(|s| s.parse().map_err(|_| bad(5, "bad prefix vertex")))
                .collect::<Result<_, _>>()?;
            let t = Triangle::new(v[0], v[1], v[2]).map_err(|_| bad(5, "bad prefix triangle"))?;
            prefix.push((t, m));
        }
        let best = number(6, "best")? as usize;
        let nodes = number(7, "nodes")?;
        let mut witnesses = Vec::new();
        let mut i = 8;
        while i < lines.len() {
            if lines[i].trim().is_empty() {
                i += 1;
                continue;
            }
            if lines[i] != "witness" {
                return Err(bad(i, "expected `witness`"));
            }
            let end = (i + 1..lines.len())
                .find(|&j| lines[j] == "end")
                .ok_or_else(|| bad(i, "unterminated witness"))?;
            let block = lines[i + 1..end].join("\n") + "\n";
            witnesses.push(TriangleFamily::parse_trifam(&block)?);
            i = end + 1;
        }
        Ok(Checkpoint {
            n,
            mode,
            target,
            next,
            prefix,
            best,
            nodes,
            witnesses,
        })
    }

    pub fn load(path: &Path) -> Result<Checkpoint, CheckpointError> {
        Checkpoint::parse(&fs::read_to_string(path)?)
    }

    /// Writes through a temporary file so a crash never leaves a torn checkpoint.
    pub fn store(&self, path: &Path) -> Result<(), CheckpointError> {
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, self.to_text())?;
        fs::rename(&tmp, path)?;
        Ok(())
    }
}
