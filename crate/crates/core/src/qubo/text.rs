//! Coordinate-list text format.
//!
//! ```text
//! p qubo 0 <n> <#diagonal> <#offdiag>
//! # offset <int>
//! i i <value>      diagonal entries, ascending
//! i j <value>      off-diagonal entries (i < j), ascending
//! ```
//!
//! Lines starting with `#` are comments, except the offset line. Only
//! nonzero entries are written.

use std::fmt::Write as _;

use super::QuboModel;
use crate::error::{Error, Result};

impl QuboModel {
    pub fn to_text(&self) -> String {
        let diag: Vec<(usize, i64)> = self
            .diagonal
            .iter()
            .enumerate()
            .filter(|(_, q)| **q != 0)
            .map(|(i, q)| (i + 1, *q))
            .collect();
        let mut s = String::new();
        writeln!(s, "p qubo 0 {} {} {}", self.n, diag.len(), self.offdiag.len()).unwrap();
        writeln!(s, "# offset {}", self.offset).unwrap();
        for (i, q) in diag {
            writeln!(s, "{i} {i} {q}").unwrap();
        }
        for ((i, j), q) in &self.offdiag {
            writeln!(s, "{i} {j} {q}").unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<QuboModel> {
        let mut model: Option<(QuboModel, usize, usize)> = None;
        let (mut n_diag, mut n_off) = (0usize, 0usize);
        let mut offset_seen = false;
        let mut pos = 0usize;
        for (lineno, line) in text.split_inclusive('\n').enumerate() {
            let start = pos;
            pos += line.len();
            let body = line.trim_end_matches(['\n', '\r']);
            let err = |col: usize, msg: String| Error::Parse {
                line: lineno + 1,
                column: col,
                offset: start + col - 1,
                message: msg,
            };
            let toks = tokens(body);
            if toks.is_empty() {
                continue;
            }
            let int = |k: usize| -> Result<i64> {
                let (col, t) = toks[k];
                t.parse::<i64>()
                    .map_err(|_| err(col, format!("expected an integer, found {t:?}")))
            };
            let index = |k: usize| -> Result<usize> {
                let v = int(k)?;
                usize::try_from(v).map_err(|_| err(toks[k].0, format!("negative index {v}")))
            };
            if toks[0].1.starts_with('#') {
                let words: Vec<&str> = toks.iter().map(|t| t.1).collect();
                if words.len() == 3 && words[0] == "#" && words[1] == "offset" {
                    let Some((m, _, _)) = model.as_mut() else {
                        return Err(err(1, "offset line before header".into()));
                    };
                    if offset_seen {
                        return Err(err(1, "duplicate offset line".into()));
                    }
                    m.offset = int(2)?;
                    offset_seen = true;
                }
                continue;
            }
            if toks[0].1 == "p" {
                if model.is_some() {
                    return Err(err(1, "duplicate header".into()));
                }
                if toks.len() != 6 || toks[1].1 != "qubo" || toks[2].1 != "0" {
                    return Err(err(1, "header must be `p qubo 0 <n> <#diagonal> <#offdiag>`".into()));
                }
                let n = index(3)?;
                model = Some((QuboModel::zero(n), index(4)?, index(5)?));
                continue;
            }
            let Some((m, _, _)) = model.as_mut() else {
                return Err(err(1, "entry before header".into()));
            };
            if toks.len() != 3 {
                return Err(err(1, "entry must be `i j value`".into()));
            }
            let (i, j, v) = (index(0)?, index(1)?, int(2)?);
            if i < 1 || i > m.n {
                return Err(err(toks[0].0, format!("index {i} outside 1..={}", m.n)));
            }
            if j < i || j > m.n {
                return Err(err(toks[1].0, format!("index {j} must satisfy {i} <= j <= {}", m.n)));
            }
            if i == j {
                if m.diagonal[i - 1] != 0 {
                    return Err(err(1, format!("duplicate diagonal entry {i}")));
                }
                m.diagonal[i - 1] = v;
                n_diag += 1;
            } else {
                if m.offdiag.contains_key(&(i, j)) {
                    return Err(err(1, format!("duplicate entry ({i}, {j})")));
                }
                if v != 0 {
                    m.offdiag.insert((i, j), v);
                }
                n_off += 1;
            }
        }
        let eof = |msg: String| Error::Parse {
            line: text.lines().count().max(1),
            column: 1,
            offset: text.len(),
            message: msg,
        };
        let (m, want_diag, want_off) = model.ok_or_else(|| eof("missing header".into()))?;
        if (n_diag, n_off) != (want_diag, want_off) {
            return Err(eof(format!(
                "header declares {want_diag} diagonal and {want_off} off-diagonal entries, found {n_diag} and {n_off}"
            )));
        }
        Ok(m)
    }
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (k, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..k]));
            }
        } else if start.is_none() {
            start = Some(k);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}
