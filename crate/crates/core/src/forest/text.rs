use super::{Forest, VertexId};
use crate::error::{Error, Result};

/// Parse the edge-list format: `u v` lines, an optional leading `n <count>`
/// line, blank lines and `#` comments ignored.
pub fn parse_edge_list(text: &str) -> Result<Forest> {
    let mut declared: Option<usize> = None;
    let mut edges: Vec<(usize, VertexId, VertexId)> = Vec::new();
    let mut seen_content = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens[0] == "n" {
            if seen_content {
                return Err(Error::Parse { line: line_no, msg: "'n' header must be the first line".into() });
            }
            if tokens.len() != 2 {
                return Err(Error::Parse { line: line_no, msg: "expected 'n <count>'".into() });
            }
            let count = tokens[1]
                .parse::<usize>()
                .map_err(|_| Error::Parse { line: line_no, msg: format!("bad vertex count '{}'", tokens[1]) })?;
            declared = Some(count);
            seen_content = true;
            continue;
        }
        seen_content = true;
        if tokens.len() != 2 {
            return Err(Error::Parse { line: line_no, msg: format!("expected 'u v', got '{line}'") });
        }
        let parse = |t: &str| {
            t.parse::<VertexId>()
                .map_err(|_| Error::Parse { line: line_no, msg: format!("bad vertex id '{t}'") })
        };
        edges.push((line_no, parse(tokens[0])?, parse(tokens[1])?));
    }

    let max_end = edges.iter().map(|&(_, u, v)| u.max(v) + 1).max().unwrap_or(0);
    let n = declared.unwrap_or(0).max(max_end);
    let mut forest = Forest::new(n);
    for (line, u, v) in edges {
        forest.add_edge(u, v).map_err(|e| match e {
            Error::Cycle(..) => Error::Structural(format!("line {line}: edge {u}-{v} closes a cycle")),
            Error::Structural(msg) => Error::Structural(format!("line {line}: {msg}")),
            other => other,
        })?;
    }
    Ok(forest)
}

/// Serialise as `n <count>` followed by sorted `u v` lines with `u < v`.
pub fn to_edge_list(forest: &Forest) -> String {
    let mut out = format!("n {}\n", forest.len());
    for (u, v) in forest.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}
