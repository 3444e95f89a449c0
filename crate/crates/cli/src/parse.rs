//! Graph and stream file formats.
//!
//! Graph: `n m directed|undirected`, then m lines `u v w`. Stream: one
//! command per line, `#` comments and blank lines skipped. Node tokens are
//! arbitrary strings interned in first-seen order across both files.

use std::collections::HashMap;

use dyndist::DynGraph;

use crate::CliError;

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Update { u: usize, v: usize, w: f64 },
    Query { rows: Vec<usize>, cols: Vec<usize> },
    Source(usize),
    Diameter,
    Radius,
    Eccentricities,
    Closeness,
    ExactDiameter,
}

impl Command {
    pub fn tag(&self) -> &'static str {
        match self {
            Command::Update { .. } => "U",
            Command::Query { .. } => "Q",
            Command::Source(_) => "S",
            Command::Diameter => "D",
            Command::Radius => "R",
            Command::Eccentricities => "E",
            Command::Closeness => "C",
            Command::ExactDiameter => "X",
        }
    }
}

/// Interning table shared by the graph and stream parsers.
#[derive(Clone, Debug, Default)]
pub struct Symbols {
    n: usize,
    ids: HashMap<String, usize>,
    names: Vec<String>,
}

impl Symbols {
    pub fn new(n: usize) -> Self {
        Symbols { n, ids: HashMap::new(), names: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, id: usize) -> Option<&str> {
        self.names.get(id).map(String::as_str)
    }

    fn intern(&mut self, tok: &str) -> Option<usize> {
        if let Some(&id) = self.ids.get(tok) {
            return Some(id);
        }
        if self.names.len() == self.n {
            return None;
        }
        let id = self.names.len();
        self.ids.insert(tok.to_string(), id);
        self.names.push(tok.to_string());
        Some(id)
    }
}

struct Cursor<'a> {
    path: &'a str,
    line: usize,
    text: &'a str,
}

impl<'a> Cursor<'a> {
    fn err(&self, col: usize, msg: impl Into<String>) -> CliError {
        CliError::Parse { path: self.path.to_string(), line: self.line, col, msg: msg.into() }
    }

    /// Whitespace-separated tokens with 1-based columns.
    fn tokens(&self) -> Vec<(usize, &'a str)> {
        let mut out = Vec::new();
        let mut start = None;
        for (i, ch) in self.text.char_indices().chain(std::iter::once((self.text.len(), ' '))) {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(i),
                (true, Some(s)) => {
                    out.push((s + 1, &self.text[s..i]));
                    start = None;
                }
                _ => {}
            }
        }
        out
    }

    fn node(&self, syms: &mut Symbols, col: usize, tok: &str) -> Result<usize, CliError> {
        syms.intern(tok).ok_or_else(|| self.err(col, format!("node `{tok}` exceeds the declared {} nodes", syms.n)))
    }

    /// Positive weight ≥ 1, or `inf` for deletion.
    fn weight(&self, col: usize, tok: &str) -> Result<f64, CliError> {
        if tok.eq_ignore_ascii_case("inf") {
            return Ok(f64::INFINITY);
        }
        let w: f64 = tok.parse().map_err(|_| self.err(col, format!("bad weight `{tok}`")))?;
        if !w.is_finite() || w < 1.0 {
            return Err(self.err(col, format!("weight `{tok}` must be at least 1 or `inf`")));
        }
        Ok(w)
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.split('#').next().unwrap_or(""))).filter(|(_, l)| !l.trim().is_empty())
}

/// Edges of a parsed graph file, before the weight cap is known.
#[derive(Clone, Debug)]
pub struct GraphSpec {
    pub n: usize,
    pub directed: bool,
    pub edges: Vec<(usize, usize, f64)>,
}

impl GraphSpec {
    /// Builds the graph with a cap covering its own and the stream's weights.
    pub fn build(&self, stream: &[Command]) -> Result<DynGraph, CliError> {
        let cap = self
            .edges
            .iter()
            .map(|e| e.2)
            .chain(stream.iter().filter_map(|c| match c {
                Command::Update { w, .. } if w.is_finite() => Some(*w),
                _ => None,
            }))
            .fold(1.0, f64::max);
        let mut g = DynGraph::new(self.n, self.directed, cap);
        for &(u, v, w) in &self.edges {
            g.set_weight(u, v, w)?;
        }
        Ok(g)
    }
}

pub fn parse_graph(path: &str, text: &str, syms: &mut Symbols) -> Result<GraphSpec, CliError> {
    let mut lines = content_lines(text);
    let Some((no, head)) = lines.next() else {
        return Err(CliError::Parse { path: path.into(), line: 1, col: 1, msg: "missing header".into() });
    };
    let cur = Cursor { path, line: no, text: head };
    let toks = cur.tokens();
    if toks.len() != 3 {
        return Err(cur.err(1, "header must be `n m directed|undirected`"));
    }
    let n: usize = toks[0].1.parse().map_err(|_| cur.err(toks[0].0, "bad node count"))?;
    let m: usize = toks[1].1.parse().map_err(|_| cur.err(toks[1].0, "bad edge count"))?;
    let directed = match toks[2].1 {
        "directed" => true,
        "undirected" => false,
        other => return Err(cur.err(toks[2].0, format!("expected directed or undirected, got `{other}`"))),
    };
    *syms = Symbols::new(n);
    let mut edges = Vec::with_capacity(m);
    let mut count = 0;
    for (no, line) in lines {
        let cur = Cursor { path, line: no, text: line };
        let toks = cur.tokens();
        if toks.len() != 3 {
            return Err(cur.err(1, "edge line must be `u v w`"));
        }
        let u = cur.node(syms, toks[0].0, toks[0].1)?;
        let v = cur.node(syms, toks[1].0, toks[1].1)?;
        if u == v {
            return Err(cur.err(toks[1].0, "self-loops are not allowed"));
        }
        let w = cur.weight(toks[2].0, toks[2].1)?;
        if w.is_finite() {
            edges.push((u, v, w));
        }
        count += 1;
        if count > m {
            return Err(cur.err(1, format!("more than the declared {m} edges")));
        }
    }
    if count != m {
        let last = text.lines().count().max(1);
        return Err(CliError::Parse { path: path.into(), line: last, col: 1, msg: format!("expected {m} edges, found {count}") });
    }
    Ok(GraphSpec { n, directed, edges })
}

fn node_set(cur: &Cursor, syms: &mut Symbols, col: usize, tok: &str) -> Result<Vec<usize>, CliError> {
    let mut out = Vec::new();
    let mut offset = 0;
    for part in tok.split(',') {
        if part.is_empty() {
            return Err(cur.err(col + offset, "empty node name"));
        }
        out.push(cur.node(syms, col + offset, part)?);
        offset += part.len() + 1;
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

pub fn parse_stream(path: &str, text: &str, syms: &mut Symbols) -> Result<Vec<Command>, CliError> {
    let mut out = Vec::new();
    for (no, line) in content_lines(text) {
        let cur = Cursor { path, line: no, text: line };
        let toks = cur.tokens();
        let (col, op) = toks[0];
        let want = |k: usize| -> Result<(), CliError> {
            if toks.len() == k {
                Ok(())
            } else {
                Err(cur.err(col, format!("`{op}` takes {} argument(s)", k - 1)))
            }
        };
        let cmd = match op {
            "U" => {
                want(4)?;
                let u = cur.node(syms, toks[1].0, toks[1].1)?;
                let v = cur.node(syms, toks[2].0, toks[2].1)?;
                if u == v {
                    return Err(cur.err(toks[2].0, "self-loops are not allowed"));
                }
                Command::Update { u, v, w: cur.weight(toks[3].0, toks[3].1)? }
            }
            "Q" => {
                want(2)?;
                let (c, arg) = toks[1];
                let Some((a, b)) = arg.split_once(';') else {
                    return Err(cur.err(c, "query must be `Q a,b;c,d`"));
                };
                let rows = node_set(&cur, syms, c, a)?;
                let cols = node_set(&cur, syms, c + a.len() + 1, b)?;
                Command::Query { rows, cols }
            }
            "S" => {
                want(2)?;
                Command::Source(cur.node(syms, toks[1].0, toks[1].1)?)
            }
            "D" | "R" | "E" | "C" | "X" => {
                want(1)?;
                match op {
                    "D" => Command::Diameter,
                    "R" => Command::Radius,
                    "E" => Command::Eccentricities,
                    "C" => Command::Closeness,
                    _ => Command::ExactDiameter,
                }
            }
            other => return Err(cur.err(col, format!("unknown command `{other}`"))),
        };
        out.push(cmd);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_edges() {
        let mut s = Symbols::default();
        let g = parse_graph("g", "3 2 directed\na b 1\nb c 2.5\n", &mut s).unwrap();
        assert_eq!((g.n, g.directed, g.edges.len()), (3, true, 2));
        assert_eq!(s.name(2), Some("c"));
        let built = g.build(&[]).unwrap();
        assert_eq!(built.weight(1, 2), 2.5);
    }

    #[test]
    fn stream_commands() {
        let mut s = Symbols::default();
        parse_graph("g", "4 1 undirected\nx y 1\n", &mut s).unwrap();
        let cmds = parse_stream("s", "U x y inf\n# note\nQ y,x;x\nS y\nD\nR\nE\nC\nX\nU x z 3\n", &mut s).unwrap();
        assert_eq!(cmds[0], Command::Update { u: 0, v: 1, w: f64::INFINITY });
        assert_eq!(cmds[1], Command::Query { rows: vec![0, 1], cols: vec![0] });
        assert_eq!(cmds[8], Command::Update { u: 0, v: 2, w: 3.0 });
        assert_eq!(cmds.iter().map(Command::tag).collect::<String>(), "UQSDRECXU");
    }

    #[test]
    fn errors_carry_location() {
        let mut s = Symbols::default();
        parse_graph("g", "2 0 directed\n", &mut s).unwrap();
        match parse_stream("s", "U a b 1\nU a b 0.5\n", &mut s) {
            Err(CliError::Parse { line, col, .. }) => assert_eq!((line, col), (2, 7)),
            other => panic!("{other:?}"),
        }
        assert!(parse_stream("s", "U a c 1\n", &mut s).is_err());
        assert!(parse_graph("g", "2 1 sideways\n", &mut Symbols::default()).is_err());
        assert!(parse_graph("g", "2 2 directed\na b 1\n", &mut Symbols::default()).is_err());
        assert!(parse_stream("s", "Q a;\n", &mut s).is_err());
        assert!(parse_stream("s", "Z\n", &mut s).is_err());
    }
}
