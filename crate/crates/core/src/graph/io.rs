// SPDX-License-Identifier: Apache-2.0

//! Edge-list and GML readers.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use super::Graph;
use crate::error::{Error, Result};

/// Reads a whitespace-separated edge list. Lines starting with `#` or `%`
/// are comments; columns after the second (weights, timestamps) are ignored.
pub fn load_edge_list(path: impl AsRef<Path>, directed: bool) -> Result<Graph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text, directed)
}

pub fn parse_edge_list(text: &str, directed: bool) -> Result<Graph> {
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut labels = Vec::new();
    let mut edges = Vec::new();
    fn intern<'t>(index: &mut HashMap<&'t str, usize>, labels: &mut Vec<String>, label: &'t str) -> usize {
        *index.entry(label).or_insert_with(|| {
            labels.push(label.to_string());
            labels.len() - 1
        })
    }
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('%') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let (Some(a), Some(b)) = (tokens.next(), tokens.next()) else {
            return Err(Error::parse(lineno + 1, format!("expected two node labels, got {line:?}")));
        };
        let u = intern(&mut index, &mut labels, a);
        let v = intern(&mut index, &mut labels, b);
        edges.push((u, v));
    }
    Graph::with_labels(labels, edges, directed)
}

/// Writes one `label label` line per stored edge. Reading the output back
/// reproduces the same graph whenever every node has at least one edge.
pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> std::io::Result<()> {
    for &(u, v) in g.edges() {
        writeln!(out, "{} {}", g.label(u), g.label(v))?;
    }
    Ok(())
}

pub fn load_gml(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_gml(&text)
}

#[derive(Debug, Clone, PartialEq)]
enum Token<'a> {
    Open,
    Close,
    Word(&'a str),
    Str(&'a str),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token<'_>)>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let mut rest = line;
        loop {
            rest = rest.trim_start();
            let Some(c) = rest.chars().next() else { break };
            match c {
                '#' => break,
                '[' => {
                    out.push((line_no, Token::Open));
                    rest = &rest[1..];
                }
                ']' => {
                    out.push((line_no, Token::Close));
                    rest = &rest[1..];
                }
                '"' => {
                    let body = &rest[1..];
                    let end = body
                        .find('"')
                        .ok_or_else(|| Error::parse(line_no, "unterminated string"))?;
                    out.push((line_no, Token::Str(&body[..end])));
                    rest = &body[end + 1..];
                }
                _ => {
                    let end = rest
                        .find(|ch: char| ch.is_whitespace() || ch == '[' || ch == ']' || ch == '"')
                        .unwrap_or(rest.len());
                    out.push((line_no, Token::Word(&rest[..end])));
                    rest = &rest[end..];
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug)]
enum Value<'a> {
    Scalar(&'a str),
    List(Vec<Entry<'a>>),
}

#[derive(Debug)]
struct Entry<'a> {
    line: usize,
    key: &'a str,
    value: Value<'a>,
}

struct Parser<'a> {
    tokens: Vec<(usize, Token<'a>)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn last_line(&self) -> usize {
        self.tokens.last().map_or(1, |(l, _)| *l)
    }

    fn list(&mut self, nested: bool) -> Result<Vec<Entry<'a>>> {
        let mut entries = Vec::new();
        loop {
            let Some((line, tok)) = self.tokens.get(self.pos).cloned() else {
                if nested {
                    return Err(Error::parse(self.last_line(), "missing closing ']'"));
                }
                return Ok(entries);
            };
            self.pos += 1;
            let key = match tok {
                Token::Close if nested => return Ok(entries),
                Token::Word(k) => k,
                other => return Err(Error::parse(line, format!("expected a key, found {other:?}"))),
            };
            let Some((vline, vtok)) = self.tokens.get(self.pos).cloned() else {
                return Err(Error::parse(line, format!("key `{key}` has no value")));
            };
            self.pos += 1;
            let value = match vtok {
                Token::Open => Value::List(self.list(true)?),
                Token::Word(w) | Token::Str(w) => Value::Scalar(w),
                Token::Close => {
                    return Err(Error::parse(vline, format!("key `{key}` has no value")))
                }
            };
            entries.push(Entry { line, key, value });
        }
    }
}

fn int_value(entry: &Entry<'_>) -> Result<i64> {
    match entry.value {
        Value::Scalar(s) => s.parse().map_err(|_| {
            Error::parse(entry.line, format!("`{}` must be an integer, got {s:?}", entry.key))
        }),
        Value::List(_) => Err(Error::parse(
            entry.line,
            format!("`{}` must be an integer, got a list", entry.key),
        )),
    }
}

/// Parses the GML subset
/// `graph [ directed 0|1 node [ id INT ... ] edge [ source INT target INT ... ] ]`.
/// Scalar attributes are ignored; nested lists inside nodes or edges are rejected.
pub fn parse_gml(text: &str) -> Result<Graph> {
    let mut parser = Parser {
        tokens: tokenize(text)?,
        pos: 0,
    };
    let top = parser.list(false)?;

    let mut graph_block = None;
    for entry in &top {
        match (&entry.value, entry.key) {
            (Value::List(body), "graph") => {
                if graph_block.is_some() {
                    return Err(Error::parse(entry.line, "more than one `graph` block"));
                }
                graph_block = Some(body);
            }
            (Value::List(_), key) => {
                return Err(Error::parse(
                    entry.line,
                    format!("unsupported top-level construct `{key}`"),
                ))
            }
            (Value::Scalar(_), _) => {}
        }
    }
    let body = graph_block.ok_or_else(|| Error::parse(parser.last_line(), "no `graph` block"))?;

    let mut directed = false;
    let mut ids: HashMap<i64, usize> = HashMap::new();
    let mut labels = Vec::new();
    let mut raw_edges = Vec::new();
    for entry in body {
        match (entry.key, &entry.value) {
            ("directed", _) => directed = int_value(entry)? != 0,
            ("node", Value::List(attrs)) => {
                let mut id = None;
                for attr in attrs {
                    reject_nested(attr, "node")?;
                    if attr.key == "id" {
                        id = Some(int_value(attr)?);
                    }
                }
                let id = id.ok_or_else(|| Error::parse(entry.line, "node without `id`"))?;
                if ids.insert(id, labels.len()).is_some() {
                    return Err(Error::parse(entry.line, format!("duplicate node id {id}")));
                }
                labels.push(id.to_string());
            }
            ("edge", Value::List(attrs)) => {
                let (mut source, mut target) = (None, None);
                for attr in attrs {
                    reject_nested(attr, "edge")?;
                    match attr.key {
                        "source" => source = Some(int_value(attr)?),
                        "target" => target = Some(int_value(attr)?),
                        _ => {}
                    }
                }
                match (source, target) {
                    (Some(s), Some(t)) => raw_edges.push((entry.line, s, t)),
                    _ => {
                        return Err(Error::parse(entry.line, "edge needs both `source` and `target`"))
                    }
                }
            }
            (key @ ("node" | "edge"), Value::Scalar(_)) => {
                return Err(Error::parse(entry.line, format!("`{key}` must be a list")))
            }
            (key, Value::List(_)) => {
                return Err(Error::parse(
                    entry.line,
                    format!("unsupported construct `{key}` inside graph"),
                ))
            }
            (_, Value::Scalar(_)) => {}
        }
    }

    let mut edges = Vec::with_capacity(raw_edges.len());
    for (line, s, t) in raw_edges {
        let lookup = |id: i64| {
            ids.get(&id)
                .copied()
                .ok_or_else(|| Error::parse(line, format!("edge references missing node {id}")))
        };
        edges.push((lookup(s)?, lookup(t)?));
    }
    Graph::with_labels(labels, edges, directed)
}

fn reject_nested(attr: &Entry<'_>, owner: &str) -> Result<()> {
    if let Value::List(_) = attr.value {
        return Err(Error::parse(
            attr.line,
            format!("unsupported nested construct `{}` in {owner}", attr.key),
        ));
    }
    Ok(())
}
