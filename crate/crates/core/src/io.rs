//! Line-oriented text format for query graphs.
//!
//! ```text
//! # comment
//! relations 2
//! rel 0 orders 1500000
//! rel 1 customer 150000
//! predicates 1
//! pred 0 1 0.0000066666666666666666
//! ```
//!
//! Numbers are written with the shortest decimal representation that parses
//! back to the identical `f64`, so `read_graph(write_graph(g)) == g` holds
//! bit for bit.

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{Predicate, QueryGraph, Relation};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {message}")]
pub struct FormatError {
    /// 1-based line number; 0 when the problem is not tied to a line.
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError {
        line,
        message: message.into(),
    }
}

pub fn write_graph(graph: &QueryGraph) -> Result<String, FormatError> {
    let mut out = String::new();
    writeln!(out, "relations {}", graph.n_relations()).unwrap();
    for rel in graph.relations() {
        if rel.name.is_empty() || rel.name.chars().any(char::is_whitespace) {
            return Err(err(
                0,
                format!(
                    "relation {} has a name that is empty or contains whitespace",
                    rel.id
                ),
            ));
        }
        writeln!(out, "rel {} {} {}", rel.id, rel.name, rel.cardinality).unwrap();
    }
    writeln!(out, "predicates {}", graph.n_predicates()).unwrap();
    for p in graph.predicates() {
        writeln!(out, "pred {} {} {}", p.rel_a, p.rel_b, p.selectivity).unwrap();
    }
    Ok(out)
}

pub fn read_graph(text: &str) -> Result<QueryGraph, FormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let last_line = text.lines().count();
    let mut next = |what: &str| {
        lines.next().ok_or_else(|| {
            err(
                last_line,
                format!("unexpected end of input, expected {what}"),
            )
        })
    };

    let (line, header) = next("'relations <R>'")?;
    let n_rel = parse_header(line, header, "relations")?;
    if n_rel < 2 {
        return Err(err(line, "at least 2 relations required"));
    }

    let mut slots: Vec<Option<Relation>> = vec![None; n_rel];
    for _ in 0..n_rel {
        let (line, l) = next("'rel <id> <name> <cardinality>'")?;
        let fields = split_record(line, l, "rel", 3)?;
        let id = parse_index(line, fields[0], "relation id")?;
        if id >= n_rel {
            return Err(err(
                line,
                format!("relation id {id} out of range 0..{n_rel}"),
            ));
        }
        if slots[id].is_some() {
            return Err(err(line, format!("relation id {id} declared twice")));
        }
        let cardinality = parse_real(line, fields[2], "cardinality")?;
        if cardinality < 1.0 {
            return Err(err(line, format!("cardinality {cardinality} below 1")));
        }
        slots[id] = Some(Relation {
            id,
            name: fields[1].to_string(),
            cardinality,
        });
    }
    // n_rel distinct in-range ids were read, so every slot is filled.
    let relations: Vec<Relation> = slots.into_iter().map(Option::unwrap).collect();

    let (line, header) = next("'predicates <P>'")?;
    let n_pred = parse_header(line, header, "predicates")?;
    let mut predicates = Vec::with_capacity(n_pred);
    for _ in 0..n_pred {
        let (line, l) = next("'pred <id_a> <id_b> <selectivity>'")?;
        let fields = split_record(line, l, "pred", 3)?;
        let rel_a = parse_index(line, fields[0], "relation id")?;
        let rel_b = parse_index(line, fields[1], "relation id")?;
        for r in [rel_a, rel_b] {
            if r >= n_rel {
                return Err(err(
                    line,
                    format!("predicate references unknown relation {r}"),
                ));
            }
        }
        if rel_a == rel_b {
            return Err(err(
                line,
                format!("predicate joins relation {rel_a} with itself"),
            ));
        }
        let selectivity = parse_real(line, fields[2], "selectivity")?;
        if !(selectivity > 0.0 && selectivity <= 1.0) {
            return Err(err(line, "selectivity out of (0,1]"));
        }
        predicates.push(Predicate {
            rel_a,
            rel_b,
            selectivity,
        });
    }

    if let Some((line, extra)) = lines.next() {
        return Err(err(line, format!("unexpected trailing content '{extra}'")));
    }
    QueryGraph::new(relations, predicates).map_err(|e| err(0, e.to_string()))
}

fn parse_header(line: usize, l: &str, keyword: &str) -> Result<usize, FormatError> {
    let fields = split_record(line, l, keyword, 1)?;
    parse_index(line, fields[0], "count")
}

fn split_record<'a>(
    line: usize,
    l: &'a str,
    keyword: &str,
    arity: usize,
) -> Result<Vec<&'a str>, FormatError> {
    let mut it = l.split_whitespace();
    match it.next() {
        Some(k) if k == keyword => {}
        Some(k) => return Err(err(line, format!("expected '{keyword}', found '{k}'"))),
        None => return Err(err(line, format!("expected '{keyword}'"))),
    }
    let fields: Vec<&str> = it.collect();
    if fields.len() != arity {
        return Err(err(
            line,
            format!("'{keyword}' takes {arity} field(s), found {}", fields.len()),
        ));
    }
    Ok(fields)
}

fn parse_index(line: usize, s: &str, what: &str) -> Result<usize, FormatError> {
    s.parse()
        .map_err(|_| err(line, format!("invalid {what} '{s}'")))
}

fn parse_real(line: usize, s: &str, what: &str) -> Result<f64, FormatError> {
    // f64::from_str also accepts "inf" and "NaN"; the format only has plain decimals.
    let ok_chars = s
        .chars()
        .all(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'));
    match s.parse::<f64>() {
        Ok(v) if ok_chars && v.is_finite() => Ok(v),
        _ => Err(err(line, format!("invalid {what} '{s}'"))),
    }
}
