//! The line-oriented hypergraph text format.
//!
//! ```text
//! nhg d=2 parts=3,3 variant=basic
//! v 0 000
//! v 0 001
//! ...
//! e 0 2
//! ```
//!
//! The header fixes the uniformity, part sizes and variant. Vertex lines
//! follow, part by part; a vertex's index is its position within its part.
//! Edge lines come last and list one 0-based index per part.

use std::collections::HashSet;
use std::io::{self, BufRead, Write};

use nhg_core::{DPartiteHypergraph, Variant, VertexLabel};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        source: nhg_core::Error,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn syntax(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        msg: msg.into(),
    }
}

pub fn write_hypergraph<W: Write>(h: &DPartiteHypergraph, mut out: W) -> io::Result<()> {
    let sizes: Vec<String> = h.part_sizes().iter().map(ToString::to_string).collect();
    writeln!(
        out,
        "nhg d={} parts={} variant={}",
        h.uniformity(),
        sizes.join(","),
        h.variant()
    )?;
    for part in 0..h.uniformity() {
        for label in h.labels(part) {
            writeln!(out, "v {part} {label}")?;
        }
    }
    let mut line = String::new();
    for edge in h.edges() {
        line.clear();
        line.push('e');
        for v in edge {
            line.push(' ');
            line.push_str(&v.to_string());
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    out.flush()
}

pub fn to_text(h: &DPartiteHypergraph) -> String {
    let mut buf = Vec::new();
    write_hypergraph(h, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("labels are UTF-8")
}

fn parse_header(line: &str) -> Result<(Vec<usize>, Variant), String> {
    let mut tokens = line.split(' ');
    if tokens.next() != Some("nhg") {
        return Err("expected header starting with 'nhg'".into());
    }
    let mut field = |key: &str| -> Result<String, String> {
        tokens
            .next()
            .and_then(|t| t.strip_prefix(key))
            .and_then(|t| t.strip_prefix('='))
            .map(str::to_owned)
            .ok_or_else(|| format!("expected '{key}=' in header"))
    };
    let d: usize = field("d")?
        .parse()
        .map_err(|_| "bad d in header".to_string())?;
    let parts = field("parts")?
        .split(',')
        .map(|s| s.parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| "bad part sizes in header".to_string())?;
    let variant: Variant = field("variant")?
        .parse()
        .map_err(|e: nhg_core::Error| e.to_string())?;
    if tokens.next().is_some() {
        return Err("trailing tokens in header".into());
    }
    if d < 1 || parts.len() != d {
        return Err(format!(
            "header declares d={d} but {} part sizes",
            parts.len()
        ));
    }
    Ok((parts, variant))
}

pub fn read_hypergraph<R: BufRead>(input: R) -> Result<DPartiteHypergraph, FormatError> {
    let mut lines = input.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (sizes, variant) = match lines.next() {
        Some((n, line)) => parse_header(&line?).map_err(|m| syntax(n, m))?,
        None => return Err(syntax(1, "empty input")),
    };
    let d = sizes.len();
    let mut parts: Vec<Vec<VertexLabel>> = vec![Vec::new(); d];
    let mut seen_labels: Vec<HashSet<VertexLabel>> = vec![HashSet::new(); d];
    let mut current_part = 0usize;
    let mut skeleton: Option<DPartiteHypergraph> = None;
    let mut codes = Vec::new();
    let mut seen_codes = HashSet::new();
    let mut last_line = 1;
    for (n, line) in lines {
        let line = line?;
        last_line = n;
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split(' ');
        match tokens.next() {
            Some("v") => {
                if skeleton.is_some() {
                    return Err(syntax(n, "vertex line after edge lines"));
                }
                let part: usize = tokens
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| syntax(n, "vertex line needs a part index"))?;
                if part >= d {
                    return Err(syntax(n, format!("part {part} out of range 0..{d}")));
                }
                if part < current_part {
                    return Err(syntax(n, "vertex lines must be grouped by part in order"));
                }
                current_part = part;
                if parts[part].len() == sizes[part] {
                    return Err(syntax(
                        n,
                        format!("part {part} has more than {} vertices", sizes[part]),
                    ));
                }
                let text = tokens
                    .next()
                    .ok_or_else(|| syntax(n, "vertex line needs a label"))?;
                if tokens.next().is_some() {
                    return Err(syntax(n, "trailing tokens after label"));
                }
                let label = VertexLabel::parse(text, variant)
                    .map_err(|e| FormatError::Invalid { line: n, source: e })?;
                if !seen_labels[part].insert(label.clone()) {
                    return Err(syntax(n, format!("duplicate label {label} in part {part}")));
                }
                parts[part].push(label);
            }
            Some("e") => {
                if skeleton.is_none() {
                    skeleton = Some(finish_parts(&sizes, variant, &parts, n)?);
                }
                let h = skeleton.as_ref().unwrap();
                let edge = tokens
                    .map(|t| t.parse::<u32>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| syntax(n, "edge indices must be non-negative integers"))?;
                if edge.len() != d {
                    return Err(syntax(
                        n,
                        format!("edge has {} indices, expected {d}", edge.len()),
                    ));
                }
                let code = h
                    .encode(&edge)
                    .map_err(|e| FormatError::Invalid { line: n, source: e })?;
                if !seen_codes.insert(code) {
                    return Err(syntax(n, "duplicate edge"));
                }
                codes.push(code);
            }
            _ => return Err(syntax(n, "expected a 'v' or 'e' line")),
        }
    }
    let skeleton = match skeleton {
        Some(h) => h,
        None => finish_parts(&sizes, variant, &parts, last_line + 1)?,
    };
    codes.sort_unstable();
    DPartiteHypergraph::from_sorted_codes(
        variant,
        (0..d).map(|i| skeleton.labels(i).to_vec()).collect(),
        codes,
    )
    .map_err(|e| FormatError::Invalid {
        line: last_line,
        source: e,
    })
}

fn finish_parts(
    sizes: &[usize],
    variant: Variant,
    parts: &[Vec<VertexLabel>],
    line: usize,
) -> Result<DPartiteHypergraph, FormatError> {
    for (i, (part, &n)) in parts.iter().zip(sizes).enumerate() {
        if part.len() != n {
            return Err(syntax(
                line,
                format!("part {i} has {} vertices, header declares {n}", part.len()),
            ));
        }
    }
    DPartiteHypergraph::empty(variant, parts.to_vec())
        .map_err(|e| FormatError::Invalid { line, source: e })
}

pub fn parse_hypergraph(text: &str) -> Result<DPartiteHypergraph, FormatError> {
    read_hypergraph(text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> Vec<VertexLabel> {
        (0..n)
            .map(|i| VertexLabel::Element(format!("{i}")))
            .collect()
    }

    #[test]
    fn empty_hypergraph_is_header_and_vertices() {
        let h = DPartiteHypergraph::empty(Variant::Basic, vec![labels(2), labels(1)]).unwrap();
        let text = to_text(&h);
        assert_eq!(
            text,
            "nhg d=2 parts=2,1 variant=basic\nv 0 0\nv 0 1\nv 1 0\n"
        );
        assert_eq!(parse_hypergraph(&text).unwrap(), h);
    }

    #[test]
    fn no_vertices_at_all() {
        let h = DPartiteHypergraph::empty(Variant::Basic, vec![vec![], vec![]]).unwrap();
        assert_eq!(to_text(&h), "nhg d=2 parts=0,0 variant=basic\n");
        assert_eq!(parse_hypergraph(&to_text(&h)).unwrap(), h);
    }

    #[test]
    fn single_edge_round_trip() {
        let parts = vec![
            vec![
                VertexLabel::Pair("01".into(), 1),
                VertexLabel::Pair("01".into(), 2),
            ],
            vec![VertexLabel::Pair("10".into(), 2)],
        ];
        let h = DPartiteHypergraph::new(Variant::Projective, parts, [[1u32, 0]]).unwrap();
        let text = to_text(&h);
        assert!(text.ends_with("v 1 10,2\ne 1 0\n"));
        assert_eq!(parse_hypergraph(&text).unwrap(), h);
    }

    #[test]
    fn errors_name_the_line() {
        let cases = [
            ("", 1),
            ("nhg d=2 parts=1 variant=basic\n", 1),
            ("nhg d=2 parts=1,1 variant=basic\nv 0 a\nv 1 b\ne 0 1\n", 4),
            ("nhg d=2 parts=1,1 variant=basic\nv 0 a\nv 1 b\ne 0\n", 4),
            (
                "nhg d=2 parts=1,1 variant=basic\nv 0 a\nv 1 b\ne 0 0\ne 0 0\n",
                5,
            ),
            ("nhg d=2 parts=1,1 variant=basic\nv 0 a\nv 0 b\n", 3),
            ("nhg d=2 parts=2,1 variant=basic\nv 0 a\nv 1 b\ne 0 0\n", 4),
            ("nhg d=1 parts=1 variant=projective\nv 0 a\n", 2),
            ("nhg d=2 parts=1,1 variant=basic\nv 1 a\nv 0 b\n", 3),
            ("nhg d=2 parts=1,1 variant=basic\nx\n", 2),
        ];
        for (text, line) in cases {
            let err = parse_hypergraph(text).unwrap_err();
            let got = match &err {
                FormatError::Syntax { line, .. } | FormatError::Invalid { line, .. } => *line,
                FormatError::Io(_) => 0,
            };
            assert_eq!(got, line, "{text:?}: {err}");
            assert!(err.to_string().starts_with(&format!("line {line}:")));
        }
    }
}
