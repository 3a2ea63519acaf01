//! Line-oriented text formats for graphs and realizations.

use std::collections::HashSet;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::error::{Error, Result};
use crate::geom::{Rational, Realization};
use crate::graph::{Graph, GraphBuilder};

/// Colors from files stay below this bound so that internally reserved
/// colors (anchors) can never collide with them.
pub const MAX_FILE_COLOR: u64 = u32::MAX as u64;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Parse the `usqgraph 1` format: `n <count>`, optional `c <vertex> <color>`
/// lines, `e <u> <v>` lines with `u < v` and no duplicates. `#` starts a
/// comment.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = meaningful_lines(text);
    let (ln, header) = lines
        .next()
        .ok_or_else(|| parse_err(0, "empty input"))?;
    if header.trim() != "usqgraph 1" {
        return Err(parse_err(ln, "expected header `usqgraph 1`"));
    }
    let (ln, nline) = lines
        .next()
        .ok_or_else(|| parse_err(ln, "missing `n <count>` line"))?;
    let mut parts = nline.split_whitespace();
    if parts.next() != Some("n") {
        return Err(parse_err(ln, "expected `n <count>`"));
    }
    let n: usize = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| parse_err(ln, "bad vertex count"))?;
    if parts.next().is_some() {
        return Err(parse_err(ln, "trailing tokens after count"));
    }
    let mut b = GraphBuilder::new(n);
    let mut seen_edges: HashSet<(usize, usize)> = HashSet::new();
    for (ln, line) in lines {
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("c") => {
                let v: usize = parts
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| parse_err(ln, "bad vertex in color line"))?;
                let c: u64 = parts
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| parse_err(ln, "bad color"))?;
                if v >= n {
                    return Err(parse_err(ln, format!("vertex {v} out of range")));
                }
                if c > MAX_FILE_COLOR {
                    return Err(parse_err(ln, format!("color {c} exceeds supported range")));
                }
                b.set_color(v, c);
            }
            Some("e") => {
                let u: usize = parts
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| parse_err(ln, "bad endpoint"))?;
                let v: usize = parts
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| parse_err(ln, "bad endpoint"))?;
                if !(u < v && v < n) {
                    return Err(parse_err(ln, format!("edge {u} {v} must satisfy u < v < n")));
                }
                if !seen_edges.insert((u, v)) {
                    return Err(parse_err(ln, format!("duplicate edge {u} {v}")));
                }
                b.add_edge(u, v);
            }
            Some(tok) => return Err(parse_err(ln, format!("unknown directive `{tok}`"))),
            None => {}
        }
        if parts.next().is_some() {
            return Err(parse_err(ln, "trailing tokens"));
        }
    }
    Ok(b.build())
}

/// Normalized form: header, count, sorted color lines for nonzero colors,
/// sorted edge lines.
pub fn write_graph(g: &Graph) -> String {
    let mut out = String::from("usqgraph 1\n");
    out.push_str(&format!("n {}\n", g.n()));
    for v in 0..g.n() {
        if g.color(v) != 0 {
            out.push_str(&format!("c {} {}\n", v, g.color(v)));
        }
    }
    for (u, v) in g.edges() {
        out.push_str(&format!("e {u} {v}\n"));
    }
    out
}

/// Parse the `usqreal 1` format: `p <vertex> <xnum>/<xden> <ynum>/<yden>`.
pub fn parse_realization(text: &str) -> Result<Realization> {
    let mut lines = meaningful_lines(text);
    let (ln, header) = lines
        .next()
        .ok_or_else(|| parse_err(0, "empty input"))?;
    if header.trim() != "usqreal 1" {
        return Err(parse_err(ln, "expected header `usqreal 1`"));
    }
    let mut coords: Vec<(usize, Rational, Rational)> = Vec::new();
    for (ln, line) in lines {
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("p") => {
                let v: usize = parts
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| parse_err(ln, "bad vertex"))?;
                let x = parse_rational(parts.next(), ln)?;
                let y = parse_rational(parts.next(), ln)?;
                if parts.next().is_some() {
                    return Err(parse_err(ln, "trailing tokens"));
                }
                coords.push((v, x, y));
            }
            Some(tok) => return Err(parse_err(ln, format!("unknown directive `{tok}`"))),
            None => {}
        }
    }
    let n = coords.iter().map(|(v, _, _)| v + 1).max().unwrap_or(0);
    let mut points = vec![None; n];
    for (v, x, y) in coords {
        if points[v].replace((x, y)).is_some() {
            return Err(parse_err(0, format!("vertex {v} listed twice")));
        }
    }
    let points: Vec<(Rational, Rational)> = points
        .into_iter()
        .enumerate()
        .map(|(v, p)| p.ok_or_else(|| parse_err(0, format!("vertex {v} missing"))))
        .collect::<Result<_>>()?;
    Ok(Realization { points })
}

pub fn write_realization(f: &Realization) -> String {
    let mut out = String::from("usqreal 1\n");
    for (v, (x, y)) in f.points.iter().enumerate() {
        out.push_str(&format!(
            "p {} {}/{} {}/{}\n",
            v,
            x.numer(),
            x.denom(),
            y.numer(),
            y.denom()
        ));
    }
    out
}

fn parse_rational(tok: Option<&str>, ln: usize) -> Result<Rational> {
    let tok = tok.ok_or_else(|| parse_err(ln, "missing coordinate"))?;
    let (num, den) = match tok.split_once('/') {
        Some((a, b)) => (a, b),
        None => (tok, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| parse_err(ln, "bad numerator"))?;
    let den = BigInt::from_str(den).map_err(|_| parse_err(ln, "bad denominator"))?;
    if !den.is_positive() {
        return Err(parse_err(ln, "denominator must be positive"));
    }
    Ok(Rational::new(num, den))
}

fn meaningful_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            None
        } else {
            Some((i + 1, line))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::ratio;
    use crate::oracle::random_colored_graph;

    #[test]
    fn minimal_graph() {
        let g = parse_graph("usqgraph 1\nn 1\n").unwrap();
        assert_eq!(g.n(), 1);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn comments_and_colors() {
        let g = parse_graph("# a file\nusqgraph 1\nn 3 # three\nc 1 5\ne 0 1\ne 1 2\n").unwrap();
        assert_eq!(g.color(1), 5);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn rejects_duplicates_and_bad_edges() {
        assert!(parse_graph("usqgraph 1\nn 3\ne 0 1\ne 0 1\n").is_err());
        assert!(parse_graph("usqgraph 1\nn 3\ne 1 0\n").is_err());
        assert!(parse_graph("usqgraph 1\nn 3\ne 0 3\n").is_err());
        assert!(parse_graph("usqgraph 1\nn 3\nq 1\n").is_err());
        let err = parse_graph("usqgraph 1\nn 2\ne 0 1\ne 0 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }));
    }

    #[test]
    fn graph_round_trip() {
        for seed in 0..100 {
            let g = random_colored_graph(12, 30, 3, seed);
            let text = write_graph(&g);
            let back = parse_graph(&text).unwrap();
            assert_eq!(write_graph(&back), text, "seed {seed}");
            assert_eq!(back, g);
        }
    }

    #[test]
    fn realization_round_trip() {
        let f = Realization {
            points: vec![(ratio(1, 2), ratio(-3, 4)), (ratio(0, 1), ratio(5, 1))],
        };
        let text = write_realization(&f);
        let back = parse_realization(&text).unwrap();
        assert_eq!(back, f);
        assert_eq!(write_realization(&back), text);
    }

    #[test]
    fn realization_rejects_gaps() {
        assert!(parse_realization("usqreal 1\np 1 0/1 0/1\n").is_err());
        assert!(parse_realization("usqreal 1\np 0 0/0 0/1\n").is_err());
    }
}
