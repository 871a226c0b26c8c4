//! Text formats for problem instances.
//!
//! Native:
//! ```text
//! ising <n>
//! h <i> <value>
//! J <i> <j> <value>
//! ```
//! Gset max-cut: a `<n> <m>` header then `m` lines `<i> <j> <w>`, 1-indexed.
//! Edges become antiferromagnetic couplings `J_ij = -w`, so for a state `s`
//! the cut weight is `(W - E(s)) / 2` with `W` the total edge weight.
//!
//! QUBO: `qubo <n>` then upper-triangular entries `Q <i> <j> <value>` (`i <= j`),
//! objective `sum_{i<=j} Q_ij x_i x_j` over `x in {0,1}^n`.
//!
//! Indices in the native and QUBO formats are 0-based. Blank lines and lines
//! starting with `#` are ignored in all three.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::IsingModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Native,
    Gset,
    Qubo,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "native" | "ising" => Ok(Format::Native),
            "gset" => Ok(Format::Gset),
            "qubo" => Ok(Format::Qubo),
            other => Err(format!("unknown format `{other}` (native, gset, qubo)")),
        }
    }
}

/// A parsed instance and what is needed to map Ising energies back to the
/// source objective.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedModel {
    pub model: IsingModel,
    pub source: Source,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Source {
    Native,
    /// `cut = (total_weight - E) / 2`.
    Gset {
        total_weight: f64,
    },
    /// `objective = E + offset`.
    Qubo {
        offset: f64,
    },
}

pub fn parse_model(text: &str, format: Format) -> Result<LoadedModel> {
    match format {
        Format::Native => Ok(LoadedModel {
            model: parse_native(text)?,
            source: Source::Native,
        }),
        Format::Gset => {
            let (model, total_weight) = parse_gset(text)?;
            Ok(LoadedModel {
                model,
                source: Source::Gset { total_weight },
            })
        }
        Format::Qubo => {
            let qubo = parse_qubo(text)?;
            let (model, offset) = qubo_to_ising(&qubo)?;
            Ok(LoadedModel {
                model,
                source: Source::Qubo { offset },
            })
        }
    }
}

/// Non-empty, non-comment lines with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            None
        } else {
            Some((i + 1, trimmed.split_whitespace().collect()))
        }
    })
}

fn parse_num<T: FromStr>(line: usize, token: &str, what: &str) -> Result<T> {
    token
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid {what} `{token}`")))
}

fn parse_weight(line: usize, token: &str) -> Result<f64> {
    let v: f64 = parse_num(line, token, "value")?;
    if !v.is_finite() {
        return Err(Error::parse(line, format!("non-finite value `{token}`")));
    }
    Ok(v)
}

fn parse_index(line: usize, token: &str, n: usize) -> Result<usize> {
    let i: usize = parse_num(line, token, "index")?;
    if i >= n {
        return Err(Error::parse(
            line,
            format!("index {i} out of range for n={n}"),
        ));
    }
    Ok(i)
}

fn expect_arity(line: usize, tokens: &[&str], arity: usize) -> Result<()> {
    if tokens.len() != arity {
        return Err(Error::parse(
            line,
            format!("expected {arity} fields, found {}", tokens.len()),
        ));
    }
    Ok(())
}

pub fn parse_native(text: &str) -> Result<IsingModel> {
    let mut lines = content_lines(text);
    let (line, head) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing `ising <n>` header"))?;
    if head.len() != 2 || head[0] != "ising" {
        return Err(Error::parse(line, "expected header `ising <n>`"));
    }
    let n: usize = parse_num(line, head[1], "spin count")?;
    if n == 0 {
        return Err(Error::parse(line, "spin count must be positive"));
    }

    let mut biases = vec![0.0; n];
    let mut seen_bias = vec![false; n];
    let mut seen_pairs = HashSet::new();
    let mut couplings = Vec::new();
    for (line, tokens) in lines {
        match tokens[0] {
            "h" => {
                expect_arity(line, &tokens, 3)?;
                let i = parse_index(line, tokens[1], n)?;
                if std::mem::replace(&mut seen_bias[i], true) {
                    return Err(Error::parse(line, format!("duplicate bias for spin {i}")));
                }
                biases[i] = parse_weight(line, tokens[2])?;
            }
            "J" => {
                expect_arity(line, &tokens, 4)?;
                let i = parse_index(line, tokens[1], n)?;
                let j = parse_index(line, tokens[2], n)?;
                if i == j {
                    return Err(Error::parse(line, format!("self-coupling on spin {i}")));
                }
                if !seen_pairs.insert((i.min(j), i.max(j))) {
                    return Err(Error::parse(line, format!("duplicate coupling ({i},{j})")));
                }
                couplings.push((i, j, parse_weight(line, tokens[3])?));
            }
            other => {
                return Err(Error::parse(line, format!("unknown record `{other}`")));
            }
        }
    }
    IsingModel::new(n, biases, couplings)
}

/// Parses a Gset instance; returns the model and the total edge weight.
pub fn parse_gset(text: &str) -> Result<(IsingModel, f64)> {
    let mut lines = content_lines(text);
    let (line, head) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing `<n> <m>` header"))?;
    expect_arity(line, &head, 2)?;
    let n: usize = parse_num(line, head[0], "node count")?;
    let m: usize = parse_num(line, head[1], "edge count")?;
    if n == 0 {
        return Err(Error::parse(line, "node count must be positive"));
    }

    let mut seen = HashSet::new();
    let mut couplings = Vec::with_capacity(m);
    let mut total = 0.0;
    let mut last_line = line;
    for (line, tokens) in lines {
        last_line = line;
        expect_arity(line, &tokens, 3)?;
        if couplings.len() == m {
            return Err(Error::parse(
                line,
                format!("more than the declared {m} edges"),
            ));
        }
        let i: usize = parse_num(line, tokens[0], "node")?;
        let j: usize = parse_num(line, tokens[1], "node")?;
        if i == 0 || j == 0 || i > n || j > n {
            return Err(Error::parse(line, format!("node out of range 1..={n}")));
        }
        if i == j {
            return Err(Error::parse(line, format!("self-loop on node {i}")));
        }
        let (a, b) = (i.min(j) - 1, i.max(j) - 1);
        if !seen.insert((a, b)) {
            return Err(Error::parse(line, format!("duplicate edge ({i},{j})")));
        }
        let w = parse_weight(line, tokens[2])?;
        total += w;
        couplings.push((a, b, -w));
    }
    if couplings.len() != m {
        return Err(Error::parse(
            last_line,
            format!("declared {m} edges, found {}", couplings.len()),
        ));
    }
    Ok((IsingModel::new(n, vec![0.0; n], couplings)?, total))
}

/// Upper-triangular QUBO matrix in sparse form.
#[derive(Debug, Clone, PartialEq)]
pub struct Qubo {
    pub n: usize,
    /// `(i, j, Q_ij)` with `i <= j`.
    pub entries: Vec<(usize, usize, f64)>,
}

impl Qubo {
    pub fn new(n: usize, entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        let mut seen = HashSet::new();
        for &(i, j, v) in &entries {
            if i > j || j >= n {
                return Err(Error::contract(format!(
                    "entry ({i},{j}) not upper-triangular in n={n}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::contract(format!("entry ({i},{j}) is not finite")));
            }
            if !seen.insert((i, j)) {
                return Err(Error::contract(format!("duplicate entry ({i},{j})")));
            }
        }
        Ok(Self { n, entries })
    }

    /// `sum_{i<=j} Q_ij x_i x_j` for binary `x`.
    pub fn objective(&self, x: &[u8]) -> f64 {
        self.entries
            .iter()
            .map(|&(i, j, q)| q * f64::from(x[i] & x[j]))
            .sum()
    }
}

pub fn parse_qubo(text: &str) -> Result<Qubo> {
    let mut lines = content_lines(text);
    let (line, head) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing `qubo <n>` header"))?;
    if head.len() != 2 || head[0] != "qubo" {
        return Err(Error::parse(line, "expected header `qubo <n>`"));
    }
    let n: usize = parse_num(line, head[1], "variable count")?;
    if n == 0 {
        return Err(Error::parse(line, "variable count must be positive"));
    }
    let mut seen = HashSet::new();
    let mut entries = Vec::new();
    for (line, tokens) in lines {
        if tokens[0] != "Q" {
            return Err(Error::parse(
                line,
                format!("unknown record `{}`", tokens[0]),
            ));
        }
        expect_arity(line, &tokens, 4)?;
        let i = parse_index(line, tokens[1], n)?;
        let j = parse_index(line, tokens[2], n)?;
        if i > j {
            return Err(Error::parse(
                line,
                format!("entry ({i},{j}) below the diagonal"),
            ));
        }
        if !seen.insert((i, j)) {
            return Err(Error::parse(line, format!("duplicate entry ({i},{j})")));
        }
        entries.push((i, j, parse_weight(line, tokens[3])?));
    }
    Qubo::new(n, entries)
}

/// Maps a QUBO onto the Ising convention via `x_i = (1 + s_i) / 2`:
///
/// ```text
/// J_ij = -Q_ij / 4                                   (i < j)
/// h_i  = -(Q_ii / 2 + sum_{j != i} Q_ij / 4)
/// offset = sum_i Q_ii / 2 + sum_{i<j} Q_ij / 4
/// ```
///
/// so that `objective(x) = energy(s) + offset`.
pub fn qubo_to_ising(qubo: &Qubo) -> Result<(IsingModel, f64)> {
    let n = qubo.n;
    let mut linear = vec![0.0; n];
    let mut couplings = Vec::new();
    let mut offset = 0.0;
    for &(i, j, q) in &qubo.entries {
        if i == j {
            linear[i] += q / 2.0;
            offset += q / 2.0;
        } else {
            linear[i] += q / 4.0;
            linear[j] += q / 4.0;
            offset += q / 4.0;
            if q != 0.0 {
                couplings.push((i, j, -q / 4.0));
            }
        }
    }
    // `+ 0.0` turns -0.0 into 0.0.
    let biases = linear.into_iter().map(|a| -a + 0.0).collect();
    Ok((IsingModel::new(n, biases, couplings)?, offset + 0.0))
}

/// Serialises in the native format. Zero biases are omitted; `f64` display
/// round-trips exactly.
pub fn write_native(model: &IsingModel) -> String {
    let mut out = String::new();
    writeln!(out, "ising {}", model.n()).expect("string write");
    for (i, &h) in model.biases().iter().enumerate() {
        if h != 0.0 {
            writeln!(out, "h {i} {h}").expect("string write");
        }
    }
    for &(i, j, v) in model.couplings() {
        writeln!(out, "J {i} {j} {v}").expect("string write");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gset_maps_to_antiferromagnet() {
        let (m, w) = parse_gset("2 1\n1 2 1\n").unwrap();
        assert_eq!(m.n(), 2);
        assert_eq!(m.coupling(0, 1), -1.0);
        assert_eq!(m.biases(), &[0.0, 0.0]);
        assert_eq!(w, 1.0);
    }

    #[test]
    fn gset_errors() {
        assert!(matches!(
            parse_gset("2 2\n1 2 1\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_gset("2 1\n1 3 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(parse_gset("3 2\n1 2 1\n2 1 1\n").is_err());
        assert!(parse_gset("3 1\n2 2 1\n").is_err());
        assert!(parse_gset("3 1\n1 2 x\n").is_err());
    }

    #[test]
    fn native_examples() {
        let m = parse_native("ising 1\nh 0 0.5\n").unwrap();
        assert_eq!(m.n(), 1);
        assert_eq!(m.biases(), &[0.5]);

        let err = parse_native("ising 3\nJ 0 1 1\nJ 1 0 2\n").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 3,
                message: "duplicate coupling (1,0)".into()
            }
        );
        assert!(matches!(
            parse_native("ising 2\nJ 0 2 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(parse_native("ising 2\nK 0 1 1\n").is_err());
        assert!(parse_native("ising 2\nJ 0 1\n").is_err());
        assert!(parse_native("ising 2\nh 0 1\nh 0 2\n").is_err());
        assert!(parse_native("spins 2\n").is_err());
        assert!(parse_native("").is_err());
    }

    #[test]
    fn native_comments_and_blank_lines() {
        let m = parse_native("# demo\nising 2\n\nJ 1 0 -0.25\n# trailing\n").unwrap();
        assert_eq!(m.coupling(0, 1), -0.25);
    }

    #[test]
    fn native_round_trip() {
        let m = crate::generators::random_model(12, 0.4, 1.0, 8);
        let back = parse_native(&write_native(&m)).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn qubo_single_variable() {
        let q = parse_qubo("qubo 1\nQ 0 0 1\n").unwrap();
        let (m, offset) = qubo_to_ising(&q).unwrap();
        let g = m.ground_states().unwrap();
        assert_eq!(g.states.len(), 1);
        assert_eq!(g.states[0].get(0), -1);
        assert_eq!(g.energy + offset, 0.0);
    }

    #[test]
    fn zero_qubo_maps_to_zero_model() {
        let q = Qubo::new(3, vec![]).unwrap();
        let (m, offset) = qubo_to_ising(&q).unwrap();
        assert!(m.couplings().is_empty());
        assert!(m.biases().iter().all(|&h| h == 0.0 && h.is_sign_positive()));
        assert_eq!(offset, 0.0);
    }

    #[test]
    fn qubo_errors() {
        assert!(matches!(
            parse_qubo("qubo 2\nQ 1 0 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(parse_qubo("qubo 2\nQ 0 1 1\nQ 0 1 2\n").is_err());
        assert!(parse_qubo("qubo 2\nQ 0 2 1\n").is_err());
        assert!(Qubo::new(2, vec![(1, 0, 1.0)]).is_err());
    }

    #[test]
    fn format_names() {
        assert_eq!("gset".parse::<Format>().unwrap(), Format::Gset);
        assert!("xml".parse::<Format>().is_err());
    }
}
