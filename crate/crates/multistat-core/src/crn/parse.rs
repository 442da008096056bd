//! Line-oriented network file format.
//!
//! ```text
//! species: X1 X2 X3 X4 X5 X6
//! partition: 1: X1 X2 X3 X4 ; 2: X5 X6
//! reaction: X3 + X5 -> X1 + X6 ; k4 = 1.0
//! totals: T1 = 1.75 ; T2 = 1
//! chosen: X4 X5
//! ```
//!
//! `#` starts a comment. Block 0 of a partition holds the intermediates.
//! A reaction's rate may be given as `name = value`, `name`, or omitted
//! (then it is named `k<index>`).

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};

use super::messi::Partition;
use super::{Complex, Network};
use crate::linalg::Q;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, message: message.into() }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkFile {
    pub network: Network,
    pub partition: Option<Partition>,
    /// Named totals in block order.
    pub totals: Option<Vec<(String, Q)>>,
    /// Species chosen as parametrization variables.
    pub chosen: Option<Vec<usize>>,
}

/// Parse `3/4`, `1.75`, `2`, `1e-3` exactly.
pub fn parse_rational(s: &str) -> Option<Q> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Q::new(n, d));
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(p) => (&s[..p], s[p + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let num: BigInt = digits.parse().ok()?;
    let ten = BigInt::from(10);
    let shift = exp - frac.len() as i32;
    let mut v = if shift >= 0 {
        Q::from_integer(num * Pow::pow(&ten, shift as u32))
    } else {
        Q::new(num, Pow::pow(&ten, (-shift) as u32))
    };
    if neg {
        v = -v;
    }
    Some(v)
}

fn parse_complex(text: &str, species: &[String], line: usize) -> Result<Complex, ParseError> {
    let mut c = vec![0i64; species.len()];
    let text = text.trim();
    if text == "0" || text == "∅" {
        return Ok(c);
    }
    for tok in text.split('+') {
        let tok = tok.trim();
        if tok.is_empty() {
            return Err(err(line, "empty term in complex"));
        }
        let split = tok.find(|ch: char| !ch.is_ascii_digit()).unwrap_or(tok.len());
        let (mult, name) = tok.split_at(split);
        let name = name.trim().trim_start_matches('*').trim();
        let mult: i64 = if mult.is_empty() { 1 } else { mult.parse().map_err(|_| err(line, "bad multiplier"))? };
        if name.is_empty() {
            return Err(err(line, format!("missing species name in '{tok}'")));
        }
        let idx = species.iter().position(|s| s == name).ok_or_else(|| err(line, format!("unknown species '{name}'")))?;
        c[idx] += mult;
    }
    Ok(c)
}

/// Parse a partition spec such as `0: U1 ; 1: E ; 2: S0 S1`.
pub fn parse_partition(text: &str, net: &Network) -> Result<Partition, String> {
    let mut intermediates = Vec::new();
    let mut numbered: Vec<(usize, Vec<usize>)> = Vec::new();
    for seg in text.split(';') {
        let seg = seg.trim();
        if seg.is_empty() {
            continue;
        }
        let (label, names) = seg.split_once(':').ok_or_else(|| format!("partition segment '{seg}' lacks ':'"))?;
        let label: usize = label.trim().parse().map_err(|_| format!("bad block label '{}'", label.trim()))?;
        let mut members = Vec::new();
        for name in names.split_whitespace() {
            members.push(net.species_index(name).ok_or_else(|| format!("unknown species '{name}' in partition"))?);
        }
        if label == 0 {
            intermediates.extend(members);
        } else {
            if numbered.iter().any(|(l, _)| *l == label) {
                return Err(format!("block {label} listed twice"));
            }
            numbered.push((label, members));
        }
    }
    numbered.sort_by_key(|(l, _)| *l);
    for (i, (l, _)) in numbered.iter().enumerate() {
        if *l != i + 1 {
            return Err(format!("core blocks must be numbered 1..m, missing block {}", i + 1));
        }
    }
    let blocks = numbered.into_iter().map(|(_, m)| m).collect();
    Partition::new(net.num_species(), intermediates, blocks).map_err(|e| e.to_string())
}

/// Parse the `name = value ; name = value` list used for totals.
pub fn parse_assignments(text: &str) -> Result<Vec<(String, Q)>, String> {
    let mut out = Vec::new();
    for (i, seg) in text.split(';').enumerate() {
        let seg = seg.trim();
        if seg.is_empty() {
            continue;
        }
        let (name, value) = match seg.split_once('=') {
            Some((n, v)) => (n.trim().to_string(), v),
            None => (format!("T{}", i + 1), seg),
        };
        let v = parse_rational(value).ok_or_else(|| format!("bad number '{}'", value.trim()))?;
        out.push((name, v));
    }
    Ok(out)
}

pub fn parse_network(text: &str) -> Result<NetworkFile, ParseError> {
    let mut species: Vec<String> = Vec::new();
    let mut reactions: Vec<(Complex, Complex, String, Option<Q>)> = Vec::new();
    let mut partition_text: Option<(usize, String)> = None;
    let mut totals = None;
    let mut chosen_names: Option<(usize, Vec<String>)> = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, rest) = body.split_once(':').ok_or_else(|| err(line, "expected 'keyword: ...'"))?;
        let rest = rest.trim();
        match key.trim() {
            "species" => {
                for name in rest.split_whitespace() {
                    if species.iter().any(|s| s == name) {
                        return Err(err(line, format!("species '{name}' declared twice")));
                    }
                    if name.starts_with(|c: char| c.is_ascii_digit()) || name.contains(['+', '-', '>', ';', '=']) {
                        return Err(err(line, format!("invalid species name '{name}'")));
                    }
                    species.push(name.to_string());
                }
            }
            "reaction" => {
                let (eqn, rate) = match rest.split_once(';') {
                    Some((e, r)) => (e, Some(r.trim())),
                    None => (rest, None),
                };
                let parts: Vec<&str> = eqn.split("->").collect();
                if parts.len() != 2 {
                    return Err(err(line, "malformed arrow, expected exactly one '->'"));
                }
                let src = parse_complex(parts[0], &species, line)?;
                let tgt = parse_complex(parts[1], &species, line)?;
                if src == tgt {
                    return Err(err(line, "reaction source equals target"));
                }
                if reactions.iter().any(|(s, t, _, _)| *s == src && *t == tgt) {
                    return Err(err(line, "duplicate reaction"));
                }
                let default_name = format!("k{}", reactions.len() + 1);
                let (name, value) = match rate {
                    None | Some("") => (default_name, None),
                    Some(r) => match r.split_once('=') {
                        Some((n, v)) => {
                            let v = parse_rational(v).ok_or_else(|| err(line, format!("bad rate value '{}'", v.trim())))?;
                            (n.trim().to_string(), Some(v))
                        }
                        None => match parse_rational(r) {
                            Some(v) => (default_name, Some(v)),
                            None => (r.to_string(), None),
                        },
                    },
                };
                if let Some(v) = &value {
                    if *v <= Q::zero() {
                        return Err(err(line, format!("rate '{name}' must be positive")));
                    }
                }
                if reactions.iter().any(|(_, _, n, _)| *n == name) {
                    return Err(err(line, format!("rate name '{name}' used twice")));
                }
                reactions.push((src, tgt, name, value));
            }
            "partition" => partition_text = Some((line, rest.to_string())),
            "totals" => {
                let t = parse_assignments(rest).map_err(|m| err(line, m))?;
                if t.iter().any(|(_, v)| *v <= Q::zero()) {
                    return Err(err(line, "totals must be positive"));
                }
                totals = Some(t);
            }
            "chosen" => chosen_names = Some((line, rest.split_whitespace().map(String::from).collect())),
            other => return Err(err(line, format!("unknown keyword '{other}'"))),
        }
    }
    if species.is_empty() {
        return Err(err(0, "no species declared"));
    }
    if reactions.is_empty() {
        return Err(err(0, "no reactions"));
    }
    let network = Network::from_reactions(species, reactions).map_err(|e| err(0, e.to_string()))?;
    let partition = match partition_text {
        Some((line, t)) => Some(parse_partition(&t, &network).map_err(|m| err(line, m))?),
        None => None,
    };
    let chosen = match chosen_names {
        Some((line, names)) => Some(
            names
                .iter()
                .map(|n| network.species_index(n).ok_or_else(|| err(line, format!("unknown species '{n}'"))))
                .collect::<Result<Vec<_>, _>>()?,
        ),
        None => None,
    };
    Ok(NetworkFile { network, partition, totals, chosen })
}

fn fmt_q(v: &Q) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// Render back into the file format.
pub fn write_network(file: &NetworkFile) -> String {
    let net = &file.network;
    let mut out = String::new();
    out.push_str("species: ");
    out.push_str(&net.species().join(" "));
    out.push('\n');
    if let Some(p) = &file.partition {
        let mut segs = Vec::new();
        if !p.intermediates().is_empty() {
            segs.push(format!("0: {}", names(net, p.intermediates())));
        }
        for (a, b) in p.blocks().iter().enumerate() {
            segs.push(format!("{}: {}", a + 1, names(net, b)));
        }
        out.push_str(&format!("partition: {}\n", segs.join(" ; ")));
    }
    for (r, re) in net.reactions().iter().enumerate() {
        match &re.value {
            Some(v) => out.push_str(&format!("reaction: {} ; {} = {}\n", net.reaction_label(r), re.rate, fmt_q(v))),
            None => out.push_str(&format!("reaction: {} ; {}\n", net.reaction_label(r), re.rate)),
        }
    }
    if let Some(t) = &file.totals {
        let segs: Vec<String> = t.iter().map(|(n, v)| format!("{n} = {}", fmt_q(v))).collect();
        out.push_str(&format!("totals: {}\n", segs.join(" ; ")));
    }
    if let Some(c) = &file.chosen {
        out.push_str(&format!("chosen: {}\n", names(net, c)));
    }
    out
}

fn names(net: &Network, idx: &[usize]) -> String {
    idx.iter().map(|&i| net.species()[i].as_str()).collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{q, qr};

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("1.75"), Some(qr(7, 4)));
        assert_eq!(parse_rational("3/6"), Some(qr(1, 2)));
        assert_eq!(parse_rational("2"), Some(q(2)));
        assert_eq!(parse_rational("1e-3"), Some(qr(1, 1000)));
        assert_eq!(parse_rational("2.5E2"), Some(q(250)));
        assert_eq!(parse_rational(".5"), Some(qr(1, 2)));
        assert_eq!(parse_rational("x"), None);
        assert_eq!(parse_rational("1/0"), None);
    }

    #[test]
    fn multipliers() {
        let f = parse_network("species: A B\nreaction: 2A -> B ; k = 1\nreaction: B -> 2 A + 0B\n").unwrap();
        assert_eq!(f.network.complexes()[0], vec![2, 0]);
        assert_eq!(f.network.reactions()[1].rate, "k2");
    }
}
