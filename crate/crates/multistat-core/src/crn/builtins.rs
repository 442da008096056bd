//! Built-in networks with default rates, totals and chosen variables.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::parse::{parse_network, NetworkFile};
use super::CrnError;

/// Hybrid histidine kinase two-component system.
pub const HK_TEXT: &str = "\
# hybrid histidine kinase
species: X1 X2 X3 X4 X5 X6
partition: 1: X1 X2 X3 X4 ; 2: X5 X6
reaction: X1 -> X2 ; k1 = 1
reaction: X2 -> X3 ; k2 = 1
reaction: X3 -> X4 ; k3 = 2
reaction: X3 + X5 -> X1 + X6 ; k4 = 1
reaction: X4 + X5 -> X2 + X6 ; k5 = 1
reaction: X6 -> X5 ; k6 = 1
totals: T1 = 7/4 ; T2 = 1
chosen: X4 X5
";

pub const MM_TEXT: &str = "\
# Michaelis-Menten
species: S0 S1 E ES0
partition: 0: ES0 ; 1: E ; 2: S0 S1
reaction: S0 + E -> ES0 ; kon = 1
reaction: ES0 -> S0 + E ; koff = 1
reaction: ES0 -> S1 + E ; kcat = 1
totals: Etot = 1 ; Stot = 1
chosen: E S0
";

/// Partially processive phosphorylation with intermediates ES0, ES1, FS1, FS2.
pub const MIXED_PHOSPHO_TEXT: &str = "\
# mixed phosphorylation mechanism
species: S0 S1 S2 E F ES0 ES1 FS1 FS2
partition: 0: ES0 ES1 FS1 FS2 ; 1: E ; 2: F ; 3: S0 S1 S2
reaction: S0 + E -> ES0 ; k1 = 1
reaction: ES0 -> S0 + E ; k2 = 1
reaction: ES0 -> S1 + E ; k3 = 1
reaction: S1 + E -> ES1 ; k4 = 1
reaction: ES1 -> S1 + E ; k5 = 1
reaction: ES1 -> S2 + E ; k6 = 1
reaction: S2 + F -> FS2 ; k7 = 1
reaction: FS2 -> S2 + F ; k8 = 1
reaction: FS2 -> FS1 ; k9 = 1
reaction: FS1 -> S0 + F ; k10 = 1
totals: Etot = 1 ; Ftot = 1 ; Stot = 3
chosen: E F S0
";

pub fn hybrid_hk_network() -> NetworkFile {
    parse_network(HK_TEXT).expect("built-in network parses")
}

pub fn michaelis_menten() -> NetworkFile {
    parse_network(MM_TEXT).expect("built-in network parses")
}

pub fn mixed_phospho_network() -> NetworkFile {
    parse_network(MIXED_PHOSPHO_TEXT).expect("built-in network parses")
}

/// Text of the sequential distributive n-site network. Rates default to 1
/// except kcat1 = 2 (when n >= 2); totals are S = 3, E = 1, F = 1.
pub fn phospho_text(n: usize) -> Result<String, CrnError> {
    if n < 1 {
        return Err(CrnError::Hypothesis(String::from("phosphorylation needs n >= 1 sites")));
    }
    let s: Vec<String> = (0..=n).map(|i| format!("S{i}")).collect();
    let es: Vec<String> = (0..n).map(|i| format!("ES{i}")).collect();
    let fs: Vec<String> = (1..=n).map(|i| format!("FS{i}")).collect();
    let mut t = format!("# {n}-site distributive phosphorylation\n");
    t.push_str(&format!("species: {} E F {} {}\n", s.join(" "), es.join(" "), fs.join(" ")));
    t.push_str(&format!("partition: 0: {} {} ; 1: {} ; 2: E ; 3: F\n", es.join(" "), fs.join(" "), s.join(" ")));
    for i in 0..n {
        let kcat = if i == 1 { "2" } else { "1" };
        t.push_str(&format!("reaction: S{i} + E -> ES{i} ; kon{i} = 1\n"));
        t.push_str(&format!("reaction: ES{i} -> S{i} + E ; koff{i} = 1\n"));
        t.push_str(&format!("reaction: ES{i} -> S{} + E ; kcat{i} = {kcat}\n", i + 1));
    }
    for i in 0..n {
        t.push_str(&format!("reaction: S{} + F -> FS{} ; lon{i} = 1\n", i + 1, i + 1));
        t.push_str(&format!("reaction: FS{} -> S{} + F ; loff{i} = 1\n", i + 1, i + 1));
        t.push_str(&format!("reaction: FS{} -> S{i} + F ; lcat{i} = 1\n", i + 1));
    }
    t.push_str("totals: Stot = 3 ; Etot = 1 ; Ftot = 1\n");
    t.push_str("chosen: S0 E F\n");
    Ok(t)
}

pub fn phospho_network(n: usize) -> Result<NetworkFile, CrnError> {
    Ok(parse_network(&phospho_text(n)?).expect("generated network parses"))
}

/// Resolve `hk`, `mm`, `mixed-phospho` or `phospho:n`.
pub fn builtin(name: &str) -> Result<NetworkFile, String> {
    match name {
        "hk" => Ok(hybrid_hk_network()),
        "mm" => Ok(michaelis_menten()),
        "mixed-phospho" => Ok(mixed_phospho_network()),
        other => {
            let n = other
                .strip_prefix("phospho:")
                .and_then(|n| n.parse::<usize>().ok())
                .ok_or_else(|| format!("unknown built-in '{other}' (hk, mm, mixed-phospho, phospho:n)"))?;
            phospho_network(n).map_err(|e| e.to_string())
        }
    }
}
