//! The JSON report shared by every command.
//!
//! Floats are written with 17 significant digits, exact rationals as "p/q"
//! strings. Stages a command does not run are omitted.

use serde::ser::Error as _;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use multistat_core::linalg::Q;

pub const SCHEMA_VERSION: u32 = 1;

/// Exact rational, serialized as "p/q".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rat(pub Q);

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", self.0.numer(), self.0.denom()))
    }
}

pub fn rats(v: &[Q]) -> Vec<Rat> {
    v.iter().cloned().map(Rat).collect()
}

/// Float with 17 significant digits; non-finite values become strings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F64(pub f64);

impl Serialize for F64 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_str(&self.0.to_string());
        }
        RawValue::from_string(format!("{:.16e}", self.0)).map_err(S::Error::custom)?.serialize(s)
    }
}

pub fn floats(v: &[f64]) -> Vec<F64> {
    v.iter().copied().map(F64).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub input: InputEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub messi: Option<MessiOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conservation_laws: Option<Vec<LawOut>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parametrization: Option<ParamOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decoration: Option<DecorationOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mixed: Option<MixedOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subdivision: Option<SubdivisionOut>,
}

impl Report {
    pub fn new(command: &str, input: InputEcho) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            input,
            messi: None,
            conservation_laws: None,
            parametrization: None,
            system: None,
            decoration: None,
            mixed: None,
            witness: None,
            subdivision: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct InputEcho {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    /// Network file text with the rates and totals actually used.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub network: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<Vec<Rat>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub totals: Option<Vec<Rat>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partition: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<i64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub heights: Option<Vec<Rat>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check: Option<Vec<Vec<usize>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mixed: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lattice_seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MessiOut {
    pub s_toric: bool,
    pub unique_sources: bool,
    pub no_parallel_edges: bool,
    pub weakly_reversible: bool,
    pub unique_simple_paths: bool,
    pub minimal: bool,
    pub diagnostics: Vec<String>,
    /// Blocks by layer (when G_E is acyclic), 1-based.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layers: Option<Vec<Vec<usize>>>,
    pub route: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct LawOut {
    pub total: String,
    pub block: usize,
    pub species: Vec<String>,
    pub coefficients: Vec<Rat>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamOut {
    pub route: String,
    pub chosen: Vec<String>,
    pub species: Vec<SpeciesOut>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpeciesOut {
    pub species: String,
    pub expression: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SystemOut {
    pub variables: Vec<String>,
    pub exponents: Vec<Vec<i64>>,
    pub rows: Vec<RowOut>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RowOut {
    pub block: usize,
    pub total: String,
    pub total_value: Rat,
    pub coefficients: Vec<Rat>,
    pub symbolic: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecorationOut {
    pub simplices_checked: usize,
    pub decorated: Vec<SimplexOut>,
    pub facet_pairs: Vec<(usize, usize)>,
    pub families: Vec<FamilyOut>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimplexOut {
    pub indices: Vec<usize>,
    pub points: Vec<Vec<i64>>,
    pub conditions: Vec<ConditionOut>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionOut {
    pub deleted: usize,
    pub value: Rat,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expression: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyOut {
    pub simplices: Vec<Vec<usize>>,
    pub height: Vec<Rat>,
    pub cone_normals: Vec<Vec<Rat>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MixedOut {
    /// Cayley points as (block, point index within block).
    pub blocks: Vec<Vec<Vec<i64>>>,
    pub decorated: Vec<Vec<(usize, usize)>>,
    pub family: Vec<Vec<(usize, usize)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub height: Option<Vec<Rat>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cone_normals: Option<Vec<Vec<Rat>>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessOut {
    pub route: String,
    pub status: String,
    pub p: usize,
    pub family: Vec<Vec<usize>>,
    pub height: Vec<F64>,
    pub cone_normals: Vec<Vec<Rat>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_star: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_star: Option<F64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<F64>>,
    pub roots: Vec<RootOut>,
    pub search_log: Vec<StepOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exclusion: Option<ExclusionOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_bar: Option<Vec<F64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub changed_rates: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub multipliers: Option<Vec<MultiplierOut>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rescale_note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steady_states: Option<Vec<SteadyStateOut>>,
    pub validated: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RootOut {
    pub x: Vec<F64>,
    pub residual: F64,
    pub sigma_min: F64,
    pub sigma_max: F64,
    pub iterations: usize,
    pub seed_index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basin: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StepOut {
    pub k: u32,
    pub t: F64,
    pub seeds: usize,
    pub roots: usize,
    pub seed_failures: usize,
    pub after_success: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExclusionOut {
    pub lower: Vec<F64>,
    pub upper: Vec<F64>,
    pub cells: usize,
    pub excluded: usize,
    pub near_roots: usize,
    pub unresolved: usize,
    pub missed_roots: Vec<Vec<F64>>,
    pub complete: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MultiplierOut {
    pub complex: String,
    pub factor: F64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SteadyStateOut {
    pub concentrations: Vec<F64>,
    pub mass_action_residual: F64,
    pub conservation_residual: F64,
    pub recertified: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SubdivisionOut {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cells: Option<Vec<Vec<usize>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub is_triangulation: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check: Option<RegularityOut>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegularityOut {
    pub regular: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub height: Option<Vec<Rat>>,
    /// Nonnegative weights on the cone normals summing to zero.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Vec<Rat>>,
    pub cone_normals: Vec<Vec<Rat>>,
}
