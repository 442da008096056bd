//! Mass-action reaction networks and the MESSI machinery built on them.

pub mod builtins;
pub mod messi;
pub mod model;
pub mod param;
pub mod parse;
pub mod region;
pub mod rescale;
pub mod trees;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::linalg::{q, RationalMatrix, Q};

/// Complexes are stoichiometric vectors over the species.
pub type Complex = Vec<i64>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reaction {
    pub source: usize,
    pub target: usize,
    /// Rate constant symbol, e.g. `k4`.
    pub rate: String,
    /// Numeric rate constant when known.
    pub value: Option<Q>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NetworkError {
    #[error("rate constant {0} has no value")]
    MissingRate(String),
    #[error("expected {want} rate constants, got {got}")]
    RateCount { got: usize, want: usize },
    #[error("rate constant {0} must be positive")]
    NonPositiveRate(String),
    #[error("reaction {0} has identical source and target")]
    SelfLoop(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    species: Vec<String>,
    complexes: Vec<Complex>,
    reactions: Vec<Reaction>,
}

impl Network {
    pub fn new(species: Vec<String>, complexes: Vec<Complex>, reactions: Vec<Reaction>) -> Result<Self, NetworkError> {
        for (i, r) in reactions.iter().enumerate() {
            if r.source == r.target {
                return Err(NetworkError::SelfLoop(i));
            }
            if let Some(v) = &r.value {
                if *v <= Q::zero() {
                    return Err(NetworkError::NonPositiveRate(r.rate.clone()));
                }
            }
        }
        Ok(Network { species, complexes, reactions })
    }

    /// Build from reactions given as (source, target, rate name, value),
    /// collecting complexes in order of first appearance.
    pub fn from_reactions(
        species: Vec<String>,
        reactions: Vec<(Complex, Complex, String, Option<Q>)>,
    ) -> Result<Self, NetworkError> {
        let mut complexes: Vec<Complex> = Vec::new();
        let idx = |c: Complex, complexes: &mut Vec<Complex>| {
            if let Some(p) = complexes.iter().position(|x| *x == c) {
                p
            } else {
                complexes.push(c);
                complexes.len() - 1
            }
        };
        let mut rs = Vec::new();
        for (s, t, rate, value) in reactions {
            let source = idx(s, &mut complexes);
            let target = idx(t, &mut complexes);
            rs.push(Reaction { source, target, rate, value });
        }
        Network::new(species, complexes, rs)
    }

    pub fn species(&self) -> &[String] {
        &self.species
    }

    pub fn species_index(&self, name: &str) -> Option<usize> {
        self.species.iter().position(|s| s == name)
    }

    pub fn complexes(&self) -> &[Complex] {
        &self.complexes
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    pub fn num_species(&self) -> usize {
        self.species.len()
    }

    /// Numeric rate constants from the network, in reaction order.
    pub fn rates(&self) -> Result<Vec<Q>, NetworkError> {
        self.reactions.iter().map(|r| r.value.clone().ok_or_else(|| NetworkError::MissingRate(r.rate.clone()))).collect()
    }

    pub fn rate_names(&self) -> Vec<String> {
        self.reactions.iter().map(|r| r.rate.clone()).collect()
    }

    /// Copy with the given rate values.
    pub fn with_rates(&self, kappa: &[Q]) -> Result<Network, NetworkError> {
        if kappa.len() != self.reactions.len() {
            return Err(NetworkError::RateCount { got: kappa.len(), want: self.reactions.len() });
        }
        let mut n = self.clone();
        for (r, k) in n.reactions.iter_mut().zip(kappa) {
            if *k <= Q::zero() {
                return Err(NetworkError::NonPositiveRate(r.rate.clone()));
            }
            r.value = Some(k.clone());
        }
        Ok(n)
    }

    /// Indices of complexes that are the source of some reaction.
    pub fn reactant_complexes(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.reactions.iter().map(|r| r.source).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Stoichiometric matrix, species by reactions, columns y' - y.
    pub fn stoichiometric_matrix(&self) -> RationalMatrix {
        let mut m = RationalMatrix::zeros(self.species.len(), self.reactions.len());
        for (j, r) in self.reactions.iter().enumerate() {
            for i in 0..self.species.len() {
                let v = self.complexes[r.target][i] - self.complexes[r.source][i];
                m.set(i, j, q(v));
            }
        }
        m
    }

    /// Human-readable complex, e.g. `S0 + E`.
    pub fn complex_label(&self, c: usize) -> String {
        let parts: Vec<String> = self.complexes[c]
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v != 0)
            .map(|(i, &v)| if v == 1 { self.species[i].clone() } else { format!("{v}{}", self.species[i]) })
            .collect();
        if parts.is_empty() {
            String::from("0")
        } else {
            parts.join(" + ")
        }
    }

    pub fn reaction_label(&self, r: usize) -> String {
        let re = &self.reactions[r];
        format!("{} -> {}", self.complex_label(re.source), self.complex_label(re.target))
    }
}

/// Polynomial right-hand sides, one sparse map from exponent to coefficient per species.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MassActionSystem {
    pub polys: Vec<BTreeMap<Vec<i64>, Q>>,
}

impl MassActionSystem {
    pub fn eval(&self, x: &[Q]) -> Vec<Q> {
        self.polys
            .iter()
            .map(|p| {
                p.iter().fold(Q::zero(), |acc, (e, c)| {
                    let mut t = c.clone();
                    for (xi, &ei) in x.iter().zip(e) {
                        for _ in 0..ei {
                            t *= xi;
                        }
                    }
                    acc + t
                })
            })
            .collect()
    }
}

/// f(x) = sum_r kappa_r x^{y_r} (y'_r - y_r).
pub fn mass_action_system(net: &Network, kappa: &[Q]) -> Result<MassActionSystem, NetworkError> {
    if kappa.len() != net.reactions.len() {
        return Err(NetworkError::RateCount { got: kappa.len(), want: net.reactions.len() });
    }
    let s = net.species.len();
    let mut polys = vec![BTreeMap::new(); s];
    for (r, k) in net.reactions.iter().zip(kappa) {
        let y = &net.complexes[r.source];
        let yp = &net.complexes[r.target];
        for i in 0..s {
            let d = yp[i] - y[i];
            if d == 0 {
                continue;
            }
            let e = polys[i].entry(y.clone()).or_insert_with(Q::zero);
            *e += k * q(d);
        }
    }
    for p in polys.iter_mut() {
        p.retain(|_, c: &mut Q| !c.is_zero());
    }
    Ok(MassActionSystem { polys })
}

/// Row-relative residuals |f_i| / sum |terms of f_i| of the mass-action
/// system at floating rates and concentrations.
pub fn mass_action_residual_f64(net: &Network, kappa: &[f64], x: &[f64]) -> Vec<f64> {
    let s = net.species.len();
    let mut val = vec![0.0; s];
    let mut scale = vec![0.0; s];
    for (r, &k) in net.reactions.iter().zip(kappa) {
        let y = &net.complexes[r.source];
        let yp = &net.complexes[r.target];
        let mut mono = k;
        for i in 0..s {
            if y[i] != 0 {
                mono *= libm::pow(x[i], y[i] as f64);
            }
        }
        for i in 0..s {
            let d = (yp[i] - y[i]) as f64;
            if d != 0.0 {
                val[i] += d * mono;
                scale[i] += libm::fabs(d * mono);
            }
        }
    }
    val.iter().zip(&scale).map(|(v, s)| if *s == 0.0 { 0.0 } else { libm::fabs(*v) / s }).collect()
}

/// Basis of the left kernel of the stoichiometric matrix.
pub fn conservation_laws(net: &Network) -> Vec<Vec<Q>> {
    net.stoichiometric_matrix().transpose().kernel_basis()
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CrnError {
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Messi(#[from] messi::MessiError),
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
    #[error(transparent)]
    Decoration(#[from] crate::decoration::DecorationError),
    #[error("hypothesis failed: {0}")]
    Hypothesis(String),
    #[error("postcondition failed: {0}")]
    Postcondition(String),
}
