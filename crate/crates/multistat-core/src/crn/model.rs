//! A network bundled with its MESSI structure, laws and chosen variables.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::messi::{messi_conservation, mq_sets, MessiStructure, Partition};
use super::param::{core_reactants, steady_state_parametrization, Route, SteadyParametrization};
use super::parse::NetworkFile;
use super::region::{assemble_region_system, RegionSystem};
use super::rescale::{rescale_back, RescaleOutcome};
use super::{CrnError, Network};
use crate::linalg::Q;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MessiModel {
    pub network: Network,
    pub structure: MessiStructure,
    /// 0/1 block laws, indexed by block.
    pub laws: Vec<Vec<Q>>,
    pub chosen: Vec<usize>,
    /// Names of the totals, indexed by block.
    pub total_names: Vec<String>,
}

impl MessiModel {
    /// `chosen` defaults to the first species of each block, in block order.
    pub fn new(
        network: Network,
        partition: Partition,
        chosen: Option<Vec<usize>>,
        total_names: Option<Vec<String>>,
    ) -> Result<Self, CrnError> {
        let structure = MessiStructure::new(&network, &partition)?;
        let laws = messi_conservation(&network, &partition)?;
        let chosen = chosen.unwrap_or_else(|| partition.blocks().iter().map(|b| b[0]).collect());
        super::param::check_chosen(&structure, &chosen)?;
        let m = partition.num_blocks();
        let total_names = match total_names {
            Some(n) if n.len() == m => n,
            Some(n) => {
                return Err(CrnError::Hypothesis(format!("{} totals given for {m} blocks", n.len())));
            }
            None => (1..=m).map(|a| format!("T{a}")).collect(),
        };
        Ok(MessiModel { network, structure, laws, chosen, total_names })
    }

    /// Build from a parsed file; the partition is required.
    pub fn from_file(file: &NetworkFile) -> Result<Self, CrnError> {
        let partition = file
            .partition
            .clone()
            .ok_or_else(|| CrnError::Hypothesis(String::from("a partition is required")))?;
        let names = file.totals.as_ref().map(|t| t.iter().map(|(n, _)| n.clone()).collect());
        MessiModel::new(file.network.clone(), partition, file.chosen.clone(), names)
    }

    pub fn partition(&self) -> &Partition {
        &self.structure.partition
    }

    /// Block of each region-system row.
    pub fn row_blocks(&self) -> Vec<usize> {
        self.chosen.iter().map(|&c| self.partition().block_of(c).expect("core")).collect()
    }

    pub fn route(&self) -> Route {
        if self.structure.s_toric.holds() && self.structure.minimal && self.structure.layers().is_ok() {
            Route::Messi
        } else {
            Route::Elimination
        }
    }

    pub fn parametrize(&self, kappa: &[Q]) -> Result<SteadyParametrization, CrnError> {
        steady_state_parametrization(&self.network, &self.structure, kappa, &self.chosen)
    }

    /// Totals indexed by block.
    pub fn region_system(&self, kappa: &[Q], totals: &[Q]) -> Result<(SteadyParametrization, RegionSystem), CrnError> {
        if totals.len() != self.partition().num_blocks() {
            return Err(CrnError::Hypothesis(format!(
                "{} totals given for {} blocks",
                totals.len(),
                self.partition().num_blocks()
            )));
        }
        let param = self.parametrize(kappa)?;
        let region = assemble_region_system(&param, &self.laws, &self.row_blocks(), totals, &self.total_names)?;
        Ok((param, region))
    }

    /// Core reactant complexes, in the order rescaling should try them.
    pub fn rescale_candidates(&self) -> Vec<usize> {
        let all = core_reactants(&self.network, &self.structure);
        let mut out = Vec::new();
        if self.route() == Route::Messi {
            if let Ok(layers) = self.structure.layers() {
                for layer in &layers {
                    for &alpha in layer {
                        let root = self.chosen.iter().copied().find(|&c| self.partition().block_of(c) == Some(alpha));
                        let Some(root) = root else { continue };
                        for (m, mp) in mq_sets(&self.structure, &self.network, alpha, root, &layers) {
                            for y in m.into_iter().chain(mp) {
                                if !out.contains(&y) {
                                    out.push(y);
                                }
                            }
                        }
                    }
                }
            }
        }
        for y in all {
            if !out.contains(&y) {
                out.push(y);
            }
        }
        out
    }

    pub fn rescale_back(
        &self,
        kappa: &[Q],
        totals: &[Q],
        region: &RegionSystem,
        log_gamma: &[f64],
    ) -> Result<RescaleOutcome, CrnError> {
        rescale_back(&self.network, kappa, region, log_gamma, &self.rescale_candidates(), |k| {
            self.region_system(k, totals).map(|(_, r)| r)
        })
    }
}
