//! Defect filtrations, defect degrees and the finite-termination verdict.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::duality::{response_profile, Pairing};
use crate::structure::{ElementId, ElementSet, InteractionStructure, StructureError};

/// How successive filtration levels are produced from the centre.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FiltrationMode {
    /// `P_{k+1} = P_k ∪ { p : defect(p,q) ∈ P_k for all q }`.
    #[default]
    Ascending,
    /// `P_{k+1} = closure(P_k ∪ { defect(p,q) : p ∈ P_k })`.
    Literal,
}

impl fmt::Display for FiltrationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FiltrationMode::Ascending => "ascending",
            FiltrationMode::Literal => "literal",
        })
    }
}

impl FromStr for FiltrationMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ascending" => Ok(FiltrationMode::Ascending),
            "literal" => Ok(FiltrationMode::Literal),
            other => Err(format!("unknown filtration mode '{other}'")),
        }
    }
}

/// Nested levels `P₀ ⊆ P₁ ⊆ …`, listed up to and including the first level
/// that the next step no longer changes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefectFiltration {
    pub levels: Vec<ElementSet>,
    pub mode: FiltrationMode,
    pub stabilized_at: usize,
    pub covers_carrier: bool,
}

impl DefectFiltration {
    /// Index of the last level; the depth `d` when the carrier is covered.
    pub fn depth(&self) -> usize {
        self.stabilized_at
    }

    pub fn stable_level(&self) -> &ElementSet {
        &self.levels[self.stabilized_at]
    }

    /// Level `k`, continuing with the stable level past the end.
    pub fn level(&self, k: usize) -> &ElementSet {
        &self.levels[k.min(self.stabilized_at)]
    }

    pub fn core(&self) -> &ElementSet {
        &self.levels[0]
    }
}

pub fn ascending_filtration(
    carrier: &InteractionStructure,
    mode: FiltrationMode,
) -> Result<DefectFiltration, StructureError> {
    let defect_mode = carrier.defect_mode()?;
    let n = carrier.size();
    let mut levels = vec![carrier.center()?];
    loop {
        assert!(levels.len() <= n + 1, "filtration failed to stabilise");
        let current = levels.last().unwrap();
        let next: ElementSet = match mode {
            FiltrationMode::Ascending => {
                let mut member = vec![false; n];
                for p in current {
                    member[p.0] = true;
                }
                let preimage = carrier.defect_preimage(defect_mode, &member);
                carrier.ids().filter(|p| member[p.0] || preimage[p.0]).collect()
            }
            FiltrationMode::Literal => {
                let mut seed = current.clone();
                for &p in current {
                    for q in carrier.ids() {
                        seed.insert(carrier.defect_fast(defect_mode, p, q));
                    }
                }
                carrier.closure_with(defect_mode, &seed)
            }
        };
        if &next == current {
            break;
        }
        levels.push(next);
    }
    let stabilized_at = levels.len() - 1;
    let covers_carrier = levels[stabilized_at].len() == n;
    Ok(DefectFiltration {
        levels,
        mode,
        stabilized_at,
        covers_carrier,
    })
}

/// Least level index containing each element; `None` outside the stable
/// level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct DefectDegrees(pub Vec<Option<usize>>);

impl DefectDegrees {
    pub fn get(&self, p: ElementId) -> Option<usize> {
        self.0[p.0]
    }
}

pub fn defect_degree(filtration: &DefectFiltration, carrier_size: usize) -> DefectDegrees {
    let mut degrees = vec![None; carrier_size];
    for (k, level) in filtration.levels.iter().enumerate() {
        for p in level {
            degrees[p.0].get_or_insert(k);
        }
    }
    DefectDegrees(degrees)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TerminationVerdict {
    Pass { depth: usize },
    Fail { stable: ElementSet, excluded: ElementId },
}

impl TerminationVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, TerminationVerdict::Pass { .. })
    }
}

pub fn termination_check(filtration: &DefectFiltration, carrier: &InteractionStructure) -> TerminationVerdict {
    let stable = filtration.stable_level();
    match carrier.ids().find(|p| !stable.contains(p)) {
        None => TerminationVerdict::Pass {
            depth: filtration.depth(),
        },
        Some(excluded) => TerminationVerdict::Fail {
            stable: stable.clone(),
            excluded,
        },
    }
}

/// The depth partition against the response partition on one carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrganisationComparison {
    pub depth_blocks: Vec<ElementSet>,
    pub response_blocks: Vec<ElementSet>,
    pub response_refines_depth: bool,
    pub depth_refines_response: bool,
    pub joint_refinement_size: usize,
}

impl OrganisationComparison {
    pub fn coincide(&self) -> bool {
        self.response_refines_depth && self.depth_refines_response
    }
}

fn blocks_by<K: Ord>(carrier: &InteractionStructure, key: impl Fn(ElementId) -> K) -> (Vec<ElementSet>, Vec<usize>) {
    let mut index: BTreeMap<K, usize> = BTreeMap::new();
    let mut blocks: Vec<ElementSet> = Vec::new();
    let mut block_of = Vec::with_capacity(carrier.size());
    for p in carrier.ids() {
        let next = index.len();
        let b = *index.entry(key(p)).or_insert(next);
        if b == blocks.len() {
            blocks.push(ElementSet::new());
        }
        blocks[b].insert(p);
        block_of.push(b);
    }
    (blocks, block_of)
}

fn refines(fine: &[usize], coarse: &[usize]) -> bool {
    let mut image: BTreeMap<usize, usize> = BTreeMap::new();
    fine.iter()
        .zip(coarse)
        .all(|(&f, &c)| *image.entry(f).or_insert(c) == c)
}

pub fn compare_organisations(
    carrier: &InteractionStructure,
    filtration: &DefectFiltration,
    pairing: &Pairing,
) -> OrganisationComparison {
    let degrees = defect_degree(filtration, carrier.size());
    let (depth_blocks, depth_of) = blocks_by(carrier, |p| degrees.get(p));
    let (response_blocks, response_of) = blocks_by(carrier, |p| response_profile(pairing, p));
    let (joint, _) = blocks_by(carrier, |p| (depth_of[p.0], response_of[p.0]));
    OrganisationComparison {
        response_refines_depth: refines(&response_of, &depth_of),
        depth_refines_response: refines(&depth_of, &response_of),
        joint_refinement_size: joint.len(),
        depth_blocks,
        response_blocks,
    }
}
