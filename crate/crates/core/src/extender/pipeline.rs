use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::blocks::{assemble_extension, ExtensionBlocks};
use super::construct::{direct_sum_extension, flat_extension, product_pair_extension, slocc_extension};
use crate::error::Error;
use crate::exactmat::{ExactMatrix, ExactVector};
use crate::qstates::{BipartiteState, Side};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeTerm {
    #[serde(with = "crate::exactmat::rational_string")]
    pub weight: BigRational,
    pub vector: ExactVector,
}

/// One replayable single-direction extension; the new direction is always
/// appended as the last index of `side`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExtensionStep {
    Slocc { side: Side, phi: ExactVector },
    DirectSum { side: Side, edge_terms: Vec<EdgeTerm> },
    ProductPair { side: Side, alpha: ExactVector, beta: ExactVector, gamma: ExactVector },
    Flat { side: Side, chi: ExactMatrix },
}

impl ExtensionStep {
    pub fn side(&self) -> Side {
        match self {
            ExtensionStep::Slocc { side, .. }
            | ExtensionStep::DirectSum { side, .. }
            | ExtensionStep::ProductPair { side, .. }
            | ExtensionStep::Flat { side, .. } => *side,
        }
    }

    /// Block form of the step, if it has one without assembling (SLOCC is a congruence).
    pub fn blocks(&self, core: &BipartiteState) -> Result<Option<ExtensionBlocks>, Error> {
        Ok(match self {
            ExtensionStep::Slocc { .. } => None,
            ExtensionStep::DirectSum { side, edge_terms } => {
                let t: Vec<_> = edge_terms.iter().map(|e| (e.weight.clone(), e.vector.clone())).collect();
                Some(direct_sum_extension(core, *side, &t)?)
            }
            ExtensionStep::ProductPair { side, alpha, beta, gamma } => {
                Some(product_pair_extension(core, *side, alpha, beta, gamma)?)
            }
            ExtensionStep::Flat { side, chi } => Some(flat_extension(core, *side, chi)?),
        })
    }

    pub fn apply(&self, core: &BipartiteState, label: impl Into<String>) -> Result<BipartiteState, Error> {
        let label = label.into();
        match self {
            ExtensionStep::Slocc { side, phi } => Ok(slocc_extension(core, *side, phi)?.with_label(label)),
            _ => {
                let b = self.blocks(core)?.expect("non-SLOCC steps have blocks");
                assemble_extension(&b, label)
            }
        }
    }
}

/// Ordered list of steps; replaying it from the same start reproduces every stage.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pipeline {
    pub steps: Vec<ExtensionStep>,
}

impl Pipeline {
    pub fn replay(&self, start: &BipartiteState) -> Result<Vec<BipartiteState>, Error> {
        let mut stages = Vec::with_capacity(self.steps.len());
        let mut cur = start.clone();
        for (k, step) in self.steps.iter().enumerate() {
            cur = step.apply(&cur, format!("{}+step{}", start.label, k + 1))?;
            stages.push(cur.clone());
        }
        Ok(stages)
    }
}
