//! Declarative model descriptions, the JSON surface of the tool: a tagged
//! "model" object that can be built into a live model with the configured
//! optimizer budgets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{
    DbnModel, EmConfig, GradConfig, IndependenceModel, MixtureModel, Model, MpdModel,
    MultinomialModel, PartitionModel, RbmModel,
};
use crate::partition::{CubicalPartition, CubicalSet, Partition};
use crate::space::StateSpace;

/// Optimizer budgets used when a spec builds an iterative model.
#[derive(Debug, Clone, Copy, Default)]
pub struct BuildConfig {
    pub em: EmConfig,
    pub grad: GradConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum ModelSpec {
    Independence {
        cards: Vec<usize>,
    },
    Partition {
        cards: Vec<usize>,
        blocks: Vec<Vec<usize>>,
    },
    Mpd {
        cards: Vec<usize>,
        /// Per-axis value subsets, one list per block.
        blocks: Vec<Vec<Vec<usize>>>,
    },
    Mixture {
        cards: Vec<usize>,
        k: usize,
    },
    Multinomial {
        n: usize,
        q: usize,
    },
    Rbm {
        n: usize,
        m: usize,
    },
    Dbn {
        widths: Vec<usize>,
    },
}

impl ModelSpec {
    /// Build the model this spec describes.
    pub fn build(&self, cfg: &BuildConfig) -> Result<Box<dyn Model>> {
        match self {
            ModelSpec::Independence { cards } => {
                let space = StateSpace::new(cards.clone())?;
                Ok(Box::new(IndependenceModel::new(space)))
            }
            ModelSpec::Partition { cards, blocks } => {
                let space = StateSpace::new(cards.clone())?;
                let rho = Partition::new(space, blocks.clone())?;
                Ok(Box::new(PartitionModel::new(rho)))
            }
            ModelSpec::Mpd { cards, blocks } => {
                let space = StateSpace::new(cards.clone())?;
                let sets = blocks
                    .iter()
                    .map(|axes| CubicalSet::new(&space, axes.clone()))
                    .collect::<Result<Vec<_>>>()?;
                let rho = CubicalPartition::new(space, sets)?;
                Ok(Box::new(MpdModel::new(rho)))
            }
            ModelSpec::Mixture { cards, k } => {
                if *k < 1 {
                    return Err(Error::KOutOfRange {
                        k: *k,
                        condition: "k >= 1".into(),
                    });
                }
                let space = StateSpace::new(cards.clone())?;
                Ok(Box::new(MixtureModel::new(space, *k, cfg.em)))
            }
            ModelSpec::Multinomial { n, q } => Ok(Box::new(MultinomialModel::new(*n, *q)?)),
            ModelSpec::Rbm { n, m } => {
                let space = StateSpace::binary(*n)?;
                Ok(Box::new(RbmModel::new(space, *m, cfg.grad)?))
            }
            ModelSpec::Dbn { widths } => Ok(Box::new(DbnModel::new(widths.clone(), cfg.grad)?)),
        }
    }
}
