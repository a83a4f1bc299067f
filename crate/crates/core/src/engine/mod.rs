//! Twisted descendant Gromov-Witten invariants of P^N in genus 0 and 1 by
//! torus localization.
//!
//! An invariant is the coefficient of λ^δ in the localization sum, where δ
//! is the λ-homogeneous degree of the integrand minus the virtual
//! dimension. That coefficient is the α-nonequivariant limit, so it does
//! not depend on the torus weights used to compute it.

mod contribution;
mod descriptor;
mod hypergeom;

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use rayon::prelude::*;

pub use contribution::{tangent_chern_at_fixed_point, GraphEvaluator};
pub use descriptor::{
    ClassTerm, InsertionClass, InsertionDescriptor, InvariantDescriptor, Kernel, SpaceDescriptor, TwistEntry,
    TwistSign,
};
pub use hypergeom::hypergeom_genus0_oracle;

use crate::algebra::{AlgebraError, LaurentSeries, Rational};
use crate::cache::InvariantCache;
use crate::config::Config;
use crate::graphs::{enumerate_loc_graphs, GraphError, LocGraph};
use crate::hodge::{HodgeError, HodgeTable};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("genus {0} invariants are not supported (only g <= 1)")]
    UnsupportedGenus(u8),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("non-generic torus weights: {0}")]
    NonGenericWeights(String),
    #[error("kernel expansion order {given} is below the virtual dimension {required}")]
    OverTruncatedKernel { required: i64, given: u32 },
    #[error("unsupported oracle input: {0}")]
    UnsupportedOracle(String),
    #[error("cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Hodge(#[from] HodgeError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// A computed invariant with bookkeeping for reports.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub value: LaurentSeries,
    pub graph_count: usize,
    pub from_cache: bool,
}

type GraphKey = (usize, u32, u8, usize);

pub struct Engine {
    config: Config,
    hodge: Arc<HodgeTable>,
    graphs: RwLock<HashMap<GraphKey, Arc<Vec<LocGraph>>>>,
    memo: RwLock<HashMap<String, LaurentSeries>>,
    cache: Option<Arc<InvariantCache>>,
}

impl std::fmt::Debug for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Engine")
            .field("config", &self.config)
            .finish_non_exhaustive()
    }
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new(Config::default())
    }
}

impl Engine {
    pub fn new(config: Config) -> Self {
        Self::with_hodge(config, Arc::new(HodgeTable::new()))
    }

    pub fn with_hodge(config: Config, hodge: Arc<HodgeTable>) -> Self {
        Engine {
            config,
            hodge,
            graphs: RwLock::new(HashMap::new()),
            memo: RwLock::new(HashMap::new()),
            cache: None,
        }
    }

    pub fn with_cache(mut self, cache: Arc<InvariantCache>) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    pub fn hodge(&self) -> &HodgeTable {
        &self.hodge
    }

    pub fn graphs(
        &self,
        target_dim: usize,
        degree: u32,
        genus: u8,
        markings: usize,
    ) -> Result<Arc<Vec<LocGraph>>, EngineError> {
        let key = (target_dim, degree, genus, markings);
        if let Some(g) = self.graphs.read().expect("graph memo").get(&key) {
            return Ok(g.clone());
        }
        let g = Arc::new(enumerate_loc_graphs(target_dim, degree, genus, markings)?);
        self.graphs.write().expect("graph memo").insert(key, g.clone());
        Ok(g)
    }

    pub fn validate(&self, desc: &InvariantDescriptor) -> Result<(), EngineError> {
        if desc.genus > 1 {
            return Err(EngineError::UnsupportedGenus(desc.genus));
        }
        if desc.degree < 1 || desc.target_dim < 1 {
            return Err(EngineError::InvalidInput("need N >= 1 and degree >= 1".into()));
        }
        for t in &desc.twists {
            if t.bundle_degree == 0 && t.lambda_multiplier == 0 {
                return Err(EngineError::InvalidInput(
                    "twist by the trivial bundle with trivial action".into(),
                ));
            }
        }
        let vdim = desc.vdim();
        for ins in &desc.insertions {
            if ins.class.max_chern_index() as usize > desc.target_dim {
                return Err(EngineError::InvalidInput(format!(
                    "Chern class index above N = {}",
                    desc.target_dim
                )));
            }
            if let Some(k) = &ins.kernel {
                if (k.expansion_order as i64) < vdim {
                    return Err(EngineError::OverTruncatedKernel {
                        required: vdim,
                        given: k.expansion_order,
                    });
                }
            }
        }
        Ok(())
    }

    fn seed_for(&self, attempt: u32) -> u64 {
        self.config.weight_seed.wrapping_add(attempt as u64 * 1_000_003)
    }

    /// The invariant, using the memo, the on-disk cache, and weight retries.
    pub fn gw_invariant(&self, desc: &InvariantDescriptor) -> Result<LaurentSeries, EngineError> {
        Ok(self.evaluate(desc)?.value)
    }

    pub fn evaluate(&self, desc: &InvariantDescriptor) -> Result<Evaluation, EngineError> {
        self.validate(desc)?;
        let key = desc.canonical_key();
        let graph_count = self
            .graphs(desc.target_dim, desc.degree, desc.genus, desc.marking_count())?
            .len();
        if let Some(v) = self.memo.read().expect("memo").get(&key) {
            return Ok(Evaluation {
                value: v.clone(),
                graph_count,
                from_cache: true,
            });
        }
        if let Some(cache) = &self.cache {
            if let Some(v) = cache.get(&key) {
                self.memo.write().expect("memo").insert(key, v.clone());
                return Ok(Evaluation {
                    value: v,
                    graph_count,
                    from_cache: true,
                });
            }
        }
        let mut last = String::new();
        for attempt in 0..self.config.retry_limit.max(1) {
            let space = SpaceDescriptor::with_seed(desc.target_dim, self.seed_for(attempt))?;
            match self.gw_invariant_with_weights(desc, &space) {
                Ok(value) => {
                    if let Some(cache) = &self.cache {
                        cache
                            .put(&key, &value)
                            .map_err(|e| EngineError::Cache(e.to_string()))?;
                    }
                    self.memo.write().expect("memo").insert(key, value.clone());
                    return Ok(Evaluation {
                        value,
                        graph_count,
                        from_cache: false,
                    });
                }
                Err(EngineError::NonGenericWeights(why)) => {
                    log::warn!("attempt {attempt}: {why}; redrawing weights");
                    last = why;
                }
                Err(e) => return Err(e),
            }
        }
        Err(EngineError::NonGenericWeights(format!(
            "{last} (after {} weight draws)",
            self.config.retry_limit.max(1)
        )))
    }

    /// The invariant computed at the given weights, bypassing every cache.
    pub fn gw_invariant_with_weights(
        &self,
        desc: &InvariantDescriptor,
        space: &SpaceDescriptor,
    ) -> Result<LaurentSeries, EngineError> {
        self.validate(desc)?;
        if space.target_dim != desc.target_dim {
            return Err(EngineError::InvalidInput(
                "space does not match descriptor".into(),
            ));
        }
        let graphs = self.graphs(desc.target_dim, desc.degree, desc.genus, desc.marking_count())?;
        let vdim = desc.vdim();
        let twist_degree = desc.twist_degree();

        // multilinearity: split every class into homogeneous pieces
        let mut combos: Vec<(i64, Vec<InsertionDescriptor>)> = vec![(0, Vec::new())];
        for ins in &desc.insertions {
            let parts = ins.class.homogeneous_parts();
            let mut next = Vec::new();
            for (deg, ins_list) in &combos {
                for (cdeg, class) in &parts {
                    let mut l = ins_list.clone();
                    l.push(InsertionDescriptor {
                        class: class.clone(),
                        ..ins.clone()
                    });
                    next.push((deg + ins.degree_with(*cdeg), l));
                }
            }
            combos = next;
        }

        let mut terms: BTreeMap<i64, Rational> = BTreeMap::new();
        for (ins_degree, insertions) in combos {
            let delta = ins_degree + twist_degree - vdim;
            let evaluator = GraphEvaluator::new(
                space,
                &desc.twists,
                &insertions,
                &self.hodge,
                self.config.truncation_margin,
            );
            let coeff = graphs
                .par_iter()
                .map(|g| -> Result<Rational, EngineError> {
                    Ok(evaluator.contribution(g, delta)?.coeff(delta)?)
                })
                .try_reduce(Rational::zero, |a, b| Ok(a + b))?;
            *terms.entry(delta).or_default() += &coeff;
        }
        Ok(LaurentSeries::from_terms(&terms, None))
    }

    /// True iff `trials` independent weight draws give identical values.
    pub fn weight_independence_check(
        &self,
        desc: &InvariantDescriptor,
        trials: usize,
    ) -> Result<bool, EngineError> {
        if trials < 2 {
            return Err(EngineError::InvalidInput("need at least 2 trials".into()));
        }
        let mut values = Vec::with_capacity(trials);
        let mut seed = self.config.weight_seed.wrapping_add(0x5eed);
        let mut misses = 0;
        while values.len() < trials {
            let space = SpaceDescriptor::with_seed(desc.target_dim, seed)?;
            seed = seed.wrapping_add(7919);
            match self.gw_invariant_with_weights(desc, &space) {
                Ok(v) => values.push(v),
                Err(EngineError::NonGenericWeights(why)) => {
                    misses += 1;
                    if misses > self.config.retry_limit.max(1) as usize * trials {
                        return Err(EngineError::NonGenericWeights(why));
                    }
                }
                Err(e) => return Err(e),
            }
        }
        Ok(values.windows(2).all(|w| w[0] == w[1]))
    }
}
