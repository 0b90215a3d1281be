//! Randomized null networks: same layer sizes, same per-layer edge counts,
//! positions uniform within each mask.
//!
//! Sample `k` of a spec is a pure function of `(seed, k)` via counter-based
//! RNG derivation, so ensembles are reproducible across runs, platforms,
//! and degrees of parallelism, and any single sample can be regenerated in
//! isolation.

use crate::exec;
use crate::mask::{InvalidStackError, MaskMatrix, MaskStack};
use crate::motif::{count_all, MotifCensus};
use crate::rng::{self, derive_rng, uniform_index};
use rand_core::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EnsembleError {
    #[error("layer {layer}: {edges} edges do not fit a {rows}x{cols} mask")]
    EdgeCountExceedsGrid { layer: usize, edges: u64, rows: usize, cols: usize },
    #[error("sample_count must be at least 2, got {got}")]
    TooFewSamples { got: u32 },
    #[error("sample index {index} outside 0..{sample_count}")]
    IndexOutOfRange { index: u32, sample_count: u32 },
    #[error("layer_dims needs at least 2 entries, got {got}")]
    TooFewLayers { got: usize },
    #[error(transparent)]
    InvalidStack(#[from] InvalidStackError),
}

/// Shape of a null ensemble: layer sizes, per-layer edge counts, seed, and
/// ensemble size.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NullSpec {
    pub layer_dims: Vec<usize>,
    pub per_layer_edges: Vec<u64>,
    pub seed: u64,
    pub sample_count: u32,
}

impl NullSpec {
    pub fn new(
        layer_dims: Vec<usize>,
        per_layer_edges: Vec<u64>,
        seed: u64,
        sample_count: u32,
    ) -> Result<Self, EnsembleError> {
        if layer_dims.len() < 2 {
            return Err(EnsembleError::TooFewLayers { got: layer_dims.len() });
        }
        assert_eq!(per_layer_edges.len(), layer_dims.len() - 1, "one edge count per mask");
        if sample_count < 2 {
            return Err(EnsembleError::TooFewSamples { got: sample_count });
        }
        for (i, &edges) in per_layer_edges.iter().enumerate() {
            let (rows, cols) = (layer_dims[i], layer_dims[i + 1]);
            if edges > (rows * cols) as u64 {
                return Err(EnsembleError::EdgeCountExceedsGrid { layer: i, edges, rows, cols });
            }
        }
        Ok(Self { layer_dims, per_layer_edges, seed, sample_count })
    }
}

/// Read the null-ensemble shape off an existing network: identical layer
/// sizes and per-layer edge counts.
pub fn null_spec_of(
    stack: &MaskStack,
    seed: u64,
    sample_count: u32,
) -> Result<NullSpec, EnsembleError> {
    stack.ensure_valid()?;
    let dims = stack.layer_dims();
    let edges = stack.masks().iter().map(|m| m.count_ones()).collect();
    NullSpec::new(dims, edges, seed, sample_count)
}

/// Generate null network `index`: for each mask independently, exactly the
/// specified number of positions chosen uniformly without replacement.
pub fn generate(spec: &NullSpec, index: u32) -> Result<MaskStack, EnsembleError> {
    if index >= spec.sample_count {
        return Err(EnsembleError::IndexOutOfRange { index, sample_count: spec.sample_count });
    }
    let mut rng = derive_rng(spec.seed, rng::DOMAIN_NULL, index as u64);
    let masks = spec
        .layer_dims
        .windows(2)
        .zip(&spec.per_layer_edges)
        .map(|(dims, &edges)| random_mask(&mut rng, dims[0], dims[1], edges))
        .collect();
    Ok(MaskStack::new(format!("null{index:04}"), masks))
}

/// Uniform placement of `edges` distinct cells in a `rows x cols` grid.
/// Sparse masks use rejection sampling; dense ones a partial Fisher-Yates
/// shuffle.
fn random_mask(rng: &mut impl RngCore, rows: usize, cols: usize, edges: u64) -> MaskMatrix {
    let cells = rows * cols;
    let edges = edges as usize;
    let mut mask = MaskMatrix::zeros(rows, cols);
    if edges == 0 {
        return mask;
    }
    if edges * 2 <= cells {
        let mut placed = 0;
        while placed < edges {
            let cell = uniform_index(rng, cells);
            let (r, c) = (cell / cols, cell % cols);
            if mask.get(r, c) == 0 {
                mask.set(r, c, true);
                placed += 1;
            }
        }
    } else {
        let mut cells_vec: Vec<u32> = (0..cells as u32).collect();
        for i in 0..edges {
            let j = i + uniform_index(rng, cells - i);
            cells_vec.swap(i, j);
            let cell = cells_vec[i] as usize;
            mask.set(cell / cols, cell % cols, true);
        }
    }
    mask
}

/// Census every sample of the ensemble, in index order. Fans out across the
/// rayon pool when the `parallel` feature is on.
pub fn census_batch(spec: &NullSpec) -> Result<Vec<MotifCensus>, EnsembleError> {
    let results = exec::map_indexed(spec.sample_count as usize, |k| {
        let stack = generate(spec, k as u32)?;
        count_all(&stack).map_err(EnsembleError::from)
    });
    results.into_iter().collect()
}

/// Sequential version of [`census_batch`], always available. Used as the
/// baseline in benchmarks; produces identical results.
pub fn census_batch_serial(spec: &NullSpec) -> Result<Vec<MotifCensus>, EnsembleError> {
    (0..spec.sample_count)
        .map(|k| {
            let stack = generate(spec, k)?;
            count_all(&stack).map_err(EnsembleError::from)
        })
        .collect()
}
