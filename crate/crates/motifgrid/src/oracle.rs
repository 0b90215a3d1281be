//! Independent brute-force sub-graph enumeration over the explicit DAG.
//!
//! This module is the ground truth the matrix/combinatorial engine is
//! tested against. It expands a mask stack into explicit nodes and edges
//! and counts motifs by exhaustive tuple iteration with edge-membership
//! tests, sharing no code with [`crate::motif`]. Usable only at desk scale;
//! inputs whose tuple space exceeds a budget are rejected.

use crate::mask::{InvalidStackError, MaskStack};
use crate::motif::MotifKind;
use std::collections::HashSet;
use thiserror::Error;

/// Refuse enumerations beyond this many candidate tuples by default.
pub const DEFAULT_TUPLE_BUDGET: u128 = 100_000_000;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("enumerating {kind} would visit {tuples} tuples, over the budget of {budget}")]
    TupleBudgetExceeded { kind: MotifKind, tuples: u128, budget: u128 },
    #[error(transparent)]
    InvalidStack(#[from] InvalidStackError),
}

/// A mask stack expanded to explicit nodes and directed edges.
#[derive(Clone, Debug)]
pub struct ExplicitDag {
    /// `(layer, within-layer index)` per node, in node-id order.
    nodes: Vec<(u32, u32)>,
    layer_sizes: Vec<usize>,
    /// First node id of each layer.
    offsets: Vec<u32>,
    edges: Vec<(u32, u32)>,
    edge_set: HashSet<(u32, u32)>,
}

impl ExplicitDag {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn nodes(&self) -> &[(u32, u32)] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    fn node_id(&self, layer: usize, index: usize) -> u32 {
        self.offsets[layer] + index as u32
    }

    fn has_edge(&self, a: u32, b: u32) -> bool {
        self.edge_set.contains(&(a, b))
    }
}

/// Expand a valid stack: one node per `(layer, index)`, one edge per
/// 1-entry.
pub fn expand(stack: &MaskStack) -> Result<ExplicitDag, InvalidStackError> {
    stack.ensure_valid()?;
    let layer_sizes = stack.layer_dims();
    let mut offsets = Vec::with_capacity(layer_sizes.len());
    let mut nodes = Vec::new();
    let mut next = 0u32;
    for (layer, &size) in layer_sizes.iter().enumerate() {
        offsets.push(next);
        for i in 0..size {
            nodes.push((layer as u32, i as u32));
        }
        next += size as u32;
    }
    let mut edges = Vec::new();
    for (i, mask) in stack.masks().iter().enumerate() {
        for (r, c) in mask.edges() {
            edges.push((offsets[i] + r as u32, offsets[i + 1] + c as u32));
        }
    }
    let edge_set = edges.iter().copied().collect();
    Ok(ExplicitDag { nodes, layer_sizes, offsets, edges, edge_set })
}

/// Number of candidate tuples `enumerate` would visit for `kind`.
pub fn tuple_space(dag: &ExplicitDag, kind: MotifKind) -> u128 {
    let sizes: Vec<u128> = dag.layer_sizes.iter().map(|&s| s as u128).collect();
    let c2 = |n: u128| n * n.saturating_sub(1) / 2;
    let c3 = |n: u128| if n < 3 { 0 } else { n * (n - 1) * (n - 2) / 6 };
    let pair_sum = |f: &dyn Fn(&[u128]) -> u128| {
        (0..sizes.len().saturating_sub(1)).map(|i| f(&sizes[i..])).sum::<u128>()
    };
    match kind {
        MotifKind::Chain2 => {
            (0..sizes.len().saturating_sub(2)).map(|i| sizes[i] * sizes[i + 1] * sizes[i + 2]).sum()
        }
        MotifKind::Chain3 => (0..sizes.len().saturating_sub(3))
            .map(|i| sizes[i] * sizes[i + 1] * sizes[i + 2] * sizes[i + 3])
            .sum(),
        MotifKind::Converging2 => pair_sum(&|s| c2(s[0]) * s[1]),
        MotifKind::Diverging2 => pair_sum(&|s| s[0] * c2(s[1])),
        MotifKind::Converging3 => pair_sum(&|s| c3(s[0]) * s[1]),
        MotifKind::Diverging3 => pair_sum(&|s| s[0] * c3(s[1])),
        MotifKind::BiFan => pair_sum(&|s| c2(s[0]) * c2(s[1])),
        MotifKind::BiParallel => {
            (0..sizes.len().saturating_sub(2)).map(|i| sizes[i] * c2(sizes[i + 1]) * sizes[i + 2]).sum()
        }
    }
}

/// Exhaustively count one motif family, with the default tuple budget.
pub fn enumerate(dag: &ExplicitDag, kind: MotifKind) -> Result<u128, OracleError> {
    enumerate_with_budget(dag, kind, DEFAULT_TUPLE_BUDGET)
}

/// Exhaustively count one motif family. Unordered roles (fan members,
/// bi-fan sources/targets, bi-parallel intermediates) are deduplicated by
/// iterating index-ordered combinations only.
pub fn enumerate_with_budget(
    dag: &ExplicitDag,
    kind: MotifKind,
    budget: u128,
) -> Result<u128, OracleError> {
    let tuples = tuple_space(dag, kind);
    if tuples > budget {
        return Err(OracleError::TupleBudgetExceeded { kind, tuples, budget });
    }
    let sizes = dag.layer_sizes.clone();
    let id = |l: usize, i: usize| dag.node_id(l, i);
    let mut total = 0u128;
    match kind {
        MotifKind::Chain2 => {
            for l in 0..sizes.len().saturating_sub(2) {
                for a in 0..sizes[l] {
                    for b in 0..sizes[l + 1] {
                        for c in 0..sizes[l + 2] {
                            if dag.has_edge(id(l, a), id(l + 1, b))
                                && dag.has_edge(id(l + 1, b), id(l + 2, c))
                            {
                                total += 1;
                            }
                        }
                    }
                }
            }
        }
        MotifKind::Chain3 => {
            for l in 0..sizes.len().saturating_sub(3) {
                for a in 0..sizes[l] {
                    for b in 0..sizes[l + 1] {
                        if !dag.has_edge(id(l, a), id(l + 1, b)) {
                            continue;
                        }
                        for c in 0..sizes[l + 2] {
                            if !dag.has_edge(id(l + 1, b), id(l + 2, c)) {
                                continue;
                            }
                            for d in 0..sizes[l + 3] {
                                if dag.has_edge(id(l + 2, c), id(l + 3, d)) {
                                    total += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
        MotifKind::Converging2 => {
            for l in 0..sizes.len().saturating_sub(1) {
                for s1 in 0..sizes[l] {
                    for s2 in s1 + 1..sizes[l] {
                        for t in 0..sizes[l + 1] {
                            if dag.has_edge(id(l, s1), id(l + 1, t))
                                && dag.has_edge(id(l, s2), id(l + 1, t))
                            {
                                total += 1;
                            }
                        }
                    }
                }
            }
        }
        MotifKind::Converging3 => {
            for l in 0..sizes.len().saturating_sub(1) {
                for s1 in 0..sizes[l] {
                    for s2 in s1 + 1..sizes[l] {
                        for s3 in s2 + 1..sizes[l] {
                            for t in 0..sizes[l + 1] {
                                if dag.has_edge(id(l, s1), id(l + 1, t))
                                    && dag.has_edge(id(l, s2), id(l + 1, t))
                                    && dag.has_edge(id(l, s3), id(l + 1, t))
                                {
                                    total += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
        MotifKind::Diverging2 => {
            for l in 0..sizes.len().saturating_sub(1) {
                for s in 0..sizes[l] {
                    for t1 in 0..sizes[l + 1] {
                        for t2 in t1 + 1..sizes[l + 1] {
                            if dag.has_edge(id(l, s), id(l + 1, t1))
                                && dag.has_edge(id(l, s), id(l + 1, t2))
                            {
                                total += 1;
                            }
                        }
                    }
                }
            }
        }
        MotifKind::Diverging3 => {
            for l in 0..sizes.len().saturating_sub(1) {
                for s in 0..sizes[l] {
                    for t1 in 0..sizes[l + 1] {
                        for t2 in t1 + 1..sizes[l + 1] {
                            for t3 in t2 + 1..sizes[l + 1] {
                                if dag.has_edge(id(l, s), id(l + 1, t1))
                                    && dag.has_edge(id(l, s), id(l + 1, t2))
                                    && dag.has_edge(id(l, s), id(l + 1, t3))
                                {
                                    total += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
        MotifKind::BiFan => {
            for l in 0..sizes.len().saturating_sub(1) {
                for s1 in 0..sizes[l] {
                    for s2 in s1 + 1..sizes[l] {
                        for t1 in 0..sizes[l + 1] {
                            for t2 in t1 + 1..sizes[l + 1] {
                                if dag.has_edge(id(l, s1), id(l + 1, t1))
                                    && dag.has_edge(id(l, s1), id(l + 1, t2))
                                    && dag.has_edge(id(l, s2), id(l + 1, t1))
                                    && dag.has_edge(id(l, s2), id(l + 1, t2))
                                {
                                    total += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
        MotifKind::BiParallel => {
            for l in 0..sizes.len().saturating_sub(2) {
                for s in 0..sizes[l] {
                    for m1 in 0..sizes[l + 1] {
                        for m2 in m1 + 1..sizes[l + 1] {
                            for t in 0..sizes[l + 2] {
                                if dag.has_edge(id(l, s), id(l + 1, m1))
                                    && dag.has_edge(id(l, s), id(l + 1, m2))
                                    && dag.has_edge(id(l + 1, m1), id(l + 2, t))
                                    && dag.has_edge(id(l + 1, m2), id(l + 2, t))
                                {
                                    total += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(total)
}

/// Count all eight kinds by enumeration.
pub fn enumerate_all(dag: &ExplicitDag) -> Result<crate::motif::MotifCounts, OracleError> {
    let mut counts = crate::motif::MotifCounts::default();
    for kind in MotifKind::ALL {
        counts.set(kind, enumerate(dag, kind)?);
    }
    Ok(counts)
}
