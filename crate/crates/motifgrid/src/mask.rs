//! Layered binary connectivity masks: the data model every other module
//! works on, plus validation, sparsity accounting, and dead-connection
//! cleanup.
//!
//! Orientation convention: a [`MaskMatrix`] is indexed `(source row, target
//! column)`, so `entries[r][c] == 1` means layer-`i` node `r` feeds
//! layer-`i+1` node `c`. All counting algorithms in [`crate::motif`] are
//! written against this convention (a column collects a node's incoming
//! edges, a row its outgoing edges).

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// One layer's binary connectivity: source nodes x target nodes.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<u8>,
}

impl MaskMatrix {
    /// All-zero mask.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![0; rows * cols] }
    }

    /// Fully connected mask.
    pub fn full(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![1; rows * cols] }
    }

    /// Build from row-major entries. Entries are kept verbatim; non-binary
    /// values are reported by [`MaskStack::validate`], not rejected here.
    ///
    /// Panics if `entries.len() != rows * cols`.
    pub fn from_entries(rows: usize, cols: usize, entries: Vec<u8>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must equal rows * cols");
        Self { rows, cols, entries }
    }

    /// Build from literal rows, e.g. `MaskMatrix::from_rows(&[&[0, 1], &[1, 0]])`.
    pub fn from_rows(rows: &[&[u8]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "all rows must have equal length");
            entries.extend_from_slice(row);
        }
        Self { rows: r, cols: c, entries }
    }

    /// Zero mask with the given edges set.
    pub fn from_edges(rows: usize, cols: usize, edges: &[(usize, usize)]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for &(r, c) in edges {
            m.set(r, c, true);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.entries[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, present: bool) {
        self.entries[row * self.cols + col] = present as u8;
    }

    /// One row as a slice, length `cols`.
    pub fn row(&self, row: usize) -> &[u8] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    /// Total number of edges (non-zero entries).
    pub fn count_ones(&self) -> u64 {
        self.entries.iter().filter(|&&e| e != 0).count() as u64
    }

    /// Out-degree of each source node.
    pub fn row_counts(&self) -> Vec<u64> {
        (0..self.rows)
            .map(|r| self.row(r).iter().filter(|&&e| e != 0).count() as u64)
            .collect()
    }

    /// In-degree of each target node.
    pub fn col_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.cols];
        for r in 0..self.rows {
            for (c, &e) in self.row(r).iter().enumerate() {
                if e != 0 {
                    counts[c] += 1;
                }
            }
        }
        counts
    }

    /// Edges in ascending `(row, col)` lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let cols = self.cols;
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, &e)| e != 0)
            .map(move |(i, _)| (i / cols, i % cols))
    }

    fn zero_row(&mut self, row: usize) -> u64 {
        let cols = self.cols;
        let slice = &mut self.entries[row * cols..(row + 1) * cols];
        let removed = slice.iter().filter(|&&e| e != 0).count() as u64;
        slice.fill(0);
        removed
    }

    fn zero_col(&mut self, col: usize) -> u64 {
        let mut removed = 0;
        for r in 0..self.rows {
            let e = &mut self.entries[r * self.cols + col];
            if *e != 0 {
                *e = 0;
                removed += 1;
            }
        }
        removed
    }
}

impl fmt::Debug for MaskMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MaskMatrix({}x{}, {} edges)", self.rows, self.cols, self.count_ones())
    }
}

/// An ordered list of masks describing one feed-forward network.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskStack {
    label: String,
    masks: Vec<MaskMatrix>,
}

impl MaskStack {
    pub fn new(label: impl Into<String>, masks: Vec<MaskMatrix>) -> Self {
        Self { label: label.into(), masks }
    }

    /// Fully connected stack for the given layer dimensions.
    pub fn full(label: impl Into<String>, dims: &[usize]) -> Self {
        let masks = dims.windows(2).map(|w| MaskMatrix::full(w[0], w[1])).collect();
        Self::new(label, masks)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }

    pub fn masks(&self) -> &[MaskMatrix] {
        &self.masks
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    /// Node counts per layer, `len() + 1` entries. Meaningful once the stack
    /// validates (dimension chaining).
    pub fn layer_dims(&self) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.masks.len() + 1);
        if let Some(first) = self.masks.first() {
            dims.push(first.rows());
        }
        dims.extend(self.masks.iter().map(|m| m.cols()));
        dims
    }

    /// Total number of representable edges.
    pub fn total_cells(&self) -> u64 {
        self.masks.iter().map(|m| (m.rows() * m.cols()) as u64).sum()
    }

    /// Check every invariant; violations are data, not failures.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.masks.is_empty() {
            violations.push(Violation::EmptyStack);
        }
        for (i, m) in self.masks.iter().enumerate() {
            if m.rows() == 0 || m.cols() == 0 {
                violations.push(Violation::EmptyMask { layer: i, rows: m.rows(), cols: m.cols() });
            }
            for (r, c) in (0..m.rows()).flat_map(|r| (0..m.cols()).map(move |c| (r, c))) {
                let value = m.get(r, c);
                if value > 1 {
                    violations.push(Violation::NonBinaryEntry { layer: i, row: r, col: c, value });
                }
            }
        }
        for (i, pair) in self.masks.windows(2).enumerate() {
            if pair[0].cols() != pair[1].rows() {
                violations.push(Violation::DimensionMismatch {
                    layer: i,
                    cols: pair[0].cols(),
                    next_rows: pair[1].rows(),
                });
            }
        }
        ValidationReport { violations }
    }

    /// Validate and convert to a `Result` for operations that require a
    /// well-formed stack.
    pub fn ensure_valid(&self) -> Result<(), InvalidStackError> {
        let report = self.validate();
        if report.is_ok() {
            Ok(())
        } else {
            Err(InvalidStackError(report))
        }
    }
}

/// A single broken invariant, naming the offending layer and rule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    EmptyStack,
    EmptyMask { layer: usize, rows: usize, cols: usize },
    NonBinaryEntry { layer: usize, row: usize, col: usize, value: u8 },
    DimensionMismatch { layer: usize, cols: usize, next_rows: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyStack => write!(f, "stack has no masks"),
            Violation::EmptyMask { layer, rows, cols } => {
                write!(f, "mask {layer} has degenerate shape {rows}x{cols}")
            }
            Violation::NonBinaryEntry { layer, row, col, value } => {
                write!(f, "non-binary entry {value} at mask {layer} position ({row}, {col})")
            }
            Violation::DimensionMismatch { layer, cols, next_rows } => {
                write!(
                    f,
                    "mask pair ({layer}, {}) disagrees: {cols} target nodes vs {next_rows} source nodes",
                    layer + 1
                )
            }
        }
    }
}

/// Outcome of [`MaskStack::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        let msgs: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", msgs.join("; "))
    }
}

/// Error returned by operations that require a valid stack.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("invalid mask stack: {0}")]
pub struct InvalidStackError(pub ValidationReport);

/// Edge counts and the derived global sparsity of a stack.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparsityProfile {
    pub per_layer_edges: Vec<u64>,
    pub total_edges: u64,
    pub total_cells: u64,
    /// `1 - total_edges / total_cells`, in `[0, 1]`.
    pub global_sparsity: f64,
}

/// Count edges per mask and compute the global sparsity fraction.
pub fn sparsity_profile(stack: &MaskStack) -> Result<SparsityProfile, InvalidStackError> {
    stack.ensure_valid()?;
    let per_layer_edges: Vec<u64> = stack.masks().iter().map(|m| m.count_ones()).collect();
    let total_edges: u64 = per_layer_edges.iter().sum();
    let total_cells = stack.total_cells();
    let global_sparsity = 1.0 - total_edges as f64 / total_cells as f64;
    Ok(SparsityProfile { per_layer_edges, total_edges, total_cells, global_sparsity })
}

/// Direction of dead-connection removal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CleanupMode {
    /// Remove outgoing edges of non-input nodes that lost all inputs,
    /// sweeping front-to-back until fixpoint.
    Forward,
    /// Forward sweep plus the symmetric back-to-front sweep removing
    /// incoming edges of non-output nodes with no outputs, iterated to a
    /// joint fixpoint.
    ForwardBackward,
}

/// Remove obsolete edges left behind by pruning. Returns the cleaned stack
/// and the number of edges removed. Idempotent: a second application
/// removes nothing.
pub fn clean_dead(
    stack: &MaskStack,
    mode: CleanupMode,
) -> Result<(MaskStack, u64), InvalidStackError> {
    stack.ensure_valid()?;
    let mut masks = stack.masks().to_vec();
    let mut removed = 0u64;
    loop {
        let mut pass = forward_sweep(&mut masks);
        if mode == CleanupMode::ForwardBackward {
            pass += backward_sweep(&mut masks);
        }
        removed += pass;
        if pass == 0 {
            break;
        }
    }
    Ok((MaskStack::new(stack.label(), masks), removed))
}

/// Zero out-edges of every non-input node with zero in-degree.
fn forward_sweep(masks: &mut [MaskMatrix]) -> u64 {
    let mut removed = 0;
    for i in 1..masks.len() {
        let in_degrees = masks[i - 1].col_counts();
        for (node, &deg) in in_degrees.iter().enumerate() {
            if deg == 0 {
                removed += masks[i].zero_row(node);
            }
        }
    }
    removed
}

/// Zero in-edges of every non-output node with zero out-degree.
fn backward_sweep(masks: &mut [MaskMatrix]) -> u64 {
    let mut removed = 0;
    for i in (0..masks.len().saturating_sub(1)).rev() {
        let out_degrees = masks[i + 1].row_counts();
        for (node, &deg) in out_degrees.iter().enumerate() {
            if deg == 0 {
                removed += masks[i].zero_col(node);
            }
        }
    }
    removed
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain_example() -> MaskStack {
        // 3-3-2 network with 6 edges; reused across the crate's tests.
        MaskStack::new(
            "chain_example",
            vec![
                MaskMatrix::from_rows(&[&[0, 0, 1], &[1, 1, 0], &[0, 0, 0]]),
                MaskMatrix::from_rows(&[&[1, 1], &[0, 0], &[1, 0]]),
            ],
        )
    }

    #[test]
    fn validate_accepts_chained_dims() {
        let s = MaskStack::new("ok", vec![MaskMatrix::zeros(2, 3), MaskMatrix::zeros(3, 2)]);
        assert!(s.validate().is_ok());
    }

    #[test]
    fn validate_flags_dimension_mismatch() {
        let s = MaskStack::new("bad", vec![MaskMatrix::zeros(2, 3), MaskMatrix::zeros(4, 2)]);
        let report = s.validate();
        assert_eq!(
            report.violations,
            vec![Violation::DimensionMismatch { layer: 0, cols: 3, next_rows: 4 }]
        );
    }

    #[test]
    fn validate_flags_non_binary_entry() {
        let m = MaskMatrix::from_entries(1, 2, vec![0, 2]);
        let s = MaskStack::new("bad", vec![m]);
        let report = s.validate();
        assert_eq!(
            report.violations,
            vec![Violation::NonBinaryEntry { layer: 0, row: 0, col: 1, value: 2 }]
        );
    }

    #[test]
    fn validate_flags_empty_stack() {
        let s = MaskStack::new("empty", vec![]);
        assert!(!s.validate().is_ok());
    }

    #[test]
    fn sparsity_of_empty_and_full_single_mask() {
        let zero = MaskStack::new("z", vec![MaskMatrix::zeros(3, 3)]);
        let p = sparsity_profile(&zero).unwrap();
        assert_eq!(p.per_layer_edges, vec![0]);
        assert_eq!(p.global_sparsity, 1.0);

        let full = MaskStack::new("f", vec![MaskMatrix::full(3, 3)]);
        let p = sparsity_profile(&full).unwrap();
        assert_eq!(p.per_layer_edges, vec![9]);
        assert_eq!(p.global_sparsity, 0.0);
    }

    #[test]
    fn sparsity_of_chain_example() {
        let p = sparsity_profile(&chain_example()).unwrap();
        assert_eq!(p.per_layer_edges, vec![3, 3]);
        assert_eq!(p.total_edges, 6);
        assert_eq!(p.total_cells, 15);
        assert!((p.global_sparsity - 0.6).abs() < 1e-15);
    }

    #[test]
    fn clean_dead_removes_outputs_of_inputless_node() {
        // Hidden node 1 has zero in-degree; its two outgoing edges die.
        let s = MaskStack::new(
            "dead",
            vec![
                MaskMatrix::from_rows(&[&[1, 0, 0], &[0, 0, 1]]),
                MaskMatrix::from_rows(&[&[1, 0], &[1, 1], &[0, 1]]),
            ],
        );
        let (cleaned, removed) = clean_dead(&s, CleanupMode::Forward).unwrap();
        assert_eq!(removed, 2);
        assert_eq!(cleaned.masks()[1].row(1), &[0, 0]);
        assert_eq!(cleaned.masks()[0], s.masks()[0]);
    }

    #[test]
    fn clean_dead_leaves_full_stack_alone() {
        let s = MaskStack::full("full", &[3, 4, 2]);
        let (cleaned, removed) = clean_dead(&s, CleanupMode::ForwardBackward).unwrap();
        assert_eq!(removed, 0);
        assert_eq!(cleaned, s);
    }

    #[test]
    fn clean_dead_cascades_through_layers() {
        // Node 0 of layer 1 is dead; its removal kills the only input of
        // node 0 of layer 2, whose out-edges then die as well.
        let s = MaskStack::new(
            "cascade",
            vec![
                MaskMatrix::from_rows(&[&[0, 1]]),
                MaskMatrix::from_rows(&[&[1, 0], &[0, 1]]),
                MaskMatrix::from_rows(&[&[1, 1], &[1, 0]]),
            ],
        );
        let (cleaned, removed) = clean_dead(&s, CleanupMode::Forward).unwrap();
        // mask1 row 0 (1 edge) and mask2 row 0 (2 edges) are removed.
        assert_eq!(removed, 3);
        assert_eq!(cleaned.masks()[1].row(0), &[0, 0]);
        assert_eq!(cleaned.masks()[2].row(0), &[0, 0]);
        let (_, removed_again) = clean_dead(&cleaned, CleanupMode::Forward).unwrap();
        assert_eq!(removed_again, 0);
    }

    #[test]
    fn backward_sweep_removes_edges_into_sinks() {
        // Layer-1 node 1 has no outputs; forward-and-backward drops its
        // incoming edge, forward-only keeps it.
        let s = MaskStack::new(
            "sink",
            vec![
                MaskMatrix::from_rows(&[&[1, 1]]),
                MaskMatrix::from_rows(&[&[1], &[0]]),
            ],
        );
        let (fwd, removed_fwd) = clean_dead(&s, CleanupMode::Forward).unwrap();
        assert_eq!(removed_fwd, 0);
        assert_eq!(fwd, s);

        let (both, removed_both) = clean_dead(&s, CleanupMode::ForwardBackward).unwrap();
        assert_eq!(removed_both, 1);
        assert_eq!(both.masks()[0].row(0), &[1, 0]);
    }

    #[test]
    fn clean_dead_rejects_invalid_stack() {
        let s = MaskStack::new("bad", vec![MaskMatrix::zeros(2, 3), MaskMatrix::zeros(4, 2)]);
        assert!(clean_dead(&s, CleanupMode::Forward).is_err());
    }
}
