//! Exact counting of the eight 2nd- and 3rd-order sub-graph families in a
//! layered feed-forward network.
//!
//! All counts reduce to degree combinatorics and matrix-product arithmetic
//! on the binary masks:
//!
//! * chains are entry sums of products of consecutive masks, computed here
//!   in sparse form (degree products over middle nodes / middle edges);
//! * converging and diverging stars are `C(n, k)` sums over column and row
//!   degrees;
//! * bi-fans count unordered row pairs weighted by `C(shared targets, 2)`;
//! * bi-parallels count `C(P[s][t], 2)` over the two-mask product `P`,
//!   whose entries are the numbers of distinct intermediates.
//!
//! Counts are held in `u128`: sparse counts at realistic scales stay near
//! 1e5, but fully connected closed forms on 400-wide layers reach ~1e10 and
//! headroom is cheap.

use crate::mask::{InvalidStackError, MaskMatrix, MaskStack};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

/// The eight motif families, in canonical report order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MotifKind {
    Chain2,
    Converging2,
    Diverging2,
    Chain3,
    Converging3,
    Diverging3,
    BiFan,
    BiParallel,
}

impl MotifKind {
    pub const ALL: [MotifKind; 8] = [
        MotifKind::Chain2,
        MotifKind::Converging2,
        MotifKind::Diverging2,
        MotifKind::Chain3,
        MotifKind::Converging3,
        MotifKind::Diverging3,
        MotifKind::BiFan,
        MotifKind::BiParallel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MotifKind::Chain2 => "chain2",
            MotifKind::Converging2 => "converging2",
            MotifKind::Diverging2 => "diverging2",
            MotifKind::Chain3 => "chain3",
            MotifKind::Converging3 => "converging3",
            MotifKind::Diverging3 => "diverging3",
            MotifKind::BiFan => "bi_fan",
            MotifKind::BiParallel => "bi_parallel",
        }
    }

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|&k| k == self).unwrap()
    }

    pub fn from_name(name: &str) -> Option<MotifKind> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

impl fmt::Display for MotifKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-motif exact counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MotifCounts {
    pub chain2: u128,
    pub converging2: u128,
    pub diverging2: u128,
    pub chain3: u128,
    pub converging3: u128,
    pub diverging3: u128,
    pub bi_fan: u128,
    pub bi_parallel: u128,
}

impl MotifCounts {
    pub fn get(&self, kind: MotifKind) -> u128 {
        match kind {
            MotifKind::Chain2 => self.chain2,
            MotifKind::Converging2 => self.converging2,
            MotifKind::Diverging2 => self.diverging2,
            MotifKind::Chain3 => self.chain3,
            MotifKind::Converging3 => self.converging3,
            MotifKind::Diverging3 => self.diverging3,
            MotifKind::BiFan => self.bi_fan,
            MotifKind::BiParallel => self.bi_parallel,
        }
    }

    pub fn set(&mut self, kind: MotifKind, value: u128) {
        match kind {
            MotifKind::Chain2 => self.chain2 = value,
            MotifKind::Converging2 => self.converging2 = value,
            MotifKind::Diverging2 => self.diverging2 = value,
            MotifKind::Chain3 => self.chain3 = value,
            MotifKind::Converging3 => self.converging3 = value,
            MotifKind::Diverging3 => self.diverging3 = value,
            MotifKind::BiFan => self.bi_fan = value,
            MotifKind::BiParallel => self.bi_parallel = value,
        }
    }

    pub fn as_array(&self) -> [u128; 8] {
        let mut out = [0; 8];
        for (slot, kind) in out.iter_mut().zip(MotifKind::ALL) {
            *slot = self.get(kind);
        }
        out
    }
}

/// All eight counts for one network.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MotifCensus {
    pub label: String,
    pub sparsity_tag: String,
    pub counts: MotifCounts,
}

impl MotifCensus {
    pub fn with_sparsity_tag(mut self, tag: impl Into<String>) -> Self {
        self.sparsity_tag = tag.into();
        self
    }
}

pub(crate) fn choose2(n: u64) -> u128 {
    let n = n as u128;
    n * n.saturating_sub(1) / 2
}

pub(crate) fn choose3(n: u64) -> u128 {
    let n = n as u128;
    if n < 3 {
        0
    } else {
        n * (n - 1) * (n - 2) / 6
    }
}

/// Length-2 directed paths: element sum of each consecutive mask product.
///
/// Computed sparsely as `sum over middle nodes v of indeg(v) * outdeg(v)`.
pub fn count_chain2(stack: &MaskStack) -> Result<u128, InvalidStackError> {
    stack.ensure_valid()?;
    Ok(chain2_from(stack.masks()))
}

fn chain2_from(masks: &[MaskMatrix]) -> u128 {
    masks
        .windows(2)
        .map(|w| {
            let into_middle = w[0].col_counts();
            let out_of_middle = w[1].row_counts();
            into_middle
                .iter()
                .zip(&out_of_middle)
                .map(|(&i, &o)| i as u128 * o as u128)
                .sum::<u128>()
        })
        .sum()
}

/// Length-3 directed paths: element sum of each triple mask product.
///
/// Computed sparsely by iterating edges `(u, v)` of the middle mask and
/// accumulating `indeg(u) * outdeg(v)` from the flanking masks.
pub fn count_chain3(stack: &MaskStack) -> Result<u128, InvalidStackError> {
    stack.ensure_valid()?;
    Ok(chain3_from(stack.masks()))
}

fn chain3_from(masks: &[MaskMatrix]) -> u128 {
    masks
        .windows(3)
        .map(|w| {
            let indeg = w[0].col_counts();
            let outdeg = w[2].row_counts();
            w[1].edges().map(|(u, v)| indeg[u] as u128 * outdeg[v] as u128).sum::<u128>()
        })
        .sum()
}

/// Two sources sharing one target: `C(column degree, 2)` over all columns.
pub fn count_converging2(stack: &MaskStack) -> Result<u128, InvalidStackError> {
    stack.ensure_valid()?;
    Ok(star_count(stack.masks(), Axis::Col, choose2))
}

/// One source feeding two targets: `C(row degree, 2)` over all rows.
pub fn count_diverging2(stack: &MaskStack) -> Result<u128, InvalidStackError> {
    stack.ensure_valid()?;
    Ok(star_count(stack.masks(), Axis::Row, choose2))
}

/// Three sources sharing one target: `C(column degree, 3)`.
pub fn count_converging3(stack: &MaskStack) -> Result<u128, InvalidStackError> {
    stack.ensure_valid()?;
    Ok(star_count(stack.masks(), Axis::Col, choose3))
}

/// One source feeding three targets: `C(row degree, 3)`.
pub fn count_diverging3(stack: &MaskStack) -> Result<u128, InvalidStackError> {
    stack.ensure_valid()?;
    Ok(star_count(stack.masks(), Axis::Row, choose3))
}

enum Axis {
    Row,
    Col,
}

fn star_count(masks: &[MaskMatrix], axis: Axis, comb: fn(u64) -> u128) -> u128 {
    masks
        .iter()
        .map(|m| {
            let degrees = match axis {
                Axis::Row => m.row_counts(),
                Axis::Col => m.col_counts(),
            };
            degrees.into_iter().map(comb).sum::<u128>()
        })
        .sum()
}

/// Two sources each connected to the same two targets, counted once per
/// unordered row pair as `C(dot(row_i, row_j), 2)`.
pub fn count_bifan(stack: &MaskStack) -> Result<u128, InvalidStackError> {
    stack.ensure_valid()?;
    Ok(stack.masks().iter().map(bifan_in_mask).sum())
}

// Above this many rows the dense pair-count buffer would get large; fall
// back to a hash map keyed by row pair.
const BIFAN_DENSE_ROW_LIMIT: usize = 2048;

fn bifan_in_mask(mask: &MaskMatrix) -> u128 {
    // Accumulate, for every unordered row pair, the number of columns both
    // rows hit; each column with k live rows contributes its C(k, 2) pairs.
    let rows = mask.rows();
    let col_lists = cols_adjacency(mask);
    if rows <= BIFAN_DENSE_ROW_LIMIT {
        let mut shared = vec![0u32; rows * rows];
        for list in &col_lists {
            for (a, &r1) in list.iter().enumerate() {
                for &r2 in &list[a + 1..] {
                    shared[r1 as usize * rows + r2 as usize] += 1;
                }
            }
        }
        shared.into_iter().map(|d| choose2(d as u64)).sum()
    } else {
        let mut shared: HashMap<(u32, u32), u32> = HashMap::new();
        for list in &col_lists {
            for (a, &r1) in list.iter().enumerate() {
                for &r2 in &list[a + 1..] {
                    *shared.entry((r1, r2)).or_insert(0) += 1;
                }
            }
        }
        shared.into_values().map(|d| choose2(d as u64)).sum()
    }
}

/// One source joined to one target through two distinct intermediates:
/// `C(P[s][t], 2)` summed over the product `P` of each consecutive mask
/// pair, computed sparsely per source row.
pub fn count_biparallel(stack: &MaskStack) -> Result<u128, InvalidStackError> {
    stack.ensure_valid()?;
    let masks = stack.masks();
    let adjacency: Vec<Vec<Vec<u32>>> = masks.iter().map(rows_adjacency).collect();
    Ok(masks
        .windows(2)
        .enumerate()
        .map(|(i, w)| biparallel_in_pair(&adjacency[i], &adjacency[i + 1], w[1].cols()))
        .sum())
}

fn biparallel_in_pair(first: &[Vec<u32>], second: &[Vec<u32>], target_count: usize) -> u128 {
    let mut total = 0u128;
    let mut intermediates = vec![0u32; target_count];
    let mut touched = Vec::new();
    for out_edges in first {
        for &mid in out_edges {
            for &t in &second[mid as usize] {
                if intermediates[t as usize] == 0 {
                    touched.push(t);
                }
                intermediates[t as usize] += 1;
            }
        }
        for &t in &touched {
            total += choose2(intermediates[t as usize] as u64);
            intermediates[t as usize] = 0;
        }
        touched.clear();
    }
    total
}

fn rows_adjacency(mask: &MaskMatrix) -> Vec<Vec<u32>> {
    (0..mask.rows())
        .map(|r| {
            mask.row(r)
                .iter()
                .enumerate()
                .filter(|(_, &e)| e != 0)
                .map(|(c, _)| c as u32)
                .collect()
        })
        .collect()
}

fn cols_adjacency(mask: &MaskMatrix) -> Vec<Vec<u32>> {
    let mut lists = vec![Vec::new(); mask.cols()];
    for r in 0..mask.rows() {
        for (c, &e) in mask.row(r).iter().enumerate() {
            if e != 0 {
                lists[c].push(r as u32);
            }
        }
    }
    lists
}

/// Count all eight motif families in one pass over the stack.
///
/// The census label comes from the stack; the sparsity tag defaults to the
/// computed global sparsity and can be overridden with
/// [`MotifCensus::with_sparsity_tag`] when the caller has a schedule-level
/// tag.
pub fn count_all(stack: &MaskStack) -> Result<MotifCensus, InvalidStackError> {
    stack.ensure_valid()?;
    let masks = stack.masks();

    let row_counts: Vec<Vec<u64>> = masks.iter().map(|m| m.row_counts()).collect();
    let col_counts: Vec<Vec<u64>> = masks.iter().map(|m| m.col_counts()).collect();
    let adjacency: Vec<Vec<Vec<u32>>> = masks.iter().map(rows_adjacency).collect();

    let mut counts = MotifCounts::default();

    for i in 0..masks.len() {
        counts.converging2 += col_counts[i].iter().map(|&n| choose2(n)).sum::<u128>();
        counts.converging3 += col_counts[i].iter().map(|&n| choose3(n)).sum::<u128>();
        counts.diverging2 += row_counts[i].iter().map(|&n| choose2(n)).sum::<u128>();
        counts.diverging3 += row_counts[i].iter().map(|&n| choose3(n)).sum::<u128>();
        counts.bi_fan += bifan_in_mask(&masks[i]);

        if i + 1 < masks.len() {
            counts.chain2 += col_counts[i]
                .iter()
                .zip(&row_counts[i + 1])
                .map(|(&a, &b)| a as u128 * b as u128)
                .sum::<u128>();
            counts.bi_parallel +=
                biparallel_in_pair(&adjacency[i], &adjacency[i + 1], masks[i + 1].cols());
        }
        if i + 2 < masks.len() {
            counts.chain3 += adjacency[i + 1]
                .iter()
                .enumerate()
                .map(|(u, outs)| {
                    outs.iter()
                        .map(|&v| col_counts[i][u] as u128 * row_counts[i + 2][v as usize] as u128)
                        .sum::<u128>()
                })
                .sum::<u128>();
        }
    }

    let profile = crate::mask::sparsity_profile(stack)?;
    Ok(MotifCensus {
        label: stack.label().to_string(),
        sparsity_tag: format!("{:.6}", profile.global_sparsity),
        counts,
    })
}

/// Count a single motif family.
pub fn count(stack: &MaskStack, kind: MotifKind) -> Result<u128, InvalidStackError> {
    match kind {
        MotifKind::Chain2 => count_chain2(stack),
        MotifKind::Converging2 => count_converging2(stack),
        MotifKind::Diverging2 => count_diverging2(stack),
        MotifKind::Chain3 => count_chain3(stack),
        MotifKind::Converging3 => count_converging3(stack),
        MotifKind::Diverging3 => count_diverging3(stack),
        MotifKind::BiFan => count_bifan(stack),
        MotifKind::BiParallel => count_biparallel(stack),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mask::MaskMatrix;

    fn chain_example() -> MaskStack {
        MaskStack::new(
            "chain_example",
            vec![
                MaskMatrix::from_rows(&[&[0, 0, 1], &[1, 1, 0], &[0, 0, 0]]),
                MaskMatrix::from_rows(&[&[1, 1], &[0, 0], &[1, 0]]),
            ],
        )
    }

    #[test]
    fn chain2_on_worked_example_is_three() {
        assert_eq!(count_chain2(&chain_example()).unwrap(), 3);
    }

    #[test]
    fn chain2_needs_two_masks() {
        let s = MaskStack::new("single", vec![MaskMatrix::full(4, 4)]);
        assert_eq!(count_chain2(&s).unwrap(), 0);
    }

    #[test]
    fn chain2_full_closed_form() {
        let s = MaskStack::full("full", &[2, 3, 2]);
        assert_eq!(count_chain2(&s).unwrap(), 2 * 3 * 2);
    }

    #[test]
    fn converging2_full_square() {
        let s = MaskStack::new("full", vec![MaskMatrix::full(3, 3)]);
        assert_eq!(count_converging2(&s).unwrap(), 9);
    }

    #[test]
    fn converging2_on_chain_example() {
        assert_eq!(count_converging2(&chain_example()).unwrap(), 1);
    }

    #[test]
    fn converging2_zero_when_columns_have_single_edges() {
        let s = MaskStack::new("thin", vec![MaskMatrix::from_rows(&[&[1, 0], &[0, 1]])]);
        assert_eq!(count_converging2(&s).unwrap(), 0);
    }

    #[test]
    fn diverging2_full_square_and_chain_example() {
        let full = MaskStack::new("full", vec![MaskMatrix::full(3, 3)]);
        assert_eq!(count_diverging2(&full).unwrap(), 9);
        assert_eq!(count_diverging2(&chain_example()).unwrap(), 2);
        let zeros = MaskStack::new("zeros", vec![MaskMatrix::zeros(3, 3)]);
        assert_eq!(count_diverging2(&zeros).unwrap(), 0);
    }

    #[test]
    fn chain3_full_closed_form_and_short_stack() {
        let s = MaskStack::full("full", &[2, 2, 2, 2]);
        assert_eq!(count_chain3(&s).unwrap(), 16);
        assert_eq!(count_chain3(&chain_example()).unwrap(), 0);
    }

    #[test]
    fn converging3_thresholds() {
        let s = MaskStack::new("fan", vec![MaskMatrix::full(4, 1)]);
        assert_eq!(count_converging3(&s).unwrap(), 4);
        let pair = MaskStack::new("pair", vec![MaskMatrix::from_rows(&[&[1], &[1]])]);
        assert_eq!(count_converging3(&pair).unwrap(), 0);
    }

    #[test]
    fn diverging3_mirrors_converging3() {
        let s = MaskStack::new("fan", vec![MaskMatrix::full(1, 4)]);
        assert_eq!(count_diverging3(&s).unwrap(), 4);
        let pair = MaskStack::new("pair", vec![MaskMatrix::from_rows(&[&[1, 1]])]);
        assert_eq!(count_diverging3(&pair).unwrap(), 0);
    }

    #[test]
    fn bifan_full_square_and_single() {
        let full = MaskStack::new("full", vec![MaskMatrix::full(3, 3)]);
        assert_eq!(count_bifan(&full).unwrap(), 9);
        let one = MaskStack::new("one", vec![MaskMatrix::from_rows(&[&[1, 1], &[1, 1], &[0, 0]])]);
        assert_eq!(count_bifan(&one).unwrap(), 1);
    }

    #[test]
    fn biparallel_full_and_degenerate() {
        let full = MaskStack::full("full", &[2, 3, 2]);
        assert_eq!(count_biparallel(&full).unwrap(), 12);
        let single = MaskStack::new("single", vec![MaskMatrix::full(3, 3)]);
        assert_eq!(count_biparallel(&single).unwrap(), 0);
        // Worked-example product matrix has no entry >= 2.
        assert_eq!(count_biparallel(&chain_example()).unwrap(), 0);
    }

    #[test]
    fn count_all_matches_individual_counts_on_chain_example() {
        let census = count_all(&chain_example()).unwrap();
        assert_eq!(census.counts.chain2, 3);
        assert_eq!(census.counts.converging2, 1);
        assert_eq!(census.counts.diverging2, 2);
        assert_eq!(census.counts.chain3, 0);
        assert_eq!(census.counts.converging3, 0);
        assert_eq!(census.counts.diverging3, 0);
        assert_eq!(census.counts.bi_fan, 0);
        assert_eq!(census.counts.bi_parallel, 0);
        for kind in MotifKind::ALL {
            assert_eq!(census.counts.get(kind), count(&chain_example(), kind).unwrap());
        }
    }

    #[test]
    fn count_all_on_empty_network_is_zero() {
        let s = MaskStack::new("empty", vec![MaskMatrix::zeros(3, 3), MaskMatrix::zeros(3, 2)]);
        let census = count_all(&s).unwrap();
        assert_eq!(census.counts.as_array(), [0; 8]);
    }

    #[test]
    fn counts_reject_invalid_stack() {
        let bad = MaskStack::new("bad", vec![MaskMatrix::zeros(2, 3), MaskMatrix::zeros(4, 2)]);
        assert!(count_all(&bad).is_err());
        assert!(count_chain2(&bad).is_err());
    }

    #[test]
    fn kind_names_round_trip() {
        for kind in MotifKind::ALL {
            assert_eq!(MotifKind::from_name(kind.name()), Some(kind));
        }
        assert_eq!(MotifKind::from_name("nope"), None);
    }
}
