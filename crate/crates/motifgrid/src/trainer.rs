//! Produce realistic pruned mask stacks: small multilayer perceptrons are
//! trained on a seeded synthetic regression task and sparsified by
//! iterative magnitude pruning with retraining, snapshotting the mask at a
//! ladder of sparsity levels.
//!
//! Weights are `(source x target)` matrices matching the mask orientation,
//! the activation is `atan` at every layer, and training is plain SGD with
//! momentum on mean squared error. Masked weights are exactly zero after
//! every update. Everything is deterministic per `(seed, network id)`.

use crate::exec;
use crate::mask::{clean_dead, sparsity_profile, CleanupMode, MaskMatrix, MaskStack};
use crate::rng::{self, derive_rng, uniform_f64, uniform_index};
use rand_core::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("training diverged at step {step} (loss {loss})")]
    Diverged { step: usize, loss: f64 },
    #[error("prune target {target} below current sparsity {current}")]
    TargetBelowCurrent { target: f64, current: f64 },
    #[error("prune schedule invalid: {0}")]
    BadSchedule(String),
    #[error("network needs at least 2 layers, got {got}")]
    TooFewLayers { got: usize },
}

/// Configuration of the synthetic regression task.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TaskConfig {
    pub seed: u64,
    pub input_dim: usize,
    pub output_dim: usize,
    pub samples: usize,
}

impl Default for TaskConfig {
    fn default() -> Self {
        Self { seed: 0, input_dim: 10, output_dim: 7, samples: 4096 }
    }
}

/// A fixed random smooth map from inputs to targets: a tanh random-feature
/// expansion mixed per output. Kept inside the dataset so stored targets
/// can be re-derived exactly.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SyntheticTask {
    input_dim: usize,
    output_dim: usize,
    /// feature weights, `features x input_dim`
    feature_w: Vec<f64>,
    feature_b: Vec<f64>,
    /// output mixing, `output_dim x features`
    mix: Vec<f64>,
}

const TASK_FEATURES: usize = 16;

impl SyntheticTask {
    fn new(rng: &mut impl RngCore, input_dim: usize, output_dim: usize) -> Self {
        let w_scale = 2.0 / (input_dim as f64).sqrt();
        let mix_scale = 1.0 / (TASK_FEATURES as f64).sqrt();
        let feature_w =
            (0..TASK_FEATURES * input_dim).map(|_| uniform_f64(rng, -w_scale, w_scale)).collect();
        let feature_b = (0..TASK_FEATURES).map(|_| uniform_f64(rng, -0.5, 0.5)).collect();
        let mix =
            (0..output_dim * TASK_FEATURES).map(|_| uniform_f64(rng, -mix_scale, mix_scale)).collect();
        Self { input_dim, output_dim, feature_w, feature_b, mix }
    }

    /// Evaluate the target function at `x`.
    pub fn eval(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.input_dim);
        assert_eq!(y.len(), self.output_dim);
        let mut features = [0.0; TASK_FEATURES];
        for (k, f) in features.iter_mut().enumerate() {
            let row = &self.feature_w[k * self.input_dim..(k + 1) * self.input_dim];
            let dot: f64 = row.iter().zip(x).map(|(w, v)| w * v).sum();
            *f = (dot + self.feature_b[k]).tanh();
        }
        for (j, out) in y.iter_mut().enumerate() {
            let row = &self.mix[j * TASK_FEATURES..(j + 1) * TASK_FEATURES];
            *out = row.iter().zip(&features).map(|(m, f)| m * f).sum();
        }
    }
}

/// A seeded regression dataset: inputs uniform in `[-1, 1]`, targets from
/// a [`SyntheticTask`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Dataset {
    pub task: SyntheticTask,
    inputs: Vec<f64>,
    targets: Vec<f64>,
    samples: usize,
    input_dim: usize,
    output_dim: usize,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.samples
    }

    pub fn is_empty(&self) -> bool {
        self.samples == 0
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn input(&self, i: usize) -> &[f64] {
        &self.inputs[i * self.input_dim..(i + 1) * self.input_dim]
    }

    pub fn target(&self, i: usize) -> &[f64] {
        &self.targets[i * self.output_dim..(i + 1) * self.output_dim]
    }
}

/// Build the dataset for a task configuration; identical seeds give
/// identical datasets.
pub fn make_task(cfg: &TaskConfig) -> Dataset {
    let mut rng = derive_rng(cfg.seed, rng::DOMAIN_TASK, 0);
    let task = SyntheticTask::new(&mut rng, cfg.input_dim, cfg.output_dim);
    let mut inputs = Vec::with_capacity(cfg.samples * cfg.input_dim);
    let mut targets = vec![0.0; cfg.samples * cfg.output_dim];
    for i in 0..cfg.samples {
        let start = inputs.len();
        for _ in 0..cfg.input_dim {
            inputs.push(uniform_f64(&mut rng, -1.0, 1.0));
        }
        let x = &inputs[start..];
        task.eval(x, &mut targets[i * cfg.output_dim..(i + 1) * cfg.output_dim]);
    }
    Dataset {
        task,
        inputs,
        targets,
        samples: cfg.samples,
        input_dim: cfg.input_dim,
        output_dim: cfg.output_dim,
    }
}

/// A dense MLP with multiplicative binary masks and `atan` activations.
#[derive(Clone, Debug)]
pub struct DenseNet {
    dims: Vec<usize>,
    /// one `(dims[l] x dims[l+1])` row-major matrix per layer
    weights: Vec<Vec<f64>>,
    masks: Vec<MaskMatrix>,
}

impl DenseNet {
    /// Random dense initialization, deterministic per seed.
    pub fn new(dims: &[usize], seed: u64) -> Result<Self, TrainError> {
        if dims.len() < 2 {
            return Err(TrainError::TooFewLayers { got: dims.len() });
        }
        let mut rng = derive_rng(seed, rng::DOMAIN_NET_INIT, 0);
        let mut weights = Vec::with_capacity(dims.len() - 1);
        let mut masks = Vec::with_capacity(dims.len() - 1);
        for w in dims.windows(2) {
            let (rows, cols) = (w[0], w[1]);
            let bound = (6.0 / (rows + cols) as f64).sqrt();
            weights.push((0..rows * cols).map(|_| uniform_f64(&mut rng, -bound, bound)).collect());
            masks.push(MaskMatrix::full(rows, cols));
        }
        Ok(Self { dims: dims.to_vec(), weights, masks })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn weight(&self, layer: usize, src: usize, tgt: usize) -> f64 {
        self.weights[layer][src * self.dims[layer + 1] + tgt]
    }

    pub fn set_weight(&mut self, layer: usize, src: usize, tgt: usize, v: f64) {
        let cols = self.dims[layer + 1];
        self.weights[layer][src * cols + tgt] = v;
    }

    pub fn masks(&self) -> &[MaskMatrix] {
        &self.masks
    }

    /// Copy of the current mask state.
    pub fn mask_stack(&self, label: impl Into<String>) -> MaskStack {
        MaskStack::new(label, self.masks.clone())
    }

    pub fn total_cells(&self) -> u64 {
        self.masks.iter().map(|m| (m.rows() * m.cols()) as u64).sum()
    }

    pub fn surviving_edges(&self) -> u64 {
        self.masks.iter().map(|m| m.count_ones()).sum()
    }

    pub fn global_sparsity(&self) -> f64 {
        1.0 - self.surviving_edges() as f64 / self.total_cells() as f64
    }

    /// Force every masked-out weight to exactly zero.
    fn enforce_masks(&mut self) {
        for (w, m) in self.weights.iter_mut().zip(&self.masks) {
            let cols = m.cols();
            for r in 0..m.rows() {
                for c in 0..cols {
                    if m.get(r, c) == 0 {
                        w[r * cols + c] = 0.0;
                    }
                }
            }
        }
    }

    /// Forward pass; returns per-layer pre-activations and activations
    /// (activations[0] is the input).
    fn forward(&self, x: &[f64]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let mut pre = Vec::with_capacity(self.weights.len());
        let mut act: Vec<Vec<f64>> = Vec::with_capacity(self.dims.len());
        act.push(x.to_vec());
        for (l, w) in self.weights.iter().enumerate() {
            let (rows, cols) = (self.dims[l], self.dims[l + 1]);
            let input = &act[l];
            let mut z = vec![0.0; cols];
            for r in 0..rows {
                let a = input[r];
                if a == 0.0 {
                    continue;
                }
                let row = &w[r * cols..(r + 1) * cols];
                for (zc, wc) in z.iter_mut().zip(row) {
                    *zc += a * wc;
                }
            }
            let a_next = z.iter().map(|&v| v.atan()).collect();
            pre.push(z);
            act.push(a_next);
        }
        (pre, act)
    }

    /// Prediction for a single input.
    pub fn predict(&self, x: &[f64]) -> Vec<f64> {
        let (_, act) = self.forward(x);
        act.last().unwrap().clone()
    }

    /// Mean squared error over the given sample indices, uniformly averaged
    /// across outputs.
    pub fn mse(&self, data: &Dataset, indices: &[usize]) -> f64 {
        let out_dim = data.output_dim();
        let mut total = 0.0;
        for &i in indices {
            let y = self.predict(data.input(i));
            let t = data.target(i);
            total += y.iter().zip(t).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        }
        total / (indices.len() * out_dim) as f64
    }

    /// MSE and its analytic gradient over the given samples. The gradient
    /// has the layout of `weights`; masked positions get zero gradient.
    pub fn loss_and_gradient(&self, data: &Dataset, indices: &[usize]) -> (f64, Vec<Vec<f64>>) {
        let out_dim = data.output_dim();
        let mut grads: Vec<Vec<f64>> =
            self.weights.iter().map(|w| vec![0.0; w.len()]).collect();
        let mut loss = 0.0;
        let norm = 1.0 / (indices.len() * out_dim) as f64;
        for &i in indices {
            let x = data.input(i);
            let t = data.target(i);
            let (pre, act) = self.forward(x);
            let y = act.last().unwrap();
            loss += y.iter().zip(t).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();

            // d loss / d y, then walk the layers backwards.
            let mut delta: Vec<f64> =
                y.iter().zip(t).map(|(a, b)| 2.0 * norm * (a - b)).collect();
            for l in (0..self.weights.len()).rev() {
                let (rows, cols) = (self.dims[l], self.dims[l + 1]);
                // through the activation: d atan(z) = 1 / (1 + z^2)
                for (d, z) in delta.iter_mut().zip(&pre[l]) {
                    *d /= 1.0 + z * z;
                }
                let input = &act[l];
                let grad = &mut grads[l];
                for r in 0..rows {
                    let a = input[r];
                    if a != 0.0 {
                        let row = &mut grad[r * cols..(r + 1) * cols];
                        for (g, d) in row.iter_mut().zip(&delta) {
                            *g += a * d;
                        }
                    }
                }
                if l > 0 {
                    let w = &self.weights[l];
                    let mut prev = vec![0.0; rows];
                    for (r, p) in prev.iter_mut().enumerate() {
                        let row = &w[r * cols..(r + 1) * cols];
                        *p = row.iter().zip(&delta).map(|(wc, d)| wc * d).sum();
                    }
                    delta = prev;
                }
            }
        }
        // Gradients of masked weights are forced to zero so no update can
        // resurrect a pruned connection.
        for (g, m) in grads.iter_mut().zip(&self.masks) {
            let cols = m.cols();
            for r in 0..m.rows() {
                for c in 0..cols {
                    if m.get(r, c) == 0 {
                        g[r * cols + c] = 0.0;
                    }
                }
            }
        }
        (loss * norm, grads)
    }
}

/// SGD-with-momentum training options.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrainParams {
    pub max_steps: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    /// Validation cadence in steps.
    pub eval_every: usize,
    /// Evaluations without `min_delta` improvement before stopping.
    pub patience: usize,
    pub min_delta: f64,
    /// Trailing fraction of the dataset held out for validation.
    pub val_fraction: f64,
}

impl Default for TrainParams {
    fn default() -> Self {
        Self {
            max_steps: 3000,
            batch_size: 128,
            learning_rate: 0.05,
            momentum: 0.9,
            eval_every: 100,
            patience: 5,
            min_delta: 1e-5,
            val_fraction: 0.2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub steps: usize,
    pub train_mse: f64,
    pub val_mse: f64,
    pub stopped_early: bool,
}

/// Train the network in place. Masked weights stay exactly zero; a
/// non-finite loss aborts with [`TrainError::Diverged`].
pub fn train(
    net: &mut DenseNet,
    data: &Dataset,
    params: &TrainParams,
    seed: u64,
) -> Result<TrainReport, TrainError> {
    let n = data.len();
    let val_len = ((n as f64 * params.val_fraction) as usize).min(n.saturating_sub(1));
    let train_len = n - val_len;
    let train_indices: Vec<usize> = (0..train_len).collect();
    let val_indices: Vec<usize> = (train_len..n).collect();

    let mut rng = derive_rng(seed, rng::DOMAIN_BATCH, 0);
    let mut velocity: Vec<Vec<f64>> = net.weights.iter().map(|w| vec![0.0; w.len()]).collect();
    let mut batch = vec![0usize; params.batch_size.min(train_len)];

    net.enforce_masks();
    let mut best_val = f64::INFINITY;
    let mut stale_evals = 0usize;
    let mut steps_run = 0usize;
    let mut stopped_early = false;

    for step in 0..params.max_steps {
        for slot in batch.iter_mut() {
            *slot = uniform_index(&mut rng, train_len);
        }
        let (loss, grads) = net.loss_and_gradient(data, &batch);
        if !loss.is_finite() {
            return Err(TrainError::Diverged { step, loss });
        }
        for ((w, v), g) in net.weights.iter_mut().zip(&mut velocity).zip(&grads) {
            for ((wi, vi), gi) in w.iter_mut().zip(v.iter_mut()).zip(g) {
                *vi = params.momentum * *vi - params.learning_rate * gi;
                *wi += *vi;
            }
        }
        net.enforce_masks();
        steps_run = step + 1;

        if !val_indices.is_empty() && steps_run % params.eval_every == 0 {
            let val = net.mse(data, &val_indices);
            if !val.is_finite() {
                return Err(TrainError::Diverged { step, loss: val });
            }
            if best_val - val > params.min_delta {
                best_val = val;
                stale_evals = 0;
            } else {
                stale_evals += 1;
                if stale_evals >= params.patience {
                    stopped_early = true;
                    break;
                }
            }
        }
    }

    let train_mse = net.mse(data, &train_indices);
    let val_mse =
        if val_indices.is_empty() { train_mse } else { net.mse(data, &val_indices) };
    Ok(TrainReport { steps: steps_run, train_mse, val_mse, stopped_early })
}

/// Which population of weights each pruning round ranks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PruneScope {
    /// Rank all surviving weights together (default).
    Global,
    /// Rank within each layer, hitting the target fraction per layer.
    PerLayer,
}

/// Mask the smallest-magnitude surviving weights until the sparsity target
/// is met (`floor(target * cells)` masked entries). Ties break by
/// `(layer, row, col)`; masks are monotone. Returns newly masked count.
pub fn prune_step(
    net: &mut DenseNet,
    target_sparsity: f64,
    scope: PruneScope,
) -> Result<u64, TrainError> {
    let current = net.global_sparsity();
    if target_sparsity < current - 1e-12 {
        return Err(TrainError::TargetBelowCurrent { target: target_sparsity, current });
    }
    let newly_masked = match scope {
        PruneScope::Global => {
            let total = net.total_cells();
            let want_masked = (target_sparsity * total as f64).floor() as u64;
            let have_masked = total - net.surviving_edges();
            let quota = want_masked.saturating_sub(have_masked);
            prune_candidates(net, None, quota)
        }
        PruneScope::PerLayer => {
            let mut removed = 0;
            for l in 0..net.masks.len() {
                let cells = (net.masks[l].rows() * net.masks[l].cols()) as u64;
                let want_masked = (target_sparsity * cells as f64).floor() as u64;
                let have_masked = cells - net.masks[l].count_ones();
                let quota = want_masked.saturating_sub(have_masked);
                removed += prune_candidates(net, Some(l), quota);
            }
            removed
        }
    };
    net.enforce_masks();
    Ok(newly_masked)
}

fn prune_candidates(net: &mut DenseNet, layer: Option<usize>, quota: u64) -> u64 {
    if quota == 0 {
        return 0;
    }
    // Candidates are surviving weights; sort is stable on (layer, row, col)
    // order, so equal magnitudes are pruned in lexicographic order.
    let mut candidates: Vec<(f64, usize, usize, usize)> = Vec::new();
    for (l, m) in net.masks.iter().enumerate() {
        if layer.is_some_and(|only| only != l) {
            continue;
        }
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                if m.get(r, c) != 0 {
                    candidates.push((net.weight(l, r, c).abs(), l, r, c));
                }
            }
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
    let take = (quota as usize).min(candidates.len());
    for &(_, l, r, c) in &candidates[..take] {
        net.masks[l].set(r, c, false);
    }
    take as u64
}

/// A ladder of global sparsity targets with retraining between rounds.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PruneSchedule {
    /// Ascending targets in `[0, 1)`.
    pub fractions: Vec<f64>,
    pub retrain_steps: usize,
    pub patience: usize,
    pub min_delta: f64,
}

impl PruneSchedule {
    pub fn validate(&self) -> Result<(), TrainError> {
        if self.fractions.is_empty() {
            return Err(TrainError::BadSchedule("no sparsity levels".into()));
        }
        for pair in self.fractions.windows(2) {
            if pair[1] <= pair[0] {
                return Err(TrainError::BadSchedule(format!(
                    "levels must be strictly ascending, found {} then {}",
                    pair[0], pair[1]
                )));
            }
        }
        if self.fractions.iter().any(|&f| !(0.0..1.0).contains(&f)) {
            return Err(TrainError::BadSchedule("levels must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

impl Default for PruneSchedule {
    fn default() -> Self {
        Self {
            fractions: vec![0.15, 0.30, 0.45, 0.60, 0.75, 0.85, 0.92],
            retrain_steps: 3000,
            patience: 5,
            min_delta: 1e-5,
        }
    }
}

/// Full sweep configuration: population of networks, architecture,
/// schedule, and cleanup applied to emitted snapshots.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepConfig {
    pub dims: Vec<usize>,
    pub population: usize,
    pub schedule: PruneSchedule,
    pub seed: u64,
    pub task: TaskConfig,
    pub train: TrainParams,
    /// Cleanup applied to emitted stacks; `None` emits raw pruned masks.
    pub cleanup: Option<CleanupMode>,
    pub scope: PruneScope,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            dims: vec![10, 32, 32, 16, 7],
            population: 20,
            schedule: PruneSchedule::default(),
            seed: 0,
            task: TaskConfig::default(),
            train: TrainParams::default(),
            cleanup: Some(CleanupMode::Forward),
            scope: PruneScope::Global,
        }
    }
}

/// One emitted mask snapshot.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Snapshot {
    pub network_id: usize,
    pub level_index: usize,
    pub target_sparsity: f64,
    /// Global sparsity straight after pruning, before any cleanup.
    pub pre_cleanup_sparsity: f64,
    pub cleanup_removed: u64,
    /// Global sparsity of the emitted stack.
    pub global_sparsity: f64,
    pub train_mse: f64,
    pub val_mse: f64,
    pub stack: MaskStack,
}

impl Snapshot {
    /// Schedule-level tag used to group snapshots across networks.
    pub fn sparsity_tag(&self) -> String {
        format!("{:.3}", self.target_sparsity)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepFailure {
    pub network_id: usize,
    pub level_index: usize,
    pub message: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepOutcome {
    /// Snapshots ordered by `(network_id, level_index)`.
    pub snapshots: Vec<Snapshot>,
    /// Networks abandoned mid-schedule (training divergence), with the
    /// diagnostic message.
    pub failures: Vec<SweepFailure>,
}

/// Train and prune a population of independently initialized networks,
/// emitting a mask snapshot per (network, level). Networks run in parallel
/// under the `parallel` feature; output order is deterministic either way.
pub fn sweep(config: &SweepConfig) -> Result<SweepOutcome, TrainError> {
    config.schedule.validate()?;
    if config.dims.len() < 2 {
        return Err(TrainError::TooFewLayers { got: config.dims.len() });
    }
    let data = make_task(&config.task);
    let per_network = exec::map_indexed(config.population, |net_id| {
        run_network(config, &data, net_id)
    });
    let mut snapshots = Vec::new();
    let mut failures = Vec::new();
    for (snaps, fail) in per_network {
        snapshots.extend(snaps);
        failures.extend(fail);
    }
    Ok(SweepOutcome { snapshots, failures })
}

fn run_network(
    config: &SweepConfig,
    data: &Dataset,
    net_id: usize,
) -> (Vec<Snapshot>, Option<SweepFailure>) {
    let net_seed = config.seed.wrapping_add(net_id as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut net = match DenseNet::new(&config.dims, net_seed) {
        Ok(net) => net,
        Err(e) => {
            return (
                Vec::new(),
                Some(SweepFailure { network_id: net_id, level_index: 0, message: e.to_string() }),
            )
        }
    };
    let mut params = config.train.clone();
    params.max_steps = config.schedule.retrain_steps;
    params.patience = config.schedule.patience;
    params.min_delta = config.schedule.min_delta;

    let mut snapshots = Vec::new();
    for (level_index, &target) in config.schedule.fractions.iter().enumerate() {
        let train_seed = net_seed ^ (level_index as u64).wrapping_mul(0xE703_7ED1_A0B4_28DB);
        let report = match train(&mut net, data, &params, train_seed) {
            Ok(r) => r,
            Err(e) => {
                return (
                    snapshots,
                    Some(SweepFailure {
                        network_id: net_id,
                        level_index,
                        message: e.to_string(),
                    }),
                )
            }
        };
        if let Err(e) = prune_step(&mut net, target, config.scope) {
            return (
                snapshots,
                Some(SweepFailure { network_id: net_id, level_index, message: e.to_string() }),
            );
        }
        let raw = net.mask_stack(format!("net{net_id:03}"));
        let pre_cleanup_sparsity = net.global_sparsity();
        let (stack, cleanup_removed) = match config.cleanup {
            Some(mode) => match clean_dead(&raw, mode) {
                Ok(pair) => pair,
                Err(e) => {
                    return (
                        snapshots,
                        Some(SweepFailure {
                            network_id: net_id,
                            level_index,
                            message: e.to_string(),
                        }),
                    )
                }
            },
            None => (raw, 0),
        };
        let global_sparsity = sparsity_profile(&stack)
            .map(|p| p.global_sparsity)
            .unwrap_or(pre_cleanup_sparsity);
        snapshots.push(Snapshot {
            network_id: net_id,
            level_index,
            target_sparsity: target,
            pre_cleanup_sparsity,
            cleanup_removed,
            global_sparsity,
            train_mse: report.train_mse,
            val_mse: report.val_mse,
            stack,
        });
    }
    (snapshots, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn datasets_are_deterministic_per_seed() {
        let cfg = TaskConfig { seed: 9, samples: 64, ..TaskConfig::default() };
        let a = make_task(&cfg);
        let b = make_task(&cfg);
        assert_eq!(a.inputs, b.inputs);
        assert_eq!(a.targets, b.targets);
    }

    #[test]
    fn dataset_has_configured_shape() {
        let cfg = TaskConfig { seed: 1, input_dim: 10, output_dim: 7, samples: 100 };
        let data = make_task(&cfg);
        assert_eq!(data.len(), 100);
        assert_eq!(data.input(99).len(), 10);
        assert_eq!(data.target(99).len(), 7);
    }

    #[test]
    fn stored_targets_match_task_function_exactly() {
        let data = make_task(&TaskConfig { seed: 4, samples: 32, ..TaskConfig::default() });
        let mut y = vec![0.0; data.output_dim()];
        for i in 0..data.len() {
            data.task.eval(data.input(i), &mut y);
            assert_eq!(y.as_slice(), data.target(i));
        }
    }

    #[test]
    fn fully_masked_network_does_not_move() {
        let data = make_task(&TaskConfig { seed: 2, samples: 64, ..TaskConfig::default() });
        let mut net = DenseNet::new(&[10, 4, 7], 3).unwrap();
        for m in &mut net.masks {
            *m = MaskMatrix::zeros(m.rows(), m.cols());
        }
        net.enforce_masks();
        let before = net.weights.clone();
        let loss0 = net.mse(&data, &[0, 1, 2, 3]);
        train(&mut net, &data, &TrainParams { max_steps: 50, ..TrainParams::default() }, 0)
            .unwrap();
        assert_eq!(net.weights, before);
        assert_eq!(net.mse(&data, &[0, 1, 2, 3]), loss0);
    }

    #[test]
    fn masked_weights_stay_exactly_zero_through_training() {
        let data = make_task(&TaskConfig { seed: 5, samples: 256, ..TaskConfig::default() });
        let mut net = DenseNet::new(&[10, 8, 7], 11).unwrap();
        prune_step(&mut net, 0.4, PruneScope::Global).unwrap();
        train(&mut net, &data, &TrainParams { max_steps: 200, ..TrainParams::default() }, 1)
            .unwrap();
        for (w, m) in net.weights.iter().zip(&net.masks) {
            for r in 0..m.rows() {
                for c in 0..m.cols() {
                    if m.get(r, c) == 0 {
                        assert_eq!(w[r * m.cols() + c], 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let data = make_task(&TaskConfig {
            seed: 7,
            input_dim: 3,
            output_dim: 2,
            samples: 16,
        });
        let mut net = DenseNet::new(&[3, 4, 2], 13).unwrap();
        prune_step(&mut net, 0.2, PruneScope::Global).unwrap();
        let indices: Vec<usize> = (0..8).collect();
        let (_, grads) = net.loss_and_gradient(&data, &indices);
        let eps = 1e-5;
        for l in 0..net.weights.len() {
            for idx in 0..net.weights[l].len() {
                let cols = net.dims[l + 1];
                let (r, c) = (idx / cols, idx % cols);
                if net.masks[l].get(r, c) == 0 {
                    assert_eq!(grads[l][idx], 0.0);
                    continue;
                }
                let orig = net.weights[l][idx];
                net.weights[l][idx] = orig + eps;
                let plus = net.mse(&data, &indices);
                net.weights[l][idx] = orig - eps;
                let minus = net.mse(&data, &indices);
                net.weights[l][idx] = orig;
                let numeric = (plus - minus) / (2.0 * eps);
                let analytic = grads[l][idx];
                let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8);
                assert!(rel < 1e-4, "layer {l} idx {idx}: analytic {analytic}, numeric {numeric}");
            }
        }
    }

    #[test]
    fn linear_target_trains_below_threshold() {
        // A small-amplitude linear map is representable to high accuracy by
        // an atan net operating in its near-linear regime.
        let cfg = TaskConfig { seed: 3, input_dim: 4, output_dim: 3, samples: 512 };
        let mut data = make_task(&cfg);
        // overwrite targets with a fixed small linear function of inputs
        let coef = [0.11, -0.07, 0.05, 0.09];
        for i in 0..data.len() {
            let x: Vec<f64> = data.input(i).to_vec();
            let base: f64 = x.iter().zip(coef).map(|(v, c)| v * c).sum();
            let row = i * data.output_dim;
            data.targets[row] = base;
            data.targets[row + 1] = -0.5 * base;
            data.targets[row + 2] = 0.25 * base;
        }
        let mut net = DenseNet::new(&[4, 8, 3], 17).unwrap();
        let params = TrainParams {
            max_steps: 4000,
            learning_rate: 0.1,
            eval_every: 200,
            patience: 10,
            min_delta: 1e-7,
            ..TrainParams::default()
        };
        train(&mut net, &data, &params, 2).unwrap();
        let held_out: Vec<usize> = (data.len() - 100..data.len()).collect();
        let mse = net.mse(&data, &held_out);
        assert!(mse < 1e-3, "held-out MSE {mse}");
    }

    #[test]
    fn prune_is_noop_at_current_sparsity() {
        let mut net = DenseNet::new(&[4, 4, 4], 1).unwrap();
        prune_step(&mut net, 0.5, PruneScope::Global).unwrap();
        let masks = net.masks.clone();
        let removed = prune_step(&mut net, 0.5, PruneScope::Global).unwrap();
        assert_eq!(removed, 0);
        assert_eq!(net.masks, masks);
    }

    #[test]
    fn prune_targets_smallest_magnitude() {
        let mut net = DenseNet::new(&[2, 1], 0).unwrap();
        net.set_weight(0, 0, 0, 0.01);
        net.set_weight(0, 1, 0, 0.99);
        prune_step(&mut net, 0.5, PruneScope::Global).unwrap();
        assert_eq!(net.masks[0].get(0, 0), 0);
        assert_eq!(net.masks[0].get(1, 0), 1);
        assert_eq!(net.weight(0, 0, 0), 0.0);
    }

    #[test]
    fn prune_hits_target_within_one_edge() {
        let mut net = DenseNet::new(&[10, 32, 7], 5).unwrap();
        let total = net.total_cells();
        prune_step(&mut net, 0.63, PruneScope::Global).unwrap();
        let masked = total - net.surviving_edges();
        assert_eq!(masked, (0.63 * total as f64).floor() as u64);
    }

    #[test]
    fn prune_below_current_is_an_error() {
        let mut net = DenseNet::new(&[4, 4], 2).unwrap();
        prune_step(&mut net, 0.5, PruneScope::Global).unwrap();
        assert!(matches!(
            prune_step(&mut net, 0.25, PruneScope::Global),
            Err(TrainError::TargetBelowCurrent { .. })
        ));
    }

    #[test]
    fn per_layer_scope_prunes_each_layer_to_target() {
        let mut net = DenseNet::new(&[6, 8, 4], 9).unwrap();
        prune_step(&mut net, 0.5, PruneScope::PerLayer).unwrap();
        for m in net.masks() {
            let cells = (m.rows() * m.cols()) as u64;
            assert_eq!(cells - m.count_ones(), cells / 2);
        }
    }

    #[test]
    fn schedule_validation() {
        let mut s = PruneSchedule::default();
        s.validate().unwrap();
        s.fractions = vec![0.5, 0.5];
        assert!(s.validate().is_err());
        s.fractions = vec![0.5, 0.4];
        assert!(s.validate().is_err());
        s.fractions = vec![1.0];
        assert!(s.validate().is_err());
        // a single do-nothing level is allowed
        s.fractions = vec![0.0];
        s.validate().unwrap();
    }

    fn tiny_sweep_config() -> SweepConfig {
        SweepConfig {
            dims: vec![6, 8, 5],
            population: 2,
            schedule: PruneSchedule {
                fractions: vec![0.5, 0.9],
                retrain_steps: 60,
                patience: 3,
                min_delta: 1e-5,
            },
            seed: 31,
            task: TaskConfig { seed: 31, input_dim: 6, output_dim: 5, samples: 256 },
            train: TrainParams { batch_size: 32, eval_every: 20, ..TrainParams::default() },
            cleanup: None,
            scope: PruneScope::Global,
        }
    }

    #[test]
    fn sweep_emits_population_times_levels_snapshots() {
        let outcome = sweep(&tiny_sweep_config()).unwrap();
        assert!(outcome.failures.is_empty());
        assert_eq!(outcome.snapshots.len(), 4);
        let order: Vec<(usize, usize)> =
            outcome.snapshots.iter().map(|s| (s.network_id, s.level_index)).collect();
        assert_eq!(order, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
    }

    #[test]
    fn sweep_snapshots_hit_targets_before_cleanup() {
        let outcome = sweep(&tiny_sweep_config()).unwrap();
        for snap in &outcome.snapshots {
            let cells = snap.stack.total_cells() as f64;
            let expected = (snap.target_sparsity * cells).floor() / cells;
            assert!(
                (snap.pre_cleanup_sparsity - expected).abs() < 1e-12,
                "level {} sparsity {}",
                snap.target_sparsity,
                snap.pre_cleanup_sparsity
            );
        }
    }

    #[test]
    fn sweep_masks_are_monotone_across_levels() {
        let outcome = sweep(&tiny_sweep_config()).unwrap();
        for net_id in 0..2 {
            let levels: Vec<&Snapshot> =
                outcome.snapshots.iter().filter(|s| s.network_id == net_id).collect();
            for pair in levels.windows(2) {
                let (coarse, fine) = (pair[0], pair[1]);
                for (a, b) in coarse.stack.masks().iter().zip(fine.stack.masks()) {
                    for r in 0..a.rows() {
                        for c in 0..a.cols() {
                            assert!(b.get(r, c) <= a.get(r, c), "edge resurrected");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn sweep_single_zero_level_emits_dense_masks() {
        let mut cfg = tiny_sweep_config();
        cfg.schedule.fractions = vec![0.0];
        cfg.schedule.retrain_steps = 20;
        let outcome = sweep(&cfg).unwrap();
        assert_eq!(outcome.snapshots.len(), 2);
        for snap in &outcome.snapshots {
            assert_eq!(snap.pre_cleanup_sparsity, 0.0);
            for m in snap.stack.masks() {
                assert_eq!(m.count_ones(), (m.rows() * m.cols()) as u64);
            }
        }
    }

    #[test]
    fn sweep_is_deterministic() {
        let a = sweep(&tiny_sweep_config()).unwrap();
        let b = sweep(&tiny_sweep_config()).unwrap();
        assert_eq!(a.snapshots.len(), b.snapshots.len());
        for (x, y) in a.snapshots.iter().zip(&b.snapshots) {
            assert_eq!(x.stack, y.stack);
            assert_eq!(x.train_mse, y.train_mse);
        }
    }
}
