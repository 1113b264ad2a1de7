use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::loss::bce_loss;
use crate::model::{Input, MlpModel, Trace};
use crate::NeuralError;

/// How positives are weighted against negatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassWeighting {
    None,
    /// Multiply every positive example's weight by this factor.
    PositiveWeight(f64),
    /// Positive weight = negatives / positives in the (subsampled) data.
    Balanced,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub seed: u64,
    pub class_weighting: ClassWeighting,
    /// Keep only this fraction of negatives, chosen by a seeded shuffle.
    pub negative_fraction: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.001,
            batch_size: 128,
            epochs: 30,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_epsilon: 1e-8,
            seed: 0,
            class_weighting: ClassWeighting::None,
            negative_fraction: None,
        }
    }
}

impl TrainConfig {
    // negated comparisons so NaN fails every check
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    fn validate(&self) -> Result<(), NeuralError> {
        let bad = |m: &str| Err(NeuralError::InvalidConfig(m.to_string()));
        if !(self.learning_rate > 0.0) {
            return bad("learning rate must be positive");
        }
        if self.batch_size == 0 {
            return bad("batch size must be at least 1");
        }
        if !(0.0..1.0).contains(&self.adam_beta1) || !(0.0..1.0).contains(&self.adam_beta2) {
            return bad("Adam betas must lie in [0, 1)");
        }
        if !(self.adam_epsilon > 0.0) {
            return bad("Adam epsilon must be positive");
        }
        if let Some(f) = self.negative_fraction {
            if !(f > 0.0 && f <= 1.0) {
                return bad("negative fraction must lie in (0, 1]");
            }
        }
        if let ClassWeighting::PositiveWeight(w) = self.class_weighting {
            if !(w > 0.0) {
                return bad("positive weight must be positive");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub input: Input,
    pub label: bool,
    pub weight: f64,
}

/// Mean weighted loss and accuracy over one epoch's training passes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub loss: f64,
    pub accuracy: f64,
}

struct Adam {
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
    step: i32,
}

/// Trains a copy of `model` with mini-batch Adam on weighted binary
/// cross-entropy.
///
/// Every random choice (negative subsampling, epoch shuffles, dropout masks)
/// derives from `config.seed`, and gradients are reduced in example order,
/// so the result does not depend on the number of worker threads.
pub fn train(
    model: &MlpModel,
    data: &[Example],
    config: &TrainConfig,
) -> Result<(MlpModel, Vec<EpochStats>), NeuralError> {
    config.validate()?;
    if data.is_empty() {
        return Err(NeuralError::EmptyDataset);
    }
    for ex in data {
        if ex.input.dim() != model.input_dim() {
            return Err(NeuralError::DimensionMismatch { expected: model.input_dim(), actual: ex.input.dim() });
        }
    }
    let selected = select_examples(data, config);
    let positives = selected.iter().filter(|&&i| data[i].label).count();
    let negatives = selected.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(NeuralError::SingleClassDataset);
    }
    let positive_factor = match config.class_weighting {
        ClassWeighting::None => 1.0,
        ClassWeighting::PositiveWeight(w) => w,
        ClassWeighting::Balanced => negatives as f64 / positives as f64,
    };

    let mut model = model.clone();
    let mut history = Vec::with_capacity(config.epochs);
    let mut adam = Adam { m: param_buffers(&model), v: param_buffers(&model), step: 0 };
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order = selected;
    for epoch in 0..config.epochs {
        order.shuffle(&mut shuffle_rng);
        let mut loss_sum = 0.0;
        let mut correct = 0usize;
        for batch in order.chunks(config.batch_size) {
            let records: Vec<(Trace, Vec<Vec<f64>>, f64, bool)> = batch
                .par_iter()
                .map(|&idx| {
                    let ex = &data[idx];
                    let mut rng = ChaCha8Rng::seed_from_u64(example_seed(config.seed, epoch, idx));
                    let trace = model.trace(ex.input.to_dense(), Some(&mut rng));
                    let weight = ex.weight * if ex.label { positive_factor } else { 1.0 };
                    let p = trace.output;
                    let y = if ex.label { 1.0 } else { 0.0 };
                    let deltas = model.deltas(&trace, weight * (p - y) / batch.len() as f64);
                    let hit = (p >= 0.5) == ex.label;
                    (trace, deltas, bce_loss(p, ex.label, weight), hit)
                })
                .collect();
            for r in &records {
                loss_sum += r.2;
                correct += usize::from(r.3);
            }
            let grads = gradients(&model, &records);
            adam_step(&mut model, &mut adam, &grads, config);
        }
        history.push(EpochStats {
            epoch: epoch + 1,
            loss: loss_sum / order.len() as f64,
            accuracy: correct as f64 / order.len() as f64,
        });
    }
    Ok((model, history))
}

fn select_examples(data: &[Example], config: &TrainConfig) -> Vec<usize> {
    let mut positives: Vec<usize> = (0..data.len()).filter(|&i| data[i].label).collect();
    let mut negatives: Vec<usize> = (0..data.len()).filter(|&i| !data[i].label).collect();
    if let Some(fraction) = config.negative_fraction {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x6e65_6761_7469_7665);
        negatives.shuffle(&mut rng);
        let keep = ((negatives.len() as f64 * fraction).ceil() as usize).min(negatives.len());
        negatives.truncate(keep);
        negatives.sort_unstable();
    }
    positives.append(&mut negatives);
    positives.sort_unstable();
    positives
}

fn example_seed(seed: u64, epoch: usize, index: usize) -> u64 {
    let stream = (epoch as u64).wrapping_mul(0x0001_0000_0001).wrapping_add(index as u64 + 1);
    seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// Per layer: weights followed by biases, matching `MlpModel::parameter`.
fn param_buffers(model: &MlpModel) -> Vec<Vec<f64>> {
    model.layers().iter().flat_map(|l| [vec![0.0; l.weights.len()], vec![0.0; l.biases.len()]]).collect()
}

/// Batch gradients, reduced in record order. Weight rows are independent and
/// computed in parallel.
pub(crate) fn gradients(model: &MlpModel, records: &[(Trace, Vec<Vec<f64>>, f64, bool)]) -> Vec<Vec<f64>> {
    let mut out = param_buffers(model);
    for (l, layer) in model.layers().iter().enumerate() {
        let out_dim = layer.out_dim;
        out[2 * l].par_chunks_mut(out_dim).enumerate().for_each(|(i, row)| {
            for (trace, deltas, _, _) in records {
                let a = trace.inputs[l][i];
                if a == 0.0 {
                    continue;
                }
                for (g, &d) in row.iter_mut().zip(&deltas[l]) {
                    *g += a * d;
                }
            }
        });
        let bias = &mut out[2 * l + 1];
        for (_, deltas, _, _) in records {
            for (g, &d) in bias.iter_mut().zip(&deltas[l]) {
                *g += d;
            }
        }
    }
    out
}

fn adam_step(model: &mut MlpModel, adam: &mut Adam, grads: &[Vec<f64>], config: &TrainConfig) {
    adam.step += 1;
    let (b1, b2) = (config.adam_beta1, config.adam_beta2);
    let c1 = 1.0 - b1.powi(adam.step);
    let c2 = 1.0 - b2.powi(adam.step);
    let (lr, eps) = (config.learning_rate, config.adam_epsilon);
    for (l, layer) in model.layers_mut().iter_mut().enumerate() {
        let params: [&mut Vec<f32>; 2] = [&mut layer.weights, &mut layer.biases];
        for (k, p) in params.into_iter().enumerate() {
            let slot = 2 * l + k;
            p.par_iter_mut()
                .zip(adam.m[slot].par_iter_mut())
                .zip(adam.v[slot].par_iter_mut())
                .zip(grads[slot].par_iter())
                .for_each(|(((w, m), v), &g)| {
                    *m = b1 * *m + (1.0 - b1) * g;
                    *v = b2 * *v + (1.0 - b2) * g * g;
                    let update = lr * (*m / c1) / ((*v / c2).sqrt() + eps);
                    *w = (f64::from(*w) - update) as f32;
                });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn separable(n: usize, seed: u64) -> Vec<Example> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let x: f32 = rng.gen_range(-1.0..1.0);
                let y: f32 = rng.gen_range(-1.0..1.0);
                Example { input: Input::Dense(vec![x, y]), label: x + 0.5 * y > 0.1, weight: 1.0 }
            })
            .collect()
    }

    #[test]
    fn learns_a_separable_set() {
        let data = separable(400, 1);
        let model = MlpModel::glorot(&[2, 16, 1], 0.0, 5).unwrap();
        let config =
            TrainConfig { learning_rate: 0.01, batch_size: 32, epochs: 200, seed: 3, ..TrainConfig::default() };
        let (trained, history) = train(&model, &data, &config).unwrap();
        assert_eq!(history.len(), 200);
        let correct = data.iter().filter(|ex| (trained.score(&ex.input).unwrap() >= 0.5) == ex.label).count();
        assert!(correct as f64 / data.len() as f64 >= 0.99, "{correct}");
        assert!(history.last().unwrap().loss < history[0].loss);
    }

    #[test]
    fn zero_epochs_is_a_no_op() {
        let data = separable(20, 2);
        let model = MlpModel::glorot(&[2, 4, 1], 0.2, 5).unwrap();
        let config = TrainConfig { epochs: 0, ..TrainConfig::default() };
        let (trained, history) = train(&model, &data, &config).unwrap();
        assert_eq!(trained, model);
        assert!(history.is_empty());
    }

    #[test]
    fn same_seed_same_weights() {
        let data = separable(100, 4);
        let model = MlpModel::glorot(&[2, 8, 1], 0.2, 5).unwrap();
        let config = TrainConfig { epochs: 5, batch_size: 16, seed: 11, ..TrainConfig::default() };
        let a = train(&model, &data, &config).unwrap();
        let b = train(&model, &data, &config).unwrap();
        assert_eq!(a, b);
        let other = train(&model, &data, &TrainConfig { seed: 12, ..config }).unwrap();
        assert_ne!(a.0, other.0);
    }

    #[test]
    fn rejects_degenerate_data() {
        let model = MlpModel::glorot(&[2, 4, 1], 0.0, 5).unwrap();
        let config = TrainConfig::default();
        assert_eq!(train(&model, &[], &config).unwrap_err(), NeuralError::EmptyDataset);
        let one_class: Vec<Example> = separable(50, 1).into_iter().filter(|e| e.label).collect();
        assert_eq!(train(&model, &one_class, &config).unwrap_err(), NeuralError::SingleClassDataset);
        let bad = TrainConfig { batch_size: 0, ..TrainConfig::default() };
        assert!(matches!(train(&model, &separable(10, 1), &bad), Err(NeuralError::InvalidConfig(_))));
        let wide = vec![Example { input: Input::Dense(vec![0.0; 3]), label: true, weight: 1.0 }];
        assert!(matches!(train(&model, &wide, &config), Err(NeuralError::DimensionMismatch { .. })));
    }

    #[test]
    fn negative_subsampling_keeps_a_prefix_fraction() {
        let data = separable(200, 7);
        let negatives = data.iter().filter(|e| !e.label).count();
        let config = TrainConfig { negative_fraction: Some(0.3), ..TrainConfig::default() };
        let kept = select_examples(&data, &config);
        let kept_neg = kept.iter().filter(|&&i| !data[i].label).count();
        assert_eq!(kept_neg, (negatives as f64 * 0.3).ceil() as usize);
        assert_eq!(select_examples(&data, &config), kept);
    }
}
