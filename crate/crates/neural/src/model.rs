use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::layer::{Activation, DenseLayer};
use crate::NeuralError;

/// Network input: a dense vector or the set bits of a binary vector.
#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    Dense(Vec<f32>),
    Binary { dim: usize, active: Vec<u32> },
}

impl Input {
    pub fn dim(&self) -> usize {
        match self {
            Input::Dense(v) => v.len(),
            Input::Binary { dim, .. } => *dim,
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        match self {
            Input::Dense(v) => v.iter().map(|&x| f64::from(x)).collect(),
            Input::Binary { dim, active } => {
                let mut out = vec![0.0; *dim];
                for &i in active {
                    out[i as usize] = 1.0;
                }
                out
            }
        }
    }
}

/// Inference is deterministic; training applies inverted dropout drawn from
/// the given generator.
pub enum Mode<'a> {
    Infer,
    Train(&'a mut dyn RngCore),
}

/// The two ranking networks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Architecture {
    Nn1pr,
    Nn2pr,
}

impl Architecture {
    pub const DROPOUT: f32 = 0.2;

    pub fn name(self) -> &'static str {
        match self {
            Architecture::Nn1pr => "nn1pr",
            Architecture::Nn2pr => "nn2pr",
        }
    }

    pub fn from_name(name: &str) -> Option<Architecture> {
        match name.to_ascii_lowercase().as_str() {
            "nn1pr" => Some(Architecture::Nn1pr),
            "nn2pr" => Some(Architecture::Nn2pr),
            _ => None,
        }
    }

    /// Layer widths from input to output.
    pub fn dims(self) -> &'static [usize] {
        match self {
            Architecture::Nn1pr => &[1024, 256, 1],
            Architecture::Nn2pr => &[1536, 512, 128, 1],
        }
    }

    pub fn input_dim(self) -> usize {
        self.dims()[0]
    }

    /// Seeded Glorot-initialized network.
    pub fn build(self, seed: u64) -> MlpModel {
        MlpModel::glorot(self.dims(), Self::DROPOUT, seed).expect("predefined architecture is valid")
    }
}

/// Stack of dense layers ending in one sigmoid unit.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    layers: Vec<DenseLayer>,
}

/// Smallest distance kept between a score and 0 or 1.
const SCORE_MARGIN: f64 = 1e-12;

pub(crate) struct Trace {
    /// Input to each layer.
    pub inputs: Vec<Vec<f64>>,
    pub pre: Vec<Vec<f64>>,
    /// Dropout multipliers applied to each layer's output.
    pub masks: Vec<Option<Vec<f64>>>,
    pub output: f64,
}

impl MlpModel {
    pub fn new(layers: Vec<DenseLayer>) -> Result<Self, NeuralError> {
        let last = layers.last().ok_or(NeuralError::NoLayers)?;
        if last.out_dim != 1 || last.activation != Activation::Sigmoid {
            return Err(NeuralError::BadOutputLayer);
        }
        for (k, pair) in layers.windows(2).enumerate() {
            if pair[1].in_dim != pair[0].out_dim {
                return Err(NeuralError::BrokenChain {
                    layer: k + 1,
                    expected: pair[1].in_dim,
                    actual: pair[0].out_dim,
                });
            }
        }
        for layer in &layers {
            if !(0.0..1.0).contains(&layer.dropout) {
                return Err(NeuralError::BadDropout(layer.dropout));
            }
            assert_eq!(layer.weights.len(), layer.in_dim * layer.out_dim);
            assert_eq!(layer.biases.len(), layer.out_dim);
        }
        Ok(MlpModel { layers })
    }

    /// ReLU hidden layers with `dropout`, sigmoid output; Glorot weights
    /// from a ChaCha8 stream seeded with `seed`.
    pub fn glorot(dims: &[usize], dropout: f32, seed: u64) -> Result<Self, NeuralError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::with_layers(dims, dropout, |i, o, a, d| DenseLayer::glorot(i, o, a, d, &mut rng))
    }

    /// Same shape as [`MlpModel::glorot`] with every parameter zero.
    pub fn zeros(dims: &[usize], dropout: f32) -> Result<Self, NeuralError> {
        Self::with_layers(dims, dropout, DenseLayer::zeros)
    }

    fn with_layers(
        dims: &[usize],
        dropout: f32,
        mut make: impl FnMut(usize, usize, Activation, f32) -> DenseLayer,
    ) -> Result<Self, NeuralError> {
        if dims.len() < 2 {
            return Err(NeuralError::NoLayers);
        }
        let last = dims.len() - 2;
        let layers = dims
            .windows(2)
            .enumerate()
            .map(|(k, w)| {
                if k == last {
                    make(w[0], w[1], Activation::Sigmoid, 0.0)
                } else {
                    make(w[0], w[1], Activation::Relu, dropout)
                }
            })
            .collect();
        MlpModel::new(layers)
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim
    }

    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(DenseLayer::parameter_count).sum()
    }

    /// Flat parameter order: per layer, weights then biases.
    pub fn parameter(&self, k: usize) -> f32 {
        let (l, i, is_bias) = self.locate(k);
        if is_bias {
            self.layers[l].biases[i]
        } else {
            self.layers[l].weights[i]
        }
    }

    pub fn set_parameter(&mut self, k: usize, value: f32) {
        let (l, i, is_bias) = self.locate(k);
        if is_bias {
            self.layers[l].biases[i] = value;
        } else {
            self.layers[l].weights[i] = value;
        }
    }

    fn locate(&self, mut k: usize) -> (usize, usize, bool) {
        for (l, layer) in self.layers.iter().enumerate() {
            if k < layer.weights.len() {
                return (l, k, false);
            }
            k -= layer.weights.len();
            if k < layer.biases.len() {
                return (l, k, true);
            }
            k -= layer.biases.len();
        }
        panic!("parameter index out of range");
    }

    pub(crate) fn layers_mut(&mut self) -> &mut [DenseLayer] {
        &mut self.layers
    }

    fn check_input(&self, input: &Input) -> Result<(), NeuralError> {
        if input.dim() != self.input_dim() {
            return Err(NeuralError::DimensionMismatch { expected: self.input_dim(), actual: input.dim() });
        }
        if let Input::Binary { dim, active } = input {
            if active.iter().any(|&i| i as usize >= *dim) {
                return Err(NeuralError::DimensionMismatch {
                    expected: *dim,
                    actual: active.iter().map(|&i| i as usize + 1).max().unwrap_or(0),
                });
            }
        }
        Ok(())
    }

    /// Probability in (0, 1) that the input is a positive example.
    pub fn forward(&self, input: &Input, mode: Mode<'_>) -> Result<f64, NeuralError> {
        self.check_input(input)?;
        let rng = match mode {
            Mode::Infer => None,
            Mode::Train(rng) => Some(rng),
        };
        Ok(self.trace(input.to_dense(), rng).output)
    }

    pub fn score(&self, input: &Input) -> Result<f64, NeuralError> {
        self.forward(input, Mode::Infer)
    }

    /// Inference over many inputs in parallel; order follows `inputs`.
    pub fn score_batch(&self, inputs: &[Input]) -> Result<Vec<f64>, NeuralError> {
        inputs.par_iter().map(|x| self.score(x)).collect()
    }

    pub(crate) fn trace(&self, x: Vec<f64>, mut rng: Option<&mut dyn RngCore>) -> Trace {
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut masks = Vec::with_capacity(self.layers.len());
        let mut current = x;
        for layer in &self.layers {
            let z = layer.pre_activation(&current);
            let mut a: Vec<f64> = z.iter().map(|&v| layer.activation.apply(v)).collect();
            let mask = match rng.as_deref_mut() {
                Some(r) if layer.dropout > 0.0 => {
                    let keep = 1.0 - f64::from(layer.dropout);
                    let m: Vec<f64> =
                        (0..a.len()).map(|_| if r.gen::<f64>() < keep { 1.0 / keep } else { 0.0 }).collect();
                    for (ai, mi) in a.iter_mut().zip(&m) {
                        *ai *= mi;
                    }
                    Some(m)
                }
                _ => None,
            };
            inputs.push(std::mem::replace(&mut current, a));
            pre.push(z);
            masks.push(mask);
        }
        let output = current[0].clamp(SCORE_MARGIN, 1.0 - SCORE_MARGIN);
        Trace { inputs, pre, masks, output }
    }

    /// dL/dz for every layer, given dL/dz of the output unit.
    pub(crate) fn deltas(&self, trace: &Trace, output_delta: f64) -> Vec<Vec<f64>> {
        let n = self.layers.len();
        let mut deltas: Vec<Vec<f64>> = vec![Vec::new(); n];
        deltas[n - 1] = vec![output_delta];
        for l in (1..n).rev() {
            let layer = &self.layers[l];
            let below = &self.layers[l - 1];
            let delta = &deltas[l];
            let mut back: Vec<f64> = (0..layer.in_dim)
                .map(|i| {
                    let row = &layer.weights[i * layer.out_dim..(i + 1) * layer.out_dim];
                    row.iter().zip(delta).map(|(&w, &d)| f64::from(w) * d).sum::<f64>()
                })
                .collect();
            for (i, b) in back.iter_mut().enumerate() {
                *b *= below.activation.derivative(trace.pre[l - 1][i]);
                if let Some(mask) = &trace.masks[l - 1] {
                    *b *= mask[i];
                }
            }
            deltas[l - 1] = back;
        }
        deltas
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn architecture_parameter_counts() {
        assert_eq!(Architecture::Nn1pr.build(0).parameter_count(), 262_657);
        assert_eq!(Architecture::Nn2pr.build(0).parameter_count(), 852_737);
    }

    #[test]
    fn zero_network_scores_one_half() {
        let model = MlpModel::zeros(&[8, 4, 1], 0.2).unwrap();
        let x = Input::Dense(vec![1.0, -2.0, 3.0, 0.5, 0.0, 0.0, 9.0, 1.0]);
        assert_eq!(model.score(&x).unwrap(), 0.5);
    }

    #[test]
    fn hand_built_sigmoid_unit() {
        let mut layer = DenseLayer::zeros(2, 1, Activation::Sigmoid, 0.0);
        layer.weights = vec![1.0, 1.0];
        let model = MlpModel::new(vec![layer]).unwrap();
        let p = model.score(&Input::Dense(vec![1.0, 0.0])).unwrap();
        assert!((p - 1.0 / (1.0 + (-1.0f64).exp())).abs() < 1e-12);
        assert!((p - 0.73106).abs() < 1e-5);
    }

    #[test]
    fn inference_is_repeatable_and_checks_width() {
        let model = Architecture::Nn1pr.build(3);
        let x = Input::Binary { dim: 1024, active: vec![1, 77, 600, 1023] };
        assert_eq!(model.score(&x).unwrap().to_bits(), model.score(&x).unwrap().to_bits());
        assert_eq!(
            model.score(&Input::Dense(vec![0.0; 10])),
            Err(NeuralError::DimensionMismatch { expected: 1024, actual: 10 })
        );
        assert!(model.score(&Input::Binary { dim: 1024, active: vec![1024] }).is_err());
    }

    #[test]
    fn dropout_changes_training_passes_only() {
        let model = MlpModel::glorot(&[16, 32, 1], 0.5, 9).unwrap();
        let x = Input::Dense(vec![1.0; 16]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = model.forward(&x, Mode::Train(&mut rng)).unwrap();
        let b = model.forward(&x, Mode::Train(&mut rng)).unwrap();
        assert_ne!(a, b);
        assert_eq!(model.score(&x).unwrap(), model.score(&x).unwrap());
    }

    #[test]
    fn invalid_stacks_are_rejected() {
        let hidden = DenseLayer::zeros(4, 3, Activation::Relu, 0.0);
        let out = DenseLayer::zeros(2, 1, Activation::Sigmoid, 0.0);
        assert!(matches!(MlpModel::new(vec![hidden.clone(), out]), Err(NeuralError::BrokenChain { .. })));
        assert_eq!(MlpModel::new(vec![hidden]), Err(NeuralError::BadOutputLayer));
        assert_eq!(MlpModel::new(vec![]), Err(NeuralError::NoLayers));
    }

    #[test]
    fn flat_parameter_access() {
        let mut model = MlpModel::zeros(&[2, 2, 1], 0.0).unwrap();
        assert_eq!(model.parameter_count(), 9);
        model.set_parameter(5, 1.5);
        assert_eq!(model.layers()[0].biases[1], 1.5);
        model.set_parameter(8, -2.0);
        assert_eq!(model.layers()[1].biases[0], -2.0);
        assert_eq!(model.parameter(8), -2.0);
    }
}
