use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Activation {
    Relu,
    Sigmoid,
    Identity,
}

impl Activation {
    /// Code used in weight files.
    pub fn code(self) -> u8 {
        match self {
            Activation::Relu => 0,
            Activation::Sigmoid => 1,
            Activation::Identity => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Activation> {
        match code {
            0 => Some(Activation::Relu),
            1 => Some(Activation::Sigmoid),
            2 => Some(Activation::Identity),
            _ => None,
        }
    }

    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Sigmoid => sigmoid(z),
            Activation::Identity => z,
        }
    }

    /// Derivative expressed through the pre-activation.
    pub fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => {
                let s = sigmoid(z);
                s * (1.0 - s)
            }
            Activation::Identity => 1.0,
        }
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `y = act(Wᵀx + b)` with `W` stored row-major as `in_dim × out_dim`
/// (`weights[i * out_dim + j]` connects input `i` to output `j`). Dropout
/// applies to this layer's output during training.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    pub in_dim: usize,
    pub out_dim: usize,
    pub weights: Vec<f32>,
    pub biases: Vec<f32>,
    pub activation: Activation,
    pub dropout: f32,
}

impl DenseLayer {
    pub fn zeros(in_dim: usize, out_dim: usize, activation: Activation, dropout: f32) -> Self {
        DenseLayer {
            in_dim,
            out_dim,
            weights: vec![0.0; in_dim * out_dim],
            biases: vec![0.0; out_dim],
            activation,
            dropout,
        }
    }

    /// Glorot-uniform weights in `±sqrt(6 / (in + out))`, zero biases.
    pub fn glorot<R: Rng>(in_dim: usize, out_dim: usize, activation: Activation, dropout: f32, rng: &mut R) -> Self {
        let limit = (6.0 / (in_dim + out_dim) as f64).sqrt() as f32;
        let mut layer = DenseLayer::zeros(in_dim, out_dim, activation, dropout);
        for w in &mut layer.weights {
            *w = rng.gen_range(-limit..=limit);
        }
        layer
    }

    pub fn parameter_count(&self) -> usize {
        self.in_dim * self.out_dim + self.out_dim
    }

    /// Pre-activations for `x`; zero inputs are skipped, which makes binary
    /// fingerprint input cheap.
    pub fn pre_activation(&self, x: &[f64]) -> Vec<f64> {
        let mut z: Vec<f64> = self.biases.iter().map(|&b| f64::from(b)).collect();
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            let row = &self.weights[i * self.out_dim..(i + 1) * self.out_dim];
            for (zj, &w) in z.iter_mut().zip(row) {
                *zj += xi * f64::from(w);
            }
        }
        z
    }
}
