#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use retrokit_neural::{Input, MlpModel};

/// Random small model (at most 64 parameters) with biases pulled away from
/// zero so no hidden unit sits exactly on the ReLU kink.
pub fn random_model(rng: &mut ChaCha8Rng) -> MlpModel {
    let shapes: [&[usize]; 4] = [&[4, 3, 1], &[6, 5, 4, 1], &[8, 6, 1], &[3, 4, 3, 1]];
    let dims = shapes[rng.gen_range(0..shapes.len())];
    let mut model = MlpModel::glorot(dims, 0.0, rng.gen()).unwrap();
    for k in 0..model.parameter_count() {
        let v = model.parameter(k);
        model.set_parameter(k, v * 1.5 + rng.gen_range(-0.3..0.3));
    }
    assert!(model.parameter_count() <= 64);
    model
}

/// Smallest |z| over hidden units. Central differences are meaningless when
/// a step of 1e-4 can push a unit across the ReLU kink.
pub fn kink_margin(model: &MlpModel, x: &Input) -> f64 {
    let mut a = x.to_dense();
    let mut margin = f64::INFINITY;
    let hidden = model.layers().len() - 1;
    for layer in &model.layers()[..hidden] {
        let z = layer.pre_activation(&a);
        margin = z.iter().fold(margin, |m, v| m.min(v.abs()));
        a = z.iter().map(|&v| layer.activation.apply(v)).collect();
    }
    margin
}

pub fn random_input(rng: &mut ChaCha8Rng, model: &MlpModel) -> Input {
    loop {
        let x = any_input(rng, model.input_dim());
        if kink_margin(model, &x) > 1e-3 {
            return x;
        }
    }
}

pub fn any_input(rng: &mut ChaCha8Rng, dim: usize) -> Input {
    if rng.gen_bool(0.5) {
        Input::Dense((0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
    } else {
        let active = (0..dim as u32).filter(|_| rng.gen_bool(0.5)).collect();
        Input::Binary { dim, active }
    }
}
