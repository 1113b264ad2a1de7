use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use retrokit_neural::{
    decode_weights, encode_weights, train, Architecture, ClassWeighting, Example, Input, MlpModel, TrainConfig,
    WeightFileError,
};

fn binary_input(rng: &mut ChaCha8Rng, dim: usize, density: f64) -> Input {
    Input::Binary { dim, active: (0..dim as u32).filter(|_| rng.gen_bool(density)).collect() }
}

#[test]
fn nn1pr_round_trip_scores_identically() {
    let model = Architecture::Nn1pr.build(17);
    let restored = decode_weights(&encode_weights(&model)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let x = binary_input(&mut rng, 1024, 0.05);
        assert_eq!(model.score(&x).unwrap().to_bits(), restored.score(&x).unwrap().to_bits());
    }
}

#[test]
fn truncated_final_layer_is_detected() {
    let bytes = encode_weights(&Architecture::Nn1pr.build(1));
    let err = decode_weights(&bytes[..bytes.len() - 100]).unwrap_err();
    assert!(matches!(err, WeightFileError::TruncatedFile));
}

fn toy_examples(seed: u64) -> Vec<Example> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..120)
        .map(|i| {
            let label = i % 4 == 0;
            let mut active: Vec<u32> = (0..24).filter(|_| rng.gen_bool(0.2)).collect();
            if label {
                active.push(30);
            }
            Example { input: Input::Binary { dim: 32, active }, label, weight: 1.0 }
        })
        .collect()
}

#[test]
fn training_is_independent_of_thread_count() {
    let data = toy_examples(2);
    let model = MlpModel::glorot(&[32, 16, 8, 1], 0.2, 9).unwrap();
    let config = TrainConfig {
        epochs: 4,
        batch_size: 16,
        seed: 77,
        class_weighting: ClassWeighting::Balanced,
        ..TrainConfig::default()
    };
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| train(&model, &data, &config).unwrap())
    };
    let (one, h1) = run(1);
    let (four, h4) = run(4);
    assert_eq!(encode_weights(&one), encode_weights(&four));
    assert_eq!(h1, h4);
}

#[test]
fn positive_weight_changes_training() {
    let data = toy_examples(3);
    let model = MlpModel::glorot(&[32, 8, 1], 0.0, 1).unwrap();
    let base = TrainConfig { epochs: 2, seed: 1, ..TrainConfig::default() };
    let plain = train(&model, &data, &base).unwrap().0;
    let weighted =
        train(&model, &data, &TrainConfig { class_weighting: ClassWeighting::PositiveWeight(3.0), ..base }).unwrap().0;
    assert_ne!(plain, weighted);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn scores_stay_strictly_inside_the_unit_interval(seed in any::<u64>(), scale in 0.1f32..200.0) {
        let mut model = MlpModel::glorot(&[8, 6, 1], 0.2, seed).unwrap();
        for k in 0..model.parameter_count() {
            let v = model.parameter(k);
            model.set_parameter(k, v * scale);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = Input::Dense((0..8).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let s = model.score(&x).unwrap();
        prop_assert!(s > 0.0 && s < 1.0);
    }

    #[test]
    fn round_trip_holds_for_random_small_models(seed in any::<u64>(), hidden in 1usize..12) {
        let model = MlpModel::glorot(&[5, hidden, 1], 0.2, seed).unwrap();
        prop_assert_eq!(decode_weights(&encode_weights(&model)).unwrap(), model);
    }
}
