/// Predictions are clamped to `[ε, 1 − ε]` before taking logarithms.
pub const PROBABILITY_EPSILON: f64 = 1e-7;

/// Weighted binary cross-entropy `−w·(y ln p + (1 − y) ln(1 − p))`.
pub fn bce_loss(prediction: f64, label: bool, weight: f64) -> f64 {
    let p = prediction.clamp(PROBABILITY_EPSILON, 1.0 - PROBABILITY_EPSILON);
    if label {
        -weight * p.ln()
    } else {
        -weight * (1.0 - p).ln()
    }
}
