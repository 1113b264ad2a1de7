use super::{Fingerprint, FingerprintError};

/// |A∩B| / |A∪B|. Two all-zero vectors score 0.
pub fn tanimoto(a: &Fingerprint, b: &Fingerprint) -> Result<f64, FingerprintError> {
    let common = a.intersection_count(b)? as f64;
    let union = (a.count_ones() + b.count_ones()) as f64 - common;
    Ok(if union == 0.0 { 0.0 } else { common / union })
}

/// |A∩B| / (|A∩B| + α|A−B| + β|B−A|). A zero denominator scores 0.
pub fn tversky(a: &Fingerprint, b: &Fingerprint, alpha: f64, beta: f64) -> Result<f64, FingerprintError> {
    if !(alpha >= 0.0 && beta >= 0.0) {
        return Err(FingerprintError::NegativeParameter { alpha, beta });
    }
    let common = a.intersection_count(b)? as f64;
    let only_a = a.count_ones() as f64 - common;
    let only_b = b.count_ones() as f64 - common;
    let denominator = common + alpha * only_a + beta * only_b;
    Ok(if denominator == 0.0 { 0.0 } else { common / denominator })
}
