use crate::loss::bce_loss;
use crate::model::{Input, MlpModel, Mode};
use crate::NeuralError;

/// Central-difference step applied to one `f32` parameter.
const STEP: f32 = 1e-4;
/// Relative errors are measured against at least this magnitude.
const FLOOR: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientReport {
    pub checked: usize,
    pub max_relative_error: f64,
    pub worst_parameter: usize,
}

/// Backpropagated dL/dθ for one example in inference mode, in the flat
/// parameter order of [`MlpModel::parameter`].
pub fn analytic_gradient(model: &MlpModel, input: &Input, label: bool, weight: f64) -> Vec<f64> {
    let trace = model.trace(input.to_dense(), None);
    let y = if label { 1.0 } else { 0.0 };
    let deltas = model.deltas(&trace, weight * (trace.output - y));
    let mut out = Vec::with_capacity(model.parameter_count());
    for (l, layer) in model.layers().iter().enumerate() {
        for i in 0..layer.in_dim {
            let a = trace.inputs[l][i];
            out.extend(deltas[l].iter().map(|&d| a * d));
        }
        out.extend_from_slice(&deltas[l]);
    }
    out
}

/// Compares backpropagation against central differences on every parameter.
pub fn gradient_check(
    model: &MlpModel,
    input: &Input,
    label: bool,
    tolerance: f64,
) -> Result<GradientReport, NeuralError> {
    let all: Vec<usize> = (0..model.parameter_count()).collect();
    gradient_check_with(model, input, label, &all, tolerance, |m, x, y| analytic_gradient(m, x, y, 1.0))
}

/// Same as [`gradient_check`] for a chosen parameter subset and an arbitrary
/// analytic gradient. Fails on the first parameter whose relative error
/// exceeds `tolerance`.
pub fn gradient_check_with<F>(
    model: &MlpModel,
    input: &Input,
    label: bool,
    parameters: &[usize],
    tolerance: f64,
    analytic: F,
) -> Result<GradientReport, NeuralError>
where
    F: Fn(&MlpModel, &Input, bool) -> Vec<f64>,
{
    if input.dim() != model.input_dim() {
        return Err(NeuralError::DimensionMismatch { expected: model.input_dim(), actual: input.dim() });
    }
    let grad = analytic(model, input, label);
    let mut probe = model.clone();
    let mut report = GradientReport { checked: 0, max_relative_error: 0.0, worst_parameter: 0 };
    for &k in parameters {
        let original = probe.parameter(k);
        let up = original + STEP;
        let down = original - STEP;
        probe.set_parameter(k, up);
        let loss_up = loss(&probe, input, label)?;
        probe.set_parameter(k, down);
        let loss_down = loss(&probe, input, label)?;
        probe.set_parameter(k, original);
        let numeric = (loss_up - loss_down) / (f64::from(up) - f64::from(down));
        let a = grad[k];
        let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(FLOOR);
        report.checked += 1;
        if rel > report.max_relative_error {
            report.max_relative_error = rel;
            report.worst_parameter = k;
        }
        if rel > tolerance {
            return Err(NeuralError::GradientMismatch { parameter: k, analytic: a, numeric, relative_error: rel });
        }
    }
    Ok(report)
}

fn loss(model: &MlpModel, input: &Input, label: bool) -> Result<f64, NeuralError> {
    Ok(bce_loss(model.forward(input, Mode::Infer)?, label, 1.0))
}
