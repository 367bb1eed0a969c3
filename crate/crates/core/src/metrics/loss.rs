use serde::{Deserialize, Serialize};

use super::{MetricError, MetricFamily, MetricKind, Task, TransformSpec, LOGISTIC_DELTA};

/// Steepness of the logistic loss, in 1/(output units).
///
/// Chosen so that a residual equal to the mean absolute residual maps to a
/// logistic loss of exactly 0.5.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CalibrationB(f64);

impl CalibrationB {
    pub fn new(value: f64) -> Result<Self, MetricError> {
        if value.is_finite() && value > 0.0 {
            Ok(CalibrationB(value))
        } else {
            Err(MetricError::InvalidCalibration(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `B = ln 3 / mean |e|`.
pub fn calibrate_b(residuals: &[f64]) -> Result<CalibrationB, MetricError> {
    if residuals.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    if let Some(&bad) = residuals.iter().find(|e| !e.is_finite()) {
        return Err(MetricError::OutOfRange {
            what: "residual",
            value: bad,
        });
    }
    let mean_abs = residuals.iter().map(|e| e.abs()).sum::<f64>() / residuals.len() as f64;
    if mean_abs == 0.0 {
        return Err(MetricError::ZeroMeanResidual);
    }
    CalibrationB::new(3f64.ln() / mean_abs)
}

fn require_b(kind: MetricKind, b: Option<CalibrationB>) -> Result<f64, MetricError> {
    b.map(CalibrationB::value)
        .ok_or(MetricError::MissingCalibration(kind))
}

fn require_regression(kind: MetricKind) -> Result<(), MetricError> {
    if kind.task() == Task::Regression {
        Ok(())
    } else {
        Err(MetricError::WrongTask {
            kind,
            expected: Task::Regression,
        })
    }
}

/// Evaluates a regression loss at `e = yhat − y`.
pub fn eval_loss(
    kind: MetricKind,
    yhat: f64,
    y: f64,
    b: Option<CalibrationB>,
) -> Result<f64, MetricError> {
    eval_loss_residual(kind, yhat - y, b)
}

/// Evaluates a regression loss directly from the residual.
pub fn eval_loss_residual(
    kind: MetricKind,
    e: f64,
    b: Option<CalibrationB>,
) -> Result<f64, MetricError> {
    require_regression(kind)?;
    let b = if kind.is_logistic() {
        require_b(kind, b)?
    } else {
        f64::NAN
    };
    Ok(loss_at(kind, e, b))
}

// `b` is ignored for non-logistic kinds.
fn loss_at(kind: MetricKind, e: f64, b: f64) -> f64 {
    use MetricKind::*;
    let signed = match kind {
        SimpleSigned | SimpleUnsigned => e,
        SquaredSigned | SquaredUnsigned => e * e.abs(),
        // 2 / (1 + exp(-B e)) - 1 == tanh(B e / 2)
        LogisticSigned | LogisticUnsigned => (0.5 * b * e).tanh(),
        _ => unreachable!("loss_at called with a score"),
    };
    if kind.is_unsigned() {
        signed.abs()
    } else {
        signed
    }
}

/// Recovers the residual from a loss value.
///
/// Signed losses give back `e`; unsigned losses give back `|e|`. Out-of-range
/// values (negative unsigned losses, logistic values at or beyond ±1) are
/// clamped into the attainable range first.
pub fn residual_of(
    kind: MetricKind,
    value: f64,
    b: Option<CalibrationB>,
) -> Result<f64, MetricError> {
    use MetricKind::*;
    require_regression(kind)?;
    let limit = 1.0 - LOGISTIC_DELTA;
    Ok(match kind {
        SimpleSigned => value,
        // sqrt(|v|)·sgn(v), with sgn(0) = 0
        SquaredSigned if value == 0.0 => 0.0,
        SquaredSigned => value.abs().sqrt().copysign(value),
        LogisticSigned => {
            let v = value.clamp(-limit, limit);
            2.0 * odd_atanh(v) / require_b(kind, b)?
        }
        SimpleUnsigned => value.max(0.0),
        SquaredUnsigned => value.max(0.0).sqrt(),
        LogisticUnsigned => {
            let v = value.clamp(0.0, limit);
            2.0 * v.atanh() / require_b(kind, b)?
        }
        _ => unreachable!(),
    })
}

// libm's atanh is not exactly odd close to ±1.
fn odd_atanh(v: f64) -> f64 {
    v.abs().atanh().copysign(v)
}

/// Maps a loss value to another loss through the residual.
///
/// Identity pairs return the value untouched.
pub fn transform_loss(spec: &TransformSpec, value: f64) -> Result<f64, MetricError> {
    let (from, to) = (spec.from(), spec.to());
    let valid = from.task() == Task::Regression
        && to.task() == Task::Regression
        && !(from.family() == MetricFamily::UnsignedLoss
            && to.family() == MetricFamily::SignedLoss);
    if !valid {
        return Err(MetricError::IncompatiblePair { from, to });
    }
    if from == to {
        return Ok(value);
    }
    let e = residual_of(from, value, spec.b())?;
    let b = if to.is_logistic() {
        require_b(to, spec.b())?
    } else {
        f64::NAN
    };
    Ok(loss_at(to, e, b))
}
