use super::{MetricError, MetricKind, Task, TransformSpec, PRINCIPAL_EPS, SPHERICAL_SINGULAR_TOL};

/// Probability assigned to the observed class, clamped to `[ε, 1 − ε]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Principal(f64);

impl Principal {
    /// Clamps a probability in `[0, 1]` into `[ε, 1 − ε]`.
    pub fn new(r: f64) -> Result<Self, MetricError> {
        if !(0.0..=1.0).contains(&r) {
            return Err(MetricError::OutOfRange {
                what: "principal",
                value: r,
            });
        }
        Ok(Principal(r.clamp(PRINCIPAL_EPS, 1.0 - PRINCIPAL_EPS)))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `r = p_pos` if the observed class is positive, `1 − p_pos` otherwise.
pub fn principal_of(p_pos: f64, y_true: bool) -> Result<Principal, MetricError> {
    if !(0.0..=1.0).contains(&p_pos) {
        return Err(MetricError::OutOfRange {
            what: "p_pos",
            value: p_pos,
        });
    }
    Principal::new(if y_true { p_pos } else { 1.0 - p_pos })
}

fn require_score(kind: MetricKind) -> Result<(), MetricError> {
    if kind.task() == Task::Classification {
        Ok(())
    } else {
        Err(MetricError::WrongTask {
            kind,
            expected: Task::Classification,
        })
    }
}

pub fn eval_score(kind: MetricKind, r: Principal) -> Result<f64, MetricError> {
    require_score(kind)?;
    let r = r.value();
    if !(r > 0.0 && r < 1.0) {
        return Err(MetricError::OutOfRange {
            what: "principal",
            value: r,
        });
    }
    Ok(score_at(kind, r))
}

/// Binary scoring rules as functions of the principal. No clamping.
pub fn score_at(kind: MetricKind, r: f64) -> f64 {
    match kind {
        MetricKind::LogScore => r.ln(),
        MetricKind::QuadScore => -(2.0 * r * r - 4.0 * r + 1.0),
        MetricKind::SphereScore => r / (2.0 * r * r - 2.0 * r + 1.0).sqrt(),
        _ => panic!("{kind} is not a scoring rule"),
    }
}

/// Attainable range of a score over `r ∈ [ε, 1 − ε]`.
pub fn score_range(kind: MetricKind) -> Result<(f64, f64), MetricError> {
    require_score(kind)?;
    Ok((
        score_at(kind, PRINCIPAL_EPS),
        score_at(kind, 1.0 - PRINCIPAL_EPS),
    ))
}

/// Recovers the principal from a score value.
///
/// The value is clamped into the attainable range first. The quadratic and
/// spherical inverses take the negative branch of their quadratic solutions.
pub fn invert_score(kind: MetricKind, value: f64) -> Result<f64, MetricError> {
    let (lo, hi) = score_range(kind)?;
    let v = value.clamp(lo, hi);
    let r = match kind {
        MetricKind::LogScore => v.exp(),
        MetricKind::QuadScore => 1.0 - (2.0 - 2.0 * v).sqrt() / 2.0,
        MetricKind::SphereScore => {
            if (2.0 * v * v - 1.0).abs() < SPHERICAL_SINGULAR_TOL {
                0.5
            } else {
                // (S² − √(S² − S⁴)) / (2S² − 1), rationalised: the common
                // factor (S − √(1 − S²)) cancels, leaving no 0/0 at S = 1/√2.
                let c = ((1.0 - v) * (1.0 + v)).sqrt();
                v / (v + c)
            }
        }
        _ => unreachable!(),
    };
    Ok(r.clamp(PRINCIPAL_EPS, 1.0 - PRINCIPAL_EPS))
}

/// Maps a score value to another score through the principal.
///
/// Identity pairs return the value untouched.
pub fn transform_score(spec: &TransformSpec, value: f64) -> Result<f64, MetricError> {
    let (from, to) = (spec.from(), spec.to());
    if from.task() != Task::Classification || to.task() != Task::Classification {
        return Err(MetricError::IncompatiblePair { from, to });
    }
    if from == to {
        return Ok(value);
    }
    let r = invert_score(from, value)?;
    Ok(score_at(to, r))
}
