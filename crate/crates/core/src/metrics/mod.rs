//! Regression losses, binary proper scoring rules, and the closed-form maps
//! between mutually monotonic members of each family.
//!
//! Losses are functions of the residual `e = ŷ − y`; scores are functions of
//! the principal `r`, the probability the classifier gave to the observed
//! class. Every transform goes through that shared argument: the source value
//! is inverted to `e` (or `r`) and the target metric is evaluated there.

mod loss;
mod score;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use loss::{
    calibrate_b, eval_loss, eval_loss_residual, residual_of, transform_loss, CalibrationB,
};
pub use score::{
    eval_score, invert_score, principal_of, score_at, score_range, transform_score, Principal,
};

/// Principals are clamped to `[PRINCIPAL_EPS, 1 − PRINCIPAL_EPS]` before scoring.
pub const PRINCIPAL_EPS: f64 = 1e-6;

/// Logistic loss values are clamped to `|v| ≤ 1 − LOGISTIC_DELTA` before inversion.
pub const LOGISTIC_DELTA: f64 = 1e-12;

/// Width of the band `|2·S_S² − 1| < tol` in which the spherical inverse
/// returns the analytic limit `r = 1/2`.
pub const SPHERICAL_SINGULAR_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("empty input")]
    EmptyInput,
    #[error("mean absolute residual is zero; logistic steepness is undefined")]
    ZeroMeanResidual,
    #[error("invalid calibration value {0}")]
    InvalidCalibration(f64),
    #[error("{0} needs a calibration value B")]
    MissingCalibration(MetricKind),
    #[error("{what} = {value} is out of range")]
    OutOfRange { what: &'static str, value: f64 },
    #[error("no transform from {from} to {to}")]
    IncompatiblePair { from: MetricKind, to: MetricKind },
    #[error("{kind} is not a {expected:?} metric")]
    WrongTask { kind: MetricKind, expected: Task },
    #[error("unknown metric name `{0}`")]
    UnknownMetric(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Regression,
    Classification,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::Regression => "regression",
            Task::Classification => "classification",
        })
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "regression" | "reg" => Ok(Task::Regression),
            "classification" | "clf" => Ok(Task::Classification),
            other => Err(format!("unknown task `{other}`")),
        }
    }
}

/// Families inside which metrics are mutually monotonic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricFamily {
    SignedLoss,
    UnsignedLoss,
    Score,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    SimpleSigned,
    SquaredSigned,
    LogisticSigned,
    SimpleUnsigned,
    SquaredUnsigned,
    LogisticUnsigned,
    LogScore,
    QuadScore,
    SphereScore,
}

impl MetricKind {
    /// Regression losses in report order.
    pub const REGRESSION: [MetricKind; 6] = [
        MetricKind::SimpleSigned,
        MetricKind::SquaredSigned,
        MetricKind::LogisticSigned,
        MetricKind::SimpleUnsigned,
        MetricKind::SquaredUnsigned,
        MetricKind::LogisticUnsigned,
    ];

    /// Classification scores in report order.
    pub const CLASSIFICATION: [MetricKind; 3] = [
        MetricKind::LogScore,
        MetricKind::QuadScore,
        MetricKind::SphereScore,
    ];

    pub fn all_for(task: Task) -> &'static [MetricKind] {
        match task {
            Task::Regression => &Self::REGRESSION,
            Task::Classification => &Self::CLASSIFICATION,
        }
    }

    pub fn task(self) -> Task {
        match self.family() {
            MetricFamily::Score => Task::Classification,
            _ => Task::Regression,
        }
    }

    pub fn family(self) -> MetricFamily {
        use MetricKind::*;
        match self {
            SimpleSigned | SquaredSigned | LogisticSigned => MetricFamily::SignedLoss,
            SimpleUnsigned | SquaredUnsigned | LogisticUnsigned => MetricFamily::UnsignedLoss,
            LogScore | QuadScore | SphereScore => MetricFamily::Score,
        }
    }

    pub fn is_signed(self) -> bool {
        self.family() == MetricFamily::SignedLoss
    }

    pub fn is_unsigned(self) -> bool {
        self.family() == MetricFamily::UnsignedLoss
    }

    pub fn is_logistic(self) -> bool {
        matches!(self, MetricKind::LogisticSigned | MetricKind::LogisticUnsigned)
    }

    /// The signed loss with the same shape, for unsigned losses.
    pub fn signed_counterpart(self) -> Option<MetricKind> {
        use MetricKind::*;
        match self {
            SimpleUnsigned => Some(SimpleSigned),
            SquaredUnsigned => Some(SquaredSigned),
            LogisticUnsigned => Some(LogisticSigned),
            _ => None,
        }
    }

    /// Short symbol used for report headers.
    pub fn symbol(self) -> &'static str {
        use MetricKind::*;
        match self {
            SimpleSigned => "L_N^±",
            SquaredSigned => "L_S^±",
            LogisticSigned => "L_L^±",
            SimpleUnsigned => "L_N",
            SquaredUnsigned => "L_S",
            LogisticUnsigned => "L_L",
            LogScore => "S_L",
            QuadScore => "S_Q",
            SphereScore => "S_S",
        }
    }

    /// Snake-case identifier used in config files and file names.
    pub fn name(self) -> &'static str {
        use MetricKind::*;
        match self {
            SimpleSigned => "simple_signed",
            SquaredSigned => "squared_signed",
            LogisticSigned => "logistic_signed",
            SimpleUnsigned => "simple_unsigned",
            SquaredUnsigned => "squared_unsigned",
            LogisticUnsigned => "logistic_unsigned",
            LogScore => "log_score",
            QuadScore => "quad_score",
            SphereScore => "sphere_score",
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for MetricKind {
    type Err = MetricError;

    /// Accepts either the snake-case name or the report symbol.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MetricKind::REGRESSION
            .iter()
            .chain(MetricKind::CLASSIFICATION.iter())
            .copied()
            .find(|k| k.name() == s || k.symbol() == s)
            .ok_or_else(|| MetricError::UnknownMetric(s.to_string()))
    }
}

/// A directed map `from → to` between two metrics.
///
/// Valid pairs stay inside one monotonic family, or go from a signed loss to
/// an unsigned one. Unsigned → signed is rejected because the sign of the
/// residual is gone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformSpec {
    from: MetricKind,
    to: MetricKind,
    b: Option<CalibrationB>,
}

impl TransformSpec {
    pub fn new(
        from: MetricKind,
        to: MetricKind,
        b: Option<CalibrationB>,
    ) -> Result<Self, MetricError> {
        if !Self::exists(from, to) {
            return Err(MetricError::IncompatiblePair { from, to });
        }
        if b.is_none() && from != to {
            if let Some(kind) = [from, to].into_iter().find(|k| k.is_logistic()) {
                return Err(MetricError::MissingCalibration(kind));
            }
        }
        Ok(TransformSpec { from, to, b })
    }

    /// Whether a transform from `from` to `to` is defined.
    pub fn exists(from: MetricKind, to: MetricKind) -> bool {
        use MetricFamily::*;
        matches!(
            (from.family(), to.family()),
            (SignedLoss, SignedLoss)
                | (UnsignedLoss, UnsignedLoss)
                | (SignedLoss, UnsignedLoss)
                | (Score, Score)
        )
    }

    pub fn from(&self) -> MetricKind {
        self.from
    }

    pub fn to(&self) -> MetricKind {
        self.to
    }

    pub fn b(&self) -> Option<CalibrationB> {
        self.b
    }

    /// Whether the map is strictly increasing on the source's range.
    pub fn is_monotone(&self) -> bool {
        self.from.family() == self.to.family()
    }

    /// Dispatches to [`transform_loss`] or [`transform_score`].
    pub fn apply(&self, value: f64) -> Result<f64, MetricError> {
        match self.from.task() {
            Task::Regression => transform_loss(self, value),
            Task::Classification => transform_score(self, value),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_and_symbols_parse_back() {
        for k in MetricKind::REGRESSION.iter().chain(&MetricKind::CLASSIFICATION) {
            assert_eq!(k.name().parse::<MetricKind>().unwrap(), *k);
            assert_eq!(k.symbol().parse::<MetricKind>().unwrap(), *k);
        }
        assert!(matches!(
            "huber".parse::<MetricKind>(),
            Err(MetricError::UnknownMetric(_))
        ));
    }

    #[test]
    fn transform_existence_rules() {
        let mut na = 0;
        for &from in &MetricKind::REGRESSION {
            for &to in &MetricKind::REGRESSION {
                if !TransformSpec::exists(from, to) {
                    assert!(from.is_unsigned() && to.is_signed());
                    na += 1;
                }
            }
        }
        assert_eq!(na, 9);
        for &from in &MetricKind::CLASSIFICATION {
            for &to in &MetricKind::CLASSIFICATION {
                assert!(TransformSpec::exists(from, to));
            }
        }
        assert!(!TransformSpec::exists(MetricKind::LogScore, MetricKind::SimpleSigned));
    }

    #[test]
    fn logistic_pairs_need_b() {
        let err = TransformSpec::new(MetricKind::SimpleSigned, MetricKind::LogisticSigned, None);
        assert_eq!(
            err,
            Err(MetricError::MissingCalibration(MetricKind::LogisticSigned))
        );
        assert!(TransformSpec::new(MetricKind::SimpleSigned, MetricKind::SquaredUnsigned, None).is_ok());
        assert!(matches!(
            TransformSpec::new(MetricKind::SimpleUnsigned, MetricKind::SimpleSigned, None),
            Err(MetricError::IncompatiblePair { .. })
        ));
    }
}
