use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

/// Sign test on the exponent that decides a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticStage {
    pub exponent: f64,
    pub pass: bool,
}

/// Per-sample residuals of a barrier check.
///
/// The meaning of `closed_form`, `fd` and `ratios` depends on `target`; the
/// docs of each certifier spell it out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub target: String,
    pub points: Vec<Vec<f64>>,
    pub closed_form: Vec<f64>,
    pub fd: Vec<f64>,
    pub ratios: Vec<f64>,
    pub h_values: Vec<f64>,
    pub max_relative_mismatch: f64,
    pub tolerance: f64,
    pub analytic: Option<AnalyticStage>,
    /// Largest radius (or tube radius) below which every sample passes.
    pub threshold: Option<f64>,
    pub predicted_threshold: Option<f64>,
    pub verdict: Verdict,
}

impl ResidualReport {
    pub(crate) fn new(target: &str, tolerance: f64) -> Self {
        Self {
            target: target.to_string(),
            points: Vec::new(),
            closed_form: Vec::new(),
            fd: Vec::new(),
            ratios: Vec::new(),
            h_values: Vec::new(),
            max_relative_mismatch: 0.0,
            tolerance,
            analytic: None,
            threshold: None,
            predicted_threshold: None,
            verdict: Verdict::Fail,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `max/min` of `|ratios|`.
    pub fn ratio_spread(&self) -> f64 {
        let (lo, hi) = self
            .ratios
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r.abs()), hi.max(r.abs())));
        hi / lo
    }
}
