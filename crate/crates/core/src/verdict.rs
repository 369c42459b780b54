use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// How a finite period was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Powering,
    EigenOrders,
    Theorem,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Powering => "powering",
            Method::EigenOrders => "eigen-orders",
            Method::Theorem => "theorem",
        }
    }
}

/// Numerical evidence that `mu` is a primitive `q`-th root of unity, `mu ~ e^{2 pi i p/q}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootOfUnityCert {
    pub mu: Complex64,
    pub p: i64,
    pub q: u64,
    /// Signed `arg(mu)/2pi - p/q` (reduced mod 1 into `[-1/2, 1/2)`).
    pub offset: f64,
}

impl RootOfUnityCert {
    /// `|arg(mu)/2pi - p/q|`
    pub fn residual(&self) -> f64 {
        self.offset.abs()
    }

    /// `|mu^t - 1|`, evaluated through the exact fraction so that large `t`
    /// does not amplify rounding in `arg(mu)`.
    pub fn power_deviation(&self, t: u64) -> f64 {
        let q = self.q as u128;
        let p = self.p.rem_euclid(self.q as i64) as u128;
        let frac = ((t as u128 % q) * p % q) as f64 / self.q as f64;
        let angle = std::f64::consts::TAU * (frac + t as f64 * self.offset);
        (Complex64::from_polar(1.0, angle) - 1.0).norm()
    }
}

/// Limit of an unsuccessful search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchBound {
    /// Nothing found up to this many steps / this denominator.
    Steps(u64),
    /// A closed-form result asserts the period is infinite.
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PeriodVerdict {
    Finite {
        period: u64,
        method: Method,
        certificate: Option<Vec<RootOfUnityCert>>,
    },
    NoPeriodUpTo {
        bound: SearchBound,
        method: Method,
        reason: String,
    },
}

impl PeriodVerdict {
    pub fn finite(period: u64, method: Method) -> Self {
        PeriodVerdict::Finite {
            period,
            method,
            certificate: None,
        }
    }

    pub fn none_up_to(bound: u64, method: Method, reason: impl Into<String>) -> Self {
        PeriodVerdict::NoPeriodUpTo {
            bound: SearchBound::Steps(bound),
            method,
            reason: reason.into(),
        }
    }

    pub fn period(&self) -> Option<u64> {
        match self {
            PeriodVerdict::Finite { period, .. } => Some(*period),
            PeriodVerdict::NoPeriodUpTo { .. } => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.period().is_some()
    }

    /// The method that produced the verdict, or that gave up.
    pub fn method(&self) -> Method {
        match self {
            PeriodVerdict::Finite { method, .. } | PeriodVerdict::NoPeriodUpTo { method, .. } => *method,
        }
    }

    /// `"finite"`, `"unknown"` or `"infinite-by-theorem"`.
    pub fn outcome_label(&self) -> &'static str {
        match self {
            PeriodVerdict::Finite { .. } => "finite",
            PeriodVerdict::NoPeriodUpTo {
                bound: SearchBound::Steps(_),
                ..
            } => "unknown",
            PeriodVerdict::NoPeriodUpTo {
                bound: SearchBound::Unbounded,
                ..
            } => "infinite-by-theorem",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_deviation_uses_exact_fraction() {
        let cert = RootOfUnityCert {
            mu: Complex64::from_polar(1.0, std::f64::consts::TAU * 3.0 / 7.0),
            p: 3,
            q: 7,
            offset: 0.0,
        };
        assert!(cert.power_deviation(7) < 1e-15);
        assert!(cert.power_deviation(7 * 1_000_000_007) < 1e-15);
        assert!(cert.power_deviation(3) > 0.1);
    }

    #[test]
    fn labels() {
        assert_eq!(PeriodVerdict::finite(8, Method::Powering).outcome_label(), "finite");
        assert_eq!(PeriodVerdict::none_up_to(10, Method::Powering, "x").outcome_label(), "unknown");
        let inf = PeriodVerdict::NoPeriodUpTo {
            bound: SearchBound::Unbounded,
            method: Method::Theorem,
            reason: "r".into(),
        };
        assert_eq!(inf.outcome_label(), "infinite-by-theorem");
        assert_eq!(inf.period(), None);
    }
}
