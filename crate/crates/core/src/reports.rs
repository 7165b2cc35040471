//! Check reports: the common result row produced by identity and inequality
//! checks, with a conservative three-sigma-style verdict rule.

use crate::measures::EvalResult;
use serde::Serialize;

/// Outcome of a numerical check. `Holds` and `Violated` are only issued when
/// the margin clears three times the combined error budget; anything inside
/// the noise band stays `Inconclusive`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Violated,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Verdict for a claim `lhs >= rhs` with `margin = lhs - rhs`.
pub fn inequality_verdict(margin: f64, budget: f64) -> Verdict {
    let bar = 3.0 * budget;
    if margin > bar {
        Verdict::Holds
    } else if margin < -bar {
        Verdict::Violated
    } else {
        Verdict::Inconclusive
    }
}

/// Verdict for a claim `lhs = rhs`: holds when the margin sits inside three
/// times the budget (plus a machine-precision floor), violated when clearly
/// outside.
pub fn identity_verdict(margin: f64, budget: f64, scale: f64) -> Verdict {
    let bar = (3.0 * budget).max(1e-12 * (1.0 + scale.abs()));
    if margin.abs() <= bar {
        Verdict::Holds
    } else {
        Verdict::Violated
    }
}

/// One check row: the two sides, their difference, the combined error
/// budget, and the verdict. `name` says which claim was checked; `inputs`
/// describes the instance in words.
#[derive(Debug, Clone, Serialize)]
pub struct InequalityReport {
    pub name: String,
    pub inputs: String,
    pub lhs: EvalResult,
    pub rhs: EvalResult,
    pub margin: f64,
    pub budget: f64,
    pub verdict: Verdict,
}

impl InequalityReport {
    /// Report for a claim `lhs >= rhs`.
    pub fn inequality(name: &str, inputs: &str, lhs: EvalResult, rhs: EvalResult) -> Self {
        let margin = lhs.value - rhs.value;
        let budget = lhs.abs_error + rhs.abs_error;
        InequalityReport {
            name: name.into(),
            inputs: inputs.into(),
            lhs,
            rhs,
            margin,
            budget,
            verdict: inequality_verdict(margin, budget),
        }
    }

    /// Report for a claim `lhs = rhs`.
    pub fn identity(name: &str, inputs: &str, lhs: EvalResult, rhs: EvalResult) -> Self {
        let margin = lhs.value - rhs.value;
        let budget = lhs.abs_error + rhs.abs_error;
        let scale = lhs.value.abs().max(rhs.value.abs());
        InequalityReport {
            name: name.into(),
            inputs: inputs.into(),
            lhs,
            rhs,
            margin,
            budget,
            verdict: identity_verdict(margin, budget, scale),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts_respect_the_error_band() {
        assert_eq!(inequality_verdict(1.0, 0.1), Verdict::Holds);
        assert_eq!(inequality_verdict(-1.0, 0.1), Verdict::Violated);
        assert_eq!(inequality_verdict(0.2, 0.1), Verdict::Inconclusive);
        assert_eq!(inequality_verdict(-0.2, 0.1), Verdict::Inconclusive);
        assert_eq!(identity_verdict(1e-9, 1e-9, 1.0), Verdict::Holds);
        assert_eq!(identity_verdict(1e-3, 1e-9, 1.0), Verdict::Violated);
    }

    #[test]
    fn tiny_margins_on_exact_identities_still_hold() {
        // Exact paths carry near-zero budgets; the machine floor keeps
        // round-off from flipping an identity to violated.
        assert_eq!(identity_verdict(1e-14, 0.0, 1.0), Verdict::Holds);
    }
}
