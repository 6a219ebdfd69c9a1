//! Runtime-selectable evaluation strategies.
//!
//! A [`SteadyStateMethod`] turns one parameter point into the full set of
//! observables. Two strategies are registered: `numeric` solves the 16×16
//! master equation exactly as written, while `analytic` evaluates the
//! closed forms available in the symmetric-drive regime. Strategies are
//! looked up by name at runtime, so sweeps, presets, and the CLI stay
//! agnostic of which pipeline produces the numbers.

use thiserror::Error;

use crate::liouville::{residual, steady_state, SolveError};
use crate::optics::{
    analytic_susceptibilities, analytic_transmission, susceptibilities, transmission,
    OpticsError,
};
use crate::types::{Susceptibilities, SystemParams, Transmission};

/// All observables derived from one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointObservables {
    /// Normalized circular-component susceptibilities.
    pub susceptibilities: Susceptibilities,
    /// Transmitted intensities and rotation angle at the requested depth.
    pub transmission: Transmission,
    /// Steady-state defect max|L·vec(ρ)| of the state behind the
    /// susceptibilities; exactly 0 for closed-form strategies.
    pub residual: f64,
}

/// Errors a strategy can produce while evaluating a point.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MethodError {
    /// Steady-state solver failure.
    #[error(transparent)]
    Solve(#[from] SolveError),
    /// Susceptibility/transmission failure.
    #[error(transparent)]
    Optics(#[from] OpticsError),
}

impl MethodError {
    /// Stable bare-word form used in result tables (`status` column).
    pub fn status_word(&self) -> &'static str {
        match self {
            MethodError::Solve(SolveError::SingularSystem(_)) => "singular_system",
            MethodError::Solve(SolveError::NonPhysical(_)) => "non_physical",
            MethodError::Solve(SolveError::StepUnderflow { .. }) => "step_underflow",
            MethodError::Optics(OpticsError::ZeroProbe(_)) => "zero_probe",
            MethodError::Optics(OpticsError::RegimeViolation(_)) => "regime_violation",
        }
    }
}

/// A named strategy mapping a validated parameter point and optical depth to
/// observables.
pub trait SteadyStateMethod: Send + Sync {
    /// Registry name, also accepted by the CLI `--method` flag.
    fn name(&self) -> &'static str;

    /// One-line description for help output.
    fn describe(&self) -> &'static str;

    /// Evaluates all observables at one parameter point.
    fn evaluate(
        &self,
        p: &SystemParams,
        alpha_l: f64,
    ) -> Result<PointObservables, MethodError>;
}

/// Full density-matrix pipeline: steady state → susceptibilities →
/// transmission. Valid for any validated parameter set.
#[derive(Debug, Clone, Copy)]
pub struct NumericMethod;

impl SteadyStateMethod for NumericMethod {
    fn name(&self) -> &'static str {
        "numeric"
    }

    fn describe(&self) -> &'static str {
        "dense steady-state solve of the full master equation"
    }

    fn evaluate(
        &self,
        p: &SystemParams,
        alpha_l: f64,
    ) -> Result<PointObservables, MethodError> {
        let rho = steady_state(p)?;
        let s = susceptibilities(&rho, p)?;
        Ok(PointObservables {
            susceptibilities: s,
            transmission: transmission(&s, alpha_l),
            residual: residual(p, &rho),
        })
    }
}

/// Closed-form pipeline for the symmetric-drive regime; rejects parameters
/// outside it rather than returning silently wrong values.
#[derive(Debug, Clone, Copy)]
pub struct AnalyticMethod;

impl SteadyStateMethod for AnalyticMethod {
    fn name(&self) -> &'static str {
        "analytic"
    }

    fn describe(&self) -> &'static str {
        "closed-form susceptibilities/transmission (symmetric-drive regime)"
    }

    fn evaluate(
        &self,
        p: &SystemParams,
        alpha_l: f64,
    ) -> Result<PointObservables, MethodError> {
        let s = analytic_susceptibilities(p)?;
        Ok(PointObservables {
            susceptibilities: s,
            transmission: analytic_transmission(p, alpha_l)?,
            residual: 0.0,
        })
    }
}

/// The registered strategies, in presentation order.
pub fn methods() -> &'static [&'static dyn SteadyStateMethod] {
    static METHODS: [&dyn SteadyStateMethod; 2] = [&NumericMethod, &AnalyticMethod];
    &METHODS
}

/// Looks a strategy up by its registry name.
pub fn lookup(name: &str) -> Option<&'static dyn SteadyStateMethod> {
    methods().iter().copied().find(|m| m.name() == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn registry_lists_both_strategies() {
        let names: Vec<&str> = methods().iter().map(|m| m.name()).collect();
        assert_eq!(names, ["numeric", "analytic"]);
        assert!(lookup("numeric").is_some());
        assert!(lookup("analytic").is_some());
        assert!(lookup("euler").is_none());
    }

    #[test]
    fn strategies_agree_in_the_shared_regime() {
        let p = SystemParams {
            delta_b: 7.0,
            ..SystemParams::default()
        };
        let numeric = lookup("numeric").unwrap().evaluate(&p, 45.0).unwrap();
        let analytic = lookup("analytic").unwrap().evaluate(&p, 45.0).unwrap();
        assert_relative_eq!(
            numeric.susceptibilities.s_plus.re,
            analytic.susceptibilities.s_plus.re,
            max_relative = 1e-8
        );
        assert_relative_eq!(
            numeric.transmission.t_y,
            analytic.transmission.t_y,
            max_relative = 1e-8
        );
        assert!(numeric.residual < crate::liouville::RESIDUAL_TOL);
        assert_eq!(analytic.residual, 0.0);
    }

    #[test]
    fn errors_map_to_stable_status_words() {
        let no_drives = SystemParams {
            omega_plus: 0.0,
            omega_minus: 0.0,
            omega_1: 0.0,
            omega_2: 0.0,
            ..SystemParams::default()
        };
        let err = lookup("numeric").unwrap().evaluate(&no_drives, 1.0).unwrap_err();
        assert_eq!(err.status_word(), "singular_system");

        let zero_probe = SystemParams {
            omega_plus: 0.0,
            ..SystemParams::default()
        };
        let err = lookup("numeric").unwrap().evaluate(&zero_probe, 1.0).unwrap_err();
        assert_eq!(err.status_word(), "zero_probe");

        let dephased = SystemParams {
            gamma_d_43: 0.05,
            ..SystemParams::default()
        };
        let err = lookup("analytic").unwrap().evaluate(&dephased, 1.0).unwrap_err();
        assert_eq!(err.status_word(), "regime_violation");
    }
}
