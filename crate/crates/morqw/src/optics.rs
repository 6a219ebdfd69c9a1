//! From steady-state coherences to observables: normalized susceptibilities
//! of the two circular probe components, transmitted intensities along the
//! input (x̂) and rotated (ŷ) polarization directions, and the polarization
//! rotation angle.
//!
//! Each numeric routine has a closed-form counterpart (`analytic_*`) valid
//! in the symmetric-drive regime (resonant beams, φ = 0, no dephasing,
//! Ω+ = Ω−, Ω2 = −Ω1, γ32 = γ41, γ31 = γ42, Δlh = 0); the pair serves as a
//! mutual cross-check.

use thiserror::Error;

use crate::types::{DensityMatrix, Susceptibilities, SystemParams, Transmission, C64};

/// Tolerance for the equality comparisons in the closed-form regime check.
pub const REGIME_TOL: f64 = 1e-12;

/// Errors from the optics layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OpticsError {
    /// A probe component has zero Rabi frequency, so its normalized
    /// susceptibility is undefined (no weak-probe extrapolation is done).
    #[error("ZeroProbe: {0} must be > 0 to normalize the susceptibility")]
    ZeroProbe(&'static str),
    /// Parameters violate the closed-form regime; the analytic expressions
    /// would be silently wrong.
    #[error("RegimeViolation: {0}")]
    RegimeViolation(String),
}

/// Normalized susceptibilities from a steady state: S+ = ρ41·γ41/Ω+ and
/// S− = ρ32·γ32/Ω−.
pub fn susceptibilities(
    rho: &DensityMatrix,
    p: &SystemParams,
) -> Result<Susceptibilities, OpticsError> {
    if p.omega_plus <= 0.0 {
        return Err(OpticsError::ZeroProbe("omega_plus"));
    }
    if p.omega_minus <= 0.0 {
        return Err(OpticsError::ZeroProbe("omega_minus"));
    }
    Ok(Susceptibilities {
        s_plus: rho.element(4, 1) * p.gamma_41 / p.omega_plus,
        s_minus: rho.element(3, 2) * p.gamma_32 / p.omega_minus,
    })
}

/// Checks the closed-form regime preconditions, returning γ, γ', Ω, Ωπ.
fn closed_form_regime(p: &SystemParams) -> Result<(f64, f64, f64, f64), OpticsError> {
    let violation = |msg: String| Err(OpticsError::RegimeViolation(msg));
    if p.phi.abs() > REGIME_TOL {
        return violation(format!("requires phi = 0, got {}", p.phi));
    }
    if p.delta_p.abs() > REGIME_TOL || p.delta_pi.abs() > REGIME_TOL {
        return violation(format!(
            "requires resonant beams (delta_p = delta_pi = 0), got delta_p = {}, \
             delta_pi = {}",
            p.delta_p, p.delta_pi
        ));
    }
    if p.delta_lh.abs() > REGIME_TOL {
        return violation(format!("requires delta_lh = 0, got {}", p.delta_lh));
    }
    for (name, value) in [
        ("gamma_d_21", p.gamma_d_21),
        ("gamma_d_31", p.gamma_d_31),
        ("gamma_d_32", p.gamma_d_32),
        ("gamma_d_41", p.gamma_d_41),
        ("gamma_d_42", p.gamma_d_42),
        ("gamma_d_43", p.gamma_d_43),
    ] {
        if value.abs() > REGIME_TOL {
            return violation(format!("requires no dephasing, got {name} = {value}"));
        }
    }
    if (p.omega_plus - p.omega_minus).abs() > REGIME_TOL || p.omega_plus <= 0.0 {
        return violation(format!(
            "requires equal positive probe components, got omega_plus = {}, \
             omega_minus = {}",
            p.omega_plus, p.omega_minus
        ));
    }
    if (p.omega_1 + p.omega_2).abs() > REGIME_TOL {
        return violation(format!(
            "requires opposite control components (omega_2 = -omega_1), got \
             omega_1 = {}, omega_2 = {}",
            p.omega_1, p.omega_2
        ));
    }
    if (p.gamma_32 - p.gamma_41).abs() > REGIME_TOL
        || (p.gamma_31 - p.gamma_42).abs() > REGIME_TOL
    {
        return violation(format!(
            "requires symmetric decay channels (gamma_32 = gamma_41, gamma_31 = \
             gamma_42), got {}, {}, {}, {}",
            p.gamma_32, p.gamma_41, p.gamma_31, p.gamma_42
        ));
    }
    Ok((p.gamma_32, p.gamma_31, p.omega_plus, p.omega_1))
}

/// Closed-form susceptibilities in the symmetric-drive regime:
/// S∓ = (∓2ΔB + i(γ+γ'))·γ / D with D = (γ+γ')² + 8(Ω² + Ωπ²) + 4ΔB².
pub fn analytic_susceptibilities(p: &SystemParams) -> Result<Susceptibilities, OpticsError> {
    let (g, gp, omega, omega_pi) = closed_form_regime(p)?;
    let d = (g + gp).powi(2)
        + 8.0 * (omega.powi(2) + omega_pi.powi(2))
        + 4.0 * p.delta_b.powi(2);
    let re = 2.0 * p.delta_b * g / d;
    let im = (g + gp) * g / d;
    Ok(Susceptibilities {
        s_plus: C64::new(re, im),
        s_minus: C64::new(-re, im),
    })
}

/// Transmitted intensities after an optical depth `alpha_l`:
/// Tx = ¼|e^{iαlS+/2} + e^{iαlS−/2}|², Ty = ¼|e^{iαlS+/2} − e^{iαlS−/2}|².
pub fn transmission(s: &Susceptibilities, alpha_l: f64) -> Transmission {
    debug_assert!(alpha_l >= 0.0, "optical depth must be non-negative");
    let exp_plus = (C64::new(0.0, 0.5 * alpha_l) * s.s_plus).exp();
    let exp_minus = (C64::new(0.0, 0.5 * alpha_l) * s.s_minus).exp();
    let t_x = 0.25 * (exp_plus + exp_minus).norm_sqr();
    let t_y = 0.25 * (exp_plus - exp_minus).norm_sqr();
    let (phi_rot, degenerate_rotation) = rotation_angle(t_x, t_y);
    Transmission {
        t_x,
        t_y,
        phi_rot,
        degenerate_rotation,
    }
}

/// Closed-form transmitted intensities in the symmetric-drive regime:
/// Tx,y = (e^{−αlβ}/2)(1 ± cos θ) with θ = 2αlΔBγ/D and β = Im S± = (γ+γ')γ/D.
pub fn analytic_transmission(
    p: &SystemParams,
    alpha_l: f64,
) -> Result<Transmission, OpticsError> {
    debug_assert!(alpha_l >= 0.0, "optical depth must be non-negative");
    let (g, gp, omega, omega_pi) = closed_form_regime(p)?;
    let d = (g + gp).powi(2)
        + 8.0 * (omega.powi(2) + omega_pi.powi(2))
        + 4.0 * p.delta_b.powi(2);
    let theta = 2.0 * alpha_l * p.delta_b * g / d;
    let beta = (g + gp) * g / d;
    let envelope = (-alpha_l * beta).exp() / 2.0;
    let t_x = envelope * (1.0 + theta.cos());
    let t_y = envelope * (1.0 - theta.cos());
    let (phi_rot, degenerate_rotation) = rotation_angle(t_x, t_y);
    Ok(Transmission {
        t_x,
        t_y,
        phi_rot,
        degenerate_rotation,
    })
}

/// Dispersion and absorption imbalance between the circular components:
/// `re_diff = Re S+ − Re S−` (birefringence), `im_diff = Im S+ − Im S−`
/// (dichroism).
pub fn birefringence_dichroism(s: &Susceptibilities) -> (f64, f64) {
    (
        s.s_plus.re - s.s_minus.re,
        s.s_plus.im - s.s_minus.im,
    )
}

/// Polarization rotation angle Φ = atan(√(Ty/Tx)) ∈ [0, π/2].
///
/// Returns (Φ, degenerate): Tx = 0 with light present maps to Φ = π/2; a
/// fully absorbed beam (Tx = Ty = 0) carries no polarization, reported as
/// Φ = 0 with the degenerate flag set.
pub fn rotation_angle(t_x: f64, t_y: f64) -> (f64, bool) {
    if t_x == 0.0 && t_y == 0.0 {
        (0.0, true)
    } else if t_x == 0.0 {
        (std::f64::consts::FRAC_PI_2, false)
    } else {
        ((t_y / t_x).sqrt().atan(), false)
    }
}
