//! Domain types shared across the simulator.
//!
//! Every rate and frequency is expressed in units of the reference decay
//! rate γ (γ ≡ 1 internally); physical Hz values enter only through
//! [`zeeman_from_field`]. The four-level system couples two ground light-hole
//! states |1⟩, |2⟩ to two conduction states |3⟩, |4⟩: a π-polarized control
//! beam drives |1⟩–|3⟩ and |2⟩–|4⟩ with Rabi frequencies Ω1, Ω2, while the
//! circular components of a linearly polarized probe drive |1⟩–|4⟩ (σ+, Ω+)
//! and |2⟩–|3⟩ (σ−, Ω−).

use nalgebra::{Matrix4, SVector};
use num_complex::Complex64;
use thiserror::Error;

/// Complex double shorthand used throughout the crate.
pub type C64 = Complex64;

/// 16-component vectorization of a 4×4 density matrix (see [`vec_index`]).
pub type Vec16 = SVector<C64, 16>;

/// Bohr magneton over ħ in rad·s⁻¹·T⁻¹ (CODATA).
pub const MU_B_OVER_HBAR: f64 = 8.7941e10;

/// Hermiticity / unit-trace tolerance enforced by [`DensityMatrix::new`].
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Slack allowed on density-matrix diagonal entries outside [0, 1].
pub const DIAG_SLACK: f64 = 1e-10;

/// Row-major position of ρ_{ij} (1-based state labels) in vec(ρ).
///
/// The vectorization order is fixed: `v[4(i−1)+(j−1)] = ρ_{ij}`. Serialized
/// generator dumps and all internal solves use this layout.
#[inline]
pub fn vec_index(i: usize, j: usize) -> usize {
    debug_assert!((1..=4).contains(&i) && (1..=4).contains(&j));
    4 * (i - 1) + (j - 1)
}

/// Model parameters of the driven four-level system, in units of γ.
///
/// The multi-photon resonance condition requires the probe and control
/// detunings to coincide (`delta_p == delta_pi`); [`validate_params`]
/// enforces this together with non-negativity of all rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Rabi frequency Ω+ of the σ+ probe component (≥ 0).
    pub omega_plus: f64,
    /// Rabi frequency Ω− of the σ− probe component (≥ 0).
    pub omega_minus: f64,
    /// Control Rabi frequency Ω1 on |1⟩–|3⟩ (signed).
    pub omega_1: f64,
    /// Control Rabi frequency Ω2 on |2⟩–|4⟩ (signed; the opposite-dipole
    /// convention makes Ω2 = −Ω1 the default).
    pub omega_2: f64,
    /// Relative phase φ of the driving beams, radians.
    pub phi: f64,
    /// Probe detuning Δp (common to both circular components).
    pub delta_p: f64,
    /// Control detuning Δπ (common to both control transitions).
    pub delta_pi: f64,
    /// Conduction-band Zeeman half-splitting ΔB.
    pub delta_b: f64,
    /// Light-hole Zeeman half-splitting Δlh.
    pub delta_lh: f64,
    /// Population decay rate |3⟩ → |1⟩.
    pub gamma_31: f64,
    /// Population decay rate |3⟩ → |2⟩.
    pub gamma_32: f64,
    /// Population decay rate |4⟩ → |1⟩.
    pub gamma_41: f64,
    /// Population decay rate |4⟩ → |2⟩.
    pub gamma_42: f64,
    /// Pure dephasing rate of the ρ21 coherence.
    pub gamma_d_21: f64,
    /// Pure dephasing rate of the ρ31 coherence.
    pub gamma_d_31: f64,
    /// Pure dephasing rate of the ρ32 coherence.
    pub gamma_d_32: f64,
    /// Pure dephasing rate of the ρ41 coherence.
    pub gamma_d_41: f64,
    /// Pure dephasing rate of the ρ42 coherence.
    pub gamma_d_42: f64,
    /// Pure dephasing rate of the ρ43 coherence.
    pub gamma_d_43: f64,
}

impl Default for SystemParams {
    /// Symmetric-drive operating point used by the bundled presets: resonant
    /// beams with Ω+ = Ω− = 1γ, Ω1 = −Ω2 = 1γ, φ = 0, strong radiative
    /// channels γ32 = γ41 = 1γ, weak cross channels γ31 = γ42 = 0.01γ, and no
    /// dephasing or magnetic splitting.
    fn default() -> Self {
        Self {
            omega_plus: 1.0,
            omega_minus: 1.0,
            omega_1: 1.0,
            omega_2: -1.0,
            phi: 0.0,
            delta_p: 0.0,
            delta_pi: 0.0,
            delta_b: 0.0,
            delta_lh: 0.0,
            gamma_31: 0.01,
            gamma_32: 1.0,
            gamma_41: 1.0,
            gamma_42: 0.01,
            gamma_d_21: 0.0,
            gamma_d_31: 0.0,
            gamma_d_32: 0.0,
            gamma_d_41: 0.0,
            gamma_d_42: 0.0,
            gamma_d_43: 0.0,
        }
    }
}

impl SystemParams {
    /// Combined radiative width of |3⟩: γ3 = γ31 + γ32.
    pub fn gamma_3(&self) -> f64 {
        self.gamma_31 + self.gamma_32
    }

    /// Combined radiative width of |4⟩: γ4 = γ41 + γ42.
    pub fn gamma_4(&self) -> f64 {
        self.gamma_41 + self.gamma_42
    }

    /// Total damping rate Γ21 = γᵈ21 of the ground-state coherence.
    pub fn gamma_total_21(&self) -> f64 {
        self.gamma_d_21
    }

    /// Total damping rate Γ31 = γ3 + γᵈ31.
    pub fn gamma_total_31(&self) -> f64 {
        self.gamma_3() + self.gamma_d_31
    }

    /// Total damping rate Γ32 = γ3 + γᵈ32.
    pub fn gamma_total_32(&self) -> f64 {
        self.gamma_3() + self.gamma_d_32
    }

    /// Total damping rate Γ41 = γ4 + γᵈ41.
    pub fn gamma_total_41(&self) -> f64 {
        self.gamma_4() + self.gamma_d_41
    }

    /// Total damping rate Γ42 = γ4 + γᵈ42.
    pub fn gamma_total_42(&self) -> f64 {
        self.gamma_4() + self.gamma_d_42
    }

    /// Total damping rate Γ43 = γ3 + γ4 + γᵈ43 of the excited-state coherence.
    pub fn gamma_total_43(&self) -> f64 {
        self.gamma_3() + self.gamma_4() + self.gamma_d_43
    }
}

/// Errors raised while validating parameters or converting field strengths.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    /// A rate or unsigned Rabi frequency is negative.
    #[error("NegativeRate: {field} = {value} must be >= 0")]
    NegativeRate {
        /// Offending field name.
        field: &'static str,
        /// Offending value.
        value: f64,
    },
    /// Probe and control detunings differ, breaking multi-photon resonance.
    #[error(
        "MultiPhotonViolation: delta_p = {delta_p} and delta_pi = {delta_pi} \
         must coincide (the rotating-frame equations assume the multi-photon \
         resonance condition)"
    )]
    MultiPhotonViolation {
        /// Probe detuning.
        delta_p: f64,
        /// Control detuning.
        delta_pi: f64,
    },
    /// A parameter that must be a finite number is not.
    #[error("NonFinite: {field} = {value} must be finite")]
    NonFinite {
        /// Offending field name.
        field: &'static str,
        /// Offending value.
        value: f64,
    },
    /// The reference rate handed to [`zeeman_from_field`] is not positive.
    #[error("NonPositiveGamma: gamma_hz = {0} must be > 0")]
    NonPositiveGamma(f64),
}

/// Checks all [`SystemParams`] invariants and returns the parameters
/// unchanged on success.
///
/// Validation is idempotent: a validated parameter set validates again to an
/// identical value. Solvability (e.g. at least one nonzero drive) is *not*
/// checked here; the steady-state solver reports that separately.
pub fn validate_params(p: SystemParams) -> Result<SystemParams, ParamError> {
    let finite_fields = [
        ("omega_plus", p.omega_plus),
        ("omega_minus", p.omega_minus),
        ("omega_1", p.omega_1),
        ("omega_2", p.omega_2),
        ("phi", p.phi),
        ("delta_p", p.delta_p),
        ("delta_pi", p.delta_pi),
        ("delta_b", p.delta_b),
        ("delta_lh", p.delta_lh),
        ("gamma_31", p.gamma_31),
        ("gamma_32", p.gamma_32),
        ("gamma_41", p.gamma_41),
        ("gamma_42", p.gamma_42),
        ("gamma_d_21", p.gamma_d_21),
        ("gamma_d_31", p.gamma_d_31),
        ("gamma_d_32", p.gamma_d_32),
        ("gamma_d_41", p.gamma_d_41),
        ("gamma_d_42", p.gamma_d_42),
        ("gamma_d_43", p.gamma_d_43),
    ];
    for (field, value) in finite_fields {
        if !value.is_finite() {
            return Err(ParamError::NonFinite { field, value });
        }
    }
    let nonnegative_fields = [
        ("omega_plus", p.omega_plus),
        ("omega_minus", p.omega_minus),
        ("gamma_31", p.gamma_31),
        ("gamma_32", p.gamma_32),
        ("gamma_41", p.gamma_41),
        ("gamma_42", p.gamma_42),
        ("gamma_d_21", p.gamma_d_21),
        ("gamma_d_31", p.gamma_d_31),
        ("gamma_d_32", p.gamma_d_32),
        ("gamma_d_41", p.gamma_d_41),
        ("gamma_d_42", p.gamma_d_42),
        ("gamma_d_43", p.gamma_d_43),
    ];
    for (field, value) in nonnegative_fields {
        if value < 0.0 {
            return Err(ParamError::NegativeRate { field, value });
        }
    }
    if (p.delta_p - p.delta_pi).abs() > 1e-12 {
        return Err(ParamError::MultiPhotonViolation {
            delta_p: p.delta_p,
            delta_pi: p.delta_pi,
        });
    }
    Ok(p)
}

/// Converts a magnetic field strength to Zeeman half-splittings in units
/// of γ.
///
/// With Landé factors `g_s` (conduction band) and `g_j` (light-hole band)
/// and the reference rate `gamma_hz` in Hz, the splittings are
/// ΔB = −g_s·(μB/ħ)·B / γ and Δlh = −g_j·(μB/ħ)·B / γ. The conversion is
/// linear in `b_tesla` and odd under field reversal.
pub fn zeeman_from_field(
    b_tesla: f64,
    g_s: f64,
    g_j: f64,
    gamma_hz: f64,
) -> Result<(f64, f64), ParamError> {
    if gamma_hz.is_nan() || gamma_hz <= 0.0 {
        return Err(ParamError::NonPositiveGamma(gamma_hz));
    }
    let delta_b = (-g_s * MU_B_OVER_HBAR * b_tesla) / gamma_hz;
    let delta_lh = (-g_j * MU_B_OVER_HBAR * b_tesla) / gamma_hz;
    Ok((delta_b, delta_lh))
}

/// Ways a 4×4 complex matrix can fail to be a physical density matrix.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhysicalityError {
    /// ρ deviates from ρ† beyond tolerance.
    #[error("matrix is not Hermitian: max |rho - rho†| = {deviation:.3e}")]
    NotHermitian {
        /// Largest elementwise deviation from the conjugate transpose.
        deviation: f64,
    },
    /// trace(ρ) deviates from one beyond tolerance.
    #[error("trace deviates from one by {deviation:.3e}")]
    TraceNotOne {
        /// |trace(ρ) − 1|.
        deviation: f64,
    },
    /// A population sits outside [0, 1] beyond the allowed slack.
    #[error("population rho[{index}][{index}] = {value} is outside [0, 1]")]
    PopulationOutOfRange {
        /// 1-based state label of the offending diagonal entry.
        index: usize,
        /// Offending population value (real part).
        value: f64,
    },
}

/// A physical density matrix of the four-level system.
///
/// Construction checks Hermiticity and unit trace to within
/// [`HERMITICITY_TOL`] and population bounds to within [`DIAG_SLACK`]; the
/// basis index is 1-based, matching the state labels |1⟩…|4⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    rho: Matrix4<C64>,
}

impl DensityMatrix {
    /// Validates and wraps a 4×4 complex matrix.
    pub fn new(rho: Matrix4<C64>) -> Result<Self, PhysicalityError> {
        Self::new_with_tol(rho, HERMITICITY_TOL, DIAG_SLACK)
    }

    /// Validates with custom tolerances; used by the time integrator whose
    /// roundoff budget over long horizons exceeds the construction default.
    pub(crate) fn new_with_tol(
        rho: Matrix4<C64>,
        herm_tol: f64,
        diag_slack: f64,
    ) -> Result<Self, PhysicalityError> {
        let mut herm_dev: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                herm_dev = herm_dev.max((rho[(i, j)] - rho[(j, i)].conj()).norm());
            }
        }
        if herm_dev.is_nan() || herm_dev > herm_tol {
            return Err(PhysicalityError::NotHermitian {
                deviation: herm_dev,
            });
        }
        let trace_dev = (rho.trace() - C64::ONE).norm();
        if trace_dev.is_nan() || trace_dev > herm_tol {
            return Err(PhysicalityError::TraceNotOne {
                deviation: trace_dev,
            });
        }
        for i in 0..4 {
            let pop = rho[(i, i)].re;
            if !(-diag_slack..=1.0 + diag_slack).contains(&pop) {
                return Err(PhysicalityError::PopulationOutOfRange {
                    index: i + 1,
                    value: pop,
                });
            }
        }
        Ok(Self { rho })
    }

    /// Diagonal (fully dephased) state with the given populations.
    pub fn from_populations(pops: [f64; 4]) -> Result<Self, PhysicalityError> {
        let mut rho = Matrix4::zeros();
        for (i, &pop) in pops.iter().enumerate() {
            rho[(i, i)] = C64::from(pop);
        }
        Self::new(rho)
    }

    /// The maximally mixed state diag(¼, ¼, ¼, ¼).
    pub fn maximally_mixed() -> Self {
        Self::from_populations([0.25; 4]).expect("maximally mixed state is physical")
    }

    /// Underlying 4×4 matrix.
    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.rho
    }

    /// Element ρ_{ij} with 1-based state labels, e.g. `element(3, 2)` = ρ32.
    pub fn element(&self, i: usize, j: usize) -> C64 {
        assert!(
            (1..=4).contains(&i) && (1..=4).contains(&j),
            "state labels are 1-based"
        );
        self.rho[(i - 1, j - 1)]
    }

    /// Population of state |i⟩ (1-based).
    pub fn population(&self, i: usize) -> f64 {
        self.element(i, i).re
    }

    /// Row-major vectorization vec(ρ) (see [`vec_index`]).
    pub fn to_vector(&self) -> Vec16 {
        let mut v = Vec16::zeros();
        for i in 0..4 {
            for j in 0..4 {
                v[4 * i + j] = self.rho[(i, j)];
            }
        }
        v
    }

    /// Reshapes a row-major 16-vector back into a matrix (no physicality
    /// check; pair with [`DensityMatrix::new`] to validate).
    pub fn matrix_from_vector(v: &Vec16) -> Matrix4<C64> {
        let mut rho = Matrix4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                rho[(i, j)] = v[4 * i + j];
            }
        }
        rho
    }
}

/// Normalized circular-component susceptibilities of the probe.
///
/// `Im` parts are absorption (gain when negative); `Re` parts are dispersion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Susceptibilities {
    /// Normalized susceptibility S+ seen by the σ+ component.
    pub s_plus: C64,
    /// Normalized susceptibility S− seen by the σ− component.
    pub s_minus: C64,
}

/// Transmitted probe intensities and polarization rotation angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transmission {
    /// Intensity transmitted along the input polarization x̂ (fraction of
    /// the input intensity).
    pub t_x: f64,
    /// Intensity rotated into ŷ.
    pub t_y: f64,
    /// Polarization rotation angle Φ = atan(√(Ty/Tx)) ∈ [0, π/2], radians.
    pub phi_rot: f64,
    /// Set when Tx = Ty = 0: the beam is fully absorbed and the rotation
    /// angle of a null field is reported as 0 by convention.
    pub degenerate_rotation: bool,
}
