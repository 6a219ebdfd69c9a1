//! Linear generator of the four-level master equation and its steady state.
//!
//! The density-matrix equations of motion are linear in ρ, so the whole
//! problem reduces to a 16×16 complex generator L acting on the row-major
//! vectorization v = vec(ρ): dv/dt = L·v. The unique physical steady state
//! is obtained by replacing the (redundant) ρ̇11 row with the trace
//! constraint and solving the resulting dense system directly. A fixed-step
//! Runge–Kutta integrator provides an independent cross-check of the
//! algebraic solution.

use nalgebra::SMatrix;
use thiserror::Error;

use crate::types::{
    vec_index, DensityMatrix, PhysicalityError, SystemParams, Vec16, C64,
};

/// Dense 16×16 complex matrix backing a [`Generator`].
pub type Mat16 = SMatrix<C64, 16, 16>;

/// Residual bound max|L·vec(ρ)| enforced on steady-state solutions.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Smallest integrator step [`evolve`] will take before giving up.
pub const MIN_STEP: f64 = 1e-12;

/// Errors from the steady-state solver and the time integrator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    /// The trace-constrained linear system could not be solved reliably.
    /// This is the expected outcome when all drives vanish and the ground
    /// manifold makes the steady state non-unique.
    #[error("SingularSystem: {0}")]
    SingularSystem(String),
    /// The solver produced a matrix violating density-matrix invariants.
    #[error("NonPhysical: {0}")]
    NonPhysical(#[from] PhysicalityError),
    /// The integrator would need a step below [`MIN_STEP`].
    #[error("StepUnderflow: required step {required:.3e} is below {MIN_STEP:.0e}")]
    StepUnderflow {
        /// Step size that would have been required.
        required: f64,
    },
}

/// Generator L of the vectorized master equation dv/dt = L·v.
///
/// By construction the generator preserves the trace exactly (the ρ̇44 row
/// is the negated sum of the other population rows) and preserves
/// Hermiticity (the lower-triangle coherence rows are conjugate mirrors of
/// the printed upper-triangle ones).
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    matrix: Mat16,
}

impl Generator {
    /// The underlying 16×16 matrix (row/column order: [`vec_index`]).
    pub fn matrix(&self) -> &Mat16 {
        &self.matrix
    }

    /// Coefficient of ρ_{ab} in the equation for ρ̇_{ij} (1-based labels).
    pub fn coefficient(&self, ij: (usize, usize), ab: (usize, usize)) -> C64 {
        self.matrix[(vec_index(ij.0, ij.1), vec_index(ab.0, ab.1))]
    }

    /// Applies the generator: vec(ρ̇) = L·vec(ρ).
    pub fn apply(&self, v: &Vec16) -> Vec16 {
        self.matrix * v
    }

    /// Induced infinity norm (maximum absolute row sum); bounds the fastest
    /// time scale and hence the integrator step.
    pub fn norm_inf(&self) -> f64 {
        (0..16)
            .map(|r| (0..16).map(|c| self.matrix[(r, c)].norm()).sum())
            .fold(0.0, f64::max)
    }

    /// Serializes the generator as CSV for offline inspection: 16 rows of 32
    /// columns (interleaved real/imaginary parts), row order = vec order.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for r in 0..16 {
            for c in 0..16 {
                if c > 0 {
                    out.push(',');
                }
                let z = self.matrix[(r, c)];
                out.push_str(&format!("{:.16e},{:.16e}", z.re, z.im));
            }
            out.push('\n');
        }
        out
    }
}

/// Builds the generator encoding the nine independent equations of motion,
/// their conjugate mirrors, and the trace-closure row ρ̇44 = −(ρ̇11 + ρ̇22 + ρ̇33).
///
/// The drive phase enters through e^{±iφ} factors on the control Rabi
/// frequencies Ω1, Ω2 exactly where they appear in the equations of motion;
/// the ρ̇21 damping term carries its anomalous sign pattern
/// −(Γ21/2 + i(Δπ − Δp − 2Δlh)) verbatim.
pub fn build_generator(p: &SystemParams) -> Generator {
    let i = C64::I;
    let ph = C64::from_polar(1.0, p.phi); // e^{+iφ}
    let phc = ph.conj(); // e^{−iφ}
    let op = p.omega_plus;
    let om = p.omega_minus;
    let o1 = p.omega_1;
    let o2 = p.omega_2;

    let mut m = Mat16::zeros();
    {
        let mut add = |ij: (usize, usize), ab: (usize, usize), coef: C64| {
            m[(vec_index(ij.0, ij.1), vec_index(ab.0, ab.1))] += coef;
        };

        // ρ̇11 = γ31 ρ33 + γ41 ρ44 + iΩ1 e^{iφ} ρ31 − iΩ1 e^{−iφ} ρ13
        //        + iΩ+ ρ41 − iΩ+ ρ14
        add((1, 1), (3, 3), C64::from(p.gamma_31));
        add((1, 1), (4, 4), C64::from(p.gamma_41));
        add((1, 1), (3, 1), i * o1 * ph);
        add((1, 1), (1, 3), -i * o1 * phc);
        add((1, 1), (4, 1), i * op);
        add((1, 1), (1, 4), -i * op);

        // ρ̇22 = γ32 ρ33 + γ42 ρ44 + iΩ− ρ32 − iΩ− ρ23
        //        + iΩ2 e^{iφ} ρ42 − iΩ2 e^{−iφ} ρ24
        add((2, 2), (3, 3), C64::from(p.gamma_32));
        add((2, 2), (4, 4), C64::from(p.gamma_42));
        add((2, 2), (3, 2), i * om);
        add((2, 2), (2, 3), -i * om);
        add((2, 2), (4, 2), i * o2 * ph);
        add((2, 2), (2, 4), -i * o2 * phc);

        // ρ̇33 = −(γ31 + γ32) ρ33 + iΩ1 e^{−iφ} ρ13 − iΩ1 e^{iφ} ρ31
        //        + iΩ− ρ23 − iΩ− ρ32
        add((3, 3), (3, 3), C64::from(-(p.gamma_31 + p.gamma_32)));
        add((3, 3), (1, 3), i * o1 * phc);
        add((3, 3), (3, 1), -i * o1 * ph);
        add((3, 3), (2, 3), i * om);
        add((3, 3), (3, 2), -i * om);

        // ρ̇21 = −(Γ21/2 + i(Δπ − Δp − 2Δlh)) ρ21 + iΩ− ρ31 + iΩ2 e^{iφ} ρ41
        //        − iΩ+ ρ24 − iΩ1 e^{−iφ} ρ23
        add(
            (2, 1),
            (2, 1),
            -C64::new(
                p.gamma_total_21() / 2.0,
                p.delta_pi - p.delta_p - 2.0 * p.delta_lh,
            ),
        );
        add((2, 1), (3, 1), i * om);
        add((2, 1), (4, 1), i * o2 * ph);
        add((2, 1), (2, 4), -i * op);
        add((2, 1), (2, 3), -i * o1 * phc);

        // ρ̇31 = −(Γ31/2 − i(Δπ + ΔB − Δlh)) ρ31 + iΩ1 e^{−iφ} (ρ11 − ρ33)
        //        + iΩ− ρ21 − iΩ+ ρ34
        add(
            (3, 1),
            (3, 1),
            -C64::new(
                p.gamma_total_31() / 2.0,
                -(p.delta_pi + p.delta_b - p.delta_lh),
            ),
        );
        add((3, 1), (1, 1), i * o1 * phc);
        add((3, 1), (3, 3), -i * o1 * phc);
        add((3, 1), (2, 1), i * om);
        add((3, 1), (3, 4), -i * op);

        // ρ̇41 = −(Γ41/2 − i(Δp − ΔB − Δlh)) ρ41 + iΩ+ (ρ11 − ρ44)
        //        + iΩ2 e^{−iφ} ρ21 − iΩ1 e^{−iφ} ρ43
        add(
            (4, 1),
            (4, 1),
            -C64::new(
                p.gamma_total_41() / 2.0,
                -(p.delta_p - p.delta_b - p.delta_lh),
            ),
        );
        add((4, 1), (1, 1), i * op);
        add((4, 1), (4, 4), -i * op);
        add((4, 1), (2, 1), i * o2 * phc);
        add((4, 1), (4, 3), -i * o1 * phc);

        // ρ̇32 = −(Γ32/2 − i(Δp + ΔB + Δlh)) ρ32 + iΩ− (ρ22 − ρ33)
        //        + iΩ1 e^{−iφ} ρ12 − iΩ2 e^{−iφ} ρ34
        add(
            (3, 2),
            (3, 2),
            -C64::new(
                p.gamma_total_32() / 2.0,
                -(p.delta_p + p.delta_b + p.delta_lh),
            ),
        );
        add((3, 2), (2, 2), i * om);
        add((3, 2), (3, 3), -i * om);
        add((3, 2), (1, 2), i * o1 * phc);
        add((3, 2), (3, 4), -i * o2 * phc);

        // ρ̇42 = −(Γ42/2 − i(Δπ − ΔB + Δlh)) ρ42 + iΩ2 e^{−iφ} (ρ22 − ρ44)
        //        − iΩ− ρ43 + iΩ+ ρ12
        add(
            (4, 2),
            (4, 2),
            -C64::new(
                p.gamma_total_42() / 2.0,
                -(p.delta_pi - p.delta_b + p.delta_lh),
            ),
        );
        add((4, 2), (2, 2), i * o2 * phc);
        add((4, 2), (4, 4), -i * o2 * phc);
        add((4, 2), (4, 3), -i * om);
        add((4, 2), (1, 2), i * op);

        // ρ̇43 = −(Γ43/2 − i(Δπ − Δp − 2ΔB)) ρ43 − iΩ− ρ42 − iΩ1 e^{iφ} ρ41
        //        + iΩ2 e^{−iφ} ρ23 + iΩ+ ρ13
        add(
            (4, 3),
            (4, 3),
            -C64::new(
                p.gamma_total_43() / 2.0,
                -(p.delta_pi - p.delta_p - 2.0 * p.delta_b),
            ),
        );
        add((4, 3), (4, 2), -i * om);
        add((4, 3), (4, 1), -i * o1 * ph);
        add((4, 3), (2, 3), i * o2 * phc);
        add((4, 3), (1, 3), i * op);
    }

    // The lower-triangle coherence equations are conjugate mirrors of the
    // printed ones: L[(i,j),(a,b)] = conj(L[(j,i),(b,a)]). Generating them
    // mechanically guarantees Hermiticity preservation by construction.
    for (ii, jj) in [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)] {
        for a in 1..=4 {
            for b in 1..=4 {
                m[(vec_index(ii, jj), vec_index(a, b))] =
                    m[(vec_index(jj, ii), vec_index(b, a))].conj();
            }
        }
    }

    // Trace closure: ρ̇44 = −(ρ̇11 + ρ̇22 + ρ̇33), exact by construction.
    let row44 = -(m.row(vec_index(1, 1))
        + m.row(vec_index(2, 2))
        + m.row(vec_index(3, 3)));
    m.set_row(vec_index(4, 4), &row44);

    Generator { matrix: m }
}

/// Solves for the unique trace-one steady state of the master equation.
///
/// The ρ̇11 row of L is replaced by the trace row (coefficients 1 on the four
/// populations) with right-hand side 1; the dense system is LU-factorized
/// and the residual max|L·vec(ρ)| of the *original* generator is verified
/// against [`RESIDUAL_TOL`] before the result is accepted.
pub fn steady_state(p: &SystemParams) -> Result<DensityMatrix, SolveError> {
    let gen = build_generator(p);
    let mut a = gen.matrix;
    let trace_row = vec_index(1, 1);
    for c in 0..16 {
        a[(trace_row, c)] = C64::ZERO;
    }
    for k in 1..=4 {
        a[(trace_row, vec_index(k, k))] = C64::ONE;
    }
    let mut b = Vec16::zeros();
    b[trace_row] = C64::ONE;

    let v = a.lu().solve(&b).ok_or_else(|| {
        SolveError::SingularSystem(
            "trace-constrained system is singular (no unique steady state; \
             are all drives zero?)"
            .into(),
        )
    })?;

    let resid = gen.apply(&v).iter().map(|c| c.norm()).fold(0.0, f64::max);
    if resid.is_nan() || resid >= RESIDUAL_TOL {
        return Err(SolveError::SingularSystem(format!(
            "steady-state residual {resid:.3e} exceeds {RESIDUAL_TOL:.0e} \
             (no unique steady state; are all drives zero?)"
        )));
    }

    let rho = DensityMatrix::new(DensityMatrix::matrix_from_vector(&v))?;
    Ok(rho)
}

/// Integrates dv/dt = L·v from `rho0` to `t_end` with classical fourth-order
/// Runge–Kutta.
///
/// The step is capped at `dt_max` and at 0.05/‖L‖∞ for stability; `t_end ≤ 0`
/// returns `rho0` unchanged. Trace and Hermiticity are preserved by the
/// generator structure up to integration roundoff (within 1e-9 over the
/// horizons used here), which is the tolerance applied to the returned state.
pub fn evolve(
    p: &SystemParams,
    rho0: &DensityMatrix,
    t_end: f64,
    dt_max: f64,
) -> Result<DensityMatrix, SolveError> {
    if t_end <= 0.0 {
        return Ok(*rho0);
    }
    let gen = build_generator(p);
    let norm = gen.norm_inf();
    let stability_cap = if norm > 0.0 { 0.05 / norm } else { f64::INFINITY };
    let step_target = dt_max.min(stability_cap).min(t_end);
    if step_target.is_nan() || step_target <= MIN_STEP {
        return Err(SolveError::StepUnderflow {
            required: step_target,
        });
    }
    let n_steps = (t_end / step_target).ceil() as usize;
    let h = t_end / n_steps as f64;
    let l = &gen.matrix;

    let half_h = C64::from(0.5 * h);
    let full_h = C64::from(h);
    let sixth_h = C64::from(h / 6.0);
    let two = C64::from(2.0);

    let mut v = rho0.to_vector();
    for _ in 0..n_steps {
        let k1 = l * v;
        let k2 = l * (v + k1 * half_h);
        let k3 = l * (v + k2 * half_h);
        let k4 = l * (v + k3 * full_h);
        v += (k1 + k2 * two + k3 * two + k4) * sixth_h;
    }

    let rho = DensityMatrix::new_with_tol(
        DensityMatrix::matrix_from_vector(&v),
        1e-9,
        1e-7,
    )?;
    Ok(rho)
}

/// Steady-state defect max|L·vec(ρ)| of a candidate state under the dynamics
/// generated by `p`.
pub fn residual(p: &SystemParams, rho: &DensityMatrix) -> f64 {
    build_generator(p)
        .apply(&rho.to_vector())
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max)
}
