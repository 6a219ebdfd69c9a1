//! Steady-state magneto-optical rotation in a four-level quantum-well
//! waveguide.
//!
//! The model is a driven, dissipative four-level system: two ground
//! sublevels split by a magnetic field and two excited sublevels, addressed
//! by the circular components of a linearly polarized probe and by two
//! π-polarized coupling fields. The crate
//!
//! 1. assembles the Liouvillian generator of the master equation
//!    ([`liouville::build_generator`]),
//! 2. solves for the steady-state density matrix
//!    ([`liouville::steady_state`]) or propagates an initial state in time
//!    ([`liouville::evolve`]),
//! 3. forms the susceptibilities of the two circular probe components from
//!    the optical coherences ([`optics::susceptibilities`]), and
//! 4. propagates the probe through a waveguide of optical depth αl to
//!    transmitted intensities and the polarization rotation angle
//!    ([`optics::transmission`]).
//!
//! In the symmetric-drive regime (opposite-signed equal couplings, resonant
//! fields, no dephasing) the susceptibilities also have a closed form
//! ([`optics::analytic_susceptibilities`]), used throughout as an
//! independent cross-check. Both routes sit behind the
//! [`method::SteadyStateMethod`] strategy trait, so sweeps and the CLI can
//! switch between them by name.
//!
//! All rates and detunings are expressed in units of a single reference
//! decay rate γ, and times in 1/γ.
//!
//! # Example
//!
//! ```
//! use morqw::{lookup, SystemParams};
//!
//! // Symmetric-drive operating point at splitting ΔB = 7γ, depth αl = 45.
//! let params = SystemParams {
//!     delta_b: 7.0,
//!     ..SystemParams::default()
//! };
//! let method = lookup("numeric").unwrap();
//! let obs = method.evaluate(&params, 45.0).unwrap();
//!
//! // The x-polarized input leaves mostly y-polarized: near-90° rotation.
//! assert!(obs.transmission.t_y > 0.79);
//! assert!(obs.transmission.t_x < 0.01);
//! ```

pub mod cli;
pub mod liouville;
pub mod method;
pub mod optics;
pub mod sweep;
pub mod types;

pub use liouville::{build_generator, evolve, residual, steady_state, Generator, SolveError};
pub use method::{
    lookup, methods, AnalyticMethod, MethodError, NumericMethod, PointObservables,
    SteadyStateMethod,
};
pub use optics::{
    analytic_susceptibilities, analytic_transmission, birefringence_dichroism, rotation_angle,
    susceptibilities, transmission, OpticsError,
};
pub use sweep::{
    figure_preset, run_sweep, AxisName, FigureId, FigurePreset, FigureVariant, SweepAxis,
    SweepError, SweepResult, SweepRow,
};
pub use types::{
    validate_params, zeeman_from_field, DensityMatrix, ParamError, PhysicalityError,
    Susceptibilities, SystemParams, Transmission,
};
