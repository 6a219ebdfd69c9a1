//! Parameter sweeps over 1D and 2D grids, plus bundled presets that
//! reproduce the reference scenarios shipped with the crate.
//!
//! Grid points are independent pure computations, so they are evaluated in
//! parallel; rows are assembled in grid order (outer axis major), making the
//! result bit-identical regardless of worker count. A failing point records
//! its status in the row instead of aborting the sweep.

use rayon::prelude::*;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

use crate::method::{MethodError, PointObservables, SteadyStateMethod};
use crate::types::SystemParams;

/// Hard cap on the number of grid points in one sweep.
pub const MAX_GRID_POINTS: u128 = 10_000_000;

/// Default number of grid points per axis used by the presets.
pub const DEFAULT_GRID_POINTS: usize = 501;

/// Errors raised while setting up a sweep (never per-point; those end up in
/// row statuses).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    /// Axis specification violates start < stop, count ≥ 2, or finiteness.
    #[error("invalid sweep axis: {0}")]
    InvalidAxis(String),
    /// A sweep takes one or two axes, nothing else.
    #[error("a sweep takes 1 or 2 axes, got {0}")]
    AxisCount(usize),
    /// The requested grid exceeds [`MAX_GRID_POINTS`].
    #[error("GridTooLarge: {points} grid points exceed the {MAX_GRID_POINTS} limit")]
    GridTooLarge {
        /// Requested number of points.
        points: u128,
    },
    /// No preset is registered under the requested name.
    #[error("UnknownFigure: no preset named {0:?} (available: fig2..fig7)")]
    UnknownFigure(String),
}

/// The sweepable quantities: four model parameters plus the optical depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisName {
    /// Common beam detuning; sets `delta_p` and `delta_pi` together so the
    /// multi-photon resonance condition survives the sweep.
    Delta,
    /// Conduction-band Zeeman half-splitting.
    DeltaB,
    /// Ground-state coherence dephasing rate γᵈ21.
    GammaD21,
    /// Relative drive phase φ.
    Phi,
    /// Optical depth αl.
    AlphaL,
}

impl AxisName {
    /// Stable identifier used in config files and CSV headers.
    pub fn as_str(&self) -> &'static str {
        match self {
            AxisName::Delta => "delta",
            AxisName::DeltaB => "delta_b",
            AxisName::GammaD21 => "gamma_d_21",
            AxisName::Phi => "phi",
            AxisName::AlphaL => "alpha_l",
        }
    }
}

impl fmt::Display for AxisName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AxisName {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "delta" => Ok(AxisName::Delta),
            "delta_b" => Ok(AxisName::DeltaB),
            "gamma_d_21" => Ok(AxisName::GammaD21),
            "phi" => Ok(AxisName::Phi),
            "alpha_l" => Ok(AxisName::AlphaL),
            other => Err(SweepError::InvalidAxis(format!(
                "unknown axis name {other:?} (expected delta, delta_b, gamma_d_21, \
                 phi, or alpha_l)"
            ))),
        }
    }
}

/// A uniformly spaced sweep axis with at least two points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepAxis {
    name: AxisName,
    start: f64,
    stop: f64,
    count: usize,
}

impl SweepAxis {
    /// Validates and builds an axis (`start < stop`, `count ≥ 2`, finite
    /// bounds).
    pub fn new(name: AxisName, start: f64, stop: f64, count: usize) -> Result<Self, SweepError> {
        if !start.is_finite() || !stop.is_finite() {
            return Err(SweepError::InvalidAxis(format!(
                "{name}: bounds must be finite, got {start}..{stop}"
            )));
        }
        if start.is_nan() || stop.is_nan() || start >= stop {
            return Err(SweepError::InvalidAxis(format!(
                "{name}: start {start} must be strictly below stop {stop}"
            )));
        }
        if count < 2 {
            return Err(SweepError::InvalidAxis(format!(
                "{name}: need at least 2 grid points, got {count}"
            )));
        }
        Ok(Self {
            name,
            start,
            stop,
            count,
        })
    }

    /// The swept quantity.
    pub fn name(&self) -> AxisName {
        self.name
    }

    /// Lower bound (inclusive).
    pub fn start(&self) -> f64 {
        self.start
    }

    /// Upper bound (inclusive).
    pub fn stop(&self) -> f64 {
        self.stop
    }

    /// Number of grid points.
    pub fn count(&self) -> usize {
        self.count
    }

    /// The k-th grid value; endpoints are hit exactly.
    pub fn value_at(&self, k: usize) -> f64 {
        debug_assert!(k < self.count);
        if k == self.count - 1 {
            self.stop
        } else {
            self.start + (self.stop - self.start) * (k as f64 / (self.count - 1) as f64)
        }
    }

    /// All grid values in order.
    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.value_at(k)).collect()
    }
}

/// Writes an axis value into the parameter set (or the optical depth).
fn apply_axis_value(p: &mut SystemParams, alpha_l: &mut f64, name: AxisName, value: f64) {
    match name {
        AxisName::Delta => {
            p.delta_p = value;
            p.delta_pi = value;
        }
        AxisName::DeltaB => p.delta_b = value,
        AxisName::GammaD21 => p.gamma_d_21 = value,
        AxisName::Phi => p.phi = value,
        AxisName::AlphaL => *alpha_l = value,
    }
}

/// One grid point: its axis coordinates and either the full observable set
/// or the error that prevented evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// Value of the first (outer) axis.
    pub axis1: f64,
    /// Value of the second (inner) axis, for 2D sweeps.
    pub axis2: Option<f64>,
    /// Observables, or the per-point failure.
    pub outcome: Result<PointObservables, MethodError>,
}

impl SweepRow {
    /// Bare-word status: `ok` or the error's stable identifier.
    pub fn status(&self) -> &'static str {
        match &self.outcome {
            Ok(_) => "ok",
            Err(e) => e.status_word(),
        }
    }
}

/// Result table of a sweep, in grid order (outer axis major).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// First (outer) axis.
    pub axis1: SweepAxis,
    /// Second (inner) axis, for 2D sweeps.
    pub axis2: Option<SweepAxis>,
    /// One row per grid point.
    pub rows: Vec<SweepRow>,
}

/// Evaluates the observables over a 1D or 2D grid.
///
/// Each point applies the axis values on top of `base` (and `alpha_l` when
/// the depth is swept) and runs the chosen strategy. Points are evaluated in
/// parallel on the ambient rayon pool; run inside
/// `rayon::ThreadPool::install` to pin the worker count. Per-point failures
/// are recorded in the row status, so a sweep only fails as a whole on setup
/// errors.
pub fn run_sweep(
    base: &SystemParams,
    axes: &[SweepAxis],
    alpha_l: f64,
    method: &dyn SteadyStateMethod,
) -> Result<SweepResult, SweepError> {
    let (axis1, axis2) = match axes {
        [a] => (*a, None),
        [a, b] => (*a, Some(*b)),
        _ => return Err(SweepError::AxisCount(axes.len())),
    };
    let points =
        axis1.count() as u128 * axis2.map(|a| a.count() as u128).unwrap_or(1);
    if points > MAX_GRID_POINTS {
        return Err(SweepError::GridTooLarge { points });
    }

    let coordinates: Vec<(f64, Option<f64>)> = match axis2 {
        None => axis1.values().into_iter().map(|v| (v, None)).collect(),
        Some(inner) => {
            let inner_values = inner.values();
            axis1
                .values()
                .into_iter()
                .flat_map(|v1| inner_values.iter().map(move |&v2| (v1, Some(v2))))
                .collect()
        }
    };

    let rows: Vec<SweepRow> = coordinates
        .into_par_iter()
        .map(|(v1, v2)| {
            let mut p = *base;
            let mut depth = alpha_l;
            apply_axis_value(&mut p, &mut depth, axis1.name(), v1);
            if let (Some(inner), Some(v2)) = (axis2, v2) {
                apply_axis_value(&mut p, &mut depth, inner.name(), v2);
            }
            SweepRow {
                axis1: v1,
                axis2: v2,
                outcome: method.evaluate(&p, depth),
            }
        })
        .collect();

    Ok(SweepResult { axis1, axis2, rows })
}

/// Identifier of a bundled scenario preset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    /// Susceptibility spectra vs detuning, with and without ground-state
    /// dephasing.
    Fig2,
    /// Transmitted intensities vs detuning at three optical depths.
    Fig3,
    /// Susceptibilities vs ground-state dephasing rate, on and off resonance.
    Fig4,
    /// Susceptibilities vs relative drive phase.
    Fig5,
    /// Transmitted intensities vs magnetic splitting (closed form).
    Fig6,
    /// Transmitted intensities over the (splitting, depth) plane (closed
    /// form).
    Fig7,
}

impl FigureId {
    /// All presets in order.
    pub const ALL: [FigureId; 6] = [
        FigureId::Fig2,
        FigureId::Fig3,
        FigureId::Fig4,
        FigureId::Fig5,
        FigureId::Fig6,
        FigureId::Fig7,
    ];

    /// Stable name (`fig2` … `fig7`).
    pub fn as_str(&self) -> &'static str {
        match self {
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
            FigureId::Fig7 => "fig7",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureId {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FigureId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| SweepError::UnknownFigure(s.to_string()))
    }
}

/// One parameter variant of a preset (e.g. the dephasing strengths compared
/// within a single scenario).
#[derive(Debug, Clone, PartialEq)]
pub struct FigureVariant {
    /// Filename fragment identifying the variant; empty for single-variant
    /// presets.
    pub label: String,
    /// Full parameter set of the variant.
    pub params: SystemParams,
}

/// A bundled scenario: base parameters, sweep axes, optical depths, and the
/// strategy to evaluate with.
#[derive(Debug, Clone, PartialEq)]
pub struct FigurePreset {
    /// Which preset this is.
    pub id: FigureId,
    /// Base parameter set (equals the first variant's parameters).
    pub base: SystemParams,
    /// One or two sweep axes.
    pub axes: Vec<SweepAxis>,
    /// Optical depths to evaluate; a single 0.0 entry for presets that only
    /// report susceptibilities, and unused when `alpha_l` is itself an axis.
    pub alpha_l: Vec<f64>,
    /// Registry name of the evaluation strategy.
    pub method: &'static str,
    /// Parameter variants; always at least one.
    pub variants: Vec<FigureVariant>,
}

impl FigurePreset {
    /// Whether the optical depth is one of the sweep axes.
    pub fn sweeps_alpha_l(&self) -> bool {
        self.axes.iter().any(|a| a.name() == AxisName::AlphaL)
    }

    /// Number of output tables (variants × depths).
    pub fn combination_count(&self) -> usize {
        self.variants.len() * if self.sweeps_alpha_l() { 1 } else { self.alpha_l.len() }
    }
}

/// Returns the bundled scenario preset for `id`.
///
/// All presets share the symmetric-drive operating point Ω = Ωπ = 1γ,
/// γ = 1γ, γ' = 0.01γ. The detuned scenarios add the excited-state
/// dephasing γᵈ43 = 0.05γ; the closed-form scenarios (fig6, fig7) keep all
/// dephasings at zero, as their regime requires. Axis ranges that the
/// scenario definitions leave open use documented defaults: detuning
/// −20γ…20γ, ground dephasing 0…0.5γ, splitting 0…10γ, depth 0…100.
pub fn figure_preset(id: FigureId) -> FigurePreset {
    let grid = DEFAULT_GRID_POINTS;
    let axis = |name: AxisName, start: f64, stop: f64| {
        SweepAxis::new(name, start, stop, grid).expect("preset axes are valid")
    };
    let gamma_d_21_variants = |base: SystemParams| {
        vec![
            FigureVariant {
                label: "gamma21-0".into(),
                params: base,
            },
            FigureVariant {
                label: "gamma21-0.05".into(),
                params: SystemParams {
                    gamma_d_21: 0.05,
                    ..base
                },
            },
        ]
    };

    match id {
        FigureId::Fig2 => {
            let base = SystemParams {
                delta_b: 9.0,
                gamma_d_43: 0.05,
                ..SystemParams::default()
            };
            FigurePreset {
                id,
                base,
                axes: vec![axis(AxisName::Delta, -20.0, 20.0)],
                alpha_l: vec![0.0],
                method: "numeric",
                variants: gamma_d_21_variants(base),
            }
        }
        FigureId::Fig3 => {
            let base = SystemParams {
                delta_b: 9.0,
                gamma_d_43: 0.05,
                ..SystemParams::default()
            };
            FigurePreset {
                id,
                base,
                axes: vec![axis(AxisName::Delta, -20.0, 20.0)],
                alpha_l: vec![30.0, 58.0, 85.0],
                method: "numeric",
                variants: gamma_d_21_variants(base),
            }
        }
        FigureId::Fig4 => {
            let base = SystemParams {
                delta_b: 1.0,
                gamma_d_43: 0.05,
                ..SystemParams::default()
            };
            FigurePreset {
                id,
                base,
                axes: vec![axis(AxisName::GammaD21, 0.0, 0.5)],
                alpha_l: vec![0.0],
                method: "numeric",
                variants: vec![
                    FigureVariant {
                        label: "delta-0".into(),
                        params: base,
                    },
                    FigureVariant {
                        label: "delta-1".into(),
                        params: SystemParams {
                            delta_p: 1.0,
                            delta_pi: 1.0,
                            ..base
                        },
                    },
                ],
            }
        }
        FigureId::Fig5 => {
            let base = SystemParams {
                delta_b: 5.0,
                gamma_d_43: 0.05,
                ..SystemParams::default()
            };
            FigurePreset {
                id,
                base,
                axes: vec![axis(AxisName::Phi, 0.0, std::f64::consts::TAU)],
                alpha_l: vec![30.0],
                method: "numeric",
                variants: vec![FigureVariant {
                    label: String::new(),
                    params: base,
                }],
            }
        }
        FigureId::Fig6 => {
            let base = SystemParams::default();
            FigurePreset {
                id,
                base,
                axes: vec![axis(AxisName::DeltaB, 0.0, 10.0)],
                alpha_l: vec![45.0],
                method: "analytic",
                variants: vec![FigureVariant {
                    label: String::new(),
                    params: base,
                }],
            }
        }
        FigureId::Fig7 => {
            let base = SystemParams::default();
            FigurePreset {
                id,
                base,
                axes: vec![
                    axis(AxisName::DeltaB, 0.0, 10.0),
                    axis(AxisName::AlphaL, 0.0, 100.0),
                ],
                alpha_l: vec![0.0],
                method: "analytic",
                variants: vec![FigureVariant {
                    label: String::new(),
                    params: base,
                }],
            }
        }
    }
}
