//! Probe-detuning sweeps of the normalized response observables.
//!
//! Rows are independent, so the sweep is evaluated data-parallel when the
//! `parallel` feature (default) is enabled; the sequential path always
//! exists and produces the same rows in the same order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{ProbeDrive, SystemParams};
use crate::response::probe_response;
use crate::steady_state::SteadyState;

/// Default sweep half-width in units of kappa; covers every feature of the
/// response up to G = 6 kappa.
pub const DEFAULT_SWEEP_HALF_WIDTH: f64 = 10.0;
/// Default number of sweep points.
pub const DEFAULT_SWEEP_POINTS: usize = 2001;

/// Normalized observables at one probe detuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    /// Probe detuning (rad/s).
    pub x: f64,
    pub out_norm_l: f64,
    pub out_norm_r: f64,
    pub cavity_norm: f64,
    pub mech_norm: f64,
    pub phi_plus_norm: f64,
    pub phi_minus_norm: f64,
}

/// Inclusive linear grid with at least two points.
pub fn linspace(min: f64, max: f64, points: usize) -> Result<Vec<f64>> {
    if !(min.is_finite() && max.is_finite() && min < max) {
        return Err(Error::InvalidParams(format!(
            "invalid grid range [{min}, {max}]"
        )));
    }
    if points < 2 {
        return Err(Error::InvalidParams(format!(
            "need >= 2 grid points, got {points}"
        )));
    }
    let step = (max - min) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            if i + 1 == points {
                max
            } else {
                min + step * i as f64
            }
        })
        .collect())
}

fn row_at(
    params: &SystemParams,
    op: &SteadyState,
    eps_l: Complex64,
    eps_r: Complex64,
    x: f64,
) -> Result<SweepRow> {
    let r = probe_response(params, op, &ProbeDrive { eps_l, eps_r, x })?;
    Ok(SweepRow {
        x,
        out_norm_l: r.out_norm_l,
        out_norm_r: r.out_norm_r,
        cavity_norm: r.cavity_norm,
        mech_norm: r.mech_norm,
        phi_plus_norm: r.phi_plus_norm,
        phi_minus_norm: r.phi_minus_norm,
    })
}

/// Sequential sweep evaluation.
pub fn sweep_response_seq(
    params: &SystemParams,
    op: &SteadyState,
    eps_l: Complex64,
    eps_r: Complex64,
    xs: &[f64],
) -> Result<Vec<SweepRow>> {
    xs.iter()
        .map(|&x| row_at(params, op, eps_l, eps_r, x))
        .collect()
}

/// Parallel sweep evaluation; row order follows `xs` regardless of the
/// scheduling.
#[cfg(feature = "parallel")]
pub fn sweep_response_par(
    params: &SystemParams,
    op: &SteadyState,
    eps_l: Complex64,
    eps_r: Complex64,
    xs: &[f64],
) -> Result<Vec<SweepRow>> {
    xs.par_iter()
        .map(|&x| row_at(params, op, eps_l, eps_r, x))
        .collect()
}

/// Sweep the response over the given detunings, parallel when built with
/// the `parallel` feature.
pub fn sweep_response(
    params: &SystemParams,
    op: &SteadyState,
    eps_l: Complex64,
    eps_r: Complex64,
    xs: &[f64],
) -> Result<Vec<SweepRow>> {
    #[cfg(feature = "parallel")]
    {
        sweep_response_par(params, op, eps_l, eps_r, xs)
    }
    #[cfg(not(feature = "parallel"))]
    {
        sweep_response_seq(params, op, eps_l, eps_r, xs)
    }
}
