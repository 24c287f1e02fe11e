//! Self-consistent classical operating point of the pumped cavity.
//!
//! Eliminating the mechanical displacement from the pair of fixed-point
//! equations leaves a cubic in the intracavity photon number u = |c_s|^2:
//!
//!   u * (d^2 + (Delta_0 - beta u)^2) = |eps_c|^2,
//!
//! with d = 2 kappa + kappa0 the total cavity amplitude damping and
//! beta = 2 g^2 omega_m / (gamma_m^2/4 + omega_m^2) the radiation-pressure
//! back-action coefficient. One or three physical branches; the
//! negative-slope branch is unstable.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{amplitude_from_power, Pump, SystemParams};

/// Relative spacing below which two cubic roots are treated as a fold
/// (double root). Distinct branches in the bistable window are separated
/// by many orders more than this.
const FOLD_MERGE_TOL: f64 = 1e-6;

/// One self-consistent operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    /// Intracavity pump amplitude c_s.
    pub c_s: Complex64,
    /// Mechanical coherent amplitude b_s.
    pub b_s: Complex64,
    /// Effective detuning Delta = Delta_0 + g (b_s + b_s*).
    pub delta: f64,
    /// Effective coupling G = g |c_s|.
    pub g_eff: f64,
    /// Branch stability (cubic slope sign and drift-matrix check).
    pub stable: bool,
    /// Bare detuning Delta_0 consistent with this point.
    pub delta0: f64,
}

impl SteadyState {
    /// Intracavity pump photon number |c_s|^2.
    pub fn photon_number(&self) -> f64 {
        self.c_s.norm_sqr()
    }
}

/// Residual of the photon-number fixed point,
/// u (d^2 + (Delta_0 - beta u)^2) - e_pump, with e_pump = |eps_c|^2.
/// Sign changes of this function bracket the steady-state branches.
pub fn pump_balance_residual(params: &SystemParams, e_pump: f64, u: f64) -> f64 {
    let d = params.total_cavity_damping();
    let det = params.delta0 - params.backaction_beta() * u;
    u * (d * d + det * det) - e_pump
}

fn residual_slope(params: &SystemParams, u: f64) -> f64 {
    let d = params.total_cavity_damping();
    let beta = params.backaction_beta();
    let det = params.delta0 - beta * u;
    d * d + det * det - 2.0 * beta * u * det
}

/// All real non-negative roots of the pump-balance cubic, ascending.
/// Closed-form solve with a two-step Newton polish on each root; a double
/// root at a fold is merged to a single entry.
pub fn photon_number_roots(params: &SystemParams, e_pump: f64) -> Vec<f64> {
    let d = params.total_cavity_damping();
    let beta = params.backaction_beta();
    let delta0 = params.delta0;
    let lorentz = d * d + delta0 * delta0;

    if e_pump == 0.0 {
        return vec![0.0];
    }
    if beta == 0.0 {
        return vec![e_pump / lorentz];
    }

    // Monic cubic u^3 + p u^2 + q u + r = 0.
    let p = -2.0 * delta0 / beta;
    let q = lorentz / (beta * beta);
    let r = -e_pump / (beta * beta);

    // Depressed form v^3 + a v + b with u = v - p/3.
    let a = q - p * p / 3.0;
    let b = 2.0 * p * p * p / 27.0 - p * q / 3.0 + r;
    let shift = -p / 3.0;

    let disc = -4.0 * a * a * a - 27.0 * b * b;
    let mut roots: Vec<f64> = if disc > 0.0 {
        // Three real roots: trigonometric form.
        let m = 2.0 * (-a / 3.0).sqrt();
        let arg = (3.0 * b / (a * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        (0..3)
            .map(|k| m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() + shift)
            .collect()
    } else {
        // One real root: Cardano with the cancellation-free branch.
        let s = (b * b / 4.0 + a * a * a / 27.0).max(0.0).sqrt();
        let w = if b <= 0.0 {
            (-b / 2.0 + s).cbrt()
        } else {
            (-b / 2.0 - s).cbrt()
        };
        let v = if w == 0.0 { 0.0 } else { w - a / (3.0 * w) };
        vec![v + shift]
    };

    // Newton polish against the unexpanded residual.
    for u in roots.iter_mut() {
        for _ in 0..2 {
            let f = pump_balance_residual(params, e_pump, *u);
            let fp = residual_slope(params, *u);
            if fp != 0.0 {
                let step = f / fp;
                if step.is_finite() {
                    *u -= step;
                }
            }
        }
        if *u < 0.0 {
            *u = 0.0;
        }
    }
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());

    // Merge a near-degenerate pair at a fold.
    let mut merged: Vec<f64> = Vec::with_capacity(roots.len());
    for u in roots {
        match merged.last() {
            Some(&prev) if (u - prev).abs() <= FOLD_MERGE_TOL * u.abs().max(prev.abs()) => {}
            _ => merged.push(u),
        }
    }
    merged
}

/// Eigenvalues of the rotating-wave drift matrix for coupling G.
pub fn drift_eigenvalues(params: &SystemParams, g_eff: f64) -> [Complex64; 2] {
    let a = params.total_cavity_damping();
    let b = 0.5 * params.gamma_m;
    let disc = Complex64::new((a - b) * (a - b) - 4.0 * g_eff * g_eff, 0.0).sqrt();
    let half = Complex64::new(-(a + b), 0.0);
    [(half + disc) / 2.0, (half - disc) / 2.0]
}

/// Both drift eigenvalues strictly in the left half plane.
pub fn drift_matrix_stable(params: &SystemParams, g_eff: f64) -> bool {
    drift_eigenvalues(params, g_eff).iter().all(|l| l.re < 0.0)
}

/// Stability flag per ascending root: positive cubic slope and a stable
/// drift matrix. A fold (vanishing slope) is marked unstable.
pub fn branch_stability(params: &SystemParams, roots: &[f64]) -> Vec<bool> {
    let d = params.total_cavity_damping();
    let beta = params.backaction_beta();
    roots
        .iter()
        .map(|&u| {
            let det = params.delta0 - beta * u;
            let scale = d * d + det * det + 2.0 * beta * u.abs() * det.abs();
            let slope = residual_slope(params, u);
            let g_eff = params.g.abs() * u.max(0.0).sqrt();
            slope > 1e-9 * scale && drift_matrix_stable(params, g_eff)
        })
        .collect()
}

fn state_from_root(params: &SystemParams, eps_c: Complex64, u: f64, stable: bool) -> SteadyState {
    let d = params.total_cavity_damping();
    let delta = params.delta0 - params.backaction_beta() * u;
    let c_s = eps_c / Complex64::new(d, delta);
    let cs_sq = c_s.norm_sqr();
    let b_s = Complex64::new(0.0, -params.g * cs_sq)
        / Complex64::new(0.5 * params.gamma_m, params.omega_m);
    SteadyState {
        c_s,
        b_s,
        delta,
        g_eff: params.g.abs() * cs_sq.sqrt(),
        stable,
        delta0: params.delta0,
    }
}

fn pump_amplitude(params: &SystemParams) -> Result<Complex64> {
    match params.pump {
        Pump::Amplitude(e) => Ok(e),
        Pump::Power(p) => Ok(Complex64::new(amplitude_from_power(params, p)?, 0.0)),
        Pump::Coupling(_) => Err(Error::Pump(
            "pump given as G fixes the operating point directly; use fix_operating_point".into(),
        )),
    }
}

/// Solve the pump-balance cubic for the given parameters and return every
/// physical branch as a full [`SteadyState`], ascending in |c_s|^2.
pub fn solve_steady_states(params: &SystemParams) -> Result<Vec<SteadyState>> {
    params.validate()?;
    let eps_c = pump_amplitude(params)?;
    let roots = photon_number_roots(params, eps_c.norm_sqr());
    let stab = branch_stability(params, &roots);
    Ok(roots
        .into_iter()
        .zip(stab)
        .map(|(u, s)| state_from_root(params, eps_c, u, s))
        .collect())
}

/// Operating point with the effective detuning pinned to the red sideband,
/// Delta = omega_m. The bare detuning that makes this self-consistent,
/// Delta_0 = omega_m + beta |c_s|^2, is computed and reported in the result;
/// `params.delta0` is ignored.
pub fn fix_operating_point(params: &SystemParams) -> Result<SteadyState> {
    params.validate()?;
    let d = params.total_cavity_damping();
    let lorentz = d * d + params.omega_m * params.omega_m;
    // A directly specified G is kept exactly; the other pump routes derive
    // it from the reconstructed amplitude.
    let mut given_g_eff = None;
    let eps_c: Complex64 = match params.pump {
        Pump::Coupling(g_eff) => {
            given_g_eff = Some(g_eff);
            if g_eff == 0.0 {
                Complex64::new(0.0, 0.0)
            } else if params.g == 0.0 {
                return Err(Error::Pump("cannot reach G > 0 with g = 0".into()));
            } else {
                Complex64::new(g_eff / params.g.abs() * lorentz.sqrt(), 0.0)
            }
        }
        Pump::Power(p) => Complex64::new(amplitude_from_power(params, p)?, 0.0),
        Pump::Amplitude(e) => e,
    };

    let c_s = eps_c / Complex64::new(d, params.omega_m);
    let cs_sq = c_s.norm_sqr();
    let b_s = Complex64::new(0.0, -params.g * cs_sq)
        / Complex64::new(0.5 * params.gamma_m, params.omega_m);
    let beta = params.backaction_beta();
    // Slope of the pump-balance residual at this root, with Delta = omega_m.
    let slope = d * d + params.omega_m * params.omega_m - 2.0 * beta * cs_sq * params.omega_m;
    let g_eff = given_g_eff.unwrap_or_else(|| params.g.abs() * cs_sq.sqrt());
    Ok(SteadyState {
        c_s,
        b_s,
        delta: params.omega_m,
        g_eff,
        stable: slope > 0.0 && drift_matrix_stable(params, g_eff),
        delta0: params.omega_m + beta * cs_sq,
    })
}

/// Largest relative residual of the two fixed-point equations for a state,
/// recomputing the effective detuning from b_s. Pump given as G is exact by
/// construction and reports the c_s equation against the implied amplitude.
pub fn fixed_point_residual(params: &SystemParams, state: &SteadyState) -> f64 {
    let d = params.total_cavity_damping();
    let delta_check = state.delta0 + params.g * 2.0 * state.b_s.re;
    let eps_c = match pump_amplitude(params) {
        Ok(e) => e,
        Err(_) => state.c_s * Complex64::new(d, state.delta),
    };
    let c_pred = eps_c / Complex64::new(d, delta_check);
    let r_c = (state.c_s - c_pred).norm() / state.c_s.norm().max(f64::MIN_POSITIVE);
    let b_pred = Complex64::new(0.0, -params.g * state.c_s.norm_sqr())
        / Complex64::new(0.5 * params.gamma_m, params.omega_m);
    let r_b = (state.b_s - b_pred).norm() / state.b_s.norm().max(f64::MIN_POSITIVE);
    r_c.max(r_b)
}
