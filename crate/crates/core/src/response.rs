//! Linearized probe response in the frequency domain: intracavity
//! amplitudes, two-port output fields, perfect-absorption conditions,
//! energy partition and the normal-mode decomposition.
//!
//! With K = 2 kappa + kappa0 - i x and Gamma = gamma_m/2 - i x the probe
//! components are
//!
//!   dc_+ = (eps_L + eps_R) Gamma / (K Gamma + G^2),
//!   db_+ = -i g c_s* (eps_L + eps_R) / (K Gamma + G^2),
//!
//! and each port obeys eps_out = 2 kappa dc_+ - eps_in. Both outputs vanish
//! when eps_R = eps_L, gamma_m = 4 kappa_eff and x = +-sqrt(G^2 - 4
//! kappa_eff^2), kappa_eff = kappa - kappa0/2.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{effective_kappa, ProbeDrive, SystemParams};
use crate::steady_state::SteadyState;

/// Relative sideband mismatch above which the rotating-wave response
/// formulas should not be trusted.
pub const SIDEBAND_MISMATCH_WARN: f64 = 1e-6;

/// Probe response at a single detuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeResponse {
    /// Cavity fluctuation amplitude at the probe frequency.
    pub dc_plus: Complex64,
    /// Mechanical fluctuation amplitude at the probe frequency.
    pub db_plus: Complex64,
    /// Output amplitude, left port, probe frequency.
    pub out_l_plus: Complex64,
    /// Output amplitude, right port, probe frequency.
    pub out_r_plus: Complex64,
    /// Output at the image frequency 2 omega_c - omega_p; identically zero
    /// in the rotating-wave approximation.
    pub out_l_minus: Complex64,
    pub out_r_minus: Complex64,
    /// 4 kappa^2 |dc_+|^2 / (|eps_L|^2 + |eps_R|^2).
    pub cavity_norm: f64,
    /// 4 kappa^2 |db_+|^2 / (|eps_L|^2 + |eps_R|^2).
    pub mech_norm: f64,
    /// |eps_outL_+ / eps_L|^2 and |eps_outR_+ / eps_L|^2.
    pub out_norm_l: f64,
    pub out_norm_r: f64,
    /// 4 kappa^2 |Phi_+-|^2 / (|eps_L|^2 + |eps_R|^2) for the normal modes
    /// Phi_+- = (db_+ +- dc_+)/sqrt(2) taken after the coupling phase is
    /// removed.
    pub phi_plus_norm: f64,
    pub phi_minus_norm: f64,
}

/// Probe detunings at which both outputs vanish, for gamma_m = 4 kappa_eff
/// and equal probe inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IeitPoint {
    /// Negative-branch detuning -sqrt(G^2 - 4 kappa_eff^2); NaN when the
    /// condition cannot be met.
    pub x_minus: f64,
    /// Positive-branch detuning; NaN when the condition cannot be met.
    pub x_plus: f64,
    /// Mechanical damping the conditions demand, 4 kappa_eff.
    pub gamma_m_required: f64,
    /// Whether G >= 2 kappa_eff, i.e. real absorption detunings exist.
    pub exists: bool,
}

/// Response denominator K Gamma + G^2 continued to complex probe detuning.
pub fn response_denominator(params: &SystemParams, op: &SteadyState, x: Complex64) -> Complex64 {
    let ix = Complex64::new(0.0, 1.0) * x;
    let k = Complex64::new(params.total_cavity_damping(), 0.0) - ix;
    let gam = Complex64::new(0.5 * params.gamma_m, 0.0) - ix;
    k * gam + op.g_eff * op.g_eff
}

/// Evaluate the probe response at the drive's detuning.
pub fn probe_response(
    params: &SystemParams,
    op: &SteadyState,
    drive: &ProbeDrive,
) -> Result<ProbeResponse> {
    params.validate()?;
    drive.validate()?;

    let den = response_denominator(params, op, Complex64::new(drive.x, 0.0));
    if den.norm_sqr() == 0.0 {
        return Err(Error::SingularResponse);
    }
    let gam = Complex64::new(0.5 * params.gamma_m, -drive.x);
    let s = drive.eps_l + drive.eps_r;

    let dc = s * gam / den;
    let db = -Complex64::i() * params.g * op.c_s.conj() * s / den;
    // Rotating away the phase of the pump-enhanced coupling g c_s leaves a
    // purely -iG coupling; the rotated mechanical amplitude is then
    let db_rot = -Complex64::i() * op.g_eff * s / den;
    let sqrt_half = std::f64::consts::FRAC_1_SQRT_2;
    let phi_plus = (db_rot + dc) * sqrt_half;
    let phi_minus = (db_rot - dc) * sqrt_half;

    let two_kappa = 2.0 * params.kappa;
    let out_l = two_kappa * dc - drive.eps_l;
    let out_r = two_kappa * dc - drive.eps_r;

    let total_in = drive.total_input();
    let norm = two_kappa * two_kappa / total_in;
    let eps_l_sq = drive.eps_l.norm_sqr();

    Ok(ProbeResponse {
        dc_plus: dc,
        db_plus: db,
        out_l_plus: out_l,
        out_r_plus: out_r,
        out_l_minus: Complex64::new(0.0, 0.0),
        out_r_minus: Complex64::new(0.0, 0.0),
        cavity_norm: norm * dc.norm_sqr(),
        mech_norm: norm * db.norm_sqr(),
        out_norm_l: out_l.norm_sqr() / eps_l_sq,
        out_norm_r: out_r.norm_sqr() / eps_l_sq,
        phi_plus_norm: norm * phi_plus.norm_sqr(),
        phi_minus_norm: norm * phi_minus.norm_sqr(),
    })
}

/// Perfect-absorption conditions for the operating point's coupling.
pub fn ieit_conditions(params: &SystemParams, op: &SteadyState) -> Result<IeitPoint> {
    params.validate()?;
    let k_eff = effective_kappa(params)?;
    let g_eff = op.g_eff;
    let exists = g_eff >= 2.0 * k_eff;
    let x_plus = if exists {
        (g_eff * g_eff - 4.0 * k_eff * k_eff).max(0.0).sqrt()
    } else {
        f64::NAN
    };
    Ok(IeitPoint {
        x_minus: -x_plus,
        x_plus,
        gamma_m_required: 4.0 * k_eff,
        exists,
    })
}

/// Fraction of the incoming probe power absorbed by the system,
/// 1 - (|out_L|^2 + |out_R|^2) / (|eps_L|^2 + |eps_R|^2).
pub fn absorption_fraction(
    params: &SystemParams,
    op: &SteadyState,
    drive: &ProbeDrive,
) -> Result<f64> {
    let total_in = drive.total_input();
    if total_in == 0.0 {
        return Err(Error::ZeroInput);
    }
    let r = probe_response(params, op, drive)?;
    Ok(1.0 - (r.out_l_plus.norm_sqr() + r.out_r_plus.norm_sqr()) / total_in)
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    if flo == 0.0 {
        return lo;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn roots_by_bisection<F: Fn(f64) -> f64>(f: F, xs: &[f64]) -> Vec<f64> {
    let mut roots = Vec::new();
    for w in xs.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (fa, fb) = (f(a), f(b));
        if fa == 0.0 {
            roots.push(a);
        } else if (fa > 0.0) != (fb > 0.0) {
            roots.push(bisect(&f, a, b));
        }
    }
    roots
}

/// Numerically locate every detuning in `[x_min, x_max]` at which the
/// left-port output vanishes. Both the real and the imaginary part of the
/// complex output must cross zero; candidates come from sign-bracketed
/// bisection of each part and are kept when the output magnitude collapses.
pub fn find_absorption_zeros(
    params: &SystemParams,
    op: &SteadyState,
    drive: &ProbeDrive,
    x_min: f64,
    x_max: f64,
) -> Result<Vec<f64>> {
    params.validate()?;
    drive.validate()?;
    if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
        return Err(Error::InvalidParams(format!(
            "invalid detuning range [{x_min}, {x_max}]"
        )));
    }

    let out_at = |x: f64| -> Complex64 {
        let d = ProbeDrive { x, ..*drive };
        match probe_response(params, op, &d) {
            Ok(r) => r.out_l_plus,
            Err(_) => Complex64::new(f64::NAN, f64::NAN),
        }
    };

    let n = (200.0 * (x_max - x_min) / params.kappa)
        .ceil()
        .clamp(1000.0, 200_000.0) as usize;
    let xs: Vec<f64> = (0..=n)
        .map(|i| x_min + (x_max - x_min) * i as f64 / n as f64)
        .collect();

    let mut candidates = roots_by_bisection(|x| out_at(x).re, &xs);
    candidates.extend(roots_by_bisection(|x| out_at(x).im, &xs));
    candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let accept = 1e-10 * drive.total_input().sqrt();
    let mut zeros: Vec<f64> = Vec::new();
    for x in candidates {
        if out_at(x).norm() > accept {
            continue;
        }
        match zeros.last() {
            Some(&prev) if (x - prev).abs() <= 1e-8 * params.kappa => {}
            _ => zeros.push(x),
        }
    }
    Ok(zeros)
}

/// Complex detunings at which the response denominator vanishes, found by
/// simultaneous (Durand-Kerner) iteration on the monic quadratic; sorted by
/// real part ascending.
pub fn response_poles(params: &SystemParams, op: &SteadyState) -> [Complex64; 2] {
    // Denominator = -(x^2 + c1 x + c0).
    let a = params.total_cavity_damping();
    let b = 0.5 * params.gamma_m;
    let c1 = Complex64::new(0.0, a + b);
    let c0 = Complex64::new(-(a * b + op.g_eff * op.g_eff), 0.0);
    let p = |z: Complex64| (z + c1) * z + c0;

    let scale = c0.norm().sqrt().max(c1.norm()).max(1e-30);
    let seed = Complex64::new(0.4, 0.9);
    let mut z0 = seed * scale;
    let mut z1 = seed * seed * scale;
    for _ in 0..200 {
        let d0 = z0 - z1;
        let step0 = if d0.norm_sqr() > 0.0 {
            p(z0) / d0
        } else {
            Complex64::new(0.0, 0.0)
        };
        z0 -= step0;
        let d1 = z1 - z0;
        let step1 = if d1.norm_sqr() > 0.0 {
            p(z1) / d1
        } else {
            Complex64::new(0.0, 0.0)
        };
        z1 -= step1;
        if step0.norm() + step1.norm() < 1e-15 * scale {
            break;
        }
    }
    if z0.re <= z1.re {
        [z0, z1]
    } else {
        [z1, z0]
    }
}

/// Relative detuning of the operating point from the red sideband; response
/// formulas assume this is small.
pub fn sideband_mismatch(params: &SystemParams, op: &SteadyState) -> f64 {
    (op.delta - params.omega_m).abs() / params.omega_m
}
