//! Time-domain integration of the mean-value equations: the rotating-wave
//! form, the full form with counter-rotating terms, steady-amplitude
//! extraction, and the Q-switch energy-release scenario.
//!
//! Integration is fixed-step classical RK4; no adaptive stepping, so a
//! given configuration always reproduces the same trajectory bit for bit.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{ProbeDrive, SystemParams};
use crate::steady_state::{drift_eigenvalues, SteadyState};

/// Time series of the mean fluctuation amplitudes with the output-field
/// record eps_out_alpha(t) = 2 kappa <dc>(t) - eps_alpha(t).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub db: Vec<Complex64>,
    pub dc: Vec<Complex64>,
    pub out_l: Vec<Complex64>,
    pub out_r: Vec<Complex64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// |db|^2 + |dc|^2 per sample.
    pub fn stored_quanta(&self) -> Vec<f64> {
        self.db
            .iter()
            .zip(&self.dc)
            .map(|(b, c)| b.norm_sqr() + c.norm_sqr())
            .collect()
    }
}

/// Amplitudes of the driven steady oscillation extracted from a trajectory
/// tail by least squares on the basis {e^{-ixt}, e^{+ixt}, 1}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicFit {
    /// Coefficient of e^{-ixt}: the component driven at the probe frequency.
    pub plus: Complex64,
    /// Coefficient of e^{+ixt}; vanishes for the rotating-wave equations.
    pub minus: Complex64,
    /// Constant offset left in the window.
    pub dc_offset: Complex64,
}

/// Energy bookkeeping of a Q-switch run. All quanta integrals use the
/// photon-flux normalization |eps_out|^2 / (2 kappa) so that the budget
///
///   stored_before = emitted + dissipated_mech + dissipated_internal
///                   + stored_after
///
/// closes up to discretization error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QSwitchResult {
    pub t_switch: f64,
    pub kappa_after: f64,
    /// |db|^2 + |dc|^2 at the switch instant.
    pub stored_before: f64,
    /// Quanta leaving through the two mirror ports after the switch.
    pub emitted_quanta: f64,
    /// Quanta lost to mechanical damping after the switch.
    pub dissipated_mech: f64,
    /// Quanta lost to internal cavity loss after the switch.
    pub dissipated_internal: f64,
    /// Quanta still stored when the integration ends.
    pub stored_after: f64,
}

impl QSwitchResult {
    /// Relative error of the energy budget.
    pub fn budget_residual(&self) -> f64 {
        let rhs = self.emitted_quanta
            + self.dissipated_mech
            + self.dissipated_internal
            + self.stored_after;
        (self.stored_before - rhs).abs() / self.stored_before.max(f64::MIN_POSITIVE)
    }
}

/// Largest admissible RK4 step for the rotating-wave equations.
pub fn rwa_dt_cap(params: &SystemParams, op: &SteadyState, drive: &ProbeDrive) -> f64 {
    let rate = (params.kappa + 0.5 * params.kappa0)
        .max(0.5 * params.gamma_m)
        .max(op.g_eff)
        .max(drive.x.abs());
    0.01 / rate
}

/// Largest admissible RK4 step for the full equations, resolving the
/// counter-rotating phase omega_m + Delta.
pub fn full_dt_cap(params: &SystemParams, op: &SteadyState, drive: &ProbeDrive) -> f64 {
    let delta_p = drive.x + params.omega_m;
    let rate = (params.omega_m + op.delta)
        .max((params.omega_m - op.delta).abs())
        .max((delta_p - op.delta).abs())
        .max(params.kappa + 0.5 * params.kappa0)
        .max(0.5 * params.gamma_m)
        .max(op.g_eff)
        .max(drive.x.abs());
    0.005 / rate
}

type Rhs = Box<dyn Fn(f64, Complex64, Complex64) -> (Complex64, Complex64)>;

fn make_rwa_rhs(params: &SystemParams, op: &SteadyState, drive: &ProbeDrive) -> Rhs {
    let damp = params.total_cavity_damping();
    let half_gamma = 0.5 * params.gamma_m;
    let gcs = params.g * op.c_s;
    let gcs_conj = gcs.conj();
    let s = drive.eps_l + drive.eps_r;
    let x = drive.x;
    Box::new(move |t, b, c| {
        let db = -Complex64::i() * gcs_conj * c - half_gamma * b;
        let dc = -damp * c - Complex64::i() * gcs * b + s * Complex64::from_polar(1.0, -x * t);
        (db, dc)
    })
}

fn make_full_rhs(params: &SystemParams, op: &SteadyState, drive: &ProbeDrive) -> Rhs {
    let damp = params.total_cavity_damping();
    let half_gamma = 0.5 * params.gamma_m;
    let gcs = params.g * op.c_s;
    let gcs_conj = gcs.conj();
    let s = drive.eps_l + drive.eps_r;
    let omega_m = params.omega_m;
    let delta = op.delta;
    let drive_freq = drive.x + omega_m - delta; // delta_p - Delta
    Box::new(move |t, b, c| {
        let co = Complex64::from_polar(1.0, (delta - omega_m) * t);
        let counter = Complex64::from_polar(1.0, (delta + omega_m) * t);
        let db = -Complex64::i() * (gcs_conj * c * co.conj() + gcs * c.conj() * counter)
            - half_gamma * b;
        let dc = -damp * c - Complex64::i() * gcs * (b * co + b.conj() * counter)
            + s * Complex64::from_polar(1.0, -drive_freq * t);
        (db, dc)
    })
}

fn rk4_step(rhs: &Rhs, t: f64, dt: f64, b: Complex64, c: Complex64) -> (Complex64, Complex64) {
    let (k1b, k1c) = rhs(t, b, c);
    let (k2b, k2c) = rhs(t + 0.5 * dt, b + 0.5 * dt * k1b, c + 0.5 * dt * k1c);
    let (k3b, k3c) = rhs(t + 0.5 * dt, b + 0.5 * dt * k2b, c + 0.5 * dt * k2c);
    let (k4b, k4c) = rhs(t + dt, b + dt * k3b, c + dt * k3c);
    (
        b + dt / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b),
        c + dt / 6.0 * (k1c + 2.0 * k2c + 2.0 * k3c + k4c),
    )
}

struct DriveRecord {
    two_kappa: f64,
    eps_l: Complex64,
    eps_r: Complex64,
    freq: f64,
}

impl DriveRecord {
    fn outputs(&self, t: f64, c: Complex64) -> (Complex64, Complex64) {
        let phase = Complex64::from_polar(1.0, -self.freq * t);
        (
            self.two_kappa * c - self.eps_l * phase,
            self.two_kappa * c - self.eps_r * phase,
        )
    }
}

fn integrate(
    rhs: Rhs,
    record: DriveRecord,
    init: (Complex64, Complex64),
    t_final: f64,
    dt: f64,
    cap: f64,
    stride: usize,
) -> Result<Trajectory> {
    if !(dt.is_finite() && dt > 0.0 && t_final.is_finite() && t_final > 0.0) {
        return Err(Error::InvalidParams(format!(
            "need positive finite dt and t_final (got {dt}, {t_final})"
        )));
    }
    if dt > cap {
        return Err(Error::TimeStep { dt, cap });
    }
    let stride = stride.max(1);
    let n = (t_final / dt).round().max(1.0) as usize;

    let cap_len = n / stride + 2;
    let mut traj = Trajectory {
        t: Vec::with_capacity(cap_len),
        db: Vec::with_capacity(cap_len),
        dc: Vec::with_capacity(cap_len),
        out_l: Vec::with_capacity(cap_len),
        out_r: Vec::with_capacity(cap_len),
    };
    let mut push = |t: f64, b: Complex64, c: Complex64| {
        let (ol, or) = record.outputs(t, c);
        traj.t.push(t);
        traj.db.push(b);
        traj.dc.push(c);
        traj.out_l.push(ol);
        traj.out_r.push(or);
    };

    let (mut b, mut c) = init;
    push(0.0, b, c);
    for k in 0..n {
        let t = k as f64 * dt;
        let (nb, nc) = rk4_step(&rhs, t, dt, b, c);
        b = nb;
        c = nc;
        if !(b.is_finite() && c.is_finite()) {
            return Err(Error::NonFinite { t: t + dt });
        }
        if (k + 1) % stride == 0 || k + 1 == n {
            push((k + 1) as f64 * dt, b, c);
        }
    }
    Ok(traj)
}

/// Integrate the rotating-wave equations from zero initial fluctuations.
pub fn integrate_rwa(
    params: &SystemParams,
    op: &SteadyState,
    drive: &ProbeDrive,
    t_final: f64,
    dt: f64,
) -> Result<Trajectory> {
    integrate_rwa_from(
        params,
        op,
        drive,
        (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
        t_final,
        dt,
        1,
    )
}

/// Rotating-wave integration with explicit initial conditions and an output
/// recording stride (every step is still integrated at `dt`).
pub fn integrate_rwa_from(
    params: &SystemParams,
    op: &SteadyState,
    drive: &ProbeDrive,
    init: (Complex64, Complex64),
    t_final: f64,
    dt: f64,
    stride: usize,
) -> Result<Trajectory> {
    params.validate()?;
    drive.validate()?;
    let record = DriveRecord {
        two_kappa: 2.0 * params.kappa,
        eps_l: drive.eps_l,
        eps_r: drive.eps_r,
        freq: drive.x,
    };
    integrate(
        make_rwa_rhs(params, op, drive),
        record,
        init,
        t_final,
        dt,
        rwa_dt_cap(params, op, drive),
        stride,
    )
}

/// Integrate the full linearized equations (counter-rotating terms kept)
/// from zero initial fluctuations.
pub fn integrate_full(
    params: &SystemParams,
    op: &SteadyState,
    drive: &ProbeDrive,
    t_final: f64,
    dt: f64,
) -> Result<Trajectory> {
    integrate_full_from(
        params,
        op,
        drive,
        (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
        t_final,
        dt,
        1,
    )
}

/// Full-equation integration with explicit initial conditions and stride.
pub fn integrate_full_from(
    params: &SystemParams,
    op: &SteadyState,
    drive: &ProbeDrive,
    init: (Complex64, Complex64),
    t_final: f64,
    dt: f64,
    stride: usize,
) -> Result<Trajectory> {
    params.validate()?;
    drive.validate()?;
    let record = DriveRecord {
        two_kappa: 2.0 * params.kappa,
        eps_l: drive.eps_l,
        eps_r: drive.eps_r,
        freq: drive.x + params.omega_m - op.delta,
    };
    integrate(
        make_full_rhs(params, op, drive),
        record,
        init,
        t_final,
        dt,
        full_dt_cap(params, op, drive),
        stride,
    )
}

fn solve3(mut m: [[Complex64; 3]; 3], mut r: [Complex64; 3]) -> [Complex64; 3] {
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| m[i][col].norm().partial_cmp(&m[j][col].norm()).unwrap())
            .unwrap();
        m.swap(col, piv);
        r.swap(col, piv);
        let d = m[col][col];
        for row in col + 1..3 {
            let f = m[row][col] / d;
            for k in col..3 {
                let delta = f * m[col][k];
                m[row][k] -= delta;
            }
            r[row] -= f * r[col];
        }
    }
    let mut out = [Complex64::new(0.0, 0.0); 3];
    for col in (0..3).rev() {
        let mut acc = r[col];
        for k in col + 1..3 {
            acc -= m[col][k] * out[k];
        }
        out[col] = acc / m[col][col];
    }
    out
}

/// Least-squares projection of the tail of a sampled signal onto
/// {e^{-ixt}, e^{+ixt}, 1}. `tail_fraction` selects the final portion of
/// the record (0.2 keeps the last 20%). For |x| * window below resolution
/// the basis degenerates and the window mean is reported as `plus`.
pub fn fit_steady_amplitude(t: &[f64], y: &[Complex64], x: f64, tail_fraction: f64) -> HarmonicFit {
    assert_eq!(t.len(), y.len(), "time and signal length mismatch");
    assert!(t.len() >= 2, "need at least two samples");
    let keep = ((t.len() as f64 * tail_fraction).ceil() as usize).clamp(2, t.len());
    let start = t.len() - keep;
    let (tt, yy) = (&t[start..], &y[start..]);
    let window = tt[tt.len() - 1] - tt[0];

    if x.abs() * window < 1e-6 {
        let mean = yy.iter().sum::<Complex64>() / yy.len() as f64;
        return HarmonicFit {
            plus: mean,
            minus: Complex64::new(0.0, 0.0),
            dc_offset: Complex64::new(0.0, 0.0),
        };
    }

    let mut m = [[Complex64::new(0.0, 0.0); 3]; 3];
    let mut r = [Complex64::new(0.0, 0.0); 3];
    for (&tk, &yk) in tt.iter().zip(yy) {
        let e_minus = Complex64::from_polar(1.0, -x * tk);
        let basis = [e_minus, e_minus.conj(), Complex64::new(1.0, 0.0)];
        for j in 0..3 {
            for l in 0..3 {
                m[j][l] += basis[j].conj() * basis[l];
            }
            r[j] += basis[j].conj() * yk;
        }
    }
    let a = solve3(m, r);
    HarmonicFit {
        plus: a[0],
        minus: a[1],
        dc_offset: a[2],
    }
}

fn trapezoid_accumulate(acc: &mut f64, dt: f64, prev: f64, next: f64) {
    *acc += 0.5 * dt * (prev + next);
}

/// Drive the system at the probe until `t_switch`, then multiply the mirror
/// decay by `kappa_factor` and turn both probes off, integrating until the
/// stored energy has drained. Returns the energy bookkeeping and the full
/// trajectory (recorded with the given stride).
pub fn q_switch(
    params: &SystemParams,
    op: &SteadyState,
    drive: &ProbeDrive,
    t_switch: f64,
    kappa_factor: f64,
    stride: usize,
) -> Result<(QSwitchResult, Trajectory)> {
    params.validate()?;
    drive.validate()?;
    if !(kappa_factor.is_finite() && kappa_factor >= 1.0) {
        return Err(Error::InvalidParams(format!(
            "kappa_factor = {kappa_factor} must be >= 1"
        )));
    }
    if !(t_switch.is_finite() && t_switch >= 10.0 / params.kappa) {
        return Err(Error::InvalidParams(format!(
            "t_switch = {t_switch} must be >= 10/kappa for a settled drive"
        )));
    }

    let params_after = SystemParams {
        kappa: kappa_factor * params.kappa,
        ..params.clone()
    };
    let silent = ProbeDrive {
        eps_l: Complex64::new(0.0, 0.0),
        eps_r: Complex64::new(0.0, 0.0),
        x: drive.x,
    };

    // One step size across both phases, clear of every rate involved.
    let rate = (params_after.kappa + 0.5 * params.kappa0)
        .max(0.5 * params.gamma_m)
        .max(op.g_eff)
        .max(drive.x.abs())
        .max(params.kappa);
    let dt = 0.002 / rate;

    // Drain time from the slowest post-switch decay mode.
    let slowest = drift_eigenvalues(&params_after, op.g_eff)
        .iter()
        .map(|l| -l.re)
        .fold(f64::INFINITY, f64::min);
    let t_after = (10.0 / (params.kappa * kappa_factor)).max(16.0 / slowest);

    let stride = stride.max(1);
    let rhs_before = make_rwa_rhs(params, op, drive);
    let record_before = DriveRecord {
        two_kappa: 2.0 * params.kappa,
        eps_l: drive.eps_l,
        eps_r: drive.eps_r,
        freq: drive.x,
    };
    let n1 = (t_switch / dt).round().max(1.0) as usize;
    let n2 = (t_after / dt).round().max(1.0) as usize;

    let mut traj = Trajectory {
        t: Vec::new(),
        db: Vec::new(),
        dc: Vec::new(),
        out_l: Vec::new(),
        out_r: Vec::new(),
    };
    let mut b = Complex64::new(0.0, 0.0);
    let mut c = Complex64::new(0.0, 0.0);

    for k in 0..n1 {
        let t = k as f64 * dt;
        if k % stride == 0 {
            let (ol, or) = record_before.outputs(t, c);
            traj.t.push(t);
            traj.db.push(b);
            traj.dc.push(c);
            traj.out_l.push(ol);
            traj.out_r.push(or);
        }
        let (nb, nc) = rk4_step(&rhs_before, t, dt, b, c);
        b = nb;
        c = nc;
        if !(b.is_finite() && c.is_finite()) {
            return Err(Error::NonFinite { t: t + dt });
        }
    }

    let t_sw = n1 as f64 * dt;
    let stored_before = b.norm_sqr() + c.norm_sqr();

    let rhs_after = make_rwa_rhs(&params_after, op, &silent);
    let record_after = DriveRecord {
        two_kappa: 2.0 * params_after.kappa,
        eps_l: silent.eps_l,
        eps_r: silent.eps_r,
        freq: silent.x,
    };
    let two_kappa_after = 2.0 * params_after.kappa;

    let flux = |b: Complex64, c: Complex64| {
        let (ol, or) = record_after.outputs(0.0, c);
        let emitted = (ol.norm_sqr() + or.norm_sqr()) / two_kappa_after;
        let mech = params.gamma_m * b.norm_sqr();
        let internal = 2.0 * params.kappa0 * c.norm_sqr();
        (emitted, mech, internal)
    };

    let mut emitted = 0.0;
    let mut mech = 0.0;
    let mut internal = 0.0;
    let (mut f_em, mut f_me, mut f_in) = flux(b, c);

    for k in 0..n2 {
        let t_local = k as f64 * dt;
        if k % stride == 0 {
            let t = t_sw + t_local;
            let (ol, or) = record_after.outputs(t, c);
            traj.t.push(t);
            traj.db.push(b);
            traj.dc.push(c);
            traj.out_l.push(ol);
            traj.out_r.push(or);
        }
        let (nb, nc) = rk4_step(&rhs_after, t_local, dt, b, c);
        b = nb;
        c = nc;
        if !(b.is_finite() && c.is_finite()) {
            return Err(Error::NonFinite {
                t: t_sw + t_local + dt,
            });
        }
        let (n_em, n_me, n_in) = flux(b, c);
        trapezoid_accumulate(&mut emitted, dt, f_em, n_em);
        trapezoid_accumulate(&mut mech, dt, f_me, n_me);
        trapezoid_accumulate(&mut internal, dt, f_in, n_in);
        f_em = n_em;
        f_me = n_me;
        f_in = n_in;
    }
    let t_end = t_sw + n2 as f64 * dt;
    let (ol, or) = record_after.outputs(t_end, c);
    traj.t.push(t_end);
    traj.db.push(b);
    traj.dc.push(c);
    traj.out_l.push(ol);
    traj.out_r.push(or);

    let result = QSwitchResult {
        t_switch: t_sw,
        kappa_after: params_after.kappa,
        stored_before,
        emitted_quanta: emitted,
        dissipated_mech: mech,
        dissipated_internal: internal,
        stored_after: b.norm_sqr() + c.norm_sqr(),
    };
    Ok((result, traj))
}
