//! Command implementations on top of the solver crate.

use num_complex::Complex64;

use omcav_core::model::{
    effective_kappa, power_from_g_eff, Pump, SystemParams, DEFAULT_SIDEBAND_RATIO,
};
use omcav_core::response::{ieit_conditions, probe_response};
use omcav_core::steady_state::{fix_operating_point, solve_steady_states, SteadyState};
use omcav_core::sweep::sweep_response;
use omcav_core::timedomain::{
    full_dt_cap, integrate_full_from, integrate_rwa_from, q_switch, rwa_dt_cap, Trajectory,
};

use crate::config::{EvolveMode, Format, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{
    csv_table, fmt_f64, json_table, write_output, SWEEP_COLUMNS, TRAJECTORY_COLUMNS,
};

fn operating_point(params: &SystemParams) -> CliResult<SteadyState> {
    if !params.resolved_sideband(DEFAULT_SIDEBAND_RATIO) {
        eprintln!(
            "warning: omega_m = {} kappa is below the resolved-sideband margin (> {} kappa); \
             rotating-wave results degrade",
            params.omega_m / params.kappa,
            DEFAULT_SIDEBAND_RATIO
        );
    }
    fix_operating_point(params).map_err(CliError::config_from)
}

fn emit_table(cfg: &RunConfig, columns: &[&str], rows: &[Vec<f64>]) -> CliResult<()> {
    let contents = match cfg.output.format {
        Format::Csv => csv_table(columns, rows),
        Format::Json => json_table(columns, rows),
    };
    write_output(cfg.output.path.as_deref(), &contents)
}

pub fn cmd_sweep(cfg: &RunConfig) -> CliResult<()> {
    let params = cfg.system_params();
    let drive = cfg.probe_drive();
    if drive.eps_l.norm_sqr() == 0.0 {
        return Err(CliError::Config(
            "sweep normalizes outputs by |eps_l|^2, which must be nonzero".into(),
        ));
    }
    let op = operating_point(&params)?;
    let xs = cfg.sweep_grid()?;
    let rows = sweep_response(&params, &op, drive.eps_l, drive.eps_r, &xs)
        .map_err(CliError::numeric_from)?;
    let kappa = params.kappa;
    let table: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| {
            vec![
                r.x / kappa,
                r.out_norm_l,
                r.out_norm_r,
                r.cavity_norm,
                r.mech_norm,
                r.phi_plus_norm,
                r.phi_minus_norm,
            ]
        })
        .collect();
    emit_table(cfg, &SWEEP_COLUMNS, &table)
}

pub fn cmd_ieit(cfg: &RunConfig) -> CliResult<()> {
    let params = cfg.system_params();
    let op = operating_point(&params)?;
    let cond = ieit_conditions(&params, &op).map_err(CliError::config_from)?;
    let k_eff = effective_kappa(&params).map_err(CliError::config_from)?;
    let kappa = params.kappa;

    let mut report = String::new();
    report.push_str(&format!(
        "kappa_eff_over_kappa: {}\n",
        fmt_f64(k_eff / kappa)
    ));
    report.push_str(&format!(
        "g_eff_over_kappa: {}\n",
        fmt_f64(op.g_eff / kappa)
    ));
    report.push_str(&format!(
        "gamma_m_required_over_kappa: {}\n",
        fmt_f64(cond.gamma_m_required / kappa)
    ));
    report.push_str(&format!("exists: {}\n", cond.exists));
    if cond.exists {
        report.push_str(&format!(
            "x_minus_over_kappa: {}\n",
            fmt_f64(cond.x_minus / kappa)
        ));
        report.push_str(&format!(
            "x_plus_over_kappa: {}\n",
            fmt_f64(cond.x_plus / kappa)
        ));
    } else {
        report.push_str("no IEIT: G < 2 kappa_eff\n");
    }

    let power = match params.pump {
        Pump::Power(p) => Some(p),
        _ => {
            if params.omega_c.is_some() && params.g != 0.0 {
                power_from_g_eff(&params, op.g_eff).ok()
            } else {
                None
            }
        }
    };
    match power {
        Some(p) => report.push_str(&format!("power_w: {}\n", fmt_f64(p))),
        None => report.push_str("power_w: n/a\n"),
    }

    if cond.exists {
        // Residual check at the zeros with the damping the conditions demand.
        let tuned = SystemParams {
            gamma_m: cond.gamma_m_required,
            ..params.clone()
        };
        let drive = cfg.probe_drive();
        let eps_scale = drive.eps_l.norm().max(f64::MIN_POSITIVE);
        for (label, x) in [
            ("residual_out_minus", cond.x_minus),
            ("residual_out_plus", cond.x_plus),
        ] {
            let probe = omcav_core::model::ProbeDrive {
                eps_l: drive.eps_l,
                eps_r: drive.eps_l,
                x,
            };
            let r = probe_response(&tuned, &op, &probe).map_err(CliError::numeric_from)?;
            report.push_str(&format!(
                "{label}: {}\n",
                fmt_f64(r.out_l_plus.norm() / eps_scale)
            ));
        }
    }
    print!("{report}");
    Ok(())
}

pub fn cmd_steady(cfg: &RunConfig) -> CliResult<()> {
    let params = cfg.system_params();
    let states = match params.pump {
        Pump::Coupling(_) => vec![fix_operating_point(&params).map_err(CliError::config_from)?],
        _ => solve_steady_states(&params).map_err(CliError::config_from)?,
    };
    let kappa = params.kappa;
    println!("roots: {}", states.len());
    println!("u,delta_over_kappa,g_eff_over_kappa,stable");
    for s in &states {
        println!(
            "{},{},{},{}",
            fmt_f64(s.photon_number()),
            fmt_f64(s.delta / kappa),
            fmt_f64(s.g_eff / kappa),
            s.stable
        );
    }
    Ok(())
}

fn trajectory_rows(traj: &Trajectory, kappa: f64) -> Vec<Vec<f64>> {
    (0..traj.len())
        .map(|k| {
            vec![
                traj.t[k] * kappa,
                traj.db[k].re,
                traj.db[k].im,
                traj.dc[k].re,
                traj.dc[k].im,
                traj.out_l[k].norm_sqr(),
                traj.out_r[k].norm_sqr(),
            ]
        })
        .collect()
}

pub fn cmd_evolve(cfg: &RunConfig, mode: EvolveMode) -> CliResult<()> {
    let params = cfg.system_params();
    let drive = cfg.probe_drive();
    let op = operating_point(&params)?;
    let kappa = params.kappa;

    let t_final = cfg.evolve.t_final / kappa;
    let cap = match mode {
        EvolveMode::Rwa => rwa_dt_cap(&params, &op, &drive),
        EvolveMode::Full => full_dt_cap(&params, &op, &drive),
    };
    let dt = match cfg.evolve.dt {
        Some(dt) => dt / kappa,
        None => 0.5 * cap,
    };
    let steps = (t_final / dt).round().max(1.0);
    let stride = cfg
        .evolve
        .stride
        .unwrap_or_else(|| ((steps / 4000.0).ceil() as usize).max(1));

    let zero = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    let traj = match mode {
        EvolveMode::Rwa => integrate_rwa_from(&params, &op, &drive, zero, t_final, dt, stride),
        EvolveMode::Full => integrate_full_from(&params, &op, &drive, zero, t_final, dt, stride),
    }
    .map_err(CliError::numeric_from)?;

    emit_table(cfg, &TRAJECTORY_COLUMNS, &trajectory_rows(&traj, kappa))
}

pub fn cmd_qswitch(cfg: &RunConfig) -> CliResult<()> {
    let params = cfg.system_params();
    let drive = cfg.probe_drive();
    let op = operating_point(&params)?;
    let kappa = params.kappa;

    let (result, traj) = q_switch(
        &params,
        &op,
        &drive,
        cfg.qswitch.t_switch / kappa,
        cfg.qswitch.kappa_factor,
        cfg.qswitch.stride,
    )
    .map_err(CliError::numeric_from)?;

    println!("t_switch_kappa: {}", fmt_f64(result.t_switch * kappa));
    println!("kappa_factor: {}", fmt_f64(result.kappa_after / kappa));
    println!("stored_before: {}", fmt_f64(result.stored_before));
    println!("emitted_quanta: {}", fmt_f64(result.emitted_quanta));
    println!("dissipated_mech: {}", fmt_f64(result.dissipated_mech));
    println!(
        "dissipated_internal: {}",
        fmt_f64(result.dissipated_internal)
    );
    println!("stored_after: {}", fmt_f64(result.stored_after));
    println!("budget_residual: {}", fmt_f64(result.budget_residual()));

    if cfg.output.path.is_some() {
        emit_table(cfg, &TRAJECTORY_COLUMNS, &trajectory_rows(&traj, kappa))?;
    }
    Ok(())
}
