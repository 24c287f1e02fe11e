//! Strict JSON run configuration.
//!
//! The schema rejects unknown fields. Rates inside `params` are either in
//! units of kappa (`"units": "kappa"`, which pins `kappa` to 1) or in rad/s
//! (`"units": "si"`). Probe detunings, sweep bounds and times are always
//! kappa-normalized so that the emitted normalized columns are identical in
//! both modes.

use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;
use serde_json::Value;

use omcav_core::model::{ProbeDrive, Pump, SystemParams};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    Kappa,
    Si,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum EvolveMode {
    #[default]
    Rwa,
    Full,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub units: Units,
    pub params: ParamsCfg,
    pub drive: DriveCfg,
    #[serde(default)]
    pub sweep: SweepCfg,
    #[serde(default)]
    pub output: OutputCfg,
    #[serde(default)]
    pub evolve: EvolveCfg,
    #[serde(default)]
    pub qswitch: QSwitchCfg,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsCfg {
    pub omega_m: f64,
    pub gamma_m: f64,
    pub kappa: f64,
    #[serde(default)]
    pub kappa0: f64,
    pub g: f64,
    #[serde(default)]
    pub delta0: f64,
    #[serde(default)]
    pub omega_c: Option<f64>,
    pub pump: PumpCfg,
}

/// Exactly one of the three pump parameterizations must be present.
#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct PumpCfg {
    #[serde(default)]
    pub power: Option<f64>,
    #[serde(default)]
    pub amplitude: Option<[f64; 2]>,
    #[serde(default)]
    pub g_eff: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveCfg {
    pub eps_l: [f64; 2],
    pub eps_r: [f64; 2],
    /// Probe detuning in units of kappa.
    #[serde(default)]
    pub x: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepCfg {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
}

impl Default for SweepCfg {
    fn default() -> Self {
        SweepCfg {
            x_min: -omcav_core::sweep::DEFAULT_SWEEP_HALF_WIDTH,
            x_max: omcav_core::sweep::DEFAULT_SWEEP_HALF_WIDTH,
            points: omcav_core::sweep::DEFAULT_SWEEP_POINTS,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputCfg {
    #[serde(default)]
    pub format: Format,
    /// Destination file; stdout when absent or "-".
    #[serde(default)]
    pub path: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveCfg {
    #[serde(default)]
    pub mode: EvolveMode,
    /// Integration horizon in units of 1/kappa.
    pub t_final: f64,
    /// Step in units of 1/kappa; half the stability cap when absent.
    #[serde(default)]
    pub dt: Option<f64>,
    /// Record every n-th step; sized for about 4000 rows when absent.
    #[serde(default)]
    pub stride: Option<usize>,
}

impl Default for EvolveCfg {
    fn default() -> Self {
        EvolveCfg {
            mode: EvolveMode::Rwa,
            t_final: 30.0,
            dt: None,
            stride: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QSwitchCfg {
    /// Switch instant in units of 1/kappa; must allow the drive to settle.
    pub t_switch: f64,
    pub kappa_factor: f64,
    /// Trajectory recording stride.
    #[serde(default = "default_qswitch_stride")]
    pub stride: usize,
}

fn default_qswitch_stride() -> usize {
    32
}

impl Default for QSwitchCfg {
    fn default() -> Self {
        QSwitchCfg {
            t_switch: 15.0,
            kappa_factor: 10.0,
            stride: default_qswitch_stride(),
        }
    }
}

fn apply_set(value: &mut Value, set: &str) -> CliResult<()> {
    let (key, raw) = set
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("--set expects key=value, got `{set}`")))?;
    let parsed: Value =
        serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let parts: Vec<&str> = key.split('.').collect();
    let mut cur = value;
    for part in &parts[..parts.len() - 1] {
        let obj = cur.as_object_mut().ok_or_else(|| {
            CliError::Config(format!("--set path `{key}`: `{part}` is not an object"))
        })?;
        cur = obj
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(serde_json::Map::new()));
    }
    let obj = cur
        .as_object_mut()
        .ok_or_else(|| CliError::Config(format!("--set path `{key}` does not end in an object")))?;
    obj.insert(parts[parts.len() - 1].to_string(), parsed);
    Ok(())
}

/// Read, override and validate a run configuration.
pub fn load_config(path: &Path, sets: &[String]) -> CliResult<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    for set in sets {
        apply_set(&mut value, set)?;
    }
    let cfg: RunConfig =
        serde_json::from_value(value).map_err(|e| CliError::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn validate(&self) -> CliResult<()> {
        let pump_fields = [
            self.params.pump.power.is_some(),
            self.params.pump.amplitude.is_some(),
            self.params.pump.g_eff.is_some(),
        ];
        if pump_fields.iter().filter(|p| **p).count() != 1 {
            return Err(CliError::Config(
                "pump must specify exactly one of power, amplitude, g_eff".into(),
            ));
        }
        if self.units == Units::Kappa {
            if self.params.kappa != 1.0 {
                return Err(CliError::Config(
                    "units = kappa requires params.kappa = 1".into(),
                ));
            }
            if self.params.pump.power.is_some() {
                return Err(CliError::Config(
                    "pump power needs dimensional constants; use units = si".into(),
                ));
            }
        }
        if !(self.sweep.points >= 2) {
            return Err(CliError::Config(format!(
                "sweep.points = {} must be >= 2",
                self.sweep.points
            )));
        }
        if !(self.sweep.x_min < self.sweep.x_max) {
            return Err(CliError::Config(format!(
                "sweep range [{}, {}] must be increasing",
                self.sweep.x_min, self.sweep.x_max
            )));
        }
        if !(self.evolve.t_final > 0.0) {
            return Err(CliError::Config("evolve.t_final must be > 0".into()));
        }
        if let Some(dt) = self.evolve.dt {
            if !(dt > 0.0) {
                return Err(CliError::Config("evolve.dt must be > 0".into()));
            }
        }
        if let Some(stride) = self.evolve.stride {
            if stride == 0 {
                return Err(CliError::Config("evolve.stride must be >= 1".into()));
            }
        }
        if !(self.qswitch.t_switch >= 10.0) {
            return Err(CliError::Config(
                "qswitch.t_switch must be >= 10 (units of 1/kappa)".into(),
            ));
        }
        if !(self.qswitch.kappa_factor >= 1.0) {
            return Err(CliError::Config("qswitch.kappa_factor must be >= 1".into()));
        }
        if self.qswitch.stride == 0 {
            return Err(CliError::Config("qswitch.stride must be >= 1".into()));
        }
        self.system_params()
            .validate()
            .map_err(CliError::config_from)?;
        Ok(())
    }

    /// Solver parameters in rad/s (identity in kappa units, where kappa = 1).
    pub fn system_params(&self) -> SystemParams {
        let p = &self.params;
        let pump = if let Some(power) = p.pump.power {
            Pump::Power(power)
        } else if let Some([re, im]) = p.pump.amplitude {
            Pump::Amplitude(Complex64::new(re, im))
        } else {
            Pump::Coupling(p.pump.g_eff.unwrap_or(0.0))
        };
        SystemParams {
            omega_m: p.omega_m,
            gamma_m: p.gamma_m,
            kappa: p.kappa,
            kappa0: p.kappa0,
            g: p.g,
            delta0: p.delta0,
            omega_c: p.omega_c,
            pump,
        }
    }

    /// Probe drive with the detuning scaled from kappa units to rad/s.
    pub fn probe_drive(&self) -> ProbeDrive {
        ProbeDrive {
            eps_l: Complex64::new(self.drive.eps_l[0], self.drive.eps_l[1]),
            eps_r: Complex64::new(self.drive.eps_r[0], self.drive.eps_r[1]),
            x: self.drive.x * self.params.kappa,
        }
    }

    /// Sweep grid in rad/s.
    pub fn sweep_grid(&self) -> CliResult<Vec<f64>> {
        omcav_core::sweep::linspace(
            self.sweep.x_min * self.params.kappa,
            self.sweep.x_max * self.params.kappa,
            self.sweep.points,
        )
        .map_err(CliError::config_from)
    }
}
