//! Parameter containers and the lab-quantity parameterizations (geometry,
//! pump power) that map onto the model rates.
//!
//! All rates and frequencies are angular (rad/s). Dimensionless "units of
//! kappa" inputs are a front-end concern; everything below this line is
//! plain rad/s with kappa carrying the scale.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Reduced Planck constant (J s). The only dimensional constant in the
/// crate; no other module touches it.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Sideband-resolution ratio omega_m/kappa below which the rotating-wave
/// results start to degrade. A warning threshold, not a hard limit.
pub const DEFAULT_SIDEBAND_RATIO: f64 = 10.0;

/// How the coupling laser drive strength is specified. Exactly one of the
/// three equivalent parameterizations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pump {
    /// Laser power (W). Requires `omega_c` for the photon-flux conversion.
    Power(f64),
    /// Drive amplitude eps_c (sqrt(photons)/s scale), complex in general;
    /// only |eps_c|^2 enters the steady state.
    Amplitude(Complex64),
    /// Effective coupling G = g|c_s| (rad/s), fixing the operating point
    /// directly.
    Coupling(f64),
}

/// Physical rates and couplings of the cavity + mirror system.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    /// Mechanical resonance omega_m (rad/s).
    pub omega_m: f64,
    /// Mechanical damping gamma_m (rad/s).
    pub gamma_m: f64,
    /// Per-mirror cavity decay kappa (rad/s); the field equation carries
    /// -2 kappa for the two end mirrors.
    pub kappa: f64,
    /// Internal cavity loss rate kappa0 (rad/s), 0 for a loss-free resonator.
    pub kappa0: f64,
    /// Single-photon optomechanical coupling g (rad/s).
    pub g: f64,
    /// Bare detuning Delta_0 = omega_0 - omega_c (rad/s).
    pub delta0: f64,
    /// Coupling-laser frequency omega_c (rad/s); only needed to convert
    /// between pump power and drive amplitude.
    pub omega_c: Option<f64>,
    /// Coupling-laser drive strength.
    pub pump: Pump,
}

impl SystemParams {
    /// Check the basic admissibility invariants.
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.omega_m,
            self.gamma_m,
            self.kappa,
            self.kappa0,
            self.g,
            self.delta0,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParams("non-finite parameter".into()));
        }
        if self.omega_m <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "omega_m = {} must be > 0",
                self.omega_m
            )));
        }
        if self.kappa <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "kappa = {} must be > 0",
                self.kappa
            )));
        }
        if self.gamma_m < 0.0 {
            return Err(Error::InvalidParams(format!(
                "gamma_m = {} must be >= 0",
                self.gamma_m
            )));
        }
        if self.kappa0 < 0.0 {
            return Err(Error::InvalidParams(format!(
                "kappa0 = {} must be >= 0",
                self.kappa0
            )));
        }
        match self.pump {
            Pump::Power(p) if !(p.is_finite() && p >= 0.0) => {
                Err(Error::Pump(format!("power = {p} must be finite and >= 0")))
            }
            Pump::Coupling(g_eff) if !(g_eff.is_finite() && g_eff >= 0.0) => {
                Err(Error::Pump(format!("G = {g_eff} must be finite and >= 0")))
            }
            Pump::Amplitude(eps) if !(eps.re.is_finite() && eps.im.is_finite()) => {
                Err(Error::Pump("non-finite drive amplitude".into()))
            }
            _ => Ok(()),
        }
    }

    /// Total cavity amplitude damping 2*kappa + kappa0 appearing in the
    /// field equation (mirror transmission plus internal loss).
    pub fn total_cavity_damping(&self) -> f64 {
        2.0 * self.kappa + self.kappa0
    }

    /// Radiation-pressure back-action coefficient beta such that the
    /// effective detuning is Delta = Delta_0 - beta |c_s|^2.
    pub fn backaction_beta(&self) -> f64 {
        2.0 * self.g * self.g * self.omega_m
            / (0.25 * self.gamma_m * self.gamma_m + self.omega_m * self.omega_m)
    }

    /// Whether the sideband-resolution ratio omega_m/kappa clears `ratio`.
    pub fn resolved_sideband(&self, ratio: f64) -> bool {
        self.omega_m > ratio * self.kappa
    }
}

/// Geometry of the partially transmitting movable mirror inside the cavity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MirrorGeometry {
    /// Intensity transmission of the movable mirror, in (0, 1).
    pub transmission: f64,
    /// Wave number of the cavity field (1/m).
    pub k: f64,
    /// Rest position of the movable mirror (m).
    pub q0: f64,
    /// Bare cavity resonance omega_0 (rad/s).
    pub omega0: f64,
    /// Full cavity length (m).
    pub length: f64,
    /// Effective mirror mass (kg).
    pub mass: f64,
}

impl MirrorGeometry {
    pub fn validate(&self) -> Result<()> {
        if !(self.transmission > 0.0 && self.transmission < 1.0) {
            return Err(Error::Geometry(format!(
                "transmission = {} must lie in (0, 1)",
                self.transmission
            )));
        }
        if !(self.length > 0.0) {
            return Err(Error::Geometry("cavity length must be > 0".into()));
        }
        if !(self.mass > 0.0) {
            return Err(Error::Geometry("mirror mass must be > 0".into()));
        }
        Ok(())
    }
}

/// The two weak probe tones and their common detuning x = omega_p - omega_c
/// - omega_m from the mechanical sideband.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeDrive {
    /// Left-port probe amplitude.
    pub eps_l: Complex64,
    /// Right-port probe amplitude.
    pub eps_r: Complex64,
    /// Probe detuning x (rad/s); any sign.
    pub x: f64,
}

impl ProbeDrive {
    pub fn validate(&self) -> Result<()> {
        let ok = self.eps_l.re.is_finite()
            && self.eps_l.im.is_finite()
            && self.eps_r.re.is_finite()
            && self.eps_r.im.is_finite()
            && self.x.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams("non-finite probe drive".into()))
        }
    }

    /// |eps_L|^2 + |eps_R|^2.
    pub fn total_input(&self) -> f64 {
        self.eps_l.norm_sqr() + self.eps_r.norm_sqr()
    }
}

/// Position-coupling rate g_0 from the movable-mirror geometry,
///
///   g_0 = sin(2 k q_0) / sqrt((1 - T)^-1 - cos^2(2 k q_0)) * (-omega_0 / (L/2)).
///
/// The sign follows the formula: negative where sin(2 k q_0) > 0.
pub fn g0_from_geometry(geom: &MirrorGeometry) -> Result<f64> {
    geom.validate()?;
    let phase = 2.0 * geom.k * geom.q0;
    let (s, c) = phase.sin_cos();
    let denom_sq = 1.0 / (1.0 - geom.transmission) - c * c;
    if denom_sq <= 0.0 {
        return Err(Error::Geometry(format!(
            "(1-T)^-1 - cos^2(2 k q0) = {denom_sq} must be > 0"
        )));
    }
    Ok(s / denom_sq.sqrt() * (-geom.omega0 / (geom.length / 2.0)))
}

/// Zero-point coupling g = g_0 sqrt(hbar / (2 m omega_m)) for a mirror of
/// the given geometry and mechanical frequency.
pub fn g_from_geometry(geom: &MirrorGeometry, omega_m: f64) -> Result<f64> {
    if !(omega_m > 0.0) {
        return Err(Error::InvalidParams("omega_m must be > 0".into()));
    }
    let g0 = g0_from_geometry(geom)?;
    Ok(g0 * (HBAR / (2.0 * geom.mass * omega_m)).sqrt())
}

/// Drive amplitude from pump power: eps_c = sqrt(2 kappa P / (hbar omega_c)).
pub fn amplitude_from_power(params: &SystemParams, power: f64) -> Result<f64> {
    if !(power.is_finite() && power >= 0.0) {
        return Err(Error::Pump(format!(
            "power = {power} must be finite and >= 0"
        )));
    }
    let omega_c = params
        .omega_c
        .ok_or_else(|| Error::Pump("omega_c required for power conversion".into()))?;
    if !(omega_c > 0.0) {
        return Err(Error::Pump("omega_c must be > 0".into()));
    }
    Ok((2.0 * params.kappa * power / (HBAR * omega_c)).sqrt())
}

/// Effective coupling G at the red-sideband operating point Delta = omega_m,
///
///   G^2 = g^2 * 2 kappa P / (hbar omega_c ((2 kappa + kappa0)^2 + omega_m^2)).
///
/// Requires the pump to be specified as a power.
pub fn g_eff_from_power(params: &SystemParams) -> Result<f64> {
    params.validate()?;
    let power = match params.pump {
        Pump::Power(p) => p,
        _ => return Err(Error::Pump("pump must be specified as a power".into())),
    };
    let eps_c = amplitude_from_power(params, power)?;
    let d = params.total_cavity_damping();
    let cs_sq = eps_c * eps_c / (d * d + params.omega_m * params.omega_m);
    Ok(params.g.abs() * cs_sq.sqrt())
}

/// Pump power that produces the effective coupling G at Delta = omega_m;
/// exact algebraic inverse of [`g_eff_from_power`].
pub fn power_from_g_eff(params: &SystemParams, g_eff: f64) -> Result<f64> {
    params.validate()?;
    if !(g_eff.is_finite() && g_eff >= 0.0) {
        return Err(Error::Pump(format!("G = {g_eff} must be finite and >= 0")));
    }
    if g_eff == 0.0 {
        return Ok(0.0);
    }
    if params.g == 0.0 {
        return Err(Error::Pump("G > 0 unreachable with g = 0".into()));
    }
    let omega_c = params
        .omega_c
        .ok_or_else(|| Error::Pump("omega_c required for power conversion".into()))?;
    let d = params.total_cavity_damping();
    let num = g_eff * g_eff * HBAR * omega_c * (d * d + params.omega_m * params.omega_m);
    Ok(num / (params.g * params.g * 2.0 * params.kappa))
}

/// kappa_eff = kappa - kappa0/2: the decay entering the perfect-absorption
/// conditions once internal loss is present. Rejects kappa0 >= 2 kappa.
pub fn effective_kappa(params: &SystemParams) -> Result<f64> {
    if params.kappa0 >= 2.0 * params.kappa {
        return Err(Error::InvalidParams(format!(
            "kappa0 = {} must be < 2 kappa = {}",
            params.kappa0,
            2.0 * params.kappa
        )));
    }
    Ok(params.kappa - 0.5 * params.kappa0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn base_params() -> SystemParams {
        SystemParams {
            omega_m: 2.0 * PI * 1e8,
            gamma_m: 2.0 * PI * 1e2,
            kappa: 2.0 * PI * 1e6,
            kappa0: 0.0,
            g: 2.0 * PI * 10.0,
            delta0: 0.0,
            omega_c: Some(2.0 * PI * 2.82e14),
            pump: Pump::Power(1e-3),
        }
    }

    fn base_geometry() -> MirrorGeometry {
        MirrorGeometry {
            transmission: 0.5,
            k: 1.0,
            q0: FRAC_PI_2 / 2.0, // 2 k q0 = pi/2
            omega0: 2.0 * PI * 2.82e14,
            length: 1e-3,
            mass: 1e-12,
        }
    }

    #[test]
    fn g0_vanishes_at_sine_node() {
        let geom = MirrorGeometry {
            q0: PI / 2.0,
            k: 1.0,
            ..base_geometry()
        }; // sin(pi) = 0
        let g0 = g0_from_geometry(&geom).unwrap();
        assert!(g0.abs() < 1e-3 * geom.omega0 / geom.length * 1e-12);
    }

    #[test]
    fn g0_vanishes_as_transmission_approaches_one() {
        let geom = MirrorGeometry {
            transmission: 1.0 - 1e-12,
            ..base_geometry()
        };
        let g0 = g0_from_geometry(&geom).unwrap();
        let scale = geom.omega0 / (geom.length / 2.0);
        assert!(g0.abs() < 2e-6 * scale, "g0 = {g0}");
    }

    #[test]
    fn g0_reference_point() {
        // T = 1/2, 2 k q0 = pi/2: the formula collapses to -sqrt(2) omega0 / L.
        let geom = base_geometry();
        let g0 = g0_from_geometry(&geom).unwrap();
        let hand = -(2.0f64).sqrt() * geom.omega0 / geom.length;
        assert!((g0 - hand).abs() <= 1e-12 * hand.abs());
        // Frozen regression value.
        assert!((g0 - (-2.5057859771213184e18)).abs() < 1e6, "g0 = {g0:e}");
        // Zero-point coupling is the same number scaled by the oscillator
        // length.
        let omega_m = 2.0 * PI * 1e8;
        let g = g_from_geometry(&geom, omega_m).unwrap();
        let scale = (HBAR / (2.0 * geom.mass * omega_m)).sqrt();
        assert!((g - g0 * scale).abs() <= 1e-12 * (g0 * scale).abs());
    }

    #[test]
    fn g0_rejects_degenerate_denominator() {
        // transmission outside (0,1) is the only way to reach the domain error
        let geom = MirrorGeometry {
            transmission: 0.0,
            q0: PI,
            k: 0.5,
            ..base_geometry()
        };
        assert!(g0_from_geometry(&geom).is_err());
    }

    #[test]
    fn g0_is_odd_in_the_mirror_phase() {
        for &phase in &[0.3, 1.2, 2.8, -0.9] {
            let a = MirrorGeometry {
                k: 0.5,
                q0: phase,
                ..base_geometry()
            };
            let b = MirrorGeometry {
                k: 0.5,
                q0: -phase,
                ..base_geometry()
            };
            let ga = g0_from_geometry(&a).unwrap();
            let gb = g0_from_geometry(&b).unwrap();
            assert!((ga + gb).abs() <= 1e-12 * ga.abs().max(gb.abs()));
        }
    }

    #[test]
    fn zero_power_gives_zero_coupling() {
        let params = SystemParams {
            pump: Pump::Power(0.0),
            ..base_params()
        };
        assert_eq!(g_eff_from_power(&params).unwrap(), 0.0);
    }

    #[test]
    fn coupling_scales_as_sqrt_power() {
        let p1 = SystemParams {
            pump: Pump::Power(1e-3),
            ..base_params()
        };
        let p2 = SystemParams {
            pump: Pump::Power(2e-3),
            ..base_params()
        };
        let g1 = g_eff_from_power(&p1).unwrap();
        let g2 = g_eff_from_power(&p2).unwrap();
        assert!((g2 / g1 - (2.0f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn coupling_from_power_matches_two_step_route() {
        let params = base_params();
        let g_direct = g_eff_from_power(&params).unwrap();
        // Independent route: eps_c, then |c_s| at Delta = omega_m, then g|c_s|.
        let eps_c = (2.0 * params.kappa * 1e-3 / (HBAR * params.omega_c.unwrap())).sqrt();
        let cs_mag =
            eps_c / (4.0 * params.kappa * params.kappa + params.omega_m * params.omega_m).sqrt();
        let g_two_step = params.g * cs_mag;
        assert!((g_direct - g_two_step).abs() <= 1e-12 * g_two_step);
    }

    #[test]
    fn power_round_trips_through_coupling() {
        for &p in &[1e-6, 1e-3, 0.5, 7.3] {
            let params = SystemParams {
                pump: Pump::Power(p),
                ..base_params()
            };
            let g_eff = g_eff_from_power(&params).unwrap();
            let back = power_from_g_eff(&params, g_eff).unwrap();
            assert!((back - p).abs() <= 1e-12 * p);
        }
    }

    #[test]
    fn power_inverse_verified_forward() {
        let params = base_params();
        let g_eff = 2.0 * params.kappa;
        let p = power_from_g_eff(&params, g_eff).unwrap();
        let forward = g_eff_from_power(&SystemParams {
            pump: Pump::Power(p),
            ..params
        })
        .unwrap();
        assert!((forward - g_eff).abs() <= 1e-12 * g_eff);
    }

    #[test]
    fn zero_coupling_needs_no_power() {
        let params = SystemParams {
            g: 0.0,
            ..base_params()
        };
        assert_eq!(power_from_g_eff(&params, 0.0).unwrap(), 0.0);
        assert!(power_from_g_eff(&params, 1.0).is_err());
    }

    #[test]
    fn effective_kappa_cases() {
        let params = base_params();
        assert_eq!(effective_kappa(&params).unwrap(), params.kappa);
        let half = SystemParams {
            kappa0: params.kappa,
            ..params.clone()
        };
        assert_eq!(effective_kappa(&half).unwrap(), params.kappa / 2.0);
        let bad = SystemParams {
            kappa0: 2.0 * params.kappa,
            ..params
        };
        assert!(effective_kappa(&bad).is_err());
    }

    #[test]
    fn validation_rejects_bad_rates() {
        assert!(SystemParams {
            omega_m: 0.0,
            ..base_params()
        }
        .validate()
        .is_err());
        assert!(SystemParams {
            kappa: -1.0,
            ..base_params()
        }
        .validate()
        .is_err());
        assert!(SystemParams {
            gamma_m: -1.0,
            ..base_params()
        }
        .validate()
        .is_err());
        assert!(SystemParams {
            pump: Pump::Power(-1.0),
            ..base_params()
        }
        .validate()
        .is_err());
        assert!(base_params().validate().is_ok());
    }

    #[test]
    fn sideband_flag() {
        let params = base_params(); // omega_m / kappa = 100
        assert!(params.resolved_sideband(DEFAULT_SIDEBAND_RATIO));
        let slow = SystemParams {
            omega_m: 5.0 * params.kappa,
            ..params
        };
        assert!(!slow.resolved_sideband(DEFAULT_SIDEBAND_RATIO));
    }
}
