//! Five-state pneumatic cylinder model driven by a proportional valve.
//!
//! States are piston position and velocity, the two absolute chamber
//! pressures and the valve spool position. Chamber pressures follow the
//! polytropic charging/discharging law, valve orifices follow the
//! choked/subsonic compressible flow law, and the spool is a first-order lag
//! behind the command.
//!
//! Valve routing: a positive spool opening charges chamber `a` from supply and
//! vents chamber `b` to atmosphere; a negative opening does the reverse. The
//! chamber-`b` flow term is the discharge rate (positive when `b` vents), so
//! venting lowers `P_b`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest specific-heat ratio accepted by [`flow_constant`]; below it the
/// exponent `(γ+1)/(γ-1)` exceeds 200.
pub const MIN_GAMMA: f64 = 1.01;

/// Dry friction: Coulomb level, stiction level and Stribeck velocity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FrictionParams {
    /// Coulomb friction magnitude `F_c` (N).
    pub coulomb: f64,
    /// Static friction magnitude `F_s` (N).
    pub stiction: f64,
    /// Stribeck velocity `v_s` (m/s).
    pub stribeck_velocity: f64,
}

impl Default for FrictionParams {
    fn default() -> Self {
        FrictionParams {
            coulomb: 20.0,
            stiction: 30.0,
            stribeck_velocity: 0.01,
        }
    }
}

impl FrictionParams {
    pub fn frictionless() -> Self {
        FrictionParams {
            coulomb: 0.0,
            stiction: 0.0,
            stribeck_velocity: 0.01,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.coulomb >= 0.0) {
            return Err(Error::config("coulomb", "must be >= 0"));
        }
        if !(self.stiction >= self.coulomb) {
            return Err(Error::config("stiction", "must be >= coulomb"));
        }
        if !(self.stribeck_velocity > 0.0) {
            return Err(Error::config("stribeck_velocity", "must be > 0"));
        }
        Ok(())
    }
}

/// Physical constants of the cylinder, valve and supply. All values SI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlantParams {
    /// Total moved mass `M` (kg).
    pub mass: f64,
    /// Viscous damping `b` (N·s/m).
    pub damping: f64,
    /// Piston area on the cap side, chamber `a` (m²).
    pub area_a: f64,
    /// Piston annulus area on the rod side, chamber `b` (m²).
    pub area_b: f64,
    /// Dead volume of chamber `a` at `x_p = 0` (m³).
    pub dead_volume_a: f64,
    /// Dead volume of chamber `b` at `x_p = L` (m³).
    pub dead_volume_b: f64,
    /// Gas constant `R` (J/(kg·K)).
    pub gas_constant: f64,
    /// Supply air temperature `T` (K).
    pub temperature: f64,
    /// Specific-heat ratio `γ`.
    pub gamma: f64,
    /// Compressibility flow correction `β`.
    pub beta: f64,
    /// Spool gain `k_v` (m per control unit).
    pub spool_gain: f64,
    /// Valve time constant `τ` (s).
    pub valve_time_constant: f64,
    /// Discharge coefficient `C_d`.
    pub discharge_coefficient: f64,
    /// Orifice area gradient `w` (m).
    pub area_gradient: f64,
    /// Critical pressure ratio `P_cr`.
    pub critical_ratio: f64,
    /// Supply pressure `P_s` (Pa, absolute).
    pub supply_pressure: f64,
    /// Exhaust pressure `P_atm` (Pa, absolute).
    pub atmospheric_pressure: f64,
    /// Stroke `L` (m).
    pub stroke: f64,
    /// Spool travel limit (m).
    pub spool_limit: f64,
    /// External load `F_L` (N).
    pub load_force: f64,
    #[serde(flatten)]
    pub friction: FrictionParams,
    /// RK4 substeps per control sample.
    pub substeps: usize,
}

impl Default for PlantParams {
    fn default() -> Self {
        PlantParams {
            mass: 1.0,
            damping: 50.0,
            area_a: 1e-3,
            area_b: 9.3e-4,
            dead_volume_a: 2e-5,
            dead_volume_b: 2e-5,
            gas_constant: 287.0,
            temperature: 293.0,
            gamma: 1.4,
            beta: 1.0,
            spool_gain: 1e-3,
            valve_time_constant: 5e-3,
            discharge_coefficient: 0.8,
            area_gradient: 5e-3,
            critical_ratio: 0.528,
            supply_pressure: 6e5,
            atmospheric_pressure: 1.013e5,
            stroke: 0.5,
            spool_limit: 1e-3,
            load_force: 0.0,
            friction: FrictionParams::default(),
            substeps: 1,
        }
    }
}

impl PlantParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("mass", self.mass),
            ("area_a", self.area_a),
            ("area_b", self.area_b),
            ("dead_volume_a", self.dead_volume_a),
            ("dead_volume_b", self.dead_volume_b),
            ("gas_constant", self.gas_constant),
            ("temperature", self.temperature),
            ("valve_time_constant", self.valve_time_constant),
            ("supply_pressure", self.supply_pressure),
            ("atmospheric_pressure", self.atmospheric_pressure),
            ("stroke", self.stroke),
            ("spool_limit", self.spool_limit),
            ("area_gradient", self.area_gradient),
            ("discharge_coefficient", self.discharge_coefficient),
            ("spool_gain", self.spool_gain),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::config(
                    name,
                    format!("must be positive and finite, got {v}"),
                ));
            }
        }
        if !(self.damping >= 0.0) {
            return Err(Error::config("damping", "must be >= 0"));
        }
        if !(self.gamma >= MIN_GAMMA && self.gamma <= 5.0 / 3.0) {
            return Err(Error::config(
                "gamma",
                format!("must lie in [{MIN_GAMMA}, 5/3], got {}", self.gamma),
            ));
        }
        if !(self.beta > 0.0 && self.beta <= self.gamma) {
            return Err(Error::config("beta", "must lie in (0, gamma]"));
        }
        if !(self.critical_ratio > 0.0 && self.critical_ratio < 1.0) {
            return Err(Error::config("critical_ratio", "must lie in (0, 1)"));
        }
        if !(self.atmospheric_pressure < self.supply_pressure) {
            return Err(Error::config(
                "supply_pressure",
                "must exceed atmospheric_pressure",
            ));
        }
        if !self.load_force.is_finite() {
            return Err(Error::config("load_force", "must be finite"));
        }
        if self.substeps == 0 {
            return Err(Error::config("substeps", "must be >= 1"));
        }
        self.friction.validate()
    }

    pub fn pressure_floor(&self) -> f64 {
        self.atmospheric_pressure * 1e-2
    }

    /// Chamber volumes `(V_a, V_b)` at piston position `x_p`.
    pub fn volumes(&self, x_p: f64) -> (f64, f64) {
        (
            self.dead_volume_a + self.area_a * x_p,
            self.dead_volume_b + self.area_b * (self.stroke - x_p),
        )
    }
}

/// Physical state of the servo.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantState {
    /// Piston position (m).
    pub x_p: f64,
    /// Piston velocity (m/s).
    pub v_p: f64,
    /// Chamber `a` absolute pressure (Pa).
    pub p_a: f64,
    /// Chamber `b` absolute pressure (Pa).
    pub p_b: f64,
    /// Spool position (m).
    pub x_v: f64,
}

impl PlantState {
    /// Rest state at `x_p` with both chambers at three atmospheres and a centred spool.
    pub fn rest(x_p: f64, params: &PlantParams) -> Self {
        let p = 3.0 * params.atmospheric_pressure;
        PlantState {
            x_p,
            v_p: 0.0,
            p_a: p,
            p_b: p,
            x_v: 0.0,
        }
    }

    fn axpy(&self, h: f64, d: &PlantState) -> PlantState {
        PlantState {
            x_p: self.x_p + h * d.x_p,
            v_p: self.v_p + h * d.v_p,
            p_a: self.p_a + h * d.p_a,
            p_b: self.p_b + h * d.p_b,
            x_v: self.x_v + h * d.x_v,
        }
    }
}

/// Flow constant `C_1 = sqrt((γ/R)·(2/(γ+1))^((γ+1)/(γ-1)))`.
pub fn flow_constant(gamma: f64, gas_constant: f64) -> Result<f64> {
    if !(gamma >= MIN_GAMMA) {
        return Err(Error::Domain(format!(
            "specific-heat ratio must be >= {MIN_GAMMA}, got {gamma}"
        )));
    }
    if !(gas_constant > 0.0) {
        return Err(Error::Domain(format!(
            "gas constant must be positive, got {gas_constant}"
        )));
    }
    let exponent = (gamma + 1.0) / (gamma - 1.0);
    Ok(((gamma / gas_constant) * (2.0 / (gamma + 1.0)).powf(exponent)).sqrt())
}

/// Mass flow through one orifice from `p_up` to `p_down` for an opening `x_v >= 0`.
///
/// Downstream pressures above upstream give zero flow; callers orient the
/// pair (see [`signed_flow`]).
pub fn valve_mass_flow(x_v: f64, p_up: f64, p_down: f64, params: &PlantParams) -> Result<f64> {
    if !(p_up > 0.0) {
        return Err(Error::Domain(format!(
            "upstream pressure must be positive, got {p_up}"
        )));
    }
    let c1 = flow_constant(params.gamma, params.gas_constant)?;
    Ok(orifice_flow(c1, x_v, p_up, p_down, params))
}

fn orifice_flow(c1: f64, x_v: f64, p_up: f64, p_down: f64, params: &PlantParams) -> f64 {
    let opening = x_v.max(0.0);
    let choked = c1 * params.discharge_coefficient * params.area_gradient * opening * p_up
        / params.temperature.sqrt();
    let ratio = (p_down / p_up).max(0.0);
    let p_cr = params.critical_ratio;
    if ratio <= p_cr {
        choked
    } else if ratio >= 1.0 {
        0.0
    } else {
        let r = (ratio - p_cr) / (1.0 - p_cr);
        choked * (1.0 - r * r).sqrt()
    }
}

/// Net mass flow from `p_from` toward `p_to`; negative when the pressure
/// difference drives gas the other way.
fn signed_flow(c1: f64, opening: f64, p_from: f64, p_to: f64, params: &PlantParams) -> f64 {
    if p_from >= p_to {
        orifice_flow(c1, opening, p_from, p_to, params)
    } else {
        -orifice_flow(c1, opening, p_to, p_from, params)
    }
}

/// Chamber mass flows `(ṁ_a into a, ṁ_b out of b)` for the current spool position.
pub fn chamber_flows(state: &PlantState, params: &PlantParams) -> Result<(f64, f64)> {
    let c1 = flow_constant(params.gamma, params.gas_constant)?;
    let ps = params.supply_pressure;
    let patm = params.atmospheric_pressure;
    let x = state.x_v;
    Ok(if x > 0.0 {
        (
            signed_flow(c1, x, ps, state.p_a, params),
            signed_flow(c1, x, state.p_b, patm, params),
        )
    } else if x < 0.0 {
        let o = -x;
        (
            -signed_flow(c1, o, state.p_a, patm, params),
            -signed_flow(c1, o, ps, state.p_b, params),
        )
    } else {
        (0.0, 0.0)
    })
}

/// Dry friction force opposing motion.
///
/// While moving, Coulomb plus an exponentially decaying Stribeck excess. At
/// rest, the force balancing `applied` up to the stiction bound.
pub fn friction_force(v_p: f64, applied: f64, friction: &FrictionParams) -> f64 {
    if v_p == 0.0 {
        return applied.clamp(-friction.stiction, friction.stiction);
    }
    let ratio = v_p / friction.stribeck_velocity;
    v_p.signum()
        * (friction.coulomb + (friction.stiction - friction.coulomb) * (-ratio * ratio).exp())
}

/// Pressure and load force on the piston, excluding friction and damping.
fn pneumatic_force(state: &PlantState, extra_force: f64, params: &PlantParams) -> f64 {
    params.area_a * state.p_a - params.area_b * state.p_b - params.load_force + extra_force
}

/// State derivative under control `u` with no external disturbance.
pub fn derivatives(state: &PlantState, u: f64, params: &PlantParams) -> Result<PlantState> {
    derivatives_with_force(state, u, 0.0, params)
}

/// State derivative under control `u` and an additional force on the piston.
pub fn derivatives_with_force(
    state: &PlantState,
    u: f64,
    extra_force: f64,
    params: &PlantParams,
) -> Result<PlantState> {
    let (v_a, v_b) = params.volumes(state.x_p);
    if !(v_a > 0.0 && v_b > 0.0) {
        return Err(Error::Domain(format!(
            "non-positive chamber volume at x_p = {} (V_a = {v_a}, V_b = {v_b})",
            state.x_p
        )));
    }
    let (m_a, m_b) = chamber_flows(state, params)?;
    let g = params.gamma;
    let rt = params.gas_constant * params.temperature;
    let bg = params.beta * g;

    let applied = pneumatic_force(state, extra_force, params) - params.damping * state.v_p;
    let f_f = friction_force(state.v_p, applied, &params.friction);

    Ok(PlantState {
        x_p: state.v_p,
        v_p: (applied - f_f) / params.mass,
        p_a: (g * rt * m_a - bg * state.p_a * params.area_a * state.v_p) / v_a,
        p_b: (-g * rt * m_b + bg * state.p_b * params.area_b * state.v_p) / v_b,
        x_v: -(state.x_v - params.spool_gain * u) / params.valve_time_constant,
    })
}

/// Advance one control sample with fixed-step RK4.
pub fn step(state: &PlantState, u: f64, dt: f64, params: &PlantParams) -> Result<PlantState> {
    step_with_force(state, u, 0.0, dt, params)
}

/// [`step`] with an additional external force held over the sample.
///
/// After each substep: end-stops are plastic (position clamped, velocity
/// zeroed), the spool is clamped to its travel, pressures are floored at
/// 1% of atmospheric, and a velocity sign change inside the stiction band
/// leaves the piston stuck.
pub fn step_with_force(
    state: &PlantState,
    u: f64,
    extra_force: f64,
    dt: f64,
    params: &PlantParams,
) -> Result<PlantState> {
    if !(dt > 0.0) {
        return Err(Error::Domain(format!(
            "time step must be positive, got {dt}"
        )));
    }
    let h = dt / params.substeps.max(1) as f64;
    let mut s = *state;
    for _ in 0..params.substeps.max(1) {
        s = rk4_substep(&s, u, extra_force, h, params)?;
    }
    Ok(s)
}

fn rk4_substep(
    s: &PlantState,
    u: f64,
    f_ext: f64,
    h: f64,
    params: &PlantParams,
) -> Result<PlantState> {
    let k1 = derivatives_with_force(s, u, f_ext, params)?;
    let k2 = derivatives_with_force(&s.axpy(0.5 * h, &k1), u, f_ext, params)?;
    let k3 = derivatives_with_force(&s.axpy(0.5 * h, &k2), u, f_ext, params)?;
    let k4 = derivatives_with_force(&s.axpy(h, &k3), u, f_ext, params)?;
    let mut n = PlantState {
        x_p: s.x_p + h / 6.0 * (k1.x_p + 2.0 * k2.x_p + 2.0 * k3.x_p + k4.x_p),
        v_p: s.v_p + h / 6.0 * (k1.v_p + 2.0 * k2.v_p + 2.0 * k3.v_p + k4.v_p),
        p_a: s.p_a + h / 6.0 * (k1.p_a + 2.0 * k2.p_a + 2.0 * k3.p_a + k4.p_a),
        p_b: s.p_b + h / 6.0 * (k1.p_b + 2.0 * k2.p_b + 2.0 * k3.p_b + k4.p_b),
        x_v: s.x_v + h / 6.0 * (k1.x_v + 2.0 * k2.x_v + 2.0 * k3.x_v + k4.x_v),
    };

    if n.x_p <= 0.0 {
        n.x_p = 0.0;
        n.v_p = 0.0;
    } else if n.x_p >= params.stroke {
        n.x_p = params.stroke;
        n.v_p = 0.0;
    }
    n.x_v = n.x_v.clamp(-params.spool_limit, params.spool_limit);
    let floor = params.pressure_floor();
    n.p_a = n.p_a.max(floor);
    n.p_b = n.p_b.max(floor);

    if params.friction.stiction > 0.0 && s.v_p * n.v_p < 0.0 {
        let applied = pneumatic_force(&n, f_ext, params);
        if applied.abs() <= params.friction.stiction {
            n.v_p = 0.0;
        }
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oracle_c1(gamma: f64, r: f64) -> f64 {
        // (2/(γ+1))^((γ+1)/(γ-1)) by repeated multiplication for γ = 1.4 (exponent 6).
        let base = 2.0 / (gamma + 1.0);
        let mut p = 1.0;
        for _ in 0..6 {
            p *= base;
        }
        (gamma / r * p).sqrt()
    }

    #[test]
    fn flow_constant_reference_value() {
        let c1 = flow_constant(1.4, 287.0).unwrap();
        assert!((c1 - oracle_c1(1.4, 287.0)).abs() < 1e-15);
        assert!((c1 - 0.040417).abs() < 5e-6, "{c1}");
    }

    #[test]
    fn flow_constant_scales_inverse_sqrt_r() {
        let a = flow_constant(1.4, 287.0).unwrap();
        let b = flow_constant(1.4, 4.0 * 287.0).unwrap();
        assert!((b - a / 2.0).abs() < 1e-15);
    }

    #[test]
    fn flow_constant_rejects_bad_domain() {
        assert!(flow_constant(1.0, 287.0).is_err());
        assert!(flow_constant(1.005, 287.0).is_err());
        assert!(flow_constant(1.4, 0.0).is_err());
        assert!(flow_constant(1.01, 287.0).unwrap().is_finite());
    }

    #[test]
    fn choked_flow_reference_value() {
        let p = PlantParams::default();
        let pu = 5e5;
        let m = valve_mass_flow(0.001, pu, 0.3 * pu, &p).unwrap();
        let expected = 0.040417 * 0.8 * 0.005 * 0.001 * pu / 293f64.sqrt();
        assert!((m - expected).abs() / expected < 2e-4, "{m} vs {expected}");
        assert!((m - 4.72e-3).abs() < 0.01e-3);
        // choked: independent of downstream pressure
        let m2 = valve_mass_flow(0.001, pu, 0.1 * pu, &p).unwrap();
        assert_eq!(m, m2);
    }

    #[test]
    fn equal_pressures_give_zero_flow() {
        let p = PlantParams::default();
        assert_eq!(valve_mass_flow(0.001, 3e5, 3e5, &p).unwrap(), 0.0);
        assert!(valve_mass_flow(0.001, 0.0, 0.0, &p).is_err());
    }

    #[test]
    fn friction_cases() {
        let f = FrictionParams::default();
        assert_eq!(friction_force(0.0, 0.0, &f), 0.0);
        assert_eq!(friction_force(0.0, 2.0 * f.stiction, &f), f.stiction);
        assert_eq!(friction_force(0.0, -2.0 * f.stiction, &f), -f.stiction);
        assert!((friction_force(10.0, 0.0, &f) - f.coulomb).abs() < 1e-12);
        assert!((friction_force(-10.0, 0.0, &f) + f.coulomb).abs() < 1e-12);
        assert!((friction_force(1e-9, 0.0, &f) - f.stiction).abs() < 1e-6);
    }

    fn balanced_state(p: &PlantParams) -> PlantState {
        let p_b = 3.0 * p.atmospheric_pressure;
        let p_a = (p_b * p.area_b + p.load_force) / p.area_a;
        PlantState {
            x_p: 0.25,
            v_p: 0.0,
            p_a,
            p_b,
            x_v: 0.0,
        }
    }

    #[test]
    fn equilibrium_has_zero_derivatives() {
        let p = PlantParams::default();
        let s = balanced_state(&p);
        let d = derivatives(&s, 0.0, &p).unwrap();
        assert_eq!(d.x_p, 0.0);
        assert!(d.v_p.abs() < 1e-12);
        assert_eq!(d.p_a, 0.0);
        assert_eq!(d.p_b, 0.0);
        assert_eq!(d.x_v, 0.0);
        // default rest state is held by stiction
        let r = PlantState::rest(0.25, &p);
        assert_eq!(derivatives(&r, 0.0, &p).unwrap().v_p, 0.0);
    }

    #[test]
    fn steady_spool_matches_gain() {
        let p = PlantParams::default();
        let mut s = balanced_state(&p);
        s.x_v = p.spool_gain * 0.3;
        assert!(derivatives(&s, 0.3, &p).unwrap().x_v.abs() < 1e-15);
    }

    #[test]
    fn positive_velocity_without_flow() {
        let p = PlantParams::default();
        let mut s = balanced_state(&p);
        s.v_p = 0.1;
        let d = derivatives(&s, 0.0, &p).unwrap();
        assert!(d.p_a < 0.0 && d.p_b > 0.0);
    }

    #[test]
    fn positive_spool_charges_a_and_vents_b() {
        let p = PlantParams::default();
        let mut s = balanced_state(&p);
        s.x_v = 1e-4;
        let (ma, mb) = chamber_flows(&s, &p).unwrap();
        assert!(ma > 0.0 && mb > 0.0);
        let d = derivatives(&s, 0.5, &p).unwrap();
        assert!(d.p_a > 0.0 && d.p_b < 0.0);
        s.x_v = -1e-4;
        let d = derivatives(&s, -0.5, &p).unwrap();
        assert!(d.p_a < 0.0 && d.p_b > 0.0);
    }

    #[test]
    fn non_positive_volume_is_domain_error() {
        let p = PlantParams::default();
        let mut s = balanced_state(&p);
        s.x_p = -1.0;
        assert!(matches!(derivatives(&s, 0.0, &p), Err(Error::Domain(_))));
    }

    #[test]
    fn zero_input_from_equilibrium_is_fixed_point() {
        let p = PlantParams::default();
        let s0 = PlantState::rest(0.25, &p);
        let mut s = s0;
        for _ in 0..1000 {
            s = step(&s, 0.0, 1e-3, &p).unwrap();
        }
        assert_eq!(s, s0);
    }

    #[test]
    fn sustained_input_hits_end_stop() {
        let p = PlantParams::default();
        let mut s = PlantState::rest(0.25, &p);
        for _ in 0..5000 {
            s = step(&s, 1.0, 1e-3, &p).unwrap();
        }
        assert_eq!(s.x_p, p.stroke);
        assert_eq!(s.v_p, 0.0);
        assert!(s.p_a <= p.supply_pressure * 1.05);
    }

    #[test]
    fn spool_is_clamped() {
        let p = PlantParams {
            spool_gain: 1e-2,
            ..PlantParams::default()
        };
        let mut s = PlantState::rest(0.25, &p);
        for _ in 0..100 {
            s = step(&s, 1.0, 1e-3, &p).unwrap();
            assert!(s.x_v.abs() <= p.spool_limit);
        }
    }

    #[test]
    fn step_rejects_bad_dt() {
        let p = PlantParams::default();
        assert!(step(&PlantState::rest(0.1, &p), 0.0, 0.0, &p).is_err());
    }

    #[test]
    fn default_params_validate() {
        PlantParams::default().validate().unwrap();
        for p in [
            PlantParams {
                gamma: 1.0,
                ..PlantParams::default()
            },
            PlantParams {
                supply_pressure: 0.5e5,
                ..PlantParams::default()
            },
        ] {
            assert!(p.validate().is_err());
        }
    }
}
