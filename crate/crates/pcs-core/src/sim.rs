//! Time integration of the PCS dynamics with scheduled actuation,
//! trajectory recording and energy diagnostics.

use crate::arm::ArmSpec;
use crate::dynamics::{assemble, forward_dynamics, ActuationInput, DynamicsError, PointLoad};
use crate::kinematics::{JointState, Kinematics};
use crate::lie::{Transform, Twist};
use crate::quadrature::GaussLegendre;
use crate::{DVec, Vec6};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("state blew up at t = {t:.6} s: {detail}")]
    BlowUp { t: f64, detail: String },
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Piecewise-linear scalar profile over time; constant before the first and
/// after the last breakpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    points: Vec<(f64, f64)>,
}

impl Profile {
    pub fn constant(value: f64) -> Self {
        Self { points: vec![(0.0, value)] }
    }

    /// Linear ramp from `from` to `to` starting at `start` over `width`
    /// seconds, holding `to` afterwards.
    pub fn ramp(start: f64, width: f64, from: f64, to: f64) -> Self {
        assert!(width > 0.0, "ramp width must be positive");
        Self { points: vec![(start, from), (start + width, to)] }
    }

    /// Sampled time series with strictly increasing times.
    pub fn samples(points: Vec<(f64, f64)>) -> Self {
        assert!(!points.is_empty(), "profile needs at least one sample");
        assert!(
            points.windows(2).all(|w| w[1].0 > w[0].0),
            "profile times must be strictly increasing"
        );
        Self { points }
    }

    pub fn value(&self, t: f64) -> f64 {
        let pts = &self.points;
        if t <= pts[0].0 {
            return pts[0].1;
        }
        if t >= pts[pts.len() - 1].0 {
            return pts[pts.len() - 1].1;
        }
        let k = pts.partition_point(|p| p.0 <= t);
        let (t0, v0) = pts[k - 1];
        let (t1, v1) = pts[k];
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.points
    }
}

/// Actuation schedule over a simulation: scalar tension profiles per cable,
/// or a target wrench with a scalar multiplier profile per fluidic chamber.
#[derive(Debug, Clone, PartialEq)]
pub enum Schedule {
    Cable { tensions: Vec<Profile> },
    Fluidic { channels: Vec<(Vec6, Profile)> },
}

impl Schedule {
    pub fn none(arm: &ArmSpec) -> Self {
        match arm.actuation_kind {
            crate::arm::ActuationKind::Cable => Schedule::Cable {
                tensions: vec![Profile::constant(0.0); arm.cables.len()],
            },
            crate::arm::ActuationKind::Fluidic => Schedule::Fluidic {
                channels: vec![(Vec6::zeros(), Profile::constant(0.0)); arm.section_count()],
            },
        }
    }

    pub fn at(&self, t: f64) -> ActuationInput {
        match self {
            Schedule::Cable { tensions } => ActuationInput::Cable {
                tensions: tensions.iter().map(|p| p.value(t).max(0.0)).collect(),
            },
            Schedule::Fluidic { channels } => ActuationInput::Fluidic {
                wrenches: channels.iter().map(|(w, p)| w * p.value(t)).collect(),
            },
        }
    }
}

/// Everything needed to evaluate the dynamics at one instant.
pub struct SimContext<'a> {
    pub arm: &'a ArmSpec,
    pub schedule: &'a Schedule,
    pub loads: &'a [PointLoad],
    pub quad: &'a GaussLegendre,
}

impl SimContext<'_> {
    fn rates(&self, t: f64, xi: &DVec, xi_dot: &DVec) -> Result<(DVec, DVec), SimError> {
        let state = JointState::new(xi.clone(), xi_dot.clone());
        let coeffs = assemble(self.arm, &state, &self.schedule.at(t), self.loads, self.quad);
        let acc = forward_dynamics(&coeffs, &state)?;
        Ok((xi_dot.clone(), acc))
    }
}

/// One explicit RK4 step of the first-order system `(xi, xi_dot)`.
/// Coefficients are re-assembled at every stage.
pub fn step(ctx: &SimContext, state: &JointState, t: f64, dt: f64) -> Result<JointState, SimError> {
    assert!(dt > 0.0, "time step must be positive");
    let (xi, xd) = (&state.xi, &state.xi_dot);
    let (k1x, k1v) = ctx.rates(t, xi, xd)?;
    let (k2x, k2v) = ctx.rates(
        t + 0.5 * dt,
        &(xi + &k1x * (0.5 * dt)),
        &(xd + &k1v * (0.5 * dt)),
    )?;
    let (k3x, k3v) = ctx.rates(
        t + 0.5 * dt,
        &(xi + &k2x * (0.5 * dt)),
        &(xd + &k2v * (0.5 * dt)),
    )?;
    let (k4x, k4v) = ctx.rates(t + dt, &(xi + &k3x * dt), &(xd + &k3v * dt))?;
    let xi_new = xi + (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (dt / 6.0);
    let xd_new = xd + (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (dt / 6.0);
    if !xi_new.iter().chain(xd_new.iter()).all(|v| v.is_finite()) {
        return Err(SimError::BlowUp {
            t: t + dt,
            detail: "non-finite strain state".into(),
        });
    }
    Ok(JointState::new(xi_new, xd_new))
}

/// Mechanical energies of a state: kinetic `T = 1/2 int eta^T M eta dX`
/// (body inertia, no added mass) and elastic
/// `U = 1/2 sum_n l (xi_n - xi0)^T Sigma (xi_n - xi0)`.
pub fn energies(arm: &ArmSpec, state: &JointState, quad: &GaussLegendre) -> (f64, f64) {
    let kin = Kinematics::new(arm, state);
    let mut kinetic = 0.0;
    let mut elastic = 0.0;
    let rest = Twist::rest_strain().to_vector();
    for n in 1..=arm.section_count() {
        let section = &arm.sections[n - 1];
        let mm = arm.inertia(n);
        for (x, w) in quad.mapped(section.start, section.end) {
            let eta = kin.velocity_at(x).to_vector();
            kinetic += 0.5 * w * (eta.transpose() * mm * eta)[0];
        }
        let d = state.strain(n).to_vector() - rest;
        elastic += 0.5 * section.length * (d.transpose() * arm.stiffness(n) * d)[0];
    }
    (kinetic, elastic)
}

/// Largest stable explicit RK4 step for the arm, from the spectral radius
/// of the rest-state linearization of the first-order system.
///
/// The Kelvin-Voigt viscosity produces fast real relaxation modes (thousands
/// of 1/s for multi-section arms) that bound the step well below the elastic
/// oscillation periods; `safety` scales the stability-limit step (`0.6` is a
/// sound default).
pub fn stable_dt_estimate(arm: &ArmSpec, quad: &GaussLegendre, safety: f64) -> f64 {
    let n = arm.dof();
    let rest = JointState::rest(arm.section_count());
    let accel = |xi: &DVec, xd: &DVec| -> DVec {
        let st = JointState::new(xi.clone(), xd.clone());
        let coeffs = assemble(arm, &st, &ActuationInput::none(arm), &[], quad);
        forward_dynamics(&coeffs, &st).expect("rest-state mass matrix is positive definite")
    };
    let mut jac = crate::DMat::zeros(2 * n, 2 * n);
    for c in 0..n {
        jac[(c, n + c)] = 1.0;
    }
    let h = 1e-7;
    for c in 0..n {
        let mut xp = rest.xi.clone();
        let mut xm = rest.xi.clone();
        xp[c] += h;
        xm[c] -= h;
        let d = (accel(&xp, &rest.xi_dot) - accel(&xm, &rest.xi_dot)) / (2.0 * h);
        for r in 0..n {
            jac[(n + r, c)] = d[r];
        }
        let mut vp = rest.xi_dot.clone();
        let mut vm = rest.xi_dot.clone();
        vp[c] += h;
        vm[c] -= h;
        let d = (accel(&rest.xi, &vp) - accel(&rest.xi, &vm)) / (2.0 * h);
        for r in 0..n {
            jac[(n + r, n + c)] = d[r];
        }
    }
    let rho = jac
        .complex_eigenvalues()
        .iter()
        .map(|e| e.re.hypot(e.im))
        .fold(0.0, f64::max);
    if rho == 0.0 {
        return f64::INFINITY;
    }
    safety * 2.78 / rho
}

/// Integrator settings for a full run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSettings {
    pub dt: f64,
    pub t_end: f64,
    /// Record every this many steps (1 records every step).
    pub output_every: usize,
}

/// Recorded simulation output.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub xi: Vec<DVec>,
    pub xi_dot: Vec<DVec>,
    /// Station abscissae sampled at every record (m).
    pub stations: Vec<f64>,
    /// World-frame station poses, one row per record.
    pub station_poses: Vec<Vec<Transform>>,
    pub kinetic: Vec<f64>,
    pub elastic: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> JointState {
        JointState::new(
            self.xi.last().expect("empty trajectory").clone(),
            self.xi_dot.last().expect("empty trajectory").clone(),
        )
    }

    /// Total energy change relative to the first record.
    pub fn energy_drift(&self) -> f64 {
        let e0 = self.kinetic[0] + self.elastic[0];
        let e1 = self.kinetic[self.len() - 1] + self.elastic[self.len() - 1];
        e1 - e0
    }
}

/// Integrate from `initial` over `[0, t_end]`, recording states, station
/// poses and energies every `output_every` steps (plus the final step).
pub fn run(
    ctx: &SimContext,
    settings: &SimSettings,
    initial: JointState,
    stations: &[f64],
) -> Result<Trajectory, SimError> {
    assert!(settings.t_end >= 0.0 && settings.dt > 0.0);
    let steps = (settings.t_end / settings.dt).round() as usize;
    let every = settings.output_every.max(1);
    let mut traj = Trajectory {
        times: Vec::new(),
        xi: Vec::new(),
        xi_dot: Vec::new(),
        stations: stations.to_vec(),
        station_poses: Vec::new(),
        kinetic: Vec::new(),
        elastic: Vec::new(),
    };
    let mut state = initial;
    let record = |t: f64, state: &JointState, traj: &mut Trajectory| {
        let kin = Kinematics::new(ctx.arm, state);
        traj.times.push(t);
        traj.xi.push(state.xi.clone());
        traj.xi_dot.push(state.xi_dot.clone());
        traj.station_poses
            .push(stations.iter().map(|&x| kin.world_pose_at(x)).collect());
        let (ke, pe) = energies(ctx.arm, state, ctx.quad);
        traj.kinetic.push(ke);
        traj.elastic.push(pe);
    };
    record(0.0, &state, &mut traj);
    for k in 0..steps {
        let t = k as f64 * settings.dt;
        state = step(ctx, &state, t, settings.dt)?;
        if (k + 1) % every == 0 || k + 1 == steps {
            record((k + 1) as f64 * settings.dt, &state, &mut traj);
        }
    }
    Ok(traj)
}
