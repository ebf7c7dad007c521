//! Cantilever benchmark: discrete PCS arms with 1..n sections against the
//! continuous Cosserat reference under a constant transverse tip load.
//!
//! Steady states come from exact static solves of each model (Newton on the
//! generalized equilibrium for the PCS arm, shooting on the continuum BVP
//! for the reference); the oscillation frequencies come from short dynamic
//! runs, measured by interpolated zero crossings of the tip deflection
//! around its steady value.

use crate::arm::{ActuationKind, ArmSpec, EnvironmentSpec, MaterialSpec};
use crate::dynamics::{ActuationInput, PointLoad};
use crate::kinematics::{JointState, Kinematics};
use crate::lie::Transform;
use crate::oracle::{run_rod, solve_static, RodParams};
use crate::quadrature::GaussLegendre;
use crate::sim::{run, Schedule, SimContext, SimError, SimSettings};
use crate::statics::{solve_equilibrium, EquilibriumError, EquilibriumOptions};
use crate::{Mat3, Vec3, Vec6};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CantileverError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Equilibrium(#[from] EquilibriumError),
    #[error("trajectory time grids are misaligned")]
    MisalignedGrids,
    #[error("too few oscillations to estimate a frequency for {0} sections")]
    NoFrequency(usize),
}

/// Benchmark definition: a soft silicone rod clamped sideways with a dead
/// transverse tip force (base-frame components).
#[derive(Debug, Clone)]
pub struct CantileverCase {
    pub length: f64,
    pub radius: f64,
    pub material: MaterialSpec,
    /// Spatial-to-base transform.
    pub base_transform: Transform,
    /// Tip force in the base frame (N).
    pub tip_force_base: Vec3,
}

impl CantileverCase {
    /// The bundled benchmark case: L = 250 mm, r = 10 mm, E = 110 kPa,
    /// viscosity 0.3 kPa s, nu = 0, rho = 2000 kg/m3, 10 mN transverse tip
    /// load, beam lying along the spatial +y axis.
    pub fn benchmark() -> Self {
        Self {
            length: 0.25,
            radius: 0.01,
            material: MaterialSpec {
                young_modulus: 110e3,
                shear_viscosity: 300.0,
                poisson_ratio: 0.0,
                density: 2000.0,
            },
            base_transform: Transform::new(
                Mat3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0),
                Vec3::zeros(),
            ),
            tip_force_base: Vec3::new(0.0, 0.01, 0.0),
        }
    }

    pub fn environment(&self) -> EnvironmentSpec {
        EnvironmentSpec {
            base_transform: self.base_transform,
            ..EnvironmentSpec::air()
        }
    }

    /// PCS arm with `n` equal sections.
    pub fn arm(&self, n: usize) -> ArmSpec {
        ArmSpec::new(
            &vec![(self.length / n as f64, self.radius); n],
            self.material,
            self.environment(),
            vec![],
            ActuationKind::Fluidic,
        )
        .expect("valid cantilever arm")
    }

    /// Tip wrench in the spatial (world) frame.
    pub fn tip_load_world(&self) -> PointLoad {
        let f = self.base_transform.rotation * self.tip_force_base;
        PointLoad {
            wrench: Vec6::new(0.0, 0.0, 0.0, f.x, f.y, f.z),
            position: self.length,
        }
    }

    pub fn rod_params(&self, nodes: usize) -> RodParams {
        RodParams {
            length: self.length,
            radius: self.radius,
            material: self.material,
            environment: self.environment(),
            tip_wrench: Vec6::new(
                0.0,
                0.0,
                0.0,
                self.tip_force_base.x,
                self.tip_force_base.y,
                self.tip_force_base.z,
            ),
            nodes,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CompareOptions {
    /// Dynamic window for the frequency measurement (s).
    pub window: f64,
    /// Fixed PCS step; `None` picks the stability-limited step per arm.
    pub pcs_dt: Option<f64>,
    pub oracle_nodes: usize,
    /// Recording cadence of both models (s).
    pub record_dt: f64,
    pub quadrature_points: usize,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            window: 5.0,
            pcs_dt: None,
            oracle_nodes: 64,
            record_dt: 5e-3,
            quadrature_points: 5,
        }
    }
}

/// Per-section-count comparison outcome.
#[derive(Debug, Clone, Serialize)]
pub struct SectionComparison {
    pub sections: usize,
    /// Steady tip error along the spatial e1 axis, percent of length.
    pub e1_pct: f64,
    /// Steady tip error along the spatial e2 axis, percent of length.
    pub e2_pct: f64,
    /// Dominant tip-oscillation frequency (Hz).
    pub frequency_hz: f64,
    pub steady_tip_world: [f64; 3],
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub cases: Vec<SectionComparison>,
    pub oracle_frequency_hz: f64,
    pub oracle_steady_tip_world: [f64; 3],
    pub elapsed_s: f64,
}

/// Frequency from interpolated zero crossings of `signal - center`.
pub fn crossing_frequency(times: &[f64], signal: &[f64], center: f64) -> Option<f64> {
    let mut crossings = Vec::new();
    for i in 1..signal.len() {
        let a = signal[i - 1] - center;
        let b = signal[i] - center;
        if a == 0.0 {
            continue;
        }
        if a.signum() != b.signum() && b != 0.0 {
            let frac = a / (a - b);
            crossings.push(times[i - 1] + frac * (times[i] - times[i - 1]));
        }
    }
    if crossings.len() < 2 {
        return None;
    }
    let span = crossings.last().unwrap() - crossings.first().unwrap();
    Some((crossings.len() - 1) as f64 / (2.0 * span))
}

/// Per-record tip position error percentages `(e1, e2)` between two aligned
/// trajectories.
pub fn tip_error_series(
    times_a: &[f64],
    tips_a: &[Vec3],
    times_b: &[f64],
    tips_b: &[Vec3],
    length: f64,
) -> Result<Vec<(f64, f64)>, CantileverError> {
    if times_a.len() != times_b.len()
        || times_a
            .iter()
            .zip(times_b)
            .any(|(a, b)| (a - b).abs() > 1e-9)
    {
        return Err(CantileverError::MisalignedGrids);
    }
    Ok(tips_a
        .iter()
        .zip(tips_b)
        .map(|(a, b)| {
            (
                (a.x - b.x).abs() / length * 100.0,
                (a.y - b.y).abs() / length * 100.0,
            )
        })
        .collect())
}

/// Steady world-frame tip position of the PCS arm under the case load.
pub fn pcs_steady_tip(
    case: &CantileverCase,
    sections: usize,
    quad: &GaussLegendre,
) -> Result<(Vec3, JointState), EquilibriumError> {
    let arm = case.arm(sections);
    let load = case.tip_load_world();
    let xi = solve_equilibrium(
        &arm,
        &ActuationInput::none(&arm),
        &[load],
        quad,
        &EquilibriumOptions::default(),
    )?;
    let state = JointState::new(xi, crate::DVec::zeros(arm.dof()));
    let kin = Kinematics::new(&arm, &state);
    Ok((kin.world_pose_at(case.length).position, state))
}

/// Run the full comparison for the given section counts.
pub fn compare(
    case: &CantileverCase,
    section_counts: &[usize],
    opts: &CompareOptions,
) -> Result<ComparisonReport, CantileverError> {
    let start = std::time::Instant::now();
    let quad = GaussLegendre::new(opts.quadrature_points);

    // Reference steady state: continuum BVP by shooting.
    let rod = case.rod_params(opts.oracle_nodes);
    let static_ref = solve_static(&rod, 2048);
    let ref_tip = static_ref.tip_world(&case.environment());

    // Reference dynamics for the frequency.
    let (_, rod_traj) = run_rod(rod, opts.window, None, opts.record_dt)?;
    let sig: Vec<f64> = rod_traj.tip_positions.iter().map(|p| p.x).collect();
    let oracle_freq = crossing_frequency(&rod_traj.times, &sig, ref_tip.x)
        .ok_or(CantileverError::NoFrequency(0))?;

    let mut cases = Vec::new();
    for &n in section_counts {
        let (tip, _) = pcs_steady_tip(case, n, &quad)?;
        let e1 = (tip.x - ref_tip.x).abs() / case.length * 100.0;
        let e2 = (tip.y - ref_tip.y).abs() / case.length * 100.0;

        let arm = case.arm(n);
        let schedule = Schedule::none(&arm);
        let loads = [case.tip_load_world()];
        let ctx = SimContext { arm: &arm, schedule: &schedule, loads: &loads, quad: &quad };
        let dt = opts
            .pcs_dt
            .unwrap_or_else(|| crate::sim::stable_dt_estimate(&arm, &quad, 0.6).min(1e-3));
        let settings = SimSettings {
            dt,
            t_end: opts.window,
            output_every: (opts.record_dt / dt).round().max(1.0) as usize,
        };
        let traj = run(&ctx, &settings, JointState::rest(n), &[case.length])?;
        let sig: Vec<f64> = traj.station_poses.iter().map(|p| p[0].position.x).collect();
        let freq = crossing_frequency(&traj.times, &sig, tip.x)
            .ok_or(CantileverError::NoFrequency(n))?;

        cases.push(SectionComparison {
            sections: n,
            e1_pct: e1,
            e2_pct: e2,
            frequency_hz: freq,
            steady_tip_world: [tip.x, tip.y, tip.z],
        });
    }

    Ok(ComparisonReport {
        cases,
        oracle_frequency_hz: oracle_freq,
        oracle_steady_tip_world: [ref_tip.x, ref_tip.y, ref_tip.z],
        elapsed_s: start.elapsed().as_secs_f64(),
    })
}
