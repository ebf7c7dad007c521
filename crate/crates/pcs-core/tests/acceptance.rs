//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! with the measured values (run with `--nocapture` to see them).

mod common;

use common::*;
use pcs_core::arm::ArmSpec;
use pcs_core::cantilever::{compare, CantileverCase, CompareOptions, ComparisonReport};
use pcs_core::dynamics::{
    assemble, forward_dynamics, generalized_actuation_cable, internal_wrench, ActuationInput,
};
use pcs_core::kinematics::{JointState, Kinematics};
use pcs_core::lie::Twist;
use pcs_core::quadrature::GaussLegendre;
use pcs_core::scenario::{parse_scenario, preset, screws_of_state};
use pcs_core::sim::{run, Schedule, SimContext, SimSettings};
use pcs_core::{DVec, Vec3, Vec6};
use std::sync::LazyLock;

/// The cantilever comparison backs criteria 1, 2 and 4; run it once.
static CANTILEVER: LazyLock<ComparisonReport> = LazyLock::new(|| {
    compare(
        &CantileverCase::benchmark(),
        &[1, 2, 3],
        &CompareOptions::default(),
    )
    .expect("cantilever comparison runs")
});

#[test]
fn criterion_1_cantilever_steady_state_errors() {
    let report = &*CANTILEVER;
    let reference = [(5.55, 1.29), (1.58, 0.48), (1.42, 0.07)];
    let mut failures = Vec::new();
    for (case, (r1, r2)) in report.cases.iter().zip(reference) {
        for (axis, got, want) in [("e1", case.e1_pct, r1), ("e2", case.e2_pct, r2)] {
            let ok = (got - want).abs() <= 0.5;
            println!(
                "criterion 1 [{} sections, {axis}]: {} — measured {got:.3}% vs reference {want}% (tol ±0.5)",
                case.sections,
                if ok { "PASS" } else { "FAIL" },
            );
            if !ok {
                failures.push(format!(
                    "{} sections {axis}: {got:.3}% vs {want}%",
                    case.sections
                ));
            }
        }
    }
    println!(
        "criterion 1 runtime: {:.1} s (target < 120 s)",
        report.elapsed_s
    );
    assert!(
        failures.is_empty(),
        "cantilever steady-state entries outside ±0.5 pp: {failures:?} \
         (the exact-model errors follow a clean 1/n^2 law; see the ledger \
         analysis of the three-section e1 reference entry)"
    );
}

#[test]
fn criterion_2_errors_decrease_monotonically() {
    let report = &*CANTILEVER;
    let e1: Vec<f64> = report.cases.iter().map(|c| c.e1_pct).collect();
    let e2: Vec<f64> = report.cases.iter().map(|c| c.e2_pct).collect();
    let ok = e1.windows(2).all(|w| w[1] < w[0]) && e2.windows(2).all(|w| w[1] < w[0]);
    println!(
        "criterion 2: {} — e1 = {e1:.3?}, e2 = {e2:.3?} strictly decreasing 1 -> 2 -> 3",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok);
}

#[test]
fn criterion_3_out_of_plane_screw_parameters() {
    let scenario = parse_scenario(preset("outofplane").unwrap()).unwrap();
    let quad = GaussLegendre::new(scenario.quadrature_points);
    let ctx = SimContext {
        arm: &scenario.arm,
        schedule: &scenario.schedule,
        loads: &scenario.point_loads,
        quad: &quad,
    };
    let start = std::time::Instant::now();
    let traj = run(&ctx, &scenario.settings, JointState::rest(3), &[]).unwrap();
    let screws = screws_of_state(&scenario.arm, &traj.final_state());
    let pitch_ref = [8.0, -45.0, -683.0];
    let mag_ref = [3.9, 1.0, 0.3];
    let pitch_tol = [0.15, 0.15, 0.20];
    let mut ok = true;
    for (i, s) in screws.iter().enumerate() {
        let dp = (s.pitch_mm - pitch_ref[i]).abs() / pitch_ref[i].abs();
        let dm = (s.magnitude_rad - mag_ref[i]).abs() / mag_ref[i];
        let this_ok = dp <= pitch_tol[i] && dm <= 0.15;
        ok &= this_ok;
        println!(
            "criterion 3 [section {}]: {} — pitch {:.1} mm vs {} mm ({:.1}%), magnitude {:.3} vs {} ({:.1}%)",
            i + 1,
            if this_ok { "PASS" } else { "FAIL" },
            s.pitch_mm,
            pitch_ref[i],
            dp * 100.0,
            s.magnitude_rad,
            mag_ref[i],
            dm * 100.0
        );
    }
    println!(
        "criterion 3 runtime: {:.1} s (target < 60 s)",
        start.elapsed().as_secs_f64()
    );
    assert!(ok);
}

#[test]
fn criterion_4_oscillation_frequency_ordering() {
    let report = &*CANTILEVER;
    let f: Vec<f64> = report.cases.iter().map(|c| c.frequency_hz).collect();
    let fo = report.oracle_frequency_hz;
    let ok = f[0] > f[1] && f[1] > f[2] && f[2] > fo;
    println!(
        "criterion 4: {} — f(1) = {:.4} > f(2) = {:.4} > f(3) = {:.4} > f(oracle) = {:.4} Hz",
        if ok { "PASS" } else { "FAIL" },
        f[0],
        f[1],
        f[2],
        fo
    );
    assert!(ok);
}

#[test]
fn criterion_5_kinematic_oracle_equivalence() {
    let start = std::time::Instant::now();
    // Exponential map versus the matrix-ODE oracle, 100 random twists with
    // rotation rates spanning [0, 50] rad/m.
    let mut r = rng(101);
    let mut worst_exp: f64 = 0.0;
    for k in 0..100 {
        let theta = 50.0 * k as f64 / 99.0;
        let axis = Vec3::new(
            uniform(&mut r, -1.0, 1.0),
            uniform(&mut r, -1.0, 1.0),
            uniform(&mut r, -1.0, 1.0),
        )
        .normalize();
        let lin = Vec3::new(
            1.0 + uniform(&mut r, -0.5, 0.5),
            uniform(&mut r, -0.5, 0.5),
            uniform(&mut r, -0.5, 0.5),
        );
        let xi = Twist::new(axis * theta, lin);
        let x = uniform(&mut r, 0.0, 1.0);
        let step = 5e-5 / (1.0 + theta * x / 10.0);
        let d = (xi.exp(x).to_homogeneous() - ode_exp(&xi, x, step).to_homogeneous()).amax();
        worst_exp = worst_exp.max(d);
    }

    // Velocity recursion versus Jacobian product, and the two acceleration
    // forms, over 100 random states.
    let arm = plane_arm();
    let mut worst_vel: f64 = 0.0;
    let mut worst_acc: f64 = 0.0;
    for _ in 0..100 {
        let state = random_state(&mut r, 3, 5.0, 1.0, Some(2.0));
        let kin = Kinematics::new(&arm, &state);
        for k in 0..=10 {
            let x = arm.total_length() * k as f64 / 10.0;
            let vel_jac = kin.jacobian(x) * &state.xi_dot;
            let vel_rec = kin.velocity_at(x).to_vector();
            worst_vel = worst_vel
                .max((DVec::from_column_slice(vel_rec.as_slice()) - vel_jac).amax());
            let acc_jac = kin.jacobian(x) * state.xi_ddot.as_ref().unwrap()
                + kin.jacobian_dot(x) * &state.xi_dot;
            let acc_rec = kin.acceleration_at(x).to_vector();
            worst_acc = worst_acc
                .max((DVec::from_column_slice(acc_rec.as_slice()) - acc_jac).amax());
        }
    }
    let ok = worst_exp <= 1e-8 && worst_vel <= 1e-12 && worst_acc <= 1e-10;
    println!(
        "criterion 5: {} — exp vs ODE {:.2e} (≤1e-8), velocity identity {:.2e} (≤1e-12), acceleration identity {:.2e} (≤1e-10); {:.1} s",
        if ok { "PASS" } else { "FAIL" },
        worst_exp,
        worst_vel,
        worst_acc,
        start.elapsed().as_secs_f64()
    );
    assert!(ok);
}

#[test]
fn criterion_6_assembly_oracle_equivalence() {
    let start = std::time::Instant::now();
    let mut r = rng(102);
    let quad = GaussLegendre::new(5);
    let mut worst: f64 = 0.0;
    let mut spd_ok = true;
    let mut states = 0;
    for n in 1..=4usize {
        let arm = underwater_arm(n);
        for _ in 0..13 {
            if states >= 50 {
                break;
            }
            states += 1;
            let state = random_state(&mut r, n, 4.0, 1.0, None);
            let got = assemble(&arm, &state, &ActuationInput::none(&arm), &[], &quad);
            let (mass, c1, c2, drag, gravity) = naive_coefficients(&arm, &state, &quad);
            worst = worst
                .max(max_diff(&got.mass, &mass))
                .max(max_diff(&got.coriolis1, &c1))
                .max(max_diff(&got.coriolis2, &c2))
                .max(max_diff(&got.drag, &drag))
                .max(max_diff(&got.gravity, &gravity));
            spd_ok &= got.mass.clone().cholesky().is_some()
                && (&got.mass - got.mass.transpose()).amax() <= 1e-10 * got.mass.amax();
        }
    }
    let ok = worst <= 1e-10 && spd_ok;
    println!(
        "criterion 6: {} — recursive vs naive assembly {:.2e} (≤1e-10) over {states} states, mass SPD {}; {:.1} s",
        if ok { "PASS" } else { "FAIL" },
        worst,
        spd_ok,
        start.elapsed().as_secs_f64()
    );
    assert!(ok);
}

#[test]
fn criterion_7_energy_properties() {
    let start = std::time::Instant::now();
    // Conservative: free axial vibration, zero viscosity, in air, 10 s.
    let arm = conservative_arm();
    let quad = GaussLegendre::new(5);
    let schedule = Schedule::none(&arm);
    let ctx = SimContext { arm: &arm, schedule: &schedule, loads: &[], quad: &quad };
    let mut initial = JointState::rest(1);
    initial.xi[3] = 1.02;
    let settings = SimSettings { dt: 2.5e-4, t_end: 10.0, output_every: 40 };
    let traj = run(&ctx, &settings, initial, &[]).unwrap();
    let e0 = traj.kinetic[0] + traj.elastic[0];
    let drift = (0..traj.len())
        .map(|k| ((traj.kinetic[k] + traj.elastic[k]) - e0).abs())
        .fold(0.0, f64::max)
        / e0;

    // Dissipative: viscous bending in air and drag in water, both monotone.
    let mut monotone = true;
    for arm in [viscous_arm(), drag_arm()] {
        let schedule = Schedule::none(&arm);
        let ctx = SimContext { arm: &arm, schedule: &schedule, loads: &[], quad: &quad };
        let mut initial = JointState::rest(1);
        initial.xi[2] = 0.01;
        let settings = SimSettings { dt: 1e-3, t_end: 5.0, output_every: 10 };
        let traj = run(&ctx, &settings, initial, &[]).unwrap();
        let mut prev = f64::INFINITY;
        for k in 0..traj.len() {
            let e = traj.kinetic[k] + traj.elastic[k];
            monotone &= e <= prev + 1e-9;
            prev = e;
        }
    }
    let ok = drift <= 1e-6 && monotone;
    println!(
        "criterion 7: {} — conservative drift {:.2e} (≤1e-6 over 10 s), dissipative monotone {}; {:.1} s",
        if ok { "PASS" } else { "FAIL" },
        drift,
        monotone,
        start.elapsed().as_secs_f64()
    );
    assert!(ok);
}

#[test]
fn criterion_8_straight_pose_regularity() {
    // Everything evaluated at the exact straight rest strain must be finite
    // and match a theta = 1e-9 rotation perturbation to 1e-10.
    let arm = plane_arm();
    let quad = GaussLegendre::new(5);
    let mut straight = JointState::rest(3);
    for n in 0..3 {
        straight.xi_dot[6 * n + 3] = 0.3;
        straight.xi_dot[6 * n + 1] = 0.1;
    }
    let straight = straight.with_acceleration(DVec::from_element(18, 0.2));
    let mut bent = straight.clone();
    for n in 0..3 {
        // Rotation magnitude 1e-9 split across the angular components.
        let k = Vec3::new(1.0, -2.0, 2.0).normalize() * 1e-9;
        bent.xi[6 * n] = k.x;
        bent.xi[6 * n + 1] = k.y;
        bent.xi[6 * n + 2] = k.z;
    }
    let ks = Kinematics::new(&arm, &straight);
    let kb = Kinematics::new(&arm, &bent);
    let mut worst: f64 = 0.0;
    for x in [0.0, 0.1, 0.25, 0.4, 0.6, 0.75] {
        worst = worst
            .max((ks.pose_at(x).to_homogeneous() - kb.pose_at(x).to_homogeneous()).amax())
            .max((ks.velocity_at(x).to_vector() - kb.velocity_at(x).to_vector()).amax())
            .max(
                (ks.acceleration_at(x).to_vector() - kb.acceleration_at(x).to_vector()).amax(),
            )
            .max(max_diff(&ks.jacobian(x), &kb.jacobian(x)))
            .max(max_diff(&ks.jacobian_dot(x), &kb.jacobian_dot(x)))
            .max(max_diff(&ks.spatial_jacobian(x), &kb.spatial_jacobian(x)));
    }
    let cs = assemble(&arm, &straight, &ActuationInput::none(&arm), &[], &quad);
    let cb = assemble(&arm, &bent, &ActuationInput::none(&arm), &[], &quad);
    worst = worst
        .max(max_diff(&cs.mass, &cb.mass))
        .max(max_diff(&cs.coriolis1, &cb.coriolis1))
        .max(max_diff(&cs.coriolis2, &cb.coriolis2))
        .max(max_diff(&cs.gravity, &cb.gravity))
        .max((&cs.tau - &cb.tau).amax());
    let acc_s = forward_dynamics(&cs, &straight).unwrap();
    let acc_b = forward_dynamics(&cb, &bent).unwrap();
    worst = worst.max((&acc_s - &acc_b).amax() / (1.0 + acc_s.amax()));
    let finite = acc_s.iter().all(|v| v.is_finite());
    let ok = worst <= 1e-10 && finite;
    println!(
        "criterion 8: {} — straight vs theta=1e-9 evaluation differ by {:.2e} (≤1e-10), finite {}",
        if ok { "PASS" } else { "FAIL" },
        worst,
        finite
    );
    assert!(ok);
}

#[test]
fn criterion_9_prototype_scenario_runs_bounded() {
    let start = std::time::Instant::now();
    let scenario = parse_scenario(preset("prototype").unwrap()).unwrap();
    let quad = GaussLegendre::new(scenario.quadrature_points);
    let ctx = SimContext {
        arm: &scenario.arm,
        schedule: &scenario.schedule,
        loads: &scenario.point_loads,
        quad: &quad,
    };
    let traj = run(&ctx, &scenario.settings, JointState::rest(4), &scenario.stations)
        .expect("prototype scenario completes");
    let mut kmax: f64 = 0.0;
    let mut finite = true;
    for xi in &traj.xi {
        finite &= xi.iter().all(|v| v.is_finite());
        for n in 0..4 {
            kmax = kmax.max(xi.fixed_rows::<3>(6 * n).norm());
        }
    }
    // Anchor topology: with every cable tensioned, the cable part of tau_4
    // is exactly zero (no cable reaches section 4).
    let state = traj.final_state();
    let tau = generalized_actuation_cable(&scenario.arm, &vec![1.0; 12], &state);
    let f_i = internal_wrench(&scenario.arm, 4, &state.strain(4), &state.strain_rate(4));
    let cable_part = Vec6::from(tau.fixed_rows::<6>(18)) + f_i * scenario.arm.sections[3].length;
    let ok = finite && kmax < 50.0 && cable_part.amax() == 0.0;
    println!(
        "criterion 9: {} — completed {} records, max |k| = {:.2} rad/m (<50), finite {}, tau_4 cable part = {:.1e}; {:.1} s",
        if ok { "PASS" } else { "FAIL" },
        traj.len(),
        kmax,
        finite,
        cable_part.amax(),
        start.elapsed().as_secs_f64()
    );
    assert!(ok);
}

// --- arm builders ---------------------------------------------------------

fn plane_arm() -> ArmSpec {
    parse_scenario(preset("plane").unwrap()).unwrap().arm
}

fn underwater_arm(n: usize) -> ArmSpec {
    use pcs_core::arm::*;
    ArmSpec::new(
        &vec![(0.25, 0.012); n],
        MaterialSpec {
            young_modulus: 110e3,
            shear_viscosity: 300.0,
            poisson_ratio: 0.5,
            density: 1080.0,
        },
        EnvironmentSpec {
            water_density: 1022.0,
            drag: DragCoefficients { cx: 0.01, cy: 2.5, cz: 2.5 },
            added_mass: AddedMassCoefficients { by: 1.5, bz: 1.5 },
            gravity: Vec6::new(0.0, 0.0, 0.0, -9.81, 0.0, 0.0),
            base_transform: pcs_core::lie::Transform::identity(),
        },
        vec![],
        ActuationKind::Fluidic,
    )
    .unwrap()
}

fn conservative_arm() -> ArmSpec {
    use pcs_core::arm::*;
    ArmSpec::new(
        &[(0.25, 0.01)],
        MaterialSpec {
            young_modulus: 110e3,
            shear_viscosity: 0.0,
            poisson_ratio: 0.0,
            density: 2000.0,
        },
        EnvironmentSpec::air(),
        vec![],
        ActuationKind::Fluidic,
    )
    .unwrap()
}

fn viscous_arm() -> ArmSpec {
    use pcs_core::arm::*;
    ArmSpec::new(
        &[(0.25, 0.01)],
        MaterialSpec {
            young_modulus: 110e3,
            shear_viscosity: 300.0,
            poisson_ratio: 0.0,
            density: 2000.0,
        },
        EnvironmentSpec::air(),
        vec![],
        ActuationKind::Fluidic,
    )
    .unwrap()
}

fn drag_arm() -> ArmSpec {
    use pcs_core::arm::*;
    ArmSpec::new(
        &[(0.25, 0.01)],
        MaterialSpec {
            young_modulus: 110e3,
            shear_viscosity: 0.0,
            poisson_ratio: 0.0,
            density: 1080.0,
        },
        EnvironmentSpec {
            water_density: 1022.0,
            drag: DragCoefficients { cx: 0.01, cy: 2.5, cz: 2.5 },
            added_mass: AddedMassCoefficients { by: 0.0, bz: 0.0 },
            gravity: Vec6::zeros(),
            base_transform: pcs_core::lie::Transform::identity(),
        },
        vec![],
        ActuationKind::Fluidic,
    )
    .unwrap()
}
