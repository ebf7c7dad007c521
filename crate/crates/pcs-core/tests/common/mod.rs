//! Shared independent oracles for the integration tests.
//!
//! Everything here recomputes quantities along a different route than the
//! library: matrix-ODE integration for the exponential, Gauss quadrature of
//! the Adjoint for the integrated adjoint, from-scratch products for the
//! Jacobian blocks, and textbook block-by-block sums for the coefficient
//! matrices.

#![allow(dead_code)]

use pcs_core::arm::ArmSpec;
use pcs_core::kinematics::JointState;
use pcs_core::lie::{Transform, Twist};
use pcs_core::quadrature::GaussLegendre;
use pcs_core::{DMat, DVec, Mat4, Mat6, Vec3, Vec6};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        return lo;
    }
    rng.random_range(lo..hi)
}

/// Random twist with angular entries in `[-ang, ang]` and linear entries in
/// `[-lin, lin]`.
pub fn random_twist(rng: &mut ChaCha8Rng, ang: f64, lin: f64) -> Twist {
    Twist::new(
        Vec3::new(
            uniform(rng, -ang, ang),
            uniform(rng, -ang, ang),
            uniform(rng, -ang, ang),
        ),
        Vec3::new(
            uniform(rng, -lin, lin),
            uniform(rng, -lin, lin),
            uniform(rng, -lin, lin),
        ),
    )
}

/// Random strain near the straight reference: curvature scale `k`, axial
/// stretch within `1 +- s`, shear within `+- s`.
pub fn random_strain(rng: &mut ChaCha8Rng, k: f64, s: f64) -> Vec6 {
    Vec6::new(
        uniform(rng, -k, k),
        uniform(rng, -k, k),
        uniform(rng, -k, k),
        1.0 + uniform(rng, -s, s),
        uniform(rng, -s, s),
        uniform(rng, -s, s),
    )
}

/// Random joint state for an `n`-section arm.
pub fn random_state(
    rng: &mut ChaCha8Rng,
    n: usize,
    k_scale: f64,
    rate_scale: f64,
    accel_scale: Option<f64>,
) -> JointState {
    let mut xi = DVec::zeros(6 * n);
    let mut xi_dot = DVec::zeros(6 * n);
    for i in 0..n {
        xi.fixed_rows_mut::<6>(6 * i)
            .copy_from(&random_strain(rng, k_scale, 0.2));
        for c in 0..6 {
            xi_dot[6 * i + c] = uniform(rng, -rate_scale, rate_scale);
        }
    }
    let state = JointState::new(xi, xi_dot);
    match accel_scale {
        Some(a) => {
            let mut xi_ddot = DVec::zeros(6 * n);
            for i in 0..6 * n {
                xi_ddot[i] = uniform(rng, -a, a);
            }
            state.with_acceleration(xi_ddot)
        }
        None => state,
    }
}

/// Reference exponential: RK4 integration of `g' = g hat(xi)` from the
/// identity over `[0, x]`.
pub fn ode_exp(xi: &Twist, x: f64, step: f64) -> Transform {
    let hat = xi.hat();
    let steps = (x / step).ceil().max(1.0) as usize;
    let h = x / steps as f64;
    let mut g = Mat4::identity();
    for _ in 0..steps {
        let k1 = g * hat;
        let k2 = (g + k1 * (0.5 * h)) * hat;
        let k3 = (g + k2 * (0.5 * h)) * hat;
        let k4 = (g + k3 * h) * hat;
        g += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    Transform::from_homogeneous(&g)
}

/// Reference integrated adjoint: Gauss quadrature of `Ad(exp(s xi))`.
pub fn quad_exp_adjoint_integral(xi: &Twist, x: f64, points: usize) -> Mat6 {
    let rule = GaussLegendre::new(points);
    let mut out = Mat6::zeros();
    for (s, w) in rule.mapped(0.0, x) {
        out += xi.exp(s).adjoint() * w;
    }
    out
}

/// From-scratch Jacobian block `S_m(X)` by the explicit descending product
/// of inverse Adjoints; uses only `exp` and quadrature.
pub fn naive_block(arm: &ArmSpec, state: &JointState, m: usize, x: f64) -> Mat6 {
    let n = arm.section_of(x);
    if m > n {
        return Mat6::zeros();
    }
    let mut prod = Mat6::identity();
    for j in (m..=n).rev() {
        let xj = x.min(arm.sections[j - 1].end) - arm.sections[j - 1].start;
        let xi_j = state.strain(j);
        if j > m {
            prod *= xi_j.exp(xj).inverse().adjoint();
        } else {
            prod *= xi_j.exp(xj).inverse().adjoint() * quad_exp_adjoint_integral(&xi_j, xj, 32);
        }
    }
    prod
}

pub fn naive_jacobian(arm: &ArmSpec, state: &JointState, x: f64) -> DMat {
    let mut j = DMat::zeros(6, arm.dof());
    for m in 1..=arm.section_count() {
        let block = naive_block(arm, state, m, x);
        j.view_mut((0, 6 * (m - 1)), (6, 6)).copy_from(&block);
    }
    j
}

/// From-scratch Jacobian time derivative by the closed-form block sum.
pub fn naive_jacobian_dot(arm: &ArmSpec, state: &JointState, x: f64) -> DMat {
    let n = arm.section_of(x);
    let blocks: Vec<Mat6> = (1..=n).map(|m| naive_block(arm, state, m, x)).collect();
    let mut jd = DMat::zeros(6, arm.dof());
    for i in 1..n {
        let mut w = Vec6::zeros();
        for j in (i + 1)..=n {
            w += blocks[j - 1] * state.strain_rate(j);
        }
        let block = -Twist::from_vector(&w).adjoint() * blocks[i - 1];
        jd.view_mut((0, 6 * (i - 1)), (6, 6)).copy_from(&block);
    }
    jd
}

/// Body-chain pose by explicit per-section exponential products.
pub fn naive_pose(arm: &ArmSpec, state: &JointState, x: f64) -> Transform {
    let n = arm.section_of(x);
    let mut g = Transform::identity();
    for j in 1..n {
        g = g.compose(&state.strain(j).exp(arm.sections[j - 1].length));
    }
    g.compose(&state.strain(n).exp(x - arm.sections[n - 1].start))
}

/// Textbook block-by-block coefficient assembly (no recursion, no reuse):
/// returns `(mass, c1, c2, drag, gravity)`.
pub fn naive_coefficients(
    arm: &ArmSpec,
    state: &JointState,
    quad: &GaussLegendre,
) -> (DMat, DMat, DMat, DMat, DMat) {
    let nn = arm.section_count();
    let dof = arm.dof();
    let mut mass = DMat::zeros(dof, dof);
    let mut c1 = DMat::zeros(dof, dof);
    let mut c2 = DMat::zeros(dof, dof);
    let mut drag = DMat::zeros(dof, dof);
    let mut gravity = DMat::zeros(dof, 6);
    let buoy = 1.0 - arm.environment.water_density / arm.material.density;
    let water = arm.environment.water_density > 0.0;

    for n in 1..=nn {
        for m in 1..=nn {
            let mut mb = Mat6::zeros();
            let mut c1b = Mat6::zeros();
            let mut c2b = Mat6::zeros();
            let mut db = Mat6::zeros();
            for i in n.max(m)..=nn {
                let section = &arm.sections[i - 1];
                let ma = arm.inertia_added(i);
                for (x, w) in quad.mapped(section.start, section.end) {
                    let sn = naive_block(arm, state, n, x);
                    let sm = naive_block(arm, state, m, x);
                    let eta = {
                        let mut e = Vec6::zeros();
                        for j in 1..=i {
                            e += naive_block(arm, state, j, x) * state.strain_rate(j);
                        }
                        e
                    };
                    mb += sn.transpose() * ma * sm * w;
                    c1b += sn.transpose() * Twist::from_vector(&eta).coadjoint() * ma * sm * w;
                    let mut wsum = Vec6::zeros();
                    for j in (m + 1)..=i {
                        wsum += naive_block(arm, state, j, x) * state.strain_rate(j);
                    }
                    c2b += sn.transpose() * ma * Twist::from_vector(&wsum).adjoint() * sm * w;
                    if water {
                        let speed = eta.fixed_rows::<3>(3).norm();
                        db += sn.transpose() * arm.drag_matrix(i) * sm * (w * speed);
                    }
                }
            }
            mass.view_mut((6 * (n - 1), 6 * (m - 1)), (6, 6)).copy_from(&mb);
            c1.view_mut((6 * (n - 1), 6 * (m - 1)), (6, 6)).copy_from(&c1b);
            c2.view_mut((6 * (n - 1), 6 * (m - 1)), (6, 6)).copy_from(&c2b);
            drag.view_mut((6 * (n - 1), 6 * (m - 1)), (6, 6)).copy_from(&db);
        }
        let mut gb = Mat6::zeros();
        for i in n..=nn {
            let section = &arm.sections[i - 1];
            for (x, w) in quad.mapped(section.start, section.end) {
                let sn = naive_block(arm, state, n, x);
                let ad_inv = naive_pose(arm, state, x).inverse().adjoint();
                gb += sn.transpose() * arm.inertia(i) * ad_inv * (w * buoy);
            }
        }
        gravity.view_mut((6 * (n - 1), 0), (6, 6)).copy_from(&gb);
    }
    (mass, c1, c2, drag, gravity)
}

/// Max absolute difference between two matrices.
pub fn max_diff(a: &DMat, b: &DMat) -> f64 {
    (a - b).amax()
}
