use pcs_core::dynamics::{assemble, forward_dynamics, ActuationInput};
use pcs_core::kinematics::{JointState, Kinematics};
use pcs_core::quadrature::GaussLegendre;
use pcs_core::scenario::{parse_scenario, preset};
use pcs_core::{DVec, Vec3};

fn main() {
    let arm = parse_scenario(preset("plane").unwrap()).unwrap().arm;
    let quad = GaussLegendre::new(5);
    let mut straight = JointState::rest(3);
    for n in 0..3 {
        straight.xi_dot[6 * n + 3] = 0.3;
        straight.xi_dot[6 * n + 1] = 0.1;
    }
    let straight = straight.with_acceleration(DVec::from_element(18, 0.2));
    let mut bent = straight.clone();
    for n in 0..3 {
        let k = Vec3::new(1.0, -2.0, 2.0).normalize() * 1e-9;
        bent.xi[6 * n] = k.x;
        bent.xi[6 * n + 1] = k.y;
        bent.xi[6 * n + 2] = k.z;
    }
    let ks = Kinematics::new(&arm, &straight);
    let kb = Kinematics::new(&arm, &bent);
    let mut per = vec![("pose", 0.0f64), ("vel", 0.0), ("acc", 0.0), ("jac", 0.0), ("jdot", 0.0), ("sjac", 0.0)];
    for x in [0.0, 0.1, 0.25, 0.4, 0.6, 0.75] {
        per[0].1 = per[0].1.max((ks.pose_at(x).to_homogeneous() - kb.pose_at(x).to_homogeneous()).amax());
        per[1].1 = per[1].1.max((ks.velocity_at(x).to_vector() - kb.velocity_at(x).to_vector()).amax());
        per[2].1 = per[2].1.max((ks.acceleration_at(x).to_vector() - kb.acceleration_at(x).to_vector()).amax());
        per[3].1 = per[3].1.max((ks.jacobian(x) - kb.jacobian(x)).amax());
        per[4].1 = per[4].1.max((ks.jacobian_dot(x) - kb.jacobian_dot(x)).amax());
        per[5].1 = per[5].1.max((ks.spatial_jacobian(x) - kb.spatial_jacobian(x)).amax());
    }
    for (n, v) in &per { println!("{n}: {v:.3e}"); }
    let cs = assemble(&arm, &straight, &ActuationInput::none(&arm), &[], &quad);
    let cb = assemble(&arm, &bent, &ActuationInput::none(&arm), &[], &quad);
    println!("mass: {:.3e}", (&cs.mass - &cb.mass).amax());
    println!("c1: {:.3e}", (&cs.coriolis1 - &cb.coriolis1).amax());
    println!("c2: {:.3e}", (&cs.coriolis2 - &cb.coriolis2).amax());
    println!("grav: {:.3e}", (&cs.gravity - &cb.gravity).amax());
    println!("tau: {:.3e}", (&cs.tau - &cb.tau).amax());
    let acc_s = forward_dynamics(&cs, &straight).unwrap();
    let acc_b = forward_dynamics(&cb, &bent).unwrap();
    println!("acc rel: {:.3e} (amax {:.3e})", (&acc_s - &acc_b).amax() / (1.0 + acc_s.amax()), acc_s.amax());
    println!("tau entries scale: {:.3e}", cs.tau.amax());
}
