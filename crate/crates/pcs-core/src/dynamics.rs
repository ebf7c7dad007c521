//! Generalized PCS dynamics: coefficient assembly and forward dynamics.
//!
//! One call to [`assemble`] produces every coefficient of
//!
//! ```text
//! M xi'' + (C1 - C2) xi' = tau + F + N Ad_{gr}^{-1} G - D xi'
//! ```
//!
//! by a single base-to-tip sweep: section `i` contributes to the leading
//! `i x i` block square of `M`, `C1` and `D`, to block rows `1..=i` of the
//! gravity matrix, and to block columns `1..i` of `C2`. Within a section the
//! integrals run on per-section Gauss-Legendre points, and every Jacobian
//! block at a point is the cached boundary block of the previous section
//! left-multiplied by one local inverse Adjoint.

use crate::arm::{ActuationKind, ArmSpec};
use crate::kinematics::{JointState, Kinematics};
use crate::lie::Twist;
use crate::quadrature::GaussLegendre;
use crate::{DMat, DVec, Mat6, Vec3, Vec6};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("mass matrix is numerically singular (condition estimate {cond:.3e})")]
    SingularMass { cond: f64 },
}

/// Instantaneous actuation values.
#[derive(Debug, Clone, PartialEq)]
pub enum ActuationInput {
    /// Cable tensions (N), aligned with `arm.cables`.
    Cable { tensions: Vec<f64> },
    /// Chamber tip wrenches per section (N m, N).
    Fluidic { wrenches: Vec<Vec6> },
}

impl ActuationInput {
    /// No actuation, matching the arm's actuation kind.
    pub fn none(arm: &ArmSpec) -> Self {
        match arm.actuation_kind {
            ActuationKind::Cable => ActuationInput::Cable {
                tensions: vec![0.0; arm.cables.len()],
            },
            ActuationKind::Fluidic => ActuationInput::Fluidic {
                wrenches: vec![Vec6::zeros(); arm.section_count()],
            },
        }
    }
}

/// Concentrated wrench applied at abscissa `position`, expressed in the
/// spatial (world) frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointLoad {
    pub wrench: Vec6,
    pub position: f64,
}

/// One evaluation of all dynamic coefficients at a joint state.
#[derive(Debug, Clone)]
pub struct CoefficientSet {
    pub mass: DMat,
    pub coriolis1: DMat,
    pub coriolis2: DMat,
    pub drag: DMat,
    /// Gravity-buoyancy matrix, `6N x 6`.
    pub gravity: DMat,
    /// Generalized internal elastic/viscous plus actuation load.
    pub tau: DVec,
    /// Generalized concentrated external load.
    pub external: DVec,
    /// Gravity twist expressed in the base frame, `Ad_{gr}^{-1} G`.
    pub gravity_twist: Vec6,
}

impl CoefficientSet {
    pub fn mass_block(&self, n: usize, m: usize) -> Mat6 {
        self.mass.fixed_view::<6, 6>(6 * (n - 1), 6 * (m - 1)).into()
    }

    pub fn gravity_block(&self, n: usize) -> Mat6 {
        self.gravity.fixed_view::<6, 6>(6 * (n - 1), 0).into()
    }

    /// Right-hand side of the joint-space equation for the given rates.
    pub fn generalized_force(&self, xi_dot: &DVec) -> DVec {
        let mut rhs = &self.tau + &self.external;
        rhs += &self.gravity * DVec::from_column_slice(self.gravity_twist.as_slice());
        rhs -= (&self.coriolis1 - &self.coriolis2 + &self.drag) * xi_dot;
        rhs
    }
}

fn ad6(v: &Vec6) -> Mat6 {
    Twist::from_vector(v).adjoint()
}

fn coad6(v: &Vec6) -> Mat6 {
    Twist::from_vector(v).coadjoint()
}

/// Kelvin-Voigt internal wrench of section `n`:
/// `Sigma (xi - xi0) + Upsilon xi_dot`.
pub fn internal_wrench(arm: &ArmSpec, n: usize, strain: &Twist, strain_rate: &Vec6) -> Vec6 {
    let offset = strain.to_vector() - Twist::rest_strain().to_vector();
    arm.stiffness(n) * offset + arm.viscosity(n) * strain_rate
}

/// Straight-segment wrench of one cable in the section frame: tension along
/// the local cable tangent `q + k x d`, with moment arm `d`.
fn cable_wrench(strain: &Twist, offset: &Vec3, tension: f64) -> Vec6 {
    let dir = strain.linear + strain.angular.cross(offset);
    let norm = dir.norm();
    if norm < 1e-12 {
        return Vec6::zeros();
    }
    let t = dir / norm;
    let m = offset.cross(&t);
    Vec6::new(m.x, m.y, m.z, t.x, t.y, t.z) * tension
}

/// Generalized internal + cable actuation load.
///
/// A cable anchored at the tip of section `j` runs through sections
/// `1..=j`, so section `n` carries every cable anchored at or beyond it:
/// `tau_n = l (F_a,n - F_i,n)`.
pub fn generalized_actuation_cable(arm: &ArmSpec, tensions: &[f64], state: &JointState) -> DVec {
    assert_eq!(tensions.len(), arm.cables.len(), "one tension per cable");
    assert!(
        tensions.iter().all(|&t| t >= 0.0),
        "cable tensions must be non-negative"
    );
    let mut tau = DVec::zeros(arm.dof());
    for n in 1..=arm.section_count() {
        let strain = state.strain(n);
        let mut f_a = Vec6::zeros();
        for (cable, &tension) in arm.cables.iter().zip(tensions) {
            if cable.anchor_section >= n {
                f_a += cable_wrench(&strain, &cable.offset, tension);
            }
        }
        let f_i = internal_wrench(arm, n, &strain, &state.strain_rate(n));
        let l = arm.sections[n - 1].length;
        tau.fixed_rows_mut::<6>(6 * (n - 1))
            .copy_from(&((f_a - f_i) * l));
    }
    tau
}

/// Generalized internal + fluidic actuation load.
///
/// Chamber pressure acts as a concentrated wrench at each section tip;
/// the boundary jumps telescope into
/// `tau_n = sum_{j>=n} S_n^T(L_j) (F_a,j - F_a,j+1) - l F_i,n`
/// with `F_a,N+1 = 0`.
pub fn generalized_actuation_fluidic(kin: &Kinematics, wrenches: &[Vec6]) -> DVec {
    let arm = kin.arm;
    let n_sections = arm.section_count();
    assert_eq!(wrenches.len(), n_sections, "one chamber wrench per section");
    let mut tau = DVec::zeros(arm.dof());
    for n in 1..=n_sections {
        let mut t = Vec6::zeros();
        for j in n..=n_sections {
            let step = if j < n_sections {
                wrenches[j - 1] - wrenches[j]
            } else {
                wrenches[j - 1]
            };
            t += kin.boundary_block(j, n).transpose() * step;
        }
        let strain = kin.state.strain(n);
        let f_i = internal_wrench(arm, n, &strain, &kin.state.strain_rate(n));
        let l = arm.sections[n - 1].length;
        tau.fixed_rows_mut::<6>(6 * (n - 1)).copy_from(&(t - f_i * l));
    }
    tau
}

/// Generalized load of a concentrated spatial wrench: the wrench components
/// are rotated into the local frame at the application point, then projected
/// through the Jacobian blocks.
pub fn generalized_point_load(kin: &Kinematics, load: &PointLoad) -> DVec {
    let local = kin
        .world_pose_at(load.position)
        .rotate_wrench_to_local(&load.wrench);
    let (n, blocks) = kin.blocks_at(load.position);
    let mut f = DVec::zeros(kin.arm.dof());
    for m in 1..=n {
        f.fixed_rows_mut::<6>(6 * (m - 1))
            .copy_from(&(blocks[m - 1].transpose() * local));
    }
    f
}

/// Assemble every coefficient of the joint-space dynamics at `state`.
pub fn assemble(
    arm: &ArmSpec,
    state: &JointState,
    actuation: &ActuationInput,
    loads: &[PointLoad],
    quad: &GaussLegendre,
) -> CoefficientSet {
    let kin = Kinematics::new(arm, state);
    let dof = arm.dof();
    let n_sections = arm.section_count();
    let mut mass = DMat::zeros(dof, dof);
    let mut c1 = DMat::zeros(dof, dof);
    let mut c2 = DMat::zeros(dof, dof);
    let mut drag = DMat::zeros(dof, dof);
    let mut gravity = DMat::zeros(dof, 6);
    let water = arm.environment.water_density > 0.0;
    let buoy = arm.buoyancy_factor();

    let mut rates = Vec::with_capacity(n_sections);
    for n in 1..=n_sections {
        rates.push(state.strain_rate(n));
    }

    for i in 1..=n_sections {
        let section = &arm.sections[i - 1];
        let ma = arm.inertia_added(i);
        let mm = arm.inertia(i);
        let dm = arm.drag_matrix(i);
        for (x, w) in quad.mapped(section.start, section.end) {
            let (sec, blocks) = kin.blocks_at(x);
            debug_assert_eq!(sec, i);
            // Body twist at the point, from the cached boundary velocity.
            let mut eta = Vec6::zeros();
            for (m, block) in blocks.iter().enumerate() {
                eta += block * rates[m];
            }

            // Premultiplied columns shared by M, C1.
            let ma_s: Vec<Mat6> = blocks.iter().map(|s| ma * s).collect();
            let c1_core = coad6(&eta) * ma;

            for m in 0..i {
                let c1_col = c1_core * blocks[m];
                for n in 0..i {
                    let snt = blocks[n].transpose();
                    if n >= m {
                        let mb = snt * ma_s[m] * w;
                        let mut view = mass.fixed_view_mut::<6, 6>(6 * n, 6 * m);
                        view += mb;
                    }
                    let mut view = c1.fixed_view_mut::<6, 6>(6 * n, 6 * m);
                    view += snt * c1_col * w;
                }
            }

            // C2: block column m collects ad of the downstream rate sum.
            let mut w_suffix = Vec6::zeros();
            for m in (0..i).rev() {
                if m < i - 1 {
                    // w_suffix = sum_{j=m+1}^{i-1} S_j rate_j (0-based).
                    let col = ma * ad6(&w_suffix) * blocks[m];
                    for n in 0..i {
                        let mut view = c2.fixed_view_mut::<6, 6>(6 * n, 6 * m);
                        view += blocks[n].transpose() * col * w;
                    }
                }
                w_suffix += blocks[m] * rates[m];
            }

            if water {
                let speed = eta.fixed_rows::<3>(3).norm();
                if speed > 0.0 {
                    for m in 0..i {
                        let col = dm * blocks[m] * (w * speed);
                        for n in m..i {
                            let mut view = drag.fixed_view_mut::<6, 6>(6 * n, 6 * m);
                            view += blocks[n].transpose() * col;
                        }
                    }
                }
            }

            let pose = kin.pose_at(x);
            let grav_core = mm * pose.inverse().adjoint() * (w * buoy);
            for n in 0..i {
                let mut view = gravity.fixed_view_mut::<6, 6>(6 * n, 0);
                view += blocks[n].transpose() * grav_core;
            }
        }
    }

    // Mirror the symmetric matrices' strict upper block triangles.
    for n in 0..n_sections {
        for m in (n + 1)..n_sections {
            let lower: Mat6 = mass.fixed_view::<6, 6>(6 * m, 6 * n).into();
            mass.fixed_view_mut::<6, 6>(6 * n, 6 * m)
                .copy_from(&lower.transpose());
            let lower: Mat6 = drag.fixed_view::<6, 6>(6 * m, 6 * n).into();
            drag.fixed_view_mut::<6, 6>(6 * n, 6 * m)
                .copy_from(&lower.transpose());
        }
    }

    let tau = match actuation {
        ActuationInput::Cable { tensions } => {
            assert_eq!(arm.actuation_kind, ActuationKind::Cable, "arm is not cable driven");
            generalized_actuation_cable(arm, tensions, state)
        }
        ActuationInput::Fluidic { wrenches } => {
            assert_eq!(arm.actuation_kind, ActuationKind::Fluidic, "arm is not fluidic");
            generalized_actuation_fluidic(&kin, wrenches)
        }
    };

    let mut external = DVec::zeros(dof);
    for load in loads {
        external += generalized_point_load(&kin, load);
    }

    let gravity_twist = arm.environment.base_transform.inverse().adjoint() * arm.environment.gravity;

    CoefficientSet {
        mass,
        coriolis1: c1,
        coriolis2: c2,
        drag,
        gravity,
        tau,
        external,
        gravity_twist,
    }
}

/// Solve `M xi'' = rhs` for the strain accelerations.
///
/// Uses a symmetric positive definite factorization; a condition estimate
/// above `1e12` logs a warning, and a failed factorization is an error.
pub fn forward_dynamics(coeffs: &CoefficientSet, state: &JointState) -> Result<DVec, DynamicsError> {
    let rhs = coeffs.generalized_force(&state.xi_dot);
    let chol = match coeffs.mass.clone().cholesky() {
        Some(c) => c,
        None => {
            return Err(DynamicsError::SingularMass {
                cond: condition_estimate(&coeffs.mass),
            })
        }
    };
    let diag = chol.l_dirty().diagonal();
    let (dmin, dmax) = (diag.min(), diag.max());
    if dmin > 0.0 {
        let cond = (dmax / dmin).powi(2);
        if cond > 1e12 {
            log::warn!("mass matrix condition estimate {cond:.3e} exceeds 1e12");
        }
    }
    Ok(chol.solve(&rhs))
}

fn condition_estimate(m: &DMat) -> f64 {
    let norm = m.abs().row_sum().max();
    match m.clone().try_inverse() {
        Some(inv) => norm * inv.abs().row_sum().max(),
        None => f64::INFINITY,
    }
}
