//! Newton solve of the generalized static equilibrium
//! `tau(xi) + F(xi) + N(xi) Ad_{gr}^{-1} G = 0`.

use crate::arm::ArmSpec;
use crate::dynamics::{assemble, ActuationInput, PointLoad};
use crate::kinematics::JointState;
use crate::quadrature::GaussLegendre;
use crate::{DMat, DVec, Vec6};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EquilibriumError {
    #[error("equilibrium Newton iteration stalled (residual {residual:.3e} after {iterations} iterations)")]
    NoConvergence { residual: f64, iterations: usize },
    #[error("singular Jacobian in equilibrium Newton step")]
    SingularJacobian,
}

#[derive(Debug, Clone, Copy)]
pub struct EquilibriumOptions {
    pub max_iterations: usize,
    pub tolerance: f64,
    /// Number of load-continuation stages from zero to the full load.
    pub load_steps: usize,
}

impl Default for EquilibriumOptions {
    fn default() -> Self {
        Self {
            max_iterations: 80,
            tolerance: 1e-12,
            load_steps: 4,
        }
    }
}

fn scale_actuation(actuation: &ActuationInput, s: f64) -> ActuationInput {
    match actuation {
        ActuationInput::Cable { tensions } => ActuationInput::Cable {
            tensions: tensions.iter().map(|t| t * s).collect(),
        },
        ActuationInput::Fluidic { wrenches } => ActuationInput::Fluidic {
            wrenches: wrenches.iter().map(|w| w * s).collect(),
        },
    }
}

fn residual(
    arm: &ArmSpec,
    xi: &DVec,
    actuation: &ActuationInput,
    loads: &[PointLoad],
    quad: &GaussLegendre,
) -> DVec {
    let state = JointState::new(xi.clone(), DVec::zeros(xi.len()));
    let coeffs = assemble(arm, &state, actuation, loads, quad);
    let mut r = &coeffs.tau + &coeffs.external;
    r += &coeffs.gravity * DVec::from_column_slice(coeffs.gravity_twist.as_slice());
    r
}

/// Solve for the equilibrium strain vector under the given constant
/// actuation and loads, starting from the straight rest configuration.
pub fn solve_equilibrium(
    arm: &ArmSpec,
    actuation: &ActuationInput,
    loads: &[PointLoad],
    quad: &GaussLegendre,
    opts: &EquilibriumOptions,
) -> Result<DVec, EquilibriumError> {
    let dof = arm.dof();
    let mut xi = JointState::rest(arm.section_count()).xi;
    for stage in 1..=opts.load_steps {
        let s = stage as f64 / opts.load_steps as f64;
        let act = scale_actuation(actuation, s);
        let lds: Vec<PointLoad> = loads
            .iter()
            .map(|l| PointLoad { wrench: l.wrench * s, position: l.position })
            .collect();
        let mut r = residual(arm, &xi, &act, &lds, quad);
        let mut iterations = 0;
        while r.amax() > opts.tolerance {
            iterations += 1;
            if iterations > opts.max_iterations {
                return Err(EquilibriumError::NoConvergence {
                    residual: r.amax(),
                    iterations: opts.max_iterations,
                });
            }
            // Central-difference Jacobian of the residual.
            let mut jac = DMat::zeros(dof, dof);
            for c in 0..dof {
                let h = 1e-7 * (1.0 + xi[c].abs());
                let mut xp = xi.clone();
                let mut xm = xi.clone();
                xp[c] += h;
                xm[c] -= h;
                let rp = residual(arm, &xp, &act, &lds, quad);
                let rm = residual(arm, &xm, &act, &lds, quad);
                jac.set_column(c, &((rp - rm) / (2.0 * h)));
            }
            let delta = jac
                .lu()
                .solve(&(-&r))
                .ok_or(EquilibriumError::SingularJacobian)?;
            // Backtracking line search on the residual norm.
            let r0 = r.norm();
            let mut alpha = 1.0;
            loop {
                let candidate = &xi + &delta * alpha;
                let rc = residual(arm, &candidate, &act, &lds, quad);
                if rc.norm() < r0 || alpha < 1.0 / 128.0 {
                    xi = candidate;
                    r = rc;
                    break;
                }
                alpha *= 0.5;
            }
        }
    }
    Ok(xi)
}

/// Residual max-norm of a candidate equilibrium (diagnostic).
pub fn equilibrium_residual(
    arm: &ArmSpec,
    xi: &DVec,
    actuation: &ActuationInput,
    loads: &[PointLoad],
    quad: &GaussLegendre,
) -> f64 {
    residual(arm, xi, actuation, loads, quad).amax()
}

/// `true` when every strain entry is finite and curvatures stay below the
/// given bound (rad/m).
pub fn strains_bounded(xi: &DVec, curvature_limit: f64) -> bool {
    if !xi.iter().all(|v| v.is_finite()) {
        return false;
    }
    (0..xi.len() / 6).all(|n| {
        Vec6::from(xi.fixed_rows::<6>(6 * n))
            .fixed_rows::<3>(0)
            .norm()
            < curvature_limit
    })
}
