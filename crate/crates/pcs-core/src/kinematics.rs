//! Forward kinematics of the PCS arm: pose, velocity and acceleration
//! fields, body/spatial Jacobians and the Jacobian time derivative, all
//! closed-form in the stacked strain vector and its rates.
//!
//! A [`Kinematics`] value caches the per-boundary poses, twists and Jacobian
//! blocks of one `(arm, state)` pair so that any number of field queries cost
//! one section-local exponential each. Abscissae exactly on a boundary `L_n`
//! belong to section `n`.

use crate::arm::ArmSpec;
use crate::lie::{Transform, Twist};
use crate::{DMat, DVec, Mat6, Vec6};

/// Stacked PCS joint coordinates: strains and strain rates, each `6 N`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    pub xi: DVec,
    pub xi_dot: DVec,
    /// Strain accelerations, needed only by acceleration queries.
    pub xi_ddot: Option<DVec>,
}

impl JointState {
    pub fn new(xi: DVec, xi_dot: DVec) -> Self {
        assert_eq!(xi.len(), xi_dot.len(), "strain/rate dimension mismatch");
        assert_eq!(xi.len() % 6, 0, "joint vector length must be 6 N");
        Self { xi, xi_dot, xi_ddot: None }
    }

    pub fn with_acceleration(mut self, xi_ddot: DVec) -> Self {
        assert_eq!(xi_ddot.len(), self.xi.len());
        self.xi_ddot = Some(xi_ddot);
        self
    }

    /// Straight arm at rest: every section at the reference strain.
    pub fn rest(sections: usize) -> Self {
        let mut xi = DVec::zeros(6 * sections);
        for n in 0..sections {
            xi[6 * n + 3] = 1.0;
        }
        Self::new(xi, DVec::zeros(6 * sections))
    }

    pub fn sections(&self) -> usize {
        self.xi.len() / 6
    }

    /// Strain twist of section `n` (1-based).
    pub fn strain(&self, n: usize) -> Twist {
        Twist::from_vector(&self.xi.fixed_rows::<6>(6 * (n - 1)).into())
    }

    /// Strain rate of section `n` as a 6-vector.
    pub fn strain_rate(&self, n: usize) -> Vec6 {
        self.xi_dot.fixed_rows::<6>(6 * (n - 1)).into()
    }

    fn strain_accel(&self, n: usize) -> Vec6 {
        self.xi_ddot
            .as_ref()
            .expect("joint state carries no strain accelerations")
            .fixed_rows::<6>(6 * (n - 1))
            .into()
    }
}

/// One field sample along the arm.
#[derive(Debug, Clone, Copy)]
pub struct FieldSample {
    pub x: f64,
    /// Pose in the base chain (base frame at the arm root).
    pub pose: Transform,
    /// Body-frame velocity twist.
    pub velocity: Twist,
    /// Body-frame acceleration twist; zero when the state has no `xi_ddot`.
    pub acceleration: Twist,
}

fn ad6(v: &Vec6) -> Mat6 {
    Twist::from_vector(v).adjoint()
}

/// Cached kinematic sweep of one `(arm, state)` pair.
pub struct Kinematics<'a> {
    pub arm: &'a ArmSpec,
    pub state: &'a JointState,
    /// `g(L_n)` in the base chain, `n = 0..=N`, `g(L_0) = I`.
    g_bound: Vec<Transform>,
    /// `eta(L_n)`, `n = 0..=N`, `eta(0) = 0` (fixed base).
    eta_bound: Vec<Vec6>,
    /// `eta_dot(L_n)` when strain accelerations are present.
    eta_dot_bound: Option<Vec<Vec6>>,
    /// `s_bound[n]` holds the Jacobian blocks `S_1(L_n) .. S_n(L_n)`.
    s_bound: Vec<Vec<Mat6>>,
}

impl<'a> Kinematics<'a> {
    pub fn new(arm: &'a ArmSpec, state: &'a JointState) -> Self {
        assert_eq!(
            state.xi.len(),
            arm.dof(),
            "joint state dimension does not match the arm"
        );
        let n = arm.section_count();
        let mut g_bound = Vec::with_capacity(n + 1);
        let mut eta_bound = Vec::with_capacity(n + 1);
        let mut s_bound: Vec<Vec<Mat6>> = Vec::with_capacity(n + 1);
        let mut eta_dot_bound = state.xi_ddot.as_ref().map(|_| Vec::with_capacity(n + 1));
        g_bound.push(Transform::identity());
        eta_bound.push(Vec6::zeros());
        s_bound.push(Vec::new());
        if let Some(ed) = eta_dot_bound.as_mut() {
            ed.push(Vec6::zeros());
        }
        for i in 1..=n {
            let xi = state.strain(i);
            let xi_dot = state.strain_rate(i);
            let l = arm.sections[i - 1].length;
            let ad_inv = (-xi).exp_adjoint(l);
            let adint = xi.exp_adjoint_integral(l);
            g_bound.push(g_bound[i - 1].compose(&xi.exp(l)));
            let eta_prev = eta_bound[i - 1];
            eta_bound.push(ad_inv * (eta_prev + adint * xi_dot));
            let mut blocks: Vec<Mat6> = s_bound[i - 1].iter().map(|s| ad_inv * s).collect();
            blocks.push(ad_inv * adint);
            s_bound.push(blocks);
            if let Some(ed) = eta_dot_bound.as_mut() {
                let eta_dot_prev = ed[i - 1];
                let conv = ad6(&(adint * xi_dot)) * eta_prev;
                ed.push(ad_inv * (eta_dot_prev - conv + adint * state.strain_accel(i)));
            }
        }
        Self { arm, state, g_bound, eta_bound, eta_dot_bound, s_bound }
    }

    /// Section index and section-local abscissa of `x`.
    fn locate(&self, x: f64) -> (usize, f64) {
        let total = self.arm.total_length();
        assert!(
            (-1e-9..=total + 1e-9).contains(&x),
            "abscissa {x} outside [0, {total}]"
        );
        let x = x.clamp(0.0, total);
        let n = self.arm.section_of(x);
        (n, x - self.arm.sections[n - 1].start)
    }

    /// Pose `g(X)` in the base chain.
    pub fn pose_at(&self, x: f64) -> Transform {
        let (n, xl) = self.locate(x);
        self.g_bound[n - 1].compose(&self.state.strain(n).exp(xl))
    }

    /// Pose in the spatial frame, `g_r g(X)`.
    pub fn world_pose_at(&self, x: f64) -> Transform {
        self.arm.environment.base_transform.compose(&self.pose_at(x))
    }

    /// Body-frame velocity twist `eta(X)`.
    pub fn velocity_at(&self, x: f64) -> Twist {
        let (n, xl) = self.locate(x);
        let xi = self.state.strain(n);
        let ad_inv = (-xi).exp_adjoint(xl);
        let adint = xi.exp_adjoint_integral(xl);
        Twist::from_vector(&(ad_inv * (self.eta_bound[n - 1] + adint * self.state.strain_rate(n))))
    }

    /// Body-frame acceleration twist `eta_dot(X)`; requires `xi_ddot`.
    pub fn acceleration_at(&self, x: f64) -> Twist {
        let eta_dot_bound = self
            .eta_dot_bound
            .as_ref()
            .expect("joint state carries no strain accelerations");
        let (n, xl) = self.locate(x);
        let xi = self.state.strain(n);
        let ad_inv = (-xi).exp_adjoint(xl);
        let adint = xi.exp_adjoint_integral(xl);
        let conv = ad6(&(adint * self.state.strain_rate(n))) * self.eta_bound[n - 1];
        Twist::from_vector(
            &(ad_inv * (eta_dot_bound[n - 1] - conv + adint * self.state.strain_accel(n))),
        )
    }

    /// Jacobian blocks `S_1(X) .. S_n(X)` for the section containing `x`.
    pub(crate) fn blocks_at(&self, x: f64) -> (usize, Vec<Mat6>) {
        let (n, xl) = self.locate(x);
        let xi = self.state.strain(n);
        let ad_inv = (-xi).exp_adjoint(xl);
        let adint = xi.exp_adjoint_integral(xl);
        let mut blocks: Vec<Mat6> = self.s_bound[n - 1].iter().map(|s| ad_inv * s).collect();
        blocks.push(ad_inv * adint);
        (n, blocks)
    }

    /// Body geometric Jacobian `J(X)`, `6 x 6N`; columns of sections
    /// downstream of `x` are zero.
    pub fn jacobian(&self, x: f64) -> DMat {
        let (n, blocks) = self.blocks_at(x);
        let mut j = DMat::zeros(6, self.arm.dof());
        for (i, block) in blocks.iter().enumerate().take(n) {
            j.view_mut((0, 6 * i), (6, 6)).copy_from(block);
        }
        j
    }

    /// Time derivative of the body Jacobian along the joint flow.
    pub fn jacobian_dot(&self, x: f64) -> DMat {
        let (n, blocks) = self.blocks_at(x);
        let mut jd = DMat::zeros(6, self.arm.dof());
        let mut w = Vec6::zeros();
        for i in (1..=n).rev() {
            if i < n {
                let block = -ad6(&w) * blocks[i - 1];
                jd.view_mut((0, 6 * (i - 1)), (6, 6)).copy_from(&block);
            }
            w += blocks[i - 1] * self.state.strain_rate(i);
        }
        jd
    }

    /// Spatial Jacobian `Ad_{g(X)} J(X)` (base chain frame).
    pub fn spatial_jacobian(&self, x: f64) -> DMat {
        let ad = self.pose_at(x).adjoint();
        let mut j = self.jacobian(x);
        for c in 0..j.ncols() / 6 {
            let block: Mat6 = j.fixed_view::<6, 6>(0, 6 * c).into();
            j.view_mut((0, 6 * c), (6, 6)).copy_from(&(ad * block));
        }
        j
    }

    /// Pose, velocity and (when available) acceleration at `x`.
    pub fn sample(&self, x: f64) -> FieldSample {
        FieldSample {
            x,
            pose: self.pose_at(x),
            velocity: self.velocity_at(x),
            acceleration: if self.eta_dot_bound.is_some() {
                self.acceleration_at(x)
            } else {
                Twist::zero()
            },
        }
    }

    /// Cached boundary pose `g(L_n)`.
    pub fn boundary_pose(&self, n: usize) -> &Transform {
        &self.g_bound[n]
    }

    /// Cached boundary Jacobian block `S_m(L_n)`, `m <= n`.
    pub(crate) fn boundary_block(&self, n: usize, m: usize) -> &Mat6 {
        &self.s_bound[n][m - 1]
    }
}
