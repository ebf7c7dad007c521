//! se(3)/SE(3) algebra with closed-form exponentials.
//!
//! Twists pair an angular 3-vector `k` with a linear 3-vector `q`
//! (angular block first). The exponential maps and the integrated adjoint
//! are finite 4- and 5-term trigonometric formulas in powers of the hat /
//! adjoint matrices; below a small rotation threshold every trig coefficient
//! switches to its Taylor expansion so the maps stay smooth through the
//! straight configuration.

use crate::{Mat3, Mat4, Mat6, Vec3, Vec6};

/// Rotation-per-length threshold (on `theta * x`) below which the Taylor
/// branch of the exponential coefficients is used. The trig expressions lose
/// roughly eight digits to cancellation near zero; the Taylor forms are
/// accurate to machine precision for arguments this small.
pub const SMALL_ROTATION: f64 = 1e-2;

/// Skew-symmetric matrix of a 3-vector: `skew(v) * p == v.cross(&p)`.
pub fn skew(v: &Vec3) -> Mat3 {
    Mat3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// A Lie-algebra element: strain (rad/m, -) or velocity (rad/s, m/s) twist.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Twist {
    /// Angular part `k` (curvature/torsion for strains, angular velocity for
    /// velocities).
    pub angular: Vec3,
    /// Linear part `q` (stretch/shear for strains, linear velocity for
    /// velocities).
    pub linear: Vec3,
}

impl Twist {
    pub fn new(angular: Vec3, linear: Vec3) -> Self {
        Self { angular, linear }
    }

    pub fn zero() -> Self {
        Self::new(Vec3::zeros(), Vec3::zeros())
    }

    /// Reference strain of a straight, unstretched arm: unit stretch along
    /// the local x axis.
    pub fn rest_strain() -> Self {
        Self::new(Vec3::zeros(), Vec3::x())
    }

    pub fn from_vector(v: &Vec6) -> Self {
        Self::new(v.fixed_rows::<3>(0).into(), v.fixed_rows::<3>(3).into())
    }

    pub fn to_vector(&self) -> Vec6 {
        Vec6::new(
            self.angular.x,
            self.angular.y,
            self.angular.z,
            self.linear.x,
            self.linear.y,
            self.linear.z,
        )
    }

    /// Rotation magnitude per unit length, `theta = |k|`.
    pub fn theta(&self) -> f64 {
        self.angular.norm()
    }

    /// 4x4 matrix representation: `[skew(k), q; 0, 0]`.
    pub fn hat(&self) -> Mat4 {
        let mut m = Mat4::zeros();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&skew(&self.angular));
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.linear);
        m
    }

    /// Adjoint map `ad`: `[skew(k), 0; skew(q), skew(k)]`.
    pub fn adjoint(&self) -> Mat6 {
        let kt = skew(&self.angular);
        let qt = skew(&self.linear);
        let mut m = Mat6::zeros();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&kt);
        m.fixed_view_mut::<3, 3>(3, 3).copy_from(&kt);
        m.fixed_view_mut::<3, 3>(3, 0).copy_from(&qt);
        m
    }

    /// Coadjoint map `ad* = -ad^T`: `[skew(k), skew(q); 0, skew(k)]`.
    pub fn coadjoint(&self) -> Mat6 {
        -self.adjoint().transpose()
    }

    /// Closed-form exponential `exp(x * hat(xi))` on SE(3).
    ///
    /// Total in `x` and in the twist; straight sections (`theta == 0`) fall
    /// out of the Taylor branch exactly as `I + x hat(xi)` plus vanishing
    /// higher powers.
    pub fn exp(&self, x: f64) -> Transform {
        let theta = self.theta();
        let u = theta * x.abs();
        let (c2, c3) = if u < SMALL_ROTATION {
            let u2 = u * u;
            (
                x * x * (0.5 - u2 / 24.0 + u2 * u2 / 720.0),
                x * x * x * (1.0 / 6.0 - u2 / 120.0 + u2 * u2 / 5040.0),
            )
        } else {
            let ux = theta * x;
            (
                (1.0 - ux.cos()) / (theta * theta),
                (ux - ux.sin()) / (theta * theta * theta),
            )
        };
        let h = self.hat();
        let h2 = h * h;
        let h3 = h2 * h;
        let m = Mat4::identity() + h * x + h2 * c2 + h3 * c3;
        Transform {
            rotation: m.fixed_view::<3, 3>(0, 0).into(),
            position: m.fixed_view::<3, 1>(0, 3).into(),
        }
    }

    /// Closed-form `exp(x * ad(xi))`, the Adjoint of [`Twist::exp`].
    pub fn exp_adjoint(&self, x: f64) -> Mat6 {
        let theta = self.theta();
        let u = theta * x.abs();
        let (a1, a2, a3, a4);
        if u < SMALL_ROTATION {
            let u2 = u * u;
            let u4 = u2 * u2;
            a1 = x * (1.0 - u4 / 120.0 + u4 * u2 / 2520.0);
            a2 = x * x * (0.5 - u4 / 720.0 + u4 * u2 / 20160.0);
            a3 = x * x * x * (1.0 / 6.0 - u2 / 60.0 + u4 / 1680.0);
            a4 = x * x * x * x * (1.0 / 24.0 - u2 / 360.0 + u4 / 13440.0);
        } else {
            let ux = theta * x;
            let (s, c) = ux.sin_cos();
            let t2 = theta * theta;
            a1 = (3.0 * s - ux * c) / (2.0 * theta);
            a2 = (4.0 - 4.0 * c - ux * s) / (2.0 * t2);
            a3 = (s - ux * c) / (2.0 * t2 * theta);
            a4 = (2.0 - 2.0 * c - ux * s) / (2.0 * t2 * t2);
        }
        let ad = self.adjoint();
        let ad2 = ad * ad;
        let ad3 = ad2 * ad;
        let ad4 = ad2 * ad2;
        Mat6::identity() + ad * a1 + ad2 * a2 + ad3 * a3 + ad4 * a4
    }

    /// Integrated adjoint `AD(x) = int_0^x exp(s * ad(xi)) ds`.
    ///
    /// Its derivative in `x` is [`Twist::exp_adjoint`]; `AD(0) = 0`.
    pub fn exp_adjoint_integral(&self, x: f64) -> Mat6 {
        let theta = self.theta();
        let u = theta * x.abs();
        let (b1, b2, b3, b4);
        if u < SMALL_ROTATION {
            let u2 = u * u;
            let u4 = u2 * u2;
            let x2 = x * x;
            b1 = x2 * (0.5 - u4 / 720.0 + u4 * u2 / 20160.0);
            b2 = x2 * x * (1.0 / 6.0 - u4 / 5040.0);
            b3 = x2 * x2 * (1.0 / 24.0 - u2 / 360.0 + u4 / 13440.0);
            b4 = x2 * x2 * x * (1.0 / 120.0 - u2 / 2520.0 + u4 / 120960.0);
        } else {
            let ux = theta * x;
            let (s, c) = ux.sin_cos();
            let t2 = theta * theta;
            b1 = (4.0 - 4.0 * c - ux * s) / (2.0 * t2);
            b2 = (4.0 * ux - 5.0 * s + ux * c) / (2.0 * t2 * theta);
            b3 = (2.0 - 2.0 * c - ux * s) / (2.0 * t2 * t2);
            b4 = (2.0 * ux - 3.0 * s + ux * c) / (2.0 * t2 * t2 * theta);
        }
        let ad = self.adjoint();
        let ad2 = ad * ad;
        let ad3 = ad2 * ad;
        let ad4 = ad2 * ad2;
        Mat6::identity() * x + ad * b1 + ad2 * b2 + ad3 * b3 + ad4 * b4
    }

    /// Screw decomposition of the rigid displacement `exp(l * hat(xi))`.
    pub fn screw_params(&self, l: f64) -> ScrewParams {
        let theta = self.theta();
        if theta * l < 1e-12 {
            // Pure translation: no rotation axis, finite translation along q.
            let n = self.linear.norm();
            let axis = if n > 0.0 { self.linear / n } else { Vec3::zeros() };
            return ScrewParams {
                axis,
                pitch: 0.0,
                magnitude: 0.0,
                axis_point: Vec3::zeros(),
                translation: n * l,
            };
        }
        let axis = self.angular / theta;
        let pitch = self.angular.dot(&self.linear) / (theta * theta);
        let magnitude = theta * l;
        let axis_point = self.angular.cross(&self.linear) / (theta * theta);
        ScrewParams {
            axis,
            pitch,
            magnitude,
            axis_point,
            translation: pitch * magnitude,
        }
    }
}

impl std::ops::Neg for Twist {
    type Output = Twist;
    fn neg(self) -> Twist {
        Twist::new(-self.angular, -self.linear)
    }
}

/// Screw parameters of a section displacement: rotation of `magnitude`
/// radians about the line through `axis_point` with direction `axis`,
/// advancing `pitch` meters per radian (`translation = pitch * magnitude`
/// total). A zero-rotation displacement reports `magnitude == 0` with the
/// translation stored separately instead of an infinite pitch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScrewParams {
    pub axis: Vec3,
    pub pitch: f64,
    pub magnitude: f64,
    pub axis_point: Vec3,
    pub translation: f64,
}

/// Rigid transform on SE(3): rotation plus position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transform {
    pub rotation: Mat3,
    pub position: Vec3,
}

impl Transform {
    pub fn identity() -> Self {
        Self {
            rotation: Mat3::identity(),
            position: Vec3::zeros(),
        }
    }

    pub fn new(rotation: Mat3, position: Vec3) -> Self {
        Self { rotation, position }
    }

    /// Group composition `self * other`.
    pub fn compose(&self, other: &Transform) -> Transform {
        Transform {
            rotation: self.rotation * other.rotation,
            position: self.rotation * other.position + self.position,
        }
    }

    pub fn inverse(&self) -> Transform {
        let rt = self.rotation.transpose();
        Transform {
            rotation: rt,
            position: -(rt * self.position),
        }
    }

    /// Apply to a point: `R p + u`.
    pub fn apply(&self, p: &Vec3) -> Vec3 {
        self.rotation * p + self.position
    }

    /// Adjoint representation `Ad_g = [R, 0; skew(u) R, R]`.
    pub fn adjoint(&self) -> Mat6 {
        let mut m = Mat6::zeros();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.rotation);
        m.fixed_view_mut::<3, 3>(3, 3).copy_from(&self.rotation);
        m.fixed_view_mut::<3, 3>(3, 0)
            .copy_from(&(skew(&self.position) * self.rotation));
        m
    }

    /// Coadjoint representation `Ad*_g = Ad_g^{-T} = [R, skew(u) R; 0, R]`.
    pub fn coadjoint(&self) -> Mat6 {
        let mut m = Mat6::zeros();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.rotation);
        m.fixed_view_mut::<3, 3>(3, 3).copy_from(&self.rotation);
        m.fixed_view_mut::<3, 3>(0, 3)
            .copy_from(&(skew(&self.position) * self.rotation));
        m
    }

    /// Rotate a wrench's components into this frame's coordinates without
    /// moving its application point: `blockdiag(R^T, R^T) w`.
    pub fn rotate_wrench_to_local(&self, wrench: &Vec6) -> Vec6 {
        let rt = self.rotation.transpose();
        let m = rt * Vec3::from(wrench.fixed_rows::<3>(0));
        let f = rt * Vec3::from(wrench.fixed_rows::<3>(3));
        Vec6::new(m.x, m.y, m.z, f.x, f.y, f.z)
    }

    pub fn to_homogeneous(&self) -> Mat4 {
        let mut m = Mat4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.rotation);
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.position);
        m
    }

    pub fn from_homogeneous(m: &Mat4) -> Self {
        Self {
            rotation: m.fixed_view::<3, 3>(0, 0).into(),
            position: m.fixed_view::<3, 1>(0, 3).into(),
        }
    }

    /// Deviation of the rotation block from orthonormality:
    /// `max(|R^T R - I|, |det R - 1|)`.
    pub fn orthonormality_error(&self) -> f64 {
        let e = self.rotation.transpose() * self.rotation - Mat3::identity();
        let det = (self.rotation.determinant() - 1.0).abs();
        e.amax().max(det)
    }
}
