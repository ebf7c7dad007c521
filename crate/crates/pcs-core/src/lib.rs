//! Dynamics of multi-section soft robot arms under the piecewise constant
//! strain (PCS) discretization of the Cosserat rod model.
//!
//! The arm is a stack of `N` sections, each carrying a constant strain twist
//! `xi_n`. The stacked strain vector plays the role of the joint vector of a
//! rigid manipulator: closed-form SE(3) exponentials give the kinematics, and
//! a Lagrangian-form equation
//!
//! ```text
//! M(xi) xi'' + (C1 - C2) xi' = tau + F + N Ad_{gr}^{-1} G - D xi'
//! ```
//!
//! gives the dynamics, with coefficient matrices assembled by a single
//! base-to-tip recursive sweep and per-section Gauss-Legendre quadrature.
//!
//! Crate layout:
//! - [`lie`]: se(3)/SE(3) algebra: hat maps, adjoints, closed-form
//!   exponentials and the integrated adjoint, screw decomposition.
//! - [`arm`]: arm description (geometry, material, cables, environment) and
//!   per-section property matrices.
//! - [`kinematics`]: poses, velocity/acceleration fields, body and spatial
//!   Jacobians and the Jacobian time derivative.
//! - [`dynamics`]: coefficient assembly, actuation and load projection,
//!   forward dynamics.
//! - [`statics`]: Newton solve of the generalized equilibrium.
//! - [`sim`]: RK4 time integration, actuation schedules, trajectories and
//!   energy diagnostics.
//! - [`oracle`]: method-of-lines solver for the continuous Cosserat model,
//!   used as the reference in the cantilever comparison.
//! - [`cantilever`]: discrete-vs-continuous cantilever benchmark.
//! - [`scenario`]: JSON scenario documents, bundled presets, CSV/JSON output.

pub mod arm;
pub mod cantilever;
pub mod dynamics;
pub mod kinematics;
pub mod lie;
pub mod oracle;
pub mod quadrature;
pub mod scenario;
pub mod sim;
pub mod statics;

pub use arm::{ArmSpec, CableSpec, EnvironmentSpec, MaterialSpec, SectionSpec};
pub use dynamics::{ActuationInput, CoefficientSet, PointLoad};
pub use kinematics::{FieldSample, JointState, Kinematics};
pub use lie::{ScrewParams, Transform, Twist};
pub use quadrature::GaussLegendre;
pub use sim::{Profile, Schedule, SimSettings, Trajectory};

/// Column vector / matrix aliases used throughout the crate.
pub type Vec3 = nalgebra::Vector3<f64>;
pub type Vec6 = nalgebra::Vector6<f64>;
pub type Mat3 = nalgebra::Matrix3<f64>;
pub type Mat4 = nalgebra::Matrix4<f64>;
pub type Mat6 = nalgebra::Matrix6<f64>;
pub type DVec = nalgebra::DVector<f64>;
pub type DMat = nalgebra::DMatrix<f64>;
