//! Arm description and per-section constant property matrices.
//!
//! All quantities are SI: meters, pascals, kilograms, newtons. Scenario
//! files accept the bench-friendly units (mm, kPa, kg/dm3) and convert on
//! parse; see [`crate::scenario`].

use crate::lie::Transform;
use crate::{Mat6, Vec3, Vec6};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ArmError {
    #[error("arm must have at least one section")]
    NoSections,
    #[error("section {index}: non-positive length {length}")]
    BadSectionLength { index: usize, length: f64 },
    #[error("section {index}: non-positive radius {radius}")]
    BadSectionRadius { index: usize, radius: f64 },
    #[error("material: {0}")]
    BadMaterial(String),
    #[error("environment: {0}")]
    BadEnvironment(String),
    #[error("cable {index}: anchor section {anchor} outside 1..={sections}")]
    BadCableAnchor {
        index: usize,
        anchor: usize,
        sections: usize,
    },
    #[error(
        "cable {index}: offset {offset:.4} m not inside section {section} (radius {radius:.4} m)"
    )]
    CableOutsideSection {
        index: usize,
        offset: f64,
        section: usize,
        radius: f64,
    },
    #[error("cone boundaries must be strictly increasing from zero")]
    NonMonotoneBoundaries,
}

/// One constant-strain section: a cylinder of given length and radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionSpec {
    /// Section length (m).
    pub length: f64,
    /// Cross-section radius (m).
    pub radius: f64,
    /// 1-based section index.
    pub index: usize,
    /// Cumulative abscissa of the section start, `L_{n-1}` (m).
    pub start: f64,
    /// Cumulative abscissa of the section end, `L_n` (m).
    pub end: f64,
}

/// Homogeneous isotropic Kelvin-Voigt material.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialSpec {
    /// Young modulus E (Pa).
    pub young_modulus: f64,
    /// Shear viscosity modulus (Pa s).
    pub shear_viscosity: f64,
    /// Poisson ratio in [0, 0.5].
    pub poisson_ratio: f64,
    /// Mass density (kg/m3).
    pub density: f64,
}

impl MaterialSpec {
    /// Shear modulus `G = E / (2 (1 + nu))`.
    pub fn shear_modulus(&self) -> f64 {
        self.young_modulus / (2.0 * (1.0 + self.poisson_ratio))
    }

    fn validate(&self) -> Result<(), ArmError> {
        if !(self.young_modulus > 0.0) {
            return Err(ArmError::BadMaterial(format!(
                "young modulus must be positive, got {}",
                self.young_modulus
            )));
        }
        if !(self.density > 0.0) {
            return Err(ArmError::BadMaterial(format!(
                "density must be positive, got {}",
                self.density
            )));
        }
        if !(0.0..=0.5).contains(&self.poisson_ratio) {
            return Err(ArmError::BadMaterial(format!(
                "poisson ratio must be in [0, 0.5], got {}",
                self.poisson_ratio
            )));
        }
        if self.shear_viscosity < 0.0 {
            return Err(ArmError::BadMaterial(format!(
                "shear viscosity must be non-negative, got {}",
                self.shear_viscosity
            )));
        }
        Ok(())
    }
}

/// Drag coefficients along the local axes (dimensionless).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DragCoefficients {
    pub cx: f64,
    pub cy: f64,
    pub cz: f64,
}

/// Added-mass coefficients in the section plane (dimensionless).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AddedMassCoefficients {
    pub by: f64,
    pub bz: f64,
}

/// Surrounding medium, gravity and base placement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvironmentSpec {
    /// Water density (kg/m3); zero selects operation in air, which zeroes
    /// drag and added mass.
    pub water_density: f64,
    pub drag: DragCoefficients,
    pub added_mass: AddedMassCoefficients,
    /// Gravity twist in the inertial frame (m/s2 linear part).
    pub gravity: Vec6,
    /// Transform from the spatial frame to the arm base frame.
    pub base_transform: Transform,
}

impl EnvironmentSpec {
    /// Still air, no gravity, identity base placement.
    pub fn air() -> Self {
        Self {
            water_density: 0.0,
            drag: DragCoefficients::default(),
            added_mass: AddedMassCoefficients::default(),
            gravity: Vec6::zeros(),
            base_transform: Transform::identity(),
        }
    }

    fn validate(&self) -> Result<(), ArmError> {
        if self.water_density < 0.0 {
            return Err(ArmError::BadEnvironment(format!(
                "water density must be non-negative, got {}",
                self.water_density
            )));
        }
        if self.base_transform.orthonormality_error() > 1e-9 {
            return Err(ArmError::BadEnvironment(
                "base transform rotation is not orthonormal".into(),
            ));
        }
        Ok(())
    }
}

/// One actuation cable: runs inside the body from its anchor section tip to
/// the base, at a fixed offset in the cross-section frame.
#[derive(Debug, Clone, PartialEq)]
pub struct CableSpec {
    /// Routing offset in the cross-section plane (m); x component is zero
    /// for physical cables.
    pub offset: Vec3,
    /// 1-based section whose tip the cable is anchored at.
    pub anchor_section: usize,
    /// Name linking the cable to its tension schedule.
    pub name: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActuationKind {
    Cable,
    Fluidic,
}

/// Per-section constant property matrices, evaluated once at construction.
#[derive(Debug, Clone)]
pub(crate) struct SectionMatrices {
    /// Screw inertia (kg/m scaled diagonal).
    pub inertia: Mat6,
    /// Inertia plus added mass.
    pub inertia_added: Mat6,
    /// Stiffness Sigma.
    pub stiffness: Mat6,
    /// Viscosity Upsilon.
    pub viscosity: Mat6,
    /// Drag coefficient matrix, zero in air.
    pub drag: Mat6,
}

/// Immutable description of an N-section arm.
#[derive(Debug, Clone)]
pub struct ArmSpec {
    pub sections: Vec<SectionSpec>,
    pub material: MaterialSpec,
    pub environment: EnvironmentSpec,
    pub cables: Vec<CableSpec>,
    pub actuation_kind: ActuationKind,
    pub(crate) matrices: Vec<SectionMatrices>,
}

impl ArmSpec {
    pub fn new(
        section_dims: &[(f64, f64)],
        material: MaterialSpec,
        environment: EnvironmentSpec,
        cables: Vec<CableSpec>,
        actuation_kind: ActuationKind,
    ) -> Result<Self, ArmError> {
        if section_dims.is_empty() {
            return Err(ArmError::NoSections);
        }
        material.validate()?;
        environment.validate()?;
        let mut sections = Vec::with_capacity(section_dims.len());
        let mut start = 0.0;
        for (i, &(length, radius)) in section_dims.iter().enumerate() {
            if !(length > 0.0) {
                return Err(ArmError::BadSectionLength { index: i + 1, length });
            }
            if !(radius > 0.0) {
                return Err(ArmError::BadSectionRadius { index: i + 1, radius });
            }
            sections.push(SectionSpec {
                length,
                radius,
                index: i + 1,
                start,
                end: start + length,
            });
            start += length;
        }
        for (i, cable) in cables.iter().enumerate() {
            if cable.anchor_section == 0 || cable.anchor_section > sections.len() {
                return Err(ArmError::BadCableAnchor {
                    index: i + 1,
                    anchor: cable.anchor_section,
                    sections: sections.len(),
                });
            }
            let offset = cable.offset.norm();
            for section in &sections[..cable.anchor_section] {
                if offset >= section.radius {
                    return Err(ArmError::CableOutsideSection {
                        index: i + 1,
                        offset,
                        section: section.index,
                        radius: section.radius,
                    });
                }
            }
        }
        let matrices = sections
            .iter()
            .map(|s| SectionMatrices {
                inertia: section_inertia(s, &material),
                inertia_added: section_inertia(s, &material) + hydrodynamic_matrices(s, &environment).1,
                stiffness: section_stiffness(s, &material),
                viscosity: section_viscosity(s, &material),
                drag: hydrodynamic_matrices(s, &environment).0,
            })
            .collect();
        Ok(Self {
            sections,
            material,
            environment,
            cables,
            actuation_kind,
            matrices,
        })
    }

    pub fn section_count(&self) -> usize {
        self.sections.len()
    }

    /// Total arm length `L_N` (m).
    pub fn total_length(&self) -> f64 {
        self.sections.last().map(|s| s.end).unwrap_or(0.0)
    }

    /// Generalized coordinate dimension, `6 N`.
    pub fn dof(&self) -> usize {
        6 * self.sections.len()
    }

    /// Screw inertia of section `n` (1-based).
    pub fn inertia(&self, n: usize) -> &Mat6 {
        &self.matrices[n - 1].inertia
    }

    /// Screw inertia plus added mass of section `n`.
    pub fn inertia_added(&self, n: usize) -> &Mat6 {
        &self.matrices[n - 1].inertia_added
    }

    pub fn stiffness(&self, n: usize) -> &Mat6 {
        &self.matrices[n - 1].stiffness
    }

    pub fn viscosity(&self, n: usize) -> &Mat6 {
        &self.matrices[n - 1].viscosity
    }

    pub fn drag_matrix(&self, n: usize) -> &Mat6 {
        &self.matrices[n - 1].drag
    }

    /// Buoyancy-corrected gravity factor `1 - rho_w / rho`.
    pub fn buoyancy_factor(&self) -> f64 {
        1.0 - self.environment.water_density / self.material.density
    }

    /// Section index (1-based) owning abscissa `x`; boundaries belong to the
    /// section on their left, the base belongs to section 1.
    pub fn section_of(&self, x: f64) -> usize {
        let n = self.sections.partition_point(|s| s.end < x - 1e-12);
        n.min(self.sections.len() - 1) + 1
    }
}

/// Screw inertia `M = diag(Jx, Jy, Jz, A, A, A) rho` of a circular section.
pub fn section_inertia(section: &SectionSpec, material: &MaterialSpec) -> Mat6 {
    let r = section.radius;
    let area = std::f64::consts::PI * r * r;
    let jy = std::f64::consts::PI * r.powi(4) / 4.0;
    let jz = jy;
    let jx = jy + jz;
    Mat6::from_diagonal(&(Vec6::new(jx, jy, jz, area, area, area) * material.density))
}

/// Stiffness `Sigma = diag(G Jx, E Jy, E Jz, E A, G A, G A)`.
pub fn section_stiffness(section: &SectionSpec, material: &MaterialSpec) -> Mat6 {
    let r = section.radius;
    let area = std::f64::consts::PI * r * r;
    let jy = std::f64::consts::PI * r.powi(4) / 4.0;
    let jz = jy;
    let jx = jy + jz;
    let e = material.young_modulus;
    let g = material.shear_modulus();
    Mat6::from_diagonal(&Vec6::new(g * jx, e * jy, e * jz, e * area, g * area, g * area))
}

/// Viscosity `Upsilon = diag(Jx, 3 Jy, 3 Jz, 3 A, A, A) upsilon`.
pub fn section_viscosity(section: &SectionSpec, material: &MaterialSpec) -> Mat6 {
    let r = section.radius;
    let area = std::f64::consts::PI * r * r;
    let jy = std::f64::consts::PI * r.powi(4) / 4.0;
    let jz = jy;
    let jx = jy + jz;
    Mat6::from_diagonal(
        &(Vec6::new(jx, 3.0 * jy, 3.0 * jz, 3.0 * area, area, area) * material.shear_viscosity),
    )
}

/// Drag and added-mass matrices of a section in the given medium.
///
/// Both have zero angular blocks; linear blocks are
/// `D = diag(pi R Cx / 2, R Cy, R Cz) rho_w` and
/// `A = diag(0, A By, A Bz) rho_w`. Both vanish in air.
pub fn hydrodynamic_matrices(section: &SectionSpec, env: &EnvironmentSpec) -> (Mat6, Mat6) {
    if env.water_density == 0.0 {
        return (Mat6::zeros(), Mat6::zeros());
    }
    let r = section.radius;
    let area = std::f64::consts::PI * r * r;
    let rho_w = env.water_density;
    let drag = Mat6::from_diagonal(&Vec6::new(
        0.0,
        0.0,
        0.0,
        0.5 * std::f64::consts::PI * r * env.drag.cx * rho_w,
        r * env.drag.cy * rho_w,
        r * env.drag.cz * rho_w,
    ));
    let added = Mat6::from_diagonal(&Vec6::new(
        0.0,
        0.0,
        0.0,
        0.0,
        area * env.added_mass.by * rho_w,
        area * env.added_mass.bz * rho_w,
    ));
    (drag, added)
}

/// Cylindrical-section approximation of a linearly tapered arm: each section
/// gets the mean cone radius over its span.
pub fn conical_approximation(
    base_radius: f64,
    tip_radius: f64,
    boundaries: &[f64],
) -> Result<Vec<(f64, f64)>, ArmError> {
    if boundaries.is_empty()
        || boundaries[0] <= 0.0
        || boundaries.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(ArmError::NonMonotoneBoundaries);
    }
    let total = *boundaries.last().unwrap();
    let slope = (base_radius - tip_radius) / total;
    let mut out = Vec::with_capacity(boundaries.len());
    let mut start = 0.0;
    for &end in boundaries {
        let mid = 0.5 * (start + end);
        out.push((end - start, base_radius - slope * mid));
        start = end;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn material() -> MaterialSpec {
        MaterialSpec {
            young_modulus: 110e3,
            shear_viscosity: 300.0,
            poisson_ratio: 0.0,
            density: 1080.0,
        }
    }

    fn section(radius: f64) -> SectionSpec {
        SectionSpec {
            length: 0.25,
            radius,
            index: 1,
            start: 0.0,
            end: 0.25,
        }
    }

    #[test]
    fn inertia_mass_per_length() {
        let m = section_inertia(&section(0.010), &material());
        // pi r^2 rho = 0.3393 kg/m.
        assert!((m[(3, 3)] - 0.339_292_006_587_698_3).abs() < 1e-12);
        assert!((m[(3, 3)] - std::f64::consts::PI * 1e-4 * 1080.0).abs() < 1e-15);
    }

    #[test]
    fn inertia_polar_moment_identity_and_zero_radius_limit() {
        let m = section_inertia(&section(0.013), &material());
        assert!((m[(0, 0)] - m[(1, 1)] - m[(2, 2)]).abs() < 1e-18);
        let tiny = section_inertia(&section(1e-12), &material());
        assert!(tiny.amax() < 1e-20);
    }

    #[test]
    fn stiffness_axial_entry() {
        let s = section_stiffness(&section(0.010), &material());
        // E A = 110e3 * pi * 1e-4.
        assert!((s[(3, 3)] - 110e3 * std::f64::consts::PI * 1e-4).abs() < 1e-9);
        assert!((s[(3, 3)] - 34.557_519_189_487_725).abs() < 1e-9);
    }

    #[test]
    fn incompressible_material_shear_entry() {
        let mut mat = material();
        mat.poisson_ratio = 0.5;
        let s = section_stiffness(&section(0.010), &mat);
        let jx = std::f64::consts::PI * 0.010f64.powi(4) / 2.0;
        assert!((s[(0, 0)] - mat.young_modulus / 3.0 * jx).abs() < 1e-12);
    }

    #[test]
    fn zero_viscosity_gives_zero_matrix() {
        let mut mat = material();
        mat.shear_viscosity = 0.0;
        assert_eq!(section_viscosity(&section(0.010), &mat), Mat6::zeros());
    }

    #[test]
    fn drag_matches_hand_value_and_vanishes_in_air() {
        let env = EnvironmentSpec {
            water_density: 1022.0,
            drag: DragCoefficients { cx: 0.01, cy: 2.5, cz: 2.5 },
            added_mass: AddedMassCoefficients { by: 1.5, bz: 1.5 },
            ..EnvironmentSpec::air()
        };
        let (d, a) = hydrodynamic_matrices(&section(0.015), &env);
        assert!((d[(4, 4)] - 0.015 * 2.5 * 1022.0).abs() < 1e-9);
        assert!((d[(4, 4)] - 38.325).abs() < 1e-9);
        // Isotropic in the section plane when By == Bz.
        assert!((a[(4, 4)] - a[(5, 5)]).abs() < 1e-18);
        let (d0, a0) = hydrodynamic_matrices(&section(0.015), &EnvironmentSpec::air());
        assert_eq!(d0, Mat6::zeros());
        assert_eq!(a0, Mat6::zeros());
    }

    #[test]
    fn added_mass_is_exactly_inertia_difference() {
        let env = EnvironmentSpec {
            water_density: 1022.0,
            drag: DragCoefficients { cx: 0.01, cy: 2.5, cz: 2.5 },
            added_mass: AddedMassCoefficients { by: 1.5, bz: 1.5 },
            ..EnvironmentSpec::air()
        };
        let arm = ArmSpec::new(&[(0.25, 0.015)], material(), env, vec![], ActuationKind::Fluidic)
            .unwrap();
        let diff = arm.inertia_added(1) - arm.inertia(1);
        let (_, a) = hydrodynamic_matrices(&arm.sections[0], &env);
        assert_eq!(diff, a);
    }

    #[test]
    fn conical_sections_use_mean_radius() {
        let dims = conical_approximation(0.015, 0.004, &[0.098, 0.203, 0.311, 0.418]).unwrap();
        assert_eq!(dims.len(), 4);
        // Section 1: 15 mm - (11/418) * 49 mm = 13.7110... mm.
        assert!((dims[0].1 - (0.015 - 0.011 / 0.418 * 0.049)).abs() < 1e-15);
        assert!((dims[0].1 - 0.013_710_526_315_789_473).abs() < 1e-15);
        assert!((dims[0].0 - 0.098).abs() < 1e-15);

        let flat = conical_approximation(0.01, 0.01, &[0.1, 0.2]).unwrap();
        assert!(flat.iter().all(|&(_, r)| (r - 0.01).abs() < 1e-15));

        let single = conical_approximation(0.015, 0.004, &[0.418]).unwrap();
        assert!((single[0].1 - 0.0095).abs() < 1e-15);
    }

    #[test]
    fn conical_rejects_non_monotone_boundaries() {
        assert!(conical_approximation(0.015, 0.004, &[0.2, 0.1]).is_err());
        assert!(conical_approximation(0.015, 0.004, &[]).is_err());
    }

    #[test]
    fn cable_must_fit_inside_traversed_sections() {
        let cables = vec![CableSpec {
            offset: Vec3::new(0.0, 0.02, 0.0),
            anchor_section: 1,
            name: "c1".into(),
        }];
        let err = ArmSpec::new(
            &[(0.25, 0.010)],
            material(),
            EnvironmentSpec::air(),
            cables,
            ActuationKind::Cable,
        );
        assert!(err.is_err());
    }

    #[test]
    fn section_lookup_assigns_boundaries_left() {
        let arm = ArmSpec::new(
            &[(0.25, 0.01), (0.25, 0.01), (0.25, 0.01)],
            material(),
            EnvironmentSpec::air(),
            vec![],
            ActuationKind::Fluidic,
        )
        .unwrap();
        assert_eq!(arm.section_of(0.0), 1);
        assert_eq!(arm.section_of(0.25), 1);
        assert_eq!(arm.section_of(0.250_000_1), 2);
        assert_eq!(arm.section_of(0.75), 3);
    }
}
