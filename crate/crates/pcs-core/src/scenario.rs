//! Scenario documents, bundled presets and trajectory serialization.
//!
//! Documents are JSON with bench-friendly units (mm, kPa, kg/dm3, mN, mN m);
//! parsing validates the schema (unknown keys rejected), checks physical
//! plausibility and converts everything to SI. Trajectories go out as CSV
//! (one row per record) plus a JSON summary with the final screw parameters
//! and energy drift.

use crate::arm::{
    conical_approximation, ActuationKind, ArmSpec, CableSpec, EnvironmentSpec, MaterialSpec,
};
use crate::dynamics::PointLoad;
use crate::lie::Transform;
use crate::sim::{Profile, Schedule, SimSettings, Trajectory};
use crate::{kinematics::JointState, Mat3, Vec3, Vec6};
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("schema error: {0}")]
    Schema(#[from] serde_json::Error),
    #[error("invalid scenario: {0}")]
    Validation(String),
    #[error("arm error: {0}")]
    Arm(#[from] crate::arm::ArmError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn invalid(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Validation(msg.into())
}

// ---------------------------------------------------------------------------
// Document model (raw JSON shape).

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub name: String,
    pub arm: ArmDocument,
    pub actuation: ActuationDocument,
    #[serde(default)]
    pub point_loads: Vec<PointLoadDocument>,
    pub integrator: IntegratorDocument,
    #[serde(default)]
    pub output_stations_mm: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ArmDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sections: Option<Vec<SectionDocument>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cone: Option<ConeDocument>,
    pub material: MaterialDocument,
    pub environment: EnvironmentDocument,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cables: Vec<CableDocument>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SectionDocument {
    pub length_mm: f64,
    pub radius_mm: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConeDocument {
    pub base_radius_mm: f64,
    pub tip_radius_mm: f64,
    pub boundaries_mm: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MaterialDocument {
    pub young_modulus_kpa: f64,
    pub shear_viscosity_pa_s: f64,
    pub poisson_ratio: f64,
    pub density_kg_dm3: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct DragDocument {
    pub cx: f64,
    pub cy: f64,
    pub cz: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct AddedMassDocument {
    pub by: f64,
    pub bz: f64,
}

fn identity_rotation() -> [[f64; 3]; 3] {
    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentDocument {
    #[serde(default)]
    pub water_density_kg_dm3: f64,
    #[serde(default)]
    pub drag_coefficients: DragDocument,
    #[serde(default)]
    pub added_mass_coefficients: AddedMassDocument,
    #[serde(default)]
    pub gravity_mps2: [f64; 6],
    #[serde(default = "identity_rotation")]
    pub base_rotation: [[f64; 3]; 3],
    #[serde(default)]
    pub base_position_mm: [f64; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CableDocument {
    pub name: String,
    pub offset_mm: [f64; 3],
    pub anchor_section: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum ActuationDocument {
    #[serde(rename = "cable")]
    Cable { tensions: Vec<TensionDocument> },
    #[serde(rename = "fluidic")]
    Fluidic { channels: Vec<FluidicChannelDocument> },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TensionDocument {
    /// Cable name this tension profile drives (N).
    pub cable: String,
    pub profile: ProfileDocument,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FluidicChannelDocument {
    /// 1-based section index.
    pub section: usize,
    /// Chamber wrench at full drive: moments in mN m, forces in mN.
    pub wrench_mnm: [f64; 6],
    /// Dimensionless multiplier profile.
    pub profile: ProfileDocument,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", deny_unknown_fields)]
pub enum ProfileDocument {
    #[serde(rename = "constant")]
    Constant { value: f64 },
    #[serde(rename = "ramp")]
    Ramp {
        start_s: f64,
        width_s: f64,
        #[serde(default)]
        from: f64,
        to: f64,
    },
    #[serde(rename = "samples")]
    Samples { times_s: Vec<f64>, values: Vec<f64> },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PointLoadDocument {
    /// World-frame moment (mN m).
    pub moment_mnm: [f64; 3],
    /// World-frame force (mN).
    pub force_mn: [f64; 3],
    pub at_mm: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct IntegratorDocument {
    pub dt_s: f64,
    pub t_end_s: f64,
    #[serde(default = "default_quadrature")]
    pub quadrature_points: usize,
    #[serde(default = "default_output_every")]
    pub output_every: usize,
}

fn default_quadrature() -> usize {
    5
}

fn default_output_every() -> usize {
    1
}

// ---------------------------------------------------------------------------
// Parsed runtime scenario.

/// A validated, SI-converted scenario ready to run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub arm: ArmSpec,
    pub schedule: Schedule,
    pub point_loads: Vec<PointLoad>,
    pub settings: SimSettings,
    pub quadrature_points: usize,
    /// Output stations (m).
    pub stations: Vec<f64>,
}

const MM: f64 = 1e-3;
const KPA: f64 = 1e3;
const KG_DM3: f64 = 1e3;
const MN: f64 = 1e-3;

fn profile_from(doc: &ProfileDocument) -> Result<Profile, ScenarioError> {
    Ok(match doc {
        ProfileDocument::Constant { value } => Profile::constant(*value),
        ProfileDocument::Ramp { start_s, width_s, from, to } => {
            if *width_s <= 0.0 {
                return Err(invalid("actuation profile: ramp width_s must be positive"));
            }
            Profile::ramp(*start_s, *width_s, *from, *to)
        }
        ProfileDocument::Samples { times_s, values } => {
            if times_s.len() != values.len() || times_s.is_empty() {
                return Err(invalid(
                    "actuation profile: times_s and values must be equal-length and non-empty",
                ));
            }
            if times_s.windows(2).any(|w| w[1] <= w[0]) {
                return Err(invalid(
                    "actuation profile: times_s must be strictly increasing",
                ));
            }
            Profile::samples(times_s.iter().copied().zip(values.iter().copied()).collect())
        }
    })
}

/// Parse and validate a scenario document string.
pub fn parse_scenario(json: &str) -> Result<Scenario, ScenarioError> {
    let doc: ScenarioDocument = serde_json::from_str(json)?;
    scenario_from_document(&doc)
}

/// Build the runtime scenario from an already-deserialized document.
pub fn scenario_from_document(doc: &ScenarioDocument) -> Result<Scenario, ScenarioError> {
    let section_dims: Vec<(f64, f64)> = match (&doc.arm.sections, &doc.arm.cone) {
        (Some(sections), None) => sections
            .iter()
            .map(|s| (s.length_mm * MM, s.radius_mm * MM))
            .collect(),
        (None, Some(cone)) => {
            let boundaries: Vec<f64> = cone.boundaries_mm.iter().map(|b| b * MM).collect();
            conical_approximation(cone.base_radius_mm * MM, cone.tip_radius_mm * MM, &boundaries)?
        }
        _ => {
            return Err(invalid(
                "arm: exactly one of `sections` or `cone` must be given",
            ))
        }
    };

    let m = &doc.arm.material;
    if m.young_modulus_kpa <= 0.0 {
        return Err(invalid("arm.material.young_modulus_kpa must be positive"));
    }
    if m.density_kg_dm3 <= 0.0 {
        return Err(invalid("arm.material.density_kg_dm3 must be positive"));
    }
    let material = MaterialSpec {
        young_modulus: m.young_modulus_kpa * KPA,
        shear_viscosity: m.shear_viscosity_pa_s,
        poisson_ratio: m.poisson_ratio,
        density: m.density_kg_dm3 * KG_DM3,
    };

    let e = &doc.arm.environment;
    let rotation = Mat3::from_iterator(
        (0..3).flat_map(|c| (0..3).map(move |r| e.base_rotation[r][c])),
    );
    let environment = EnvironmentSpec {
        water_density: e.water_density_kg_dm3 * KG_DM3,
        drag: crate::arm::DragCoefficients {
            cx: e.drag_coefficients.cx,
            cy: e.drag_coefficients.cy,
            cz: e.drag_coefficients.cz,
        },
        added_mass: crate::arm::AddedMassCoefficients {
            by: e.added_mass_coefficients.by,
            bz: e.added_mass_coefficients.bz,
        },
        gravity: Vec6::from_column_slice(&e.gravity_mps2),
        base_transform: Transform::new(
            rotation,
            Vec3::from_column_slice(&e.base_position_mm) * MM,
        ),
    };

    let cables: Vec<CableSpec> = doc
        .arm
        .cables
        .iter()
        .map(|c| CableSpec {
            offset: Vec3::from_column_slice(&c.offset_mm) * MM,
            anchor_section: c.anchor_section,
            name: c.name.clone(),
        })
        .collect();

    let actuation_kind = match doc.actuation {
        ActuationDocument::Cable { .. } => ActuationKind::Cable,
        ActuationDocument::Fluidic { .. } => ActuationKind::Fluidic,
    };
    if actuation_kind == ActuationKind::Cable && cables.is_empty() {
        return Err(invalid("cable actuation requires arm.cables"));
    }

    let arm = ArmSpec::new(&section_dims, material, environment, cables, actuation_kind)?;

    let schedule = match &doc.actuation {
        ActuationDocument::Cable { tensions } => {
            let mut profiles = vec![Profile::constant(0.0); arm.cables.len()];
            for t in tensions {
                let idx = arm
                    .cables
                    .iter()
                    .position(|c| c.name == t.cable)
                    .ok_or_else(|| {
                        invalid(format!("actuation.tensions: unknown cable `{}`", t.cable))
                    })?;
                profiles[idx] = profile_from(&t.profile)?;
            }
            Schedule::Cable { tensions: profiles }
        }
        ActuationDocument::Fluidic { channels } => {
            let mut chans = vec![(Vec6::zeros(), Profile::constant(0.0)); arm.section_count()];
            for c in channels {
                if c.section == 0 || c.section > arm.section_count() {
                    return Err(invalid(format!(
                        "actuation.channels: section {} outside 1..={}",
                        c.section,
                        arm.section_count()
                    )));
                }
                chans[c.section - 1] =
                    (Vec6::from_column_slice(&c.wrench_mnm) * MN, profile_from(&c.profile)?);
            }
            Schedule::Fluidic { channels: chans }
        }
    };

    let total = arm.total_length();
    let point_loads: Vec<PointLoad> = doc
        .point_loads
        .iter()
        .map(|l| {
            let x = l.at_mm * MM;
            if !(0.0..=total + 1e-12).contains(&x) {
                return Err(invalid(format!(
                    "point_loads.at_mm: {} outside the arm [0, {}]",
                    l.at_mm,
                    total / MM
                )));
            }
            Ok(PointLoad {
                wrench: Vec6::new(
                    l.moment_mnm[0] * MN,
                    l.moment_mnm[1] * MN,
                    l.moment_mnm[2] * MN,
                    l.force_mn[0] * MN,
                    l.force_mn[1] * MN,
                    l.force_mn[2] * MN,
                ),
                position: x,
            })
        })
        .collect::<Result<_, _>>()?;

    if doc.integrator.dt_s <= 0.0 {
        return Err(invalid("integrator.dt_s must be positive"));
    }
    if doc.integrator.t_end_s < 0.0 {
        return Err(invalid("integrator.t_end_s must be non-negative"));
    }
    if !(1..=64).contains(&doc.integrator.quadrature_points) {
        return Err(invalid("integrator.quadrature_points must be in 1..=64"));
    }

    let stations: Vec<f64> = doc
        .output_stations_mm
        .iter()
        .map(|&s| {
            let x = s * MM;
            if !(0.0..=total + 1e-12).contains(&x) {
                return Err(invalid(format!(
                    "output_stations_mm: {s} outside the arm [0, {}]",
                    total / MM
                )));
            }
            Ok(x.min(total))
        })
        .collect::<Result<_, _>>()?;

    Ok(Scenario {
        name: doc.name.clone(),
        arm,
        schedule,
        point_loads,
        settings: SimSettings {
            dt: doc.integrator.dt_s,
            t_end: doc.integrator.t_end_s,
            output_every: doc.integrator.output_every.max(1),
        },
        quadrature_points: doc.integrator.quadrature_points,
        stations,
    })
}

/// Canonical JSON serialization of a document.
pub fn write_scenario(doc: &ScenarioDocument) -> String {
    serde_json::to_string_pretty(doc).expect("scenario documents always serialize")
}

/// Bundled scenario presets by name (`plane`, `outofplane`, `cantilever`,
/// `prototype`), with or without a `.json` suffix.
pub fn preset(name: &str) -> Option<&'static str> {
    match name.trim_end_matches(".json") {
        "plane" => Some(include_str!("../presets/plane.json")),
        "outofplane" => Some(include_str!("../presets/outofplane.json")),
        "cantilever" => Some(include_str!("../presets/cantilever.json")),
        "prototype" => Some(include_str!("../presets/prototype.json")),
        _ => None,
    }
}

pub const PRESET_NAMES: [&str; 4] = ["plane", "outofplane", "cantilever", "prototype"];

// ---------------------------------------------------------------------------
// Trajectory output.

/// CSV header for a trajectory of `sections` sections and the given station
/// count: `t`, strains, rates, station poses (rotation row-major + position),
/// kinetic and elastic energy.
pub fn trajectory_csv_header(sections: usize, stations: usize) -> String {
    let mut cols = vec!["t".to_string()];
    let comps = ["kx", "ky", "kz", "qx", "qy", "qz"];
    for n in 1..=sections {
        for c in comps {
            cols.push(format!("xi{n}_{c}"));
        }
    }
    for n in 1..=sections {
        for c in comps {
            cols.push(format!("xid{n}_{c}"));
        }
    }
    for s in 1..=stations {
        for rc in ["r11", "r12", "r13", "r21", "r22", "r23", "r31", "r32", "r33"] {
            cols.push(format!("st{s}_{rc}"));
        }
        for p in ["px", "py", "pz"] {
            cols.push(format!("st{s}_{p}"));
        }
    }
    cols.push("ke".into());
    cols.push("pe".into());
    cols.join(",")
}

/// Render a trajectory as CSV (header plus one row per record).
pub fn trajectory_csv(traj: &Trajectory, sections: usize) -> String {
    let mut out = trajectory_csv_header(sections, traj.stations.len());
    out.push('\n');
    for k in 0..traj.len() {
        let mut row: Vec<String> = Vec::with_capacity(3 + 12 * sections);
        row.push(format!("{}", traj.times[k]));
        for v in traj.xi[k].iter() {
            row.push(format!("{v}"));
        }
        for v in traj.xi_dot[k].iter() {
            row.push(format!("{v}"));
        }
        for pose in &traj.station_poses[k] {
            for r in 0..3 {
                for c in 0..3 {
                    row.push(format!("{}", pose.rotation[(r, c)]));
                }
            }
            for i in 0..3 {
                row.push(format!("{}", pose.position[i]));
            }
        }
        row.push(format!("{}", traj.kinetic[k]));
        row.push(format!("{}", traj.elastic[k]));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn write_trajectory(traj: &Trajectory, sections: usize, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, trajectory_csv(traj, sections))
}

/// Final screw parameters of one section, bench units alongside SI.
#[derive(Debug, Clone, Serialize)]
pub struct ScrewSummary {
    pub section: usize,
    pub axis: [f64; 3],
    pub pitch_m: f64,
    pub pitch_mm: f64,
    pub magnitude_rad: f64,
    pub translation_m: f64,
    pub axis_point_m: [f64; 3],
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergySummary {
    pub initial: f64,
    pub final_: f64,
    pub drift: f64,
}

/// JSON run summary: final screws, energies and tip pose.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub name: String,
    pub sections: usize,
    pub dt_s: f64,
    pub t_end_s: f64,
    pub records: usize,
    pub screws: Vec<ScrewSummary>,
    pub energy: EnergySummary,
    pub final_tip_world_m: [f64; 3],
}

/// Screw parameters of every section of a joint state.
pub fn screws_of_state(arm: &ArmSpec, state: &JointState) -> Vec<ScrewSummary> {
    (1..=arm.section_count())
        .map(|n| {
            let s = state.strain(n).screw_params(arm.sections[n - 1].length);
            ScrewSummary {
                section: n,
                axis: [s.axis.x, s.axis.y, s.axis.z],
                pitch_m: s.pitch,
                pitch_mm: s.pitch / MM,
                magnitude_rad: s.magnitude,
                translation_m: s.translation,
                axis_point_m: [s.axis_point.x, s.axis_point.y, s.axis_point.z],
            }
        })
        .collect()
}

pub fn run_summary(scenario: &Scenario, traj: &Trajectory) -> RunSummary {
    let state = traj.final_state();
    let kin = crate::kinematics::Kinematics::new(&scenario.arm, &state);
    let tip = kin.world_pose_at(scenario.arm.total_length()).position;
    let e0 = traj.kinetic[0] + traj.elastic[0];
    let e1 = traj.kinetic[traj.len() - 1] + traj.elastic[traj.len() - 1];
    RunSummary {
        name: scenario.name.clone(),
        sections: scenario.arm.section_count(),
        dt_s: scenario.settings.dt,
        t_end_s: scenario.settings.t_end,
        records: traj.len(),
        screws: screws_of_state(&scenario.arm, &state),
        energy: EnergySummary { initial: e0, final_: e1, drift: e1 - e0 },
        final_tip_world_m: [tip.x, tip.y, tip.z],
    }
}
