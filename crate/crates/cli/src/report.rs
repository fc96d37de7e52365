//! Serializable report schema. Field order in the emitted JSON follows
//! struct declaration order, which together with the --no-timestamp
//! flag makes reports byte-reproducible for golden-file comparison.

use geomgate::qops::ComplexMatrix;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: String,
    pub command: String,
    pub config: ConfigEcho,
    pub results: ResultsBody,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp_unix_s: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

impl Report {
    pub fn render_json(&self) -> String {
        let mut body = serde_json::to_string_pretty(self).expect("report serializes");
        body.push('\n');
        body
    }
}

/// Echo of every effective input, including defaulted ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ConfigEcho {
    pub omega: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coupling: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycles: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_cycles: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub circle: Option<bool>,
    pub format: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResultsBody {
    Verify(VerifyResult),
    Phases(PhasesResult),
    Gate(GateBody),
    Solve(SolveResult),
    ControlledU(ControlledUResult),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyResult {
    pub family: String,
    pub integrator_steps: usize,
    pub sample_times: usize,
    pub max_propagator_delta: f64,
    pub max_scaled_invariance_residual: f64,
    pub max_phase_error: f64,
    pub max_unitarity_defect: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_block_leakage: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasesResult {
    pub family: String,
    pub period: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    pub transition_leakage: f64,
    pub levels: Vec<LevelReport>,
}

/// One invariant level's phases, unwrapped and reduced, next to the
/// closed-form per-cycle values they must reproduce.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub eigenvalue: f64,
    pub total: f64,
    pub total_mod_two_pi: f64,
    pub dynamic: f64,
    pub dynamic_mod_two_pi: f64,
    pub geometric: f64,
    pub geometric_mod_two_pi: f64,
    pub closed_form_total_mod_two_pi: f64,
    pub closed_form_dynamic_mod_two_pi: f64,
    pub closed_form_geometric_mod_two_pi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateBody {
    pub family: String,
    pub cycles: u32,
    pub eigenphases_mod_two_pi: Vec<f64>,
    pub unitarity_defect: f64,
    pub offdiagonal_leakage: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block_leakage: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formula_fidelity: Option<f64>,
    pub computational_basis: Vec<Vec<[f64; 2]>>,
    pub invariant_basis: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub mode: String,
    pub omega: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub k: i64,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_target: Option<f64>,
    pub lambda: f64,
    pub cycle_total: [f64; 2],
    pub cycle_total_mod_two_pi: [f64; 2],
    pub cycle_dynamic: [f64; 2],
    pub cycle_dynamic_mod_two_pi: [f64; 2],
    pub cycle_geometric: [f64; 2],
    pub cycle_geometric_mod_two_pi: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlledUResult {
    pub omega: f64,
    pub coupling: f64,
    pub omega0: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub cycles: u32,
    pub turns: u32,
    pub k: i64,
    pub constraint_residual: f64,
    pub target_geometric_mod_two_pi: [f64; 2],
    pub achieved_geometric_mod_two_pi: [f64; 2],
    pub achieved_geometric_unwrapped: [f64; 2],
    pub upper_block_identity_fidelity: f64,
    pub lower_block_formula_fidelity: f64,
    pub unitarity_defect: f64,
    pub offdiagonal_leakage: f64,
    pub block_leakage: f64,
    pub computational_basis: Vec<Vec<[f64; 2]>>,
    pub invariant_basis: Vec<Vec<[f64; 2]>>,
}

/// Matrix entries as [re, im] pairs, row by row.
pub fn matrix_entries(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.dim())
        .map(|i| {
            (0..m.dim())
                .map(|j| {
                    let z = m.get(i, j);
                    [z.re, z.im]
                })
                .collect()
        })
        .collect()
}

/// One float cell with 17 significant digits, locale-independent.
pub fn csv_float(x: f64) -> String {
    format!("{x:.16e}")
}
