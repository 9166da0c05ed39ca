//! The constructive steps behind the filling-radius bounds, run on samples:
//! the center-of-mass retraction of a vicinity set, the mapping-cylinder
//! homotopy of a submersion, and the witnesses showing the Kuratowski image
//! has zero reach.

mod cylinder;
mod reach;
mod retraction;

pub use cylinder::{
    cylinder_audit, cylinder_function, default_t_grid, shifted_base_function, CylinderFunction,
    DEFAULT_T_GRID,
};
pub use reach::{
    projection_audit, reach_audit, reach_probe, unique_projection_witness, ReachWitness,
    UniqueProjection, WITNESS_TOLERANCE,
};
pub use retraction::{
    frechet_retract, retraction_audit, ContinuityProbe, RetractionAudit, RetractionConfig,
};

use serde::{Deserialize, Serialize};

/// One failed check, located by sample point `p`, parameter `t` and
/// coordinate `z` where they apply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub check: String,
    pub p: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub z: Option<usize>,
    /// Amount by which the checked quantity exceeds its bound.
    pub residual: f64,
}

/// Common shape of every construction audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Audit {
    pub construct: String,
    pub parameters: serde_json::Value,
    pub violations: Vec<Violation>,
    /// Largest excess over any bound, before slack; `<= 0` when every bound
    /// holds outright.
    pub max_residual: f64,
    pub epsilon_used: f64,
    #[serde(skip_serializing_if = "serde_json::Map::is_empty", default)]
    pub summary: serde_json::Map<String, serde_json::Value>,
}

impl Audit {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("audit serializes")
    }
}
