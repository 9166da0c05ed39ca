//! Vietoris–Rips persistence over Z/2 and the filling-radius estimators built
//! on it.

mod estimate;
mod filtration;
mod naive;
mod reduce;

pub use estimate::{
    default_threshold, estimate_fillrad, scaling_check, scaling_check_from, select_dominant_bar,
    Bar, EstimatorConfig, FillRadEstimate, ScalingReport, CONVENTION, SCALING_TOLERANCE,
};
pub use filtration::{
    build_vr_filtration, build_vr_filtration_with_budget, Filtration, Simplex, SimplexId,
    SimplexKey, VertexCodec, DEFAULT_SIMPLEX_BUDGET,
};
pub use naive::reduce_naive;
pub use reduce::reduce;

use serde::{Deserialize, Serialize};

/// A finite bar: a class born at `birth` and killed at `death > birth`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PersistencePair {
    pub dim: usize,
    pub birth: f64,
    pub death: f64,
    #[serde(skip)]
    pub birth_simplex: SimplexId,
    #[serde(skip)]
    pub death_simplex: SimplexId,
}

impl PersistencePair {
    pub fn length(&self) -> f64 {
        self.death - self.birth
    }
}

/// A class still alive at the filtration threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EssentialClass {
    pub dim: usize,
    pub birth: f64,
    #[serde(skip)]
    pub simplex: SimplexId,
}

/// Persistence of a filtration in degrees `0..maxdim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Barcode {
    /// Top simplex dimension of the filtration; homology is reported up to
    /// degree `maxdim - 1`.
    pub maxdim: usize,
    pub threshold: f64,
    pub pairs: Vec<PersistencePair>,
    pub essentials: Vec<EssentialClass>,
    /// Pairs with birth == death, dropped from `pairs`.
    #[serde(skip)]
    pub zero_length: usize,
}

impl Barcode {
    pub fn empty(maxdim: usize, threshold: f64) -> Self {
        Barcode {
            maxdim,
            threshold,
            pairs: Vec::new(),
            essentials: Vec::new(),
            zero_length: 0,
        }
    }

    pub fn maxdim_homology(&self) -> usize {
        self.maxdim.saturating_sub(1)
    }

    pub fn pairs_in(&self, dim: usize) -> impl Iterator<Item = &PersistencePair> + '_ {
        self.pairs.iter().filter(move |p| p.dim == dim)
    }

    pub fn essentials_in(&self, dim: usize) -> impl Iterator<Item = &EssentialClass> + '_ {
        self.essentials.iter().filter(move |e| e.dim == dim)
    }

    pub(crate) fn canonicalize(&mut self) {
        self.pairs
            .sort_by_key(|a| (a.dim, a.birth_simplex));
        self.essentials
            .sort_by_key(|a| (a.dim, a.simplex));
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("barcode serializes")
    }
}
