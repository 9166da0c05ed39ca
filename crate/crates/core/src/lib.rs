//! Filling-radius estimation for sampled closed manifolds.
//!
//! A sample is a finite metric space. Its Kuratowski embedding sends each point
//! to its distance row, an isometric embedding into the sup-norm space over
//! the sample. The filling radius is read off Vietoris–Rips persistence as
//! half the death diameter of the dominant top-degree class, and the
//! constructive arguments behind the classical bounds (center-of-mass
//! retraction, mapping-cylinder homotopy, reach witnesses) are executed as
//! finite checks.
//!
//! Modules:
//! - [`metric`]: finite metric spaces, the Kuratowski frame, vicinity sets.
//! - [`samplers`]: circles, spheres, flat tori, quotients, graph geodesics.
//! - [`persistence`]: Vietoris–Rips filtrations, Z/2 reduction, estimators.
//! - [`constructions`]: Fréchet retraction, cylinder homotopy, reach probes.
//! - [`bounds`]: closed-form bounds and verdicts.
//! - [`suite`]: the end-to-end scenarios behind the `suite` command.

// `!(x > 0.0)` also rejects NaN; matrix loops read better with indices.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bounds;
pub mod constructions;
pub mod error;
pub mod metric;
pub mod persistence;
pub mod samplers;
pub mod suite;

pub use error::{Error, Result};
pub use metric::{
    kuratowski_embed, scale_metric, sup_distance, validate_metric, vicinity_set, AmbientFunction,
    FiniteMetricSpace, KuratowskiFrame, VicinitySet,
};
pub use samplers::{ManifoldSample, SampleMeta, SubmersionSample};
