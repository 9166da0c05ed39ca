//! Sample generators for closed manifolds and submersions.
//!
//! Circles, round spheres and the flat torus carry exact geodesic metrics.
//! Quotients take the orbit-minimum metric, and Berger-type rescalings go
//! through shortest paths on a neighbor graph.

mod exact;
mod graph;
mod quotient;

pub use exact::{sample_circle, sample_flat_torus, sample_sphere, sample_sphere_antipodal};
pub use graph::{default_neighbor_count, graph_geodesics, sample_berger, BergerParams};
pub use quotient::{quotient_metric, sample_rp2, submersion_from_fibers, BaseMetadata};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;

/// A sampled manifold together with the geometric data the bound checkers use.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldSample {
    pub space: FiniteMetricSpace,
    pub dim: usize,
    /// Injectivity radius, in length units.
    pub inj: Option<f64>,
    /// Upper bound on sectional curvature, in 1/length².
    pub delta: Option<f64>,
    pub diam_true: Option<f64>,
    pub fillrad_true: Option<f64>,
    /// Filling radii of product factors, when the sample is a product.
    pub factor_fillrads: Option<Vec<f64>>,
    pub orientable: bool,
    pub label: String,
    pub seed: Option<u64>,
    /// Sampling resolution carried into every verdict tolerance.
    pub epsilon: f64,
}

impl ManifoldSample {
    /// Wraps a validated space with no geometric metadata.
    pub fn bare(space: FiniteMetricSpace, dim: usize, label: impl Into<String>) -> Self {
        let epsilon = space.mesh();
        ManifoldSample {
            space,
            dim,
            inj: None,
            delta: None,
            diam_true: None,
            fillrad_true: None,
            factor_fillrads: None,
            orientable: true,
            label: label.into(),
            seed: None,
            epsilon,
        }
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    /// Known diameter, falling back to the largest sampled distance.
    pub fn diameter(&self) -> f64 {
        self.diam_true.unwrap_or_else(|| self.space.diameter())
    }

    pub fn meta(&self) -> SampleMeta {
        SampleMeta {
            label: self.label.clone(),
            dim: self.dim,
            n: self.len(),
            inj: self.inj,
            delta: self.delta,
            diam_true: self.diam_true,
            fillrad_true: self.fillrad_true,
            orientable: self.orientable,
            seed: self.seed,
            epsilon: self.epsilon,
            sampled_diameter: self.space.diameter(),
            factor_fillrads: self.factor_fillrads.clone(),
            fibers: None,
            max_fiber_diameter: None,
            base_dim: None,
        }
    }

    /// Rebuilds a sample from a distance matrix and its sidecar.
    pub fn from_meta(space: FiniteMetricSpace, meta: &SampleMeta) -> Result<Self> {
        if meta.n != space.len() {
            return Err(Error::InvalidParameter(format!(
                "sidecar describes {} points but the matrix has {}",
                meta.n,
                space.len()
            )));
        }
        Ok(ManifoldSample {
            space,
            dim: meta.dim,
            inj: meta.inj,
            delta: meta.delta,
            diam_true: meta.diam_true,
            fillrad_true: meta.fillrad_true,
            factor_fillrads: meta.factor_fillrads.clone(),
            orientable: meta.orientable,
            label: meta.label.clone(),
            seed: meta.seed,
            epsilon: meta.epsilon,
        })
    }

    /// Same sample with every length multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        let space = crate::metric::scale_metric(&self.space, c)?;
        Ok(ManifoldSample {
            space,
            dim: self.dim,
            inj: self.inj.map(|v| v * c),
            delta: self.delta.map(|v| v / (c * c)),
            diam_true: self.diam_true.map(|v| v * c),
            fillrad_true: self.fillrad_true.map(|v| v * c),
            factor_fillrads: self
                .factor_fillrads
                .as_ref()
                .map(|f| f.iter().map(|v| v * c).collect()),
            orientable: self.orientable,
            label: format!("{}*{c}", self.label),
            seed: self.seed,
            epsilon: self.epsilon * c,
        })
    }
}

/// JSON sidecar emitted next to every distance CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleMeta {
    pub label: String,
    pub dim: usize,
    pub n: usize,
    pub inj: Option<f64>,
    pub delta: Option<f64>,
    pub diam_true: Option<f64>,
    pub fillrad_true: Option<f64>,
    pub orientable: bool,
    pub seed: Option<u64>,
    pub epsilon: f64,
    pub sampled_diameter: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor_fillrads: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fibers: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_fiber_diameter: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_dim: Option<usize>,
}

/// A sampled submersion (or submetry) `total → base`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubmersionSample {
    pub total: ManifoldSample,
    pub base: ManifoldSample,
    /// Base index of each total point.
    pub proj: Vec<usize>,
    /// Total indices over each base point, ascending.
    pub fibers: Vec<Vec<usize>>,
    /// Half the largest extrinsic fiber diameter.
    pub rho0: f64,
    pub equidistance_defect: f64,
    pub contraction_defect: f64,
    /// Slack used by every check on this sample: the larger of the measured
    /// defects and the sampling mesh of the total space.
    pub epsilon: f64,
}

impl SubmersionSample {
    /// Builds fibers from `proj`, measures the submersion defects and checks
    /// them against the sampling mesh.
    pub fn new(total: ManifoldSample, base: ManifoldSample, proj: Vec<usize>) -> Result<Self> {
        let sub = Self::assemble(total, base, proj)?;
        let mesh = sub.total.epsilon;
        if sub.equidistance_defect > mesh.max(crate::metric::DEFAULT_TRIANGLE_SLACK)
            || sub.contraction_defect > mesh.max(crate::metric::DEFAULT_TRIANGLE_SLACK)
        {
            return Err(Error::InvalidParameter(format!(
                "submersion defects (equidistance {}, contraction {}) exceed the sampling mesh {mesh}",
                sub.equidistance_defect, sub.contraction_defect
            )));
        }
        Ok(sub)
    }

    /// Like [`SubmersionSample::new`] but accepts any measured defect; the
    /// defect becomes the stored slack.
    pub fn with_measured_slack(
        total: ManifoldSample,
        base: ManifoldSample,
        proj: Vec<usize>,
    ) -> Result<Self> {
        Self::assemble(total, base, proj)
    }

    fn assemble(total: ManifoldSample, base: ManifoldSample, proj: Vec<usize>) -> Result<Self> {
        if proj.len() != total.len() {
            return Err(Error::LengthMismatch(proj.len(), total.len()));
        }
        let nb = base.len();
        let mut fibers = vec![Vec::new(); nb];
        for (z, &b) in proj.iter().enumerate() {
            if b >= nb {
                return Err(Error::IndexOutOfRange { index: b, len: nb });
            }
            fibers[b].push(z);
        }
        if let Some(b) = fibers.iter().position(|f| f.is_empty()) {
            return Err(Error::NotAPartition(format!(
                "projection misses base point {b}"
            )));
        }
        let d = &total.space;
        let max_fiber_diam = fibers
            .iter()
            .map(|f| fiber_diameter(d, f))
            .fold(0.0, f64::max);
        let rho0 = 0.5 * max_fiber_diam;
        let equidistance_defect = equidistance_defect(d, &base.space, &fibers);
        let contraction_defect = contraction_defect(d, &base.space, &proj);
        let epsilon = equidistance_defect
            .max(contraction_defect)
            .max(total.epsilon);
        Ok(SubmersionSample {
            total,
            base,
            proj,
            fibers,
            rho0,
            equidistance_defect,
            contraction_defect,
            epsilon,
        })
    }

    pub fn max_fiber_diameter(&self) -> f64 {
        2.0 * self.rho0
    }

    pub fn meta(&self) -> SampleMeta {
        let mut meta = self.total.meta();
        meta.fibers = Some(self.fibers.clone());
        meta.max_fiber_diameter = Some(self.max_fiber_diameter());
        meta.base_dim = Some(self.base.dim);
        meta.epsilon = self.epsilon;
        meta
    }
}

/// Largest total-space distance within one fiber.
pub fn fiber_diameter(d: &FiniteMetricSpace, fiber: &[usize]) -> f64 {
    let mut best = 0.0f64;
    for (a, &i) in fiber.iter().enumerate() {
        for &j in &fiber[a + 1..] {
            best = best.max(d.get(i, j));
        }
    }
    best
}

/// `max |min_{z1 ∈ F(b1)} d(z0, z1) - d_B(π z0, b1)|` over all `z0`, `b1`.
fn equidistance_defect(
    total: &FiniteMetricSpace,
    base: &FiniteMetricSpace,
    fibers: &[Vec<usize>],
) -> f64 {
    let mut worst = 0.0f64;
    for (b0, f0) in fibers.iter().enumerate() {
        for &z0 in f0 {
            let row = total.row(z0);
            for (b1, f1) in fibers.iter().enumerate() {
                let nearest = f1.iter().map(|&z1| row[z1]).fold(f64::INFINITY, f64::min);
                worst = worst.max((nearest - base.get(b0, b1)).abs());
            }
        }
    }
    worst
}

/// `max (d_B(π z, π w) - d(z, w))⁺`.
fn contraction_defect(total: &FiniteMetricSpace, base: &FiniteMetricSpace, proj: &[usize]) -> f64 {
    let n = total.len();
    let mut worst = 0.0f64;
    for z in 0..n {
        for w in (z + 1)..n {
            worst = worst.max(base.get(proj[z], proj[w]) - total.get(z, w));
        }
    }
    worst
}
