//! Closed-form filling-radius bounds and the verdicts comparing them with a
//! persistence estimate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;
use crate::persistence::{estimate_fillrad, EstimatorConfig, FillRadEstimate};
use crate::samplers::{ManifoldSample, SampleMeta, SubmersionSample};

/// `¼ · min(inj, π/√Δ)`; `Δ = 0` removes the curvature term.
pub fn lower_bound(inj: f64, delta: f64) -> Result<f64> {
    if !(inj > 0.0) {
        return Err(Error::NonpositiveInjectivityRadius(inj));
    }
    if !(delta >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "curvature bound must be >= 0, got {delta}"
        )));
    }
    Ok(0.25 * inj.min(conjugate_scale(delta)))
}

/// `π/√Δ`, infinite for `Δ = 0`.
fn conjugate_scale(delta: f64) -> f64 {
    if delta == 0.0 {
        f64::INFINITY
    } else {
        std::f64::consts::PI / delta.sqrt()
    }
}

pub fn katz_bound(diam: f64) -> f64 {
    diam / 3.0
}

/// Half the largest extrinsic fiber diameter.
pub fn submersion_bound(sub: &SubmersionSample) -> Result<f64> {
    let all_points = sub.fibers.iter().all(|f| f.len() < 2);
    if all_points && sub.total.dim <= sub.base.dim {
        return Err(Error::DimensionNotExceeded);
    }
    Ok(sub.rho0)
}

pub fn warped_product_bound(fillrad_base: f64, max_warp: f64, diam_fiber: f64) -> f64 {
    fillrad_base.min(0.5 * max_warp * diam_fiber)
}

/// Filling radius of a Riemannian product from those of its factors.
pub fn product_fillrad(fr1: f64, fr2: f64) -> f64 {
    fr1.min(fr2)
}

/// Largest distance ratio `d_Y(f p, f q) / d_X(p, q)` over pairs `p ≠ q`.
pub fn dilation(map: &[usize], x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<f64> {
    if map.len() != x.len() {
        return Err(Error::LengthMismatch(map.len(), x.len()));
    }
    if let Some(&bad) = map.iter().find(|&&m| m >= y.len()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            len: y.len(),
        });
    }
    let mut best = 0.0f64;
    for p in 0..x.len() {
        for q in p + 1..x.len() {
            best = best.max(y.get(map[p], map[q]) / x.get(p, q));
        }
    }
    Ok(best)
}

/// Smallest upper bound on the filling radius available from the sample's
/// metadata: Katz's `diam/3`, the known value, and the product formula.
pub fn best_known_upper_bound(sample: &ManifoldSample) -> f64 {
    let mut best = katz_bound(sample.diameter());
    if let Some(v) = sample.fillrad_true {
        best = best.min(v);
    }
    if let Some(factors) = &sample.factor_fillrads {
        best = factors.iter().copied().fold(best, f64::min);
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzReport {
    pub k: usize,
    /// Dilation of the map.
    pub c: f64,
    pub estimate_x: FillRadEstimate,
    pub estimate_y: FillRadEstimate,
    /// `estimate_y / c`.
    pub rhs: f64,
    /// `estimate_x - rhs`.
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Residual within rounding of zero.
    pub tight: bool,
}

/// Compares `fillrad_k(X) ≥ fillrad_k(Y) / dil f` on samples. The inequality
/// needs `f` to be onto in degree-`k` homology, which is not computed here:
/// the caller asserts it through `surjective`.
pub fn lipschitz_comparison(
    x: &ManifoldSample,
    y: &ManifoldSample,
    map: &[usize],
    k: usize,
    surjective: bool,
    config: &EstimatorConfig,
) -> Result<LipschitzReport> {
    if !surjective {
        return Err(Error::InvalidParameter(
            "comparison needs the map to be onto in homology; surjectivity not asserted".into(),
        ));
    }
    let c = dilation(map, &x.space, &y.space)?;
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(
            "constant map has dilation 0; the comparison is vacuous".into(),
        ));
    }
    let estimate_x = estimate_fillrad(x, k, config)?;
    let estimate_y = estimate_fillrad(y, k, config)?;
    let rhs = estimate_y.estimate / c;
    let residual = estimate_x.estimate - rhs;
    let tolerance = x.epsilon + estimate_x.half_gap + (y.epsilon + estimate_y.half_gap) / c;
    Ok(LipschitzReport {
        k,
        c,
        rhs,
        residual,
        tolerance,
        pass: residual >= -tolerance,
        tight: residual.abs() <= 1e-9 * estimate_x.estimate.abs(),
        estimate_x,
        estimate_y,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundValue {
    pub value: f64,
    pub inj: f64,
    /// Curvature bound; 0 means no curvature term.
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WarpedInputs {
    pub fillrad_base: f64,
    pub max_warp: f64,
    pub diam_fiber: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// The estimate must be at least the bound.
    Lower,
    /// The estimate must be at most the bound.
    Upper,
    /// The estimate must match the value.
    Equal,
    /// `bound` must be at most `compared`, both analytic.
    Analytic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub bound: String,
    pub relation: Relation,
    pub value: f64,
    pub compared: f64,
    /// Signed margin; negative means the inequality is violated before
    /// tolerance. For `Equal` it is minus the absolute difference.
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Verdict {
    fn new(bound: &str, relation: Relation, value: f64, compared: f64, tolerance: f64) -> Self {
        let residual = match relation {
            Relation::Lower => compared - value,
            Relation::Upper => value - compared,
            Relation::Equal => -(compared - value).abs(),
            Relation::Analytic => compared - value,
        };
        Verdict {
            bound: bound.to_string(),
            relation,
            value,
            compared,
            residual,
            tolerance,
            pass: residual >= -tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub label: String,
    pub estimate: FillRadEstimate,
    pub lower: Option<LowerBoundValue>,
    pub katz: f64,
    /// Diameter used for `katz`.
    pub diam: f64,
    pub submersion: Option<f64>,
    pub warped: Option<f64>,
    pub warped_inputs: Option<WarpedInputs>,
    pub product: Option<f64>,
    pub factor_fillrads: Option<Vec<f64>>,
    pub known: Option<f64>,
    /// Sampling slack of the sample.
    pub epsilon: f64,
    /// `epsilon + estimate.half_gap`, used by every estimate verdict.
    pub tolerance: f64,
    pub verdicts: Vec<Verdict>,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Verdict> + '_ {
        self.verdicts.iter().filter(|v| !v.pass)
    }

    /// Aligned `(bound, value, verdict)` table.
    pub fn to_table(&self) -> String {
        let width = self
            .verdicts
            .iter()
            .map(|v| v.bound.len())
            .max()
            .unwrap_or(0)
            .max("bound".len());
        let mut out = format!(
            "{}  (estimate {:.6}, tolerance {:.6})\n{:<width$}  {:>12}  {:>12}  verdict\n",
            self.label, self.estimate.estimate, self.tolerance, "bound", "value", "compared"
        );
        for v in &self.verdicts {
            out.push_str(&format!(
                "{:<width$}  {:>12.6}  {:>12.6}  {}\n",
                v.bound,
                v.value,
                v.compared,
                if v.pass { "pass" } else { "FAIL" }
            ));
        }
        out
    }
}

/// What a report is checked against: a plain sample or a submersion.
#[derive(Debug, Clone, Copy)]
pub enum BoundTarget<'a> {
    Sample(&'a ManifoldSample),
    Submersion(&'a SubmersionSample),
}

impl<'a> From<&'a ManifoldSample> for BoundTarget<'a> {
    fn from(s: &'a ManifoldSample) -> Self {
        BoundTarget::Sample(s)
    }
}

impl<'a> From<&'a SubmersionSample> for BoundTarget<'a> {
    fn from(s: &'a SubmersionSample) -> Self {
        BoundTarget::Submersion(s)
    }
}

pub fn check_bounds<'a>(
    target: impl Into<BoundTarget<'a>>,
    estimate: &FillRadEstimate,
) -> BoundReport {
    check_bounds_with(target, estimate, None)
}

/// Evaluates every bound the target's metadata supports and compares each
/// with `estimate`. Failures are verdicts, never errors.
pub fn check_bounds_with<'a>(
    target: impl Into<BoundTarget<'a>>,
    estimate: &FillRadEstimate,
    warped: Option<WarpedInputs>,
) -> BoundReport {
    let meta = match target.into() {
        BoundTarget::Sample(s) => s.meta(),
        BoundTarget::Submersion(sub) => sub.meta(),
    };
    check_bounds_meta_with(&meta, estimate, warped)
}

/// [`check_bounds`] from a sample sidecar alone; the distance matrix is not
/// needed.
pub fn check_bounds_meta(meta: &SampleMeta, estimate: &FillRadEstimate) -> BoundReport {
    check_bounds_meta_with(meta, estimate, None)
}

pub fn check_bounds_meta_with(
    meta: &SampleMeta,
    estimate: &FillRadEstimate,
    warped: Option<WarpedInputs>,
) -> BoundReport {
    let submersion = meta.fibers.as_ref().and_then(|fibers| {
        let all_points = fibers.iter().all(|f| f.len() < 2);
        let no_gap = meta.base_dim.is_none_or(|b| meta.dim <= b);
        if all_points && no_gap {
            None
        } else {
            meta.max_fiber_diameter.map(|d| 0.5 * d)
        }
    });
    let lower = meta.inj.and_then(|inj| {
        let delta = meta.delta.unwrap_or(0.0);
        lower_bound(inj, delta)
            .ok()
            .map(|value| LowerBoundValue { value, inj, delta })
    });
    let product = meta.factor_fillrads.as_ref().and_then(|f| {
        f.iter()
            .copied()
            .reduce(product_fillrad)
            .filter(|_| f.len() >= 2)
    });
    let diam = meta.diam_true.unwrap_or(meta.sampled_diameter);
    let mut report = BoundReport {
        label: meta.label.clone(),
        estimate: estimate.clone(),
        lower,
        katz: katz_bound(diam),
        diam,
        submersion,
        warped: warped.map(|w| warped_product_bound(w.fillrad_base, w.max_warp, w.diam_fiber)),
        warped_inputs: warped,
        product,
        factor_fillrads: meta.factor_fillrads.clone(),
        known: meta.fillrad_true,
        epsilon: meta.epsilon,
        tolerance: meta.epsilon + estimate.half_gap,
        verdicts: Vec::new(),
    };
    report.verdicts = recheck(&report);
    report
}

/// Recomputes every bound and verdict from the numbers stored in `report`.
pub fn recheck(report: &BoundReport) -> Vec<Verdict> {
    let est = report.estimate.estimate;
    let tol = report.epsilon + report.estimate.half_gap;
    let katz = katz_bound(report.diam);
    let mut out = Vec::new();
    let lower = report
        .lower
        .and_then(|l| lower_bound(l.inj, l.delta).ok().map(|v| (v, l)));
    if let Some((value, _)) = lower {
        out.push(Verdict::new("lower", Relation::Lower, value, est, tol));
    }
    out.push(Verdict::new("katz", Relation::Upper, katz, est, tol));
    if let Some(value) = report.submersion {
        out.push(Verdict::new("submersion", Relation::Upper, value, est, tol));
        if let Some((_, l)) = lower {
            // half of the injectivity scale never exceeds a fiber diameter
            let lhs = 0.5 * l.inj.min(conjugate_scale(l.delta));
            out.push(Verdict::new(
                "combined",
                Relation::Analytic,
                lhs,
                2.0 * value,
                report.epsilon,
            ));
        }
    }
    if let Some(w) = report.warped_inputs {
        let value = warped_product_bound(w.fillrad_base, w.max_warp, w.diam_fiber);
        out.push(Verdict::new("warped", Relation::Upper, value, est, tol));
    }
    if let Some(factors) = report.factor_fillrads.as_ref().filter(|f| f.len() >= 2) {
        let value = factors.iter().copied().fold(f64::INFINITY, product_fillrad);
        out.push(Verdict::new("product", Relation::Equal, value, est, tol));
    }
    if let Some(known) = report.known {
        out.push(Verdict::new("known", Relation::Equal, known, est, tol));
        if let Some((value, _)) = lower {
            out.push(Verdict::new(
                "lower<=known",
                Relation::Analytic,
                value,
                known,
                0.0,
            ));
        }
        out.push(Verdict::new(
            "known<=katz",
            Relation::Analytic,
            known,
            katz,
            0.0,
        ));
    }
    out
}
