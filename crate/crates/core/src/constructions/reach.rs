use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{Audit, Violation};
use crate::error::{Error, Result};
use crate::metric::{sup_distance_unchecked, AmbientFunction, KuratowskiFrame};

/// Absolute tolerance for the witness equalities, scaled by `1 + δ`.
pub const WITNESS_TOLERANCE: f64 = 1e-12;

/// The midpoint `f = ½(dist_p + dist_q)`: it sits at sup-distance `δ/2`
/// from both `p` and `q` and no closer to any other sample point, so `p`
/// has points with two nearest sample points at distance `δ/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReachWitness {
    pub p: usize,
    pub q: usize,
    pub delta: f64,
    pub half_delta: f64,
    pub f: AmbientFunction,
    /// `‖f − dist_p‖∞` and `‖f − dist_q‖∞`.
    pub to_p: f64,
    pub to_q: f64,
    /// Smallest `‖f − dist_r‖∞` over `r ∉ {p, q}`, if any.
    pub nearest_other: Option<(usize, f64)>,
}

pub fn reach_probe(frame: &KuratowskiFrame, p: usize, q: usize) -> Result<ReachWitness> {
    let n = frame.len();
    for i in [p, q] {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, len: n });
        }
    }
    if p == q {
        return Err(Error::InvalidParameter(
            "reach witness needs two distinct points".into(),
        ));
    }
    let (rp, rq) = (frame.row(p), frame.row(q));
    let delta = rp[q];
    let half_delta = 0.5 * delta;
    let values: Vec<f64> = rp.iter().zip(rq).map(|(a, b)| 0.5 * (a + b)).collect();
    let tol = WITNESS_TOLERANCE * (1.0 + delta);
    let to_p = sup_distance_unchecked(&values, rp);
    let to_q = sup_distance_unchecked(&values, rq);
    if (to_p - half_delta).abs() > tol || (to_q - half_delta).abs() > tol {
        return Err(Error::WitnessFailed(format!(
            "midpoint of {p} and {q} is at {to_p} and {to_q}, expected {half_delta}"
        )));
    }
    let mut nearest_other: Option<(usize, f64)> = None;
    for r in (0..n).filter(|&r| r != p && r != q) {
        let distance = sup_distance_unchecked(&values, frame.row(r));
        if distance < half_delta - tol {
            return Err(Error::StrictlyCloserPoint {
                r,
                distance,
                half_delta,
            });
        }
        if nearest_other.is_none_or(|(_, d)| distance < d) {
            nearest_other = Some((r, distance));
        }
    }
    Ok(ReachWitness {
        p,
        q,
        delta,
        half_delta,
        f: AmbientFunction { values },
        to_p,
        to_q,
        nearest_other,
    })
}

/// `f_δ = dist_p + δ`, whose unique nearest sample point is `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniqueProjection {
    pub p: usize,
    pub delta: f64,
    pub f: AmbientFunction,
    /// `‖f_δ − dist_q‖∞ − δ` minimized over `q ≠ p`: the nearest-neighbor
    /// distance of `p`.
    pub margin: Option<f64>,
}

pub fn unique_projection_witness(
    frame: &KuratowskiFrame,
    p: usize,
    delta: f64,
) -> Result<UniqueProjection> {
    let n = frame.len();
    if p >= n {
        return Err(Error::IndexOutOfRange { index: p, len: n });
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "projection witness needs delta > 0, got {delta}"
        )));
    }
    let rp = frame.row(p);
    let f = AmbientFunction {
        values: rp.iter().map(|v| v + delta).collect(),
    };
    let scale = 1.0 + delta + frame.space().diameter();
    let tol = WITNESS_TOLERANCE * scale;
    let own = sup_distance_unchecked(&f.values, rp);
    if (own - delta).abs() > tol {
        return Err(Error::WitnessFailed(format!(
            "shifted row {p} sits at {own} from its own row, expected {delta}"
        )));
    }
    let mut margin: Option<f64> = None;
    for q in (0..n).filter(|&q| q != p) {
        let d = sup_distance_unchecked(&f.values, frame.row(q));
        let want = delta + rp[q];
        if (d - want).abs() > tol || d <= delta {
            return Err(Error::WitnessFailed(format!(
                "row {q} sits at {d} from the shifted row {p}, expected {want} > {delta}"
            )));
        }
        margin = Some(margin.map_or(d - delta, |m| m.min(d - delta)));
    }
    Ok(UniqueProjection {
        p,
        delta,
        f,
        margin,
    })
}

/// Runs [`reach_probe`] on every pair; failures become violations.
pub fn reach_audit(frame: &KuratowskiFrame, pairs: &[(usize, usize)]) -> Audit {
    let mut violations = Vec::new();
    let mut max_residual = f64::NEG_INFINITY;
    let mut min_delta = f64::INFINITY;
    for &(p, q) in pairs {
        match reach_probe(frame, p, q) {
            Ok(w) => {
                min_delta = min_delta.min(w.delta);
                let excess = (w.to_p - w.half_delta)
                    .abs()
                    .max((w.to_q - w.half_delta).abs());
                let closer = w
                    .nearest_other
                    .map_or(f64::NEG_INFINITY, |(_, d)| w.half_delta - d);
                max_residual = max_residual.max(excess).max(closer);
            }
            Err(e) => violations.push(Violation {
                check: e.kind().into(),
                p,
                t: None,
                z: Some(q),
                residual: match e {
                    Error::StrictlyCloserPoint {
                        distance,
                        half_delta,
                        ..
                    } => half_delta - distance,
                    _ => f64::INFINITY,
                },
            }),
        }
    }
    let mut summary = serde_json::Map::new();
    if min_delta.is_finite() {
        summary.insert("min_delta".into(), json!(min_delta));
    }
    Audit {
        construct: "reach".into(),
        parameters: json!({ "pairs": pairs }),
        violations,
        max_residual: if max_residual.is_finite() {
            max_residual
        } else {
            0.0
        },
        epsilon_used: WITNESS_TOLERANCE,
        summary,
    }
}

/// Runs [`unique_projection_witness`] on every `(p, δ)`.
pub fn projection_audit(frame: &KuratowskiFrame, cases: &[(usize, f64)]) -> Audit {
    let mut violations = Vec::new();
    let mut min_margin = f64::INFINITY;
    for &(p, delta) in cases {
        match unique_projection_witness(frame, p, delta) {
            Ok(w) => {
                if let Some(m) = w.margin {
                    min_margin = min_margin.min(m);
                }
            }
            Err(e) => violations.push(Violation {
                check: e.kind().into(),
                p,
                t: Some(delta),
                z: None,
                residual: f64::INFINITY,
            }),
        }
    }
    let mut summary = serde_json::Map::new();
    if min_margin.is_finite() {
        summary.insert("min_margin".into(), json!(min_margin));
    }
    Audit {
        construct: "project".into(),
        parameters: json!({ "cases": cases }),
        violations,
        max_residual: if min_margin.is_finite() {
            -min_margin
        } else {
            0.0
        },
        epsilon_used: WITNESS_TOLERANCE,
        summary,
    }
}
