use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{Audit, Violation};
use crate::error::{Error, Result};
use crate::metric::{sup_distance_unchecked, AmbientFunction};
use crate::samplers::SubmersionSample;

pub const DEFAULT_T_GRID: usize = 16;

/// Slack for comparisons that hold exactly in real arithmetic but pass
/// through a few roundings, relative to the largest value involved.
const ROUNDING: f64 = 8.0 * f64::EPSILON;

/// `f_b(z) = d_B(b, π z) + ρ0`.
pub fn shifted_base_function(sub: &SubmersionSample, b: usize) -> Result<AmbientFunction> {
    let nb = sub.base.len();
    if b >= nb {
        return Err(Error::IndexOutOfRange { index: b, len: nb });
    }
    let row = sub.base.space.row(b);
    Ok(AmbientFunction {
        values: sub.proj.iter().map(|&c| row[c] + sub.rho0).collect(),
    })
}

/// The point at time `t` on the path from `dist_p` to `f_{π p}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylinderFunction {
    pub p: usize,
    pub b: usize,
    pub t: f64,
    pub values: AmbientFunction,
}

#[inline]
fn cylinder_value(dist: f64, fb: f64, t: f64) -> f64 {
    if dist < fb {
        (dist + t).min(fb)
    } else {
        (dist - t).max(fb)
    }
}

pub fn cylinder_function(sub: &SubmersionSample, p: usize, t: f64) -> Result<CylinderFunction> {
    let n = sub.total.len();
    if p >= n {
        return Err(Error::IndexOutOfRange { index: p, len: n });
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "cylinder parameter must be >= 0, got {t}"
        )));
    }
    let b = sub.proj[p];
    let fb = shifted_base_function(sub, b)?;
    let dist = sub.total.space.row(p);
    Ok(CylinderFunction {
        p,
        b,
        t,
        values: AmbientFunction {
            values: dist
                .iter()
                .zip(&fb.values)
                .map(|(&d, &f)| cylinder_value(d, f, t))
                .collect(),
        },
    })
}

/// `points` evenly spaced values from 0 to `rho0`, both ends included.
pub fn default_t_grid(rho0: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![rho0],
        _ => (0..points)
            .map(|i| {
                if i + 1 == points {
                    rho0
                } else {
                    rho0 * i as f64 / (points - 1) as f64
                }
            })
            .collect(),
    }
}

struct PointReport {
    violations: Vec<Violation>,
    max_residual: f64,
}

/// Runs every cylinder check for every total point `p` over the `t` grid:
/// displacement `‖d_p^t − d_p‖∞ ≤ t` (exact), arrival
/// `‖d_p^{ρ0} − f_b‖∞ ≤ ε` at grid values `t ≥ ρ0`, monotone approach to
/// `f_b`, 1-Lipschitz dependence on `t`, and agreement of the two branches
/// where `d_p = f_b`.
pub fn cylinder_audit(sub: &SubmersionSample, grid: &[f64]) -> Result<Audit> {
    if let Some(&t) = grid.iter().find(|t| !(**t >= 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "cylinder parameter must be >= 0, got {t}"
        )));
    }
    let mut grid = grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let eps = sub.epsilon;
    let n = sub.total.len();
    let bases: Vec<AmbientFunction> = (0..sub.base.len())
        .map(|b| shifted_base_function(sub, b))
        .collect::<Result<_>>()?;
    let scale = sub.total.space.diameter() + sub.base.space.diameter() + sub.rho0;
    let round = ROUNDING * (1.0 + scale);

    let reports: Vec<PointReport> = (0..n)
        .into_par_iter()
        .map(|p| {
            let fb = &bases[sub.proj[p]].values;
            let dist = sub.total.space.row(p);
            let mut violations = Vec::new();
            let mut max_residual = f64::NEG_INFINITY;
            let mut record =
                |check: &str, t: Option<f64>, z: Option<usize>, excess: f64, slack: f64| {
                    max_residual = max_residual.max(excess);
                    if excess > slack {
                        violations.push(Violation {
                            check: check.into(),
                            p,
                            t,
                            z,
                            residual: excess,
                        });
                    }
                };

            for (z, (&d, &f)) in dist.iter().zip(fb).enumerate() {
                if d == f {
                    let (lo, hi) = ((d + 1.0).min(f), (d - 1.0).max(f));
                    if lo != f || hi != f {
                        record("two_case", None, Some(z), (lo - hi).abs(), 0.0);
                    }
                }
            }

            let curves: Vec<Vec<f64>> = grid
                .iter()
                .map(|&t| {
                    dist.iter()
                        .zip(fb)
                        .map(|(&d, &f)| cylinder_value(d, f, t))
                        .collect()
                })
                .collect();
            let mut previous_gap = f64::INFINITY;
            for (i, (&t, values)) in grid.iter().zip(&curves).enumerate() {
                // interval form keeps the check exact under rounding of d ± t
                let mut worst: Option<(usize, f64)> = None;
                for (z, (&v, &d)) in values.iter().zip(dist).enumerate() {
                    let inside = v <= d + t && v >= d - t;
                    let excess = (v - d).abs() - t;
                    if !inside && worst.is_none_or(|(_, e)| excess > e) {
                        worst = Some((z, excess.max(f64::MIN_POSITIVE)));
                    }
                }
                match worst {
                    Some((z, excess)) => record("displacement", Some(t), Some(z), excess, 0.0),
                    None => record(
                        "displacement",
                        Some(t),
                        None,
                        sup_distance_unchecked(values, dist) - t,
                        f64::INFINITY,
                    ),
                }

                let (gap_z, gap) = values
                    .iter()
                    .zip(fb)
                    .map(|(v, f)| (v - f).abs())
                    .enumerate()
                    .fold(
                        (0, 0.0f64),
                        |acc, (z, g)| if g > acc.1 { (z, g) } else { acc },
                    );
                if t >= sub.rho0 {
                    record("arrival", Some(t), Some(gap_z), gap, eps);
                }
                if i > 0 {
                    record("monotone", Some(t), Some(gap_z), gap - previous_gap, round);
                }
                previous_gap = gap;

                for (j, &s) in grid.iter().enumerate().take(i) {
                    let moved = sup_distance_unchecked(values, &curves[j]);
                    record("lipschitz", Some(t), None, moved - (t - s), round);
                }
            }
            PointReport {
                violations,
                max_residual,
            }
        })
        .collect();

    let mut violations = Vec::new();
    let mut max_residual = f64::NEG_INFINITY;
    for r in reports {
        violations.extend(r.violations);
        max_residual = max_residual.max(r.max_residual);
    }
    if !max_residual.is_finite() {
        max_residual = 0.0;
    }
    Ok(Audit {
        construct: "cylinder".into(),
        parameters: json!({
            "points": n,
            "base_points": sub.base.len(),
            "rho0": sub.rho0,
            "t_grid": grid,
        }),
        violations,
        max_residual,
        epsilon_used: eps,
        summary: serde_json::Map::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::sup_distance;
    use crate::samplers::{quotient_metric, sample_circle, sample_flat_torus, BaseMetadata};
    use std::f64::consts::{PI, TAU};

    #[test]
    fn base_function_values() {
        let sub = sample_flat_torus(TAU, 1.2 * PI, 8, 6).unwrap();
        let f = shifted_base_function(&sub, 3).unwrap();
        for &z in &sub.fibers[3] {
            assert_eq!(f.values[z], sub.rho0);
        }
        let min = f.values.iter().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(min, sub.rho0);
        let g = shifted_base_function(&sub, 5).unwrap();
        let want = sub.base.space.get(3, 5);
        assert!((sup_distance(&f, &g).unwrap() - want).abs() <= sub.epsilon);
    }

    #[test]
    fn endpoints() {
        let sub = sample_flat_torus(TAU, 1.2 * PI, 8, 6).unwrap();
        for p in [0, 7, 20] {
            let c0 = cylinder_function(&sub, p, 0.0).unwrap();
            assert_eq!(c0.values.values, sub.total.space.row(p));
            let c1 = cylinder_function(&sub, p, sub.rho0).unwrap();
            let fb = shifted_base_function(&sub, sub.proj[p]).unwrap();
            assert!(sup_distance(&c1.values, &fb).unwrap() <= sub.epsilon);
            let mid = cylinder_function(&sub, p, 0.3).unwrap();
            for (&v, &d) in mid.values.values.iter().zip(sub.total.space.row(p)) {
                assert!(v <= d + 0.3 && v >= d - 0.3);
            }
        }
        assert!(cylinder_function(&sub, 0, -1.0).is_err());
    }

    #[test]
    fn grid_shape() {
        let g = default_t_grid(2.0, 5);
        assert_eq!(g, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(default_t_grid(0.3 * PI, 16).len(), 16);
        assert_eq!(*default_t_grid(0.3 * PI, 16).last().unwrap(), 0.3 * PI);
    }

    #[test]
    fn small_torus_audit_is_clean() {
        let sub = sample_flat_torus(TAU, 1.2 * PI, 12, 8).unwrap();
        let audit = cylinder_audit(&sub, &default_t_grid(sub.rho0, DEFAULT_T_GRID)).unwrap();
        assert!(
            audit.passed(),
            "{:?}",
            &audit.violations[..audit.violations.len().min(5)]
        );
    }

    #[test]
    fn identity_partition_is_trivial() {
        let c = sample_circle(TAU, 10).unwrap();
        let singletons: Vec<Vec<usize>> = (0..10).map(|i| vec![i]).collect();
        let sub = quotient_metric(&c, &singletons, BaseMetadata::default()).unwrap();
        assert_eq!(sub.rho0, 0.0);
        let audit = cylinder_audit(&sub, &default_t_grid(0.0, 4)).unwrap();
        assert!(audit.passed());
        let cf = cylinder_function(&sub, 4, 0.0).unwrap();
        assert_eq!(cf.values.values, c.space.row(4));
    }

    #[test]
    fn single_orbit_arrives_at_constant() {
        let c = sample_circle(TAU, 10).unwrap();
        let all = vec![(0..10).collect::<Vec<_>>()];
        let sub = quotient_metric(&c, &all, BaseMetadata::default()).unwrap();
        assert_eq!(sub.rho0, PI / 2.0);
        let cf = cylinder_function(&sub, 3, sub.rho0).unwrap();
        assert!(cf.values.values.iter().all(|&v| v == sub.rho0));
    }

    #[test]
    fn corrupted_projection_is_caught() {
        let mut sub = sample_flat_torus(TAU, 1.2 * PI, 8, 6).unwrap();
        // send one point to the wrong base point
        sub.proj[0] = 4;
        sub.epsilon = 1e-6;
        let audit = cylinder_audit(&sub, &default_t_grid(sub.rho0, 8)).unwrap();
        assert!(audit.violations.iter().any(|v| v.check == "arrival"));
    }
}
