use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{Audit, Violation};
use crate::error::{Error, Result};
use crate::metric::{vicinity_set, KuratowskiFrame};

/// Discrete center of mass of the vicinity set of `f`: the sample point
/// minimizing the mean squared distance to the members. Every sample point
/// is a candidate; ties go to the smallest index.
pub fn frechet_retract(
    frame: &KuratowskiFrame,
    f: impl AsRef<[f64]>,
    radius: f64,
) -> Result<usize> {
    let set = vicinity_set(frame, f, radius)?;
    if set.is_empty() {
        return Err(Error::EmptyVicinity { radius });
    }
    let space = frame.space();
    let energies: Vec<f64> = (0..space.len())
        .into_par_iter()
        .map(|q| {
            let row = space.row(q);
            set.members.iter().map(|&a| row[a] * row[a]).sum()
        })
        .collect();
    let mut best = 0;
    for (q, &e) in energies.iter().enumerate() {
        if e < energies[best] {
            best = q;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetractionConfig {
    /// Number of random `(f, g)` pairs in the continuity probe.
    pub trials: usize,
    /// Perturbation size, as a fraction of the radius.
    pub eta_fraction: f64,
    pub seed: u64,
}

impl Default for RetractionConfig {
    fn default() -> Self {
        RetractionConfig {
            trials: 50,
            eta_fraction: 0.125,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuityProbe {
    pub eta: f64,
    pub trials: usize,
    /// Largest `d(Φ f, Φ g)` over the trials.
    pub max_displacement: f64,
    pub mean_displacement: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetractionAudit {
    pub radius: f64,
    pub points: Vec<usize>,
    /// `(p, Φ(dist_p))` for every point not fixed.
    pub moved: Vec<(usize, usize)>,
    pub fixed_point_fraction: f64,
    pub continuity: ContinuityProbe,
}

impl RetractionAudit {
    pub fn into_audit(self) -> Audit {
        let space_violations: Vec<Violation> = self
            .moved
            .iter()
            .map(|&(p, q)| Violation {
                check: "fixed_point".into(),
                p,
                t: None,
                z: Some(q),
                residual: 1.0,
            })
            .collect();
        let mut summary = serde_json::Map::new();
        summary.insert(
            "fixed_point_fraction".into(),
            json!(self.fixed_point_fraction),
        );
        summary.insert("continuity".into(), json!(self.continuity));
        Audit {
            construct: "retraction".into(),
            parameters: json!({ "radius": self.radius, "points": self.points.len() }),
            max_residual: if space_violations.is_empty() {
                0.0
            } else {
                1.0
            },
            violations: space_violations,
            epsilon_used: 0.0,
            summary,
        }
    }
}

/// Retracts `dist_p` for every `p` in `points` and records the points that
/// do not come back to themselves, then probes continuity: random `f` near
/// some `dist_p` and `g` within `eta` of `f`, comparing their retractions.
pub fn retraction_audit(
    frame: &KuratowskiFrame,
    radius: f64,
    points: &[usize],
    config: &RetractionConfig,
) -> Result<RetractionAudit> {
    let n = frame.len();
    if let Some(&bad) = points.iter().find(|&&p| p >= n) {
        return Err(Error::IndexOutOfRange { index: bad, len: n });
    }
    let mut moved = Vec::new();
    for &p in points {
        let q = frechet_retract(frame, frame.row(p), radius)?;
        if q != p {
            moved.push((p, q));
        }
    }
    let fixed_point_fraction = if points.is_empty() {
        1.0
    } else {
        (points.len() - moved.len()) as f64 / points.len() as f64
    };

    let eta = config.eta_fraction * radius;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (mut max_d, mut sum_d) = (0.0f64, 0.0);
    for _ in 0..config.trials {
        if n == 0 {
            break;
        }
        let p = rng.gen_range(0..n);
        // f within radius/2 of dist_p, g within eta of f, both keep p inside
        let f: Vec<f64> = frame
            .row(p)
            .iter()
            .map(|v| v + rng.gen_range(0.0..=0.5 * radius))
            .collect();
        let g: Vec<f64> = f.iter().map(|v| v + rng.gen_range(-eta..=eta)).collect();
        let a = frechet_retract(frame, &f, radius)?;
        let b = frechet_retract(frame, &g, radius)?;
        let d = frame.space().get(a, b);
        max_d = max_d.max(d);
        sum_d += d;
    }
    Ok(RetractionAudit {
        radius,
        points: points.to_vec(),
        moved,
        fixed_point_fraction,
        continuity: ContinuityProbe {
            eta,
            trials: config.trials,
            max_displacement: max_d,
            mean_displacement: if config.trials > 0 {
                sum_d / config.trials as f64
            } else {
                0.0
            },
        },
    })
}
