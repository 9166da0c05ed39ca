use serde::{Deserialize, Serialize};

use super::filtration::{build_vr_filtration_with_budget, DEFAULT_SIMPLEX_BUDGET};
use super::reduce::reduce;
use super::Barcode;
use crate::bounds::best_known_upper_bound;
use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;
use crate::samplers::ManifoldSample;

/// Tag carried by every estimate: the filling radius is taken as half the
/// death diameter of the dominant class in the diameter-convention
/// Vietoris–Rips filtration.
pub const CONVENTION: &str = "half-death, diameter-VR";

/// Relative tolerance for the scaling check.
pub const SCALING_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    /// Filtration threshold; derived from the best known upper bound if unset.
    pub r_max: Option<f64>,
    /// Minimum ratio between the selected bar and the runner-up.
    pub min_gap: f64,
    pub simplex_budget: usize,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            r_max: None,
            min_gap: 2.0,
            simplex_budget: DEFAULT_SIMPLEX_BUDGET,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bar {
    pub birth: f64,
    pub death: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FillRadEstimate {
    pub k: usize,
    pub estimate: f64,
    pub bar: Bar,
    pub convention: String,
    /// Length ratio of the selected bar to the runner-up; `None` when the
    /// selected bar is the only one in its degree.
    pub confidence: Option<f64>,
    /// Half the spacing between the death scale and the next smaller
    /// pairwise distance: the resolution of `estimate` on this sample.
    pub half_gap: f64,
    pub threshold: f64,
}

/// `1.1 · 2 · u`, where `u` is the smallest known upper bound for the filling
/// radius (`extra_upper` included); `1.1 · diam` when no bound is positive.
pub fn default_threshold(sample: &ManifoldSample, extra_upper: Option<f64>) -> f64 {
    let mut upper = best_known_upper_bound(sample);
    if let Some(extra) = extra_upper {
        upper = upper.min(extra);
    }
    if upper > 0.0 && upper.is_finite() {
        return 1.1 * 2.0 * upper;
    }
    let diam = sample.diameter();
    if diam > 0.0 {
        1.1 * diam
    } else {
        1.0
    }
}

/// Filling radius in degree `k` (the fundamental class for `k = dim`, an
/// intermediate filling radius for `k < dim`).
pub fn estimate_fillrad(
    sample: &ManifoldSample,
    k: usize,
    config: &EstimatorConfig,
) -> Result<FillRadEstimate> {
    if k == 0 {
        return Err(Error::InvalidParameter(
            "filling radius needs homology degree k >= 1".into(),
        ));
    }
    let threshold = config
        .r_max
        .unwrap_or_else(|| default_threshold(sample, None));
    let filtration =
        build_vr_filtration_with_budget(&sample.space, k + 1, threshold, config.simplex_budget)?;
    let barcode = reduce(&filtration);
    select_dominant_bar(&barcode, k, config.min_gap, &sample.space)
}

/// Picks the longest degree-`k` bar of `barcode` and turns it into an
/// estimate. Classes alive at the threshold count with length
/// `threshold - birth`; if one of them wins, the death is not resolved.
pub fn select_dominant_bar(
    barcode: &Barcode,
    k: usize,
    min_gap: f64,
    space: &FiniteMetricSpace,
) -> Result<FillRadEstimate> {
    let threshold = barcode.threshold;
    // (length, birth, death, alive at threshold)
    let mut bars: Vec<(f64, f64, f64, bool)> = barcode
        .pairs_in(k)
        .map(|p| (p.length(), p.birth, p.death, false))
        .chain(
            barcode
                .essentials_in(k)
                .map(|e| (threshold - e.birth, e.birth, threshold, true)),
        )
        .collect();
    bars.sort_by(|a, b| {
        b.0.total_cmp(&a.0)
            .then(a.3.cmp(&b.3))
            .then(a.1.total_cmp(&b.1))
    });
    let Some(&(length, birth, death, alive)) = bars.first() else {
        return Err(Error::NoDominantBar {
            k,
            gap_ratio: None,
            min_gap,
        });
    };
    if alive || death >= threshold {
        return Err(Error::DeathAtThreshold { k, threshold });
    }
    let confidence = bars.get(1).map(|runner| length / runner.0);
    if let Some(ratio) = confidence {
        if ratio < min_gap {
            return Err(Error::NoDominantBar {
                k,
                gap_ratio: Some(ratio),
                min_gap,
            });
        }
    }
    let below = space
        .as_flat()
        .iter()
        .copied()
        .filter(|&v| v < death)
        .fold(0.0, f64::max);
    Ok(FillRadEstimate {
        k,
        estimate: death / 2.0,
        bar: Bar { birth, death },
        convention: CONVENTION.to_string(),
        confidence,
        half_gap: (death - below) / 2.0,
        threshold,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub c: f64,
    pub k: usize,
    pub base: FillRadEstimate,
    pub scaled: FillRadEstimate,
    pub relative_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Checks that scaling every length by `c` scales the estimate by `c`. The
/// threshold is scaled along with the sample.
pub fn scaling_check(
    sample: &ManifoldSample,
    c: f64,
    k: usize,
    config: &EstimatorConfig,
) -> Result<ScalingReport> {
    let threshold = config
        .r_max
        .unwrap_or_else(|| default_threshold(sample, None));
    let base = estimate_fillrad(
        sample,
        k,
        &EstimatorConfig {
            r_max: Some(threshold),
            ..config.clone()
        },
    )?;
    scaling_check_from(sample, &base, c, config)
}

/// [`scaling_check`] reusing an estimate already computed on `sample`; the
/// scaled run uses `c` times that estimate's threshold.
pub fn scaling_check_from(
    sample: &ManifoldSample,
    base: &FillRadEstimate,
    c: f64,
    config: &EstimatorConfig,
) -> Result<ScalingReport> {
    let scaled_sample = sample.scaled(c)?;
    let scaled = estimate_fillrad(
        &scaled_sample,
        base.k,
        &EstimatorConfig {
            r_max: Some(base.threshold * c),
            ..config.clone()
        },
    )?;
    let expected = c * base.estimate;
    let relative_error = (scaled.estimate - expected).abs() / expected;
    Ok(ScalingReport {
        c,
        k: base.k,
        base: base.clone(),
        scaled,
        relative_error,
        tolerance: SCALING_TOLERANCE,
        pass: relative_error <= SCALING_TOLERANCE,
    })
}
