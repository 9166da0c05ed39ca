//! End-to-end scenarios: sample, estimate, check every bound, and run the
//! constructions that apply. Each scenario is pure given its config.

use rand::seq::index::sample as choose_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_4, PI, TAU};

use crate::bounds::{
    check_bounds, lipschitz_comparison, BoundReport, BoundTarget, LipschitzReport,
};
use crate::constructions::{
    cylinder_audit, default_t_grid, projection_audit, reach_audit, retraction_audit, Audit,
    RetractionConfig, DEFAULT_T_GRID,
};
use crate::error::{Error, Result};
use crate::metric::{kuratowski_embed, KuratowskiFrame};
use crate::persistence::{
    estimate_fillrad, scaling_check_from, EstimatorConfig, FillRadEstimate, ScalingReport,
};
use crate::samplers::{
    sample_circle, sample_flat_torus, sample_rp2, sample_sphere, ManifoldSample, SubmersionSample,
};

pub const SCENARIOS: [&str; 5] = ["circle", "sphere2", "torus", "rp2", "quotient"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub estimator: EstimatorConfig,
    /// Points whose rows are retracted.
    pub retract_points: usize,
    /// Pairs for the reach witnesses and cases for the projection witness.
    pub probe_cases: usize,
    pub t_grid: usize,
    /// Factor for the scaling and Lipschitz checks.
    pub scale: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            estimator: EstimatorConfig::default(),
            retract_points: 50,
            probe_cases: 20,
            t_grid: DEFAULT_T_GRID,
            scale: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, pass: bool, detail: String) -> Self {
        Check {
            name: name.into(),
            pass,
            detail,
        }
    }

    /// `|value - target| <= rel · |target|`.
    fn relative(name: &str, value: f64, target: f64, rel: f64) -> Self {
        let err = (value - target).abs() / target.abs();
        Check::new(
            name,
            err <= rel,
            format!("{value} vs {target}: relative error {err:.4} (allowed {rel})"),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioError {
    pub kind: String,
    pub message: String,
    pub resource_limit: bool,
}

impl From<&Error> for ScenarioError {
    fn from(e: &Error) -> Self {
        ScenarioError {
            kind: e.kind().into(),
            message: e.to_string(),
            resource_limit: e.is_resource_limit(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ScenarioReport {
    pub scenario: String,
    pub label: String,
    pub estimate: Option<FillRadEstimate>,
    pub bounds: Option<BoundReport>,
    pub scaling: Option<ScalingReport>,
    pub lipschitz: Option<LipschitzReport>,
    pub audits: Vec<Audit>,
    pub checks: Vec<Check>,
    pub error: Option<ScenarioError>,
    pub passed: bool,
}

impl ScenarioReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn audit(&self, construct: &str) -> Option<&Audit> {
        self.audits.iter().find(|a| a.construct == construct)
    }

    fn finish(mut self) -> Self {
        self.passed = self.error.is_none() && self.checks.iter().all(|c| c.pass);
        self
    }
}

/// Runs one named scenario. Estimator and construction errors end up in
/// the report; only an unknown name is an error.
pub fn run_scenario(name: &str, config: &SuiteConfig) -> Result<ScenarioReport> {
    let mut report = ScenarioReport {
        scenario: name.to_string(),
        ..Default::default()
    };
    let outcome = match name {
        "circle" => circle(config, &mut report),
        "sphere2" => sphere2(config, &mut report),
        "torus" => torus(config, &mut report),
        "rp2" => rp2(config, &mut report),
        "quotient" => quotient(config, &mut report),
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown scenario {other:?}; expected one of {SCENARIOS:?}"
            )))
        }
    };
    if let Err(e) = outcome {
        report.error = Some(ScenarioError::from(&e));
    }
    Ok(report.finish())
}

pub fn run_suite(config: &SuiteConfig) -> Vec<ScenarioReport> {
    SCENARIOS
        .iter()
        .map(|name| run_scenario(name, config).expect("built-in scenario"))
        .collect()
}

fn estimate_and_bound<'a>(
    sample: &ManifoldSample,
    target: impl Into<BoundTarget<'a>>,
    k: usize,
    config: &SuiteConfig,
    report: &mut ScenarioReport,
) -> Result<FillRadEstimate> {
    report.label = sample.label.clone();
    let est = estimate_fillrad(sample, k, &config.estimator)?;
    report.estimate = Some(est.clone());
    let bounds = check_bounds(target, &est);
    report.checks.push(Check::new(
        "bounds",
        bounds.passed(),
        format!(
            "{} verdicts, failing: {:?}",
            bounds.verdicts.len(),
            bounds
                .failures()
                .map(|v| v.bound.clone())
                .collect::<Vec<_>>()
        ),
    ));
    report.bounds = Some(bounds);
    Ok(est)
}

fn scaling(
    sample: &ManifoldSample,
    est: &FillRadEstimate,
    config: &SuiteConfig,
    report: &mut ScenarioReport,
) -> Result<()> {
    let s = scaling_check_from(sample, est, config.scale, &config.estimator)?;
    report.checks.push(Check::new(
        "scaling",
        s.pass,
        format!(
            "c = {}: {} -> {} (relative error {:e})",
            s.c, s.base.estimate, s.scaled.estimate, s.relative_error
        ),
    ));
    report.scaling = Some(s);
    Ok(())
}

fn retraction(
    frame: &KuratowskiFrame,
    config: &SuiteConfig,
    report: &mut ScenarioReport,
) -> Result<()> {
    let n = frame.len();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut points = choose_indices(&mut rng, n, config.retract_points.min(n)).into_vec();
    points.sort_unstable();
    let radius = 0.9 * FRAC_PI_4;
    let audit = retraction_audit(
        frame,
        radius,
        &points,
        &RetractionConfig {
            seed: config.seed,
            ..Default::default()
        },
    )?;
    report.checks.push(Check::new(
        "retraction",
        audit.fixed_point_fraction == 1.0,
        format!(
            "R = {radius}: fixed-point fraction {} over {} points",
            audit.fixed_point_fraction,
            points.len()
        ),
    ));
    report.audits.push(audit.into_audit());
    Ok(())
}

/// Reach pairs: random `p` with its `j`-th nearest neighbor, `j` cycling
/// from 1 so the nearest-neighbor scale is always included.
fn reach_pairs(frame: &KuratowskiFrame, count: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let n = frame.len();
    (0..count)
        .map(|i| {
            let p = rng.gen_range(0..n);
            let mut order: Vec<usize> = (0..n).filter(|&q| q != p).collect();
            let row = frame.row(p);
            order.sort_by(|&a, &b| row[a].total_cmp(&row[b]).then(a.cmp(&b)));
            (p, order[(i % 10).min(order.len() - 1)])
        })
        .collect()
}

/// Seeded reach pairs for a probe outside the suite.
pub fn seeded_reach_pairs(frame: &KuratowskiFrame, count: usize, seed: u64) -> Vec<(usize, usize)> {
    if frame.len() < 2 {
        return Vec::new();
    }
    reach_pairs(frame, count, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Seeded `(p, delta)` cases with `delta` in `(0, 1]`.
pub fn seeded_projection_cases(
    frame: &KuratowskiFrame,
    count: usize,
    seed: u64,
) -> Vec<(usize, f64)> {
    if frame.is_empty() {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (rng.gen_range(0..frame.len()), rng.gen_range(1e-6..=1.0)))
        .collect()
}

fn witnesses(frame: &KuratowskiFrame, config: &SuiteConfig, report: &mut ScenarioReport) {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed);
    let pairs = reach_pairs(frame, config.probe_cases, &mut rng);
    let reach = reach_audit(frame, &pairs);
    let mesh = frame.space().mesh();
    let min_delta = pairs
        .iter()
        .map(|&(p, q)| frame.space().get(p, q))
        .fold(f64::INFINITY, f64::min);
    report.checks.push(Check::new(
        "reach",
        reach.passed() && min_delta <= mesh,
        format!(
            "{} pairs, {} violations, smallest delta {min_delta} (mesh {mesh})",
            pairs.len(),
            reach.violations.len()
        ),
    ));
    report.audits.push(reach);

    let cases: Vec<(usize, f64)> = (0..config.probe_cases)
        .map(|_| (rng.gen_range(0..frame.len()), rng.gen_range(1e-6..=1.0)))
        .collect();
    let project = projection_audit(frame, &cases);
    report.checks.push(Check::new(
        "projection",
        project.passed(),
        format!(
            "{} cases, {} violations",
            cases.len(),
            project.violations.len()
        ),
    ));
    report.audits.push(project);
}

fn cylinder(
    sub: &SubmersionSample,
    config: &SuiteConfig,
    report: &mut ScenarioReport,
) -> Result<()> {
    let audit = cylinder_audit(sub, &default_t_grid(sub.rho0, config.t_grid))?;
    report.checks.push(Check::new(
        "cylinder",
        audit.passed(),
        format!(
            "{} points x {} t values, {} violations, max residual {:e}",
            sub.total.len(),
            config.t_grid,
            audit.violations.len(),
            audit.max_residual
        ),
    ));
    report.audits.push(audit);
    Ok(())
}

fn circle(config: &SuiteConfig, report: &mut ScenarioReport) -> Result<()> {
    let sample = sample_circle(TAU, 128)?;
    let est = estimate_and_bound(&sample, &sample, 1, config, report)?;
    let exact = PI / 3.0;
    report.checks.push(Check::new(
        "exact_value",
        (est.estimate - exact).abs() <= 0.05,
        format!("{} vs {exact} (allowed 0.05)", est.estimate),
    ));
    report.checks.push(Check::relative(
        "katz_tight",
        est.estimate,
        sample.diameter() / 3.0,
        0.05,
    ));
    let frame = kuratowski_embed(&sample.space);
    retraction(&frame, config, report)?;
    witnesses(&frame, config, report);
    scaling(&sample, &est, config, report)?;

    let scaled = sample.scaled(config.scale)?;
    let identity: Vec<usize> = (0..sample.len()).collect();
    let lip = lipschitz_comparison(&sample, &scaled, &identity, 1, true, &config.estimator)?;
    report.checks.push(Check::new(
        "lipschitz",
        lip.pass && lip.tight && lip.c == config.scale,
        format!(
            "C = {}, {} >= {} (tight: {})",
            lip.c, lip.estimate_x.estimate, lip.rhs, lip.tight
        ),
    ));
    report.lipschitz = Some(lip);
    Ok(())
}

fn sphere2(config: &SuiteConfig, report: &mut ScenarioReport) -> Result<()> {
    let sample = sample_sphere(2, 150, config.seed)?;
    let est = estimate_and_bound(&sample, &sample, 2, config, report)?;
    let exact = sample
        .fillrad_true
        .expect("sphere carries its filling radius");
    report
        .checks
        .push(Check::relative("exact_value", est.estimate, exact, 0.10));
    let frame = kuratowski_embed(&sample.space);
    retraction(&frame, config, report)?;
    witnesses(&frame, config, report);
    scaling(&sample, &est, config, report)
}

fn torus(config: &SuiteConfig, report: &mut ScenarioReport) -> Result<()> {
    let sub = sample_flat_torus(TAU, 1.2 * PI, 32, 20)?;
    let est = estimate_and_bound(&sub.total, &sub, 2, config, report)?;
    report
        .checks
        .push(Check::relative("exact_value", est.estimate, 0.2 * PI, 0.10));
    cylinder(&sub, config, report)?;
    scaling(&sub.total, &est, config, report)
}

fn rp2(config: &SuiteConfig, report: &mut ScenarioReport) -> Result<()> {
    let sub = sample_rp2(100, config.seed)?;
    let est = estimate_and_bound(&sub.base, &sub.base, 2, config, report)?;
    scaling(&sub.base, &est, config, report)
}

/// The antipodal sphere over its orbit space: the estimate is taken on the
/// sphere and checked against the fiber bound of the quotient map.
fn quotient(config: &SuiteConfig, report: &mut ScenarioReport) -> Result<()> {
    let sub = sample_rp2(75, config.seed)?;
    let est = estimate_and_bound(&sub.total, &sub, 2, config, report)?;
    cylinder(&sub, config, report)?;
    scaling(&sub.total, &est, config, report)
}
