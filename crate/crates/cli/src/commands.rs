use std::path::Path;

use fillrad_core::bounds::{check_bounds_meta_with, WarpedInputs};
use fillrad_core::constructions::{
    cylinder_audit, default_t_grid, projection_audit, reach_audit, retraction_audit,
    RetractionConfig,
};
use fillrad_core::metric::to_csv_string;
use fillrad_core::persistence::{
    build_vr_filtration_with_budget, default_threshold, estimate_fillrad, reduce, EstimatorConfig,
};
use fillrad_core::samplers::{
    sample_berger, sample_circle, sample_flat_torus, sample_rp2, sample_sphere,
    submersion_from_fibers, BergerParams,
};
use fillrad_core::suite::{
    run_scenario, seeded_projection_cases, seeded_reach_pairs, SuiteConfig, SCENARIOS,
};
use fillrad_core::{kuratowski_embed, ManifoldSample, SampleMeta};
use serde::Serialize;
use serde_json::json;

use crate::args::*;
use crate::io::{emit, read_json, read_meta, read_space, to_json, write_atomic};
use crate::CliError;

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Sample(a) => sample(a),
        Command::Persist(a) => persist(a),
        Command::Fillrad(a) => fillrad(a),
        Command::Bounds(a) => bounds(a),
        Command::Probe(Probe::Reach(a)) => reach(a),
        Command::Probe(Probe::Project(a)) => project(a),
        Command::Probe(Probe::Retract(a)) => retract(a),
        Command::Probe(Probe::Cylinder(a)) => cylinder(a),
        Command::Suite(a) => suite(a),
    }
}

/// One compact JSON line on stdout with the command and its resolved settings.
fn echo(command: &str, config: impl Serialize) {
    println!(
        "{}",
        json!({
            "command": command,
            "config": config,
            "threads": rayon::current_num_threads(),
        })
    );
}

fn need_positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "--{name} must be positive and finite, got {v}"
        )))
    }
}

fn sample(a: SampleArgs) -> Result<(), CliError> {
    let meta_path = a
        .meta
        .clone()
        .unwrap_or_else(|| a.out.with_extension("json"));
    if meta_path == a.out {
        return Err(CliError::Usage(
            "sidecar path equals --out; pass --meta or use a .csv output".into(),
        ));
    }
    let ctx = |e| CliError::core("sample", e);
    let (space, meta): (_, SampleMeta) = match a.manifold {
        Manifold::Circle => {
            need_positive("circumference", a.circumference)?;
            let s = sample_circle(a.circumference, a.n.unwrap_or(128)).map_err(ctx)?;
            (s.space.clone(), s.meta())
        }
        Manifold::Sphere2 | Manifold::Sphere3 => {
            let (dim, n) = if a.manifold == Manifold::Sphere2 {
                (2, a.n.unwrap_or(150))
            } else {
                (3, a.n.unwrap_or(200))
            };
            let s = sample_sphere(dim, n, a.seed).map_err(ctx)?;
            (s.space.clone(), s.meta())
        }
        Manifold::Torus => {
            if a.n.is_some() {
                return Err(CliError::Usage(
                    "torus takes --n-big/--n-small, not --n".into(),
                ));
            }
            need_positive("big-l", a.big_l)?;
            need_positive("small-l", a.small_l)?;
            let s = sample_flat_torus(a.big_l, a.small_l, a.n_big, a.n_small).map_err(ctx)?;
            (s.total.space.clone(), s.meta())
        }
        Manifold::Rp2 => {
            let s = sample_rp2(a.n.unwrap_or(100), a.seed).map_err(ctx)?;
            (s.base.space.clone(), s.base.meta())
        }
        Manifold::Quotient => {
            let n = a.n.unwrap_or(150);
            if !n.is_multiple_of(2) {
                return Err(CliError::Usage(format!(
                    "quotient samples antipodal pairs; --n must be even, got {n}"
                )));
            }
            let s = sample_rp2(n / 2, a.seed).map_err(ctx)?;
            (s.total.space.clone(), s.meta())
        }
        Manifold::Graph => {
            need_positive("a", a.a)?;
            let s = sample_berger(&BergerParams {
                a: a.a,
                base_points: a.n.unwrap_or(40),
                fiber_points: a.fiber_points,
                neighbors: a.neighbors,
            })
            .map_err(ctx)?;
            (s.total.space.clone(), s.meta())
        }
    };
    echo(
        "sample",
        json!({ "args": a, "meta_out": meta_path, "points": space.len() }),
    );
    write_atomic(&a.out, &to_csv_string(&space))?;
    write_atomic(&meta_path, &to_json(&meta))?;
    println!(
        "{}: {} points, diameter {}, mesh {}",
        meta.label, meta.n, meta.sampled_diameter, meta.epsilon
    );
    Ok(())
}

fn persist(a: PersistArgs) -> Result<(), CliError> {
    let space = read_space(&a.input)?;
    let threshold = match a.threshold {
        Some(t) => t,
        None if space.diameter() > 0.0 => space.diameter(),
        None => 1.0,
    };
    echo(
        "persist",
        json!({ "args": a, "threshold": threshold, "points": space.len() }),
    );
    let filtration = build_vr_filtration_with_budget(&space, a.maxdim, threshold, a.budget)
        .map_err(|e| CliError::core("persist", e))?;
    let barcode = reduce(&filtration);
    for k in 0..a.maxdim {
        let finite = barcode.pairs_in(k).count();
        let essential = barcode.essentials_in(k).count();
        eprintln!("H{k}: {finite} finite bars, {essential} essential");
    }
    emit(a.out.as_deref(), &barcode)
}

fn load_sample(input: &Path, meta: Option<&Path>) -> Result<ManifoldSample, CliError> {
    let space = read_space(input)?;
    match meta {
        Some(path) => {
            let meta = read_meta(path)?;
            ManifoldSample::from_meta(space, &meta)
                .map_err(|e| CliError::core(path.display().to_string(), e))
        }
        None => {
            let label = input.display().to_string();
            Ok(ManifoldSample::bare(space, 0, label))
        }
    }
}

fn fillrad(a: FillradArgs) -> Result<(), CliError> {
    let sample = load_sample(&a.input, a.meta.as_deref())?;
    let config = EstimatorConfig {
        r_max: Some(
            a.estimator
                .threshold
                .unwrap_or_else(|| default_threshold(&sample, None)),
        ),
        min_gap: a.estimator.min_gap,
        simplex_budget: a.estimator.budget,
    };
    echo("fillrad", json!({ "args": a, "estimator": config }));
    let est = estimate_fillrad(&sample, a.dim, &config)
        .map_err(|e| CliError::core(format!("fillrad in degree {}", a.dim), e))?;
    eprintln!(
        "fillrad_{} = {} (bar [{}, {}), half gap {}, confidence {:?})",
        est.k, est.estimate, est.bar.birth, est.bar.death, est.half_gap, est.confidence
    );
    emit(a.out.as_deref(), &est)
}

fn bounds(a: BoundsArgs) -> Result<(), CliError> {
    let meta = read_meta(&a.meta)?;
    let est = read_json(&a.est)?;
    let warped = match (a.base_fillrad, a.warp, a.fiber_diam) {
        (Some(fillrad_base), Some(max_warp), Some(diam_fiber)) => Some(WarpedInputs {
            fillrad_base,
            max_warp,
            diam_fiber,
        }),
        _ => None,
    };
    echo("bounds", json!({ "args": a }));
    let report = check_bounds_meta_with(&meta, &est, warped);
    println!("{}", report.to_table());
    emit(a.out.as_deref(), &report)?;
    if report.passed() {
        Ok(())
    } else {
        let failed: Vec<&str> = report.failures().map(|v| v.bound.as_str()).collect();
        Err(CliError::Verdict(format!(
            "failed bounds: {}",
            failed.join(", ")
        )))
    }
}

fn audit_result(audit: &fillrad_core::constructions::Audit) -> Result<(), CliError> {
    eprintln!(
        "{}: {} violations, max residual {:e}",
        audit.construct,
        audit.violations.len(),
        audit.max_residual
    );
    if audit.passed() {
        Ok(())
    } else {
        Err(CliError::Verdict(format!(
            "{} audit found {} violations",
            audit.construct,
            audit.violations.len()
        )))
    }
}

fn reach(a: ReachArgs) -> Result<(), CliError> {
    let frame = kuratowski_embed(&read_space(&a.input)?);
    let pairs = match (a.p, a.q) {
        (Some(p), Some(q)) => {
            for i in [p, q] {
                if i >= frame.len() {
                    return Err(CliError::Usage(format!(
                        "index {i} out of range for {} points",
                        frame.len()
                    )));
                }
            }
            if p == q {
                return Err(CliError::Usage("--p and --q must differ".into()));
            }
            vec![(p, q)]
        }
        _ => seeded_reach_pairs(&frame, a.pairs, a.seed),
    };
    echo("probe reach", json!({ "args": a, "pairs": pairs }));
    let audit = reach_audit(&frame, &pairs);
    emit(a.out.as_deref(), &audit)?;
    audit_result(&audit)
}

fn project(a: ProjectArgs) -> Result<(), CliError> {
    let frame = kuratowski_embed(&read_space(&a.input)?);
    let cases = match (a.p, a.delta) {
        (Some(p), Some(delta)) => {
            if p >= frame.len() {
                return Err(CliError::Usage(format!(
                    "index {p} out of range for {} points",
                    frame.len()
                )));
            }
            need_positive("delta", delta)?;
            vec![(p, delta)]
        }
        _ => seeded_projection_cases(&frame, a.cases, a.seed),
    };
    echo("probe project", json!({ "args": a, "cases": cases }));
    let audit = projection_audit(&frame, &cases);
    emit(a.out.as_deref(), &audit)?;
    audit_result(&audit)
}

fn retract(a: RetractArgs) -> Result<(), CliError> {
    need_positive("radius", a.radius)?;
    let frame = kuratowski_embed(&read_space(&a.input)?);
    let n = frame.len();
    let count = a.points.min(n);
    // evenly spaced indices, deterministic without a seed
    let points: Vec<usize> = (0..count).map(|i| i * n / count).collect();
    echo("probe retract", json!({ "args": a, "points": points }));
    let config = RetractionConfig {
        trials: a.trials,
        seed: a.seed,
        ..Default::default()
    };
    let audit = retraction_audit(&frame, a.radius, &points, &config)
        .map_err(|e| CliError::core("probe retract", e))?
        .into_audit();
    emit(a.out.as_deref(), &audit)?;
    audit_result(&audit)
}

fn cylinder(a: CylinderArgs) -> Result<(), CliError> {
    let total = load_sample(&a.input, Some(&a.meta))?;
    let meta = read_meta(&a.meta)?;
    let (Some(fibers), Some(base_dim)) = (meta.fibers.as_ref(), meta.base_dim) else {
        return Err(CliError::Usage(format!(
            "{} lists no fibers; the cylinder probe needs a submersion sample",
            a.meta.display()
        )));
    };
    if a.grid < 2 {
        return Err(CliError::Usage(format!(
            "--grid must be at least 2, got {}",
            a.grid
        )));
    }
    let sub = submersion_from_fibers(&total, fibers, base_dim)
        .map_err(|e| CliError::core("probe cylinder", e))?;
    let grid = default_t_grid(sub.rho0, a.grid);
    echo(
        "probe cylinder",
        json!({ "args": a, "rho0": sub.rho0, "t_grid": grid }),
    );
    let audit = cylinder_audit(&sub, &grid).map_err(|e| CliError::core("probe cylinder", e))?;
    emit(a.out.as_deref(), &audit)?;
    audit_result(&audit)
}

fn suite(a: SuiteArgs) -> Result<(), CliError> {
    let names: Vec<String> = if a.only.is_empty() {
        SCENARIOS.iter().map(|s| s.to_string()).collect()
    } else {
        a.only.clone()
    };
    if let Some(bad) = names.iter().find(|n| !SCENARIOS.contains(&n.as_str())) {
        return Err(CliError::Usage(format!(
            "unknown scenario {bad:?}; expected one of {}",
            SCENARIOS.join(", ")
        )));
    }
    let config = SuiteConfig {
        seed: a.seed,
        estimator: EstimatorConfig {
            simplex_budget: a.budget,
            ..Default::default()
        },
        ..Default::default()
    };
    echo("suite", json!({ "args": a, "suite": config }));
    let mut summary = Vec::new();
    let (mut failed, mut limited) = (false, false);
    for name in &names {
        let report = run_scenario(name, &config).map_err(|e| CliError::core("suite", e))?;
        write_atomic(&a.out_dir.join(format!("{name}.json")), &to_json(&report))?;
        let status = if report.passed { "PASS" } else { "FAIL" };
        let estimate = report.estimate.as_ref().map(|e| e.estimate);
        println!("{name}: {status} (estimate {estimate:?})");
        for c in report.checks.iter().filter(|c| !c.pass) {
            println!("  {} failed: {}", c.name, c.detail);
        }
        if let Some(err) = &report.error {
            println!("  error {}: {}", err.kind, err.message);
            limited |= err.resource_limit;
        }
        failed |= !report.passed;
        summary.push(json!({ "scenario": name, "passed": report.passed, "estimate": estimate }));
    }
    write_atomic(&a.out_dir.join("summary.json"), &to_json(&summary))?;
    if limited {
        Err(CliError::core(
            "suite",
            fillrad_core::Error::SimplexBudgetExceeded { budget: a.budget },
        ))
    } else if failed {
        Err(CliError::Verdict("one or more scenarios failed".into()))
    } else {
        Ok(())
    }
}
