#![allow(clippy::needless_range_loop)]
use std::collections::HashSet;
use std::f64::consts::{PI, TAU};

use proptest::prelude::*;

use fillrad_core::bounds::{check_bounds, dilation, katz_bound, lower_bound, recheck, BoundReport};
use fillrad_core::constructions::{
    cylinder_function, frechet_retract, reach_probe, shifted_base_function,
};
use fillrad_core::metric::{
    kuratowski_embed, scale_metric, sup_distance, validate_metric, vicinity_set, FiniteMetricSpace,
};
use fillrad_core::persistence::{
    build_vr_filtration, reduce, reduce_naive, Bar, Barcode, FillRadEstimate, CONVENTION,
};
use fillrad_core::samplers::{
    sample_circle, sample_flat_torus, sample_rp2, sample_sphere, sample_sphere_antipodal,
};

/// Euclidean distances of random points in the plane or in 3-space.
fn euclidean_space() -> impl Strategy<Value = FiniteMetricSpace> {
    (2usize..=9, 2usize..=3).prop_flat_map(|(n, dim)| {
        prop::collection::vec(prop::collection::vec(-1.0f64..1.0, dim), n).prop_map(|pts| {
            let rows: Vec<Vec<f64>> = pts
                .iter()
                .map(|a| {
                    pts.iter()
                        .map(|b| {
                            a.iter()
                                .zip(b)
                                .map(|(x, y)| (x - y).powi(2))
                                .sum::<f64>()
                                .sqrt()
                        })
                        .collect()
                })
                .collect();
            validate_metric(&rows).unwrap()
        })
    })
}

/// Distances drawn from a small set of values in [1, 2]: a metric with many
/// ties.
fn tied_space() -> impl Strategy<Value = FiniteMetricSpace> {
    (2usize..=8).prop_flat_map(|n| {
        prop::collection::vec(
            prop::sample::select(vec![1.0, 1.25, 1.5, 2.0]),
            n * (n - 1) / 2,
        )
        .prop_map(move |vals| {
            let mut rows = vec![vec![0.0; n]; n];
            let mut it = vals.into_iter();
            for i in 0..n {
                for j in i + 1..n {
                    let v = it.next().unwrap();
                    rows[i][j] = v;
                    rows[j][i] = v;
                }
            }
            validate_metric(&rows).unwrap()
        })
    })
}

fn any_space() -> impl Strategy<Value = FiniteMetricSpace> {
    prop_oneof![euclidean_space(), tied_space()]
}

fn bits(b: &Barcode) -> Vec<(usize, u64, u64)> {
    b.pairs
        .iter()
        .map(|p| (p.dim, p.birth.to_bits(), p.death.to_bits()))
        .chain(
            b.essentials
                .iter()
                .map(|e| (e.dim, e.birth.to_bits(), u64::MAX)),
        )
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kuratowski_rows_are_isometric(space in any_space()) {
        let frame = kuratowski_embed(&space);
        for i in 0..space.len() {
            for j in 0..space.len() {
                prop_assert_eq!(sup_distance(frame.row(i), frame.row(j)).unwrap(), space.get(i, j));
            }
        }
    }

    #[test]
    fn vicinity_sets_nest(
        space in euclidean_space(),
        noise in prop::collection::vec(-0.5f64..0.5, 9),
        base in 0usize..9,
        shift in prop::collection::vec(-0.3f64..0.3, 9),
        radius in 0.0f64..1.5,
    ) {
        let n = space.len();
        let frame = kuratowski_embed(&space);
        let f: Vec<f64> = frame.row(base % n).iter().zip(&noise).map(|(a, b)| a + b).collect();
        let g: Vec<f64> = f.iter().zip(&shift).map(|(a, b)| a + b).collect();
        let gap = sup_distance(&f, &g).unwrap();
        let a = vicinity_set(&frame, &f, radius).unwrap();
        let b = vicinity_set(&frame, &g, radius + gap).unwrap();
        let c = vicinity_set(&frame, &f, radius + 2.0 * gap).unwrap();
        for m in &a.members {
            prop_assert!(b.contains(*m));
        }
        for m in &b.members {
            prop_assert!(c.contains(*m));
        }
        prop_assert!(a.diameter(&space) <= 2.0 * radius);
    }

    #[test]
    fn vicinity_is_right_continuous(space in euclidean_space(), base in 0usize..9, radius in 0.0f64..2.0) {
        let frame = kuratowski_embed(&space);
        let f = frame.vector(base % space.len()).shifted(0.1);
        let dists = frame.distances_to_rows(&f).unwrap();
        let mut levels: Vec<f64> = dists.clone();
        levels.push(radius);
        levels.sort_by(f64::total_cmp);
        let gap = levels
            .windows(2)
            .map(|w| w[1] - w[0])
            .filter(|&g| g > 0.0)
            .fold(1.0f64, f64::min);
        let exact = vicinity_set(&frame, &f, radius).unwrap();
        let above = vicinity_set(&frame, &f, radius + 0.5 * gap).unwrap();
        prop_assert_eq!(exact.members, above.members);
    }

    #[test]
    fn fast_reduction_matches_naive(space in any_space(), frac in 0.3f64..1.2, maxdim in 1usize..=3) {
        let f = build_vr_filtration(&space, maxdim, space.diameter() * frac).unwrap();
        prop_assert_eq!(reduce(&f), reduce_naive(&f));
    }

    #[test]
    fn pairs_use_each_simplex_once(space in any_space()) {
        let f = build_vr_filtration(&space, 3, space.diameter()).unwrap();
        let b = reduce(&f);
        let mut seen = HashSet::new();
        for p in &b.pairs {
            prop_assert_eq!(p.birth_simplex.dim, p.dim);
            prop_assert_eq!(p.death_simplex.dim, p.dim + 1);
            prop_assert!(seen.insert(p.birth_simplex));
            prop_assert!(seen.insert(p.death_simplex));
        }
        for e in &b.essentials {
            prop_assert!(seen.insert(e.simplex));
        }
    }

    #[test]
    fn degree_zero_has_one_bar_per_point(space in any_space(), frac in 0.0f64..1.1) {
        let f = build_vr_filtration(&space, 1, space.diameter() * frac).unwrap();
        let b = reduce(&f);
        let count = b.pairs_in(0).count() + b.essentials_in(0).count();
        prop_assert_eq!(count + b.zero_length, space.len());
    }

    #[test]
    fn finite_bars_survive_threshold_growth(space in any_space(), lo in 0.3f64..0.8, hi in 0.8f64..1.2) {
        let t1 = space.diameter() * lo;
        let t2 = space.diameter() * hi;
        let small = reduce(&build_vr_filtration(&space, 3, t1).unwrap());
        let large = reduce(&build_vr_filtration(&space, 3, t2).unwrap());
        let kept: Vec<_> = large.pairs.iter().filter(|p| p.death <= t1).map(|p| (p.dim, p.birth.to_bits(), p.death.to_bits())).collect();
        let finite: Vec<_> = small.pairs.iter().map(|p| (p.dim, p.birth.to_bits(), p.death.to_bits())).collect();
        prop_assert_eq!(kept, finite);
    }

    #[test]
    fn persistence_is_homogeneous(space in any_space(), exp in -3i32..=3) {
        // powers of two scale every value without rounding
        let c = 2f64.powi(exp);
        let scaled = scale_metric(&space, c).unwrap();
        let t = space.diameter();
        let a = reduce(&build_vr_filtration(&space, 3, t).unwrap());
        let b = reduce(&build_vr_filtration(&scaled, 3, c * t).unwrap());
        let want: Vec<_> = a.pairs.iter().map(|p| (p.dim, (c * p.birth).to_bits(), (c * p.death).to_bits())).collect();
        let got: Vec<_> = b.pairs.iter().map(|p| (p.dim, p.birth.to_bits(), p.death.to_bits())).collect();
        prop_assert_eq!(want, got);
        prop_assert_eq!(a.essentials.len(), b.essentials.len());
    }

    #[test]
    fn dilation_of_scalings(space in euclidean_space(), e1 in -2i32..=2, e2 in -2i32..=2) {
        let (c1, c2) = (2f64.powi(e1), 2f64.powi(e2));
        let id: Vec<usize> = (0..space.len()).collect();
        let y = scale_metric(&space, c1).unwrap();
        let z = scale_metric(&y, c2).unwrap();
        prop_assert_eq!(dilation(&id, &space, &y).unwrap(), c1);
        prop_assert_eq!(dilation(&id, &space, &z).unwrap(), dilation(&id, &space, &y).unwrap() * dilation(&id, &y, &z).unwrap());
    }

    #[test]
    fn reach_witness_is_exact_and_off_the_image(space in euclidean_space(), p in 0usize..9, q in 0usize..9) {
        let n = space.len();
        let (p, q) = (p % n, q % n);
        prop_assume!(p != q && space.get(p, q) > 0.0);
        let frame = kuratowski_embed(&space);
        let w = reach_probe(&frame, p, q).unwrap();
        prop_assert!((w.to_p - w.half_delta).abs() <= 1e-12);
        prop_assert!((w.to_q - w.half_delta).abs() <= 1e-12);
        let min = w.f.values.iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert!(min > 0.0);
        prop_assert!(frame.distance_to_sample(&w.f).unwrap() >= w.half_delta - 1e-12);
    }

    #[test]
    fn cylinder_stays_within_t(p in 0usize..48, t in 0.0f64..1.0, s in 0.0f64..1.0) {
        let sub = sample_flat_torus(TAU, 1.2 * PI, 8, 6).unwrap();
        let a = cylinder_function(&sub, p, t).unwrap();
        let b = cylinder_function(&sub, p, s).unwrap();
        let d = sub.total.space.row(p);
        for (&v, &x) in a.values.values.iter().zip(d) {
            prop_assert!(v <= x + t && v >= x - t);
        }
        prop_assert!(sup_distance(&a.values, &b.values).unwrap() <= (t - s).abs() + 1e-12);
        // the branches agree where dist_p meets f_b
        let fb = shifted_base_function(&sub, sub.proj[p]).unwrap();
        for (z, (&x, &f)) in d.iter().zip(&fb.values).enumerate() {
            if x == f {
                prop_assert_eq!(a.values.values[z], f);
            }
        }
    }
}

#[test]
fn samplers_emit_valid_deterministic_metrics() {
    let spaces = [
        sample_circle(TAU, 50).unwrap().space,
        sample_sphere(2, 80, 4).unwrap().space,
        sample_sphere(3, 60, 4).unwrap().space,
        sample_sphere_antipodal(30, 4).unwrap().0.space,
        sample_flat_torus(TAU, 1.2 * PI, 10, 7).unwrap().total.space,
        sample_rp2(30, 4).unwrap().base.space,
    ];
    for s in &spaces {
        assert!(validate_metric(&s.to_rows()).is_ok());
    }
    assert_eq!(sample_sphere(2, 80, 4).unwrap().space, spaces[1]);
    assert_eq!(sample_sphere(3, 60, 4).unwrap().space, spaces[2]);
    assert_ne!(sample_sphere(2, 80, 5).unwrap().space, spaces[1]);
}

#[test]
fn exact_samplers_scale_equivariantly() {
    for c in [0.5, 2.0, 4.0] {
        let circle = sample_circle(c * TAU, 40).unwrap().space;
        assert_eq!(
            circle,
            scale_metric(&sample_circle(TAU, 40).unwrap().space, c).unwrap()
        );
        let torus = sample_flat_torus(c * TAU, c * 1.2 * PI, 9, 5)
            .unwrap()
            .total
            .space;
        let base = sample_flat_torus(TAU, 1.2 * PI, 9, 5).unwrap().total.space;
        assert_eq!(torus, scale_metric(&base, c).unwrap());
    }
}

#[test]
fn submersion_invariants_hold_with_reported_slack() {
    let subs = [
        sample_flat_torus(TAU, 1.2 * PI, 12, 8).unwrap(),
        sample_rp2(40, 2).unwrap(),
    ];
    for sub in &subs {
        let d = &sub.total.space;
        for z0 in 0..sub.total.len() {
            for (b1, fiber) in sub.fibers.iter().enumerate() {
                let nearest = fiber
                    .iter()
                    .map(|&z1| d.get(z0, z1))
                    .fold(f64::INFINITY, f64::min);
                let base = sub.base.space.get(sub.proj[z0], b1);
                assert!((nearest - base).abs() <= sub.epsilon);
            }
            for z1 in 0..sub.total.len() {
                assert!(
                    sub.base.space.get(sub.proj[z0], sub.proj[z1]) <= d.get(z0, z1) + sub.epsilon
                );
            }
        }
    }
}

#[test]
fn retraction_ignores_thread_count() {
    let sample = sample_sphere(2, 120, 9).unwrap();
    let frame = kuratowski_embed(&sample.space);
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            (0..120)
                .map(|p| frechet_retract(&frame, frame.vector(p).shifted(0.2), 1.2).unwrap())
                .collect::<Vec<_>>()
        })
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn analytic_bounds_bracket_known_values() {
    let samples = [
        sample_circle(TAU, 16).unwrap(),
        sample_sphere(2, 30, 0).unwrap(),
        sample_sphere(3, 30, 0).unwrap(),
        sample_flat_torus(TAU, 1.2 * PI, 6, 4).unwrap().total,
        sample_rp2(20, 0).unwrap().base,
    ];
    for s in &samples {
        let known = s.fillrad_true.unwrap();
        let lower = lower_bound(s.inj.unwrap(), s.delta.unwrap()).unwrap();
        assert!(lower <= known, "{}", s.label);
        assert!(known <= katz_bound(s.diameter()), "{}", s.label);
    }
}

#[test]
fn bound_report_rechecks_identically() {
    let sub = sample_rp2(30, 1).unwrap();
    let est = FillRadEstimate {
        k: 2,
        estimate: 0.97,
        bar: Bar {
            birth: 0.4,
            death: 1.94,
        },
        convention: CONVENTION.into(),
        confidence: Some(5.0),
        half_gap: 0.01,
        threshold: 2.3,
    };
    let report = check_bounds(&sub, &est);
    let json = serde_json::to_string_pretty(&report).unwrap();
    let back: BoundReport = serde_json::from_str(&json).unwrap();
    assert_eq!(recheck(&back), report.verdicts);
    assert_eq!(check_bounds(&sub, &est), report);
}

#[test]
fn barcode_values_sit_in_the_distance_set() {
    let s = sample_sphere(2, 40, 1).unwrap().space;
    let values: HashSet<u64> = s.as_flat().iter().map(|v| v.to_bits()).collect();
    let b = reduce(&build_vr_filtration(&s, 3, s.diameter()).unwrap());
    for (_, birth, death) in bits(&b) {
        assert!(birth == 0f64.to_bits() || values.contains(&birth));
        assert!(death == u64::MAX || values.contains(&death));
    }
}
