use super::{ManifoldSample, SubmersionSample};
use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, DEFAULT_TRIANGLE_SLACK};

/// Geometric data of the orbit space, which the orbit partition alone does
/// not determine.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BaseMetadata {
    pub label: Option<String>,
    pub dim: Option<usize>,
    pub inj: Option<f64>,
    pub delta: Option<f64>,
    pub diam_true: Option<f64>,
    pub fillrad_true: Option<f64>,
    pub orientable: Option<bool>,
}

/// Orbit space of a partition, with `d([x], [y]) = min d(x', y')` over orbit
/// representatives. For orbits of a finite isometry group this is a metric and
/// the quotient map is a submetry; anything else is rejected through the
/// metric validation and the submersion checks.
pub fn quotient_metric(
    total: &ManifoldSample,
    orbits: &[Vec<usize>],
    meta: BaseMetadata,
) -> Result<SubmersionSample> {
    let n = total.len();
    let mut proj = vec![usize::MAX; n];
    for (o, orbit) in orbits.iter().enumerate() {
        if orbit.is_empty() {
            return Err(Error::EmptyOrbit(o));
        }
        for &z in orbit {
            if z >= n {
                return Err(Error::IndexOutOfRange { index: z, len: n });
            }
            if proj[z] != usize::MAX {
                return Err(Error::NotAPartition(format!(
                    "index {z} lies in orbits {} and {o}",
                    proj[z]
                )));
            }
            proj[z] = o;
        }
    }
    if let Some(z) = proj.iter().position(|&o| o == usize::MAX) {
        return Err(Error::NotAPartition(format!("index {z} lies in no orbit")));
    }

    let space = orbit_min_metric(total, orbits)?;
    let base = ManifoldSample {
        epsilon: space.mesh(),
        space,
        dim: meta.dim.unwrap_or(total.dim),
        inj: meta.inj,
        delta: meta.delta,
        diam_true: meta.diam_true,
        fillrad_true: meta.fillrad_true,
        factor_fillrads: None,
        orientable: meta.orientable.unwrap_or(false),
        label: meta
            .label
            .unwrap_or_else(|| format!("quotient of {}", total.label)),
        seed: total.seed,
    };
    let sub = SubmersionSample::with_measured_slack(total.clone(), base, proj)?;
    // orbits of isometries are exactly equidistant; allow float noise only
    let tol = DEFAULT_TRIANGLE_SLACK * (1.0 + total.space.diameter());
    if sub.equidistance_defect > tol {
        return Err(Error::QuotientNotMetric(Box::new(Error::InvalidParameter(
            format!(
                "orbits are not equidistant (defect {} > {tol})",
                sub.equidistance_defect
            ),
        ))));
    }
    Ok(sub)
}

fn orbit_min_metric(total: &ManifoldSample, orbits: &[Vec<usize>]) -> Result<FiniteMetricSpace> {
    let m = orbits.len();
    let mut d = vec![0.0; m * m];
    for a in 0..m {
        for b in (a + 1)..m {
            let mut best = f64::INFINITY;
            for &x in &orbits[a] {
                let row = total.space.row(x);
                for &y in &orbits[b] {
                    best = best.min(row[y]);
                }
            }
            d[a * m + b] = best;
            d[b * m + a] = best;
        }
    }
    FiniteMetricSpace::from_flat(m, d, DEFAULT_TRIANGLE_SLACK)
        .map_err(|e| Error::QuotientNotMetric(Box::new(e)))
}

/// Rebuilds a submersion from its total space and fibers, with the
/// orbit-minimum metric on the base. Unlike [`quotient_metric`] the fibers
/// need not be exactly equidistant: the measured defect becomes the slack.
pub fn submersion_from_fibers(
    total: &ManifoldSample,
    fibers: &[Vec<usize>],
    base_dim: usize,
) -> Result<SubmersionSample> {
    let n = total.len();
    let mut proj = vec![usize::MAX; n];
    for (b, fiber) in fibers.iter().enumerate() {
        if fiber.is_empty() {
            return Err(Error::EmptyOrbit(b));
        }
        for &z in fiber {
            if z >= n {
                return Err(Error::IndexOutOfRange { index: z, len: n });
            }
            if proj[z] != usize::MAX {
                return Err(Error::NotAPartition(format!(
                    "index {z} lies in fibers {} and {b}",
                    proj[z]
                )));
            }
            proj[z] = b;
        }
    }
    let space = orbit_min_metric(total, fibers)?;
    let mut base = ManifoldSample::bare(space, base_dim, format!("base of {}", total.label));
    base.seed = total.seed;
    SubmersionSample::with_measured_slack(total.clone(), base, proj)
}

/// Real projective plane as the antipodal quotient of `2m` sphere points,
/// carrying the round metric data: curvature 1, injectivity radius and
/// diameter π/2, and Katz's filling radius π/6, which equals diam/3.
pub fn sample_rp2(m: usize, seed: u64) -> Result<SubmersionSample> {
    let (sphere, orbits) = super::sample_sphere_antipodal(m, seed)?;
    let half_pi = std::f64::consts::FRAC_PI_2;
    quotient_metric(
        &sphere,
        &orbits,
        BaseMetadata {
            label: Some(format!("rp2(m={m}, seed={seed})")),
            dim: Some(2),
            inj: Some(half_pi),
            delta: Some(1.0),
            diam_true: Some(half_pi),
            fillrad_true: Some(half_pi / 3.0),
            orientable: Some(false),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::{sample_circle, sample_flat_torus, sample_sphere_antipodal};
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    #[test]
    fn antipodal_quotient_is_rp2() {
        let (sphere, orbits) = sample_sphere_antipodal(30, 0).unwrap();
        let sub = quotient_metric(
            &sphere,
            &orbits,
            BaseMetadata {
                dim: Some(2),
                ..Default::default()
            },
        )
        .unwrap();
        let diam = sub.base.space.diameter();
        assert!(diam <= FRAC_PI_2 + 1e-12, "diam {diam}");
        assert!(diam > FRAC_PI_2 - 0.3, "diam {diam}");
        assert!(sub.equidistance_defect < 1e-9);
        // the two-point fibers have extrinsic diameter π
        assert!((sub.rho0 - FRAC_PI_2).abs() < 1e-7);
    }

    #[test]
    fn fibers_rebuild_the_torus() {
        let sub = sample_flat_torus(TAU, 1.2 * PI, 8, 5).unwrap();
        let again = submersion_from_fibers(&sub.total, &sub.fibers, 1).unwrap();
        assert_eq!(again.base.space, sub.base.space);
        assert_eq!(again.proj, sub.proj);
        assert_eq!(again.rho0, sub.rho0);
        assert_eq!(again.epsilon, sub.epsilon);
    }

    #[test]
    fn rp2_metadata() {
        let sub = sample_rp2(20, 1).unwrap();
        assert_eq!(sub.base.len(), 20);
        assert!(!sub.base.orientable);
        assert_eq!(sub.base.fillrad_true, Some(PI / 6.0));
        assert!(sub.base.space.diameter() <= FRAC_PI_2 + 1e-12);
    }

    #[test]
    fn singleton_orbits_give_an_isometric_base() {
        let s = sample_circle(TAU, 9).unwrap();
        let orbits: Vec<Vec<usize>> = (0..9).map(|i| vec![i]).collect();
        let sub = quotient_metric(&s, &orbits, BaseMetadata::default()).unwrap();
        assert_eq!(sub.base.space, s.space);
        assert_eq!(sub.rho0, 0.0);
    }

    #[test]
    fn single_orbit_is_a_point() {
        let s = sample_circle(TAU, 9).unwrap();
        let sub = quotient_metric(&s, &[(0..9).collect()], BaseMetadata::default()).unwrap();
        assert_eq!(sub.base.len(), 1);
        assert_eq!(sub.rho0, 0.5 * s.space.diameter());
    }

    #[test]
    fn torus_columns_quotient_to_the_base_circle() {
        let t = sample_flat_torus(TAU, 1.2 * PI, 8, 5).unwrap();
        let sub = quotient_metric(&t.total, &t.fibers, BaseMetadata::default()).unwrap();
        assert_eq!(sub.base.space, t.base.space);
    }

    #[test]
    fn non_equidistant_orbits_are_rejected() {
        // orbits {0,1} and {2}: 2 is at distance 1 from 0 but 5 from 1
        let total = ManifoldSample::bare(
            FiniteMetricSpace::from_flat(
                3,
                vec![0.0, 4.5, 1.0, 4.5, 0.0, 5.0, 1.0, 5.0, 0.0],
                DEFAULT_TRIANGLE_SLACK,
            )
            .unwrap(),
            1,
            "skew",
        );
        let err =
            quotient_metric(&total, &[vec![0, 1], vec![2]], BaseMetadata::default()).unwrap_err();
        assert!(matches!(err, Error::QuotientNotMetric(_)));
    }

    #[test]
    fn quotient_triangle_failure_is_reported() {
        // path 0-1-2-3 with unit steps; collapsing {1, 2} leaves the end
        // classes 3 apart but each within 1 of the middle class
        let d = vec![
            0.0, 1.0, 2.0, 3.0, //
            1.0, 0.0, 1.0, 2.0, //
            2.0, 1.0, 0.0, 1.0, //
            3.0, 2.0, 1.0, 0.0,
        ];
        let total = ManifoldSample::bare(
            FiniteMetricSpace::from_flat(4, d, DEFAULT_TRIANGLE_SLACK).unwrap(),
            1,
            "path",
        );
        let err = quotient_metric(
            &total,
            &[vec![0], vec![1, 2], vec![3]],
            BaseMetadata::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::QuotientNotMetric(_)), "{err:?}");
    }

    #[test]
    fn partition_errors() {
        let s = sample_circle(TAU, 4).unwrap();
        assert_eq!(
            quotient_metric(&s, &[vec![0, 1, 2, 3], vec![]], BaseMetadata::default()).unwrap_err(),
            Error::EmptyOrbit(1)
        );
        assert!(matches!(
            quotient_metric(&s, &[vec![0, 1], vec![1, 2, 3]], BaseMetadata::default()),
            Err(Error::NotAPartition(_))
        ));
        assert!(matches!(
            quotient_metric(&s, &[vec![0, 1], vec![2]], BaseMetadata::default()),
            Err(Error::NotAPartition(_))
        ));
    }
}
