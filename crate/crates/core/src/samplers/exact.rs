use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ManifoldSample, SubmersionSample};
use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, DEFAULT_TRIANGLE_SLACK};

/// Root of x⁴ = x + 4, the second irrational of the super-Fibonacci spiral.
const SUPER_FIB_PSI: f64 = 1.533_751_168_755_204_3;

/// Arc distance between grid positions `i` and `j` on a circle of `n` cells.
#[inline]
fn arc(i: usize, j: usize, n: usize, circumference: f64) -> f64 {
    let k = i.abs_diff(j);
    let m = k.min(n - k);
    (m as f64) * circumference / (n as f64)
}

/// `n` equally spaced points on a circle with its arc-length metric.
pub fn sample_circle(circumference: f64, n: usize) -> Result<ManifoldSample> {
    if n < 3 {
        return Err(Error::TooFewPoints { min: 3, got: n });
    }
    if !(circumference > 0.0) || !circumference.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "circumference must be positive, got {circumference}"
        )));
    }
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            d[i * n + j] = arc(i, j, n, circumference);
        }
    }
    let space = FiniteMetricSpace::from_flat(n, d, DEFAULT_TRIANGLE_SLACK)?;
    Ok(ManifoldSample {
        epsilon: space.mesh(),
        space,
        dim: 1,
        inj: Some(circumference / 2.0),
        delta: Some(0.0),
        diam_true: Some(circumference / 2.0),
        fillrad_true: Some(circumference / 6.0),
        factor_fillrads: None,
        orientable: true,
        label: format!("circle(L={circumference}, n={n})"),
        seed: None,
    })
}

fn random_unit_quaternion(rng: &mut impl Rng) -> [f64; 4] {
    // Shoemake's uniform rotation
    let u1: f64 = rng.gen();
    let u2: f64 = rng.gen::<f64>() * 2.0 * PI;
    let u3: f64 = rng.gen::<f64>() * 2.0 * PI;
    let a = (1.0 - u1).sqrt();
    let b = u1.sqrt();
    [a * u2.sin(), a * u2.cos(), b * u3.sin(), b * u3.cos()]
}

fn rotation_matrix(q: [f64; 4]) -> [[f64; 3]; 3] {
    let [w, x, y, z] = q;
    [
        [
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
        ],
        [
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
        ],
        [
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        ],
    ]
}

fn rotate3(r: &[[f64; 3]; 3], p: [f64; 3]) -> [f64; 3] {
    [
        r[0][0] * p[0] + r[0][1] * p[1] + r[0][2] * p[2],
        r[1][0] * p[0] + r[1][1] * p[1] + r[1][2] * p[2],
        r[2][0] * p[0] + r[2][1] * p[1] + r[2][2] * p[2],
    ]
}

fn quat_mul(a: [f64; 4], b: [f64; 4]) -> [f64; 4] {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

fn normalize(p: &mut [f64]) {
    let norm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
    p.iter_mut().for_each(|v| *v /= norm);
}

/// Fibonacci lattice on S² (`hemisphere` restricts to z > 0).
pub(crate) fn fibonacci_s2(n: usize, hemisphere: bool) -> Vec<[f64; 3]> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let s = i as f64 + 0.5;
            let z = if hemisphere {
                1.0 - s / n as f64
            } else {
                1.0 - 2.0 * s / n as f64
            };
            let r = (1.0 - z * z).max(0.0).sqrt();
            let theta = golden * i as f64;
            let mut p = [r * theta.cos(), r * theta.sin(), z];
            normalize(&mut p);
            p
        })
        .collect()
}

/// Super-Fibonacci spiral on S³.
pub(crate) fn super_fibonacci_s3(n: usize) -> Vec<[f64; 4]> {
    let phi = 2f64.sqrt();
    (0..n)
        .map(|i| {
            let s = i as f64 + 0.5;
            let t = s / n as f64;
            let ang = 2.0 * PI * s;
            let r = t.sqrt();
            let big_r = (1.0 - t).sqrt();
            let alpha = ang / phi;
            let beta = ang / SUPER_FIB_PSI;
            let mut q = [
                r * alpha.sin(),
                r * alpha.cos(),
                big_r * beta.sin(),
                big_r * beta.cos(),
            ];
            normalize(&mut q);
            q
        })
        .collect()
}

/// Great-circle distance matrix of unit vectors.
pub(crate) fn angular_metric<const D: usize>(points: &[[f64; D]]) -> Vec<f64> {
    let n = points.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let dot: f64 = (0..D).map(|k| points[i][k] * points[j][k]).sum();
            let v = dot.clamp(-1.0, 1.0).acos();
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    d
}

fn round_sphere_sample(
    dim: usize,
    space: FiniteMetricSpace,
    seed: u64,
    label: String,
) -> ManifoldSample {
    ManifoldSample {
        epsilon: space.mesh(),
        space,
        dim,
        inj: Some(PI),
        delta: Some(1.0),
        diam_true: Some(PI),
        fillrad_true: Some(0.5 * (-1.0 / (dim as f64 + 1.0)).acos()),
        factor_fillrads: None,
        orientable: true,
        label,
        seed: Some(seed),
    }
}

/// Quasi-uniform points on the unit round sphere of dimension 2 or 3, rotated
/// by a seed-determined isometry.
pub fn sample_sphere(dim: usize, n: usize, seed: u64) -> Result<ManifoldSample> {
    if dim != 2 && dim != 3 {
        return Err(Error::InvalidParameter(format!(
            "sphere dimension must be 2 or 3, got {dim}"
        )));
    }
    if n < dim + 2 {
        return Err(Error::TooFewPoints {
            min: dim + 2,
            got: n,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = random_unit_quaternion(&mut rng);
    let d = if dim == 2 {
        let r = rotation_matrix(q);
        let pts: Vec<[f64; 3]> = fibonacci_s2(n, false)
            .into_iter()
            .map(|p| rotate3(&r, p))
            .collect();
        angular_metric(&pts)
    } else {
        let pts: Vec<[f64; 4]> = super_fibonacci_s3(n)
            .into_iter()
            .map(|p| quat_mul(q, p))
            .collect();
        angular_metric(&pts)
    };
    let space = FiniteMetricSpace::from_flat(n, d, DEFAULT_TRIANGLE_SLACK)?;
    Ok(round_sphere_sample(
        dim,
        space,
        seed,
        format!("sphere{dim}(n={n}, seed={seed})"),
    ))
}

/// `2m` points on the unit 2-sphere closed under the antipodal map: point
/// `i + m` is the antipode of point `i`. Returns the sample and its antipodal
/// orbits `{i, i + m}`.
pub fn sample_sphere_antipodal(m: usize, seed: u64) -> Result<(ManifoldSample, Vec<Vec<usize>>)> {
    if 2 * m < 4 {
        return Err(Error::TooFewPoints { min: 4, got: 2 * m });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = rotation_matrix(random_unit_quaternion(&mut rng));
    let upper: Vec<[f64; 3]> = fibonacci_s2(m, true)
        .into_iter()
        .map(|p| rotate3(&r, p))
        .collect();
    let pts: Vec<[f64; 3]> = upper
        .iter()
        .copied()
        .chain(upper.iter().map(|p| [-p[0], -p[1], -p[2]]))
        .collect();
    let space = FiniteMetricSpace::from_flat(2 * m, angular_metric(&pts), DEFAULT_TRIANGLE_SLACK)?;
    let orbits = (0..m).map(|i| vec![i, i + m]).collect();
    Ok((
        round_sphere_sample(
            2,
            space,
            seed,
            format!("sphere2-antipodal(m={m}, seed={seed})"),
        ),
        orbits,
    ))
}

/// Product grid of circles of lengths `L ≥ l` with the flat product metric,
/// projected onto the first factor. Point `(i, j)` has index `i * nl + j`.
pub fn sample_flat_torus(
    big_l: f64,
    small_l: f64,
    n_big: usize,
    n_small: usize,
) -> Result<SubmersionSample> {
    if !(small_l > 0.0) || !(big_l >= small_l) || !big_l.is_finite() {
        return Err(Error::BadGrid(format!(
            "need L >= l > 0, got L = {big_l}, l = {small_l}"
        )));
    }
    if n_big < 3 || n_small < 3 {
        return Err(Error::BadGrid(format!(
            "grid counts must be at least 3, got {n_big} x {n_small}"
        )));
    }
    let n = n_big * n_small;
    let mut d = vec![0.0; n * n];
    for i in 0..n_big {
        for j in 0..n_small {
            let a = i * n_small + j;
            for i2 in 0..n_big {
                let dx = arc(i, i2, n_big, big_l);
                for j2 in 0..n_small {
                    let dy = arc(j, j2, n_small, small_l);
                    d[a * n + i2 * n_small + j2] = (dx * dx + dy * dy).sqrt();
                }
            }
        }
    }
    let space = FiniteMetricSpace::from_flat(n, d, DEFAULT_TRIANGLE_SLACK)?;
    let total = ManifoldSample {
        epsilon: space.mesh(),
        space,
        dim: 2,
        inj: Some(small_l / 2.0),
        delta: Some(0.0),
        diam_true: Some(((big_l / 2.0).powi(2) + (small_l / 2.0).powi(2)).sqrt()),
        fillrad_true: Some(big_l.min(small_l) / 6.0),
        factor_fillrads: Some(vec![big_l / 6.0, small_l / 6.0]),
        orientable: true,
        label: format!("torus(L={big_l}, l={small_l}, {n_big}x{n_small})"),
        seed: None,
    };
    let base = sample_circle(big_l, n_big)?;
    let proj = (0..n).map(|a| a / n_small).collect();
    SubmersionSample::new(total, base, proj)
}
