//! Finite metric spaces and their Kuratowski embedding into the finite
//! sup-norm space over the sample.
//!
//! A sample point `p` is identified with its distance row `dist_p`. Under the
//! sup norm these rows reproduce the original distances exactly, so the
//! embedding is an isometry at the bit level: the maximum of
//! `|d[i][k] - d[j][k]|` is attained at `k = j` (or `k = i`) with value
//! `d[i][j]`, and the triangle inequality bounds every other coordinate.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Additive slack for the triangle-inequality check. Samplers built on
/// `acos` produce last-bit noise.
pub const DEFAULT_TRIANGLE_SLACK: f64 = 1e-9;

/// Validated symmetric distance matrix, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteMetricSpace {
    n: usize,
    d: Vec<f64>,
}

impl FiniteMetricSpace {
    /// Validates a full square matrix with the default slack.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        validate_metric(rows)
    }

    /// Validates a row-major flat matrix.
    pub fn from_flat(n: usize, d: Vec<f64>, slack: f64) -> Result<Self> {
        if d.len() != n * n {
            return Err(Error::NotSquare {
                rows: n,
                row: 0,
                len: d.len(),
            });
        }
        let space = FiniteMetricSpace { n, d };
        space.check(slack)?;
        Ok(space)
    }

    /// Builds without validation. Callers guarantee the metric axioms.
    pub(crate) fn from_flat_unchecked(n: usize, d: Vec<f64>) -> Self {
        debug_assert_eq!(d.len(), n * n);
        FiniteMetricSpace { n, d }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.d[i * self.n..(i + 1) * self.n]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.d
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    /// Largest pairwise distance (0 for fewer than two points).
    pub fn diameter(&self) -> f64 {
        self.d.iter().copied().fold(0.0, f64::max)
    }

    /// Largest nearest-neighbor distance; a proxy for the sampling mesh.
    pub fn mesh(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        (0..self.n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &v)| v)
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }

    /// Restriction to a subset of indices, in the given order.
    pub fn subspace(&self, indices: &[usize]) -> Result<Self> {
        for &i in indices {
            if i >= self.n {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    len: self.n,
                });
            }
        }
        let m = indices.len();
        let mut d = Vec::with_capacity(m * m);
        for &i in indices {
            for &j in indices {
                d.push(self.get(i, j));
            }
        }
        FiniteMetricSpace::from_flat(m, d, DEFAULT_TRIANGLE_SLACK)
    }

    fn check(&self, slack: f64) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                let v = self.get(i, j);
                if !v.is_finite() {
                    return Err(Error::NonFinite { i, j });
                }
            }
        }
        for i in 0..n {
            let v = self.get(i, i);
            if v != 0.0 {
                return Err(Error::NonzeroDiagonal { i, value: v });
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let (dij, dji) = (self.get(i, j), self.get(j, i));
                if dij != dji {
                    return Err(Error::AsymmetricInput { i, j, dij, dji });
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let v = self.get(i, j);
                if v <= 0.0 {
                    return Err(Error::NonpositiveDistance { i, j, value: v });
                }
            }
        }
        // worst violating triple over the whole matrix
        let mut worst: Option<(usize, usize, usize, f64)> = None;
        for i in 0..n {
            let ri = self.row(i);
            for j in (i + 1)..n {
                let rj = self.row(j);
                let dij = ri[j];
                for k in 0..n {
                    if k == i || k == j {
                        continue;
                    }
                    let excess = dij - (ri[k] + rj[k]);
                    if excess > slack && worst.is_none_or(|w| excess > w.3) {
                        worst = Some((i, j, k, excess));
                    }
                }
            }
        }
        if let Some((i, j, via, excess)) = worst {
            return Err(Error::TriangleViolation { i, j, via, excess });
        }
        Ok(())
    }
}

/// Validates a square matrix with [`DEFAULT_TRIANGLE_SLACK`].
pub fn validate_metric(raw: &[Vec<f64>]) -> Result<FiniteMetricSpace> {
    validate_metric_with(raw, DEFAULT_TRIANGLE_SLACK)
}

/// Validates symmetry, zero diagonal, positivity off the diagonal and the full
/// triangle inequality up to `slack`.
pub fn validate_metric_with(raw: &[Vec<f64>], slack: f64) -> Result<FiniteMetricSpace> {
    let n = raw.len();
    let mut d = Vec::with_capacity(n * n);
    for (row, r) in raw.iter().enumerate() {
        if r.len() != n {
            return Err(Error::NotSquare {
                rows: n,
                row,
                len: r.len(),
            });
        }
        d.extend_from_slice(r);
    }
    FiniteMetricSpace::from_flat(n, d, slack)
}

/// Multiplies every distance by `c > 0`.
pub fn scale_metric(space: &FiniteMetricSpace, c: f64) -> Result<FiniteMetricSpace> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::NonpositiveScale(c));
    }
    Ok(FiniteMetricSpace::from_flat_unchecked(
        space.n,
        space.d.iter().map(|v| v * c).collect(),
    ))
}

/// An element of the finite sup-norm space over the sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AmbientFunction {
    pub values: Vec<f64>,
}

impl AmbientFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { i, j: 0 });
        }
        Ok(AmbientFunction { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Adds a constant to every coordinate.
    pub fn shifted(&self, delta: f64) -> AmbientFunction {
        AmbientFunction {
            values: self.values.iter().map(|v| v + delta).collect(),
        }
    }
}

impl AsRef<[f64]> for AmbientFunction {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

/// `max_i |f_i - g_i|`.
pub fn sup_distance(f: impl AsRef<[f64]>, g: impl AsRef<[f64]>) -> Result<f64> {
    let (f, g) = (f.as_ref(), g.as_ref());
    if f.len() != g.len() {
        return Err(Error::LengthMismatch(f.len(), g.len()));
    }
    Ok(sup_distance_unchecked(f, g))
}

#[inline]
pub(crate) fn sup_distance_unchecked(f: &[f64], g: &[f64]) -> f64 {
    f.iter()
        .zip(g)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// The Kuratowski embedding: point `i` maps to row `i` of the distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct KuratowskiFrame {
    space: FiniteMetricSpace,
}

pub fn kuratowski_embed(space: &FiniteMetricSpace) -> KuratowskiFrame {
    KuratowskiFrame {
        space: space.clone(),
    }
}

impl KuratowskiFrame {
    pub fn space(&self) -> &FiniteMetricSpace {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    /// `dist_{p_i}` restricted to the sample.
    pub fn row(&self, i: usize) -> &[f64] {
        self.space.row(i)
    }

    pub fn vector(&self, i: usize) -> AmbientFunction {
        AmbientFunction {
            values: self.row(i).to_vec(),
        }
    }

    /// `‖f - dist_{p_i}‖∞` for every sample point.
    pub fn distances_to_rows(&self, f: impl AsRef<[f64]>) -> Result<Vec<f64>> {
        let f = f.as_ref();
        if f.len() != self.len() {
            return Err(Error::LengthMismatch(f.len(), self.len()));
        }
        Ok((0..self.len())
            .map(|i| sup_distance_unchecked(f, self.row(i)))
            .collect())
    }

    /// Sup-distance from `f` to the embedded sample.
    pub fn distance_to_sample(&self, f: impl AsRef<[f64]>) -> Result<f64> {
        Ok(self
            .distances_to_rows(f)?
            .into_iter()
            .fold(f64::INFINITY, f64::min))
    }
}

/// Sample points whose Kuratowski row lies within sup-distance `radius` of `f`
/// (closed-ball convention).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VicinitySet {
    pub radius: f64,
    pub members: Vec<usize>,
}

impl VicinitySet {
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    /// Largest pairwise distance among the members.
    pub fn diameter(&self, space: &FiniteMetricSpace) -> f64 {
        let mut best = 0.0f64;
        for (a, &i) in self.members.iter().enumerate() {
            for &j in &self.members[a + 1..] {
                best = best.max(space.get(i, j));
            }
        }
        best
    }
}

pub fn vicinity_set(
    frame: &KuratowskiFrame,
    f: impl AsRef<[f64]>,
    radius: f64,
) -> Result<VicinitySet> {
    if !(radius >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "vicinity radius must be nonnegative, got {radius}"
        )));
    }
    let dists = frame.distances_to_rows(f)?;
    let members = dists
        .iter()
        .enumerate()
        .filter(|&(_, &v)| v <= radius)
        .map(|(i, _)| i)
        .collect();
    Ok(VicinitySet { radius, members })
}

/// Reads `N` rows of `N` comma-separated decimals, no header.
pub fn read_csv<R: Read>(reader: R) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let mut rows = Vec::new();
    for (r, record) in rdr.records().enumerate() {
        let record = record?;
        let row = record
            .iter()
            .enumerate()
            .map(|(c, field)| {
                field
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("row {r}, column {c}: {field:?}: {e}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<FiniteMetricSpace> {
    let file = std::fs::File::open(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    validate_metric(&read_csv(file)?)
}

/// Writes the matrix with shortest round-trip decimal formatting.
pub fn write_csv<W: Write>(space: &FiniteMetricSpace, writer: W) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(writer);
    for i in 0..space.len() {
        wtr.write_record(space.row(i).iter().map(|v| format!("{v:?}")))?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn to_csv_string(space: &FiniteMetricSpace) -> String {
    let mut buf = Vec::new();
    write_csv(space, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("csv output is ascii")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle4() -> FiniteMetricSpace {
        let h = std::f64::consts::FRAC_PI_2;
        let p = std::f64::consts::PI;
        validate_metric(&[
            vec![0.0, h, p, h],
            vec![h, 0.0, h, p],
            vec![p, h, 0.0, h],
            vec![h, p, h, 0.0],
        ])
        .unwrap()
    }

    #[test]
    fn two_point_space_is_valid() {
        let s = validate_metric(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.get(0, 1), 1.0);
    }

    #[test]
    fn triangle_violation_reports_triple() {
        let err = validate_metric(&[
            vec![0.0, 3.0, 1.0],
            vec![3.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ])
        .unwrap_err();
        match err {
            Error::TriangleViolation { i, j, via, excess } => {
                assert_eq!((i, j, via), (0, 1, 2));
                assert_eq!(excess, 1.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn worst_triple_is_reported() {
        // two violations; (0,3) via 1 exceeds by 3, (1,2) via 0 only by 0.5
        let err = validate_metric(&[
            vec![0.0, 1.0, 1.0, 5.0],
            vec![1.0, 0.0, 2.5, 1.0],
            vec![1.0, 2.5, 0.0, 4.0],
            vec![5.0, 1.0, 4.0, 0.0],
        ])
        .unwrap_err();
        assert!(matches!(
            err,
            Error::TriangleViolation {
                i: 0,
                j: 3,
                via: 1,
                ..
            }
        ));
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(matches!(
            validate_metric(&[vec![0.0, 1.0], vec![2.0, 0.0]]),
            Err(Error::AsymmetricInput { .. })
        ));
        assert!(matches!(
            validate_metric(&[vec![1.0, 1.0], vec![1.0, 0.0]]),
            Err(Error::NonzeroDiagonal { i: 0, .. })
        ));
        assert!(matches!(
            validate_metric(&[vec![0.0, 0.0], vec![0.0, 0.0]]),
            Err(Error::NonpositiveDistance { .. })
        ));
        assert!(matches!(
            validate_metric(&[vec![0.0, 1.0], vec![1.0]]),
            Err(Error::NotSquare { .. })
        ));
        assert!(matches!(
            validate_metric(&[vec![0.0, f64::NAN], vec![f64::NAN, 0.0]]),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn slack_absorbs_float_noise() {
        let raw = vec![
            vec![0.0, 2.0 + 1e-12, 1.0],
            vec![2.0 + 1e-12, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ];
        assert!(validate_metric(&raw).is_ok());
        assert!(validate_metric_with(&raw, 0.0).is_err());
    }

    #[test]
    fn four_point_circle_is_valid() {
        let s = circle4();
        assert_eq!(s.diameter(), std::f64::consts::PI);
    }

    #[test]
    fn kuratowski_rows_are_the_matrix() {
        let s = validate_metric(&[
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 1.5],
            vec![2.0, 1.5, 0.0],
        ])
        .unwrap();
        let frame = kuratowski_embed(&s);
        assert_eq!(frame.row(0), &[0.0, 1.0, 2.0]);
        assert_eq!(frame.row(1), &[1.0, 0.0, 1.5]);
        assert_eq!(frame.row(2), &[2.0, 1.5, 0.0]);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(
                    sup_distance(frame.row(i), frame.row(j)).unwrap(),
                    s.get(i, j)
                );
            }
        }
    }

    #[test]
    fn one_point_frame() {
        let s = validate_metric(&[vec![0.0]]).unwrap();
        let frame = kuratowski_embed(&s);
        assert_eq!(frame.vector(0).values, vec![0.0]);
    }

    #[test]
    fn sup_distance_cases() {
        let s = circle4();
        let frame = kuratowski_embed(&s);
        assert_eq!(sup_distance(frame.row(1), frame.row(1)).unwrap(), 0.0);
        let shifted = frame.vector(0).shifted(0.25);
        // sup of dist_p - dist_q is d(p,q), attained at q, plus the shift
        assert_eq!(
            sup_distance(&shifted, frame.row(2)).unwrap(),
            s.get(0, 2) + 0.25
        );
        assert_eq!(
            sup_distance([1.0, 2.0], [1.0]).unwrap_err(),
            Error::LengthMismatch(2, 1)
        );
    }

    #[test]
    fn vicinity_of_a_row_is_a_ball() {
        let s = circle4();
        let frame = kuratowski_embed(&s);
        let v = vicinity_set(&frame, frame.row(0), 1.6).unwrap();
        assert_eq!(v.members, vec![0, 1, 3]);
        let all = vicinity_set(&frame, frame.row(0), 10.0).unwrap();
        assert_eq!(all.members, vec![0, 1, 2, 3]);
        let f = frame.vector(0).shifted(5.0);
        assert!(vicinity_set(&frame, &f, 1.0).unwrap().is_empty());
        assert!(vicinity_set(&frame, &f, -1.0).is_err());
    }

    #[test]
    fn scaling() {
        let s = validate_metric(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(scale_metric(&s, 1.0).unwrap(), s);
        assert_eq!(scale_metric(&s, 2.0).unwrap().get(0, 1), 2.0);
        assert_eq!(
            scale_metric(&s, 0.0).unwrap_err(),
            Error::NonpositiveScale(0.0)
        );
        assert!(scale_metric(&s, -1.0).is_err());
        let c = circle4();
        let scaled = scale_metric(&c, 3.7).unwrap();
        assert!(validate_metric(&scaled.to_rows()).is_ok());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let s = circle4();
        let text = to_csv_string(&s);
        let back = validate_metric(&read_csv(text.as_bytes()).unwrap()).unwrap();
        assert_eq!(back, s);
        assert!(text.starts_with("0.0,1.5707963267948966,3.141592653589793"));
    }

    #[test]
    fn csv_rejects_garbage() {
        assert!(matches!(
            read_csv("0,abc\n1,0\n".as_bytes()),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn mesh_and_subspace() {
        let s = circle4();
        assert_eq!(s.mesh(), std::f64::consts::FRAC_PI_2);
        let sub = s.subspace(&[0, 2]).unwrap();
        assert_eq!(sub.get(0, 1), std::f64::consts::PI);
        assert!(s.subspace(&[7]).is_err());
    }
}
