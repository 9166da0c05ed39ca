use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use rayon::prelude::*;

use super::exact::fibonacci_s2;
use super::{ManifoldSample, SubmersionSample};
use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, DEFAULT_TRIANGLE_SLACK};

/// `⌈2 ln n⌉ + dim`.
pub fn default_neighbor_count(n: usize, dim: usize) -> usize {
    (2.0 * (n.max(1) as f64).ln()).ceil() as usize + dim
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[derive(PartialEq)]
struct Frontier(f64, usize);

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance, then index
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn dijkstra(adj: &[Vec<(usize, f64)>], source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; adj.len()];
    dist[source] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(Frontier(0.0, source));
    while let Some(Frontier(du, u)) = heap.pop() {
        if du > dist[u] {
            continue;
        }
        for &(v, w) in &adj[u] {
            let cand = du + w;
            if cand < dist[v] {
                dist[v] = cand;
                heap.push(Frontier(cand, v));
            }
        }
    }
    dist
}

fn count_components(adj: &[Vec<(usize, f64)>]) -> usize {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut components = 0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        components += 1;
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(u) = stack.pop() {
            for &(v, _) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
    }
    components
}

/// Shortest-path metric of the symmetric `k`-nearest-neighbor graph.
///
/// Neighbors are chosen by ambient Euclidean distance; each edge is weighted by
/// `local_metric`, evaluated with the lower index first so weights are
/// symmetric. Rows are computed per source in parallel and mirrored from the
/// lower-index source, so the result does not depend on scheduling.
pub fn graph_geodesics<P, F>(points: &[P], local_metric: F, k: usize) -> Result<FiniteMetricSpace>
where
    P: AsRef<[f64]> + Sync,
    F: Fn(&[f64], &[f64]) -> f64 + Sync,
{
    let n = points.len();
    if n == 0 {
        return Err(Error::TooFewPoints { min: 1, got: 0 });
    }
    if n > 1 && (k == 0 || k >= n) {
        return Err(Error::InvalidParameter(format!(
            "neighbor count must be in 1..{n}, got {k}"
        )));
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let mut order: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| (euclidean(points[i].as_ref(), points[j].as_ref()), j))
            .collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(_, j) in order.iter().take(k) {
            adj[i].push(j);
            adj[j].push(i);
        }
    }
    let mut weighted: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
    for (i, nbrs) in adj.iter_mut().enumerate() {
        nbrs.sort_unstable();
        nbrs.dedup();
        let mut row = Vec::with_capacity(nbrs.len());
        for &j in nbrs.iter() {
            let (lo, hi) = (i.min(j), i.max(j));
            let w = local_metric(points[lo].as_ref(), points[hi].as_ref());
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "local metric returned {w} on edge ({lo}, {hi})"
                )));
            }
            row.push((j, w));
        }
        weighted.push(row);
    }
    let components = count_components(&weighted);
    if components > 1 {
        return Err(Error::DisconnectedGraph { components });
    }
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|s| dijkstra(&weighted, s))
        .collect();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            d[i * n + j] = rows[i][j];
            d[j * n + i] = rows[i][j];
        }
    }
    FiniteMetricSpace::from_flat(n, d, DEFAULT_TRIANGLE_SLACK)
}

/// Parameters of a graph-approximated Berger sphere sample.
#[derive(Debug, Clone, PartialEq)]
pub struct BergerParams {
    /// Scale of the Hopf fibers; 1 is the round sphere.
    pub a: f64,
    pub base_points: usize,
    pub fiber_points: usize,
    pub neighbors: Option<usize>,
}

impl Default for BergerParams {
    fn default() -> Self {
        BergerParams {
            a: 1.0,
            base_points: 40,
            fiber_points: 12,
            neighbors: None,
        }
    }
}

/// Berger-type length of the chord `x → y` on S³: the component along the
/// Hopf direction at the normalized midpoint is shrunk by `a`.
fn berger_length(a: f64, x: &[f64], y: &[f64]) -> f64 {
    let mut mid = [x[0] + y[0], x[1] + y[1], x[2] + y[2], x[3] + y[3]];
    let norm = mid.iter().map(|v| v * v).sum::<f64>().sqrt();
    mid.iter_mut().for_each(|v| *v /= norm);
    let vertical = [-mid[1], mid[0], -mid[3], mid[2]];
    let v = [y[0] - x[0], y[1] - x[1], y[2] - x[2], y[3] - x[3]];
    let along: f64 = (0..4).map(|i| v[i] * vertical[i]).sum();
    let total: f64 = v.iter().map(|c| c * c).sum();
    let horizontal = (total - along * along).max(0.0);
    (horizontal + a * a * along * along).sqrt()
}

/// Hopf fibers over a Fibonacci set on S², with the total space metric
/// approximated by graph geodesics of a Berger-type rescaling. The base is the
/// round S² of radius ½, the target of the Hopf submersion.
pub fn sample_berger(params: &BergerParams) -> Result<SubmersionSample> {
    let BergerParams {
        a,
        base_points: m,
        fiber_points: kf,
        neighbors,
    } = *params;
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "Berger parameter must be positive, got {a}"
        )));
    }
    if m < 4 || kf < 3 {
        return Err(Error::TooFewPoints {
            min: 12,
            got: m * kf,
        });
    }
    let base_pts = fibonacci_s2(m, false);
    let mut total_pts: Vec<[f64; 4]> = Vec::with_capacity(m * kf);
    for u in &base_pts {
        let phi = u[2].clamp(-1.0, 1.0).acos();
        let psi = u[1].atan2(u[0]);
        let (c, s) = ((phi / 2.0).cos(), (phi / 2.0).sin());
        // (z1, z2) = (c, s e^{iψ}) maps to u under (2 z̄1 z2, |z1|² - |z2|²)
        for j in 0..kf {
            let theta = 2.0 * PI * j as f64 / kf as f64;
            let (ct, st) = (theta.cos(), theta.sin());
            let z2 = (s * psi.cos(), s * psi.sin());
            total_pts.push([c * ct, c * st, z2.0 * ct - z2.1 * st, z2.0 * st + z2.1 * ct]);
        }
    }
    let n = total_pts.len();
    let k = neighbors.unwrap_or_else(|| default_neighbor_count(n, 3));
    let space = graph_geodesics(&total_pts, |x, y| berger_length(a, x, y), k)?;

    let nb = base_pts.len();
    let mut bd = vec![0.0; nb * nb];
    for i in 0..nb {
        for j in (i + 1)..nb {
            let dot: f64 = (0..3).map(|c| base_pts[i][c] * base_pts[j][c]).sum();
            let v = 0.5 * dot.clamp(-1.0, 1.0).acos();
            bd[i * nb + j] = v;
            bd[j * nb + i] = v;
        }
    }
    let base_space = FiniteMetricSpace::from_flat(nb, bd, DEFAULT_TRIANGLE_SLACK)?;
    let base = ManifoldSample {
        epsilon: base_space.mesh(),
        space: base_space,
        dim: 2,
        inj: Some(PI / 2.0),
        delta: Some(4.0),
        diam_true: Some(PI / 2.0),
        fillrad_true: Some(0.25 * (-1.0f64 / 3.0).acos()),
        factor_fillrads: None,
        orientable: true,
        label: format!("hopf-base(m={m})"),
        seed: None,
    };
    let total = ManifoldSample {
        epsilon: space.mesh(),
        space,
        dim: 3,
        inj: None,
        delta: None,
        diam_true: None,
        fillrad_true: None,
        factor_fillrads: None,
        orientable: true,
        label: format!("berger(a={a}, m={m}, k={kf})"),
        seed: None,
    };
    let proj = (0..n).map(|z| z / kf).collect();
    SubmersionSample::with_measured_slack(total, base, proj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::sample_circle;
    use std::f64::consts::TAU;

    fn circle_points(n: usize) -> Vec<[f64; 2]> {
        (0..n)
            .map(|i| {
                let t = TAU * i as f64 / n as f64;
                [t.cos(), t.sin()]
            })
            .collect()
    }

    #[test]
    fn chord_graph_approximates_the_circle() {
        let pts = circle_points(64);
        let g = graph_geodesics(&pts, euclidean, 2).unwrap();
        let exact = sample_circle(TAU, 64).unwrap().space;
        let mut worst = 0.0f64;
        for i in 0..64 {
            for j in 0..64 {
                if i != j {
                    let rel = (g.get(i, j) - exact.get(i, j)).abs() / exact.get(i, j);
                    worst = worst.max(rel);
                }
            }
        }
        assert!(worst < 0.01, "max relative error {worst}");
    }

    #[test]
    fn complete_graph_on_convex_set_is_direct() {
        let pts: Vec<[f64; 2]> = vec![[0.0, 0.0], [1.0, 0.2], [0.3, 2.0], [2.5, 1.5], [1.1, 1.1]];
        let g = graph_geodesics(&pts, euclidean, pts.len() - 1).unwrap();
        for i in 0..pts.len() {
            for j in 0..pts.len() {
                assert!((g.get(i, j) - euclidean(&pts[i], &pts[j])).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn disconnected_graph_reports_components() {
        let pts: Vec<[f64; 1]> = vec![[0.0], [0.1], [10.0], [10.1], [20.0], [20.1]];
        assert_eq!(
            graph_geodesics(&pts, euclidean, 1).unwrap_err(),
            Error::DisconnectedGraph { components: 3 }
        );
    }

    #[test]
    fn default_k() {
        assert_eq!(default_neighbor_count(100, 2), 10 + 2);
        assert_eq!(default_neighbor_count(480, 3), 13 + 3);
    }

    #[test]
    fn berger_round_case_matches_hopf_base() {
        let sub = sample_berger(&BergerParams {
            base_points: 12,
            fiber_points: 6,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(sub.total.len(), 72);
        assert_eq!(sub.fibers.len(), 12);
        // projection contracts distances up to graph error
        assert!(sub.contraction_defect < 0.2, "{}", sub.contraction_defect);
    }

    #[test]
    fn berger_fibers_shrink_with_a() {
        let diam = |a: f64| {
            sample_berger(&BergerParams {
                a,
                base_points: 20,
                fiber_points: 8,
                neighbors: None,
            })
            .unwrap()
            .max_fiber_diameter()
        };
        let (d1, d2, d4) = (diam(1.0), diam(0.5), diam(0.25));
        assert!(d1 > d2 && d2 > d4, "{d1} {d2} {d4}");
    }
}
