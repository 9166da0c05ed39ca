use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;

/// Default cap on the number of simplices in one filtration.
pub const DEFAULT_SIMPLEX_BUDGET: usize = 50_000_000;

/// Packs an ascending vertex tuple into a `u64`, first vertex in the most
/// significant bits. For tuples of equal length the numeric order of codes is
/// the lexicographic order of the tuples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VertexCodec {
    bits: u32,
}

impl VertexCodec {
    pub fn new(points: usize, max_vertices: usize) -> Result<Self> {
        let bits = (usize::BITS - points.saturating_sub(1).leading_zeros()).max(1);
        if bits as usize * max_vertices > 64 {
            return Err(Error::VertexEncodingOverflow {
                points,
                bits,
                vertices: max_vertices,
            });
        }
        Ok(VertexCodec { bits })
    }

    #[inline]
    pub fn encode(&self, vertices: &[u32]) -> u64 {
        vertices
            .iter()
            .fold(0u64, |acc, &v| (acc << self.bits) | v as u64)
    }

    #[inline]
    pub fn decode_into(&self, mut code: u64, len: usize, out: &mut Vec<u32>) {
        out.clear();
        out.resize(len, 0);
        let mask = (1u64 << self.bits) - 1;
        for slot in out.iter_mut().rev() {
            *slot = (code & mask) as u32;
            code >>= self.bits;
        }
    }

    pub fn decode(&self, code: u64, len: usize) -> Vec<u32> {
        let mut out = Vec::with_capacity(len);
        self.decode_into(code, len, &mut out);
        out
    }
}

/// A simplex within one dimension level: its diameter and vertex code.
/// Ordered by value, then lexicographically by vertices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexKey {
    pub value: f64,
    pub code: u64,
}

impl Eq for SimplexKey {}

impl Ord for SimplexKey {
    #[inline]
    fn cmp(&self, other: &Self) -> Ordering {
        self.value
            .total_cmp(&other.value)
            .then(self.code.cmp(&other.code))
    }
}

impl PartialOrd for SimplexKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Position of a simplex: its dimension and rank within that dimension.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
pub struct SimplexId {
    pub dim: usize,
    pub pos: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    pub vertices: Vec<u32>,
    pub value: f64,
}

impl Simplex {
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }
}

/// Vietoris–Rips filtration under the diameter convention, truncated at
/// `threshold` and `maxdim`. Simplices are stored per dimension, each level
/// sorted by (value, lexicographic vertices); the global order is
/// (value, dimension, lexicographic vertices).
#[derive(Debug, Clone)]
pub struct Filtration {
    maxdim: usize,
    threshold: f64,
    space: FiniteMetricSpace,
    codec: VertexCodec,
    levels: Vec<Vec<SimplexKey>>,
}

impl Filtration {
    pub fn maxdim(&self) -> usize {
        self.maxdim
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn space(&self) -> &FiniteMetricSpace {
        &self.space
    }

    pub fn codec(&self) -> VertexCodec {
        self.codec
    }

    pub fn len(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn len_dim(&self, dim: usize) -> usize {
        self.levels.get(dim).map_or(0, Vec::len)
    }

    pub fn level(&self, dim: usize) -> &[SimplexKey] {
        self.levels.get(dim).map_or(&[], Vec::as_slice)
    }

    pub fn key(&self, id: SimplexId) -> SimplexKey {
        self.levels[id.dim][id.pos]
    }

    pub fn value(&self, id: SimplexId) -> f64 {
        self.key(id).value
    }

    pub fn simplex(&self, id: SimplexId) -> Simplex {
        let key = self.key(id);
        Simplex {
            vertices: self.codec.decode(key.code, id.dim + 1),
            value: key.value,
        }
    }

    /// Rank of `key` within its dimension level.
    pub fn position(&self, dim: usize, key: SimplexKey) -> Option<usize> {
        self.levels.get(dim)?.binary_search(&key).ok()
    }

    /// All simplex ids in global filtration order.
    pub fn global_order(&self) -> Vec<SimplexId> {
        let mut cursor = vec![0usize; self.levels.len()];
        let mut out = Vec::with_capacity(self.len());
        loop {
            let mut best: Option<(f64, usize)> = None;
            for (dim, level) in self.levels.iter().enumerate() {
                if let Some(k) = level.get(cursor[dim]) {
                    // strict comparison keeps the lowest dimension on ties
                    if best.is_none_or(|(v, _)| k.value.total_cmp(&v) == Ordering::Less) {
                        best = Some((k.value, dim));
                    }
                }
            }
            match best {
                Some((_, dim)) => {
                    out.push(SimplexId {
                        dim,
                        pos: cursor[dim],
                    });
                    cursor[dim] += 1;
                }
                None => return out,
            }
        }
    }

    /// Simplices in global filtration order.
    pub fn iter(&self) -> impl Iterator<Item = (SimplexId, Simplex)> + '_ {
        self.global_order()
            .into_iter()
            .map(move |id| (id, self.simplex(id)))
    }
}

/// Builds the Vietoris–Rips filtration with [`DEFAULT_SIMPLEX_BUDGET`].
pub fn build_vr_filtration(
    space: &FiniteMetricSpace,
    maxdim: usize,
    threshold: f64,
) -> Result<Filtration> {
    build_vr_filtration_with_budget(space, maxdim, threshold, DEFAULT_SIMPLEX_BUDGET)
}

/// All simplices of dimension ≤ `maxdim` whose diameter is ≤ `threshold`.
/// Fails with [`Error::SimplexBudgetExceeded`] as soon as more than `budget`
/// simplices qualify.
pub fn build_vr_filtration_with_budget(
    space: &FiniteMetricSpace,
    maxdim: usize,
    threshold: f64,
    budget: usize,
) -> Result<Filtration> {
    if maxdim < 1 {
        return Err(Error::InvalidParameter(
            "filtration needs maxdim >= 1".into(),
        ));
    }
    if !(threshold > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "threshold must be positive, got {threshold}"
        )));
    }
    let n = space.len();
    let codec = VertexCodec::new(n, maxdim + 1)?;
    let mut levels: Vec<Vec<SimplexKey>> = vec![Vec::new(); maxdim + 1];
    let mut count = 0usize;

    let up_neighbors: Vec<Vec<u32>> = (0..n)
        .map(|v| {
            ((v + 1)..n)
                .filter(|&u| space.get(v, u) <= threshold)
                .map(|u| u as u32)
                .collect()
        })
        .collect();

    let mut stack: Vec<u32> = Vec::with_capacity(maxdim + 1);
    for v in 0..n {
        count += 1;
        if count > budget {
            return Err(Error::SimplexBudgetExceeded { budget });
        }
        levels[0].push(SimplexKey {
            value: 0.0,
            code: v as u64,
        });
        let cands: Vec<(u32, f64)> = up_neighbors[v]
            .iter()
            .map(|&u| (u, space.get(v, u as usize)))
            .collect();
        stack.clear();
        stack.push(v as u32);
        extend_cliques(
            space,
            &codec,
            maxdim,
            threshold,
            budget,
            &mut count,
            &mut stack,
            0.0,
            &cands,
            &mut levels,
        )?;
    }
    for level in levels.iter_mut() {
        level.par_sort_unstable();
        level.shrink_to_fit();
    }
    Ok(Filtration {
        maxdim,
        threshold,
        space: space.clone(),
        codec,
        levels,
    })
}

/// Extends the clique on `stack` by each candidate in turn. Each candidate
/// carries its largest distance to the current clique.
#[allow(clippy::too_many_arguments)]
fn extend_cliques(
    space: &FiniteMetricSpace,
    codec: &VertexCodec,
    maxdim: usize,
    threshold: f64,
    budget: usize,
    count: &mut usize,
    stack: &mut Vec<u32>,
    value: f64,
    cands: &[(u32, f64)],
    levels: &mut [Vec<SimplexKey>],
) -> Result<()> {
    let dim = stack.len();
    for (idx, &(u, reach)) in cands.iter().enumerate() {
        *count += 1;
        if *count > budget {
            return Err(Error::SimplexBudgetExceeded { budget });
        }
        let new_value = value.max(reach);
        stack.push(u);
        levels[dim].push(SimplexKey {
            value: new_value,
            code: codec.encode(stack),
        });
        if dim < maxdim {
            let row = space.row(u as usize);
            let next: Vec<(u32, f64)> = cands[idx + 1..]
                .iter()
                .filter_map(|&(w, r)| {
                    let duw = row[w as usize];
                    (duw <= threshold).then_some((w, r.max(duw)))
                })
                .collect();
            if !next.is_empty() {
                extend_cliques(
                    space, codec, maxdim, threshold, budget, count, stack, new_value, &next, levels,
                )?;
            }
        }
        stack.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::validate_metric;
    use crate::samplers::sample_circle;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    #[test]
    fn codec_orders_lexicographically() {
        let c = VertexCodec::new(100, 4).unwrap();
        let a = c.encode(&[1, 5, 9]);
        let b = c.encode(&[1, 6, 7]);
        let d = c.encode(&[2, 3, 4]);
        assert!(a < b && b < d);
        assert_eq!(c.decode(b, 3), vec![1, 6, 7]);
        assert!(VertexCodec::new(1 << 20, 4).is_err());
        assert!(VertexCodec::new(1, 8).is_ok());
    }

    #[test]
    fn two_points() {
        let s = validate_metric(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let f = build_vr_filtration(&s, 1, 2.0).unwrap();
        let all: Vec<_> = f.iter().map(|(_, s)| (s.vertices, s.value)).collect();
        assert_eq!(all, vec![(vec![0], 0.0), (vec![1], 0.0), (vec![0, 1], 1.0)]);
    }

    #[test]
    fn equilateral_triangle() {
        let s = validate_metric(&[
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ])
        .unwrap();
        let f = build_vr_filtration(&s, 2, 2.0).unwrap();
        assert_eq!((f.len_dim(0), f.len_dim(1), f.len_dim(2)), (3, 3, 1));
        assert_eq!(f.level(2)[0].value, 1.0);
        let order: Vec<usize> = f.global_order().iter().map(|id| id.dim).collect();
        assert_eq!(order, vec![0, 0, 0, 1, 1, 1, 2]);
    }

    #[test]
    fn four_point_circle() {
        let s = sample_circle(TAU, 4).unwrap().space;
        let f = build_vr_filtration(&s, 2, 3.2).unwrap();
        assert_eq!(f.len_dim(0), 4);
        let edges = f.level(1);
        assert_eq!(edges.iter().filter(|k| k.value == FRAC_PI_2).count(), 4);
        assert_eq!(edges.iter().filter(|k| k.value == PI).count(), 2);
        assert_eq!(f.len_dim(2), 4);
        assert!(f.level(2).iter().all(|k| k.value == PI));
        assert_eq!(f.len_dim(3), 0);
        assert_eq!(f.len(), 14);
    }

    #[test]
    fn threshold_truncates() {
        let s = sample_circle(TAU, 4).unwrap().space;
        let f = build_vr_filtration(&s, 2, 2.0).unwrap();
        assert_eq!((f.len_dim(1), f.len_dim(2)), (4, 0));
    }

    #[test]
    fn budget_is_enforced() {
        let s = sample_circle(TAU, 12).unwrap().space;
        let err = build_vr_filtration_with_budget(&s, 3, 10.0, 100).unwrap_err();
        assert_eq!(err, Error::SimplexBudgetExceeded { budget: 100 });
        // exactly at budget is fine: 12 + 66 + 220 simplices
        let f = build_vr_filtration_with_budget(&s, 2, 10.0, 298).unwrap();
        assert_eq!(f.len(), 298);
    }

    #[test]
    fn faces_precede_cofaces() {
        let s = crate::samplers::sample_sphere(2, 20, 3).unwrap().space;
        let f = build_vr_filtration(&s, 3, 1.5).unwrap();
        let order = f.global_order();
        let mut rank = std::collections::HashMap::new();
        for (i, id) in order.iter().enumerate() {
            rank.insert((id.dim, f.key(*id).code), i);
        }
        for (i, id) in order.iter().enumerate() {
            let simplex = f.simplex(*id);
            // value is the diameter
            let mut diam = 0.0f64;
            for a in 0..simplex.vertices.len() {
                for b in a + 1..simplex.vertices.len() {
                    diam =
                        diam.max(s.get(simplex.vertices[a] as usize, simplex.vertices[b] as usize));
                }
            }
            assert_eq!(diam, simplex.value);
            if id.dim == 0 {
                continue;
            }
            for skip in 0..simplex.vertices.len() {
                let face: Vec<u32> = simplex
                    .vertices
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != skip)
                    .map(|(_, &v)| v)
                    .collect();
                let r = rank[&(id.dim - 1, f.codec().encode(&face))];
                assert!(r < i);
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let s = sample_circle(TAU, 4).unwrap().space;
        assert!(build_vr_filtration(&s, 0, 1.0).is_err());
        assert!(build_vr_filtration(&s, 1, 0.0).is_err());
    }
}
