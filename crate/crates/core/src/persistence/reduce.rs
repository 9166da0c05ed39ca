//! Persistence pairing by column reduction with clearing.
//!
//! Degree 0 is union–find with the elder rule. Each higher degree reduces the
//! coboundary matrix: columns are the k-simplices in reverse filtration order,
//! the pivot of a column is its earliest (k+1)-coface, and k-simplices already
//! paired as deaths in degree k-1 are cleared without being reduced. Cofaces
//! are enumerated on demand from the distance matrix, and only the reduction
//! matrix is stored; reduced columns are rebuilt when needed. The pairing is
//! the same as the one produced by reducing the boundary matrix.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use super::filtration::{Filtration, SimplexId, SimplexKey, VertexCodec};
use super::{Barcode, EssentialClass, PersistencePair};
use crate::metric::FiniteMetricSpace;

struct Coboundary<'a> {
    space: &'a FiniteMetricSpace,
    codec: VertexCodec,
    threshold: f64,
    neighbors: Vec<Vec<u32>>,
    scratch: Vec<u32>,
    merged: Vec<u32>,
}

impl<'a> Coboundary<'a> {
    fn new(f: &'a Filtration) -> Self {
        let space = f.space();
        let n = space.len();
        let threshold = f.threshold();
        let neighbors = (0..n)
            .map(|v| {
                (0..n)
                    .filter(|&u| u != v && space.get(v, u) <= threshold)
                    .map(|u| u as u32)
                    .collect()
            })
            .collect();
        Coboundary {
            space,
            codec: f.codec(),
            threshold,
            neighbors,
            scratch: Vec::new(),
            merged: Vec::new(),
        }
    }

    /// Pushes every (k+1)-coface of the k-simplex `s` onto `heap`.
    fn push_cofaces(
        &mut self,
        s: SimplexKey,
        k: usize,
        heap: &mut BinaryHeap<Reverse<SimplexKey>>,
    ) {
        self.codec.decode_into(s.code, k + 1, &mut self.scratch);
        let pivot_vertex = *self
            .scratch
            .iter()
            .min_by_key(|&&v| self.neighbors[v as usize].len())
            .expect("simplex has vertices");
        for &w in &self.neighbors[pivot_vertex as usize] {
            let row = self.space.row(w as usize);
            let mut value = s.value;
            let mut ok = true;
            for &v in &self.scratch {
                if v == w {
                    ok = false;
                    break;
                }
                let dv = row[v as usize];
                if dv > self.threshold {
                    ok = false;
                    break;
                }
                value = value.max(dv);
            }
            if !ok {
                continue;
            }
            self.merged.clear();
            let at = self.scratch.partition_point(|&v| v < w);
            self.merged.extend_from_slice(&self.scratch[..at]);
            self.merged.push(w);
            self.merged.extend_from_slice(&self.scratch[at..]);
            heap.push(Reverse(SimplexKey {
                value,
                code: self.codec.encode(&self.merged),
            }));
        }
    }
}

/// Removes and returns the smallest entry with odd multiplicity, leaving it
/// in the heap so the heap still represents the column.
fn pivot(heap: &mut BinaryHeap<Reverse<SimplexKey>>) -> Option<SimplexKey> {
    while let Some(Reverse(top)) = heap.pop() {
        let mut odd = true;
        while heap.peek() == Some(&Reverse(top)) {
            heap.pop();
            odd = !odd;
        }
        if odd {
            heap.push(Reverse(top));
            return Some(top);
        }
    }
    None
}

fn find(parent: &mut [usize], mut v: usize) -> usize {
    while parent[v] != v {
        parent[v] = parent[parent[v]];
        v = parent[v];
    }
    v
}

/// Z/2 persistence of `f` in degrees `0..f.maxdim()`.
pub fn reduce(f: &Filtration) -> Barcode {
    let mut out = Barcode::empty(f.maxdim(), f.threshold());
    let n = f.len_dim(0);
    if n == 0 {
        return out;
    }
    let codec = f.codec();

    // degree 0
    let mut cleared = vec![false; f.len_dim(1)];
    let mut parent: Vec<usize> = (0..n).collect();
    let mut verts = Vec::with_capacity(2);
    for (pos, edge) in f.level(1).iter().enumerate() {
        codec.decode_into(edge.code, 2, &mut verts);
        let ru = find(&mut parent, verts[0] as usize);
        let rv = find(&mut parent, verts[1] as usize);
        if ru == rv {
            continue;
        }
        let (older, younger) = (ru.min(rv), ru.max(rv));
        parent[younger] = older;
        cleared[pos] = true;
        out.pairs.push(PersistencePair {
            dim: 0,
            birth: 0.0,
            death: edge.value,
            birth_simplex: SimplexId {
                dim: 0,
                pos: younger,
            },
            death_simplex: SimplexId { dim: 1, pos },
        });
    }
    for v in 0..n {
        if find(&mut parent, v) == v {
            out.essentials.push(EssentialClass {
                dim: 0,
                birth: 0.0,
                simplex: SimplexId { dim: 0, pos: v },
            });
        }
    }

    let mut cob = Coboundary::new(f);
    for k in 1..f.maxdim() {
        let level = f.level(k);
        let mut next_cleared = vec![false; f.len_dim(k + 1)];
        let mut pivot_owner: HashMap<u64, u32> = HashMap::new();
        // reduction-matrix columns, stored flat
        let mut v_start: Vec<usize> = vec![0];
        let mut v_entries: Vec<SimplexKey> = Vec::new();
        let mut heap: BinaryHeap<Reverse<SimplexKey>> = BinaryHeap::new();
        let mut v_work: Vec<SimplexKey> = Vec::new();

        for pos in (0..level.len()).rev() {
            if cleared[pos] {
                continue;
            }
            let sigma = level[pos];
            heap.clear();
            v_work.clear();
            v_work.push(sigma);
            cob.push_cofaces(sigma, k, &mut heap);
            loop {
                match pivot(&mut heap) {
                    None => {
                        out.essentials.push(EssentialClass {
                            dim: k,
                            birth: sigma.value,
                            simplex: SimplexId { dim: k, pos },
                        });
                        break;
                    }
                    Some(tau) => {
                        if let Some(&j) = pivot_owner.get(&tau.code) {
                            let j = j as usize;
                            for s in &v_entries[v_start[j]..v_start[j + 1]] {
                                cob.push_cofaces(*s, k, &mut heap);
                                v_work.push(*s);
                            }
                            continue;
                        }
                        let death_pos = f
                            .position(k + 1, tau)
                            .expect("coface lies in the filtration");
                        next_cleared[death_pos] = true;
                        if tau.value > sigma.value {
                            out.pairs.push(PersistencePair {
                                dim: k,
                                birth: sigma.value,
                                death: tau.value,
                                birth_simplex: SimplexId { dim: k, pos },
                                death_simplex: SimplexId {
                                    dim: k + 1,
                                    pos: death_pos,
                                },
                            });
                        } else {
                            out.zero_length += 1;
                        }
                        pivot_owner.insert(tau.code, (v_start.len() - 1) as u32);
                        v_work.sort_unstable();
                        let mut i = 0;
                        while i < v_work.len() {
                            let mut j = i;
                            while j < v_work.len() && v_work[j] == v_work[i] {
                                j += 1;
                            }
                            if (j - i) % 2 == 1 {
                                v_entries.push(v_work[i]);
                            }
                            i = j;
                        }
                        v_start.push(v_entries.len());
                        break;
                    }
                }
            }
        }
        cleared = next_cleared;
    }
    out.canonicalize();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::validate_metric;
    use crate::persistence::build_vr_filtration;
    use crate::samplers::sample_circle;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    #[test]
    fn two_points() {
        let s = validate_metric(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let b = reduce(&build_vr_filtration(&s, 1, 2.0).unwrap());
        assert_eq!(b.pairs.len(), 1);
        assert_eq!(
            (b.pairs[0].dim, b.pairs[0].birth, b.pairs[0].death),
            (0, 0.0, 1.0)
        );
        assert_eq!(b.essentials.len(), 1);
        assert_eq!((b.essentials[0].dim, b.essentials[0].birth), (0, 0.0));
    }

    #[test]
    fn equilateral_triangle_has_no_h1() {
        let s = validate_metric(&[
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ])
        .unwrap();
        let b = reduce(&build_vr_filtration(&s, 2, 2.0).unwrap());
        assert_eq!(b.pairs_in(1).count(), 0);
        assert_eq!(b.essentials_in(1).count(), 0);
        assert_eq!(b.zero_length, 1);
    }

    #[test]
    fn four_point_circle_h1() {
        let s = sample_circle(TAU, 4).unwrap().space;
        let b = reduce(&build_vr_filtration(&s, 2, 3.2).unwrap());
        let h1: Vec<_> = b.pairs_in(1).map(|p| (p.birth, p.death)).collect();
        assert_eq!(h1, vec![(FRAC_PI_2, PI)]);
        assert_eq!(b.essentials_in(1).count(), 0);
    }

    #[test]
    fn single_point() {
        let s = validate_metric(&[vec![0.0]]).unwrap();
        let b = reduce(&build_vr_filtration(&s, 2, 1.0).unwrap());
        assert!(b.pairs.is_empty());
        assert_eq!(b.essentials.len(), 1);
    }

    #[test]
    fn pivot_cancels_pairs() {
        let k = |v: f64, c: u64| Reverse(SimplexKey { value: v, code: c });
        let mut heap: BinaryHeap<_> = vec![k(1.0, 1), k(1.0, 1), k(2.0, 0), k(3.0, 5)].into();
        assert_eq!(
            pivot(&mut heap),
            Some(SimplexKey {
                value: 2.0,
                code: 0
            })
        );
        assert_eq!(heap.len(), 2);
        let mut heap: BinaryHeap<_> = vec![k(1.0, 1), k(1.0, 1)].into();
        assert_eq!(pivot(&mut heap), None);
    }
}
