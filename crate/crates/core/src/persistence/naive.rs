//! Textbook left-to-right reduction of the full boundary matrix. Serves as
//! the reference for [`super::reduce`]; quadratic memory, small inputs only.

use std::collections::HashMap;

use super::filtration::Filtration;
use super::{Barcode, EssentialClass, PersistencePair};

fn add_columns(target: &mut Vec<usize>, other: &[usize]) {
    let mut out = Vec::with_capacity(target.len() + other.len());
    let (mut i, mut j) = (0, 0);
    while i < target.len() && j < other.len() {
        match target[i].cmp(&other[j]) {
            std::cmp::Ordering::Less => {
                out.push(target[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(other[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&target[i..]);
    out.extend_from_slice(&other[j..]);
    *target = out;
}

pub fn reduce_naive(f: &Filtration) -> Barcode {
    let mut out = Barcode::empty(f.maxdim(), f.threshold());
    let order = f.global_order();
    let total = order.len();
    let codec = f.codec();
    let index: HashMap<(usize, u64), usize> = order
        .iter()
        .enumerate()
        .map(|(i, id)| ((id.dim, f.key(*id).code), i))
        .collect();

    let mut columns: Vec<Vec<usize>> = Vec::with_capacity(total);
    for id in &order {
        let mut col = Vec::new();
        if id.dim > 0 {
            let vertices = codec.decode(f.key(*id).code, id.dim + 1);
            for skip in 0..vertices.len() {
                let face: Vec<u32> = vertices
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != skip)
                    .map(|(_, &v)| v)
                    .collect();
                col.push(index[&(id.dim - 1, codec.encode(&face))]);
            }
            col.sort_unstable();
        }
        columns.push(col);
    }

    let mut low_owner = vec![usize::MAX; total];
    let mut killed = vec![false; total];
    for j in 0..total {
        while let Some(&low) = columns[j].last() {
            let owner = low_owner[low];
            if owner == usize::MAX {
                break;
            }
            let other = columns[owner].clone();
            add_columns(&mut columns[j], &other);
        }
        if let Some(&low) = columns[j].last() {
            low_owner[low] = j;
            killed[low] = true;
            let (birth_id, death_id) = (order[low], order[j]);
            let (birth, death) = (f.value(birth_id), f.value(death_id));
            if death > birth {
                out.pairs.push(PersistencePair {
                    dim: birth_id.dim,
                    birth,
                    death,
                    birth_simplex: birth_id,
                    death_simplex: death_id,
                });
            } else {
                out.zero_length += 1;
            }
        }
    }
    for (i, id) in order.iter().enumerate() {
        let positive = columns[i].is_empty();
        if positive && !killed[i] && id.dim < f.maxdim() {
            out.essentials.push(EssentialClass {
                dim: id.dim,
                birth: f.value(*id),
                simplex: *id,
            });
        }
    }
    out.canonicalize();
    out
}
