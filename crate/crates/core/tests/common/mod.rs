//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use filtertop::{Barcode64, Interval, PointCloud64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_cloud(rng: &mut impl Rng, n: usize, d: usize) -> PointCloud64 {
    let data = (0..n * d).map(|_| rng.random::<f64>()).collect();
    PointCloud64::from_flat(d, data).unwrap()
}

pub fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Euclidean distance matrix after scaling column `j` by `weights[j]`.
pub fn weighted_distances(cloud: &PointCloud64, weights: Option<&[f64]>) -> Vec<Vec<f64>> {
    let rows: Vec<Vec<f64>> = cloud
        .points()
        .map(|p| match weights {
            Some(w) => p.iter().zip(w).map(|(x, s)| x * s).collect(),
            None => p.to_vec(),
        })
        .collect();
    rows.iter().map(|a| rows.iter().map(|b| euclid(a, b)).collect()).collect()
}

pub fn column_variances(cloud: &PointCloud64) -> Vec<f64> {
    let n = cloud.len() as f64;
    (0..cloud.dim())
        .map(|j| {
            let mean = cloud.points().map(|p| p[j]).sum::<f64>() / n;
            cloud.points().map(|p| (p[j] - mean).powi(2)).sum::<f64>() / n
        })
        .collect()
}

/// Full-boundary-matrix persistence of the Rips complex up to triangles,
/// truncated at `scale`, by the textbook left-to-right column reduction.
pub fn oracle_barcode(dist: &[Vec<f64>], scale: f64, keep_zero_length: bool) -> Barcode64 {
    let n = dist.len();
    // (value, dimension, vertices)
    let mut simplices: Vec<(f64, usize, Vec<usize>)> = (0..n).map(|i| (0.0, 0, vec![i])).collect();
    for a in 0..n {
        for b in a + 1..n {
            if dist[a][b] <= scale {
                simplices.push((dist[a][b], 1, vec![a, b]));
            }
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let v = dist[a][b].max(dist[a][c]).max(dist[b][c]);
                if dist[a][b] <= scale && dist[a][c] <= scale && dist[b][c] <= scale {
                    simplices.push((v, 2, vec![a, b, c]));
                }
            }
        }
    }
    simplices.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap().then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let index: std::collections::HashMap<Vec<usize>, usize> =
        simplices.iter().enumerate().map(|(i, s)| (s.2.clone(), i)).collect();

    let mut columns: Vec<Vec<usize>> = simplices
        .iter()
        .map(|(_, dim, v)| {
            let mut col: Vec<usize> = if *dim == 0 {
                vec![]
            } else {
                (0..v.len())
                    .map(|skip| {
                        let face: Vec<usize> =
                            v.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &x)| x).collect();
                        index[&face]
                    })
                    .collect()
            };
            col.sort_unstable();
            col
        })
        .collect();

    let mut low_owner: std::collections::HashMap<usize, usize> = Default::default();
    let mut paired = vec![false; simplices.len()];
    let mut bars = Barcode64::default();
    for j in 0..columns.len() {
        while let Some(&low) = columns[j].last() {
            match low_owner.get(&low) {
                Some(&k) => {
                    let other = columns[k].clone();
                    let mut merged: Vec<usize> = columns[j].iter().copied().filter(|x| !other.contains(x)).collect();
                    merged.extend(other.iter().copied().filter(|x| !columns[j].contains(x)));
                    merged.sort_unstable();
                    columns[j] = merged;
                }
                None => break,
            }
        }
        if let Some(&low) = columns[j].last() {
            low_owner.insert(low, j);
            paired[low] = true;
            paired[j] = true;
            let (birth, death) = (simplices[low].0, simplices[j].0);
            if keep_zero_length || death > birth {
                let interval = Interval::new(birth, death);
                match simplices[low].1 {
                    0 => bars.dim0.push(interval),
                    1 => bars.dim1.push(interval),
                    _ => {}
                }
            }
        }
    }
    for (i, s) in simplices.iter().enumerate() {
        if !paired[i] {
            match s.1 {
                0 => bars.dim0.push(Interval::infinite(s.0)),
                1 => bars.dim1.push(Interval::infinite(s.0)),
                _ => {}
            }
        }
    }
    bars
}

fn sorted(v: &[Interval<f64>]) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = v.iter().map(|i| (i.birth, i.death)).collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

/// Interval-for-interval comparison of two barcodes within `tol`.
pub fn barcodes_match(a: &Barcode64, b: &Barcode64, tol: f64) -> Result<(), String> {
    for dim in 0..2 {
        let (x, y) = (sorted(a.dim(dim)), sorted(b.dim(dim)));
        if x.len() != y.len() {
            return Err(format!("dim {dim}: {} vs {} intervals", x.len(), y.len()));
        }
        for (p, q) in x.iter().zip(&y) {
            let close = |u: f64, v: f64| (u.is_infinite() && u == v) || (u - v).abs() <= tol;
            if !close(p.0, q.0) || !close(p.1, q.1) {
                return Err(format!("dim {dim}: {p:?} vs {q:?}"));
            }
        }
    }
    Ok(())
}

/// Density filtration by full sorting of every distance row.
pub fn oracle_filtration(dist: &[Vec<f64>], k: usize, m: usize) -> Vec<usize> {
    let n = dist.len();
    let knn: Vec<f64> = (0..n)
        .map(|i| {
            let mut row: Vec<(f64, usize)> = (0..n).filter(|&j| j != i).map(|j| (dist[i][j], j)).collect();
            row.sort_by(|a, b| a.partial_cmp(b).unwrap());
            row[k - 1].0
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| knn[a].partial_cmp(&knn[b]).unwrap().then(a.cmp(&b)));
    let mut kept = order[..m].to_vec();
    kept.sort_unstable();
    kept
}
