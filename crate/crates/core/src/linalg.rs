//! Dense symmetric eigendecomposition (cyclic Jacobi rotations).

use crate::scalar::{cmp_scalar, Scalar};

/// Eigenpairs of a symmetric matrix, sorted by descending eigenvalue.
#[derive(Clone, Debug)]
pub(crate) struct SymmetricEigen<T> {
    pub values: Vec<T>,
    /// `vectors[k]` is the unit eigenvector for `values[k]`.
    pub vectors: Vec<Vec<T>>,
}

/// `matrix` is row-major `dim × dim` and must be symmetric.
///
/// Each eigenvector is sign-normalized so that its largest-magnitude entry
/// (first one on ties) is positive.
pub(crate) fn symmetric_eigen<T: Scalar>(matrix: &[T], dim: usize) -> SymmetricEigen<T> {
    assert_eq!(matrix.len(), dim * dim);
    let mut a = matrix.to_vec();
    let mut v = vec![T::zero(); dim * dim];
    for i in 0..dim {
        v[i * dim + i] = T::one();
    }

    let scale = a.iter().fold(T::zero(), |acc, x| acc.max(x.abs()));
    let tiny = T::min_positive_value();
    for _sweep in 0..100 {
        let mut off = T::zero();
        for p in 0..dim {
            for q in (p + 1)..dim {
                off = off + a[p * dim + q] * a[p * dim + q];
            }
        }
        if off.sqrt() <= T::epsilon() * scale * T::of(1e-3) || off <= tiny {
            break;
        }
        for p in 0..dim {
            for q in (p + 1)..dim {
                let apq = a[p * dim + q];
                if apq == T::zero() {
                    continue;
                }
                let app = a[p * dim + p];
                let aqq = a[q * dim + q];
                let theta = (aqq - app) / (T::of(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..dim {
                    let akp = a[k * dim + p];
                    let akq = a[k * dim + q];
                    a[k * dim + p] = c * akp - s * akq;
                    a[k * dim + q] = s * akp + c * akq;
                }
                for k in 0..dim {
                    let apk = a[p * dim + k];
                    let aqk = a[q * dim + k];
                    a[p * dim + k] = c * apk - s * aqk;
                    a[q * dim + k] = s * apk + c * aqk;
                }
                for k in 0..dim {
                    let vkp = v[k * dim + p];
                    let vkq = v[k * dim + q];
                    v[k * dim + p] = c * vkp - s * vkq;
                    v[k * dim + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| cmp_scalar(a[j * dim + j], a[i * dim + i]).then(i.cmp(&j)));
    let values = order.iter().map(|&k| a[k * dim + k]).collect();
    let vectors = order
        .iter()
        .map(|&k| {
            let mut col: Vec<T> = (0..dim).map(|r| v[r * dim + k]).collect();
            let mut lead = 0;
            for (r, x) in col.iter().enumerate() {
                if x.abs() > col[lead].abs() {
                    lead = r;
                }
            }
            if col[lead] < T::zero() {
                col.iter_mut().for_each(|x| *x = -*x);
            }
            col
        })
        .collect();
    SymmetricEigen { values, vectors }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix_sorted_descending() {
        let m = [1.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0, 2.0];
        let e = symmetric_eigen(&m, 3);
        assert_eq!(e.values, vec![3.0, 2.0, 1.0]);
        assert_eq!(e.vectors[0], vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn two_by_two_rotation() {
        // eigenvalues 3 and 1 with vectors (1,1)/√2 and (1,-1)/√2
        let m = [2.0f64, 1.0, 1.0, 2.0];
        let e = symmetric_eigen(&m, 2);
        assert!((e.values[0] - 3.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((e.vectors[0][0] - h).abs() < 1e-14 && (e.vectors[0][1] - h).abs() < 1e-14);
        // sign rule: first entry wins the magnitude tie, so it is positive
        assert!((e.vectors[1][0] - h).abs() < 1e-14 && (e.vectors[1][1] + h).abs() < 1e-14);
    }
}
