use crate::Scalar;

/// Eigen-decomposition of a symmetric `d × d` matrix (row-major) by cyclic
/// Jacobi rotations. Returns eigenvalues in ascending order and the matching
/// unit eigenvectors as columns of a row-major matrix.
pub fn symmetric_eigen<F: Scalar>(a: &[F], d: usize) -> (Vec<F>, Vec<F>) {
    assert_eq!(a.len(), d * d);
    let mut m = a.to_vec();
    let mut v = vec![F::zero(); d * d];
    for i in 0..d {
        v[i * d + i] = F::one();
    }
    let two = F::lit(2.0);
    for _sweep in 0..64 {
        let off: F = (0..d)
            .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
            .fold(F::zero(), |s, (i, j)| s + m[i * d + j] * m[i * d + j]);
        let diag: F = (0..d).fold(F::zero(), |s, i| s + m[i * d + i] * m[i * d + i]);
        if off <= F::epsilon() * F::epsilon() * diag || off == F::zero() {
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                let apq = m[p * d + q];
                if apq == F::zero() {
                    continue;
                }
                let theta = (m[q * d + q] - m[p * d + p]) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + F::one()).sqrt());
                let c = F::one() / (t * t + F::one()).sqrt();
                let s = t * c;
                for k in 0..d {
                    let mkp = m[k * d + p];
                    let mkq = m[k * d + q];
                    m[k * d + p] = c * mkp - s * mkq;
                    m[k * d + q] = s * mkp + c * mkq;
                }
                for k in 0..d {
                    let mpk = m[p * d + k];
                    let mqk = m[q * d + k];
                    m[p * d + k] = c * mpk - s * mqk;
                    m[q * d + k] = s * mpk + c * mqk;
                }
                for k in 0..d {
                    let vkp = v[k * d + p];
                    let vkq = v[k * d + q];
                    v[k * d + p] = c * vkp - s * vkq;
                    v[k * d + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| m[i * d + i].partial_cmp(&m[j * d + j]).unwrap());
    let values = order.iter().map(|&i| m[i * d + i]).collect();
    let mut vectors = vec![F::zero(); d * d];
    for (new, &old) in order.iter().enumerate() {
        for k in 0..d {
            vectors[k * d + new] = v[k * d + old];
        }
    }
    (values, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonalizes_known_matrix() {
        // [[2,1],[1,2]] has eigenvalues 1, 3.
        let (vals, vecs) = symmetric_eigen(&[2.0f64, 1.0, 1.0, 2.0], 2);
        assert!((vals[0] - 1.0).abs() < 1e-14 && (vals[1] - 3.0).abs() < 1e-14);
        let r = 0.5f64.sqrt();
        assert!((vecs[0].abs() - r).abs() < 1e-12);
    }

    #[test]
    fn reconstructs_random_symmetric() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for d in 1..6 {
            let mut a = vec![0.0f64; d * d];
            for i in 0..d {
                for j in i..d {
                    let x: f64 = rng.gen_range(-2.0..2.0);
                    a[i * d + j] = x;
                    a[j * d + i] = x;
                }
            }
            let (vals, v) = symmetric_eigen(&a, d);
            for i in 0..d {
                for j in 0..d {
                    let r: f64 = (0..d).map(|k| v[i * d + k] * vals[k] * v[j * d + k]).sum();
                    assert!((r - a[i * d + j]).abs() < 1e-10);
                }
            }
        }
    }
}
