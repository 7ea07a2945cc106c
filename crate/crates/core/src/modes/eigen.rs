//! Cyclic Jacobi eigensolver for dense complex Hermitian matrices.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{invalid, CatsimError, Result};

/// Off-diagonal Frobenius mass at which iteration stops.
pub const JACOBI_TOLERANCE: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigenvalues (ascending) and the unitary whose columns are eigenvectors.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Array2<C64>,
}

fn off_diagonal_mass(a: &Array2<C64>) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Diagonalizes a Hermitian matrix. Only the Hermitian part of `a` is used.
pub fn hermitian_eigen(a: &Array2<C64>, tolerance: f64, max_sweeps: usize) -> Result<HermitianEigen> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(invalid(format!("matrix is {}x{}, expected square", n, a.ncols())));
    }
    let mut m = Array2::<C64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
        }
    }
    let mut v = Array2::<C64>::eye(n);

    let mut sweeps = 0;
    let mut off = off_diagonal_mass(&m);
    while off > tolerance {
        if sweeps == max_sweeps {
            return Err(CatsimError::NoConvergence { sweeps, off });
        }
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                // negligible against both diagonal entries: the rotation is a no-op in f64
                let g = 100.0 * mag;
                if sweeps > 4 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    m[(p, q)] = C64::new(0.0, 0.0);
                    m[(q, p)] = C64::new(0.0, 0.0);
                    continue;
                }
                rotated = true;
                let phase = apq / mag;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // W = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] on (p, q); m <- W† m W
                let pc = phase.conj();
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = mkp * c - mkq * pc * s;
                    m[(k, q)] = mkp * s + mkq * pc * c;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = mpk * c - mqk * phase * s;
                    m[(q, k)] = mpk * s + mqk * phase * c;
                }
                m[(p, q)] = C64::new(0.0, 0.0);
                m[(q, p)] = C64::new(0.0, 0.0);
                m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * pc * s;
                    v[(k, q)] = vkp * s + vkq * pc * c;
                }
            }
        }
        off = off_diagonal_mass(&m);
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let mut vectors = Array2::<C64>::zeros((n, n));
    for (col, &i) in order.iter().enumerate() {
        vectors.column_mut(col).assign(&v.column(i));
    }
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(a: &Array2<C64>) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(a, JACOBI_TOLERANCE, JACOBI_MAX_SWEEPS)?.values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> Array2<C64> {
        let mut a = Array2::<C64>::zeros((n, n));
        for i in 0..n {
            a[(i, i)] = C64::new(rng.random_range(-1.0..1.0), 0.0);
            for j in (i + 1)..n {
                let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                a[(i, j)] = z;
                a[(j, i)] = z.conj();
            }
        }
        a
    }

    #[test]
    fn reconstructs_random_hermitian_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 2, 5, 17, 40] {
            let a = random_hermitian(n, &mut rng);
            let e = hermitian_eigen(&a, JACOBI_TOLERANCE, JACOBI_MAX_SWEEPS).unwrap();
            let v = &e.vectors;
            // A V = V Λ and V†V = I
            let av = a.dot(v);
            for i in 0..n {
                for k in 0..n {
                    assert!((av[(i, k)] - v[(i, k)] * e.values[k]).norm() < 1e-10);
                }
            }
            let vhv = v.t().mapv(|z| z.conj()).dot(v);
            for i in 0..n {
                for k in 0..n {
                    let expect = if i == k { 1.0 } else { 0.0 };
                    assert!((vhv[(i, k)] - C64::new(expect, 0.0)).norm() < 1e-12);
                }
            }
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
            let trace: f64 = (0..n).map(|i| a[(i, i)].re).sum();
            assert!((trace - e.values.iter().sum::<f64>()).abs() < 1e-10);
        }
    }

    #[test]
    fn known_spectrum() {
        // Pauli-Y has eigenvalues ±1
        let mut a = Array2::<C64>::zeros((2, 2));
        a[(0, 1)] = C64::new(0.0, -1.0);
        a[(1, 0)] = C64::new(0.0, 1.0);
        let vals = hermitian_eigenvalues(&a).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_square() {
        assert!(hermitian_eigen(&Array2::zeros((2, 3)), 1e-12, 10).is_err());
    }
}
