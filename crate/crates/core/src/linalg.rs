//! Dense complex Hermitian eigensolver (cyclic Jacobi).
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary, then applies the real symmetric Jacobi rotation that zeroes it.
//! Sizes here stay below a few hundred, where cyclic Jacobi is fast enough
//! and gives eigenvectors orthonormal to machine precision.

use num_complex::Complex64;

use crate::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Row-major square complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        Self { n, data: (0..n * n).map(|k| f(k / n, k % n)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    /// Largest `|a_ij - conj(a_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in i..self.n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n).map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum()).collect()
    }

    fn off_diagonal_norm_sqr(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    s += self[(i, j)].norm_sqr();
                }
            }
        }
        s
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// Eigenpairs sorted by descending eigenvalue.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    /// `vectors[k]` is the normalised eigenvector of `values[k]`, with its
    /// largest-magnitude component real and positive.
    pub vectors: Vec<Vec<Complex64>>,
    /// `max_k ||A v_k - lambda_k v_k||_2`.
    pub max_residual: f64,
}

pub fn hermitian_eigen(a: &CMatrix) -> Result<Eigen> {
    let n = a.dim();
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    let defect = a.hermitian_defect();
    if defect > 1e-12 * scale {
        return Err(Error::NotHermitian { asymmetry: defect });
    }
    let mut m = a.clone();
    for i in 0..n {
        m[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
    }
    let mut v = CMatrix::identity(n);
    let total: f64 = m.data.iter().map(|z| z.norm_sqr()).sum();
    let target = (f64::EPSILON * f64::EPSILON) * total;

    for _ in 0..MAX_SWEEPS {
        if m.off_diagonal_norm_sqr() <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| m[(y, y)].re.total_cmp(&m[(x, x)].re));
    let values: Vec<f64> = order.iter().map(|&k| m[(k, k)].re).collect();
    let vectors: Vec<Vec<Complex64>> = order.iter().map(|&k| fix_phase(v.column(k))).collect();
    let max_residual = values
        .iter()
        .zip(&vectors)
        .map(|(&lam, vec)| {
            a.mul_vec(vec).iter().zip(vec).map(|(av, x)| (av - x * lam).norm_sqr()).sum::<f64>().sqrt()
        })
        .fold(0.0, f64::max);
    Ok(Eigen { values, vectors, max_residual })
}

fn rotate(m: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let h = apq.norm();
    if h == 0.0 {
        return;
    }
    let (app, aqq) = (m[(p, p)].re, m[(q, q)].re);
    // real Jacobi angle for [[app, h], [h, aqq]]
    let tau = (aqq - app) / (2.0 * h);
    let t = if tau.is_finite() { tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt()) } else { 0.0 };
    if t == 0.0 {
        return;
    }
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // U = diag(1, e^{-i phi}) * [[c, s], [-s, c]]
    let ephi = apq / h;
    let u_qp = -ephi.conj() * s;
    let u_qq = ephi.conj() * c;
    let n = m.dim();
    // columns: A <- A U
    for k in 0..n {
        let (akp, akq) = (m[(k, p)], m[(k, q)]);
        m[(k, p)] = akp * c + akq * u_qp;
        m[(k, q)] = akp * s + akq * u_qq;
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * c + vkq * u_qp;
        v[(k, q)] = vkp * s + vkq * u_qq;
    }
    // rows: A <- U^H A
    for k in 0..n {
        let (apk, aqk) = (m[(p, k)], m[(q, k)]);
        m[(p, k)] = apk * c + aqk * u_qp.conj();
        m[(q, k)] = apk * s + aqk * u_qq.conj();
    }
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);
}

fn fix_phase(mut vec: Vec<Complex64>) -> Vec<Complex64> {
    let pivot = vec
        .iter()
        .copied()
        .max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()))
        .unwrap_or(Complex64::new(1.0, 0.0));
    if pivot.norm() > 0.0 {
        let rot = pivot.conj() / pivot.norm();
        for z in &mut vec {
            *z *= rot;
        }
    }
    vec
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(rng.random_range(-5.0..5.0), 0.0);
            for j in i + 1..n {
                let z = Complex64::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    fn reconstruct(e: &Eigen) -> CMatrix {
        let n = e.values.len();
        CMatrix::from_fn(n, |i, j| {
            e.values.iter().zip(&e.vectors).map(|(&l, v)| v[i] * v[j].conj() * l).sum()
        })
    }

    #[test]
    fn diagonal_input() {
        let mut m = CMatrix::zeros(4);
        for (i, v) in [30.0, 450.0, 0.0, 20.0].into_iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        let e = hermitian_eigen(&m).unwrap();
        assert_eq!(e.values, vec![450.0, 30.0, 20.0, 0.0]);
        assert_eq!(e.vectors[0][1], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMatrix::identity(3);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(hermitian_eigen(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn two_by_two_closed_form() {
        // [[2, 1-i], [1+i, 3]] has eigenvalues 4 and 1
        let m = CMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 0) => Complex64::new(2.0, 0.0),
            (1, 1) => Complex64::new(3.0, 0.0),
            (0, 1) => Complex64::new(1.0, -1.0),
            _ => Complex64::new(1.0, 1.0),
        });
        let e = hermitian_eigen(&m).unwrap();
        assert!((e.values[0] - 4.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn larger_matrices_converge() {
        for n in [30, 80, 130] {
            let m = random_hermitian(n, n as u64);
            let e = hermitian_eigen(&m).unwrap();
            assert!(e.max_residual < 1e-10 * m.max_abs() * n as f64, "n = {n}: {}", e.max_residual);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn spectral_reconstruction(seed in any::<u64>(), n in 1usize..9) {
            let m = random_hermitian(n, seed);
            let e = hermitian_eigen(&m).unwrap();
            let r = reconstruct(&e);
            for i in 0..n {
                for j in 0..n {
                    prop_assert!((r[(i, j)] - m[(i, j)]).norm() < 1e-9);
                }
            }
            prop_assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
            for a in 0..n {
                for b in 0..n {
                    let dot: Complex64 = e.vectors[a].iter().zip(&e.vectors[b]).map(|(x, y)| x.conj() * y).sum();
                    let target = if a == b { 1.0 } else { 0.0 };
                    prop_assert!((dot - target).norm() < 1e-10);
                }
            }
        }
    }
}
