//! Seeded random matrices and states.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use super::eigen::HermitianMatrix;
use super::matrix::{vec_norm, CMatrix, C64};

pub type SeededRng = ChaCha20Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Matrix with i.i.d. complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

pub fn random_matrix(rows: usize, cols: usize, seed: u64) -> CMatrix {
    ginibre(rows, cols, &mut rng_from_seed(seed))
}

pub fn random_hermitian(n: usize, seed: u64) -> HermitianMatrix {
    HermitianMatrix::from_hermitian_part(&random_matrix(n, n, seed))
}

/// Haar-random unit vector.
pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n).map(|_| complex_normal(rng)).collect();
        let norm = vec_norm(&v);
        if norm > 1e-8 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Haar-random unitary via Gram–Schmidt on a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(n, n, rng);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut c = g.col(j);
        for _ in 0..2 {
            for q in &cols {
                let proj: C64 = q.iter().zip(&c).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in c.iter_mut().zip(q) {
                    *x -= proj * y;
                }
            }
        }
        let norm = vec_norm(&c);
        cols.push(c.into_iter().map(|z| z / norm).collect());
    }
    CMatrix::from_cols(n, &cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_is_unitary() {
        let u = random_unitary(5, &mut rng_from_seed(4));
        assert!((&(&u.adjoint() * &u) - &CMatrix::identity(5)).max_abs() < 1e-12);
    }

    #[test]
    fn deterministic() {
        assert_eq!(random_matrix(3, 3, 8), random_matrix(3, 3, 8));
        assert_ne!(random_matrix(3, 3, 8), random_matrix(3, 3, 9));
    }
}
