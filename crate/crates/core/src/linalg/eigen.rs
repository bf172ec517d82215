use serde::{Deserialize, Serialize};

use super::matrix::{CMatrix, C64, ZERO};
use crate::error::{Error, Result};
use crate::tol::Tolerances;

/// Square matrix that equals its conjugate transpose.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CMatrix", into = "CMatrix")]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    /// Validates Hermiticity to `1e-12` relative to the largest entry,
    /// then symmetrises away the residual.
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension(format!("{}x{} is not square", m.rows(), m.cols())));
        }
        if m.rows() == 0 {
            return Err(Error::Dimension("empty matrix".into()));
        }
        if !m.is_finite() {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        let dev = m.hermitian_deviation();
        if dev > 1e-12 * m.max_abs().max(1.0) {
            return Err(Error::NotHermitian { deviation: dev });
        }
        Ok(Self(m.hermitian_part()))
    }

    /// Takes the Hermitian part without checking.
    pub fn from_hermitian_part(m: &CMatrix) -> Self {
        Self(m.hermitian_part())
    }

    pub fn from_real_diag(d: &[f64]) -> Self {
        Self(CMatrix::from_diag(d))
    }

    pub fn identity(n: usize) -> Self {
        Self(CMatrix::identity(n))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }
}

impl TryFrom<CMatrix> for HermitianMatrix {
    type Error = Error;
    fn try_from(m: CMatrix) -> Result<Self> {
        Self::new(m)
    }
}

impl From<HermitianMatrix> for CMatrix {
    fn from(h: HermitianMatrix) -> CMatrix {
        h.0
    }
}

impl AsRef<CMatrix> for HermitianMatrix {
    fn as_ref(&self) -> &CMatrix {
        &self.0
    }
}

/// Spectral decomposition `m = V diag(values) V†` with ascending values.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Eigh {
    /// `V diag(f(λ)) V†` for complex-valued `f`.
    pub fn apply(&self, f: impl Fn(f64) -> C64) -> CMatrix {
        let v = &self.vectors;
        let n = v.rows();
        let fl: Vec<C64> = self.values.iter().map(|&l| f(l)).collect();
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = ZERO;
                for k in 0..fl.len() {
                    acc += v[(i, k)] * fl[k] * v[(j, k)].conj();
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.apply(|l| C64::new(l, 0.0))
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

const MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigensolver for Hermitian matrices.
pub fn eigh(m: &HermitianMatrix) -> Result<Eigh> {
    eigh_raw(m.as_matrix())
}

/// Jacobi on a matrix assumed Hermitian (only used internally where the
/// caller guarantees the structure).
pub(crate) fn eigh_raw(m: &CMatrix) -> Result<Eigh> {
    let n = m.rows();
    let mut a = m.hermitian_part().into_vec();
    let mut v = CMatrix::identity(n).into_vec();
    let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if scale == 0.0 {
        return Ok(Eigh { values: vec![0.0; n], vectors: CMatrix::identity(n) });
    }
    let off = |a: &[C64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += a[i * n + j].norm_sqr();
            }
        }
        (2.0 * s).sqrt()
    };
    let target = f64::EPSILON * scale * 0.5;
    let mut sweeps = 0;
    loop {
        let residual = off(&a);
        if residual <= target {
            break;
        }
        if sweeps >= MAX_SWEEPS {
            // Accept a residual within reconstruction tolerance; reject otherwise.
            if residual <= 1e-12 * scale {
                break;
            }
            return Err(Error::NoConvergence { method: "Jacobi eigensolver", residual });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let r = apq.norm();
                if r <= f64::MIN_POSITIVE || r < 1e-300 {
                    continue;
                }
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                // Skip rotations that cannot change the diagonal in floating point.
                if sweeps > 4 && r < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
                    a[p * n + q] = ZERO;
                    a[q * n + p] = ZERO;
                    continue;
                }
                let e = apq / r;
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let se = e * s;
                let sec = se.conj();
                // a ← a U with U = [[c, s e], [-s ē, c]] on columns p, q
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * c - akq * sec;
                    a[k * n + q] = akp * se + akq * c;
                }
                // a ← U† a on rows p, q
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = apk * c - aqk * se;
                    a[q * n + k] = apk * sec + aqk * c;
                }
                a[p * n + q] = ZERO;
                a[q * n + p] = ZERO;
                a[p * n + p] = C64::new(a[p * n + p].re, 0.0);
                a[q * n + q] = C64::new(a[q * n + q].re, 0.0);
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = vkp * c - vkq * sec;
                    v[k * n + q] = vkp * se + vkq * c;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re));
    let values = order.iter().map(|&i| a[i * n + i].re).collect();
    let vfull = CMatrix::from_vec(n, n, v)?;
    Ok(Eigh { values, vectors: vfull.select_cols(&order) })
}

/// Domain restriction enforced by [`matrix_function`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainGuard {
    /// Any real eigenvalue.
    Real,
    /// Eigenvalues `≥ 0` after clipping `[-clip, 0]` to zero (square roots, fractional powers).
    NonNegative,
    /// Eigenvalues `> 0` after clipping (logarithms, negative powers).
    Positive,
}

/// Clips round-off negatives according to `guard` and checks the domain.
pub(crate) fn guarded_values(values: &[f64], guard: DomainGuard, function: &'static str, tol: &Tolerances) -> Result<Vec<f64>> {
    values
        .iter()
        .map(|&l| match guard {
            DomainGuard::Real => Ok(l),
            DomainGuard::NonNegative | DomainGuard::Positive => {
                let l = if l < 0.0 && l >= -tol.clip { 0.0 } else { l };
                let ok = match guard {
                    DomainGuard::NonNegative => l >= 0.0,
                    _ => l > 0.0,
                };
                if ok {
                    Ok(l)
                } else {
                    Err(Error::Domain { function, value: l })
                }
            }
        })
        .collect()
}

/// `V f(Λ) V†` for a real scalar function, with the eigenvalue guard applied first.
pub fn matrix_function(m: &HermitianMatrix, f: impl Fn(f64) -> f64, guard: DomainGuard) -> Result<HermitianMatrix> {
    let e = eigh(m)?;
    spectral_function(&e, f, guard, "matrix function")
}

pub(crate) fn spectral_function(e: &Eigh, f: impl Fn(f64) -> f64, guard: DomainGuard, name: &'static str) -> Result<HermitianMatrix> {
    let vals = guarded_values(&e.values, guard, name, &Tolerances::STRICT)?;
    let clipped = Eigh { values: vals, vectors: e.vectors.clone() };
    Ok(HermitianMatrix::from_hermitian_part(&clipped.apply(|l| C64::new(f(l), 0.0))))
}

/// `m^p` for PSD `m` (negative `p` requires positive definiteness).
pub fn matrix_power(m: &HermitianMatrix, p: f64) -> Result<HermitianMatrix> {
    let guard = if p < 0.0 { DomainGuard::Positive } else { DomainGuard::NonNegative };
    matrix_function(m, |x| if x == 0.0 { 0.0 } else { x.powf(p) }, guard)
}

pub fn matrix_log(m: &HermitianMatrix) -> Result<HermitianMatrix> {
    matrix_function(m, f64::ln, DomainGuard::Positive)
}

/// Eigenvalues only.
pub fn eigvalsh(m: &HermitianMatrix) -> Result<Vec<f64>> {
    Ok(eigh(m)?.values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::random_hermitian;

    fn unitarity_error(v: &CMatrix) -> f64 {
        (&(&v.adjoint() * v) - &CMatrix::identity(v.rows())).frobenius_norm()
    }

    #[test]
    fn identity_spectrum() {
        let e = eigh(&HermitianMatrix::identity(3)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn diagonal_input_keeps_basis() {
        let e = eigh(&HermitianMatrix::from_real_diag(&[0.2, 0.8])).unwrap();
        assert_eq!(e.values, vec![0.2, 0.8]);
        assert_eq!(e.vectors, CMatrix::identity(2));
    }

    #[test]
    fn random_reconstruction() {
        for seed in 0..20 {
            let m = random_hermitian(6, seed);
            let e = eigh(&m).unwrap();
            let err = (&e.reconstruct() - m.as_matrix()).frobenius_norm();
            assert!(err <= 1e-10 * m.as_matrix().frobenius_norm(), "seed {seed}: {err}");
            assert!(unitarity_error(&e.vectors) < 1e-10);
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn matches_independent_solver() {
        let m = random_hermitian(7, 99);
        let ours = eigh(&m).unwrap().values;
        let nm = nalgebra::DMatrix::from_fn(7, 7, |i, j| {
            let z = m.as_matrix()[(i, j)];
            nalgebra::Complex::new(z.re, z.im)
        });
        let mut theirs: Vec<f64> = nm.symmetric_eigenvalues().iter().copied().collect();
        theirs.sort_by(f64::total_cmp);
        for (a, b) in ours.iter().zip(&theirs) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn degenerate_and_zero() {
        let e = eigh(&HermitianMatrix::from_real_diag(&[0.0, 0.0])).unwrap();
        assert_eq!(e.values, vec![0.0, 0.0]);
        let m = HermitianMatrix::new(CMatrix::from_fn(4, 4, |_, _| C64::new(1.0, 0.0))).unwrap();
        let e = eigh(&m).unwrap();
        assert!((e.max() - 4.0).abs() < 1e-12);
        assert!(e.values[..3].iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn function_examples() {
        let m = random_hermitian(4, 3);
        let same = matrix_function(&m, |x| x, DomainGuard::Real).unwrap();
        assert!((same.as_matrix() - m.as_matrix()).max_abs() < 1e-12);

        let d = HermitianMatrix::from_real_diag(&[4.0, 9.0]);
        let r = matrix_function(&d, f64::sqrt, DomainGuard::NonNegative).unwrap();
        assert!((r.as_matrix() - &CMatrix::from_diag(&[2.0, 3.0])).max_abs() < 1e-14);

        let p = HermitianMatrix::from_real_diag(&[0.5, 0.5]);
        let q = matrix_power(&p, 0.25).unwrap();
        assert!((q.trace() - 2.0 * 0.5f64.powf(0.25)).abs() < 1e-14);
        assert!((q.trace() - 1.6818).abs() < 1e-4);
    }

    #[test]
    fn function_commutes_with_argument() {
        let m = random_hermitian(5, 11);
        let f = matrix_function(&m, |x| (x * 0.7).sin(), DomainGuard::Real).unwrap();
        let comm = &(f.as_matrix() * m.as_matrix()) - &(m.as_matrix() * f.as_matrix());
        assert!(comm.max_abs() < 1e-9);
    }

    #[test]
    fn log_domain_error_names_eigenvalue() {
        let m = HermitianMatrix::from_real_diag(&[-0.5, 1.0]);
        match matrix_log(&m) {
            Err(Error::Domain { value, .. }) => assert_eq!(value, -0.5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn roundoff_negatives_are_clipped() {
        let m = HermitianMatrix::from_real_diag(&[-1e-12, 1.0]);
        let r = matrix_power(&m, 0.5).unwrap();
        assert_eq!(r.as_matrix()[(0, 0)].re, 0.0);
        let bad = HermitianMatrix::from_real_diag(&[-1e-6, 1.0]);
        assert!(matrix_power(&bad, 0.5).is_err());
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = CMatrix::from_vec(2, 2, vec![ZERO, C64::new(1.0, 0.0), ZERO, ZERO]).unwrap();
        assert!(matches!(HermitianMatrix::new(m), Err(Error::NotHermitian { .. })));
    }
}
