//! Modular nuclearity measure `E_M = log min(‖Ψ^A‖₁, ‖Ψ^B‖₁)`, where
//! `Ψ^A(a) = Δ^{1/4} a Ω` on the GNS vector `Ω = √ρ` of a purification.
//!
//! For mixed states the nuclear norm is bounded by the matrix-unit sum
//! `Σ_ij ‖Δ^{1/4} e_ij Ω‖`, with `e_ij` the matrix units in the eigenbasis of
//! the reduced state. The sum dominates the cost of the matrix-unit separable
//! decomposition, which is what makes `E_N ≤ E_M` checkable.

use super::decomposition::{matrix_unit_decomposition, SeparableDecomposition};
use super::{Certificate, MeasureKind, MeasureResult};
use crate::error::{Error, Result};
use crate::linalg::eigen::eigh_raw;
use crate::linalg::state::partial_trace_matrix;
use crate::linalg::{svd, CMatrix, DensityMatrix, HermitianMatrix, Side, Svd, C64};

const FAITHFUL_CUT: f64 = 1e-12;

/// `2 log Σ p_i^{1/4}` for a pure state with Schmidt weights `p`.
pub fn modular_nuclearity_pure(weights: &[f64]) -> Result<MeasureResult> {
    let min = weights.iter().copied().fold(f64::INFINITY, f64::min);
    if weights.is_empty() || !(min > 0.0) {
        // The GNS vector must be separating for the local algebra.
        return Err(Error::NotFaithful { min_eigenvalue: if weights.is_empty() { 0.0 } else { min } });
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidState(format!("Schmidt weights sum to {total}, not 1")));
    }
    let value = 2.0 * weights.iter().map(|p| p.powf(0.25)).sum::<f64>().ln();
    Ok(MeasureResult::exact(value))
}

/// GNS data of the side-`side` cut: `Ω` reshaped as a matrix with rows on the
/// opposite factor, together with its thin SVD and the local eigenbasis.
struct Cut {
    /// Rows: opposite factor; columns: (this factor, purifying copy).
    x: CMatrix,
    svd: Svd,
    basis: CMatrix,
    dim: usize,
    purifier: usize,
}

impl Cut {
    fn new(rho: &DensityMatrix, side: Side) -> Result<Self> {
        let rho = match side {
            Side::A => rho.clone(),
            Side::B => rho.swap(),
        };
        let (da, db) = (rho.dim_a(), rho.dim_b());
        let d = da * db;
        let marg_a = eigh_raw(&partial_trace_matrix(rho.matrix(), da, db, Side::A))?;
        let marg_b = eigh_raw(&partial_trace_matrix(rho.matrix(), da, db, Side::B))?;
        let min = marg_a.min().min(marg_b.min());
        if min <= FAITHFUL_CUT {
            return Err(Error::NotFaithful { min_eigenvalue: min });
        }
        let sq = rho.sqrt()?.into_matrix();
        let x = CMatrix::from_fn(db, da * d, |b, col| {
            let (a, e) = (col / d, col % d);
            sq[(a * db + b, e)]
        });
        let svd = svd(&x)?;
        Ok(Self { x, svd, basis: marg_a.vectors, dim: da, purifier: d })
    }

    /// `(E ⊗ 1) Ω` for `E = |u_i⟩⟨u_j|` acting on this factor, projected on
    /// the right singular vectors: returns `X_E V`.
    fn smeared(&self, i: usize, j: usize) -> CMatrix {
        let (da, d) = (self.dim, self.purifier);
        let ui = self.basis.col(i);
        let uj = self.basis.col(j);
        let rows = self.x.rows();
        let xp = CMatrix::from_fn(rows, da * d, |b, col| {
            let (a2, e) = (col / d, col % d);
            let inner: C64 = (0..da).map(|a| uj[a].conj() * self.x[(b, a * d + e)]).sum();
            ui[a2] * inner
        });
        &xp * &self.svd.v
    }

    /// `Σ_ij ‖Δ^{1/4} e_ij Ω‖` with `Δ^{1/4}` acting as `Y ↦ S^{-1/2} U† Y S^{1/2}`.
    fn nuclear_sum(&self) -> f64 {
        let s = &self.svd.s;
        let ut = self.svd.u.adjoint();
        let mut total = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let y = &ut * &self.smeared(i, j);
                total += CMatrix::from_fn(y.rows(), y.cols(), |r, c| y[(r, c)] * (s[c] / s[r]).sqrt()).frobenius_norm();
            }
        }
        total
    }

    /// Same sum with `Δ` obtained by writing the Tomita operator `S` as a
    /// real-linear map on coefficient matrices and forming `S*S`.
    fn nuclear_sum_tomita(&self) -> Result<f64> {
        let n = self.x.rows();
        let u = &self.svd.u;
        let s = &self.svd.s;
        let left = CMatrix::from_fn(n, n, |r, c| u[(r, c)] / s[c]);
        let right = CMatrix::from_fn(n, n, |r, c| u[(r, c)] * s[c]);
        // S(Y) = left · Y† · right, i.e. vec(S Y) = (left ⊗ rightᵀ) Π conj(vec Y).
        let perm = CMatrix::from_fn(n * n, n * n, |r, c| {
            let (i, j) = (c / n, c % n);
            if r == j * n + i {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let m = &left.kron(&right.transpose()) * &perm;
        let delta = HermitianMatrix::from_hermitian_part(&(&m.transpose() * &m.conj()));
        let e = eigh_raw(delta.as_matrix())?;
        if e.min() <= 0.0 {
            return Err(Error::NotFaithful { min_eigenvalue: e.min() });
        }
        let quarter = e.apply(|w| C64::new(w.powf(-0.25), 0.0));
        let mut total = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let y = self.smeared(i, j);
                total += crate::linalg::vec_norm(&quarter.matvec(&y.vectorize()));
            }
        }
        Ok(total)
    }
}

/// Matrix-unit nuclear sum for one side.
pub fn nuclear_sum(rho: &DensityMatrix, side: Side) -> Result<f64> {
    Ok(Cut::new(rho, side)?.nuclear_sum())
}

/// [`nuclear_sum`] via the explicit Tomita operator; independent check path.
pub fn nuclear_sum_tomita(rho: &DensityMatrix, side: Side) -> Result<f64> {
    Cut::new(rho, side)?.nuclear_sum_tomita()
}

/// Matrix-unit decomposition of `ρ` built on side `side`, expressed in the
/// original `A ⊗ B` ordering.
pub fn side_decomposition(rho: &DensityMatrix, side: Side) -> Result<SeparableDecomposition> {
    match side {
        Side::A => matrix_unit_decomposition(rho),
        Side::B => Ok(matrix_unit_decomposition(&rho.swap())?.swap()),
    }
}

/// `log min(Z_A, Z_B)` with the matrix-unit decomposition of the winning
/// side as certificate; its cost never exceeds the returned `Z`.
pub fn modular_nuclearity_upper(rho: &DensityMatrix) -> Result<MeasureResult> {
    if !rho.is_bipartite() {
        return Err(Error::Precondition("modular nuclearity needs a bipartite state".into()));
    }
    let za = nuclear_sum(rho, Side::A)?;
    let zb = nuclear_sum(rho, Side::B)?;
    let (side, z) = if za <= zb { (Side::A, za) } else { (Side::B, zb) };
    Ok(MeasureResult {
        value: z.ln(),
        kind: MeasureKind::UpperBound,
        certificate: Some(Certificate::Nuclear { side, decomposition: side_decomposition(rho, side)? }),
        iterations: 0,
        stagnated: false,
    })
}
