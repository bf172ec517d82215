use serde::{Deserialize, Serialize};

use super::eigen::{eigh, spectral_function, DomainGuard, Eigh, HermitianMatrix};
use super::matrix::{join_parts, split_parts, vec_norm, CMatrix, C64, ZERO};
use super::random::{ginibre, rng_from_seed};
use crate::error::{Error, Result};
use crate::tol::Tolerances;

/// Tensor factor of a bipartite system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

/// Positive, unit-trace Hermitian matrix on `H_A ⊗ H_B`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dim_a: usize,
    dim_b: usize,
    matrix: HermitianMatrix,
}

impl DensityMatrix {
    pub fn new(dim_a: usize, dim_b: usize, m: CMatrix) -> Result<Self> {
        Self::with_tolerances(dim_a, dim_b, m, &Tolerances::STRICT)
    }

    pub fn with_tolerances(dim_a: usize, dim_b: usize, m: CMatrix, tol: &Tolerances) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::Dimension("subsystem dimensions must be positive".into()));
        }
        if m.rows() != dim_a * dim_b || m.cols() != dim_a * dim_b {
            return Err(Error::Dimension(format!("matrix is {}x{} but dimA·dimB = {}", m.rows(), m.cols(), dim_a * dim_b)));
        }
        let matrix = HermitianMatrix::new(m)?;
        let tr = matrix.trace();
        if (tr - 1.0).abs() > tol.structural {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = eigh(&matrix)?.min();
        if min < -tol.structural {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self { dim_a, dim_b, matrix })
    }

    /// Normalises a PSD matrix by its trace. Used for internally generated states.
    pub fn from_psd_unnormalized(dim_a: usize, dim_b: usize, m: &CMatrix) -> Result<Self> {
        let tr = m.trace().re;
        if !(tr > 0.0) {
            return Err(Error::InvalidState(format!("non-positive trace {tr}")));
        }
        Self::new(dim_a, dim_b, m.hermitian_part().scale_re(1.0 / tr))
    }

    pub fn monopartite(m: CMatrix) -> Result<Self> {
        let n = m.rows();
        Self::new(n, 1, m)
    }

    pub fn diagonal(p: &[f64]) -> Result<Self> {
        Self::monopartite(CMatrix::from_diag(p))
    }

    /// `|ψ⟩⟨ψ|` for a unit vector on `H_A ⊗ H_B`.
    pub fn pure(psi: &[C64], dim_a: usize, dim_b: usize) -> Result<Self> {
        let n = vec_norm(psi);
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!("state vector has norm {n}")));
        }
        Self::new(dim_a, dim_b, CMatrix::outer(psi, psi))
    }

    /// `|Φ⁺⟩ = n^{-1/2} Σ_i |ii⟩`.
    pub fn maximally_entangled(n: usize) -> Self {
        let psi = maximally_entangled_vector(n);
        Self::pure(&psi, n, n).expect("maximally entangled state is valid")
    }

    pub fn maximally_mixed(dim_a: usize, dim_b: usize) -> Self {
        let d = dim_a * dim_b;
        Self::new(dim_a, dim_b, CMatrix::identity(d).scale_re(1.0 / d as f64)).expect("maximally mixed state is valid")
    }

    /// `ρ_A ⊗ ρ_B`, with the factors' total dimensions as the new cut.
    pub fn product(a: &DensityMatrix, b: &DensityMatrix) -> Self {
        Self { dim_a: a.dim(), dim_b: b.dim(), matrix: HermitianMatrix::from_hermitian_part(&a.matrix().kron(b.matrix())) }
    }

    pub(crate) fn from_parts_unchecked(dim_a: usize, dim_b: usize, m: CMatrix) -> Self {
        Self { dim_a, dim_b, matrix: HermitianMatrix::from_hermitian_part(&m) }
    }

    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dim_of(&self, side: Side) -> usize {
        match side {
            Side::A => self.dim_a,
            Side::B => self.dim_b,
        }
    }

    pub fn is_bipartite(&self) -> bool {
        self.dim_b > 1 && self.dim_a > 1
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn matrix(&self) -> &CMatrix {
        self.matrix.as_matrix()
    }

    pub fn eigh(&self) -> Result<Eigh> {
        eigh(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigh()?.min())
    }

    pub fn purity(&self) -> f64 {
        self.matrix().hs_inner(self.matrix()).re
    }

    pub fn is_faithful(&self, tol: &Tolerances) -> Result<bool> {
        Ok(self.min_eigenvalue()? > tol.faithful)
    }

    /// Errors with [`Error::NotFaithful`] unless the smallest eigenvalue exceeds the threshold.
    pub fn require_faithful(&self) -> Result<Eigh> {
        let e = self.eigh()?;
        if e.min() <= Tolerances::STRICT.faithful {
            return Err(Error::NotFaithful { min_eigenvalue: e.min() });
        }
        Ok(e)
    }

    /// `−Tr ρ log ρ`.
    pub fn von_neumann_entropy(&self) -> Result<f64> {
        Ok(entropy_of_spectrum(&self.eigh()?.values))
    }

    /// `√ρ`.
    pub fn sqrt(&self) -> Result<HermitianMatrix> {
        spectral_function(&self.eigh()?, f64::sqrt, DomainGuard::NonNegative, "sqrt")
    }

    pub fn partial_trace(&self, keep: Side) -> Result<DensityMatrix> {
        partial_trace(self, keep)
    }

    pub fn partial_transpose(&self, side: Side) -> Result<HermitianMatrix> {
        partial_transpose(self, side)
    }

    /// The same state with the tensor factors exchanged.
    pub fn swap(&self) -> DensityMatrix {
        let p = swap_permutation(self.dim_a, self.dim_b);
        let m = CMatrix::from_fn(self.dim(), self.dim(), |i, j| self.matrix()[(p[i], p[j])]);
        Self::from_parts_unchecked(self.dim_b, self.dim_a, m)
    }

    /// `U ρ U†`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<DensityMatrix> {
        if u.rows() != self.dim() || u.cols() != self.dim() {
            return Err(Error::Dimension("unitary does not match the state".into()));
        }
        Ok(Self::from_parts_unchecked(self.dim_a, self.dim_b, &(u * self.matrix()) * &u.adjoint()))
    }

    /// `λ ρ + (1−λ) σ`.
    pub fn mix(&self, other: &DensityMatrix, lambda: f64) -> Result<DensityMatrix> {
        if self.dim_a != other.dim_a || self.dim_b != other.dim_b {
            return Err(Error::Dimension("mixing states of different shape".into()));
        }
        let m = &self.matrix().scale_re(lambda) + &other.matrix().scale_re(1.0 - lambda);
        Ok(Self::from_parts_unchecked(self.dim_a, self.dim_b, m))
    }

    /// `⟨i|_A ρ |j⟩_A`, a `dimB × dimB` block.
    pub fn block(&self, i: usize, j: usize) -> CMatrix {
        let db = self.dim_b;
        CMatrix::from_fn(db, db, |k, l| self.matrix()[(i * db + k, j * db + l)])
    }
}

pub fn maximally_entangled_vector(n: usize) -> Vec<C64> {
    let mut psi = vec![ZERO; n * n];
    let amp = 1.0 / (n as f64).sqrt();
    for i in 0..n {
        psi[i * n + i] = C64::new(amp, 0.0);
    }
    psi
}

/// `−Σ p log p` with `0 log 0 = 0` and round-off negatives ignored.
pub fn entropy_of_spectrum(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum()
}

/// Index permutation mapping `(a, b)` to `(b, a)` ordering.
pub(crate) fn swap_permutation(dim_a: usize, dim_b: usize) -> Vec<usize> {
    // new index (b, a) = b * dim_a + a  ← old index a * dim_b + b
    let mut p = vec![0; dim_a * dim_b];
    for a in 0..dim_a {
        for b in 0..dim_b {
            p[b * dim_a + a] = a * dim_b + b;
        }
    }
    p
}

/// Partial trace of an arbitrary operator on `H_A ⊗ H_B`.
pub fn partial_trace_matrix(m: &CMatrix, dim_a: usize, dim_b: usize, keep: Side) -> CMatrix {
    match keep {
        Side::A => CMatrix::from_fn(dim_a, dim_a, |i, j| (0..dim_b).map(|k| m[(i * dim_b + k, j * dim_b + k)]).sum()),
        Side::B => CMatrix::from_fn(dim_b, dim_b, |i, j| (0..dim_a).map(|k| m[(k * dim_b + i, k * dim_b + j)]).sum()),
    }
}

pub fn partial_trace(rho: &DensityMatrix, keep: Side) -> Result<DensityMatrix> {
    if rho.dim_b == 1 && keep == Side::A || rho.dim_a == 1 && keep == Side::B {
        // Trivial factor; still a valid request.
        return Ok(DensityMatrix::from_parts_unchecked(rho.dim(), 1, rho.matrix().clone()));
    }
    if rho.dim_a == 1 || rho.dim_b == 1 {
        return Err(Error::Precondition("partial trace needs a bipartite state".into()));
    }
    let m = partial_trace_matrix(rho.matrix(), rho.dim_a, rho.dim_b, keep);
    let n = m.rows();
    Ok(DensityMatrix::from_parts_unchecked(n, 1, m))
}

/// Transpose on one tensor factor.
pub fn partial_transpose_matrix(m: &CMatrix, dim_a: usize, dim_b: usize, side: Side) -> CMatrix {
    CMatrix::from_fn(dim_a * dim_b, dim_a * dim_b, |r, c| {
        let (a1, b1) = (r / dim_b, r % dim_b);
        let (a2, b2) = (c / dim_b, c % dim_b);
        match side {
            Side::A => m[(a2 * dim_b + b1, a1 * dim_b + b2)],
            Side::B => m[(a1 * dim_b + b2, a2 * dim_b + b1)],
        }
    })
}

pub fn partial_transpose(rho: &DensityMatrix, side: Side) -> Result<HermitianMatrix> {
    Ok(HermitianMatrix::from_hermitian_part(&partial_transpose_matrix(rho.matrix(), rho.dim_a, rho.dim_b, side)))
}

/// `G G† / Tr(G G†)` with `G` a `d × rank` Ginibre matrix.
pub fn random_density_matrix(dim_a: usize, dim_b: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    let d = dim_a * dim_b;
    if rank == 0 || rank > d {
        return Err(Error::Precondition(format!("rank {rank} outside 1..={d}")));
    }
    let g = ginibre(d, rank, &mut rng_from_seed(seed));
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    Ok(DensityMatrix::from_parts_unchecked(dim_a, dim_b, m.scale_re(1.0 / tr)))
}

/// Full-rank random state.
pub fn random_faithful_state(dim_a: usize, dim_b: usize, seed: u64) -> DensityMatrix {
    random_density_matrix(dim_a, dim_b, dim_a * dim_b, seed).expect("valid rank")
}

/// JSON form `{"dimA", "dimB", "re", "im"}`, row-major.
#[derive(Serialize, Deserialize)]
struct DensityMatrixRepr {
    #[serde(rename = "dimA")]
    dim_a: usize,
    #[serde(rename = "dimB")]
    dim_b: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl DensityMatrix {
    /// Parses the JSON form under the given tolerance profile. Schema errors
    /// carry the line and column reported by the parser.
    pub fn from_json(text: &str, tol: &Tolerances) -> Result<Self> {
        let r: DensityMatrixRepr = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let m = join_parts(&r.re, &r.im)?;
        Self::with_tolerances(r.dim_a, r.dim_b, m, tol)
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (re, im) = split_parts(self.matrix());
        DensityMatrixRepr { dim_a: self.dim_a, dim_b: self.dim_b, re, im }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = DensityMatrixRepr::deserialize(d)?;
        let m = join_parts(&r.re, &r.im).map_err(serde::de::Error::custom)?;
        DensityMatrix::new(r.dim_a, r.dim_b, m).map_err(serde::de::Error::custom)
    }
}
