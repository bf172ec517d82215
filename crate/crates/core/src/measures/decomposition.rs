//! Separable decompositions `ρ = Σ_j F_j ⊗ G_j` and the positive separable
//! operators that dominate them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::matrix::vec_kron;
use crate::linalg::state::partial_trace_matrix;
use crate::linalg::{eigh, svd, trace_norm, vec_norm, CMatrix, DensityMatrix, HermitianMatrix, Side, C64};

/// `ρ = Σ_j F_j ⊗ G_j`; each pair defines functionals `a ↦ Tr(F_j a)`,
/// `b ↦ Tr(G_j b)` whose norms are the trace norms of `F_j`, `G_j`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeparableDecomposition {
    pub dim_a: usize,
    pub dim_b: usize,
    pub pairs: Vec<(CMatrix, CMatrix)>,
}

impl SeparableDecomposition {
    pub fn new(dim_a: usize, dim_b: usize, pairs: Vec<(CMatrix, CMatrix)>) -> Result<Self> {
        for (k, (f, g)) in pairs.iter().enumerate() {
            if f.rows() != dim_a || f.cols() != dim_a || g.rows() != dim_b || g.cols() != dim_b {
                return Err(Error::Dimension(format!("pair {k} does not match {dim_a}x{dim_b}")));
            }
        }
        Ok(Self { dim_a, dim_b, pairs })
    }

    /// `μ = Σ_j ‖F_j‖₁ ‖G_j‖₁`.
    pub fn cost(&self) -> Result<f64> {
        self.pairs.iter().try_fold(0.0, |acc, (f, g)| Ok(acc + trace_norm(f)? * trace_norm(g)?))
    }

    pub fn reconstruct(&self) -> CMatrix {
        let d = self.dim_a * self.dim_b;
        self.pairs.iter().fold(CMatrix::zeros(d, d), |acc, (f, g)| &acc + &f.kron(g))
    }

    /// Largest entrywise deviation between `Σ F ⊗ G` and `target`.
    pub fn reconstruction_error(&self, target: &CMatrix) -> f64 {
        (&self.reconstruct() - target).max_abs()
    }

    /// Decomposition of `ρ₁ ⊗ ρ₂` built from decompositions of the factors.
    pub fn tensor(&self, other: &SeparableDecomposition) -> SeparableDecomposition {
        let (a1, b1, a2, b2) = (self.dim_a, self.dim_b, other.dim_a, other.dim_b);
        // (A1 B1)(A2 B2) → (A1 A2)(B1 B2): F = F1 ⊗ F2, G = G1 ⊗ G2 after regrouping.
        let pairs = self.pairs.iter().flat_map(|(f1, g1)| other.pairs.iter().map(move |(f2, g2)| (f1.kron(f2), g1.kron(g2)))).collect();
        SeparableDecomposition { dim_a: a1 * a2, dim_b: b1 * b2, pairs }
    }

    /// Exchanges the roles of A and B.
    pub fn swap(&self) -> SeparableDecomposition {
        SeparableDecomposition {
            dim_a: self.dim_b,
            dim_b: self.dim_a,
            pairs: self.pairs.iter().map(|(f, g)| (g.clone(), f.clone())).collect(),
        }
    }
}

/// Regroups an operator on `(A1 B1) ⊗ (A2 B2)` to `(A1 A2) ⊗ (B1 B2)`.
pub fn regroup_tensor(m: &CMatrix, a1: usize, b1: usize, a2: usize, b2: usize) -> CMatrix {
    let n = a1 * b1 * a2 * b2;
    let idx = |x1: usize, y1: usize, x2: usize, y2: usize| ((x1 * b1 + y1) * a2 + x2) * b2 + y2;
    let mut perm = vec![0; n];
    for x1 in 0..a1 {
        for y1 in 0..b1 {
            for x2 in 0..a2 {
                for y2 in 0..b2 {
                    let new = ((x1 * a2 + x2) * b1 + y1) * b2 + y2;
                    perm[new] = idx(x1, y1, x2, y2);
                }
            }
        }
    }
    CMatrix::from_fn(n, n, |i, j| m[(perm[i], perm[j])])
}

/// `ρ₁ ⊗ ρ₂` with the cut `(A1 A2) | (B1 B2)`.
pub fn bipartite_tensor(r1: &DensityMatrix, r2: &DensityMatrix) -> DensityMatrix {
    let m = regroup_tensor(&r1.matrix().kron(r2.matrix()), r1.dim_a(), r1.dim_b(), r2.dim_a(), r2.dim_b());
    DensityMatrix::from_parts_unchecked(r1.dim_a() * r2.dim_a(), r1.dim_b() * r2.dim_b(), m)
}

/// Separable positive operator `σ = Σ_k P_k ⊗ Q_k` with `P_k, Q_k ≥ 0`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DominatingSeparable {
    pub dim_a: usize,
    pub dim_b: usize,
    pub components: Vec<(CMatrix, CMatrix)>,
    /// `Tr σ`.
    pub norm: f64,
}

impl DominatingSeparable {
    pub fn sigma(&self) -> CMatrix {
        let d = self.dim_a * self.dim_b;
        self.components.iter().fold(CMatrix::zeros(d, d), |acc, (p, q)| &acc + &p.kron(q))
    }

    /// Smallest eigenvalue of `σ − ρ`.
    pub fn dominance_margin(&self, rho: &CMatrix) -> Result<f64> {
        let diff = HermitianMatrix::from_hermitian_part(&(&self.sigma() - rho));
        Ok(eigh(&diff)?.min())
    }

    /// `σ / Tr σ` as a state.
    pub fn normalized_state(&self) -> Result<DensityMatrix> {
        DensityMatrix::from_psd_unnormalized(self.dim_a, self.dim_b, &self.sigma())
    }
}

/// Unitary `U` with `F U ≥ 0`, from the SVD `F = V Σ W†` as `U = W V†`.
fn polar_unitary(f: &CMatrix) -> Result<CMatrix> {
    let d = svd(f)?;
    Ok(&complete_unitary(&d.v) * &complete_unitary(&d.u).adjoint())
}

/// The thin SVD of a square matrix is already square; this only guards
/// against zero singular values leaving null columns.
fn complete_unitary(m: &CMatrix) -> CMatrix {
    let n = m.rows();
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    for j in 0..m.cols() {
        let c = m.col(j);
        if vec_norm(&c) > 0.5 {
            cols.push(c);
        }
    }
    let mut e = 0;
    while cols.len() < n {
        let mut c = vec![C64::new(0.0, 0.0); n];
        c[e] = C64::new(1.0, 0.0);
        e += 1;
        for q in cols.clone() {
            let proj: C64 = q.iter().zip(&c).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in c.iter_mut().zip(&q) {
                *x -= proj * y;
            }
        }
        let nn = vec_norm(&c);
        if nn > 1e-8 {
            cols.push(c.into_iter().map(|z| z / nn).collect());
        }
    }
    CMatrix::from_cols(n, &cols)
}

/// Separable `σ ≥ ρ` with `Tr σ = μ`. For each pair, `P = (F U) ⊗ (G V)` is
/// positive and `W = U ⊗ V` unitary with `F ⊗ G = P W†`; then
/// `σ_j = ½(P + W P W†)` satisfies `σ_j − ½(ρ_j + ρ_j†) = ½(1−W) P (1−W)† ≥ 0`.
pub fn dominating_separable(dec: &SeparableDecomposition) -> Result<DominatingSeparable> {
    let recon = dec.reconstruct();
    let dev = recon.hermitian_deviation();
    if dev > 1e-9 * recon.max_abs().max(1.0) {
        return Err(Error::Precondition(format!("decomposition does not reconstruct a Hermitian operator (deviation {dev:.3e})")));
    }
    let mut components = Vec::with_capacity(2 * dec.pairs.len());
    let mut norm = 0.0;
    for (f, g) in &dec.pairs {
        let u = polar_unitary(f)?;
        let v = polar_unitary(g)?;
        let fp = (f * &u).hermitian_part();
        let gp = (g * &v).hermitian_part();
        let tf = fp.trace().re;
        let tg = gp.trace().re;
        if tf * tg == 0.0 {
            continue;
        }
        norm += tf * tg;
        let fp_rot = (&(&u * &fp) * &u.adjoint()).hermitian_part();
        let gp_rot = (&(&v * &gp) * &v.adjoint()).hermitian_part();
        components.push((fp.scale_re(0.5), gp));
        components.push((fp_rot.scale_re(0.5), gp_rot));
    }
    Ok(DominatingSeparable { dim_a: dec.dim_a, dim_b: dec.dim_b, components, norm })
}

/// How to split a state into product terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecompositionStrategy {
    /// Blocks `⟨u_i|ρ|u_j⟩` against matrix units in the eigenbasis of a marginal.
    MatrixUnit,
    /// Singular value decomposition of the realigned matrix.
    OperatorSchmidt,
}

/// `ρ = Σ_ij |u_i⟩⟨u_j| ⊗ ⟨u_i|ρ|u_j⟩` with `u` the eigenbasis of `ρ_A`.
pub fn matrix_unit_decomposition(rho: &DensityMatrix) -> Result<SeparableDecomposition> {
    let (da, db) = (rho.dim_a(), rho.dim_b());
    let ra = HermitianMatrix::from_hermitian_part(&partial_trace_matrix(rho.matrix(), da, db, Side::A));
    let basis = eigh(&ra)?.vectors;
    let mut pairs = Vec::with_capacity(da * da);
    let eye_b = CMatrix::identity(db);
    for i in 0..da {
        for j in 0..da {
            let ui = basis.col(i);
            let uj = basis.col(j);
            let f = CMatrix::outer(&ui, &uj);
            // G_ij = Tr_A((|u_j⟩⟨u_i| ⊗ 1) ρ)
            let e_ji = CMatrix::outer(&uj, &ui).kron(&eye_b);
            let g = partial_trace_matrix(&(&e_ji * rho.matrix()), da, db, Side::B);
            pairs.push((f, g));
        }
    }
    SeparableDecomposition::new(da, db, pairs)
}

/// Operator-Schmidt decomposition from the SVD of the realigned matrix
/// `R[(a a'), (b b')] = ρ[(a b), (a' b')]`.
pub fn operator_schmidt_decomposition(rho: &DensityMatrix) -> Result<SeparableDecomposition> {
    let (da, db) = (rho.dim_a(), rho.dim_b());
    let m = rho.matrix();
    let r = CMatrix::from_fn(da * da, db * db, |row, col| {
        let (a, a2) = (row / da, row % da);
        let (b, b2) = (col / db, col % db);
        m[(a * db + b, a2 * db + b2)]
    });
    let d = svd(&r)?;
    let top = d.s.first().copied().unwrap_or(0.0);
    let mut pairs = Vec::new();
    for (k, &s) in d.s.iter().enumerate() {
        if s <= 1e-14 * top {
            continue;
        }
        let f = CMatrix::from_fn(da, da, |i, j| d.u[(i * da + j, k)] * s);
        let g = CMatrix::from_fn(db, db, |i, j| d.v[(i * db + j, k)].conj());
        pairs.push((f, g));
    }
    SeparableDecomposition::new(da, db, pairs)
}

pub fn decompose(rho: &DensityMatrix, strategy: DecompositionStrategy) -> Result<SeparableDecomposition> {
    match strategy {
        DecompositionStrategy::MatrixUnit => matrix_unit_decomposition(rho),
        DecompositionStrategy::OperatorSchmidt => operator_schmidt_decomposition(rho),
    }
}

/// `σ = Σ_k p_k |a_k b_k⟩⟨a_k b_k|` with unit `a_k`, `b_k`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeparableAnsatz {
    pub dim_a: usize,
    pub dim_b: usize,
    pub weights: Vec<f64>,
    pub factors_a: Vec<Vec<C64>>,
    pub factors_b: Vec<Vec<C64>>,
}

impl SeparableAnsatz {
    pub fn new(weights: Vec<f64>, factors_a: Vec<Vec<C64>>, factors_b: Vec<Vec<C64>>) -> Result<Self> {
        let k = weights.len();
        if factors_a.len() != k || factors_b.len() != k || k == 0 {
            return Err(Error::Dimension("ansatz component counts disagree".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-10 || weights.iter().any(|&p| p < 0.0) {
            return Err(Error::InvalidState(format!("weights sum to {total} or are negative")));
        }
        let unit = |v: &Vec<C64>| (vec_norm(v) - 1.0).abs() <= 1e-10;
        if !factors_a.iter().all(unit) || !factors_b.iter().all(unit) {
            return Err(Error::InvalidState("ansatz factors must be unit vectors".into()));
        }
        let dim_a = factors_a[0].len();
        let dim_b = factors_b[0].len();
        if factors_a.iter().any(|v| v.len() != dim_a) || factors_b.iter().any(|v| v.len() != dim_b) {
            return Err(Error::Dimension("ansatz factors of mixed length".into()));
        }
        Ok(Self { dim_a, dim_b, weights, factors_a, factors_b })
    }

    pub fn components(&self) -> usize {
        self.weights.len()
    }

    pub fn materialize(&self) -> CMatrix {
        let d = self.dim_a * self.dim_b;
        let mut s = CMatrix::zeros(d, d);
        for ((p, a), b) in self.weights.iter().zip(&self.factors_a).zip(&self.factors_b) {
            let x = vec_kron(a, b);
            for i in 0..d {
                for j in 0..d {
                    s[(i, j)] += x[i] * x[j].conj() * *p;
                }
            }
        }
        s
    }

    pub fn state(&self) -> Result<DensityMatrix> {
        DensityMatrix::from_psd_unnormalized(self.dim_a, self.dim_b, &self.materialize())
    }

    /// Image under local unitaries `U_A ⊗ U_B`.
    pub fn map_local(&self, ua: &CMatrix, ub: &CMatrix) -> SeparableAnsatz {
        SeparableAnsatz {
            dim_a: self.dim_a,
            dim_b: self.dim_b,
            weights: self.weights.clone(),
            factors_a: self.factors_a.iter().map(|a| ua.matvec(a)).collect(),
            factors_b: self.factors_b.iter().map(|b| ub.matvec(b)).collect(),
        }
    }
}
