//! Finite-dimensional Tomita–Takesaki data for a faithful state on a full
//! matrix algebra, acting on the Hilbert–Schmidt space of matrices.
//!
//! A vector of the representation space is an `n × n` matrix `Ψ`; the algebra
//! acts by left multiplication and its commutant by right multiplication.
//! The cyclic vector is `Ω = √ρ`, and `Δ^{p} Ψ = ρ^{p} Ψ ρ'^{-p}` (with
//! `ρ' = ρ` in the non-relative case), `J Ψ = Ψ†`.

use crate::error::{Error, Result};
use crate::linalg::eigen::{eigh_raw, Eigh};
use crate::linalg::{trace_norm, CMatrix, DensityMatrix, HermitianMatrix, C64};
use crate::tol::Tolerances;

/// Above this dimension modular operators are only applied as left/right multipliers.
pub const MATERIALIZE_MAX_DIM: usize = 16;

/// GNS representation of a faithful state.
#[derive(Clone, Debug)]
pub struct GnsRep {
    state: DensityMatrix,
    spectrum: Eigh,
    omega: CMatrix,
}

impl GnsRep {
    pub fn new(state: &DensityMatrix) -> Result<Self> {
        let spectrum = state.require_faithful()?;
        let omega = spectrum.apply(|l| C64::new(l.sqrt(), 0.0));
        Ok(Self { state: state.clone(), spectrum, omega })
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    /// `Ω = √ρ`.
    pub fn vector(&self) -> &CMatrix {
        &self.omega
    }

    /// `a Ω` for `a` in the algebra.
    pub fn act(&self, a: &CMatrix) -> CMatrix {
        a * &self.omega
    }

    /// Eigendecomposition of `ρ`.
    pub fn spectrum(&self) -> &Eigh {
        &self.spectrum
    }

    /// `⟨Ω | a Ω⟩ = Tr(ρ a)`.
    pub fn expectation(&self, a: &CMatrix) -> C64 {
        self.omega.hs_inner(&self.act(a))
    }
}

/// Modular operator and conjugation, optionally relative to a second state.
#[derive(Clone, Debug)]
pub struct ModularData {
    left: Eigh,
    right: Eigh,
}

impl ModularData {
    /// Non-relative data `Δ = L_ρ R_{ρ^{-1}}`.
    pub fn new(rho: &DensityMatrix) -> Result<Self> {
        let e = rho.require_faithful()?;
        Ok(Self { left: e.clone(), right: e })
    }

    /// Relative modular operator `Δ_{ω,ω'} = L_ρ R_{ρ'^{-1}}`.
    pub fn relative(rho: &DensityMatrix, rho_prime: &DensityMatrix) -> Result<Self> {
        check_same_shape(rho, rho_prime)?;
        Ok(Self { left: rho.require_faithful()?, right: rho_prime.require_faithful()? })
    }

    pub fn dim(&self) -> usize {
        self.left.values.len()
    }

    /// `Δ^p Ψ = ρ^p Ψ ρ'^{-p}`.
    pub fn delta_power(&self, psi: &CMatrix, p: f64) -> CMatrix {
        let l = self.left.apply(|x| C64::new(x.powf(p), 0.0));
        let r = self.right.apply(|x| C64::new(x.powf(-p), 0.0));
        &(&l * psi) * &r
    }

    /// `Δ^{it} Ψ`, unitary for real `t`.
    pub fn delta_it(&self, psi: &CMatrix, t: f64) -> CMatrix {
        let l = self.left.apply(|x| C64::new(0.0, t * x.ln()).exp());
        let r = self.right.apply(|x| C64::new(0.0, -t * x.ln()).exp());
        &(&l * psi) * &r
    }

    /// `log Δ Ψ = log ρ · Ψ − Ψ · log ρ'`.
    pub fn log_delta(&self, psi: &CMatrix) -> CMatrix {
        let l = self.left.apply(|x| C64::new(x.ln(), 0.0));
        let r = self.right.apply(|x| C64::new(x.ln(), 0.0));
        &(&l * psi) - &(psi * &r)
    }

    /// `J Ψ = Ψ†`.
    pub fn conjugation(&self, psi: &CMatrix) -> CMatrix {
        psi.adjoint()
    }

    /// Tomita operator `S = J Δ^{1/2}`; `S(aΩ) = a*Ω` in the non-relative case.
    pub fn tomita(&self, psi: &CMatrix) -> CMatrix {
        self.conjugation(&self.delta_power(psi, 0.5))
    }

    /// `Δ` as an `n² × n²` matrix on row-major vectorised `Ψ`:
    /// `vec(ρ Ψ ρ'^{-1}) = (ρ ⊗ (ρ'^{-1})ᵀ) vec Ψ`.
    pub fn delta_matrix(&self) -> Result<CMatrix> {
        if self.dim() > MATERIALIZE_MAX_DIM {
            return Err(Error::Precondition(format!("refusing to materialise a {}²-dimensional modular operator", self.dim())));
        }
        let l = self.left.reconstruct();
        let r_inv = self.right.apply(|x| C64::new(1.0 / x, 0.0));
        Ok(l.kron(&r_inv.transpose()))
    }
}

fn check_same_shape(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension(format!("states of dimension {} and {}", a.dim(), b.dim())));
    }
    Ok(())
}

/// `Tr(ρ log ρ − ρ log ρ')`, `+∞` when `supp ρ ⊄ supp ρ'`.
///
/// The support of `ρ'` is cut at eigenvalue `1e-12`; weight of `ρ` outside it
/// beyond `1e-10` yields `+∞`.
pub fn relative_entropy(rho: &DensityMatrix, rho_prime: &DensityMatrix) -> Result<f64> {
    check_same_shape(rho, rho_prime)?;
    let tol = Tolerances::STRICT;
    let er = rho.eigh()?;
    let ep = rho_prime.eigh()?;
    let neg_entropy: f64 = er.values.iter().filter(|&&p| p > 0.0).map(|&p| p * p.ln()).sum();
    let mut cross = 0.0;
    let mut outside = 0.0;
    for (k, &lam) in ep.values.iter().enumerate() {
        let v = ep.vectors.col(k);
        let w = rho.matrix().matvec(&v);
        let weight: f64 = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum();
        if lam > tol.faithful {
            cross += weight * lam.ln();
        } else {
            outside += weight;
        }
    }
    if outside > tol.structural {
        return Ok(f64::INFINITY);
    }
    Ok(neg_entropy - cross)
}

/// `⟨Ω | log Δ_{ω,ω'} Ω⟩` with `Ω = √ρ`. For `n ≤ 16` the operator is
/// materialised and its logarithm taken by a separate diagonalisation.
pub fn araki_relative_entropy(rho: &DensityMatrix, rho_prime: &DensityMatrix) -> Result<f64> {
    let md = ModularData::relative(rho, rho_prime)?;
    let gns = GnsRep::new(rho)?;
    let omega = gns.vector();
    if md.dim() <= MATERIALIZE_MAX_DIM {
        let delta = md.delta_matrix()?;
        let e = eigh_raw(&delta)?;
        let log_delta = e.apply(|x| C64::new(x.ln(), 0.0));
        let v = omega.vectorize();
        let lv = log_delta.matvec(&v);
        Ok(v.iter().zip(&lv).map(|(a, b)| a.conj() * b).sum::<C64>().re)
    } else {
        Ok(omega.hs_inner(&md.log_delta(omega)).re)
    }
}

/// Connes cocycle `[Dω : Dω']_t = ρ^{it} ρ'^{-it}`.
pub fn connes_cocycle(rho: &DensityMatrix, rho_prime: &DensityMatrix, t: f64) -> Result<CMatrix> {
    check_same_shape(rho, rho_prime)?;
    let a = rho.require_faithful()?;
    let b = rho_prime.require_faithful()?;
    Ok(&a.apply(|x| C64::new(0.0, t * x.ln()).exp()) * &b.apply(|x| C64::new(0.0, -t * x.ln()).exp()))
}

/// Relative entropy as the derivative `lim_{t→0} ω(u_t − 1)/(it)` of the
/// cocycle expectation, by a symmetric difference with one Richardson step.
pub fn cocycle_relative_entropy(rho: &DensityMatrix, rho_prime: &DensityMatrix, h: f64) -> Result<f64> {
    let expect = |t: f64| -> Result<C64> {
        let u = connes_cocycle(rho, rho_prime, t)?;
        Ok(rho.matrix().trace_product(&u))
    };
    let central = |h: f64| -> Result<f64> {
        let d = (expect(h)? - expect(-h)?) / C64::new(0.0, 2.0 * h);
        Ok(d.re)
    };
    let coarse = central(h)?;
    let fine = central(h / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Largest deviation over a grid of `t` between the KMS boundary value
/// `f_{a,b}(t + i)` and `ω(σ_{−t}(b) a)`, where
/// `f_{a,b}(z) = Tr(e^{−K} a e^{izK} b e^{−izK})`, `K = −log ρ` and
/// `σ_t(x) = e^{−itK} x e^{itK}`.
pub fn kms_check(rho: &DensityMatrix, a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    let e = rho.require_faithful()?;
    if a.dim() != rho.dim() || b.dim() != rho.dim() {
        return Err(Error::Dimension("observables do not match the state".into()));
    }
    let (a, b) = (a.as_matrix(), b.as_matrix());
    let k: Vec<f64> = e.values.iter().map(|x| -x.ln()).collect();
    let exp_k = |z: C64| -> CMatrix {
        // e^{i z K}
        let vals = Eigh { values: k.clone(), vectors: e.vectors.clone() };
        vals.apply(|kk| (C64::new(0.0, 1.0) * z * kk).exp())
    };
    let mut worst: f64 = 0.0;
    for step in 0..=24 {
        let t = -3.0 + 0.25 * step as f64;
        let z = C64::new(t, 1.0);
        // Analytic continuation evaluated literally at Im z = 1.
        let lhs = (&(&(&rho.matrix().clone() * a) * &exp_k(z)) * &(b * &exp_k(-z))).trace();
        // ω(σ_{−t}(b) a) with σ_{−t}(b) = e^{itK} b e^{−itK}.
        let zt = C64::new(t, 0.0);
        let sigma_b = &(&exp_k(zt) * b) * &exp_k(-zt);
        let rhs = rho.matrix().trace_product(&(&sigma_b * a));
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

/// Cone representative `√ρ` of a state.
pub fn natural_cone_rep(rho: &DensityMatrix) -> Result<HermitianMatrix> {
    rho.sqrt()
}

/// `(‖ρ − ρ'‖₁, ‖√ρ − √ρ'‖₂²)`; the first always dominates the second.
pub fn powers_stormer_gap(rho: &DensityMatrix, rho_prime: &DensityMatrix) -> Result<(f64, f64)> {
    check_same_shape(rho, rho_prime)?;
    let lhs = trace_norm(&(rho.matrix() - rho_prime.matrix()))?;
    let d = rho.sqrt()?.as_matrix() - rho_prime.sqrt()?.as_matrix();
    Ok((lhs, d.hs_inner(&d).re))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_faithful_state, random_hermitian, DensityMatrix};

    #[test]
    fn relative_entropy_examples() {
        let r = random_faithful_state(3, 1, 1);
        assert!(relative_entropy(&r, &r).unwrap().abs() < 1e-12);

        let pure = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let mixed = DensityMatrix::diagonal(&[0.5, 0.5]).unwrap();
        assert!((relative_entropy(&pure, &mixed).unwrap() - 2f64.ln()).abs() < 1e-12);

        let other = DensityMatrix::diagonal(&[0.0, 1.0]).unwrap();
        assert_eq!(relative_entropy(&pure, &other).unwrap(), f64::INFINITY);
        assert!(relative_entropy(&pure, &DensityMatrix::diagonal(&[0.5, 0.5]).unwrap()).unwrap().is_finite());
    }

    #[test]
    fn araki_examples() {
        let r = DensityMatrix::diagonal(&[0.7, 0.3]).unwrap();
        let rp = DensityMatrix::diagonal(&[0.5, 0.5]).unwrap();
        let expected = 0.7 * (0.7f64 / 0.5).ln() + 0.3 * (0.3f64 / 0.5).ln();
        assert!((araki_relative_entropy(&r, &rp).unwrap() - expected).abs() < 1e-12);
        assert!(araki_relative_entropy(&r, &r).unwrap().abs() < 1e-12);
        for seed in 0..10 {
            let a = random_faithful_state(3, 1, 2 * seed);
            let b = random_faithful_state(3, 1, 2 * seed + 1);
            let d = araki_relative_entropy(&a, &b).unwrap() - relative_entropy(&a, &b).unwrap();
            assert!(d.abs() < 1e-8, "{d}");
        }
        let pure = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        assert!(matches!(araki_relative_entropy(&pure, &rp), Err(Error::NotFaithful { .. })));
    }

    #[test]
    fn cocycle_examples() {
        let a = random_faithful_state(3, 1, 5);
        let b = random_faithful_state(3, 1, 6);
        let c = random_faithful_state(3, 1, 7);
        let u0 = connes_cocycle(&a, &b, 0.0).unwrap();
        assert!((&u0 - &CMatrix::identity(3)).max_abs() < 1e-12);
        let same = connes_cocycle(&a, &a, 1.7).unwrap();
        assert!((&same - &CMatrix::identity(3)).max_abs() < 1e-12);
        let u = connes_cocycle(&a, &b, 0.9).unwrap();
        assert!((&(&u.adjoint() * &u) - &CMatrix::identity(3)).max_abs() < 1e-10);
        let chain = &connes_cocycle(&a, &b, 0.9).unwrap() * &connes_cocycle(&b, &c, 0.9).unwrap();
        assert!((&chain - &connes_cocycle(&a, &c, 0.9).unwrap()).max_abs() < 1e-9);
        let fd = cocycle_relative_entropy(&a, &b, 1e-5).unwrap();
        assert!((fd - relative_entropy(&a, &b).unwrap()).abs() < 1e-3);
    }

    #[test]
    fn modular_invariants() {
        let rho = random_faithful_state(3, 1, 21);
        let md = ModularData::new(&rho).unwrap();
        let gns = GnsRep::new(&rho).unwrap();
        let omega = gns.vector();
        assert!((omega.hs_inner(omega).re - 1.0).abs() < 1e-10);
        assert!((&md.delta_power(omega, 1.0) - omega).max_abs() < 1e-12);
        assert!((&md.conjugation(omega) - omega).max_abs() < 1e-12);
        let x = crate::linalg::random_matrix(3, 3, 4);
        assert!((&md.conjugation(&md.conjugation(&x)) - &x).max_abs() < 1e-15);
        // S(aΩ) = a*Ω
        let a = crate::linalg::random_matrix(3, 3, 8);
        let s = md.tomita(&gns.act(&a));
        assert!((&s - &gns.act(&a.adjoint())).max_abs() < 1e-10);
        // multiplier form agrees with the materialised operator
        let dm = md.delta_matrix().unwrap();
        let direct = dm.matvec(&x.vectorize());
        let mult = md.delta_power(&x, 1.0).vectorize();
        for (p, q) in direct.iter().zip(&mult) {
            assert!((p - q).norm() < 1e-10);
        }
        // Δ^{it} is unitary: it preserves the HS norm
        let y = md.delta_it(&x, 0.8);
        assert!((y.frobenius_norm() - x.frobenius_norm()).abs() < 1e-10);
        assert!((gns.expectation(&a) - rho.matrix().trace_product(&a)).norm() < 1e-12);
    }

    #[test]
    fn kms_examples() {
        let rho = random_faithful_state(2, 1, 3);
        let one = HermitianMatrix::identity(2);
        assert!(kms_check(&rho, &one, &one).unwrap() < 1e-14);
        let a = random_hermitian(2, 10);
        let b = random_hermitian(2, 11);
        assert!(kms_check(&rho, &a, &b).unwrap() < 1e-9);
        let mixed = DensityMatrix::maximally_mixed(2, 1);
        assert!(kms_check(&mixed, &a, &b).unwrap() < 1e-12);
    }

    #[test]
    fn cone_examples() {
        let pure = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        assert!((natural_cone_rep(&pure).unwrap().as_matrix() - pure.matrix()).max_abs() < 1e-14);
        let d = DensityMatrix::diagonal(&[0.25, 0.75]).unwrap();
        let r = natural_cone_rep(&d).unwrap();
        assert!((r.as_matrix() - &CMatrix::from_diag(&[0.5, 0.75f64.sqrt()])).max_abs() < 1e-14);
        let s = natural_cone_rep(&random_faithful_state(2, 2, 2)).unwrap();
        assert!((s.as_matrix().hs_inner(s.as_matrix()).re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn powers_stormer_examples() {
        let r = random_faithful_state(2, 1, 30);
        let (l, rr) = powers_stormer_gap(&r, &r).unwrap();
        assert!(l.abs() < 1e-12 && rr.abs() < 1e-12);
        let p0 = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let p1 = DensityMatrix::diagonal(&[0.0, 1.0]).unwrap();
        let (l, rr) = powers_stormer_gap(&p0, &p1).unwrap();
        assert!((l - 2.0).abs() < 1e-12 && (rr - 2.0).abs() < 1e-12);
    }
}
