//! Entanglement measures on finite bipartite states.
//!
//! Exact values are returned where a closed form exists. Otherwise every
//! result carries a certificate (a separable ansatz, a separable
//! decomposition or a set of local observables) from which the value can be
//! recomputed along an independent path with [`MeasureResult::verify`].

pub mod audit;
pub mod bell;
pub mod decomposition;
pub mod nuclearity;
pub mod relent;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{entropy_of_spectrum, svd, CMatrix, DensityMatrix, Side, C64};
use crate::modular::{araki_relative_entropy, relative_entropy};

pub use audit::{ordering_audit, AuditOptions, AuditReport, ChainLink, ChainViolation};
pub use bell::{bell_correlation, BellObservables, BellOptions};
pub use decomposition::{
    bipartite_tensor, decompose, dominating_separable, matrix_unit_decomposition, operator_schmidt_decomposition, DecompositionStrategy,
    DominatingSeparable, SeparableAnsatz, SeparableDecomposition,
};
pub use nuclearity::{modular_nuclearity_pure, modular_nuclearity_upper, nuclear_sum, nuclear_sum_tomita};
pub use relent::{relative_entanglement_entropy_upper, ErOptions};

/// Slack allowed between a reported value and its certificate.
pub const CERTIFICATE_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    Exact,
    UpperBound,
    LowerBound,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum Certificate {
    /// Feasible separable state for the relative-entropy infimum.
    Ansatz(SeparableAnsatz),
    /// Decomposition whose dominating separable operator has trace `e^value`.
    Dominating(SeparableDecomposition),
    /// Matrix-unit decomposition on `side` for the modular nuclearity bound.
    Nuclear {
        side: Side,
        decomposition: SeparableDecomposition,
    },
    Observables(BellObservables),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasureResult {
    pub value: f64,
    pub kind: MeasureKind,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certificate: Option<Certificate>,
    pub iterations: usize,
    /// Set when an optimiser hit its iteration cap; the value is still valid.
    #[serde(default)]
    pub stagnated: bool,
}

impl MeasureResult {
    pub fn exact(value: f64) -> Self {
        Self { value, kind: MeasureKind::Exact, certificate: None, iterations: 0, stagnated: false }
    }

    /// Recomputes the value from the certificate alone. Results without a
    /// certificate return their own value.
    pub fn verify(&self, rho: &DensityMatrix) -> Result<f64> {
        let Some(cert) = &self.certificate else { return Ok(self.value) };
        match cert {
            Certificate::Ansatz(a) => {
                let sigma = a.state()?;
                araki_relative_entropy(rho, &sigma).or_else(|_| relative_entropy(rho, &sigma))
            }
            Certificate::Dominating(dec) => {
                check_reconstruction(dec, rho)?;
                let dom = dominating_separable(dec)?;
                Ok(dom.sigma().trace().re.ln())
            }
            Certificate::Nuclear { side, decomposition } => {
                check_reconstruction(decomposition, rho)?;
                Ok(nuclear_sum_tomita(rho, *side)?.ln())
            }
            Certificate::Observables(obs) => Ok(obs.value(rho)),
        }
    }

    /// `true` when [`Self::verify`] reproduces the value within
    /// [`CERTIFICATE_TOLERANCE`].
    pub fn is_certified(&self, rho: &DensityMatrix) -> Result<bool> {
        let v = self.verify(rho)?;
        Ok((v - self.value).abs() <= CERTIFICATE_TOLERANCE * self.value.abs().max(1.0))
    }
}

fn check_reconstruction(dec: &SeparableDecomposition, rho: &DensityMatrix) -> Result<()> {
    let err = dec.reconstruction_error(rho.matrix());
    if err > 1e-9 {
        return Err(Error::InvalidState(format!("certificate misses the state by {err:.3e}")));
    }
    Ok(())
}

/// `E_I = H(ρ, ρ_A ⊗ ρ_B)`, cross-checked against `S(ρ_A) + S(ρ_B) − S(ρ)`.
pub fn mutual_information(rho: &DensityMatrix) -> Result<MeasureResult> {
    if !rho.is_bipartite() {
        return Err(Error::Precondition("mutual information needs a bipartite state".into()));
    }
    let ra = rho.partial_trace(Side::A)?;
    let rb = rho.partial_trace(Side::B)?;
    let entropies = ra.von_neumann_entropy()? + rb.von_neumann_entropy()? - rho.von_neumann_entropy()?;
    let relative = relative_entropy(rho, &DensityMatrix::product(&ra, &rb))?;
    if (entropies - relative).abs() > 1e-9 {
        return Err(Error::NoConvergence { method: "mutual information cross-check", residual: (entropies - relative).abs() });
    }
    Ok(MeasureResult::exact(relative.max(0.0)))
}

/// Entanglement entropy of a pure state, equal to `E_R` and `E_D`.
pub fn schmidt_entropy(psi: &[C64], dim_a: usize, dim_b: usize) -> Result<MeasureResult> {
    if psi.len() != dim_a * dim_b {
        return Err(Error::Dimension(format!("vector of length {} is not {dim_a}x{dim_b}", psi.len())));
    }
    let norm = crate::linalg::vec_norm(psi);
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidState(format!("state vector has norm {norm}")));
    }
    let m = CMatrix::from_vec(dim_a, dim_b, psi.to_vec())?;
    let p: Vec<f64> = svd(&m)?.s.iter().map(|s| s * s).collect();
    let from_svd = entropy_of_spectrum(&p);
    let rho = DensityMatrix::pure(psi, dim_a, dim_b)?;
    let sa = rho.partial_trace(Side::A)?.von_neumann_entropy()?;
    let sb = rho.partial_trace(Side::B)?.von_neumann_entropy()?;
    let spread = (sa - sb).abs().max((sa - from_svd).abs());
    if spread > 1e-10 {
        return Err(Error::NoConvergence { method: "marginal entropies", residual: spread });
    }
    Ok(MeasureResult::exact(from_svd))
}

/// `E_N ≤ log ‖σ‖` for the dominating separable operator built from the
/// chosen decomposition. Both cuts are tried and the smaller kept.
pub fn log_dominance_upper(rho: &DensityMatrix, strategy: DecompositionStrategy) -> Result<MeasureResult> {
    if !rho.is_bipartite() {
        return Err(Error::Precondition("log dominance needs a bipartite state".into()));
    }
    let a = decompose(rho, strategy)?;
    let b = decompose(&rho.swap(), strategy)?.swap();
    let (na, nb) = (dominating_separable(&a)?.norm, dominating_separable(&b)?.norm);
    let (dec, norm) = if na <= nb { (a, na) } else { (b, nb) };
    Ok(MeasureResult {
        value: norm.ln(),
        kind: MeasureKind::UpperBound,
        certificate: Some(Certificate::Dominating(dec)),
        iterations: 0,
        stagnated: false,
    })
}

/// `H(ρ, σ/Tr σ)` for the dominating operator behind an `E_N` certificate.
pub fn dominated_relative_entropy(rho: &DensityMatrix, result: &MeasureResult) -> Result<f64> {
    let Some(Certificate::Dominating(dec)) = &result.certificate else {
        return Err(Error::Precondition("result carries no dominating decomposition".into()));
    };
    relative_entropy(rho, &dominating_separable(dec)?.normalized_state()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::ZERO;
    use crate::linalg::{maximally_entangled_vector, random_faithful_state};

    #[test]
    fn mutual_information_values() {
        let prod = DensityMatrix::product(&random_faithful_state(2, 1, 1), &random_faithful_state(2, 1, 2));
        assert!(mutual_information(&prod).unwrap().value.abs() < 1e-10);
        for n in [2, 3] {
            let v = mutual_information(&DensityMatrix::maximally_entangled(n)).unwrap().value;
            assert!((v - 2.0 * (n as f64).ln()).abs() < 1e-9);
        }
    }

    #[test]
    fn schmidt_values() {
        let v = schmidt_entropy(&maximally_entangled_vector(2), 2, 2).unwrap().value;
        assert!((v - 2f64.ln()).abs() < 1e-12);
        let psi = [C64::new(0.9f64.sqrt(), 0.0), ZERO, ZERO, C64::new(0.1f64.sqrt(), 0.0)];
        let want = -0.9 * 0.9f64.ln() - 0.1 * 0.1f64.ln();
        assert!((schmidt_entropy(&psi, 2, 2).unwrap().value - want).abs() < 1e-12);
        let prod = [C64::new(1.0, 0.0), ZERO, ZERO, ZERO];
        assert!(schmidt_entropy(&prod, 2, 2).unwrap().value.abs() < 1e-12);
        assert!(schmidt_entropy(&[C64::new(2.0, 0.0), ZERO, ZERO, ZERO], 2, 2).is_err());
    }

    #[test]
    fn pure_mutual_information_is_twice_schmidt() {
        let psi = crate::linalg::random_unit_vector(6, &mut crate::linalg::rng_from_seed(3));
        let rho = DensityMatrix::pure(&psi, 2, 3).unwrap();
        let ei = mutual_information(&rho).unwrap().value;
        let s = schmidt_entropy(&psi, 2, 3).unwrap().value;
        assert!((ei - 2.0 * s).abs() < 1e-9);
    }

    #[test]
    fn log_dominance_bell_values() {
        let v = log_dominance_upper(&DensityMatrix::maximally_entangled(3), DecompositionStrategy::MatrixUnit).unwrap();
        assert!((v.value - 3f64.ln()).abs() < 1e-9);
        let prod = DensityMatrix::product(&random_faithful_state(2, 1, 5), &random_faithful_state(2, 1, 6));
        for s in [DecompositionStrategy::MatrixUnit, DecompositionStrategy::OperatorSchmidt] {
            assert!(log_dominance_upper(&prod, s).unwrap().value.abs() < 1e-9);
        }
    }

    #[test]
    fn certificates_verify() {
        let rho = random_faithful_state(2, 2, 11);
        for r in [
            log_dominance_upper(&rho, DecompositionStrategy::MatrixUnit).unwrap(),
            log_dominance_upper(&rho, DecompositionStrategy::OperatorSchmidt).unwrap(),
            modular_nuclearity_upper(&rho).unwrap(),
            bell_correlation(&rho, &BellOptions::default()).unwrap(),
        ] {
            assert!(r.is_certified(&rho).unwrap(), "{:?} {}", r.kind, r.value);
        }
    }

    #[test]
    fn dominance_chain_on_random_states() {
        for seed in 0..10 {
            let rho = random_faithful_state(2, 2, 100 + seed);
            let en = log_dominance_upper(&rho, DecompositionStrategy::MatrixUnit).unwrap();
            let h = dominated_relative_entropy(&rho, &en).unwrap();
            let em = modular_nuclearity_upper(&rho).unwrap();
            assert!(h <= en.value + 1e-8);
            assert!(en.value <= em.value + 1e-8);
        }
    }

    #[test]
    fn result_json_roundtrip() {
        let r = log_dominance_upper(&DensityMatrix::maximally_entangled(2), DecompositionStrategy::MatrixUnit).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        let back: MeasureResult = serde_json::from_str(&s).unwrap();
        assert_eq!(back.kind, MeasureKind::UpperBound);
        assert!((back.verify(&DensityMatrix::maximally_entangled(2)).unwrap() - r.value).abs() < 1e-12);
    }
}
