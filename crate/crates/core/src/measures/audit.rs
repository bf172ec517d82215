//! Cross-measure audit: computes all measures on one state and checks the
//! ordering relations that follow directly from the certificates.

use serde::{Deserialize, Serialize};

use super::bell::{bell_correlation, BellOptions};
use super::decomposition::DecompositionStrategy;
use super::nuclearity::modular_nuclearity_upper;
use super::relent::{relative_entanglement_entropy_upper, ErOptions};
use super::{dominated_relative_entropy, log_dominance_upper, mutual_information};
use crate::error::Result;
use crate::linalg::DensityMatrix;

pub const CHAIN_SLACK: f64 = 1e-8;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AuditOptions {
    pub relative_entropy: ErOptions,
    pub bell: BellOptions,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainLink {
    /// `H(ρ, σ_N / Tr σ_N) ≤ E_N upper`.
    RelativeEntropyBelowDominance,
    /// `E_N upper ≤ E_M upper`.
    DominanceBelowNuclearity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainViolation {
    pub link: ChainLink,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub mutual_information: f64,
    pub relative_entanglement: f64,
    pub log_dominance: f64,
    pub modular_nuclearity: f64,
    pub bell: f64,
    /// Relative entropy of `ρ` to the normalised dominating operator.
    pub dominated_relative_entropy: f64,
    pub violations: Vec<ChainViolation>,
}

impl AuditReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn ordering_audit(rho: &DensityMatrix, opts: &AuditOptions) -> Result<AuditReport> {
    let ei = mutual_information(rho)?.value;
    let er = relative_entanglement_entropy_upper(rho, &opts.relative_entropy)?.value;
    let en = log_dominance_upper(rho, DecompositionStrategy::MatrixUnit)?;
    let h = dominated_relative_entropy(rho, &en)?;
    let em = modular_nuclearity_upper(rho)?.value;
    let eb = bell_correlation(rho, &opts.bell)?.value;

    let mut violations = Vec::new();
    for (link, lower, upper) in
        [(ChainLink::RelativeEntropyBelowDominance, h, en.value), (ChainLink::DominanceBelowNuclearity, en.value, em)]
    {
        if lower > upper + CHAIN_SLACK {
            violations.push(ChainViolation { link, lower, upper });
        }
    }
    Ok(AuditReport {
        mutual_information: ei,
        relative_entanglement: er,
        log_dominance: en.value,
        modular_nuclearity: em,
        bell: eb,
        dominated_relative_entropy: h,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_faithful_state;

    #[test]
    fn bell_state_table() {
        let r = ordering_audit(&DensityMatrix::maximally_entangled(2), &AuditOptions::default()).unwrap();
        let l2 = 2f64.ln();
        assert!((r.mutual_information - 2.0 * l2).abs() < 5e-3);
        assert!((r.relative_entanglement - l2).abs() < 5e-3);
        assert!((r.log_dominance - l2).abs() < 5e-3);
        assert!((r.modular_nuclearity - 1.5 * l2).abs() < 5e-3);
        assert!(r.holds());
    }

    #[test]
    fn product_state_is_unentangled() {
        let rho = DensityMatrix::product(&random_faithful_state(2, 1, 1), &random_faithful_state(2, 1, 2));
        let r = ordering_audit(&rho, &AuditOptions::default()).unwrap();
        for v in [r.mutual_information, r.relative_entanglement, r.log_dominance, r.modular_nuclearity] {
            assert!(v.abs() < 5e-3, "{v}");
        }
        assert!((r.bell - 1.0).abs() < 1e-6);
    }
}
