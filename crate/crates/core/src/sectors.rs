//! Superselection sector arithmetic: statistical dimensions from Young
//! diagrams and minimal models, the μ-index and the entanglement shifts of
//! charged states.

use std::f64::consts::PI;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Weakly decreasing positive row lengths.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct YoungDiagram(Vec<u32>);

impl TryFrom<Vec<u32>> for YoungDiagram {
    type Error = Error;
    fn try_from(rows: Vec<u32>) -> Result<Self> {
        Self::new(rows)
    }
}

impl From<YoungDiagram> for Vec<u32> {
    fn from(y: YoungDiagram) -> Self {
        y.0
    }
}

impl std::str::FromStr for YoungDiagram {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let rows = s
            .split(',')
            .map(|p| p.trim().parse::<u32>().map_err(|e| Error::Parse(format!("row length {p:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(rows)
    }
}

impl YoungDiagram {
    pub fn new(rows: Vec<u32>) -> Result<Self> {
        if rows.is_empty() || rows.contains(&0) || rows.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::Precondition(format!("{rows:?} is not a Young diagram (weakly decreasing positive rows)")));
        }
        Ok(Self(rows))
    }

    pub fn rows(&self) -> &[u32] {
        &self.0
    }

    pub fn boxes(&self) -> usize {
        self.0.iter().map(|&r| r as usize).sum()
    }

    fn column_length(&self, j: usize) -> usize {
        self.0.iter().take_while(|&&r| r as usize > j).count()
    }

    /// Hook length `arm + leg + 1` of box `(i, j)`, zero-based.
    pub fn hook(&self, i: usize, j: usize) -> u64 {
        let arm = self.0[i] as usize - j - 1;
        let leg = self.column_length(j) - i - 1;
        (arm + leg + 1) as u64
    }

    fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &r)| (0..r as usize).map(move |j| (i, j)))
    }
}

/// `∏_{(i,j)∈λ} (N + j − i)/h(i, j)` in exact integer arithmetic.
pub fn young_dim(lambda: &YoungDiagram, n: u64) -> Result<BigUint> {
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for (i, j) in lambda.cells() {
        let content = n as i64 + j as i64 - i as i64;
        if content <= 0 {
            return Err(Error::Precondition(format!(
                "no representation: factor N + j − i = {content} at box ({}, {}) for N = {n}",
                i + 1,
                j + 1
            )));
        }
        num *= content as u64;
        den *= lambda.hook(i, j);
    }
    if !(&num % &den).is_zero() {
        return Err(Error::Precondition("hook-content quotient is not an integer".into()));
    }
    Ok(num / den)
}

/// `dim ρ_{(m,n)} = (−1)^{m+n} sin(π(p+1)m/p) sin(πpn/(p+1)) / (sin(π(p+1)/p) sin(πp/(p+1)))`.
pub fn minimal_model_dim(p: u32, m: u32, n: u32) -> Result<f64> {
    if p < 3 {
        return Err(Error::Precondition(format!("minimal model needs p ≥ 3, got {p}")));
    }
    if !(1..p).contains(&m) || !(1..=p).contains(&n) {
        return Err(Error::Precondition(format!("label ({m}, {n}) outside 1 ≤ m ≤ {}, 1 ≤ n ≤ {p}", p - 1)));
    }
    let (pf, mf, nf) = (p as f64, m as f64, n as f64);
    let sign = if (m + n) % 2 == 0 { 1.0 } else { -1.0 };
    let num = (PI * (pf + 1.0) * mf / pf).sin() * (PI * pf * nf / (pf + 1.0)).sin();
    let den = (PI * (pf + 1.0) / pf).sin() * (PI * pf / (pf + 1.0)).sin();
    Ok(sign * num / den)
}

/// Distinct sectors of the minimal model `p` after `(m, n) ~ (p − m, p + 1 − n)`.
pub fn minimal_model_sectors(p: u32) -> Result<SectorList> {
    let mut entries = Vec::new();
    for m in 1..p {
        for n in 1..=p {
            let (mm, nn) = (p - m, p + 1 - n);
            if (m, n) <= (mm, nn) {
                entries.push(Sector { label: format!("({m},{n})"), dim: minimal_model_dim(p, m, n)?, count: 1 });
            }
        }
    }
    SectorList::new(entries)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sector {
    pub label: String,
    pub dim: f64,
    pub count: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SectorList {
    entries: Vec<Sector>,
}

impl SectorList {
    pub fn new(entries: Vec<Sector>) -> Result<Self> {
        if let Some(s) = entries.iter().find(|s| !(s.dim >= 1.0 - 1e-12) || s.count == 0) {
            return Err(Error::Precondition(format!("sector {:?} needs dim ≥ 1 and a positive count", s.label)));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[Sector] {
        &self.entries
    }

    pub fn concat(&self, other: &SectorList) -> SectorList {
        Self { entries: self.entries.iter().chain(&other.entries).cloned().collect() }
    }

    fn weighted_log(&self) -> f64 {
        self.entries.iter().map(|s| s.count as f64 * s.dim.max(1.0).ln()).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChargedDelta {
    /// `log ∏ dim^{2n}`, bound on the change of `E_R`.
    pub relative_entropy: f64,
    /// `log ∏ dim^{5n/2}`, bound on the change of `E_M`.
    pub modular: f64,
}

pub fn charged_delta_bounds(sectors: &SectorList) -> ChargedDelta {
    let l = sectors.weighted_log();
    ChargedDelta { relative_entropy: 2.0 * l, modular: 2.5 * l }
}

/// `μ = Σ dim²` over the supplied sectors.
pub fn mu_index(sectors: &SectorList) -> f64 {
    sectors.entries.iter().map(|s| s.dim * s.dim).sum()
}

/// Statistical dimension of a Young-diagram charge as an `f64`.
pub fn young_sector(lambda: &YoungDiagram, n: u64, count: u32) -> Result<Sector> {
    let d = young_dim(lambda, n)?;
    let dim = d.to_f64().ok_or_else(|| Error::Precondition("dimension overflows f64".into()))?;
    let label = format!("{:?}", lambda.rows());
    Ok(Sector { label, dim, count })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn young_dimensions() {
        let y = |s: &str| s.parse::<YoungDiagram>().unwrap();
        assert_eq!(young_dim(&y("1"), 7).unwrap(), BigUint::from(7u32));
        assert_eq!(young_dim(&y("6,4,1"), 10).unwrap(), BigUint::from(5_945_940u64));
        assert_eq!(young_dim(&y("1,1"), 3).unwrap(), BigUint::from(3u32));
        for k in 1..=4u32 {
            for n in (k as u64)..=8 {
                let col = YoungDiagram::new(vec![1; k as usize]).unwrap();
                assert_eq!(young_dim(&col, n).unwrap(), BigUint::from(binomial(n, k as u64)));
            }
        }
        assert!(young_dim(&y("1,1,1"), 2).is_err());
        assert!("2,3".parse::<YoungDiagram>().is_err());
        assert!("2,x".parse::<YoungDiagram>().is_err());
    }

    #[test]
    fn hooks_of_six_four_one() {
        let y = YoungDiagram::new(vec![6, 4, 1]).unwrap();
        let first: Vec<u64> = (0..6).map(|j| y.hook(0, j)).collect();
        assert_eq!(first, vec![8, 6, 5, 4, 2, 1]);
        let second: Vec<u64> = (0..4).map(|j| y.hook(1, j)).collect();
        assert_eq!(second, vec![5, 3, 2, 1]);
        assert_eq!(y.hook(2, 0), 1);
    }

    #[test]
    fn minimal_model_values() {
        assert!((minimal_model_dim(3, 1, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!((minimal_model_dim(3, 1, 2).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        for p in 3..8 {
            for m in 1..p {
                for n in 1..=p {
                    let d = minimal_model_dim(p, m, n).unwrap();
                    assert!(d >= 1.0 - 1e-9);
                    assert!((d - minimal_model_dim(p, p - m, p + 1 - n).unwrap()).abs() < 1e-12);
                }
            }
        }
        assert!(minimal_model_dim(3, 3, 1).is_err() && minimal_model_dim(2, 1, 1).is_err());
    }

    #[test]
    fn ising_mu_index() {
        let ising = minimal_model_sectors(3).unwrap();
        assert_eq!(ising.entries().len(), 3);
        assert!((mu_index(&ising) - 4.0).abs() < 1e-12);
        let vac = SectorList::new(vec![Sector { label: "1".into(), dim: 1.0, count: 1 }]).unwrap();
        assert_eq!(mu_index(&vac), 1.0);
    }

    #[test]
    fn charged_deltas() {
        assert_eq!(charged_delta_bounds(&SectorList::default()), ChargedDelta { relative_entropy: 0.0, modular: 0.0 });
        let fund = SectorList::new(vec![young_sector(&YoungDiagram::new(vec![1]).unwrap(), 10, 1).unwrap()]).unwrap();
        let d = charged_delta_bounds(&fund);
        assert_eq!(d.relative_entropy, 2.0 * 10f64.ln());
        assert_eq!(d.modular, 2.5 * 10f64.ln());
        let big = SectorList::new(vec![young_sector(&YoungDiagram::new(vec![6, 4, 1]).unwrap(), 10, 1).unwrap()]).unwrap();
        assert_eq!(charged_delta_bounds(&big).relative_entropy, 2.0 * 5_945_940f64.ln());
        let both = charged_delta_bounds(&fund.concat(&big));
        assert!((both.relative_entropy - d.relative_entropy - charged_delta_bounds(&big).relative_entropy).abs() < 1e-12);
        assert!(both.modular >= both.relative_entropy);
        assert!(SectorList::new(vec![Sector { label: "x".into(), dim: 0.5, count: 1 }]).is_err());
    }
}
