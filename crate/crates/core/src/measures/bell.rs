//! Seesaw lower bound on the Bell correlation
//! `E_B = sup ½ ω(a₁(b₁ + b₂) + a₂(b₁ − b₂))` over Hermitian contractions.

use serde::{Deserialize, Serialize};

use super::{Certificate, MeasureKind, MeasureResult};
use crate::error::{Error, Result};
use crate::linalg::eigen::eigh_raw;
use crate::linalg::{random_hermitian, CMatrix, DensityMatrix, C64};

pub const MAX_LOCAL_DIM: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellOptions {
    pub iterations: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for BellOptions {
    fn default() -> Self {
        Self { iterations: 500, restarts: 8, seed: 0 }
    }
}

/// Dichotomic local observables realising a Bell value.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BellObservables {
    pub a1: CMatrix,
    pub a2: CMatrix,
    pub b1: CMatrix,
    pub b2: CMatrix,
}

impl BellObservables {
    /// `½ Tr ρ (a₁⊗(b₁+b₂) + a₂⊗(b₁−b₂))` evaluated on the full space.
    pub fn value(&self, rho: &DensityMatrix) -> f64 {
        let plus = &self.b1 + &self.b2;
        let minus = &self.b1 - &self.b2;
        let op = &self.a1.kron(&plus) + &self.a2.kron(&minus);
        0.5 * rho.matrix().trace_product(&op).re
    }
}

/// `sign(m)` with zero eigenvalues sent to `+1`.
fn sign(m: &CMatrix) -> Result<CMatrix> {
    let e = eigh_raw(&m.hermitian_part())?;
    let scale = e.values.iter().fold(0.0f64, |a, w| a.max(w.abs()));
    Ok(e.apply(|w| C64::new(if w < -1e-14 * scale { -1.0 } else { 1.0 }, 0.0)))
}

/// `Tr_B((1 ⊗ c) ρ)`.
fn conditional_a(rho: &DensityMatrix, c: &CMatrix) -> CMatrix {
    let (da, db) = (rho.dim_a(), rho.dim_b());
    let m = rho.matrix();
    CMatrix::from_fn(da, da, |i, j| {
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..db {
            for l in 0..db {
                acc += c[(k, l)] * m[(i * db + l, j * db + k)];
            }
        }
        acc
    })
}

/// `Tr_A((c ⊗ 1) ρ)`.
fn conditional_b(rho: &DensityMatrix, c: &CMatrix) -> CMatrix {
    let (da, db) = (rho.dim_a(), rho.dim_b());
    let m = rho.matrix();
    CMatrix::from_fn(db, db, |i, j| {
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..da {
            for l in 0..da {
                acc += c[(k, l)] * m[(l * db + i, k * db + j)];
            }
        }
        acc
    })
}

fn seesaw(rho: &DensityMatrix, start: BellObservables, iterations: usize) -> Result<(BellObservables, usize)> {
    let mut obs = start;
    let mut value = obs.value(rho);
    for it in 0..iterations {
        obs.a1 = sign(&conditional_a(rho, &(&obs.b1 + &obs.b2)))?;
        obs.a2 = sign(&conditional_a(rho, &(&obs.b1 - &obs.b2)))?;
        obs.b1 = sign(&conditional_b(rho, &(&obs.a1 + &obs.a2)))?;
        obs.b2 = sign(&conditional_b(rho, &(&obs.a1 - &obs.a2)))?;
        let next = obs.value(rho);
        let done = (next - value).abs() < 1e-10;
        value = next;
        if done {
            return Ok((obs, it + 1));
        }
    }
    Ok((obs, iterations))
}

/// Best seesaw value over seeded random starting observables.
pub fn bell_correlation(rho: &DensityMatrix, opts: &BellOptions) -> Result<MeasureResult> {
    let (da, db) = (rho.dim_a(), rho.dim_b());
    if da > MAX_LOCAL_DIM || db > MAX_LOCAL_DIM {
        return Err(Error::Precondition(format!("local dimensions {da}x{db} exceed {MAX_LOCAL_DIM}")));
    }
    let mut best: Option<(f64, BellObservables)> = None;
    let mut iterations = 0;
    let mut stagnated = false;
    for r in 0..opts.restarts.max(1) as u64 {
        let seed = opts.seed.wrapping_mul(0x9E37_79B9).wrapping_add(4 * r);
        let start = BellObservables {
            a1: CMatrix::identity(da),
            a2: CMatrix::identity(da),
            b1: sign(random_hermitian(db, seed).as_matrix())?,
            b2: sign(random_hermitian(db, seed + 1).as_matrix())?,
        };
        let (obs, its) = seesaw(rho, start, opts.iterations)?;
        iterations += its;
        stagnated |= its == opts.iterations;
        let v = obs.value(rho);
        if best.as_ref().map_or(true, |(b, _)| v > *b) {
            best = Some((v, obs));
        }
    }
    let (value, obs) = best.expect("at least one restart");
    Ok(MeasureResult { value, kind: MeasureKind::LowerBound, certificate: Some(Certificate::Observables(obs)), iterations, stagnated })
}
