//! Conformal field theory bounds: diamond cross-ratios, quantum integers,
//! character sums over operator spectra, chiral interval bounds and the
//! closed-form shapes of the nuclearity-based bounds.

use std::f64::consts::PI;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest tail estimate tolerated relative to the retained partial sum.
pub const TAIL_TOLERANCE: f64 = 1e-8;

// ---------------------------------------------------------------------------
// Geometry

/// Point of Minkowski space as `(t, x, y, z)`.
pub type Event = [f64; 4];

/// Minkowski square with signature `(−+++)`.
pub fn minkowski_square(x: &Event, y: &Event) -> f64 {
    let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    -d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + d[3] * d[3]
}

/// Two causal diamonds given by their future and past tips.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiamondConfig {
    pub a_plus: Event,
    pub a_minus: Event,
    pub b_plus: Event,
    pub b_minus: Event,
}

fn future_timelike(plus: &Event, minus: &Event) -> bool {
    plus[0] > minus[0] && minkowski_square(plus, minus) < 0.0
}

impl DiamondConfig {
    pub fn new(a_plus: Event, a_minus: Event, b_plus: Event, b_minus: Event) -> Result<Self> {
        if !future_timelike(&a_plus, &a_minus) || !future_timelike(&b_plus, &b_minus) {
            return Err(Error::Precondition("diamond tips must be future-timelike separated".into()));
        }
        let cfg = Self { a_plus, a_minus, b_plus, b_minus };
        let (u, v) = cross_ratios(&cfg)?;
        tau_theta(u, v)?;
        Ok(cfg)
    }

    /// Diamonds of radii `r < R` centred at the origin.
    pub fn concentric(r: f64, big_r: f64) -> Result<Self> {
        if !(r > 0.0 && big_r > r) {
            return Err(Error::Precondition(format!("need 0 < r < R, got r = {r}, R = {big_r}")));
        }
        Self::new([r, 0.0, 0.0, 0.0], [-r, 0.0, 0.0, 0.0], [big_r, 0.0, 0.0, 0.0], [-big_r, 0.0, 0.0, 0.0])
    }

    /// Applies `x ↦ Λx + shift` to every tip.
    pub fn transformed(&self, lambda: &[[f64; 4]; 4], shift: &Event) -> Self {
        let map = |x: &Event| -> Event {
            let mut out = *shift;
            for (i, o) in out.iter_mut().enumerate() {
                *o += (0..4).map(|j| lambda[i][j] * x[j]).sum::<f64>();
            }
            out
        };
        Self { a_plus: map(&self.a_plus), a_minus: map(&self.a_minus), b_plus: map(&self.b_plus), b_minus: map(&self.b_minus) }
    }
}

/// Conformal cross-ratios
/// `u = (x_{B+}−x_{B−})²(x_{A+}−x_{A−})² / ((x_{A−}−x_{B−})²(x_{A+}−x_{B+})²)` and
/// `v = (x_{B+}−x_{B−})²(x_{A+}−x_{A−})² / ((x_{A−}−x_{B+})²(x_{A+}−x_{B−})²)`.
pub fn cross_ratios(cfg: &DiamondConfig) -> Result<(f64, f64)> {
    let num = minkowski_square(&cfg.b_plus, &cfg.b_minus) * minkowski_square(&cfg.a_plus, &cfg.a_minus);
    let du = minkowski_square(&cfg.a_minus, &cfg.b_minus) * minkowski_square(&cfg.a_plus, &cfg.b_plus);
    let dv = minkowski_square(&cfg.a_minus, &cfg.b_plus) * minkowski_square(&cfg.a_plus, &cfg.b_minus);
    let (u, v) = (num / du, num / dv);
    if !(u > 0.0 && v > 0.0 && u.is_finite() && v.is_finite()) {
        return Err(Error::Precondition(format!(
            "cross-ratios u = {u}, v = {v} are not positive; diamonds are not properly nested or spacelike"
        )));
    }
    Ok((u, v))
}

/// `θ = cosh⁻¹(1/√v − 1/√u)`, `τ = cosh⁻¹(1/√v + 1/√u)`.
pub fn tau_theta(u: f64, v: f64) -> Result<(f64, f64)> {
    if !(u > 0.0 && v > 0.0) {
        return Err(Error::Precondition("cross-ratios must be positive".into()));
    }
    let (a, b) = (1.0 / v.sqrt(), 1.0 / u.sqrt());
    let (diff, sum) = (a - b, a + b);
    // Concentric diamonds land on diff = 1 exactly, up to rounding.
    let diff = if diff < 1.0 && diff > 1.0 - 1e-12 { 1.0 } else { diff };
    if diff < 1.0 || sum < 1.0 {
        return Err(Error::Precondition(format!("diamonds not in admissible position (1/√v − 1/√u = {diff})")));
    }
    Ok((sum.acosh(), diff.acosh()))
}

/// `[n]_θ = (e^{nθ/2} − e^{−nθ/2})/(e^{θ/2} − e^{−θ/2})`, evaluated as the
/// geometric sum `Σ_k e^{(n−1−2k)θ/2}`.
pub fn quantum_integer(n: u32, theta: f64) -> f64 {
    (0..n).map(|k| ((n as f64 - 1.0 - 2.0 * k as f64) * theta / 2.0).exp()).sum()
}

// ---------------------------------------------------------------------------
// Spectra

/// Conformal multiplet with scaling dimension `delta` and Lorentz spins.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Operator {
    pub delta: f64,
    pub spin_left: f64,
    pub spin_right: f64,
    pub multiplicity: u64,
}

impl Operator {
    pub fn scalar(delta: f64, multiplicity: u64) -> Self {
        Self { delta, spin_left: 0.0, spin_right: 0.0, multiplicity }
    }

    pub fn twist(&self) -> f64 {
        self.delta - self.spin_left - self.spin_right
    }
}

fn half_integer(s: f64) -> bool {
    s >= 0.0 && (2.0 * s - (2.0 * s).round()).abs() < 1e-12
}

/// Operator content sorted by dimension. `cutoff` records the dimension
/// above which the table was truncated, if any.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTable {
    rows: Vec<Operator>,
    cutoff: Option<f64>,
}

impl SpectrumTable {
    /// Sorts rows, merges duplicates and validates each entry. The identity
    /// (`Δ = 0`, multiplicity 1) must be present.
    pub fn new(rows: Vec<Operator>, cutoff: Option<f64>) -> Result<Self> {
        let mut rows = rows;
        for r in &rows {
            if !(r.delta >= 0.0) || !half_integer(r.spin_left) || !half_integer(r.spin_right) || r.multiplicity == 0 {
                return Err(Error::Precondition(format!("invalid spectrum row {r:?}")));
            }
        }
        rows.sort_by(|a, b| (a.delta, a.spin_left, a.spin_right).partial_cmp(&(b.delta, b.spin_left, b.spin_right)).unwrap());
        let mut merged: Vec<Operator> = Vec::with_capacity(rows.len());
        for r in rows {
            match merged.last_mut() {
                Some(last) if last.delta == r.delta && last.spin_left == r.spin_left && last.spin_right == r.spin_right => {
                    last.multiplicity += r.multiplicity
                }
                _ => merged.push(r),
            }
        }
        match merged.first() {
            Some(id) if id.delta == 0.0 && id.multiplicity == 1 && id.spin_left == 0.0 && id.spin_right == 0.0 => {}
            _ => return Err(Error::Precondition("spectrum must contain the identity once (Δ = 0, multiplicity 1)".into())),
        }
        if merged.get(1).is_some_and(|r| r.delta == 0.0) {
            return Err(Error::Precondition("only the identity may have Δ = 0".into()));
        }
        Ok(Self { rows: merged, cutoff })
    }

    pub fn identity() -> Self {
        Self { rows: vec![Operator::scalar(0.0, 1)], cutoff: None }
    }

    pub fn rows(&self) -> &[Operator] {
        &self.rows
    }

    pub fn cutoff(&self) -> Option<f64> {
        self.cutoff
    }
}

/// Coefficients of `∏_{n≥1} (1 − qⁿ)^{−n²}` up to `q^{max_level}`.
pub fn free_scalar_coefficients(max_level: usize) -> Vec<BigUint> {
    let mut c = vec![BigUint::zero(); max_level + 1];
    c[0] = BigUint::one();
    for n in 1..=max_level {
        // (1 − qⁿ)^{−n²} as n² successive geometric factors.
        for _ in 0..n * n {
            for k in n..=max_level {
                let prev = c[k - n].clone();
                c[k] += prev;
            }
        }
    }
    c
}

pub const MAX_FREE_SCALAR_LEVEL: usize = 60;

/// Scalar spectrum of the 4d free massless scalar up to `Δ_max`, with the
/// level degeneracies of `∏(1 − qⁿ)^{−n²}`.
pub fn free_scalar_spectrum_4d(max_level: usize) -> Result<SpectrumTable> {
    if max_level > MAX_FREE_SCALAR_LEVEL {
        return Err(Error::Precondition(format!("Δ_max = {max_level} exceeds {MAX_FREE_SCALAR_LEVEL}")));
    }
    let rows = free_scalar_coefficients(max_level)
        .iter()
        .enumerate()
        .map(|(level, c)| {
            let m = c.to_u64().ok_or_else(|| Error::Precondition(format!("degeneracy at level {level} overflows u64")))?;
            Ok(Operator::scalar(level as f64, m))
        })
        .collect::<Result<Vec<_>>>()?;
    SpectrumTable::new(rows, Some(max_level as f64))
}

/// `log ∏_{n≥1} (1 − qⁿ)^{−n²} = −Σ n² log(1 − qⁿ)`, the untruncated free
/// scalar character.
pub fn free_scalar_log_character(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain { function: "free scalar character", value: q });
    }
    let mut total = 0.0;
    for n in 1u64.. {
        let nf = n as f64;
        let t = -nf * nf * (-q.powf(nf)).ln_1p();
        total += t;
        if t < 1e-17 * total && nf * (-q.ln()) > 1.0 {
            break;
        }
    }
    Ok(total)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacterBound {
    /// `log` of the character sum.
    pub value: f64,
    /// Estimated contribution of the levels beyond the cutoff, relative to
    /// the partial sum.
    pub tail_estimate: f64,
}

/// Geometric tail estimate: the top retained level times `q/(1 − q)`.
fn finish(sum: f64, top_level: f64, q: f64, cutoff: Option<f64>) -> Result<CharacterBound> {
    let tail = match cutoff {
        Some(_) if q >= 1.0 => f64::INFINITY,
        Some(_) => top_level * q / (1.0 - q) / sum,
        None => 0.0,
    };
    if tail > TAIL_TOLERANCE {
        return Err(Error::Divergent(format!(
            "truncated spectrum: estimated tail {tail:.3e} of the partial sum exceeds {TAIL_TOLERANCE:e}; extend the table or lower the ratio"
        )));
    }
    Ok(CharacterBound { value: sum.ln(), tail_estimate: tail })
}

/// `log Σ_𝒪 mult · ratio^{Δ_𝒪}` for concentric diamonds with `ratio = r/R`.
pub fn concentric_bound(spectrum: &SpectrumTable, ratio: f64) -> Result<CharacterBound> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::Domain { function: "concentric ratio", value: ratio });
    }
    general_bound_3p1(spectrum, -ratio.ln(), 0.0)
}

/// `log Σ_𝒪 e^{−τ Δ_𝒪} [2S^R+1]_θ [2S^L+1]_θ` summed over multiplets.
pub fn general_bound_3p1(spectrum: &SpectrumTable, tau: f64, theta: f64) -> Result<CharacterBound> {
    if !(tau > theta.abs()) {
        return Err(Error::Precondition(format!("need τ > |θ|, got τ = {tau}, θ = {theta}")));
    }
    let term = |r: &Operator| {
        r.multiplicity as f64
            * (-tau * r.delta).exp()
            * quantum_integer((2.0 * r.spin_right).round() as u32 + 1, theta)
            * quantum_integer((2.0 * r.spin_left).round() as u32 + 1, theta)
    };
    let sum: f64 = spectrum.rows.iter().map(term).sum();
    let top = spectrum.rows.last().map(|r| r.delta).unwrap_or(0.0);
    let top_level: f64 = spectrum.rows.iter().filter(|r| r.delta == top).map(term).sum();
    // Per unit of Δ the weight drops by e^{−(τ−|θ|)} at worst.
    finish(sum, top_level, (-(tau - theta.abs())).exp(), spectrum.cutoff)
}

// ---------------------------------------------------------------------------
// Chiral theories

/// Degeneracies `d_k` of the `L₀` eigenvalue `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiralSpectrum {
    levels: Vec<(u64, f64)>,
}

impl ChiralSpectrum {
    pub fn new(levels: Vec<(u64, f64)>) -> Result<Self> {
        let mut levels = levels;
        if let Some(bad) = levels.iter().find(|(_, d)| !(*d > 0.0) || !d.is_finite()) {
            return Err(Error::Precondition(format!("invalid degeneracy at level {}", bad.0)));
        }
        levels.sort_by_key(|(k, _)| *k);
        let mut merged: Vec<(u64, f64)> = Vec::new();
        for (k, d) in levels {
            match merged.last_mut() {
                Some(last) if last.0 == k => last.1 += d,
                _ => merged.push((k, d)),
            }
        }
        if merged.first() != Some(&(0, 1.0)) {
            return Err(Error::Precondition("chiral spectrum must start with the vacuum (0, 1)".into()));
        }
        Ok(Self { levels: merged })
    }

    /// Level degeneracies of `∏_{n≥1} (1 − qⁿ)^{−c}`: `c` chiral free bosons,
    /// whose character follows the Cardy form `cπ²/(6τ)` at small `τ`.
    pub fn free_bosons(c: u32, max_level: usize) -> Self {
        let mut d = vec![0.0f64; max_level + 1];
        d[0] = 1.0;
        for n in 1..=max_level {
            for _ in 0..c {
                for k in n..=max_level {
                    d[k] += d[k - n];
                }
            }
        }
        Self { levels: d.into_iter().enumerate().map(|(k, v)| (k as u64, v)).collect() }
    }

    pub fn levels(&self) -> &[(u64, f64)] {
        &self.levels
    }

    pub fn degeneracy(&self, level: u64) -> f64 {
        self.levels.iter().find(|(k, _)| *k == level).map(|(_, d)| *d).unwrap_or(0.0)
    }
}

/// Intervals `A = (a₁, a₂)` and `B = (b₂, b₁)` on the line with
/// `a₁ < a₂ < b₂ < b₁`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiralIntervals {
    pub a1: f64,
    pub a2: f64,
    pub b2: f64,
    pub b1: f64,
}

impl ChiralIntervals {
    pub fn new(a1: f64, a2: f64, b2: f64, b1: f64) -> Result<Self> {
        if !(a1 < a2 && a2 < b2 && b2 < b1) {
            return Err(Error::Precondition(format!("intervals must satisfy a₁ < a₂ < b₂ < b₁, got {a1}, {a2}, {b2}, {b1}")));
        }
        Ok(Self { a1, a2, b2, b1 })
    }

    /// Intervals of unit length at distance `d`.
    pub fn unit_at_distance(d: f64) -> Result<Self> {
        Self::new(0.0, 1.0, 1.0 + d, 2.0 + d)
    }

    /// `ξ = (a₂ − b₂)(b₁ − a₁)/((a₂ − a₁)(b₂ − b₁))`.
    pub fn xi(&self) -> f64 {
        (self.a2 - self.b2) * (self.b1 - self.a1) / ((self.a2 - self.a1) * (self.b2 - self.b1))
    }

    /// `r = dist/√(|A||B|)`.
    pub fn separation(&self) -> f64 {
        (self.b2 - self.a2) / ((self.a2 - self.a1) * (self.b1 - self.b2)).sqrt()
    }
}

/// `log Σ_k d_k e^{−2 sinh⁻¹(√ξ) k}` for a chiral theory, given `ξ > 0`.
pub fn chiral_bound_xi(spectrum: &ChiralSpectrum, xi: f64) -> Result<f64> {
    if !(xi > 0.0) {
        return Err(Error::Domain { function: "chiral cross-ratio", value: xi });
    }
    let beta = 2.0 * xi.sqrt().asinh();
    // The vacuum contributes 1; the rest is accumulated as a log-sum-exp.
    let logs: Vec<f64> = spectrum.levels[1..].iter().map(|(k, d)| d.ln() - beta * *k as f64).collect();
    if logs.is_empty() {
        return Ok(0.0);
    }
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let rest = top + logs.iter().map(|l| (l - top).exp()).sum::<f64>().ln();
    Ok(if rest < 0.0 { rest.exp().ln_1p() } else { rest + (-rest).exp().ln_1p() })
}

pub fn chiral_bound(spectrum: &ChiralSpectrum, intervals: &ChiralIntervals) -> Result<f64> {
    chiral_bound_xi(spectrum, intervals.xi())
}

/// Far-regime asymptote `n₁/(4ξ)`.
pub fn chiral_far_asymptote(spectrum: &ChiralSpectrum, xi: f64) -> f64 {
    spectrum.degeneracy(1) / (4.0 * xi)
}

/// Cardy asymptote `cπ²/(6β)` with `β = 2 sinh⁻¹√ξ ≈ 2√ξ`, minus `½ log μ`.
pub fn chiral_cardy_asymptote(central_charge: f64, mu_index: f64, xi: f64) -> f64 {
    let beta = 2.0 * xi.sqrt().asinh();
    central_charge * PI * PI / (6.0 * beta) - 0.5 * mu_index.ln()
}

// ---------------------------------------------------------------------------
// Closed-form nuclearity shapes

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum NuclearityShape {
    /// `log(1 + Σ_{j≥1} e^{−(Rmj)^k} e^{3(cmj)^{n/(n+1)}})`.
    StretchedSeries { c: f64, n: u32, k: f64, mass: f64, radius: f64 },
    /// `log(1 + exp[√2 (c cot(π/4n)/R)ⁿ])`.
    Massless { c: f64, n: u32, radius: f64 },
    /// `C R^{−α+1}`.
    Thermal { constant: f64, alpha: f64, radius: f64 },
    /// `C R^{−α}`.
    Vacuum { constant: f64, alpha: f64, radius: f64 },
    /// `C R^{−(d−2)}`.
    Dimensional { constant: f64, dimension: u32, radius: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeValue {
    pub value: f64,
    /// Terms summed for the series shape.
    pub terms: usize,
}

pub fn nuclearity_bound_shape(shape: &NuclearityShape) -> Result<ShapeValue> {
    let positive = |name: &str, v: f64| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(Error::Precondition(format!("{name} must be positive, got {v}")))
        }
    };
    match *shape {
        NuclearityShape::StretchedSeries { c, n, k, mass, radius } => {
            positive("c", c)?;
            positive("mass", mass)?;
            positive("R", radius)?;
            let exponent = n as f64 / (n as f64 + 1.0);
            if n == 0 || !(k > exponent && k < 1.0) {
                return Err(Error::Precondition(format!(
                    "series needs n ≥ 1 and k ∈ (n/(n+1), 1); choosing any k > n/(n+1) is required, got n = {n}, k = {k}"
                )));
            }
            let mut total = 0.0;
            let mut terms = 0;
            for j in 1u64..10_000_000 {
                let jf = j as f64;
                let log_t = -(radius * mass * jf).powf(k) + 3.0 * (c * mass * jf).powf(exponent);
                let t = log_t.exp();
                total += t;
                terms += 1;
                // Past the maximum of the exponent the terms decrease.
                let slope =
                    -k * (radius * mass).powf(k) * jf.powf(k - 1.0) + 3.0 * exponent * (c * mass).powf(exponent) * jf.powf(exponent - 1.0);
                if slope < 0.0 && t <= 1e-17 * total.max(f64::MIN_POSITIVE) {
                    break;
                }
            }
            Ok(ShapeValue { value: total.ln_1p(), terms })
        }
        NuclearityShape::Massless { c, n, radius } => {
            positive("c", c)?;
            positive("R", radius)?;
            if n == 0 {
                return Err(Error::Precondition("n must be at least 1".into()));
            }
            let cot = 1.0 / (PI / (4.0 * n as f64)).tan();
            let e = 2f64.sqrt() * (c * cot / radius).powi(n as i32);
            Ok(ShapeValue { value: e.exp().ln_1p(), terms: 1 })
        }
        NuclearityShape::Thermal { constant, alpha, radius } | NuclearityShape::Vacuum { constant, alpha, radius } => {
            positive("C", constant)?;
            positive("R", radius)?;
            if !(alpha > 1.0) {
                return Err(Error::Precondition(format!("α must exceed 1, got {alpha}")));
            }
            let power = if matches!(shape, NuclearityShape::Thermal { .. }) { 1.0 - alpha } else { -alpha };
            Ok(ShapeValue { value: constant * radius.powf(power), terms: 1 })
        }
        NuclearityShape::Dimensional { constant, dimension, radius } => {
            positive("C", constant)?;
            positive("R", radius)?;
            if dimension < 3 {
                return Err(Error::Precondition("dimension must be at least 3".into()));
            }
            Ok(ShapeValue { value: constant * radius.powi(-(dimension as i32 - 2)), terms: 1 })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn boost(rapidity: f64, axis: usize) -> [[f64; 4]; 4] {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        let (ch, sh) = (rapidity.cosh(), rapidity.sinh());
        m[0][0] = ch;
        m[axis][axis] = ch;
        m[0][axis] = sh;
        m[axis][0] = sh;
        m
    }

    #[test]
    fn concentric_cross_ratios() {
        let cfg = DiamondConfig::concentric(1.0, 2.0).unwrap();
        let (u, v) = cross_ratios(&cfg).unwrap();
        assert!((u - 64.0).abs() < 1e-12 && (v - 64.0 / 81.0).abs() < 1e-12);
        for (r, big) in [(0.3, 1.0), (1.0, 7.0), (2.0, 2.5)] {
            let (u, v) = cross_ratios(&DiamondConfig::concentric(r, big).unwrap()).unwrap();
            let (tau, theta) = tau_theta(u, v).unwrap();
            assert!((tau - (big / r).ln()).abs() < 1e-9 && theta.abs() < 1e-6);
        }
    }

    #[test]
    fn cross_ratios_are_poincare_and_scale_invariant() {
        let cfg = DiamondConfig::concentric(0.7, 2.0).unwrap();
        let (u0, v0) = cross_ratios(&cfg).unwrap();
        for (i, rap) in [0.3, -1.1, 2.0].iter().enumerate() {
            let moved = cfg.transformed(&boost(*rap, 1 + i), &[0.4, -2.0, 1.0, 3.0]);
            let (u, v) = cross_ratios(&moved).unwrap();
            assert!((u - u0).abs() < 1e-9 * u0 && (v - v0).abs() < 1e-9 * v0);
        }
        let mut dil = [[0.0; 4]; 4];
        for (i, row) in dil.iter_mut().enumerate() {
            row[i] = 3.5;
        }
        let (u, v) = cross_ratios(&cfg.transformed(&dil, &[0.0; 4])).unwrap();
        assert!((tau_theta(u, v).unwrap().0 - tau_theta(u0, v0).unwrap().0).abs() < 1e-9);
    }

    #[test]
    fn tilted_diamonds_have_small_theta() {
        let base = DiamondConfig::concentric(1.0, 3.0).unwrap();
        let mut prev = 0.0;
        for shift in [0.05, 0.1, 0.2] {
            let cfg = DiamondConfig::new([1.0, shift, 0.0, 0.0], [-1.0, -shift, 0.0, 0.0], base.b_plus, base.b_minus).unwrap();
            let (u, v) = cross_ratios(&cfg).unwrap();
            let (tau, theta) = tau_theta(u, v).unwrap();
            assert!(u > v && theta > prev && tau > theta, "{shift} {u} {v} {tau} {theta}");
            prev = theta;
        }
        assert!(tau_theta(1.0, 1.0).is_err());
        assert!(DiamondConfig::new([1.0, 0.0, 0.0, 0.0], [-1.0, 0.0, 0.0, 0.0], [1.0, 5.0, 0.0, 0.0], [-1.0, 5.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn quantum_integers() {
        for t in [0.0, 1.0, 3.0] {
            assert_eq!(quantum_integer(1, t), 1.0);
        }
        assert_eq!(quantum_integer(5, 0.0), 5.0);
        assert!((quantum_integer(3, 1.0) - (E + 1.0 + 1.0 / E)).abs() < 1e-12);
        for n in 1..8 {
            for t in [0.2, 1.3, 4.0] {
                let closed = ((n as f64 * t / 2.0).sinh()) / (t / 2.0).sinh();
                assert!((quantum_integer(n, t) - closed).abs() < 1e-12 * closed);
                assert!((quantum_integer(n, t) - quantum_integer(n, -t)).abs() < 1e-12 * closed);
            }
        }
    }
    use std::f64::consts::E;

    /// Multisets of parts where part `n` comes in `n²` colours.
    fn brute_force_count(level: usize) -> u64 {
        fn binom(n: u64, k: u64) -> u64 {
            (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
        }
        fn go(rest: usize, max_part: usize) -> u64 {
            if rest == 0 {
                return 1;
            }
            let mut total = 0;
            for part in (1..=max_part.min(rest)).rev() {
                // Use the part `m ≥ 1` times, then only smaller parts.
                let colours = (part * part) as u64;
                let mut m = 1;
                while m * part <= rest {
                    total += binom(colours + m as u64 - 1, m as u64) * go(rest - m * part, part - 1);
                    m += 1;
                }
            }
            total
        }
        go(level, level)
    }

    #[test]
    fn free_scalar_coefficients_match_enumeration() {
        let c = free_scalar_coefficients(10);
        assert_eq!(c[0], BigUint::one());
        assert_eq!(c[1], BigUint::one());
        for (level, coeff) in c.iter().enumerate() {
            assert_eq!(coeff.to_u64().unwrap(), brute_force_count(level), "level {level}");
        }
        assert!(free_scalar_spectrum_4d(60).is_ok());
        assert!(free_scalar_spectrum_4d(61).is_err());
    }

    #[test]
    fn concentric_values() {
        assert_eq!(concentric_bound(&SpectrumTable::identity(), 0.5).unwrap().value, 0.0);
        let one = SpectrumTable::new(vec![Operator::scalar(0.0, 1), Operator::scalar(3.0, 4)], None).unwrap();
        let v = concentric_bound(&one, 0.05).unwrap().value;
        assert!((v / (4.0 * 0.05f64.powi(3)) - 1.0).abs() < 1e-3);
        let table = free_scalar_spectrum_4d(60).unwrap();
        let small = concentric_bound(&table, 0.2).unwrap();
        assert!((small.value - free_scalar_log_character(0.2).unwrap()).abs() < 1e-9 * small.value);
        assert!(concentric_bound(&table, 0.9).is_err());
        let tau: f64 = 0.05;
        let v = free_scalar_log_character((-tau).exp()).unwrap();
        assert!((v / (PI.powi(4) / 45.0 / tau.powi(3)) - 1.0).abs() < 0.05);
        let mut prev = 0.0;
        for q in [0.01, 0.05, 0.1, 0.2, 0.3] {
            let v = concentric_bound(&table, q).unwrap().value;
            assert!(v > prev);
            prev = v;
        }
        assert!(concentric_bound(&table, 1e-8).unwrap().value < 1e-7);
    }

    #[test]
    fn general_bound_reductions() {
        let scalars = SpectrumTable::new(vec![Operator::scalar(0.0, 1), Operator::scalar(1.5, 2), Operator::scalar(4.0, 7)], None).unwrap();
        let tau: f64 = 0.8;
        let a = general_bound_3p1(&scalars, tau, 0.0).unwrap().value;
        let b = concentric_bound(&scalars, (-tau).exp()).unwrap().value;
        assert!((a - b).abs() < 1e-12);
        let spinning = Operator { delta: 2.0, spin_left: 0.5, spin_right: 0.5, multiplicity: 1 };
        let t = SpectrumTable::new(vec![Operator::scalar(0.0, 1), spinning], None).unwrap();
        let (tau, theta): (f64, f64) = (1.0, 0.4);
        let want = (1.0 + (-2.0 * tau).exp() * quantum_integer(2, theta).powi(2)).ln();
        assert!((general_bound_3p1(&t, tau, theta).unwrap().value - want).abs() < 1e-14);
        // Slope against τ along τ = 1.01 θ is minus the twist.
        let f = |tau: f64| general_bound_3p1(&t, tau, tau / 1.01).unwrap().value.ln();
        let slope = (f(30.0) - f(20.0)) / 10.0;
        let twist = 2.0 - 1.0 / 1.01;
        assert!((slope + twist).abs() < 0.05 * twist, "{slope}");
        assert!(general_bound_3p1(&t, 1.0, 1.0).is_err());
    }

    #[test]
    fn spectrum_validation() {
        assert!(SpectrumTable::new(vec![Operator::scalar(1.0, 1)], None).is_err());
        let bad_spin = Operator { delta: 2.0, spin_left: 0.3, spin_right: 0.0, multiplicity: 1 };
        assert!(SpectrumTable::new(vec![Operator::scalar(0.0, 1), bad_spin], None).is_err());
        let t = SpectrumTable::new(vec![Operator::scalar(2.0, 1), Operator::scalar(0.0, 1), Operator::scalar(2.0, 3)], None).unwrap();
        assert_eq!(t.rows().len(), 2);
        assert_eq!(t.rows()[1].multiplicity, 4);
    }

    #[test]
    fn chiral_far_and_cardy_regimes() {
        let vac = ChiralSpectrum::new(vec![(0, 1.0)]).unwrap();
        assert_eq!(chiral_bound_xi(&vac, 3.0).unwrap(), 0.0);
        let n1 = 3.0;
        let s = ChiralSpectrum::new(vec![(0, 1.0), (1, n1)]).unwrap();
        for xi in [100.0, 1e4] {
            let v = chiral_bound_xi(&s, xi).unwrap();
            assert!((v / chiral_far_asymptote(&s, xi) - 1.0).abs() < 0.1);
        }
        let iv = ChiralIntervals::unit_at_distance(50.0).unwrap();
        assert!((iv.xi() / iv.separation().powi(2) - 1.0).abs() < 0.05);
        assert!(ChiralIntervals::new(0.0, 2.0, 1.0, 3.0).is_err());
        // One chiral boson: c = 1, μ = 1.
        let boson = ChiralSpectrum::free_bosons(1, 16_000);
        let xi = 1e-4;
        let v = chiral_bound_xi(&boson, xi).unwrap();
        assert!((v / chiral_cardy_asymptote(1.0, 1.0, xi) - 1.0).abs() < 0.1, "{v}");
    }

    #[test]
    fn nuclearity_shapes() {
        let s = NuclearityShape::StretchedSeries { c: 1.0, n: 3, k: 0.8, mass: 1.0, radius: 10.0 };
        let v = nuclearity_bound_shape(&s).unwrap();
        assert!(v.value.is_finite() && v.value > 0.0);
        let direct: f64 = (1..2000).map(|j: i32| (-(10.0 * j as f64).powf(0.8) + 3.0 * (j as f64).powf(0.75)).exp()).sum();
        assert!((v.value - direct.ln_1p()).abs() < 1e-12);
        assert!(v.value <= direct);
        assert!(nuclearity_bound_shape(&NuclearityShape::StretchedSeries { c: 1.0, n: 3, k: 0.7, mass: 1.0, radius: 10.0 }).is_err());
        let mut prev = f64::INFINITY;
        for r in [0.5, 1.0, 2.0, 10.0, 1e4] {
            let v = nuclearity_bound_shape(&NuclearityShape::Massless { c: 1.0, n: 2, radius: r }).unwrap().value;
            assert!(v < prev);
            prev = v;
        }
        assert!((prev - 2f64.ln()).abs() < 1e-6);
        let alpha = 2.5;
        let at = |r| nuclearity_bound_shape(&NuclearityShape::Thermal { constant: 3.0, alpha, radius: r }).unwrap().value;
        assert!((at(4.0) / at(2.0) - 2f64.powf(1.0 - alpha)).abs() < 1e-14);
        let vac = |r| nuclearity_bound_shape(&NuclearityShape::Vacuum { constant: 3.0, alpha, radius: r }).unwrap().value;
        assert!((vac(4.0) / vac(2.0) - 2f64.powf(-alpha)).abs() < 1e-14);
        let dim = nuclearity_bound_shape(&NuclearityShape::Dimensional { constant: 1.0, dimension: 4, radius: 2.0 }).unwrap().value;
        assert!((dim - 0.25).abs() < 1e-15);
    }
}
