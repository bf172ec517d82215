//! Lower bounds on entanglement: the binary relative-entropy gap function
//! `s(x)`, Pinsker-type checks, a correlator bound on mutual information and
//! the packing count behind the area law.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::eigen::eigh_raw;
use crate::linalg::{random_hermitian, trace_norm, CMatrix, DensityMatrix, Side, C64};
use crate::measures::mutual_information;
use crate::modular::relative_entropy;

const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// `s(x) = inf_{p − q = x} [p log(p/q) + (1−p) log((1−p)/(1−q))]` for
/// `0 < x < 1`.
///
/// The minimiser is searched in `q = t(1 − x)`, `t ∈ (0, 1)`, which keeps the
/// interval well scaled as `x → 1`; golden section brackets it and Newton
/// steps polish it.
pub fn gap_s(x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain { function: "gap_s", value: x });
    }
    let w = 1.0 - x;
    let f = |t: f64| {
        let q = t * w;
        let p = q + x;
        let one_p = w * (1.0 - t);
        let one_q = 1.0 - q;
        p * (p / q).ln() + one_p * (one_p / one_q).ln()
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut a = hi - GOLDEN * (hi - lo);
    let mut b = lo + GOLDEN * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..200 {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - GOLDEN * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + GOLDEN * (hi - lo);
            fb = f(b);
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let mut q = 0.5 * (lo + hi) * w;
    let mut best = f(q / w);
    // Newton on d/dq with the bracket as safeguard.
    for _ in 0..20 {
        let p = q + x;
        let (one_p, one_q) = (1.0 - p, 1.0 - q);
        let d1 = (p / q).ln() - (one_p / one_q).ln() - p / q + one_p / one_q;
        let d2 = 1.0 / p - 1.0 / q + 1.0 / one_p - 1.0 / one_q + x / (q * q) - x / (one_q * one_q);
        if !(d2 > 0.0) || !d1.is_finite() {
            break;
        }
        let next = q - d1 / d2;
        if !(next > 0.0 && next < w) {
            break;
        }
        let fnext = f(next / w);
        if fnext > best {
            break;
        }
        let done = (next - q).abs() <= 1e-16 * q.max(1e-300);
        q = next;
        best = fnext;
        if done {
            break;
        }
    }
    Ok(best)
}

/// Leading terms `2x² + 4x⁴/9 + 32x⁶/135` of `s` near zero.
pub fn gap_series(x: f64) -> f64 {
    let x2 = x * x;
    2.0 * x2 + 4.0 / 9.0 * x2 * x2 + 32.0 / 135.0 * x2 * x2 * x2
}

/// `s` extended to `[0, 1]`: `s(0) = 0`, `s(1) = ∞`.
pub fn gap_s_closed(x: f64) -> Result<f64> {
    if x <= 0.0 && x > -1e-15 {
        return Ok(0.0);
    }
    if (1.0..1.0 + 1e-12).contains(&x) {
        return Ok(f64::INFINITY);
    }
    gap_s(x)
}

/// Tabulated `s(x)/x²` on a uniform grid with monotone cubic Hermite
/// interpolation; the ratio is smooth and tends to 2 at the origin.
#[derive(Clone, Debug)]
pub struct GapFunctionTable {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
    /// Largest interpolation error seen at the cell midpoints when building.
    pub tolerance: f64,
}

impl GapFunctionTable {
    /// Table on `[x_min, x_max] ⊂ (0, 1)` with `n` nodes.
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(0.0 < x_min && x_min < x_max && x_max < 1.0) || n < 3 {
            return Err(Error::Precondition(format!("bad table range [{x_min}, {x_max}] with {n} nodes")));
        }
        let h = (x_max - x_min) / (n - 1) as f64;
        let xs: Vec<f64> = (0..n).map(|i| x_min + h * i as f64).collect();
        let ys = xs.iter().map(|&x| Ok(gap_s(x)? / (x * x))).collect::<Result<Vec<_>>>()?;
        let secants: Vec<f64> = ys.windows(2).map(|w| (w[1] - w[0]) / h).collect();
        let mut slopes = vec![0.0; n];
        slopes[0] = secants[0];
        slopes[n - 1] = secants[n - 2];
        for i in 1..n - 1 {
            let (l, r) = (secants[i - 1], secants[i]);
            slopes[i] = if l * r <= 0.0 { 0.0 } else { 2.0 * l * r / (l + r) };
        }
        let mut table = Self { xs, ys, slopes, tolerance: 0.0 };
        let mut worst = 0.0f64;
        for i in 0..n - 1 {
            let mid = 0.5 * (table.xs[i] + table.xs[i + 1]);
            let exact = gap_s(mid)?;
            worst = worst.max((table.interpolate(mid) * mid * mid - exact).abs() / exact);
        }
        table.tolerance = worst;
        Ok(table)
    }

    fn interpolate(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let h = self.xs[1] - self.xs[0];
        let i = (((x - self.xs[0]) / h).floor() as usize).min(n - 2);
        let t = (x - self.xs[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.ys[i]
            + (t3 - 2.0 * t2 + t) * h * self.slopes[i]
            + (-2.0 * t3 + 3.0 * t2) * self.ys[i + 1]
            + (t3 - t2) * h * self.slopes[i + 1]
    }

    /// Interpolated value inside the table, direct evaluation outside.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if x < self.xs[0] || x > *self.xs.last().expect("non-empty") {
            return gap_s(x);
        }
        Ok(self.interpolate(x) * x * x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapCheck {
    /// Relative entropy `H(ρ, ρ')`.
    pub relative_entropy: f64,
    /// `s` evaluated at the distance measure of the check.
    pub bound: f64,
    pub ok: bool,
}

/// `H(ρ, ρ') ≥ s(½‖ρ − ρ'‖₁)`.
pub fn entropy_gap_check(rho: &DensityMatrix, rho_prime: &DensityMatrix) -> Result<GapCheck> {
    let h = relative_entropy(rho, rho_prime)?;
    let x = 0.5 * trace_norm(&(rho.matrix() - rho_prime.matrix()))?;
    let bound = gap_s_closed(x.min(1.0))?;
    Ok(GapCheck { relative_entropy: h, bound, ok: h == f64::INFINITY || h >= bound - 1e-8 })
}

/// `H(ρ, ρ') ≥ s(1 − Tr √ρ √ρ')`, with the overlap of natural-cone vectors.
pub fn fidelity_lower_bound_check(rho: &DensityMatrix, rho_prime: &DensityMatrix) -> Result<GapCheck> {
    let h = relative_entropy(rho, rho_prime)?;
    let overlap = rho.sqrt()?.as_matrix().trace_product(rho_prime.sqrt()?.as_matrix()).re;
    let x = (1.0 - overlap).clamp(0.0, 1.0);
    let bound = if x < 1e-14 { 0.0 } else { gap_s_closed(x)? };
    Ok(GapCheck { relative_entropy: h, bound, ok: h == f64::INFINITY || h >= bound - 1e-8 })
}

/// Connected correlator `ω(a⊗b) − ω(a)ω(b)`.
pub fn connected_correlator(rho: &DensityMatrix, a: &CMatrix, b: &CMatrix) -> f64 {
    let full = rho.matrix().trace_product(&a.kron(b)).re;
    let ra = crate::linalg::partial_trace_matrix(rho.matrix(), rho.dim_a(), rho.dim_b(), Side::A);
    let rb = crate::linalg::partial_trace_matrix(rho.matrix(), rho.dim_a(), rho.dim_b(), Side::B);
    full - ra.trace_product(a).re * rb.trace_product(b).re
}

/// Operator `M` on `keep` with `correlator = Tr(M x)` for the fixed `other`.
fn conditional(rho: &DensityMatrix, other: &CMatrix, keep: Side) -> CMatrix {
    let (da, db) = (rho.dim_a(), rho.dim_b());
    let ra = crate::linalg::partial_trace_matrix(rho.matrix(), da, db, Side::A);
    let rb = crate::linalg::partial_trace_matrix(rho.matrix(), da, db, Side::B);
    let m = rho.matrix();
    match keep {
        Side::A => {
            let mean = rb.trace_product(other);
            CMatrix::from_fn(da, da, |i, j| {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..db {
                    for l in 0..db {
                        acc += other[(k, l)] * m[(i * db + l, j * db + k)];
                    }
                }
                acc - ra[(i, j)] * mean
            })
        }
        Side::B => {
            let mean = ra.trace_product(other);
            CMatrix::from_fn(db, db, |i, j| {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..da {
                    for l in 0..da {
                        acc += other[(k, l)] * m[(l * db + i, k * db + j)];
                    }
                }
                acc - rb[(i, j)] * mean
            })
        }
    }
}

fn sign_of(m: &CMatrix) -> Result<CMatrix> {
    let e = eigh_raw(&m.hermitian_part())?;
    Ok(e.apply(|w| C64::new(if w < 0.0 { -1.0 } else { 1.0 }, 0.0)))
}

/// `sup s(|ω(ab) − ω(a)ω(b)| / 2)` over sampled Hermitian contractions, each
/// sample improved by alternating sign-spectral updates.
pub fn mutual_info_correlator_bound(rho: &DensityMatrix, trials: usize, seed: u64) -> Result<f64> {
    if !rho.is_bipartite() {
        return Err(Error::Precondition("correlator bound needs a bipartite state".into()));
    }
    let mut best = 0.0f64;
    for t in 0..trials as u64 {
        let mut a = random_hermitian(rho.dim_a(), seed.wrapping_add(2 * t)).into_matrix();
        let mut b = random_hermitian(rho.dim_b(), seed.wrapping_add(2 * t + 1)).into_matrix();
        a = a.scale_re(1.0 / spectral_norm(&a)?);
        b = b.scale_re(1.0 / spectral_norm(&b)?);
        let mut corr = connected_correlator(rho, &a, &b).abs();
        for _ in 0..20 {
            a = sign_of(&conditional(rho, &b, Side::A))?;
            b = sign_of(&conditional(rho, &a, Side::B))?;
            let next = connected_correlator(rho, &a, &b).abs();
            let done = (next - corr).abs() < 1e-12;
            corr = corr.max(next);
            if done {
                break;
            }
        }
        best = best.max(corr);
    }
    let x = (best / 2.0).min(1.0);
    if x < 1e-15 {
        return Ok(0.0);
    }
    gap_s_closed(x)
}

/// Same bound together with the exact mutual information it sits under.
pub fn correlator_sandwich(rho: &DensityMatrix, trials: usize, seed: u64) -> Result<(f64, f64)> {
    Ok((mutual_info_correlator_bound(rho, trials, seed)?, mutual_information(rho)?.value))
}

fn spectral_norm(m: &CMatrix) -> Result<f64> {
    let e = eigh_raw(&m.hermitian_part())?;
    Ok(e.values.iter().fold(0.0f64, |a, w| a.max(w.abs())).max(f64::MIN_POSITIVE))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PackingConfig {
    /// Corridor width between the regions.
    pub epsilon: f64,
    /// Spatial dimension.
    pub dimension: u32,
    /// Boundary area `|∂A|` (used for `d ≥ 2`).
    pub boundary: f64,
    /// Interval lengths `|A|`, `|B|` (used for `d = 1`).
    pub lengths: (f64, f64),
    /// Distillable entanglement per cube pair; no positive value is known.
    pub distillable: f64,
}

impl Default for PackingConfig {
    fn default() -> Self {
        Self { epsilon: 0.01, dimension: 1, boundary: 1.0, lengths: (1.0, 1.0), distillable: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AreaLawBound {
    pub pairs: u64,
    pub bound: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub warning: Option<String>,
}

/// Number of disjoint region pairs that fit along the boundary and the
/// resulting lower bound `N · D₂`.
///
/// `d ≥ 2`: cube pairs of side `2ε` tile the boundary, `N = ⌊|∂A|/(2ε)^{d−1}⌋`.
/// `d = 1`: nested intervals `(−3^{−i}, −3^{−i−1})` mirrored across the
/// corridor, `N = ⌊log₃(min(|A|,|B|)/ε)⌋ − 1`.
pub fn area_law_lower(cfg: &PackingConfig) -> Result<AreaLawBound> {
    if !(cfg.epsilon > 0.0) || !(cfg.distillable >= 0.0) || cfg.dimension == 0 {
        return Err(Error::Precondition("need ε > 0, D₂ ≥ 0 and d ≥ 1".into()));
    }
    let pairs: i64 = if cfg.dimension == 1 {
        let ratio = cfg.lengths.0.min(cfg.lengths.1) / cfg.epsilon;
        // Largest k with 3^k ≤ ratio, robust to rounding at exact powers.
        let mut k: i64 = 0;
        let mut p = 3.0f64;
        while p <= ratio * (1.0 + 1e-12) {
            k += 1;
            p *= 3.0;
        }
        k - 1
    } else {
        let cell = (2.0 * cfg.epsilon).powi(cfg.dimension as i32 - 1);
        (cfg.boundary / cell * (1.0 + 1e-12)).floor() as i64
    };
    let pairs = pairs.max(0) as u64;
    let warning = (pairs == 0).then(|| format!("ε = {} too large: no region pair fits", cfg.epsilon));
    Ok(AreaLawBound { pairs, bound: pairs as f64 * cfg.distillable, warning })
}
