//! Bounds for integrable models with a factorising two-body S-matrix.
//!
//! Contents: the scattering function and its strip norm, the modified Bessel
//! function `K₀`, the kernels `T_{κ,s}` and `A_{κ,s}` on a Gauss–Legendre
//! grid, wedge traces `Tr ∧ⁿA`, the resulting vacuum bound for two regions at
//! distance `R`, and the half-line Dirac bound built from `‖T_{π,s}‖₁`.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::eigen::eigh_raw;
use crate::linalg::{CMatrix, C64};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

// ---------------------------------------------------------------------------
// Scattering function

/// `S₂(ζ) = Π_k (sinh ζ − i sin b_k)/(sinh ζ + i sin b_k)` with an odd number
/// of poles `b_k ∈ (0, π/2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SMatrix {
    poles: Vec<f64>,
}

impl TryFrom<Vec<f64>> for SMatrix {
    type Error = Error;
    fn try_from(poles: Vec<f64>) -> Result<Self> {
        Self::new(poles)
    }
}

impl From<SMatrix> for Vec<f64> {
    fn from(s: SMatrix) -> Self {
        s.poles
    }
}

impl SMatrix {
    pub fn new(poles: Vec<f64>) -> Result<Self> {
        if poles.len() % 2 == 0 {
            return Err(Error::Precondition(format!("need an odd number of poles, got {}", poles.len())));
        }
        if let Some(&b) = poles.iter().find(|&&b| !(b > 0.0 && b < PI / 2.0)) {
            return Err(Error::Precondition(format!("pole parameter {b} outside (0, π/2)")));
        }
        Ok(Self { poles })
    }

    pub fn poles(&self) -> &[f64] {
        &self.poles
    }

    pub fn min_pole(&self) -> f64 {
        self.poles.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        let sh = z.sinh();
        let mut acc = C64::new(1.0, 0.0);
        for &b in &self.poles {
            let shift = C64::new(0.0, b.sin());
            let den = sh + shift;
            if den.norm() < 1e-12 {
                return Err(Error::Pole { pole: b, distance: den.norm() });
            }
            acc *= (sh - shift) / den;
        }
        Ok(acc)
    }

    /// Largest deviation from unitarity, `S(0) = −1`, `S(−θ)S(θ) = 1` and
    /// `S(θ + iπ)S(θ) = 1` over a grid of real rapidities.
    pub fn property_residual(&self) -> Result<f64> {
        let mut worst = (self.eval(C64::new(0.0, 0.0))? + C64::new(1.0, 0.0)).norm();
        for i in -40..=40 {
            let t = 0.2 * i as f64 + 0.013;
            let z = C64::new(t, 0.0);
            let s = self.eval(z)?;
            worst = worst.max((s.norm() - 1.0).abs());
            worst = worst.max((self.eval(-z)? * s - 1.0).norm());
            worst = worst.max((self.eval(z + C64::new(0.0, PI))? * s - 1.0).norm());
        }
        Ok(worst)
    }
}

/// `S₂(ζ)` for a given pole set.
pub fn s2_eval(s: &SMatrix, z: C64) -> Result<C64> {
    s.eval(z)
}

/// Sinh-Gordon model at coupling `g`: one pole at `b = πg²/(1 + g²)`.
pub fn sinh_gordon(g: f64) -> Result<SMatrix> {
    if !(g > 0.0) {
        return Err(Error::Precondition(format!("coupling must be positive, got {g}")));
    }
    let b = PI * g * g / (1.0 + g * g);
    if b >= PI / 2.0 {
        return Err(Error::Precondition(format!("g = {g} gives b = {b} ≥ π/2; only b < π/2 is supported (g < 1)")));
    }
    SMatrix::new(vec![b])
}

/// `‖S₂‖_κ = sup |S₂|` on the strip `−κ < Im ζ < π + κ`, attained on the
/// boundary lines by the maximum-modulus principle.
pub fn strip_sup_norm(s: &SMatrix, kappa: f64) -> Result<f64> {
    if !(kappa > 0.0 && kappa < s.min_pole()) {
        return Err(Error::Precondition(format!("κ = {kappa} must lie in (0, {})", s.min_pole())));
    }
    let mut best = 1.0f64;
    for im in [-kappa, PI + kappa] {
        let f = |t: f64| s.eval(C64::new(t, im)).map(|v| v.norm());
        let (lo, hi, n) = (-25.0, 25.0, 5001);
        let h = (hi - lo) / (n - 1) as f64;
        let mut arg = 0;
        let mut top = f64::NEG_INFINITY;
        for i in 0..n {
            let v = f(lo + h * i as f64)?;
            if v > top {
                top = v;
                arg = i;
            }
        }
        // Golden-section refinement around the best grid point.
        let (mut a, mut b) = (lo + h * (arg as f64 - 1.0), lo + h * (arg as f64 + 1.0));
        for _ in 0..80 {
            let c = b - 0.618_033_988_749_894_8 * (b - a);
            let d = a + 0.618_033_988_749_894_8 * (b - a);
            if f(c)? > f(d)? {
                b = d;
            } else {
                a = c;
            }
        }
        best = best.max(top).max(f(0.5 * (a + b))?);
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Special functions and quadrature

/// Modified Bessel function `K₀(x)`: power series for `x ≤ 2`, Steed's
/// continued fraction above.
pub fn bessel_k0(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain { function: "bessel_k0", value: x });
    }
    if x <= 2.0 {
        let y = 0.25 * x * x;
        let (mut term, mut harmonic) = (1.0, 0.0);
        let mut i0 = 1.0;
        let mut tail = 0.0;
        for k in 1..200 {
            let kf = k as f64;
            term *= y / (kf * kf);
            harmonic += 1.0 / kf;
            i0 += term;
            tail += term * harmonic;
            if term < 1e-18 * i0 {
                break;
            }
        }
        return Ok(-((0.5 * x).ln() + EULER_GAMMA) * i0 + tail);
    }
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let (mut q1, mut q2) = (0.0, 1.0);
    let a1 = 0.25;
    let (mut q, mut c) = (a1, a1);
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..10_000 {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-16 {
            break;
        }
    }
    Ok((PI / (2.0 * x)).sqrt() * (-x).exp() / s)
}

/// Gauss–Legendre nodes (ascending) and weights on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 {
                1.0
            } else if n == 1 {
                z
            } else {
                p1
            };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Gauss–Legendre rule on a symmetric interval `[−Θ, Θ]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub cutoff: f64,
}

impl KernelGrid {
    pub fn new(cutoff: f64, count: usize) -> Result<Self> {
        if !(cutoff > 0.0) || count == 0 {
            return Err(Error::Precondition("grid needs a positive cutoff and at least one node".into()));
        }
        let (x, w) = gauss_legendre(count);
        Ok(Self { nodes: x.iter().map(|t| t * cutoff).collect(), weights: w.iter().map(|t| t * cutoff).collect(), cutoff })
    }

    /// Cutoff with `e^{−s cosh Θ / 2} < 1e-14`: `Θ = arccosh(1 + 66/s)`.
    pub fn for_scale(s: f64, count: usize) -> Result<Self> {
        if !(s > 0.0) {
            return Err(Error::Domain { function: "kernel grid", value: s });
        }
        Self::new((1.0 + 66.0 / s).acosh(), count)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn refined(&self) -> Self {
        Self::new(self.cutoff, 2 * self.len()).expect("valid grid")
    }
}

/// Default node count for kernel grids.
pub const DEFAULT_NODES: usize = 96;

// ---------------------------------------------------------------------------
// Kernels

fn check_kernel_args(kappa: f64, s: f64) -> Result<()> {
    if kappa == 0.0 || !kappa.is_finite() {
        return Err(Error::Domain { function: "kernel κ", value: kappa });
    }
    if !(s > 0.0) {
        return Err(Error::Domain { function: "kernel s", value: s });
    }
    Ok(())
}

/// Matrix of `√w_i T_{κ,s}(θ_i, θ'_j) √w'_j` between two grids, with
/// `T_{κ,s}(θ, θ') = −sign(κ) e^{−s cosh θ / 2} / (2πi (θ' − θ + iκ/2))`.
pub fn t_kernel_matrix(kappa: f64, s: f64, rows: &KernelGrid, cols: &KernelGrid) -> Result<CMatrix> {
    check_kernel_args(kappa, s)?;
    let sign = kappa.signum();
    Ok(CMatrix::from_fn(rows.len(), cols.len(), |i, j| {
        let (t, tp) = (rows.nodes[i], cols.nodes[j]);
        let den = C64::new(0.0, 2.0 * PI) * C64::new(tp - t, kappa / 2.0);
        let v = -sign * (-0.5 * s * t.cosh()).exp() / den;
        v * (rows.weights[i] * cols.weights[j]).sqrt()
    }))
}

/// Discretised `T T*`: `T = e^{−s cosh θ/2} Θ(κp) e^{−|κp|/2}` gives
/// `(T T*)(θ, θ') = e^{−s(cosh θ + cosh θ')/2} · (∓i/2π)/(θ − θ' ∓ iκ)`.
pub fn t_kernel_gram(kappa: f64, s: f64, grid: &KernelGrid) -> Result<CMatrix> {
    check_kernel_args(kappa, s)?;
    let e: Vec<f64> = grid.nodes.iter().map(|t| (-0.5 * s * t.cosh()).exp()).collect();
    let k = kappa.abs();
    let sign = kappa.signum();
    Ok(CMatrix::from_fn(grid.len(), grid.len(), |i, j| {
        let x = grid.nodes[i] - grid.nodes[j];
        let kern = C64::new(0.0, -sign / (2.0 * PI)) / C64::new(x, -sign * k);
        kern * (e[i] * e[j] * (grid.weights[i] * grid.weights[j]).sqrt())
    }))
}

/// `‖T_{κ,s}‖₁ = Tr (T T*)^{1/2}` on the given grid.
pub fn t_kernel_trace_norm(kappa: f64, s: f64, grid: &KernelGrid) -> Result<f64> {
    let g = t_kernel_gram(kappa, s, grid)?;
    let e = eigh_raw(&g)?;
    Ok(e.values.iter().map(|&v| v.max(0.0).sqrt()).sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceNormEstimate {
    pub value: f64,
    /// Value on the doubled grid.
    pub refined: f64,
    pub converged: bool,
}

/// [`t_kernel_trace_norm`] on the default grid for `s`, with a doubling check
/// (relative change below 0.5%).
pub fn t_kernel_trace_norm_checked(kappa: f64, s: f64, count: usize) -> Result<TraceNormEstimate> {
    let grid = KernelGrid::for_scale(s, count)?;
    let value = t_kernel_trace_norm(kappa, s, &grid)?;
    let refined = t_kernel_trace_norm(kappa, s, &grid.refined())?;
    let converged = (value - refined).abs() <= 5e-3 * refined.abs();
    if !converged {
        return Err(Error::Discretisation(format!(
            "‖T‖₁ moved from {value} to {refined} under grid doubling; increase the cutoff or node count"
        )));
    }
    Ok(TraceNormEstimate { value: refined, refined, converged })
}

/// `A_{κ,s}(θ, θ') = (|κ|/π) e^{−s cosh θ/2} e^{−s cosh θ'/2} / ((θ − θ')² + κ²)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AKernel {
    pub kappa: f64,
    pub s: f64,
}

impl AKernel {
    pub fn new(kappa: f64, s: f64) -> Result<Self> {
        check_kernel_args(kappa, s)?;
        Ok(Self { kappa, s })
    }

    pub fn eval(&self, t: f64, tp: f64) -> f64 {
        let k = self.kappa.abs();
        k / PI * (-0.5 * self.s * (t.cosh() + tp.cosh())).exp() / ((t - tp).powi(2) + k * k)
    }

    /// Symmetric Nyström matrix `√w_i A(θ_i, θ_j) √w_j`.
    pub fn discretize(&self, grid: &KernelGrid) -> CMatrix {
        CMatrix::from_fn(grid.len(), grid.len(), |i, j| {
            C64::new(self.eval(grid.nodes[i], grid.nodes[j]) * (grid.weights[i] * grid.weights[j]).sqrt(), 0.0)
        })
    }
}

pub fn a_kernel(kappa: f64, s: f64, grid: &KernelGrid) -> Result<CMatrix> {
    Ok(AKernel::new(kappa, s)?.discretize(grid))
}

/// Elementary symmetric polynomial `e_n` of `values`.
pub fn elementary_symmetric(values: &[f64], n: usize) -> f64 {
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for &v in values {
        for k in (1..=n.min(values.len())).rev() {
            e[k] += v * e[k - 1];
        }
    }
    e[n]
}

/// `Tr ∧ⁿ M = e_n(spec M)` for a Hermitian matrix.
pub fn wedge_trace_spectral(m: &CMatrix, n: usize) -> Result<f64> {
    let e = eigh_raw(m)?;
    Ok(elementary_symmetric(&e.values, n))
}

fn det_small(mut a: Vec<f64>, n: usize) -> f64 {
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i * n + c].abs().total_cmp(&a[j * n + c].abs())).unwrap();
        if a[p * n + c] == 0.0 {
            return 0.0;
        }
        if p != c {
            for k in 0..n {
                a.swap(c * n + k, p * n + k);
            }
            det = -det;
        }
        let piv = a[c * n + c];
        det *= piv;
        for r in c + 1..n {
            let f = a[r * n + c] / piv;
            if f != 0.0 {
                for k in c..n {
                    a[r * n + k] -= f * a[c * n + k];
                }
            }
        }
    }
    det
}

/// `(1/n!) ∫ dⁿθ det[A(θ_i, θ_j)]` by product Gauss quadrature. Tuples with
/// repeated nodes have zero determinant, so the sum runs over increasing
/// index sets, which absorbs the `1/n!`.
pub fn wedge_trace_determinant(kernel: &AKernel, n: usize, grid: &KernelGrid) -> f64 {
    let m = grid.len();
    if n == 0 {
        return 1.0;
    }
    if n > m {
        return 0.0;
    }
    let table: Vec<f64> = (0..m * m).map(|k| kernel.eval(grid.nodes[k / m], grid.nodes[k % m])).collect();
    let mut idx: Vec<usize> = (0..n).collect();
    let mut total = 0.0;
    loop {
        let w: f64 = idx.iter().map(|&i| grid.weights[i]).product();
        let sub: Vec<f64> = (0..n * n).map(|k| table[idx[k / n] * m + idx[k % n]]).collect();
        total += w * det_small(sub, n);
        // Next increasing index set.
        let mut pos = n;
        while pos > 0 && idx[pos - 1] == m - n + pos - 1 {
            pos -= 1;
        }
        if pos == 0 {
            break;
        }
        idx[pos - 1] += 1;
        for k in pos..n {
            idx[k] = idx[k - 1] + 1;
        }
    }
    total
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WedgeTrace {
    /// `e_n` of the eigenvalues on the spectral grid.
    pub spectral: f64,
    /// Determinant integral on an independent grid.
    pub determinant: f64,
}

impl WedgeTrace {
    pub fn relative_gap(&self) -> f64 {
        let scale = self.spectral.abs().max(self.determinant.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.spectral - self.determinant).abs() / scale
        }
    }
}

pub const MAX_WEDGE_ORDER: usize = 6;

/// `Tr ∧ⁿ A_{κ,s}` by both routes. The determinant route uses a coarser
/// grid of its own so that the two are not algebraically identical.
pub fn wedge_trace(kernel: &AKernel, n: usize, grid: &KernelGrid) -> Result<WedgeTrace> {
    if n == 0 || n > MAX_WEDGE_ORDER {
        return Err(Error::Precondition(format!("wedge order {n} outside 1..={MAX_WEDGE_ORDER}")));
    }
    let spectral = wedge_trace_spectral(&kernel.discretize(grid), n)?;
    let coarse = match n {
        1..=3 => 40,
        4 => 32,
        _ => 24,
    };
    let determinant = wedge_trace_determinant(kernel, n, &KernelGrid::new(grid.cutoff, coarse)?);
    let w = WedgeTrace { spectral, determinant };
    if w.relative_gap() > 0.05 && spectral.abs().max(determinant.abs()) > 1e-280 {
        return Err(Error::Discretisation(format!("wedge trace routes disagree: {spectral} vs {determinant}")));
    }
    Ok(w)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HadamardCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// `Tr ∧ⁿ A_{κ,s} ≤ (1/n!) (2K₀(s)/(|κ|π))ⁿ`.
pub fn hadamard_bound_check(kappa: f64, s: f64, n: usize, grid: &KernelGrid) -> Result<HadamardCheck> {
    let lhs = wedge_trace(&AKernel::new(kappa, s)?, n, grid)?.spectral;
    let rhs = (2.0 * bessel_k0(s)? / (kappa.abs() * PI)).powi(n as i32) / factorial(n);
    Ok(HadamardCheck { lhs, rhs, ok: lhs <= rhs * (1.0 + 1e-6) })
}

// ---------------------------------------------------------------------------
// Vacuum bound

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VacuumBound {
    /// `ν = Σ_n ‖Υ_n‖ …`; `None` when the series diverges.
    pub series: Option<f64>,
    /// `log ν`, the bound on the relative entanglement entropy.
    pub log_bound: Option<f64>,
    /// Closed-form large-distance asymptote.
    pub asymptotic: f64,
    /// Ratio of consecutive terms for large `n`.
    pub ratio: f64,
    pub terms: usize,
    pub strip_norm: f64,
}

impl VacuumBound {
    pub fn diverges(&self) -> bool {
        self.series.is_none()
    }
}

/// Series bound for the vacuum of an integrable model on two regions at
/// distance `R`:
/// `ν = 1 + Σ_{n≥1} [c₁K₀((1−δ)mR)]ⁿ · max{1, ‖S₂‖_κⁿ (2K₀(mRδ sin κ)/(πκ))^{1/2}}`
/// with `c₁ = 4e‖S₂‖_κ^{1/2}/(κπ)`.
pub fn vacuum_bound(s: &SMatrix, mass: f64, radius: f64, kappa: f64, delta: f64) -> Result<VacuumBound> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Precondition(format!("δ = {delta} outside (0, 1)")));
    }
    if !(mass > 0.0 && radius > 0.0) {
        return Err(Error::Precondition("mass and distance must be positive".into()));
    }
    let norm = strip_sup_norm(s, kappa)?;
    let mr = mass * radius;
    let c1 = 4.0 * E * norm.sqrt() / (kappa * PI);
    let x = c1 * bessel_k0((1.0 - delta) * mr)?;
    let f = (2.0 * bessel_k0(mr * delta * kappa.sin())? / (PI * kappa)).sqrt();
    let ratio = x * norm.max(1.0);
    let asymptotic = 4.0 * E / kappa * (norm / (PI * mr)).sqrt() * (-mr * (1.0 - delta)).exp();
    if ratio >= 1.0 {
        return Ok(VacuumBound { series: None, log_bound: None, asymptotic, ratio, terms: 0, strip_norm: norm });
    }
    // The n = 0 term is the vacuum component and equals 1; the rest is summed
    // on its own so that log ν keeps full precision when ν − 1 is tiny.
    let mut excess = 0.0;
    let mut terms = 1;
    let (mut xn, mut nn) = (1.0, 1.0);
    for _ in 1..100_000 {
        xn *= x;
        nn *= norm;
        let t = xn * (nn * f).max(1.0);
        excess += t;
        terms += 1;
        if t < 1e-16 * excess {
            break;
        }
    }
    Ok(VacuumBound { series: Some(1.0 + excess), log_bound: Some(excess.ln_1p()), asymptotic, ratio, terms, strip_norm: norm })
}

// ---------------------------------------------------------------------------
// Dirac field on a half space

/// `‖T_{π,s}‖₁` tabulated on a logarithmic `s` grid and interpolated with a
/// cubic in `(log s, log ‖T‖₁)`.
#[derive(Clone, Debug)]
pub struct TraceNormTable {
    log_s: Vec<f64>,
    log_v: Vec<f64>,
    count: usize,
}

impl TraceNormTable {
    pub fn new(s_min: f64, s_max: f64, per_decade: usize, count: usize) -> Result<Self> {
        if !(s_min > 0.0 && s_max > s_min) {
            return Err(Error::Precondition(format!("bad table range [{s_min}, {s_max}]")));
        }
        let (a, b) = (s_min.ln() - 0.1, s_max.ln() + 0.1);
        let n = (((b - a) / 10f64.ln() * per_decade as f64).ceil() as usize).max(4) + 1;
        let h = (b - a) / (n - 1) as f64;
        let log_s: Vec<f64> = (0..n).map(|i| a + h * i as f64).collect();
        let log_v = log_s
            .iter()
            .map(|&ls| {
                let s = ls.exp();
                Ok(t_kernel_trace_norm(PI, s, &KernelGrid::for_scale(s, count)?)?.ln())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { log_s, log_v, count })
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        let ls = s.ln();
        let n = self.log_s.len();
        if ls < self.log_s[0] || ls > self.log_s[n - 1] {
            return t_kernel_trace_norm(PI, s, &KernelGrid::for_scale(s, self.count)?);
        }
        let h = self.log_s[1] - self.log_s[0];
        let i = (((ls - self.log_s[0]) / h).floor() as usize).clamp(1, n - 3);
        // Four-point Lagrange interpolation on nodes i-1..=i+2.
        let mut acc = 0.0;
        for a in 0..4 {
            let xa = self.log_s[i - 1 + a];
            let mut l = 1.0;
            for b in 0..4 {
                if a != b {
                    let xb = self.log_s[i - 1 + b];
                    l *= (ls - xb) / (xa - xb);
                }
            }
            acc += l * self.log_v[i - 1 + a];
        }
        Ok(acc.exp())
    }
}

/// Antiperiodic spinor spectrum on a circle of radius `radius`: `±(j + ½)/radius`,
/// truncated where `e^{−ε|λ|/(1+δ)} < 1e-12`.
pub fn circle_spectrum(radius: f64, epsilon: f64, delta: f64) -> Result<Vec<f64>> {
    if !(radius > 0.0 && epsilon > 0.0 && delta >= 0.0) {
        return Err(Error::Precondition("circle radius, ε must be positive and δ ≥ 0".into()));
    }
    let cut = 1e-12f64.ln().abs() * (1.0 + delta) / epsilon;
    let mut out = Vec::new();
    let mut j = 0u64;
    loop {
        let l = (j as f64 + 0.5) / radius;
        if l > cut {
            break;
        }
        out.push(l);
        out.push(-l);
        j += 1;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiracBound {
    pub value: f64,
    pub modes: usize,
    /// `value / |log(2mε)|`, the coefficient of the logarithmic law.
    pub log_coefficient: f64,
}

/// Modes above which the trace norms come from an interpolation table.
const DIRECT_MODES: usize = 16;

fn mode_scales(mass: f64, epsilon: f64, spectrum: &[f64]) -> Result<Vec<f64>> {
    if !(mass > 0.0 && epsilon > 0.0) {
        return Err(Error::Precondition("mass and ε must be positive".into()));
    }
    Ok(if spectrum.is_empty() {
        vec![2.0 * mass * epsilon]
    } else {
        spectrum.iter().map(|l| 2.0 * epsilon * (mass * mass + l * l).sqrt()).collect()
    })
}

fn dirac_result(value: f64, modes: usize, mass: f64, epsilon: f64) -> DiracBound {
    DiracBound { value, modes, log_coefficient: value / (2.0 * mass * epsilon).ln().abs() }
}

/// `Σ_j 4‖T_{π, 2 m_j ε}‖₁` with `m_j = (m² + λ_j²)^{1/2}`; a single term
/// with `m_j = m` when the transverse spectrum is empty.
pub fn dirac_halfline_bound(mass: f64, epsilon: f64, spectrum: &[f64]) -> Result<DiracBound> {
    let scales = mode_scales(mass, epsilon, spectrum)?;
    if scales.len() <= DIRECT_MODES {
        let value = scales
            .iter()
            .map(|&s| Ok(4.0 * t_kernel_trace_norm(PI, s, &KernelGrid::for_scale(s, DEFAULT_NODES)?)?))
            .sum::<Result<f64>>()?;
        return Ok(dirac_result(value, scales.len(), mass, epsilon));
    }
    let lo = scales.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = scales.iter().copied().fold(0.0, f64::max);
    dirac_halfline_bound_tabulated(mass, epsilon, spectrum, &TraceNormTable::new(lo, hi, 20, DEFAULT_NODES)?)
}

/// [`dirac_halfline_bound`] with every mode read from a shared table, for
/// sweeps over many `ε`.
pub fn dirac_halfline_bound_tabulated(mass: f64, epsilon: f64, spectrum: &[f64], table: &TraceNormTable) -> Result<DiracBound> {
    let scales = mode_scales(mass, epsilon, spectrum)?;
    let value = scales.iter().map(|&s| Ok(4.0 * table.eval(s)?)).sum::<Result<f64>>()?;
    Ok(dirac_result(value, scales.len(), mass, epsilon))
}

/// Table covering every mode of a circle sweep with `ε ≥ eps_min`.
pub fn circle_trace_table(mass: f64, eps_min: f64, eps_max: f64, radius: f64, delta: f64) -> Result<TraceNormTable> {
    let lo = 2.0 * eps_min * (mass * mass + 0.25 / (radius * radius)).sqrt();
    let cut = 1e-12f64.ln().abs() * (1.0 + delta);
    let hi = 2.0 * (eps_max * eps_max * mass * mass + (cut + eps_max / radius).powi(2)).sqrt();
    TraceNormTable::new(lo, hi, 20, DEFAULT_NODES)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `∫₀^∞ e^{−x cosh θ} dθ` by composite Gauss–Legendre on a truncated range.
    fn k0_quadrature(x: f64) -> f64 {
        let top = (1.0 + 800.0 / x).acosh();
        let (nodes, weights) = gauss_legendre(64);
        let panels = 200;
        let h = top / panels as f64;
        (0..panels)
            .map(|p| {
                let a = p as f64 * h;
                nodes.iter().zip(&weights).map(|(t, w)| 0.5 * h * w * (-x * (a + 0.5 * h * (t + 1.0)).cosh()).exp()).sum::<f64>()
            })
            .sum()
    }

    #[test]
    fn k0_matches_integral_and_asymptotes() {
        for x in [0.1, 0.5, 1.0, 1.9, 2.1, 5.0, 12.0] {
            let (a, b) = (bessel_k0(x).unwrap(), k0_quadrature(x));
            assert!((a - b).abs() <= 1e-10 * b, "{x}: {a} vs {b}");
        }
        let x = 40.0;
        assert!((bessel_k0(x).unwrap() / ((PI / (2.0 * x)).sqrt() * (-x).exp()) - 1.0).abs() < 0.01);
        let x = 1e-4;
        let k = bessel_k0(x).unwrap();
        assert!((k + x.ln()).abs() < 1.0);
        assert!((k - (-(x / 2.0).ln() - EULER_GAMMA)).abs() < 1e-6);
        assert!(bessel_k0(0.0).is_err());
    }

    #[test]
    fn gauss_legendre_exact_on_polynomials() {
        let (x, w) = gauss_legendre(7);
        for k in 0..14 {
            let q: f64 = x.iter().zip(&w).map(|(t, v)| v * t.powi(k)).sum();
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-14, "{k}");
        }
    }

    #[test]
    fn s_matrix_properties() {
        let s = SMatrix::new(vec![0.3, 0.9, 1.2]).unwrap();
        assert!((s.eval(C64::new(0.0, 0.0)).unwrap() + 1.0).norm() < 1e-14);
        assert!((s.eval(C64::new(1.3, 0.0)).unwrap().norm() - 1.0).abs() < 1e-12);
        let z = C64::new(0.7, 0.0);
        assert!((s.eval(z + C64::new(0.0, PI)).unwrap() * s.eval(z).unwrap() - 1.0).norm() < 1e-10);
        assert!(s.property_residual().unwrap() < 1e-10);
        assert!(SMatrix::new(vec![0.3, 0.4]).is_err());
        assert!(SMatrix::new(vec![1.7]).is_err());
        let pole = C64::new(0.0, -0.3);
        assert!(matches!(s.eval(pole), Err(Error::Pole { .. })));
    }

    #[test]
    fn sinh_gordon_couplings() {
        let b = |g: f64| sinh_gordon(g).unwrap().poles()[0];
        assert!((b(1.0 / 3f64.sqrt()) - PI / 4.0).abs() < 1e-14);
        assert!((b(0.5) - PI / 5.0).abs() < 1e-14);
        assert!(b(1e-4) < 1e-7);
        assert!(sinh_gordon(1.0).is_err() && sinh_gordon(2.0).is_err());
    }

    #[test]
    fn strip_norm_behaviour() {
        let s = sinh_gordon(1.0 / 3f64.sqrt()).unwrap();
        assert!((strip_sup_norm(&s, 1e-4).unwrap() - 1.0).abs() < 1e-3);
        assert!(strip_sup_norm(&s, 0.1).unwrap() > 1.0);
        let ks = [0.05, 0.1, 0.2, 0.4, 0.6, 0.7];
        let vals: Vec<f64> = ks.iter().map(|&k| strip_sup_norm(&s, k).unwrap()).collect();
        for w in vals.windows(2) {
            assert!(w[1] >= w[0]);
        }
        assert!(strip_sup_norm(&s, 0.8).is_err());
        // Dense direct scan through the strip interior never exceeds the boundary value.
        let n = strip_sup_norm(&s, 0.3).unwrap();
        for i in 0..60 {
            for j in 0..40 {
                let z = C64::new(-6.0 + 0.2 * i as f64, -0.3 + (PI + 0.6) * j as f64 / 39.0);
                assert!(s.eval(z).unwrap().norm() <= n * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn trace_norm_symmetry_and_scaling() {
        for s in [0.01, 1.0, 10.0] {
            let g = KernelGrid::for_scale(s, DEFAULT_NODES).unwrap();
            let (a, b) = (t_kernel_trace_norm(PI, s, &g).unwrap(), t_kernel_trace_norm(-PI, s, &g).unwrap());
            assert!((a - b).abs() < 1e-9 * a.max(1e-300));
        }
        let large: Vec<f64> = [8.0, 10.0, 12.0]
            .iter()
            .map(|&s| t_kernel_trace_norm_checked(PI, s, DEFAULT_NODES).unwrap().value / (-s / 2.0f64).exp())
            .collect();
        let (lo, hi) = large.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        assert!(hi / lo < 3.0, "{large:?}");
        let small: Vec<f64> =
            [1e-3, 1e-4].iter().map(|&s| t_kernel_trace_norm_checked(PI, s, DEFAULT_NODES).unwrap().value / f64::ln(s).abs()).collect();
        assert!(small[0] / small[1] < 2.0 && small[1] / small[0] < 2.0, "{small:?}");
    }

    #[test]
    fn a_kernel_structure() {
        let (k, s) = (PI, 2.0);
        let grid = KernelGrid::for_scale(s, 48).unwrap();
        let ak = AKernel::new(k, s).unwrap();
        assert!((ak.eval(0.0, 0.0) - k.abs() * (-s).exp() / (PI * k * k)).abs() < 1e-15);
        let a = ak.discretize(&grid);
        let e = eigh_raw(&a).unwrap();
        assert!(e.min() >= -1e-10);
        // Analytic T T* kernels add up to A exactly.
        let sum = &t_kernel_gram(k, s, &grid).unwrap() + &t_kernel_gram(-k, s, &grid).unwrap();
        assert!((&sum - &a).max_abs() < 1e-14);
        // Discretised T with a long θ' range reproduces A within 1%.
        let wide = KernelGrid::new(200.0, 1600).unwrap();
        let tp = t_kernel_matrix(k, s, &grid, &wide).unwrap();
        let tm = t_kernel_matrix(-k, s, &grid, &wide).unwrap();
        let rec = &(&tp * &tp.adjoint()) + &(&tm * &tm.adjoint());
        assert!((&rec - &a).max_abs() < 0.01 * a.max_abs());
    }

    #[test]
    fn wedge_traces_agree() {
        let ak = AKernel::new(PI, 2.0).unwrap();
        let grid = KernelGrid::for_scale(2.0, 64).unwrap();
        let one = wedge_trace(&ak, 1, &grid).unwrap();
        let trace = ak.discretize(&grid).trace().re;
        assert!((one.spectral - trace).abs() < 1e-12 * trace);
        for n in 1..=3 {
            let w = wedge_trace(&ak, n, &grid).unwrap();
            assert!(w.relative_gap() < 0.01, "{n}: {w:?}");
        }
        let v = vec![C64::new(0.3, 0.0), C64::new(-0.2, 0.0), C64::new(0.5, 0.0)];
        let rank_one = CMatrix::outer(&v, &v);
        assert!(wedge_trace_spectral(&rank_one, 2).unwrap().abs() < 1e-15);
        assert!((elementary_symmetric(&[1.0, 2.0, 3.0], 2) - 11.0).abs() < 1e-15);
    }

    #[test]
    fn hadamard_bounds() {
        let grid = |s: f64| KernelGrid::for_scale(s, 64).unwrap();
        let c = hadamard_bound_check(PI, 2.0, 1, &grid(2.0)).unwrap();
        assert!(c.ok && (c.lhs / c.rhs - 1.0).abs() < 1e-6);
        assert!(hadamard_bound_check(PI / 2.0, 3.0, 3, &grid(3.0)).unwrap().ok);
        let big = hadamard_bound_check(PI, 15.0, 2, &grid(15.0)).unwrap();
        assert!(big.ok && big.lhs < 1e-5 && big.rhs < 1e-5);
    }

    #[test]
    fn vacuum_bound_behaviour() {
        let s = sinh_gordon(0.5).unwrap();
        let v = vacuum_bound(&s, 1.0, 20.0, 0.3, 0.1).unwrap();
        let lb = v.log_bound.unwrap();
        assert!(lb > 0.0 && lb.is_finite());
        // The closed form drops the max{1, ·} prefactor, so only the order of
        // magnitude is comparable.
        assert!(lb / v.asymptotic > 0.5 && lb / v.asymptotic < 5.0, "{} vs {}", lb, v.asymptotic);
        assert!(vacuum_bound(&s, 1.0, 2.0, 0.3, 0.1).unwrap().diverges());
        let vals: Vec<f64> = (10..=40).step_by(2).map(|r| vacuum_bound(&s, 1.0, r as f64, 0.3, 0.1).unwrap().log_bound.unwrap()).collect();
        for w in vals.windows(2) {
            assert!(w[1] < w[0]);
        }
        assert!(vacuum_bound(&s, 1.0, 20.0, 0.3, 1.5).is_err());
        assert!(vacuum_bound(&s, 1.0, 20.0, 0.7, 0.1).is_err());
    }

    #[test]
    fn dirac_single_mode_and_log_law() {
        let (m, eps, l) = (1.0, 0.01, 3.0);
        let one = dirac_halfline_bound(m, eps, &[l]).unwrap().value;
        let s = 2.0 * eps * (m * m + l * l).sqrt();
        let direct = 4.0 * t_kernel_trace_norm(PI, s, &KernelGrid::for_scale(s, DEFAULT_NODES).unwrap()).unwrap();
        assert_eq!(one, direct);
        let coeffs: Vec<f64> = [0.1, 0.01, 0.001].iter().map(|&e| dirac_halfline_bound(1.0, e, &[]).unwrap().log_coefficient).collect();
        let (lo, hi) = coeffs.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        assert!(hi / lo < 2.0, "{coeffs:?}");
    }

    #[test]
    fn table_matches_direct_evaluation() {
        let t = TraceNormTable::new(1e-3, 50.0, 20, DEFAULT_NODES).unwrap();
        for s in [2e-3, 0.05, 0.7, 9.0, 31.0] {
            let direct = t_kernel_trace_norm(PI, s, &KernelGrid::for_scale(s, DEFAULT_NODES).unwrap()).unwrap();
            assert!((t.eval(s).unwrap() / direct - 1.0).abs() < 1e-3, "{s} {} {direct}", t.eval(s).unwrap());
        }
    }
}
