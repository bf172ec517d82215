//! Ground state of a massive free scalar on a 1-D lattice and the
//! projector bound on its relative entanglement entropy between two regions.
//!
//! The one-particle structure is carried by `C = (−∇² + m²)^{-1}`. For a
//! region `V`, `Q_{V+}` projects onto the span of `C^{-1/4} e_i` and `Q_{V−}`
//! onto the span of `C^{1/4} e_i`, `i ∈ V`. With `B'` the lattice complement
//! of `B`, the entanglement between `A` and `B` is bounded by
//! `−4 Σ_± Σ_k log(1 − s_k^{1/2})`, `s_k` the singular values of
//! `(1 − Q_{B'∓}) Q_{A±}`.

use std::ops::Range;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bounds::gap_s_closed;
use crate::error::{Error, Result};
use crate::linalg::{column_basis, eigh, rng_from_seed, singular_values, CMatrix, Eigh, HermitianMatrix, C64};

/// Singular values below this fraction of the largest are treated as rank loss.
pub const RANK_CUT: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Dirichlet,
    Periodic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeGeometry {
    pub sites: usize,
    pub spacing: f64,
    pub mass: f64,
    pub boundary: Boundary,
}

impl LatticeGeometry {
    pub fn new(sites: usize, spacing: f64, mass: f64, boundary: Boundary) -> Result<Self> {
        if sites < 8 {
            return Err(Error::Precondition(format!("lattice needs at least 8 sites, got {sites}")));
        }
        if !(spacing > 0.0) || !(mass > 0.0) {
            return Err(Error::Precondition("spacing and mass must be positive".into()));
        }
        if mass * spacing >= 2.0 {
            return Err(Error::Precondition(format!("mass·spacing = {} is not resolved by the lattice", mass * spacing)));
        }
        Ok(Self { sites, spacing, mass, boundary })
    }

    pub fn dirichlet(sites: usize, spacing: f64, mass: f64) -> Result<Self> {
        Self::new(sites, spacing, mass, Boundary::Dirichlet)
    }

    /// Index distance, wrapping around for periodic chains.
    pub fn distance(&self, i: usize, j: usize) -> usize {
        let d = i.abs_diff(j);
        match self.boundary {
            Boundary::Dirichlet => d,
            Boundary::Periodic => d.min(self.sites - d),
        }
    }

    /// `−∇² + m²` with the central second difference.
    pub fn klein_gordon_operator(&self) -> CMatrix {
        let n = self.sites;
        let h2 = self.spacing * self.spacing;
        let mut k = CMatrix::zeros(n, n);
        for i in 0..n {
            k[(i, i)] = C64::new(2.0 / h2 + self.mass * self.mass, 0.0);
            let next = match (i + 1 < n, self.boundary) {
                (true, _) => Some(i + 1),
                (false, Boundary::Periodic) => Some(0),
                (false, Boundary::Dirichlet) => None,
            };
            if let Some(j) = next {
                k[(i, j)] -= C64::new(1.0 / h2, 0.0);
                k[(j, i)] -= C64::new(1.0 / h2, 0.0);
            }
        }
        k
    }
}

/// Two disjoint, non-empty, sorted site sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

impl RegionSpec {
    pub fn new(mut a: Vec<usize>, mut b: Vec<usize>) -> Result<Self> {
        a.sort_unstable();
        a.dedup();
        b.sort_unstable();
        b.dedup();
        if a.is_empty() || b.is_empty() {
            return Err(Error::Precondition("regions must be non-empty".into()));
        }
        if a.iter().any(|i| b.binary_search(i).is_ok()) {
            return Err(Error::Precondition("regions overlap".into()));
        }
        Ok(Self { a, b })
    }

    /// `A = a_sites`, `B` = every site at index distance `≥ gap` from `A`.
    pub fn with_gap(geom: &LatticeGeometry, a_sites: Range<usize>, gap: usize) -> Result<Self> {
        if a_sites.end > geom.sites || a_sites.is_empty() {
            return Err(Error::Precondition(format!("region {a_sites:?} outside the lattice")));
        }
        if gap == 0 {
            return Err(Error::Precondition("gap must be at least one site".into()));
        }
        let a: Vec<usize> = a_sites.collect();
        let b = (0..geom.sites).filter(|&j| a.iter().all(|&i| geom.distance(i, j) >= gap)).collect();
        Self::new(a, b)
    }

    /// Smallest index distance between the regions.
    pub fn gap(&self, geom: &LatticeGeometry) -> usize {
        self.a.iter().flat_map(|&i| self.b.iter().map(move |&j| geom.distance(i, j))).min().unwrap_or(0)
    }

    /// Sites outside `B`.
    pub fn b_complement(&self, sites: usize) -> Vec<usize> {
        (0..sites).filter(|j| self.b.binary_search(j).is_err()).collect()
    }
}

#[derive(Clone, Debug)]
pub struct LatticeGaussianState {
    geometry: LatticeGeometry,
    spectrum: Eigh,
    covariance: CMatrix,
    quarter: CMatrix,
    neg_quarter: CMatrix,
    half: CMatrix,
    neg_half: CMatrix,
}

impl LatticeGaussianState {
    pub fn geometry(&self) -> &LatticeGeometry {
        &self.geometry
    }

    /// `C = (−∇² + m²)^{-1}`.
    pub fn covariance(&self) -> &CMatrix {
        &self.covariance
    }

    /// Eigenvalues of `C`, ascending.
    pub fn covariance_spectrum(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.spectrum.values.iter().map(|k| 1.0 / k).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// `C^p` for `p ∈ {±1/4, ±1/2}` from the cache, otherwise computed.
    pub fn covariance_power(&self, p: f64) -> CMatrix {
        match p {
            0.25 => self.quarter.clone(),
            -0.25 => self.neg_quarter.clone(),
            0.5 => self.half.clone(),
            -0.5 => self.neg_half.clone(),
            _ => self.spectrum.apply(|k| C64::new(k.powf(-p), 0.0)),
        }
    }

    /// `μ(F, F') = ½ Re⟨u, u'⟩` with `u = C^{1/4} p − i C^{-1/4} q`.
    pub fn mu(&self, f: &[f64], g: &[f64]) -> Result<f64> {
        let (u, v) = (self.one_particle(f)?, self.one_particle(g)?);
        Ok(0.5 * u.iter().zip(&v).map(|(a, b)| (a.conj() * b).re).sum::<f64>())
    }

    /// Symplectic form `σ(F, F') = q·p' − p·q'`.
    pub fn sigma(&self, f: &[f64], g: &[f64]) -> Result<f64> {
        let n = self.geometry.sites;
        self.check_len(f)?;
        self.check_len(g)?;
        let (q, p) = f.split_at(n);
        let (q2, p2) = g.split_at(n);
        Ok(q.iter().zip(p2).map(|(a, b)| a * b).sum::<f64>() - p.iter().zip(q2).map(|(a, b)| a * b).sum::<f64>())
    }

    fn check_len(&self, f: &[f64]) -> Result<()> {
        if f.len() != 2 * self.geometry.sites {
            return Err(Error::Dimension(format!("phase-space vector of length {} on {} sites", f.len(), self.geometry.sites)));
        }
        Ok(())
    }

    fn one_particle(&self, f: &[f64]) -> Result<Vec<C64>> {
        self.check_len(f)?;
        let n = self.geometry.sites;
        let to_c = |x: &[f64]| x.iter().map(|&v| C64::new(v, 0.0)).collect::<Vec<_>>();
        let a = self.quarter.matvec(&to_c(&f[n..]));
        let b = self.neg_quarter.matvec(&to_c(&f[..n]));
        Ok(a.iter().zip(&b).map(|(x, y)| x - C64::new(0.0, 1.0) * y).collect())
    }
}

/// Diagonalises `−∇² + m²` once and caches the fractional powers of `C`.
pub fn build_state(geom: &LatticeGeometry) -> Result<LatticeGaussianState> {
    let k = HermitianMatrix::new(geom.klein_gordon_operator())?;
    let spectrum = eigh(&k)?;
    if spectrum.min() <= 0.0 {
        return Err(Error::NotFaithful { min_eigenvalue: spectrum.min() });
    }
    let power = |p: f64| spectrum.apply(|x| C64::new(x.powf(-p), 0.0));
    let state = LatticeGaussianState {
        covariance: power(1.0),
        quarter: power(0.25),
        neg_quarter: power(-0.25),
        half: power(0.5),
        neg_half: power(-0.5),
        spectrum,
        geometry: geom.clone(),
    };
    let id_err = (&(&state.half * &state.neg_half) - &CMatrix::identity(geom.sites)).max_abs();
    if id_err > 1e-9 {
        return Err(Error::NoConvergence { method: "covariance square roots", residual: id_err });
    }
    Ok(state)
}

/// Orthonormal bases for the ranges of `Q_{V+}` and `Q_{V−}`.
#[derive(Clone, Debug)]
pub struct RegionProjectors {
    /// Columns span `C^{-1/4} e_i`, `i ∈ V`.
    pub plus: CMatrix,
    /// Columns span `C^{1/4} e_i`, `i ∈ V`.
    pub minus: CMatrix,
    /// Directions dropped by the rank cut, summed over both signs.
    pub dropped: usize,
}

impl RegionProjectors {
    pub fn projector_plus(&self) -> CMatrix {
        &self.plus * &self.plus.adjoint()
    }

    pub fn projector_minus(&self) -> CMatrix {
        &self.minus * &self.minus.adjoint()
    }
}

pub fn region_projectors(state: &LatticeGaussianState, sites: &[usize]) -> Result<RegionProjectors> {
    if sites.is_empty() {
        return Err(Error::Precondition("projector region is empty".into()));
    }
    if let Some(&bad) = sites.iter().find(|&&i| i >= state.geometry.sites) {
        return Err(Error::Precondition(format!("site {bad} outside the lattice")));
    }
    let (plus, d1) = column_basis(&state.neg_quarter.select_cols(sites), RANK_CUT)?;
    let (minus, d2) = column_basis(&state.quarter.select_cols(sites), RANK_CUT)?;
    Ok(RegionProjectors { plus, minus, dropped: d1 + d2 })
}

/// Singular values of `(1 − Q) U` for an orthonormal `U` and `Q = W W†`.
fn leakage(u: &CMatrix, w: &CMatrix) -> Result<Vec<f64>> {
    let resid = u - &(w * &(&w.adjoint() * u));
    singular_values(&resid)
}

/// `−4 Σ_± Σ_k log(1 − s_k^{1/2})`.
pub fn kg_upper_bound(state: &LatticeGaussianState, regions: &RegionSpec) -> Result<f64> {
    let n = state.geometry.sites;
    let a = region_projectors(state, &regions.a)?;
    let b_prime = regions.b_complement(n);
    if b_prime.len() == n {
        return Ok(0.0);
    }
    let bp = region_projectors(state, &b_prime)?;
    let mut total = 0.0;
    for (ua, wb) in [(&a.plus, &bp.minus), (&a.minus, &bp.plus)] {
        let s = leakage(ua, wb)?;
        if let Some(&top) = s.first() {
            if top >= 1.0 - 1e-9 {
                return Err(Error::Precondition(format!("regions too close for lattice resolution (top singular value {top})")));
            }
        }
        total -= 4.0 * s.iter().map(|&x| (1.0 - x.max(0.0).sqrt()).ln()).sum::<f64>();
    }
    Ok(total.max(0.0))
}

/// `ω(W(f) W(g)) = exp(−iσ(f,g)/2 − μ(f+g, f+g)/2)` for phase-space data
/// `(q, p)` of length `2L`.
pub fn weyl_two_point(state: &LatticeGaussianState, f: &[f64], g: &[f64]) -> Result<C64> {
    let sum: Vec<f64> = f.iter().zip(g).map(|(a, b)| a + b).collect();
    let sigma = state.sigma(f, g)?;
    let mu = state.mu(&sum, &sum)?;
    Ok(C64::new(-0.5 * mu, -0.5 * sigma).exp())
}

/// `ω(W(f))`.
pub fn weyl_expectation(state: &LatticeGaussianState, f: &[f64]) -> Result<f64> {
    Ok((-0.5 * state.mu(f, f)?).exp())
}

fn random_supported<R: Rng>(n: usize, support: &[usize], scale: f64, rng: &mut R) -> Vec<f64> {
    let mut v = vec![0.0; 2 * n];
    for &i in support {
        v[i] = scale * rng.sample::<f64, _>(StandardNormal);
        v[n + i] = scale * rng.sample::<f64, _>(StandardNormal);
    }
    v
}

/// `max s(|ω(W(f)W(g)) − ω(W(f))ω(W(g))| / 2)` over random Weyl data with
/// `f` supported in `A` and `g` in `B`; a lower bound on the mutual
/// information between the regions.
pub fn correlator_lower_bound(state: &LatticeGaussianState, regions: &RegionSpec, trials: usize, seed: u64) -> Result<f64> {
    let n = state.geometry.sites;
    let mut rng = rng_from_seed(seed);
    let mut best = 0.0f64;
    for _ in 0..trials {
        // Log-uniform amplitude so both weak and strong displacements are tried.
        let scale = 10f64.powf(rng.gen_range(-1.5..0.5));
        let f = random_supported(n, &regions.a, scale / (regions.a.len() as f64).sqrt(), &mut rng);
        let g = random_supported(n, &regions.b, scale / (regions.b.len() as f64).sqrt(), &mut rng);
        let joint = weyl_two_point(state, &f, &g)?;
        let split = weyl_expectation(state, &f)? * weyl_expectation(state, &g)?;
        best = best.max((joint - split).norm());
    }
    let x = (best / 2.0).min(1.0);
    if x < 1e-300 {
        return Ok(0.0);
    }
    gap_s_closed(x)
}

#[derive(Clone, Debug)]
pub struct DecayPoint {
    pub gap_sites: usize,
    pub r: f64,
    pub upper_bound: Result<f64>,
    pub lower_bound: Result<f64>,
}

/// Upper and lower bounds for `A = a_sites` against every gap in `gaps`.
pub fn decay_sweep(
    state: &LatticeGaussianState,
    a_sites: Range<usize>,
    gaps: impl IntoIterator<Item = usize>,
    trials: usize,
    seed: u64,
) -> Vec<DecayPoint> {
    let geom = state.geometry.clone();
    gaps.into_iter()
        .map(|gap| {
            let regions = RegionSpec::with_gap(&geom, a_sites.clone(), gap);
            let (upper_bound, lower_bound) = match &regions {
                Ok(r) => (kg_upper_bound(state, r), correlator_lower_bound(state, r, trials, seed)),
                Err(e) => (Err(e.clone()), Err(e.clone())),
            };
            DecayPoint { gap_sites: gap, r: gap as f64 * geom.spacing, upper_bound, lower_bound }
        })
        .collect()
}

/// Least-squares line `y ≈ slope·x + intercept` with its `R²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Precondition("linear fit needs at least two paired points".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Precondition("linear fit needs distinct abscissae".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    Ok(LinearFit { slope, intercept, r_squared })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn geom(l: usize, a: f64, m: f64) -> LatticeGeometry {
        LatticeGeometry::dirichlet(l, a, m).unwrap()
    }

    #[test]
    fn covariance_inverts_tridiagonal() {
        let g = geom(8, 1.0, 1.0);
        let st = build_state(&g).unwrap();
        let k = DMatrix::from_fn(8, 8, |i, j| match i.abs_diff(j) {
            0 => 3.0,
            1 => -1.0,
            _ => 0.0,
        });
        let inv = k.try_inverse().unwrap();
        for i in 0..8 {
            for j in 0..8 {
                assert!((st.covariance()[(i, j)].re - inv[(i, j)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn heavy_mass_limit() {
        // m·a < 2 forces a < 0.04 at m = 50, where the hopping term is not
        // negligible; the mass-dominated limit is checked at a = 1 directly.
        let coarse = LatticeGeometry { sites: 8, spacing: 1.0, mass: 50.0, boundary: Boundary::Dirichlet };
        let st = build_state(&coarse).unwrap();
        let c = st.covariance();
        for i in 0..8 {
            for j in 0..8 {
                let want = if i == j { 1.0 / 2500.0 } else { 0.0 };
                assert!((c[(i, j)].re - want).abs() < 0.01 / 2500.0);
            }
        }
    }

    #[test]
    fn periodic_spectrum_is_analytic() {
        let (l, a, m) = (16, 0.5, 1.0);
        let st = build_state(&LatticeGeometry::new(l, a, m, Boundary::Periodic).unwrap()).unwrap();
        let mut want: Vec<f64> =
            (0..l).map(|k| 1.0 / (m * m + 4.0 * (std::f64::consts::PI * k as f64 / l as f64).sin().powi(2) / (a * a))).collect();
        want.sort_by(f64::total_cmp);
        for (g, w) in st.covariance_spectrum().iter().zip(&want) {
            assert!((g - w).abs() < 1e-12);
        }
        let c = st.covariance();
        for i in 0..l {
            assert!((c[(i, (i + 3) % l)] - c[(0, 3)]).norm() < 1e-12);
        }
    }

    #[test]
    fn projectors() {
        let st = build_state(&geom(16, 0.5, 1.0)).unwrap();
        let all: Vec<usize> = (0..16).collect();
        let p = region_projectors(&st, &all).unwrap();
        assert!((&p.projector_plus() - &CMatrix::identity(16)).max_abs() < 1e-9);
        let one = region_projectors(&st, &[5]).unwrap();
        let q = one.projector_minus();
        let col = st.covariance_power(0.25).col(5);
        let nrm = crate::linalg::vec_norm(&col);
        let want = CMatrix::outer(&col, &col).scale_re(1.0 / (nrm * nrm));
        assert!((&q - &want).max_abs() < 1e-12);
        assert!((&(&q * &q) - &q).max_abs() < 1e-9 && q.hermitian_deviation() < 1e-12);
    }

    #[test]
    fn complementary_projectors_match_stacked_svd() {
        let st = build_state(&geom(12, 0.5, 1.0)).unwrap();
        let v: Vec<usize> = (0..5).collect();
        let w: Vec<usize> = (5..12).collect();
        let (pv, pw) = (region_projectors(&st, &v).unwrap(), region_projectors(&st, &w).unwrap());
        // Cosines of principal angles between the ranges equal the singular
        // values of V†W; the stacked basis has full rank 12.
        let cos = singular_values(&(&pv.plus.adjoint() * &pw.plus)).unwrap();
        let stacked = CMatrix::from_fn(12, 12, |i, j| if j < 5 { pv.plus[(i, j)] } else { pw.plus[(i, j - 5)] });
        let s = singular_values(&stacked).unwrap();
        // Singular values of [V W] are sqrt(1 ± cos).
        let mut want: Vec<f64> = cos.iter().flat_map(|c| [(1.0 + c).sqrt(), (1.0 - c).sqrt()]).collect();
        want.resize(12, 1.0);
        want.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in s.iter().zip(&want) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn bound_vanishes_without_b() {
        let st = build_state(&geom(16, 0.5, 1.0)).unwrap();
        let regions = RegionSpec { a: vec![3, 4], b: vec![] };
        assert_eq!(kg_upper_bound(&st, &regions).unwrap(), 0.0);
    }

    #[test]
    fn bound_monotone_in_gap_and_region() {
        let g = geom(64, 0.25, 1.0);
        let st = build_state(&g).unwrap();
        let vals: Vec<f64> = (1..12).map(|gap| kg_upper_bound(&st, &RegionSpec::with_gap(&g, 28..36, gap).unwrap()).unwrap()).collect();
        for w in vals.windows(2) {
            assert!(w[1] < w[0], "{vals:?}");
        }
        let b: Vec<usize> = (48..64).collect();
        let nested: Vec<f64> = [30..34, 28..36, 26..38]
            .into_iter()
            .map(|r| kg_upper_bound(&st, &RegionSpec::new(r.collect(), b.clone()).unwrap()).unwrap())
            .collect();
        assert!(nested[0] <= nested[1] && nested[1] <= nested[2], "{nested:?}");
    }

    #[test]
    fn weyl_two_point_properties() {
        let st = build_state(&geom(10, 0.5, 1.0)).unwrap();
        let mut rng = rng_from_seed(2);
        let f: Vec<f64> = (0..20).map(|_| rng.sample(StandardNormal)).collect();
        let minus: Vec<f64> = f.iter().map(|x| -x).collect();
        let one = weyl_two_point(&st, &f, &minus).unwrap();
        assert!((one - C64::new(1.0, 0.0)).norm() < 1e-15);
        let zero = vec![0.0; 20];
        let v = weyl_two_point(&st, &zero, &f).unwrap();
        assert!(v.im.abs() < 1e-15 && v.re > 0.0 && v.re <= 1.0);
        for _ in 0..50 {
            let a: Vec<f64> = (0..20).map(|_| rng.sample(StandardNormal)).collect();
            let b: Vec<f64> = (0..20).map(|_| rng.sample(StandardNormal)).collect();
            assert!(weyl_two_point(&st, &a, &b).unwrap().norm() <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn correlator_bound_clustering() {
        let g = geom(64, 0.25, 1.0);
        let st = build_state(&g).unwrap();
        let far = RegionSpec::new((0..4).collect(), (60..64).collect()).unwrap();
        assert!(correlator_lower_bound(&st, &far, 256, 1).unwrap() < 1e-6);
        let g = geom(32, 0.25, 0.5);
        let st = build_state(&g).unwrap();
        let near = RegionSpec::with_gap(&g, 12..16, 1).unwrap();
        assert!(correlator_lower_bound(&st, &near, 256, 1).unwrap() > 1e-4);
        assert_eq!(correlator_lower_bound(&st, &near, 0, 1).unwrap(), 0.0);
    }

    #[test]
    fn fit_recovers_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 - 0.5 * x).collect();
        let f = linear_fit(&xs, &ys).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-14 && (f.r_squared - 1.0).abs() < 1e-14);
    }
}
