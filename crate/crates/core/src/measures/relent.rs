//! Variational upper bound on the relative entanglement entropy
//! `inf_σ H(ρ, σ)` over separable `σ = Σ_k p_k |a_k b_k⟩⟨a_k b_k|`.
//!
//! Each start is refined by projected gradient descent: weights are projected
//! onto the simplex, factor vectors are renormalised onto the unit sphere, and
//! steps are chosen by Armijo backtracking. Any ansatz is separable, so every
//! value returned is a valid upper bound.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::decomposition::{dominating_separable, matrix_unit_decomposition, SeparableAnsatz};
use super::{Certificate, MeasureKind, MeasureResult};
use crate::error::{Error, Result};
use crate::linalg::eigen::eigh_raw;
use crate::linalg::matrix::{vec_kron, ZERO};
use crate::linalg::state::partial_trace_matrix;
use crate::linalg::{random_unit_vector, rng_from_seed, vec_norm, CMatrix, DensityMatrix, Side, C64};
use crate::modular::relative_entropy;

/// Largest `dimA · dimB` accepted by the optimiser.
pub const MAX_DIM: usize = 64;

/// Eigenvalue floor inside the optimiser's objective; the reported value is
/// always re-evaluated exactly.
const LOG_FLOOR: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErOptions {
    /// Components of each random start; defaults to `2 · dimA · dimB`.
    pub components: Option<usize>,
    pub restarts: usize,
    pub max_iterations: usize,
    /// Stop once the relative objective change stays below this for a while.
    pub relative_tolerance: f64,
    pub seed: u64,
}

impl Default for ErOptions {
    fn default() -> Self {
        Self { components: None, restarts: 8, max_iterations: 5000, relative_tolerance: 1e-10, seed: 0 }
    }
}

#[derive(Clone, Debug)]
struct Point {
    p: Vec<f64>,
    a: Vec<Vec<C64>>,
    b: Vec<Vec<C64>>,
}

impl Point {
    fn products(&self) -> Vec<Vec<C64>> {
        self.a.iter().zip(&self.b).map(|(a, b)| vec_kron(a, b)).collect()
    }

    fn sigma(&self, xs: &[Vec<C64>]) -> CMatrix {
        let d = xs[0].len();
        let mut s = CMatrix::zeros(d, d);
        for (x, &p) in xs.iter().zip(&self.p) {
            if p == 0.0 {
                continue;
            }
            for i in 0..d {
                let xi = x[i] * p;
                for j in 0..d {
                    s[(i, j)] += xi * x[j].conj();
                }
            }
        }
        s
    }

    fn into_ansatz(self) -> Result<SeparableAnsatz> {
        let total: f64 = self.p.iter().sum();
        let p = self.p.iter().map(|x| x / total).collect();
        SeparableAnsatz::new(p, self.a, self.b)
    }
}

/// Objective `−Tr ρ log σ` (floored) and `D = Dlog_σ[ρ]`, so that
/// `d(−Tr ρ log σ) = −Tr(D dσ)`.
fn objective(rho: &CMatrix, sigma: &CMatrix) -> Result<(f64, CMatrix)> {
    let e = eigh_raw(sigma)?;
    let w: Vec<f64> = e.values.iter().map(|&x| x.max(LOG_FLOOR)).collect();
    let lw: Vec<f64> = w.iter().map(|x| x.ln()).collect();
    let v = &e.vectors;
    let r = &(&v.adjoint() * rho) * v;
    let d = w.len();
    let f = -(0..d).map(|i| r[(i, i)].re * lw[i]).sum::<f64>();
    let l = CMatrix::from_fn(d, d, |i, j| {
        let gap = w[i] - w[j];
        let val = if gap.abs() > 1e-12 * w[i].max(w[j]) { (lw[i] - lw[j]) / gap } else { 1.0 / w[i] };
        C64::new(val, 0.0) * r[(i, j)]
    });
    Ok((f, &(v * &l) * &v.adjoint()))
}

/// Euclidean projection onto the probability simplex.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut css = 0.0;
    let mut theta = 0.0;
    for (k, &x) in u.iter().enumerate() {
        css += x;
        let t = (css - 1.0) / (k + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

fn normalize(v: Vec<C64>) -> Vec<C64> {
    let n = vec_norm(&v);
    if n == 0.0 {
        return v;
    }
    v.into_iter().map(|z| z / n).collect()
}

struct Outcome {
    point: Point,
    iterations: usize,
    converged: bool,
}

fn refine(rho: &CMatrix, dim_a: usize, dim_b: usize, start: Point, opts: &ErOptions) -> Result<Outcome> {
    let mut pt = start;
    let mut xs = pt.products();
    let (mut f, mut dmat) = objective(rho, &pt.sigma(&xs))?;
    let mut eta = 1.0;
    let mut stall = 0;
    let k = pt.p.len();
    for it in 0..opts.max_iterations {
        // Gradients of f = −Tr ρ log σ.
        let dx: Vec<Vec<C64>> = xs.iter().map(|x| dmat.matvec(x)).collect();
        let gp: Vec<f64> = xs.iter().zip(&dx).map(|(x, y)| -x.iter().zip(y).map(|(a, b)| (a.conj() * b).re).sum::<f64>()).collect();
        let mut ga = Vec::with_capacity(k);
        let mut gb = Vec::with_capacity(k);
        for (j, dxj) in dx.iter().enumerate() {
            let scale = -2.0 * pt.p[j];
            let mut g_a = vec![ZERO; dim_a];
            let mut g_b = vec![ZERO; dim_b];
            for i in 0..dim_a {
                for l in 0..dim_b {
                    let g = dxj[i * dim_b + l] * scale;
                    g_a[i] += g * pt.b[j][l].conj();
                    g_b[l] += g * pt.a[j][i].conj();
                }
            }
            // Tangent projection on the sphere.
            let ra: f64 = pt.a[j].iter().zip(&g_a).map(|(x, y)| (x.conj() * y).re).sum();
            let rb: f64 = pt.b[j].iter().zip(&g_b).map(|(x, y)| (x.conj() * y).re).sum();
            for (g, x) in g_a.iter_mut().zip(&pt.a[j]) {
                *g -= x * ra;
            }
            for (g, x) in g_b.iter_mut().zip(&pt.b[j]) {
                *g -= x * rb;
            }
            ga.push(g_a);
            gb.push(g_b);
        }
        let gnorm: f64 =
            gp.iter().map(|x| x * x).sum::<f64>() + ga.iter().chain(&gb).flat_map(|v| v.iter()).map(|z| z.norm_sqr()).sum::<f64>();
        if gnorm < 1e-28 {
            return Ok(Outcome { point: pt, iterations: it, converged: true });
        }
        eta *= 2.0;
        let accepted = loop {
            let cand = Point {
                p: project_simplex(&pt.p.iter().zip(&gp).map(|(p, g)| p - eta * g).collect::<Vec<_>>()),
                a: pt.a.iter().zip(&ga).map(|(x, g)| normalize(x.iter().zip(g).map(|(u, v)| u - v * eta).collect())).collect(),
                b: pt.b.iter().zip(&gb).map(|(x, g)| normalize(x.iter().zip(g).map(|(u, v)| u - v * eta).collect())).collect(),
            };
            let cxs = cand.products();
            let (cf, cd) = objective(rho, &cand.sigma(&cxs))?;
            if cf <= f - 1e-4 * eta * gnorm {
                break Some((cand, cxs, cf, cd));
            }
            eta *= 0.5;
            if eta < 1e-14 {
                break None;
            }
        };
        let Some((cand, cxs, cf, cd)) = accepted else {
            return Ok(Outcome { point: pt, iterations: it, converged: true });
        };
        let small = (f - cf).abs() < opts.relative_tolerance * f.abs().max(1.0);
        stall = if small { stall + 1 } else { 0 };
        pt = cand;
        xs = cxs;
        f = cf;
        dmat = cd;
        if stall >= 25 {
            return Ok(Outcome { point: pt, iterations: it + 1, converged: true });
        }
    }
    Ok(Outcome { point: pt, iterations: opts.max_iterations, converged: false })
}

/// `Σ_ij ⟨u_i v_j|ρ|u_i v_j⟩ |u_i v_j⟩⟨u_i v_j|` in the marginal eigenbases.
fn dephased_start(rho: &DensityMatrix) -> Result<Point> {
    let (da, db) = (rho.dim_a(), rho.dim_b());
    let ua = eigh_raw(&partial_trace_matrix(rho.matrix(), da, db, Side::A))?.vectors;
    let ub = eigh_raw(&partial_trace_matrix(rho.matrix(), da, db, Side::B))?.vectors;
    let mut pt = Point { p: Vec::new(), a: Vec::new(), b: Vec::new() };
    for i in 0..da {
        for j in 0..db {
            let (a, b) = (ua.col(i), ub.col(j));
            let x = vec_kron(&a, &b);
            let w = rho.matrix().matvec(&x);
            let weight: f64 = x.iter().zip(&w).map(|(p, q)| (p.conj() * q).re).sum();
            pt.p.push(weight.max(0.0));
            pt.a.push(a);
            pt.b.push(b);
        }
    }
    let total: f64 = pt.p.iter().sum();
    pt.p.iter_mut().for_each(|p| *p /= total);
    Ok(pt)
}

/// Pure product components of the dominating separable operator from the
/// matrix-unit decomposition; its value bounds the E_N certificate.
fn dominating_start(rho: &DensityMatrix) -> Result<Point> {
    let dom = dominating_separable(&matrix_unit_decomposition(rho)?)?;
    let mut pt = Point { p: Vec::new(), a: Vec::new(), b: Vec::new() };
    for (pa, qb) in &dom.components {
        let ea = eigh_raw(pa)?;
        let eb = eigh_raw(qb)?;
        for (i, &la) in ea.values.iter().enumerate() {
            for (j, &lb) in eb.values.iter().enumerate() {
                let w = la * lb;
                if la > 0.0 && lb > 0.0 && w > 1e-16 {
                    pt.p.push(w);
                    pt.a.push(ea.vectors.col(i));
                    pt.b.push(eb.vectors.col(j));
                }
            }
        }
    }
    let total: f64 = pt.p.iter().sum();
    pt.p.iter_mut().for_each(|p| *p /= total);
    Ok(pt)
}

fn random_start<R: Rng>(k: usize, da: usize, db: usize, rng: &mut R) -> Point {
    let mut p: Vec<f64> = (0..k).map(|_| rng.gen::<f64>() + 0.1).collect();
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= total);
    Point { p, a: (0..k).map(|_| random_unit_vector(da, rng)).collect(), b: (0..k).map(|_| random_unit_vector(db, rng)).collect() }
}

/// Removes zero-weight components so the certificate stays small.
fn prune(pt: Point) -> Point {
    let keep: Vec<usize> = (0..pt.p.len()).filter(|&k| pt.p[k] > 0.0).collect();
    Point {
        p: keep.iter().map(|&k| pt.p[k]).collect(),
        a: keep.iter().map(|&k| pt.a[k].clone()).collect(),
        b: keep.iter().map(|&k| pt.b[k].clone()).collect(),
    }
}

/// Best separable ansatz over a fixed set of deterministic starts plus
/// `restarts` seeded random starts.
pub fn relative_entanglement_entropy_upper(rho: &DensityMatrix, opts: &ErOptions) -> Result<MeasureResult> {
    let (da, db) = (rho.dim_a(), rho.dim_b());
    if da * db > MAX_DIM {
        return Err(Error::Precondition(format!("dimA·dimB = {} exceeds the optimiser cap {MAX_DIM}", da * db)));
    }
    let k = opts.components.unwrap_or(2 * da * db).max(1);
    let mut rng = rng_from_seed(opts.seed);
    let mut starts = vec![dephased_start(rho)?, dominating_start(rho)?];
    starts.extend((0..opts.restarts).map(|_| random_start(k, da, db, &mut rng)));

    let mut best: Option<(f64, SeparableAnsatz)> = None;
    let mut iterations = 0;
    let mut stagnated = false;
    for start in starts {
        let out = refine(rho.matrix(), da, db, start, opts)?;
        iterations += out.iterations;
        stagnated |= !out.converged;
        let ansatz = prune(out.point).into_ansatz()?;
        let value = relative_entropy(rho, &ansatz.state()?)?;
        if best.as_ref().map_or(true, |(v, _)| value < *v) {
            best = Some((value, ansatz));
        }
    }
    let (value, ansatz) = best.expect("at least one start");
    Ok(MeasureResult {
        value: value.max(0.0),
        kind: MeasureKind::UpperBound,
        certificate: Some(Certificate::Ansatz(ansatz)),
        iterations,
        stagnated,
    })
}

/// Value of a separable ansatz as a relative-entropy bound, recomputed from scratch.
pub fn ansatz_value(rho: &DensityMatrix, ansatz: &SeparableAnsatz) -> Result<f64> {
    relative_entropy(rho, &ansatz.state()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_faithful_state, random_unitary};
    use crate::measures::schmidt_entropy;

    #[test]
    fn simplex_projection() {
        let p = project_simplex(&[0.5, 0.5, 0.5]);
        assert!(p.iter().all(|&x| (x - 1.0 / 3.0).abs() < 1e-15));
        let q = project_simplex(&[2.0, 0.0]);
        assert_eq!(q, vec![1.0, 0.0]);
        let r = project_simplex(&[0.3, -0.2, 0.4]);
        assert!((r.iter().sum::<f64>() - 1.0).abs() < 1e-15 && r[1] == 0.0);
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let rho = random_faithful_state(2, 2, 3);
        let mut rng = rng_from_seed(1);
        let pt = random_start(4, 2, 2, &mut rng);
        let xs = pt.products();
        let (f0, d) = objective(rho.matrix(), &pt.sigma(&xs)).unwrap();
        let h = 1e-6;
        let mut q = pt.clone();
        q.p[1] += h;
        let (f1, _) = objective(rho.matrix(), &q.sigma(&q.products())).unwrap();
        let analytic = -xs[1].iter().zip(&d.matvec(&xs[1])).map(|(a, b)| (a.conj() * b).re).sum::<f64>();
        assert!(((f1 - f0) / h - analytic).abs() < 1e-4);
    }

    #[test]
    fn bell_state_is_log_two() {
        let r = relative_entanglement_entropy_upper(&DensityMatrix::maximally_entangled(2), &ErOptions::default()).unwrap();
        assert!((r.value - 2f64.ln()).abs() < 5e-3, "{}", r.value);
        assert!(r.value >= 2f64.ln() - 1e-9);
    }

    #[test]
    fn pure_state_matches_schmidt() {
        let psi = [C64::new(0.8f64.sqrt(), 0.0), ZERO, ZERO, C64::new(0.2f64.sqrt(), 0.0)];
        let rho = DensityMatrix::pure(&psi, 2, 2).unwrap();
        let r = relative_entanglement_entropy_upper(&rho, &ErOptions::default()).unwrap();
        let exact = schmidt_entropy(&psi, 2, 2).unwrap().value;
        assert!((r.value - exact).abs() < 5e-3, "{} vs {exact}", r.value);
    }

    #[test]
    fn separable_input_is_near_zero() {
        let mut rng = rng_from_seed(77);
        let pt = random_start(3, 2, 2, &mut rng);
        let rho = pt.into_ansatz().unwrap().state().unwrap();
        let r = relative_entanglement_entropy_upper(&rho, &ErOptions::default()).unwrap();
        assert!(r.value <= 1e-3, "{}", r.value);
    }

    #[test]
    fn rotated_pure_state_after_local_unitary() {
        let psi = [C64::new(0.8f64.sqrt(), 0.0), ZERO, ZERO, C64::new(0.2f64.sqrt(), 0.0)];
        let rho = DensityMatrix::pure(&psi, 2, 2).unwrap();
        let mut rng = rng_from_seed(5);
        let u = random_unitary(2, &mut rng).kron(&random_unitary(2, &mut rng));
        let rot = rho.conjugate_by(&u).unwrap();
        let a = relative_entanglement_entropy_upper(&rho, &ErOptions::default()).unwrap().value;
        let b = relative_entanglement_entropy_upper(&rot, &ErOptions::default()).unwrap().value;
        assert!((a - b).abs() < 5e-3);
    }

    #[test]
    fn certificate_reverifies() {
        let rho = random_faithful_state(2, 2, 8);
        let r = relative_entanglement_entropy_upper(&rho, &ErOptions { restarts: 2, ..Default::default() }).unwrap();
        let Some(Certificate::Ansatz(a)) = &r.certificate else { panic!("missing certificate") };
        assert!((ansatz_value(&rho, a).unwrap() - r.value).abs() < 1e-8);
    }
}
