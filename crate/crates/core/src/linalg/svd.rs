use super::matrix::{vec_norm, CMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Thin singular value decomposition `m = U diag(s) V†`, `s` descending.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v: CMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> CMatrix {
        let us = CMatrix::from_fn(self.u.rows(), self.s.len(), |i, k| self.u[(i, k)] * self.s[k]);
        &us * &self.v.adjoint()
    }

    /// Numerical rank with singular values above `rel · s_max`.
    pub fn rank(&self, rel: f64) -> usize {
        let top = self.s.first().copied().unwrap_or(0.0);
        self.s.iter().filter(|&&x| x > rel * top && x > 0.0).count()
    }
}

const MAX_SWEEPS: usize = 80;

/// One-sided (Hestenes) Jacobi SVD.
pub fn svd(m: &CMatrix) -> Result<Svd> {
    if m.rows() < m.cols() {
        let t = svd(&m.adjoint())?;
        return Ok(Svd { u: t.v, s: t.s, v: t.u });
    }
    let (rows, n) = (m.rows(), m.cols());
    // Work on columns: store them contiguously.
    let mut a: Vec<Vec<C64>> = (0..n).map(|j| m.col(j)).collect();
    let mut v: Vec<Vec<C64>> = (0..n).map(|j| (0..n).map(|i| if i == j { C64::new(1.0, 0.0) } else { ZERO }).collect()).collect();
    let mut converged = false;
    let mut worst = 0.0;
    for _ in 0..MAX_SWEEPS {
        worst = 0.0f64;
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = a[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = a[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = a[p].iter().zip(&a[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g == 0.0 || alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let rel = g / (alpha * beta).sqrt();
                worst = worst.max(rel);
                if rel < 1e-15 {
                    continue;
                }
                rotated = true;
                let e = gamma / g;
                let theta = (beta - alpha) / (2.0 * g);
                let t = if theta == 0.0 { 1.0 } else { theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt()) };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let se = e * s;
                let sec = se.conj();
                for cols in [&mut a, &mut v] {
                    let (lo, hi) = cols.split_at_mut(q);
                    let (cp, cq) = (&mut lo[p], &mut hi[0]);
                    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
                        let (xp, yq) = (*x, *y);
                        *x = xp * c - yq * sec;
                        *y = xp * se + yq * c;
                    }
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged && worst > 1e-12 {
        return Err(Error::NoConvergence { method: "Jacobi SVD", residual: worst });
    }
    let mut s: Vec<f64> = a.iter().map(|c| vec_norm(c)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]));
    let mut u_cols = Vec::with_capacity(n);
    let mut v_cols = Vec::with_capacity(n);
    let mut s_sorted = Vec::with_capacity(n);
    for &k in &order {
        let sk = s[k];
        let col = if sk > 0.0 { a[k].iter().map(|z| z / sk).collect() } else { vec![ZERO; rows] };
        u_cols.push(col);
        v_cols.push(v[k].clone());
        s_sorted.push(sk);
    }
    s.clear();
    Ok(Svd { u: CMatrix::from_cols(rows, &u_cols), s: s_sorted, v: CMatrix::from_cols(n, &v_cols) })
}

/// Singular values only.
pub fn singular_values(m: &CMatrix) -> Result<Vec<f64>> {
    Ok(svd(m)?.s)
}

/// `‖m‖₁ = Tr √(m† m)`, the sum of singular values.
pub fn trace_norm(m: &CMatrix) -> Result<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Ok(0.0);
    }
    Ok(singular_values(m)?.iter().sum())
}

/// Orthonormal basis of the column span, truncating singular values below
/// `rel · s_max`. Returns the basis and the number of discarded directions.
pub fn column_basis(m: &CMatrix, rel: f64) -> Result<(CMatrix, usize)> {
    let d = svd(m)?;
    let r = d.rank(rel);
    let idx: Vec<usize> = (0..r).collect();
    Ok((d.u.select_cols(&idx), m.cols().min(m.rows()) - r))
}
