//! Hermitian operators and extremal eigenvalues: dense and CSR storage, Lanczos with
//! full reorthogonalization, and plain power iteration.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub trait HermitianOp: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[C64], y: &mut [C64]);
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseHermitian {
    pub n: usize,
    pub data: Vec<C64>,
}

impl DenseHermitian {
    pub fn from_fn<F: Fn(usize, usize) -> C64 + Sync>(n: usize, f: F) -> Self {
        let data = (0..n * n).into_par_iter().map(|k| f(k / n, k % n)).collect();
        DenseHermitian { n, data }
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.n + j]
    }
}

impl HermitianOp for DenseHermitian {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        let n = self.n;
        y.par_iter_mut().enumerate().for_each(|(i, yi)| {
            let row = &self.data[i * n..(i + 1) * n];
            *yi = row.iter().zip(x).map(|(a, b)| a * b).sum();
        });
    }
}

/// Compressed sparse rows; `dropped_bound` bounds the spectral norm of discarded entries.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrHermitian {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<C64>,
    pub dropped_bound: f64,
}

impl CsrHermitian {
    /// Assembles rows in parallel, dropping `|g_ij| < threshold`. The dropped part is
    /// bounded by its maximum absolute row sum (Gershgorin / Schur bound for Hermitian).
    pub fn from_fn<F: Fn(usize, usize) -> C64 + Sync>(n: usize, threshold: f64, f: F) -> Self {
        let rows: Vec<(Vec<(usize, C64)>, f64)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut kept = Vec::new();
                let mut dropped = 0.0;
                for j in 0..n {
                    let v = f(i, j);
                    if v.norm() >= threshold {
                        kept.push((j, v));
                    } else {
                        dropped += v.norm();
                    }
                }
                (kept, dropped)
            })
            .collect();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut dropped_bound: f64 = 0.0;
        row_ptr.push(0);
        for (kept, dropped) in rows {
            for (j, v) in kept {
                cols.push(j);
                vals.push(v);
            }
            row_ptr.push(cols.len());
            dropped_bound = dropped_bound.max(dropped);
        }
        CsrHermitian { n, row_ptr, cols, vals, dropped_bound }
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }
}

impl HermitianOp for CsrHermitian {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        y.par_iter_mut().enumerate().for_each(|(i, yi)| {
            let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1]);
            *yi = self.cols[s..e].iter().zip(&self.vals[s..e]).map(|(&j, v)| v * x[j]).sum();
        });
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigResult {
    pub value: f64,
    /// `‖A v − θ v‖` for the returned Ritz pair.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn norm(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

fn start_vector(n: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<C64> = (0..n).map(|_| C64::new(rng.gen_range(0.5..1.5), rng.gen_range(-0.5..0.5))).collect();
    let s = norm(&v);
    v.iter_mut().for_each(|x| *x /= s);
    v
}

/// Number of eigenvalues of the symmetric tridiagonal `(a, b)` below `x` (Sturm count).
fn sturm_count(a: &[f64], b: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..a.len() {
        let off = if i == 0 { 0.0 } else { b[i - 1] * b[i - 1] };
        q = a[i] - x - if i == 0 { 0.0 } else { off / q };
        if q == 0.0 {
            q = -1e-300;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Largest eigenvalue of a symmetric tridiagonal matrix by bisection.
pub fn tridiag_max_eig(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { b[i - 1].abs() } else { 0.0 } + if i + 1 < n { b[i].abs() } else { 0.0 };
        lo = lo.min(a[i] - r);
        hi = hi.max(a[i] + r);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(a, b, mid) < n {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Eigenvector of the tridiagonal `(a, b)` for eigenvalue `theta` by inverse iteration with
/// a partially pivoted LU factorization.
fn tridiag_eigvec(a: &[f64], b: &[f64], theta: f64) -> Vec<f64> {
    let n = a.len();
    if n == 1 {
        return vec![1.0];
    }
    let shift = theta + 1e-13 * theta.abs().max(1e-300);
    // bands of U after pivoting: u0 (diag), u1, u2; multipliers l; pivot flags
    let mut d: Vec<f64> = a.iter().map(|v| v - shift).collect();
    let mut du: Vec<f64> = b.to_vec();
    let mut dl: Vec<f64> = b.to_vec();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut piv = vec![false; n - 1];
    let mut l = vec![0.0; n - 1];
    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            let m = if d[i] != 0.0 { dl[i] / d[i] } else { 0.0 };
            l[i] = m;
            d[i + 1] -= m * du[i];
        } else {
            piv[i] = true;
            let m = d[i] / dl[i];
            l[i] = m;
            d[i] = dl[i];
            let t = du[i];
            du[i] = d[i + 1];
            d[i + 1] = t - m * d[i + 1];
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] *= -m;
            }
        }
        dl[i] = 0.0;
    }
    for v in d.iter_mut() {
        if v.abs() < 1e-300 {
            *v = 1e-300;
        }
    }
    let mut x = vec![1.0; n];
    for _ in 0..3 {
        // forward: apply L^{-1}
        for i in 0..n - 1 {
            if piv[i] {
                x.swap(i, i + 1);
                x[i + 1] -= l[i] * x[i];
            } else {
                x[i + 1] -= l[i] * x[i];
            }
        }
        // back: solve U
        for i in (0..n).rev() {
            let mut s = x[i];
            if i + 1 < n {
                s -= du[i] * x[i + 1];
            }
            if i + 2 < n {
                s -= du2[i] * x[i + 2];
            }
            x[i] = s / d[i];
        }
        let s = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= s);
    }
    x
}

/// Lanczos with full reorthogonalization for the largest eigenvalue. Stops once the Ritz
/// residual is below `tol·θ` and the Ritz value has been stable for `stable_iters` steps.
pub fn lanczos_max<O: HermitianOp + ?Sized>(op: &O, tol: f64, max_iter: usize, seed: u64) -> EigResult {
    let n = op.dim();
    if n == 0 {
        return EigResult { value: 0.0, residual: 0.0, iterations: 0, converged: true };
    }
    let stable_iters = 20usize;
    let max_iter = max_iter.min(n).max(1);
    let mut basis: Vec<Vec<C64>> = vec![start_vector(n, seed)];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![C64::new(0.0, 0.0); n];
    let mut history: Vec<f64> = Vec::new();
    let mut converged = false;
    loop {
        let k = alpha.len();
        op.apply(&basis[k], &mut w);
        let a = dot(&basis[k], &w).re;
        alpha.push(a);
        // two passes of classical Gram–Schmidt against the whole basis
        for _ in 0..2 {
            let coefs: Vec<C64> = basis.par_iter().map(|v| dot(v, &w)).collect();
            for (v, c) in basis.iter().zip(coefs) {
                w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= c * vi);
            }
        }
        let b = norm(&w);
        let theta = tridiag_max_eig(&alpha, &beta);
        history.push(theta);
        let s = tridiag_eigvec(&alpha, &beta, theta);
        let resid = b * s[s.len() - 1].abs();
        let stable = history.len() > stable_iters
            && (theta - history[history.len() - 1 - stable_iters]).abs() <= tol * theta.abs().max(1e-300);
        if (resid <= tol * theta.abs().max(1e-300) && (stable || alpha.len() == n)) || b <= 1e-14 * theta.abs().max(1e-300) {
            converged = true;
        }
        if converged || alpha.len() >= max_iter {
            // explicit residual of the Ritz vector
            let mut y = vec![C64::new(0.0, 0.0); n];
            for (v, &c) in basis.iter().zip(&s) {
                y.iter_mut().zip(v).for_each(|(yi, vi)| *yi += vi * c);
            }
            let ny = norm(&y);
            y.iter_mut().for_each(|v| *v /= ny);
            op.apply(&y, &mut w);
            let r: f64 = w.iter().zip(&y).map(|(a, b)| (a - b * theta).norm_sqr()).sum::<f64>().sqrt();
            if alpha.len() == n && !converged {
                converged = true;
            }
            return EigResult { value: theta, residual: r, iterations: alpha.len(), converged };
        }
        beta.push(b);
        let next: Vec<C64> = w.iter().map(|v| v / b).collect();
        basis.push(next);
    }
}

/// Power iteration with Rayleigh-quotient estimate, for positive semidefinite operators.
pub fn power_iteration_max<O: HermitianOp + ?Sized>(op: &O, tol: f64, max_iter: usize, seed: u64) -> EigResult {
    let n = op.dim();
    if n == 0 {
        return EigResult { value: 0.0, residual: 0.0, iterations: 0, converged: true };
    }
    let mut x = start_vector(n, seed);
    let mut y = vec![C64::new(0.0, 0.0); n];
    let mut theta = 0.0;
    let mut prev_delta = 0.0;
    for it in 1..=max_iter {
        op.apply(&x, &mut y);
        let t = dot(&x, &y).re;
        let r: f64 = y.iter().zip(&x).map(|(a, b)| (a - b * t).norm_sqr()).sum::<f64>().sqrt();
        let ny = norm(&y);
        if ny == 0.0 {
            return EigResult { value: 0.0, residual: 0.0, iterations: it, converged: true };
        }
        // geometric extrapolation of the remaining Rayleigh-quotient drift
        let delta = (t - theta).abs();
        let q = if prev_delta > 0.0 { (delta / prev_delta).min(1.0) } else { 1.0 };
        let ahead = if q < 1.0 { delta / (1.0 - q) } else { f64::INFINITY };
        if it > 2 && (r <= tol * t.abs() || (ahead <= tol * t.abs() && r <= tol.sqrt() * t.abs())) {
            return EigResult { value: t, residual: r, iterations: it, converged: true };
        }
        prev_delta = delta;
        theta = t;
        x.iter_mut().zip(&y).for_each(|(xi, yi)| *xi = yi / ny);
    }
    op.apply(&x, &mut y);
    let t = dot(&x, &y).re;
    let r: f64 = y.iter().zip(&x).map(|(a, b)| (a - b * t).norm_sqr()).sum::<f64>().sqrt();
    EigResult { value: t, residual: r, iterations: max_iter, converged: false }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_max_matches_closed_form() {
        // 1-D Laplacian eigenvalues 2 − 2cos(kπ/(n+1))
        let n = 30;
        let a = vec![2.0; n];
        let b = vec![-1.0; n - 1];
        let exact = 2.0 - 2.0 * (n as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos();
        assert!((tridiag_max_eig(&a, &b) - exact).abs() < 1e-13);
        let v = tridiag_eigvec(&a, &b, exact);
        // residual of T v − θ v
        let mut res: f64 = 0.0;
        for i in 0..n {
            let mut t = a[i] * v[i] - exact * v[i];
            if i > 0 {
                t += b[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                t += b[i] * v[i + 1];
            }
            res = res.max(t.abs());
        }
        assert!(res < 1e-10, "{res}");
    }

    #[test]
    fn lanczos_diagonal() {
        let m = DenseHermitian::from_fn(50, |i, j| if i == j { C64::new(1.0 + i as f64 / 10.0, 0.0) } else { C64::new(0.0, 0.0) });
        let r = lanczos_max(&m, 1e-12, 200, 1);
        assert!((r.value - 5.9).abs() < 1e-10);
        assert!(r.converged);
    }

    #[test]
    fn csr_matches_dense() {
        let f = |i: usize, j: usize| {
            let d = i as f64 - j as f64;
            C64::from_polar((-d * d).exp(), 0.3 * d)
        };
        let dense = DenseHermitian::from_fn(40, f);
        let sparse = CsrHermitian::from_fn(40, 1e-18, f);
        assert!(sparse.nnz() < 40 * 40);
        let a = lanczos_max(&dense, 1e-12, 100, 7).value;
        let b = lanczos_max(&sparse, 1e-12, 100, 7).value;
        assert!((a - b).abs() < 1e-12 + sparse.dropped_bound);
    }
}
