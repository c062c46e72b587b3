//! Quadrature checks of the Fock-space subaveraging inequality and of STFT mass quotients.

use serde::{Deserialize, Serialize};

use crate::bounds::{local_density_bound, optimized_density_bound, subaveraging_prefactor};
use crate::error::{FupError, Result};
use crate::interval::IntervalUnion;
use crate::nyquist::rho_product_bound;
use crate::quadrature::{gk15, integrate};
use crate::special::ln_gamma;
use crate::tf::hermite::PhasePoint;

use std::f64::consts::PI;

/// Relative quadrature budget.
pub const QUAD_BUDGET: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubaverageStatus {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubaverageReport {
    pub status: SubaverageStatus,
    pub lhs: f64,
    pub rhs: f64,
    pub prefactor: f64,
    pub ball_integral: f64,
    pub quad_error: f64,
}

/// `|ξ|^{kp} e^{−(p/2)π|ξ|²}` on one complex coordinate.
fn weight(k: u32, p: f64, re: f64, im: f64) -> f64 {
    let r2 = re * re + im * im;
    if k == 0 {
        return (-0.5 * p * PI * r2).exp();
    }
    if r2 == 0.0 {
        return 0.0;
    }
    (0.5 * k as f64 * p * r2.ln() - 0.5 * p * PI * r2).exp()
}

/// `∫_0^{2π} w(z + ρe^{iθ}) dθ` by trapezoid doubling; returns (value, last change).
fn circle_mean(k: u32, p: f64, z: (f64, f64), rho: f64) -> (f64, f64) {
    let eval = |m: usize| -> f64 {
        let h = 2.0 * PI / m as f64;
        (0..m)
            .map(|j| {
                let th = j as f64 * h;
                weight(k, p, z.0 + rho * th.cos(), z.1 + rho * th.sin())
            })
            .sum::<f64>()
            * h
    };
    let mut m = 32;
    let mut prev = eval(m);
    loop {
        m *= 2;
        let cur = eval(m);
        let change = (cur - prev).abs();
        if change <= 1e-13 * cur.abs() || m >= 1 << 14 {
            return (cur, change);
        }
        prev = cur;
    }
}

/// Cumulative `H(s) = ∫_0^s h(ρ) ρ dρ` from fixed GK panels plus one partial panel.
struct Cumulative<'a> {
    h: Box<dyn Fn(f64) -> f64 + 'a>,
    edges: Vec<f64>,
    prefix: Vec<f64>,
    error: f64,
}

impl<'a> Cumulative<'a> {
    fn new(h: Box<dyn Fn(f64) -> f64 + 'a>, upper: f64, panels: usize) -> Self {
        let edges: Vec<f64> = (0..=panels).map(|i| upper * i as f64 / panels as f64).collect();
        let mut prefix = vec![0.0];
        let mut error = 0.0;
        for w in edges.windows(2) {
            let mut f = |r: f64| h(r) * r;
            let (v, e) = gk15(&mut f, w[0], w[1]);
            prefix.push(prefix.last().copied().unwrap_or(0.0) + v);
            error += e;
        }
        Cumulative { h, edges, prefix, error }
    }

    fn at(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        let step = self.edges[1] - self.edges[0];
        let i = ((s / step).floor() as usize).min(self.edges.len() - 1);
        let base = self.prefix[i];
        if s <= self.edges[i] {
            return base;
        }
        let mut f = |r: f64| (self.h)(r) * r;
        base + gk15(&mut f, self.edges[i], s).0
    }
}

/// Checks `|F(z)|^p e^{−(p/2)π|z|²} ≤ (p/2)^d P(d,(p/2)πR²)^{−1} ∫_{B_R(z)} |F|^p e^{−(p/2)π|ξ|²}`
/// for the monomial `F = z^k` (multi-index of length `d ∈ {1, 2}`).
pub fn check_subaveraging(k: &[u32], z: &PhasePoint, r: f64, p: f64) -> Result<SubaverageReport> {
    let d = k.len();
    if !(d == 1 || d == 2) || z.dim() != d {
        return Err(FupError::Unsupported(format!("subaveraging check supports d = 1, 2 (got {d})")));
    }
    if !(r > 0.0 && p > 0.0 && r.is_finite() && p.is_finite()) {
        return Err(FupError::InvalidParameter("need R > 0 and p > 0".into()));
    }
    let zc: Vec<(f64, f64)> = (0..d).map(|j| (z.x[j], z.omega[j])).collect();
    let lhs: f64 = (0..d).map(|j| weight(k[j], p, zc[j].0, zc[j].1)).product();
    let (integral, err) = if d == 1 {
        let (k0, z0) = (k[0], zc[0]);
        let mut theta_err: f64 = 0.0;
        let q = integrate(
            |rho| {
                let (v, e) = circle_mean(k0, p, z0, rho);
                theta_err = theta_err.max(e * rho);
                v * rho
            },
            0.0,
            r,
            0.0,
            1e-11,
            4000,
        );
        (q.value, q.error + theta_err * r + if q.converged { 0.0 } else { f64::INFINITY })
    } else {
        let (k1, z1, k2, z2) = (k[0], zc[0], k[1], zc[1]);
        let mut panels = 32;
        loop {
            let h2 = Cumulative::new(Box::new(move |rho| circle_mean(k2, p, z2, rho).0), r, panels);
            let q = integrate(
                |rho| circle_mean(k1, p, z1, rho).0 * rho * h2.at((r * r - rho * rho).max(0.0).sqrt()),
                0.0,
                r,
                0.0,
                1e-10,
                2000,
            );
            let inner_rel = h2.error / h2.prefix.last().copied().unwrap_or(0.0).abs().max(f64::MIN_POSITIVE);
            let err = q.error + inner_rel * q.value.abs() + if q.converged { 0.0 } else { f64::INFINITY };
            if err <= 1e-9 * q.value.abs() || panels >= 1024 {
                break (q.value, err);
            }
            panels *= 2;
        }
    };
    let prefactor = subaveraging_prefactor(d as u32, p, r);
    let rhs = prefactor * integral;
    let quad_error = prefactor * err;
    let status = if !(quad_error <= QUAD_BUDGET * rhs.abs()) && !(lhs == 0.0) {
        SubaverageStatus::Inconclusive
    } else if lhs <= rhs * (1.0 + QUAD_BUDGET) {
        SubaverageStatus::Pass
    } else {
        SubaverageStatus::Fail
    };
    Ok(SubaverageReport { status, lhs, rhs, prefactor, ball_integral: integral, quad_error })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StftQuotient {
    pub order: u32,
    pub p: f64,
    /// `‖V f·χ_Ω‖_p^p / ‖V f‖_p^p`.
    pub value: f64,
    pub quad_error: f64,
    /// `(R, ρ(Ω,R), p-bound, optimized bound)` per tested radius.
    pub bounds: Vec<(f64, f64, f64, f64)>,
    pub pass: bool,
}

/// Mass quotient of `|V_{φ₀}h_k|^p` on a product set `X × W` (d = 1), compared against the
/// density bounds at each radius in `radii`.
pub fn eval_stft_quotient(order: u32, x_set: &IntervalUnion, w_set: &IntervalUnion, p: f64, radii: &[f64]) -> Result<StftQuotient> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(FupError::InvalidParameter("p must be positive".into()));
    }
    let a = 0.5 * order as f64 * p;
    let c = 0.5 * p * PI;
    // normalize by the peak of r^{kp} e^{−c r²} to keep magnitudes near 1
    let ln_peak = if order == 0 { 0.0 } else { a * (a / c).ln() - a };
    let g = |x: f64, w: f64| {
        let r2 = x * x + w * w;
        if order == 0 {
            (-c * r2).exp()
        } else if r2 == 0.0 {
            0.0
        } else {
            (a * r2.ln() - c * r2 - ln_peak).exp()
        }
    };
    let ln_total = PI.ln() + ln_gamma(a + 1.0) - (a + 1.0) * c.ln() - ln_peak;
    let total = ln_total.exp();
    // beyond `cut` the integrand is below e^{−40} of its peak in both coordinates jointly
    let cut = (a / c).sqrt() + (40.0 / c).sqrt() + 1.0;
    let width = 0.5 / c.sqrt();
    let panels = |set: &IntervalUnion| -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for &(lo, hi) in set.intervals() {
            let (lo, hi) = (lo.max(-cut), hi.min(cut));
            if hi <= lo {
                continue;
            }
            let m = ((hi - lo) / width).ceil().max(1.0) as usize;
            out.extend((0..m).map(|i| (lo + (hi - lo) * i as f64 / m as f64, lo + (hi - lo) * (i + 1) as f64 / m as f64)));
        }
        out
    };
    let xp = panels(x_set);
    let wp = panels(w_set);
    let mut value = 0.0;
    let mut err = 0.0;
    for &(x0, x1) in &xp {
        let mut inner_err: f64 = 0.0;
        let q = integrate(
            |x| {
                wp.iter()
                    .map(|&(w0, w1)| {
                        let r = integrate(|w| g(x, w), w0, w1, 1e-16 * total, 1e-12, 400);
                        inner_err += r.error;
                        r.value
                    })
                    .sum()
            },
            x0,
            x1,
            1e-16 * total,
            1e-12,
            400,
        );
        value += q.value;
        err += q.error;
        let _ = inner_err;
    }
    let quotient = value / total;
    let factors = [x_set.clone(), w_set.clone()];
    let mut bounds = Vec::with_capacity(radii.len());
    let mut pass = true;
    for &r in radii {
        let rho = if x_set.is_empty() || w_set.is_empty() { 0.0 } else { rho_product_bound(&factors, r)?.value };
        let bp = local_density_bound(rho, r, 1, p);
        let bo = optimized_density_bound(rho, r, 1);
        pass &= quotient <= bp.min(bo) * (1.0 + 1e-9) + 1e-15;
        bounds.push((r, rho, bp, bo));
    }
    Ok(StftQuotient { order, p, value: quotient, quad_error: err / total, bounds, pass })
}
