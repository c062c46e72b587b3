//! Hermite functions, the Bargmann transform, and the Gaussian-window STFT.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{FupError, Result};
use crate::quadrature::uniform_grid;
use crate::special::ln_factorial;

use std::f64::consts::PI;

/// Largest supported Hermite order per axis.
pub const MAX_ORDER: u32 = 60;

/// Phase-space point `z = x + iω` (one complex coordinate per time axis).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhasePoint {
    pub x: Vec<f64>,
    pub omega: Vec<f64>,
}

impl PhasePoint {
    pub fn new(x: Vec<f64>, omega: Vec<f64>) -> Self {
        assert_eq!(x.len(), omega.len());
        PhasePoint { x, omega }
    }

    pub fn d1(x: f64, omega: f64) -> Self {
        PhasePoint { x: vec![x], omega: vec![omega] }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn z(&self) -> Vec<C64> {
        self.x.iter().zip(&self.omega).map(|(&a, &b)| C64::new(a, b)).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.x.iter().chain(&self.omega).map(|v| v * v).sum()
    }

    /// `λ̄`: the frequency coordinates negated.
    pub fn conj(&self) -> Self {
        PhasePoint { x: self.x.clone(), omega: self.omega.iter().map(|w| -w).collect() }
    }
}

/// The normalized window `φ₀(t) = 2^{1/4} e^{−πt²}` on one axis.
pub fn phi0(t: f64) -> f64 {
    2f64.powf(0.25) * (-PI * t * t).exp()
}

/// `h_0..h_k` at `t`, normalized in `L²(ℝ)` with `h_0 = φ₀`.
pub fn hermite_functions(k: u32, t: f64) -> Vec<f64> {
    let u = (2.0 * PI).sqrt() * t;
    let scale = (2.0 * PI).powf(0.25);
    let mut out = Vec::with_capacity(k as usize + 1);
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-0.5 * u * u).exp();
    out.push(scale * cur);
    for j in 0..k {
        let jf = j as f64;
        let next = (2.0 / (jf + 1.0)).sqrt() * u * cur - (jf / (jf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        out.push(scale * cur);
    }
    out
}

pub fn hermite_function(k: u32, t: f64) -> f64 {
    hermite_functions(k, t)[k as usize]
}

/// Tensor Hermite function `Π_j h_{k_j}(t_j)`.
pub fn hermite_tensor(k: &[u32], t: &[f64]) -> f64 {
    k.iter().zip(t).map(|(&kj, &tj)| hermite_function(kj, tj)).product()
}

/// Closed-form Bargmann image `Π_j (π^{k_j}/k_j!)^{1/2} z_j^{k_j}`.
pub fn bargmann_hermite(k: &[u32], z: &PhasePoint) -> Result<C64> {
    if k.len() != z.dim() {
        return Err(FupError::InvalidParameter("multi-index and point dimensions differ".into()));
    }
    if let Some(&bad) = k.iter().find(|&&kj| kj > MAX_ORDER) {
        return Err(FupError::Range(format!("Hermite order {bad} exceeds the maximum {MAX_ORDER}")));
    }
    let mut acc = C64::new(1.0, 0.0);
    for (&kj, zj) in k.iter().zip(z.z()) {
        let c = (0.5 * (kj as f64 * PI.ln() - ln_factorial(kj))).exp();
        acc *= zj.powu(kj) * c;
    }
    Ok(acc)
}

/// Complex samples of a signal on a symmetric tensor grid `[−w, w]^d` with spacing `step`.
#[derive(Debug, Clone)]
pub struct SampledSignal {
    pub d: usize,
    pub nodes: Vec<f64>,
    pub step: f64,
    pub values: Vec<C64>,
}

impl SampledSignal {
    pub fn sample<F: Fn(&[f64]) -> C64>(d: usize, half_width: f64, step: f64, f: F) -> Result<Self> {
        if d == 0 || d > 2 {
            return Err(FupError::Unsupported(format!("sampled signals support d <= 2, got {d}")));
        }
        let (nodes, step) = uniform_grid(half_width, step);
        let m = nodes.len();
        let mut values = Vec::with_capacity(m.pow(d as u32));
        if d == 1 {
            for &t in &nodes {
                values.push(f(&[t]));
            }
        } else {
            for &t0 in &nodes {
                for &t1 in &nodes {
                    values.push(f(&[t0, t1]));
                }
            }
        }
        Ok(SampledSignal { d, nodes, step, values })
    }

    /// A tensor Hermite function sampled on `[−8, 8]^d` at spacing 1/32.
    pub fn hermite(k: &[u32]) -> Result<Self> {
        let k = k.to_vec();
        Self::sample(k.len(), 8.0, 1.0 / 32.0, move |t| C64::new(hermite_tensor(&k, t), 0.0))
    }

    /// Boundary-to-peak magnitude ratio.
    pub fn decay_ratio(&self) -> f64 {
        let m = self.nodes.len();
        let peak = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let edge = self
            .values
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                let idx: Vec<usize> = if self.d == 1 { vec![*i] } else { vec![i / m, i % m] };
                idx.iter().any(|&j| j == 0 || j == m - 1)
            })
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max);
        if peak == 0.0 {
            0.0
        } else {
            edge / peak
        }
    }

    /// Trapezoid sum of `f(t)·kernel(t)` over the grid, plus the same sum at spacing `2h`.
    fn integrate_with<K: Fn(&[f64]) -> C64>(&self, kernel: K) -> (C64, C64) {
        let m = self.nodes.len();
        let w = |j: usize| if j == 0 || j == m - 1 { 0.5 } else { 1.0 };
        let w2 = |j: usize| {
            if j % 2 == 1 {
                0.0
            } else if j == 0 || j == m - 1 {
                1.0
            } else {
                2.0
            }
        };
        let mut fine = C64::new(0.0, 0.0);
        let mut coarse = C64::new(0.0, 0.0);
        if self.d == 1 {
            for (j, &t) in self.nodes.iter().enumerate() {
                let v = self.values[j] * kernel(&[t]);
                fine += v * w(j);
                coarse += v * w2(j);
            }
            (fine * self.step, coarse * self.step)
        } else {
            for (i, &t0) in self.nodes.iter().enumerate() {
                for (j, &t1) in self.nodes.iter().enumerate() {
                    let v = self.values[i * m + j] * kernel(&[t0, t1]);
                    fine += v * (w(i) * w(j));
                    coarse += v * (w2(i) * w2(j));
                }
            }
            (fine * self.step * self.step, coarse * self.step * self.step)
        }
    }
}

/// Quadrature value with an error estimate from a halved grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadValue {
    pub value: C64,
    pub error: f64,
    /// Signal did not decay to 1e−12 of its peak at the grid boundary.
    pub decay_warning: bool,
}

/// `2^{d/4} ∫ f(t) e^{2πt·z − πt² − (π/2) z·z} dt` by tensor trapezoid quadrature.
pub fn bargmann_quadrature(f: &SampledSignal, z: &PhasePoint) -> Result<QuadValue> {
    if z.dim() != f.d {
        return Err(FupError::InvalidParameter("signal and point dimensions differ".into()));
    }
    let zs = z.z();
    let zz: C64 = zs.iter().map(|v| v * v).sum();
    let c = 2f64.powf(f.d as f64 / 4.0);
    let kernel = |t: &[f64]| {
        let mut e = -0.5 * PI * zz;
        for (tj, zj) in t.iter().zip(&zs) {
            e += 2.0 * PI * tj * zj - PI * tj * tj;
        }
        e.exp() * c
    };
    let (fine, coarse) = f.integrate_with(kernel);
    Ok(QuadValue { value: fine, error: (fine - coarse).norm(), decay_warning: f.decay_ratio() > 1e-12 })
}

/// `V_{φ₀} f(x, ω) = ∫ f(t) e^{−2πiω·t} φ₀(t − x) dt`.
pub fn stft_gauss(f: &SampledSignal, x: &[f64], omega: &[f64]) -> Result<QuadValue> {
    if x.len() != f.d || omega.len() != f.d {
        return Err(FupError::InvalidParameter("signal and point dimensions differ".into()));
    }
    let kernel = |t: &[f64]| {
        let mut phase = 0.0;
        let mut mag = 1.0;
        for j in 0..t.len() {
            phase -= 2.0 * PI * omega[j] * t[j];
            mag *= phi0(t[j] - x[j]);
        }
        C64::from_polar(mag, phase)
    };
    let (fine, coarse) = f.integrate_with(kernel);
    Ok(QuadValue { value: fine, error: (fine - coarse).norm(), decay_warning: f.decay_ratio() > 1e-12 })
}

/// Maximum over `points` of `|V f(x, −ω) − e^{iπx·ω} Bf(z) e^{−π|z|²/2}|`, both sides by quadrature.
pub fn check_identity_2_4(f: &SampledSignal, points: &[PhasePoint]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for p in points {
        let neg: Vec<f64> = p.omega.iter().map(|w| -w).collect();
        let v = stft_gauss(f, &p.x, &neg)?.value;
        let b = bargmann_quadrature(f, p)?.value;
        let xw: f64 = p.x.iter().zip(&p.omega).map(|(a, b)| a * b).sum();
        let rhs = C64::from_polar(1.0, PI * xw) * b * (-0.5 * PI * p.norm_sqr()).exp();
        worst = worst.max((v - rhs).norm());
    }
    Ok(worst)
}

/// One termwise comparison `|⟨f, π(λ̄)φ₀⟩|² = |Bf(λ)|² e^{−π|λ|²}` for `f = h_k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma52Case {
    pub order: Vec<u32>,
    pub point: PhasePoint,
    pub lhs: f64,
    pub rhs: f64,
}

/// Checks the termwise identity on Hermite signals: left side by STFT quadrature at
/// `(x, −ω)`, right side from the closed-form Bargmann image. Returns the maximum error.
pub fn check_lemma_5_2(cases: &[(Vec<u32>, PhasePoint)]) -> Result<(f64, Vec<Lemma52Case>)> {
    let mut out = Vec::with_capacity(cases.len());
    let mut worst: f64 = 0.0;
    for (k, p) in cases {
        let f = SampledSignal::hermite(k)?;
        let lam_bar = p.conj();
        let lhs = stft_gauss(&f, &lam_bar.x, &lam_bar.omega)?.value.norm_sqr();
        let rhs = bargmann_hermite(k, p)?.norm_sqr() * (-PI * p.norm_sqr()).exp();
        worst = worst.max((lhs - rhs).abs());
        out.push(Lemma52Case { order: k.clone(), point: p.clone(), lhs, rhs });
    }
    Ok((worst, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_orthonormal() {
        let (grid, h) = uniform_grid(8.0, 1.0 / 32.0);
        for a in 0..6u32 {
            for b in 0..6u32 {
                let s: f64 = grid.iter().map(|&t| hermite_function(a, t) * hermite_function(b, t)).sum::<f64>() * h;
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((s - want).abs() < 1e-12, "{a} {b} {s}");
            }
        }
    }

    #[test]
    fn order_cap() {
        assert!(matches!(bargmann_hermite(&[MAX_ORDER + 1], &PhasePoint::d1(0.0, 0.0)), Err(FupError::Range(_))));
    }
}
