//! Maximal Nyquist densities `ρ(Ω, r)`: exact sliding windows in 1-D, product and radial
//! upper bounds, the porous-set bound, a Monte-Carlo lower bound, and Cantor-function
//! subadditivity oracles.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cantor::{ball_volume, build_iterate, cantor_function, check_growth, factorial, CantorSpec, GrowthCondition, ProductCantor, RadialCantorSpec, ScaleRule};
use crate::error::{FupError, Result};
use crate::interval::IntervalUnion;
use crate::quadrature::integrate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityKind {
    Exact,
    UpperBound,
    MonteCarloLowerBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityResult {
    pub value: f64,
    pub kind: DensityKind,
    pub window_radius: f64,
    /// Volume of the window shape the value refers to (interval, cube or ball).
    pub window_volume: f64,
    /// Total measure of the set.
    pub total_measure: f64,
    pub argmax: Option<Vec<f64>>,
}

impl DensityResult {
    /// `value ≤ min(total measure, window volume)` up to `tol`.
    pub fn respects_cap(&self, tol: f64) -> bool {
        self.value <= self.total_measure.min(self.window_volume) + tol
    }
}

/// `sup_a |Ω ∩ [a, a + x]|`; `argmax` holds the maximizing window's center.
pub fn rho_exact_1d(set: &IntervalUnion, x: f64) -> Result<DensityResult> {
    if !(x > 0.0) {
        return Err(FupError::InvalidParameter(format!("window length must be positive, got {x}")));
    }
    let mut best = (0.0, None);
    for &(a, b) in set.intervals() {
        for start in [a, b - x, a - x, b] {
            let v = set.measure_in(start, start + x);
            if v > best.0 {
                best = (v, Some(start));
            }
        }
    }
    Ok(DensityResult {
        value: best.0,
        kind: DensityKind::Exact,
        window_radius: 0.5 * x,
        window_volume: x,
        total_measure: set.measure(),
        argmax: best.1.map(|a| vec![a + 0.5 * x]),
    })
}

/// `Π_j ρ_1d(Ω_j, 2r)`: every ball of radius r sits in a cube of side 2r.
pub fn rho_product_bound(factors: &[IntervalUnion], r: f64) -> Result<DensityResult> {
    if !(r > 0.0) {
        return Err(FupError::InvalidParameter(format!("radius must be positive, got {r}")));
    }
    let mut value = 1.0;
    let mut center = Vec::with_capacity(factors.len());
    for f in factors {
        let d = rho_exact_1d(f, 2.0 * r)?;
        value *= d.value;
        center.push(d.argmax.map(|c| c[0]).unwrap_or(0.0));
    }
    Ok(DensityResult {
        value,
        kind: DensityKind::UpperBound,
        window_radius: r,
        window_volume: (2.0 * r).powi(factors.len() as i32),
        total_measure: factors.iter().map(IntervalUnion::measure).product(),
        argmax: Some(center),
    })
}

pub fn rho_product_bound_spec(set: &ProductCantor, r: f64) -> Result<DensityResult> {
    rho_product_bound(&set.build_factors()?, r)
}

/// Fraction of the unit sphere `S^{2d−1}` within angle `θ` of a pole.
fn cap_fraction(d: u32, theta: f64) -> f64 {
    let k = 2 * d as i32 - 2;
    let f = |t: f64| t.sin().powi(k);
    let num = integrate(f, 0.0, theta, 1e-15, 1e-13, 200).value;
    let den = integrate(f, 0.0, std::f64::consts::PI, 1e-15, 1e-13, 200).value;
    num / den
}

/// Surface-quotient constant `α(N, d) = sup_{s ≥ N} s^{2d−1}·F_d(arcsin(1/s))`, cached.
pub fn surface_quotient_alpha(n_cut: f64, d: u32) -> Result<f64> {
    if !(n_cut > 1.0) {
        return Err(FupError::InvalidParameter(format!("cutoff N must exceed 1, got {n_cut}")));
    }
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32), f64>>> = OnceLock::new();
    let key = (n_cut.to_bits(), d);
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&v) = cache.lock().unwrap().get(&key) {
        return Ok(v);
    }
    let e = 2 * d as i32 - 1;
    let mut best: f64 = 0.0;
    for i in 0..=400 {
        let s = n_cut * 10f64.powf(i as f64 * 4.0 / 400.0);
        best = best.max(s.powi(e) * cap_fraction(d, (1.0 / s).asin()));
    }
    cache.lock().unwrap().insert(key, best);
    Ok(best)
}

/// Two-case upper bound on `ρ` for a radial iterate (windows near vs. far from the origin).
pub fn rho_radial_bound(spec: &RadialCantorSpec, r: f64, n_cut: f64, alpha: Option<f64>) -> Result<DensityResult> {
    if !(r > 0.0) {
        return Err(FupError::InvalidParameter(format!("radius must be positive, got {r}")));
    }
    let alpha = match alpha {
        Some(a) => a,
        None => surface_quotient_alpha(n_cut, spec.d)?,
    };
    if !(n_cut > 1.0) {
        return Err(FupError::InvalidParameter(format!("cutoff N must exceed 1, got {n_cut}")));
    }
    let d = spec.d;
    let two_d = 2 * d as i32;
    let t = spec.t_spec();
    let t_measure = t.expected_measure();
    let vol_t = |s: &CantorSpec, x: f64| cantor_function(s, x) * s.expected_measure();
    let c_d = std::f64::consts::PI.powi(d as i32) / factorial(d);
    let re = r.max(1.0);
    let near = c_d * vol_t(&t, ((n_cut + 1.0) * re).powi(two_d));
    let shell = (1.0 + re).powi(two_d) - (1.0 - re).powi(two_d);
    let q = vol_t(&t.canonical(), shell);
    let far = alpha * c_d * q * re.powi(two_d - 1) * (1.0 + (n_cut * re).powi(1 - two_d));
    let total = c_d * t_measure;
    let ball = ball_volume(d, r);
    Ok(DensityResult {
        value: near.max(far).min(total).min(ball),
        kind: DensityKind::UpperBound,
        window_radius: r,
        window_volume: ball,
        total_measure: total,
        argmax: None,
    })
}

/// Halton radical inverse in base `b`.
fn halton(mut i: u64, b: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= b as f64;
        r += f * (i % b) as f64;
        i /= b;
    }
    r
}

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Monte-Carlo lower bound: quasi-random centers in `search_box`, uniform samples per ball,
/// and a three-sigma deflation of each hit fraction.
pub fn rho_monte_carlo<F>(
    member: F,
    r: f64,
    search_box: &[(f64, f64)],
    centers: usize,
    samples_per_ball: usize,
    seed: u64,
) -> Result<DensityResult>
where
    F: Fn(&[f64]) -> bool + Sync,
{
    let dim = search_box.len();
    if centers == 0 || samples_per_ball == 0 || dim == 0 || dim > PRIMES.len() || !(r > 0.0) {
        return Err(FupError::InvalidParameter("need centers, samples >= 1, 1 <= dim <= 8, r > 0".into()));
    }
    let vol = if dim.is_multiple_of(2) {
        ball_volume(dim as u32 / 2, r)
    } else {
        // odd dimensions: V_k = 2π/k · V_{k−2} r²
        let mut v = 2.0 * r;
        let mut k = 1;
        while k < dim {
            k += 2;
            v *= 2.0 * std::f64::consts::PI * r * r / k as f64;
        }
        v
    };
    let results: Vec<(f64, Vec<f64>)> = (0..centers)
        .into_par_iter()
        .map(|i| {
            let c: Vec<f64> = search_box
                .iter()
                .enumerate()
                .map(|(k, &(lo, hi))| lo + (hi - lo) * halton(i as u64 + 1, PRIMES[k]))
                .collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let mut p = vec![0.0; dim];
            let mut hits = 0usize;
            let mut drawn = 0usize;
            while drawn < samples_per_ball {
                let mut s2 = 0.0;
                for pk in p.iter_mut() {
                    let u: f64 = rng.gen_range(-1.0..1.0);
                    *pk = u;
                    s2 += u * u;
                }
                if s2 > 1.0 {
                    continue;
                }
                drawn += 1;
                for k in 0..dim {
                    p[k] = c[k] + r * p[k];
                }
                if member(&p) {
                    hits += 1;
                }
            }
            let ph = hits as f64 / samples_per_ball as f64;
            let lb = (ph - 3.0 * (ph * (1.0 - ph) / samples_per_ball as f64).sqrt()).max(0.0);
            (lb * vol, c)
        })
        .collect();
    let best = results
        .into_iter()
        .fold((0.0, None), |acc, (v, c)| if v > acc.0 { (v, Some(c)) } else { acc });
    Ok(DensityResult {
        value: best.0,
        kind: DensityKind::MonteCarloLowerBound,
        window_radius: r,
        window_volume: vol,
        total_measure: f64::INFINITY,
        argmax: best.1,
    })
}

/// `(1 − ν^{2d}) (πr²)^d / d!`.
pub fn rho_porous_bound(nu: f64, r: f64, d: u32) -> Result<f64> {
    if !(nu > 0.0 && nu < 1.0) || !(r > 0.0) || d == 0 {
        return Err(FupError::InvalidParameter("need 0 < nu < 1, r > 0, d >= 1".into()));
    }
    Ok((1.0 - nu.powi(2 * d as i32)) * ball_volume(d, r))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubadditivityViolation {
    pub x: f64,
    pub y: f64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubadditivityReport {
    pub pass: bool,
    pub checked: usize,
    /// Largest observed `lhs − rhs` (non-positive on success up to rounding).
    pub max_excess: f64,
    pub first_violation: Option<SubadditivityViolation>,
}

const SUBADD_TOL: f64 = 1e-12;

/// `G_A(y) − G_A(x) ≤ G_Ā(y − x)` over the supplied pairs.
pub fn check_weak_subadditivity(spec: &CantorSpec, pairs: &[(f64, f64)]) -> Result<SubadditivityReport> {
    check_weak_subadditivity_scaled(spec, pairs, 1.0)
}

/// As [`check_weak_subadditivity`] with the right-hand side multiplied by `rhs_scale`
/// (values below 1 give a deliberately broken fixture for harness self-tests).
pub fn check_weak_subadditivity_scaled(
    spec: &CantorSpec,
    pairs: &[(f64, f64)],
    rhs_scale: f64,
) -> Result<SubadditivityReport> {
    spec.validate()?;
    let bar = spec.canonical();
    let mut rep = SubadditivityReport { pass: true, checked: 0, max_excess: f64::NEG_INFINITY, first_violation: None };
    for &(x, y) in pairs {
        if x > y {
            return Err(FupError::InvalidParameter(format!("pair requires x <= y, got ({x}, {y})")));
        }
        let lhs = cantor_function(spec, y) - cantor_function(spec, x);
        let rhs = rhs_scale * cantor_function(&bar, y - x);
        rep.checked += 1;
        rep.max_excess = rep.max_excess.max(lhs - rhs);
        if lhs > rhs + SUBADD_TOL && rep.first_violation.is_none() {
            rep.pass = false;
            rep.first_violation = Some(SubadditivityViolation { x, y, lhs, rhs });
        }
    }
    Ok(rep)
}

/// `G_Ā(m·x) ≤ (⌈m⌉)·G_Ā(x) ≤ (m + 1)·G_Ā(x)`; returns `(lhs, ⌈m⌉·G_Ā(x))`.
pub fn multiple_subadditivity(spec: &CantorSpec, x: f64, m: f64) -> (f64, f64) {
    let bar = spec.canonical();
    (cantor_function(&bar, m * x), m.ceil() * cantor_function(&bar, x))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayRow {
    pub n: u32,
    pub length: f64,
    pub measure: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    pub rows: Vec<DecayRow>,
    pub gamma: f64,
    pub slope: f64,
    pub pass: bool,
}

const SLOPE_TOL: f64 = 1e-9;

/// `|𝒞ₙ(L(n)) ∩ [0, x]| ≤ γ (|A|/M)^{n/2}` along a family: returns the ratios, their
/// maximum `γ`, and the least-squares slope of `ln ratio` against `n` (zero ratios skipped).
pub fn check_density_decay(
    base: &CantorSpec,
    rule: ScaleRule,
    ns: &[u32],
    x: f64,
    cond: &GrowthCondition,
) -> Result<DecayReport> {
    base.validate()?;
    let samples = rule.samples(ns.iter().copied());
    let g = check_growth(cond, &samples);
    if let Some(v) = g.first_violation {
        return Err(FupError::Growth { n: v.n, detail: format!("L = {} outside [{}, {}]", v.value, v.lower, v.upper) });
    }
    let rows: Vec<DecayRow> = samples
        .iter()
        .map(|&(n, l)| {
            let s = base.with_n(n).with_l(l);
            let measure = cantor_function(&s, x) * s.expected_measure();
            DecayRow { n, length: l, measure, ratio: measure / s.ratio().powf(n as f64 / 2.0) }
        })
        .collect();
    let gamma = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let pts: Vec<(f64, f64)> = rows.iter().filter(|r| r.ratio > 0.0).map(|r| (r.n as f64, r.ratio.ln())).collect();
    let slope = least_squares_slope(&pts);
    Ok(DecayReport { rows, gamma, slope, pass: gamma.is_finite() && slope <= SLOPE_TOL })
}

/// Ordinary least-squares slope; 0 for fewer than two points.
pub fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Measure of a Cantor iterate inside `[0, x]` by interval intersection (oracle path).
pub fn measure_below(spec: &CantorSpec, x: f64) -> Result<f64> {
    Ok(build_iterate(spec)?.measure_in(0.0, x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halton_is_low_discrepancy_prefix() {
        assert_eq!(halton(1, 2), 0.5);
        assert_eq!(halton(2, 2), 0.25);
        assert!((halton(1, 3) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn alpha_d1_closed_form() {
        let a = surface_quotient_alpha(4.0, 1).unwrap();
        assert!((a - 4.0 * (0.25f64).asin() / std::f64::consts::PI).abs() < 1e-12);
        assert!(surface_quotient_alpha(1.0, 1).is_err());
    }

    #[test]
    fn slope_of_line() {
        assert!((least_squares_slope(&[(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)]) - 2.0).abs() < 1e-14);
    }
}
