//! Explicit constants: `κ_d`, single-step density bounds, the porous step factor,
//! the radius schedule with its `(C, β)` synthesis, and Cantor bound tables.

use serde::{Deserialize, Serialize};

use crate::cantor::{ball_volume, build_iterate, check_growth, GrowthCondition, GrowthKind, RadialCantorSpec, ScaleRule, CantorSpec};
use crate::error::{FupError, Result};
use crate::nyquist::{rho_product_bound, rho_radial_bound};
use crate::special::gamma_p;

pub use crate::special::kappa;

use std::f64::consts::PI;

/// `(p/2)^d / P(d, (p/2)πR²)`.
pub fn subaveraging_prefactor(d: u32, p: f64, r: f64) -> f64 {
    let h = 0.5 * p;
    h.powi(d as i32) / gamma_p(d as f64, h * PI * r * r)
}

/// `(p/2)^d ρ / P(d, (p/2)πR²)`.
pub fn local_density_bound(rho: f64, r: f64, d: u32, p: f64) -> f64 {
    if rho == 0.0 {
        return 0.0;
    }
    rho * subaveraging_prefactor(d, p, r)
}

/// `2^{−d} ρ / P(d, πR²/2)`, the p-independent optimized form.
pub fn optimized_density_bound(rho: f64, r: f64, d: u32) -> f64 {
    local_density_bound(rho, r, d, 1.0)
}

/// `ρ / (1 − e^{−πR²})`, the Hermite-window comparison target (d = 1).
pub fn hermite_window_bound(rho: f64, r: f64) -> f64 {
    rho / -(-PI * r * r).exp_m1()
}

/// `argmin` and `min` of `f` over a grid of radii.
pub fn minimize_over_radii<F: Fn(f64) -> f64>(grid: &[f64], f: F) -> Option<(f64, f64)> {
    grid.iter()
        .map(|&r| (r, f(r)))
        .filter(|p| p.1.is_finite())
        .min_by(|a, b| a.1.total_cmp(&b.1))
}

/// `κ_d((p/2)πR²)·(1 − ν^{2d})`.
pub fn porous_step_factor(nu: f64, r: f64, d: u32, p: f64) -> Result<f64> {
    if !(nu > 0.0 && nu < 1.0) || !(r > 0.0) {
        return Err(FupError::InvalidParameter("need 0 < nu < 1 and R > 0".into()));
    }
    Ok(kappa(d, 0.5 * p * PI * r * r)? * (1.0 - nu.powi(2 * d as i32)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThickeningSchedule {
    pub nu: f64,
    pub h: f64,
    pub d: u32,
    pub p: f64,
    pub c: f64,
    pub radii: Vec<f64>,
    pub porosities: Vec<f64>,
    pub n: usize,
    pub n0: usize,
    pub r_root: f64,
    pub r0: f64,
    pub epsilon: f64,
    pub step_factors: Vec<f64>,
    pub product_bound: f64,
    pub beta: f64,
    pub big_c: f64,
    pub asymptotic: f64,
    pub below_threshold: bool,
    /// `productBound ≤ C·h^β` held (always true when not below threshold).
    pub asymptotic_dominates: bool,
}

fn root_radius(nu: f64, d: u32, p: f64) -> Result<f64> {
    let keep = 1.0 - (0.5 * nu).powi(2 * d as i32);
    let f = |r: f64| -> Result<f64> { Ok(kappa(d, 0.5 * p * PI * r * r)? * keep - 1.0) };
    let mut hi = 1.0;
    while f(hi)? <= 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    while hi - lo > 1e-14 * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mid > 0.0 && f(mid)? <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Radius schedule `R_j = c (3/ν)^j`, `c = hν/3`, and its certified product bound.
pub fn build_schedule(nu: f64, h: f64, d: u32, p: f64, r0_fraction: f64) -> Result<ThickeningSchedule> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(FupError::InvalidParameter(format!("nu must lie in (0,1), got {nu}")));
    }
    if !(h > 0.0 && h <= 1.0) {
        return Err(FupError::InvalidParameter(format!("h must lie in (0,1], got {h}")));
    }
    if !(r0_fraction > 0.0 && r0_fraction < 1.0) || !(p >= 1.0) || d == 0 {
        return Err(FupError::InvalidParameter("need 0 < r0Fraction < 1, p >= 1, d >= 1".into()));
    }
    let q = 3.0 / nu;
    let c = h * nu / 3.0;
    let mut radii = Vec::new();
    let mut rj = c * q;
    while rj <= 1.0 * (1.0 + 1e-12) {
        radii.push(rj);
        rj *= q;
    }
    let n = radii.len();
    let mut porosities = vec![nu];
    let mut acc = 0.0;
    for j in 0..n.saturating_sub(1) {
        acc += radii[j];
        porosities.push(nu - acc / radii[j + 1]);
    }
    let step_factors: Vec<f64> = (0..n)
        .map(|j| porous_step_factor(porosities[j], radii[j], d, p))
        .collect::<Result<_>>()?;
    let r_root = root_radius(nu, d, p)?;
    let r0 = r0_fraction * r_root;
    let mut n0 = 0usize;
    if n > 0 {
        let rn = radii[n - 1];
        while rn * (nu / 3.0).powi(n0 as i32) > r0 {
            n0 += 1;
        }
    }
    let keep = 1.0 - (0.5 * nu).powi(2 * d as i32);
    let epsilon = 1.0 - kappa(d, 0.5 * p * PI * r0 * r0)? * keep;
    let beta = -(1.0 - epsilon).ln() / q.ln();
    let big_c = (1.0 - epsilon).powi(-(n0 as i32 + 1));
    let asymptotic = big_c * h.powf(beta);
    let below_threshold = n <= n0;
    let product_bound = if below_threshold {
        1.0
    } else {
        step_factors[..n - n0].iter().product()
    };
    Ok(ThickeningSchedule {
        nu,
        h,
        d,
        p,
        c,
        radii,
        porosities,
        n,
        n0,
        r_root,
        r0,
        epsilon,
        step_factors,
        product_bound,
        beta,
        big_c,
        asymptotic,
        below_threshold,
        asymptotic_dominates: product_bound <= asymptotic * (1.0 + 1e-12),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImprovementReport {
    pub pass: bool,
    pub checked: usize,
    pub first_violation: Option<(f64, f64, f64)>,
}

/// `0.5/(1 − e^{−πR²/2}) ≤ 1/(1 − e^{−πR²})` on every grid radius.
pub fn check_improvement(grid: &[f64]) -> ImprovementReport {
    let mut rep = ImprovementReport { pass: true, checked: 0, first_violation: None };
    for &r in grid {
        let lhs = optimized_density_bound(1.0, r, 1);
        let rhs = hermite_window_bound(1.0, r);
        rep.checked += 1;
        if !(lhs <= rhs) && rep.first_violation.is_none() {
            rep.pass = false;
            rep.first_violation = Some((r, lhs, rhs));
        }
    }
    rep
}

/// Cantor family over n for the bound tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FupFamily {
    /// Radial iterate in `ℝ^{2d}` with `R^{2d}(n) = rule(n)`.
    Radial { d: u32, m: u32, alphabet: Vec<u32>, rule: ScaleRule, n_cut: f64 },
    /// `dim`-fold product of `𝒞ₙ(L(n), M, A)` with `L(n) = rule(n)`.
    Product { dim: usize, m: u32, alphabet: Vec<u32>, rule: ScaleRule },
}

impl FupFamily {
    pub fn half_dim(&self) -> u32 {
        match self {
            FupFamily::Radial { d, .. } => *d,
            FupFamily::Product { dim, .. } => (*dim / 2) as u32,
        }
    }

    fn ratio(&self) -> f64 {
        match self {
            FupFamily::Radial { m, alphabet, .. } | FupFamily::Product { m, alphabet, .. } => {
                alphabet.len() as f64 / *m as f64
            }
        }
    }

    /// `(|A|/M)^{n/2}` for radial families, `(|A|/M)^{n·dim/2}` for products.
    pub fn asymptote_base(&self, n: u32) -> f64 {
        match self {
            FupFamily::Radial { .. } => self.ratio().powf(n as f64 / 2.0),
            FupFamily::Product { dim, .. } => self.ratio().powf(n as f64 * *dim as f64 / 2.0),
        }
    }

    /// Phase-space scale `h(n)` of the iterate's elementary cells.
    pub fn scale(&self, n: u32) -> f64 {
        match self {
            FupFamily::Radial { m, rule, .. } | FupFamily::Product { m, rule, .. } => {
                rule.value(n) / (*m as f64).powi(n as i32)
            }
        }
    }

    pub fn radial_spec(&self, n: u32) -> Result<RadialCantorSpec> {
        match self {
            FupFamily::Radial { d, m, alphabet, rule, .. } => {
                RadialCantorSpec::new(*d, rule.value(n).powf(1.0 / (2.0 * *d as f64)), *m, alphabet.clone(), n)
            }
            _ => Err(FupError::InvalidParameter("not a radial family".into())),
        }
    }

    pub fn factor_spec(&self, n: u32) -> Result<CantorSpec> {
        match self {
            FupFamily::Product { m, alphabet, rule, .. } => CantorSpec::new(*m, alphabet.clone(), n, rule.value(n)),
            _ => Err(FupError::InvalidParameter("not a product family".into())),
        }
    }

    /// Upper bound on `ρ(Ω_n, R)` via the radial two-case bound or the cube-product bound,
    /// capped by the ball volume.
    pub fn rho_bound(&self, n: u32, r: f64) -> Result<f64> {
        match self {
            FupFamily::Radial { n_cut, .. } => Ok(rho_radial_bound(&self.radial_spec(n)?, r, *n_cut, None)?.value),
            FupFamily::Product { dim, .. } => {
                let f = build_iterate(&self.factor_spec(n)?)?;
                let rho = rho_product_bound(&vec![f; *dim], r)?.value;
                Ok(rho.min(ball_volume(self.half_dim(), r)))
            }
        }
    }

    pub fn check_growth(&self, cond: &GrowthCondition, ns: &[u32]) -> Result<()> {
        let (rule, want) = match self {
            FupFamily::Radial { rule, .. } => (rule, GrowthKind::Radius),
            FupFamily::Product { rule, .. } => (rule, GrowthKind::Increasing),
        };
        if cond.kind != want {
            return Err(FupError::InvalidParameter(format!("family needs a {want:?} growth condition")));
        }
        let g = check_growth(cond, &rule.samples(ns.iter().copied()));
        match g.first_violation {
            Some(v) => Err(FupError::Growth {
                n: v.n,
                detail: format!("value {} outside [{}, {}]", v.value, v.lower, v.upper),
            }),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub n: u32,
    pub h: f64,
    pub radius: f64,
    pub rho: f64,
    pub prefactor: f64,
    pub bound: f64,
    pub asymptote: f64,
    pub measured_norm: Option<f64>,
    pub pass: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundTable {
    pub rows: Vec<BoundRow>,
    /// `min_R max_n bound_R(n) / base(n)`.
    pub gamma: f64,
    pub gamma_radius: f64,
}

impl BoundTable {
    /// Attaches measured norms and the row verdict `norm ≤ bound`.
    pub fn attach_norms(&mut self, norms: &[f64]) {
        for (row, &v) in self.rows.iter_mut().zip(norms) {
            row.measured_norm = Some(v);
            row.pass = Some(v <= row.bound);
        }
    }
}

/// Per-n bound `min_R 2^{−d} ρ(Ω_n, R) / P(d, πR²/2)` with the fitted asymptote.
pub fn cantor_fup_table(family: &FupFamily, cond: &GrowthCondition, radii: &[f64], ns: &[u32]) -> Result<BoundTable> {
    if radii.is_empty() || ns.is_empty() {
        return Err(FupError::InvalidParameter("need at least one radius and one n".into()));
    }
    family.check_growth(cond, ns)?;
    let d = family.half_dim();
    let mut grid = vec![vec![0.0; radii.len()]; ns.len()];
    for (i, &n) in ns.iter().enumerate() {
        for (j, &r) in radii.iter().enumerate() {
            grid[i][j] = family.rho_bound(n, r)?;
        }
    }
    let pref: Vec<f64> = radii.iter().map(|&r| optimized_density_bound(1.0, r, d)).collect();
    let (mut gamma, mut gamma_radius) = (f64::INFINITY, radii[0]);
    for (j, &r) in radii.iter().enumerate() {
        let g = ns
            .iter()
            .enumerate()
            .map(|(i, &n)| pref[j] * grid[i][j] / family.asymptote_base(n))
            .fold(0.0, f64::max);
        if g < gamma {
            gamma = g;
            gamma_radius = r;
        }
    }
    let rows = ns
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let j = (0..radii.len())
                .min_by(|&a, &b| (pref[a] * grid[i][a]).total_cmp(&(pref[b] * grid[i][b])))
                .unwrap();
            BoundRow {
                n,
                h: family.scale(n),
                radius: radii[j],
                rho: grid[i][j],
                prefactor: pref[j],
                bound: pref[j] * grid[i][j],
                asymptote: gamma * family.asymptote_base(n),
                measured_norm: None,
                pass: None,
            }
        })
        .collect();
    Ok(BoundTable { rows, gamma, gamma_radius })
}
