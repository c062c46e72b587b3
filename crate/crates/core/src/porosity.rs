//! Porosity: exact per-scale verification in one dimension, the Cantor certificate,
//! thickening arithmetic, and randomized checks for two-dimensional products.
//!
//! At a fixed scale `r`, a complement gap `(lo, hi)` of length at least `2νr` hosts an
//! admissible ball for every window center in `[lo − (1−2ν)r, hi + (1−2ν)r]`; the set is
//! porous at `r` iff these intervals (plus the two unbounded end gaps) cover the line.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cantor::{build_iterate, CantorSpec, ProductCantor};
use crate::error::{FupError, Result};
use crate::interval::IntervalUnion;

const GRID_RATIO: f64 = 1.05;
const FULL_PAIR_LIMIT: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PorosityStatus {
    Verified,
    Refuted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PorosityMethod {
    ExactSweep,
    Certificate,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub center: Vec<f64>,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PorosityWitness {
    pub nu: f64,
    pub alpha_min: f64,
    #[serde(with = "extended_f64")]
    pub alpha_max: f64,
    pub status: PorosityStatus,
    pub counterexample: Option<Counterexample>,
    pub scales_checked: Vec<f64>,
    pub method: PorosityMethod,
    /// Whether every critical radius of the sweep was enumerated.
    pub exhaustive: bool,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
}

impl PorosityWitness {
    pub fn is_verified(&self) -> bool {
        self.status == PorosityStatus::Verified
    }
}

mod extended_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum R {
            N(f64),
            S(String),
        }
        match R::deserialize(d)? {
            R::N(v) => Ok(v),
            R::S(s) if s == "inf" => Ok(f64::INFINITY),
            R::S(s) => Err(serde::de::Error::custom(format!("bad number {s}"))),
        }
    }
}

fn check_nu(nu: f64) -> Result<()> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(FupError::InvalidParameter(format!("porosity constant must lie in (0,1), got {nu}")));
    }
    Ok(())
}

/// Complement gaps including the two unbounded ends (as ±∞).
fn all_gaps(set: &IntervalUnion) -> Vec<(f64, f64)> {
    let iv = set.intervals();
    let mut g = Vec::with_capacity(iv.len() + 1);
    g.push((f64::NEG_INFINITY, iv[0].0));
    g.extend(set.gaps());
    g.push((iv[iv.len() - 1].1, f64::INFINITY));
    g
}

/// Returns a window center refuting porosity at scale `r`, if any.
fn hole_at_scale(gaps: &[(f64, f64)], nu: f64, r: f64, coord_scale: f64) -> Option<f64> {
    let c = 1.0 - 2.0 * nu;
    let need = 2.0 * nu * r;
    let tol = 1e-12 * (r + coord_scale);
    let mut reach = f64::NEG_INFINITY;
    for &(lo, hi) in gaps {
        if hi - lo < need - tol {
            continue;
        }
        let start = lo - c * r;
        if start > reach + tol {
            let x = if reach.is_finite() { 0.5 * (reach + start) } else { start - r };
            return Some(x);
        }
        reach = reach.max(hi + c * r);
    }
    None
}

fn geometric_grid(lo: f64, hi: f64, ratio: f64) -> Vec<f64> {
    if hi <= lo {
        return vec![lo];
    }
    let k = ((hi / lo).ln() / ratio.ln()).ceil().max(1.0) as usize;
    let q = (hi / lo).powf(1.0 / k as f64);
    (0..=k).map(|i| if i == k { hi } else { lo * q.powi(i as i32) }).collect()
}

fn critical_radii(gaps: &[(f64, f64)], nu: f64, amax: f64, full: bool) -> Vec<f64> {
    let c = 1.0 - 2.0 * nu;
    let mut out = Vec::new();
    for &(lo, hi) in gaps {
        if lo.is_finite() && hi.is_finite() {
            out.push((hi - lo) / (2.0 * nu));
        }
    }
    if c > 0.0 {
        let always = 2.0 * nu * amax;
        for k in 0..gaps.len() {
            let mut max_between: f64 = 0.0;
            for k2 in k + 1..gaps.len() {
                out.push((gaps[k2].0 - gaps[k].1) / (2.0 * c));
                if !full {
                    break;
                }
                let len = gaps[k2].1 - gaps[k2].0;
                max_between = max_between.max(len);
                if max_between >= always {
                    break;
                }
            }
        }
    }
    out
}

/// Exact scale-by-scale porosity check of a finite interval union.
pub fn verify_porosity_1d(set: &IntervalUnion, nu: f64, alpha_min: f64, alpha_max: f64) -> Result<PorosityWitness> {
    check_nu(nu)?;
    if !(alpha_min > 0.0) || alpha_min > alpha_max || !alpha_max.is_finite() {
        return Err(FupError::InvalidParameter(format!(
            "need 0 < alpha_min <= alpha_max < inf, got [{alpha_min}, {alpha_max}]"
        )));
    }
    let mut w = PorosityWitness {
        nu,
        alpha_min,
        alpha_max,
        status: PorosityStatus::Verified,
        counterexample: None,
        scales_checked: Vec::new(),
        method: PorosityMethod::ExactSweep,
        exhaustive: true,
        trials: None,
        seed: None,
    };
    if set.is_empty() {
        return Ok(w);
    }
    let gaps = all_gaps(set);
    let full = gaps.len() <= FULL_PAIR_LIMIT;
    w.exhaustive = full;
    let (s0, s1) = set.span().unwrap();
    let coord_scale = s0.abs().max(s1.abs());

    let mut crit: Vec<f64> = critical_radii(&gaps, nu, alpha_max, full)
        .into_iter()
        .filter(|&r| r >= alpha_min && r <= alpha_max)
        .collect();
    crit.push(alpha_min);
    crit.push(alpha_max);
    crit.sort_by(f64::total_cmp);
    crit.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs());
    let mut scales = geometric_grid(alpha_min, alpha_max, GRID_RATIO);
    for win in crit.windows(2) {
        scales.push(0.5 * (win[0] + win[1]));
    }
    scales.extend_from_slice(&crit);
    scales.sort_by(f64::total_cmp);
    scales.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs());

    let refuted = scales
        .par_iter()
        .enumerate()
        .filter_map(|(i, &r)| hole_at_scale(&gaps, nu, r, coord_scale).map(|x| (i, x, r)))
        .min_by_key(|t| t.0);
    if let Some((i, x, r)) = refuted {
        w.status = PorosityStatus::Refuted;
        w.counterexample = Some(Counterexample { center: vec![x], radius: r });
        scales.truncate(i + 1);
    }
    w.scales_checked = scales;
    Ok(w)
}

/// Certificate `(M⁻², L·M^{−n+1}, ∞)` for a Cantor iterate, cross-checked by the exact
/// sweep on `[L·M^{−n+1}, L·M]` (larger windows contain the whole iterate and a
/// complementary half-line ball).
pub fn certify_cantor_porosity(spec: &CantorSpec) -> Result<PorosityWitness> {
    spec.validate()?;
    let m = spec.m as f64;
    let nu = 1.0 / (m * m);
    let alpha_min = spec.l() * m.powi(1 - spec.n as i32);
    let set = build_iterate(spec)?;
    let check = verify_porosity_1d(&set, nu, alpha_min, spec.l() * m)?;
    Ok(PorosityWitness {
        nu,
        alpha_min,
        alpha_max: f64::INFINITY,
        status: check.status,
        counterexample: check.counterexample,
        scales_checked: check.scales_checked,
        method: PorosityMethod::Certificate,
        exhaustive: check.exhaustive,
        trials: None,
        seed: None,
    })
}

/// `Ω + [−r, r]` with overlaps merged.
pub fn thicken_1d(set: &IntervalUnion, r: f64) -> Result<IntervalUnion> {
    if !(r >= 0.0) {
        return Err(FupError::InvalidParameter(format!("thickening radius must be >= 0, got {r}")));
    }
    Ok(IntervalUnion::from_intervals(set.intervals().iter().map(|&(a, b)| (a - r, b + r)).collect()))
}

/// Porosity of an `r`-thickened set: `ν′ = ν − r/R` on scales `[R, α_max]`.
pub fn thickened_porosity(nu: f64, r: f64, big_r: f64, alpha_max: f64) -> Result<(f64, (f64, f64))> {
    check_nu(nu)?;
    if !(r >= 0.0 && r < nu * alpha_max) {
        return Err(FupError::InvalidParameter(format!("need 0 <= r < nu*alpha_max, got r = {r}")));
    }
    if !(r / nu < big_r) || big_r > alpha_max {
        return Err(FupError::InvalidParameter(format!(
            "need r/nu < R <= alpha_max, got r/nu = {}, R = {big_r}",
            r / nu
        )));
    }
    Ok((nu - r / big_r, (big_r, alpha_max)))
}

struct Box2 {
    lo: [f64; 2],
    hi: [f64; 2],
}

impl Box2 {
    fn dist2(&self, p: [f64; 2]) -> f64 {
        let mut s = 0.0;
        for k in 0..2 {
            let d = (self.lo[k] - p[k]).max(p[k] - self.hi[k]).max(0.0);
            s += d * d;
        }
        s
    }
}

enum Curve {
    Circle([f64; 2], f64),
    HSeg(f64, f64, f64),
    VSeg(f64, f64, f64),
}

fn circle_circle(c1: [f64; 2], r1: f64, c2: [f64; 2], r2: f64, out: &mut Vec<[f64; 2]>) {
    let dx = c2[0] - c1[0];
    let dy = c2[1] - c1[1];
    let d = (dx * dx + dy * dy).sqrt();
    if d == 0.0 || d > r1 + r2 || d < (r1 - r2).abs() {
        return;
    }
    let a = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
    let h = (r1 * r1 - a * a).max(0.0).sqrt();
    let mx = c1[0] + a * dx / d;
    let my = c1[1] + a * dy / d;
    out.push([mx + h * dy / d, my - h * dx / d]);
    out.push([mx - h * dy / d, my + h * dx / d]);
}

fn circle_line(c: [f64; 2], r: f64, axis: usize, level: f64, lo: f64, hi: f64, out: &mut Vec<[f64; 2]>) {
    let off = level - c[axis];
    if off.abs() > r {
        return;
    }
    let h = (r * r - off * off).sqrt();
    let other = 1 - axis;
    for s in [c[other] - h, c[other] + h] {
        if s >= lo && s <= hi {
            let mut p = [0.0; 2];
            p[axis] = level;
            p[other] = s;
            out.push(p);
        }
    }
}

/// Exact 2-D search for a center `y` with `|y − x| ≤ (1−ν)r` and `dist(y, Ω) ≥ νr`.
fn free_ball_2d(factors: &[IntervalUnion], x: [f64; 2], r: f64, nu: f64) -> bool {
    let big = (1.0 - nu) * r;
    let small = nu * r;
    let near: Vec<Vec<(f64, f64)>> = (0..2)
        .map(|k| {
            factors[k]
                .intervals()
                .iter()
                .copied()
                .filter(|&(a, b)| b > x[k] - r && a < x[k] + r)
                .collect()
        })
        .collect();
    let boxes: Vec<Box2> = near[0]
        .iter()
        .flat_map(|&(a, b)| near[1].iter().map(move |&(c, d)| Box2 { lo: [a, c], hi: [b, d] }))
        .filter(|bx| bx.dist2(x) < r * r)
        .collect();
    if boxes.is_empty() {
        return true;
    }
    let tol = 1e-10 * r;
    let ok = |p: [f64; 2]| {
        let dx = p[0] - x[0];
        let dy = p[1] - x[1];
        (dx * dx + dy * dy).sqrt() <= big + tol
            && boxes.iter().all(|bx| bx.dist2(p).sqrt() >= small - tol)
    };
    let mut curves = vec![Curve::Circle(x, big)];
    for bx in &boxes {
        let (a, c, b, d) = (bx.lo[0], bx.lo[1], bx.hi[0], bx.hi[1]);
        curves.push(Curve::HSeg(c - small, a, b));
        curves.push(Curve::HSeg(d + small, a, b));
        curves.push(Curve::VSeg(a - small, c, d));
        curves.push(Curve::VSeg(b + small, c, d));
        for corner in [[a, c], [a, d], [b, c], [b, d]] {
            curves.push(Curve::Circle(corner, small));
        }
    }
    let mut pts = Vec::new();
    for cv in &curves {
        match *cv {
            Curve::Circle(c, rad) => {
                pts.push([c[0], c[1] - rad]);
                pts.push([c[0], c[1] + rad]);
                pts.push([c[0] - rad, c[1]]);
                pts.push([c[0] + rad, c[1]]);
            }
            Curve::HSeg(y, a, b) => {
                pts.push([a, y]);
                pts.push([b, y]);
            }
            Curve::VSeg(xx, c, d) => {
                pts.push([xx, c]);
                pts.push([xx, d]);
            }
        }
    }
    if pts.iter().any(|&p| ok(p)) {
        return true;
    }
    for i in 0..curves.len() {
        for j in i + 1..curves.len() {
            pts.clear();
            match (&curves[i], &curves[j]) {
                (Curve::Circle(c1, r1), Curve::Circle(c2, r2)) => circle_circle(*c1, *r1, *c2, *r2, &mut pts),
                (Curve::Circle(c, rad), Curve::HSeg(y, a, b)) | (Curve::HSeg(y, a, b), Curve::Circle(c, rad)) => {
                    circle_line(*c, *rad, 1, *y, *a, *b, &mut pts)
                }
                (Curve::Circle(c, rad), Curve::VSeg(xx, a, b)) | (Curve::VSeg(xx, a, b), Curve::Circle(c, rad)) => {
                    circle_line(*c, *rad, 0, *xx, *a, *b, &mut pts)
                }
                (Curve::HSeg(y, a, b), Curve::VSeg(xx, c, d)) | (Curve::VSeg(xx, c, d), Curve::HSeg(y, a, b)) => {
                    if *xx >= *a && *xx <= *b && *y >= *c && *y <= *d {
                        pts.push([*xx, *y]);
                    }
                }
                _ => {}
            }
            if pts.iter().any(|&p| ok(p)) {
                return true;
            }
        }
    }
    false
}

fn slab_free(coverage_gaps: &[Vec<(f64, f64)>], x: [f64; 2], r: f64, nu: f64) -> bool {
    let c = 1.0 - 2.0 * nu;
    let need = 2.0 * nu * r;
    (0..2).any(|k| {
        coverage_gaps[k]
            .iter()
            .any(|&(lo, hi)| hi - lo >= need && x[k] >= lo - c * r && x[k] <= hi + c * r)
    })
}

/// Randomized porosity check of a two-factor product: refutations are exact, verification
/// is statistical over `trials` seeded windows.
pub fn sample_porosity_product(
    set: &ProductCantor,
    nu: f64,
    alpha_min: f64,
    alpha_max: f64,
    trials: usize,
    seed: u64,
) -> Result<PorosityWitness> {
    let factors = set.build_factors()?;
    sample_porosity_boxes(&factors, nu, alpha_min, alpha_max, trials, seed)
}

/// As [`sample_porosity_product`] but on already-realized factor unions.
pub fn sample_porosity_boxes(
    factors: &[IntervalUnion],
    nu: f64,
    alpha_min: f64,
    alpha_max: f64,
    trials: usize,
    seed: u64,
) -> Result<PorosityWitness> {
    check_nu(nu)?;
    if factors.len() != 2 {
        return Err(FupError::Unsupported(format!(
            "product porosity sampling is implemented for 2 factors, got {}",
            factors.len()
        )));
    }
    if trials == 0 || !(alpha_min > 0.0) || alpha_min > alpha_max || !alpha_max.is_finite() {
        return Err(FupError::InvalidParameter("need trials >= 1 and 0 < alpha_min <= alpha_max < inf".into()));
    }
    let mut w = PorosityWitness {
        nu,
        alpha_min,
        alpha_max,
        status: PorosityStatus::Verified,
        counterexample: None,
        scales_checked: Vec::new(),
        method: PorosityMethod::MonteCarlo,
        exhaustive: false,
        trials: Some(trials),
        seed: Some(seed),
    };
    if factors.iter().any(IntervalUnion::is_empty) {
        return Ok(w);
    }
    let gaps: Vec<Vec<(f64, f64)>> = factors.iter().map(all_gaps).collect();
    let spans: Vec<(f64, f64)> = factors.iter().map(|f| f.span().unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (l0, l1) = (alpha_min.ln(), alpha_max.ln());
    let samples: Vec<([f64; 2], f64)> = (0..trials)
        .map(|_| {
            let r = if l1 > l0 { rng.gen_range(l0..=l1).exp() } else { alpha_min };
            let x = [
                rng.gen_range(spans[0].0 - r..=spans[0].1 + r),
                rng.gen_range(spans[1].0 - r..=spans[1].1 + r),
            ];
            (x, r)
        })
        .collect();
    let bad = samples
        .par_iter()
        .enumerate()
        .find_first(|(_, &(x, r))| !slab_free(&gaps, x, r, nu) && !free_ball_2d(factors, x, r, nu));
    if let Some((_, &(x, r))) = bad {
        w.status = PorosityStatus::Refuted;
        w.counterexample = Some(Counterexample { center: x.to_vec(), radius: r });
    }
    let mut rs: Vec<f64> = samples.iter().map(|s| s.1).collect();
    rs.sort_by(f64::total_cmp);
    w.scales_checked = rs;
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hole_detection_basic() {
        let gaps = all_gaps(&IntervalUnion::single(0.0, 1.0));
        let x = hole_at_scale(&gaps, 0.5, 0.1, 1.0).unwrap();
        assert!(x > 0.0 && x < 1.0);
    }

    #[test]
    fn free_ball_finds_corner_gap() {
        // unit square: no room inside, room past the corner
        let f = vec![IntervalUnion::single(0.0, 1.0), IntervalUnion::single(0.0, 1.0)];
        assert!(!free_ball_2d(&f, [0.5, 0.5], 0.4, 0.1));
        assert!(free_ball_2d(&f, [1.0, 1.0], 0.5, 0.3));
        // rounded corner: a ball of radius 0.2 fits diagonally off the corner but not inside
        // the inflated bounding box
        assert!(free_ball_2d(&f, [1.05, 1.05], 0.3, 0.2));
    }

    #[test]
    fn thickened_porosity_gates() {
        assert_eq!(thickened_porosity(0.1, 0.0, 0.5, 1.0).unwrap().0, 0.1);
        assert!(thickened_porosity(0.1, 0.06, 0.5, 1.0).is_err());
        assert!(thickened_porosity(1.5, 0.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn witness_json_has_infinite_scale_tag() {
        let w = certify_cantor_porosity(&CantorSpec::mid_third(2, 1.0)).unwrap();
        let s = serde_json::to_string(&w).unwrap();
        assert!(s.contains("\"alpha_max\":\"inf\""));
        let back: PorosityWitness = serde_json::from_str(&s).unwrap();
        assert!(back.alpha_max.is_infinite());
    }
}
