//! Rectangular phase-space lattices, lattice restrictions, Gaussian Gram matrices and
//! Gabor multiplier norms, and overlap counts.

use std::io::{Read, Write};

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{FupError, Result};
use crate::interval::IntervalUnion;
use crate::linalg::{lanczos_max, power_iteration_max, CsrHermitian, DenseHermitian, EigResult};
use crate::tf::hermite::PhasePoint;
use crate::tf::Spectrum;

use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lattice2d {
    pub d: usize,
    /// Time-axis spacings `a_1..a_d`.
    pub a: Vec<f64>,
    /// Frequency-axis spacings `b_1..b_d`.
    pub b: Vec<f64>,
}

impl Lattice2d {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.is_empty() || a.len() != b.len() || a.iter().chain(&b).any(|&s| !(s > 0.0 && s.is_finite())) {
            return Err(FupError::InvalidParameter("lattice needs d >= 1 positive spacings per axis family".into()));
        }
        Ok(Lattice2d { d: a.len(), a, b })
    }

    pub fn square(d: usize, s: f64) -> Result<Self> {
        Self::new(vec![s; d], vec![s; d])
    }

    /// Spacings in phase-space axis order `(x_1..x_d, ω_1..ω_d)`.
    pub fn spacings(&self) -> Vec<f64> {
        self.a.iter().chain(&self.b).copied().collect()
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacings().iter().product()
    }

    /// Radius of the smallest origin-centered ball containing the fundamental region.
    pub fn half_diagonal(&self) -> f64 {
        self.spacings().iter().map(|s| 0.25 * s * s).sum::<f64>().sqrt()
    }

    pub fn point(&self, idx: &[i64]) -> PhasePoint {
        let d = self.d;
        PhasePoint::new(
            (0..d).map(|k| idx[k] as f64 * self.a[k]).collect(),
            (0..d).map(|k| idx[d + k] as f64 * self.b[k]).collect(),
        )
    }
}

/// How the restricted set Ω is described.
pub enum RestrictionSource<'a> {
    /// One interval union per phase-space axis (product set).
    Product(&'a [IntervalUnion]),
    /// Membership predicate with a bounding box and per-axis samples per cell.
    Predicate { member: &'a dyn Fn(&[f64]) -> bool, bbox: &'a [(f64, f64)], samples_per_axis: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeRestriction {
    pub lattice: Lattice2d,
    pub indices: Vec<Vec<i64>>,
    pub points: Vec<PhasePoint>,
    /// False when membership came from sampling rather than interval arithmetic.
    pub exact: bool,
    pub source: String,
}

impl LatticeRestriction {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn axis_indices(set: &IntervalUnion, s: f64) -> Vec<i64> {
    let mut out = Vec::new();
    let tol = 1e-12 * s;
    for &(a, b) in set.intervals() {
        let lo = ((a / s) - 0.5).floor() as i64;
        let hi = ((b / s) + 0.5).ceil() as i64;
        for k in lo..=hi {
            let c = k as f64 * s;
            if set.measure_in(c - 0.5 * s, c + 0.5 * s) > tol && out.last() != Some(&k) {
                out.push(k);
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

fn cartesian(axes: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut acc: Vec<Vec<i64>> = vec![vec![]];
    for ax in axes {
        let mut next = Vec::with_capacity(acc.len() * ax.len());
        for prefix in &acc {
            for &k in ax {
                let mut v = prefix.clone();
                v.push(k);
                next.push(v);
            }
        }
        acc = next;
    }
    acc
}

/// `Λ_Ω = {λ : |Ω ∩ (λ + A_Λ)| > 0}`.
pub fn lattice_restriction(lattice: &Lattice2d, source: RestrictionSource<'_>) -> Result<LatticeRestriction> {
    let sp = lattice.spacings();
    let dim = sp.len();
    let (indices, exact, desc) = match source {
        RestrictionSource::Product(factors) => {
            if factors.len() != dim {
                return Err(FupError::InvalidParameter(format!("need {dim} factors, got {}", factors.len())));
            }
            let axes: Vec<Vec<i64>> = factors.iter().zip(&sp).map(|(f, &s)| axis_indices(f, s)).collect();
            (cartesian(&axes), true, "product".to_string())
        }
        RestrictionSource::Predicate { member, bbox, samples_per_axis } => {
            if bbox.len() != dim || bbox.iter().any(|&(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo <= hi)) {
                return Err(FupError::InvalidParameter("predicate sets need a finite bounding box".into()));
            }
            let m = samples_per_axis.max(1);
            let axes: Vec<Vec<i64>> = bbox
                .iter()
                .zip(&sp)
                .map(|(&(lo, hi), &s)| ((lo / s - 0.5).floor() as i64..=(hi / s + 0.5).ceil() as i64).collect())
                .collect();
            let offsets: Vec<Vec<i64>> = cartesian(&vec![(0..m as i64).collect::<Vec<_>>(); dim]);
            let idx = cartesian(&axes)
                .into_iter()
                .filter(|k| {
                    offsets.iter().any(|o| {
                        let p: Vec<f64> = (0..dim)
                            .map(|j| (k[j] as f64 - 0.5 + (o[j] as f64 + 0.5) / m as f64) * sp[j])
                            .collect();
                        member(&p)
                    })
                })
                .collect();
            (idx, false, "predicate".to_string())
        }
    };
    let points = indices.iter().map(|k| lattice.point(k)).collect();
    Ok(LatticeRestriction { lattice: lattice.clone(), indices, points, exact, source: desc })
}

/// `⟨π(λ)φ₀, π(μ)φ₀⟩ = e^{πi(ω_λ−ω_μ)·(x_λ+x_μ)} e^{−π|λ−μ|²/2}` with `π(x, ω) = M_ω T_x`.
pub fn gauss_tf_inner(lam: &PhasePoint, mu: &PhasePoint) -> C64 {
    let mut phase = 0.0;
    let mut dist2 = 0.0;
    for k in 0..lam.dim() {
        let dw = lam.omega[k] - mu.omega[k];
        let dx = lam.x[k] - mu.x[k];
        phase += PI * dw * (lam.x[k] + mu.x[k]);
        dist2 += dx * dx + dw * dw;
    }
    C64::from_polar((-0.5 * PI * dist2).exp(), phase)
}

/// Default Gram dimension cap.
pub const DEFAULT_MATRIX_CAP: usize = 4096;
const KEEP_THRESHOLD: f64 = 1e-18;
const SPARSE_THRESHOLD: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenMethod {
    Lanczos,
    Power,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaborNorm {
    pub norm: f64,
    pub lambda_max: f64,
    pub cell_volume: f64,
    pub points: usize,
    pub eig: EigResult,
    pub dropped_bound: f64,
    pub sparsified: bool,
}

impl GaborNorm {
    pub fn spectrum(&self) -> Spectrum {
        Spectrum {
            eigenvalues: vec![self.norm],
            cutoff: 1,
            tail_bound: self.cell_volume * (self.dropped_bound + self.eig.residual),
            argmax: Some(0),
        }
    }
}

/// Gram matrix `G_{λμ} = ⟨π(μ)φ₀, π(λ)φ₀⟩` in CSR form.
pub fn gram_matrix(points: &[PhasePoint], threshold: f64) -> CsrHermitian {
    CsrHermitian::from_fn(points.len(), threshold, |i, j| gauss_tf_inner(&points[j], &points[i]))
}

pub fn gram_dense(points: &[PhasePoint]) -> DenseHermitian {
    DenseHermitian::from_fn(points.len(), |i, j| gauss_tf_inner(&points[j], &points[i]))
}

/// `‖G_{Λ,Ω}‖ = |A_Λ| λ_max(Gram)`.
pub fn gabor_multiplier_norm(
    restriction: &LatticeRestriction,
    cap: usize,
    allow_sparsified: bool,
    method: EigenMethod,
) -> Result<GaborNorm> {
    let n = restriction.len();
    let cell = restriction.lattice.cell_volume();
    if n > cap && !allow_sparsified {
        return Err(FupError::MatrixCap { size: n, cap });
    }
    let sparsified = n > cap;
    let thr = if sparsified { SPARSE_THRESHOLD } else { KEEP_THRESHOLD };
    let g = gram_matrix(&restriction.points, thr);
    let eig = match method {
        EigenMethod::Lanczos => lanczos_max(&g, 1e-12, 600, 0x5EED),
        EigenMethod::Power => power_iteration_max(&g, 1e-12, 200_000, 0x5EED),
    };
    Ok(GaborNorm {
        norm: cell * eig.value,
        lambda_max: eig.value,
        cell_volume: cell,
        points: n,
        eig,
        dropped_bound: g.dropped_bound,
        sparsified,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapCount {
    pub count: usize,
    /// True for the exact supremum; false for the per-axis product upper bound.
    pub exact: bool,
    pub witness: Option<Vec<f64>>,
}

/// `#{(i, j) : dist(z, cell_{ij}) < R}` with cells `[(i−½)a, (i+½)a] × [(j−½)b, (j+½)b]`.
fn count_at(z: [f64; 2], sp: [f64; 2], r: f64) -> usize {
    let [a, b] = sp;
    let i_lo = ((z[0] - r) / a - 0.5).floor() as i64;
    let i_hi = ((z[0] + r) / a + 0.5).ceil() as i64;
    let mut total = 0i64;
    for i in i_lo..=i_hi {
        let lo = (i as f64 - 0.5) * a;
        let hi = (i as f64 + 0.5) * a;
        let dx = (lo - z[0]).max(z[0] - hi).max(0.0);
        if dx >= r {
            continue;
        }
        let h = (r * r - dx * dx).sqrt();
        // integers j with (j+½)b > z₁ − h and (j−½)b < z₁ + h
        let j_min = ((z[1] - h) / b - 0.5).floor() as i64 + 1;
        let j_max = ((z[1] + h) / b + 0.5).ceil() as i64 - 1;
        total += (j_max - j_min + 1).max(0);
    }
    total as usize
}

fn circle_pair(c1: [f64; 2], c2: [f64; 2], r: f64, out: &mut Vec<[f64; 2]>) {
    let dx = c2[0] - c1[0];
    let dy = c2[1] - c1[1];
    let d = (dx * dx + dy * dy).sqrt();
    if d > 0.0 && d <= 2.0 * r {
        let h = (r * r - 0.25 * d * d).max(0.0).sqrt();
        let mx = c1[0] + 0.5 * dx;
        let my = c1[1] + 0.5 * dy;
        out.push([mx + h * dy / d, my - h * dx / d]);
        out.push([mx - h * dy / d, my + h * dx / d]);
    }
}

/// `γ(R, Λ) = sup_z #{λ : |B_R(z) ∩ (λ + A_Λ)| > 0}`. Exact for d = 1: the count is constant on
/// the faces of the arrangement of offset lines and corner circles, so it is maximized at small
/// perturbations of the arrangement's vertices. For d ≥ 2 a per-axis product upper bound.
pub fn overlap_count(lattice: &Lattice2d, r: f64) -> Result<OverlapCount> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(FupError::InvalidParameter(format!("R must be positive, got {r}")));
    }
    let sp = lattice.spacings();
    if lattice.d >= 2 {
        let count = sp.iter().map(|&s| (2.0 * r / s).ceil() as usize + 1).product();
        return Ok(OverlapCount { count, exact: false, witness: None });
    }
    let s = [sp[0], sp[1]];
    // the count is symmetric under ω ↦ −ω and x ↦ −x, so a quarter region suffices
    let q_hi = [0.5 * s[0], 0.5 * s[1]];
    let in_q = |p: [f64; 2]| {
        let e = 1e-12 * (s[0] + s[1]);
        p[0] >= -e && p[0] <= q_hi[0] + e && p[1] >= -e && p[1] <= q_hi[1] + e
    };
    let lines = |axis: usize| -> Vec<f64> {
        let k = (r / s[axis]).ceil() as i64 + 2;
        let mut v = vec![0.0, q_hi[axis]];
        for i in -k..=k + 1 {
            let e = (i as f64 - 0.5) * s[axis];
            for c in [e - r, e + r] {
                if c >= 0.0 && c <= q_hi[axis] {
                    v.push(c);
                }
            }
        }
        v
    };
    let vl = lines(0);
    let hl = lines(1);
    let k = [(r / s[0]).ceil() as i64 + 2, (r / s[1]).ceil() as i64 + 2];
    let mut circles = Vec::new();
    for i in -k[0]..=k[0] + 1 {
        let cx = (i as f64 - 0.5) * s[0];
        let nx = (0.0 - cx).max(cx - q_hi[0]).max(0.0);
        let fx = (cx - 0.0).abs().max((cx - q_hi[0]).abs());
        for j in -k[1]..=k[1] + 1 {
            let cy = (j as f64 - 0.5) * s[1];
            let ny = (0.0 - cy).max(cy - q_hi[1]).max(0.0);
            let fy = (cy - 0.0).abs().max((cy - q_hi[1]).abs());
            if nx * nx + ny * ny <= r * r && fx * fx + fy * fy >= r * r {
                circles.push([cx, cy]);
            }
        }
    }
    let mut cand: Vec<[f64; 2]> = Vec::new();
    for &x in &vl {
        for &y in &hl {
            cand.push([x, y]);
        }
    }
    for c in &circles {
        cand.extend([[c[0] + r, c[1]], [c[0] - r, c[1]], [c[0], c[1] + r], [c[0], c[1] - r]]);
        for &x in &vl {
            let dx = x - c[0];
            if dx.abs() <= r {
                let h = (r * r - dx * dx).sqrt();
                cand.extend([[x, c[1] + h], [x, c[1] - h]]);
            }
        }
        for &y in &hl {
            let dy = y - c[1];
            if dy.abs() <= r {
                let h = (r * r - dy * dy).sqrt();
                cand.extend([[c[0] + h, y], [c[0] - h, y]]);
            }
        }
    }
    for (i, &c1) in circles.iter().enumerate() {
        for &c2 in &circles[i + 1..] {
            circle_pair(c1, c2, r, &mut cand);
        }
    }
    cand.retain(|&p| in_q(p));
    let delta = 1e-7 * s[0].min(s[1]).min(r);
    let mut dirs: Vec<[f64; 2]> = (0..16)
        .map(|q| {
            let th = (q as f64 + 0.5) * PI / 8.0;
            [th.cos(), th.sin()]
        })
        .collect();
    dirs.push([0.0, 0.0]);
    let best = cand
        .par_iter()
        .map(|p| {
            let mut best = (0usize, [0.0, 0.0]);
            for u in &dirs {
                let z = [p[0] + delta * u[0], p[1] + delta * u[1]];
                let c = count_at(z, s, r);
                if c > best.0 {
                    best = (c, z);
                }
            }
            best
        })
        .reduce(|| (0usize, [0.0, 0.0]), |x, y| if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) { y } else { x });
    Ok(OverlapCount { count: best.0, exact: true, witness: Some(best.1.to_vec()) })
}

/// Overlap count at a single point of a d = 1 lattice.
pub fn overlap_count_at(lattice: &Lattice2d, r: f64, z: [f64; 2]) -> usize {
    let sp = lattice.spacings();
    count_at(z, [sp[0], sp[1]], r)
}

/// Condition (H): `A_Λ ⊆ B_{h·L}(0)`; returns `(holds, half-diagonal, h·L)`.
pub fn check_condition_h(lattice: &Lattice2d, h: f64, l_const: f64) -> (bool, f64, f64) {
    let hd = lattice.half_diagonal();
    (hd <= h * l_const * (1.0 + 1e-12), hd, h * l_const)
}

const DUMP_MAGIC: &[u8; 8] = b"FUPMAT01";

/// Dense dump: magic, `u64` rows, `u64` cols, `u64` components (2 = complex), then
/// row-major little-endian `f64` payload (re, im interleaved).
pub fn write_matrix_dump<W: Write>(mut w: W, m: &DenseHermitian) -> Result<()> {
    w.write_all(DUMP_MAGIC)?;
    for v in [m.n as u64, m.n as u64, 2u64] {
        w.write_all(&v.to_le_bytes())?;
    }
    for c in &m.data {
        w.write_all(&c.re.to_le_bytes())?;
        w.write_all(&c.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_matrix_dump<R: Read>(mut r: R) -> Result<DenseHermitian> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != DUMP_MAGIC {
        return Err(FupError::Io("not a matrix dump".into()));
    }
    let mut hdr = [0u64; 3];
    for h in hdr.iter_mut() {
        let mut b = [0u8; 8];
        r.read_exact(&mut b)?;
        *h = u64::from_le_bytes(b);
    }
    if hdr[0] != hdr[1] || hdr[2] != 2 {
        return Err(FupError::Io("expected a square complex matrix".into()));
    }
    let n = hdr[0] as usize;
    let mut data = Vec::with_capacity(n * n);
    let mut b = [0u8; 8];
    for _ in 0..n * n {
        r.read_exact(&mut b)?;
        let re = f64::from_le_bytes(b);
        r.read_exact(&mut b)?;
        data.push(C64::new(re, f64::from_le_bytes(b)));
    }
    Ok(DenseHermitian { n, data })
}

/// Axis-aligned restriction helper: the lattice indices along one axis.
pub fn restriction_axis(set: &IntervalUnion, spacing: f64) -> Vec<i64> {
    axis_indices(set, spacing)
}
