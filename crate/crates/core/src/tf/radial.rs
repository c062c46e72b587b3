use crate::cantor::{radial_slice, RadialCantorSpec};
use crate::error::{FupError, Result};
use crate::special::{gamma_p, gamma_p_diff};
use crate::tf::Spectrum;

use std::f64::consts::PI;

const TAIL_TARGET: f64 = 1e-13;

/// Spectrum of the localization operator onto a radial Cantor set in `ℝ²`:
/// `λ_k = Σ_I [P(k+1, πb) − P(k+1, πa)]` over the intervals `[a, b]` of the `|x|²`-slice.
/// `min_cutoff` forces at least that many eigenvalues; more are taken until the tail is certified.
pub fn daubechies_radial_spectrum(spec: &RadialCantorSpec, min_cutoff: usize) -> Result<Spectrum> {
    if spec.d != 1 {
        return Err(FupError::Unsupported(format!(
            "radial spectra need halfDim d = 1 (got {}); higher d has no scalar eigenvalue formula",
            spec.d
        )));
    }
    let slice = radial_slice(spec)?;
    let t: Vec<(f64, f64)> = slice.intervals().iter().map(|&(a, b)| (PI * a, PI * b)).collect();
    let x_max = t.last().map(|p| p.1).unwrap_or(0.0);
    let mut values: Vec<f64> = Vec::new();
    let mut k = 0usize;
    let tail = loop {
        let a = (k + 1) as f64;
        let v: f64 = t.iter().map(|&(lo, hi)| gamma_p_diff(a, lo, hi)).sum();
        values.push(v.clamp(0.0, 1.0));
        k += 1;
        if k >= min_cutoff.max(1) && (k as f64 + 2.0) > x_max {
            // Σ_{j≥k} P(j+1, x) ≤ P(k+1, x) / (1 − x/(k+2))
            let b = gamma_p(k as f64 + 1.0, x_max) / (1.0 - x_max / (k as f64 + 2.0));
            if b < TAIL_TARGET {
                break b;
            }
        }
        if k > 1_000_000 {
            return Err(FupError::Range("radial spectrum tail did not converge".into()));
        }
    };
    let (argmax, _) = values
        .iter()
        .enumerate()
        .fold((0usize, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let cutoff = values.len();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(Spectrum { eigenvalues: values, cutoff, tail_bound: tail, argmax: Some(argmax) })
}

/// `λ_k` for the full disc of radius `R`: `P(k+1, πR²)`.
pub fn disc_eigenvalue(k: u32, r: f64) -> f64 {
    gamma_p(k as f64 + 1.0, PI * r * r)
}
