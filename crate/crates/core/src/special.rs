//! Gamma-family special functions: `ln Γ`, regularized incomplete gamma
//! `P(a, x)` / `Q(a, x)`, and the subaveraging constant `κ_d`.

use crate::error::{FupError, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        let s = (std::f64::consts::PI * x).sin();
        return (std::f64::consts::PI / s).ln() - ln_gamma(1.0 - x);
    }
    if x == x.floor() && x <= 171.0 {
        return ln_factorial(x as u32 - 1);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// `ln(k!)`, exact product below 171 and Stirling-free otherwise.
pub fn ln_factorial(k: u32) -> f64 {
    if k < 2 {
        return 0.0;
    }
    if k <= 170 {
        let mut p = 1.0f64;
        for i in 2..=k {
            p *= i as f64;
        }
        return p.ln();
    }
    ln_gamma(k as f64 + 1.0)
}

fn prefactor(a: f64, x: f64) -> f64 {
    (a * x.ln() - x - ln_gamma(a)).exp()
}

fn series_p(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut ap = a;
    for _ in 0..10_000 {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * 1e-17 {
            break;
        }
    }
    sum * prefactor(a, x)
}

fn continued_fraction_q(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-17 {
            break;
        }
    }
    prefactor(a, x) * h
}

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return 1.0;
    }
    if x < a + 1.0 {
        series_p(a, x).min(1.0)
    } else {
        (1.0 - continued_fraction_q(a, x)).max(0.0)
    }
}

/// Regularized upper incomplete gamma `Q(a, x) = 1 − P(a, x)`.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x.is_infinite() {
        return 0.0;
    }
    if x < a + 1.0 {
        (1.0 - series_p(a, x)).max(0.0)
    } else {
        continued_fraction_q(a, x)
    }
}

/// `P(a, x1) − P(a, x0)` for `x0 ≤ x1`, evaluated on whichever tail avoids cancellation.
pub fn gamma_p_diff(a: f64, x0: f64, x1: f64) -> f64 {
    if x0 >= a + 1.0 {
        gamma_q(a, x0) - gamma_q(a, x1)
    } else {
        gamma_p(a, x1) - gamma_p(a, x0)
    }
}

/// `1 − e^{−x} Σ_{j<d} x^j / j!`, i.e. `P(d, x)`.
pub fn lower_gamma_int(d: u32, x: f64) -> f64 {
    gamma_p(d as f64, x)
}

/// `κ_d(x) = (x^d/d!) / P(d, x)`.
pub fn kappa(d: u32, x: f64) -> Result<f64> {
    if d == 0 {
        return Err(FupError::InvalidParameter("kappa requires d >= 1".into()));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(FupError::Domain(format!("kappa requires finite x > 0, got {x}")));
    }
    let df = d as f64;
    if x < df + 1.0 {
        // e^x / Σ_k x^k d!/(d+k)!
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 0.0;
        loop {
            k += 1.0;
            term *= x / (df + k);
            sum += term;
            if term < sum * 1e-17 {
                break;
            }
        }
        Ok(x.exp() / sum)
    } else {
        let num = (df * x.ln() - ln_factorial(d)).exp();
        Ok(num / gamma_p(df, x))
    }
}
