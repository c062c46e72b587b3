//! Discrete, continuous, product and radial Cantor iterates.

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{FupError, Result};
use crate::interval::IntervalUnion;

/// Default iterate cap for exact rational endpoints.
pub const DEFAULT_RATIONAL_CAP: u32 = 16;

/// Positive length, optionally carrying an exact rational value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Length {
    value: f64,
    exact: Option<Ratio<i64>>,
}

impl Length {
    pub fn real(value: f64) -> Self {
        let exact = if value.fract() == 0.0 && value.abs() < 9.0e15 {
            Some(Ratio::from_integer(value as i64))
        } else {
            None
        };
        Length { value, exact }
    }

    pub fn rational(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(FupError::InvalidSpec("zero denominator in length".into()));
        }
        let r = Ratio::new(p, q);
        Ok(Length { value: p as f64 / q as f64, exact: Some(r) })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn exact(&self) -> Option<Ratio<i64>> {
        self.exact
    }
}

impl Serialize for Length {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.exact {
            Some(r) if !r.is_integer() => s.serialize_str(&format!("{}/{}", r.numer(), r.denom())),
            _ => s.serialize_f64(self.value),
        }
    }
}

impl<'de> Deserialize<'de> for Length {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(Length::real(v)),
            Repr::Text(t) => parse_length(&t).map_err(serde::de::Error::custom),
        }
    }
}

/// Parses `"p/q"`, an integer, or a decimal literal.
pub fn parse_length(t: &str) -> Result<Length> {
    let t = t.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| FupError::InvalidSpec(format!("bad length {t}")))?;
        let q: i64 = q.trim().parse().map_err(|_| FupError::InvalidSpec(format!("bad length {t}")))?;
        Length::rational(p, q)
    } else {
        t.parse::<f64>()
            .map(Length::real)
            .map_err(|_| FupError::InvalidSpec(format!("bad length {t}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct CantorSpec {
    #[serde(rename = "M")]
    pub m: u32,
    pub alphabet: Vec<u32>,
    pub n: u32,
    #[serde(rename = "L")]
    pub length: Length,
}

#[derive(Deserialize)]
struct RawSpec {
    #[serde(rename = "M")]
    m: u32,
    alphabet: Vec<u32>,
    n: u32,
    #[serde(rename = "L")]
    length: Length,
}

impl TryFrom<RawSpec> for CantorSpec {
    type Error = FupError;
    fn try_from(r: RawSpec) -> Result<Self> {
        CantorSpec::with_length(r.m, r.alphabet, r.n, r.length)
    }
}

impl CantorSpec {
    pub fn new(m: u32, alphabet: Vec<u32>, n: u32, l: f64) -> Result<Self> {
        Self::with_length(m, alphabet, n, Length::real(l))
    }

    pub fn with_length(m: u32, alphabet: Vec<u32>, n: u32, length: Length) -> Result<Self> {
        let s = CantorSpec { m, alphabet, n, length };
        s.validate()?;
        Ok(s)
    }

    /// The standard mid-third iterate on `[0, l]`.
    pub fn mid_third(n: u32, l: f64) -> Self {
        CantorSpec { m: 3, alphabet: vec![0, 2], n, length: Length::real(l) }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(FupError::InvalidSpec(format!("base M = {} must exceed 1", self.m)));
        }
        if self.alphabet.is_empty() {
            return Err(FupError::InvalidSpec("alphabet is empty".into()));
        }
        if self.alphabet.len() >= self.m as usize {
            return Err(FupError::InvalidSpec("alphabet must be a proper subset of the digits".into()));
        }
        if self.alphabet.windows(2).any(|w| w[0] >= w[1]) {
            return Err(FupError::InvalidSpec("alphabet must be strictly increasing".into()));
        }
        if *self.alphabet.last().unwrap() >= self.m {
            return Err(FupError::InvalidSpec("digit out of range".into()));
        }
        if !(self.length.value > 0.0) || !self.length.value.is_finite() {
            return Err(FupError::InvalidSpec("length must be positive and finite".into()));
        }
        Ok(())
    }

    pub fn l(&self) -> f64 {
        self.length.value
    }

    pub fn with_n(&self, n: u32) -> Self {
        CantorSpec { n, ..self.clone() }
    }

    pub fn with_l(&self, l: f64) -> Self {
        CantorSpec { length: Length::real(l), ..self.clone() }
    }

    /// `|A| / M`.
    pub fn ratio(&self) -> f64 {
        self.alphabet.len() as f64 / self.m as f64
    }

    /// `(|A|/M)^n · L` in floating point.
    pub fn expected_measure(&self) -> f64 {
        self.ratio().powi(self.n as i32) * self.l()
    }

    /// Exact `(|A|/M)^n · L`, when L is rational and nothing overflows.
    pub fn expected_measure_exact(&self) -> Option<Ratio<i128>> {
        let l = self.length.exact?;
        let a = (self.alphabet.len() as i128).checked_pow(self.n)?;
        let mn = (self.m as i128).checked_pow(self.n)?;
        let num = a.checked_mul(*l.numer() as i128)?;
        let den = mn.checked_mul(*l.denom() as i128)?;
        Some(Ratio::new(num, den))
    }

    /// Length `L·M^{-n}` of one elementary interval.
    pub fn cell(&self) -> f64 {
        self.l() / (self.m as f64).powi(self.n as i32)
    }

    /// The canonical alphabet `{0, …, |A|−1}` of the same base and length.
    pub fn canonical(&self) -> Self {
        CantorSpec { alphabet: (0..self.alphabet.len() as u32).collect(), ..self.clone() }
    }
}

/// Sorted integers `Σ_{j<n} a_j M^j` with `a_j ∈ A`.
pub fn discrete_iterate(spec: &CantorSpec) -> Result<Vec<u64>> {
    spec.validate()?;
    let m = spec.m as u64;
    m.checked_pow(spec.n)
        .ok_or_else(|| FupError::Range(format!("M^n = {}^{} overflows u64", spec.m, spec.n)))?;
    let count = (spec.alphabet.len() as u64)
        .checked_pow(spec.n)
        .filter(|&c| c <= (1u64 << 32))
        .ok_or_else(|| FupError::Range("|A|^n too large to enumerate".into()))?;
    let mut cur = Vec::with_capacity(count as usize);
    cur.push(0u64);
    let mut place = 1u64;
    for _ in 0..spec.n {
        let mut next = Vec::with_capacity(cur.len() * spec.alphabet.len());
        for &a in &spec.alphabet {
            let off = a as u64 * place;
            next.extend(cur.iter().map(|&s| s + off));
        }
        cur = next;
        place *= m;
    }
    Ok(cur)
}

/// Groups consecutive integers into half-open runs `[k, k_end)`.
fn runs(ks: &[u64]) -> Vec<(u64, u64)> {
    let mut out: Vec<(u64, u64)> = Vec::new();
    for &k in ks {
        match out.last_mut() {
            Some(r) if r.1 == k => r.1 = k + 1,
            _ => out.push((k, k + 1)),
        }
    }
    out
}

/// `𝒞ₙ(L, M, A)` as a canonical interval union (touching cells merged).
pub fn build_iterate(spec: &CantorSpec) -> Result<IntervalUnion> {
    let ks = discrete_iterate(spec)?;
    let mn = (spec.m as f64).powi(spec.n as i32);
    let l = spec.l();
    let rs = runs(&ks);
    let iv = rs.iter().map(|&(a, b)| (l * a as f64 / mn, l * b as f64 / mn)).collect();
    let w: Vec<f64> = rs.iter().map(|&(a, b)| l * (b - a) as f64 / mn).collect();
    Ok(IntervalUnion::from_sorted_with_lengths(iv, &w))
}

/// Interval union whose endpoints are `num / denom` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalUnion {
    pub denom: i128,
    pub nums: Vec<(i128, i128)>,
}

impl RationalUnion {
    pub fn measure(&self) -> Ratio<i128> {
        let total: i128 = self.nums.iter().map(|&(a, b)| b - a).sum();
        Ratio::new(total, self.denom)
    }

    pub fn endpoints(&self) -> Vec<(Ratio<i128>, Ratio<i128>)> {
        self.nums
            .iter()
            .map(|&(a, b)| (Ratio::new(a, self.denom), Ratio::new(b, self.denom)))
            .collect()
    }

    pub fn to_f64(&self) -> IntervalUnion {
        let d = self.denom as f64;
        IntervalUnion::from_intervals(self.nums.iter().map(|&(a, b)| (a as f64 / d, b as f64 / d)).collect())
    }
}

/// Exact-endpoint iterate. `None` when L is irrational, `n > cap`, or the common
/// denominator would overflow `i128`.
pub fn build_iterate_exact(spec: &CantorSpec, cap: u32) -> Result<Option<RationalUnion>> {
    spec.validate()?;
    let l = match spec.length.exact {
        Some(l) if spec.n <= cap => l,
        _ => return Ok(None),
    };
    let (p, q) = (*l.numer() as i128, *l.denom() as i128);
    let denom = match (spec.m as i128).checked_pow(spec.n).and_then(|mn| mn.checked_mul(q)) {
        Some(d) => d,
        None => return Ok(None),
    };
    let ks = discrete_iterate(spec)?;
    let mut nums = Vec::new();
    for (a, b) in runs(&ks) {
        match ((a as i128).checked_mul(p), (b as i128).checked_mul(p)) {
            (Some(x), Some(y)) => nums.push((x, y)),
            _ => return Ok(None),
        }
    }
    let g = nums.iter().fold(denom, |g, &(a, b)| g.gcd(&a).gcd(&b));
    if g > 1 {
        for e in nums.iter_mut() {
            e.0 /= g;
            e.1 /= g;
        }
        return Ok(Some(RationalUnion { denom: denom / g, nums }));
    }
    Ok(Some(RationalUnion { denom, nums }))
}

/// Normalized Cantor function `|𝒞ₙ ∩ [0, x]| / |𝒞ₙ|` by digit-greedy descent.
pub fn cantor_function(spec: &CantorSpec, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let l = spec.l();
    if x >= l {
        return 1.0;
    }
    let m = spec.m as f64;
    let na = spec.alphabet.len() as f64;
    let mut t = x / l;
    let mut res = 0.0;
    let mut w = 1.0;
    for _ in 0..spec.n {
        let y = t * m;
        let j = (y.floor() as u32).min(spec.m - 1);
        let below = spec.alphabet.partition_point(|&a| a < j) as f64;
        res += w * below / na;
        if spec.alphabet.binary_search(&j).is_err() {
            return res;
        }
        w /= na;
        t = (y - j as f64).clamp(0.0, 1.0);
    }
    (res + w * t).min(1.0)
}

/// Radially symmetric iterate in `ℝ^{2d}`: `{x : |x|^{2d} ∈ 𝒞ₙ(R^{2d}, M, A)}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialCantorSpec {
    pub d: u32,
    pub radius: f64,
    #[serde(rename = "M")]
    pub m: u32,
    pub alphabet: Vec<u32>,
    pub n: u32,
}

impl RadialCantorSpec {
    pub fn new(d: u32, radius: f64, m: u32, alphabet: Vec<u32>, n: u32) -> Result<Self> {
        let s = RadialCantorSpec { d, radius, m, alphabet, n };
        if d == 0 {
            return Err(FupError::InvalidSpec("halfDim d must be >= 1".into()));
        }
        if !(radius > 0.0) {
            return Err(FupError::InvalidSpec("radius must be positive".into()));
        }
        s.t_spec().validate()?;
        Ok(s)
    }

    /// The t-domain spec `𝒞ₙ(R^{2d}, M, A)`.
    pub fn t_spec(&self) -> CantorSpec {
        CantorSpec {
            m: self.m,
            alphabet: self.alphabet.clone(),
            n: self.n,
            length: Length::real(self.radius.powi(2 * self.d as i32)),
        }
    }

    /// `(|A|/M)^n (πR²)^d / d!`.
    pub fn volume(&self) -> f64 {
        let ratio = self.alphabet.len() as f64 / self.m as f64;
        ratio.powi(self.n as i32) * ball_volume(self.d, self.radius)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        radial_slice(self).map(|s| s.contains(r2.powi(self.d as i32))).unwrap_or(false)
    }
}

/// Volume `π^d r^{2d} / d!` of a ball in `ℝ^{2d}`.
pub fn ball_volume(d: u32, r: f64) -> f64 {
    (std::f64::consts::PI * r * r).powi(d as i32) / factorial(d)
}

pub(crate) fn factorial(d: u32) -> f64 {
    (1..=d).map(|k| k as f64).product()
}

pub fn radial_slice(spec: &RadialCantorSpec) -> Result<IntervalUnion> {
    build_iterate(&spec.t_spec())
}

/// Cartesian product of one-dimensional iterates, one per phase-space axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductCantor {
    pub factors: Vec<CantorSpec>,
}

impl ProductCantor {
    pub fn new(factors: Vec<CantorSpec>) -> Result<Self> {
        if factors.is_empty() {
            return Err(FupError::InvalidSpec("product needs at least one factor".into()));
        }
        for f in &factors {
            f.validate()?;
        }
        Ok(ProductCantor { factors })
    }

    /// `dim` copies of the same factor.
    pub fn power(spec: &CantorSpec, dim: usize) -> Self {
        ProductCantor { factors: vec![spec.clone(); dim] }
    }

    pub fn dimension(&self) -> usize {
        self.factors.len()
    }

    pub fn measure(&self) -> f64 {
        self.factors.iter().map(CantorSpec::expected_measure).product()
    }

    pub fn build_factors(&self) -> Result<Vec<IntervalUnion>> {
        self.factors.iter().map(build_iterate).collect()
    }
}

/// Family rule `value(n) = coef · base^{n/2}`, used for `L(n)` and `R^{2d}(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleRule {
    pub coef: f64,
    pub base: f64,
}

impl ScaleRule {
    pub fn new(coef: f64, base: f64) -> Self {
        ScaleRule { coef, base }
    }

    pub fn value(&self, n: u32) -> f64 {
        self.coef * self.base.powf(n as f64 / 2.0)
    }

    pub fn samples(&self, ns: impl IntoIterator<Item = u32>) -> Vec<(u32, f64)> {
        ns.into_iter().map(|n| (n, self.value(n))).collect()
    }
}

/// Kind of growth condition on a family of lengths or radii.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GrowthKind {
    #[serde(rename = "I_M")]
    Increasing,
    #[serde(rename = "D_M")]
    Radius,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthCondition {
    pub kind: GrowthKind,
    pub c1: f64,
    pub c2: f64,
    #[serde(rename = "M")]
    pub m: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthViolation {
    pub n: u32,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthCheck {
    pub pass: bool,
    pub first_violation: Option<GrowthViolation>,
}

const GROWTH_SLACK: f64 = 1e-12;

impl GrowthCondition {
    pub fn new(kind: GrowthKind, c1: f64, c2: f64, m: u32) -> Result<Self> {
        if !(c1 > 0.0 && c1 <= c2 && c2.is_finite()) {
            return Err(FupError::InvalidParameter(format!("need 0 < c1 <= c2 < inf, got {c1}, {c2}")));
        }
        Ok(GrowthCondition { kind, c1, c2, m })
    }

    pub fn bounds(&self, n: u32) -> (f64, f64) {
        let s = (self.m as f64).powf(n as f64 / 2.0);
        (self.c1 * s, self.c2 * s)
    }
}

/// Checks `c1·M^{n/2} ≤ value ≤ c2·M^{n/2}` for every sample (value is `L(n)` or `R^{2d}(n)`).
pub fn check_growth(cond: &GrowthCondition, samples: &[(u32, f64)]) -> GrowthCheck {
    for &(n, value) in samples {
        let (lo, hi) = cond.bounds(n);
        if value < lo * (1.0 - GROWTH_SLACK) || value > hi * (1.0 + GROWTH_SLACK) {
            return GrowthCheck {
                pass: false,
                first_violation: Some(GrowthViolation { n, value, lower: lo, upper: hi }),
            };
        }
    }
    GrowthCheck { pass: true, first_violation: None }
}
