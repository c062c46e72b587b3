//! Experiment configs, the radial and Gabor sweeps, and the property-suite runner.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::bounds::{
    build_schedule, cantor_fup_table, check_improvement, kappa, local_density_bound, optimized_density_bound,
    subaveraging_prefactor, FupFamily,
};
use crate::cantor::{build_iterate, CantorSpec, GrowthCondition, GrowthKind, ScaleRule};
use crate::error::{FupError, Result};
use crate::interval::IntervalUnion;
use crate::nyquist::{check_weak_subadditivity_scaled, least_squares_slope, rho_product_bound};
use crate::porosity::{certify_cantor_porosity, thicken_1d, thickened_porosity, verify_porosity_1d};
use crate::tf::gabor::{
    check_condition_h, gabor_multiplier_norm, lattice_restriction, overlap_count, EigenMethod, Lattice2d,
    RestrictionSource,
};
use crate::tf::hermite::{check_lemma_5_2, PhasePoint};
use crate::tf::radial::daubechies_radial_spectrum;
use crate::tf::subaverage::{check_subaveraging, SubaverageStatus};

pub const EXPERIMENTS: [&str; 2] = ["radial_fup", "gabor_fup"];

/// Flat experiment record. `rule_coef·rule_base^{n/2}` is `R^{2d}(n)` for the radial family
/// and `L(n)` for the product family; the lattice spacing is `lattice_factor·L(n)·M^{−n}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    #[serde(rename = "M")]
    pub m: u32,
    pub alphabet: Vec<u32>,
    pub n_min: u32,
    pub n_max: u32,
    pub rule_coef: f64,
    pub rule_base: f64,
    pub growth_c1: f64,
    pub growth_c2: f64,
    pub lattice_factor: f64,
    pub radii: Vec<f64>,
    pub p: f64,
    pub r0_fraction: f64,
    pub n_cut: f64,
    pub matrix_cap: usize,
    pub sparsified: bool,
    pub seed: u64,
    pub out: Option<String>,
}

fn radius_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let k = ((hi - lo) / step).round() as usize;
    (0..=k).map(|i| lo + step * i as f64).collect()
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: "radial_fup".into(),
            m: 3,
            alphabet: vec![0, 2],
            n_min: 0,
            n_max: 8,
            rule_coef: 1.0,
            rule_base: 3.0,
            growth_c1: 1.0,
            growth_c2: 1.0,
            lattice_factor: 1.0,
            radii: radius_grid(0.25, 4.0, 0.25),
            p: 2.0,
            r0_fraction: 0.5,
            n_cut: 4.0,
            matrix_cap: crate::tf::gabor::DEFAULT_MATRIX_CAP,
            sparsified: false,
            seed: 0,
            out: None,
        }
    }
}

fn merge(into: &mut Map<String, Value>, from: Map<String, Value>) {
    for (k, v) in from {
        into.insert(k, v);
    }
}

/// Parses `key=value`; the value is read as JSON when possible, otherwise as a string.
pub fn parse_override(s: &str) -> Result<(String, Value)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| FupError::Config(format!("override '{s}' is not of the form key=value")))?;
    let key = k.trim();
    if key.is_empty() {
        return Err(FupError::Config(format!("override '{s}' has an empty key")));
    }
    let value = serde_json::from_str(v.trim()).unwrap_or_else(|_| Value::String(v.trim().to_string()));
    Ok((key.to_string(), value))
}

impl ExperimentConfig {
    /// Defaults for a named experiment.
    pub fn for_experiment(name: &str) -> Result<Self> {
        let base = ExperimentConfig::default();
        match name {
            "radial_fup" => Ok(base),
            "gabor_fup" => Ok(ExperimentConfig {
                experiment: name.into(),
                n_max: 5,
                radii: radius_grid(0.25, 2.0, 0.25),
                ..base
            }),
            _ => Err(FupError::Config(format!("unknown experiment '{name}' (known: {})", EXPERIMENTS.join(", ")))),
        }
    }

    /// Layers defaults < config file < overrides. `experiment` (the CLI positional) outranks the file.
    pub fn resolve(experiment: Option<&str>, file: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let file_map = match file {
            Some(p) => match serde_json::from_str::<Value>(&std::fs::read_to_string(p)?)? {
                Value::Object(m) => m,
                _ => return Err(FupError::Config("config file must hold a JSON object".into())),
            },
            None => Map::new(),
        };
        let mut set_map = Map::new();
        for o in overrides {
            let (k, v) = parse_override(o)?;
            set_map.insert(k, v);
        }
        if let Some(e) = experiment {
            set_map.entry("experiment".to_string()).or_insert(Value::String(e.to_string()));
        }
        let name = set_map
            .get("experiment")
            .or_else(|| file_map.get("experiment"))
            .and_then(Value::as_str)
            .unwrap_or("radial_fup")
            .to_string();
        let mut map = match serde_json::to_value(ExperimentConfig::for_experiment(&name)?)? {
            Value::Object(m) => m,
            _ => unreachable!("config serializes to an object"),
        };
        merge(&mut map, file_map);
        merge(&mut map, set_map);
        let cfg: ExperimentConfig = serde_json::from_value(Value::Object(map))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !EXPERIMENTS.contains(&self.experiment.as_str()) {
            return Err(FupError::Config(format!("unknown experiment '{}'", self.experiment)));
        }
        CantorSpec::new(self.m, self.alphabet.clone(), 0, 1.0)?;
        if self.n_min > self.n_max {
            return Err(FupError::Config("n_min must not exceed n_max".into()));
        }
        if self.radii.is_empty() || self.radii.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
            return Err(FupError::Config("radii must be a nonempty list of positive numbers".into()));
        }
        if !(self.rule_coef > 0.0 && self.rule_base > 0.0 && self.lattice_factor > 0.0) {
            return Err(FupError::Config("rule_coef, rule_base and lattice_factor must be positive".into()));
        }
        if !(self.p >= 1.0 && self.r0_fraction > 0.0 && self.r0_fraction < 1.0 && self.n_cut > 1.0) {
            return Err(FupError::Config("need p >= 1, 0 < r0_fraction < 1, n_cut > 1".into()));
        }
        GrowthCondition::new(GrowthKind::Radius, self.growth_c1, self.growth_c2, self.m)
            .map_err(|e| FupError::Config(e.to_string()))?;
        Ok(())
    }

    pub fn ns(&self) -> Vec<u32> {
        (self.n_min..=self.n_max).collect()
    }

    pub fn rule(&self) -> ScaleRule {
        ScaleRule::new(self.rule_coef, self.rule_base)
    }
}

/// Schedule product bound at scale `h` (1 when `h` exceeds the unit scale).
fn schedule_bound(nu: f64, h: f64, p: f64, r0_fraction: f64) -> Result<f64> {
    if h > 1.0 {
        return Ok(1.0);
    }
    Ok(build_schedule(nu, h, 1, p, r0_fraction)?.product_bound)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialRow {
    pub n: u32,
    pub radius: f64,
    pub norm: f64,
    pub bound: f64,
    pub asymptote: f64,
    /// `norm / (|A|/M)^{n/2}`.
    pub ratio: f64,
    pub product_bound: f64,
    pub trace_error: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialReport {
    pub gamma: f64,
    pub gamma_radius: f64,
    pub rows: Vec<RadialRow>,
    /// `max ratio / min ratio` over the rows.
    pub ratio_spread: f64,
    pub pass: bool,
}

/// Radial family in `ℝ²`: spectrum norms against the density bound, the fitted asymptote and
/// the schedule bound.
pub fn run_radial_fup(cfg: &ExperimentConfig) -> Result<RadialReport> {
    let family = FupFamily::Radial { d: 1, m: cfg.m, alphabet: cfg.alphabet.clone(), rule: cfg.rule(), n_cut: cfg.n_cut };
    let cond = GrowthCondition::new(GrowthKind::Radius, cfg.growth_c1, cfg.growth_c2, cfg.m)?;
    let ns = cfg.ns();
    let table = cantor_fup_table(&family, &cond, &cfg.radii, &ns)?;
    let m = cfg.m as f64;
    let nu = 1.0 / (m * m);
    let mut rows: Vec<RadialRow> = table
        .rows
        .par_iter()
        .map(|row| -> Result<RadialRow> {
            let spec = family.radial_spec(row.n)?;
            let spectrum = daubechies_radial_spectrum(&spec, 0)?;
            let norm = spectrum.norm();
            let r2 = spec.radius * spec.radius;
            let h_t = r2 * m.powi(1 - row.n as i32);
            let product_bound = schedule_bound(nu, h_t, cfg.p, cfg.r0_fraction)?;
            let base = family.asymptote_base(row.n);
            let pass = norm <= row.bound && norm <= row.asymptote && norm <= product_bound;
            Ok(RadialRow {
                n: row.n,
                radius: spec.radius,
                norm,
                bound: row.bound,
                asymptote: row.asymptote,
                ratio: norm / base,
                product_bound,
                trace_error: (spectrum.trace() - spec.volume()).abs(),
                pass,
            })
        })
        .collect::<Result<_>>()?;
    rows.sort_by_key(|r| r.n);
    let hi = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let lo = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let pass = rows.iter().all(|r| r.pass);
    Ok(RadialReport { gamma: table.gamma, gamma_radius: table.gamma_radius, rows, ratio_spread: hi / lo, pass })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaborRow {
    pub n: u32,
    pub h: f64,
    pub points: usize,
    pub norm: f64,
    pub bound: f64,
    pub bound_radius: f64,
    pub overlap: usize,
    pub product_bound: f64,
    pub nyquist_bound: f64,
    pub condition_h: bool,
    /// `norm ≤ product_bound` with no sampling factor.
    pub within_product_bound: bool,
    /// `norm ≤ bound` and condition (H).
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaborReport {
    pub rows: Vec<GaborRow>,
    /// Least-squares slope of `log norm` against `log h`.
    pub beta_hat: f64,
    pub monotone: bool,
    pub pass: bool,
}

struct RadiusTerms {
    radius: f64,
    overlap: usize,
    prefactor: f64,
    nyquist: f64,
    product: f64,
}

/// Gaussian Gabor multipliers on the product family `𝒞ₙ(L(n))²` with square lattices of
/// spacing `a ∼ L(n)M^{−n}`. The bound at radius `R` is the sampling factor
/// `|A_Λ|·γ(R,Λ)·(p/2)/P(1,(p/2)πR²)` times the best localization bound for the
/// `(R + diam(A_Λ)/2)`-thickened set.
pub fn run_gabor_fup(cfg: &ExperimentConfig) -> Result<GaborReport> {
    let family = FupFamily::Product { dim: 2, m: cfg.m, alphabet: cfg.alphabet.clone(), rule: cfg.rule() };
    let cond = GrowthCondition::new(GrowthKind::Increasing, cfg.growth_c1, cfg.growth_c2, cfg.m)?;
    let ns = cfg.ns();
    family.check_growth(&cond, &ns)?;
    let m = cfg.m as f64;
    let nu_set = 1.0 / (m * m * std::f64::consts::SQRT_2);
    let mut rows = Vec::with_capacity(ns.len());
    for &n in &ns {
        let spec = family.factor_spec(n)?;
        let l = spec.l();
        let a = cfg.lattice_factor * l * m.powi(-(n as i32));
        let lattice = Lattice2d::square(1, a)?;
        let set = build_iterate(&spec)?;
        let factors = [set.clone(), set.clone()];
        let restriction = lattice_restriction(&lattice, RestrictionSource::Product(&factors))?;
        let g = gabor_multiplier_norm(&restriction, cfg.matrix_cap, cfg.sparsified, EigenMethod::Lanczos)?;
        let norm = g.norm + g.cell_volume * g.dropped_bound;
        let h = family.scale(n);
        let (condition_h, _, _) = check_condition_h(&lattice, h, 1.0);
        let h_set = std::f64::consts::SQRT_2 * l * m.powi(1 - n as i32);
        let terms: Vec<RadiusTerms> = cfg
            .radii
            .par_iter()
            .map(|&r| gabor_terms(&set, &lattice, r, cfg, nu_set, h_set))
            .collect::<Result<_>>()?;
        let best = terms
            .iter()
            .min_by(|x, y| {
                (x.prefactor * x.nyquist.min(x.product).min(1.0)).total_cmp(&(y.prefactor * y.nyquist.min(y.product).min(1.0)))
            })
            .ok_or_else(|| FupError::Config("empty radius grid".into()))?;
        let bound = best.prefactor * best.nyquist.min(best.product).min(1.0);
        let product_bound = terms.iter().map(|t| t.product).fold(f64::INFINITY, f64::min);
        rows.push(GaborRow {
            n,
            h,
            points: restriction.len(),
            norm,
            bound,
            bound_radius: best.radius,
            overlap: best.overlap,
            product_bound,
            nyquist_bound: best.nyquist,
            condition_h,
            within_product_bound: norm <= product_bound,
            pass: norm <= bound && condition_h,
        });
    }
    rows.sort_by_key(|r| r.n);
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.h.ln(), r.norm.ln())).collect();
    let beta_hat = if pts.len() >= 2 { least_squares_slope(&pts) } else { f64::NAN };
    let monotone = rows.windows(2).filter(|w| w[0].n >= 1).all(|w| w[1].norm <= w[0].norm);
    let pass = rows.iter().all(|r| r.pass) && monotone && (rows.len() < 2 || beta_hat > 0.0);
    Ok(GaborReport { rows, beta_hat, monotone, pass })
}

fn gabor_terms(
    set: &IntervalUnion,
    lattice: &Lattice2d,
    r: f64,
    cfg: &ExperimentConfig,
    nu_set: f64,
    h_set: f64,
) -> Result<RadiusTerms> {
    let overlap = overlap_count(lattice, r)?.count;
    let prefactor = lattice.cell_volume() * overlap as f64 * subaveraging_prefactor(1, cfg.p, r);
    let thick = r + lattice.half_diagonal();
    let t = thicken_1d(set, thick)?;
    let tf = [t.clone(), t];
    let mut nyquist = f64::INFINITY;
    for &r2 in &cfg.radii {
        let rho = rho_product_bound(&tf, r2)?.value;
        nyquist = nyquist.min(local_density_bound(rho, r2, 1, cfg.p)).min(optimized_density_bound(rho, r2, 1));
    }
    let big_r = (2.0 * thick / nu_set).max(h_set);
    let (nu_thick, _) = thickened_porosity(nu_set, thick, big_r, f64::INFINITY)?;
    let product = schedule_bound(nu_thick, big_r, cfg.p, cfg.r0_fraction)?;
    Ok(RadiusTerms { radius: r, overlap, prefactor, nyquist, product })
}

fn fmt(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn csv_with_header(cfg: &ExperimentConfig, header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| FupError::Io(e.to_string()))?)
        .map_err(|e| FupError::Io(e.to_string()))?;
    Ok(format!("# experiment={} seed={}\n{body}", cfg.experiment, cfg.seed))
}

impl RadialReport {
    pub fn to_csv(&self, cfg: &ExperimentConfig) -> Result<String> {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.n.to_string(),
                    fmt(r.radius),
                    fmt(r.norm),
                    fmt(r.bound),
                    fmt(r.asymptote),
                    fmt(r.ratio),
                    fmt(r.product_bound),
                    fmt(r.trace_error),
                    r.pass.to_string(),
                ]
            })
            .collect();
        csv_with_header(
            cfg,
            &["n", "R", "norm", "bound", "asymptote", "ratio", "product_bound", "trace_error", "pass"],
            rows,
        )
    }
}

impl GaborReport {
    pub fn to_csv(&self, cfg: &ExperimentConfig) -> Result<String> {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.n.to_string(),
                    fmt(r.h),
                    r.points.to_string(),
                    fmt(r.norm),
                    fmt(r.bound),
                    fmt(r.bound_radius),
                    r.overlap.to_string(),
                    fmt(r.product_bound),
                    fmt(r.nyquist_bound),
                    r.condition_h.to_string(),
                    r.within_product_bound.to_string(),
                    fmt(self.beta_hat),
                    r.pass.to_string(),
                ]
            })
            .collect();
        csv_with_header(
            cfg,
            &[
                "n", "h", "lattice_points", "norm", "bound", "bound_radius", "overlap", "product_bound",
                "nyquist_bound", "condition_h", "within_product_bound", "beta_hat", "pass",
            ],
            rows,
        )
    }
}

/// Runs the configured experiment and returns `(csv, pass)`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<(String, bool)> {
    match cfg.experiment.as_str() {
        "radial_fup" => {
            let r = run_radial_fup(cfg)?;
            Ok((r.to_csv(cfg)?, r.pass))
        }
        "gabor_fup" => {
            let r = run_gabor_fup(cfg)?;
            Ok((r.to_csv(cfg)?, r.pass))
        }
        other => Err(FupError::Config(format!("unknown experiment '{other}'"))),
    }
}

/// Suites run when no explicit selection is given.
pub const DEFAULT_SUITES: [&str; 6] = ["porosity", "subadditivity", "subaveraging", "bargmann", "kappa", "improvement"];

/// Deliberately broken subadditivity check (right-hand side halved) for harness self-tests.
pub const INJECTED_SUITE: &str = "subadditivity_injected";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub property: String,
    pub pass: bool,
    pub checked: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
    pub pass: bool,
}

/// `count` seeded pairs `x ≤ y` uniform in `[0, l]`.
pub fn random_pairs(l: f64, count: usize, seed: u64) -> Vec<(f64, f64)> {
    subadditivity_pairs(&mut ChaCha8Rng::seed_from_u64(seed), l, count)
}

fn subadditivity_pairs(rng: &mut ChaCha8Rng, l: f64, count: usize) -> Vec<(f64, f64)> {
    (0..count)
        .map(|_| {
            let x: f64 = rng.gen_range(0.0..l);
            let y: f64 = rng.gen_range(0.0..l);
            (x.min(y), x.max(y))
        })
        .collect()
}

fn suite_subadditivity(seed: u64, rhs_scale: f64, name: &str) -> Result<SuiteResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alphabets: [(u32, Vec<u32>); 3] = [(3, vec![0, 2]), (4, vec![0, 3]), (5, vec![0, 2, 4])];
    let mut checked = 0;
    for (m, a) in alphabets.iter() {
        for n in 1..=4 {
            let spec = CantorSpec::new(*m, a.clone(), n, 1.0)?;
            let pairs = subadditivity_pairs(&mut rng, 1.0, 200);
            let rep = check_weak_subadditivity_scaled(&spec, &pairs, rhs_scale)?;
            checked += rep.checked;
            if let Some(v) = rep.first_violation {
                return Ok(SuiteResult {
                    suite: name.into(),
                    property: "weak subadditivity of the Cantor function".into(),
                    pass: false,
                    checked,
                    detail: format!("M={m} A={a:?} n={n}: G(y)-G(x)={} > G_bar(y-x)={} at x={}, y={}", v.lhs, v.rhs, v.x, v.y),
                });
            }
        }
    }
    Ok(SuiteResult {
        suite: name.into(),
        property: "weak subadditivity of the Cantor function".into(),
        pass: true,
        checked,
        detail: String::new(),
    })
}

fn suite_porosity() -> Result<SuiteResult> {
    let mut checked = 0;
    for (m, a) in [(3u32, vec![0u32, 2]), (4, vec![0, 3])] {
        for n in 1..=4 {
            let spec = CantorSpec::new(m, a.clone(), n, 1.0)?;
            let cert = certify_cantor_porosity(&spec)?;
            let set = build_iterate(&spec)?;
            let lo = spec.l() * (m as f64).powi(1 - n as i32);
            let direct = verify_porosity_1d(&set, cert.nu, lo, 10.0 * spec.l())?;
            checked += 1;
            if cert.is_verified() != direct.is_verified() || !cert.is_verified() {
                return Ok(SuiteResult {
                    suite: "porosity".into(),
                    property: "porosity of Cantor iterates".into(),
                    pass: false,
                    checked,
                    detail: format!("M={m} n={n}: certificate {:?}, sweep {:?}", cert.status, direct.status),
                });
            }
        }
    }
    Ok(SuiteResult { suite: "porosity".into(), property: "porosity of Cantor iterates".into(), pass: true, checked, detail: String::new() })
}

fn suite_subaveraging(seed: u64) -> Result<SuiteResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5AB);
    let mut checked = 0;
    let property = "subaveraging inequality in Fock space";
    for d in 1..=2usize {
        for p in [1.0, 2.0, 4.0] {
            for _ in 0..3 {
                let k: Vec<u32> = (0..d).map(|_| rng.gen_range(0..=8)).collect();
                let z = PhasePoint::new(
                    (0..d).map(|_| rng.gen_range(-1.5..1.5)).collect(),
                    (0..d).map(|_| rng.gen_range(-1.5..1.5)).collect(),
                );
                let r = rng.gen_range(0.2..1.5);
                let rep = check_subaveraging(&k, &z, r, p)?;
                checked += 1;
                if rep.status != SubaverageStatus::Pass {
                    return Ok(SuiteResult {
                        suite: "subaveraging".into(),
                        property: property.into(),
                        pass: false,
                        checked,
                        detail: format!("k={k:?} z={z:?} R={r} p={p}: {:?} lhs={} rhs={}", rep.status, rep.lhs, rep.rhs),
                    });
                }
            }
        }
    }
    Ok(SuiteResult { suite: "subaveraging".into(), property: property.into(), pass: true, checked, detail: String::new() })
}

fn suite_bargmann(seed: u64) -> Result<SuiteResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xB4);
    let cases: Vec<(Vec<u32>, PhasePoint)> = (0..12)
        .map(|_| (vec![rng.gen_range(0..=6)], PhasePoint::d1(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))))
        .collect();
    let (err, _) = check_lemma_5_2(&cases)?;
    Ok(SuiteResult {
        suite: "bargmann".into(),
        property: "termwise Bargmann identity for Gabor coefficients".into(),
        pass: err <= 1e-7,
        checked: cases.len(),
        detail: format!("max error {err}"),
    })
}

fn suite_kappa() -> Result<SuiteResult> {
    let mut checked = 0;
    for d in 1..=4u32 {
        let v = kappa(d, 1e-8)?;
        checked += 1;
        if (v - 1.0).abs() > 1e-6 {
            return Ok(SuiteResult {
                suite: "kappa".into(),
                property: "kappa_d normalization and monotonicity".into(),
                pass: false,
                checked,
                detail: format!("kappa_{d}(1e-8) = {v}"),
            });
        }
        let mut prev = 0.0;
        for i in 1..=200 {
            let x = 0.05 * i as f64;
            let k = kappa(d, x)?;
            checked += 1;
            if !(k > prev) {
                return Ok(SuiteResult {
                    suite: "kappa".into(),
                    property: "kappa_d normalization and monotonicity".into(),
                    pass: false,
                    checked,
                    detail: format!("kappa_{d} not increasing at x = {x}"),
                });
            }
            prev = k;
        }
    }
    Ok(SuiteResult {
        suite: "kappa".into(),
        property: "kappa_d normalization and monotonicity".into(),
        pass: true,
        checked,
        detail: String::new(),
    })
}

fn suite_improvement() -> SuiteResult {
    let grid: Vec<f64> = (1..=1000).map(|i| 0.01 * i as f64).collect();
    let rep = check_improvement(&grid);
    SuiteResult {
        suite: "improvement".into(),
        property: "optimized density bound improves the Hermite-window bound".into(),
        pass: rep.pass,
        checked: rep.checked,
        detail: rep.first_violation.map(|v| format!("R={} lhs={} rhs={}", v.0, v.1, v.2)).unwrap_or_default(),
    }
}

/// Runs the named suites (empty selection: nothing). Unknown names are an error.
pub fn run_property_suites(selection: &[String], seed: u64) -> Result<SuiteReport> {
    let mut suites = Vec::with_capacity(selection.len());
    for name in selection {
        let r = match name.as_str() {
            "porosity" => suite_porosity()?,
            "subadditivity" => suite_subadditivity(seed, 1.0, "subadditivity")?,
            "subaveraging" => suite_subaveraging(seed)?,
            "bargmann" => suite_bargmann(seed)?,
            "kappa" => suite_kappa()?,
            "improvement" => suite_improvement(),
            INJECTED_SUITE => suite_subadditivity(seed, 0.5, INJECTED_SUITE)?,
            other => {
                return Err(FupError::Config(format!(
                    "unknown suite '{other}' (known: {}, {INJECTED_SUITE})",
                    DEFAULT_SUITES.join(", ")
                )))
            }
        };
        suites.push(r);
    }
    let pass = suites.iter().all(|s| s.pass);
    Ok(SuiteReport { seed, suites, pass })
}

pub fn default_suites() -> Vec<String> {
    DEFAULT_SUITES.iter().map(|s| s.to_string()).collect()
}
