//! Closed-form spectra of the model spaces: Gaussian space, the rescaled
//! round sphere, and the Weyl asymptotics of the p-exponential product
//! measures.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, ln_gamma};

use crate::discrete::PotentialGrid;
use crate::error::{invalid, Error, Result};
use crate::spectrum::{CountKind, CountingResult, ExactModel, SpectralEntry, Spectrum};

/// Slack applied when converting a real threshold to a level index, so
/// that e.g. `0.6 / 0.2` still counts level 3.
const LEVEL_SLACK: f64 = 1e-12;

/// Dimension, curvature and (optionally) exponent of a model space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: u32,
    pub rho: f64,
    pub p: Option<f64>,
}

impl ModelParams {
    pub fn new(n: u32, rho: f64) -> Result<Self> {
        if n == 0 {
            return invalid("dimension n must be at least 1");
        }
        if !(rho > 0.0 && rho.is_finite()) {
            return invalid(format!("curvature rho must be positive, got {rho}"));
        }
        Ok(ModelParams { n, rho, p: None })
    }

    pub fn with_p(self, p: f64) -> Result<Self> {
        if !(p > 1.0) {
            return invalid(format!(
                "exponent p must exceed 1 (p = 1 has non-discrete spectrum), got {p}"
            ));
        }
        Ok(ModelParams { p: Some(p), ..self })
    }
}

/// `C(n, k)` in 64-bit arithmetic, `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// `ln C(n, k)` for real arguments.
pub fn ln_binomial(n: f64, k: f64) -> f64 {
    ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0)
}

fn level_index(lambda: f64, unit: f64) -> f64 {
    (lambda / unit * (1.0 + LEVEL_SLACK)).floor()
}

// ---------------------------------------------------------------------------
// Gaussian space

/// Multiplicity of the Gaussian eigenvalue `rho * l` in dimension `n`.
pub fn gaussian_multiplicity(n: u32, l: u64) -> Option<u64> {
    binomial(n as u64 - 1 + l, l)
}

/// The first `k_max` eigenvalues (with multiplicity) of `R^n` with the
/// Gaussian measure of curvature `rho`: `rho * l`, `l = 0, 1, ...`, with
/// multiplicity `C(n - 1 + l, l)`. The last level is clipped so that the
/// multiplicities sum to `k_max`.
pub fn gaussian_spectrum(params: ModelParams, k_max: u64) -> Result<Spectrum> {
    if k_max == 0 {
        return invalid("k_max must be at least 1");
    }
    let ModelParams { n, rho, .. } = ModelParams::new(params.n, params.rho)?;
    let mut entries = Vec::new();
    let mut remaining = k_max;
    let mut note = None;
    let mut l = 0u64;
    while remaining > 0 {
        let full = gaussian_multiplicity(n, l);
        let mult = full.map_or(remaining, |m| m.min(remaining));
        if full != Some(mult) {
            note = Some(format!(
                "level {} (value {}) clipped to {} of {} eigenvalues; higher levels omitted",
                l,
                rho * l as f64,
                mult,
                full.map_or_else(|| "more than 2^64".to_string(), |m| m.to_string())
            ));
        }
        entries.push(SpectralEntry {
            value: rho * l as f64,
            mult,
        });
        remaining -= mult;
        l += 1;
    }
    if note.is_none() {
        note = Some(format!("levels from {} on omitted", rho * l as f64));
    }
    Ok(Spectrum::from_entries(entries, true, note)?.with_model(ExactModel::Gaussian { n, rho }))
}

/// Exact `#{lambda_k <= lambda}` for the Gaussian model,
/// `C(n + l, l)` with `l = floor(lambda / rho)`. Falls back to a
/// floating-point value tagged asymptotic when the count overflows 64 bits.
pub fn gaussian_count(params: ModelParams, lambda: f64) -> Result<CountingResult> {
    let ModelParams { n, rho, .. } = ModelParams::new(params.n, params.rho)?;
    if !(lambda >= 0.0) {
        return invalid(format!("lambda must be non-negative, got {lambda}"));
    }
    let l = level_index(lambda, rho);
    if l < u64::MAX as f64 / 2.0 {
        let l = l as u64;
        if let Some(c) = binomial(n as u64 + l, l) {
            return Ok(CountingResult::exact(lambda, c));
        }
    }
    Ok(CountingResult {
        lambda,
        count: ln_binomial(n as f64 + l, l).exp(),
        kind: CountKind::Asymptotic,
    })
}

/// `lambda_k` of the standard Gaussian (`rho = 1`) in dimension `n`,
/// without building the spectrum: the smallest `l` with `C(n + l, l) >= k`.
pub fn gaussian_eigenvalue(n: u32, k: u64) -> Result<f64> {
    if n == 0 || k == 0 {
        return invalid("n and k must be at least 1");
    }
    let mut l = 0u64;
    loop {
        match binomial(n as u64 + l, l) {
            Some(c) if c < k => l += 1,
            _ => return Ok(l as f64),
        }
    }
}

/// Lower bound `max(n/e k^{1/n} - n, log k / log((n+1) e))` on the k-th
/// eigenvalue of the standard Gaussian in dimension n.
pub fn gaussian_eigen_lower_bound(n: u32, k: u64) -> Result<f64> {
    if n == 0 || k == 0 {
        return invalid("n and k must be at least 1");
    }
    let nf = n as f64;
    let kf = k as f64;
    let power = nf / std::f64::consts::E * kf.powf(1.0 / nf) - nf;
    let log = kf.ln() / ((nf + 1.0).ln() + 1.0);
    Ok(power.max(log))
}

/// `(1 - exp(-rho t))^{-n}`, the full heat trace of the Gaussian model.
pub fn gaussian_heat_trace(n: u32, rho: f64, t: f64) -> f64 {
    (-(n as f64) * (-(-rho * t).exp_m1()).ln()).exp()
}

// ---------------------------------------------------------------------------
// Sphere

/// Dimension of spherical harmonics on `S^n` of degree at most `m`:
/// `C(n + m, m) + C(n + m - 1, m - 1)`.
pub fn sphere_cumulative(n: u32, m: u64) -> Option<u64> {
    let n = n as u64;
    let even = binomial(n + m, m)?;
    let odd = if m == 0 {
        0
    } else {
        binomial(n + m - 1, m - 1)?
    };
    even.checked_add(odd)
}

/// Multiplicity of degree-m harmonics, as a first difference of
/// [`sphere_cumulative`].
pub fn sphere_multiplicity(n: u32, m: u64) -> Option<u64> {
    let upto = sphere_cumulative(n, m)?;
    let below = if m == 0 {
        0
    } else {
        sphere_cumulative(n, m - 1)?
    };
    Some(upto - below)
}

/// Eigenvalue of degree-m harmonics on `S^n` rescaled to `Ric = rho g`.
pub fn sphere_eigenvalue(n: u32, rho: f64, m: u64) -> f64 {
    let m = m as f64;
    m * (m + n as f64 - 1.0) * rho / (n as f64 - 1.0)
}

/// The degree-m eigenvalue of the `Ric = g` sphere as a reduced fraction
/// `m (m + n - 1) / (n - 1)`.
pub fn sphere_eigenvalue_ratio(n: u32, m: u64) -> (u64, u64) {
    let num = m * (m + n as u64 - 1);
    let den = n as u64 - 1;
    let g = gcd(num, den);
    (num / g, den / g)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

fn check_sphere(params: ModelParams) -> Result<ModelParams> {
    let params = ModelParams::new(params.n, params.rho)?;
    if params.n < 2 {
        return invalid("the sphere model needs n >= 2");
    }
    Ok(params)
}

/// The first `k_max` eigenvalues of `S^n` rescaled to `Ric = rho g`:
/// `m (m + n - 1) rho / (n - 1)` with harmonic multiplicities.
pub fn sphere_spectrum(params: ModelParams, k_max: u64) -> Result<Spectrum> {
    if k_max == 0 {
        return invalid("k_max must be at least 1");
    }
    let ModelParams { n, rho, .. } = check_sphere(params)?;
    let mut entries = Vec::new();
    let mut remaining = k_max;
    let mut note = None;
    let mut m = 0u64;
    while remaining > 0 {
        let full = sphere_multiplicity(n, m);
        let mult = full.map_or(remaining, |c| c.min(remaining));
        if full != Some(mult) {
            note = Some(format!(
                "degree {m} clipped to {mult} eigenvalues; higher degrees omitted"
            ));
        }
        entries.push(SpectralEntry {
            value: sphere_eigenvalue(n, rho, m),
            mult,
        });
        remaining -= mult;
        m += 1;
    }
    if note.is_none() {
        note = Some(format!("degrees from {m} on omitted"));
    }
    Ok(Spectrum::from_entries(entries, true, note)?.with_model(ExactModel::Sphere { n, rho }))
}

/// Largest degree whose eigenvalue does not exceed `lambda`.
fn sphere_top_degree(n: u32, rho: f64, lambda: f64) -> u64 {
    // m (m + n - 1) <= c
    let c = lambda * (n as f64 - 1.0) / rho * (1.0 + LEVEL_SLACK);
    let b = n as f64 - 1.0;
    let mut m = ((-b + (b * b + 4.0 * c).sqrt()) / 2.0).floor().max(0.0) as u64;
    let fits = |m: u64| (m as f64) * (m as f64 + b) <= c;
    while m > 0 && !fits(m) {
        m -= 1;
    }
    while fits(m + 1) {
        m += 1;
    }
    m
}

/// Exact `#{lambda_k <= lambda}` on the rescaled sphere.
pub fn sphere_count(params: ModelParams, lambda: f64) -> Result<CountingResult> {
    let ModelParams { n, rho, .. } = check_sphere(params)?;
    if !(lambda >= 0.0) {
        return invalid(format!("lambda must be non-negative, got {lambda}"));
    }
    let m = sphere_top_degree(n, rho, lambda);
    match sphere_cumulative(n, m) {
        Some(c) => Ok(CountingResult::exact(lambda, c)),
        None => {
            let mf = m as f64;
            let nf = n as f64;
            let approx =
                ln_binomial(nf + mf, mf).exp() + ln_binomial(nf + mf - 1.0, mf - 1.0).exp();
            Ok(CountingResult {
                lambda,
                count: approx,
                kind: CountKind::Asymptotic,
            })
        }
    }
}

/// `(sqrt(lambda) / n)^n`, a lower bound for the counting function of the
/// unscaled unit sphere `S^n`, valid for `lambda >= n^2`.
pub fn sphere_count_lower(n: u32, lambda: f64) -> Result<CountingResult> {
    if n == 0 {
        return invalid("dimension n must be at least 1");
    }
    let nf = n as f64;
    if !(lambda >= nf * nf) {
        return invalid(format!(
            "the lower bound needs lambda >= n^2 = {}, got {lambda}",
            nf * nf
        ));
    }
    Ok(CountingResult {
        lambda,
        count: (lambda.sqrt() / nf).powf(nf),
        kind: CountKind::LowerBound,
    })
}

/// Full heat trace of the rescaled sphere, summed until the terms are
/// negligible.
pub fn sphere_heat_trace(n: u32, rho: f64, t: f64) -> f64 {
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    for m in 0u64..10_000_000 {
        let mult = match sphere_multiplicity(n, m) {
            Some(c) => c as f64,
            None => {
                let (mf, nf) = (m as f64, n as f64);
                (ln_binomial(nf + mf, mf).exp() - ln_binomial(nf + mf - 2.0, mf - 2.0).exp())
                    .max(0.0)
            }
        };
        let term = mult * (-t * sphere_eigenvalue(n, rho, m)).exp();
        sum += term;
        if term < prev && term <= 1e-18 * sum {
            break;
        }
        prev = term;
    }
    sum
}

impl ExactModel {
    /// `sum_k exp(-t lambda_k)` over the complete spectrum.
    pub fn full_heat_trace(&self, t: f64) -> f64 {
        match *self {
            ExactModel::Gaussian { n, rho } => gaussian_heat_trace(n, rho, t),
            ExactModel::Sphere { n, rho } => sphere_heat_trace(n, rho, t),
        }
    }
}

// ---------------------------------------------------------------------------
// Weyl asymptotics

/// `Gamma(x)`, by finite products at integer and half-integer arguments
/// (where library approximations lose a few ulp), statrs elsewhere.
fn gamma_exactish(x: f64) -> f64 {
    let twice = 2.0 * x;
    if x > 0.0 && x <= 171.0 && twice.fract() == 0.0 {
        let (mut acc, mut y) = if twice as u64 % 2 == 0 {
            (1.0, 1.0)
        } else {
            (std::f64::consts::PI.sqrt(), 0.5)
        };
        while y + 0.5 < x {
            acc *= y;
            y += 1.0;
        }
        return acc;
    }
    gamma(x)
}

/// Leading coefficient `c` and exponent `a` in `#{lambda_k <= lambda} ~ c lambda^a`
/// for the product measure `nu_p^n`.
pub fn nu_p_weyl_coefficient(n: u32, p: f64) -> Result<(f64, f64)> {
    if n == 0 {
        return invalid("dimension n must be at least 1");
    }
    if !(p > 1.0 && p.is_finite()) {
        return invalid(format!(
            "exponent p must exceed 1 (p = 1 has non-discrete spectrum), got {p}"
        ));
    }
    let nf = n as f64;
    let q = p / (p - 1.0);
    let a = 1.0 / (2.0 * (p - 1.0)) + 1.0;
    let b = 0.5 * nf * q + 1.0;
    // direct form while the Gamma values stay finite, log form beyond
    let base = (1.0 / (p - 1.0)).exp2() * gamma_exactish(a) / std::f64::consts::PI.sqrt();
    let direct = base.powi(n as i32) / gamma_exactish(b);
    if direct.is_finite() && direct > 0.0 {
        return Ok((direct, 0.5 * nf * q));
    }
    let ln_c = nf / (p - 1.0) * std::f64::consts::LN_2 + nf * ln_gamma(a)
        - 0.5 * nf * std::f64::consts::PI.ln()
        - ln_gamma(b);
    Ok((ln_c.exp(), 0.5 * nf * q))
}

/// Leading-order Weyl count for `nu_p^n`; never rounded.
pub fn nu_p_weyl_count(params: ModelParams, lambda: f64) -> Result<CountingResult> {
    let p = params
        .p
        .ok_or_else(|| Error::InvalidParameter("the nu_p model needs an exponent p".into()))?;
    ModelParams::new(params.n, params.rho)?;
    if !(lambda > 0.0) {
        return invalid(format!("lambda must be positive, got {lambda}"));
    }
    let (c, a) = nu_p_weyl_coefficient(params.n, p)?;
    Ok(CountingResult {
        lambda,
        count: c * lambda.powf(a),
        kind: CountKind::Asymptotic,
    })
}

/// Relative margin the grid must leave around `{W < lambda}` on each side.
pub const PHASE_VOLUME_MARGIN: f64 = 0.05;

/// One-dimensional Weyl count `(1/pi) ∫ sqrt((lambda - W)_+) dx` by the
/// trapezoid rule, for a potential on the whole line. The grid must
/// enclose `{W < lambda}` with a margin of at least 5% of its width on each
/// side.
pub fn weyl_phase_volume_1d(w: &PotentialGrid, lambda: f64) -> Result<f64> {
    let grid = w.grid();
    let values = w.values();
    let inside: Vec<usize> = (0..values.len()).filter(|&i| values[i] < lambda).collect();
    let (Some(&first), Some(&last)) = (inside.first(), inside.last()) else {
        return Ok(0.0);
    };
    let x_first = grid.node(first);
    let x_last = grid.node(last);
    let width = (x_last - x_first).max(grid.h());
    let margin = PHASE_VOLUME_MARGIN * width;
    if first == 0
        || last + 1 == values.len()
        || x_first - grid.a() < margin
        || grid.b() - x_last < margin
    {
        return Err(Error::SublevelTouchesBoundary { lambda });
    }
    // endpoints of the trapezoid contribute zero since W >= lambda there
    let sum: f64 = values.iter().map(|&v| (lambda - v).max(0.0).sqrt()).sum();
    Ok(sum * grid.h() / std::f64::consts::PI)
}

/// As [`weyl_phase_volume_1d`] but for a hard-walled interval `[a, b]`: the
/// whole grid is the domain, the integrand is extended flat from the
/// outermost nodes to the endpoints, and no margin is required.
pub fn weyl_phase_volume_interval(w: &PotentialGrid, lambda: f64) -> f64 {
    let values = w.values();
    let g: Vec<f64> = values
        .iter()
        .map(|&v| (lambda - v).max(0.0).sqrt())
        .collect();
    let interior: f64 = g.iter().sum();
    let ends = 0.5 * (g[0] + g[g.len() - 1]);
    (interior + ends) * w.grid().h() / std::f64::consts::PI
}
