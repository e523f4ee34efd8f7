//! Closed-form eigenvalue and heat-trace bounds: Wang's Harnack factor, the
//! CLR counting bound on positively curved manifolds, the log-Sobolev heat
//! trace estimate and its eigenvalue consequences, hyperboundedness
//! parameters, the l_p-ball comparison factor, and the heat-kernel
//! trichotomy.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model_spectra::gaussian_eigenvalue;
use crate::optimize::golden_section_max;

/// Lipschitz constant of the map from Gaussian space onto the normalised
/// l_p ball; eigenvalues compare with factor `1 / LP_BALL_LIPSCHITZ^2 = 1/392`.
pub const LP_BALL_LIPSCHITZ: f64 = 14.0 * std::f64::consts::SQRT_2;

/// Curvature lower bound and log-Sobolev data of a probability space.
///
/// The log-Sobolev inequality is normalised as
/// `Ent(f^2) <= (2 / lsob) ∫ |∇f|^2 + defect ∫ f^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureData {
    pub rho: f64,
    pub lsob: f64,
    pub defect: f64,
    /// `∫ d(x, x0)^2 dμ`
    pub m2: f64,
}

impl CurvatureData {
    pub fn new(rho: f64, lsob: f64, m2: f64) -> Result<Self> {
        Self::with_defect(rho, lsob, 0.0, m2)
    }

    pub fn with_defect(rho: f64, lsob: f64, defect: f64, m2: f64) -> Result<Self> {
        if !rho.is_finite() {
            return invalid(format!("rho must be finite, got {rho}"));
        }
        if !(lsob > 0.0 && lsob.is_finite()) {
            return invalid(format!("log-Sobolev constant must be positive, got {lsob}"));
        }
        if !(defect >= 0.0 && defect.is_finite()) {
            return invalid(format!(
                "log-Sobolev defect must be non-negative, got {defect}"
            ));
        }
        if !(m2 >= 0.0 && m2.is_finite()) {
            return invalid(format!("second moment must be non-negative, got {m2}"));
        }
        Ok(CurvatureData {
            rho,
            lsob,
            defect,
            m2,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum BoundValue {
    Finite(f64),
    Unbounded,
    /// The optimisation defining the bound ranges over an empty set.
    Empty,
}

impl BoundValue {
    pub fn finite(&self) -> Option<f64> {
        match self {
            BoundValue::Finite(v) => Some(*v),
            _ => None,
        }
    }
}

/// Named bound with every input it was computed from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub value: BoundValue,
    pub inputs: BTreeMap<String, f64>,
    /// Secondary outputs (constants, maximising times, thresholds).
    pub extras: BTreeMap<String, f64>,
    pub valid: bool,
    pub reason: Option<String>,
    pub notes: Vec<String>,
}

impl BoundReport {
    fn new(name: &str, inputs: &[(&str, f64)]) -> Self {
        BoundReport {
            name: name.to_string(),
            value: BoundValue::Empty,
            inputs: inputs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            extras: BTreeMap::new(),
            valid: true,
            reason: None,
            notes: Vec::new(),
        }
    }

    fn with_value(mut self, v: f64) -> Self {
        self.value = BoundValue::Finite(v);
        self
    }

    fn invalid(mut self, reason: impl Into<String>) -> Self {
        self.valid = false;
        self.reason = Some(reason.into());
        self
    }

    fn extra(mut self, key: &str, v: f64) -> Self {
        self.extras.insert(key.to_string(), v);
        self
    }

    /// The value when the report is valid and finite.
    pub fn finite_value(&self) -> Option<f64> {
        if self.valid {
            self.value.finite()
        } else {
            None
        }
    }
}

/// Wang's Harnack factor `h(rho, t) = 2 rho t / (exp(2 rho t) - 1)`, with
/// `h(0, t) = 1`.
pub fn harnack_factor(rho: f64, t: f64) -> f64 {
    let x = 2.0 * rho * t;
    if x.abs() < 1e-6 {
        // x / (e^x - 1) = 1 - x/2 + x^2/12 - ...
        1.0 - 0.5 * x + x * x / 12.0
    } else {
        x / x.exp_m1()
    }
}

/// `s(t) = h(rho, t/2) / (t/2)`, the Gaussian-integrability exponent
/// entering the heat-trace estimate.
pub fn trace_exponent(rho: f64, t: f64) -> f64 {
    harnack_factor(rho, 0.5 * t) / (0.5 * t)
}

/// Sobolev constant `C_{n,rho} = 4 (n - 1) / (n (n - 2) rho)`.
pub fn clr_constant(n: u32, rho: f64) -> f64 {
    let nf = n as f64;
    4.0 * (nf - 1.0) / (nf * (nf - 2.0) * rho)
}

/// Upper bound `e^{n/2} (C_{n,rho} lambda + 1)^{n/2}` on the eigenvalue
/// count of an n-manifold with `Ric >= rho g`.
pub fn clr_count_bound(n: u32, rho: f64, lambda: f64) -> Result<BoundReport> {
    if !(rho > 0.0 && rho.is_finite()) {
        return invalid(format!("rho must be positive, got {rho}"));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return invalid(format!("lambda must be positive, got {lambda}"));
    }
    let report = BoundReport::new(
        "clr-count",
        &[("n", n as f64), ("rho", rho), ("lambda", lambda)],
    );
    if n < 3 {
        return Ok(report.invalid("the Sobolev exponent 2n/(n-2) needs n >= 3"));
    }
    let c = clr_constant(n, rho);
    let half_n = 0.5 * n as f64;
    let value = (half_n * (1.0 + (c * lambda + 1.0).ln())).exp();
    Ok(report.with_value(value).extra("c_n_rho", c))
}

/// `6 (5e)^{n/2}`, rounded up: the first index covered by
/// [`clr_eigen_comparison`].
pub fn clr_comparison_threshold(n: u32) -> f64 {
    (6.0 * (5.0 * std::f64::consts::E).powf(0.5 * n as f64)).ceil()
}

/// Dimension-free comparison `lambda_k(M) >= (1 - 2/n) / (5e) * lambda_k(sphere)`,
/// valid for `k >= 6 (5e)^{n/2}`.
pub fn clr_eigen_comparison(n: u32, k: u64) -> Result<BoundReport> {
    if k == 0 {
        return invalid("k must be at least 1");
    }
    let report = BoundReport::new("clr-eigen", &[("n", n as f64), ("k", k as f64)]);
    if n < 3 {
        return Ok(report.invalid("the comparison needs n >= 3"));
    }
    let factor = (1.0 - 2.0 / n as f64) / (5.0 * std::f64::consts::E);
    let threshold = clr_comparison_threshold(n);
    let report = report.with_value(factor).extra("threshold_k", threshold);
    if (k as f64) < threshold {
        return Ok(report.invalid(format!(
            "k = {k} is below the threshold 6 (5e)^(n/2) = {threshold}"
        )));
    }
    Ok(report)
}

/// Heat-trace bound `Z(t) <= exp(2s / (1 - 2s/L) * m2)` under `CD(rho, ∞)`
/// and a log-Sobolev inequality with constant `L`, valid when
/// `s = h(rho, t/2) / (t/2) < L/2`.
pub fn z_upper_bound(curv: CurvatureData, t: f64) -> Result<BoundReport> {
    if !(t > 0.0 && t.is_finite()) {
        return invalid(format!("t must be positive, got {t}"));
    }
    let report = BoundReport::new(
        "z-upper",
        &[
            ("rho", curv.rho),
            ("lsob", curv.lsob),
            ("m2", curv.m2),
            ("t", t),
        ],
    );
    let s = trace_exponent(curv.rho, t);
    let report = report.extra("s", s);
    if !(s < 0.5 * curv.lsob) {
        return Ok(report.invalid(format!("s = {s} >= L/2 = {}", 0.5 * curv.lsob)));
    }
    let exponent = 2.0 * s / (1.0 - 2.0 * s / curv.lsob) * curv.m2;
    Ok(report.with_value(exponent.exp()))
}

/// Search bracket for the time parameter of [`eigen_lower_bound_wang`].
pub const WANG_T_RANGE: (f64, f64) = (1e-3, 1e3);
const WANG_GRID: usize = 4001;

/// `sup_t (1/t) (log k - 2s/(1 - 2s/L) m2)` over feasible `t`, a lower bound
/// for `lambda_k`. Negative optima are clamped to 0.
pub fn eigen_lower_bound_wang(curv: CurvatureData, k: u64) -> Result<BoundReport> {
    if k == 0 {
        return invalid("k must be at least 1");
    }
    let report = BoundReport::new(
        "wang",
        &[
            ("rho", curv.rho),
            ("lsob", curv.lsob),
            ("m2", curv.m2),
            ("k", k as f64),
        ],
    );
    let neg_rho = (-curv.rho).max(0.0);
    if curv.lsob <= 4.0 * neg_rho {
        return Ok(report.invalid(format!(
            "no feasible t: L = {} <= 4 (-rho)_+ = {}",
            curv.lsob,
            4.0 * neg_rho
        )));
    }
    let log_k = (k as f64).ln();
    let objective = |log_t: f64| -> f64 {
        let t = log_t.exp();
        let s = trace_exponent(curv.rho, t);
        if !(s < 0.5 * curv.lsob) {
            return f64::NEG_INFINITY;
        }
        (log_k - 2.0 * s / (1.0 - 2.0 * s / curv.lsob) * curv.m2) / t
    };
    let (lo, hi) = (WANG_T_RANGE.0.ln(), WANG_T_RANGE.1.ln());
    let step = (hi - lo) / (WANG_GRID - 1) as f64;
    let mut best = (f64::NAN, f64::NEG_INFINITY);
    for i in 0..WANG_GRID {
        let x = lo + step * i as f64;
        let v = objective(x);
        if v > best.1 {
            best = (x, v);
        }
    }
    if !best.1.is_finite() {
        return Ok(report.invalid(format!(
            "no feasible t in [{}, {}]",
            WANG_T_RANGE.0, WANG_T_RANGE.1
        )));
    }
    let x = golden_section_max(
        objective,
        (best.0 - step).max(lo),
        (best.0 + step).min(hi),
        1e-12,
    );
    let refined = objective(x);
    let (x, value) = if refined >= best.1 {
        (x, refined)
    } else {
        best
    };
    let mut report = report.extra("argmax_t", x.exp());
    if value <= 0.0 {
        report.notes.push(format!(
            "optimum {value} is not positive; clamped to 0 since eigenvalues are non-negative"
        ));
        return Ok(report.with_value(0.0));
    }
    Ok(report.with_value(value))
}

/// From `k exp(-t lambda_k) <= Z(t)`: `lambda_k >= (log k - log Z) / t`,
/// clamped at 0.
pub fn eigen_lower_from_trace(k: u64, z: f64, t: f64) -> Result<f64> {
    if k == 0 {
        return invalid("k must be at least 1");
    }
    if !(z > 0.0 && t > 0.0) {
        return invalid(format!("need Z > 0 and t > 0, got Z = {z}, t = {t}"));
    }
    Ok((((k as f64).ln() - z.ln()) / t).max(0.0))
}

/// Hyperbounded exponents at time `t`: `q = 1 + (p - 1) e^{2tL}` and
/// `beta = B (1/p - 1/q)`.
pub fn hyper_q_beta(lsob: f64, defect: f64, p: f64, t: f64) -> Result<(f64, f64)> {
    if !(lsob > 0.0) {
        return invalid(format!("L must be positive, got {lsob}"));
    }
    if !(defect >= 0.0) {
        return invalid(format!("B must be non-negative, got {defect}"));
    }
    if !(p > 1.0) {
        return invalid(format!("p must exceed 1, got {p}"));
    }
    if !(t > 0.0) {
        return invalid(format!("t must be positive, got {t}"));
    }
    let q = 1.0 + (p - 1.0) * (2.0 * t * lsob).exp();
    Ok((q, defect * (1.0 / p - 1.0 / q)))
}

/// Hyperboundedness parameters from a single time:
/// `L = (q0 - 2) / (2 q0 t0)`, `B = beta0 / (t0 L)`.
pub fn hyper_params_from_single_time(t0: f64, q0: f64, beta0: f64) -> Result<(f64, f64)> {
    if !(t0 > 0.0) {
        return invalid(format!("t0 must be positive, got {t0}"));
    }
    if !(q0 > 2.0) {
        return invalid(format!("q0 must exceed 2, got {q0}"));
    }
    if !(beta0 >= 0.0) {
        return invalid(format!("beta0 must be non-negative, got {beta0}"));
    }
    let lsob = (q0 - 2.0) / (2.0 * q0 * t0);
    Ok((lsob, beta0 / (t0 * lsob)))
}

/// `lambda_k(gamma^n) / 392`, the lower bound for Neumann eigenvalues of the
/// volume-normalised l_p ball, `p >= 2`.
pub fn lp_ball_eigen_bound(n: u32, k: u64) -> Result<f64> {
    Ok(gaussian_eigenvalue(n, k)? / (LP_BALL_LIPSCHITZ * LP_BALL_LIPSCHITZ))
}

/// Integrability regimes of the heat kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario {
    /// Never Hilbert-Schmidt.
    NeverHilbertSchmidt = 1,
    /// Eventually Hilbert-Schmidt, never hyperbounded.
    HilbertSchmidtOnly = 2,
    /// Eventually Hilbert-Schmidt and hyperbounded: `p_t ∈ L^q` for all q.
    AllIntegrability = 3,
}

impl Scenario {
    pub fn number(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrichotomyFlags {
    pub has_discrete_spectrum: bool,
    pub eventually_hilbert_schmidt: bool,
    pub eventually_hyperbounded: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub scenario: Scenario,
    pub warning: Option<String>,
}

pub fn classify_trichotomy(flags: TrichotomyFlags) -> Classification {
    let TrichotomyFlags {
        has_discrete_spectrum,
        eventually_hilbert_schmidt: hs,
        eventually_hyperbounded: hyper,
    } = flags;
    let scenario = match (hs, hyper) {
        (false, _) => Scenario::NeverHilbertSchmidt,
        (true, false) => Scenario::HilbertSchmidtOnly,
        (true, true) => Scenario::AllIntegrability,
    };
    let warning = if hs && !has_discrete_spectrum {
        Some("a Hilbert-Schmidt semigroup is compact, so the spectrum must be discrete".to_string())
    } else if hyper && !hs {
        Some(
            "hyperbounded but never Hilbert-Schmidt: no finite-dimensional example is known"
                .to_string(),
        )
    } else {
        None
    };
    Classification { scenario, warning }
}

/// Reference flags for `nu_p^n`: `p = 1` has non-discrete spectrum,
/// `1 < p < 2` is Hilbert-Schmidt without a log-Sobolev inequality, and
/// `p >= 2` (including `p = ∞`) satisfies both.
pub fn nu_p_flags(p: f64) -> Result<TrichotomyFlags> {
    if !(p >= 1.0) {
        return invalid(format!("p must be at least 1, got {p}"));
    }
    Ok(if p == 1.0 {
        TrichotomyFlags {
            has_discrete_spectrum: false,
            eventually_hilbert_schmidt: false,
            eventually_hyperbounded: false,
        }
    } else if p < 2.0 {
        TrichotomyFlags {
            has_discrete_spectrum: true,
            eventually_hilbert_schmidt: true,
            eventually_hyperbounded: false,
        }
    } else {
        TrichotomyFlags {
            has_discrete_spectrum: true,
            eventually_hilbert_schmidt: true,
            eventually_hyperbounded: true,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::heat_trace;
    use crate::model_spectra::{gaussian_heat_trace, gaussian_spectrum, ModelParams};
    use proptest::prelude::*;

    const E: f64 = std::f64::consts::E;

    #[test]
    fn harnack_examples() {
        assert_eq!(harnack_factor(0.0, 5.0), 1.0);
        assert!((harnack_factor(1.0, 1e-12) - 1.0).abs() < 1e-11);
        let h = harnack_factor(1.0, 1.0);
        assert!((h - 2.0 / (E * E - 1.0)).abs() < 1e-15);
        assert!((h - 0.3130).abs() < 1e-4);
    }

    #[test]
    fn harnack_is_continuous_at_zero() {
        let a = harnack_factor(1e-7, 1.0);
        let b = harnack_factor(2e-6, 1.0);
        let direct = |x: f64| x / x.exp_m1();
        assert!((a - direct(2e-7)).abs() < 1e-12);
        assert!((b - direct(4e-6)).abs() < 1e-12);
        assert!((harnack_factor(-1e-7, 1.0) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn clr_count_examples() {
        let r = clr_count_bound(3, 2.0, 3.0).unwrap();
        assert!((r.extras["c_n_rho"] - 4.0 / 3.0).abs() < 1e-15);
        let expected = E.powf(1.5) * 5f64.powf(1.5);
        assert!((r.finite_value().unwrap() - expected).abs() < 1e-10);
        assert!((expected - 50.10).abs() < 0.01);
        // C_{4,3} = 4*3 / (4*2*3) = 1/2
        let r = clr_count_bound(4, 3.0, 10.0).unwrap();
        assert!((r.extras["c_n_rho"] - 0.5).abs() < 1e-15);
        assert!((r.finite_value().unwrap() - E * E * 36.0).abs() < 1e-9);
        let r = clr_count_bound(2, 1.0, 1.0).unwrap();
        assert!(!r.valid && r.reason.is_some());
    }

    #[test]
    fn clr_eigen_examples() {
        let r = clr_eigen_comparison(3, 10_000).unwrap();
        assert!(r.valid);
        assert!((r.finite_value().unwrap() - (1.0 / 3.0) / (5.0 * E)).abs() < 1e-15);
        assert!((r.finite_value().unwrap() - 0.02452).abs() < 1e-5);
        assert_eq!(r.extras["threshold_k"], 301.0);
        let r = clr_eigen_comparison(3, 100).unwrap();
        assert!(!r.valid);
        let big = clr_eigen_comparison(1000, u64::MAX).unwrap();
        assert!((big.value.finite().unwrap() - 0.998 / (5.0 * E)).abs() < 1e-15);
    }

    #[test]
    fn z_upper_examples() {
        let curv = CurvatureData::new(1.0, 1.0, 1.0).unwrap();
        let r = z_upper_bound(curv, 2.0).unwrap();
        let s = 2.0 / (E * E - 1.0);
        assert!((r.extras["s"] - s).abs() < 1e-15);
        let v = r.finite_value().unwrap();
        assert!((v - (2.0 * s / (1.0 - 2.0 * s)).exp()).abs() < 1e-12);
        assert!((v.ln() - 1.674).abs() < 1e-3);
        assert!((v - 5.33).abs() < 0.01);
        let z = heat_trace(
            &gaussian_spectrum(ModelParams::new(1, 1.0).unwrap(), 50).unwrap(),
            2.0,
        )
        .unwrap()
        .value();
        assert!(v >= z);

        let r = z_upper_bound(curv, 5f64.ln()).unwrap();
        assert!(!r.valid);

        let flat = CurvatureData::new(0.0, 2.0, 0.0).unwrap();
        let r = z_upper_bound(flat, 3.0).unwrap();
        assert_eq!(r.finite_value(), Some(1.0));
    }

    #[test]
    fn wang_examples() {
        let curv = CurvatureData::new(1.0, 1.0, 1.0).unwrap();
        let r = wang_ref(curv, 100);
        let v = r.finite_value().unwrap();
        assert!((v - 1.6527).abs() < 1e-3, "{v}");
        assert!((r.extras["argmax_t"] - 2.29).abs() < 0.05);
        assert!(v <= 99.0);

        let r = wang_ref(curv, 1);
        assert_eq!(r.finite_value(), Some(0.0));
        assert!(!r.notes.is_empty());

        let bad = CurvatureData::new(-0.1, 0.3, 1.0).unwrap();
        assert!(!eigen_lower_bound_wang(bad, 10).unwrap().valid);
    }

    fn wang_ref(curv: CurvatureData, k: u64) -> BoundReport {
        eigen_lower_bound_wang(curv, k).unwrap()
    }

    #[test]
    fn wang_matches_brute_force_grid() {
        // dense independent scan of the objective in t
        let curv = CurvatureData::new(1.0, 1.0, 1.0).unwrap();
        for k in [10u64, 1000] {
            let mut best = f64::NEG_INFINITY;
            for i in 1..200_000 {
                let t = 1.62 + i as f64 * 1e-4 * 0.5;
                let s = 2.0 / (t.exp() - 1.0);
                if s < 0.5 {
                    best = best.max(((k as f64).ln() - 2.0 * s / (1.0 - 2.0 * s)) / t);
                }
            }
            let v = wang_ref(curv, k).finite_value().unwrap();
            assert!((v - best).abs() < 1e-6, "k={k}: {v} vs {best}");
        }
    }

    #[test]
    fn trace_inversion_examples() {
        assert_eq!(eigen_lower_from_trace(1, 1.0, 1.0).unwrap(), 0.0);
        let z = gaussian_heat_trace(1, 1.0, 2.0);
        let v = eigen_lower_from_trace(100, z, 2.0).unwrap();
        assert!((v - (100f64.ln() - z.ln()) / 2.0).abs() < 1e-15);
        assert!((v - 2.23).abs() < 0.01);
        assert!(eigen_lower_from_trace(0, 1.0, 1.0).is_err());
    }

    #[test]
    fn hyper_examples() {
        let (q, beta) = hyper_q_beta(1.0, 0.0, 2.0, 2f64.ln()).unwrap();
        assert!((q - 5.0).abs() < 1e-12);
        assert_eq!(beta, 0.0);
        let (q, beta) = hyper_q_beta(1.0, 3.0, 2.0, 1e-12).unwrap();
        assert!((q - 2.0).abs() < 1e-10 && beta.abs() < 1e-10);
        let (l, b) = hyper_params_from_single_time(1.0, 4.0, 0.0).unwrap();
        assert_eq!((l, b), (0.25, 0.0));
        let (l, b) = hyper_params_from_single_time(2.0, 3.0, 0.6).unwrap();
        assert!((l - 1.0 / 12.0).abs() < 1e-15);
        assert!((b - 0.6 / (2.0 / 12.0)).abs() < 1e-12);
        assert!(hyper_params_from_single_time(1.0, 2.0, 0.0).is_err());
        assert!(hyper_q_beta(1.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn lp_ball_examples() {
        assert!((LP_BALL_LIPSCHITZ.powi(2) - 392.0).abs() < 1e-10);
        assert!((lp_ball_eigen_bound(2, 4).unwrap() - 2.0 / 392.0).abs() < 1e-15);
        for n in 1..6 {
            assert_eq!(lp_ball_eigen_bound(n, 1).unwrap(), 0.0);
        }
    }

    #[test]
    fn trichotomy_reference_table() {
        assert_eq!(
            classify_trichotomy(nu_p_flags(1.0).unwrap())
                .scenario
                .number(),
            1
        );
        assert_eq!(
            classify_trichotomy(nu_p_flags(1.5).unwrap())
                .scenario
                .number(),
            2
        );
        assert_eq!(
            classify_trichotomy(nu_p_flags(2.0).unwrap())
                .scenario
                .number(),
            3
        );
        assert_eq!(
            classify_trichotomy(nu_p_flags(f64::INFINITY).unwrap())
                .scenario
                .number(),
            3
        );
        let odd = classify_trichotomy(TrichotomyFlags {
            has_discrete_spectrum: false,
            eventually_hilbert_schmidt: false,
            eventually_hyperbounded: true,
        });
        assert_eq!(odd.scenario, Scenario::NeverHilbertSchmidt);
        assert!(odd.warning.is_some());
    }

    proptest! {
        #[test]
        fn harnack_positive_and_decreasing(rho in 0.01f64..5.0, t in 0.01f64..5.0, bump in 1.01f64..3.0) {
            let h = harnack_factor(rho, t);
            prop_assert!(h > 0.0 && h <= 1.0);
            prop_assert!(harnack_factor(rho * bump, t) < h);
        }

        #[test]
        fn hyper_monotone_in_t(lsob in 0.1f64..3.0, defect in 0.0f64..3.0, p in 1.1f64..5.0, t in 0.01f64..2.0) {
            let (q1, b1) = hyper_q_beta(lsob, defect, p, t).unwrap();
            let (q2, b2) = hyper_q_beta(lsob, defect, p, t * 1.5).unwrap();
            prop_assert!(q2 > q1);
            prop_assert!(b2 >= b1);
            prop_assert_eq!(b1 == 0.0, defect == 0.0);
        }
    }
}
