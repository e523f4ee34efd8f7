//! Numerical checks of eigenvalue comparison under Lipschitz maps, the
//! sphere/Gaussian counterexample and the sphere heat-trace comparison.

use serde::Serialize;

use crate::discrete::{
    heat_trace, solve_weighted_neumann, Grid1D, DEFAULT_GRID_N, ZERO_EIGENVALUE_CUTOFF,
};
use crate::error::{invalid, Result};
use crate::measure::{MeasureSpec1D, SOLVER_TAIL_RATIO};
use crate::model_spectra::{gaussian_spectrum, sphere_heat_trace, sphere_spectrum, ModelParams};
use crate::spectrum::Spectrum;
use crate::transport::{lipschitz_constant, Direction, Lipschitz};

/// Relative slack absorbing finite-difference error in solver comparisons.
pub const DEFAULT_TOLERANCE: f64 = 5e-3;
pub const DEFAULT_K_MAX: usize = 20;

/// One checked inequality. For eigenvalue orderings `k` is the eigenvalue
/// index; for trace checks it is the 1-based position in the time grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub k: u64,
    pub lhs: f64,
    pub rhs: f64,
    /// Signed slack of the inequality; negative means it fails before
    /// tolerance is applied.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub k_checked: u64,
    /// Every checked row, violations included.
    pub rows: Vec<Violation>,
    pub violations: Vec<Violation>,
    pub passed: bool,
    pub tolerance: f64,
    pub lipschitz: Option<Lipschitz>,
    pub warnings: Vec<String>,
}

impl ComparisonReport {
    fn from_rows(rows: Vec<Violation>, violations: Vec<Violation>, tolerance: f64) -> Self {
        ComparisonReport {
            k_checked: rows.len() as u64,
            passed: violations.is_empty(),
            rows,
            violations,
            tolerance,
            lipschitz: None,
            warnings: Vec::new(),
        }
    }

    /// Largest `|margin| / rhs` over the checked rows.
    pub fn max_relative_gap(&self) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.rhs.abs() > ZERO_EIGENVALUE_CUTOFF)
            .map(|r| (r.margin / r.rhs).abs())
            .fold(0.0, f64::max)
    }
}

/// Solver settings for [`check_contraction_ordering_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub grid_n: usize,
    pub tail_ratio: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            grid_n: DEFAULT_GRID_N,
            tail_ratio: SOLVER_TAIL_RATIO,
        }
    }
}

fn check_tolerance(tol: f64) -> Result<()> {
    if !(0.0..1.0).contains(&tol) {
        return invalid(format!("tolerance must lie in [0, 1), got {tol}"));
    }
    Ok(())
}

fn check_lipschitz(l: f64) -> Result<()> {
    if !(l > 0.0 && l.is_finite()) {
        return invalid(format!(
            "Lipschitz constant must be positive and finite, got {l}"
        ));
    }
    Ok(())
}

/// Checks `lambda_k(s2) >= lambda_k(s1) / L^2 * (1 - tol)` for `k = 1..=k_max`.
pub fn check_ordering_spectra(
    s1: &Spectrum,
    s2: &Spectrum,
    l: f64,
    k_max: u64,
    tol: f64,
) -> Result<ComparisonReport> {
    check_lipschitz(l)?;
    check_tolerance(tol)?;
    if k_max == 0 {
        return invalid("k_max must be at least 1");
    }
    let available = s1.k_max().min(s2.k_max());
    if k_max > available {
        return Err(crate::error::Error::TooManyEigenvalues {
            requested: k_max as usize,
            available: available as usize,
        });
    }
    let inv_l2 = 1.0 / (l * l);
    let mut rows = Vec::with_capacity(k_max as usize);
    let mut violations = Vec::new();
    for (k, (a, b)) in s1
        .values()
        .zip(s2.values())
        .take(k_max as usize)
        .enumerate()
    {
        let rhs = a * inv_l2;
        let row = Violation {
            k: k as u64 + 1,
            lhs: b,
            rhs,
            margin: b - rhs,
        };
        if b < rhs * (1.0 - tol) - ZERO_EIGENVALUE_CUTOFF {
            violations.push(row);
        }
        rows.push(row);
    }
    Ok(ComparisonReport::from_rows(rows, violations, tol))
}

fn neumann(spec: &MeasureSpec1D, k_max: usize, cfg: SolverConfig) -> Result<Spectrum> {
    let (a, b) = spec.truncation(cfg.tail_ratio)?;
    let grid = Grid1D::new(a, b, cfg.grid_n)?;
    solve_weighted_neumann(spec, &grid, k_max)
}

/// Contraction-principle check between two one-dimensional measures, each
/// solved with the weighted Neumann scheme on its own truncation interval.
pub fn check_contraction_ordering(
    spec1: &MeasureSpec1D,
    spec2: &MeasureSpec1D,
    l: f64,
    k_max: usize,
    tol: f64,
) -> Result<ComparisonReport> {
    check_contraction_ordering_with(spec1, spec2, l, k_max, tol, SolverConfig::default())
}

pub fn check_contraction_ordering_with(
    spec1: &MeasureSpec1D,
    spec2: &MeasureSpec1D,
    l: f64,
    k_max: usize,
    tol: f64,
    cfg: SolverConfig,
) -> Result<ComparisonReport> {
    check_lipschitz(l)?;
    check_tolerance(tol)?;
    let (s1, s2) = rayon::join(|| neumann(spec1, k_max, cfg), || neumann(spec2, k_max, cfg));
    let mut report = check_ordering_spectra(&s1?, &s2?, l, k_max as u64, tol)?;
    if k_max * 100 > cfg.grid_n {
        report.warnings.push(format!(
            "k_max = {k_max} exceeds N/100 = {}; high eigenvalues lose accuracy",
            cfg.grid_n / 100
        ));
    }
    Ok(report)
}

/// Profile-derived Lipschitz constant of the increasing map from `spec1`
/// to `spec2`, followed by the contraction check. An unbounded constant
/// makes no finite claim, so the report passes vacuously with a warning.
pub fn check_profile_ordering(
    spec1: &MeasureSpec1D,
    spec2: &MeasureSpec1D,
    k_max: usize,
    tol: f64,
) -> Result<ComparisonReport> {
    check_profile_ordering_with(spec1, spec2, k_max, tol, SolverConfig::default())
}

pub fn check_profile_ordering_with(
    spec1: &MeasureSpec1D,
    spec2: &MeasureSpec1D,
    k_max: usize,
    tol: f64,
    cfg: SolverConfig,
) -> Result<ComparisonReport> {
    check_tolerance(tol)?;
    let lip = lipschitz_constant(spec1, spec2, Direction::Increasing)?;
    match lip {
        Lipschitz::Finite { value, .. } => {
            let mut report = check_contraction_ordering_with(spec1, spec2, value, k_max, tol, cfg)?;
            report.lipschitz = Some(lip);
            Ok(report)
        }
        Lipschitz::Unbounded { endpoint } => {
            let mut report = ComparisonReport::from_rows(Vec::new(), Vec::new(), tol);
            report.lipschitz = Some(lip);
            report.warnings.push(format!(
                "profile ratio {} -> {} is unbounded toward the {endpoint:?} end; no finite Lipschitz claim, ordering not checked",
                spec1.label(),
                spec2.label()
            ));
            Ok(report)
        }
    }
}

/// `(lambda_{n+2}(S^n), lambda_{n+2}(gamma^n))` at unit curvature, i.e.
/// `(n / (n - 1), 2)`.
pub fn sphere_gaussian_counterexample(n: u32) -> Result<(f64, f64)> {
    if n < 3 {
        return invalid(format!("the counterexample needs n >= 3, got {n}"));
    }
    let params = ModelParams::new(n, 1.0)?;
    let k = n as u64 + 2;
    let sphere = sphere_spectrum(params, k)?
        .lambda(k)
        .expect("spectrum holds k entries");
    let gauss = gaussian_spectrum(params, k)?
        .lambda(k)
        .expect("spectrum holds k entries");
    assert!(
        sphere < gauss,
        "sphere eigenvalue {sphere} not below Gaussian {gauss}"
    );
    Ok((sphere, gauss))
}

/// Checks `Σ exp(-t lambda_k(M)) <= Σ exp(-t lambda_k(S^n))` at each `t`,
/// with the sphere of Ricci curvature `rho`. Without a candidate, the
/// sphere's own spectrum is compared against the closed-form sum.
pub fn berard_gallot_trace_check(
    n: u32,
    rho: f64,
    t_grid: &[f64],
    candidate: Option<&Spectrum>,
    tol: f64,
) -> Result<ComparisonReport> {
    if n < 2 {
        return invalid(format!("sphere dimension must be at least 2, got {n}"));
    }
    check_tolerance(tol)?;
    if t_grid.is_empty() {
        return invalid("time grid is empty");
    }
    let params = ModelParams::new(n, rho)?;
    let own;
    let m = match candidate {
        Some(s) => s,
        None => {
            own = sphere_spectrum(params, 200)?;
            &own
        }
    };
    let mut rows = Vec::with_capacity(t_grid.len());
    let mut violations = Vec::new();
    let mut warnings = Vec::new();
    for (i, &t) in t_grid.iter().enumerate() {
        let z = heat_trace(m, t)?;
        if z.is_lower_estimate() && i == 0 {
            warnings.push(
                "candidate spectrum is truncated; its heat trace is a partial sum".to_string(),
            );
        }
        let lhs = z.value();
        let rhs = sphere_heat_trace(n, rho, t);
        let row = Violation {
            k: i as u64 + 1,
            lhs,
            rhs,
            margin: rhs - lhs,
        };
        if lhs > rhs * (1.0 + tol) {
            violations.push(row);
        }
        rows.push(row);
    }
    let mut report = ComparisonReport::from_rows(rows, violations, tol);
    report.warnings = warnings;
    Ok(report)
}
