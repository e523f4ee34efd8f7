//! Finite-difference eigenvalues of the 1-D weighted Laplacian
//! `-f'' + V' f'` and heat traces of spectra.
//!
//! Two independent discretisations are provided. The Schrödinger route
//! conjugates by `exp(-V/2)` to `-f'' + W f` with
//! `W = V'^2 / 4 - V'' / 2` and imposes Dirichlet conditions; the weighted
//! route discretises the Rayleigh quotient `∫ f'^2 dμ / ∫ f^2 dμ` directly
//! with natural boundary conditions, which keeps constants in the kernel.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::measure::{Family, MeasureSpec1D, SOLVER_TAIL_RATIO};
use crate::spectrum::Spectrum;
use crate::sturm::{SymTridiagonal, BISECTION_TOL};

/// Default number of interior grid nodes.
pub const DEFAULT_GRID_N: usize = 4000;

/// A Dirichlet solve is flagged as truncated unless `W` at both outermost
/// nodes exceeds the largest returned eigenvalue by this much.
pub const CONFINEMENT_MARGIN: f64 = 10.0;

/// Weighted-route eigenvalues below this are reported as exactly zero.
pub const ZERO_EIGENVALUE_CUTOFF: f64 = 1e-9;

/// Uniform grid of `n` interior nodes `a + (i + 1) h` on `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid1D {
    a: f64,
    b: f64,
    n: usize,
    h: f64,
}

impl Grid1D {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return invalid(format!("grid needs finite a < b, got [{a}, {b}]"));
        }
        if n < 3 {
            return invalid(format!("grid needs at least 3 interior nodes, got {n}"));
        }
        Ok(Grid1D {
            a,
            b,
            n,
            h: (b - a) / (n + 1) as f64,
        })
    }

    /// Symmetric-truncation grid for `spec`: the interval where the density
    /// is at least `SOLVER_TAIL_RATIO` times its maximum.
    pub fn for_measure(spec: &MeasureSpec1D, n: usize) -> Result<Self> {
        let (a, b) = spec.truncation(SOLVER_TAIL_RATIO)?;
        Grid1D::new(a, b, n)
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Interior node `i` (0-based).
    pub fn node(&self, i: usize) -> f64 {
        self.a + (i + 1) as f64 * self.h
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.node(i))
    }
}

/// Potential sampled at the interior nodes of a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialGrid {
    grid: Grid1D,
    values: Vec<f64>,
}

impl PotentialGrid {
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return invalid(format!(
                "potential has {} values for {} nodes",
                values.len(),
                grid.n()
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinitePotential { x: grid.node(i) });
        }
        Ok(PotentialGrid { grid, values })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// `W = V'^2 / 4 - V'' / 2` at the interior nodes.
///
/// For the p-exponential family with `p < 2`, `V''` blows up at the origin;
/// a node landing there is moved by half a step.
pub fn h_transform_potential(spec: &MeasureSpec1D, grid: &Grid1D) -> Result<PotentialGrid> {
    let singular_origin = matches!(spec.family(), Family::ExpPower { p } if *p < 2.0);
    let values = grid
        .nodes()
        .map(|x| {
            let x = if singular_origin && x.abs() < 1e-9 * grid.h() {
                0.5 * grid.h()
            } else {
                x
            };
            let d1 = spec.potential_d1(x);
            let w = 0.25 * d1 * d1 - 0.5 * spec.potential_d2(x);
            if w.is_finite() {
                Ok(w)
            } else {
                Err(Error::NonFinitePotential { x })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    PotentialGrid::new(*grid, values)
}

/// Lowest `k_max` eigenvalues of `-f'' + W f` with Dirichlet conditions on
/// the grid ends (three-point Laplacian, Sturm bisection).
pub fn solve_schrodinger_dirichlet(w: &PotentialGrid, k_max: usize) -> Result<Spectrum> {
    let grid = w.grid();
    check_k(k_max, grid.n())?;
    let inv_h2 = 1.0 / (grid.h() * grid.h());
    let diag = w.values().iter().map(|v| 2.0 * inv_h2 + v).collect();
    let off = vec![-inv_h2; grid.n() - 1];
    let t = SymTridiagonal::new(diag, off)?;
    let values = t.smallest_eigenvalues(k_max, BISECTION_TOL)?;
    let top = values.last().copied().unwrap_or(0.0);
    let edge = w.values()[0].min(w.values()[grid.n() - 1]);
    let note = (edge < top + CONFINEMENT_MARGIN).then(|| {
        format!(
            "W at the grid ends ({edge:.4}) is within {CONFINEMENT_MARGIN} of the largest \
             eigenvalue ({top:.4}); domain truncation may bias the result"
        )
    });
    Spectrum::from_discrete(values, note)
}

/// Lowest `k_max` eigenvalues of the weighted Laplacian from the
/// finite-difference Rayleigh quotient
/// `Σ w_{i+1/2} (f_{i+1} - f_i)^2 / h^2  /  Σ w_i f_i^2`
/// with `w = exp(-V)`, natural boundary conditions.
pub fn solve_weighted_neumann(
    spec: &MeasureSpec1D,
    grid: &Grid1D,
    k_max: usize,
) -> Result<Spectrum> {
    check_k(k_max, grid.n())?;
    let n = grid.n();
    let h = grid.h();
    let log_w: Vec<f64> = grid.nodes().map(|x| spec.log_density(x)).collect();
    if log_w.iter().all(|lw| lw.exp() == 0.0) {
        return Err(Error::WeightUnderflow {
            a: grid.a(),
            b: grid.b(),
        });
    }
    if let Some(i) = log_w
        .iter()
        .position(|lw| lw.is_nan() || *lw == f64::INFINITY)
    {
        return Err(Error::NonFinitePotential { x: grid.node(i) });
    }
    let log_half: Vec<f64> = (0..n - 1)
        .map(|i| spec.log_density(grid.node(i) + 0.5 * h))
        .collect();
    // symmetrised M^{-1/2} K M^{-1/2}, with weight ratios formed in log space
    let inv_h2 = 1.0 / (h * h);
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n - 1];
    for i in 0..n {
        let mut d = 0.0;
        if i > 0 {
            d += (log_half[i - 1] - log_w[i]).exp();
        }
        if i + 1 < n {
            d += (log_half[i] - log_w[i]).exp();
        }
        diag[i] = d * inv_h2;
        if i + 1 < n {
            off[i] = -(log_half[i] - 0.5 * (log_w[i] + log_w[i + 1])).exp() * inv_h2;
        }
    }
    if diag.iter().chain(off.iter()).any(|v| !v.is_finite()) {
        return Err(Error::WeightUnderflow {
            a: grid.a(),
            b: grid.b(),
        });
    }
    let t = SymTridiagonal::new(diag, off)?;
    let mut values = t.smallest_eigenvalues(k_max, BISECTION_TOL)?;
    if let Some(first) = values.first_mut() {
        if first.abs() < ZERO_EIGENVALUE_CUTOFF {
            *first = 0.0;
        }
    }
    Spectrum::from_discrete(values, None)
}

fn check_k(k_max: usize, n: usize) -> Result<()> {
    if k_max == 0 {
        return invalid("k_max must be at least 1");
    }
    if k_max > n {
        return Err(Error::TooManyEigenvalues {
            requested: k_max,
            available: n,
        });
    }
    Ok(())
}

/// Sturm count: number of eigenvalues of the Dirichlet Schrödinger matrix
/// strictly below `lambda`.
pub fn schrodinger_count_below(w: &PotentialGrid, lambda: f64) -> Result<usize> {
    let grid = w.grid();
    let inv_h2 = 1.0 / (grid.h() * grid.h());
    let t = SymTridiagonal::new(
        w.values().iter().map(|v| 2.0 * inv_h2 + v).collect(),
        vec![-inv_h2; grid.n() - 1],
    )?;
    Ok(t.count_below(lambda))
}

/// Value of `Z(t) = Σ exp(-t λ_k)` over a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeatTrace {
    pub t: f64,
    /// Sum over the represented eigenvalues.
    pub partial: f64,
    /// Contribution of the omitted eigenvalues, when the spectrum comes from
    /// a closed-form model.
    pub tail: Option<f64>,
}

impl HeatTrace {
    /// Best available value: partial sum plus tail when known.
    pub fn value(&self) -> f64 {
        self.partial + self.tail.unwrap_or(0.0)
    }

    /// True when the value is only a truncated lower estimate.
    pub fn is_lower_estimate(&self) -> bool {
        self.tail.is_none()
    }
}

/// Heat trace of a spectrum at time `t > 0`. For exact model spectra the
/// omitted tail is recovered from the closed form.
pub fn heat_trace(spectrum: &Spectrum, t: f64) -> Result<HeatTrace> {
    if !(t > 0.0 && t.is_finite()) {
        return invalid(format!("heat trace needs t > 0, got {t}"));
    }
    if spectrum.is_empty() {
        return invalid("heat trace of an empty spectrum");
    }
    let partial: f64 = spectrum
        .entries()
        .iter()
        .map(|e| e.mult as f64 * (-t * e.value).exp())
        .sum();
    let tail = spectrum
        .model()
        .map(|m| (m.full_heat_trace(t) - partial).max(0.0));
    Ok(HeatTrace { t, partial, tail })
}
