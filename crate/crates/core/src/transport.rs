//! Distribution functions, quantiles, flat isoperimetric profiles and the
//! monotone transport map between two measures on the line.
//!
//! The increasing map pushing `μ1` onto `μ2` is `T = F2^{-1} ∘ F1`, and
//! differentiating `F2(T(x)) = F1(x)` gives
//! `T'(x) = I1(v) / I2(v)` with `v = F1(x)` and `I = f ∘ F^{-1}`. Its best
//! Lipschitz constant is therefore `sup_v I1(v) / I2(v)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{MeasureSpec1D, CDF_TAIL_RATIO};
use crate::optimize::golden_section_max;
use crate::quadrature::{integrate_with_breaks, Tolerance};

const CDF_TOL: Tolerance = Tolerance {
    abs: 1e-15,
    rel: 1e-12,
};

/// Quantile results must satisfy `|F(x) - v| < QUANTILE_RESIDUAL`.
pub const QUANTILE_RESIDUAL: f64 = 1e-11;

/// Number of Chebyshev-clustered levels sampled by [`lipschitz_constant`].
pub const LIPSCHITZ_SAMPLES: usize = 4096;

/// Probes per endpoint used for the divergence check.
const DECADE_PROBES: usize = 16;

/// Minimum relative growth over the last sampled decade for a ratio to be
/// declared divergent.
const DIVERGENCE_GROWTH: f64 = 1e-3;

/// Lower and upper tail masses at a point, each computed directly by
/// quadrature from the nearer end so both are accurate in relative terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailPair {
    /// `F(x) = μ((-∞, x])`
    pub lower: f64,
    /// `1 - F(x)`
    pub upper: f64,
}

fn interval(spec: &MeasureSpec1D) -> Result<(f64, f64)> {
    spec.truncation(CDF_TAIL_RATIO)
}

fn mass(spec: &MeasureSpec1D, a: f64, b: f64) -> Result<f64> {
    let q = integrate_with_breaks(|x| spec.density(x), a, b, &spec.breakpoints(), CDF_TOL)?;
    Ok(q.value.max(0.0))
}

/// Tail masses on both sides of `x`.
pub fn tails(spec: &MeasureSpec1D, x: f64) -> Result<TailPair> {
    if x.is_nan() {
        return Err(Error::InvalidParameter("cdf evaluated at NaN".into()));
    }
    let (lo, hi) = interval(spec)?;
    if x <= lo {
        return Ok(TailPair {
            lower: 0.0,
            upper: 1.0,
        });
    }
    if x >= hi {
        return Ok(TailPair {
            lower: 1.0,
            upper: 0.0,
        });
    }
    let c = spec.center();
    if x <= c {
        let lower = mass(spec, lo, x)?.min(1.0);
        Ok(TailPair {
            lower,
            upper: 1.0 - lower,
        })
    } else {
        let upper = mass(spec, x, hi)?.min(1.0);
        Ok(TailPair {
            lower: 1.0 - upper,
            upper,
        })
    }
}

/// `F(x) = μ((-∞, x])`, clamped to `[0, 1]`.
pub fn cdf(spec: &MeasureSpec1D, x: f64) -> Result<f64> {
    Ok(tails(spec, x)?.lower.clamp(0.0, 1.0))
}

/// Solves `F(x) = v` for `v <= 1/2` or `1 - F(x) = 1 - v` otherwise, by
/// safeguarded Newton iteration inside a shrinking bracket.
fn solve_level(spec: &MeasureSpec1D, lower_side: bool, target: f64) -> Result<f64> {
    let (mut a, mut b) = interval(spec)?;
    // residual r(x) is increasing in x on both sides after orienting
    let residual = |x: f64| -> Result<f64> {
        let t = tails(spec, x)?;
        Ok(if lower_side {
            t.lower - target
        } else {
            target - t.upper
        })
    };
    let mut x = spec.center();
    if x <= a || x >= b {
        x = 0.5 * (a + b);
    }
    for _ in 0..200 {
        let r = residual(x)?;
        if r == 0.0 {
            return Ok(x);
        }
        if r > 0.0 {
            b = x;
        } else {
            a = x;
        }
        let f = spec.density(x);
        let newton = x - r / f;
        let step_ok = f > 0.0 && newton > a && newton < b;
        let next = if step_ok { newton } else { 0.5 * (a + b) };
        let scale = 1.0f64.max(x.abs());
        if (next - x).abs() <= 1e-15 * scale || b - a <= 1e-15 * scale {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

/// The `x` with `F(x) = v`, for `v` in `(0, 1)`.
pub fn quantile(spec: &MeasureSpec1D, v: f64) -> Result<f64> {
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::LevelOutOfRange(v));
    }
    quantile_of_tails(
        spec,
        TailPair {
            lower: v,
            upper: 1.0 - v,
        },
    )
}

/// Quantile addressed by whichever tail mass is smaller, which keeps full
/// relative precision deep in either tail.
pub fn quantile_of_tails(spec: &MeasureSpec1D, level: TailPair) -> Result<f64> {
    let x = if level.lower <= level.upper {
        if !(level.lower > 0.0) {
            return Err(Error::LevelOutOfRange(level.lower));
        }
        solve_level(spec, true, level.lower)?
    } else {
        if !(level.upper > 0.0) {
            return Err(Error::LevelOutOfRange(1.0 - level.upper));
        }
        solve_level(spec, false, level.upper)?
    };
    let got = tails(spec, x)?;
    let residual = if level.lower <= level.upper {
        (got.lower - level.lower).abs()
    } else {
        (got.upper - level.upper).abs()
    };
    if residual >= QUANTILE_RESIDUAL {
        return Err(Error::InvalidParameter(format!(
            "quantile residual {residual:e} exceeds {QUANTILE_RESIDUAL:e}"
        )));
    }
    Ok(x)
}

/// `I(v) = f(F^{-1}(v))`.
pub fn flat_profile(spec: &MeasureSpec1D, v: f64) -> Result<f64> {
    Ok(spec.density(quantile(spec, v)?))
}

/// Flat isoperimetric profile of a measure as an evaluable function.
#[derive(Debug, Clone)]
pub struct Profile {
    spec: MeasureSpec1D,
}

impl Profile {
    pub fn new(spec: MeasureSpec1D) -> Self {
        Profile { spec }
    }

    pub fn spec(&self) -> &MeasureSpec1D {
        &self.spec
    }

    pub fn eval(&self, v: f64) -> Result<f64> {
        flat_profile(&self.spec, v)
    }

    fn eval_tails(&self, level: TailPair) -> Result<f64> {
        Ok(self.spec.density(quantile_of_tails(&self.spec, level)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Increasing,
    Decreasing,
}

impl Direction {
    fn target_level(self, level: TailPair) -> TailPair {
        match self {
            Direction::Increasing => level,
            Direction::Decreasing => TailPair {
                lower: level.upper,
                upper: level.lower,
            },
        }
    }
}

/// `T(x)`: `F2^{-1}(F1(x))` for the increasing map, `F2^{-1}(1 - F1(x))` for
/// the decreasing one.
pub fn monotone_map(
    source: &MeasureSpec1D,
    target: &MeasureSpec1D,
    x: f64,
    direction: Direction,
) -> Result<f64> {
    let level = tails(source, x)?;
    quantile_of_tails(target, direction.target_level(level))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Endpoint {
    Left,
    Right,
}

/// Best Lipschitz constant of a monotone map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Lipschitz {
    Finite {
        value: f64,
        argmax_level: f64,
    },
    /// The profile ratio grows without bound toward an end of `(0, 1)`.
    Unbounded {
        endpoint: Endpoint,
    },
}

impl Lipschitz {
    pub fn value(&self) -> Option<f64> {
        match self {
            Lipschitz::Finite { value, .. } => Some(*value),
            Lipschitz::Unbounded { .. } => None,
        }
    }
}

fn ratio_at(source: &Profile, target: &Profile, direction: Direction, lower: f64) -> Result<f64> {
    let level = TailPair {
        lower,
        upper: 1.0 - lower,
    };
    ratio_at_tails(source, target, direction, level)
}

fn ratio_at_tails(
    source: &Profile,
    target: &Profile,
    direction: Direction,
    level: TailPair,
) -> Result<f64> {
    let num = source.eval_tails(level)?;
    let den = target.eval_tails(direction.target_level(level))?;
    Ok(num / den)
}

/// `sup_v I_source(v) / I_target(v)` (or against `I_target(1 - v)` for the
/// decreasing map), from Chebyshev-clustered sampling plus golden-section
/// refinement around the best sample. Reports `Unbounded` when the ratio
/// grows monotonically over the last sampled decade at either end.
pub fn lipschitz_constant(
    source: &MeasureSpec1D,
    target: &MeasureSpec1D,
    direction: Direction,
) -> Result<Lipschitz> {
    let sp = Profile::new(source.clone());
    let tp = Profile::new(target.clone());
    let n = LIPSCHITZ_SAMPLES;
    let theta = |j: usize| std::f64::consts::PI * (j as f64 + 0.5) / n as f64;
    // (lower, upper) computed without cancellation near either end
    let levels: Vec<TailPair> = (0..n)
        .map(|j| {
            let s = (0.5 * theta(j)).sin();
            let c = (0.5 * theta(j)).cos();
            TailPair {
                lower: s * s,
                upper: c * c,
            }
        })
        .collect();

    for endpoint in [Endpoint::Left, Endpoint::Right] {
        let v_min = levels[0].lower;
        let probes: Vec<f64> = (0..DECADE_PROBES)
            .map(|i| v_min * 10f64.powf(i as f64 / (DECADE_PROBES - 1) as f64))
            .collect();
        // ordered from the inside of the decade toward the endpoint
        let mut ratios = Vec::with_capacity(DECADE_PROBES);
        for &p in probes.iter().rev() {
            let level = match endpoint {
                Endpoint::Left => TailPair {
                    lower: p,
                    upper: 1.0 - p,
                },
                Endpoint::Right => TailPair {
                    lower: 1.0 - p,
                    upper: p,
                },
            };
            ratios.push(ratio_at_tails(&sp, &tp, direction, level)?);
        }
        let increasing = ratios.windows(2).all(|w| w[1] > w[0]);
        let growth = ratios[ratios.len() - 1] / ratios[0] - 1.0;
        if increasing && growth > DIVERGENCE_GROWTH {
            return Ok(Lipschitz::Unbounded { endpoint });
        }
    }

    let ratios = levels
        .iter()
        .map(|&l| ratio_at_tails(&sp, &tp, direction, l))
        .collect::<Result<Vec<_>>>()?;
    let (best, &best_ratio) = ratios
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("sample set is non-empty");
    let left = if best == 0 {
        levels[0].lower * 0.5
    } else {
        levels[best - 1].lower
    };
    let right = if best + 1 == n {
        1.0 - levels[n - 1].upper * 0.5
    } else {
        levels[best + 1].lower
    };
    let refined_v = golden_section_max(
        |v| ratio_at(&sp, &tp, direction, v).unwrap_or(f64::NEG_INFINITY),
        left,
        right,
        1e-12,
    );
    let refined = ratio_at(&sp, &tp, direction, refined_v)?;
    Ok(if refined > best_ratio {
        Lipschitz::Finite {
            value: refined,
            argmax_level: refined_v,
        }
    } else {
        Lipschitz::Finite {
            value: best_ratio,
            argmax_level: levels[best].lower,
        }
    })
}

/// The monotone map between two measures.
#[derive(Debug, Clone)]
pub struct TransportMap1D {
    source: MeasureSpec1D,
    target: MeasureSpec1D,
    direction: Direction,
    lipschitz: Option<Lipschitz>,
}

impl TransportMap1D {
    pub fn new(source: MeasureSpec1D, target: MeasureSpec1D, direction: Direction) -> Self {
        TransportMap1D {
            source,
            target,
            direction,
            lipschitz: None,
        }
    }

    pub fn source(&self) -> &MeasureSpec1D {
        &self.source
    }

    pub fn target(&self) -> &MeasureSpec1D {
        &self.target
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        monotone_map(&self.source, &self.target, x, self.direction)
    }

    /// `T'(x) = f1(x) / f2(T(x))`, negated for the decreasing map.
    pub fn derivative(&self, x: f64) -> Result<f64> {
        let y = self.eval(x)?;
        let d = self.source.density(x) / self.target.density(y);
        Ok(match self.direction {
            Direction::Increasing => d,
            Direction::Decreasing => -d,
        })
    }

    /// `|F2(T(x)) - F1(x)|` (or against `1 - F1(x)` for the decreasing map),
    /// measured on the smaller tail.
    pub fn push_forward_residual(&self, x: f64) -> Result<f64> {
        let src = tails(&self.source, x)?;
        let want = self.direction.target_level(src);
        let got = tails(&self.target, self.eval(x)?)?;
        Ok(if want.lower <= want.upper {
            (got.lower - want.lower).abs()
        } else {
            (got.upper - want.upper).abs()
        })
    }

    /// Computes (once) and returns the best Lipschitz constant.
    pub fn lipschitz(&mut self) -> Result<Lipschitz> {
        if let Some(l) = self.lipschitz {
            return Ok(l);
        }
        let l = lipschitz_constant(&self.source, &self.target, self.direction)?;
        self.lipschitz = Some(l);
        Ok(l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::CustomPotential;
    use std::sync::Arc;

    fn gauss(rho: f64) -> MeasureSpec1D {
        MeasureSpec1D::gaussian(rho).unwrap()
    }

    /// Standard normal CDF from the Abramowitz-Stegun 7.1.26-free series
    /// `Φ(x) = 1/2 + φ(x) Σ x^{2k+1} / (1·3·…·(2k+1))`.
    fn normal_cdf_series(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        for k in 1..200 {
            term *= x * x / (2 * k + 1) as f64;
            sum += term;
        }
        0.5 + sum * (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
    }

    #[test]
    fn gaussian_cdf_examples() {
        assert!((cdf(&gauss(1.0), 0.0).unwrap() - 0.5).abs() < 1e-14);
        let v = cdf(&gauss(1.0), 1.0).unwrap();
        assert!((v - normal_cdf_series(1.0)).abs() < 1e-13);
        assert!((v - 0.841345).abs() < 1e-6);
        for x in [-3.0, -0.7, 0.2, 2.5] {
            assert!((cdf(&gauss(1.0), x).unwrap() - normal_cdf_series(x)).abs() < 1e-12);
        }
        let e2 = MeasureSpec1D::exp_power(2.0).unwrap();
        assert!((cdf(&e2, 0.0).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn quantile_examples() {
        let g = gauss(1.0);
        assert!(quantile(&g, 0.5).unwrap().abs() < 1e-12);
        let x = quantile(&g, normal_cdf_series(1.0)).unwrap();
        assert!((x - 1.0).abs() < 1e-10);
        let e4 = MeasureSpec1D::exp_power(4.0).unwrap();
        for v in [1e-6, 0.01, 0.3] {
            let a = quantile(&e4, v).unwrap();
            let b = quantile(&e4, 1.0 - v).unwrap();
            assert!((a + b).abs() < 1e-9, "{a} {b}");
        }
        assert!(matches!(quantile(&g, 0.0), Err(Error::LevelOutOfRange(_))));
        assert!(matches!(quantile(&g, 1.0), Err(Error::LevelOutOfRange(_))));
    }

    #[test]
    fn profile_examples() {
        let inv_sqrt_2pi = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        assert!((flat_profile(&gauss(1.0), 0.5).unwrap() - inv_sqrt_2pi).abs() < 1e-12);
        assert!((flat_profile(&gauss(4.0), 0.5).unwrap() - 2.0 * inv_sqrt_2pi).abs() < 1e-12);
        let e4 = MeasureSpec1D::exp_power(4.0).unwrap();
        for v in [0.05, 0.2, 0.4] {
            let a = flat_profile(&e4, v).unwrap();
            let b = flat_profile(&e4, 1.0 - v).unwrap();
            assert!((a - b).abs() < 1e-12 * a.max(1.0));
        }
    }

    #[test]
    fn identity_and_dilation_maps() {
        let g = gauss(1.0);
        for x in [-2.0, 0.3, 1.7] {
            let y = monotone_map(&g, &g, x, Direction::Increasing).unwrap();
            assert!((y - x).abs() < 1e-10);
            let y = monotone_map(&g, &gauss(4.0), x, Direction::Increasing).unwrap();
            assert!((y - x / 2.0).abs() < 1e-10);
            let y = monotone_map(&g, &g, x, Direction::Decreasing).unwrap();
            assert!((y + x).abs() < 1e-10);
        }
    }

    #[test]
    fn lipschitz_examples() {
        let l = lipschitz_constant(&gauss(1.0), &gauss(0.25), Direction::Increasing).unwrap();
        assert!((l.value().unwrap() - 2.0).abs() < 1e-9);
        let l = lipschitz_constant(&gauss(1.0), &gauss(1.0), Direction::Increasing).unwrap();
        assert!((l.value().unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn heavier_tailed_target_is_unbounded() {
        let laplace = MeasureSpec1D::exp_power(1.0).unwrap();
        let l = lipschitz_constant(&gauss(1.0), &laplace, Direction::Increasing).unwrap();
        assert!(matches!(l, Lipschitz::Unbounded { .. }));
    }

    #[test]
    fn caffarelli_one_dimensional() {
        let quartic = MeasureSpec1D::custom(CustomPotential {
            label: "x^2/2+x^4/4".into(),
            v: Arc::new(|x| x * x / 2.0 + x.powi(4) / 4.0),
            dv: Arc::new(|x| x + x.powi(3)),
            d2v: Arc::new(|x| 1.0 + 3.0 * x * x),
        })
        .unwrap();
        let l = lipschitz_constant(&gauss(1.0), &quartic, Direction::Increasing).unwrap();
        let value = l.value().unwrap();
        assert!(value <= 1.0);
        // independently: T' = f1(x) / f2(T(x)) sampled on a grid stays <= 1
        let map = TransportMap1D::new(gauss(1.0), quartic, Direction::Increasing);
        for i in 0..=60 {
            let x = -6.0 + 0.2 * i as f64;
            assert!(map.derivative(x).unwrap() <= 1.0 + 1e-12);
        }
    }
}
