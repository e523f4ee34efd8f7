//! One-dimensional measures `exp(-V(x)) dx`, normalised to probability.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate_with_breaks, Tolerance};

/// Density cut-off used to truncate unbounded supports for the eigenvalue
/// solvers: the computational interval keeps `exp(-V) >= ratio * max`.
pub const SOLVER_TAIL_RATIO: f64 = 1e-18;

/// Cut-off used for distribution functions; much further out so that tail
/// probabilities down to ~1e-25 are resolved.
pub const CDF_TAIL_RATIO: f64 = 1e-36;

/// Shared closure type for user-supplied potentials.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// User-supplied potential together with its first two derivatives.
#[derive(Clone)]
pub struct CustomPotential {
    pub label: String,
    pub v: ScalarFn,
    pub dv: ScalarFn,
    pub d2v: ScalarFn,
}

impl fmt::Debug for CustomPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomPotential")
            .field("label", &self.label)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum Family {
    /// `V = rho x^2 / 2`.
    Gaussian {
        rho: f64,
    },
    /// `V = |x|^p / p`.
    ExpPower {
        p: f64,
    },
    Custom(CustomPotential),
}

/// Closed interval, possibly with infinite endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Support {
    pub lo: f64,
    pub hi: f64,
}

impl Support {
    pub const REAL_LINE: Support = Support {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }
}

/// Probability measure `exp(-V(x) - log_normalizer) dx` on `support`.
///
/// `V` is stored without its normalising constant; `log_normalizer` is
/// `log ∫ exp(-V)` over the support.
#[derive(Debug, Clone)]
pub struct MeasureSpec1D {
    family: Family,
    support: Support,
    log_normalizer: f64,
    /// location of min V (exact for the built-in families)
    center: f64,
}

impl MeasureSpec1D {
    pub fn gaussian(rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return invalid(format!(
                "Gaussian curvature rho must be positive, got {rho}"
            ));
        }
        Ok(MeasureSpec1D {
            family: Family::Gaussian { rho },
            support: Support::REAL_LINE,
            log_normalizer: 0.5 * (2.0 * std::f64::consts::PI / rho).ln(),
            center: 0.0,
        })
    }

    /// The p-exponential measure `c_p exp(-|x|^p / p)`, `p >= 1`.
    pub fn exp_power(p: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return invalid(format!("exponent p must be finite and >= 1, got {p}"));
        }
        // ∫ exp(-|x|^p/p) dx = 2 p^{1/p - 1} Γ(1/p)
        let log_normalizer = std::f64::consts::LN_2 + (1.0 / p - 1.0) * p.ln() + ln_gamma(1.0 / p);
        Ok(MeasureSpec1D {
            family: Family::ExpPower { p },
            support: Support::REAL_LINE,
            log_normalizer,
            center: 0.0,
        })
    }

    /// Measure with a user potential on the whole line. The potential must be
    /// confining; the normaliser is computed by quadrature.
    pub fn custom(potential: CustomPotential) -> Result<Self> {
        Self::custom_on(potential, Support::REAL_LINE)
    }

    pub fn custom_on(potential: CustomPotential, support: Support) -> Result<Self> {
        if !(support.lo < support.hi) {
            return invalid(format!(
                "support must be a non-empty interval, got [{}, {}]",
                support.lo, support.hi
            ));
        }
        let mut spec = MeasureSpec1D {
            family: Family::Custom(potential),
            support,
            log_normalizer: 0.0,
            center: 0.0,
        };
        let (center, v_min) = spec.locate_minimum()?;
        spec.center = center;
        let (lo, hi) = spec.truncation(CDF_TAIL_RATIO)?;
        let v = &spec;
        let mass = integrate_with_breaks(
            |x| (-(v.potential(x) - v_min)).exp(),
            lo,
            hi,
            &[center],
            Tolerance {
                abs: 1e-15,
                rel: 1e-14,
            },
        )?;
        if !(mass.value > 0.0 && mass.value.is_finite()) {
            return Err(Error::NotConfining(format!(
                "total mass {} is not positive and finite",
                mass.value
            )));
        }
        spec.log_normalizer = mass.value.ln() - v_min;
        Ok(spec)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn log_normalizer(&self) -> f64 {
        self.log_normalizer
    }

    /// Minimiser of V.
    pub fn center(&self) -> f64 {
        self.center
    }

    /// Human-readable tag such as `gaussian:1` or `exp-power:4`.
    pub fn label(&self) -> String {
        match &self.family {
            Family::Gaussian { rho } => format!("gaussian:{rho}"),
            Family::ExpPower { p } => format!("exp-power:{p}"),
            Family::Custom(c) => format!("potential:{}", c.label),
        }
    }

    /// True when the density is even about its center.
    pub fn is_symmetric(&self) -> bool {
        !matches!(self.family, Family::Custom(_))
    }

    /// `V(x)` without the normalising constant.
    pub fn potential(&self, x: f64) -> f64 {
        match &self.family {
            Family::Gaussian { rho } => 0.5 * rho * x * x,
            Family::ExpPower { p } => x.abs().powf(*p) / p,
            Family::Custom(c) => (c.v)(x),
        }
    }

    pub fn potential_d1(&self, x: f64) -> f64 {
        match &self.family {
            Family::Gaussian { rho } => rho * x,
            Family::ExpPower { p } => x.signum() * x.abs().powf(p - 1.0),
            Family::Custom(c) => (c.dv)(x),
        }
    }

    pub fn potential_d2(&self, x: f64) -> f64 {
        match &self.family {
            Family::Gaussian { rho } => *rho,
            Family::ExpPower { p } => {
                if *p == 2.0 {
                    1.0
                } else {
                    (p - 1.0) * x.abs().powf(p - 2.0)
                }
            }
            Family::Custom(c) => (c.d2v)(x),
        }
    }

    pub fn log_density(&self, x: f64) -> f64 {
        if x < self.support.lo || x > self.support.hi {
            return f64::NEG_INFINITY;
        }
        -self.potential(x) - self.log_normalizer
    }

    pub fn density(&self, x: f64) -> f64 {
        self.log_density(x).exp()
    }

    /// Points where the density is not smooth and quadrature should split.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.family {
            Family::ExpPower { p } if *p != 2.0 => vec![0.0],
            Family::Gaussian { .. } | Family::ExpPower { .. } => vec![],
            Family::Custom(_) => vec![self.center],
        }
    }

    /// Interval on which `exp(-V) >= ratio * max exp(-V)`, intersected with
    /// the support.
    pub fn truncation(&self, ratio: f64) -> Result<(f64, f64)> {
        if !(ratio > 0.0 && ratio < 1.0) {
            return invalid(format!("tail ratio must lie in (0, 1), got {ratio}"));
        }
        let level = -ratio.ln();
        let (lo, hi) = match &self.family {
            Family::Gaussian { rho } => {
                let r = (2.0 * level / rho).sqrt();
                (-r, r)
            }
            Family::ExpPower { p } => {
                let r = (p * level).powf(1.0 / p);
                (-r, r)
            }
            Family::Custom(_) => {
                let v_min = self.potential(self.center);
                let lo = self.crossing(self.center, -1.0, v_min + level)?;
                let hi = self.crossing(self.center, 1.0, v_min + level)?;
                (lo, hi)
            }
        };
        Ok((lo.max(self.support.lo), hi.min(self.support.hi)))
    }

    /// Outermost point in direction `dir` from `from` at which V reaches
    /// `level`, or the support edge if it is reached first.
    fn crossing(&self, from: f64, dir: f64, level: f64) -> Result<f64> {
        let edge = if dir < 0.0 {
            self.support.lo
        } else {
            self.support.hi
        };
        let mut step = 1.0;
        let mut inside = from;
        loop {
            let mut x = from + dir * step;
            if (dir < 0.0 && x <= edge) || (dir > 0.0 && x >= edge) {
                x = edge;
                if edge.is_finite() {
                    let v = self.potential(x);
                    if !(v >= level) {
                        return Ok(edge);
                    }
                }
            }
            let v = self.potential(x);
            if v.is_nan() {
                return Err(Error::NonFinitePotential { x });
            }
            if v >= level {
                // refine between the last interior point and x
                let (mut a, mut b) = (inside, x);
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    if m == a || m == b {
                        break;
                    }
                    if self.potential(m) >= level {
                        b = m;
                    } else {
                        a = m;
                    }
                }
                return Ok(b);
            }
            inside = x;
            step *= 2.0;
            if step > 1e8 {
                return Err(Error::NotConfining(format!(
                    "V stays below {level} beyond |x| = 1e8"
                )));
            }
        }
    }

    /// Coarse scan for the minimiser of a custom potential followed by a
    /// golden-section polish.
    fn locate_minimum(&self) -> Result<(f64, f64)> {
        let lo = self.support.lo.max(-1e3);
        let hi = self.support.hi.min(1e3);
        let samples = 20_001;
        let mut best = (f64::NAN, f64::INFINITY);
        for i in 0..samples {
            let x = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
            let v = self.potential(x);
            if v.is_nan() {
                return Err(Error::NonFinitePotential { x });
            }
            if v < best.1 {
                best = (x, v);
            }
        }
        if !best.1.is_finite() {
            return Err(Error::NotConfining("potential is unbounded below".into()));
        }
        let dx = (hi - lo) / (samples - 1) as f64;
        let x = crate::optimize::golden_section_min(
            |x| self.potential(x),
            (best.0 - dx).max(lo),
            (best.0 + dx).min(hi),
            1e-12,
        );
        let v = self.potential(x);
        Ok(if v < best.1 { (x, v) } else { best })
    }
}
