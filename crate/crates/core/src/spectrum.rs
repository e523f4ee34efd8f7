//! Shared spectral containers: sorted eigenvalue lists with multiplicities
//! and eigenvalue-counting results.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// One distinct eigenvalue together with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralEntry {
    pub value: f64,
    pub mult: u64,
}

/// Closed-form model a spectrum was generated from. Lets consumers recover
/// the omitted tail of a truncated exact spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ExactModel {
    /// Standard Gaussian on R^n scaled to curvature `rho`.
    Gaussian { n: u32, rho: f64 },
    /// Sphere S^n rescaled so that Ric = rho * g.
    Sphere { n: u32, rho: f64 },
}

/// Eigenvalues in increasing order, each with its multiplicity.
///
/// `k_max` is the number of eigenvalues represented counting multiplicity,
/// so `lambda(k)` is defined for `1 <= k <= k_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    entries: Vec<SpectralEntry>,
    exact: bool,
    k_max: u64,
    truncation_note: Option<String>,
    model: Option<ExactModel>,
}

impl Spectrum {
    /// Builds a spectrum from entries that are already sorted and strictly
    /// increasing.
    pub fn from_entries(
        entries: Vec<SpectralEntry>,
        exact: bool,
        truncation_note: Option<String>,
    ) -> Result<Self> {
        if entries.iter().any(|e| e.mult == 0 || !e.value.is_finite()) {
            return invalid("spectral entries need finite values and positive multiplicities");
        }
        if entries.windows(2).any(|w| w[0].value >= w[1].value) {
            return invalid("spectral entries must be strictly increasing");
        }
        let k_max = entries.iter().map(|e| e.mult).sum();
        Ok(Spectrum {
            entries,
            exact,
            k_max,
            truncation_note,
            model: None,
        })
    }

    /// Numerically computed eigenvalues, one entry per value. Values that
    /// coincide exactly are merged; no clustering is applied.
    pub fn from_discrete(mut values: Vec<f64>, truncation_note: Option<String>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return invalid("discrete eigenvalues must be finite");
        }
        values.sort_by(f64::total_cmp);
        let mut entries: Vec<SpectralEntry> = Vec::with_capacity(values.len());
        for v in values {
            match entries.last_mut() {
                Some(last) if last.value == v => last.mult += 1,
                _ => entries.push(SpectralEntry { value: v, mult: 1 }),
            }
        }
        Spectrum::from_entries(entries, false, truncation_note)
    }

    pub(crate) fn with_model(mut self, model: ExactModel) -> Self {
        self.model = Some(model);
        self
    }

    pub fn entries(&self) -> &[SpectralEntry] {
        &self.entries
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn k_max(&self) -> u64 {
        self.k_max
    }

    pub fn truncation_note(&self) -> Option<&str> {
        self.truncation_note.as_deref()
    }

    pub fn model(&self) -> Option<ExactModel> {
        self.model
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The k-th eigenvalue (1-based, repeated by multiplicity).
    pub fn lambda(&self, k: u64) -> Option<f64> {
        if k == 0 {
            return None;
        }
        let mut seen = 0;
        for e in &self.entries {
            seen += e.mult;
            if k <= seen {
                return Some(e.value);
            }
        }
        None
    }

    /// Every represented eigenvalue, repeated by multiplicity.
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries
            .iter()
            .flat_map(|e| std::iter::repeat(e.value).take(e.mult as usize))
    }

    /// Number of represented eigenvalues `<= lambda`, with multiplicity.
    pub fn count_le(&self, lambda: f64) -> u64 {
        self.entries
            .iter()
            .take_while(|e| e.value <= lambda)
            .map(|e| e.mult)
            .sum()
    }

    /// Largest represented eigenvalue.
    pub fn max_value(&self) -> Option<f64> {
        self.entries.last().map(|e| e.value)
    }

    /// The same spectrum with every eigenvalue multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return invalid(format!("scale factor must be positive, got {factor}"));
        }
        let entries = self
            .entries
            .iter()
            .map(|e| SpectralEntry {
                value: e.value * factor,
                mult: e.mult,
            })
            .collect();
        let mut s = Spectrum::from_entries(entries, self.exact, self.truncation_note.clone())?;
        s.model = self.model.map(|m| match m {
            ExactModel::Gaussian { n, rho } => ExactModel::Gaussian {
                n,
                rho: rho * factor,
            },
            ExactModel::Sphere { n, rho } => ExactModel::Sphere {
                n,
                rho: rho * factor,
            },
        });
        Ok(s)
    }

    /// The same spectrum with every eigenvalue shifted by `delta`. The result
    /// no longer corresponds to a closed-form model.
    pub fn shifted(&self, delta: f64) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .map(|e| SpectralEntry {
                value: e.value + delta,
                mult: e.mult,
            })
            .collect();
        Spectrum::from_entries(entries, self.exact, self.truncation_note.clone())
    }

    /// Display helper: merges neighbouring values closer than `gap` into a
    /// single entry (keeping the first value), for numerically split
    /// degeneracies.
    pub fn clustered(&self, gap: f64) -> Spectrum {
        let mut entries: Vec<SpectralEntry> = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            match entries.last_mut() {
                Some(last) if e.value - last.value < gap => last.mult += e.mult,
                _ => entries.push(*e),
            }
        }
        Spectrum {
            entries,
            exact: self.exact,
            k_max: self.k_max,
            truncation_note: self.truncation_note.clone(),
            model: self.model,
        }
    }
}

/// How a counting value should be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountKind {
    Exact,
    Asymptotic,
    LowerBound,
    UpperBound,
}

/// Value of an eigenvalue counting function `#{lambda_k <= lambda}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountingResult {
    pub lambda: f64,
    pub count: f64,
    pub kind: CountKind,
}

impl CountingResult {
    pub(crate) fn exact(lambda: f64, count: u64) -> Self {
        CountingResult {
            lambda,
            count: count as f64,
            kind: CountKind::Exact,
        }
    }

    /// The count as an integer when it is exact.
    pub fn exact_count(&self) -> Option<u64> {
        (self.kind == CountKind::Exact).then_some(self.count as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Spectrum {
        Spectrum::from_entries(
            vec![
                SpectralEntry {
                    value: 0.0,
                    mult: 1,
                },
                SpectralEntry {
                    value: 1.5,
                    mult: 4,
                },
                SpectralEntry {
                    value: 4.0,
                    mult: 2,
                },
            ],
            true,
            None,
        )
        .unwrap()
    }

    #[test]
    fn lambda_repeats_by_multiplicity() {
        let s = sample();
        assert_eq!(s.k_max(), 7);
        assert_eq!(s.lambda(1), Some(0.0));
        assert_eq!(s.lambda(2), Some(1.5));
        assert_eq!(s.lambda(5), Some(1.5));
        assert_eq!(s.lambda(6), Some(4.0));
        assert_eq!(s.lambda(8), None);
        assert_eq!(s.lambda(0), None);
        assert_eq!(s.values().count(), 7);
    }

    #[test]
    fn count_le_uses_multiplicities() {
        let s = sample();
        assert_eq!(s.count_le(-1.0), 0);
        assert_eq!(s.count_le(1.5), 5);
        assert_eq!(s.count_le(100.0), 7);
    }

    #[test]
    fn rejects_unsorted_and_zero_multiplicity() {
        let bad = vec![
            SpectralEntry {
                value: 1.0,
                mult: 1,
            },
            SpectralEntry {
                value: 1.0,
                mult: 1,
            },
        ];
        assert!(Spectrum::from_entries(bad, true, None).is_err());
        let zero = vec![SpectralEntry {
            value: 1.0,
            mult: 0,
        }];
        assert!(Spectrum::from_entries(zero, true, None).is_err());
    }

    #[test]
    fn discrete_merges_identical_values_and_sorts() {
        let s = Spectrum::from_discrete(vec![2.0, 0.0, 2.0, 1.0], None).unwrap();
        assert_eq!(s.entries().len(), 3);
        assert_eq!(s.entries()[2].mult, 2);
        assert!(!s.is_exact());
    }

    #[test]
    fn clustering_merges_close_values() {
        let s = Spectrum::from_discrete(vec![1.0, 1.0 + 1e-8, 2.0], None).unwrap();
        let c = s.clustered(1e-6);
        assert_eq!(c.entries().len(), 2);
        assert_eq!(c.entries()[0].mult, 2);
        assert_eq!(c.k_max(), 3);
    }
}
