//! Shared fixtures for the benchmarks.

use std::sync::Arc;

use spectra_core::{CustomPotential, MeasureSpec1D};

/// `V(x) = x^2/2 + x^4/4`.
pub fn quartic() -> MeasureSpec1D {
    MeasureSpec1D::custom(CustomPotential {
        label: "x^2/2+x^4/4".into(),
        v: Arc::new(|x| 0.5 * x * x + 0.25 * x.powi(4)),
        dv: Arc::new(|x| x + x.powi(3)),
        d2v: Arc::new(|x| 1.0 + 3.0 * x * x),
    })
    .expect("quartic potential is confining")
}
