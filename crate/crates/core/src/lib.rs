//! Spectra of weighted Laplacians on model spaces, one-dimensional
//! monotone transport, and explicit spectral and heat-trace bounds.

pub mod bounds;
pub mod comparison;
pub mod discrete;
pub mod error;
pub mod measure;
pub mod model_spectra;
pub mod optimize;
pub mod quadrature;
pub mod spectrum;
pub mod sturm;
pub mod transport;

pub use bounds::{BoundReport, BoundValue, CurvatureData, Scenario, TrichotomyFlags};
pub use comparison::{ComparisonReport, Violation};
pub use discrete::{Grid1D, HeatTrace, PotentialGrid};
pub use error::{Error, Result};
pub use measure::{CustomPotential, Family, MeasureSpec1D, Support};
pub use model_spectra::ModelParams;
pub use spectrum::{CountKind, CountingResult, ExactModel, SpectralEntry, Spectrum};
pub use transport::{Direction, Lipschitz, Profile, TransportMap1D};
