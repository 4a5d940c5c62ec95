//! Out-of-distribution generalization diagnostics from feature activations.
//!
//! The crate estimates, for each scalar feature, how much its label-conditional
//! distribution moves across domains (variation) and how well it separates
//! classes within a domain (informativeness). On top of those it provides
//! variation-aware model selection, expansion-function estimation with
//! learnability verdicts, and synthetic benchmarks whose answers are known in
//! closed form.

pub mod checks;
pub mod cli;
pub mod dataio;
pub mod density;
pub mod divergence;
pub mod error;
pub mod expansion;
pub mod metrics;
pub mod normal;
pub mod plot;
pub mod selection;
pub mod synthetic;

pub use dataio::{load_dataset, load_manifest, write_dataset, DomainSplit, FeatureDataset, ModelManifest};
pub use density::{estimate_density, gaussian_density, BandwidthRule, Density1D, DensityConfig, GridSpec};
pub use divergence::{divergence, gaussian_sym_kl, gaussian_tv, DivergenceKind};
pub use error::{Error, Result};
