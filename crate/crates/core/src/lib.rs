//! Urban area representations learned from mobility flows, and tools to
//! compare them with venue-category profiles.
//!
//! The pipeline runs [`ingest`] (venue and transition logs to zip-level
//! flows), [`flownet`] (one directed weighted network per period),
//! [`embed`] (second-order walks plus skip-gram training), [`areavec`]
//! (category shares per zip) and [`simanalysis`] (similarity matrices,
//! correlation and neighbor overlap). [`synth`] generates cities with known
//! structure for testing.

pub mod areavec;
pub mod embed;
pub mod error;
pub mod flownet;
pub mod ingest;
pub mod simanalysis;
pub mod synth;
pub mod types;

pub use areavec::{Attribution, CategoryVector, VectorKind};
pub use embed::{Embedding, TrainConfig, WalkBudget, WalkConfig};
pub use error::{Error, Result};
pub use flownet::{FlowNetwork, NetworkStats};
pub use ingest::{IngestReport, TransitionRecord, VenueRecord, ZipTransition};
pub use simanalysis::{ComparisonReport, PairMeasure, SimilarityMatrix};
pub use synth::{SynthCity, SynthConfig};
pub use types::{classify_period, Category, Period, YearMonth};
