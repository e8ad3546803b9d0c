//! Quantitative-sequence experimental designs: construction, evaluation and
//! a scheduling benchmark.

pub mod design;
pub mod error;
pub mod glp;
pub mod io;
pub mod multi;
pub mod optimizer;
pub mod single;
pub mod tsp;

pub use design::{evaluate, MetricsReport, QSDesign, QuantDesign, Route, SeqDesign};
pub use error::{Error, Result};
pub use multi::generate;
pub use optimizer::TaConfig;
