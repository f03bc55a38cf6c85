//! Weight sequences, associated weight functions, and finite-window
//! deciders for growth conditions and weighted-space inclusions of entire
//! functions.

pub mod associated;
pub mod battery;
pub mod error;
pub mod family;
pub mod grid;
pub mod io;
pub mod policy;
pub mod relations;
pub mod report;
pub mod sequence;
pub mod spaces;
pub mod suites;
pub mod theta;
pub mod trend;
pub mod verdict;
pub mod weight;

pub use associated::{AssociatedWeight, LogWeight};
pub use error::{Error, Result};
pub use grid::{Grid, GridSpec};
pub use policy::Policy;
pub use sequence::WeightSequence;
pub use theta::{ThetaFunction, ThetaKind};
pub use verdict::{State, Verdict};
pub use weight::{VKind, Weight};
