//! Robot arm control with cognitive map learners over phasor hypervectors.

pub mod arm;
pub mod cml;
pub mod error;
pub mod experiment;
pub mod factor;
pub mod phasor;
pub mod rng;
pub mod stats;

pub use arm::{ArmModel, ArmSegmentSpec, ArmSolution, GridConfig, ReachabilityReport};
pub use cml::{CmlModel, GraphSpec, PlanResult, Topology};
pub use error::{Error, Result};
pub use experiment::{ExperimentConfig, MethodSelection, Pipeline};
pub use factor::{FactorProblem, FactorResult, FactorizerConfig, Method, UpdateOrder};
pub use phasor::{BasisPair, Codebook, Hypervector};
pub use rng::{HdcRng, Stream};
