pub mod error;
pub mod estimation;
pub mod exec;
pub mod families;
pub mod measures;
pub mod numeric;
pub mod oracle;
pub mod param;

pub use error::{Error, Result};
pub use estimation::{mle, plugin_measure, Estimate, SampleSet};
pub use exec::Execution;
pub use families::Density;
pub use measures::{evaluate, Branch, Measure, MeasureRequest, MeasureResult};
pub use oracle::{Method, OracleConfig, OracleEstimate};
pub use param::{Coords, ExpectationParam, Family, NaturalParam, Observation, SourceParam, SymMatrix};
