//! Information distance toolkit.
//!
//! Computes exact bounded program-length complexity on a fixed reference
//! prefix machine, compressor-based approximations at scale, the
//! information distances built from conditional complexities, and the
//! confusability measures whose logarithms those distances predict —
//! together with the regression and model-comparison harness that checks
//! the predicted exponential relationships on desk-scale data.

pub mod bits;
pub mod enumerator;
pub mod error;
pub mod machine;

pub use bits::BitString;
pub use enumerator::{ComplexityTable, ConditionSlice, EnumerationConfig};
pub use error::{Error, Result};
pub use machine::{execute, encode_condition, ExecStatus, ExecutionOutcome, MachineId, MachineSpec};
