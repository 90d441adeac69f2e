//! Uncertainty-tracking floating point.
//!
//! The core type is a floating-point value `S~R@E` that carries, next to
//! its integer significand `S` and binary exponent `E`, the sign `~` of
//! its accumulated rounding error and a bounding range `R` for that error.
//! Rounding is statistical rather than worst-case: the error distribution
//! stabilizes to a truncated normal whose deviation is tied to `R`, so the
//! value tracks both an uncertainty deviation and a hard bounding range.
//!
//! Two reference arithmetics live alongside it behind a common trait:
//! classic interval arithmetic and an independence arithmetic that
//! propagates deviations assuming uncorrelated operands. Harnesses for
//! FFT, matrix inversion, regressive sine tables, Taylor expansion,
//! adaptive integration, and moving-window regression exercise all three
//! and report error-significand and bounding-ratio metrics.
//!
//! See the `examples/` directory for one runnable program per capability,
//! or the `precision-lab` binary for the batch experiment interface.

pub mod analysis;
pub mod arithmetic;
pub mod config;
pub mod fft;
pub mod funceval;
pub mod independence;
pub mod interval;
pub mod matrix;
pub mod metrics;
pub mod ops;
pub mod report;
pub mod tracing;
pub mod value;

pub mod experiments;

pub use arithmetic::{Arithmetic, IndependenceArithmetic, IntervalArithmetic, PrecisionArithmetic};
pub use config::{ArithmeticConfig, CarryPolicy, MeanDeviation};
pub use value::{Carry, ErrorCode, PrecisionValue};
