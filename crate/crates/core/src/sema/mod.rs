//! Name resolution, unit checking and lint.

mod lint;
mod typecheck;

pub use lint::{lint, LintReport};
pub use typecheck::{typecheck, Ty, TypedProgram};
