//! Query language and command plumbing behind the `alexdb` binary.

pub mod error;
pub mod eval;
pub mod expr;
pub mod output;

pub use error::CliError;
pub use eval::{evaluate, Env, Value};
pub use expr::{parse, Expr};
pub use output::{render, Format};
