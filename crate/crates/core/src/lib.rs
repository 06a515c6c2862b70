//! Iteration operators for partiality: the delay monad as explicit step
//! machines, uniform-iteration and Elgot algebras on finite state spaces,
//! the extensional partiality monad with its restriction structure, and a
//! small while-language interpreted in both.

pub mod algebra;
pub mod delay;
pub mod elgot;
pub mod error;
pub mod finset;
pub mod lang;
pub mod par;
pub mod partial;
pub mod report;

pub use error::{Error, Result};
pub use par::Exec;
pub use partial::Partial;
pub use report::{LawReport, SuiteConfig};
