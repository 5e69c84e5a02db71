//! Abstract syntax and ground representations shared by every engine.

mod ground;
mod syntax;

pub use ground::*;
pub use syntax::*;
