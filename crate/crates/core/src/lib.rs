pub mod audit;
pub mod bounds;
pub mod cli;
pub mod conjugacy;
pub mod constructions;
pub mod enumeration;
pub mod error;
pub mod expression;
pub mod group;
mod nucleus;
pub mod perm;
pub mod preset;
pub mod width;
pub mod words;

pub use error::{Error, Result};
pub use group::{Element, Group};
pub use words::Word;
