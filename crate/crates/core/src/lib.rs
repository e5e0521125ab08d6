//! Exact ping-pong certificates for groups acting on a boundary.

pub mod certificate;
pub mod classes;
pub mod circle;
pub mod error;
pub mod exact;
pub mod folding;
pub mod model;
pub mod pipeline;
pub mod presentation;
pub mod render;
pub mod schema;
pub mod search;
pub mod symbolic;
pub mod wiegold;
pub mod word;

pub use error::{Error, Result};
