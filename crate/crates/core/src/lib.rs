//! Exact-arithmetic engine for Leavitt path algebras and their modules over
//! boundary paths.

pub mod boundary;
pub mod chen;
pub mod classify;
pub mod error;
pub mod field;
pub mod graph;
pub mod groupoid;
pub mod linalg;
pub mod lpa;
pub mod module;
pub mod verify;

pub use error::{Error, Result};
