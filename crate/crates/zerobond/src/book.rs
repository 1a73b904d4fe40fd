//! Runs every Rust snippet in the user guide as a doctest, so the book
//! cannot drift out of sync with the library.

#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction {}

#[doc = include_str!("../../../book/src/models.md")]
mod models {}

#[doc = include_str!("../../../book/src/bonds.md")]
mod bonds {}

#[doc = include_str!("../../../book/src/options.md")]
mod options {}

#[doc = include_str!("../../../book/src/monte-carlo.md")]
mod monte_carlo {}

#[doc = include_str!("../../../book/src/pde.md")]
mod pde {}

#[doc = include_str!("../../../book/src/cli.md")]
mod cli {}
