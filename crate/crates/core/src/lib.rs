//! Exact vectorial kernel method for directed lattice paths.
//!
//! A constraint on paths (a forbidden or marked pattern, the ascent
//! statistic, or any deterministic automaton) turns the generating functions
//! of walks, bridges, meanders and excursions into a small linear system over
//! `Q[v][u, 1/u][[t]]`. This crate solves that system twice, once by
//! iterating it in `t` and once through the kernel `det(I - A)` and the
//! product of its small roots, and checks both against a brute-force counter.

pub mod algebra;
pub mod asymptotics;
pub mod automaton;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod gf;
pub mod kernel;
pub mod model;
pub mod oracle;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
    #[doc = include_str!("../../../book/src/automata.md")]
    mod automata {}
    #[doc = include_str!("../../../book/src/kernel.md")]
    mod kernel {}
    #[doc = include_str!("../../../book/src/series.md")]
    mod series {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/moments.md")]
    mod moments {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
