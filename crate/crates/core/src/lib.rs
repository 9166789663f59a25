//! Decides the quantifier-alternation level of regular languages in
//! two-variable first-order logic over words.
//!
//! A regular language is given as a regular expression, a DFA or directly
//! as a monoid table. Its syntactic monoid is computed, and the least `m`
//! with the monoid in `R_{m+1}` and `L_{m+1}` is found twice: once through
//! the Mal'cev quotient chains ([`varieties`]) and once through omega-term
//! identities ([`identities`]). The [`rankers`] module provides the word
//! combinatorics (condensed rankers and the relations they induce) used to
//! cross-check the results by brute force.

pub mod automata;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod identities;
pub mod monoid;
pub mod rankers;
pub mod varieties;

pub use error::{Error, Result};
