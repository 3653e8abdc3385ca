//! Exact solvers for cooperative b-matching games.
//!
//! The crate is organised bottom-up:
//!
//! * [`rational`] and [`lp`]: exact rational arithmetic and a dense
//!   dictionary simplex with optimal-face probing and rank computation.
//! * [`game`]: coalitions, allocations, excesses and the core predicates for
//!   any game given by a coalition value oracle.
//! * [`bmatching`]: the graph model and the b-matching value function.
//! * [`nucleolus`]: the Kopelowitz scheme over arbitrary coalition
//!   families, the brute-force nucleolus, and the size-bounded and
//!   pair-family algorithms for `b <= 2` bipartite games.
//! * [`gadgets`]: hardness gadget generators, special allocations, excess
//!   tables and exhaustive cubic / two-from-cubic subgraph detection.
//! * [`io`]: text formats for graphs, X3C instances and allocations.

pub mod bmatching;
pub mod gadgets;
pub mod game;
pub mod io;
pub mod lp;
pub mod nucleolus;
pub mod random;
pub mod rational;

pub use rational::Rational;
