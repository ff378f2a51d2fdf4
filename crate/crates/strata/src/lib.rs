//! Boundary-strata expansions of psi and omega class products on the genus-0
//! moduli space with marked points a, b, c, 1, ..., n, computed by slide rules
//! and cross-checked by slide labelings, lazy tournaments, and a symbolic
//! leading-term degeneration oracle.

pub mod counts;
pub mod geometry_oracle;
pub mod kappa;
pub mod patterns;
pub mod slide_engine;
pub mod tournament;
pub mod tree_core;
