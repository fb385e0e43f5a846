//! Linearized twist-deformed Rindler space-times.
//!
//! Symbolic star commutators for canonical, Lie-algebraic and quadratic
//! twists in Minkowski and Rindler coordinates, plus the commutative and
//! deformed Unruh spectra with a quadrature cross-check.

pub mod cli;
pub mod config;
pub mod diffop;
pub mod expr;
pub mod rindler;
pub mod spectrum;
pub mod starprod;
pub mod twists;
pub mod verify;
