//! Finite-model toolkit for Bochvar external logic and Bochvar algebras.

pub mod algebra;
pub mod amalgam;
pub mod bases;
pub mod classes;
pub mod classify;
pub mod corpus;
pub mod hilbert;
pub mod matrix;
pub mod plonka;
pub mod term;
