//! Symbolic workbench for functionality and equivalence of bottom-up
//! register automata over polynomial and unordered-forest algebras.

pub mod algebra;
pub mod automata;
pub mod checker;
pub mod encodings;
pub mod forests;
pub mod gen;
pub mod groebner;
pub mod poly;
pub mod reductions;
pub mod syntax;
pub mod tree;
