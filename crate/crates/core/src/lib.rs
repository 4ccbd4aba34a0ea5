pub mod bisim;
pub mod cli;
pub mod fixtures;
pub mod gen;
pub mod mc;
pub mod models;
pub mod normalform;
pub mod proof;
pub mod sat;
pub mod syntax;

pub use models::{FiniteModel, ModelSpec, StateSet};
pub use syntax::{parse_formula, render, Formula, Fragment};
