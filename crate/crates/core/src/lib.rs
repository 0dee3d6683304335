//! Simulation and estimation for multistable processes built from
//! Ferguson–Klass–LePage series.

pub mod cli;
pub mod engine;
pub mod estimation;
pub mod expr;
pub mod kernels;
pub mod quad;
pub mod rng;
pub mod special;
