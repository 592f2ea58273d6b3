//! Simulation and verification toolkit for stochastic mirror-descent flows.

// `!(x > 0.0)` is how NaN gets rejected alongside non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod config;
pub mod diagnostics;
pub mod dynamics;
pub mod geometry;
pub mod linalg;
pub mod mirror;
pub mod noise;
pub mod problems;
pub mod properties;
pub mod rng;
pub mod runner;
pub mod traffic;
