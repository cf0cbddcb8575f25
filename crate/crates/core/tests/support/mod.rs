//! Oracles and fixtures shared by the integration and acceptance tests.
#![allow(dead_code)]

pub mod alphabet;
pub mod exhaustive;
pub mod fixtures;
pub mod lm;
pub mod oracles;
