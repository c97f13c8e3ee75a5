// Copyright 2026 The memorymodes Authors
// SPDX-License-Identifier: Apache-2.0

//! Atom in a structured reservoir: exact amplitude dynamics, time-local
//! rates, pseudomode master equations and their stochastic unravelings.

// `!(x > y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod amplitude;
pub mod config;
pub mod density;
pub mod error;
pub mod export;
pub mod info;
pub mod integrate;
pub mod linalg;
pub mod model;
pub mod rates;
pub mod rng;
pub mod runner;
pub mod trajectory;

pub use error::{Error, Result};
