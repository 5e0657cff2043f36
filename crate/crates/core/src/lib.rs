//! Rate, fidelity, Raman-noise and reconfiguration models for DWDM-multiplexed
//! quantum networks built from cavity-coupled neutral-atom processors.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod components;
pub mod config;
pub mod error;
pub mod fidelity;
pub mod netsim;
pub mod optics;
pub mod raman;
pub mod tdm;

pub use error::{Error, Result};
