//! Fault-tolerance simulation of surface codes whose entangling gates are
//! heralded, probabilistic linear-optical CZ gates between spin qubits.
//!
//! The pipeline is: build a code ([`code`]), compile a memory experiment
//! ([`circuit`]), sample shots by Pauli-frame propagation ([`frame`]), decode
//! with herald-aware matching ([`decoder`]) and sweep noise parameters
//! ([`experiments`]). [`optics`] is an independent photon-level model of the
//! gate used to check the channels in [`noise`].

pub mod circuit;
pub mod code;
pub mod decoder;
pub mod experiments;
pub mod frame;
pub mod noise;
pub mod optics;
pub mod pauli;
pub mod quantum;
