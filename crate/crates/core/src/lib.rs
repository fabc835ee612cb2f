//! Approximate decoherence-free probe design for networks of qubit sensors.
//!
//! A network of `N` qubits sees a signal source through its sampling vector
//! `s` and a noise source through `n`. Preparing the GHZ-type probe
//! `|φ_k⁺⟩ = (|k⟩ + |-k⟩)/√2` with weights `k ∈ [-1, 1]^N` makes the state
//! accumulate phase `⟨s, k⟩` from the signal and `⟨n, k⟩` from the noise, so
//! choosing `k` orthogonal to the noise while keeping overlap with the signal
//! protects the measurement.
//!
//! The crate is organized bottom-up:
//!
//! - [`geometry`]: positions, sensor arrays, field kernels and sampling vectors.
//! - [`probe`]: exact and approximate probe constructions and their metrics.
//! - [`noise`]: stochastic noise-source models and their Gaussian pushforward.
//! - [`qfi`]: decoherence parameter, Fisher information and time optimization.
//! - [`analysis`]: maps, worst-case search, scaling and convergence studies.
//! - [`scenario`]: serializable scenario configs, presets and reports.


pub mod analysis;
pub mod error;
pub mod geometry;
pub mod noise;

pub mod numerics;
pub mod probe;
pub mod qfi;

pub mod report;
pub mod scenario;


pub use error::{Error, Result};
pub use geometry::{
    field_amplitude, preset_array, sampling_map_jacobian, sampling_vector, ArrayPreset, FieldModel, Position,
    SamplingVector, SensorArray, Shape, SourcePoint,
};
pub use probe::{
    design_probe, design_probe_with, first_order_silencer, flip_schedule, grid_silencer, insensitive_subspace,
    mirror_charge_probe, probe_metrics, sphere_suppressing_pair, InsensitiveSubspace, Normalization, ProbeMetrics,
    ProbeState,
};
