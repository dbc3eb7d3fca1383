//! Exact-diagonalization simulator for stimulated polarization waves
//! ("quantum domino" dynamics) in 1D spin-1/2 chains and rings.
//!
//! A single flipped spin in a driven Ising-type chain can trigger a
//! running wave of further flips, amplifying a one-spin signal into bulk
//! magnetization. This crate builds the relevant Hamiltonian models
//! (rotating-frame ZZ with M-neighbor truncation, effective chain/ring
//! Hamiltonians, secular dipolar couplings, alternating two-species
//! systems, and the driven lab-frame chain), evolves pure states exactly,
//! and reports per-spin and total polarization trajectories together with
//! wavefront/amplification metrics.
//!
//! The `spinwave` binary exposes the scenario catalog and config-driven
//! runs on the command line; see the crate README for the file formats.

pub mod config;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod hamiltonian;
pub mod operator;
pub mod output;
pub mod system;

pub use error::{Error, Result};

pub use operator::{
    pauli_matrix, product_operator, site_operator, Operator, SpinAxis, StateVector, MAX_SPINS,
};

pub use system::{
    coupling_profile, dipolar_coupling, CouplingTable, DipoleGeometry, Geometry, Model, ModelSpec,
    SystemSpec, Variant,
};

pub use hamiltonian::{
    build_alternating_hetero, build_effective_chain, build_effective_nn, build_effective_ring,
    build_lab_frame, build_rotating_zz, build_secular_dipolar, build_static,
};

pub use dynamics::{
    all_up_state, evolve_static, evolve_time_dependent, initial_state_first_flipped,
    polarizations, trajectory_metrics, EvolveDiagnostics, RunMetadata, Trajectory, WaveMetrics,
};

pub use experiments::{
    default_t_max, lab_frame_dt_cap, run_experiment, scenario, scenario_catalog, ExperimentConfig,
    OutputKind, Scenario, ScenarioId, ScenarioRun, GAMMA_19F, GAMMA_1H,
};

pub use config::{apply_overrides, config_to_toml, parse_config};
