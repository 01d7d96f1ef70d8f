//! Quantum Fisher information of chaotic Floquet sensing protocols.

pub mod circuit;
pub mod concentration;
pub mod ensemble;
pub mod error;
pub mod geometry;
pub mod haar;
pub mod linalg;
pub mod metrology;
pub mod weingarten;

pub use circuit::{
    build_floquet, global_sensing_hamiltonian, make_state, qfi_rqc, BuildMode, FloquetCircuit, FloquetOperator,
    LayerSchedule, LocalSensingSpec, StateKind,
};
pub use concentration::{fluctuation_stats, lipschitz_bound, tail_bound, FluctuationStats, LipschitzBound, ModelKind};
pub use ensemble::{fit_scaling, run_ensemble, EnsembleConfig, EnsembleResult, FitModel, ScalingFit};
pub use error::{QfiError, Result};
pub use geometry::ChainGeometry;
pub use haar::{derive_subseed, random_state, sample_cue, SeedPath};
pub use linalg::{C64, ComplexMatrix, HermitianDiagonal, StateVector, UnitaryMatrix};
pub use metrology::{qfi_operator, qfi_trajectory, qfi_upper_bound, ProtocolKind, SensingSpec, StepApplier};
pub use weingarten::{average_trace_product, weingarten_table, WeingartenTable};
