//! Entanglement dynamics of two remote qubits, each coupled through σx to
//! its own harmonic oscillator with a vanishing qubit splitting.
//!
//! [`closedform`] evaluates the analytic results and [`oracle`] recomputes
//! them by brute-force propagation in a truncated Fock space.

pub mod closedform;
pub mod entanglement;
pub mod error;
pub mod model;
pub mod oracle;
pub mod specialfn;
pub mod trace;

pub use closedform::ClosedForm;
pub use entanglement::{
    concurrence, negativity, wootters_concurrence, ConcurrenceMethod, ConcurrenceResult,
};
pub use error::{Error, Result};
pub use model::{
    change_basis, make_bell, make_esd_mixture, BellState, FieldSpec, ModelParams, QubitBasis,
    QubitPairState, Spin,
};
pub use oracle::{SubsystemPropagator, SubsystemState, TruncationSpec};
pub use trace::{DynamicsTrace, TracePoint};
