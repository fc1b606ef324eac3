//! Construction and analysis of smooth functions on [0,1] whose
//! sign-crossing set ("cutting set") is a prescribed closed nowhere dense set.
//!
//! The crate has three layers:
//!
//! * exact-rational set machinery: [`set_model`] describes closed nowhere
//!   dense sets as central Cantor parts plus point clusters, [`gap_tree`]
//!   derives the basic-interval/gap tree and the per-gap component tables;
//! * float numerics, generic over the scalar type: [`bump_kernel`] evaluates
//!   the C-infinity bump and its derivatives via truncated power series,
//!   [`evaluator`] evaluates built functions and their convergence bounds;
//! * experiments: [`function_builder`] materializes the three constructions,
//!   [`analysis`] detects and verifies cutting sets and variation,
//!   [`porosity`] runs the ball-inclusion experiment in C[0,1].

pub mod analysis;
pub mod bump_kernel;
pub mod evaluator;
pub mod function_builder;
pub mod gap_tree;
pub mod io;
pub mod porosity;
pub mod rat;
pub mod scalar;
pub mod set_model;

pub use rat::{Rat, RatInterval};
pub use scalar::Scalar;

/// Default floating scalar used by the CLI and the concrete aliases.
pub type Real = f64;

/// Concrete jet alias for the default scalar.
pub type RealJet = bump_kernel::Jet<Real>;

/// Concrete envelope-table alias for the default scalar.
pub type RealEnvelope = bump_kernel::EnvelopeTable<Real>;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid set spec: {0}")]
    InvalidSpec(String),

    #[error("overlapping parts: {0}")]
    Overlap(String),

    #[error("xi rule violation at level {level}: {detail}")]
    XiInvariant { level: usize, detail: String },

    #[error("{endpoint} is an isolated point of the set; the construction requires boundary points to be accumulation points")]
    IsolatedEndpoint { endpoint: String },

    #[error("cluster point {point} lies in the perfect kernel and cannot be isolated")]
    ClusterPointInKernel { point: String },

    #[error("cluster point {point} cannot be certified outside the kernel at depth {depth}")]
    ClusterUnresolvable { point: String, depth: usize },

    #[error("depth {requested} exceeds the representable range of the xi rule (max {max})")]
    DepthUnrepresentable { requested: usize, max: usize },

    #[error("derivative order {requested} exceeds the configured maximum {max}")]
    OrderOverflow { requested: usize, max: usize },

    #[error("gap {gap} not present in the tree")]
    UnknownGap { gap: String },

    #[error("component budget {budget} exhausted in gap {gap}")]
    BudgetExhausted { gap: String, budget: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
