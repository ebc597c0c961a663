//! Capacity of discrete memoryless channels.
//!
//! Two solvers share one certified stopping rule: the classical Arimoto
//! iteration ([`arimoto`]) and the backward em-algorithm ([`backward_em`]),
//! which alternates a backward e-step onto the exponential family of product
//! distributions whose e-projection is the current joint and a backward
//! m-step back onto the channel manifold. The [`infogeo`] module holds the
//! e/m projections between the channel manifold and the independence
//! manifold, and [`verify`] provides independent oracles (grid search,
//! circumcenter and converse checks).
//!
//! All internal quantities are in nats.
//!
//! ```
//! use dmc_capacity::{Channel, ChannelKind, SolveOptions, solve_arimoto, nats_to_bits};
//!
//! let bsc = Channel::canonical(ChannelKind::Bsc(0.1)).unwrap();
//! let (result, _trace) = solve_arimoto(&bsc, &SolveOptions::default()).unwrap();
//! assert!((nats_to_bits(result.capacity) - 0.531_004_4).abs() < 1e-6);
//! ```

pub mod arimoto;
pub mod backward_em;
pub mod channel;
pub mod cli;
pub mod error;
pub mod infogeo;
pub mod prob;
pub mod verify;

pub use arimoto::{
    arimoto_step, capacity_bracket, per_input_divergences, solve_arimoto, CapacityResult,
    IterationRecord, IterationTrace, SolveOptions, StepKind, Termination,
};
pub use backward_em::{
    approximate_m_step, backward_e_member, exact_backward_m_step, geometric_mixture_check, log_phi,
    solve_backward_em, BackwardEmOptions, BackwardFamilyMember, MStepOptions, MStepOutcome,
    MStepStatus, MixtureCheck,
};
pub use channel::{load_channel, load_channel_with_warnings, Channel, ChannelFormat, ChannelKind, IngestWarning};
pub use error::{Error, Result};
pub use infogeo::{capacity_distance, e_project_to_m, m_project_to_e, ProductPoint};
pub use prob::{
    bits_to_nats, kl_divergence, log_sum_exp, mutual_information, nats_to_bits, Distribution,
    JointDistribution,
};
pub use verify::{brute_force_capacity, circumcenter_check, converse_check, CircumcenterReport};
