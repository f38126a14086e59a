//! Time-dependent Pauli dynamical maps on a single qubit: closed-form maps,
//! canonical decay rates, singularity analysis, mixtures of flip channels and
//! a master-equation integrator.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod error;
pub mod families;
pub mod generator;
pub mod mixing;
pub mod numerics;
pub mod scenarios;
pub mod sim;

pub use channel::{Axis, BlochState, CpCheck, PauliChannel, ProbabilityVector};
pub use error::{Error, Result};
pub use generator::{
    decay_rates, is_cp_divisible, singular_points, DecayRates, DivisibilityVerdict, Scan, SingularityKind,
    SingularityReport,
};
pub use mixing::{mix, mix_flips, ChannelType, DecoherenceFunction, Lemma1Config, Lemma1Report, MixtureWeights};
pub use numerics::{Poles, TimeFunction};
pub use sim::{evolve, roundtrip_error, Excision, TrajectoryRecord};
