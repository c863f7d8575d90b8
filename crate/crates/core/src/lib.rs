//! Memory-one strategies in the iterated prisoner's dilemma.
//!
//! The crate computes the long-run behaviour of the four-state Markov chain
//! induced by two memory-one strategies, decomposes Press-Dyson vectors
//! against zero-determinant and deformed (monomial / exponential) payoff
//! bases, and evaluates the payoff moments and moment generating functions
//! those decompositions constrain. The headline fact it checks is that
//! Tit-for-Tat forces both players' payoff distributions to coincide,
//! whatever the opponent does.
//!
//! Most of the algebra is generic over [`Scalar`], so the same code runs on
//! `f64`, `f32` and exact [`BigRational`](num_rational::BigRational)s.
//! Iterative solvers, exponentials and least squares need [`Real`].
//!
//! Joint states are always indexed `CC = 0, CD = 1, DC = 2, DD = 3`, with
//! player 1's action first.

pub mod error;
pub mod game;
mod linalg;
pub mod markov;
pub mod moments;
pub mod montecarlo;
pub mod press_dyson;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use game::{
    named_strategy, payoff_vector, transform_exp, transform_power, transition_matrix, Action,
    JointState, MemoryOneStrategy, PayoffMatrix, PayoffOrdering, PayoffVector, Player,
    StrategySpec, TransitionMatrix, VectorLabel,
};
pub use markov::{
    cesaro_limit, cesaro_limit_exact, classify, evolve, long_run, stationary_exact,
    stationary_power, ChainStructure, ClassKind, CommunicatingClass, LimitMethod, LimitResult,
    StateDistribution,
};
pub use moments::{
    cross_moment, distributions_equal, mgf, moment, payoff_distribution, relation_value,
    PayoffDistribution,
};
pub use montecarlo::{
    empirical_vs_exact, simulate, EmpiricalComparison, InitialCondition, SimulationConfig,
    SimulationReport, PRNG_ID,
};
pub use press_dyson::{
    akin_residual, decompose, press_dyson, tft_exponential_identity, tft_power_identity,
    wsls_coefficients, wsls_coefficients_exact, BasisSpec, DecompositionResult, IdentityCheck,
    PressDysonVector,
};
pub use scalar::{Real, Scalar};
pub use verify::{check_tft, TftCheck, TftCheckConfig};

/// Exact rational scalar.
pub type Exact = num_rational::BigRational;

pub type PayoffMatrixF64 = PayoffMatrix<f64>;
pub type StrategyF64 = MemoryOneStrategy<f64>;
pub type TransitionMatrixF64 = TransitionMatrix<f64>;
pub type DistributionF64 = StateDistribution<f64>;
pub type PressDysonF64 = PressDysonVector<f64>;

pub type PayoffMatrixExact = PayoffMatrix<Exact>;
pub type StrategyExact = MemoryOneStrategy<Exact>;
pub type TransitionMatrixExact = TransitionMatrix<Exact>;
pub type DistributionExact = StateDistribution<Exact>;
