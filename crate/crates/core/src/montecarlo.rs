//! Seeded round-by-round simulation of repeated play.
//!
//! Every round consumes exactly two uniforms from the generator, player 1's
//! first. A uniform is `(next_u64 >> 11) * 2^-53` and a player cooperates
//! when it is below their (noise-mixed) cooperation probability. The
//! generator is xoshiro256** seeded through SplitMix64, so a run can be
//! replayed in any language that implements those two algorithms.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{
    payoff_vector, transition_matrix, Action, JointState, MemoryOneStrategy, PayoffMatrix, Player,
};
use crate::markov::{cesaro_limit, LimitResult, StateDistribution, DEFAULT_MAX_STEPS, DEFAULT_TOL};
use crate::moments::{moment, payoff_distribution};

pub const PRNG_ID: &str = "xoshiro256starstar-splitmix64";

const UNIT: f64 = 1.0 / (1u64 << 53) as f64;

/// Uniform on `[0, 1)` from the top 53 bits of one draw.
pub fn uniform(rng: &mut Xoshiro256StarStar) -> f64 {
    (rng.next_u64() >> 11) as f64 * UNIT
}

/// Seed for trial `index` of a sweep started from `base`.
pub fn trial_seed(base: u64, index: u64) -> u64 {
    base.wrapping_add(index)
}

/// Fresh generator for `seed`.
pub fn generator(seed: u64) -> Xoshiro256StarStar {
    Xoshiro256StarStar::seed_from_u64(seed)
}

/// Four uniforms from `seed`: a random memory-one strategy.
pub fn random_strategy(seed: u64) -> MemoryOneStrategy<f64> {
    let mut rng = generator(seed);
    let p = std::array::from_fn(|_| uniform(&mut rng));
    MemoryOneStrategy::from_f64s(p).expect("uniforms lie in [0, 1)")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialCondition {
    State(JointState),
    /// The first state is drawn from this distribution with one extra draw.
    Distribution([f64; 4]),
}

impl InitialCondition {
    pub fn distribution(&self) -> Result<StateDistribution<f64>> {
        match self {
            InitialCondition::State(s) => Ok(StateDistribution::point(*s)),
            InitialCondition::Distribution(p) => StateDistribution::from_f64s(*p),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationConfig {
    /// Total rounds, including the initial one.
    pub rounds: u64,
    pub seed: u64,
    pub initial: InitialCondition,
    /// Leading rounds excluded from the statistics.
    pub burn_in: u64,
    /// Trembling-hand noise mixed into both strategies, in `[0, 1/2]`.
    pub epsilon: f64,
    /// Highest empirical payoff moment reported.
    pub max_moment: u32,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            rounds: 1_000_000,
            seed: 0,
            initial: InitialCondition::Distribution([0.25; 4]),
            burn_in: 1_000,
            epsilon: 0.0,
            max_moment: 3,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.burn_in >= self.rounds {
            return Err(Error::EmptySample {
                rounds: self.rounds,
                burn_in: self.burn_in,
            });
        }
        if !(0.0..=0.5).contains(&self.epsilon) {
            return Err(Error::EpsilonOutOfRange(self.epsilon));
        }
        self.initial.distribution()?;
        Ok(())
    }

    pub fn recorded_rounds(&self) -> u64 {
        self.rounds - self.burn_in
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlayerStatistics {
    /// `<s^k>` for `k = 1..=max_moment`.
    pub moments: Vec<f64>,
    /// `(payoff, rounds)` pairs in increasing payoff order.
    pub histogram: Vec<(f64, u64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub prng: String,
    pub config: SimulationConfig,
    pub payoffs: [f64; 4],
    pub counts: [u64; 4],
    pub frequencies: [f64; 4],
    pub player1: PlayerStatistics,
    pub player2: PlayerStatistics,
    /// Mean of the per-round payoff difference `s1 - s2`.
    pub difference_mean: f64,
    /// `sqrt(var(s1 - s2) / n)` from the empirical variance.
    pub difference_std_error: f64,
}

fn player_statistics(
    m: &PayoffMatrix<f64>,
    player: Player,
    counts: &[u64; 4],
    freq: &StateDistribution<f64>,
    max_moment: u32,
) -> PlayerStatistics {
    let v = payoff_vector(m, player);
    let moments = (1..=max_moment).map(|k| moment(&v, freq, k)).collect();
    let mut histogram: Vec<(f64, u64)> = payoff_distribution(&v, freq)
        .atoms
        .iter()
        .map(|(value, _)| (*value, 0))
        .collect();
    for state in JointState::ALL {
        if let Some(bin) = histogram
            .iter_mut()
            .find(|(value, _)| *value == *v.get(state))
        {
            bin.1 += counts[state.index()];
        }
    }
    PlayerStatistics { moments, histogram }
}

fn act(strategy: &MemoryOneStrategy<f64>, player: Player, previous: JointState, u: f64) -> Action {
    if u < strategy.cooperation(player, previous) {
        Action::C
    } else {
        Action::D
    }
}

/// Plays `cfg.rounds` rounds and tallies the states after the burn-in.
pub fn simulate(
    s1: &MemoryOneStrategy<f64>,
    s2: &MemoryOneStrategy<f64>,
    m: &PayoffMatrix<f64>,
    cfg: &SimulationConfig,
) -> Result<SimulationReport> {
    cfg.validate()?;
    let p1 = s1.tremble(cfg.epsilon)?;
    let p2 = s2.tremble(cfg.epsilon)?;
    let mut rng = generator(cfg.seed);

    let mut state = match &cfg.initial {
        InitialCondition::State(s) => *s,
        InitialCondition::Distribution(p) => {
            let u = uniform(&mut rng);
            let mut acc = 0.0;
            let mut pick = JointState::DD;
            for (state, q) in JointState::ALL.iter().zip(p) {
                acc += q;
                if u < acc {
                    pick = *state;
                    break;
                }
            }
            pick
        }
    };

    let mut counts = [0u64; 4];
    for round in 1..=cfg.rounds {
        if round > 1 {
            let u1 = uniform(&mut rng);
            let u2 = uniform(&mut rng);
            state = JointState::new(
                act(&p1, Player::One, state, u1),
                act(&p2, Player::Two, state, u2),
            );
        }
        if round > cfg.burn_in {
            counts[state.index()] += 1;
        }
    }

    let n = cfg.recorded_rounds() as f64;
    let frequencies = counts.map(|c| c as f64 / n);
    let freq = StateDistribution::from_f64s(frequencies)?;

    let s1v = payoff_vector(m, Player::One);
    let s2v = payoff_vector(m, Player::Two);
    let diff: [f64; 4] = std::array::from_fn(|i| s1v.values[i] - s2v.values[i]);
    let difference_mean: f64 = (0..4).map(|i| diff[i] * frequencies[i]).sum();
    let second: f64 = (0..4).map(|i| diff[i] * diff[i] * frequencies[i]).sum();
    let variance = (second - difference_mean * difference_mean).max(0.0);

    Ok(SimulationReport {
        prng: PRNG_ID.to_string(),
        config: cfg.clone(),
        payoffs: m.to_f64s(),
        counts,
        frequencies,
        player1: player_statistics(m, Player::One, &counts, &freq, cfg.max_moment),
        player2: player_statistics(m, Player::Two, &counts, &freq, cfg.max_moment),
        difference_mean,
        difference_std_error: (variance / n).sqrt(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalComparison {
    pub report: SimulationReport,
    pub exact: LimitResult<f64>,
    /// Empirical minus exact frequency per state.
    pub deviations: [f64; 4],
    /// `tol_sigma * sqrt(pi (1 - pi) / n) + 1/n` per state.
    pub bounds: [f64; 4],
    pub flagged: Vec<JointState>,
}

/// Simulates and compares state frequencies against the time-averaged
/// limit of the (noise-mixed) chain started from `cfg.initial`.
pub fn empirical_vs_exact(
    s1: &MemoryOneStrategy<f64>,
    s2: &MemoryOneStrategy<f64>,
    m: &PayoffMatrix<f64>,
    cfg: &SimulationConfig,
    tol_sigma: f64,
) -> Result<EmpiricalComparison> {
    let report = simulate(s1, s2, m, cfg)?;
    let chain = transition_matrix(&s1.tremble(cfg.epsilon)?, &s2.tremble(cfg.epsilon)?);
    let exact = cesaro_limit(
        &chain,
        &cfg.initial.distribution()?,
        DEFAULT_TOL,
        DEFAULT_MAX_STEPS,
    )?;
    let n = cfg.recorded_rounds() as f64;
    let pi = exact.distribution.to_f64s();
    let deviations = std::array::from_fn(|i| report.frequencies[i] - pi[i]);
    let bounds: [f64; 4] =
        std::array::from_fn(|i| tol_sigma * (pi[i] * (1.0 - pi[i]) / n).sqrt() + 1.0 / n);
    let flagged = JointState::ALL
        .into_iter()
        .filter(|s| deviations[s.index()].abs() > bounds[s.index()])
        .collect();
    Ok(EmpiricalComparison {
        report,
        exact,
        deviations,
        bounds,
        flagged,
    })
}
