//! Checks that TFT equalizes both players' payoff moments, moment generating
//! functions and payoff distributions against a given opponent.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{
    payoff_vector, transition_matrix, JointState, MemoryOneStrategy, PayoffMatrix, Player,
};
use crate::markov::{cesaro_limit, LimitResult, StateDistribution, DEFAULT_MAX_STEPS, DEFAULT_TOL};
use crate::moments::{distributions_equal, mgf, moment, payoff_distribution};

/// Orders above this lose too much precision in `f64` for typical payoffs.
pub const MAX_MOMENT_ORDER: u32 = 20;

pub const DEFAULT_H_GRID: [f64; 8] = [-2.0, -1.0, -0.5, -0.1, 0.1, 0.5, 1.0, 2.0];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TftCheckConfig {
    pub max_moment: u32,
    pub h_grid: Vec<f64>,
    /// Bound on moment, MGF and distribution deviations.
    pub tol: f64,
    /// Bound on `|pi[CD] - pi[DC]|`.
    pub structural_tol: f64,
    pub initial: StateDistribution<f64>,
}

impl Default for TftCheckConfig {
    fn default() -> Self {
        TftCheckConfig {
            max_moment: 6,
            h_grid: DEFAULT_H_GRID.to_vec(),
            tol: 1e-8,
            structural_tol: 1e-10,
            initial: StateDistribution::uniform(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TftCheck {
    pub opponent: [f64; 4],
    pub limit: LimitResult<f64>,
    /// `(k, |<s1^k> - <s2^k>|)`.
    pub moment_deviations: Vec<(u32, f64)>,
    /// `(h, |<e^{h s1}> - <e^{h s2}>|)`.
    pub mgf_deviations: Vec<(f64, f64)>,
    /// `pi[CD] - pi[DC]`.
    pub cd_minus_dc: f64,
    pub distributions_equal: bool,
    pub passed: bool,
}

/// Runs TFT (seat 1) against `opponent` (seat 2) and checks every equality.
pub fn check_tft(
    opponent: &MemoryOneStrategy<f64>,
    m: &PayoffMatrix<f64>,
    cfg: &TftCheckConfig,
) -> Result<TftCheck> {
    if cfg.max_moment == 0 || cfg.max_moment > MAX_MOMENT_ORDER {
        return Err(Error::ZeroPower(cfg.max_moment));
    }
    let chain = transition_matrix(&MemoryOneStrategy::tft(), opponent);
    let limit = cesaro_limit(&chain, &cfg.initial, DEFAULT_TOL, DEFAULT_MAX_STEPS)?;
    let pi = &limit.distribution;
    let s1 = payoff_vector(m, Player::One);
    let s2 = payoff_vector(m, Player::Two);

    let moment_deviations: Vec<(u32, f64)> = (1..=cfg.max_moment)
        .map(|k| (k, (moment(&s1, pi, k) - moment(&s2, pi, k)).abs()))
        .collect();
    let mgf_deviations = cfg
        .h_grid
        .iter()
        .map(|&h| Ok((h, (mgf(&s1, pi, h)? - mgf(&s2, pi, h)?).abs())))
        .collect::<Result<Vec<_>>>()?;
    let cd_minus_dc = pi.get(JointState::CD) - pi.get(JointState::DC);
    let distributions_equal = distributions_equal(
        &payoff_distribution(&s1, pi),
        &payoff_distribution(&s2, pi),
        &cfg.tol,
    );

    let passed = limit.converged
        && moment_deviations.iter().all(|(_, d)| *d <= cfg.tol)
        && mgf_deviations.iter().all(|(_, d)| *d <= cfg.tol)
        && cd_minus_dc.abs() <= cfg.structural_tol
        && distributions_equal;
    Ok(TftCheck {
        opponent: opponent.to_f64s(),
        limit,
        moment_deviations,
        mgf_deviations,
        cd_minus_dc,
        distributions_equal,
        passed,
    })
}
