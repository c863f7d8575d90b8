//! Evolution and long-run behaviour of the four-state chain.
//!
//! Deterministic strategies routinely produce reducible or periodic chains
//! (TFT against TFT has three recurrent classes, one of them a 2-cycle), so
//! the canonical long-run object here is the Cesàro limit
//! `lim (1/n) sum_{t<n} M^t pi_0` from a declared initial distribution. It
//! always exists, is always stationary, and equals the unique stationary
//! distribution whenever the chain is ergodic.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{JointState, TransitionMatrix};
use crate::linalg;
use crate::scalar::{Real, Scalar};

pub const DEFAULT_TOL: f64 = 1e-12;
/// Lazy-chain steps; the doubling solver spends `log2` of this in squarings.
pub const DEFAULT_MAX_STEPS: u64 = 1 << 60;
/// Numerical rank threshold for the exact solvers.
pub const RANK_TOL: f64 = 1e-9;

const SUM_TOL: f64 = 1e-12;

/// A probability vector over joint states.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateDistribution<T> {
    p: [T; 4],
}

impl<T: Scalar> StateDistribution<T> {
    pub fn new(p: [T; 4]) -> Result<Self> {
        if p.iter().any(|x| *x < T::zero()) {
            return Err(Error::InvalidDistribution("negative probability".into()));
        }
        let sum = p.iter().fold(T::zero(), |a, x| a + x.clone());
        if !(sum - T::one()).negligible(&T::lit(SUM_TOL)) {
            return Err(Error::InvalidDistribution(
                "probabilities do not sum to 1".into(),
            ));
        }
        Ok(StateDistribution { p })
    }

    pub fn from_f64s(p: [f64; 4]) -> Result<Self> {
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidDistribution("non-finite probability".into()));
        }
        Self::new(p.map(T::lit))
    }

    pub fn uniform() -> Self {
        let q = T::one() / T::lit(4.0);
        StateDistribution {
            p: [q.clone(), q.clone(), q.clone(), q],
        }
    }

    pub fn point(state: JointState) -> Self {
        StateDistribution {
            p: std::array::from_fn(|i| {
                if i == state.index() {
                    T::one()
                } else {
                    T::zero()
                }
            }),
        }
    }

    /// Clears rounding-level negatives and rescales to unit mass.
    fn normalized(p: [T; 4]) -> Self {
        let p = p.map(|x| if x < T::zero() { T::zero() } else { x });
        let sum = p.iter().fold(T::zero(), |a, x| a + x.clone());
        StateDistribution {
            p: p.map(|x| x / sum.clone()),
        }
    }

    pub fn probabilities(&self) -> &[T; 4] {
        &self.p
    }

    pub fn get(&self, state: JointState) -> &T {
        &self.p[state.index()]
    }

    pub fn to_f64s(&self) -> [f64; 4] {
        std::array::from_fn(|i| self.p[i].as_f64())
    }

    pub fn sup_distance(&self, other: &Self) -> T {
        sup_norm(&std::array::from_fn(|i| {
            self.p[i].clone() - other.p[i].clone()
        }))
    }
}

fn sup_norm<T: Scalar>(v: &[T; 4]) -> T {
    v.iter().map(Scalar::magnitude).fold(T::zero(), T::max_of)
}

fn apply<T: Scalar>(m: &[[T; 4]; 4], v: &[T; 4]) -> [T; 4] {
    std::array::from_fn(|i| (0..4).fold(T::zero(), |acc, j| acc + m[i][j].clone() * v[j].clone()))
}

fn residual<T: Scalar>(m: &TransitionMatrix<T>, pi: &[T; 4]) -> T {
    let next = apply(m.entries(), pi);
    sup_norm(&std::array::from_fn(|i| next[i].clone() - pi[i].clone()))
}

/// One step of the chain: `M pi`.
pub fn evolve<T: Scalar>(
    m: &TransitionMatrix<T>,
    pi: &StateDistribution<T>,
) -> StateDistribution<T> {
    StateDistribution {
        p: apply(m.entries(), &pi.p),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassKind {
    Recurrent,
    Transient,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommunicatingClass {
    pub states: Vec<JointState>,
    pub kind: ClassKind,
    /// Period of a recurrent class; `None` for transient classes.
    pub period: Option<usize>,
}

/// Communicating classes of the support graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainStructure {
    pub classes: Vec<CommunicatingClass>,
    pub ergodic: bool,
}

impl ChainStructure {
    pub fn recurrent(&self) -> impl Iterator<Item = &CommunicatingClass> {
        self.classes
            .iter()
            .filter(|c| c.kind == ClassKind::Recurrent)
    }

    pub fn is_transient(&self, state: JointState) -> bool {
        self.classes
            .iter()
            .any(|c| c.kind == ClassKind::Transient && c.states.contains(&state))
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Exact classification on the support graph (positive entries are edges).
pub fn classify<T: Scalar>(m: &TransitionMatrix<T>) -> ChainStructure {
    // edge[from][to]
    let edge: [[bool; 4]; 4] =
        std::array::from_fn(|from| std::array::from_fn(|to| m.entries()[to][from] > T::zero()));
    let mut reach = edge;
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for k in 0..4 {
        for i in 0..4 {
            for j in 0..4 {
                if reach[i][k] && reach[k][j] {
                    reach[i][j] = true;
                }
            }
        }
    }

    let mut assigned = [false; 4];
    let mut classes = Vec::new();
    for i in 0..4 {
        if assigned[i] {
            continue;
        }
        let members: Vec<usize> = (0..4).filter(|&j| reach[i][j] && reach[j][i]).collect();
        for &j in &members {
            assigned[j] = true;
        }
        let closed = members
            .iter()
            .all(|&u| (0..4).all(|v| !edge[u][v] || members.contains(&v)));
        let (kind, period) = if closed {
            (ClassKind::Recurrent, Some(class_period(&edge, &members)))
        } else {
            (ClassKind::Transient, None)
        };
        classes.push(CommunicatingClass {
            states: members.iter().map(|&j| JointState::ALL[j]).collect(),
            kind,
            period,
        });
    }

    let recurrent: Vec<_> = classes
        .iter()
        .filter(|c| c.kind == ClassKind::Recurrent)
        .collect();
    let ergodic = recurrent.len() == 1 && recurrent[0].period == Some(1);
    ChainStructure { classes, ergodic }
}

/// gcd of `level(u) + 1 - level(v)` over in-class edges, with BFS levels.
fn class_period(edge: &[[bool; 4]; 4], members: &[usize]) -> usize {
    let mut level = [usize::MAX; 4];
    let root = members[0];
    level[root] = 0;
    let mut queue = std::collections::VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &v in members {
            if edge[u][v] && level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut g = 0;
    for &u in members {
        for &v in members {
            if edge[u][v] {
                g = gcd(g, (level[u] + 1).abs_diff(level[v]));
            }
        }
    }
    g.max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitMethod {
    /// Linear solve of `(M - I) pi = 0`, `sum pi = 1`.
    ExactSolve,
    PowerIteration,
    /// Doubling iteration for the time-averaged distribution.
    Cesaro,
    /// Time-averaged distribution assembled from the class structure.
    CesaroExact,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitResult<T> {
    pub distribution: StateDistribution<T>,
    pub method: LimitMethod,
    /// False when the chain admits more than one stationary distribution.
    pub unique: bool,
    pub converged: bool,
    /// Time steps represented by the returned estimate (0 for direct solves).
    pub iterations: u64,
    /// `||M pi - pi||_inf`.
    pub residual: T,
}

/// Stationary distribution of the states in one recurrent class, embedded in
/// the full state space.
fn class_stationary<T: Scalar>(m: &TransitionMatrix<T>, states: &[JointState], tol: &T) -> [T; 4] {
    let idx: Vec<usize> = states.iter().map(|s| s.index()).collect();
    let n = idx.len();
    let mut a: Vec<Vec<T>> = idx
        .iter()
        .map(|&i| {
            idx.iter()
                .map(|&j| {
                    let id = if i == j { T::one() } else { T::zero() };
                    m.entries()[i][j].clone() - id
                })
                .collect()
        })
        .collect();
    a.push(vec![T::one(); n]);
    let mut b = vec![T::zero(); n];
    b.push(T::one());
    let local = linalg::solve(&a, &b, tol).expect("irreducible class has a unique stationary law");
    let mut full = std::array::from_fn(|_| T::zero());
    for (k, &i) in idx.iter().enumerate() {
        full[i] = local[k].clone();
    }
    full
}

/// Solves `(M - I) pi = 0` with `sum pi = 1`.
///
/// When the solution space has dimension above one, the stationary
/// distribution of the first recurrent class is returned with
/// `unique = false`.
pub fn stationary_exact<T: Scalar>(m: &TransitionMatrix<T>) -> LimitResult<T> {
    stationary_exact_with_tol(m, &T::lit(RANK_TOL))
}

pub fn stationary_exact_with_tol<T: Scalar>(m: &TransitionMatrix<T>, tol: &T) -> LimitResult<T> {
    let mut a: Vec<Vec<T>> = (0..4)
        .map(|i| {
            (0..4)
                .map(|j| {
                    let id = if i == j { T::one() } else { T::zero() };
                    m.entries()[i][j].clone() - id
                })
                .collect()
        })
        .collect();
    let null_dim = 4 - linalg::rank(a.clone(), tol);
    a.push(vec![T::one(); 4]);
    let b = [T::zero(), T::zero(), T::zero(), T::zero(), T::one()];

    let (p, unique) = match (null_dim, linalg::solve(&a, &b, tol)) {
        (1, Ok(x)) => (
            [x[0].clone(), x[1].clone(), x[2].clone(), x[3].clone()],
            true,
        ),
        _ => {
            let structure = classify(m);
            let first = structure
                .recurrent()
                .next()
                .expect("a finite chain has a recurrent class");
            (class_stationary(m, &first.states, tol), false)
        }
    };
    let distribution = StateDistribution::normalized(p);
    let residual = residual(m, &distribution.p);
    LimitResult {
        distribution,
        method: LimitMethod::ExactSolve,
        unique,
        converged: true,
        iterations: 0,
        residual,
    }
}

/// Time-averaged limit from `pi0`, assembled from the class structure:
/// per-class stationary laws weighted by absorption probabilities.
pub fn cesaro_limit_exact<T: Scalar>(
    m: &TransitionMatrix<T>,
    pi0: &StateDistribution<T>,
) -> LimitResult<T> {
    let tol = T::lit(RANK_TOL);
    let structure = classify(m);
    let transient: Vec<usize> = structure
        .classes
        .iter()
        .filter(|c| c.kind == ClassKind::Transient)
        .flat_map(|c| c.states.iter().map(|s| s.index()))
        .collect();
    let recurrent: Vec<&CommunicatingClass> = structure.recurrent().collect();

    // (I - Q^T) h = r, Q restricted to transient states
    let system: Vec<Vec<T>> = transient
        .iter()
        .map(|&i| {
            transient
                .iter()
                .map(|&j| {
                    let id = if i == j { T::one() } else { T::zero() };
                    id - m.entries()[j][i].clone()
                })
                .collect()
        })
        .collect();

    let mut limit: [T; 4] = std::array::from_fn(|_| T::zero());
    for class in &recurrent {
        let members: Vec<usize> = class.states.iter().map(|s| s.index()).collect();
        let mut mass = members.iter().fold(T::zero(), |a, &i| a + pi0.p[i].clone());
        if !transient.is_empty() {
            let rhs: Vec<T> = transient
                .iter()
                .map(|&i| {
                    members
                        .iter()
                        .fold(T::zero(), |a, &j| a + m.entries()[j][i].clone())
                })
                .collect();
            let absorb = linalg::solve(&system, &rhs, &tol)
                .expect("transient block of a finite chain is invertible");
            for (k, &i) in transient.iter().enumerate() {
                mass = mass + pi0.p[i].clone() * absorb[k].clone();
            }
        }
        let mu = class_stationary(m, &class.states, &tol);
        for i in 0..4 {
            limit[i] = limit[i].clone() + mass.clone() * mu[i].clone();
        }
    }
    let distribution = StateDistribution::normalized(limit);
    let residual = residual(m, &distribution.p);
    LimitResult {
        distribution,
        method: LimitMethod::CesaroExact,
        unique: recurrent.len() == 1,
        converged: true,
        iterations: 0,
        residual,
    }
}

fn matmul<T: Real>(a: &[[T; 4]; 4], b: &[[T; 4]; 4]) -> [[T; 4]; 4] {
    let mut out = [[T::zero(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).fold(T::zero(), |acc, k| acc + a[i][k] * b[k][j]);
        }
    }
    // keep columns stochastic against drift from repeated squaring
    for j in 0..4 {
        let sum = (0..4).fold(T::zero(), |acc, i| acc + out[i][j]);
        for row in out.iter_mut() {
            row[j] = row[j] / sum;
        }
    }
    out
}

/// Time-averaged limit of the chain started from `pi0`.
///
/// Iterates the lazy chain `L = (I + M) / 2`, whose powers converge to the
/// Cesàro projector of `M` even when `M` is periodic. `L^n pi0` is advanced
/// by repeated squaring (`n = 1, 2, 4, ...`); the run stops once the
/// estimates at `n` and `2n` agree within `tol` and `||M pi - pi||_inf <= tol`,
/// or when `n` would exceed `max_steps` (then `converged = false`).
pub fn cesaro_limit<T: Real>(
    m: &TransitionMatrix<T>,
    pi0: &StateDistribution<T>,
    tol: T,
    max_steps: u64,
) -> Result<LimitResult<T>> {
    if !(tol > T::zero()) {
        return Err(Error::NonPositiveTolerance);
    }
    let half = T::lit(0.5);
    let mut power: [[T; 4]; 4] = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let id = if i == j { T::one() } else { T::zero() };
            (id + m.entries()[i][j]) * half
        })
    });
    let mut steps: u64 = 1;
    let mut previous = pi0.p;
    let mut current = apply(&power, &pi0.p);
    let converged = loop {
        let moved = sup_norm(&std::array::from_fn(|i| current[i] - previous[i]));
        if moved < tol && residual(m, &current) <= tol {
            break true;
        }
        if steps > max_steps / 2 {
            break false;
        }
        power = matmul(&power, &power);
        steps *= 2;
        previous = current;
        current = apply(&power, &pi0.p);
    };
    let distribution = StateDistribution::normalized(current);
    let residual = residual(m, &distribution.p);
    Ok(LimitResult {
        distribution,
        method: LimitMethod::Cesaro,
        unique: classify(m).recurrent().count() == 1,
        converged,
        iterations: steps,
        residual,
    })
}

/// [`cesaro_limit`] with the default tolerance and step budget.
pub fn long_run<T: Real>(m: &TransitionMatrix<T>, pi0: &StateDistribution<T>) -> LimitResult<T> {
    cesaro_limit(m, pi0, T::lit(DEFAULT_TOL), DEFAULT_MAX_STEPS)
        .expect("default tolerance is positive")
}

/// Plain power iteration `pi <- M pi`; does not converge on periodic chains.
pub fn stationary_power<T: Real>(
    m: &TransitionMatrix<T>,
    pi0: &StateDistribution<T>,
    tol: T,
    max_steps: u64,
) -> Result<LimitResult<T>> {
    if !(tol > T::zero()) {
        return Err(Error::NonPositiveTolerance);
    }
    let mut pi = pi0.p;
    let mut steps = 0;
    let converged = loop {
        let next = apply(m.entries(), &pi);
        let moved = sup_norm(&std::array::from_fn(|i| next[i] - pi[i]));
        pi = next;
        steps += 1;
        if moved < tol {
            break true;
        }
        if steps >= max_steps {
            break false;
        }
    };
    let distribution = StateDistribution::normalized(pi);
    let residual = residual(m, &distribution.p);
    Ok(LimitResult {
        distribution,
        method: LimitMethod::PowerIteration,
        unique: classify(m).recurrent().count() == 1,
        converged,
        iterations: steps,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{transition_matrix, MemoryOneStrategy};
    use crate::scalar::ratio;
    use crate::Exact;

    type S = MemoryOneStrategy<f64>;

    fn pair(a: S, b: S) -> TransitionMatrix<f64> {
        transition_matrix(&a, &b)
    }

    fn close(a: &[f64; 4], b: &[f64; 4], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn evolve_identity_and_trace() {
        let pi = StateDistribution::from_f64s([0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(evolve(&TransitionMatrix::identity(), &pi), pi);

        let m = pair(S::tft(), S::all_c());
        let next = evolve(&m, &StateDistribution::point(JointState::DD));
        assert_eq!(next, StateDistribution::point(JointState::DC));

        let half = S::random(0.5).unwrap();
        let next = evolve(&pair(half.clone(), half), &pi);
        assert_eq!(next.probabilities(), &[0.25; 4]);
    }

    #[test]
    fn distribution_validation() {
        assert!(StateDistribution::<f64>::from_f64s([0.5, 0.5, 0.0, 0.0]).is_ok());
        assert!(StateDistribution::<f64>::from_f64s([0.5, 0.6, 0.0, 0.0]).is_err());
        assert!(StateDistribution::<f64>::from_f64s([1.5, -0.5, 0.0, 0.0]).is_err());
    }

    #[test]
    fn classify_tft_vs_tft() {
        let s = classify(&pair(S::tft(), S::tft()));
        assert!(!s.ergodic);
        let rec: Vec<_> = s.recurrent().collect();
        assert_eq!(rec.len(), 3);
        let cycle = rec
            .iter()
            .find(|c| c.states.len() == 2)
            .expect("CD/DC cycle");
        assert_eq!(cycle.states, vec![JointState::CD, JointState::DC]);
        assert_eq!(cycle.period, Some(2));
        assert!(rec
            .iter()
            .filter(|c| c.states.len() == 1)
            .all(|c| c.period == Some(1)));
    }

    #[test]
    fn classify_tft_vs_all_c() {
        let s = classify(&pair(S::tft(), S::all_c()));
        let rec: Vec<_> = s.recurrent().collect();
        assert_eq!(rec.len(), 1);
        assert_eq!(rec[0].states, vec![JointState::CC]);
        for st in [JointState::CD, JointState::DC, JointState::DD] {
            assert!(s.is_transient(st));
        }
        // single absorbing state is aperiodic, so the chain counts as ergodic
        assert!(s.ergodic);
    }

    #[test]
    fn classify_positive_chain() {
        let half = S::random(0.5).unwrap();
        let s = classify(&pair(half.clone(), half));
        assert!(s.ergodic);
        assert_eq!(s.classes.len(), 1);
    }

    #[test]
    fn exact_solver_cases() {
        let r = stationary_exact(&pair(S::tft(), S::all_c()));
        assert!(r.unique);
        assert!(close(
            r.distribution.probabilities(),
            &[1.0, 0.0, 0.0, 0.0],
            1e-15
        ));

        let half = S::random(0.5).unwrap();
        let r = stationary_exact(&pair(half.clone(), half));
        assert!(close(r.distribution.probabilities(), &[0.25; 4], 1e-15));

        let r = stationary_exact(&pair(S::tft(), S::tft()));
        assert!(!r.unique);
        assert!(r.residual <= 1e-15);
    }

    #[test]
    fn exact_solver_over_rationals() {
        let s1 =
            MemoryOneStrategy::new([ratio(1, 2), ratio(1, 3), ratio(1, 4), ratio(1, 5)]).unwrap();
        let s2 = MemoryOneStrategy::<Exact>::wsls()
            .tremble(ratio(1, 10))
            .unwrap();
        let m = transition_matrix(&s1, &s2);
        let r = stationary_exact(&m);
        assert!(r.unique);
        assert_eq!(r.residual, ratio(0, 1));
        let sum = r
            .distribution
            .probabilities()
            .iter()
            .fold(ratio(0, 1), |a, x| a + x.clone());
        assert_eq!(sum, ratio(1, 1));
    }

    #[test]
    fn cesaro_cycle_average() {
        let m = pair(S::tft(), S::tft());
        let r = cesaro_limit(
            &m,
            &StateDistribution::point(JointState::CD),
            1e-12,
            DEFAULT_MAX_STEPS,
        )
        .unwrap();
        assert!(r.converged);
        assert!(close(
            r.distribution.probabilities(),
            &[0.0, 0.5, 0.5, 0.0],
            1e-12
        ));

        let exact = cesaro_limit_exact(
            &transition_matrix(
                &MemoryOneStrategy::<Exact>::tft(),
                &MemoryOneStrategy::tft(),
            ),
            &StateDistribution::point(JointState::CD),
        );
        assert_eq!(
            exact.distribution.probabilities(),
            &[ratio(0, 1), ratio(1, 2), ratio(1, 2), ratio(0, 1)]
        );
    }

    #[test]
    fn cesaro_uniform_start_on_tft_pair() {
        // CC and DD absorb their own mass, the cycle keeps its half
        let exact = cesaro_limit_exact(
            &transition_matrix(
                &MemoryOneStrategy::<Exact>::tft(),
                &MemoryOneStrategy::tft(),
            ),
            &StateDistribution::uniform(),
        );
        assert_eq!(
            exact.distribution.probabilities(),
            &std::array::from_fn::<_, 4, _>(|_| ratio(1, 4))
        );
    }

    #[test]
    fn cesaro_absorbs_into_cc() {
        let m = pair(S::tft(), S::all_c());
        for start in JointState::ALL {
            let r = cesaro_limit(
                &m,
                &StateDistribution::point(start),
                1e-12,
                DEFAULT_MAX_STEPS,
            )
            .unwrap();
            assert!(close(
                r.distribution.probabilities(),
                &[1.0, 0.0, 0.0, 0.0],
                1e-12
            ));
        }
    }

    #[test]
    fn non_positive_tolerance_rejected() {
        let m = pair(S::tft(), S::all_c());
        assert_eq!(
            cesaro_limit(&m, &StateDistribution::uniform(), 0.0, 10),
            Err(Error::NonPositiveTolerance)
        );
    }

    #[test]
    fn step_budget_reports_unconverged() {
        let m = pair(S::tft(), S::tft().tremble(1e-6).unwrap());
        let r = cesaro_limit(&m, &StateDistribution::point(JointState::CD), 1e-12, 4).unwrap();
        assert!(!r.converged);
        assert!(r.iterations <= 4);
    }

    #[test]
    fn power_iteration_fails_on_periodic_chain() {
        let m = pair(S::tft(), S::tft());
        let r =
            stationary_power(&m, &StateDistribution::point(JointState::CD), 1e-12, 1000).unwrap();
        assert!(!r.converged);
        let half = S::random(0.5).unwrap();
        let r = stationary_power(
            &pair(half.clone(), half),
            &StateDistribution::point(JointState::CD),
            1e-12,
            1000,
        )
        .unwrap();
        assert!(r.converged);
    }
}
