//! Payoffs, joint states, memory-one strategies and the one-step transition
//! matrix of a strategy pair.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    C,
    D,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Player::One => 1,
            Player::Two => 2,
        }
    }
}

/// The pair of actions played in one round, player 1 first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JointState {
    pub first: Action,
    pub second: Action,
}

impl JointState {
    pub const CC: JointState = JointState::new(Action::C, Action::C);
    pub const CD: JointState = JointState::new(Action::C, Action::D);
    pub const DC: JointState = JointState::new(Action::D, Action::C);
    pub const DD: JointState = JointState::new(Action::D, Action::D);

    /// All states in canonical index order.
    pub const ALL: [JointState; 4] = [Self::CC, Self::CD, Self::DC, Self::DD];

    pub const fn new(first: Action, second: Action) -> Self {
        JointState { first, second }
    }

    pub const fn index(self) -> usize {
        let hi = match self.first {
            Action::C => 0,
            Action::D => 2,
        };
        let lo = match self.second {
            Action::C => 0,
            Action::D => 1,
        };
        hi + lo
    }

    pub fn from_index(index: usize) -> Option<JointState> {
        Self::ALL.get(index).copied()
    }

    pub fn action(self, player: Player) -> Action {
        match player {
            Player::One => self.first,
            Player::Two => self.second,
        }
    }

    /// The same round seen from player 2's side (`CD <-> DC`).
    pub fn swapped(self) -> JointState {
        JointState::new(self.second, self.first)
    }

    /// The state as `player` sees it: own action first.
    pub fn from_perspective(self, player: Player) -> JointState {
        match player {
            Player::One => self,
            Player::Two => self.swapped(),
        }
    }

    pub fn label(self) -> &'static str {
        ["CC", "CD", "DC", "DD"][self.index()]
    }
}

impl fmt::Display for JointState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for JointState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cc" => Ok(Self::CC),
            "cd" => Ok(Self::CD),
            "dc" => Ok(Self::DC),
            "dd" => Ok(Self::DD),
            _ => Err(Error::UnknownState(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PayoffOrdering {
    /// `T > R > P > S` and `2R > T + S`.
    Strict,
    /// Only `T != S`.
    Permissive,
}

/// The four prisoner's dilemma payoffs `(R, S, T, P)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PayoffMatrix<T> {
    reward: T,
    sucker: T,
    temptation: T,
    punishment: T,
    ordering: PayoffOrdering,
}

impl<T: Scalar> PayoffMatrix<T> {
    /// Payoffs satisfying the strict prisoner's dilemma ordering.
    pub fn new(reward: T, sucker: T, temptation: T, punishment: T) -> Result<Self> {
        Self::with_ordering(
            reward,
            sucker,
            temptation,
            punishment,
            PayoffOrdering::Strict,
        )
    }

    /// Payoffs that only need `T != S`; used to probe degenerate games.
    pub fn permissive(reward: T, sucker: T, temptation: T, punishment: T) -> Result<Self> {
        Self::with_ordering(
            reward,
            sucker,
            temptation,
            punishment,
            PayoffOrdering::Permissive,
        )
    }

    pub fn with_ordering(
        reward: T,
        sucker: T,
        temptation: T,
        punishment: T,
        ordering: PayoffOrdering,
    ) -> Result<Self> {
        match ordering {
            PayoffOrdering::Strict => {
                if !(temptation > reward && reward > punishment && punishment > sucker) {
                    return Err(Error::PayoffOrdering("need T > R > P > S".into()));
                }
                let two = T::one() + T::one();
                if two * reward.clone() <= temptation.clone() + sucker.clone() {
                    return Err(Error::PayoffOrdering("need 2R > T + S".into()));
                }
            }
            PayoffOrdering::Permissive => {
                if temptation == sucker {
                    return Err(Error::PayoffOrdering("permissive mode needs T != S".into()));
                }
            }
        }
        Ok(PayoffMatrix {
            reward,
            sucker,
            temptation,
            punishment,
            ordering,
        })
    }

    /// Builds from `[R, S, T, P]` given as floats.
    pub fn from_f64s(values: [f64; 4], ordering: PayoffOrdering) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::PayoffOrdering("payoffs must be finite".into()));
        }
        let [r, s, t, p] = values.map(T::lit);
        Self::with_ordering(r, s, t, p, ordering)
    }

    pub fn reward(&self) -> &T {
        &self.reward
    }

    pub fn sucker(&self) -> &T {
        &self.sucker
    }

    pub fn temptation(&self) -> &T {
        &self.temptation
    }

    pub fn punishment(&self) -> &T {
        &self.punishment
    }

    pub fn ordering(&self) -> PayoffOrdering {
        self.ordering
    }

    /// `[R, S, T, P]` as floats.
    pub fn to_f64s(&self) -> [f64; 4] {
        [
            self.reward.as_f64(),
            self.sucker.as_f64(),
            self.temptation.as_f64(),
            self.punishment.as_f64(),
        ]
    }

    /// `s_player(state)`.
    pub fn payoff(&self, player: Player, state: JointState) -> T {
        match (state.action(player), state.action(player.other())) {
            (Action::C, Action::C) => self.reward.clone(),
            (Action::C, Action::D) => self.sucker.clone(),
            (Action::D, Action::C) => self.temptation.clone(),
            (Action::D, Action::D) => self.punishment.clone(),
        }
    }

    pub fn max_abs_payoff(&self) -> T {
        [
            &self.reward,
            &self.sucker,
            &self.temptation,
            &self.punishment,
        ]
        .into_iter()
        .map(Scalar::magnitude)
        .fold(T::zero(), T::max_of)
    }
}

impl<T: Scalar> Default for PayoffMatrix<T> {
    /// `(R, S, T, P) = (3, 0, 5, 1)`.
    fn default() -> Self {
        Self::from_f64s([3.0, 0.0, 5.0, 1.0], PayoffOrdering::Strict)
            .expect("default payoffs are a valid prisoner's dilemma")
    }
}

/// Cooperation probabilities conditioned on the previous round.
///
/// Probabilities are stored from the owner's point of view: entry `CD` is the
/// probability of cooperating after the owner cooperated and the opponent
/// defected. The same vector therefore describes the same behaviour for
/// either seat. Defection probabilities are `1 - p` and never stored.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MemoryOneStrategy<T> {
    p: [T; 4],
}

impl<T: Scalar> MemoryOneStrategy<T> {
    pub fn new(p: [T; 4]) -> Result<Self> {
        for (state, value) in JointState::ALL.iter().zip(p.iter()) {
            if *value < T::zero() || *value > T::one() {
                return Err(Error::ProbabilityOutOfRange {
                    what: format!("p_{}", state.label().to_ascii_lowercase()),
                    value: value.as_f64(),
                });
            }
        }
        Ok(MemoryOneStrategy { p })
    }

    pub fn from_f64s(p: [f64; 4]) -> Result<Self> {
        for (state, value) in JointState::ALL.iter().zip(p.iter()) {
            if !(0.0..=1.0).contains(value) {
                return Err(Error::ProbabilityOutOfRange {
                    what: format!("p_{}", state.label().to_ascii_lowercase()),
                    value: *value,
                });
            }
        }
        Self::new(p.map(T::lit))
    }

    pub fn tft() -> Self {
        Self::from_bits([1, 0, 1, 0])
    }

    pub fn wsls() -> Self {
        Self::from_bits([1, 0, 0, 1])
    }

    pub fn all_c() -> Self {
        Self::from_bits([1, 1, 1, 1])
    }

    pub fn all_d() -> Self {
        Self::from_bits([0, 0, 0, 0])
    }

    /// Cooperates with probability `q` regardless of history.
    pub fn random(q: T) -> Result<Self> {
        Self::new([q.clone(), q.clone(), q.clone(), q])
    }

    fn from_bits(bits: [u8; 4]) -> Self {
        MemoryOneStrategy {
            p: bits.map(|b| if b == 1 { T::one() } else { T::zero() }),
        }
    }

    /// Own-perspective cooperation probabilities `(p_cc, p_cd, p_dc, p_dd)`.
    pub fn probabilities(&self) -> &[T; 4] {
        &self.p
    }

    /// `T_player(C | previous)` with `previous` in canonical (player 1 first)
    /// order.
    pub fn cooperation(&self, player: Player, previous: JointState) -> T {
        self.p[previous.from_perspective(player).index()].clone()
    }

    /// `T_player(action | previous)`.
    pub fn conditional(&self, player: Player, action: Action, previous: JointState) -> T {
        let c = self.cooperation(player, previous);
        match action {
            Action::C => c,
            Action::D => T::one() - c,
        }
    }

    /// Trembling-hand mixture `(1 - eps) p + eps / 2`.
    pub fn tremble(&self, eps: T) -> Result<Self> {
        let half = T::lit(0.5);
        if eps < T::zero() || eps > half {
            return Err(Error::EpsilonOutOfRange(eps.as_f64()));
        }
        let keep = T::one() - eps.clone();
        let noise = eps * half;
        Self::new(self.p.clone().map(|p| keep.clone() * p + noise.clone()))
    }

    pub fn to_f64s(&self) -> [f64; 4] {
        [
            self.p[0].as_f64(),
            self.p[1].as_f64(),
            self.p[2].as_f64(),
            self.p[3].as_f64(),
        ]
    }
}

/// A strategy literal: named, `random:q`, inline `p_cc,p_cd,p_dc,p_dd`, or
/// the JSON object `{"p_cc": .., "p_cd": .., "p_dc": .., "p_dd": ..}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StrategySpec {
    Probabilities {
        p_cc: f64,
        p_cd: f64,
        p_dc: f64,
        p_dd: f64,
    },
    Name(String),
}

impl StrategySpec {
    pub fn resolve<T: Scalar>(&self) -> Result<MemoryOneStrategy<T>> {
        match self {
            StrategySpec::Probabilities {
                p_cc,
                p_cd,
                p_dc,
                p_dd,
            } => MemoryOneStrategy::from_f64s([*p_cc, *p_cd, *p_dc, *p_dd]),
            StrategySpec::Name(name) => named_strategy(name),
        }
    }
}

impl FromStr for StrategySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        if trimmed.starts_with('{') {
            return Err(Error::MalformedStrategy(
                "JSON literals are parsed with serde, not FromStr".into(),
            ));
        }
        // Validate eagerly so bad literals fail at parse time.
        named_strategy::<f64>(trimmed)?;
        Ok(StrategySpec::Name(trimmed.to_string()))
    }
}

impl fmt::Display for StrategySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategySpec::Name(name) => f.write_str(name),
            StrategySpec::Probabilities {
                p_cc,
                p_cd,
                p_dc,
                p_dd,
            } => write!(f, "{p_cc},{p_cd},{p_dc},{p_dd}"),
        }
    }
}

/// Resolves `tft`, `wsls`, `all_c`, `all_d`, `random:q` or `a,b,c,d`.
pub fn named_strategy<T: Scalar>(name: &str) -> Result<MemoryOneStrategy<T>> {
    let name = name.trim();
    match name.to_ascii_lowercase().as_str() {
        "tft" => return Ok(MemoryOneStrategy::tft()),
        "wsls" => return Ok(MemoryOneStrategy::wsls()),
        "all_c" | "allc" => return Ok(MemoryOneStrategy::all_c()),
        "all_d" | "alld" => return Ok(MemoryOneStrategy::all_d()),
        _ => {}
    }
    if let Some(q) = name.strip_prefix("random:") {
        let q: f64 = q
            .trim()
            .parse()
            .map_err(|_| Error::MalformedStrategy(name.to_string()))?;
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::ProbabilityOutOfRange {
                what: "random".into(),
                value: q,
            });
        }
        return MemoryOneStrategy::random(T::lit(q));
    }
    if name.contains(',') {
        let parts: Vec<f64> = name
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::MalformedStrategy(name.to_string()))?;
        let p: [f64; 4] = parts
            .try_into()
            .map_err(|_| Error::MalformedStrategy(name.to_string()))?;
        return MemoryOneStrategy::from_f64s(p);
    }
    Err(Error::UnknownStrategy(name.to_string()))
}

/// What a [`PayoffVector`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum VectorLabel {
    /// Pointwise `s1^k1 * s2^k2`; `(0, 0)` is the all-ones vector, `(1, 1)`
    /// the payoff product.
    Monomial { k1: u32, k2: u32 },
    /// Pointwise `exp(h * s_player)`.
    Exp { player: Player, h: f64 },
}

impl VectorLabel {
    pub const ONES: VectorLabel = VectorLabel::Monomial { k1: 0, k2: 0 };

    pub fn raw(player: Player) -> VectorLabel {
        match player {
            Player::One => VectorLabel::Monomial { k1: 1, k2: 0 },
            Player::Two => VectorLabel::Monomial { k1: 0, k2: 1 },
        }
    }

    fn raw_player(self) -> Option<Player> {
        match self {
            VectorLabel::Monomial { k1: 1, k2: 0 } => Some(Player::One),
            VectorLabel::Monomial { k1: 0, k2: 1 } => Some(Player::Two),
            _ => None,
        }
    }
}

impl fmt::Display for VectorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn factor(f: &mut fmt::Formatter<'_>, name: &str, k: u32) -> fmt::Result {
            match k {
                1 => f.write_str(name),
                _ => write!(f, "{name}^{k}"),
            }
        }
        match *self {
            VectorLabel::Monomial { k1: 0, k2: 0 } => f.write_str("1"),
            VectorLabel::Monomial { k1, k2: 0 } => factor(f, "s1", k1),
            VectorLabel::Monomial { k1: 0, k2 } => factor(f, "s2", k2),
            VectorLabel::Monomial { k1, k2 } => {
                factor(f, "s1", k1)?;
                f.write_str("*")?;
                factor(f, "s2", k2)
            }
            VectorLabel::Exp { player, h } => write!(f, "exp({h}*s{})", player.number()),
        }
    }
}

/// A real vector indexed by joint state, tagged with how it was produced.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PayoffVector<T> {
    pub values: [T; 4],
    pub label: VectorLabel,
}

impl<T: Scalar> PayoffVector<T> {
    pub fn ones() -> Self {
        PayoffVector {
            values: [T::one(), T::one(), T::one(), T::one()],
            label: VectorLabel::ONES,
        }
    }

    /// Pointwise `s1^k1 * s2^k2` for the given payoffs.
    pub fn monomial(m: &PayoffMatrix<T>, k1: u32, k2: u32) -> Self {
        let s1 = payoff_vector(m, Player::One);
        let s2 = payoff_vector(m, Player::Two);
        let values =
            std::array::from_fn(|i| s1.values[i].powi_exact(k1) * s2.values[i].powi_exact(k2));
        PayoffVector {
            values,
            label: VectorLabel::Monomial { k1, k2 },
        }
    }

    /// Pointwise product of two monomial vectors.
    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        let label = match (self.label, other.label) {
            (
                VectorLabel::Monomial { k1: a1, k2: a2 },
                VectorLabel::Monomial { k1: b1, k2: b2 },
            ) => VectorLabel::Monomial {
                k1: a1 + b1,
                k2: a2 + b2,
            },
            (VectorLabel::Exp { player: p, h: a }, VectorLabel::Exp { player: q, h: b })
                if p == q =>
            {
                VectorLabel::Exp {
                    player: p,
                    h: a + b,
                }
            }
            (a, b) => return Err(Error::UnsupportedTransform(format!("{a} * {b}"))),
        };
        let values = std::array::from_fn(|i| self.values[i].clone() * other.values[i].clone());
        Ok(PayoffVector { values, label })
    }

    pub fn get(&self, state: JointState) -> &T {
        &self.values[state.index()]
    }

    pub fn dot(&self, weights: &[T; 4]) -> T {
        self.values
            .iter()
            .zip(weights)
            .fold(T::zero(), |acc, (v, w)| acc + v.clone() * w.clone())
    }
}

/// `s_1 = (R, S, T, P)` or `s_2 = (R, T, S, P)`.
pub fn payoff_vector<T: Scalar>(m: &PayoffMatrix<T>, player: Player) -> PayoffVector<T> {
    PayoffVector {
        values: JointState::ALL.map(|state| m.payoff(player, state)),
        label: VectorLabel::raw(player),
    }
}

/// Componentwise `k`-th power.
pub fn transform_power<T: Scalar>(v: &PayoffVector<T>, k: u32) -> Result<PayoffVector<T>> {
    if k == 0 {
        return Err(Error::ZeroPower(k));
    }
    let label = match v.label {
        VectorLabel::Monomial { k1, k2 } => VectorLabel::Monomial {
            k1: k1 * k,
            k2: k2 * k,
        },
        VectorLabel::Exp { player, h } => VectorLabel::Exp {
            player,
            h: h * f64::from(k),
        },
    };
    Ok(PayoffVector {
        values: v.values.clone().map(|x| x.powi_exact(k)),
        label,
    })
}

/// Componentwise `exp(h * v)` of a raw payoff vector.
pub fn transform_exp<T: Real>(v: &PayoffVector<T>, h: T) -> Result<PayoffVector<T>> {
    if h == T::zero() {
        return Err(Error::ZeroExponent);
    }
    let player = v
        .label
        .raw_player()
        .ok_or_else(|| Error::UnsupportedTransform(format!("exp of {}", v.label)))?;
    let largest = v.values.iter().fold(T::zero(), |acc, x| acc.max(x.abs()));
    let extent = h.abs() * largest;
    if extent > T::lit(700.0) {
        return Err(Error::ExponentRange(extent.as_f64()));
    }
    Ok(PayoffVector {
        values: v.values.map(|x| (h * x).exp()),
        label: VectorLabel::Exp {
            player,
            h: h.as_f64(),
        },
    })
}

/// Column-stochastic one-step kernel: `entry(next, previous)` is the
/// probability of moving from `previous` to `next`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionMatrix<T> {
    m: [[T; 4]; 4],
}

impl<T: Scalar> TransitionMatrix<T> {
    /// Wraps raw entries `m[next][previous]`, checking stochasticity.
    pub fn from_entries(m: [[T; 4]; 4]) -> Result<Self> {
        let tol = T::lit(1e-12);
        for col in 0..4 {
            let mut sum = T::zero();
            for row in m.iter() {
                if row[col] < T::zero() || row[col] > T::one() {
                    return Err(Error::ProbabilityOutOfRange {
                        what: format!("transition entry in column {col}"),
                        value: row[col].as_f64(),
                    });
                }
                sum = sum + row[col].clone();
            }
            if !(sum - T::one()).negligible(&tol) {
                return Err(Error::InvalidDistribution(format!(
                    "column {col} does not sum to 1"
                )));
            }
        }
        Ok(TransitionMatrix { m })
    }

    pub fn identity() -> Self {
        TransitionMatrix {
            m: std::array::from_fn(|i| {
                std::array::from_fn(|j| if i == j { T::one() } else { T::zero() })
            }),
        }
    }

    pub fn entry(&self, next: JointState, previous: JointState) -> &T {
        &self.m[next.index()][previous.index()]
    }

    /// Rows are next states, columns previous states.
    pub fn entries(&self) -> &[[T; 4]; 4] {
        &self.m
    }

    /// Relabels states `CD <-> DC`, i.e. the chain seen with seats swapped.
    pub fn conjugate_swap(&self) -> Self {
        let p = |i: usize| JointState::ALL[i].swapped().index();
        TransitionMatrix {
            m: std::array::from_fn(|i| std::array::from_fn(|j| self.m[p(i)][p(j)].clone())),
        }
    }

    pub fn to_f64(&self) -> TransitionMatrix<f64> {
        TransitionMatrix {
            m: std::array::from_fn(|i| std::array::from_fn(|j| self.m[i][j].as_f64())),
        }
    }
}

/// `M[s][s'] = T1(s_1 | s') * T2(s_2 | s')`.
pub fn transition_matrix<T: Scalar>(
    s1: &MemoryOneStrategy<T>,
    s2: &MemoryOneStrategy<T>,
) -> TransitionMatrix<T> {
    let m = std::array::from_fn(|next| {
        let next = JointState::ALL[next];
        std::array::from_fn(|prev| {
            let prev = JointState::ALL[prev];
            s1.conditional(Player::One, next.first, prev)
                * s2.conditional(Player::Two, next.second, prev)
        })
    });
    TransitionMatrix { m }
}
