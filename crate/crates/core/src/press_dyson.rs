//! Press-Dyson vectors and their decompositions.
//!
//! All decompositions act on the cooperation component
//! `T_a(C | s') - [s'_a = C]`; the defection component is its negative, so
//! any other choice of action weights only rescales coefficients.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{
    payoff_vector, transform_exp, Action, JointState, MemoryOneStrategy, PayoffMatrix,
    PayoffVector, Player, VectorLabel,
};
use crate::linalg;
use crate::markov::StateDistribution;
use crate::scalar::{Real, Scalar};

/// Relative singular-value threshold for numerical rank.
pub const RANK_TOL: f64 = 1e-9;
/// Residual 2-norm at or below which a decomposition counts as exact.
pub const EXACT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PressDysonVector<T> {
    pub values: [T; 4],
    pub player: Player,
}

impl<T: Scalar> PressDysonVector<T> {
    /// Component for `action`; the two components sum to zero.
    pub fn component(&self, action: Action) -> [T; 4] {
        match action {
            Action::C => self.values.clone(),
            Action::D => self.values.clone().map(|x| -x),
        }
    }

    pub fn get(&self, state: JointState) -> &T {
        &self.values[state.index()]
    }
}

/// `pd[s'] = T_player(C | s') - [s'_player = C]`, states in canonical order.
pub fn press_dyson<T: Scalar>(s: &MemoryOneStrategy<T>, player: Player) -> PressDysonVector<T> {
    let values = JointState::ALL.map(|prev| {
        let stay = match prev.action(player) {
            Action::C => T::one(),
            Action::D => T::zero(),
        };
        s.cooperation(player, prev) - stay
    });
    PressDysonVector { values, player }
}

/// `sum_s' pd[s'] pi[s']`; vanishes for any long-run distribution of a chain
/// in which `pd`'s owner plays the strategy it was built from.
pub fn akin_residual<T: Scalar>(pd: &PressDysonVector<T>, pi: &StateDistribution<T>) -> T {
    pd.values
        .iter()
        .zip(pi.probabilities())
        .fold(T::zero(), |acc, (v, p)| acc + v.clone() * p.clone())
}

/// Which payoff vectors to decompose against.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum BasisSpec<T> {
    /// `{1, s1, s2}`.
    Zd,
    /// All `s1^k1 * s2^k2` with `k1 + k2 <= max_total_degree`.
    Monomial {
        max_total_degree: u32,
    },
    /// `{exp(h s1), exp(h s2)}`.
    Exponential {
        h: T,
    },
    /// `{s1, s2, s1*s2, 1}`.
    Wsls4,
    Custom(Vec<PayoffVector<T>>),
}

impl<T: Scalar> BasisSpec<T> {
    /// Basis vectors that need no transcendental functions.
    fn algebraic(&self, m: &PayoffMatrix<T>) -> Option<Vec<PayoffVector<T>>> {
        let mono = |k1, k2| PayoffVector::monomial(m, k1, k2);
        Some(match self {
            BasisSpec::Zd => vec![mono(0, 0), mono(1, 0), mono(0, 1)],
            BasisSpec::Monomial { max_total_degree } => (0..=*max_total_degree)
                .flat_map(|d| (0..=d).rev().map(move |k1| (k1, d - k1)))
                .map(|(k1, k2)| mono(k1, k2))
                .collect(),
            BasisSpec::Wsls4 => vec![mono(1, 0), mono(0, 1), mono(1, 1), mono(0, 0)],
            BasisSpec::Custom(vectors) => vectors.clone(),
            BasisSpec::Exponential { .. } => return None,
        })
    }
}

impl<T: Real> BasisSpec<T> {
    pub fn vectors(&self, m: &PayoffMatrix<T>) -> Result<Vec<PayoffVector<T>>> {
        match self {
            BasisSpec::Exponential { h } => Ok(vec![
                transform_exp(&payoff_vector(m, Player::One), *h)?,
                transform_exp(&payoff_vector(m, Player::Two), *h)?,
            ]),
            other => Ok(other.algebraic(m).expect("non-exponential basis")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionResult<T> {
    /// Coefficients in basis order.
    pub coefficients: Vec<(VectorLabel, T)>,
    /// `target - sum coeff * basis`.
    pub residual: [T; 4],
    pub residual_norm: T,
    pub rank: usize,
    pub basis_size: usize,
    pub exact: bool,
}

impl<T: Scalar> DecompositionResult<T> {
    pub fn coefficient(&self, label: &VectorLabel) -> Option<&T> {
        self.coefficients
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, c)| c)
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank == self.basis_size.min(4)
    }

    /// `sum coeff * basis`.
    pub fn reconstruct(&self, basis: &[PayoffVector<T>]) -> [T; 4] {
        std::array::from_fn(|i| {
            self.coefficients
                .iter()
                .zip(basis)
                .fold(T::zero(), |acc, ((_, c), v)| {
                    acc + c.clone() * v.values[i].clone()
                })
        })
    }
}

fn l2<T: Real>(v: &[T; 4]) -> T {
    v.iter().fold(T::zero(), |acc, x| acc + *x * *x).sqrt()
}

/// Least-squares coefficients with minimum-norm completion, via SVD with
/// rank decided at `rank_tol` relative to the largest singular value.
fn least_squares<T: Real>(
    target: &[T; 4],
    basis: &[PayoffVector<T>],
    rank_tol: f64,
) -> (Vec<T>, usize) {
    let cols = basis.len();
    let a = DMatrix::from_fn(4, cols, |i, j| basis[j].values[i].as_f64());
    let b = DVector::from_fn(4, |i, _| target[i].as_f64());
    let svd = a.svd(true, true);
    let sigma = &svd.singular_values;
    let largest = sigma.iter().cloned().fold(0.0, f64::max);
    let cutoff = rank_tol * largest;
    let u = svd.u.as_ref().expect("requested U");
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let mut x = DVector::zeros(cols);
    let mut rank = 0;
    for (k, &s) in sigma.iter().enumerate() {
        if largest == 0.0 || s <= cutoff {
            continue;
        }
        rank += 1;
        let weight = u.column(k).dot(&b) / s;
        x += v_t.row(k).transpose() * weight;
    }
    (x.iter().map(|&c| T::lit(c)).collect(), rank)
}

fn assemble<T: Real>(
    target: &[T; 4],
    basis: &[PayoffVector<T>],
    coeffs: Vec<T>,
    rank: usize,
    tol: T,
) -> DecompositionResult<T> {
    let coefficients: Vec<(VectorLabel, T)> = basis.iter().map(|v| v.label).zip(coeffs).collect();
    let mut result = DecompositionResult {
        coefficients,
        residual: [T::zero(); 4],
        residual_norm: T::zero(),
        rank,
        basis_size: basis.len(),
        exact: false,
    };
    let fitted = result.reconstruct(basis);
    result.residual = std::array::from_fn(|i| target[i] - fitted[i]);
    result.residual_norm = l2(&result.residual);
    result.exact = result.residual_norm <= tol;
    result
}

/// Decomposes `pd` against the basis generated by `basis` for payoffs `m`.
/// Rank deficiency is reported, not an error.
pub fn decompose<T: Real>(
    pd: &PressDysonVector<T>,
    basis: &BasisSpec<T>,
    m: &PayoffMatrix<T>,
    tol: T,
) -> Result<DecompositionResult<T>> {
    decompose_with_rank_tol(pd, basis, m, tol, RANK_TOL)
}

pub fn decompose_with_rank_tol<T: Real>(
    pd: &PressDysonVector<T>,
    basis: &BasisSpec<T>,
    m: &PayoffMatrix<T>,
    tol: T,
    rank_tol: f64,
) -> Result<DecompositionResult<T>> {
    let vectors = basis.vectors(m)?;
    Ok(decompose_vectors(&pd.values, &vectors, tol, rank_tol))
}

/// Decomposition of an arbitrary target against explicit vectors.
pub fn decompose_vectors<T: Real>(
    target: &[T; 4],
    basis: &[PayoffVector<T>],
    tol: T,
    rank_tol: f64,
) -> DecompositionResult<T> {
    if basis.is_empty() {
        return assemble(target, basis, Vec::new(), 0, tol);
    }
    let (coeffs, rank) = least_squares(target, basis, rank_tol);
    assemble(target, basis, coeffs, rank, tol)
}

/// Outcome of checking a TFT identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck<T> {
    /// `1/(T^k - S^k)` or `1/(e^{hT} - e^{hS})`.
    pub coefficient: T,
    /// The normalized payoff difference.
    pub normalized: [T; 4],
    /// Largest deviation from TFT's Press-Dyson vector `(0, -1, 1, 0)`.
    pub max_abs_error: T,
}

fn identity_check<T: Scalar>(diff: [T; 4], denom: T) -> IdentityCheck<T> {
    let coefficient = T::one() / denom;
    let normalized = diff.map(|d| d * coefficient.clone());
    let tft = press_dyson(&MemoryOneStrategy::<T>::tft(), Player::One);
    let max_abs_error = normalized
        .iter()
        .zip(tft.values.iter())
        .map(|(a, b)| (a.clone() - b.clone()).magnitude())
        .fold(T::zero(), T::max_of);
    IdentityCheck {
        coefficient,
        normalized,
        max_abs_error,
    }
}

/// `(s1^k - s2^k) / (T^k - S^k)` against TFT's Press-Dyson vector.
pub fn tft_power_identity<T: Scalar>(m: &PayoffMatrix<T>, k: u32) -> Result<IdentityCheck<T>> {
    if k == 0 {
        return Err(Error::ZeroPower(k));
    }
    let denom = m.temptation().powi_exact(k) - m.sucker().powi_exact(k);
    if denom.is_zero() {
        return Err(Error::DegenerateDenominator(k));
    }
    let s1 = payoff_vector(m, Player::One);
    let s2 = payoff_vector(m, Player::Two);
    let diff = std::array::from_fn(|i| s1.values[i].powi_exact(k) - s2.values[i].powi_exact(k));
    Ok(identity_check(diff, denom))
}

/// `(exp(h s1) - exp(h s2)) / (e^{hT} - e^{hS})` against TFT's vector.
pub fn tft_exponential_identity<T: Real>(m: &PayoffMatrix<T>, h: T) -> Result<IdentityCheck<T>> {
    let phi1 = transform_exp(&payoff_vector(m, Player::One), h)?;
    let phi2 = transform_exp(&payoff_vector(m, Player::Two), h)?;
    let denom = (h * *m.temptation()).exp() - (h * *m.sucker()).exp();
    if denom.is_zero() {
        return Err(Error::ZeroExponent);
    }
    let diff = std::array::from_fn(|i| phi1.values[i] - phi2.values[i]);
    Ok(identity_check(diff, denom))
}

/// WSLS's Press-Dyson vector in the basis `(s1, s2, s1*s2, 1)`.
pub fn wsls_coefficients<T: Real>(m: &PayoffMatrix<T>) -> DecompositionResult<T> {
    let pd = press_dyson(&MemoryOneStrategy::wsls(), Player::One);
    let basis = BasisSpec::Wsls4.vectors(m).expect("algebraic basis");
    decompose_vectors(&pd.values, &basis, T::lit(EXACT_TOL), RANK_TOL)
}

/// Exact-arithmetic WSLS coefficients by Gaussian elimination; fails with
/// the basis rank when the four vectors are dependent.
pub fn wsls_coefficients_exact<T: Scalar>(m: &PayoffMatrix<T>) -> Result<DecompositionResult<T>> {
    let pd = press_dyson(&MemoryOneStrategy::wsls(), Player::One);
    let basis = BasisSpec::Wsls4.algebraic(m).expect("algebraic basis");
    let a: Vec<Vec<T>> = (0..4)
        .map(|i| basis.iter().map(|v| v.values[i].clone()).collect())
        .collect();
    let tol = T::zero();
    let coeffs =
        linalg::solve(&a, &pd.values, &tol).map_err(|rank| Error::Singular { rank, size: 4 })?;
    let mut result = DecompositionResult {
        coefficients: basis.iter().map(|v| v.label).zip(coeffs).collect(),
        residual: std::array::from_fn(|_| T::zero()),
        residual_norm: T::zero(),
        rank: 4,
        basis_size: 4,
        exact: true,
    };
    let fitted = result.reconstruct(&basis);
    result.residual = std::array::from_fn(|i| pd.values[i].clone() - fitted[i].clone());
    Ok(result)
}
