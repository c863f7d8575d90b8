//! Payoff moments, moment generating functions and payoff distributions
//! under a distribution over joint states.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{payoff_vector, PayoffMatrix, PayoffVector, VectorLabel};
use crate::markov::StateDistribution;
use crate::scalar::{Real, Scalar};

/// Payoff values closer than this are merged into one support point.
pub const VALUE_TOL: f64 = 1e-12;

/// `<v^k>`.
pub fn moment<T: Scalar>(v: &PayoffVector<T>, pi: &StateDistribution<T>, k: u32) -> T {
    v.values
        .iter()
        .zip(pi.probabilities())
        .fold(T::zero(), |acc, (x, p)| acc + x.powi_exact(k) * p.clone())
}

/// `<v1^k1 v2^k2>`.
pub fn cross_moment<T: Scalar>(
    v1: &PayoffVector<T>,
    v2: &PayoffVector<T>,
    pi: &StateDistribution<T>,
    k1: u32,
    k2: u32,
) -> T {
    (0..4).fold(T::zero(), |acc, i| {
        acc + v1.values[i].powi_exact(k1)
            * v2.values[i].powi_exact(k2)
            * pi.probabilities()[i].clone()
    })
}

/// `<exp(h v)>`.
pub fn mgf<T: Real>(v: &PayoffVector<T>, pi: &StateDistribution<T>, h: T) -> Result<T> {
    let largest = v.values.iter().fold(T::zero(), |acc, x| acc.max(x.abs()));
    let extent = h.abs() * largest;
    if extent > T::lit(700.0) {
        return Err(Error::ExponentRange(extent.as_f64()));
    }
    Ok(v.values
        .iter()
        .zip(pi.probabilities())
        .fold(T::zero(), |acc, (x, p)| acc + (h * *x).exp() * *p))
}

/// Long-run average of the vector a label stands for.
fn label_average<T: Real>(
    label: &VectorLabel,
    pi: &StateDistribution<T>,
    m: &PayoffMatrix<T>,
) -> Result<T> {
    match *label {
        VectorLabel::Monomial { k1, k2 } => Ok(cross_moment(
            &payoff_vector(m, crate::game::Player::One),
            &payoff_vector(m, crate::game::Player::Two),
            pi,
            k1,
            k2,
        )),
        VectorLabel::Exp { player, h } => mgf(&payoff_vector(m, player), pi, T::lit(h)),
    }
}

/// `sum_label coeff * <label>`: the linear relation a decomposition enforces.
pub fn relation_value<T: Real>(
    coefficients: &[(VectorLabel, T)],
    pi: &StateDistribution<T>,
    m: &PayoffMatrix<T>,
) -> Result<T> {
    coefficients.iter().try_fold(T::zero(), |acc, (label, c)| {
        Ok(acc + *c * label_average(label, pi, m)?)
    })
}

/// Finite payoff distribution: strictly increasing values with positive mass.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PayoffDistribution<T> {
    pub atoms: Vec<(T, T)>,
}

impl<T: Scalar> PayoffDistribution<T> {
    pub fn probability_of(&self, value: &T, tol: &T) -> T {
        self.atoms
            .iter()
            .filter(|(v, _)| (v.clone() - value.clone()).negligible(tol))
            .fold(T::zero(), |acc, (_, p)| acc + p.clone())
    }
}

/// Aggregates state mass over equal payoff values. States with zero mass do
/// not appear in the support.
pub fn payoff_distribution<T: Scalar>(
    v: &PayoffVector<T>,
    pi: &StateDistribution<T>,
) -> PayoffDistribution<T> {
    let tol = T::lit(VALUE_TOL);
    let mut pairs: Vec<(T, T)> = v
        .values
        .iter()
        .cloned()
        .zip(pi.probabilities().iter().cloned())
        .filter(|(_, p)| *p > T::zero())
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut atoms: Vec<(T, T)> = Vec::with_capacity(pairs.len());
    for (value, p) in pairs {
        match atoms.last_mut() {
            Some((last, mass)) if (value.clone() - last.clone()).negligible(&tol) => {
                *mass = mass.clone() + p;
            }
            _ => atoms.push((value, p)),
        }
    }
    PayoffDistribution { atoms }
}

/// Compares two distributions atom by atom: every value carrying more than
/// `tol` mass in either must appear in both with masses within `tol`.
pub fn distributions_equal<T: Scalar>(
    a: &PayoffDistribution<T>,
    b: &PayoffDistribution<T>,
    tol: &T,
) -> bool {
    let value_tol = T::lit(VALUE_TOL);
    let agrees = |x: &PayoffDistribution<T>, y: &PayoffDistribution<T>| {
        x.atoms.iter().all(|(value, p)| {
            let q = y.probability_of(value, &value_tol);
            (p.clone() - q).negligible(tol)
        })
    };
    agrees(a, b) && agrees(b, a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{JointState, Player};
    use crate::press_dyson::wsls_coefficients;

    fn setup() -> (
        PayoffMatrix<f64>,
        PayoffVector<f64>,
        PayoffVector<f64>,
        StateDistribution<f64>,
    ) {
        let m = PayoffMatrix::default();
        let s1 = payoff_vector(&m, Player::One);
        let s2 = payoff_vector(&m, Player::Two);
        let cycle = StateDistribution::from_f64s([0.0, 0.5, 0.5, 0.0]).unwrap();
        (m, s1, s2, cycle)
    }

    #[test]
    fn moments_on_cycle() {
        let (_, s1, s2, pi) = setup();
        assert_eq!(moment(&s1, &pi, 1), 2.5);
        assert_eq!(moment(&s1, &pi, 2), 12.5);
        let point = StateDistribution::point(JointState::DC);
        assert_eq!(moment(&s2, &point, 3), 0.0);
        assert_eq!(moment(&s1, &point, 3), 125.0);
    }

    #[test]
    fn cross_moments() {
        let (_, s1, s2, pi) = setup();
        assert_eq!(cross_moment(&s1, &s2, &pi, 0, 0), 1.0);
        assert_eq!(cross_moment(&s1, &s2, &pi, 1, 1), 0.0);
        assert_eq!(cross_moment(&s1, &s2, &pi, 3, 0), moment(&s1, &pi, 3));
        assert_eq!(
            cross_moment(&s1, &PayoffVector::ones(), &pi, 4, 0),
            moment(&s1, &pi, 4)
        );
    }

    #[test]
    fn mgf_values() {
        let (_, s1, s2, pi) = setup();
        assert_eq!(mgf(&s1, &StateDistribution::uniform(), 0.0).unwrap(), 1.0);
        let want = (1.0 + 5f64.exp()) / 2.0;
        assert!((mgf(&s1, &pi, 1.0).unwrap() - want).abs() < 1e-12);
        assert_eq!(mgf(&s1, &pi, 1.0).unwrap(), mgf(&s2, &pi, 1.0).unwrap());
        assert!(matches!(
            mgf(&s1, &pi, 1000.0),
            Err(Error::ExponentRange(_))
        ));
    }

    #[test]
    fn relation_values() {
        let (m, _, _, pi) = setup();
        let tft_k1 = [
            (VectorLabel::raw(Player::One), 0.2),
            (VectorLabel::raw(Player::Two), -0.2),
        ];
        assert_eq!(relation_value(&tft_k1, &pi, &m).unwrap(), 0.0);
        let zeros = [
            (VectorLabel::ONES, 0.0),
            (VectorLabel::raw(Player::One), 0.0),
        ];
        assert_eq!(
            relation_value(&zeros, &StateDistribution::uniform(), &m).unwrap(),
            0.0
        );
        let exp = [
            (
                VectorLabel::Exp {
                    player: Player::One,
                    h: 0.5,
                },
                1.0,
            ),
            (
                VectorLabel::Exp {
                    player: Player::Two,
                    h: 0.5,
                },
                -1.0,
            ),
        ];
        assert!(relation_value(&exp, &pi, &m).unwrap().abs() < 1e-12);
        // WSLS relation holds at its own fixed points, e.g. mutual cooperation
        let wsls = wsls_coefficients(&m);
        let v = relation_value(
            &wsls.coefficients,
            &StateDistribution::point(JointState::CC),
            &m,
        )
        .unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn payoff_distributions() {
        let (m, s1, s2, pi) = setup();
        let d1 = payoff_distribution(&s1, &pi);
        let d2 = payoff_distribution(&s2, &pi);
        assert_eq!(d1.atoms, vec![(0.0, 0.5), (5.0, 0.5)]);
        assert_eq!(d1, d2);
        assert!(distributions_equal(&d1, &d2, &1e-12));
        assert!(distributions_equal(&d1, &d1, &0.0));

        let cc = payoff_distribution(&s1, &StateDistribution::point(JointState::CC));
        assert_eq!(cc.atoms, vec![(*m.reward(), 1.0)]);
        let dd = payoff_distribution(&s1, &StateDistribution::point(JointState::DD));
        assert!(!distributions_equal(&cc, &dd, &1e-8));
    }

    #[test]
    fn equal_values_aggregate() {
        let m = PayoffMatrix::permissive(1.0, 0.0, 5.0, 1.0).unwrap();
        let s1 = payoff_vector(&m, Player::One);
        let d = payoff_distribution(&s1, &StateDistribution::uniform());
        assert_eq!(d.atoms, vec![(0.0, 0.25), (1.0, 0.5), (5.0, 0.25)]);
    }

    #[test]
    fn tiny_masses_do_not_break_equality() {
        let a = PayoffDistribution {
            atoms: vec![(0.0, 0.5), (5.0, 0.5)],
        };
        let b = PayoffDistribution {
            atoms: vec![(0.0, 0.5), (1.0, 1e-15), (5.0, 0.5 - 1e-15)],
        };
        assert!(distributions_equal(&a, &b, &1e-12));
        assert!(!distributions_equal(&a, &b, &1e-16));
    }
}
