//! Small dense Gaussian elimination, exact on rationals.

use crate::scalar::Scalar;

/// Reduced row echelon form of `rows`, pivoting only in the first
/// `pivot_cols` columns. Entries with `|x| <= tol` count as zero.
pub(crate) struct Echelon<T> {
    pub rows: Vec<Vec<T>>,
    pub pivots: Vec<usize>,
}

impl<T: Scalar> Echelon<T> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

pub(crate) fn rref<T: Scalar>(mut rows: Vec<Vec<T>>, pivot_cols: usize, tol: &T) -> Echelon<T> {
    let n_rows = rows.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..pivot_cols {
        if r == n_rows {
            break;
        }
        // partial pivoting: largest magnitude in this column
        let best = (r..n_rows)
            .max_by(|&a, &b| {
                rows[a][c]
                    .magnitude()
                    .partial_cmp(&rows[b][c].magnitude())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("non-empty row range");
        if rows[best][c].negligible(tol) {
            continue;
        }
        rows.swap(r, best);
        let pivot = rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x = x.clone() / pivot.clone();
        }
        for i in 0..n_rows {
            if i == r || rows[i][c].is_zero() {
                continue;
            }
            let factor = rows[i][c].clone();
            for j in 0..rows[i].len() {
                let delta = factor.clone() * rows[r][j].clone();
                rows[i][j] = rows[i][j].clone() - delta;
            }
        }
        pivots.push(c);
        r += 1;
    }
    Echelon { rows, pivots }
}

pub(crate) fn rank<T: Scalar>(rows: Vec<Vec<T>>, tol: &T) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    rref(rows, cols, tol).rank()
}

/// Solves `a x = b` for a system with a unique solution. Returns the rank
/// when the coefficient matrix is rank deficient or the system inconsistent.
pub(crate) fn solve<T: Scalar>(a: &[Vec<T>], b: &[T], tol: &T) -> Result<Vec<T>, usize> {
    let n = a.first().map_or(0, Vec::len);
    let augmented: Vec<Vec<T>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut row = row.clone();
            row.push(rhs.clone());
            row
        })
        .collect();
    let echelon = rref(augmented, n, tol);
    let rank = echelon.rank();
    if rank < n {
        return Err(rank);
    }
    // rows beyond the pivots must read 0 = 0
    if echelon.rows[rank..]
        .iter()
        .any(|row| !row[n].negligible(tol))
    {
        return Err(rank);
    }
    Ok(echelon.rows[..n].iter().map(|row| row[n].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    #[test]
    fn solves_exactly_over_rationals() {
        let a = vec![
            vec![ratio(2, 1), ratio(1, 1)],
            vec![ratio(1, 1), ratio(3, 1)],
        ];
        let b = vec![ratio(1, 1), ratio(2, 1)];
        let x = solve(&a, &b, &ratio(0, 1)).unwrap();
        assert_eq!(x, vec![ratio(1, 5), ratio(3, 5)]);
    }

    #[test]
    fn overdetermined_consistent_system() {
        let a = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        let x: Vec<f64> = solve(&a, &[1.0, 2.0, 3.0], &1e-12).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 2.0).abs() < 1e-15);
        assert_eq!(solve(&a, &[1.0, 2.0, 4.0], &1e-12), Err(2));
    }

    #[test]
    fn reports_rank_deficiency() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert_eq!(solve(&a, &[1.0, 2.0], &1e-12), Err(1));
        assert_eq!(rank(a, &1e-12), 1);
    }
}
