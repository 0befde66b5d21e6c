//! Small dense linear solves over a [`Field`].

use crate::scalar::Field;

/// Gaussian elimination with pivoting by [`Field::pivot_weight`].
/// Returns `None` for a singular system.
pub fn solve<F: Field>(mut a: Vec<Vec<F>>, mut b: Vec<F>) -> Option<Vec<F>> {
    let n = b.len();
    assert!(a.len() == n && a.iter().all(|r| r.len() == n));
    for col in 0..n {
        let (piv, w) = (col..n)
            .map(|r| (r, a[r][col].pivot_weight()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if w <= 0.0 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let p = a[col][col].clone();
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone() / p.clone();
            for c in col..n {
                a[r][c] = a[r][c].clone() - f.clone() * a[col][c].clone();
            }
            b[r] = b[r].clone() - f * b[col].clone();
        }
    }
    let mut x = vec![F::zero(); n];
    for r in (0..n).rev() {
        let mut acc = b[r].clone();
        for c in r + 1..n {
            acc = acc - a[r][c].clone() * x[c].clone();
        }
        x[r] = acc / a[r][r].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    #[test]
    fn solves_exactly() {
        let a = vec![vec![q(0, 1), q(1, 1)], vec![q(2, 1), q(1, 1)]];
        let x = solve(a, vec![q(3, 1), q(5, 1)]).unwrap();
        assert_eq!(x, vec![q(1, 1), q(3, 1)]);
    }

    #[test]
    fn detects_singular() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(solve(a, vec![1.0, 2.0]).is_none());
        let a = vec![vec![q(1, 1), q(2, 1)], vec![q(2, 1), q(4, 1)]];
        assert!(solve(a, vec![q(1, 1), q(1, 1)]).is_none());
    }
}
