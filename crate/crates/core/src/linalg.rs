use crate::scalar::Scalar;

/// Solve `a * x = b` for `a` with `m >= k` rows and `k` columns.
///
/// Returns the solution only if it exists and is unique (rank `k`, all
/// surplus equations consistent). Rows are reduced with partial pivoting by
/// [`Scalar::magnitude`].
pub(crate) fn solve_unique<S: Scalar>(mut a: Vec<Vec<S>>, mut b: Vec<S>) -> Option<Vec<S>> {
    let m = a.len();
    let k = a.first().map_or(0, Vec::len);
    if m < k {
        return None;
    }
    for col in 0..k {
        let pivot = (col..m)
            .filter(|&r| !a[r][col].is_negligible())
            .max_by(|&r, &s| a[r][col].magnitude().total_cmp(&a[s][col].magnitude()))?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = S::one() / a[col][col].clone();
        for r in (col + 1)..m {
            if a[r][col].is_negligible() {
                continue;
            }
            let factor = a[r][col].clone() * inv.clone();
            for c in col..k {
                let delta = factor.clone() * a[col][c].clone();
                a[r][c] = a[r][c].clone() - delta;
            }
            let delta = factor * b[col].clone();
            b[r] = b[r].clone() - delta;
        }
    }
    if b[k..].iter().any(|v| !v.is_negligible()) {
        return None;
    }
    let mut x = vec![S::zero(); k];
    for row in (0..k).rev() {
        let mut acc = b[row].clone();
        for c in (row + 1)..k {
            acc = acc - a[row][c].clone() * x[c].clone();
        }
        x[row] = acc / a[row][row].clone();
    }
    Some(x)
}
