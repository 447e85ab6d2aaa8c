//! Small dense linear algebra at `n ≤ 12` scale.

use nalgebra::DMatrix;

/// Relative pivot threshold for rank decisions.
pub const PIVOT_TOL: f64 = 1e-8;

/// Numeric rank by Gaussian elimination with partial pivoting; a pivot
/// counts when it exceeds `PIVOT_TOL · max|a_ij|`.
pub fn rank(rows: &[Vec<f64>]) -> usize {
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let scale = a.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return 0;
    }
    let tol = PIVOT_TOL * scale;
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let (piv, val) = (r..nrows).map(|i| (i, a[i][c].abs())).fold((r, -1.0), |b, x| if x.1 > b.1 { x } else { b });
        if val <= tol {
            continue;
        }
        a.swap(r, piv);
        for i in r + 1..nrows {
            let f = a[i][c] / a[r][c];
            if f != 0.0 {
                for j in c..ncols {
                    a[i][j] -= f * a[r][j];
                }
            }
        }
        r += 1;
    }
    r
}

/// Solves a square system by partial pivoting; `None` if a pivot falls
/// below the relative threshold.
pub fn solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(row, &bi)| row.iter().copied().chain([bi]).collect()).collect();
    let scale = a.iter().flatten().fold(0.0f64, |s, x| s.max(x.abs()));
    if scale == 0.0 {
        return None;
    }
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))?;
        if m[piv][c].abs() <= PIVOT_TOL * scale {
            return None;
        }
        m.swap(c, piv);
        for i in 0..n {
            if i != c {
                let f = m[i][c] / m[c][c];
                for j in c..=n {
                    m[i][j] -= f * m[c][j];
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

/// Least squares for `Σ_μ x_μ cols[μ] ≈ rhs` via the normal equations.
pub fn least_squares(cols: &[Vec<f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let gram: Vec<Vec<f64>> = cols.iter().map(|a| cols.iter().map(|b| dot(a, b)).collect()).collect();
    let proj: Vec<f64> = cols.iter().map(|a| dot(a, rhs)).collect();
    solve(&gram, &proj)
}

/// Largest principal angle between the column spans of `a` and `b`.
pub fn largest_principal_angle(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let qa = a.clone().qr().q();
    let qb = b.clone().qr().q();
    let s = (qa.transpose() * qb).singular_values();
    let smin = s.iter().copied().fold(f64::INFINITY, f64::min).clamp(0.0, 1.0);
    // arccos is ill-conditioned near 1; use the sine form
    (1.0 - smin * smin).max(0.0).sqrt().asin()
}
