//! Small least-squares helpers.

use alloc::vec::Vec;

/// Ordinary least-squares line y ≈ intercept + slope·x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - intercept - slope * x;
            e * e
        })
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Some(LineFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Least squares for y ≈ Σ_j c_j φ_j(x) with a handful of basis functions,
/// solved through the normal equations. Returns None when singular.
pub fn least_squares(rows: &[Vec<f64>], ys: &[f64]) -> Option<Vec<f64>> {
    let p = rows.first()?.len();
    let mut a = alloc::vec![0.0; p * p];
    let mut b = alloc::vec![0.0; p];
    for (row, y) in rows.iter().zip(ys) {
        for i in 0..p {
            b[i] += row[i] * y;
            for j in 0..p {
                a[i * p + j] += row[i] * row[j];
            }
        }
    }
    solve_dense(&mut a, &mut b, p)?;
    Some(b)
}

/// Gaussian elimination with partial pivoting; solution overwrites `b`.
pub fn solve_dense(a: &mut [f64], b: &mut [f64], p: usize) -> Option<()> {
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    for col in 0..p {
        let piv = (col..p).max_by(|&i, &j| a[i * p + col].abs().total_cmp(&a[j * p + col].abs()))?;
        if a[piv * p + col].abs() <= 1e-14 * scale {
            return None;
        }
        if piv != col {
            for j in 0..p {
                a.swap(col * p + j, piv * p + j);
            }
            b.swap(col, piv);
        }
        for i in col + 1..p {
            let f = a[i * p + col] / a[col * p + col];
            for j in col..p {
                a[i * p + j] -= f * a[col * p + j];
            }
            b[i] -= f * b[col];
        }
    }
    for col in (0..p).rev() {
        let mut v = b[col];
        for j in col + 1..p {
            v -= a[col * p + j] * b[j];
        }
        b[col] = v / a[col * p + col];
    }
    Some(())
}
