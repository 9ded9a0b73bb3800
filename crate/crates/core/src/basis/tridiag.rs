//! Implicit-shift QL iteration for symmetric tridiagonal matrices.

use crate::error::{Result, SpectralError};

const MAX_SWEEPS: usize = 60;

/// Eigenvalues in ascending order, plus the first component of each
/// normalized eigenvector when `first_components` is set.
///
/// `diag` has length n, `offdiag` length n-1 (`offdiag[i]` couples i and i+1).
pub fn symmetric_tridiagonal_eigen(
    diag: &[f64],
    offdiag: &[f64],
    first_components: bool,
) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    let n = diag.len();
    if n == 0 {
        return Ok((Vec::new(), first_components.then(Vec::new)));
    }
    if offdiag.len() + 1 != n {
        return Err(SpectralError::LengthMismatch {
            expected: n - 1,
            got: offdiag.len(),
        });
    }
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0);
    // only the first row of the accumulated rotation matrix is tracked
    let mut z = vec![0.0; n];
    z[0] = 1.0;

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(SpectralError::EigenNoConvergence { order: n });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&k| d[k]).collect();
    let firsts = first_components.then(|| order.iter().map(|&k| z[k]).collect());
    Ok((values, firsts))
}
