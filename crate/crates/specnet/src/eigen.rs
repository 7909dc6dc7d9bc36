//! Dense symmetric eigensolver: Householder tridiagonalization followed by
//! the implicit-shift QL iteration, with eigenvector accumulation.
//!
//! This is the classical EISPACK tred2/tql2 pair. It is deterministic for a
//! fixed input, computes the full spectrum (the propagation metric needs
//! every eigenvalue), and returns eigenpairs sorted ascending.

// Index-based loops keep this close to the published algorithm.
#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};

/// Solver knobs. `tolerance` is the relative off-diagonal threshold below
/// which a subdiagonal entry counts as zero; `max_iterations` caps the QL
/// steps spent on any single eigenvalue.
#[derive(Clone, Copy, Debug)]
pub struct EigOptions {
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for EigOptions {
    fn default() -> Self {
        EigOptions {
            max_iterations: 100,
            tolerance: 1e-10,
        }
    }
}

/// Diagonalizes the symmetric matrix stored row-major in `a` (length n*n).
/// On return `a` holds the eigenvectors column-wise (column l is the
/// eigenvector of the l-th returned eigenvalue) and the eigenvalues come
/// back ascending.
pub fn sym_eigen_in_place(a: &mut [f64], n: usize, opts: &EigOptions) -> Result<Vec<f64>> {
    assert_eq!(a.len(), n * n);
    let mut d = vec![0.0f64; n];
    let mut e = vec![0.0f64; n];
    tred2(a, n, &mut d, &mut e);
    tql2(a, n, &mut d, &mut e, opts)?;
    sort_ascending(a, n, &mut d);
    Ok(d)
}

/// Householder reduction to tridiagonal form, accumulating the orthogonal
/// transform in `v`. Produces diagonal `d` and subdiagonal `e` (e[0] = 0).
fn tred2(v: &mut [f64], n: usize, d: &mut [f64], e: &mut [f64]) {
    for j in 0..n {
        d[j] = v[(n - 1) * n + j];
    }

    for i in (1..n).rev() {
        // Scale to avoid under/overflow.
        let mut scale = 0.0;
        let mut h = 0.0;
        for item in d.iter().take(i) {
            scale += item.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1) * n + j];
                v[i * n + j] = 0.0;
                v[j * n + i] = 0.0;
            }
        } else {
            // Householder vector.
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for item in e.iter_mut().take(i) {
                *item = 0.0;
            }

            // Apply similarity transformation to remaining rows.
            for j in 0..i {
                let f = d[j];
                v[j * n + i] = f;
                let mut g = e[j] + v[j * n + j] * f;
                for k in (j + 1)..i {
                    g += v[k * n + j] * d[k];
                    e[k] += v[k * n + j] * f;
                }
                e[j] = g;
            }
            let mut f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                let f = d[j];
                let g = e[j];
                for k in j..i {
                    v[k * n + j] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1) * n + j];
                v[i * n + j] = 0.0;
            }
        }
        d[i] = h;
    }

    // Accumulate transformations.
    for i in 0..(n - 1) {
        v[(n - 1) * n + i] = v[i * n + i];
        v[i * n + i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[k * n + i + 1] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[k * n + i + 1] * v[k * n + j];
                }
                for k in 0..=i {
                    v[k * n + j] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[k * n + i + 1] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1) * n + j];
        v[(n - 1) * n + j] = 0.0;
    }
    v[(n - 1) * n + n - 1] = 1.0;
    e[0] = 0.0;
}

/// Implicit-shift QL on the tridiagonal (d, e), rotations applied to the
/// columns of `v`.
fn tql2(v: &mut [f64], n: usize, d: &mut [f64], e: &mut [f64], opts: &EigOptions) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let eps = opts.tolerance;
    let mut f = 0.0f64;
    let mut tst1 = 0.0f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        // m == n only if e[n-1] != 0, which it is not.
        if m > l {
            let mut iter = 0usize;
            loop {
                iter += 1;
                if iter > opts.max_iterations {
                    return Err(Error::NoConvergence(opts.max_iterations));
                }

                // Implicit shift.
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for item in d.iter_mut().take(n).skip(l + 2) {
                    *item -= h;
                }
                f += h;

                // QL sweep.
                p = d[m];
                let mut c = 1.0f64;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0f64;
                let mut s2 = 0.0f64;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    // Rotate eigenvector columns i, i+1.
                    for k in 0..n {
                        let h = v[k * n + i + 1];
                        v[k * n + i + 1] = s * v[k * n + i] + c * h;
                        v[k * n + i] = c * v[k * n + i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// Selection sort ascending, swapping eigenvector columns along; stable
/// enough to be deterministic for a fixed input.
fn sort_ascending(v: &mut [f64], n: usize, d: &mut [f64]) {
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for j in (i + 1)..n {
            if d[j] < p {
                k = j;
                p = d[j];
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            for row in 0..n {
                v.swap(row * n + i, row * n + k);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs(x: &[f64]) -> f64 {
        x.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }

    #[test]
    fn diagonal_matrix() {
        let mut a = vec![0.0; 9];
        a[0] = 3.0;
        a[4] = -1.0;
        a[8] = 2.0;
        let d = sym_eigen_in_place(&mut a, 3, &EigOptions::default()).unwrap();
        assert!((d[0] + 1.0).abs() < 1e-14);
        assert!((d[1] - 2.0).abs() < 1e-14);
        assert!((d[2] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn two_by_two_analytic() {
        // [[1, -1], [-1, 1]] has eigenvalues {0, 2}.
        let mut a = vec![1.0, -1.0, -1.0, 1.0];
        let d = sym_eigen_in_place(&mut a, 2, &EigOptions::default()).unwrap();
        assert!(d[0].abs() < 1e-14);
        assert!((d[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn random_symmetric_reconstruction() {
        use rand::Rng;
        let n = 40;
        let mut rng = crate::generators::rng_from_seed(17);
        let mut a = vec![0.0f64; n * n];
        for i in 0..n {
            for j in i..n {
                let x: f64 = rng.random::<f64>() - 0.5;
                a[i * n + j] = x;
                a[j * n + i] = x;
            }
        }
        let orig = a.clone();
        let trace: f64 = (0..n).map(|i| orig[i * n + i]).sum();
        let d = sym_eigen_in_place(&mut a, n, &EigOptions::default()).unwrap();

        // Trace preserved.
        let lam_sum: f64 = d.iter().sum();
        assert!((lam_sum - trace).abs() < 1e-10 * n as f64);

        // Orthonormal columns.
        let mut worst = 0.0f64;
        for k in 0..n {
            for l in 0..n {
                let dot: f64 = (0..n).map(|r| a[r * n + k] * a[r * n + l]).sum();
                let target = if k == l { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        assert!(worst < 1e-12, "orthonormality residual {worst}");

        // Entrywise reconstruction sum_l lambda_l q_l q_l^T == A.
        let mut recon = vec![0.0f64; n * n];
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    recon[i * n + j] += d[l] * a[i * n + l] * a[j * n + l];
                }
            }
        }
        let diff: Vec<f64> = recon.iter().zip(&orig).map(|(x, y)| x - y).collect();
        assert!(max_abs(&diff) < 1e-10, "reconstruction residual {}", max_abs(&diff));
    }

    #[test]
    fn repeated_runs_are_identical() {
        use rand::Rng;
        let n = 25;
        let mut rng = crate::generators::rng_from_seed(31);
        let mut a = vec![0.0f64; n * n];
        for i in 0..n {
            for j in i..n {
                let x: f64 = rng.random::<f64>();
                a[i * n + j] = x;
                a[j * n + i] = x;
            }
        }
        let mut b = a.clone();
        let d1 = sym_eigen_in_place(&mut a, n, &EigOptions::default()).unwrap();
        let d2 = sym_eigen_in_place(&mut b, n, &EigOptions::default()).unwrap();
        assert_eq!(d1, d2);
        assert_eq!(a, b);
    }
}
