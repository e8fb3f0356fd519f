//! Dense complex linear algebra helpers shared by the numeric layers:
//! operator norms, stacked commutation systems and null spaces by
//! singular-value thresholding.

use faer::{c64, Mat, MatRef};

/// Largest singular value (operator norm). Zero for empty matrices.
pub fn op_norm(m: MatRef<'_, c64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    let svd = if m.nrows() >= m.ncols() {
        m.thin_svd().expect("svd failed")
    } else {
        m.adjoint().to_owned().thin_svd().expect("svd failed")
    };
    svd.S().column_vector()[0].re
}

/// Frobenius norm.
pub fn frobenius(m: MatRef<'_, c64>) -> f64 {
    m.norm_l2()
}

pub fn scale(m: MatRef<'_, c64>, z: c64) -> Mat<c64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * z)
}

pub fn identity(n: usize) -> Mat<c64> {
    Mat::identity(n, n)
}

/// `|| m^H m - I ||`, the unitarity defect.
pub fn unitarity_defect(m: MatRef<'_, c64>) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    let gram = m.adjoint() * m;
    op_norm((&gram - identity(m.ncols())).as_ref())
}

/// Singular values (descending) and the full right singular-vector matrix
/// of a tall system matrix.
pub fn svd_sigma_v(c: MatRef<'_, c64>) -> (Vec<f64>, Mat<c64>) {
    assert!(c.nrows() >= c.ncols(), "system matrix must be tall");
    let svd = c.thin_svd().expect("svd failed");
    let s = svd.S().column_vector();
    let sigmas = (0..s.nrows()).map(|i| s[i].re).collect();
    (sigmas, svd.V().to_owned())
}

/// Stacked constraint matrix for the equations `X a - b X = 0` over an
/// unknown `d x d` matrix `X`, one `d^2`-row band per pair, with `X`
/// vectorized row-major.
pub fn commutation_system(pairs: &[(MatRef<'_, c64>, MatRef<'_, c64>)]) -> Mat<c64> {
    assert!(!pairs.is_empty());
    let d = pairs[0].0.nrows();
    for (a, b) in pairs {
        assert!(a.nrows() == d && a.ncols() == d && b.nrows() == d && b.ncols() == d);
    }
    let mut c = Mat::<c64>::zeros(pairs.len() * d * d, d * d);
    for (band, (a, b)) in pairs.iter().enumerate() {
        let base = band * d * d;
        for r0 in 0..d {
            for c0 in 0..d {
                let row = base + r0 * d + c0;
                // (X a)[r0, c0] = sum_s X[r0, s] a[s, c0]
                for s in 0..d {
                    c[(row, r0 * d + s)] += a[(s, c0)];
                }
                // -(b X)[r0, c0] = -sum_s b[r0, s] X[s, c0]
                for s in 0..d {
                    c[(row, s * d + c0)] -= b[(r0, s)];
                }
            }
        }
    }
    c
}

/// Null space of a stacked system by singular-value thresholding:
/// directions with `sigma <= rel_tol * sigma_max` count as null.
pub struct NullSpace {
    /// All singular values, ascending.
    pub singular_values: Vec<f64>,
    pub sigma_max: f64,
    /// Orthonormal null vectors (row-major vectorizations).
    pub basis: Vec<Vec<c64>>,
}

pub fn null_space(c: MatRef<'_, c64>, rel_tol: f64) -> NullSpace {
    let (sigmas_desc, v) = svd_sigma_v(c);
    let sigma_max = sigmas_desc.first().copied().unwrap_or(0.0);
    let mut basis = Vec::new();
    for (i, &s) in sigmas_desc.iter().enumerate() {
        if s <= rel_tol * sigma_max {
            basis.push((0..v.nrows()).map(|r| v[(r, i)]).collect());
        }
    }
    let mut ascending = sigmas_desc;
    ascending.reverse();
    NullSpace {
        singular_values: ascending,
        sigma_max,
        basis,
    }
}

/// Dimension of the joint commutant `{X : X a = a X for all a}` of a set
/// of `d x d` matrices, with the ascending singular values of the system.
pub fn commutant_dimension(mats: &[Mat<c64>], rel_tol: f64) -> (usize, Vec<f64>) {
    let pairs: Vec<_> = mats.iter().map(|m| (m.as_ref(), m.as_ref())).collect();
    let system = commutation_system(&pairs);
    let ns = null_space(system.as_ref(), rel_tol);
    (ns.basis.len(), ns.singular_values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> c64 {
        c64::new(re, im)
    }

    #[test]
    fn op_norm_of_diag() {
        let m = Mat::from_fn(2, 2, |i, j| {
            if i == j {
                c(if i == 0 { 3.0 } else { -4.0 }, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        assert!((op_norm(m.as_ref()) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn commutant_of_scalars_is_full() {
        let id = identity(2);
        let (dim, _) = commutant_dimension(&[id], 1e-8);
        assert_eq!(dim, 4);
    }

    #[test]
    fn commutant_of_generic_diag_plus_shift_is_trivial() {
        // diag(1, 2) and the permutation matrix generate a full algebra
        let diag = Mat::from_fn(2, 2, |i, j| {
            if i == j {
                c(1.0 + i as f64, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let swap = Mat::from_fn(2, 2, |i, j| c(if i != j { 1.0 } else { 0.0 }, 0.0));
        let (dim, sigmas) = commutant_dimension(&[diag, swap], 1e-8);
        assert_eq!(dim, 1);
        // gap between the null direction and the rest
        assert!(sigmas[1] > 1e-4 * sigmas.last().unwrap());
    }
}
