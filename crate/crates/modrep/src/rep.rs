//! Finite-dimensional unitary models of the free kernel.
//!
//! A model is a pair `(V1, V2)` of `d x d` unitaries together with a
//! phase `lambda`; the generators evaluate as `x1 -> V1`,
//! `x2 -> lambda V2`. Since the kernel is free, any such pair extends to
//! a representation, and every identity used downstream is spectral, so
//! finite `d` suffices. `V2` is diagonal with distinct unit-modulus
//! entries, mirroring the diagonal normalization the spectral arguments
//! rely on.

use faer::{c64, Mat, MatRef};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::linalg;
use crate::words::{FLetter, FWord};

/// Default tolerance for spectral equivalence tests.
pub const EQUIV_TOL: f64 = 1e-8;

/// Unitarity gate for inputs to spectral operations.
pub const UNITARY_TOL: f64 = 1e-8;

/// Minimum angular separation (radians) enforced between the randomly
/// drawn diagonal entries of `V2`, far above [`EQUIV_TOL`].
pub const MIN_ANGLE_GAP: f64 = 1e-3;

const TAU: f64 = std::f64::consts::TAU;

/// Errors from model construction and spectral tests.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum RepError {
    #[error("dimension must be at least 1")]
    InvalidDimension,
    #[error("angle list has {got} entries, expected {expected}")]
    AngleCountMismatch { expected: usize, got: usize },
    #[error("duplicate angles at positions {0} and {1}")]
    DuplicateAngles(usize, usize),
    #[error("|lambda| = {0} is not 1 within 1e-12")]
    NotUnitModulus(f64),
    #[error("matrix is not unitary (defect {0:.3e})")]
    NotUnitary(f64),
    #[error("could not draw {0} angles with separation {MIN_ANGLE_GAP}")]
    SeparationFailed(usize),
    #[error("eigenvalue computation failed")]
    EigenFailed,
}

/// A concrete model: dimension, unitary `V1`, diagonal unitary `V2` with
/// distinct entries, and the phase `lambda` multiplying the second
/// generator.
#[derive(Clone, Debug)]
pub struct RepModel {
    dim: usize,
    v1: Mat<c64>,
    v2_diag: Vec<c64>,
    lambda: c64,
}

impl RepModel {
    /// Seeded model: `V2` from explicit angles (as fractions of a full
    /// turn) or from a separated random draw, `V1` Haar-style from a QR
    /// factorization with fixed diagonal phases, `lambda = 1`.
    pub fn make(dim: usize, seed: u64, angles: Option<&[f64]>) -> Result<RepModel, RepError> {
        if dim == 0 {
            return Err(RepError::InvalidDimension);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);

        let turns: Vec<f64> = match angles {
            Some(ts) => {
                if ts.len() != dim {
                    return Err(RepError::AngleCountMismatch {
                        expected: dim,
                        got: ts.len(),
                    });
                }
                let reduced: Vec<f64> = ts.iter().map(|t| t.rem_euclid(1.0)).collect();
                for i in 0..reduced.len() {
                    for j in (i + 1)..reduced.len() {
                        if reduced[i] == reduced[j] {
                            return Err(RepError::DuplicateAngles(i, j));
                        }
                    }
                }
                reduced
            }
            None => draw_separated_turns(dim, &mut rng)?,
        };
        let v2_diag: Vec<c64> = turns.iter().map(|&t| unit_from_turn(t)).collect();

        let v1 = haar_unitary(dim, &mut rng);
        let defect = linalg::unitarity_defect(v1.as_ref());
        assert!(defect <= 1e-12, "QR produced a non-unitary factor: {defect:e}");

        Ok(RepModel {
            dim,
            v1,
            v2_diag,
            lambda: c64::new(1.0, 0.0),
        })
    }

    /// Model from explicit matrices, for structured and adversarial
    /// setups. `v1` must be unitary and the diagonal entries unit-modulus
    /// and pairwise distinct.
    pub fn from_parts(v1: Mat<c64>, v2_diag: Vec<c64>, lambda: c64) -> Result<RepModel, RepError> {
        let dim = v2_diag.len();
        if dim == 0 || v1.nrows() != dim || v1.ncols() != dim {
            return Err(RepError::InvalidDimension);
        }
        let defect = linalg::unitarity_defect(v1.as_ref());
        if defect > 1e-10 {
            return Err(RepError::NotUnitary(defect));
        }
        for (i, z) in v2_diag.iter().enumerate() {
            if (z.norm() - 1.0).abs() > 1e-12 {
                return Err(RepError::NotUnitModulus(z.norm()));
            }
            for (j, w) in v2_diag.iter().enumerate().skip(i + 1) {
                if z == w {
                    return Err(RepError::DuplicateAngles(i, j));
                }
            }
        }
        check_unit_modulus(lambda)?;
        Ok(RepModel {
            dim,
            v1,
            v2_diag,
            lambda,
        })
    }

    /// Same `V1, V2` with a new phase on the second generator.
    pub fn with_lambda(&self, lambda: c64) -> Result<RepModel, RepError> {
        check_unit_modulus(lambda)?;
        Ok(RepModel {
            dim: self.dim,
            v1: self.v1.clone(),
            v2_diag: self.v2_diag.clone(),
            lambda,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn v1(&self) -> MatRef<'_, c64> {
        self.v1.as_ref()
    }

    pub fn v2_diag(&self) -> &[c64] {
        &self.v2_diag
    }

    /// `V2` materialized as a diagonal matrix.
    pub fn v2(&self) -> Mat<c64> {
        Mat::from_fn(self.dim, self.dim, |i, j| {
            if i == j {
                self.v2_diag[i]
            } else {
                c64::new(0.0, 0.0)
            }
        })
    }

    pub fn lambda(&self) -> c64 {
        self.lambda
    }

    /// Image of a single letter under the representation.
    pub fn letter_image(&self, l: FLetter) -> Mat<c64> {
        match l {
            FLetter::X1 => self.v1.clone(),
            FLetter::X1Inv => self.v1.adjoint().to_owned(),
            FLetter::X2 => linalg::scale(self.v2().as_ref(), self.lambda),
            FLetter::X2Inv => {
                let m = self.v2().adjoint().to_owned();
                linalg::scale(m.as_ref(), self.lambda.conj())
            }
        }
    }

    /// Multiplicative extension to arbitrary reduced words; the unit word
    /// evaluates to the identity.
    pub fn evaluate(&self, v: &FWord) -> Mat<c64> {
        let mut out = linalg::identity(self.dim);
        for &l in v.letters() {
            out = &out * self.letter_image(l);
        }
        out
    }

    /// SHA-256 over the row-major little-endian bytes of `V1`, for
    /// reproducibility checks in reports.
    pub fn v1_checksum(&self) -> String {
        let mut hasher = Sha256::new();
        for i in 0..self.dim {
            for j in 0..self.dim {
                let z = self.v1[(i, j)];
                hasher.update(z.re.to_le_bytes());
                hasher.update(z.im.to_le_bytes());
            }
        }
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn check_unit_modulus(z: c64) -> Result<(), RepError> {
    let n = z.norm();
    if (n - 1.0).abs() > 1e-12 {
        return Err(RepError::NotUnitModulus(n));
    }
    Ok(())
}

/// `exp(2 pi i t)`.
pub fn unit_from_turn(t: f64) -> c64 {
    c64::new((TAU * t).cos(), (TAU * t).sin())
}

fn draw_separated_turns(dim: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>, RepError> {
    let min_gap_turns = MIN_ANGLE_GAP / TAU;
    for _ in 0..1000 {
        let turns: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
        let mut sorted = turns.clone();
        sorted.sort_by(f64::total_cmp);
        let ok = sorted
            .windows(2)
            .all(|w| w[1] - w[0] >= min_gap_turns)
            && (1.0 - sorted[dim - 1] + sorted[0] >= min_gap_turns || dim == 1);
        if ok {
            return Ok(turns);
        }
    }
    Err(RepError::SeparationFailed(dim))
}

fn haar_unitary(dim: usize, rng: &mut ChaCha8Rng) -> Mat<c64> {
    let z = Mat::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c64::new(re, im)
    });
    let qr = z.qr();
    let q = qr.compute_Q();
    let r = qr.R();
    // fixing the phases of R's diagonal makes the draw Haar and removes
    // the QR sign ambiguity
    Mat::from_fn(dim, dim, |i, j| {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() == 0.0 {
            c64::new(1.0, 0.0)
        } else {
            rjj / rjj.norm()
        };
        q[(i, j)] * phase
    })
}

/// Eigenvalue multiset of a unitary matrix, projected to the unit circle
/// and sorted by angle in `[0, 2 pi)`.
#[derive(Clone, Debug)]
pub struct Spectrum {
    values: Vec<c64>,
}

impl Spectrum {
    pub fn from_values(mut values: Vec<c64>) -> Spectrum {
        values.sort_by(|a, b| angle_key(*a).total_cmp(&angle_key(*b)));
        Spectrum { values }
    }

    pub fn values(&self) -> &[c64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn conjugated(&self) -> Spectrum {
        Spectrum::from_values(self.values.iter().map(|z| z.conj()).collect())
    }

    pub fn rotated(&self, phase: c64) -> Spectrum {
        Spectrum::from_values(self.values.iter().map(|z| z * phase).collect())
    }

    /// Multiset equality up to `tol` via bottleneck matching.
    pub fn matches(&self, other: &Spectrum, tol: f64) -> bool {
        spectra_match(&self.values, &other.values, tol)
    }
}

fn angle_key(z: c64) -> f64 {
    z.arg().rem_euclid(TAU)
}

/// Eigenvalue multiset of a unitary matrix.
pub fn spectrum_of(u: MatRef<'_, c64>) -> Result<Spectrum, RepError> {
    let defect = linalg::unitarity_defect(u);
    if defect > UNITARY_TOL {
        return Err(RepError::NotUnitary(defect));
    }
    let evs: Vec<c64> = u
        .to_owned()
        .eigenvalues()
        .map_err(|_| RepError::EigenFailed)?;
    Ok(Spectrum::from_values(
        evs.into_iter()
            .map(|z| {
                let n = z.norm();
                if n == 0.0 {
                    z
                } else {
                    z / n
                }
            })
            .collect(),
    ))
}

/// Whether two unitaries are unitarily equivalent: both are normal, so
/// equivalence is exactly equality of eigenvalue multisets, tested by
/// bottleneck matching with max pairing distance `tol`.
pub fn unitarily_equivalent(
    u: MatRef<'_, c64>,
    w: MatRef<'_, c64>,
    tol: f64,
) -> Result<bool, RepError> {
    if u.nrows() != w.nrows() {
        return Ok(false);
    }
    let su = spectrum_of(u)?;
    let sw = spectrum_of(w)?;
    Ok(su.matches(&sw, tol))
}

/// Perfect matching test between multisets under the pairing rule
/// `|a_i - b_j| <= tol` (Kuhn augmenting paths).
pub fn spectra_match(a: &[c64], b: &[c64], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let n = a.len();
    let adjacent = |i: usize, j: usize| (a[i] - b[j]).norm() <= tol;
    let mut matched_b: Vec<Option<usize>> = vec![None; n];

    fn augment(
        i: usize,
        n: usize,
        adjacent: &dyn Fn(usize, usize) -> bool,
        matched_b: &mut [Option<usize>],
        visited: &mut [bool],
    ) -> bool {
        for j in 0..n {
            if adjacent(i, j) && !visited[j] {
                visited[j] = true;
                if matched_b[j].is_none()
                    || augment(matched_b[j].unwrap(), n, adjacent, matched_b, visited)
                {
                    matched_b[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }

    for i in 0..n {
        let mut visited = vec![false; n];
        if !augment(i, n, &adjacent, &mut matched_b, &mut visited) {
            return false;
        }
    }
    true
}

/// Uniform random reduced word, for seeded numeric tests.
#[cfg(test)]
pub(crate) fn random_fword(rng: &mut ChaCha8Rng, max_len: usize) -> FWord {
    let len = rng.gen_range(0..=max_len);
    let mut letters = Vec::with_capacity(len);
    for _ in 0..len {
        let l = match rng.gen_range(0..4u8) {
            0 => FLetter::X1,
            1 => FLetter::X1Inv,
            2 => FLetter::X2,
            _ => FLetter::X2Inv,
        };
        letters.push(l);
    }
    FWord::from_letters(letters)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::TwistedActionTable;
    use crate::words::{FGen, KElem};

    fn fw(s: &str) -> FWord {
        s.parse().unwrap()
    }

    fn c(re: f64, im: f64) -> c64 {
        c64::new(re, im)
    }

    #[test]
    fn explicit_angles_build_the_stated_diagonal() {
        let m = RepModel::make(2, 0, Some(&[0.0, 0.25])).unwrap();
        assert!((m.v2_diag()[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((m.v2_diag()[1] - c(0.0, 1.0)).norm() < 1e-15);

        let one = RepModel::make(1, 3, Some(&[0.0])).unwrap();
        assert_eq!(one.v2_diag(), &[c(1.0, 0.0)]);
        assert!((one.v1()[(0, 0)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            RepModel::make(0, 0, None).unwrap_err(),
            RepError::InvalidDimension
        );
        assert_eq!(
            RepModel::make(2, 0, Some(&[0.5, 0.5])).unwrap_err(),
            RepError::DuplicateAngles(0, 1)
        );
        assert!(matches!(
            RepModel::make(2, 0, Some(&[0.5])).unwrap_err(),
            RepError::AngleCountMismatch { .. }
        ));
        let m = RepModel::make(2, 0, None).unwrap();
        assert!(matches!(
            m.with_lambda(c(0.5, 0.0)).unwrap_err(),
            RepError::NotUnitModulus(_)
        ));
    }

    #[test]
    fn same_seed_same_model() {
        let a = RepModel::make(5, 42, None).unwrap();
        let b = RepModel::make(5, 42, None).unwrap();
        assert_eq!(a.v1_checksum(), b.v1_checksum());
        assert_eq!(a.v2_diag(), b.v2_diag());
        let other = RepModel::make(5, 43, None).unwrap();
        assert_ne!(a.v1_checksum(), other.v1_checksum());
    }

    #[test]
    fn evaluation_basics() {
        let m = RepModel::make(3, 7, None).unwrap();
        let id = m.evaluate(&FWord::unit());
        assert!(linalg::op_norm((&id - linalg::identity(3)).as_ref()) < 1e-15);
        // x2 then its inverse cancels
        let w = fw("x2.X2");
        assert!(w.is_unit());

        let lam = unit_from_turn(0.25);
        let ml = m.with_lambda(lam).unwrap();
        // lambda scales only the second generator
        let img1 = ml.evaluate(&fw("x1"));
        assert!(linalg::op_norm((&img1 - m.v1().to_owned()).as_ref()) < 1e-15);
        let img2 = ml.evaluate(&fw("x2"));
        let expected = linalg::scale(m.v2().as_ref(), lam);
        assert!(linalg::op_norm((&img2 - &expected).as_ref()) < 1e-15);
        // product of generator images
        let img12 = ml.evaluate(&fw("x1.x2"));
        let expected = m.v1() * expected;
        assert!(linalg::op_norm((&img12 - expected).as_ref()) < 1e-13);
    }

    #[test]
    fn evaluation_is_a_homomorphism_on_random_words() {
        let m = RepModel::make(4, 11, None)
            .unwrap()
            .with_lambda(unit_from_turn(0.3))
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let v1 = random_fword(&mut rng, 20);
            let v2 = random_fword(&mut rng, 20);
            let lhs = m.evaluate(&v1.multiply(&v2));
            let rhs = m.evaluate(&v1) * m.evaluate(&v2);
            assert!(linalg::op_norm((&lhs - rhs).as_ref()) <= 1e-10);
            let unit_defect = linalg::unitarity_defect(m.evaluate(&v1).as_ref());
            assert!(unit_defect <= 4.0 * 20.0 * 1e-13);
            // inverse evaluates to the adjoint
            let inv = m.evaluate(&v1.inverse());
            let adj = m.evaluate(&v1).adjoint().to_owned();
            assert!(linalg::op_norm((&inv - adj).as_ref()) <= 1e-11);
        }
    }

    #[test]
    fn spectrum_values() {
        let d = Mat::from_fn(2, 2, |i, j| {
            if i == j {
                if i == 0 {
                    c(1.0, 0.0)
                } else {
                    c(0.0, 1.0)
                }
            } else {
                c(0.0, 0.0)
            }
        });
        let s = spectrum_of(d.as_ref()).unwrap();
        assert!((s.values()[0] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((s.values()[1] - c(0.0, 1.0)).norm() < 1e-12);

        let id = linalg::identity(3);
        let s = spectrum_of(id.as_ref()).unwrap();
        assert!(s.values().iter().all(|z| (z - c(1.0, 0.0)).norm() < 1e-12));

        // spectrum of the adjoint is the conjugate multiset
        let m = RepModel::make(5, 9, None).unwrap();
        let u = m.evaluate(&fw("x1.x2"));
        let s = spectrum_of(u.as_ref()).unwrap();
        let sadj = spectrum_of(u.adjoint().to_owned().as_ref()).unwrap();
        assert!(sadj.matches(&s.conjugated(), 1e-9));

        let not_unitary = Mat::from_fn(2, 2, |_, _| c(1.0, 0.0));
        assert!(matches!(
            spectrum_of(not_unitary.as_ref()),
            Err(RepError::NotUnitary(_))
        ));
    }

    #[test]
    fn equivalence_is_permutation_invariant_and_two_sided() {
        let d1 = Mat::from_fn(2, 2, |i, j| {
            if i == j {
                if i == 0 {
                    c(1.0, 0.0)
                } else {
                    c(0.0, 1.0)
                }
            } else {
                c(0.0, 0.0)
            }
        });
        let d2 = Mat::from_fn(2, 2, |i, j| {
            if i == j {
                if i == 0 {
                    c(0.0, 1.0)
                } else {
                    c(1.0, 0.0)
                }
            } else {
                c(0.0, 0.0)
            }
        });
        let d3 = Mat::from_fn(2, 2, |i, j| {
            if i == j {
                if i == 0 {
                    c(1.0, 0.0)
                } else {
                    c(0.0, -1.0)
                }
            } else {
                c(0.0, 0.0)
            }
        });
        assert!(unitarily_equivalent(d1.as_ref(), d1.as_ref(), EQUIV_TOL).unwrap());
        assert!(unitarily_equivalent(d1.as_ref(), d2.as_ref(), EQUIV_TOL).unwrap());
        // {1, i} vs {1, -i}: the unmatched pair sits at distance 2
        assert!(!unitarily_equivalent(d1.as_ref(), d3.as_ref(), EQUIV_TOL).unwrap());
    }

    #[test]
    fn table_compatibility_case_list() {
        // the six-case list relating alpha_k to adjoints and swaps of the
        // generator images, at matrix level
        let table = TwistedActionTable::build();
        let base = RepModel::make(4, 21, None).unwrap();
        let lam = unit_from_turn(0.37);
        let m = base.with_lambda(lam).unwrap();
        let lam_v2 = m.evaluate(&fw("x2"));
        let v1 = m.evaluate(&fw("x1"));

        let img = |k: KElem, r: FGen| m.evaluate(table.alpha_image(k, r));

        // k=(0,1): image of x2 is V1^*
        let lhs = img(KElem::new(0, 1), FGen::X2);
        assert!(linalg::op_norm((&lhs - v1.adjoint().to_owned()).as_ref()) < 1e-12);
        // k=(0,2): image of x1 is (lambda V2)^*
        let lhs = img(KElem::new(0, 2), FGen::X1);
        assert!(linalg::op_norm((&lhs - lam_v2.adjoint().to_owned()).as_ref()) < 1e-12);
        // k=(1,0): image of x2 is (lambda V2)^*
        let lhs = img(KElem::new(1, 0), FGen::X2);
        assert!(linalg::op_norm((&lhs - lam_v2.adjoint().to_owned()).as_ref()) < 1e-12);
        // k=(1,1): image of x2 is V1
        let lhs = img(KElem::new(1, 1), FGen::X2);
        assert!(linalg::op_norm((&lhs - &v1).as_ref()) < 1e-12);
        // k=(1,2): image of x1 is lambda V2
        let lhs = img(KElem::new(1, 2), FGen::X1);
        assert!(linalg::op_norm((&lhs - &lam_v2).as_ref()) < 1e-12);
    }

    #[test]
    fn generic_model_is_irreducible() {
        for seed in [1u64, 2, 3] {
            for dim in [4usize, 8, 12] {
                let m = RepModel::make(dim, seed, None).unwrap();
                let lam = unit_from_turn(0.123);
                let ml = m.with_lambda(lam).unwrap();
                let mats = vec![ml.evaluate(&fw("x1")), ml.evaluate(&fw("x2"))];
                let (dim_comm, _) = linalg::commutant_dimension(&mats, 1e-8);
                assert_eq!(dim_comm, 1, "seed {seed} dim {dim}");
            }
        }
    }
}
