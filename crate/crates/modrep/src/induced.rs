//! The covariant pair and the induced regular representation on
//! `l^2(K) (x) C^d ~ C^(6d)`, together with the intertwiner solver.
//!
//! Operators are kept as 6x6 grids of `d x d` blocks indexed by `K x K`,
//! because all the structural statements here are block-wise:
//! `pi_alpha(a)` is block diagonal, each `lambda_u(k)` is a block
//! permutation, and an intertwiner between two induced representations is
//! characterized by how it couples blocks.
//!
//! The intertwiner equations `T (Ind f) = (Ind' f) T` over the generating
//! set split into independent subsystems over the orbits of the diagonal
//! `K`-action on block positions: the algebra constraints stay inside a
//! block, and the `lambda_u(j)` constraint couples positions `(k, jl)` and
//! `(j^-1 k, l)`, both with the same difference label `l - k + j`. The
//! orbit split is a row/column permutation of the full stacked system, so
//! the singular values of the global system are exactly the union of the
//! per-orbit ones; the solver exploits that, and a dense assembly of the
//! unpermuted system is kept for cross-validation.

use faer::{c64, Mat, MatRef};
use num::ToPrimitive;
use thiserror::Error;

use crate::linalg;
use crate::rep::{self, RepModel};
use crate::rewrite::TwistedActionTable;
use crate::twisted::{GroupAlgElem, L1Elem};
use crate::words::{FGen, KElem};

/// Errors from induced-representation constructions.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum InducedError {
    #[error("block dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
}

/// Operator on `C^(6d)` stored as a 6x6 grid of `d x d` blocks indexed by
/// `K x K` in the fixed enumeration order.
#[derive(Clone, Debug)]
pub struct InducedOperator {
    dim: usize,
    blocks: Vec<Mat<c64>>,
}

impl InducedOperator {
    pub fn zeros(dim: usize) -> InducedOperator {
        InducedOperator {
            dim,
            blocks: (0..36).map(|_| Mat::zeros(dim, dim)).collect(),
        }
    }

    pub fn identity(dim: usize) -> InducedOperator {
        let mut op = InducedOperator::zeros(dim);
        for k in KElem::ALL {
            op.set_block(k, k, linalg::identity(dim));
        }
        op
    }

    /// Block dimension `d` (the full operator acts on `C^(6d)`).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn block(&self, row: KElem, col: KElem) -> MatRef<'_, c64> {
        self.blocks[row.index() * 6 + col.index()].as_ref()
    }

    pub fn set_block(&mut self, row: KElem, col: KElem, m: Mat<c64>) {
        assert!(m.nrows() == self.dim && m.ncols() == self.dim);
        self.blocks[row.index() * 6 + col.index()] = m;
    }

    /// Dense `(6d) x (6d)` matrix; [`InducedOperator::from_dense`] is its
    /// inverse.
    pub fn to_dense(&self) -> Mat<c64> {
        let d = self.dim;
        Mat::from_fn(6 * d, 6 * d, |i, j| self.blocks[(i / d) * 6 + (j / d)][(i % d, j % d)])
    }

    pub fn from_dense(dim: usize, m: MatRef<'_, c64>) -> InducedOperator {
        assert!(m.nrows() == 6 * dim && m.ncols() == 6 * dim);
        let mut op = InducedOperator::zeros(dim);
        for row in KElem::ALL {
            for col in KElem::ALL {
                op.set_block(
                    row,
                    col,
                    Mat::from_fn(dim, dim, |i, j| m[(row.index() * dim + i, col.index() * dim + j)]),
                );
            }
        }
        op
    }

    pub fn multiply(&self, rhs: &InducedOperator) -> InducedOperator {
        assert_eq!(self.dim, rhs.dim);
        let mut out = InducedOperator::zeros(self.dim);
        for row in KElem::ALL {
            for col in KElem::ALL {
                let mut acc = Mat::<c64>::zeros(self.dim, self.dim);
                for mid in KElem::ALL {
                    acc = acc + self.block(row, mid) * rhs.block(mid, col);
                }
                out.set_block(row, col, acc);
            }
        }
        out
    }

    pub fn adjoint(&self) -> InducedOperator {
        let mut out = InducedOperator::zeros(self.dim);
        for row in KElem::ALL {
            for col in KElem::ALL {
                out.set_block(row, col, self.block(col, row).adjoint().to_owned());
            }
        }
        out
    }

    pub fn sub(&self, rhs: &InducedOperator) -> InducedOperator {
        assert_eq!(self.dim, rhs.dim);
        let mut out = InducedOperator::zeros(self.dim);
        for row in KElem::ALL {
            for col in KElem::ALL {
                out.set_block(row, col, self.block(row, col) - rhs.block(row, col));
            }
        }
        out
    }

    pub fn add(&self, rhs: &InducedOperator) -> InducedOperator {
        assert_eq!(self.dim, rhs.dim);
        let mut out = InducedOperator::zeros(self.dim);
        for row in KElem::ALL {
            for col in KElem::ALL {
                out.set_block(row, col, self.block(row, col) + rhs.block(row, col));
            }
        }
        out
    }

    pub fn op_norm(&self) -> f64 {
        linalg::op_norm(self.to_dense().as_ref())
    }

    pub fn frobenius(&self) -> f64 {
        linalg::frobenius(self.to_dense().as_ref())
    }
}

fn coeff_to_c64(c: &crate::twisted::Coeff) -> c64 {
    c64::new(
        c.re.to_f64().expect("coefficient out of f64 range"),
        c.im.to_f64().expect("coefficient out of f64 range"),
    )
}

/// `pi_alpha(a)`: block diagonal with `(k, k)` block
/// `pi(alpha_{k^-1}(a))`.
pub fn pi_alpha(model: &RepModel, table: &TwistedActionTable, a: &GroupAlgElem) -> InducedOperator {
    let d = model.dim();
    let mut op = InducedOperator::zeros(d);
    for k in KElem::ALL {
        let mut acc = Mat::<c64>::zeros(d, d);
        for (w, c) in a.terms() {
            let img = model.evaluate(&table.apply_alpha(k.inverse(), w));
            acc = acc + linalg::scale(img.as_ref(), coeff_to_c64(c));
        }
        op.set_block(k, k, acc);
    }
    op
}

/// `lambda_u(k)`: block permutation with `(l, k^-1 l)` block
/// `pi(u(l^-1, k))`.
pub fn lambda_u(model: &RepModel, table: &TwistedActionTable, k: KElem) -> InducedOperator {
    let d = model.dim();
    let mut op = InducedOperator::zeros(d);
    for l in KElem::ALL {
        let w = table.cocycle(l.inverse(), k);
        op.set_block(l, k.inverse().compose(l), model.evaluate(w));
    }
    op
}

/// `(Ind pi)(f) = sum_k pi_alpha(f(k)) lambda_u(k)`.
pub fn induce(model: &RepModel, table: &TwistedActionTable, f: &L1Elem) -> InducedOperator {
    let d = model.dim();
    let mut out = InducedOperator::zeros(d);
    for k in KElem::ALL {
        if f.component(k).is_zero() {
            continue;
        }
        let term = pi_alpha(model, table, f.component(k)).multiply(&lambda_u(model, table, k));
        out = out.add(&term);
    }
    out
}

/// One checked covariance instance.
#[derive(Clone, Debug)]
pub struct CovarianceRecord {
    pub label: String,
    pub defect: f64,
}

/// Defect report for the two covariant-pair relations.
#[derive(Clone, Debug, Default)]
pub struct CovarianceReport {
    pub conjugation: Vec<CovarianceRecord>,
    pub multiplication: Vec<CovarianceRecord>,
}

impl CovarianceReport {
    pub fn max_conjugation_defect(&self) -> f64 {
        self.conjugation.iter().map(|r| r.defect).fold(0.0, f64::max)
    }

    pub fn max_multiplication_defect(&self) -> f64 {
        self.multiplication.iter().map(|r| r.defect).fold(0.0, f64::max)
    }

    pub fn max_defect(&self) -> f64 {
        self.max_conjugation_defect().max(self.max_multiplication_defect())
    }
}

/// Verifies the covariant-pair relations
/// `pi_alpha(alpha_k(a)) = Ad(lambda_u(k))(pi_alpha(a))` (on both
/// generators and any extra elements supplied) and
/// `lambda_u(k) lambda_u(l) = pi_alpha(u(k,l)) lambda_u(kl)` (all 36
/// pairs), reporting operator-norm defects.
pub fn check_covariance(
    model: &RepModel,
    table: &TwistedActionTable,
    extra: &[GroupAlgElem],
) -> CovarianceReport {
    let mut report = CovarianceReport::default();

    let mut elements: Vec<(String, GroupAlgElem)> = FGen::BOTH
        .iter()
        .map(|&r| {
            (
                r.name().to_string(),
                GroupAlgElem::from_word(crate::words::FWord::generator(r)),
            )
        })
        .collect();
    for (i, a) in extra.iter().enumerate() {
        elements.push((format!("random_{i}"), a.clone()));
    }

    for k in KElem::ALL {
        let lu = lambda_u(model, table, k);
        let lu_star = lu.adjoint();
        for (name, a) in &elements {
            let lhs = pi_alpha(model, table, &a.apply_alpha(table, k));
            let rhs = lu.multiply(&pi_alpha(model, table, a)).multiply(&lu_star);
            report.conjugation.push(CovarianceRecord {
                label: format!("k=({k}) a={name}"),
                defect: lhs.sub(&rhs).op_norm(),
            });
        }
    }

    for k in KElem::ALL {
        for l in KElem::ALL {
            let lhs = lambda_u(model, table, k).multiply(&lambda_u(model, table, l));
            let u_elem = GroupAlgElem::from_word(table.cocycle(k, l).clone());
            let rhs = pi_alpha(model, table, &u_elem)
                .multiply(&lambda_u(model, table, k.compose(l)));
            report.multiplication.push(CovarianceRecord {
                label: format!("k=({k}) l=({l})"),
                defect: lhs.sub(&rhs).op_norm(),
            });
        }
    }

    report
}

/// Relative singular-value threshold below which a direction counts as an
/// intertwiner.
pub const NULL_THRESHOLD: f64 = 1e-8;

/// Solution of the intertwiner equations between two induced
/// representations.
#[derive(Clone, Debug)]
pub struct IntertwinerSpace {
    /// Number of singular values at or below the threshold.
    pub dimension: usize,
    /// Orthonormal (trace inner product) basis of the null directions.
    pub basis: Vec<InducedOperator>,
    /// Largest operator-norm defect of a basis element over the
    /// generating set.
    pub residual: f64,
    /// All singular values of the constraint system, ascending.
    pub singular_values: Vec<f64>,
    pub sigma_max: f64,
    pub threshold: f64,
}

impl IntertwinerSpace {
    /// Second-smallest singular value; the spectral gap certificate for a
    /// one-dimensional null space.
    pub fn second_smallest_sigma(&self) -> f64 {
        self.singular_values.get(1).copied().unwrap_or(0.0)
    }
}

/// The eight generating elements whose intertwining equations cut out the
/// commutant: the two algebra generators and the six group deltas.
fn generating_set() -> Vec<(String, L1Elem)> {
    let mut gens = Vec::new();
    for r in FGen::BOTH {
        gens.push((
            format!("i_A({})", r.name()),
            L1Elem::delta(
                KElem::UNIT,
                GroupAlgElem::from_word(crate::words::FWord::generator(r)),
            ),
        ));
    }
    for k in KElem::ALL {
        gens.push((format!("i_K(({k}))"), L1Elem::delta(k, GroupAlgElem::one())));
    }
    gens
}

/// Solves `T (Ind_A g) = (Ind_B g) T` over the generating set by
/// singular-value thresholding, splitting the system into the six
/// diagonal-orbit subsystems (an exact permutation of the full system).
pub fn intertwiners(
    model_a: &RepModel,
    model_b: &RepModel,
    table: &TwistedActionTable,
) -> Result<IntertwinerSpace, InducedError> {
    if model_a.dim() != model_b.dim() {
        return Err(InducedError::DimensionMismatch(model_a.dim(), model_b.dim()));
    }
    let d = model_a.dim();
    let dd = d * d;

    // per-orbit SVDs; threshold after the global sigma_max is known
    let mut orbit_data: Vec<(KElem, Vec<f64>, Mat<c64>)> = Vec::with_capacity(6);
    for label in KElem::ALL {
        let system = orbit_system(model_a, model_b, table, label);
        let (sigmas, v) = linalg::svd_sigma_v(system.as_ref());
        orbit_data.push((label, sigmas, v));
    }

    let sigma_max = orbit_data
        .iter()
        .flat_map(|(_, s, _)| s.iter().copied())
        .fold(0.0, f64::max);
    let cut = NULL_THRESHOLD * sigma_max;

    let mut basis = Vec::new();
    let mut all_sigmas = Vec::with_capacity(36 * dd);
    for (label, sigmas, v) in &orbit_data {
        all_sigmas.extend_from_slice(sigmas);
        for (i, &s) in sigmas.iter().enumerate() {
            if s <= cut {
                let mut op = InducedOperator::zeros(d);
                for p in KElem::ALL {
                    let slot = p.index() * dd;
                    let block = Mat::from_fn(d, d, |r, c| v[(slot + r * d + c, i)]);
                    op.set_block(p, p.compose(*label), block);
                }
                basis.push(op);
            }
        }
    }
    all_sigmas.sort_by(f64::total_cmp);

    // residual check against the unpermuted equations
    let gens = generating_set();
    let mut residual: f64 = 0.0;
    for t in &basis {
        for (_, g) in &gens {
            let ga = induce(model_a, table, g);
            let gb = induce(model_b, table, g);
            residual = residual.max(t.multiply(&ga).sub(&gb.multiply(t)).op_norm());
        }
    }

    Ok(IntertwinerSpace {
        dimension: basis.len(),
        basis,
        residual,
        singular_values: all_sigmas,
        sigma_max,
        threshold: cut,
    })
}

/// Constraint subsystem for the orbit of blocks `(p, p + label)`:
/// `48 d^2` rows over `6 d^2` unknowns ordered by `p`.
fn orbit_system(
    model_a: &RepModel,
    model_b: &RepModel,
    table: &TwistedActionTable,
    label: KElem,
) -> Mat<c64> {
    let d = model_a.dim();
    let dd = d * d;
    let mut system = Mat::<c64>::zeros(48 * dd, 6 * dd);
    let mut row_base = 0;

    // algebra generators act block-diagonally:
    // T_{k,l} pi_A(alpha_{l^-1}(x_r)) - pi_B(alpha_{k^-1}(x_r)) T_{k,l} = 0
    for r in FGen::BOTH {
        for p in KElem::ALL {
            let k = p;
            let l = p.compose(label);
            let a = model_a.evaluate(table.alpha_image(l.inverse(), r));
            let b = model_b.evaluate(table.alpha_image(k.inverse(), r));
            let slot = p.index() * dd;
            for r0 in 0..d {
                for c0 in 0..d {
                    let row = row_base + r0 * d + c0;
                    for s in 0..d {
                        system[(row, slot + r0 * d + s)] += a[(s, c0)];
                        system[(row, slot + s * d + c0)] -= b[(r0, s)];
                    }
                }
            }
            row_base += dd;
        }
    }

    // lambda_u(j) couples slots q and q - j:
    // T_{q, q+label} pi_A(u((q+label)^-1, j)) - pi_B(u(q^-1, j)) T_{q-j, q-j+label} = 0
    for j in KElem::ALL {
        for q in KElem::ALL {
            let ua = model_a.evaluate(table.cocycle(q.compose(label).inverse(), j));
            let ub = model_b.evaluate(table.cocycle(q.inverse(), j));
            let slot_left = q.index() * dd;
            let slot_right = q.compose(j.inverse()).index() * dd;
            for r0 in 0..d {
                for c0 in 0..d {
                    let row = row_base + r0 * d + c0;
                    for s in 0..d {
                        system[(row, slot_left + r0 * d + s)] += ua[(s, c0)];
                        system[(row, slot_right + s * d + c0)] -= ub[(r0, s)];
                    }
                }
            }
            row_base += dd;
        }
    }

    debug_assert_eq!(row_base, 48 * dd);
    system
}

/// Full stacked constraint system without the orbit permutation, for
/// cross-validation: rows grouped by generator, unknown `T` vectorized
/// block-row-major. Quadratic in `6d`, intended for small `d`.
pub fn dense_constraint_matrix(
    model_a: &RepModel,
    model_b: &RepModel,
    table: &TwistedActionTable,
) -> Mat<c64> {
    let d = model_a.dim();
    let dd = d * d;
    let n = 36 * dd;
    let gens = generating_set();
    let mut c = Mat::<c64>::zeros(gens.len() * n, n);
    let col_of = |kb: usize, lb: usize, i: usize, j: usize| (kb * 6 + lb) * dd + i * d + j;

    for (g_idx, (_, g)) in gens.iter().enumerate() {
        let ma = induce(model_a, table, g);
        let mb = induce(model_b, table, g);
        for k in KElem::ALL {
            for l in KElem::ALL {
                for r0 in 0..d {
                    for c0 in 0..d {
                        let row = g_idx * n + col_of(k.index(), l.index(), r0, c0);
                        // (T M)_{k,l}[r0,c0]: T_{k,s_blk}[r0,s] M_{s_blk,l}[s,c0]
                        for s_blk in KElem::ALL {
                            let m_blk = ma.block(s_blk, l);
                            for s in 0..d {
                                c[(row, col_of(k.index(), s_blk.index(), r0, s))] +=
                                    m_blk[(s, c0)];
                            }
                        }
                        // -(N T)_{k,l}[r0,c0]: N_{k,s_blk}[r0,s] T_{s_blk,l}[s,c0]
                        for s_blk in KElem::ALL {
                            let n_blk = mb.block(k, s_blk);
                            for s in 0..d {
                                c[(row, col_of(s_blk.index(), l.index(), s, c0))] -=
                                    n_blk[(r0, s)];
                            }
                        }
                    }
                }
            }
        }
    }
    c
}

/// Reassembles an operator from the vectorization used by
/// [`dense_constraint_matrix`] (block-row-major, entries row-major).
pub fn operator_from_global_vec(dim: usize, v: &[c64]) -> InducedOperator {
    let dd = dim * dim;
    assert_eq!(v.len(), 36 * dd);
    let mut op = InducedOperator::zeros(dim);
    for k in KElem::ALL {
        for l in KElem::ALL {
            let base = (k.index() * 6 + l.index()) * dd;
            op.set_block(
                k,
                l,
                Mat::from_fn(dim, dim, |i, j| v[base + i * dim + j]),
            );
        }
    }
    op
}

/// Block-structure report for an intertwiner under the spectral freeness
/// hypothesis.
#[derive(Clone, Debug)]
pub struct DecomposabilityReport {
    /// Whether the hypothesis `pi . alpha_j inequivalent to pi'` held for
    /// every nontrivial `j` (tested on generator spectra).
    pub hypothesis_met: bool,
    /// Nontrivial `j` where both generator spectra matched, so the
    /// hypothesis could not be certified.
    pub violations: Vec<KElem>,
    /// Largest operator norm over the 30 off-diagonal blocks.
    pub off_diagonal_max: f64,
    /// Largest defect of `T_{k,k} pi(x_r) - pi'(x_r) T_{k,k}`.
    pub diagonal_intertwine_defect: f64,
    /// Largest pairwise difference between diagonal blocks.
    pub diagonal_pairwise_max: f64,
}

/// Checks the decomposability conclusions block-wise: off-diagonal blocks
/// vanish and diagonal blocks intertwine the two base representations.
/// When the spectral hypothesis fails for some `j`, the report flags it
/// and the norms are still returned for inspection.
pub fn check_decomposability(
    model_a: &RepModel,
    model_b: &RepModel,
    t: &InducedOperator,
    table: &TwistedActionTable,
    tol: f64,
) -> DecomposabilityReport {
    let mut violations = Vec::new();
    for j in KElem::ALL {
        if j.is_unit() {
            continue;
        }
        let both_match = FGen::BOTH.iter().all(|&r| {
            let ja = model_a.evaluate(table.alpha_image(j, r));
            let b = model_b.evaluate(&crate::words::FWord::generator(r));
            rep::unitarily_equivalent(ja.as_ref(), b.as_ref(), tol).unwrap_or(false)
        });
        if both_match {
            violations.push(j);
        }
    }

    let mut off_diagonal_max: f64 = 0.0;
    for k in KElem::ALL {
        for l in KElem::ALL {
            if k != l {
                off_diagonal_max =
                    off_diagonal_max.max(linalg::op_norm(t.block(k, l)));
            }
        }
    }

    let mut diagonal_intertwine_defect: f64 = 0.0;
    for k in KElem::ALL {
        for r in FGen::BOTH {
            let w = crate::words::FWord::generator(r);
            let pa = model_a.evaluate(&w);
            let pb = model_b.evaluate(&w);
            let defect = linalg::op_norm(
                (t.block(k, k) * pa - pb * t.block(k, k).to_owned()).as_ref(),
            );
            diagonal_intertwine_defect = diagonal_intertwine_defect.max(defect);
        }
    }

    let mut diagonal_pairwise_max: f64 = 0.0;
    for k in KElem::ALL {
        for l in KElem::ALL {
            if k.index() < l.index() {
                let diff = t.block(k, k) - t.block(l, l);
                diagonal_pairwise_max = diagonal_pairwise_max.max(linalg::op_norm(diff.as_ref()));
            }
        }
    }

    DecomposabilityReport {
        hypothesis_met: violations.is_empty(),
        violations,
        off_diagonal_max,
        diagonal_intertwine_defect,
        diagonal_pairwise_max,
    }
}
