//! Symbolic model of the twisted convolution algebra `l^1(A, K, alpha, u)`
//! at the group-algebra level, with exact Gaussian-rational coefficients,
//! and the verifier for the twisted-action axioms.
//!
//! `A` stands in for the group algebra of the free kernel: finitely
//! supported sums of reduced words. Everything here is exact; the deepest
//! identity in this layer is associativity of the twisted convolution,
//! which would be invisible under rounding.

use std::collections::BTreeMap;

use num::{BigRational, Complex, One, Zero};

use crate::rewrite::TwistedActionTable;
use crate::words::{FGen, FWord, KElem};

/// Exact Gaussian-rational scalar.
pub type Coeff = Complex<BigRational>;

/// `re + im*i` from small integers, mostly for tests and examples.
pub fn coeff(re: i64, im: i64) -> Coeff {
    Complex::new(
        BigRational::from_integer(re.into()),
        BigRational::from_integer(im.into()),
    )
}

fn coeff_is_zero(c: &Coeff) -> bool {
    c.re.is_zero() && c.im.is_zero()
}

/// Finitely supported sum of reduced words with [`Coeff`] coefficients.
/// Zero coefficients are never stored, so `==` is exact equality.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct GroupAlgElem {
    terms: BTreeMap<FWord, Coeff>,
}

impl GroupAlgElem {
    pub fn zero() -> GroupAlgElem {
        GroupAlgElem::default()
    }

    /// The multiplicative unit `1 * empty_word`.
    pub fn one() -> GroupAlgElem {
        GroupAlgElem::from_word(FWord::unit())
    }

    /// The basis element `1 * w`.
    pub fn from_word(w: FWord) -> GroupAlgElem {
        GroupAlgElem::from_term(w, Complex::new(BigRational::one(), BigRational::zero()))
    }

    pub fn from_term(w: FWord, c: Coeff) -> GroupAlgElem {
        let mut e = GroupAlgElem::zero();
        e.add_term(w, c);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FWord, &Coeff)> {
        self.terms.iter()
    }

    pub fn support_size(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, w: FWord, c: Coeff) {
        if coeff_is_zero(&c) {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if coeff_is_zero(&sum) {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, rhs: &GroupAlgElem) -> GroupAlgElem {
        let mut out = self.clone();
        for (w, c) in rhs.terms() {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &GroupAlgElem) -> GroupAlgElem {
        let mut out = self.clone();
        for (w, c) in rhs.terms() {
            out.add_term(w.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Coeff) -> GroupAlgElem {
        let mut out = GroupAlgElem::zero();
        for (w, x) in self.terms() {
            out.add_term(w.clone(), x.clone() * c.clone());
        }
        out
    }

    /// Convolution product over the free group.
    pub fn multiply(&self, rhs: &GroupAlgElem) -> GroupAlgElem {
        let mut out = GroupAlgElem::zero();
        for (w1, c1) in self.terms() {
            for (w2, c2) in rhs.terms() {
                out.add_term(w1.multiply(w2), c1.clone() * c2.clone());
            }
        }
        out
    }

    /// `*`-operation: conjugate coefficients, invert words.
    pub fn adjoint(&self) -> GroupAlgElem {
        let mut out = GroupAlgElem::zero();
        for (w, c) in self.terms() {
            out.add_term(w.inverse(), c.conj());
        }
        out
    }

    /// Coefficient-wise pushforward along `alpha_k`; an algebra
    /// automorphism because `alpha_k` is a group automorphism.
    pub fn apply_alpha(&self, table: &TwistedActionTable, k: KElem) -> GroupAlgElem {
        let mut out = GroupAlgElem::zero();
        for (w, c) in self.terms() {
            out.add_term(table.apply_alpha(k, w), c.clone());
        }
        out
    }

    /// Rational upper bound for the l^1-type norm, using
    /// `|z| <= |Re z| + |Im z|` termwise.
    pub fn l1_bound(&self) -> BigRational {
        let mut acc = BigRational::zero();
        for (_, c) in self.terms() {
            acc += num::abs(c.re.clone()) + num::abs(c.im.clone());
        }
        acc
    }
}

/// Element of the twisted convolution algebra: one group-algebra
/// coefficient per element of `K` (all six slots always present).
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct L1Elem {
    parts: [GroupAlgElem; 6],
}

impl L1Elem {
    pub fn zero() -> L1Elem {
        L1Elem::default()
    }

    /// `delta_k (x) a`.
    pub fn delta(k: KElem, a: GroupAlgElem) -> L1Elem {
        let mut f = L1Elem::zero();
        f.parts[k.index()] = a;
        f
    }

    /// The unit `delta_e (x) 1`.
    pub fn unit() -> L1Elem {
        L1Elem::delta(KElem::UNIT, GroupAlgElem::one())
    }

    pub fn component(&self, k: KElem) -> &GroupAlgElem {
        &self.parts[k.index()]
    }

    pub fn set_component(&mut self, k: KElem, a: GroupAlgElem) {
        self.parts[k.index()] = a;
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(GroupAlgElem::is_zero)
    }

    pub fn add(&self, rhs: &L1Elem) -> L1Elem {
        let mut out = L1Elem::zero();
        for k in KElem::ALL {
            out.parts[k.index()] = self.component(k).add(rhs.component(k));
        }
        out
    }

    pub fn sub(&self, rhs: &L1Elem) -> L1Elem {
        let mut out = L1Elem::zero();
        for k in KElem::ALL {
            out.parts[k.index()] = self.component(k).sub(rhs.component(k));
        }
        out
    }

    /// Twisted convolution
    /// `(f * g)(l) = sum_k f(k) alpha_k(g(k^-1 l)) u(k, k^-1 l)`.
    pub fn multiply(&self, rhs: &L1Elem, table: &TwistedActionTable) -> L1Elem {
        let mut out = L1Elem::zero();
        for l in KElem::ALL {
            let mut acc = GroupAlgElem::zero();
            for k in KElem::ALL {
                let rest = k.inverse().compose(l);
                let g_part = rhs.component(rest);
                if g_part.is_zero() || self.component(k).is_zero() {
                    continue;
                }
                let twisted = g_part.apply_alpha(table, k);
                let u = GroupAlgElem::from_word(table.cocycle(k, rest).clone());
                acc = acc.add(&self.component(k).multiply(&twisted).multiply(&u));
            }
            out.parts[l.index()] = acc;
        }
        out
    }

    /// Involution `f^*(l) = u(l, l^-1)^* alpha_l(f(l^-1))^*`.
    pub fn involution(&self, table: &TwistedActionTable) -> L1Elem {
        let mut out = L1Elem::zero();
        for l in KElem::ALL {
            let inner = self.component(l.inverse());
            if inner.is_zero() {
                continue;
            }
            let u_star = GroupAlgElem::from_word(table.cocycle(l, l.inverse()).inverse());
            let pushed = inner.apply_alpha(table, l).adjoint();
            out.parts[l.index()] = u_star.multiply(&pushed);
        }
        out
    }

    /// Rational upper bound for the l^1 norm.
    pub fn l1_bound(&self) -> BigRational {
        self.parts.iter().map(GroupAlgElem::l1_bound).sum()
    }
}

/// Which axiom an [`AxiomInstance`] belongs to.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum AxiomKind {
    /// `alpha_k alpha_l = Ad(u(k,l)) alpha_{kl}` on a generator.
    AdTwist,
    /// `u(k,l) u(kl,m) = alpha_k(u(l,m)) u(k,lm)`.
    CocycleIdentity,
    /// `u(k,e) = u(e,k) = 1`.
    Normalization,
}

impl AxiomKind {
    pub fn name(self) -> &'static str {
        match self {
            AxiomKind::AdTwist => "ad_twist",
            AxiomKind::CocycleIdentity => "cocycle_identity",
            AxiomKind::Normalization => "normalization",
        }
    }
}

/// One checked instance of a twisted-action axiom.
#[derive(Clone, Debug)]
pub struct AxiomInstance {
    pub kind: AxiomKind,
    pub label: String,
    pub pass: bool,
}

/// Outcome of [`verify_twisted_axioms`].
#[derive(Clone, Debug, Default)]
pub struct AxiomReport {
    pub instances: Vec<AxiomInstance>,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.instances.iter().all(|i| i.pass)
    }

    /// `(passed, total)` for one axiom kind.
    pub fn count(&self, kind: AxiomKind) -> (usize, usize) {
        let of_kind = self.instances.iter().filter(|i| i.kind == kind);
        let total = of_kind.clone().count();
        let passed = of_kind.filter(|i| i.pass).count();
        (passed, total)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AxiomInstance> {
        self.instances.iter().filter(|i| !i.pass)
    }
}

/// Checks, exactly in `F2`, that `(alpha, u)` is a twisted action:
/// the Ad-twist axiom on both generators for all 36 pairs, the cocycle
/// identity for all 216 triples, and the 12 normalization instances.
pub fn verify_twisted_axioms(table: &TwistedActionTable) -> AxiomReport {
    let mut report = AxiomReport::default();

    for k in KElem::ALL {
        for l in KElem::ALL {
            let u = table.cocycle(k, l);
            let u_inv = u.inverse();
            let kl = k.compose(l);
            // one instance per pair; both generator equations must hold
            let pass = FGen::BOTH.iter().all(|&r| {
                let lhs = table.apply_alpha(k, table.alpha_image(l, r));
                let rhs = u.multiply(table.alpha_image(kl, r)).multiply(&u_inv);
                lhs == rhs
            });
            report.instances.push(AxiomInstance {
                kind: AxiomKind::AdTwist,
                label: format!("k=({k}) l=({l})"),
                pass,
            });
        }
    }

    for k in KElem::ALL {
        for l in KElem::ALL {
            for m in KElem::ALL {
                let lhs = table.cocycle(k, l).multiply(table.cocycle(k.compose(l), m));
                let rhs = table
                    .apply_alpha(k, table.cocycle(l, m))
                    .multiply(table.cocycle(k, l.compose(m)));
                report.instances.push(AxiomInstance {
                    kind: AxiomKind::CocycleIdentity,
                    label: format!("k=({k}) l=({l}) m=({m})"),
                    pass: lhs == rhs,
                });
            }
        }
    }

    for k in KElem::ALL {
        report.instances.push(AxiomInstance {
            kind: AxiomKind::Normalization,
            label: format!("u(({k}), e)"),
            pass: table.cocycle(k, KElem::UNIT).is_unit(),
        });
        report.instances.push(AxiomInstance {
            kind: AxiomKind::Normalization,
            label: format!("u(e, ({k}))"),
            pass: table.cocycle(KElem::UNIT, k).is_unit(),
        });
    }

    report
}
