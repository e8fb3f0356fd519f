//! Exact arithmetic in `G = Z2 * Z3`, in `K = Z2 x Z3` and in the free
//! group `F2`, together with the quotient map `p` and its normalized
//! section `n`.
//!
//! Elements of `G` are kept in free-product normal form: an alternating
//! list of syllables `a`, `b`, `b^2`, so equality is list equality.
//! Elements of `F2` are freely reduced letter lists over `x1, x2`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// One syllable of a normal-form word in `G`: `a`, `b` or `b^2`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Syllable {
    A,
    B1,
    B2,
}

impl Syllable {
    fn is_b(self) -> bool {
        matches!(self, Syllable::B1 | Syllable::B2)
    }

    fn b_exponent(self) -> u8 {
        match self {
            Syllable::A => 0,
            Syllable::B1 => 1,
            Syllable::B2 => 2,
        }
    }

    fn from_b_exponent(e: u8) -> Option<Syllable> {
        match e % 3 {
            1 => Some(Syllable::B1),
            2 => Some(Syllable::B2),
            _ => None,
        }
    }

    /// Inverse syllable: `a^-1 = a`, `(b^e)^-1 = b^(3-e)`.
    pub fn inverse(self) -> Syllable {
        match self {
            Syllable::A => Syllable::A,
            Syllable::B1 => Syllable::B2,
            Syllable::B2 => Syllable::B1,
        }
    }
}

/// A letter of the two-generator alphabet `{a, b}` of `G`, used when a
/// word has to be scanned one generator at a time.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GenLetter {
    A,
    B,
}

/// Normal-form word in `G = <a, b | a^2 = b^3 = 1>`.
///
/// The syllable list alternates between `a` and powers of `b`; the empty
/// list is the unit. All constructors normalize, so `==` decides equality
/// in the group.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct GWord {
    syllables: Vec<Syllable>,
}

impl GWord {
    /// The unit `e_G`.
    pub fn unit() -> GWord {
        GWord::default()
    }

    /// Builds the normal form of an arbitrary syllable sequence.
    pub fn from_syllables<I: IntoIterator<Item = Syllable>>(iter: I) -> GWord {
        let mut w = GWord::unit();
        for s in iter {
            w.push(s);
        }
        w
    }

    pub fn is_unit(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    /// Number of syllables of the normal form.
    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Appends one syllable, keeping the normal form. Cancellation at the
    /// seam cascades because the buffer is always in normal form.
    fn push(&mut self, s: Syllable) {
        match self.syllables.last().copied() {
            Some(Syllable::A) if s == Syllable::A => {
                self.syllables.pop();
            }
            Some(top) if top.is_b() && s.is_b() => {
                self.syllables.pop();
                if let Some(merged) =
                    Syllable::from_b_exponent(top.b_exponent() + s.b_exponent())
                {
                    self.syllables.push(merged);
                }
            }
            _ => self.syllables.push(s),
        }
    }

    /// Product of two normal-form words, in normal form.
    pub fn multiply(&self, rhs: &GWord) -> GWord {
        let mut out = self.clone();
        for &s in &rhs.syllables {
            out.push(s);
        }
        out
    }

    /// Inverse word: reverse the list and invert each syllable.
    pub fn inverse(&self) -> GWord {
        GWord {
            syllables: self
                .syllables
                .iter()
                .rev()
                .map(|s| s.inverse())
                .collect(),
        }
    }

    /// The word as a sequence of single generators (`b^2` expands to two
    /// `b` letters).
    pub fn letters(&self) -> impl Iterator<Item = GenLetter> + '_ {
        self.syllables.iter().flat_map(|s| match s {
            Syllable::A => std::iter::repeat(GenLetter::A).take(1),
            Syllable::B1 => std::iter::repeat(GenLetter::B).take(1),
            Syllable::B2 => std::iter::repeat(GenLetter::B).take(2),
        })
    }
}

/// Image of a word under the canonical homomorphism `p: G -> K`: the
/// number of `a` letters mod 2 and the total `b` exponent mod 3.
pub fn project_p(w: &GWord) -> KElem {
    let mut i = 0u8;
    let mut j = 0u8;
    for s in w.syllables() {
        match s {
            Syllable::A => i = (i + 1) % 2,
            b => j = (j + b.b_exponent()) % 3,
        }
    }
    KElem::new(i, j)
}

/// Normalized section `n(i, j) = a^i b^j` of `p`; `n(e_K) = e_G` and
/// `p(n(k)) = k`.
pub fn section_n(k: KElem) -> GWord {
    let mut syllables = Vec::new();
    if k.i() == 1 {
        syllables.push(Syllable::A);
    }
    if let Some(b) = Syllable::from_b_exponent(k.j()) {
        syllables.push(b);
    }
    GWord { syllables }
}

/// Element of `K = Z2 x Z3`, written additively.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct KElem {
    i: u8,
    j: u8,
}

impl KElem {
    pub const UNIT: KElem = KElem { i: 0, j: 0 };

    /// All six elements in the fixed enumeration order `(i, j) -> 3i + j`.
    pub const ALL: [KElem; 6] = [
        KElem { i: 0, j: 0 },
        KElem { i: 0, j: 1 },
        KElem { i: 0, j: 2 },
        KElem { i: 1, j: 0 },
        KElem { i: 1, j: 1 },
        KElem { i: 1, j: 2 },
    ];

    pub fn new(i: u8, j: u8) -> KElem {
        assert!(i < 2 && j < 3, "K element out of range: ({i}, {j})");
        KElem { i, j }
    }

    pub fn i(self) -> u8 {
        self.i
    }

    pub fn j(self) -> u8 {
        self.j
    }

    pub fn is_unit(self) -> bool {
        self == KElem::UNIT
    }

    /// Group operation of `K`.
    pub fn compose(self, rhs: KElem) -> KElem {
        KElem {
            i: (self.i + rhs.i) % 2,
            j: (self.j + rhs.j) % 3,
        }
    }

    pub fn inverse(self) -> KElem {
        KElem {
            i: self.i,
            j: (3 - self.j) % 3,
        }
    }

    /// Position in [`KElem::ALL`].
    pub fn index(self) -> usize {
        (self.i * 3 + self.j) as usize
    }

    pub fn from_index(idx: usize) -> KElem {
        KElem::ALL[idx]
    }
}

impl fmt::Display for KElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.i, self.j)
    }
}

/// The two abstract free generators of `F2`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum FGen {
    X1,
    X2,
}

impl FGen {
    pub const BOTH: [FGen; 2] = [FGen::X1, FGen::X2];

    pub fn letter(self) -> FLetter {
        match self {
            FGen::X1 => FLetter::X1,
            FGen::X2 => FLetter::X2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FGen::X1 => "x1",
            FGen::X2 => "x2",
        }
    }
}

/// A letter of a reduced word in `F2`; capitals denote inverses.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum FLetter {
    X1,
    X1Inv,
    X2,
    X2Inv,
}

impl FLetter {
    pub fn inverse(self) -> FLetter {
        match self {
            FLetter::X1 => FLetter::X1Inv,
            FLetter::X1Inv => FLetter::X1,
            FLetter::X2 => FLetter::X2Inv,
            FLetter::X2Inv => FLetter::X2,
        }
    }

    pub fn generator(self) -> FGen {
        match self {
            FLetter::X1 | FLetter::X1Inv => FGen::X1,
            FLetter::X2 | FLetter::X2Inv => FGen::X2,
        }
    }

    pub fn is_inverse(self) -> bool {
        matches!(self, FLetter::X1Inv | FLetter::X2Inv)
    }
}

/// Freely reduced word in `F2`. The empty word is the unit; all
/// constructors reduce, so `==` decides equality in the free group.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct FWord {
    letters: Vec<FLetter>,
}

impl FWord {
    pub fn unit() -> FWord {
        FWord::default()
    }

    pub fn generator(g: FGen) -> FWord {
        FWord {
            letters: vec![g.letter()],
        }
    }

    /// Reduced word built from an arbitrary letter sequence.
    pub fn from_letters<I: IntoIterator<Item = FLetter>>(iter: I) -> FWord {
        let mut w = FWord::unit();
        for l in iter {
            w.push(l);
        }
        w
    }

    pub fn is_unit(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[FLetter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub(crate) fn push(&mut self, l: FLetter) {
        if self.letters.last().copied() == Some(l.inverse()) {
            self.letters.pop();
        } else {
            self.letters.push(l);
        }
    }

    /// Freely reduced product.
    pub fn multiply(&self, rhs: &FWord) -> FWord {
        let mut out = self.clone();
        for &l in &rhs.letters {
            out.push(l);
        }
        out
    }

    pub fn inverse(&self) -> FWord {
        FWord {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }
}

/// Errors from the textual word parsers.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("unexpected token `{0}` in word")]
    UnexpectedToken(String),
    #[error("`1` denotes the unit and must stand alone")]
    MisplacedUnit,
    #[error("empty word; write `1` for the unit")]
    Empty,
}

fn tokens(s: &str) -> Result<Vec<&str>, ParseError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseError::Empty);
    }
    let parts: Vec<&str> = s.split('.').collect();
    if parts.iter().any(|t| t.is_empty()) {
        return Err(ParseError::UnexpectedToken(String::new()));
    }
    if parts.iter().any(|&t| t == "1") && parts.len() > 1 {
        return Err(ParseError::MisplacedUnit);
    }
    Ok(parts)
}

impl FromStr for GWord {
    type Err = ParseError;

    /// Parses the dot-separated syntax `a`, `b`, `b2` (`1` for the unit),
    /// normalizing as it goes, e.g. `a.b.a.b2` for `x1`.
    fn from_str(s: &str) -> Result<GWord, ParseError> {
        let parts = tokens(s)?;
        if parts == ["1"] {
            return Ok(GWord::unit());
        }
        let mut w = GWord::unit();
        for t in parts {
            match t {
                "a" => w.push(Syllable::A),
                "b" => w.push(Syllable::B1),
                "b2" => w.push(Syllable::B2),
                other => return Err(ParseError::UnexpectedToken(other.to_string())),
            }
        }
        Ok(w)
    }
}

impl fmt::Display for GWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            return write!(f, "1");
        }
        let mut first = true;
        for s in &self.syllables {
            if !first {
                write!(f, ".")?;
            }
            first = false;
            match s {
                Syllable::A => write!(f, "a")?,
                Syllable::B1 => write!(f, "b")?,
                Syllable::B2 => write!(f, "b2")?,
            }
        }
        Ok(())
    }
}

impl FromStr for FWord {
    type Err = ParseError;

    /// Parses the dot-separated syntax `x1`, `x2`, `X1`, `X2` (capitals
    /// are inverses, `1` is the unit), reducing as it goes.
    fn from_str(s: &str) -> Result<FWord, ParseError> {
        let parts = tokens(s)?;
        if parts == ["1"] {
            return Ok(FWord::unit());
        }
        let mut w = FWord::unit();
        for t in parts {
            match t {
                "x1" => w.push(FLetter::X1),
                "X1" => w.push(FLetter::X1Inv),
                "x2" => w.push(FLetter::X2),
                "X2" => w.push(FLetter::X2Inv),
                other => return Err(ParseError::UnexpectedToken(other.to_string())),
            }
        }
        Ok(w)
    }
}

impl fmt::Display for FWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            return write!(f, "1");
        }
        let mut first = true;
        for l in &self.letters {
            if !first {
                write!(f, ".")?;
            }
            first = false;
            match l {
                FLetter::X1 => write!(f, "x1")?,
                FLetter::X1Inv => write!(f, "X1")?,
                FLetter::X2 => write!(f, "x2")?,
                FLetter::X2Inv => write!(f, "X2")?,
            }
        }
        Ok(())
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gw(s: &str) -> GWord {
        s.parse().unwrap()
    }

    fn fw(s: &str) -> FWord {
        s.parse().unwrap()
    }

    #[test]
    fn involutions_cancel() {
        assert_eq!(gw("a").multiply(&gw("a")), GWord::unit());
        assert_eq!(gw("b").multiply(&gw("b2")), GWord::unit());
    }

    #[test]
    fn seam_cancellation_cascades() {
        // a.b times b2.a collapses all the way to the unit
        assert_eq!(gw("a.b").multiply(&gw("b2.a")), GWord::unit());
    }

    #[test]
    fn inverse_of_x1_expansion() {
        let x1 = gw("a.b.a.b2");
        assert_eq!(x1.inverse(), gw("b.a.b2.a"));
        assert_eq!(x1.multiply(&x1.inverse()), GWord::unit());
        assert_eq!(GWord::unit().inverse(), GWord::unit());
        assert_eq!(gw("b2").inverse(), gw("b"));
    }

    #[test]
    fn projection_values() {
        assert_eq!(project_p(&gw("a.b")), KElem::new(1, 1));
        assert_eq!(project_p(&gw("a.b.a.b2")), KElem::UNIT);
        assert_eq!(project_p(&GWord::unit()), KElem::UNIT);
    }

    #[test]
    fn section_values() {
        assert_eq!(section_n(KElem::UNIT), GWord::unit());
        assert_eq!(section_n(KElem::new(1, 2)), gw("a.b2"));
        assert_eq!(section_n(KElem::new(0, 1)), gw("b"));
        for k in KElem::ALL {
            assert_eq!(project_p(&section_n(k)), k);
        }
    }

    #[test]
    fn free_reduction() {
        assert_eq!(fw("x1").multiply(&fw("X1")), FWord::unit());
        assert_eq!(fw("x1.x2").multiply(&fw("X2.x1")), fw("x1.x1"));
        assert_eq!(fw("x1.X2").inverse(), fw("x2.X1"));
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("a.c".parse::<GWord>().is_err());
        assert!("".parse::<GWord>().is_err());
        assert!("1.a".parse::<GWord>().is_err());
        assert!("x3".parse::<FWord>().is_err());
    }

    #[test]
    fn kelem_table() {
        for k in KElem::ALL {
            assert_eq!(KElem::from_index(k.index()), k);
            assert_eq!(k.compose(k.inverse()), KElem::UNIT);
        }
        assert_eq!(KElem::new(1, 2).compose(KElem::new(1, 2)), KElem::new(0, 1));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(512))]

        #[test]
        fn gword_group_axioms(
            w1 in strategies::gword(64),
            w2 in strategies::gword(64),
            w3 in strategies::gword(64),
        ) {
            prop_assert_eq!(
                w1.multiply(&w2).multiply(&w3),
                w1.multiply(&w2.multiply(&w3))
            );
            prop_assert_eq!(w1.multiply(&GWord::unit()), w1.clone());
            prop_assert_eq!(GWord::unit().multiply(&w1), w1.clone());
            prop_assert_eq!(w1.multiply(&w1.inverse()), GWord::unit());
            prop_assert_eq!(w1.inverse().multiply(&w1), GWord::unit());
            prop_assert_eq!(w1.inverse().inverse(), w1.clone());
        }

        #[test]
        fn projection_is_a_homomorphism(
            w1 in strategies::gword(64),
            w2 in strategies::gword(64),
        ) {
            prop_assert_eq!(
                project_p(&w1.multiply(&w2)),
                project_p(&w1).compose(project_p(&w2))
            );
        }

        #[test]
        fn normal_form_is_idempotent(w in strategies::gword(64)) {
            let renorm = GWord::from_syllables(w.syllables().iter().copied());
            prop_assert_eq!(renorm, w);
        }

        #[test]
        fn gword_display_round_trips(w in strategies::gword(64)) {
            let printed = w.to_string();
            prop_assert_eq!(printed.parse::<GWord>().unwrap(), w);
        }

        #[test]
        fn fword_group_axioms(
            v1 in strategies::fword(32),
            v2 in strategies::fword(32),
            v3 in strategies::fword(32),
        ) {
            prop_assert_eq!(
                v1.multiply(&v2).multiply(&v3),
                v1.multiply(&v2.multiply(&v3))
            );
            prop_assert_eq!(v1.multiply(&v1.inverse()), FWord::unit());
            prop_assert!(v1.multiply(&v2).len() <= v1.len() + v2.len());
        }

        #[test]
        fn fword_display_round_trips(v in strategies::fword(32)) {
            let printed = v.to_string();
            prop_assert_eq!(printed.parse::<FWord>().unwrap(), v);
        }
    }
}
