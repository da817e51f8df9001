//! Free graded Lie algebras over a subring of the rationals, with a canonical
//! basis of graded Lyndon monomials.
//!
//! The alphabet is a list of graded generators, ordered by (degree, declaration
//! order).  Words over the alphabet are compared lexicographically, with a
//! proper prefix smaller than any of its extensions.  The canonical basis in
//! weighted degree `n` consists of
//!
//! * the standard bracketings of Lyndon words of weight `n`, and
//! * the squares `[l, l]` for every Lyndon monomial `l` of odd weight `n/2`.
//!
//! The standard bracketing of a Lyndon word `w = uv` splits at the longest
//! proper Lyndon suffix `v`.  Scalars are exact elements of the coefficient
//! ring; no step of normalization ever divides, so everything stays inside
//! the ring.  The sign conventions are fixed once and for all:
//!
//! * graded antisymmetry: `[x,y] = -(-1)^{|x||y|} [y,x]`,
//! * graded Jacobi (left form): `[[x,y],z] = [x,[y,z]] - (-1)^{|x||y|} [y,[x,z]]`,
//! * a derivation `t` of odd degree: `t[x,y] = [tx,y] + (-1)^{|x|} [x,ty]`.
//!
//! The implementation assumes 2 and 3 are invertible in the coefficient ring
//! (so `[x,[x,x]] = 0` for odd `x`, and `[x,x] = 0` for even `x`).

pub mod tensor;

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};
use core::cell::RefCell;
use core::cmp::Ordering;
use core::fmt;

use crate::ring::RingElement;

/// Index of a generator in the canonical (degree, declaration) order.
pub type Letter = u16;

/// A graded generator: a name and a strictly positive degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub degree: usize,
}

impl Generator {
    pub fn new(name: &str, degree: usize) -> Self {
        Generator {
            name: String::from(name),
            degree,
        }
    }
}

/// Errors raised by basis and normal-form computations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LieError {
    /// A generator degree was zero (gradings here are positive).
    ZeroDegreeGenerator(String),
    /// Two generators share a name.
    DuplicateGenerator(String),
    /// A polynomial mixes several weighted degrees where a homogeneous one
    /// is required.
    MixedDegrees,
    /// A coordinate vector has the wrong length for the requested degree.
    WrongCoordinateCount { expected: usize, got: usize },
}

impl fmt::Display for LieError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LieError::ZeroDegreeGenerator(name) => {
                write!(f, "generator `{name}` has degree 0; degrees must be positive")
            }
            LieError::DuplicateGenerator(name) => {
                write!(f, "generator `{name}` is declared twice")
            }
            LieError::MixedDegrees => write!(f, "polynomial is not homogeneous"),
            LieError::WrongCoordinateCount { expected, got } => {
                write!(f, "expected {expected} coordinates, got {got}")
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Words
// ---------------------------------------------------------------------------

/// A word over the graded alphabet.  Letters are canonical indices, so the
/// derived lexicographic order on the underlying vector is exactly the word
/// order (prefixes come before their extensions).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub(crate) Vec<Letter>);

impl Word {
    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `w` is Lyndon iff it is nonempty and strictly smaller than each of its
/// proper suffixes (slice comparison puts a prefix before its extensions,
/// which is the word order used throughout).
fn is_lyndon(w: &[Letter]) -> bool {
    !w.is_empty() && (1..w.len()).all(|i| w < &w[i..])
}

/// The standard factorization position of a Lyndon word of length >= 2: the
/// start of its longest proper Lyndon suffix.
fn standard_split(w: &[Letter]) -> usize {
    for i in 1..w.len() {
        if is_lyndon(&w[i..]) {
            return i;
        }
    }
    unreachable!("a Lyndon word of length >= 2 has a proper Lyndon suffix");
}

// ---------------------------------------------------------------------------
// Monomials
// ---------------------------------------------------------------------------

/// A fully parenthesized bracket expression with generator leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MonomialTree {
    Leaf(Letter),
    Bracket(Box<MonomialTree>, Box<MonomialTree>),
}

impl MonomialTree {
    pub fn bracket(left: MonomialTree, right: MonomialTree) -> Self {
        MonomialTree::Bracket(Box::new(left), Box::new(right))
    }

    /// The word of leaves, left to right.
    pub fn word(&self) -> Word {
        let mut out = Vec::new();
        self.push_letters(&mut out);
        Word(out)
    }

    fn push_letters(&self, out: &mut Vec<Letter>) {
        match self {
            MonomialTree::Leaf(x) => out.push(*x),
            MonomialTree::Bracket(l, r) => {
                l.push_letters(out);
                r.push_letters(out);
            }
        }
    }
}

/// An element of the canonical basis: either the standard bracketing of a
/// Lyndon word, or the square `[l,l]` of an odd-degree Lyndon monomial.
///
/// Ordered by (degree, word length, word), which groups the basis by degree
/// and refines by bracket length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisMonomial {
    tree: MonomialTree,
    word: Word,
    degree: usize,
    square: bool,
}

impl BasisMonomial {
    pub fn tree(&self) -> &MonomialTree {
        &self.tree
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_square(&self) -> bool {
        self.square
    }

    /// Number of generator leaves (the bracket length).
    pub fn length(&self) -> usize {
        self.word.len()
    }
}

impl PartialOrd for BasisMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BasisMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then_with(|| self.word.len().cmp(&other.word.len()))
            .then_with(|| self.word.cmp(&other.word))
    }
}

// ---------------------------------------------------------------------------
// Polynomials
// ---------------------------------------------------------------------------

/// A finite linear combination of canonical basis monomials with exact
/// coefficients.  Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LiePolynomial {
    terms: BTreeMap<BasisMonomial, RingElement>,
}

impl LiePolynomial {
    pub fn zero() -> Self {
        LiePolynomial {
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(m: BasisMonomial) -> Self {
        Self::term(m, RingElement::one())
    }

    pub fn term(m: BasisMonomial, c: RingElement) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisMonomial, &RingElement)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &BasisMonomial) -> RingElement {
        self.terms.get(m).cloned().unwrap_or_else(RingElement::zero)
    }

    pub fn add_term(&mut self, m: BasisMonomial, c: RingElement) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &LiePolynomial) {
        for (m, c) in other.terms.iter() {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &LiePolynomial, scale: &RingElement) {
        if scale.is_zero() {
            return;
        }
        for (m, c) in other.terms.iter() {
            self.add_term(m.clone(), c.clone() * scale.clone());
        }
    }

    pub fn add(&self, other: &LiePolynomial) -> LiePolynomial {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &LiePolynomial) -> LiePolynomial {
        let mut out = self.clone();
        out.add_scaled(other, &-RingElement::one());
        out
    }

    pub fn neg(&self) -> LiePolynomial {
        self.scale(&-RingElement::one())
    }

    pub fn scale(&self, c: &RingElement) -> LiePolynomial {
        let mut out = LiePolynomial::zero();
        out.add_scaled(self, c);
        out
    }

    /// The set of weighted degrees that occur.
    pub fn degrees(&self) -> BTreeSet<usize> {
        self.terms.keys().map(|m| m.degree()).collect()
    }

    /// `Ok(None)` for zero, `Ok(Some(n))` when homogeneous of degree `n`.
    pub fn homogeneous_degree(&self) -> Result<Option<usize>, LieError> {
        let ds = self.degrees();
        match ds.len() {
            0 => Ok(None),
            1 => Ok(ds.into_iter().next()),
            _ => Err(LieError::MixedDegrees),
        }
    }
}

/// A raw (unnormalized) bracket expression, as produced by a parser.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawTree {
    Letter(Letter),
    Bracket(Box<RawTree>, Box<RawTree>),
}

impl RawTree {
    pub fn bracket(left: RawTree, right: RawTree) -> Self {
        RawTree::Bracket(Box::new(left), Box::new(right))
    }
}

// ---------------------------------------------------------------------------
// The algebra
// ---------------------------------------------------------------------------

/// A free graded Lie algebra on a finite graded alphabet.
///
/// Holds memo tables for basis enumeration and bracket normalization, so all
/// methods take `&self`; the type is consequently not `Sync`.
#[derive(Debug)]
pub struct FreeLie {
    letters: Vec<Generator>,
    basis_cache: RefCell<BTreeMap<usize, Vec<BasisMonomial>>>,
    bracket_cache: RefCell<BTreeMap<(Word, Word), LiePolynomial>>,
    in_flight: RefCell<BTreeSet<(Word, Word)>>,
}

impl FreeLie {
    /// Builds the algebra.  Generators are re-ordered canonically: by degree,
    /// and by declaration order within a degree (the sort is stable).
    pub fn new(mut generators: Vec<Generator>) -> Result<Self, LieError> {
        let mut seen = BTreeSet::new();
        for g in generators.iter() {
            if g.degree == 0 {
                return Err(LieError::ZeroDegreeGenerator(g.name.clone()));
            }
            if !seen.insert(g.name.clone()) {
                return Err(LieError::DuplicateGenerator(g.name.clone()));
            }
        }
        generators.sort_by_key(|g| g.degree);
        Ok(FreeLie {
            letters: generators,
            basis_cache: RefCell::new(BTreeMap::new()),
            bracket_cache: RefCell::new(BTreeMap::new()),
            in_flight: RefCell::new(BTreeSet::new()),
        })
    }

    pub fn letter_count(&self) -> usize {
        self.letters.len()
    }

    pub fn letter(&self, x: Letter) -> &Generator {
        &self.letters[x as usize]
    }

    pub fn letter_degree(&self, x: Letter) -> usize {
        self.letters[x as usize].degree
    }

    pub fn letter_named(&self, name: &str) -> Option<Letter> {
        self.letters
            .iter()
            .position(|g| g.name == name)
            .map(|i| i as Letter)
    }

    pub fn letters(&self) -> &[Generator] {
        &self.letters
    }

    pub fn word_degree(&self, w: &[Letter]) -> usize {
        w.iter().map(|&x| self.letter_degree(x)).sum()
    }

    pub fn tree_degree(&self, t: &MonomialTree) -> usize {
        match t {
            MonomialTree::Leaf(x) => self.letter_degree(*x),
            MonomialTree::Bracket(l, r) => self.tree_degree(l) + self.tree_degree(r),
        }
    }

    pub fn raw_degree(&self, t: &RawTree) -> usize {
        match t {
            RawTree::Letter(x) => self.letter_degree(*x),
            RawTree::Bracket(l, r) => self.raw_degree(l) + self.raw_degree(r),
        }
    }

    /// The basis monomial consisting of a single generator.
    pub fn generator_monomial(&self, x: Letter) -> BasisMonomial {
        BasisMonomial {
            tree: MonomialTree::Leaf(x),
            word: Word(vec![x]),
            degree: self.letter_degree(x),
            square: false,
        }
    }

    /// The standard bracketing of a Lyndon word (caller guarantees Lyndon).
    fn monomial_from_lyndon(&self, w: &[Letter]) -> BasisMonomial {
        debug_assert!(is_lyndon(w), "word must be Lyndon");
        BasisMonomial {
            tree: self.standard_bracketing(w),
            word: Word(w.to_vec()),
            degree: self.word_degree(w),
            square: false,
        }
    }

    fn standard_bracketing(&self, w: &[Letter]) -> MonomialTree {
        if w.len() == 1 {
            return MonomialTree::Leaf(w[0]);
        }
        let split = standard_split(w);
        MonomialTree::bracket(
            self.standard_bracketing(&w[..split]),
            self.standard_bracketing(&w[split..]),
        )
    }

    /// The square `[l,l]` of an odd-degree Lyndon monomial.
    fn square_monomial(&self, l: &BasisMonomial) -> BasisMonomial {
        debug_assert!(!l.square && l.degree % 2 == 1);
        let mut letters = l.word.0.clone();
        letters.extend_from_slice(&l.word.0);
        BasisMonomial {
            tree: MonomialTree::bracket(l.tree.clone(), l.tree.clone()),
            word: Word(letters),
            degree: 2 * l.degree,
            square: true,
        }
    }

    /// All Lyndon words of weighted degree exactly `n`, in lexicographic
    /// order.
    fn lyndon_words_of_degree(&self, n: usize) -> Vec<Vec<Letter>> {
        let min_degree = match self.letters.iter().map(|g| g.degree).min() {
            Some(d) => d,
            None => return Vec::new(),
        };
        let max_len = n / min_degree;
        if max_len == 0 {
            return Vec::new();
        }
        let k = self.letters.len() as Letter;
        let mut out = Vec::new();
        // Duval's generation of all Lyndon words of length <= max_len in
        // lexicographic order, filtered by weighted degree.
        let mut w: Vec<Letter> = vec![0];
        loop {
            if self.word_degree(&w) == n {
                out.push(w.clone());
            }
            let period = w.clone();
            while w.len() < max_len {
                w.push(period[w.len() % period.len()]);
            }
            while let Some(&last) = w.last() {
                if last == k - 1 {
                    w.pop();
                } else {
                    break;
                }
            }
            match w.last_mut() {
                None => break,
                Some(last) => *last += 1,
            }
        }
        out
    }

    /// The canonical basis in weighted degree `n`, sorted by (length, word).
    pub fn basis(&self, n: usize) -> Vec<BasisMonomial> {
        if let Some(cached) = self.basis_cache.borrow().get(&n) {
            return cached.clone();
        }
        let mut out: Vec<BasisMonomial> = self
            .lyndon_words_of_degree(n)
            .iter()
            .map(|w| self.monomial_from_lyndon(w))
            .collect();
        if n % 2 == 0 && (n / 2) % 2 == 1 {
            for w in self.lyndon_words_of_degree(n / 2) {
                let l = self.monomial_from_lyndon(&w);
                out.push(self.square_monomial(&l));
            }
        }
        out.sort();
        self.basis_cache.borrow_mut().insert(n, out.clone());
        out
    }

    /// Rank of the degree-`n` component.
    pub fn dimension(&self, n: usize) -> usize {
        self.basis(n).len()
    }

    /// Index of a monomial inside `basis(m.degree())`, if it is canonical.
    pub fn basis_index(&self, m: &BasisMonomial) -> Option<usize> {
        self.basis(m.degree()).binary_search(m).ok()
    }

    /// Coordinates of a homogeneous polynomial in `basis(n)`.  The zero
    /// polynomial is accepted in any degree.
    pub fn coordinates(&self, p: &LiePolynomial, n: usize) -> Result<Vec<RingElement>, LieError> {
        match p.homogeneous_degree()? {
            None => {}
            Some(d) if d == n => {}
            Some(_) => return Err(LieError::MixedDegrees),
        }
        let basis = self.basis(n);
        let mut coords = vec![RingElement::zero(); basis.len()];
        for (m, c) in p.iter() {
            match basis.binary_search(m) {
                Ok(i) => coords[i] = c.clone(),
                Err(_) => panic!("monomial does not belong to this algebra's basis"),
            }
        }
        Ok(coords)
    }

    /// The polynomial with the given coordinates in `basis(n)`.
    pub fn from_coordinates(
        &self,
        n: usize,
        coords: &[RingElement],
    ) -> Result<LiePolynomial, LieError> {
        let basis = self.basis(n);
        if coords.len() != basis.len() {
            return Err(LieError::WrongCoordinateCount {
                expected: basis.len(),
                got: coords.len(),
            });
        }
        let mut p = LiePolynomial::zero();
        for (m, c) in basis.into_iter().zip(coords.iter()) {
            p.add_term(m, c.clone());
        }
        Ok(p)
    }

    // -- normalization ------------------------------------------------------

    /// The bracket of two canonical monomials, as a canonical polynomial.
    pub fn bracket_monomials(&self, a: &BasisMonomial, b: &BasisMonomial) -> LiePolynomial {
        let key = (a.word.clone(), b.word.clone());
        if let Some(hit) = self.bracket_cache.borrow().get(&key) {
            return hit.clone();
        }
        if !self.in_flight.borrow_mut().insert(key.clone()) {
            panic!("bracket rewriting cycled on ({:?}, {:?})", a.word, b.word);
        }
        let result = self.bracket_monomials_inner(a, b);
        self.in_flight.borrow_mut().remove(&key);
        self.bracket_cache.borrow_mut().insert(key, result.clone());
        result
    }

    fn bracket_monomials_inner(&self, a: &BasisMonomial, b: &BasisMonomial) -> LiePolynomial {
        // Equal monomials: zero in even degree, the square in odd degree.
        if a == b {
            if a.degree % 2 == 0 {
                return LiePolynomial::zero();
            }
            if a.square {
                // [s,s] with s itself a square has even degree; unreachable.
                unreachable!("squares have even degree");
            }
            return LiePolynomial::monomial(self.square_monomial(a));
        }
        // Order the pair by word, using graded antisymmetry.
        if a.word > b.word {
            let sign = if (a.degree % 2 == 1) && (b.degree % 2 == 1) {
                RingElement::one()
            } else {
                -RingElement::one()
            };
            return self.bracket_monomials(b, a).scale(&sign);
        }
        // Left square: [[l,l], b] = 2 [l, [l, b]]  (|l| odd).
        if a.square {
            let l = self.left_factor(a);
            let inner = self.bracket_monomials(&l, b);
            let outer = self.bracket_polynomial(&LiePolynomial::monomial(l), &inner);
            return outer.scale(&RingElement::from_int(2));
        }
        // Right square: [a, [l,l]].
        if b.square {
            let l = self.left_factor(b);
            if *a == l {
                // [l, [l, l]] vanishes when 3 is invertible.
                return LiePolynomial::zero();
            }
            // [a,[l,l]] = [[a,l],l] + (-1)^{|a||l|} [l,[a,l]].
            let al = self.bracket_monomials(a, &l);
            let lp = LiePolynomial::monomial(l.clone());
            let first = self.bracket_polynomial(&al, &lp);
            let second = self.bracket_polynomial(&lp, &al);
            let sign = if (a.degree % 2 == 1) && (l.degree % 2 == 1) {
                -RingElement::one()
            } else {
                RingElement::one()
            };
            let mut out = first;
            out.add_scaled(&second, &sign);
            return out;
        }
        // Both Lyndon, a.word < b.word.  The concatenation is Lyndon; it is
        // the standard bracketing exactly when a is a letter or the right
        // factor of a dominates b.
        if a.word.len() == 1 {
            return LiePolynomial::monomial(self.concat_lyndon(a, b));
        }
        let (a1, a2) = self.lyndon_factors(a);
        if a2.word >= b.word {
            return LiePolynomial::monomial(self.concat_lyndon(a, b));
        }
        // [[a1,a2], b] = [a1,[a2,b]] - (-1)^{|a1||a2|} [a2,[a1,b]].
        let a2b = self.bracket_monomials(&a2, b);
        let a1p = LiePolynomial::monomial(a1.clone());
        let first = self.bracket_polynomial(&a1p, &a2b);
        let a1b = self.bracket_monomials(&a1, b);
        let a2p = LiePolynomial::monomial(a2.clone());
        let second = self.bracket_polynomial(&a2p, &a1b);
        let sign = if (a1.degree % 2 == 1) && (a2.degree % 2 == 1) {
            RingElement::one()
        } else {
            -RingElement::one()
        };
        let mut out = first;
        out.add_scaled(&second, &sign);
        out
    }

    /// For a square `[l,l]`, the monomial `l`.
    fn left_factor(&self, m: &BasisMonomial) -> BasisMonomial {
        debug_assert!(m.square);
        let half = m.word.len() / 2;
        self.monomial_from_lyndon(&m.word.0[..half])
    }

    /// The two standard factors of a Lyndon monomial of length >= 2.
    fn lyndon_factors(&self, m: &BasisMonomial) -> (BasisMonomial, BasisMonomial) {
        debug_assert!(!m.square && m.word.len() >= 2);
        let split = standard_split(&m.word.0);
        (
            self.monomial_from_lyndon(&m.word.0[..split]),
            self.monomial_from_lyndon(&m.word.0[split..]),
        )
    }

    /// Concatenation `ab` of Lyndon monomials with `a < b`, known to be the
    /// standard bracketing `[a, b]`.
    fn concat_lyndon(&self, a: &BasisMonomial, b: &BasisMonomial) -> BasisMonomial {
        let mut letters = a.word.0.clone();
        letters.extend_from_slice(&b.word.0);
        debug_assert!(is_lyndon(&letters));
        debug_assert_eq!(standard_split(&letters), a.word.len());
        BasisMonomial {
            tree: MonomialTree::bracket(a.tree.clone(), b.tree.clone()),
            word: Word(letters),
            degree: a.degree + b.degree,
            square: false,
        }
    }

    /// Bilinear extension of the monomial bracket.
    pub fn bracket_polynomial(&self, p: &LiePolynomial, q: &LiePolynomial) -> LiePolynomial {
        let mut out = LiePolynomial::zero();
        for (ma, ca) in p.iter() {
            for (mb, cb) in q.iter() {
                let piece = self.bracket_monomials(ma, mb);
                out.add_scaled(&piece, &(ca.clone() * cb.clone()));
            }
        }
        out
    }

    /// Normal form of a raw bracket expression.
    pub fn normal_form(&self, t: &RawTree) -> LiePolynomial {
        match t {
            RawTree::Letter(x) => LiePolynomial::monomial(self.generator_monomial(*x)),
            RawTree::Bracket(l, r) => {
                let lp = self.normal_form(l);
                let rp = self.normal_form(r);
                self.bracket_polynomial(&lp, &rp)
            }
        }
    }

    // -- derivations and morphisms ------------------------------------------

    /// Applies the unique extension of `images` as a graded derivation whose
    /// degree has the parity `odd_derivation`:
    /// `t[x,y] = [tx, y] + (-1)^{|t||x|} [x, ty]`.
    pub fn apply_derivation<F>(
        &self,
        odd_derivation: bool,
        images: &F,
        p: &LiePolynomial,
    ) -> LiePolynomial
    where
        F: Fn(Letter) -> LiePolynomial,
    {
        let mut out = LiePolynomial::zero();
        for (m, c) in p.iter() {
            let dm = self.derive_tree(odd_derivation, images, m.tree());
            out.add_scaled(&dm, c);
        }
        out
    }

    fn derive_tree<F>(&self, odd: bool, images: &F, t: &MonomialTree) -> LiePolynomial
    where
        F: Fn(Letter) -> LiePolynomial,
    {
        match t {
            MonomialTree::Leaf(x) => images(*x),
            MonomialTree::Bracket(l, r) => {
                let lp = self.tree_polynomial(l);
                let rp = self.tree_polynomial(r);
                let dl = self.derive_tree(odd, images, l);
                let dr = self.derive_tree(odd, images, r);
                let mut out = self.bracket_polynomial(&dl, &rp);
                let sign = if odd && self.tree_degree(l) % 2 == 1 {
                    -RingElement::one()
                } else {
                    RingElement::one()
                };
                out.add_scaled(&self.bracket_polynomial(&lp, &dr), &sign);
                out
            }
        }
    }

    /// Applies the multiplicative extension of `images` (a Lie algebra map
    /// determined by generator images).
    pub fn apply_morphism<F>(&self, images: &F, p: &LiePolynomial) -> LiePolynomial
    where
        F: Fn(Letter) -> LiePolynomial,
    {
        let mut out = LiePolynomial::zero();
        for (m, c) in p.iter() {
            let fm = self.morph_tree(images, m.tree());
            out.add_scaled(&fm, c);
        }
        out
    }

    fn morph_tree<F>(&self, images: &F, t: &MonomialTree) -> LiePolynomial
    where
        F: Fn(Letter) -> LiePolynomial,
    {
        match t {
            MonomialTree::Leaf(x) => images(*x),
            MonomialTree::Bracket(l, r) => {
                let fl = self.morph_tree(images, l);
                let fr = self.morph_tree(images, r);
                self.bracket_polynomial(&fl, &fr)
            }
        }
    }

    /// A canonical monomial, reinterpreted as a one-term polynomial.  The
    /// subtrees of a canonical monomial are again canonical, which makes this
    /// cheap for derivation recursions.
    fn tree_polynomial(&self, t: &MonomialTree) -> LiePolynomial {
        let word = t.word();
        let m = if is_lyndon(&word.0) {
            self.monomial_from_lyndon(&word.0)
        } else {
            // Only squares appear as non-Lyndon canonical subtrees.
            let half = word.len() / 2;
            let l = self.monomial_from_lyndon(&word.0[..half]);
            self.square_monomial(&l)
        };
        debug_assert_eq!(m.tree(), t);
        LiePolynomial::monomial(m)
    }

    // -- display -------------------------------------------------------------

    pub fn display_tree(&self, t: &MonomialTree) -> String {
        match t {
            MonomialTree::Leaf(x) => self.letter(*x).name.clone(),
            MonomialTree::Bracket(l, r) => {
                format!("[{},{}]", self.display_tree(l), self.display_tree(r))
            }
        }
    }

    pub fn display_monomial(&self, m: &BasisMonomial) -> String {
        self.display_tree(&m.tree)
    }

    /// Renders a polynomial as `c1*m1 + c2*m2 - ...`; unit coefficients are
    /// suppressed, non-integer ones appear as `a/b`.
    pub fn display_polynomial(&self, p: &LiePolynomial) -> String {
        if p.is_zero() {
            return String::from("0");
        }
        let mut out = String::new();
        for (i, (m, c)) in p.iter().enumerate() {
            let neg = c < &RingElement::zero();
            let abs = if neg { -c.clone() } else { c.clone() };
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else if neg {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            if !abs.is_one() {
                out.push_str(&format!("{abs}*"));
            }
            out.push_str(&self.display_monomial(m));
        }
        out
    }
}
