//! Tensor-algebra expansion and the basis certificates built on it.
//!
//! The free graded Lie algebra embeds into the tensor algebra on the same
//! generators by `[x,y] = xy - (-1)^{|x||y|} yx` (concatenation product, no
//! extra signs).  Two independent checks live here:
//!
//! * a *leading-word certificate*: the expansion of the standard bracketing
//!   of a Lyndon word `w` is `w` plus lexicographically larger words, with
//!   leading coefficient exactly 1 (squares `[l,l]` expand to `2·ll + ...`),
//!   so pairwise-distinct leading words prove linear independence of the
//!   basis in each degree;
//! * a *dimension series*: the graded ranks of the free Lie algebra satisfy
//!   `1/(1 - sum_g t^{|g|}) = prod_d (1+t^d)^{L_d^odd} / (1-t^d)^{L_d^even}`,
//!   which pins the expected rank degree by degree and certifies spanning.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{BasisMonomial, FreeLie, LiePolynomial, MonomialTree, RawTree, Word};
use crate::ring::RingElement;

/// An element of the tensor algebra: a linear combination of words with
/// exact coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TensorPolynomial {
    terms: BTreeMap<Word, RingElement>,
}

impl TensorPolynomial {
    pub fn zero() -> Self {
        TensorPolynomial {
            terms: BTreeMap::new(),
        }
    }

    pub fn word(w: Word) -> Self {
        let mut t = Self::zero();
        t.add_term(w, RingElement::one());
        t
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

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &RingElement)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: &Word) -> RingElement {
        self.terms.get(w).cloned().unwrap_or_else(RingElement::zero)
    }

    pub fn add_term(&mut self, w: Word, c: RingElement) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(w).or_insert_with(RingElement::zero);
        *entry = entry.clone() + c;
        if entry.is_zero() {
            // Re-borrow to remove; find the key by value equality is clumsy,
            // so retain instead.
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add_scaled(&mut self, other: &TensorPolynomial, scale: &RingElement) {
        if scale.is_zero() {
            return;
        }
        for (w, c) in other.terms.iter() {
            self.add_term(w.clone(), c.clone() * scale.clone());
        }
    }

    /// Concatenation product, extended bilinearly.
    pub fn mul(&self, other: &TensorPolynomial) -> TensorPolynomial {
        let mut out = TensorPolynomial::zero();
        for (wa, ca) in self.terms.iter() {
            for (wb, cb) in other.terms.iter() {
                let mut letters = wa.0.clone();
                letters.extend_from_slice(&wb.0);
                out.add_term(Word(letters), ca.clone() * cb.clone());
            }
        }
        out
    }

    pub fn scale(&self, c: &RingElement) -> TensorPolynomial {
        let mut out = TensorPolynomial::zero();
        out.add_scaled(self, c);
        out
    }

    /// The lexicographically smallest word, with its coefficient.
    pub fn leading_term(&self) -> Option<(&Word, &RingElement)> {
        self.terms.iter().next()
    }
}

/// Failures of the degree-wise basis certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertificateError {
    /// Words longer than 15 letters do not fit the packed representation.
    WordTooLong(usize),
    /// More than 255 generators do not fit the packed representation.
    TooManyLetters(usize),
    /// Some basis monomial's expansion does not lead with its own word.
    LeadingTermMismatch { monomial: String },
    /// The enumerated basis has a different size than the dimension series
    /// demands.
    DimensionMismatch { expected: usize, got: usize },
}

impl fmt::Display for CertificateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertificateError::WordTooLong(n) => {
                write!(f, "word of length {n} exceeds the packed limit of 15")
            }
            CertificateError::TooManyLetters(n) => {
                write!(f, "{n} generators exceed the packed limit of 255")
            }
            CertificateError::LeadingTermMismatch { monomial } => {
                write!(f, "expansion of {monomial} does not lead with its own word")
            }
            CertificateError::DimensionMismatch { expected, got } => {
                write!(
                    f,
                    "basis has {got} elements but the dimension series demands {expected}"
                )
            }
        }
    }
}

/// A successful certificate for one degree: the basis is independent (via
/// leading words) and has the rank the dimension series demands (spanning).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisCertificate {
    pub degree: usize,
    pub dimension: usize,
}

// Packed words: byte 15 (most significant) holds the length, bytes 14 down
// hold the letters.  Comparison as u128 is (length, lexicographic), which is
// a total order refining lex within fixed length; expansions of a monomial
// only permute its letters, so lengths agree within each expansion.
const LETTER_LIMIT: usize = 255;
const LEN_SHIFT: u32 = 120;
const LETTER_MASK: u128 = (1u128 << LEN_SHIFT) - 1;

fn pack_word(w: &[super::Letter]) -> Result<u128, CertificateError> {
    if w.len() > 15 {
        return Err(CertificateError::WordTooLong(w.len()));
    }
    let mut packed = (w.len() as u128) << LEN_SHIFT;
    for (i, &x) in w.iter().enumerate() {
        packed |= (x as u128) << (8 * (14 - i));
    }
    Ok(packed)
}

fn concat_packed(a: u128, b: u128) -> Result<u128, CertificateError> {
    let la = (a >> LEN_SHIFT) as usize;
    let lb = (b >> LEN_SHIFT) as usize;
    if la + lb > 15 {
        return Err(CertificateError::WordTooLong(la + lb));
    }
    let letters = (a & LETTER_MASK) | ((b & LETTER_MASK) >> (8 * la));
    Ok((((la + lb) as u128) << LEN_SHIFT) | letters)
}

fn sort_fold(mut terms: Vec<(u128, i64)>) -> Vec<(u128, i64)> {
    terms.sort_unstable_by_key(|&(w, _)| w);
    let mut out: Vec<(u128, i64)> = Vec::with_capacity(terms.len());
    for (w, c) in terms {
        match out.last_mut() {
            Some(last) if last.0 == w => last.1 += c,
            _ => out.push((w, c)),
        }
    }
    out.retain(|&(_, c)| c != 0);
    out
}

impl FreeLie {
    /// Exact tensor expansion of a canonical monomial.
    pub fn tensor_expand_tree(&self, t: &MonomialTree) -> TensorPolynomial {
        match t {
            MonomialTree::Leaf(x) => TensorPolynomial::word(Word(vec![*x])),
            MonomialTree::Bracket(l, r) => {
                let lt = self.tensor_expand_tree(l);
                let rt = self.tensor_expand_tree(r);
                let forward = lt.mul(&rt);
                let backward = rt.mul(&lt);
                let sign = commutator_sign(self.tree_degree(l), self.tree_degree(r));
                let mut out = forward;
                out.add_scaled(&backward, &sign);
                out
            }
        }
    }

    /// Exact tensor expansion of a raw bracket expression, computed without
    /// any Lie-side normalization.
    pub fn tensor_expand_raw(&self, t: &RawTree) -> TensorPolynomial {
        match t {
            RawTree::Letter(x) => TensorPolynomial::word(Word(vec![*x])),
            RawTree::Bracket(l, r) => {
                let lt = self.tensor_expand_raw(l);
                let rt = self.tensor_expand_raw(r);
                let forward = lt.mul(&rt);
                let backward = rt.mul(&lt);
                let sign = commutator_sign(self.raw_degree(l), self.raw_degree(r));
                let mut out = forward;
                out.add_scaled(&backward, &sign);
                out
            }
        }
    }

    /// Exact tensor expansion of a normalized polynomial.
    pub fn tensor_expand_polynomial(&self, p: &LiePolynomial) -> TensorPolynomial {
        let mut out = TensorPolynomial::zero();
        for (m, c) in p.iter() {
            let mt = self.tensor_expand_tree(m.tree());
            out.add_scaled(&mt, c);
        }
        out
    }

    fn packed_expand(&self, t: &MonomialTree) -> Result<Vec<(u128, i64)>, CertificateError> {
        match t {
            MonomialTree::Leaf(x) => Ok(vec![(pack_word(&[*x])?, 1)]),
            MonomialTree::Bracket(l, r) => {
                let lt = self.packed_expand(l)?;
                let rt = self.packed_expand(r)?;
                let sign: i64 =
                    if self.tree_degree(l) % 2 == 1 && self.tree_degree(r) % 2 == 1 {
                        1
                    } else {
                        -1
                    };
                let mut terms = Vec::with_capacity(2 * lt.len() * rt.len());
                for &(wl, cl) in lt.iter() {
                    for &(wr, cr) in rt.iter() {
                        terms.push((concat_packed(wl, wr)?, cl * cr));
                        terms.push((concat_packed(wr, wl)?, sign * cl * cr));
                    }
                }
                Ok(sort_fold(terms))
            }
        }
    }

    /// Verifies the leading term of one monomial's tensor expansion: the
    /// smallest word must be the monomial's own word, with coefficient 1
    /// (2 for squares).
    fn check_leading_term(&self, m: &BasisMonomial) -> Result<(), CertificateError> {
        let expansion = self.packed_expand(m.tree())?;
        let own = pack_word(m.word().letters())?;
        let expected: i64 = if m.is_square() { 2 } else { 1 };
        match expansion.first() {
            Some(&(w, c)) if w == own && c == expected => Ok(()),
            _ => Err(CertificateError::LeadingTermMismatch {
                monomial: self.display_monomial(m),
            }),
        }
    }

    /// The rank demanded in degree `n` by the tensor-algebra dimension
    /// series, computed independently of the basis enumeration.
    pub fn dimension_by_series(&self, n: usize) -> usize {
        if n == 0 {
            return 0;
        }
        // Generator counts per degree.
        let mut gens = vec![0i64; n + 1];
        for g in self.letters() {
            if g.degree <= n {
                gens[g.degree] += 1;
            }
        }
        // Tensor algebra series T = 1/(1 - sum_d gens[d] t^d).
        let mut tensor: Vec<BigInt> = vec![BigInt::zero(); n + 1];
        tensor[0] = BigInt::one();
        for k in 1..=n {
            let mut acc = BigInt::zero();
            for d in 1..=k {
                if gens[d] != 0 {
                    acc += BigInt::from(gens[d]) * &tensor[k - d];
                }
            }
            tensor[k] = acc;
        }
        // Peel off one degree at a time.
        let mut product: Vec<BigInt> = vec![BigInt::zero(); n + 1];
        product[0] = BigInt::one();
        let mut rank = 0usize;
        for d in 1..=n {
            let missing = &tensor[d] - &product[d];
            assert!(
                !missing.is_negative(),
                "dimension series produced a negative rank in degree {d}"
            );
            let ld = missing
                .to_usize()
                .expect("graded rank exceeds usize in the dimension series");
            if d == n {
                rank = ld;
                break;
            }
            if ld > 0 {
                let factor = factor_series(d, ld, n);
                product = series_mul(&product, &factor, n);
            }
        }
        rank
    }

    /// Certifies the canonical basis in degree `n`: leading words prove
    /// independence, and the dimension series confirms the count (spanning).
    pub fn certify_basis_degree(&self, n: usize) -> Result<BasisCertificate, CertificateError> {
        if self.letter_count() > LETTER_LIMIT {
            return Err(CertificateError::TooManyLetters(self.letter_count()));
        }
        let basis = self.basis(n);
        for m in basis.iter() {
            self.check_leading_term(m)?;
        }
        let expected = self.dimension_by_series(n);
        if expected != basis.len() {
            return Err(CertificateError::DimensionMismatch {
                expected,
                got: basis.len(),
            });
        }
        Ok(BasisCertificate {
            degree: n,
            dimension: basis.len(),
        })
    }

    /// Renders a tensor polynomial with named letters (for diagnostics).
    pub fn display_tensor(&self, t: &TensorPolynomial) -> String {
        if t.is_zero() {
            return String::from("0");
        }
        let mut out = String::new();
        for (i, (w, c)) in t.iter().enumerate() {
            if i > 0 {
                out.push_str(" + ");
            }
            let word: Vec<&str> = w
                .letters()
                .iter()
                .map(|&x| self.letter(x).name.as_str())
                .collect();
            out.push_str(&format!("{c}*{}", word.join(".")));
        }
        out
    }
}

fn commutator_sign(left_degree: usize, right_degree: usize) -> RingElement {
    // Coefficient of the reversed product in [x,y] = xy - (-1)^{|x||y|} yx.
    if left_degree % 2 == 1 && right_degree % 2 == 1 {
        RingElement::one()
    } else {
        -RingElement::one()
    }
}

/// The series of the degree-`d` factor with multiplicity `l`, truncated at
/// `n`: `(1+t^d)^l` for odd `d`, `(1-t^d)^{-l}` for even `d`.
fn factor_series(d: usize, l: usize, n: usize) -> Vec<BigInt> {
    let mut f = vec![BigInt::zero(); n + 1];
    f[0] = BigInt::one();
    let odd = d % 2 == 1;
    let mut coeff = BigInt::one();
    let mut k = 1usize;
    while d * k <= n {
        if odd {
            if k > l {
                break;
            }
            // C(l, k) = C(l, k-1) * (l - k + 1) / k
            coeff = coeff * BigInt::from(l - k + 1) / BigInt::from(k);
        } else {
            // C(l - 1 + k, k) = C(l + k - 2, k - 1) * (l - 1 + k) / k
            coeff = coeff * BigInt::from(l - 1 + k) / BigInt::from(k);
        }
        f[d * k] = coeff.clone();
        k += 1;
    }
    f
}

fn series_mul(a: &[BigInt], b: &[BigInt], n: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); n + 1];
    for i in 0..=n {
        if a[i].is_zero() {
            continue;
        }
        for j in 0..=(n - i) {
            if !b[j].is_zero() {
                out[i + j] += &a[i] * &b[j];
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freelie::Generator;
    use alloc::vec;

    #[test]
    fn commutator_expansion_of_two_letters() {
        let l = FreeLie::new(vec![Generator::new("x", 1), Generator::new("a", 2)]).unwrap();
        let x = l.generator_monomial(0);
        let a = l.generator_monomial(1);
        let xa = l.bracket_monomials(&x, &a);
        let t = l.tensor_expand_polynomial(&xa);
        // [x,a] = xa - (-1)^{1*2} ax = xa - ax.
        assert_eq!(t.len(), 2);
        assert_eq!(t.coefficient(&Word(vec![0, 1])), RingElement::one());
        assert_eq!(t.coefficient(&Word(vec![1, 0])), -RingElement::one());
    }

    #[test]
    fn square_expands_with_coefficient_two() {
        let l = FreeLie::new(vec![Generator::new("u", 3)]).unwrap();
        let u = l.generator_monomial(0);
        let uu = l.bracket_monomials(&u, &u);
        let t = l.tensor_expand_polynomial(&uu);
        assert_eq!(t.len(), 1);
        assert_eq!(
            t.coefficient(&Word(vec![0, 0])),
            RingElement::from_int(2)
        );
    }

    #[test]
    fn dimension_series_matches_witt_numbers() {
        // Two odd generators of degree 1: ranks 2, 3, 2, 3, 6, 9, ...
        // (the super-graded analogue of the binary Witt numbers).
        let l = FreeLie::new(vec![Generator::new("x", 1), Generator::new("y", 1)]).unwrap();
        for n in 1..=8 {
            assert_eq!(
                l.dimension_by_series(n),
                l.dimension(n),
                "degree {n} rank disagrees with the series"
            );
        }
    }

    #[test]
    fn certificate_passes_on_mixed_alphabet() {
        let l = FreeLie::new(vec![
            Generator::new("u", 3),
            Generator::new("v", 6),
            Generator::new("w", 10),
        ])
        .unwrap();
        for n in 1..=16 {
            let cert = l.certify_basis_degree(n).unwrap();
            assert_eq!(cert.degree, n);
        }
    }

    #[test]
    fn packed_word_order_matches_lex_on_equal_lengths() {
        let a = pack_word(&[0, 1, 2]).unwrap();
        let b = pack_word(&[0, 2, 1]).unwrap();
        let c = pack_word(&[1, 0]).unwrap();
        assert!(a < b);
        // Shorter words sort first regardless of letters.
        assert!(c < a);
        let ab = concat_packed(pack_word(&[0]).unwrap(), pack_word(&[1, 2]).unwrap()).unwrap();
        assert_eq!(ab, a);
    }

    #[test]
    fn expansion_of_normal_form_matches_raw_expansion() {
        let l = FreeLie::new(vec![Generator::new("x", 1), Generator::new("y", 2)]).unwrap();
        // t = [[x,y],[x,[x,y]]] is far from canonical form.
        let xy = RawTree::bracket(RawTree::Letter(0), RawTree::Letter(1));
        let xxy = RawTree::bracket(RawTree::Letter(0), xy.clone());
        let t = RawTree::bracket(xy, xxy);
        let direct = l.tensor_expand_raw(&t);
        let via_nf = l.tensor_expand_polynomial(&l.normal_form(&t));
        assert_eq!(direct, via_nf);
    }
}
