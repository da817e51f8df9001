//! The coefficient ring `R = Z[S^{-1}]`: a subring of `Q` obtained from the
//! integers by inverting a finite set `S` of primes (with `Q` itself as the
//! degenerate case where every prime is inverted).
//!
//! Scalars are exact reduced fractions whose denominators are `S`-units;
//! arithmetic never rounds and never leaves the ring (the only division
//! offered is by verified units). The submodule [`matrix`] builds dense
//! exact matrices, Smith normal form over `R`, and the classification of
//! finitely generated `R`-modules on top of these scalars.

pub mod matrix;

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub use matrix::{
    aut_description, cokernel_description, kernel_basis, smith_normal_form, solve_linear, Matrix,
    ModuleDescription, ModuleError, SmithDecomposition, SubquotientModule,
};

/// Errors arising from ring-level validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RingError {
    /// A claimed inverted prime is not a prime number.
    NotPrime(u64),
    /// A fraction whose denominator is divisible by a non-inverted prime.
    NonSUnitDenominator { numer: BigInt, denom: BigInt },
    /// Division was requested by an element that is not a unit of the ring.
    DivisionByNonUnit,
}

impl fmt::Display for RingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingError::NotPrime(p) => write!(f, "{p} is not a prime number"),
            RingError::NonSUnitDenominator { numer, denom } => write!(
                f,
                "{numer}/{denom} lies outside the ring: its denominator is not an S-unit"
            ),
            RingError::DivisionByNonUnit => write!(f, "division by a non-unit of the ring"),
        }
    }
}

/// Simple deterministic primality test by trial division; the primes we
/// handle are tiny (entries of `S`, candidate non-invertible primes).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// The ring `R`: either all of `Q`, or `Z[S^{-1}]` for a finite prime set `S`
/// (`S` empty gives `Z` itself).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LocalRing {
    /// Every prime inverted.
    Rationals,
    /// Exactly the listed primes inverted.
    Localized(BTreeSet<u64>),
}

impl LocalRing {
    /// The full rational numbers.
    pub fn rationals() -> Self {
        LocalRing::Rationals
    }

    /// The integers: no primes inverted.
    pub fn integers() -> Self {
        LocalRing::Localized(BTreeSet::new())
    }

    /// `Z[S^{-1}]` for the given primes; rejects non-primes.
    pub fn localized_at<I: IntoIterator<Item = u64>>(primes: I) -> Result<Self, RingError> {
        let mut set = BTreeSet::new();
        for p in primes {
            if !is_prime(p) {
                return Err(RingError::NotPrime(p));
            }
            set.insert(p);
        }
        Ok(LocalRing::Localized(set))
    }

    /// The inverted primes, ascending (`None` when the ring is `Q`).
    pub fn inverted_primes(&self) -> Option<Vec<u64>> {
        match self {
            LocalRing::Rationals => None,
            LocalRing::Localized(s) => Some(s.iter().copied().collect()),
        }
    }

    pub fn is_rationals(&self) -> bool {
        matches!(self, LocalRing::Rationals)
    }

    /// Whether the given prime is inverted in `R`.
    pub fn inverts(&self, p: u64) -> bool {
        match self {
            LocalRing::Rationals => true,
            LocalRing::Localized(s) => s.contains(&p),
        }
    }

    /// The least prime that is *not* invertible in `R`; `None` for `Q`
    /// (conventionally `+infinity`).
    pub fn least_noninvertible_prime(&self) -> Option<u64> {
        match self {
            LocalRing::Rationals => None,
            LocalRing::Localized(s) => {
                let mut p = 2u64;
                loop {
                    if is_prime(p) && !s.contains(&p) {
                        return Some(p);
                    }
                    p += 1;
                }
            }
        }
    }

    /// Whether the reduced fraction `q` lies in `R`.
    pub fn contains(&self, q: &BigRational) -> bool {
        match self {
            LocalRing::Rationals => true,
            LocalRing::Localized(_) => {
                let denom = q.denom().magnitude().clone();
                self.strip_inverted(&denom).is_one()
            }
        }
    }

    /// Divide out of `n` every factor belonging to an inverted prime.
    fn strip_inverted(&self, n: &BigUint) -> BigUint {
        match self {
            LocalRing::Rationals => {
                if n.is_zero() {
                    BigUint::zero()
                } else {
                    BigUint::one()
                }
            }
            LocalRing::Localized(s) => {
                let mut m = n.clone();
                if m.is_zero() {
                    return m;
                }
                for &p in s {
                    let p = BigUint::from(p);
                    loop {
                        let (q, r) = m.div_rem(&p);
                        if r.is_zero() {
                            m = q;
                        } else {
                            break;
                        }
                    }
                }
                m
            }
        }
    }

    /// The *core* of a nonzero integer: `|n|` with all inverted-prime factors
    /// removed. Cores are exactly the canonical associates of integers up to
    /// units of `R`; `core(0) = 0`.
    pub fn core_of(&self, n: &BigInt) -> BigUint {
        self.strip_inverted(n.magnitude())
    }

    /// The core of a nonzero element `a/s` of `R`: since `s` is an `S`-unit
    /// this equals `core(a)`.
    pub fn core_of_element(&self, x: &RingElement) -> BigUint {
        self.core_of(x.0.numer())
    }

    /// Units of `R` are the nonzero elements `a/s` with `core(a) = 1`.
    pub fn is_unit(&self, x: &RingElement) -> bool {
        !x.is_zero() && self.core_of(x.0.numer()).is_one()
    }

    /// Whether the unit group of `R` is infinite (true as soon as one prime
    /// is inverted; `Z` has only `{1, -1}`).
    pub fn has_infinite_units(&self) -> bool {
        match self {
            LocalRing::Rationals => true,
            LocalRing::Localized(s) => !s.is_empty(),
        }
    }

    /// Validate a raw fraction for membership.
    pub fn check_element(&self, q: &BigRational) -> Result<(), RingError> {
        if self.contains(q) {
            Ok(())
        } else {
            Err(RingError::NonSUnitDenominator {
                numer: q.numer().clone(),
                denom: q.denom().clone(),
            })
        }
    }

    /// Build `numer/denom` as an element of `R`, rejecting denominators that
    /// are not `S`-units.
    pub fn element(&self, numer: i64, denom: i64) -> Result<RingElement, RingError> {
        assert!(denom != 0, "zero denominator");
        let q = BigRational::new(BigInt::from(numer), BigInt::from(denom));
        self.check_element(&q)?;
        Ok(RingElement(q))
    }

    /// Canonical representative of `x` modulo the core `f > 0`: the unique
    /// integer in `[0, f)` congruent to `x` (the denominator of `x` is an
    /// `S`-unit, hence invertible modulo `f`).
    pub fn reduce_mod(&self, x: &RingElement, f: &BigUint) -> BigUint {
        assert!(!f.is_zero(), "reduce_mod requires a nonzero modulus");
        let m = BigInt::from(f.clone());
        let a = x.0.numer().mod_floor(&m);
        let s = x.0.denom().mod_floor(&m);
        let s_inv = mod_inverse(&s, &m)
            .expect("denominator of a ring element is invertible modulo a core");
        (a * s_inv)
            .mod_floor(&m)
            .to_biguint()
            .expect("mod_floor of a positive modulus is non-negative")
    }

    /// Exact division check: `Some(a / b)` when the quotient lies in `R`.
    pub fn try_divide(&self, a: &RingElement, b: &RingElement) -> Option<RingElement> {
        if b.is_zero() {
            return None;
        }
        let q = &a.0 / &b.0;
        if self.contains(&q) {
            Some(RingElement(q))
        } else {
            None
        }
    }
}

impl fmt::Display for LocalRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocalRing::Rationals => write!(f, "Q"),
            LocalRing::Localized(s) if s.is_empty() => write!(f, "Z"),
            LocalRing::Localized(s) => {
                write!(f, "Z[")?;
                for (i, p) in s.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "1/{p}")?;
                }
                write!(f, "]")
            }
        }
    }
}

/// Modular inverse of `a` modulo `m > 0`, when `gcd(a, m) = 1`.
pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// An exact scalar: a reduced fraction. Constructors validate membership in
/// a [`LocalRing`]; ring operations (`+`, `-`, `*`) cannot leave the ring,
/// so they need no re-validation. Division is only available through
/// [`LocalRing::try_divide`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct RingElement(BigRational);

impl RingElement {
    pub fn zero() -> Self {
        RingElement(BigRational::zero())
    }

    pub fn one() -> Self {
        RingElement(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        RingElement(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        RingElement(BigRational::from_integer(n))
    }

    pub fn from_biguint(n: BigUint) -> Self {
        RingElement(BigRational::from_integer(BigInt::from_biguint(
            Sign::Plus,
            n,
        )))
    }

    /// Wrap a rational known (mathematically) to lie in the ring at hand.
    /// Internal: public constructors validate instead.
    pub(crate) fn from_ratio_unchecked(q: BigRational) -> Self {
        RingElement(q)
    }

    /// Validated constructor.
    pub fn new(q: BigRational, ring: &LocalRing) -> Result<Self, RingError> {
        ring.check_element(&q)?;
        Ok(RingElement(q))
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }
}

impl fmt::Display for RingElement {
    /// Integers print bare, other fractions as `a/b`; the CLI printer
    /// reuses this form.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl core::ops::$trait for RingElement {
            type Output = RingElement;
            fn $method(self, rhs: RingElement) -> RingElement {
                RingElement(self.0 $op rhs.0)
            }
        }
        impl<'a> core::ops::$trait<&'a RingElement> for &RingElement {
            type Output = RingElement;
            fn $method(self, rhs: &'a RingElement) -> RingElement {
                RingElement(&self.0 $op &rhs.0)
            }
        }
    };
}

impl_binop!(Add, add, +);
impl_binop!(Sub, sub, -);
impl_binop!(Mul, mul, *);

impl core::ops::Neg for RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        RingElement(-self.0)
    }
}

impl core::ops::Neg for &RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        RingElement(-self.0.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn z_half_third() -> LocalRing {
        LocalRing::localized_at([2, 3]).unwrap()
    }

    #[test]
    fn ring_construction_rejects_composites() {
        assert_eq!(
            LocalRing::localized_at([4]),
            Err(RingError::NotPrime(4)),
        );
        assert_eq!(
            LocalRing::localized_at([1]),
            Err(RingError::NotPrime(1)),
        );
        assert!(LocalRing::localized_at([2, 3, 5, 7, 11]).is_ok());
    }

    #[test]
    fn membership_checks_denominators() {
        let r = z_half_third();
        assert!(r.element(1, 12).is_ok()); // 12 = 2^2 * 3
        assert!(r.element(7, 6).is_ok());
        assert!(matches!(
            r.element(1, 5),
            Err(RingError::NonSUnitDenominator { .. })
        ));
        // Reduction can rescue a fraction: 5/10 = 1/2.
        assert!(r.element(5, 10).is_ok());
        assert!(LocalRing::integers().element(3, 5).is_err());
        assert!(LocalRing::rationals().element(3, 5).is_ok());
    }

    #[test]
    fn unit_detection_matches_definition() {
        let r2 = LocalRing::localized_at([2]).unwrap();
        let r23 = z_half_third();
        assert!(r2.is_unit(&RingElement::from_int(1)));
        assert!(r2.is_unit(&RingElement::from_int(-8)));
        assert!(r23.is_unit(&r23.element(6, 1).unwrap()));
        assert!(!r23.is_unit(&r23.element(5, 1).unwrap()));
        assert!(!r23.is_unit(&RingElement::zero()));
        // In Q every nonzero element is a unit.
        let q = LocalRing::rationals();
        assert!(q.is_unit(&q.element(5, 7).unwrap()));
    }

    #[test]
    fn cores_strip_exactly_the_inverted_primes() {
        let r = z_half_third();
        assert_eq!(r.core_of(&BigInt::from(-24)), BigUint::from(1u32)); // 24 = 2^3*3
        assert_eq!(r.core_of(&BigInt::from(60)), BigUint::from(5u32));
        assert_eq!(r.core_of(&BigInt::from(0)), BigUint::zero());
        assert_eq!(
            LocalRing::integers().core_of(&BigInt::from(-60)),
            BigUint::from(60u32)
        );
        assert_eq!(
            LocalRing::rationals().core_of(&BigInt::from(60)),
            BigUint::one()
        );
        // Cores are multiplicative.
        let a = BigInt::from(12);
        let b = BigInt::from(45);
        assert_eq!(r.core_of(&(&a * &b)), r.core_of(&a) * r.core_of(&b));
    }

    #[test]
    fn least_noninvertible_prime_examples() {
        assert_eq!(LocalRing::rationals().least_noninvertible_prime(), None);
        assert_eq!(LocalRing::integers().least_noninvertible_prime(), Some(2));
        assert_eq!(z_half_third().least_noninvertible_prime(), Some(5));
        assert_eq!(
            LocalRing::localized_at([2, 3, 5]).unwrap().least_noninvertible_prime(),
            Some(7)
        );
        assert_eq!(
            LocalRing::localized_at([2, 5]).unwrap().least_noninvertible_prime(),
            Some(3)
        );
    }

    #[test]
    fn reduce_mod_inverts_s_unit_denominators() {
        let r = z_half_third();
        // 1/2 mod 5: 2 * 3 = 6 = 1 mod 5, so 1/2 = 3.
        let half = r.element(1, 2).unwrap();
        assert_eq!(r.reduce_mod(&half, &BigUint::from(5u32)), BigUint::from(3u32));
        // -7/3 mod 5: inverse of 3 is 2, -7 = 3 mod 5, 3*2 = 6 = 1.
        let x = r.element(-7, 3).unwrap();
        assert_eq!(r.reduce_mod(&x, &BigUint::from(5u32)), BigUint::one());
        // Integers reduce as usual.
        let y = RingElement::from_int(13);
        assert_eq!(r.reduce_mod(&y, &BigUint::from(5u32)), BigUint::from(3u32));
    }

    #[test]
    fn try_divide_requires_quotient_in_ring() {
        let r = z_half_third();
        let six = RingElement::from_int(6);
        let four = RingElement::from_int(4);
        let five = RingElement::from_int(5);
        assert_eq!(r.try_divide(&six, &four), Some(r.element(3, 2).unwrap()));
        assert_eq!(r.try_divide(&six, &five), None);
        assert_eq!(r.try_divide(&five, &RingElement::zero()), None);
        assert_eq!(
            LocalRing::rationals().try_divide(&six, &five),
            Some(LocalRing::rationals().element(6, 5).unwrap())
        );
    }

    #[test]
    fn display_forms() {
        assert_eq!(LocalRing::rationals().to_string(), "Q");
        assert_eq!(LocalRing::integers().to_string(), "Z");
        assert_eq!(z_half_third().to_string(), "Z[1/2,1/3]");
        assert_eq!(RingElement::from_int(-3).to_string(), "-3");
        let r = z_half_third();
        assert_eq!(r.element(-3, 2).unwrap().to_string(), "-3/2");
    }

    #[test]
    fn arithmetic_is_exact_and_closed() {
        let r = z_half_third();
        let a = r.element(1, 2).unwrap();
        let b = r.element(1, 3).unwrap();
        let sum = &a + &b;
        assert_eq!(sum, r.element(5, 6).unwrap());
        let prod = &a * &b;
        assert_eq!(prod, r.element(1, 6).unwrap());
        let diff = &a - &b;
        assert_eq!(diff, r.element(1, 6).unwrap());
        assert!(r.contains(sum.as_ratio()));
        assert_eq!(-&a, r.element(-1, 2).unwrap());
    }
}
