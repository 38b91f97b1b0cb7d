//! Arithmetic in truncated discrete valuation rings.
//!
//! Two families are supported, both at a mandatory finite working precision
//! `m`:
//!
//! * `Z/p^m` — integers mod a prime power, uniformizer `p`;
//! * `F_q[[t]]/t^m` — truncated power series over a prime field, uniformizer
//!   `t` (carry-less arithmetic on coefficient vectors).
//!
//! Elements of either family are stored as the canonical integer in
//! `[0, p^m)`: for power series the base-`q` digits of that integer are the
//! polynomial coefficients. This makes reduction, valuation and
//! divide-by-uniformizer the *same* integer operation for both families;
//! only multiplication and addition dispatch on the ring kind.
//!
//! Valuations at working precision are censored: a stored zero is
//! indistinguishable from any element of valuation >= m, so `valuation`
//! returns [`Valuation::Censored`] rather than inventing an infinity.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A `pi`-adic valuation observed at finite precision.
///
/// `Finite(a)` means the element is exactly `pi^a * unit`; `Censored(m)`
/// means the element is congruent to zero mod `pi^m` — its true valuation is
/// at least `m` and cannot be resolved at this precision. `Censored` compares
/// greater than every `Finite` value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(u32),
    Censored(u32),
}

impl Valuation {
    pub fn is_censored(self) -> bool {
        matches!(self, Valuation::Censored(_))
    }

    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(a) => Some(a),
            Valuation::Censored(_) => None,
        }
    }

    /// Valuation of a product at precision `m`: sums exponents and censors
    /// once the sum leaves the observable window.
    pub fn product(self, other: Valuation, precision: u32) -> Valuation {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) if a + b < precision => {
                Valuation::Finite(a + b)
            }
            _ => Valuation::Censored(precision),
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use Valuation::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (Finite(_), Censored(_)) => std::cmp::Ordering::Less,
            (Censored(_), Finite(_)) => std::cmp::Ordering::Greater,
            (Censored(a), Censored(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(a) => write!(f, "{a}"),
            Valuation::Censored(m) => write!(f, ">={m}"),
        }
    }
}

/// Which family of truncated DVR this is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RingKind {
    PAdic,
    PowerSeries,
}

#[derive(Debug)]
struct RingRepr {
    kind: RingKind,
    prime: u64,
    precision: u32,
    modulus: BigUint,
}

/// A truncated discrete valuation ring `R/pi^m`. Cheap to clone and compared
/// by parameters, so two independently constructed rings with the same kind,
/// prime and precision are interchangeable.
#[derive(Clone)]
pub struct Ring(Arc<RingRepr>);

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        self.0.kind == other.0.kind
            && self.0.prime == other.0.prime
            && self.0.precision == other.0.precision
    }
}

impl Eq for Ring {}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.kind {
            RingKind::PAdic => write!(f, "Z/{}^{}", self.0.prime, self.0.precision),
            RingKind::PowerSeries => {
                write!(f, "F_{}[[t]]/t^{}", self.0.prime, self.0.precision)
            }
        }
    }
}

fn is_prime_u64(n: u64) -> bool {
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

pub(crate) fn pow_mod_u64(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc = 1u64;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % modulus as u128) as u64;
        }
        base = ((base as u128 * base as u128) % modulus as u128) as u64;
        exp >>= 1;
    }
    acc
}

impl Ring {
    /// `Z/p^m` for a prime `p`.
    pub fn padic(p: u64, m: u32) -> Result<Ring> {
        Self::new(RingKind::PAdic, p, m)
    }

    /// `F_q[[t]]/t^m` for a prime `q`. Prime powers are not supported: the
    /// coefficient arithmetic here is plain mod-`q`, which is only a field
    /// for `q` prime.
    pub fn power_series(q: u64, m: u32) -> Result<Ring> {
        if q >= 2 && !is_prime_u64(q) {
            return Err(Error::UnsupportedResidueField(q));
        }
        Self::new(RingKind::PowerSeries, q, m)
    }

    fn new(kind: RingKind, prime: u64, precision: u32) -> Result<Ring> {
        if !is_prime_u64(prime) {
            return Err(Error::NotPrime(prime));
        }
        if prime > u32::MAX as u64 {
            return Err(Error::PrimeTooLarge(prime));
        }
        if precision == 0 {
            return Err(Error::BadPrecision(precision));
        }
        let modulus = BigUint::from(prime).pow(precision);
        Ok(Ring(Arc::new(RingRepr {
            kind,
            prime,
            precision,
            modulus,
        })))
    }

    pub fn kind(&self) -> RingKind {
        self.0.kind
    }

    /// The residue characteristic, i.e. the prime `p` (or `q`).
    pub fn prime(&self) -> u64 {
        self.0.prime
    }

    /// The working precision `m`.
    pub fn precision(&self) -> u32 {
        self.0.precision
    }

    pub fn modulus(&self) -> &BigUint {
        &self.0.modulus
    }

    /// The same ring truncated to precision `k`, `1 <= k <= m`.
    pub fn slice(&self, k: u32) -> Result<Ring> {
        if k == 0 || k > self.0.precision {
            return Err(Error::BadSlice {
                requested: k,
                available: self.0.precision,
            });
        }
        Self::new(self.0.kind, self.0.prime, k)
    }

    pub fn zero(&self) -> DvrElement {
        DvrElement {
            ring: self.clone(),
            value: BigUint::zero(),
        }
    }

    pub fn one(&self) -> DvrElement {
        self.from_u64(1)
    }

    /// The uniformizer `pi` (that is, `p` or `t`).
    pub fn uniformizer(&self) -> DvrElement {
        self.from_u64(self.0.prime)
    }

    pub fn from_u64(&self, x: u64) -> DvrElement {
        DvrElement {
            ring: self.clone(),
            value: BigUint::from(x) % &self.0.modulus,
        }
    }

    pub fn from_i64(&self, x: i64) -> DvrElement {
        self.from_bigint(&BigInt::from(x))
    }

    pub fn from_bigint(&self, x: &BigInt) -> DvrElement {
        DvrElement {
            ring: self.clone(),
            value: self.reduce_bigint(x),
        }
    }

    pub fn from_biguint(&self, x: BigUint) -> DvrElement {
        DvrElement {
            ring: self.clone(),
            value: x % &self.0.modulus,
        }
    }

    pub(crate) fn reduce_bigint(&self, x: &BigInt) -> BigUint {
        let m = BigInt::from(self.0.modulus.clone());
        x.mod_floor(&m)
            .to_biguint()
            .expect("mod_floor of positive modulus is nonnegative")
    }

    // ---- raw arithmetic on canonical residues -------------------------------

    pub(crate) fn add_raw(&self, a: &BigUint, b: &BigUint) -> BigUint {
        match self.0.kind {
            RingKind::PAdic => (a + b) % &self.0.modulus,
            RingKind::PowerSeries => {
                let q = self.0.prime;
                let da = self.digits(a);
                let db = self.digits(b);
                let sum: Vec<u64> = da
                    .iter()
                    .zip(db.iter())
                    .map(|(x, y)| (x + y) % q)
                    .collect();
                self.encode_digits(&sum)
            }
        }
    }

    pub(crate) fn neg_raw(&self, a: &BigUint) -> BigUint {
        match self.0.kind {
            RingKind::PAdic => {
                if a.is_zero() {
                    BigUint::zero()
                } else {
                    &self.0.modulus - a
                }
            }
            RingKind::PowerSeries => {
                let q = self.0.prime;
                let da = self.digits(a);
                let neg: Vec<u64> = da.iter().map(|x| (q - x) % q).collect();
                self.encode_digits(&neg)
            }
        }
    }

    pub(crate) fn sub_raw(&self, a: &BigUint, b: &BigUint) -> BigUint {
        self.add_raw(a, &self.neg_raw(b))
    }

    pub(crate) fn mul_raw(&self, a: &BigUint, b: &BigUint) -> BigUint {
        match self.0.kind {
            RingKind::PAdic => (a * b) % &self.0.modulus,
            RingKind::PowerSeries => {
                let q = self.0.prime as u128;
                let m = self.0.precision as usize;
                let da = self.digits(a);
                let db = self.digits(b);
                let mut acc = vec![0u128; m];
                for (i, x) in da.iter().enumerate() {
                    if *x == 0 {
                        continue;
                    }
                    for (j, y) in db.iter().enumerate() {
                        if i + j >= m {
                            break;
                        }
                        acc[i + j] += *x as u128 * *y as u128;
                    }
                }
                let reduced: Vec<u64> = acc.iter().map(|x| (x % q) as u64).collect();
                self.encode_digits(&reduced)
            }
        }
    }

    /// Base-`p` digits of the canonical residue, length `m`.
    fn digits(&self, x: &BigUint) -> Vec<u64> {
        let p = BigUint::from(self.0.prime);
        let mut digits = Vec::with_capacity(self.0.precision as usize);
        let mut rest = x.clone();
        for _ in 0..self.0.precision {
            let (q, r) = rest.div_rem(&p);
            digits.push(r.to_u64().expect("digit < prime fits u64"));
            rest = q;
        }
        digits
    }

    fn encode_digits(&self, digits: &[u64]) -> BigUint {
        let p = BigUint::from(self.0.prime);
        let mut acc = BigUint::zero();
        for d in digits.iter().rev() {
            acc = acc * &p + BigUint::from(*d);
        }
        acc
    }

    pub(crate) fn val_raw(&self, x: &BigUint) -> Valuation {
        if x.is_zero() {
            return Valuation::Censored(self.0.precision);
        }
        let p = BigUint::from(self.0.prime);
        let mut v = 0u32;
        let mut rest = x.clone();
        loop {
            let (q, r) = rest.div_rem(&p);
            if !r.is_zero() {
                return Valuation::Finite(v);
            }
            v += 1;
            rest = q;
        }
    }

    /// `pi^k * x` at working precision (digits above `m` fall off).
    pub(crate) fn shift_up_raw(&self, x: &BigUint, k: u32) -> BigUint {
        // Multiplying by p^k shifts base-p digits in the integer encoding, so
        // this is the correct operation for both ring families.
        (x * BigUint::from(self.0.prime).pow(k)) % &self.0.modulus
    }

    /// `x / pi^k` for an `x` with valuation >= k (exact integer division of
    /// the canonical residue; shifts digits down in either family).
    pub(crate) fn shift_down_raw(&self, x: &BigUint, k: u32) -> BigUint {
        let p = BigUint::from(self.0.prime).pow(k);
        let (q, r) = x.div_rem(&p);
        debug_assert!(r.is_zero(), "shift_down_raw needs valuation >= {k}");
        q
    }

    /// First base-`p` digit of the residue — the image in the residue field.
    pub(crate) fn residue_u64(&self, x: &BigUint) -> u64 {
        (x % BigUint::from(self.0.prime))
            .to_u64()
            .expect("residue fits u64")
    }

    pub(crate) fn invert_raw(&self, x: &BigUint) -> Result<BigUint> {
        match self.val_raw(x) {
            Valuation::Finite(0) => {}
            Valuation::Finite(a) => return Err(Error::NotAUnit { valuation: a }),
            Valuation::Censored(_) => return Err(Error::ZeroElement),
        }
        match self.0.kind {
            RingKind::PAdic => {
                let a = BigInt::from(x.clone());
                let m = BigInt::from(self.0.modulus.clone());
                let ext = a.extended_gcd(&m);
                debug_assert!(ext.gcd.is_one(), "unit must be coprime to the modulus");
                Ok(self.reduce_bigint(&ext.x))
            }
            RingKind::PowerSeries => self.invert_raw_newton(x),
        }
    }

    /// Inversion by the quadratically convergent iteration
    /// `u <- u * (2 - x*u)`, seeded with the residue-field inverse. Works in
    /// both families (in the power-series case this is the usual lifting of
    /// the constant-term inverse) and doubles the number of correct digits
    /// per step.
    pub(crate) fn invert_raw_newton(&self, x: &BigUint) -> Result<BigUint> {
        match self.val_raw(x) {
            Valuation::Finite(0) => {}
            Valuation::Finite(a) => return Err(Error::NotAUnit { valuation: a }),
            Valuation::Censored(_) => return Err(Error::ZeroElement),
        }
        let p = self.0.prime;
        let r = self.residue_u64(x);
        let seed = pow_mod_u64(r, p - 2, p);
        let two = self.add_raw(&BigUint::one(), &BigUint::one());
        let mut u = BigUint::from(seed);
        // Each step doubles the pi-adic accuracy, starting from one digit.
        let mut correct = 1u64;
        while correct < self.0.precision as u64 {
            let xu = self.mul_raw(x, &u);
            let corr = self.sub_raw(&two, &xu);
            u = self.mul_raw(&u, &corr);
            correct *= 2;
        }
        debug_assert!(self.mul_raw(x, &u).is_one());
        Ok(u)
    }

    /// Lift a rational `num/den` into the ring as `pi^kappa * unit`.
    ///
    /// For `Z/p^m` the powers of `p` are stripped from numerator and
    /// denominator, so `kappa` may be negative (a negative `kappa` means the
    /// rational itself is not a ring element; callers that need an element
    /// must reject that case). For power series every nonzero rational is a
    /// constant, hence `kappa = 0`; rationals whose numerator (resp.
    /// denominator) vanishes mod `q` reduce to zero (resp. are not
    /// invertible) and error.
    pub fn lift_rational(&self, num: i64, den: i64) -> Result<(i64, DvrElement)> {
        if den == 0 {
            return Err(Error::ZeroDenominator);
        }
        if num == 0 {
            return Err(Error::ZeroNumerator);
        }
        let p = self.0.prime as i64;
        match self.0.kind {
            RingKind::PAdic => {
                let mut n = num;
                let mut d = den;
                let mut kappa = 0i64;
                while n % p == 0 {
                    n /= p;
                    kappa += 1;
                }
                while d % p == 0 {
                    d /= p;
                    kappa -= 1;
                }
                let unit = self.from_i64(n) * self.from_i64(d).invert()?;
                Ok((kappa, unit))
            }
            RingKind::PowerSeries => {
                if num % p == 0 {
                    return Err(Error::VanishingRational { num, den });
                }
                if den % p == 0 {
                    return Err(Error::ZeroDenominator);
                }
                let unit = self.from_i64(num) * self.from_i64(den).invert()?;
                Ok((0, unit))
            }
        }
    }
}

/// The decomposition `x = pi^exponent * unit` of a nonzero element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitDecomposition {
    pub exponent: u32,
    pub unit: DvrElement,
}

impl UnitDecomposition {
    /// Multiply back together; inverse of [`DvrElement::unit_decompose`].
    pub fn reassemble(&self) -> DvrElement {
        let ring = self.unit.ring();
        DvrElement {
            ring: ring.clone(),
            value: ring.shift_up_raw(&self.unit.value, self.exponent),
        }
    }
}

/// An element of a truncated DVR, stored as the canonical residue in
/// `[0, p^m)`. Arithmetic operators panic on ring mismatch; that is a
/// programming error, not an input condition.
#[derive(Clone, PartialEq, Eq)]
pub struct DvrElement {
    ring: Ring,
    value: BigUint,
}

impl DvrElement {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    /// The canonical residue.
    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == Valuation::Finite(0)
    }

    pub fn valuation(&self) -> Valuation {
        self.ring.val_raw(&self.value)
    }

    /// Image in the residue field, as a plain integer `< p`.
    pub fn residue(&self) -> u64 {
        self.ring.residue_u64(&self.value)
    }

    /// Split off the largest power of the uniformizer: `x = pi^n * u` with
    /// `u` a unit. Zero (at working precision) has no such decomposition.
    pub fn unit_decompose(&self) -> Result<UnitDecomposition> {
        match self.valuation() {
            Valuation::Censored(_) => Err(Error::ZeroElement),
            Valuation::Finite(n) => Ok(UnitDecomposition {
                exponent: n,
                unit: DvrElement {
                    ring: self.ring.clone(),
                    value: self.ring.shift_down_raw(&self.value, n),
                },
            }),
        }
    }

    /// Multiplicative inverse of a unit. For `Z/p^m` this runs the extended
    /// Euclidean algorithm against `p^m`; see [`DvrElement::invert_via_newton`]
    /// for the iterative alternative the tests cross-check against.
    pub fn invert(&self) -> Result<DvrElement> {
        Ok(DvrElement {
            ring: self.ring.clone(),
            value: self.ring.invert_raw(&self.value)?,
        })
    }

    /// Unit inversion by Newton lifting of the residue-field inverse.
    /// Produces bit-identical results to [`DvrElement::invert`]; kept public
    /// so the agreement can be checked from the outside.
    pub fn invert_via_newton(&self) -> Result<DvrElement> {
        Ok(DvrElement {
            ring: self.ring.clone(),
            value: self.ring.invert_raw_newton(&self.value)?,
        })
    }

    /// The image of this element in the precision-`k` slice of the ring.
    pub fn reduce_mod(&self, k: u32) -> Result<DvrElement> {
        let slice = self.ring.slice(k)?;
        let value = &self.value % slice.modulus();
        Ok(DvrElement { ring: slice, value })
    }

    /// `pi^k * self`.
    pub fn shift_up(&self, k: u32) -> DvrElement {
        DvrElement {
            ring: self.ring.clone(),
            value: self.ring.shift_up_raw(&self.value, k),
        }
    }
}

impl fmt::Debug for DvrElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (in {})", self.value, self.ring)
    }
}

impl fmt::Display for DvrElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

macro_rules! same_ring {
    ($a:expr, $b:expr) => {
        assert_eq!(
            $a.ring, $b.ring,
            "arithmetic between elements of different rings"
        );
    };
}

impl std::ops::Add for &DvrElement {
    type Output = DvrElement;
    fn add(self, rhs: &DvrElement) -> DvrElement {
        same_ring!(self, rhs);
        DvrElement {
            ring: self.ring.clone(),
            value: self.ring.add_raw(&self.value, &rhs.value),
        }
    }
}

impl std::ops::Sub for &DvrElement {
    type Output = DvrElement;
    fn sub(self, rhs: &DvrElement) -> DvrElement {
        same_ring!(self, rhs);
        DvrElement {
            ring: self.ring.clone(),
            value: self.ring.sub_raw(&self.value, &rhs.value),
        }
    }
}

impl std::ops::Mul for &DvrElement {
    type Output = DvrElement;
    fn mul(self, rhs: &DvrElement) -> DvrElement {
        same_ring!(self, rhs);
        DvrElement {
            ring: self.ring.clone(),
            value: self.ring.mul_raw(&self.value, &rhs.value),
        }
    }
}

impl std::ops::Neg for &DvrElement {
    type Output = DvrElement;
    fn neg(self) -> DvrElement {
        DvrElement {
            ring: self.ring.clone(),
            value: self.ring.neg_raw(&self.value),
        }
    }
}

impl std::ops::Add for DvrElement {
    type Output = DvrElement;
    fn add(self, rhs: DvrElement) -> DvrElement {
        &self + &rhs
    }
}

impl std::ops::Sub for DvrElement {
    type Output = DvrElement;
    fn sub(self, rhs: DvrElement) -> DvrElement {
        &self - &rhs
    }
}

impl std::ops::Mul for DvrElement {
    type Output = DvrElement;
    fn mul(self, rhs: DvrElement) -> DvrElement {
        &self * &rhs
    }
}

impl std::ops::Neg for DvrElement {
    type Output = DvrElement;
    fn neg(self) -> DvrElement {
        -&self
    }
}
