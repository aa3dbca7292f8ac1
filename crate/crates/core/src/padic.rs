//! Fixed-precision arithmetic in `Q_p`.
//!
//! A nonzero value is stored as `p^val * unit` where `unit` is a p-adic unit
//! known modulo `p^prec`. Zero is either exact or `O(p^k)`, the residue of a
//! cancellation that is only known to vanish modulo `p^k`. Every operation
//! tracks how many digits of the unit are still trusted and refuses to return
//! a value with fewer than [`GUARD_DIGITS`] of them.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub const DEFAULT_PRECISION: u32 = 24;
pub const GUARD_DIGITS: u32 = 4;
pub const MIN_PRECISION: u32 = 8;

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub(crate) fn pow_p(p: u64, k: u32) -> BigUint {
    BigUint::from(p).pow(k)
}

fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut acc: u128 = 1 % m128;
    let mut b = (base % m) as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    base = acc as u64;
    base
}

/// Legendre symbol of `a` modulo the odd prime `p` (0 when `p | a`).
pub(crate) fn legendre(a: u64, p: u64) -> i8 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    if mod_pow(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Tonelli-Shanks square root of a quadratic residue modulo an odd prime.
fn sqrt_mod_prime(a: u64, p: u64) -> u64 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    if p % 4 == 3 {
        return mod_pow(a, (p + 1) / 4, p);
    }
    let mut q = p - 1;
    let mut s = 0u32;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let mut z = 2u64;
    while legendre(z, p) != -1 {
        z += 1;
    }
    let mulm = |x: u64, y: u64| ((x as u128 * y as u128) % p as u128) as u64;
    let mut m = s;
    let mut c = mod_pow(z, q, p);
    let mut t = mod_pow(a, q, p);
    let mut r = mod_pow(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0u32;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mulm(t2, t2);
            i += 1;
        }
        let b = mod_pow(c, 1u64 << (m - i - 1), p);
        m = i;
        c = mulm(b, b);
        t = mulm(t, c);
        r = mulm(r, b);
    }
    r
}

fn mod_inverse(u: &BigUint, m: &BigUint) -> BigUint {
    let a = BigInt::from_biguint(Sign::Plus, u.clone());
    let mm = BigInt::from_biguint(Sign::Plus, m.clone());
    let e = a.extended_gcd(&mm);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(&mm).to_biguint().expect("nonnegative after mod_floor")
}

/// Splits `n` into `(v, n / p^v)` with the quotient prime to `p`.
fn split_valuation(mut n: BigUint, p: u64) -> (u32, BigUint) {
    let mut v = 0;
    while !n.is_zero() && (&n % p).is_zero() {
        n /= p;
        v += 1;
    }
    (v, n)
}

/// Handle on `Q_p` at a fixed working precision `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Qp {
    prime: u64,
    precision: u32,
}

impl Qp {
    pub fn new(prime: u64, precision: u32) -> Result<Self> {
        if !is_prime(prime) {
            return Err(Error::NotPrime(prime));
        }
        if precision < MIN_PRECISION {
            return Err(Error::PrecisionTooSmall(precision, MIN_PRECISION));
        }
        Ok(Qp { prime, precision })
    }

    pub fn with_default_precision(prime: u64) -> Result<Self> {
        Self::new(prime, DEFAULT_PRECISION)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn zero(&self) -> Padic {
        Padic {
            prime: self.prime,
            cap: self.precision,
            val: EXACT,
            unit: BigUint::zero(),
            prec: self.precision,
        }
    }

    /// `O(p^k)`: a value only known to be divisible by `p^k`.
    pub fn big_o(&self, k: i64) -> Padic {
        Padic {
            prime: self.prime,
            cap: self.precision,
            val: k,
            unit: BigUint::zero(),
            prec: 0,
        }
    }

    pub fn one(&self) -> Padic {
        self.int(1)
    }

    pub fn int(&self, n: i64) -> Padic {
        self.bigint(&BigInt::from(n))
    }

    pub fn bigint(&self, n: &BigInt) -> Padic {
        if n.is_zero() {
            return self.zero();
        }
        let (v, u) = split_valuation(n.magnitude().clone(), self.prime);
        self.assemble(v as i64, n.sign() == Sign::Minus, u)
    }

    /// `n / d` embedded exactly (to working precision).
    pub fn ratio(&self, n: i64, d: i64) -> Result<Padic> {
        self.rational(&BigRational::new_raw(BigInt::from(n), BigInt::from(d)))
    }

    pub fn rational(&self, r: &BigRational) -> Result<Padic> {
        if r.denom().is_zero() {
            return Err(Error::DivisionByZero);
        }
        if r.numer().is_zero() {
            return Ok(self.zero());
        }
        let (vn, un) = split_valuation(r.numer().magnitude().clone(), self.prime);
        let (vd, ud) = split_valuation(r.denom().magnitude().clone(), self.prime);
        let m = pow_p(self.prime, self.precision);
        let unit = (un % &m) * mod_inverse(&(ud % &m), &m) % &m;
        let negative = (r.numer().sign() == Sign::Minus) != (r.denom().sign() == Sign::Minus);
        Ok(self.assemble(vn as i64 - vd as i64, negative, unit))
    }

    /// Parses `"n"` or `"n/d"` with integer `n`, `d`.
    pub fn parse(&self, s: &str) -> Result<Padic> {
        let r: BigRational = s
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("not a rational number: {s:?}")))?;
        self.rational(&r)
    }

    /// Comma-separated list of rationals.
    pub fn parse_list(&self, s: &str) -> Result<Vec<Padic>> {
        if s.trim().is_empty() {
            return Ok(Vec::new());
        }
        s.split(',').map(|x| self.parse(x)).collect()
    }

    /// `p^k`.
    pub fn p_power(&self, k: i64) -> Padic {
        Padic {
            prime: self.prime,
            cap: self.precision,
            val: k,
            unit: BigUint::one(),
            prec: self.precision,
        }
    }

    fn assemble(&self, val: i64, negative: bool, unit: BigUint) -> Padic {
        let m = pow_p(self.prime, self.precision);
        let mut unit = unit % &m;
        if negative {
            unit = &m - unit;
        }
        Padic {
            prime: self.prime,
            cap: self.precision,
            val,
            unit,
            prec: self.precision,
        }
    }

    /// Smallest positive quadratic non-residue (odd primes); 5 for `p = 2`.
    pub fn nonresidue(&self) -> u64 {
        if self.prime == 2 {
            return 5;
        }
        (2..self.prime)
            .find(|&a| legendre(a, self.prime) == -1)
            .expect("odd primes have non-residues")
    }

    /// Canonical representatives of `Q_p^x / (Q_p^x)^2`.
    pub fn square_classes(&self) -> Vec<SquareClass> {
        let units: Vec<u8> = if self.prime == 2 {
            vec![1, 7, 5, 3]
        } else {
            vec![0, 1]
        };
        let mut out = Vec::new();
        for odd_valuation in [false, true] {
            for &unit_class in &units {
                out.push(SquareClass {
                    prime: self.prime,
                    odd_valuation,
                    unit_class,
                });
            }
        }
        out
    }
}

/// `val` of an exact zero; an inexact zero keeps its absolute precision in `val`.
const EXACT: i64 = i64::MAX;

/// An element of `Q_p`: zero, or `p^val * unit` with `unit` trusted modulo `p^prec`.
#[derive(Clone, Debug)]
pub struct Padic {
    prime: u64,
    cap: u32,
    val: i64,
    unit: BigUint,
    prec: u32,
}

impl Padic {
    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn field(&self) -> Qp {
        Qp {
            prime: self.prime,
            precision: self.cap,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.unit.is_zero()
    }

    /// `None` encodes the infinite valuation of zero.
    pub fn valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.val)
    }

    pub fn unit(&self) -> &BigUint {
        &self.unit
    }

    /// Number of trusted unit digits.
    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// `val + prec`; `None` for exact zero.
    pub fn absolute_precision(&self) -> Option<i64> {
        if self.is_zero() {
            return (self.val != EXACT).then_some(self.val);
        }
        Some(self.val + self.prec as i64)
    }

    pub fn is_exact_zero(&self) -> bool {
        self.is_zero() && self.val == EXACT
    }

    /// Drops digits beyond absolute precision `abs`.
    fn truncate_to(&self, abs: i64) -> Result<Padic> {
        if self.is_zero() {
            return Ok(self.field().big_o(abs.min(self.val)));
        }
        if abs <= self.val {
            return Ok(self.field().big_o(abs));
        }
        let prec = ((abs - self.val) as u32).min(self.prec);
        Ok(Padic {
            unit: &self.unit % pow_p(self.prime, prec),
            prec,
            ..self.clone()
        })
    }

    fn same_prime(&self, other: &Padic) -> Result<()> {
        if self.prime != other.prime {
            return Err(Error::PrimeMismatch(self.prime, other.prime));
        }
        Ok(())
    }

    fn zero_like(&self) -> Padic {
        self.field().zero()
    }

    fn unit_mod(&self, k: u32) -> u64 {
        (&self.unit % pow_p(self.prime, k))
            .to_u64()
            .expect("residue below p^k fits")
    }

    pub fn neg(&self) -> Padic {
        if self.is_zero() {
            return self.clone();
        }
        let m = pow_p(self.prime, self.prec);
        Padic {
            unit: m - &self.unit,
            ..self.clone()
        }
    }

    pub fn add(&self, other: &Padic) -> Result<Padic> {
        self.add_unguarded(other)?.guarded("addition")
    }

    /// Sum of several terms; only the total must keep [`GUARD_DIGITS`] digits,
    /// partial sums may cancel further.
    pub fn sum<'a, I: IntoIterator<Item = &'a Padic>>(qp: &Qp, terms: I) -> Result<Padic> {
        let mut acc = qp.zero();
        for t in terms {
            acc = acc.add_unguarded(t)?;
        }
        acc.guarded("addition")
    }

    fn guarded(self, context: &'static str) -> Result<Padic> {
        if !self.is_zero() && self.prec < GUARD_DIGITS {
            return Err(Error::PrecisionExhausted {
                remaining: self.prec as i64,
                context,
            });
        }
        Ok(self)
    }

    fn add_unguarded(&self, other: &Padic) -> Result<Padic> {
        self.same_prime(other)?;
        if self.is_exact_zero() {
            return Ok(other.clone());
        }
        if other.is_exact_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return other.truncate_to(self.val);
        }
        if other.is_zero() {
            return self.truncate_to(other.val);
        }
        let p = self.prime;
        let vmin = self.val.min(other.val);
        let abs = (self.val + self.prec as i64).min(other.val + other.prec as i64);
        let width = (abs - vmin) as u32;
        let m = pow_p(p, width);
        let shift = |x: &Padic| -> BigUint { (&x.unit * pow_p(p, (x.val - vmin) as u32)) % &m };
        let sum = (shift(self) + shift(other)) % &m;
        if sum.is_zero() {
            return Ok(self.field().big_o(abs));
        }
        let (k, unit) = split_valuation(sum, p);
        let prec = width - k;
        Ok(Padic {
            prime: p,
            cap: self.cap.max(other.cap),
            val: vmin + k as i64,
            unit,
            prec,
        })
    }

    pub fn sub(&self, other: &Padic) -> Result<Padic> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Padic) -> Result<Padic> {
        self.same_prime(other)?;
        if self.is_exact_zero() || other.is_exact_zero() {
            return Ok(self.zero_like());
        }
        if self.is_zero() || other.is_zero() {
            // O(p^a) * x = O(p^(a + v(x))); `val` is the exponent in both cases.
            return Ok(self.field().big_o(self.val + other.val));
        }
        let prec = self.prec.min(other.prec);
        let m = pow_p(self.prime, prec);
        Ok(Padic {
            prime: self.prime,
            cap: self.cap.max(other.cap),
            val: self.val + other.val,
            unit: (&self.unit * &other.unit) % m,
            prec,
        })
    }

    pub fn inv(&self) -> Result<Padic> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let m = pow_p(self.prime, self.prec);
        Ok(Padic {
            val: -self.val,
            unit: mod_inverse(&(&self.unit % &m), &m),
            ..self.clone()
        })
    }

    pub fn div(&self, other: &Padic) -> Result<Padic> {
        self.same_prime(other)?;
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        self.mul(&other.inv()?)
    }

    pub fn mul_int(&self, k: i64) -> Result<Padic> {
        self.mul(&self.field().int(k))
    }

    pub fn div_int(&self, k: i64) -> Result<Padic> {
        self.div(&self.field().int(k))
    }

    pub fn square(&self) -> Result<Padic> {
        self.mul(self)
    }

    pub fn square_class(&self) -> Result<SquareClass> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        let unit_class = if self.prime == 2 {
            self.unit_mod(3) as u8
        } else {
            u8::from(legendre(self.unit_mod(1), self.prime) == -1)
        };
        Ok(SquareClass {
            prime: self.prime,
            odd_valuation: self.val.rem_euclid(2) == 1,
            unit_class,
        })
    }

    pub fn is_square(&self) -> Result<bool> {
        if self.is_zero() {
            return Ok(true);
        }
        Ok(self.square_class()?.is_trivial())
    }

    /// Square root by Hensel lifting, `None` when not a square.
    ///
    /// For `p = 2` the root is determined one digit less precisely than
    /// the input.
    pub fn sqrt(&self) -> Result<Option<Padic>> {
        if self.is_exact_zero() {
            return Ok(Some(self.clone()));
        }
        if self.is_zero() {
            return Ok(Some(self.field().big_o(self.val.div_euclid(2))));
        }
        if !self.is_square()? {
            return Ok(None);
        }
        let p = self.prime;
        let (root, prec) = if p == 2 {
            let prec = self.prec - 1;
            if prec < GUARD_DIGITS {
                return Err(Error::PrecisionExhausted {
                    remaining: prec as i64,
                    context: "square root",
                });
            }
            let mut x = BigUint::one();
            for k in 3..self.prec {
                let m = pow_p(2, k + 1);
                if !((&x * &x) % &m == &self.unit % &m) {
                    x += pow_p(2, k - 1);
                }
            }
            (x % pow_p(2, prec), prec)
        } else {
            let m = pow_p(p, self.prec);
            let mut x = BigUint::from(sqrt_mod_prime(self.unit_mod(1), p));
            let two = BigUint::from(2u32);
            let mut digits = 1u32;
            while digits < self.prec {
                // x <- x - (x^2 - u) / (2x)
                let fx = (&x * &x + &m - (&self.unit % &m)) % &m;
                let step = fx * mod_inverse(&((&two * &x) % &m), &m) % &m;
                x = (x + &m - step) % &m;
                digits *= 2;
            }
            (x, self.prec)
        };
        Ok(Some(Padic {
            prime: p,
            cap: self.cap,
            val: self.val / 2,
            unit: root,
            prec,
        }))
    }

    /// Best small rational agreeing with this value to its precision.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        let m = BigInt::from_biguint(Sign::Plus, pow_p(self.prime, self.prec));
        let bound = (&m / BigInt::from(2)).sqrt();
        let (mut r0, mut r1) = (m.clone(), BigInt::from_biguint(Sign::Plus, self.unit.clone()));
        let (mut s0, mut s1) = (BigInt::zero(), BigInt::one());
        while r1 > bound {
            let q = &r0 / &r1;
            let r2 = &r0 - &q * &r1;
            let s2 = &s0 - &q * &s1;
            r0 = std::mem::replace(&mut r1, r2);
            s0 = std::mem::replace(&mut s1, s2);
        }
        if s1.is_zero() || s1.abs() > bound || (&s1 % BigInt::from(self.prime)).is_zero() {
            return None;
        }
        let scale = BigInt::from(self.prime).pow(self.val.unsigned_abs() as u32);
        let base = BigRational::new(r1, s1);
        Some(if self.val >= 0 {
            base * BigRational::from_integer(scale)
        } else {
            base / BigRational::from_integer(scale)
        })
    }
}

/// Equality modulo the smaller of the two trusted precisions.
impl PartialEq for Padic {
    fn eq(&self, other: &Self) -> bool {
        if self.prime != other.prime {
            return false;
        }
        match (self.is_zero(), other.is_zero()) {
            (true, true) => true,
            // O(p^k) agrees with anything divisible by p^k.
            (true, false) => self.val != EXACT && other.val >= self.val,
            (false, true) => other.val != EXACT && self.val >= other.val,
            (false, false) => {
                if self.val != other.val {
                    return false;
                }
                let m = pow_p(self.prime, self.prec.min(other.prec));
                &self.unit % &m == &other.unit % &m
            }
        }
    }
}

impl fmt::Display for Padic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        match self.to_rational() {
            Some(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Some(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            None => write!(
                f,
                "{}^{}*{} (mod {}^{})",
                self.prime, self.val, self.unit, self.prime, self.prec
            ),
        }
    }
}

/// `{"p": int, "val": int|"inf", "unit": decimal-string, "prec": int}`
impl Serialize for Padic {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Padic", 4)?;
        s.serialize_field("p", &self.prime)?;
        match self.valuation() {
            Some(v) => s.serialize_field("val", &v)?,
            None => s.serialize_field("val", "inf")?,
        }
        s.serialize_field("unit", &self.unit.to_string())?;
        s.serialize_field("prec", &self.prec)?;
        s.end()
    }
}

/// A coset of `(Q_p^x)^2`.
///
/// For odd `p`, `unit_class` is 0 (residue) or 1 (non-residue); for
/// `p = 2` it is the unit modulo 8.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SquareClass {
    prime: u64,
    odd_valuation: bool,
    unit_class: u8,
}

impl SquareClass {
    pub fn one(prime: u64) -> Self {
        SquareClass {
            prime,
            odd_valuation: false,
            unit_class: if prime == 2 { 1 } else { 0 },
        }
    }

    pub fn is_trivial(&self) -> bool {
        *self == Self::one(self.prime)
    }

    pub fn odd_valuation(&self) -> bool {
        self.odd_valuation
    }

    pub fn unit_class(&self) -> u8 {
        self.unit_class
    }

    pub fn mul(&self, other: &SquareClass) -> SquareClass {
        let unit_class = if self.prime == 2 {
            (self.unit_class * other.unit_class) % 8
        } else {
            self.unit_class ^ other.unit_class
        };
        SquareClass {
            prime: self.prime,
            odd_valuation: self.odd_valuation ^ other.odd_valuation,
            unit_class,
        }
    }

    /// Canonical integer representative: `{1, u, p, up}` or `{±1, ±5, ±2, ±10}`.
    pub fn representative(&self, qp: &Qp) -> BigInt {
        let unit = if self.prime == 2 {
            match self.unit_class {
                1 => 1,
                7 => -1,
                5 => 5,
                _ => -5,
            }
        } else if self.unit_class == 1 {
            qp.nonresidue() as i64
        } else {
            1
        };
        let mut r = BigInt::from(unit);
        if self.odd_valuation {
            r *= self.prime;
        }
        r
    }

    pub fn to_padic(&self, qp: &Qp) -> Padic {
        qp.bigint(&self.representative(qp))
    }
}

/// Hilbert symbol `(a, b)`: +1 iff `z^2 = a x^2 + b y^2` has a nonzero solution.
pub fn hilbert_symbol(a: &Padic, b: &Padic) -> Result<i8> {
    a.same_prime(b)?;
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroInput);
    }
    let p = a.prime;
    let (alpha, beta) = (a.val.rem_euclid(2), b.val.rem_euclid(2));
    if p == 2 {
        let u = a.unit_mod(3);
        let v = b.unit_mod(3);
        let eps = |x: u64| ((x - 1) / 2) % 2;
        let omega = |x: u64| ((x * x - 1) / 8) % 2;
        let e = eps(u) * eps(v) + alpha as u64 * omega(v) + beta as u64 * omega(u);
        Ok(if e.is_multiple_of(2) { 1 } else { -1 })
    } else {
        let u = legendre(a.unit_mod(1), p);
        let v = legendre(b.unit_mod(1), p);
        let mut s: i8 = if alpha * beta * (((p - 1) / 2) as i64 % 2) % 2 == 1 {
            -1
        } else {
            1
        };
        if beta == 1 {
            s *= u;
        }
        if alpha == 1 {
            s *= v;
        }
        Ok(s)
    }
}

/// Radius `k` such that `v(b - a) >= v(a) + k` keeps `b` in the square class of `a`.
pub fn square_class_ball(a: &Padic) -> Result<u32> {
    if a.is_zero() {
        return Err(Error::ZeroInput);
    }
    Ok(if a.prime == 2 { 3 } else { 1 })
}

/// An element of `Q/Z` with p-power denominator, written additively.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Phase(BigRational);

impl Phase {
    pub fn zero() -> Self {
        Phase(BigRational::zero())
    }

    pub fn from_ratio(num: BigInt, den: BigInt) -> Self {
        Self::reduce(BigRational::new(num, den))
    }

    fn reduce(r: BigRational) -> Self {
        let fl = r.floor();
        Phase(r - fl)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn add(&self, other: &Phase) -> Phase {
        Self::reduce(&self.0 + &other.0)
    }

    pub fn neg(&self) -> Phase {
        Self::reduce(-&self.0)
    }

    pub fn sub(&self, other: &Phase) -> Phase {
        self.add(&other.neg())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl Serialize for Phase {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// The standard character `x -> {x}_p` (p-adic fractional part) into `Q/Z`.
pub fn psi(x: &Padic) -> Result<Phase> {
    if x.is_zero() || x.val >= 0 {
        return Ok(Phase::zero());
    }
    let k = (-x.val) as u32;
    if k > x.prec {
        return Err(Error::PrecisionExhausted {
            remaining: x.prec as i64 - k as i64,
            context: "character evaluation",
        });
    }
    let den = pow_p(x.prime, k);
    let num = &x.unit % &den;
    Ok(Phase::from_ratio(
        BigInt::from_biguint(Sign::Plus, num),
        BigInt::from_biguint(Sign::Plus, den),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: u64) -> Qp {
        Qp::with_default_precision(p).unwrap()
    }

    #[test]
    fn parse_rationals() {
        let f = Qp::with_default_precision(5).unwrap();
        assert_eq!(f.parse("-3/10").unwrap(), f.ratio(-3, 10).unwrap());
        assert_eq!(f.parse_list("1, -1,1/5").unwrap(), vec![f.one(), f.int(-1), f.ratio(1, 5).unwrap()]);
        assert!(matches!(f.parse("x"), Err(Error::Parse(_))));
        assert!(matches!(f.parse("1/0"), Err(Error::Parse(_))));
    }

    #[test]
    fn valuation_is_additive() {
        let f = q(5);
        let x = f.int(5).mul(&f.int(5)).unwrap();
        assert_eq!(x.valuation(), Some(2));
        assert_eq!(x.unit(), &BigUint::one());
    }

    #[test]
    fn additive_inverse_is_zero() {
        let f = q(5);
        let z = f.int(1).add(&f.int(-1)).unwrap();
        assert!(z.is_zero());
        assert_eq!(z.valuation(), None);
    }

    #[test]
    fn thirds_sum_to_one_in_q3() {
        let f = q(3);
        let s = f.ratio(1, 3).unwrap().add(&f.ratio(2, 3).unwrap()).unwrap();
        assert_eq!(s.valuation(), Some(0));
        assert_eq!(s.unit(), &BigUint::one());
        assert_eq!(s, f.one());
    }

    #[test]
    fn division_by_zero_is_rejected() {
        let f = q(7);
        assert_eq!(f.one().div(&f.zero()), Err(Error::DivisionByZero));
        assert_eq!(f.ratio(1, 0), Err(Error::DivisionByZero));
    }

    #[test]
    fn near_cancellation_exhausts_precision() {
        let f = q(5);
        let a = f.one();
        let b = f.one().add(&f.p_power(22)).unwrap();
        assert!(matches!(a.sub(&b), Err(Error::PrecisionExhausted { .. })));
        // Cancellation that keeps enough digits is fine.
        let c = f.one().add(&f.p_power(3)).unwrap();
        assert_eq!(c.sub(&a).unwrap(), f.p_power(3));
    }

    #[test]
    fn square_class_examples() {
        let f = q(5);
        assert!(f.int(4).square_class().unwrap().is_trivial());
        let c5 = f.int(5).square_class().unwrap();
        assert!(c5.odd_valuation());
        assert_eq!(c5.unit_class(), 0);
        // quadratic residues mod 5 are {1, 4}
        let c2 = f.int(2).square_class().unwrap();
        assert!(!c2.odd_valuation());
        assert_eq!(c2.unit_class(), 1);
        assert_eq!(c2.representative(&f), BigInt::from(2));
        assert_eq!(f.zero().square_class(), Err(Error::ZeroInput));
    }

    #[test]
    fn nonresidues_are_smallest() {
        assert_eq!(q(3).nonresidue(), 2);
        assert_eq!(q(5).nonresidue(), 2);
        assert_eq!(q(7).nonresidue(), 3);
        assert_eq!(q(17).nonresidue(), 3);
    }

    #[test]
    fn two_adic_square_classes_have_eight_representatives() {
        let f = q(2);
        let reps: Vec<i64> = f
            .square_classes()
            .iter()
            .map(|c| c.representative(&f).to_i64().unwrap())
            .collect();
        assert_eq!(reps, vec![1, -1, 5, -5, 2, -2, 10, -10]);
        for c in f.square_classes() {
            assert_eq!(c.to_padic(&f).square_class().unwrap(), c);
        }
    }

    #[test]
    fn sqrt_roundtrips() {
        for p in [2u64, 3, 5, 7, 13] {
            let f = q(p);
            for n in [1i64, 4, 9, 17, -7, 6, 25, 49, 2, 3] {
                let x = f.int(n);
                match x.sqrt().unwrap() {
                    Some(r) => assert_eq!(r.square().unwrap(), x, "p={p} n={n}"),
                    None => assert!(!x.is_square().unwrap()),
                }
            }
        }
        // 6 = 1 + 5 is a square in Q_5
        assert!(q(5).int(6).sqrt().unwrap().is_some());
        // -1 is a square in Q_5 but not in Q_3 or Q_2
        assert!(q(5).int(-1).is_square().unwrap());
        assert!(!q(3).int(-1).is_square().unwrap());
        assert!(!q(2).int(-1).is_square().unwrap());
    }

    #[test]
    fn hilbert_symbol_examples() {
        let f = q(2);
        assert_eq!(hilbert_symbol(&f.int(-1), &f.int(-1)).unwrap(), -1);
        for p in [2u64, 3, 5, 7] {
            let f = q(p);
            for b in [1i64, -1, 2, 3, 5, 7, 10, -15] {
                let b = f.int(b);
                assert_eq!(hilbert_symbol(&f.one(), &b).unwrap(), 1);
                assert_eq!(hilbert_symbol(&b, &b.neg()).unwrap(), 1);
            }
        }
        assert_eq!(hilbert_symbol(&f.zero(), &f.one()), Err(Error::ZeroInput));
    }

    #[test]
    fn psi_examples() {
        let f = q(5);
        assert!(psi(&f.int(17)).unwrap().is_zero());
        let fifth = f.ratio(1, 5).unwrap();
        assert_eq!(psi(&fifth).unwrap().to_string(), "1/5");
        let shifted = fifth.add(&f.int(2)).unwrap();
        assert_eq!(psi(&shifted).unwrap().to_string(), "1/5");
        // -1/5 = 4/5 mod 1
        assert_eq!(psi(&fifth.neg()).unwrap().to_string(), "4/5");
    }

    #[test]
    fn square_class_ball_radii() {
        assert_eq!(square_class_ball(&q(5).one()).unwrap(), 1);
        assert_eq!(square_class_ball(&q(2).one()).unwrap(), 3);
        assert!(q(2).int(9).is_square().unwrap());
        let f = q(5);
        for t in -10..10 {
            let b = f.int(5).mul(&f.int(1 + 5 * t)).unwrap();
            assert_eq!(b.square_class().unwrap(), f.int(5).square_class().unwrap());
        }
    }

    #[test]
    fn rational_reconstruction_for_display() {
        let f = q(7);
        assert_eq!(f.ratio(-3, 14).unwrap().to_string(), "-3/14");
        assert_eq!(f.int(49).to_string(), "49");
        assert_eq!(f.zero().to_string(), "0");
    }

    #[test]
    fn serializes_to_scalar_record() {
        let f = q(5);
        let j = serde_json::to_value(f.ratio(2, 25).unwrap()).unwrap();
        assert_eq!(j["p"], 5);
        assert_eq!(j["val"], -2);
        assert_eq!(j["unit"], "2");
        assert_eq!(j["prec"], 24);
        assert_eq!(serde_json::to_value(f.zero()).unwrap()["val"], "inf");
    }
}
