//! Exact arithmetic over the prime field `F_p`, the polynomial ring `F_p[κ]`
//! used when the level is kept as a formal parameter, and the binomial
//! calculus behind every divided-power coefficient.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A prime number, checked by trial division at construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Prime(u32);

impl Prime {
    pub fn new(p: u32) -> Result<Self> {
        if p < 2 {
            return Err(Error::NotPrime(p as u64));
        }
        let mut d = 2u32;
        while (d as u64) * (d as u64) <= p as u64 {
            if p % d == 0 {
                return Err(Error::NotPrime(p as u64));
            }
            d += 1;
        }
        Ok(Prime(p))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    fn as_u64(self) -> u64 {
        self.0 as u64
    }
}

impl TryFrom<u32> for Prime {
    type Error = Error;
    fn try_from(p: u32) -> Result<Self> {
        Prime::new(p)
    }
}

impl From<Prime> for u32 {
    fn from(p: Prime) -> u32 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An element of `F_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp {
    residue: u32,
    prime: Prime,
}

impl Fp {
    pub fn new(n: i64, prime: Prime) -> Self {
        let p = prime.get() as i64;
        Fp {
            residue: n.rem_euclid(p) as u32,
            prime,
        }
    }

    pub fn zero(prime: Prime) -> Self {
        Fp { residue: 0, prime }
    }

    pub fn one(prime: Prime) -> Self {
        Fp {
            residue: 1 % prime.get(),
            prime,
        }
    }

    #[inline]
    pub fn residue(self) -> u32 {
        self.residue
    }

    #[inline]
    pub fn prime(self) -> Prime {
        self.prime
    }

    /// The residue as a signed representative in `(-p/2, p/2]`.
    pub fn signed(self) -> i64 {
        let p = self.prime.get() as i64;
        let r = self.residue as i64;
        if 2 * r > p {
            r - p
        } else {
            r
        }
    }

    pub fn is_zero(self) -> bool {
        self.residue == 0
    }

    pub fn pow(self, e: u64) -> Self {
        fp_pow(self, e)
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self) -> Option<Self> {
        if self.residue == 0 {
            None
        } else {
            Some(self.pow(self.prime.as_u64() - 2))
        }
    }

    #[inline]
    fn check(self, other: Self) {
        debug_assert_eq!(self.prime, other.prime, "mixed primes in F_p arithmetic");
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.residue)
    }
}

impl Add for Fp {
    type Output = Fp;
    #[inline]
    fn add(self, rhs: Fp) -> Fp {
        self.check(rhs);
        let p = self.prime.get();
        let s = self.residue + rhs.residue;
        Fp {
            residue: if s >= p { s - p } else { s },
            prime: self.prime,
        }
    }
}

impl Sub for Fp {
    type Output = Fp;
    #[inline]
    fn sub(self, rhs: Fp) -> Fp {
        self.check(rhs);
        let p = self.prime.get();
        let r = if self.residue >= rhs.residue {
            self.residue - rhs.residue
        } else {
            self.residue + p - rhs.residue
        };
        Fp {
            residue: r,
            prime: self.prime,
        }
    }
}

impl Mul for Fp {
    type Output = Fp;
    #[inline]
    fn mul(self, rhs: Fp) -> Fp {
        self.check(rhs);
        let r = (self.residue as u64 * rhs.residue as u64) % self.prime.as_u64();
        Fp {
            residue: r as u32,
            prime: self.prime,
        }
    }
}

impl Neg for Fp {
    type Output = Fp;
    #[inline]
    fn neg(self) -> Fp {
        if self.residue == 0 {
            self
        } else {
            Fp {
                residue: self.prime.get() - self.residue,
                prime: self.prime,
            }
        }
    }
}

impl AddAssign for Fp {
    fn add_assign(&mut self, rhs: Fp) {
        *self = *self + rhs;
    }
}

/// Square-and-multiply exponentiation.
pub fn fp_pow(x: Fp, mut e: u64) -> Fp {
    let mut base = x;
    let mut acc = Fp::one(x.prime);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base;
        }
        base = base * base;
        e >>= 1;
    }
    acc
}

/// `C(n, k) mod p` for digits `0 <= n, k < p`.
fn small_binom(n: u64, k: u64, p: Prime) -> Fp {
    if k > n {
        return Fp::zero(p);
    }
    let mut num = Fp::one(p);
    let mut den = Fp::one(p);
    for i in 0..k {
        num = num * Fp::new((n - i) as i64, p);
        den = den * Fp::new((i + 1) as i64, p);
    }
    // den is a product of integers < p, hence invertible
    num * den.inv().expect("factorial of a digit is a unit")
}

/// Binomial coefficient `C(b, a)` reduced mod `p`, for any integer `b` and
/// `a >= 0`. Negative upper arguments use the polynomial extension
/// `C(b, a) = b(b-1)...(b-a+1)/a!`, rewritten as
/// `C(-m, a) = (-1)^a C(m+a-1, a)`; the nonnegative case is a product of
/// base-`p` digit binomials.
pub fn fp_binom(b: i64, a: u64, p: Prime) -> Fp {
    if a == 0 {
        return Fp::one(p);
    }
    if b < 0 {
        let m = (-(b as i128)) as u128;
        let upper = m + a as u128 - 1;
        let sign = if a % 2 == 0 { Fp::one(p) } else { -Fp::one(p) };
        return sign * lucas(upper, a as u128, p);
    }
    lucas(b as u128, a as u128, p)
}

fn lucas(mut n: u128, mut k: u128, p: Prime) -> Fp {
    let pp = p.get() as u128;
    let mut acc = Fp::one(p);
    while k > 0 {
        let (nd, kd) = (n % pp, k % pp);
        if kd > nd {
            return Fp::zero(p);
        }
        acc = acc * small_binom(nd as u64, kd as u64, p);
        n /= pp;
        k /= pp;
    }
    acc
}

/// Falling factorial `n (n-1) ... (n-k+1)` mod `p`.
pub fn fp_falling(n: i64, k: u64, p: Prime) -> Fp {
    let mut acc = Fp::one(p);
    for i in 0..k as i64 {
        acc = acc * Fp::new(n - i, p);
        if acc.is_zero() {
            break;
        }
    }
    acc
}

/// Coefficient ring for modules and fields: either `F_p` itself or `F_p[κ]`.
pub trait Scalar:
    Clone
    + PartialEq
    + Eq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    fn prime(&self) -> Prime;
    fn from_fp(x: Fp) -> Self;
    fn is_zero(&self) -> bool;

    fn zero(p: Prime) -> Self {
        Self::from_fp(Fp::zero(p))
    }

    fn one(p: Prime) -> Self {
        Self::from_fp(Fp::one(p))
    }

    fn from_i64(n: i64, p: Prime) -> Self {
        Self::from_fp(Fp::new(n, p))
    }

    fn scale_fp(&self, c: Fp) -> Self {
        self.clone() * Self::from_fp(c)
    }

    fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.prime());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }

    /// The value when every coefficient lies in the prime field.
    fn as_fp(&self) -> Option<Fp>;
}

impl Scalar for Fp {
    fn prime(&self) -> Prime {
        self.prime
    }
    fn from_fp(x: Fp) -> Self {
        x
    }
    fn is_zero(&self) -> bool {
        self.residue == 0
    }
    fn scale_fp(&self, c: Fp) -> Self {
        *self * c
    }
    fn as_fp(&self) -> Option<Fp> {
        Some(*self)
    }
}

/// A polynomial in the formal level `κ` with `F_p` coefficients, stored
/// little-endian with no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KappaPoly {
    coeffs: Vec<u32>,
    prime: Prime,
}

impl KappaPoly {
    /// The indeterminate `κ`.
    pub fn kappa(prime: Prime) -> Self {
        KappaPoly {
            coeffs: vec![0, 1 % prime.get()],
            prime,
        }
        .trimmed()
    }

    pub fn constant(c: Fp) -> Self {
        KappaPoly {
            coeffs: vec![c.residue()],
            prime: c.prime(),
        }
        .trimmed()
    }

    pub fn from_coeffs(coeffs: &[i64], prime: Prime) -> Self {
        KappaPoly {
            coeffs: coeffs
                .iter()
                .map(|&c| Fp::new(c, prime).residue())
                .collect(),
            prime,
        }
        .trimmed()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Fp {
        Fp::new(self.coeffs.get(i).copied().unwrap_or(0) as i64, self.prime)
    }

    pub fn evaluate(&self, at: Fp) -> Fp {
        let mut acc = Fp::zero(self.prime);
        for &c in self.coeffs.iter().rev() {
            acc = acc * at + Fp::new(c as i64, self.prime);
        }
        acc
    }

    fn trimmed(mut self) -> Self {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
        self
    }
}

impl fmt::Display for KappaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "k")?,
                (1, _) => write!(f, "{c}k")?,
                (_, 1) => write!(f, "k^{i}")?,
                _ => write!(f, "{c}k^{i}")?,
            }
        }
        Ok(())
    }
}

impl Add for KappaPoly {
    type Output = KappaPoly;
    fn add(self, rhs: KappaPoly) -> KappaPoly {
        debug_assert_eq!(self.prime, rhs.prime);
        let p = self.prime;
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|i| (self.coeff(i) + rhs.coeff(i)).residue())
            .collect();
        KappaPoly { coeffs, prime: p }.trimmed()
    }
}

impl Sub for KappaPoly {
    type Output = KappaPoly;
    fn sub(self, rhs: KappaPoly) -> KappaPoly {
        self + (-rhs)
    }
}

impl Neg for KappaPoly {
    type Output = KappaPoly;
    fn neg(self) -> KappaPoly {
        let p = self.prime;
        KappaPoly {
            coeffs: self
                .coeffs
                .iter()
                .map(|&c| (-Fp::new(c as i64, p)).residue())
                .collect(),
            prime: p,
        }
    }
}

impl Mul for KappaPoly {
    type Output = KappaPoly;
    fn mul(self, rhs: KappaPoly) -> KappaPoly {
        debug_assert_eq!(self.prime, rhs.prime);
        let p = self.prime;
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return KappaPoly {
                coeffs: vec![],
                prime: p,
            };
        }
        let pp = p.get() as u64;
        let mut out = vec![0u64; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + a as u64 * b as u64) % pp;
            }
        }
        KappaPoly {
            coeffs: out.into_iter().map(|c| c as u32).collect(),
            prime: p,
        }
        .trimmed()
    }
}

impl Scalar for KappaPoly {
    fn prime(&self) -> Prime {
        self.prime
    }
    fn from_fp(x: Fp) -> Self {
        KappaPoly::constant(x)
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn scale_fp(&self, c: Fp) -> Self {
        let p = self.prime;
        KappaPoly {
            coeffs: self
                .coeffs
                .iter()
                .map(|&x| (Fp::new(x as i64, p) * c).residue())
                .collect(),
            prime: p,
        }
        .trimmed()
    }
    fn as_fp(&self) -> Option<Fp> {
        match self.degree() {
            None => Some(Fp::zero(self.prime)),
            Some(0) => Some(self.coeff(0)),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u32) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn prime_construction() {
        assert!(Prime::new(2).is_ok());
        assert!(Prime::new(7).is_ok());
        assert!(Prime::new(1).is_err());
        assert!(Prime::new(9).is_err());
        assert!(Prime::new(0).is_err());
    }

    #[test]
    fn binom_examples() {
        // C(35,5) = 324632 = 3 * 108210 + 2
        assert_eq!(fp_binom(35, 5, p(3)).residue(), 2);
        for q in [2, 3, 5, 7] {
            for b in -10..10 {
                assert_eq!(fp_binom(b, 0, p(q)).residue(), 1);
            }
            for k in 0..12u64 {
                let expect = if k % 2 == 0 { 1 } else { q as i64 - 1 };
                assert_eq!(fp_binom(-1, k, p(q)).residue() as i64, expect % q as i64);
            }
        }
        assert_eq!(fp_binom(-3, 1, p(2)).residue(), 1);
        assert_eq!(fp_binom(-2, 0, p(2)).residue(), 1);
        assert_eq!(fp_binom(3, 5, p(7)).residue(), 0);
    }

    #[test]
    fn pow_examples() {
        assert_eq!(fp_pow(Fp::new(4, p(5)), 0).residue(), 1);
        assert_eq!(fp_pow(Fp::new(2, p(5)), 5).residue(), 2);
        assert_eq!(fp_pow(Fp::new(3, p(7)), 3).residue(), 6);
    }

    #[test]
    fn inverse() {
        let q = p(7);
        for r in 1..7 {
            let x = Fp::new(r, q);
            assert_eq!((x * x.inv().unwrap()).residue(), 1);
        }
        assert!(Fp::zero(q).inv().is_none());
    }

    #[test]
    fn kappa_frobenius_is_not_identity() {
        let q = p(3);
        let k = KappaPoly::kappa(q);
        let eta = k.pow(3) - k.clone();
        assert_eq!(eta.degree(), Some(3));
        assert_eq!(eta.coeff(3).residue(), 1);
        assert_eq!(eta.coeff(1).residue(), 2);
        // vanishes at every point of F_3
        for a in 0..3 {
            assert!(eta.evaluate(Fp::new(a, q)).is_zero());
        }
        assert_eq!(format!("{eta}"), "k^3 + 2k");
    }
}
