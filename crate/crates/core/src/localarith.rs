//! Local arithmetic over Q: quadratic residues, valuations, square classes
//! in the completions Q_v, and Hilbert symbols at every place.
//!
//! Rationals appear only as integer pairs. Every symbol reduces to a
//! valuation and a residue test, so no p-adic expansion type is needed here.
//! Magnitudes are limited to 127 bits and `i128::MIN` is rejected.

use std::fmt;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest trial divisor used by [`prime_factors`].
pub const DEFAULT_TRIAL_DIVISION_CAP: u64 = 1_000_000;

/// A place of Q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Infinity,
    Finite(u64),
}

impl Place {
    pub fn finite(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(Place::Finite(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn prime(self) -> Option<u64> {
        match self {
            Place::Infinity => None,
            Place::Finite(p) => Some(p),
        }
    }

    fn check(self) -> Result<()> {
        match self {
            Place::Finite(p) if !is_prime(p) => Err(Error::NotPrime(p)),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinity => write!(f, "inf"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

/// An element of {0, 1/2} ⊂ Q/Z, the only values a quaternion algebra can
/// take under a local invariant map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LocalInvariant {
    half: bool,
}

impl LocalInvariant {
    pub const ZERO: Self = LocalInvariant { half: false };
    pub const HALF: Self = LocalInvariant { half: true };

    pub fn is_zero(self) -> bool {
        !self.half
    }

    pub fn is_half(self) -> bool {
        self.half
    }

    /// `+1 ↦ 0`, `-1 ↦ 1/2`.
    pub fn from_symbol(symbol: i8) -> Self {
        LocalInvariant { half: symbol < 0 }
    }
}

impl Add for LocalInvariant {
    type Output = Self;
    // addition in Z/2
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: Self) -> Self {
        LocalInvariant { half: self.half ^ rhs.half }
    }
}

impl AddAssign for LocalInvariant {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl std::iter::Sum for LocalInvariant {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, Add::add)
    }
}

impl fmt::Display for LocalInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.half { "1/2" } else { "0" })
    }
}

impl Serialize for LocalInvariant {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(if self.half { "1/2" } else { "0" })
    }
}

impl<'de> Deserialize<'de> for LocalInvariant {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        match s.as_str() {
            "0" => Ok(Self::ZERO),
            "1/2" => Ok(Self::HALF),
            other => Err(serde::de::Error::custom(format!(
                "invalid local invariant {other:?}"
            ))),
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
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

fn check_width(n: i128) -> Result<()> {
    if n == i128::MIN {
        Err(Error::Overflow)
    } else {
        Ok(())
    }
}

pub(crate) fn pow_mod(base: u128, mut exp: u128, m: u128) -> u128 {
    let mut acc = 1 % m;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc
}

/// Legendre symbol `(a/p)` for an odd prime `p`.
pub fn legendre(a: i128, p: u64) -> Result<i8> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    check_width(a)?;
    let r = a.rem_euclid(p as i128) as u128;
    if r == 0 {
        return Ok(0);
    }
    let e = pow_mod(r, (p as u128 - 1) / 2, p as u128);
    Ok(if e == 1 { 1 } else { -1 })
}

/// Largest `e` with `p^e | n`.
pub fn padic_valuation(n: i128, p: u64) -> Result<u32> {
    split_prime_power(n, p).map(|(e, _)| e)
}

/// Writes `n = p^e · u` with `p ∤ u`.
pub fn split_prime_power(n: i128, p: u64) -> Result<(u32, i128)> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    check_width(n)?;
    if n == 0 {
        return Err(Error::InfiniteValuation);
    }
    let p = p as i128;
    let (mut e, mut u) = (0u32, n);
    while u % p == 0 {
        u /= p;
        e += 1;
    }
    Ok((e, u))
}

/// Whether `num/den` is a square in Q_v.
pub fn is_square_local(num: i128, den: i128, v: Place) -> Result<bool> {
    v.check()?;
    check_width(num)?;
    check_width(den)?;
    if num == 0 || den == 0 {
        return Err(Error::ZeroArgument);
    }
    match v {
        Place::Infinity => Ok((num > 0) == (den > 0)),
        Place::Finite(p) => {
            let (e1, u1) = split_prime_power(num, p)?;
            let (e2, u2) = split_prime_power(den, p)?;
            if (e1 + e2) % 2 == 1 {
                return Ok(false);
            }
            // the unit part of num/den has the square class of u1·u2
            if p == 2 {
                Ok((u1.rem_euclid(8) * u2.rem_euclid(8)) % 8 == 1)
            } else {
                let p128 = p as i128;
                Ok(legendre(u1.rem_euclid(p128) * u2.rem_euclid(p128), p)? == 1)
            }
        }
    }
}

fn unit_epsilon(u: i128) -> u32 {
    // (u - 1)/2 mod 2
    if u.rem_euclid(4) == 1 {
        0
    } else {
        1
    }
}

fn unit_omega(u: i128) -> u32 {
    // (u^2 - 1)/8 mod 2
    match u.rem_euclid(8) {
        1 | 7 => 0,
        _ => 1,
    }
}

/// Hilbert symbol `(a, b)_v`: `+1` iff `z² = a x² + b y²` has a nontrivial
/// solution over Q_v.
pub fn hilbert_symbol(a: i128, b: i128, v: Place) -> Result<i8> {
    v.check()?;
    check_width(a)?;
    check_width(b)?;
    if a == 0 || b == 0 {
        return Err(Error::ZeroArgument);
    }
    match v {
        Place::Infinity => Ok(if a < 0 && b < 0 { -1 } else { 1 }),
        Place::Finite(2) => {
            let (alpha, u) = split_prime_power(a, 2)?;
            let (beta, w) = split_prime_power(b, 2)?;
            let exponent = unit_epsilon(u) * unit_epsilon(w)
                + alpha * unit_omega(w)
                + beta * unit_omega(u);
            Ok(if exponent.is_multiple_of(2) { 1 } else { -1 })
        }
        Place::Finite(p) => {
            let (alpha, u) = split_prime_power(a, p)?;
            let (beta, w) = split_prime_power(b, p)?;
            let mut sign = 1i8;
            if (alpha * beta) % 2 == 1 && p % 4 == 3 {
                sign = -sign;
            }
            if beta % 2 == 1 {
                sign *= legendre(u, p)?;
            }
            if alpha % 2 == 1 {
                sign *= legendre(w, p)?;
            }
            Ok(sign)
        }
    }
}

/// Local invariant of the quaternion algebra `(a, b)` at `v`.
pub fn invariant(a: i128, b: i128, v: Place) -> Result<LocalInvariant> {
    hilbert_symbol(a, b, v).map(LocalInvariant::from_symbol)
}

/// Distinct primes dividing `n`, ascending, using trial division up to `cap`.
pub fn prime_factors_with_cap(n: i128, cap: u64) -> Result<Vec<u64>> {
    Ok(factor_with_cap(n, cap)?.into_iter().map(|(p, _)| p).collect())
}

pub fn prime_factors(n: i128) -> Result<Vec<u64>> {
    prime_factors_with_cap(n, DEFAULT_TRIAL_DIVISION_CAP)
}

fn factor_with_cap(n: i128, cap: u64) -> Result<Vec<(u64, u32)>> {
    check_width(n)?;
    if n == 0 {
        return Err(Error::ZeroArgument);
    }
    let mut m = n.unsigned_abs();
    let mut out = Vec::new();
    let mut d: u128 = 2;
    while d * d <= m {
        if d > cap as u128 {
            return Err(Error::FactorizationCap { n, cap });
        }
        if m.is_multiple_of(d) {
            let mut e = 0;
            while m.is_multiple_of(d) {
                m /= d;
                e += 1;
            }
            out.push((d as u64, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > 1 {
        let m = u64::try_from(m).map_err(|_| Error::FactorizationCap { n, cap })?;
        out.push((m, 1));
    }
    Ok(out)
}

/// Squarefree integer in the same class of Q^×/(Q^×)² as `n`.
pub fn squarefree_part(n: i128) -> Result<i128> {
    let mut out: i128 = n.signum();
    for (p, e) in factor_with_cap(n, DEFAULT_TRIAL_DIVISION_CAP)? {
        if e % 2 == 1 {
            out *= p as i128;
        }
    }
    Ok(out)
}
