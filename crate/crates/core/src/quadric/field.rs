//! F_p and F_{p²} = F_p[t]/(t² − n), `n` the least positive nonresidue.

use std::fmt;

use crate::error::{Error, Result};
use crate::localarith::{is_prime, legendre};

/// `c0 + c1·t`; `c1 = 0` in the prime field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Gf {
    pub c0: u64,
    pub c1: u64,
}

impl fmt::Display for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c1 == 0 {
            write!(f, "{}", self.c0)
        } else {
            write!(f, "{}+{}t", self.c0, self.c1)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GaloisField {
    p: u64,
    nonresidue: Option<u64>,
}

impl GaloisField {
    pub fn prime(p: u64) -> Result<Self> {
        Self::check(p)?;
        Ok(GaloisField { p, nonresidue: None })
    }

    pub fn quadratic_extension(p: u64) -> Result<Self> {
        Self::check(p)?;
        let n = (2..p)
            .find(|&n| legendre(n as i128, p) == Ok(-1))
            .expect("odd prime has a nonresidue");
        Ok(GaloisField { p, nonresidue: Some(n) })
    }

    fn check(p: u64) -> Result<()> {
        if p == 2 {
            return Err(Error::Characteristic2);
        }
        if !is_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        Ok(())
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    /// The `n` with `t² = n`, for the extension field.
    pub fn nonresidue(&self) -> Option<u64> {
        self.nonresidue
    }

    pub fn order(&self) -> u64 {
        match self.nonresidue {
            None => self.p,
            Some(_) => self.p * self.p,
        }
    }

    pub fn elements(&self) -> Vec<Gf> {
        let top = if self.nonresidue.is_some() { self.p } else { 1 };
        (0..top)
            .flat_map(|c1| (0..self.p).map(move |c0| Gf { c0, c1 }))
            .collect()
    }

    pub fn zero(&self) -> Gf {
        Gf { c0: 0, c1: 0 }
    }

    pub fn from_int(&self, x: i128) -> Gf {
        Gf { c0: x.rem_euclid(self.p as i128) as u64, c1: 0 }
    }

    pub fn add(&self, x: Gf, y: Gf) -> Gf {
        Gf { c0: (x.c0 + y.c0) % self.p, c1: (x.c1 + y.c1) % self.p }
    }

    pub fn neg(&self, x: Gf) -> Gf {
        Gf { c0: (self.p - x.c0) % self.p, c1: (self.p - x.c1) % self.p }
    }

    pub fn mul(&self, x: Gf, y: Gf) -> Gf {
        let p = self.p as u128;
        let (a, b, c, d) = (x.c0 as u128, x.c1 as u128, y.c0 as u128, y.c1 as u128);
        let n = self.nonresidue.unwrap_or(0) as u128;
        Gf {
            c0: ((a * c + (b * d % p) * n) % p) as u64,
            c1: ((a * d + b * c) % p) as u64,
        }
    }

    pub fn square(&self, x: Gf) -> Gf {
        self.mul(x, x)
    }

    /// Some square root, the first in [`elements`](Self::elements) order.
    pub fn sqrt(&self, x: Gf) -> Option<Gf> {
        self.elements().into_iter().find(|&r| self.square(r) == x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f9_construction() {
        let f9 = GaloisField::quadratic_extension(3).unwrap();
        assert_eq!(f9.nonresidue(), Some(2));
        assert_eq!(f9.order(), 9);
        let t = Gf { c0: 0, c1: 1 };
        assert_eq!(f9.square(t), f9.from_int(2));
        // every element of F_3 is a square in F_9
        for x in GaloisField::prime(3).unwrap().elements() {
            assert!(f9.sqrt(x).is_some());
        }
        // the multiplicative group has no zero divisors
        let els = f9.elements();
        for &x in &els[1..] {
            for &y in &els[1..] {
                assert_ne!(f9.mul(x, y), f9.zero());
            }
        }
    }

    #[test]
    fn prime_field_squares() {
        let f13 = GaloisField::prime(13).unwrap();
        assert!(f13.sqrt(f13.from_int(17)).is_some());
        let f3 = GaloisField::prime(3).unwrap();
        assert!(f3.sqrt(f3.from_int(17)).is_none());
        assert_eq!(GaloisField::prime(2), Err(Error::Characteristic2));
    }
}
