//! Finite-precision p-adic points of the cone and Hensel lifting.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::localarith::is_prime;

use super::{ProjPointFp, QuadricForm};

pub const DEFAULT_PRECISION: u32 = 8;

/// Moduli stay below 2^62 so products of two residues fit in an `i128`.
const MAX_MODULUS: i128 = 1 << 62;

pub(crate) fn modulus(p: u64, k: u32) -> Result<i128> {
    if k == 0 {
        return Err(Error::PrecisionTooLarge { p, k });
    }
    let mut m: i128 = 1;
    for _ in 0..k {
        m = m
            .checked_mul(p as i128)
            .filter(|&m| m < MAX_MODULUS)
            .ok_or(Error::PrecisionTooLarge { p, k })?;
    }
    Ok(m)
}

/// A primitive tuple mod `p^k` on the cone: an element of 𝒳(Z_p) known to
/// `k` digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PadicPoint {
    coords: [i128; 4],
    p: u64,
    precision: u32,
}

impl PadicPoint {
    pub fn new(coords: [i128; 4], p: u64, precision: u32, form: &QuadricForm) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let m = modulus(p, precision)?;
        let coords = coords.map(|c| c.rem_euclid(m));
        if coords.iter().all(|c| c % p as i128 == 0) {
            return Err(Error::NotPrimitive { p });
        }
        if form.evaluate_mod(&coords, m) != 0 {
            return Err(Error::NotOnQuadric);
        }
        Ok(PadicPoint { coords, p, precision })
    }

    pub fn coords(&self) -> &[i128; 4] {
        &self.coords
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn modulus(&self) -> i128 {
        modulus(self.p, self.precision).expect("validated at construction")
    }

    pub fn reduce(&self) -> [u64; 4] {
        self.coords.map(|c| (c % self.p as i128) as u64)
    }

    /// `λ·Q` for a unit `λ`.
    pub fn scale(&self, lambda: i128) -> Result<Self> {
        let m = self.modulus();
        let lambda = lambda.rem_euclid(m);
        if lambda % self.p as i128 == 0 {
            return Err(Error::NotPrimitive { p: self.p });
        }
        Ok(PadicPoint {
            coords: self.coords.map(|c| c * lambda % m),
            ..*self
        })
    }
}

fn inverse_mod(a: i128, m: i128) -> Option<i128> {
    let (mut old_r, mut r) = (a.rem_euclid(m), m);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    (old_r == 1).then(|| old_s.rem_euclid(m))
}

/// Lifts a smooth tuple mod `p` (not necessarily normalized) to precision
/// `k`, by Newton iteration on the first coordinate whose partial
/// derivative is a unit. The other coordinates keep their residues.
pub fn lift_residues(residues: &[u64; 4], p: u64, form: &QuadricForm, k: u32) -> Result<PadicPoint> {
    if p == 2 {
        return Err(Error::Characteristic2);
    }
    if !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let pm = p as i128;
    let mut x = residues.map(|c| (c % p) as i128);
    if x.iter().all(|&c| c == 0) {
        return Err(Error::ZeroTuple);
    }
    if form.evaluate_mod(&x, pm) != 0 {
        return Err(Error::NotOnQuadric);
    }
    let grad = form.apply_mod(&x, pm);
    // p is odd, so (2Mx)_i is a unit iff (Mx)_i is
    let i = grad.iter().position(|&g| g != 0).ok_or(Error::SingularPoint)?;

    let m = modulus(p, k)?;
    let mut precision = 1u32;
    while precision < k {
        precision = (2 * precision).min(k);
        let mk = modulus(p, precision)?;
        let value = form.evaluate_mod(&x, mk);
        if value == 0 {
            continue;
        }
        let derivative = 2 * form.apply_mod(&x, mk)[i] % mk;
        let inv = inverse_mod(derivative, mk).expect("derivative stays a unit");
        x[i] = (x[i] - value * inv % mk).rem_euclid(mk);
    }
    debug_assert_eq!(form.evaluate_mod(&x, m), 0);
    PadicPoint::new(x, p, k, form)
}

pub fn hensel_lift(point: &ProjPointFp, form: &QuadricForm, k: u32) -> Result<PadicPoint> {
    lift_residues(point.coords(), point.prime(), form, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadric::enumerate_points_fp;

    #[test]
    fn worked_step_mod_289() {
        let f = QuadricForm::default_instance();
        assert_eq!(f.evaluate(&[1, 0, 1, 0]), Ok(-102));
        assert_eq!(52 * 52 - 103, 9 * 289);
        let q = ProjPointFp::normalize([1, 0, 1, 0], 17).unwrap();
        let lift = hensel_lift(&q, &f, 2).unwrap();
        assert_eq!(lift.coords(), &[52, 0, 1, 0]);
        assert_eq!(lift.modulus(), 289);
        assert_eq!(hensel_lift(&q, &f, 1).unwrap().coords(), &[1, 0, 1, 0]);
    }

    #[test]
    fn vertex_does_not_lift() {
        let f = QuadricForm::default_instance();
        let v = ProjPointFp::normalize([0, 0, 0, 1], 17).unwrap();
        assert_eq!(hensel_lift(&v, &f, 2), Err(Error::SingularPoint));
    }

    #[test]
    fn lifts_reduce_and_vanish() {
        let f = QuadricForm::default_instance();
        for p in [3u64, 5, 13, 17, 19] {
            for pt in enumerate_points_fp(&f, p).unwrap() {
                for k in 1..=8 {
                    match hensel_lift(&pt, &f, k) {
                        Ok(lift) => {
                            assert_eq!(lift.reduce(), *pt.coords());
                            assert_eq!(f.evaluate_mod(lift.coords(), lift.modulus()), 0);
                        }
                        Err(Error::SingularPoint) => assert!(!crate::quadric::is_smooth_mod_p(&pt, &f)),
                        Err(e) => panic!("{e}"),
                    }
                }
            }
        }
    }

    #[test]
    fn precision_guard() {
        let f = QuadricForm::default_instance();
        let q = ProjPointFp::normalize([1, 0, 1, 0], 17).unwrap();
        assert_eq!(hensel_lift(&q, &f, 20), Err(Error::PrecisionTooLarge { p: 17, k: 20 }));
    }

    #[test]
    fn padic_point_validation() {
        let f = QuadricForm::default_instance();
        assert_eq!(
            PadicPoint::new([17, 0, 17, 0], 17, 2, &f),
            Err(Error::NotPrimitive { p: 17 })
        );
        assert_eq!(PadicPoint::new([1, 0, 1, 0], 17, 2, &f), Err(Error::NotOnQuadric));
        let q = PadicPoint::new([52, 0, 1, 0], 17, 2, &f).unwrap();
        let s = q.scale(3).unwrap();
        assert_eq!(s.coords(), &[156, 0, 3, 0]);
        assert_eq!(f.evaluate_mod(s.coords(), 289), 0);
    }
}
