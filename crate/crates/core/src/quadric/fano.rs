//! The affine piece of the Fano scheme of lines on a diagonal quadric.
//!
//! For `f = d0 X0² + d1 X1² + d2 X2² + d3 X3²`, the line through
//! `(1:0:a:b)` and `(0:1:c:d)` lies on the quadric iff
//!
//! ```text
//! d0 + d2 a² + d3 b² = 0,   d2 a c + d3 b d = 0,   d1 + d2 c² + d3 d² = 0.
//! ```
//!
//! With `δ² = d0 d1 d2 d3` (the determinant itself, not its squarefree
//! class), every solution lies on exactly one of the planes
//!
//! ```text
//! d1 d2 a = −δ d,   d1 d3 b = δ c            (branch +δ)
//! d1 d2 a =  δ d,   d1 d3 b = −δ c           (branch −δ)
//! ```
//!
//! Both planes are defined over F_p exactly when `det` is a square mod `p`.

use crate::error::{Error, Result};

use super::field::{Gf, GaloisField};
use super::QuadricForm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlaneBranch {
    Plus,
    Minus,
}

fn reduced_entries(form: &QuadricForm, field: &GaloisField) -> Result<[Gf; 4]> {
    let d = form.diagonal_entries().ok_or(Error::NotDiagonal)?;
    let p = field.characteristic();
    if form.determinant().rem_euclid(p as i128) == 0 {
        return Err(Error::SingularReduction { p });
    }
    Ok(d.map(|x| field.from_int(x)))
}

/// All field points `(a, b, c, d)` of the affine Fano piece.
pub fn fano_affine_piece(form: &QuadricForm, field: &GaloisField) -> Result<Vec<[Gf; 4]>> {
    let [d0, d1, d2, d3] = reduced_entries(form, field)?;
    let zero = field.zero();
    let els = field.elements();
    let conic = |constant: Gf| -> Vec<(Gf, Gf)> {
        let mut out = Vec::new();
        for &x in &els {
            let partial = field.add(constant, field.mul(d2, field.square(x)));
            for &y in &els {
                if field.add(partial, field.mul(d3, field.square(y))) == zero {
                    out.push((x, y));
                }
            }
        }
        out
    };
    let first = conic(d0);
    let second = conic(d1);
    let mut out = Vec::new();
    for &(a, b) in &first {
        for &(c, d) in &second {
            let mixed = field.add(field.mul(d2, field.mul(a, c)), field.mul(d3, field.mul(b, d)));
            if mixed == zero {
                out.push([a, b, c, d]);
            }
        }
    }
    Ok(out)
}

/// Which conjugate plane contains `point`, relative to the square root of
/// `det` returned by [`GaloisField::sqrt`]. `None` if the determinant has no
/// root in the field or the point lies on neither plane.
pub fn plane_branch(
    form: &QuadricForm,
    field: &GaloisField,
    point: &[Gf; 4],
) -> Result<Option<PlaneBranch>> {
    let [_, d1, d2, d3] = reduced_entries(form, field)?;
    let Some(delta) = field.sqrt(field.from_int(form.determinant())) else {
        return Ok(None);
    };
    let [a, b, c, d] = *point;
    let lhs1 = field.mul(field.mul(d1, d2), a);
    let lhs2 = field.mul(field.mul(d1, d3), b);
    let on = |root: Gf| {
        lhs1 == field.neg(field.mul(root, d)) && lhs2 == field.mul(root, c)
    };
    Ok(if on(delta) {
        Some(PlaneBranch::Plus)
    } else if on(field.neg(delta)) {
        Some(PlaneBranch::Minus)
    } else {
        None
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exhaustive scan of all q⁴ tuples, independent of the conic split.
    fn brute_force_piece(form: &QuadricForm, field: &GaloisField) -> Vec<[Gf; 4]> {
        let d = form.diagonal_entries().unwrap().map(|x| field.from_int(x));
        let els = field.elements();
        let zero = field.zero();
        let mut out = Vec::new();
        for &a in &els {
            for &b in &els {
                for &c in &els {
                    for &e in &els {
                        let f1 = field.add(d[0], field.add(field.mul(d[2], field.square(a)), field.mul(d[3], field.square(b))));
                        let f2 = field.add(field.mul(d[2], field.mul(a, c)), field.mul(d[3], field.mul(b, e)));
                        let f3 = field.add(d[1], field.add(field.mul(d[2], field.square(c)), field.mul(d[3], field.square(e))));
                        if f1 == zero && f2 == zero && f3 == zero {
                            out.push([a, b, c, e]);
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn empty_over_f3_when_delta_nonsquare() {
        let f = QuadricForm::default_instance();
        let f3 = GaloisField::prime(3).unwrap();
        assert!(fano_affine_piece(&f, &f3).unwrap().is_empty());
        assert!(brute_force_piece(&f, &f3).is_empty());
    }

    #[test]
    fn f9_points_lie_on_conjugate_planes() {
        let f = QuadricForm::default_instance();
        let f9 = GaloisField::quadratic_extension(3).unwrap();
        let mut pts = fano_affine_piece(&f, &f9).unwrap();
        let mut oracle = brute_force_piece(&f, &f9);
        pts.sort();
        oracle.sort();
        assert_eq!(pts, oracle);
        assert!(!pts.is_empty());
        let mut plus = 0;
        let mut minus = 0;
        for pt in &pts {
            match plane_branch(&f, &f9, pt).unwrap() {
                Some(PlaneBranch::Plus) => plus += 1,
                Some(PlaneBranch::Minus) => minus += 1,
                None => panic!("{pt:?} on neither plane"),
            }
        }
        // the two components are conjugate, so equally populated
        assert_eq!(plus, minus);
    }

    #[test]
    fn nonempty_over_f13() {
        let f = QuadricForm::default_instance();
        let f13 = GaloisField::prime(13).unwrap();
        let pts = fano_affine_piece(&f, &f13).unwrap();
        assert!(!pts.is_empty());
        for pt in &pts {
            assert!(plane_branch(&f, &f13, pt).unwrap().is_some());
        }
    }

    #[test]
    fn rejects_non_diagonal_and_bad_characteristic() {
        let lq = QuadricForm::hyperbolic_pq(17, 41).unwrap();
        let f5 = GaloisField::prime(5).unwrap();
        assert_eq!(fano_affine_piece(&lq, &f5), Err(Error::NotDiagonal));
        let f = QuadricForm::default_instance();
        let f17 = GaloisField::prime(17).unwrap();
        assert_eq!(fano_affine_piece(&f, &f17), Err(Error::SingularReduction { p: 17 }));
    }
}
