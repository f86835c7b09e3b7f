//! Integral quaternary quadratic forms and their points.
//!
//! A [`QuadricForm`] is a symmetric 4×4 integer matrix `M` with `det M ≠ 0`,
//! evaluated as `f(x) = xᵀ M x`. The same form defines a quadric surface in
//! P³ and the punctured affine cone over it in A⁴ \ {0}.

// 4×4 index loops read more clearly than iterator chains here
#![allow(clippy::needless_range_loop)]

mod diagonal;
mod fano;
mod field;
mod hensel;

use std::fmt;

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::localarith::{self, is_prime, legendre, pow_mod};

pub use diagonal::{diagonalize, Diagonalization};
pub use fano::{fano_affine_piece, plane_branch, PlaneBranch};
pub use field::{Gf, GaloisField};
pub use hensel::{hensel_lift, lift_residues, PadicPoint, DEFAULT_PRECISION};

pub type Matrix4 = [[i128; 4]; 4];

/// Coefficients of the default instance `X0² + 47X1² − 103X2² − 82297X3²`.
pub const DEFAULT_DIAGONAL: [i128; 4] = [1, 47, -103, -17 * 47 * 103];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadricForm {
    matrix: Matrix4,
    diagonal: bool,
    det: i128,
}

impl QuadricForm {
    pub fn new(matrix: Matrix4) -> Result<Self> {
        for i in 0..4 {
            for j in 0..4 {
                if matrix[i][j] != matrix[j][i] {
                    return Err(Error::NotSymmetric);
                }
                if matrix[i][j] == i128::MIN {
                    return Err(Error::Overflow);
                }
            }
        }
        let det = determinant(&matrix)?;
        if det == 0 {
            return Err(Error::DegenerateForm);
        }
        let diagonal = (0..4).all(|i| (0..4).all(|j| i == j || matrix[i][j] == 0));
        Ok(QuadricForm { matrix, diagonal, det })
    }

    pub fn diagonal(entries: [i128; 4]) -> Result<Self> {
        let mut m = [[0i128; 4]; 4];
        for i in 0..4 {
            m[i][i] = entries[i];
        }
        Self::new(m)
    }

    /// `X0² + 47X1² = 103X2² + 17·47·103·X3²`.
    pub fn default_instance() -> Self {
        Self::diagonal(DEFAULT_DIAGONAL).expect("default instance is nondegenerate")
    }

    /// Twice the form `X0² − pq X1² − X2 X3`, so that the matrix is integral.
    pub fn hyperbolic_pq(p: i128, q: i128) -> Result<Self> {
        let pq = p.checked_mul(q).and_then(|x| x.checked_mul(2)).ok_or(Error::Overflow)?;
        Self::new([[2, 0, 0, 0], [0, -pq, 0, 0], [0, 0, 0, -1], [0, 0, -1, 0]])
    }

    pub fn matrix(&self) -> &Matrix4 {
        &self.matrix
    }

    pub fn is_diagonal(&self) -> bool {
        self.diagonal
    }

    pub fn diagonal_entries(&self) -> Option<[i128; 4]> {
        self.diagonal.then(|| std::array::from_fn(|i| self.matrix[i][i]))
    }

    pub fn determinant(&self) -> i128 {
        self.det
    }

    /// Largest absolute matrix entry.
    pub fn max_coefficient(&self) -> i128 {
        self.matrix.iter().flatten().map(|x| x.abs()).max().unwrap_or(0)
    }

    /// `f(x)` with overflow checking.
    pub fn evaluate(&self, x: &[i128; 4]) -> Result<i128> {
        let mx = self.apply(x)?;
        let mut acc: i128 = 0;
        for i in 0..4 {
            let term = x[i].checked_mul(mx[i]).ok_or(Error::Overflow)?;
            acc = acc.checked_add(term).ok_or(Error::Overflow)?;
        }
        Ok(acc)
    }

    /// `M·x` with overflow checking.
    pub fn apply(&self, x: &[i128; 4]) -> Result<[i128; 4]> {
        let mut out = [0i128; 4];
        for i in 0..4 {
            for j in 0..4 {
                let t = self.matrix[i][j].checked_mul(x[j]).ok_or(Error::Overflow)?;
                out[i] = out[i].checked_add(t).ok_or(Error::Overflow)?;
            }
        }
        Ok(out)
    }

    /// `M·x mod m`, entries in `[0, m)`. Requires `m < 2^62`.
    pub fn apply_mod(&self, x: &[i128; 4], m: i128) -> [i128; 4] {
        let mut out = [0i128; 4];
        for i in 0..4 {
            let mut acc = 0i128;
            for j in 0..4 {
                acc = (acc + self.matrix[i][j].rem_euclid(m) * x[j].rem_euclid(m)) % m;
            }
            out[i] = acc;
        }
        out
    }

    /// `f(x) mod m` in `[0, m)`. Requires `m < 2^62`.
    pub fn evaluate_mod(&self, x: &[i128; 4], m: i128) -> i128 {
        let mx = self.apply_mod(x, m);
        (0..4).fold(0, |acc, i| (acc + x[i].rem_euclid(m) * mx[i]) % m)
    }

    pub fn discriminant_class(&self) -> Result<Discriminant> {
        discriminant_class(self)
    }
}

fn determinant(m: &Matrix4) -> Result<i128> {
    // Leibniz expansion over the 24 permutations, exact and overflow-checked.
    fn permutations(k: usize, current: &mut Vec<usize>, used: &mut [bool; 4], out: &mut Vec<Vec<usize>>) {
        if k == 4 {
            out.push(current.clone());
            return;
        }
        for i in 0..4 {
            if !used[i] {
                used[i] = true;
                current.push(i);
                permutations(k + 1, current, used, out);
                current.pop();
                used[i] = false;
            }
        }
    }
    let mut perms = Vec::with_capacity(24);
    permutations(0, &mut Vec::new(), &mut [false; 4], &mut perms);
    let mut det: i128 = 0;
    for perm in perms {
        let inversions = (0..4)
            .flat_map(|i| (i + 1..4).map(move |j| (i, j)))
            .filter(|&(i, j)| perm[i] > perm[j])
            .count();
        let mut term: i128 = if inversions % 2 == 0 { 1 } else { -1 };
        for (row, &col) in perm.iter().enumerate() {
            term = term.checked_mul(m[row][col]).ok_or(Error::Overflow)?;
        }
        det = det.checked_add(term).ok_or(Error::Overflow)?;
    }
    Ok(det)
}

/// Squarefree representative of `det M` in Q^×/(Q^×)².
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Discriminant(i128);

impl Discriminant {
    pub fn representative(self) -> i128 {
        self.0
    }

    pub fn is_square(self) -> bool {
        self.0 == 1
    }
}

impl fmt::Display for Discriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn discriminant_class(form: &QuadricForm) -> Result<Discriminant> {
    if form.det == 0 {
        return Err(Error::DegenerateForm);
    }
    localarith::squarefree_part(form.det).map(Discriminant)
}

fn gcd4(x: &[i128; 4]) -> i128 {
    x.iter().fold(0i128, |g, &c| g.gcd(&c))
}

/// A coprime integral point of the punctured cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct ConePoint([i128; 4]);

impl ConePoint {
    pub fn new(coords: [i128; 4], form: &QuadricForm) -> Result<Self> {
        if coords == [0; 4] {
            return Err(Error::ZeroTuple);
        }
        if gcd4(&coords) != 1 {
            return Err(Error::NotCoprime);
        }
        if form.evaluate(&coords)? != 0 {
            return Err(Error::NotOnQuadric);
        }
        Ok(ConePoint(coords))
    }

    /// Divides out the content of a nonzero solution.
    pub fn primitive(coords: [i128; 4], form: &QuadricForm) -> Result<Self> {
        if coords == [0; 4] {
            return Err(Error::ZeroTuple);
        }
        let g = gcd4(&coords);
        Self::new(coords.map(|c| c / g), form)
    }

    pub fn coords(&self) -> &[i128; 4] {
        &self.0
    }

    pub fn height(&self) -> i128 {
        self.0.iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    /// Exact reduction mod `p`, coordinates in `[0, p)`.
    pub fn reduce(&self, p: u64) -> [u64; 4] {
        self.0.map(|c| c.rem_euclid(p as i128) as u64)
    }
}

impl fmt::Display for ConePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "({a},{b},{c},{d})")
    }
}

/// A point of P³(F_p), first nonzero coordinate equal to 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ProjPointFp {
    coords: [u64; 4],
    p: u64,
}

pub(crate) fn inverse_mod_prime(a: u64, p: u64) -> u64 {
    pow_mod(a as u128, p as u128 - 2, p as u128) as u64
}

impl ProjPointFp {
    /// Normalizes any nonzero tuple mod `p` to its canonical representative.
    pub fn normalize(coords: [i128; 4], p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let r = coords.map(|c| c.rem_euclid(p as i128) as u64);
        let lead = r.iter().copied().find(|&c| c != 0).ok_or(Error::ZeroTuple)?;
        let inv = inverse_mod_prime(lead, p);
        let coords = r.map(|c| ((c as u128 * inv as u128) % p as u128) as u64);
        Ok(ProjPointFp { coords, p })
    }

    pub fn coords(&self) -> &[u64; 4] {
        &self.coords
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn as_i128(&self) -> [i128; 4] {
        self.coords.map(|c| c as i128)
    }
}

impl fmt::Display for ProjPointFp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.coords;
        write!(f, "({a}:{b}:{c}:{d}) mod {}", self.p)
    }
}

/// The linear form `Y ↦ (M·P)·Y`, cutting out the tangent hyperplane at `P`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct TangentForm([i128; 4]);

impl TangentForm {
    pub fn coeffs(&self) -> &[i128; 4] {
        &self.0
    }

    pub fn evaluate(&self, y: &[i128; 4]) -> Result<i128> {
        let mut acc: i128 = 0;
        for i in 0..4 {
            let t = self.0[i].checked_mul(y[i]).ok_or(Error::Overflow)?;
            acc = acc.checked_add(t).ok_or(Error::Overflow)?;
        }
        Ok(acc)
    }

    /// Value mod `m` in `[0, m)`. Requires `m < 2^62`.
    pub fn evaluate_mod(&self, y: &[i128; 4], m: i128) -> i128 {
        (0..4).fold(0, |acc, i| (acc + self.0[i].rem_euclid(m) * y[i].rem_euclid(m)) % m)
    }
}

pub fn tangent_form(point: &ConePoint, form: &QuadricForm) -> Result<TangentForm> {
    // revalidate: the point may have been built against another form
    let point = ConePoint::new(point.0, form)?;
    Ok(TangentForm(form.apply(&point.0)?))
}

fn check_odd_prime(p: u64) -> Result<()> {
    if p == 2 {
        return Err(Error::Characteristic2);
    }
    if !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    Ok(())
}

fn check_good_reduction(form: &QuadricForm, p: u64) -> Result<()> {
    check_odd_prime(p)?;
    if form.det.rem_euclid(p as i128) == 0 {
        return Err(Error::SingularReduction { p });
    }
    Ok(())
}

/// `#Y(F_q)`: `q² + 2q + 1` when `Δ` is a square mod `q`, else `q² + 1`.
pub fn count_points_formula(form: &QuadricForm, q: u64) -> Result<u64> {
    check_good_reduction(form, q)?;
    Ok(if legendre(form.det, q)? == 1 {
        q * q + 2 * q + 1
    } else {
        q * q + 1
    })
}

/// Canonical representatives of P³(F_p), in lexicographic order within
/// each leading-coordinate stratum.
fn projective_space(p: u64) -> impl Iterator<Item = [u64; 4]> {
    (0..4usize).flat_map(move |lead| {
        let free = 3 - lead;
        let count = p.pow(free as u32);
        (0..count).map(move |mut idx| {
            let mut c = [0u64; 4];
            c[lead] = 1;
            for slot in (lead + 1..4).rev() {
                c[slot] = idx % p;
                idx /= p;
            }
            c
        })
    })
}

/// Every F_p-point of `{f = 0}` ⊂ P³, each projective class exactly once.
pub fn enumerate_points_fp(form: &QuadricForm, p: u64) -> Result<Vec<ProjPointFp>> {
    check_odd_prime(p)?;
    let m = p as i128;
    Ok(projective_space(p)
        .filter(|c| form.evaluate_mod(&c.map(|x| x as i128), m) == 0)
        .map(|coords| ProjPointFp { coords, p })
        .collect())
}

/// Whether the gradient `2M·x` is nonzero mod `p`.
pub fn is_smooth_mod_p(point: &ProjPointFp, form: &QuadricForm) -> bool {
    residues_smooth(&point.as_i128(), form, point.p)
}

pub(crate) fn residues_smooth(x: &[i128; 4], form: &QuadricForm, p: u64) -> bool {
    let m = p as i128;
    form.apply_mod(x, m).iter().any(|&g| (2 * g) % m != 0)
}

/// F_p-points of the tangent-plane section `{f = 0, ℓ_P = 0}`.
pub fn tangent_section_points(
    point: &ConePoint,
    form: &QuadricForm,
    p: u64,
) -> Result<Vec<ProjPointFp>> {
    check_good_reduction(form, p)?;
    let ell = tangent_form(point, form)?;
    let m = p as i128;
    Ok(enumerate_points_fp(form, p)?
        .into_iter()
        .filter(|pt| ell.evaluate_mod(&pt.as_i128(), m) == 0)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default() -> QuadricForm {
        QuadricForm::default_instance()
    }

    /// Full scan of F_p⁴ \ 0 divided by the scalar action.
    fn brute_force_count(form: &QuadricForm, p: u64) -> u64 {
        let m = p as i128;
        let mut n = 0u64;
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    for d in 0..m {
                        let x = [a, b, c, d];
                        if x != [0; 4] && form.evaluate_mod(&x, m) == 0 {
                            n += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(n % (p - 1), 0);
        n / (p - 1)
    }

    #[test]
    fn construction_rejects_bad_matrices() {
        assert_eq!(QuadricForm::diagonal([1, 1, 0, 1]), Err(Error::DegenerateForm));
        let mut m = [[0i128; 4]; 4];
        m[0][1] = 1;
        assert_eq!(QuadricForm::new(m), Err(Error::NotSymmetric));
        assert_eq!(default().determinant(), 47 * 103 * 82297);
        assert!(default().is_diagonal());
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(default().discriminant_class().unwrap().representative(), 17);
        let id = QuadricForm::diagonal([1, 1, 1, 1]).unwrap();
        assert_eq!(id.discriminant_class().unwrap().representative(), 1);
        let f = QuadricForm::diagonal([1, -1, 2, 3]).unwrap();
        assert_eq!(f.discriminant_class().unwrap().representative(), -6);
    }

    #[test]
    fn formula_examples() {
        let f = default();
        assert_eq!(brute_force_count(&f, 13), 196);
        assert_eq!(count_points_formula(&f, 13), Ok(196));
        assert_eq!(brute_force_count(&f, 3), 10);
        assert_eq!(count_points_formula(&f, 3), Ok(10));
        assert_eq!(count_points_formula(&f, 47), Err(Error::SingularReduction { p: 47 }));
        assert_eq!(count_points_formula(&f, 2), Err(Error::Characteristic2));
    }

    #[test]
    fn enumeration_examples() {
        let f = default();
        assert_eq!(enumerate_points_fp(&f, 3).unwrap().len(), 10);
        let split = QuadricForm::diagonal([1, -1, 1, -1]).unwrap();
        assert_eq!(brute_force_count(&split, 3), 16);
        assert_eq!(enumerate_points_fp(&split, 3).unwrap().len(), 16);
        let pts17 = enumerate_points_fp(&f, 17).unwrap();
        let coords: Vec<_> = pts17.iter().map(|p| *p.coords()).collect();
        assert!(coords.contains(&[1, 0, 1, 0]));
        assert!(coords.contains(&[1, 0, 16, 0]));
        assert_eq!(enumerate_points_fp(&f, 2), Err(Error::Characteristic2));
    }

    #[test]
    fn enumeration_matches_brute_force_and_formula() {
        let f = default();
        for p in (3..30).filter(|&p| is_prime(p)) {
            let n = enumerate_points_fp(&f, p).unwrap().len() as u64;
            assert_eq!(n, brute_force_count(&f, p), "p={p}");
            if let Ok(expected) = count_points_formula(&f, p) {
                assert_eq!(n, expected, "p={p}");
            }
        }
    }

    #[test]
    fn enumeration_is_canonical() {
        let pts = enumerate_points_fp(&default(), 7).unwrap();
        for pt in &pts {
            let again = ProjPointFp::normalize(pt.as_i128().map(|c| 3 * c), 7).unwrap();
            assert_eq!(&again, pt);
        }
        let mut sorted = pts.clone();
        sorted.dedup();
        assert_eq!(sorted.len(), pts.len());
    }

    #[test]
    fn smoothness_examples() {
        let f = default();
        let vertex = ProjPointFp::normalize([0, 0, 0, 1], 17).unwrap();
        assert!(!is_smooth_mod_p(&vertex, &f));
        let q = ProjPointFp::normalize([1, 0, 1, 0], 17).unwrap();
        assert!(is_smooth_mod_p(&q, &f));
        for pt in enumerate_points_fp(&f, 13).unwrap() {
            assert!(is_smooth_mod_p(&pt, &f));
        }
    }

    #[test]
    fn tangent_form_examples() {
        let f = default();
        assert_eq!(35 * 35 + 47 * 9, 1648);
        assert_eq!(103 * 16, 1648);
        let p = ConePoint::new([35, 3, 4, 0], &f).unwrap();
        let ell = tangent_form(&p, &f).unwrap();
        assert_eq!(ell.coeffs(), &[35, 141, -412, 0]);
        assert_eq!(ell.evaluate(p.coords()), Ok(0));
        assert_eq!(ConePoint::new([70, 6, 8, 0], &f), Err(Error::NotCoprime));
        assert_eq!(ConePoint::new([0; 4], &f), Err(Error::ZeroTuple));
        assert_eq!(ConePoint::new([1, 1, 1, 1], &f), Err(Error::NotOnQuadric));
        assert_eq!(ConePoint::primitive([70, 6, 8, 0], &f), Ok(p));
    }

    fn brute_force_section(pt: &ConePoint, f: &QuadricForm, p: u64) -> usize {
        let ell = f.apply(pt.coords()).unwrap();
        let m = p as i128;
        let mut n = 0;
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    for d in 0..m {
                        let x = [a, b, c, d];
                        let l = (0..4).map(|i| ell[i] * x[i]).sum::<i128>().rem_euclid(m);
                        if x != [0; 4] && l == 0 && f.evaluate_mod(&x, m) == 0 {
                            n += 1;
                        }
                    }
                }
            }
        }
        n / (p as usize - 1)
    }

    #[test]
    fn tangent_section_examples() {
        let f = default();
        let p = ConePoint::new([35, 3, 4, 0], &f).unwrap();
        let s3 = tangent_section_points(&p, &f, 3).unwrap();
        assert_eq!(s3, vec![ProjPointFp::normalize([35, 3, 4, 0], 3).unwrap()]);
        assert_eq!(brute_force_section(&p, &f, 13), 27);
        assert_eq!(tangent_section_points(&p, &f, 13).unwrap().len(), 27);
        assert_eq!(tangent_section_points(&p, &f, 5).unwrap().len(), 1);
        assert_eq!(
            tangent_section_points(&p, &f, 17),
            Err(Error::SingularReduction { p: 17 })
        );
    }
}
