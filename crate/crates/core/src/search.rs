//! Bounded-height search for coprime integral points, reduction censuses,
//! and the end-to-end check of the obstruction against an actual solution
//! set.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::{Integer, Roots};
use rayon::prelude::*;
use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::brauer::{BrauerClass, LocalPoint, OrbitReport};
use crate::error::{Error, Result};
use crate::localarith::{is_prime, Place};
use crate::quadric::{lift_residues, residues_smooth, ConePoint, QuadricForm, DEFAULT_PRECISION};

pub const DEFAULT_HEIGHT: i128 = 500;

fn guard(form: &QuadricForm, height: i128) -> Result<()> {
    if height < 1 {
        return Err(Error::InvalidHeight);
    }
    let h2 = height.checked_mul(height).ok_or(Error::Overflow)?;
    h2.checked_mul(h2)
        .and_then(|h4| h4.checked_mul(form.max_coefficient().max(1)))
        .and_then(|x| x.checked_mul(16))
        .ok_or(Error::Overflow)?;
    Ok(())
}

fn term_range(coeff: i128, h2: i128) -> (i128, i128) {
    let extreme = coeff * h2;
    (extreme.min(0), extreme.max(0))
}

fn ceil_div(a: i128, b: i128) -> i128 {
    Integer::div_ceil(&a, &b)
}

/// Every coprime integral solution with `max |x_i| ≤ height`, sorted
/// lexicographically.
pub fn search_integral_points(form: &QuadricForm, height: i128) -> Result<Vec<ConePoint>> {
    guard(form, height)?;
    let mut out = match form.diagonal_entries() {
        Some(d) => search_diagonal(d, height),
        None => search_general(form, height),
    };
    out.sort_unstable();
    out.into_iter().map(|c| ConePoint::new(c, form)).collect()
}

fn coprime(x: &[i128; 4]) -> bool {
    x.iter().fold(0i128, |g, &c| g.gcd(&c)) == 1
}

/// Loops over the three variables with the largest coefficients, outermost
/// first, pruning by the attainable range of the remaining terms, and solves
/// for the last one with an integer square root.
fn search_diagonal(d: [i128; 4], height: i128) -> Vec<[i128; 4]> {
    let h2 = height * height;
    let mut order = [0usize, 1, 2, 3];
    order.sort_by_key(|&i| std::cmp::Reverse(d[i].abs()));
    let [o1, o2, o3, solved] = order;
    // the looped terms must sum to T with d_s·x_s² = −T, 0 ≤ x_s² ≤ H²
    let (target_lo, target_hi) = term_range(-d[solved], h2);
    let (r2_lo, r2_hi) = term_range(d[o2], h2);
    let (r3_lo, r3_hi) = term_range(d[o3], h2);

    (-height..=height)
        .into_par_iter()
        .flat_map_iter(move |x1| {
            let mut found = Vec::new();
            let s1 = d[o1] * x1 * x1;
            if s1 + r2_lo + r3_lo > target_hi || s1 + r2_hi + r3_hi < target_lo {
                return found.into_iter();
            }
            for x2 in -height..=height {
                let s2 = s1 + d[o2] * x2 * x2;
                if s2 + r3_lo > target_hi || s2 + r3_hi < target_lo {
                    continue;
                }
                // d_o3·x3² ∈ [target_lo − s2, target_hi − s2]
                let (lo, hi) = (target_lo - s2, target_hi - s2);
                let c = d[o3];
                let (sq_lo, sq_hi) = if c > 0 {
                    (ceil_div(lo, c), Integer::div_floor(&hi, &c))
                } else {
                    (ceil_div(hi, c), Integer::div_floor(&lo, &c))
                };
                let sq_lo = sq_lo.max(0);
                let sq_hi = sq_hi.min(h2);
                if sq_lo > sq_hi {
                    continue;
                }
                let mut a = sq_lo.sqrt();
                if a * a < sq_lo {
                    a += 1;
                }
                let b = sq_hi.sqrt();
                for m in a..=b {
                    let t = s2 + c * m * m;
                    if t % d[solved] != 0 {
                        continue;
                    }
                    let xs2 = -t / d[solved];
                    if xs2 < 0 || xs2 > h2 {
                        continue;
                    }
                    let r = xs2.sqrt();
                    if r * r != xs2 {
                        continue;
                    }
                    for x3 in if m == 0 { vec![0] } else { vec![m, -m] } {
                        for xs in if r == 0 { vec![0] } else { vec![r, -r] } {
                            let mut x = [0i128; 4];
                            x[o1] = x1;
                            x[o2] = x2;
                            x[o3] = x3;
                            x[solved] = xs;
                            if coprime(&x) {
                                found.push(x);
                            }
                        }
                    }
                }
            }
            found.into_iter()
        })
        .collect()
}

/// Scans the last three coordinates and solves the quadratic in the first.
fn search_general(form: &QuadricForm, height: i128) -> Vec<[i128; 4]> {
    let m = *form.matrix();
    (-height..=height)
        .into_par_iter()
        .flat_map_iter(move |x1| {
            let mut found = Vec::new();
            for x2 in -height..=height {
                for x3 in -height..=height {
                    let y = [0, x1, x2, x3];
                    let b: i128 = (1..4).map(|j| m[0][j] * y[j]).sum();
                    let c: i128 = (1..4)
                        .flat_map(|i| (1..4).map(move |j| m[i][j] * y[i] * y[j]))
                        .sum();
                    let a = m[0][0];
                    // a·x0² + 2b·x0 + c = 0
                    let mut roots = Vec::new();
                    if a != 0 {
                        let disc = b * b - a * c;
                        if disc < 0 {
                            continue;
                        }
                        let r = disc.sqrt();
                        if r * r != disc {
                            continue;
                        }
                        for num in [-b + r, -b - r] {
                            if num % a == 0 {
                                roots.push(num / a);
                            }
                        }
                    } else if b != 0 {
                        if c % (2 * b) == 0 {
                            roots.push(-c / (2 * b));
                        }
                    } else if c == 0 {
                        roots.extend(-height..=height);
                    }
                    roots.sort_unstable();
                    roots.dedup();
                    for x0 in roots {
                        let x = [x0, x1, x2, x3];
                        if x0.abs() <= height && coprime(&x) {
                            found.push(x);
                        }
                    }
                }
            }
            found.into_iter()
        })
        .collect()
}

/// The second intersection of the line `P + t·w` with the cone, made
/// primitive: `f(w)·P − 2B(P, w)·w`. `None` when it degenerates to 0.
pub fn point_on_line(base: &ConePoint, form: &QuadricForm, direction: &[i128; 4]) -> Result<Option<ConePoint>> {
    let fw = form.evaluate(direction)?;
    let mp = form.apply(base.coords())?;
    let mut bpw: i128 = 0;
    for i in 0..4 {
        bpw = bpw
            .checked_add(mp[i].checked_mul(direction[i]).ok_or(Error::Overflow)?)
            .ok_or(Error::Overflow)?;
    }
    let two_b = bpw.checked_mul(2).ok_or(Error::Overflow)?;
    let mut q = [0i128; 4];
    for i in 0..4 {
        let a = fw.checked_mul(base.coords()[i]).ok_or(Error::Overflow)?;
        let b = two_b.checked_mul(direction[i]).ok_or(Error::Overflow)?;
        q[i] = a.checked_sub(b).ok_or(Error::Overflow)?;
    }
    if q == [0; 4] {
        return Ok(None);
    }
    ConePoint::primitive(q, form).map(Some)
}

/// Counts of exact reductions mod `p`.
pub fn reduction_census(solutions: &[ConePoint], p: u64) -> BTreeMap<[u64; 4], usize> {
    let mut census = BTreeMap::new();
    for s in solutions {
        *census.entry(s.reduce(p)).or_insert(0) += 1;
    }
    census
}

fn tuple_key(t: &[u64; 4]) -> String {
    format!("({},{},{},{})", t[0], t[1], t[2], t[3])
}

fn parse_tuple_key(s: &str) -> Option<[u64; 4]> {
    let inner = s.strip_prefix('(')?.strip_suffix(')')?;
    let parts: Vec<u64> = inner.split(',').map(|x| x.trim().parse().ok()).collect::<Option<_>>()?;
    parts.try_into().ok()
}

struct CensusMap<'a>(&'a BTreeMap<[u64; 4], usize>);

impl Serialize for CensusMap<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            map.serialize_entry(&tuple_key(k), v)?;
        }
        map.end()
    }
}

fn deserialize_census<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<[u64; 4], usize>, D::Error> {
    let raw = BTreeMap::<String, usize>::deserialize(d)?;
    raw.into_iter()
        .map(|(k, v)| {
            parse_tuple_key(&k)
                .map(|t| (t, v))
                .ok_or_else(|| de::Error::custom(format!("invalid census key {k:?}")))
        })
        .collect()
}

/// Solutions up to a height bound with their census mod a prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchCensus {
    pub height_bound: i128,
    pub solutions: Vec<ConePoint>,
    pub prime: u64,
    pub census: BTreeMap<[u64; 4], usize>,
}

impl SearchCensus {
    pub fn run(form: &QuadricForm, height: i128, p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let solutions = search_integral_points(form, height)?;
        let census = reduction_census(&solutions, p);
        Ok(SearchCensus { height_bound: height, solutions, prime: p, census })
    }
}

impl Serialize for SearchCensus {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(4))?;
        map.serialize_entry("H", &self.height_bound)?;
        map.serialize_entry("solutions", &self.solutions)?;
        map.serialize_entry("census_mod", &self.prime)?;
        map.serialize_entry("census", &CensusMap(&self.census))?;
        map.end()
    }
}

#[derive(Deserialize)]
struct RawCensus {
    #[serde(rename = "H")]
    height_bound: i128,
    solutions: Vec<[i128; 4]>,
    census_mod: u64,
    #[serde(deserialize_with = "deserialize_census")]
    census: BTreeMap<[u64; 4], usize>,
}

impl RawCensus {
    /// Solutions are rechecked for coprimality; the census must be their
    /// exact reduction.
    fn validate<E: de::Error>(self, form: &QuadricForm) -> std::result::Result<SearchCensus, E> {
        let solutions = self
            .solutions
            .into_iter()
            .map(|c| ConePoint::new(c, form).map_err(E::custom))
            .collect::<std::result::Result<Vec<_>, E>>()?;
        if reduction_census(&solutions, self.census_mod) != self.census {
            return Err(E::custom("census does not match the solutions"));
        }
        Ok(SearchCensus {
            height_bound: self.height_bound,
            solutions,
            prime: self.census_mod,
            census: self.census,
        })
    }
}

impl SearchCensus {
    /// Parses the JSON schema and rechecks every solution against `form`.
    pub fn from_json(text: &str, form: &QuadricForm) -> Result<Self> {
        let raw: RawCensus = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        raw.validate::<serde_json::Error>(form).map_err(|e| Error::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coverage {
    pub invariant_zero_classes: usize,
    pub hit: usize,
}

impl Coverage {
    pub fn fraction(&self) -> f64 {
        if self.invariant_zero_classes == 0 {
            0.0
        } else {
            self.hit as f64 / self.invariant_zero_classes as f64
        }
    }
}

/// Outcome of [`verify_theorem`].
#[derive(Debug, Clone, PartialEq)]
pub struct TheoremReport {
    pub census: SearchCensus,
    pub base_point: ConePoint,
    /// One report per F_p^×-orbit of smooth tuples, keyed by the
    /// normalized representative.
    pub orbits: Vec<OrbitReport>,
    /// Invariant of every smooth tuple mod `p`.
    pub invariants: BTreeMap<[u64; 4], crate::localarith::LocalInvariant>,
    /// Every orbit splits evenly between 0 and 1/2.
    pub orbit_split_holds: bool,
    /// Direct lifts of every `λ·Q̃` agree with the scalar law.
    pub scalar_law_holds: bool,
    /// Solutions whose reduction is obstructed, singular, or whose exact
    /// invariant at `p` is nonzero.
    pub obstruction_violations: Vec<ConePoint>,
    pub coverage: Coverage,
}

impl TheoremReport {
    pub fn passed(&self) -> bool {
        self.obstruction_violations.is_empty()
    }
}

impl Serialize for TheoremReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(12))?;
        map.serialize_entry("H", &self.census.height_bound)?;
        map.serialize_entry("solutions", &self.census.solutions)?;
        map.serialize_entry("census_mod", &self.census.prime)?;
        map.serialize_entry("census", &CensusMap(&self.census.census))?;
        map.serialize_entry("obstruction_violations", &self.obstruction_violations)?;
        map.serialize_entry("coverage", &self.coverage)?;
        map.serialize_entry("coverage_fraction", &self.coverage.fraction())?;
        map.serialize_entry("base_point", &self.base_point)?;
        map.serialize_entry("orbit_count", &self.orbits.len())?;
        map.serialize_entry("orbit_split_holds", &self.orbit_split_holds)?;
        map.serialize_entry("scalar_law_holds", &self.scalar_law_holds)?;
        map.serialize_entry("passed", &self.passed())?;
        map.end()
    }
}

/// Smooth tuples of `(Z/p)⁴ \ 0` on the cone, lexicographic.
pub fn smooth_tuples(form: &QuadricForm, p: u64) -> Vec<[u64; 4]> {
    let m = p as i128;
    let mut out = Vec::new();
    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                for d in 0..p {
                    let x = [a, b, c, d].map(|v| v as i128);
                    if x != [0; 4] && form.evaluate_mod(&x, m) == 0 && residues_smooth(&x, form, p) {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    out
}

fn scale_tuple(t: &[u64; 4], lambda: u64, p: u64) -> [u64; 4] {
    t.map(|c| c * lambda % p)
}

/// Searches to `height`, builds the class from the smallest solution (with
/// every solution as the base-point pool), classifies all smooth tuples mod
/// `p`, and checks that each solution lands on an invariant-0 tuple.
pub fn verify_theorem(form: &QuadricForm, height: i128, p: u64) -> Result<TheoremReport> {
    verify_theorem_with_base_points(form, height, p, &[])
}

/// As [`verify_theorem`], with extra base points tried before the search
/// output.
pub fn verify_theorem_with_base_points(
    form: &QuadricForm,
    height: i128,
    p: u64,
    extra: &[ConePoint],
) -> Result<TheoremReport> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    if form.discriminant_class()?.is_square() {
        return Err(Error::TrivialClass);
    }
    let census = SearchCensus::run(form, height, p)?;
    let mut pool: Vec<ConePoint> = extra.to_vec();
    let mut by_height = census.solutions.clone();
    by_height.sort_by_key(|s| (s.height(), std::cmp::Reverse(*s)));
    pool.extend(by_height);
    let base = *pool.first().ok_or(Error::NoBasePoint(height))?;
    let class = BrauerClass::new(form, base)?.with_pool(pool.iter().skip(1).copied())?;

    let tuples = smooth_tuples(form, p);
    let mut seen = BTreeSet::new();
    let mut orbits = Vec::new();
    let mut invariants = BTreeMap::new();
    for t in &tuples {
        if seen.contains(t) {
            continue;
        }
        let report = class.orbit_report(t, p)?;
        for lambda in 1..p {
            let s = scale_tuple(t, lambda, p);
            seen.insert(s);
            invariants.insert(s, report.get(lambda).expect("unit"));
        }
        orbits.push(report);
    }
    let orbit_split_holds = orbits.iter().all(|o| o.zero_count == o.half_count);

    let scalar_law = tuples
        .par_iter()
        .map(|t| -> Result<bool> {
            let lift = lift_residues(t, p, form, DEFAULT_PRECISION)?;
            Ok(class.local_invariant(&LocalPoint::Padic(lift), Place::Finite(p))? == invariants[t])
        })
        .collect::<Result<Vec<_>>>()?;
    let scalar_law_holds = scalar_law.into_iter().all(|ok| ok);

    let mut obstruction_violations = Vec::new();
    for s in &census.solutions {
        let red = s.reduce(p);
        let tabulated = invariants.get(&red).copied();
        let exact = class.local_invariant(&LocalPoint::Exact(*s), Place::Finite(p))?;
        if tabulated.is_none_or(|i| i.is_half()) || exact.is_half() {
            obstruction_violations.push(*s);
        }
    }
    let zero_classes: BTreeSet<_> = invariants.iter().filter(|(_, i)| i.is_zero()).map(|(t, _)| *t).collect();
    let hit = census.census.keys().filter(|k| zero_classes.contains(*k)).count();
    Ok(TheoremReport {
        coverage: Coverage { invariant_zero_classes: zero_classes.len(), hit },
        census,
        base_point: base,
        orbits,
        invariants,
        orbit_split_holds,
        scalar_law_holds,
        obstruction_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Plain scan of the whole box.
    fn brute_force(form: &QuadricForm, h: i128) -> Vec<[i128; 4]> {
        let mut out = Vec::new();
        for a in -h..=h {
            for b in -h..=h {
                for c in -h..=h {
                    for d in -h..=h {
                        let x = [a, b, c, d];
                        if x != [0; 4] && coprime(&x) && form.evaluate(&x).unwrap() == 0 {
                            out.push(x);
                        }
                    }
                }
            }
        }
        out
    }

    fn coords(v: &[ConePoint]) -> Vec<[i128; 4]> {
        v.iter().map(|c| *c.coords()).collect()
    }

    #[test]
    fn default_small_heights() {
        let f = QuadricForm::default_instance();
        assert!(search_integral_points(&f, 1).unwrap().is_empty());
        for h in [1, 5, 12] {
            assert_eq!(coords(&search_integral_points(&f, h).unwrap()), brute_force(&f, h), "H={h}");
        }
        assert_eq!(search_integral_points(&f, 0), Err(Error::InvalidHeight));
    }

    #[test]
    fn default_height_40() {
        let f = QuadricForm::default_instance();
        let sols = coords(&search_integral_points(&f, 40).unwrap());
        assert_eq!(sols.len(), 24);
        for s0 in [35, -35] {
            for s1 in [3, -3] {
                for s2 in [4, -4] {
                    assert!(sols.contains(&[s0, s1, s2, 0]));
                }
            }
        }
        assert!(sols.contains(&[20, 13, 9, 0]));
        assert!(sols.contains(&[16, 31, 21, 0]));
    }

    #[test]
    fn other_forms_match_brute_force() {
        let split = QuadricForm::diagonal([1, 1, -1, -1]).unwrap();
        let sols = coords(&search_integral_points(&split, 1).unwrap());
        assert!(sols.contains(&[1, 0, 1, 0]));
        assert_eq!(sols, brute_force(&split, 1));
        for f in [
            QuadricForm::diagonal([3, -5, 7, -2]).unwrap(),
            QuadricForm::diagonal([-1, 2, 2, -3]).unwrap(),
            QuadricForm::hyperbolic_pq(17, 41).unwrap(),
            QuadricForm::new([[1, 1, 0, 0], [1, -2, 0, 0], [0, 0, 0, 1], [0, 0, 1, 3]]).unwrap(),
        ] {
            assert_eq!(coords(&search_integral_points(&f, 6).unwrap()), brute_force(&f, 6), "{f:?}");
        }
    }

    #[test]
    fn sign_symmetry_and_monotonicity() {
        let f = QuadricForm::default_instance();
        let small = search_integral_points(&f, 60).unwrap();
        let large = search_integral_points(&f, 120).unwrap();
        for s in &small {
            assert!(large.binary_search(s).is_ok());
        }
        for s in &large {
            for mask in 0..16 {
                let mut c = *s.coords();
                for (i, x) in c.iter_mut().enumerate() {
                    if mask & (1 << i) != 0 {
                        *x = -*x;
                    }
                }
                assert!(large.binary_search(&ConePoint::new(c, &f).unwrap()).is_ok());
            }
        }
    }

    #[test]
    fn overflow_guard() {
        let f = QuadricForm::diagonal([1, 1, -1, -(1i128 << 60)]).unwrap();
        assert_eq!(search_integral_points(&f, 1 << 20), Err(Error::Overflow));
    }

    #[test]
    fn lines_through_base_point() {
        let f = QuadricForm::default_instance();
        let p = ConePoint::new([35, 3, 4, 0], &f).unwrap();
        let q = point_on_line(&p, &f, &[0, 0, 0, 1]).unwrap().unwrap();
        assert_eq!(f.evaluate(q.coords()), Ok(0));
        assert_ne!(q, p);
        assert_eq!(point_on_line(&p, &f, &[70, 6, 8, 0]).unwrap(), None);
    }

    #[test]
    fn census_roundtrip() {
        let f = QuadricForm::default_instance();
        let c = SearchCensus::run(&f, 40, 3).unwrap();
        assert!(c.census.keys().all(|k| *k != [0; 4]));
        assert_eq!(c.census.values().sum::<usize>(), c.solutions.len());
        let json = serde_json::to_string(&c).unwrap();
        assert!(json.starts_with(r#"{"H":40,"solutions":[[-35,-3,-4,0],"#));
        assert_eq!(SearchCensus::from_json(&json, &f).unwrap(), c);
        assert!(reduction_census(&[], 17).is_empty());
    }

    #[test]
    fn theorem_at_height_40() {
        let f = QuadricForm::default_instance();
        let report = verify_theorem(&f, 40, 17).unwrap();
        assert!(report.passed());
        assert!(report.orbit_split_holds);
        assert!(report.scalar_law_holds);
        assert_eq!(report.invariants.len(), 4896);
        assert_eq!(report.orbits.len(), 306);
        assert_eq!(report.coverage.invariant_zero_classes, 2448);
        assert!(report.coverage.hit > 0);
    }

    #[test]
    fn theorem_needs_nonsquare_discriminant() {
        let f = QuadricForm::diagonal([1, -1, 1, -1]).unwrap();
        assert_eq!(verify_theorem(&f, 10, 17), Err(Error::TrivialClass));
        let f = QuadricForm::default_instance();
        assert_eq!(verify_theorem(&f, 1, 17), Err(Error::NoBasePoint(1)));
    }
}
