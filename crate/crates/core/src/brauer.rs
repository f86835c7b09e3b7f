//! The Brauer class `A_P = (Δ, ℓ_P)` of the punctured cone and its local
//! invariants.
//!
//! `Δ` is the discriminant class of the form and `ℓ_P` the tangent form at
//! an integral base point `P`. Different base points give the same class, so
//! whenever `ℓ_P` vanishes at a query point (or is not determined to enough
//! digits) the evaluation moves to the next point of a base-point pool.
//!
//! At a finite-precision point `Q` mod `p^k` the value `ℓ(Q) = p^e·u` is used
//! only when `e ≤ k - 2` (`k - 3` at `p = 2`), so the unit part is known
//! beyond its first digit.

use std::collections::BTreeMap;

use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::localarith::{invariant, is_prime, prime_factors, split_prime_power, LocalInvariant, Place};
use crate::quadric::{
    lift_residues, residues_smooth, tangent_form, ConePoint, Discriminant, PadicPoint, QuadricForm,
    TangentForm, DEFAULT_PRECISION,
};

/// A point of X over some completion: either an exact integral point (valid
/// at every place) or a p-adic point known mod `p^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalPoint {
    Exact(ConePoint),
    Padic(PadicPoint),
}

impl From<ConePoint> for LocalPoint {
    fn from(p: ConePoint) -> Self {
        LocalPoint::Exact(p)
    }
}

impl From<PadicPoint> for LocalPoint {
    fn from(p: PadicPoint) -> Self {
        LocalPoint::Padic(p)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Anchor {
    point: ConePoint,
    form: TangentForm,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrauerClass {
    quadric: QuadricForm,
    delta: Discriminant,
    base: Anchor,
    pool: Vec<Anchor>,
}

enum Evaluation {
    Defined(LocalInvariant),
    Vanishes,
    Imprecise,
}

impl BrauerClass {
    /// Refuses forms with square discriminant, whose cone has no
    /// nonconstant Brauer class.
    pub fn new(quadric: &QuadricForm, base_point: ConePoint) -> Result<Self> {
        let delta = quadric.discriminant_class()?;
        if delta.is_square() {
            return Err(Error::TrivialClass);
        }
        let form = tangent_form(&base_point, quadric)?;
        Ok(BrauerClass {
            quadric: quadric.clone(),
            delta,
            base: Anchor { point: base_point, form },
            pool: Vec::new(),
        })
    }

    /// Appends alternative base points, tried in order.
    pub fn with_pool<I: IntoIterator<Item = ConePoint>>(mut self, points: I) -> Result<Self> {
        for point in points {
            let form = tangent_form(&point, &self.quadric)?;
            self.pool.push(Anchor { point, form });
        }
        Ok(self)
    }

    pub fn quadric(&self) -> &QuadricForm {
        &self.quadric
    }

    pub fn delta(&self) -> Discriminant {
        self.delta
    }

    pub fn base_point(&self) -> &ConePoint {
        &self.base.point
    }

    pub fn tangent_form(&self) -> &TangentForm {
        &self.base.form
    }

    pub fn pool(&self) -> impl Iterator<Item = &ConePoint> {
        self.pool.iter().map(|a| &a.point)
    }

    fn anchors(&self) -> impl Iterator<Item = &Anchor> {
        std::iter::once(&self.base).chain(self.pool.iter())
    }

    fn evaluate(&self, anchor: &Anchor, point: &LocalPoint, v: Place) -> Result<Evaluation> {
        let delta = self.delta.representative();
        match point {
            LocalPoint::Exact(q) => {
                let value = anchor.form.evaluate(q.coords())?;
                if value == 0 {
                    return Ok(Evaluation::Vanishes);
                }
                Ok(Evaluation::Defined(invariant(delta, value, v)?))
            }
            LocalPoint::Padic(q) => {
                let p = q.prime();
                let k = q.precision();
                let value = anchor.form.evaluate_mod(q.coords(), q.modulus());
                if value == 0 {
                    return Ok(Evaluation::Vanishes);
                }
                let (e, _) = split_prime_power(value, p)?;
                let margin = if p == 2 { 3 } else { 2 };
                if e + margin > k {
                    return Ok(Evaluation::Imprecise);
                }
                // the representative in [0, p^k) has the true valuation and
                // enough digits of the unit part
                Ok(Evaluation::Defined(invariant(delta, value, v)?))
            }
        }
    }

    /// `inv_v A(Q)`.
    pub fn local_invariant(&self, point: &LocalPoint, v: Place) -> Result<LocalInvariant> {
        self.local_invariant_with_anchor(point, v).map(|(inv, _)| inv)
    }

    fn local_invariant_with_anchor(
        &self,
        point: &LocalPoint,
        v: Place,
    ) -> Result<(LocalInvariant, &ConePoint)> {
        match point {
            LocalPoint::Exact(q) => {
                if self.quadric.evaluate(q.coords())? != 0 {
                    return Err(Error::NotOnQuadric);
                }
            }
            LocalPoint::Padic(q) => {
                if v != Place::Finite(q.prime()) {
                    return Err(Error::PlaceMismatch { point: q.prime(), place: v.to_string() });
                }
                if self.quadric.evaluate_mod(q.coords(), q.modulus()) != 0 {
                    return Err(Error::NotOnQuadric);
                }
            }
        }
        let mut base_status = None;
        for anchor in self.anchors() {
            match self.evaluate(anchor, point, v)? {
                Evaluation::Defined(inv) => return Ok((inv, &anchor.point)),
                other => {
                    base_status.get_or_insert(other);
                }
            }
        }
        match (base_status, point) {
            (Some(Evaluation::Imprecise), LocalPoint::Padic(q)) => Err(Error::InsufficientPrecision {
                p: q.prime(),
                k: q.precision(),
            }),
            _ => Err(Error::NoAlternativeBasePoint),
        }
    }

    /// Invariants of an integral point at `∞`, `2` and every odd prime
    /// dividing `Δ·ℓ(R)`; every other place contributes 0.
    pub fn invariant_profile(&self, point: &ConePoint) -> Result<InvariantProfile> {
        let anchor = self
            .anchors()
            .find(|a| a.form.evaluate(point.coords()).is_ok_and(|x| x != 0))
            .ok_or(Error::NoAlternativeBasePoint)?;
        if self.quadric.evaluate(point.coords())? != 0 {
            return Err(Error::NotOnQuadric);
        }
        let value = anchor.form.evaluate(point.coords())?;
        let delta = self.delta.representative();
        let mut places = vec![Place::Infinity, Place::Finite(2)];
        let mut primes = prime_factors(delta)?;
        primes.extend(prime_factors(value)?);
        primes.sort_unstable();
        primes.dedup();
        places.extend(primes.into_iter().filter(|&p| p != 2).map(Place::Finite));
        let invariants = places
            .into_iter()
            .map(|v| Ok((v, invariant(delta, value, v)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(InvariantProfile { base_point: anchor.point, tangent_value: value, invariants })
    }

    /// The invariant at `p` of the lifts of `λ·Q̃` for every `λ ∈ F_p^×`,
    /// from one Hensel lift and the scalar law
    /// `inv(λQ) = inv(Q) + inv_p(Δ, λ)`.
    pub fn orbit_report(&self, residues: &[u64; 4], p: u64) -> Result<OrbitReport> {
        self.orbit_report_with_precision(residues, p, DEFAULT_PRECISION)
    }

    pub fn orbit_report_with_precision(
        &self,
        residues: &[u64; 4],
        p: u64,
        precision: u32,
    ) -> Result<OrbitReport> {
        if p == 2 || !is_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        let base = residues.map(|c| c % p);
        let x = base.map(|c| c as i128);
        if base == [0; 4] {
            return Err(Error::ZeroTuple);
        }
        if self.quadric.evaluate_mod(&x, p as i128) != 0 {
            return Err(Error::NotOnQuadric);
        }
        if !residues_smooth(&x, &self.quadric, p) {
            return Err(Error::SingularPoint);
        }
        let lift = lift_residues(&base, p, &self.quadric, precision)?;
        let at_one = self.local_invariant(&lift.into(), Place::Finite(p))?;
        let delta = self.delta.representative();
        let table = (1..p)
            .map(|lambda| Ok(at_one + invariant(delta, lambda as i128, Place::Finite(p))?))
            .collect::<Result<Vec<_>>>()?;
        Ok(OrbitReport::new(base, p, table))
    }

    /// True iff the lifts of `Q̃` have invariant 1/2 at `p`, so that no
    /// coprime integral point reduces to exactly `Q̃`.
    pub fn certify_nonliftable(&self, residues: &[u64; 4], p: u64) -> Result<bool> {
        Ok(self.orbit_report(residues, p)?.table[0].is_half())
    }
}

/// The invariants of one integral point, which sum to 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantProfile {
    /// The base point actually used for evaluation.
    pub base_point: ConePoint,
    pub tangent_value: i128,
    pub invariants: BTreeMap<Place, LocalInvariant>,
}

impl InvariantProfile {
    pub fn total(&self) -> LocalInvariant {
        self.invariants.values().copied().sum()
    }

    pub fn get(&self, v: Place) -> LocalInvariant {
        self.invariants.get(&v).copied().unwrap_or_default()
    }
}

/// Invariants of the scalar multiples `λ·Q̃`, `λ = 1, …, p − 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitReport {
    pub base: [u64; 4],
    pub prime: u64,
    /// `table[λ - 1]`.
    pub table: Vec<LocalInvariant>,
    pub zero_count: usize,
    pub half_count: usize,
}

impl OrbitReport {
    fn new(base: [u64; 4], prime: u64, table: Vec<LocalInvariant>) -> Self {
        let half_count = table.iter().filter(|i| i.is_half()).count();
        OrbitReport { base, prime, zero_count: table.len() - half_count, half_count, table }
    }

    pub fn get(&self, lambda: u64) -> Option<LocalInvariant> {
        let l = lambda % self.prime;
        if l == 0 {
            None
        } else {
            self.table.get(l as usize - 1).copied()
        }
    }
}

struct OrderedTable<'a>(&'a [LocalInvariant]);

impl Serialize for OrderedTable<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (i, inv) in self.0.iter().enumerate() {
            map.serialize_entry(&(i + 1).to_string(), inv)?;
        }
        map.end()
    }
}

impl Serialize for OrbitReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(5))?;
        map.serialize_entry("base", &self.base)?;
        map.serialize_entry("prime", &self.prime)?;
        map.serialize_entry("table", &OrderedTable(&self.table))?;
        map.serialize_entry("zero_count", &self.zero_count)?;
        map.serialize_entry("half_count", &self.half_count)?;
        map.end()
    }
}

impl<'de> Deserialize<'de> for OrbitReport {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            base: [u64; 4],
            prime: u64,
            table: BTreeMap<String, LocalInvariant>,
            zero_count: usize,
            half_count: usize,
        }
        let raw = Raw::deserialize(d)?;
        let mut table = vec![None; raw.table.len()];
        for (key, inv) in raw.table {
            let lambda: usize = key.parse().map_err(de::Error::custom)?;
            let slot = lambda
                .checked_sub(1)
                .and_then(|i| table.get_mut(i))
                .ok_or_else(|| de::Error::custom(format!("table key {lambda} out of range")))?;
            *slot = Some(inv);
        }
        let table: Vec<_> = table
            .into_iter()
            .collect::<Option<_>>()
            .ok_or_else(|| de::Error::custom("table is missing entries"))?;
        if table.len() as u64 + 1 != raw.prime {
            return Err(de::Error::custom("table must cover every unit"));
        }
        let report = OrbitReport::new(raw.base, raw.prime, table);
        if report.zero_count != raw.zero_count || report.half_count != raw.half_count {
            return Err(de::Error::custom("counts disagree with table"));
        }
        Ok(report)
    }
}

/// Checks that `A_P` and `A_{P2}` agree at every sample.
pub fn verify_base_point_independence(
    quadric: &QuadricForm,
    first: ConePoint,
    second: ConePoint,
    pool: &[ConePoint],
    samples: &[(LocalPoint, Place)],
) -> Result<bool> {
    let a = BrauerClass::new(quadric, first)?.with_pool(pool.iter().copied())?;
    let b = BrauerClass::new(quadric, second)?.with_pool(pool.iter().copied())?;
    for (point, v) in samples {
        if a.local_invariant(point, *v)? != b.local_invariant(point, *v)? {
            return Ok(false);
        }
    }
    Ok(true)
}
