//! Eta-quotients `prod E(q^m)^e` with `E(q) = prod_{n>=1} (1 - q^n)`, the
//! named series built from them, and PDO coefficient tables.
//!
//! Expansion never forms `E(q^m)^e` densely: `E` has only `O(sqrt N)` nonzero
//! coefficients below `q^N` (the pentagonal number theorem), so each factor is
//! applied as a sparse multiply or divide.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::series::{Series, SparseUnit};

/// Largest `n` accepted by [`pdo_bruteforce`].
pub const DEFAULT_ORACLE_BOUND: u64 = 60;

/// A formal product `prod E(q^m)^e`, stored canonically: sorted by dilation,
/// distinct dilations, nonzero exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EtaQuotientSpec {
    factors: BTreeMap<u32, i64>,
}

impl EtaQuotientSpec {
    /// Builds a spec from `(dilation, exponent)` pairs. Dilations must be
    /// positive and distinct, exponents nonzero.
    pub fn new(pairs: impl IntoIterator<Item = (u32, i64)>) -> Result<Self> {
        let mut factors = BTreeMap::new();
        for (m, e) in pairs {
            if m == 0 {
                return Err(Error::InvalidArgument("dilation must be >= 1".into()));
            }
            if e == 0 {
                return Err(Error::InvalidArgument(format!(
                    "exponent of E(q^{m}) must be nonzero"
                )));
            }
            if factors.insert(m, e).is_some() {
                return Err(Error::InvalidArgument(format!("dilation {m} repeated")));
            }
        }
        Ok(EtaQuotientSpec { factors })
    }

    pub fn factors(&self) -> impl Iterator<Item = (u32, i64)> + '_ {
        self.factors.iter().map(|(&m, &e)| (m, e))
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// The product of two eta-quotients. Exponents of a shared dilation add;
    /// factors that cancel are dropped.
    pub fn combine(&self, other: &EtaQuotientSpec) -> EtaQuotientSpec {
        let mut factors = self.factors.clone();
        for (&m, &e) in &other.factors {
            let slot = factors.entry(m).or_insert(0);
            *slot += e;
            if *slot == 0 {
                factors.remove(&m);
            }
        }
        EtaQuotientSpec { factors }
    }

    /// Substitutes `q -> q^k`.
    pub fn dilate(&self, k: u32) -> EtaQuotientSpec {
        EtaQuotientSpec {
            factors: self.factors.iter().map(|(&m, &e)| (m * k, e)).collect(),
        }
    }

    /// Raises the whole quotient to an integer power.
    pub fn pow(&self, n: i64) -> EtaQuotientSpec {
        if n == 0 {
            return EtaQuotientSpec::default();
        }
        EtaQuotientSpec {
            factors: self.factors.iter().map(|(&m, &e)| (m, e * n)).collect(),
        }
    }

    /// `E(q^4) E(q^6)^2 / (E(q) E(q^3) E(q^12))`, the PDO generating function.
    pub fn delta() -> Self {
        Self::new([(4, 1), (6, 2), (1, -1), (3, -1), (12, -1)]).expect("static spec")
    }

    /// `E(q)^5 E(q^2)^5 E(q^6)^5 / E(q^3)^15`.
    pub fn gamma() -> Self {
        Self::new([(1, 5), (2, 5), (6, 5), (3, -15)]).expect("static spec")
    }

    /// The Hauptmodul `E(q^2)^5 E(q^6) / (E(q) E(q^3)^5)`.
    pub fn xi() -> Self {
        Self::new([(2, 5), (6, 1), (1, -1), (3, -5)]).expect("static spec")
    }

    /// `gamma(q^2)^2 / gamma(q)` as a single eta-quotient.
    pub fn kappa() -> Self {
        Self::gamma()
            .dilate(2)
            .pow(2)
            .combine(&Self::gamma().pow(-1))
    }

    /// Looks up `delta`, `gamma`, `xi` or `kappa`.
    pub fn named(name: &str) -> Option<Self> {
        match name {
            "delta" => Some(Self::delta()),
            "gamma" => Some(Self::gamma()),
            "xi" => Some(Self::xi()),
            "kappa" => Some(Self::kappa()),
            _ => None,
        }
    }
}

/// Text form: semicolon-separated `m^e` factors in ascending dilation order,
/// e.g. `1^-1;3^-1;4^1;6^2;12^-1`. Parsing accepts any factor order.
impl fmt::Display for EtaQuotientSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, (m, e)) in self.factors().enumerate() {
            if idx > 0 {
                f.write_str(";")?;
            }
            write!(f, "{m}^{e}")?;
        }
        Ok(())
    }
}

impl FromStr for EtaQuotientSpec {
    type Err = Error;

    fn from_str(input: &str) -> Result<Self> {
        let malformed = |reason: String| Error::MalformedSpec {
            input: input.to_string(),
            reason,
        };
        if input.trim().is_empty() {
            return Ok(EtaQuotientSpec::default());
        }
        let mut pairs = Vec::new();
        for part in input.split(';') {
            let part = part.trim();
            let (m, e) = part
                .split_once('^')
                .ok_or_else(|| malformed(format!("factor {part:?} is not of the form m^e")))?;
            let m: u32 = m
                .trim()
                .parse()
                .map_err(|_| malformed(format!("bad dilation in {part:?}")))?;
            let e: i64 = e
                .trim()
                .parse()
                .map_err(|_| malformed(format!("bad exponent in {part:?}")))?;
            pairs.push((m, e));
        }
        EtaQuotientSpec::new(pairs).map_err(|err| match err {
            Error::InvalidArgument(reason) => malformed(reason),
            other => other,
        })
    }
}

/// Nonzero coefficients of `E(q)` below `q^order`, as `(exponent, sign)`
/// excluding the constant term. Exponents are the generalized pentagonal
/// numbers `k(3k -+ 1)/2` with sign `(-1)^k`.
fn euler_terms(order: usize) -> Vec<(usize, i64)> {
    let mut terms = Vec::new();
    for k in 1usize.. {
        let sign = if k % 2 == 1 { -1 } else { 1 };
        let lo = k * (3 * k - 1) / 2;
        if lo >= order {
            break;
        }
        terms.push((lo, sign));
        let hi = k * (3 * k + 1) / 2;
        if hi < order {
            terms.push((hi, sign));
        }
    }
    terms
}

/// `E(q) = prod (1 - q^n)` truncated to `order` coefficients.
pub fn euler_series(order: usize) -> Series {
    let mut coeffs = vec![BigInt::zero(); order];
    if let Some(c) = coeffs.first_mut() {
        *c = BigInt::from(1);
    }
    for (e, s) in euler_terms(order) {
        coeffs[e] = BigInt::from(s);
    }
    Series::from_coeffs(coeffs)
}

/// Expands an eta-quotient to `order` coefficients.
pub fn expand(spec: &EtaQuotientSpec, order: usize) -> Series {
    let mut out = Series::one(order);
    for (m, e) in spec.factors() {
        let m = m as usize;
        let reach = order.div_ceil(m);
        let factor = SparseUnit::new(euler_terms(reach))
            .expect("pentagonal exponents are positive")
            .dilate(m);
        for _ in 0..e.unsigned_abs() {
            if e > 0 {
                out.mul_sparse_unit(&factor);
            } else {
                out.div_sparse_unit(&factor);
            }
        }
    }
    out
}

/// Thread-safe memo of eta-quotient expansions. A cached expansion of higher
/// order serves any lower order by truncation. Results never depend on
/// whether the cache was hit.
#[derive(Debug, Default)]
pub struct ExpansionCache {
    entries: Mutex<HashMap<EtaQuotientSpec, Arc<Series>>>,
}

impl ExpansionCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn expand(&self, spec: &EtaQuotientSpec, order: usize) -> Series {
        if let Some(hit) = self.lookup(spec, order) {
            return hit;
        }
        // Computed outside the lock; a racing duplicate is harmless.
        let fresh = Arc::new(expand(spec, order));
        let mut map = self.entries.lock().unwrap_or_else(|p| p.into_inner());
        let keep = match map.get(spec) {
            Some(existing) if existing.order() >= order => existing.clone(),
            _ => {
                map.insert(spec.clone(), fresh.clone());
                fresh
            }
        };
        keep.truncate(order)
    }

    fn lookup(&self, spec: &EtaQuotientSpec, order: usize) -> Option<Series> {
        let map = self.entries.lock().unwrap_or_else(|p| p.into_inner());
        map.get(spec)
            .filter(|s| s.order() >= order)
            .map(|s| s.truncate(order))
    }
}

pub fn delta_series(order: usize) -> Series {
    expand(&EtaQuotientSpec::delta(), order)
}

pub fn gamma_series(order: usize) -> Series {
    expand(&EtaQuotientSpec::gamma(), order)
}

pub fn xi_series(order: usize) -> Series {
    expand(&EtaQuotientSpec::xi(), order)
}

/// `kappa = gamma(q^2)^2 / gamma(q)`, built from the gamma series itself
/// rather than from [`EtaQuotientSpec::kappa`].
pub fn kappa_series(order: usize) -> Series {
    let gamma = gamma_series(order);
    let num = gamma.dilate(2).expect("dilation 2").square();
    let inv = gamma.invert().expect("gamma has constant term 1");
    num.mul(&inv)
}

/// `PDO(0) .. PDO(len - 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PdoTable {
    values: Vec<BigInt>,
}

impl PdoTable {
    pub fn from_values(values: Vec<BigInt>) -> Self {
        PdoTable { values }
    }

    pub fn values(&self) -> &[BigInt] {
        &self.values
    }

    /// Number of stored values, i.e. the truncation order they came from.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest `n` with a known value; `None` for an empty table.
    pub fn max_n(&self) -> Option<usize> {
        self.values.len().checked_sub(1)
    }

    pub fn get(&self, n: usize) -> Option<&BigInt> {
        self.values.get(n)
    }

    /// `sum PDO(stride * n) q^n`, as far as the table reaches.
    pub fn slice_series(&self, stride: usize) -> Series {
        Series::from_coeffs(self.values.iter().step_by(stride.max(1)).cloned().collect())
    }
}

/// PDO(n) for `n < order`, read off the expansion of delta.
pub fn pdo_series(order: usize) -> PdoTable {
    PdoTable {
        values: delta_series(order).into_coeffs(),
    }
}

/// PDO(n) by direct enumeration of partitions of `n` into odd parts, each
/// weighted by the number of ways to designate one copy of every distinct part.
pub fn pdo_bruteforce(n: u64) -> Result<BigInt> {
    pdo_bruteforce_bounded(n, DEFAULT_ORACLE_BOUND)
}

pub fn pdo_bruteforce_bounded(n: u64, bound: u64) -> Result<BigInt> {
    if n > bound {
        return Err(Error::OracleRange { n, bound });
    }
    let largest_odd = if n % 2 == 1 { n } else { n.saturating_sub(1) };
    Ok(BigInt::from(designated_count(n, largest_odd)))
}

/// Sum over odd-part partitions of `remaining` with parts `<= max_part` of
/// the product of part multiplicities.
fn designated_count(remaining: u64, max_part: u64) -> u128 {
    if remaining == 0 {
        return 1;
    }
    let mut total = 0u128;
    let mut part = max_part;
    while part >= 1 {
        let mut mult = 1u64;
        while mult * part <= remaining {
            total +=
                mult as u128 * designated_count(remaining - mult * part, part.saturating_sub(2));
            mult += 1;
        }
        if part < 2 {
            break;
        }
        part -= 2;
    }
    total
}
