//! Polynomials in the Hauptmodul `xi` with big-integer coefficients, and the
//! towers built from them:
//!
//! * `zeta(i, j) = U(kappa^i xi^j)`, from five initial evaluations and two
//!   three-term recurrences (one in `i`, one in `j`);
//! * `Lambda_k = gamma^(2^(k-2)) sum PDO(2^k n) q^n`;
//! * `Phi_k = gamma^(2^k) sum (PDO(2^(k+2) n) - PDO(2^k n)) q^n`.
//!
//! Every polynomial can be pushed back to a `q`-series with
//! [`poly_to_series`] for cross-checking against direct expansions.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{LazyLock, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::etaq;
use crate::series::Series;

/// Sparse polynomial in `xi`: degree -> nonzero coefficient.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct XiPoly {
    terms: BTreeMap<u32, BigInt>,
}

impl XiPoly {
    pub fn zero() -> Self {
        XiPoly::default()
    }

    pub fn one() -> Self {
        XiPoly::monomial(0, BigInt::one())
    }

    pub fn monomial(deg: u32, coeff: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(deg, coeff);
        }
        XiPoly { terms }
    }

    /// Builds from `(degree, coefficient)` pairs; repeated degrees add up.
    pub fn from_terms<C: Into<BigInt>>(pairs: impl IntoIterator<Item = (u32, C)>) -> Self {
        let mut p = XiPoly::zero();
        for (d, c) in pairs {
            p.add_term(d, &c.into());
        }
        p
    }

    fn add_term(&mut self, deg: u32, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(deg).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&deg);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `xi^deg` (zero when absent).
    pub fn coeff(&self, deg: u32) -> BigInt {
        self.terms.get(&deg).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (u32, &BigInt)> {
        self.terms.iter().map(|(&d, c)| (d, c))
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Highest degree with a nonzero coefficient.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().copied()
    }

    /// Lowest degree with a nonzero coefficient.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().next().copied()
    }

    pub fn add(&self, other: &XiPoly) -> XiPoly {
        let mut out = self.clone();
        for (&d, c) in &other.terms {
            out.add_term(d, c);
        }
        out
    }

    pub fn sub(&self, other: &XiPoly) -> XiPoly {
        let mut out = self.clone();
        for (&d, c) in &other.terms {
            out.add_term(d, &-c);
        }
        out
    }

    pub fn neg(&self) -> XiPoly {
        XiPoly {
            terms: self.terms.iter().map(|(&d, c)| (d, -c)).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> XiPoly {
        if c.is_zero() {
            return XiPoly::zero();
        }
        XiPoly {
            terms: self.terms.iter().map(|(&d, x)| (d, x * c)).collect(),
        }
    }

    pub fn mul(&self, other: &XiPoly) -> XiPoly {
        let mut acc: BTreeMap<u32, BigInt> = BTreeMap::new();
        for (&da, ca) in &self.terms {
            for (&db, cb) in &other.terms {
                *acc.entry(da + db).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        XiPoly { terms: acc }
    }

    pub fn pow(&self, mut e: u32) -> XiPoly {
        let mut result = XiPoly::one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Coefficients `c_0 .. c_deg` densely, for Horner evaluation.
    fn dense(&self) -> Vec<BigInt> {
        let Some(deg) = self.degree() else {
            return Vec::new();
        };
        let mut v = vec![BigInt::zero(); deg as usize + 1];
        for (&d, c) in &self.terms {
            v[d as usize] = c.clone();
        }
        v
    }
}

impl fmt::Display for XiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (idx, (d, c)) in self.terms().enumerate() {
            if idx > 0 {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            } else if c.is_negative() {
                f.write_str("-")?;
            }
            let mag = c.abs();
            match (d, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => f.write_str("xi")?,
                (1, false) => write!(f, "{mag}*xi")?,
                (_, true) => write!(f, "xi^{d}")?,
                (_, false) => write!(f, "{mag}*xi^{d}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for XiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "XiPoly({self})")
    }
}

impl Add for &XiPoly {
    type Output = XiPoly;
    fn add(self, rhs: &XiPoly) -> XiPoly {
        XiPoly::add(self, rhs)
    }
}

impl Sub for &XiPoly {
    type Output = XiPoly;
    fn sub(self, rhs: &XiPoly) -> XiPoly {
        XiPoly::sub(self, rhs)
    }
}

impl Mul for &XiPoly {
    type Output = XiPoly;
    fn mul(self, rhs: &XiPoly) -> XiPoly {
        XiPoly::mul(self, rhs)
    }
}

impl Neg for &XiPoly {
    type Output = XiPoly;
    fn neg(self) -> XiPoly {
        XiPoly::neg(self)
    }
}

/// Wire record for one term. Coefficients travel as decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub deg: u32,
    pub coeff: String,
}

impl XiPoly {
    /// Terms in ascending degree as serializable records.
    pub fn to_records(&self) -> Vec<TermRecord> {
        self.terms()
            .map(|(deg, c)| TermRecord {
                deg,
                coeff: c.to_string(),
            })
            .collect()
    }

    pub fn from_records(records: &[TermRecord]) -> Result<XiPoly> {
        let mut p = XiPoly::zero();
        for r in records {
            let c: BigInt = r.coeff.parse().map_err(|_| {
                Error::InvalidArgument(format!(
                    "coefficient {:?} is not a decimal integer",
                    r.coeff
                ))
            })?;
            p.add_term(r.deg, &c);
        }
        Ok(p)
    }
}

impl Serialize for XiPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_records().serialize(s)
    }
}

impl<'de> Deserialize<'de> for XiPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let records = Vec::<TermRecord>::deserialize(d)?;
        XiPoly::from_records(&records).map_err(serde::de::Error::custom)
    }
}

fn poly(pairs: &[(u32, i64)]) -> XiPoly {
    XiPoly::from_terms(pairs.iter().copied())
}

/// `U(kappa^i xi^j)` for the six pairs with `i + j <= 2`.
pub fn zeta_initial() -> BTreeMap<(u32, u32), XiPoly> {
    BTreeMap::from([
        ((0, 0), XiPoly::one()),
        ((1, 0), poly(&[(3, 5), (4, -20), (5, 16)])),
        ((0, 1), poly(&[(1, 5), (2, -4)])),
        (
            (2, 0),
            poly(&[
                (5, -1),
                (6, 50),
                (7, -400),
                (8, 1120),
                (9, -1280),
                (10, 512),
            ]),
        ),
        ((1, 1), poly(&[(3, 3), (4, -18), (5, 16)])),
        ((0, 2), poly(&[(1, -9), (2, 58), (3, -80), (4, 32)])),
    ])
}

/// `gamma^6` as a polynomial in `xi`.
pub fn gamma6_poly() -> XiPoly {
    poly(&[
        (10, 59049),
        (11, -262440),
        (12, 466560),
        (13, -414720),
        (14, 184320),
        (15, -32768),
    ])
}

/// `Lambda_2 = U(gamma(q^2) delta(q)^2)`.
pub fn lambda2_poly() -> XiPoly {
    poly(&[(2, 3), (3, -2)])
}

/// Which series a [`SigmaPair`] describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SigmaBase {
    Kappa,
    Xi,
}

/// `sigma_1 = alpha(q) + alpha(-q)` and `sigma_2 = alpha(q) alpha(-q)` as
/// polynomials in `xi`. `alpha(q)` and `alpha(-q)` are the two roots of
/// `X^2 - sigma_1 X + sigma_2`, which yields the three-term recurrences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaPair {
    pub sigma1: XiPoly,
    pub sigma2: XiPoly,
}

/// Derives the pair from `U(alpha)` and `U(alpha^2)`:
/// `sigma_1 = 2 U(alpha)`, `sigma_2 = 2 U(alpha)^2 - U(alpha^2)`.
pub fn sigma_pair(which: SigmaBase) -> SigmaPair {
    let init = zeta_initial();
    let (single, square) = match which {
        SigmaBase::Kappa => (&init[&(1, 0)], &init[&(2, 0)]),
        SigmaBase::Xi => (&init[&(0, 1)], &init[&(0, 2)]),
    };
    let two = BigInt::from(2);
    SigmaPair {
        sigma1: single.scale(&two),
        sigma2: single.mul(single).scale(&two).sub(square),
    }
}

/// Memo of `zeta(i, j)`, filled iteratively.
///
/// The two base columns `j = 0` and `j = 1` are built for every `i` with the
/// `i`-recurrence (never applied below `i = 2`), then each row is extended in
/// `j` with the `j`-recurrence (never applied below `j = 2`).
#[derive(Clone, Debug)]
pub struct ZetaTable {
    kappa: SigmaPair,
    xi: SigmaPair,
    /// `base[i] = [zeta(i, 0), zeta(i, 1)]`
    base: Vec<[XiPoly; 2]>,
    /// `rows[i][j] = zeta(i, j)` for `j` computed so far (always `>= 2` long)
    rows: HashMap<u32, Vec<XiPoly>>,
}

impl Default for ZetaTable {
    fn default() -> Self {
        Self::new()
    }
}

impl ZetaTable {
    pub fn new() -> Self {
        let init = zeta_initial();
        ZetaTable {
            kappa: sigma_pair(SigmaBase::Kappa),
            xi: sigma_pair(SigmaBase::Xi),
            base: vec![
                [init[&(0, 0)].clone(), init[&(0, 1)].clone()],
                [init[&(1, 0)].clone(), init[&(1, 1)].clone()],
            ],
            rows: HashMap::new(),
        }
    }

    fn extend_base(&mut self, i: u32) {
        while self.base.len() <= i as usize {
            let n = self.base.len();
            let next = [0, 1].map(|col| {
                self.kappa
                    .sigma1
                    .mul(&self.base[n - 1][col])
                    .sub(&self.kappa.sigma2.mul(&self.base[n - 2][col]))
            });
            self.base.push(next);
        }
    }

    /// `zeta(i, j) = U(kappa^i xi^j)`.
    pub fn get(&mut self, i: u32, j: u32) -> &XiPoly {
        self.extend_base(i);
        let base = &self.base[i as usize];
        let row = self
            .rows
            .entry(i)
            .or_insert_with(|| vec![base[0].clone(), base[1].clone()]);
        while row.len() <= j as usize {
            let n = row.len();
            let next = self
                .xi
                .sigma1
                .mul(&row[n - 1])
                .sub(&self.xi.sigma2.mul(&row[n - 2]));
            row.push(next);
        }
        &row[j as usize]
    }

    /// `zeta(i, j)` for `i, j >= 2` from the four-term recurrence that mixes
    /// both directions, evaluated on the memoized neighbours.
    pub fn combined(&mut self, i: u32, j: u32) -> Result<XiPoly> {
        if i < 2 || j < 2 {
            return Err(Error::InvalidArgument(format!(
                "combined recurrence needs i, j >= 2, got ({i}, {j})"
            )));
        }
        let (k1, k2) = (self.kappa.sigma1.clone(), self.kappa.sigma2.clone());
        let (x1, x2) = (self.xi.sigma1.clone(), self.xi.sigma2.clone());
        let a = x1.mul(&k1).mul(self.get(i - 1, j - 1));
        let b = x2.mul(&k1).mul(self.get(i - 1, j - 2));
        let c = x1.mul(&k2).mul(self.get(i - 2, j - 1));
        let d = x2.mul(&k2).mul(self.get(i - 2, j - 2));
        Ok(a.sub(&b).sub(&c).add(&d))
    }

    /// `sum_l p(l) zeta(i, l)`, i.e. `U(kappa^i p(xi))`.
    pub fn unitize_kappa_power(&mut self, i: u32, p: &XiPoly) -> XiPoly {
        let mut acc = XiPoly::zero();
        for (l, c) in p.terms() {
            acc = acc.add(&self.get(i, l).scale(c));
        }
        acc
    }
}

/// The `Lambda` and `Phi` towers over a shared [`ZetaTable`].
#[derive(Clone, Debug, Default)]
pub struct Tower {
    zeta: ZetaTable,
    lambda: BTreeMap<u32, XiPoly>,
    phi: BTreeMap<u32, XiPoly>,
}

impl Tower {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn zeta(&mut self, i: u32, j: u32) -> XiPoly {
        self.zeta.get(i, j).clone()
    }

    pub fn zeta_table(&mut self) -> &mut ZetaTable {
        &mut self.zeta
    }

    /// `Lambda_2 = 3 xi^2 - 2 xi^3`; `Lambda_k = sum_l c_{k-1}(l) zeta(2^(k-3), l)`.
    pub fn lambda(&mut self, k: u32) -> Result<XiPoly> {
        if k < 2 {
            return Err(Error::IndexOutOfRange {
                k,
                reason: "Lambda_k is defined for k >= 2".into(),
            });
        }
        check_power_index(k, 3)?;
        let start = match self.lambda.keys().next_back() {
            Some(&top) if top >= k => return Ok(self.lambda[&k].clone()),
            Some(&top) => top + 1,
            None => {
                self.lambda.insert(2, lambda2_poly());
                3
            }
        };
        for level in start..=k {
            let prev = self.lambda[&(level - 1)].clone();
            let next = self.zeta.unitize_kappa_power(1 << (level - 3), &prev);
            self.lambda.insert(level, next);
        }
        Ok(self.lambda[&k].clone())
    }

    /// `Phi_3 = Lambda_5 - gamma^6 Lambda_3`; for `k >= 4`,
    /// `Phi_k = sum_l F_{k-1}(l) zeta(2^(k-1), l)`.
    pub fn phi(&mut self, k: u32) -> Result<XiPoly> {
        if k < 3 {
            return Err(Error::IndexOutOfRange {
                k,
                reason: "Phi_k is defined for k >= 3".into(),
            });
        }
        check_power_index(k, 1)?;
        let start = match self.phi.keys().next_back() {
            Some(&top) if top >= k => return Ok(self.phi[&k].clone()),
            Some(&top) => top + 1,
            None => {
                let lam5 = self.lambda(5)?;
                let lam3 = self.lambda(3)?;
                self.phi.insert(3, lam5.sub(&gamma6_poly().mul(&lam3)));
                4
            }
        };
        for level in start..=k {
            let prev = self.phi[&(level - 1)].clone();
            let next = self.zeta.unitize_kappa_power(1 << (level - 1), &prev);
            self.phi.insert(level, next);
        }
        Ok(self.phi[&k].clone())
    }

    /// `Lambda_{k+2} - (gamma^6)^(2^(k-3)) Lambda_k`, independent of the
    /// `Phi` recursion.
    pub fn phi_direct(&mut self, k: u32) -> Result<XiPoly> {
        if k < 3 {
            return Err(Error::IndexOutOfRange {
                k,
                reason: "Phi_k is defined for k >= 3".into(),
            });
        }
        let upper = self.lambda(k + 2)?;
        let lower = self.lambda(k)?;
        let multiplier = gamma6_poly().pow(1 << (k - 3));
        Ok(upper.sub(&multiplier.mul(&lower)))
    }
}

/// Rejects indices whose `2^(k - offset)` kappa power would overflow `u32`.
fn check_power_index(k: u32, offset: u32) -> Result<()> {
    if k - offset.min(k) >= 31 {
        return Err(Error::IndexOutOfRange {
            k,
            reason: "kappa exponent exceeds u32".into(),
        });
    }
    Ok(())
}

static SHARED: LazyLock<Mutex<Tower>> = LazyLock::new(|| Mutex::new(Tower::new()));

fn with_shared<T>(f: impl FnOnce(&mut Tower) -> T) -> T {
    let mut guard = SHARED.lock().unwrap_or_else(|p| p.into_inner());
    f(&mut guard)
}

/// `zeta(i, j) = U(kappa^i xi^j)` from the process-wide memo.
pub fn zeta(i: u32, j: u32) -> XiPoly {
    with_shared(|t| t.zeta(i, j))
}

pub fn lambda_poly(k: u32) -> Result<XiPoly> {
    with_shared(|t| t.lambda(k))
}

pub fn phi_poly(k: u32) -> Result<XiPoly> {
    with_shared(|t| t.phi(k))
}

pub fn phi_direct(k: u32) -> Result<XiPoly> {
    with_shared(|t| t.phi_direct(k))
}

pub fn zeta_combined(i: u32, j: u32) -> Result<XiPoly> {
    with_shared(|t| t.zeta_table().combined(i, j))
}

/// Substitutes the `q`-expansion of `xi` and truncates to `order`.
pub fn poly_to_series(p: &XiPoly, order: usize) -> Series {
    poly_to_series_with(p, &etaq::xi_series(order))
}

/// [`poly_to_series`] with a precomputed `xi` expansion; the result has the
/// order of `xi`.
pub fn poly_to_series_with(p: &XiPoly, xi: &Series) -> Series {
    let order = xi.order();
    let mut acc = Series::zero(order);
    for c in p.dense().iter().rev() {
        acc = acc.mul(xi);
        let mut coeffs = acc.into_coeffs();
        if let Some(c0) = coeffs.first_mut() {
            *c0 += c;
        }
        acc = Series::from_coeffs(coeffs);
    }
    acc
}
