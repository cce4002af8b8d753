//! 2-adic valuations and the valuation profiles of the `zeta` and `Phi`
//! coefficient families.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::xipoly::{self, XiPoly};

/// Largest odd `k` accepted by [`check_f_profile`] unless a bound is given.
pub const DEFAULT_MAX_PHI_INDEX: u32 = 5;

/// Profile windows never exceed this many offsets by default.
pub const DEFAULT_WINDOW: usize = 10;

/// `nu_2(n)`, with `Infinite` for `n = 0` only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(u64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }

    /// `self >= bound`, with infinity above every integer.
    pub fn at_least(self, bound: u64) -> bool {
        self >= Valuation::Finite(bound)
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
            (Valuation::Finite(_), Valuation::Infinite) => Ordering::Less,
            (Valuation::Infinite, Valuation::Finite(_)) => Ordering::Greater,
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ValuationWire {
    Finite(u64),
    Symbol(String),
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            Valuation::Finite(v) => s.serialize_u64(v),
            Valuation::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Valuation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match ValuationWire::deserialize(d)? {
            ValuationWire::Finite(v) => Ok(Valuation::Finite(v)),
            ValuationWire::Symbol(s) if s == "inf" => Ok(Valuation::Infinite),
            ValuationWire::Symbol(s) => Err(serde::de::Error::custom(format!(
                "expected an integer or \"inf\", got {s:?}"
            ))),
        }
    }
}

pub fn nu2(n: &BigInt) -> Valuation {
    match n.trailing_zeros() {
        Some(v) => Valuation::Finite(v),
        None => Valuation::Infinite,
    }
}

/// Least degree of `zeta(i, j)`:
/// `(2I, 2J) -> 5I + J`, `(2I, 2J+1) -> 5I + J + 1`, `(2I+1, *) -> 5I + J + 3`.
pub fn d_min(i: u64, j: u64) -> u64 {
    let (big_i, i_odd) = i.div_rem(&2);
    let (big_j, j_odd) = j.div_rem(&2);
    let base = 5 * big_i + big_j;
    match (i_odd, j_odd) {
        (0, 0) => base,
        (0, _) => base + 1,
        _ => base + 3,
    }
}

/// Least degree of `Phi_k`:
/// `k = 2K - 1 -> 7 * 2^(2K-3) - 2(4^(K-2) - 1)/3`,
/// `k = 2K -> 7 * 2^(2K-2) - (4^(K-1) - 1)/3`.
pub fn tau(k: u32) -> Result<u64> {
    if k < 3 {
        return Err(Error::IndexOutOfRange {
            k,
            reason: "tau_k is defined for k >= 3".into(),
        });
    }
    if k > 60 {
        return Err(Error::IndexOutOfRange {
            k,
            reason: "tau_k exceeds 64 bits".into(),
        });
    }
    let k = k as u64;
    let value = if k % 2 == 1 {
        let big_k = k.div_ceil(2);
        7 * (1u64 << (2 * big_k - 3)) - 2 * ((1u64 << (2 * (big_k - 2))) - 1) / 3
    } else {
        let big_k = k / 2;
        7 * (1u64 << (2 * big_k - 2)) - ((1u64 << (2 * (big_k - 1))) - 1) / 3
    };
    Ok(value)
}

/// Valuations of consecutive coefficients starting at a base degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValuationProfile {
    pub base_degree: u32,
    pub vals: Vec<Valuation>,
}

/// `vals[M] = nu_2(coefficient of xi^(base + M))` for `M < window`.
pub fn profile(p: &XiPoly, base: u32, window: usize) -> ValuationProfile {
    ValuationProfile {
        base_degree: base,
        vals: (0..window as u32)
            .map(|m| nu2(&p.coeff(base + m)))
            .collect(),
    }
}

/// `min(DEFAULT_WINDOW, offsets up to the top degree)`.
pub fn default_window(p: &XiPoly, base: u32) -> usize {
    let remaining = p
        .degree()
        .map_or(0, |d| (d as usize + 1).saturating_sub(base as usize));
    remaining.min(DEFAULT_WINDOW)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_ok(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileFamily {
    /// coefficients `Z_{i,j}(m)` of `zeta(i, j)`
    Zeta,
    /// coefficients `F_k(m)` of `Phi_k`
    Phi,
}

/// Outcome of a profile check. `vals` covers every degree from
/// `base_degree` to the top of the polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileReport {
    pub family: ProfileFamily,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub i: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub j: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<u32>,
    pub base_degree: u32,
    pub vals: Vec<Valuation>,
    pub verdict: Verdict,
    /// One line per violated condition; empty on pass.
    #[serde(default)]
    pub failures: Vec<String>,
}

/// Whether `(i, j)` falls under the `Z`-profile theorems: `j` in `{0, 1}`
/// for any `i`, or `i = 2^k` with `k >= 2` and any `j`.
pub fn z_family_covered(i: u32, j: u32) -> bool {
    j <= 1 || (i >= 4 && i.is_power_of_two())
}

/// Residue classes where the offset-1 valuation is exactly 1.
fn offset_one_is_sharp(i: u32, j: u32) -> bool {
    match j {
        0 => i % 4 == 2,
        1 => i % 4 == 1,
        _ => j % 4 == 2,
    }
}

/// Checks `zeta(i, j)` against its valuation profile: least degree `d_min`
/// with an odd coefficient, offset 1 exactly 1 in the sharp residue class and
/// `>= 2` elsewhere, offset `M >= 2` at least `M + 1`.
pub fn check_z_profile(i: u32, j: u32) -> Result<ProfileReport> {
    if !z_family_covered(i, j) {
        return Err(Error::UncoveredZFamily { i, j });
    }
    Ok(z_profile_of(&xipoly::zeta(i, j), i, j))
}

fn z_profile_of(p: &XiPoly, i: u32, j: u32) -> ProfileReport {
    let d = d_min(i as u64, j as u64) as u32;
    let top = p.degree().unwrap_or(d).max(d);
    let prof = profile(p, d, (top - d + 1) as usize);
    let mut failures = Vec::new();

    if p.min_degree() != Some(d) {
        failures.push(format!(
            "least degree is {:?}, expected {d}",
            p.min_degree()
        ));
    }
    if prof.vals[0] != Valuation::Finite(0) {
        failures.push(format!("offset 0 valuation {} != 0", prof.vals[0]));
    }
    let v1 = prof.vals.get(1).copied().unwrap_or(Valuation::Infinite);
    if offset_one_is_sharp(i, j) {
        if v1 != Valuation::Finite(1) {
            failures.push(format!("offset 1 valuation {v1} != 1"));
        }
    } else if !v1.at_least(2) {
        failures.push(format!("offset 1 valuation {v1} < 2"));
    }
    for (m, v) in prof.vals.iter().enumerate().skip(2) {
        if !v.at_least(m as u64 + 1) {
            failures.push(format!("offset {m} valuation {v} < {}", m + 1));
        }
    }

    ProfileReport {
        family: ProfileFamily::Zeta,
        i: Some(i),
        j: Some(j),
        k: None,
        base_degree: d,
        vals: prof.vals,
        verdict: Verdict::from_ok(failures.is_empty()),
        failures,
    }
}

/// [`check_f_profile_bounded`] with `max_k = DEFAULT_MAX_PHI_INDEX`.
pub fn check_f_profile(k: u32) -> Result<ProfileReport> {
    check_f_profile_bounded(k, DEFAULT_MAX_PHI_INDEX)
}

/// Checks `Phi_k` for odd `k = 2K + 1`: no terms below `tau_k`,
/// `nu(F_k(tau_k)) >= 2K + 3`, `nu(F_k(tau_k + M)) >= 2K + M + 2` for
/// `M >= 1`, and a vanishing `q`-constant term (the coefficients sum to 0).
pub fn check_f_profile_bounded(k: u32, max_k: u32) -> Result<ProfileReport> {
    if k < 3 || k.is_multiple_of(2) {
        return Err(Error::IndexOutOfRange {
            k,
            reason: "Phi profile checks need odd k >= 3".into(),
        });
    }
    if k > max_k {
        return Err(Error::IndexOutOfRange {
            k,
            reason: format!("above the configured bound {max_k}"),
        });
    }
    let p = xipoly::phi_poly(k)?;
    Ok(f_profile_of(&p, k))
}

fn f_profile_of(p: &XiPoly, k: u32) -> ProfileReport {
    let big_k = ((k - 1) / 2) as u64;
    let t = tau(k).expect("k validated") as u32;
    let top = p.degree().unwrap_or(t).max(t);
    let prof = profile(p, t, (top - t + 1) as usize);
    let mut failures = Vec::new();

    if let Some(low) = p.min_degree().filter(|&d| d < t) {
        failures.push(format!("nonzero coefficient at degree {low} < tau = {t}"));
    }
    if !prof.vals[0].at_least(2 * big_k + 3) {
        failures.push(format!(
            "offset 0 valuation {} < {}",
            prof.vals[0],
            2 * big_k + 3
        ));
    }
    for (m, v) in prof.vals.iter().enumerate().skip(1) {
        let need = 2 * big_k + m as u64 + 2;
        if !v.at_least(need) {
            failures.push(format!("offset {m} valuation {v} < {need}"));
        }
    }
    let constant: BigInt = p.terms().map(|(_, c)| c).sum();
    if !constant.is_zero() {
        failures.push(format!("q-constant term is {constant}, expected 0"));
    }

    ProfileReport {
        family: ProfileFamily::Phi,
        i: None,
        j: None,
        k: Some(k),
        base_degree: t,
        vals: prof.vals,
        verdict: Verdict::from_ok(failures.is_empty()),
        failures,
    }
}

/// Offsets shown explicitly in a valuation table row before the tail bound.
pub const TABLE_HEAD: usize = 3;

/// One row of the `nu(F_k(tau_k + M))` table: exact head values, then the
/// largest `c` with `nu >= M + c` for every remaining offset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub k: u32,
    pub tau: u64,
    pub head: Vec<Valuation>,
    /// `None` when no coefficient lies beyond the head.
    pub tail_offset: Option<i64>,
}

pub fn valuation_table(ks: &[u32], max_k: u32) -> Result<Vec<TableRow>> {
    ks.iter()
        .map(|&k| {
            let report = check_f_profile_bounded(k, max_k)?;
            let tail_offset = report
                .vals
                .iter()
                .enumerate()
                .skip(TABLE_HEAD)
                .filter_map(|(m, v)| v.finite().map(|v| v as i64 - m as i64))
                .min();
            Ok(TableRow {
                k,
                tau: report.base_degree as u64,
                head: report.vals.iter().take(TABLE_HEAD).copied().collect(),
                tail_offset,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(n: u64) -> Valuation {
        Valuation::Finite(n)
    }

    #[test]
    fn nu2_values() {
        assert_eq!(nu2(&BigInt::zero()), Valuation::Infinite);
        assert_eq!(nu2(&BigInt::from(12)), v(2));
        assert_eq!(nu2(&BigInt::from(34012224)), v(6));
        assert_eq!(nu2(&BigInt::from(-7)), v(0));
        assert_eq!(nu2(&(BigInt::from(1) << 200)), v(200));
    }

    #[test]
    fn valuation_order_and_wire() {
        assert!(Valuation::Infinite > v(u64::MAX));
        assert!(Valuation::Infinite.at_least(1 << 40));
        assert_eq!(
            serde_json::to_string(&vec![v(3), Valuation::Infinite]).unwrap(),
            r#"[3,"inf"]"#
        );
        let back: Vec<Valuation> = serde_json::from_str(r#"[3,"inf"]"#).unwrap();
        assert_eq!(back, vec![v(3), Valuation::Infinite]);
        assert!(serde_json::from_str::<Valuation>(r#""nan""#).is_err());
    }

    #[test]
    fn d_min_cases() {
        assert_eq!(d_min(0, 0), 0);
        assert_eq!(d_min(1, 0), 3);
        assert_eq!(d_min(2, 0), 5);
        assert_eq!(d_min(0, 1), 1);
        assert_eq!(d_min(1, 1), 3);
        assert_eq!(d_min(3, 3), 9);
    }

    #[test]
    fn tau_values() {
        assert_eq!(tau(3).unwrap(), 14);
        assert_eq!(tau(4).unwrap(), 27);
        assert_eq!(tau(5).unwrap(), 54);
        assert!(tau(2).is_err());
        assert!(tau(61).is_err());
        for big_k in 2..=8u32 {
            assert_eq!(tau(2 * big_k - 1).unwrap() % 4, 2);
            assert_eq!(tau(2 * big_k).unwrap() % 4, 3);
        }
    }

    #[test]
    fn degree_shift_laws() {
        for big_k in [2u32, 3] {
            let t2 = tau(2 * big_k - 1).unwrap();
            let t1 = tau(2 * big_k).unwrap();
            let t0 = tau(2 * big_k + 1).unwrap();
            for m in 0..=6u64 {
                assert_eq!(d_min(1 << (2 * big_k - 1), t2 + m), t1 + m.div_ceil(2));
                assert_eq!(d_min(1 << (2 * big_k), t1 + m), t0 + m / 2);
            }
        }
    }

    #[test]
    fn profiles() {
        let p3 = xipoly::phi_poly(3).unwrap();
        assert_eq!(profile(&p3, 14, 3).vals, vec![v(6), v(6), v(7)]);
        assert_eq!(profile(&xipoly::zeta(1, 0), 3, 1).vals, vec![v(0)]);
        let zero = profile(&XiPoly::zero(), 0, 4);
        assert!(zero.vals.iter().all(|x| x.is_infinite()));
        assert_eq!(default_window(&p3, 14), 10);
        assert_eq!(default_window(&p3, 20), 5);
        assert_eq!(default_window(&XiPoly::zero(), 0), 0);
    }

    #[test]
    fn z_profiles() {
        let r = check_z_profile(6, 0).unwrap();
        assert!(r.verdict.passed(), "{:?}", r.failures);
        assert_eq!(r.vals[1], v(1));
        let r = check_z_profile(4, 2).unwrap();
        assert!(r.verdict.passed(), "{:?}", r.failures);
        assert_eq!(r.vals[1], v(1));
        let r = check_z_profile(0, 0).unwrap();
        assert!(r.verdict.passed());
        assert_eq!(r.vals, vec![v(0)]);
        assert!(matches!(
            check_z_profile(3, 2),
            Err(Error::UncoveredZFamily { i: 3, j: 2 })
        ));
        assert!(check_z_profile(2, 5).is_err());
    }

    #[test]
    fn z_profile_rejects_wrong_shapes() {
        // an even leading coefficient and a missing sharp offset-1 value
        let bad = XiPoly::from_terms([(5u32, 2i64), (6, 4)]);
        let r = z_profile_of(&bad, 2, 0);
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.failures.len(), 2);
    }

    #[test]
    fn f_profiles() {
        let r = check_f_profile(3).unwrap();
        assert!(r.verdict.passed(), "{:?}", r.failures);
        assert_eq!(&r.vals[..3], &[v(6), v(6), v(7)]);
        let r = check_f_profile(5).unwrap();
        assert!(r.verdict.passed(), "{:?}", r.failures);
        assert_eq!(&r.vals[..3], &[v(7), v(7), v(9)]);
        assert!(check_f_profile(4).is_err());
        assert!(check_f_profile(7).is_err());
        assert!(check_f_profile(1).is_err());
    }

    #[test]
    fn f_profile_flags_low_terms_and_constant() {
        let bad = XiPoly::from_terms([(13u32, 1i64), (14, 64)]);
        let r = f_profile_of(&bad, 3);
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(r.failures.iter().any(|f| f.contains("degree 13")));
        assert!(r.failures.iter().any(|f| f.contains("constant")));
    }

    #[test]
    fn table_rows() {
        let rows = valuation_table(&[3, 5], 5).unwrap();
        assert_eq!(rows[0].head, vec![v(6), v(6), v(7)]);
        assert_eq!(rows[0].tail_offset, Some(4));
        assert_eq!(rows[1].head, vec![v(7), v(7), v(9)]);
        assert_eq!(rows[1].tail_offset, Some(8));
        assert!(valuation_table(&[], 5).unwrap().is_empty());
    }

    #[test]
    fn report_json_round_trip() {
        let r = check_f_profile(3).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<ProfileReport>(&json).unwrap(), r);
    }

    proptest! {
        #[test]
        fn addition_lemma(a in -1_000_000i64..1_000_000, b in -1_000_000i64..1_000_000, s in 0u32..20) {
            let a = BigInt::from(a) << s;
            let b = BigInt::from(b);
            let (va, vb, vs) = (nu2(&a), nu2(&b), nu2(&(&a + &b)));
            prop_assert!(vs >= va.min(vb));
            if va != vb {
                prop_assert_eq!(vs, va.min(vb));
            } else if let Some(x) = va.finite() {
                prop_assert!(vs.at_least(x + 1));
            }
        }
    }
}
