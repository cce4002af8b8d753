//! Finite-window verification of congruences between PDO values.
//!
//! A check never claims more than it looked at: every report carries its
//! window and the truncation order of the table it was read from.

use std::ops::Range;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::etaq::PdoTable;
use crate::padic::{nu2, Valuation, Verdict};

/// `PDO(lhs_stride * n + lhs_offset) == PDO(rhs_stride * n) (mod modulus)`
/// for every `n` in `n_range`. With `rhs_stride = None` the right side is 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceSpec {
    pub lhs_stride: u64,
    #[serde(default)]
    pub lhs_offset: u64,
    pub rhs_stride: Option<u64>,
    #[serde(with = "decimal")]
    pub modulus: BigInt,
    #[serde(rename = "window")]
    pub n_range: Window,
}

/// Half-open window `start <= n < end`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub start: u64,
    pub end: u64,
}

impl Window {
    pub fn new(start: u64, end: u64) -> Self {
        Window { start, end }
    }

    /// `0 <= n <= n_max`.
    pub fn through(n_max: u64) -> Self {
        Window::new(0, n_max + 1)
    }

    pub fn range(self) -> Range<u64> {
        self.start..self.end
    }

    pub fn is_empty(self) -> bool {
        self.end <= self.start
    }
}

impl CongruenceSpec {
    /// Internal congruence `PDO(a n) == PDO(b n) (mod m)`.
    pub fn internal(
        lhs_stride: u64,
        rhs_stride: u64,
        modulus: impl Into<BigInt>,
        window: Window,
    ) -> Result<Self> {
        Self::validated(CongruenceSpec {
            lhs_stride,
            lhs_offset: 0,
            rhs_stride: Some(rhs_stride),
            modulus: modulus.into(),
            n_range: window,
        })
    }

    /// Vanishing congruence `PDO(a n + r) == 0 (mod m)`.
    pub fn vanishing(
        stride: u64,
        offset: u64,
        modulus: impl Into<BigInt>,
        window: Window,
    ) -> Result<Self> {
        Self::validated(CongruenceSpec {
            lhs_stride: stride,
            lhs_offset: offset,
            rhs_stride: None,
            modulus: modulus.into(),
            n_range: window,
        })
    }

    fn validated(spec: CongruenceSpec) -> Result<Self> {
        if spec.lhs_stride == 0 || spec.rhs_stride == Some(0) {
            return Err(Error::InvalidArgument("strides must be >= 1".into()));
        }
        if spec.modulus < BigInt::from(2) {
            return Err(Error::InvalidArgument("modulus must be >= 2".into()));
        }
        Ok(spec)
    }

    fn lhs_index(&self, n: u64) -> Option<usize> {
        n.checked_mul(self.lhs_stride)?
            .checked_add(self.lhs_offset)?
            .try_into()
            .ok()
    }

    fn rhs_index(&self, n: u64) -> Option<Option<usize>> {
        match self.rhs_stride {
            None => Some(None),
            Some(s) => n.checked_mul(s)?.try_into().ok().map(Some),
        }
    }

    /// Table length needed to evaluate every `n` in the window.
    pub fn required_order(&self) -> Result<usize> {
        if self.n_range.is_empty() {
            return Ok(0);
        }
        let last = self.n_range.end - 1;
        let overflow = || Error::InvalidArgument("window index overflows".into());
        let lhs = self.lhs_index(last).ok_or_else(overflow)?;
        let rhs = self.rhs_index(last).ok_or_else(overflow)?.unwrap_or(0);
        Ok(lhs.max(rhs) + 1)
    }
}

/// The least failing `n` with both sides as read from the table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub n: u64,
    #[serde(with = "decimal")]
    pub lhs: BigInt,
    #[serde(with = "decimal")]
    pub rhs: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceReport {
    #[serde(flatten)]
    pub spec: CongruenceSpec,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub counterexample: Option<Counterexample>,
    pub checked_count: u64,
    pub truncation_order: usize,
}

impl CongruenceReport {
    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }
}

fn ensure_covers(spec: &CongruenceSpec, table: &PdoTable) -> Result<()> {
    let required = spec.required_order()?;
    if table.len() < required {
        return Err(Error::TableTooShort {
            required,
            available: table.len(),
        });
    }
    Ok(())
}

/// Checks `spec` for every `n` in its window and reports the least
/// counterexample, if any.
pub fn verify(spec: &CongruenceSpec, table: &PdoTable) -> Result<CongruenceReport> {
    ensure_covers(spec, table)?;
    let values = table.values();
    let zero = BigInt::zero();
    let mut counterexample = None;
    let mut checked = 0u64;
    for n in spec.n_range.range() {
        let lhs = &values[spec.lhs_index(n).expect("covered")];
        let rhs = match spec.rhs_index(n).expect("covered") {
            Some(idx) => &values[idx],
            None => &zero,
        };
        checked += 1;
        if !(lhs - rhs).is_multiple_of(&spec.modulus) {
            counterexample = Some(Counterexample {
                n,
                lhs: lhs.clone(),
                rhs: rhs.clone(),
            });
            break;
        }
    }
    Ok(CongruenceReport {
        spec: spec.clone(),
        verdict: Verdict::from_ok(counterexample.is_none()),
        counterexample,
        checked_count: checked,
        truncation_order: table.len(),
    })
}

fn pow2(e: u32) -> BigInt {
    BigInt::from(1) << e
}

/// `PDO(2^(2k+3) n) == PDO(2^(2k+1) n) (mod 2^(2k+3))` for `0 <= n <= n_max`.
pub fn verify_main(k: u32, n_max: u64, table: &PdoTable) -> Result<CongruenceReport> {
    let spec = CongruenceSpec::internal(
        1 << (2 * k + 3),
        1 << (2 * k + 1),
        pow2(2 * k + 3),
        Window::through(n_max),
    )?;
    verify(&spec, table)
}

/// `PDO(2^(2k+4) n) == PDO(2^(2k+2) n) (mod 2^(2k+3))` for `0 <= n <= n_max`.
pub fn verify_corollary(k: u32, n_max: u64, table: &PdoTable) -> Result<CongruenceReport> {
    let spec = CongruenceSpec::internal(
        1 << (2 * k + 4),
        1 << (2 * k + 2),
        pow2(2 * k + 3),
        Window::through(n_max),
    )?;
    verify(&spec, table)
}

/// `PDO(32 n) == PDO(8 n) (mod 64)` and `PDO(128 n) == PDO(32 n) (mod 128)`
/// for `0 <= n <= n_max`.
pub fn verify_strengthened(
    n_max: u64,
    table: &PdoTable,
) -> Result<(CongruenceReport, CongruenceReport)> {
    let window = Window::through(n_max);
    let first = CongruenceSpec::internal(32, 8, 64, window)?;
    let second = CongruenceSpec::internal(128, 32, 128, window)?;
    Ok((verify(&first, table)?, verify(&second, table)?))
}

/// For each `alpha <= alpha_max`: `PDO(2^alpha (4n+3)) == 0 (mod 4)` and
/// `PDO(2^alpha (8n+7)) == 0 (mod 8)` over `n < n_max`. Reports come in
/// order `(alpha, mod 4), (alpha, mod 8)` for increasing `alpha`.
pub fn verify_ramanujan(
    alpha_max: u32,
    n_max: u64,
    table: &PdoTable,
) -> Result<Vec<CongruenceReport>> {
    let window = Window::new(0, n_max);
    let mut reports = Vec::new();
    for alpha in 0..=alpha_max {
        let scale = 1u64 << alpha;
        for (stride, offset, modulus) in [(4u64, 3u64, 4u32), (8, 7, 8)] {
            let spec = CongruenceSpec::vanishing(stride * scale, offset * scale, modulus, window)?;
            reports.push(verify(&spec, table)?);
        }
    }
    Ok(reports)
}

/// Result of scanning one stride pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanResult {
    pub lhs_stride: u64,
    pub rhs_stride: u64,
    /// Largest `e <= max_exponent` with the congruence holding mod `2^e`
    /// everywhere in the window; 0 when it already fails mod 2.
    pub exponent: u32,
    pub window: Window,
    pub truncation_order: usize,
}

/// For each `(a, b)`, the largest `e <= max_exponent` such that
/// `PDO(a n) == PDO(b n) (mod 2^e)` on the whole window.
pub fn scan(
    table: &PdoTable,
    stride_pairs: &[(u64, u64)],
    max_exponent: u32,
    window: Window,
) -> Result<Vec<ScanResult>> {
    let values = table.values();
    stride_pairs
        .iter()
        .map(|&(a, b)| {
            // modulus is irrelevant to the coverage check
            let probe = CongruenceSpec::internal(a, b, 2, window)?;
            ensure_covers(&probe, table)?;
            let mut best = Valuation::Finite(max_exponent as u64);
            for n in window.range() {
                let diff = &values[(a * n) as usize] - &values[(b * n) as usize];
                best = best.min(nu2(&diff));
                if best == Valuation::Finite(0) {
                    break;
                }
            }
            Ok(ScanResult {
                lhs_stride: a,
                rhs_stride: b,
                exponent: best.finite().unwrap_or(max_exponent as u64) as u32,
                window,
                truncation_order: table.len(),
            })
        })
        .collect()
}

/// Big integers as decimal strings on the wire.
mod decimal {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
