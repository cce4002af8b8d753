//! Truncated formal power series in `q` with exact integer coefficients.
//!
//! A [`Series`] knows the coefficients of `q^0 .. q^(order-1)` and nothing
//! beyond. Binary operations truncate to the smaller order of their operands,
//! so no coefficient is ever produced from missing data.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Truncation order used by verification runs unless overridden.
pub const DEFAULT_ORDER: usize = 300;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Series {
    coeffs: Vec<BigInt>,
}

/// A sparse series `1 + sum c_t q^(e_t)` with small integer coefficients and
/// all exponents `e_t >= 1`. Products and quotients by such a factor run in
/// `O(order * terms)` instead of `O(order^2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseUnit {
    terms: Vec<(usize, i64)>,
}

impl SparseUnit {
    /// Builds the factor from `(exponent, coefficient)` pairs. Exponent 0 is
    /// rejected because the constant term is fixed at 1.
    pub fn new(mut terms: Vec<(usize, i64)>) -> Result<Self> {
        if terms.iter().any(|&(e, _)| e == 0) {
            return Err(Error::InvalidArgument(
                "sparse unit terms must have exponent >= 1".into(),
            ));
        }
        terms.retain(|&(_, c)| c != 0);
        terms.sort_unstable_by_key(|&(e, _)| e);
        Ok(SparseUnit { terms })
    }

    pub fn terms(&self) -> &[(usize, i64)] {
        &self.terms
    }

    /// Substitutes `q -> q^k`.
    pub fn dilate(&self, k: usize) -> SparseUnit {
        SparseUnit {
            terms: self.terms.iter().map(|&(e, c)| (e * k, c)).collect(),
        }
    }
}

impl Series {
    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Self {
        Series { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Series {
            coeffs: coeffs.iter().map(|&c| BigInt::from(c)).collect(),
        }
    }

    pub fn zero(order: usize) -> Self {
        Series {
            coeffs: vec![BigInt::zero(); order],
        }
    }

    /// The constant 1, known to `order` coefficients. An order-0 result is
    /// the empty series.
    pub fn one(order: usize) -> Self {
        let mut s = Series::zero(order);
        if let Some(c) = s.coeffs.first_mut() {
            *c = BigInt::one();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    /// Coefficient of `q^n`, or `None` beyond the truncation order.
    pub fn coeff(&self, n: usize) -> Option<&BigInt> {
        self.coeffs.get(n)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn truncate(&self, order: usize) -> Series {
        Series {
            coeffs: self.coeffs[..order.min(self.order())].to_vec(),
        }
    }

    pub fn add(&self, other: &Series) -> Series {
        let order = self.order().min(other.order());
        Series {
            coeffs: (0..order)
                .map(|n| &self.coeffs[n] + &other.coeffs[n])
                .collect(),
        }
    }

    pub fn sub(&self, other: &Series) -> Series {
        let order = self.order().min(other.order());
        Series {
            coeffs: (0..order)
                .map(|n| &self.coeffs[n] - &other.coeffs[n])
                .collect(),
        }
    }

    pub fn neg(&self) -> Series {
        Series {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Series {
        Series {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Cauchy product truncated to the shared order.
    pub fn mul(&self, other: &Series) -> Series {
        let order = self.order().min(other.order());
        // Iterate over the sparser operand; dilated series are mostly zeros.
        let (sparse, dense) = if self.nonzero_count(order) <= other.nonzero_count(order) {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = vec![BigInt::zero(); order];
        for (i, a) in sparse.coeffs[..order].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in dense.coeffs[..order - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Series { coeffs: out }
    }

    pub fn square(&self) -> Series {
        self.mul(self)
    }

    fn nonzero_count(&self, order: usize) -> usize {
        self.coeffs[..order].iter().filter(|c| !c.is_zero()).count()
    }

    /// Multiplicative inverse; the constant term must be `+1` or `-1`.
    pub fn invert(&self) -> Result<Series> {
        let order = self.order();
        if order == 0 {
            return Ok(Series::zero(0));
        }
        let c0 = &self.coeffs[0];
        if !(c0.abs().is_one()) {
            return Err(Error::NotInvertible(c0.to_string()));
        }
        let support: Vec<(usize, &BigInt)> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, c)| !c.is_zero())
            .collect();
        let mut out: Vec<BigInt> = Vec::with_capacity(order);
        out.push(c0.clone());
        for n in 1..order {
            let mut acc = BigInt::zero();
            for &(k, a) in &support {
                if k > n {
                    break;
                }
                acc += a * &out[n - k];
            }
            // 1/c0 == c0 for a unit
            out.push(if c0.is_positive() { -acc } else { acc });
        }
        Ok(Series { coeffs: out })
    }

    /// Integer power by repeated squaring. Negative exponents invert first.
    pub fn pow(&self, e: i64) -> Result<Series> {
        let base = if e < 0 { self.invert()? } else { self.clone() };
        let mut exp = e.unsigned_abs();
        let mut result = Series::one(self.order());
        let mut square = base;
        while exp > 0 {
            if exp & 1 == 1 {
                result = result.mul(&square);
            }
            exp >>= 1;
            if exp > 0 {
                square = square.square();
            }
        }
        Ok(result)
    }

    /// Substitutes `q -> q^k`, keeping the same order.
    pub fn dilate(&self, k: usize) -> Result<Series> {
        if k == 0 {
            return Err(Error::InvalidArgument(
                "dilation factor must be >= 1".into(),
            ));
        }
        let order = self.order();
        let mut out = vec![BigInt::zero(); order];
        for (n, c) in self.coeffs.iter().enumerate() {
            match n.checked_mul(k) {
                Some(m) if m < order => out[m] = c.clone(),
                _ => break,
            }
        }
        Ok(Series { coeffs: out })
    }

    /// The degree-2 unitizing operator: keeps the even-index coefficients.
    /// The result has order `ceil(order / 2)`.
    pub fn u2(&self) -> Series {
        Series {
            coeffs: self.coeffs.iter().step_by(2).cloned().collect(),
        }
    }

    /// General unitizing operator `sum a_n q^n -> sum a_(p n) q^n`.
    pub fn unitize(&self, p: usize) -> Result<Series> {
        if p == 0 {
            return Err(Error::InvalidArgument(
                "unitizing degree must be >= 1".into(),
            ));
        }
        Ok(Series {
            coeffs: self.coeffs.iter().step_by(p).cloned().collect(),
        })
    }

    /// Substitutes `q -> -q`.
    pub fn alternate(&self) -> Series {
        Series {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| if n % 2 == 1 { -c } else { c.clone() })
                .collect(),
        }
    }

    /// In-place product with a sparse unit factor.
    pub fn mul_sparse_unit(&mut self, f: &SparseUnit) {
        let order = self.order();
        // Descending so every read of index n - e still sees the old value.
        for n in (1..order).rev() {
            let mut acc = BigInt::zero();
            for &(e, c) in f.terms() {
                if e > n {
                    break;
                }
                add_small_multiple(&mut acc, &self.coeffs[n - e], c);
            }
            self.coeffs[n] += acc;
        }
    }

    /// In-place quotient by a sparse unit factor.
    pub fn div_sparse_unit(&mut self, f: &SparseUnit) {
        let order = self.order();
        for n in 1..order {
            let mut acc = BigInt::zero();
            for &(e, c) in f.terms() {
                if e > n {
                    break;
                }
                add_small_multiple(&mut acc, &self.coeffs[n - e], c);
            }
            self.coeffs[n] -= acc;
        }
    }
}

#[inline]
fn add_small_multiple(acc: &mut BigInt, x: &BigInt, c: i64) {
    match c {
        1 => *acc += x,
        -1 => *acc -= x,
        _ => *acc += x * c,
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series(order={}, ", self.order())?;
        fmt::Display::fmt(self, f)?;
        write!(f, ")")
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if wrote {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            let mag = c.abs();
            match (n, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "q")?,
                (1, false) => write!(f, "{mag}q")?,
                (_, true) => write!(f, "q^{n}")?,
                (_, false) => write!(f, "{mag}q^{n}")?,
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.order())
    }
}

impl Add for &Series {
    type Output = Series;
    fn add(self, rhs: &Series) -> Series {
        Series::add(self, rhs)
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, rhs: &Series) -> Series {
        Series::sub(self, rhs)
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, rhs: &Series) -> Series {
        Series::mul(self, rhs)
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        Series::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(c: &[i64]) -> Series {
        Series::from_i64s(c)
    }

    /// Naive product of (1 - q^n) for n < order.
    fn euler_naive(order: usize) -> Series {
        let mut acc = Series::one(order);
        for n in 1..order {
            let mut f = vec![0i64; order];
            f[0] = 1;
            f[n] = -1;
            acc = acc.mul(&s(&f));
        }
        acc
    }

    #[test]
    fn add_cancels_and_truncates() {
        assert_eq!(s(&[1, 1]).add(&s(&[1, -1])), s(&[2, 0]));
        assert_eq!(Series::zero(3).add(&s(&[4, 5, 6, 7])), s(&[4, 5, 6]));
        let e = euler_naive(10);
        assert_eq!(e.add(&e.neg()), Series::zero(10));
    }

    #[test]
    fn mul_basic() {
        assert_eq!(s(&[1, 1, 0]).mul(&s(&[1, -1, 0])), s(&[1, 0, -1]));
        let e = euler_naive(20);
        assert_eq!(e.mul(&e.invert().unwrap()), Series::one(20));
    }

    #[test]
    fn order_zero_absorbs() {
        let z = Series::zero(0);
        assert_eq!(z.mul(&s(&[1, 2, 3])).order(), 0);
        assert_eq!(z.invert().unwrap().order(), 0);
        assert_eq!(z.u2().order(), 0);
    }

    #[test]
    fn invert_geometric_and_partitions() {
        assert_eq!(s(&[1, -1, 0, 0, 0]).invert().unwrap(), s(&[1, 1, 1, 1, 1]));
        assert_eq!(s(&[1]).invert().unwrap(), s(&[1]));
        assert_eq!(euler_naive(6).invert().unwrap(), s(&[1, 1, 2, 3, 5, 7]));
        assert_eq!(s(&[-1, 1]).invert().unwrap(), s(&[-1, -1]));
    }

    #[test]
    fn invert_rejects_non_units() {
        assert!(matches!(s(&[2, 1]).invert(), Err(Error::NotInvertible(_))));
        assert!(s(&[0, 1]).invert().is_err());
        assert!(s(&[3, 1]).pow(-1).is_err());
    }

    #[test]
    fn pow_values() {
        assert_eq!(s(&[1, 1, 0]).pow(2).unwrap(), s(&[1, 2, 1]));
        let x = s(&[1, 3, -2, 5]);
        assert_eq!(x.pow(1).unwrap(), x);
        assert_eq!(x.pow(0).unwrap(), Series::one(4));
        assert_eq!(x.pow(-2).unwrap().mul(&x.pow(2).unwrap()), Series::one(4));
        assert_eq!(x.pow(5).unwrap(), x.mul(&x).mul(&x).mul(&x).mul(&x));
    }

    #[test]
    fn dilate_and_u2() {
        assert_eq!(s(&[1, 1, 0]).dilate(2).unwrap(), s(&[1, 0, 1]));
        let x = s(&[1, 2, 3, 4]);
        assert_eq!(x.dilate(1).unwrap(), x);
        assert!(x.dilate(0).is_err());
        assert_eq!(x.u2(), s(&[1, 3]));
        assert_eq!(s(&[1, 2, 3, 4, 5]).u2(), s(&[1, 3, 5]));
        assert_eq!(x.unitize(3).unwrap(), s(&[1, 4]));
    }

    #[test]
    fn alternate_flips_odd() {
        assert_eq!(s(&[1, 1, 1]).alternate(), s(&[1, -1, 1]));
    }

    #[test]
    fn sparse_unit_matches_dense() {
        let f = SparseUnit::new(vec![(1, -1), (2, -1), (5, 1), (7, 1)]).unwrap();
        let dense = s(&[1, -1, -1, 0, 0, 1, 0, 1, 0, 0]);
        let x = s(&[1, 4, -3, 2, 0, 7, 1, 1, -9, 2]);
        let mut m = x.clone();
        m.mul_sparse_unit(&f);
        assert_eq!(m, x.mul(&dense));
        let mut d = x.clone();
        d.div_sparse_unit(&f);
        assert_eq!(d, x.mul(&dense.invert().unwrap()));
        assert!(SparseUnit::new(vec![(0, 1)]).is_err());
        assert_eq!(f.dilate(3).terms()[0], (3, -1));
    }

    #[test]
    fn display() {
        assert_eq!(s(&[1, -1, 0, 2]).to_string(), "1 - q + 2q^3 + O(q^4)");
        assert_eq!(Series::zero(2).to_string(), "0 + O(q^2)");
    }

    fn series_strategy(order: usize) -> impl Strategy<Value = Series> {
        prop::collection::vec(-50i64..50, order).prop_map(|v| Series::from_i64s(&v))
    }

    fn unit_strategy(order: usize) -> impl Strategy<Value = Series> {
        (any::<bool>(), prop::collection::vec(-50i64..50, order - 1)).prop_map(|(neg, mut v)| {
            v.insert(0, if neg { -1 } else { 1 });
            Series::from_i64s(&v)
        })
    }

    proptest! {
        #[test]
        fn mul_commutative_associative(a in series_strategy(24), b in series_strategy(20), c in series_strategy(22)) {
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b).order(), 20);
        }

        #[test]
        fn invert_is_two_sided(a in unit_strategy(30)) {
            let inv = a.invert().unwrap();
            prop_assert_eq!(a.mul(&inv), Series::one(30));
            prop_assert_eq!(inv.mul(&a), Series::one(30));
        }

        #[test]
        fn u2_undoes_dilate(a in series_strategy(31)) {
            let back = a.dilate(2).unwrap().u2();
            prop_assert_eq!(back, a.truncate(16));
        }

        #[test]
        fn even_part_identity(a in series_strategy(33)) {
            let lhs = a.add(&a.alternate());
            let two = BigInt::from(2);
            let rhs = a.u2().dilate(2).unwrap().scale(&two);
            prop_assert_eq!(lhs.truncate(rhs.order()), rhs);
            prop_assert_eq!(a.alternate().alternate(), a);
        }
    }
}
