//! Arbitrary-precision arithmetic with explicit absolute error bounds.
//!
//! Every analytic quantity in the pipeline is a [`BigReal`]: an MPFR value
//! paired with a rigorous bound on the distance to the true result. The
//! bound is propagated forward through every operation (first-order input
//! propagation plus the rounding of the operation itself, inflated by a
//! fixed safety factor), so a `BigReal` always satisfies
//! `|true - value| <= err`.

mod complex;
mod contfrac;
mod roots;

pub use complex::BigComplex;
pub use contfrac::{continued_fraction_expand, ContinuedFraction};
pub use roots::{brent_root, find_roots_of_derivative};

use crate::error::{Error, Result};
use rug::float::{Constant, Round};
use rug::ops::Pow;
#[allow(unused_imports)]
use rug::ops::Pow as _;
use rug::{Float, Integer, Rational};
use std::cmp::Ordering;
use std::fmt;

/// Precision (in bits) of the stored error bounds. Error bounds only need
/// a couple of significant digits; MPFR's unbounded exponent keeps them
/// meaningful even when they are astronomically small.
pub(crate) const ERR_PREC: u32 = 32;

/// Safety factor applied on top of first-order error propagation.
const SAFETY: f64 = 1.01;

/// Arithmetic context fixing the working precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Prec(u32);

impl Prec {
    /// Create a context. Precisions below 64 bits are rejected.
    pub fn new(bits: u32) -> Result<Prec> {
        if bits < 64 {
            return Err(Error::InvalidInput(format!(
                "precision must be at least 64 bits, got {bits}"
            )));
        }
        Ok(Prec(bits))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn double(self) -> Prec {
        Prec(self.0 * 2)
    }

    pub fn int(self, n: i64) -> BigReal {
        BigReal::exact(Float::with_val(self.0, n))
    }

    pub fn integer(self, n: &Integer) -> BigReal {
        let v = Float::with_val(self.0, n);
        if v.to_integer_round(Round::Zero).map(|(i, _)| i == *n) == Some(true) {
            BigReal::exact(v)
        } else {
            let e = ulp(&v);
            BigReal { val: v, err: e }
        }
    }

    pub fn rational(self, r: &Rational) -> BigReal {
        let v = Float::with_val(self.0, r);
        let e = if Rational::from(v.to_rational().unwrap_or_default()) == *r {
            zero_err()
        } else {
            ulp(&v)
        };
        BigReal { val: v, err: e }
    }

    pub fn ratio(self, num: i64, den: i64) -> BigReal {
        self.rational(&Rational::from((num, den)))
    }

    pub fn from_f64(self, x: f64) -> BigReal {
        BigReal::exact(Float::with_val(self.0, x))
    }

    pub fn pi(self) -> BigReal {
        let v = Float::with_val(self.0, Constant::Pi);
        let e = ulp(&v);
        BigReal { val: v, err: e }
    }

    /// Parse a decimal string exactly representable plus one ulp.
    pub fn parse(self, s: &str) -> Result<BigReal> {
        let v = Float::with_val(
            self.0,
            Float::parse(s).map_err(|e| Error::InvalidInput(format!("cannot parse {s:?}: {e}")))?,
        );
        let e = ulp(&v);
        Ok(BigReal { val: v, err: e })
    }
}

pub(crate) fn zero_err() -> Float {
    Float::with_val(ERR_PREC, 0)
}

/// Upper bound on the rounding error of a correctly-rounded MPFR result.
pub(crate) fn ulp(v: &Float) -> Float {
    if v.is_zero() {
        return zero_err();
    }
    let exp = v.get_exp().expect("finite float");
    let prec = v.prec() as i64;
    // |v| = m * 2^exp with 1/2 <= m < 1; half-ulp is 2^(exp-prec-1).
    pow2(exp as i64 - prec)
}

fn pow2(e: i64) -> Float {
    let mut f = Float::with_val(ERR_PREC, 1);
    f <<= e as i32;
    f
}

/// Evaluate an MPFR expression at `prec`, returning the rounded value and
/// a rounding-error term that is zero when the result is exact.
macro_rules! val_ulp {
    ($prec:expr, $expr:expr) => {{
        let (v, ord) = Float::with_val_round($prec, $expr, Round::Nearest);
        let u = if ord == Ordering::Equal {
            zero_err()
        } else {
            ulp(&v)
        };
        (v, u)
    }};
}

pub(crate) fn eadd(acc: Float, t: &Float) -> Float {
    Float::with_val_round(ERR_PREC, &acc + t, Round::Up).0
}

/// err helper: round the sum of error terms up.
macro_rules! esum {
    ($($t:expr),+ $(,)?) => {{
        let mut acc = rug::Float::with_val($crate::precision::ERR_PREC, 0);
        $(acc = $crate::precision::eadd(acc, std::borrow::Borrow::borrow(&$t));)+
        acc
    }};
}
pub(crate) use esum;

pub(crate) fn escale(e: &Float, factor: &Float) -> Float {
    let f = Float::with_val_round(ERR_PREC, factor.abs_ref(), Round::Up).0;
    Float::with_val_round(ERR_PREC, e * &f, Round::Up).0
}

pub(crate) fn esafety(e: Float) -> Float {
    Float::with_val_round(ERR_PREC, &e * SAFETY, Round::Up).0
}

/// An arbitrary-precision real number with a rigorous absolute error bound.
#[derive(Debug, Clone, PartialEq)]
pub struct BigReal {
    val: Float,
    err: Float,
}

impl BigReal {
    pub fn exact(val: Float) -> BigReal {
        BigReal {
            val,
            err: zero_err(),
        }
    }

    pub fn with_err(val: Float, err: Float) -> BigReal {
        debug_assert!(!err.is_sign_negative());
        BigReal {
            val,
            err: Float::with_val_round(ERR_PREC, &err, Round::Up).0,
        }
    }

    pub fn value(&self) -> &Float {
        &self.val
    }

    pub fn err(&self) -> &Float {
        &self.err
    }

    pub fn prec(&self) -> u32 {
        self.val.prec()
    }

    pub fn to_f64(&self) -> f64 {
        self.val.to_f64()
    }

    pub fn is_exact(&self) -> bool {
        self.err.is_zero()
    }

    /// Widen the error bound by `extra` (used to fold analytic truncation
    /// error terms into a computed value).
    pub fn widen(&self, extra: &BigReal) -> BigReal {
        debug_assert!(!extra.val.is_sign_negative());
        let ea = Float::with_val_round(ERR_PREC, extra.val.abs_ref(), Round::Up).0;
        let e = esum!(self.err, ea, extra.err);
        BigReal {
            val: self.val.clone(),
            err: e,
        }
    }

    pub fn widen_f64(&self, extra: f64) -> BigReal {
        debug_assert!(extra >= 0.0);
        let x = Float::with_val(ERR_PREC, extra);
        let e = esum!(self.err, x);
        BigReal {
            val: self.val.clone(),
            err: e,
        }
    }

    pub fn add(&self, rhs: &BigReal) -> BigReal {
        let prec = self.prec().max(rhs.prec());
        let (val, u) = val_ulp!(prec, &self.val + &rhs.val);
        let err = esafety(esum!(self.err, rhs.err, u));
        BigReal { val, err }
    }

    pub fn sub(&self, rhs: &BigReal) -> BigReal {
        let prec = self.prec().max(rhs.prec());
        let (val, u) = val_ulp!(prec, &self.val - &rhs.val);
        let err = esafety(esum!(self.err, rhs.err, u));
        BigReal { val, err }
    }

    pub fn mul(&self, rhs: &BigReal) -> BigReal {
        let prec = self.prec().max(rhs.prec());
        let (val, u) = val_ulp!(prec, &self.val * &rhs.val);
        let err = esafety(esum!(
            escale(&self.err, &rhs.val),
            escale(&rhs.err, &self.val),
            Float::with_val_round(ERR_PREC, &self.err * &rhs.err, Round::Up).0,
            u,
        ));
        BigReal { val, err }
    }

    pub fn mul_i64(&self, n: i64) -> BigReal {
        let f = Float::with_val(self.prec(), n);
        let (val, u) = val_ulp!(self.prec(), &self.val * &f);
        let err = esafety(esum!(escale(&self.err, &f), u));
        BigReal { val, err }
    }

    /// Division. Fails when the divisor interval contains zero.
    pub fn div(&self, rhs: &BigReal) -> Result<BigReal> {
        let prec = self.prec().max(rhs.prec());
        let babs = Float::with_val_round(ERR_PREC, rhs.val.abs_ref(), Round::Down).0;
        let margin = Float::with_val_round(ERR_PREC, &babs - &rhs.err, Round::Down).0;
        if !(margin > 0) {
            return Err(Error::PrecisionExhausted(
                "division by an interval containing zero".into(),
            ));
        }
        let (val, u) = val_ulp!(prec, &self.val / &rhs.val);
        // |a/b - (a+da)/(b+db)| <= (|a/b|*|db| + |da|) / (|b| - |db|)
        let num = esum!(escale(&rhs.err, &val), self.err);
        let prop = Float::with_val_round(ERR_PREC, &num / &margin, Round::Up).0;
        let err = esafety(esum!(prop, u));
        Ok(BigReal { val, err })
    }

    pub fn recip(&self) -> Result<BigReal> {
        let prec = self.prec();
        Prec(prec).int(1).div(self)
    }

    pub fn neg(&self) -> BigReal {
        BigReal {
            val: Float::with_val(self.prec(), -&self.val),
            err: self.err.clone(),
        }
    }

    pub fn abs(&self) -> BigReal {
        BigReal {
            val: Float::with_val(self.prec(), self.val.abs_ref()),
            err: self.err.clone(),
        }
    }

    /// Square root; requires the interval to be certainly nonnegative
    /// unless the value is exactly zero.
    pub fn sqrt(&self) -> Result<BigReal> {
        if self.val.is_zero() && self.err.is_zero() {
            return Ok(BigReal::exact(Float::with_val(self.prec(), 0)));
        }
        let lo = Float::with_val_round(ERR_PREC, &self.val - &self.err, Round::Down).0;
        if !(lo > 0) {
            return Err(Error::PrecisionExhausted(
                "sqrt of an interval reaching zero or below".into(),
            ));
        }
        let (val, u) = val_ulp!(self.prec(), self.val.sqrt_ref());
        // derivative bound 1/(2 sqrt(lo))
        let slo = Float::with_val_round(ERR_PREC, lo.sqrt_ref(), Round::Down).0;
        let den = Float::with_val_round(ERR_PREC, 2 * &slo, Round::Down).0;
        let prop = Float::with_val_round(ERR_PREC, &self.err / &den, Round::Up).0;
        let err = esafety(esum!(prop, u));
        Ok(BigReal { val, err })
    }

    /// Natural exponential. Requires err <= 1/8 so that e^err stays close
    /// to 1; larger fuzz means the argument is useless anyway.
    pub fn exp(&self) -> Result<BigReal> {
        if self.err.to_f64() > 0.125 {
            return Err(Error::PrecisionExhausted(
                "exp of a too-fuzzy argument".into(),
            ));
        }
        let (val, u) = val_ulp!(self.prec(), self.val.exp_ref());
        // |e^(a+d) - e^a| <= e^a * d * e^d <= 1.14 * |val| * d for d <= 1/8
        let prop = escale(&self.err, &val);
        let prop = Float::with_val_round(ERR_PREC, &prop * 1.14f64, Round::Up).0;
        let err = esafety(esum!(prop, u));
        Ok(BigReal { val, err })
    }

    /// Natural logarithm; the interval must stay strictly positive.
    pub fn ln(&self) -> Result<BigReal> {
        let lo = Float::with_val_round(ERR_PREC, &self.val - &self.err, Round::Down).0;
        if !(lo > 0) {
            return Err(Error::PrecisionExhausted(
                "log of an interval reaching zero or below".into(),
            ));
        }
        let (val, u) = val_ulp!(self.prec(), self.val.ln_ref());
        let prop = Float::with_val_round(ERR_PREC, &self.err / &lo, Round::Up).0;
        let err = esafety(esum!(prop, u));
        Ok(BigReal { val, err })
    }

    pub fn sin(&self) -> BigReal {
        let (val, u) = val_ulp!(self.prec(), self.val.sin_ref());
        let err = esafety(esum!(self.err, u));
        BigReal { val, err }
    }

    pub fn cos(&self) -> BigReal {
        let (val, u) = val_ulp!(self.prec(), self.val.cos_ref());
        let err = esafety(esum!(self.err, u));
        BigReal { val, err }
    }

    /// Integer power with sound error propagation.
    pub fn pow_u32(&self, n: u32) -> BigReal {
        if n == 0 {
            return Prec(self.prec()).int(1);
        }
        if n == 1 {
            return self.clone();
        }
        let (val, u) = val_ulp!(self.prec(), (&self.val).pow(n));
        // |x^n - a^n| <= n * (|a|+d)^(n-1) * d
        let aabs = Float::with_val_round(ERR_PREC, self.val.abs_ref(), Round::Up).0;
        let radius = Float::with_val_round(ERR_PREC, &aabs + &self.err, Round::Up).0;
        let bound = Float::with_val_round(ERR_PREC, radius.pow(n - 1), Round::Up).0;
        let prop = Float::with_val_round(ERR_PREC, &bound * &self.err, Round::Up).0;
        let prop = Float::with_val_round(ERR_PREC, &prop * n, Round::Up).0;
        let err = esafety(esum!(prop, u));
        BigReal { val, err }
    }

    /// Comparison decided outside the error intervals, if possible.
    pub fn cmp_certain(&self, rhs: &BigReal) -> Option<Ordering> {
        let d = self.sub(rhs);
        d.sign_certain()
    }

    /// The certain sign of the interval, or None if it straddles zero.
    pub fn sign_certain(&self) -> Option<Ordering> {
        let lo = Float::with_val_round(ERR_PREC, &self.val - &self.err, Round::Down).0;
        let hi = Float::with_val_round(ERR_PREC, &self.val + &self.err, Round::Up).0;
        if lo > 0 {
            Some(Ordering::Greater)
        } else if hi < 0 {
            Some(Ordering::Less)
        } else if lo.is_zero() && hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// True if the interval certainly contains `x`.
    pub fn certainly_contains_int(&self, x: &Integer) -> bool {
        let d = self.sub(&Prec(self.prec()).integer(x));
        matches!(d.sign_certain(), Some(Ordering::Equal))
    }

    /// Floor, decided outside the error interval.
    pub fn floor_certain(&self) -> Result<Integer> {
        let lo = Float::with_val(self.prec(), &self.val - &self.err);
        let hi = Float::with_val(self.prec(), &self.val + &self.err);
        let flo = lo
            .floor()
            .to_integer()
            .ok_or_else(|| Error::PrecisionExhausted("floor of a non-finite value".into()))?;
        let fhi = hi.floor().to_integer().unwrap();
        if flo == fhi {
            Ok(flo)
        } else {
            Err(Error::PrecisionExhausted(format!(
                "floor undecided near {}",
                self.val.to_f64()
            )))
        }
    }

    pub fn ceil_certain(&self) -> Result<Integer> {
        Ok(-(self.neg().floor_certain()?))
    }

    /// Nearest integer, requiring the whole interval on one side of the
    /// half-integer boundary.
    pub fn round_certain(&self) -> Result<Integer> {
        let half = Prec(self.prec()).ratio(1, 2);
        self.add(&half).floor_certain()
    }

    /// Distance to the nearest integer, with propagated error.
    /// Requires err < 1/4 so that the nearest integer is unambiguous.
    pub fn nearest_integer_distance(&self) -> Result<BigReal> {
        if self.err.to_f64() >= 0.25 {
            return Err(Error::PrecisionExhausted(
                "nearest-integer distance with err >= 1/4".into(),
            ));
        }
        let prec = self.prec();
        let nearest = Float::with_val(prec, self.val.round_ref());
        let d = Float::with_val(prec, &self.val - &nearest);
        let dist = BigReal {
            val: d.abs(),
            err: self.err.clone(),
        };
        // Result lives in [0, 1/2]; clamp the reported value there.
        let half = Prec(prec).ratio(1, 2);
        if dist.val > *half.value() {
            Ok(BigReal {
                val: half.val,
                err: dist.err,
            })
        } else {
            Ok(dist)
        }
    }

    /// Convert to an exact rational (uses the value, ignoring err).
    pub fn to_rational(&self) -> Rational {
        self.val.to_rational().unwrap_or_default()
    }

    /// Re-round to a (usually higher) target precision.
    pub fn at_prec(&self, prec: Prec) -> BigReal {
        let (val, u) = val_ulp!(prec.0, &self.val);
        let err = esum!(self.err, u);
        BigReal { val, err }
    }

    pub fn min_val(a: BigReal, b: BigReal) -> BigReal {
        if a.val <= b.val {
            a
        } else {
            b
        }
    }

    pub fn max_val(a: BigReal, b: BigReal) -> BigReal {
        if a.val >= b.val {
            a
        } else {
            b
        }
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.val)?;
        if !self.err.is_zero() {
            write!(f, " (±{:e})", self.err)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn rejects_precision_below_64() {
        assert!(Prec::new(32).is_err());
        assert!(Prec::new(64).is_ok());
    }

    #[test]
    fn third_at_128_bits_has_tiny_error() {
        let p = Prec::new(128).unwrap();
        let x = p.int(1).div(&p.int(3)).unwrap();
        assert!((x.to_f64() - 1.0 / 3.0).abs() < 1e-15);
        assert!(x.err().to_f64() <= 2f64.powi(-126));
    }

    #[test]
    fn pi_sqrt3_at_256_bits() {
        let p = Prec::new(256).unwrap();
        let v = p.pi().mul(&p.int(3).sqrt().unwrap());
        assert!(v.err().to_f64() <= 2f64.powi(-250));
        // compare against 1000-bit recomputation
        let q = Prec::new(1000).unwrap();
        let w = q.pi().mul(&q.int(3).sqrt().unwrap());
        let d = v.sub(&w).abs();
        assert!(d.value().to_f64() <= v.err().to_f64());
    }

    #[test]
    fn exact_integer_has_zero_error() {
        let p = Prec::new(64).unwrap();
        assert!(p.int(7).is_exact());
        assert!(p.ratio(3, 4).is_exact());
    }

    #[test]
    fn nearest_integer_distance_examples() {
        let p = Prec::new(64).unwrap();
        let d = p.from_f64(2.25).nearest_integer_distance().unwrap();
        assert_eq!(d.to_f64(), 0.25);
        let d = p.ratio(-4999, 10000).nearest_integer_distance().unwrap();
        assert!((d.to_f64() - 0.4999).abs() < 1e-12);
        let d = p.int(3).nearest_integer_distance().unwrap();
        assert_eq!(d.to_f64(), 0.0);
        assert!(d.is_exact());
    }

    #[test]
    fn nearest_integer_distance_rejects_fuzzy() {
        let x = BigReal::with_err(Float::with_val(64, 2.5), Float::with_val(32, 0.3));
        assert!(x.nearest_integer_distance().is_err());
    }

    proptest::proptest! {
        // error soundness: a pipeline of operations evaluated at 64 bits
        // stays within its reported err of the 256-bit recomputation
        #[test]
        fn prop_error_soundness(seed in 0u64..5000) {
            check_expression_soundness(seed);
        }

        // the distance to the nearest integer is in [0, 1/2] and exact
        // integers give exactly zero
        #[test]
        fn prop_nearest_integer_distance(num in -10_000i64..10_000, den in 1i64..100) {
            let p = Prec::new(96).unwrap();
            let x = p.ratio(num, den);
            let d = x.nearest_integer_distance().unwrap();
            proptest::prop_assert!(d.to_f64() >= 0.0 && d.to_f64() <= 0.5);
            if num % den == 0 {
                proptest::prop_assert!(d.is_exact() && d.to_f64() == 0.0);
            }
        }
    }

    fn check_expression_soundness(seed: u64) {
        let mut rng = StdRng::seed_from_u64(seed);
        let lo = Prec::new(64).unwrap();
        let hi = Prec::new(256).unwrap();
        let mut a = lo.from_f64(rng.gen_range(0.1..4.0));
        let mut b = hi.from_f64(a.to_f64());
        for _ in 0..12 {
            let op = rng.gen_range(0..6);
            let k = rng.gen_range(1..5i64);
            let (x, y) = (lo.int(k), hi.int(k));
            let (na, nb) = match op {
                0 => (a.add(&x), b.add(&y)),
                1 => (a.sub(&x), b.sub(&y)),
                2 => (a.mul(&x), b.mul(&y)),
                3 => match (a.div(&x), b.div(&y)) {
                    (Ok(p), Ok(q)) => (p, q),
                    _ => continue,
                },
                4 => match (a.abs().sqrt(), b.abs().sqrt()) {
                    (Ok(p), Ok(q)) => (p, q),
                    _ => continue,
                },
                _ => (a.sin(), b.sin()),
            };
            a = na;
            b = nb;
        }
        let diff = a.sub(&b).abs();
        let budget = esum!(a.err(), b.err());
        assert!(
            diff.value().to_f64() <= budget.to_f64() + 1e-300,
            "seed {seed}: diff {:e} > err {:e}",
            diff.value().to_f64(),
            budget.to_f64()
        );
    }

    // Error soundness: random expression DAGs evaluated at precision b and
    // at 4b agree within the err reported at precision b.
    #[test]
    fn error_soundness_random_expressions() {
        let mut rng = StdRng::seed_from_u64(0x5eed);
        for _ in 0..200 {
            let lo = Prec::new(64).unwrap();
            let hi = Prec::new(256).unwrap();
            let mut a = lo.from_f64(rng.gen_range(0.1..4.0));
            let mut b = hi.from_f64(a.to_f64());
            for _ in 0..12 {
                let op = rng.gen_range(0..6);
                let k = rng.gen_range(1..5i64);
                let (x, y) = (lo.int(k), hi.int(k));
                let (na, nb) = match op {
                    0 => (a.add(&x), b.add(&y)),
                    1 => (a.sub(&x), b.sub(&y)),
                    2 => (a.mul(&x), b.mul(&y)),
                    3 => match (a.div(&x), b.div(&y)) {
                        (Ok(p), Ok(q)) => (p, q),
                        _ => continue,
                    },
                    4 => match (a.abs().widen_f64(0.0).sqrt(), b.abs().sqrt()) {
                        (Ok(p), Ok(q)) => (p, q),
                        _ => continue,
                    },
                    _ => (a.sin(), b.sin()),
                };
                a = na;
                b = nb;
            }
            let diff = a.sub(&b).abs();
            let budget = esum!(a.err(), b.err());
            assert!(
                diff.value().to_f64() <= budget.to_f64() + 1e-300,
                "diff {:e} > err {:e}",
                diff.value().to_f64(),
                budget.to_f64()
            );
        }
    }
}
