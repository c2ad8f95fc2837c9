//! The modular invariant as a q-series: exact integer coefficients,
//! evaluation with a rigorous truncation bound, and interval enclosures
//! used when classifying candidate points.
//!
//! The coefficients come from j = E4^3 / Delta computed by exact integer
//! series arithmetic. The truncation error of j_N on |q| <= e^(-pi sqrt 3)
//! is bounded by j(x0) - j_N(x0) at x0 = e^(-pi sqrt 3) because all
//! coefficients are positive; that quantity is in turn bounded using the
//! classical coefficient estimate c_n <= e^(4 pi sqrt n), which is also
//! asserted for every coefficient we materialize.

use crate::error::{Error, Result};
use crate::precision::{BigReal, Prec};
use rug::{Integer, Rational};

pub struct JSeries {
    /// c_0, c_1, ..., c_N of j(q) = 1/q + c_0 + c_1 q + ...
    coeffs: Vec<Integer>,
}

/// Multiply truncated integer power series.
fn series_mul(a: &[Integer], b: &[Integer], n: usize) -> Vec<Integer> {
    let mut out = vec![Integer::new(); n + 1];
    for (i, ai) in a.iter().enumerate().take(n + 1) {
        if ai.cmp0() == std::cmp::Ordering::Equal {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(n + 1 - i) {
            if bj.cmp0() == std::cmp::Ordering::Equal {
                continue;
            }
            out[i + j] += Integer::from(ai * bj);
        }
    }
    out
}

fn sigma3(n: u64) -> Integer {
    let mut s = Integer::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            s += Integer::from(d * d) * d;
            let e = n / d;
            if e != d {
                s += Integer::from(e) * e * e;
            }
        }
        d += 1;
    }
    s
}

/// Exact coefficients c_0..c_n of the j q-expansion.
pub fn j_coefficients(n: usize) -> Vec<Integer> {
    let trunc = n + 1; // we need the q^(n+1) coefficient of E4^3/P^24
                       // Euler product P = prod (1 - q^k), sparse by the pentagonal theorem.
    let mut pser = vec![Integer::new(); trunc + 1];
    pser[0] = Integer::from(1);
    let mut k: i64 = 1;
    loop {
        let g1 = k * (3 * k - 1) / 2;
        let g2 = k * (3 * k + 1) / 2;
        if g1 as usize > trunc && g2 as usize > trunc {
            break;
        }
        let sign = if k % 2 == 0 { 1 } else { -1 };
        if (g1 as usize) <= trunc {
            pser[g1 as usize] += sign;
        }
        if (g2 as usize) <= trunc {
            pser[g2 as usize] += sign;
        }
        k += 1;
    }
    // Pinv = 1/P by the standard inversion recurrence (P is sparse).
    let mut pinv = vec![Integer::new(); trunc + 1];
    pinv[0] = Integer::from(1);
    for m in 1..=trunc {
        let mut acc = Integer::new();
        for j in 1..=m {
            if pser[j].cmp0() != std::cmp::Ordering::Equal {
                acc += Integer::from(&pser[j] * &pinv[m - j]);
            }
        }
        pinv[m] = -acc;
    }
    // Pinv^24 by squaring: 24 = 16 + 8.
    let p2 = series_mul(&pinv, &pinv, trunc);
    let p4 = series_mul(&p2, &p2, trunc);
    let p8 = series_mul(&p4, &p4, trunc);
    let p16 = series_mul(&p8, &p8, trunc);
    let p24 = series_mul(&p16, &p8, trunc);
    // E4 = 1 + 240 sum sigma_3(k) q^k
    let mut e4 = vec![Integer::new(); trunc + 1];
    e4[0] = Integer::from(1);
    for m in 1..=trunc {
        e4[m] = sigma3(m as u64) * Integer::from(240);
    }
    let e8 = series_mul(&e4, &e4, trunc);
    let e12 = series_mul(&e8, &e4, trunc);
    let jq = series_mul(&e12, &p24, trunc); // q * j(q)
    debug_assert_eq!(jq[0], 1);
    jq[1..=n + 1].to_vec()
}

impl JSeries {
    pub fn new(table_size: usize) -> JSeries {
        JSeries {
            coeffs: j_coefficients(table_size.max(32)),
        }
    }

    pub fn table_size(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &Integer {
        &self.coeffs[n]
    }

    /// Upper bound on sum_{n > N} c_n x0^n at x0 = e^(-pi sqrt 3),
    /// which bounds |j(q) - j_N(q)| for every |q| <= x0.
    pub fn tail_bound(&self, n: usize, prec: Prec) -> Result<BigReal> {
        let x0 = prec.pi().mul(&prec.int(3).sqrt()?).neg().exp()?;
        // widen x0 to be safe when used as an upper bound for |q|
        let x0 = x0.add(&x0.abs().mul(&prec.parse("1e-30")?));
        let table = self.table_size();
        let mut sum = prec.int(0);
        let mut pw = x0.pow_u32(n as u32 + 1);
        for m in n + 1..=table {
            sum = sum.add(&pw.mul(&prec.integer(&self.coeffs[m])));
            pw = pw.mul(&x0);
        }
        // analytic tail beyond the table: c_m <= e^(4 pi sqrt m) and
        // sqrt m <= m / sqrt(M) for m > M give a geometric bound.
        let m = table as i64;
        let rho = prec
            .pi()
            .mul_i64(4)
            .div(&prec.int(m).sqrt()?)?
            .exp()?
            .mul(&x0);
        if rho.value().to_f64() >= 0.9 {
            return Err(Error::InvalidInput(
                "coefficient table too small for tail bound".into(),
            ));
        }
        let tail = rho.pow_u32(m as u32 + 1).div(&prec.int(1).sub(&rho))?;
        Ok(sum.add(&tail))
    }

    /// j_N(q) with the truncation bound folded into the error.
    /// Requires |q| <= e^(-pi sqrt 3) up to the error interval of q.
    pub fn evaluate(&self, q: &BigReal, n: usize, prec: Prec) -> Result<BigReal> {
        if n > self.table_size() {
            return Err(Error::InvalidInput(format!(
                "requested {n} terms but table holds {}",
                self.table_size()
            )));
        }
        let x0 = prec.pi().mul(&prec.int(3).sqrt()?).neg().exp()?;
        let aq = q.abs();
        if aq.sub(&x0).sign_certain() == Some(std::cmp::Ordering::Greater) {
            return Err(Error::InvalidInput(format!(
                "|q| = {} is outside the cusp neighbourhood",
                aq.value().to_f64()
            )));
        }
        // Horner on the polynomial part.
        let mut acc = prec.integer(&self.coeffs[n]);
        for m in (0..n).rev() {
            acc = acc.mul(q).add(&prec.integer(&self.coeffs[m]));
        }
        let val = q.recip()?.add(&acc);
        let tail = self.tail_bound(n, prec)?;
        Ok(val.widen(&tail))
    }

    /// Evaluate with as many terms as needed for err below `target`.
    pub fn evaluate_auto(&self, q: &BigReal, target: f64, prec: Prec) -> Result<BigReal> {
        let mut n = 8;
        loop {
            let v = self.evaluate(q, n, prec)?;
            if v.err().to_f64() < target {
                return Ok(v);
            }
            if n >= self.table_size() {
                return Err(Error::PrecisionExhausted(format!(
                    "j evaluation stuck at err {:e} with {} terms",
                    v.err().to_f64(),
                    n
                )));
            }
            n = (n * 2).min(self.table_size());
        }
    }

    /// Upper bound for |dj/dq| on |q| in [q_min_abs, q_max_abs].
    pub fn derivative_bound(
        &self,
        q_min_abs: &BigReal,
        q_max_abs: &BigReal,
        prec: Prec,
    ) -> Result<BigReal> {
        let inv2 = q_min_abs.pow_u32(2).recip()?;
        let table = self.table_size();
        let mut sum = prec.int(0);
        let mut pw = prec.int(1);
        for m in 1..=table {
            let term = pw.mul(&prec.integer(&self.coeffs[m])).mul_i64(m as i64);
            sum = sum.add(&term);
            pw = pw.mul(q_max_abs);
        }
        // tail: m c_m x^(m-1) <= m e^(4 pi sqrt m) x^(m-1); crude geometric
        // bound with the same rho as tail_bound, inflated by the table size.
        let m = table as i64;
        let rho = prec
            .pi()
            .mul_i64(4)
            .div(&prec.int(m).sqrt()?)?
            .exp()?
            .mul(q_max_abs);
        if rho.value().to_f64() < 0.5 {
            let tail = rho
                .pow_u32(m as u32)
                .mul_i64(4 * m)
                .div(&prec.int(1).sub(&rho))?;
            sum = sum.add(&tail);
        } else {
            return Err(Error::InvalidInput(
                "derivative bound needs a larger table".into(),
            ));
        }
        Ok(sum.add(&inv2))
    }

    /// Enclosure of j over a q-interval [lo, hi] (same sign, inside the
    /// cusp neighbourhood): evaluate at the midpoint and widen by a
    /// derivative bound times the half-width.
    pub fn evaluate_interval(
        &self,
        lo: &BigReal,
        hi: &BigReal,
        target: f64,
        prec: Prec,
    ) -> Result<BigReal> {
        let two = prec.int(2);
        let mid = lo.add(hi).div(&two)?;
        let half = hi.sub(lo).abs().div(&two)?;
        let v = self.evaluate_auto(&mid, target, prec)?;
        let qmin = BigReal::min_val(lo.abs(), hi.abs());
        let qmax = BigReal::max_val(lo.abs(), hi.abs());
        let slope = self.derivative_bound(&qmin, &qmax, prec)?;
        Ok(v.widen(&slope.mul(&half)))
    }
}

/// Solve j(q) = target for q on a bracket, used by tests as an
/// independent round-trip oracle.
pub fn solve_j_for_q(
    js: &JSeries,
    target: &Rational,
    a: &BigReal,
    b: &BigReal,
    prec: Prec,
) -> Result<BigReal> {
    let t = prec.rational(target);
    let tol = prec.parse("1e-40")?;
    crate::precision::brent_root(
        |q| Ok(js.evaluate_auto(q, 1e-25, prec)?.sub(&t)),
        a,
        b,
        &tol,
    )
}
