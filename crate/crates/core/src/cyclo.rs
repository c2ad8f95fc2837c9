//! Exact arithmetic in Q(zeta_p) and its real subfield K = Q(zeta_p)^H,
//! Galois action, numeric embeddings, heights, and the unit system
//! (eta_0 together with the circular units).

use crate::error::{Error, Result};
use crate::geometry::GroupContext;
use crate::precision::{BigComplex, BigReal, Prec};
use rug::{Integer, Rational};
use std::fmt;

/// An element of Q(zeta_p), stored as exact rational coordinates over the
/// power basis zeta, zeta^2, ..., zeta^(p-1).
#[derive(Clone, PartialEq, Eq)]
pub struct CycloElement {
    p: u64,
    c: Vec<Rational>,
}

impl fmt::Debug for CycloElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyclo(p={}, [", self.p)?;
        for (i, x) in self.c.iter().enumerate() {
            if x.cmp0() != std::cmp::Ordering::Equal {
                write!(f, "{}*z^{} ", x, i + 1)?;
            }
        }
        write!(f, "])")
    }
}

impl CycloElement {
    pub fn zero(p: u64) -> CycloElement {
        CycloElement {
            p,
            c: vec![Rational::new(); (p - 1) as usize],
        }
    }

    pub fn one(p: u64) -> CycloElement {
        CycloElement::from_rational(p, &Rational::from(1))
    }

    /// The rational r, expressed via 1 = -(zeta + ... + zeta^(p-1)).
    pub fn from_rational(p: u64, r: &Rational) -> CycloElement {
        let neg = Rational::from(-r.clone());
        CycloElement {
            p,
            c: vec![neg; (p - 1) as usize],
        }
    }

    /// zeta^k for any integer k; k = 0 mod p gives 1.
    pub fn zeta_pow(p: u64, k: i64) -> CycloElement {
        let k = k.rem_euclid(p as i64) as u64;
        if k == 0 {
            return CycloElement::one(p);
        }
        let mut e = CycloElement::zero(p);
        e.c[(k - 1) as usize] = Rational::from(1);
        e
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Coefficient of zeta^k, 1 <= k <= p-1.
    pub fn coeff(&self, k: u64) -> &Rational {
        &self.c[(k - 1) as usize]
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.c
    }

    pub fn from_coeffs(p: u64, c: Vec<Rational>) -> Result<CycloElement> {
        if c.len() != (p - 1) as usize {
            return Err(Error::InvalidInput(format!(
                "expected {} coefficients, got {}",
                p - 1,
                c.len()
            )));
        }
        Ok(CycloElement { p, c })
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.cmp0() == std::cmp::Ordering::Equal)
    }

    pub fn add(&self, rhs: &CycloElement) -> CycloElement {
        debug_assert_eq!(self.p, rhs.p);
        let c = self
            .c
            .iter()
            .zip(&rhs.c)
            .map(|(a, b)| Rational::from(a + b))
            .collect();
        CycloElement { p: self.p, c }
    }

    pub fn sub(&self, rhs: &CycloElement) -> CycloElement {
        debug_assert_eq!(self.p, rhs.p);
        let c = self
            .c
            .iter()
            .zip(&rhs.c)
            .map(|(a, b)| Rational::from(a - b))
            .collect();
        CycloElement { p: self.p, c }
    }

    pub fn neg(&self) -> CycloElement {
        CycloElement {
            p: self.p,
            c: self.c.iter().map(|a| Rational::from(-a.clone())).collect(),
        }
    }

    pub fn scale(&self, r: &Rational) -> CycloElement {
        CycloElement {
            p: self.p,
            c: self.c.iter().map(|a| Rational::from(a * r)).collect(),
        }
    }

    pub fn mul(&self, rhs: &CycloElement) -> CycloElement {
        debug_assert_eq!(self.p, rhs.p);
        let p = self.p as usize;
        // convolution over exponents mod p, then eliminate the exponent-0
        // bucket via 1 = -(zeta + ... + zeta^(p-1))
        let mut buckets = vec![Rational::new(); p];
        for (i, a) in self.c.iter().enumerate() {
            if a.cmp0() == std::cmp::Ordering::Equal {
                continue;
            }
            for (j, b) in rhs.c.iter().enumerate() {
                if b.cmp0() == std::cmp::Ordering::Equal {
                    continue;
                }
                let e = (i + 1 + j + 1) % p;
                buckets[e] += Rational::from(a * b);
            }
        }
        let zero_part = buckets[0].clone();
        let c = (1..p)
            .map(|e| Rational::from(&buckets[e] - &zero_part))
            .collect();
        CycloElement { p: self.p, c }
    }

    /// Galois action zeta -> zeta^t, extended linearly. Exact.
    pub fn galois(&self, t: u64) -> CycloElement {
        let p = self.p;
        let t = t % p;
        assert!(t != 0, "galois action needs t nonzero mod p");
        let mut c = vec![Rational::new(); (p - 1) as usize];
        for (i, a) in self.c.iter().enumerate() {
            let e = ((i as u64 + 1) * t) % p;
            c[(e - 1) as usize] = a.clone();
        }
        CycloElement { p, c }
    }

    pub fn conj(&self) -> CycloElement {
        self.galois(self.p - 1)
    }

    /// True if every coordinate is an integer; over this basis that is
    /// exactly integrality in Z[zeta].
    pub fn is_integral(&self) -> bool {
        self.c.iter().all(|x| x.is_integer())
    }

    /// If the element is rational, return it.
    pub fn as_rational(&self) -> Option<Rational> {
        let first = &self.c[0];
        if self.c.iter().all(|x| x == first) {
            Some(Rational::from(-first.clone()))
        } else {
            None
        }
    }

    pub fn fixed_by(&self, h: &[u64]) -> bool {
        h.iter().all(|&t| self.galois(t) == *self)
    }

    /// Norm down to Q over the full Galois group of Q(zeta_p)/Q.
    pub fn norm_full(&self) -> Rational {
        let mut acc = CycloElement::one(self.p);
        for t in 1..self.p {
            acc = acc.mul(&self.galois(t));
        }
        acc.as_rational().expect("full norm is rational")
    }

    /// Norm to Q of an element of K, as the product over the d embeddings
    /// of K ordered by powers of the fixed generator.
    pub fn norm_k(&self, ctx: &GroupContext) -> Rational {
        let mut acc = CycloElement::one(self.p);
        for l in 0..ctx.d {
            acc = acc.mul(&self.galois(ctx.galois_rep(l)));
        }
        acc.as_rational().expect("norm of a K-element is rational")
    }

    /// Multiplicative inverse via the full norm.
    pub fn inv(&self) -> Result<CycloElement> {
        if self.is_zero() {
            return Err(Error::InvalidInput("inverse of zero".into()));
        }
        let mut acc = CycloElement::one(self.p);
        for t in 2..self.p {
            acc = acc.mul(&self.galois(t));
        }
        let n = self.norm_full();
        Ok(acc.scale(&Rational::from(n.recip_ref())))
    }
}

/// Shared cos/sin table for numeric embeddings of Q(zeta_p) at a fixed
/// precision: entry j holds e^(2 pi i j / p).
pub struct Embedder {
    p: u64,
    prec: Prec,
    cos: Vec<BigReal>,
    sin: Vec<BigReal>,
}

impl Embedder {
    pub fn new(p: u64, prec: Prec) -> Embedder {
        let two_pi = prec.pi().mul_i64(2);
        let pinv = prec.int(1).div(&prec.int(p as i64)).expect("p > 0");
        let mut cos = Vec::with_capacity(p as usize);
        let mut sin = Vec::with_capacity(p as usize);
        for j in 0..p {
            let ang = two_pi.mul(&pinv).mul_i64(j as i64);
            cos.push(ang.cos());
            sin.push(ang.sin());
        }
        Embedder { p, prec, cos, sin }
    }

    pub fn prec(&self) -> Prec {
        self.prec
    }

    /// Root of unity e^(2 pi i k / p).
    pub fn zeta(&self, k: i64) -> BigComplex {
        let k = k.rem_euclid(self.p as i64) as usize;
        BigComplex::new(self.cos[k].clone(), self.sin[k].clone())
    }

    /// Embedding sending zeta to e^(2 pi i t / p).
    pub fn embed(&self, x: &CycloElement, t: u64) -> BigComplex {
        debug_assert_eq!(x.p, self.p);
        let mut re = self.prec.int(0);
        let mut im = self.prec.int(0);
        for (i, a) in x.c.iter().enumerate() {
            if a.cmp0() == std::cmp::Ordering::Equal {
                continue;
            }
            let e = ((i as u64 + 1) * t % self.p) as usize;
            let av = self.prec.rational(a);
            re = re.add(&av.mul(&self.cos[e]));
            im = im.add(&av.mul(&self.sin[e]));
        }
        BigComplex::new(re, im)
    }

    /// log of the absolute value of the embedding at t.
    pub fn log_abs(&self, x: &CycloElement, t: u64) -> Result<BigReal> {
        let v = self.embed(x, t);
        v.norm_sqr().ln().map(|l| l.mul(&self.prec.ratio(1, 2)))
    }

    /// Absolute logarithmic height of an algebraic integer of Q(zeta_p)
    /// (finite places contribute nothing), or of a rational number.
    pub fn height(&self, x: &CycloElement) -> Result<BigReal> {
        if let Some(r) = x.as_rational() {
            return height_of_rational(&r, self.prec);
        }
        if !x.is_integral() {
            return Err(Error::InvalidInput(
                "height supported for algebraic integers and rationals only".into(),
            ));
        }
        let mut sum = self.prec.int(0);
        for t in 1..self.p {
            let a = self.embed(x, t).abs()?;
            // log+ = max(log, 0): skip embeddings certainly inside the unit disc
            match a.cmp_certain(&self.prec.int(1)) {
                Some(std::cmp::Ordering::Greater) => sum = sum.add(&a.ln()?),
                Some(_) => {}
                None => {
                    // |x| could be exactly 1; log+ is 0 up to the error of log
                    let l = a.ln()?;
                    let bound = l.abs();
                    sum = sum.widen(&bound);
                }
            }
        }
        sum.div(&self.prec.int(self.p as i64 - 1))
    }
}

pub fn height_of_rational(r: &Rational, prec: Prec) -> Result<BigReal> {
    let num = prec.integer(&Integer::from(r.numer().clone().abs()));
    let den = prec.integer(r.denom());
    let m = BigReal::max_val(num, den);
    m.ln()
}

/// Source of the unit basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitSource {
    Circular,
    ExternalFile,
}

/// eta_0 and a full-rank system of units of K.
pub struct UnitSystem {
    pub eta0: CycloElement,
    pub etas: Vec<CycloElement>,
    pub source: UnitSource,
}

impl UnitSystem {
    /// Build the default system: eta_0 = N(1 - zeta) and the circular
    /// units eta_k = N((1 - zeta^(g^k)) / (1 - zeta)), k = 1..d-1.
    /// All invariants are verified before returning.
    pub fn build(
        ctx: &GroupContext,
        override_units: Option<Vec<CycloElement>>,
    ) -> Result<UnitSystem> {
        let p = ctx.p;
        let one = CycloElement::one(p);

        // eta0 = prod_{t in H} (1 - zeta^t)
        let mut eta0 = one.clone();
        for &t in &ctx.h {
            let f = one.sub(&CycloElement::zeta_pow(p, t as i64));
            eta0 = eta0.mul(&f);
        }

        let (etas, source) = match override_units {
            Some(us) => (us, UnitSource::ExternalFile),
            None => {
                let mut us = Vec::with_capacity(ctx.d - 1);
                for k in 1..ctx.d {
                    let u = ctx.galois_rep(k);
                    let mut eta = one.clone();
                    for &t in &ctx.h {
                        // (1 - zeta^(t u)) / (1 - zeta^t) = 1 + zeta^t + ... + zeta^(t(u-1))
                        let mut f = CycloElement::zero(p);
                        for j in 0..u {
                            f = f.add(&CycloElement::zeta_pow(p, (t * j) as i64));
                        }
                        eta = eta.mul(&f);
                    }
                    us.push(eta);
                }
                (us, UnitSource::Circular)
            }
        };

        let sys = UnitSystem { eta0, etas, source };
        sys.verify(ctx)?;
        Ok(sys)
    }

    fn verify(&self, ctx: &GroupContext) -> Result<()> {
        let p = ctx.p;
        // eta0 lies in K and its Galois product is +-p
        if !self.eta0.fixed_by(&ctx.h) {
            return Err(Error::ValidationFailed("eta0 is not H-invariant".into()));
        }
        let mut prod = CycloElement::one(p);
        for l in 0..ctx.d {
            prod = prod.mul(&self.eta0.galois(ctx.galois_rep(l)));
        }
        let n = prod
            .as_rational()
            .ok_or_else(|| Error::ValidationFailed("Galois product of eta0 not rational".into()))?;
        if n != Rational::from(p) && n != Rational::from(-(p as i64)) {
            return Err(Error::ValidationFailed(format!(
                "Galois product of eta0 is {n}, expected +-{p}"
            )));
        }

        if self.etas.len() != ctx.d - 1 {
            return Err(Error::ValidationFailed(format!(
                "expected {} units, got {}",
                ctx.d - 1,
                self.etas.len()
            )));
        }
        for (k, eta) in self.etas.iter().enumerate() {
            if !eta.is_integral() {
                return Err(Error::ValidationFailed(format!(
                    "unit {} is not integral",
                    k + 1
                )));
            }
            if !eta.fixed_by(&ctx.h) {
                return Err(Error::ValidationFailed(format!("unit {} not in K", k + 1)));
            }
            let n = eta.norm_k(ctx);
            if n != Rational::from(1) && n != Rational::from(-1) {
                return Err(Error::ValidationFailed(format!(
                    "unit {} has norm {n}, expected +-1",
                    k + 1
                )));
            }
        }

        // rank and Schinzel checks are numeric
        let prec = Prec::new(256)?;
        let emb = Embedder::new(p, prec);
        for (k, eta) in self.etas.iter().enumerate() {
            let h = emb.height(eta)?;
            let lo = h.value().to_f64() + h.err().to_f64();
            if lo < 0.24 {
                return Err(Error::ValidationFailed(format!(
                    "unit {} has height {} below the Schinzel bound 0.24",
                    k + 1,
                    h
                )));
            }
        }
        let h0 = emb.height(&self.eta0)?;
        let bound = (ctx.h_len() as f64) * 2f64.ln();
        if h0.value().to_f64() - h0.err().to_f64() > bound {
            return Err(Error::ValidationFailed(format!(
                "height(eta0) = {h0} exceeds |H| log 2 = {bound}"
            )));
        }

        // (d-1) x (d-1) log-embedding matrix must have full rank
        if ctx.d > 1 {
            let n = ctx.d - 1;
            let mut mat = Vec::with_capacity(n);
            for l in 1..ctx.d {
                let t = ctx.galois_rep(l);
                let mut row = Vec::with_capacity(n);
                for eta in &self.etas {
                    row.push(emb.log_abs(eta, t)?);
                }
                mat.push(row);
            }
            let det = det_with_err(mat, prec)?;
            if det.sign_certain().is_none() || det.value().is_zero() {
                return Err(Error::ValidationFailed(
                    "unit log-embedding matrix is singular within precision".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Determinant by fraction-free-ish Gaussian elimination on BigReal.
pub fn det_with_err(mut m: Vec<Vec<BigReal>>, prec: Prec) -> Result<BigReal> {
    let n = m.len();
    let mut det = prec.int(1);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&a, &b| {
                m[a][col]
                    .value()
                    .clone()
                    .abs()
                    .partial_cmp(&m[b][col].value().clone().abs())
                    .unwrap()
            })
            .unwrap();
        if piv != col {
            m.swap(piv, col);
            det = det.neg();
        }
        let pivot = m[col][col].clone();
        if pivot.value().is_zero() {
            return Ok(prec.int(0));
        }
        det = det.mul(&pivot);
        for row in col + 1..n {
            let f = m[row][col].div(&pivot)?;
            for k in col..n {
                let s = m[col][k].mul(&f);
                m[row][k] = m[row][k].sub(&s);
            }
        }
    }
    Ok(det)
}

/// Parse a unit-basis override file: line 1 "p d", then d-1 lines of
/// p-1 comma-separated rationals "num/den".
pub fn parse_unit_basis_file(text: &str, p: u64, d: usize) -> Result<Vec<CycloElement>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::InvalidInput("empty unit basis file".into()))?;
    let mut it = header.split_whitespace();
    let fp: u64 = it
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::InvalidInput("bad unit basis header".into()))?;
    let fd: usize = it
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::InvalidInput("bad unit basis header".into()))?;
    if fp != p || fd != d {
        return Err(Error::InvalidInput(format!(
            "unit basis file is for p={fp}, d={fd}; run needs p={p}, d={d}"
        )));
    }
    let mut units = Vec::with_capacity(d - 1);
    for line in lines.take(d - 1) {
        let coeffs: Result<Vec<Rational>> = line
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<Rational>()
                    .map_err(|e| Error::InvalidInput(format!("bad rational {tok:?}: {e}")))
            })
            .collect();
        units.push(CycloElement::from_coeffs(p, coeffs?)?);
    }
    if units.len() != d - 1 {
        return Err(Error::InvalidInput(format!(
            "unit basis file has {} unit lines, expected {}",
            units.len(),
            d - 1
        )));
    }
    Ok(units)
}

/// Spec-level operation: apply sigma_t to x.
pub fn galois_apply(t: u64, x: &CycloElement) -> CycloElement {
    x.galois(t)
}
