//! Siegel-function q-products, their asymptotic expansions with explicit
//! error constants, and the orbit units they assemble into.
//!
//! Conventions. A term carries the canonical lift (a1/p, a2/p) of a point
//! of M_p with 0 <= a1 < p and -(p-1)/2 <= a2 <= (p-1)/2. Fractional
//! powers are always taken through the upper half plane: q^x := e^(2 pi i x tau).
//! The constant gamma of a term absorbs the leading minus sign of the
//! product formula, so that g / (gamma q^ell) -> 1 at the cusp.

use crate::cyclo::{CycloElement, Embedder};
use crate::error::{Error, Result};
use crate::geometry::{lift, GroupContext, Orbit, Point};
use crate::precision::{BigComplex, BigReal, Prec};
use rug::{Integer, Rational};

/// Second Bernoulli polynomial over two, at an exact rational in [0, 1).
pub fn ell_of(a1: &Rational) -> Rational {
    debug_assert!(*a1 >= 0 && *a1 < 1);
    let b2 = Rational::from(a1 * a1) - a1 + Rational::from((1, 6));
    b2 / Rational::from(2)
}

/// One Siegel factor of an orbit unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SiegelTerm {
    pub p: u64,
    /// numerator of a1~ in [0, 1)
    pub a1: u64,
    /// signed numerator of a2~ in (-1/2, 1/2]
    pub a2: i64,
}

impl SiegelTerm {
    pub fn from_point(a: Point, p: u64) -> SiegelTerm {
        let l = lift(a, p);
        SiegelTerm {
            p,
            a1: l.num1,
            a2: l.num2,
        }
    }

    pub fn tilde1(&self) -> Rational {
        Rational::from((self.a1, self.p))
    }

    pub fn tilde2(&self) -> Rational {
        Rational::from((self.a2, self.p as i64))
    }

    /// q-order of the factor.
    pub fn ell(&self) -> Rational {
        ell_of(&self.tilde1())
    }

    /// The root-of-unity part of gamma, in turns (fraction of a full
    /// circle), with the leading minus sign of the product formula folded
    /// in as half a turn.
    pub fn gamma_turns(&self) -> Rational {
        // 1/2 + a2~ (a1~ - 1) / 2
        let base = self.tilde2() * (self.tilde1() - Rational::from(1)) / Rational::from(2);
        let t = base + Rational::from((1, 2));
        let fl = Rational::from(t.clone().floor());
        t - fl
    }

    /// For a1 = 0 the constant factor (1 - zeta^a2) is part of gamma.
    pub fn gamma_zeta_factor(&self) -> Option<i64> {
        (self.a1 == 0).then_some(self.a2)
    }

    /// Numeric value of gamma.
    pub fn gamma_value(&self, emb: &Embedder) -> BigComplex {
        let prec = emb.prec();
        let ang = prec
            .pi()
            .mul_i64(2)
            .mul(&prec.rational(&self.gamma_turns()));
        let mut v = BigComplex::cis(&ang);
        if let Some(b) = self.gamma_zeta_factor() {
            let f = BigComplex::one(prec).sub(&emb.zeta(b));
            v = v.mul(&f);
        }
        v
    }

    /// The retained logarithmic factor (exponent of t = q^(1/p) and the
    /// zeta exponent), for a1 != 0.
    pub fn retained(&self) -> Option<(u64, i64)> {
        if self.a1 == 0 {
            return None;
        }
        if 2 * self.a1 < self.p {
            Some((self.a1, self.a2))
        } else {
            Some((self.p - self.a1, -self.a2))
        }
    }

    /// Exact coefficients beta_1..beta_nu of the full formal logarithm
    /// log(g / (gamma q^ell)) as a series in x = q^(1/p).
    pub fn beta_series(&self, nu: usize) -> Vec<CycloElement> {
        let mut coeffs = vec![CycloElement::zero(self.p); nu];
        self.accumulate_log_series(&mut coeffs, None);
        coeffs
    }

    /// Same with the retained factor's logarithm removed.
    pub fn beta_prime_series(&self, nu: usize) -> Vec<CycloElement> {
        let mut coeffs = vec![CycloElement::zero(self.p); nu];
        self.accumulate_log_series(&mut coeffs, self.retained());
        coeffs
    }

    /// Add the coefficients of sum_n log(1 - zeta^(+-a2) x^M) for both
    /// product families, skipping `skip` if given. Entry k-1 of `coeffs`
    /// receives the x^k coefficient.
    fn accumulate_log_series(&self, coeffs: &mut [CycloElement], skip: Option<(u64, i64)>) {
        let nu = coeffs.len() as u64;
        let p = self.p;
        let mut add_family = |m0: u64, step: u64, zexp: i64| {
            // factors (1 - zeta^zexp x^M), M = m0, m0+step, ...
            let mut m = m0;
            while m <= nu {
                if Some((m, zexp)) != skip {
                    // log(1 - z) = -sum_k z^k / k
                    let mut k = 1u64;
                    while k * m <= nu {
                        let idx = (k * m - 1) as usize;
                        let term = CycloElement::zeta_pow(p, zexp * k as i64)
                            .scale(&Rational::from((-1i64, k as i64)));
                        coeffs[idx] = coeffs[idx].add(&term);
                        k += 1;
                    }
                }
                m += step;
            }
        };
        if self.a1 == 0 {
            // constant factor went into gamma; both families start at x^p
            add_family(p, p, self.a2);
            add_family(p, p, -self.a2);
        } else {
            add_family(self.a1, p, self.a2);
            add_family(p - self.a1, p, -self.a2);
        }
    }
}

/// e^(2 pi i r tau) for exact rational r.
pub fn qpow(tau: &BigComplex, r: &Rational, prec: Prec) -> Result<BigComplex> {
    let two_pi = prec.pi().mul_i64(2);
    let rr = prec.rational(r);
    // 2 pi i r (x + i y) = -2 pi r y + i 2 pi r x
    let re = two_pi.mul(&rr).mul(&tau.im).neg();
    let im = two_pi.mul(&rr).mul(&tau.re);
    BigComplex::new(re, im).exp()
}

/// Evaluate the infinite product for a Siegel factor at tau, truncating
/// when the remaining factors are certified closer to 1 than the target,
/// whose bound is folded into the error.
pub fn siegel_direct(term: &SiegelTerm, tau: &BigComplex, prec: Prec) -> Result<BigComplex> {
    let p = term.p;
    let one = BigComplex::one(prec);
    let q_abs = qpow(tau, &Rational::from(1), prec)?.abs()?;
    if q_abs.sub(&prec.ratio(1, 100)).sign_certain() != Some(std::cmp::Ordering::Less) {
        return Err(Error::InvalidInput(format!(
            "siegel_direct needs |q| < 0.01, got {}",
            q_abs.value().to_f64()
        )));
    }

    // phase part only; for a1 = 0 the (1 - zeta^a2) factor of gamma is
    // the n = 0 product factor and is supplied by the loop below
    let ang = prec
        .pi()
        .mul_i64(2)
        .mul(&prec.rational(&term.gamma_turns()));
    let lead = qpow(tau, &term.ell(), prec)?;
    let mut acc = BigComplex::cis(&ang).mul(&lead);

    let target = -(prec.bits() as i64) - 16;
    let t1 = term.tilde1();
    let zang = prec.pi().mul_i64(2).mul(&prec.ratio(term.a2, p as i64));
    let z_plus = BigComplex::cis(&zang);
    let z_minus = z_plus.conj();

    let mut n = 0u64;
    loop {
        let e1 = Rational::from(n) + &t1;
        let e2 = Rational::from(n + 1) - &t1;
        let f1 = one.sub(&qpow(tau, &e1, prec)?.mul(&z_plus));
        let f2 = one.sub(&qpow(tau, &e2, prec)?.mul(&z_minus));
        acc = acc.mul(&f1).mul(&f2);
        n += 1;
        // tail: remaining |log| <= 2.02 |q|^(n + a1~) / (1 - |q|)
        let tail = q_abs.pow_u32(n as u32).mul(&prec.ratio(21, 10));
        if tail.value().to_f64().log2() < target as f64 {
            let scale = acc.abs()?.mul(&tail).mul(&prec.ratio(11, 10));
            return Ok(acc.widen(&scale));
        }
        if n > 4 * prec.bits() as u64 {
            return Err(Error::PrecisionExhausted(
                "siegel product did not converge".into(),
            ));
        }
    }
}

impl SiegelTerm {
    /// gamma evaluated without an embedding table.
    pub fn gamma_value_tau(&self, prec: Prec) -> Result<BigComplex> {
        let ang = prec
            .pi()
            .mul_i64(2)
            .mul(&prec.rational(&self.gamma_turns()));
        let mut v = BigComplex::cis(&ang);
        if let Some(b) = self.gamma_zeta_factor() {
            let zang = prec.pi().mul_i64(2).mul(&prec.ratio(b, self.p as i64));
            let f = BigComplex::one(prec).sub(&BigComplex::cis(&zang));
            v = v.mul(&f);
        }
        Ok(v)
    }
}

/// Which asymptotic form of the per-term logarithm to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesMode {
    /// Retained logarithm only (nu = 0 variant).
    LogOnly,
    /// Retained logarithm plus beta' series up to nu.
    LogSeries,
    /// No logarithm, beta series up to nu; needs |q| <= 2^-p.
    NoLog,
}

/// log(g / (gamma q^ell)) by the truncated expansion, with the explicit
/// error constant folded into the (complex) error.
pub fn siegel_series(
    term: &SiegelTerm,
    tau: &BigComplex,
    nu: usize,
    mode: SeriesMode,
    prec: Prec,
) -> Result<BigComplex> {
    let p = term.p;
    let q_abs = qpow(tau, &Rational::from(1), prec)?.abs()?;
    let limit = prec.ratio(44, 10000);
    if q_abs.sub(&limit).sign_certain() == Some(std::cmp::Ordering::Greater) {
        return Err(Error::InvalidInput(
            "siegel_series needs |q| <= 0.0044".into(),
        ));
    }
    if mode == SeriesMode::NoLog {
        let two_neg_p = prec.ratio(1, 2).pow_u32(p as u32);
        if q_abs.sub(&two_neg_p).sign_certain() == Some(std::cmp::Ordering::Greater) {
            return Err(Error::InvalidInput(
                "no-log series needs |q| <= 2^-p".into(),
            ));
        }
    }

    let x = qpow(tau, &Rational::from((1, p)), prec)?;
    let emb = Embedder::new(p, prec);
    let mut val = BigComplex::zero(prec);

    // retained logarithm
    if mode != SeriesMode::NoLog {
        if let Some((m0, b0)) = term.retained() {
            let zb = emb.zeta(b0);
            let f = BigComplex::one(prec).sub(&x.pow_u32(m0 as u32).mul(&zb));
            let l = complex_ln(&f, prec)?;
            val = val.add(&l);
        }
    }

    // series part
    let coeffs = match mode {
        SeriesMode::LogOnly => Vec::new(),
        SeriesMode::LogSeries => term.beta_prime_series(nu),
        SeriesMode::NoLog => term.beta_series(nu),
    };
    let mut xp = BigComplex::one(prec);
    for c in &coeffs {
        xp = xp.mul(&x);
        if c.is_zero() {
            continue;
        }
        val = val.add(&emb.embed(c, 1).mul(&xp));
    }

    // explicit error constants
    let err = match mode {
        SeriesMode::LogOnly => {
            if term.a1 == 0 {
                q_abs.mul(&prec.ratio(202, 100))
            } else {
                q_abs.sqrt()?.mul(&prec.ratio(12, 10))
            }
        }
        SeriesMode::LogSeries => {
            let c = prec
                .ratio(22, 10)
                .mul_i64(nu as i64)
                .div(&prec.int(p as i64))?
                .add(&prec.ratio(31, 10));
            q_abs
                .pow_u32(1)
                .abs_fractional_pow(nu as u32 + 1, p as u32, prec)?
                .mul(&c)
        }
        SeriesMode::NoLog => {
            let c = prec
                .ratio(22, 10)
                .mul_i64(nu as i64)
                .div(&prec.int(p as i64))?
                .add(&prec.ratio(51, 10));
            q_abs
                .pow_u32(1)
                .abs_fractional_pow(nu as u32 + 1, p as u32, prec)?
                .mul(&c)
        }
    };
    Ok(val.widen(&err))
}

impl BigReal {
    /// |x|^(num/den) for a nonnegative x, via exp(log).
    pub fn abs_fractional_pow(&self, num: u32, den: u32, prec: Prec) -> Result<BigReal> {
        let a = self.abs();
        if a.value().is_zero() {
            return Ok(prec.int(0));
        }
        a.ln()?
            .mul_i64(num as i64)
            .div(&prec.int(den as i64))?
            .exp()
    }
}

/// Principal complex logarithm (argument from atan-free construction:
/// log|z| + i arg z with arg via the two-argument arctangent).
pub fn complex_ln(z: &BigComplex, prec: Prec) -> Result<BigComplex> {
    let re = z.norm_sqr().ln()?.mul(&prec.ratio(1, 2));
    let im = atan2(&z.im, &z.re, prec)?;
    Ok(BigComplex::new(re, im))
}

fn atan2(y: &BigReal, x: &BigReal, prec: Prec) -> Result<BigReal> {
    use rug::Float;
    // MPFR atan2 on the values; input errors propagate through the
    // gradient bound 1/r with r^2 = x^2 + y^2.
    let v = Float::with_val(prec.bits(), y.value().clone().atan2(x.value()));
    let round = crate::precision::ulp(&v);
    let r = x.mul(x).add(&y.mul(y)).sqrt()?;
    let spread = r.recip()?.value().to_f64().abs() * (x.err().to_f64() + y.err().to_f64());
    Ok(BigReal::with_err(v, round).widen_f64(spread * 1.01))
}

/// The modular unit attached to one right orbit.
#[derive(Debug, Clone)]
pub struct OrbitUnit {
    pub label: u64,
    pub m: u32,
    pub terms: Vec<SiegelTerm>,
}

pub fn build_orbit_unit(ctx: &GroupContext, orbit: &Orbit) -> OrbitUnit {
    let terms = orbit
        .members
        .iter()
        .map(|&a| SiegelTerm::from_point(a, ctx.p))
        .collect();
    OrbitUnit {
        label: orbit.label,
        m: ctx.m,
        terms,
    }
}

impl OrbitUnit {
    /// Numeric value of the unit at a point of the upper half plane.
    pub fn value_at(&self, tau: &BigComplex, prec: Prec) -> Result<BigComplex> {
        let mut acc = BigComplex::one(prec);
        for t in &self.terms {
            acc = acc.mul(&siegel_direct(t, tau, prec)?.pow_u32(self.m));
        }
        Ok(acc)
    }
}

/// Per-(cusp, Galois conjugate, branch) expansion data for an orbit unit:
/// the exact order, the leading constant, retained logarithm inventory and
/// the exact beta series at orbit level.
pub struct CuspSeries {
    pub p: u64,
    pub m: u32,
    /// q_c^(1/p)-order of the conjugate unit at this cusp (an integer).
    pub ord: i64,
    /// zeta-exponents (with multiplicity) of the (1 - zeta^b) factors of
    /// gamma; each enters with exponent m.
    pub gamma_factors: Vec<i64>,
    /// root-of-unity turns of gamma (exact; absolute value 1).
    pub gamma_turns: Rational,
    /// retained log factors (t-exponent, zeta-exponent), multiplicity m each.
    pub retained: Vec<(u64, i64)>,
    /// orbit-level beta' coefficients (already scaled by m), k = 1..=nu.
    pub beta_prime: Vec<CycloElement>,
    /// orbit-level beta coefficients (already scaled by m).
    pub beta: Vec<CycloElement>,
}

impl CuspSeries {
    /// Assemble the expansion of the l-th Galois conjugate of the
    /// distinguished unit at the given cusp.
    pub fn build(
        ctx: &GroupContext,
        orbits: &[Orbit],
        l: usize,
        cusp: u64,
        nu: usize,
    ) -> Result<CuspSeries> {
        let p = ctx.p;
        let label = ctx.conjugate_orbit_label(l);
        let orbit = orbits
            .iter()
            .find(|o| o.label == label)
            .ok_or_else(|| Error::InvalidInput(format!("no orbit labeled {label}")))?;

        let mat = ctx.sigma_c_mod_p(cusp);

        let terms: Vec<SiegelTerm> = orbit
            .members
            .iter()
            .map(|&a| SiegelTerm::from_point(ctx.apply_right(a, &mat), p))
            .collect();

        // exact order: p m sum ell_a
        let mut ell_sum = Rational::new();
        for t in &terms {
            ell_sum += t.ell();
        }
        let ord_rat = ell_sum * Rational::from((p, 1)) * Rational::from((ctx.m, 1));
        if !ord_rat.is_integer() {
            return Err(Error::ValidationFailed(format!(
                "cusp order {ord_rat} is not an integer"
            )));
        }
        let ord = ord_rat
            .numer()
            .to_i64()
            .ok_or_else(|| Error::ValidationFailed("cusp order overflows i64".into()))?;

        let mut gamma_factors = Vec::new();
        let mut gamma_turns = Rational::new();
        let mut retained = Vec::new();
        for t in &terms {
            gamma_turns += t.gamma_turns() * Rational::from((ctx.m, 1));
            if let Some(b) = t.gamma_zeta_factor() {
                gamma_factors.push(b);
            }
            if let Some(r) = t.retained() {
                retained.push(r);
            }
        }
        gamma_turns -= Rational::from(gamma_turns.clone().floor());

        let mut beta_prime = vec![CycloElement::zero(p); nu];
        let mut beta = vec![CycloElement::zero(p); nu];
        let m_rat = Rational::from((ctx.m, 1));
        for t in &terms {
            for (k, c) in t.beta_prime_series(nu).into_iter().enumerate() {
                beta_prime[k] = beta_prime[k].add(&c.scale(&m_rat));
            }
            for (k, c) in t.beta_series(nu).into_iter().enumerate() {
                beta[k] = beta[k].add(&c.scale(&m_rat));
            }
        }

        Ok(CuspSeries {
            p,
            m: ctx.m,
            ord,
            gamma_factors,
            gamma_turns,
            retained,
            beta_prime,
            beta,
        })
    }

    /// log |gamma_{c,l}| = m * sum log |1 - zeta^b|.
    pub fn gamma_log_abs(&self, emb: &Embedder) -> Result<BigReal> {
        let prec = emb.prec();
        let mut acc = prec.int(0);
        let one = BigComplex::one(prec);
        for &b in &self.gamma_factors {
            let f = one.sub(&emb.zeta(b));
            acc = acc.add(&f.norm_sqr().ln()?.mul(&prec.ratio(1, 2)));
        }
        Ok(acc.mul_i64(self.m as i64))
    }

    /// The exact gamma constant as an element of Q(zeta_p) times a root
    /// of unity; only the cyclotomic part matters for heights.
    pub fn gamma_cyclotomic_part(&self) -> CycloElement {
        let mut acc = CycloElement::one(self.p);
        let one = CycloElement::one(self.p);
        for &b in &self.gamma_factors {
            let f = one.sub(&CycloElement::zeta_pow(self.p, b));
            for _ in 0..self.m {
                acc = acc.mul(&f);
            }
        }
        acc
    }

    /// Count of Siegel factors, (p+1)|H|.
    pub fn term_count(&self) -> usize {
        self.retained.len() + self.gamma_factors.len()
    }
}

/// Modes for evaluating log |U^sigma_l| at a real point of the cusp chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogMode {
    /// Retained logs, no series (error 1.2 C |q|^(1/2)).
    FullLog,
    /// Retained logs plus series to nu (error C (2.2 nu/p + 3.1) |t|^(nu+1)).
    Truncated(usize),
    /// Order and constant only (needs |q| <= 2^-p; error 3.2 C |t|).
    SmallQ,
}

/// log |U^sigma_l (P)| as a function of the real chart variable
/// t = q_c^(1/p), with the explicit error constant folded in.
/// The series must have been built on the branch matching sign(t).
pub fn unit_log_abs(
    series: &CuspSeries,
    t: &BigReal,
    mode: LogMode,
    emb: &Embedder,
) -> Result<BigReal> {
    let prec = emb.prec();
    let p = series.p;
    let t_abs = t.abs();
    let cusp_limit = prec
        .pi()
        .mul(&prec.int(3).sqrt()?)
        .neg()
        .div(&prec.int(p as i64))?
        .exp()?;
    if t_abs.sub(&cusp_limit).sign_certain() == Some(std::cmp::Ordering::Greater) {
        return Err(Error::InvalidInput("t outside the cusp chart".into()));
    }
    if mode == LogMode::SmallQ {
        let half = prec.ratio(1, 2);
        if t_abs.sub(&half).sign_certain() == Some(std::cmp::Ordering::Greater) {
            return Err(Error::InvalidInput("small-q mode needs |q| <= 2^-p".into()));
        }
    }

    // C = m (p+1) |H| = m * number of Siegel factors
    let c_const = series.m as i64 * series.term_count() as i64;

    let log_t = t_abs.ln()?;
    let mut val = log_t.mul_i64(series.ord).add(&series.gamma_log_abs(emb)?);

    match mode {
        LogMode::SmallQ => {
            let e = t_abs.mul_i64(c_const).mul(&prec.ratio(32, 10));
            Ok(val.widen(&e))
        }
        LogMode::FullLog | LogMode::Truncated(_) => {
            // retained logarithms: m * log |1 - zeta^b t^M|
            let mut powers = vec![prec.int(1)];
            for _ in 0..p {
                powers.push(powers.last().unwrap().mul(t));
            }
            for &(m0, b0) in &series.retained {
                let z = emb.zeta(b0);
                let tm = &powers[m0 as usize];
                let re = prec.int(1).sub(&z.re.mul(tm));
                let im = z.im.mul(tm).neg();
                let half_log = re.mul(&re).add(&im.mul(&im)).ln()?.mul(&prec.ratio(1, 2));
                val = val.add(&half_log.mul_i64(series.m as i64));
            }
            match mode {
                LogMode::FullLog => {
                    let q_half = t_abs.abs_fractional_pow(p as u32, 2, prec)?;
                    let e = q_half.mul_i64(c_const).mul(&prec.ratio(12, 10));
                    Ok(val.widen(&e))
                }
                LogMode::Truncated(nu) => {
                    let mut xp = prec.int(1);
                    for c in series.beta_prime.iter().take(nu) {
                        xp = xp.mul(t);
                        if c.is_zero() {
                            continue;
                        }
                        val = val.add(&emb.embed(c, 1).re.mul(&xp));
                    }
                    let cc = prec
                        .ratio(22, 10)
                        .mul_i64(nu as i64)
                        .div(&prec.int(p as i64))?
                        .add(&prec.ratio(31, 10));
                    let e = t_abs.pow_u32(nu as u32 + 1).mul_i64(c_const).mul(&cc);
                    Ok(val.widen(&e))
                }
                LogMode::SmallQ => unreachable!(),
            }
        }
    }
}

/// Report for the full product identity and the orbit-level identity.
pub struct ProductIdentityReport {
    pub max_full_residual: f64,
    pub max_orbit_residual: f64,
    pub sign_positive: bool,
    pub samples: usize,
}

/// Check prod_{a in M_p} g_a^(12p) = p^(12p) (sign +) and
/// prod_l u_{O_l} = +-p^m at random tau with im tau in [1, 2].
pub fn product_identity_check(
    ctx: &GroupContext,
    prec: Prec,
    samples: usize,
    seed: u64,
) -> Result<ProductIdentityReport> {
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    let mut rng = StdRng::seed_from_u64(seed);
    let p = ctx.p;

    let orbits = ctx.unit_orbits();
    let units: Vec<OrbitUnit> = orbits.iter().map(|o| build_orbit_unit(ctx, o)).collect();

    let p_big = prec.integer(&Integer::from(p));
    let p12p = p_big.pow_u32(12 * p as u32);
    let pm = p_big.pow_u32(ctx.m);

    let mut max_full: f64 = 0.0;
    let mut max_orbit: f64 = 0.0;
    let mut sign_positive = true;

    for _ in 0..samples {
        let x = rng.gen_range(0.0..1.0);
        let y = rng.gen_range(1.0..2.0);
        let tau = BigComplex::new(prec.from_f64(x), prec.from_f64(y));

        // all-of-M_p product at exponent 12p
        let mut acc = BigComplex::one(prec);
        for xx in 0..p {
            for yy in 0..p {
                if xx == 0 && yy == 0 {
                    continue;
                }
                let term = SiegelTerm::from_point((xx, yy), p);
                acc = acc.mul(&siegel_direct(&term, &tau, prec)?.pow_u32(12 * p as u32));
            }
        }
        let resid = acc.re.sub(&p12p).abs().div(&p12p)?.value().to_f64()
            + acc.im.abs().div(&p12p)?.value().to_f64();
        max_full = max_full.max(resid);
        if acc.re.value().is_sign_negative() {
            sign_positive = false;
        }

        // orbit product at exponent m
        let mut uo = BigComplex::one(prec);
        for u in &units {
            uo = uo.mul(&u.value_at(&tau, prec)?);
        }
        let r1 = uo.re.abs().sub(&pm).abs().div(&pm)?.value().to_f64()
            + uo.im.abs().div(&pm)?.value().to_f64();
        max_orbit = max_orbit.max(r1);
    }

    Ok(ProductIdentityReport {
        max_full_residual: max_full,
        max_orbit_residual: max_orbit,
        sign_positive,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::HSpec;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn tau_of(x: f64, y: f64, prec: Prec) -> BigComplex {
        BigComplex::new(prec.from_f64(x), prec.from_f64(y))
    }

    #[test]
    fn ell_values() {
        assert_eq!(ell_of(&Rational::from(0)), Rational::from((1, 12)));
        assert_eq!(ell_of(&Rational::from((1, 2))), Rational::from((-1, 24)));
        // max over multiples of 1/p is at 0
        let p = 11;
        let max = (0..p)
            .map(|a| ell_of(&Rational::from((a, p))))
            .max()
            .unwrap();
        assert_eq!(max, Rational::from((1, 12)));
        // |ell| <= 1/12 always
        for a in 0..p {
            let e = ell_of(&Rational::from((a, p)));
            assert!(e.clone().abs() <= Rational::from((1, 12)));
        }
    }

    #[test]
    fn direct_product_converges_and_conjugates() {
        let prec = Prec::new(192).unwrap();
        let term = SiegelTerm { p: 7, a1: 1, a2: 2 };
        let conj = SiegelTerm {
            p: 7,
            a1: 1,
            a2: -2,
        };
        let tau = tau_of(0.3, 1.1, prec);
        let tau_conj = tau_of(-0.3, 1.1, prec);
        let a = siegel_direct(&term, &tau, prec).unwrap();
        let b = siegel_direct(&conj, &tau_conj, prec).unwrap();
        assert!(a.re.sub(&b.re).abs().value().to_f64() < 1e-40);
        assert!(a.im.add(&b.im).abs().value().to_f64() < 1e-40);
    }

    #[test]
    fn series_matches_direct_all_modes() {
        let prec = Prec::new(256).unwrap();
        let mut rng = StdRng::seed_from_u64(7);
        let p = 11u64;
        for _ in 0..25 {
            let a1 = rng.gen_range(0..p);
            let a2max = (p - 1) / 2;
            let a2 = rng.gen_range(-(a2max as i64)..=(a2max as i64));
            if a1 == 0 && a2 == 0 {
                continue;
            }
            let term = SiegelTerm { p, a1, a2 };
            let y = rng.gen_range(0.87..3.0);
            let x = rng.gen_range(0.0..1.0);
            let tau = tau_of(x, y, prec);
            let direct = siegel_direct(&term, &tau, prec).unwrap();
            let gamma = term.gamma_value_tau(prec).unwrap();
            let lead = qpow(&tau, &term.ell(), prec).unwrap();

            for (mode, nu) in [
                (SeriesMode::LogOnly, 0usize),
                (SeriesMode::LogSeries, 8),
                (SeriesMode::LogSeries, 25),
            ] {
                let log_val = siegel_series(&term, &tau, nu, mode, prec).unwrap();
                let recon = gamma.mul(&lead).mul(&log_val_exp(&log_val).unwrap());
                let dist = recon.dist_value(&direct);
                let budget = recon.err_upper() + direct.err_upper();
                assert!(
                    dist <= budget,
                    "mode {mode:?} nu {nu}: dist {dist:e} > budget {budget:e}"
                );
            }
        }
    }

    fn log_val_exp(l: &BigComplex) -> Result<BigComplex> {
        // exp with the O_1 error of the log folded multiplicatively
        let e = l.exp()?;
        let bound = l.re.err().to_f64().max(l.im.err().to_f64());
        let infl = (bound.exp() - 1.0) * 1.05 + 1e-300;
        let scale = e
            .abs()?
            .mul(&Prec::new(l.prec().max(64)).unwrap().from_f64(infl));
        Ok(e.widen(&scale))
    }

    #[test]
    fn no_log_mode_at_tiny_q() {
        let prec = Prec::new(320).unwrap();
        let p = 7u64;
        let term = SiegelTerm { p, a1: 3, a2: -1 };
        // |q| = e^(-2 pi * 1.3) < 2^-7
        let tau = tau_of(0.25, 1.3, prec);
        let direct = siegel_direct(&term, &tau, prec).unwrap();
        let gamma = term.gamma_value_tau(prec).unwrap();
        let lead = qpow(&tau, &term.ell(), prec).unwrap();
        let log_val = siegel_series(&term, &tau, 12, SeriesMode::NoLog, prec).unwrap();
        let recon = gamma.mul(&lead).mul(&log_val_exp(&log_val).unwrap());
        let dist = recon.dist_value(&direct);
        assert!(dist <= recon.err_upper() + direct.err_upper());
    }

    #[test]
    fn beta_coefficient_bounds() {
        // archimedean: |beta_k| <= 2k/p + 2 at every embedding;
        // p-adic: k * beta_k is integral
        let p = 11u64;
        let prec = Prec::new(192).unwrap();
        let emb = Embedder::new(p, prec);
        for (a1, a2) in [(0u64, 3i64), (1, 0), (4, -5), (7, 2), (10, 1)] {
            let term = SiegelTerm { p, a1, a2 };
            let betas = term.beta_series(50);
            for (i, b) in betas.iter().enumerate() {
                let k = i + 1;
                let bound = 2.0 * k as f64 / p as f64 + 2.0;
                for t in 1..p {
                    let v = emb.embed(b, t).abs().unwrap();
                    assert!(
                        v.value().to_f64() - v.err().to_f64() <= bound,
                        "term ({a1},{a2}) beta_{k} at embedding {t} too big"
                    );
                }
                let kb = b.scale(&Rational::from(k as u64));
                assert!(kb.is_integral(), "k beta_k not integral at k = {k}");
            }
        }
    }

    #[test]
    fn well_definedness_two_liftings() {
        // shifting a2~ by whole turns in a conjugation-respecting way must
        // not change the orbit unit value
        let prec = Prec::new(192).unwrap();
        let ctx = GroupContext::build(7, &HSpec::PmOne).unwrap();
        let orbits = ctx.unit_orbits();
        let unit = build_orbit_unit(&ctx, &orbits[0]);
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..5 {
            let tau = tau_of(rng.gen_range(0.0..1.0), rng.gen_range(1.0..2.0), prec);
            let v1 = unit.value_at(&tau, prec).unwrap();
            // second lifting: a2~ -> a2~ + 1 on the positive side and
            // a2~ - 1 on the negative side (conjugation-respecting)
            let mut acc = BigComplex::one(prec);
            for t in &unit.terms {
                let shifted = SiegelTerm {
                    p: t.p,
                    a1: t.a1,
                    a2: if t.a2 >= 0 {
                        t.a2 + t.p as i64
                    } else {
                        t.a2 - t.p as i64
                    },
                };
                acc = acc.mul(&shifted_direct(&shifted, &tau, prec).pow_u32(unit.m));
            }
            let dist = acc.dist_value(&v1);
            assert!(
                dist <= acc.err_upper() + v1.err_upper() + 1e-40,
                "liftings disagree by {dist:e}"
            );
        }
    }

    // same product formula but with the shifted numerators kept verbatim
    fn shifted_direct(term: &SiegelTerm, tau: &BigComplex, prec: Prec) -> BigComplex {
        let p = term.p;
        let one = BigComplex::one(prec);
        let t1 = Rational::from((term.a1, p));
        let t2 = Rational::from((term.a2, p as i64));
        // gamma part: -e^(pi i a2~(a1~ - 1)) [1 - e^(2 pi i a2~) if a1 = 0]
        let turns = t2.clone() * (t1.clone() - Rational::from(1)) / Rational::from(2)
            + Rational::from((1, 2));
        let ang = prec.pi().mul_i64(2).mul(&prec.rational(&turns));
        let mut acc = BigComplex::cis(&ang);
        acc = acc.mul(&qpow(tau, &ell_of(&t1), prec).unwrap());
        let zpang = prec.pi().mul_i64(2).mul(&prec.rational(&t2));
        let zp = BigComplex::cis(&zpang);
        let zm = zp.conj();
        for n in 0..40u32 {
            let e1 = Rational::from(n) + &t1;
            let e2 = Rational::from(n + 1) - &t1;
            let f1 = one.sub(&qpow(tau, &e1, prec).unwrap().mul(&zp));
            let f2 = one.sub(&qpow(tau, &e2, prec).unwrap().mul(&zm));
            acc = acc.mul(&f1).mul(&f2);
        }
        // generous tail
        acc.widen(&prec.parse("1e-30").unwrap())
    }

    #[test]
    fn orbit_unit_term_count() {
        for p in [7u64, 11] {
            let ctx = GroupContext::build(p, &HSpec::PmOne).unwrap();
            for o in ctx.unit_orbits() {
                let u = build_orbit_unit(&ctx, &o);
                assert_eq!(u.terms.len() as u64, ctx.unit_orbit_size());
            }
        }
    }

    #[test]
    fn product_identities_p7() {
        let ctx = GroupContext::build(7, &HSpec::PmOne).unwrap();
        let prec = Prec::new(320).unwrap();
        let rep = product_identity_check(&ctx, prec, 3, 123).unwrap();
        assert!(rep.sign_positive);
        assert!(
            rep.max_full_residual < 1e-20,
            "full residual {:e}",
            rep.max_full_residual
        );
        assert!(
            rep.max_orbit_residual < 1e-20,
            "orbit residual {:e}",
            rep.max_orbit_residual
        );
    }

    #[test]
    fn product_identity_at_tau_2i() {
        let prec = Prec::new(512).unwrap();
        let p = 7u64;
        let tau = BigComplex::new(prec.int(0), prec.int(2));
        let mut acc = BigComplex::one(prec);
        for x in 0..p {
            for y in 0..p {
                if x == 0 && y == 0 {
                    continue;
                }
                let term = SiegelTerm::from_point((x, y), p);
                acc = acc.mul(
                    &siegel_direct(&term, &tau, prec)
                        .unwrap()
                        .pow_u32(12 * p as u32),
                );
            }
        }
        let p84 = prec.int(7).pow_u32(84);
        let resid = acc.re.sub(&p84).abs().div(&p84).unwrap().value().to_f64()
            + acc.im.abs().div(&p84).unwrap().value().to_f64();
        assert!(resid < 1e-20, "residual {resid:e}");
        assert!(acc.re.value().is_sign_positive());
    }

    #[test]
    fn cusp_series_order_and_degree_bounds() {
        for (p, spec) in [(7u64, HSpec::PmOne), (11, HSpec::PmOne)] {
            let ctx = GroupContext::build(p, &spec).unwrap();
            let orbits = ctx.unit_orbits();
            let hsz = ctx.h_len();
            let bound = ctx.m as i64 * p as i64 * (p as i64 + 1) * hsz as i64 / 12;
            for cusp in 1..=(p - 1) / 2 {
                let mut ord_sum = 0i64;
                let mut pos_sum = 0i64;
                for l in 0..ctx.d {
                    let cs = CuspSeries::build(&ctx, &orbits, l, cusp, 4).unwrap();
                    assert!(cs.ord.abs() <= bound, "order bound violated");
                    ord_sum += cs.ord;
                    pos_sum += cs.ord.max(0);
                    assert_eq!(cs.term_count() as u64, ctx.unit_orbit_size());
                }
                // conjugates sum to zero at every cusp
                assert_eq!(ord_sum, 0, "p={p} cusp={cusp}");
                // degree bound: sum of positive orders <= m p (p^2-1) |H| / 48
                let deg_bound = ctx.m as i64 * p as i64 * ((p * p - 1) as i64) * hsz as i64 / 48;
                assert!(pos_sum <= deg_bound);
            }
        }
    }

    #[test]
    fn gamma_height_bound() {
        let ctx = GroupContext::build(11, &HSpec::PmOne).unwrap();
        let orbits = ctx.unit_orbits();
        let prec = Prec::new(256).unwrap();
        let emb = Embedder::new(11, prec);
        let bound = 2.0 * ctx.h_len() as f64 * 2f64.ln();
        for l in 0..ctx.d {
            for cusp in 1..=5 {
                let cs = CuspSeries::build(&ctx, &orbits, l, cusp, 2).unwrap();
                let g = cs.gamma_cyclotomic_part();
                let h = emb.height(&g).unwrap();
                assert!(
                    h.value().to_f64() <= bound + 1e-9,
                    "gamma height {} exceeds {bound}",
                    h.value().to_f64()
                );
            }
        }
    }
}
