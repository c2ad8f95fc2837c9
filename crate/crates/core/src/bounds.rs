//! The explicit Baker-type bound B_0 for the exponents and its numerical
//! reduction by the Baker-Davenport method, per cusp.

use crate::cyclo::Embedder;
use crate::error::{Error, Result};
use crate::geometry::GroupContext;
use crate::precision::{continued_fraction_expand, BigReal, Prec};
use crate::relation::{CuspFrame, UnitLogMatrix};

use serde::Serialize;

/// One step of the reduction chain, recorded for the report.
#[derive(Debug, Clone, Serialize)]
pub struct ReductionStep {
    pub t_param: String,
    pub r: String,
    pub r_delta_dist: String,
    pub r_lambda_dist: String,
    pub xi: String,
    pub b_next: String,
}

/// B_0 with its inputs, the reduction chain, and the final bounds.
#[derive(Debug, Clone, Serialize)]
pub struct BoundLedger {
    pub cusp: u64,
    pub mho1: String,
    pub mho2: String,
    pub b0: String,
    pub b0_log10: f64,
    pub steps: Vec<ReductionStep>,
    pub xi_hat: String,
    pub xi_hat_value: f64,
    pub theta: f64,
    pub clamped: bool,
    pub stalled: bool,
    /// bound from quick enumeration, filled in later
    pub upsilon: Option<f64>,
}

/// Matveev's constant C(n) = 40000 * 30^n * n^5.5.
pub fn matveev_c(n: u32, prec: Prec) -> BigReal {
    let base = prec.int(40000).mul(&prec.int(30).pow_u32(n));
    let n5 = prec.int(n as i64).pow_u32(5);
    let nhalf = prec.int(n as i64).sqrt().expect("n >= 1");
    base.mul(&n5).mul(&nhalf)
}

/// The explicit bound B_0 = 2 mho1 log mho1 + 2 mho2 with
/// mho1 = 10^8 delta_max 9^d d^6 p^(4d+2) h(eta_1)...h(eta_{d-1}) and
/// mho2 = mho1 + vartheta_max + 4 kappa p^3.
pub fn baker_b0(
    ctx: &GroupContext,
    ulm: &UnitLogMatrix,
    frame: &CuspFrame,
    prec: Prec,
) -> Result<(BigReal, BigReal, BigReal)> {
    if ctx.d < 3 {
        return Err(Error::InvalidInput("the bound needs d >= 3".into()));
    }
    let d = ctx.d as u32;
    let p = ctx.p;
    let mut mho1 = prec
        .parse("1e8")?
        .mul(&frame.delta_max)
        .mul(&prec.int(9).pow_u32(d))
        .mul(&prec.int(d as i64).pow_u32(6))
        .mul(&prec.int(p as i64).pow_u32(4 * d + 2));
    for h in &ulm.unit_heights {
        mho1 = mho1.mul(h);
    }
    let mho2 = mho1
        .add(&frame.vartheta_max)
        .add(&frame.kappa.mul_i64(4).mul(&prec.int(p as i64).pow_u32(3)));
    let b0 = mho1.mul(&mho1.ln()?).mul_i64(2).add(&mho2.mul_i64(2));
    Ok((mho1, mho2, b0))
}

fn fmt(x: &BigReal) -> String {
    format!("{:e}", x.value().to_f64())
}

/// Run the Baker-Davenport reduction at one cusp, producing the chain of
/// shrinking bounds for log|q_c^-1| and the final clamped bound Xi-hat.
///
/// `build_frame` must rebuild the cusp frame at a requested precision;
/// the distances ||r delta|| require roughly 2 log2(T B^2) sound bits.
pub fn davenport_reduce(
    ctx: &GroupContext,
    ulm_builder: &dyn Fn(Prec) -> Result<(UnitLogMatrix, CuspFrame)>,
    cusp: u64,
    b0: &BigReal,
    mho1: &BigReal,
    mho2: &BigReal,
    t0: f64,
    prec: Prec,
    min_bits: u32,
) -> Result<BoundLedger> {
    let p = ctx.p;
    let mut steps = Vec::new();
    let mut stalled = false;

    let log2_b0 = b0.value().to_f64().log2();
    let hi_bits = (64.0 + 2.0 * (t0.log2() + 2.0 * log2_b0).ceil()).ceil() as u32;
    let hi = Prec::new(hi_bits.max(prec.bits()).max(min_bits))?;
    let (ulm_hi, frame_hi) = ulm_builder(hi)?;
    // recompute the starting bound at the working precision of the
    // reduction, so that floors of T B are always decided
    let (_, _, b0) = baker_b0(ctx, &ulm_hi, &frame_hi, hi)?;
    let b0 = &b0;

    let delta1 = frame_hi.delta[frame_hi.pivot].clone();
    let delta2 = frame_hi.delta[frame_hi.companion].clone();
    let vt1 = frame_hi.vartheta[frame_hi.pivot].clone();
    let vt2 = frame_hi.vartheta[frame_hi.companion].clone();
    let delta = delta2.div(&delta1)?;
    let lambda = delta.mul(&vt1).sub(&vt2);
    let theta = frame_hi.theta_big.clone();
    let one_plus_delta = hi.int(1).add(&delta.abs());

    // Detect the degenerate case lambda = u delta + v with integers u, v
    // (it occurs for small d, where the Galois symmetry is circulant);
    // there the inhomogeneous trick can never fire and the homogeneous
    // best-approximation bound is used instead.
    let degenerate = {
        let df = delta.value().to_f64();
        let lf = lambda.value().to_f64();
        let mut best: Option<(i64, f64)> = None;
        for u in -65536i64..=65536 {
            let x = lf - u as f64 * df;
            let dist = (x - x.round()).abs();
            if best.map_or(true, |(_, b)| dist < b) {
                best = Some((u, dist));
            }
        }
        match best {
            Some((u, dist)) if dist < 1e-9 => {
                let v = lambda.sub(&delta.mul_i64(u)).round_certain()?;
                let eps0 = lambda.sub(&delta.mul_i64(u)).sub(&hi.integer(&v)).abs();
                Some((u, v, eps0))
            }
            _ => None,
        }
    };

    let mut b_cur = b0.clone();
    let mut xi_prev: Option<BigReal> = None;

    for _round in 0..16 {
        if let Some((u, _v, eps0)) = &degenerate {
            // |(b2+v) - delta (b1-u)| <= R + eps0 with |b1 - u| <= B + |u|;
            // for b1 != u the left side is at least the best-approximation
            // minimum mu = ||q_k delta|| over denominators up to B + |u|.
            let b_shift = b_cur.add(&hi.int(u.abs()));
            let limit = b_shift.floor_certain()?;
            let cf = continued_fraction_expand(&delta, &limit)?;
            let (_, qk) = cf.best_denominator_below(&limit).ok_or_else(|| {
                Error::ReductionStalled("no convergent in degenerate case".into())
            })?;
            let mu = hi.integer(&qk).mul(&delta).nearest_integer_distance()?;
            let margin = mu.sub(eps0);
            if margin.sign_certain() != Some(std::cmp::Ordering::Greater) {
                stalled = true;
                break;
            }
            let xi_h = hi
                .ratio(32, 10)
                .mul(&one_plus_delta)
                .mul(&theta)
                .div(&margin)?
                .ln()?
                .mul_i64(p as i64);
            // the exceptional exponent b1 = u pins the depth directly
            let xi_e = hi
                .int(*u)
                .sub(&vt1)
                .div(&delta1)?
                .add(&hi.ratio(32, 10).div(&delta1.abs())?);
            let xi = BigReal::max_val(BigReal::max_val(xi_h, xi_e), hi.int(0));
            let b_next = delta1.abs().mul(&xi).add(&vt1.abs()).add(&hi.ratio(32, 10));
            steps.push(ReductionStep {
                t_param: "degenerate".into(),
                r: qk.to_string(),
                r_delta_dist: fmt(&mu),
                r_lambda_dist: fmt(eps0),
                xi: fmt(&xi),
                b_next: fmt(&b_next),
            });
            let improved = match &xi_prev {
                None => true,
                Some(prev) => xi.value().to_f64() < prev.value().to_f64() * 0.99,
            };
            xi_prev = Some(match &xi_prev {
                Some(prev) if prev.value().to_f64() < xi.value().to_f64() => prev.clone(),
                _ => xi.clone(),
            });
            if !improved || b_next.value().to_f64() >= b_cur.value().to_f64() {
                break;
            }
            b_cur = b_next;
            continue;
        }
        let mut t_param = t0;
        let xi = loop {
            // r = largest convergent denominator <= floor(T B)
            let tb = b_cur.mul(&hi.from_f64(t_param));
            let tb_floor = tb.floor_certain()?;
            let cf = continued_fraction_expand(&delta, &tb_floor)?;
            let (_, r) = cf
                .best_denominator_below(&tb_floor)
                .ok_or_else(|| Error::ReductionStalled("no convergent below T B".into()))?;
            let r_real = hi.integer(&r);
            let rd = r_real.mul(&delta).nearest_integer_distance()?;
            let rl = r_real.mul(&lambda).nearest_integer_distance()?;
            // require ||r delta|| <= (T B)^-1
            let thresh = tb.recip()?;
            if rd.sub(&thresh).sign_certain() == Some(std::cmp::Ordering::Greater) {
                return Err(Error::PrecisionExhausted(
                    "best approximation misses the T B threshold".into(),
                ));
            }
            let two_over_t = hi.from_f64(2.0 / t_param);
            match rl.sub(&two_over_t).sign_certain() {
                Some(std::cmp::Ordering::Less) => {
                    t_param *= 10.0;
                    if t_param > t0 * 1e6 {
                        stalled = true;
                        break None;
                    }
                }
                None => {
                    return Err(Error::PrecisionExhausted(
                        "||r lambda|| threshold undecided".into(),
                    ))
                }
                _ => {
                    // Xi = p log( 3.2 (1+|delta|) Theta T B / (||r lambda|| - 1/T) )
                    let num = hi.ratio(32, 10).mul(&one_plus_delta).mul(&theta).mul(&tb);
                    let den = rl.sub(&hi.from_f64(1.0 / t_param));
                    let xi = num.div(&den)?.ln()?.mul_i64(p as i64);
                    steps.push(ReductionStep {
                        t_param: format!("{t_param}"),
                        r: r.to_string(),
                        r_delta_dist: fmt(&rd),
                        r_lambda_dist: fmt(&rl),
                        xi: fmt(&xi),
                        b_next: String::new(),
                    });
                    break Some(xi);
                }
            }
        };
        let Some(xi) = xi else { break };

        // next bound for the pivot exponent: |b1| <= |delta1| Xi + |vt1| + 3.2
        let b_next = delta1.abs().mul(&xi).add(&vt1.abs()).add(&hi.ratio(32, 10));
        if let Some(last) = steps.last_mut() {
            last.b_next = fmt(&b_next);
        }

        let improved = match &xi_prev {
            None => true,
            Some(prev) => xi.value().to_f64() < prev.value().to_f64() * 0.99,
        };
        xi_prev = Some(match &xi_prev {
            Some(prev) if prev.value().to_f64() < xi.value().to_f64() => prev.clone(),
            _ => xi.clone(),
        });
        if !improved || b_next.value().to_f64() >= b_cur.value().to_f64() {
            break;
        }
        b_cur = b_next;
    }

    let xi_hat_raw = match xi_prev {
        Some(x) => x,
        None => {
            // reduction never produced a bound; fall back to what B_0 gives
            stalled = true;
            b0.mul_i64(4)
        }
    };
    // clamp: Xi-hat >= max(p log Theta, p log 2)
    let p_log_theta = theta.ln()?.mul_i64(p as i64);
    let p_log_2 = hi.int(2).ln()?.mul_i64(p as i64);
    let clamp = BigReal::max_val(p_log_theta, p_log_2);
    let clamped = xi_hat_raw.value() < clamp.value();
    let xi_hat = BigReal::max_val(xi_hat_raw, clamp);

    Ok(BoundLedger {
        cusp,
        mho1: fmt(mho1),
        mho2: fmt(mho2),
        b0: fmt(b0),
        b0_log10: b0.value().to_f64().log10(),
        steps,
        xi_hat: fmt(&xi_hat),
        xi_hat_value: xi_hat.value().to_f64(),
        theta: theta.value().to_f64(),
        clamped,
        stalled,
        upsilon: None,
    })
}

/// Convenience: full bound computation for one cusp (B_0 then reduction).
pub fn bound_one_cusp(
    ctx: &GroupContext,
    units: &crate::cyclo::UnitSystem,
    cusp: u64,
    nu: usize,
    t0: f64,
    prec: Prec,
) -> Result<(BoundLedger, BigReal)> {
    let orbits = ctx.unit_orbits();
    let emb = Embedder::new(ctx.p, prec);
    let ulm = UnitLogMatrix::build(ctx, units, &emb)?;
    let frame = CuspFrame::build(ctx, &orbits, &ulm, cusp, nu, &emb)?;
    let (mho1, mho2, b0) = baker_b0(ctx, &ulm, &frame, prec)?;
    let builder = |bits: Prec| -> Result<(UnitLogMatrix, CuspFrame)> {
        let emb_hi = Embedder::new(ctx.p, bits);
        let ulm_hi = UnitLogMatrix::build(ctx, units, &emb_hi)?;
        let frame_hi = CuspFrame::build(ctx, &orbits, &ulm_hi, cusp, nu, &emb_hi)?;
        Ok((ulm_hi, frame_hi))
    };
    let ledger = crate::error::with_precision_retry(prec.bits(), 1 << 14, |bits| {
        davenport_reduce(ctx, &builder, cusp, &b0, &mho1, &mho2, t0, prec, bits)
    })?;
    let xi_hat = prec.from_f64(ledger.xi_hat_value);
    Ok((ledger, xi_hat))
}
