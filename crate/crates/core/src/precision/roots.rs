use super::{BigReal, Prec};
use crate::error::{Error, Result};
use std::cmp::Ordering;

/// Bracketed root finding by Brent's method.
///
/// The sign change on the input bracket must be decisive (certain sign at
/// both ends). The result `t` satisfies `a <= t <= b` and carries an err
/// covering the final bracket, which is shrunk below `tol`.
pub fn brent_root<F>(mut f: F, a: &BigReal, b: &BigReal, tol: &BigReal) -> Result<BigReal>
where
    F: FnMut(&BigReal) -> Result<BigReal>,
{
    let prec = Prec::new(a.prec().max(b.prec()))?;
    let fa = f(a)?;
    let fb = f(b)?;
    let sa = fa.sign_certain();
    let sb = fb.sign_certain();
    if sa == Some(Ordering::Equal) {
        return Ok(a.clone());
    }
    if sb == Some(Ordering::Equal) {
        return Ok(b.clone());
    }
    match (sa, sb) {
        (Some(x), Some(y)) if x != y => {}
        (None, _) | (_, None) => {
            return Err(Error::PrecisionExhausted(
                "bracket endpoint sign undecided".into(),
            ))
        }
        _ => {
            return Err(Error::NoSignChange {
                a: format!("{:e}", a.value()),
                b: format!("{:e}", b.value()),
            })
        }
    }

    // Classic Brent iteration; steering decisions use the computed values.
    let mut xa = a.clone();
    let mut xb = b.clone();
    let mut va = fa;
    let mut vb = fb;
    if vb.value().clone().abs() > va.value().clone().abs() {
        std::mem::swap(&mut xa, &mut xb);
        std::mem::swap(&mut va, &mut vb);
    }
    let mut xc = xa.clone();
    let mut vc = va.clone();
    let mut mflag = true;
    let mut xd = xa.clone();
    let max_iter = 64 + 2 * prec.bits() as usize;

    for _ in 0..max_iter {
        let width = xb.sub(&xa).abs();
        if width.value() <= tol.value() {
            let mid = xa.add(&xb).div(&prec.int(2))?;
            let half = width.div(&prec.int(2))?;
            return Ok(mid.widen(&half));
        }
        if vb.value().is_zero() {
            return Ok(xb.clone());
        }

        let mid = xa.add(&xb).div(&prec.int(2))?;
        let interp = || -> Result<BigReal> {
            if va.value() != vc.value() && vb.value() != vc.value() {
                // inverse quadratic interpolation
                let t1 = xa.mul(&vb).mul(&vc).div(&va.sub(&vb).mul(&va.sub(&vc)))?;
                let t2 = xb.mul(&va).mul(&vc).div(&vb.sub(&va).mul(&vb.sub(&vc)))?;
                let t3 = xc.mul(&va).mul(&vb).div(&vc.sub(&va).mul(&vc.sub(&vb)))?;
                Ok(t1.add(&t2).add(&t3))
            } else {
                // secant
                Ok(xb.sub(&vb.mul(&xb.sub(&xa)).div(&vb.sub(&va))?))
            }
        };
        // ill-conditioned interpolation falls back to bisection
        let s = interp().unwrap_or_else(|_| mid.clone());
        // the abscissa is a point we choose, not a measured quantity
        let s = BigReal::exact(s.value().clone());
        let cond_out = {
            let lo = mid.value().clone().min(xb.value());
            let hi = mid.value().clone().max(xb.value());
            s.value() < &lo || s.value() > &hi
        };
        let dbc = xb.sub(&xc).abs();
        let dcd = xc.sub(&xd).abs();
        let sb_dist = s.sub(&xb).abs();
        let cond_slow = if mflag {
            sb_dist.value().clone() * 2u32 >= *dbc.value()
        } else {
            sb_dist.value().clone() * 2u32 >= *dcd.value()
        };
        let s = if cond_out || cond_slow {
            mflag = true;
            mid
        } else {
            mflag = false;
            s
        };

        let vs = f(&s)?;
        xd = xc.clone();
        xc = xb.clone();
        vc = vb.clone();
        let sign_a = va.value().is_sign_negative();
        let sign_s = vs.value().is_sign_negative();
        if sign_a != sign_s {
            xb = s;
            vb = vs;
        } else {
            xa = s;
            va = vs;
        }
        if vb.value().clone().abs() > va.value().clone().abs() {
            std::mem::swap(&mut xa, &mut xb);
            std::mem::swap(&mut va, &mut vb);
        }
    }
    Err(Error::PrecisionExhausted(format!(
        "brent did not reach tol {:e}",
        tol.value()
    )))
}

/// Locate the sign changes of `fprime` on `[lo, hi]` by a grid scan
/// followed by Brent refinement. Returns the roots sorted ascending.
///
/// The grid density is the caller's accuracy/cost trade-off; a missed
/// double root between adjacent grid points is the residual risk, so
/// callers pick `grid` generously.
pub fn find_roots_of_derivative<F>(
    mut fprime: F,
    lo: &BigReal,
    hi: &BigReal,
    grid: usize,
    tol: &BigReal,
) -> Result<Vec<BigReal>>
where
    F: FnMut(&BigReal) -> Result<BigReal>,
{
    let prec = Prec::new(lo.prec().max(hi.prec()))?;
    let n = grid.max(8);
    let step = hi.sub(lo).div(&prec.int(n as i64))?;
    let mut pts = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let t = lo.add(&step.mul_i64(i as i64));
        let t = if i == n { hi.clone() } else { t };
        let v = fprime(&t)?;
        pts.push((t, v));
    }
    let mut roots: Vec<BigReal> = Vec::new();
    for w in pts.windows(2) {
        let (t0, v0) = &w[0];
        let (t1, v1) = &w[1];
        if v0.value().is_zero() {
            roots.push(t0.clone());
            continue;
        }
        if v0.value().is_sign_negative() != v1.value().is_sign_negative() && !v1.value().is_zero() {
            let r = brent_root(&mut fprime, t0, t1, tol)?;
            roots.push(r);
        }
    }
    if let Some((t, v)) = pts.last() {
        if v.value().is_zero() {
            roots.push(t.clone());
        }
    }
    roots.sort_by(|a, b| a.value().partial_cmp(b.value()).unwrap());
    roots.dedup_by(|a, b| a.sub(b).abs().value() <= &(tol.value().clone() * 4u32));
    Ok(roots)
}
