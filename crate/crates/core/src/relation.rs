//! The linear-algebra bridge between unit values and exponent vectors:
//! the matrix of unit logarithms with a certified inverse, per-cusp
//! constants, and the expression of the exponents b_k through the real
//! chart variable t = q_c^(1/p).

use crate::cyclo::{Embedder, UnitSystem};
use crate::error::{Error, Result};
use crate::geometry::{GroupContext, Orbit};
use crate::precision::{BigReal, Prec};
use crate::siegel::{unit_log_abs, CuspSeries, LogMode};

/// d x d matrix M[k][l] = log |eta_l^(sigma_k)| (eta_0 in column 0)
/// together with a certified inverse.
pub struct UnitLogMatrix {
    pub d: usize,
    pub mat: Vec<Vec<BigReal>>,
    pub alpha: Vec<Vec<BigReal>>,
    /// kappa = max_k sum_l |alpha_kl|
    pub kappa: BigReal,
    /// residual bound ||M alpha - I||_inf actually achieved
    pub residual: f64,
    pub unit_heights: Vec<BigReal>,
}

impl UnitLogMatrix {
    pub fn build(ctx: &GroupContext, units: &UnitSystem, emb: &Embedder) -> Result<UnitLogMatrix> {
        let prec = emb.prec();
        let d = ctx.d;
        let mut mat = Vec::with_capacity(d);
        for k in 0..d {
            let t = ctx.galois_rep(k);
            let mut row = Vec::with_capacity(d);
            row.push(emb.log_abs(&units.eta0, t)?);
            for eta in &units.etas {
                row.push(emb.log_abs(eta, t)?);
            }
            mat.push(row);
        }
        let alpha = invert_certified(&mat, prec)?;

        let mut kappa = prec.int(0);
        for row in &alpha {
            let mut s = prec.int(0);
            for x in row {
                s = s.add(&x.abs());
            }
            kappa = BigReal::max_val(kappa, s);
        }

        // residual for the report
        let mut residual: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let mut s = prec.int(0);
                for l in 0..d {
                    s = s.add(&mat[i][l].mul(&alpha[l][j]));
                }
                let target = if i == j { 1.0 } else { 0.0 };
                residual = residual.max((s.value().to_f64() - target).abs());
            }
        }

        let mut unit_heights = Vec::with_capacity(d - 1);
        for eta in &units.etas {
            unit_heights.push(emb.height(eta)?);
        }

        Ok(UnitLogMatrix {
            d,
            mat,
            alpha,
            kappa,
            residual,
            unit_heights,
        })
    }

    /// Apply alpha to a vector of log-values: b_k = sum_l alpha_kl v_l.
    pub fn solve(&self, v: &[BigReal]) -> Vec<BigReal> {
        (0..self.d)
            .map(|k| {
                let mut acc = v[0].mul(&self.alpha[k][0]);
                for l in 1..self.d {
                    acc = acc.add(&v[l].mul(&self.alpha[k][l]));
                }
                acc
            })
            .collect()
    }
}

/// Gauss-Jordan inverse with a posteriori certification: the inverse
/// entries are widened by ||A|| ||R|| / (1 - ||R||) where R = M A - I.
fn invert_certified(m: &[Vec<BigReal>], prec: Prec) -> Result<Vec<Vec<BigReal>>> {
    let n = m.len();
    let mut a: Vec<Vec<BigReal>> = m.to_vec();
    let mut inv: Vec<Vec<BigReal>> = (0..n)
        .map(|i| (0..n).map(|j| prec.int((i == j) as i64)).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| {
                a[x][col]
                    .value()
                    .clone()
                    .abs()
                    .partial_cmp(&a[y][col].value().clone().abs())
                    .unwrap()
            })
            .unwrap();
        a.swap(col, piv);
        inv.swap(col, piv);
        let pivot = a[col][col].clone();
        if pivot.sign_certain().is_none() {
            return Err(Error::PrecisionExhausted(
                "unit log matrix singular within precision".into(),
            ));
        }
        for j in 0..n {
            a[col][j] = a[col][j].div(&pivot)?;
            inv[col][j] = inv[col][j].div(&pivot)?;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let f = a[row][col].clone();
            for j in 0..n {
                let s1 = a[col][j].mul(&f);
                a[row][j] = a[row][j].sub(&s1);
                let s2 = inv[col][j].mul(&f);
                inv[row][j] = inv[row][j].sub(&s2);
            }
        }
    }

    // certify via the residual
    let mut r_norm = prec.int(0);
    for i in 0..n {
        let mut row_sum = prec.int(0);
        for j in 0..n {
            let mut s = prec.int(0);
            for l in 0..n {
                s = s.add(&m[i][l].mul(&inv[l][j]));
            }
            if i == j {
                s = s.sub(&prec.int(1));
            }
            row_sum = row_sum.add(&s.abs());
        }
        r_norm = BigReal::max_val(r_norm, row_sum);
    }
    let mut a_norm = prec.int(0);
    for row in &inv {
        let mut s = prec.int(0);
        for x in row {
            s = s.add(&x.abs());
        }
        a_norm = BigReal::max_val(a_norm, s);
    }
    let denom = prec.int(1).sub(&r_norm);
    if denom.sign_certain() != Some(std::cmp::Ordering::Greater) {
        return Err(Error::PrecisionExhausted(
            "inverse residual too large".into(),
        ));
    }
    let bound = a_norm.mul(&r_norm).div(&denom)?;
    let widened = inv
        .into_iter()
        .map(|row| row.into_iter().map(|x| x.widen(&bound)).collect())
        .collect();
    Ok(widened)
}

/// Grouped evaluation data for the functions f_k on one branch.
pub struct FkData {
    /// (t-exponent, cos(2 pi b / p), weight per k)
    pub log_terms: Vec<(u64, BigReal, Vec<BigReal>)>,
    /// q_poly[k][j] = coefficient of t^(j+1) in Q_{c,k}
    pub q_poly: Vec<Vec<BigReal>>,
}

/// All per-cusp data: the constants of the exponent formulas and the
/// expansion series of every Galois conjugate on both branches.
pub struct CuspFrame {
    pub cusp: u64,
    pub d: usize,
    pub p: u64,
    pub m: u32,
    pub nu: usize,
    pub ords: Vec<i64>,
    pub delta: Vec<BigReal>,
    pub vartheta: Vec<BigReal>,
    pub delta_max: BigReal,
    pub vartheta_max: BigReal,
    pub kappa: BigReal,
    /// Theta = kappa m (p+1) |H|
    pub theta_big: BigReal,
    /// pivot: index of the smallest nonzero |delta_k|, k >= 1
    pub pivot: usize,
    /// companion: index of the largest |delta_k| among k >= 1, k != pivot
    pub companion: usize,
    pub series: Vec<CuspSeries>,
    pub fk: FkData,
}

/// Evaluation modes for the exponent formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BkMode {
    /// Retained logs only; |q| <= e^(-pi sqrt 3).
    FullLog,
    /// Retained logs plus series; real q.
    Truncated,
    /// Order and constant only; |q| <= 2^-p.
    SmallQ,
}

impl CuspFrame {
    pub fn build(
        ctx: &GroupContext,
        orbits: &[Orbit],
        ulm: &UnitLogMatrix,
        cusp: u64,
        nu: usize,
        emb: &Embedder,
    ) -> Result<CuspFrame> {
        let prec = emb.prec();
        let d = ctx.d;
        let p = ctx.p;

        let mut series = Vec::with_capacity(d);
        for l in 0..d {
            series.push(CuspSeries::build(ctx, orbits, l, cusp, nu)?);
        }
        let ords: Vec<i64> = series.iter().map(|s| s.ord).collect();
        if ords.iter().sum::<i64>() != 0 {
            return Err(Error::ValidationFailed(format!(
                "cusp {cusp}: conjugate orders sum to {} instead of 0",
                ords.iter().sum::<i64>()
            )));
        }

        let gamma_logs: Vec<BigReal> = series
            .iter()
            .map(|s| s.gamma_log_abs(emb))
            .collect::<Result<_>>()?;

        let pinv = prec.int(1).div(&prec.int(p as i64))?;
        let mut delta = Vec::with_capacity(d);
        let mut vartheta = Vec::with_capacity(d);
        for k in 0..d {
            let mut dk = prec.int(0);
            let mut vk = prec.int(0);
            for l in 0..d {
                dk = dk.add(&ulm.alpha[k][l].mul_i64(ords[l]));
                vk = vk.add(&ulm.alpha[k][l].mul(&gamma_logs[l]));
            }
            delta.push(dk.mul(&pinv).neg());
            vartheta.push(vk);
        }

        let mut delta_max = prec.int(0);
        let mut vartheta_max = prec.int(0);
        for k in 0..d {
            delta_max = BigReal::max_val(delta_max, delta[k].abs());
            vartheta_max = BigReal::max_val(vartheta_max, vartheta[k].abs());
        }

        // pivot: smallest nonzero |delta_k| for k >= 1; a delta is treated
        // as zero when its interval straddles zero.
        let mut pivot = None;
        for k in 1..d {
            if delta[k].sign_certain().is_none() {
                continue;
            }
            match pivot {
                None => pivot = Some(k),
                Some(j) => {
                    if delta[k].abs().value() < delta[j].abs().value() {
                        pivot = Some(k);
                    }
                }
            }
        }
        let pivot = pivot.ok_or_else(|| {
            Error::PrecisionExhausted(format!("no certainly-nonzero delta at cusp {cusp}"))
        })?;
        let mut companion = None;
        for k in 1..d {
            if k == pivot || delta[k].sign_certain().is_none() {
                continue;
            }
            match companion {
                None => companion = Some(k),
                Some(j) => {
                    if delta[k].abs().value() > delta[j].abs().value() {
                        companion = Some(k);
                    }
                }
            }
        }
        let companion = companion.ok_or_else(|| {
            Error::PrecisionExhausted(format!("no companion index at cusp {cusp}"))
        })?;

        let kappa = ulm.kappa.clone();
        let theta_big = kappa
            .mul_i64(ctx.m as i64)
            .mul_i64((p + 1) as i64)
            .mul_i64(ctx.h_len() as i64);

        let fk = build_fk_data(ctx, ulm, &series, nu, emb)?;

        Ok(CuspFrame {
            cusp,
            d,
            p,
            m: ctx.m,
            nu,
            ords,
            delta,
            vartheta,
            delta_max,
            vartheta_max,
            kappa,
            theta_big,
            pivot,
            companion,
            series,
            fk,
        })
    }

    /// The real chart variable of a real q-parameter: the real p-th root.
    pub fn t_of_q(&self, q: &BigReal, prec: Prec) -> Result<BigReal> {
        let t_abs = q.abs().abs_fractional_pow(1, self.p as u32, prec)?;
        Ok(if q.value().is_sign_negative() {
            t_abs.neg()
        } else {
            t_abs
        })
    }

    /// Exponent estimates b_0..b_{d-1} from a real q-parameter.
    pub fn bk_from_q(
        &self,
        ulm: &UnitLogMatrix,
        q: &BigReal,
        mode: BkMode,
        emb: &Embedder,
    ) -> Result<Vec<BigReal>> {
        let prec = emb.prec();
        let t = self.t_of_q(q, prec)?;
        let lmode = match mode {
            BkMode::FullLog => LogMode::FullLog,
            BkMode::Truncated => LogMode::Truncated(self.nu),
            BkMode::SmallQ => LogMode::SmallQ,
        };
        let v: Vec<BigReal> = self
            .series
            .iter()
            .map(|s| unit_log_abs(s, &t, lmode, emb))
            .collect::<Result<_>>()?;
        Ok(ulm.solve(&v))
    }

    /// Upper bound for B = max_k |b_k| given a lower bound on log|q^-1|.
    pub fn b_bound(&self, log_inv_q: &BigReal, prec: Prec) -> Result<BigReal> {
        let general = self
            .delta_max
            .mul(log_inv_q)
            .add(&self.vartheta_max)
            .add(&self.theta_big.mul(&prec.int(self.p as i64).ln()?));
        let plog2 = prec.int(2).ln()?.mul_i64(self.p as i64);
        if log_inv_q.sub(&plog2).sign_certain() == Some(std::cmp::Ordering::Greater) {
            let small = self
                .delta_max
                .mul(log_inv_q)
                .add(&self.vartheta_max)
                .add(&self.theta_big.mul(&prec.ratio(16, 10)));
            Ok(BigReal::min_val(general, small))
        } else {
            Ok(general)
        }
    }

    /// Evaluate all f_k at a real chart point t.
    pub fn fk_all(&self, t: &BigReal, prec: Prec) -> Result<Vec<BigReal>> {
        let data = &self.fk;
        let mut powers = Vec::with_capacity(self.p as usize + 1);
        powers.push(prec.int(1));
        for _ in 0..self.p.max(self.nu as u64) {
            powers.push(powers.last().unwrap().mul(t));
        }
        let log_t_abs = t.abs().ln()?;
        let mut out = Vec::with_capacity(self.d);
        // shared log values
        let mut logs = Vec::with_capacity(data.log_terms.len());
        for (mexp, cosb, _) in &data.log_terms {
            let tm = &powers[*mexp as usize];
            let arg = prec.int(1).sub(&cosb.mul(tm).mul_i64(2)).add(&tm.mul(tm));
            logs.push(arg.ln()?.mul(&prec.ratio(1, 2)));
        }
        for k in 0..self.d {
            let mut acc = log_t_abs
                .mul(&self.delta[k])
                .mul_i64(-(self.p as i64))
                .add(&self.vartheta[k]);
            for (g, lv) in logs.iter().enumerate() {
                acc = acc.add(&lv.mul(&data.log_terms[g].2[k]));
            }
            // Q_k by direct power sum (powers are precomputed)
            for (j, c) in data.q_poly[k].iter().enumerate() {
                acc = acc.add(&c.mul(&powers[j + 1]));
            }
            out.push(acc);
        }
        Ok(out)
    }

    /// f at the pivot index only.
    pub fn f_pivot(&self, t: &BigReal, prec: Prec) -> Result<BigReal> {
        Ok(self.fk_all(t, prec)?.swap_remove(self.pivot))
    }

    /// Analytic derivative of f_pivot.
    pub fn f_pivot_prime(&self, t: &BigReal, prec: Prec) -> Result<BigReal> {
        let data = &self.fk;
        let k = self.pivot;
        let mut powers = Vec::with_capacity(self.p as usize + 1);
        powers.push(prec.int(1));
        for _ in 0..self.p.max(self.nu as u64) {
            powers.push(powers.last().unwrap().mul(t));
        }
        let mut acc = self.delta[k].mul_i64(-(self.p as i64)).div(t)?;
        for (mexp, cosb, w) in &data.log_terms {
            if w[k].value().is_zero() {
                continue;
            }
            let m = *mexp;
            let tm = &powers[m as usize];
            let tm1 = &powers[(m - 1) as usize];
            let den = prec.int(1).sub(&cosb.mul(tm).mul_i64(2)).add(&tm.mul(tm));
            let num = tm1.mul_i64(m as i64).mul(&tm.sub(cosb));
            acc = acc.add(&w[k].mul(&num.div(&den)?));
        }
        for (j, c) in data.q_poly[k].iter().enumerate() {
            acc = acc.add(&c.mul(&powers[j]).mul_i64(j as i64 + 1));
        }
        Ok(acc)
    }

    /// The truncation error bound of f_k at |t|: Theta (2.2 nu/p + 3.1) |t|^(nu+1).
    pub fn fk_error(&self, t_abs: &BigReal, prec: Prec) -> Result<BigReal> {
        let c = prec
            .ratio(22, 10)
            .mul_i64(self.nu as i64)
            .div(&prec.int(self.p as i64))?
            .add(&prec.ratio(31, 10));
        Ok(self
            .theta_big
            .mul(&c)
            .mul(&t_abs.pow_u32(self.nu as u32 + 1)))
    }
}

fn build_fk_data(
    ctx: &GroupContext,
    ulm: &UnitLogMatrix,
    series: &[CuspSeries],
    nu: usize,
    emb: &Embedder,
) -> Result<FkData> {
    let prec = emb.prec();
    let d = ctx.d;
    let p = ctx.p;
    // group retained logs by (exponent, |b|)
    let mut groups: std::collections::BTreeMap<(u64, u64), Vec<i64>> = Default::default();
    for (l, s) in series.iter().enumerate() {
        for &(mexp, b) in &s.retained {
            let key = (
                mexp,
                b.rem_euclid(p as i64).min((-b).rem_euclid(p as i64)) as u64,
            );
            groups.entry(key).or_insert_with(|| vec![0; d])[l] += 1;
        }
    }
    let mut log_terms = Vec::with_capacity(groups.len());
    for ((mexp, babs), counts) in groups {
        let ang = prec.pi().mul_i64(2).mul(&prec.ratio(babs as i64, p as i64));
        let cosb = ang.cos();
        let mut weights = Vec::with_capacity(d);
        for k in 0..d {
            let mut w = prec.int(0);
            for l in 0..d {
                if counts[l] != 0 {
                    w = w.add(&ulm.alpha[k][l].mul_i64(counts[l] * ctx.m as i64));
                }
            }
            weights.push(w);
        }
        log_terms.push((mexp, cosb, weights));
    }

    // Q_{c,k} coefficients: alpha-weighted real parts of the orbit series
    let mut re_beta: Vec<Vec<BigReal>> = Vec::with_capacity(d);
    for s in series {
        let mut v = Vec::with_capacity(nu);
        for c in &s.beta_prime {
            if c.is_zero() {
                v.push(prec.int(0));
            } else {
                v.push(emb.embed(c, 1).re);
            }
        }
        re_beta.push(v);
    }
    let mut q_poly = Vec::with_capacity(d);
    for k in 0..d {
        let mut coeffs = Vec::with_capacity(nu);
        for j in 0..nu {
            let mut acc = prec.int(0);
            for l in 0..d {
                acc = acc.add(&ulm.alpha[k][l].mul(&re_beta[l][j]));
            }
            coeffs.push(acc);
        }
        q_poly.push(coeffs);
    }
    Ok(FkData { log_terms, q_poly })
}

/// CM discriminants and j-invariants of the thirteen rational CM points.
pub const CM_POINTS: [(i64, i64); 13] = [
    (-3, 0),
    (-12, 54000),
    (-27, -12288000),
    (-4, 1728),
    (-16, 287496),
    (-7, -3375),
    (-28, 16581375),
    (-8, 8000),
    (-11, -32768),
    (-19, -884736),
    (-43, -884736000),
    (-67, -147197952000),
    (-163, -262537412640768000),
];

/// A CM point lies on the curve of level p exactly when p is inert in
/// the CM order, i.e. the discriminant is a non-residue mod p.
pub fn cm_on_curve(p: u64, disc: i64) -> bool {
    crate::geometry::legendre(disc, p) == -1
}

/// The real q-parameter of the CM point of discriminant D:
/// e^(-pi sqrt|D|) for D = 0 mod 4, -e^(-pi sqrt|D|) for D = 1 mod 4.
pub fn cm_q(disc: i64, prec: Prec) -> Result<BigReal> {
    let a = prec.int(-disc).sqrt()?;
    let q = prec.pi().mul(&a).neg().exp()?;
    Ok(if disc.rem_euclid(4) == 1 { q.neg() } else { q })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::HSpec;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    struct Fixture {
        ctx: GroupContext,
        ulm: UnitLogMatrix,
        emb: Embedder,
        orbits: Vec<Orbit>,
    }

    fn fixture(p: u64, bits: u32) -> Fixture {
        let ctx = GroupContext::build(p, &HSpec::PmOne).unwrap();
        let units = UnitSystem::build(&ctx, None).unwrap();
        let emb = Embedder::new(p, Prec::new(bits).unwrap());
        let ulm = UnitLogMatrix::build(&ctx, &units, &emb).unwrap();
        let orbits = ctx.unit_orbits();
        Fixture {
            ctx,
            ulm,
            emb,
            orbits,
        }
    }

    #[test]
    fn unit_log_matrix_row_sums() {
        let f = fixture(11, 256);
        let prec = f.emb.prec();
        // columns 1..d-1 sum to 0 (norm +-1), column 0 sums to log p
        for col in 0..f.ulm.d {
            let mut s = prec.int(0);
            for row in 0..f.ulm.d {
                s = s.add(&f.ulm.mat[row][col]);
            }
            let target = if col == 0 {
                prec.int(11).ln().unwrap()
            } else {
                prec.int(0)
            };
            let diff = s.sub(&target).abs();
            assert!(diff.value().to_f64() <= diff.err().to_f64() + 1e-60);
        }
        assert!(f.ulm.residual < 2f64.powi(-(256 / 2)));
    }

    #[test]
    fn exponent_reconstruction() {
        let f = fixture(11, 256);
        let prec = f.emb.prec();
        let mut rng = StdRng::seed_from_u64(99);
        for _ in 0..100 {
            let b: Vec<i64> = (0..f.ulm.d).map(|_| rng.gen_range(-50..50)).collect();
            let v: Vec<BigReal> = (0..f.ulm.d)
                .map(|k| {
                    let mut acc = prec.int(0);
                    for l in 0..f.ulm.d {
                        acc = acc.add(&f.ulm.mat[k][l].mul_i64(b[l]));
                    }
                    acc
                })
                .collect();
            let rec = f.ulm.solve(&v);
            for (k, r) in rec.iter().enumerate() {
                let diff = (r.value().to_f64() - b[k] as f64).abs();
                assert!(diff <= r.err().to_f64() + 1e-40, "k={k} diff={diff:e}");
                assert!(r.err().to_f64() < 0.5, "reconstruction too fuzzy");
            }
        }
    }

    #[test]
    fn delta_zero_row_and_matrix_relation() {
        for p in [7u64, 11] {
            let f = fixture(p, 256);
            let prec = f.emb.prec();
            for cusp in 1..=(p - 1) / 2 {
                let frame = CuspFrame::build(&f.ctx, &f.orbits, &f.ulm, cusp, 8, &f.emb).unwrap();
                // delta_{c,0} = 0
                let d0 = &frame.delta[0];
                assert!(
                    d0.value().to_f64().abs() <= d0.err().to_f64().max(1e-20),
                    "p={p} cusp={cusp}: delta_0 = {}",
                    d0.value().to_f64()
                );
                // M delta = -(1/p) ord
                for k in 0..frame.d {
                    let mut s = prec.int(0);
                    for l in 0..frame.d {
                        s = s.add(&f.ulm.mat[k][l].mul(&frame.delta[l]));
                    }
                    let target = -(frame.ords[k] as f64) / p as f64;
                    let diff = (s.value().to_f64() - target).abs();
                    assert!(diff <= s.err().to_f64() + 1e-30, "p={p} cusp={cusp} k={k}");
                }
                // at least one nonzero delta, pivot selected
                assert!(frame.delta[frame.pivot].sign_certain().is_some());
                assert!(frame.pivot != frame.companion);
            }
        }
    }

    #[test]
    fn q_poly_vanishes_at_zero_by_construction() {
        // Q_{c,k}(0) = 0 holds structurally: coefficients start at t^1
        let f = fixture(7, 192);
        let frame = CuspFrame::build(&f.ctx, &f.orbits, &f.ulm, 1, 6, &f.emb).unwrap();
        assert_eq!(frame.fk.q_poly.len(), f.ctx.d);
        for qk in &frame.fk.q_poly {
            assert_eq!(qk.len(), 6);
        }
    }

    fn nearest_int_distance(x: f64) -> f64 {
        (x - x.round()).abs()
    }

    // The central correctness oracle: at the q-parameter of a CM point on
    // the curve, the d exponent estimates are integers (b_0 = m) at the
    // point's nearest cusp.
    #[test]
    fn cm_points_give_integer_exponents_p11() {
        let f = fixture(11, 320);
        let prec = f.emb.prec();
        let frames: Vec<CuspFrame> = (1..=5)
            .map(|c| CuspFrame::build(&f.ctx, &f.orbits, &f.ulm, c, 48, &f.emb).unwrap())
            .collect();
        let mut found_any = 0;
        for (disc, j) in CM_POINTS {
            if !cm_on_curve(11, disc) {
                continue;
            }
            let q = cm_q(disc, prec).unwrap();
            let mut best: Option<(u64, Vec<f64>)> = None;
            let mut hit = false;
            for frame in &frames {
                let b = frame
                    .bk_from_q(&f.ulm, &q, BkMode::Truncated, &f.emb)
                    .unwrap();
                let dists: Vec<f64> = b
                    .iter()
                    .map(|x| nearest_int_distance(x.value().to_f64()))
                    .collect();
                let errs: Vec<f64> = b.iter().map(|x| x.err().to_f64()).collect();
                let all_int = dists.iter().zip(&errs).all(|(d, e)| d <= &e.max(1e-6));
                let b0 = b[0].value().to_f64();
                if all_int && (b0 - f.ctx.m as f64).abs() < 1e-3 {
                    hit = true;
                    break;
                }
                if best.is_none()
                    || dists.iter().cloned().fold(0.0, f64::max)
                        < best.as_ref().unwrap().1.iter().cloned().fold(0.0, f64::max)
                {
                    best = Some((frame.cusp, dists));
                }
            }
            assert!(
                hit,
                "CM disc {disc} (j = {j}) has no cusp with integral exponents; closest {best:?}"
            );
            found_any += 1;
        }
        assert_eq!(found_any, 7, "seven CM points lie on the level-11 curve");
    }

    #[test]
    fn cm_points_give_integer_exponents_p7() {
        let f = fixture(7, 320);
        let prec = f.emb.prec();
        let frames: Vec<CuspFrame> = (1..=3)
            .map(|c| CuspFrame::build(&f.ctx, &f.orbits, &f.ulm, c, 60, &f.emb).unwrap())
            .collect();
        for (disc, j) in CM_POINTS {
            if !cm_on_curve(7, disc) {
                continue;
            }
            let q = cm_q(disc, prec).unwrap();
            let hit = frames.iter().any(|frame| {
                let b = frame
                    .bk_from_q(&f.ulm, &q, BkMode::Truncated, &f.emb)
                    .unwrap();
                let ok = b.iter().all(|x| {
                    nearest_int_distance(x.value().to_f64()) <= x.err().to_f64().max(1e-6)
                });
                ok && (b[0].value().to_f64() - f.ctx.m as f64).abs() < 1e-3
            });
            assert!(
                hit,
                "CM disc {disc} (j = {j}) not integral at any cusp of level 7"
            );
        }
    }

    #[test]
    fn bk_modes_agree_deep_in_the_cusp() {
        let f = fixture(11, 320);
        let prec = f.emb.prec();
        let frame = CuspFrame::build(&f.ctx, &f.orbits, &f.ulm, 1, 24, &f.emb).unwrap();
        // |q| = 2^(-p-2)
        for sign in [1i64, -1] {
            let q = prec.ratio(sign, 4).mul(&prec.ratio(1, 2).pow_u32(11));
            let b1 = frame
                .bk_from_q(&f.ulm, &q, BkMode::FullLog, &f.emb)
                .unwrap();
            let b2 = frame.bk_from_q(&f.ulm, &q, BkMode::SmallQ, &f.emb).unwrap();
            let b3 = frame
                .bk_from_q(&f.ulm, &q, BkMode::Truncated, &f.emb)
                .unwrap();
            for k in 0..frame.d {
                for (x, y) in [(&b1[k], &b2[k]), (&b2[k], &b3[k]), (&b1[k], &b3[k])] {
                    let diff = (x.value().to_f64() - y.value().to_f64()).abs();
                    let budget = x.err().to_f64() + y.err().to_f64();
                    assert!(
                        diff <= budget,
                        "k={k} sign={sign} diff {diff:e} > {budget:e}"
                    );
                }
            }
        }
    }

    #[test]
    fn fk_matches_bk_truncated() {
        // f_k(t) is the same function as bk_from_q in truncated mode
        let f = fixture(11, 256);
        let prec = f.emb.prec();
        let frame = CuspFrame::build(&f.ctx, &f.orbits, &f.ulm, 2, 16, &f.emb).unwrap();
        for tval in [0.3f64, 0.52, -0.3, -0.52] {
            let t = prec.from_f64(tval);
            let q = t.pow_u32(11);
            let via_q = frame
                .bk_from_q(&f.ulm, &q, BkMode::Truncated, &f.emb)
                .unwrap();
            let via_f = frame.fk_all(&t, prec).unwrap();
            for k in 0..frame.d {
                let diff = (via_q[k].value().to_f64() - via_f[k].value().to_f64()).abs();
                let budget = via_q[k].err().to_f64() + via_f[k].err().to_f64() + 1e-30;
                assert!(diff <= budget, "k={k} t={tval}: {diff:e} > {budget:e}");
            }
        }
    }

    #[test]
    fn f_pivot_prime_matches_finite_differences() {
        let f = fixture(11, 256);
        let prec = f.emb.prec();
        let frame = CuspFrame::build(&f.ctx, &f.orbits, &f.ulm, 1, 12, &f.emb).unwrap();
        for tval in [0.2f64, 0.45, -0.2, -0.5] {
            let t = prec.from_f64(tval);
            let h = prec.parse("1e-20").unwrap();
            let fp = frame.f_pivot(&t.add(&h), prec).unwrap();
            let fm = frame.f_pivot(&t.sub(&h), prec).unwrap();
            let fd = fp.sub(&fm).div(&h.mul_i64(2)).unwrap();
            let an = frame.f_pivot_prime(&t, prec).unwrap();
            let rel = (fd.value().to_f64() - an.value().to_f64()).abs()
                / an.value().to_f64().abs().max(1.0);
            assert!(
                rel < 1e-12,
                "t={tval}: fd={} an={}",
                fd.value().to_f64(),
                an.value().to_f64()
            );
        }
    }

    #[test]
    fn brent_on_pivot_matches_bisection_oracle() {
        let f = fixture(11, 256);
        let prec = f.emb.prec();
        let frame = CuspFrame::build(&f.ctx, &f.orbits, &f.ulm, 1, 16, &f.emb).unwrap();
        let a = prec.from_f64(0.1);
        let b = prec.from_f64(0.52);
        let fa = frame.f_pivot(&a, prec).unwrap();
        let fb = frame.f_pivot(&b, prec).unwrap();
        let target = fa.add(&fb).div(&prec.int(2)).unwrap();
        let tol = prec.parse("1e-30").unwrap();
        let root = crate::precision::brent_root(
            |t| Ok(frame.f_pivot(t, prec)?.sub(&target)),
            &a,
            &b,
            &tol,
        )
        .unwrap();
        // bisection as an independent oracle
        let (mut lo, mut hi) = (a, b);
        let lo_neg = fa.sub(&target).value().is_sign_negative();
        for _ in 0..120 {
            let mid = lo.add(&hi).div(&prec.int(2)).unwrap();
            let v = frame.f_pivot(&mid, prec).unwrap().sub(&target);
            if v.value().is_sign_negative() == lo_neg {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let oracle = lo.add(&hi).div(&prec.int(2)).unwrap();
        assert!(
            root.sub(&oracle).abs().value().to_f64() < 1e-28,
            "brent {} vs bisection {}",
            root.value().to_f64(),
            oracle.value().to_f64()
        );
    }

    #[test]
    fn b_bound_monotone_and_clamped() {
        let f = fixture(11, 192);
        let prec = f.emb.prec();
        let frame = CuspFrame::build(&f.ctx, &f.orbits, &f.ulm, 1, 8, &f.emb).unwrap();
        let l1 = prec.int(50);
        let l2 = prec.int(500);
        let b1 = frame.b_bound(&l1, prec).unwrap();
        let b2 = frame.b_bound(&l2, prec).unwrap();
        assert!(b1.value() < b2.value());
    }
}
