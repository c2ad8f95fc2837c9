//! Orchestration: configuration, the validation suite, per-cusp bounds,
//! the two enumeration phases with checkpoint/resume, and the final
//! machine-readable report.

use crate::bounds::{baker_b0, davenport_reduce, BoundLedger};
use crate::cyclo::{parse_unit_basis_file, Embedder, UnitSystem};
use crate::enumeration::{
    b1_range, classify_interval, process_b1, quick_enumerate, small_j_filter, split_domain,
    B1Outcome, Candidate, Classification, MonotonePiece, QuickOutcome, SmallJResult,
};
use crate::error::{Error, Result};
use crate::geometry::{GroupContext, HSpec};
use crate::jinv::JSeries;
use crate::precision::{BigReal, Prec};
use crate::relation::{CuspFrame, UnitLogMatrix};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;
use std::sync::Mutex;
use std::time::Instant;

pub const CHECKPOINT_MAGIC: &str = "CARTANPTS v1";
const VALIDATION_SEED: u64 = 0x0c1d_2e3f;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub p: u64,
    pub subgroup: String,
    pub precision_bits: u32,
    pub nu_epsilon_target: f64,
    pub t0: f64,
    pub ell_budget: u64,
    pub exponent_denominator: u32,
    pub workers: usize,
    pub checkpoint_path: Option<String>,
    pub report_path: Option<String>,
    pub unit_basis_path: Option<String>,
    pub validate_only: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            p: 11,
            subgroup: "pm1".into(),
            precision_bits: 256,
            nu_epsilon_target: 1e-10,
            t0: 10.0,
            ell_budget: 500,
            exponent_denominator: 1,
            workers: 0,
            checkpoint_path: None,
            report_path: None,
            unit_basis_path: None,
            validate_only: false,
        }
    }
}

impl RunConfig {
    pub fn for_prime(p: u64) -> RunConfig {
        RunConfig {
            p,
            ..Default::default()
        }
    }

    fn fingerprint(&self) -> String {
        format!(
            "p={};H={};bits={};eps={:e};t0={};I={}",
            self.p,
            self.subgroup,
            self.precision_bits,
            self.nu_epsilon_target,
            self.t0,
            self.exponent_denominator
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ContextSummary {
    pub p: u64,
    pub xi: u64,
    pub h: Vec<u64>,
    pub d: usize,
    pub m: u32,
    pub cusps: u64,
    pub unit_orbit_size: u64,
    pub nu: usize,
    pub realized_epsilon: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationSummary {
    pub product_identity_residual: f64,
    pub orbit_identity_residual: f64,
    pub product_sign_positive: bool,
    pub matrix_residual: f64,
    pub delta0_max_abs: f64,
    pub reconstruction_max_dev: f64,
    pub unit_source: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SlowStats {
    pub pieces: usize,
    pub b1_total: u64,
    pub pruned_interval: u64,
    pub pruned_refined: u64,
    pub pruned_j: u64,
    pub flagged_nonmonotone: u64,
    pub survivors: u64,
    pub unresolved: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SmallJSummary {
    pub range: (i64, i64),
    pub excluded: usize,
    pub max_witness_prime: u64,
    pub undetermined: Vec<i64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IntegralPoint {
    pub j: String,
    pub classification: Classification,
    pub cusp: u64,
    pub b_vector: Vec<i64>,
    pub t: String,
    pub q: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub format: String,
    pub config: RunConfig,
    pub context: ContextSummary,
    pub validation: ValidationSummary,
    pub ledgers: Vec<BoundLedger>,
    pub quick: Vec<QuickOutcome>,
    pub slow: SlowStats,
    pub candidates: Vec<Candidate>,
    pub integral_points: Vec<IntegralPoint>,
    pub small_j: SmallJSummary,
    pub timings_ms: BTreeMap<String, u128>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CheckpointBody {
    fingerprint: String,
    completed: Vec<String>,
    survivors: Vec<RawSurvivor>,
}

/// A slow-phase survivor before classification.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RawSurvivor {
    pub cusp: u64,
    pub piece: usize,
    pub b1: i64,
    pub flagged: bool,
}

/// A slow-phase work unit: a contiguous pivot-exponent chunk on one
/// monotonicity piece of one cusp.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct WorkUnit {
    pub cusp: u64,
    pub piece: usize,
    pub b1_start: i64,
    pub b1_end: i64,
}

impl WorkUnit {
    fn key(&self) -> String {
        format!(
            "{}:{}:{}:{}",
            self.cusp, self.piece, self.b1_start, self.b1_end
        )
    }
}

fn read_checkpoint(path: &str, fingerprint: &str) -> Result<Option<CheckpointBody>> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    if text.trim().is_empty() {
        return Ok(None);
    }
    let mut lines = text.splitn(2, '\n');
    let magic = lines.next().unwrap_or_default();
    if magic.trim() != CHECKPOINT_MAGIC {
        return Err(Error::Checkpoint(format!(
            "bad checkpoint header {magic:?}; delete the file for a full re-run"
        )));
    }
    let body: CheckpointBody = serde_json::from_str(lines.next().unwrap_or_default())
        .map_err(|e| Error::Checkpoint(format!("corrupt checkpoint: {e}")))?;
    if body.fingerprint != fingerprint {
        return Err(Error::Checkpoint(
            "checkpoint was written by an incompatible configuration; re-run from scratch".into(),
        ));
    }
    Ok(Some(body))
}

fn write_checkpoint(path: &str, body: &CheckpointBody) -> Result<()> {
    let tmp = format!("{path}.tmp");
    {
        let mut f = std::fs::File::create(&tmp)?;
        writeln!(f, "{CHECKPOINT_MAGIC}")?;
        f.write_all(serde_json::to_string(body)?.as_bytes())?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Pick the smallest series order nu whose domain-wide truncation error
/// clears the target.
pub fn choose_nu(p: u64, theta: f64, target: f64) -> usize {
    let rate = std::f64::consts::PI * 3f64.sqrt() / p as f64;
    let mut nu = 1usize;
    loop {
        let eps = theta * (2.2 * nu as f64 / p as f64 + 3.1) * (-(nu as f64 + 1.0) * rate).exp();
        if eps <= target || nu > 4000 {
            return nu;
        }
        nu += 1;
    }
}

struct Stage<'a> {
    timings: &'a Mutex<BTreeMap<String, u128>>,
}

impl<'a> Stage<'a> {
    fn run<T>(&self, name: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let t0 = Instant::now();
        let out = f();
        self.timings
            .lock()
            .unwrap()
            .insert(name.to_string(), t0.elapsed().as_millis());
        out
    }
}

/// Run the full pipeline for one configuration.
pub fn run_pipeline(config: &RunConfig) -> Result<RunReport> {
    let timings = Mutex::new(BTreeMap::new());
    let stage = Stage { timings: &timings };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    pool.install(|| run_pipeline_inner(config, &stage, &timings))
}

fn run_pipeline_inner(
    config: &RunConfig,
    stage: &Stage,
    timings: &Mutex<BTreeMap<String, u128>>,
) -> Result<RunReport> {
    use rayon::prelude::*;

    let h_spec: HSpec = config.subgroup.parse()?;
    let ctx = GroupContext::build(config.p, &h_spec)?;
    let prec = Prec::new(config.precision_bits)?;
    let p = ctx.p;

    let override_units = match &config.unit_basis_path {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            Some(parse_unit_basis_file(&text, p, ctx.d)?)
        }
        None => None,
    };
    let units = stage.run("unit_system", || UnitSystem::build(&ctx, override_units))?;

    // identity validation; never proceed on corrupted precomputation
    let vprec = Prec::new(config.precision_bits.max(512))?;
    let ident = stage.run("product_identity", || {
        crate::siegel::product_identity_check(&ctx, vprec, 10, VALIDATION_SEED)
    })?;
    if !ident.sign_positive || ident.max_full_residual >= 1e-20 || ident.max_orbit_residual >= 1e-20
    {
        return Err(Error::ValidationFailed(format!(
            "product identity residuals {:e}/{:e}, sign positive: {}",
            ident.max_full_residual, ident.max_orbit_residual, ident.sign_positive
        )));
    }

    let emb = Embedder::new(p, prec);
    let ulm = stage.run("unit_log_matrix", || {
        UnitLogMatrix::build(&ctx, &units, &emb)
    })?;
    if ulm.residual >= 2f64.powi(-(config.precision_bits as i32 / 2)) {
        return Err(Error::ValidationFailed(format!(
            "unit log matrix residual {:e} too large",
            ulm.residual
        )));
    }
    let reconstruction_max_dev = stage.run("reconstruction", || {
        let mut rng = StdRng::seed_from_u64(VALIDATION_SEED);
        let mut max_dev: f64 = 0.0;
        for _ in 0..100 {
            let b: Vec<i64> = (0..ctx.d).map(|_| rng.gen_range(-100..100)).collect();
            let v: Vec<BigReal> = (0..ctx.d)
                .map(|k| {
                    let mut acc = prec.int(0);
                    for l in 0..ctx.d {
                        acc = acc.add(&ulm.mat[k][l].mul_i64(b[l]));
                    }
                    acc
                })
                .collect();
            for (k, r) in ulm.solve(&v).iter().enumerate() {
                let dev = (r.value().to_f64() - b[k] as f64).abs();
                if dev > r.err().to_f64() {
                    return Err(Error::ValidationFailed(
                        "exponent reconstruction outside error bounds".into(),
                    ));
                }
                max_dev = max_dev.max(dev);
            }
        }
        Ok(max_dev)
    })?;

    let theta_estimate =
        ulm.kappa.value().to_f64() * ctx.m as f64 * (p + 1) as f64 * ctx.h_len() as f64;
    let nu = choose_nu(p, theta_estimate, config.nu_epsilon_target);

    let orbits = ctx.unit_orbits();
    let cusp_count = (p - 1) / 2;
    let frames: Vec<CuspFrame> = stage.run("cusp_frames", || {
        (1..=cusp_count)
            .into_par_iter()
            .map(|c| CuspFrame::build(&ctx, &orbits, &ulm, c, nu, &emb))
            .collect()
    })?;

    let mut delta0_max: f64 = 0.0;
    for frame in &frames {
        let d0 = &frame.delta[0];
        let mag = d0.value().to_f64().abs();
        if mag > d0.err().to_f64().max(1e-20) {
            return Err(Error::ValidationFailed(format!(
                "delta_0 = {mag:e} at cusp {} is not zero",
                frame.cusp
            )));
        }
        delta0_max = delta0_max.max(mag);
    }

    let realized_epsilon = {
        let t_max = prec
            .pi()
            .mul(&prec.int(3).sqrt()?)
            .neg()
            .div(&prec.int(p as i64))?
            .exp()?;
        frames
            .iter()
            .map(|f| f.fk_error(&t_max, prec).map(|e| e.value().to_f64()))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0f64, f64::max)
    };
    if realized_epsilon > config.nu_epsilon_target {
        return Err(Error::ValidationFailed(format!(
            "realized slow-phase error {realized_epsilon:e} misses the target"
        )));
    }

    let validation = ValidationSummary {
        product_identity_residual: ident.max_full_residual,
        orbit_identity_residual: ident.max_orbit_residual,
        product_sign_positive: ident.sign_positive,
        matrix_residual: ulm.residual,
        delta0_max_abs: delta0_max,
        reconstruction_max_dev,
        unit_source: format!("{:?}", units.source),
    };

    let context = ContextSummary {
        p,
        xi: ctx.xi,
        h: ctx.h.clone(),
        d: ctx.d,
        m: ctx.m,
        cusps: cusp_count,
        unit_orbit_size: ctx.unit_orbit_size(),
        nu,
        realized_epsilon,
    };

    if config.validate_only {
        return Ok(RunReport {
            format: CHECKPOINT_MAGIC.into(),
            config: config.clone(),
            context,
            validation,
            ledgers: vec![],
            quick: vec![],
            slow: SlowStats {
                pieces: 0,
                b1_total: 0,
                pruned_interval: 0,
                pruned_refined: 0,
                pruned_j: 0,
                flagged_nonmonotone: 0,
                survivors: 0,
                unresolved: vec![],
            },
            candidates: vec![],
            integral_points: vec![],
            small_j: SmallJSummary {
                range: (1, 1727),
                excluded: 0,
                max_witness_prime: 0,
                undetermined: vec![],
            },
            timings_ms: timings.lock().unwrap().clone(),
        });
    }

    // Baker bound and reduction, per cusp
    let ledgers: Vec<BoundLedger> = stage.run("bounds", || {
        frames
            .par_iter()
            .map(|frame| {
                let (mho1, mho2, b0) = baker_b0(&ctx, &ulm, frame, prec)?;
                let builder = |bits: Prec| -> Result<(UnitLogMatrix, CuspFrame)> {
                    let emb_hi = Embedder::new(p, bits);
                    let ulm_hi = UnitLogMatrix::build(&ctx, &units, &emb_hi)?;
                    let frame_hi =
                        CuspFrame::build(&ctx, &orbits, &ulm_hi, frame.cusp, nu.min(8), &emb_hi)?;
                    Ok((ulm_hi, frame_hi))
                };
                crate::error::with_precision_retry(prec.bits(), 1 << 14, |bits| {
                    davenport_reduce(
                        &ctx, &builder, frame.cusp, &b0, &mho1, &mho2, config.t0, prec, bits,
                    )
                })
            })
            .collect()
    })?;

    // quick enumeration
    let quick: Vec<QuickOutcome> = stage.run("quick_enumeration", || {
        frames
            .par_iter()
            .zip(&ledgers)
            .map(|(frame, ledger)| {
                quick_enumerate(
                    frame,
                    ledger.xi_hat_value,
                    config.exponent_denominator,
                    prec,
                )
            })
            .collect()
    })?;
    let mut ledgers = ledgers;
    for (l, q) in ledgers.iter_mut().zip(&quick) {
        l.upsilon = Some(q.upsilon);
    }

    // slow enumeration with checkpointing
    let js = JSeries::new(256);
    let fingerprint = config.fingerprint();
    let mut completed: std::collections::BTreeSet<String> = Default::default();
    let mut resumed_survivors: Vec<RawSurvivor> = Vec::new();
    if let Some(path) = &config.checkpoint_path {
        if let Some(body) = read_checkpoint(path, &fingerprint)? {
            completed = body.completed.into_iter().collect();
            resumed_survivors = body.survivors;
        }
    }

    let mut all_pieces: Vec<(u64, Vec<MonotonePiece>)> = Vec::new();
    let grid = 512usize;
    stage.run("split_domains", || {
        for (frame, q) in frames.iter().zip(&quick) {
            let pieces = split_domain(frame, q.upsilon, grid, prec)?;
            all_pieces.push((frame.cusp, pieces));
        }
        Ok(())
    })?;

    let chunk: i64 = 64;
    let mut units_plan: Vec<WorkUnit> = Vec::new();
    for ((cusp, pieces), frame) in all_pieces.iter().zip(&frames) {
        for piece in pieces {
            let eps = frame
                .fk_error(&BigReal::max_val(piece.lo.abs(), piece.hi.abs()), prec)?
                .value()
                .to_f64();
            let (lo, hi) = b1_range(piece, eps);
            let mut start = lo;
            while start <= hi {
                let end = (start + chunk - 1).min(hi);
                units_plan.push(WorkUnit {
                    cusp: *cusp,
                    piece: piece.index,
                    b1_start: start,
                    b1_end: end,
                });
                start = end + 1;
            }
        }
    }
    units_plan.sort();

    #[derive(Default)]
    struct Tally {
        b1_total: u64,
        pruned_interval: u64,
        pruned_refined: u64,
        pruned_j: u64,
        flagged: u64,
    }
    let tally = Mutex::new(Tally::default());
    let found = Mutex::new(resumed_survivors.clone());
    let ckpt = Mutex::new(CheckpointBody {
        fingerprint: fingerprint.clone(),
        completed: completed.iter().cloned().collect(),
        survivors: resumed_survivors.clone(),
    });

    let pending: Vec<&WorkUnit> = units_plan
        .iter()
        .filter(|u| !completed.contains(&u.key()))
        .collect();

    stage.run("slow_enumeration", || {
        pending
            .par_iter()
            .map(|unit| {
                let frame = frames
                    .iter()
                    .find(|f| f.cusp == unit.cusp)
                    .expect("frame exists");
                let piece =
                    &all_pieces.iter().find(|(c, _)| *c == unit.cusp).unwrap().1[unit.piece];
                let mut local: Vec<RawSurvivor> = Vec::new();
                let mut t = Tally::default();
                for b1 in unit.b1_start..=unit.b1_end {
                    t.b1_total += 1;
                    match process_b1(frame, piece, b1, config.exponent_denominator, prec)? {
                        B1Outcome::Pruned(stage) => match stage {
                            crate::enumeration::PruneStage::CompanionInterval => {
                                t.pruned_interval += 1
                            }
                            crate::enumeration::PruneStage::RefinedInterval => {
                                t.pruned_refined += 1
                            }
                            crate::enumeration::PruneStage::JNotIntegral => t.pruned_j += 1,
                        },
                        B1Outcome::Survivor {
                            flagged_nonmonotone,
                            ..
                        } => {
                            if flagged_nonmonotone {
                                t.flagged += 1;
                            }
                            local.push(RawSurvivor {
                                cusp: unit.cusp,
                                piece: unit.piece,
                                b1,
                                flagged: flagged_nonmonotone,
                            });
                        }
                    }
                }
                // merge and checkpoint under one lock
                {
                    let mut g = tally.lock().unwrap();
                    g.b1_total += t.b1_total;
                    g.pruned_interval += t.pruned_interval;
                    g.pruned_refined += t.pruned_refined;
                    g.pruned_j += t.pruned_j;
                    g.flagged += t.flagged;
                }
                {
                    let mut f = found.lock().unwrap();
                    f.extend(local.iter().cloned());
                    let mut body = ckpt.lock().unwrap();
                    body.completed.push(unit.key());
                    body.survivors.extend(local.iter().cloned());
                    if let Some(path) = &config.checkpoint_path {
                        write_checkpoint(path, &body)?;
                    }
                }
                Ok(())
            })
            .collect::<Result<Vec<()>>>()?;
        Ok(())
    })?;

    let mut survivors = found.into_inner().unwrap();
    survivors.sort();
    survivors.dedup();

    // classification of survivors, escalating precision per candidate
    let mut candidates: Vec<Candidate> = Vec::new();
    let mut unresolved: Vec<String> = Vec::new();
    let mut rejected_by_j = 0u64;
    stage.run("verification", || {
        let mut frame_cache: BTreeMap<(u64, u32), (Embedder, CuspFrame)> = BTreeMap::new();
        for s in &survivors {
            let mut bits = config.precision_bits;
            let mut step = 0usize;
            let mut done = false;
            while bits <= crate::error::PRECISION_CEILING.min(1 << 13) {
                let vprec = Prec::new(bits)?;
                // escalation deepens the series as well: near the corners
                // of the chart the pivot function is nearly critical and
                // only a smaller truncation error can narrow the bracket
                let vnu = nu + 32 * step;
                let (vemb, vframe) = match frame_cache.entry((s.cusp, bits)) {
                    std::collections::btree_map::Entry::Occupied(e) => {
                        let (a, b) = e.into_mut();
                        (&*a, &*b)
                    }
                    std::collections::btree_map::Entry::Vacant(e) => {
                        let vemb = Embedder::new(p, vprec);
                        let vulm = UnitLogMatrix::build(&ctx, &units, &vemb)?;
                        let vframe = CuspFrame::build(&ctx, &orbits, &vulm, s.cusp, vnu, &vemb)?;
                        let (a, b) = e.insert((vemb, vframe));
                        (&*a, &*b)
                    }
                };
                let _ = vemb;
                let quick_upsilon = quick
                    .iter()
                    .zip(&frames)
                    .find(|(_, f)| f.cusp == s.cusp)
                    .map(|(q, _)| q.upsilon)
                    .unwrap();
                let vpieces = split_domain(vframe, quick_upsilon, grid, vprec)?;
                let Some(vpiece) = vpieces.iter().find(|pc| pc.index == s.piece) else {
                    unresolved.push(format!(
                        "cusp {} piece {} b1 {}: piece vanished at {} bits",
                        s.cusp, s.piece, s.b1, bits
                    ));
                    done = true;
                    break;
                };
                match process_b1(vframe, vpiece, s.b1, config.exponent_denominator, vprec)? {
                    B1Outcome::Pruned(_) => {
                        rejected_by_j += 1;
                        done = true;
                        break;
                    }
                    B1Outcome::Survivor {
                        t_lo,
                        t_hi,
                        b_vector,
                        ..
                    } => match classify_interval(&js, &t_lo, &t_hi, p, vprec) {
                        Ok((j, class)) => {
                            if class == Classification::Rejected {
                                rejected_by_j += 1;
                            } else {
                                let mid = t_lo.add(&t_hi).div(&vprec.int(2))?;
                                let q_mid = mid.pow_u32(p as u32);
                                let j_int = j.round_certain().ok().map(|n| n.to_string());
                                candidates.push(Candidate {
                                    cusp: s.cusp,
                                    piece: s.piece,
                                    b1: s.b1,
                                    b_vector,
                                    t: format!("{:e}", mid.value().to_f64()),
                                    q: format!("{:e}", q_mid.value().to_f64()),
                                    j: format!("{:e}", j.value().to_f64()),
                                    j_err: j.err().to_f64(),
                                    j_int,
                                    classification: class,
                                });
                            }
                            done = true;
                            break;
                        }
                        Err(e) if e.is_retryable() => {
                            bits *= 2;
                            step += 1;
                        }
                        Err(e) => return Err(e),
                    },
                }
            }
            if !done {
                unresolved.push(format!(
                    "cusp {} piece {} b1 {}: unresolved at the precision ceiling",
                    s.cusp, s.piece, s.b1
                ));
            }
        }
        Ok(())
    })?;
    candidates.sort_by_key(|c| (c.cusp, c.piece, c.b1));

    let t = tally.into_inner().unwrap();
    let slow = SlowStats {
        pieces: all_pieces.iter().map(|(_, v)| v.len()).sum(),
        b1_total: t.b1_total,
        pruned_interval: t.pruned_interval,
        pruned_refined: t.pruned_refined,
        pruned_j: t.pruned_j + rejected_by_j,
        flagged_nonmonotone: t.flagged,
        survivors: survivors.len() as u64,
        unresolved,
    };

    // small-j screen
    let small_j = stage.run("small_j_filter", || {
        let results: Vec<(i64, SmallJResult)> = (1i64..=1727)
            .into_par_iter()
            .map(|j| (j, small_j_filter(p, j, config.ell_budget)))
            .collect();
        let mut excluded = 0;
        let mut max_witness = 0;
        let mut undetermined = Vec::new();
        for (j, r) in results {
            match r {
                SmallJResult::Excluded { witness_prime } => {
                    excluded += 1;
                    max_witness = max_witness.max(witness_prime);
                }
                SmallJResult::Undetermined => undetermined.push(j),
            }
        }
        Ok(SmallJSummary {
            range: (1, 1727),
            excluded,
            max_witness_prime: max_witness,
            undetermined,
        })
    })?;

    let mut integral_points: Vec<IntegralPoint> = candidates
        .iter()
        .filter(|c| c.classification != Classification::Rejected)
        .map(|c| IntegralPoint {
            j: c.j_int.clone().unwrap_or_else(|| c.j.clone()),
            classification: c.classification.clone(),
            cusp: c.cusp,
            b_vector: c.b_vector.clone(),
            t: c.t.clone(),
            q: c.q.clone(),
        })
        .collect();
    integral_points.sort_by_key(|ip| ip.j.parse::<i128>().unwrap_or(i128::MAX));
    integral_points.dedup_by(|a, b| a.j == b.j);

    Ok(RunReport {
        format: CHECKPOINT_MAGIC.into(),
        config: config.clone(),
        context,
        validation,
        ledgers,
        quick,
        slow,
        candidates,
        integral_points,
        small_j,
        timings_ms: timings.lock().unwrap().clone(),
    })
}

impl RunReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_to(&self, path: &str) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    /// The j-invariants of the integral points found.
    pub fn integral_j_list(&self) -> Vec<String> {
        self.integral_points.iter().map(|ip| ip.j.clone()).collect()
    }
}
