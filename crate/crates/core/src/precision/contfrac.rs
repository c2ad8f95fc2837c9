use super::{BigReal, Prec};
use crate::error::{Error, Result};
use rug::Integer;
#[cfg(test)]
use rug::Rational;

/// Simple continued fraction of a real number together with its
/// convergents. Every partial quotient is certified: the expansion stops
/// (with an error) as soon as a floor cannot be decided outside the error
/// interval of the input.
#[derive(Debug, Clone)]
pub struct ContinuedFraction {
    pub quotients: Vec<Integer>,
    /// (numerator, denominator) pairs; denominators strictly increase.
    pub convergents: Vec<(Integer, Integer)>,
}

impl ContinuedFraction {
    /// Largest convergent denominator not exceeding `limit`, together with
    /// its numerator. This is the classical best-approximation choice.
    pub fn best_denominator_below(&self, limit: &Integer) -> Option<(Integer, Integer)> {
        self.convergents
            .iter()
            .rev()
            .find(|(_, q)| q <= limit)
            .cloned()
    }
}

/// Expand `x` as a simple continued fraction, emitting all convergents
/// p/q with q <= q_limit. Each emitted quotient is certain: if a floor is
/// ambiguous at the current error level the expansion fails and the caller
/// must retry at higher precision.
pub fn continued_fraction_expand(x: &BigReal, q_limit: &Integer) -> Result<ContinuedFraction> {
    if *q_limit < 1 {
        return Err(Error::InvalidInput("q_limit must be >= 1".into()));
    }
    let prec = Prec::new(x.prec())?;
    let mut quotients = Vec::new();
    let mut convergents: Vec<(Integer, Integer)> = Vec::new();
    let (mut pm1, mut pm2) = (Integer::from(1), Integer::from(0));
    let (mut qm1, mut qm2) = (Integer::from(0), Integer::from(1));
    let mut cur = x.clone();
    loop {
        let a = cur.floor_certain()?;
        let p = Integer::from(&a * &pm1) + &pm2;
        let q = Integer::from(&a * &qm1) + &qm2;
        if !convergents.is_empty() && q > *q_limit {
            break;
        }
        quotients.push(a.clone());
        convergents.push((p.clone(), q.clone()));
        pm2 = std::mem::replace(&mut pm1, p);
        qm2 = std::mem::replace(&mut qm1, q);

        let frac = cur.sub(&prec.integer(&a));
        // exact termination: remainder certainly zero
        if frac.value().is_zero() && frac.is_exact() {
            break;
        }
        match frac.sign_certain() {
            Some(std::cmp::Ordering::Greater) => {}
            Some(std::cmp::Ordering::Equal) => break,
            _ => {
                return Err(Error::PrecisionExhausted(
                    "continued fraction remainder undecidable".into(),
                ))
            }
        }
        cur = frac.recip()?;
    }
    Ok(ContinuedFraction {
        quotients,
        convergents,
    })
}
