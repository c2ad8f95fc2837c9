use super::{esum, BigReal, Prec};
use crate::error::Result;

/// Complex number with component-wise error bounds.
#[derive(Debug, Clone)]
pub struct BigComplex {
    pub re: BigReal,
    pub im: BigReal,
}

impl BigComplex {
    pub fn new(re: BigReal, im: BigReal) -> BigComplex {
        BigComplex { re, im }
    }

    pub fn from_real(re: BigReal) -> BigComplex {
        let prec = Prec::new(re.prec()).expect("valid precision");
        BigComplex {
            re,
            im: prec.int(0),
        }
    }

    pub fn zero(prec: Prec) -> BigComplex {
        BigComplex {
            re: prec.int(0),
            im: prec.int(0),
        }
    }

    pub fn one(prec: Prec) -> BigComplex {
        BigComplex {
            re: prec.int(1),
            im: prec.int(0),
        }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn add(&self, rhs: &BigComplex) -> BigComplex {
        BigComplex {
            re: self.re.add(&rhs.re),
            im: self.im.add(&rhs.im),
        }
    }

    pub fn sub(&self, rhs: &BigComplex) -> BigComplex {
        BigComplex {
            re: self.re.sub(&rhs.re),
            im: self.im.sub(&rhs.im),
        }
    }

    pub fn mul(&self, rhs: &BigComplex) -> BigComplex {
        let re = self.re.mul(&rhs.re).sub(&self.im.mul(&rhs.im));
        let im = self.re.mul(&rhs.im).add(&self.im.mul(&rhs.re));
        BigComplex { re, im }
    }

    pub fn mul_real(&self, rhs: &BigReal) -> BigComplex {
        BigComplex {
            re: self.re.mul(rhs),
            im: self.im.mul(rhs),
        }
    }

    pub fn div(&self, rhs: &BigComplex) -> Result<BigComplex> {
        let n = rhs.norm_sqr();
        let re = self.re.mul(&rhs.re).add(&self.im.mul(&rhs.im)).div(&n)?;
        let im = self.im.mul(&rhs.re).sub(&self.re.mul(&rhs.im)).div(&n)?;
        Ok(BigComplex { re, im })
    }

    pub fn neg(&self) -> BigComplex {
        BigComplex {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }

    pub fn conj(&self) -> BigComplex {
        BigComplex {
            re: self.re.clone(),
            im: self.im.neg(),
        }
    }

    pub fn norm_sqr(&self) -> BigReal {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    pub fn abs(&self) -> Result<BigReal> {
        let n = self.norm_sqr();
        if n.value().is_zero() && n.is_exact() {
            let p = Prec::new(self.prec()).expect("valid precision");
            return Ok(p.int(0));
        }
        n.sqrt()
    }

    /// e^z = e^re (cos im + i sin im)
    pub fn exp(&self) -> Result<BigComplex> {
        let r = self.re.exp()?;
        Ok(BigComplex {
            re: r.mul(&self.im.cos()),
            im: r.mul(&self.im.sin()),
        })
    }

    /// cos t + i sin t
    pub fn cis(t: &BigReal) -> BigComplex {
        BigComplex {
            re: t.cos(),
            im: t.sin(),
        }
    }

    pub fn pow_u32(&self, n: u32) -> BigComplex {
        let prec = Prec::new(self.prec()).expect("valid precision");
        let mut acc = BigComplex::one(prec);
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Widen both component errors by `extra` (absolute).
    pub fn widen(&self, extra: &BigReal) -> BigComplex {
        BigComplex {
            re: self.re.widen(extra),
            im: self.im.widen(extra),
        }
    }

    /// Distance |self - rhs| measured on values, ignoring errs.
    pub fn dist_value(&self, rhs: &BigComplex) -> f64 {
        let dr = self.re.to_f64() - rhs.re.to_f64();
        let di = self.im.to_f64() - rhs.im.to_f64();
        dr.hypot(di)
    }

    /// Total error budget: max over components plus cross terms.
    pub fn err_upper(&self) -> f64 {
        let e = esum!(self.re.err(), self.im.err());
        e.to_f64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_exp_of_pi_i_is_minus_one() {
        let p = Prec::new(128).unwrap();
        let z = BigComplex::new(p.int(0), p.pi());
        let e = z.exp().unwrap();
        assert!((e.re.to_f64() + 1.0).abs() < 1e-30);
        assert!(e.im.to_f64().abs() < 1e-30);
        // error bound covers the true value
        assert!((e.re.to_f64() + 1.0).abs() <= e.re.err().to_f64());
    }

    #[test]
    fn division_roundtrip() {
        let p = Prec::new(128).unwrap();
        let a = BigComplex::new(p.from_f64(1.5), p.from_f64(-2.25));
        let b = BigComplex::new(p.from_f64(0.5), p.from_f64(3.0));
        let c = a.mul(&b).div(&b).unwrap();
        assert!(c.dist_value(&a) < 1e-30);
    }
}
