//! Finite geometry over F_p: the non-split Cartan normalizer, its orbit
//! structure on the nonzero vectors of F_p^2, cusp representative
//! matrices, and the canonical lifting to rational pairs.

use crate::error::{Error, Result};
use rug::Rational;

/// How the Galois subgroup H of F_p^* is chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HSpec {
    /// H = {1, -1}
    PmOne,
    /// H = <g, -1> for a supplied generator g
    Generator(u64),
}

impl std::str::FromStr for HSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<HSpec> {
        match s {
            "pm1" => Ok(HSpec::PmOne),
            other => other
                .parse::<u64>()
                .map(HSpec::Generator)
                .map_err(|_| Error::InvalidInput(format!("bad subgroup spec {other:?}"))),
        }
    }
}

/// All group-theoretic data attached to a prime p and subgroup H.
#[derive(Debug, Clone)]
pub struct GroupContext {
    /// The prime level.
    pub p: u64,
    /// A fixed quadratic non-residue mod p (-1 when p = 3 mod 4).
    pub xi: u64,
    /// Subgroup of F_p^* containing -1, as a sorted element list.
    pub h: Vec<u64>,
    /// Index [F_p^* : H]; the degree of the real subfield K.
    pub d: usize,
    /// Exponent of the orbit units (2 or 6).
    pub m: u32,
    /// Smallest primitive root mod p; powers of its class generate
    /// F_p^*/H and fix the ordering of Galois embeddings.
    pub g: u64,
}

/// A point of M_p = F_p^2 - 0, as (x, y) with 0 <= x, y < p.
pub type Point = (u64, u64);

/// An orbit of one of the two actions on M_p, tagged by a coset label.
#[derive(Debug, Clone)]
pub struct Orbit {
    /// Canonical label: the smallest positive value of the defining form
    /// attained on the orbit.
    pub label: u64,
    pub members: Vec<Point>,
}

/// The canonical lifting of a point of M_p to rational coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedPoint {
    pub a: Point,
    /// Numerator of a1/p, in 0..p (so 0 <= a1~ < 1).
    pub num1: u64,
    /// Signed numerator of a2/p, in -(p-1)/2 ..= (p-1)/2.
    pub num2: i64,
}

impl LiftedPoint {
    pub fn tilde1(&self, p: u64) -> Rational {
        Rational::from((self.num1, p))
    }
    pub fn tilde2(&self, p: u64) -> Rational {
        Rational::from((self.num2, p as i64))
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub fn mod_pow(b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u128;
    let mut bb = (b % p) as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * bb % p as u128;
        }
        bb = bb * bb % p as u128;
        e >>= 1;
    }
    acc as u64
}

pub fn mod_inv(a: u64, p: u64) -> u64 {
    mod_pow(a, p - 2, p)
}

pub fn legendre(a: i64, p: u64) -> i32 {
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    if mod_pow(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

pub fn smallest_primitive_root(p: u64) -> u64 {
    let mut factors = Vec::new();
    let mut m = p - 1;
    let mut q = 2;
    while q * q <= m {
        if m % q == 0 {
            factors.push(q);
            while m % q == 0 {
                m /= q;
            }
        }
        q += 1;
    }
    if m > 1 {
        factors.push(m);
    }
    'outer: for g in 2..p {
        for &f in &factors {
            if mod_pow(g, (p - 1) / f, p) == 1 {
                continue 'outer;
            }
        }
        return g;
    }
    unreachable!("every prime has a primitive root")
}

impl GroupContext {
    pub fn build(p: u64, h_spec: &HSpec) -> Result<GroupContext> {
        if !is_prime(p) || p < 7 {
            return Err(Error::InvalidInput(format!(
                "p must be a prime >= 7, got {p}"
            )));
        }
        let xi = if p % 4 == 3 {
            p - 1
        } else {
            (2..p)
                .find(|&x| legendre(x as i64, p) == -1)
                .expect("non-residue exists")
        };
        debug_assert_eq!(legendre(xi as i64, p), -1);

        let mut h = match h_spec {
            HSpec::PmOne => vec![1, p - 1],
            HSpec::Generator(g0) => {
                let g0 = g0 % p;
                if g0 == 0 {
                    return Err(Error::InvalidInput(
                        "subgroup generator must be nonzero".into(),
                    ));
                }
                let mut set = std::collections::BTreeSet::new();
                let mut x = 1u64;
                loop {
                    x = x * g0 % p;
                    set.insert(x);
                    if x == 1 {
                        break;
                    }
                }
                // adjoin -1
                let with_neg: Vec<u64> = set.iter().map(|&t| (p - t) % p).collect();
                set.extend(with_neg);
                set.into_iter().collect()
            }
        };
        h.sort_unstable();
        if !h.contains(&(p - 1)) {
            return Err(Error::InvalidInput("H must contain -1".into()));
        }
        if (p - 1) % h.len() as u64 != 0 {
            return Err(Error::InvalidInput("H is not a subgroup".into()));
        }
        let d = ((p - 1) / h.len() as u64) as usize;
        if d < 3 {
            return Err(Error::InvalidInput(format!(
                "index [F_p^*:H] = {d} but the method needs at least 3 cusp classes"
            )));
        }
        let m = if ((p + 1) * h.len() as u64) % 3 == 0 {
            2
        } else {
            6
        };
        let g = smallest_primitive_root(p);
        Ok(GroupContext { p, xi, h, d, m, g })
    }

    pub fn h_len(&self) -> u64 {
        self.h.len() as u64
    }

    /// Size of every right G_H-orbit: (p+1)|H|.
    pub fn unit_orbit_size(&self) -> u64 {
        (self.p + 1) * self.h_len()
    }

    /// x^2 - Xi y^2 mod p (cusp-side norm form, left G_1 action).
    pub fn cusp_form(&self, pt: Point) -> u64 {
        let p = self.p as u128;
        let x = pt.0 as u128;
        let y = pt.1 as u128;
        ((x * x % p + (p - self.xi as u128 * y % p * y % p) % p) % p) as u64
    }

    /// Xi x^2 - y^2 mod p (unit-side form, right G_H action).
    pub fn unit_form(&self, pt: Point) -> u64 {
        let p = self.p as u128;
        let x = pt.0 as u128;
        let y = pt.1 as u128;
        ((self.xi as u128 * x % p * x % p + (p - y * y % p) % p) % p) as u64
    }

    /// Canonical label of the coset cH (smallest element of cH).
    pub fn coset_label(&self, c: u64) -> u64 {
        self.h
            .iter()
            .map(|&t| (c as u128 * t as u128 % self.p as u128) as u64)
            .min()
            .expect("nonempty H")
    }

    /// Canonical label of the class {c, -c} (smallest of the two).
    pub fn pm_label(&self, c: u64) -> u64 {
        c.min(self.p - c)
    }

    /// Cusp orbits of the left G_1 action: one per class in F_p^*/{±1}.
    /// The orbit labeled 1 is the cusp at infinity.
    pub fn cusp_orbits(&self) -> Vec<Orbit> {
        self.orbits_by(|pt| self.pm_label(self.cusp_form(pt)))
    }

    /// Merge the cusps into d classes under the H-Galois action,
    /// labeled by cosets cH. Returns (class label, cusp labels).
    pub fn h_cusp_classes(&self) -> Vec<(u64, Vec<u64>)> {
        let mut map: std::collections::BTreeMap<u64, std::collections::BTreeSet<u64>> =
            Default::default();
        for c in 1..self.p {
            let cusp = self.pm_label(c);
            map.entry(self.coset_label(c)).or_default().insert(cusp);
        }
        map.into_iter()
            .map(|(k, v)| (k, v.into_iter().collect()))
            .collect()
    }

    /// Unit orbits of the right G_H action: d orbits of size (p+1)|H|,
    /// labeled by cosets cH of the form value.
    pub fn unit_orbits(&self) -> Vec<Orbit> {
        self.orbits_by(|pt| self.coset_label(self.unit_form(pt)))
    }

    fn orbits_by(&self, label_of: impl Fn(Point) -> u64) -> Vec<Orbit> {
        let mut map: std::collections::BTreeMap<u64, Vec<Point>> = Default::default();
        for x in 0..self.p {
            for y in 0..self.p {
                if x == 0 && y == 0 {
                    continue;
                }
                map.entry(label_of((x, y))).or_default().push((x, y));
            }
        }
        map.into_iter()
            .map(|(label, members)| Orbit { label, members })
            .collect()
    }

    /// The unit orbit carrying the distinguished unit U: the one through
    /// the point (1, 0), i.e. the coset of Xi.
    pub fn distinguished_orbit_label(&self) -> u64 {
        self.coset_label(self.xi)
    }

    /// Label of the orbit of U^{sigma_l}, where sigma_l acts as the class
    /// of g^l in F_p^*/H.
    pub fn conjugate_orbit_label(&self, l: usize) -> u64 {
        let t = mod_pow(self.g, l as u64, self.p);
        self.coset_label(self.xi * t % self.p)
    }

    /// Representative t for sigma_l in F_p^* (t = g^l).
    pub fn galois_rep(&self, l: usize) -> u64 {
        mod_pow(self.g, l as u64, self.p)
    }

    /// Membership test for G_1, the determinant-one part of the Cartan
    /// normalizer in its fixed realization.
    pub fn in_g1(&self, m: &[[u64; 2]; 2]) -> bool {
        let p = self.p;
        let det = ((m[0][0] as u128 * m[1][1] as u128 + p as u128 * p as u128
            - m[0][1] as u128 * m[1][0] as u128)
            % p as u128) as u64;
        if det != 1 {
            return false;
        }
        let cartan = m[0][0] == m[1][1] && m[0][1] == m[1][0] * self.xi % p;
        let outer = (m[0][0] + m[1][1]) % p == 0 && (m[0][1] + m[1][0] * self.xi) % p == 0;
        cartan || outer
    }

    /// The offset k such that complex conjugation acts on the cusp chart
    /// of sigma as t -> zeta^k conj(t): the unique k with
    /// sigma~ T^(-k) sigma^(-1) in G_1, where sigma~ flips off-diagonal signs.
    fn reality_offset(&self, m: &[[u64; 2]; 2]) -> u64 {
        let p = self.p;
        let mt = [
            [m[0][0], (p - m[0][1] % p) % p],
            [(p - m[1][0] % p) % p, m[1][1]],
        ];
        // m has determinant 1 mod p
        let minv = [
            [m[1][1], (p - m[0][1] % p) % p],
            [(p - m[1][0] % p) % p, m[0][0]],
        ];
        for k in 0..p {
            let tk = [[1, (p - k) % p], [0, 1]];
            let h = mat_mul_mod_p(&mat_mul_mod_p(&mt, &tk, p), &minv, p);
            if self.in_g1(&h) {
                return k;
            }
        }
        unreachable!("cusps are real, so an offset always exists")
    }

    /// The cusp representative matrix reduced mod p: for the class of c,
    /// pick the lexicographically smallest (a, b) with a^2 - Xi b^2 = 1/c,
    /// form [[ca, b*Xi], [cb, a]], and translate on the right so that the
    /// cusp chart carries the plain real structure (rational points sit
    /// at real values of the chart variable).
    pub fn sigma_c_mod_p(&self, c: u64) -> [[u64; 2]; 2] {
        assert!(c > 0 && c < self.p);
        if c == 1 {
            return [[1, 0], [0, 1]];
        }
        let p = self.p;
        let cinv = mod_inv(c, p);
        let (a, b) = (0..p)
            .flat_map(|a| (0..p).map(move |b| (a, b)))
            .find(|&(a, b)| self.cusp_form((a, b)) == cinv)
            .expect("norm form is surjective");
        let base = [[c * a % p, b * self.xi % p], [c * b % p, a % p]];
        let k = self.reality_offset(&base);
        let j = k * (p + 1) / 2 % p;
        let tj = [[1, j], [0, 1]];
        let m = mat_mul_mod_p(&base, &tj, p);
        debug_assert_eq!(self.reality_offset(&m), 0);
        m
    }

    /// Integer lift of sigma_c to SL_2(Z).
    pub fn sigma_c(&self, c: u64) -> [[i64; 2]; 2] {
        sl2_lift(self.sigma_c_mod_p(c), self.p)
    }

    /// Right action of a mod-p matrix on a row vector of M_p.
    pub fn apply_right(&self, pt: Point, mat: &[[u64; 2]; 2]) -> Point {
        let p = self.p as u128;
        let (x, y) = (pt.0 as u128, pt.1 as u128);
        let nx = (x * mat[0][0] as u128 + y * mat[1][0] as u128) % p;
        let ny = (x * mat[0][1] as u128 + y * mat[1][1] as u128) % p;
        (nx as u64, ny as u64)
    }
}

pub(crate) fn mat_mul_mod_p(a: &[[u64; 2]; 2], b: &[[u64; 2]; 2], p: u64) -> [[u64; 2]; 2] {
    let mut out = [[0u64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = 0u128;
            for k in 0..2 {
                acc += a[i][k] as u128 * b[k][j] as u128;
            }
            out[i][j] = (acc % p as u128) as u64;
        }
    }
    out
}

/// Canonical lifting of a point of M_p: a1~ = a1/p in [0, 1), and a2~
/// in (-1/2, 1/2], chosen so that the lift of (a1, -a2) is the complex
/// conjugate of the lift of (a1, a2).
pub fn lift(a: Point, p: u64) -> LiftedPoint {
    assert!(a != (0, 0), "lift of the zero vector");
    let num2 = if a.1 <= (p - 1) / 2 {
        a.1 as i64
    } else {
        a.1 as i64 - p as i64
    };
    LiftedPoint {
        a,
        num1: a.0 % p,
        num2,
    }
}

/// Lift a matrix in SL_2(F_p) to SL_2(Z).
pub fn sl2_lift(m: [[u64; 2]; 2], p: u64) -> [[i64; 2]; 2] {
    let p_i = p as i64;
    let det = |mat: &[[i64; 2]; 2]| mat[0][0] * mat[1][1] - mat[0][1] * mat[1][0];
    let reduced: [[i64; 2]; 2] = [
        [m[0][0] as i64, m[0][1] as i64],
        [m[1][0] as i64, m[1][1] as i64],
    ];
    debug_assert_eq!(det(&reduced).rem_euclid(p_i), 1);

    // Bottom row (c0, d0) = (C, D) mod p with gcd(c0, d0) = 1.
    let (mut c0, mut d0) = (reduced[1][0], reduced[1][1]);
    if c0 == 0 && d0 == 0 {
        unreachable!("singular bottom row");
    }
    if d0 == 0 {
        d0 = p_i;
    }
    let gcd = |mut a: i64, mut b: i64| {
        a = a.abs();
        b = b.abs();
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a
    };
    let mut k = 0;
    while gcd(c0 + k * p_i, d0) != 1 {
        k += 1;
        assert!(k < p_i * 4, "no coprime representative found");
    }
    c0 += k * p_i;

    // Extended Euclid: a0 d0 - b0 c0 = 1.
    let (mut old_r, mut r) = (d0, c0);
    let (mut old_s, mut s) = (1i64, 0i64);
    let (mut old_t, mut t) = (0i64, 1i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    // old_r = gcd = ±1; old_s*d0 + old_t*c0 = old_r
    let (mut a0, mut b0) = (old_s * old_r, -old_t * old_r);
    debug_assert_eq!(a0 * d0 - b0 * c0, 1);

    // Shift the top row into the required residue class:
    // (a0 + t c0, b0 + t d0) = (A, B) mod p for the right t.
    let aa = reduced[0][0].rem_euclid(p_i);
    let bb = reduced[0][1].rem_euclid(p_i);
    let mut shift = None;
    for tt in 0..p_i {
        if (a0 + tt * c0 - aa).rem_euclid(p_i) == 0 && (b0 + tt * d0 - bb).rem_euclid(p_i) == 0 {
            shift = Some(tt);
            break;
        }
    }
    let tt = shift.expect("top-row congruences are consistent");
    a0 += tt * c0;
    b0 += tt * d0;
    let lifted = [[a0, b0], [c0, d0]];
    debug_assert_eq!(det(&lifted), 1);
    debug_assert_eq!((lifted[0][0] - reduced[0][0]).rem_euclid(p_i), 0);
    debug_assert_eq!((lifted[0][1] - reduced[0][1]).rem_euclid(p_i), 0);
    debug_assert_eq!((lifted[1][0] - reduced[1][0]).rem_euclid(p_i), 0);
    debug_assert_eq!((lifted[1][1] - reduced[1][1]).rem_euclid(p_i), 0);
    lifted
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn context_p7() {
        let ctx = GroupContext::build(7, &HSpec::PmOne).unwrap();
        assert_eq!(ctx.xi, 6); // -1, since 7 = 3 mod 4
        assert_eq!(ctx.d, 3);
        assert_eq!(ctx.h_len(), 2);
        assert_eq!(ctx.m, 6); // 3 does not divide 16
    }

    #[test]
    fn context_p11() {
        let ctx = GroupContext::build(11, &HSpec::PmOne).unwrap();
        assert_eq!(ctx.xi, 10);
        assert_eq!(ctx.d, 5);
        assert_eq!(ctx.m, 2); // 3 | 24
    }

    #[test]
    fn context_p13() {
        let ctx = GroupContext::build(13, &HSpec::PmOne).unwrap();
        assert_eq!(ctx.xi, 2); // smallest non-residue mod 13
        assert_eq!(ctx.d, 6);
        assert_eq!(ctx.m, 6); // 3 does not divide 28
    }

    #[test]
    fn context_p13_order4_subgroup() {
        let ctx = GroupContext::build(13, &HSpec::Generator(5)).unwrap();
        assert_eq!(ctx.h, vec![1, 5, 8, 12]);
        assert_eq!(ctx.d, 3);
        assert_eq!(ctx.h_cusp_classes().len(), 3);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(GroupContext::build(9, &HSpec::PmOne).is_err());
        assert!(GroupContext::build(5, &HSpec::PmOne).is_err());
        // H = F_p^* gives d = 1
        assert!(GroupContext::build(11, &HSpec::Generator(2)).is_err());
    }

    #[test]
    fn cusp_orbits_partition() {
        for p in [7u64, 11, 67] {
            let ctx = GroupContext::build(p, &HSpec::PmOne).unwrap();
            let orbits = ctx.cusp_orbits();
            assert_eq!(orbits.len(), ((p - 1) / 2) as usize);
            let total: usize = orbits.iter().map(|o| o.members.len()).sum();
            assert_eq!(total as u64, p * p - 1);
        }
    }

    #[test]
    fn unit_orbits_partition_and_sizes() {
        for p in [7u64, 11, 13] {
            let ctx = GroupContext::build(p, &HSpec::PmOne).unwrap();
            let orbits = ctx.unit_orbits();
            assert_eq!(orbits.len(), ctx.d);
            for o in &orbits {
                assert_eq!(o.members.len() as u64, ctx.unit_orbit_size());
                // closed under (x, y) -> (x, -y)
                for &(x, y) in &o.members {
                    let conj = (x, (p - y) % p);
                    assert_eq!(
                        ctx.coset_label(ctx.unit_form(conj)),
                        o.label,
                        "orbit not conjugation closed"
                    );
                }
            }
            let total: usize = orbits.iter().map(|o| o.members.len()).sum();
            assert_eq!(total as u64, p * p - 1);
        }
    }

    #[test]
    fn unit_orbits_stable_under_sampled_group_elements() {
        let mut rng = StdRng::seed_from_u64(42);
        let ctx = GroupContext::build(11, &HSpec::PmOne).unwrap();
        let p = ctx.p;
        // random Cartan elements with det in H
        for _ in 0..50 {
            let alpha = rng.gen_range(0..p);
            let beta = rng.gen_range(0..p);
            if alpha == 0 && beta == 0 {
                continue;
            }
            let flip = rng.gen_bool(0.5);
            let mat = if flip {
                [
                    [alpha, ctx.xi * beta % p],
                    [(p - beta) % p, (p - alpha) % p],
                ]
            } else {
                [[alpha, ctx.xi * beta % p], [beta, alpha]]
            };
            let det = (mat[0][0] as i64 * mat[1][1] as i64 - mat[0][1] as i64 * mat[1][0] as i64)
                .rem_euclid(p as i64) as u64;
            if !ctx.h.contains(&det) {
                continue;
            }
            for o in ctx.unit_orbits() {
                for &pt in o.members.iter().take(8) {
                    let q = ctx.apply_right(pt, &mat);
                    assert_eq!(ctx.coset_label(ctx.unit_form(q)), o.label);
                }
            }
        }
    }

    #[test]
    fn h_classes_match_d() {
        for (p, spec) in [(11, HSpec::PmOne), (13, HSpec::Generator(5))] {
            let ctx = GroupContext::build(p, &spec).unwrap();
            assert_eq!(ctx.h_cusp_classes().len(), ctx.d);
        }
    }

    #[test]
    fn sigma_c_properties() {
        for p in [7u64, 11, 13] {
            let ctx = GroupContext::build(p, &HSpec::PmOne).unwrap();
            assert_eq!(ctx.sigma_c(1), [[1, 0], [0, 1]]);
            for c in 1..=(p - 1) / 2 {
                let lifted = ctx.sigma_c(c);
                let det = lifted[0][0] * lifted[1][1] - lifted[0][1] * lifted[1][0];
                assert_eq!(det, 1);
                let target = ctx.sigma_c_mod_p(c);
                for i in 0..2 {
                    for j in 0..2 {
                        assert_eq!(
                            lifted[i][j].rem_euclid(p as i64) as u64,
                            target[i][j],
                            "reduction mismatch p={p} c={c}"
                        );
                    }
                }
                // the first column pins the represented cusp
                let col = (target[0][0], target[1][0]);
                assert_eq!(ctx.pm_label(ctx.cusp_form(col)), ctx.pm_label(c));
                // and the chart carries the plain real structure
                assert!(ctx.in_g1(&{
                    let mt = [
                        [target[0][0], (p - target[0][1] % p) % p],
                        [(p - target[1][0] % p) % p, target[1][1]],
                    ];
                    let minv = [
                        [target[1][1], (p - target[0][1] % p) % p],
                        [(p - target[1][0] % p) % p, target[0][0]],
                    ];
                    mat_mul_mod_p(&mt, &minv, p)
                }));
            }
        }
    }

    #[test]
    fn lift_examples() {
        // self-conjugate second coordinate
        let l = lift((3, 0), 7);
        assert_eq!((l.num1, l.num2), (3, 0));
        // conjugation rule
        let l = lift((0, 2), 7);
        assert_eq!((l.num1, l.num2), (0, 2));
        let l = lift((0, 5), 7);
        assert_eq!((l.num1, l.num2), (0, -2));
        // general property
        for p in [7u64, 11] {
            for x in 0..p {
                for y in 0..p {
                    if (x, y) == (0, 0) {
                        continue;
                    }
                    let a = lift((x, y), p);
                    let b = lift((x, (p - y) % p), p);
                    assert_eq!(a.num1, b.num1);
                    assert_eq!(a.num2, -b.num2);
                    assert!(a.num1 < p);
                    assert!(a.num2.abs() <= (p as i64 - 1) / 2);
                }
            }
        }
    }

    #[test]
    fn distinguished_orbit_conjugates_cover_all() {
        let ctx = GroupContext::build(11, &HSpec::PmOne).unwrap();
        let mut labels: Vec<u64> = (0..ctx.d).map(|l| ctx.conjugate_orbit_label(l)).collect();
        labels.sort_unstable();
        labels.dedup();
        assert_eq!(labels.len(), ctx.d);
    }
}
