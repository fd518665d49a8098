//! Arithmetic in the metaplectic double cover of `GL_2(Q_p)`.
//!
//! Elements are pairs `(g, zeta)` with `g` an invertible 2x2 rational matrix and
//! `zeta` a sign; the group law is twisted by a Hilbert-symbol 2-cocycle.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::coeff::{legendre, unit_residue, valuation};
use crate::error::{Error, Result};

/// Invertible 2x2 matrix `[[a, b], [c, d]]` over `Q`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PMatrix {
    e: [BigRational; 4],
    det: BigRational,
}

impl fmt::Debug for PMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.e[0], self.e[1], self.e[2], self.e[3])
    }
}

impl fmt::Display for PMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    BigRational::from_str(s).map_err(|_| Error::Invalid(format!("not a rational: {}", s)))
}

impl PMatrix {
    pub fn new(a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> Result<PMatrix> {
        let det = &a * &d - &b * &c;
        if det.is_zero() {
            return Err(Error::NotInvertible);
        }
        Ok(PMatrix { e: [a, b, c, d], det })
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Result<PMatrix> {
        PMatrix::new(rat(a), rat(b), rat(c), rat(d))
    }

    /// Parses four comma-separated rationals `a,b,c,d`.
    pub fn parse(s: &str) -> Result<PMatrix> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 4 {
            return Err(Error::Invalid(format!("expected 4 entries, got {}", parts.len())));
        }
        let v: Vec<BigRational> = parts.iter().map(|x| parse_rational(x)).collect::<Result<_>>()?;
        PMatrix::new(v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone())
    }

    pub fn identity() -> PMatrix {
        PMatrix::from_ints(1, 0, 0, 1).unwrap()
    }

    pub fn scalar(z: &BigRational) -> Result<PMatrix> {
        PMatrix::new(z.clone(), BigRational::zero(), BigRational::zero(), z.clone())
    }

    pub fn a(&self) -> &BigRational {
        &self.e[0]
    }
    pub fn b(&self) -> &BigRational {
        &self.e[1]
    }
    pub fn c(&self) -> &BigRational {
        &self.e[2]
    }
    pub fn d(&self) -> &BigRational {
        &self.e[3]
    }

    pub fn det(&self) -> &BigRational {
        &self.det
    }

    pub fn entries(&self) -> &[BigRational; 4] {
        &self.e
    }

    pub fn mul(&self, o: &PMatrix) -> PMatrix {
        let [a, b, c, d] = &self.e;
        let [e, f, g, h] = &o.e;
        PMatrix {
            e: [a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h],
            det: &self.det * &o.det,
        }
    }

    pub fn inv(&self) -> PMatrix {
        let [a, b, c, d] = &self.e;
        let di = self.det.recip();
        PMatrix {
            e: [d * &di, -(b * &di), -(c * &di), a * &di],
            det: di,
        }
    }

    /// Lower-left entry if nonzero, else lower-right.
    pub fn frak_c(&self) -> &BigRational {
        if self.e[2].is_zero() {
            &self.e[3]
        } else {
            &self.e[2]
        }
    }

    /// Integral entries and unit determinant.
    pub fn in_k(&self, p: u32) -> bool {
        let integral = self
            .e
            .iter()
            .all(|x| x.is_zero() || valuation(x, p).map(|v| v >= 0).unwrap_or(false));
        integral && valuation(&self.det, p).map(|v| v == 0).unwrap_or(false)
    }
}

impl Serialize for PMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.e.iter().map(|x| x.to_string()).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<String> = Vec::deserialize(d)?;
        PMatrix::parse(&v.join(",")).map_err(serde::de::Error::custom)
    }
}

/// Quadratic Hilbert symbol `(a, b)` over `Q_p`, `p` odd.
pub fn hilbert(a: &BigRational, b: &BigRational, p: u32) -> Result<i8> {
    let va = valuation(a, p)?;
    let vb = valuation(b, p)?;
    let ua = unit_residue(a, p)? as i64;
    let ub = unit_residue(b, p)? as i64;
    // omega((-1)^{va vb} b^{va} / a^{vb}) to the (p-1)/2 is a product of Legendre symbols
    let mut s = legendre(ub, p).pow((va.rem_euclid(2)) as u32) * legendre(ua, p).pow((vb.rem_euclid(2)) as u32);
    if (va * vb).rem_euclid(2) == 1 && ((p - 1) / 2) % 2 == 1 {
        s = -s;
    }
    Ok(s)
}

/// The 2-cocycle `sigma(g1, g2)`.
pub fn cocycle(g1: &PMatrix, g2: &PMatrix, p: u32) -> i8 {
    let g12 = g1.mul(g2);
    let c12 = g12.frak_c();
    let x = c12 / g1.frak_c();
    let y = c12 / g2.frak_c() * g1.det();
    hilbert(&x, &y, p).expect("cocycle arguments are nonzero")
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MetaElem {
    pub g: PMatrix,
    pub zeta: i8,
}

impl MetaElem {
    pub fn new(g: PMatrix, zeta: i8) -> Result<MetaElem> {
        if zeta != 1 && zeta != -1 {
            return Err(Error::Invalid("zeta must be +1 or -1".into()));
        }
        Ok(MetaElem { g, zeta })
    }

    pub fn identity() -> MetaElem {
        MetaElem { g: PMatrix::identity(), zeta: 1 }
    }
}

pub fn meta_mul(x: &MetaElem, y: &MetaElem, p: u32) -> MetaElem {
    MetaElem {
        g: x.g.mul(&y.g),
        zeta: x.zeta * y.zeta * cocycle(&x.g, &y.g, p),
    }
}

pub fn meta_inv(x: &MetaElem, p: u32) -> MetaElem {
    let gi = x.g.inv();
    let s = cocycle(&x.g, &gi, p);
    MetaElem { zeta: x.zeta * s, g: gi }
}

/// The fixed splitting of the cover over `GL_2(Z_p)`.
pub fn kappa_split(g: &PMatrix, zeta: i8, p: u32) -> Result<MetaElem> {
    if !g.in_k(p) {
        return Err(Error::NotInK);
    }
    let c = g.c();
    if !c.is_zero() && valuation(c, p)? >= 1 {
        let s = hilbert(c, &(g.d() / g.det()), p)?;
        return MetaElem::new(g.clone(), zeta * s);
    }
    MetaElem::new(g.clone(), zeta)
}

/// A character of `Q_p^x` of order at most 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadCharParams {
    /// Value at `p`.
    pub unram: i8,
    /// Either `0` or `(p-1)/2`.
    pub tame: u32,
}

impl QuadCharParams {
    pub fn trivial() -> QuadCharParams {
        QuadCharParams { unram: 1, tame: 0 }
    }

    pub fn eval(&self, x: &BigRational, p: u32) -> Result<i8> {
        let v = valuation(x, p)?;
        let u = unit_residue(x, p)? as i64;
        let mut s = if v.rem_euclid(2) == 1 { self.unram } else { 1 };
        if self.tame != 0 {
            s *= legendre(u, p);
        }
        Ok(s)
    }

    pub fn mul(&self, o: &QuadCharParams, p: u32) -> QuadCharParams {
        QuadCharParams {
            unram: self.unram * o.unram,
            tame: (self.tame + o.tame) % (p - 1),
        }
    }
}

/// The quadratic character `x -> (z, x)` describing conjugation by a central lift.
pub fn chi_z(z: &BigRational, p: u32) -> Result<QuadCharParams> {
    let v = valuation(z, p)?;
    let u = unit_residue(z, p)? as i64;
    let half = (p - 1) / 2;
    let tame = if v.rem_euclid(2) == 1 { half } else { 0 };
    let mut unram = legendre(u, p);
    if v.rem_euclid(2) == 1 && half % 2 == 1 {
        unram = -unram;
    }
    Ok(QuadCharParams { unram, tame })
}

/// Coset representatives `1, u0, p, u0 p` of the squares in `Q_p^x`.
pub fn square_class_reps(p: u32) -> [BigRational; 4] {
    let u0 = crate::coeff::least_nonsquare(p) as i64;
    let p = p as i64;
    [rat(1), rat(u0), rat(p), rat(u0 * p)]
}

/// Nonzero rational `p^k * n / d` with small `n`, `d` prime to `p`.
pub fn random_rational<R: Rng>(rng: &mut R, p: u32, max_val: i64) -> BigRational {
    let k = rng.gen_range(-max_val..=max_val);
    let unit = loop {
        let n: i64 = rng.gen_range(-40..=40);
        if n % p as i64 != 0 {
            break n;
        }
    };
    let den = loop {
        let d: i64 = rng.gen_range(1..=12);
        if d % p as i64 != 0 {
            break d;
        }
    };
    let pk = BigRational::from_integer(BigInt::from(p)).pow(k as i32);
    rat_frac(unit, den) * pk
}

fn random_entry<R: Rng>(rng: &mut R, p: u32) -> BigRational {
    if rng.gen_bool(0.2) {
        BigRational::zero()
    } else {
        random_rational(rng, p, 2)
    }
}

pub fn random_pmatrix<R: Rng>(rng: &mut R, p: u32) -> PMatrix {
    loop {
        let e: Vec<BigRational> = (0..4).map(|_| random_entry(rng, p)).collect();
        if let Ok(m) = PMatrix::new(e[0].clone(), e[1].clone(), e[2].clone(), e[3].clone()) {
            return m;
        }
    }
}

/// Random element of `GL_2(Z_p)`, biased towards lower-left entries in `pZ_p`.
pub fn random_k_matrix<R: Rng>(rng: &mut R, p: u32) -> PMatrix {
    let int = |rng: &mut R| rat(rng.gen_range(-30i64..=30));
    loop {
        let c = if rng.gen_bool(0.6) {
            rat(p as i64 * rng.gen_range(-10i64..=10))
        } else {
            int(rng)
        };
        let m = PMatrix::new(int(rng), int(rng), c, int(rng));
        if let Ok(m) = m {
            if m.in_k(p) {
                return m;
            }
        }
    }
}

pub fn random_meta<R: Rng>(rng: &mut R, p: u32) -> MetaElem {
    let zeta = if rng.gen_bool(0.5) { 1 } else { -1 };
    MetaElem { g: random_pmatrix(rng, p), zeta }
}

/// Whether a nonzero rational is a square in `Q_p`.
pub fn is_square(z: &BigRational, p: u32) -> Result<bool> {
    let v = valuation(z, p)?;
    let u = unit_residue(z, p)? as i64;
    Ok(v.rem_euclid(2) == 0 && legendre(u, p) == 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    // Hilbert symbol via the classical formula for odd p, written independently:
    // (a,b) = (-1)^{a' b' eps(p)} (u/p)^{b'} (v/p)^{a'} with a = p^{a'} u, b = p^{b'} v
    fn serre_hilbert(a: &BigRational, b: &BigRational, p: u32) -> i8 {
        let ap = valuation(a, p).unwrap();
        let bp = valuation(b, p).unwrap();
        let u = unit_residue(a, p).unwrap() as i64;
        let v = unit_residue(b, p).unwrap() as i64;
        let eps = ((p as i64 - 1) / 2) % 2;
        let mut s: i8 = if (ap * bp * eps).rem_euclid(2) == 1 { -1 } else { 1 };
        if bp.rem_euclid(2) == 1 {
            s *= legendre(u, p);
        }
        if ap.rem_euclid(2) == 1 {
            s *= legendre(v, p);
        }
        s
    }

    #[test]
    fn hilbert_examples() {
        assert_eq!(hilbert(&rat(2), &rat(5), 3).unwrap(), 1);
        assert_eq!(hilbert(&rat(3), &rat(2), 3).unwrap(), -1);
        for p in [3u32, 5, 7] {
            assert_eq!(hilbert(&rat(p as i64), &rat(-(p as i64)), p).unwrap(), 1);
        }
        assert_eq!(hilbert(&rat(0), &rat(2), 3).unwrap_err(), Error::NonzeroRequired);
    }

    #[test]
    fn hilbert_matches_classical_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [3u32, 5, 7, 11] {
            for _ in 0..500 {
                let a = random_rational(&mut rng, p, 3);
                let b = random_rational(&mut rng, p, 3);
                assert_eq!(hilbert(&a, &b, p).unwrap(), serre_hilbert(&a, &b, p));
            }
        }
    }

    #[test]
    fn cocycle_examples() {
        let i = PMatrix::identity();
        let g = PMatrix::from_ints(2, 7, 3, 1).unwrap();
        assert_eq!(cocycle(&i, &g, 3), 1);
        let g1 = PMatrix::from_ints(1, 0, 1, 1).unwrap();
        let g2 = PMatrix::from_ints(-3, 1, 6, 1).unwrap();
        assert_eq!(cocycle(&g1, &g2, 3), -1);
        let w = PMatrix::from_ints(0, 1, 1, 0).unwrap();
        for p in [3u32, 5, 7] {
            let t = PMatrix::from_ints(p as i64, 0, 0, 1).unwrap();
            assert_eq!(cocycle(&w, &t, p), 1);
        }
    }

    #[test]
    fn split_examples() {
        let g = PMatrix::from_ints(1, 0, 3, 1).unwrap();
        assert_eq!(kappa_split(&g, 1, 3).unwrap().zeta, 1);
        let g = PMatrix::from_ints(1, 0, 6, 1).unwrap();
        assert_eq!(kappa_split(&g, -1, 3).unwrap().zeta, -1);
        let g = PMatrix::new(rat_frac(1, 3), rat(0), rat(0), rat(1)).unwrap();
        assert_eq!(kappa_split(&g, 1, 3).unwrap_err(), Error::NotInK);
    }

    #[test]
    fn chi_z_examples() {
        let c = chi_z(&rat(3), 3).unwrap();
        assert_eq!(c, QuadCharParams { unram: -1, tame: 1 });
        assert_eq!(chi_z(&rat(4), 5).unwrap(), QuadCharParams::trivial());
        assert_eq!(chi_z(&rat(25 * 4), 5).unwrap(), QuadCharParams::trivial());
    }

    #[test]
    fn pmatrix_serde() {
        let g = PMatrix::new(rat_frac(1, 9), rat(2), rat(-3), rat(1)).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"["1/9","2","-3","1"]"#);
        let back: PMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
    }
}
