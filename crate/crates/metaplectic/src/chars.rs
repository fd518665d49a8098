//! Tame characters of `Q_p^x`, their restrictions to the squares `S`, and
//! characters of the diagonal torus of `GL_2(F_p)`.

use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::coeff::{field_make, unit_residue, valuation, Field, FieldElem};
use crate::error::{Error, Result};
use crate::metagroup::QuadCharParams;

/// `mu_unram * omega^tame`: value `unram` at `p`, `omega^tame` on units.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TameChar {
    pub unram: FieldElem,
    #[serde(rename = "tame")]
    pub tame_exp: u32,
}

impl fmt::Debug for TameChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for TameChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.unram.is_one(), self.tame_exp) {
            (true, 0) => write!(f, "1"),
            (true, a) => write!(f, "omega^{}", a),
            (false, 0) => write!(f, "mu({})", self.unram),
            (false, a) => write!(f, "mu({})*omega^{}", self.unram, a),
        }
    }
}

impl TameChar {
    pub fn new(unram: FieldElem, tame_exp: i64) -> Result<TameChar> {
        if unram.is_zero() {
            return Err(Error::NonzeroRequired);
        }
        let p = unram.field().p() as i64;
        Ok(TameChar { tame_exp: tame_exp.rem_euclid(p - 1) as u32, unram })
    }

    pub fn trivial(field: &Field) -> TameChar {
        TameChar { unram: FieldElem::one(field), tame_exp: 0 }
    }

    pub fn omega_pow(field: &Field, a: i64) -> TameChar {
        TameChar::new(FieldElem::one(field), a).unwrap()
    }

    pub fn unramified(lambda: FieldElem) -> Result<TameChar> {
        TameChar::new(lambda, 0)
    }

    pub fn field(&self) -> &Field {
        self.unram.field()
    }

    pub fn p(&self) -> u32 {
        self.field().p()
    }

    pub fn mul(&self, o: &TameChar) -> TameChar {
        let p = self.p();
        TameChar {
            unram: self.unram.mul(&o.unram),
            tame_exp: (self.tame_exp + o.tame_exp) % (p - 1),
        }
    }

    pub fn inv(&self) -> TameChar {
        let p = self.p();
        TameChar {
            unram: self.unram.inv().expect("nonzero"),
            tame_exp: (p - 1 - self.tame_exp) % (p - 1),
        }
    }

    pub fn pow(&self, e: i64) -> TameChar {
        TameChar::new(self.unram.pow(e).expect("nonzero"), self.tame_exp as i64 * e).unwrap()
    }

    /// Value on a unit given by its residue mod `p`.
    pub fn eval_unit_residue(&self, u: u64) -> FieldElem {
        let f = self.field();
        let w = FieldElem::from_int(f, u as i64);
        w.pow(self.tame_exp as i64).expect("unit")
    }

    /// Value on a nonzero rational, with `omega(p) = 1`.
    pub fn eval(&self, x: &BigRational) -> Result<FieldElem> {
        let p = self.p();
        let v = valuation(x, p)?;
        let u = unit_residue(x, p)?;
        Ok(self.unram.pow(v)?.mul(&self.eval_unit_residue(u as u64)))
    }

    pub fn from_quad(q: &QuadCharParams, field: &Field) -> TameChar {
        TameChar::new(FieldElem::from_int(field, q.unram as i64), q.tame as i64).unwrap()
    }

    /// Restriction to the subgroup of squares.
    pub fn restrict_s(&self) -> SChar {
        let half = (self.p() - 1) / 2;
        SChar {
            val_p2: self.unram.mul(&self.unram),
            tame_exp: self.tame_exp % half,
        }
    }

    /// Parses `1`, `mu(L)`, `omega^A`, `mu(L)*omega^A`. `L` is an integer or a
    /// bracketed coefficient list `[c0,c1,...]`.
    pub fn parse(s: &str, field: &Field) -> Result<TameChar> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Invalid(format!("bad character spec {:?}", s));
        let mut unram = FieldElem::one(field);
        let mut tame = 0i64;
        if s == "1" {
            return Ok(TameChar::trivial(field));
        }
        for part in s.split('*') {
            if let Some(inner) = part.strip_prefix("mu(").and_then(|r| r.strip_suffix(')')) {
                unram = unram.mul(&parse_field_elem(inner, field)?);
            } else if let Some(e) = part.strip_prefix("omega^") {
                tame += e.parse::<i64>().map_err(|_| bad())?;
            } else if part == "omega" {
                tame += 1;
            } else {
                return Err(bad());
            }
        }
        TameChar::new(unram, tame)
    }
}

/// Parses an integer or a bracketed coefficient list.
pub fn parse_field_elem(s: &str, field: &Field) -> Result<FieldElem> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
        let coeffs: Vec<u32> = inner
            .split(',')
            .filter(|x| !x.trim().is_empty())
            .map(|x| {
                x.trim()
                    .parse::<i64>()
                    .map(|v| v.rem_euclid(field.p() as i64) as u32)
                    .map_err(|_| Error::Invalid(format!("bad coefficient {:?}", x)))
            })
            .collect::<Result<_>>()?;
        let mut c = coeffs;
        c.resize(field.m() as usize, 0);
        return FieldElem::from_coeffs(field, &c);
    }
    let n: i64 = s.parse().map_err(|_| Error::Invalid(format!("bad field element {:?}", s)))?;
    Ok(FieldElem::from_int(field, n))
}

/// The four characters of order dividing 2: `1, mu_{-1}, omega^{(p-1)/2}`, and their product.
pub fn quadratic_chars(field: &Field) -> [TameChar; 4] {
    let half = ((field.p() - 1) / 2) as i64;
    let minus = FieldElem::from_int(field, -1);
    let one = FieldElem::one(field);
    [
        TameChar::new(one.clone(), 0).unwrap(),
        TameChar::new(minus.clone(), 0).unwrap(),
        TameChar::new(one, half).unwrap(),
        TameChar::new(minus, half).unwrap(),
    ]
}

/// Every tame character with values in `field`.
pub fn all_tame_chars(field: &Field) -> Vec<TameChar> {
    let p = field.p() as i64;
    let mut out = Vec::new();
    for code in 1..field.size() {
        for a in 0..p - 1 {
            out.push(TameChar::new(FieldElem::from_code(field, code), a).unwrap());
        }
    }
    out
}

/// A character of `S`: value at `p^2` and a power of `omega` mod `(p-1)/2` on unit squares.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SChar {
    pub val_p2: FieldElem,
    #[serde(rename = "tame")]
    pub tame_exp: u32,
}

impl fmt::Debug for SChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S(p^2 -> {}, omega^{})", self.val_p2, self.tame_exp)
    }
}

impl SChar {
    pub fn new(val_p2: FieldElem, tame_exp: i64) -> Result<SChar> {
        if val_p2.is_zero() {
            return Err(Error::NonzeroRequired);
        }
        let half = ((val_p2.field().p() - 1) / 2) as i64;
        Ok(SChar { tame_exp: tame_exp.rem_euclid(half) as u32, val_p2 })
    }

    pub fn trivial(field: &Field) -> SChar {
        SChar { val_p2: FieldElem::one(field), tame_exp: 0 }
    }

    pub fn mul(&self, o: &SChar) -> SChar {
        SChar::new(self.val_p2.mul(&o.val_p2), (self.tame_exp + o.tame_exp) as i64).unwrap()
    }

    pub fn inv(&self) -> SChar {
        SChar::new(self.val_p2.inv().unwrap(), -(self.tame_exp as i64)).unwrap()
    }
}

/// `omega^e1 (x) omega^e2` on the diagonal torus of `GL_2(F_p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HChar {
    pub p: u32,
    pub e1: u32,
    pub e2: u32,
}

impl HChar {
    pub fn new(p: u32, e1: i64, e2: i64) -> HChar {
        let m = p as i64 - 1;
        HChar { p, e1: e1.rem_euclid(m) as u32, e2: e2.rem_euclid(m) as u32 }
    }

    /// Twist by `omega^{i(p-1)/2} (x) omega^{j(p-1)/2}`.
    pub fn bracket(&self, i: u32, j: u32) -> HChar {
        let half = ((self.p - 1) / 2) as i64;
        HChar::new(self.p, self.e1 as i64 + (i % 2) as i64 * half, self.e2 as i64 + (j % 2) as i64 * half)
    }

    pub fn swap(&self) -> HChar {
        HChar { p: self.p, e1: self.e2, e2: self.e1 }
    }
}

/// Convenience: the prime field.
pub fn prime_field(p: u32) -> Result<Field> {
    field_make(p, 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn restriction_kernel_is_quadratic() {
        let f = field_make(5, 2).unwrap();
        let all = all_tame_chars(&f);
        let triv = SChar::trivial(&f);
        let kernel: Vec<&TameChar> = all.iter().filter(|c| c.restrict_s() == triv).collect();
        assert_eq!(kernel.len(), 4);
        for q in quadratic_chars(&f) {
            assert!(kernel.contains(&&q));
        }
    }

    #[test]
    fn restriction_examples() {
        let f = field_make(5, 1).unwrap();
        let chi = TameChar::new(FieldElem::from_int(&f, 2), 3).unwrap();
        let r = chi.restrict_s();
        assert_eq!(r.val_p2, FieldElem::from_int(&f, 4));
        assert_eq!(r.tame_exp, 1);
        for e in quadratic_chars(&f) {
            assert_eq!(chi.mul(&e).restrict_s(), r);
            assert_eq!(e.mul(&e), TameChar::trivial(&f));
        }
    }

    #[test]
    fn bracket_examples() {
        let x = HChar::new(5, 1, 0);
        assert_eq!(x.bracket(0, 0), x);
        assert_eq!(x.swap().bracket(1, 0), HChar::new(5, 2, 1));
        assert_eq!(x.bracket(1, 1).bracket(1, 1), x);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(x.swap().bracket(i, j), x.bracket(j, i).swap());
            }
        }
    }

    #[test]
    fn parse_specs() {
        let f = field_make(5, 2).unwrap();
        let c = TameChar::parse("mu(3)*omega^2", &f).unwrap();
        assert_eq!(c.tame_exp, 2);
        assert_eq!(c.unram, FieldElem::from_int(&f, 3));
        assert_eq!(TameChar::parse("1", &f).unwrap(), TameChar::trivial(&f));
        let d = TameChar::parse("mu([0,1])", &f).unwrap();
        assert_eq!(d.unram.coeffs(), vec![0, 1]);
        assert!(TameChar::parse("nu(2)", &f).is_err());
        assert_eq!(c.to_string(), "mu(3)*omega^2");
    }
}
