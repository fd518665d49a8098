//! From mirabolic cycle data to Galois parameters.
//!
//! A cycle is `n` vectors `v_i` killed by `X` with `X^{s_i} F v_i = c_i v_{i+1}` and
//! `Gamma` acting on `v_i` through `omega^{a_i}`. Its dual carries a cyclic
//! `(phi, Gamma)`-structure that is normalized here and converted to an
//! induced Galois parameter.

use serde::Serialize;

use crate::chars::HChar;
use crate::coeff::{factorial_mod, Field, FieldElem};
use crate::error::{Error, Result};
use crate::galois::{omega_exponent, InducedParams};
use crate::laurent::{binom_mod, GammaUnit, LaurentSeries, EXACT};
use crate::phigamma::{omega_of_gamma, CyclicForm};

/// Raw cycle data. Indices are 0-based and taken mod `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleData {
    pub s: Vec<i64>,
    pub c: Vec<FieldElem>,
    /// `Gamma`-exponents: `gamma v_i = omega(gamma)^{a_i} v_i`.
    pub a: Vec<i64>,
}

impl CycleData {
    pub fn new(s: Vec<i64>, c: Vec<FieldElem>, a: Vec<i64>) -> Result<CycleData> {
        if s.is_empty() || s.len() != c.len() || s.len() != a.len() {
            return Err(Error::Invalid("cycle lists must have equal nonzero length".into()));
        }
        if s.iter().any(|&x| x < 0) {
            return Err(Error::Invalid("s_i must be nonnegative".into()));
        }
        if c.iter().any(|x| x.is_zero()) {
            return Err(Error::NonzeroRequired);
        }
        Ok(CycleData { s, c, a })
    }

    pub fn n(&self) -> usize {
        self.s.len()
    }

    pub fn field(&self) -> &Field {
        self.c[0].field()
    }

    pub fn p(&self) -> u32 {
        self.field().p()
    }

    /// `prod c_i`.
    pub fn c_product(&self) -> FieldElem {
        self.c.iter().fold(FieldElem::one(self.field()), |acc, x| acc.mul(x))
    }

    /// `e(i) = sum_{j<n} p^{n-1-j} s_{i+j}`.
    pub fn e(&self, i: usize) -> i64 {
        let n = self.n();
        let p = self.p() as i64;
        (0..n).fold(0, |acc, j| acc * p + self.s[(i + j) % n])
    }

    /// `e(i)_m = e(i) (p^{nm} - 1)/(p^n - 1)`.
    pub fn e_level(&self, i: usize, m: u32) -> Result<i64> {
        let q = (self.p() as i64).checked_pow(self.n() as u32).ok_or(Error::WindowTooSmall)?;
        let mut geo = 0i64;
        let mut pw = 1i64;
        for _ in 0..m {
            geo = geo.checked_add(pw).ok_or(Error::WindowTooSmall)?;
            pw = pw.checked_mul(q).ok_or(Error::WindowTooSmall)?;
        }
        self.e(i).checked_mul(geo).ok_or(Error::WindowTooSmall)
    }

    /// `sum_j p^{n-j} s_j`, which must be divisible by `p - 1`.
    pub fn weighted_sum(&self) -> i64 {
        self.e(0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SSData {
    pub p: u32,
    pub r: u32,
    pub r_prime: u32,
    pub chi: Vec<HChar>,
    pub s: Vec<i64>,
    pub c: Vec<FieldElem>,
    pub weights: Vec<(u32, u32)>,
}

/// `r' = (p-1)/2 - r` below the middle, `3(p-1)/2 - r` above it.
pub fn r_prime(p: u32, r: u32) -> Result<u32> {
    let half = (p - 1) / 2;
    if r > p - 1 {
        return Err(Error::Invalid(format!("r = {} out of range [0, {}]", r, p - 1)));
    }
    if r == half {
        return Err(Error::ExcludedParameter);
    }
    Ok(if r < half { half - r } else { 3 * half - r })
}

/// The four-vector cycle of the supersingular representation with parameter `r`.
pub fn ss_data(field: &Field, r: u32) -> Result<SSData> {
    let p = field.p();
    let rp = r_prime(p, r)?;
    let half = (p - 1) / 2;
    let sign = |e: u32| if e.is_multiple_of(2) { FieldElem::one(field) } else { FieldElem::from_int(field, -1) };
    let rf = factorial_mod(r, field);
    let rpf = factorial_mod(rp, field);
    let c = vec![
        sign(r).mul(&rpf),
        sign(half).mul(&rf),
        sign(r + half).mul(&rpf),
        sign(half).mul(&rf),
    ];
    let base = HChar::new(p, r as i64, 0);
    let chi = vec![base, base.swap().bracket(1, 0), base.bracket(1, 1), base.swap().bracket(0, 1)];
    Ok(SSData {
        p,
        r,
        r_prime: rp,
        chi,
        s: vec![rp as i64, r as i64, rp as i64, r as i64],
        c,
        weights: vec![(r, 0), (rp, r), (r, half), (rp, (r + half) % (p - 1))],
    })
}

impl SSData {
    /// Cycle data with `a_i` the first torus exponent of `chi_i`.
    pub fn cycle(&self) -> CycleData {
        CycleData {
            s: self.s.clone(),
            c: self.c.clone(),
            a: self.chi.iter().map(|x| x.e1 as i64).collect(),
        }
    }

    /// Whether equal eigencharacters always come with different `s`.
    pub fn irreducibility_condition(&self) -> bool {
        (0..4).all(|i| (0..4).all(|j| i == j || self.chi[i] != self.chi[j] || self.s[i] != self.s[j]))
    }
}

/// The dual cycle: `d_i = c_i^{-1}`, `t_i = s_i - (p-1)`, `b_i = -a_i`, trivial noise.
pub fn dual_basis_form(data: &CycleData) -> Result<CyclicForm> {
    if data.s.iter().all(|&s| s == 0) {
        return Err(Error::FiniteDimensional);
    }
    let p = data.p() as i64;
    let d = data.c.iter().map(|x| x.inv()).collect::<Result<Vec<_>>>()?;
    let t = data.s.iter().map(|s| s - (p - 1)).collect();
    let b = data.a.iter().map(|a| -a).collect();
    CyclicForm::plain(d, t, b)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormalForm {
    pub n: usize,
    pub t: i64,
    pub d: FieldElem,
    pub b1: u32,
}

impl NormalForm {
    /// The Galois parameter read off the normal form, `H = t + b1 (p^n-1)/(p-1)`, `Lam = d`.
    pub fn params(&self) -> Result<InducedParams> {
        let p = self.d.field().p();
        let q = omega_exponent(p, self.n as u32) as i128;
        InducedParams::new(self.n as u32, self.t as i128 + self.b1 as i128 * q, self.d.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Normalization {
    pub form: NormalForm,
    /// `h_i` with `h_i f_i` a noise-free basis; satisfies `h_{i+1} = phi(h_i) g_i`.
    pub change_of_basis: Vec<LaurentSeries>,
}

/// Number of factors needed so that `g(X^{p^{J-1}}) = 1` below `X^N`.
fn factor_count(p: u32, prec: i64) -> u32 {
    let mut j = 0;
    let mut pw = 1i64;
    while pw < prec {
        pw = pw.saturating_mul(p as i64);
        j += 1;
    }
    j + 1
}

pub fn normalize_cyclic(form: &CyclicForm, prec: i64) -> Result<Normalization> {
    form.validate()?;
    let n = form.n();
    let p = form.p() as i128;
    let field = form.d[0].field().clone();
    let t = -form.weighted_sum() / (p - 1);
    let d = form.d.iter().fold(FieldElem::one(&field), |acc, x| acc.mul(x));
    let jmax = factor_count(form.p(), prec);
    let mut hs = Vec::with_capacity(n);
    for i in 0..n {
        let mut h = LaurentSeries::one(&field).truncate(prec);
        for j in 1..=jmax as usize {
            let idx = (i + n * (j / n + 1) - j) % n;
            let mut g = form.noise[idx].truncate(prec);
            for _ in 1..j {
                if g.is_zero() || g.valuation() >= prec {
                    break;
                }
                g = g.frobenius_phi().truncate(prec);
            }
            h = h.mul(&g).truncate(prec);
        }
        hs.push(h);
    }
    Ok(Normalization {
        form: NormalForm { n, t: t as i64, d, b1: form.b[0] },
        change_of_basis: hs,
    })
}

/// `omega^{a_1 - 1} mu_lambda (x) Ind(omega_n^s)` with `s = weighted sum / (p-1)`, `lambda^n = prod c_i`.
pub fn galois_of_cycle(data: &CycleData) -> Result<InducedParams> {
    let p = data.p() as i64;
    let w = data.weighted_sum();
    if w.rem_euclid(p - 1) != 0 {
        return Err(Error::InconsistentGammaData);
    }
    InducedParams::with_twist(data.n() as u32, (w / (p - 1)) as i128, (data.a[0] - 1) as i128, data.c_product())
}

/// Closed form for the supersingular cycle: exponent `(p^2+1)/2 s'` twisted by `omega^{r-1}`,
/// `Lam = (-1)^{(p-1)/2} (r!)^2 (r'!)^2`.
pub fn ss_closed_form(field: &Field, r: u32) -> Result<InducedParams> {
    let p = field.p() as i64;
    let rp = r_prime(field.p(), r)?;
    let half = (p - 1) / 2;
    let sp = if (r as i64) < half { p - 2 * r as i64 } else { 3 * p - 2 * r as i64 };
    let k = (p * p + 1) / 2;
    let sign = if half % 2 == 0 { FieldElem::one(field) } else { FieldElem::from_int(field, -1) };
    let f = factorial_mod(r, field).mul(&factorial_mod(rp, field));
    InducedParams::with_twist(4, (k * sp) as i128, r as i128 - 1, sign.mul(&f).mul(&f))
}

/// Simulated `phi(f_i) = X^{s_i - (p-1)} u f_{i+1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualFrobenius {
    pub i: usize,
    pub level: u32,
    pub exponent: i64,
    pub unit: LaurentSeries,
}

impl DualFrobenius {
    pub fn series(&self) -> LaurentSeries {
        self.unit.shift(self.exponent)
    }
}

/// Smallest level whose window covers `p K + p - 1`.
pub fn simulation_level(data: &CycleData, i: usize, k: i64) -> Result<u32> {
    if data.e(i) == 0 {
        return Err(Error::FiniteDimensional);
    }
    let need = data.p() as i64 * k + data.p() as i64 - 1;
    let mut m = 1;
    while data.e_level(i, m)? < need {
        m += 1;
    }
    Ok(m)
}

/// `(1+X)^{-j}` as an exact-length series.
fn inv_binomial_power(field: &Field, j: u32, len: i64) -> Result<LaurentSeries> {
    let p = field.p();
    let codes: Vec<u32> = (0..=j).map(|k| binom_mod(j as u64, k as u64, p)).collect();
    LaurentSeries::from_codes(field, 0, &codes, EXACT).inv_capped(len)
}

/// Runs the finite-level model of the cycle and reads off `phi(f_i)` to precision `k`.
pub fn simulate_dual_frobenius(data: &CycleData, i: usize, k: i64) -> Result<DualFrobenius> {
    let m = simulation_level(data, i, k)?;
    simulate_dual_frobenius_at_level(data, i, k, m)
}

pub fn simulate_dual_frobenius_at_level(data: &CycleData, i: usize, k: i64, m: u32) -> Result<DualFrobenius> {
    let n = data.n();
    let p = data.p() as i64;
    let field = data.field().clone();
    let i = i % n;
    let next = (i + 1) % n;
    let e_m = data.e_level(i, m)?;
    if e_m < p * k + p - 1 {
        return Err(Error::WindowTooSmall);
    }
    let s_i = data.s[i];
    // F^{nm+1} v_i = (c_i / c) X^{E} F^{n(m+1)} v_{i+1}
    let qm = p.checked_pow(n as u32 * m).ok_or(Error::WindowTooSmall)?;
    let big_e = qm * (data.e(next) - s_i);
    let top = data.e_level(next, m + 1)?;
    // coefficients h_0..h_{kmax-1} of each component suffice for precision k
    let kmax = ((k + p - 1) + p - 1) / p + 1;
    let mut sum = LaurentSeries::zero(&field, EXACT);
    for j in 0..p as u32 {
        // the level-(m+1) coordinate of (1+X)^{-j} X^{s_i} F^{nm+1} v_i, scaled by c^m
        let span = top - s_i - big_e + 1;
        let model = inv_binomial_power(&field, j, span)?
            .scale(&data.c[i])
            .shift(s_i + big_e);
        let mut codes = Vec::with_capacity(kmax as usize);
        for kk in 0..kmax.min(e_m + 1) {
            let a = e_m - kk;
            // X^a acts as X^{pa} after F
            codes.push(model.coeff_code(top - p * a));
        }
        let h = LaurentSeries::from_codes(&field, 0, &codes, codes.len() as i64);
        let lift = LaurentSeries::from_codes(
            &field,
            0,
            &(0..=j).map(|t| binom_mod(j as u64, t as u64, p as u32)).collect::<Vec<_>>(),
            EXACT,
        );
        sum = sum.add(&lift.mul(&h.frobenius_phi()));
    }
    let reduced = sum.shift(-(p - 1));
    if reduced.is_zero() || reduced.valuation() != 0 {
        return Err(Error::NotEtale);
    }
    let unit = reduced.inv_capped(k)?.truncate(k);
    Ok(DualFrobenius { i, level: m, exponent: s_i - (p - 1), unit })
}

/// Simulated `gamma(f_i) = h f_i` to precision `k`.
pub fn simulate_dual_gamma(data: &CycleData, i: usize, c: GammaUnit, k: i64) -> Result<LaurentSeries> {
    let n = data.n();
    let p = data.p();
    let field = data.field().clone();
    let i = i % n;
    let m = simulation_level(data, i, k)?;
    let e_m = data.e_level(i, m)?;
    let cinv = c.inverse(p, k + 1);
    let chi = omega_of_gamma(c, &field).pow(data.a[i])?;
    // gamma^{-1}(X) / X
    let x = LaurentSeries::monomial(&field, 1, 1, k + 2);
    let w = x.gamma_act(cinv, k + 2)?.shift(-1).truncate(k);
    let mut codes = Vec::with_capacity(k as usize);
    for kk in 0..k.min(e_m + 1) {
        codes.push(w.pow_capped(e_m - kk, k)?.coeff_code(kk));
    }
    Ok(LaurentSeries::from_codes(&field, 0, &codes, codes.len() as i64).scale(&chi.inv()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::field_make;
    use crate::laurent::random_one_unit;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fe(f: &Field, n: i64) -> FieldElem {
        FieldElem::from_int(f, n)
    }

    #[test]
    fn ss_tables() {
        let f = field_make(5, 1).unwrap();
        let d = ss_data(&f, 1).unwrap();
        assert_eq!(d.r_prime, 1);
        assert_eq!(d.s, vec![1, 1, 1, 1]);
        assert_eq!(d.c, vec![fe(&f, -1), fe(&f, 1), fe(&f, -1), fe(&f, 1)]);
        assert_eq!(d.cycle().a, vec![1, 2, 3, 0]);
        let d0 = ss_data(&f, 0).unwrap();
        assert_eq!(d0.s, vec![2, 0, 2, 0]);
        assert_eq!(d0.c, vec![fe(&f, 2), fe(&f, 1), fe(&f, 2), fe(&f, 1)]);
        assert_eq!(ss_data(&f, 2).unwrap_err(), Error::ExcludedParameter);
        assert!(d.irreducibility_condition() && d0.irreducibility_condition());
    }

    #[test]
    fn dual_forms() {
        let f = field_make(5, 1).unwrap();
        let form = dual_basis_form(&ss_data(&f, 1).unwrap().cycle()).unwrap();
        assert_eq!(form.t, vec![-3; 4]);
        assert_eq!(form.d, vec![fe(&f, -1), fe(&f, 1), fe(&f, -1), fe(&f, 1)]);
        assert_eq!(form.b, vec![3, 2, 1, 0]);
        let form0 = dual_basis_form(&ss_data(&f, 0).unwrap().cycle()).unwrap();
        assert_eq!(form0.t, vec![-2, -4, -2, -4]);
        assert_eq!(form0.d, vec![fe(&f, 3), fe(&f, 1), fe(&f, 3), fe(&f, 1)]);
        let single = CycleData::new(vec![4], vec![fe(&f, 2)], vec![0]).unwrap();
        assert_eq!(dual_basis_form(&single).unwrap().t, vec![0]);
        let zero = CycleData::new(vec![0, 0], vec![fe(&f, 1); 2], vec![0, 0]).unwrap();
        assert_eq!(dual_basis_form(&zero).unwrap_err(), Error::FiniteDimensional);
    }

    #[test]
    fn normal_forms() {
        let f = field_make(5, 1).unwrap();
        let form0 = dual_basis_form(&ss_data(&f, 0).unwrap().cycle()).unwrap();
        let nf = normalize_cyclic(&form0, 20).unwrap().form;
        assert_eq!((nf.t, nf.d.clone(), nf.b1), (91, fe(&f, 4), 0));
        let one = CyclicForm::plain(vec![fe(&f, 3)], vec![0], vec![2]).unwrap();
        let nf1 = normalize_cyclic(&one, 10).unwrap().form;
        assert_eq!((nf1.t, nf1.d, nf1.b1), (0, fe(&f, 3), 2));
    }

    #[test]
    fn noise_is_absorbed() {
        let f = field_make(3, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let clean = dual_basis_form(&ss_data(&f, 0).unwrap().cycle()).unwrap();
        let prec = 25;
        let noise: Vec<_> = (0..4).map(|_| random_one_unit(&mut rng, &f, prec)).collect();
        let noisy = CyclicForm::new(clean.d.clone(), clean.t.clone(), clean.b.iter().map(|&b| b as i64).collect(), noise.clone()).unwrap();
        let a = normalize_cyclic(&clean, prec).unwrap();
        let b = normalize_cyclic(&noisy, prec).unwrap();
        assert_eq!(a.form, b.form);
        for i in 0..4 {
            let lhs = b.change_of_basis[(i + 1) % 4].clone();
            let rhs = b.change_of_basis[i].frobenius_phi().mul(&noise[i]).truncate(prec);
            assert!(lhs.agrees_with(&rhs), "i = {}", i);
            assert_eq!(lhs.common_precision(&rhs), prec);
        }
    }

    #[test]
    fn galois_params() {
        let f = field_make(5, 1).unwrap();
        let g1 = galois_of_cycle(&ss_data(&f, 1).unwrap().cycle()).unwrap();
        assert_eq!((g1.h, g1.lam.clone()), (39, fe(&f, 1)));
        let g0 = galois_of_cycle(&ss_data(&f, 0).unwrap().cycle()).unwrap();
        assert_eq!((g0.h, g0.lam.clone()), (65 + 3 * 156, fe(&f, 4)));
        let bad = CycleData::new(vec![1, 0], vec![fe(&f, 1); 2], vec![0, 0]).unwrap();
        assert_eq!(galois_of_cycle(&bad).unwrap_err(), Error::InconsistentGammaData);
    }

    #[test]
    fn routes_agree() {
        for p in [3u32, 5, 7] {
            let f = field_make(p, 1).unwrap();
            for r in 0..p {
                if r == (p - 1) / 2 {
                    continue;
                }
                let data = ss_data(&f, r).unwrap();
                let g = galois_of_cycle(&data.cycle()).unwrap();
                assert_eq!(g, ss_closed_form(&f, r).unwrap(), "p={} r={}", p, r);
                let nf = normalize_cyclic(&dual_basis_form(&data.cycle()).unwrap(), 10).unwrap();
                assert_eq!(nf.form.params().unwrap(), g.dual(), "p={} r={}", p, r);
            }
        }
    }

    #[test]
    fn exponents() {
        let f = field_make(5, 1).unwrap();
        let d1 = ss_data(&f, 1).unwrap().cycle();
        for i in 0..4 {
            assert_eq!(d1.e(i), 156);
            assert_eq!(d1.e_level(i, 1).unwrap(), 156);
        }
        assert_eq!(d1.e_level(0, 2).unwrap(), 156 * 626);
        assert_eq!(ss_data(&f, 0).unwrap().cycle().e(0), 260);
    }

    #[test]
    fn simulated_frobenius_shape() {
        for (p, r) in [(3u32, 0u32), (3, 2), (5, 1), (5, 0)] {
            let f = field_make(p, 1).unwrap();
            let data = ss_data(&f, r).unwrap().cycle();
            for i in 0..4 {
                let out = simulate_dual_frobenius(&data, i, 6).unwrap();
                assert_eq!(out.exponent, data.s[i] - (p as i64 - 1));
                assert!(out.unit.coeff(0).mul(&data.c[i]).is_one());
                assert_eq!(out.unit.precision(), 6);
            }
        }
        let f = field_make(3, 1).unwrap();
        let data = ss_data(&f, 0).unwrap().cycle();
        assert_eq!(simulate_dual_frobenius_at_level(&data, 0, 50, 1).unwrap_err(), Error::WindowTooSmall);
    }

    #[test]
    fn simulated_gamma_leading() {
        let f = field_make(5, 1).unwrap();
        let data = ss_data(&f, 1).unwrap().cycle();
        for c in [2u64, 3, 7] {
            let g = GammaUnit::new(c, 5).unwrap();
            for i in 0..4 {
                let h = simulate_dual_gamma(&data, i, g, 5).unwrap();
                let expect = omega_of_gamma(g, &f).pow(-data.a[i]).unwrap();
                assert_eq!(h.coeff(0), expect);
            }
        }
    }
}
