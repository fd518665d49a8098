//! Etale (phi, Gamma)-modules over `k((X))` at finite precision.
//!
//! A module of rank `n` is given by its Frobenius matrix (column `j` holds
//! `phi(e_j)`) and an oracle returning the matrix of `gamma_c` at a requested
//! precision. Vectors are coordinate lists in the basis `e_1..e_n`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::chars::TameChar;
use crate::coeff::{Field, FieldElem};
use crate::error::{Error, Result};
use crate::galois::InducedParams;
use crate::laurent::{
    is_exact, one_unit_root, phi_basis_decompose, GammaUnit, LaurentSeries, EXACT,
};

pub type Matrix = Vec<Vec<LaurentSeries>>;
pub type Vector = Vec<LaurentSeries>;
pub type GammaOracle = Arc<dyn Fn(GammaUnit, i64) -> Result<Matrix> + Send + Sync>;

pub fn mat_identity(field: &Field, n: usize) -> Matrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { LaurentSeries::one(field) } else { LaurentSeries::zero(field, EXACT) })
                .collect()
        })
        .collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    let field = a[0][0].field().clone();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut acc = LaurentSeries::zero(&field, EXACT);
                    for l in 0..k {
                        acc = acc.add(&a[i][l].mul(&b[l][j]));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &Matrix, v: &[LaurentSeries]) -> Vector {
    let field = a[0][0].field().clone();
    a.iter()
        .map(|row| {
            let mut acc = LaurentSeries::zero(&field, EXACT);
            for (x, y) in row.iter().zip(v) {
                acc = acc.add(&x.mul(y));
            }
            acc
        })
        .collect()
}

pub fn mat_transpose(a: &Matrix) -> Matrix {
    let n = a.len();
    let m = a[0].len();
    (0..m).map(|j| (0..n).map(|i| a[i][j].clone()).collect()).collect()
}

pub fn mat_scale(a: &Matrix, c: &FieldElem) -> Matrix {
    a.iter().map(|row| row.iter().map(|x| x.scale(c)).collect()).collect()
}

pub fn mat_kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (n, m) = (a.len(), b.len());
    let mut out = Vec::with_capacity(n * m);
    for i in 0..n {
        for k in 0..m {
            let mut row = Vec::with_capacity(n * m);
            for j in 0..n {
                for l in 0..m {
                    row.push(a[i][j].mul(&b[k][l]));
                }
            }
            out.push(row);
        }
    }
    out
}

pub fn mat_truncate(a: &Matrix, prec: i64) -> Matrix {
    a.iter().map(|row| row.iter().map(|x| x.truncate(prec)).collect()).collect()
}

pub fn mat_min_valuation(a: &Matrix) -> Option<i64> {
    a.iter().flatten().filter(|x| !x.is_zero()).map(|x| x.valuation()).min()
}

/// Smallest precision among the entries.
pub fn mat_precision(a: &Matrix) -> i64 {
    a.iter().flatten().map(|x| x.precision()).min().unwrap_or(EXACT)
}

fn vec_frobenius(v: &[LaurentSeries]) -> Vector {
    v.iter().map(|x| x.frobenius_phi()).collect()
}

/// Gauss-Jordan elimination with a pivot of least valuation in each column.
/// Inverses of exact non-monomial pivots are truncated at `cap`.
pub fn mat_inverse(a: &Matrix, cap: i64) -> Result<Matrix> {
    let n = a.len();
    let field = a[0][0].field().clone();
    let mut m: Matrix = a.clone();
    let mut inv = mat_identity(&field, n);
    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| !m[r][col].is_zero())
            .min_by_key(|&r| m[r][col].valuation())
            .ok_or(Error::NotInvertible)?;
        m.swap(col, pivot);
        inv.swap(col, pivot);
        let pinv = m[col][col].inv_capped(cap)?;
        m[col] = m[col].iter().map(|x| x.mul(&pinv)).collect();
        inv[col] = inv[col].iter().map(|x| x.mul(&pinv)).collect();
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            let (mr, mc) = (m[r].clone(), m[col].clone());
            m[r] = mr.iter().zip(&mc).map(|(x, y)| x.sub(&f.mul(y))).collect();
            let (ir, ic) = (inv[r].clone(), inv[col].clone());
            inv[r] = ir.iter().zip(&ic).map(|(x, y)| x.sub(&f.mul(y))).collect();
        }
    }
    Ok(inv)
}

/// Determinant by elimination; pivots as in [`mat_inverse`].
pub fn mat_det(a: &Matrix, cap: i64) -> Result<LaurentSeries> {
    let n = a.len();
    let field = a[0][0].field().clone();
    let mut m = a.clone();
    let mut det = LaurentSeries::one(&field);
    for col in 0..n {
        let pivot = match (col..n)
            .filter(|&r| !m[r][col].is_zero())
            .min_by_key(|&r| m[r][col].valuation())
        {
            Some(r) => r,
            None => return Ok(LaurentSeries::zero(&field, mat_precision(&m))),
        };
        if pivot != col {
            m.swap(col, pivot);
            det = det.neg();
        }
        det = det.mul(&m[col][col]);
        let pinv = m[col][col].inv_capped(cap)?;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].mul(&pinv);
            let (mr, mc) = (m[r].clone(), m[col].clone());
            m[r] = mr.iter().zip(&mc).map(|(x, y)| x.sub(&f.mul(y))).collect();
        }
    }
    Ok(det)
}

#[derive(Clone)]
pub struct PhiGammaModule {
    field: Field,
    phi: Matrix,
    gamma: GammaOracle,
    precision: i64,
}

impl fmt::Debug for PhiGammaModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PhiGammaModule(rank {}, precision {}, phi = {:?})", self.rank(), self.precision, self.phi)
    }
}

/// `omega(c)` in the coefficient field.
pub fn omega_of_gamma(c: GammaUnit, field: &Field) -> FieldElem {
    FieldElem::from_int(field, (c.value() % field.p() as u64) as i64)
}

impl PhiGammaModule {
    pub fn new(field: &Field, phi: Matrix, gamma: GammaOracle, precision: i64) -> Result<PhiGammaModule> {
        let n = phi.len();
        if n == 0 || phi.iter().any(|row| row.len() != n) {
            return Err(Error::Invalid("phi matrix must be square and nonempty".into()));
        }
        Ok(PhiGammaModule { field: field.clone(), phi, gamma, precision })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn p(&self) -> u32 {
        self.field.p()
    }

    pub fn rank(&self) -> usize {
        self.phi.len()
    }

    pub fn precision(&self) -> i64 {
        self.precision
    }

    pub fn phi_matrix(&self) -> &Matrix {
        &self.phi
    }

    pub fn gamma_matrix(&self, c: GammaUnit, prec: i64) -> Result<Matrix> {
        (self.gamma)(c, prec)
    }

    pub fn with_precision(&self, precision: i64) -> PhiGammaModule {
        PhiGammaModule { precision, ..self.clone() }
    }

    /// `phi(v) = Phi * phi(coords)`.
    pub fn phi_vec(&self, v: &[LaurentSeries]) -> Vector {
        mat_vec(&self.phi, &vec_frobenius(v))
    }

    /// `gamma_c(v) = G_c * gamma_c(coords)`, computed to precision `prec`.
    pub fn gamma_vec(&self, c: GammaUnit, v: &[LaurentSeries], prec: i64) -> Result<Vector> {
        let shift = v.iter().filter(|x| !x.is_zero()).map(|x| x.valuation()).min().unwrap_or(0).min(0);
        let g = self.gamma_matrix(c, prec - shift)?;
        let gv: Vector = v.iter().map(|x| x.gamma_act(c, prec - shift)).collect::<Result<_>>()?;
        Ok(mat_vec(&g, &gv).into_iter().map(|x| x.truncate(prec)).collect())
    }

    fn phi_inverse(&self) -> Result<Matrix> {
        let cap = self.inverse_cap();
        mat_inverse(&self.phi, cap).map_err(|e| match e {
            Error::NotInvertible => Error::NotEtale,
            e => e,
        })
    }

    fn inverse_cap(&self) -> i64 {
        let spread = mat_min_valuation(&self.phi).unwrap_or(0).abs();
        let base = if is_exact(self.precision) { 64 } else { self.precision };
        base + 2 * spread + 1
    }

    /// Digits of `psi(v)` guaranteed when every coordinate of `v` is known to `prec`.
    pub fn psi_precision(&self, prec: i64) -> Result<i64> {
        let inv = self.phi_inverse()?;
        let shift = mat_min_valuation(&inv).unwrap_or(0).min(0);
        Ok((prec + shift).div_euclid(self.p() as i64))
    }

    /// `psi(v) = v_0` where `v = sum_i (1+X)^i phi(v_i)`.
    pub fn psi(&self, v: &[LaurentSeries]) -> Result<Vector> {
        let inv = self.phi_inverse()?;
        let c = mat_vec(&inv, v);
        Ok(c.iter().map(|x| phi_basis_decompose(x).swap_remove(0)).collect())
    }
}

pub fn constant_matrix(c: &FieldElem) -> Matrix {
    vec![vec![LaurentSeries::constant(c, EXACT)]]
}

/// The rank-one module attached to a tame character.
pub fn make_rank1(chi: &TameChar, precision: i64) -> PhiGammaModule {
    let field = chi.field().clone();
    let phi = constant_matrix(&chi.unram);
    let a = chi.tame_exp as i64;
    let f2 = field.clone();
    let gamma: GammaOracle = Arc::new(move |c, _prec| {
        let w = omega_of_gamma(c, &f2).pow(a)?;
        Ok(constant_matrix(&w))
    });
    PhiGammaModule::new(&field, phi, gamma, precision).unwrap()
}

/// Rank-one module with `phi(e) = lambda X^k e` and trivial `Gamma` on `e`'s
/// leading term; only used for etale checks.
pub fn make_monomial_rank1(lambda: &FieldElem, k: i64, precision: i64) -> PhiGammaModule {
    let field = lambda.field().clone();
    let phi = vec![vec![LaurentSeries::monomial(&field, lambda.code(), k, EXACT)]];
    let f2 = field.clone();
    let gamma: GammaOracle = Arc::new(move |_c, _prec| Ok(mat_identity(&f2, 1)));
    PhiGammaModule::new(&field, phi, gamma, precision).unwrap()
}

/// `(omega(c) X / gamma_c(X))^{1/(p^n - 1)}` in `1 + X k[[X]]`.
pub fn fractional_unit(c: GammaUnit, n: u32, field: &Field, prec: i64) -> Result<LaurentSeries> {
    let p = field.p();
    let len = prec.max(1) as usize;
    let codes: Vec<u32> = (0..len)
        .map(|i| crate::laurent::binom_mod(c.value(), i as u64 + 1, p))
        .collect();
    let gx_over_x = LaurentSeries::from_codes(field, 0, &codes, prec);
    let ratio = gx_over_x.invert()?.scale(&omega_of_gamma(c, field));
    one_unit_root(&ratio, (p as u64).pow(n) - 1)
}

/// `Ind(omega_n^h) (x) omega^tame` with `Lam` placed on `phi(e_n)`.
pub fn make_induced_lam(n: u32, h: i64, tame: i64, lam: &FieldElem, precision: i64) -> Result<PhiGammaModule> {
    if lam.is_zero() {
        return Err(Error::NonzeroRequired);
    }
    let field = lam.field().clone();
    let p = field.p() as i64;
    let nn = n as usize;
    let mut phi: Matrix = vec![vec![LaurentSeries::zero(&field, EXACT); nn]; nn];
    for i in 0..nn - 1 {
        phi[i + 1][i] = LaurentSeries::one(&field);
    }
    phi[0][nn - 1] = LaurentSeries::monomial(&field, lam.code(), -h * (p - 1), EXACT);
    let f2 = field.clone();
    let gamma: GammaOracle = Arc::new(move |c, prec| {
        let scalar = omega_of_gamma(c, &f2).pow(tame)?;
        let w = fractional_unit(c, n, &f2, prec)?;
        let mut g: Matrix = vec![vec![LaurentSeries::zero(&f2, EXACT); nn]; nn];
        let mut pi = 1i64;
        for (i, row) in g.iter_mut().enumerate() {
            let e = h * pi * (p - 1);
            row[i] = w.pow_capped(e, prec)?.scale(&scalar);
            pi *= p;
        }
        Ok(g)
    });
    PhiGammaModule::new(&field, phi, gamma, precision)
}

/// `Ind(omega_n^h) (x) chi` with `Lam = chi(p)^n`.
pub fn make_induced(n: u32, h: i64, chi: &TameChar, precision: i64) -> Result<PhiGammaModule> {
    let lam = chi.unram.pow(n as i64)?;
    make_induced_lam(n, h, chi.tame_exp as i64, &lam, precision)
}

/// The module realizing a parameter triple (tame twist absorbed into `H`).
pub fn from_induced_params(x: &InducedParams, precision: i64) -> Result<PhiGammaModule> {
    make_induced_lam(x.n, x.h as i64, 0, &x.lam, precision)
}

pub fn twist(d: &PhiGammaModule, chi: &TameChar) -> PhiGammaModule {
    let phi = mat_scale(&d.phi, &chi.unram);
    let inner = d.gamma.clone();
    let a = chi.tame_exp as i64;
    let field = d.field.clone();
    let gamma: GammaOracle = Arc::new(move |c, prec| {
        let s = omega_of_gamma(c, &field).pow(a)?;
        Ok(mat_scale(&inner(c, prec)?, &s))
    });
    PhiGammaModule { field: d.field.clone(), phi, gamma, precision: d.precision }
}

pub fn dual(d: &PhiGammaModule) -> Result<PhiGammaModule> {
    let phi = mat_transpose(&d.phi_inverse()?);
    let inner = d.gamma.clone();
    let gamma: GammaOracle = Arc::new(move |c, prec| {
        let g = inner(c, prec)?;
        let spread = mat_min_valuation(&g).unwrap_or(0).abs();
        Ok(mat_truncate(&mat_transpose(&mat_inverse(&g, prec + 2 * spread)?), prec))
    });
    Ok(PhiGammaModule { field: d.field.clone(), phi, gamma, precision: d.precision })
}

pub fn tensor(a: &PhiGammaModule, b: &PhiGammaModule) -> Result<PhiGammaModule> {
    if a.p() != b.p() || a.field.m() != b.field.m() {
        return Err(Error::FieldMismatch);
    }
    let phi = mat_kron(&a.phi, &b.phi);
    let (ga, gb) = (a.gamma.clone(), b.gamma.clone());
    let gamma: GammaOracle = Arc::new(move |c, prec| Ok(mat_kron(&ga(c, prec)?, &gb(c, prec)?)));
    Ok(PhiGammaModule {
        field: a.field.clone(),
        phi,
        gamma,
        precision: a.precision.min(b.precision),
    })
}

/// Block-diagonal sum.
pub fn direct_sum(a: &PhiGammaModule, b: &PhiGammaModule) -> Result<PhiGammaModule> {
    if a.p() != b.p() || a.field.m() != b.field.m() {
        return Err(Error::FieldMismatch);
    }
    let block = |x: &Matrix, y: &Matrix, field: &Field| -> Matrix {
        let (n, m) = (x.len(), y.len());
        let mut out = vec![vec![LaurentSeries::zero(field, EXACT); n + m]; n + m];
        for i in 0..n {
            for j in 0..n {
                out[i][j] = x[i][j].clone();
            }
        }
        for i in 0..m {
            for j in 0..m {
                out[n + i][n + j] = y[i][j].clone();
            }
        }
        out
    };
    let field = a.field.clone();
    let phi = block(&a.phi, &b.phi, &field);
    let (ga, gb) = (a.gamma.clone(), b.gamma.clone());
    let f2 = field.clone();
    let gamma: GammaOracle = Arc::new(move |c, prec| Ok(block(&ga(c, prec)?, &gb(c, prec)?, &f2)));
    Ok(PhiGammaModule { field, phi, gamma, precision: a.precision.min(b.precision) })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EtaleCertificate {
    pub etale: bool,
    pub det_valuation: Option<i64>,
    pub det_leading: Option<FieldElem>,
}

/// Whether the Frobenius matrix is invertible, with the determinant's leading term.
pub fn etale_check(d: &PhiGammaModule) -> EtaleCertificate {
    match mat_det(&d.phi, d.inverse_cap()) {
        Ok(det) if !det.is_zero() => EtaleCertificate {
            etale: true,
            det_valuation: Some(det.valuation()),
            det_leading: det.leading_coeff(),
        },
        _ => EtaleCertificate { etale: false, det_valuation: None, det_leading: None },
    }
}

/// Least positive primitive root mod `p`.
pub fn primitive_root(p: u32) -> u64 {
    let f = crate::coeff::field_make(p, 1).expect("odd prime");
    (2..p as u64)
        .find(|&g| {
            let x = f.from_int(g as i64);
            (1..p - 1).all(|k| f.pow(x, k as i64).unwrap() != 1)
        })
        .unwrap_or(1)
}

/// The characters of a module whose `phi` and `gamma` matrices are diagonal constants.
pub fn diagonal_characters(d: &PhiGammaModule) -> Result<Vec<TameChar>> {
    let p = d.p();
    let g = GammaUnit::new(primitive_root(p), p)?;
    let prec = if is_exact(d.precision) { 8 } else { d.precision.max(1) };
    let gm = d.gamma_matrix(g, prec)?;
    let n = d.rank();
    let is_const = |x: &LaurentSeries| -> bool {
        x.is_zero() || (x.is_monomial() && x.valuation() == 0)
    };
    let w = omega_of_gamma(g, &d.field);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        for j in 0..n {
            let off = i != j && !(d.phi[i][j].is_zero() && gm[i][j].is_zero());
            if off || !is_const(&d.phi[i][j]) || !is_const(&gm[i][j]) {
                return Err(Error::UndecidableAtThisRank);
            }
        }
        let unram = d.phi[i][i].leading_coeff().ok_or(Error::NotEtale)?;
        let gval = gm[i][i].leading_coeff().ok_or(Error::UndecidableAtThisRank)?;
        let a = (0..p as i64 - 1)
            .find(|&a| w.pow(a).map(|x| x == gval).unwrap_or(false))
            .ok_or(Error::UndecidableAtThisRank)?;
        out.push(TameChar::new(unram, a)?);
    }
    Ok(out)
}

/// The tame character of a rank-one module of the form `D(chi)`.
pub fn rank1_params(d: &PhiGammaModule) -> Result<TameChar> {
    if d.rank() != 1 {
        return Err(Error::UndecidableAtThisRank);
    }
    Ok(diagonal_characters(d)?.swap_remove(0))
}

/// JSON shape `{"rank", "phi", "gamma_samples", "precision"}`.
pub fn module_json(d: &PhiGammaModule, samples: &[u64]) -> Result<serde_json::Value> {
    let prec = if is_exact(d.precision) { 16 } else { d.precision };
    let mut gs = Vec::new();
    for &c in samples {
        let u = GammaUnit::new(c, d.p())?;
        gs.push(json!({"c": c, "matrix": d.gamma_matrix(u, prec)?}));
    }
    Ok(json!({
        "rank": d.rank(),
        "phi": d.phi,
        "gamma_samples": gs,
        "precision": prec,
    }))
}

/// Checks `gamma(phi(v)) = phi(gamma(v))` for one vector; returns the precision
/// at which both sides were compared.
pub fn phi_gamma_commutes(d: &PhiGammaModule, c: GammaUnit, v: &[LaurentSeries]) -> Result<(bool, i64)> {
    let target = d.precision;
    // phi can lower valuations by up to this much
    let shift = (-mat_min_valuation(&d.phi).unwrap_or(0)).max(0);
    let work = target + shift;
    let lhs = d.gamma_vec(c, &d.phi_vec(v), work)?;
    let rhs = d.phi_vec(&d.gamma_vec(c, v, work)?);
    let mut ok = true;
    let mut reached = EXACT;
    for (x, y) in lhs.iter().zip(&rhs) {
        reached = reached.min(x.common_precision(y));
        ok &= x.agrees_with(y);
    }
    Ok((ok && reached >= target, reached))
}

/// Cyclic shape `phi(f_i) = d_i g_i X^{t_i} f_{i+1}`, `gamma(f_i) = omega^{b_i} (1-unit) f_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicForm {
    pub d: Vec<FieldElem>,
    pub t: Vec<i64>,
    pub b: Vec<u32>,
    pub noise: Vec<LaurentSeries>,
}

impl CyclicForm {
    pub fn new(d: Vec<FieldElem>, t: Vec<i64>, b: Vec<i64>, noise: Vec<LaurentSeries>) -> Result<CyclicForm> {
        let n = d.len();
        if n == 0 || t.len() != n || b.len() != n || noise.len() != n {
            return Err(Error::Invalid("cyclic form components must have equal nonzero length".into()));
        }
        if d.iter().any(|x| x.is_zero()) {
            return Err(Error::NonzeroRequired);
        }
        if noise.iter().any(|g| !g.is_one_unit()) {
            return Err(Error::NotOneUnit);
        }
        let p = d[0].field().p() as i64;
        let b = b.iter().map(|x| x.rem_euclid(p - 1) as u32).collect();
        let form = CyclicForm { d, t, b, noise };
        form.validate()?;
        Ok(form)
    }

    /// Noise-free form.
    pub fn plain(d: Vec<FieldElem>, t: Vec<i64>, b: Vec<i64>) -> Result<CyclicForm> {
        let field = d.first().ok_or(Error::Invalid("empty form".into()))?.field().clone();
        let noise = vec![LaurentSeries::one(&field); d.len()];
        CyclicForm::new(d, t, b, noise)
    }

    pub fn n(&self) -> usize {
        self.d.len()
    }

    pub fn p(&self) -> u32 {
        self.d[0].field().p()
    }

    /// `sum_j p^{n-j} t_j`.
    pub fn weighted_sum(&self) -> i128 {
        let p = self.p() as i128;
        self.t.iter().fold(0i128, |acc, &t| acc * p + t as i128)
    }

    /// Divisibility of the weighted sum by `p - 1`, then `b_{i+1} = b_i - t_i`.
    pub fn validate(&self) -> Result<()> {
        let p = self.p() as i64;
        if self.weighted_sum().rem_euclid(p as i128 - 1) != 0 {
            return Err(Error::InconsistentGammaData);
        }
        let n = self.n();
        for i in 0..n {
            let next = self.b[(i + 1) % n] as i64;
            if (self.b[i] as i64 - self.t[i] - next).rem_euclid(p - 1) != 0 {
                return Err(Error::NotPhiGammaCompatible);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::field_make;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rank1_examples() {
        let f = field_make(5, 1).unwrap();
        let chi = TameChar::new(FieldElem::from_int(&f, 3), 2).unwrap();
        let d = make_rank1(&chi, 20);
        assert_eq!(rank1_params(&d).unwrap(), chi);
        let g = d.gamma_matrix(GammaUnit::new(2, 5).unwrap(), 10).unwrap();
        assert_eq!(g[0][0].coeff(0), FieldElem::from_int(&f, 4));
        let tw = twist(&make_rank1(&TameChar::trivial(&f), 20), &chi);
        assert_eq!(rank1_params(&tw).unwrap(), chi);
        let du = dual(&d).unwrap();
        assert_eq!(rank1_params(&du).unwrap(), chi.inv());
    }

    #[test]
    fn induced_phi_matrix_and_det() {
        let f = field_make(5, 1).unwrap();
        let d = make_induced(4, 39, &TameChar::trivial(&f), 40).unwrap();
        assert_eq!(d.phi_matrix()[0][3], LaurentSeries::x_pow(&f, -156));
        let cert = etale_check(&d);
        assert!(cert.etale);
        assert_eq!(cert.det_valuation, Some(-156));
        let x = make_monomial_rank1(&FieldElem::one(&f), 1, 10);
        assert!(etale_check(&x).etale);
        let zero = PhiGammaModule::new(&f, vec![vec![LaurentSeries::zero(&f, EXACT)]], Arc::new(|_, _| Err(Error::NotEtale)), 10).unwrap();
        assert!(!etale_check(&zero).etale);
        assert_eq!(dual(&zero).unwrap_err(), Error::NotEtale);
    }

    #[test]
    fn n1_induced_gamma() {
        let f = field_make(3, 1).unwrap();
        let d = make_induced(1, 2, &TameChar::trivial(&f), 12).unwrap();
        let c = GammaUnit::new(2, 3).unwrap();
        let g = d.gamma_matrix(c, 12).unwrap();
        // gamma(e) = (omega(c) X / gamma(X))^h e
        let gx = LaurentSeries::monomial(&f, 1, 1, 13).gamma_act(c, 13).unwrap();
        let direct = LaurentSeries::monomial(&f, 2, 1, EXACT)
            .mul(&gx.inv_capped(12).unwrap())
            .pow_capped(2, 12)
            .unwrap();
        assert!(g[0][0].agrees_with(&direct));
    }

    #[test]
    fn psi_examples() {
        let f = field_make(3, 1).unwrap();
        let d = make_rank1(&TameChar::trivial(&f), 30);
        let one_plus_x = vec![LaurentSeries::from_codes(&f, 0, &[1, 1], 30)];
        assert!(d.psi(&one_plus_x).unwrap()[0].is_zero());
        let one = vec![LaurentSeries::constant(&FieldElem::one(&f), 30)];
        assert!(d.psi(&one).unwrap()[0].coeff(0).is_one());
        let x1 = vec![LaurentSeries::from_codes(&f, 1, &[1], 30)];
        assert_eq!(d.psi(&x1).unwrap()[0].coeff(0), FieldElem::from_int(&f, -1));
        let x3 = vec![LaurentSeries::monomial(&f, 1, 3, 30)];
        assert_eq!(d.psi(&x3).unwrap()[0], LaurentSeries::monomial(&f, 1, 1, 10));
        let xinv = vec![LaurentSeries::monomial(&f, 1, -1, 30)];
        assert_eq!(d.psi(&xinv).unwrap()[0], LaurentSeries::monomial(&f, 1, -1, 10));
    }

    #[test]
    fn commutation_small() {
        let f = field_make(3, 1).unwrap();
        let d = make_induced(2, 1, &TameChar::trivial(&f), 20).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v: Vector = (0..2).map(|_| crate::laurent::random_series(&mut rng, &f, -1, 30)).collect();
        for c in [2u64, 4, 10] {
            let (ok, _) = phi_gamma_commutes(&d, GammaUnit::new(c, 3).unwrap(), &v).unwrap();
            assert!(ok, "c = {}", c);
        }
    }

    #[test]
    fn cyclic_form_validation() {
        let f = field_make(5, 1).unwrap();
        let one = FieldElem::one(&f);
        let ok = CyclicForm::plain(vec![one.clone(); 4], vec![-3; 4], vec![3, 2, 1, 0]);
        assert!(ok.is_ok());
        let wrong_sign = CyclicForm::plain(vec![one.clone(); 4], vec![-3; 4], vec![0, 1, 2, 3]);
        assert_eq!(wrong_sign.unwrap_err(), Error::NotPhiGammaCompatible);
        let indivisible = CyclicForm::plain(vec![one.clone(); 2], vec![1, 0], vec![0, 0]);
        assert_eq!(indivisible.unwrap_err(), Error::InconsistentGammaData);
    }
}
