//! Parameterised end-to-end checks shared by `selftest` and the acceptance tests.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chars::{all_tame_chars, quadratic_chars};
use crate::classify::{
    galois_of_cycle, normalize_cyclic, simulate_dual_frobenius, simulate_dual_gamma, ss_closed_form, ss_data,
};
use crate::coeff::{field_make, FieldElem};
use crate::error::Result;
use crate::galois::{half_p2_plus_1, iso_test, reduce_odd_exponent, order, InducedParams};
use crate::laurent::{phi_basis_decompose, random_one_unit, random_series, GammaUnit, LaurentSeries};
use crate::meta::{admissible_r, meta_irred_test, ps_image, verify_bijection, SummandKey};
use crate::metagroup::{
    chi_z, cocycle, hilbert, kappa_split, meta_inv, meta_mul, random_k_matrix, random_meta, random_rational,
    MetaElem, PMatrix,
};
use crate::phigamma::{make_induced, phi_gamma_commutes, CyclicForm, PhiGammaModule, Vector};
use crate::chars::TameChar;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: u128,
    pub limit_ms: u128,
}

impl CheckOutcome {
    fn finish(name: &str, start: Instant, limit: Duration, result: Result<std::result::Result<String, String>>) -> CheckOutcome {
        let elapsed = start.elapsed();
        let (ok, detail) = match result {
            Ok(Ok(d)) => (true, d),
            Ok(Err(d)) => (false, d),
            Err(e) => (false, format!("error: {}", e)),
        };
        let in_time = elapsed <= limit;
        CheckOutcome {
            name: name.to_string(),
            passed: ok && in_time,
            detail: if in_time { detail } else { format!("{} (over time limit)", detail) },
            elapsed_ms: elapsed.as_millis(),
            limit_ms: limit.as_millis(),
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: {} [{} ms / {} ms]",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.elapsed_ms,
            self.limit_ms
        )
    }
}

type Check = std::result::Result<String, String>;

fn scalar_meta(z: &num_rational::BigRational) -> MetaElem {
    MetaElem { g: PMatrix::scalar(z).unwrap(), zeta: 1 }
}

/// Cocycle identity on random triples and multiplicativity of the splitting over `GL_2(Z_p)`.
pub fn cocycle_suite(primes: &[u32], samples: usize, seed: u64) -> CheckOutcome {
    let start = Instant::now();
    let run = || -> Result<Check> {
        for &p in primes {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ p as u64);
            for i in 0..samples {
                let g: Vec<PMatrix> = (0..3).map(|_| random_meta(&mut rng, p).g).collect();
                let lhs = cocycle(&g[0], &g[1], p) * cocycle(&g[0].mul(&g[1]), &g[2], p);
                let rhs = cocycle(&g[0], &g[1].mul(&g[2]), p) * cocycle(&g[1], &g[2], p);
                if lhs != rhs {
                    return Ok(Err(format!("cocycle identity fails at p={} sample {}", p, i)));
                }
                let k1 = random_k_matrix(&mut rng, p);
                let k2 = random_k_matrix(&mut rng, p);
                let prod = meta_mul(&kappa_split(&k1, 1, p)?, &kappa_split(&k2, 1, p)?, p);
                if prod != kappa_split(&k1.mul(&k2), 1, p)? {
                    return Ok(Err(format!("splitting not multiplicative at p={} sample {}", p, i)));
                }
            }
        }
        Ok(Ok(format!("{} triples and {} K-pairs per prime, p in {:?}", samples, samples, primes)))
    };
    CheckOutcome::finish("cocycle suite", start, Duration::from_secs(10), run())
}

/// Conjugation by a central lift and the Hilbert-symbol form of `chi_z`.
pub fn conjugation_law(primes: &[u32], samples: usize, seed: u64) -> CheckOutcome {
    let start = Instant::now();
    let run = || -> Result<Check> {
        for &p in primes {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(p as u64));
            for i in 0..samples {
                let z = random_rational(&mut rng, p, 3);
                let g = random_meta(&mut rng, p);
                let zt = scalar_meta(&z);
                let conj = meta_mul(&meta_mul(&zt, &g, p), &meta_inv(&zt, p), p);
                let chi = chi_z(&z, p)?;
                let expected = MetaElem { g: g.g.clone(), zeta: g.zeta * chi.eval(g.g.det(), p)? };
                if conj != expected {
                    return Ok(Err(format!("conjugation law fails at p={} sample {}", p, i)));
                }
                let x = random_rational(&mut rng, p, 3);
                if chi.eval(&x, p)? != hilbert(&z, &x, p)? {
                    return Ok(Err(format!("chi_z differs from the Hilbert symbol at p={} sample {}", p, i)));
                }
            }
        }
        Ok(Ok(format!("{} conjugations and {} symbol pairs per prime, p in {:?}", samples, samples, primes)))
    };
    CheckOutcome::finish("conjugation law", start, Duration::from_secs(10), run())
}

fn random_vector(rng: &mut ChaCha8Rng, d: &PhiGammaModule, prec: i64) -> Vector {
    (0..d.rank())
        .map(|_| {
            let val = rng.gen_range(-2..=2);
            random_series(rng, d.field(), val, prec)
        })
        .collect()
}

fn min_prec(v: &[LaurentSeries]) -> i64 {
    v.iter().map(|x| x.precision()).min().unwrap_or(0)
}

/// Agreement to the smaller of `psi`'s guarantee and the reference's own precision.
fn psi_agrees(d: &PhiGammaModule, input: &[LaurentSeries], got: &[LaurentSeries], want: &[LaurentSeries]) -> Result<std::result::Result<i64, String>> {
    let need = d.psi_precision(min_prec(input))?.min(min_prec(want));
    if need < 4 {
        return Ok(Err(format!("only {} digits available", need)));
    }
    for (x, y) in got.iter().zip(want) {
        if !x.agrees_with(y) {
            return Ok(Err("coordinates disagree".into()));
        }
        if x.common_precision(y) < need {
            return Ok(Err(format!("only {} digits, need {}", x.common_precision(y), need)));
        }
    }
    Ok(Ok(need))
}

/// Commutation on the induced modules and the `psi` identities on random vectors.
pub fn phigamma_suite(configs: &[(u32, i64)], hs: &[i64], vectors: usize, seed: u64) -> CheckOutcome {
    let start = Instant::now();
    let run = || -> Result<Check> {
        let mut count = 0;
        let mut min_digits = i64::MAX;
        for &(p, n_prec) in configs {
            let field = field_make(p, 1)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (p as u64) << 8);
            let units = [2u64, 1 + p as u64, 1 + (p as u64).pow(2)];
            for &h in hs {
                let d = make_induced(4, h, &TameChar::trivial(&field), n_prec)?;
                for &c in &units {
                    let gu = GammaUnit::new(c, p)?;
                    for _ in 0..2 {
                        let v = random_vector(&mut rng, &d, n_prec);
                        let (ok, reached) = phi_gamma_commutes(&d, gu, &v)?;
                        if !ok {
                            return Ok(Err(format!("commutation fails p={} h={} c={} ({} digits)", p, h, c, reached)));
                        }
                    }
                }
                let per_module = vectors.div_ceil(hs.len());
                let p64 = p as i64;
                for k in 0..per_module {
                    let v = random_vector(&mut rng, &d, n_prec);
                    let phv = d.phi_vec(&v);
                    let checks: [(&str, Vector, Vector, Vector); 3] = {
                        // psi(phi(v)) = v
                        let first = (d.psi(&phv)?, v.clone());
                        // psi(f phi(v)) = psi(f) v, with f known far enough to survive phi's poles
                        let f = random_series(&mut rng, &field, 0, p64 * n_prec);
                        let fphv: Vector = phv.iter().map(|x| x.mul(&f)).collect();
                        let psi_f = phi_basis_decompose(&f).swap_remove(0);
                        let second = (d.psi(&fphv)?, v.iter().map(|x| x.mul(&psi_f)).collect());
                        // psi(phi(g) w) = g psi(w)
                        let g = random_series(&mut rng, &field, 0, n_prec);
                        let w = random_vector(&mut rng, &d, p64 * n_prec);
                        let gw: Vector = w.iter().map(|x| x.mul(&g.frobenius_phi())).collect();
                        let third = (d.psi(&gw)?, d.psi(&w)?.iter().map(|x| x.mul(&g)).collect());
                        [
                            ("psi(phi(v)) = v", phv.clone(), first.0, first.1),
                            ("psi(f phi(v)) = psi(f) v", fphv, second.0, second.1),
                            ("psi(phi(g) w) = g psi(w)", gw, third.0, third.1),
                        ]
                    };
                    for (label, input, got, want) in checks.iter() {
                        match psi_agrees(&d, input, got, want)? {
                            Ok(digits) => min_digits = min_digits.min(digits),
                            Err(e) => return Ok(Err(format!("{} fails for p={} h={} sample {}: {}", label, p, h, k, e))),
                        }
                    }
                    count += 1;
                }
            }
        }
        Ok(Ok(format!(
            "commutation for h in {:?}, c in {{2, 1+p, 1+p^2}}; {} psi vectors, at least {} digits",
            hs, count, min_digits
        )))
    };
    CheckOutcome::finish("(phi, Gamma)-module suite", start, Duration::from_secs(60), run())
}
/// A random valid cyclic form with `n` nodes and its noisy copy.
pub fn random_cyclic_pair(rng: &mut ChaCha8Rng, p: u32, n: usize, prec: i64) -> Result<(CyclicForm, CyclicForm)> {
    let field = field_make(p, 1)?;
    let pm = p as i64 - 1;
    let d: Vec<FieldElem> = (0..n).map(|_| FieldElem::from_code(&field, rng.gen_range(1..field.size()))).collect();
    let mut t: Vec<i64> = (0..n).map(|_| rng.gen_range(-2 * pm..=p as i64)).collect();
    let sum: i64 = t[..n - 1].iter().sum();
    let last = t[n - 1];
    t[n - 1] = last - (last + sum).rem_euclid(pm);
    let mut b = vec![rng.gen_range(0..pm)];
    for i in 0..n - 1 {
        b.push(b[i] - t[i]);
    }
    let clean = CyclicForm::plain(d.clone(), t.clone(), b.clone())?;
    let noise = (0..n).map(|_| random_one_unit(rng, &field, prec)).collect();
    let noisy = CyclicForm::new(d, t, b, noise)?;
    Ok((clean, noisy))
}

/// Normalization ignores the one-unit noise.
pub fn normalization_roundtrip(count: usize, seed: u64) -> CheckOutcome {
    let start = Instant::now();
    let run = || -> Result<Check> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let prec = 30;
        for k in 0..count {
            let p = [3u32, 5][k % 2];
            let n = [1usize, 2, 4][k % 3];
            let (clean, noisy) = random_cyclic_pair(&mut rng, p, n, prec)?;
            let a = normalize_cyclic(&clean, prec)?;
            let b = normalize_cyclic(&noisy, prec)?;
            if a.form != b.form {
                return Ok(Err(format!("sample {} (p={}, n={}): {:?} vs {:?}", k, p, n, a.form, b.form)));
            }
            for i in 0..n {
                let lhs = &b.change_of_basis[(i + 1) % n];
                let rhs = b.change_of_basis[i].frobenius_phi().mul(&noisy.noise[i]).truncate(prec);
                if !lhs.agrees_with(&rhs) || lhs.common_precision(&rhs) < prec {
                    return Ok(Err(format!("sample {}: change of basis fails its recursion at node {}", k, i)));
                }
            }
        }
        Ok(Ok(format!("{} forms with n in {{1, 2, 4}}", count)))
    };
    CheckOutcome::finish("normalization round-trip", start, Duration::from_secs(30), run())
}

/// The cycle route and the closed form agree for every admissible `r`.
pub fn closed_form_agreement(primes: &[u32]) -> CheckOutcome {
    let start = Instant::now();
    let run = || -> Result<Check> {
        let mut n = 0;
        for &p in primes {
            let field = field_make(p, 1)?;
            for r in admissible_r(p) {
                let a = galois_of_cycle(&ss_data(&field, r)?.cycle())?;
                let b = ss_closed_form(&field, r)?;
                if a != b {
                    return Ok(Err(format!("p={} r={}: {:?} vs {:?}", p, r, a, b)));
                }
                n += 1;
            }
        }
        Ok(Ok(format!("{} (p, r) pairs for p in {:?}", n, primes)))
    };
    CheckOutcome::finish("supersingular closed form", start, Duration::from_secs(1), run())
}

/// The finite-level simulation has the predicted leading terms.
pub fn oracle_crosscheck(cases: &[(u32, u32)], digits: i64) -> CheckOutcome {
    let start = Instant::now();
    let run = || -> Result<Check> {
        for &(p, r) in cases {
            let field = field_make(p, 1)?;
            let data = ss_data(&field, r)?.cycle();
            for i in 0..4 {
                let out = simulate_dual_frobenius(&data, i, digits)?;
                if out.exponent != data.s[i] - (p as i64 - 1) {
                    return Ok(Err(format!("p={} r={} i={}: exponent {}", p, r, i, out.exponent)));
                }
                if !out.unit.coeff(0).mul(&data.c[i]).is_one() || out.unit.precision() < digits {
                    return Ok(Err(format!("p={} r={} i={}: unit {:?}", p, r, i, out.unit)));
                }
                let g = GammaUnit::new(2, p)?;
                let h = simulate_dual_gamma(&data, i, g, digits)?;
                let expect = crate::phigamma::omega_of_gamma(g, &field).pow(-data.a[i])?;
                if h.coeff(0) != expect {
                    return Ok(Err(format!("p={} r={} i={}: gamma leading {}", p, r, i, h.coeff(0))));
                }
            }
        }
        Ok(Ok(format!("cases (p, r) = {:?} at {} digits", cases, digits)))
    };
    CheckOutcome::finish("simulation oracle", start, Duration::from_secs(120), run())
}

/// Every odd `h` up to `2(p^4 - 1)` reduces to an isomorphic `(a, h')`.
pub fn reduction_exhaustive(p: u32) -> CheckOutcome {
    let start = Instant::now();
    let run = || -> Result<Check> {
        let field = field_make(p, 1)?;
        let one = FieldElem::one(&field);
        let k = half_p2_plus_1(p) as i128;
        let top = 2 * order(p, 4) as i64;
        let mut n = 0;
        for h in (1..=top).step_by(2) {
            let (a, hp) = reduce_odd_exponent(h, p)?;
            if hp % 2 == 0 || hp < 3 || hp > 2 * p as u64 - 1 {
                return Ok(Err(format!("h={} gives h'={}", h, hp)));
            }
            let lhs = InducedParams::new(4, k * h as i128, one.clone())?;
            let rhs = InducedParams::with_twist(4, k * hp as i128, a as i128, one.clone())?;
            if !iso_test(&lhs, &rhs)? {
                return Ok(Err(format!("h={} -> (a={}, h'={}) not isomorphic", h, a, hp)));
            }
            n += 1;
        }
        Ok(Ok(format!("{} odd exponents at p={}", n, p)))
    };
    CheckOutcome::finish("odd-exponent reduction", start, Duration::from_secs(10), run())
}

/// The supersingular/Galois correspondence at each `(p, m)`.
pub fn bijection_check(cases: &[(u32, u32)]) -> CheckOutcome {
    let start = Instant::now();
    let run = || -> Result<Check> {
        let mut parts = Vec::new();
        for &(p, m) in cases {
            let field = field_make(p, m)?;
            let rep = verify_bijection(&field)?;
            let expected_twist = p as usize - 1;
            if !(rep.injective && rep.surjective && rep.consistent) {
                return Ok(Err(format!("p={}: {:?}", p, rep)));
            }
            if rep.ss_classes != rep.galois_classes
                || rep.ss_twist_classes != expected_twist
                || rep.galois_twist_classes != expected_twist
            {
                return Ok(Err(format!("p={}: counts {:?}", p, rep)));
            }
            if p == 5 {
                let pairs: BTreeSet<(u32, u64)> = rep.pairs.iter().cloned().collect();
                let expected: BTreeSet<(u32, u64)> = [(1, 3), (0, 5), (4, 7), (3, 9)].into_iter().collect();
                if pairs != expected {
                    return Ok(Err(format!("p=5 pairs {:?}", rep.pairs)));
                }
            }
            parts.push(format!(
                "p={} m={}: {} classes, twist classes {} = {}",
                p, m, rep.ss_classes, rep.ss_twist_classes, rep.galois_twist_classes
            ));
        }
        Ok(Ok(parts.join("; ")))
    };
    CheckOutcome::finish("supersingular bijection", start, Duration::from_secs(300), run())
}

/// Principal-series images over all pairs of tame characters.
pub fn principal_series_check(p: u32, m: u32) -> CheckOutcome {
    let start = Instant::now();
    let run = || -> Result<Check> {
        let field = field_make(p, m)?;
        let chars = all_tame_chars(&field);
        let quads = quadratic_chars(&field);
        let mut by_restriction: BTreeMap<(crate::chars::SChar, crate::chars::SChar), (crate::chars::SChar, Vec<SummandKey>)> =
            BTreeMap::new();
        let mut keys_seen = BTreeSet::new();
        for chi1 in &chars {
            for chi2 in &chars {
                let img = ps_image(chi1, chi2, 8);
                if !meta_irred_test(&img)? {
                    return Ok(Err(format!("image of ({}, {}) reducible", chi1, chi2)));
                }
                let key = img.class_key()?;
                let mut expected: Vec<SummandKey> = quads.iter().map(|e| SummandKey::Chars(vec![chi2.mul(e)])).collect();
                expected.sort();
                expected.dedup();
                if expected.len() != 4 || key.1 != expected {
                    return Ok(Err(format!("summands of ({}, {}) are not the four twists of chi2", chi1, chi2)));
                }
                let restr = (chi1.restrict_s(), chi2.restrict_s());
                match by_restriction.get(&restr) {
                    Some(k) if *k != key => return Ok(Err(format!("({}, {}) breaks class invariance", chi1, chi2))),
                    Some(_) => {}
                    None => {
                        keys_seen.insert(key.clone());
                        by_restriction.insert(restr, key);
                    }
                }
            }
        }
        if keys_seen.len() != by_restriction.len() {
            return Ok(Err("distinct restriction pairs share an image".into()));
        }
        Ok(Ok(format!("{} pairs, {} classes", chars.len() * chars.len(), by_restriction.len())))
    };
    CheckOutcome::finish("principal-series image", start, Duration::from_secs(120), run())
}

/// Criteria in order, at acceptance scale.
pub fn acceptance_suite(seed: u64) -> Vec<CheckOutcome> {
    vec![
        cocycle_suite(&[3, 5], 10_000, seed),
        conjugation_law(&[3, 5], 1_000, seed),
        phigamma_suite(&[(3, 60), (5, 80)], &[5, 39], 200, seed),
        normalization_roundtrip(100, seed),
        closed_form_agreement(&[3, 5, 7]),
        oracle_crosscheck(&[(3, 0), (3, 2), (5, 0), (5, 1), (5, 3)], 4),
        reduction_exhaustive(3),
        bijection_check(&[(3, 4), (5, 4)]),
        principal_series_check(5, 2),
    ]
}
