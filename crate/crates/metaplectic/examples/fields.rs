//! Finite fields F_{p^m} and the ring of truncated Laurent series over them.

use metaplectic::coeff::{field_make, nth_roots, FieldElem};
use metaplectic::laurent::{one_unit_root, psi_ring, GammaUnit, LaurentSeries};

fn main() -> metaplectic::error::Result<()> {
    let f = field_make(5, 2)?;
    let g = FieldElem::from_code(&f, f.generator());
    println!("F_25 generator {} has order 24: {}", g, g.pow(24)?.is_one() && !g.pow(12)?.is_one());
    let two = FieldElem::from_int(&f, 2);
    let roots = nth_roots(&two, 2)?;
    println!("2 is not a square in F_5, but in F_25 its roots are: {:?}", roots);

    let k = field_make(3, 1)?;
    let prec = 20;
    // 1 + X is a one-unit; take its square root by Newton lifting
    let u = LaurentSeries::from_terms(&k, &[(0, FieldElem::one(&k)), (1, FieldElem::one(&k))], prec);
    let r = one_unit_root(&u, 2)?;
    println!("sqrt(1+X) = {}", r);
    println!("squares back: {}", r.mul(&r).agrees_with(&u));

    let x_inv = LaurentSeries::x_pow(&k, -1).truncate(prec);
    let f2 = x_inv.add(&u);
    println!("phi(X^-1 + 1 + X) = {}", f2.frobenius_phi());
    println!("psi(phi(f)) = f: {}", psi_ring(&f2.frobenius_phi()).agrees_with(&f2));
    println!("gamma_2(X) = {}", LaurentSeries::x_pow(&k, 1).truncate(8).gamma_act(GammaUnit::new(2, 3)?, 8)?);
    Ok(())
}
