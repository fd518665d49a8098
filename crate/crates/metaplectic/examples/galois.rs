//! Induced Galois parameters: Frobenius orbits, twists, and the reduction of
//! Ind(omega_4^{(p^2+1)/2 h}) to a small odd exponent.

use metaplectic::coeff::{field_make, FieldElem};
use metaplectic::galois::{canonicalize, half_p2_plus_1, iso_test, primitive, qualifying_exponents, reduce_odd_exponent, twist_invariant_class, InducedParams};

fn main() -> metaplectic::error::Result<()> {
    let p = 5;
    let k = field_make(p, 1)?;
    let one = FieldElem::one(&k);
    let x = InducedParams::new(4, 39, one.clone())?;
    println!("{:?} canonical {:?}, primitive {}", x, canonicalize(&x), primitive(39, 4, p)?);
    println!("same as H = 195: {}", iso_test(&x, &InducedParams::new(4, 195, one.clone())?)?);

    let q = half_p2_plus_1(p);
    for h in [1i64, 3, 5, 7, 9, 11, 25] {
        let (a, hp) = reduce_odd_exponent(h, p)?;
        let orig = InducedParams::new(4, (q as i64 * h) as i128, one.clone())?;
        println!("h = {:>2} -> omega^{} x Ind(h' = {}), class {:?}", h, a, hp, twist_invariant_class(&orig));
    }
    println!("{} exponents qualify at p = {}", qualifying_exponents(&k).len(), p);
    Ok(())
}
