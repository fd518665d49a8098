//! The metaplectic cover: Hilbert symbols, the cocycle, the splitting over
//! GL2(Z_p) and conjugation by central lifts.

use metaplectic::metagroup::{chi_z, cocycle, hilbert, kappa_split, meta_mul, rat, MetaElem, PMatrix};

fn main() -> metaplectic::error::Result<()> {
    let p = 3;
    for (a, b) in [(3, 2), (3, 3), (-1, 3), (2, 2)] {
        println!("({}, {})_{} = {}", a, b, p, hilbert(&rat(a), &rat(b), p)?);
    }
    let w = PMatrix::from_ints(0, 1, 1, 0)?;
    let f = PMatrix::from_ints(p as i64, 0, 0, 1)?;
    println!("sigma(w, diag(p,1)) = {}", cocycle(&w, &f, p));

    let g = PMatrix::from_ints(1, 1, 0, 1)?;
    let h = PMatrix::from_ints(2, 0, 3, 1)?;
    let lhs = meta_mul(&kappa_split(&g, 1, p)?, &kappa_split(&h, 1, p)?, p);
    let rhs = kappa_split(&g.mul(&h), 1, p)?;
    println!("splitting is multiplicative on this pair: {}", lhs == rhs);

    let z = rat(p as i64);
    println!("conjugation character of the lift of {}: {:?}", z, chi_z(&z, p)?);
    println!("identity lift: {:?}", MetaElem::identity());
    Ok(())
}
