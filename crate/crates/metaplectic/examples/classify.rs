//! From supersingular cycle data to a normal form and induced Galois parameters,
//! checked against the finite-level simulation.

use metaplectic::classify::{
    dual_basis_form, galois_of_cycle, normalize_cyclic, simulate_dual_frobenius, ss_closed_form, ss_data,
};
use metaplectic::coeff::field_make;

fn main() -> metaplectic::error::Result<()> {
    let k = field_make(5, 1)?;
    for r in [0u32, 1, 3] {
        let data = ss_data(&k, r)?;
        let cycle = data.cycle();
        let form = dual_basis_form(&cycle)?;
        let normal = normalize_cyclic(&form, 60)?;
        let params = galois_of_cycle(&cycle)?;
        println!("r = {} (r' = {}): t = {:?}, b = {:?}", r, data.r_prime, form.t, form.b);
        println!("  normal form params {:?}", normal.form.params()?);
        println!("  galois params      {:?} (closed form {:?})", params, ss_closed_form(&k, r)?);
        let sim = simulate_dual_frobenius(&cycle, 0, 4)?;
        println!(
            "  simulated Frobenius on f_1: X^{} * ({}), leading * c_1 = {}",
            sim.exponent,
            sim.unit,
            sim.unit.coeff(0).mul(&cycle.c[0])
        );
    }
    Ok(())
}
