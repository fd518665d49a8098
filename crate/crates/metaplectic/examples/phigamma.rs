//! Etale (phi, Gamma)-modules: induced modules, twists, duals, psi.

use metaplectic::chars::TameChar;
use metaplectic::coeff::field_make;
use metaplectic::laurent::{random_series, GammaUnit};
use metaplectic::phigamma::{dual, etale_check, make_induced, phi_gamma_commutes, twist};
use rand::SeedableRng;

fn main() -> metaplectic::error::Result<()> {
    let k = field_make(5, 1)?;
    let prec = 80;
    let d = make_induced(4, 39, &TameChar::trivial(&k), prec)?;
    let cert = etale_check(&d);
    println!("Ind_4(omega_4^39): rank {}, etale {}, det valuation {:?}", d.rank(), cert.etale, cert.det_valuation);

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let v: Vec<_> = (0..d.rank()).map(|_| random_series(&mut rng, &k, 0, prec)).collect();
    for c in [2u64, 6, 26] {
        let (ok, reached) = phi_gamma_commutes(&d, GammaUnit::new(c, 5)?, &v)?;
        println!("phi and gamma_{} commute: {} (checked to X^{})", c, ok, reached);
    }

    let psi_v = d.psi(&d.phi_vec(&v))?;
    let agree = psi_v.iter().zip(&v).all(|(a, b)| a.agrees_with(b));
    println!("psi(phi(v)) = v: {} to precision {}", agree, d.psi_precision(d.precision() * 5)?);

    let t = twist(&d, &TameChar::omega_pow(&k, 2));
    println!("twist by omega^2 is etale: {}", etale_check(&t).etale);
    let dd = dual(&d)?;
    println!("dual det valuation: {:?}", etale_check(&dd).det_valuation);
    Ok(())
}
