//! Supersingular genuine representations against twist-invariant induced
//! parameters, enumerated on both sides and matched.

use metaplectic::chars::TameChar;
use metaplectic::coeff::field_make;
use metaplectic::meta::{invert_ss_image, ps_image, ss_image, verify_bijection, MetaBase, SSRep};

fn main() -> metaplectic::error::Result<()> {
    for p in [3u32, 5] {
        let k = field_make(p, 4)?;
        let report = verify_bijection(&k)?;
        println!(
            "p = {}: {} classes each side, injective {}, surjective {}, twist classes {} / {}, pairs {:?}",
            p,
            report.ss_classes,
            report.injective,
            report.surjective,
            report.ss_twist_classes,
            report.galois_twist_classes,
            report.pairs
        );
    }

    let k = field_make(5, 1)?;
    let rep = SSRep::new(1, TameChar::trivial(&k))?;
    let img = ss_image(&rep)?;
    if let MetaBase::Params(x) = &img.base {
        println!("image of pi(1): {:?}, recovered r = {}", x, invert_ss_image(x)?.r);
    }
    let ps = ps_image(&TameChar::omega_pow(&k, 1), &TameChar::trivial(&k), 30);
    println!("principal series image has {} summands", ps.summands.len());
    Ok(())
}
