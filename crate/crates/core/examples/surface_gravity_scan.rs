//! Horizons and surface gravities of SdS over the mass range.

use staticlab::models::{sds_horizons, SdsParams};

fn main() -> staticlab::Result<()> {
    println!("{:>8} {:>10} {:>10} {:>10} {:>10}", "m", "r1", "r2", "kappa1", "kappa2");
    let masses = (1..=19).map(|i| 0.01 * i as f64).chain([1e-3, 1e-4, 1e-5]);
    for m in masses {
        let h = sds_horizons(&SdsParams::new(3, m)?)?;
        println!("{m:>8.1e} {:>10.6} {:>10.6} {:>10.4} {:>10.6}", h.r1, h.r2, h.kappa1, h.kappa2);
    }
    println!("kappa1 exceeds 1 on every row; it grows without bound as m → 0 while kappa2 → 1");
    Ok(())
}
