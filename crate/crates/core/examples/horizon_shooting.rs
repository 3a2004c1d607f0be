//! Shooting the reduced static system from horizon data and recovering the
//! de Sitter / SdS / Nariai families.

use staticlab::geometry::LambdaSign;
use staticlab::models::{sds_horizons, SdsParams};
use staticlab::odegen::{birkhoff_check, reduce_system, shoot_from_horizon, HorizonData, ShootConfig};

fn main() -> staticlab::Result<()> {
    println!("{}\n", reduce_system(3, LambdaSign::Positive));
    let config = ShootConfig::default();
    let params = SdsParams::new(3, 0.1)?;
    let hz = sds_horizons(&params)?;
    let kappa = hz.kappa1 * hz.normalization;
    let shot = shoot_from_horizon(HorizonData::new(3, LambdaSign::Positive, hz.r1, kappa)?, &config)?;
    println!(
        "SdS m=0.1 from r1 = {:.6}: stop {:?} at ρ = {:.6}, far radius {:.10} (r2 = {:.10}), monitor {:.1e}",
        hz.r1,
        shot.stop,
        shot.length,
        shot.triple.boundaries()[1].sphere_radius,
        hz.r2,
        shot.monitor_max
    );
    println!("\n{:>6} {:>6} {:>40} {:>10} {:>10}", "h0", "kappa", "family", "deviation", "monitor");
    for h0 in [0.2, 0.4, 0.57735026919, 0.7, 0.9, 1.0] {
        for kappa in [0.5, 2.0] {
            let m = birkhoff_check(3, h0, kappa, &config)?;
            let family = format!("{:?}", m.family);
            println!("{h0:>6} {kappa:>6} {family:>40} {:>10.1e} {:>10.1e}", m.deviation, m.monitor_max);
        }
    }
    Ok(())
}
