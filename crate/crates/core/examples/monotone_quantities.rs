//! `U_p(t)` along the level-set flow: constant on the models, monotone on SdS.

use staticlab::levelset::{uniform_grid, Branches, Foliation};
use staticlab::models::{anti_de_sitter, de_sitter, schwarzschild_de_sitter, sds_horizons, SdsParams};

fn main() -> staticlab::Result<()> {
    let ds = de_sitter(3)?;
    let curve = Foliation::new(&ds).up_curve(3.0, &uniform_grid(0.0, 0.9, 6))?;
    println!("de Sitter, p = 3 (4π = {:.10})", 4.0 * std::f64::consts::PI);
    for (t, v) in curve.grid.iter().zip(&curve.values) {
        println!("  t = {t:.2}  U = {v:.10}");
    }

    let ads = anti_de_sitter(3)?;
    let fol = Foliation::new(&ads);
    println!("anti-de Sitter, p = 2");
    for t in [1.5, 3.0, 10.0] {
        println!("  t = {t:>4}  U = {:.10}", fol.up_value(2.0, t)?);
    }

    let params = SdsParams::new(3, 0.1)?;
    let sds = schwarzschild_de_sitter(params)?;
    let hz = sds_horizons(&params)?;
    println!("SdS m = 0.1, outer branch r in [{:.5}, {:.5}]", hz.r0, hz.r2);
    let outer = Foliation::restricted(&sds, Branches::Only(1));
    let curve = outer.up_curve(3.0, &uniform_grid(0.1, 0.9, 8))?;
    for i in 0..curve.grid.len() {
        println!(
            "  t = {:.2}  U = {:>12.6}  U' = {:>12.6} (formula)  {:>12.6} (differences)",
            curve.grid[i], curve.values[i], curve.d_analytic[i], curve.d_numeric[i]
        );
    }
    let scan = outer.monotonicity_scan(3.0, &uniform_grid(0.1, 0.9, 40))?;
    println!("  trend {:?}, expected {:?}, status {:?}", scan.observed, scan.expected, scan.status);
    Ok(())
}
