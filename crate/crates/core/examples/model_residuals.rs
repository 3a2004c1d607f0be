//! Builds the model solutions and checks the static equations pointwise.

use staticlab::assumptions::AssumptionFlags;
use staticlab::geometry::static_residual;
use staticlab::models::{anti_de_sitter, de_sitter, nariai, schwarzschild_de_sitter, SdsParams};

fn main() -> staticlab::Result<()> {
    let models = [
        ("de Sitter", de_sitter(3)?),
        ("anti-de Sitter", anti_de_sitter(3)?),
        ("SdS m=0.1", schwarzschild_de_sitter(SdsParams::new(3, 0.1)?)?),
        ("Nariai", nariai(3)?),
    ];
    for (name, triple) in &models {
        let mut worst: f64 = 0.0;
        for x in triple.sample_points(100) {
            worst = worst.max(static_residual(triple, x)?.max());
        }
        let flags = AssumptionFlags::of(triple);
        println!("{name:>15}: max residual {worst:.2e}  [{}]", flags.compact());
        for b in triple.boundaries() {
            println!("{:>17}{:?} at {:.6}, radius {:.6}", "", b.kind, b.location, b.sphere_radius);
        }
    }
    Ok(())
}
