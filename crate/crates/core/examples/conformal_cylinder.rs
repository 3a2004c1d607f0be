//! The conformal metric `g = g₀/|1 − u²|` and the quasi-Einstein residuals.

use staticlab::conformal::{bochner_residual, conformal_tensors, quasi_einstein_residual};
use staticlab::models::{de_sitter, schwarzschild_de_sitter, SdsParams};

fn main() -> staticlab::Result<()> {
    let ds = de_sitter(3)?;
    println!("de Sitter: a round cylinder, |∇φ|² = 1, ∇²φ = 0, R_g = (n−1)(n−2) = 2");
    for r in [0.2, 0.5, 0.8] {
        let c = conformal_tensors(&ds, r)?;
        println!(
            "  r = {r}: φ = {:.6}  |∇φ|² = {:.12}  |∇²φ|² = {:.1e}  R_g = {:.10}",
            c.phi.v, c.grad_phi_norm2.v, c.hess_phi_norm2, c.scalar_g
        );
    }
    let sds = schwarzschild_de_sitter(SdsParams::new(3, 0.1)?)?;
    println!("SdS m = 0.1: not a cylinder, but the conformal equations hold");
    for r in [0.3, 0.6, 0.8] {
        let c = conformal_tensors(&sds, r)?;
        println!(
            "  r = {r}: |∇φ|² = {:.6}  quasi-Einstein {:.1e}  Bochner {:.1e}",
            c.grad_phi_norm2.v,
            quasi_einstein_residual(&sds, r)?,
            bochner_residual(&sds, r)?
        );
    }
    Ok(())
}
