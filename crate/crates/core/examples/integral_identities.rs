//! Boundary-versus-bulk identities on truncated regions, with the quadrature
//! convergence under grid doubling.

use staticlab::identities::IdentityCheck;
use staticlab::levelset::{Branches, Foliation};
use staticlab::models::{anti_de_sitter, de_sitter, schwarzschild_de_sitter, SdsParams};
use staticlab::numerics::quad::QuadratureConfig;

fn show(label: &str, check: &IdentityCheck) -> staticlab::Result<()> {
    let e = check.evaluate(&QuadratureConfig::default())?;
    let c = check.convergence(8)?;
    println!(
        "{label:<34} lhs {:>14.8}  rhs {:>14.8}  residual {:.1e}  evals {:>5}  Simpson ratio {:.1}",
        e.lhs,
        e.rhs,
        e.residual(),
        e.evals,
        c.ratio
    );
    Ok(())
}

fn main() -> staticlab::Result<()> {
    let sds = schwarzschild_de_sitter(SdsParams::new(3, 0.1)?)?;
    let outer = Foliation::restricted(&sds, Branches::Only(1));
    for p in [1.0, 3.0, 5.0] {
        show(&format!("SdS first identity p={p}"), &IdentityCheck::first(&outer, p, 0.3, 1.5)?)?;
    }
    for p in [3.0, 5.0] {
        show(&format!("SdS second identity p={p}"), &IdentityCheck::second(&outer, p, 0.3, 1.5)?)?;
    }
    show("SdS traceless Hessian, u > 0.3", &IdentityCheck::bgh(&Foliation::new(&sds), 0.3, None)?)?;

    let ds = de_sitter(3)?;
    show("de Sitter second identity p=3", &IdentityCheck::second(&Foliation::new(&ds), 3.0, 0.5, 3.0)?)?;
    let ads = anti_de_sitter(3)?;
    show("AdS traceless Hessian, u < 2", &IdentityCheck::bgh(&Foliation::new(&ads), 2.0, None)?)?;
    Ok(())
}
