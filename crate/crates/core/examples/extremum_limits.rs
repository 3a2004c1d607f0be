//! Behaviour at the maximum of `u`: the limit of `U_p` and the quadratic
//! expansion of `u`.

use staticlab::inequalities::extremum_expansion;
use staticlab::levelset::liminf_check;
use staticlab::models::{anti_de_sitter, de_sitter, nariai};

fn main() -> staticlab::Result<()> {
    for (name, t) in [("de Sitter", de_sitter(3)?), ("anti-de Sitter", anti_de_sitter(3)?), ("Nariai", nariai(3)?)] {
        for p in [0.0, 1.0, 2.0] {
            let r = liminf_check(&t, p)?;
            println!("{name:>15} p = {p}: limit {:.9}  |S²| {:.9}  {:?} {}", r.lhs, r.rhs, r.status, r.note.unwrap_or_default());
        }
    }
    let e = extremum_expansion(&de_sitter(3)?)?;
    println!(
        "de Sitter: u ≈ {:.8} + ({:.8}) d² + ({:.6}) d⁴, λ²_radial {:.6}, λ²_tan {:.6}, sum {:.6} (n = 3)",
        e.a, e.b, e.c, e.lambda2_radial, e.lambda2_tangential, e.sum
    );
    Ok(())
}
