//! The geometric inequalities: equality on the models, refusal outside the
//! hypotheses.

use staticlab::inequalities::{
    area_bound, expansion_constraint, mon_glob_bound, n3_uniqueness_inequality, overdetermined_condition,
    scalar_average_bound, willmore_bound,
};
use staticlab::models::{anti_de_sitter, de_sitter, schwarzschild_de_sitter, SdsParams};
use staticlab::report::IdentityReport;
use staticlab::geometry::StaticTriple;

fn line(r: &IdentityReport) {
    println!(
        "  {:<26} {:?}  lhs {:>12.8}  rhs {:>12.8}  equality {}  {}",
        r.name,
        r.status,
        r.lhs,
        r.rhs,
        r.equality,
        r.note.as_deref().unwrap_or("")
    );
}

fn suite(label: &str, t: &StaticTriple, level: f64) -> staticlab::Result<()> {
    println!("{label}");
    line(&area_bound(t)?);
    line(&willmore_bound(t)?);
    line(&scalar_average_bound(t)?);
    line(&mon_glob_bound(t, 1.0)?);
    line(&overdetermined_condition(t, level)?);
    if t.n() == 3 && t.lambda_sign().sign() > 0.0 {
        line(&n3_uniqueness_inequality(t)?);
        line(&expansion_constraint(t)?);
    }
    Ok(())
}

fn main() -> staticlab::Result<()> {
    suite("de Sitter", &de_sitter(3)?, 0.5)?;
    suite("anti-de Sitter", &anti_de_sitter(3)?, 2.0)?;
    suite("SdS m = 0.1", &schwarzschild_de_sitter(SdsParams::new(3, 0.1)?)?, 0.5)?;
    Ok(())
}
