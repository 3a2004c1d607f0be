//! Integral identities checked by radial quadrature on truncated regions.
//!
//! Every region is a union of coordinate intervals bounded by level spheres,
//! so bulk integrals are one-dimensional and boundary terms are closed-form
//! sphere values. Integration runs in the chart coordinate with the Jacobian
//! `dρ/dx`, which stays regular across the extremal sphere.

use serde::Serialize;

use crate::assumptions::AssumptionFlags;
use crate::conformal::{conformal_tensors, gamma, level_mean_curvature, u_of_phi};
use crate::error::{Error, Result};
use crate::geometry::{curvature_from_jets, unit_sphere_area, BoundaryKind, LocalJets, LambdaSign, StaticTriple};
use crate::levelset::{Branches, Foliation};
use crate::numerics::quad::{integrate, QuadratureConfig};
use crate::report::{IdentityReport, Relation};

pub const DEFAULT_TOLERANCE: f64 = 1e-6;
/// Total quadrature evaluations allowed for one bulk integral.
pub const QUADRATURE_BUDGET: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Integrand {
    /// `div_g(|∇φ|^{p−1}∇φ / sinh^n φ) dμ_g`
    SinhWeighted { p: f64 },
    /// `γ(φ)|∇φ|^{p−3}(|∇²φ|² + (p−3)|∇|∇φ||² + n u²|∇φ|²(1−|∇φ|²)) dμ_g`
    GammaWeighted { p: f64 },
    /// `(1/u)(|D²u|² − (Δu)²/n) dμ`
    TracelessHessian,
}

/// Result of one evaluation of both sides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evaluation {
    pub lhs: f64,
    pub rhs: f64,
    pub evals: usize,
}

impl Evaluation {
    pub fn residual(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

/// Residuals of a composite Simpson rule at `panels` and `2·panels` per interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Convergence {
    pub panels: usize,
    pub coarse: f64,
    pub fine: f64,
    /// `coarse / fine`; about 16 for a smooth integrand.
    pub ratio: f64,
}

/// A boundary-versus-bulk identity on a fixed region.
#[derive(Debug, Clone)]
pub struct IdentityCheck<'a> {
    triple: &'a StaticTriple,
    name: &'static str,
    reference: &'static str,
    integrand: Integrand,
    intervals: Vec<(f64, f64)>,
    boundary: f64,
    tolerance: f64,
}

fn region_bounds(sign: LambdaSign, lower_phi: f64, upper_phi: f64) -> (f64, f64) {
    let (a, b) = (u_of_phi(sign, lower_phi), u_of_phi(sign, upper_phi));
    (a.min(b), a.max(b))
}

/// Coordinate intervals of `{lo < u < hi}` inside the selected branches,
/// with intervals that touch merged into one.
fn region(fol: &Foliation, lo: Option<f64>, hi: Option<f64>) -> Result<Vec<(f64, f64)>> {
    let triple = fol.triple();
    let selected: Vec<usize> = match fol.branches() {
        Branches::All => (0..triple.branches().len()).collect(),
        Branches::Only(i) => vec![i],
    };
    let mut cuts: Vec<(usize, f64)> = Vec::new();
    for t in [lo, hi].into_iter().flatten() {
        match fol.spheres(t) {
            Ok(sph) => cuts.extend(sph.iter().map(|s| (s.branch, s.x))),
            Err(Error::LevelOutOfRange { .. }) | Err(Error::MissingBoundary) => {}
            Err(e) => return Err(e),
        }
    }
    let inside = |x: f64| {
        let u = triple.potential_value(x);
        lo.is_none_or(|l| u > l) && hi.is_none_or(|h| u < h)
    };
    let mut out: Vec<(f64, f64)> = Vec::new();
    for i in selected {
        let br = triple.branches()[i];
        let mut pts = vec![br.lo, br.hi];
        pts.extend(cuts.iter().filter(|(b, _)| *b == i).map(|(_, x)| *x));
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if !b.is_finite() {
                if inside(a + 1.0) {
                    return Err(Error::InvalidParameter("region is unbounded".into()));
                }
                continue;
            }
            if inside(0.5 * (a + b)) {
                out.push((a, b));
            }
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (a, b) in out {
        match merged.last_mut() {
            Some(last) if last.1 == a => last.1 = b,
            _ => merged.push((a, b)),
        }
    }
    if merged.is_empty() {
        return Err(Error::InvalidParameter("empty integration region".into()));
    }
    Ok(merged)
}

/// `ω h^{n−1} dρ/dx`; zero where the warp degenerates (a regular centre).
fn volume_density(triple: &StaticTriple, x: f64) -> Result<Option<(LocalJets, f64)>> {
    match triple.local(x) {
        Ok(j) => {
            let n = triple.n();
            let w = unit_sphere_area(n - 1) * j.warp.v.powi(n as i32 - 1) * j.drho_dx;
            Ok(Some((j, w)))
        }
        Err(Error::DegenerateWarp { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn density(triple: &StaticTriple, integrand: Integrand, x: f64) -> Result<f64> {
    let Some((j, vol)) = volume_density(triple, x)? else {
        return Ok(0.0);
    };
    let n = triple.n();
    let nf = n as f64;
    match integrand {
        Integrand::TracelessHessian => {
            let c = curvature_from_jets(n, &j);
            let u = j.potential.v;
            let hess2 = c.hess_u_rr.powi(2) + (nf - 1.0) * c.hess_u_tan.powi(2);
            Ok((hess2 - c.lap_u * c.lap_u / nf) / u * vol)
        }
        Integrand::SinhWeighted { p } => {
            let t = conformal_tensors(triple, x)?;
            let w = t.grad_phi_norm2.v;
            let phi = t.phi.v;
            let div = w.powf(0.5 * (p - 1.0))
                * ((p - 1.0) * t.q * t.hess_phi_rr + t.lap_phi - nf * w / phi.tanh())
                / phi.sinh().powi(n as i32);
            Ok(div * t.q.powf(-0.5 * nf) * vol)
        }
        Integrand::GammaWeighted { p } => {
            let t = conformal_tensors(triple, x)?;
            let w = t.grad_phi_norm2.v;
            let dw = t.grad_phi_norm2.d1;
            let grad_abs2 = t.q * dw * dw / (4.0 * w);
            let bracket = t.hess_phi_norm2 + (p - 3.0) * grad_abs2 + nf * t.u * t.u * w * (1.0 - w);
            Ok(gamma(n, t.u, t.q) * w.powf(0.5 * (p - 3.0)) * bracket * t.q.powf(-0.5 * nf) * vol)
        }
    }
}

/// `Σ area_g |∇φ|^p / sinh^n φ` over the selected spheres of `{φ = s}`.
fn sinh_flux(fol: &Foliation, p: f64, s: f64) -> Result<f64> {
    let triple = fol.triple();
    let n = triple.n();
    let mut sum = 0.0;
    for sph in fol.spheres(u_of_phi(triple.lambda_sign(), s))? {
        let t = conformal_tensors(triple, sph.x)?;
        let area_g = sph.area * t.q.powf(-0.5 * (n as f64 - 1.0));
        sum += area_g * t.grad_phi_norm2.v.powf(0.5 * p);
    }
    Ok(sum / s.sinh().powi(n as i32))
}

/// `γ(s) Σ ∫ (|∇φ|^{p−1}H_g − |∇φ|^{p−2}Δ_gφ) dσ_g` over `{φ = s}`.
fn gamma_flux(fol: &Foliation, p: f64, s: f64) -> Result<f64> {
    let triple = fol.triple();
    let n = triple.n();
    let mut sum = 0.0;
    let mut weight = f64::NAN;
    for sph in fol.spheres(u_of_phi(triple.lambda_sign(), s))? {
        let t = conformal_tensors(triple, sph.x)?;
        let area_g = sph.area * t.q.powf(-0.5 * (n as f64 - 1.0));
        let w = t.grad_phi_norm2.v;
        sum += area_g * (w.powf(0.5 * (p - 1.0)) * t.mean_curvature_g - w.powf(0.5 * (p - 2.0)) * t.lap_phi);
        weight = gamma(n, t.u, t.q);
    }
    Ok(weight * sum)
}

/// `Σ ∫ (1/u)(|Du|²H − ((n−1)/n)|Du|Δu) dσ` over the selected spheres of `{u = t}`.
fn traceless_flux(fol: &Foliation, t: f64) -> Result<f64> {
    let triple = fol.triple();
    let n = triple.n();
    let nf = n as f64;
    let mut sum = 0.0;
    for sph in fol.spheres(t)? {
        let j = triple.local(sph.x)?;
        let c = curvature_from_jets(n, &j);
        let g = j.grad_norm();
        let h = level_mean_curvature(n, &j);
        sum += sph.area * (g * g * h - (nf - 1.0) / nf * g * c.lap_u) / j.potential.v;
    }
    Ok(sum)
}

fn check_phi_levels(s: f64, upper: f64) -> Result<()> {
    if !(s > 0.0 && upper > s && upper.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < s < S < ∞, got s = {s}, S = {upper}"
        )));
    }
    Ok(())
}

impl<'a> IdentityCheck<'a> {
    /// `∫_{s<φ<S} div_g(|∇φ|^{p−1}∇φ/sinh^nφ) dμ_g` against its two boundary fluxes.
    pub fn first(fol: &Foliation<'a>, p: f64, s: f64, upper: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::ExponentOutOfRange { p, range: "[1, ∞)" });
        }
        check_phi_levels(s, upper)?;
        let triple: &'a StaticTriple = fol.triple();
        let (lo, hi) = region_bounds(triple.lambda_sign(), s, upper);
        Ok(Self {
            triple,
            name: "first_identity",
            reference: "divergence of |∇φ|^{p−1}∇φ/sinh^n(φ) integrated over {s<φ<S}",
            integrand: Integrand::SinhWeighted { p },
            intervals: region(fol, Some(lo), Some(hi))?,
            boundary: sinh_flux(fol, p, upper)? - sinh_flux(fol, p, s)?,
            tolerance: DEFAULT_TOLERANCE,
        })
    }

    /// `∫_{s<φ<S} γ|∇φ|^{p−3}(…) dμ_g` against the mean-curvature fluxes.
    pub fn second(fol: &Foliation<'a>, p: f64, s: f64, upper: f64) -> Result<Self> {
        if !(p >= 3.0) {
            return Err(Error::ExponentOutOfRange { p, range: "[3, ∞)" });
        }
        check_phi_levels(s, upper)?;
        let triple: &'a StaticTriple = fol.triple();
        let (lo, hi) = region_bounds(triple.lambda_sign(), s, upper);
        Ok(Self {
            triple,
            name: "second_identity",
            reference: "integrated Bochner identity for γ(φ)∇|∇φ|^{p−1} over {s<φ<S}",
            integrand: Integrand::GammaWeighted { p },
            intervals: region(fol, Some(lo), Some(hi))?,
            boundary: gamma_flux(fol, p, s)? - gamma_flux(fol, p, upper)?,
            tolerance: DEFAULT_TOLERANCE,
        })
    }

    /// Flux of `Y/u`, `Y = D|Du|² − (2/n)Δu Du`, through `{u = t}`.
    ///
    /// Without `t_upper` the region is `{u > t}` for Λ>0 and `{u < t}` for
    /// Λ<0 (where the bulk enters with a minus sign); with it, `{t < u < t_upper}`.
    pub fn bgh(fol: &Foliation<'a>, t: f64, t_upper: Option<f64>) -> Result<Self> {
        let triple: &'a StaticTriple = fol.triple();
        let sign = triple.lambda_sign();
        let valid = |v: f64| match sign {
            LambdaSign::Positive => v > 0.0 && v < 1.0,
            LambdaSign::Negative => v > 1.0 && v.is_finite(),
        };
        if !valid(t) || t_upper.is_some_and(|v| !valid(v) || v <= t) {
            return Err(Error::LevelOutOfRange { t });
        }
        let reference = "divergence of Y/u with Y = D|Du|² − (2/n)Δu Du over a sublevel or superlevel region";
        let lower_flux = traceless_flux(fol, t)?;
        let (intervals, boundary) = match (t_upper, sign) {
            (Some(up), _) => (
                region(fol, Some(t), Some(up))?,
                lower_flux - traceless_flux(fol, up)?,
            ),
            (None, LambdaSign::Positive) => (region(fol, Some(t), None)?, lower_flux),
            (None, LambdaSign::Negative) => (region(fol, None, Some(t))?, -lower_flux),
        };
        Ok(Self {
            triple,
            name: "bgh_identity",
            reference,
            integrand: Integrand::TracelessHessian,
            intervals,
            boundary,
            tolerance: DEFAULT_TOLERANCE,
        })
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    /// The boundary side, evaluated from closed-form sphere data.
    pub fn boundary_terms(&self) -> f64 {
        self.boundary
    }

    /// The bulk side under the given quadrature rule; `max_evals` is shared
    /// across the intervals.
    pub fn evaluate(&self, cfg: &QuadratureConfig) -> Result<Evaluation> {
        let mut total = 0.0;
        let mut evals = 0;
        for &(a, b) in &self.intervals {
            let mut failure = None;
            let local = QuadratureConfig {
                max_evals: cfg.max_evals.saturating_sub(evals),
                ..*cfg
            };
            let r = integrate(
                |x| match density(self.triple, self.integrand, x) {
                    Ok(v) => v,
                    Err(e) => {
                        failure.get_or_insert(e);
                        0.0
                    }
                },
                a,
                b,
                &local,
            );
            if let Some(e) = failure {
                return Err(e);
            }
            let r = r?;
            total += r.value;
            evals += r.evals;
        }
        Ok(Evaluation {
            lhs: self.boundary,
            rhs: total,
            evals,
        })
    }

    /// Adaptive evaluation within [`QUADRATURE_BUDGET`].
    pub fn report(&self) -> Result<IdentityReport> {
        let cfg = QuadratureConfig {
            max_evals: QUADRATURE_BUDGET,
            ..QuadratureConfig::default()
        };
        let e = self.evaluate(&cfg)?;
        Ok(
            IdentityReport::equality(self.name, self.reference, e.lhs, e.rhs, self.tolerance)
                .with_note(format!("quadrature evaluations: {}", e.evals)),
        )
    }

    /// Simpson residuals at `panels` and `2·panels` per interval.
    pub fn convergence(&self, panels: usize) -> Result<Convergence> {
        let coarse = self.evaluate(&QuadratureConfig::simpson(panels))?.residual();
        let fine = self.evaluate(&QuadratureConfig::simpson(2 * panels))?.residual();
        Ok(Convergence {
            panels,
            coarse,
            fine,
            ratio: coarse / fine,
        })
    }
}

pub fn first_identity(triple: &StaticTriple, p: f64, s: f64, upper: f64) -> Result<IdentityReport> {
    IdentityCheck::first(&Foliation::new(triple), p, s, upper)?.report()
}

pub fn second_identity(triple: &StaticTriple, p: f64, s: f64, upper: f64) -> Result<IdentityReport> {
    IdentityCheck::second(&Foliation::new(triple), p, s, upper)?.report()
}

pub fn bgh_identity(triple: &StaticTriple, t: f64, t_upper: Option<f64>) -> Result<IdentityReport> {
    IdentityCheck::bgh(&Foliation::new(triple), t, t_upper)?.report()
}

/// `|lhs(S) + flux(s)|` of the first identity for each `S`: the `S`-boundary
/// term alone, which should decay like `e^{−nS}`.
pub fn first_identity_tail(fol: &Foliation, p: f64, s: f64, uppers: &[f64]) -> Result<Vec<(f64, f64)>> {
    let inner = sinh_flux(fol, p, s)?;
    uppers
        .iter()
        .map(|&up| {
            let c = IdentityCheck::first(fol, p, s, up)?;
            Ok((up, (c.boundary_terms() + inner).abs()))
        })
        .collect()
}

/// Λ>0: `∫_{∂M} |Du|(R^∂ − (n−1)(n−2)) dσ ≥ 0`, equality only for de Sitter.
/// Λ<0: `∫_{∂M} ((n−1)(n−2) − R_g^∂) dσ_g ≥ 0` on the conformal boundary,
/// provided `1/√(u²−1)` is a defining function with vanishing defect.
pub fn bgh_boundary_inequality(triple: &StaticTriple) -> Result<IdentityReport> {
    let n = triple.n();
    let k = ((n - 1) * (n - 2)) as f64;
    let tol = 1e-9;
    match triple.lambda_sign() {
        LambdaSign::Positive => {
            let mut total = 0.0;
            let mut any = false;
            for (b, kappa) in triple.horizons() {
                any = true;
                total += kappa * (b.scalar_curvature(n) - k) * b.area(n);
            }
            if !any {
                return Err(Error::MissingBoundary);
            }
            Ok(IdentityReport::inequality(
                "bgh_boundary_inequality",
                "boundary integral of |Du|(R^∂M − (n−1)(n−2)) is nonnegative",
                total,
                0.0,
                Relation::AtLeast,
                tol,
            ))
        }
        LambdaSign::Negative => {
            let flags = AssumptionFlags::of(triple);
            let mut total = 0.0;
            let mut any = false;
            for b in triple.boundaries() {
                if let BoundaryKind::ConformalInfinity { .. } = b.kind {
                    any = true;
                    total += (k - b.scalar_curvature(n)) * b.area(n);
                }
            }
            if !any {
                return Err(Error::MissingBoundary);
            }
            Ok(IdentityReport::inequality(
                "bgh_boundary_inequality",
                "integral of (n−1)(n−2) − R_g over the conformal boundary is nonnegative",
                total,
                0.0,
                Relation::AtLeast,
                tol,
            )
            .requiring(&[
                ("conformally_compact", flags.conformally_compact.unwrap_or(false)),
                ("vanishing_boundary_defect", flags.vanishing_boundary_defect.unwrap_or(false)),
            ]))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{anti_de_sitter, de_sitter, schwarzschild_de_sitter, sds_horizons, SdsParams};
    use std::f64::consts::PI;

    fn sds() -> StaticTriple {
        schwarzschild_de_sitter(SdsParams::new(3, 0.1).unwrap()).unwrap()
    }

    #[test]
    fn first_identity_de_sitter_closed_form() {
        // |∇φ| = 1 and the g-area of every level is 4π
        let ds = de_sitter(3).unwrap();
        let (p, s, up): (f64, f64, f64) = (3.0, 0.5, 3.0);
        let oracle = 4.0 * PI * (1.0 / up.sinh().powi(3) - 1.0 / s.sinh().powi(3));
        let r = first_identity(&ds, p, s, up).unwrap();
        assert!((r.lhs - oracle).abs() < 1e-10, "{} vs {oracle}", r.lhs);
        assert!((r.rhs - oracle).abs() < 1e-7, "{} vs {oracle}", r.rhs);
        assert!(first_identity(&ds, 1.0, s, up).unwrap().passed());
    }

    #[test]
    fn identities_on_sds_outer_branch() {
        let t = sds();
        let fol = Foliation::restricted(&t, Branches::Only(1));
        for p in [1.0, 3.0, 5.0] {
            let r = IdentityCheck::first(&fol, p, 0.3, 1.5).unwrap().report().unwrap();
            assert!(r.passed() && r.lhs.abs() > 1e-3, "{r:?}");
        }
        for p in [3.0, 5.0] {
            let r = IdentityCheck::second(&fol, p, 0.3, 1.5).unwrap().report().unwrap();
            assert!(r.passed() && r.lhs.abs() > 1e-4, "{r:?}");
        }
    }

    #[test]
    fn bgh_on_sds_crosses_the_extremal_sphere() {
        let t = sds();
        let c = IdentityCheck::bgh(&Foliation::new(&t), 0.3, None).unwrap();
        assert_eq!(c.intervals().len(), 1);
        let r = c.report().unwrap();
        assert!(r.passed() && r.lhs > 1e-3, "{r:?}");
        let r = bgh_identity(&t, 0.2, Some(0.6)).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn trivial_cases_vanish() {
        let ds = de_sitter(3).unwrap();
        let ads = anti_de_sitter(3).unwrap();
        for r in [
            second_identity(&ds, 3.0, 0.5, 3.0).unwrap(),
            bgh_identity(&ds, 0.4, None).unwrap(),
            second_identity(&ads, 4.0, 0.5, 3.0).unwrap(),
            bgh_identity(&ads, 2.0, None).unwrap(),
        ] {
            assert!(r.lhs.abs() < 1e-10 && r.rhs.abs() < 1e-10, "{r:?}");
        }
        assert!(first_identity(&ads, 3.0, 0.5, 3.0).unwrap().passed());
    }

    #[test]
    fn simpson_residual_drops_on_doubling() {
        let t = sds();
        let fol = Foliation::restricted(&t, Branches::Only(1));
        for c in [
            IdentityCheck::first(&fol, 3.0, 0.3, 1.5).unwrap(),
            IdentityCheck::second(&fol, 3.0, 0.3, 1.5).unwrap(),
            IdentityCheck::bgh(&Foliation::new(&t), 0.3, None).unwrap(),
        ] {
            let conv = c.convergence(4).unwrap();
            assert!(conv.ratio >= 4.0, "{conv:?}");
        }
    }

    #[test]
    fn truncated_flux_decays_exponentially() {
        let ds = de_sitter(3).unwrap();
        let fol = Foliation::new(&ds);
        let tail = first_identity_tail(&fol, 3.0, 0.5, &[4.0, 5.0, 6.0]).unwrap();
        for w in tail.windows(2) {
            let rate = -(w[1].1 / w[0].1).ln() / (w[1].0 - w[0].0);
            assert!((rate - 3.0).abs() < 1e-2, "{rate}");
        }
    }

    #[test]
    fn boundary_inequality_oracles() {
        let r = bgh_boundary_inequality(&de_sitter(3).unwrap()).unwrap();
        assert!(r.passed() && r.equality && r.lhs.abs() < 1e-12);
        let r = bgh_boundary_inequality(&anti_de_sitter(3).unwrap()).unwrap();
        assert!(r.passed() && r.equality);

        let h = sds_horizons(&SdsParams::new(3, 0.1).unwrap()).unwrap();
        let oracle = 4.0 * PI * (h.kappa1 * (2.0 - 2.0 * h.r1 * h.r1) + h.kappa2 * (2.0 - 2.0 * h.r2 * h.r2));
        let r = bgh_boundary_inequality(&sds()).unwrap();
        assert!(r.passed() && !r.equality);
        assert!((r.lhs - oracle).abs() < 1e-9 * oracle, "{} vs {oracle}", r.lhs);
    }

    #[test]
    fn boundary_value_is_twice_the_flux_limit() {
        let t = sds();
        let fol = Foliation::new(&t);
        let hs = [1e-3, 2e-3, 4e-3];
        let ys: Vec<f64> = hs.iter().map(|&s| traceless_flux(&fol, s).unwrap()).collect();
        let limit = crate::numerics::extrapolate::to_zero(&hs, &ys);
        let closed = bgh_boundary_inequality(&t).unwrap().lhs;
        assert!((2.0 * limit - closed).abs() < 1e-5 * closed, "{} vs {closed}", 2.0 * limit);
    }
}
