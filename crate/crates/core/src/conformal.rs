//! The cylindrical ansatz `g = g₀/|1 − u²|` with `φ = ½ log((1+u)/|1−u|)`.
//!
//! Two independent routes are provided. [`to_conformal`] uses the
//! dictionaries between `g₀`-quantities and `g`-quantities, which rely on the
//! static equations. [`conformal_tensors`] transforms the `g₀` curvature with
//! the generic formulas for a conformal change and never uses the equations;
//! the residual functions compare the two.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{curvature_from_jets, LambdaSign, LocalJets, StaticTriple};
use crate::jet::Jet;
use crate::report::IdentityReport;

/// Points with `|u − 1|` below this are refused.
pub const EXTREMUM_BAND: f64 = 1e-6;

const MEAN_CURVATURE_TOL: f64 = 1e-8;

/// Conformal quantities at one point, obtained from the dictionaries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConformalState {
    pub phi: f64,
    /// `|∇φ|²_g`, also called `W`.
    pub grad_phi_norm2: f64,
    pub hess_phi_norm2: f64,
    pub lap_phi: f64,
    /// `β(φ)(1 − |∇φ|²_g)`.
    pub w: f64,
    pub beta: f64,
    pub gamma: f64,
    pub scalar_g: f64,
    /// Mean curvature of the level through the point in `g`, w.r.t. `∇φ/|∇φ|_g`.
    pub mean_curvature_g: f64,
    pub u_of_phi: f64,
}

/// `tanh φ` for Λ>0, `coth φ` for Λ<0.
pub fn u_of_phi(sign: LambdaSign, phi: f64) -> f64 {
    match sign {
        LambdaSign::Positive => phi.tanh(),
        LambdaSign::Negative => 1.0 / phi.tanh(),
    }
}

/// `½ log|(1+t)/(1−t)|`, the level of `φ` matching the level `t` of `u`.
pub fn phi_of_u(t: f64) -> f64 {
    0.5 * ((1.0 + t) / (1.0 - t)).abs().ln()
}

/// `β(φ) = 1/cosh²φ` or `1/sinh²φ`, equal to `|1 − u²|`.
pub fn beta(q: f64) -> f64 {
    q
}

/// `γ(φ) = 1/(sinh φ cosh^{n+1}φ)` or `1/(cosh φ sinh^{n+1}φ)`, written as
/// `|1 − u²|^{(n+2)/2}/u`.
pub fn gamma(n: usize, u: f64, q: f64) -> f64 {
    q.powf(0.5 * (n as f64 + 2.0)) / u
}

fn guard(triple: &StaticTriple, x: f64, band: f64) -> Result<(LocalJets, f64)> {
    let j = triple.local(x)?;
    let q = triple.deficit(x);
    let u = j.potential.v;
    if !(u > 0.0) {
        return Err(Error::SingularPoint { x });
    }
    // |u − 1| = |1 − u²|/(1 + u) without cancellation
    if q / (1.0 + u) < band {
        return Err(Error::NearExtremum { band });
    }
    Ok((j, q))
}

/// Mean curvature of the level of `u` through the point in `g₀`, taken with
/// respect to `ν = Du/|Du|`.
pub fn level_mean_curvature(n: usize, j: &LocalJets) -> f64 {
    let c = curvature_from_jets(n, j);
    let g = j.grad_norm();
    let hess_nn = c.hess_u_rr;
    c.lap_u / g - hess_nn / g
}

pub fn to_conformal(triple: &StaticTriple, x: f64) -> Result<ConformalState> {
    to_conformal_with_band(triple, x, EXTREMUM_BAND)
}

pub fn to_conformal_with_band(triple: &StaticTriple, x: f64, band: f64) -> Result<ConformalState> {
    let (j, q) = guard(triple, x, band)?;
    let n = triple.n();
    let nf = n as f64;
    let c = curvature_from_jets(n, &j);
    let u = j.potential.v;
    let w_big = c.grad_u_norm2 / q;
    let phi = (1.0 + u).ln() - 0.5 * q.ln();
    let sign = triple.lambda_sign();
    let mean_curvature_g = if j.grad_norm() > 0.0 {
        let h = level_mean_curvature(n, &j);
        q.sqrt() * (sign.sign() * h + (nf - 1.0) * u * j.grad_norm() / q)
    } else {
        f64::NAN
    };
    Ok(ConformalState {
        phi,
        grad_phi_norm2: w_big,
        hess_phi_norm2: c.hess_u_norm2 + nf * u * u * w_big * (w_big - 2.0),
        lap_phi: -nf * u * (1.0 - w_big),
        w: beta(q) * (1.0 - w_big),
        beta: beta(q),
        gamma: gamma(n, u, q),
        scalar_g: (nf - 1.0) * ((nf - 2.0) + (nf * u * u + 2.0) * (1.0 - w_big)),
        mean_curvature_g,
        u_of_phi: u_of_phi(sign, phi),
    })
}

/// Curvature of `g` and derivatives of `φ` obtained from the generic
/// conformal-change formulas for `g = e^{2ψ} g₀`, `ψ = −½ log|1 − u²|`.
///
/// Tensor components `*_rr`, `*_tan` are in a `g₀`-orthonormal frame; scalar
/// contractions are taken with `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConformalTensors {
    pub n: usize,
    pub u: f64,
    pub q: f64,
    pub warp: Jet,
    pub phi: Jet,
    pub psi: Jet,
    /// `|∇φ|²_g` as a radial jet (third derivative not available).
    pub grad_phi_norm2: Jet,
    pub ric_g_rr: f64,
    pub ric_g_tan: f64,
    pub hess_phi_rr: f64,
    pub hess_phi_tan: f64,
    pub lap_phi: f64,
    pub hess_phi_norm2: f64,
    pub scalar_g: f64,
    /// Mean curvature of the level in `g` w.r.t. `∇φ/|∇φ|_g`.
    pub mean_curvature_g: f64,
}

impl ConformalTensors {
    /// `g`-Hessian of a radial function, `g₀`-orthonormal components.
    pub fn hess(&self, w: Jet) -> (f64, f64) {
        let dpsi = self.psi.d1;
        (
            w.d2 - dpsi * w.d1,
            self.warp.d1 * w.d1 / self.warp.v + dpsi * w.d1,
        )
    }

    pub fn lap(&self, w: Jet) -> f64 {
        let k = (self.n - 1) as f64;
        let dpsi = self.psi.d1;
        self.q * (w.d2 + k * self.warp.d1 * w.d1 / self.warp.v + (k - 1.0) * dpsi * w.d1)
    }

    /// `⟨∇a, ∇b⟩_g` for radial functions.
    pub fn inner(&self, a: Jet, b: Jet) -> f64 {
        self.q * a.d1 * b.d1
    }

    /// `|T|²_g` of a rotationally symmetric symmetric 2-tensor.
    pub fn norm2(&self, rr: f64, tan: f64) -> f64 {
        let k = (self.n - 1) as f64;
        self.q * self.q * (rr * rr + k * tan * tan)
    }

    /// `g`-orthonormal Ricci components.
    pub fn ric_g_frame(&self) -> (f64, f64) {
        (self.q * self.ric_g_rr, self.q * self.ric_g_tan)
    }
}

pub fn conformal_tensors(triple: &StaticTriple, x: f64) -> Result<ConformalTensors> {
    let (j, q) = guard(triple, x, EXTREMUM_BAND)?;
    Ok(tensors_from_jets(triple.n(), &j, q))
}

fn tensors_from_jets(n: usize, j: &LocalJets, q_exact: f64) -> ConformalTensors {
    let nf = n as f64;
    let k = nf - 1.0;
    let u = j.potential;
    let h = j.warp;
    let one = Jet::constant(1.0);
    let s = if u.v < 1.0 { 1.0 } else { -1.0 };
    let mut qj = (one - u * u).scale(s);
    qj.v = q_exact;
    let psi = qj.ln().scale(-0.5);
    let phi = (one + u).ln() + psi;
    let dphi = phi.derivative();
    let grad_phi_norm2 = qj * dphi * dphi;

    let c = curvature_from_jets(n, j);
    let (dpsi, d2psi) = (psi.d1, psi.d2);
    let lap_psi = d2psi + k * h.d1 * dpsi / h.v;
    let iso = lap_psi + (nf - 2.0) * dpsi * dpsi;
    let ric_g_rr = c.ric_rr - (nf - 2.0) * (d2psi - dpsi * dpsi) - iso;
    let ric_g_tan = c.ric_tan - (nf - 2.0) * (h.d1 * dpsi / h.v) - iso;

    let mut t = ConformalTensors {
        n,
        u: u.v,
        q: q_exact,
        warp: h,
        phi,
        psi,
        grad_phi_norm2,
        ric_g_rr,
        ric_g_tan,
        hess_phi_rr: 0.0,
        hess_phi_tan: 0.0,
        lap_phi: 0.0,
        hess_phi_norm2: 0.0,
        scalar_g: q_exact * (ric_g_rr + k * ric_g_tan),
        mean_curvature_g: f64::NAN,
    };
    let (hr, ht) = t.hess(phi);
    t.hess_phi_rr = hr;
    t.hess_phi_tan = ht;
    t.lap_phi = t.lap(phi);
    t.hess_phi_norm2 = t.norm2(hr, ht);
    if phi.d1 != 0.0 {
        t.mean_curvature_g = (t.lap_phi - q_exact * hr) / (q_exact.sqrt() * phi.d1.abs());
    }
    t
}

/// Largest `g`-orthonormal component of
/// `Ric_g − (1/u − (n−1)u)∇²φ + (n−2)dφ⊗dφ − (n − 2|∇φ|²_g) g`.
pub fn quasi_einstein_residual(triple: &StaticTriple, x: f64) -> Result<f64> {
    let t = conformal_tensors(triple, x)?;
    let nf = t.n as f64;
    let drift = 1.0 / t.u - (nf - 1.0) * t.u;
    let iso = nf - 2.0 * t.grad_phi_norm2.v;
    let (ric_rr, ric_tan) = t.ric_g_frame();
    let rr = ric_rr - (drift * t.q * t.hess_phi_rr - (nf - 2.0) * t.q * t.phi.d1 * t.phi.d1 + iso);
    let tan = ric_tan - (drift * t.q * t.hess_phi_tan + iso);
    Ok(rr.abs().max(tan.abs()))
}

/// `|Δ_g φ + n u (1 − |∇φ|²_g)|`.
pub fn phi_laplace_residual(triple: &StaticTriple, x: f64) -> Result<f64> {
    let t = conformal_tensors(triple, x)?;
    Ok((t.lap_phi + t.n as f64 * t.u * (1.0 - t.grad_phi_norm2.v)).abs())
}

/// Scalar curvature of `g` from the conformal change against the trace
/// identity `R_g/(n−1) = (n−2) + (nu² + 2)(1 − |∇φ|²_g)`.
pub fn trace_identity_residual(triple: &StaticTriple, x: f64) -> Result<f64> {
    let t = conformal_tensors(triple, x)?;
    let nf = t.n as f64;
    let w = t.grad_phi_norm2.v;
    let traced = (nf - 1.0) * ((nf - 2.0) + (nf * t.u * t.u + 2.0) * (1.0 - w));
    Ok((t.scalar_g - traced).abs())
}

/// Residual of the Bochner identity for `|∇φ|²_g`.
pub fn bochner_residual(triple: &StaticTriple, x: f64) -> Result<f64> {
    let t = conformal_tensors(triple, x)?;
    let nf = t.n as f64;
    let w = t.grad_phi_norm2;
    let lhs = t.lap(w);
    let rhs = 2.0 * t.hess_phi_norm2
        + (1.0 / t.u + (nf + 1.0) * t.u) * t.inner(w, t.phi)
        + 2.0 * nf * t.u * t.u * w.v * (1.0 - w.v);
    Ok((lhs - rhs).abs())
}

/// Residual of the elliptic equation for `w = β(1 − |∇φ|²_g)`.
pub fn w_equation_residual(triple: &StaticTriple, x: f64) -> Result<f64> {
    let t = conformal_tensors(triple, x)?;
    let nf = t.n as f64;
    // β = |1 − u²| as a jet, recovered from ψ = −½ log β
    let beta = t.psi.scale(-2.0).exp();
    let w = beta * (Jet::constant(1.0) - t.grad_phi_norm2);
    let lhs = t.lap(w) - (1.0 / t.u + (nf - 3.0) * t.u) * t.inner(w, t.phi);
    let rhs = -2.0 * beta.v * (t.hess_phi_norm2 - t.lap_phi * t.lap_phi / nf);
    Ok((lhs - rhs).abs())
}

/// Compares `H_g` of the level through `x`, computed in `g` from the
/// conformal change, with the value predicted from the `g₀` mean curvature.
pub fn mean_curvature_relations(triple: &StaticTriple, x: f64) -> Result<IdentityReport> {
    let (j, q) = guard(triple, x, EXTREMUM_BAND)?;
    if j.grad_norm() == 0.0 {
        return Err(Error::SingularLevel { t: j.potential.v });
    }
    let n = triple.n();
    let t = tensors_from_jets(n, &j, q);
    let h = level_mean_curvature(n, &j);
    let u = j.potential.v;
    let predicted = q.sqrt() * (triple.lambda_sign().sign() * h + (n as f64 - 1.0) * u * j.grad_norm() / q);
    let reference = match triple.lambda_sign() {
        LambdaSign::Positive => "H_g = sqrt(1-u^2) [H + (n-1) u |Du| / (1-u^2)]",
        LambdaSign::Negative => "H_g = sqrt(u^2-1) [-H + (n-1) u |Du| / (u^2-1)]",
    };
    Ok(IdentityReport::equality(
        "mean_curvature_relation",
        reference,
        t.mean_curvature_g,
        predicted,
        MEAN_CURVATURE_TOL,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{anti_de_sitter, de_sitter, nariai, schwarzschild_de_sitter, sds_horizons, SdsParams};
    use crate::geometry::RadialProfile;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn sds() -> (StaticTriple, crate::models::SdsHorizons) {
        let p = SdsParams::new(3, 0.1).unwrap();
        (schwarzschild_de_sitter(p).unwrap(), sds_horizons(&p).unwrap())
    }

    fn grid(lo: f64, hi: f64, k: usize) -> impl Iterator<Item = f64> {
        (1..=k).map(move |i| lo + (hi - lo) * i as f64 / (k + 1) as f64)
    }

    #[test]
    fn de_sitter_is_a_cylinder() {
        for n in 3..=5 {
            let t = de_sitter(n).unwrap();
            for r in grid(0.05, 0.95, 9) {
                let c = to_conformal(&t, r).unwrap();
                assert_abs_diff_eq!(c.grad_phi_norm2, 1.0, epsilon = 1e-12);
                assert_abs_diff_eq!(c.hess_phi_norm2, 0.0, epsilon = 1e-10);
                assert_abs_diff_eq!(c.lap_phi, 0.0, epsilon = 1e-12);
                assert_abs_diff_eq!(c.mean_curvature_g, 0.0, epsilon = 1e-10);
                let g = conformal_tensors(&t, r).unwrap();
                assert_abs_diff_eq!(g.hess_phi_norm2, 0.0, epsilon = 1e-10);
                assert_abs_diff_eq!(g.scalar_g, ((n - 1) * (n - 2)) as f64, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn anti_de_sitter_scalar_curvature() {
        for n in 3..=5 {
            let t = anti_de_sitter(n).unwrap();
            for r in [0.1, 0.5, 2.0, 7.0] {
                let c = to_conformal(&t, r).unwrap();
                assert_abs_diff_eq!(c.grad_phi_norm2, 1.0, epsilon = 1e-12);
                let cyl = ((n - 1) * (n - 2)) as f64;
                assert_abs_diff_eq!(c.scalar_g, cyl, epsilon = 1e-10);
                assert_abs_diff_eq!(conformal_tensors(&t, r).unwrap().scalar_g, cyl, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn sds_gradient_ratio_matches_metric_function() {
        let (t, hz) = sds();
        let m = 0.1;
        let r: f64 = 0.5;
        let f = 1.0 - r * r - 2.0 * m / r;
        let fp = -2.0 * r + 2.0 * m / (r * r);
        let f0 = hz.normalization * hz.normalization;
        let u2 = f / f0;
        let oracle = fp * fp / (4.0 * f0 * (1.0 - u2));
        let c = to_conformal(&t, r).unwrap();
        assert_abs_diff_eq!(c.grad_phi_norm2, oracle, epsilon = 1e-12);
    }

    #[test]
    fn residuals_vanish_on_solutions() {
        let (s, hz) = sds();
        let cases: Vec<(StaticTriple, Vec<f64>)> = vec![
            (de_sitter(3).unwrap(), grid(0.0, 1.0, 50).collect()),
            (de_sitter(4).unwrap(), grid(0.0, 1.0, 20).collect()),
            (anti_de_sitter(3).unwrap(), grid(0.0, 8.0, 20).collect()),
            (s.clone(), grid(hz.r1, hz.r0, 50).collect()),
            (s, grid(hz.r0, hz.r2, 50).collect()),
            (nariai(3).unwrap(), grid(0.0, std::f64::consts::PI / 3f64.sqrt(), 40).collect()),
        ];
        for (t, xs) in cases {
            for x in xs {
                let Ok(qe) = quasi_einstein_residual(&t, x) else { continue };
                assert!(qe < 1e-8, "{:?} x={x} quasi-Einstein {qe}", t.model());
                let b = bochner_residual(&t, x).unwrap();
                assert!(b < 1e-7, "{:?} x={x} Bochner {b}", t.model());
                let w = w_equation_residual(&t, x).unwrap();
                assert!(w < 1e-7, "{:?} x={x} w-equation {w}", t.model());
                let tr = trace_identity_residual(&t, x).unwrap();
                assert!(tr < 1e-8, "{:?} x={x} trace {tr}", t.model());
                let l = phi_laplace_residual(&t, x).unwrap();
                assert!(l < 1e-8, "{:?} x={x} laplace {l}", t.model());
                assert!(mean_curvature_relations(&t, x).unwrap().passed());
            }
        }
    }

    #[test]
    fn perturbed_potential_breaks_the_system() {
        let t = de_sitter(3).unwrap();
        let bad = t.with_potential(RadialProfile::closed_form(t.domain(), |r| {
            (Jet::constant(1.0) - r * r).sqrt() + Jet::constant(0.01)
        }));
        let r = 0.8;
        assert!(quasi_einstein_residual(&bad, r).unwrap() > 1e-3);
        assert!(bochner_residual(&bad, r).unwrap() > 1e-3);
    }

    #[test]
    fn dictionary_and_generic_routes_agree() {
        let (s, hz) = sds();
        for r in grid(hz.r1, hz.r2, 30) {
            let Ok(d) = to_conformal(&s, r) else { continue };
            let g = conformal_tensors(&s, r).unwrap();
            assert_abs_diff_eq!(d.grad_phi_norm2, g.grad_phi_norm2.v, epsilon = 1e-12);
            assert_abs_diff_eq!(d.hess_phi_norm2, g.hess_phi_norm2, epsilon = 1e-7 * (1.0 + d.hess_phi_norm2));
            assert_abs_diff_eq!(d.lap_phi, g.lap_phi, epsilon = 1e-8);
            assert_abs_diff_eq!(d.scalar_g, g.scalar_g, epsilon = 1e-7);
            assert_abs_diff_eq!(d.phi, g.phi.v, epsilon = 1e-14);
        }
    }

    // Ricci of g written directly in terms of u (Λ>0 form).
    #[test]
    fn ricci_in_terms_of_u() {
        let (s, hz) = sds();
        let n = 3.0;
        for r in grid(hz.r1, hz.r2, 20) {
            let Ok(g) = conformal_tensors(&s, r) else { continue };
            let j = s.local(r).unwrap();
            let c = curvature_from_jets(3, &j);
            let u = j.potential.v;
            let q = 1.0 - u * u;
            let iso = u * c.lap_u / q + ((n - 1.0) * u * u + 1.0) / (q * q) * c.grad_u_norm2;
            let rr = c.ric_rr - (n - 2.0) * u / q * c.hess_u_rr - (n - 2.0) / (q * q) * c.grad_u_norm2 - iso;
            let tan = c.ric_tan - (n - 2.0) * u / q * c.hess_u_tan - iso;
            assert_abs_diff_eq!(g.ric_g_rr, rr, epsilon = 1e-8 * (1.0 + rr.abs()));
            assert_abs_diff_eq!(g.ric_g_tan, tan, epsilon = 1e-8 * (1.0 + tan.abs()));
        }
    }

    #[test]
    fn potential_solves_du_dphi() {
        let (s, hz) = sds();
        for r in grid(hz.r1, hz.r0 - 0.05, 10) {
            let d = 1e-5;
            let (a, b) = (to_conformal(&s, r - d).unwrap(), to_conformal(&s, r + d).unwrap());
            let fd = (b.u_of_phi - a.u_of_phi) / (b.phi - a.phi);
            let u = s.potential_value(r);
            assert_abs_diff_eq!(fd, 1.0 - u * u, epsilon = 1e-8);
        }
        for sign in [LambdaSign::Positive, LambdaSign::Negative] {
            for phi in [0.3, 1.0, 2.5] {
                let d = 1e-5;
                let fd = (u_of_phi(sign, phi + d) - u_of_phi(sign, phi - d)) / (2.0 * d);
                let u = u_of_phi(sign, phi);
                assert_relative_eq!(fd, 1.0 - u * u, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn mean_curvature_of_de_sitter_spheres() {
        let t = de_sitter(3).unwrap();
        let r: f64 = 0.5;
        let j = t.local(r).unwrap();
        // ν = Du/|Du| points inward since u decreases outward
        assert_abs_diff_eq!(level_mean_curvature(3, &j), -2.0 * (1.0 - r * r).sqrt() / r, epsilon = 1e-12);
        let rep = mean_curvature_relations(&t, r).unwrap();
        assert_abs_diff_eq!(rep.lhs, 0.0, epsilon = 1e-10);
        assert!(rep.passed());
    }

    // H changes sign across the extremal sphere while H_g stays finite:
    // √q·H → 0 and u|Du|/√q tends to a finite limit.
    #[test]
    fn sds_mean_curvature_across_the_extremum() {
        let (s, hz) = sds();
        let at = |r: f64| (to_conformal(&s, r).unwrap().mean_curvature_g, level_mean_curvature(3, &s.local(r).unwrap()));
        let (ga, ha) = at(hz.r0 - 1e-3);
        let (gb, hb) = at(hz.r0 + 1e-3);
        assert!(ha * hb < 0.0);
        let (gc, _) = at(hz.r0 - 2e-3);
        assert!((ga - gb).abs() < 0.1 && (ga - gc).abs() < 0.1, "{ga} {gb} {gc}");
    }

    #[test]
    fn refuses_the_extremum() {
        assert!(matches!(to_conformal(&de_sitter(3).unwrap(), 1e-5), Err(Error::NearExtremum { .. })));
        assert!(matches!(to_conformal(&anti_de_sitter(3).unwrap(), 1e-7), Err(Error::NearExtremum { .. })));
    }

    #[test]
    fn gradient_lemma_on_models() {
        for t in [de_sitter(3).unwrap(), anti_de_sitter(3).unwrap()] {
            for x in t.sample_points(100) {
                if let Ok(c) = to_conformal(&t, x) {
                    assert!(1.0 - c.grad_phi_norm2 >= -1e-12);
                }
            }
        }
        let (s, _) = sds();
        let over: Vec<_> = s
            .sample_points(100)
            .into_iter()
            .filter(|&r| to_conformal(&s, r).map(|c| c.grad_phi_norm2 > 1.0).unwrap_or(false))
            .collect();
        assert!(!over.is_empty());
    }
}
