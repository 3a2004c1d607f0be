//! Closed-form static triples: de Sitter, anti-de Sitter,
//! Schwarzschild–de Sitter and Nariai.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{
    BoundaryComponent, BoundaryKind, Branch, Chart, Extremum, ExtremumShape, LambdaSign,
    ModelKind, RadialProfile, StaticTriple, TripleParts,
};
use crate::jet::Jet;
use crate::numerics::roots::safeguarded_newton;

fn check_dimension(n: usize) -> Result<()> {
    if n < 3 {
        Err(Error::InvalidParameter(format!("dimension n = {n} < 3")))
    } else {
        Ok(())
    }
}

/// `f(r) = 1 − r²`, `u = √(1 − r²)` on the unit ball, horizon at `r = 1`.
pub fn de_sitter(n: usize) -> Result<StaticTriple> {
    check_dimension(n)?;
    let dom = (0.0, 1.0);
    StaticTriple::from_parts(TripleParts {
        n,
        lambda_sign: LambdaSign::Positive,
        chart: Chart::Areal,
        model: ModelKind::DeSitter,
        potential: RadialProfile::closed_form(dom, |r| (1.0 - r * r).sqrt()),
        radial: RadialProfile::closed_form(dom, |r| 1.0 - r * r),
        deficit: Some(Arc::new(|r| r * r)),
        boundaries: vec![BoundaryComponent::horizon(n, 1.0, 1.0, 1.0)],
        extremum: Extremum {
            location: 0.0,
            shape: ExtremumShape::Point,
            count: 1,
        },
        normalization_factor: 1.0,
        branches: vec![Branch {
            lo: 0.0,
            hi: 1.0,
            increasing: false,
        }],
    })
}

/// `f(r) = 1 + r²`, `u = √(1 + r²)`; conformally compact with defining
/// function `1/√(u² − 1)` and a unit round conformal boundary.
pub fn anti_de_sitter(n: usize) -> Result<StaticTriple> {
    check_dimension(n)?;
    let dom = (0.0, f64::INFINITY);
    StaticTriple::from_parts(TripleParts {
        n,
        lambda_sign: LambdaSign::Negative,
        chart: Chart::Areal,
        model: ModelKind::AntiDeSitter,
        potential: RadialProfile::closed_form(dom, |r| (1.0 + r * r).sqrt()),
        radial: RadialProfile::closed_form(dom, |r| 1.0 + r * r),
        deficit: Some(Arc::new(|r| r * r)),
        boundaries: vec![BoundaryComponent {
            location: f64::INFINITY,
            sphere_radius: 1.0,
            kind: BoundaryKind::ConformalInfinity { defect_limit: 0.0 },
            euler_characteristic: if n % 2 == 1 { 2 } else { 0 },
        }],
        extremum: Extremum {
            location: 0.0,
            shape: ExtremumShape::Point,
            count: 1,
        },
        normalization_factor: 1.0,
        branches: vec![Branch {
            lo: 0.0,
            hi: f64::INFINITY,
            increasing: true,
        }],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SdsParams {
    n: usize,
    mass: f64,
}

impl SdsParams {
    pub fn new(n: usize, mass: f64) -> Result<Self> {
        check_dimension(n)?;
        let bound = Self::mass_bound(n);
        if !(mass > 0.0 && mass < bound) {
            return Err(Error::InvalidParameter(format!(
                "mass {mass} outside (0, {bound})"
            )));
        }
        Ok(Self { n, mass })
    }

    /// `√((n−2)^{n−2} / nⁿ)`, where the two horizons merge.
    pub fn mass_bound(n: usize) -> f64 {
        let nf = n as f64;
        ((nf - 2.0).powf(nf - 2.0) / nf.powf(nf)).sqrt()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// `f(r) = 1 − r² − 2m r^{2−n}` as a jet.
    pub fn metric_function(&self, r: Jet) -> Jet {
        1.0 - r * r - r.powi(2 - self.n as i32) * (2.0 * self.mass)
    }

    fn f_and_df(&self, r: f64) -> (f64, f64) {
        let j = self.metric_function(Jet::var(r));
        (j.v, j.d1)
    }
}

/// Horizon radii, maximizer and surface gravities of an SdS triple.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SdsHorizons {
    pub r1: f64,
    pub r2: f64,
    pub r0: f64,
    /// `√f(r₀)`, the factor dividing `√f` to normalize `max u = 1`.
    pub normalization: f64,
    pub kappa1: f64,
    pub kappa2: f64,
}

pub fn sds_horizons(p: &SdsParams) -> Result<SdsHorizons> {
    let n = p.n as f64;
    let df = |r: f64| {
        let j = p.metric_function(Jet::var(r));
        (j.d1, j.d2)
    };
    let r0 = safeguarded_newton(df, (p.mass * (n - 2.0)).powf(1.0 / n) * 0.5, 1.0, 1e-15)?;
    // f < 0 where 2m r^{2−n} > 1
    let mut lower = p.mass.powf(1.0 / (n - 2.0));
    while p.f_and_df(lower).0 >= 0.0 {
        lower *= 0.5;
    }
    let r1 = safeguarded_newton(|r| p.f_and_df(r), lower, r0, 1e-16)?;
    let r2 = safeguarded_newton(|r| p.f_and_df(r), r0, 1.0, 1e-16)?;
    let normalization = p.f_and_df(r0).0.sqrt();
    Ok(SdsHorizons {
        r1,
        r2,
        r0,
        normalization,
        kappa1: p.f_and_df(r1).1.abs() / (2.0 * normalization),
        kappa2: p.f_and_df(r2).1.abs() / (2.0 * normalization),
    })
}

/// Schwarzschild–de Sitter on `[r₁, r₂]` with `u = √f/√f(r₀)`.
pub fn schwarzschild_de_sitter(params: SdsParams) -> Result<StaticTriple> {
    let hz = sds_horizons(&params)?;
    let n = params.n;
    let dom = (hz.r1, hz.r2);
    let norm = hz.normalization;
    StaticTriple::from_parts(TripleParts {
        n,
        lambda_sign: LambdaSign::Positive,
        chart: Chart::Areal,
        model: ModelKind::SchwarzschildDeSitter { mass: params.mass },
        potential: RadialProfile::closed_form(dom, move |r| params.metric_function(r).sqrt() / norm),
        radial: RadialProfile::closed_form(dom, move |r| params.metric_function(r)),
        deficit: None,
        boundaries: vec![
            BoundaryComponent::horizon(n, hz.r1, hz.r1, hz.kappa1),
            BoundaryComponent::horizon(n, hz.r2, hz.r2, hz.kappa2),
        ],
        extremum: Extremum {
            location: hz.r0,
            shape: ExtremumShape::Sphere { radius: hz.r0 },
            count: 1,
        },
        normalization_factor: norm,
        branches: vec![
            Branch {
                lo: hz.r1,
                hi: hz.r0,
                increasing: true,
            },
            Branch {
                lo: hz.r0,
                hi: hz.r2,
                increasing: false,
            },
        ],
    })
}

/// The product `[0, π/√n] × S^{n−1}` with `h ≡ √((n−2)/n)` and
/// `u = sin(√n ρ)`.
pub fn nariai(n: usize) -> Result<StaticTriple> {
    check_dimension(n)?;
    let nf = n as f64;
    let k = nf.sqrt();
    let radius = ((nf - 2.0) / nf).sqrt();
    let len = PI / k;
    let dom = (0.0, len);
    StaticTriple::from_parts(TripleParts {
        n,
        lambda_sign: LambdaSign::Positive,
        chart: Chart::Arclength,
        model: ModelKind::Nariai,
        potential: RadialProfile::closed_form(dom, move |x| (x * k).sin()),
        radial: RadialProfile::closed_form(dom, move |_| Jet::constant(radius)),
        deficit: Some(Arc::new(move |x| (k * x).cos().powi(2))),
        boundaries: vec![
            BoundaryComponent::horizon(n, 0.0, radius, k),
            BoundaryComponent::horizon(n, len, radius, k),
        ],
        extremum: Extremum {
            location: 0.5 * len,
            shape: ExtremumShape::Sphere { radius },
            count: 1,
        },
        normalization_factor: 1.0,
        branches: vec![
            Branch {
                lo: 0.0,
                hi: 0.5 * len,
                increasing: true,
            },
            Branch {
                lo: 0.5 * len,
                hi: len,
                increasing: false,
            },
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{static_residual, surface_gravity, warped_curvature};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    /// Independent oracle: plain bisection on r·f(r) = r − r³ − 2m for n = 3.
    fn cubic_root(m: f64, mut lo: f64, mut hi: f64) -> f64 {
        let g = |r: f64| r - r * r * r - 2.0 * m;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid).signum() == g(lo).signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn sds_roots_match_cubic_oracle() {
        let p = SdsParams::new(3, 0.1).unwrap();
        let hz = sds_horizons(&p).unwrap();
        let r0 = 0.1f64.powf(1.0 / 3.0);
        assert_abs_diff_eq!(hz.r0, r0, epsilon = 1e-13);
        assert_abs_diff_eq!(hz.r1, cubic_root(0.1, 1e-3, r0), epsilon = 1e-13);
        assert_abs_diff_eq!(hz.r2, cubic_root(0.1, r0, 1.0), epsilon = 1e-13);
        assert_abs_diff_eq!(p.f_and_df(hz.r1).0, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.f_and_df(hz.r2).0, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.f_and_df(hz.r0).1, 0.0, epsilon = 1e-12);
        // closed-form κ for n = 3
        let k1 = (0.1 / (hz.r1 * hz.r1) - hz.r1).abs() / (1.0 - 3.0 * 0.1f64.powf(2.0 / 3.0)).sqrt();
        assert_relative_eq!(hz.kappa1, k1, max_relative = 1e-12);
        assert!(hz.kappa1 > 3.4 && hz.kappa1 < 3.6);
    }

    #[test]
    fn sds_mass_bound_is_rejected() {
        for n in 3..7 {
            let b = SdsParams::mass_bound(n);
            assert!(SdsParams::new(n, b).is_err());
            assert!(SdsParams::new(n, 0.0).is_err());
            let hz = sds_horizons(&SdsParams::new(n, b * (1.0 - 1e-8)).unwrap()).unwrap();
            assert!(hz.r2 - hz.r1 < 1e-3, "n = {n}: {} {}", hz.r1, hz.r2);
        }
    }

    #[test]
    fn sds_small_mass_approaches_de_sitter() {
        let p = SdsParams::new(3, 1e-6).unwrap();
        let hz = sds_horizons(&p).unwrap();
        let worst = (0..=100)
            .map(|i| 0.2 + (hz.r2 - 0.2) * i as f64 / 100.0)
            .map(|r| (p.metric_function(Jet::constant(r)).v - (1.0 - r * r)).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-4);
    }

    #[test]
    fn models_solve_the_static_system() {
        let triples = vec![
            de_sitter(3).unwrap(),
            de_sitter(5).unwrap(),
            anti_de_sitter(3).unwrap(),
            anti_de_sitter(4).unwrap(),
            schwarzschild_de_sitter(SdsParams::new(3, 0.1).unwrap()).unwrap(),
            schwarzschild_de_sitter(SdsParams::new(4, 0.05).unwrap()).unwrap(),
            nariai(3).unwrap(),
            nariai(5).unwrap(),
        ];
        for t in &triples {
            for x in t.sample_points(100) {
                let r = static_residual(t, x).unwrap();
                assert!(r.max() < 1e-10, "{:?} at {x}: {:?}", t.model(), r);
            }
        }
    }

    #[test]
    fn de_sitter_gradient_identity() {
        let t = de_sitter(4).unwrap();
        for x in t.sample_points(20) {
            let c = warped_curvature(&t, x).unwrap();
            let u = t.potential_value(x);
            assert_abs_diff_eq!(c.grad_u_norm2, 1.0 - u * u, epsilon = 1e-14);
        }
    }

    #[test]
    fn anti_de_sitter_defect_vanishes() {
        let t = anti_de_sitter(3).unwrap();
        for x in [0.3, 2.0, 40.0] {
            let j = t.local(x).unwrap();
            let u = j.potential.v;
            assert_abs_diff_eq!(u * u - 1.0 - j.grad_norm().powi(2), 0.0, epsilon = 1e-9 * u * u);
        }
    }

    #[test]
    fn perturbed_potential_is_not_a_solution() {
        let t = de_sitter(3).unwrap();
        let shifted = t.with_potential(RadialProfile::closed_form(t.domain(), |r| {
            (1.0 - r * r).sqrt() + 0.01
        }));
        assert!(static_residual(&shifted, 0.5).unwrap().max() > 1e-3);
    }

    #[test]
    fn surface_gravities_from_profiles() {
        let ds = de_sitter(3).unwrap();
        assert_relative_eq!(surface_gravity(&ds, &ds.boundaries()[0]).unwrap(), 1.0, max_relative = 1e-9);
        let na = nariai(4).unwrap();
        for b in na.boundaries() {
            assert_relative_eq!(surface_gravity(&na, b).unwrap(), 2.0, max_relative = 1e-9);
        }
        let sds = schwarzschild_de_sitter(SdsParams::new(3, 0.1).unwrap()).unwrap();
        for b in sds.boundaries() {
            assert_relative_eq!(
                surface_gravity(&sds, b).unwrap(),
                b.surface_gravity().unwrap(),
                max_relative = 1e-8
            );
        }
        let ads = anti_de_sitter(3).unwrap();
        assert!(surface_gravity(&ads, &ads.boundaries()[0]).is_err());
    }

    #[test]
    fn nariai_warp_is_flat() {
        let t = nariai(3).unwrap();
        for x in t.sample_points(10) {
            assert_eq!(t.local(x).unwrap().warp.d1, 0.0);
        }
    }
}
