//! Level sets of `u` and the monotone quantities `U_p(t)`, `Φ_p(s)`, `V_p(r)`.
//!
//! In rotational symmetry a level `{u = t}` is a disjoint union of round
//! spheres, one per monotone branch of `u`. Every level integral is a finite
//! sum over those spheres.

use serde::Serialize;

use crate::assumptions::AssumptionFlags;
use crate::conformal::{
    conformal_tensors, level_mean_curvature, phi_of_u, to_conformal, u_of_phi, ConformalState,
};
use crate::error::{Error, Result};
use crate::geometry::{
    curvature_from_jets, unit_sphere_area, BoundaryComponent, BoundaryKind, Branch, Chart,
    LambdaSign, StaticTriple,
};
use crate::numerics::extrapolate;
use crate::numerics::roots::bisect;
use crate::report::{IdentityReport, Relation, Status};

/// Levels closer than this to the extremal value are not sampled.
pub const EXTREMUM_CUTOFF: f64 = 1e-8;
/// Baseline step of the central differences.
pub const FD_STEP: f64 = 1e-4;
/// Offset from the boundary at which the limits `U_p′(t)/t` are sampled.
pub const BOUNDARY_OFFSET: f64 = 1e-6;

/// Which monotone branches of `u` contribute to a level set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branches {
    All,
    Only(usize),
}

/// One sphere of a level set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelSphere {
    /// Chart coordinate of the sphere.
    pub x: f64,
    pub branch: usize,
    /// Induced round radius in `g₀`.
    pub radius: f64,
    pub area: f64,
    pub grad_u: f64,
    /// Mean curvature w.r.t. `ν = Du/|Du|`.
    pub mean_curvature: f64,
    pub ric_nn: f64,
    pub on_boundary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSetData {
    pub t: f64,
    pub s: f64,
    pub spheres: Vec<LevelSphere>,
    /// `g₀`-area of the whole level.
    pub area: f64,
    /// `g`-area of the whole level (`NaN` on the horizon level).
    pub area_g: f64,
    /// Conformal data on each sphere (`None` on horizons).
    pub conformal: Vec<Option<ConformalState>>,
}

impl LevelSetData {
    pub fn radii(&self) -> Vec<f64> {
        self.spheres.iter().map(|s| s.radius).collect()
    }
}

/// The three expressions of the derivative formula for `U_p′(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UpDerivative {
    /// Mean-curvature form.
    pub formula: f64,
    /// `Ric(ν, ν)` form.
    pub ricci_form: f64,
    /// The upper (Λ>0) or lower (Λ<0) bound.
    pub bound: f64,
}

/// Second derivative at the boundary: the boundary integral, its bound, and
/// the independently computed interior limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundarySecondDerivative {
    pub formula: f64,
    pub bound: f64,
    /// `lim U_p′(t)/t` (Λ>0) or `lim V_p″(r)` (Λ<0) from interior levels.
    pub limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UpCurve {
    pub p: f64,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Analytic derivative (`NaN` for `p < 3`, where no formula is asserted).
    pub d_analytic: Vec<f64>,
    pub d_numeric: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Constant,
    Nonincreasing,
    Nondecreasing,
    Mixed,
}

impl Trend {
    fn of(increments: &[f64], scale: f64) -> Self {
        let tol = 1e-9 * scale.max(1.0);
        let up = increments.iter().any(|&d| d > tol);
        let down = increments.iter().any(|&d| d < -tol);
        match (up, down) {
            (false, false) => Trend::Constant,
            (false, true) => Trend::Nonincreasing,
            (true, false) => Trend::Nondecreasing,
            (true, true) => Trend::Mixed,
        }
    }

    fn satisfies(self, expected: Trend) -> bool {
        self == Trend::Constant || self == expected
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityScan {
    pub p: f64,
    pub levels: Vec<f64>,
    pub values: Vec<f64>,
    pub expected: Trend,
    pub observed: Trend,
    pub assumptions: AssumptionFlags,
    pub status: Status,
}

/// Level-set calculus on a triple, optionally restricted to some branches.
#[derive(Debug, Clone, Copy)]
pub struct Foliation<'a> {
    triple: &'a StaticTriple,
    branches: Branches,
}

impl<'a> Foliation<'a> {
    pub fn new(triple: &'a StaticTriple) -> Self {
        Self {
            triple,
            branches: Branches::All,
        }
    }

    pub fn restricted(triple: &'a StaticTriple, branches: Branches) -> Self {
        Self { triple, branches }
    }

    pub fn triple(&self) -> &'a StaticTriple {
        self.triple
    }

    pub fn branches(&self) -> Branches {
        self.branches
    }

    fn sign(&self) -> f64 {
        self.triple.lambda_sign().sign()
    }

    fn selected(&self) -> Vec<(usize, Branch)> {
        let all = self.triple.branches().iter().copied().enumerate();
        match self.branches {
            Branches::All => all.collect(),
            Branches::Only(i) => all.filter(|(k, _)| *k == i).collect(),
        }
    }

    /// `|1 − t²|`.
    fn level_deficit(t: f64) -> f64 {
        ((1.0 - t) * (1.0 + t)).abs()
    }

    fn check_level(&self, t: f64) -> Result<()> {
        let ok = match self.triple.lambda_sign() {
            LambdaSign::Positive => (0.0..1.0).contains(&t),
            LambdaSign::Negative => t > 1.0 && t.is_finite(),
        };
        if ok {
            Ok(())
        } else if t == 1.0 {
            Err(Error::SingularLevel { t })
        } else {
            Err(Error::LevelOutOfRange { t })
        }
    }

    fn potential(&self, x: f64) -> f64 {
        // a horizon endpoint may evaluate to √(−0) = NaN
        let v = self.triple.potential_value(x);
        if v.is_nan() {
            0.0
        } else {
            v
        }
    }

    fn locate(&self, br: &Branch, t: f64) -> Result<Option<f64>> {
        let lo = br.lo;
        let mut hi = br.hi;
        if !hi.is_finite() {
            hi = lo + 1.0;
            while (self.potential(hi) - t) * (self.potential(lo) - t) > 0.0 {
                hi = lo + 2.0 * (hi - lo);
                if hi > 1e150 {
                    return Ok(None);
                }
            }
        }
        let near = (1.0 - t).abs() < 1e-3 && self.triple.has_exact_deficit();
        let qt = Self::level_deficit(t);
        let g = |x: f64| {
            if near {
                self.triple.deficit(x) - qt
            } else {
                self.potential(x) - t
            }
        };
        let (ga, gb) = (g(lo), g(hi));
        if ga * gb > 0.0 {
            return Ok(None);
        }
        Ok(Some(bisect(g, lo, hi)?))
    }

    fn boundary_sphere(&self, idx: usize, b: &BoundaryComponent) -> LevelSphere {
        let n = self.triple.n();
        let k = (n - 1) as f64;
        let h2 = match self.triple.chart() {
            Chart::Arclength => self.triple.radial().eval(b.location).d2,
            Chart::Areal => 0.5 * self.triple.radial().eval(b.location).d1,
        };
        LevelSphere {
            x: b.location,
            branch: idx,
            radius: b.sphere_radius,
            area: b.area(n),
            grad_u: b.surface_gravity().unwrap_or(f64::NAN),
            mean_curvature: 0.0,
            ric_nn: -k * h2 / b.sphere_radius,
            on_boundary: true,
        }
    }

    fn adjacent_horizons(&self) -> Vec<(usize, BoundaryComponent)> {
        let mut out = Vec::new();
        for (i, br) in self.selected() {
            for b in self.triple.boundaries() {
                if b.surface_gravity().is_some() && (b.location == br.lo || b.location == br.hi) {
                    out.push((i, *b));
                }
            }
        }
        out
    }

    fn sphere_at(&self, idx: usize, x: f64) -> Result<LevelSphere> {
        let n = self.triple.n();
        let j = self.triple.local(x)?;
        let c = curvature_from_jets(n, &j);
        let g = j.grad_norm();
        Ok(LevelSphere {
            x,
            branch: idx,
            radius: j.warp.v,
            area: unit_sphere_area(n - 1) * j.warp.v.powi(n as i32 - 1),
            grad_u: g,
            mean_curvature: if g > 0.0 { level_mean_curvature(n, &j) } else { f64::NAN },
            ric_nn: c.ric_rr,
            on_boundary: false,
        })
    }

    /// The spheres making up `{u = t}`.
    pub fn spheres(&self, t: f64) -> Result<Vec<LevelSphere>> {
        self.check_level(t)?;
        if t == 0.0 {
            let hs: Vec<_> = self
                .adjacent_horizons()
                .iter()
                .map(|(i, b)| self.boundary_sphere(*i, b))
                .collect();
            return if hs.is_empty() {
                Err(Error::MissingBoundary)
            } else {
                Ok(hs)
            };
        }
        let mut out = Vec::new();
        for (i, br) in self.selected() {
            if let Some(x) = self.locate(&br, t)? {
                if out.iter().any(|s: &LevelSphere| s.x == x) {
                    continue;
                }
                out.push(self.sphere_at(i, x)?);
            }
        }
        if out.is_empty() {
            return Err(Error::LevelOutOfRange { t });
        }
        Ok(out)
    }

    pub fn level(&self, t: f64) -> Result<LevelSetData> {
        let spheres = self.spheres(t)?;
        let n = self.triple.n();
        let mut area_g = 0.0;
        let mut conformal = Vec::with_capacity(spheres.len());
        for s in &spheres {
            let c = if s.on_boundary {
                None
            } else {
                to_conformal(self.triple, s.x).ok()
            };
            let q = self.triple.deficit(s.x);
            area_g += s.area * q.powf(-0.5 * (n as f64 - 1.0));
            conformal.push(c);
        }
        Ok(LevelSetData {
            t,
            s: phi_of_u(t),
            area: spheres.iter().map(|s| s.area).sum(),
            area_g: if t == 0.0 { f64::NAN } else { area_g },
            spheres,
            conformal,
        })
    }

    /// `U_p(t) = |1 − t²|^{−(n+p−1)/2} ∫_{u=t} |Du|^p dσ`.
    pub fn up_value(&self, p: f64, t: f64) -> Result<f64> {
        let n = self.triple.n() as f64;
        let spheres = self.spheres(t)?;
        let a = 0.5 * (n + p - 1.0);
        let integral: f64 = spheres.iter().map(|s| s.area * s.grad_u.powf(p)).sum();
        Ok(integral * Self::level_deficit(t).powf(-a))
    }

    /// Level integrals of the three derivative expressions without the
    /// explicit factor `t`.
    fn derivative_over_t(&self, p: f64, t: f64) -> Result<UpDerivative> {
        if !(p >= 3.0) {
            return Err(Error::ExponentOutOfRange { p, range: "p >= 3" });
        }
        let n = self.triple.n() as f64;
        let sig = self.sign();
        let qt = Self::level_deficit(t);
        let a = 0.5 * (n + p - 1.0);
        let c = (n + p - 1.0) / (p - 1.0);
        let (mut s1, mut s2, mut sb) = (0.0, 0.0, 0.0);
        for s in self.spheres(t)? {
            if !(s.grad_u > 0.0) {
                return Err(Error::SingularLevel { t });
            }
            let w = s.grad_u * s.grad_u / qt;
            let weight = s.area * s.grad_u.powf(p - 2.0);
            let h_term = if s.on_boundary {
                // |Du| H/u → −Ric(ν,ν) at a horizon
                -s.ric_nn
            } else {
                s.grad_u * s.mean_curvature / t
            };
            s1 += weight * (sig * h_term + n * p / (p - 1.0) - c * w);
            s2 += weight * ((n - 1.0) - sig * s.ric_nn + c * (1.0 - w));
            sb += weight * (1.0 - w);
        }
        let pref = -sig * (p - 1.0) * qt.powf(-a);
        Ok(UpDerivative {
            formula: pref * s1,
            ricci_form: pref * s2,
            bound: -sig * n * qt.powf(-a) * sb,
        })
    }

    pub fn up_derivative(&self, p: f64, t: f64) -> Result<UpDerivative> {
        let d = self.derivative_over_t(p, t)?;
        Ok(UpDerivative {
            formula: t * d.formula,
            ricci_form: t * d.ricci_form,
            bound: t * d.bound,
        })
    }

    /// Central difference of `U_p`, one-sided at `t = 0` and shrunk so the
    /// stencil never reaches the extremal value.
    pub fn up_derivative_numeric(&self, p: f64, t: f64) -> Result<f64> {
        let mut h = FD_STEP;
        let gap = (1.0 - t).abs();
        if h > 0.25 * gap {
            h = 0.25 * gap;
        }
        let u = |x: f64| self.up_value(p, x);
        if self.triple.lambda_sign() == LambdaSign::Positive && t - h < 0.0 {
            return Ok((-3.0 * u(t)? + 4.0 * u(t + h)? - u(t + 2.0 * h)?) / (2.0 * h));
        }
        Ok((u(t + h)? - u(t - h)?) / (2.0 * h))
    }

    /// `Φ_p(s) = ∫_{φ=s} |∇φ|^p_g dσ_g`.
    pub fn phi_p(&self, p: f64, s: f64) -> Result<f64> {
        let t = u_of_phi(self.triple.lambda_sign(), s);
        let n = self.triple.n() as f64;
        let mut total = 0.0;
        for sp in self.spheres(t)? {
            let c = to_conformal(self.triple, sp.x)?;
            let q = self.triple.deficit(sp.x);
            let area_g = sp.area * q.powf(-0.5 * (n - 1.0));
            total += area_g * c.grad_phi_norm2.powf(0.5 * p);
        }
        Ok(total)
    }

    /// `Φ_p′(s)` from the conformal mean curvature and Laplacian, both taken
    /// from the generic conformal change.
    pub fn phi_p_derivative(&self, p: f64, s: f64) -> Result<f64> {
        let t = u_of_phi(self.triple.lambda_sign(), s);
        let n = self.triple.n() as f64;
        let mut total = 0.0;
        for sp in self.spheres(t)? {
            let c = conformal_tensors(self.triple, sp.x)?;
            let q = c.q;
            let area_g = sp.area * q.powf(-0.5 * (n - 1.0));
            let w = c.grad_phi_norm2.v;
            total += area_g
                * (-(p - 1.0) * w.powf(0.5 * (p - 1.0)) * c.mean_curvature_g
                    + p * w.powf(0.5 * (p - 2.0)) * c.lap_phi);
        }
        Ok(total)
    }

    pub fn up_curve(&self, p: f64, grid: &[f64]) -> Result<UpCurve> {
        let mut values = Vec::with_capacity(grid.len());
        let mut d_analytic = Vec::with_capacity(grid.len());
        let mut d_numeric = Vec::with_capacity(grid.len());
        for &t in grid {
            values.push(self.up_value(p, t)?);
            d_analytic.push(if p >= 3.0 {
                if t == 0.0 {
                    0.0
                } else {
                    self.up_derivative(p, t)?.formula
                }
            } else {
                f64::NAN
            });
            d_numeric.push(self.up_derivative_numeric(p, t)?);
        }
        Ok(UpCurve {
            p,
            grid: grid.to_vec(),
            values,
            d_analytic,
            d_numeric,
        })
    }

    /// `Φ_p` on a grid of `s` with the conformal derivative and central
    /// differences.
    pub fn phi_curve(&self, p: f64, grid: &[f64]) -> Result<UpCurve> {
        let mut values = Vec::with_capacity(grid.len());
        let mut d_analytic = Vec::with_capacity(grid.len());
        let mut d_numeric = Vec::with_capacity(grid.len());
        for &s in grid {
            values.push(self.phi_p(p, s)?);
            d_analytic.push(self.phi_p_derivative(p, s)?);
            let h = FD_STEP.min(0.25 * s);
            d_numeric.push((self.phi_p(p, s + h)? - self.phi_p(p, s - h)?) / (2.0 * h));
        }
        Ok(UpCurve {
            p,
            grid: grid.to_vec(),
            values,
            d_analytic,
            d_numeric,
        })
    }

    pub fn monotonicity_scan(&self, p: f64, grid: &[f64]) -> Result<MonotonicityScan> {
        let values = grid
            .iter()
            .map(|&t| self.up_value(p, t))
            .collect::<Result<Vec<_>>>()?;
        let increments: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
        let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let observed = Trend::of(&increments, scale);
        let expected = match self.triple.lambda_sign() {
            LambdaSign::Positive => Trend::Nonincreasing,
            LambdaSign::Negative => Trend::Nondecreasing,
        };
        let assumptions = AssumptionFlags::of(self.triple);
        let status = if !assumptions.monotonicity() || !(p >= 1.0) {
            Status::Inapplicable
        } else if observed.satisfies(expected) {
            Status::Pass
        } else {
            Status::Fail
        };
        Ok(MonotonicityScan {
            p,
            levels: grid.to_vec(),
            values,
            expected,
            observed,
            assumptions,
            status,
        })
    }

    /// Second derivative at the boundary: the boundary integral and the
    /// limit of interior levels, evaluated independently.
    pub fn up_second_derivative_at_boundary(&self, p: f64) -> Result<BoundarySecondDerivative> {
        if !(p >= 3.0) {
            return Err(Error::ExponentOutOfRange { p, range: "p >= 3" });
        }
        let n = self.triple.n();
        let nf = n as f64;
        let c = (nf + p - 1.0) / (p - 1.0);
        match self.triple.lambda_sign() {
            LambdaSign::Positive => {
                let hz = self.adjacent_horizons();
                if hz.is_empty() {
                    return Err(Error::MissingBoundary);
                }
                let (mut formula, mut bound) = (0.0, 0.0);
                for (_, b) in &hz {
                    let k = b.surface_gravity().expect("horizon");
                    let rb = b.scalar_curvature(n);
                    let w = k.powf(p - 2.0) * b.area(n);
                    formula += w * (0.5 * (rb - (nf - 1.0) * (nf - 2.0)) + c * (1.0 - k * k));
                    bound += w * (1.0 - k * k);
                }
                let g = |t: f64| self.derivative_over_t(p, t).map(|d| d.ricci_form);
                let (t1, t2) = (BOUNDARY_OFFSET, 2.0 * BOUNDARY_OFFSET);
                let limit = extrapolate::to_zero(&[t2, t1], &[g(t2)?, g(t1)?]);
                Ok(BoundarySecondDerivative {
                    formula: -(p - 1.0) * formula,
                    bound: -nf * bound,
                    limit,
                })
            }
            LambdaSign::Negative => {
                let infinity: Vec<_> = self
                    .triple
                    .boundaries()
                    .iter()
                    .filter_map(|b| match b.kind {
                        BoundaryKind::ConformalInfinity { defect_limit } => Some((b, defect_limit)),
                        BoundaryKind::Horizon { .. } => None,
                    })
                    .collect();
                if infinity.is_empty() {
                    return Err(Error::MissingBoundary);
                }
                let (mut formula, mut bound) = (0.0, 0.0);
                for (b, defect) in &infinity {
                    let area_g = b.area(n);
                    let rb = b.scalar_curvature(n);
                    formula += area_g
                        * (((nf - 1.0) * (nf - 2.0) - rb) / (2.0 * (nf - 1.0))
                            + nf * (p + 1.0) / (2.0 * (p - 1.0)) * defect);
                    bound += area_g * defect;
                }
                // V_p′(r)/r = −U_p′(t)(t² − 1)²/t with t = √(1 + 1/r²)
                let g = |r: f64| -> Result<f64> {
                    let t = (1.0 + 1.0 / (r * r)).sqrt();
                    let d = self.derivative_over_t(p, t)?;
                    let q = t * t - 1.0;
                    Ok(-d.formula * q * q)
                };
                let rs = [1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0];
                let ys = rs.iter().map(|&r| g(r)).collect::<Result<Vec<_>>>()?;
                Ok(BoundarySecondDerivative {
                    formula: -(p - 1.0) * formula,
                    bound: -nf * bound,
                    limit: extrapolate::to_zero(&rs, &ys),
                })
            }
        }
    }

    /// Limit of `U_p(t)` as `t` approaches the extremal value, compared with
    /// `|extremum set| · |S^{n−1}|`.
    pub fn liminf_check(&self, p: f64) -> Result<IdentityReport> {
        let n = self.triple.n();
        let name = "liminf_up";
        let reference = "liminf U_p(t) >= |extremum set| |S^{n-1}| as t -> 1";
        if !(0.0..=(n as f64 - 1.0)).contains(&p) {
            return Err(Error::ExponentOutOfRange { p, range: "0 <= p <= n-1" });
        }
        let ext = self.triple.extremum();
        if !ext.is_discrete() {
            return Ok(IdentityReport::refused(name, reference, &Error::NonDiscreteExtremum.to_string()));
        }
        let sig = self.sign();
        let ks: Vec<i32> = (20..=40).collect();
        let hs: Vec<f64> = ks.iter().map(|&k| 2f64.powi(-k)).collect();
        let ys = hs
            .iter()
            .map(|&h| self.up_value(p, 1.0 - sig * h))
            .collect::<Result<Vec<_>>>()?;
        let m = ys.len();
        let limit = extrapolate::to_zero(&hs[m - 2..], &ys[m - 2..]);
        let expected = ext.count as f64 * unit_sphere_area(n - 1);
        let flags = AssumptionFlags::of(self.triple);
        Ok(IdentityReport::inequality(name, reference, limit, expected, Relation::AtLeast, 1e-6)
            .requiring(&[("normalized", flags.normalized), ("monotonicity_hypotheses", flags.monotonicity())]))
    }
}

pub fn up_value(triple: &StaticTriple, p: f64, t: f64) -> Result<f64> {
    Foliation::new(triple).up_value(p, t)
}

pub fn up_derivative(triple: &StaticTriple, p: f64, t: f64) -> Result<UpDerivative> {
    Foliation::new(triple).up_derivative(p, t)
}

pub fn up_second_derivative_at_boundary(triple: &StaticTriple, p: f64) -> Result<BoundarySecondDerivative> {
    Foliation::new(triple).up_second_derivative_at_boundary(p)
}

pub fn phi_p(triple: &StaticTriple, p: f64, s: f64) -> Result<f64> {
    Foliation::new(triple).phi_p(p, s)
}

pub fn phi_p_derivative(triple: &StaticTriple, p: f64, s: f64) -> Result<f64> {
    Foliation::new(triple).phi_p_derivative(p, s)
}

pub fn monotonicity_scan(triple: &StaticTriple, p: f64, grid: &[f64]) -> Result<MonotonicityScan> {
    Foliation::new(triple).monotonicity_scan(p, grid)
}

pub fn liminf_check(triple: &StaticTriple, p: f64) -> Result<IdentityReport> {
    Foliation::new(triple).liminf_check(p)
}

/// `V_p(r) = U_p(√(1 + 1/r²))`, the Λ<0 quantity in the defining function.
pub fn v_value(triple: &StaticTriple, p: f64, r: f64) -> Result<f64> {
    up_value(triple, p, (1.0 + 1.0 / (r * r)).sqrt())
}

/// Evenly spaced levels on `[t0, t1]`.
pub fn uniform_grid(t0: f64, t1: f64, steps: usize) -> Vec<f64> {
    if steps == 0 {
        return vec![t0];
    }
    (0..=steps)
        .map(|i| t0 + (t1 - t0) * i as f64 / steps as f64)
        .collect()
}
