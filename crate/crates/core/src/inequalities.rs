//! Sharp geometric inequalities, their equality cases, and the
//! overdetermined level-set condition.
//!
//! Every check evaluates both sides whatever the hypotheses; the verdict is
//! gated through [`IdentityReport::requiring`], so a triple outside the
//! theorem's hypotheses is reported as inapplicable, never as a failure.

use serde::Serialize;

use crate::assumptions::AssumptionFlags;
use crate::error::{Error, Result};
use crate::geometry::{curvature_from_jets, unit_sphere_area, BoundaryComponent, BoundaryKind, LambdaSign, StaticTriple};
use crate::levelset::Foliation;
use crate::numerics::quad::{integrate, QuadratureConfig};
use crate::numerics::roots::bisect;
use crate::report::{IdentityReport, Relation, Status};

/// Tolerance of the sharp (closed-form) inequalities.
pub const SHARP_TOLERANCE: f64 = 1e-9;
/// `1 − u² − |Du|² ≥ −GRADIENT_SLACK` counts as satisfied.
pub const GRADIENT_SLACK: f64 = 1e-10;
const SAMPLES: usize = 200;

const NON_DISCRETE: &str = "non-discrete extremum set";

fn horizons(triple: &StaticTriple) -> Vec<(BoundaryComponent, f64)> {
    triple.horizons().map(|(b, k)| (*b, k)).collect()
}

fn conformal_boundary(triple: &StaticTriple) -> Vec<BoundaryComponent> {
    triple
        .boundaries()
        .iter()
        .filter(|b| matches!(b.kind, BoundaryKind::ConformalInfinity { .. }))
        .copied()
        .collect()
}

/// The hypotheses of the monotonicity theorem, by name.
fn core_hypotheses(flags: &AssumptionFlags) -> Vec<(&'static str, bool)> {
    let mut v = vec![("normalized", flags.normalized)];
    if let Some(b) = flags.surface_gravity_at_most_one {
        v.push(("surface_gravity_at_most_one", b));
    }
    if let Some(b) = flags.conformally_compact {
        v.push(("conformally_compact", b));
    }
    v
}

/// `|MAX(u)| |S^{n−1}|` (or `|MIN(u)|` when Λ<0), or `None` for a
/// non-discrete extremum set.
fn extremal_mass(triple: &StaticTriple) -> Option<f64> {
    let e = triple.extremum();
    e.is_discrete()
        .then(|| e.count as f64 * unit_sphere_area(triple.n() - 1))
}

/// A sharp inequality `lhs ≤ rhs` whose left side needs a discrete extremum set.
fn extremal_inequality(
    triple: &StaticTriple,
    name: &str,
    reference: &str,
    rhs: f64,
    extra: &[(&'static str, bool)],
) -> IdentityReport {
    let flags = AssumptionFlags::of(triple);
    let mut req = core_hypotheses(&flags);
    req.push(("discrete_extremum", flags.discrete_extremum));
    req.extend_from_slice(extra);
    match extremal_mass(triple) {
        Some(lhs) => {
            IdentityReport::inequality(name, reference, lhs, rhs, Relation::AtMost, SHARP_TOLERANCE)
                .requiring(&req)
        }
        None => {
            let mut r = IdentityReport::refused(name, reference, NON_DISCRETE).requiring(&req);
            r.rhs = rhs;
            r.relation = Relation::AtMost;
            r
        }
    }
}

/// Minimum over sample points of `|1 − u²| − |Du|²`, asserted nonnegative.
pub fn gradient_bound(triple: &StaticTriple) -> Result<IdentityReport> {
    let mut worst = f64::INFINITY;
    for x in triple.sample_points(SAMPLES) {
        let j = triple.local(x)?;
        let gap = triple.deficit(x) - j.grad_norm().powi(2);
        worst = worst.min(gap);
    }
    let reference = match triple.lambda_sign() {
        LambdaSign::Positive => "gradient bound |Du|² ≤ 1 − u² in M",
        LambdaSign::Negative => "gradient bound |Du|² ≤ u² − 1 in M",
    };
    let flags = AssumptionFlags::of(triple);
    Ok(
        IdentityReport::inequality("gradient_bound", reference, worst, 0.0, Relation::AtLeast, GRADIENT_SLACK)
            .requiring(&core_hypotheses(&flags)),
    )
}

/// `|MAX(u)| |S^{n−1}| ≤ |∂M|`, or `|MIN(u)| |S^{n−1}| ≤ |∂M|_g` when Λ<0.
pub fn area_bound(triple: &StaticTriple) -> Result<IdentityReport> {
    let n = triple.n();
    let (rhs, reference) = match triple.lambda_sign() {
        LambdaSign::Positive => (
            horizons(triple).iter().map(|(b, _)| b.area(n)).sum::<f64>(),
            "area bound |MAX(u)||S^{n−1}| ≤ |∂M|",
        ),
        LambdaSign::Negative => (
            conformal_boundary(triple).iter().map(|b| b.area(n)).sum::<f64>(),
            "area bound |MIN(u)||S^{n−1}| ≤ |∂M|_g on the conformal boundary",
        ),
    };
    if rhs == 0.0 {
        return Err(Error::MissingBoundary);
    }
    Ok(extremal_inequality(triple, "area_bound", reference, rhs, &[]))
}

/// Willmore-type bound with exponent `n − 1` on the round boundary spheres.
pub fn willmore_bound(triple: &StaticTriple) -> Result<IdentityReport> {
    let n = triple.n();
    let nf = n as f64;
    let e = (n - 1) as i32;
    match triple.lambda_sign() {
        LambdaSign::Positive => {
            let hs = horizons(triple);
            if hs.is_empty() {
                return Err(Error::MissingBoundary);
            }
            let rhs = hs
                .iter()
                .map(|(b, _)| ((b.scalar_curvature(n) - nf * (nf - 3.0)) / 2.0).abs().powi(e) * b.area(n))
                .sum();
            Ok(extremal_inequality(
                triple,
                "willmore_bound",
                "Willmore-type bound |MAX(u)||S^{n−1}| ≤ ∫ |(R^∂M − n(n−3))/2|^{n−1}",
                rhs,
                &[],
            ))
        }
        LambdaSign::Negative => {
            let bs = conformal_boundary(triple);
            if bs.is_empty() {
                return Err(Error::MissingBoundary);
            }
            let rhs = bs
                .iter()
                .map(|b| {
                    ((b.scalar_curvature(n) - (nf + 1.0) * (nf - 2.0)) / (2.0 * (nf - 2.0)))
                        .abs()
                        .powi(e)
                        * b.area(n)
                })
                .sum();
            let flags = AssumptionFlags::of(triple);
            Ok(extremal_inequality(
                triple,
                "willmore_bound",
                "Willmore-type bound |MIN(u)||S^{n−1}| ≤ ∫ |(R_g^∂M − (n+1)(n−2))/(2(n−2))|^{n−1} dσ_g",
                rhs,
                &[(
                    "vanishing_boundary_defect",
                    flags.vanishing_boundary_defect.unwrap_or(false),
                )],
            ))
        }
    }
}

/// `|MAX(u)| |S^{n−1}| ≤ ∫_{∂M} R^∂M/((n−1)(n−2)) dσ`; there is no Λ<0 analogue.
pub fn scalar_average_bound(triple: &StaticTriple) -> Result<IdentityReport> {
    let name = "scalar_average_bound";
    let reference = "|MAX(u)||S^{n−1}| ≤ ∫ R^∂M/((n−1)(n−2)) over the boundary";
    if triple.lambda_sign() == LambdaSign::Negative {
        return Ok(IdentityReport::refused(name, reference, "no counterpart when Λ<0"));
    }
    let n = triple.n();
    let k = ((n - 1) * (n - 2)) as f64;
    let hs = horizons(triple);
    if hs.is_empty() {
        return Err(Error::MissingBoundary);
    }
    let rhs = hs.iter().map(|(b, _)| b.scalar_curvature(n) / k * b.area(n)).sum();
    Ok(extremal_inequality(triple, name, reference, rhs, &[]))
}

/// `‖Du/√|1−u²|‖_{L^p} ≤ √‖±H|D log u| + n‖_{L^{p/2}}` on `{u = t}`
/// (`+` when Λ>0, `−` when Λ<0).
pub fn lp_gradient_bound(triple: &StaticTriple, p: f64, t: f64) -> Result<IdentityReport> {
    if !(p >= 3.0) {
        return Err(Error::ExponentOutOfRange { p, range: "[3, ∞)" });
    }
    let sig = triple.lambda_sign().sign();
    let q = ((1.0 - t) * (1.0 + t)).abs();
    let (mut left, mut right) = (0.0, 0.0);
    for s in Foliation::new(triple).spheres(t)? {
        if !(s.grad_u > 0.0) {
            return Err(Error::SingularLevel { t });
        }
        left += s.area * (s.grad_u / q.sqrt()).powf(p);
        right += s.area * (sig * s.mean_curvature * s.grad_u / t + triple.n() as f64).abs().powf(0.5 * p);
    }
    let lhs = left.powf(1.0 / p);
    let rhs = right.powf(1.0 / p);
    let reference = match triple.lambda_sign() {
        LambdaSign::Positive => "sharp L^p bound ‖Du/√(1−u²)‖_p ≤ √‖H|D log u| + n‖_{p/2} on a level set",
        LambdaSign::Negative => "sharp L^p bound ‖Du/√(u²−1)‖_p ≤ √‖−H|D log u| + n‖_{p/2} on a level set",
    };
    let flags = AssumptionFlags::of(triple);
    Ok(
        IdentityReport::inequality("lp_gradient_bound", reference, lhs, rhs, Relation::AtMost, SHARP_TOLERANCE)
            .requiring(&core_hypotheses(&flags)),
    )
}

/// Largest deviation from `∂(1/|Du|)/∂ν = t/(1−t²)` (Λ>0) or
/// `−t/(t²−1)` (Λ<0) over the spheres of `{u = t}`.
///
/// The statement is an implication: the condition forces the model solution.
/// The check fails only if the condition holds on a triple that is not a
/// model; when it does not hold nothing is concluded.
pub fn overdetermined_condition(triple: &StaticTriple, t: f64) -> Result<IdentityReport> {
    let n = triple.n();
    let target = t / (1.0 - t * t);
    let mut worst: f64 = 0.0;
    for s in Foliation::new(triple).spheres(t)? {
        if !(s.grad_u > 0.0) {
            return Err(Error::SingularLevel { t });
        }
        let j = triple.local(s.x)?;
        let hess_nn = curvature_from_jets(n, &j).hess_u_rr;
        let normal_derivative = -hess_nn / (s.grad_u * s.grad_u);
        worst = worst.max((normal_derivative - target).abs());
    }
    let reference = match triple.lambda_sign() {
        LambdaSign::Positive => "overdetermined condition ∂(1/|Du|)/∂ν = t/(1−t²) on a level set",
        LambdaSign::Negative => "overdetermined condition ∂(1/|Du|)/∂ν = −t/(t²−1) on a level set",
    };
    let mut r = IdentityReport::equality("overdetermined_condition", reference, worst, 0.0, SHARP_TOLERANCE);
    if !r.equality {
        r = r.with_note("condition does not hold on this level; no rigidity conclusion");
        r.status = Status::Pass;
    } else if !triple.is_rigid_model() {
        r = r.with_note("condition holds on a triple that is not a model solution");
        r.status = Status::Fail;
    }
    let flags = AssumptionFlags::of(triple);
    Ok(r.requiring(&core_hypotheses(&flags)))
}

/// `2|MAX(u)| ≤ Σ k_i χ(Σ_i)` for `n = 3`, Λ>0.
pub fn n3_uniqueness_inequality(triple: &StaticTriple) -> Result<IdentityReport> {
    if triple.n() != 3 || triple.lambda_sign() != LambdaSign::Positive {
        return Err(Error::InvalidParameter(
            "the uniqueness inequality needs n = 3 and Λ > 0".into(),
        ));
    }
    let hs = horizons(triple);
    if hs.is_empty() {
        return Err(Error::MissingBoundary);
    }
    let rhs: f64 = hs.iter().map(|(b, k)| k * b.euler_characteristic as f64).sum();
    let name = "n3_uniqueness_inequality";
    let reference = "2|MAX(u)| ≤ Σ k_i χ(Σ_i) over the boundary components";
    let flags = AssumptionFlags::of(triple);
    let mut req = core_hypotheses(&flags);
    req.push(("discrete_extremum", flags.discrete_extremum));
    let e = triple.extremum();
    if !e.is_discrete() {
        let mut r = IdentityReport::refused(name, reference, NON_DISCRETE).requiring(&req);
        r.rhs = rhs;
        return Ok(r);
    }
    let lhs = 2.0 * e.count as f64;
    let mut r = IdentityReport::inequality(name, reference, lhs, rhs, Relation::AtMost, SHARP_TOLERANCE);
    if r.equality && hs.len() > 1 {
        r = r.with_note("equality with a disconnected boundary");
        r.status = Status::Fail;
    }
    Ok(r.requiring(&req))
}

/// Admissible exponents: `[0, 1]` when `n = 3`, `[0, n − 1]` otherwise.
fn mon_glob_range(n: usize) -> (f64, &'static str) {
    if n == 3 {
        (1.0, "[0, 1] for n = 3")
    } else {
        ((n - 1) as f64, "[0, n−1]")
    }
}

/// Λ>0: `|MAX(u)||S^{n−1}| ≤ ∫_{∂M}|Du|^p ≤ |∂M|`.
/// Λ<0: `|MIN(u)||S^{n−1}| ≤ lim U_1 ≤ |∂M|_g`, the limit read off at a large level.
///
/// `lhs` and `rhs` are the outer terms; the middle one is in the note. The
/// check passes when both links hold.
pub fn mon_glob_bound(triple: &StaticTriple, p: f64) -> Result<IdentityReport> {
    let n = triple.n();
    let (max_p, range) = mon_glob_range(n);
    if !(0.0..=max_p).contains(&p) {
        return Err(Error::ExponentOutOfRange { p, range });
    }
    let (middle, outer, reference) = match triple.lambda_sign() {
        LambdaSign::Positive => {
            let hs = horizons(triple);
            if hs.is_empty() {
                return Err(Error::MissingBoundary);
            }
            (
                hs.iter().map(|(b, k)| k.powf(p) * b.area(n)).sum::<f64>(),
                hs.iter().map(|(b, _)| b.area(n)).sum::<f64>(),
                "|MAX(u)||S^{n−1}| ≤ ∫_∂M |Du|^p ≤ |∂M|",
            )
        }
        LambdaSign::Negative => {
            let bs = conformal_boundary(triple);
            if bs.is_empty() {
                return Err(Error::MissingBoundary);
            }
            (
                Foliation::new(triple).up_value(1.0, LARGE_LEVEL)?,
                bs.iter().map(|b| b.area(n)).sum::<f64>(),
                "|MIN(u)||S^{n−1}| ≤ lim U_1 ≤ |∂M|_g",
            )
        }
    };
    let base = extremal_inequality(triple, "mon_glob_bound", reference, outer, &[]);
    let Some(lhs) = extremal_mass(triple) else {
        return Ok(base.with_note(format!("{NON_DISCRETE}; middle term {middle:.12e}")));
    };
    let first = IdentityReport::inequality("", "", lhs, middle, Relation::AtMost, SHARP_TOLERANCE);
    let second = IdentityReport::inequality("", "", middle, outer, Relation::AtMost, SHARP_TOLERANCE);
    let mut r = base.with_note(format!("middle term {middle:.12e}"));
    if r.status != Status::Inapplicable {
        r.status = if first.passed() && second.passed() {
            Status::Pass
        } else {
            Status::Fail
        };
    }
    Ok(r)
}

/// Level at which `lim_{t→∞} U_1` is read off when Λ<0.
const LARGE_LEVEL: f64 = 1e6;

/// Quadratic behaviour of `u` at an isolated extremum: `u = a + b d² + c d⁴`
/// fitted along a geodesic ray, plus the tangential Hessian eigenvalue
/// `h′u′/h` extrapolated to the centre.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtremumExpansion {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// `∓2b`: squared Hessian eigenvalue along the ray.
    pub lambda2_radial: f64,
    /// Squared Hessian eigenvalue tangent to the geodesic spheres.
    pub lambda2_tangential: f64,
    /// `λ²_radial + (n − 1) λ²_tangential`.
    pub sum: f64,
}

/// Geodesic distance from the extremum over which the fit is taken.
pub const FIT_RANGE: (f64, f64) = (0.01, 0.1);
const FIT_POINTS: usize = 21;

/// Fits the expansion of `u` at a point extremum.
pub fn extremum_expansion(triple: &StaticTriple) -> Result<ExtremumExpansion> {
    let e = *triple.extremum();
    if !e.is_discrete() {
        return Err(Error::NonDiscreteExtremum);
    }
    let (lo, hi) = triple.domain();
    let dir = if e.location <= lo { 1.0 } else { -1.0 };
    let cfg = QuadratureConfig::default();
    let distance = |x: f64| -> f64 {
        integrate(
            |y| triple.local(y).map(|j| j.drho_dx).unwrap_or(f64::NAN),
            e.location.min(x),
            e.location.max(x),
            &cfg,
        )
        .map(|r| r.value)
        .unwrap_or(f64::NAN)
    };
    let reach = if hi.is_finite() { (hi - lo) * 0.5 } else { 1.0 };
    let point_at = |d: f64| bisect(|x| distance(x) - d, e.location, e.location + dir * reach);

    let n = triple.n();
    let sig = triple.lambda_sign().sign();
    let mut ds = Vec::with_capacity(FIT_POINTS);
    let mut us = Vec::with_capacity(FIT_POINTS);
    let mut tangential = Vec::with_capacity(FIT_POINTS);
    for k in 0..FIT_POINTS {
        let d = FIT_RANGE.0 + (FIT_RANGE.1 - FIT_RANGE.0) * k as f64 / (FIT_POINTS - 1) as f64;
        let x = point_at(d)?;
        let j = triple.local(x)?;
        ds.push(d);
        us.push(j.potential.v);
        tangential.push(-sig * j.warp.d1 * j.potential.d1 / j.warp.v);
    }
    let [a, b, c] = least_squares_even_quartic(&ds, &us);
    // h′u′/h = ∓λ² + O(d²); extrapolate in d²
    let d2: Vec<f64> = ds.iter().map(|d| d * d).collect();
    let [t0, _, _] = least_squares_poly2(&d2, &tangential);
    let lambda2_radial = -2.0 * sig * b;
    Ok(ExtremumExpansion {
        a,
        b,
        c,
        lambda2_radial,
        lambda2_tangential: t0,
        sum: lambda2_radial + (n - 1) as f64 * t0,
    })
}

/// `Σ λ_α² = n` at a point extremum.
pub fn expansion_constraint(triple: &StaticTriple) -> Result<IdentityReport> {
    let reference = "Hessian eigenvalues at a point extremum satisfy Σ λ_α² = n";
    match extremum_expansion(triple) {
        Ok(e) => Ok(IdentityReport::equality(
            "expansion_constraint",
            reference,
            e.sum,
            triple.n() as f64,
            1e-4,
        )),
        Err(Error::NonDiscreteExtremum) => Ok(IdentityReport::refused("expansion_constraint", reference, NON_DISCRETE)),
        Err(err) => Err(err),
    }
}

fn least_squares_even_quartic(ds: &[f64], ys: &[f64]) -> [f64; 3] {
    let xs: Vec<f64> = ds.iter().map(|d| d * d).collect();
    least_squares_poly2(&xs, ys)
}

/// Coefficients of `c0 + c1 x + c2 x²` minimizing the squared error.
fn least_squares_poly2(xs: &[f64], ys: &[f64]) -> [f64; 3] {
    // centre and scale x for conditioning
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    let s = xs.iter().map(|x| (x - m).abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut ata = [[0.0; 3]; 3];
    let mut aty = [0.0; 3];
    for (&x, &y) in xs.iter().zip(ys) {
        let z = (x - m) / s;
        let row = [1.0, z, z * z];
        for i in 0..3 {
            aty[i] += row[i] * y;
            for k in 0..3 {
                ata[i][k] += row[i] * row[k];
            }
        }
    }
    let [e0, e1, e2] = solve3(ata, aty);
    // back to powers of x
    let c2 = e2 / (s * s);
    let c1 = e1 / s - 2.0 * m * c2;
    let c0 = e0 - e1 * m / s + e2 * m * m / (s * s);
    [c0, c1, c2]
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn solve3(a: [[f64; 3]; 3], y: [f64; 3]) -> [f64; 3] {
    let d = det3(&a);
    let mut out = [0.0; 3];
    for (col, o) in out.iter_mut().enumerate() {
        let mut m = a;
        for row in 0..3 {
            m[row][col] = y[row];
        }
        *o = det3(&m) / d;
    }
    out
}
