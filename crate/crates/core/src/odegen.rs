//! Rotationally symmetric static solutions generated by shooting the reduced
//! ODE system from horizon data.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{
    static_residual, BoundaryComponent, Branch, Chart, Extremum, ExtremumShape, LambdaSign, ModelKind,
    RadialProfile, StaticTriple, TripleParts,
};
use crate::models::{de_sitter, nariai, schwarzschild_de_sitter, SdsParams};
use crate::numerics::hermite::QuinticHermite;
use crate::numerics::ode::{integrate, Control, OdeConfig};
use crate::numerics::roots::bisect;

/// Horizon data: `u = 0`, `|Du| = kappa` on a round sphere of radius `h0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HorizonData {
    pub n: usize,
    pub lambda_sign: LambdaSign,
    pub h0: f64,
    /// Unnormalized `u′(0)`.
    pub kappa: f64,
}

impl HorizonData {
    pub fn new(n: usize, lambda_sign: LambdaSign, h0: f64, kappa: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!("dimension n = {n} < 3")));
        }
        if !(h0 > 0.0 && h0.is_finite()) {
            return Err(Error::InvalidParameter(format!("horizon radius h0 = {h0} must be positive")));
        }
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!("surface gravity {kappa} must be positive")));
        }
        Ok(Self {
            n,
            lambda_sign,
            h0,
            kappa,
        })
    }
}

/// The static system for `g₀ = dρ² + h(ρ)² g_S`, state `(h, h′, u, u′)`:
///
/// `h h″ = −(n−2)(h′² − 1) − h h′ u′/u − c h²`,
/// `u″ = −(n−1) u h″/h − c u`,
///
/// with `c = 2Λ/(n−1) = ±n`; `Δu + c u = 0` is carried as a monitor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedSystem {
    pub n: usize,
    pub lambda_sign: LambdaSign,
    pub c: f64,
}

pub fn reduce_system(n: usize, lambda_sign: LambdaSign) -> ReducedSystem {
    ReducedSystem {
        n,
        lambda_sign,
        c: lambda_sign.static_coefficient(n),
    }
}

impl ReducedSystem {
    pub fn rhs(&self, y: &[f64; 4]) -> [f64; 4] {
        let [h, dh, u, du] = *y;
        let k = (self.n - 1) as f64;
        let d2h = (-(k - 1.0) * (dh * dh - 1.0) - h * dh * du / u - self.c * h * h) / h;
        let d2u = -k * u * d2h / h - self.c * u;
        [dh, d2h, du, d2u]
    }

    /// `Δu + c u`.
    pub fn laplace_monitor(&self, y: &[f64; 4]) -> f64 {
        let [h, dh, u, du] = *y;
        let d2u = self.rhs(y)[3];
        d2u + (self.n - 1) as f64 * dh * du / h + self.c * u
    }

    /// Second-order coefficients at a horizon: `h ≈ h0 + h2 ρ²`, `u ≈ κρ + u3 ρ³`.
    pub fn horizon_series(&self, h0: f64, kappa: f64) -> (f64, f64) {
        let k = (self.n - 1) as f64;
        let h2 = ((k - 1.0) - self.c * h0 * h0) / (4.0 * h0);
        let u3 = -kappa * (2.0 * k * h2 / h0 + self.c) / 6.0;
        (h2, u3)
    }
}

impl fmt::Display for ReducedSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "state (h, h', u, u') in arclength rho, n = {}, c = {}", self.n, self.c)?;
        writeln!(f, "h'' = [-(n-2)(h'^2 - 1) - h h' u'/u - c h^2] / h")?;
        writeln!(f, "u'' = -(n-1) u h''/h - c u")?;
        write!(f, "monitor: u'' + (n-1) h' u'/h + c u = 0")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootConfig {
    pub ode: OdeConfig,
    /// The series start hands off at `ρ = handoff · h0`.
    pub handoff: f64,
    /// The far end is closed by a series once its distance drops below
    /// `closing · max(h0, h)`.
    pub closing: f64,
    /// Arclength budget.
    pub max_length: f64,
}

impl Default for ShootConfig {
    fn default() -> Self {
        Self {
            ode: OdeConfig {
                h_max: 5e-3,
                ..OdeConfig::default()
            },
            handoff: 1e-3,
            closing: 3e-3,
            max_length: 50.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// `u` returned to zero on a second horizon.
    Horizon,
    /// The orbit spheres shrank to a regular centre.
    Centre,
}

/// A generated solution with its diagnostics.
#[derive(Debug, Clone)]
pub struct Shot {
    pub data: HorizonData,
    pub triple: StaticTriple,
    pub stop: StopReason,
    pub length: f64,
    /// Largest `|Δu + c u|` along accepted steps (unnormalized `u`).
    pub monitor_max: f64,
    /// `max u` before normalization.
    pub u_max: f64,
    pub steps: usize,
}

type Node = (f64, [f64; 4], [f64; 4]);

/// Shoots from a horizon, stopping at a second horizon or a regular centre.
pub fn shoot_from_horizon(data: HorizonData, config: &ShootConfig) -> Result<Shot> {
    if data.lambda_sign != LambdaSign::Positive {
        return Err(Error::InvalidParameter(
            "shooting is implemented for Λ > 0 only".into(),
        ));
    }
    let sys = reduce_system(data.n, data.lambda_sign);
    let (h2, u3) = sys.horizon_series(data.h0, data.kappa);
    let r0 = config.handoff * data.h0;
    let start = [
        data.h0 + h2 * r0 * r0,
        2.0 * h2 * r0,
        data.kappa * r0 + u3 * r0.powi(3),
        data.kappa + 3.0 * u3 * r0 * r0,
    ];
    let mut nodes: Vec<Node> = vec![
        (0.0, [data.h0, 0.0, 0.0, data.kappa], [0.0, 2.0 * h2, data.kappa, 0.0]),
        (r0, start, sys.rhs(&start)),
    ];
    let mut monitor_max = sys.laplace_monitor(&start).abs();
    let mut stop = None;
    let outcome = integrate(
        |_, y| sys.rhs(y),
        r0,
        start,
        config.max_length,
        &config.ode,
        |t, y, dy| {
            let [h, dh, u, du] = *y;
            // a step that jumped over the closing window: close from the previous node
            if !(u > 0.0) {
                stop = Some(StopReason::Horizon);
                return Control::Stop;
            }
            if !(h > 0.0) {
                stop = Some(StopReason::Centre);
                return Control::Stop;
            }
            nodes.push((t, *y, *dy));
            monitor_max = monitor_max.max(sys.laplace_monitor(y).abs());
            if du < 0.0 && u < config.closing * h.max(data.h0) * du.abs() {
                stop = Some(StopReason::Horizon);
                Control::Stop
            } else if dh < 0.0 && h < config.closing * data.h0 * dh.abs() {
                stop = Some(StopReason::Centre);
                Control::Stop
            } else {
                Control::Continue
            }
        },
    )?;
    let Some(stop) = stop else {
        return Err(Error::InvalidParameter(format!(
            "no stop condition reached before ρ = {:.6}",
            outcome.t
        )));
    };
    let last = *nodes.last().expect("at least the start nodes");
    let end = match stop {
        StopReason::Horizon => far_horizon(&sys, last),
        StopReason::Centre => regular_centre(&sys, last),
    };
    nodes.push(end);
    assemble(data, &sys, nodes, stop, monitor_max, outcome.steps)
}

/// Closes the orbit at a horizon `δ` beyond the last node, solving the
/// horizon series backwards for `(δ, κ, h0)`.
fn far_horizon(sys: &ReducedSystem, (t, y, _): Node) -> Node {
    let [h, _, u, du] = y;
    let (mut kappa, mut radius, mut delta) = (du.abs(), h, u / du.abs());
    for _ in 0..20 {
        let (h2, u3) = sys.horizon_series(radius, kappa);
        // u = κδ + u3 δ³, |u′| = κ + 3 u3 δ², h = h0 + h2 δ²
        delta = u / (kappa + u3 * delta * delta);
        kappa = du.abs() - 3.0 * u3 * delta * delta;
        radius = h - h2 * delta * delta;
    }
    let (h2, _) = sys.horizon_series(radius, kappa);
    (t + delta, [radius, 0.0, 0.0, -kappa], [0.0, 2.0 * h2, -kappa, 0.0])
}

/// Closes the orbit at a regular centre `δ ≈ h/|h′|` beyond the last node.
fn regular_centre(sys: &ReducedSystem, (t, y, dy): Node) -> Node {
    let [h, dh, u, du] = y;
    let delta = h / dh.abs();
    let d2u = dy[3];
    let u_c = u + du * delta + 0.5 * d2u * delta * delta;
    // Δu = n u″ at a centre
    let d2u_c = -sys.c * u_c / sys.n as f64;
    (t + delta, [0.0, -1.0, u_c, 0.0], [-1.0, 0.0, 0.0, d2u_c])
}

fn assemble(
    data: HorizonData,
    sys: &ReducedSystem,
    nodes: Vec<Node>,
    stop: StopReason,
    monitor_max: f64,
    steps: usize,
) -> Result<Shot> {
    let n = data.n;
    let length = nodes.last().expect("non-empty").0;
    let u_table = QuinticHermite::new(nodes.iter().map(|(t, y, dy)| (*t, [y[2], y[3], dy[3]])).collect());
    let raw_u = RadialProfile::sampled(u_table.clone());
    // the maximum of u: sign change of u′ between nodes
    let i = nodes
        .windows(2)
        .position(|w| w[0].1[3] > 0.0 && w[1].1[3] <= 0.0)
        .ok_or(Error::InvalidParameter("u has no interior maximum".into()))?;
    let x_max = match stop {
        StopReason::Centre => length,
        StopReason::Horizon => bisect(|x| raw_u.eval(x).d1, nodes[i].0, nodes[i + 1].0)?,
    };
    let u_max = raw_u.value(x_max);
    let scaled: Vec<(f64, [f64; 3])> = nodes
        .iter()
        .map(|(t, y, dy)| (*t, [y[2] / u_max, y[3] / u_max, dy[3] / u_max]))
        .collect();
    let h_table = QuinticHermite::new(nodes.iter().map(|(t, y, dy)| (*t, [y[0], y[1], dy[1]])).collect());
    let radial = RadialProfile::sampled(h_table);
    let h_at = |x: f64| radial.value(x);
    let mut boundaries = vec![BoundaryComponent::horizon(n, 0.0, data.h0, data.kappa / u_max)];
    let (extremum, branches) = match stop {
        StopReason::Horizon => {
            let kappa_far = -nodes.last().expect("non-empty").1[3];
            boundaries.push(BoundaryComponent::horizon(n, length, h_at(length), kappa_far / u_max));
            (
                Extremum {
                    location: x_max,
                    shape: ExtremumShape::Sphere { radius: h_at(x_max) },
                    count: 1,
                },
                vec![
                    Branch {
                        lo: 0.0,
                        hi: x_max,
                        increasing: true,
                    },
                    Branch {
                        lo: x_max,
                        hi: length,
                        increasing: false,
                    },
                ],
            )
        }
        StopReason::Centre => (
            Extremum {
                location: length,
                shape: ExtremumShape::Point,
                count: 1,
            },
            vec![Branch {
                lo: 0.0,
                hi: length,
                increasing: true,
            }],
        ),
    };
    let triple = StaticTriple::from_parts(TripleParts {
        n,
        lambda_sign: sys.lambda_sign,
        chart: Chart::Arclength,
        model: ModelKind::Shot,
        potential: RadialProfile::sampled(QuinticHermite::new(scaled)),
        radial,
        deficit: None,
        boundaries,
        extremum,
        normalization_factor: u_max,
        branches,
    })?;
    Ok(Shot {
        data,
        triple,
        stop,
        length,
        monitor_max,
        u_max,
        steps,
    })
}

/// Sup-norm distances between a shot and a reference triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileDeviation {
    /// `sup |u_shot(ρ) − u_ref(r = h_shot(ρ))|` on the normalized potentials.
    pub potential: f64,
    /// `sup |h_shot(ρ) − h_ref(ρ)|` against the reference in arclength.
    pub warp: f64,
    /// Largest static residual of the shot at the sample points.
    pub static_residual: f64,
}

const COMPARE_POINTS: usize = 400;

/// Compares a shot with a reference given in the areal chart, matching
/// points through the sphere radius (the reference potential is a function
/// of `r` on each branch) and through arclength.
pub fn compare_with(shot: &Shot, reference: &StaticTriple) -> Result<ProfileDeviation> {
    let t = &shot.triple;
    let len = shot.length;
    let reference_arc = crate::geometry::to_arclength(reference, 4000)?;
    // the reference may start from the other end of its domain
    let (ref_lo, ref_hi) = reference_arc.domain();
    let ref_len = ref_hi - ref_lo;
    let flipped = (reference_arc.radial().value(ref_lo) - shot.data.h0).abs()
        > (reference_arc.radial().value(ref_hi) - shot.data.h0).abs();
    let mut dev = ProfileDeviation {
        potential: 0.0,
        warp: 0.0,
        static_residual: 0.0,
    };
    for k in 1..COMPARE_POINTS {
        let x = len * k as f64 / COMPARE_POINTS as f64;
        let y = if flipped { ref_hi - x } else { ref_lo + x };
        if y < ref_lo || y > ref_hi || x > ref_len {
            continue;
        }
        dev.potential = dev
            .potential
            .max((t.potential_value(x) - reference_arc.potential_value(y)).abs());
        dev.warp = dev.warp.max((t.radial().value(x) - reference_arc.radial().value(y)).abs());
        if let Ok(r) = static_residual(t, x) {
            dev.static_residual = dev.static_residual.max(r.max());
        }
    }
    Ok(dev)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "family")]
pub enum Family {
    DeSitter,
    Nariai,
    SchwarzschildDeSitter { mass: f64 },
}

/// Outcome of matching one shot against the known families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BirkhoffMatch {
    pub h0: f64,
    pub kappa: f64,
    pub family: Family,
    pub deviation: f64,
    pub monitor_max: f64,
}

/// The family a horizon of radius `h0` belongs to for Λ>0:
/// `f(h0) = 0` fixes `m = h0^{n−2}(1 − h0²)/2`.
pub fn expected_family(n: usize, h0: f64) -> Family {
    let nariai_radius = ((n as f64 - 2.0) / n as f64).sqrt();
    if (h0 - 1.0).abs() < 1e-12 {
        Family::DeSitter
    } else if (h0 - nariai_radius).abs() < 1e-12 {
        Family::Nariai
    } else {
        Family::SchwarzschildDeSitter {
            mass: 0.5 * h0.powi(n as i32 - 2) * (1.0 - h0 * h0),
        }
    }
}

/// Shoots from `(h0, κ)` and measures the distance to the expected member
/// of the de Sitter / SdS / Nariai families.
pub fn birkhoff_check(n: usize, h0: f64, kappa: f64, config: &ShootConfig) -> Result<BirkhoffMatch> {
    let shot = shoot_from_horizon(HorizonData::new(n, LambdaSign::Positive, h0, kappa)?, config)?;
    let family = expected_family(n, h0);
    let reference = match family {
        Family::DeSitter => de_sitter(n)?,
        Family::Nariai => nariai(n)?,
        Family::SchwarzschildDeSitter { mass } => schwarzschild_de_sitter(SdsParams::new(n, mass)?)?,
    };
    let dev = compare_with(&shot, &reference)?;
    Ok(BirkhoffMatch {
        h0,
        kappa,
        family,
        deviation: dev.potential.max(dev.warp),
        monitor_max: shot.monitor_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::sds_horizons;

    #[test]
    fn de_sitter_state_solves_the_system() {
        let sys = reduce_system(3, LambdaSign::Positive);
        for rho in [0.2f64, 0.7, 1.3] {
            // u = sin ρ, h = cos ρ measured from the horizon
            let y = [rho.cos(), -rho.sin(), rho.sin(), rho.cos()];
            let d = sys.rhs(&y);
            assert!((d[1] + rho.cos()).abs() < 1e-12 && (d[3] + rho.sin()).abs() < 1e-12);
            assert!(sys.laplace_monitor(&y).abs() < 1e-12);
        }
    }

    #[test]
    fn flat_limit_is_schwarzschild() {
        // Λ-terms dropped: h = r, u = √(1 − 2m/r) with dr/dρ = u
        let sys = ReducedSystem {
            n: 3,
            lambda_sign: LambdaSign::Positive,
            c: 0.0,
        };
        let m = 0.3;
        for r in [0.8f64, 1.5, 4.0] {
            let u = (1.0 - 2.0 * m / r).sqrt();
            let y = [r, u, u, m / (r * r)];
            let d = sys.rhs(&y);
            assert!((d[1] - m / (r * r)).abs() < 1e-13);
            assert!((d[3] + 2.0 * m * u / r.powi(3)).abs() < 1e-13);
            assert!(sys.laplace_monitor(&y).abs() < 1e-13);
        }
    }

    #[test]
    fn nariai_radius_is_stationary() {
        for n in 3..7 {
            let sys = reduce_system(n, LambdaSign::Positive);
            let r = ((n as f64 - 2.0) / n as f64).sqrt();
            assert!(sys.horizon_series(r, 1.0).0.abs() < 1e-14);
        }
    }

    #[test]
    fn shoot_de_sitter() {
        let shot = shoot_from_horizon(HorizonData::new(3, LambdaSign::Positive, 1.0, 1.0).unwrap(), &ShootConfig::default()).unwrap();
        assert_eq!(shot.stop, StopReason::Centre);
        assert!((shot.length - std::f64::consts::FRAC_PI_2).abs() < 1e-8, "{}", shot.length);
        let mut worst: f64 = 0.0;
        for k in 1..200 {
            let x = shot.length * k as f64 / 200.0;
            worst = worst
                .max((shot.triple.potential_value(x) - x.sin()).abs())
                .max((shot.triple.radial().value(x) - x.cos()).abs());
        }
        assert!(worst < 1e-6, "{worst}");
        assert!(shot.monitor_max < 1e-8, "{}", shot.monitor_max);
    }

    #[test]
    fn shoot_sds() {
        let p = SdsParams::new(3, 0.1).unwrap();
        let hz = sds_horizons(&p).unwrap();
        let kappa = 0.5 * p.metric_function(crate::jet::Jet::var(hz.r1)).d1;
        let shot = shoot_from_horizon(HorizonData::new(3, LambdaSign::Positive, hz.r1, kappa).unwrap(), &ShootConfig::default()).unwrap();
        assert_eq!(shot.stop, StopReason::Horizon);
        let far = shot.triple.boundaries()[1];
        assert!((far.sphere_radius - hz.r2).abs() < 1e-8, "{}", far.sphere_radius);
        assert!((far.surface_gravity().unwrap() - hz.kappa2).abs() < 1e-7);
        assert!((shot.triple.boundaries()[0].surface_gravity().unwrap() - hz.kappa1).abs() < 1e-8);
        let dev = compare_with(&shot, &schwarzschild_de_sitter(p).unwrap()).unwrap();
        assert!(dev.potential < 1e-6 && dev.warp < 1e-6 && dev.static_residual < 1e-6, "{dev:?}");
        assert!(shot.monitor_max < 1e-8, "{}", shot.monitor_max);
    }

    #[test]
    fn nariai_branch_keeps_its_radius() {
        let r = (1.0f64 / 3.0).sqrt();
        let shot = shoot_from_horizon(HorizonData::new(3, LambdaSign::Positive, r, 0.7).unwrap(), &ShootConfig::default()).unwrap();
        let worst = (1..100)
            .map(|k| (shot.triple.radial().value(shot.length * k as f64 / 100.0) - r).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-8, "{worst}");
    }

    #[test]
    fn birkhoff_grid() {
        for &h0 in &[0.2, 0.5, 0.8, 0.9, 0.95, 1.0] {
            for &kappa in &[0.5, 2.0] {
                let m = birkhoff_check(3, h0, kappa, &ShootConfig::default()).unwrap();
                assert!(m.deviation < 1e-5 && m.monitor_max < 1e-8, "{m:?}");
            }
        }
    }
}
