//! One-dimensional quadrature: globally adaptive Gauss–Kronrod (7/15) and a
//! fixed composite Simpson rule used for resolution-doubling studies.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("quadrature did not converge: error estimate {error:.3e} after {evals} evaluations")]
    NonConvergence { value: f64, error: f64, evals: usize },
    #[error("integrand is not finite at x = {x}")]
    NonFinite { x: f64 },
    #[error("invalid integration interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rule {
    /// Adaptive Gauss–Kronrod subdivision until the error targets are met.
    Adaptive,
    /// Composite Simpson rule on the given number of equal panels.
    Simpson { panels: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evals: usize,
    pub rule: Rule,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-11,
            max_evals: 100_000,
            rule: Rule::Adaptive,
        }
    }
}

impl QuadratureConfig {
    pub fn simpson(panels: usize) -> Self {
        Self {
            rule: Rule::Simpson { panels },
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

impl Integral {
    pub fn zero() -> Self {
        Self {
            value: 0.0,
            error: 0.0,
            evals: 0,
        }
    }

    pub fn combine(self, other: Integral) -> Integral {
        Integral {
            value: self.value + other.value,
            error: self.error + other.error,
            evals: self.evals + other.evals,
        }
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<Panel, QuadError> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = eval(f, c)?;
    let mut gauss = fc * WG[3];
    let mut kron = fc * WGK[7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = eval(f, c - dx)?;
        let f2 = eval(f, c + dx)?;
        kron += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    Ok(Panel {
        a,
        b,
        value: kron * h,
        error: ((kron - gauss) * h).abs(),
    })
}

fn eval<F: FnMut(f64) -> f64>(f: &mut F, x: f64) -> Result<f64, QuadError> {
    let y = f(x);
    if y.is_finite() {
        Ok(y)
    } else {
        Err(QuadError::NonFinite { x })
    }
}

/// Integrates `f` over `[a, b]`; `a > b` yields the negated integral.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<Integral, QuadError> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(QuadError::InvalidInterval { a, b });
    }
    if a == b {
        return Ok(Integral::zero());
    }
    if a > b {
        let r = integrate(f, b, a, cfg)?;
        return Ok(Integral {
            value: -r.value,
            ..r
        });
    }
    match cfg.rule {
        Rule::Simpson { panels } => Ok(simpson(&mut f, a, b, panels.max(1))?),
        Rule::Adaptive => adaptive(&mut f, a, b, cfg),
    }
}

fn adaptive<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<Integral, QuadError> {
    let mut heap = BinaryHeap::new();
    let first = kronrod(f, a, b)?;
    let mut value = first.value;
    let mut error = first.error;
    let mut evals = 15;
    heap.push(first);
    while error > cfg.abs_tol.max(cfg.rel_tol * value.abs()) {
        if evals + 30 > cfg.max_evals {
            return Err(QuadError::NonConvergence {
                value,
                error,
                evals,
            });
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // panel cannot be split further in floating point
            heap.push(worst);
            break;
        }
        let left = kronrod(f, worst.a, mid)?;
        let right = kronrod(f, mid, worst.b)?;
        evals += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // re-sum occasionally to keep the running totals free of drift
        if heap.len() % 64 == 0 {
            value = heap.iter().map(|p| p.value).sum();
            error = heap.iter().map(|p| p.error).sum();
        }
    }
    let value = heap.iter().map(|p| p.value).sum();
    let error = heap.iter().map(|p| p.error).sum();
    Ok(Integral {
        value,
        error,
        evals,
    })
}

fn simpson<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    panels: usize,
) -> Result<Integral, QuadError> {
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for k in 0..panels {
        let x0 = a + h * k as f64;
        let x1 = if k + 1 == panels { b } else { x0 + h };
        sum += (eval(f, x0)? + 4.0 * eval(f, 0.5 * (x0 + x1))? + eval(f, x1)?) * (x1 - x0) / 6.0;
    }
    Ok(Integral {
        value: sum,
        error: f64::NAN,
        evals: 3 * panels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kronrod_exact_for_polynomials() {
        let r = integrate(|x| x.powi(10) - 3.0 * x.powi(3), -1.0, 2.0, &Default::default()).unwrap();
        let exact = (2f64.powi(11) + 1.0) / 11.0 - 3.0 * (16.0 - 1.0) / 4.0;
        assert_relative_eq!(r.value, exact, max_relative = 1e-14);
        assert_eq!(r.evals, 15);
    }

    #[test]
    fn adaptive_handles_sqrt_endpoint() {
        let r = integrate(|x: f64| x.sqrt(), 0.0, 1.0, &Default::default()).unwrap();
        assert_relative_eq!(r.value, 2.0 / 3.0, max_relative = 1e-11);
        assert!(r.evals < 2_000);
    }

    #[test]
    fn reversed_interval_negates() {
        let cfg = QuadratureConfig::default();
        let a = integrate(f64::exp, 0.0, 1.0, &cfg).unwrap().value;
        let b = integrate(f64::exp, 1.0, 0.0, &cfg).unwrap().value;
        assert_eq!(a, -b);
    }

    #[test]
    fn simpson_is_fourth_order() {
        let exact = 1f64.exp() - 1.0;
        let e1 = (integrate(f64::exp, 0.0, 1.0, &QuadratureConfig::simpson(4)).unwrap().value - exact).abs();
        let e2 = (integrate(f64::exp, 0.0, 1.0, &QuadratureConfig::simpson(8)).unwrap().value - exact).abs();
        assert!(e1 / e2 > 14.0 && e1 / e2 < 18.0, "ratio {}", e1 / e2);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let cfg = QuadratureConfig {
            max_evals: 60,
            abs_tol: 1e-15,
            rel_tol: 0.0,
            rule: Rule::Adaptive,
        };
        let err = integrate(|x: f64| (1.0 / x).sin(), 1e-3, 1.0, &cfg).unwrap_err();
        assert!(matches!(err, QuadError::NonConvergence { .. }));
    }

    #[test]
    fn nonfinite_integrand_is_an_error() {
        let err = integrate(|x: f64| 1.0 / (x - 0.5), 0.0, 1.0, &Default::default()).unwrap_err();
        assert!(matches!(err, QuadError::NonFinite { .. }));
    }
}
