//! Adaptive Dormand–Prince 5(4) integrator for small autonomous-size systems.
//!
//! Every accepted step is reported to a callback together with the
//! right-hand side at the new point (first-same-as-last), so callers can build
//! their own dense representation and decide when to stop.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("step size underflow at t = {t} (h = {h:.3e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("solution blew up at t = {t}")]
    BlowUp { t: f64 },
    #[error("step budget of {max_steps} exhausted at t = {t}")]
    TooManySteps { t: f64, max_steps: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeConfig {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeConfig {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-13,
            h_init: 1e-4,
            h_min: 1e-14,
            h_max: 1e-2,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub steps: usize,
    pub stopped_by_callback: bool,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates `y' = rhs(t, y)` from `t0` towards `t_end` (either direction).
/// `on_step(t, y, dy)` is called after every accepted step.
pub fn integrate<const N: usize, F, S>(
    mut rhs: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    cfg: &OdeConfig,
    mut on_step: S,
) -> Result<Outcome<N>, OdeError>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    S: FnMut(f64, &[f64; N], &[f64; N]) -> Control,
{
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut y = y0;
    let mut k = [[0.0; N]; 7];
    k[0] = rhs(t, &y);
    let mut h = cfg.h_init.min(cfg.h_max).min((t_end - t0).abs());
    let mut steps = 0;
    while (t_end - t) * dir > 0.0 {
        if steps >= cfg.max_steps {
            return Err(OdeError::TooManySteps {
                t,
                max_steps: cfg.max_steps,
            });
        }
        let remaining = (t_end - t).abs();
        let last = h >= remaining;
        let hs = if last { remaining } else { h } * dir;

        for s in 1..7 {
            let mut ys = y;
            for (i, yi) in ys.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += A[s][j] * kj[i];
                }
                *yi += hs * acc;
            }
            k[s] = rhs(t + C[s] * hs, &ys);
        }
        let mut y_new = y;
        for (i, yi) in y_new.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate().take(6) {
                acc += A[6][j] * kj[i];
            }
            *yi += hs * acc;
        }
        // k[6] was evaluated at y_new (FSAL)
        let mut err = 0.0;
        for i in 0..N {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += E[j] * kj[i];
            }
            let sc = cfg.atol + cfg.rtol * y[i].abs().max(y_new[i].abs());
            err += (hs * e / sc).powi(2);
        }
        let err = (err / N as f64).sqrt();
        if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
            if hs.abs() <= cfg.h_min {
                return Err(OdeError::BlowUp { t });
            }
            h = 0.25 * hs.abs();
            continue;
        }
        if err <= 1.0 {
            t = if last { t_end } else { t + hs };
            y = y_new;
            k[0] = k[6];
            steps += 1;
            if on_step(t, &y, &k[0]) == Control::Stop {
                return Ok(Outcome {
                    t,
                    y,
                    steps,
                    stopped_by_callback: true,
                });
            }
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h = (hs.abs() * factor).min(cfg.h_max);
        if err > 1.0 && h < cfg.h_min {
            return Err(OdeError::StepUnderflow { t, h });
        }
    }
    Ok(Outcome {
        t,
        y,
        steps,
        stopped_by_callback: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn harmonic_oscillator() {
        let out = integrate(
            |_, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            [0.0, 1.0],
            10.0,
            &OdeConfig::default(),
            |_, _, _| Control::Continue,
        )
        .unwrap();
        assert_abs_diff_eq!(out.y[0], 10f64.sin(), epsilon = 1e-10);
        assert_abs_diff_eq!(out.y[1], 10f64.cos(), epsilon = 1e-10);
    }

    #[test]
    fn backwards_and_callback_stop() {
        let mut seen = 0;
        let out = integrate(
            |_, y: &[f64; 1]| [y[0]],
            1.0,
            [1f64.exp()],
            0.0,
            &OdeConfig::default(),
            |t, _, _| {
                seen += 1;
                if t < 0.5 {
                    Control::Stop
                } else {
                    Control::Continue
                }
            },
        )
        .unwrap();
        assert!(out.stopped_by_callback);
        assert!(out.t < 0.5);
        assert_abs_diff_eq!(out.y[0], out.t.exp(), epsilon = 1e-11);
        assert_eq!(seen, out.steps);
    }

    #[test]
    fn finite_time_blow_up_is_reported() {
        let res = integrate(
            |_, y: &[f64; 1]| [y[0] * y[0]],
            0.0,
            [1.0],
            2.0,
            &OdeConfig::default(),
            |_, _, _| Control::Continue,
        );
        assert!(res.is_err());
    }
}
