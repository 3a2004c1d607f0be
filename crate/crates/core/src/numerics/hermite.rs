//! Piecewise quintic Hermite interpolation from value, slope and curvature
//! samples. The interpolant is C² and its derivatives are taken analytically.

use crate::jet::Jet;

#[derive(Debug, Clone, PartialEq)]
pub struct QuinticHermite {
    xs: Vec<f64>,
    ys: Vec<[f64; 3]>,
}

impl QuinticHermite {
    /// `samples` holds `(x, [y, y', y''])` with strictly increasing `x`.
    ///
    /// # Panics
    /// If fewer than two samples are given or the abscissae are not strictly
    /// increasing.
    pub fn new(samples: Vec<(f64, [f64; 3])>) -> Self {
        assert!(samples.len() >= 2, "need at least two samples");
        assert!(
            samples.windows(2).all(|w| w[1].0 > w[0].0),
            "abscissae must increase strictly"
        );
        let (xs, ys) = samples.into_iter().unzip();
        Self { xs, ys }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().expect("non-empty"))
    }

    pub fn nodes(&self) -> &[f64] {
        &self.xs
    }

    pub fn node_values(&self) -> &[[f64; 3]] {
        &self.ys
    }

    /// Value and first three derivatives at `x` (extrapolates the end
    /// segments outside the domain).
    pub fn eval(&self, x: f64) -> Jet {
        let i = match self.xs.partition_point(|&xi| xi <= x) {
            0 => 0,
            k if k >= self.xs.len() => self.xs.len() - 2,
            k => k - 1,
        };
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let d = x1 - x0;
        let [y0, p0, q0] = self.ys[i];
        let [y1, p1, q1] = self.ys[i + 1];
        let c0 = y0;
        let c1 = d * p0;
        let c2 = 0.5 * d * d * q0;
        let r0 = y1 - (c0 + c1 + c2);
        let r1 = d * p1 - (c1 + 2.0 * c2);
        let r2 = d * d * q1 - 2.0 * c2;
        let c3 = 10.0 * r0 - 4.0 * r1 + 0.5 * r2;
        let c4 = -15.0 * r0 + 7.0 * r1 - r2;
        let c5 = 6.0 * r0 - 3.0 * r1 + 0.5 * r2;
        let t = (x - x0) / d;
        let v = c0 + t * (c1 + t * (c2 + t * (c3 + t * (c4 + t * c5))));
        let d1 = c1 + t * (2.0 * c2 + t * (3.0 * c3 + t * (4.0 * c4 + t * 5.0 * c5)));
        let d2 = 2.0 * c2 + t * (6.0 * c3 + t * (12.0 * c4 + t * 20.0 * c5));
        let d3 = 6.0 * c3 + t * (24.0 * c4 + t * 60.0 * c5);
        Jet::new(v, d1 / d, d2 / (d * d), d3 / (d * d * d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn reproduces_quintics_exactly() {
        let p = |x: f64| [
            1.0 - 2.0 * x + x.powi(5),
            -2.0 + 5.0 * x.powi(4),
            20.0 * x.powi(3),
        ];
        let h = QuinticHermite::new(vec![(0.0, p(0.0)), (0.7, p(0.7)), (1.5, p(1.5))]);
        for x in [0.1, 0.6, 0.9, 1.4] {
            let j = h.eval(x);
            assert_abs_diff_eq!(j.v, p(x)[0], epsilon = 1e-12);
            assert_abs_diff_eq!(j.d1, p(x)[1], epsilon = 1e-11);
            assert_abs_diff_eq!(j.d2, p(x)[2], epsilon = 1e-10);
            assert_abs_diff_eq!(j.d3, 60.0 * x * x, epsilon = 1e-9);
        }
    }

    #[test]
    fn sine_second_derivative_is_fourth_order() {
        let err = |n: usize| {
            let xs: Vec<_> = (0..=n).map(|k| k as f64 * 2.0 / n as f64).collect();
            let h = QuinticHermite::new(xs.iter().map(|&x| (x, [x.sin(), x.cos(), -x.sin()])).collect());
            (0..200)
                .map(|k| {
                    let x = 0.01 * k as f64;
                    (h.eval(x).d2 + x.sin()).abs()
                })
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(10), err(20));
        assert!(e1 / e2 > 12.0, "ratio {}", e1 / e2);
    }
}
