//! Third-order forward-mode derivatives of scalar functions of one variable.
//!
//! A [`Jet`] carries a value together with its first three derivatives with
//! respect to a single radial coordinate. Closed-form profiles are written as
//! ordinary arithmetic on jets, which yields exact derivatives without
//! finite differences.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

impl Jet {
    pub const fn new(v: f64, d1: f64, d2: f64, d3: f64) -> Self {
        Self { v, d1, d2, d3 }
    }

    /// The independent variable at `x`.
    pub const fn var(x: f64) -> Self {
        Self::new(x, 1.0, 0.0, 0.0)
    }

    pub const fn constant(c: f64) -> Self {
        Self::new(c, 0.0, 0.0, 0.0)
    }

    /// Applies an outer function given its value and first three derivatives
    /// at `self.v` (Faà di Bruno up to third order).
    pub fn chain(self, f0: f64, f1: f64, f2: f64, f3: f64) -> Self {
        let (a, b, c) = (self.d1, self.d2, self.d3);
        Self {
            v: f0,
            d1: f1 * a,
            d2: f2 * a * a + f1 * b,
            d3: f3 * a * a * a + 3.0 * f2 * a * b + f1 * c,
        }
    }

    /// Reparametrizes a jet taken in `x` to one taken in `y`, given the jet of
    /// `x` as a function of `y`.
    pub fn compose(self, inner: Jet) -> Self {
        inner.chain(self.v, self.d1, self.d2, self.d3)
    }

    pub fn recip(self) -> Self {
        let x = self.v;
        let r = 1.0 / x;
        self.chain(r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r)
    }

    pub fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        let x = self.v;
        self.chain(s, 0.5 / s, -0.25 / (s * x), 0.375 / (s * x * x))
    }

    /// Real power `x^a` for `x > 0`.
    pub fn powf(self, a: f64) -> Self {
        let x = self.v;
        let p = x.powf(a);
        self.chain(
            p,
            a * p / x,
            a * (a - 1.0) * p / (x * x),
            a * (a - 1.0) * (a - 2.0) * p / (x * x * x),
        )
    }

    pub fn powi(self, k: i32) -> Self {
        let x = self.v;
        let kf = f64::from(k);
        let pw = |e: i32| if e == 0 { 1.0 } else { x.powi(e) };
        self.chain(
            pw(k),
            if k == 0 { 0.0 } else { kf * pw(k - 1) },
            if k == 0 || k == 1 { 0.0 } else { kf * (kf - 1.0) * pw(k - 2) },
            if (0..=2).contains(&k) {
                0.0
            } else {
                kf * (kf - 1.0) * (kf - 2.0) * pw(k - 3)
            },
        )
    }

    pub fn ln(self) -> Self {
        let x = self.v;
        self.chain(x.ln(), 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x))
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e, e)
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s, -c)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c, s)
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(k * self.v, k * self.d1, k * self.d2, k * self.d3)
    }

    /// Derivative jet, dropping the (unknown) fourth derivative.
    pub fn derivative(self) -> Self {
        Self::new(self.d1, self.d2, self.d3, f64::NAN)
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet::new(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2, self.d3 + o.d3)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet::new(self.v - o.v, self.d1 - o.d1, self.d2 - o.d2, self.d3 - o.d3)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet::new(
            self.v * o.v,
            self.d1 * o.v + self.v * o.d1,
            self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
            self.d3 * o.v + 3.0 * self.d2 * o.d1 + 3.0 * self.d1 * o.d2 + self.v * o.d3,
        )
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, c: f64) -> Jet {
        Jet::new(self.v + c, self.d1, self.d2, self.d3)
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(self, c: f64) -> Jet {
        Jet::new(self.v - c, self.d1, self.d2, self.d3)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, c: f64) -> Jet {
        self.scale(c)
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, c: f64) -> Jet {
        self.scale(1.0 / c)
    }
}

impl Add<Jet> for f64 {
    type Output = Jet;
    fn add(self, j: Jet) -> Jet {
        j + self
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, j: Jet) -> Jet {
        -j + self
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, j: Jet) -> Jet {
        j.scale(self)
    }
}

impl Div<Jet> for f64 {
    type Output = Jet;
    fn div(self, j: Jet) -> Jet {
        j.recip().scale(self)
    }
}
