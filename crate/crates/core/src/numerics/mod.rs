//! Numerical building blocks: quadrature, bracketed roots, an adaptive
//! Runge–Kutta integrator and quintic Hermite interpolation.

pub mod extrapolate;
pub mod hermite;
pub mod ode;
pub mod quad;
pub mod roots;
