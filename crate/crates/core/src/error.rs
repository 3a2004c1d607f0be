use thiserror::Error;

use crate::numerics::{ode::OdeError, quad::QuadError, roots::RootError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("coordinate {x} lies outside [{lo}, {hi}]")]
    OutsideDomain { x: f64, lo: f64, hi: f64 },
    #[error("degenerate warping radius h = {h} at coordinate {x}")]
    DegenerateWarp { x: f64, h: f64 },
    #[error("profiles are not finite at coordinate {x}")]
    SingularPoint { x: f64 },
    #[error("u does not vanish at the boundary (u = {u:.3e})")]
    NotAHorizon { u: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("point lies within {band:.1e} of the extremum, where the conformal metric degenerates")]
    NearExtremum { band: f64 },
    #[error("level {t} lies outside the range of u")]
    LevelOutOfRange { t: f64 },
    #[error("level {t} is singular (|Du| vanishes on it)")]
    SingularLevel { t: f64 },
    #[error("non-discrete extremum set")]
    NonDiscreteExtremum,
    #[error("exponent p = {p} outside the admissible range {range}")]
    ExponentOutOfRange { p: f64, range: &'static str },
    #[error("triple has no boundary of the required kind")]
    MissingBoundary,
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error(transparent)]
    Root(#[from] RootError),
}

pub type Result<T> = std::result::Result<T, Error>;
