//! Which hypotheses of the monotonicity theorems a triple satisfies.

use serde::Serialize;

use crate::geometry::{BoundaryKind, LambdaSign, StaticTriple};

const FLAG_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AssumptionFlags {
    /// `max u = 1` (Λ>0) or `min u = 1` (Λ<0).
    pub normalized: bool,
    /// The extremum set of `u` is a finite set of points.
    pub discrete_extremum: bool,
    /// Λ>0: every boundary component has surface gravity at most 1.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surface_gravity_at_most_one: Option<bool>,
    /// Λ<0: conformally compact with defining function `1/√(u²−1)` and
    /// `lim (u² − 1 − |Du|²) ≥ 0` at infinity.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conformally_compact: Option<bool>,
    /// Λ<0: the limit above vanishes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vanishing_boundary_defect: Option<bool>,
}

impl AssumptionFlags {
    pub fn of(triple: &StaticTriple) -> Self {
        let ext = triple.extremum();
        let u_ext = triple.potential_value(ext.location);
        let normalized = (u_ext - 1.0).abs() <= FLAG_TOL;
        let discrete_extremum = ext.is_discrete();
        match triple.lambda_sign() {
            LambdaSign::Positive => Self {
                normalized,
                discrete_extremum,
                surface_gravity_at_most_one: Some(triple.horizons().all(|(_, k)| k <= 1.0 + FLAG_TOL)),
                conformally_compact: None,
                vanishing_boundary_defect: None,
            },
            LambdaSign::Negative => {
                let defects: Vec<f64> = triple
                    .boundaries()
                    .iter()
                    .filter_map(|b| match b.kind {
                        BoundaryKind::ConformalInfinity { defect_limit } => Some(defect_limit),
                        BoundaryKind::Horizon { .. } => None,
                    })
                    .collect();
                let compact = !defects.is_empty() && defects.iter().all(|&d| d >= -FLAG_TOL);
                Self {
                    normalized,
                    discrete_extremum,
                    surface_gravity_at_most_one: None,
                    conformally_compact: Some(compact),
                    vanishing_boundary_defect: Some(compact && defects.iter().all(|d| d.abs() <= FLAG_TOL)),
                }
            }
        }
    }

    /// Hypotheses of the monotonicity theorem for the sign of Λ at hand.
    pub fn monotonicity(&self) -> bool {
        self.normalized
            && self.surface_gravity_at_most_one.unwrap_or(true)
            && self.conformally_compact.unwrap_or(true)
    }

    pub fn entries(&self) -> Vec<(&'static str, bool)> {
        let mut v = vec![
            ("normalized", self.normalized),
            ("discrete_extremum", self.discrete_extremum),
        ];
        if let Some(b) = self.surface_gravity_at_most_one {
            v.push(("surface_gravity_at_most_one", b));
        }
        if let Some(b) = self.conformally_compact {
            v.push(("conformally_compact", b));
        }
        if let Some(b) = self.vanishing_boundary_defect {
            v.push(("vanishing_boundary_defect", b));
        }
        v
    }

    /// `name=0|1` pairs joined by `;`, for CSV cells.
    pub fn compact(&self) -> String {
        self.entries()
            .iter()
            .map(|(k, v)| format!("{k}={}", u8::from(*v)))
            .collect::<Vec<_>>()
            .join(";")
    }
}
