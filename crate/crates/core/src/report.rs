//! Machine-readable outcome of an identity or inequality check.

use std::collections::BTreeMap;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inapplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Equal,
    /// `lhs ≤ rhs`
    AtMost,
    /// `lhs ≥ rhs`
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub name: String,
    /// Short statement of the relation being checked.
    #[serde(rename = "paper_ref")]
    pub reference: String,
    pub lhs: f64,
    pub rhs: f64,
    #[serde(rename = "residual")]
    pub abs_residual: f64,
    pub rel_residual: f64,
    pub tolerance: f64,
    pub status: Status,
    pub relation: Relation,
    /// `lhs` and `rhs` agree within tolerance (the sharp case of an inequality).
    pub equality: bool,
    pub assumptions: BTreeMap<String, bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn rel(abs: f64, lhs: f64, rhs: f64) -> f64 {
    let scale = lhs.abs().max(rhs.abs());
    if scale == 0.0 {
        0.0
    } else {
        abs / scale
    }
}

impl IdentityReport {
    /// `lhs = rhs`; passes when the absolute or the relative residual is
    /// within `tolerance`.
    pub fn equality(name: &str, reference: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let abs = (lhs - rhs).abs();
        let rel_residual = rel(abs, lhs, rhs);
        let ok = abs <= tolerance || rel_residual <= tolerance;
        Self {
            name: name.into(),
            reference: reference.into(),
            lhs,
            rhs,
            abs_residual: abs,
            rel_residual,
            tolerance,
            status: if ok { Status::Pass } else { Status::Fail },
            relation: Relation::Equal,
            equality: ok,
            assumptions: BTreeMap::new(),
            note: None,
        }
    }

    /// `lhs ≤ rhs` or `lhs ≥ rhs`; the residual is the gap `|lhs − rhs|` and
    /// the equality flag records whether the inequality is sharp.
    pub fn inequality(
        name: &str,
        reference: &str,
        lhs: f64,
        rhs: f64,
        relation: Relation,
        tolerance: f64,
    ) -> Self {
        let abs = (lhs - rhs).abs();
        let rel_residual = rel(abs, lhs, rhs);
        let slack = tolerance * lhs.abs().max(rhs.abs()).max(1.0);
        let holds = match relation {
            Relation::AtMost => lhs <= rhs + slack,
            Relation::AtLeast => lhs >= rhs - slack,
            Relation::Equal => abs <= slack,
        };
        Self {
            name: name.into(),
            reference: reference.into(),
            lhs,
            rhs,
            abs_residual: abs,
            rel_residual,
            tolerance,
            status: if holds { Status::Pass } else { Status::Fail },
            relation,
            equality: abs <= tolerance || rel_residual <= tolerance,
            assumptions: BTreeMap::new(),
            note: None,
        }
    }

    /// A check that cannot be evaluated for this triple.
    pub fn refused(name: &str, reference: &str, note: &str) -> Self {
        Self {
            name: name.into(),
            reference: reference.into(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            abs_residual: f64::NAN,
            rel_residual: f64::NAN,
            tolerance: f64::NAN,
            status: Status::Inapplicable,
            relation: Relation::Equal,
            equality: false,
            assumptions: BTreeMap::new(),
            note: Some(note.into()),
        }
    }

    /// Records the hypotheses the statement needs. If any is false the
    /// verdict becomes `Inapplicable`; the numbers are kept for information.
    pub fn requiring(mut self, required: &[(&str, bool)]) -> Self {
        for (k, v) in required {
            self.assumptions.insert((*k).to_string(), *v);
        }
        if required.iter().any(|(_, v)| !v) && self.status != Status::Inapplicable {
            self.status = Status::Inapplicable;
            if self.note.is_none() {
                let missing: Vec<_> = required
                    .iter()
                    .filter(|(_, v)| !v)
                    .map(|(k, _)| *k)
                    .collect();
                self.note = Some(format!("hypotheses not satisfied: {}", missing.join(", ")));
            }
        }
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equality_uses_either_residual() {
        assert!(IdentityReport::equality("a", "", 1e6, 1e6 + 0.5, 1e-6).passed());
        assert!(IdentityReport::equality("b", "", 1e-9, 0.0, 1e-6).passed());
        assert!(IdentityReport::equality("c", "", 1.0, 1.1, 1e-6).failed());
    }

    #[test]
    fn inequality_direction_and_sharpness() {
        let r = IdentityReport::inequality("a", "", 1.0, 2.0, Relation::AtMost, 1e-9);
        assert!(r.passed() && !r.equality);
        let r = IdentityReport::inequality("b", "", 2.0, 1.0, Relation::AtMost, 1e-9);
        assert!(r.failed());
        let r = IdentityReport::inequality("c", "", 2.0, 2.0, Relation::AtLeast, 1e-9);
        assert!(r.passed() && r.equality);
    }

    #[test]
    fn false_hypothesis_never_fails() {
        let r = IdentityReport::inequality("a", "", 3.0, 1.0, Relation::AtMost, 1e-9)
            .requiring(&[("kappa_at_most_one", false)]);
        assert_eq!(r.status, Status::Inapplicable);
        assert!(r.note.unwrap().contains("kappa_at_most_one"));
    }

    #[test]
    fn json_uses_contract_keys() {
        let v = serde_json::to_value(IdentityReport::equality("x", "y", 1.0, 1.0, 1e-9)).unwrap();
        for key in ["name", "paper_ref", "lhs", "rhs", "residual", "tolerance", "status"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["status"], "pass");
    }
}
