use std::fmt;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::space::Point;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// No violation among the samples drawn. Never a certificate.
    PassSampled,
}

impl Verdict {
    pub fn is_fail(self) -> bool {
        self == Verdict::Fail
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::PassSampled => "PASS(sampled)",
        })
    }
}

/// How far a certificate or verdict reaches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    Exhaustive,
    Sampled,
    ClosedForm,
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scope::Exhaustive => "exhaustive",
            Scope::Sampled => "sampled",
            Scope::ClosedForm => "closed_form",
        })
    }
}

/// Points and the distance values exhibiting a violation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub points: Vec<Point>,
    pub values: Vec<f64>,
}

impl Witness {
    pub fn new(points: Vec<Point>, values: Vec<f64>) -> Self {
        Self { points, values }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "points=(")?;
        for (k, p) in self.points.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ") values=(")?;
        for (k, v) in self.values.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Outcome of one axiom or condition check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub detail: Map<String, Value>,
}

impl CheckReport {
    pub fn pass(check: &str) -> Self {
        Self::with(check, Verdict::Pass, None)
    }

    pub fn pass_sampled(check: &str) -> Self {
        Self::with(check, Verdict::PassSampled, None)
    }

    pub fn fail(check: &str, witness: Witness) -> Self {
        Self::with(check, Verdict::Fail, Some(witness))
    }

    fn with(check: &str, verdict: Verdict, witness: Option<Witness>) -> Self {
        Self {
            check: check.to_string(),
            verdict,
            witness,
            detail: Map::new(),
        }
    }

    pub fn detail(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.detail.insert(key.to_string(), value.into());
        self
    }

    pub fn passed(&self) -> bool {
        !self.verdict.is_fail()
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("reports always serialize")
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<14} {}", self.verdict.to_string(), self.check)?;
        if let Some(w) = &self.witness {
            write!(f, "  witness {w}")?;
        }
        for (k, v) in &self.detail {
            write!(f, "  {k}={v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let r = CheckReport::fail(
            "symmetry",
            Witness::new(vec![Point::Index(0), Point::Index(1)], vec![1.0, 2.0]),
        )
        .detail("scope", "exhaustive");
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"check":"symmetry","verdict":"fail","witness":{"points":[0,1],"values":[1.0,2.0]},"detail":{"scope":"exhaustive"}}"#
        );
        let r = CheckReport::pass_sampled("symmetry");
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"check":"symmetry","verdict":"pass_sampled","witness":null,"detail":{}}"#
        );
    }

    #[test]
    fn human_line() {
        let r = CheckReport::fail(
            "indiscernibility",
            Witness::new(vec![Point::Index(0), Point::Index(1)], vec![0.0]),
        );
        let line = r.to_string();
        assert!(line.starts_with("FAIL"));
        assert!(line.contains("points=(0, 1) values=(0)"));
    }
}
