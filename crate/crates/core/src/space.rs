//! Felt metric spaces.
//!
//! A felt metric is a symmetric nonnegative distance `p` for which
//! `p(x, y) = 0` forces `x = y`. The converse is not required, so a point may
//! sit at positive distance from itself. Two flavors are provided: finite
//! spaces backed by a tabulated matrix, and continuous spaces over an
//! axis-aligned box with a callable distance.
//!
//! Distances are assumed finite everywhere; an evaluator that returns `inf`
//! or `NaN` is reported as [`FeltError::InvalidDistance`].

use std::fmt;
use std::sync::Arc;

use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::error::{FeltError, Result};

/// A point of a felt space.
#[derive(Clone, Debug, PartialEq)]
pub enum Point {
    /// Index into a finite space.
    Index(usize),
    /// Coordinates in a continuous space's domain box.
    Coords(Vec<f64>),
}

impl Point {
    pub fn real(x: f64) -> Self {
        Point::Coords(vec![x])
    }

    pub fn as_index(&self) -> Option<usize> {
        match self {
            Point::Index(i) => Some(*i),
            Point::Coords(_) => None,
        }
    }

    pub fn coords(&self) -> Option<&[f64]> {
        match self {
            Point::Index(_) => None,
            Point::Coords(c) => Some(c),
        }
    }

    /// The first coordinate, for scalar points.
    pub fn scalar(&self) -> Option<f64> {
        self.coords().and_then(|c| c.first().copied())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Index(i) => write!(f, "{i}"),
            Point::Coords(c) if c.len() == 1 => write!(f, "{}", c[0]),
            Point::Coords(c) => {
                write!(f, "(")?;
                for (k, v) in c.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Point::Index(i) => s.serialize_u64(*i as u64),
            Point::Coords(c) if c.len() == 1 => s.serialize_f64(c[0]),
            Point::Coords(c) => {
                let mut seq = s.serialize_seq(Some(c.len()))?;
                for v in c {
                    seq.serialize_element(v)?;
                }
                seq.end()
            }
        }
    }
}

/// Closed axis-aligned box `[lower_k, upper_k]` per coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl DomainBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(FeltError::InvalidSpace(format!(
                "box bounds must be nonempty and of equal length (got {} and {})",
                lower.len(),
                upper.len()
            )));
        }
        for (k, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if lo.is_nan() || hi.is_nan() || lo > hi || *lo == f64::INFINITY {
                return Err(FeltError::InvalidSpace(format!(
                    "axis {k} has invalid bounds [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![a], vec![b])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn is_bounded(&self) -> bool {
        self.lower.iter().chain(&self.upper).all(|v| v.is_finite())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| *lo <= *v && *v <= *hi)
    }
}

/// A finite felt space given by its distance table.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteSpace {
    name: String,
    labels: Vec<String>,
    n: usize,
    table: Vec<f64>,
}

impl FiniteSpace {
    /// Build from a square matrix of finite nonnegative entries. The diagonal
    /// is unrestricted.
    pub fn new(name: impl Into<String>, matrix: Vec<Vec<f64>>) -> Result<Self> {
        let n = matrix.len();
        if n == 0 {
            return Err(FeltError::InvalidSpace("distance matrix is empty".into()));
        }
        let mut table = Vec::with_capacity(n * n);
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(FeltError::InvalidSpace(format!(
                    "distance matrix is not square: row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(FeltError::InvalidSpace(format!(
                        "distance[{i}][{j}] = {v} is not finite"
                    )));
                }
                if v < 0.0 {
                    return Err(FeltError::InvalidSpace(format!(
                        "distance[{i}][{j}] = {v} is negative"
                    )));
                }
                table.push(v);
            }
        }
        Ok(Self {
            name: name.into(),
            labels: (0..n).map(|i| i.to_string()).collect(),
            n,
            table,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(FeltError::InvalidSpace(format!(
                "points has {} labels but the distance matrix has {} rows",
                labels.len(),
                self.n
            )));
        }
        for (i, l) in labels.iter().enumerate() {
            if let Some(j) = labels[..i].iter().position(|m| m == l) {
                return Err(FeltError::InvalidSpace(format!(
                    "duplicate point label {l:?} at positions {j} and {i}"
                )));
            }
        }
        self.labels = labels;
        Ok(self)
    }

    /// `discrete:n`: zero on the diagonal, one elsewhere.
    pub fn discrete(n: usize) -> Result<Self> {
        let matrix = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
            .collect();
        Self::new(format!("discrete:{n}"), matrix)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Table lookup `D[i][j]`. Panics if either index is out of range.
    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.table[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.table.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    /// Distinct entries of the table, ascending.
    pub fn distance_values(&self) -> Vec<f64> {
        let mut v = self.table.clone();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.n {
            Ok(())
        } else {
            Err(FeltError::IndexOutOfRange {
                space: self.name.clone(),
                index: i,
                n: self.n,
            })
        }
    }
}

pub type MetricFn = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;

/// A felt space over a box with a callable distance.
#[derive(Clone)]
pub struct ContinuousSpace {
    name: String,
    domain: DomainBox,
    metric: MetricFn,
}

impl fmt::Debug for ContinuousSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ContinuousSpace")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl ContinuousSpace {
    pub fn new(name: impl Into<String>, domain: DomainBox, metric: MetricFn) -> Self {
        Self {
            name: name.into(),
            domain,
            metric,
        }
    }

    /// `euclid:[a,b]` with `p(x, y) = |x - y|`.
    pub fn euclid(a: f64, b: f64) -> Result<Self> {
        Ok(Self::new(
            format!("euclid:[{a},{b}]"),
            DomainBox::interval(a, b)?,
            Arc::new(|x: &[f64], y: &[f64]| (x[0] - y[0]).abs()),
        ))
    }

    /// `maxpm:[a,b]` with `p(x, y) = max(x, y)`; requires `a >= 0`.
    pub fn max_partial(a: f64, b: f64) -> Result<Self> {
        if a < 0.0 {
            return Err(FeltError::InvalidSpace(format!(
                "maxpm needs a nonnegative domain, got lower bound {a}"
            )));
        }
        Ok(Self::new(
            format!("maxpm:[{a},{b}]"),
            DomainBox::interval(a, b)?,
            Arc::new(|x: &[f64], y: &[f64]| x[0].max(y[0])),
        ))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    /// Evaluate `p` on raw coordinates without a domain check.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let v = (self.metric)(x, y);
        if v.is_finite() && v >= 0.0 {
            Ok(v)
        } else {
            Err(FeltError::InvalidDistance {
                x: Point::Coords(x.to_vec()).to_string(),
                y: Point::Coords(y.to_vec()).to_string(),
                value: v,
            })
        }
    }

    pub fn check_coords(&self, x: &[f64]) -> Result<()> {
        if self.domain.contains(x) {
            Ok(())
        } else {
            Err(FeltError::OutOfDomain {
                space: self.name.clone(),
                point: Point::Coords(x.to_vec()).to_string(),
            })
        }
    }
}

/// Either flavor of felt space.
#[derive(Clone, Debug)]
pub enum FeltSpace {
    Finite(FiniteSpace),
    Continuous(ContinuousSpace),
}

impl From<FiniteSpace> for FeltSpace {
    fn from(s: FiniteSpace) -> Self {
        FeltSpace::Finite(s)
    }
}

impl From<ContinuousSpace> for FeltSpace {
    fn from(s: ContinuousSpace) -> Self {
        FeltSpace::Continuous(s)
    }
}

impl FeltSpace {
    /// Parse a builtin name: `euclid:[a,b]`, `maxpm:[a,b]` or `discrete:n`.
    /// Brackets around the bounds are optional.
    pub fn builtin(spec: &str) -> Result<Self> {
        let unknown = || FeltError::UnknownBuiltin(spec.to_string());
        let (kind, args) = spec.split_once(':').ok_or_else(unknown)?;
        let args = args.trim().trim_start_matches('[').trim_end_matches(']');
        match kind {
            "euclid" | "maxpm" => {
                let (a, b) = parse_bounds(args).ok_or_else(unknown)?;
                if kind == "euclid" {
                    Ok(ContinuousSpace::euclid(a, b)?.into())
                } else {
                    Ok(ContinuousSpace::max_partial(a, b)?.into())
                }
            }
            "discrete" => {
                let n: usize = args.trim().parse().map_err(|_| unknown())?;
                Ok(FiniteSpace::discrete(n)?.into())
            }
            _ => Err(unknown()),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            FeltSpace::Finite(s) => s.name(),
            FeltSpace::Continuous(s) => s.name(),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, FeltSpace::Finite(_))
    }

    pub fn as_finite(&self) -> Option<&FiniteSpace> {
        match self {
            FeltSpace::Finite(s) => Some(s),
            FeltSpace::Continuous(_) => None,
        }
    }

    pub fn as_continuous(&self) -> Option<&ContinuousSpace> {
        match self {
            FeltSpace::Finite(_) => None,
            FeltSpace::Continuous(s) => Some(s),
        }
    }

    /// Fails unless `x` is a point of this space.
    pub fn contains(&self, x: &Point) -> Result<()> {
        match (self, x) {
            (FeltSpace::Finite(s), Point::Index(i)) => s.check_index(*i),
            (FeltSpace::Continuous(s), Point::Coords(c)) => s.check_coords(c),
            (FeltSpace::Finite(s), Point::Coords(_)) => Err(FeltError::PointKind(format!(
                "finite space `{}` expects an index, got coordinates {x}",
                s.name()
            ))),
            (FeltSpace::Continuous(s), Point::Index(_)) => Err(FeltError::PointKind(format!(
                "continuous space `{}` expects coordinates, got index {x}",
                s.name()
            ))),
        }
    }

    /// `p(x, y)`. Finite spaces return the stored entry verbatim.
    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        self.contains(x)?;
        self.contains(y)?;
        match (self, x, y) {
            (FeltSpace::Finite(s), Point::Index(i), Point::Index(j)) => Ok(s.d(*i, *j)),
            (FeltSpace::Continuous(s), Point::Coords(a), Point::Coords(b)) => s.eval(a, b),
            _ => unreachable!("contains() rejects mismatched point kinds"),
        }
    }
}

fn parse_bounds(args: &str) -> Option<(f64, f64)> {
    let (a, b) = args.split_once(',')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_lookup() {
        let s: FeltSpace = FiniteSpace::new("t", vec![vec![0.0, 1.0], vec![1.0, 0.0]])
            .unwrap()
            .into();
        assert_eq!(s.distance(&Point::Index(0), &Point::Index(1)).unwrap(), 1.0);
    }

    #[test]
    fn euclid_distance() {
        let s = FeltSpace::builtin("euclid:[0,1]").unwrap();
        let d = s.distance(&Point::real(0.2), &Point::real(0.7)).unwrap();
        assert_eq!(d, 0.7 - 0.2);
        assert!((d - 0.5).abs() < 1e-15);
    }

    #[test]
    fn max_partial_distance_and_self_distance() {
        let s = FeltSpace::builtin("maxpm:0,1").unwrap();
        assert_eq!(
            s.distance(&Point::real(0.3), &Point::real(0.8)).unwrap(),
            0.8
        );
        assert_eq!(
            s.distance(&Point::real(0.4), &Point::real(0.4)).unwrap(),
            0.4
        );
    }

    #[test]
    fn discrete_builtin() {
        let s = FeltSpace::builtin("discrete:3").unwrap();
        let f = s.as_finite().unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(f.d(1, 1), 0.0);
        assert_eq!(f.d(0, 2), 1.0);
    }

    #[test]
    fn domain_violations() {
        let s = FeltSpace::builtin("euclid:[0,1]").unwrap();
        assert!(matches!(
            s.distance(&Point::real(1.5), &Point::real(0.0)),
            Err(FeltError::OutOfDomain { .. })
        ));
        let f = FeltSpace::builtin("discrete:2").unwrap();
        assert!(matches!(
            f.distance(&Point::Index(2), &Point::Index(0)),
            Err(FeltError::IndexOutOfRange { index: 2, n: 2, .. })
        ));
        assert!(matches!(
            f.distance(&Point::real(0.0), &Point::Index(0)),
            Err(FeltError::PointKind(_))
        ));
    }

    #[test]
    fn rejects_bad_matrices() {
        let err = FiniteSpace::new("t", vec![vec![0.0, 1.0], vec![1.0]]).unwrap_err();
        assert!(err.to_string().contains("row 1 has 1 entries, expected 2"));
        let err = FiniteSpace::new("t", vec![vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap_err();
        assert!(err.to_string().contains("distance[0][1] = -1 is negative"));
        assert!(FiniteSpace::new("t", vec![]).is_err());
    }

    #[test]
    fn unknown_builtins() {
        for bad in [
            "euclid",
            "euclid:1",
            "taxicab:0,1",
            "discrete:x",
            "maxpm:[-1,1]",
        ] {
            assert!(FeltSpace::builtin(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn invalid_distance_is_reported() {
        let s = ContinuousSpace::new(
            "bad",
            DomainBox::interval(0.0, 1.0).unwrap(),
            Arc::new(|x: &[f64], y: &[f64]| x[0] - y[0]),
        );
        assert!(matches!(
            s.eval(&[0.0], &[1.0]),
            Err(FeltError::InvalidDistance { .. })
        ));
    }
}
