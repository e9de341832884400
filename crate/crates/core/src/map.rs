//! Self-maps on felt spaces.

use std::fmt;
use std::sync::Arc;

use crate::error::{FeltError, Result};
use crate::space::{FeltSpace, Point};

pub type MapFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A total self-map: an index table on a finite space or a callable on a
/// continuous one.
#[derive(Clone)]
pub enum SelfMap {
    Table { name: String, table: Vec<usize> },
    Func { name: String, f: MapFn },
}

impl fmt::Debug for SelfMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelfMap::Table { name, table } => f
                .debug_struct("Table")
                .field("name", name)
                .field("table", table)
                .finish(),
            SelfMap::Func { name, .. } => f
                .debug_struct("Func")
                .field("name", name)
                .finish_non_exhaustive(),
        }
    }
}

impl SelfMap {
    pub fn table(name: impl Into<String>, table: Vec<usize>) -> Self {
        SelfMap::Table {
            name: name.into(),
            table,
        }
    }

    pub fn func(name: impl Into<String>, f: MapFn) -> Self {
        SelfMap::Func {
            name: name.into(),
            f,
        }
    }

    pub fn scalar(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::func(name, Arc::new(move |x: &[f64]| vec![f(x[0])]))
    }

    pub fn identity(n: usize) -> Self {
        Self::table("ident", (0..n).collect())
    }

    /// Builtin maps. On continuous spaces: `cos`, `half`, `ident`, `const:v`
    /// and `affine:c,b` (x ↦ c·x + b, applied per coordinate). On finite
    /// spaces only `ident` and `const:i` (i an index) make sense.
    pub fn builtin(spec: &str, space: &FeltSpace) -> Result<Self> {
        let unknown = || FeltError::UnknownBuiltin(spec.to_string());
        let (kind, args) = match spec.split_once(':') {
            Some((k, a)) => (k, Some(a.trim())),
            None => (spec, None),
        };
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| unknown());
        match space {
            FeltSpace::Finite(fs) => match (kind, args) {
                ("ident", None) => Ok(Self::identity(fs.len())),
                ("const", Some(a)) => {
                    let i = match a.parse::<usize>() {
                        Ok(i) => i,
                        Err(_) => fs.index_of(a).ok_or_else(unknown)?,
                    };
                    fs.check_index(i)?;
                    Ok(Self::table(spec, vec![i; fs.len()]))
                }
                ("cos" | "half" | "affine", _) => Err(FeltError::Incompatible {
                    map: spec.to_string(),
                    space: fs.name().to_string(),
                    reason: "real-valued builtins need a continuous space".into(),
                }),
                _ => Err(unknown()),
            },
            FeltSpace::Continuous(_) => match (kind, args) {
                ("cos", None) => Ok(Self::func(
                    "cos",
                    Arc::new(|x: &[f64]| x.iter().map(|v| v.cos()).collect()),
                )),
                ("half", None) => Ok(Self::func(
                    "half",
                    Arc::new(|x: &[f64]| x.iter().map(|v| v / 2.0).collect()),
                )),
                ("ident", None) => Ok(Self::func("ident", Arc::new(|x: &[f64]| x.to_vec()))),
                ("const", Some(a)) => {
                    let v = num(a)?;
                    Ok(Self::func(
                        spec,
                        Arc::new(move |x: &[f64]| vec![v; x.len()]),
                    ))
                }
                ("affine", Some(a)) => {
                    let (c, b) = a.split_once(',').ok_or_else(unknown)?;
                    let (c, b) = (num(c)?, num(b)?);
                    Ok(Self::func(
                        spec,
                        Arc::new(move |x: &[f64]| x.iter().map(|v| c * v + b).collect()),
                    ))
                }
                _ => Err(unknown()),
            },
        }
    }

    pub fn name(&self) -> &str {
        match self {
            SelfMap::Table { name, .. } | SelfMap::Func { name, .. } => name,
        }
    }

    pub fn as_table(&self) -> Option<&[usize]> {
        match self {
            SelfMap::Table { table, .. } => Some(table),
            SelfMap::Func { .. } => None,
        }
    }

    /// Confirms the map can act on `space`: tables must have one in-range
    /// entry per point; callables need a continuous space.
    pub fn check_compatible(&self, space: &FeltSpace) -> Result<()> {
        let incompatible = |reason: String| FeltError::Incompatible {
            map: self.name().to_string(),
            space: space.name().to_string(),
            reason,
        };
        match (self, space) {
            (SelfMap::Table { table, .. }, FeltSpace::Finite(fs)) => {
                if table.len() != fs.len() {
                    return Err(incompatible(format!(
                        "table has {} entries, space has {} points",
                        table.len(),
                        fs.len()
                    )));
                }
                if let Some((i, &m)) = table.iter().enumerate().find(|(_, &m)| m >= fs.len()) {
                    return Err(incompatible(format!(
                        "map[{i}] = {m} is out of range 0..{}",
                        fs.len()
                    )));
                }
                Ok(())
            }
            (SelfMap::Func { .. }, FeltSpace::Continuous(_)) => Ok(()),
            (SelfMap::Table { .. }, FeltSpace::Continuous(_)) => Err(incompatible(
                "index tables act on finite spaces only".into(),
            )),
            (SelfMap::Func { .. }, FeltSpace::Finite(_)) => Err(incompatible(
                "callables act on continuous spaces only".into(),
            )),
        }
    }

    /// `f(x)`, with the image checked against the domain.
    pub fn apply(&self, space: &FeltSpace, x: &Point) -> Result<Point> {
        space.contains(x)?;
        match (self, x) {
            (SelfMap::Table { table, .. }, Point::Index(i)) => {
                let image = *table.get(*i).ok_or_else(|| FeltError::Incompatible {
                    map: self.name().to_string(),
                    space: space.name().to_string(),
                    reason: format!("no entry for index {i}"),
                })?;
                let y = Point::Index(image);
                space.contains(&y).map_err(|_| self.escape(x, &y))?;
                Ok(y)
            }
            (SelfMap::Func { f, .. }, Point::Coords(c)) => {
                let y = Point::Coords(f(c));
                space.contains(&y).map_err(|_| self.escape(x, &y))?;
                Ok(y)
            }
            _ => Err(FeltError::Incompatible {
                map: self.name().to_string(),
                space: space.name().to_string(),
                reason: format!("cannot evaluate at {x}"),
            }),
        }
    }

    /// `f^k(x)`.
    pub fn apply_n(&self, space: &FeltSpace, x: &Point, k: usize) -> Result<Point> {
        let mut cur = x.clone();
        for _ in 0..k {
            cur = self.apply(space, &cur)?;
        }
        Ok(cur)
    }

    /// Raw image of coordinates for the samplers; closure is checked.
    pub(crate) fn apply_coords(&self, space: &FeltSpace, x: &[f64]) -> Result<Vec<f64>> {
        match (self, space) {
            (SelfMap::Func { f, .. }, FeltSpace::Continuous(cs)) => {
                let y = f(x);
                if cs.domain().contains(&y) {
                    Ok(y)
                } else {
                    Err(self.escape(&Point::Coords(x.to_vec()), &Point::Coords(y)))
                }
            }
            _ => Err(FeltError::Incompatible {
                map: self.name().to_string(),
                space: space.name().to_string(),
                reason: "coordinate evaluation needs a callable on a continuous space".into(),
            }),
        }
    }

    fn escape(&self, x: &Point, y: &Point) -> FeltError {
        FeltError::ImageEscapes {
            map: self.name().to_string(),
            point: x.to_string(),
            image: y.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::FiniteSpace;

    fn two_point() -> FeltSpace {
        FiniteSpace::new("two", vec![vec![0.0, 1.0], vec![1.0, 0.0]])
            .unwrap()
            .into()
    }

    #[test]
    fn table_lookup() {
        let s = two_point();
        let m = SelfMap::table("swap", vec![1, 0]);
        assert_eq!(m.apply(&s, &Point::Index(0)).unwrap(), Point::Index(1));
    }

    #[test]
    fn cos_and_half() {
        let s = FeltSpace::builtin("euclid:[0,1]").unwrap();
        let cos = SelfMap::builtin("cos", &s).unwrap();
        assert_eq!(cos.apply(&s, &Point::real(0.0)).unwrap(), Point::real(1.0));
        let h = FeltSpace::builtin("maxpm:[0,1]").unwrap();
        let half = SelfMap::builtin("half", &h).unwrap();
        assert_eq!(half.apply(&h, &Point::real(0.8)).unwrap(), Point::real(0.4));
    }

    #[test]
    fn escaping_image_is_an_error() {
        let s = FeltSpace::builtin("euclid:[0,1]").unwrap();
        let m = SelfMap::builtin("affine:2,0", &s).unwrap();
        assert!(matches!(
            m.apply(&s, &Point::real(0.75)),
            Err(FeltError::ImageEscapes { .. })
        ));
        let m = SelfMap::builtin("const:3", &s).unwrap();
        assert!(m.apply(&s, &Point::real(0.1)).is_err());
    }

    #[test]
    fn apply_n_matches_repeated_apply() {
        let s = FeltSpace::builtin("euclid:[0,1]").unwrap();
        let cos = SelfMap::builtin("cos", &s).unwrap();
        let mut x = Point::real(0.3);
        for _ in 0..7 {
            x = cos.apply(&s, &x).unwrap();
        }
        assert_eq!(cos.apply_n(&s, &Point::real(0.3), 7).unwrap(), x);
    }

    #[test]
    fn compatibility() {
        let s = two_point();
        assert!(SelfMap::table("bad", vec![0, 2])
            .check_compatible(&s)
            .is_err());
        assert!(SelfMap::table("short", vec![0])
            .check_compatible(&s)
            .is_err());
        assert!(SelfMap::builtin("cos", &s).is_err());
        assert_eq!(
            SelfMap::builtin("const:1", &s).unwrap().as_table(),
            Some(&[1usize, 1][..])
        );
        assert!(SelfMap::builtin("nope", &s).is_err());
    }
}
