//! JSON file format for a finite space with an optional self-map.
//!
//! ```json
//! {"points": ["a","b","c"], "distance": [[0,1,2],[1,0,1],[2,1,0]], "map": [1,2,2]}
//! ```
//!
//! `distance[i][j]` is `p(points[i], points[j])` and `map[i]` is the index of
//! `f(points[i])`. `points` defaults to the indices.

use serde::{Deserialize, Serialize};

use crate::error::{FeltError, Result};
use crate::map::SelfMap;
use crate::space::FiniteSpace;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<String>>,
    pub distance: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<Vec<i64>>,
}

impl SpaceFile {
    pub fn new(space: &FiniteSpace, map: Option<&[usize]>) -> Self {
        let default_labels = space
            .labels()
            .iter()
            .enumerate()
            .all(|(i, l)| *l == i.to_string());
        Self {
            points: (!default_labels).then(|| space.labels().to_vec()),
            distance: space.rows(),
            map: map.map(|m| m.iter().map(|&i| i as i64).collect()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("space files always serialize")
    }

    /// Validate into a space and, when present, its map.
    pub fn into_parts(self, name: &str) -> Result<(FiniteSpace, Option<SelfMap>)> {
        let n = self.distance.len();
        let mut space = FiniteSpace::new(name, self.distance)?;
        if let Some(points) = self.points {
            space = space.with_labels(points)?;
        }
        let map = match self.map {
            None => None,
            Some(m) => {
                if m.len() != n {
                    return Err(FeltError::InvalidSpace(format!(
                        "map has {} entries but the space has {n} points",
                        m.len()
                    )));
                }
                let mut table = Vec::with_capacity(n);
                for (i, &v) in m.iter().enumerate() {
                    if v < 0 || v as u64 >= n as u64 {
                        return Err(FeltError::InvalidSpace(format!(
                            "map[{i}] = {v} is out of range 0..{n}"
                        )));
                    }
                    table.push(v as usize);
                }
                Some(SelfMap::table(format!("{name}:map"), table))
            }
        };
        Ok((space, map))
    }
}

/// Parse and validate a space file's contents.
pub fn parse_space_file(text: &str, name: &str) -> Result<(FiniteSpace, Option<SelfMap>)> {
    let file: SpaceFile = serde_json::from_str(text)?;
    file.into_parts(name)
}
