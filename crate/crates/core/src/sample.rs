//! Reproducible point sources for sampled checks on continuous spaces.
//!
//! Every sampled check sees the same deterministic grid (21 points per axis)
//! followed by seeded uniform draws from the domain box.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{FeltError, Result};
use crate::space::{ContinuousSpace, DomainBox};
use crate::tolerance::Tolerances;

pub const GRID_PER_AXIS: usize = 21;
/// Above this many points the full product grid is replaced by the box
/// diagonal.
const MAX_GRID_POINTS: usize = 10_000;

pub struct Sampler {
    domain: DomainBox,
    grid: Vec<Vec<f64>>,
    rng: ChaCha8Rng,
    draws: usize,
}

impl Sampler {
    pub fn new(space: &ContinuousSpace, tol: &Tolerances) -> Result<Self> {
        Self::with_seed(space, tol.sample_count, tol.seed)
    }

    pub fn with_seed(space: &ContinuousSpace, draws: usize, seed: u64) -> Result<Self> {
        let domain = space.domain().clone();
        if !domain.is_bounded() {
            return Err(FeltError::Precondition(format!(
                "sampling needs a bounded domain; `{}` is unbounded",
                space.name()
            )));
        }
        Ok(Self {
            grid: grid_points(&domain),
            domain,
            rng: ChaCha8Rng::seed_from_u64(seed),
            draws,
        })
    }

    pub fn grid(&self) -> &[Vec<f64>] {
        &self.grid
    }

    pub fn uniform(&mut self) -> Vec<f64> {
        let (lo, hi) = (self.domain.lower().to_vec(), self.domain.upper().to_vec());
        lo.iter()
            .zip(&hi)
            .map(|(&a, &b)| if a == b { a } else { self.rng.gen_range(a..=b) })
            .collect()
    }

    pub fn unit(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    /// Grid points then `draws` uniform points.
    pub fn points(&mut self) -> Vec<Vec<f64>> {
        let mut out = self.grid.clone();
        for _ in 0..self.draws {
            out.push(self.uniform());
        }
        out
    }

    /// All ordered grid pairs then `draws` uniform pairs.
    pub fn pairs(&mut self) -> Vec<(Vec<f64>, Vec<f64>)> {
        let mut out = Vec::with_capacity(self.grid.len().pow(2) + self.draws);
        for a in &self.grid {
            for b in &self.grid {
                out.push((a.clone(), b.clone()));
            }
        }
        for _ in 0..self.draws {
            out.push((self.uniform(), self.uniform()));
        }
        out
    }

    /// Grid triples (when the grid is small enough) then `draws` uniform
    /// triples.
    pub fn triples(&mut self) -> Vec<[Vec<f64>; 3]> {
        let mut out = Vec::new();
        if self.grid.len() <= GRID_PER_AXIS {
            for a in &self.grid {
                for b in &self.grid {
                    for c in &self.grid {
                        out.push([a.clone(), b.clone(), c.clone()]);
                    }
                }
            }
        }
        for _ in 0..self.draws {
            out.push([self.uniform(), self.uniform(), self.uniform()]);
        }
        out
    }
}

fn grid_points(domain: &DomainBox) -> Vec<Vec<f64>> {
    let axis = |k: usize, i: usize| {
        let (lo, hi) = (domain.lower()[k], domain.upper()[k]);
        if i + 1 == GRID_PER_AXIS {
            hi
        } else {
            lo + (hi - lo) * i as f64 / (GRID_PER_AXIS - 1) as f64
        }
    };
    let dim = domain.dim();
    let full = GRID_PER_AXIS
        .checked_pow(dim as u32)
        .filter(|&t| t <= MAX_GRID_POINTS);
    match full {
        Some(total) => (0..total)
            .map(|mut code| {
                (0..dim)
                    .map(|k| {
                        let i = code % GRID_PER_AXIS;
                        code /= GRID_PER_AXIS;
                        axis(k, i)
                    })
                    .collect()
            })
            .collect(),
        None => (0..GRID_PER_AXIS)
            .map(|i| (0..dim).map(|k| axis(k, i)).collect())
            .collect(),
    }
}
