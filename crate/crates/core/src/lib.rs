//! Fixed-point toolkit for felt metric spaces.
//!
//! A felt metric generalizes a metric by allowing `p(x, x) > 0`. This crate
//! checks the felt metric axioms and the band-type contraction conditions
//! (exactly on finite spaces, by sampling on continuous ones) and runs
//! Picard iteration with certification of the limit as a fixed point.
//!
//! ```
//! use feltfp_core::{solver, FeltSpace, Point, SelfMap, Tolerances};
//!
//! let space = FeltSpace::builtin("maxpm:[0,2]").unwrap();
//! let half = SelfMap::builtin("half", &space).unwrap();
//! let r = solver::solve(&space, &half, &Point::real(2.0), &Tolerances::default()).unwrap();
//! assert!(r.certified);
//! assert_eq!(r.x_star, Point::real(0.0));
//! ```

pub mod axioms;
pub mod contraction;
pub mod error;
pub mod format;
pub mod map;
pub mod oracle;
pub mod report;
pub mod sample;
pub mod solver;
pub mod space;
pub mod tolerance;

pub use error::{FeltError, Result};
pub use map::SelfMap;
pub use report::{CheckReport, Scope, Verdict, Witness};
pub use space::{ContinuousSpace, DomainBox, FeltSpace, FiniteSpace, Point};
pub use tolerance::Tolerances;
