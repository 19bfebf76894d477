//! Computational toolkit for error-function ("e-") convex analysis on 1-D grids.
//!
//! A function `f` is *e-convex* for an error function `e` when
//! `f(tx + (1−t)y) ≤ t f(x) + (1−t) f(y) + t(1−t) e(x, y)` for all `x, y` and
//! `t ∈ (0, 1)`. The crate computes the discrete objects attached to that
//! notion and checks the inequalities relating them on concrete instances:
//!
//! * [`extreal`]: extended reals with `(+∞) + (−∞) = −∞`;
//! * [`funcmodel`]: grids, sampled functions and closed-form fixtures;
//! * [`errorfn`]: error-function kernels and their validation;
//! * [`transform`]: (e,y)-conjugates (brute force and linear-time), biconjugates,
//!   infimal convolutions and affine minorants;
//! * [`subdiff`]: e-subdifferential intervals, point-cloud membership, upper
//!   Dini derivatives and e-monotonicity;
//! * [`verify`]: property checks and the randomized suite;
//! * [`io`] and [`cli`]: JSON/CSV formats and the `econvex` command line.

pub mod error;
pub mod errorfn;
pub mod extreal;
pub mod funcmodel;
pub mod io;
pub mod report;
pub mod subdiff;
pub mod transform;
pub mod verify;
pub mod cli;


pub use error::{Error, Result};
pub use errorfn::ErrorFunction;
pub use extreal::ExtReal;
pub use funcmodel::{ClosedForm, Function, Grid, SampledFunction};
