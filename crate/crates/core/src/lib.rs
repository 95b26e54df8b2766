//! Leading-edge asymptotics for the small-dispersion Korteweg–de Vries
//! equation `u_t + 6 u u_x + ε² u_xxx = 0`.
//!
//! Near the left edge of the dispersive shock the solution is described by
//! the Hastings–McLeod solution of Painlevé II. This crate evaluates that
//! description from first principles and checks it against direct
//! simulation:
//!
//! * [`profile`]: initial data, branch inverses, the gradient catastrophe.
//! * [`hopf`]: the dispersionless solution by characteristics.
//! * [`edge`]: the confluent Whitham system for the leading edge, the
//!   phase function and the admissibility inequalities.
//! * [`painleve2`]: the Hastings–McLeod table.
//! * [`expansion`]: the two-term asymptotic expansion at the edge.
//! * [`kdvsim`]: an ETDRK4 Fourier pseudospectral KdV solver.
//! * [`harness`]: end-to-end comparison, onset detection, figure output.

// negated comparisons reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod airy;
pub mod config;
pub mod csv;
pub mod edge;
pub mod error;
pub mod expansion;
pub mod harness;
pub mod hopf;
pub mod kdvsim;
pub mod painleve2;
pub mod profile;
pub mod quadrature;

pub use config::Config;
pub use csv::Table;
pub use edge::{EdgeSolver, EdgeState, WindowReport};
pub use error::{Error, Result};
pub use expansion::{Expansion, ExpansionTerms};
pub use harness::{ComparisonReport, Figure1, Figure1Options, Figure1Summary};
pub use hopf::{Branch, HopfSolution};
pub use kdvsim::{Field, Invariants, SimConfig};
pub use painleve2::{AuxValues, HmTable};
pub use profile::{builtin_sech2, catastrophe, CatastrophePoint, Profile, Sech2};
