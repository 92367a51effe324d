//! Dirac operator with an electrostatic delta-shell interaction on the unit
//! sphere: gap eigenvalues, a thin-annulus approximation of the shell, and
//! the Bessel-product inequalities behind its sharp constants.

pub mod approx;
pub mod eigenfun;
pub mod error;
pub mod inequality;
pub mod parallel;
pub mod roots;
pub mod shell;
pub mod specfun;
pub mod spectrum;

pub use error::{Error, Result};
pub use shell::{AngularMode, GapEnergy, PhysParams, ShellCoupling, Sign};
