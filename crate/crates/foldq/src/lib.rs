//! Folded cluster combinatorics of the dihedral types I2(2n).
//!
//! Unfoldings of the rank-two exchange matrices by simply laced quivers,
//! Chebyshev rings acting on their Auslander-Reiten quivers, and the
//! resulting tilting and tropical (c-/g-vector) calculus, all in exact
//! arithmetic over Q(2cos(π/2n)).

pub mod action;
pub mod algnum;
pub mod armodel;
pub mod chebrings;
pub mod cli_io;
pub mod intlin;
pub mod quiver;
pub mod scalar;
pub mod tilting;
pub mod tropical;

pub use num_rational::BigRational as Rational;

/// Element of Q(θ).
pub type Cyc = algnum::RealCycNumber;
pub type CycMatrix = scalar::Matrix<Cyc>;
pub type IntMatrix = scalar::Matrix<i64>;
