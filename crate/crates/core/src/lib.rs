//! Combinatorial algebra of Chen–Fliess series.
//!
//! Words and formal power series over a control alphabet, the shuffle and
//! quasi-shuffle products, composition and feedback products, the Hopf
//! algebra of coordinate functions of the output feedback group, rational
//! series via linear representations, and numeric evaluation of the
//! continuous- and discrete-time operators these series generate.

pub mod composition;
pub mod error;
pub mod eval;
pub mod feedback_hopf;
pub mod io;
pub mod matrix;
pub mod quasishuffle;
pub mod rational;
pub mod scalar;
pub mod series;
pub mod shuffle;
pub mod testing;
pub mod verify;
pub mod words;

pub use error::{Error, Result};
pub use scalar::{rat, rat_int, Rational, Scalar};
pub use series::{Series, Truncation};
pub use words::{bracket, left_shift, x, Alphabet, Letter, Word};
