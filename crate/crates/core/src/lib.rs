//! Space-inhomogeneous two-state quantum walks on the cycle graph `C_n`:
//! evolution operators, spectra (direct and through a Jacobi-matrix
//! reduction with quadratic lift), and period certification.

pub mod coin;
pub mod error;
pub mod io;
pub mod jacobi;
pub mod lift;
pub mod linalg;
pub mod periodicity;
pub mod sample;
pub mod verdict;
pub mod verify;
pub mod walk;

pub use coin::{Coin2x2, CoinLayout, CoinSpectral, IsoLayout};
pub use error::{Error, Result};
pub use verdict::{Method, PeriodVerdict, RootOfUnityCert, SearchBound};
pub use walk::{ShiftKind, StateVector, WalkUnitary};
pub use jacobi::{CharPoly, JacobiMatrix};
pub use lift::{LiftKind, LiftedEigen, LiftedSpectrum};
pub use periodicity::{period, Limits, Strategy};
