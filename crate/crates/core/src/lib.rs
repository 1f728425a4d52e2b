#![no_std]
extern crate alloc;

pub mod detineq;
pub mod error;
pub mod linalg;
pub mod sets;
pub mod submodular;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{EigenSpectrum, Matrix, SymPdMatrix};
pub use sets::{IndexSet, Partition};
pub use submodular::{InequalityVerdict, Limits, SetFunction};
