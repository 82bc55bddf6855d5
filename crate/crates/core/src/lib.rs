pub mod adiabaticity;
pub mod error;
pub mod export;
pub mod holonomy;
pub mod linalg;
pub mod path;
pub mod propagator;
pub mod schedule;
pub mod spline;
pub mod stirap;

pub use error::{Error, Result};
pub use linalg::{
    eigensystem, smooth_frames, unitary_exp, EigenFrame, HermitianOperator, StateVector,
    UnitaryOperator,
};
pub use num_complex::Complex64 as C64;
