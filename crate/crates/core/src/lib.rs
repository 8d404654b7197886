//! Dense symmetric matrix inversion without square roots, by modified
//! Gaussian elimination, alongside Cholesky, LDLᵀ and Krishnamoorthy–Menon
//! baselines. Every kernel can report its exact multiplication/division and
//! square-root counts.
//!
//! ```
//! use syminv_core::{invert_v2, Matrix, OpCounter};
//!
//! let a = Matrix::from_rows(&[[4.0, 1.0], [1.0, 3.0]]).unwrap();
//! let mut ops = OpCounter::new();
//! let inv = invert_v2(&a, Some(&mut ops)).unwrap();
//! assert!((inv[(0, 0)] - 3.0 / 11.0).abs() < 1e-15);
//! assert_eq!(ops.muldiv, 6);
//! ```

pub mod baselines;
pub mod complexity;
pub mod count;
pub mod error;
pub mod genbench;
pub mod io;
pub mod matrix;
pub mod modgauss;
pub mod required;
pub mod syminv;
pub mod verify;

pub use baselines::{invert_cholesky, invert_km, invert_ldl};
pub use complexity::{q_theor, s_theor, CountMethod};
pub use count::{NoCount, OpCounter, Tally};
pub use error::{Error, Result};
pub use genbench::{
    emit_report, generate, run_experiment, FamilyKind, InversionReport, MatrixFamily, Method,
};
pub use matrix::{
    frobenius_norm, matmul, norm2_estimate, residual_frobenius, Matrix, SymmetryCheck,
};
pub use required::RequiredSet;
pub use syminv::{invert_symmetric_robust, invert_v1, invert_v2, invert_v2_reference};
