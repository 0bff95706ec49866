//! Finite frame theory toolkit.
//!
//! - [`linalg`]: dense complex kernel (Jacobi eigen/SVD, pseudo-inverse, powers).
//! - [`frames`]: frame operators, optimal bounds, canonical duals.
//! - [`transforms`]: operator images of frames and Riesz bases, checked
//!   against their predicted frame operators and bounds.
//! - [`sparse_seq`]: exact shift-operator counterexamples on finitely
//!   supported sequences.
//! - [`gabor_continuous`]: exact piecewise-exponential functions on the real
//!   line under modulation and translation.
//! - [`gabor_discrete`]: Gabor systems on `Z_N` as finite frames.

pub mod exact;
pub mod frames;
pub mod gabor_continuous;
pub mod gabor_discrete;
pub mod linalg;
pub mod random;
pub mod sparse_seq;
pub mod transforms;
