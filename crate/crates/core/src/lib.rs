//! Surfaces in real projective 3-space, described by the coefficients of their
//! canonical system
//!
//! ```text
//! f_xx = b f_y + p f,    f_yy = c f_x + q f,
//! ```
//!
//! together with the machinery to verify their differential-geometric
//! characterizations numerically: Wilczynski frames, the first-order and
//! conformal Gauss maps, spectral families of connections for the two
//! twistings, and the order-six grading behind the twisted loop group.
//!
//! The matrix and expression layers are generic over the scalar type
//! ([`Matrix4<T>`] works for `f32`, `f64` and their complex counterparts,
//! [`Expr::eval`] for any [`Real`]). The geometric layers work in `f64` through
//! the aliases below.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod expr;
pub mod frame;
pub mod gauss;
pub mod linalg;
pub mod loopgroup;
pub mod report;
pub mod scalar;
pub mod surface;

use num_complex::Complex;

pub use error::{Error, Result};
pub use expr::{Expr, Var};
pub use frame::{ConnectionPair, FrameField};
pub use gauss::{GaussKind, Quadric};
pub use linalg::Matrix4;
pub use loopgroup::{Automorphism, LoopConnectionPair, Twisting};
pub use scalar::{Field, Real};
pub use surface::{Classification, InvariantJet, Rect, SurfaceModel, SurfaceSpec};

/// Real 4×4 matrix in double precision.
pub type Mat4 = Matrix4<f64>;
/// Complex 4×4 matrix in double precision.
pub type CMat4 = Matrix4<Complex<f64>>;
/// Real 4×4 matrix in single precision.
pub type Mat4f32 = Matrix4<f32>;
/// Double precision complex scalar.
pub type C64 = Complex<f64>;
