//! Numerical laboratory for Taylor backward-shift dynamics and simultaneous
//! polynomial approximation on Bergman, Hardy and circle spaces: exact
//! series arithmetic, domain quadrature and norms, Cantor/Dirichlet boundary
//! sets, constructive universal-series builders and the Cauchy-kernel mixing
//! machinery.

pub mod approx;
pub mod area;
pub mod cantor;
pub mod circle;
pub mod domain;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod norms;
pub mod quad;
pub mod series;

pub use circle::{CircleArc, CirclePoint, CompactCircleSet};
pub use domain::{CellClass, Domain, Rect};
pub use error::{CoreError, Result};
pub use norms::{NormKind, NormReport, NormSpec};
pub use series::{PowerSeries, TrigPolynomial};
