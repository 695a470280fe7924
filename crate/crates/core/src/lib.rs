//! Exact-arithmetic engine for non-Archimedean families of Floer-type data.
//!
//! The crate is organized around a small tower of coefficient rings and the
//! categorical machinery built on top of them:
//!
//! * [`exponents`] — a finitely generated real exponent group, truncated
//!   Novikov series over it, and the one-parameter family ring in `z`.
//! * [`padics`] — fixed-precision p-adic numbers, truncated Tate algebras in
//!   one and two variables, the binomial exponential `v^t`, Strassman zero
//!   bounds, and embeddings of the Novikov world into `Q_p`.
//! * [`monoid`] — constructive extension of finitely generated submonoids of
//!   the nonnegative reals to free ones, membership certificates, and the
//!   genericity test for flux forms.
//! * [`ainf`] — finite flux-decorated A-infinity categories with validation.
//! * [`bimod`] — family bimodules, Yoneda modules, truncated bar
//!   convolution, the convolution-to-diagonal comparison morphism, cones,
//!   and fiber extraction.
//! * [`linalg`] — exact rank and cohomology analysis of free complexes over
//!   the various coefficient rings.
//! * [`torus`] — flat-torus data generators and the independent geometric
//!   rank oracle.
//! * [`scan`] — the batch rank-scan pipeline combining all of the above.

pub mod coeff;
pub mod exponents;
pub mod linalg;
pub mod monoid;
pub mod padics;
pub mod rational;
