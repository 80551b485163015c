//! Schwarzian derivatives, spherical derivatives and normality probes for
//! one-parameter families of analytic and meromorphic functions.
//!
//! Families are written in a small expression language ([`expr`]) and
//! evaluated as order-3 complex jets ([`jet`]), which give `f`, `f'`, `f''`
//! and `f'''` exactly at a point. On top of that sit the Schwarzian and
//! spherical derivatives and pointwise checks of the Schwarzian identities
//! ([`schwarzian`]), Marty-criterion grid scans and bound checks ([`probe`]),
//! a catalog of named families ([`catalog`]), and the command-line surface
//! ([`cli`]).
//!
//! ```
//! use num_complex::Complex64;
//! use schwarzian_lab::{expr, schwarzian};
//!
//! let f = expr::parse("exp(n*z)").unwrap();
//! let jet = f.eval_jet(3.0, Complex64::new(0.25, -1.0)).unwrap();
//! let s = schwarzian::schwarzian(&jet).unwrap();
//! assert!((s - Complex64::new(-4.5, 0.0)).norm() < 1e-12);
//! ```

pub mod catalog;
pub mod cli;
pub mod expr;
pub mod jet;
pub mod output;
pub mod probe;
pub mod schwarzian;

pub use expr::{parse, FamilyExpr};
pub use jet::Jet3;
