//! Exact computation of the Brauer–Manin obstruction to strong approximation
//! on the punctured affine cone over a quadric surface.
//!
//! The default instance is the cone over
//! `X0² + 47X1² = 103X2² + 17·47·103·X3²`. Its Brauer class is the quaternion
//! algebra `(17, ℓ_P)` for the tangent form `ℓ_P` at an integral point `P`,
//! and for every smooth point `Q̃` mod 17 exactly half of the sixteen scalar
//! multiples `λQ̃` carry local invariant 1/2 at 17. No coprime integer
//! solution reduces to one of those.
//!
//! ```
//! use brauer_cone::brauer::BrauerClass;
//! use brauer_cone::quadric::{ConePoint, QuadricForm};
//! use brauer_cone::search::search_integral_points;
//!
//! let form = QuadricForm::default_instance();
//! let pool = search_integral_points(&form, 40)?;
//! let base = ConePoint::new([35, 3, 4, 0], &form)?;
//! let class = BrauerClass::new(&form, base)?.with_pool(pool)?;
//!
//! assert!(class.certify_nonliftable(&[1, 0, 1, 0], 17)?);
//! assert!(!class.certify_nonliftable(&[3, 0, 3, 0], 17)?);
//! # Ok::<(), brauer_cone::Error>(())
//! ```

pub mod brauer;
pub mod config;
mod error;
pub mod localarith;
pub mod quadric;
pub mod search;

#[cfg(doctest)]
mod book;

pub use error::{Error, Result};
