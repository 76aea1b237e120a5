//! Exact arithmetic for threshold-gap searches and certified bound audits.
//!
//! The crate is organized around a handful of independent engines:
//!
//! - [`exactnum`]: arbitrary-precision rationals plus the [`exactnum::Magnitude`]
//!   type, a certified enclosure for positive reals far beyond positional
//!   representation (iterated-log intervals with outward rounding).
//! - [`hyperstd`]: exact algebra of the hyperstandard sets `Φ_p`
//!   (membership decision, closure maps, deficit enumeration).
//! - [`egyptian`]: Sylvester numbers and optimal Egyptian-fraction
//!   under-approximation by pruned exhaustive search; serves as the
//!   independent oracle for [`gapsearch`].
//! - [`gapsearch`]: branch-and-bound computation of the minimal
//!   `Φ_p`-sum exceeding an integer, with optimality certificates, and the
//!   dimension-1 threshold-gap reports built on top of it.
//! - [`boundchain`]: the `M_ε → α → β → l → υ` pipeline computed as
//!   certified directed bounds and compared against closed tower forms.
//! - [`constaudit`]: a registry of named constants with prime-exponent
//!   normal forms, certified enclosures, and identity/ordering audits.

pub mod boundchain;
pub mod constaudit;
pub mod egyptian;
pub mod gapsearch;
pub mod exactnum;
pub mod hyperstd;
