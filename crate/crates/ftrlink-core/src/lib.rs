//! Statistics of fluctuating two-ray (FTR) fading links, with closed-form
//! evaluators for products and sums of FTR envelopes and the end-to-end SNR
//! of RIS-assisted and amplify-and-forward relay systems.
//!
//! The crate is organised in layers:
//!
//! - [`special`] — scalar special functions (complex log-gamma, incomplete
//!   gamma, Legendre-P on `x >= 1`, Gauss 2F1) and the Mellin–Barnes contour
//!   engine behind the Meijer-G and Fox-H evaluators.
//! - [`ftr`] — the FTR fading law itself: mixture coefficients, PDF/CDF of
//!   the squared and envelope variates, moments, and a generative sampler.
//! - [`stats`] — products of independent FTR envelopes and sums of such
//!   products (cascade and multi-element combining statistics), plus the
//!   series truncation error.
//! - [`ris`] — RIS link SNR, the binary-search phase optimizer and its
//!   fixed point, and RIS outage / bit-error metrics.
//! - [`af`] — AF relay SNR with hardware impairments, the generic CDF
//!   integral, closed forms, optimal power split, and AF outage / ABEP.
//! - [`mc`] — deterministic parallel Monte-Carlo estimators that mirror
//!   every closed form.
//!
//! All contour quadratures follow the convention
//! `H(z) = (2*pi*i)^-D ∮...∮ (gamma factors) * prod_i z_i^{-s_i} ds` on
//! truncated vertical lines; see [`special::contour`].

pub mod af;
pub mod error;
pub mod ftr;
pub mod mc;
pub mod quad;
pub mod ris;
pub mod special;
pub mod stats;

pub use error::{Error, Result};
pub use ftr::{FtrParams, SeriesControl};
pub use special::foxh::FoxHSpec;
pub use special::meijer::MeijerGSpec;
