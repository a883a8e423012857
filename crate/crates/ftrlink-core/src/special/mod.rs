//! Scalar special functions and the Mellin–Barnes contour engine.

pub mod contour;
pub mod foxh;
pub mod gamma;
pub mod hyp2f1;
pub mod legendre;
pub mod meijer;

pub use contour::{ContourSettings, MellinBarnes};
pub use foxh::{fox_h_multivariate, fox_h_single, FoxHSpec};
pub use gamma::{incomplete_gamma, ln_gamma, ln_gamma_complex, GammaKind};
pub use hyp2f1::gauss_2f1;
pub use legendre::legendre_p;
pub use meijer::{meijer_g, MeijerGSpec};
