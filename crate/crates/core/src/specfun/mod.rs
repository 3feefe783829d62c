//! Special functions: complex log-gamma, the error function, and Meijer
//! G-functions of one and two variables by contour quadrature.

mod egbmgf;
mod erf;
mod gamma;
pub(crate) mod kernel;
mod meijer;
pub mod quad;

pub use egbmgf::{
    chi_row, egbmgf, egbmgf_contours, egbmgf_contours_with_target, egbmgf_estimate, Egbmgf2Spec,
    EgbmgfEstimate, GammaBlock,
};
pub use erf::{erf, erfc};
pub use gamma::{ln_abs_gamma, ln_binomial, ln_gamma, log_gamma_complex, pole_distance};
pub use meijer::{meijer_g, meijer_g_estimate, ContourConfig, ContourEstimate, MeijerGSpec};

pub mod defaults {
    pub use super::egbmgf::DEFAULT_TARGET as BIVARIATE_TARGET;
    pub use super::meijer::DEFAULT_TARGET as UNIVARIATE_TARGET;
}
