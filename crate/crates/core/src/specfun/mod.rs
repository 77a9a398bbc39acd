//! Special functions used by the closed forms.

mod expsum;
mod gamma;
mod hyper;

pub use expsum::{
    build_e1_expsum, default_expsum, e1_expsum_cotangent_recipe, recipe_b, recipe_theta,
    validation_grid, DivergentTermPolicy, E1ExpSum, ExpTerm, DEFAULT_TERM_COUNT,
    MAX_CONSTRUCTION_ERROR, MIN_TERM_COUNT,
};
pub use gamma::{
    exp_integral_e1, gamma, gamma1pm1, ln_gamma, regularized_upper_gamma,
    scaled_exp_integral_e1, scaled_upper_gamma, upper_incomplete_gamma, EULER_GAMMA,
};
pub use hyper::{gauss_2f1_ratio, tricomi_u};
