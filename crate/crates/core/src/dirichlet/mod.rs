//! Dirichlet characters and their L-functions.

pub mod character;
pub mod lfunction;
pub mod sigma;

pub use character::{
    prime_characters, primitive_root, principal_character, validate_character, CharacterTable,
};
pub use lfunction::{l_eval, l_eval_deriv, l_eval_detailed, LEvaluation, LFunctionHandle};
pub use sigma::{
    re_bounds_check, sigma0_estimate, sigma1_root, ReBoundsReport, Sigma0Estimate, Sigma0Grid,
};
