//! Hurwitz zeta and Dirichlet L-function evaluation, and integrators for
//! the holomorphic flow s′ = λL(s) and the reaction–diffusion flow
//! ∂ₜu = Δu + λL(u).

pub mod dirichlet;
pub mod error;
pub mod flow_ode;
pub mod flow_pde;
pub mod output;
pub mod special;

pub use error::{Result, ZetaError};
