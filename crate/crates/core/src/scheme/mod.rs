//! The three scheme families and how they are executed.
//!
//! Stencils approximate `f'(x) ≈ (1/h) Σ mᵢ f(x + nᵢh)`; tableaus describe
//! explicit Runge-Kutta steps; multistep schemes hold Adams-Bashforth
//! weights. [`integrate`] drives either integrator over a fixed step.

mod integrate;
mod multistep;
mod stencil;
mod tableau;

pub use integrate::{continue_multistep, integrate, Stepper, Trajectory};
pub use multistep::{ab_step, MultistepScheme};
pub use stencil::{apply_stencil, StencilScheme, StencilTemplate, TemplateKind};
pub use tableau::{genome_len, rk_step, ButcherTableau};
