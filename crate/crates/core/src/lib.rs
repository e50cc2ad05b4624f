//! Phase-space distributions of displaced squeezed states on a quantum torus.
//!
//! The library is organized around one pipeline:
//!
//! 1. [`torus`] — torus geometry (periods `L`, `P`, Planck constant `ħ`), the
//!    deformation parameter `θ₀ = 2πħ/LP`, plane-wave torus characters with
//!    their star-product phases, and exact (rational) theta characteristics.
//! 2. [`gaussian`] — displaced squeezed wavefunctions, the lattice Weyl
//!    displacement `D(mα₀, nβ₀)` in the position basis, the closed-form
//!    Gaussian matrix element `⟨φ|D(mα₀,nβ₀)|ψ⟩`, and an independent
//!    numerical-quadrature oracle for the same quantity.
//! 3. [`theta`] — certified evaluation of genus-2 Riemann theta functions with
//!    characteristics and of the Jacobi ϑ₃, with truncation radii derived from
//!    explicit tail bounds (never heuristics).
//! 4. [`zak`] — the torus phase-space distribution assembled from the matrix
//!    elements (a genus-2 theta function of the phase-space point), the
//!    squeezed-vacuum specialization, the two logical grid states, doubled-cell
//!    overlaps, and the flat-limit sharpening scan.
//!
//! Every closed form is paired with an independent brute-force route
//! (quadrature for matrix elements, quadrature × lattice sum for the
//! distribution) and the test suite holds the two sides together at tight
//! tolerances.
//!
//! With the default `parallel` feature, grid fills and lattice sums run on
//! rayon. The sequential fallback uses the same row-wise compensated
//! summation, so results are bit-identical across the feature flag.

pub mod error;
pub mod gaussian;
pub mod kahan;
pub mod theta;
pub mod torus;
pub mod zak;

mod exec;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use num_rational::Rational64;
