//! Finite-difference complex Hessians, fiber quadrature over affine charts of
//! projective space, and the small dense linear algebra everything else uses.

pub mod linalg;
pub(crate) mod quadrature;
mod stencil;

pub use quadrature::{fiber_integrate, fiber_integrate_complex, FiberNodes, FiberQuadratureRule};
pub use stencil::{
    complex_hessian, matrix_jet, scalar_jet, ComplexHessianStencil, MatrixJet, ScalarJet,
};

use crate::error::Result;
use crate::scalar::{Complex, Real};

/// A smooth real-valued function of chart coordinates.
///
/// Metric weights, Kähler potentials and `log G(z, e(w))` all implement this.
pub trait ChartScalarField<T: Real> {
    fn eval(&self, u: &[Complex<T>]) -> Result<T>;
}

impl<T: Real, F> ChartScalarField<T> for F
where
    F: Fn(&[Complex<T>]) -> Result<T>,
{
    fn eval(&self, u: &[Complex<T>]) -> Result<T> {
        self(u)
    }
}
