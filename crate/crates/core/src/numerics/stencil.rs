use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::linalg::CMatrix;
use super::ChartScalarField;
use crate::error::{Error, Result};
use crate::scalar::{cplx, is_finite, lit, Complex, Real};

/// Finite-difference stencil for mixed `∂²/∂u_a∂ū_b` derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexHessianStencil<T> {
    pub step: T,
    pub order: u8,
    pub richardson: bool,
}

impl<T: Real> ComplexHessianStencil<T> {
    pub fn new(step: T, order: u8, richardson: bool) -> Result<Self> {
        if !(step > T::zero()) || !is_finite(step) {
            return Err(Error::InvalidInput(format!(
                "stencil step must be positive, got {step}"
            )));
        }
        if order != 2 && order != 4 {
            return Err(Error::InvalidInput(format!(
                "stencil order must be 2 or 4, got {order}"
            )));
        }
        Ok(Self {
            step,
            order,
            richardson,
        })
    }

    pub fn with_step(self, step: T) -> Self {
        Self { step, ..self }
    }

    fn extrapolation_weight(&self) -> T {
        // error of the base formula is O(h^order)
        lit::<T>(2f64.powi(self.order as i32))
    }
}

impl<T: Real> Default for ComplexHessianStencil<T> {
    /// Fourth order at step 1e-3; see the crate README for why the default is
    /// not the plain second-order formula.
    fn default() -> Self {
        Self {
            step: lit(1e-3),
            order: 4,
            richardson: false,
        }
    }
}

fn shifted<T: Real>(point: &[Complex<T>], moves: &[(usize, T)]) -> Vec<Complex<T>> {
    let mut p = point.to_vec();
    for &(k, s) in moves {
        let var = k / 2;
        if k % 2 == 0 {
            p[var].re += s;
        } else {
            p[var].im += s;
        }
    }
    p
}

fn eval_checked<T: Real, F: ChartScalarField<T> + ?Sized>(f: &F, p: &[Complex<T>]) -> Result<T> {
    let v = f.eval(p)?;
    if !is_finite(v) {
        return Err(Error::domain("non-finite function value inside stencil", p));
    }
    Ok(v)
}

/// Real Hessian entries needed for the complex Hessian at one step size.
fn real_hessian<T: Real, F: ChartScalarField<T> + ?Sized>(
    f: &F,
    point: &[Complex<T>],
    h: T,
    order: u8,
) -> Result<DMatrix<T>> {
    let dim = 2 * point.len();
    let mut d = DMatrix::<T>::zeros(dim, dim);
    let f0 = eval_checked(f, point)?;
    let two = lit::<T>(2.0);
    for k in 0..dim {
        let fp = eval_checked(f, &shifted(point, &[(k, h)]))?;
        let fm = eval_checked(f, &shifted(point, &[(k, -h)]))?;
        d[(k, k)] = if order == 2 {
            (fp - two * f0 + fm) / (h * h)
        } else {
            let fp2 = eval_checked(f, &shifted(point, &[(k, two * h)]))?;
            let fm2 = eval_checked(f, &shifted(point, &[(k, -two * h)]))?;
            (-fp2 + lit::<T>(16.0) * fp - lit::<T>(30.0) * f0 + lit::<T>(16.0) * fm - fm2)
                / (lit::<T>(12.0) * h * h)
        };
    }
    let cross = |k: usize, l: usize, h: T| -> Result<T> {
        let pp = eval_checked(f, &shifted(point, &[(k, h), (l, h)]))?;
        let pm = eval_checked(f, &shifted(point, &[(k, h), (l, -h)]))?;
        let mp = eval_checked(f, &shifted(point, &[(k, -h), (l, h)]))?;
        let mm = eval_checked(f, &shifted(point, &[(k, -h), (l, -h)]))?;
        Ok((pp - pm - mp + mm) / (lit::<T>(4.0) * h * h))
    };
    // Only pairs belonging to different complex variables enter the complex
    // Hessian; the (x_a, y_a) pair cancels.
    for a in 0..point.len() {
        for b in (a + 1)..point.len() {
            for &(k, l) in &[
                (2 * a, 2 * b),
                (2 * a + 1, 2 * b + 1),
                (2 * a, 2 * b + 1),
                (2 * a + 1, 2 * b),
            ] {
                let v = if order == 2 {
                    cross(k, l, h)?
                } else {
                    (lit::<T>(4.0) * cross(k, l, h)? - cross(k, l, two * h)?) / lit::<T>(3.0)
                };
                d[(k, l)] = v;
                d[(l, k)] = v;
            }
        }
    }
    Ok(d)
}

fn complexify<T: Real>(d: &DMatrix<T>, n: usize) -> CMatrix<T> {
    let quarter = lit::<T>(0.25);
    CMatrix::<T>::from_fn(n, n, |a, b| {
        let (xa, ya, xb, yb) = (2 * a, 2 * a + 1, 2 * b, 2 * b + 1);
        if a == b {
            cplx(quarter * (d[(xa, xa)] + d[(ya, ya)]), T::zero())
        } else {
            cplx(
                quarter * (d[(xa, xb)] + d[(ya, yb)]),
                quarter * (d[(xa, yb)] - d[(ya, xb)]),
            )
        }
    })
}

/// Matrix of mixed derivatives `∂²f/∂u_a∂ū_b` at `point`.
///
/// Uses `∂²/∂z∂z̄ = ¼(∂²/∂x² + ∂²/∂y²)` on the diagonal and four-point cross
/// differences for pairs of distinct variables.
pub fn complex_hessian<T: Real, F: ChartScalarField<T> + ?Sized>(
    f: &F,
    point: &[Complex<T>],
    stencil: &ComplexHessianStencil<T>,
) -> Result<CMatrix<T>> {
    let n = point.len();
    let h = stencil.step;
    let d = real_hessian(f, point, h, stencil.order)?;
    let d = if stencil.richardson {
        let d2 = real_hessian(f, point, h + h, stencil.order)?;
        let w = stencil.extrapolation_weight();
        (d * w - d2) / (w - T::one())
    } else {
        d
    };
    Ok(complexify(&d, n))
}

/// Value, `∂_z` and `∂_z∂_z̄` of a matrix-valued function of one complex variable.
#[derive(Debug, Clone)]
pub struct MatrixJet<T: Real> {
    pub value: CMatrix<T>,
    pub dz: CMatrix<T>,
    pub dzdzbar: CMatrix<T>,
}

/// Value, `∂_z` and `∂_z∂_z̄` of a real function of one complex variable.
#[derive(Debug, Clone, Copy)]
pub struct ScalarJet<T: Real> {
    pub value: T,
    pub dz: Complex<T>,
    pub dzdzbar: T,
}

fn check_matrix<T: Real>(m: &CMatrix<T>, z: Complex<T>) -> Result<()> {
    if m.iter().all(|x| is_finite(x.re) && is_finite(x.im)) {
        Ok(())
    } else {
        Err(Error::domain("non-finite matrix entry inside stencil", z))
    }
}

#[allow(clippy::type_complexity)]
fn jet_once<T: Real, F>(
    f: &F,
    z: Complex<T>,
    center: &CMatrix<T>,
    h: T,
    order: u8,
) -> Result<(CMatrix<T>, CMatrix<T>, CMatrix<T>, CMatrix<T>)>
where
    F: Fn(Complex<T>) -> Result<CMatrix<T>>,
{
    let at = |dx: T, dy: T| -> Result<CMatrix<T>> {
        let p = z + cplx(dx, dy);
        let m = f(p)?;
        check_matrix(&m, p)?;
        Ok(m)
    };
    let zero = T::zero();
    let two = lit::<T>(2.0);
    let c = |x: f64| Complex::new(lit::<T>(x), T::zero());
    let xp = at(h, zero)?;
    let xm = at(-h, zero)?;
    let yp = at(zero, h)?;
    let ym = at(zero, -h)?;
    let hh = Complex::new(h, T::zero());
    if order == 2 {
        let dx = (&xp - &xm) * (c(0.5) / hh);
        let dy = (&yp - &ym) * (c(0.5) / hh);
        let dxx = (&xp - center * c(2.0) + &xm) / (hh * hh);
        let dyy = (&yp - center * c(2.0) + &ym) / (hh * hh);
        Ok((dx, dy, dxx, dyy))
    } else {
        let xp2 = at(two * h, zero)?;
        let xm2 = at(-two * h, zero)?;
        let yp2 = at(zero, two * h)?;
        let ym2 = at(zero, -two * h)?;
        let dx = ((&xp - &xm) * c(8.0) - (&xp2 - &xm2)) / (c(12.0) * hh);
        let dy = ((&yp - &ym) * c(8.0) - (&yp2 - &ym2)) / (c(12.0) * hh);
        let dxx = ((&xp + &xm) * c(16.0) - (&xp2 + &xm2) - center * c(30.0)) / (c(12.0) * hh * hh);
        let dyy = ((&yp + &ym) * c(16.0) - (&yp2 + &ym2) - center * c(30.0)) / (c(12.0) * hh * hh);
        Ok((dx, dy, dxx, dyy))
    }
}

/// Jet of a matrix-valued function of the base coordinate, by finite
/// differences along the two real directions.
pub fn matrix_jet<T: Real, F>(
    f: &F,
    z: Complex<T>,
    stencil: &ComplexHessianStencil<T>,
) -> Result<MatrixJet<T>>
where
    F: Fn(Complex<T>) -> Result<CMatrix<T>>,
{
    let center = f(z)?;
    check_matrix(&center, z)?;
    let h = stencil.step;
    let (mut dx, mut dy, mut dxx, mut dyy) = jet_once(f, z, &center, h, stencil.order)?;
    if stencil.richardson {
        let (dx2, dy2, dxx2, dyy2) = jet_once(f, z, &center, h + h, stencil.order)?;
        let w = Complex::new(stencil.extrapolation_weight(), T::zero());
        let den = w - Complex::new(T::one(), T::zero());
        dx = (dx * w - dx2) / den;
        dy = (dy * w - dy2) / den;
        dxx = (dxx * w - dxx2) / den;
        dyy = (dyy * w - dyy2) / den;
    }
    let half = Complex::new(lit::<T>(0.5), T::zero());
    let quarter = Complex::new(lit::<T>(0.25), T::zero());
    let i = Complex::new(T::zero(), T::one());
    Ok(MatrixJet {
        value: center,
        dz: (dx - dy * i) * half,
        dzdzbar: (dxx + dyy) * quarter,
    })
}

/// Jet of a real function of the base coordinate.
pub fn scalar_jet<T: Real, F>(
    f: &F,
    z: Complex<T>,
    stencil: &ComplexHessianStencil<T>,
) -> Result<ScalarJet<T>>
where
    F: Fn(Complex<T>) -> Result<T>,
{
    let lifted = |p: Complex<T>| -> Result<CMatrix<T>> {
        Ok(CMatrix::<T>::from_element(
            1,
            1,
            Complex::new(f(p)?, T::zero()),
        ))
    };
    let jet = matrix_jet(&lifted, z, stencil)?;
    Ok(ScalarJet {
        value: jet.value[(0, 0)].re,
        dz: jet.dz[(0, 0)],
        dzdzbar: jet.dzdzbar[(0, 0)].re,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stencil2() -> ComplexHessianStencil<f64> {
        ComplexHessianStencil::new(1e-3, 2, false).unwrap()
    }

    #[test]
    fn modulus_squared_has_unit_laplacian() {
        let f = |u: &[Complex<f64>]| -> Result<f64> { Ok(u[0].norm_sqr()) };
        let h = complex_hessian(&f, &[Complex::new(0.0, 0.0)], &stencil2()).unwrap();
        assert!((h[(0, 0)].re - 1.0).abs() < 1e-6);
    }

    #[test]
    fn fubini_study_potential_at_one() {
        // d²/dzdz̄ log(1+|z|²) = (1+|z|²)^-2 = 1/4 at z = 1
        let f = |u: &[Complex<f64>]| -> Result<f64> { Ok((1.0 + u[0].norm_sqr()).ln()) };
        let h = complex_hessian(&f, &[Complex::new(1.0, 0.0)], &stencil2()).unwrap();
        assert!((h[(0, 0)].re - 0.25).abs() < 1e-5, "{}", h[(0, 0)]);
        assert!(h[(0, 0)].im.abs() < 1e-12);
    }

    #[test]
    fn constant_gives_zero_matrix() {
        let f = |_: &[Complex<f64>]| -> Result<f64> { Ok(3.5) };
        let p = [Complex::new(0.2, -0.1), Complex::new(1.0, 2.0)];
        for order in [2, 4] {
            let st = ComplexHessianStencil::new(1e-3, order, true).unwrap();
            let h = complex_hessian(&f, &p, &st).unwrap();
            assert!(h.iter().all(|x| x.norm() < 1e-9));
        }
    }

    #[test]
    fn hermitian_quadratic_form_is_recovered() {
        // q(u) = Σ a_ab u_a ū_b with a Hermitian; ∂_a∂_b̄ q = a_ab
        let a = CMatrix::<f64>::from_row_slice(
            3,
            3,
            &[
                Complex::new(2.0, 0.0),
                Complex::new(0.3, -0.7),
                Complex::new(-1.1, 0.2),
                Complex::new(0.3, 0.7),
                Complex::new(1.5, 0.0),
                Complex::new(0.4, 0.9),
                Complex::new(-1.1, -0.2),
                Complex::new(0.4, -0.9),
                Complex::new(3.0, 0.0),
            ],
        );
        let f = |u: &[Complex<f64>]| -> Result<f64> {
            let mut s = Complex::new(0.0, 0.0);
            for i in 0..3 {
                for j in 0..3 {
                    s += a[(i, j)] * u[i] * u[j].conj();
                }
            }
            Ok(s.re)
        };
        let p = [
            Complex::new(0.5, 0.1),
            Complex::new(-0.3, 0.8),
            Complex::new(1.2, -0.4),
        ];
        for order in [2, 4] {
            let h = complex_hessian(
                &f,
                &p,
                &ComplexHessianStencil::new(1e-3, order, false).unwrap(),
            )
            .unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    assert!(
                        (h[(i, j)] - a[(i, j)]).norm() < 1e-8,
                        "order {order} ({i},{j}) {} vs {}",
                        h[(i, j)],
                        a[(i, j)]
                    );
                }
            }
        }
    }

    #[test]
    fn fourth_order_and_richardson_improve_accuracy() {
        let f = |u: &[Complex<f64>]| -> Result<f64> { Ok(9.0 * (1.0 + u[0].norm_sqr()).ln()) };
        let exact = 9.0 / 4.0;
        let p = [Complex::new(0.6, 0.8)];
        let e2 = (complex_hessian(&f, &p, &ComplexHessianStencil::new(1e-2, 2, false).unwrap())
            .unwrap()[(0, 0)]
            .re
            - exact)
            .abs();
        let e4 = (complex_hessian(&f, &p, &ComplexHessianStencil::new(1e-2, 4, false).unwrap())
            .unwrap()[(0, 0)]
            .re
            - exact)
            .abs();
        let er = (complex_hessian(&f, &p, &ComplexHessianStencil::new(1e-2, 2, true).unwrap())
            .unwrap()[(0, 0)]
            .re
            - exact)
            .abs();
        assert!(e4 < e2 * 1e-2, "{e2} {e4}");
        assert!(er < e2 * 1e-2, "{e2} {er}");
    }

    #[test]
    fn non_finite_value_is_a_domain_error() {
        let f = |u: &[Complex<f64>]| -> Result<f64> { Ok(u[0].re.ln()) };
        let err = complex_hessian(&f, &[Complex::new(0.0, 0.0)], &stencil2()).unwrap_err();
        assert!(matches!(err, Error::Domain { .. }));
    }

    #[test]
    fn bad_stencil_rejected() {
        assert!(ComplexHessianStencil::new(0.0, 2, false).is_err());
        assert!(ComplexHessianStencil::new(1e-3, 3, false).is_err());
    }

    #[test]
    fn scalar_jet_of_fubini_study() {
        let f = |z: Complex<f64>| -> Result<f64> { Ok((1.0 + z.norm_sqr()).ln()) };
        let z = Complex::new(0.3, -0.4);
        let j = scalar_jet(&f, z, &ComplexHessianStencil::default()).unwrap();
        // ∂_z log(1+|z|²) = z̄/(1+|z|²)
        let expect = z.conj() / (1.0 + z.norm_sqr());
        assert!((j.dz - expect).norm() < 1e-9);
        assert!((j.dzdzbar - 1.0 / (1.0 + z.norm_sqr()).powi(2)).abs() < 1e-9);
    }
}
