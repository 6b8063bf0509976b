//! Hermitian matrix helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::scalar::{Complex, Real};

pub type CMatrix<T> = DMatrix<Complex<T>>;
pub type CVector<T> = DVector<Complex<T>>;

/// `(m + m^*) / 2`.
pub fn hermitize<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    let half = Complex::new(T::one() / (T::one() + T::one()), T::zero());
    (m + m.adjoint()) * half
}

/// Largest absolute entry of `m - m^*`.
pub fn hermitian_defect<T: Real>(m: &CMatrix<T>) -> T {
    let d = m - m.adjoint();
    d.iter()
        .fold(T::zero(), |acc, x| acc.max(x.norm_sqr().sqrt()))
}

pub fn max_abs<T: Real>(m: &CMatrix<T>) -> T {
    m.iter()
        .fold(T::zero(), |acc, x| acc.max(x.norm_sqr().sqrt()))
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues<T: Real>(m: &CMatrix<T>) -> Vec<T> {
    let eig = SymmetricEigen::new(hermitize(m));
    let mut v: Vec<T> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    v
}

/// Lower Cholesky factor of a Hermitian positive definite matrix.
pub fn cholesky_factor<T: Real>(
    m: &CMatrix<T>,
    what: &str,
    at: impl std::fmt::Debug,
) -> Result<CMatrix<T>> {
    if m.iter()
        .any(|x| !crate::scalar::is_finite(x.re) || !crate::scalar::is_finite(x.im))
    {
        return Err(Error::domain(format!("{what} has non-finite entries"), at));
    }
    match hermitize(m).cholesky().map(|c| c.l()) {
        Some(l) if real_positive_diagonal(&l) => Ok(l),
        _ => Err(Error::not_pd(what, at)),
    }
}

// nalgebra takes complex square roots of the pivots, so a negative pivot
// shows up as an imaginary diagonal entry instead of a failure.
fn real_positive_diagonal<T: Real>(l: &CMatrix<T>) -> bool {
    (0..l.nrows()).all(|i| {
        let d = l[(i, i)];
        d.re > T::zero() && d.im.abs() <= d.re * T::default_epsilon() * crate::scalar::lit(16.0)
    })
}

/// `log det m` for Hermitian positive definite `m`.
pub fn log_det_pd<T: Real>(m: &CMatrix<T>, what: &str, at: impl std::fmt::Debug) -> Result<T> {
    let l = cholesky_factor(m, what, at)?;
    let two = T::one() + T::one();
    Ok((0..l.nrows()).fold(T::zero(), |acc, i| acc + two * l[(i, i)].re.ln()))
}

pub fn inverse_pd<T: Real>(
    m: &CMatrix<T>,
    what: &str,
    at: impl std::fmt::Debug,
) -> Result<CMatrix<T>> {
    if m.nrows() == 0 {
        return Ok(m.clone());
    }
    match hermitize(m).cholesky() {
        Some(c) if real_positive_diagonal(&c.l()) => Ok(hermitize(&c.inverse())),
        _ => Err(Error::not_pd(what, at)),
    }
}

/// Extreme eigenvalues of the pencil `(form, metric)`, i.e. the min and max of
/// `v^* form v / v^* metric v` over nonzero `v`.
pub fn pencil_eigenvalues<T: Real>(
    form: &CMatrix<T>,
    metric: &CMatrix<T>,
    at: impl std::fmt::Debug + Copy,
) -> Result<Vec<T>> {
    let l = cholesky_factor(metric, "metric of Hermitian pencil", at)?;
    let n = l.nrows();
    let linv = l
        .solve_lower_triangular(&CMatrix::<T>::identity(n, n))
        .ok_or_else(|| Error::not_pd("metric of Hermitian pencil", at))?;
    let reduced = &linv * form * linv.adjoint();
    Ok(hermitian_eigenvalues(&reduced))
}

/// Hermitian matrix from a real diagonal.
pub fn diag<T: Real>(d: &[T]) -> CMatrix<T> {
    let n = d.len();
    CMatrix::<T>::from_fn(n, n, |i, j| {
        if i == j {
            Complex::new(d[i], T::zero())
        } else {
            Complex::new(T::zero(), T::zero())
        }
    })
}

/// Quadratic form `v^* m v` (real part).
pub fn quad_form<T: Real>(m: &CMatrix<T>, v: &[Complex<T>]) -> T {
    let n = v.len();
    let mut acc = Complex::new(T::zero(), T::zero());
    for i in 0..n {
        let mut row = Complex::new(T::zero(), T::zero());
        for j in 0..n {
            row += m[(i, j)] * v[j];
        }
        acc += v[i].conj() * row;
    }
    acc.re
}

pub fn scale_real<T: Real>(m: &CMatrix<T>, s: T) -> CMatrix<T> {
    m * Complex::new(s, T::zero())
}
