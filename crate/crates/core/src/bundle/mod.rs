//! Hermitian metrics on vector bundles over `P¹`: Chern curvature, Griffiths
//! extremes, determinant and dual metrics, line twists, symmetric powers.

mod symmetric;

use std::fmt;
use std::sync::Arc;

pub use symmetric::{
    basis_len, binomial, factorial, monomial, monomial_basis, multinomial, permanent,
    power_coefficients, symmetric_power_gram,
};

use crate::base::{fs_weight_jet, BaseHermitianForm, BasePoint, Chart, LineBundleMetric, WeightFn};
use crate::error::{Error, Result};
use crate::numerics::linalg::{
    cholesky_factor, hermitian_defect, hermitize, inverse_pd, log_det_pd, pencil_eigenvalues,
    CMatrix,
};
use crate::numerics::{matrix_jet, ComplexHessianStencil, MatrixJet};
use crate::scalar::{cabs, lit, Complex, Real};

pub(crate) type MatrixFn<T> = Arc<dyn Fn(Complex<T>) -> Result<CMatrix<T>> + Send + Sync>;

/// Hermitian metric on a rank-`r` bundle, as a positive Hermitian matrix in
/// each base chart. Entry `(a, b)` is `⟨e_b, e_a⟩`, so `⟨u, v⟩ = v^* H u`.
#[derive(Clone)]
pub struct HermitianMetric<T> {
    rank: usize,
    charts: [MatrixFn<T>; 2],
    /// Splitting type: the frame of the `Infinity` chart is `z^{a_i}` times the origin frame.
    transition_degrees: Vec<i64>,
    /// `diag((1+|z|²)^{-a_i})` in both charts, when known.
    closed_form: Option<Vec<f64>>,
}

impl<T: Real> fmt::Debug for HermitianMetric<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HermitianMetric")
            .field("rank", &self.rank)
            .field("transition_degrees", &self.transition_degrees)
            .field("direct_sum_degrees", &self.closed_form)
            .finish()
    }
}

impl<T: Real> HermitianMetric<T> {
    pub fn from_fn(
        rank: usize,
        transition_degrees: Vec<i64>,
        origin: impl Fn(Complex<T>) -> Result<CMatrix<T>> + Send + Sync + 'static,
        infinity: impl Fn(Complex<T>) -> Result<CMatrix<T>> + Send + Sync + 'static,
    ) -> Result<Self> {
        if rank == 0 || transition_degrees.len() != rank {
            return Err(Error::InvalidInput(format!(
                "rank {rank} needs {rank} transition degrees, got {}",
                transition_degrees.len()
            )));
        }
        Ok(Self {
            rank,
            charts: [Arc::new(origin), Arc::new(infinity)],
            transition_degrees,
            closed_form: None,
        })
    }

    /// `L^{a_1} ⊕ … ⊕ L^{a_r}` with `L = O(1)` carrying the Fubini–Study metric:
    /// `H = diag((1+|z|²)^{-a_i})` in each chart.
    pub fn direct_sum(degrees: &[i64]) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::InvalidInput(
                "direct sum needs at least one summand".into(),
            ));
        }
        Ok(Self::closed(
            degrees.to_vec(),
            degrees.iter().map(|&d| d as f64).collect(),
        ))
    }

    /// Constant identity metric on the trivial bundle.
    pub fn flat(rank: usize) -> Result<Self> {
        Self::direct_sum(&vec![0; rank])
    }

    fn closed(transition_degrees: Vec<i64>, a: Vec<f64>) -> Self {
        let exps: Arc<Vec<T>> = Arc::new(a.iter().map(|&x| lit::<T>(-x)).collect());
        let f: MatrixFn<T> = Arc::new(move |z: Complex<T>| {
            let s = T::one() + z.norm_sqr();
            let n = exps.len();
            Ok(CMatrix::<T>::from_fn(n, n, |i, j| {
                if i == j {
                    Complex::new(s.powf(exps[i]), T::zero())
                } else {
                    Complex::new(T::zero(), T::zero())
                }
            }))
        });
        Self {
            rank: a.len(),
            charts: [f.clone(), f],
            transition_degrees,
            closed_form: Some(a),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn transition_degrees(&self) -> &[i64] {
        &self.transition_degrees
    }

    /// Degrees `a_i` when the metric is a Fubini–Study direct sum.
    pub fn direct_sum_degrees(&self) -> Option<&[f64]> {
        self.closed_form.as_deref()
    }

    /// `H(z)` at `at`, checked to be positive definite.
    pub fn matrix(&self, at: &BasePoint<T>) -> Result<CMatrix<T>> {
        let m = (self.charts[at.chart.index()])(at.z)?;
        if m.nrows() != self.rank || m.ncols() != self.rank {
            return Err(Error::InvalidInput(format!(
                "metric returned {}x{} matrix for rank {}",
                m.nrows(),
                m.ncols(),
                self.rank
            )));
        }
        cholesky_factor(&m, "Hermitian metric", at)?;
        Ok(m)
    }

    /// `H`, `∂_z H` and `∂_z∂_z̄ H` at `at`; exact for direct sums.
    pub fn jet(
        &self,
        at: &BasePoint<T>,
        stencil: &ComplexHessianStencil<T>,
    ) -> Result<MatrixJet<T>> {
        if let Some(a) = &self.closed_form {
            let n = a.len();
            let mut value = CMatrix::<T>::zeros(n, n);
            let mut dz = CMatrix::<T>::zeros(n, n);
            let mut dzdzbar = CMatrix::<T>::zeros(n, n);
            for (i, &ai) in a.iter().enumerate() {
                // h = e^{-aψ}: h_z = -aψ_z h, h_zz̄ = (a²|ψ_z|² - aψ_zz̄) h
                let psi = fs_weight_jet(T::one(), at.z);
                let ai = lit::<T>(ai);
                let h = (-ai * psi.value).exp();
                value[(i, i)] = Complex::new(h, T::zero());
                dz[(i, i)] = psi.dz * (-ai * h);
                dzdzbar[(i, i)] = Complex::new(
                    (ai * ai * psi.dz.norm_sqr() - ai * psi.dzdzbar) * h,
                    T::zero(),
                );
            }
            return Ok(MatrixJet { value, dz, dzdzbar });
        }
        let f = self.charts[at.chart.index()].clone();
        let rank = self.rank;
        let chart = at.chart;
        let checked = move |z: Complex<T>| -> Result<CMatrix<T>> {
            let m = f(z)?;
            if m.nrows() != rank {
                return Err(Error::InvalidInput("metric matrix has wrong size".into()));
            }
            cholesky_factor(
                &m,
                "Hermitian metric inside stencil",
                BasePoint::new(chart, z),
            )?;
            Ok(m)
        };
        matrix_jet(&checked, at.z, stencil)
    }

    /// Largest entrywise deviation of `H_∞(1/z)` from `D^* H_0(z) D`,
    /// `D = diag(z^{a_i})`, relative to `|H_∞|`.
    pub fn transition_defect(&self, points: &[BasePoint<T>]) -> Result<T> {
        let mut worst = T::zero();
        for p in points {
            let Some(q) = p.transition() else { continue };
            let (p0, p1) = if p.chart == Chart::Origin {
                (*p, q)
            } else {
                (q, *p)
            };
            let h0 = self.matrix(&p0)?;
            let h1 = self.matrix(&p1)?;
            let d: Vec<Complex<T>> = self
                .transition_degrees
                .iter()
                .map(|&a| p0.z.powi(a as i32))
                .collect();
            let scale = crate::numerics::linalg::max_abs(&h1);
            for i in 0..self.rank {
                for j in 0..self.rank {
                    let expect = d[i].conj() * h0[(i, j)] * d[j];
                    worst = worst.max(cabs(h1[(i, j)] - expect) / scale);
                }
            }
        }
        Ok(worst)
    }

    /// Constant positive multiple `c·H`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "scale must be positive, got {c}"
            )));
        }
        let k = Complex::new(lit::<T>(c), T::zero());
        let map = |i: usize| -> MatrixFn<T> {
            let f = self.charts[i].clone();
            Arc::new(move |z| Ok(f(z)? * k))
        };
        Ok(Self {
            rank: self.rank,
            charts: [map(0), map(1)],
            transition_degrees: self.transition_degrees.clone(),
            closed_form: None,
        })
    }

    /// Metric on the dual bundle: `conj(H^{-1})` on the dual frame.
    pub fn dual(&self) -> Self {
        if let Some(a) = &self.closed_form {
            return Self::closed(
                self.transition_degrees.iter().map(|d| -d).collect(),
                a.iter().map(|x| -x).collect(),
            );
        }
        let map = |i: usize| -> MatrixFn<T> {
            let f = self.charts[i].clone();
            let chart = Chart::from_index(i).expect("chart index");
            Arc::new(move |z| {
                let inv = inverse_pd(&f(z)?, "metric to dualize", BasePoint::new(chart, z))?;
                Ok(inv.map(|x| x.conj()))
            })
        };
        Self {
            rank: self.rank,
            charts: [map(0), map(1)],
            transition_degrees: self.transition_degrees.iter().map(|d| -d).collect(),
            closed_form: None,
        }
    }

    /// `H ⊗ L^p`: the matrix is multiplied by `e^{-p·weight_L}`.
    pub fn twist_by_line(&self, l: &LineBundleMetric<T>, power: i64) -> Self {
        let degrees = self
            .transition_degrees
            .iter()
            .map(|d| d + power * l.degree)
            .collect();
        if let (Some(a), Some(d)) = (&self.closed_form, l.fubini_study_degree()) {
            return Self::closed(degrees, a.iter().map(|x| x + power as f64 * d).collect());
        }
        let p = lit::<T>(power as f64);
        let map = |i: usize| -> MatrixFn<T> {
            let f = self.charts[i].clone();
            let w = l
                .weight_fn(Chart::from_index(i).expect("chart index"))
                .clone();
            Arc::new(move |z| {
                let s = (-p * w(z)?).exp();
                Ok(f(z)? * Complex::new(s, T::zero()))
            })
        };
        Self {
            rank: self.rank,
            charts: [map(0), map(1)],
            transition_degrees: degrees,
            closed_form: None,
        }
    }
}

/// Metric on `det E` with weight `-log det H`.
pub fn det_metric<T: Real>(h: &HermitianMetric<T>) -> LineBundleMetric<T> {
    let degree = h.transition_degrees.iter().sum();
    if let Some(a) = &h.closed_form {
        let total: f64 = a.iter().sum();
        if total.fract() == 0.0 {
            // exact Fubini–Study power, so the closed-form jet applies
            let mut l = crate::base::fubini_study_line::<T>(total as i64);
            l.degree = degree;
            return l;
        }
    }
    let map = |i: usize| -> WeightFn<T> {
        let f = h.charts[i].clone();
        let chart = Chart::from_index(i).expect("chart index");
        Arc::new(move |z| {
            Ok(-log_det_pd(
                &f(z)?,
                "metric in determinant",
                BasePoint::new(chart, z),
            )?)
        })
    };
    LineBundleMetric::from_arcs(degree, [map(0), map(1)])
}

pub fn dual_metric<T: Real>(h: &HermitianMetric<T>) -> HermitianMetric<T> {
    h.dual()
}

pub fn twist_by_line<T: Real>(
    h: &HermitianMetric<T>,
    l: &LineBundleMetric<T>,
    power: i64,
) -> HermitianMetric<T> {
    h.twist_by_line(l, power)
}

/// Gram matrix at `at` of the monomial basis of `SᵏE` for the induced metric.
pub fn symmetric_power_metric<T: Real>(
    h: &HermitianMetric<T>,
    k: usize,
    at: &BasePoint<T>,
) -> Result<CMatrix<T>> {
    if k == 0 {
        return Err(Error::InvalidInput("symmetric power needs k >= 1".into()));
    }
    Ok(symmetric_power_gram(&h.matrix(at)?, k))
}

/// Chern curvature at one base point: the endomorphism `K` with `Θ = K dz∧dz̄`.
#[derive(Debug, Clone)]
pub struct EndCurvature<T: Real> {
    pub at: BasePoint<T>,
    /// `K = -∂_z̄(H^{-1}∂_z H)`.
    pub value: CMatrix<T>,
    /// `H(z)`.
    pub metric: CMatrix<T>,
    /// `H K` before symmetrization; Hermitian up to discretization error.
    form: CMatrix<T>,
}

impl<T: Real> EndCurvature<T> {
    /// Curvature from a jet of the metric matrix.
    pub fn from_jet(at: BasePoint<T>, jet: &MatrixJet<T>) -> Result<Self> {
        let hinv = inverse_pd(&jet.value, "metric", at)?;
        let dzbar = jet.dz.adjoint();
        let form = &dzbar * &hinv * &jet.dz - &jet.dzdzbar;
        let value = &hinv * &form;
        Ok(Self {
            at,
            value,
            metric: jet.value.clone(),
            form,
        })
    }

    /// Hermitian matrix of the form `(v, w) ↦ H(Θv, w)`.
    pub fn form(&self) -> CMatrix<T> {
        hermitize(&self.form)
    }

    /// `max |H(Θv,w) − conj(H(Θw,v))|` over basis vectors.
    pub fn hermitian_defect(&self) -> T {
        hermitian_defect(&self.form)
    }

    /// Ascending eigenvalues of `K` (real, since `K` is `H`-self-adjoint).
    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        pencil_eigenvalues(&self.form(), &self.metric, self.at)
    }

    pub fn trace(&self) -> T {
        self.value.trace().re
    }
}

pub fn chern_curvature<T: Real>(
    h: &HermitianMetric<T>,
    at: &BasePoint<T>,
    stencil: &ComplexHessianStencil<T>,
) -> Result<EndCurvature<T>> {
    EndCurvature::from_jet(*at, &h.jet(at, stencil)?)
}

/// Extremes of `H(Θ(η,η̄)v, v) / (|v|²_H · Ω(η,η̄))` over a base sample set.
#[derive(Debug, Clone, Copy)]
pub struct GriffithsExtremes<T: Real> {
    pub min: T,
    pub max: T,
    pub argmin: BasePoint<T>,
    pub argmax: BasePoint<T>,
    pub samples: usize,
}

impl<T: Real> GriffithsExtremes<T> {
    pub fn is_negative(&self) -> bool {
        self.max < T::zero()
    }

    pub fn is_positive(&self) -> bool {
        self.min > T::zero()
    }
}

/// Extremes of the pencil eigenvalues of curvatures supplied per sample.
pub fn griffiths_extremes_of<T: Real>(
    samples: &[BasePoint<T>],
    omega: &BaseHermitianForm<T>,
    mut curvature: impl FnMut(&BasePoint<T>) -> Result<EndCurvature<T>>,
) -> Result<GriffithsExtremes<T>> {
    let first = *samples
        .first()
        .ok_or_else(|| Error::InvalidInput("empty base sample set".into()))?;
    let mut out = GriffithsExtremes {
        min: T::max_value().unwrap(),
        max: T::min_value().unwrap(),
        argmin: first,
        argmax: first,
        samples: samples.len(),
    };
    for p in samples {
        let c = omega.coefficient(p)?;
        let eig = curvature(p)?.eigenvalues()?;
        let (lo, hi) = (eig[0] / c, eig[eig.len() - 1] / c);
        if lo < out.min {
            out.min = lo;
            out.argmin = *p;
        }
        if hi > out.max {
            out.max = hi;
            out.argmax = *p;
        }
    }
    Ok(out)
}

pub fn griffiths_extremes<T: Real>(
    h: &HermitianMetric<T>,
    samples: &[BasePoint<T>],
    omega: &BaseHermitianForm<T>,
    stencil: &ComplexHessianStencil<T>,
) -> Result<GriffithsExtremes<T>> {
    griffiths_extremes_of(samples, omega, |p| chern_curvature(h, p, stencil))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{
        fubini_study_coefficient, fubini_study_line, line_curvature, BaseChartAtlas,
    };
    use crate::numerics::linalg::max_abs;

    fn st() -> ComplexHessianStencil<f64> {
        ComplexHessianStencil::default()
    }

    fn pt(x: f64, y: f64) -> BasePoint<f64> {
        BasePoint::origin(Complex::new(x, y))
    }

    /// Same metric without the closed-form tag, so curvature goes through finite differences.
    fn opaque(h: &HermitianMetric<f64>) -> HermitianMetric<f64> {
        let (a, b) = (h.charts[0].clone(), h.charts[1].clone());
        HermitianMetric::from_fn(
            h.rank,
            h.transition_degrees.clone(),
            move |z| a(z),
            move |z| b(z),
        )
        .unwrap()
    }

    /// A non-diagonal metric on `O(2) ⊕ O(1)`-like data, smooth in the origin chart.
    fn twisted_example() -> HermitianMetric<f64> {
        let f = |z: Complex<f64>| {
            let s = 1.0 + z.norm_sqr();
            let c = Complex::new(0.3, 0.1) * z;
            Ok(CMatrix::<f64>::from_row_slice(
                2,
                2,
                &[
                    Complex::new(s * s, 0.0),
                    c.conj(),
                    c,
                    Complex::new(s + 0.5 * z.re * z.re, 0.0),
                ],
            ))
        };
        HermitianMetric::from_fn(2, vec![0, 0], f, f).unwrap()
    }

    #[test]
    fn direct_sum_curvature_at_origin() {
        let e = opaque(&HermitianMetric::direct_sum(&[9, 8, 7]).unwrap());
        let k = chern_curvature(&e, &pt(0.0, 0.0), &st()).unwrap();
        let expect = crate::numerics::linalg::diag(&[9.0, 8.0, 7.0]);
        assert!(max_abs(&(k.value - expect)) < 1e-4);
    }

    #[test]
    fn closed_form_jet_matches_finite_differences() {
        let e = HermitianMetric::direct_sum(&[9, -8, 7]).unwrap();
        let p = BasePoint::new(Chart::Infinity, Complex::new(0.6, -0.3));
        let a = chern_curvature(&e, &p, &st()).unwrap();
        let b = chern_curvature(&opaque(&e), &p, &st()).unwrap();
        assert!(max_abs(&(&a.value - &b.value)) < 1e-5);
        let c = fubini_study_coefficient(p.z);
        assert!((a.value[(1, 1)].re + 8.0 * c).abs() < 1e-12);
    }

    #[test]
    fn flat_metric_has_zero_curvature() {
        let e = opaque(&HermitianMetric::flat(2).unwrap());
        let k = chern_curvature(&e, &pt(0.4, 0.2), &st()).unwrap();
        assert!(max_abs(&k.value) < 1e-12);
        let omega = BaseHermitianForm::fubini_study(1.0).unwrap();
        let ext = griffiths_extremes(
            &e,
            BaseChartAtlas::polar(3, 5).unwrap().samples(),
            &omega,
            &st(),
        )
        .unwrap();
        assert!(ext.min.abs() < 1e-8 && ext.max.abs() < 1e-8);
    }

    #[test]
    fn curvature_is_self_adjoint_for_non_diagonal_metric() {
        let h = twisted_example();
        for p in [pt(0.0, 0.0), pt(0.5, -0.3), pt(-0.9, 0.1)] {
            let k = chern_curvature(&h, &p, &st()).unwrap();
            assert!(k.hermitian_defect() < 1e-8, "{}", k.hermitian_defect());
        }
    }

    #[test]
    fn dual_curvature_is_negative_transpose() {
        for h in [
            opaque(&HermitianMetric::direct_sum(&[3, 1]).unwrap()),
            twisted_example(),
        ] {
            let hd = h.dual();
            let p = pt(0.3, 0.4);
            let k = chern_curvature(&h, &p, &st()).unwrap();
            let kd = chern_curvature(&hd, &p, &st()).unwrap();
            assert!(max_abs(&(kd.value + k.value.transpose())) < 1e-6);
        }
    }

    #[test]
    fn trace_is_determinant_curvature() {
        let h = twisted_example();
        let det = det_metric(&h);
        for p in [pt(0.1, 0.2), pt(-0.5, 0.5)] {
            let k = chern_curvature(&h, &p, &st()).unwrap();
            assert!((k.trace() - line_curvature(&det, &p, &st()).unwrap()).abs() < 1e-6);
        }
        let e = HermitianMetric::<f64>::direct_sum(&[9, 8, 7]).unwrap();
        let d = det_metric(&e);
        assert_eq!(d.degree, 24);
        assert!((line_curvature(&d, &pt(0.0, 0.0), &st()).unwrap() - 24.0).abs() < 1e-4);
        let dd = det_metric(&e.dual());
        let p = pt(0.2, 0.7);
        assert!((dd.weight(&p).unwrap() + d.weight(&p).unwrap()).abs() < 1e-8);
        let dt = det_metric(&opaque(&HermitianMetric::flat(2).unwrap()));
        assert!(line_curvature(&dt, &p, &st()).unwrap().abs() < 1e-10);
    }

    #[test]
    fn griffiths_extremes_of_example_dual() {
        let e = HermitianMetric::<f64>::direct_sum(&[9, 8, 7]).unwrap();
        let omega = BaseHermitianForm::fubini_study(1.0).unwrap();
        let atlas = BaseChartAtlas::polar(5, 7).unwrap();
        let ext = griffiths_extremes(&opaque(&e.dual()), atlas.samples(), &omega, &st()).unwrap();
        assert!(
            (ext.min + 9.0).abs() < 1e-3 && (ext.max + 7.0).abs() < 1e-3,
            "{ext:?}"
        );
        let v = e.twist_by_line(&det_metric(&e), -1);
        assert_eq!(v.transition_degrees(), &[-15, -16, -17]);
        let ext = griffiths_extremes(&opaque(&v), atlas.samples(), &omega, &st()).unwrap();
        assert!(
            (ext.min + 17.0).abs() < 1e-3 && (ext.max + 15.0).abs() < 1e-3,
            "{ext:?}"
        );
    }

    #[test]
    fn griffiths_extremes_are_scale_free() {
        let h = twisted_example();
        let omega = BaseHermitianForm::fubini_study(2.0).unwrap();
        let atlas = BaseChartAtlas::with_samples(vec![pt(0.0, 0.0), pt(0.3, 0.3)]).unwrap();
        let a = griffiths_extremes(&h, atlas.samples(), &omega, &st()).unwrap();
        let b =
            griffiths_extremes(&h.scaled(37.0).unwrap(), atlas.samples(), &omega, &st()).unwrap();
        assert!((a.min - b.min).abs() < 1e-6 && (a.max - b.max).abs() < 1e-6);
    }

    #[test]
    fn twist_shifts_curvature_and_inverts() {
        let flat = opaque(&HermitianMetric::flat(2).unwrap());
        let l = fubini_study_line::<f64>(1);
        let p = pt(0.5, 0.1);
        let k = chern_curvature(&flat.twist_by_line(&l, 1), &p, &st()).unwrap();
        let c = fubini_study_coefficient(p.z);
        assert!(max_abs(&(k.value - CMatrix::identity(2, 2) * Complex::new(c, 0.0))) < 1e-6);
        let h = twisted_example();
        let back = h.twist_by_line(&l, 3).twist_by_line(&l, -3);
        assert!(max_abs(&(back.matrix(&p).unwrap() - h.matrix(&p).unwrap())) < 1e-10);
    }

    #[test]
    fn transition_data_is_consistent() {
        let atlas = BaseChartAtlas::<f64>::polar(3, 6).unwrap();
        let e = HermitianMetric::direct_sum(&[2, -1, 0]).unwrap();
        assert!(e.transition_defect(atlas.samples()).unwrap() < 1e-12);
        assert!(e.dual().transition_defect(atlas.samples()).unwrap() < 1e-12);
        let v = opaque(&e).twist_by_line(&det_metric(&opaque(&e)), -1);
        assert!(v.transition_defect(atlas.samples()).unwrap() < 1e-8);
    }

    #[test]
    fn symmetric_power_of_metric() {
        let h = HermitianMetric::<f64>::flat(2).unwrap();
        let g = symmetric_power_metric(&h, 2, &pt(0.0, 0.0)).unwrap();
        assert!((g[(1, 1)].re - 0.5).abs() < 1e-15);
        assert!(symmetric_power_metric(&h, 0, &pt(0.0, 0.0)).is_err());
    }

    #[test]
    fn non_positive_metric_is_rejected() {
        let bad = HermitianMetric::<f64>::from_fn(
            1,
            vec![0],
            |_| Ok(CMatrix::from_element(1, 1, Complex::new(-1.0, 0.0))),
            |_| Ok(CMatrix::from_element(1, 1, Complex::new(1.0, 0.0))),
        )
        .unwrap();
        let r = chern_curvature(&bad, &pt(0.0, 0.0), &st());
        assert!(matches!(r, Err(Error::NotPositiveDefinite { .. })), "{r:?}");
    }
}
