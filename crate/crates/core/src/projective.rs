//! Potentials of `O(1)` on the projectivization `P(W)` of a bundle `W` with a
//! Hermitian or Finsler metric, and the curvature quantities built from them:
//! the full Hessian, the Kobayashi curvature (horizontal Schur complement),
//! the relative canonical curvature and the matrices `B_k`, `A`.
//!
//! Points of `P(W)` are given by a base point and homogeneous fiber
//! coordinates `ζ`; a fiber chart `c` dehomogenizes `w_i = ζ_i/ζ_c`. The
//! potential is `φ(z, w) = log G(z, e(w))` where `e(w)` has `1` in slot `c`.
//! Row/column 0 of every Hessian is the base direction, rows `1..r` the fiber
//! coordinates in increasing slot order.

use std::fmt;

use crate::base::{BaseChartAtlas, BaseHermitianForm, BasePoint};
use crate::bundle::{det_metric, HermitianMetric};
use crate::error::{Error, Result};
use crate::finsler::FinslerMetric;
use crate::numerics::linalg::{cholesky_factor, hermitize, inverse_pd, log_det_pd, CMatrix};
use crate::numerics::{complex_hessian, ComplexHessianStencil, MatrixJet};
use crate::scalar::{lit, Complex, Real};

/// Metric on `W` whose `O(1)` potential is taken.
#[derive(Clone, Debug)]
pub enum PotentialSource<T: Real> {
    Hermitian(HermitianMetric<T>),
    Finsler(FinslerMetric<T>),
}

impl<T: Real> PotentialSource<T> {
    pub fn rank(&self) -> usize {
        match self {
            PotentialSource::Hermitian(h) => h.rank(),
            PotentialSource::Finsler(f) => f.rank(),
        }
    }
}

/// A point of `P(W)`: base point and homogeneous fiber coordinates.
#[derive(Clone, PartialEq)]
pub struct FiberPoint<T> {
    pub base: BasePoint<T>,
    pub zeta: Vec<Complex<T>>,
}

impl<T: Real> FiberPoint<T> {
    pub fn new(base: BasePoint<T>, zeta: Vec<Complex<T>>) -> Self {
        Self { base, zeta }
    }

    /// Point with `ζ = e(w)` in fiber chart `chart`.
    pub fn from_chart(base: BasePoint<T>, chart: usize, w: &[Complex<T>]) -> Self {
        Self {
            base,
            zeta: embed(chart, w),
        }
    }

    /// Index of the largest homogeneous coordinate, the best-conditioned chart.
    pub fn preferred_chart(&self) -> usize {
        let mut best = 0;
        for (i, z) in self.zeta.iter().enumerate() {
            if z.norm_sqr() > self.zeta[best].norm_sqr() {
                best = i;
            }
        }
        best
    }

    /// Affine coordinates in fiber chart `chart`.
    pub fn chart_coordinates(&self, chart: usize) -> Result<Vec<Complex<T>>> {
        let c = self.zeta[chart];
        if c.norm_sqr() == T::zero() {
            return Err(Error::domain(
                format!("fiber point outside fiber chart {chart}"),
                self,
            ));
        }
        Ok(self
            .zeta
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != chart)
            .map(|(_, z)| *z / c)
            .collect())
    }
}

impl<T: Real> fmt::Debug for FiberPoint<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} [", self.base)?;
        for (i, z) in self.zeta.iter().enumerate() {
            if i > 0 {
                write!(f, " : ")?;
            }
            write!(
                f,
                "{:.4}{:+.4}i",
                crate::scalar::to_f64(z.re),
                crate::scalar::to_f64(z.im)
            )?;
        }
        write!(f, "]")
    }
}

/// `e(w)`: `w` with a `1` inserted at position `chart`.
pub fn embed<T: Real>(chart: usize, w: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut e = Vec::with_capacity(w.len() + 1);
    e.extend_from_slice(&w[..chart]);
    e.push(Complex::new(T::one(), T::zero()));
    e.extend_from_slice(&w[chart..]);
    e
}

fn fiber_slots(r: usize, chart: usize) -> Vec<usize> {
    (0..r).filter(|&i| i != chart).collect()
}

/// `φ(z, w) = log G(z, e(w))` on one fiber chart of `P(W)`.
#[derive(Clone, Debug)]
pub struct ProjectivizedPotential<T: Real> {
    source: PotentialSource<T>,
    fiber_chart: usize,
    stencil: ComplexHessianStencil<T>,
}

/// Kobayashi value at a point with the minimizing lift.
#[derive(Clone, Debug)]
pub struct LiftExtremal<T: Real> {
    pub point: FiberPoint<T>,
    pub eta: Complex<T>,
    /// `A(η,η̄) = −θ(η̃, η̃̄)`.
    pub value: T,
    /// Fiber components of the horizontal lift of `η` in the chart used.
    pub lift: Vec<Complex<T>>,
    pub fiber_chart: usize,
}

/// `B_k` and `A` contracted with `η`.
#[derive(Clone, Copy, Debug)]
pub struct ProofMatrices<T> {
    pub b_k: T,
    pub a: T,
}

/// Hermitian source data at one base point, reused across fiber points.
pub struct BaseSlice<'a, T: Real> {
    potential: &'a ProjectivizedPotential<T>,
    base: BasePoint<T>,
    jet: Option<MatrixJet<T>>,
}

impl<T: Real> ProjectivizedPotential<T> {
    pub fn new(source: PotentialSource<T>, fiber_chart: usize) -> Result<Self> {
        let r = source.rank();
        if r < 2 {
            return Err(Error::InvalidInput(format!(
                "projectivization needs rank >= 2, got {r}"
            )));
        }
        if fiber_chart >= r {
            return Err(Error::InvalidInput(format!(
                "fiber chart {fiber_chart} out of range for rank {r}"
            )));
        }
        Ok(Self {
            source,
            fiber_chart,
            stencil: ComplexHessianStencil::default(),
        })
    }

    pub fn with_stencil(mut self, stencil: ComplexHessianStencil<T>) -> Self {
        self.stencil = stencil;
        self
    }

    /// Same potential in another fiber chart.
    pub fn in_chart(&self, fiber_chart: usize) -> Result<Self> {
        Self::new(self.source.clone(), fiber_chart).map(|p| p.with_stencil(self.stencil))
    }

    pub fn rank(&self) -> usize {
        self.source.rank()
    }

    pub fn fiber_chart(&self) -> usize {
        self.fiber_chart
    }

    pub fn source(&self) -> &PotentialSource<T> {
        &self.source
    }

    pub fn stencil(&self) -> &ComplexHessianStencil<T> {
        &self.stencil
    }

    fn chart_coords(&self, p: &FiberPoint<T>) -> Result<Vec<Complex<T>>> {
        if p.zeta.len() != self.rank() {
            return Err(Error::InvalidInput(format!(
                "fiber point has {} coordinates, rank is {}",
                p.zeta.len(),
                self.rank()
            )));
        }
        p.chart_coordinates(self.fiber_chart)
    }

    /// `G(z, e(w))`, checked positive.
    pub fn source_value(&self, base: &BasePoint<T>, w: &[Complex<T>]) -> Result<T> {
        let e = embed(self.fiber_chart, w);
        let v = match &self.source {
            PotentialSource::Hermitian(h) => {
                let g = h.matrix(base)?;
                crate::numerics::linalg::quad_form(&g, &e)
            }
            PotentialSource::Finsler(f) => f.value(base, &e)?,
        };
        if !(v > T::zero()) || !crate::scalar::is_finite(v) {
            return Err(Error::domain("metric on W is not positive", (base, w)));
        }
        Ok(v)
    }

    /// `φ(z, w)`.
    pub fn value(&self, base: &BasePoint<T>, w: &[Complex<T>]) -> Result<T> {
        Ok(self.source_value(base, w)?.ln())
    }

    /// Per-base-point cache of the source metric and its derivatives.
    pub fn slice(&self, base: &BasePoint<T>) -> Result<BaseSlice<'_, T>> {
        let jet = match &self.source {
            PotentialSource::Hermitian(h) => Some(h.jet(base, &self.stencil)?),
            PotentialSource::Finsler(_) => None,
        };
        Ok(BaseSlice {
            potential: self,
            base: *base,
            jet,
        })
    }

    /// Hessian of `φ` in `(z, w)` at `p`.
    pub fn full_curvature(&self, p: &FiberPoint<T>) -> Result<CMatrix<T>> {
        self.slice(&p.base)?.full_curvature(&self.chart_coords(p)?)
    }

    /// Fiber block `(φ_{ij̄})`.
    pub fn fiber_block(&self, p: &FiberPoint<T>) -> Result<CMatrix<T>> {
        let w = self.chart_coords(p)?;
        match &self.source {
            PotentialSource::Hermitian(h) => {
                hermitian_fiber_block(&h.matrix(&p.base)?, self.fiber_chart, &w)
            }
            PotentialSource::Finsler(_) => {
                let m = self.full_curvature(p)?;
                let r = self.rank();
                Ok(m.view((1, 1), (r - 1, r - 1)).into_owned())
            }
        }
    }

    /// `−θ(g)(η̃, η̃̄)`: the horizontal Schur complement contracted with `η`.
    pub fn kobayashi_curvature(
        &self,
        p: &FiberPoint<T>,
        eta: Complex<T>,
    ) -> Result<LiftExtremal<T>> {
        let w = self.chart_coords(p)?;
        let m = self.slice(&p.base)?.full_curvature(&w)?;
        let (value, lift) = schur(&m, p)?;
        let scale = eta.norm_sqr();
        Ok(LiftExtremal {
            point: p.clone(),
            eta,
            value: value * scale,
            lift: lift.into_iter().map(|v| v * eta).collect(),
            fiber_chart: self.fiber_chart,
        })
    }

    /// Minimum of the full Hessian form over lifts `(η, v)`, `v` on a zooming grid.
    pub fn kobayashi_by_minimization(
        &self,
        p: &FiberPoint<T>,
        eta: Complex<T>,
        grid: &LiftGrid,
    ) -> Result<T> {
        let w = self.chart_coords(p)?;
        let m = self.slice(&p.base)?.full_curvature(&w)?;
        let n = m.nrows() - 1;
        let dims = 2 * n;
        let q = |v: &[T]| -> T {
            let mut x = vec![eta];
            for j in 0..n {
                x.push(Complex::new(v[2 * j], v[2 * j + 1]));
            }
            let mut acc = Complex::new(T::zero(), T::zero());
            for a in 0..=n {
                for b in 0..=n {
                    acc += m[(a, b)] * x[a] * x[b].conj();
                }
            }
            acc.re
        };
        let mut center = vec![T::zero(); dims];
        let mut half = lit::<T>(grid.half_width);
        let mut best = q(&center);
        let pts = grid.points_per_axis.max(2);
        for _ in 0..grid.levels {
            let step = (half + half) / lit::<T>((pts - 1) as f64);
            let mut idx = vec![0usize; dims];
            let mut next_center = center.clone();
            loop {
                let v: Vec<T> = (0..dims)
                    .map(|d| center[d] - half + step * lit::<T>(idx[d] as f64))
                    .collect();
                let val = q(&v);
                if val < best {
                    best = val;
                    next_center = v;
                }
                let mut d = 0;
                while d < dims {
                    idx[d] += 1;
                    if idx[d] < pts {
                        break;
                    }
                    idx[d] = 0;
                    d += 1;
                }
                if d == dims {
                    break;
                }
            }
            center = next_center;
            half = step + step;
        }
        Ok(best)
    }

    /// Hessian in `(z, w)` of `log det(φ_{ij̄})`: the curvature `γ_g` of the
    /// metric induced on the relative canonical bundle.
    pub fn gamma_curvature(&self, p: &FiberPoint<T>) -> Result<CMatrix<T>> {
        let w0 = self.chart_coords(p)?;
        let chart = p.base.chart;
        let f = |u: &[Complex<T>]| -> Result<T> {
            let base = BasePoint::new(chart, u[0]);
            let fp = FiberPoint::from_chart(base, self.fiber_chart, &u[1..]);
            log_det_pd(&self.fiber_block(&fp)?, "fiber Hessian", &fp).map_err(degenerate)
        };
        let mut u = vec![p.base.z];
        u.extend_from_slice(&w0);
        let stencil = match &self.source {
            PotentialSource::Hermitian(_) => self.stencil,
            // the fiber block itself is a finite difference here
            PotentialSource::Finsler(_) => self.stencil.with_step(lit(1e-2)),
        };
        complex_hessian(&f, &u, &stencil)
    }

    /// `(B_k, A)` at `p` contracted with `η`.
    pub fn proof_matrices(
        &self,
        p: &FiberPoint<T>,
        k: usize,
        eta: Complex<T>,
    ) -> Result<ProofMatrices<T>> {
        let m = self.full_curvature(p)?;
        let gamma = self.gamma_curvature(p)?;
        let (a, _) = schur(&m, p)?;
        let s = eta.norm_sqr();
        Ok(ProofMatrices {
            b_k: (lit::<T>(k as f64) * m[(0, 0)].re - gamma[(0, 0)].re) * s,
            a: a * s,
        })
    }

    /// Residual of `γ_g + r·Θ(g) + q*Θ(det G)` (max entry), for Hermitian sources.
    pub fn gamma_identity_residual(&self, p: &FiberPoint<T>) -> Result<T> {
        let PotentialSource::Hermitian(h) = &self.source else {
            return Err(Error::InvalidInput(
                "the relative canonical identity needs a Hermitian source".into(),
            ));
        };
        let m = self.full_curvature(p)?;
        let gamma = self.gamma_curvature(p)?;
        let det = det_metric(h);
        let kappa = crate::base::line_curvature(&det, &p.base, &self.stencil)?;
        let r = lit::<T>(self.rank() as f64);
        let mut res = &gamma + &m * Complex::new(r, T::zero());
        res[(0, 0)] += Complex::new(kappa, T::zero());
        Ok(crate::numerics::linalg::max_abs(&res))
    }
}

fn degenerate(e: Error) -> Error {
    match e {
        Error::NotPositiveDefinite { what, at } => Error::Degenerate { what, at },
        other => other,
    }
}

/// Schur complement `M₀₀ − M_{0F} M_{FF}^{-1} M_{F0}` and the minimizing lift.
pub(crate) fn schur<T: Real>(m: &CMatrix<T>, at: &FiberPoint<T>) -> Result<(T, Vec<Complex<T>>)> {
    let n = m.nrows() - 1;
    let ff = m.view((1, 1), (n, n)).into_owned();
    let inv = inverse_pd(&ff, "fiber Hessian", at).map_err(degenerate)?;
    let col = m.view((1, 0), (n, 1)).into_owned();
    let row = m.view((0, 1), (1, n)).into_owned();
    let corr = (&row * &inv * &col)[(0, 0)];
    // the form Σ M_ab x_a x̄_b is stationary in v at v = −(M_FF^T)^{-1} M_{0F}^T
    let lift = -(inv.transpose() * row.transpose());
    Ok(((m[(0, 0)] - corr).re, lift.iter().copied().collect()))
}

/// Closed-form fiber block of `log(e^* G e)` for a constant matrix `G`.
pub(crate) fn hermitian_fiber_block<T: Real>(
    g: &CMatrix<T>,
    chart: usize,
    w: &[Complex<T>],
) -> Result<CMatrix<T>> {
    let r = g.nrows();
    let e = embed(chart, w);
    let slots = fiber_slots(r, chart);
    let ge = g * crate::numerics::linalg::CVector::from_column_slice(&e);
    let q = e
        .iter()
        .zip(ge.iter())
        .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| {
            acc + x.conj() * y
        })
        .re;
    if !(q > T::zero()) {
        return Err(Error::domain("metric on W is not positive", w));
    }
    // Q_i = (e^* G)_{P_i} = conj((G e)_{P_i}) for Hermitian G
    let qi: Vec<Complex<T>> = slots.iter().map(|&s| ge[s].conj()).collect();
    let n = slots.len();
    let q2 = q * q;
    Ok(CMatrix::<T>::from_fn(n, n, |i, j| {
        g[(slots[j], slots[i])] / q - qi[i] * qi[j].conj() / q2
    }))
}

impl<'a, T: Real> BaseSlice<'a, T> {
    pub fn base(&self) -> &BasePoint<T> {
        &self.base
    }

    /// Hessian of `φ` at fiber coordinates `w` in the potential's chart.
    pub fn full_curvature(&self, w: &[Complex<T>]) -> Result<CMatrix<T>> {
        self.full_curvature_in(self.potential.fiber_chart, w)
    }

    /// Same, in fiber chart `chart`.
    pub fn full_curvature_in(&self, chart: usize, w: &[Complex<T>]) -> Result<CMatrix<T>> {
        let r = self.potential.rank();
        if w.len() + 1 != r {
            return Err(Error::InvalidInput(format!(
                "expected {} fiber coordinates, got {}",
                r - 1,
                w.len()
            )));
        }
        match &self.jet {
            Some(jet) => hermitian_full_hessian(jet, chart, w, &self.base),
            None => {
                let PotentialSource::Finsler(f) = &self.potential.source else {
                    unreachable!()
                };
                let base_chart = self.base.chart;
                let phi = |u: &[Complex<T>]| -> Result<T> {
                    let e = embed(chart, &u[1..]);
                    let v = f.value(&BasePoint::new(base_chart, u[0]), &e)?;
                    if !(v > T::zero()) {
                        return Err(Error::domain("Finsler metric is not positive", u));
                    }
                    Ok(v.ln())
                };
                let mut u = vec![self.base.z];
                u.extend_from_slice(w);
                Ok(hermitize(&complex_hessian(
                    &phi,
                    &u,
                    &self.potential.stencil,
                )?))
            }
        }
    }

    /// Kobayashi value `A` (coefficient of `|η|²`) at homogeneous `ζ`, in its
    /// best-conditioned chart.
    pub fn kobayashi_at(&self, zeta: &[Complex<T>]) -> Result<T> {
        let fp = FiberPoint::new(self.base, zeta.to_vec());
        let chart = fp.preferred_chart();
        let w = fp.chart_coordinates(chart)?;
        Ok(schur(&self.full_curvature_in(chart, &w)?, &fp)?.0)
    }

    /// Smallest eigenvalue of the full Hessian at `ζ` (positivity of `Θ(g)`).
    pub fn min_full_eigenvalue(&self, zeta: &[Complex<T>]) -> Result<T> {
        let fp = FiberPoint::new(self.base, zeta.to_vec());
        let chart = fp.preferred_chart();
        let w = fp.chart_coordinates(chart)?;
        Ok(crate::numerics::linalg::hermitian_eigenvalues(&self.full_curvature_in(chart, &w)?)[0])
    }

    /// Smallest eigenvalue of the fiber block at `ζ`.
    pub fn min_fiber_eigenvalue(&self, zeta: &[Complex<T>]) -> Result<T> {
        let fp = FiberPoint::new(self.base, zeta.to_vec());
        let chart = fp.preferred_chart();
        let w = fp.chart_coordinates(chart)?;
        let m = self.full_curvature_in(chart, &w)?;
        let n = m.nrows() - 1;
        Ok(crate::numerics::linalg::hermitian_eigenvalues(&m.view((1, 1), (n, n)).into_owned())[0])
    }
}

/// Closed-form Hessian of `log(e^* G e)` from the base jet of `G`.
fn hermitian_full_hessian<T: Real>(
    jet: &MatrixJet<T>,
    chart: usize,
    w: &[Complex<T>],
    base: &BasePoint<T>,
) -> Result<CMatrix<T>> {
    let g = &jet.value;
    let r = g.nrows();
    let e = crate::numerics::linalg::CVector::from_column_slice(&embed(chart, w));
    let slots = fiber_slots(r, chart);
    let ge = g * &e;
    let gze = &jet.dz * &e;
    let dot = |a: &crate::numerics::linalg::CVector<T>, b: &crate::numerics::linalg::CVector<T>| {
        a.iter()
            .zip(b.iter())
            .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| {
                acc + x.conj() * y
            })
    };
    let q = dot(&e, &ge).re;
    if !(q > T::zero()) || !crate::scalar::is_finite(q) {
        return Err(Error::domain("metric on W is not positive", (base, w)));
    }
    let qz = dot(&e, &gze);
    let qzz = dot(&e, &(&jet.dzdzbar * &e)).re;
    // first derivatives Q_a (a = 0 base, then fiber slots) and mixed Q_{ab̄}
    let mut qa = vec![qz];
    qa.extend(slots.iter().map(|&s| ge[s].conj()));
    let n = r;
    let mixed = |a: usize, b: usize| -> Complex<T> {
        match (a, b) {
            (0, 0) => Complex::new(qzz, T::zero()),
            (0, j) => gze[slots[j - 1]],
            (i, 0) => gze[slots[i - 1]].conj(),
            (i, j) => g[(slots[j - 1], slots[i - 1])],
        }
    };
    let q2 = q * q;
    let m = CMatrix::<T>::from_fn(n, n, |a, b| mixed(a, b) / q - qa[a] * qa[b].conj() / q2);
    Ok(hermitize(&m))
}

/// Zooming grid for the brute-force minimization over lifts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LiftGrid {
    pub half_width: f64,
    pub points_per_axis: usize,
    pub levels: usize,
}

impl Default for LiftGrid {
    fn default() -> Self {
        Self {
            half_width: 4.0,
            points_per_axis: 9,
            levels: 6,
        }
    }
}

/// Deterministic sample set of `P(W_z)`: the nodes of a planar tensor rule in
/// the last fiber chart plus the coordinate directions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct FiberSampleGrid {
    pub n_theta: usize,
    pub n_rho: usize,
}

impl Default for FiberSampleGrid {
    fn default() -> Self {
        Self {
            n_theta: 8,
            n_rho: 8,
        }
    }
}

impl FiberSampleGrid {
    pub fn points<T: Real>(&self, rank: usize) -> Vec<Vec<Complex<T>>> {
        let mut out = Vec::new();
        for i in 0..rank {
            let mut e = vec![Complex::new(T::zero(), T::zero()); rank];
            e[i] = Complex::new(T::one(), T::zero());
            out.push(e);
        }
        if rank < 2 || self.n_theta == 0 || self.n_rho == 0 {
            return out;
        }
        let planar: Vec<Complex<T>> =
            crate::numerics::quadrature::planar_nodes::<T>(self.n_theta, self.n_rho)
                .into_iter()
                .map(|(w, _)| w)
                .collect();
        let d = rank - 1;
        let m = planar.len();
        let total = m.pow(d as u32);
        let mut idx = vec![0usize; d];
        for _ in 0..total {
            let w: Vec<Complex<T>> = idx.iter().map(|&i| planar[i]).collect();
            out.push(embed(d, &w));
            for slot in idx.iter_mut().rev() {
                *slot += 1;
                if *slot < m {
                    break;
                }
                *slot = 0;
            }
        }
        out
    }
}

/// Extremes of a quantity over base samples × fiber samples.
#[derive(Clone, Debug)]
pub struct FiberExtremes<T: Real> {
    pub min: T,
    pub max: T,
    pub argmin: FiberPoint<T>,
    pub argmax: FiberPoint<T>,
    pub base_samples: usize,
    pub fiber_samples: usize,
}

/// Extremes of `quantity(slice, ζ) / Ω` over `atlas × grid`.
pub fn fiber_extremes<T: Real>(
    potential: &ProjectivizedPotential<T>,
    atlas: &BaseChartAtlas<T>,
    grid: &FiberSampleGrid,
    omega: &BaseHermitianForm<T>,
    mut quantity: impl FnMut(&BaseSlice<'_, T>, &[Complex<T>]) -> Result<T>,
) -> Result<FiberExtremes<T>> {
    let zetas = grid.points::<T>(potential.rank());
    let first = FiberPoint::new(atlas.samples()[0], zetas[0].clone());
    let mut out = FiberExtremes {
        min: T::max_value().unwrap(),
        max: T::min_value().unwrap(),
        argmin: first.clone(),
        argmax: first,
        base_samples: atlas.samples().len(),
        fiber_samples: zetas.len(),
    };
    for base in atlas.samples() {
        let slice = potential.slice(base)?;
        let c = omega.coefficient(base)?;
        for zeta in &zetas {
            let v = quantity(&slice, zeta)? / c;
            if v < out.min {
                out.min = v;
                out.argmin = FiberPoint::new(*base, zeta.clone());
            }
            if v > out.max {
                out.max = v;
                out.argmax = FiberPoint::new(*base, zeta.clone());
            }
        }
    }
    Ok(out)
}

/// Extremes of `−θ(g)/Ω` over `atlas × grid`.
pub fn kobayashi_extremes<T: Real>(
    potential: &ProjectivizedPotential<T>,
    atlas: &BaseChartAtlas<T>,
    grid: &FiberSampleGrid,
    omega: &BaseHermitianForm<T>,
) -> Result<FiberExtremes<T>> {
    fiber_extremes(potential, atlas, grid, omega, |s, z| s.kobayashi_at(z))
}

/// `O(1)` potential of `P(W)` for a metric on `W`.
pub fn o1_potential<T: Real>(
    source: PotentialSource<T>,
    fiber_chart: usize,
) -> Result<ProjectivizedPotential<T>> {
    ProjectivizedPotential::new(source, fiber_chart)
}

/// Hermitian positivity of a Hessian at a point: all eigenvalues positive.
pub fn is_positive_definite<T: Real>(m: &CMatrix<T>) -> bool {
    cholesky_factor(m, "", ()).is_ok()
}
