//! The Riemann sphere with its two affine charts, line bundles `L^d` with
//! metric weights, and Hermitian forms on the base.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{scalar_jet, ComplexHessianStencil, ScalarJet};
use crate::scalar::{cabs, is_finite, lit, to_f64, Complex, Real};

/// One of the two affine charts of `P¹`; `Infinity` uses `z' = 1/z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chart {
    Origin,
    Infinity,
}

impl Chart {
    pub fn index(self) -> usize {
        match self {
            Chart::Origin => 0,
            Chart::Infinity => 1,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        match i {
            0 => Some(Chart::Origin),
            1 => Some(Chart::Infinity),
            _ => None,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Chart::Origin => Chart::Infinity,
            Chart::Infinity => Chart::Origin,
        }
    }
}

/// A point of `P¹` given by a chart and a coordinate in it.
#[derive(Clone, Copy, PartialEq)]
pub struct BasePoint<T> {
    pub chart: Chart,
    pub z: Complex<T>,
}

impl<T: Real> BasePoint<T> {
    pub fn new(chart: Chart, z: Complex<T>) -> Self {
        Self { chart, z }
    }

    pub fn origin(z: Complex<T>) -> Self {
        Self::new(Chart::Origin, z)
    }

    /// The same point in the other chart, if it lies there.
    pub fn transition(&self) -> Option<Self> {
        if self.z.norm_sqr() == T::zero() {
            None
        } else {
            Some(Self::new(self.chart.other(), self.z.inv()))
        }
    }

    /// Point at the same chart shifted by `dz`.
    pub fn shifted(&self, dz: Complex<T>) -> Self {
        Self::new(self.chart, self.z + dz)
    }
}

impl<T: Real> fmt::Debug for BasePoint<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?}:({:.6}, {:.6})",
            self.chart,
            to_f64(self.z.re),
            to_f64(self.z.im)
        )
    }
}

/// The two charts and a finite sample set covering the closed unit disk of each.
#[derive(Debug, Clone)]
pub struct BaseChartAtlas<T: Real> {
    samples: Vec<BasePoint<T>>,
    resolution: (usize, usize),
}

impl<T: Real> BaseChartAtlas<T> {
    /// Polar grid per chart: radii `i/n_radius` for `i = 0..=n_radius` and
    /// `n_angle` equally spaced angles, with the center taken once.
    pub fn polar(n_radius: usize, n_angle: usize) -> Result<Self> {
        if n_radius == 0 || n_angle == 0 {
            return Err(Error::InvalidInput(
                "base grid needs positive radius and angle counts".into(),
            ));
        }
        let mut samples = Vec::with_capacity(2 * (1 + n_radius * n_angle));
        for chart in [Chart::Origin, Chart::Infinity] {
            samples.push(BasePoint::new(chart, Complex::new(T::zero(), T::zero())));
            for i in 1..=n_radius {
                let r = i as f64 / n_radius as f64;
                for j in 0..n_angle {
                    let a = 2.0 * std::f64::consts::PI * j as f64 / n_angle as f64;
                    let z = Complex::new(lit::<T>(r * a.cos()), lit::<T>(r * a.sin()));
                    samples.push(BasePoint::new(chart, z));
                }
            }
        }
        Ok(Self {
            samples,
            resolution: (n_radius, n_angle),
        })
    }

    /// The 21×21 polar grid used for reported extremes.
    pub fn standard() -> Self {
        Self::polar(20, 21).expect("static resolution")
    }

    /// Explicit sample list; every point must lie in the closed unit disk of its chart.
    pub fn with_samples(samples: Vec<BasePoint<T>>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidInput("empty base sample set".into()));
        }
        let tol = lit::<T>(1e-12);
        if let Some(p) = samples.iter().find(|p| cabs(p.z) > T::one() + tol) {
            return Err(Error::InvalidInput(format!(
                "base sample {p:?} lies outside the unit disk of its chart"
            )));
        }
        Ok(Self {
            samples,
            resolution: (0, 0),
        })
    }

    pub fn samples(&self) -> &[BasePoint<T>] {
        &self.samples
    }

    /// `(n_radius, n_angle)` of a polar grid, `(0, 0)` for explicit lists.
    pub fn resolution(&self) -> (usize, usize) {
        self.resolution
    }

    /// Sample points on the unit circle of the origin chart, where the charts overlap.
    pub fn overlap_samples(&self) -> Vec<BasePoint<T>> {
        let tol = lit::<T>(1e-12);
        self.samples
            .iter()
            .filter(|p| p.chart == Chart::Origin && (cabs(p.z) - T::one()).abs() < tol)
            .copied()
            .collect()
    }
}

pub(crate) type WeightFn<T> = Arc<dyn Fn(Complex<T>) -> Result<T> + Send + Sync>;

/// Hermitian metric on the line bundle `L^d`, given by the local weight
/// `-log |frame|²` in each chart.
#[derive(Clone)]
pub struct LineBundleMetric<T> {
    pub degree: i64,
    weights: [WeightFn<T>; 2],
    /// Set when the weight is exactly `fs_degree · log(1+|z|²)` in both charts.
    fs_degree: Option<f64>,
}

impl<T: Real> fmt::Debug for LineBundleMetric<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LineBundleMetric")
            .field("degree", &self.degree)
            .field("fubini_study", &self.fs_degree)
            .finish()
    }
}

impl<T: Real> LineBundleMetric<T> {
    pub fn from_weights(
        degree: i64,
        origin: impl Fn(Complex<T>) -> Result<T> + Send + Sync + 'static,
        infinity: impl Fn(Complex<T>) -> Result<T> + Send + Sync + 'static,
    ) -> Self {
        Self {
            degree,
            weights: [Arc::new(origin), Arc::new(infinity)],
            fs_degree: None,
        }
    }

    pub(crate) fn from_arcs(degree: i64, weights: [WeightFn<T>; 2]) -> Self {
        Self {
            degree,
            weights,
            fs_degree: None,
        }
    }

    pub fn weight(&self, at: &BasePoint<T>) -> Result<T> {
        let v = (self.weights[at.chart.index()])(at.z)?;
        if !is_finite(v) {
            return Err(Error::domain("non-finite line weight", at));
        }
        Ok(v)
    }

    pub(crate) fn weight_fn(&self, chart: Chart) -> &WeightFn<T> {
        &self.weights[chart.index()]
    }

    /// Degree `d` of a Fubini–Study power, if this metric is one.
    pub fn fubini_study_degree(&self) -> Option<f64> {
        self.fs_degree
    }

    /// `L₁ ⊗ L₂`: weights add.
    pub fn tensor(&self, other: &Self) -> Self {
        let (a, b) = (self.weights.clone(), other.weights.clone());
        let sum = |i: usize| -> WeightFn<T> {
            let (f, g) = (a[i].clone(), b[i].clone());
            Arc::new(move |z| Ok(f(z)? + g(z)?))
        };
        Self {
            degree: self.degree + other.degree,
            weights: [sum(0), sum(1)],
            fs_degree: self.fs_degree.zip(other.fs_degree).map(|(x, y)| x + y),
        }
    }

    /// `L^p` with weight scaled by `p`.
    pub fn power(&self, p: i64) -> Self {
        let scale = |i: usize| -> WeightFn<T> {
            let f = self.weights[i].clone();
            let c = lit::<T>(p as f64);
            Arc::new(move |z| Ok(c * f(z)?))
        };
        Self {
            degree: p * self.degree,
            weights: [scale(0), scale(1)],
            fs_degree: self.fs_degree.map(|d| d * p as f64),
        }
    }

    /// Largest deviation of `weight₀(z) − weight₁(1/z) − d·log|z|²` over `points`
    /// (points are taken in the origin chart).
    pub fn transition_defect(&self, points: &[BasePoint<T>]) -> Result<T> {
        let d = lit::<T>(self.degree as f64);
        let mut worst = T::zero();
        for p in points {
            let Some(q) = p.transition() else { continue };
            let (p0, p1) = if p.chart == Chart::Origin {
                (*p, q)
            } else {
                (q, *p)
            };
            let defect = self.weight(&p0)? - self.weight(&p1)? - d * p0.z.norm_sqr().ln();
            worst = worst.max(defect.abs());
        }
        Ok(worst)
    }

    /// Jet of the weight at `at`.
    pub fn weight_jet(
        &self,
        at: &BasePoint<T>,
        stencil: &ComplexHessianStencil<T>,
    ) -> Result<ScalarJet<T>> {
        if let Some(d) = self.fs_degree {
            return Ok(fs_weight_jet(lit(d), at.z));
        }
        let f = &self.weights[at.chart.index()];
        scalar_jet(&|z| f(z), at.z, stencil)
    }
}

/// `d · log(1+|z|²)` with its exact derivatives.
pub(crate) fn fs_weight_jet<T: Real>(d: T, z: Complex<T>) -> ScalarJet<T> {
    let s = T::one() + z.norm_sqr();
    ScalarJet {
        value: d * s.ln(),
        dz: z.conj() * (d / s),
        dzdzbar: d / (s * s),
    }
}

/// `L^d` with the Fubini–Study weight `d·log(1+|z|²)` in each chart.
pub fn fubini_study_line<T: Real>(d: i64) -> LineBundleMetric<T> {
    let c = lit::<T>(d as f64);
    let w: WeightFn<T> = Arc::new(move |z: Complex<T>| Ok(c * (T::one() + z.norm_sqr()).ln()));
    LineBundleMetric {
        degree: d,
        weights: [w.clone(), w],
        fs_degree: Some(d as f64),
    }
}

/// Curvature coefficient of `L` at `at`, i.e. `∂∂̄` of its weight.
pub fn line_curvature<T: Real>(
    l: &LineBundleMetric<T>,
    at: &BasePoint<T>,
    stencil: &ComplexHessianStencil<T>,
) -> Result<T> {
    Ok(l.weight_jet(at, stencil)?.dzdzbar)
}

/// Coefficient of `∂/∂z ∧ ∂/∂z̄` of the Fubini–Study form, `(1+|z|²)^{-2}`.
pub fn fubini_study_coefficient<T: Real>(z: Complex<T>) -> T {
    let s = T::one() + z.norm_sqr();
    T::one() / (s * s)
}

/// Hermitian metric `Ω` on the base, by its coefficient in each chart.
#[derive(Clone)]
pub struct BaseHermitianForm<T> {
    coefficients: [WeightFn<T>; 2],
    fs_multiple: Option<f64>,
}

impl<T: Real> fmt::Debug for BaseHermitianForm<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BaseHermitianForm")
            .field("fubini_study_multiple", &self.fs_multiple)
            .finish()
    }
}

impl<T: Real> BaseHermitianForm<T> {
    /// `c · Θ_FS`.
    pub fn fubini_study(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "base form multiple must be positive, got {c}"
            )));
        }
        let k = lit::<T>(c);
        let f: WeightFn<T> = Arc::new(move |z| Ok(k * fubini_study_coefficient(z)));
        Ok(Self {
            coefficients: [f.clone(), f],
            fs_multiple: Some(c),
        })
    }

    pub fn from_coefficients(
        origin: impl Fn(Complex<T>) -> Result<T> + Send + Sync + 'static,
        infinity: impl Fn(Complex<T>) -> Result<T> + Send + Sync + 'static,
    ) -> Self {
        Self {
            coefficients: [Arc::new(origin), Arc::new(infinity)],
            fs_multiple: None,
        }
    }

    pub fn fubini_study_multiple(&self) -> Option<f64> {
        self.fs_multiple
    }

    /// `Ω(∂/∂z, ∂/∂z̄)` at `at`; must be positive.
    pub fn coefficient(&self, at: &BasePoint<T>) -> Result<T> {
        let c = (self.coefficients[at.chart.index()])(at.z)?;
        if !is_finite(c) || c <= T::zero() {
            return Err(Error::not_pd("base Hermitian form", at));
        }
        Ok(c)
    }

    /// Same form scaled by a positive constant.
    pub fn scaled(&self, s: f64) -> Self {
        let k = lit::<T>(s);
        let scale = |i: usize| -> WeightFn<T> {
            let f = self.coefficients[i].clone();
            Arc::new(move |z| Ok(k * f(z)?))
        };
        Self {
            coefficients: [scale(0), scale(1)],
            fs_multiple: self.fs_multiple.map(|m| m * s),
        }
    }
}
