//! L² metrics on symmetric powers and on the determinant, obtained by
//! integrating powers of an `O(1)` metric over the fibers of `P(W)`.
//!
//! In the fiber chart `c` the section `s^α` of `SᵏW*` pairs with `e(w)^α`, the
//! volume form `ω^{r-1}` has density `det(φ_{ij̄})`, and all global constants
//! (powers of `π`, factorials) are dropped.

use std::sync::Arc;

use serde::Serialize;

use crate::base::{BasePoint, Chart, LineBundleMetric, WeightFn};
use crate::bundle::{monomial_basis, EndCurvature};
use crate::cache::PointCache;
use crate::error::{Error, Result};
use crate::numerics::linalg::{hermitize, CMatrix};
use crate::numerics::quadrature::accumulate_slabs;
use crate::numerics::{matrix_jet, ComplexHessianStencil, FiberQuadratureRule};
use crate::projective::{embed, schur, FiberPoint, PotentialSource, ProjectivizedPotential};
use crate::scalar::{is_finite, lit, to_f64, Complex, Real};

/// Gram matrix of an L² metric on `SᵏW*` at one base point, in the
/// monomial basis of [`monomial_basis`].
#[derive(Clone, Debug)]
pub struct DirectImageGram<T: Real> {
    pub at: BasePoint<T>,
    pub k: usize,
    pub basis: Vec<Vec<u32>>,
    pub gram: CMatrix<T>,
    pub rule: FiberQuadratureRule,
}

impl<T: Real> DirectImageGram<T> {
    pub fn max_off_diagonal(&self) -> T {
        let n = self.gram.nrows();
        let mut m = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    m = m.max(self.gram[(i, j)].norm_sqr().sqrt());
                }
            }
        }
        m
    }
}

/// Per-node data of the fiber kernel: `G(z, e(w))` and `det(φ_{ij̄})`.
struct Kernel<T: Real> {
    g: Option<CMatrix<T>>,
    det_g: T,
}

impl<T: Real> Kernel<T> {
    fn new(potential: &ProjectivizedPotential<T>, at: &BasePoint<T>) -> Result<Self> {
        match potential.source() {
            PotentialSource::Hermitian(h) => {
                let g = h.matrix(at)?;
                let det_g = g.determinant().re;
                Ok(Self { g: Some(g), det_g })
            }
            PotentialSource::Finsler(_) => Ok(Self {
                g: None,
                det_g: T::zero(),
            }),
        }
    }

    /// `(G(z, e(w)), det(φ_{ij̄}))`; for Hermitian `G` the determinant is
    /// `det G / (e^*Ge)^r`.
    fn eval(
        &self,
        potential: &ProjectivizedPotential<T>,
        at: &BasePoint<T>,
        w: &[Complex<T>],
    ) -> Result<(T, T)> {
        match &self.g {
            Some(g) => {
                let q = embedded_form(g, potential.fiber_chart(), w);
                if !(q > T::zero()) {
                    return Err(Error::domain("metric on W is not positive", (at, w)));
                }
                Ok((q, self.det_g / q.powi(potential.rank() as i32)))
            }
            None => {
                let q = potential.source_value(at, w)?;
                let fb = potential.fiber_block(&FiberPoint::from_chart(
                    *at,
                    potential.fiber_chart(),
                    w,
                ))?;
                let d = fb.determinant().re;
                if !(d > T::zero()) {
                    return Err(Error::domain(
                        "fiber Hessian is not positive definite",
                        (at, w),
                    ));
                }
                Ok((q, d))
            }
        }
    }
}

/// `e(w)^* G e(w)` without materializing `e(w)`.
fn embedded_form<T: Real>(g: &CMatrix<T>, chart: usize, w: &[Complex<T>]) -> T {
    let one = Complex::new(T::one(), T::zero());
    let coord = |i: usize| match i.cmp(&chart) {
        std::cmp::Ordering::Less => w[i],
        std::cmp::Ordering::Equal => one,
        std::cmp::Ordering::Greater => w[i - 1],
    };
    let mut q = T::zero();
    for a in 0..g.nrows() {
        let ea = coord(a);
        q += g[(a, a)].re * ea.norm_sqr();
        for b in a + 1..g.ncols() {
            q += lit::<T>(2.0) * (ea.conj() * g[(a, b)] * coord(b)).re;
        }
    }
    q
}

/// `H_k` at `at`: `gram[a][b] = ∫ e(w)^{α_b} conj(e(w)^{α_a}) e^{-kφ} det(φ_{ij̄}) dλ(w)`.
pub fn assemble_hk<T: Real>(
    potential: &ProjectivizedPotential<T>,
    k: usize,
    at: &BasePoint<T>,
    rule: &FiberQuadratureRule,
) -> Result<DirectImageGram<T>> {
    let r = potential.rank();
    if rule.fiber_dim + 1 != r {
        return Err(Error::InvalidInput(format!(
            "quadrature over ℂ^{} for rank {r}",
            rule.fiber_dim
        )));
    }
    let basis = monomial_basis(r, k);
    let n = basis.len();
    let kernel = Kernel::new(potential, at)?;
    let zero = Complex::new(T::zero(), T::zero());
    let gram = accumulate_slabs(
        rule,
        || vec![zero; n * n],
        |acc: &mut Vec<Complex<T>>, w: &[Complex<T>], wt: T| -> Result<()> {
            let (q, det) = kernel.eval(potential, at, w)?;
            let weight = wt * det / q.powi(k as i32);
            if !is_finite(weight) {
                return Err(Error::domain("non-finite L² kernel", (at, w)));
            }
            let e = embed(potential.fiber_chart(), w);
            let mono: Vec<Complex<T>> = basis
                .iter()
                .map(|alpha| {
                    let mut m = Complex::new(T::one(), T::zero());
                    for (x, &p) in e.iter().zip(alpha) {
                        for _ in 0..p {
                            m *= x;
                        }
                    }
                    m
                })
                .collect();
            for a in 0..n {
                let ca = mono[a].conj() * weight;
                for b in a..n {
                    acc[a * n + b] += mono[b] * ca;
                }
            }
            Ok(())
        },
        |acc, s| {
            for (x, y) in acc.iter_mut().zip(s) {
                *x += y;
            }
        },
    )?;
    let m = CMatrix::<T>::from_fn(n, n, |a, b| {
        if a <= b {
            gram[a * n + b]
        } else {
            gram[b * n + a].conj()
        }
    });
    Ok(DirectImageGram {
        at: *at,
        k,
        basis,
        gram: m,
        rule: *rule,
    })
}

/// `𝐇_k` on `SᵏE*⊗(det E)ᵏ`: the same kernel, run on the potential of
/// `O_{P(E⊗det E*)}(1)`.
pub fn assemble_hk_twisted<T: Real>(
    potential_on_twist: &ProjectivizedPotential<T>,
    k: usize,
    at: &BasePoint<T>,
    rule: &FiberQuadratureRule,
) -> Result<DirectImageGram<T>> {
    assemble_hk(potential_on_twist, k, at, rule)
}

/// `I(z) = ∫ e^{-rφ(z,w)} dλ(w)`, the squared norm of the frame determinant.
pub fn det_image_integral<T: Real>(
    potential: &ProjectivizedPotential<T>,
    at: &BasePoint<T>,
    rule: &FiberQuadratureRule,
) -> Result<T> {
    let r = potential.rank();
    if rule.fiber_dim + 1 != r {
        return Err(Error::InvalidInput(format!(
            "quadrature over ℂ^{} for rank {r}",
            rule.fiber_dim
        )));
    }
    let kernel = Kernel::new(potential, at)?;
    let g = kernel.g.as_ref();
    accumulate_slabs(
        rule,
        || T::zero(),
        |acc: &mut T, w: &[Complex<T>], wt: T| -> Result<()> {
            let q = match g {
                Some(g) => embedded_form(g, potential.fiber_chart(), w),
                None => potential.source_value(at, w)?,
            };
            let v = wt / q.powi(r as i32);
            if !is_finite(v) || !(q > T::zero()) {
                return Err(Error::domain("non-finite determinant kernel", (at, w)));
            }
            *acc += v;
            Ok(())
        },
        |a, b| *a += b,
    )
}

/// L² metric on `det W*` with weight `−log I(z)`.
#[derive(Clone, Debug)]
pub struct DetImageMetric<T: Real> {
    line: LineBundleMetric<T>,
    pub rule: FiberQuadratureRule,
}

impl<T: Real> DetImageMetric<T> {
    pub fn weight(&self, at: &BasePoint<T>) -> Result<T> {
        self.line.weight(at)
    }

    pub fn integral(&self, at: &BasePoint<T>) -> Result<T> {
        Ok((-self.weight(at)?).exp())
    }

    pub fn as_line(&self) -> &LineBundleMetric<T> {
        &self.line
    }

    pub fn curvature(&self, at: &BasePoint<T>, stencil: &ComplexHessianStencil<T>) -> Result<T> {
        crate::base::line_curvature(&self.line, at, stencil)
    }
}

/// Determinant image of `h` on `O_{P(W)}(1)`; its degree is `−deg W`.
pub fn assemble_det_metric<T: Real>(
    potential: &ProjectivizedPotential<T>,
    rule: &FiberQuadratureRule,
) -> Result<DetImageMetric<T>> {
    let degree = match potential.source() {
        PotentialSource::Hermitian(h) => -h.transition_degrees().iter().sum::<i64>(),
        PotentialSource::Finsler(_) => 0,
    };
    let cache = Arc::new(PointCache::<T>::new());
    let map = |chart: Chart| -> WeightFn<T> {
        let pot = potential.clone();
        let cache = cache.clone();
        let rule = *rule;
        Arc::new(move |z| {
            let at = BasePoint::new(chart, z);
            cache.get_or_try(&at, || Ok(-det_image_integral(&pot, &at, &rule)?.ln()))
        })
    };
    Ok(DetImageMetric {
        line: LineBundleMetric::from_arcs(degree, [map(Chart::Origin), map(Chart::Infinity)]),
        rule: *rule,
    })
}

/// Chern curvature of a Gram family, by finite differences of the Gram
/// matrix in the base coordinate.
pub fn direct_image_curvature<T: Real>(
    gram: impl Fn(&BasePoint<T>) -> Result<CMatrix<T>>,
    at: &BasePoint<T>,
    stencil: &ComplexHessianStencil<T>,
) -> Result<EndCurvature<T>> {
    let chart = at.chart;
    let f = |z: Complex<T>| gram(&BasePoint::new(chart, z)).map(|m| hermitize(&m));
    let jet = matrix_jet(&f, at.z, stencil)?;
    EndCurvature::from_jet(*at, &jet)
}

/// Family of L² Gram matrices of one power `k`, optionally twisted by a line
/// metric: `H_k ⊗ L^p` has Gram `gram · e^{-p·weight_L}`.
#[derive(Clone, Debug)]
pub struct DirectImage<T: Real> {
    pub potential: ProjectivizedPotential<T>,
    pub k: usize,
    pub rule: FiberQuadratureRule,
    pub twist: Option<(LineBundleMetric<T>, i64)>,
}

impl<T: Real> DirectImage<T> {
    pub fn new(potential: ProjectivizedPotential<T>, k: usize, rule: FiberQuadratureRule) -> Self {
        Self {
            potential,
            k,
            rule,
            twist: None,
        }
    }

    pub fn twisted(mut self, line: LineBundleMetric<T>, power: i64) -> Self {
        self.twist = Some((line, power));
        self
    }

    pub fn gram(&self, at: &BasePoint<T>) -> Result<CMatrix<T>> {
        let g = assemble_hk(&self.potential, self.k, at, &self.rule)?.gram;
        match &self.twist {
            None => Ok(g),
            Some((l, p)) => {
                let f = (-lit::<T>(*p as f64) * l.weight(at)?).exp();
                Ok(g * Complex::new(f, T::zero()))
            }
        }
    }

    pub fn curvature(
        &self,
        at: &BasePoint<T>,
        stencil: &ComplexHessianStencil<T>,
    ) -> Result<EndCurvature<T>> {
        direct_image_curvature(|p| self.gram(p), at, stencil)
    }

    pub fn basis(&self) -> Vec<Vec<u32>> {
        monomial_basis(self.potential.rank(), self.k)
    }
}

/// Both sides of the inequality behind positivity of the determinant image.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BerndtssonCheck {
    /// `−Θ_{det}(η, η̄)`.
    pub lhs: f64,
    /// `−r ∫ A(η,η̄) e^{-rφ} dλ / I`.
    pub rhs: f64,
    pub tolerance: f64,
    pub holds: bool,
}

pub fn berndtsson_inequality_check<T: Real>(
    potential: &ProjectivizedPotential<T>,
    at: &BasePoint<T>,
    eta: Complex<T>,
    rule: &FiberQuadratureRule,
    stencil: &ComplexHessianStencil<T>,
    tolerance: f64,
) -> Result<BerndtssonCheck> {
    let det = assemble_det_metric(potential, rule)?;
    let lhs = -det.curvature(at, stencil)? * eta.norm_sqr();
    let r = potential.rank();
    let slice = potential.slice(at)?;
    let kernel = Kernel::new(potential, at)?;
    let (num, den) = accumulate_slabs(
        rule,
        || (T::zero(), T::zero()),
        |acc: &mut (T, T), w: &[Complex<T>], wt: T| -> Result<()> {
            let (q, _) = kernel.eval(potential, at, w)?;
            let m = slice.full_curvature(w)?;
            let (a, _) = schur(&m, &FiberPoint::from_chart(*at, potential.fiber_chart(), w))?;
            let dens = wt / q.powi(r as i32);
            acc.0 += dens * a;
            acc.1 += dens;
            Ok(())
        },
        |a, b| {
            a.0 += b.0;
            a.1 += b.1;
        },
    )?;
    let rhs = -lit::<T>(r as f64) * num / den * eta.norm_sqr();
    let (lhs, rhs) = (to_f64(lhs), to_f64(rhs));
    Ok(BerndtssonCheck {
        lhs,
        rhs,
        tolerance,
        holds: lhs <= rhs + tolerance,
    })
}
