//! Finsler metrics on vector bundles (squared-length convention: `F` is
//! homogeneous of degree 2 and `F^{1/2}` is the norm): Hermitian metrics,
//! k-th roots of symmetric-power Gram matrices, line twists, Hermitian
//! perturbations and duals.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::base::{BaseChartAtlas, BaseHermitianForm, BasePoint, LineBundleMetric};
use crate::bundle::{
    monomial_basis, multinomial, power_coefficients, symmetric_power_metric, HermitianMetric,
};
use crate::cache::PointCache;
use crate::error::{Error, Result};
use crate::numerics::linalg::{hermitian_eigenvalues, quad_form, CMatrix};
use crate::numerics::ComplexHessianStencil;
use crate::projective::{
    fiber_extremes, o1_potential, FiberExtremes, FiberSampleGrid, PotentialSource,
};
use crate::scalar::{is_finite, lit, to_f64, Complex, Real};

/// How a Finsler metric was built.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Hermitian,
    KthRoot { k: usize },
    Twisted { power: i64, of: Box<Provenance> },
    Perturbed { epsilon: f64, of: Box<Provenance> },
    Dual { of: Box<Provenance> },
}

/// A fiber function `G(z, u)` with `G(z, λu) = |λ|² G(z, u)`.
pub trait FiberFunctional<T: Real>: Send + Sync {
    fn rank(&self) -> usize;

    fn value(&self, at: &BasePoint<T>, u: &[Complex<T>]) -> Result<T>;

    fn provenance(&self) -> Provenance;

    /// `∂G/∂ū_j`; central differences unless overridden.
    fn gradient(&self, at: &BasePoint<T>, u: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let scale = u
            .iter()
            .fold(T::zero(), |a, x| a.max(x.norm_sqr().sqrt()))
            .max(lit(1e-300));
        let h = scale * lit::<T>(1e-6);
        let mut out = Vec::with_capacity(u.len());
        let mut v = u.to_vec();
        let half = lit::<T>(0.5);
        for j in 0..u.len() {
            let mut d = [T::zero(); 2];
            for (slot, dir) in [
                Complex::new(T::one(), T::zero()),
                Complex::new(T::zero(), T::one()),
            ]
            .into_iter()
            .enumerate()
            {
                v[j] = u[j] + dir * h;
                let p = self.value(at, &v)?;
                v[j] = u[j] - dir * h;
                let m = self.value(at, &v)?;
                v[j] = u[j];
                d[slot] = (p - m) / (h + h);
            }
            out.push(Complex::new(d[0], d[1]) * half);
        }
        Ok(out)
    }
}

/// Shared handle to a Finsler metric.
#[derive(Clone)]
pub struct FinslerMetric<T: Real> {
    inner: Arc<dyn FiberFunctional<T>>,
}

impl<T: Real> fmt::Debug for FinslerMetric<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FinslerMetric")
            .field("rank", &self.rank())
            .field("provenance", &self.provenance())
            .finish()
    }
}

impl<T: Real> FinslerMetric<T> {
    pub fn new(f: impl FiberFunctional<T> + 'static) -> Self {
        Self { inner: Arc::new(f) }
    }

    pub fn rank(&self) -> usize {
        self.inner.rank()
    }

    pub fn provenance(&self) -> Provenance {
        self.inner.provenance()
    }

    pub fn value(&self, at: &BasePoint<T>, u: &[Complex<T>]) -> Result<T> {
        if u.len() != self.rank() {
            return Err(Error::InvalidInput(format!(
                "vector of length {} for rank {}",
                u.len(),
                self.rank()
            )));
        }
        let v = self.inner.value(at, u)?;
        if !is_finite(v) || v < T::zero() {
            return Err(Error::domain(
                "Finsler metric is negative or non-finite",
                (at, u),
            ));
        }
        Ok(v)
    }

    /// `∂G/∂ū`.
    pub fn gradient(&self, at: &BasePoint<T>, u: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        self.inner.gradient(at, u)
    }

    /// Norm `G^{1/2}`.
    pub fn norm(&self, at: &BasePoint<T>, u: &[Complex<T>]) -> Result<T> {
        Ok(self.value(at, u)?.sqrt())
    }
}

/// `G(u) = u^* H u`.
pub struct HermitianFinsler<T: Real> {
    metric: HermitianMetric<T>,
}

impl<T: Real> HermitianFinsler<T> {
    pub fn new(metric: HermitianMetric<T>) -> Self {
        Self { metric }
    }
}

fn mat_vec<T: Real>(m: &CMatrix<T>, u: &[Complex<T>]) -> Vec<Complex<T>> {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols()).fold(Complex::new(T::zero(), T::zero()), |acc, j| {
                acc + m[(i, j)] * u[j]
            })
        })
        .collect()
}

impl<T: Real> FiberFunctional<T> for HermitianFinsler<T> {
    fn rank(&self) -> usize {
        self.metric.rank()
    }

    fn value(&self, at: &BasePoint<T>, u: &[Complex<T>]) -> Result<T> {
        Ok(quad_form(&self.metric.matrix(at)?, u))
    }

    fn provenance(&self) -> Provenance {
        Provenance::Hermitian
    }

    fn gradient(&self, at: &BasePoint<T>, u: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        Ok(mat_vec(&self.metric.matrix(at)?, u))
    }
}

pub(crate) type GramFn<T> = Arc<dyn Fn(&BasePoint<T>) -> Result<CMatrix<T>> + Send + Sync>;

/// `G(u) = (c^* H_k c)^{1/k}` with `c` the coefficients of `u^k` in the
/// monomial basis of `SᵏE`.
pub struct KthRootFinsler<T: Real> {
    rank: usize,
    k: usize,
    basis: Vec<Vec<u32>>,
    gram: GramFn<T>,
    cache: PointCache<CMatrix<T>>,
}

impl<T: Real> KthRootFinsler<T> {
    fn gram_at(&self, at: &BasePoint<T>) -> Result<CMatrix<T>> {
        self.cache.get_or_try(at, || (self.gram)(at))
    }
}

impl<T: Real> FiberFunctional<T> for KthRootFinsler<T> {
    fn rank(&self) -> usize {
        self.rank
    }

    fn value(&self, at: &BasePoint<T>, u: &[Complex<T>]) -> Result<T> {
        let g = self.gram_at(at)?;
        let c = power_coefficients(u, &self.basis);
        let s = quad_form(&g, &c);
        if s < T::zero() {
            return Err(Error::not_pd("symmetric-power Gram matrix", at));
        }
        Ok(s.powf(T::one() / lit::<T>(self.k as f64)))
    }

    fn provenance(&self) -> Provenance {
        Provenance::KthRoot { k: self.k }
    }

    fn gradient(&self, at: &BasePoint<T>, u: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let g = self.gram_at(at)?;
        let c = power_coefficients(u, &self.basis);
        let gc = mat_vec(&g, &c);
        let s = c
            .iter()
            .zip(&gc)
            .fold(T::zero(), |a, (x, y)| a + (x.conj() * y).re);
        let kf = lit::<T>(self.k as f64);
        if s <= T::zero() {
            return Ok(vec![Complex::new(T::zero(), T::zero()); self.rank]);
        }
        let factor = s.powf(T::one() / kf - T::one()) / kf;
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.rank];
        for (a, alpha) in self.basis.iter().enumerate() {
            let m = lit::<T>(multinomial(alpha) as f64);
            for j in 0..self.rank {
                if alpha[j] == 0 {
                    continue;
                }
                // ∂c_a/∂u_j = m_a α_j u^{α − e_j}
                let mut d = Complex::new(m * lit::<T>(alpha[j] as f64), T::zero());
                for (i, &e) in alpha.iter().enumerate() {
                    let e = if i == j { e - 1 } else { e };
                    for _ in 0..e {
                        d *= u[i];
                    }
                }
                out[j] += d.conj() * gc[a];
            }
        }
        Ok(out.into_iter().map(|x| x * factor).collect())
    }
}

/// k-th root of a family of Gram matrices on `SᵏE` (monomial basis order of
/// [`monomial_basis`]).
pub fn kth_root_finsler<T: Real>(
    rank: usize,
    k: usize,
    gram: impl Fn(&BasePoint<T>) -> Result<CMatrix<T>> + Send + Sync + 'static,
) -> Result<FinslerMetric<T>> {
    if k == 0 || rank == 0 {
        return Err(Error::InvalidInput(
            "k-th root needs k >= 1 and rank >= 1".into(),
        ));
    }
    Ok(FinslerMetric::new(KthRootFinsler {
        rank,
        k,
        basis: monomial_basis(rank, k),
        gram: Arc::new(gram),
        cache: PointCache::new(),
    }))
}

/// k-th root of the symmetric-power metric of `h` (equal to `h` itself).
pub fn kth_root_of_symmetric_power<T: Real>(
    h: &HermitianMetric<T>,
    k: usize,
) -> Result<FinslerMetric<T>> {
    let h2 = h.clone();
    kth_root_finsler(h.rank(), k, move |at| symmetric_power_metric(&h2, k, at))
}

struct TwistedFinsler<T: Real> {
    inner: FinslerMetric<T>,
    line: LineBundleMetric<T>,
    power: i64,
    cache: PointCache<T>,
}

impl<T: Real> TwistedFinsler<T> {
    fn factor(&self, at: &BasePoint<T>) -> Result<T> {
        self.cache.get_or_try(at, || {
            Ok((-lit::<T>(self.power as f64) * self.line.weight(at)?).exp())
        })
    }
}

impl<T: Real> FiberFunctional<T> for TwistedFinsler<T> {
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    fn value(&self, at: &BasePoint<T>, u: &[Complex<T>]) -> Result<T> {
        Ok(self.inner.value(at, u)? * self.factor(at)?)
    }

    fn provenance(&self) -> Provenance {
        Provenance::Twisted {
            power: self.power,
            of: Box::new(self.inner.provenance()),
        }
    }

    fn gradient(&self, at: &BasePoint<T>, u: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let f = self.factor(at)?;
        Ok(self
            .inner
            .gradient(at, u)?
            .into_iter()
            .map(|x| x * f)
            .collect())
    }
}

/// `G ⊗ L^p`: multiplies `G` by `e^{-p·weight_L}`.
pub fn twist_finsler<T: Real>(
    f: &FinslerMetric<T>,
    line: &LineBundleMetric<T>,
    power: i64,
) -> FinslerMetric<T> {
    FinslerMetric::new(TwistedFinsler {
        inner: f.clone(),
        line: line.clone(),
        power,
        cache: PointCache::new(),
    })
}

struct PerturbedFinsler<T: Real> {
    inner: FinslerMetric<T>,
    h0: HermitianMetric<T>,
    epsilon: T,
}

impl<T: Real> FiberFunctional<T> for PerturbedFinsler<T> {
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    fn value(&self, at: &BasePoint<T>, u: &[Complex<T>]) -> Result<T> {
        Ok(self.inner.value(at, u)? + self.epsilon * quad_form(&self.h0.matrix(at)?, u))
    }

    fn provenance(&self) -> Provenance {
        Provenance::Perturbed {
            epsilon: to_f64(self.epsilon),
            of: Box::new(self.inner.provenance()),
        }
    }

    fn gradient(&self, at: &BasePoint<T>, u: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let g = self.inner.gradient(at, u)?;
        let hu = mat_vec(&self.h0.matrix(at)?, u);
        Ok(g.into_iter()
            .zip(hu)
            .map(|(a, b)| a + b * self.epsilon)
            .collect())
    }
}

/// `G + ε·H0`.
pub fn perturb_with_hermitian<T: Real>(
    f: &FinslerMetric<T>,
    h0: &HermitianMetric<T>,
    epsilon: T,
) -> Result<FinslerMetric<T>> {
    if epsilon < T::zero() || !is_finite(epsilon) {
        return Err(Error::InvalidInput(
            "perturbation size must be nonnegative".into(),
        ));
    }
    if h0.rank() != f.rank() {
        return Err(Error::InvalidInput(
            "perturbation metric has the wrong rank".into(),
        ));
    }
    Ok(FinslerMetric::new(PerturbedFinsler {
        inner: f.clone(),
        h0: h0.clone(),
        epsilon,
    }))
}

/// Default perturbation size: `1e-3 ·` the smallest eigenvalue of `H0` over samples.
pub fn default_perturbation<T: Real>(
    h0: &HermitianMetric<T>,
    samples: &[BasePoint<T>],
) -> Result<T> {
    let mut lo = T::max_value().unwrap();
    for p in samples {
        lo = lo.min(hermitian_eigenvalues(&h0.matrix(p)?)[0]);
    }
    Ok(lit::<T>(1e-3) * lo)
}

/// Controls of the multi-start ascent computing dual metrics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DualOptions {
    pub starts: usize,
    /// Ascent steps taken from every start before the best one is refined.
    pub coarse_steps: usize,
    pub max_steps: usize,
    /// Convergence when `|∇f|·|u| ≤ tolerance·f`.
    pub tolerance: f64,
}

impl Default for DualOptions {
    fn default() -> Self {
        Self {
            starts: 32,
            coarse_steps: 6,
            max_steps: 100,
            tolerance: 1e-9,
        }
    }
}

struct DualFinsler<T: Real> {
    inner: FinslerMetric<T>,
    options: DualOptions,
}

fn radical_inverse(mut i: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

const PRIMES: [usize; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn euclid_norm<T: Real>(u: &[Complex<T>]) -> T {
    u.iter().fold(T::zero(), |a, x| a + x.norm_sqr()).sqrt()
}

impl<T: Real> DualFinsler<T> {
    fn starts(&self, xi: &[Complex<T>]) -> Vec<Vec<Complex<T>>> {
        let r = xi.len();
        let mut out = Vec::with_capacity(self.options.starts);
        let guess: Vec<Complex<T>> = xi.iter().map(|x| x.conj()).collect();
        if euclid_norm(&guess) > T::zero() {
            out.push(guess);
        }
        for i in 0..r {
            let mut e = vec![Complex::new(T::zero(), T::zero()); r];
            e[i] = Complex::new(T::one(), T::zero());
            out.push(e);
        }
        let mut n = 1;
        while out.len() < self.options.starts.max(1) {
            let v: Vec<Complex<T>> = (0..r)
                .map(|j| {
                    let a = 2.0 * radical_inverse(n, PRIMES[(2 * j) % PRIMES.len()]) - 1.0;
                    let b = 2.0 * radical_inverse(n, PRIMES[(2 * j + 1) % PRIMES.len()]) - 1.0;
                    Complex::new(lit::<T>(a), lit::<T>(b))
                })
                .collect();
            n += 1;
            if euclid_norm(&v) > lit(1e-3) {
                out.push(v);
            }
        }
        out.truncate(self.options.starts.max(1));
        out
    }

    /// `|ξ·u|²/G(u)` and its `ū`-gradient.
    fn objective(
        &self,
        at: &BasePoint<T>,
        xi: &[Complex<T>],
        u: &[Complex<T>],
    ) -> Result<(T, Vec<Complex<T>>)> {
        let pair = xi
            .iter()
            .zip(u)
            .fold(Complex::new(T::zero(), T::zero()), |a, (x, y)| a + x * y);
        let g = self.inner.value(at, u)?;
        if g <= T::zero() {
            return Err(Error::not_pd("Finsler metric under dualization", (at, u)));
        }
        let dg = self.inner.gradient(at, u)?;
        let p2 = pair.norm_sqr();
        let f = p2 / g;
        let grad = xi
            .iter()
            .zip(&dg)
            .map(|(x, d)| (pair * x.conj() * g - *d * p2) / (g * g))
            .collect();
        Ok((f, grad))
    }

    /// Ascent on the unit sphere from `u`; returns the final point, value and
    /// relative gradient size.
    fn ascend(
        &self,
        at: &BasePoint<T>,
        xi: &[Complex<T>],
        u0: Vec<Complex<T>>,
        steps: usize,
    ) -> Result<(Vec<Complex<T>>, T, T)> {
        let n0 = euclid_norm(&u0);
        let mut u: Vec<Complex<T>> = u0.into_iter().map(|x| x / n0).collect();
        let (mut f, mut g) = self.objective(at, xi, &u)?;
        let mut step = lit::<T>(0.5);
        let rel = |f: T, g: &[Complex<T>]| {
            if f > T::zero() {
                euclid_norm(g) / f
            } else {
                T::max_value().unwrap()
            }
        };
        let tol = lit::<T>(self.options.tolerance);
        for _ in 0..steps {
            if rel(f, &g) <= tol {
                break;
            }
            let gn = euclid_norm(&g);
            if gn == T::zero() {
                break;
            }
            let mut accepted = false;
            for _ in 0..40 {
                let trial: Vec<Complex<T>> = u
                    .iter()
                    .zip(&g)
                    .map(|(x, d)| *x + *d * (step / gn))
                    .collect();
                let tn = euclid_norm(&trial);
                let trial: Vec<Complex<T>> = trial.into_iter().map(|x| x / tn).collect();
                let (ft, gt) = self.objective(at, xi, &trial)?;
                if ft > f {
                    u = trial;
                    f = ft;
                    g = gt;
                    step = (step * lit(2.0)).min(T::one());
                    accepted = true;
                    break;
                }
                step *= lit(0.5);
            }
            if !accepted {
                break;
            }
        }
        let r = rel(f, &g);
        Ok((u, f, r))
    }
}

impl<T: Real> FiberFunctional<T> for DualFinsler<T> {
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    fn value(&self, at: &BasePoint<T>, xi: &[Complex<T>]) -> Result<T> {
        if euclid_norm(xi) == T::zero() {
            return Ok(T::zero());
        }
        let mut best: Option<(Vec<Complex<T>>, T)> = None;
        for s in self.starts(xi) {
            let (u, f, _) = self.ascend(at, xi, s, self.options.coarse_steps)?;
            if best.as_ref().is_none_or(|(_, b)| f > *b) {
                best = Some((u, f));
            }
        }
        let (u, _) = best.expect("at least one start");
        let (_, f, rel) = self.ascend(at, xi, u, self.options.max_steps)?;
        // a stalled line search at the maximum leaves a gradient at roundoff level
        if rel > lit::<T>(self.options.tolerance.max(1e-7)) {
            return Err(Error::NumericalFailure {
                what: format!(
                    "dual ascent did not converge (relative gradient {:.3e})",
                    to_f64(rel)
                ),
                at: format!("{:?}", (at, xi)),
            });
        }
        Ok(f)
    }

    fn provenance(&self) -> Provenance {
        Provenance::Dual {
            of: Box::new(self.inner.provenance()),
        }
    }

    fn gradient(&self, at: &BasePoint<T>, xi: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        // envelope theorem: ∂/∂ξ̄ of |ξ·u*|²/G(u*) at the maximizer u*
        let mut best: Option<(Vec<Complex<T>>, T)> = None;
        for s in self.starts(xi) {
            let (u, f, _) = self.ascend(at, xi, s, self.options.coarse_steps)?;
            if best.as_ref().is_none_or(|(_, b)| f > *b) {
                best = Some((u, f));
            }
        }
        let (u, _) = best.expect("at least one start");
        let (u, _, _) = self.ascend(at, xi, u, self.options.max_steps)?;
        let pair = xi
            .iter()
            .zip(&u)
            .fold(Complex::new(T::zero(), T::zero()), |a, (x, y)| a + x * y);
        let g = self.inner.value(at, &u)?;
        Ok(u.iter().map(|x| pair * x.conj() / g).collect())
    }
}

/// `G*(ξ) = sup_{u≠0} |ξ(u)|² / G(u)` on the dual bundle.
pub fn dual_finsler<T: Real>(f: &FinslerMetric<T>, options: DualOptions) -> FinslerMetric<T> {
    FinslerMetric::new(DualFinsler {
        inner: f.clone(),
        options,
    })
}

/// A base point with two fiber vectors.
pub type Triple<T> = (BasePoint<T>, Vec<Complex<T>>, Vec<Complex<T>>);

/// Worst relative slack of the triangle inequality for `G^{1/2}`.
#[derive(Clone, Debug)]
pub struct ConvexitySlack<T: Real> {
    /// `min (|u| + |v| − |u+v|) / (|u| + |v|)` over the triples.
    pub worst: T,
    pub witness: Option<Triple<T>>,
    pub triples: usize,
    pub seed: u64,
}

/// Deterministic sample triples `(z, u, v)`: `z` from `samples`, `u`, `v`
/// uniform in the cube `[-1, 1]^{2r}`.
pub fn sample_triples<T: Real>(
    samples: &[BasePoint<T>],
    rank: usize,
    n: usize,
    seed: u64,
) -> Vec<Triple<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vec = |rng: &mut ChaCha8Rng| -> Vec<Complex<T>> {
        (0..rank)
            .map(|_| {
                Complex::new(
                    lit::<T>(rng.gen_range(-1.0..1.0)),
                    lit::<T>(rng.gen_range(-1.0..1.0)),
                )
            })
            .collect()
    };
    (0..n)
        .map(|_| {
            let z = samples[rng.gen_range(0..samples.len())];
            let u = vec(&mut rng);
            let v = vec(&mut rng);
            (z, u, v)
        })
        .collect()
}

pub fn convexity_slack_on<T: Real>(
    f: &FinslerMetric<T>,
    triples: &[Triple<T>],
) -> Result<ConvexitySlack<T>> {
    let mut out = ConvexitySlack {
        worst: T::max_value().unwrap(),
        witness: None,
        triples: triples.len(),
        seed: 0,
    };
    for (z, u, v) in triples {
        let w: Vec<Complex<T>> = u.iter().zip(v).map(|(a, b)| a + b).collect();
        let (nu, nv, nw) = (f.norm(z, u)?, f.norm(z, v)?, f.norm(z, &w)?);
        let denom = nu + nv;
        if denom <= T::zero() {
            continue;
        }
        let slack = (denom - nw) / denom;
        if slack < out.worst {
            out.worst = slack;
            out.witness = Some((*z, u.clone(), v.clone()));
        }
    }
    Ok(out)
}

/// Triangle-inequality slack on `n` seeded triples over `samples`.
pub fn convexity_check<T: Real>(
    f: &FinslerMetric<T>,
    samples: &[BasePoint<T>],
    n: usize,
    seed: u64,
) -> Result<ConvexitySlack<T>> {
    if samples.is_empty() {
        return Err(Error::InvalidInput(
            "convexity check needs base samples".into(),
        ));
    }
    let mut out = convexity_slack_on(f, &sample_triples(samples, f.rank(), n, seed))?;
    out.seed = seed;
    Ok(out)
}

/// `max |G(z, λu) − |λ|²G(z, u)| / G(z, u)` over `λ ∈ {2, i, 1+i}`.
pub fn homogeneity_defect<T: Real>(
    f: &FinslerMetric<T>,
    at: &BasePoint<T>,
    u: &[Complex<T>],
) -> Result<T> {
    let base = f.value(at, u)?;
    let mut worst = T::zero();
    for lambda in [
        Complex::new(lit::<T>(2.0), T::zero()),
        Complex::new(T::zero(), T::one()),
        Complex::new(T::one(), T::one()),
    ] {
        let v: Vec<Complex<T>> = u.iter().map(|x| x * lambda).collect();
        let d = (f.value(at, &v)? - lambda.norm_sqr() * base).abs() / base;
        worst = worst.max(d);
    }
    Ok(worst)
}

/// Extremes of the Kobayashi curvature `θ` of a Finsler metric on a bundle
/// `B`, from the potential `log G(z, e(w))` on `P(B)`: `θ` is the negative of
/// the horizontal Schur complement, so `min > 0` certifies Kobayashi positivity.
pub fn finsler_kobayashi_positive<T: Real>(
    f: &FinslerMetric<T>,
    atlas: &BaseChartAtlas<T>,
    grid: &FiberSampleGrid,
    omega: &BaseHermitianForm<T>,
    stencil: &ComplexHessianStencil<T>,
) -> Result<FiberExtremes<T>> {
    let pot =
        o1_potential(PotentialSource::Finsler(f.clone()), f.rank() - 1)?.with_stencil(*stencil);
    fiber_extremes(&pot, atlas, grid, omega, |s, z| Ok(-s.kobayashi_at(z)?))
}

/// Same, for a Hermitian metric (exact Hessians).
pub fn hermitian_kobayashi_positive<T: Real>(
    h: &HermitianMetric<T>,
    atlas: &BaseChartAtlas<T>,
    grid: &FiberSampleGrid,
    omega: &BaseHermitianForm<T>,
) -> Result<FiberExtremes<T>> {
    let pot = o1_potential(PotentialSource::Hermitian(h.clone()), h.rank() - 1)?;
    fiber_extremes(&pot, atlas, grid, omega, |s, z| Ok(-s.kobayashi_at(z)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::fubini_study_line;
    use crate::numerics::linalg::{diag, max_abs};
    use proptest::prelude::*;

    fn c(x: f64, y: f64) -> Complex<f64> {
        Complex::new(x, y)
    }

    fn pt(x: f64, y: f64) -> BasePoint<f64> {
        BasePoint::origin(c(x, y))
    }

    fn constant(m: CMatrix<f64>) -> HermitianMetric<f64> {
        let r = m.nrows();
        let (a, b) = (m.clone(), m);
        HermitianMetric::from_fn(
            r,
            vec![0; r],
            move |_| Ok(a.clone()),
            move |_| Ok(b.clone()),
        )
        .unwrap()
    }

    fn sample_metric() -> HermitianMetric<f64> {
        let f = |z: Complex<f64>| {
            let s = 1.0 + z.norm_sqr();
            let o = c(0.4, 0.3);
            Ok(CMatrix::<f64>::from_row_slice(
                3,
                3,
                &[
                    c(2.0 * s, 0.0),
                    o,
                    c(0.0, 0.1),
                    o.conj(),
                    c(1.5, 0.0),
                    c(0.2, 0.0),
                    c(0.0, -0.1),
                    c(0.2, 0.0),
                    c(s * s, 0.0),
                ],
            ))
        };
        HermitianMetric::from_fn(3, vec![0, 0, 0], f, f).unwrap()
    }

    #[test]
    fn first_root_is_the_hermitian_metric() {
        let h = sample_metric();
        let f = kth_root_of_symmetric_power(&h, 1).unwrap();
        let g = FinslerMetric::new(HermitianFinsler::new(h));
        let u = [c(0.3, -0.2), c(1.0, 0.5), c(-0.7, 0.1)];
        let p = pt(0.2, 0.4);
        assert!((f.value(&p, &u).unwrap() - g.value(&p, &u).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn flat_square_root() {
        let f = kth_root_of_symmetric_power(&HermitianMetric::flat(2).unwrap(), 2).unwrap();
        let u = [c(1.0, 0.0), c(1.0, 0.0)];
        assert!((f.value(&pt(0.0, 0.0), &u).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn analytic_gradients_match_finite_differences() {
        struct Opaque(FinslerMetric<f64>);
        impl FiberFunctional<f64> for Opaque {
            fn rank(&self) -> usize {
                self.0.rank()
            }
            fn value(&self, at: &BasePoint<f64>, u: &[Complex<f64>]) -> Result<f64> {
                self.0.value(at, u)
            }
            fn provenance(&self) -> Provenance {
                self.0.provenance()
            }
        }
        let h = sample_metric();
        let u = [c(0.3, -0.2), c(1.0, 0.5), c(-0.7, 0.1)];
        let p = pt(0.1, -0.3);
        for f in [
            kth_root_of_symmetric_power(&h, 3).unwrap(),
            FinslerMetric::new(HermitianFinsler::new(h.clone())),
            perturb_with_hermitian(&kth_root_of_symmetric_power(&h, 2).unwrap(), &h, 0.1).unwrap(),
        ] {
            let a = f.gradient(&p, &u).unwrap();
            let b = Opaque(f.clone()).gradient(&p, &u).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).norm() < 1e-7, "{x} {y}");
            }
        }
    }

    #[test]
    fn dual_of_hermitian_is_inverse() {
        let h = sample_metric();
        let dual = dual_finsler(
            &FinslerMetric::new(HermitianFinsler::new(h.clone())),
            DualOptions::default(),
        );
        let hd = h.dual();
        let p = pt(0.5, 0.5);
        for xi in [
            [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            [c(0.3, 0.4), c(-1.0, 0.2), c(0.5, 0.5)],
        ] {
            let a = dual.value(&p, &xi).unwrap();
            let b = quad_form(&hd.matrix(&p).unwrap(), &xi);
            assert!((a - b).abs() < 1e-6 * b, "{a} {b}");
        }
        let d41 = dual_finsler(
            &FinslerMetric::new(HermitianFinsler::new(constant(diag(&[4.0, 1.0])))),
            DualOptions::default(),
        );
        assert!((d41.value(&p, &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap() - 0.25).abs() < 1e-10);
        assert!((d41.value(&p, &[c(0.0, 0.0), c(1.0, 0.0)]).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn biduality_of_convex_finsler_metric() {
        let f = kth_root_of_symmetric_power(&sample_metric(), 2).unwrap();
        let f = perturb_with_hermitian(&f, &constant(diag(&[1.0, 0.5, 2.0])), 0.2).unwrap();
        let dd = dual_finsler(
            &dual_finsler(&f, DualOptions::default()),
            DualOptions::default(),
        );
        let p = pt(0.3, 0.0);
        for u in [
            [c(1.0, 0.0), c(0.2, 0.0), c(0.0, 0.3)],
            [c(-0.4, 0.4), c(1.0, -0.2), c(0.5, 0.1)],
        ] {
            let a = f.value(&p, &u).unwrap();
            let b = dd.value(&p, &u).unwrap();
            assert!((a - b).abs() < 1e-4 * a, "{a} {b}");
        }
    }

    #[test]
    fn duality_reverses_order() {
        let small = FinslerMetric::new(HermitianFinsler::new(constant(diag(&[1.0, 2.0]))));
        let large = perturb_with_hermitian(&small, &constant(diag(&[1.0, 0.3])), 0.5).unwrap();
        let (ds, dl) = (
            dual_finsler(&small, DualOptions::default()),
            dual_finsler(&large, DualOptions::default()),
        );
        let p = pt(0.0, 0.0);
        for xi in [[c(1.0, 0.0), c(1.0, 0.0)], [c(0.2, 0.7), c(-0.3, 0.1)]] {
            assert!(ds.value(&p, &xi).unwrap() >= dl.value(&p, &xi).unwrap());
        }
    }

    #[test]
    fn hermitian_triangle_inequality() {
        let f = FinslerMetric::new(HermitianFinsler::new(sample_metric()));
        let samples = [pt(0.0, 0.0), pt(0.5, 0.5)];
        let s = convexity_check(&f, &samples, 500, 7).unwrap();
        assert!(s.worst >= -1e-12);
        // parallel vectors give equality
        let u = [c(0.3, 0.1), c(1.0, 0.0), c(0.0, 0.5)];
        let v: Vec<Complex<f64>> = u.iter().map(|x| x * 2.5).collect();
        let eq = convexity_slack_on(&f, &[(samples[0], u.to_vec(), v)]).unwrap();
        assert!(eq.worst.abs() < 1e-14);
    }

    #[test]
    fn twisting_preserves_slacks() {
        let f = kth_root_of_symmetric_power(&sample_metric(), 3).unwrap();
        let l = fubini_study_line::<f64>(5);
        let t = twist_finsler(&f, &l, 2);
        let samples = [pt(0.0, 0.0), pt(0.7, -0.2), pt(-0.1, 0.9)];
        let triples = sample_triples(&samples, 3, 200, 3);
        let a = convexity_slack_on(&f, &triples).unwrap();
        let b = convexity_slack_on(&t, &triples).unwrap();
        assert!((a.worst - b.worst).abs() < 1e-12);
        assert!(a.worst >= -1e-8);
        let id = twist_finsler(&f, &l, 0);
        let back = twist_finsler(&twist_finsler(&f, &l, 3), &l, -3);
        let u = [c(0.3, 0.1), c(1.0, 0.0), c(0.0, 0.5)];
        let p = samples[1];
        assert_eq!(id.value(&p, &u).unwrap(), f.value(&p, &u).unwrap());
        assert!((back.value(&p, &u).unwrap() / f.value(&p, &u).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn perturbation_adds_quadratic_term() {
        let f = kth_root_of_symmetric_power(&sample_metric(), 2).unwrap();
        let h0 = constant(diag(&[1.0, 2.0, 3.0]));
        let zero = perturb_with_hermitian(&f, &h0, 0.0).unwrap();
        let pe = perturb_with_hermitian(&f, &h0, 0.1).unwrap();
        let p = pt(0.2, 0.2);
        let u = [c(0.3, 0.1), c(1.0, 0.0), c(0.0, 0.5)];
        assert_eq!(zero.value(&p, &u).unwrap(), f.value(&p, &u).unwrap());
        assert!(homogeneity_defect(&pe, &p, &u).unwrap() < 1e-12);
        assert!(perturb_with_hermitian(&f, &h0, -1.0).is_err());
        assert!((default_perturbation(&h0, &[p]).unwrap() - 1e-3).abs() < 1e-15);
        // fiber Hessian grows by at least ε·λ_min(H0) in the direction of u
        let pot_f =
            crate::projective::o1_potential(PotentialSource::Finsler(f.clone()), 2).unwrap();
        let pot_e =
            crate::projective::o1_potential(PotentialSource::Finsler(pe.clone()), 2).unwrap();
        let fp = crate::projective::FiberPoint::new(p, vec![c(0.2, 0.0), c(0.1, 0.1), c(1.0, 0.0)]);
        let w = fp.chart_coordinates(2).unwrap();
        let raw = |pot: &crate::projective::ProjectivizedPotential<f64>| {
            // Hessian of G itself (not its log) in the fiber variables
            let g = |u: &[Complex<f64>]| -> Result<f64> { pot.source_value(&p, u) };
            crate::numerics::complex_hessian(&g, &w, &ComplexHessianStencil::default()).unwrap()
        };
        let diff = raw(&pot_e) - raw(&pot_f);
        assert!(hermitian_eigenvalues(&diff)[0] >= 0.1 * 1.0 - 1e-6);
    }

    #[test]
    fn kobayashi_of_hermitian_positive_bundle() {
        let e = HermitianMetric::<f64>::direct_sum(&[9, 8, 7]).unwrap();
        let atlas = BaseChartAtlas::polar(2, 3).unwrap();
        let omega = BaseHermitianForm::fubini_study(1.0).unwrap();
        let grid = FiberSampleGrid {
            n_theta: 3,
            n_rho: 2,
        };
        let ext = hermitian_kobayashi_positive(&e, &atlas, &grid, &omega).unwrap();
        assert!(
            (ext.min - 7.0).abs() < 1e-8 && (ext.max - 9.0).abs() < 1e-8,
            "{ext:?}"
        );
        let f = FinslerMetric::new(HermitianFinsler::new(e));
        let ext = finsler_kobayashi_positive(
            &f,
            &atlas,
            &grid,
            &omega,
            &ComplexHessianStencil::default(),
        )
        .unwrap();
        assert!(ext.min > 0.0 && (ext.min - 7.0).abs() < 1e-4, "{ext:?}");
        let flat = FinslerMetric::new(HermitianFinsler::new(HermitianMetric::flat(2).unwrap()));
        let ext = finsler_kobayashi_positive(
            &flat,
            &atlas,
            &grid,
            &omega,
            &ComplexHessianStencil::default(),
        )
        .unwrap();
        assert!(ext.min.abs() < 1e-8 && ext.max.abs() < 1e-8);
    }

    #[test]
    fn provenance_is_tracked() {
        let f = kth_root_of_symmetric_power(&sample_metric(), 2).unwrap();
        let t = twist_finsler(&f, &fubini_study_line(1), 1);
        let d = dual_finsler(&t, DualOptions::default());
        assert_eq!(
            d.provenance(),
            Provenance::Dual {
                of: Box::new(Provenance::Twisted {
                    power: 1,
                    of: Box::new(Provenance::KthRoot { k: 2 })
                })
            }
        );
        let _ = max_abs(&diag(&[1.0]));
    }

    proptest! {
        #[test]
        fn homogeneity_of_kth_roots(re in proptest::collection::vec(-1.0f64..1.0, 3), im in proptest::collection::vec(-1.0f64..1.0, 3), k in 1usize..5, x in -0.9f64..0.9) {
            let u: Vec<Complex<f64>> = re.iter().zip(&im).map(|(a, b)| c(*a, *b)).collect();
            prop_assume!(u.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3);
            let f = kth_root_of_symmetric_power(&sample_metric(), k).unwrap();
            prop_assert!(homogeneity_defect(&f, &pt(x, 0.1), &u).unwrap() < 1e-8);
        }

        #[test]
        fn kth_root_of_hermitian_power_is_convex(seed in 0u64..1000, k in 1usize..5) {
            let f = kth_root_of_symmetric_power(&sample_metric(), k).unwrap();
            let s = convexity_check(&f, &[pt(0.0, 0.0), pt(0.3, 0.6)], 50, seed).unwrap();
            prop_assert!(s.worst >= -1e-8);
        }
    }
}
