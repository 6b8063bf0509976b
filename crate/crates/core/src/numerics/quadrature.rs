use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{is_finite, lit, Complex, Real};

/// Rule over `ℂ^{fiber_dim}`: per complex coordinate, a trapezoid rule in the
/// angle and Gauss–Legendre in `t` after `ρ = t/(1-t)`, composed with the
/// nested scaling `w_j = s_j (1 + Σ_{l<j} |w_l|²)^{1/2}` that splits
/// `1 + |w|²` into one-dimensional factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiberQuadratureRule {
    pub n_theta: usize,
    pub n_rho: usize,
    pub fiber_dim: usize,
}

impl FiberQuadratureRule {
    pub const MIN_NODES: usize = 8;

    pub fn new(n_theta: usize, n_rho: usize, fiber_dim: usize) -> Result<Self> {
        if n_theta < Self::MIN_NODES || n_rho < Self::MIN_NODES {
            return Err(Error::InvalidInput(format!(
                "quadrature needs n_theta, n_rho >= {}, got {n_theta}, {n_rho}",
                Self::MIN_NODES
            )));
        }
        Ok(Self {
            n_theta,
            n_rho,
            fiber_dim,
        })
    }

    /// Default resolution for a bundle of the given rank.
    pub fn default_for_rank(rank: usize) -> Self {
        let n = if rank <= 2 { 32 } else { 24 };
        Self {
            n_theta: n,
            n_rho: n,
            fiber_dim: rank.saturating_sub(1),
        }
    }

    pub fn node_count(&self) -> usize {
        (self.n_theta * self.n_rho).pow(self.fiber_dim as u32)
    }

    /// Same rule with both counts doubled.
    pub fn refined(&self) -> Self {
        Self {
            n_theta: 2 * self.n_theta,
            n_rho: 2 * self.n_rho,
            fiber_dim: self.fiber_dim,
        }
    }

    pub fn nodes<T: Real>(&self) -> FiberNodes<T> {
        let d = self.fiber_dim;
        let mut points = Vec::with_capacity(self.node_count() * d);
        let mut weights = Vec::with_capacity(self.node_count());
        for_each_node(self, |w: &[Complex<T>], wt: T| {
            points.extend_from_slice(w);
            weights.push(wt);
            Ok::<(), ()>(())
        })
        .expect("infallible");
        FiberNodes {
            dim: d,
            points,
            weights,
        }
    }
}

/// Materialized nodes of a [`FiberQuadratureRule`], in a fixed order.
#[derive(Debug, Clone)]
pub struct FiberNodes<T> {
    pub dim: usize,
    points: Vec<Complex<T>>,
    pub weights: Vec<T>,
}

impl<T: Real> FiberNodes<T> {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[Complex<T>] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[Complex<T>], T)> + '_ {
        (0..self.len()).map(move |i| (self.point(i), self.weights[i]))
    }
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub(crate) fn gauss_legendre_unit(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pn1 = if n <= 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push(((1.0 - x) / 2.0, w / 2.0));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

/// Nodes for one complex coordinate, with the Lebesgue weight `ρ dρ dθ`.
pub(crate) fn planar_nodes<T: Real>(n_theta: usize, n_rho: usize) -> Vec<(Complex<T>, T)> {
    let gl = gauss_legendre_unit(n_rho);
    let dtheta = 2.0 * std::f64::consts::PI / n_theta as f64;
    let mut out = Vec::with_capacity(n_theta * n_rho);
    for &(t, wt) in &gl {
        let rho = t / (1.0 - t);
        let radial = wt * rho / ((1.0 - t) * (1.0 - t));
        for j in 0..n_theta {
            let (s, c) = (j as f64 * dtheta).sin_cos();
            out.push((
                Complex::new(lit(rho * c), lit(rho * s)),
                lit(radial * dtheta),
            ));
        }
    }
    out
}

/// Index state over the tensor of planar rules, with running prefixes so that
/// advancing coordinate `pos` only recomputes coordinates `pos..`.
struct Odometer<T: Real> {
    one_dim: Vec<(Complex<T>, T)>,
    idx: Vec<usize>,
    w: Vec<Complex<T>>,
    // weight[i], scale[i]: product of weights and 1 + Σ|w_l|² over l < i
    weight: Vec<T>,
    scale: Vec<T>,
}

impl<T: Real> Odometer<T> {
    fn new(rule: &FiberQuadratureRule, first: usize) -> Self {
        let d = rule.fiber_dim;
        let mut idx = vec![0usize; d];
        if d > 0 {
            idx[0] = first;
        }
        let mut o = Self {
            one_dim: planar_nodes::<T>(rule.n_theta, rule.n_rho),
            idx,
            w: vec![Complex::new(T::zero(), T::zero()); d],
            weight: vec![T::one(); d + 1],
            scale: vec![T::one(); d + 1],
        };
        o.fill(0);
        o
    }

    fn fill(&mut self, from: usize) {
        for i in from..self.idx.len() {
            let (s, wt) = self.one_dim[self.idx[i]];
            let a = self.scale[i];
            self.w[i] = s * a.sqrt();
            self.weight[i + 1] = self.weight[i] * wt * a;
            self.scale[i + 1] = a + self.w[i].norm_sqr();
        }
    }

    fn node(&self) -> (&[Complex<T>], T) {
        (&self.w, self.weight[self.idx.len()])
    }

    /// Steps coordinates `floor..` (last fastest); false once they wrap.
    fn advance(&mut self, floor: usize) -> bool {
        let m = self.one_dim.len();
        let mut pos = self.idx.len();
        loop {
            if pos == floor {
                return false;
            }
            pos -= 1;
            self.idx[pos] += 1;
            if self.idx[pos] < m {
                break;
            }
            self.idx[pos] = 0;
        }
        self.fill(pos);
        true
    }
}

/// Visits every node of the rule in a fixed order (last coordinate fastest)
/// without materializing the node list.
pub(crate) fn for_each_node<T: Real, E>(
    rule: &FiberQuadratureRule,
    mut visit: impl FnMut(&[Complex<T>], T) -> std::result::Result<(), E>,
) -> std::result::Result<(), E> {
    let mut o = Odometer::<T>::new(rule, 0);
    loop {
        let (w, wt) = o.node();
        visit(w, wt)?;
        if !o.advance(0) {
            return Ok(());
        }
    }
}

/// Parallel accumulation over the rule. Nodes are split into slabs by the
/// index of the first coordinate; each slab is summed in odometer order and
/// slabs are merged in index order, so the result does not depend on the
/// number of threads.
pub(crate) fn accumulate_slabs<T, A, E>(
    rule: &FiberQuadratureRule,
    init: impl Fn() -> A + Sync,
    visit: impl Fn(&mut A, &[Complex<T>], T) -> std::result::Result<(), E> + Sync,
    merge: impl Fn(&mut A, A),
) -> std::result::Result<A, E>
where
    T: Real,
    A: Send,
    E: Send,
{
    use rayon::prelude::*;
    if rule.fiber_dim == 0 {
        let mut acc = init();
        visit(&mut acc, &[], T::one())?;
        return Ok(acc);
    }
    let m = rule.n_theta * rule.n_rho;
    let slabs: Vec<std::result::Result<A, E>> = (0..m)
        .into_par_iter()
        .map(|first| {
            let mut acc = init();
            let mut o = Odometer::<T>::new(rule, first);
            loop {
                let (w, wt) = o.node();
                visit(&mut acc, w, wt)?;
                if !o.advance(1) {
                    return Ok(acc);
                }
            }
        })
        .collect();
    let mut out = init();
    for s in slabs {
        merge(&mut out, s?);
    }
    Ok(out)
}

/// `∫_{ℂ^{fiber_dim}} f dλ` by the rule; nodes are summed in a fixed order.
pub fn fiber_integrate<T: Real, F>(integrand: F, rule: &FiberQuadratureRule) -> Result<T>
where
    F: Fn(&[Complex<T>]) -> Result<T>,
{
    let mut acc = T::zero();
    for_each_node(rule, |w: &[Complex<T>], wt: T| {
        let v = integrand(w)?;
        if !is_finite(v) {
            return Err(Error::domain("non-finite integrand at quadrature node", w));
        }
        acc += wt * v;
        Ok(())
    })?;
    Ok(acc)
}

pub fn fiber_integrate_complex<T: Real, F>(
    integrand: F,
    rule: &FiberQuadratureRule,
) -> Result<Complex<T>>
where
    F: Fn(&[Complex<T>]) -> Result<Complex<T>>,
{
    let mut acc = Complex::new(T::zero(), T::zero());
    for_each_node(rule, |w: &[Complex<T>], wt: T| {
        let v = integrand(w)?;
        if !is_finite(v.re) || !is_finite(v.im) {
            return Err(Error::domain("non-finite integrand at quadrature node", w));
        }
        acc += v * wt;
        Ok(())
    })?;
    Ok(acc)
}
