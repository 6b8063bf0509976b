//! Hypothesis and conclusion checks for the four positivity criteria on a
//! bundle `E` with a Hermitian metric `H_E`.
//!
//! The `O(1)` metrics come from Hermitian metrics on an auxiliary bundle `W`:
//! `h` always lives on `P(E*)` (`W = E*`, metric `H_E*`); `g` lives on `P(E*)`
//! for criteria 1 and 3 and on `P(E⊗det E*)` for criteria 2 and 4. All
//! curvature values are divided by the coefficient of `Ω`.

use std::fmt;

use num_traits::Num;
use serde::{Deserialize, Serialize};

use crate::base::{line_curvature, BaseChartAtlas, BaseHermitianForm, BasePoint};
use crate::bundle::{chern_curvature, det_metric, griffiths_extremes_of, HermitianMetric};
use crate::direct_image::{assemble_det_metric, DetImageMetric, DirectImage};
use crate::error::{Error, Result};
use crate::finsler::{
    convexity_check, default_perturbation, dual_finsler, finsler_kobayashi_positive,
    kth_root_finsler, perturb_with_hermitian, DualOptions,
};
use crate::numerics::{ComplexHessianStencil, FiberQuadratureRule};
use crate::projective::{
    fiber_extremes, o1_potential, FiberExtremes, FiberPoint, FiberSampleGrid, PotentialSource,
    ProjectivizedPotential,
};
use crate::scalar::{lit, to_f64, Real};

/// Which of the four criteria is checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Theorem {
    One,
    Two,
    Three,
    Four,
}

impl Theorem {
    pub const ALL: [Theorem; 4] = [Theorem::One, Theorem::Two, Theorem::Three, Theorem::Four];

    pub fn id(self) -> u8 {
        match self {
            Theorem::One => 1,
            Theorem::Two => 2,
            Theorem::Three => 3,
            Theorem::Four => 4,
        }
    }

    pub fn from_id(id: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.id() == id)
    }

    /// `g` lives on `P(E⊗det E*)`.
    pub fn uses_twist(self) -> bool {
        matches!(self, Theorem::Two | Theorem::Four)
    }

    /// The bound involves `(r+1)θ(g)` and `Θ(det G)`.
    pub fn uses_determinant(self) -> bool {
        matches!(self, Theorem::Three | Theorem::Four)
    }
}

impl TryFrom<u8> for Theorem {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        Theorem::from_id(v).ok_or_else(|| format!("no criterion {v}; expected 1, 2, 3 or 4"))
    }
}

impl From<Theorem> for u8 {
    fn from(t: Theorem) -> u8 {
        t.id()
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

/// Outcome of a check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    /// Worst of two outcomes: fail beats inconclusive beats pass.
    pub fn combine(self, other: Status) -> Status {
        match (self, other) {
            (Status::Fail, _) | (_, Status::Fail) => Status::Fail,
            (Status::Inconclusive, _) | (_, Status::Inconclusive) => Status::Inconclusive,
            _ => Status::Pass,
        }
    }
}

/// Slack allowed below 1 in `min (−θ(h))/ω ≥ 1`.
pub const LOWER_BOUND_SLACK: f64 = 1e-6;

/// `ε = (r − M) / (5(r + M))`.
pub fn epsilon<N: Num + Copy>(r: N, m: N) -> N {
    let two = N::one() + N::one();
    let five = two + two + N::one();
    (r - m) / (five * (r + m))
}

/// A bundle with its metric, base form and sampling plan.
#[derive(Clone, Debug)]
pub struct Scenario<T: Real> {
    pub name: String,
    pub metric: HermitianMetric<T>,
    pub omega: BaseHermitianForm<T>,
    pub stencil: ComplexHessianStencil<T>,
    /// Base samples for hypothesis extremes.
    pub atlas: BaseChartAtlas<T>,
    pub fiber_grid: FiberSampleGrid,
    /// Base samples for direct-image curvatures.
    pub conclusion_atlas: BaseChartAtlas<T>,
    pub rule: FiberQuadratureRule,
    /// Base and fiber samples for the dual Finsler metric.
    pub finsler_atlas: BaseChartAtlas<T>,
    pub finsler_grid: FiberSampleGrid,
    pub finsler_stencil: ComplexHessianStencil<T>,
    pub dual: DualOptions,
    pub convexity_triples: usize,
    pub seed: u64,
    /// Width of the band around `M = r` reported as inconclusive.
    pub tolerance: f64,
}

impl<T: Real> Scenario<T> {
    /// `L^{d_1}⊕…⊕L^{d_r}` with `Ω = omega_multiple·Θ_FS` and default sampling.
    pub fn direct_sum(degrees: &[i64], omega_multiple: f64) -> Result<Self> {
        let metric = HermitianMetric::direct_sum(degrees)?;
        let name = format!("direct-sum{degrees:?}");
        Self::new(
            name,
            metric,
            BaseHermitianForm::fubini_study(omega_multiple)?,
        )
    }

    pub fn new(
        name: impl Into<String>,
        metric: HermitianMetric<T>,
        omega: BaseHermitianForm<T>,
    ) -> Result<Self> {
        let r = metric.rank();
        if r < 2 {
            return Err(Error::InvalidInput("criteria need rank at least 2".into()));
        }
        Ok(Self {
            name: name.into(),
            metric,
            omega,
            stencil: ComplexHessianStencil::default(),
            atlas: BaseChartAtlas::standard(),
            fiber_grid: FiberSampleGrid::default(),
            conclusion_atlas: BaseChartAtlas::polar(3, 6)?,
            rule: FiberQuadratureRule::new(16, 16, r - 1)?,
            finsler_atlas: BaseChartAtlas::polar(2, 4)?,
            finsler_grid: FiberSampleGrid {
                n_theta: 3,
                n_rho: 1,
            },
            finsler_stencil: ComplexHessianStencil::default().with_step(lit(1e-2)),
            dual: DualOptions::default(),
            convexity_triples: 10_000,
            seed: 7,
            tolerance: 1e-3,
        })
    }

    pub fn rank(&self) -> usize {
        self.metric.rank()
    }

    /// `E⊗det E*` with metric `H_E ⊗ det(H_E)^{-1}`.
    pub fn twisted_metric(&self) -> HermitianMetric<T> {
        self.metric.twist_by_line(&det_metric(&self.metric), -1)
    }

    /// Metric on `W` for `g`.
    pub fn g_source(&self, theorem: Theorem) -> HermitianMetric<T> {
        if theorem.uses_twist() {
            self.twisted_metric()
        } else {
            self.metric.dual()
        }
    }

    pub fn h_potential(&self) -> Result<ProjectivizedPotential<T>> {
        Ok(o1_potential(
            PotentialSource::Hermitian(self.metric.dual()),
            self.rank() - 1,
        )?
        .with_stencil(self.stencil))
    }

    pub fn g_potential(&self, theorem: Theorem) -> Result<ProjectivizedPotential<T>> {
        Ok(o1_potential(
            PotentialSource::Hermitian(self.g_source(theorem)),
            self.rank() - 1,
        )?
        .with_stencil(self.stencil))
    }

    /// L² metric on `det E` from `h`.
    pub fn det_image(&self) -> Result<DetImageMetric<T>> {
        assemble_det_metric(&self.h_potential()?, &self.rule)
    }
}

/// A point of `P(W)` in printable form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub chart: String,
    pub z: [f64; 2],
    pub zeta: Vec<[f64; 2]>,
}

impl<T: Real> From<&FiberPoint<T>> for Witness {
    fn from(p: &FiberPoint<T>) -> Self {
        Witness {
            chart: format!("{:?}", p.base.chart).to_lowercase(),
            z: [to_f64(p.base.z.re), to_f64(p.base.z.im)],
            zeta: p
                .zeta
                .iter()
                .map(|c| [to_f64(c.re), to_f64(c.im)])
                .collect(),
        }
    }
}

impl<T: Real> From<&BasePoint<T>> for Witness {
    fn from(p: &BasePoint<T>) -> Self {
        Witness {
            chart: format!("{:?}", p.chart).to_lowercase(),
            z: [to_f64(p.z.re), to_f64(p.z.im)],
            zeta: Vec::new(),
        }
    }
}

/// Sample counts behind an extreme.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub base_samples: usize,
    pub fiber_samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub theorem: Theorem,
    pub rank: usize,
    /// Tightest `M` over samples.
    pub m_star: f64,
    pub m_argmax: Witness,
    /// `M` used for `ε`: `max(1, m_star)`.
    pub m_chosen: f64,
    /// `min (−θ(h)) / Ω`; must be at least 1.
    pub lower_bound_min: f64,
    pub lower_bound_argmin: Witness,
    pub lower_bound_holds: bool,
    pub m_valid: bool,
    pub epsilon: Option<f64>,
    pub status: Status,
    /// Set when the positivity preconditions fail.
    pub precondition_failure: Option<String>,
    pub resolution: Resolution,
    pub tolerance: f64,
}

fn extremes_of_g<T: Real>(scenario: &Scenario<T>, theorem: Theorem) -> Result<FiberExtremes<T>> {
    let pot = scenario.g_potential(theorem)?;
    let r = lit::<T>(scenario.rank() as f64);
    if theorem.uses_determinant() {
        let det = det_metric(&scenario.g_source(theorem));
        let stencil = scenario.stencil;
        let mut cached: Option<(BasePoint<T>, T)> = None;
        fiber_extremes(
            &pot,
            &scenario.atlas,
            &scenario.fiber_grid,
            &scenario.omega,
            |s, z| {
                let kappa = match cached {
                    Some((p, k)) if p == *s.base() => k,
                    _ => {
                        let k = line_curvature(&det, s.base(), &stencil)?;
                        cached = Some((*s.base(), k));
                        k
                    }
                };
                Ok((r + T::one()) * s.kobayashi_at(z)? + kappa)
            },
        )
    } else {
        fiber_extremes(
            &pot,
            &scenario.atlas,
            &scenario.fiber_grid,
            &scenario.omega,
            |s, z| s.kobayashi_at(z),
        )
    }
}

/// Positivity of `Θ(h)` in all directions: the smallest eigenvalue of the
/// full Hessian over samples.
fn h_positivity<T: Real>(scenario: &Scenario<T>) -> Result<FiberExtremes<T>> {
    let pot = scenario.h_potential()?;
    fiber_extremes(
        &pot,
        &scenario.atlas,
        &scenario.fiber_grid,
        &scenario.omega,
        |s, z| s.min_full_eigenvalue(z),
    )
}

/// Checks on `h` shared by all four criteria: positivity of `Θ(h)` and the
/// lower bound `q*Ω ≤ −θ(h)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HSide {
    pub positivity_min: f64,
    pub positivity_argmin: Witness,
    pub lower_bound_min: f64,
    pub lower_bound_argmin: Witness,
}

pub fn check_h_side<T: Real>(scenario: &Scenario<T>) -> Result<HSide> {
    let pos = h_positivity(scenario)?;
    let lower = curvature_band(scenario)?;
    Ok(HSide {
        positivity_min: to_f64(pos.min),
        positivity_argmin: Witness::from(&pos.argmin),
        lower_bound_min: to_f64(lower.min),
        lower_bound_argmin: Witness::from(&lower.argmin),
    })
}

/// Computes `m_star` and the lower bound `q*Ω ≤ −θ(h)`.
pub fn check_hypotheses<T: Real>(
    theorem: Theorem,
    scenario: &Scenario<T>,
) -> Result<HypothesisReport> {
    check_hypotheses_with(theorem, scenario, &check_h_side(scenario)?)
}

/// Same, reusing the `h` checks.
pub fn check_hypotheses_with<T: Real>(
    theorem: Theorem,
    scenario: &Scenario<T>,
    h: &HSide,
) -> Result<HypothesisReport> {
    let r = scenario.rank() as f64;
    let tol = scenario.tolerance;
    let resolution = Resolution {
        base_samples: scenario.atlas.samples().len(),
        fiber_samples: scenario.fiber_grid.points::<T>(scenario.rank()).len(),
    };
    let lower_min = h.lower_bound_min;
    let lower_holds = lower_min >= 1.0 - LOWER_BOUND_SLACK;
    let precondition = if !(h.positivity_min > 1e-9) {
        Some(format!(
            "curvature of h is not positive: smallest Hessian eigenvalue / Ω = {:.3e} at {:?}",
            h.positivity_min, h.positivity_argmin
        ))
    } else {
        None
    };
    let g = extremes_of_g(scenario, theorem)?;
    let m_star = to_f64(g.max);
    let m_chosen = m_star.max(1.0);
    let m_valid = precondition.is_none() && lower_holds && m_star < r;
    let status = if precondition.is_some() || !lower_holds {
        Status::Fail
    } else if (m_star - r).abs() <= tol {
        Status::Inconclusive
    } else if m_star < r {
        Status::Pass
    } else {
        Status::Fail
    };
    Ok(HypothesisReport {
        theorem,
        rank: scenario.rank(),
        m_star,
        m_argmax: Witness::from(&g.argmax),
        m_chosen,
        lower_bound_min: lower_min,
        lower_bound_argmin: h.lower_bound_argmin.clone(),
        lower_bound_holds: lower_holds,
        m_valid,
        epsilon: (status == Status::Pass).then(|| epsilon(r, m_chosen)),
        status,
        precondition_failure: precondition,
        resolution,
        tolerance: tol,
    })
}

/// Griffiths extremes of one twisted direct image.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KScanEntry {
    pub k: usize,
    pub min: f64,
    pub max: f64,
    pub argmax: Witness,
    pub negative: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinslerPipelineReport {
    pub k: usize,
    /// Worst relative triangle-inequality slack of the k-th root.
    pub convexity_slack: f64,
    pub convexity_triples: usize,
    pub perturbation: f64,
    /// Extremes of the Kobayashi curvature `θ` of the dual metric; `min > 0`
    /// certifies positivity on samples.
    pub kobayashi_min: f64,
    pub kobayashi_max: f64,
    pub kobayashi_argmin: Witness,
    pub resolution: Resolution,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConclusionReport {
    pub theorem: Theorem,
    pub scan: Vec<KScanEntry>,
    pub k_star: Option<usize>,
    pub finsler: Option<FinslerPipelineReport>,
    pub status: Status,
    pub base_samples: usize,
    pub quadrature: FiberQuadratureRule,
}

/// Twisted direct image of power `k`: `H_k⊗(H*)ᵏ` (criteria 1, 3) or
/// `𝐇_k⊗(H*)ᵏ` (criteria 2, 4).
pub fn twisted_direct_image<T: Real>(
    scenario: &Scenario<T>,
    theorem: Theorem,
    k: usize,
    det: &DetImageMetric<T>,
) -> Result<DirectImage<T>> {
    Ok(
        DirectImage::new(scenario.g_potential(theorem)?, k, scenario.rule)
            .twisted(det.as_line().clone(), -(k as i64)),
    )
}

fn scan_entry<T: Real>(scenario: &Scenario<T>, di: &DirectImage<T>) -> Result<KScanEntry> {
    let ext = griffiths_extremes_of(scenario.conclusion_atlas.samples(), &scenario.omega, |p| {
        di.curvature(p, &scenario.stencil)
    })?;
    Ok(KScanEntry {
        k: di.k,
        min: to_f64(ext.min),
        max: to_f64(ext.max),
        argmax: Witness::from(&ext.argmax),
        negative: ext.is_negative(),
    })
}

/// Griffiths negativity of `H₁⊗H*` (criterion 3) or `𝐇₁⊗H*` (criterion 4).
pub fn check_conclusion_hermitian<T: Real>(
    theorem: Theorem,
    scenario: &Scenario<T>,
) -> Result<ConclusionReport> {
    if !theorem.uses_determinant() {
        return Err(Error::InvalidInput(format!(
            "criterion {theorem} concludes through a Finsler metric"
        )));
    }
    let det = scenario.det_image()?;
    let entry = scan_entry(scenario, &twisted_direct_image(scenario, theorem, 1, &det)?)?;
    let negative = entry.negative;
    Ok(ConclusionReport {
        theorem,
        k_star: negative.then_some(1),
        scan: vec![entry],
        finsler: None,
        status: if negative { Status::Pass } else { Status::Fail },
        base_samples: scenario.conclusion_atlas.samples().len(),
        quadrature: scenario.rule,
    })
}

/// Options of the k-scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub k_max: usize,
    /// Stop at the first negative `k` instead of scanning to `k_max`.
    pub stop_at_first: bool,
    /// Run the Finsler pipeline at `k_star`.
    pub run_finsler: bool,
}

impl ScanOptions {
    /// `k_max` of 6 for rank 3 and above, 10 for rank 2.
    pub fn for_rank(rank: usize) -> Self {
        Self {
            k_max: if rank <= 2 { 10 } else { 6 },
            stop_at_first: true,
            run_finsler: true,
        }
    }
}

/// Scans `H_k⊗(H*)ᵏ` (criterion 1) or `𝐇_k⊗(H*)ᵏ` (criterion 2) over
/// `k = 1..=k_max`, then builds the dual Finsler metric at `k_star`.
pub fn check_conclusion_finsler<T: Real>(
    theorem: Theorem,
    scenario: &Scenario<T>,
    options: ScanOptions,
) -> Result<ConclusionReport> {
    if theorem.uses_determinant() {
        return Err(Error::InvalidInput(format!(
            "criterion {theorem} concludes through a Hermitian metric"
        )));
    }
    let det = scenario.det_image()?;
    let mut scan = Vec::new();
    let mut k_star = None;
    for k in 1..=options.k_max {
        let entry = scan_entry(scenario, &twisted_direct_image(scenario, theorem, k, &det)?)?;
        let negative = entry.negative;
        scan.push(entry);
        if negative && k_star.is_none() {
            k_star = Some(k);
            if options.stop_at_first {
                break;
            }
        }
    }
    let finsler = match (k_star, options.run_finsler) {
        (Some(k), true) => Some(finsler_pipeline(theorem, scenario, k, &det)?),
        _ => None,
    };
    let status = match (&finsler, k_star) {
        (_, None) => Status::Fail,
        (Some(f), Some(_)) if f.convexity_slack < -1e-8 || !(f.kobayashi_min > 0.0) => Status::Fail,
        _ => Status::Pass,
    };
    Ok(ConclusionReport {
        theorem,
        scan,
        k_star,
        finsler,
        status,
        base_samples: scenario.conclusion_atlas.samples().len(),
        quadrature: scenario.rule,
    })
}

/// k-th root, convexity, perturbation, dual and Kobayashi curvature at `k`.
pub fn finsler_pipeline<T: Real>(
    theorem: Theorem,
    scenario: &Scenario<T>,
    k: usize,
    det: &DetImageMetric<T>,
) -> Result<FinslerPipelineReport> {
    let di = twisted_direct_image(scenario, theorem, k, det)?;
    let f = kth_root_finsler(scenario.rank(), k, move |at| di.gram(at))?;
    let samples = scenario.finsler_atlas.samples();
    let slack = convexity_check(&f, samples, scenario.convexity_triples, scenario.seed)?;
    let h0 = scenario
        .g_source(theorem)
        .dual()
        .twist_by_line(det.as_line(), -1);
    let eps = default_perturbation(&h0, samples)?;
    let fe = perturb_with_hermitian(&f, &h0, eps)?;
    let dual = dual_finsler(&fe, scenario.dual);
    let kob = finsler_kobayashi_positive(
        &dual,
        &scenario.finsler_atlas,
        &scenario.finsler_grid,
        &scenario.omega,
        &scenario.finsler_stencil,
    )?;
    Ok(FinslerPipelineReport {
        k,
        convexity_slack: to_f64(slack.worst),
        convexity_triples: slack.triples,
        perturbation: to_f64(eps),
        kobayashi_min: to_f64(kob.min),
        kobayashi_max: to_f64(kob.max),
        kobayashi_argmin: Witness::from(&kob.argmin),
        resolution: Resolution {
            base_samples: kob.base_samples,
            fiber_samples: kob.fiber_samples,
        },
    })
}

/// Band check of `√−1 Λ_ω Θ(H_δ)` and the resulting margins for criteria 2
/// and 4 with `Ω = (c−δ)ω` and `M = r − 1/2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HymReport {
    pub c: f64,
    pub delta: f64,
    pub band_min: f64,
    pub band_max: f64,
    pub within_band: bool,
    /// Sample leaving the band, if any.
    pub witness: Option<Witness>,
    pub m: f64,
    /// `−(c−δ) + r(c+δ)`.
    pub theorem2_bound: f64,
    pub theorem2_valid: bool,
    /// `−(r+1)(c−δ) + 2r(c+δ)`.
    pub theorem4_bound: f64,
    pub theorem4_valid: bool,
    /// `min (−θ(h)) / ω` on `P(E*)`.
    pub measured_h_min: f64,
    /// `max (−θ(g)) / ω` on `P(E⊗det E*)`.
    pub measured_g_max: f64,
    /// `max (−(r+1)θ(g) + Θ(det G)) / ω` on `P(E⊗det E*)`.
    pub measured_theorem4_max: f64,
    pub resolution: Resolution,
}

pub fn check_hym_scenario<T: Real>(
    h_delta: &HermitianMetric<T>,
    omega: &BaseHermitianForm<T>,
    c: f64,
    delta: f64,
    atlas: &BaseChartAtlas<T>,
    grid: &FiberSampleGrid,
    stencil: &ComplexHessianStencil<T>,
) -> Result<HymReport> {
    if !(c > 0.0) || !(delta >= 0.0) || delta >= c {
        return Err(Error::InvalidInput(format!(
            "band needs 0 <= delta < c, got c = {c}, delta = {delta}"
        )));
    }
    let r = h_delta.rank() as f64;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut witness = None;
    let slack = 1e-6 * c.max(1.0);
    for p in atlas.samples() {
        let w = to_f64(omega.coefficient(p)?);
        for e in chern_curvature(h_delta, p, stencil)?.eigenvalues()? {
            let v = to_f64(e) / w;
            lo = lo.min(v);
            hi = hi.max(v);
            if witness.is_none() && (v < c - delta - slack || v > c + delta + slack) {
                witness = Some(Witness::from(p));
            }
        }
    }
    let m = r - 0.5;
    let t2 = -(c - delta) + r * (c + delta);
    let t4 = -(r + 1.0) * (c - delta) + 2.0 * r * (c + delta);
    let scenario = Scenario::new("hym", h_delta.clone(), omega.clone())?;
    let scenario = Scenario {
        atlas: atlas.clone(),
        fiber_grid: *grid,
        stencil: *stencil,
        ..scenario
    };
    let hpot = scenario.h_potential()?;
    let h_ext = crate::projective::kobayashi_extremes(&hpot, atlas, grid, omega)?;
    let gpot = scenario.g_potential(Theorem::Two)?;
    let g_ext = crate::projective::kobayashi_extremes(&gpot, atlas, grid, omega)?;
    let t4_ext = extremes_of_g(&scenario, Theorem::Four)?;
    Ok(HymReport {
        c,
        delta,
        band_min: lo,
        band_max: hi,
        within_band: witness.is_none(),
        witness,
        m,
        theorem2_bound: t2,
        theorem2_valid: t2 <= m * (c - delta),
        theorem4_bound: t4,
        theorem4_valid: t4 <= m * (c - delta),
        measured_h_min: to_f64(h_ext.min),
        measured_g_max: to_f64(g_ext.max),
        measured_theorem4_max: to_f64(t4_ext.max),
        resolution: Resolution {
            base_samples: atlas.samples().len(),
            fiber_samples: grid.points::<T>(h_delta.rank()).len(),
        },
    })
}

/// Convenience for the Kobayashi extremes of `h` (the curvature band).
pub fn curvature_band<T: Real>(scenario: &Scenario<T>) -> Result<FiberExtremes<T>> {
    crate::projective::kobayashi_extremes(
        &scenario.h_potential()?,
        &scenario.atlas,
        &scenario.fiber_grid,
        &scenario.omega,
    )
}
