//! Running a configured scenario and emitting machine-readable reports.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bundle::griffiths_extremes;
use crate::config::{Format, ScenarioConfig};
use crate::error::{Error, Result};
use crate::verifier::{
    check_conclusion_finsler, check_conclusion_hermitian, check_h_side, check_hym_scenario,
    check_hypotheses_with, curvature_band, twisted_direct_image, ConclusionReport, HSide,
    HymReport, HypothesisReport, Resolution, Scenario, Status, Theorem, Witness, LOWER_BOUND_SLACK,
};

/// What to compute.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunPlan {
    /// Griffiths extremes of `H_E`.
    pub curvature: bool,
    /// Band of `−θ(h)`.
    pub kobayashi: bool,
    /// Curvature of the determinant image and of `H_k⊗(H*)ᵏ`.
    pub direct_image: bool,
    pub theorems: Vec<Theorem>,
    pub conclusions: bool,
    pub hym: bool,
}

impl RunPlan {
    /// Everything the configuration selects.
    pub fn from_config(cfg: &ScenarioConfig) -> Self {
        Self {
            curvature: false,
            kobayashi: false,
            direct_image: false,
            theorems: cfg.run.theorems.clone(),
            conclusions: cfg.run.conclusions,
            hym: cfg.hym.is_some(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extremes {
    pub min: f64,
    pub max: f64,
    pub argmin: Witness,
    pub argmax: Witness,
    pub resolution: Resolution,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectImageSummary {
    /// Curvature of the L² metric on `det E`, divided by `Ω`.
    pub det_curvature: Extremes,
    /// Griffiths extremes of `H_k⊗(H*)ᵏ` for `k = 1..=k_max`.
    pub twisted: Vec<(usize, Extremes)>,
    pub quadrature_nodes: usize,
}

/// One row of the csv summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub check: String,
    pub theorem: Option<u8>,
    pub status: Status,
    pub value: f64,
    /// Distance to failure; positive when passing.
    pub margin: f64,
    pub tolerance: f64,
    pub resolution: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub version: String,
    pub scenario: ScenarioConfig,
    pub plan: RunPlan,
    pub curvature: Option<Extremes>,
    pub kobayashi: Option<Extremes>,
    pub direct_image: Option<DirectImageSummary>,
    pub h_side: Option<HSide>,
    pub hypotheses: Vec<HypothesisReport>,
    pub conclusions: Vec<ConclusionReport>,
    pub hym: Option<HymReport>,
    pub checks: Vec<CheckRow>,
    pub status: Status,
    /// Wall-clock seconds per stage; the only nondeterministic part.
    pub timings: BTreeMap<String, f64>,
}

impl RunReport {
    /// Exit code: 0 all pass, 1 any fail, 2 any inconclusive.
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Inconclusive => 2,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.checks {
            w.serialize(row).expect("csv row");
        }
        String::from_utf8(w.into_inner().expect("csv buffer")).expect("utf-8 csv")
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }

    /// Writes the rendered report to `path`.
    pub fn emit(&self, format: Format, path: &Path) -> Result<()> {
        std::fs::write(path, self.render(format)).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

fn resolution_text(r: &Resolution) -> String {
    format!("base={} fiber={}", r.base_samples, r.fiber_samples)
}

fn row(
    check: &str,
    theorem: Option<Theorem>,
    status: Status,
    value: f64,
    margin: f64,
    tolerance: f64,
    resolution: String,
) -> CheckRow {
    CheckRow {
        check: check.into(),
        theorem: theorem.map(|t| t.id()),
        status,
        value,
        margin,
        tolerance,
        resolution,
    }
}

fn sign_status(margin: f64) -> Status {
    if margin > 0.0 {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn timed<R>(
    timings: &mut BTreeMap<String, f64>,
    name: String,
    f: impl FnOnce() -> Result<R>,
) -> Result<R> {
    let t = Instant::now();
    let out = f()?;
    timings.insert(name, t.elapsed().as_secs_f64());
    Ok(out)
}

/// Runs `plan` on the scenario described by `cfg`.
pub fn run(cfg: &ScenarioConfig, plan: &RunPlan) -> Result<RunReport> {
    let s: Scenario<f64> = cfg.scenario()?;
    let mut timings = BTreeMap::new();
    let mut checks = Vec::new();
    let r = s.rank() as f64;

    let curvature = if plan.curvature {
        let e = timed(&mut timings, "curvature".into(), || {
            griffiths_extremes(&s.metric, s.atlas.samples(), &s.omega, &s.stencil)
        })?;
        let res = Resolution {
            base_samples: e.samples,
            fiber_samples: 0,
        };
        checks.push(row(
            "griffiths-positive",
            None,
            sign_status(e.min),
            e.min,
            e.min,
            0.0,
            resolution_text(&res),
        ));
        Some(Extremes {
            min: e.min,
            max: e.max,
            argmin: Witness::from(&e.argmin),
            argmax: Witness::from(&e.argmax),
            resolution: res,
        })
    } else {
        None
    };

    let kobayashi = if plan.kobayashi {
        let e = timed(&mut timings, "kobayashi".into(), || curvature_band(&s))?;
        let res = Resolution {
            base_samples: e.base_samples,
            fiber_samples: e.fiber_samples,
        };
        checks.push(row(
            "kobayashi-positive",
            None,
            sign_status(e.min),
            e.min,
            e.min,
            0.0,
            resolution_text(&res),
        ));
        Some(Extremes {
            min: e.min,
            max: e.max,
            argmin: Witness::from(&e.argmin),
            argmax: Witness::from(&e.argmax),
            resolution: res,
        })
    } else {
        None
    };

    let direct_image = if plan.direct_image {
        let summary = timed(&mut timings, "direct_image".into(), || {
            let det = s.det_image()?;
            let samples = s.conclusion_atlas.samples();
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            let (mut argmin, mut argmax) = (samples[0], samples[0]);
            for p in samples {
                let v = det.curvature(p, &s.stencil)? / s.omega.coefficient(p)?;
                if v < lo {
                    lo = v;
                    argmin = *p;
                }
                if v > hi {
                    hi = v;
                    argmax = *p;
                }
            }
            let res = Resolution {
                base_samples: samples.len(),
                fiber_samples: 0,
            };
            let det_curvature = Extremes {
                min: lo,
                max: hi,
                argmin: Witness::from(&argmin),
                argmax: Witness::from(&argmax),
                resolution: res,
            };
            let mut twisted = Vec::new();
            for k in 1..=cfg.k_max() {
                let di = twisted_direct_image(&s, Theorem::One, k, &det)?;
                let e = crate::bundle::griffiths_extremes_of(samples, &s.omega, |p| {
                    di.curvature(p, &s.stencil)
                })?;
                twisted.push((
                    k,
                    Extremes {
                        min: e.min,
                        max: e.max,
                        argmin: Witness::from(&e.argmin),
                        argmax: Witness::from(&e.argmax),
                        resolution: res,
                    },
                ));
            }
            Ok(DirectImageSummary {
                det_curvature,
                twisted,
                quadrature_nodes: s.rule.n_theta,
            })
        })?;
        let d = &summary.det_curvature;
        checks.push(row(
            "det-image-positive",
            None,
            sign_status(d.min),
            d.min,
            d.min,
            0.0,
            resolution_text(&d.resolution),
        ));
        Some(summary)
    } else {
        None
    };

    let mut hypotheses = Vec::new();
    let mut conclusions = Vec::new();
    let h_side = if plan.theorems.is_empty() {
        None
    } else {
        Some(timed(&mut timings, "h_side".into(), || check_h_side(&s))?)
    };
    for &t in &plan.theorems {
        let h = h_side.as_ref().expect("h checks ran");
        let rep = timed(&mut timings, format!("hypotheses_{t}"), || {
            check_hypotheses_with(t, &s, h)
        })?;
        let margin = (r - rep.m_star)
            .min(rep.lower_bound_min - 1.0 + LOWER_BOUND_SLACK)
            .min(h.positivity_min);
        checks.push(row(
            "hypotheses",
            Some(t),
            rep.status,
            rep.m_star,
            margin,
            rep.tolerance,
            resolution_text(&rep.resolution),
        ));
        let run_conclusion = plan.conclusions && rep.status == Status::Pass;
        hypotheses.push(rep);
        if !run_conclusion {
            continue;
        }
        let c = timed(&mut timings, format!("conclusion_{t}"), || {
            if t.uses_determinant() {
                check_conclusion_hermitian(t, &s)
            } else {
                check_conclusion_finsler(t, &s, cfg.scan_options())
            }
        })?;
        let res = format!(
            "base={} quadrature={}",
            c.base_samples, c.quadrature.n_theta
        );
        let (value, margin) = match (&c.finsler, c.scan.last()) {
            (Some(f), _) => (
                f.kobayashi_min,
                f.kobayashi_min.min(f.convexity_slack + 1e-8),
            ),
            (None, Some(e)) if c.k_star.is_some() => {
                let e = c.scan.iter().find(|e| Some(e.k) == c.k_star).unwrap_or(e);
                (e.max, -e.max)
            }
            (None, Some(e)) => (e.max, -e.max),
            (None, None) => (f64::NAN, f64::NAN),
        };
        checks.push(row(
            "conclusion",
            Some(t),
            c.status,
            value,
            margin,
            0.0,
            res,
        ));
        conclusions.push(c);
    }

    let hym = match (&cfg.hym, plan.hym) {
        (Some(h), true) => {
            let rep = timed(&mut timings, "hym".into(), || {
                check_hym_scenario(
                    &s.metric,
                    &crate::base::BaseHermitianForm::fubini_study(cfg.metrics.omega)?,
                    h.c,
                    h.delta,
                    &s.atlas,
                    &s.fiber_grid,
                    &s.stencil,
                )
            })?;
            let margin = (rep.band_min - (h.c - h.delta)).min(h.c + h.delta - rep.band_max);
            let status = if rep.within_band && rep.theorem2_valid && rep.theorem4_valid {
                Status::Pass
            } else {
                Status::Fail
            };
            checks.push(row(
                "hym-band",
                None,
                status,
                rep.band_min,
                margin,
                1e-6 * h.c.max(1.0),
                resolution_text(&rep.resolution),
            ));
            Some(rep)
        }
        _ => None,
    };

    let status = checks
        .iter()
        .fold(Status::Pass, |acc, c| acc.combine(c.status));
    Ok(RunReport {
        version: env!("CARGO_PKG_VERSION").into(),
        scenario: cfg.clone(),
        plan: plan.clone(),
        curvature,
        kobayashi,
        direct_image,
        h_side,
        hypotheses,
        conclusions,
        hym,
        checks,
        status,
        timings,
    })
}
