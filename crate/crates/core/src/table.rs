//! Tabulated Hermitian metrics.
//!
//! Plain text, one sample per line: `chart x y` followed by the `r²` matrix
//! entries as `re im` pairs in row-major order. `chart` is `0`/`origin` or
//! `inf`/`infinity`. Per chart the `(x, y)` samples must fill a rectangular
//! grid; values in between come from tensor-product natural cubic splines,
//! which are twice continuously differentiable. Lines starting with `#` are
//! comments.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use crate::base::{BasePoint, Chart};
use crate::bundle::HermitianMetric;
use crate::error::{Error, Result};
use crate::numerics::linalg::{hermitize, CMatrix};
use crate::scalar::{lit, to_f64, Complex, Real};

/// Second derivatives of the natural cubic spline through `(x, y)`.
fn spline_second_derivatives(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut m = vec![0.0; n];
    if n < 3 {
        return m;
    }
    // tridiagonal system for interior nodes, Thomas algorithm
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        let h0 = x[i] - x[i - 1];
        let h1 = x[i + 1] - x[i];
        let a = h0 / 6.0;
        let b = (h0 + h1) / 3.0;
        let cc = h1 / 6.0;
        let rhs = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
        let denom = b - a * c[i - 1];
        c[i] = cc / denom;
        d[i] = (rhs - a * d[i - 1]) / denom;
    }
    for i in (1..n - 1).rev() {
        m[i] = d[i] - c[i] * m[i + 1];
    }
    m
}

fn spline_eval(x: &[f64], y: &[f64], m: &[f64], t: f64) -> f64 {
    let n = x.len();
    let mut i = match x.binary_search_by(|v| v.total_cmp(&t)) {
        Ok(i) => i,
        Err(i) => i.saturating_sub(1),
    };
    i = i.min(n - 2);
    let h = x[i + 1] - x[i];
    let a = (x[i + 1] - t) / h;
    let b = (t - x[i]) / h;
    a * y[i] + b * y[i + 1] + ((a * a * a - a) * m[i] + (b * b * b - b) * m[i + 1]) * h * h / 6.0
}

#[derive(Clone, Debug)]
struct ChartGrid {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// `values[channel][j][i]` at `(xs[i], ys[j])`.
    values: Vec<Vec<Vec<f64>>>,
    /// Second derivatives along `x` of every row.
    row_m: Vec<Vec<Vec<f64>>>,
}

impl ChartGrid {
    fn eval(&self, channel: usize, x: f64, y: f64) -> f64 {
        let rows: Vec<f64> = self.values[channel]
            .iter()
            .zip(&self.row_m[channel])
            .map(|(v, m)| spline_eval(&self.xs, v, m, x))
            .collect();
        let m = spline_second_derivatives(&self.ys, &rows);
        spline_eval(&self.ys, &rows, &m, y)
    }

    fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.xs[0]
            && x <= *self.xs.last().unwrap()
            && y >= self.ys[0]
            && y <= *self.ys.last().unwrap()
    }
}

/// A Hermitian metric sampled on a grid in each base chart.
#[derive(Clone, Debug)]
pub struct WeightTable {
    rank: usize,
    charts: [Arc<ChartGrid>; 2],
}

fn parse_chart(s: &str) -> Option<Chart> {
    match s {
        "0" | "origin" => Some(Chart::Origin),
        "inf" | "infinity" => Some(Chart::Infinity),
        _ => None,
    }
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

impl WeightTable {
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows: [Vec<(f64, f64, Vec<f64>)>; 2] = [Vec::new(), Vec::new()];
        let mut width = None;
        let mut errors = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let Some(chart) = parse_chart(fields[0]) else {
                errors.push(format!(
                    "line {}: unknown chart `{}`",
                    lineno + 1,
                    fields[0]
                ));
                continue;
            };
            let nums: std::result::Result<Vec<f64>, _> =
                fields[1..].iter().map(|f| f.parse::<f64>()).collect();
            let Ok(nums) = nums else {
                errors.push(format!("line {}: non-numeric field", lineno + 1));
                continue;
            };
            if nums.len() < 4 {
                errors.push(format!(
                    "line {}: expected x, y and matrix entries",
                    lineno + 1
                ));
                continue;
            }
            if *width.get_or_insert(nums.len()) != nums.len() {
                errors.push(format!(
                    "line {}: {} fields, earlier lines have {}",
                    lineno + 1,
                    nums.len(),
                    width.unwrap()
                ));
                continue;
            }
            rows[chart.index()].push((nums[0], nums[1], nums[2..].to_vec()));
        }
        let Some(width) = width else {
            return Err(Error::Config(vec!["weight table has no samples".into()]));
        };
        let entries = width - 2;
        let rank = ((entries / 2) as f64).sqrt().round() as usize;
        if entries % 2 != 0 || rank * rank * 2 != entries {
            errors.push(format!(
                "{entries} numbers per sample is not 2·r² for any rank r"
            ));
        }
        if !errors.is_empty() {
            return Err(Error::Config(errors));
        }
        let mut grids = Vec::new();
        for (ci, samples) in rows.iter().enumerate() {
            let xs = sorted_unique(samples.iter().map(|s| s.0).collect());
            let ys = sorted_unique(samples.iter().map(|s| s.1).collect());
            if xs.len() < 4 || ys.len() < 4 || xs.len() * ys.len() != samples.len() {
                return Err(Error::Config(vec![format!(
                    "chart {}: samples do not form a rectangular grid of at least 4×4 points",
                    Chart::from_index(ci)
                        .map(|c| format!("{c:?}").to_lowercase())
                        .unwrap_or_default()
                )]));
            }
            let mut values = vec![vec![vec![f64::NAN; xs.len()]; ys.len()]; entries];
            for (x, y, v) in samples {
                let i = xs.binary_search_by(|a| a.total_cmp(x)).unwrap();
                let j = ys.binary_search_by(|a| a.total_cmp(y)).unwrap();
                for (ch, val) in v.iter().enumerate() {
                    values[ch][j][i] = *val;
                }
            }
            if values.iter().flatten().flatten().any(|v| v.is_nan()) {
                return Err(Error::Config(vec![
                    "weight table has duplicate grid points".into(),
                ]));
            }
            let row_m = values
                .iter()
                .map(|ch| {
                    ch.iter()
                        .map(|row| spline_second_derivatives(&xs, row))
                        .collect()
                })
                .collect();
            grids.push(Arc::new(ChartGrid {
                xs,
                ys,
                values,
                row_m,
            }));
        }
        let infinity = grids.pop().unwrap();
        let origin = grids.pop().unwrap();
        Ok(Self {
            rank,
            charts: [origin, infinity],
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Samples `h` on an `n × n` grid over `[-half_width, half_width]²` in both charts.
    pub fn sample<T: Real>(h: &HermitianMetric<T>, n: usize, half_width: f64) -> Result<String> {
        let mut out = String::from("# chart x y entries (re im), row-major\n");
        for chart in [Chart::Origin, Chart::Infinity] {
            for j in 0..n {
                for i in 0..n {
                    let x = -half_width + 2.0 * half_width * i as f64 / (n - 1) as f64;
                    let y = -half_width + 2.0 * half_width * j as f64 / (n - 1) as f64;
                    let m = h.matrix(&BasePoint::new(
                        chart,
                        Complex::new(lit::<T>(x), lit::<T>(y)),
                    ))?;
                    write!(
                        out,
                        "{} {x} {y}",
                        if chart == Chart::Origin { "0" } else { "inf" }
                    )
                    .unwrap();
                    for a in 0..m.nrows() {
                        for b in 0..m.ncols() {
                            write!(
                                out,
                                " {:e} {:e}",
                                to_f64(m[(a, b)].re),
                                to_f64(m[(a, b)].im)
                            )
                            .unwrap();
                        }
                    }
                    out.push('\n');
                }
            }
        }
        Ok(out)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Interpolated matrix at a chart point.
    pub fn matrix<T: Real>(&self, chart: Chart, z: Complex<T>) -> Result<CMatrix<T>> {
        let g = &self.charts[chart.index()];
        let (x, y) = (to_f64(z.re), to_f64(z.im));
        if !g.contains(x, y) {
            return Err(Error::domain(
                "point outside the weight table",
                BasePoint::new(chart, z),
            ));
        }
        let r = self.rank;
        let m = CMatrix::<T>::from_fn(r, r, |a, b| {
            let ch = 2 * (a * r + b);
            Complex::new(lit(g.eval(ch, x, y)), lit(g.eval(ch + 1, x, y)))
        });
        Ok(hermitize(&m))
    }

    /// Metric on a bundle with the given transition degrees.
    pub fn metric<T: Real>(&self, degrees: Vec<i64>) -> Result<HermitianMetric<T>> {
        if degrees.len() != self.rank {
            return Err(Error::Config(vec![format!(
                "weight table has rank {} but {} degrees were given",
                self.rank,
                degrees.len()
            )]));
        }
        let (a, b) = (self.clone(), self.clone());
        HermitianMetric::from_fn(
            self.rank,
            degrees,
            move |z| a.matrix(Chart::Origin, z),
            move |z| b.matrix(Chart::Infinity, z),
        )
    }
}
