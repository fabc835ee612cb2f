//! Spatial maps, worst-case searches and the scaling, convergence and rank
//! studies built on top of probe design.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{preset_array, sampling_vector, ArrayPreset, FieldModel, Position, SamplingVector, SensorArray, Shape};
use crate::noise::uniform_in;
use crate::numerics::{fit_line, linspace, stream_rng, sunflower_disk, with_workers};
use crate::probe::{design_probe, grid_silencer, numerical_span, probe_metrics, InsensitiveSubspace, ProbeState};

/// Rectangular evaluation grid. Extra `fixed` coordinates are appended to
/// every point, so a 2D grid with `fixed = [z]` is a slice of 3D space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub bounds: Vec<(f64, f64)>,
    pub resolution: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fixed: Vec<f64>,
}

impl GridSpec {
    pub fn square(lo: f64, hi: f64, resolution: usize) -> Self {
        GridSpec {
            bounds: vec![(lo, hi), (lo, hi)],
            resolution: vec![resolution, resolution],
            fixed: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.bounds.is_empty() || self.bounds.len() != self.resolution.len() {
            return Err(Error::InvalidArgument("grid needs one resolution per bounded axis".into()));
        }
        if self.bounds.len() + self.fixed.len() > 3 {
            return Err(Error::InvalidArgument("grid has more than three coordinates".into()));
        }
        if self.resolution.iter().any(|&r| r < 2) {
            return Err(Error::InvalidArgument("grid resolution must be at least 2 per axis".into()));
        }
        if self.bounds.iter().any(|(a, b)| !(a.is_finite() && b.is_finite() && a < b)) || self.fixed.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("grid bounds must be finite with lo < hi".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.bounds.len() + self.fixed.len()
    }

    pub fn len(&self) -> usize {
        self.resolution.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Axis values along bounded axis `a`.
    pub fn axis(&self, a: usize) -> Vec<f64> {
        linspace(self.bounds[a].0, self.bounds[a].1, self.resolution[a])
    }

    /// Grid point `i`, with the first axis varying slowest.
    pub fn point(&self, mut i: usize) -> Position {
        let mut c = vec![0.0; self.bounds.len()];
        for a in (0..self.bounds.len()).rev() {
            let r = self.resolution[a];
            let (lo, hi) = self.bounds[a];
            c[a] = lo + (hi - lo) * (i % r) as f64 / (r - 1) as f64;
            i /= r;
        }
        c.extend_from_slice(&self.fixed);
        Position::new(&c).expect("validated grid")
    }
}

/// Values on a grid, stored linearly. `mask[i]` marks cells that could not
/// be evaluated, such as sources on top of a sensor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapResult {
    pub grid: GridSpec,
    #[serde(with = "crate::report::extended_float_vec")]
    pub values: Vec<f64>,
    pub mask: Vec<bool>,
}

impl MapResult {
    /// CSV with one row per cell: coordinates, value, mask flag.
    pub fn to_csv(&self, log10: bool) -> String {
        let names = ["x", "y", "z"];
        let mut out = names[..self.grid.dim()].join(",");
        out.push_str(if log10 { ",log10_value,masked\n" } else { ",value,masked\n" });
        for (i, (&v, &m)) in self.values.iter().zip(&self.mask).enumerate() {
            let p = self.grid.point(i);
            for c in p.coords() {
                out.push_str(&format!("{c},"));
            }
            let v = if log10 { v.log10() } else { v };
            out.push_str(&format!("{},{}\n", crate::report::format_float(v), m as u8));
        }
        out
    }

    /// Extreme finite, unmasked values.
    pub fn finite_range(&self) -> Option<(f64, f64)> {
        let it = self.values.iter().zip(&self.mask).filter(|(v, m)| !**m && v.is_finite()).map(|(v, _)| *v);
        it.fold(None, |acc, v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        })
    }

    /// Number of 4-connected components of unmasked cells above `threshold`
    /// on a 2D grid.
    pub fn components_above(&self, threshold: f64) -> usize {
        if self.grid.bounds.len() != 2 {
            return 0;
        }
        let (rows, cols) = (self.grid.resolution[0], self.grid.resolution[1]);
        let above = |i: usize| !self.mask[i] && self.values[i] > threshold;
        let mut seen = vec![false; self.values.len()];
        let mut count = 0;
        for start in 0..self.values.len() {
            if seen[start] || !above(start) {
                continue;
            }
            count += 1;
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(i) = stack.pop() {
                let (r, c) = (i / cols, i % cols);
                let mut nb = Vec::with_capacity(4);
                if r > 0 {
                    nb.push(i - cols);
                }
                if r + 1 < rows {
                    nb.push(i + cols);
                }
                if c > 0 {
                    nb.push(i - 1);
                }
                if c + 1 < cols {
                    nb.push(i + 1);
                }
                for j in nb {
                    if !seen[j] && above(j) {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        count
    }
}

fn evaluate_map(grid: &GridSpec, dim: usize, f: impl Fn(&Position) -> Option<f64> + Sync) -> Result<MapResult> {
    grid.validate()?;
    if grid.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: grid.dim(),
        });
    }
    let cells: Vec<Option<f64>> = with_workers(|| (0..grid.len()).into_par_iter().map(|i| f(&grid.point(i))).collect());
    Ok(MapResult {
        grid: grid.clone(),
        values: cells.iter().map(|c| c.unwrap_or(f64::NAN)).collect(),
        mask: cells.iter().map(|c| c.is_none()).collect(),
    })
}

/// Sensitivity `S` to a signal source at each grid point. With `readapt`,
/// the probe is redesigned per point against that insensitive subspace;
/// otherwise `k` is held fixed.
pub fn sensitivity_map(
    model: &FieldModel,
    array: &SensorArray,
    k: &ProbeState,
    grid: &GridSpec,
    readapt: Option<&InsensitiveSubspace>,
) -> Result<MapResult> {
    evaluate_map(grid, array.dim(), |x| {
        let s = sampling_vector(model, x, array).ok()?;
        let l1 = s.l1_norm();
        if l1 == 0.0 {
            return Some(0.0);
        }
        let kk = match readapt {
            Some(z) => match design_probe(&s, z) {
                Ok(k) => k,
                Err(Error::SignalInNoiseSpace { .. }) => return Some(0.0),
                Err(_) => return None,
            },
            None => k.clone(),
        };
        Some(s.dot(kk.as_vector()).abs() / l1)
    })
}

/// Noise impact `⟨n(x), k⟩²` of a unit source at each grid point.
pub fn noise_impact_map(model: &FieldModel, array: &SensorArray, k: &ProbeState, grid: &GridSpec) -> Result<MapResult> {
    evaluate_map(grid, array.dim(), |x| {
        let n = sampling_vector(model, x, array).ok()?;
        let nk = n.dot(k.as_vector());
        Some(nk * nk)
    })
}

/// Signal-to-noise `δ` against a noise source at each grid point.
pub fn delta_map(model: &FieldModel, array: &SensorArray, k: &ProbeState, s: &SamplingVector, grid: &GridSpec) -> Result<MapResult> {
    evaluate_map(grid, array.dim(), |x| {
        let n = sampling_vector(model, x, array).ok()?;
        probe_metrics(s, &n, k).ok().map(|m| m.delta)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorstCaseOptions {
    /// Grid points per axis over the bounding box of the area.
    pub resolution: usize,
    /// Coordinate-descent rounds; the step halves every round.
    pub rounds: usize,
    /// Number of best grid cells refined.
    pub starts: usize,
}

impl Default for WorstCaseOptions {
    fn default() -> Self {
        WorstCaseOptions {
            resolution: 64,
            rounds: 3,
            starts: 8,
        }
    }
}

impl WorstCaseOptions {
    /// Exhaustive grid without refinement.
    pub fn fine_grid(resolution: usize) -> Self {
        WorstCaseOptions {
            resolution,
            rounds: 0,
            starts: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorstCase {
    #[serde(with = "crate::report::extended_float")]
    pub delta: f64,
    pub position: Position,
}

fn delta_at(model: &FieldModel, array: &SensorArray, k: &ProbeState, s: &SamplingVector, x: &Position) -> f64 {
    match sampling_vector(model, x, array) {
        Ok(n) => probe_metrics(s, &n, k).map_or(f64::INFINITY, |m| if m.signal_silenced { 0.0 } else { m.delta }),
        // a source on a sensor is not a meaningful worst case
        Err(_) => f64::INFINITY,
    }
}

/// Minimum of `δ` over a bounded noise area: grid search followed by
/// coordinate descent from the best cells.
pub fn worst_case_delta(
    model: &FieldModel,
    array: &SensorArray,
    k: &ProbeState,
    s: &SamplingVector,
    area: &Shape,
    opts: &WorstCaseOptions,
) -> Result<WorstCase> {
    area.validate()?;
    if area.dim() != array.dim() {
        return Err(Error::DimensionMismatch {
            expected: array.dim(),
            got: area.dim(),
        });
    }
    let eval = |x: &Position| delta_at(model, array, k, s, x);
    let candidates: Vec<Position> = match area {
        Shape::Points { points } => points.clone(),
        _ => {
            let (lo, hi) = area.bounding_box();
            let dim = area.dim();
            let res = opts.resolution.max(2);
            let total = res.pow(dim as u32);
            (0..total)
                .filter_map(|mut i| {
                    let mut p = lo;
                    for d in 0..dim {
                        let f = (i % res) as f64 / (res - 1) as f64;
                        p = p.with_coord(d, lo.coord(d) + f * (hi.coord(d) - lo.coord(d)));
                        i /= res;
                    }
                    area.contains(&p).then_some(p)
                })
                .collect()
        }
    };
    let candidates = if candidates.is_empty() { vec![area.center()] } else { candidates };
    let mut scored: Vec<(f64, Position)> = with_workers(|| candidates.par_iter().map(|p| (eval(p), *p)).collect());
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = WorstCase {
        delta: scored[0].0,
        position: scored[0].1,
    };
    if matches!(area, Shape::Points { .. }) || opts.rounds == 0 {
        return Ok(best);
    }
    let (lo, hi) = area.bounding_box();
    let cell: Vec<f64> = (0..area.dim())
        .map(|d| (hi.coord(d) - lo.coord(d)) / (opts.resolution.max(2) - 1) as f64)
        .collect();
    for &(d0, p0) in scored.iter().take(opts.starts.max(1)) {
        let (mut d, mut p) = (d0, p0);
        for round in 0..opts.rounds {
            let scale = 0.5f64.powi(round as i32);
            for _ in 0..50 {
                let mut moved = false;
                for axis in 0..area.dim() {
                    for dir in [-1.0, 1.0] {
                        let q = p.with_coord(axis, p.coord(axis) + dir * scale * cell[axis]);
                        if !area.contains(&q) {
                            continue;
                        }
                        let dq = eval(&q);
                        if dq < d {
                            d = dq;
                            p = q;
                            moved = true;
                        }
                    }
                }
                if !moved {
                    break;
                }
            }
        }
        if d < best.delta {
            best = WorstCase { delta: d, position: p };
        }
    }
    Ok(best)
}

/// Sensor family used by [`scaling_study`] and [`convergence_study`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ScalingGeometry {
    /// `N` sensors evenly spaced on a segment of the x axis.
    Line { from: f64, to: f64 },
    /// Two concentric circles holding `N/2` and `N - N/2` sensors.
    TwoCircles {
        r_inner: f64,
        r_outer: f64,
        #[serde(default)]
        outer_phase: f64,
    },
}

impl ScalingGeometry {
    pub fn array(&self, n: usize) -> Result<SensorArray> {
        match *self {
            ScalingGeometry::Line { from, to } => preset_array(&ArrayPreset::Line { n, from, to, dim: 1 }),
            ScalingGeometry::TwoCircles {
                r_inner,
                r_outer,
                outer_phase,
            } => preset_array(&ArrayPreset::TwoCircles {
                n_inner: n / 2,
                n_outer: n - n / 2,
                r_inner,
                r_outer,
                outer_phase,
                center: Position::origin(2),
            }),
        }
    }
}

/// `m` silenced positions spread over a noise area: interval midpoints in
/// 1D, a sunflower pattern in a disk, Halton points otherwise.
pub fn silenced_points(area: &Shape, m: usize) -> Vec<Position> {
    if m == 0 {
        return Vec::new();
    }
    if let Shape::Points { points } = area {
        return points.iter().cycle().take(m.min(points.len())).cloned().collect();
    }
    let (lo, hi) = area.bounding_box();
    match (area.dim(), area) {
        (1, _) => (0..m)
            .map(|i| Position::x(lo.coord(0) + (hi.coord(0) - lo.coord(0)) * (i as f64 + 0.5) / m as f64))
            .collect(),
        (2, Shape::Ball { center, radius }) => sunflower_disk(center.coord(0), center.coord(1), *radius, m)
            .into_iter()
            .map(|(x, y)| Position::xy(x, y))
            .collect(),
        (dim, _) => {
            let bases = [2u64, 3, 5];
            let mut out = Vec::with_capacity(m);
            let mut i = 1u64;
            while out.len() < m && i < 1_000_000 {
                let mut p = lo;
                for d in 0..dim {
                    p = p.with_coord(d, lo.coord(d) + halton(i, bases[d]) * (hi.coord(d) - lo.coord(d)));
                }
                if area.contains(&p) {
                    out.push(p);
                }
                i += 1;
            }
            out
        }
    }
}

fn halton(mut i: u64, base: u64) -> f64 {
    let (mut f, mut r) = (1.0, 0.0);
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingSetup {
    pub model: FieldModel,
    pub geometry: ScalingGeometry,
    pub signal: Position,
    pub noise_area: Shape,
    /// Strength standard deviation of the worst-case source.
    pub sigma: f64,
    #[serde(default)]
    pub search: Option<WorstCaseOptions>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub m: usize,
    pub surplus: usize,
    pub n: usize,
    pub sensitivity: f64,
    #[serde(with = "crate::report::extended_float")]
    pub delta: f64,
    #[serde(with = "crate::report::extended_float")]
    pub t_opt: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingResult {
    pub rows: Vec<ScalingRow>,
    /// Exponent in `δ ∝ S^{-κ}`, from a least-squares fit of `log δ` on `log S`.
    pub kappa: f64,
    pub fit_r2: f64,
    /// Slopes of `ln S` and `ln δ` against `m`.
    pub log_s_per_m: f64,
    pub log_delta_per_m: f64,
    /// κ refitted with each row left out in turn.
    pub kappa_leave_one_out: Vec<f64>,
}

fn kappa_fit(rows: &[ScalingRow]) -> Option<(f64, f64)> {
    let usable: Vec<_> = rows.iter().filter(|r| r.delta.is_finite() && r.delta > 0.0 && r.sensitivity > 0.0).collect();
    let x: Vec<f64> = usable.iter().map(|r| r.sensitivity.ln()).collect();
    let y: Vec<f64> = usable.iter().map(|r| r.delta.ln()).collect();
    fit_line(&x, &y).map(|f| (-f.slope, f.r_squared))
}

/// Silence `m` points of the noise area with `N = m + c` sensors and record
/// the sensitivity and worst-case signal-to-noise for every `(m, c)`.
pub fn scaling_study(setup: &ScalingSetup, m_range: &[usize], surplus: &[usize]) -> Result<ScalingResult> {
    if m_range.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("m_range must be strictly increasing".into()));
    }
    let opts = setup.search.unwrap_or_default();
    let mut rows = Vec::new();
    for &m in m_range {
        for &c in surplus {
            let n = m + c;
            let array = setup.geometry.array(n)?;
            let s = sampling_vector(&setup.model, &setup.signal, &array)?;
            let pts = silenced_points(&setup.noise_area, m);
            let z = grid_silencer(&setup.model, &array, &pts)?;
            let k = design_probe(&s, &z)?;
            let sensitivity = s.dot(k.as_vector()).abs() / s.l1_norm();
            let wc = worst_case_delta(&setup.model, &array, &k, &s, &setup.noise_area, &opts)?;
            let nk = sampling_vector(&setup.model, &wc.position, &array)?.dot(k.as_vector());
            let t_opt = if nk == 0.0 {
                f64::INFINITY
            } else {
                1.0 / (2.0 * std::f64::consts::SQRT_2 * setup.sigma * nk.abs())
            };
            rows.push(ScalingRow {
                m,
                surplus: c,
                n,
                sensitivity,
                delta: wc.delta,
                t_opt,
            });
        }
    }
    let (kappa, fit_r2) = kappa_fit(&rows).unwrap_or((f64::NAN, 0.0));
    let fin: Vec<&ScalingRow> = rows.iter().filter(|r| r.delta.is_finite() && r.delta > 0.0).collect();
    let ms: Vec<f64> = fin.iter().map(|r| r.m as f64).collect();
    let log_s_per_m = fit_line(&ms, &fin.iter().map(|r| r.sensitivity.ln()).collect::<Vec<_>>()).map_or(f64::NAN, |f| f.slope);
    let log_delta_per_m = fit_line(&ms, &fin.iter().map(|r| r.delta.ln()).collect::<Vec<_>>()).map_or(f64::NAN, |f| f.slope);
    let kappa_leave_one_out = (0..rows.len())
        .map(|i| {
            let rest: Vec<ScalingRow> = rows.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, r)| *r).collect();
            kappa_fit(&rest).map_or(f64::NAN, |f| f.0)
        })
        .collect();
    Ok(ScalingResult {
        rows,
        kappa,
        fit_r2,
        log_s_per_m,
        log_delta_per_m,
        kappa_leave_one_out,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub s_bar: f64,
    pub n_bar: f64,
    pub sensitivity: f64,
    #[serde(with = "crate::report::extended_float")]
    pub delta: f64,
    /// Closed-form `F_t` against the worst-case source at each study time.
    pub qfi: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceResult {
    pub m: usize,
    pub sigma: f64,
    pub times: Vec<f64>,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceResult {
    /// `F̂(N) = 4 s̄² S² N² t² exp(-4 σ² (n̄ S N / δ)² t²)` using the scalars
    /// of the largest studied `N`.
    pub fn extrapolated_qfi(&self, n: usize, t: f64) -> f64 {
        let r = self.rows.last().expect("non-empty study");
        let nf = n as f64;
        let amp = r.s_bar * r.sensitivity * nf;
        let noise = if r.delta.is_finite() { r.n_bar * r.sensitivity * nf / r.delta } else { 0.0 };
        4.0 * amp * amp * t * t * (-4.0 * self.sigma * self.sigma * noise * noise * t * t).exp()
    }
}

/// Per-`N` scalars of a fixed geometry with `m` silenced points.
pub fn convergence_study(setup: &ScalingSetup, n_range: &[usize], m: usize, times: &[f64]) -> Result<ConvergenceResult> {
    if n_range.windows(2).any(|w| w[0] >= w[1]) || n_range.is_empty() {
        return Err(Error::InvalidArgument("n_range must be non-empty and strictly increasing".into()));
    }
    let opts = setup.search.unwrap_or_default();
    let pts = silenced_points(&setup.noise_area, m);
    let mut rows = Vec::with_capacity(n_range.len());
    for &n in n_range {
        let array = setup.geometry.array(n)?;
        let s = sampling_vector(&setup.model, &setup.signal, &array)?;
        let z = grid_silencer(&setup.model, &array, &pts)?;
        let k = design_probe(&s, &z)?;
        let wc = worst_case_delta(&setup.model, &array, &k, &s, &setup.noise_area, &opts)?;
        let nv = sampling_vector(&setup.model, &wc.position, &array)?;
        let sk = s.dot(k.as_vector());
        let nk = nv.dot(k.as_vector());
        let qfi = times
            .iter()
            .map(|&t| 4.0 * sk * sk * t * t * (-4.0 * setup.sigma * setup.sigma * nk * nk * t * t).exp())
            .collect();
        rows.push(ConvergenceRow {
            n,
            s_bar: s.mean_abs(),
            n_bar: nv.mean_abs(),
            sensitivity: sk.abs() / s.l1_norm(),
            delta: wc.delta,
            qfi,
        });
    }
    Ok(ConvergenceResult {
        m,
        sigma: setup.sigma,
        times: times.to_vec(),
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankCheck {
    pub rank: usize,
    /// `‖s⊥‖ / ‖s‖` after projecting out the sampled noise span.
    pub residual: f64,
    pub singular_values: Vec<f64>,
}

/// Stack noise vectors from `samples` uniform positions in `area` and report
/// the numerical rank of their span and what is left of the signal.
pub fn full_measure_rank_check(
    model: &FieldModel,
    array: &SensorArray,
    signal: &Position,
    area: &Shape,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<RankCheck> {
    area.validate()?;
    let n = array.len();
    let mut cols = nalgebra::DMatrix::zeros(n, samples);
    let mut j = 0;
    let mut i = 0u64;
    while j < samples {
        let p = uniform_in(area, &mut stream_rng(seed, i))?;
        i += 1;
        if let Ok(v) = sampling_vector(model, &p, array) {
            cols.set_column(j, v.as_vector());
            j += 1;
        }
        if i > 100 * samples as u64 + 1000 {
            return Err(Error::RejectionStall);
        }
    }
    let (basis, singular_values) = numerical_span(&cols, tol);
    let s = sampling_vector(model, signal, array)?;
    let sv = s.as_vector();
    let proj = if basis.ncols() == 0 { sv * 0.0 } else { &basis * (basis.transpose() * sv) };
    let residual = (sv - proj).norm() / sv.norm();
    Ok(RankCheck {
        rank: basis.ncols(),
        residual,
        singular_values,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PhaseClass {
    Perfect,
    Partial,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSweep {
    pub max_impact: f64,
    pub argmax_phase: f64,
    pub class: PhaseClass,
}

/// Sweep the phase of a periodic noise field with fixed wavevector over
/// `points` values in `[0, 2π)` and report the largest `⟨n,k⟩²`.
pub fn phase_sweep(
    model: &FieldModel,
    array: &SensorArray,
    k: &ProbeState,
    wavevector: &Position,
    points: usize,
    tol: f64,
) -> Result<PhaseSweep> {
    if !matches!(model, FieldModel::Periodic { .. }) {
        return Err(Error::InvalidArgument("phase sweep needs a periodic field".into()));
    }
    if points == 0 {
        return Err(Error::InvalidArgument("phase sweep needs at least one phase".into()));
    }
    let mut best = (0.0f64, 0.0);
    for i in 0..points {
        let phi = 2.0 * std::f64::consts::PI * i as f64 / points as f64;
        let n = sampling_vector(&model.with_phase(phi), wavevector, array)?;
        let nk = n.dot(k.as_vector());
        if nk * nk > best.0 {
            best = (nk * nk, phi);
        }
    }
    Ok(PhaseSweep {
        max_impact: best.0,
        argmax_phase: best.1,
        class: if best.0 < tol { PhaseClass::Perfect } else { PhaseClass::Partial },
    })
}
