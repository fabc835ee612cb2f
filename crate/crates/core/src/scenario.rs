//! Scenario documents: a JSON configuration describing sensors, fields,
//! noise and probe choice, the shipped presets, and the report produced by
//! running one.
//!
//! All randomness derives from the config `seed`. The designed probe uses
//! streams of `seed`, the GHZ baseline streams of `seed + 1` and the
//! rank check streams of `seed + 2`.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{
    convergence_study, delta_map, full_measure_rank_check, noise_impact_map, phase_sweep, scaling_study, sensitivity_map,
    silenced_points, ConvergenceResult, GridSpec, MapResult, PhaseSweep, RankCheck, ScalingGeometry, ScalingResult,
    ScalingSetup, WorstCaseOptions,
};
use crate::error::{Error, Result};
use crate::geometry::{preset_array, sampling_vector, ArrayPreset, FieldModel, Position, SamplingVector, SensorArray, Shape, SourcePoint};
use crate::noise::NoiseDistribution;
use crate::probe::{
    design_probe_with, first_order_silencer_multi, flip_schedule, grid_silencer, mirror_charge_probe, probe_metrics, Flip,
    InsensitiveSubspace, Normalization, ProbeMetrics, ProbeState,
};
use crate::qfi::{phase_samples, qfi_time_limited, separable_bound, Baselines, DephasingSpec, Estimator, QfiReport, TimeGrid};

/// Sensor positions: a named preset or an explicit list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArraySpec {
    Named(ArrayPreset),
    Positions(Vec<Position>),
}

impl ArraySpec {
    pub fn build(&self) -> Result<SensorArray> {
        match self {
            ArraySpec::Named(p) => preset_array(p),
            ArraySpec::Positions(v) => SensorArray::new(v.clone()),
        }
    }
}

/// How the probe vector `k` is chosen.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ProbeMode {
    /// Silence the nominal position of every noise source exactly.
    Dfs,
    /// Silence the listed positions.
    GridSilencer { points: Vec<Position> },
    /// Silence `m` points spread deterministically over `area`.
    GridPlacement { m: usize, area: Shape },
    /// Silence every noise source to first order around its nominal position.
    FirstOrder,
    /// Alternating `k_i = (-1)^i`.
    Mirror,
    /// All-ones probe.
    Ghz,
    Explicit { k: Vec<f64> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    /// `S` for a signal at each cell with `k` fixed.
    Sensitivity,
    /// `S` with `k` redesigned per signal position.
    SensitivityReadapt,
    NoiseImpact,
    Delta,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub name: String,
    pub kind: MapKind,
    pub grid: GridSpec,
    #[serde(default)]
    pub log10: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingSection {
    pub geometry: ScalingGeometry,
    pub noise_area: Shape,
    pub m_range: Vec<usize>,
    pub surplus: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<WorstCaseOptions>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSection {
    pub geometry: ScalingGeometry,
    pub noise_area: Shape,
    pub n_range: Vec<usize>,
    pub m: usize,
    pub times: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RankSection {
    pub area: Shape,
    pub samples: usize,
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub wavevector: Position,
    pub points: usize,
    pub tol: f64,
}

fn default_estimator() -> Estimator {
    Estimator::Conditional
}

fn is_default<T: Default + PartialEq>(v: &T) -> bool {
    *v == T::default()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub notes: String,
    pub dim: usize,
    pub array: ArraySpec,
    pub signal_field: FieldModel,
    /// Defaults to the signal field.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_field: Option<FieldModel>,
    pub signal: Position,
    pub noise: NoiseDistribution,
    pub probe: ProbeMode,
    #[serde(default, skip_serializing_if = "is_default")]
    pub normalization: Normalization,
    pub time_limit: f64,
    pub samples: usize,
    pub seed: u64,
    #[serde(default = "default_estimator")]
    pub estimator: Estimator,
    #[serde(default, skip_serializing_if = "is_default_grid")]
    pub time_grid: TimeGrid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dephasing: Option<DephasingSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub maps: Vec<MapSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaling: Option<ScalingSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_check: Option<RankSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_sweep: Option<SweepSection>,
}

fn is_default_grid(g: &TimeGrid) -> bool {
    *g == TimeGrid::default()
}

impl ScenarioConfig {
    /// Parse and validate; errors carry the offending field path.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: ScenarioConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(path, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Canonical text: fixed field order, two-space indentation.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the canonical text, hex encoded.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_canonical_json().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn noise_model(&self) -> FieldModel {
        self.noise_field.unwrap_or(self.signal_field)
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |p: &str, m: String| Error::config(p, m);
        if !(1..=3).contains(&self.dim) {
            return Err(cfg("dim", format!("must be 1, 2 or 3, got {}", self.dim)));
        }
        let array = self.array.build().map_err(|e| cfg("array", e.to_string()))?;
        if array.dim() != self.dim {
            return Err(cfg("array", format!("sensors are {}D but dim is {}", array.dim(), self.dim)));
        }
        self.signal_field.validate().map_err(|e| cfg("signal_field", e.to_string()))?;
        self.noise_model().validate().map_err(|e| cfg("noise_field", e.to_string()))?;
        if self.signal.dim() != self.dim {
            return Err(cfg("signal", format!("expected {} coordinates", self.dim)));
        }
        self.noise.validate().map_err(|e| cfg("noise", e.to_string()))?;
        if self.noise.dim() != self.dim {
            return Err(cfg("noise", format!("noise law is {}D but dim is {}", self.noise.dim(), self.dim)));
        }
        let n = array.len();
        match &self.probe {
            ProbeMode::Dfs if self.noise.source_count() >= n => {
                return Err(cfg("probe", format!("silencing {} sources needs more than {n} sensors", self.noise.source_count())))
            }
            ProbeMode::GridSilencer { points } => {
                if points.len() >= n {
                    return Err(cfg("probe.points", format!("m = {} must be below N = {n}", points.len())));
                }
                if points.iter().any(|p| p.dim() != self.dim) {
                    return Err(cfg("probe.points", "dimension mismatch".into()));
                }
            }
            ProbeMode::GridPlacement { m, area } => {
                if *m >= n {
                    return Err(cfg("probe.m", format!("m = {m} must be below N = {n}")));
                }
                area.validate().map_err(|e| cfg("probe.area", e.to_string()))?;
            }
            ProbeMode::FirstOrder if self.noise.source_count() * (self.dim + 1) >= n => {
                return Err(cfg("probe", "first-order silencing needs N > (D + 1) per source".into()))
            }
            ProbeMode::Explicit { k } => {
                if k.len() != n {
                    return Err(cfg("probe.k", format!("expected {n} entries, got {}", k.len())));
                }
                ProbeState::from_slice(k).map_err(|e| cfg("probe.k", e.to_string()))?;
            }
            _ => {}
        }
        if !(self.time_limit > 0.0 && self.time_limit.is_finite()) {
            return Err(cfg("time_limit", "must be positive and finite".into()));
        }
        if self.samples == 0 {
            return Err(cfg("samples", "must be at least 1".into()));
        }
        if self.time_grid.points < 3 || !(self.time_grid.lower_fraction > 0.0 && self.time_grid.lower_fraction < 1.0) {
            return Err(cfg("time_grid", "needs at least 3 points and 0 < lower_fraction < 1".into()));
        }
        if let Some(d) = &self.dephasing {
            if d.probabilities().len() != n {
                return Err(cfg("dephasing", format!("expected {n} probabilities")));
            }
        }
        for (i, m) in self.maps.iter().enumerate() {
            m.grid.validate().map_err(|e| cfg(&format!("maps[{i}].grid"), e.to_string()))?;
            if m.grid.dim() != self.dim {
                return Err(cfg(&format!("maps[{i}].grid"), "grid dimension differs from dim".into()));
            }
        }
        if let Some(r) = &self.rank_check {
            r.area.validate().map_err(|e| cfg("rank_check.area", e.to_string()))?;
        }
        if let Some(s) = &self.phase_sweep {
            if !matches!(self.noise_model(), FieldModel::Periodic { .. }) {
                return Err(cfg("phase_sweep", "needs a periodic noise field".into()));
            }
            if s.points == 0 {
                return Err(cfg("phase_sweep.points", "must be at least 1".into()));
            }
        }
        Ok(())
    }
}

/// Sensors, signal vector, probe and insensitive subspace of a scenario.
#[derive(Clone, Debug)]
pub struct Design {
    pub array: SensorArray,
    pub signal: SamplingVector,
    pub probe: ProbeState,
    pub subspace: InsensitiveSubspace,
}

pub fn design(config: &ScenarioConfig) -> Result<Design> {
    let array = config.array.build()?;
    let signal = sampling_vector(&config.signal_field, &config.signal, &array)?;
    let noise_model = config.noise_model();
    let n = array.len();
    let with_z = |z: InsensitiveSubspace| -> Result<(ProbeState, InsensitiveSubspace)> {
        Ok((design_probe_with(&signal, &z, config.normalization)?, z))
    };
    let (probe, subspace) = match &config.probe {
        ProbeMode::Dfs => with_z(grid_silencer(&noise_model, &array, &config.noise.centers())?)?,
        ProbeMode::GridSilencer { points } => with_z(grid_silencer(&noise_model, &array, points)?)?,
        ProbeMode::GridPlacement { m, area } => with_z(grid_silencer(&noise_model, &array, &silenced_points(area, *m))?)?,
        ProbeMode::FirstOrder => {
            let centers: Vec<SourcePoint> = config.noise.centers().into_iter().map(|p| SourcePoint::new(1.0, p)).collect();
            with_z(first_order_silencer_multi(&noise_model, &array, &centers)?)?
        }
        ProbeMode::Mirror => (mirror_charge_probe(&array), InsensitiveSubspace::empty(n)),
        ProbeMode::Ghz => (ProbeState::ghz(n), InsensitiveSubspace::empty(n)),
        ProbeMode::Explicit { k } => (ProbeState::from_slice(k)?, InsensitiveSubspace::empty(n)),
    };
    Ok(Design {
        array,
        signal,
        probe,
        subspace,
    })
}

/// Which parts of a scenario to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Tasks {
    pub qfi: bool,
    pub maps: bool,
    pub scaling: bool,
    pub rank_check: bool,
    pub phase_sweep: bool,
}

impl Tasks {
    pub const ALL: Tasks = Tasks {
        qfi: true,
        maps: true,
        scaling: true,
        rank_check: true,
        phase_sweep: true,
    };
    pub const NONE: Tasks = Tasks {
        qfi: false,
        maps: false,
        scaling: false,
        rank_check: false,
        phase_sweep: false,
    };

    pub fn with_qfi(mut self) -> Self {
        self.qfi = true;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedMap {
    pub name: String,
    pub kind: MapKind,
    pub log10: bool,
    pub map: MapResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    pub config: ScenarioConfig,
    pub probe: ProbeState,
    /// Flip times for one run of the optimal duration (or the time limit).
    pub flips: Vec<Flip>,
    /// Metrics against each nominal noise source.
    pub metrics: Vec<ProbeMetrics>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qfi: Option<QfiReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub maps: Vec<NamedMap>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaling: Option<ScalingResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_check: Option<RankCheck>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_sweep: Option<PhaseSweep>,
    pub wall_time_s: f64,
}

impl ReportDocument {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn run_scenario(config: &ScenarioConfig) -> Result<ReportDocument> {
    run_scenario_with(config, Tasks::ALL)
}

pub fn run_scenario_with(config: &ScenarioConfig, tasks: Tasks) -> Result<ReportDocument> {
    let start = Instant::now();
    config.validate()?;
    let d = design(config)?;
    let noise_model = config.noise_model();
    let metrics = config
        .noise
        .centers()
        .iter()
        .map(|c| probe_metrics(&d.signal, &sampling_vector(&noise_model, c, &d.array)?, &d.probe))
        .collect::<Result<Vec<_>>>()?;

    let mut flips = flip_schedule(&d.probe, config.time_limit);
    let qfi = if tasks.qfi {
        let q = time_limited_report(config, &d)?;
        flips = flip_schedule(&d.probe, q.time_used);
        Some(q)
    } else {
        None
    };

    let mut maps = Vec::new();
    if tasks.maps {
        for m in &config.maps {
            let map = match m.kind {
                MapKind::Sensitivity => sensitivity_map(&config.signal_field, &d.array, &d.probe, &m.grid, None)?,
                MapKind::SensitivityReadapt => {
                    sensitivity_map(&config.signal_field, &d.array, &d.probe, &m.grid, Some(&d.subspace))?
                }
                MapKind::NoiseImpact => noise_impact_map(&noise_model, &d.array, &d.probe, &m.grid)?,
                MapKind::Delta => delta_map(&noise_model, &d.array, &d.probe, &d.signal, &m.grid)?,
            };
            maps.push(NamedMap {
                name: m.name.clone(),
                kind: m.kind,
                log10: m.log10,
                map,
            });
        }
    }

    let sigma = strength_scale(&config.noise);
    let (scaling, convergence) = if tasks.scaling {
        let scaling = match &config.scaling {
            Some(s) => Some(scaling_study(
                &ScalingSetup {
                    model: config.signal_field,
                    geometry: s.geometry.clone(),
                    signal: config.signal,
                    noise_area: s.noise_area.clone(),
                    sigma,
                    search: s.search,
                },
                &s.m_range,
                &s.surplus,
            )?),
            None => None,
        };
        let convergence = match &config.convergence {
            Some(c) => Some(convergence_study(
                &ScalingSetup {
                    model: config.signal_field,
                    geometry: c.geometry.clone(),
                    signal: config.signal,
                    noise_area: c.noise_area.clone(),
                    sigma,
                    search: None,
                },
                &c.n_range,
                c.m,
                &c.times,
            )?),
            None => None,
        };
        (scaling, convergence)
    } else {
        (None, None)
    };

    let rank_check = match (&config.rank_check, tasks.rank_check) {
        (Some(r), true) => Some(full_measure_rank_check(
            &noise_model,
            &d.array,
            &config.signal,
            &r.area,
            r.samples,
            r.tol,
            config.seed.wrapping_add(2),
        )?),
        _ => None,
    };
    let phase_sweep = match (&config.phase_sweep, tasks.phase_sweep) {
        (Some(s), true) => Some(phase_sweep(&noise_model, &d.array, &d.probe, &s.wavevector, s.points, s.tol)?),
        _ => None,
    };

    Ok(ReportDocument {
        tool: "adfs".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config_hash: config.hash(),
        config: config.clone(),
        probe: d.probe,
        flips,
        metrics,
        qfi,
        maps,
        scaling,
        convergence,
        rank_check,
        phase_sweep,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Largest strength standard deviation among the noise sources.
fn strength_scale(dist: &NoiseDistribution) -> f64 {
    match dist {
        NoiseDistribution::FixedPositionGaussianStrength { strength, .. }
        | NoiseDistribution::UniformVolume { strength, .. }
        | NoiseDistribution::RadialShell { strength, .. } => strength.sd,
        NoiseDistribution::TruncatedGaussian { covariance, .. } => covariance[0][0].max(0.0).sqrt(),
        NoiseDistribution::Product { factors } => factors.iter().map(strength_scale).fold(0.0, f64::max),
    }
}

fn time_limited_report(config: &ScenarioConfig, d: &Design) -> Result<QfiReport> {
    let model = config.noise_model();
    let t_l = config.time_limit;
    let factor = config.dephasing.as_ref().map_or(1.0, |p| p.factor());
    let factor2 = factor * factor;

    let phases = phase_samples(&config.noise, &model, &d.array, &d.probe, config.samples, config.seed, config.estimator)?;
    let mut opt = qfi_time_limited(&d.signal, &d.probe, &phases, t_l, &config.time_grid)?;
    opt.qfi *= factor2;
    opt.qfi_se *= factor2;

    let ghz = ProbeState::ghz(d.array.len());
    let ghz_phases = phase_samples(&config.noise, &model, &d.array, &ghz, config.samples, config.seed.wrapping_add(1), config.estimator)?;
    let mut ghz_opt = qfi_time_limited(&d.signal, &ghz, &ghz_phases, t_l, &config.time_grid)?;
    ghz_opt.qfi *= factor2;
    ghz_opt.qfi_se *= factor2;

    // worst sampled source fixed in place: exp(-2 V t²) with V = Σ σ_j² ⟨n_j,k⟩²
    let worst = if config.estimator == Estimator::Conditional {
        phases.max_phase_variance()
    } else {
        phase_samples(&config.noise, &model, &d.array, &d.probe, config.samples, config.seed, Estimator::Conditional)?
            .max_phase_variance()
    };
    let t_opt = if worst > 0.0 {
        1.0 / (2.0 * std::f64::consts::SQRT_2 * worst.sqrt())
    } else {
        f64::INFINITY
    };

    Ok(QfiReport {
        qfi: opt.qfi,
        qfi_se: opt.qfi_se,
        time_used: opt.t,
        time_limit: t_l,
        rate: opt.qfi / t_l,
        t_opt,
        baselines: Baselines {
            ghz_qfi: ghz_opt.qfi,
            ghz_qfi_se: ghz_opt.qfi_se,
            ghz_time: ghz_opt.t,
            separable_bound: separable_bound(&d.signal, t_l).qfi,
        },
    })
}

/// Names of the shipped presets.
pub const PRESET_NAMES: &[&str] = &[
    "table1_square_lattice",
    "table1_direction",
    "table1_direction_first_order",
    "table1_outside",
    "table1_cylinder",
    "fig2a_sphere",
    "fig2b_square",
    "fig3_maps",
    "fig4_scaling",
    "fig5_honeycomb",
    "fig5_honeycomb_skew",
    "appendixA_line",
    "appendixE_rank",
];

fn preset_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "table1_square_lattice" => include_str!("../presets/table1_square_lattice.json"),
        "table1_direction" => include_str!("../presets/table1_direction.json"),
        "table1_direction_first_order" => include_str!("../presets/table1_direction_first_order.json"),
        "table1_outside" => include_str!("../presets/table1_outside.json"),
        "table1_cylinder" => include_str!("../presets/table1_cylinder.json"),
        "fig2a_sphere" => include_str!("../presets/fig2a_sphere.json"),
        "fig2b_square" => include_str!("../presets/fig2b_square.json"),
        "fig3_maps" => include_str!("../presets/fig3_maps.json"),
        "fig4_scaling" => include_str!("../presets/fig4_scaling.json"),
        "fig5_honeycomb" => include_str!("../presets/fig5_honeycomb.json"),
        "fig5_honeycomb_skew" => include_str!("../presets/fig5_honeycomb_skew.json"),
        "appendixA_line" => include_str!("../presets/appendixA_line.json"),
        "appendixE_rank" => include_str!("../presets/appendixE_rank.json"),
        _ => return None,
    })
}

/// Load a shipped preset by name.
pub fn preset(name: &str) -> Result<ScenarioConfig> {
    let text = preset_text(name).ok_or_else(|| {
        Error::config(
            "preset",
            format!("unknown preset `{name}`; available: {}", PRESET_NAMES.join(", ")),
        )
    })?;
    ScenarioConfig::from_json(text).map_err(|e| match e {
        Error::Config { path, message } => Error::config(format!("{name}:{path}"), message),
        other => other,
    })
}
