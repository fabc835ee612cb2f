//! Decoherence parameter `d_t`, quantum Fisher information of the reduced
//! qubit, optimal interrogation times and a full Hilbert-space oracle.
//!
//! Inside the two-dimensional probe subspace the dynamics is that of a single
//! qubit, so `F_t = 4⟨s,k⟩² t² |d_t|²` with
//! `d_t = E[exp(-2i Σ_j β_j ⟨n_j, k⟩ t)]`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{projected_amplitude, sampling_vector, FieldModel, Position, SamplingVector, SensorArray};
use crate::noise::{NoiseDistribution, NoiseSample, StrengthLaw};
use crate::numerics::{gaussian_expectation_nodes, golden_max, logspace, moving_average, stream_rng, with_workers};
use crate::probe::{flip_schedule, ProbeMetrics, ProbeState};

const CHUNK: usize = 4096;

/// `|d_t|` for one fixed source with Gaussian strength of standard deviation
/// `sigma`: `exp(-2 σ² ⟨n,k⟩² t²)`, independent of the strength mean.
pub fn decoherence_closed_form(n: &SamplingVector, k: &ProbeState, sigma: f64, t: f64) -> f64 {
    let nk = n.dot(k.as_vector());
    (-2.0 * sigma * sigma * nk * nk * t * t).exp()
}

/// Monte Carlo estimate of `d_t` with per-component standard errors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecoherenceEstimate {
    pub re: f64,
    pub im: f64,
    pub se_re: f64,
    pub se_im: f64,
    /// Standard error of `|d|` by the delta method.
    pub se_abs: f64,
}

impl DecoherenceEstimate {
    pub fn exact(value: Complex64) -> Self {
        DecoherenceEstimate {
            re: value.re,
            im: value.im,
            se_re: 0.0,
            se_im: 0.0,
            se_abs: 0.0,
        }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn modulus(&self) -> f64 {
        self.value().norm()
    }
}

/// How the strength integral inside `d_t` is evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    /// Sample strength and position; average `exp(-2i Σ β⟨n,k⟩ t)`.
    #[default]
    Plain,
    /// Sample positions only and integrate the Gaussian strength in closed
    /// form. Same expectation, no strength variance.
    Conditional,
}

/// Per-draw phase statistics: `d_t = mean_w exp(-2i M_w t - 2 V_w t²)`.
///
/// For the plain estimator `V_w = 0` and `M_w = Σ_j β_j ⟨n_j,k⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSamples {
    mean: Vec<f64>,
    var: Vec<f64>,
    max_abs_projection: f64,
}

impl PhaseSamples {
    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }

    /// Largest `|⟨n(x),k⟩|` over the sampled positions.
    pub fn max_abs_projection(&self) -> f64 {
        self.max_abs_projection
    }

    /// Largest per-draw phase variance `V_w` (zero for the plain estimator).
    pub fn max_phase_variance(&self) -> f64 {
        self.var.iter().cloned().fold(0.0, f64::max)
    }

    pub fn decoherence(&self, t: f64) -> DecoherenceEstimate {
        let m = self.mean.len();
        // fixed chunking, then an ordered sum: bit-stable for any worker count
        let parts: Vec<[f64; 5]> = self
            .mean
            .par_chunks(CHUNK)
            .zip(self.var.par_chunks(CHUNK))
            .map(|(mc, vc)| {
                let mut acc = [0.0; 5];
                for (&mw, &vw) in mc.iter().zip(vc) {
                    let amp = (-2.0 * vw * t * t).exp();
                    let (s, c) = (-2.0 * mw * t).sin_cos();
                    let (re, im) = (amp * c, amp * s);
                    acc[0] += re;
                    acc[1] += im;
                    acc[2] += re * re;
                    acc[3] += im * im;
                    acc[4] += re * im;
                }
                acc
            })
            .collect();
        let mut tot = [0.0; 5];
        for p in &parts {
            for i in 0..5 {
                tot[i] += p[i];
            }
        }
        let mf = m as f64;
        let (re, im) = (tot[0] / mf, tot[1] / mf);
        let denom = (mf - 1.0).max(1.0);
        let var_re = ((tot[2] - mf * re * re) / denom).max(0.0);
        let var_im = ((tot[3] - mf * im * im) / denom).max(0.0);
        let cov = (tot[4] - mf * re * im) / denom;
        let abs = (re * re + im * im).sqrt();
        let se_abs = if abs > 0.0 {
            ((re * re * var_re + im * im * var_im + 2.0 * re * im * cov).max(0.0) / mf).sqrt() / abs
        } else {
            ((var_re + var_im) / mf).sqrt()
        };
        DecoherenceEstimate {
            re,
            im,
            se_re: (var_re / mf).sqrt(),
            se_im: (var_im / mf).sqrt(),
            se_abs,
        }
    }
}

/// Draw `samples` noise configurations and reduce each to its phase
/// statistics against probe `k`.
pub fn phase_samples(
    dist: &NoiseDistribution,
    model: &FieldModel,
    array: &SensorArray,
    k: &ProbeState,
    samples: usize,
    seed: u64,
    estimator: Estimator,
) -> Result<PhaseSamples> {
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    dist.validate()?;
    if dist.dim() != array.dim() {
        return Err(Error::DimensionMismatch {
            expected: array.dim(),
            got: dist.dim(),
        });
    }
    if k.len() != array.len() {
        return Err(Error::DimensionMismatch {
            expected: array.len(),
            got: k.len(),
        });
    }
    let kv = k.as_vector();
    let rows: Vec<(f64, f64, f64)> = with_workers(|| {
        (0..samples as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream_rng(seed, i);
                let (mut m, mut v, mut peak) = (0.0, 0.0, 0.0f64);
                match estimator {
                    Estimator::Plain => {
                        for s in dist.draw(&mut rng)? {
                            let a = projected_amplitude(model, &s.position, array, kv)?;
                            m += s.beta * a;
                            peak = peak.max(a.abs());
                        }
                    }
                    Estimator::Conditional => {
                        for s in dist.draw_conditional(&mut rng)? {
                            let a = projected_amplitude(model, &s.position, array, kv)?;
                            m += s.beta_mean * a;
                            v += s.beta_var * a * a;
                            peak = peak.max(a.abs());
                        }
                    }
                }
                Ok((m, v, peak))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let max_abs_projection = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    Ok(PhaseSamples {
        mean: rows.iter().map(|r| r.0).collect(),
        var: rows.iter().map(|r| r.1).collect(),
        max_abs_projection,
    })
}

/// Plain Monte Carlo estimate of `d_t`.
pub fn decoherence_mc(
    dist: &NoiseDistribution,
    model: &FieldModel,
    array: &SensorArray,
    k: &ProbeState,
    t: f64,
    samples: usize,
    seed: u64,
) -> Result<DecoherenceEstimate> {
    Ok(phase_samples(dist, model, array, k, samples, seed, Estimator::Plain)?.decoherence(t))
}

/// `F_t = 4⟨s,k⟩² t² |d|²`.
pub fn qfi(s: &SamplingVector, k: &ProbeState, t: f64, d: Complex64) -> f64 {
    let sk = s.dot(k.as_vector());
    4.0 * sk * sk * t * t * d.norm_sqr()
}

/// Independent local dephasing probabilities `p_i ∈ [0, 0.5]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DephasingSpec {
    p: Vec<f64>,
}

impl DephasingSpec {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if let Some(bad) = p.iter().find(|x| !(0.0..=0.5).contains(*x)) {
            return Err(Error::InvalidArgument(format!("dephasing probability {bad} outside [0, 0.5]")));
        }
        Ok(DephasingSpec { p })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    /// Coherence factor `∏ (1 - 2 p_i)`.
    pub fn factor(&self) -> f64 {
        self.p.iter().map(|p| 1.0 - 2.0 * p).product()
    }
}

impl TryFrom<Vec<f64>> for DephasingSpec {
    type Error = Error;
    fn try_from(p: Vec<f64>) -> Result<Self> {
        DephasingSpec::new(p)
    }
}

impl From<DephasingSpec> for Vec<f64> {
    fn from(d: DephasingSpec) -> Vec<f64> {
        d.p
    }
}

pub fn qfi_with_dephasing(s: &SamplingVector, k: &ProbeState, t: f64, d: Complex64, spec: &DephasingSpec) -> Result<f64> {
    if spec.p.len() != k.len() {
        return Err(Error::DimensionMismatch {
            expected: k.len(),
            got: spec.p.len(),
        });
    }
    Ok(qfi(s, k, t, d * spec.factor()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateOptimum {
    pub rate: f64,
    pub t_opt: f64,
}

/// Optimal time `t_o = 1/(2√2 σ |⟨n,k⟩|)` and QFI rate `R = 4⟨s,k⟩² t_o/√e`
/// for a fixed source with Gaussian strength.
pub fn qfi_rate_and_topt(s: &SamplingVector, n: &SamplingVector, k: &ProbeState, sigma: f64) -> Result<RateOptimum> {
    let nk = n.dot(k.as_vector());
    rate_from_projections(s.dot(k.as_vector()), nk, sigma)
}

pub(crate) fn rate_from_projections(sk: f64, nk: f64, sigma: f64) -> Result<RateOptimum> {
    if nk == 0.0 || sigma == 0.0 {
        return Err(Error::InfiniteOptimum);
    }
    let t_opt = 1.0 / (2.0 * std::f64::consts::SQRT_2 * sigma * nk.abs());
    Ok(RateOptimum {
        rate: 4.0 * sk * sk * t_opt / std::f64::consts::E.sqrt(),
        t_opt,
    })
}

/// The same optimum written through `S`, `δ`, `s̄` and `n̄`.
pub fn rate_from_metrics(m: &ProbeMetrics, n_qubits: usize, sigma: f64) -> Result<RateOptimum> {
    if !m.delta.is_finite() || m.signal_silenced {
        return Err(Error::InfiniteOptimum);
    }
    let nf = n_qubits as f64;
    let sqrt2 = std::f64::consts::SQRT_2;
    let sqrt_e = std::f64::consts::E.sqrt();
    Ok(RateOptimum {
        rate: sqrt2 * nf * m.sensitivity * m.delta * m.s_bar * m.s_bar / (sigma * sqrt_e * m.n_bar),
        t_opt: m.delta / (2.0 * sqrt2 * nf * m.sensitivity * m.n_bar * sigma),
    })
}

/// Log-spaced search grid for `max_{t ≤ t_l} (t_l/t) F_t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub points: usize,
    /// Smallest grid time as a fraction of `t_l`.
    pub lower_fraction: f64,
    /// Moving-average window applied before locating the grid maximum.
    pub window: usize,
}

impl Default for TimeGrid {
    fn default() -> Self {
        TimeGrid {
            points: 200,
            lower_fraction: 1e-8,
            window: 5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeOptimum {
    /// Duration of a single run.
    pub t: f64,
    /// Accumulated QFI `(t_l/t) F_t`.
    pub qfi: f64,
    pub qfi_se: f64,
    /// Golden-section refinement was accepted over the grid maximum.
    pub refined: bool,
}

/// Maximize `(t_l/t) F_t` over `t ∈ (0, t_l]`, where `eval(t)` returns `F_t`
/// and its standard error.
///
/// Assumes the objective is unimodal around the grid maximum; if the refined
/// value disagrees with the grid value by more than 1% the grid point wins.
pub fn maximize_time_limited(t_l: f64, grid: &TimeGrid, eval: impl Fn(f64) -> (f64, f64)) -> Result<TimeOptimum> {
    if !(t_l > 0.0 && t_l.is_finite()) {
        return Err(Error::InvalidArgument(format!("time limit must be positive, got {t_l}")));
    }
    let ts = logspace(t_l * grid.lower_fraction, t_l, grid.points.max(3));
    let obj = |t: f64| {
        let (f, se) = eval(t);
        (t_l / t * f, t_l / t * se)
    };
    let raw: Vec<(f64, f64)> = ts.iter().map(|&t| obj(t)).collect();
    let values: Vec<f64> = raw.iter().map(|r| r.0).collect();
    let smooth = moving_average(&values, grid.window.max(1));
    let best = (0..ts.len()).fold(0, |b, i| if smooth[i] > smooth[b] { i } else { b });
    let grid_opt = TimeOptimum {
        t: ts[best],
        qfi: raw[best].0,
        qfi_se: raw[best].1,
        refined: false,
    };
    let lo = ts[best.saturating_sub(1)];
    let hi = ts[(best + 1).min(ts.len() - 1)];
    let (tr, fr) = golden_max(lo.ln(), hi.ln(), 1e-10, 200, |u| obj(u.exp()).0);
    let tr = tr.exp();
    if fr > grid_opt.qfi && (fr - grid_opt.qfi) <= 0.01 * grid_opt.qfi.abs() {
        let (_, se) = obj(tr);
        return Ok(TimeOptimum {
            t: tr,
            qfi: fr,
            qfi_se: se,
            refined: true,
        });
    }
    Ok(grid_opt)
}

/// Time-limited QFI of probe `k` from precomputed phase samples.
pub fn qfi_time_limited(s: &SamplingVector, k: &ProbeState, phases: &PhaseSamples, t_l: f64, grid: &TimeGrid) -> Result<TimeOptimum> {
    let sk = s.dot(k.as_vector());
    maximize_time_limited(t_l, grid, |t| {
        let d = phases.decoherence(t);
        let f = 4.0 * sk * sk * t * t;
        (f * d.modulus().powi(2), f * 2.0 * d.modulus() * d.se_abs)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparableBound {
    pub qfi: f64,
    /// `S_sep = √⟨s,s⟩ / (s̄ √N)`.
    pub sensitivity: f64,
}

/// Noiseless QFI bound for separable probes, `4⟨s,s⟩t²`.
pub fn separable_bound(s: &SamplingVector, t: f64) -> SeparableBound {
    let ss = s.dot(s.as_vector());
    let n = s.len() as f64;
    let s_bar = s.mean_abs();
    SeparableBound {
        qfi: 4.0 * ss * t * t,
        sensitivity: if s_bar == 0.0 { 0.0 } else { ss.sqrt() / (s_bar * n.sqrt()) },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Baselines {
    pub ghz_qfi: f64,
    pub ghz_qfi_se: f64,
    pub ghz_time: f64,
    pub separable_bound: f64,
}

/// Time-limited QFI of a designed probe alongside its baselines.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QfiReport {
    pub qfi: f64,
    pub qfi_se: f64,
    /// Duration of one run at the optimum.
    pub time_used: f64,
    pub time_limit: f64,
    /// Accumulated QFI per unit total time, `qfi / t_l`.
    pub rate: f64,
    /// Analytic optimal time against the strongest sampled noise projection.
    #[serde(with = "crate::report::extended_float")]
    pub t_opt: f64,
    pub baselines: Baselines,
}

/// Discrete noise law: weighted atoms, each a full configuration of sources.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteNoise {
    atoms: Vec<(f64, Vec<NoiseSample>)>,
}

impl DiscreteNoise {
    /// No noise at all: one atom with no sources.
    pub fn silent() -> Self {
        DiscreteNoise {
            atoms: vec![(1.0, Vec::new())],
        }
    }

    pub fn from_atoms(atoms: Vec<(f64, Vec<NoiseSample>)>) -> Result<Self> {
        let total: f64 = atoms.iter().map(|a| a.0).sum();
        if atoms.is_empty() || atoms.iter().any(|a| a.0 < 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument("atom weights must be nonnegative and sum to 1".into()));
        }
        Ok(DiscreteNoise { atoms })
    }

    /// A single source whose position takes the weighted values `positions`
    /// and whose strength is Gauss–Hermite discretized with `nodes` points.
    pub fn gaussian_strength(positions: &[(Position, f64)], strength: StrengthLaw, nodes: usize) -> Result<Self> {
        let (betas, weights) = if strength.sd == 0.0 {
            (vec![strength.mean], vec![1.0])
        } else {
            gaussian_expectation_nodes(strength.mean, strength.sd, nodes)
        };
        let pw: f64 = positions.iter().map(|p| p.1).sum();
        let mut atoms = Vec::with_capacity(positions.len() * betas.len());
        for &(position, wp) in positions {
            for (&beta, &wb) in betas.iter().zip(&weights) {
                atoms.push((wp / pw * wb, vec![NoiseSample { beta, position }]));
            }
        }
        DiscreteNoise::from_atoms(atoms)
    }

    /// Law of two independent discrete sources acting together.
    pub fn and(&self, other: &DiscreteNoise) -> Self {
        let mut atoms = Vec::with_capacity(self.atoms.len() * other.atoms.len());
        for (wa, a) in &self.atoms {
            for (wb, b) in &other.atoms {
                let mut src = a.clone();
                src.extend_from_slice(b);
                atoms.push((wa * wb, src));
            }
        }
        DiscreteNoise { atoms }
    }

    pub fn atoms(&self) -> &[(f64, Vec<NoiseSample>)] {
        &self.atoms
    }

    /// Exact weighted sum for `d_t`.
    pub fn decoherence(&self, model: &FieldModel, array: &SensorArray, k: &ProbeState, t: f64) -> Result<Complex64> {
        let mut d = Complex64::new(0.0, 0.0);
        for (w, sources) in &self.atoms {
            let mut phase = 0.0;
            for s in sources {
                phase += s.beta * projected_amplitude(model, &s.position, array, k.as_vector())?;
            }
            d += Complex64::from_polar(*w, -2.0 * phase * t);
        }
        Ok(d)
    }
}

const MAX_ORACLE_QUBITS: usize = 4;
const MAX_ORACLE_ATOMS: usize = 1000;

/// Mixed-state QFI of the full `2^N`-dimensional register.
///
/// Each atom evolves `|φ_k⁺⟩` exactly under `H = Σ_i (α s_i + Σ_j β_j n_{j,i}) σ_z^i`
/// with `σ_x` flips at the scheduled times. With `ρ = Σ_w p_w |ψ_w⟩⟨ψ_w|` and
/// `∂ρ = ∂_α ρ` at `α = 0`, `F = 2 Σ_{ij} |⟨i|∂ρ|j⟩|² / (λ_i + λ_j)`, which
/// equals the commutator form with generator `A`.
pub fn brute_force_qfi(
    model: &FieldModel,
    array: &SensorArray,
    signal: &Position,
    k: &ProbeState,
    noise: &DiscreteNoise,
    t: f64,
) -> Result<f64> {
    let n = array.len();
    if n > MAX_ORACLE_QUBITS {
        return Err(Error::DimensionTooLarge(n));
    }
    if k.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: k.len() });
    }
    if noise.atoms.len() > MAX_ORACLE_ATOMS {
        return Err(Error::InvalidArgument(format!(
            "oracle accepts at most {MAX_ORACLE_ATOMS} atoms, got {}",
            noise.atoms.len()
        )));
    }
    let dim = 1usize << n;
    let s = sampling_vector(model, signal, array)?;

    // initial |k⟩ + |-k⟩ with bit i = 1 meaning σ_z = -1
    let label = k.basis_label();
    let up: usize = (0..n).filter(|&i| label[i] < 0).map(|i| 1 << i).sum();
    let down = up ^ (dim - 1);

    let mut flips = flip_schedule(k, t);
    flips.sort_by(|a, b| a.time.total_cmp(&b.time));
    let mut segments = Vec::new();
    let mut prev = 0.0;
    for f in &flips {
        segments.push((f.time - prev, Some(f.qubit)));
        prev = f.time;
    }
    segments.push((t - prev, None));

    let z = |b: usize, i: usize| if b >> i & 1 == 0 { 1.0 } else { -1.0 };
    let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
    let mut drho = DMatrix::<Complex64>::zeros(dim, dim);
    let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    for (w, sources) in &noise.atoms {
        let mut h = vec![0.0; n];
        for src in sources {
            let nv = sampling_vector(model, &src.position, array)?;
            for i in 0..n {
                h[i] += src.beta * nv[i];
            }
        }
        let mut psi = vec![Complex64::new(0.0, 0.0); dim];
        let mut dpsi = psi.clone();
        psi[up] = amp;
        psi[down] = amp;
        for &(dt, flip) in &segments {
            for b in 0..dim {
                let energy: f64 = (0..n).map(|i| h[i] * z(b, i)).sum();
                let gen: f64 = (0..n).map(|i| s[i] * z(b, i)).sum();
                let u = Complex64::from_polar(1.0, -energy * dt);
                // d/dα of exp(-i (E + α G) dt) at α = 0
                let du = u * Complex64::new(0.0, -gen * dt);
                dpsi[b] = du * psi[b] + u * dpsi[b];
                psi[b] *= u;
            }
            if let Some(q) = flip {
                let mask = 1 << q;
                for b in 0..dim {
                    if b & mask == 0 {
                        psi.swap(b, b | mask);
                        dpsi.swap(b, b | mask);
                    }
                }
            }
        }
        for a in 0..dim {
            for b in 0..dim {
                rho[(a, b)] += psi[a] * psi[b].conj() * *w;
                drho[(a, b)] += (dpsi[a] * psi[b].conj() + psi[a] * dpsi[b].conj()) * *w;
            }
        }
    }

    let eig = SymmetricEigen::new(rho);
    let v = &eig.eigenvectors;
    let dr = v.adjoint() * drho * v;
    let mut f = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let lsum = eig.eigenvalues[i] + eig.eigenvalues[j];
            if lsum >= 1e-14 {
                f += 2.0 * dr[(i, j)].norm_sqr() / lsum;
            }
        }
    }
    Ok(f)
}

/// Compare the reduced-qubit QFI with [`brute_force_qfi`] on randomized
/// two- and three-qubit scenarios with discretized noise. Returns the worst
/// relative difference, or `OracleMismatch` above `1e-8`.
pub fn self_check() -> Result<f64> {
    use rand::Rng;
    let model = FieldModel::coulomb();
    let mut worst = 0.0f64;
    for case in 0..10u64 {
        let mut rng = stream_rng(0x5e1f, case);
        let n = 2 + (case % 2) as usize;
        let pos = |r: f64, rng: &mut rand_chacha::ChaCha8Rng| {
            let a = rng.random_range(0.0..std::f64::consts::TAU);
            Position::xy(r * a.cos(), r * a.sin())
        };
        let array = SensorArray::new((0..n).map(|i| pos(0.4 + 0.5 * i as f64, &mut rng)).collect())?;
        let signal = pos(2.0, &mut rng);
        let mut k: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        k[0] = 1.0;
        let k = ProbeState::from_slice(&k)?;
        let sources: Vec<(Position, f64)> = (0..3).map(|i| (pos(2.5 + 0.3 * i as f64, &mut rng), 1.0 / 3.0)).collect();
        let noise = DiscreteNoise::gaussian_strength(&sources, StrengthLaw { mean: 0.2, sd: 0.7 }, 12)?;
        let t = rng.random_range(0.2..2.0);
        let s = sampling_vector(&model, &signal, &array)?;
        let engine = qfi(&s, &k, t, noise.decoherence(&model, &array, &k, t)?);
        let oracle = brute_force_qfi(&model, &array, &signal, &k, &noise, t)?;
        let rel = (engine - oracle).abs() / oracle.abs().max(f64::MIN_POSITIVE);
        if rel > 1e-8 {
            return Err(Error::OracleMismatch(format!("case {case}: engine {engine:e}, oracle {oracle:e}")));
        }
        worst = worst.max(rel);
    }
    Ok(worst)
}
