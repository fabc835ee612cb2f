//! Probe vectors `k`: exact decoherence-free constructions, geometric
//! perfect-protection pairs and mirror arrangements, approximate silencers,
//! plus the scalar figures of merit `s̄`, `n̄`, `S` and `δ`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{sampling_map_jacobian, sampling_vector, FieldModel, Position, SamplingVector, SensorArray, SourcePoint};

/// Relative singular-value cutoff shared by every subspace construction.
pub const RANK_TOL: f64 = 1e-12;

const SIGNAL_RESIDUAL_TOL: f64 = 1e-10;
const DFS_TOL: f64 = 1e-14;

/// GHZ-type probe `|φ_k⁺⟩` with effective weights `k ∈ [-1, 1]^N`.
///
/// Entries with `|k_i| < 1` are realized by a mid-evolution spin flip. The
/// sign of `k_i` selects the computational-basis label of qubit `i` and the
/// magnitude fixes the flip time (see [`flip_schedule`]).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbeState {
    k: DVector<f64>,
}

impl ProbeState {
    pub fn new(k: DVector<f64>) -> Result<Self> {
        if k.is_empty() {
            return Err(Error::InvalidProbe("empty probe vector".into()));
        }
        if k.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidProbe("non-finite entry".into()));
        }
        let inf = k.amax();
        if inf > 1.0 + 1e-12 {
            return Err(Error::InvalidProbe(format!("|k|_inf = {inf} exceeds 1")));
        }
        if inf == 0.0 {
            return Err(Error::InvalidProbe("zero vector".into()));
        }
        Ok(ProbeState { k })
    }

    pub fn from_slice(k: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(k))
    }

    /// All-ones probe: the plain GHZ state with no flips.
    pub fn ghz(n: usize) -> Self {
        ProbeState {
            k: DVector::from_element(n, 1.0),
        }
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.k
    }

    /// Computational-basis label `±1` of each qubit in `|k⟩`.
    pub fn basis_label(&self) -> Vec<i8> {
        self.k.iter().map(|&x| if x < 0.0 { -1 } else { 1 }).collect()
    }
}

impl TryFrom<Vec<f64>> for ProbeState {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        ProbeState::new(DVector::from_vec(v))
    }
}

impl From<ProbeState> for Vec<f64> {
    fn from(p: ProbeState) -> Vec<f64> {
        p.k.as_slice().to_vec()
    }
}

/// Orthonormal basis of a subspace `Z ⊊ ℝ^N` the probe is made blind to.
#[derive(Clone, Debug, PartialEq)]
pub struct InsensitiveSubspace {
    basis: DMatrix<f64>,
    singular_values: Vec<f64>,
}

impl InsensitiveSubspace {
    pub fn empty(n: usize) -> Self {
        InsensitiveSubspace {
            basis: DMatrix::zeros(n, 0),
            singular_values: Vec::new(),
        }
    }

    /// Ambient dimension `N`.
    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Singular values of the generating vectors that survived the cutoff.
    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn project(&self, v: &DVector<f64>) -> DVector<f64> {
        if self.dim() == 0 {
            return DVector::zeros(v.len());
        }
        &self.basis * (self.basis.transpose() * v)
    }

    /// `(1 - P_Z) v`, applied twice to wash out rounding in the basis.
    pub fn reject(&self, v: &DVector<f64>) -> DVector<f64> {
        let once = v - self.project(v);
        &once - self.project(&once)
    }
}

/// Numerical column span of `columns`: left singular vectors whose singular
/// value exceeds `rel_tol · σ_max`. Returns the basis and all singular values.
pub fn numerical_span(columns: &DMatrix<f64>, rel_tol: f64) -> (DMatrix<f64>, Vec<f64>) {
    let n = columns.nrows();
    if columns.ncols() == 0 || n == 0 {
        return (DMatrix::zeros(n, 0), Vec::new());
    }
    let svd = columns.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return (DMatrix::zeros(n, 0), sv);
    }
    let keep: Vec<usize> = (0..sv.len()).filter(|&i| sv[i] > rel_tol * smax).collect();
    let mut basis = DMatrix::zeros(n, keep.len());
    for (j, &i) in keep.iter().enumerate() {
        basis.set_column(j, &u.column(i));
    }
    (basis, sv)
}

pub fn insensitive_subspace(noise_vectors: &[SamplingVector]) -> Result<InsensitiveSubspace> {
    let first = noise_vectors
        .first()
        .ok_or_else(|| Error::InvalidArgument("insensitive subspace needs at least one noise vector".into()))?;
    let n = first.len();
    let mut m = DMatrix::zeros(n, noise_vectors.len());
    for (j, v) in noise_vectors.iter().enumerate() {
        if v.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: v.len() });
        }
        m.set_column(j, v.as_vector());
    }
    subspace_from_columns(&m)
}

fn subspace_from_columns(m: &DMatrix<f64>) -> Result<InsensitiveSubspace> {
    let n = m.nrows();
    let (basis, sv) = numerical_span(m, RANK_TOL);
    if basis.ncols() >= n {
        return Err(Error::NoiseSpansFullSpace { rank: basis.ncols(), n });
    }
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let kept = sv.into_iter().filter(|&x| x > RANK_TOL * smax).collect();
    Ok(InsensitiveSubspace {
        basis,
        singular_values: kept,
    })
}

/// How the projected signal is scaled into `[-1, 1]^N`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `k = s⊥ / ‖s⊥‖∞`.
    #[default]
    Infinity,
    /// Maximize `⟨s, k⟩` over `k ∈ Z⊥`, `‖k‖∞ ≤ 1` by linear programming.
    LpOptimal,
}

/// `k = s⊥ / ‖s⊥‖∞` with `s⊥ = (1 - P_Z) s`.
pub fn design_probe(s: &SamplingVector, z: &InsensitiveSubspace) -> Result<ProbeState> {
    design_probe_with(s, z, Normalization::Infinity)
}

pub fn design_probe_with(s: &SamplingVector, z: &InsensitiveSubspace, mode: Normalization) -> Result<ProbeState> {
    if s.len() != z.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: z.ambient_dim(),
            got: s.len(),
        });
    }
    let s_inf = s.amax();
    if s_inf == 0.0 {
        return Err(Error::SignalInNoiseSpace { residual: 0.0 });
    }
    let perp = z.reject(s.as_vector());
    let ratio = perp.amax() / s_inf;
    if ratio < SIGNAL_RESIDUAL_TOL {
        return Err(Error::SignalInNoiseSpace { residual: ratio });
    }
    match mode {
        Normalization::Infinity => {
            let k = &perp / perp.amax();
            Ok(ProbeState { k })
        }
        Normalization::LpOptimal => lp_optimal_probe(s.as_vector(), z),
    }
}

fn lp_optimal_probe(s: &DVector<f64>, z: &InsensitiveSubspace) -> Result<ProbeState> {
    use minilp::{ComparisonOp, OptimizationDirection, Problem};

    let n = s.len();
    // Scale the objective so the solver's absolute tolerances are meaningful.
    let scale = 1.0 / s.amax();
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = (0..n).map(|i| lp.add_var(s[i] * scale, (-1.0, 1.0))).collect();
    for c in 0..z.dim() {
        let col = z.basis().column(c);
        let terms: Vec<_> = vars.iter().zip(col.iter()).map(|(&v, &a)| (v, a)).collect();
        lp.add_constraint(&terms[..], ComparisonOp::Eq, 0.0);
    }
    let sol = lp.solve().map_err(|e| Error::LinearProgram(e.to_string()))?;
    let raw = DVector::from_iterator(n, vars.iter().map(|&v| sol[v]));
    let k = z.reject(&raw);
    let inf = k.amax();
    if inf == 0.0 || k.dot(s).abs() < SIGNAL_RESIDUAL_TOL * s.norm() {
        return Err(Error::SignalInNoiseSpace { residual: 0.0 });
    }
    let k = if inf > 1.0 { k / inf } else { k };
    Ok(ProbeState { k })
}

/// Signal strength, retained sensitivity and signal-to-noise ratio of a probe
/// against one noise vector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeMetrics {
    pub s_bar: f64,
    pub n_bar: f64,
    pub sensitivity: f64,
    /// `+∞` for an exactly silenced noise vector.
    #[serde(with = "crate::report::extended_float")]
    pub delta: f64,
    /// Both `⟨s,k⟩` and `⟨n,k⟩` vanish; `delta` is reported as 0.
    pub signal_silenced: bool,
}

pub fn probe_metrics(s: &SamplingVector, n: &SamplingVector, k: &ProbeState) -> Result<ProbeMetrics> {
    let len = k.len();
    if s.len() != len || n.len() != len {
        return Err(Error::DimensionMismatch {
            expected: len,
            got: if s.len() != len { s.len() } else { n.len() },
        });
    }
    let kv = k.as_vector();
    let s_bar = s.mean_abs();
    let n_bar = n.mean_abs();
    let sk = s.dot(kv);
    let nk = n.dot(kv);
    let sensitivity = if s_bar == 0.0 { 0.0 } else { sk.abs() / (s_bar * len as f64) };
    let noise_silenced = nk.abs() < DFS_TOL * n.norm() * kv.norm();
    let signal_gone = sk.abs() < DFS_TOL * s.norm() * kv.norm();
    let (delta, signal_silenced) = match (noise_silenced, signal_gone) {
        (true, true) => (0.0, true),
        (true, false) => (f64::INFINITY, false),
        (false, _) => ((sk.abs() / s_bar) * (n_bar / nk.abs()), false),
    };
    Ok(ProbeMetrics {
        s_bar,
        n_bar,
        sensitivity: if signal_silenced { 0.0 } else { sensitivity },
        delta,
        signal_silenced,
    })
}

/// Locus of noise sources a two-sensor probe cannot see.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InsensitiveSurface {
    Sphere { center: Position, radius: f64 },
    /// Perpendicular bisector of the pair (the `c = 1` limit).
    BisectorPlane { point: Position, normal: Position },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuppressingPair {
    pub probe: ProbeState,
    pub surface: InsensitiveSurface,
}

/// Two sensors with `k = (1, -c^η)` are blind to the Apollonius sphere
/// `|x - x2| = c |x - x1|`, for any inverse-power exponent `η`.
pub fn sphere_suppressing_pair(x1: &Position, x2: &Position, c: f64, eta: f64) -> Result<SuppressingPair> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::InvalidRatio(c));
    }
    if !(eta > 0.0) {
        return Err(Error::InvalidArgument(format!("eta must be positive, got {eta}")));
    }
    let l = x1.distance(x2);
    if l == 0.0 {
        return Err(Error::InvalidArgument("sensor pair must be distinct".into()));
    }
    let probe = ProbeState::from_slice(&[1.0, -c.powf(eta)])?;
    let surface = if c == 1.0 {
        InsensitiveSurface::BisectorPlane {
            point: (*x1 + *x2).scale(0.5),
            normal: (*x1 - *x2).scale(1.0 / l),
        }
    } else {
        let c2 = c * c;
        InsensitiveSurface::Sphere {
            center: *x2 - (*x1 - *x2).scale(c2 / (1.0 - c2)),
            radius: l * c / (1.0 - c2),
        }
    };
    Ok(SuppressingPair { probe, surface })
}

/// Alternating probe `k_i = (-1)^i` (0-based), the sensor analogue of image
/// charges; meaningful for arrays whose ordering alternates around a mirror
/// axis, such as the square and hexagon presets.
pub fn mirror_charge_probe(array: &SensorArray) -> ProbeState {
    let k = DVector::from_iterator(array.len(), (0..array.len()).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }));
    ProbeState { k }
}

/// `Z = Image(F_l)`: silences a source to first order around `x0` in both
/// strength and position.
pub fn first_order_silencer(model: &FieldModel, array: &SensorArray, x0: &SourcePoint) -> Result<InsensitiveSubspace> {
    let jac = sampling_map_jacobian(model, array, x0)?;
    subspace_from_columns(&jac)
}

/// Joint first-order silencer for several independent source centers.
pub fn first_order_silencer_multi(
    model: &FieldModel,
    array: &SensorArray,
    centers: &[SourcePoint],
) -> Result<InsensitiveSubspace> {
    if centers.is_empty() {
        return Ok(InsensitiveSubspace::empty(array.len()));
    }
    let cols = array.dim() + 1;
    let mut m = DMatrix::zeros(array.len(), cols * centers.len());
    for (j, c) in centers.iter().enumerate() {
        let jac = sampling_map_jacobian(model, array, c)?;
        m.view_mut((0, j * cols), (array.len(), cols)).copy_from(&jac);
    }
    subspace_from_columns(&m)
}

/// Span of the noise vectors of sources placed at `points`.
pub fn grid_silencer(model: &FieldModel, array: &SensorArray, points: &[Position]) -> Result<InsensitiveSubspace> {
    if points.is_empty() {
        return Ok(InsensitiveSubspace::empty(array.len()));
    }
    let vecs = points
        .iter()
        .map(|p| sampling_vector(model, p, array))
        .collect::<Result<Vec<_>>>()?;
    insensitive_subspace(&vecs)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Flip {
    pub qubit: usize,
    pub time: f64,
}

/// `σ_x` flip times realizing `k` over an evolution of length `t`.
///
/// A qubit flipped at `t_i` accumulates phase with weight
/// `r_i = (t_i - (t - t_i)) / t`; we take `r_i = |k_i|`, i.e.
/// `t_i = t (1 + |k_i|) / 2`. Qubits with `|k_i| = 1` are never flipped.
pub fn flip_schedule(k: &ProbeState, t: f64) -> Vec<Flip> {
    k.as_vector()
        .iter()
        .enumerate()
        .filter(|(_, &x)| x.abs() < 1.0)
        .map(|(qubit, &x)| Flip {
            qubit,
            time: t * (1.0 + x.abs()) / 2.0,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{preset_array, ArrayPreset};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn sv(v: &[f64]) -> SamplingVector {
        SamplingVector::from_vec(v.to_vec())
    }

    #[test]
    fn collinear_noise_gives_one_dimension() {
        let z = insensitive_subspace(&[sv(&[1.0, 0.0]), sv(&[2.0, 0.0])]).unwrap();
        assert_eq!(z.dim(), 1);
        assert_relative_eq!(z.basis()[(0, 0)].abs(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(z.basis()[(1, 0)], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn full_rank_noise_is_rejected() {
        let err = insensitive_subspace(&[sv(&[1.0, 0.0, 0.0]), sv(&[0.0, 1.0, 0.0]), sv(&[1.0, 1.0, 1.0])]).unwrap_err();
        assert_eq!(err, Error::NoiseSpansFullSpace { rank: 3, n: 3 });
        assert!(insensitive_subspace(&[]).is_err());
    }

    #[test]
    fn n_minus_one_sources_give_codimension_one() {
        let arr = preset_array(&ArrayPreset::Hexagon { radius: 1.0 }).unwrap();
        let pts: Vec<_> = (0..5).map(|i| Position::xy(3.0 + i as f64, 0.5 * i as f64)).collect();
        let z = grid_silencer(&FieldModel::coulomb(), &arr, &pts).unwrap();
        assert_eq!(z.dim(), 5);
    }

    #[test]
    fn design_without_noise_is_normalized_signal() {
        let s = sv(&[0.5, -2.0, 1.0]);
        let k = design_probe(&s, &InsensitiveSubspace::empty(3)).unwrap();
        assert_eq!(k.as_vector().as_slice(), &[0.25, -1.0, 0.5]);
    }

    #[test]
    fn design_hand_projection() {
        let z = insensitive_subspace(&[sv(&[1.0, 1.0])]).unwrap();
        let k = design_probe(&sv(&[1.0, 2.0]), &z).unwrap();
        // s⊥ = (1,2) - 1.5 (1,1) = (-0.5, 0.5)
        assert_relative_eq!(k.as_vector()[0], -1.0, epsilon = 1e-15);
        assert_relative_eq!(k.as_vector()[1], 1.0, epsilon = 1e-15);
        assert!(k.as_vector().dot(&DVector::from_vec(vec![1.0, 1.0])).abs() < 1e-15);
    }

    #[test]
    fn signal_inside_noise_space() {
        let z = insensitive_subspace(&[sv(&[1.0, 1.0, 0.0])]).unwrap();
        let err = design_probe(&sv(&[2.0, 2.0, 0.0]), &z).unwrap_err();
        assert!(matches!(err, Error::SignalInNoiseSpace { .. }));
    }

    #[test]
    fn metrics_examples() {
        let s = sv(&[0.3, 1.2, 0.7, 2.0]);
        let m = probe_metrics(&s, &sv(&[1.0, 0.0, 0.0, 0.0]), &ProbeState::ghz(4)).unwrap();
        assert_relative_eq!(m.sensitivity, 1.0, epsilon = 1e-15);

        // s = n with k ⟂ n: both vanish
        let n = sv(&[1.0, 1.0]);
        let k = ProbeState::from_slice(&[1.0, -1.0]).unwrap();
        let m = probe_metrics(&n, &n, &k).unwrap();
        assert!(m.signal_silenced);
        assert_eq!(m.delta, 0.0);
        assert_eq!(m.sensitivity, 0.0);

        // exact DFS probe
        let z = insensitive_subspace(&[sv(&[1.0, 2.0, 3.0])]).unwrap();
        let s = sv(&[1.0, 0.0, 0.5]);
        let k = design_probe(&s, &z).unwrap();
        let m = probe_metrics(&s, &sv(&[1.0, 2.0, 3.0]), &k).unwrap();
        assert!(m.delta.is_infinite());
        let m = probe_metrics(&s, &sv(&[1.0, -1.0, 0.2]), &k).unwrap();
        assert!(m.delta.is_finite() && m.delta > 0.0);
    }

    #[test]
    fn apollonius_example() {
        let pair = sphere_suppressing_pair(&Position::xy(0.0, 1.0), &Position::xy(0.0, 0.0), 0.5, 1.0).unwrap();
        match pair.surface {
            InsensitiveSurface::Sphere { center, radius } => {
                assert_relative_eq!(radius, 2.0 / 3.0, epsilon = 1e-15);
                let f = FieldModel::coulomb();
                let arr = SensorArray::new(vec![Position::xy(0.0, 1.0), Position::xy(0.0, 0.0)]).unwrap();
                for i in 0..100 {
                    let a = 2.0 * std::f64::consts::PI * i as f64 / 100.0;
                    let x = center + Position::xy(radius * a.cos(), radius * a.sin());
                    let n = sampling_vector(&f, &x, &arr).unwrap();
                    assert!(n.dot(pair.probe.as_vector()).abs() < 1e-9);
                }
            }
            other => panic!("expected a sphere, got {other:?}"),
        }
        let plane = sphere_suppressing_pair(&Position::xy(0.0, 1.0), &Position::xy(0.0, 0.0), 1.0, 2.0).unwrap();
        assert!(matches!(plane.surface, InsensitiveSurface::BisectorPlane { .. }));
        assert_eq!(plane.probe.as_vector().as_slice(), &[1.0, -1.0]);
        assert!(matches!(
            sphere_suppressing_pair(&Position::x(0.0), &Position::x(1.0), 1.5, 1.0),
            Err(Error::InvalidRatio(_))
        ));
        assert!(sphere_suppressing_pair(&Position::x(0.0), &Position::x(1.0), 0.0, 1.0).is_err());
    }

    #[test]
    fn fig2a_pair_probe() {
        // k_up = 1, k_down = 0.5 with η = 1 is c = 0.5
        let pair = sphere_suppressing_pair(&Position::xy(0.0, 0.5), &Position::xy(0.0, -0.5), 0.5, 1.0).unwrap();
        assert_eq!(pair.probe.as_vector().as_slice(), &[1.0, -0.5]);
    }

    #[test]
    fn mirror_probe_alternates() {
        let sq = preset_array(&ArrayPreset::Square { side: 2.0 }).unwrap();
        assert_eq!(mirror_charge_probe(&sq).as_vector().as_slice(), &[1.0, -1.0, 1.0, -1.0]);
        let pair = SensorArray::new(vec![Position::xy(-1.0, 0.0), Position::xy(1.0, 0.0)]).unwrap();
        let k = mirror_charge_probe(&pair);
        let n = sampling_vector(&FieldModel::coulomb(), &Position::xy(0.0, 3.7), &pair).unwrap();
        assert_eq!(n.dot(k.as_vector()), 0.0);
    }

    #[test]
    fn first_order_silencer_contains_offset() {
        let arr = preset_array(&ArrayPreset::Cube3 { edge: 1.0 }).unwrap();
        let f = FieldModel::coulomb();
        let x0 = SourcePoint::new(1.0, Position::xyz(0.5, 0.2, 4.0));
        let z = first_order_silencer(&f, &arr, &x0).unwrap();
        assert!(z.dim() <= 4);
        let n0 = sampling_vector(&f, &x0.position, &arr).unwrap();
        assert!(z.reject(n0.as_vector()).norm() < 1e-12 * n0.norm());
    }

    #[test]
    fn first_order_far_source_is_dominated_by_strength() {
        let arr = preset_array(&ArrayPreset::Cube3 { edge: 1.0 }).unwrap();
        let z = first_order_silencer(&FieldModel::coulomb(), &arr, &SourcePoint::new(1.0, Position::xyz(0.0, 0.0, 30.0))).unwrap();
        let sv = z.singular_values();
        let largest = sv.iter().cloned().fold(0.0, f64::max);
        let second = sv.iter().cloned().filter(|&x| x < largest).fold(0.0, f64::max);
        assert!(second < 0.05 * largest, "singular values {sv:?}");
    }

    #[test]
    fn grid_silencer_without_points_keeps_signal() {
        let arr = preset_array(&ArrayPreset::Hexagon { radius: 1.0 }).unwrap();
        let z = grid_silencer(&FieldModel::coulomb(), &arr, &[]).unwrap();
        let s = sampling_vector(&FieldModel::coulomb(), &Position::xy(0.2, 0.1), &arr).unwrap();
        let k = design_probe(&s, &z).unwrap();
        let expect = s.as_vector() / s.amax();
        assert_relative_eq!(k.as_vector(), &expect, epsilon = 1e-15);
    }

    #[test]
    fn flip_schedule_examples() {
        let k = ProbeState::from_slice(&[1.0, 0.0, 0.5, -0.5, -1.0]).unwrap();
        let f = flip_schedule(&k, 8.0);
        assert_eq!(
            f,
            vec![
                Flip { qubit: 1, time: 4.0 },
                Flip { qubit: 2, time: 6.0 },
                Flip { qubit: 3, time: 6.0 }
            ]
        );
        assert_eq!(k.basis_label(), vec![1, 1, 1, -1, -1]);
    }

    #[test]
    fn lp_mode_dominates_infinity_norm() {
        let arr = preset_array(&ArrayPreset::TwoCircles {
            n_inner: 4,
            n_outer: 6,
            r_inner: 1.0,
            r_outer: 2.0,
            outer_phase: 0.5,
            center: Position::origin(2),
        })
        .unwrap();
        let f = FieldModel::coulomb();
        let s = sampling_vector(&f, &Position::xy(-1.25, 0.1), &arr).unwrap();
        let pts = [Position::xy(4.0, 0.0), Position::xy(4.2, 0.3), Position::xy(3.9, -0.2)];
        let z = grid_silencer(&f, &arr, &pts).unwrap();
        let k_inf = design_probe(&s, &z).unwrap();
        let k_lp = design_probe_with(&s, &z, Normalization::LpOptimal).unwrap();
        assert!(k_lp.as_vector().amax() <= 1.0 + 1e-12);
        assert!(s.dot(k_lp.as_vector()) >= s.dot(k_inf.as_vector()).abs() - 1e-9);
        for c in 0..z.dim() {
            assert!(z.basis().column(c).dot(k_lp.as_vector()).abs() < 1e-10);
        }
    }

    fn arb_case() -> impl Strategy<Value = (Vec<f64>, Vec<Vec<f64>>)> {
        (3usize..9).prop_flat_map(|n| {
            (
                prop::collection::vec(-2.0f64..2.0, n),
                prop::collection::vec(prop::collection::vec(-2.0f64..2.0, n), 0..n - 1),
            )
        })
    }

    proptest! {
        #[test]
        fn design_invariants((s, noise) in arb_case()) {
            let s = sv(&s);
            let z = if noise.is_empty() {
                InsensitiveSubspace::empty(s.len())
            } else {
                insensitive_subspace(&noise.iter().map(|v| sv(v)).collect::<Vec<_>>()).unwrap()
            };
            let Ok(k) = design_probe(&s, &z) else { return Ok(()); };
            let kv = k.as_vector();
            prop_assert_eq!(kv.amax(), 1.0);
            for c in 0..z.dim() {
                prop_assert!(z.basis().column(c).dot(kv).abs() <= 1e-10 * kv.norm());
            }
            let again = design_probe(&SamplingVector::from(z.reject(s.as_vector())), &z).unwrap();
            for i in 0..kv.len() {
                prop_assert!((again.as_vector()[i] - kv[i]).abs() < 1e-9);
            }
            // orthonormal basis
            let g = z.basis().transpose() * z.basis();
            for i in 0..z.dim() {
                for j in 0..z.dim() {
                    let e = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((g[(i, j)] - e).abs() < 1e-10);
                }
            }
        }

        #[test]
        fn gauge_scaling_keeps_metrics(c in 0.1f64..10.0) {
            let s = sv(&[0.4, 1.1, -0.3, 0.9]);
            let n = sv(&[1.0, 0.2, 0.5, -0.1]);
            let k = ProbeState::from_slice(&[0.5, -1.0, 0.25, 0.75]).unwrap();
            let a = probe_metrics(&s, &n, &k).unwrap();
            let b = probe_metrics(&s.scaled(c), &n, &k).unwrap();
            prop_assert!((a.sensitivity - b.sensitivity).abs() < 1e-12);
            prop_assert!((a.delta - b.delta).abs() < 1e-12 * a.delta);
        }
    }
}
