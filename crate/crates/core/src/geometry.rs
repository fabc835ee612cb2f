//! Physical space: positions, sensor arrays, scalar field models and the map
//! from a source position to its sampling-space vector.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Deref;

use nalgebra::{DMatrix, DVector};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Minimum source-sensor distance for singular field models.
pub const DEFAULT_EPS_POS: f64 = 1e-12;

/// A point in `D`-dimensional physical space, `D` in `{1, 2, 3}`.
///
/// Unused trailing coordinates are held at zero so distances and dot products
/// never need to branch on the dimension.
#[derive(Clone, Copy, PartialEq)]
pub struct Position {
    coords: [f64; 3],
    dim: usize,
}

impl Position {
    pub fn new(coords: &[f64]) -> Result<Self> {
        if coords.is_empty() || coords.len() > 3 {
            return Err(Error::InvalidPosition(format!(
                "dimension must be 1, 2 or 3 (got {})",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPosition(format!("non-finite coordinate in {coords:?}")));
        }
        let mut c = [0.0; 3];
        c[..coords.len()].copy_from_slice(coords);
        Ok(Position {
            coords: c,
            dim: coords.len(),
        })
    }

    pub fn x(x: f64) -> Self {
        Position {
            coords: [x, 0.0, 0.0],
            dim: 1,
        }
    }

    pub fn xy(x: f64, y: f64) -> Self {
        Position {
            coords: [x, y, 0.0],
            dim: 2,
        }
    }

    pub fn xyz(x: f64, y: f64, z: f64) -> Self {
        Position {
            coords: [x, y, z],
            dim: 3,
        }
    }

    pub fn origin(dim: usize) -> Self {
        Position {
            coords: [0.0; 3],
            dim,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim]
    }

    pub fn coord(&self, axis: usize) -> f64 {
        self.coords[axis]
    }

    pub fn with_coord(mut self, axis: usize, value: f64) -> Self {
        debug_assert!(axis < self.dim);
        self.coords[axis] = value;
        self
    }

    pub fn dot(&self, other: &Position) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(&self, other: &Position) -> f64 {
        (*self - *other).norm()
    }

    pub fn scale(mut self, factor: f64) -> Self {
        for c in &mut self.coords {
            *c *= factor;
        }
        self
    }
}

impl std::ops::Add for Position {
    type Output = Position;
    fn add(mut self, rhs: Position) -> Position {
        for (a, b) in self.coords.iter_mut().zip(rhs.coords) {
            *a += b;
        }
        self.dim = self.dim.max(rhs.dim);
        self
    }
}

impl std::ops::Sub for Position {
    type Output = Position;
    fn sub(mut self, rhs: Position) -> Position {
        for (a, b) in self.coords.iter_mut().zip(rhs.coords) {
            *a -= b;
        }
        self.dim = self.dim.max(rhs.dim);
        self
    }
}

impl fmt::Debug for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords())
    }
}

impl Serialize for Position {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Position {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        Position::new(&v).map_err(D::Error::custom)
    }
}

/// Ordered, duplicate-free list of sensor positions sharing one dimension.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SensorArray {
    positions: Vec<Position>,
}

impl SensorArray {
    pub fn new(positions: Vec<Position>) -> Result<Self> {
        let first = positions
            .first()
            .ok_or_else(|| Error::InvalidArgument("sensor array needs at least one sensor".into()))?;
        let dim = first.dim();
        for p in &positions {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.dim(),
                });
            }
        }
        for i in 0..positions.len() {
            for j in (i + 1)..positions.len() {
                if positions[i].distance(&positions[j]) < DEFAULT_EPS_POS {
                    return Err(Error::DuplicateSensor(i, j));
                }
            }
        }
        Ok(SensorArray { positions })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.positions[0].dim()
    }

    pub fn positions(&self) -> &[Position] {
        &self.positions
    }

    /// Applies `f` to every position; used for scaling and permutation checks.
    pub fn map_positions(&self, f: impl Fn(&Position) -> Position) -> Result<Self> {
        SensorArray::new(self.positions.iter().map(f).collect())
    }
}

impl<'de> Deserialize<'de> for SensorArray {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            positions: Vec<Position>,
        }
        let raw = Raw::deserialize(d)?;
        SensorArray::new(raw.positions).map_err(D::Error::custom)
    }
}

/// Spatial kernel `f(source, sensor)` of a scalar field.
///
/// For [`FieldModel::Periodic`] the source argument is a wavevector rather
/// than a position.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldModel {
    InversePower { eta: f64 },
    Linear,
    Quadratic,
    Periodic { phase: f64 },
}

impl FieldModel {
    pub fn coulomb() -> Self {
        FieldModel::InversePower { eta: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            FieldModel::InversePower { eta } if !(eta > 0.0 && eta.is_finite()) => Err(
                Error::InvalidArgument(format!("inverse-power exponent must be positive, got {eta}")),
            ),
            FieldModel::Periodic { phase } if !phase.is_finite() => {
                Err(Error::InvalidArgument("periodic phase must be finite".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn with_phase(self, phase: f64) -> Self {
        match self {
            FieldModel::Periodic { .. } => FieldModel::Periodic { phase },
            other => other,
        }
    }

    fn eval(&self, source: &Position, sensor: &Position, eps: f64) -> std::result::Result<f64, f64> {
        match *self {
            FieldModel::InversePower { eta } => {
                let r = source.distance(sensor);
                if r < eps {
                    return Err(r);
                }
                Ok(if eta == 1.0 { 1.0 / r } else { r.powf(-eta) })
            }
            FieldModel::Linear => Ok(source.dot(sensor)),
            FieldModel::Quadratic => {
                let d = source.dot(sensor);
                Ok(d * d)
            }
            FieldModel::Periodic { phase } => Ok((source.dot(sensor) + phase).sin()),
        }
    }
}

pub fn field_amplitude(model: &FieldModel, source: &Position, sensor: &Position) -> Result<f64> {
    field_amplitude_with_guard(model, source, sensor, DEFAULT_EPS_POS)
}

pub fn field_amplitude_with_guard(
    model: &FieldModel,
    source: &Position,
    sensor: &Position,
    eps_pos: f64,
) -> Result<f64> {
    model
        .eval(source, sensor, eps_pos)
        .map_err(|distance| Error::CoincidentSourceSensor {
            sensor: 0,
            distance,
        })
}

/// Field amplitudes of one source evaluated at every sensor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SamplingVector(DVector<f64>);

impl SamplingVector {
    pub fn from_vec(v: Vec<f64>) -> Self {
        SamplingVector(DVector::from_vec(v))
    }

    pub fn into_inner(self) -> DVector<f64> {
        self.0
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn l1_norm(&self) -> f64 {
        self.0.iter().map(|x| x.abs()).sum()
    }

    /// Mean absolute amplitude per sensor (`s̄` / `n̄`).
    pub fn mean_abs(&self) -> f64 {
        self.l1_norm() / self.0.len() as f64
    }

    pub fn scaled(&self, factor: f64) -> Self {
        SamplingVector(&self.0 * factor)
    }
}

impl Deref for SamplingVector {
    type Target = DVector<f64>;
    fn deref(&self) -> &DVector<f64> {
        &self.0
    }
}

impl From<DVector<f64>> for SamplingVector {
    fn from(v: DVector<f64>) -> Self {
        SamplingVector(v)
    }
}

pub fn sampling_vector(model: &FieldModel, source: &Position, array: &SensorArray) -> Result<SamplingVector> {
    let mut out = DVector::zeros(array.len());
    for (i, sensor) in array.positions().iter().enumerate() {
        out[i] = model
            .eval(source, sensor, DEFAULT_EPS_POS)
            .map_err(|distance| Error::CoincidentSourceSensor { sensor: i, distance })?;
    }
    Ok(SamplingVector(out))
}

/// Inner product `⟨n(source), k⟩` without allocating the sampling vector.
pub(crate) fn projected_amplitude(
    model: &FieldModel,
    source: &Position,
    array: &SensorArray,
    k: &DVector<f64>,
) -> Result<f64> {
    let mut acc = 0.0;
    for (i, sensor) in array.positions().iter().enumerate() {
        let f = model
            .eval(source, sensor, DEFAULT_EPS_POS)
            .map_err(|distance| Error::CoincidentSourceSensor { sensor: i, distance })?;
        acc += f * k[i];
    }
    Ok(acc)
}

/// Source parameters `(β, x)` around which the sampling map is linearized.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourcePoint {
    pub strength: f64,
    pub position: Position,
}

impl SourcePoint {
    pub fn new(strength: f64, position: Position) -> Self {
        SourcePoint { strength, position }
    }
}

/// Jacobian of `F(β, x) = β (f_1(x), …, f_N(x))` at `x0`, shape `N × (D+1)`.
///
/// Column 0 is the strength derivative, columns `1..=D` the spatial
/// derivatives by central differences with step `1e-6 (1 + |x0|)`.
pub fn sampling_map_jacobian(model: &FieldModel, array: &SensorArray, x0: &SourcePoint) -> Result<DMatrix<f64>> {
    let dim = array.dim();
    if x0.position.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: x0.position.dim(),
        });
    }
    let n = array.len();
    let mut jac = DMatrix::zeros(n, dim + 1);
    let base = sampling_vector(model, &x0.position, array)?;
    jac.set_column(0, &base);
    let h = 1e-6 * (1.0 + x0.position.norm());
    for d in 0..dim {
        let plus = x0.position.with_coord(d, x0.position.coord(d) + h);
        let minus = x0.position.with_coord(d, x0.position.coord(d) - h);
        let fp = sampling_vector(model, &plus, array)?;
        let fm = sampling_vector(model, &minus, array)?;
        let col = (fp.into_inner() - fm.into_inner()) * (x0.strength / (2.0 * h));
        jac.set_column(d + 1, &col);
    }
    Ok(jac)
}

/// Named sensor geometries with a fixed, documented vertex ordering.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case")]
pub enum ArrayPreset {
    /// `n` equally spaced points from `from` to `to` on the first axis.
    Line {
        n: usize,
        from: f64,
        to: f64,
        #[serde(default = "one")]
        dim: usize,
    },
    /// `nx × ny` grid starting at the origin, x fastest.
    SquareLattice { nx: usize, ny: usize, spacing: f64 },
    /// Inner ring first (angles `2πj/n_inner`), then the outer ring rotated by
    /// `outer_phase` of its angular step.
    TwoCircles {
        n_inner: usize,
        n_outer: usize,
        r_inner: f64,
        r_outer: f64,
        #[serde(default)]
        outer_phase: f64,
        #[serde(default = "origin2")]
        center: Position,
    },
    /// Corners counter-clockwise from `(+s/2, +s/2)`.
    Square { side: f64 },
    /// Vertices at angles `2πj/6`, `j = 0..6`.
    Hexagon { radius: f64 },
    /// `3×3×3` grid with the given edge length minus its center, x slowest.
    Cube3 { edge: f64 },
    /// Vertices of a honeycomb patch of hexagons with side `spacing`, taking
    /// every hexagon within `rings - 1` steps of the central one.
    Honeycomb { rings: usize, spacing: f64 },
}

fn one() -> usize {
    1
}

fn origin2() -> Position {
    Position::origin(2)
}

pub fn preset_array(preset: &ArrayPreset) -> Result<SensorArray> {
    let bad = |msg: &str| Err(Error::InvalidPresetParams(msg.to_string()));
    let positions = match *preset {
        ArrayPreset::Line { n, from, to, dim } => {
            if n == 0 || !(1..=3).contains(&dim) || !(from.is_finite() && to.is_finite()) {
                return bad("line needs n >= 1, finite ends and dim in 1..=3");
            }
            if n > 1 && from == to {
                return bad("line with several sensors needs from != to");
            }
            (0..n)
                .map(|i| {
                    let x = if n == 1 {
                        from
                    } else {
                        from + (to - from) * i as f64 / (n - 1) as f64
                    };
                    Position::origin(dim).with_coord(0, x)
                })
                .collect()
        }
        ArrayPreset::SquareLattice { nx, ny, spacing } => {
            if nx == 0 || ny == 0 || !(spacing > 0.0) {
                return bad("square lattice needs nx, ny >= 1 and spacing > 0");
            }
            let mut v = Vec::with_capacity(nx * ny);
            for j in 0..ny {
                for i in 0..nx {
                    v.push(Position::xy(i as f64 * spacing, j as f64 * spacing));
                }
            }
            v
        }
        ArrayPreset::TwoCircles {
            n_inner,
            n_outer,
            r_inner,
            r_outer,
            outer_phase,
            center,
        } => {
            if n_inner + n_outer == 0 || !(r_inner > 0.0) || !(r_outer > 0.0) || center.dim() != 2 {
                return bad("two circles need positive radii, a 2D center and at least one sensor");
            }
            let mut v = ring(n_inner, r_inner, 0.0, center);
            v.extend(ring(n_outer, r_outer, outer_phase, center));
            v
        }
        ArrayPreset::Square { side } => {
            if !(side > 0.0) {
                return bad("square side must be positive");
            }
            let h = side / 2.0;
            vec![
                Position::xy(h, h),
                Position::xy(-h, h),
                Position::xy(-h, -h),
                Position::xy(h, -h),
            ]
        }
        ArrayPreset::Hexagon { radius } => {
            if !(radius > 0.0) {
                return bad("hexagon radius must be positive");
            }
            ring(6, radius, 0.0, Position::origin(2))
        }
        ArrayPreset::Cube3 { edge } => {
            if !(edge > 0.0) {
                return bad("cube edge must be positive");
            }
            let h = edge / 2.0;
            let mut v = Vec::with_capacity(26);
            for i in -1..=1 {
                for j in -1..=1 {
                    for k in -1..=1 {
                        if (i, j, k) != (0, 0, 0) {
                            v.push(Position::xyz(i as f64 * h, j as f64 * h, k as f64 * h));
                        }
                    }
                }
            }
            v
        }
        ArrayPreset::Honeycomb { rings, spacing } => {
            if rings == 0 || !(spacing > 0.0) {
                return bad("honeycomb needs rings >= 1 and spacing > 0");
            }
            honeycomb(rings, spacing)
        }
    };
    SensorArray::new(positions).map_err(|e| Error::InvalidPresetParams(e.to_string()))
}

fn ring(n: usize, radius: f64, phase: f64, center: Position) -> Vec<Position> {
    (0..n)
        .map(|j| {
            let a = 2.0 * PI * (j as f64 + phase) / n as f64;
            center + Position::xy(radius * a.cos(), radius * a.sin())
        })
        .collect()
}

fn honeycomb(rings: usize, a: f64) -> Vec<Position> {
    // Hexagons with a vertex at angle 0 tile with centers on a triangular
    // lattice spanned by a√3·(cos 30°, sin 30°) and a√3·(0, 1).
    let s3 = 3f64.sqrt();
    let u = (a * s3 * (PI / 6.0).cos(), a * s3 * (PI / 6.0).sin());
    let w = (0.0, a * s3);
    let r = rings as i64 - 1;
    let mut verts: Vec<Position> = Vec::new();
    for p in -r..=r {
        for q in -r..=r {
            // hex distance in axial coordinates
            if (p.abs() + q.abs() + (p + q).abs()) / 2 > r {
                continue;
            }
            let cx = p as f64 * u.0 + q as f64 * w.0;
            let cy = p as f64 * u.1 + q as f64 * w.1;
            for j in 0..6 {
                let ang = PI / 3.0 * j as f64;
                let v = Position::xy(cx + a * ang.cos(), cy + a * ang.sin());
                if !verts.iter().any(|o| o.distance(&v) < 1e-9 * a) {
                    verts.push(v);
                }
            }
        }
    }
    // Snap to a canonical order so the preset is independent of the loop above.
    verts.sort_by(|p, q| {
        let key = |v: &Position| ((v.coord(1) / a * 1e6).round() as i64, (v.coord(0) / a * 1e6).round() as i64);
        key(p).cmp(&key(q))
    });
    verts
}

/// Bounded region of physical space used for noise supports and searches.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Shape {
    /// Interval, disk or ball depending on the dimension of `center`.
    Ball { center: Position, radius: f64 },
    Box { min: Position, max: Position },
    Shell { center: Position, r_min: f64, r_max: f64 },
    /// Solid cylinder from `base` along `axis` (any nonzero vector).
    Cylinder {
        base: Position,
        axis: Position,
        radius: f64,
        length: f64,
    },
    /// Finite point set; has zero volume.
    Points { points: Vec<Position> },
}

impl Shape {
    pub fn dim(&self) -> usize {
        match self {
            Shape::Ball { center, .. } | Shape::Shell { center, .. } => center.dim(),
            Shape::Box { min, .. } => min.dim(),
            Shape::Cylinder { base, .. } => base.dim(),
            Shape::Points { points } => points.first().map_or(0, |p| p.dim()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        match self {
            Shape::Ball { radius, .. } if !(*radius >= 0.0) => bad("ball radius must be >= 0"),
            Shape::Box { min, max } => {
                if min.dim() != max.dim() || min.coords().iter().zip(max.coords()).any(|(a, b)| a > b) {
                    bad("box needs min <= max in every coordinate")
                } else {
                    Ok(())
                }
            }
            Shape::Shell { r_min, r_max, .. } if !(0.0 <= *r_min && r_min <= r_max) => {
                bad("shell needs 0 <= r_min <= r_max")
            }
            Shape::Cylinder {
                base,
                axis,
                radius,
                length,
            } => {
                if base.dim() != 3 || axis.dim() != 3 || axis.norm() == 0.0 || !(*radius >= 0.0) || !(*length >= 0.0) {
                    bad("cylinder needs 3D base and nonzero axis, radius >= 0, length >= 0")
                } else {
                    Ok(())
                }
            }
            Shape::Points { points } if points.is_empty() => bad("point set is empty"),
            _ => Ok(()),
        }
    }

    pub fn contains(&self, p: &Position) -> bool {
        match self {
            Shape::Ball { center, radius } => p.distance(center) <= *radius,
            Shape::Box { min, max } => (0..p.dim()).all(|d| min.coord(d) <= p.coord(d) && p.coord(d) <= max.coord(d)),
            Shape::Shell { center, r_min, r_max } => {
                let r = p.distance(center);
                *r_min <= r && r <= *r_max
            }
            Shape::Cylinder {
                base,
                axis,
                radius,
                length,
            } => {
                let a = axis.scale(1.0 / axis.norm());
                let rel = *p - *base;
                let along = rel.dot(&a);
                let perp = (rel - a.scale(along)).norm();
                (0.0..=*length).contains(&along) && perp <= *radius
            }
            Shape::Points { points } => points.iter().any(|q| q.distance(p) <= 1e-12),
        }
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bounding_box(&self) -> (Position, Position) {
        match self {
            Shape::Ball { center, radius } => bbox_around(center, *radius),
            Shape::Shell { center, r_max, .. } => bbox_around(center, *r_max),
            Shape::Box { min, max } => (*min, *max),
            Shape::Cylinder {
                base,
                axis,
                radius,
                length,
            } => {
                let a = axis.scale(1.0 / axis.norm());
                let top = *base + a.scale(*length);
                let mut lo = [0.0; 3];
                let mut hi = [0.0; 3];
                for d in 0..3 {
                    let ext = radius * (1.0 - a.coord(d) * a.coord(d)).max(0.0).sqrt();
                    lo[d] = base.coord(d).min(top.coord(d)) - ext;
                    hi[d] = base.coord(d).max(top.coord(d)) + ext;
                }
                (Position::xyz(lo[0], lo[1], lo[2]), Position::xyz(hi[0], hi[1], hi[2]))
            }
            Shape::Points { points } => {
                let dim = points[0].dim();
                let mut lo = points[0];
                let mut hi = points[0];
                for p in points {
                    for d in 0..dim {
                        lo = lo.with_coord(d, lo.coord(d).min(p.coord(d)));
                        hi = hi.with_coord(d, hi.coord(d).max(p.coord(d)));
                    }
                }
                (lo, hi)
            }
        }
    }

    /// Representative interior point: center of mass for the solid shapes.
    pub fn center(&self) -> Position {
        match self {
            Shape::Ball { center, .. } | Shape::Shell { center, .. } => *center,
            Shape::Box { min, max } => (*min + *max).scale(0.5),
            Shape::Cylinder { base, axis, length, .. } => *base + axis.scale(0.5 * length / axis.norm()),
            Shape::Points { points } => {
                let sum = points.iter().fold(Position::origin(points[0].dim()), |a, p| a + *p);
                sum.scale(1.0 / points.len() as f64)
            }
        }
    }

    pub fn has_volume(&self) -> bool {
        match self {
            Shape::Ball { radius, .. } => *radius > 0.0,
            Shape::Box { min, max } => (0..min.dim()).all(|d| max.coord(d) > min.coord(d)),
            Shape::Shell { r_min, r_max, .. } => r_max > r_min,
            Shape::Cylinder { radius, length, .. } => *radius > 0.0 && *length > 0.0,
            Shape::Points { .. } => false,
        }
    }
}

fn bbox_around(center: &Position, r: f64) -> (Position, Position) {
    let dim = center.dim();
    let mut lo = *center;
    let mut hi = *center;
    for d in 0..dim {
        lo = lo.with_coord(d, center.coord(d) - r);
        hi = hi.with_coord(d, center.coord(d) + r);
    }
    (lo, hi)
}
