//! Probability laws over noise-source strength and position.
//!
//! Every draw is a list of [`NoiseSample`]s, one per independent source, so a
//! [`NoiseDistribution::Product`] of `J` factors yields `J` samples per draw.
//! Draw `i` of a run with seed `s` always comes from the random stream
//! `(s, i)`, which makes results independent of thread count.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::geometry::{sampling_map_jacobian, sampling_vector, FieldModel, Position, SamplingVector, SensorArray, Shape, SourcePoint};
use crate::numerics::stream_rng;

const MAX_ATTEMPTS: usize = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSample {
    pub beta: f64,
    pub position: Position,
}

/// Normal law `N(mean, sd²)` for a source strength.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrengthLaw {
    #[serde(default)]
    pub mean: f64,
    pub sd: f64,
}

impl StrengthLaw {
    pub fn centered(sd: f64) -> Self {
        StrengthLaw { mean: 0.0, sd }
    }

    fn validate(&self) -> Result<()> {
        if !(self.sd >= 0.0 && self.sd.is_finite() && self.mean.is_finite()) {
            return Err(Error::InvalidArgument(format!("invalid strength law {self:?}")));
        }
        Ok(())
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        self.mean + self.sd * z
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum NoiseDistribution {
    /// Source at a fixed position with Gaussian strength.
    FixedPositionGaussianStrength { position: Position, strength: StrengthLaw },
    /// Joint Gaussian over `(β, x)` with mean `[β, x_1, …, x_D]`, truncated to
    /// positions within `radius` of the mean position. Strength is never
    /// truncated.
    TruncatedGaussian {
        mean: Vec<f64>,
        covariance: Vec<Vec<f64>>,
        radius: f64,
    },
    /// Position uniform over a shape, strength independent.
    UniformVolume { shape: Shape, strength: StrengthLaw },
    /// Radius `r ~ N(r_mean, r_sd²)` truncated to `[r_min, r_max]` around
    /// `center`, direction uniform. The density carries the `1/r^{D-1}`
    /// factor that cancels the spherical Jacobian.
    RadialShell {
        center: Position,
        r_mean: f64,
        r_sd: f64,
        r_min: f64,
        r_max: f64,
        strength: StrengthLaw,
    },
    /// Independent sources acting together.
    Product { factors: Vec<NoiseDistribution> },
}

/// Strength law of one source conditioned on its sampled position.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionalSample {
    pub position: Position,
    pub beta_mean: f64,
    pub beta_var: f64,
}

impl NoiseDistribution {
    /// Isotropic truncated Gaussian: position sd `pos_sd` per axis.
    pub fn isotropic(center: Position, pos_sd: f64, radius: f64, strength: StrengthLaw) -> Self {
        let d = center.dim();
        let mut mean = vec![strength.mean];
        mean.extend_from_slice(center.coords());
        let mut covariance = vec![vec![0.0; d + 1]; d + 1];
        covariance[0][0] = strength.sd * strength.sd;
        for (i, row) in covariance.iter_mut().enumerate().skip(1) {
            row[i] = pos_sd * pos_sd;
        }
        NoiseDistribution::TruncatedGaussian {
            mean,
            covariance,
            radius,
        }
    }

    /// Spatial dimension of the sampled positions.
    pub fn dim(&self) -> usize {
        match self {
            NoiseDistribution::FixedPositionGaussianStrength { position, .. } => position.dim(),
            NoiseDistribution::TruncatedGaussian { mean, .. } => mean.len().saturating_sub(1),
            NoiseDistribution::UniformVolume { shape, .. } => shape.dim(),
            NoiseDistribution::RadialShell { center, .. } => center.dim(),
            NoiseDistribution::Product { factors } => factors.first().map_or(0, |f| f.dim()),
        }
    }

    /// Number of sources in each draw.
    pub fn source_count(&self) -> usize {
        match self {
            NoiseDistribution::Product { factors } => factors.iter().map(|f| f.source_count()).sum(),
            _ => 1,
        }
    }

    /// Nominal position of every source: means, shape centers and the like.
    pub fn centers(&self) -> Vec<Position> {
        match self {
            NoiseDistribution::FixedPositionGaussianStrength { position, .. } => vec![*position],
            NoiseDistribution::TruncatedGaussian { mean, .. } => {
                vec![Position::new(&mean[1..]).unwrap_or_else(|_| Position::origin(1))]
            }
            NoiseDistribution::UniformVolume { shape, .. } => vec![shape.center()],
            NoiseDistribution::RadialShell { center, .. } => vec![*center],
            NoiseDistribution::Product { factors } => factors.iter().flat_map(|f| f.centers()).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            NoiseDistribution::FixedPositionGaussianStrength { strength, .. } => strength.validate(),
            NoiseDistribution::TruncatedGaussian {
                mean,
                covariance,
                radius,
            } => {
                let n = mean.len();
                if !(2..=4).contains(&n) {
                    return Err(Error::InvalidArgument(format!(
                        "truncated Gaussian mean must have 1 + D entries with D in 1..=3, got {n}"
                    )));
                }
                if covariance.len() != n || covariance.iter().any(|r| r.len() != n) {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: covariance.len(),
                    });
                }
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::InvalidArgument("truncation radius must be finite and positive".into()));
                }
                let m = cov_matrix(covariance);
                if (&m - m.transpose()).amax() > 1e-12 * m.amax().max(1.0) {
                    return Err(Error::InvalidArgument("covariance is not symmetric".into()));
                }
                let eig = SymmetricEigen::new(m.clone());
                let scale = eig.eigenvalues.amax().max(f64::MIN_POSITIVE);
                if eig.eigenvalues.iter().any(|&l| l < -1e-12 * scale) {
                    return Err(Error::InvalidArgument("covariance is not positive semidefinite".into()));
                }
                Ok(())
            }
            NoiseDistribution::UniformVolume { shape, strength } => {
                shape.validate()?;
                strength.validate()
            }
            NoiseDistribution::RadialShell {
                center,
                r_mean,
                r_sd,
                r_min,
                r_max,
                strength,
            } => {
                if center.dim() < 2 {
                    return Err(Error::InvalidArgument("radial shell needs D >= 2".into()));
                }
                if !(0.0 <= *r_min && r_min < r_max && r_max.is_finite() && *r_sd > 0.0 && r_mean.is_finite()) {
                    return Err(Error::InvalidArgument("radial shell needs 0 <= r_min < r_max < inf and r_sd > 0".into()));
                }
                strength.validate()
            }
            NoiseDistribution::Product { factors } => {
                if factors.is_empty() {
                    return Err(Error::InvalidArgument("product needs at least one factor".into()));
                }
                let d = factors[0].dim();
                for f in factors {
                    f.validate()?;
                    if f.dim() != d {
                        return Err(Error::DimensionMismatch { expected: d, got: f.dim() });
                    }
                }
                Ok(())
            }
        }
    }

    /// Whether a sample lies in the declared support of the law.
    pub fn supports(&self, s: &NoiseSample) -> bool {
        match self {
            NoiseDistribution::FixedPositionGaussianStrength { position, .. } => s.position == *position,
            NoiseDistribution::TruncatedGaussian { mean, radius, .. } => {
                let c = Position::new(&mean[1..]).expect("validated");
                s.position.distance(&c) <= *radius
            }
            NoiseDistribution::UniformVolume { shape, .. } => shape.contains(&s.position),
            NoiseDistribution::RadialShell {
                center, r_min, r_max, ..
            } => {
                let r = s.position.distance(center);
                *r_min - 1e-12 <= r && r <= *r_max + 1e-12
            }
            NoiseDistribution::Product { .. } => false,
        }
    }

    /// One draw: a sample for every source.
    pub fn draw(&self, rng: &mut ChaCha8Rng) -> Result<Vec<NoiseSample>> {
        let mut out = Vec::with_capacity(self.source_count());
        self.draw_into(rng, &mut out)?;
        Ok(out)
    }

    fn draw_into(&self, rng: &mut ChaCha8Rng, out: &mut Vec<NoiseSample>) -> Result<()> {
        match self {
            NoiseDistribution::FixedPositionGaussianStrength { position, strength } => out.push(NoiseSample {
                beta: strength.draw(rng),
                position: *position,
            }),
            NoiseDistribution::TruncatedGaussian {
                mean,
                covariance,
                radius,
            } => {
                let root = matrix_sqrt(&cov_matrix(covariance));
                let mu = DVector::from_column_slice(mean);
                let v = rejection(rng, |rng| {
                    let z = DVector::from_fn(mu.len(), |_, _| StandardNormal.sample(rng));
                    let v = &mu + &root * z;
                    let off = (v.rows(1, mu.len() - 1) - mu.rows(1, mu.len() - 1)).norm();
                    (off <= *radius).then_some(v)
                })?;
                out.push(NoiseSample {
                    beta: v[0],
                    position: Position::new(&v.as_slice()[1..])?,
                });
            }
            NoiseDistribution::UniformVolume { shape, strength } => {
                let position = uniform_in(shape, rng)?;
                out.push(NoiseSample {
                    beta: strength.draw(rng),
                    position,
                });
            }
            NoiseDistribution::RadialShell {
                center,
                r_mean,
                r_sd,
                r_min,
                r_max,
                strength,
            } => {
                let position = radial_point(center, *r_mean, *r_sd, *r_min, *r_max, rng)?;
                out.push(NoiseSample {
                    beta: strength.draw(rng),
                    position,
                });
            }
            NoiseDistribution::Product { factors } => {
                for f in factors {
                    f.draw_into(rng, out)?;
                }
            }
        }
        Ok(())
    }

    /// One draw of positions only, each with the conditional law of its
    /// strength. Integrating the strength analytically removes its Monte
    /// Carlo variance.
    pub fn draw_conditional(&self, rng: &mut ChaCha8Rng) -> Result<Vec<ConditionalSample>> {
        let mut out = Vec::with_capacity(self.source_count());
        self.draw_conditional_into(rng, &mut out)?;
        Ok(out)
    }

    fn draw_conditional_into(&self, rng: &mut ChaCha8Rng, out: &mut Vec<ConditionalSample>) -> Result<()> {
        let indep = |position: Position, s: &StrengthLaw| ConditionalSample {
            position,
            beta_mean: s.mean,
            beta_var: s.sd * s.sd,
        };
        match self {
            NoiseDistribution::FixedPositionGaussianStrength { position, strength } => out.push(indep(*position, strength)),
            NoiseDistribution::TruncatedGaussian {
                mean,
                covariance,
                radius,
            } => {
                let d = mean.len() - 1;
                let cov = cov_matrix(covariance);
                let sxx = cov.view((1, 1), (d, d)).into_owned();
                let sbx = cov.view((0, 1), (1, d)).into_owned();
                let sxx_pinv = sxx.clone().pseudo_inverse(1e-12 * sxx.amax().max(f64::MIN_POSITIVE)).map_err(|e| Error::InvalidArgument(e.into()))?;
                let gain = &sbx * &sxx_pinv;
                let beta_var = (cov[(0, 0)] - (&gain * sbx.transpose())[(0, 0)]).max(0.0);
                let root = matrix_sqrt(&sxx);
                let mu = DVector::from_column_slice(&mean[1..]);
                let x = rejection(rng, |rng| {
                    let z = DVector::from_fn(d, |_, _| StandardNormal.sample(rng));
                    let x = &mu + &root * z;
                    ((&x - &mu).norm() <= *radius).then_some(x)
                })?;
                let beta_mean = mean[0] + (&gain * (&x - &mu))[(0, 0)];
                out.push(ConditionalSample {
                    position: Position::new(x.as_slice())?,
                    beta_mean,
                    beta_var,
                });
            }
            NoiseDistribution::UniformVolume { shape, strength } => out.push(indep(uniform_in(shape, rng)?, strength)),
            NoiseDistribution::RadialShell {
                center,
                r_mean,
                r_sd,
                r_min,
                r_max,
                strength,
            } => out.push(indep(radial_point(center, *r_mean, *r_sd, *r_min, *r_max, rng)?, strength)),
            NoiseDistribution::Product { factors } => {
                for f in factors {
                    f.draw_conditional_into(rng, out)?;
                }
            }
        }
        Ok(())
    }
}

/// `count` draws with seed `seed`; draw `i` uses random stream `i`.
pub fn sample(dist: &NoiseDistribution, seed: u64, count: usize) -> Result<Vec<Vec<NoiseSample>>> {
    if count == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    dist.validate()?;
    (0..count as u64)
        .into_par_iter()
        .map(|i| dist.draw(&mut stream_rng(seed, i)))
        .collect()
}

fn cov_matrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let n = rows.len();
    DMatrix::from_fn(n, n, |i, j| rows[i][j])
}

/// Symmetric square root of a PSD matrix; tiny negative eigenvalues clamp to 0.
fn matrix_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(m.clone());
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0).sqrt()));
    &eig.eigenvectors * d * eig.eigenvectors.transpose()
}

fn rejection<T>(rng: &mut ChaCha8Rng, mut attempt: impl FnMut(&mut ChaCha8Rng) -> Option<T>) -> Result<T> {
    for _ in 0..MAX_ATTEMPTS {
        if let Some(v) = attempt(rng) {
            return Ok(v);
        }
    }
    Err(Error::RejectionStall)
}

/// Uniform point in a shape (uniform choice for a point set).
pub fn uniform_in(shape: &Shape, rng: &mut ChaCha8Rng) -> Result<Position> {
    if let Shape::Points { points } = shape {
        return Ok(points[rng.random_range(0..points.len())]);
    }
    let (lo, hi) = shape.bounding_box();
    let dim = shape.dim();
    rejection(rng, |rng| {
        let mut p = lo;
        for d in 0..dim {
            p = p.with_coord(d, lo.coord(d) + (hi.coord(d) - lo.coord(d)) * rng.random::<f64>());
        }
        shape.contains(&p).then_some(p)
    })
}

fn radial_point(center: &Position, r_mean: f64, r_sd: f64, r_min: f64, r_max: f64, rng: &mut ChaCha8Rng) -> Result<Position> {
    let normal = Normal::new(r_mean, r_sd).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let (a, b) = (normal.cdf(r_min), normal.cdf(r_max));
    if b - a < 1e-6 {
        return Err(Error::RejectionStall);
    }
    let u = a + (b - a) * rng.random::<f64>();
    let r = normal.inverse_cdf(u).clamp(r_min, r_max);
    let dim = center.dim();
    let dir = loop {
        let g: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            break g.into_iter().map(|x| x / norm).collect::<Vec<_>>();
        }
    };
    let offset = Position::new(&dir)?.scale(r);
    Ok(*center + offset)
}

/// First-order Gaussian image of a source law in sampling space.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianImage {
    pub mean: SamplingVector,
    pub covariance: DMatrix<f64>,
}

impl GaussianImage {
    /// Numerical rank of the covariance at relative tolerance `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        crate::probe::numerical_span(&self.covariance, tol).0.ncols()
    }
}

/// Linearize `F(β, x) = β f(x)` at `mu` and push `N(mu, sigma)` forward:
/// mean `F(mu)`, covariance `F_l Σ F_lᵀ`. `sigma` is ordered `(β, x_1, …)`.
pub fn pushforward_gaussian(
    model: &FieldModel,
    array: &SensorArray,
    mu: &SourcePoint,
    sigma: &DMatrix<f64>,
) -> Result<GaussianImage> {
    let d = array.dim() + 1;
    if sigma.nrows() != d || sigma.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: sigma.nrows(),
        });
    }
    let jac = sampling_map_jacobian(model, array, mu)?;
    let mean = sampling_vector(model, &mu.position, array)?.scaled(mu.strength);
    let covariance = &jac * sigma * jac.transpose();
    Ok(GaussianImage { mean, covariance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn moments(v: &[f64]) -> (f64, f64) {
        let n = v.len() as f64;
        let m = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
        (m, var)
    }

    #[test]
    fn point_mass_strength() {
        let d = NoiseDistribution::FixedPositionGaussianStrength {
            position: Position::xy(1.0, 2.0),
            strength: StrengthLaw { mean: 0.7, sd: 0.0 },
        };
        for draw in sample(&d, 3, 50).unwrap() {
            assert_eq!(draw[0].beta, 0.7);
            assert_eq!(draw[0].position, Position::xy(1.0, 2.0));
        }
    }

    #[test]
    fn truncated_positions_stay_inside() {
        let d = NoiseDistribution::isotropic(Position::xy(-1.0, 0.0), 1.0 / 30.0, 0.1, StrengthLaw::centered(3.0));
        let draws = sample(&d, 11, 20_000).unwrap();
        assert!(draws.iter().all(|s| s[0].position.distance(&Position::xy(-1.0, 0.0)) <= 0.1));
        assert!(draws.iter().all(|s| d.supports(&s[0])));
        let (m, var) = moments(&draws.iter().map(|s| s[0].beta).collect::<Vec<_>>());
        assert!(m.abs() < 3.0 * 3.0 / (20_000f64).sqrt());
        assert!((var - 9.0).abs() < 0.05 * 9.0);
    }

    #[test]
    fn radial_shell_radii() {
        let d = NoiseDistribution::RadialShell {
            center: Position::origin(3),
            r_mean: 3.5,
            r_sd: 1.0 / 6.0,
            r_min: 3.0,
            r_max: 4.0,
            strength: StrengthLaw::centered(1.0),
        };
        let draws = sample(&d, 5, 10_000).unwrap();
        let r: Vec<f64> = draws.iter().map(|s| s[0].position.norm()).collect();
        assert!(r.iter().all(|&x| (3.0..=4.0).contains(&x)));
        let (m, _) = moments(&r);
        assert!((m - 3.5).abs() < 0.01);
        // uniform direction: mean z near zero
        let (mz, _) = moments(&draws.iter().map(|s| s[0].position.coord(2)).collect::<Vec<_>>());
        assert!(mz.abs() < 0.1);
    }

    #[test]
    fn uniform_cylinder_support() {
        let shape = Shape::Cylinder {
            base: Position::xyz(0.0, 0.0, 1.5),
            axis: Position::xyz(0.0, 0.0, 1.0),
            radius: 15.0,
            length: 15.5,
        };
        let d = NoiseDistribution::UniformVolume {
            shape: shape.clone(),
            strength: StrengthLaw::centered(100.0),
        };
        let draws = sample(&d, 1, 5_000).unwrap();
        assert!(draws.iter().all(|s| shape.contains(&s[0].position)));
        let (mz, _) = moments(&draws.iter().map(|s| s[0].position.coord(2)).collect::<Vec<_>>());
        assert!((mz - (1.5 + 7.75)).abs() < 0.3);
    }

    #[test]
    fn seeded_determinism_and_product_layout() {
        let a = NoiseDistribution::FixedPositionGaussianStrength {
            position: Position::x(2.0),
            strength: StrengthLaw::centered(1.0),
        };
        let b = NoiseDistribution::isotropic(Position::x(-3.0), 0.2, 0.5, StrengthLaw::centered(2.0));
        let p = NoiseDistribution::Product { factors: vec![a, b] };
        let x = sample(&p, 42, 1000).unwrap();
        let y = sample(&p, 42, 1000).unwrap();
        assert_eq!(x, y);
        assert!(x.iter().all(|d| d.len() == 2));
        assert_ne!(x, sample(&p, 43, 1000).unwrap());
    }

    #[test]
    fn product_factors_uncorrelated() {
        let p = NoiseDistribution::Product {
            factors: vec![
                NoiseDistribution::FixedPositionGaussianStrength {
                    position: Position::x(2.0),
                    strength: StrengthLaw::centered(1.0),
                },
                NoiseDistribution::FixedPositionGaussianStrength {
                    position: Position::x(5.0),
                    strength: StrengthLaw::centered(1.0),
                },
            ],
        };
        let n = 100_000;
        let x = sample(&p, 9, n).unwrap();
        let c = x.iter().map(|d| d[0].beta * d[1].beta).sum::<f64>() / n as f64;
        assert!(c.abs() < 3.0 / (n as f64).sqrt());
    }

    #[test]
    fn untruncated_marginals_converge() {
        let d = NoiseDistribution::FixedPositionGaussianStrength {
            position: Position::x(1.0),
            strength: StrengthLaw { mean: -2.0, sd: 0.5 },
        };
        let n = 100_000;
        let v: Vec<f64> = sample(&d, 77, n).unwrap().iter().map(|s| s[0].beta).collect();
        let (m, var) = moments(&v);
        assert!((m + 2.0).abs() < 3.0 * 0.5 / (n as f64).sqrt());
        // sd of the sample variance is sqrt(2/n) σ²
        assert!((var - 0.25).abs() < 3.0 * (2.0 / n as f64).sqrt() * 0.25);
    }

    #[test]
    fn conditional_strength_with_correlation() {
        let d = NoiseDistribution::TruncatedGaussian {
            mean: vec![1.0, 0.0],
            covariance: vec![vec![1.0, 0.5], vec![0.5, 1.0]],
            radius: 10.0,
        };
        let mut rng = stream_rng(0, 0);
        let c = d.draw_conditional(&mut rng).unwrap()[0];
        assert_relative_eq!(c.beta_var, 0.75, epsilon = 1e-12);
        assert_relative_eq!(c.beta_mean, 1.0 + 0.5 * c.position.coord(0), epsilon = 1e-12);
    }

    #[test]
    fn stall_is_reported() {
        let d = NoiseDistribution::RadialShell {
            center: Position::origin(2),
            r_mean: 0.0,
            r_sd: 0.01,
            r_min: 5.0,
            r_max: 6.0,
            strength: StrengthLaw::centered(1.0),
        };
        assert_eq!(sample(&d, 0, 1).unwrap_err(), Error::RejectionStall);
    }

    #[test]
    fn invalid_laws_rejected() {
        let bad = NoiseDistribution::TruncatedGaussian {
            mean: vec![0.0, 0.0],
            covariance: vec![vec![1.0, 2.0], vec![2.0, 1.0]],
            radius: 1.0,
        };
        assert!(bad.validate().is_err());
        assert!(sample(&bad, 0, 0).is_err());
    }

    #[test]
    fn pushforward_zero_covariance() {
        let arr = SensorArray::new(vec![Position::xy(0.0, 0.0), Position::xy(1.0, 0.0), Position::xy(0.0, 1.0)]).unwrap();
        let mu = SourcePoint::new(2.0, Position::xy(3.0, 3.0));
        let img = pushforward_gaussian(&FieldModel::coulomb(), &arr, &mu, &DMatrix::zeros(3, 3)).unwrap();
        assert_eq!(img.covariance, DMatrix::zeros(3, 3));
        let base = sampling_vector(&FieldModel::coulomb(), &mu.position, &arr).unwrap();
        assert_relative_eq!(img.mean.as_vector(), &(base.as_vector() * 2.0), epsilon = 1e-15);
    }

    #[test]
    fn pushforward_rank_bounded() {
        let arr = crate::geometry::preset_array(&crate::geometry::ArrayPreset::Cube3 { edge: 1.0 }).unwrap();
        let mu = SourcePoint::new(1.0, Position::xyz(2.0, 1.0, 3.0));
        let img = pushforward_gaussian(&FieldModel::coulomb(), &arr, &mu, &DMatrix::identity(4, 4)).unwrap();
        assert!(img.rank(1e-12) <= 4);
    }
}
