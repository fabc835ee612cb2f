// A narrow Gaussian over one source's strength and position maps to a
// Gaussian in sampling space of rank at most D + 1.

use adfs::geometry::{preset_array, sampling_vector, ArrayPreset, FieldModel, Position, SourcePoint};
use adfs::noise::pushforward_gaussian;
use nalgebra::DMatrix;

pub fn run_example() -> adfs::Result<()> {
    let model = FieldModel::coulomb();
    let array = preset_array(&ArrayPreset::Cube3 { edge: 1.0 })?;
    let mu = SourcePoint::new(1.0, Position::xyz(2.0, 1.0, 0.5));
    let sigma = DMatrix::from_diagonal_element(4, 4, 0.05 * 0.05);
    let image = pushforward_gaussian(&model, &array, &mu, &sigma)?;
    let unit = sampling_vector(&model, &mu.position, &array)?;
    println!("N = {}, mean matches F(mu): {}", array.len(), (image.mean.as_vector() - unit.as_vector()).norm() < 1e-12);
    println!("rank of image covariance = {} (D + 1 = 4)", image.rank(1e-10));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
