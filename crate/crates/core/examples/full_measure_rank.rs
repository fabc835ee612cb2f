// Noise spread over a disk reaches every direction of sampling space, so no
// probe can be fully insensitive to it. A linear field cannot.

use adfs::analysis::full_measure_rank_check;
use adfs::geometry::{preset_array, ArrayPreset, FieldModel, Position, Shape};

pub fn run_example() -> adfs::Result<()> {
    let array = preset_array(&ArrayPreset::Hexagon { radius: 1.0 })?;
    let disk = Shape::Ball {
        center: Position::xy(3.0, 0.0),
        radius: 0.5,
    };
    let signal = Position::xy(0.2, -0.3);
    for (name, model) in [("1/r", FieldModel::coulomb()), ("linear", FieldModel::Linear)] {
        let check = full_measure_rank_check(&model, &array, &signal, &disk, 1000, 1e-10, 3)?;
        println!("{name:>7}: rank {} of {}, residual {:.2e}", check.rank, array.len(), check.residual);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
