// Sensitivity and noise rejection on a line converge quickly with the
// number of sensors.

use adfs::analysis::{convergence_study, ScalingGeometry, ScalingSetup};
use adfs::geometry::{FieldModel, Position, Shape};

pub fn run_example() -> adfs::Result<()> {
    let setup = ScalingSetup {
        model: FieldModel::coulomb(),
        geometry: ScalingGeometry::Line { from: -1.0, to: 1.0 },
        signal: Position::x(-1.5),
        noise_area: Shape::Ball {
            center: Position::x(1.75),
            radius: 0.25,
        },
        sigma: 1.0,
        search: None,
    };
    let times = [1.0, 10.0, 100.0];
    let result = convergence_study(&setup, &[10, 20, 50, 100, 200], 4, &times)?;
    for row in &result.rows {
        println!(
            "N = {:>4}: s_bar = {:.4}, n_bar = {:.4}, S = {:.4e}, delta = {:.4e}, F(t=10) = {:.4e}",
            row.n, row.s_bar, row.n_bar, row.sensitivity, row.delta, row.qfi[1]
        );
    }
    for n in [10, 100, 1000] {
        println!("extrapolated F(N = {n}, t = 10) = {:.4e}", result.extrapolated_qfi(n, 10.0));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
