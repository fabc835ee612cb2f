// Two sensors with `k = (1, -c^η)` ignore every source on a circle.

use adfs::geometry::{sampling_vector, FieldModel, Position, SensorArray};
use adfs::probe::{sphere_suppressing_pair, InsensitiveSurface};

pub fn run_example() -> adfs::Result<()> {
    let (x1, x2) = (Position::xy(0.0, 0.5), Position::xy(0.0, -0.5));
    let array = SensorArray::new(vec![x1, x2])?;
    for eta in [0.5, 1.0, 2.0] {
        let model = FieldModel::InversePower { eta };
        let pair = sphere_suppressing_pair(&x1, &x2, 0.5, eta)?;
        let InsensitiveSurface::Sphere { center, radius } = pair.surface else {
            unreachable!("c < 1 gives a sphere")
        };
        let mut worst = 0.0f64;
        for j in 0..360 {
            let a = (j as f64).to_radians();
            let x = center + Position::xy(radius * a.cos(), radius * a.sin());
            let n = sampling_vector(&model, &x, &array)?;
            worst = worst.max(n.dot(pair.probe.as_vector()).abs() / n.as_vector().norm());
        }
        println!(
            "eta = {eta}: k = {:?}, center = {:?}, radius = {radius:.6}, max relative <n,k> = {worst:.1e}",
            pair.probe.as_vector().as_slice(),
            center
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
