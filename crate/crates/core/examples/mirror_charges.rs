// Alternating probes on a square and a hexagon are blind to sources on
// the mirror axes.

use adfs::geometry::{preset_array, sampling_vector, ArrayPreset, FieldModel, Position};
use adfs::probe::mirror_charge_probe;

pub fn run_example() -> adfs::Result<()> {
    let model = FieldModel::coulomb();
    for (name, preset, rays, offset) in [
        ("square", ArrayPreset::Square { side: 2.0 }, 4, 0.0),
        ("hexagon", ArrayPreset::Hexagon { radius: 1.0 }, 6, 0.5),
    ] {
        let array = preset_array(&preset)?;
        let k = mirror_charge_probe(&array);
        let mut worst = 0.0f64;
        for r in 0..rays {
            // mirror lines bisect neighbouring sensors
            let a = 2.0 * std::f64::consts::PI * (r as f64 + offset) / rays as f64;
            for d in [0.3, 1.7, 2.5, 4.0] {
                let n = sampling_vector(&model, &Position::xy(d * a.cos(), d * a.sin()), &array)?;
                worst = worst.max(n.dot(k.as_vector()).abs() / n.as_vector().norm());
            }
        }
        let off = sampling_vector(&model, &Position::xy(2.5, 0.7), &array)?;
        println!(
            "{name}: k = {:?}, max relative <n,k> on mirror lines = {worst:.1e}, off-axis = {:.3e}",
            k.as_vector().as_slice(),
            off.dot(k.as_vector()).abs() / off.as_vector().norm()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
