// Silence two fixed noise sources exactly and check the probe keeps the
// noiseless QFI.

use adfs::geometry::{preset_array, sampling_vector, ArrayPreset, FieldModel, Position};
use adfs::noise::{NoiseDistribution, StrengthLaw};
use adfs::probe::{design_probe, grid_silencer, probe_metrics};
use adfs::qfi::{phase_samples, qfi, Estimator};

pub fn run_example() -> adfs::Result<()> {
    let model = FieldModel::coulomb();
    let array = preset_array(&ArrayPreset::Hexagon { radius: 1.0 })?;
    let sources = [Position::xy(3.0, 0.5), Position::xy(-2.0, 2.5)];
    let s = sampling_vector(&model, &Position::xy(0.2, -0.1), &array)?;
    let z = grid_silencer(&model, &array, &sources)?;
    let k = design_probe(&s, &z)?;
    println!("k = {:?}", k.as_vector().as_slice());

    for src in &sources {
        let n = sampling_vector(&model, src, &array)?;
        let m = probe_metrics(&s, &n, &k)?;
        println!("source {:?}: |<n,k>| = {:.2e}, S = {:.4}", src, n.dot(k.as_vector()).abs(), m.sensitivity);
    }

    let noise = NoiseDistribution::Product {
        factors: sources
            .iter()
            .map(|&position| NoiseDistribution::FixedPositionGaussianStrength {
                position,
                strength: StrengthLaw::centered(5.0),
            })
            .collect(),
    };
    let phases = phase_samples(&noise, &model, &array, &k, 10_000, 7, Estimator::Plain)?;
    for t in [0.1, 1.0, 10.0] {
        let d = phases.decoherence(t);
        println!("t = {t:>5}: |d| = {:.12}, F = {:.6e}", d.modulus(), qfi(&s, &k, t, d.value()));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
