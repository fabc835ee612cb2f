// The reduced-qubit QFI against an exact simulation of the full register
// with flip schedule and discretized noise.

use adfs::geometry::{sampling_vector, FieldModel, Position, SensorArray};
use adfs::noise::StrengthLaw;
use adfs::probe::ProbeState;
use adfs::qfi::{brute_force_qfi, qfi, DiscreteNoise};

pub fn run_example() -> adfs::Result<()> {
    let model = FieldModel::coulomb();
    let array = SensorArray::new(vec![Position::xy(0.0, 0.0), Position::xy(1.0, 0.0), Position::xy(0.3, 0.8)])?;
    let signal = Position::xy(-1.0, 0.5);
    let k = ProbeState::from_slice(&[1.0, -0.37, 0.62])?;
    let noise = DiscreteNoise::gaussian_strength(&[(Position::xy(2.0, 1.0), 0.6), (Position::xy(2.4, 0.7), 0.4)], StrengthLaw::centered(0.8), 12)?;
    let s = sampling_vector(&model, &signal, &array)?;
    for t in [0.5, 1.0, 2.0] {
        let d = noise.decoherence(&model, &array, &k, t)?;
        let engine = qfi(&s, &k, t, d);
        let oracle = brute_force_qfi(&model, &array, &signal, &k, &noise, t)?;
        println!("t = {t}: engine {engine:.12e}, oracle {oracle:.12e}, rel diff {:.1e}", (engine - oracle).abs() / oracle);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
