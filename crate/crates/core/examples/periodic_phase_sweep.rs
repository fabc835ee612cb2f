// Periodic fields on a honeycomb: a probe silencing one noise wavevector
// at phase zero, swept over all noise phases.

use adfs::scenario::{preset, run_scenario_with, Tasks};

pub fn run_example() -> adfs::Result<()> {
    for name in ["fig5_honeycomb", "fig5_honeycomb_skew"] {
        let tasks = Tasks {
            phase_sweep: true,
            ..Tasks::NONE
        };
        let report = run_scenario_with(&preset(name)?, tasks)?;
        let sweep = report.phase_sweep.expect("preset has a sweep");
        println!(
            "{name}: max <n,k>^2 = {:.2e} at phi = {:.3}, {:?}",
            sweep.max_impact, sweep.argmax_phase, sweep.class
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
