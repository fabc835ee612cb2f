// Time-limited QFI of the designed probe against the GHZ probe and the
// separable bound for the four benchmark scenarios.

use adfs::scenario::{preset, run_scenario_with, Tasks};

pub fn run_example() -> adfs::Result<()> {
    println!("{:<24} {:>8} {:>8} {:>12} {:>12} {:>12}", "scenario", "t_l", "t_l/t_o", "F_aDFS", "F_GHZ", "F_SEP");
    for name in ["table1_square_lattice", "table1_direction", "table1_outside", "table1_cylinder"] {
        let report = run_scenario_with(&preset(name)?, Tasks::NONE.with_qfi())?;
        let q = report.qfi.expect("qfi requested");
        println!(
            "{:<24} {:>8} {:>8.3} {:>12.4e} {:>12.4e} {:>12.4e}",
            name,
            q.time_limit,
            q.time_limit / q.t_opt,
            q.qfi,
            q.baselines.ghz_qfi,
            q.baselines.separable_bound
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
