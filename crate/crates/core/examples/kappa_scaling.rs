// Sensitivity against worst-case noise rejection as more points of a noise
// disk are silenced, and the fitted exponent κ in δ ∝ S^-κ.

use adfs::scenario::preset;
use adfs::analysis::{scaling_study, ScalingSetup};

pub fn run_example() -> adfs::Result<()> {
    for name in ["fig4_scaling", "appendixA_line"] {
        let cfg = preset(name)?;
        let sec = cfg.scaling.as_ref().expect("preset has a scaling section");
        let setup = ScalingSetup {
            model: cfg.signal_field,
            geometry: sec.geometry.clone(),
            signal: cfg.signal,
            noise_area: sec.noise_area.clone(),
            sigma: 1.0,
            search: sec.search,
        };
        let m_range: Vec<usize> = sec.m_range.iter().copied().step_by(2).collect();
        let result = scaling_study(&setup, &m_range, &sec.surplus)?;
        println!("{name}");
        for row in result.rows.iter().filter(|r| r.surplus == sec.surplus[0]) {
            println!("  m = {:>2}, N = {:>2}: S = {:.3e}, delta = {:.3e}", row.m, row.n, row.sensitivity, row.delta);
        }
        println!("  kappa = {:.2} (R^2 = {:.3})", result.kappa, result.fit_r2);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
