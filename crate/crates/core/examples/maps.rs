// Noise-dominance and sensitivity maps around three silenced sources,
// written as CSV.

use adfs::scenario::{preset, run_scenario_with, Tasks};

pub fn run_example() -> adfs::Result<()> {
    let tasks = Tasks {
        maps: true,
        ..Tasks::NONE
    };
    let report = run_scenario_with(&preset("fig3_maps")?, tasks)?;
    let dir = std::env::temp_dir().join("adfs_maps");
    std::fs::create_dir_all(&dir)?;
    for m in &report.maps {
        let (lo, hi) = m.map.finite_range().unwrap_or((f64::NAN, f64::NAN));
        let path = dir.join(format!("{}.csv", m.name));
        std::fs::write(&path, m.map.to_csv(m.log10))?;
        println!("{}: finite range [{lo:.3e}, {hi:.3e}] -> {}", m.name, path.display());
    }
    if let Some(delta) = report.maps.iter().find(|m| m.name == "delta") {
        println!("regions with delta > 1e3: {}", delta.map.components_above(1e3));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
