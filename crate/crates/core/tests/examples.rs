mod exact_dfs {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/exact_dfs.rs"));
}

mod apollonius_sphere {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/apollonius_sphere.rs"));
}

mod mirror_charges {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/mirror_charges.rs"));
}

mod table1 {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/table1.rs"));
}

mod kappa_scaling {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/kappa_scaling.rs"));
}

mod convergence {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/convergence.rs"));
}

mod pushforward {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/pushforward.rs"));
}

mod full_measure_rank {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/full_measure_rank.rs"));
}

mod periodic_phase_sweep {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/periodic_phase_sweep.rs"));
}

mod maps {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/maps.rs"));
}

mod brute_force_oracle {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/brute_force_oracle.rs"));
}

#[test]
fn exact_dfs_runs() {
    exact_dfs::run_example().expect("exact_dfs example should run");
}

#[test]
fn apollonius_sphere_runs() {
    apollonius_sphere::run_example().expect("apollonius_sphere example should run");
}

#[test]
fn mirror_charges_runs() {
    mirror_charges::run_example().expect("mirror_charges example should run");
}

#[test]
fn table1_runs() {
    table1::run_example().expect("table1 example should run");
}

#[test]
fn kappa_scaling_runs() {
    kappa_scaling::run_example().expect("kappa_scaling example should run");
}

#[test]
fn convergence_runs() {
    convergence::run_example().expect("convergence example should run");
}

#[test]
fn pushforward_runs() {
    pushforward::run_example().expect("pushforward example should run");
}

#[test]
fn full_measure_rank_runs() {
    full_measure_rank::run_example().expect("full_measure_rank example should run");
}

#[test]
fn periodic_phase_sweep_runs() {
    periodic_phase_sweep::run_example().expect("periodic_phase_sweep example should run");
}

#[test]
fn maps_runs() {
    maps::run_example().expect("maps example should run");
}

#[test]
fn brute_force_oracle_runs() {
    brute_force_oracle::run_example().expect("brute_force_oracle example should run");
}
