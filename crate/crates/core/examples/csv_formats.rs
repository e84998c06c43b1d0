// Dataset, trajectory and cluster-report CSV files.

use lanestyle::datagen::{default_profiles, generate_features, simulate_scenario, StyleProfile};
use lanestyle::io::{self, ClusterRow};
use lanestyle::morphology::{morph_cluster, MorphParams};

pub fn run_example() -> lanestyle::Result<()> {
    let dir = tempfile::tempdir()?;
    let data = generate_features(&default_profiles(), 3000, 8)?;
    let path = dir.path().join("data.csv");
    io::save_dataset(&path, &data)?;
    assert_eq!(io::load_dataset(&path)?, data);

    let traj = simulate_scenario(&StyleProfile::aggressive(), 1)?;
    let mut buf = Vec::new();
    io::write_trajectory(&mut buf, &traj.frames)?;
    println!("trajectory CSV: {} lines", String::from_utf8_lossy(&buf).lines().count());

    let c = morph_cluster(&data, &MorphParams::default())?;
    let rows = ClusterRow::from_parts(&c.centers, &c.ranges, &c.counts, c.infer_styles().as_deref());
    let mut report = Vec::new();
    io::write_cluster_report(&mut report, &rows)?;
    print!("{}", String::from_utf8_lossy(&report));
    Ok(())
}

#[allow(dead_code)]
fn main() -> lanestyle::Result<()> {
    run_example()
}
