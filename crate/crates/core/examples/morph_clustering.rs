// Unsupervised style discovery with grid morphology.

use lanestyle::datagen::{default_profiles, generate_features};
use lanestyle::morphology::{morph_cluster, MorphParams};

pub fn run_example() -> lanestyle::Result<()> {
    let data = generate_features(&default_profiles(), 9936, 7)?;
    let result = morph_cluster(&data, &MorphParams::default())?;
    let styles = result.infer_styles();
    println!("{} clusters, {} noise samples", result.num_clusters(), result.noise_indices.len());
    for j in 0..result.num_clusters() {
        let name = styles.as_ref().map_or(j.to_string(), |s| s[j].to_string());
        let (c, (lo, hi)) = (result.centers[j], result.ranges[j]);
        println!(
            "{name:<11} center ({:.4}, {:.4}, {:.4})  dd {:.3}..{:.3}  dv {:.3}..{:.3}  da {:.4}..{:.4}  n={}",
            c.dd, c.dv, c.da, lo.dd, hi.dd, lo.dv, hi.dv, lo.da, hi.da, result.counts[j]
        );
    }
    if let Some(predicted) = result.sample_labels() {
        let truth = data.labels().unwrap();
        let agree = predicted.iter().zip(truth).filter(|(p, t)| p == t).count();
        println!("agreement with generating labels: {:.2}%", 100.0 * agree as f64 / data.len() as f64);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> lanestyle::Result<()> {
    run_example()
}
