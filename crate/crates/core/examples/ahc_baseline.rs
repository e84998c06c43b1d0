// Ward-linkage hierarchical clustering, matched against morphology clusters.

use lanestyle::ahc::{ahc_fit, cluster_proximity, Linkage};
use lanestyle::datagen::{default_profiles, generate_features};
use lanestyle::morphology::{morph_cluster, MorphParams};

pub fn run_example() -> lanestyle::Result<()> {
    let data = generate_features(&default_profiles(), 3000, 3)?;
    let tree = ahc_fit(&data, 4, Linkage::Ward)?;
    println!("AHC: {} merges, cluster sizes {:?}", tree.merge_trace.len(), tree.counts);
    if let Some(last) = tree.merge_trace.last() {
        println!("last merge: nodes {} + {} at height {:.3}", last.a, last.b, last.distance);
    }

    let morph = morph_cluster(&data, &MorphParams::default())?;
    let std: Vec<f64> = (0..3)
        .map(|d| {
            let v: Vec<f64> = data.samples().iter().map(|s| s.to_array()[d]).collect();
            let m = v.iter().sum::<f64>() / v.len() as f64;
            (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
        })
        .collect();
    let as_vecs = |c: &[lanestyle::FeatureVector]| c.iter().map(|f| f.to_array().to_vec()).collect::<Vec<_>>();
    for (i, j, d) in cluster_proximity(&as_vecs(&morph.centers), &as_vecs(&tree.centers), &std)? {
        println!("morph {i} <-> ahc {j}: standardized distance {d:.4}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> lanestyle::Result<()> {
    run_example()
}
