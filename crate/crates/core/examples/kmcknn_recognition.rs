// KNN restricted to the nearest k-means sub-cluster of every style, with a
// model file round trip.

use lanestyle::datagen::{default_profiles, generate_features};
use lanestyle::kmcknn::{kmcknn_train, KmcKnnModel};
use lanestyle::FeatureVector;

pub fn run_example() -> lanestyle::Result<()> {
    let train = generate_features(&default_profiles(), 6000, 2)?;
    let model = kmcknn_train(&train, 4, 0)?;
    for c in model.classes() {
        let sizes: Vec<usize> = c.subclusters.iter().map(|s| s.len()).collect();
        println!("{:<11} sub-cluster sizes {:?}", c.label, sizes);
    }

    let q = FeatureVector::new(4.4, 0.55, 0.112)?;
    let r = model.recognize(&q)?;
    println!(
        "query -> {} using {} of {} training samples ({} distances)",
        r.label,
        model.candidate_count(&q),
        model.train_size(),
        r.distance_evaluations
    );
    println!("selected sub-clusters: {:?}", model.select(&q));

    let dir = tempfile::tempdir()?;
    let path = dir.path().join("model.txt");
    model.save(&path)?;
    let loaded = KmcKnnModel::load(&path)?;
    assert_eq!(loaded, model);
    println!("model file: {} bytes, reloads identically", std::fs::metadata(&path)?.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> lanestyle::Result<()> {
    run_example()
}
