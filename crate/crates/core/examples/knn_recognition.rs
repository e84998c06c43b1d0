// Plain KNN recognition with the default K = floor(sqrt(N)).

use lanestyle::datagen::{default_profiles, generate_features};
use lanestyle::{FeatureVector, KnnModel, VoteRule};

pub fn run_example() -> lanestyle::Result<()> {
    let train = generate_features(&default_profiles(), 2000, 1)?;
    let model = KnnModel::new(&train, None, VoteRule::InverseDistance)?;
    println!("K = {}", model.neighbors());
    for q in [
        FeatureVector::new(4.5, 0.5, 0.045)?,
        FeatureVector::new(4.5, 0.5, 0.118)?,
        FeatureVector::new(17.0, 0.7, 0.1)?,
    ] {
        let r = model.classify(&q)?;
        println!(
            "({:.2}, {:.2}, {:.3}) -> {} (neighbors per style {:?}, {} distances)",
            q.dd, q.dv, q.da, r.label, r.neighbor_counts, r.distance_evaluations
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> lanestyle::Result<()> {
    run_example()
}
