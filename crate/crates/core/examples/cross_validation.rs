// 4-fold cross-validation of KNN against kMC-KNN: accuracy, recognition
// time and distance evaluations.

use lanestyle::datagen::{default_profiles, generate_features};
use lanestyle::eval::{benchmark, format_table, BenchConfig, Method};

pub fn run_example() -> lanestyle::Result<()> {
    let data = generate_features(&default_profiles(), 4000, 5)?;
    let mut reports = vec![benchmark(&data, &BenchConfig::new(Method::Knn))?];
    for k in [2, 4] {
        reports.push(benchmark(&data, &BenchConfig::new(Method::KmcKnn { k }))?);
    }
    print!("{}", format_table(&reports));
    for r in &reports[1..] {
        println!(
            "k={}: {:.2}x faster, {:.1}% fewer distance evaluations",
            r.method.k().unwrap(),
            r.speedup_over(&reports[0]),
            100.0 * r.distance_reduction(&reports[0])
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> lanestyle::Result<()> {
    run_example()
}
