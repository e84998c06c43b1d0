// Draw a labeled synthetic dataset and summarize each style.

use lanestyle::datagen::{default_profiles, generate_features};
use lanestyle::features::STYLES;

pub fn run_example() -> lanestyle::Result<()> {
    let data = generate_features(&default_profiles(), 3000, 42)?;
    let labels = data.labels().expect("generated data is labeled");
    println!("{:<11} {:>6} {:>8} {:>8} {:>8}", "style", "count", "dd", "dv", "da");
    for style in STYLES {
        let members: Vec<_> = data
            .samples()
            .iter()
            .zip(labels)
            .filter(|(_, &l)| l == style)
            .map(|(s, _)| s.to_array())
            .collect();
        let n = members.len() as f64;
        let mean = |d: usize| members.iter().map(|m| m[d]).sum::<f64>() / n;
        println!("{:<11} {:>6} {:>8.4} {:>8.4} {:>8.4}", style, members.len(), mean(0), mean(1), mean(2));
    }
    let ext = data.extrema();
    println!("min {:?}\nmax {:?}", ext.min, ext.max);
    Ok(())
}

#[allow(dead_code)]
fn main() -> lanestyle::Result<()> {
    run_example()
}
