// Simulate a lane change, find the decision moment and recognize its style.

use lanestyle::datagen::{default_profiles, generate_features, simulate_scenario, StyleProfile};
use lanestyle::features::{extract_decision_point, DEFAULT_LATERAL_THRESHOLD};
use lanestyle::kmcknn::kmcknn_train;

pub fn run_example() -> lanestyle::Result<()> {
    let model = kmcknn_train(&generate_features(&default_profiles(), 3000, 9)?, 2, 0)?;
    for profile in [StyleProfile::moderate(), StyleProfile::vague(), StyleProfile::aggressive()] {
        let s = simulate_scenario(&profile, 4)?;
        let f = extract_decision_point(&s.frames, DEFAULT_LATERAL_THRESHOLD)?;
        let t = s.frames[s.decision_index].t;
        println!(
            "{:<11} {} frames, decision at t={t:.2}s: dd={:.3} dv={:.3} da={:.4} -> {}",
            profile.label,
            s.frames.len(),
            f.dd,
            f.dv,
            f.da,
            model.recognize(&f)?.label
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> lanestyle::Result<()> {
    run_example()
}
