use lanestyle::datagen::{default_profiles, generate_features, StyleProfile};
use lanestyle::features::{Dataset, FeatureVector, StyleLabel};
use lanestyle::kmcknn::{KmcKnnModel, KmcKnnOptions};
use lanestyle::knn::{KnnModel, VoteRule};
use lanestyle::morphology::{morph_cluster, MorphParams};
use proptest::prelude::*;

fn random_labeled(seed: u64, n: usize) -> Dataset {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let styles = [StyleLabel::Moderate, StyleLabel::Vague, StyleLabel::Aggressive];
    let samples = (0..n)
        .map(|_| FeatureVector::from_array([rng.random_range(0.0..30.0), rng.random_range(0.0..2.0), rng.random_range(0.0..0.2)]))
        .collect();
    let labels = (0..n).map(|i| styles[i % 3]).collect();
    Dataset::labeled(samples, labels).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn k1_pruning_is_exact(seed in any::<u64>(), n in 12usize..200, vote in prop_oneof![
        Just(VoteRule::InverseDistance), Just(VoteRule::Count), Just(VoteRule::SummedDistance)
    ]) {
        let d = random_labeled(seed, n);
        let knn = KnnModel::new(&d, None, vote).unwrap();
        let kmc = KmcKnnModel::train(&d, &KmcKnnOptions { k: 1, vote, seed, ..KmcKnnOptions::default() }).unwrap();
        let q = random_labeled(seed ^ 0x5555, 30);
        for x in q.samples() {
            let (a, b) = (knn.classify(x).unwrap(), kmc.recognize(x).unwrap());
            prop_assert_eq!(a.label, b.label);
            prop_assert_eq!(a.scores, b.scores);
        }
    }

    #[test]
    fn model_text_round_trip(seed in any::<u64>(), k in 1usize..5) {
        let d = random_labeled(seed, 90);
        let m = KmcKnnModel::train(&d, &KmcKnnOptions { k, seed, ..KmcKnnOptions::default() }).unwrap();
        let back = KmcKnnModel::read_from(m.to_text().as_bytes(), "mem").unwrap();
        for x in random_labeled(seed.wrapping_add(1), 20).samples() {
            prop_assert_eq!(m.recognize(x).unwrap(), back.recognize(x).unwrap());
        }
        prop_assert_eq!(back, m);
    }

    #[test]
    fn recognition_always_returns_a_style(seed in any::<u64>(), k in 1usize..4) {
        let d = random_labeled(seed, 60);
        let m = KmcKnnModel::train(&d, &KmcKnnOptions { k, seed, ..KmcKnnOptions::default() }).unwrap();
        let far = FeatureVector::from_array([1e6, 1e6, 1e6]);
        let r = m.recognize(&far).unwrap();
        prop_assert!(r.label != StyleLabel::Noise);
        prop_assert!(r.distance_evaluations <= d.len() + 3 * k);
    }
}

#[test]
fn morphology_recovers_weighted_mixture() {
    let mut profiles = default_profiles();
    profiles[2].weight = 0.5;
    let d = generate_features(&profiles, 8000, 21).unwrap();
    let c = morph_cluster(&d, &MorphParams::default()).unwrap();
    assert_eq!(c.num_clusters(), 3);
    let styles = c.infer_styles().unwrap();
    let agg = styles.iter().position(|&s| s == StyleLabel::Aggressive).unwrap();
    assert!((c.counts[agg] as f64 - 1600.0).abs() < 80.0, "{:?}", c.counts);
}

#[test]
fn two_profile_mixture_gives_two_clusters() {
    let d = generate_features(&[StyleProfile::moderate(), StyleProfile::aggressive()], 5000, 2).unwrap();
    let c = morph_cluster(&d, &MorphParams::default()).unwrap();
    assert_eq!(c.num_clusters(), 2);
    assert!(c.infer_styles().is_none());
}
