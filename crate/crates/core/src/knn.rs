//! Exhaustive K-nearest-neighbor recognizer.
//!
//! Distances are squared Euclidean in min-max normalized space. The K
//! nearest training samples (ties broken by training index) vote for their
//! label; see [`VoteRule`] for how votes are weighted.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::features::{Dataset, Extrema, FeatureVector, Point, StyleLabel, STYLES};
use crate::metric::sq_dist;

/// Added to each distance before inverting it so exact matches stay finite.
pub const VOTE_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VoteRule {
    /// Each neighbor votes `1 / (sim + ε)` for its label.
    #[default]
    InverseDistance,
    /// One vote per neighbor.
    Count,
    /// Each neighbor adds its raw squared distance and the largest total
    /// wins. This favors the farthest class and is kept only for comparison.
    SummedDistance,
}

impl fmt::Display for VoteRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            VoteRule::InverseDistance => "inverse-distance",
            VoteRule::Count => "count",
            VoteRule::SummedDistance => "summed-distance",
        })
    }
}

impl FromStr for VoteRule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "inverse-distance" | "weighted" => Ok(VoteRule::InverseDistance),
            "count" => Ok(VoteRule::Count),
            "summed-distance" | "literal" => Ok(VoteRule::SummedDistance),
            other => Err(format!(
                "vote rule must be inverse-distance|count|summed-distance, got `{other}`"
            )),
        }
    }
}

/// Outcome of recognizing one query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Recognition {
    pub label: StyleLabel,
    /// Vote score per style, indexed by [`StyleLabel::class_index`].
    pub scores: [f64; 3],
    /// Neighbors per style among the K selected.
    pub neighbor_counts: [usize; 3],
    /// Distance computations spent on this query.
    pub distance_evaluations: usize,
}

/// Squared Euclidean distance between two normalized vectors.
pub fn sim(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

/// `floor(sqrt(n))`, at least 1.
pub fn default_neighbors(n: usize) -> usize {
    n.isqrt().max(1)
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Candidate {
    pub dist: f64,
    pub index: u32,
    pub class: u8,
}

fn by_distance_then_index(a: &Candidate, b: &Candidate) -> Ordering {
    a.dist.total_cmp(&b.dist).then(a.index.cmp(&b.index))
}

/// Keeps the `k` nearest candidates and lets them vote.
pub(crate) fn vote(candidates: &mut Vec<Candidate>, k: usize, rule: VoteRule) -> (StyleLabel, [f64; 3], [usize; 3]) {
    let k = k.min(candidates.len());
    if k < candidates.len() {
        candidates.select_nth_unstable_by(k - 1, by_distance_then_index);
        candidates.truncate(k);
    }
    candidates.sort_unstable_by(by_distance_then_index);

    let mut scores = [0.0; 3];
    let mut counts = [0usize; 3];
    for c in candidates.iter() {
        let cls = c.class as usize;
        counts[cls] += 1;
        scores[cls] += match rule {
            VoteRule::InverseDistance => 1.0 / (c.dist + VOTE_EPSILON),
            VoteRule::Count => 1.0,
            VoteRule::SummedDistance => c.dist,
        };
    }
    let mut best = 0;
    for j in 1..3 {
        let better = match scores[j].total_cmp(&scores[best]) {
            Ordering::Greater => true,
            Ordering::Equal => counts[j] > counts[best],
            Ordering::Less => false,
        };
        if better {
            best = j;
        }
    }
    (STYLES[best], scores, counts)
}

/// Class index of a training label, rejecting noise.
pub(crate) fn training_class(label: StyleLabel) -> Result<u8> {
    label.class_index().map(|c| c as u8).ok_or(Error::NoiseLabel)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    train: Vec<Point>,
    classes: Vec<u8>,
    extrema: Extrema,
    neighbors: usize,
    vote: VoteRule,
}

impl KnnModel {
    /// Builds the model from a labeled dataset. `neighbors` overrides the
    /// default K = floor(sqrt(N)).
    pub fn new(data: &Dataset, neighbors: Option<usize>, vote: VoteRule) -> Result<Self> {
        let labels = data.labels().ok_or(Error::Unlabeled)?;
        let extrema = *data.extrema();
        extrema.check_spread()?;
        let classes = labels.iter().map(|&l| training_class(l)).collect::<Result<Vec<_>>>()?;
        let n = data.len();
        let neighbors = match neighbors {
            None => default_neighbors(n),
            Some(k) if (1..=n).contains(&k) => k,
            Some(k) => {
                return Err(Error::InvalidParameter(format!(
                    "neighbor count K = {k} must be in 1..={n}"
                )))
            }
        };
        Ok(KnnModel {
            train: data.samples().iter().map(|s| extrema.normalize(s)).collect(),
            classes,
            extrema,
            neighbors,
            vote,
        })
    }

    pub fn len(&self) -> usize {
        self.train.len()
    }

    pub fn is_empty(&self) -> bool {
        self.train.is_empty()
    }

    pub fn neighbors(&self) -> usize {
        self.neighbors
    }

    pub fn extrema(&self) -> &Extrema {
        &self.extrema
    }

    pub fn vote_rule(&self) -> VoteRule {
        self.vote
    }

    pub fn classify(&self, x: &FeatureVector) -> Result<Recognition> {
        if self.train.is_empty() {
            return Err(Error::EmptyModel);
        }
        let q = self.extrema.normalize_clipped(x);
        let mut cands: Vec<Candidate> = self
            .train
            .iter()
            .zip(&self.classes)
            .enumerate()
            .map(|(i, (p, &class))| Candidate {
                dist: sq_dist(p, &q),
                index: i as u32,
                class,
            })
            .collect();
        let (label, scores, neighbor_counts) = vote(&mut cands, self.neighbors, self.vote);
        Ok(Recognition {
            label,
            scores,
            neighbor_counts,
            distance_evaluations: self.train.len(),
        })
    }
}

pub fn knn_classify(model: &KnnModel, x: &FeatureVector) -> Result<Recognition> {
    model.classify(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn labeled(points: &[([f64; 3], StyleLabel)]) -> Dataset {
        Dataset::labeled(
            points.iter().map(|(p, _)| FeatureVector::from_array(*p)).collect(),
            points.iter().map(|(_, l)| *l).collect(),
        )
        .unwrap()
    }

    use StyleLabel::*;

    #[test]
    fn sim_examples() {
        assert_eq!(sim(&[0.3, 0.2, 0.1], &[0.3, 0.2, 0.1]).unwrap(), 0.0);
        assert_eq!(sim(&[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0]).unwrap(), 3.0);
        assert!(matches!(sim(&[0.0], &[0.0, 1.0]), Err(Error::DimensionMismatch { .. })));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let a: Vec<f64> = (0..3).map(|_| rng.random()).collect();
            let b: Vec<f64> = (0..3).map(|_| rng.random()).collect();
            let mut oracle = 0.0;
            for i in 0..3 {
                oracle += (a[i] - b[i]).powi(2);
            }
            assert!((sim(&a, &b).unwrap() - oracle).abs() < 1e-15);
        }
    }

    #[test]
    fn default_k_is_floor_sqrt() {
        assert_eq!(default_neighbors(1), 1);
        assert_eq!(default_neighbors(8), 2);
        assert_eq!(default_neighbors(9), 3);
        assert_eq!(default_neighbors(2484), 49);
        assert_eq!(default_neighbors(7452), 86);
    }

    #[test]
    fn unanimous_neighbors() {
        let d = labeled(&[
            ([0.0, 0.0, 0.0], Moderate),
            ([0.1, 0.0, 0.0], Moderate),
            ([0.0, 0.1, 0.0], Moderate),
            ([1.0, 1.0, 1.0], Aggressive),
        ]);
        let m = KnnModel::new(&d, Some(3), VoteRule::InverseDistance).unwrap();
        let r = m.classify(&FeatureVector::from_array([0.05, 0.05, 0.0])).unwrap();
        assert_eq!(r.label, Moderate);
        assert_eq!(r.neighbor_counts, [3, 0, 0]);
        assert_eq!(r.distance_evaluations, 4);
    }

    #[test]
    fn exact_match_with_k1() {
        let d = labeled(&[
            ([0.0, 0.0, 0.0], Moderate),
            ([0.5, 0.5, 0.5], Vague),
            ([1.0, 1.0, 1.0], Aggressive),
        ]);
        let m = KnnModel::new(&d, Some(1), VoteRule::Count).unwrap();
        assert_eq!(m.classify(&FeatureVector::from_array([0.5, 0.5, 0.5])).unwrap().label, Vague);
    }

    #[test]
    fn tie_prefers_more_neighbors_then_lower_index() {
        // Count vote, K = 2, one neighbor per label: lower index wins.
        let d = labeled(&[([0.0, 0.0, 0.0], Vague), ([1.0, 1.0, 1.0], Moderate)]);
        let m = KnnModel::new(&d, Some(2), VoteRule::Count).unwrap();
        assert_eq!(m.classify(&FeatureVector::from_array([0.5, 0.5, 0.5])).unwrap().label, Moderate);

        // Summed distance: both labels score 0 at exact matches, so the
        // label with more neighbors wins.
        let d = labeled(&[
            ([0.0, 0.0, 0.0], Moderate),
            ([0.5, 0.5, 0.5], Aggressive),
            ([0.5, 0.5, 0.5], Aggressive),
            ([1.0, 1.0, 1.0], Vague),
        ]);
        let m = KnnModel::new(&d, Some(2), VoteRule::SummedDistance).unwrap();
        assert_eq!(m.classify(&FeatureVector::from_array([0.5, 0.5, 0.5])).unwrap().label, Aggressive);
    }

    #[test]
    fn summed_distance_prefers_far_label() {
        let d = labeled(&[
            ([0.0, 0.0, 0.0], Moderate),
            ([0.1, 0.0, 0.0], Moderate),
            ([1.0, 1.0, 1.0], Aggressive),
        ]);
        let x = FeatureVector::from_array([0.05, 0.0, 0.0]);
        let weighted = KnnModel::new(&d, Some(3), VoteRule::InverseDistance).unwrap();
        let literal = KnnModel::new(&d, Some(3), VoteRule::SummedDistance).unwrap();
        assert_eq!(weighted.classify(&x).unwrap().label, Moderate);
        assert_eq!(literal.classify(&x).unwrap().label, Aggressive);
    }

    #[test]
    fn rejects_noise_and_bad_k() {
        let d = labeled(&[([0.0, 0.0, 0.0], Moderate), ([1.0, 1.0, 1.0], Noise)]);
        assert!(matches!(KnnModel::new(&d, None, VoteRule::Count), Err(Error::NoiseLabel)));
        let d = labeled(&[([0.0, 0.0, 0.0], Moderate), ([1.0, 1.0, 1.0], Vague)]);
        assert!(KnnModel::new(&d, Some(3), VoteRule::Count).is_err());
        assert!(KnnModel::new(&d, Some(0), VoteRule::Count).is_err());
        let unl = Dataset::unlabeled(vec![FeatureVector::from_array([0.0; 3]), FeatureVector::from_array([1.0; 3])]).unwrap();
        assert!(matches!(KnnModel::new(&unl, None, VoteRule::Count), Err(Error::Unlabeled)));
    }

    #[test]
    fn majority_with_k_equal_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut pts = Vec::new();
        for i in 0..30 {
            let l = if i < 20 { Aggressive } else { Vague };
            pts.push(([rng.random(), rng.random(), rng.random()], l));
        }
        let d = labeled(&pts);
        let m = KnnModel::new(&d, Some(30), VoteRule::Count).unwrap();
        for _ in 0..10 {
            let x = FeatureVector::from_array([rng.random(), rng.random(), rng.random()]);
            assert_eq!(m.classify(&x).unwrap().label, Aggressive);
        }
    }

    #[test]
    fn permutation_invariant_without_ties() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let pts: Vec<_> = (0..120)
            .map(|i| ([rng.random(), rng.random(), rng.random()], STYLES[i % 3]))
            .collect();
        let mut shuffled = pts.clone();
        for i in (1..shuffled.len()).rev() {
            shuffled.swap(i, rng.random_range(0..=i));
        }
        let a = KnnModel::new(&labeled(&pts), None, VoteRule::InverseDistance).unwrap();
        let b = KnnModel::new(&labeled(&shuffled), None, VoteRule::InverseDistance).unwrap();
        for _ in 0..100 {
            let x = FeatureVector::from_array([rng.random(), rng.random(), rng.random()]);
            assert_eq!(a.classify(&x).unwrap().label, b.classify(&x).unwrap().label);
        }
    }
}
