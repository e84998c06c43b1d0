//! Lloyd's k-means over fixed-dimension points.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::metric::{nearest, sq_dist};

pub const DEFAULT_MAX_ITER: usize = 300;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansModel<const D: usize> {
    pub centers: Vec<[f64; D]>,
    /// Cluster index of each input point.
    pub assignments: Vec<usize>,
    /// Update steps performed.
    pub iterations: usize,
    /// False if `max_iter` was reached before assignments stabilized.
    pub converged: bool,
    /// Within-cluster sum of squares after each update step.
    pub sse_history: Vec<f64>,
}

impl<const D: usize> KMeansModel<D> {
    pub fn k(&self) -> usize {
        self.centers.len()
    }

    /// Nearest center, ties to the lowest index.
    pub fn assign(&self, x: &[f64; D]) -> usize {
        nearest(&self.centers, x)
    }

    pub fn sse(&self, data: &[[f64; D]]) -> f64 {
        within_sse(data, &self.centers, &self.assignments)
    }
}

pub fn kmeans_assign<const D: usize>(model: &KMeansModel<D>, x: &[f64; D]) -> usize {
    model.assign(x)
}

pub(crate) fn within_sse<const D: usize>(data: &[[f64; D]], centers: &[[f64; D]], assignments: &[usize]) -> f64 {
    data.iter()
        .zip(assignments)
        .map(|(x, &a)| sq_dist(x, &centers[a]))
        .sum()
}

fn distinct_count<const D: usize>(data: &[[f64; D]]) -> usize {
    let mut sorted: Vec<&[f64; D]> = data.iter().collect();
    sorted.sort_by(|a, b| cmp_points(a, b));
    sorted.dedup_by(|a, b| cmp_points(a, b).is_eq());
    sorted.len()
}

fn cmp_points<const D: usize>(a: &[f64; D], b: &[f64; D]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Runs assignment/update rounds until the assignment vector stops changing.
///
/// Initial centers are `k` distinct data points drawn by a seeded shuffle.
/// A cluster that ends up empty is re-seeded at the point farthest from its
/// own center.
pub fn kmeans_fit<const D: usize>(
    data: &[[f64; D]],
    k: usize,
    seed: u64,
    max_iter: usize,
) -> Result<KMeansModel<D>> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    let distinct = distinct_count(data);
    if k > distinct {
        return Err(Error::TooFewDistinct { k, distinct });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    order.shuffle(&mut rng);
    let mut centers: Vec<[f64; D]> = Vec::with_capacity(k);
    for &i in &order {
        if centers.len() == k {
            break;
        }
        if !centers.iter().any(|c| cmp_points(c, &data[i]).is_eq()) {
            centers.push(data[i]);
        }
    }

    let mut assignments: Vec<usize> = data.iter().map(|x| nearest(&centers, x)).collect();
    let mut sse_history = Vec::new();
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iter {
        update_centers(data, &assignments, &mut centers);
        iterations += 1;
        let mut next: Vec<usize> = data.iter().map(|x| nearest(&centers, x)).collect();
        repair_empty(data, &mut centers, &mut next);
        sse_history.push(within_sse(data, &centers, &next));
        if next == assignments {
            converged = true;
            break;
        }
        assignments = next;
    }

    Ok(KMeansModel {
        centers,
        assignments,
        iterations,
        converged,
        sse_history,
    })
}

fn update_centers<const D: usize>(data: &[[f64; D]], assignments: &[usize], centers: &mut [[f64; D]]) {
    let mut sums = vec![[0.0; D]; centers.len()];
    let mut counts = vec![0usize; centers.len()];
    for (x, &a) in data.iter().zip(assignments) {
        counts[a] += 1;
        for d in 0..D {
            sums[a][d] += x[d];
        }
    }
    for (c, (s, &n)) in centers.iter_mut().zip(sums.iter().zip(&counts)) {
        if n > 0 {
            *c = s.map(|v| v / n as f64);
        }
    }
}

fn repair_empty<const D: usize>(data: &[[f64; D]], centers: &mut [[f64; D]], assignments: &mut [usize]) {
    loop {
        let mut counts = vec![0usize; centers.len()];
        for &a in assignments.iter() {
            counts[a] += 1;
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return;
        };
        // Farthest point among clusters that can spare one.
        let far = (0..data.len())
            .filter(|&i| counts[assignments[i]] > 1)
            .max_by(|&a, &b| {
                sq_dist(&data[a], &centers[assignments[a]])
                    .total_cmp(&sq_dist(&data[b], &centers[assignments[b]]))
                    .then(b.cmp(&a))
            });
        let Some(far) = far else {
            return;
        };
        centers[empty] = data[far];
        assignments[far] = empty;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn two_points_two_clusters() {
        let data = [[0.0], [1.0]];
        let m = kmeans_fit(&data, 2, 0, DEFAULT_MAX_ITER).unwrap();
        let mut c: Vec<f64> = m.centers.iter().map(|c| c[0]).collect();
        c.sort_by(f64::total_cmp);
        assert_eq!(c, vec![0.0, 1.0]);
        assert_eq!(m.iterations, 1);
        assert!(m.converged);
    }

    #[test]
    fn single_cluster_is_the_mean() {
        let data = [[0.0, 1.0], [2.0, 3.0], [4.0, 8.0]];
        let m = kmeans_fit(&data, 1, 3, DEFAULT_MAX_ITER).unwrap();
        assert_eq!(m.centers, vec![[2.0, 4.0]]);
        assert_eq!(m.assignments, vec![0, 0, 0]);
    }

    #[test]
    fn rejects_k_above_distinct() {
        let data = [[1.0], [1.0], [2.0]];
        assert!(matches!(
            kmeans_fit(&data, 3, 0, 10),
            Err(Error::TooFewDistinct { k: 3, distinct: 2 })
        ));
        assert!(kmeans_fit(&data, 2, 0, 10).is_ok());
        assert!(kmeans_fit(&data, 0, 0, 10).is_err());
    }

    #[test]
    fn flags_non_convergence() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let data: Vec<[f64; 2]> = (0..500).map(|_| [rng.random(), rng.random()]).collect();
        let m = kmeans_fit(&data, 8, 1, 1).unwrap();
        assert!(!m.converged);
        assert_eq!(m.iterations, 1);
    }

    #[test]
    fn recovers_separated_blobs() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let means = [[0.2, 0.2, 0.2], [0.8, 0.2, 0.5], [0.5, 0.8, 0.8]];
        let sd = 0.03;
        let mut data: Vec<[f64; 3]> = Vec::new();
        for m in &means {
            for _ in 0..100 {
                data.push(std::array::from_fn(|i| Normal::new(m[i], sd).unwrap().sample(&mut rng)));
            }
        }
        let model = kmeans_fit(&data, 3, 7, DEFAULT_MAX_ITER).unwrap();
        assert!(model.converged);
        for m in &means {
            let c = model.centers[model.assign(m)];
            for i in 0..3 {
                assert!((c[i] - m[i]).abs() <= 3.0 * sd / 10.0, "{c:?} vs {m:?}");
            }
        }
        // SSE oracle: recompute from scratch
        let mut brute = 0.0;
        for (x, &a) in data.iter().zip(&model.assignments) {
            let c = model.centers[a];
            brute += (0..3).map(|i| (x[i] - c[i]).powi(2)).sum::<f64>();
        }
        assert!((brute - model.sse(&data)).abs() < 1e-12);
        assert_eq!(*model.sse_history.last().unwrap(), model.sse(&data));
    }

    #[test]
    fn fixed_point_at_convergence() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let data: Vec<[f64; 3]> = (0..400).map(|_| [rng.random(), rng.random(), rng.random()]).collect();
        let m = kmeans_fit(&data, 5, 2, DEFAULT_MAX_ITER).unwrap();
        assert!(m.converged);
        let again: Vec<usize> = data.iter().map(|x| m.assign(x)).collect();
        assert_eq!(again, m.assignments);
        // centers are the member means
        for (j, c) in m.centers.iter().enumerate() {
            let members: Vec<_> = data.iter().zip(&m.assignments).filter(|(_, &a)| a == j).collect();
            assert!(!members.is_empty());
            for d in 0..3 {
                let mean = members.iter().map(|(x, _)| x[d]).sum::<f64>() / members.len() as f64;
                assert!((mean - c[d]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let data: Vec<[f64; 3]> = (0..300).map(|_| [rng.random(), rng.random(), rng.random()]).collect();
        let a = kmeans_fit(&data, 4, 11, DEFAULT_MAX_ITER).unwrap();
        let b = kmeans_fit(&data, 4, 11, DEFAULT_MAX_ITER).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn assign_ties_and_oracle() {
        let model = KMeansModel {
            centers: vec![[0.0, 0.0], [5.0, 5.0], [2.0, 0.0]],
            assignments: vec![],
            iterations: 0,
            converged: true,
            sse_history: vec![],
        };
        assert_eq!(kmeans_assign(&model, &[5.0, 5.0]), 1);
        assert_eq!(kmeans_assign(&model, &[1.0, 0.0]), 0);

        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let centers: Vec<[f64; 3]> = (0..5).map(|_| [rng.random(), rng.random(), rng.random()]).collect();
        let model = KMeansModel {
            centers: centers.clone(),
            assignments: vec![],
            iterations: 0,
            converged: true,
            sse_history: vec![],
        };
        for _ in 0..200 {
            let x: [f64; 3] = [rng.random(), rng.random(), rng.random()];
            let mut best = (f64::INFINITY, 0);
            for (i, c) in centers.iter().enumerate() {
                let d = ((x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2) + (x[2] - c[2]).powi(2)).sqrt();
                if d < best.0 {
                    best = (d, i);
                }
            }
            assert_eq!(kmeans_assign(&model, &x), best.1);
        }
    }

    #[test]
    fn empty_cluster_is_reseeded() {
        // Duplicates plus one outlier: initial centers can collide onto one
        // group, leaving a cluster without members.
        let mut data = vec![[0.0]; 20];
        data.extend(vec![[0.1]; 20]);
        data.push([10.0]);
        for seed in 0..20 {
            let m = kmeans_fit(&data, 3, seed, DEFAULT_MAX_ITER).unwrap();
            let mut counts = vec![0; 3];
            for &a in &m.assignments {
                counts[a] += 1;
            }
            assert!(counts.iter().all(|&c| c > 0), "seed {seed}: {counts:?}");
        }
    }

    #[test]
    fn sse_never_increases() {
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let data: Vec<[f64; 3]> = (0..200).map(|_| [rng.random(), rng.random(), rng.random()]).collect();
            let m = kmeans_fit(&data, 6, seed, DEFAULT_MAX_ITER).unwrap();
            for w in m.sse_history.windows(2) {
                assert!(w[1] <= w[0], "seed {seed}: {:?}", m.sse_history);
            }
        }
    }
}
