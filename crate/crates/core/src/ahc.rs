//! Agglomerative hierarchical clustering on normalized features.
//!
//! Merging uses the nearest-neighbor chain algorithm. Ward linkage keeps only
//! cluster sizes and centroids, so memory stays linear in N; the other
//! linkages update a condensed distance matrix with the Lance-Williams
//! recurrences.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::features::{Dataset, FeatureVector, Point, DIMS};
use crate::metric::sq_dist;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Linkage {
    Single,
    Complete,
    Average,
    #[default]
    Ward,
}

impl fmt::Display for Linkage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Linkage::Single => "single",
            Linkage::Complete => "complete",
            Linkage::Average => "average",
            Linkage::Ward => "ward",
        })
    }
}

impl FromStr for Linkage {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "single" => Ok(Linkage::Single),
            "complete" => Ok(Linkage::Complete),
            "average" => Ok(Linkage::Average),
            "ward" => Ok(Linkage::Ward),
            _ => Err(format!("unknown linkage `{s}` (expected single, complete, average or ward)")),
        }
    }
}

/// One merge. Node ids below N are samples; merge `i` creates node `N + i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub a: usize,
    pub b: usize,
    pub distance: f64,
    /// Samples under the new node.
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AhcResult {
    /// Cluster index per sample.
    pub labels: Vec<usize>,
    /// Physical-unit member means, sorted lexicographically.
    pub centers: Vec<FeatureVector>,
    pub ranges: Vec<(FeatureVector, FeatureVector)>,
    pub counts: Vec<usize>,
    /// The first N - target merges, in order.
    pub merge_trace: Vec<Merge>,
    pub linkage: Linkage,
}

impl AhcResult {
    pub fn num_clusters(&self) -> usize {
        self.centers.len()
    }

    /// Indices of the `n` most populous clusters, largest first.
    pub fn largest(&self, n: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.counts.len()).collect();
        idx.sort_by_key(|&j| std::cmp::Reverse(self.counts[j]));
        idx.truncate(n);
        idx
    }
}

/// Full dendrogram: N - 1 merges in non-decreasing distance order.
pub fn linkage_tree(points: &[Point], linkage: Linkage) -> Vec<Merge> {
    let n = points.len();
    if n < 2 {
        return Vec::new();
    }
    let mut raw = match linkage {
        Linkage::Ward => nn_chain(&mut WardState::new(points)),
        _ => nn_chain(&mut MatrixState::new(points, linkage)),
    };
    raw.sort_by(|x, y| x.2.total_cmp(&y.2));
    relabel(n, &raw)
}

trait ChainState {
    fn len(&self) -> usize;
    fn dist(&self, i: usize, j: usize) -> f64;
    /// Merges `j` into `i`; `j` becomes inactive.
    fn merge(&mut self, i: usize, j: usize);
}

struct WardState {
    centroids: Vec<Point>,
    sizes: Vec<usize>,
}

impl WardState {
    fn new(points: &[Point]) -> Self {
        WardState {
            centroids: points.to_vec(),
            sizes: vec![1; points.len()],
        }
    }
}

impl ChainState for WardState {
    fn len(&self) -> usize {
        self.sizes.len()
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.sizes[i] as f64, self.sizes[j] as f64);
        (2.0 * a * b / (a + b) * sq_dist(&self.centroids[i], &self.centroids[j])).sqrt()
    }

    fn merge(&mut self, i: usize, j: usize) {
        let (a, b) = (self.sizes[i] as f64, self.sizes[j] as f64);
        for d in 0..DIMS {
            self.centroids[i][d] = (a * self.centroids[i][d] + b * self.centroids[j][d]) / (a + b);
        }
        self.sizes[i] += self.sizes[j];
        self.sizes[j] = 0;
    }
}

struct MatrixState {
    n: usize,
    d: Vec<f64>,
    sizes: Vec<usize>,
    linkage: Linkage,
}

impl MatrixState {
    fn new(points: &[Point], linkage: Linkage) -> Self {
        let n = points.len();
        let mut d = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                d.push(sq_dist(&points[i], &points[j]).sqrt());
            }
        }
        MatrixState {
            n,
            d,
            sizes: vec![1; n],
            linkage,
        }
    }

    fn at(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.n * i - i * (i + 1) / 2 + (j - i - 1)
    }
}

impl ChainState for MatrixState {
    fn len(&self) -> usize {
        self.n
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        self.d[self.at(i, j)]
    }

    fn merge(&mut self, i: usize, j: usize) {
        let (si, sj) = (self.sizes[i] as f64, self.sizes[j] as f64);
        for k in 0..self.n {
            if k == i || k == j || self.sizes[k] == 0 {
                continue;
            }
            let (di, dj) = (self.dist(i, k), self.dist(j, k));
            let nd = match self.linkage {
                Linkage::Single => di.min(dj),
                Linkage::Complete => di.max(dj),
                Linkage::Average => (si * di + sj * dj) / (si + sj),
                Linkage::Ward => unreachable!("ward uses the centroid state"),
            };
            let idx = self.at(i, k);
            self.d[idx] = nd;
        }
        self.sizes[i] += self.sizes[j];
        self.sizes[j] = 0;
    }
}

/// Unordered merges as (slot, slot, distance), slots being sample indices of
/// a representative member.
fn nn_chain<S: ChainState>(state: &mut S) -> Vec<(usize, usize, f64)> {
    let n = state.len();
    let mut active = vec![true; n];
    let mut remaining = n;
    let mut chain: Vec<usize> = Vec::with_capacity(n);
    let mut merges = Vec::with_capacity(n - 1);
    let mut next_start = 0;
    while remaining > 1 {
        if chain.is_empty() {
            while !active[next_start] {
                next_start += 1;
            }
            chain.push(next_start);
        }
        let a = *chain.last().unwrap();
        let prev = chain.len().checked_sub(2).map(|i| chain[i]);
        // Prefer the previous chain element on ties so the chain terminates.
        let mut best = prev.map_or((f64::INFINITY, usize::MAX), |p| (state.dist(a, p), p));
        for c in 0..n {
            if active[c] && c != a {
                let d = state.dist(a, c);
                if d < best.0 {
                    best = (d, c);
                }
            }
        }
        let (d, b) = best;
        if Some(b) == prev {
            chain.truncate(chain.len() - 2);
            let (keep, gone) = if a < b { (a, b) } else { (b, a) };
            state.merge(keep, gone);
            active[gone] = false;
            remaining -= 1;
            merges.push((keep, gone, d));
        } else {
            chain.push(b);
        }
    }
    merges
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Converts sorted slot merges into node-id merges.
fn relabel(n: usize, sorted: &[(usize, usize, f64)]) -> Vec<Merge> {
    let mut parent: Vec<usize> = (0..n).collect();
    let mut node: Vec<usize> = (0..n).collect();
    let mut size = vec![1usize; n];
    sorted
        .iter()
        .enumerate()
        .map(|(i, &(x, y, distance))| {
            let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
            let (na, nb) = (node[rx], node[ry]);
            parent[ry] = rx;
            node[rx] = n + i;
            size[rx] += size[ry];
            Merge {
                a: na.min(nb),
                b: na.max(nb),
                distance,
                size: size[rx],
            }
        })
        .collect()
}

/// Flat labels after applying the first `merges.len()` merges, numbered in
/// order of first appearance.
pub fn cut(n: usize, merges: &[Merge]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n + merges.len()).collect();
    for (i, m) in merges.iter().enumerate() {
        parent[m.a] = n + i;
        parent[m.b] = n + i;
    }
    let mut ids = std::collections::HashMap::new();
    (0..n)
        .map(|s| {
            let r = find(&mut parent, s);
            let next = ids.len();
            *ids.entry(r).or_insert(next)
        })
        .collect()
}

pub fn ahc_fit(data: &Dataset, target_clusters: usize, linkage: Linkage) -> Result<AhcResult> {
    let n = data.len();
    if !(1..=n).contains(&target_clusters) {
        return Err(Error::InvalidParameter(format!(
            "target cluster count {target_clusters} must be in 1..={n}"
        )));
    }
    let ext = data.extrema();
    ext.check_spread()?;
    let points: Vec<Point> = data.samples().iter().map(|s| ext.normalize(s)).collect();
    let mut merges = linkage_tree(&points, linkage);
    merges.truncate(n - target_clusters);
    let raw = cut(n, &merges);

    let mut sums = vec![[0.0; DIMS]; target_clusters];
    let mut counts = vec![0usize; target_clusters];
    let mut lo = vec![[f64::INFINITY; DIMS]; target_clusters];
    let mut hi = vec![[f64::NEG_INFINITY; DIMS]; target_clusters];
    for (s, &c) in data.samples().iter().zip(&raw) {
        let a = s.to_array();
        counts[c] += 1;
        for d in 0..DIMS {
            sums[c][d] += a[d];
            lo[c][d] = lo[c][d].min(a[d]);
            hi[c][d] = hi[c][d].max(a[d]);
        }
    }
    let centers: Vec<Point> = sums
        .iter()
        .zip(&counts)
        .map(|(s, &c)| s.map(|v| v / c as f64))
        .collect();
    let order: Vec<usize> = (0..target_clusters)
        .sorted_by(|&x, &y| lex_cmp(&centers[x], &centers[y]))
        .collect();
    let mut rank = vec![0; target_clusters];
    for (r, &c) in order.iter().enumerate() {
        rank[c] = r;
    }
    Ok(AhcResult {
        labels: raw.iter().map(|&c| rank[c]).collect(),
        centers: order.iter().map(|&c| FeatureVector::from_array(centers[c])).collect(),
        ranges: order
            .iter()
            .map(|&c| (FeatureVector::from_array(lo[c]), FeatureVector::from_array(hi[c])))
            .collect(),
        counts: order.iter().map(|&c| counts[c]).collect(),
        merge_trace: merges,
        linkage,
    })
}

fn lex_cmp(a: &Point, b: &Point) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

fn standardized(a: &[f64], b: &[f64], scale: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .zip(scale)
        .map(|((x, y), s)| ((x - y) / s).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Minimal-cost one-to-one pairing of `a` with `b` under the scaled
/// Euclidean distance. Returns (index in a, index in b, distance), ordered
/// by index in `a`. With unequal sizes only min(|a|, |b|) pairs are made.
pub fn match_centers(a: &[Vec<f64>], b: &[Vec<f64>], scale: &[f64]) -> Result<Vec<(usize, usize, f64)>> {
    for v in a.iter().chain(b) {
        if v.len() != scale.len() {
            return Err(Error::DimensionMismatch {
                left: v.len(),
                right: scale.len(),
            });
        }
    }
    if let Some(s) = scale.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
        return Err(Error::InvalidParameter(format!("scale must be positive, got {s}")));
    }
    let swap = a.len() > b.len();
    let (small, large) = if swap { (b, a) } else { (a, b) };
    if large.len() > 10 {
        return Err(Error::InvalidParameter(format!(
            "exhaustive matching supports at most 10 centers, got {}",
            large.len()
        )));
    }
    let cost = |i: usize, j: usize| standardized(&small[i], &large[j], scale);
    let best = (0..large.len())
        .permutations(small.len())
        .map(|perm| {
            let c: f64 = perm.iter().enumerate().map(|(i, &j)| cost(i, j)).sum();
            (c, perm)
        })
        .min_by(|x, y| x.0.total_cmp(&y.0))
        .map(|(_, p)| p)
        .unwrap_or_default();
    let mut pairs: Vec<(usize, usize, f64)> = best
        .iter()
        .enumerate()
        .map(|(i, &j)| if swap { (j, i, cost(i, j)) } else { (i, j, cost(i, j)) })
        .collect();
    pairs.sort_by_key(|p| p.0);
    Ok(pairs)
}

/// Standardized distance between matched cluster centers.
pub fn cluster_proximity(
    centers_a: &[Vec<f64>],
    centers_b: &[Vec<f64>],
    per_dim_std: &[f64],
) -> Result<Vec<(usize, usize, f64)>> {
    match_centers(centers_a, centers_b, per_dim_std)
}
