//! KNN with k-means candidate pruning.
//!
//! Training splits every style's samples into `k` sub-clusters with Lloyd's
//! k-means. At recognition time the query is compared against the sub-cluster
//! centers, the nearest sub-cluster of each style is kept, and plain KNN runs
//! over the union of those members only.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::features::{Dataset, Extrema, FeatureVector, Point, StyleLabel, DIMS, STYLES};
use crate::kmeans::{kmeans_fit, DEFAULT_MAX_ITER};
use crate::knn::{default_neighbors, training_class, vote, Candidate, Recognition, VoteRule};
use crate::metric::{nearest, sq_dist};

const FORMAT_TAG: &str = "lanestyle-kmcknn-model";
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KmcKnnOptions {
    /// Sub-clusters per style.
    pub k: usize,
    pub seed: u64,
    /// Overrides K = floor(sqrt(N_train)).
    pub neighbors: Option<usize>,
    pub vote: VoteRule,
    pub max_iter: usize,
}

impl Default for KmcKnnOptions {
    fn default() -> Self {
        KmcKnnOptions {
            k: 2,
            seed: 0,
            neighbors: None,
            vote: VoteRule::InverseDistance,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubCluster {
    /// Center in normalized space.
    pub center: Point,
    /// Training-set index of each member.
    pub indices: Vec<u32>,
    /// Members in physical units.
    pub members: Vec<FeatureVector>,
    normalized: Vec<Point>,
}

impl SubCluster {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassClusters {
    pub label: StyleLabel,
    pub subclusters: Vec<SubCluster>,
}

/// Reference to one sub-cluster: (position in `classes`, sub-cluster index).
pub type SubClusterRef = (usize, usize);

#[derive(Debug, Clone, PartialEq)]
pub struct KmcKnnModel {
    extrema: Extrema,
    k: usize,
    neighbors: usize,
    vote: VoteRule,
    train_size: usize,
    classes: Vec<ClassClusters>,
    centers: Vec<Point>,
}

impl KmcKnnModel {
    pub fn train(data: &Dataset, opts: &KmcKnnOptions) -> Result<Self> {
        if opts.k == 0 {
            return Err(Error::InvalidParameter("k must be >= 1".into()));
        }
        let labels = data.labels().ok_or(Error::Unlabeled)?;
        let extrema = *data.extrema();
        extrema.check_spread()?;
        let n = data.len();
        let neighbors = match opts.neighbors {
            None => default_neighbors(n),
            Some(kn) if (1..=n).contains(&kn) => kn,
            Some(kn) => {
                return Err(Error::InvalidParameter(format!(
                    "neighbor count K = {kn} must be in 1..={n}"
                )))
            }
        };

        let mut per_class: BTreeMap<u8, Vec<u32>> = BTreeMap::new();
        for (i, &l) in labels.iter().enumerate() {
            per_class.entry(training_class(l)?).or_default().push(i as u32);
        }

        let mut classes = Vec::with_capacity(per_class.len());
        for (class, idx) in per_class {
            let label = STYLES[class as usize];
            let points: Vec<Point> = idx
                .iter()
                .map(|&i| extrema.normalize(&data.samples()[i as usize]))
                .collect();
            let model = kmeans_fit(&points, opts.k, opts.seed, opts.max_iter).map_err(|e| match e {
                Error::TooFewDistinct { k, distinct } => Error::ClassTooSmall {
                    class: label.as_str(),
                    k,
                    distinct,
                },
                other => other,
            })?;
            let mut subclusters: Vec<SubCluster> = model
                .centers
                .iter()
                .map(|&center| SubCluster {
                    center,
                    indices: Vec::new(),
                    members: Vec::new(),
                    normalized: Vec::new(),
                })
                .collect();
            for ((&i, p), &a) in idx.iter().zip(&points).zip(&model.assignments) {
                let sc = &mut subclusters[a];
                sc.indices.push(i);
                sc.members.push(data.samples()[i as usize]);
                sc.normalized.push(*p);
            }
            classes.push(ClassClusters { label, subclusters });
        }

        Ok(Self::assemble(extrema, opts.k, neighbors, opts.vote, n, classes))
    }

    fn assemble(
        extrema: Extrema,
        k: usize,
        neighbors: usize,
        vote: VoteRule,
        train_size: usize,
        classes: Vec<ClassClusters>,
    ) -> Self {
        let centers = classes
            .iter()
            .flat_map(|c| c.subclusters.iter().map(|s| s.center))
            .collect();
        KmcKnnModel {
            extrema,
            k,
            neighbors,
            vote,
            train_size,
            classes,
            centers,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn neighbors(&self) -> usize {
        self.neighbors
    }

    pub fn vote_rule(&self) -> VoteRule {
        self.vote
    }

    pub fn train_size(&self) -> usize {
        self.train_size
    }

    pub fn extrema(&self) -> &Extrema {
        &self.extrema
    }

    pub fn classes(&self) -> &[ClassClusters] {
        &self.classes
    }

    /// Nearest sub-cluster of every style; ties go to the lowest index.
    pub fn select(&self, x: &FeatureVector) -> Vec<SubClusterRef> {
        self.select_normalized(&self.extrema.normalize_clipped(x))
    }

    fn select_normalized(&self, q: &Point) -> Vec<SubClusterRef> {
        let mut offset = 0;
        self.classes
            .iter()
            .enumerate()
            .map(|(ci, c)| {
                let n = c.subclusters.len();
                let best = nearest(&self.centers[offset..offset + n], q);
                offset += n;
                (ci, best)
            })
            .collect()
    }

    /// Number of candidates the query would be compared against.
    pub fn candidate_count(&self, x: &FeatureVector) -> usize {
        self.select(x)
            .iter()
            .map(|&(c, s)| self.classes[c].subclusters[s].len())
            .sum()
    }

    pub fn recognize(&self, x: &FeatureVector) -> Result<Recognition> {
        if self.classes.is_empty() || self.train_size == 0 {
            return Err(Error::EmptyModel);
        }
        let q = self.extrema.normalize_clipped(x);
        let selected = self.select_normalized(&q);
        let total: usize = selected.iter().map(|&(c, s)| self.classes[c].subclusters[s].len()).sum();
        let mut cands = Vec::with_capacity(total);
        for (c, s) in selected {
            let class = self.classes[c].label.class_index().unwrap_or_default() as u8;
            let sc = &self.classes[c].subclusters[s];
            cands.extend(sc.normalized.iter().zip(&sc.indices).map(|(p, &index)| Candidate {
                dist: sq_dist(p, &q),
                index,
                class,
            }));
        }
        let (label, scores, neighbor_counts) = vote(&mut cands, self.neighbors, self.vote);
        Ok(Recognition {
            label,
            scores,
            neighbor_counts,
            distance_evaluations: self.centers.len() + total,
        })
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{FORMAT_TAG} {FORMAT_VERSION}")?;
        writeln!(w, "k {}", self.k)?;
        writeln!(w, "neighbors {}", self.neighbors)?;
        writeln!(w, "vote {}", self.vote)?;
        writeln!(w, "train_size {}", self.train_size)?;
        writeln!(w, "min {} {} {}", self.extrema.min[0], self.extrema.min[1], self.extrema.min[2])?;
        writeln!(w, "max {} {} {}", self.extrema.max[0], self.extrema.max[1], self.extrema.max[2])?;
        for c in &self.classes {
            writeln!(w, "class {} {}", c.label, c.subclusters.len())?;
            for (si, s) in c.subclusters.iter().enumerate() {
                writeln!(
                    w,
                    "subcluster {si} {} {} {} {}",
                    s.len(),
                    s.center[0],
                    s.center[1],
                    s.center[2]
                )?;
                for (i, m) in s.indices.iter().zip(&s.members) {
                    writeln!(w, "{i} {} {} {}", m.dd, m.dv, m.da)?;
                }
            }
        }
        writeln!(w, "end")
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("model text is ASCII")
    }

    /// Writes the model atomically: a temporary file in the same directory
    /// is renamed over `path` only after it is complete.
    pub fn save(&self, path: &Path) -> Result<()> {
        crate::io::write_atomic(path, self.to_text().as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = fs::File::open(path)?;
        Self::read_from(BufReader::new(f), &path.display().to_string())
    }

    pub fn read_from<R: BufRead>(r: R, source_name: &str) -> Result<Self> {
        ModelParser::new(r, source_name).parse()
    }
}

pub fn kmcknn_train(data: &Dataset, k: usize, seed: u64) -> Result<KmcKnnModel> {
    KmcKnnModel::train(
        data,
        &KmcKnnOptions {
            k,
            seed,
            ..KmcKnnOptions::default()
        },
    )
}

pub fn kmcknn_select(model: &KmcKnnModel, x: &FeatureVector) -> Vec<SubClusterRef> {
    model.select(x)
}

pub fn kmcknn_recognize(model: &KmcKnnModel, x: &FeatureVector) -> Result<Recognition> {
    model.recognize(x)
}

struct ModelParser<R> {
    lines: std::iter::Enumerate<io::Lines<R>>,
    source: String,
    line_no: u64,
}

impl<R: BufRead> ModelParser<R> {
    fn new(r: R, source: &str) -> Self {
        ModelParser {
            lines: r.lines().enumerate(),
            source: source.to_string(),
            line_no: 0,
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.source.clone(), self.line_no, msg)
    }

    /// Next non-blank, non-comment line, split into tokens.
    fn next_tokens(&mut self) -> Result<Vec<String>> {
        for (i, line) in self.lines.by_ref() {
            self.line_no = i as u64 + 1;
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            return Ok(t.split_whitespace().map(str::to_string).collect());
        }
        self.line_no += 1;
        Err(self.err("unexpected end of file"))
    }

    fn keyed(&mut self, key: &str, values: usize) -> Result<Vec<String>> {
        let t = self.next_tokens()?;
        if t[0] != key || t.len() != values + 1 {
            return Err(self.err(format!("expected `{key}` with {values} value(s), found `{}`", t.join(" "))));
        }
        Ok(t[1..].to_vec())
    }

    fn num<T: std::str::FromStr>(&self, s: &str, what: &str) -> Result<T> {
        s.parse().map_err(|_| self.err(format!("invalid {what} `{s}`")))
    }

    fn point(&self, t: &[String], what: &str) -> Result<Point> {
        let mut p = [0.0; DIMS];
        for (slot, s) in p.iter_mut().zip(t) {
            *slot = self.num::<f64>(s, what)?;
        }
        Ok(p)
    }

    fn parse(mut self) -> Result<KmcKnnModel> {
        let header = self.next_tokens()?;
        if header.len() != 2 || header[0] != FORMAT_TAG {
            return Err(self.err(format!("not a model file (expected `{FORMAT_TAG} <version>` header)")));
        }
        let version: u32 = self.num(&header[1], "version")?;
        if version != FORMAT_VERSION {
            return Err(self.err(format!("unsupported model version {version}")));
        }
        let k: usize = {
            let v = self.keyed("k", 1)?;
            self.num(&v[0], "k")?
        };
        let neighbors: usize = {
            let v = self.keyed("neighbors", 1)?;
            self.num(&v[0], "neighbor count")?
        };
        let vote: VoteRule = {
            let v = self.keyed("vote", 1)?;
            v[0].parse().map_err(|e: String| self.err(e))?
        };
        let train_size: usize = {
            let v = self.keyed("train_size", 1)?;
            self.num(&v[0], "training size")?
        };
        let min = {
            let v = self.keyed("min", DIMS)?;
            self.point(&v, "minimum")?
        };
        let max = {
            let v = self.keyed("max", DIMS)?;
            self.point(&v, "maximum")?
        };
        let extrema = Extrema { min, max };
        extrema.check_spread().map_err(|e| self.err(e.to_string()))?;

        let mut classes: Vec<ClassClusters> = Vec::new();
        let mut seen = vec![false; train_size];
        loop {
            let t = self.next_tokens()?;
            match t[0].as_str() {
                "end" if t.len() == 1 => break,
                "class" if t.len() == 3 => {
                    let label: StyleLabel = t[1].parse().map_err(|e: String| self.err(e))?;
                    if label == StyleLabel::Noise {
                        return Err(self.err("noise cannot be a model class"));
                    }
                    if classes.iter().any(|c| c.label >= label) {
                        return Err(self.err(format!("class `{label}` out of order or repeated")));
                    }
                    let count: usize = self.num(&t[2], "sub-cluster count")?;
                    let mut subclusters = Vec::with_capacity(count);
                    for expect in 0..count {
                        let h = self.next_tokens()?;
                        if h.len() != 3 + DIMS || h[0] != "subcluster" || h[1] != expect.to_string() {
                            return Err(self.err(format!("expected `subcluster {expect} <members> <center>`")));
                        }
                        let members: usize = self.num(&h[2], "member count")?;
                        if members == 0 {
                            return Err(self.err("empty sub-cluster"));
                        }
                        let center = self.point(&h[3..], "center")?;
                        let mut sc = SubCluster {
                            center,
                            indices: Vec::with_capacity(members),
                            members: Vec::with_capacity(members),
                            normalized: Vec::with_capacity(members),
                        };
                        for _ in 0..members {
                            let m = self.next_tokens()?;
                            if m.len() != 1 + DIMS {
                                return Err(self.err("expected `<index> <dd> <dv> <da>`"));
                            }
                            let idx: u32 = self.num(&m[0], "training index")?;
                            if idx as usize >= train_size || std::mem::replace(&mut seen[idx as usize], true) {
                                return Err(self.err(format!("training index {idx} out of range or repeated")));
                            }
                            let f = FeatureVector::from_array(self.point(&m[1..], "feature")?);
                            f.validate().map_err(|e| self.err(e.to_string()))?;
                            sc.indices.push(idx);
                            sc.normalized.push(extrema.normalize(&f));
                            sc.members.push(f);
                        }
                        subclusters.push(sc);
                    }
                    classes.push(ClassClusters { label, subclusters });
                }
                _ => return Err(self.err(format!("unexpected line `{}`", t.join(" ")))),
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(self.err("model does not cover every training index"));
        }
        if classes.is_empty() {
            return Err(self.err("model has no classes"));
        }
        if !(1..=train_size).contains(&neighbors) {
            return Err(self.err(format!("neighbor count {neighbors} out of range")));
        }
        Ok(KmcKnnModel::assemble(extrema, k, neighbors, vote, train_size, classes))
    }
}
