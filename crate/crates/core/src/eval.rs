//! Cross-validation, per-style accuracy and recognition-time benchmarks.

use std::fmt::{self, Write as _};
use std::hint::black_box;
use std::io::Write;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::features::{Dataset, FeatureVector, StyleLabel, STYLES};
use crate::kmcknn::{KmcKnnModel, KmcKnnOptions};
use crate::knn::{KnnModel, Recognition, VoteRule};

pub const DEFAULT_FOLDS: usize = 4;
pub const DEFAULT_REPEATS: usize = 3;

/// Random near-even partition of `0..n` into `p` folds. The first `n % p`
/// folds hold one extra index.
pub fn kfold_split(n: usize, p: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if p < 2 || p > n {
        return Err(Error::InvalidParameter(format!("fold count p = {p} must be in 2..={n}")));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (base, extra) = (n / p, n % p);
    let mut folds = Vec::with_capacity(p);
    let mut start = 0;
    for f in 0..p {
        let len = base + usize::from(f < extra);
        folds.push(idx[start..start + len].to_vec());
        start += len;
    }
    Ok(folds)
}

/// Per-style accuracy: the share of each style's samples that were predicted
/// correctly. Styles absent from `truth` are `None`.
pub fn accuracy(predicted: &[StyleLabel], truth: &[StyleLabel]) -> Result<[Option<f64>; 3]> {
    let (correct, total) = tally(predicted, truth)?;
    Ok(std::array::from_fn(|j| (total[j] > 0).then(|| correct[j] as f64 / total[j] as f64)))
}

/// Correct and total counts per style.
pub fn tally(predicted: &[StyleLabel], truth: &[StyleLabel]) -> Result<([usize; 3], [usize; 3])> {
    if predicted.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: predicted.len(),
            right: truth.len(),
        });
    }
    let mut correct = [0; 3];
    let mut total = [0; 3];
    for (p, t) in predicted.iter().zip(truth) {
        let j = t.class_index().ok_or(Error::NoiseLabel)?;
        total[j] += 1;
        if p == t {
            correct[j] += 1;
        }
    }
    Ok((correct, total))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Knn,
    KmcKnn { k: usize },
}

impl Method {
    pub fn k(&self) -> Option<usize> {
        match self {
            Method::Knn => None,
            Method::KmcKnn { k } => Some(*k),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Knn => f.pad("knn"),
            Method::KmcKnn { .. } => f.pad("kmcknn"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchConfig {
    pub method: Method,
    pub folds: usize,
    pub seed: u64,
    pub repeats: usize,
    /// Defaults to floor(sqrt(N / p)).
    pub neighbors: Option<usize>,
    pub vote: VoteRule,
}

impl BenchConfig {
    pub fn new(method: Method) -> Self {
        BenchConfig {
            method,
            folds: DEFAULT_FOLDS,
            seed: 0,
            repeats: DEFAULT_REPEATS,
            neighbors: None,
            vote: VoteRule::default(),
        }
    }
}

/// Mean with the range across folds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spread {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl Spread {
    fn of(values: impl IntoIterator<Item = f64>) -> Option<Spread> {
        let v: Vec<f64> = values.into_iter().collect();
        if v.is_empty() {
            return None;
        }
        Some(Spread {
            mean: v.iter().sum::<f64>() / v.len() as f64,
            min: v.iter().copied().fold(f64::INFINITY, f64::min),
            max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldResult {
    pub fold: usize,
    pub size: usize,
    pub accuracy: [Option<f64>; 3],
    pub correct: [usize; 3],
    pub total: [usize; 3],
    /// Wall-clock time to recognize the whole fold, seconds.
    pub time_s: f64,
    /// `time_s / size`, milliseconds.
    pub t0_ms: f64,
    pub distance_evaluations: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub method: Method,
    pub neighbors: usize,
    pub folds: usize,
    pub seed: u64,
    pub repeats: usize,
    /// Per-fold results from the repeat with the smallest mean time.
    pub per_fold: Vec<FoldResult>,
    pub accuracy: [Option<Spread>; 3],
    pub time_s: Spread,
    pub t0_ms: Spread,
    pub distance_evaluations: u64,
}

impl EvalReport {
    pub fn queries(&self) -> usize {
        self.per_fold.iter().map(|f| f.size).sum()
    }

    pub fn distance_evaluations_per_query(&self) -> f64 {
        self.distance_evaluations as f64 / self.queries() as f64
    }

    /// T0 of `baseline` divided by T0 of `self`.
    pub fn speedup_over(&self, baseline: &EvalReport) -> f64 {
        baseline.t0_ms.mean / self.t0_ms.mean
    }

    /// Fractional reduction of T0 relative to `baseline`.
    pub fn time_reduction(&self, baseline: &EvalReport) -> f64 {
        1.0 - self.t0_ms.mean / baseline.t0_ms.mean
    }

    pub fn distance_reduction(&self, baseline: &EvalReport) -> f64 {
        1.0 - self.distance_evaluations_per_query() / baseline.distance_evaluations_per_query()
    }
}

enum Recognizer {
    Knn(KnnModel),
    KmcKnn(KmcKnnModel),
}

impl Recognizer {
    fn recognize(&self, x: &FeatureVector) -> Result<Recognition> {
        match self {
            Recognizer::Knn(m) => m.classify(x),
            Recognizer::KmcKnn(m) => m.recognize(x),
        }
    }
}

/// p-fold cross-validation. Every fold trains on the other folds and
/// recognizes its own samples; only recognition is timed. Timing is repeated
/// `repeats` times and the repeat with the smallest mean fold time is kept.
pub fn benchmark(data: &Dataset, cfg: &BenchConfig) -> Result<EvalReport> {
    let truth = data.labels().ok_or(Error::Unlabeled)?;
    if cfg.repeats == 0 {
        return Err(Error::InvalidParameter("repeats must be >= 1".into()));
    }
    let folds = kfold_split(data.len(), cfg.folds, cfg.seed)?;
    let neighbors = cfg
        .neighbors
        .unwrap_or_else(|| (data.len() / cfg.folds).isqrt().max(1));

    let mut models = Vec::with_capacity(folds.len());
    for (f, test) in folds.iter().enumerate() {
        let train_idx: Vec<usize> = folds
            .iter()
            .enumerate()
            .filter(|&(g, _)| g != f)
            .flat_map(|(_, idx)| idx.iter().copied())
            .collect();
        let train = data.subset(&train_idx)?;
        let k_eff = neighbors.min(train.len());
        let model = match cfg.method {
            Method::Knn => Recognizer::Knn(KnnModel::new(&train, Some(k_eff), cfg.vote)?),
            Method::KmcKnn { k } => Recognizer::KmcKnn(KmcKnnModel::train(
                &train,
                &KmcKnnOptions {
                    k,
                    seed: cfg.seed,
                    neighbors: Some(k_eff),
                    vote: cfg.vote,
                    ..KmcKnnOptions::default()
                },
            )?),
        };
        let queries: Vec<FeatureVector> = test.iter().map(|&i| data.samples()[i]).collect();
        let expected: Vec<StyleLabel> = test.iter().map(|&i| truth[i]).collect();
        models.push((model, queries, expected));
    }

    let mut best: Option<(f64, Vec<FoldResult>)> = None;
    let mut labels_first: Vec<Vec<StyleLabel>> = Vec::new();
    for rep in 0..cfg.repeats {
        let mut results = Vec::with_capacity(folds.len());
        for (f, (model, queries, expected)) in models.iter().enumerate() {
            let mut predicted = Vec::with_capacity(queries.len());
            let mut evals = 0u64;
            let start = Instant::now();
            for q in queries {
                let r = model.recognize(black_box(q))?;
                evals += r.distance_evaluations as u64;
                predicted.push(r.label);
            }
            let time_s = start.elapsed().as_secs_f64();
            black_box(&predicted);
            if rep == 0 {
                labels_first.push(predicted);
            }
            let (correct, total) = tally(&labels_first[f], expected)?;
            results.push(FoldResult {
                fold: f,
                size: queries.len(),
                accuracy: accuracy(&labels_first[f], expected)?,
                correct,
                total,
                time_s,
                t0_ms: time_s * 1e3 / queries.len() as f64,
                distance_evaluations: evals,
            });
        }
        let mean = results.iter().map(|r| r.time_s).sum::<f64>() / results.len() as f64;
        if best.as_ref().is_none_or(|(b, _)| mean < *b) {
            best = Some((mean, results));
        }
    }
    let per_fold = best.expect("repeats >= 1").1;
    Ok(EvalReport {
        method: cfg.method,
        neighbors,
        folds: cfg.folds,
        seed: cfg.seed,
        repeats: cfg.repeats,
        accuracy: std::array::from_fn(|j| Spread::of(per_fold.iter().filter_map(|f| f.accuracy[j]))),
        time_s: Spread::of(per_fold.iter().map(|f| f.time_s)).expect("at least two folds"),
        t0_ms: Spread::of(per_fold.iter().map(|f| f.t0_ms)).expect("at least two folds"),
        distance_evaluations: per_fold.iter().map(|f| f.distance_evaluations).sum(),
        per_fold,
    })
}

fn fmt_spread(s: &Spread, digits: usize) -> String {
    format!("{:.d$} [{:.d$}, {:.d$}]", s.mean, s.min, s.max, d = digits)
}

/// Aligned comparison table: one row per report, accuracy and time as
/// mean with the [min, max] range across folds. When the first report is
/// plain KNN the others also show their time reduction against it.
pub fn format_table(reports: &[EvalReport]) -> String {
    let baseline = reports.first().filter(|r| r.method == Method::Knn);
    let mut rows = vec![vec![
        "method".to_string(),
        "k".into(),
        "K".into(),
        format!("lambda_{}", STYLES[0]),
        format!("lambda_{}", STYLES[1]),
        format!("lambda_{}", STYLES[2]),
        "T (s)".into(),
        "T0 (ms)".into(),
        "dist/query".into(),
        "T0 reduction".into(),
    ]];
    for r in reports {
        let mut row = vec![
            r.method.to_string(),
            r.method.k().map_or("-".into(), |k| k.to_string()),
            r.neighbors.to_string(),
        ];
        for a in &r.accuracy {
            row.push(a.as_ref().map_or("n/a".into(), |s| fmt_spread(s, 4)));
        }
        row.push(fmt_spread(&r.time_s, 4));
        row.push(fmt_spread(&r.t0_ms, 4));
        row.push(format!("{:.1}", r.distance_evaluations_per_query()));
        row.push(match baseline {
            Some(b) if r.method != Method::Knn => format!("{:.2}%", 100.0 * r.time_reduction(b)),
            _ => "-".into(),
        });
        rows.push(row);
    }
    let widths: Vec<usize> = (0..rows[0].len())
        .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (i, row) in rows.iter().enumerate() {
        let cells: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        let _ = writeln!(out, "{}", cells.join("  ").trim_end());
        if i == 0 {
            let _ = writeln!(out, "{}", "-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
        }
    }
    if let Some(r) = reports.first() {
        let _ = writeln!(
            out,
            "p = {}, N_p = {}, repeats = {}, seed = {}",
            r.folds,
            r.per_fold.first().map_or(0, |f| f.size),
            r.repeats,
            r.seed
        );
    }
    out
}

pub const CSV_HEADER: [&str; 9] = [
    "method", "k", "fold", "lambda_mod", "lambda_vag", "lambda_agg", "T_s", "T0_ms", "dist_evals",
];

/// One row per fold plus a `mean` row per report.
pub fn write_csv<W: Write>(w: W, reports: &[EvalReport]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let err = |e: csv::Error| Error::Io(std::io::Error::other(e.to_string()));
    out.write_record(CSV_HEADER).map_err(err)?;
    let acc = |a: Option<f64>| a.map_or(String::new(), |v| format!("{v:.6}"));
    for r in reports {
        let k = r.method.k().map_or(String::new(), |k| k.to_string());
        for f in &r.per_fold {
            out.write_record([
                r.method.to_string(),
                k.clone(),
                f.fold.to_string(),
                acc(f.accuracy[0]),
                acc(f.accuracy[1]),
                acc(f.accuracy[2]),
                format!("{:.6}", f.time_s),
                format!("{:.6}", f.t0_ms),
                f.distance_evaluations.to_string(),
            ])
            .map_err(err)?;
        }
        out.write_record([
            r.method.to_string(),
            k,
            "mean".into(),
            acc(r.accuracy[0].map(|s| s.mean)),
            acc(r.accuracy[1].map(|s| s.mean)),
            acc(r.accuracy[2].map(|s| s.mean)),
            format!("{:.6}", r.time_s.mean),
            format!("{:.6}", r.t0_ms.mean),
            r.distance_evaluations.to_string(),
        ])
        .map_err(err)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{default_profiles, generate_features};
    use proptest::prelude::*;
    use StyleLabel::*;

    #[test]
    fn split_examples() {
        let f = kfold_split(8, 4, 1).unwrap();
        assert!(f.iter().all(|x| x.len() == 2));
        let big = kfold_split(9936, 4, 1).unwrap();
        assert!(big.iter().all(|x| x.len() == 2484));
        assert!(kfold_split(3, 4, 0).is_err());
        assert!(kfold_split(10, 1, 0).is_err());
        assert_ne!(kfold_split(20, 2, 1).unwrap(), kfold_split(20, 2, 2).unwrap());
    }

    proptest! {
        #[test]
        fn split_is_partition(n in 2usize..500, p in 2usize..12, seed in any::<u64>()) {
            prop_assume!(p <= n);
            let folds = kfold_split(n, p, seed).unwrap();
            let mut all: Vec<usize> = folds.iter().flatten().copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
            let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
            prop_assert_eq!(folds, kfold_split(n, p, seed).unwrap());
        }
    }

    #[test]
    fn accuracy_examples() {
        let truth = vec![Moderate; 10];
        let mut pred = truth.clone();
        pred[3] = Vague;
        let a = accuracy(&pred, &truth).unwrap();
        assert_eq!(a, [Some(0.9), None, None]);
        let all = [Moderate, Vague, Aggressive];
        assert_eq!(accuracy(&all, &all).unwrap(), [Some(1.0); 3]);
        assert!(accuracy(&all, &all[..2]).is_err());
        assert!(matches!(accuracy(&[Noise], &[Noise]), Err(Error::NoiseLabel)));
    }

    #[test]
    fn accuracy_identity() {
        let truth = [Moderate, Moderate, Vague, Aggressive, Aggressive, Aggressive, Vague];
        let pred = [Moderate, Vague, Vague, Aggressive, Moderate, Aggressive, Noise];
        let (correct, total) = tally(&pred, &truth).unwrap();
        let a = accuracy(&pred, &truth).unwrap();
        let recovered: f64 = (0..3).map(|j| a[j].unwrap() * total[j] as f64).sum();
        assert!((recovered - correct.iter().sum::<usize>() as f64).abs() < 1e-9);
    }

    fn small_data() -> Dataset {
        generate_features(&default_profiles(), 600, 5).unwrap()
    }

    #[test]
    fn knn_costs_one_evaluation_per_training_sample() {
        let d = small_data();
        let r = benchmark(&d, &BenchConfig { repeats: 1, ..BenchConfig::new(Method::Knn) }).unwrap();
        for f in &r.per_fold {
            assert_eq!(f.distance_evaluations, (f.size * (d.len() - f.size)) as u64);
            assert!((f.t0_ms - f.time_s * 1e3 / f.size as f64).abs() < 1e-12);
        }
        assert_eq!(r.neighbors, 12);
    }

    #[test]
    fn kmcknn_k1_matches_knn() {
        let d = small_data();
        let a = benchmark(&d, &BenchConfig { repeats: 1, ..BenchConfig::new(Method::Knn) }).unwrap();
        let b = benchmark(&d, &BenchConfig { repeats: 1, ..BenchConfig::new(Method::KmcKnn { k: 1 }) }).unwrap();
        assert_eq!(a.accuracy, b.accuracy);
    }

    #[test]
    fn pruning_reduces_distance_evaluations() {
        let d = small_data();
        let a = benchmark(&d, &BenchConfig { repeats: 1, ..BenchConfig::new(Method::Knn) }).unwrap();
        let b = benchmark(&d, &BenchConfig { repeats: 2, ..BenchConfig::new(Method::KmcKnn { k: 3 }) }).unwrap();
        assert!(b.distance_evaluations < a.distance_evaluations);
        assert!(b.distance_reduction(&a) > 0.5);
        for s in b.accuracy.iter().flatten() {
            assert!(s.min <= s.mean && s.mean <= s.max && s.max <= 1.0);
        }
    }

    #[test]
    fn outputs() {
        let d = small_data();
        let reports = [
            benchmark(&d, &BenchConfig { repeats: 1, ..BenchConfig::new(Method::Knn) }).unwrap(),
            benchmark(&d, &BenchConfig { repeats: 1, ..BenchConfig::new(Method::KmcKnn { k: 2 }) }).unwrap(),
        ];
        let table = format_table(&reports);
        assert_eq!(table.lines().count(), 5);
        assert!(table.contains("kmcknn") && table.contains('%'));
        let mut buf = Vec::new();
        write_csv(&mut buf, &reports).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
        assert_eq!(text.lines().count(), 1 + 2 * 5);
        assert!(text.lines().any(|l| l.starts_with("kmcknn,2,mean,")));
        assert!(text.lines().any(|l| l.starts_with("knn,,0,")));
    }

    #[test]
    fn rejects_bad_config() {
        let d = small_data();
        assert!(benchmark(&d, &BenchConfig { repeats: 0, ..BenchConfig::new(Method::Knn) }).is_err());
        assert!(benchmark(&d, &BenchConfig { folds: 1, ..BenchConfig::new(Method::Knn) }).is_err());
        let unlabeled = Dataset::unlabeled(d.samples().to_vec()).unwrap();
        assert!(matches!(benchmark(&unlabeled, &BenchConfig::new(Method::Knn)), Err(Error::Unlabeled)));
    }
}
