//! The `lanestyle` command line.
//!
//! Every output is assembled in memory and written atomically, so a failing
//! command leaves no partial files. Exit status: 0 success, 1 usage error,
//! 2 data error, 3 numeric failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand};

use crate::ahc::{ahc_fit, match_centers, Linkage};
use crate::config::KeyValues;
use crate::datagen::{default_profiles, generate_features, load_profiles, simulate_scenario, StyleProfile};
use crate::error::{Error, Result};
use crate::eval::{benchmark, format_table, write_csv, BenchConfig, EvalReport, Method};
use crate::features::{extract_decision_point, Dataset, StyleLabel, DEFAULT_LATERAL_THRESHOLD, DIMS, FEATURE_NAMES};
use crate::io::{self, ClusterRow};
use crate::kmcknn::{KmcKnnModel, KmcKnnOptions};
use crate::knn::{KnnModel, VoteRule};
use crate::morphology::{morph_cluster, AssignSpace, Connectivity, MorphClustering, MorphParams};

#[derive(Debug, Parser)]
#[command(name = "lanestyle", version, about = "Lane-change decision style clustering and recognition")]
struct Cli {
    /// Key-value file whose entries override command-line flags.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a labeled synthetic dataset, or one simulated scenario.
    #[command(args_override_self = true)]
    Generate(GenerateArgs),
    /// Cluster a dataset with grid morphology.
    #[command(args_override_self = true)]
    Cluster(ClusterArgs),
    /// Cluster a dataset with agglomerative hierarchical clustering.
    #[command(args_override_self = true)]
    Ahc(AhcArgs),
    /// Train a kMC-KNN model.
    #[command(args_override_self = true)]
    Train(TrainArgs),
    /// Recognize the style of query samples or of a recorded trajectory.
    #[command(args_override_self = true)]
    Recognize(RecognizeArgs),
    /// Cross-validate one recognizer.
    #[command(args_override_self = true)]
    Crossval(CrossvalArgs),
    /// Time KNN against kMC-KNN under cross-validation.
    #[command(args_override_self = true)]
    Bench(BenchArgs),
    /// Side-by-side morphology vs. AHC and KNN vs. kMC-KNN tables.
    #[command(args_override_self = true)]
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 9936)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Style profile file; defaults to the built-in three styles.
    #[arg(long, value_name = "FILE")]
    profiles: Option<PathBuf>,
    /// Simulate one lane change for this style and write its trajectory.
    #[arg(long, value_name = "STYLE")]
    scenario: Option<StyleLabel>,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MorphOpts {
    /// Quantization levels: one value for all dimensions or three (dd,dv,da).
    #[arg(long, value_parser = parse_levels, default_value = "100")]
    q: [u32; DIMS],
    /// Structuring-element radius in grid cells.
    #[arg(long = "r", alias = "radius", default_value_t = 10)]
    radius: u32,
    /// Regions holding fewer than this share of the samples become noise.
    #[arg(long, default_value_t = 0.02)]
    noise_fraction: f64,
    #[arg(long, default_value_t = Connectivity::TwentySix)]
    connectivity: Connectivity,
    /// Space in which samples are assigned to the nearest cluster center.
    #[arg(long, default_value_t = AssignSpace::Normalized)]
    assign_space: AssignSpace,
}

impl MorphOpts {
    fn params(&self) -> MorphParams {
        MorphParams {
            q: self.q,
            radius: self.radius,
            noise_fraction: self.noise_fraction,
            connectivity: self.connectivity,
            assign_space: self.assign_space,
        }
    }
}

#[derive(Debug, Args)]
struct ClusterArgs {
    #[arg(long, value_name = "FILE")]
    data: PathBuf,
    #[command(flatten)]
    morph: MorphOpts,
    /// Cluster report CSV; stdout when omitted.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Dataset CSV with the inferred style of every sample.
    #[arg(long, value_name = "FILE")]
    labels: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AhcArgs {
    #[arg(long, value_name = "FILE")]
    data: PathBuf,
    #[arg(long, default_value_t = 4)]
    target: usize,
    #[arg(long, default_value_t = Linkage::Ward)]
    linkage: Linkage,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RecognizerOpts {
    /// Sub-clusters per style.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Neighbor count K; defaults to floor(sqrt(N)).
    #[arg(long = "neighbors", value_name = "K")]
    neighbors: Option<usize>,
    #[arg(long, default_value_t = VoteRule::InverseDistance)]
    vote: VoteRule,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Labeled dataset CSV. Samples labeled noise are skipped.
    #[arg(long, value_name = "FILE")]
    data: PathBuf,
    #[command(flatten)]
    rec: RecognizerOpts,
    #[arg(long, value_name = "FILE")]
    model: PathBuf,
}

#[derive(Debug, Args)]
struct RecognizeArgs {
    /// kMC-KNN model file.
    #[arg(long, value_name = "FILE", conflicts_with = "train", required_unless_present = "train")]
    model: Option<PathBuf>,
    /// Labeled dataset for plain KNN instead of a model.
    #[arg(long, value_name = "FILE")]
    train: Option<PathBuf>,
    #[arg(long = "neighbors", value_name = "K")]
    neighbors: Option<usize>,
    #[arg(long, default_value_t = VoteRule::InverseDistance)]
    vote: VoteRule,
    /// Query samples (dd,dv,da); labels, if present, are ignored.
    #[arg(long, value_name = "FILE", conflicts_with = "trajectory", required_unless_present = "trajectory")]
    queries: Option<PathBuf>,
    /// Trajectory CSV; its decision point is recognized.
    #[arg(long, value_name = "FILE")]
    trajectory: Option<PathBuf>,
    /// Lateral velocity marking the decision moment, m/s.
    #[arg(long, default_value_t = DEFAULT_LATERAL_THRESHOLD)]
    threshold: f64,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvalOpts {
    #[arg(long = "folds", alias = "p", default_value_t = 4)]
    folds: usize,
    /// Neighbor count K; defaults to floor(sqrt(N / p)).
    #[arg(long = "neighbors", value_name = "K")]
    neighbors: Option<usize>,
    #[arg(long, default_value_t = VoteRule::InverseDistance)]
    vote: VoteRule,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Label the data by morphology clustering first, dropping noise.
    #[arg(long)]
    auto_label: bool,
    #[command(flatten)]
    morph: MorphOpts,
    /// Text table; stdout when omitted.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Per-fold CSV.
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CrossvalArgs {
    #[arg(long, value_name = "FILE")]
    data: PathBuf,
    #[arg(long, value_parser = parse_method, default_value = "kmcknn")]
    method: MethodName,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    #[command(flatten)]
    eval: EvalOpts,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Dataset CSV; a default synthetic dataset is generated when omitted.
    #[arg(long, value_name = "FILE")]
    data: Option<PathBuf>,
    /// Size of the generated dataset.
    #[arg(long, default_value_t = 9936)]
    n: usize,
    #[arg(long, value_parser = parse_method, default_value = "kmcknn")]
    method: MethodName,
    /// Sub-cluster counts to compare, comma separated.
    #[arg(long, value_parser = parse_list, default_value = "2,3,4")]
    k: KList,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[command(flatten)]
    eval: EvalOpts,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[arg(long, value_name = "FILE")]
    data: PathBuf,
    #[arg(long, default_value_t = 4)]
    target: usize,
    #[arg(long, default_value_t = Linkage::Ward)]
    linkage: Linkage,
    #[arg(long, value_parser = parse_list, default_value = "2,3,4")]
    k: KList,
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    #[command(flatten)]
    eval: EvalOpts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MethodName {
    Knn,
    KmcKnn,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct KList(Vec<usize>);

fn parse_method(s: &str) -> std::result::Result<MethodName, String> {
    match s {
        "knn" => Ok(MethodName::Knn),
        "kmcknn" | "kmc-knn" => Ok(MethodName::KmcKnn),
        _ => Err(format!("unknown method `{s}` (expected knn or kmcknn)")),
    }
}

fn split_values(s: &str) -> impl Iterator<Item = &str> {
    s.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty())
}

fn parse_list(s: &str) -> std::result::Result<KList, String> {
    let v: Vec<usize> = split_values(s)
        .map(|t| t.parse().map_err(|_| format!("`{t}` is not a non-negative integer")))
        .collect::<std::result::Result<_, _>>()?;
    if v.is_empty() {
        return Err("expected at least one value".into());
    }
    Ok(KList(v))
}

fn parse_levels(s: &str) -> std::result::Result<[u32; DIMS], String> {
    let v: Vec<u32> = split_values(s)
        .map(|t| t.parse().map_err(|_| format!("`{t}` is not a non-negative integer")))
        .collect::<std::result::Result<_, _>>()?;
    match v[..] {
        [q] => Ok([q; DIMS]),
        [a, b, c] => Ok([a, b, c]),
        _ => Err(format!("expected 1 or {DIMS} levels, found {}", v.len())),
    }
}

/// Runs the command line and returns the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match parse(&argv) {
        Ok(Ok(cli)) => cli,
        Ok(Err(e)) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Parses `argv`, then reparses with the config file's entries appended as
/// flags so that they take precedence.
fn parse(argv: &[OsString]) -> Result<std::result::Result<Cli, clap::Error>> {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => return Ok(Err(e)),
    };
    let Some(path) = cli.config.clone() else {
        return Ok(Ok(cli));
    };
    let kv = KeyValues::load(&path)?;
    let name = subcommand_name(&cli.command);
    let root = Cli::command();
    let sub = root.find_subcommand(name).expect("known subcommand");
    let mut extra: Vec<OsString> = Vec::new();
    for (raw_key, value, line) in kv.iter() {
        let dashed = raw_key.replace('_', "-");
        let key = dashed.as_str();
        let arg = sub
            .get_arguments()
            .find(|a| a.get_id() != "config" && (a.get_long() == Some(key) || a.get_all_aliases().is_some_and(|al| al.contains(&key))))
            .ok_or_else(|| Error::parse(kv.source(), line, format!("unknown option `{raw_key}` for `{name}`")))?;
        let long = format!("--{}", arg.get_long().unwrap_or(key));
        if arg.get_action().takes_values() {
            extra.push(long.into());
            extra.push(value.into());
        } else {
            match value {
                "true" | "yes" | "1" => extra.push(long.into()),
                "false" | "no" | "0" => {}
                _ => return Err(Error::parse(kv.source(), line, format!("`{raw_key}` expects true or false"))),
            }
        }
    }
    let mut full = argv.to_vec();
    full.extend(extra);
    Ok(Cli::try_parse_from(full))
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Generate(_) => "generate",
        Command::Cluster(_) => "cluster",
        Command::Ahc(_) => "ahc",
        Command::Train(_) => "train",
        Command::Recognize(_) => "recognize",
        Command::Crossval(_) => "crossval",
        Command::Bench(_) => "bench",
        Command::Report(_) => "report",
    }
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Generate(a) => generate(a),
        Command::Cluster(a) => cluster(a),
        Command::Ahc(a) => ahc(a),
        Command::Train(a) => train(a),
        Command::Recognize(a) => recognize(a),
        Command::Crossval(a) => crossval(a),
        Command::Bench(a) => bench(a),
        Command::Report(a) => report(a),
    }
}

fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => io::write_atomic(p, bytes),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn generate(a: GenerateArgs) -> Result<()> {
    let profiles = match &a.profiles {
        Some(p) => load_profiles(p)?,
        None => default_profiles(),
    };
    let mut buf = Vec::new();
    if let Some(style) = a.scenario {
        let profile = profiles
            .iter()
            .find(|p| p.label == style)
            .copied()
            .or_else(|| StyleProfile::for_label(style))
            .ok_or_else(|| Error::InvalidParameter(format!("no profile for style `{style}`")))?;
        let s = simulate_scenario(&profile, a.seed)?;
        io::write_trajectory(&mut buf, &s.frames)?;
    } else {
        let d = generate_features(&profiles, a.n, a.seed)?;
        io::write_dataset(&mut buf, &d)?;
    }
    emit(a.out.as_deref(), &buf)
}

fn cluster_rows(c: &MorphClustering) -> Vec<ClusterRow> {
    let styles = c.infer_styles();
    ClusterRow::from_parts(&c.centers, &c.ranges, &c.counts, styles.as_deref())
}

fn cluster(a: ClusterArgs) -> Result<()> {
    let data = io::load_dataset(&a.data)?;
    let c = morph_cluster(&data, &a.morph.params())?;
    let mut report = Vec::new();
    io::write_cluster_report(&mut report, &cluster_rows(&c))?;
    let labels = match &a.labels {
        None => None,
        Some(path) => {
            let mut buf = Vec::new();
            match c.sample_labels() {
                Some(l) => io::write_dataset(&mut buf, &data.clone().with_labels(l)?)?,
                None => {
                    eprintln!(
                        "warning: {} clusters found; writing cluster indices instead of styles",
                        c.num_clusters()
                    );
                    let mut w = csv::Writer::from_writer(&mut buf);
                    let err = |e: csv::Error| Error::Io(std::io::Error::other(e.to_string()));
                    w.write_record(["index", "cluster"]).map_err(err)?;
                    for (i, x) in c.assignments.iter().enumerate() {
                        let name = x.map_or("noise".to_string(), |j| j.to_string());
                        w.write_record([i.to_string(), name]).map_err(err)?;
                    }
                    w.flush()?;
                }
            }
            Some((path, buf))
        }
    };
    eprintln!(
        "{} clusters, {} noise samples, {} raw regions",
        c.num_clusters(),
        c.noise_indices.len(),
        c.raw_components
    );
    if let Some((path, buf)) = labels {
        io::write_atomic(path, &buf)?;
    }
    emit(a.out.as_deref(), &report)
}

fn ahc(a: AhcArgs) -> Result<()> {
    let data = io::load_dataset(&a.data)?;
    let r = ahc_fit(&data, a.target, a.linkage)?;
    let mut buf = Vec::new();
    io::write_cluster_report(&mut buf, &ClusterRow::from_parts(&r.centers, &r.ranges, &r.counts, None))?;
    emit(a.out.as_deref(), &buf)
}

fn train(a: TrainArgs) -> Result<()> {
    let data = io::load_dataset(&a.data)?;
    let clean = data.without_noise()?;
    if clean.len() < data.len() {
        eprintln!("skipping {} noise samples", data.len() - clean.len());
    }
    let model = KmcKnnModel::train(
        &clean,
        &KmcKnnOptions {
            k: a.rec.k,
            seed: a.rec.seed,
            neighbors: a.rec.neighbors,
            vote: a.rec.vote,
            ..KmcKnnOptions::default()
        },
    )?;
    model.save(&a.model)
}

fn recognize(a: RecognizeArgs) -> Result<()> {
    let queries = match (&a.queries, &a.trajectory) {
        (Some(q), _) => io::load_dataset(q)?.samples().to_vec(),
        (None, Some(t)) => vec![extract_decision_point(&io::load_trajectory(t)?, a.threshold)?],
        (None, None) => unreachable!("clap requires one of --queries and --trajectory"),
    };
    let labels: Vec<StyleLabel> = if let Some(m) = &a.model {
        let model = KmcKnnModel::load(m)?;
        queries.iter().map(|x| model.recognize(x).map(|r| r.label)).collect::<Result<_>>()?
    } else {
        let train = io::load_dataset(a.train.as_deref().expect("clap requires --model or --train"))?.without_noise()?;
        let model = KnnModel::new(&train, a.neighbors, a.vote)?;
        queries.iter().map(|x| model.classify(x).map(|r| r.label)).collect::<Result<_>>()?
    };
    let mut buf = Vec::new();
    io::write_labels(&mut buf, &labels)?;
    emit(a.out.as_deref(), &buf)
}

/// Dataset used for evaluation: as given, or relabeled by morphology with
/// noise dropped.
fn eval_data(data: Dataset, opts: &EvalOpts) -> Result<Dataset> {
    if !opts.auto_label {
        return data.without_noise();
    }
    let c = morph_cluster(&data, &opts.morph.params())?;
    let labels = c.sample_labels().ok_or_else(|| Error::NoClusters {
        q: opts.morph.q,
        radius: opts.morph.radius,
        noise_fraction: opts.morph.noise_fraction,
        components: c.num_clusters(),
    })?;
    data.with_labels(labels)?.without_noise()
}

fn bench_config(method: Method, repeats: usize, opts: &EvalOpts) -> BenchConfig {
    BenchConfig {
        method,
        folds: opts.folds,
        seed: opts.seed,
        repeats,
        neighbors: opts.neighbors,
        vote: opts.vote,
    }
}

fn write_reports(reports: &[EvalReport], opts: &EvalOpts, preface: &str) -> Result<()> {
    let csv_buf = match &opts.csv {
        Some(_) => {
            let mut b = Vec::new();
            write_csv(&mut b, reports)?;
            Some(b)
        }
        None => None,
    };
    let text = format!("{preface}{}", format_table(reports));
    if let (Some(p), Some(b)) = (&opts.csv, csv_buf) {
        io::write_atomic(p, &b)?;
    }
    emit(opts.out.as_deref(), text.as_bytes())
}

fn crossval(a: CrossvalArgs) -> Result<()> {
    let data = eval_data(io::load_dataset(&a.data)?, &a.eval)?;
    let method = match a.method {
        MethodName::Knn => Method::Knn,
        MethodName::KmcKnn => Method::KmcKnn { k: a.k },
    };
    let r = benchmark(&data, &bench_config(method, a.repeats, &a.eval))?;
    write_reports(&[r], &a.eval, "")
}

fn comparison(data: &Dataset, ks: &[usize], with_kmc: bool, repeats: usize, opts: &EvalOpts) -> Result<Vec<EvalReport>> {
    let mut reports = vec![benchmark(data, &bench_config(Method::Knn, repeats, opts))?];
    if with_kmc {
        for &k in ks {
            reports.push(benchmark(data, &bench_config(Method::KmcKnn { k }, repeats, opts))?);
        }
    }
    Ok(reports)
}

fn speedups(reports: &[EvalReport]) -> String {
    let mut s = String::new();
    for r in &reports[1..] {
        let _ = writeln!(
            s,
            "kmcknn k={}: speedup {:.2}x, T0 reduction {:.2}%, distance evaluations reduced {:.2}%",
            r.method.k().unwrap_or(0),
            r.speedup_over(&reports[0]),
            100.0 * r.time_reduction(&reports[0]),
            100.0 * r.distance_reduction(&reports[0])
        );
    }
    s
}

fn bench(a: BenchArgs) -> Result<()> {
    let raw = match &a.data {
        Some(p) => io::load_dataset(p)?,
        None => generate_features(&default_profiles(), a.n, a.eval.seed)?,
    };
    let data = eval_data(raw, &a.eval)?;
    let reports = comparison(&data, &a.k.0, a.method == MethodName::KmcKnn, a.repeats, &a.eval)?;
    let csv_buf = match &a.eval.csv {
        Some(_) => {
            let mut b = Vec::new();
            write_csv(&mut b, &reports)?;
            Some(b)
        }
        None => None,
    };
    let text = format!("{}\n{}", format_table(&reports), speedups(&reports));
    if let (Some(p), Some(b)) = (&a.eval.csv, csv_buf) {
        io::write_atomic(p, &b)?;
    }
    emit(a.eval.out.as_deref(), text.as_bytes())
}

fn report(a: ReportArgs) -> Result<()> {
    let data = io::load_dataset(&a.data)?;
    let morph = morph_cluster(&data, &a.eval.morph.params())?;
    let tree = ahc_fit(&data, a.target, a.linkage)?;
    let span = data.extrema().span();
    let to_vecs = |c: &[crate::features::FeatureVector]| -> Vec<Vec<f64>> { c.iter().map(|f| f.to_array().to_vec()).collect() };
    let pairs = match_centers(&to_vecs(&morph.centers), &to_vecs(&tree.centers), &span)?;
    let styles = morph.infer_styles();

    let mut text = String::new();
    let _ = writeln!(
        text,
        "Morphology ({} clusters, {} noise) vs. AHC ({} linkage, {} clusters)",
        morph.num_clusters(),
        morph.noise_indices.len(),
        a.linkage,
        tree.num_clusters()
    );
    let _ = writeln!(
        text,
        "{:<12} {:>10} {:>10} {:>10}   {:>10} {:>10} {:>10}   {:>8} {:>8} {:>8}",
        "cluster", "morph dd", "morph dv", "morph da", "ahc dd", "ahc dv", "ahc da", "%span dd", "%span dv", "%span da"
    );
    for &(i, j, _) in &pairs {
        let name = styles.as_ref().map_or(i.to_string(), |s| s[i].to_string());
        let (m, h) = (morph.centers[i].to_array(), tree.centers[j].to_array());
        let pct: Vec<f64> = (0..DIMS).map(|d| 100.0 * (m[d] - h[d]).abs() / span[d]).collect();
        let _ = writeln!(
            text,
            "{:<12} {:>10.4} {:>10.4} {:>10.4}   {:>10.4} {:>10.4} {:>10.4}   {:>8.2} {:>8.2} {:>8.2}",
            name, m[0], m[1], m[2], h[0], h[1], h[2], pct[0], pct[1], pct[2]
        );
    }
    let _ = writeln!(text, "span: {}", FEATURE_NAMES.iter().zip(span).map(|(n, s)| format!("{n} {s:.4}")).collect::<Vec<_>>().join(", "));
    let _ = writeln!(text);

    let eval = match morph.sample_labels() {
        Some(l) => data.clone().with_labels(l)?.without_noise()?,
        None => data.without_noise()?,
    };
    let reports = comparison(&eval, &a.k.0, true, a.repeats, &a.eval)?;
    let _ = writeln!(text, "KNN vs. kMC-KNN");
    text.push_str(&format_table(&reports));
    text.push_str(&speedups(&reports));

    if let Some(p) = &a.eval.csv {
        let mut b = Vec::new();
        write_csv(&mut b, &reports)?;
        io::write_atomic(p, &b)?;
    }
    emit(a.eval.out.as_deref(), text.as_bytes())
}
