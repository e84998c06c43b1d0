//! CSV readers and writers for datasets, trajectories and cluster reports.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::features::{Dataset, FeatureVector, ScenarioFrame, StyleLabel};

pub const DATASET_HEADER: [&str; 4] = ["dd", "dv", "da", "label"];
pub const TRAJECTORY_HEADER: [&str; 10] = ["t", "dA", "dB", "vA", "vB", "vC", "aA", "aB", "aC", "vLatC"];
pub const CLUSTER_HEADER: [&str; 11] = [
    "cluster", "center_dd", "center_dv", "center_da", "min_dd", "max_dd", "min_dv", "max_dv", "min_da", "max_da",
    "count",
];

/// Writes `bytes` to a temporary file next to `path`, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn csv_reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(r)
}

fn line_of(rec: &csv::StringRecord) -> u64 {
    rec.position().map_or(0, |p| p.line())
}

fn csv_error(source: &str, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        kind => Error::parse(source, line, format!("{kind:?}")),
    }
}

fn field_f64(source: &str, rec: &csv::StringRecord, i: usize, name: &str) -> Result<f64> {
    let s = rec.get(i).unwrap_or("");
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::parse(source, line_of(rec), format!("column `{name}`: `{s}` is not a finite number")))
}

fn looks_like_header(rec: &csv::StringRecord) -> bool {
    rec.get(0).is_some_and(|f| f.parse::<f64>().is_err())
}

/// Reads `dd,dv,da[,label]` rows. A header row is optional. Either every row
/// has a label or none does.
pub fn read_dataset<R: Read>(r: R, source: &str) -> Result<Dataset> {
    let mut samples = Vec::new();
    let mut labels: Vec<StyleLabel> = Vec::new();
    let mut labeled: Option<bool> = None;
    for (n, rec) in csv_reader(r).records().enumerate() {
        let rec = rec.map_err(|e| csv_error(source, e))?;
        if n == 0 && looks_like_header(&rec) {
            let names: Vec<&str> = rec.iter().collect();
            if names.len() < 3 || names[..3] != DATASET_HEADER[..3] || (names.len() == 4 && names[3] != "label") {
                return Err(Error::parse(source, line_of(&rec), format!("unexpected header `{}`", names.join(","))));
            }
            continue;
        }
        let has_label = match rec.len() {
            3 => false,
            4 => true,
            k => return Err(Error::parse(source, line_of(&rec), format!("expected 3 or 4 columns, found {k}"))),
        };
        if *labeled.get_or_insert(has_label) != has_label {
            return Err(Error::parse(source, line_of(&rec), "rows mix labeled and unlabeled samples"));
        }
        let f = FeatureVector {
            dd: field_f64(source, &rec, 0, "dd")?,
            dv: field_f64(source, &rec, 1, "dv")?,
            da: field_f64(source, &rec, 2, "da")?,
        };
        f.validate().map_err(|e| Error::parse(source, line_of(&rec), e.to_string()))?;
        samples.push(f);
        if has_label {
            let l: StyleLabel = rec[3].parse().map_err(|e: String| Error::parse(source, line_of(&rec), e))?;
            labels.push(l);
        }
    }
    if samples.is_empty() {
        return Err(Error::parse(source, 0, "no samples"));
    }
    Dataset::new(samples, labeled.unwrap_or(false).then_some(labels))
}

pub fn load_dataset(path: &Path) -> Result<Dataset> {
    read_dataset(fs::File::open(path)?, &path.display().to_string())
}

pub fn write_dataset<W: Write>(w: W, data: &Dataset) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let cols = if data.labels().is_some() { 4 } else { 3 };
    out.write_record(&DATASET_HEADER[..cols]).map_err(|e| csv_error("output", e))?;
    for (i, s) in data.samples().iter().enumerate() {
        let mut row = vec![s.dd.to_string(), s.dv.to_string(), s.da.to_string()];
        if let Some(l) = data.labels() {
            row.push(l[i].to_string());
        }
        out.write_record(&row).map_err(|e| csv_error("output", e))?;
    }
    out.flush()?;
    Ok(())
}

pub fn save_dataset(path: &Path, data: &Dataset) -> Result<()> {
    let mut buf = Vec::new();
    write_dataset(&mut buf, data)?;
    write_atomic(path, &buf)
}

/// Reads a trajectory with columns `t,dA,dB,vA,vB,vC,aA,aB,aC,vLatC`.
pub fn read_trajectory<R: Read>(r: R, source: &str) -> Result<Vec<ScenarioFrame>> {
    let mut frames = Vec::new();
    for (n, rec) in csv_reader(r).records().enumerate() {
        let rec = rec.map_err(|e| csv_error(source, e))?;
        if n == 0 && looks_like_header(&rec) {
            continue;
        }
        if rec.len() != TRAJECTORY_HEADER.len() {
            return Err(Error::parse(
                source,
                line_of(&rec),
                format!("expected {} columns, found {}", TRAJECTORY_HEADER.len(), rec.len()),
            ));
        }
        let mut v = [0.0; 10];
        for (i, slot) in v.iter_mut().enumerate() {
            *slot = field_f64(source, &rec, i, TRAJECTORY_HEADER[i])?;
        }
        frames.push(ScenarioFrame {
            t: v[0],
            d_a: v[1],
            d_b: v[2],
            v_a: v[3],
            v_b: v[4],
            v_c: v[5],
            a_a: v[6],
            a_b: v[7],
            a_c: v[8],
            v_lat_c: v[9],
        });
    }
    Ok(frames)
}

pub fn load_trajectory(path: &Path) -> Result<Vec<ScenarioFrame>> {
    read_trajectory(fs::File::open(path)?, &path.display().to_string())
}

pub fn write_trajectory<W: Write>(w: W, frames: &[ScenarioFrame]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(TRAJECTORY_HEADER).map_err(|e| csv_error("output", e))?;
    for f in frames {
        let row = [f.t, f.d_a, f.d_b, f.v_a, f.v_b, f.v_c, f.a_a, f.a_b, f.a_c, f.v_lat_c];
        out.write_record(row.iter().map(f64::to_string)).map_err(|e| csv_error("output", e))?;
    }
    out.flush()?;
    Ok(())
}

/// One row of a cluster report.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterRow {
    pub name: String,
    pub center: FeatureVector,
    pub min: FeatureVector,
    pub max: FeatureVector,
    pub count: usize,
}

impl ClusterRow {
    /// Rows from parallel center/range/count slices, named by `names` or by index.
    pub fn from_parts(
        centers: &[FeatureVector],
        ranges: &[(FeatureVector, FeatureVector)],
        counts: &[usize],
        names: Option<&[StyleLabel]>,
    ) -> Vec<ClusterRow> {
        (0..centers.len())
            .map(|j| ClusterRow {
                name: names.map_or_else(|| j.to_string(), |n| n[j].to_string()),
                center: centers[j],
                min: ranges[j].0,
                max: ranges[j].1,
                count: counts[j],
            })
            .collect()
    }
}

pub fn write_cluster_report<W: Write>(w: W, rows: &[ClusterRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CLUSTER_HEADER).map_err(|e| csv_error("output", e))?;
    for r in rows {
        let nums = [
            r.center.dd, r.center.dv, r.center.da, r.min.dd, r.max.dd, r.min.dv, r.max.dv, r.min.da, r.max.da,
        ];
        let mut rec = vec![r.name.clone()];
        rec.extend(nums.iter().map(|v| format!("{v:.4}")));
        rec.push(r.count.to_string());
        out.write_record(&rec).map_err(|e| csv_error("output", e))?;
    }
    out.flush()?;
    Ok(())
}

/// Per-sample labels, one `index,label` row each.
pub fn write_labels<W: Write>(w: W, labels: &[StyleLabel]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["index", "label"]).map_err(|e| csv_error("output", e))?;
    for (i, l) in labels.iter().enumerate() {
        out.write_record([i.to_string(), l.to_string()]).map_err(|e| csv_error("output", e))?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use StyleLabel::*;

    #[test]
    fn dataset_round_trip() {
        let d = Dataset::labeled(
            vec![FeatureVector::new(4.6597, 0.4779, 0.047).unwrap(), FeatureVector::new(0.1 + 0.2, 1e-9, 3.0).unwrap()],
            vec![Moderate, Aggressive],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_dataset(&mut buf, &d).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("dd,dv,da,label\n"));
        assert_eq!(read_dataset(buf.as_slice(), "x").unwrap(), d);
    }

    #[test]
    fn headerless_unlabeled() {
        let d = read_dataset("1,2,3\n4,5,6\n".as_bytes(), "x").unwrap();
        assert_eq!(d.len(), 2);
        assert!(d.labels().is_none());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = "dd,dv,da,label\n1,2,3,moderate\n1,abc,3,vague\n";
        match read_dataset(bad.as_bytes(), "f.csv") {
            Err(Error::Parse { line, source_name, message }) => {
                assert_eq!((line, source_name.as_str()), (3, "f.csv"));
                assert!(message.contains("dv"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        let mixed = "1,2,3,moderate\n1,2,3\n";
        assert!(matches!(read_dataset(mixed.as_bytes(), "f"), Err(Error::Parse { line: 2, .. })));
        let neg = "1,-2,3\n";
        assert!(matches!(read_dataset(neg.as_bytes(), "f"), Err(Error::Parse { line: 1, .. })));
        let label = "1,2,3,sleepy\n";
        assert!(matches!(read_dataset(label.as_bytes(), "f"), Err(Error::Parse { line: 1, .. })));
        assert!(read_dataset("dd,dv,da\n".as_bytes(), "f").is_err());
    }

    #[test]
    fn trajectory_round_trip() {
        let f = ScenarioFrame {
            t: 0.02,
            d_a: 20.0,
            d_b: 15.5,
            v_a: 14.0,
            v_b: 12.0,
            v_c: 13.0,
            a_a: 0.1,
            a_b: -0.2,
            a_c: 0.0,
            v_lat_c: 0.3,
        };
        let mut buf = Vec::new();
        write_trajectory(&mut buf, &[f, f]).unwrap();
        assert_eq!(read_trajectory(buf.as_slice(), "t").unwrap(), vec![f, f]);
        assert!(matches!(read_trajectory("t,dA\n0,1\n".as_bytes(), "t"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn cluster_report_columns() {
        let c = FeatureVector::new(1.0, 2.0, 3.0).unwrap();
        let rows = ClusterRow::from_parts(&[c], &[(c, c)], &[7], Some(&[Vague]));
        let mut buf = Vec::new();
        write_cluster_report(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CLUSTER_HEADER.join(","));
        assert_eq!(lines.next().unwrap(), "vague,1.0000,2.0000,3.0000,1.0000,1.0000,2.0000,2.0000,3.0000,3.0000,7");
    }
}
