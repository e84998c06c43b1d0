//! Feature-space types: decision-point feature vectors, labeled datasets,
//! min-max normalization, grid quantization and decision-moment extraction
//! from simulated or recorded trajectories.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Number of feature dimensions: (Δd, Δv, Δa).
pub const DIMS: usize = 3;

/// Column names in canonical order.
pub const FEATURE_NAMES: [&str; DIMS] = ["dd", "dv", "da"];

/// Lateral velocity (m/s) at which a lane change is considered started.
pub const DEFAULT_LATERAL_THRESHOLD: f64 = 0.21;

/// A point in (normalized) feature space, in canonical `(dd, dv, da)` order.
pub type Point = [f64; DIMS];

/// Relative kinematics at one lane-change decision moment.
///
/// Every component is an absolute difference, so all are non-negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector {
    /// Relative distance difference |dA - dB|, meters.
    pub dd: f64,
    /// Relative speed difference ||vAC| - |vBC||, m/s.
    pub dv: f64,
    /// Relative acceleration difference ||aAC| - |aBC||, m/s².
    pub da: f64,
}

impl FeatureVector {
    pub fn new(dd: f64, dv: f64, da: f64) -> Result<Self> {
        let f = FeatureVector { dd, dv, da };
        f.validate()?;
        Ok(f)
    }

    pub fn from_array(a: Point) -> Self {
        FeatureVector {
            dd: a[0],
            dv: a[1],
            da: a[2],
        }
    }

    pub fn to_array(self) -> Point {
        [self.dd, self.dv, self.da]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in FEATURE_NAMES.iter().zip(self.to_array()) {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "feature `{name}` must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Decision-making style. `Noise` only ever comes out of clustering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StyleLabel {
    Moderate,
    Vague,
    Aggressive,
    Noise,
}

/// The three recognizable styles, in class-index order.
pub const STYLES: [StyleLabel; 3] = [StyleLabel::Moderate, StyleLabel::Vague, StyleLabel::Aggressive];

impl StyleLabel {
    /// Index into per-class arrays; `None` for noise.
    pub fn class_index(self) -> Option<usize> {
        match self {
            StyleLabel::Moderate => Some(0),
            StyleLabel::Vague => Some(1),
            StyleLabel::Aggressive => Some(2),
            StyleLabel::Noise => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            StyleLabel::Moderate => "moderate",
            StyleLabel::Vague => "vague",
            StyleLabel::Aggressive => "aggressive",
            StyleLabel::Noise => "noise",
        }
    }
}

impl fmt::Display for StyleLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for StyleLabel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "moderate" => Ok(StyleLabel::Moderate),
            "vague" => Ok(StyleLabel::Vague),
            "aggressive" => Ok(StyleLabel::Aggressive),
            "noise" => Ok(StyleLabel::Noise),
            other => Err(format!(
                "unknown label `{other}` (expected moderate|vague|aggressive|noise)"
            )),
        }
    }
}

/// Per-dimension minimum and maximum in physical units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrema {
    pub min: Point,
    pub max: Point,
}

impl Extrema {
    pub fn from_points<'a, I>(points: I) -> Option<Self>
    where
        I: IntoIterator<Item = &'a FeatureVector>,
    {
        let mut it = points.into_iter();
        let first = it.next()?.to_array();
        let mut ext = Extrema {
            min: first,
            max: first,
        };
        for p in it {
            for (i, v) in p.to_array().into_iter().enumerate() {
                ext.min[i] = ext.min[i].min(v);
                ext.max[i] = ext.max[i].max(v);
            }
        }
        Some(ext)
    }

    pub fn span(&self) -> Point {
        std::array::from_fn(|i| self.max[i] - self.min[i])
    }

    /// Fails on the first dimension whose spread is zero.
    pub fn check_spread(&self) -> Result<()> {
        for i in 0..DIMS {
            if !(self.max[i] > self.min[i]) {
                return Err(Error::DegenerateDimension {
                    dim: FEATURE_NAMES[i],
                    value: self.min[i],
                });
            }
        }
        Ok(())
    }

    /// Min-max normalization without clipping. Assumes a non-degenerate spread.
    pub fn normalize(&self, x: &FeatureVector) -> Point {
        let a = x.to_array();
        std::array::from_fn(|i| (a[i] - self.min[i]) / (self.max[i] - self.min[i]))
    }

    /// Normalization for points outside the training set; result clipped to [0, 1].
    pub fn normalize_clipped(&self, x: &FeatureVector) -> Point {
        self.normalize(x).map(|v| v.clamp(0.0, 1.0))
    }

    pub fn denormalize(&self, p: &Point) -> FeatureVector {
        FeatureVector::from_array(std::array::from_fn(|i| {
            self.min[i] + p[i] * (self.max[i] - self.min[i])
        }))
    }
}

/// An ordered list of decision points, optionally labeled, with cached extrema.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    samples: Vec<FeatureVector>,
    labels: Option<Vec<StyleLabel>>,
    extrema: Extrema,
}

impl Dataset {
    pub fn new(samples: Vec<FeatureVector>, labels: Option<Vec<StyleLabel>>) -> Result<Self> {
        for s in &samples {
            s.validate()?;
        }
        if let Some(l) = &labels {
            if l.len() != samples.len() {
                return Err(Error::LengthMismatch {
                    left: samples.len(),
                    right: l.len(),
                });
            }
        }
        let extrema = Extrema::from_points(&samples)
            .ok_or_else(|| Error::InvalidParameter("dataset is empty".into()))?;
        Ok(Dataset {
            samples,
            labels,
            extrema,
        })
    }

    pub fn labeled(samples: Vec<FeatureVector>, labels: Vec<StyleLabel>) -> Result<Self> {
        Self::new(samples, Some(labels))
    }

    pub fn unlabeled(samples: Vec<FeatureVector>) -> Result<Self> {
        Self::new(samples, None)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[FeatureVector] {
        &self.samples
    }

    pub fn labels(&self) -> Option<&[StyleLabel]> {
        self.labels.as_deref()
    }

    pub fn extrema(&self) -> &Extrema {
        &self.extrema
    }

    /// Replaces the labels, keeping samples and extrema.
    pub fn with_labels(mut self, labels: Vec<StyleLabel>) -> Result<Self> {
        if labels.len() != self.samples.len() {
            return Err(Error::LengthMismatch {
                left: self.samples.len(),
                right: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Subset by sample index, in the given order. Extrema are recomputed.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let samples = indices.iter().map(|&i| self.samples[i]).collect();
        let labels = self
            .labels
            .as_ref()
            .map(|l| indices.iter().map(|&i| l[i]).collect());
        Dataset::new(samples, labels)
    }

    /// Drops samples labeled noise. Unlabeled datasets are returned unchanged.
    pub fn without_noise(&self) -> Result<Self> {
        match &self.labels {
            None => Ok(self.clone()),
            Some(l) => {
                let keep: Vec<usize> = (0..self.len())
                    .filter(|&i| l[i] != StyleLabel::Noise)
                    .collect();
                self.subset(&keep)
            }
        }
    }
}

/// Min-max normalizes every sample with the dataset's own extrema.
pub fn normalize(data: &Dataset) -> Result<Vec<Point>> {
    let ext = data.extrema();
    ext.check_spread()?;
    Ok(data.samples().iter().map(|s| ext.normalize(s)).collect())
}

/// Maps a normalized value to an integer grid coordinate in `1..=q+1`.
pub fn quantize(value: f64, q: u32) -> Result<u32> {
    if q == 0 {
        return Err(Error::InvalidParameter("quantization level q must be >= 1".into()));
    }
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::OutOfUnitRange {
            what: "normalized value",
            value,
        });
    }
    // Truncation toward zero; value is non-negative so this is floor.
    Ok((value * q as f64).trunc() as u32 + 1)
}

/// One time step of the three-vehicle lane-change scenario.
///
/// `d_a`/`d_b` are the gaps between the subject vehicle C and the front
/// vehicle A / side vehicle B.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioFrame {
    pub t: f64,
    pub d_a: f64,
    pub d_b: f64,
    pub v_a: f64,
    pub v_b: f64,
    pub v_c: f64,
    pub a_a: f64,
    pub a_b: f64,
    pub a_c: f64,
    pub v_lat_c: f64,
}

impl ScenarioFrame {
    pub fn features(&self) -> FeatureVector {
        FeatureVector {
            dd: (self.d_a - self.d_b).abs(),
            dv: ((self.v_a - self.v_c).abs() - (self.v_b - self.v_c).abs()).abs(),
            da: ((self.a_a - self.a_c).abs() - (self.a_b - self.a_c).abs()).abs(),
        }
    }
}

/// Index of the first frame whose lateral velocity reaches `threshold`.
pub fn decision_frame_index(trajectory: &[ScenarioFrame], threshold: f64) -> Result<usize> {
    if trajectory.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    if let Some(w) = trajectory.windows(2).position(|w| w[1].t < w[0].t) {
        return Err(Error::InvalidParameter(format!(
            "trajectory time goes backwards at frame {}",
            w + 1
        )));
    }
    trajectory
        .iter()
        .position(|f| f.v_lat_c >= threshold)
        .ok_or(Error::NoLaneChange { threshold })
}

/// Features at the decision moment: the first frame where the subject's
/// lateral velocity reaches `threshold`.
pub fn extract_decision_point(trajectory: &[ScenarioFrame], threshold: f64) -> Result<FeatureVector> {
    let i = decision_frame_index(trajectory, threshold)?;
    Ok(trajectory[i].features())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn frame(t: f64, v_lat_c: f64) -> ScenarioFrame {
        ScenarioFrame {
            t,
            d_a: 20.0,
            d_b: 15.0,
            v_a: 12.0,
            v_b: 14.0,
            v_c: 13.0,
            a_a: 0.1,
            a_b: 0.2,
            a_c: 0.15,
            v_lat_c,
        }
    }

    fn ds(points: &[[f64; 3]]) -> Dataset {
        Dataset::unlabeled(points.iter().map(|&p| FeatureVector::from_array(p)).collect()).unwrap()
    }

    #[test]
    fn normalize_midpoint_and_endpoints() {
        let d = ds(&[[0.0, 0.0, 0.0], [16.0, 1.0, 0.5], [32.0, 2.0, 1.0]]);
        let n = normalize(&d).unwrap();
        assert_eq!(n[0], [0.0, 0.0, 0.0]);
        assert_eq!(n[1], [0.5, 0.5, 0.5]);
        assert_eq!(n[2], [1.0, 1.0, 1.0]);
    }

    #[test]
    fn normalize_rejects_degenerate_dimension() {
        let d = ds(&[[1.0, 0.3, 0.1], [2.0, 0.3, 0.2]]);
        match normalize(&d) {
            Err(Error::DegenerateDimension { dim, .. }) => assert_eq!(dim, "dv"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dataset_rejects_negative_feature() {
        let r = Dataset::unlabeled(vec![FeatureVector {
            dd: -1.0,
            dv: 0.0,
            da: 0.0,
        }]);
        assert!(r.is_err());
    }

    #[test]
    fn quantize_examples() {
        assert_eq!(quantize(0.5, 100).unwrap(), 51);
        assert_eq!(quantize(0.0, 100).unwrap(), 1);
        assert_eq!(quantize(1.0, 100).unwrap(), 101);
        assert_eq!(quantize(0.999, 100).unwrap(), 100);
        assert!(quantize(1.0001, 100).is_err());
        assert!(quantize(-0.1, 100).is_err());
        assert!(quantize(0.5, 0).is_err());
    }

    #[test]
    fn frame_features_symmetric_case() {
        let f = frame(0.0, 0.0).features();
        assert!((f.dd - 5.0).abs() < 1e-12);
        assert!(f.dv.abs() < 1e-12);
        assert!(f.da.abs() < 1e-12);
    }

    #[test]
    fn first_crossing_is_selected() {
        let traj: Vec<_> = [0.0, 0.1, 0.25, 0.4]
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let mut f = frame(i as f64 * 0.02, v);
                f.d_a = 20.0 + i as f64;
                f
            })
            .collect();
        assert_eq!(decision_frame_index(&traj, DEFAULT_LATERAL_THRESHOLD).unwrap(), 2);
        let f = extract_decision_point(&traj, DEFAULT_LATERAL_THRESHOLD).unwrap();
        assert!((f.dd - 7.0).abs() < 1e-12);
    }

    #[test]
    fn no_crossing_and_empty_are_errors() {
        let traj = vec![frame(0.0, 0.0), frame(0.02, 0.2)];
        assert!(matches!(
            extract_decision_point(&traj, 0.21),
            Err(Error::NoLaneChange { .. })
        ));
        assert!(matches!(
            extract_decision_point(&[], 0.21),
            Err(Error::EmptyTrajectory)
        ));
        let backwards = vec![frame(1.0, 0.0), frame(0.5, 0.3)];
        assert!(extract_decision_point(&backwards, 0.21).is_err());
    }

    #[test]
    fn label_round_trip() {
        for l in STYLES.into_iter().chain([StyleLabel::Noise]) {
            assert_eq!(l.as_str().parse::<StyleLabel>().unwrap(), l);
        }
        assert!("Moderate".parse::<StyleLabel>().is_err());
    }

    proptest! {
        #[test]
        fn denormalize_inverts_normalize(
            pts in prop::collection::vec((0.0f64..40.0, 0.0f64..2.0, 0.0f64..0.3), 2..40)
        ) {
            let samples: Vec<_> = pts.iter().map(|&(a, b, c)| FeatureVector::from_array([a, b, c])).collect();
            let d = Dataset::unlabeled(samples).unwrap();
            prop_assume!(d.extrema().check_spread().is_ok());
            let ext = d.extrema();
            for (s, n) in d.samples().iter().zip(normalize(&d).unwrap()) {
                for v in n {
                    prop_assert!((0.0..=1.0).contains(&v));
                }
                let back = ext.denormalize(&n).to_array();
                for (x, y) in back.iter().zip(s.to_array()) {
                    prop_assert!((x - y).abs() <= 1e-12 * (1.0 + y.abs()));
                }
            }
        }

        #[test]
        fn quantize_monotone(a in 0.0f64..=1.0, b in 0.0f64..=1.0, q in 1u32..500) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let (ql, qh) = (quantize(lo, q).unwrap(), quantize(hi, q).unwrap());
            prop_assert!(ql <= qh);
            prop_assert!((1..=q + 1).contains(&ql) && (1..=q + 1).contains(&qh));
        }

        #[test]
        fn prepending_quiet_frames_keeps_decision_point(
            quiet in prop::collection::vec(0.0f64..0.2, 0..20),
            gap in 1.0f64..30.0,
        ) {
            let mut tail = vec![frame(0.0, 0.1), frame(0.02, 0.3)];
            tail[1].d_a = gap;
            let base = extract_decision_point(&tail, 0.21).unwrap();
            let mut traj: Vec<_> = quiet.iter().enumerate().map(|(i, &v)| frame(i as f64 * 0.02, v)).collect();
            let offset = traj.len() as f64 * 0.02;
            traj.extend(tail.iter().map(|f| ScenarioFrame { t: f.t + offset, ..*f }));
            prop_assert_eq!(extract_decision_point(&traj, 0.21).unwrap(), base);
        }
    }
}
