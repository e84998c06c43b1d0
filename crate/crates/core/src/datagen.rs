//! Synthetic decision points and three-vehicle lane-change scenarios.

use std::f64::consts::PI;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::config::KeyValues;
use crate::error::{Error, Result};
use crate::features::{
    decision_frame_index, Dataset, FeatureVector, ScenarioFrame, StyleLabel, DEFAULT_LATERAL_THRESHOLD, DIMS,
    FEATURE_NAMES,
};

/// Draws outside the range are rejected this many times before falling back
/// to the (clamped) mean.
const MAX_REJECTIONS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StyleProfile {
    pub label: StyleLabel,
    pub mean: FeatureVector,
    /// Per-dimension standard deviation, `(dd, dv, da)`.
    pub spread: [f64; DIMS],
    /// Relative mixture weight; weights are normalized over all profiles.
    pub weight: f64,
    /// Inclusive sampling bounds; samples are always non-negative.
    pub range: Option<(FeatureVector, FeatureVector)>,
    /// Optional second Δa mode as `(mode, probability)`.
    pub da_second_mode: Option<(f64, f64)>,
}

impl StyleProfile {
    pub fn new(label: StyleLabel, mean: [f64; DIMS], spread: [f64; DIMS]) -> Self {
        StyleProfile {
            label,
            mean: FeatureVector::from_array(mean),
            spread,
            weight: 1.0,
            range: None,
            da_second_mode: None,
        }
    }

    pub fn moderate() -> Self {
        StyleProfile {
            range: Some(ranges([0.0090, 0.0036, 0.0020], [12.4460, 1.1273, 0.0831])),
            ..Self::new(StyleLabel::Moderate, [4.6597, 0.4779, 0.0470], [1.0, 0.2, 0.006])
        }
    }

    pub fn vague() -> Self {
        StyleProfile {
            range: Some(ranges([0.0090, 0.0360, 0.0850], [11.5193, 1.2958, 0.1951])),
            ..Self::new(StyleLabel::Vague, [4.4702, 0.5335, 0.1153], [1.0, 0.2, 0.006])
        }
    }

    pub fn aggressive() -> Self {
        StyleProfile {
            range: Some(ranges([6.2681, 0.0223, 0.0444], [30.9796, 1.8764, 0.1854])),
            ..Self::new(StyleLabel::Aggressive, [15.727, 0.6962, 0.1012], [1.5, 0.2, 0.006])
        }
    }

    pub fn for_label(label: StyleLabel) -> Option<Self> {
        match label {
            StyleLabel::Moderate => Some(Self::moderate()),
            StyleLabel::Vague => Some(Self::vague()),
            StyleLabel::Aggressive => Some(Self::aggressive()),
            StyleLabel::Noise => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(format!("{} profile: {m}", self.label)));
        if self.label == StyleLabel::Noise {
            return bad("noise cannot be generated".into());
        }
        if let Err(e) = self.mean.validate() {
            return bad(e.to_string());
        }
        for (name, s) in FEATURE_NAMES.iter().zip(self.spread) {
            if !(s >= 0.0 && s.is_finite()) {
                return bad(format!("spread of `{name}` must be finite and >= 0, got {s}"));
            }
        }
        if !(self.weight > 0.0 && self.weight.is_finite()) {
            return bad(format!("weight must be positive, got {}", self.weight));
        }
        if let Some((lo, hi)) = self.range {
            let (lo, hi, m) = (lo.to_array(), hi.to_array(), self.mean.to_array());
            for d in 0..DIMS {
                if !(lo[d] <= m[d] && m[d] <= hi[d]) {
                    return bad(format!("mean of `{}` lies outside [{}, {}]", FEATURE_NAMES[d], lo[d], hi[d]));
                }
            }
        }
        if let Some((mode, p)) = self.da_second_mode {
            if !(mode >= 0.0 && mode.is_finite() && (0.0..=1.0).contains(&p)) {
                return bad(format!("invalid second da mode ({mode}, {p})"));
            }
        }
        Ok(())
    }

    fn bounds(&self, d: usize) -> (f64, f64) {
        match self.range {
            Some((lo, hi)) => (lo.to_array()[d].max(0.0), hi.to_array()[d]),
            None => (0.0, f64::INFINITY),
        }
    }

    /// One sample from the profile's truncated distribution.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> FeatureVector {
        let mean = self.mean.to_array();
        FeatureVector::from_array(std::array::from_fn(|d| {
            let mut center = mean[d];
            if d == 2 {
                if let Some((mode, p)) = self.da_second_mode {
                    if rng.random_bool(p) {
                        center = mode;
                    }
                }
            }
            let (lo, hi) = self.bounds(d);
            truncated_normal(rng, center, self.spread[d], lo, hi)
        }))
    }
}

fn ranges(lo: [f64; DIMS], hi: [f64; DIMS]) -> (FeatureVector, FeatureVector) {
    (FeatureVector::from_array(lo), FeatureVector::from_array(hi))
}

fn truncated_normal<R: Rng + ?Sized>(rng: &mut R, mean: f64, sd: f64, lo: f64, hi: f64) -> f64 {
    if sd == 0.0 {
        return mean.clamp(lo, hi);
    }
    let normal = Normal::new(mean, sd).expect("validated spread");
    for _ in 0..MAX_REJECTIONS {
        let x = normal.sample(rng);
        if (lo..=hi).contains(&x) {
            return x;
        }
    }
    mean.clamp(lo, hi)
}

/// The three styles with equal weights, centered on the reference cluster
/// centers.
pub fn default_profiles() -> Vec<StyleProfile> {
    vec![StyleProfile::moderate(), StyleProfile::vague(), StyleProfile::aggressive()]
}

/// Splits `n` by weight with the largest-remainder method.
fn split_counts(weights: &[f64], n: usize) -> Vec<usize> {
    let total: f64 = weights.iter().sum();
    let exact: Vec<f64> = weights.iter().map(|w| w / total * n as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| (exact[b] - exact[b].floor()).total_cmp(&(exact[a] - exact[a].floor())));
    let short = n - counts.iter().sum::<usize>();
    for &i in order.iter().take(short) {
        counts[i] += 1;
    }
    counts
}

/// `n` labeled samples drawn from the profile mixture, in shuffled order.
pub fn generate_features(profiles: &[StyleProfile], n: usize, seed: u64) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::InvalidParameter("sample count n must be >= 1".into()));
    }
    if profiles.is_empty() {
        return Err(Error::InvalidParameter("at least one style profile is required".into()));
    }
    for p in profiles {
        p.validate()?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let counts = split_counts(&profiles.iter().map(|p| p.weight).collect::<Vec<_>>(), n);
    let mut rows: Vec<(FeatureVector, StyleLabel)> = Vec::with_capacity(n);
    for (p, &c) in profiles.iter().zip(&counts) {
        for _ in 0..c {
            rows.push((p.sample(&mut rng), p.label));
        }
    }
    rows.shuffle(&mut rng);
    let (samples, labels) = rows.into_iter().unzip();
    Dataset::labeled(samples, labels)
}

/// Reads profiles from a key-value file. Keys have the form `<style>.<field>`
/// with fields `mean`, `spread` (three numbers each, dd dv da), `weight`,
/// `min`, `max` and `da_mode` (mode and probability). Fields that are not
/// given keep the built-in default of that style. Styles appear in the order
/// they are first mentioned.
pub fn parse_profiles(kv: &KeyValues) -> Result<Vec<StyleProfile>> {
    let mut profiles: Vec<StyleProfile> = Vec::new();
    for (key, _, line) in kv.iter() {
        let (style, field) = key
            .split_once('.')
            .ok_or_else(|| Error::parse(kv.source(), line, format!("expected `<style>.<field>`, found `{key}`")))?;
        let label: StyleLabel = style.parse().map_err(|e: String| Error::parse(kv.source(), line, e))?;
        let idx = match profiles.iter().position(|p| p.label == label) {
            Some(i) => i,
            None => {
                let p = StyleProfile::for_label(label)
                    .ok_or_else(|| Error::parse(kv.source(), line, "noise cannot be generated"))?;
                profiles.push(p);
                profiles.len() - 1
            }
        };
        let p = &mut profiles[idx];
        let values = kv.floats(key)?.unwrap_or_default();
        let want = |n: usize| -> Result<()> {
            if values.len() == n {
                Ok(())
            } else {
                Err(Error::parse(kv.source(), line, format!("`{key}` needs {n} number(s), found {}", values.len())))
            }
        };
        let triple = |v: &[f64]| [v[0], v[1], v[2]];
        match field {
            "mean" => {
                want(DIMS)?;
                p.mean = FeatureVector::from_array(triple(&values));
            }
            "spread" => {
                want(DIMS)?;
                p.spread = triple(&values);
            }
            "weight" => {
                want(1)?;
                p.weight = values[0];
            }
            "min" | "max" => {
                want(DIMS)?;
                let (mut lo, mut hi) = p.range.unwrap_or(ranges([0.0; DIMS], [f64::INFINITY; DIMS]));
                let v = FeatureVector::from_array(triple(&values));
                if field == "min" {
                    lo = v;
                } else {
                    hi = v;
                }
                p.range = Some((lo, hi));
            }
            "da_mode" => {
                want(2)?;
                p.da_second_mode = Some((values[0], values[1]));
            }
            _ => return Err(Error::parse(kv.source(), line, format!("unknown profile field `{field}`"))),
        }
    }
    if profiles.is_empty() {
        return Err(Error::parse(kv.source(), 0, "no profiles defined"));
    }
    for p in &profiles {
        p.validate().map_err(|e| Error::parse(kv.source(), 0, e.to_string()))?;
    }
    Ok(profiles)
}

pub fn load_profiles(path: &Path) -> Result<Vec<StyleProfile>> {
    parse_profiles(&KeyValues::load(path)?)
}

/// Frame period of the simulated sensors, seconds.
pub const FRAME_DT: f64 = 0.02;
/// Lateral offset of a completed lane change, meters.
pub const LANE_WIDTH: f64 = 3.75;
/// Duration of the lateral maneuver, seconds.
pub const MANEUVER_TIME: f64 = 4.0;
/// Gap between the front and side vehicles that regulation steers toward, meters.
pub const TARGET_GAP: f64 = 30.0;
const GAP_GAIN: f64 = 0.05;
const TAIL_TIME: f64 = 0.5;

/// A simulated lane change: frames at the sensor rate plus the subject's
/// lateral offset at every frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub frames: Vec<ScenarioFrame>,
    pub lateral_offset: Vec<f64>,
    pub decision_index: usize,
}

impl Scenario {
    pub fn decision_point(&self) -> FeatureVector {
        self.frames[self.decision_index].features()
    }
}

fn lateral_velocity(tau: f64) -> f64 {
    if (0.0..=MANEUVER_TIME).contains(&tau) {
        LANE_WIDTH / MANEUVER_TIME * (1.0 - (2.0 * PI * tau / MANEUVER_TIME).cos())
    } else {
        0.0
    }
}

fn lateral_offset(tau: f64) -> f64 {
    let t = tau.clamp(0.0, MANEUVER_TIME);
    LANE_WIDTH / MANEUVER_TIME * (t - MANEUVER_TIME / (2.0 * PI) * (2.0 * PI * t / MANEUVER_TIME).sin())
}

/// Time into the maneuver at which lateral velocity first reaches `threshold`.
fn onset_delay(threshold: f64) -> f64 {
    MANEUVER_TIME / (2.0 * PI) * (1.0 - threshold * MANEUVER_TIME / LANE_WIDTH).acos()
}

#[derive(Debug, Clone, Copy)]
struct Longitudinal {
    x: [f64; 3],
    v: [f64; 3],
}

/// Kinematic rollout of front vehicle A, side vehicle B and subject C.
///
/// A leads C in C's lane and B trails C in the target lane. A and B regulate
/// their spacing toward 30 m: while it is larger, A brakes and B accelerates.
/// The decision-moment state is constructed so that its features equal the
/// profile mean; the rollout is integrated forward and backward from it at
/// 50 Hz, and the lateral maneuver is timed so that its first frame at or
/// above 0.21 m/s is the decision moment.
pub fn simulate_scenario(profile: &StyleProfile, seed: u64) -> Result<Scenario> {
    profile.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let target = profile.mean;
    loop {
        if let Some(s) = try_scenario(&target, &mut rng) {
            return Ok(s);
        }
    }
}

fn signed<R: Rng>(rng: &mut R, v: f64) -> f64 {
    if rng.random_bool(0.5) {
        v
    } else {
        -v
    }
}

fn try_scenario<R: Rng>(target: &FeatureVector, rng: &mut R) -> Option<Scenario> {
    let gap = rng.random_range(20.0..40.0f64).max(target.dd + 12.0);
    let (d_a, d_b) = ((gap + target.dd) / 2.0, (gap - target.dd) / 2.0);
    let v_c = rng.random_range(40.0..60.0) / 3.6;
    let u = rng.random_range(0.0..0.5);
    let v_a = v_c + signed(rng, u);
    let v_b = v_c + signed(rng, u + target.dv);
    let a_c = rng.random_range(-0.3..0.3);
    let m = rng.random_range(0.0..0.2);
    let acc_a = a_c + signed(rng, m);
    let acc_b = a_c + signed(rng, m + target.da);

    let k_m = (rng.random_range(1.5..2.5) / FRAME_DT).round() as usize;
    let t_m = k_m as f64 * FRAME_DT;
    let t_start = t_m - onset_delay(DEFAULT_LATERAL_THRESHOLD) - 0.005;
    let k_end = ((t_start + MANEUVER_TIME + TAIL_TIME) / FRAME_DT).ceil() as usize;

    let excess = |s: &Longitudinal| (s.x[0] - s.x[1] - TARGET_GAP).max(0.0);
    let at_m = Longitudinal {
        x: [d_a, -d_b, 0.0],
        v: [v_a, v_b, v_c],
    };
    let base_a = acc_a + GAP_GAIN * excess(&at_m);
    let base_b = acc_b - GAP_GAIN * excess(&at_m);
    let accel = |s: &Longitudinal| {
        let e = excess(s);
        [base_a - GAP_GAIN * e, base_b + GAP_GAIN * e, a_c]
    };

    let mut states = vec![at_m; k_end + 1];
    let mut s = at_m;
    for k in (0..k_m).rev() {
        for i in 0..3 {
            s.x[i] -= s.v[i] * FRAME_DT;
        }
        let a = accel(&s);
        for i in 0..3 {
            s.v[i] -= a[i] * FRAME_DT;
        }
        states[k] = s;
    }
    s = at_m;
    for state in states.iter_mut().skip(k_m + 1) {
        let a = accel(&s);
        for i in 0..3 {
            s.v[i] += a[i] * FRAME_DT;
            s.x[i] += s.v[i] * FRAME_DT;
        }
        *state = s;
    }

    let mut frames = Vec::with_capacity(k_end + 1);
    let mut lateral = Vec::with_capacity(k_end + 1);
    for (k, st) in states.iter().enumerate() {
        let t = k as f64 * FRAME_DT;
        let d_a = st.x[0] - st.x[2];
        let d_b = st.x[2] - st.x[1];
        if d_a <= 0.0 || d_b <= 0.0 {
            return None;
        }
        let a = if k == k_m { [acc_a, acc_b, a_c] } else { accel(st) };
        frames.push(ScenarioFrame {
            t,
            d_a,
            d_b,
            v_a: st.v[0],
            v_b: st.v[1],
            v_c: st.v[2],
            a_a: a[0],
            a_b: a[1],
            a_c: a[2],
            v_lat_c: lateral_velocity(t - t_start),
        });
        lateral.push(lateral_offset(t - t_start));
    }
    let decision_index = decision_frame_index(&frames, DEFAULT_LATERAL_THRESHOLD).ok()?;
    debug_assert_eq!(decision_index, k_m);
    Some(Scenario {
        frames,
        lateral_offset: lateral,
        decision_index,
    })
}
