//! Density-region clustering on the quantized feature grid.
//!
//! Samples are rasterized into a binary volume, closed up with a ball of
//! radius `r`, shrunk with a ball of radius `r + 1`, and the surviving
//! connected regions become clusters. Small regions are discarded as noise
//! and every remaining sample is then assigned to its nearest cluster center.

use std::fmt;
use std::str::FromStr;

use super::components::{label_components, Connectivity};
use super::volume::{dilate, erode, BinaryVolume, SphericalKernel};
use crate::error::{Error, Result};
use crate::features::{quantize, Dataset, Extrema, FeatureVector, Point, StyleLabel, DIMS};
use crate::metric::nearest;

/// Space in which samples are assigned to the nearest cluster center.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AssignSpace {
    /// Min-max normalized features (the space the grid was built in).
    #[default]
    Normalized,
    /// Raw physical units.
    Physical,
}

impl fmt::Display for AssignSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            AssignSpace::Normalized => "normalized",
            AssignSpace::Physical => "physical",
        })
    }
}

impl FromStr for AssignSpace {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "normalized" => Ok(AssignSpace::Normalized),
            "physical" => Ok(AssignSpace::Physical),
            other => Err(format!("assign space must be normalized|physical, got `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorphParams {
    /// Quantization levels per dimension; the grid has `q + 1` cells per axis.
    pub q: [u32; DIMS],
    /// Dilation radius in cells. Erosion uses `radius + 1`.
    pub radius: u32,
    /// Regions holding fewer than this fraction of all samples are noise.
    pub noise_fraction: f64,
    pub connectivity: Connectivity,
    pub assign_space: AssignSpace,
}

impl Default for MorphParams {
    fn default() -> Self {
        MorphParams {
            q: [100; DIMS],
            radius: 10,
            noise_fraction: 0.02,
            connectivity: Connectivity::TwentySix,
            assign_space: AssignSpace::Normalized,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MorphClustering {
    /// Grid cells of each cluster's region, as 1-based coordinates in `1..=q+1`.
    pub component_voxels: Vec<Vec<[u32; DIMS]>>,
    /// Physical-unit mean of the samples that fall inside each region.
    pub centers: Vec<FeatureVector>,
    /// Per-dimension (min, max) over the samples assigned to each cluster.
    pub ranges: Vec<(FeatureVector, FeatureVector)>,
    /// Samples assigned to each cluster after nearest-center assignment.
    pub counts: Vec<usize>,
    /// Samples lying inside each cluster's region.
    pub region_counts: Vec<usize>,
    /// Cluster index per sample; `None` for noise.
    pub assignments: Vec<Option<usize>>,
    pub noise_indices: Vec<usize>,
    /// Regions found before noise removal.
    pub raw_components: usize,
    pub extrema: Extrema,
}

impl MorphClustering {
    pub fn num_clusters(&self) -> usize {
        self.centers.len()
    }

    /// Style names for a three-cluster result: the cluster with the largest
    /// Δd center is aggressive; of the other two, the smaller Δa is moderate
    /// and the larger is vague.
    pub fn infer_styles(&self) -> Option<Vec<StyleLabel>> {
        if self.centers.len() != 3 {
            return None;
        }
        let agg = (0..3)
            .max_by(|&a, &b| self.centers[a].dd.total_cmp(&self.centers[b].dd))
            .unwrap();
        let rest: Vec<usize> = (0..3).filter(|&i| i != agg).collect();
        let (m, v) = if self.centers[rest[0]].da <= self.centers[rest[1]].da {
            (rest[0], rest[1])
        } else {
            (rest[1], rest[0])
        };
        let mut styles = vec![StyleLabel::Noise; 3];
        styles[agg] = StyleLabel::Aggressive;
        styles[m] = StyleLabel::Moderate;
        styles[v] = StyleLabel::Vague;
        Some(styles)
    }

    /// Per-sample style labels (noise included), or `None` unless J = 3.
    pub fn sample_labels(&self) -> Option<Vec<StyleLabel>> {
        let styles = self.infer_styles()?;
        Some(
            self.assignments
                .iter()
                .map(|a| a.map_or(StyleLabel::Noise, |j| styles[j]))
                .collect(),
        )
    }
}

/// Zero-based grid cell of every sample.
pub(crate) fn quantized_cells(data: &Dataset, q: [u32; DIMS]) -> Result<Vec<[usize; DIMS]>> {
    let ext = data.extrema();
    ext.check_spread()?;
    data.samples()
        .iter()
        .map(|s| {
            let n = ext.normalize(s);
            let mut c = [0usize; DIMS];
            for i in 0..DIMS {
                c[i] = quantize(n[i], q[i])? as usize - 1;
            }
            Ok(c)
        })
        .collect()
}

/// Marks every grid cell that at least one sample quantizes to.
pub fn rasterize(data: &Dataset, q: [u32; DIMS]) -> Result<BinaryVolume> {
    let cells = quantized_cells(data, q)?;
    let mut v = BinaryVolume::new(q.map(|qi| qi as usize + 1));
    for c in cells {
        v.set(c, true);
    }
    Ok(v)
}

pub fn morph_cluster(data: &Dataset, params: &MorphParams) -> Result<MorphClustering> {
    if params.radius < 1 {
        return Err(Error::InvalidParameter("kernel radius must be >= 1".into()));
    }
    if !(0.0..0.5).contains(&params.noise_fraction) {
        return Err(Error::InvalidParameter(format!(
            "noise fraction must be in [0, 0.5), got {}",
            params.noise_fraction
        )));
    }
    let ext = *data.extrema();
    let cells = quantized_cells(data, params.q)?;
    let mut grid = BinaryVolume::new(params.q.map(|qi| qi as usize + 1));
    for &c in &cells {
        grid.set(c, true);
    }

    let closed = dilate(&grid, &SphericalKernel::new(params.radius))?;
    let regions = erode(&closed, &SphericalKernel::new(params.radius + 1))?;
    let comps = label_components(&regions, params.connectivity);

    // Samples per region (region label 0 = outside every region).
    let sample_region: Vec<u32> = cells.iter().map(|&c| comps.labels[regions.index(c)]).collect();
    let mut in_region = vec![0usize; comps.count() + 1];
    for &l in &sample_region {
        in_region[l as usize] += 1;
    }

    let n = data.len();
    let min_members = params.noise_fraction * n as f64;
    let kept: Vec<u32> = (1..=comps.count() as u32)
        .filter(|&l| {
            let c = in_region[l as usize];
            c > 0 && c as f64 >= min_members
        })
        .collect();
    if kept.is_empty() {
        return Err(Error::NoClusters {
            q: params.q,
            radius: params.radius,
            noise_fraction: params.noise_fraction,
            components: comps.count(),
        });
    }

    struct Region {
        label: u32,
        center: FeatureVector,
        members: usize,
    }
    let mut kept_regions: Vec<Region> = kept
        .iter()
        .map(|&label| {
            let mut sum = [0.0; DIMS];
            let mut members = 0usize;
            for (s, &l) in data.samples().iter().zip(&sample_region) {
                if l == label {
                    for (acc, v) in sum.iter_mut().zip(s.to_array()) {
                        *acc += v;
                    }
                    members += 1;
                }
            }
            Region {
                label,
                center: FeatureVector::from_array(sum.map(|v| v / members as f64)),
                members,
            }
        })
        .collect();
    kept_regions.sort_by(|a, b| {
        a.center
            .to_array()
            .iter()
            .zip(b.center.to_array().iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let mut cluster_of_label = vec![None; comps.count() + 1];
    for (j, r) in kept_regions.iter().enumerate() {
        cluster_of_label[r.label as usize] = Some(j);
    }

    let to_space = |f: &FeatureVector| -> Point {
        match params.assign_space {
            AssignSpace::Normalized => ext.normalize(f),
            AssignSpace::Physical => f.to_array(),
        }
    };
    let centers_space: Vec<Point> = kept_regions.iter().map(|r| to_space(&r.center)).collect();

    let mut assignments = Vec::with_capacity(n);
    let mut noise_indices = Vec::new();
    for (i, s) in data.samples().iter().enumerate() {
        let l = sample_region[i] as usize;
        if l != 0 && cluster_of_label[l].is_none() {
            noise_indices.push(i);
            assignments.push(None);
        } else {
            assignments.push(Some(nearest(&centers_space, &to_space(s))));
        }
    }

    let j_count = kept_regions.len();
    let mut counts = vec![0usize; j_count];
    let mut lo = vec![[f64::INFINITY; DIMS]; j_count];
    let mut hi = vec![[f64::NEG_INFINITY; DIMS]; j_count];
    for (s, a) in data.samples().iter().zip(&assignments) {
        if let Some(j) = *a {
            counts[j] += 1;
            for (d, v) in s.to_array().into_iter().enumerate() {
                lo[j][d] = lo[j][d].min(v);
                hi[j][d] = hi[j][d].max(v);
            }
        }
    }

    let mut component_voxels = vec![Vec::new(); j_count];
    for (idx, &l) in comps.labels.iter().enumerate() {
        if let Some(j) = cluster_of_label[l as usize] {
            component_voxels[j].push(regions.coord(idx).map(|v| v as u32 + 1));
        }
    }

    Ok(MorphClustering {
        component_voxels,
        centers: kept_regions.iter().map(|r| r.center).collect(),
        ranges: lo
            .into_iter()
            .zip(hi)
            .map(|(l, h)| (FeatureVector::from_array(l), FeatureVector::from_array(h)))
            .collect(),
        counts,
        region_counts: kept_regions.iter().map(|r| r.members).collect(),
        assignments,
        noise_indices,
        raw_components: comps.count(),
        extrema: ext,
    })
}
