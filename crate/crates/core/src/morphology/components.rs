use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use super::volume::BinaryVolume;

/// Voxel adjacency used when grouping set cells into regions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Connectivity {
    /// Shared faces only.
    Six,
    /// Faces and edges.
    Eighteen,
    /// Faces, edges and corners.
    #[default]
    TwentySix,
}

impl Connectivity {
    fn offsets(self) -> Vec<[i64; 3]> {
        let mut out = Vec::new();
        for z in -1i64..=1 {
            for y in -1i64..=1 {
                for x in -1i64..=1 {
                    let nonzero = (x != 0) as u8 + (y != 0) as u8 + (z != 0) as u8;
                    let keep = match self {
                        Connectivity::Six => nonzero == 1,
                        Connectivity::Eighteen => nonzero == 1 || nonzero == 2,
                        Connectivity::TwentySix => nonzero >= 1,
                    };
                    if keep {
                        out.push([x, y, z]);
                    }
                }
            }
        }
        out
    }

    pub fn neighbor_count(self) -> usize {
        match self {
            Connectivity::Six => 6,
            Connectivity::Eighteen => 18,
            Connectivity::TwentySix => 26,
        }
    }
}

impl fmt::Display for Connectivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.neighbor_count())
    }
}

impl FromStr for Connectivity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "6" => Ok(Connectivity::Six),
            "18" => Ok(Connectivity::Eighteen),
            "26" => Ok(Connectivity::TwentySix),
            other => Err(format!("connectivity must be 6, 18 or 26, got `{other}`")),
        }
    }
}

/// Region labeling of a volume. Label 0 means background; regions are
/// numbered 1.. in order of their first cell in storage order.
#[derive(Debug, Clone)]
pub struct Components {
    pub labels: Vec<u32>,
    pub sizes: Vec<usize>,
}

impl Components {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }
}

pub fn label_components(volume: &BinaryVolume, connectivity: Connectivity) -> Components {
    let offsets = connectivity.offsets();
    let mut labels = vec![0u32; volume.len()];
    let mut sizes = Vec::new();
    let mut queue = VecDeque::new();

    for start in 0..volume.len() {
        if !volume.cells()[start] || labels[start] != 0 {
            continue;
        }
        let label = sizes.len() as u32 + 1;
        labels[start] = label;
        queue.push_back(start);
        let mut size = 0;
        while let Some(i) = queue.pop_front() {
            size += 1;
            let c = volume.coord(i).map(|v| v as i64);
            for o in &offsets {
                let n = [c[0] + o[0], c[1] + o[1], c[2] + o[2]];
                if volume.get(n) {
                    let j = volume.index(n.map(|v| v as usize));
                    if labels[j] == 0 {
                        labels[j] = label;
                        queue.push_back(j);
                    }
                }
            }
        }
        sizes.push(size);
    }
    Components { labels, sizes }
}
