use crate::error::{Error, Result};

/// A 3-D occupancy grid. Coordinates are zero-based `[x, y, z]`; reads
/// outside the grid return `false`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryVolume {
    dims: [usize; 3],
    cells: Vec<bool>,
}

impl BinaryVolume {
    pub fn new(dims: [usize; 3]) -> Self {
        BinaryVolume {
            dims,
            cells: vec![false; dims[0] * dims[1] * dims[2]],
        }
    }

    pub fn full(dims: [usize; 3]) -> Self {
        BinaryVolume {
            dims,
            cells: vec![true; dims[0] * dims[1] * dims[2]],
        }
    }

    pub fn from_fn(dims: [usize; 3], mut f: impl FnMut([usize; 3]) -> bool) -> Self {
        let mut v = Self::new(dims);
        for z in 0..dims[2] {
            for y in 0..dims[1] {
                for x in 0..dims[0] {
                    let i = v.index([x, y, z]);
                    v.cells[i] = f([x, y, z]);
                }
            }
        }
        v
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    #[inline]
    pub fn index(&self, c: [usize; 3]) -> usize {
        c[0] + self.dims[0] * (c[1] + self.dims[1] * c[2])
    }

    #[inline]
    pub fn coord(&self, index: usize) -> [usize; 3] {
        let x = index % self.dims[0];
        let rest = index / self.dims[0];
        [x, rest % self.dims[1], rest / self.dims[1]]
    }

    pub fn in_bounds(&self, c: [i64; 3]) -> bool {
        (0..3).all(|i| c[i] >= 0 && (c[i] as usize) < self.dims[i])
    }

    /// Occupancy at a possibly out-of-range coordinate.
    pub fn get(&self, c: [i64; 3]) -> bool {
        self.in_bounds(c) && self.cells[self.index(c.map(|v| v as usize))]
    }

    pub fn set(&mut self, c: [usize; 3], value: bool) {
        let i = self.index(c);
        self.cells[i] = value;
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&b| b).count()
    }

    pub fn complement(&self) -> Self {
        BinaryVolume {
            dims: self.dims,
            cells: self.cells.iter().map(|b| !b).collect(),
        }
    }

    pub fn is_subset_of(&self, other: &BinaryVolume) -> bool {
        self.dims == other.dims && self.cells.iter().zip(&other.cells).all(|(&a, &b)| !a || b)
    }

    /// Coordinates of all set cells in storage order.
    pub fn set_coords(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| self.coord(i))
    }
}

/// Ball-shaped structuring element: all integer offsets with `|o| <= radius`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SphericalKernel {
    pub radius: u32,
}

impl SphericalKernel {
    pub fn new(radius: u32) -> Self {
        SphericalKernel { radius }
    }

    pub fn contains(&self, offset: [i64; 3]) -> bool {
        let r = self.radius as i64;
        offset.iter().map(|o| o * o).sum::<i64>() <= r * r
    }

    pub fn offsets(&self) -> Vec<[i64; 3]> {
        let r = self.radius as i64;
        let mut out = Vec::new();
        for z in -r..=r {
            for y in -r..=r {
                for x in -r..=r {
                    if self.contains([x, y, z]) {
                        out.push([x, y, z]);
                    }
                }
            }
        }
        out
    }

    fn check_fits(&self, dims: [usize; 3]) -> Result<()> {
        let min_dim = *dims.iter().min().unwrap_or(&0);
        if 2 * self.radius as usize + 1 >= min_dim {
            return Err(Error::KernelTooLarge {
                radius: self.radius,
                min_dim,
            });
        }
        Ok(())
    }
}

/// Cell `x` is set iff the kernel centered at `x` touches a set cell.
pub fn dilate(a: &BinaryVolume, kernel: &SphericalKernel) -> Result<BinaryVolume> {
    kernel.check_fits(a.dims)?;
    let r2 = (kernel.radius as f64).powi(2);
    let dist = squared_distance_to(a.dims, |i| a.cells[i]);
    Ok(BinaryVolume {
        dims: a.dims,
        cells: dist.into_iter().map(|d| d <= r2).collect(),
    })
}

/// Cell `x` is set iff the kernel centered at `x` lies entirely inside `a`.
/// Cells outside the grid count as empty, so the result shrinks at the borders.
pub fn erode(a: &BinaryVolume, kernel: &SphericalKernel) -> Result<BinaryVolume> {
    kernel.check_fits(a.dims)?;
    let r2 = (kernel.radius as f64).powi(2);
    // One layer of empty padding stands in for the whole outside: the
    // nearest outside cell to any interior cell is always on that layer.
    let pd = a.dims.map(|d| d + 2);
    let dist = squared_distance_to(pd, |i| {
        let x = i % pd[0];
        let rest = i / pd[0];
        let (y, z) = (rest % pd[1], rest / pd[1]);
        let inside = (1..=a.dims[0]).contains(&x) && (1..=a.dims[1]).contains(&y) && (1..=a.dims[2]).contains(&z);
        !(inside && a.cells[a.index([x - 1, y - 1, z - 1])])
    });
    Ok(BinaryVolume::from_fn(a.dims, |[x, y, z]| {
        dist[(x + 1) + pd[0] * ((y + 1) + pd[1] * (z + 1))] > r2
    }))
}

/// Exact squared Euclidean distance from every cell to the nearest cell for
/// which `site` holds (separable lower-envelope transform). Cells with no
/// site anywhere get `f64::INFINITY`.
fn squared_distance_to(dims: [usize; 3], site: impl Fn(usize) -> bool) -> Vec<f64> {
    let n = dims[0] * dims[1] * dims[2];
    let mut grid: Vec<f64> = (0..n).map(|i| if site(i) { 0.0 } else { f64::INFINITY }).collect();
    let longest = *dims.iter().max().unwrap_or(&0);
    let mut scratch = Envelope::with_capacity(longest);
    let mut line = vec![0.0; longest];
    let mut out = vec![0.0; longest];
    let strides = [1, dims[0], dims[0] * dims[1]];

    for axis in 0..3 {
        let len = dims[axis];
        let stride = strides[axis];
        let (o1, o2) = match axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        for b in 0..dims[o2] {
            for a in 0..dims[o1] {
                let base = a * strides[o1] + b * strides[o2];
                for (k, slot) in line[..len].iter_mut().enumerate() {
                    *slot = grid[base + k * stride];
                }
                scratch.transform(&line[..len], &mut out[..len]);
                for (k, &v) in out[..len].iter().enumerate() {
                    grid[base + k * stride] = v;
                }
            }
        }
    }
    grid
}

struct Envelope {
    sites: Vec<usize>,
    bounds: Vec<f64>,
}

impl Envelope {
    fn with_capacity(n: usize) -> Self {
        Envelope {
            sites: Vec::with_capacity(n),
            bounds: Vec::with_capacity(n),
        }
    }

    /// 1-D squared distance transform of sampled function `f`. All inputs
    /// are small integers (or infinity), so the arithmetic is exact.
    fn transform(&mut self, f: &[f64], d: &mut [f64]) {
        self.sites.clear();
        self.bounds.clear();
        for (q, &fq) in f.iter().enumerate() {
            if !fq.is_finite() {
                continue;
            }
            let qf = q as f64;
            loop {
                match self.sites.last() {
                    None => {
                        self.sites.push(q);
                        self.bounds.push(f64::NEG_INFINITY);
                        break;
                    }
                    Some(&p) => {
                        let pf = p as f64;
                        let s = ((fq + qf * qf) - (f[p] + pf * pf)) / (2.0 * (qf - pf));
                        if s <= *self.bounds.last().unwrap() {
                            self.sites.pop();
                            self.bounds.pop();
                        } else {
                            self.sites.push(q);
                            self.bounds.push(s);
                            break;
                        }
                    }
                }
            }
        }
        if self.sites.is_empty() {
            d.fill(f64::INFINITY);
            return;
        }
        let mut k = 0;
        for (q, dq) in d.iter_mut().enumerate() {
            let qf = q as f64;
            while k + 1 < self.sites.len() && self.bounds[k + 1] < qf {
                k += 1;
            }
            let p = self.sites[k];
            let diff = qf - p as f64;
            *dq = diff * diff + f[p];
        }
    }
}
