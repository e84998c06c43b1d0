#[inline]
pub(crate) fn sq_dist<const D: usize>(a: &[f64; D], b: &[f64; D]) -> f64 {
    let mut s = 0.0;
    for i in 0..D {
        let d = a[i] - b[i];
        s += d * d;
    }
    s
}

/// Index of the closest center; ties go to the lowest index.
#[inline]
pub(crate) fn nearest<const D: usize>(centers: &[[f64; D]], x: &[f64; D]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, c) in centers.iter().enumerate() {
        let d = sq_dist(c, x);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}
