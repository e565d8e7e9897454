//! Truncated-exponential stability polynomial and region sampling.

use num_complex::Complex64;

use crate::error::{invalid, Result};

/// `S(z) = sum_{s=0}^{p} z^s / s!`.
pub fn stability_polynomial(order: u32, z: Complex64) -> Result<Complex64> {
    if order < 1 {
        return invalid("stability polynomial order must be at least 1");
    }
    // Horner on 1 + z(1 + z/2(1 + z/3(...)))
    let mut acc = Complex64::new(1.0, 0.0);
    for s in (1..=order).rev() {
        acc = Complex64::new(1.0, 0.0) + z * acc / s as f64;
    }
    Ok(acc)
}

/// Boolean mask of `|S(z)| < 1` on a rectangular lattice in the complex plane.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionSample {
    pub order: u32,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    /// Row-major over `im` (outer) and `re` (inner).
    pub inside: Vec<bool>,
}

impl RegionSample {
    pub fn is_inside(&self, re_index: usize, im_index: usize) -> bool {
        self.inside[im_index * self.re.len() + re_index]
    }

    /// Triples `(re, im, inside)` in storage order.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64, bool)> + '_ {
        self.im
            .iter()
            .flat_map(move |&y| self.re.iter().map(move |&x| (x, y)))
            .zip(&self.inside)
            .map(|((x, y), &b)| (x, y, b))
    }
}

fn lattice(range: (f64, f64), n: usize) -> Vec<f64> {
    let (lo, hi) = range;
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

pub fn stability_region_sample(
    order: u32,
    re_range: (f64, f64),
    im_range: (f64, f64),
    resolution: (usize, usize),
) -> Result<RegionSample> {
    if order < 1 {
        return invalid("stability polynomial order must be at least 1");
    }
    if resolution.0 < 2 || resolution.1 < 2 {
        return invalid("region resolution must be at least 2 per axis");
    }
    if !(re_range.0 < re_range.1 && im_range.0 < im_range.1) {
        return invalid("region ranges must be increasing");
    }
    let re = lattice(re_range, resolution.0);
    let im = lattice(im_range, resolution.1);
    let mut inside = Vec::with_capacity(re.len() * im.len());
    for &y in &im {
        for &x in &re {
            inside.push(stability_polynomial(order, Complex64::new(x, y))?.norm() < 1.0);
        }
    }
    Ok(RegionSample { order, re, im, inside })
}
