//! Sinc basis functions and the explicit differential-quadrature weight
//! matrices built from them.
//!
//! The basis element attached to node `m` is
//! `T_m(x) = sin(pi (x - m dx) / dx) / (pi (x - m dx) / dx)`, with the nodal
//! property `T_m(x_j) = delta_mj`. Differentiating and sampling at the nodes
//! gives closed forms for the first and second derivative weights:
//!
//! ```text
//! w1[m][j] = (-1)^(m-j) / (dx (m-j))          m != j,   w1[m][m] = 0
//! w2[m][j] = 2 (-1)^(m-j+1) / (dx^2 (m-j)^2)  m != j,   w2[m][m] = -pi^2 / (3 dx^2)
//! ```

use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::grid::Grid;

const NODE_TOLERANCE: f64 = 1e-12;

/// `(sin(pi t), cos(pi t))` with the argument reduced around the nearest
/// integer so that integer `t` gives an exact zero sine.
fn sin_cos_pi(t: f64) -> (f64, f64) {
    let k = t.round();
    let r = t - k;
    let (s, c) = (PI * r).sin_cos();
    if k.rem_euclid(2.0) == 0.0 {
        (s, c)
    } else {
        (-s, -c)
    }
}

/// Sinc basis function centred on `m * delta_x`.
pub fn sinc_value(m: i64, x: f64, delta_x: f64) -> f64 {
    let d = x - m as f64 * delta_x;
    if d.abs() < delta_x * NODE_TOLERANCE {
        return 1.0;
    }
    let t = d / delta_x;
    let (s, _) = sin_cos_pi(t);
    s / (PI * t)
}

/// First or second derivative of the sinc basis function centred on
/// `m * delta_x`.
pub fn sinc_derivative(m: i64, x: f64, delta_x: f64, order: u32) -> Result<f64> {
    let d = x - m as f64 * delta_x;
    let at_node = d.abs() < delta_x * NODE_TOLERANCE;
    let k = PI / delta_x;
    match order {
        1 => {
            if at_node {
                return Ok(0.0);
            }
            let (s, c) = sin_cos_pi(d / delta_x);
            Ok((k * d * c - s) / (k * d * d))
        }
        2 => {
            if at_node {
                return Ok(-PI * PI / (3.0 * delta_x * delta_x));
            }
            let (s, c) = sin_cos_pi(d / delta_x);
            Ok(-k * s / d - 2.0 * c / (d * d) + 2.0 * s / (k * d * d * d))
        }
        _ => invalid(format!("sinc derivative order must be 1 or 2, got {order}")),
    }
}

/// Dense `(N+1) x (N+1)` differential-quadrature matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    order: u32,
    delta_x: f64,
    size: usize,
    entries: Vec<f64>,
}

impl WeightMatrix {
    fn from_offsets(order: u32, grid: &Grid, weight: impl Fn(i64) -> f64) -> Self {
        let size = grid.len();
        // Toeplitz: one value per offset m - j in (-(size-1), size-1).
        let band: Vec<f64> = (-(size as i64 - 1)..size as i64).map(&weight).collect();
        let centre = size - 1;
        let mut entries = Vec::with_capacity(size * size);
        for m in 0..size {
            for j in 0..size {
                entries.push(band[centre + m - j]);
            }
        }
        Self {
            order,
            delta_x: grid.delta_x(),
            size,
            entries,
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn delta_x(&self) -> f64 {
        self.delta_x
    }

    /// Number of rows (equal to the number of grid nodes).
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, m: usize, j: usize) -> f64 {
        self.entries[m * self.size + j]
    }

    pub fn row(&self, m: usize) -> &[f64] {
        &self.entries[m * self.size..(m + 1) * self.size]
    }

    /// Dense matrix-vector product: `out[m] = sum_j w[m][j] values[j]`.
    pub fn apply(&self, values: &[f64]) -> Result<Vec<f64>> {
        if values.len() != self.size {
            return invalid(format!(
                "vector of length {} does not match weight matrix of size {}",
                values.len(),
                self.size
            ));
        }
        Ok((0..self.size).map(|m| dot(self.row(m), values)).collect())
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn alternating_sign(offset: i64) -> f64 {
    if offset.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Closed-form first derivative weights; antisymmetric with zero diagonal.
pub fn first_derivative_weights(grid: &Grid) -> WeightMatrix {
    let dx = grid.delta_x();
    WeightMatrix::from_offsets(1, grid, |k| {
        if k == 0 {
            0.0
        } else {
            alternating_sign(k) / (dx * k as f64)
        }
    })
}

/// Closed-form second derivative weights; symmetric with constant diagonal.
pub fn second_derivative_weights(grid: &Grid) -> WeightMatrix {
    let dx = grid.delta_x();
    WeightMatrix::from_offsets(2, grid, |k| {
        if k == 0 {
            -PI * PI / (3.0 * dx * dx)
        } else {
            let kf = k as f64;
            2.0 * alternating_sign(k + 1) / (dx * dx * kf * kf)
        }
    })
}

/// Convenience wrapper around [`WeightMatrix::apply`].
pub fn apply_weights(w: &WeightMatrix, values: &[f64]) -> Result<Vec<f64>> {
    w.apply(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_grid(n: usize, dx: f64) -> Grid {
        Grid::new(0.0, n as f64 * dx, n).unwrap()
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn sinc_nodal_property() {
        assert_eq!(sinc_value(3, 3.0 * 0.7, 0.7), 1.0);
        for j in 1..10 {
            assert_eq!(sinc_value(0, j as f64 * 0.25, 0.25), 0.0);
        }
        assert_relative_eq!(sinc_value(0, 0.5, 1.0), 2.0 / PI, max_relative = 1e-15);
        assert_relative_eq!(sinc_value(0, 0.5, 1.0), 0.636_619_77, epsilon = 1e-8);
    }

    #[test]
    fn sinc_derivative_node_values() {
        assert_eq!(sinc_derivative(4, 4.0 * 0.3, 0.3, 1).unwrap(), 0.0);
        assert_relative_eq!(
            sinc_derivative(2, 2.0, 1.0, 2).unwrap(),
            -3.289_868_133_696_453,
            max_relative = 1e-14
        );
        assert_relative_eq!(sinc_derivative(0, 1.0, 1.0, 1).unwrap(), -1.0, max_relative = 1e-15);
        assert!(sinc_derivative(0, 1.0, 1.0, 3).is_err());
        assert!(sinc_derivative(0, 1.0, 1.0, 0).is_err());
    }

    #[test]
    fn first_derivative_examples() {
        let w = first_derivative_weights(&unit_grid(4, 1.0));
        assert_eq!(w.get(2, 2), 0.0);
        assert_eq!(w.get(0, 1), 1.0);
        let w = first_derivative_weights(&unit_grid(4, 0.5));
        assert_eq!(w.get(2, 0), 1.0);
        // w1[1][0] is the derivative of T_0 at x_1.
        let w = first_derivative_weights(&unit_grid(4, 1.0));
        assert_eq!(w.get(1, 0), -1.0);
    }

    #[test]
    fn second_derivative_examples() {
        let w = second_derivative_weights(&Grid::new(-20.0, 24.0, 440).unwrap());
        assert_relative_eq!(w.get(7, 7), -328.986_813_369_645_3, max_relative = 1e-12);
        let w = second_derivative_weights(&unit_grid(4, 1.0));
        assert_eq!(w.get(0, 1), 2.0);
        assert_eq!(w.get(0, 2), -0.5);
    }

    #[test]
    fn apply_reproduces_columns_and_zero() {
        let g = unit_grid(6, 0.5);
        let w = second_derivative_weights(&g);
        let mut e = vec![0.0; g.len()];
        e[3] = 1.0;
        let col = w.apply(&e).unwrap();
        for (m, v) in col.iter().enumerate() {
            assert_eq!(*v, w.get(m, 3));
            let pointwise = sinc_derivative(3, m as f64 * 0.5, 0.5, 2).unwrap();
            assert_relative_eq!(col[m], pointwise, max_relative = 1e-13);
        }
        assert!(w.apply(&vec![0.0; g.len()]).unwrap().iter().all(|&v| v == 0.0));
        assert!(w.apply(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn sech_second_derivative_spectral_accuracy() {
        let g = Grid::new(-20.0, 20.0, 320).unwrap();
        let w = second_derivative_weights(&g);
        let x = g.nodes();
        let f: Vec<f64> = x.iter().map(|x| 1.0 / x.cosh()).collect();
        let d2 = w.apply(&f).unwrap();
        let err = (1..g.n_intervals())
            .map(|m| {
                let s = 1.0 / x[m].cosh();
                (d2[m] - (s - 2.0 * s * s * s)).abs()
            })
            .fold(0.0, f64::max);
        assert!(err <= 1e-6, "max error {err}");
    }
}
