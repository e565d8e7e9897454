use crate::error::{invalid, Result};

/// Uniform partition `a = x_0 < x_1 < ... < x_N = b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    a: f64,
    b: f64,
    delta_x: f64,
    n_intervals: usize,
}

impl Grid {
    /// Builds the grid from its endpoints and the number of intervals; the
    /// spacing is derived as `(b - a) / N` so both endpoints are exact.
    pub fn new(a: f64, b: f64, n_intervals: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return invalid("grid endpoints must be finite");
        }
        if b <= a {
            return invalid(format!("grid interval [{a}, {b}] has non-positive length"));
        }
        if n_intervals < 2 {
            return invalid(format!("grid needs at least 2 intervals, got {n_intervals}"));
        }
        Ok(Self {
            a,
            b,
            delta_x: (b - a) / n_intervals as f64,
            n_intervals,
        })
    }

    /// Builds a grid anchored at `a` with the exact spacing `delta_x`.
    ///
    /// The interval count is `round((b - a) / delta_x)` and the right endpoint
    /// becomes `a + N * delta_x`, which differs from `b` when the nominal
    /// interval is not a whole multiple of the spacing.
    pub fn with_spacing(a: f64, b: f64, delta_x: f64) -> Result<Self> {
        if !(delta_x.is_finite() && delta_x > 0.0) {
            return invalid(format!("grid spacing must be positive, got {delta_x}"));
        }
        if b <= a {
            return invalid(format!("grid interval [{a}, {b}] has non-positive length"));
        }
        let n = ((b - a) / delta_x).round() as usize;
        if n < 2 {
            return invalid(format!("spacing {delta_x} leaves fewer than 2 intervals"));
        }
        Ok(Self {
            a,
            b: a + n as f64 * delta_x,
            delta_x,
            n_intervals: n,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn delta_x(&self) -> f64 {
        self.delta_x
    }

    pub fn n_intervals(&self) -> usize {
        self.n_intervals
    }

    /// Number of nodes, `N + 1`.
    pub fn len(&self) -> usize {
        self.n_intervals + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of node `m`; the last node is pinned to `b`.
    pub fn node(&self, m: usize) -> f64 {
        if m == self.n_intervals {
            self.b
        } else {
            self.a + m as f64 * self.delta_x
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|m| self.node(m)).collect()
    }
}
