//! Error norm and conserved quantities.
//!
//! `C1 = int |u|^2 dx` and `C3 = int (|u_x|^2 - kappa/2 |u|^4) dx`, both by
//! the composite trapezoidal rule over every grid node. `u_x` comes from the
//! first-derivative weight matrix.

use crate::error::{invalid, Error, Result};
use crate::grid::Grid;
use crate::model::State;
use crate::weights::{first_derivative_weights, WeightMatrix};

/// Max over nodes of the complex modulus of `numeric - exact`.
pub fn linf_error(numeric: &State, exact: &State) -> Result<f64> {
    if numeric.f.len() != exact.f.len() || numeric.g.len() != exact.g.len() || numeric.f.len() != numeric.g.len() {
        return invalid("states being compared have different lengths");
    }
    Ok(numeric
        .f
        .iter()
        .zip(&numeric.g)
        .zip(exact.f.iter().zip(&exact.g))
        .map(|((f, g), (fe, ge))| (f - fe).hypot(g - ge))
        .fold(0.0, f64::max))
}

fn trapezoid(delta_x: f64, values: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = values.len();
    let mut sum = 0.0;
    for (i, v) in values.enumerate() {
        sum += if i == 0 || i + 1 == n { 0.5 * v } else { v };
    }
    delta_x * sum
}

fn check_grid(state: &State, grid: &Grid) -> Result<()> {
    if state.f.len() != grid.len() || state.g.len() != grid.len() {
        return invalid(format!("state with {} nodes on a grid of {}", state.f.len(), grid.len()));
    }
    Ok(())
}

pub fn c1(state: &State, grid: &Grid) -> Result<f64> {
    check_grid(state, grid)?;
    Ok(trapezoid(
        grid.delta_x(),
        state.f.iter().zip(&state.g).map(|(f, g)| f * f + g * g),
    ))
}

pub fn c3(state: &State, grid: &Grid, w1: &WeightMatrix, kappa: f64) -> Result<f64> {
    check_grid(state, grid)?;
    if w1.order() != 1 || w1.size() != grid.len() || w1.delta_x() != grid.delta_x() {
        return invalid("first-derivative matrix does not belong to this grid");
    }
    let fx = w1.apply(&state.f)?;
    let gx = w1.apply(&state.g)?;
    Ok(trapezoid(
        grid.delta_x(),
        (0..grid.len()).map(|m| {
            let rho = state.f[m] * state.f[m] + state.g[m] * state.g[m];
            fx[m] * fx[m] + gx[m] * gx[m] - 0.5 * kappa * rho * rho
        }),
    ))
}

/// `|current - initial| / |initial|`.
pub fn relative_change(current: f64, initial: f64) -> Result<f64> {
    if initial == 0.0 {
        return Err(Error::DivisionByZero("relative change against a zero initial value".into()));
    }
    Ok(((current - initial) / initial).abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub time: f64,
    pub linf: Option<f64>,
    pub c1: f64,
    pub c3: f64,
    pub rel_change_c1: f64,
    pub rel_change_c3: f64,
}

/// Holds the grid, `W1` and the initial invariants of one run.
#[derive(Debug, Clone)]
pub struct Monitor {
    grid: Grid,
    kappa: f64,
    w1: WeightMatrix,
    c1_initial: f64,
    c3_initial: f64,
}

impl Monitor {
    pub fn new(grid: &Grid, kappa: f64, initial: &State) -> Result<Self> {
        let w1 = first_derivative_weights(grid);
        let c1_initial = c1(initial, grid)?;
        let c3_initial = c3(initial, grid, &w1, kappa)?;
        Ok(Self {
            grid: grid.clone(),
            kappa,
            w1,
            c1_initial,
            c3_initial,
        })
    }

    pub fn c1_initial(&self) -> f64 {
        self.c1_initial
    }

    pub fn c3_initial(&self) -> f64 {
        self.c3_initial
    }

    pub fn w1(&self) -> &WeightMatrix {
        &self.w1
    }

    pub fn record(&self, state: &State, exact: Option<&State>) -> Result<DiagnosticsRecord> {
        let c1_now = c1(state, &self.grid)?;
        let c3_now = c3(state, &self.grid, &self.w1, self.kappa)?;
        Ok(DiagnosticsRecord {
            time: state.time,
            linf: exact.map(|e| linf_error(state, e)).transpose()?,
            c1: c1_now,
            c3: c3_now,
            rel_change_c1: relative_change(c1_now, self.c1_initial)?,
            rel_change_c3: relative_change(c3_now, self.c3_initial)?,
        })
    }
}
