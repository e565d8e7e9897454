//! Coupled real form of the cubic NLS equation `i u_t + u_xx + kappa |u|^2 u = 0`.
//!
//! With `u = f + i g` the equation becomes
//!
//! ```text
//! g_t =  f_xx + kappa (f^2 + g^2) f
//! f_t = -g_xx - kappa (f^2 + g^2) g
//! ```
//!
//! and homogeneous Dirichlet data at both ends removes the boundary nodes
//! from the differential-quadrature sums.

use crate::error::{invalid, Result};
use crate::grid::Grid;
use crate::integrator::OdeSystem;
use crate::weights::{second_derivative_weights, WeightMatrix};

/// Real and imaginary parts of `u` sampled at the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub time: f64,
}

impl State {
    pub fn zeros(len: usize, time: f64) -> Self {
        Self {
            f: vec![0.0; len],
            g: vec![0.0; len],
            time,
        }
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    /// Pointwise modulus `|u_m|`.
    pub fn modulus(&self) -> Vec<f64> {
        self.f.iter().zip(&self.g).map(|(f, g)| f.hypot(*g)).collect()
    }

    pub fn peak(&self) -> f64 {
        self.modulus().into_iter().fold(0.0, f64::max)
    }

    /// Forces the homogeneous Dirichlet values at both ends.
    pub fn clamp_boundaries(&mut self) {
        if let (Some(f0), Some(g0)) = (self.f.first_mut(), self.g.first_mut()) {
            *f0 = 0.0;
            *g0 = 0.0;
        }
        if let (Some(fl), Some(gl)) = (self.f.last_mut(), self.g.last_mut()) {
            *fl = 0.0;
            *gl = 0.0;
        }
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if self.f.len() != len || self.g.len() != len {
            return invalid(format!(
                "state has {}/{} components, grid has {len} nodes",
                self.f.len(),
                self.g.len()
            ));
        }
        Ok(())
    }
}

/// Time derivative of a [`State`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateDerivative {
    pub df: Vec<f64>,
    pub dg: Vec<f64>,
}

/// Space-discretized NLS problem on a fixed grid.
#[derive(Debug, Clone)]
pub struct NlsProblem {
    grid: Grid,
    kappa: f64,
    w2: WeightMatrix,
}

impl NlsProblem {
    pub fn new(grid: Grid, kappa: f64) -> Self {
        let w2 = second_derivative_weights(&grid);
        Self { grid, kappa, w2 }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn w2(&self) -> &WeightMatrix {
        &self.w2
    }

    /// Right-hand side of the boundary-reduced system. Boundary components of
    /// the result are exactly zero.
    pub fn rhs(&self, state: &State) -> Result<StateDerivative> {
        state.check_len(self.grid.len())?;
        let len = self.grid.len();
        let mut d = StateDerivative {
            df: vec![0.0; len],
            dg: vec![0.0; len],
        };
        self.rhs_into(&state.f, &state.g, &mut d.df, &mut d.dg);
        Ok(d)
    }

    /// Allocation-free right-hand side; all slices must have `N + 1` entries.
    pub fn rhs_into(&self, f: &[f64], g: &[f64], df: &mut [f64], dg: &mut [f64]) {
        let n = self.grid.n_intervals();
        let fi = &f[1..n];
        let gi = &g[1..n];
        for m in 1..n {
            let row = &self.w2.row(m)[1..n];
            let (mut sf, mut sg) = (0.0, 0.0);
            for ((w, fj), gj) in row.iter().zip(fi).zip(gi) {
                sf += w * fj;
                sg += w * gj;
            }
            let nl = self.kappa * (f[m] * f[m] + g[m] * g[m]);
            dg[m] = sf + nl * f[m];
            df[m] = -sg - nl * g[m];
        }
        df[0] = 0.0;
        dg[0] = 0.0;
        df[n] = 0.0;
        dg[n] = 0.0;
    }
}

/// Flat layout `[f_0..f_N, g_0..g_N]`.
impl OdeSystem for NlsProblem {
    fn dim(&self) -> usize {
        2 * self.grid.len()
    }

    fn eval(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
        let len = self.grid.len();
        let (f, g) = y.split_at(len);
        let (df, dg) = dy.split_at_mut(len);
        self.rhs_into(f, g, df, dg);
    }
}

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

fn require_focusing(kappa: f64) -> Result<()> {
    if !(kappa > 0.0) {
        return invalid(format!("kappa must be positive, got {kappa}"));
    }
    Ok(())
}

/// Travelling sech envelope soliton
/// `u = alpha sqrt(2/kappa) exp(i [c x / 2 - (c^2 / 4 - alpha^2) t]) sech(alpha (x - c t))`,
/// sampled without boundary clamping.
pub fn exact_single_soliton(grid: &Grid, t: f64, alpha: f64, c: f64, kappa: f64) -> Result<State> {
    require_focusing(kappa)?;
    let amp = alpha * (2.0 / kappa).sqrt();
    let (f, g) = grid
        .nodes()
        .into_iter()
        .map(|x| {
            let theta = c * x / 2.0 - (c * c / 4.0 - alpha * alpha) * t;
            let env = amp * sech(alpha * (x - c * t));
            (env * theta.cos(), env * theta.sin())
        })
        .unzip();
    Ok(State { f, g, time: t })
}

pub fn initial_single_soliton(grid: &Grid, alpha: f64, c: f64, kappa: f64) -> Result<State> {
    let mut s = exact_single_soliton(grid, 0.0, alpha, c, kappa)?;
    s.clamp_boundaries();
    Ok(s)
}

/// Parameters of one sech pulse `beta sqrt(2/kappa) exp(i c (x - centre) / 2) sech(beta (x - centre))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SechPulse {
    pub beta: f64,
    pub c: f64,
    pub centre: f64,
}

/// Linear superposition of sech pulses at `t = 0`, boundaries clamped.
pub fn initial_sech_pulses(grid: &Grid, pulses: &[SechPulse], kappa: f64) -> Result<State> {
    require_focusing(kappa)?;
    let scale = (2.0 / kappa).sqrt();
    let mut state = State::zeros(grid.len(), 0.0);
    for (m, x) in grid.nodes().into_iter().enumerate() {
        for p in pulses {
            let env = p.beta * scale * sech(p.beta * (x - p.centre));
            let phase = 0.5 * p.c * (x - p.centre);
            state.f[m] += env * phase.cos();
            state.g[m] += env * phase.sin();
        }
    }
    state.clamp_boundaries();
    Ok(state)
}

pub fn initial_two_solitons(grid: &Grid, first: SechPulse, second: SechPulse, kappa: f64) -> Result<State> {
    initial_sech_pulses(grid, &[first, second], kappa)
}

/// Gaussian pulse `A exp(-x^2)`, or `A exp(-x^2 + 2 i x)` when `moving`.
pub fn initial_maxwellian(grid: &Grid, amplitude: f64, moving: bool) -> State {
    let (f, g) = grid
        .nodes()
        .into_iter()
        .map(|x| {
            let env = amplitude * (-x * x).exp();
            if moving {
                let phase = 2.0 * x;
                (env * phase.cos(), env * phase.sin())
            } else {
                (env, 0.0)
            }
        })
        .unzip();
    let mut s = State { f, g, time: 0.0 };
    s.clamp_boundaries();
    s
}

/// `u(x, 0) = sech x`.
pub fn initial_bound_state(grid: &Grid) -> State {
    let f = grid.nodes().into_iter().map(sech).collect::<Vec<_>>();
    let mut s = State {
        g: vec![0.0; f.len()],
        f,
        time: 0.0,
    };
    s.clamp_boundaries();
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn zero_state_has_zero_derivative() {
        let p = NlsProblem::new(Grid::new(-5.0, 5.0, 20).unwrap(), 2.0);
        let d = p.rhs(&State::zeros(21, 0.0)).unwrap();
        assert!(d.df.iter().chain(&d.dg).all(|&v| v == 0.0));
    }

    #[test]
    fn five_node_hand_oracle() {
        let p = NlsProblem::new(Grid::new(0.0, 4.0, 4).unwrap(), 2.0);
        let mut s = State::zeros(5, 0.0);
        s.f[1] = 1.0;
        let d = p.rhs(&s).unwrap();
        assert_relative_eq!(d.dg[1], -PI * PI / 3.0 + 2.0, max_relative = 1e-15);
        assert_relative_eq!(d.dg[1], -1.289_868, epsilon = 1e-6);
        assert_eq!(d.dg[2], 2.0);
        assert_eq!(d.dg[3], -0.5);
        assert_eq!(d.dg[0], 0.0);
        assert_eq!(d.dg[4], 0.0);
        assert!(d.df.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn length_mismatch_rejected() {
        let p = NlsProblem::new(Grid::new(0.0, 4.0, 4).unwrap(), 2.0);
        assert!(p.rhs(&State::zeros(4, 0.0)).is_err());
    }

    #[test]
    fn exact_soliton_values() {
        let g = Grid::new(-4.0, 4.0, 8).unwrap();
        let s = exact_single_soliton(&g, 0.0, 1.0, 4.0, 2.0).unwrap();
        assert_relative_eq!(s.f[4], 1.0, max_relative = 1e-15);
        assert_eq!(s.g[4], 0.0);

        let g = Grid::new(0.0, 8.0, 8).unwrap();
        let s = exact_single_soliton(&g, 1.0, 1.0, 4.0, 2.0).unwrap();
        // theta = 8 - 3
        assert_relative_eq!(s.f[4], 5.0f64.cos(), max_relative = 1e-14);
        assert_relative_eq!(s.f[4], 0.283_662_185_5, epsilon = 1e-9);
        assert_relative_eq!(s.g[4], -0.958_924_274_7, epsilon = 1e-9);
        for (m, x) in g.nodes().into_iter().enumerate() {
            let modulus = s.f[m].hypot(s.g[m]);
            assert_relative_eq!(modulus, sech(x - 4.0), max_relative = 1e-14);
        }
        assert!(exact_single_soliton(&g, 0.0, 1.0, 4.0, 0.0).is_err());
    }

    #[test]
    fn initial_conditions_clamped() {
        let g = Grid::new(-20.0, 24.0, 440).unwrap();
        let raw = exact_single_soliton(&g, 0.0, 1.0, 4.0, 2.0).unwrap();
        assert!((raw.f[0].hypot(raw.g[0]) - sech(20.0)).abs() < 1e-20);
        assert!(sech(20.0) < 4.2e-9);
        let s = initial_single_soliton(&g, 1.0, 4.0, 2.0).unwrap();
        assert_eq!((s.f[0], s.g[0], s.f[440], s.g[440]), (0.0, 0.0, 0.0, 0.0));
        assert_eq!(s.f[200], 1.0);

        let b = initial_bound_state(&Grid::new(-20.0, 20.0, 320).unwrap());
        assert_eq!(b.f[160], 1.0);
        assert_eq!(b.f[0], 0.0);
        let m = initial_maxwellian(&Grid::new(-45.0, 45.0, 180).unwrap(), 1.0, false);
        assert_eq!((m.f[90], m.g[90]), (1.0, 0.0));
    }

    #[test]
    fn coincident_pulses_double_the_profile() {
        let g = Grid::new(-20.0, 20.0, 160).unwrap();
        let p = SechPulse { beta: 1.0, c: 4.0, centre: 0.0 };
        let two = initial_two_solitons(&g, p, p, 2.0).unwrap();
        let one = initial_sech_pulses(&g, &[p], 2.0).unwrap();
        for m in 0..g.len() {
            assert_eq!(two.f[m], 2.0 * one.f[m]);
            assert_eq!(two.g[m], 2.0 * one.g[m]);
        }
    }

    #[test]
    fn collision_peaks_at_plus_minus_ten() {
        let g = Grid::new(-20.0, 20.0, 160).unwrap();
        let s = initial_two_solitons(
            &g,
            SechPulse { beta: 1.0, c: 4.0, centre: -10.0 },
            SechPulse { beta: 1.0, c: -4.0, centre: 10.0 },
            2.0,
        )
        .unwrap();
        let u = s.modulus();
        assert_relative_eq!(u[40], 1.0, epsilon = 1e-8);
        assert_relative_eq!(u[120], 1.0, epsilon = 1e-8);
        for m in 0..g.len() {
            assert!((u[m] - u[g.len() - 1 - m]).abs() < 1e-14);
        }
    }

    #[test]
    fn swapping_components_maps_rhs() {
        let g = Grid::new(-6.0, 6.0, 24).unwrap();
        let p = NlsProblem::new(g.clone(), 2.0);
        let s = initial_sech_pulses(&g, &[SechPulse { beta: 1.2, c: 1.5, centre: 0.4 }], 2.0).unwrap();
        let swapped = State { f: s.g.clone(), g: s.f.clone(), time: 0.0 };
        let d = p.rhs(&s).unwrap();
        let ds = p.rhs(&swapped).unwrap();
        for m in 0..g.len() {
            assert_eq!(ds.df[m], -d.dg[m]);
            assert_eq!(ds.dg[m], -d.df[m]);
        }
    }

    #[test]
    fn exact_soliton_satisfies_semidiscrete_system() {
        let g = Grid::new(-20.0, 24.0, 440).unwrap();
        let p = NlsProblem::new(g.clone(), 2.0);
        let (alpha, c, kappa) = (1.0, 4.0, 2.0);
        for &t in &[0.0, 0.5, 1.0] {
            let s = exact_single_soliton(&g, t, alpha, c, kappa).unwrap();
            let d = p.rhs(&s).unwrap();
            let omega = c * c / 4.0 - alpha * alpha;
            let mut residual: f64 = 0.0;
            for (m, x) in g.nodes().into_iter().enumerate().take(g.n_intervals()).skip(1) {
                let xi = alpha * (x - c * t);
                let tanh = xi.tanh();
                // u_t = u (-i omega) + u alpha c tanh(xi)
                let (f, gg) = (s.f[m], s.g[m]);
                let ft = omega * gg + alpha * c * tanh * f;
                let gt = -omega * f + alpha * c * tanh * gg;
                residual = residual.max((d.df[m] - ft).abs()).max((d.dg[m] - gt).abs());
            }
            assert!(residual <= 1e-6, "t = {t}: residual {residual}");
        }
    }
}
