//! Fixed-step explicit Runge-Kutta integration.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::model::{NlsProblem, State};

/// Any component above this magnitude is treated as a blow-up.
pub const DIVERGENCE_THRESHOLD: f64 = 1e6;

/// Autonomous or non-autonomous first-order system `y' = F(t, y)`.
pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn eval(&self, t: f64, y: &[f64], dy: &mut [f64]);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Heun,
    Rk2,
    Rk3,
    Rk4,
    Rkf,
    Ck,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Heun,
        Method::Rk2,
        Method::Rk3,
        Method::Rk4,
        Method::Rkf,
        Method::Ck,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Heun => "heun",
            Method::Rk2 => "rk2",
            Method::Rk3 => "rk3",
            Method::Rk4 => "rk4",
            Method::Rkf => "rkf",
            Method::Ck => "ck",
        }
    }

    pub fn tableau(self) -> ButcherTableau {
        ButcherTableau::of(self)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "heun" => Ok(Method::Heun),
            "rk2" => Ok(Method::Rk2),
            "rk3" => Ok(Method::Rk3),
            "rk4" => Ok(Method::Rk4),
            "rkf" => Ok(Method::Rkf),
            "ck" => Ok(Method::Ck),
            other => invalid(format!("unknown method `{other}`")),
        }
    }
}

/// Coefficients of an explicit Runge-Kutta method.
///
/// `a` is stored row by row, each row `i` holding the `i` entries left of the
/// diagonal. `b_embedded`, when present, is the lower-order companion row of
/// an embedded pair; it only feeds the error estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct ButcherTableau {
    pub method: Method,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub b_embedded: Option<Vec<f64>>,
    pub c: Vec<f64>,
    pub order: u32,
}

type Coefficients = (Vec<Vec<f64>>, Vec<f64>, Option<Vec<f64>>, Vec<f64>, u32);

impl ButcherTableau {
    pub fn of(method: Method) -> Self {
        let (a, b, b_embedded, c, order): Coefficients =
            match method {
                Method::Heun => (vec![vec![], vec![1.0]], vec![0.5, 0.5], None, vec![0.0, 1.0], 2),
                Method::Rk2 => (vec![vec![], vec![0.5]], vec![0.0, 1.0], None, vec![0.0, 0.5], 2),
                Method::Rk3 => (
                    vec![vec![], vec![0.5], vec![-1.0, 2.0]],
                    vec![1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
                    None,
                    vec![0.0, 0.5, 1.0],
                    3,
                ),
                Method::Rk4 => (
                    vec![vec![], vec![0.5], vec![0.0, 0.5], vec![0.0, 0.0, 1.0]],
                    vec![1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0],
                    None,
                    vec![0.0, 0.5, 0.5, 1.0],
                    4,
                ),
                Method::Rkf => (
                    vec![
                        vec![],
                        vec![1.0 / 4.0],
                        vec![3.0 / 32.0, 9.0 / 32.0],
                        vec![1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0],
                        vec![439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0],
                        vec![-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0],
                    ],
                    vec![
                        16.0 / 135.0,
                        0.0,
                        6656.0 / 12825.0,
                        28561.0 / 56430.0,
                        -9.0 / 50.0,
                        2.0 / 55.0,
                    ],
                    Some(vec![25.0 / 216.0, 0.0, 1408.0 / 2565.0, 2197.0 / 4104.0, -1.0 / 5.0, 0.0]),
                    vec![0.0, 1.0 / 4.0, 3.0 / 8.0, 12.0 / 13.0, 1.0, 1.0 / 2.0],
                    5,
                ),
                Method::Ck => (
                    vec![
                        vec![],
                        vec![1.0 / 5.0],
                        vec![3.0 / 40.0, 9.0 / 40.0],
                        vec![3.0 / 10.0, -9.0 / 10.0, 6.0 / 5.0],
                        vec![-11.0 / 54.0, 5.0 / 2.0, -70.0 / 27.0, 35.0 / 27.0],
                        vec![
                            1631.0 / 55296.0,
                            175.0 / 512.0,
                            575.0 / 13824.0,
                            44275.0 / 110592.0,
                            253.0 / 4096.0,
                        ],
                    ],
                    vec![37.0 / 378.0, 0.0, 250.0 / 621.0, 125.0 / 594.0, 0.0, 512.0 / 1771.0],
                    Some(vec![
                        2825.0 / 27648.0,
                        0.0,
                        18575.0 / 48384.0,
                        13525.0 / 55296.0,
                        277.0 / 14336.0,
                        1.0 / 4.0,
                    ]),
                    vec![0.0, 1.0 / 5.0, 3.0 / 10.0, 3.0 / 5.0, 1.0, 7.0 / 8.0],
                    5,
                ),
            };
        Self {
            method,
            a,
            b,
            b_embedded,
            c,
            order,
        }
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }

    /// Exact linear amplification `R(z) = 1 + z b^T (I - z A)^{-1} 1`.
    pub fn linear_amplification(&self, z: Complex64) -> Complex64 {
        let mut stage = Vec::with_capacity(self.stages());
        for row in &self.a {
            let acc = row.iter().zip(&stage).fold(Complex64::new(1.0, 0.0), |acc, (a, k)| acc + z * a * k);
            stage.push(acc);
        }
        self.b
            .iter()
            .zip(&stage)
            .fold(Complex64::new(1.0, 0.0), |acc, (b, k)| acc + z * b * k)
    }
}

/// Explicit Runge-Kutta stepper with reusable stage storage.
#[derive(Debug, Clone)]
pub struct ExplicitRk {
    tableau: ButcherTableau,
    stages: Vec<Vec<f64>>,
    scratch: Vec<f64>,
    steps_taken: usize,
    last_error_estimate: Option<f64>,
}

impl ExplicitRk {
    pub fn new(tableau: ButcherTableau) -> Self {
        let s = tableau.stages();
        Self {
            tableau,
            stages: vec![Vec::new(); s],
            scratch: Vec::new(),
            steps_taken: 0,
            last_error_estimate: None,
        }
    }

    pub fn tableau(&self) -> &ButcherTableau {
        &self.tableau
    }

    /// Number of steps taken since construction or the last [`reset`](Self::reset).
    pub fn steps_taken(&self) -> usize {
        self.steps_taken
    }

    /// Max-norm of the embedded error estimate of the last step, for
    /// methods that carry one. Never used to adapt the step.
    pub fn last_error_estimate(&self) -> Option<f64> {
        self.last_error_estimate
    }

    pub fn reset(&mut self) {
        self.steps_taken = 0;
        self.last_error_estimate = None;
    }

    /// Advances `y` from `t` to `t + dt` in place.
    pub fn step_system<S: OdeSystem + ?Sized>(&mut self, system: &S, t: f64, y: &mut [f64], dt: f64) -> Result<()> {
        let n = system.dim();
        if y.len() != n {
            return invalid(format!("state of length {} for system of dimension {n}", y.len()));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return invalid(format!("time step must be positive, got {dt}"));
        }
        for k in &mut self.stages {
            k.resize(n, 0.0);
        }
        self.scratch.resize(n, 0.0);

        let tab = &self.tableau;
        for i in 0..tab.stages() {
            self.scratch.copy_from_slice(y);
            for (j, a) in tab.a[i].iter().enumerate() {
                if *a != 0.0 {
                    let coeff = dt * a;
                    for (s, k) in self.scratch.iter_mut().zip(&self.stages[j]) {
                        *s += coeff * k;
                    }
                }
            }
            system.eval(t + tab.c[i] * dt, &self.scratch, &mut self.stages[i]);
        }

        self.last_error_estimate = tab.b_embedded.as_ref().map(|bh| {
            (0..n)
                .map(|m| {
                    let e: f64 = tab.b.iter().zip(bh).zip(&self.stages).map(|((b, bh), k)| (b - bh) * k[m]).sum();
                    (dt * e).abs()
                })
                .fold(0.0, f64::max)
        });

        for (b, k) in tab.b.iter().zip(&self.stages) {
            if *b != 0.0 {
                let coeff = dt * b;
                for (v, kv) in y.iter_mut().zip(k) {
                    *v += coeff * kv;
                }
            }
        }
        self.steps_taken += 1;

        if y.iter().any(|v| !v.is_finite() || v.abs() > DIVERGENCE_THRESHOLD) {
            return Err(Error::Divergence {
                step: self.steps_taken,
                time: t + dt,
            });
        }
        Ok(())
    }

    /// One step of the NLS system.
    pub fn step(&mut self, problem: &NlsProblem, state: &State, dt: f64) -> Result<State> {
        let len = problem.grid().len();
        if state.len() != len || state.g.len() != len {
            return invalid("state does not match the problem grid");
        }
        let mut y = pack(state);
        self.step_system(problem, state.time, &mut y, dt)?;
        Ok(unpack(&y, state.time + dt))
    }

    /// Integrates from `state0.time` to `t_end` with a fixed step and calls
    /// `observer(step_index, state)` whenever `schedule` selects the step.
    /// Step 0 and the final step are always observed.
    pub fn integrate<F>(
        &mut self,
        problem: &NlsProblem,
        state0: &State,
        dt: f64,
        t_end: f64,
        schedule: &Schedule,
        mut observer: F,
    ) -> Result<State>
    where
        F: FnMut(usize, &State),
    {
        let steps = step_count(state0.time, t_end, dt)?;
        let len = problem.grid().len();
        if state0.len() != len || state0.g.len() != len {
            return invalid("initial state does not match the problem grid");
        }
        self.reset();
        observer(0, state0);
        if steps == 0 {
            return Ok(state0.clone());
        }
        let t0 = state0.time;
        let mut y = pack(state0);
        for k in 1..=steps {
            let t = t0 + (k - 1) as f64 * dt;
            self.step_system(problem, t, &mut y, dt)?;
            if k == steps || schedule.selects(k) {
                let time = if k == steps { t_end } else { t0 + k as f64 * dt };
                observer(k, &unpack(&y, time));
            }
        }
        Ok(unpack(&y, t_end))
    }
}

/// Which step indices an observer sees, besides the first and last.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Schedule {
    every: usize,
    extra: Vec<usize>,
}

impl Schedule {
    pub fn every(k: usize) -> Self {
        Self { every: k, extra: Vec::new() }
    }

    pub fn endpoints() -> Self {
        Self::default()
    }

    pub fn with_steps(mut self, steps: impl IntoIterator<Item = usize>) -> Self {
        self.extra.extend(steps);
        self.extra.sort_unstable();
        self.extra.dedup();
        self
    }

    pub fn selects(&self, step: usize) -> bool {
        (self.every > 0 && step.is_multiple_of(self.every)) || self.extra.binary_search(&step).is_ok()
    }
}

/// `round((t_end - t0) / dt)`, rejecting spans that are not a whole number of steps.
pub fn step_count(t0: f64, t_end: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && dt.is_finite()) {
        return invalid(format!("time step must be positive, got {dt}"));
    }
    if !(t_end >= t0) {
        return invalid(format!("end time {t_end} precedes start time {t0}"));
    }
    let ratio = (t_end - t0) / dt;
    let steps = ratio.round();
    if (ratio - steps).abs() > 1e-9 * steps.max(1.0) {
        return invalid(format!("span {} is not a whole number of steps of {dt}", t_end - t0));
    }
    Ok(steps as usize)
}

fn pack(state: &State) -> Vec<f64> {
    let mut y = Vec::with_capacity(2 * state.len());
    y.extend_from_slice(&state.f);
    y.extend_from_slice(&state.g);
    y
}

fn unpack(y: &[f64], time: f64) -> State {
    let (f, g) = y.split_at(y.len() / 2);
    State {
        f: f.to_vec(),
        g: g.to_vec(),
        time,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::stability::stability_polynomial;

    /// `y' = lambda y` for complex lambda, as a 2-component real system.
    struct Linear(Complex64);

    impl OdeSystem for Linear {
        fn dim(&self) -> usize {
            2
        }
        fn eval(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
            let v = self.0 * Complex64::new(y[0], y[1]);
            dy[0] = v.re;
            dy[1] = v.im;
        }
    }

    fn one_step(method: Method, lambda: Complex64, dt: f64) -> Complex64 {
        let mut rk = ExplicitRk::new(method.tableau());
        let mut y = [1.0, 0.0];
        rk.step_system(&Linear(lambda), 0.0, &mut y, dt).unwrap();
        Complex64::new(y[0], y[1])
    }

    #[test]
    fn tableaus_are_consistent() {
        for m in Method::ALL {
            let t = m.tableau();
            assert_eq!(t.a.len(), t.stages());
            assert_eq!(t.c.len(), t.stages());
            for (i, row) in t.a.iter().enumerate() {
                assert_eq!(row.len(), i, "{m}: a must be strictly lower triangular");
                let sum: f64 = row.iter().sum();
                assert!((sum - t.c[i]).abs() < 1e-14, "{m}: row sum {i}");
            }
            assert!((t.b.iter().sum::<f64>() - 1.0).abs() < 1e-14, "{m}: weights");
            if let Some(bh) = &t.b_embedded {
                assert!((bh.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            }
        }
        let orders: Vec<u32> = Method::ALL.iter().map(|m| m.tableau().order).collect();
        assert_eq!(orders, vec![2, 2, 3, 4, 5, 5]);
    }

    #[test]
    fn rk4_matches_truncated_exponential() {
        for &(re, im) in &[(-0.3, 0.0), (0.0, 1.1), (-1.0, 2.0), (0.2, -0.7)] {
            let z = Complex64::new(re, im);
            let y = one_step(Method::Rk4, z, 1.0);
            let s = stability_polynomial(4, z).unwrap();
            assert!((y - s).norm() < 1e-15, "{z}");
        }
    }

    #[test]
    fn low_order_methods_match_their_polynomials() {
        for &(re, im) in &[(-0.5, 0.0), (0.0, 0.9), (-0.4, 1.3)] {
            let z = Complex64::new(re, im);
            let heun = one_step(Method::Heun, z, 1.0);
            let mid = one_step(Method::Rk2, z, 1.0);
            assert!((heun - mid).norm() < 1e-15);
            assert!((heun - stability_polynomial(2, z).unwrap()).norm() < 1e-15);
            let rk3 = one_step(Method::Rk3, z, 1.0);
            assert!((rk3 - stability_polynomial(3, z).unwrap()).norm() < 1e-15);
        }
    }

    #[test]
    fn linear_amplification_matches_stepping() {
        let z = Complex64::new(-0.3, 0.8);
        for m in Method::ALL {
            let direct = one_step(m, z, 1.0);
            assert!((direct - m.tableau().linear_amplification(z)).norm() < 1e-14, "{m}");
        }
    }

    #[test]
    fn zero_state_is_a_fixed_point() {
        let p = NlsProblem::new(Grid::new(-5.0, 5.0, 20).unwrap(), 2.0);
        for m in Method::ALL {
            let mut rk = ExplicitRk::new(m.tableau());
            let s = rk.step(&p, &State::zeros(21, 0.5), 0.01).unwrap();
            assert!(s.f.iter().chain(&s.g).all(|&v| v == 0.0));
            assert!((s.time - 0.51).abs() < 1e-15);
        }
    }

    #[test]
    fn empty_span_observes_once() {
        let g = Grid::new(-5.0, 5.0, 20).unwrap();
        let p = NlsProblem::new(g.clone(), 2.0);
        let s0 = crate::model::initial_bound_state(&g);
        let mut calls = 0;
        let mut rk = ExplicitRk::new(Method::Rk4.tableau());
        let out = rk.integrate(&p, &s0, 0.01, 0.0, &Schedule::every(1), |_, _| calls += 1).unwrap();
        assert_eq!(calls, 1);
        assert_eq!(out, s0);
    }

    #[test]
    fn schedule_selection() {
        let g = Grid::new(-5.0, 5.0, 20).unwrap();
        let p = NlsProblem::new(g.clone(), 2.0);
        let s0 = crate::model::initial_bound_state(&g);
        let mut seen = Vec::new();
        let mut rk = ExplicitRk::new(Method::Rk3.tableau());
        let sched = Schedule::every(4).with_steps([3]);
        let end = rk.integrate(&p, &s0, 0.001, 0.01, &sched, |k, s| seen.push((k, s.time))).unwrap();
        let steps: Vec<usize> = seen.iter().map(|s| s.0).collect();
        assert_eq!(steps, vec![0, 3, 4, 8, 10]);
        assert_eq!(end.time, 0.01);
        assert_eq!(rk.steps_taken(), 10);
        assert!(step_count(0.0, 1.0, 0.3).is_err());
        assert!(step_count(1.0, 0.0, 0.1).is_err());
        assert_eq!(step_count(0.0, 5.0, 0.005).unwrap(), 1000);
    }

    #[test]
    fn blow_up_reports_step() {
        let mut rk = ExplicitRk::new(Method::Heun.tableau());
        let mut y = [1.0, 0.0];
        let sys = Linear(Complex64::new(0.0, 50.0));
        let mut err = None;
        for k in 0..200 {
            if let Err(e) = rk.step_system(&sys, k as f64 * 0.1, &mut y, 0.1) {
                err = Some(e);
                break;
            }
        }
        match err {
            Some(Error::Divergence { step, .. }) => assert!((1..200).contains(&step)),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn embedded_estimate_present_only_for_pairs() {
        for m in Method::ALL {
            let mut rk = ExplicitRk::new(m.tableau());
            let mut y = [1.0, 0.0];
            rk.step_system(&Linear(Complex64::new(-1.0, 0.5)), 0.0, &mut y, 0.1).unwrap();
            assert_eq!(rk.last_error_estimate().is_some(), matches!(m, Method::Rkf | Method::Ck));
        }
    }
}
