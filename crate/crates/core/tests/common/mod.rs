//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use sincnls::grid::Grid;
use sincnls::integrator::{ButcherTableau, ExplicitRk, Method, OdeSystem};
use sincnls::model::{NlsProblem, State};
use sincnls::spectral::{symmetric_eigenvalues, SymmetricMatrix};
use sincnls::weights::{first_derivative_weights, second_derivative_weights, sinc_derivative};

/// Number of eigenvalues of the symmetric `a` strictly below `sigma`,
/// from the signs of the pivots of `a - sigma I` (Sylvester inertia).
pub fn count_below(n: usize, a: &[f64], sigma: f64) -> usize {
    let mut m: Vec<f64> = a.to_vec();
    for i in 0..n {
        m[i * n + i] -= sigma;
    }
    let mut count = 0;
    for k in 0..n {
        let mut p = m[k * n + k];
        if p == 0.0 {
            p = -1e-300;
        }
        if p < 0.0 {
            count += 1;
        }
        for i in k + 1..n {
            let l = m[i * n + k] / p;
            for j in k + 1..n {
                m[i * n + j] -= l * m[k * n + j];
            }
        }
    }
    count
}

/// Eigenvalues by bisection on the inertia count; independent of Jacobi rotations.
pub fn bisection_eigenvalues(n: usize, a: &[f64]) -> Vec<f64> {
    let bound = a.iter().map(|v| v * v).sum::<f64>().sqrt() + 1.0;
    (0..n)
        .map(|k| {
            let (mut lo, mut hi) = (-bound, bound);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if count_below(n, a, mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

pub fn symmetric_strategy(max_n: usize) -> impl Strategy<Value = (usize, Vec<f64>)> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(-10.0f64..10.0, n * (n + 1) / 2).prop_map(move |upper| {
            let mut a = vec![0.0; n * n];
            let mut it = upper.into_iter();
            for i in 0..n {
                for j in i..n {
                    let v = it.next().unwrap();
                    a[i * n + j] = v;
                    a[j * n + i] = v;
                }
            }
            (n, a)
        })
    })
}

pub fn jacobi_matches_oracle(n: usize, a: &[f64], tol: f64) -> Result<(), TestCaseError> {
    let m = SymmetricMatrix::from_rows(n, a.to_vec()).unwrap();
    let got = symmetric_eigenvalues(&m).unwrap();
    let want = bisection_eigenvalues(n, a);
    let scale = 1.0f64.max(m.frobenius_norm());
    for (g, w) in got.iter().zip(&want) {
        prop_assert!((g - w).abs() <= tol * scale, "{got:?} vs {want:?}");
    }
    Ok(())
}

/// Checks the structural identities of both weight matrices on one grid.
pub fn weights_consistent(n: usize, dx: f64) -> Result<(), TestCaseError> {
    let grid = Grid::new(0.0, dx * n as f64, n).unwrap();
    let w1 = first_derivative_weights(&grid);
    let w2 = second_derivative_weights(&grid);
    let size = grid.len();
    for m in 0..size {
        for j in 0..size {
            prop_assert_eq!(w1.get(m, j), -w1.get(j, m));
            prop_assert_eq!(w2.get(m, j), w2.get(j, m));
            if m > 0 && j > 0 {
                prop_assert_eq!(w1.get(m, j), w1.get(m - 1, j - 1));
                prop_assert_eq!(w2.get(m, j), w2.get(m - 1, j - 1));
            }
            let x = grid.node(m) - grid.a();
            let d1 = sinc_derivative(j as i64, x, dx, 1).unwrap();
            let d2 = sinc_derivative(j as i64, x, dx, 2).unwrap();
            prop_assert!((d1 - w1.get(m, j)).abs() <= 1e-12 * (1.0 + d1.abs()));
            prop_assert!((d2 - w2.get(m, j)).abs() <= 1e-12 * (1.0 + d2.abs()));
        }
    }
    Ok(())
}

/// `y' = omega J y`, the rotation test problem with exact solution `exp(omega J t) y0`.
pub struct Rotation {
    pub omega: f64,
}

impl OdeSystem for Rotation {
    fn dim(&self) -> usize {
        2
    }
    fn eval(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
        dy[0] = -self.omega * y[1];
        dy[1] = self.omega * y[0];
    }
}

fn rotation_error(method: Method, steps: usize) -> f64 {
    let sys = Rotation { omega: 1.0 };
    let t_end = 1.0;
    let dt = t_end / steps as f64;
    let mut rk = ExplicitRk::new(ButcherTableau::of(method));
    let mut y = [1.0, 0.0];
    for k in 0..steps {
        rk.step_system(&sys, k as f64 * dt, &mut y, dt).unwrap();
    }
    (y[0] - t_end.cos()).hypot(y[1] - t_end.sin())
}

/// Least-squares slope of log(error) against log(dt) over halvings from 10 steps.
pub fn observed_order(method: Method) -> f64 {
    let pts: Vec<(f64, f64)> = [10usize, 20, 40, 80]
        .iter()
        .map(|&s| ((1.0 / s as f64).ln(), rotation_error(method, s).ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// The 5-node instance, `N = 4`, `dx = 1`, `kappa = 2`, `f = e_1`, `g = 0`,
/// against termwise hand evaluation of the weight formula.
pub fn five_node_hand_oracle() -> bool {
    let p = NlsProblem::new(Grid::new(0.0, 4.0, 4).unwrap(), 2.0);
    let mut s = State::zeros(5, 0.0);
    s.f[1] = 1.0;
    let d = p.rhs(&s).unwrap();
    let pi2 = std::f64::consts::PI.powi(2);
    let want = [0.0, -pi2 / 3.0 + 2.0, 2.0, -0.5, 0.0];
    d.df.iter().all(|v| *v == 0.0) && d.dg.iter().zip(want).all(|(a, b)| (a - b).abs() <= 1e-14)
}

pub fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}
