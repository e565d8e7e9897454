//! Frozen-coefficient eigenvalue analysis of the semi-discrete system.
//!
//! Treating `kappa_m = f_m^2 + g_m^2` as constant turns the interior system
//! into `d/dt [g; f] = [[0, A], [-A, 0]] [g; f]` with the symmetric matrix
//! `A = W2_interior + kappa diag(kappa_m)`. If `A v = mu v` then the block
//! matrix has eigenvalues `+i mu` and `-i mu`, so its spectrum follows from a
//! symmetric eigenproblem of half the size.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::model::{NlsProblem, State};
use crate::stability::stability_polynomial;

/// Strict admissibility tolerance on `|S(lambda dt)|`.
pub const STRICT_TOLERANCE: f64 = 1e-9;
/// Lenient tolerance for finite-horizon runs of methods whose region misses
/// the imaginary axis.
pub const PRACTICAL_TOLERANCE: f64 = 1e-4;

const JACOBI_RELATIVE_TOLERANCE: f64 = 1e-10;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Dense symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl SymmetricMatrix {
    /// Builds from row-major entries; fails unless square and exactly symmetric.
    pub fn from_rows(n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * n {
            return invalid(format!("{} entries cannot form a {n}x{n} matrix", entries.len()));
        }
        for i in 0..n {
            for j in 0..i {
                if entries[i * n + j] != entries[j * n + i] {
                    return invalid(format!("matrix is not symmetric at ({i}, {j})"));
                }
            }
        }
        Ok(Self { n, entries })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// The interior matrix `A` frozen at a reference state.
pub type FrozenMatrix = SymmetricMatrix;

pub fn assemble_frozen_matrix(problem: &NlsProblem, reference: &State) -> Result<FrozenMatrix> {
    let len = problem.grid().len();
    if reference.f.len() != len || reference.g.len() != len {
        return invalid(format!(
            "reference state has {} nodes, grid has {len}",
            reference.f.len()
        ));
    }
    let n = len - 2;
    let w2 = problem.w2();
    let kappa = problem.kappa();
    let mut entries = Vec::with_capacity(n * n);
    for m in 1..=n {
        entries.extend_from_slice(&w2.row(m)[1..=n]);
        let local = reference.f[m] * reference.f[m] + reference.g[m] * reference.g[m];
        entries[(m - 1) * n + (m - 1)] += kappa * local;
    }
    SymmetricMatrix::from_rows(n, entries)
}

/// All eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues(matrix: &SymmetricMatrix) -> Result<Vec<f64>> {
    let n = matrix.n;
    let mut a = matrix.entries.clone();
    let tol = JACOBI_RELATIVE_TOLERANCE * matrix.frobenius_norm();
    let max_off = |a: &[f64]| {
        let mut best: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                best = best.max(a[i * n + j].abs());
            }
        }
        best
    };

    let mut sweeps = 0;
    while max_off(&a) > tol {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NumericalFailure(format!(
                "Jacobi iteration did not converge in {JACOBI_MAX_SWEEPS} sweeps"
            )));
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= 1e-3 * tol {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[p * n + k];
                    let akq = a[q * n + k];
                    let new_p = c * akp - s * akq;
                    let new_q = s * akp + c * akq;
                    a[p * n + k] = new_p;
                    a[k * n + p] = new_p;
                    a[q * n + k] = new_q;
                    a[k * n + q] = new_q;
                }
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
            }
        }
    }
    let mut mu: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    mu.sort_by(f64::total_cmp);
    Ok(mu)
}

/// Eigenvalues of the block system: `mu` from `A`, and `lambda = +-i mu`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub mu: Vec<f64>,
    /// Sorted by imaginary part.
    pub lambda: Vec<Complex64>,
}

impl Spectrum {
    pub fn max_abs_imag(&self) -> f64 {
        self.lambda.iter().map(|l| l.im.abs()).fold(0.0, f64::max)
    }
}

pub fn block_spectrum(mu: &[f64]) -> Spectrum {
    let mut mu = mu.to_vec();
    mu.sort_by(f64::total_cmp);
    let mut lambda: Vec<Complex64> = mu
        .iter()
        .flat_map(|&m| [Complex64::new(0.0, m), Complex64::new(0.0, -m)])
        .collect();
    lambda.sort_by(|x, y| x.im.total_cmp(&y.im));
    Spectrum { mu, lambda }
}

/// Frozen matrix, Jacobi eigenvalues and block spectrum in one call.
pub fn frozen_spectrum(problem: &NlsProblem, reference: &State) -> Result<Spectrum> {
    let a = assemble_frozen_matrix(problem, reference)?;
    Ok(block_spectrum(&symmetric_eigenvalues(&a)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    pub admissible: bool,
    pub order: u32,
    pub delta_t: f64,
    pub tolerance: f64,
    pub worst_z: Complex64,
    pub worst_magnitude: f64,
}

/// Checks `|S(lambda dt)| <= 1 + tolerance` over the whole spectrum.
pub fn check_stability(spectrum: &Spectrum, delta_t: f64, order: u32, tolerance: f64) -> Result<StabilityReport> {
    if !(delta_t > 0.0) {
        return invalid(format!("time step must be positive, got {delta_t}"));
    }
    let mut worst_z = Complex64::new(0.0, 0.0);
    let mut worst_magnitude = 1.0;
    for l in &spectrum.lambda {
        let z = l * delta_t;
        let mag = stability_polynomial(order, z)?.norm();
        if mag > worst_magnitude {
            worst_magnitude = mag;
            worst_z = z;
        }
    }
    Ok(StabilityReport {
        admissible: worst_magnitude <= 1.0 + tolerance,
        order,
        delta_t,
        tolerance,
        worst_z,
        worst_magnitude,
    })
}
