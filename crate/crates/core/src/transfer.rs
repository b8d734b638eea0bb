//! Finite-rank collocation approximation of the transfer operator
//!
//! ```text
//! (ℒ_s u)(x) = Σ_{i ≠ j} |σ_i′(x)|^s u(σ_i(x)),    x ∈ I_j,
//! ```
//!
//! on the boundary intervals, with Chebyshev–Lobatto collocation on each
//! interval. Bowen's equation `λ(ℒ_s) = 1` gives the dimension independently
//! of the cycle expansion.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BoundaryInterval, GroupConfig};

pub const DEFAULT_DEGREE: usize = 32;

/// One row-node/branch pair: the basis row of the target interval at the
/// mapped node and the log of the branch derivative there.
#[derive(Debug, Clone)]
struct Link {
    row: usize,
    col: usize,
    log_weight: f64,
    basis: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct CollocationOperator {
    intervals: Vec<BoundaryInterval>,
    degree: usize,
    links: Vec<Link>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigenpair {
    pub value: f64,
    /// `‖A v − λ v‖_∞ / |λ|` with `‖v‖_∞ = 1`.
    pub residual: f64,
    pub vector: Vec<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BowenResult {
    pub delta: f64,
    pub degree: usize,
    pub eigen_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometricFit {
    /// `μ_{ℓ+1}/μ_ℓ` implied by the fitted slope.
    pub ratio: f64,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Index range `[first, last)` used in the fit.
    pub range: (usize, usize),
}

/// Chebyshev–Lobatto points `c + h cos(πk/K)`, `k = 0..=K`.
fn lobatto_nodes(interval: &BoundaryInterval, degree: usize) -> Vec<f64> {
    let (c, h) = (interval.center(), interval.half_width());
    (0..=degree).map(|k| c + h * (PI * k as f64 / degree as f64).cos()).collect()
}

/// Values of the Lagrange basis on the Lobatto nodes at `y`, by the
/// barycentric formula.
fn lagrange_row(nodes: &[f64], y: f64) -> Vec<f64> {
    let n = nodes.len();
    let weight = |k: usize| {
        let w = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        if k == 0 || k == n - 1 {
            0.5 * w
        } else {
            w
        }
    };
    if let Some(hit) = nodes.iter().position(|&x| x == y) {
        let mut row = vec![0.0; n];
        row[hit] = 1.0;
        return row;
    }
    let terms: Vec<f64> = (0..n).map(|k| weight(k) / (y - nodes[k])).collect();
    let total: f64 = terms.iter().sum();
    terms.into_iter().map(|t| t / total).collect()
}

impl CollocationOperator {
    pub fn new(config: &GroupConfig, degree: usize) -> Result<Self> {
        if degree < 2 {
            return Err(Error::InvalidArgument(format!("collocation degree must be at least 2, got {degree}")));
        }
        let generators = config.boundary_maps()?;
        let intervals: Vec<BoundaryInterval> = generators.iter().map(|g| g.interval).collect();
        let nodes: Vec<Vec<f64>> = intervals.iter().map(|iv| lobatto_nodes(iv, degree)).collect();
        let size = degree + 1;
        let rows: Vec<(usize, usize, f64)> = (0..intervals.len())
            .flat_map(|j| (0..size).map(move |k| (j, k)))
            .flat_map(|(j, k)| {
                let x = nodes[j][k];
                (0..intervals.len()).filter(move |&i| i != j).map(move |i| (j * size + k, i, x))
            })
            .collect();
        let links = rows
            .par_iter()
            .map(|&(row, i, x)| {
                let g = &generators[i];
                let y = g.map.apply(x);
                if !g.interval.contains(y) {
                    return Err(Error::InvalidArgument(format!(
                        "branch {i} maps {x} to {y}, outside [{}, {}]",
                        g.interval.lo, g.interval.hi
                    )));
                }
                Ok(Link {
                    row,
                    col: i * size,
                    log_weight: g.map.derivative(x).abs().ln(),
                    basis: lagrange_row(&nodes[i], y),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { intervals, degree, links })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.intervals.len() * (self.degree + 1)
    }

    pub fn intervals(&self) -> &[BoundaryInterval] {
        &self.intervals
    }

    /// Collocation matrix at real `s`.
    pub fn matrix(&self, s: f64) -> DMatrix<f64> {
        let n = self.dim();
        let mut a = DMatrix::zeros(n, n);
        for link in &self.links {
            let w = (s * link.log_weight).exp();
            for (k, b) in link.basis.iter().enumerate() {
                a[(link.row, link.col + k)] += w * b;
            }
        }
        a
    }

    pub fn matrix_complex(&self, s: Complex64) -> DMatrix<Complex64> {
        let n = self.dim();
        let mut a = DMatrix::zeros(n, n);
        for link in &self.links {
            let w = (s * link.log_weight).exp();
            for (k, b) in link.basis.iter().enumerate() {
                a[(link.row, link.col + k)] += w * *b;
            }
        }
        a
    }

    /// Dominant eigenvalue at real `s` by power iteration from the constant
    /// vector.
    pub fn leading_eigenvalue(&self, s: f64) -> Result<Eigenpair> {
        const MAX_ITER: usize = 20_000;
        let a = self.matrix(s);
        let mut v = DVector::from_element(self.dim(), 1.0);
        let mut value = f64::NAN;
        for iteration in 1..=MAX_ITER {
            let w = &a * &v;
            let norm = w.amax();
            if !(norm > 0.0) || !norm.is_finite() {
                break;
            }
            // sign-consistent normalization: the eigenvector is positive
            let next = w.sum().signum() * norm;
            let v_next = w / next;
            let change = (&v_next - &v).amax();
            v = v_next;
            let settled = (next - value).abs() <= 4.0 * f64::EPSILON * next.abs() && change <= 1e-13;
            value = next;
            if settled {
                let residual = (&a * &v - &v * value).amax() / value.abs();
                return Ok(Eigenpair { value, residual, vector: v.as_slice().to_vec(), iterations: iteration });
            }
        }
        Err(Error::NoConvergence { word: format!("transfer matrix at s = {s}"), cycles: MAX_ITER })
    }

    /// Root of `λ(s) = 1` on `[0, 1]`: bisection down to a short bracket,
    /// then secant steps on `log λ`.
    pub fn bowen_dimension(&self, tol: f64) -> Result<BowenResult> {
        let log_lambda = |s: f64| self.leading_eigenvalue(s).map(|e| (e.value.ln(), e.residual));
        let (at_zero, _) = log_lambda(0.0)?;
        let (at_one, _) = log_lambda(1.0)?;
        if !(at_zero > 0.0) || at_one >= 0.0 {
            return Err(Error::BracketFailure { at_zero: at_zero.exp(), at_one: at_one.exp() });
        }
        let (mut a, mut b) = (0.0, 1.0);
        while b - a > 1e-3 {
            let mid = 0.5 * (a + b);
            if log_lambda(mid)?.0 > 0.0 {
                a = mid;
            } else {
                b = mid;
            }
        }
        let (mut x0, mut x1) = (a, b);
        let (mut f0, mut f1) = (log_lambda(x0)?.0, log_lambda(x1)?.0);
        for _ in 0..60 {
            if f1 == f0 {
                break;
            }
            let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
            let (f2, _) = log_lambda(x2)?;
            x0 = x1;
            f0 = f1;
            x1 = x2;
            f1 = f2;
            if f1.abs() < tol || (x1 - x0).abs() < 1e-15 {
                break;
            }
        }
        let final_pair = self.leading_eigenvalue(x1)?;
        if (final_pair.value - 1.0).abs() > tol.max(1e-12) {
            return Err(Error::MaxIterations { iterations: 60 });
        }
        Ok(BowenResult { delta: x1, degree: self.degree, eigen_residual: final_pair.residual })
    }

    /// `det(I − A(s))` of the collocation matrix.
    pub fn fredholm_determinant(&self, s: Complex64) -> Complex64 {
        let a = self.matrix_complex(s);
        (DMatrix::identity(a.nrows(), a.ncols()) - a).determinant()
    }

    /// Singular values in decreasing order.
    pub fn singular_value_profile(&self, s: Complex64) -> Vec<f64> {
        let mut values: Vec<f64> = self.matrix_complex(s).singular_values().iter().copied().collect();
        values.sort_by(|a, b| b.total_cmp(a));
        values
    }
}

/// Bowen solve with the collocation degree raised through `degrees` until
/// two consecutive solutions agree to `agreement`. Returns the last solution.
pub fn bowen_dimension_converged(
    config: &GroupConfig,
    degrees: &[usize],
    tol: f64,
    agreement: f64,
) -> Result<BowenResult> {
    let mut previous: Option<BowenResult> = None;
    for &degree in degrees {
        let result = CollocationOperator::new(config, degree)?.bowen_dimension(tol)?;
        if let Some(p) = previous {
            if (p.delta - result.delta).abs() < agreement {
                return Ok(result);
            }
        }
        previous = Some(result);
    }
    Err(Error::NoConvergence {
        word: format!("Bowen solve up to degree {}", degrees.last().copied().unwrap_or(0)),
        cycles: degrees.len(),
    })
}

/// Degrees tried by [`bowen_dimension_converged`] by default.
pub const DEGREE_LADDER: [usize; 7] = [24, 32, 48, 64, 96, 128, 192];

/// Least-squares line through `log μ_ℓ` for `ℓ ≥ burn_in`, stopping where
/// the values reach the rounding floor `floor · μ_0`.
///
/// With `L` intervals the singular values come in near-degenerate groups
/// of `L`, one per interval and polynomial degree, so `log μ` is averaged
/// over consecutive groups of `group` values before fitting. The reported
/// ratio is per single index.
pub fn fit_geometric_decay(values: &[f64], group: usize, burn_in: usize, floor: f64) -> Result<GeometricFit> {
    let group = group.max(1);
    let top = values.first().copied().unwrap_or(0.0);
    let above = values.iter().position(|&v| !(v > floor * top)).unwrap_or(values.len());
    let last = burn_in + (above.saturating_sub(burn_in) / group) * group;
    let groups = (last - burn_in.min(last)) / group;
    if groups < 3 {
        return Err(Error::InvalidArgument(format!(
            "only {groups} groups of {group} values above the floor after burn-in {burn_in}"
        )));
    }
    let points: Vec<(f64, f64)> = (0..groups)
        .map(|g| {
            let start = burn_in + g * group;
            let mean = values[start..start + group].iter().map(|v| v.ln()).sum::<f64>() / group as f64;
            (start as f64 + 0.5 * (group - 1) as f64, mean)
        })
        .collect();
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(GeometricFit { ratio: slope.exp(), slope, intercept, r_squared, range: (burn_in, last) })
}
