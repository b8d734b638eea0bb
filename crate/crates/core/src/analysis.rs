//! Dimension solve, argument-principle zero counting, and the zero/value
//! statistics tabulated against height in the critical strip.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_segment, AdaptiveOptions, QuadError};
use crate::zeta::ZetaSeries;

/// Right edge of the strips used by [`density_grid`].
pub const DENSITY_X1: f64 = 10.0;
/// Lower edge of the strips used by [`density_grid`]; slightly below the
/// real axis so the real zeros sit strictly inside.
pub const DENSITY_Y0: f64 = -0.1;

/// A function together with its derivative.
pub trait Analytic: Sync {
    /// `(f(s), f′(s))`.
    fn eval(&self, s: Complex64) -> (Complex64, Complex64);
}

impl Analytic for ZetaSeries {
    fn eval(&self, s: Complex64) -> (Complex64, Complex64) {
        let v = self.evaluate(s);
        (v.z, v.dz)
    }
}

impl<F> Analytic for F
where
    F: Fn(Complex64) -> (Complex64, Complex64) + Sync,
{
    fn eval(&self, s: Complex64) -> (Complex64, Complex64) {
        self(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rectangle {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        let finite = [x0, x1, y0, y1].iter().all(|v| v.is_finite());
        if !finite || x0 >= x1 || y0 >= y1 {
            return Err(Error::InvalidArgument(format!("degenerate rectangle [{x0}, {x1}] x [{y0}, {y1}]")));
        }
        Ok(Self { x0, x1, y0, y1 })
    }

    pub fn contains(&self, s: Complex64) -> bool {
        self.x0 <= s.re && s.re <= self.x1 && self.y0 <= s.im && s.im <= self.y1
    }

    pub fn diameter(&self) -> f64 {
        (self.x1 - self.x0).hypot(self.y1 - self.y0)
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    /// Reflection in the real axis.
    pub fn conjugate(&self) -> Rectangle {
        Rectangle { x0: self.x0, x1: self.x1, y0: -self.y1, y1: -self.y0 }
    }

    /// Corners in counterclockwise order starting bottom-left.
    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.x0, self.y0),
            Complex64::new(self.x1, self.y0),
            Complex64::new(self.x1, self.y1),
            Complex64::new(self.x0, self.y1),
        ]
    }

    fn quadrants(&self, fx: f64, fy: f64) -> [Rectangle; 4] {
        let xm = self.x0 + fx * (self.x1 - self.x0);
        let ym = self.y0 + fy * (self.y1 - self.y0);
        [
            Rectangle { x0: self.x0, x1: xm, y0: self.y0, y1: ym },
            Rectangle { x0: xm, x1: self.x1, y0: self.y0, y1: ym },
            Rectangle { x0: xm, x1: self.x1, y0: ym, y1: self.y1 },
            Rectangle { x0: self.x0, x1: xm, y0: ym, y1: self.y1 },
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourOptions {
    /// Absolute panel tolerance of the adaptive quadrature.
    pub quad_tol: f64,
    /// Smallest `|f|` accepted at a quadrature node.
    pub floor: f64,
    /// Extra passes, each with half the previous `quad_tol`, allowed when a
    /// pass does not land near an integer.
    pub refinements: usize,
    /// Require two consecutive passes to agree before accepting a count.
    pub confirm: bool,
}

impl Default for ContourOptions {
    fn default() -> Self {
        Self { quad_tol: 1e-8, floor: 1e-8, refinements: 3, confirm: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroCount {
    /// `(1/2πi) ∮ f′/f`.
    pub integral: Complex64,
    pub count: i64,
    /// `|integral − count|`.
    pub residual: f64,
    pub panels: usize,
}

fn contour_pass<F: Analytic>(f: &F, rect: &Rectangle, opts: &ContourOptions, tol: f64) -> Result<ZeroCount> {
    let integrand = |s: Complex64| -> Result<Complex64> {
        let (z, dz) = f.eval(s);
        let size = z.norm();
        if !(size >= opts.floor) || !dz.is_finite() {
            return Err(Error::ContourNearZero { re: s.re, im: s.im, value: size });
        }
        Ok(dz / z)
    };
    let quad = AdaptiveOptions { tol, ..AdaptiveOptions::default() };
    let corners = rect.corners();
    let edges: Vec<_> = (0..4)
        .into_par_iter()
        .map(|k| integrate_segment(&integrand, corners[k], corners[(k + 1) % 4], &quad))
        .collect();
    let mut total = Complex64::new(0.0, 0.0);
    let mut panels = 0;
    for edge in edges {
        let edge = edge.map_err(|e| match e {
            QuadError::Integrand(e) => e,
            QuadError::Depth { at } => Error::QuadratureDepth { re: at.re, im: at.im },
        })?;
        total += edge.value;
        panels += edge.panels;
    }
    let integral = total / Complex64::new(0.0, 2.0 * PI);
    let count = integral.re.round() as i64;
    let residual = (integral - count as f64).norm();
    Ok(ZeroCount { integral, count, residual, panels })
}

/// Number of zeros of `f` inside `rect` by the argument principle.
pub fn count_zeros<F: Analytic>(f: &F, rect: &Rectangle, opts: &ContourOptions) -> Result<ZeroCount> {
    let mut tol = opts.quad_tol;
    let mut previous: Option<i64> = None;
    let mut last = None;
    for _ in 0..=opts.refinements {
        let pass = contour_pass(f, rect, opts, tol)?;
        if pass.residual < 0.25 && (!opts.confirm || previous == Some(pass.count)) {
            return Ok(pass);
        }
        previous = (pass.residual < 0.25).then_some(pass.count);
        last = Some(pass);
        tol /= 2.0;
    }
    let last = last.expect("at least one pass");
    if last.residual < 0.25 && !opts.confirm {
        return Ok(last);
    }
    Err(Error::NonIntegerResult { value: last.integral.re, residual: last.residual })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionResult {
    pub delta: f64,
    pub iterations: usize,
    pub bracket: (f64, f64),
    /// `|f(delta)|`.
    pub residual: f64,
}

const SCAN_STEP: f64 = 0.05;
const MAX_NEWTON: usize = 100;

/// Largest real zero on `(0, 1]`: downward scan for a sign change, then
/// Newton safeguarded by bisection.
pub fn dimension<F: Analytic>(f: &F, tol: f64) -> Result<DimensionResult> {
    let real = |x: f64| f.eval(Complex64::new(x, 0.0));
    let steps = (1.0 / SCAN_STEP).round() as usize;
    let mut hi = 1.0;
    let mut f_hi = real(hi).0.re;
    let mut bracket = None;
    for k in 1..=steps {
        if f_hi == 0.0 {
            return Ok(DimensionResult { delta: hi, iterations: 0, bracket: (hi, hi), residual: 0.0 });
        }
        let lo = 1.0 - k as f64 * SCAN_STEP;
        let f_lo = real(lo).0.re;
        if f_lo.signum() != f_hi.signum() {
            bracket = Some((lo, hi, f_lo));
            break;
        }
        hi = lo;
        f_hi = f_lo;
    }
    let (mut a, mut b, f_a) = bracket.ok_or(Error::NoSignChange)?;
    let initial = (a, b);
    let sign_a = f_a.signum();
    let mut x = 0.5 * (a + b);
    for iteration in 1..=MAX_NEWTON {
        let (z, dz) = real(x);
        let (z, dz) = (z.re, dz.re);
        if z == 0.0 {
            return Ok(DimensionResult { delta: x, iterations: iteration, bracket: initial, residual: 0.0 });
        }
        if z.signum() == sign_a {
            a = x;
        } else {
            b = x;
        }
        let mut next = x - z / dz;
        if !next.is_finite() || next <= a || next >= b {
            next = 0.5 * (a + b);
        }
        let step = (next - x).abs();
        x = next;
        if step < tol || (b - a) < tol {
            let residual = real(x).0.norm();
            return Ok(DimensionResult { delta: x, iterations: iteration, bracket: initial, residual });
        }
    }
    Err(Error::MaxIterations { iterations: MAX_NEWTON })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroBox {
    pub region: Rectangle,
    pub count: i64,
}

/// Split fractions tried in turn when a split line passes too close to a zero.
/// Slightly off-centre so that zeros on a symmetry line of the parent are
/// not hit by the first attempt.
const SPLIT_FRACTIONS: [f64; 6] = [0.5123, 0.4711, 0.5437, 0.4489, 0.5781, 0.4207];

fn retryable(e: &Error) -> bool {
    matches!(e, Error::ContourNearZero { .. } | Error::NonIntegerResult { .. } | Error::QuadratureDepth { .. })
}

/// Boxes of diameter below `resolution` that contain zeros, by recursive
/// quadrisection. Child counts always add up to the parent count.
pub fn locate_zeros<F: Analytic>(
    f: &F,
    region: &Rectangle,
    resolution: f64,
    opts: &ContourOptions,
) -> Result<Vec<ZeroBox>> {
    if !(resolution > 0.0) {
        return Err(Error::InvalidArgument(format!("resolution must be positive, got {resolution}")));
    }
    let total = count_zeros(f, region, opts)?;
    let mut out = Vec::new();
    subdivide(f, *region, total.count, resolution, opts, &mut out)?;
    Ok(out)
}

fn subdivide<F: Analytic>(
    f: &F,
    region: Rectangle,
    count: i64,
    resolution: f64,
    opts: &ContourOptions,
    out: &mut Vec<ZeroBox>,
) -> Result<()> {
    if count == 0 {
        return Ok(());
    }
    if region.diameter() < resolution {
        out.push(ZeroBox { region, count });
        return Ok(());
    }
    let mut last_err = None;
    for (k, &fx) in SPLIT_FRACTIONS.iter().enumerate() {
        let fy = SPLIT_FRACTIONS[(k + 3) % SPLIT_FRACTIONS.len()];
        let children = region.quadrants(fx, fy);
        let counts: Result<Vec<ZeroCount>> = children.par_iter().map(|c| count_zeros(f, c, opts)).collect();
        match counts {
            Ok(counts) => {
                let sum: i64 = counts.iter().map(|c| c.count).sum();
                if sum != count {
                    last_err =
                        Some(Error::NonIntegerResult { value: sum as f64, residual: (sum - count).abs() as f64 });
                    continue;
                }
                for (child, c) in children.iter().zip(&counts) {
                    subdivide(f, *child, c.count, resolution, opts, out)?;
                }
                return Ok(());
            }
            Err(e) if retryable(&e) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("at least one split attempted"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityRow {
    pub y: f64,
    /// Zeros in `[x0, x1] × [y0, y]`.
    pub count: i64,
    /// `log N / log y − 1`, absent when `N = 0` or `y ≤ 1`.
    pub statistic: Option<f64>,
    /// Zeros in `[x0, x1]` with `|Im s| ≤ y`, using conjugate symmetry.
    pub count_symmetric: i64,
    pub statistic_symmetric: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityGrid {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    /// Zeros in `[x0, x1] × [y0, −y0]`; all of these lie on or near the real axis.
    pub axis_count: i64,
    pub rows: Vec<DensityRow>,
}

pub fn density_statistic(count: i64, y: f64) -> Option<f64> {
    (count > 0 && y > 1.0).then(|| (count as f64).ln() / y.ln() - 1.0)
}

/// Log-spaced heights `2 … y_max`.
pub fn density_levels(y_max: f64, samples: usize) -> Result<Vec<f64>> {
    if !(y_max > 2.0) || samples == 0 {
        return Err(Error::InvalidArgument(format!("need y_max > 2 and samples >= 1, got {y_max}, {samples}")));
    }
    if samples == 1 {
        return Ok(vec![y_max]);
    }
    let ratio = (y_max / 2.0).ln() / (samples - 1) as f64;
    Ok((0..samples).map(|k| if k + 1 == samples { y_max } else { 2.0 * (ratio * k as f64).exp() }).collect())
}

/// Cumulative zero counts in `[x0, 10] × [−0.1, y]` on a log-spaced grid of
/// heights, computed strip by strip.
pub fn density_grid<F: Analytic>(
    f: &F,
    x0: f64,
    y_max: f64,
    samples: usize,
    opts: &ContourOptions,
) -> Result<DensityGrid> {
    if !(x0 < DENSITY_X1) {
        return Err(Error::InvalidArgument(format!("x0 = {x0} must be below {DENSITY_X1}")));
    }
    // boundaries: y0, −y0, then the levels
    let mut bounds = vec![DENSITY_Y0, -DENSITY_Y0];
    bounds.extend(density_levels(y_max, samples)?);
    let strips = bounds.len() - 1;
    let strip =
        |b: &[f64], k: usize| Rectangle::new(x0, DENSITY_X1, b[k], b[k + 1]).and_then(|r| count_zeros(f, &r, opts));

    let mut counts: Vec<Option<i64>> = vec![None; strips];
    const ATTEMPTS: usize = 8;
    for attempt in 0..ATTEMPTS {
        let todo: Vec<usize> = (0..strips).filter(|&k| counts[k].is_none()).collect();
        if todo.is_empty() {
            break;
        }
        let results: Vec<(usize, Result<ZeroCount>)> = todo.par_iter().map(|&k| (k, strip(&bounds, k))).collect();
        for (k, r) in results {
            match r {
                Ok(c) => counts[k] = Some(c.count),
                Err(e) if retryable(&e) && attempt + 1 < ATTEMPTS => {
                    // move one edge of the strip, alternating top and bottom;
                    // the axis strip and the outer bottom edge stay put
                    let edge = if attempt % 2 == 0 || k <= 1 { k + 1 } else { k };
                    if edge <= 1 {
                        return Err(e);
                    }
                    let gap = bounds[edge] - bounds[edge - 1];
                    bounds[edge] += 1e-3 * gap.min(1.0) * (1.0 + attempt as f64);
                    for j in [edge - 1, edge] {
                        if j < strips {
                            counts[j] = None;
                        }
                    }
                }
                Err(e) => return Err(e),
            }
        }
    }
    let counts: Vec<i64> = counts.into_iter().map(|c| c.expect("every strip counted")).collect();

    let axis_count = counts[0];
    let mut cumulative = axis_count;
    let mut rows = Vec::with_capacity(strips - 1);
    for k in 1..strips {
        cumulative += counts[k];
        let y = bounds[k + 1];
        let symmetric = 2 * cumulative - axis_count;
        rows.push(DensityRow {
            y,
            count: cumulative,
            statistic: density_statistic(cumulative, y),
            count_symmetric: symmetric,
            statistic_symmetric: density_statistic(symmetric, y),
        });
    }
    Ok(DensityGrid { x0, x1: DENSITY_X1, y0: DENSITY_Y0, axis_count, rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogZSample {
    pub s: Complex64,
    pub abs_z: f64,
    /// `log log |Z(s)| / log |s|`, absent when `|Z| ≤ 1` or `|s| = 1`.
    pub statistic: Option<f64>,
}

pub fn logz_statistic(abs_z: f64, s: Complex64) -> Option<f64> {
    if !(abs_z > 1.0) {
        return None;
    }
    let value = abs_z.ln().ln() / s.norm().ln();
    value.is_finite().then_some(value)
}

/// `|Z|` and the log-log statistic at `samples` uniform pseudo-random points.
pub fn logz_grid<F: Analytic>(f: &F, region: &Rectangle, samples: usize, seed: u64) -> Vec<LogZSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Complex64> = (0..samples)
        .map(|_| Complex64::new(rng.random_range(region.x0..=region.x1), rng.random_range(region.y0..=region.y1)))
        .collect();
    points
        .into_par_iter()
        .map(|s| {
            let abs_z = f.eval(s).0.norm();
            LogZSample { s, abs_z, statistic: logz_statistic(abs_z, s) }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GroupConfig;
    use crate::orbits::build_orbit_table;
    use crate::zeta::Mode;
    use std::sync::Arc;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn quadratic(s: Complex64) -> (Complex64, Complex64) {
        (s * s + 1.0, s * 2.0)
    }

    fn series(theta: f64, m: usize) -> ZetaSeries {
        let config = GroupConfig::symmetric(theta, 3).unwrap();
        ZetaSeries::new(Arc::new(build_orbit_table(&config, m).unwrap()), m, Mode::Conformal).unwrap()
    }

    #[test]
    fn counts_the_zero_of_a_quadratic() {
        let r = Rectangle::new(-1.0, 1.0, 0.5, 2.0).unwrap();
        let n = count_zeros(&quadratic, &r, &ContourOptions::default()).unwrap();
        assert_eq!(n.count, 1);
        assert!(n.residual < 1e-8);
        let both = Rectangle::new(-1.0, 1.0, -2.0, 2.0).unwrap();
        assert_eq!(count_zeros(&quadratic, &both, &ContourOptions::default()).unwrap().count, 2);
    }

    #[test]
    fn contour_through_a_zero_is_refused() {
        let r = Rectangle::new(-1.0, 1.0, 0.0, 1.0).unwrap();
        let err = count_zeros(&|s: Complex64| (s, c(1.0, 0.0)), &r, &ContourOptions::default()).unwrap_err();
        assert!(retryable(&err), "{err:?}");
    }

    #[test]
    fn degenerate_rectangles_are_rejected() {
        assert!(Rectangle::new(1.0, 0.0, 0.0, 1.0).is_err());
        assert!(Rectangle::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(Rectangle::new(0.0, f64::NAN, 0.0, 1.0).is_err());
    }

    #[test]
    fn dimension_of_the_thirty_degree_group() {
        let z = series(30.0, 13);
        let d = dimension(&z, 1e-13).unwrap();
        assert!((d.delta - 0.18398306).abs() < 1e-6, "{d:?}");
        assert!(d.residual < 1e-10);
        assert!(d.bracket.0 < d.delta && d.delta < d.bracket.1);
    }

    #[test]
    fn dimension_is_stable_in_the_truncation() {
        let z = series(30.0, 13);
        let reference = dimension(&z, 1e-14).unwrap().delta;
        for m in 10..13 {
            let d = dimension(&z.with_order(m).unwrap(), 1e-14).unwrap().delta;
            assert!((d - reference).abs() < 1e-7, "M={m}: {d} vs {reference}");
        }
    }

    #[test]
    fn dimension_without_sign_change_fails() {
        let positive = |s: Complex64| (s * s + 1.0, s * 2.0);
        assert_eq!(dimension(&positive, 1e-12).unwrap_err(), Error::NoSignChange);
    }

    #[test]
    fn dimension_of_a_harness_function_picks_the_largest_root() {
        // roots at 0.2 and 0.6
        let f = |s: Complex64| ((s - 0.2) * (s - 0.6), s * 2.0 - 0.8);
        let d = dimension(&f, 1e-14).unwrap();
        assert!((d.delta - 0.6).abs() < 1e-13);
    }

    #[test]
    fn no_zeros_far_to_the_right() {
        let z = series(30.0, 13);
        let r = Rectangle::new(1.5, 4.0, -3.0, 3.0).unwrap();
        assert_eq!(count_zeros(&z, &r, &ContourOptions::default()).unwrap().count, 0);
    }

    #[test]
    fn delta_is_the_only_zero_in_a_small_box() {
        let z = series(30.0, 13);
        let r = Rectangle::new(0.1, 0.3, -0.05, 0.05).unwrap();
        assert_eq!(count_zeros(&z, &r, &ContourOptions::default()).unwrap().count, 1);
        let boxes = locate_zeros(&z, &r, 0.01, &ContourOptions::default()).unwrap();
        assert_eq!(boxes.len(), 1);
        assert_eq!(boxes[0].count, 1);
        assert!(boxes[0].region.contains(c(0.18398306, 0.0)), "{boxes:?}");
    }

    #[test]
    fn counts_add_over_splits_and_mirror() {
        let z = series(30.0, 13);
        let opts = ContourOptions::default();
        let whole = Rectangle::new(-0.2, 1.0, 0.3, 25.0).unwrap();
        let n = count_zeros(&z, &whole, &opts).unwrap().count;
        let split = 11.3;
        let lower = count_zeros(&z, &Rectangle { y1: split, ..whole }, &opts).unwrap().count;
        let upper = count_zeros(&z, &Rectangle { y0: split, ..whole }, &opts).unwrap().count;
        assert_eq!(n, lower + upper);
        assert_eq!(n, count_zeros(&z, &whole.conjugate(), &opts).unwrap().count);
    }

    #[test]
    fn halving_the_tolerance_keeps_counts() {
        let z = series(30.0, 13);
        let r = Rectangle::new(-0.2, 1.0, -0.1, 20.0).unwrap();
        let loose = ContourOptions::default();
        let tight = ContourOptions { quad_tol: loose.quad_tol / 2.0, ..loose };
        assert_eq!(count_zeros(&z, &r, &loose).unwrap().count, count_zeros(&z, &r, &tight).unwrap().count);
    }

    #[test]
    fn located_boxes_add_up() {
        let f = |s: Complex64| {
            let roots = [c(0.3, 0.4), c(-0.5, 0.9), c(0.31, 0.41)];
            let value = roots.iter().fold(c(1.0, 0.0), |acc, r| acc * (s - r));
            let deriv = (0..3)
                .map(|i| {
                    roots.iter().enumerate().filter(|(j, _)| *j != i).fold(c(1.0, 0.0), |acc, (_, r)| acc * (s - r))
                })
                .sum();
            (value, deriv)
        };
        let r = Rectangle::new(-1.0, 1.0, 0.0, 1.5).unwrap();
        let boxes = locate_zeros(&f, &r, 0.05, &ContourOptions::default()).unwrap();
        assert_eq!(boxes.iter().map(|b| b.count).sum::<i64>(), 3);
        assert!(boxes.iter().all(|b| b.region.diameter() < 0.05));
        assert!(boxes.iter().any(|b| b.region.contains(c(-0.5, 0.9))));
    }

    #[test]
    fn empty_region_locates_nothing() {
        let r = Rectangle::new(2.0, 3.0, 2.0, 3.0).unwrap();
        assert!(locate_zeros(&quadratic, &r, 0.1, &ContourOptions::default()).unwrap().is_empty());
    }

    #[test]
    fn density_statistic_guards() {
        assert_eq!(density_statistic(0, 50.0), None);
        assert_eq!(density_statistic(5, 1.0), None);
        assert_eq!(density_statistic(5, 0.5), None);
        let v = density_statistic(100, 10.0).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn density_levels_are_log_spaced() {
        let y = density_levels(200.0, 5).unwrap();
        assert_eq!(y.first(), Some(&2.0));
        assert_eq!(y.last(), Some(&200.0));
        for w in y.windows(3) {
            assert!((w[1] / w[0] - w[2] / w[1]).abs() < 1e-12);
        }
        assert!(density_levels(1.0, 5).is_err());
    }

    #[test]
    fn density_counts_are_nondecreasing() {
        let z = series(30.0, 13);
        let grid = density_grid(&z, 0.1, 40.0, 6, &ContourOptions::default()).unwrap();
        assert!(grid.axis_count >= 1, "δ lies in the axis strip");
        let mut last = grid.axis_count;
        for row in &grid.rows {
            assert!(row.count >= last);
            assert_eq!(row.count_symmetric, 2 * row.count - grid.axis_count);
            assert_eq!(row.statistic, density_statistic(row.count, row.y));
            last = row.count;
        }
    }

    #[test]
    fn logz_guards_and_determinism() {
        assert_eq!(logz_statistic(1.0, c(3.0, 4.0)), None);
        assert_eq!(logz_statistic(0.5, c(3.0, 4.0)), None);
        assert!(logz_statistic(10.0, c(3.0, 4.0)).unwrap().is_finite());
        let z = series(30.0, 10);
        let r = Rectangle::new(-0.2, 1.0, 0.0, 100.0).unwrap();
        let a = logz_grid(&z, &r, 64, 3);
        let b = logz_grid(&z, &r, 64, 3);
        assert_eq!(a, b);
        for p in &a {
            assert!(r.contains(p.s));
            assert_eq!(p.statistic.is_some(), p.abs_z > 1.0 && p.s.norm() != 1.0);
        }
    }
}
