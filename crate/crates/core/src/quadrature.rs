//! Adaptive Gauss–Legendre quadrature along straight segments in ℂ.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

/// Points per panel.
pub const PANEL_ORDER: usize = 16;

/// Gauss–Legendre nodes and weights on `[−1, 1]`, by Newton iteration on
/// `P_n` from the Chebyshev-like initial guesses.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn panel_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_ORDER))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveOptions {
    /// Absolute tolerance on `|Q(panel) − Q(left) − Q(right)|`.
    pub tol: f64,
    /// Panels longer than this are split before any error test.
    pub initial_panel: f64,
    pub max_depth: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self { tol: 1e-8, initial_panel: 0.25, max_depth: 40 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentIntegral {
    pub value: Complex64,
    pub panels: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum QuadError<E> {
    /// The integrand refused a point.
    Integrand(E),
    /// Bisection depth exhausted around `at`.
    Depth { at: Complex64 },
}

/// `∫_a^b f(z) dz` along the straight segment from `a` to `b`.
pub fn integrate_segment<F, E>(
    f: &F,
    a: Complex64,
    b: Complex64,
    opts: &AdaptiveOptions,
) -> Result<SegmentIntegral, QuadError<E>>
where
    F: Fn(Complex64) -> Result<Complex64, E>,
{
    let length = (b - a).norm();
    if length == 0.0 {
        return Ok(SegmentIntegral { value: Complex64::new(0.0, 0.0), panels: 0 });
    }
    let pieces = ((length / opts.initial_panel).ceil() as usize).max(1);
    let mut total = SegmentIntegral { value: Complex64::new(0.0, 0.0), panels: 0 };
    for k in 0..pieces {
        let lo = a + (b - a) * (k as f64 / pieces as f64);
        let hi = a + (b - a) * ((k + 1) as f64 / pieces as f64);
        let whole = gauss_panel(f, lo, hi).map_err(QuadError::Integrand)?;
        let piece = refine(f, lo, hi, whole, opts, 0)?;
        total.value += piece.value;
        total.panels += piece.panels;
    }
    Ok(total)
}

fn refine<F, E>(
    f: &F,
    lo: Complex64,
    hi: Complex64,
    whole: Complex64,
    opts: &AdaptiveOptions,
    depth: usize,
) -> Result<SegmentIntegral, QuadError<E>>
where
    F: Fn(Complex64) -> Result<Complex64, E>,
{
    let mid = (lo + hi) * 0.5;
    let left = gauss_panel(f, lo, mid).map_err(QuadError::Integrand)?;
    let right = gauss_panel(f, mid, hi).map_err(QuadError::Integrand)?;
    if (left + right - whole).norm() <= opts.tol {
        return Ok(SegmentIntegral { value: left + right, panels: 2 });
    }
    if depth >= opts.max_depth {
        return Err(QuadError::Depth { at: mid });
    }
    let l = refine(f, lo, mid, left, opts, depth + 1)?;
    let r = refine(f, mid, hi, right, opts, depth + 1)?;
    Ok(SegmentIntegral { value: l.value + r.value, panels: l.panels + r.panels })
}

fn gauss_panel<F, E>(f: &F, lo: Complex64, hi: Complex64) -> Result<Complex64, E>
where
    F: Fn(Complex64) -> Result<Complex64, E>,
{
    let (nodes, weights) = panel_rule();
    let half = (hi - lo) * 0.5;
    let mid = (hi + lo) * 0.5;
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in nodes.iter().zip(weights) {
        acc += f(mid + half * *x)? * *w;
    }
    Ok(acc * half)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::convert::Infallible;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(PANEL_ORDER);
        assert_relative_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
        for degree in 0..2 * PANEL_ORDER {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(degree as i32)).sum();
            let exact = if degree % 2 == 1 { 0.0 } else { 2.0 / (degree as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-14, "degree {degree}: {q} vs {exact}");
        }
    }

    #[test]
    fn small_rules_match_tables() {
        let (x, w) = gauss_legendre(2);
        assert_relative_eq!(x[1], 1.0 / 3f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(w[0], 1.0, epsilon = 1e-15);
        let (x, w) = gauss_legendre(3);
        assert_relative_eq!(x[2], (0.6f64).sqrt(), epsilon = 1e-15);
        assert_relative_eq!(x[1], 0.0, epsilon = 1e-15);
        assert_relative_eq!(w[1], 8.0 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn closed_contour_around_a_pole() {
        // ∮ dz/z = 2πi around the unit square centred at 0
        let f = |z: Complex64| -> Result<Complex64, Infallible> { Ok(1.0 / z) };
        let corners = [
            Complex64::new(-1.0, -1.0),
            Complex64::new(1.0, -1.0),
            Complex64::new(1.0, 1.0),
            Complex64::new(-1.0, 1.0),
        ];
        let opts = AdaptiveOptions::default();
        let total: Complex64 =
            (0..4).map(|k| integrate_segment(&f, corners[k], corners[(k + 1) % 4], &opts).unwrap().value).sum();
        assert!((total - Complex64::new(0.0, 2.0 * PI)).norm() < 1e-10);
    }

    #[test]
    fn adaptive_refinement_handles_a_near_singularity() {
        // ∫_{-1}^{1} dx / (x − 0.01i)
        let eps = 0.01;
        let f = move |z: Complex64| -> Result<Complex64, Infallible> { Ok(1.0 / (z - Complex64::new(0.0, eps))) };
        let got =
            integrate_segment(&f, Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0), &AdaptiveOptions::default())
                .unwrap();
        let exact = Complex64::new(0.0, 2.0 * (1.0 / eps).atan());
        assert!((got.value - exact).norm() < 1e-8);
        assert!(got.panels > 8);
    }

    #[test]
    fn integrand_errors_propagate() {
        let f = |z: Complex64| if z.re > 0.5 { Err("nope") } else { Ok(z) };
        let r = integrate_segment(&f, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), &AdaptiveOptions::default());
        assert_eq!(r.unwrap_err(), QuadError::Integrand("nope"));
    }
}
