//! Reflection-circle configurations and their boundary action.
//!
//! Circles live in the Poincaré disc and are orthogonal to the unit circle.
//! The boundary circle is sent to the real line by the Cayley transform
//! `z ↦ i(1+z)/(1−z)`, under which each inversion becomes a real
//! fractional-linear map with determinant −1.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Tolerance for orthogonality and disjointness checks.
pub const GEOMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Complex64,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Complex64, radius: f64) -> Self {
        Self { center, radius }
    }

    /// `|c|² − 1 − r²`, zero for a circle orthogonal to the unit circle.
    pub fn orthogonality_residual(&self) -> f64 {
        self.center.norm_sqr() - 1.0 - self.radius * self.radius
    }

    /// Arguments `(φ₁, φ₂)` of the two points where the circle meets the
    /// unit circle, with `φ₁ < φ₂` and the arc `[φ₁, φ₂]` inside the disc.
    /// Angles are not reduced, so the arc may straddle 0 or 2π.
    fn boundary_arc(&self) -> (f64, f64) {
        let dist = self.center.norm();
        let alpha = self.center.arg();
        let residual = self.orthogonality_residual();
        // k = Re(P c̄) for a point P on both circles
        let k = 1.0 + 0.5 * residual;
        let sin_part = (self.radius * self.radius - residual * (1.0 + 0.25 * residual)).max(0.0).sqrt();
        let half = sin_part.atan2(k);
        debug_assert!(dist > 0.0);
        (alpha - half, alpha + half)
    }
}

/// Real fractional-linear map `x ↦ (a x + b)/(c x + d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryMap {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl BoundaryMap {
    pub const IDENTITY: BoundaryMap = BoundaryMap { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    pub fn det(&self) -> f64 {
        // Kahan's fma form keeps the cancellation exact
        let w = self.b * self.c;
        let err = (-self.b).mul_add(self.c, w);
        self.a.mul_add(self.d, -w) + err
    }

    pub fn det_sign(&self) -> i8 {
        if self.det() < 0.0 {
            -1
        } else {
            1
        }
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn apply(&self, x: f64) -> f64 {
        (self.a * x + self.b) / (self.c * x + self.d)
    }

    pub fn apply_complex(&self, z: Complex64) -> Complex64 {
        (z * self.a + self.b) / (z * self.c + self.d)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let den = self.c * x + self.d;
        self.det() / (den * den)
    }

    /// Matrix product `self · rhs`, i.e. the map `self ∘ rhs`.
    pub fn compose(&self, rhs: &BoundaryMap) -> BoundaryMap {
        BoundaryMap {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }

    pub fn apply_vec(&self, v: [f64; 2]) -> [f64; 2] {
        [self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1]]
    }

    pub fn max_abs(&self) -> f64 {
        self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs())
    }

    pub fn scaled(&self, factor: f64) -> BoundaryMap {
        BoundaryMap { a: self.a * factor, b: self.b * factor, c: self.c * factor, d: self.d * factor }
    }
}

/// Image on the real line of the arc cut out by one circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryInterval {
    pub lo: f64,
    pub hi: f64,
    pub owner: usize,
}

impl BoundaryInterval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    /// Signed distance between two intervals; negative when they overlap.
    pub fn gap(&self, other: &BoundaryInterval) -> f64 {
        (other.lo - self.hi).max(self.lo - other.hi)
    }
}

/// One reflection generator: its boundary map and the interval it owns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub map: BoundaryMap,
    pub interval: BoundaryInterval,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupConfig {
    circles: Vec<Circle>,
    angle_degrees: Option<f64>,
    rotation_offset: f64,
}

impl GroupConfig {
    /// `L` circles cutting arcs of angle `θ` on the unit circle, centres at
    /// angles `π/L + 2πk/L` so that none of the arcs contains `z = 1`.
    pub fn symmetric(theta_degrees: f64, num_circles: usize) -> Result<Self> {
        if num_circles < 3 {
            return Err(Error::InvalidArgument(format!(
                "a symmetric configuration needs at least 3 circles, got {num_circles}"
            )));
        }
        if !theta_degrees.is_finite() || theta_degrees <= 0.0 || theta_degrees >= 180.0 {
            return Err(Error::InvalidAngle { theta: theta_degrees, reason: "must lie in (0, 180)".into() });
        }
        let half = theta_degrees.to_radians() / 2.0;
        let radius = half.tan();
        let dist = 1.0 / half.cos();
        let offset = PI / num_circles as f64;
        let circles = (0..num_circles)
            .map(|k| {
                let phi = offset + 2.0 * PI * k as f64 / num_circles as f64;
                Circle::new(Complex64::from_polar(dist, phi), radius)
            })
            .collect();
        let config = GroupConfig { circles, angle_degrees: Some(theta_degrees), rotation_offset: offset };
        config.check()?;
        Ok(config)
    }

    /// Arbitrary circles; fails unless every invariant holds.
    pub fn from_circles(circles: Vec<Circle>) -> Result<Self> {
        if circles.len() < 3 {
            return Err(Error::InvalidArgument(format!(
                "a configuration needs at least 3 circles, got {}",
                circles.len()
            )));
        }
        let config = GroupConfig { circles, angle_degrees: None, rotation_offset: 0.0 };
        config.check()?;
        Ok(config)
    }

    fn check(&self) -> Result<()> {
        for (index, circle) in self.circles.iter().enumerate() {
            if !(circle.radius > 0.0) || !circle.center.re.is_finite() || !circle.center.im.is_finite() {
                return Err(Error::InvalidArgument(format!("circle {index} has a non-positive radius")));
            }
            let residual = circle.orthogonality_residual();
            if residual.abs() > GEOMETRY_TOL {
                return Err(Error::NotOrthogonal { index, residual });
            }
        }
        for gap in disc_gaps(&self.circles) {
            if gap.gap <= GEOMETRY_TOL {
                return Err(Error::DisjointnessViolation { i: gap.i, j: gap.j, gap: gap.gap });
            }
        }
        for (index, circle) in self.circles.iter().enumerate() {
            if pole_margin(circle) <= GEOMETRY_TOL {
                return Err(Error::CayleyPoleInsideDisc { index });
            }
        }
        Ok(())
    }

    pub fn circles(&self) -> &[Circle] {
        &self.circles
    }

    pub fn num_generators(&self) -> usize {
        self.circles.len()
    }

    /// Relabellings of the generators induced by isometries of the
    /// configuration, as lookup tables. Symmetric configurations carry the
    /// dihedral group (rotations `k ↦ k + j`, reflections `k ↦ j − k`);
    /// explicit circles only the identity.
    pub fn symbol_symmetries(&self) -> Vec<Vec<u8>> {
        let l = self.circles.len();
        if self.angle_degrees.is_none() {
            return vec![(0..l as u8).collect()];
        }
        (0..l)
            .flat_map(|j| {
                [(0..l).map(|k| ((k + j) % l) as u8).collect(), (0..l).map(|k| ((j + l - k) % l) as u8).collect()]
            })
            .collect()
    }

    pub fn angle_degrees(&self) -> Option<f64> {
        self.angle_degrees
    }

    pub fn rotation_offset(&self) -> f64 {
        self.rotation_offset
    }

    /// Generators acting on the real line, in circle order.
    pub fn boundary_maps(&self) -> Result<Vec<Generator>> {
        self.circles.iter().enumerate().map(|(owner, circle)| boundary_generator(owner, circle)).collect()
    }

    pub fn validate(&self) -> Diagnostics {
        validate(&self.circles)
    }

    /// Hex digest identifying the circle data bit-for-bit, and whether the
    /// configuration was built symmetrically (which changes the orbit table,
    /// see [`GroupConfig::symbol_symmetries`]).
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update((self.circles.len() as u64).to_le_bytes());
        hasher.update([self.angle_degrees.is_some() as u8]);
        for circle in &self.circles {
            hasher.update(circle.center.re.to_bits().to_le_bytes());
            hasher.update(circle.center.im.to_bits().to_le_bytes());
            hasher.update(circle.radius.to_bits().to_le_bytes());
        }
        hasher.finalize()[..16].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Cayley image of the boundary point `e^{iφ}`.
fn cayley_boundary(phi: f64) -> f64 {
    -1.0 / (phi / 2.0).tan()
}

/// `|1 − c| − r`: positive when the closed disc misses the Cayley pole.
fn pole_margin(circle: &Circle) -> f64 {
    (Complex64::new(1.0, 0.0) - circle.center).norm() - circle.radius
}

fn boundary_generator(owner: usize, circle: &Circle) -> Result<Generator> {
    if pole_margin(circle) <= GEOMETRY_TOL {
        return Err(Error::CayleyPoleInsideDisc { index: owner });
    }
    let (mut phi1, mut phi2) = circle.boundary_arc();
    // bring the arc into (0, 2π) without wrapping through the pole
    let shift = (phi1 / (2.0 * PI)).floor() * 2.0 * PI;
    phi1 -= shift;
    phi2 -= shift;
    if phi1 <= 0.0 || phi2 >= 2.0 * PI {
        return Err(Error::CayleyPoleInsideDisc { index: owner });
    }
    let (x1, x2) = (cayley_boundary(phi1), cayley_boundary(phi2));
    let (lo, hi) = if x1 < x2 { (x1, x2) } else { (x2, x1) };
    let p = 0.5 * (lo + hi);
    let rho = 0.5 * (hi - lo);
    let map = BoundaryMap::new(p / rho, (rho * rho - p * p) / rho, 1.0 / rho, -p / rho);
    Ok(Generator { map, interval: BoundaryInterval { lo, hi, owner } })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairGap {
    pub i: usize,
    pub j: usize,
    pub gap: f64,
}

fn disc_gaps(circles: &[Circle]) -> Vec<PairGap> {
    let mut gaps = Vec::new();
    for i in 0..circles.len() {
        for j in i + 1..circles.len() {
            let (a, b) = (&circles[i], &circles[j]);
            let gap = (a.center - b.center).norm() - a.radius - b.radius;
            gaps.push(PairGap { i, j, gap });
        }
    }
    gaps
}

/// Invariant report for a set of circles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub orthogonality_residuals: Vec<f64>,
    pub disc_gaps: Vec<PairGap>,
    /// Empty when the boundary maps cannot be formed.
    pub interval_gaps: Vec<PairGap>,
    pub pole_margins: Vec<f64>,
    pub passed: bool,
}

pub fn validate(circles: &[Circle]) -> Diagnostics {
    let orthogonality_residuals: Vec<f64> = circles.iter().map(Circle::orthogonality_residual).collect();
    let disc_gaps = disc_gaps(circles);
    let pole_margins: Vec<f64> = circles.iter().map(pole_margin).collect();

    let generators: Option<Vec<Generator>> =
        circles.iter().enumerate().map(|(owner, c)| boundary_generator(owner, c).ok()).collect();
    let mut interval_gaps = Vec::new();
    if let Some(generators) = &generators {
        for i in 0..generators.len() {
            for j in i + 1..generators.len() {
                let gap = generators[i].interval.gap(&generators[j].interval);
                interval_gaps.push(PairGap { i, j, gap });
            }
        }
    }

    let passed = circles.len() >= 3
        && circles.iter().all(|c| c.radius > 0.0)
        && orthogonality_residuals.iter().all(|r| r.abs() <= GEOMETRY_TOL)
        && disc_gaps.iter().all(|g| g.gap > GEOMETRY_TOL)
        && pole_margins.iter().all(|m| *m > GEOMETRY_TOL)
        && generators.is_some()
        && interval_gaps.iter().all(|g| g.gap > 0.0);

    Diagnostics { orthogonality_residuals, disc_gaps, interval_gaps, pole_margins, passed }
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    proptest! {
        #[test]
        fn sec_tan_identity(theta in 0.5f64..119.5) {
            let config = GroupConfig::symmetric(theta, 3).unwrap();
            for c in config.circles() {
                prop_assert!(c.orthogonality_residual().abs() < 1e-14 * c.center.norm_sqr().max(1.0));
            }
        }

        #[test]
        fn generator_action_is_an_involution(theta in 1.0f64..119.0, seed in any::<u64>()) {
            let config = GroupConfig::symmetric(theta, 3).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            for g in config.boundary_maps().unwrap() {
                for _ in 0..100 {
                    let x: f64 = rng.random_range(-50.0..50.0);
                    if (g.map.c * x + g.map.d).abs() < 1e-6 {
                        continue;
                    }
                    let back = g.map.apply(g.map.apply(x));
                    prop_assert!((back - x).abs() <= 1e-9 * x.abs().max(1.0), "{} -> {}", x, back);
                }
            }
        }
    }
}
