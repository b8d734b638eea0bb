//! Per-orbit multipliers of compositions of boundary maps.
//!
//! For an admissible word `w = w₀…w_{n−1}` the composed map is
//! `φ = σ_{w_{n−1}} ∘ … ∘ σ_{w₀}` with matrix `A = A_{w_{n−1}}⋯A_{w₀}`. Since
//! every generator has determinant −1, the derivative at the attracting fixed
//! point is `(−1)ⁿ/λ₊²`, where `λ₊` is the dominant eigenvalue of `A`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BoundaryMap, Generator, GroupConfig};
use crate::symbolic::{enumerate_orbit_classes, OrbitClass, Word};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerOptions {
    /// Relative change of the per-cycle log growth that counts as converged.
    pub tol: f64,
    pub max_cycles: usize,
    pub seed: u64,
}

impl Default for PowerOptions {
    fn default() -> Self {
        Self { tol: 1e-14, max_cycles: 200, seed: 0x5eed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitScalars {
    pub word: Word,
    /// Number of distinct rotations of `word`.
    pub multiplicity: usize,
    pub primitive_period: usize,
    /// `ln|φ′(z)|`, strictly negative.
    pub u: f64,
    /// Signed multiplier `φ′(z) = (−1)ⁿ e^u`.
    pub m: f64,
    /// Attracting fixed point on the real line.
    pub x_fix: f64,
}

impl OrbitScalars {
    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    fn from_log_lambda(word: &Word, log_lambda: f64, x_fix: f64) -> Result<Self> {
        let n = word.len();
        let u = -2.0 * log_lambda;
        if !(u < 0.0) {
            return Err(Error::NotContracting { word: word.to_string(), u });
        }
        let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        let p = word.primitive_period();
        Ok(OrbitScalars { word: word.clone(), multiplicity: p, primitive_period: p, u, m: sign * u.exp(), x_fix })
    }
}

fn check_word(word: &Word, generators: &[Generator]) -> Result<()> {
    if !word.is_admissible() {
        return Err(Error::InvalidArgument(format!("word {word} is not cyclically admissible")));
    }
    if word.symbols().iter().any(|&s| s as usize >= generators.len()) {
        return Err(Error::InvalidArgument(format!("word {word} uses a symbol without a generator")));
    }
    Ok(())
}

/// Dominant eigenvalue of `A_{w_{n−1}}⋯A_{w₀}` by power iteration, applying
/// the factors one at a time so the product is never formed.
pub fn multiplier(word: &Word, generators: &[Generator]) -> Result<OrbitScalars> {
    multiplier_with(word, generators, &PowerOptions::default())
}

pub fn multiplier_with(word: &Word, generators: &[Generator], opts: &PowerOptions) -> Result<OrbitScalars> {
    check_word(word, generators)?;
    let maps: Vec<BoundaryMap> = word.symbols().iter().map(|&s| generators[s as usize].map).collect();
    let (log_lambda, v) = match factored_power_iteration(&maps, opts, opts.seed) {
        Some(hit) => hit,
        // one restart from a fresh vector before giving up
        None => factored_power_iteration(&maps, opts, opts.seed.wrapping_add(1))
            .ok_or_else(|| Error::NoConvergence { word: word.to_string(), cycles: 2 * opts.max_cycles })?,
    };
    OrbitScalars::from_log_lambda(word, log_lambda, v[0] / v[1])
}

/// Returns `(ln|λ₊|, eigenvector)` of the product of `factors` (applied in order).
pub fn factored_power_iteration(factors: &[BoundaryMap], opts: &PowerOptions, seed: u64) -> Option<(f64, [f64; 2])> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: [f64; 2] = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
    let norm = v[0].hypot(v[1]);
    v = [v[0] / norm, v[1] / norm];

    let mut previous = f64::NAN;
    let mut previous_v = [f64::NAN; 2];
    for _ in 0..opts.max_cycles {
        let mut growth = 0.0;
        for map in factors {
            let w = map.apply_vec(v);
            let norm = w[0].hypot(w[1]);
            if norm == 0.0 || !norm.is_finite() {
                return None;
            }
            growth += norm.ln();
            v = [w[0] / norm, w[1] / norm];
        }
        // the eigenvector settles more slowly than the growth rate
        let aligned = if v[0] * previous_v[0] + v[1] * previous_v[1] < 0.0 { -1.0 } else { 1.0 };
        let drift = (v[0] - aligned * previous_v[0]).hypot(v[1] - aligned * previous_v[1]);
        if (growth - previous).abs() <= opts.tol * growth.abs().max(1.0) && drift <= 1e-12 {
            return Some((growth, v));
        }
        previous = growth;
        previous_v = v;
    }
    None
}

/// Closed-form 2×2 eigenvalue from trace and determinant; the product is
/// accumulated with a running scale factor kept in log form.
pub fn multiplier_analytic(word: &Word, generators: &[Generator]) -> Result<OrbitScalars> {
    check_word(word, generators)?;
    let mut product = BoundaryMap::IDENTITY;
    let mut log_scale = 0.0;
    for &s in word.symbols() {
        product = generators[s as usize].map.compose(&product);
        let k = product.max_abs();
        product = product.scaled(1.0 / k);
        log_scale += k.ln();
    }
    let n = word.len();
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    // det(A) = (−1)ⁿ exactly; the scaled product has det (−1)ⁿ e^{−2S}
    let det = sign * (-2.0 * log_scale).exp();
    let trace = product.trace();
    let root = (trace * trace - 4.0 * det).max(0.0).sqrt();
    let lambda = 0.5 * (trace + trace.signum() * root);

    let via_b = lambda - product.a;
    let via_c = product.c;
    let x_fix = if via_b.abs() >= via_c.abs() { product.b / via_b } else { (lambda - product.d) / via_c };
    OrbitScalars::from_log_lambda(word, log_scale + lambda.abs().ln(), x_fix)
}

/// Orbit scalars for all classes of length `1..=max_len`, `by_len[n − 1]`
/// sorted by representative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitTable {
    pub fingerprint: String,
    pub num_generators: usize,
    pub max_len: usize,
    /// Settings the multipliers were computed with.
    pub power: PowerOptions,
    pub by_len: Vec<Vec<OrbitScalars>>,
}

impl OrbitTable {
    pub fn classes(&self, n: usize) -> &[OrbitScalars] {
        &self.by_len[n - 1]
    }

    pub fn iter(&self) -> impl Iterator<Item = &OrbitScalars> {
        self.by_len.iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.by_len.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn build_orbit_table(config: &GroupConfig, max_len: usize) -> Result<OrbitTable> {
    build_orbit_table_with(config, max_len, &PowerOptions::default())
}

pub fn build_orbit_table_with(config: &GroupConfig, max_len: usize, power: &PowerOptions) -> Result<OrbitTable> {
    if max_len == 0 {
        return Err(Error::InvalidArgument("truncation order must be at least 1".into()));
    }
    let generators = config.boundary_maps()?;
    let alphabet = config.num_generators();
    let symmetries = config.symbol_symmetries();
    let by_len = (1..=max_len)
        .map(|n| {
            let classes: Vec<OrbitClass> = enumerate_orbit_classes(alphabet, n);
            let mut scalars = classes
                .par_iter()
                .map(|class| multiplier_with(&class.representative, &generators, power))
                .collect::<Result<Vec<_>>>()?;
            share_symmetric_weights(&mut scalars, &symmetries);
            Ok(scalars)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OrbitTable { fingerprint: config.fingerprint(), num_generators: alphabet, max_len, power: *power, by_len })
}

/// Gives every class the multiplier of the least class in its symmetry orbit
/// (image under relabelling or reversal), so that equal weights are equal
/// bit for bit. Values that disagree beyond rounding are left alone.
fn share_symmetric_weights(scalars: &mut [OrbitScalars], symmetries: &[Vec<u8>]) {
    let leaders: Vec<usize> = scalars
        .par_iter()
        .enumerate()
        .map(|(i, o)| {
            let key = o.word.symmetry_canonical(symmetries);
            scalars.binary_search_by(|p| p.word.cmp(&key)).unwrap_or(i)
        })
        .collect();
    for (i, leader) in leaders.into_iter().enumerate() {
        let (u, m) = (scalars[leader].u, scalars[leader].m);
        if (scalars[i].u - u).abs() <= 1e-9 * u.abs() {
            scalars[i].u = u;
            scalars[i].m = m;
        }
    }
}
