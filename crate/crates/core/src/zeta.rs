//! Truncated cycle expansion of the zeta function.
//!
//! With `a_n(s) = (1/n) Σ_{|γ|=n} |φ′_γ|^s / (1 − φ′_γ)²` the truncation `Z_M`
//! is the part of `exp(−Σ a_n tⁿ)` of total degree at most `M`, read at
//! `t = 1`. It is evaluated through the partial-product recursion
//!
//! ```text
//! B_{0,0} = 1,   B_{N,r} = −(1/r) Σ_{n=1}^{N−r+1} B_{N−n,r−1} a_n,
//! Z_M = 1 + Σ_{N=1}^{M} Σ_{r=1}^{N} B_{N,r},
//! ```
//!
//! so `B_{N,1} = −a_N`. The derivative follows by the product rule.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dd::{CDd, Dd};
use crate::error::{Error, Result};
use crate::orbits::OrbitTable;

/// Largest truncation order accepted by [`ZetaSeries`].
pub const MAX_ORDER: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// All periodic orbits.
    Conformal,
    /// Even-length orbits only with doubled coefficients: closed geodesics
    /// on the quotient by the orientation-preserving subgroup.
    Selberg,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "conformal" => Ok(Mode::Conformal),
            "selberg" => Ok(Mode::Selberg),
            other => Err(Error::InvalidArgument(format!("unknown mode {other:?}"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Conformal => "conformal",
            Mode::Selberg => "selberg",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaValue {
    pub s: Complex64,
    pub z: Complex64,
    pub dz: Complex64,
}

impl ZetaValue {
    pub fn log_derivative(&self) -> Complex64 {
        self.dz / self.z
    }
}

/// One `(u, c)` pair: the term `c·e^{s u}` of some `a_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Term {
    u: f64,
    coef: f64,
}

#[derive(Debug, Clone)]
pub struct ZetaSeries {
    table: Arc<OrbitTable>,
    order: usize,
    mode: Mode,
    terms: Vec<Vec<Term>>,
}

impl ZetaSeries {
    pub fn new(table: Arc<OrbitTable>, order: usize, mode: Mode) -> Result<Self> {
        if order == 0 || order > table.max_len || order > MAX_ORDER {
            return Err(Error::InvalidArgument(format!("order {order} outside 1..={}", table.max_len.min(MAX_ORDER))));
        }
        let terms = (1..=order)
            .map(|n| {
                let scale = match mode {
                    Mode::Conformal => 1.0,
                    Mode::Selberg if n % 2 == 0 => 2.0,
                    Mode::Selberg => return Vec::new(),
                };
                let mut terms: Vec<Term> = table
                    .classes(n)
                    .iter()
                    .map(|o| {
                        let denom = (1.0 - o.m) * (1.0 - o.m);
                        Term { u: o.u, coef: scale * o.multiplicity as f64 / (n as f64 * denom) }
                    })
                    .collect();
                merge_equal_exponents(&mut terms);
                terms
            })
            .collect();
        Ok(Self { table, order, mode, terms })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn table(&self) -> &Arc<OrbitTable> {
        &self.table
    }

    /// Same table, different truncation.
    pub fn with_order(&self, order: usize) -> Result<Self> {
        ZetaSeries::new(self.table.clone(), order, self.mode)
    }

    pub fn a_n(&self, n: usize, s: Complex64) -> Complex64 {
        self.a_n_with_derivative(n, s).0
    }

    /// `(a_n(s), a_n′(s))`.
    pub fn a_n_with_derivative(&self, n: usize, s: Complex64) -> (Complex64, Complex64) {
        let (value, deriv) = self.a_n_dd(n, s);
        (value.to_c64(), deriv.to_c64())
    }

    /// Sums in double-double: once `Re s < 0` the terms exceed their sum by
    /// many orders of magnitude.
    pub(crate) fn a_n_dd(&self, n: usize, s: Complex64) -> (CDd, CDd) {
        assert!((1..=self.order).contains(&n), "n = {n} outside 1..={}", self.order);
        let mut value = CDd::ZERO;
        let mut deriv = CDd::ZERO;
        for t in &self.terms[n - 1] {
            let w = exp_scaled(s, t.u) * t.coef;
            value = value.add_c64(w);
            deriv = deriv.add_c64(w * t.u);
        }
        (value, deriv)
    }

    pub fn evaluate(&self, s: Complex64) -> ZetaValue {
        *self.evaluate_orders(s).last().expect("order >= 1")
    }

    /// `[Z_0, Z_1, …, Z_M]` at `s`, sharing one pass of the recursion.
    pub fn evaluate_orders(&self, s: Complex64) -> Vec<ZetaValue> {
        let (z, dz, _) = self.recursion(s);
        z.iter().zip(&dz).map(|(z, dz)| ZetaValue { s, z: z.to_c64(), dz: dz.to_c64() }).collect()
    }

    /// Graded pieces `Σ_r B_{N,r}(s)` for `N = 1..=M`, i.e. `Z_N − Z_{N−1}`
    /// before rounding.
    pub fn graded_terms(&self, s: Complex64) -> Vec<Complex64> {
        self.recursion(s).2.into_iter().map(CDd::to_c64).collect()
    }

    /// Partial sums of `Z`, `Z′` (orders `0..=M`) and the graded pieces.
    /// The combination runs in double-double: the `B_{N,r}` cancel by several
    /// orders of magnitude once `Re s < 0`.
    fn recursion(&self, s: Complex64) -> (Vec<CDd>, Vec<CDd>, Vec<CDd>) {
        let m = self.order;
        let coeffs: Vec<(CDd, CDd)> =
            std::iter::once((CDd::ZERO, CDd::ZERO)).chain((1..=m).map(|n| self.a_n_dd(n, s))).collect();

        // b[N][r], db[N][r] for 0 <= r <= N <= M
        let mut b = vec![vec![CDd::ZERO; m + 1]; m + 1];
        let mut db = vec![vec![CDd::ZERO; m + 1]; m + 1];
        b[0][0] = CDd::ONE;

        let mut zs = Vec::with_capacity(m + 1);
        let mut dzs = Vec::with_capacity(m + 1);
        let mut graded = Vec::with_capacity(m);
        let mut z = CDd::ONE;
        let mut dz = CDd::ZERO;
        zs.push(z);
        dzs.push(dz);
        for total in 1..=m {
            let mut piece = CDd::ZERO;
            for r in 1..=total {
                let mut acc = CDd::ZERO;
                let mut dacc = CDd::ZERO;
                for n in 1..=total + 1 - r {
                    let (a, da) = coeffs[n];
                    let prev = b[total - n][r - 1];
                    // a₁ = 0 without length-one orbits and odd a_n = 0 in
                    // Selberg mode, so most products vanish
                    if a.is_zero() && da.is_zero() || prev.is_zero() && db[total - n][r - 1].is_zero() {
                        continue;
                    }
                    acc += prev * a;
                    dacc += db[total - n][r - 1] * a + prev * da;
                }
                let inv = -Dd::recip(r as f64);
                b[total][r] = acc.scale(inv);
                db[total][r] = dacc.scale(inv);
                piece += b[total][r];
                dz += db[total][r];
            }
            z += piece;
            graded.push(piece);
            zs.push(z);
            dzs.push(dz);
        }
        (zs, dzs, graded)
    }
}

/// `e^{s·u}` with the rounding error of the product `s·u` carried to first
/// order; at large `|Im s|` that error would otherwise shift the phase.
#[inline]
fn exp_scaled(s: Complex64, u: f64) -> Complex64 {
    let x = s.re * u;
    let dx = s.re.mul_add(u, -x);
    let y = s.im * u;
    let dy = s.im.mul_add(u, -y);
    let magnitude = x.exp() * (1.0 + dx);
    let (sin, cos) = y.sin_cos();
    Complex64::new(magnitude * (cos - dy * sin), magnitude * (sin + dy * cos))
}

/// Collapses terms with bit-identical `u` (symmetric orbits) into one.
fn merge_equal_exponents(terms: &mut Vec<Term>) {
    terms.sort_by(|a, b| a.u.total_cmp(&b.u));
    terms.dedup_by(|next, kept| {
        if next.u.to_bits() == kept.u.to_bits() {
            kept.coef += next.coef;
            true
        } else {
            false
        }
    });
}

/// Modified relative error between `R_{M₁} = Z′_{M₁}/Z_{M₁}` and `R_{M₂}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorMetric {
    pub value: f64,
    pub orders: (usize, usize),
    pub r1: Complex64,
    pub r2: Complex64,
}

pub fn error_metric(series: &ZetaSeries, s: Complex64, m1: usize, m2: usize) -> Result<ErrorMetric> {
    let top = m1.max(m2);
    if m1 == 0 || top > series.order() {
        return Err(Error::InvalidArgument(format!("orders ({m1}, {m2}) outside 1..={}", series.order())));
    }
    let values = series.evaluate_orders(s);
    let ratio = |order: usize| {
        let v = values[order];
        if v.z.norm() == 0.0 || !v.z.is_finite() {
            return Err(Error::ZeroDenominator { re: s.re, im: s.im, order });
        }
        Ok(v.log_derivative())
    };
    let (r1, r2) = (ratio(m1)?, ratio(m2)?);
    let value = (r1 - r2).norm() / (1.0 + r1.norm() + r2.norm());
    Ok(ErrorMetric { value, orders: (m1, m2), r1, r2 })
}

/// Independent evaluation paths used to cross-check [`ZetaSeries::evaluate`].
pub mod oracle {
    use super::*;

    /// Product of the truncated power series `exp(−a_n tⁿ)`, `n = 1..=M`,
    /// truncated at degree `M` and summed at `t = 1`.
    pub fn evaluate_exp_oracle(series: &ZetaSeries, s: Complex64) -> Complex64 {
        let m = series.order();
        let mut poly = vec![CDd::ZERO; m + 1];
        poly[0] = CDd::ONE;
        for n in 1..=m {
            let neg_a = -series.a_n_dd(n, s).0;
            // factor = Σ_k (−a)^k / k! t^{nk}
            let mut factor = vec![CDd::ZERO; m + 1];
            let mut term = CDd::ONE;
            let mut k = 0;
            while n * k <= m {
                factor[n * k] = term;
                k += 1;
                term = (term * neg_a).scale(Dd::recip(k as f64));
            }
            let mut next = vec![CDd::ZERO; m + 1];
            for (i, p) in poly.iter().enumerate() {
                for (j, f) in factor.iter().enumerate().take(m + 1 - i) {
                    if j % n == 0 {
                        next[i + j] += *p * *f;
                    }
                }
            }
            poly = next;
        }
        poly.into_iter().fold(CDd::ZERO, |acc, c| acc + c).to_c64()
    }

    /// A primitive periodic orbit: symbolic length and signed multiplier.
    #[derive(Debug, Clone, Copy)]
    struct Primitive {
        len: usize,
        u: f64,
        m: f64,
    }

    /// Sum over sets of distinct primitive classes `{[γ₁], …, [γ_r]}` with
    /// total length `≤ M`, each class carrying the coefficients of its
    /// Euler factor `Π_{j≥0} (1 − |φ′|^s φ′^j t)^{j+1}`. Restricted to first
    /// powers this is `1 + Σ (−1)^r Π |φ′|^s/(1 − φ′)²`.
    ///
    /// In Selberg mode the primitive classes are those of the orientation-
    /// preserving subgroup: every even primitive class counts twice and the
    /// square of every odd primitive class counts once.
    pub fn evaluate_pr_oracle(series: &ZetaSeries, s: Complex64, max_len: usize) -> Result<Complex64> {
        if max_len == 0 || max_len > series.order() || max_len > 8 {
            return Err(Error::InvalidArgument(format!("oracle order {max_len} outside 1..=min(8, M)")));
        }
        let mut primitives = Vec::new();
        for o in series.table().iter().filter(|o| o.primitive_period == o.len()) {
            let p = Primitive { len: o.len(), u: o.u, m: o.m };
            match series.mode() {
                Mode::Conformal => primitives.push(p),
                Mode::Selberg if p.len.is_multiple_of(2) => {
                    primitives.push(p);
                    primitives.push(p);
                }
                Mode::Selberg => primitives.push(Primitive { len: 2 * p.len, u: 2.0 * p.u, m: p.m * p.m }),
            }
        }
        primitives.retain(|p| p.len <= max_len);

        let factors: Vec<(usize, Vec<Complex64>)> =
            primitives.iter().map(|p| (p.len, euler_factor(p, s, max_len / p.len))).collect();

        let mut total = Complex64::new(1.0, 0.0);
        accumulate(&factors, 0, max_len, Complex64::new(1.0, 0.0), &mut total);
        Ok(total)
    }

    /// Adds every product over subsets of `factors[start..]` that fits in `budget`.
    fn accumulate(
        factors: &[(usize, Vec<Complex64>)],
        start: usize,
        budget: usize,
        product: Complex64,
        total: &mut Complex64,
    ) {
        for (idx, (len, coeffs)) in factors.iter().enumerate().skip(start) {
            for (power, c) in coeffs.iter().enumerate().skip(1) {
                let used = power * len;
                if used > budget {
                    break;
                }
                let next = product * c;
                *total += next;
                accumulate(factors, idx + 1, budget - used, next, total);
            }
        }
    }

    /// Coefficients of `Π_{j≥0} (1 − x_j t)^{j+1}` up to `t^degree`,
    /// `x_j = e^{s u} m^j`, multiplying one linear factor at a time.
    fn euler_factor(p: &Primitive, s: Complex64, degree: usize) -> Vec<Complex64> {
        let mut poly = vec![Complex64::new(0.0, 0.0); degree + 1];
        poly[0] = Complex64::new(1.0, 0.0);
        let base = (s * p.u).exp();
        let mut mj = 1.0f64;
        for j in 0..100_000usize {
            let x = base * mj;
            for _ in 0..=j {
                for k in (1..=degree).rev() {
                    let lower = poly[k - 1];
                    poly[k] -= x * lower;
                }
            }
            mj *= p.m;
            if (j + 2) as f64 * mj.abs() < 1e-18 {
                break;
            }
        }
        poly
    }
}
