//! Finite power series (polynomials / truncated Taylor expansions) and
//! trigonometric polynomials, together with the coefficient operations the
//! rest of the crate is built on: partial sums, the Taylor backward shift
//! and its iterate identity, Cesàro means, max-modulus and growth-weighted
//! norms, and coefficient growth diagnostics.
//!
//! Everything here is exact coefficient arithmetic in `f64`; no quadrature.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CoreError, Result};

/// A finite complex coefficient sequence `a_0..a_d` representing a polynomial
/// or a truncated Taylor series.
///
/// Invariants: the coefficient vector is never empty, and the trailing
/// coefficient is nonzero unless the series is the single entry `[0]`.
/// Trimming removes exact zeros only; no epsilon threshold is applied, so a
/// degree never changes silently.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<Complex64>,
}

impl PowerSeries {
    /// Builds a series from raw coefficients, trimming exact trailing zeros.
    /// An empty input yields the zero series.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&Complex64::ZERO) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::ZERO);
        }
        PowerSeries { coeffs }
    }

    pub fn zero() -> Self {
        PowerSeries::new(vec![])
    }

    pub fn constant(c: Complex64) -> Self {
        PowerSeries::new(vec![c])
    }

    /// The monomial `c·z^k`.
    pub fn monomial(c: Complex64, k: usize) -> Self {
        let mut coeffs = vec![Complex64::ZERO; k + 1];
        coeffs[k] = c;
        PowerSeries::new(coeffs)
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        PowerSeries::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Geometric-type truncation Σ_{ν≤d} q^ν z^ν of 1/(1−qz).
    pub fn geometric(q: Complex64, degree: usize) -> Self {
        let mut coeffs = Vec::with_capacity(degree + 1);
        let mut c = Complex64::ONE;
        for _ in 0..=degree {
            coeffs.push(c);
            c *= q;
        }
        PowerSeries::new(coeffs)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(Complex64::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == Complex64::ZERO
    }

    /// Horner evaluation; summation order is fixed by the scheme, so results
    /// are reproducible across runs and parallel callers.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Evaluates the tail quotient Σ_{ν>n} a_ν z^{ν−n−1}, i.e. the exact
    /// algebraic form of `(f − s_n f)(z) / z^{n+1}`. Dividing the evaluated
    /// difference by `z^{n+1}` instead would lose all significance for small
    /// `|z|`; the factored form stays stable on the full annulus.
    pub fn tail_quotient(&self, n: usize, z: Complex64) -> Complex64 {
        if n >= self.degree() {
            return Complex64::ZERO;
        }
        let mut acc = Complex64::ZERO;
        for &c in self.coeffs[n + 1..].iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// s_n f: truncation to degree min(n, deg f).
    pub fn partial_sum(&self, n: usize) -> PowerSeries {
        if n >= self.degree() {
            return self.clone();
        }
        PowerSeries::new(self.coeffs[..=n].to_vec())
    }

    /// The Taylor backward shift T: a_{ν+1} becomes a_ν. Constants map to
    /// the zero series.
    pub fn backward_shift(&self) -> PowerSeries {
        if self.coeffs.len() == 1 {
            return PowerSeries::zero();
        }
        PowerSeries::new(self.coeffs[1..].to_vec())
    }

    /// T^n in one step.
    pub fn backward_shift_iterate(&self, n: usize) -> PowerSeries {
        if n == 0 {
            return self.clone();
        }
        if n > self.degree() {
            return PowerSeries::zero();
        }
        PowerSeries::new(self.coeffs[n..].to_vec())
    }

    /// Multiplication by z^k (the forward shift S = multiplication by z,
    /// iterated k times).
    pub fn shift_up(&self, k: usize) -> PowerSeries {
        if self.is_zero() {
            return PowerSeries::zero();
        }
        let mut coeffs = vec![Complex64::ZERO; k];
        coeffs.extend_from_slice(&self.coeffs);
        PowerSeries::new(coeffs)
    }

    pub fn add(&self, other: &PowerSeries) -> PowerSeries {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            coeffs.push(self.coeff(k) + other.coeff(k));
        }
        PowerSeries::new(coeffs)
    }

    pub fn sub(&self, other: &PowerSeries) -> PowerSeries {
        self.add(&other.scale(-Complex64::ONE))
    }

    pub fn scale(&self, c: Complex64) -> PowerSeries {
        PowerSeries::new(self.coeffs.iter().map(|&a| c * a).collect())
    }

    pub fn mul(&self, other: &PowerSeries) -> PowerSeries {
        if self.is_zero() || other.is_zero() {
            return PowerSeries::zero();
        }
        let mut coeffs = vec![Complex64::ZERO; self.degree() + other.degree() + 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        PowerSeries::new(coeffs)
    }

    /// Max of |f| over the grid; rejects grids containing the origin.
    pub fn max_abs_on(&self, grid: &[Complex64]) -> f64 {
        grid.iter().map(|&z| self.eval(z).norm()).fold(0.0, f64::max)
    }
}

/// Max over the grid of |T^{n+1}f(z) − (f(z) − s_n f(z))/z^{n+1}|, the
/// residual of the shift iterate identity. The right-hand side is evaluated
/// in the factored tail form (see [`PowerSeries::tail_quotient`]); the
/// left-hand side by iterating the shift coefficientwise.
pub fn shift_iterate_residual(f: &PowerSeries, n: usize, grid: &[Complex64]) -> Result<f64> {
    if let Some(z) = grid.iter().find(|z| z.norm() == 0.0) {
        return Err(CoreError::ZeroGridPoint { z: *z });
    }
    let shifted = f.backward_shift_iterate(n + 1);
    let mut worst = 0.0f64;
    for &z in grid {
        let lhs = shifted.eval(z);
        let rhs = f.tail_quotient(n, z);
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

/// Cesàro mean (1/(n+1)) Σ_{k=0}^{n} s_k f(z), computed through the weighted
/// closed form Σ_ν a_ν z^ν (n+1−ν)/(n+1); tests cross-check it against
/// direct summation of partial sums.
pub fn cesaro_mean(f: &PowerSeries, n: usize, z: Complex64) -> Complex64 {
    let top = n.min(f.degree());
    let denom = (n + 1) as f64;
    let mut acc = Complex64::ZERO;
    let mut zpow = Complex64::ONE;
    for nu in 0..=top {
        let weight = (n + 1 - nu) as f64 / denom;
        acc += f.coeff(nu) * zpow * weight;
        zpow *= z;
    }
    acc
}

/// The same Cesàro functional as a coefficient-space row vector, used when a
/// Cesàro value has to enter a least-squares system as a linear constraint.
pub fn cesaro_row(n: usize, z: Complex64, degree: usize) -> Vec<Complex64> {
    let denom = (n + 1) as f64;
    let mut row = Vec::with_capacity(degree + 1);
    let mut zpow = Complex64::ONE;
    for nu in 0..=degree {
        let weight = if nu <= n { (n + 1 - nu) as f64 / denom } else { 0.0 };
        row.push(zpow * weight);
        zpow *= z;
    }
    row
}

/// M(r, f) = max_{|z| ≤ r} |f(z)|, sampled on the circle |z| = r (the
/// maximum principle makes boundary sampling sufficient). Starts at
/// 8·(deg+1) equispaced angles and doubles until the relative change drops
/// below 1e-9.
pub fn max_modulus(f: &PowerSeries, r: f64) -> f64 {
    assert!(r >= 0.0, "radius must be nonnegative");
    if r == 0.0 {
        return f.coeff(0).norm();
    }
    let mut m = 8 * (f.degree() + 1);
    let mut best = max_on_circle(f, r, m);
    loop {
        m *= 2;
        let next = max_on_circle(f, r, m);
        let change = (next - best).abs() / next.max(f64::MIN_POSITIVE);
        best = best.max(next);
        if change < 1e-9 || m > 1 << 22 {
            return best;
        }
    }
}

fn max_on_circle(f: &PowerSeries, r: f64, m: usize) -> f64 {
    let mut best = 0.0f64;
    for k in 0..m {
        let theta = 2.0 * std::f64::consts::PI * (k as f64) / (m as f64);
        let z = Complex64::from_polar(r, theta);
        best = best.max(f.eval(z).norm());
    }
    best
}

/// ‖f‖_{B_s} = max_{0 ≤ r < 1} M(r, f)(1−r)^s, maximized over an r-grid that
/// is refined (density doubled) until the value is stable to 1e-9 relative.
pub fn b_s_norm(f: &PowerSeries, s: f64) -> f64 {
    assert!(s > 0.0, "B_s exponent must be positive");
    let mut k = 64usize;
    let mut best = b_s_on_grid(f, s, k);
    loop {
        k *= 2;
        let next = b_s_on_grid(f, s, k);
        let change = (next - best).abs() / next.max(f64::MIN_POSITIVE);
        best = best.max(next);
        if change < 1e-9 || k > 1 << 16 {
            return best;
        }
    }
}

fn b_s_on_grid(f: &PowerSeries, s: f64, k: usize) -> f64 {
    let mut best = 0.0f64;
    for i in 0..k {
        let r = i as f64 / k as f64;
        let value = max_modulus(f, r) * (1.0 - r).powf(s);
        best = best.max(value);
    }
    best
}

/// Ratios |a_n| / n^{1/p} for n = 1..deg; a diagnostic sequence, no
/// convergence claim is attached for finite data.
pub fn coeff_growth_profile(f: &PowerSeries, p: f64) -> Vec<f64> {
    assert!(p >= 1.0, "growth exponent requires p >= 1");
    (1..=f.degree())
        .map(|n| f.coeff(n).norm() / (n as f64).powf(1.0 / p))
        .collect()
}

impl Serialize for PowerSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.coeffs.iter().map(|c| [c.re, c.im]).collect();
        pairs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PowerSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let pairs: Vec<[f64; 2]> = Vec::deserialize(deserializer)?;
        if pairs.is_empty() {
            return Err(D::Error::custom("power series needs at least one coefficient"));
        }
        Ok(PowerSeries::new(
            pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect(),
        ))
    }
}

/// A trigonometric polynomial Σ_{ν=min_index}^{max} a_ν z^ν on the unit
/// circle; negative indices allowed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPolynomial {
    pub min_index: i64,
    #[serde(with = "complex_pairs")]
    pub coeffs: Vec<Complex64>,
}

impl TrigPolynomial {
    pub fn new(min_index: i64, coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "trig polynomial needs at least one coefficient");
        TrigPolynomial { min_index, coeffs }
    }

    /// Symmetric coefficient window a_{−d}..a_{d}.
    pub fn symmetric(coeffs: Vec<Complex64>) -> Self {
        assert!(coeffs.len() % 2 == 1, "symmetric window needs odd length");
        let d = (coeffs.len() / 2) as i64;
        TrigPolynomial::new(-d, coeffs)
    }

    pub fn max_index(&self) -> i64 {
        self.min_index + self.coeffs.len() as i64 - 1
    }

    pub fn coeff(&self, nu: i64) -> Complex64 {
        if nu < self.min_index || nu > self.max_index() {
            return Complex64::ZERO;
        }
        self.coeffs[(nu - self.min_index) as usize]
    }

    /// Evaluation for z ≠ 0 (on the circle in practice): Horner on the
    /// shifted polynomial times z^{min_index}.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc * z.powi(self.min_index as i32)
    }

    /// Symmetric partial sum s_n = Σ_{|ν| ≤ n} a_ν z^ν.
    pub fn partial_sum(&self, n: i64, z: Complex64) -> Complex64 {
        let mut acc = Complex64::ZERO;
        for nu in -n..=n {
            acc += self.coeff(nu) * z.powi(nu as i32);
        }
        acc
    }

    /// Cesàro mean of the symmetric partial sums at z.
    pub fn cesaro_mean(&self, n: i64, z: Complex64) -> Complex64 {
        let mut acc = Complex64::ZERO;
        for k in 0..=n {
            acc += self.partial_sum(k, z);
        }
        acc / Complex64::new((n + 1) as f64, 0.0)
    }

    /// Lossless conversion when no negative-index coefficient is present.
    pub fn to_power_series(&self) -> Option<PowerSeries> {
        if self.min_index < 0 {
            let has_negative = self.coeffs[..(-self.min_index as usize).min(self.coeffs.len())]
                .iter()
                .any(|c| *c != Complex64::ZERO);
            if has_negative {
                return None;
            }
        }
        let mut coeffs = vec![Complex64::ZERO; (self.max_index().max(0) + 1) as usize];
        for (i, c) in coeffs.iter_mut().enumerate() {
            *c = self.coeff(i as i64);
        }
        Some(PowerSeries::new(coeffs))
    }
}

impl From<&PowerSeries> for TrigPolynomial {
    fn from(f: &PowerSeries) -> Self {
        TrigPolynomial::new(0, f.coeffs().to_vec())
    }
}

mod complex_pairs {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(
        coeffs: &[Complex64],
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = coeffs.iter().map(|c| [c.re, c.im]).collect();
        pairs.serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Vec<Complex64>, D::Error> {
        let pairs: Vec<[f64; 2]> = Vec::deserialize(deserializer)?;
        Ok(pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn partial_sum_truncates() {
        let f = PowerSeries::from_real(&[1.0, 2.0, 3.0]);
        assert_eq!(f.partial_sum(1), PowerSeries::from_real(&[1.0, 2.0]));
        assert_eq!(f.partial_sum(7), f);
    }

    #[test]
    fn partial_sum_alternating() {
        let f = PowerSeries::from_real(&[1.0, 1.0, 1.0, 1.0]);
        let v = f.partial_sum(3).eval(c(-1.0, 0.0));
        assert_eq!(v, Complex64::ZERO);
    }

    #[test]
    fn partial_sum_composes_to_min() {
        let f = PowerSeries::from_real(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        for m in 0..8 {
            for n in 0..8 {
                assert_eq!(f.partial_sum(n).partial_sum(m), f.partial_sum(m.min(n)));
            }
        }
    }

    #[test]
    fn backward_shift_drops_constant() {
        let f = PowerSeries::from_real(&[1.0, 2.0, 3.0]);
        assert_eq!(f.backward_shift(), PowerSeries::from_real(&[2.0, 3.0]));
        let constant = PowerSeries::from_real(&[5.0]);
        assert!(constant.backward_shift().is_zero());
    }

    #[test]
    fn backward_shift_on_truncated_eigenfunction() {
        // Truncated γ_α has T(γ_α) = α·γ_α on the surviving coefficients.
        let alpha = c(0.3, 0.4);
        let gamma = PowerSeries::geometric(alpha, 12);
        let shifted = gamma.backward_shift();
        let scaled = gamma.partial_sum(11).scale(alpha);
        for k in 0..=11 {
            assert!((shifted.coeff(k) - scaled.coeff(k)).norm() == 0.0);
        }
    }

    #[test]
    fn shift_vanishes_past_degree() {
        let f = PowerSeries::from_real(&[1.0, 2.0, 3.0]);
        assert!(f.backward_shift_iterate(3).is_zero());
        assert!(f.backward_shift_iterate(10).is_zero());
    }

    #[test]
    fn shift_iterate_identity_residual_small() {
        let f = PowerSeries::geometric(c(0.5, 0.0), 40);
        let grid: Vec<Complex64> = (0..32)
            .map(|k| Complex64::from_polar(1.5, 2.0 * std::f64::consts::PI * k as f64 / 32.0))
            .collect();
        let res = shift_iterate_residual(&f, 10, &grid).unwrap();
        let scale = 1.0 + f.max_abs_on(&grid);
        assert!(res <= 1e-10 * scale, "residual {res} too large");
    }

    #[test]
    fn shift_iterate_identity_past_degree_is_exact() {
        let f = PowerSeries::from_real(&[1.0, -2.0, 0.5]);
        let grid = vec![c(0.3, 0.1), c(-1.2, 0.4)];
        let res = shift_iterate_residual(&f, 5, &grid).unwrap();
        assert_eq!(res, 0.0);
    }

    #[test]
    fn shift_iterate_rejects_zero_grid_point() {
        let f = PowerSeries::from_real(&[1.0]);
        let err = shift_iterate_residual(&f, 0, &[Complex64::ZERO]);
        assert!(matches!(err, Err(CoreError::ZeroGridPoint { .. })));
    }

    #[test]
    fn cesaro_grandi_is_half() {
        // Grandi series coefficients: all ones, evaluated at z = −1.
        let f = PowerSeries::from_real(&vec![1.0; 2101]);
        let v = cesaro_mean(&f, 2000, c(-1.0, 0.0));
        assert!((v - c(0.5, 0.0)).norm() < 1e-3, "got {v}");
    }

    #[test]
    fn cesaro_matches_direct_summation() {
        // Independent oracle: sum the partial sums one by one.
        let f = PowerSeries::new(
            (0..=9)
                .map(|k| c(0.3 * (k as f64).sin(), 0.2 * (k as f64).cos()))
                .collect(),
        );
        let z = c(-0.9, 0.35);
        for n in [0usize, 1, 3, 9, 25] {
            let direct: Complex64 = (0..=n)
                .map(|k| f.partial_sum(k).eval(z))
                .sum::<Complex64>()
                / c((n + 1) as f64, 0.0);
            let fast = cesaro_mean(&f, n, z);
            assert!((direct - fast).norm() < 1e-12 * (1.0 + direct.norm()));
        }
    }

    #[test]
    fn cesaro_constant_and_n0() {
        let f = PowerSeries::new(vec![c(2.0, -1.0)]);
        assert_eq!(cesaro_mean(&f, 17, c(0.4, 0.2)), c(2.0, -1.0));
        let g = PowerSeries::from_real(&[3.0, 7.0, 9.0]);
        assert_eq!(cesaro_mean(&g, 0, c(0.5, 0.5)), c(3.0, 0.0));
    }

    #[test]
    fn max_modulus_monomial() {
        let f = PowerSeries::monomial(Complex64::ONE, 5);
        for r in [0.1, 0.5, 0.9] {
            assert!((max_modulus(&f, r) - r.powi(5)).abs() < 1e-9);
        }
    }

    #[test]
    fn max_modulus_monotone_in_radius() {
        let f = PowerSeries::new(vec![c(0.3, 0.1), c(-1.0, 0.2), c(0.0, 0.9), c(0.4, -0.7)]);
        let m1 = max_modulus(&f, 0.4);
        let m2 = max_modulus(&f, 0.8);
        assert!(m1 <= m2 + 1e-12);
    }

    #[test]
    fn b_s_norm_of_one() {
        let f = PowerSeries::constant(Complex64::ONE);
        assert!((b_s_norm(&f, 0.5) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn growth_profile_exact_law() {
        let p = 2.0;
        let coeffs: Vec<Complex64> = (0..=20)
            .map(|n| c(if n == 0 { 1.0 } else { (n as f64).powf(1.0 / p) }, 0.0))
            .collect();
        let f = PowerSeries::new(coeffs);
        for ratio in coeff_growth_profile(&f, p) {
            assert!((ratio - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn growth_profile_ones_decreases() {
        let f = PowerSeries::from_real(&vec![1.0; 30]);
        let profile = coeff_growth_profile(&f, 2.0);
        for w in profile.windows(2) {
            assert!(w[1] < w[0]);
        }
    }

    #[test]
    fn trig_conversion_round_trip() {
        let t = TrigPolynomial::new(-2, vec![Complex64::ZERO, Complex64::ZERO, c(1.0, 0.0), c(0.0, 2.0)]);
        let p = t.to_power_series().expect("no negative coefficients");
        assert_eq!(p, PowerSeries::new(vec![c(1.0, 0.0), c(0.0, 2.0)]));
        let blocked = TrigPolynomial::new(-1, vec![c(1.0, 0.0), c(2.0, 0.0)]);
        assert!(blocked.to_power_series().is_none());
    }

    #[test]
    fn trig_eval_matches_sum() {
        let t = TrigPolynomial::symmetric(vec![c(0.5, 0.0), c(1.0, 1.0), c(0.0, -2.0)]);
        let z = Complex64::from_polar(1.0, 0.7);
        let direct = t.coeff(-1) * z.powi(-1) + t.coeff(0) + t.coeff(1) * z;
        assert!((t.eval(z) - direct).norm() < 1e-14);
    }

    #[test]
    fn series_json_round_trip() {
        let f = PowerSeries::new(vec![c(1.0, -2.0), c(0.0, 3.5)]);
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(text, "[[1.0,-2.0],[0.0,3.5]]");
        let back: PowerSeries = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn trailing_zero_trim_is_exact_only() {
        let f = PowerSeries::new(vec![c(1.0, 0.0), c(1e-300, 0.0)]);
        assert_eq!(f.degree(), 1, "tiny but nonzero coefficients survive");
        let g = PowerSeries::new(vec![c(1.0, 0.0), Complex64::ZERO]);
        assert_eq!(g.degree(), 0);
    }
}
