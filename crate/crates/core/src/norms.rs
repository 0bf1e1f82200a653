//! All norms used by the laboratory: Bergman norms over general domains
//! (area measure λ₂), the normalized Bergman norm on the unit disk (measure
//! m₂), Hardy/L^p circle norms, sup norms on compact circle sets and the
//! growth-weighted B_s norm. Every quadrature-backed value reports its
//! estimated error and cell count.
//!
//! Two measure conventions coexist on purpose: A^p(Ω) integrates against
//! plain Lebesgue area, while A^p on the unit disk is normalized to total
//! mass one. Reports always say which was used.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::area::{area_integral, AreaConfig};
use crate::circle::CompactCircleSet;
use crate::domain::Domain;
use crate::error::{CoreError, Result};
use crate::quad::{gauss_legendre, refine_circle_mean};
use crate::series::{b_s_norm, PowerSeries, TrigPolynomial};

#[derive(Debug, Clone, PartialEq)]
pub enum NormKind {
    /// A^p(Ω) against unnormalized λ₂.
    Ap { domain: Domain, p: f64 },
    /// A^p on the unit disk against normalized m₂.
    ApDiskNormalized { p: f64 },
    /// L^p(𝕋) against normalized arc length.
    LpCircle { p: f64 },
    /// H^p; for polynomials the circle integral at r = 1.
    Hp { p: f64 },
    /// sup over a compact subset of 𝕋.
    SupOnSet(CompactCircleSet),
    /// max_r M(r,f)(1−r)^s.
    Bs { s: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormSpec {
    pub kind: NormKind,
    pub tol: f64,
}

impl NormSpec {
    pub fn new(kind: NormKind) -> Self {
        NormSpec { kind, tol: 1e-8 }
    }

    pub fn with_tol(kind: NormKind, tol: f64) -> Result<Self> {
        if tol <= 0.0 {
            return Err(CoreError::InvalidSpec("norm tolerance must be positive".into()));
        }
        Ok(NormSpec { kind, tol })
    }

    pub fn validate(&self) -> Result<()> {
        let p = match &self.kind {
            NormKind::Ap { p, .. } | NormKind::ApDiskNormalized { p } | NormKind::LpCircle { p } | NormKind::Hp { p } => *p,
            NormKind::Bs { s } => {
                if *s <= 0.0 {
                    return Err(CoreError::InvalidSpec("B_s needs s > 0".into()));
                }
                return Ok(());
            }
            NormKind::SupOnSet(set) => {
                if set.is_empty() {
                    return Err(CoreError::EmptySet);
                }
                return Ok(());
            }
        };
        if p < 1.0 {
            return Err(CoreError::InvalidSpec(format!("norm order p = {p} must be >= 1")));
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        match &self.kind {
            NormKind::Ap { p, .. } => format!("Ap(domain,p={p})[lambda2]"),
            NormKind::ApDiskNormalized { p } => format!("Ap(disk,p={p})[m2]"),
            NormKind::LpCircle { p } => format!("Lp(circle,p={p})[m]"),
            NormKind::Hp { p } => format!("Hp(p={p})[m]"),
            NormKind::SupOnSet(_) => "sup-on-set".into(),
            NormKind::Bs { s } => format!("Bs(s={s})"),
        }
    }
}

/// A computed norm with its accuracy bookkeeping.
#[derive(Debug, Clone, Serialize)]
pub struct NormReport {
    pub spec: String,
    pub value: f64,
    pub est_error: f64,
    pub cells_used: usize,
    pub converged: bool,
    /// Previous refinement estimate (meaningful when converged is false).
    pub prev_estimate: f64,
}

/// Closed form ‖f‖_{A²} = sqrt(Σ |a_ν|²/(ν+1)) on the normalized disk, by
/// monomial orthogonality. Serves as the quadrature oracle.
pub fn a2_disk_norm_exact(f: &PowerSeries) -> f64 {
    f.coeffs()
        .iter()
        .enumerate()
        .map(|(nu, a)| a.norm_sqr() / (nu as f64 + 1.0))
        .sum::<f64>()
        .sqrt()
}

/// ‖z^m·P‖²_{A²(𝔻)} = Σ_k |p_k|²/(m+k+1), the degree-shift norm law.
pub fn a2_shifted_norm_sq(p: &PowerSeries, m: usize) -> f64 {
    p.coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| c.norm_sqr() / ((m + k) as f64 + 1.0))
        .sum()
}

/// Computes ‖f‖ for the given spec, failing with the last two estimates if
/// refinement cannot reach the requested tolerance.
pub fn norm(f: &PowerSeries, spec: &NormSpec) -> Result<NormReport> {
    let report = norm_report(f, spec)?;
    if !report.converged {
        return Err(CoreError::ToleranceNotMet {
            requested: spec.tol,
            prev: report.prev_estimate,
            last: report.value,
        });
    }
    Ok(report)
}

/// Same as [`norm`] but returns the best value with `converged = false`
/// instead of erroring on a missed tolerance.
pub fn norm_report(f: &PowerSeries, spec: &NormSpec) -> Result<NormReport> {
    spec.validate()?;
    let label = spec.label();
    match &spec.kind {
        NormKind::ApDiskNormalized { p } => {
            let r = disk_pnorm(Complex64::ZERO, 1.0, f, *p, spec.tol, true);
            Ok(finish(label, r))
        }
        NormKind::Ap { domain, p } => match domain {
            Domain::UnitDisk => {
                let r = disk_pnorm(Complex64::ZERO, 1.0, f, *p, spec.tol, false);
                Ok(finish(label, r))
            }
            Domain::Disk { center, radius } => {
                let c = Complex64::new(center[0], center[1]);
                let r = disk_pnorm(c, *radius, f, *p, spec.tol, false);
                Ok(finish(label, r))
            }
            _ => {
                let config = AreaConfig { tol: spec.tol, ..Default::default() };
                let g = |z: Complex64| f.eval(z).norm().powf(*p);
                let a = area_integral(domain, &g, &config);
                Ok(NormReport {
                    spec: label,
                    value: a.value.max(0.0).powf(1.0 / p),
                    est_error: relative_error_of_root(a.value, a.est_error, *p),
                    cells_used: a.cells,
                    converged: a.converged,
                    prev_estimate: a.prev.max(0.0).powf(1.0 / p),
                })
            }
        },
        NormKind::LpCircle { p } | NormKind::Hp { p } => {
            let r = circle_pnorm_series(f, *p, spec.tol);
            Ok(finish(label, r))
        }
        NormKind::SupOnSet(set) => {
            let value = sup_norm_on_set(f, set)?;
            Ok(NormReport {
                spec: label,
                value,
                est_error: 0.0,
                cells_used: set.sample_points().len(),
                converged: true,
                prev_estimate: value,
            })
        }
        NormKind::Bs { s } => {
            let value = b_s_norm(f, *s);
            Ok(NormReport {
                spec: label,
                value,
                est_error: 1e-9 * value,
                cells_used: 0,
                converged: true,
                prev_estimate: value,
            })
        }
    }
}

struct PNorm {
    value: f64,
    est_error: f64,
    cells: usize,
    converged: bool,
    prev: f64,
}

fn finish(spec: String, r: PNorm) -> NormReport {
    NormReport {
        spec,
        value: r.value,
        est_error: r.est_error,
        cells_used: r.cells,
        converged: r.converged,
        prev_estimate: r.prev,
    }
}

fn relative_error_of_root(value: f64, err: f64, p: f64) -> f64 {
    // |d(v^{1/p})| = v^{1/p-1}/p · |dv|.
    if value <= 0.0 {
        return err.powf(1.0 / p);
    }
    value.powf(1.0 / p - 1.0) / p * err
}

/// ∫_{D(c,R)} |f|^p dλ₂ by the polar tensor rule (Gauss–Legendre radial ×
/// trapezoid angular), exact for trigonometric polynomials; doubled until
/// the change is within tolerance. `normalize` divides by the disk area.
fn disk_pnorm(center: Complex64, radius: f64, f: &PowerSeries, p: f64, tol: f64, normalize: bool) -> PNorm {
    let d = f.degree();
    let mut nr = (d + 1).max(8);
    let mut na = (2 * d + 2).max(16);
    let mut value = disk_polar_pass(center, radius, f, p, nr, na);
    let mut cells = nr * na;
    let mut prev;
    let mut est;
    loop {
        nr *= 2;
        na *= 2;
        let next = disk_polar_pass(center, radius, f, p, nr, na);
        cells += nr * na;
        est = (next - value).abs();
        prev = value;
        value = next;
        if est <= tol * value.abs().max(1e-300) {
            break PNorm {
                value: scale_root(value, radius, p, normalize),
                est_error: relative_error_of_root(value, est, p),
                cells,
                converged: true,
                prev: scale_root(prev, radius, p, normalize),
            };
        }
        if nr > 4096 {
            break PNorm {
                value: scale_root(value, radius, p, normalize),
                est_error: relative_error_of_root(value, est, p),
                cells,
                converged: false,
                prev: scale_root(prev, radius, p, normalize),
            };
        }
    }
}

fn scale_root(integral: f64, radius: f64, p: f64, normalize: bool) -> f64 {
    let total = if normalize { integral / (PI * radius * radius) } else { integral };
    total.max(0.0).powf(1.0 / p)
}

fn disk_polar_pass(center: Complex64, radius: f64, f: &PowerSeries, p: f64, nr: usize, na: usize) -> f64 {
    let (rnodes, rweights) = gauss_legendre(nr);
    let mut acc = 0.0;
    for (x, w) in rnodes.iter().zip(rweights.iter()) {
        let rho = 0.5 * (x + 1.0);
        let mut ring = 0.0;
        for k in 0..na {
            let theta = 2.0 * PI * k as f64 / na as f64;
            let z = center + Complex64::from_polar(radius * rho, theta);
            ring += f.eval(z).norm().powf(p);
        }
        ring *= 2.0 * PI / na as f64;
        acc += w * 0.5 * rho * ring;
    }
    acc * radius * radius
}

fn circle_pnorm_series(f: &PowerSeries, p: f64, tol: f64) -> PNorm {
    let m0 = (2 * f.degree() + 2).next_power_of_two().max(16);
    let refined = refine_circle_mean(m0, tol, 1 << 22, |theta| {
        f.eval(Complex64::from_polar(1.0, theta)).norm().powf(p)
    });
    PNorm {
        value: refined.value.max(0.0).powf(1.0 / p),
        est_error: relative_error_of_root(refined.value, refined.est_error, p),
        cells: refined.evaluations,
        converged: refined.converged,
        prev: refined.prev.max(0.0).powf(1.0 / p),
    }
}

/// H^p / L^p(𝕋) norm of a trigonometric polynomial by the same refined
/// circle quadrature.
pub fn lp_circle_norm_trig(t: &TrigPolynomial, p: f64, tol: f64) -> f64 {
    let degree_span = (t.max_index() - t.min_index).unsigned_abs() as usize;
    let m0 = (2 * degree_span + 2).next_power_of_two().max(16);
    let refined = refine_circle_mean(m0, tol, 1 << 22, |theta| {
        t.eval(Complex64::from_polar(1.0, theta)).norm().powf(p)
    });
    refined.value.max(0.0).powf(1.0 / p)
}

/// H^p norm of a power series (circle integral at r = 1 for polynomials).
pub fn hp_norm(f: &PowerSeries, p: f64) -> f64 {
    circle_pnorm_series(f, p, 1e-10).value
}

/// sup over the set's samples of |f|, refining arc grids (density doubling)
/// until the relative change drops below 1e-9. Rejects empty sets.
pub fn sup_norm_on_set(f: &PowerSeries, set: &CompactCircleSet) -> Result<f64> {
    if set.is_empty() {
        return Err(CoreError::EmptySet);
    }
    if set.is_finite() {
        let v = set
            .points
            .iter()
            .map(|pt| f.eval(pt.to_complex()).norm())
            .fold(0.0, f64::max);
        return Ok(v);
    }
    let mut per_arc = set.samples_per_arc.max(8 * (f.degree() + 1) / set.arcs.len().max(1)).max(16);
    let mut best = sup_on_samples(f, set, per_arc);
    loop {
        per_arc *= 2;
        let next = sup_on_samples(f, set, per_arc);
        let change = (next - best).abs() / next.max(f64::MIN_POSITIVE);
        best = best.max(next);
        if change < 1e-9 || per_arc > 1 << 20 {
            return Ok(best);
        }
    }
}

fn sup_on_samples(f: &PowerSeries, set: &CompactCircleSet, per_arc: usize) -> f64 {
    set.sample_points_with(per_arc)
        .iter()
        .map(|&z| f.eval(z).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::CirclePoint;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn normalized_disk_norm_of_one() {
        let f = PowerSeries::constant(Complex64::ONE);
        let spec = NormSpec::new(NormKind::ApDiskNormalized { p: 2.0 });
        let r = norm(&f, &spec).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10, "got {}", r.value);
    }

    #[test]
    fn normalized_disk_monomial_norm() {
        for nu in [0usize, 1, 3, 7] {
            let f = PowerSeries::monomial(Complex64::ONE, nu);
            let spec = NormSpec::new(NormKind::ApDiskNormalized { p: 2.0 });
            let r = norm(&f, &spec).unwrap();
            let exact = (1.0 / (nu as f64 + 1.0)).sqrt();
            assert!((r.value - exact).abs() < 1e-10, "nu={nu}: got {}", r.value);
        }
    }

    #[test]
    fn quadrature_matches_exact_a2_for_gamma_truncation() {
        let f = PowerSeries::geometric(c(0.5, 0.0), 30);
        let spec = NormSpec::new(NormKind::ApDiskNormalized { p: 2.0 });
        let quad = norm(&f, &spec).unwrap().value;
        let exact = a2_disk_norm_exact(&f);
        assert!((quad - exact).abs() <= 1e-8 * exact, "quad {quad} vs exact {exact}");
        // Coefficient-series oracle: Σ |0.5|^{2ν}/(ν+1).
        let series: f64 = (0..=30).map(|nu: usize| 0.25f64.powi(nu as i32) / (nu as f64 + 1.0)).sum();
        assert!((quad * quad - series).abs() < 1e-8);
    }

    #[test]
    fn unnormalized_lambda2_convention() {
        let f = PowerSeries::constant(Complex64::ONE);
        let spec = NormSpec::new(NormKind::Ap { domain: Domain::unit_disk(), p: 2.0 });
        let r = norm(&f, &spec).unwrap();
        assert!((r.value - PI.sqrt()).abs() < 1e-8, "lambda2 gives sqrt(pi), got {}", r.value);
    }

    #[test]
    fn hp_norm_of_monomials_is_one() {
        for n in [0usize, 1, 5, 11] {
            let f = PowerSeries::monomial(Complex64::ONE, n);
            for p in [1.0, 2.0, 3.5] {
                assert!((hp_norm(&f, p) - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn h2_is_parseval() {
        let f = PowerSeries::new(vec![c(0.3, -0.4), c(1.0, 0.2), c(0.0, 0.9), c(-0.5, 0.0)]);
        let parseval: f64 = f.coeffs().iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        assert!((hp_norm(&f, 2.0) - parseval).abs() < 1e-10);
    }

    #[test]
    fn h1_of_one_plus_z() {
        let f = PowerSeries::from_real(&[1.0, 1.0]);
        let got = hp_norm(&f, 1.0);
        assert!((got - 4.0 / PI).abs() < 1e-6, "got {got}, want {}", 4.0 / PI);
    }

    #[test]
    fn monotone_domain_property() {
        let f = PowerSeries::new(vec![c(0.7, 0.1), c(-0.3, 0.5), c(0.2, 0.2)]);
        let small = NormSpec::new(NormKind::Ap { domain: Domain::unit_disk(), p: 2.0 });
        let big = NormSpec::new(NormKind::Ap {
            domain: Domain::disk(Complex64::ZERO, 1.2).unwrap(),
            p: 2.0,
        });
        let ns = norm(&f, &small).unwrap().value;
        let nb = norm(&f, &big).unwrap().value;
        assert!(ns <= nb + 1e-9);
    }

    #[test]
    fn sup_norm_basics() {
        let one = PowerSeries::constant(Complex64::ONE);
        let set = CompactCircleSet::roots_of_unity(8);
        assert!((sup_norm_on_set(&one, &set).unwrap() - 1.0).abs() < 1e-12);

        let f = PowerSeries::new(vec![c(1.0, 0.0), c(-1.0, 0.0)]); // 1 - z
        let at_one = CompactCircleSet::single_point(CirclePoint::root_of_unity(0, 1));
        assert_eq!(sup_norm_on_set(&f, &at_one).unwrap(), 0.0);

        let zk = PowerSeries::monomial(Complex64::ONE, 8);
        let roots = CompactCircleSet::roots_of_unity(8);
        assert!((sup_norm_on_set(&zk, &roots).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sup_norm_rejects_empty() {
        let f = PowerSeries::constant(Complex64::ONE);
        let empty = CompactCircleSet::from_points(vec![]);
        assert!(matches!(sup_norm_on_set(&f, &empty), Err(CoreError::EmptySet)));
    }

    #[test]
    fn partial_sum_error_strictly_decreasing() {
        let f = PowerSeries::geometric(c(0.8, 0.0), 25);
        let mut last = f64::INFINITY;
        for n in 0..25 {
            let err = a2_disk_norm_exact(&f.sub(&f.partial_sum(n)));
            assert!(err < last);
            last = err;
        }
    }

    #[test]
    fn local_uniform_control_by_mean_value() {
        // max_{|z|≤1/2} |f| ≤ (4/π)·‖f‖_{A¹(𝔻,λ₂)} via the mean value property.
        let candidates = [
            PowerSeries::from_real(&[1.0, 2.0, -1.0, 0.5]),
            PowerSeries::new(vec![c(0.1, 0.9), c(0.0, -1.2), c(0.7, 0.3)]),
        ];
        for f in &candidates {
            let a1 = norm(f, &NormSpec::new(NormKind::Ap { domain: Domain::unit_disk(), p: 1.0 }))
                .unwrap()
                .value;
            let m = crate::series::max_modulus(f, 0.5);
            assert!(m <= 4.0 / PI * a1 * (1.0 + 1e-6), "m={m}, bound={}", 4.0 / PI * a1);
        }
    }

    #[test]
    fn triangle_inequality_across_specs() {
        let f = PowerSeries::new(vec![c(0.4, 0.3), c(-0.2, 0.8), c(0.6, -0.1)]);
        let g = PowerSeries::new(vec![c(-0.9, 0.0), c(0.3, 0.3)]);
        let sum = f.add(&g);
        let specs = vec![
            NormSpec::new(NormKind::ApDiskNormalized { p: 2.0 }),
            NormSpec::new(NormKind::Ap { domain: Domain::standard_two_disk(), p: 2.0 }),
            NormSpec::new(NormKind::LpCircle { p: 1.0 }),
            NormSpec::new(NormKind::Hp { p: 2.0 }),
            NormSpec::new(NormKind::SupOnSet(CompactCircleSet::roots_of_unity(16))),
            NormSpec::new(NormKind::Bs { s: 0.25 }),
        ];
        for spec in specs {
            let spec = NormSpec { kind: spec.kind, tol: 1e-6 };
            let rf = norm_report(&f, &spec).unwrap();
            let rg = norm_report(&g, &spec).unwrap();
            let rsum = norm_report(&sum, &spec).unwrap();
            // Quadrature errors enter each term once; honest reports bound
            // the possible violation.
            let slack = 1e-9 * (rf.value + rg.value + 1.0)
                + 2.0 * (rf.est_error + rg.est_error + rsum.est_error);
            assert!(
                rsum.value <= rf.value + rg.value + slack,
                "{}: {} > {} + {}",
                spec.label(),
                rsum.value,
                rf.value,
                rg.value
            );
            // absolute homogeneity
            let scaled = f.scale(c(0.0, -2.5));
            let rscaled = norm_report(&scaled, &spec).unwrap();
            assert!(
                (rscaled.value - 2.5 * rf.value).abs()
                    <= 1e-9 * (1.0 + rf.value) + 2.0 * (rscaled.est_error + 2.5 * rf.est_error) + 2.5 * rf.value * 1e-6,
                "{}: homogeneity {} vs {}",
                spec.label(),
                rscaled.value,
                2.5 * rf.value
            );
        }
    }
}
