//! Constructive simultaneous approximation: minimum-norm interpolation on
//! circle points, peaking polynomials (small in integral norms, vanishing on
//! a prescribed finite set), the combiner that approximates a function in an
//! integral norm while matching targets uniformly on a small set, the
//! finite-stage universal-series builder, the Menshov-style almost-everywhere
//! demo, and Cauchy-transform moment diagnostics.
//!
//! Sets are always finite here: the closed measure-zero sets of the theory
//! are represented by finite samples (e.g. Cantor arc endpoints). Arcs are
//! refused — peaking on a set with interior is impossible and would fail
//! silently otherwise.

use num_complex::Complex64;
use serde::Serialize;

use crate::cantor::{build_cantor, CantorSpec};
use crate::circle::{CompactCircleSet, TAU};
use crate::error::{CoreError, Result};
use crate::linalg::{hermitian_solve, vandermonde_interpolate, HermitianSolution, CONDITION_LIMIT};
use crate::norms::{a2_disk_norm_exact, a2_shifted_norm_sq};
use crate::series::{b_s_norm, cesaro_mean, cesaro_row, PowerSeries};
use nalgebra::DMatrix;

/// Minimum-norm interpolant result with its certificates.
#[derive(Debug, Clone, Serialize)]
pub struct Interpolant {
    pub series: PowerSeries,
    pub cond_estimate: f64,
    /// max_j |P(w_j) − t_j|.
    pub interpolation_residual: f64,
    /// ‖P‖²_{H²} = Σ|p_k|².
    pub coeff_norm_sq: f64,
}

fn require_finite_points(set: &CompactCircleSet) -> Result<Vec<Complex64>> {
    if !set.is_finite() {
        return Err(CoreError::InvalidSpec(
            "this engine needs a finite point set; arcs are refused".into(),
        ));
    }
    if set.points.is_empty() {
        return Err(CoreError::EmptySet);
    }
    Ok(set.points.iter().map(|p| p.to_complex()).collect())
}

/// The polynomial P of degree ≤ d with P(w_j) = t_j minimizing Σ|p_k|², via
/// the M×M Gram system with geometric-sum closed-form entries
/// G_{ij} = Σ_{k=0}^{d} (w_i conj(w_j))^k.
pub fn min_norm_interpolant(
    points: &[Complex64],
    targets: &[Complex64],
    degree: usize,
) -> Result<Interpolant> {
    let m = points.len();
    if m == 0 {
        return Err(CoreError::EmptySet);
    }
    if targets.len() != m {
        return Err(CoreError::InvalidSpec("points and targets differ in length".into()));
    }
    if degree + 1 < m {
        return Err(CoreError::InvalidSpec(format!(
            "degree {degree} too small for {m} interpolation conditions"
        )));
    }
    for i in 0..m {
        for j in (i + 1)..m {
            if (points[i] - points[j]).norm() < 1e-14 {
                return Err(CoreError::InvalidSpec(format!(
                    "interpolation points {i} and {j} coincide"
                )));
            }
        }
    }
    let gram = DMatrix::from_fn(m, m, |i, j| geometric_gram_entry(points[i], points[j], degree));
    let sol = hermitian_solve(&gram, targets, 0.0)?;
    if sol.cond_estimate > CONDITION_LIMIT {
        return Err(CoreError::IllConditioned {
            cond: sol.cond_estimate,
            hint: "raise the degree or separate the interpolation points".into(),
        });
    }
    let series = coefficients_from_dual(points, &sol.solution, degree);
    let interpolation_residual = points
        .iter()
        .zip(targets.iter())
        .map(|(&w, &t)| (series.eval(w) - t).norm())
        .fold(0.0, f64::max);
    let coeff_norm_sq = series.coeffs().iter().map(|c| c.norm_sqr()).sum();
    Ok(Interpolant { series, cond_estimate: sol.cond_estimate, interpolation_residual, coeff_norm_sq })
}

fn geometric_gram_entry(wi: Complex64, wj: Complex64, degree: usize) -> Complex64 {
    let q = wi * wj.conj();
    let one = Complex64::ONE;
    if (q - one).norm() < 1e-13 {
        return Complex64::new(degree as f64 + 1.0, 0.0);
    }
    (one - q.powu(degree as u32 + 1)) / (one - q)
}

fn coefficients_from_dual(points: &[Complex64], dual: &[Complex64], degree: usize) -> PowerSeries {
    let mut coeffs = vec![Complex64::ZERO; degree + 1];
    for (w, c) in points.iter().zip(dual.iter()) {
        let wc = w.conj();
        let mut power = Complex64::ONE;
        for slot in coeffs.iter_mut() {
            *slot += c * power;
            power *= wc;
        }
    }
    PowerSeries::new(coeffs)
}

/// Generic minimum-norm solve for arbitrary linear functionals on the
/// coefficient space (evaluation rows, Cesàro rows, ...).
pub fn min_norm_solve(
    rows: &[Vec<Complex64>],
    targets: &[Complex64],
    ridge: f64,
) -> Result<(PowerSeries, HermitianSolution)> {
    let m = rows.len();
    if m == 0 {
        return Err(CoreError::EmptySet);
    }
    let width = rows[0].len();
    if rows.iter().any(|r| r.len() != width) {
        return Err(CoreError::InvalidSpec("functional rows differ in width".into()));
    }
    let gram = DMatrix::from_fn(m, m, |i, j| {
        rows[i]
            .iter()
            .zip(rows[j].iter())
            .map(|(a, b)| a * b.conj())
            .sum::<Complex64>()
    });
    let sol = hermitian_solve(&gram, targets, ridge)?;
    let mut coeffs = vec![Complex64::ZERO; width];
    for (row, c) in rows.iter().zip(sol.solution.iter()) {
        for (slot, a) in coeffs.iter_mut().zip(row.iter()) {
            *slot += c * a.conj();
        }
    }
    Ok((PowerSeries::new(coeffs), sol))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PeakingConstruction {
    /// Penalized least squares in the normalized A² norm.
    PenalizedA2,
    /// Q = 1 − z^m·q with q the Vandermonde interpolant of w^{−m}; zeros on
    /// the set are exact.
    ExactZeros,
}

#[derive(Debug, Clone, Serialize)]
pub struct PeakingReport {
    pub series: PowerSeries,
    pub construction: PeakingConstruction,
    pub a2_distance_to_one: f64,
    pub sup_on_set: f64,
    pub bs_distance_to_one: f64,
    pub lambda_used: f64,
    /// Stationarity residual of the normal equations (penalized route).
    pub normal_residual: f64,
    pub cond_estimate: f64,
    /// Oracle-route data: ‖q‖²_{ℓ²} and the shift bound ‖q‖²/(m+1).
    pub interpolant_norm_sq: f64,
    pub shift_bound: f64,
    /// Exact value Σ_k |q_k|²/(m+k+1) = ‖Q−1‖²_{A²} for the oracle route.
    pub shifted_norm_sq: f64,
    pub monomial_shift: usize,
}

/// Builds a peaking polynomial for the finite set E: close to 1 in A²(𝔻)
/// (and B_s), uniformly small on E. Runs both constructions — the penalized
/// least-squares route with λ doubling from `lambda0` up to 1e9, and the
/// exact-zero oracle route — and returns the better.
pub fn peaking_polynomial(
    set: &CompactCircleSet,
    degree: usize,
    lambda0: f64,
    s: f64,
) -> Result<PeakingReport> {
    if set.is_empty() {
        // Empty set: Q ≡ 1 peaks trivially.
        let series = PowerSeries::constant(Complex64::ONE);
        return Ok(PeakingReport {
            series,
            construction: PeakingConstruction::ExactZeros,
            a2_distance_to_one: 0.0,
            sup_on_set: 0.0,
            bs_distance_to_one: 0.0,
            lambda_used: 0.0,
            normal_residual: 0.0,
            cond_estimate: 1.0,
            interpolant_norm_sq: 0.0,
            shift_bound: 0.0,
            shifted_norm_sq: 0.0,
            monomial_shift: 0,
        })
    }
    let points = require_finite_points(set)?;
    let m_points = points.len();
    if degree + 1 < m_points {
        return Err(CoreError::InvalidSpec(format!(
            "peaking degree {degree} below point count {m_points}"
        )));
    }

    let oracle = peaking_exact_zeros(&points, degree, s)?;

    let mut best_penalized: Option<PeakingReport> = None;
    let mut lambda = lambda0.max(1.0);
    while lambda <= 1e9 {
        match peaking_penalized(&points, degree, lambda, s) {
            Ok(report) => {
                let balanced = report.sup_on_set <= report.a2_distance_to_one.max(1e-9);
                let better = best_penalized
                    .as_ref()
                    .map(|b| score(&report) < score(b))
                    .unwrap_or(true);
                if better {
                    best_penalized = Some(report);
                }
                if balanced {
                    break;
                }
            }
            Err(CoreError::IllConditioned { .. }) => {}
            Err(e) => return Err(e),
        }
        lambda *= 2.0;
    }

    // Never fabricate success: return whichever construction achieved the
    // smaller worst residual, with all achieved values reported.
    match best_penalized {
        Some(p) if score(&p) < score(&oracle) => Ok(p),
        _ => Ok(oracle),
    }
}

fn score(r: &PeakingReport) -> f64 {
    r.a2_distance_to_one.max(r.sup_on_set)
}

fn peaking_penalized(
    points: &[Complex64],
    degree: usize,
    lambda: f64,
    s: f64,
) -> Result<PeakingReport> {
    let n = degree + 1;
    // Normal equations (D + λ VᴴV) q = D e₀ with D = diag(1/(ν+1)).
    let mut gram = DMatrix::from_fn(n, n, |k, l| {
        let mut acc = Complex64::ZERO;
        for w in points {
            acc += w.powu(k as u32).conj() * w.powu(l as u32);
        }
        acc * lambda
    });
    for k in 0..n {
        gram[(k, k)] += Complex64::new(1.0 / (k as f64 + 1.0), 0.0);
    }
    let mut rhs = vec![Complex64::ZERO; n];
    rhs[0] = Complex64::ONE;
    let sol = hermitian_solve(&gram, &rhs, 0.0)?;
    if sol.cond_estimate > CONDITION_LIMIT {
        return Err(CoreError::IllConditioned {
            cond: sol.cond_estimate,
            hint: "penalized peaking system ill-conditioned".into(),
        });
    }
    let series = PowerSeries::new(sol.solution.clone());
    let diff = series.sub(&PowerSeries::constant(Complex64::ONE));
    let sup = points.iter().map(|&w| series.eval(w).norm()).fold(0.0, f64::max);
    Ok(PeakingReport {
        a2_distance_to_one: a2_disk_norm_exact(&diff),
        sup_on_set: sup,
        bs_distance_to_one: b_s_norm(&diff, s),
        series,
        construction: PeakingConstruction::PenalizedA2,
        lambda_used: lambda,
        normal_residual: sol.residual,
        cond_estimate: sol.cond_estimate,
        interpolant_norm_sq: 0.0,
        shift_bound: 0.0,
        shifted_norm_sq: 0.0,
        monomial_shift: 0,
    })
}

/// Construction (b) alone: the exact-zero oracle route Q = 1 − z^m·q. The
/// report carries the interpolant norm, the shift bound ‖q‖²/(m+1) and the
/// exact shifted norm Σ|q_k|²/(m+k+1) for identity checks.
pub fn peaking_oracle(set: &CompactCircleSet, degree: usize, s: f64) -> Result<PeakingReport> {
    let points = require_finite_points(set)?;
    if degree + 1 < points.len() {
        return Err(CoreError::InvalidSpec(format!(
            "peaking degree {degree} below point count {}",
            points.len()
        )));
    }
    peaking_exact_zeros(&points, degree, s)
}

fn peaking_exact_zeros(points: &[Complex64], degree: usize, s: f64) -> Result<PeakingReport> {
    let m_points = points.len();
    let shift = degree - (m_points - 1);
    // q interpolates w_j^{−shift} at w_j; Q = 1 − z^shift·q then vanishes on
    // the set exactly (up to the solve's interpolation residual).
    let targets: Vec<Complex64> = points.iter().map(|w| w.conj().powu(shift as u32)).collect();
    let q_coeffs = vandermonde_interpolate(points, &targets)?;
    let q = PowerSeries::new(q_coeffs);
    let shifted = q.shift_up(shift);
    let series = PowerSeries::constant(Complex64::ONE).sub(&shifted);
    let sup = points.iter().map(|&w| series.eval(w).norm()).fold(0.0, f64::max);
    let interpolant_norm_sq: f64 = q.coeffs().iter().map(|c| c.norm_sqr()).sum();
    let shifted_norm_sq = a2_shifted_norm_sq(&q, shift);
    let diff = series.sub(&PowerSeries::constant(Complex64::ONE));
    Ok(PeakingReport {
        a2_distance_to_one: shifted_norm_sq.sqrt(),
        sup_on_set: sup,
        bs_distance_to_one: b_s_norm(&diff, s),
        series,
        construction: PeakingConstruction::ExactZeros,
        lambda_used: 0.0,
        normal_residual: 0.0,
        cond_estimate: 0.0,
        interpolant_norm_sq,
        shift_bound: interpolant_norm_sq / (shift as f64 + 1.0),
        shifted_norm_sq,
        monomial_shift: shift,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SimulSpace {
    /// A²(𝔻) with normalized area measure.
    A2DiskNormalized,
    /// H² (equivalently L²(𝕋) for analytic polynomials).
    H2,
    /// L²(𝕋).
    L2Circle,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulReport {
    pub series: PowerSeries,
    /// ‖f − P‖ in the requested space (exact coefficient formulas).
    pub norm_error: f64,
    /// sup_E |g − P| over the sample points.
    pub sup_error: f64,
    pub space: SimulSpace,
    pub degree_used: usize,
}

/// Simultaneous approximation: P close to f in the integral norm and close
/// to the targets uniformly on the finite set E.
///
/// A² route: P = Q·s_k f + (1−Q)·G with Q peaking on E (exact zeros) and G
/// the minimum-norm interpolant of the targets. Hardy/L² route: the
/// high-degree shift does not shrink circle norms, so the construction is
/// direct minimum-norm interpolation of the residual targets on top of
/// s_k f.
pub fn simultaneous_approx(
    f: &PowerSeries,
    set: &CompactCircleSet,
    targets: &[Complex64],
    space: SimulSpace,
    degree: usize,
) -> Result<SimulReport> {
    let points = require_finite_points(set)?;
    if targets.len() != points.len() {
        return Err(CoreError::InvalidSpec("targets must match the sample points".into()));
    }
    let m_points = points.len();
    match space {
        SimulSpace::A2DiskNormalized => {
            let k = f.degree().min(degree / 3);
            let pf = f.partial_sum(k);
            let g_degree = (m_points - 1).max(degree / 8).min(degree / 2);
            let g = min_norm_interpolant(&points, targets, g_degree)?;
            let q_degree = degree - k.max(g_degree);
            if q_degree + 1 < m_points {
                return Err(CoreError::InvalidSpec(format!(
                    "degree {degree} too small for the combiner at {m_points} points"
                )));
            }
            let q = peaking_exact_zeros(&points, q_degree, 0.25)?;
            // P = Q·P_f + (1−Q)·G.
            let one = PowerSeries::constant(Complex64::ONE);
            let p = q.series.mul(&pf).add(&one.sub(&q.series).mul(&g.series));
            let norm_error = a2_disk_norm_exact(&f.sub(&p));
            let sup_error = points
                .iter()
                .zip(targets.iter())
                .map(|(&w, &t)| (p.eval(w) - t).norm())
                .fold(0.0, f64::max);
            Ok(SimulReport { norm_error, sup_error, degree_used: p.degree(), series: p, space })
        }
        SimulSpace::H2 | SimulSpace::L2Circle => {
            let k = f.degree().min(degree / 3);
            let pf = f.partial_sum(k);
            let residual_targets: Vec<Complex64> = points
                .iter()
                .zip(targets.iter())
                .map(|(&w, &t)| t - pf.eval(w))
                .collect();
            let r = min_norm_interpolant(&points, &residual_targets, degree)?;
            let p = pf.add(&r.series);
            let diff = f.sub(&p);
            let norm_error = diff.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            let sup_error = points
                .iter()
                .zip(targets.iter())
                .map(|(&w, &t)| (p.eval(w) - t).norm())
                .fold(0.0, f64::max);
            Ok(SimulReport { norm_error, sup_error, degree_used: p.degree(), series: p, space })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BuilderSpace {
    A2,
    H2,
}

#[derive(Debug, Clone, Serialize)]
pub struct UniversalStage {
    pub index: usize,
    /// Partial-sum cut n_k: s_{n_k} f reproduces this stage exactly.
    pub n: usize,
    pub sup_residual: f64,
    pub block_norm: f64,
    pub block_norm_budget: f64,
    pub pad: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct UniversalResult {
    pub series: PowerSeries,
    pub stages: Vec<UniversalStage>,
    pub completed: bool,
    pub failed_stage: Option<usize>,
}

#[derive(Debug, Clone, Copy)]
pub struct BuilderOptions {
    /// Coefficient width of each stage block before widening.
    pub block_width: usize,
    pub max_degree: usize,
    pub space: BuilderSpace,
}

impl BuilderOptions {
    pub fn for_points(space: BuilderSpace, m_points: usize) -> Self {
        BuilderOptions {
            block_width: (4 * m_points).max(64),
            max_degree: 20_000,
            space,
        }
    }
}

/// Finite-stage universal builder: starting from f₀, appends coefficient
/// blocks in disjoint degree ranges so that stage k matches target g_k on E
/// within ε_k while the block's norm stays within 2^{−k}. Because supports
/// are disjoint, s_{n_k} f equals the stage-k prefix exactly.
pub fn universal_builder(
    set: &CompactCircleSet,
    target_values: &[Vec<Complex64>],
    f0: &PowerSeries,
    stage_tolerances: &[f64],
    opts: &BuilderOptions,
) -> Result<UniversalResult> {
    let points = require_finite_points(set)?;
    let k_stages = target_values.len();
    if stage_tolerances.len() != k_stages {
        return Err(CoreError::InvalidSpec("one tolerance per stage target".into()));
    }
    if stage_tolerances.iter().any(|e| *e <= 0.0) {
        return Err(CoreError::InvalidSpec("stage tolerances must be positive".into()));
    }
    let mut current = f0.clone();
    let mut cut = f0.degree();
    let mut stages = Vec::with_capacity(k_stages);
    for (stage_idx, (targets, eps)) in target_values.iter().zip(stage_tolerances.iter()).enumerate() {
        let stage_no = stage_idx + 1;
        if targets.len() != points.len() {
            return Err(CoreError::InvalidSpec(format!(
                "stage {stage_no}: {} target values for {} points",
                targets.len(),
                points.len()
            )));
        }
        let block_budget = 0.5f64.powi(stage_no as i32);
        let residual_targets: Vec<Complex64> = points
            .iter()
            .zip(targets.iter())
            .map(|(&w, &t)| t - current.eval(w))
            .collect();
        let mut pad = 0usize;
        let mut width = opts.block_width;
        let mut placed = None;
        loop {
            let start = cut + 1 + pad;
            let block_degree = width.max(points.len()) - 1;
            if start + block_degree > opts.max_degree {
                break;
            }
            let rotated: Vec<Complex64> = points
                .iter()
                .zip(residual_targets.iter())
                .map(|(&w, &t)| t * w.conj().powu(start as u32))
                .collect();
            let b = min_norm_interpolant(&points, &rotated, block_degree)?;
            let block_norm = match opts.space {
                BuilderSpace::A2 => a2_shifted_norm_sq(&b.series, start).sqrt(),
                BuilderSpace::H2 => b.coeff_norm_sq.sqrt(),
            };
            let block = b.series.shift_up(start);
            let candidate = current.add(&block);
            let sup_residual = points
                .iter()
                .zip(targets.iter())
                .map(|(&w, &t)| (candidate.eval(w) - t).norm())
                .fold(0.0, f64::max);
            if block_norm <= block_budget && sup_residual <= *eps {
                placed = Some((candidate, block_norm, sup_residual, pad, start + block_degree));
                break;
            }
            // A² blocks shrink when pushed to higher degrees; circle-norm
            // blocks need more coefficient room instead.
            match opts.space {
                BuilderSpace::A2 => pad = if pad == 0 { width } else { pad * 2 },
                BuilderSpace::H2 => width *= 2,
            }
        }
        match placed {
            Some((next, block_norm, sup_residual, pad_used, new_cut)) => {
                current = next;
                cut = new_cut;
                stages.push(UniversalStage {
                    index: stage_no,
                    n: cut,
                    sup_residual,
                    block_norm,
                    block_norm_budget: block_budget,
                    pad: pad_used,
                });
            }
            None => {
                return Ok(UniversalResult {
                    series: current,
                    stages,
                    completed: false,
                    failed_stage: Some(stage_no),
                });
            }
        }
    }
    Ok(UniversalResult { series: current, stages, completed: true, failed_stage: None })
}

/// A piecewise-constant function on 𝕋: value `values[i]` on
/// [breakpoints[i], breakpoints[i+1]) with the last piece wrapping to the
/// first breakpoint.
#[derive(Debug, Clone, Serialize)]
pub struct StepFunction {
    pub breakpoints: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl StepFunction {
    pub fn new(breakpoints: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if breakpoints.len() != values.len() || breakpoints.is_empty() {
            return Err(CoreError::InvalidSpec(
                "step function needs matching nonempty breakpoints and values".into(),
            ));
        }
        let mut bp = breakpoints;
        for b in bp.iter_mut() {
            *b = b.rem_euclid(TAU);
        }
        let mut idx: Vec<usize> = (0..bp.len()).collect();
        idx.sort_by(|&a, &b| bp[a].total_cmp(&bp[b]));
        let breakpoints: Vec<f64> = idx.iter().map(|&i| bp[i]).collect();
        let values: Vec<Complex64> = idx.iter().map(|&i| values[i]).collect();
        Ok(StepFunction { breakpoints, values })
    }

    /// The sign step: +1 on the upper half circle, −1 on the lower.
    pub fn sign_step() -> Self {
        StepFunction::new(
            vec![0.0, std::f64::consts::PI],
            vec![Complex64::ONE, -Complex64::ONE],
        )
        .expect("static data")
    }

    pub fn eval(&self, theta: f64) -> Complex64 {
        let t = theta.rem_euclid(TAU);
        // Last piece whose breakpoint is <= t; wraps to the final piece
        // below the first breakpoint.
        match self.breakpoints.iter().rposition(|&b| b <= t) {
            Some(i) => self.values[i],
            None => *self.values.last().unwrap(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MenshovStageReport {
    pub stage: usize,
    pub n: usize,
    pub delta: f64,
    /// Fraction of the dense angular grid where |s_n f − g| ≤ delta.
    pub coverage: f64,
    pub sup_on_samples: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MenshovReport {
    pub cantor_n: u32,
    pub cantor_levels: usize,
    /// m(𝕋 ∖ E) of the level-truncated set.
    pub removed_measure: f64,
    pub sample_count: usize,
    pub stages: Vec<MenshovStageReport>,
    pub series: PowerSeries,
    pub completed: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct MenshovOptions {
    pub levels: usize,
    pub samples: usize,
    pub grid: usize,
    pub delta0: f64,
}

impl Default for MenshovOptions {
    fn default() -> Self {
        MenshovOptions { levels: 6, samples: 96, grid: 4096, delta0: 0.2 }
    }
}

/// Almost-everywhere approximation demo: builds a level-truncated Cantor set
/// E with m(𝕋∖E) < ε, replaces the step function by a continuous surrogate
/// (linear interpolation across the removed arcs; jumps that land inside E
/// get a narrow linear ramp), samples E, runs the universal builder toward
/// the surrogate, and reports the fraction of a dense angular grid where the
/// partial sums track the original step.
pub fn menshov_demo(
    g: &StepFunction,
    eps: f64,
    stages: usize,
    opts: &MenshovOptions,
) -> Result<MenshovReport> {
    if !(0.0 < eps && eps < 1.0) {
        return Err(CoreError::InvalidSpec("menshov eps must lie in (0,1)".into()));
    }
    if stages == 0 {
        return Err(CoreError::InvalidSpec("need at least one stage".into()));
    }
    let n = smallest_cantor_n(eps)?;
    let spec = CantorSpec::new(n, opts.levels)?;
    let built = build_cantor(&spec)?;
    let removed_measure = built.stats.last().map(|s| s.removed_cumulative).unwrap_or(0.0);

    // Lusin surrogate: ramp half-width well below the finest removed arc.
    let min_removed = built
        .removed
        .iter()
        .map(|r| r.arc.angular_length())
        .fold(f64::INFINITY, f64::min);
    let ramp = 0.25 * min_removed;
    let surrogate = |theta: f64| surrogate_eval(g, &built.removed, ramp, theta);

    // Sample the kept arcs evenly (endpoints included).
    let per_arc = (opts.samples / built.kept.len()).max(2);
    let mut sample_angles = Vec::new();
    for arc in &built.kept {
        for k in 0..per_arc {
            let t = arc.theta1 + arc.angular_length() * k as f64 / (per_arc - 1).max(1) as f64;
            sample_angles.push(t);
        }
    }
    sample_angles.sort_by(f64::total_cmp);
    sample_angles.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
    let points: Vec<Complex64> = sample_angles.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
    let set = CompactCircleSet::from_points(
        sample_angles.iter().map(|&t| crate::circle::CirclePoint::from_angle(t)).collect(),
    );

    let target_values: Vec<Vec<Complex64>> = (0..stages)
        .map(|_| sample_angles.iter().map(|&t| surrogate(t)).collect())
        .collect();
    let deltas: Vec<f64> = (0..stages).map(|k| opts.delta0 * 0.5f64.powi(k as i32)).collect();
    // The builder interpolates the surrogate exactly at the samples; the
    // per-stage sup tolerance just needs to admit the solve residual.
    let stage_tols: Vec<f64> = deltas.iter().map(|d| d * 0.5).collect();
    let opts_b = BuilderOptions::for_points(BuilderSpace::A2, points.len());
    let result = universal_builder(&set, &target_values, &PowerSeries::zero(), &stage_tols, &opts_b)?;

    let mut stage_reports = Vec::new();
    for (i, stage) in result.stages.iter().enumerate() {
        let prefix = result.series.partial_sum(stage.n);
        let delta = deltas[i];
        let mut hits = 0usize;
        for k in 0..opts.grid {
            let theta = TAU * k as f64 / opts.grid as f64;
            let v = prefix.eval(Complex64::from_polar(1.0, theta));
            if (v - g.eval(theta)).norm() <= delta {
                hits += 1;
            }
        }
        stage_reports.push(MenshovStageReport {
            stage: i + 1,
            n: stage.n,
            delta,
            coverage: hits as f64 / opts.grid as f64,
            sup_on_samples: stage.sup_residual,
        });
    }
    Ok(MenshovReport {
        cantor_n: n,
        cantor_levels: opts.levels,
        removed_measure,
        sample_count: points.len(),
        stages: stage_reports,
        series: result.series,
        completed: result.completed,
    })
}

fn smallest_cantor_n(eps: f64) -> Result<u32> {
    // Σ_{j≥0} (N+j)^{-2} < ε, with the tail bounded by ∫.
    for n in 2u32..10_000 {
        let mut total = 0.0;
        for j in 0..200_000u64 {
            total += 1.0 / ((n as f64 + j as f64) * (n as f64 + j as f64));
        }
        total += 1.0 / (n as f64 + 200_000.0);
        if total < eps {
            return Ok(n);
        }
    }
    Err(CoreError::InvalidSpec(format!("no Cantor parameter reaches eps = {eps}")))
}

fn surrogate_eval(
    g: &StepFunction,
    removed: &[crate::cantor::RemovedArc],
    ramp: f64,
    theta: f64,
) -> Complex64 {
    let t = theta.rem_euclid(TAU);
    for r in removed {
        if r.arc.contains_angle(t) {
            // Linear interpolation across the removed arc.
            let a = r.arc.theta1;
            let b = r.arc.theta2;
            let frac = ((t - a).rem_euclid(TAU)) / (b - a);
            let va = ramped(g, ramp, a - 1e-12);
            let vb = ramped(g, ramp, b + 1e-12);
            return va + (vb - va) * frac;
        }
    }
    ramped(g, ramp, t)
}

fn ramped(g: &StepFunction, ramp: f64, theta: f64) -> Complex64 {
    let t = theta.rem_euclid(TAU);
    for (i, &b) in g.breakpoints.iter().enumerate() {
        let d = angular_distance(t, b);
        if d < ramp {
            let before = g.eval(b - ramp);
            let after = g.eval(b + ramp);
            let signed = signed_angular_offset(t, b);
            let frac = (signed + ramp) / (2.0 * ramp);
            let _ = i;
            return before + (after - before) * frac;
        }
    }
    g.eval(t)
}

fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

fn signed_angular_offset(t: f64, b: f64) -> f64 {
    let d = (t - b).rem_euclid(TAU);
    if d <= std::f64::consts::PI {
        d
    } else {
        d - TAU
    }
}

/// Kμ(w) = Σ_j c_j / (1 − w_j·w) for an atomic measure μ = Σ c_j δ_{w_j};
/// rejected within 1e-8 of the unit circle.
pub fn cauchy_transform_measure(
    points: &[Complex64],
    weights: &[Complex64],
    w: Complex64,
) -> Result<Complex64> {
    if (w.norm() - 1.0).abs() < 1e-8 {
        return Err(CoreError::NearSingular { z: w, dist: (w.norm() - 1.0).abs() });
    }
    if points.len() != weights.len() {
        return Err(CoreError::InvalidSpec("atoms and weights differ in length".into()));
    }
    let mut acc = Complex64::ZERO;
    for (&zj, &cj) in points.iter().zip(weights.iter()) {
        acc += cj / (Complex64::ONE - zj * w);
    }
    Ok(acc)
}

/// max over n = 0..n_max of |Σ_j c_j w_j^n|, the moment annihilation
/// diagnostic for the Cauchy transform.
pub fn moment_annihilation_check(points: &[Complex64], weights: &[Complex64], n_max: usize) -> f64 {
    let mut powers: Vec<Complex64> = vec![Complex64::ONE; points.len()];
    let mut worst = 0.0f64;
    for _ in 0..=n_max {
        let moment: Complex64 = powers
            .iter()
            .zip(weights.iter())
            .map(|(p, c)| p * c)
            .sum();
        worst = worst.max(moment.norm());
        for (p, z) in powers.iter_mut().zip(points.iter()) {
            *p *= z;
        }
    }
    worst
}

#[derive(Debug, Clone, Serialize)]
pub struct ObstructionProbe {
    pub sup_residual: f64,
    pub cesaro_residual: f64,
    pub combined_residual: f64,
    pub cond_estimate: f64,
}

/// One constrained builder stage: minimum-norm interpolation of the target
/// value 1 at the given points joined with a Cesàro tracking row at ζ that
/// pins the Cesàro mean to 0. On sets accumulating at ζ the two demands
/// collide and the achieved residual stays visibly away from zero.
pub fn rogosinski_probe(
    set: &CompactCircleSet,
    degree: usize,
    cesaro_n: usize,
    zeta: Complex64,
    ridge: f64,
) -> Result<ObstructionProbe> {
    let points = require_finite_points(set)?;
    let mut rows: Vec<Vec<Complex64>> = Vec::with_capacity(points.len() + 1);
    for &w in &points {
        let mut row = Vec::with_capacity(degree + 1);
        let mut p = Complex64::ONE;
        for _ in 0..=degree {
            row.push(p);
            p *= w;
        }
        rows.push(row);
    }
    rows.push(cesaro_row(cesaro_n, zeta, degree));
    let mut targets = vec![Complex64::ONE; points.len()];
    targets.push(Complex64::ZERO);
    let (series, sol) = min_norm_solve(&rows, &targets, ridge)?;
    let sup_residual = points
        .iter()
        .map(|&w| (series.eval(w) - Complex64::ONE).norm())
        .fold(0.0, f64::max);
    let cesaro_residual = cesaro_mean(&series, cesaro_n, zeta).norm();
    Ok(ObstructionProbe {
        sup_residual,
        cesaro_residual,
        combined_residual: sup_residual.max(cesaro_residual),
        cond_estimate: sol.cond_estimate,
    })
}
