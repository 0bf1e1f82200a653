//! Quadrature building blocks: Gauss–Legendre rules with cached nodes,
//! periodic trapezoid sums with doubling refinement, and adaptive
//! Gauss–Legendre integration along arcs of the unit circle (the contour
//! integrals behind the Cauchy-kernel machinery).

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;

/// Gauss–Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre recurrence and cached per order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    static CACHE: OnceLock<Mutex<HashMap<usize, (Vec<f64>, Vec<f64>)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().unwrap().get(&n) {
        return rule.clone();
    }
    let rule = compute_gauss_legendre(n);
    cache.lock().unwrap().insert(n, rule.clone());
    rule
}

fn compute_gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                let (_, d2) = legendre_and_derivative(n, x);
                dp = d2;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
        let (_, d) = legendre_and_derivative(n, 0.0);
        weights[n / 2] = 2.0 / (d * d);
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// ∫_a^b g(t) dt by an n-point Gauss–Legendre rule.
pub fn gl_integrate<F: FnMut(f64) -> Complex64>(a: f64, b: f64, n: usize, mut g: F) -> Complex64 {
    let (nodes, weights) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = Complex64::ZERO;
    for (x, w) in nodes.iter().zip(weights.iter()) {
        acc += g(mid + half * x) * *w;
    }
    acc * half
}

pub fn gl_integrate_real<F: FnMut(f64) -> f64>(a: f64, b: f64, n: usize, mut g: F) -> f64 {
    let (nodes, weights) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(weights.iter()) {
        acc += g(mid + half * x) * *w;
    }
    acc * half
}

/// Mean over the unit circle, (1/2π)∫_0^{2π} g(θ) dθ, by the m-point
/// periodic trapezoid rule (spectrally accurate for trigonometric
/// polynomials of degree < m).
pub fn circle_mean<F: FnMut(f64) -> f64>(m: usize, mut g: F) -> f64 {
    let mut acc = 0.0;
    for k in 0..m {
        acc += g(2.0 * PI * k as f64 / m as f64);
    }
    acc / m as f64
}

#[derive(Debug, Clone, Copy)]
pub struct Refined {
    pub value: f64,
    pub est_error: f64,
    pub evaluations: usize,
    pub converged: bool,
    pub prev: f64,
}

/// Doubling refinement of the periodic trapezoid mean until the change is
/// below `tol` relative, starting at `m0` points.
pub fn refine_circle_mean<F: FnMut(f64) -> f64>(
    m0: usize,
    tol: f64,
    max_points: usize,
    mut g: F,
) -> Refined {
    let mut m = m0.max(4);
    let mut value = circle_mean(m, &mut g);
    let mut evals = m;
    loop {
        let next_m = m * 2;
        let next = circle_mean(next_m, &mut g);
        evals += next_m;
        let change = (next - value).abs();
        let prev = value;
        value = next;
        m = next_m;
        if change <= tol * value.abs().max(1e-300) {
            return Refined { value, est_error: change, evaluations: evals, converged: true, prev };
        }
        if m >= max_points {
            return Refined { value, est_error: change, evaluations: evals, converged: false, prev };
        }
    }
}

/// Adaptive Gauss–Legendre integration of g(θ) over [a, b], panel-halving
/// until each panel's 8- vs 16-point estimates agree within its share of
/// `tol`. `initial_panels` lets oscillatory kernels start resolved.
pub fn adaptive_arc<F: Fn(f64) -> Complex64>(
    a: f64,
    b: f64,
    initial_panels: usize,
    tol: f64,
    g: &F,
) -> Complex64 {
    let panels = initial_panels.max(1);
    let width = (b - a) / panels as f64;
    let mut acc = Complex64::ZERO;
    for k in 0..panels {
        let pa = a + k as f64 * width;
        acc += adaptive_panel(pa, pa + width, tol * width / (b - a), g, 0);
    }
    acc
}

fn adaptive_panel<F: Fn(f64) -> Complex64>(a: f64, b: f64, tol: f64, g: &F, depth: usize) -> Complex64 {
    let coarse = gl_integrate(a, b, 8, |t| g(t));
    let (fine, abs_sum) = gl_integrate_with_abs(a, b, 16, g);
    // The achievable accuracy is limited by rounding in the weighted sum of
    // |g| values, not by the size of the panel integral; without this floor
    // panels hugging a pole of g recurse forever.
    let floor = 1e-14 * abs_sum;
    if (fine - coarse).norm() <= tol.max(floor) || depth >= 24 {
        return fine;
    }
    let mid = 0.5 * (a + b);
    adaptive_panel(a, mid, tol * 0.5, g, depth + 1) + adaptive_panel(mid, b, tol * 0.5, g, depth + 1)
}

fn gl_integrate_with_abs<F: Fn(f64) -> Complex64>(a: f64, b: f64, n: usize, g: &F) -> (Complex64, f64) {
    let (nodes, weights) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = Complex64::ZERO;
    let mut abs = 0.0;
    for (x, w) in nodes.iter().zip(weights.iter()) {
        let v = g(mid + half * x) * *w;
        acc += v;
        abs += v.norm();
    }
    (acc * half, abs * half.abs())
}

/// Number of starting panels that keeps the phase span of ζ^m per panel
/// moderate on an arc of the given angular width.
pub fn oscillation_panels(width: f64, m: i64) -> usize {
    let base = (width / (PI / 2.0)).ceil() as usize;
    let osc = (width * m.unsigned_abs() as f64 / 16.0).ceil() as usize;
    base.max(osc).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_nodes_integrate_polynomials_exactly() {
        // n-point rule is exact through degree 2n-1.
        for n in [2usize, 5, 16, 31] {
            for deg in 0..(2 * n) {
                let exact = if deg % 2 == 0 { 2.0 / (deg as f64 + 1.0) } else { 0.0 };
                let got = gl_integrate_real(-1.0, 1.0, n, |x| x.powi(deg as i32));
                assert!(
                    (got - exact).abs() < 1e-12,
                    "n={n} deg={deg}: got {got}, want {exact}"
                );
            }
        }
    }

    #[test]
    fn gl_weights_sum_to_two() {
        for n in [1usize, 7, 40, 64] {
            let (_, w) = gauss_legendre(n);
            let total: f64 = w.iter().sum();
            assert!((total - 2.0).abs() < 1e-13);
        }
    }

    #[test]
    fn circle_mean_kills_nonzero_frequencies() {
        for freq in 1..6i32 {
            let mean = circle_mean(16, |t| (freq as f64 * t).cos());
            assert!(mean.abs() < 1e-14);
        }
    }

    #[test]
    fn refine_circle_mean_handles_corner_integrand() {
        // (1/2π)∫ |1+e^{iθ}| dθ = 4/π.
        let r = refine_circle_mean(64, 1e-8, 1 << 22, |t| {
            (Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, t)).norm()
        });
        assert!(r.converged);
        assert!((r.value - 4.0 / PI).abs() < 1e-6, "got {}", r.value);
    }

    #[test]
    fn adaptive_arc_matches_antiderivative() {
        // ∫ e^{3iθ} dθ over [0.2, 1.9].
        let g = |t: f64| Complex64::from_polar(1.0, 3.0 * t);
        let got = adaptive_arc(0.2, 1.9, 1, 1e-12, &g);
        let exact = (Complex64::from_polar(1.0, 3.0 * 1.9) - Complex64::from_polar(1.0, 3.0 * 0.2))
            / Complex64::new(0.0, 3.0);
        assert!((got - exact).norm() < 1e-12);
    }

    #[test]
    fn oscillation_panels_grow_with_frequency() {
        assert_eq!(oscillation_panels(0.4, 0), 1);
        assert!(oscillation_panels(0.4, 200) >= 5);
    }
}
