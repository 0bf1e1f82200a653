// Temporary development probe for freezing regression values. Not shipped.

use num_complex::Complex64;
use shiftlab_core::approx::*;
use shiftlab_core::area::AreaRule;
use shiftlab_core::cantor::*;
use shiftlab_core::circle::*;
use shiftlab_core::domain::Domain;
use shiftlab_core::dynamics::*;
use shiftlab_core::series::PowerSeries;

fn main() {
    let which = std::env::args().nth(1).unwrap_or_else(|| "all".into());

    if which == "peak" || which == "all" {
        probe_peaking();
    }
    if which == "kitai" || which == "all" {
        probe_kitai_decay();
    }
    if which == "expand" || which == "all" {
        probe_expansion();
    }
    if which == "demo" || which == "all" {
        probe_dirichlet_demo();
    }
    if which == "universal" || which == "all" {
        probe_universal();
    }
    if which == "menshov" || which == "all" {
        probe_menshov();
    }
    if which == "rings" {
        probe_rings();
    }
    if which == "rogo" || which == "all" {
        probe_rogosinski();
    }
    if which == "mixing" || which == "all" {
        probe_mixing();
    }
}

fn probe_peaking() {
    println!("== peaking: 16 cantor endpoints of E_2, d = 120 ==");
    let pts = cantor_endpoint_samples(2, 16).unwrap();
    let set = CompactCircleSet::from_points(pts);
    let t0 = std::time::Instant::now();
    let report = peaking_polynomial(&set, 120, 1e3, 0.25).unwrap();
    println!(
        "best {:?}: a2 |Q-1| = {:.6}, sup_E|Q| = {:.3e}, bs |Q-1| = {:.6}, lambda = {:.1e}",
        report.construction, report.a2_distance_to_one, report.sup_on_set, report.bs_distance_to_one,
        report.lambda_used
    );
    let oracle = peaking_oracle(&set, 120, 0.25).unwrap();
    println!(
        "oracle: a2 |Q-1| = {:.8}, sup_E|Q| = {:.3e}, m = {}, |q|^2 = {:.8}, bound = {:.8}, exact shifted = {:.8}, bs = {:.6}",
        oracle.a2_distance_to_one, oracle.sup_on_set, oracle.monomial_shift,
        oracle.interpolant_norm_sq, oracle.shift_bound, oracle.shifted_norm_sq,
        oracle.bs_distance_to_one
    );
    println!("elapsed {:?}", t0.elapsed());
}

fn probe_kitai_decay() {
    println!("== kitai decay on standard domain ==");
    let mut cfg = KitaiConfig::standard();
    if let Ok(d) = std::env::var("RULE_DEPTH") {
        cfg.rule_depth = d.parse().unwrap();
    }
    let tb = std::time::Instant::now();
    let rule = AreaRule::build(&cfg.domain, cfg.rule_depth);
    println!("rule nodes: {} (built in {:?}, depth {})", rule.len(), tb.elapsed(), cfg.rule_depth);
    let alpha = Complex64::from_polar(1.0, 0.05);
    let t0 = std::time::Instant::now();
    for n in [10usize, 20, 50, 100, 200] {
        use std::sync::atomic::Ordering;
        let tn = std::time::Instant::now();
        let tnorm = kitai_iterate_norm(&rule, &cfg.gamma_arc, alpha, n, 2.0);
        let snorm = kitai_right_inverse_norm(&rule, &cfg.gamma_arc, alpha, n, 2.0);
        println!(
            "n = {n:3}: |T^n f_a| = {tnorm:.6}  |S_n f_a| = {snorm:.6}  ({:?}, fallbacks {}, fixed {})",
            tn.elapsed(),
            ADAPTIVE_FALLBACKS.swap(0, Ordering::Relaxed),
            FIXED_RULE_HITS.swap(0, Ordering::Relaxed),
        );
    }
    println!("elapsed {:?}", t0.elapsed());
}

fn probe_expansion() {
    println!("== expansion residuals on standard domain ==");
    let mut cfg = KitaiConfig::standard();
    let a_half: f64 = std::env::var("A_HALF").ok().and_then(|v| v.parse().ok()).unwrap_or(0.15);
    let g_half: f64 = std::env::var("G_HALF").ok().and_then(|v| v.parse().ok()).unwrap_or(0.05);
    cfg.a_arc = CircleArc::new(-a_half, a_half);
    cfg.gamma_arc = CircleArc::new(std::f64::consts::PI - g_half, std::f64::consts::PI + g_half);
    println!("A half-width {a_half}, Gamma half-width {g_half}");
    let rule = AreaRule::build(&cfg.domain, cfg.rule_depth);
    for (name, f) in [
        ("v(z) = z", PowerSeries::monomial(Complex64::ONE, 1)),
        ("v = -1", PowerSeries::constant(-Complex64::ONE)),
    ] {
        let values = rule.tabulate(&|z| f.eval(z));
        for m in [32usize, 64, 96] {
            for ridge in [1e-9f64, 1e-12] {
                let t0 = std::time::Instant::now();
                let e = expand_in_kitai_span(
                    &cfg.domain, &rule, &values, &cfg.a_arc, &cfg.gamma_arc, m, ridge,
                )
                .unwrap();
                let cnorm: f64 = e.coefficients.iter().map(|c| c.norm()).sum();
                println!(
                    "{name}: M={m} ridge={ridge:.0e}: residual {:.4e} (rel {:.4e}), sum|c| = {:.3e}, cond {:.3e}, {:?}",
                    e.residual, e.relative_residual, cnorm, e.cond_estimate, t0.elapsed()
                );
            }
        }
    }
}

fn probe_dirichlet_demo() {
    println!("== dirichlet limit demo E = {{1}}, f = 0, h = 1 ==");
    let mut cfg = KitaiConfig::standard();
    let a_half: f64 = std::env::var("A_HALF").ok().and_then(|v| v.parse().ok()).unwrap_or(0.15);
    let g_half: f64 = std::env::var("G_HALF").ok().and_then(|v| v.parse().ok()).unwrap_or(0.05);
    let m: usize = std::env::var("M").ok().and_then(|v| v.parse().ok()).unwrap_or(40);
    cfg.a_arc = CircleArc::new(-a_half, a_half);
    cfg.gamma_arc = CircleArc::new(std::f64::consts::PI - g_half, std::f64::consts::PI + g_half);
    cfg.samples = m;
    println!("A half {a_half}, Gamma half {g_half}, M {m}");
    let set = CompactCircleSet::single_point(CirclePoint::root_of_unity(0, 1));
    let f = PowerSeries::zero();
    let h = PowerSeries::constant(Complex64::ONE);
    let t0 = std::time::Instant::now();

    // Pointwise diagnostics at z = 1.
    let rule = AreaRule::build(&cfg.domain, cfg.rule_depth);
    let d = f.sub(&h);
    let d_values = rule.tabulate(&|z| d.eval(z));
    let e = expand_in_kitai_span(&cfg.domain, &rule, &d_values, &cfg.a_arc, &cfg.gamma_arc, m, cfg.ridge).unwrap();
    let z1 = Complex64::ONE;
    let mut combo_at_1 = Complex64::ZERO;
    for (&alpha, c) in e.alphas.iter().zip(e.coefficients.iter()) {
        let kf = KitaiFunction::new(alpha, cfg.gamma_arc);
        combo_at_1 += c * kf.eval_log(z1).unwrap();
    }
    println!(
        "a2 residual {:.4e} (rel {:.4e}); pointwise r(1) = |combo(1) - d(1)| = {:.4e}",
        e.residual, e.relative_residual, (combo_at_1 - d.eval(z1)).norm()
    );

    match dirichlet_limit_demo(&f, &h, &set, &cfg, &[8, 16, 32, 64], 1e-9) {
        Ok(report) => {
            for row in &report.rows {
                println!("n = {:3}: sup_E|s_n f~ - h| = {:.6}", row.n, row.sup_residual);
            }
        }
        Err(e) => println!("error: {e}"),
    }
    println!("elapsed {:?}", t0.elapsed());
}

fn probe_universal() {
    println!("== universal builder: 3 targets on 10 cantor endpoint samples ==");
    let pts = cantor_endpoint_samples(2, 8).unwrap();
    let mut points = pts;
    // Pad to 10 with two midpoints of the level-2 kept arcs.
    let built = build_cantor(&CantorSpec::new(2, 1).unwrap()).unwrap();
    points.push(CirclePoint::from_angle(built.kept[0].midpoint()));
    points.push(CirclePoint::from_angle(built.kept[1].midpoint()));
    let set = CompactCircleSet::from_points(points);
    let m = set.points.len();
    println!("points: {m}");
    let targets: Vec<Vec<Complex64>> = vec![
        vec![Complex64::ONE; m],
        vec![-Complex64::ONE; m],
        vec![Complex64::new(0.0, 2.0); m],
    ];
    let tols = vec![0.1, 0.05, 0.025];
    let opts = BuilderOptions::for_points(BuilderSpace::A2, m);
    let result = universal_builder(&set, &targets, &PowerSeries::zero(), &tols, &opts).unwrap();
    println!("completed: {}", result.completed);
    for s in &result.stages {
        println!(
            "stage {}: n = {}, sup residual {:.3e}, block norm {:.4} (budget {:.4}), pad {}",
            s.index, s.n, s.sup_residual, s.block_norm, s.block_norm_budget, s.pad
        );
    }
    let fnorm = shiftlab_core::norms::a2_disk_norm_exact(&result.series);
    println!("|f - f0|_A2 = {fnorm:.4}, degree = {}", result.series.degree());
}

fn probe_menshov() {
    println!("== menshov: sign step, eps = 0.2, one stage ==");
    let t0 = std::time::Instant::now();
    let report = menshov_demo(&StepFunction::sign_step(), 0.2, 1, &MenshovOptions::default()).unwrap();
    println!(
        "N = {}, levels = {}, removed measure = {:.4}, samples = {}",
        report.cantor_n, report.cantor_levels, report.removed_measure, report.sample_count
    );
    for s in &report.stages {
        println!(
            "stage {}: n = {}, delta = {}, coverage = {:.4}, sup on samples = {:.3e}",
            s.stage, s.n, s.delta, s.coverage, s.sup_on_samples
        );
    }
    println!("degree {}, elapsed {:?}", report.series.degree(), t0.elapsed());
}

fn probe_rogosinski() {
    println!("== rogosinski obstruction probe ==");
    let obstructed = rogosinski_set(0.0, RogosinskiVariant::E1, 12).unwrap();
    println!("points: {}", obstructed.points.len());
    let p1 = rogosinski_probe(&obstructed, 400, 400, Complex64::ONE, 1e-10).unwrap();
    println!(
        "clustered: sup res {:.4e}, cesaro res {:.4e}, combined {:.4e}, cond {:.3e}",
        p1.sup_residual, p1.cesaro_residual, p1.combined_residual, p1.cond_estimate
    );
    // Control: 12 well-separated points (equispaced with an offset, away from 1).
    let control: Vec<CirclePoint> = (0..12)
        .map(|k| CirclePoint::from_angle(0.5 + TAU * k as f64 / 12.0 * 0.8))
        .collect();
    let control_set = CompactCircleSet::from_points(control);
    let p2 = rogosinski_probe(&control_set, 400, 400, Complex64::ONE, 1e-10).unwrap();
    println!(
        "separated: sup res {:.4e}, cesaro res {:.4e}, combined {:.4e}, cond {:.3e}",
        p2.sup_residual, p2.cesaro_residual, p2.combined_residual, p2.cond_estimate
    );
    println!("ratio: {:.2}", p1.combined_residual / p2.combined_residual);
}

fn probe_rings() {
    use nalgebra::DMatrix;
    println!("== ring-placed alpha expansion ==");
    let cfg = KitaiConfig::standard();
    let a_half: f64 = std::env::var("A_HALF").ok().and_then(|v| v.parse().ok()).unwrap_or(0.3);
    let g_half: f64 = std::env::var("G_HALF").ok().and_then(|v| v.parse().ok()).unwrap_or(0.2);
    let m_per: usize = std::env::var("M").ok().and_then(|v| v.parse().ok()).unwrap_or(16);
    let rings_env = std::env::var("RINGS").unwrap_or_else(|_| "1.0,0.95,0.9,0.85".into());
    let radii: Vec<f64> = rings_env.split(',').map(|s| s.parse().unwrap()).collect();
    let gamma = CircleArc::new(std::f64::consts::PI - g_half, std::f64::consts::PI + g_half);
    let a_arc = CircleArc::new(-a_half, a_half);
    println!("A half {a_half}, G half {g_half}, {m_per} per ring, radii {radii:?}");
    let rule = AreaRule::build(&cfg.domain, cfg.rule_depth);
    let mut alphas = Vec::new();
    for &r in &radii {
        for t in chebyshev_angles(&a_arc, m_per) {
            alphas.push(Complex64::from_polar(r, t));
        }
    }
    let m = alphas.len();
    let kernel_values: Vec<Vec<Complex64>> = alphas
        .iter()
        .map(|&alpha| rule.nodes.iter().map(|&z| {
            // branch-tracked log evaluation of f_alpha at z
            let kf = KitaiFunction::with_cap(alpha, gamma, 0);
            let _ = &kf;
            log_arc_eval(&gamma, alpha * z)
        }).collect())
        .collect();
    for (name, d) in [
        ("v = -1", PowerSeries::constant(-Complex64::ONE)),
        ("v = z", PowerSeries::monomial(Complex64::ONE, 1)),
    ] {
        let d_values = rule.tabulate(&|z| d.eval(z));
        for ridge in [1e-9f64] {
            let mut gram = DMatrix::zeros(m, m);
            for i in 0..m {
                for j in 0..=i {
                    let v = rule.inner(&kernel_values[j], &kernel_values[i]);
                    gram[(i, j)] = v;
                    gram[(j, i)] = v.conj();
                }
            }
            let rhs: Vec<Complex64> = (0..m).map(|i| rule.inner(&d_values, &kernel_values[i])).collect();
            let sol = shiftlab_core::linalg::hermitian_solve(&gram, &rhs, ridge).unwrap();
            let mut combo = vec![Complex64::ZERO; rule.len()];
            for (c, kv) in sol.solution.iter().zip(kernel_values.iter()) {
                for (s, k) in combo.iter_mut().zip(kv.iter()) {
                    *s += c * k;
                }
            }
            let diff: Vec<Complex64> = combo.iter().zip(d_values.iter()).map(|(a, b)| a - b).collect();
            let res = rule.inner(&diff, &diff).re.max(0.0).sqrt();
            let dn = rule.inner(&d_values, &d_values).re.max(0.0).sqrt();
            // pointwise at 1
            let mut at1 = Complex64::ZERO;
            for (&alpha, c) in alphas.iter().zip(sol.solution.iter()) {
                at1 += c * log_arc_eval(&gamma, alpha * Complex64::ONE);
            }
            let sumc: f64 = sol.solution.iter().map(|c| c.norm()).sum();
            println!(
                "{name}: M={m} ridge={ridge:.0e}: res {:.4e} (rel {:.4e}), r(1) = {:.4e}, sum|c| {:.2e}, cond {:.2e}",
                res, res / dn, (at1 - d.eval(Complex64::ONE)).norm(), sumc, sol.cond_estimate
            );
        }
    }
}

fn log_arc_eval(arc: &CircleArc, w: Complex64) -> Complex64 {
    // piecewise principal-branch log along the arc
    let mut total = Complex64::ZERO;
    let mut stack = vec![(arc.theta1, arc.theta2)];
    while let Some((a, b)) = stack.pop() {
        let za = Complex64::from_polar(1.0, a);
        let zb = Complex64::from_polar(1.0, b);
        let chord = (zb - za).norm();
        let piece = CircleArc { theta1: a, theta2: b };
        let dist = piece.distance_to_point(w);
        if b - a <= std::f64::consts::PI / 2.0 && chord <= 0.9 * dist {
            total += ((zb - w) / (za - w)).ln();
        } else {
            let mid = 0.5 * (a + b);
            stack.push((a, mid));
            stack.push((mid, b));
        }
    }
    total
}

fn probe_mixing() {
    println!("== general-domain mixing table ==");
    let cfg = KitaiConfig::standard();
    let u = PowerSeries::new(vec![
        Complex64::new(0.3, 0.1),
        Complex64::new(-0.2, 0.4),
        Complex64::new(0.1, 0.0),
        Complex64::new(0.0, -0.3),
        Complex64::new(0.25, 0.1),
    ]);
    let v = PowerSeries::new(vec![Complex64::new(0.5, -0.2), Complex64::new(0.3, 0.3)]);
    let t0 = std::time::Instant::now();
    match verify_mixing_domain(&u, &v, &cfg, &[8, 16, 32, 64, 128]) {
        Ok(table) => {
            println!(
                "expansion residual {:.4e}, inconclusive: {}",
                table.expansion_residual, table.inconclusive
            );
            for row in &table.rows {
                println!(
                    "n = {:3}: |w_n - u| = {:.6}  |T^n w_n - v| = {:.6}",
                    row.n, row.err_to_u, row.err_to_v
                );
            }
        }
        Err(e) => println!("error: {e}"),
    }
    println!("elapsed {:?}", t0.elapsed());
}
