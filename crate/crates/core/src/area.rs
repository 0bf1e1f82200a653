//! Area quadrature over plane domains by adaptive cell subdivision of the
//! bounding box. Cells fully inside the domain carry tensor Gauss rules and
//! split while the 8×8 vs 16×16 estimates disagree; cells straddling the
//! boundary split to a depth limit and are then integrated with a masked
//! midpoint rule, with the leftover bounded by cell area times the local
//! max of the integrand. All traversal and summation is in a fixed cell
//! order, so results do not depend on caller parallelism.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::domain::{CellClass, Domain, Rect};
use crate::quad::gauss_legendre;

/// Result of an adaptive area integration.
#[derive(Debug, Clone, Copy)]
pub struct AreaIntegral {
    pub value: f64,
    /// Sum of per-cell error indicators plus boundary remainder bounds.
    pub est_error: f64,
    pub cells: usize,
    pub converged: bool,
    /// Estimate from the previous refinement sweep (reported when the
    /// tolerance was not met).
    pub prev: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct AreaConfig {
    /// Relative tolerance target for ∫ g dλ₂.
    pub tol: f64,
    /// Depth limit for boundary-cell splitting.
    pub max_boundary_depth: usize,
    /// Depth limit for interior splitting.
    pub max_interior_depth: usize,
}

impl Default for AreaConfig {
    fn default() -> Self {
        AreaConfig { tol: 1e-4, max_boundary_depth: 12, max_interior_depth: 24 }
    }
}

/// ∫_Ω g dλ₂ for a nonnegative integrand g (|f|^p in all callers), by
/// adaptive subdivision. Determinism: recursion in fixed child order,
/// sequential accumulation.
pub fn area_integral<F: Fn(Complex64) -> f64 + Sync>(
    domain: &Domain,
    g: &F,
    config: &AreaConfig,
) -> AreaIntegral {
    let bbox = domain.bbox();
    // Coarse masked estimate fixes the absolute tolerance scale.
    let rough = masked_tensor(domain, &bbox, 16, g).0.max(1e-12);
    let mut tol_abs = config.tol * rough;
    let mut prev = rough;
    let mut last = AreaIntegral { value: rough, est_error: f64::INFINITY, cells: 1, converged: false, prev };
    // Up to three sweeps: the absolute budget is re-anchored on the newest
    // value estimate, which matters when the coarse pass is far off.
    for _ in 0..3 {
        let mut acc = Accumulator { value: 0.0, err: 0.0, cells: 0 };
        integrate_cell(domain, &bbox, g, config, tol_abs, 0, &mut acc);
        prev = last.value;
        last = AreaIntegral {
            value: acc.value,
            est_error: acc.err,
            cells: acc.cells,
            converged: acc.err <= config.tol * acc.value.abs().max(1e-300),
            prev,
        };
        let new_tol_abs = config.tol * acc.value.abs().max(1e-12);
        if last.converged || (new_tol_abs - tol_abs).abs() <= 0.5 * tol_abs {
            break;
        }
        tol_abs = new_tol_abs;
    }
    last
}

struct Accumulator {
    value: f64,
    err: f64,
    cells: usize,
}

fn integrate_cell<F: Fn(Complex64) -> f64>(
    domain: &Domain,
    cell: &Rect,
    g: &F,
    config: &AreaConfig,
    tol_abs: f64,
    depth: usize,
    acc: &mut Accumulator,
) {
    match domain.classify(cell) {
        CellClass::Outside => {
            acc.cells += 1;
        }
        CellClass::Inside => {
            let coarse = tensor_gauss(cell, 8, g);
            let fine = tensor_gauss(cell, 16, g);
            let err = (fine - coarse).abs();
            let budget = tol_abs * cell.area() / domain.bbox().area();
            if err <= budget || depth >= config.max_interior_depth {
                acc.value += fine;
                acc.err += err;
                acc.cells += 1;
            } else {
                for child in cell.split() {
                    integrate_cell(domain, &child, g, config, tol_abs, depth + 1, acc);
                }
            }
        }
        CellClass::Boundary => {
            if depth < config.max_boundary_depth {
                for child in cell.split() {
                    integrate_cell(domain, &child, g, config, tol_abs, depth + 1, acc);
                }
            } else {
                let k = 32usize;
                let (value, maxg, _inside_fraction) = masked_midpoint(domain, cell, k, g);
                acc.value += value;
                // The boundary crosses at most ~√2·K of the K² mask
                // subcells, so the misclassified band is ≤ 1.5/K of the
                // cell area.
                acc.err += cell.area() * (1.5 / k as f64) * maxg;
                acc.cells += 1;
            }
        }
    }
}

fn tensor_gauss<F: Fn(Complex64) -> f64>(cell: &Rect, n: usize, g: &F) -> f64 {
    let (nodes, weights) = gauss_legendre(n);
    let hx = 0.5 * cell.width();
    let hy = 0.5 * cell.height();
    let cx = 0.5 * (cell.x0 + cell.x1);
    let cy = 0.5 * (cell.y0 + cell.y1);
    let mut acc = 0.0;
    for (xi, wi) in nodes.iter().zip(weights.iter()) {
        let x = cx + hx * xi;
        for (yj, wj) in nodes.iter().zip(weights.iter()) {
            acc += wi * wj * g(Complex64::new(x, cy + hy * yj));
        }
    }
    acc * hx * hy
}

fn masked_tensor<F: Fn(Complex64) -> f64>(domain: &Domain, cell: &Rect, n: usize, g: &F) -> (f64, f64) {
    let (nodes, weights) = gauss_legendre(n);
    let hx = 0.5 * cell.width();
    let hy = 0.5 * cell.height();
    let cx = 0.5 * (cell.x0 + cell.x1);
    let cy = 0.5 * (cell.y0 + cell.y1);
    let mut acc = 0.0;
    let mut maxg = 0.0f64;
    for (xi, wi) in nodes.iter().zip(weights.iter()) {
        let x = cx + hx * xi;
        for (yj, wj) in nodes.iter().zip(weights.iter()) {
            let z = Complex64::new(x, cy + hy * yj);
            if domain.membership(z) {
                let v = g(z);
                maxg = maxg.max(v);
                acc += wi * wj * v;
            }
        }
    }
    (acc * hx * hy, maxg)
}

fn masked_midpoint<F: Fn(Complex64) -> f64>(
    domain: &Domain,
    cell: &Rect,
    k: usize,
    g: &F,
) -> (f64, f64, f64) {
    let dx = cell.width() / k as f64;
    let dy = cell.height() / k as f64;
    let w = dx * dy;
    let mut acc = 0.0;
    let mut maxg = 0.0f64;
    let mut inside = 0usize;
    for i in 0..k {
        let x = cell.x0 + (i as f64 + 0.5) * dx;
        for j in 0..k {
            let z = Complex64::new(x, cell.y0 + (j as f64 + 0.5) * dy);
            if domain.membership(z) {
                let v = g(z);
                maxg = maxg.max(v);
                acc += w * v;
                inside += 1;
            }
        }
    }
    (acc, maxg, inside as f64 / (k * k) as f64)
}

/// A reusable discrete rule Σ w_i g(z_i) ≈ ∫_Ω g dλ₂ with all nodes strictly
/// inside Ω. Interior cells are graded toward the boundary (cell size at
/// most half the distance to ∂Ω) so integrands with boundary singularities
/// of log type are resolved.
#[derive(Debug, Clone)]
pub struct AreaRule {
    pub nodes: Vec<Complex64>,
    pub weights: Vec<f64>,
    /// Total area of the leftover boundary band not represented by nodes.
    pub boundary_band_area: f64,
}

impl AreaRule {
    /// Builds the rule at the given boundary depth. `coarse_cap` limits the
    /// size of interior cells relative to the bounding box.
    pub fn build(domain: &Domain, boundary_depth: usize) -> AreaRule {
        let bbox = domain.bbox();
        let coarse_cap = bbox.width().max(bbox.height()) / 16.0;
        let mut rule = AreaRule { nodes: Vec::new(), weights: Vec::new(), boundary_band_area: 0.0 };
        build_cells(domain, &bbox, boundary_depth, coarse_cap, 0, &mut rule);
        rule
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Σ w_i g(z_i); parallel evaluation with in-order reduction.
    pub fn integrate<F: Fn(Complex64) -> f64 + Sync>(&self, g: &F) -> f64 {
        let chunks: Vec<f64> = self
            .nodes
            .par_chunks(4096)
            .zip(self.weights.par_chunks(4096))
            .map(|(zs, ws)| {
                zs.iter()
                    .zip(ws.iter())
                    .map(|(&z, &w)| w * g(z))
                    .sum::<f64>()
            })
            .collect();
        chunks.iter().sum()
    }

    /// Evaluates a complex-valued function on all nodes (parallel, ordered).
    pub fn tabulate<F: Fn(Complex64) -> Complex64 + Sync>(&self, f: &F) -> Vec<Complex64> {
        self.nodes.par_iter().map(|&z| f(z)).collect()
    }

    /// ⟨f, g⟩ = Σ w_i f(z_i) conj(g(z_i)) from tabulated values.
    pub fn inner(&self, f: &[Complex64], g: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::ZERO;
        for ((w, a), b) in self.weights.iter().zip(f.iter()).zip(g.iter()) {
            acc += w * a * b.conj();
        }
        acc
    }

    /// (Σ w_i |v_i|^p)^{1/p} from tabulated values.
    pub fn norm_p(&self, values: &[Complex64], p: f64) -> f64 {
        let mut acc = 0.0;
        for (w, v) in self.weights.iter().zip(values.iter()) {
            acc += w * v.norm().powf(p);
        }
        acc.powf(1.0 / p)
    }
}

fn build_cells(domain: &Domain, cell: &Rect, boundary_depth: usize, coarse_cap: f64, depth: usize, rule: &mut AreaRule) {
    match domain.classify(cell) {
        CellClass::Outside => {}
        CellClass::Inside => {
            let size = cell.width().max(cell.height());
            let graded = size <= domain.boundary_distance_lower(cell.center());
            if size <= coarse_cap && (graded || depth >= boundary_depth) {
                push_tensor_nodes(cell, 8, rule);
            } else {
                for child in cell.split() {
                    build_cells(domain, &child, boundary_depth, coarse_cap, depth + 1, rule);
                }
            }
        }
        CellClass::Boundary => {
            if depth < boundary_depth {
                for child in cell.split() {
                    build_cells(domain, &child, boundary_depth, coarse_cap, depth + 1, rule);
                }
            } else {
                let k = 6usize;
                let dx = cell.width() / k as f64;
                let dy = cell.height() / k as f64;
                let w = dx * dy;
                let mut covered = 0usize;
                for i in 0..k {
                    let x = cell.x0 + (i as f64 + 0.5) * dx;
                    for j in 0..k {
                        let z = Complex64::new(x, cell.y0 + (j as f64 + 0.5) * dy);
                        if domain.membership(z) {
                            rule.nodes.push(z);
                            rule.weights.push(w);
                            covered += 1;
                        }
                    }
                }
                let _ = covered;
                rule.boundary_band_area += cell.area() * (2.0 / k as f64);
            }
        }
    }
}

fn push_tensor_nodes(cell: &Rect, n: usize, rule: &mut AreaRule) {
    let (nodes, weights) = gauss_legendre(n);
    let hx = 0.5 * cell.width();
    let hy = 0.5 * cell.height();
    let cx = 0.5 * (cell.x0 + cell.x1);
    let cy = 0.5 * (cell.y0 + cell.y1);
    for (xi, wi) in nodes.iter().zip(weights.iter()) {
        for (yj, wj) in nodes.iter().zip(weights.iter()) {
            rule.nodes.push(Complex64::new(cx + hx * xi, cy + hy * yj));
            rule.weights.push(wi * wj * hx * hy);
        }
    }
}
