//! Constructions of the exceptional boundary sets: the Cantor-type sets
//! E_{N,J} obtained by successive cancellation of centered open arcs, their
//! measure and Carleson-sum bookkeeping, Dirichlet-set detection by exact
//! power residuals, and the Rogosinski obstruction sets.

use serde::Serialize;

use crate::circle::{CircleArc, CirclePoint, CompactCircleSet, TAU};
use crate::error::{CoreError, Result};

/// Parameters of the Cantor construction: at level j, each of the 2^j
/// current closed arcs loses its centered open arc of normalized length
/// m_{N,j} = 2^{-j}(N+j)^{-2}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CantorSpec {
    pub n: u32,
    pub levels: usize,
}

impl CantorSpec {
    pub fn new(n: u32, levels: usize) -> Result<Self> {
        if n < 2 {
            return Err(CoreError::InvalidSpec("cantor parameter N must be >= 2".into()));
        }
        let spec = CantorSpec { n, levels };
        let removed: f64 = (0..=levels).map(|j| spec.removed_each_total(j)).sum();
        if removed >= 1.0 {
            return Err(CoreError::InvalidSpec(format!(
                "removed measure {removed} through level {levels} exceeds the circle"
            )));
        }
        Ok(spec)
    }

    /// Normalized length of one removed arc at level j.
    pub fn removed_length(&self, level: usize) -> f64 {
        0.5f64.powi(level as i32) / ((self.n as f64 + level as f64) * (self.n as f64 + level as f64))
    }

    /// Total normalized measure removed at level j (2^j arcs).
    pub fn removed_each_total(&self, level: usize) -> f64 {
        1.0 / ((self.n as f64 + level as f64) * (self.n as f64 + level as f64))
    }
}

/// Removed open arc, tagged with its level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RemovedArc {
    pub level: usize,
    pub arc: CircleArc,
}

/// Per-level bookkeeping of the construction.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CantorLevelStat {
    pub level: usize,
    /// Number of closed arcs after this level's cancellation.
    pub arcs: u64,
    /// Normalized length of each closed arc after this level.
    pub arc_length: f64,
    /// Cumulative removed measure through this level.
    pub removed_cumulative: f64,
    /// Closed form Σ_{j<=level} (N+j)^{-2}.
    pub removed_closed_form: f64,
    /// Cumulative Carleson sum Σ m(B) log(1/m(B)) through this level.
    pub carleson_cumulative: f64,
    /// The divergence lower bound log(2)·Σ_{j<=level} j/(N+j)^2.
    pub carleson_lower_bound: f64,
}

/// The materialized construction at a fixed level.
#[derive(Debug, Clone, Serialize)]
pub struct CantorConstruction {
    pub spec: CantorSpec,
    /// The 2^{J+1} closed arcs of E_{N,J}.
    pub kept: Vec<CircleArc>,
    /// Every removed open arc with its level.
    pub removed: Vec<RemovedArc>,
    pub stats: Vec<CantorLevelStat>,
}

/// Builds E_{N,J} starting from the full circle as the single closed arc
/// [0, 2π]. Halts with the offending level if a removed arc does not fit.
pub fn build_cantor(spec: &CantorSpec) -> Result<CantorConstruction> {
    let mut kept: Vec<(f64, f64)> = vec![(0.0, TAU)];
    let mut removed = Vec::new();
    for level in 0..=spec.levels {
        let m = spec.removed_length(level) * TAU;
        let host_len = kept[0].1 - kept[0].0;
        if m >= host_len {
            return Err(CoreError::ArcUnderflow {
                level,
                removed: m / TAU,
                host: host_len / TAU,
            });
        }
        let mut next = Vec::with_capacity(kept.len() * 2);
        for &(a, b) in &kept {
            let mid = 0.5 * (a + b);
            let left_end = mid - 0.5 * m;
            let right_start = mid + 0.5 * m;
            removed.push(RemovedArc { level, arc: raw_arc(left_end, right_start) });
            next.push((a, left_end));
            next.push((right_start, b));
        }
        kept = next;
    }
    let stats = cantor_level_stats(spec);
    Ok(CantorConstruction {
        spec: *spec,
        kept: kept.iter().map(|&(a, b)| raw_arc(a, b)).collect(),
        removed,
        stats,
    })
}

// Arcs from the recursion are already inside [0, 2π]; keep raw angles so
// endpoints stay bit-identical with the bookkeeping.
fn raw_arc(theta1: f64, theta2: f64) -> CircleArc {
    CircleArc { theta1, theta2 }
}

/// Closed-form per-level bookkeeping (no materialization); usable to deep
/// levels where 2^{J+1} arcs would be wasteful.
pub fn cantor_level_stats(spec: &CantorSpec) -> Vec<CantorLevelStat> {
    let mut stats = Vec::with_capacity(spec.levels + 1);
    let mut arc_length = 1.0f64;
    let mut removed_cum = 0.0;
    let mut closed_form = 0.0;
    let mut carleson = 0.0;
    let mut lower = 0.0;
    for level in 0..=spec.levels {
        let m = spec.removed_length(level);
        let count = 2f64.powi(level as i32);
        arc_length = 0.5 * (arc_length - m);
        removed_cum += count * m;
        closed_form += spec.removed_each_total(level);
        carleson += count * m * (1.0 / m).ln();
        lower += 2f64.ln() * level as f64 / ((spec.n as f64 + level as f64).powi(2));
        stats.push(CantorLevelStat {
            level,
            arcs: 2u64.pow(level as u32 + 1),
            arc_length,
            removed_cumulative: removed_cum,
            removed_closed_form: closed_form,
            carleson_cumulative: carleson,
            carleson_lower_bound: lower,
        });
    }
    stats
}

/// Σ over removed arcs of m(B)·log(1/m(B)), the Carleson functional partial
/// sum. Lengths are normalized; each must lie in (0, 1).
pub fn carleson_partial(removed: &[RemovedArc]) -> Result<f64> {
    let mut acc = 0.0;
    for r in removed {
        let m = r.arc.normalized_length();
        if m <= 0.0 || m >= 1.0 {
            return Err(CoreError::InvalidSpec(format!(
                "removed arc has normalized length {m}, outside (0, 1)"
            )));
        }
        acc += m * (1.0 / m).ln();
    }
    Ok(acc)
}

impl CantorConstruction {
    /// The level-J family as a circle set (arcs only).
    pub fn to_circle_set(&self) -> CompactCircleSet {
        CompactCircleSet::new(self.kept.clone(), vec![]).expect("cantor arcs are disjoint")
    }

    /// The removed arcs as a circle set.
    pub fn removed_circle_set(&self) -> CompactCircleSet {
        CompactCircleSet::new(self.removed.iter().map(|r| r.arc).collect(), vec![])
            .expect("removed arcs are disjoint")
    }

    /// Endpoints of the kept arcs: genuine points of the limit Cantor set
    /// (cancellations never touch endpoints), measure-zero by finiteness.
    /// The wrap pair 0 ≡ 2π is one circle point and is reported once.
    pub fn endpoints(&self) -> Vec<CirclePoint> {
        let mut pts = Vec::with_capacity(self.kept.len() * 2);
        for arc in &self.kept {
            pts.push(CirclePoint::from_angle(arc.theta1));
            if arc.theta2 < TAU {
                pts.push(CirclePoint::from_angle(arc.theta2));
            }
        }
        pts
    }

    /// One endpoint per kept arc (the left one): pairwise distinct points of
    /// the Cantor set, one for each of the 2^{J+1} arcs.
    pub fn left_endpoints(&self) -> Vec<CirclePoint> {
        self.kept
            .iter()
            .map(|arc| CirclePoint::from_angle(arc.theta1))
            .collect()
    }

    /// Total kept measure plus total removed measure; equals 1 up to
    /// accumulation error.
    pub fn measure_balance(&self) -> f64 {
        let kept: f64 = self.kept.iter().map(|a| a.normalized_length()).sum();
        let removed: f64 = self.removed.iter().map(|r| r.arc.normalized_length()).sum();
        kept + removed
    }
}

/// `count` pairwise-distinct endpoint samples of E_{N,·}: the left endpoints
/// of the level with `count` arcs (count a power of two, at least 4).
pub fn cantor_endpoint_samples(n: u32, count: usize) -> Result<Vec<CirclePoint>> {
    if count < 4 || !count.is_power_of_two() {
        return Err(CoreError::InvalidSpec(
            "endpoint sample count must be a power of two, at least 4".into(),
        ));
    }
    // The level-J family has 2^{J+1} arcs.
    let levels = count.trailing_zeros() as usize - 1;
    let spec = CantorSpec::new(n, levels)?;
    let built = build_cantor(&spec)?;
    Ok(built.left_endpoints())
}

/// One Dirichlet-search hit: an exponent with its sup residual on the set.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DirichletHit {
    pub n: u64,
    pub residual: f64,
}

/// All n ≤ n_max with sup_E |z^n − 1| ≤ δ, sorted by residual then n.
/// Residuals are exact: rational-angle points reduce mod their denominator,
/// and arc suprema are computed from the image arc of z ↦ z^n (a genuine
/// arc stops qualifying as soon as n stretches it past the tolerance, which
/// is the reason Dirichlet sets must be small).
pub fn dirichlet_search(set: &CompactCircleSet, n_max: u64, delta: f64) -> Result<Vec<DirichletHit>> {
    if set.is_empty() {
        return Err(CoreError::EmptySet);
    }
    if delta <= 0.0 {
        return Err(CoreError::InvalidSpec("dirichlet tolerance must be positive".into()));
    }
    let mut hits = Vec::new();
    for n in 1..=n_max {
        let r = power_residual(set, n);
        if r <= delta {
            hits.push(DirichletHit { n, residual: r });
        }
    }
    hits.sort_by(|a, b| a.residual.total_cmp(&b.residual).then(a.n.cmp(&b.n)));
    Ok(hits)
}

/// sup over the set of |z^n − 1| (exact, see [`dirichlet_search`]).
pub fn power_residual(set: &CompactCircleSet, n: u64) -> f64 {
    let mut worst = 0.0f64;
    for p in &set.points {
        worst = worst.max(p.power_residual(n));
    }
    for a in &set.arcs {
        worst = worst.max(a.power_residual_sup(n));
    }
    worst
}

/// Successive minima of n ↦ sup_E |z^n − 1|: every n whose residual beats
/// all smaller exponents. For a single irrational point these are the
/// continued-fraction denominators.
pub fn residual_records(set: &CompactCircleSet, n_max: u64) -> Vec<DirichletHit> {
    let mut records = Vec::new();
    let mut best = f64::INFINITY;
    for n in 1..=n_max {
        let r = power_residual(set, n);
        if r < best {
            best = r;
            records.push(DirichletHit { n, residual: r });
        }
    }
    records
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RogosinskiVariant {
    /// E_1 = {e^{±πi/(2k)} : k ∈ ℕ} ∪ {1}.
    E1,
    /// E_N = {e^{πi/k} : k ≥ N} ∪ {1}.
    EN(u32),
}

/// The rotated obstruction set ζ·E_variant truncated at k_max, accumulation
/// point ζ included. For ζ = 1 the points keep exact rational angles.
pub fn rogosinski_set(zeta_angle: f64, variant: RogosinskiVariant, k_max: u32) -> Result<CompactCircleSet> {
    if k_max == 0 {
        return Err(CoreError::InvalidSpec("k_max must be positive".into()));
    }
    let mut points = Vec::new();
    match variant {
        RogosinskiVariant::E1 => {
            for k in 1..=k_max {
                // ±π/(2k) = ±2π/(4k).
                points.push(CirclePoint::root_of_unity(1, 4 * k as u64));
                points.push(CirclePoint::root_of_unity(4 * k as u64 - 1, 4 * k as u64));
            }
        }
        RogosinskiVariant::EN(n) => {
            if n == 0 {
                return Err(CoreError::InvalidSpec("E_N needs N >= 1".into()));
            }
            for k in n..=k_max {
                points.push(CirclePoint::root_of_unity(1, 2 * k as u64));
            }
        }
    }
    points.push(CirclePoint::root_of_unity(0, 1));
    let set = CompactCircleSet::from_points(points);
    if zeta_angle == 0.0 {
        Ok(set)
    } else {
        Ok(set.rotate(zeta_angle))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn level_zero_removes_quarter_for_n2() {
        let spec = CantorSpec::new(2, 0).unwrap();
        let built = build_cantor(&spec).unwrap();
        assert_eq!(built.kept.len(), 2);
        assert_eq!(built.removed.len(), 1);
        assert!((built.removed[0].arc.normalized_length() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn arc_count_and_measure_bookkeeping() {
        let spec = CantorSpec::new(2, 8).unwrap();
        let built = build_cantor(&spec).unwrap();
        assert_eq!(built.kept.len(), 1 << 9);
        assert!((built.measure_balance() - 1.0).abs() < 1e-12);
        // Removed cumulative equals closed form at every level.
        for stat in &built.stats {
            assert!(
                (stat.removed_cumulative - stat.removed_closed_form).abs() < 1e-12,
                "level {}",
                stat.level
            );
        }
    }

    #[test]
    fn materialized_matches_stats() {
        let spec = CantorSpec::new(3, 6).unwrap();
        let built = build_cantor(&spec).unwrap();
        let last = built.stats.last().unwrap();
        let removed_sum: f64 = built.removed.iter().map(|r| r.arc.normalized_length()).sum();
        assert!((removed_sum - last.removed_cumulative).abs() < 1e-12);
        let kept_each = built.kept[0].normalized_length();
        assert!((kept_each - last.arc_length).abs() < 1e-12);
        assert!(built.kept.iter().all(|a| (a.normalized_length() - kept_each).abs() < 1e-12));
    }

    #[test]
    fn nesting_between_levels() {
        let coarse = build_cantor(&CantorSpec::new(2, 3).unwrap()).unwrap();
        let fine = build_cantor(&CantorSpec::new(2, 4).unwrap()).unwrap();
        for arc in &fine.kept {
            assert!(
                coarse
                    .kept
                    .iter()
                    .any(|host| host.theta1 <= arc.theta1 + 1e-12 && arc.theta2 <= host.theta2 + 1e-12),
                "level-5 arc not nested"
            );
        }
    }

    #[test]
    fn carleson_sum_level_zero() {
        let spec = CantorSpec::new(2, 0).unwrap();
        let built = build_cantor(&spec).unwrap();
        let got = carleson_partial(&built.removed).unwrap();
        assert!((got - 0.25 * 4.0f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn carleson_exceeds_lower_bound_and_increases() {
        for n in [2u32, 3, 5] {
            let stats = cantor_level_stats(&CantorSpec::new(n, 20).unwrap());
            let mut last = 0.0;
            for stat in &stats {
                assert!(stat.carleson_cumulative >= stat.carleson_lower_bound);
                assert!(stat.carleson_cumulative >= last);
                last = stat.carleson_cumulative;
            }
        }
    }

    #[test]
    fn dirichlet_roots_of_unity() {
        let set = CompactCircleSet::roots_of_unity(8);
        let hits = dirichlet_search(&set, 40, 1e-12).unwrap();
        let ns: Vec<u64> = hits.iter().map(|h| h.n).collect();
        let mut expected: Vec<u64> = (1..=5).map(|k| 8 * k).collect();
        expected.sort();
        let mut sorted = ns.clone();
        sorted.sort();
        assert_eq!(sorted, expected);
        assert!(hits.iter().all(|h| h.residual == 0.0));
    }

    #[test]
    fn dirichlet_single_point_one() {
        let set = CompactCircleSet::single_point(CirclePoint::root_of_unity(0, 1));
        let hits = dirichlet_search(&set, 10, 1e-15).unwrap();
        assert_eq!(hits.len(), 10);
        assert!(hits.iter().all(|h| h.residual == 0.0));
    }

    #[test]
    fn golden_ratio_records_are_fibonacci() {
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        let set = CompactCircleSet::single_point(CirclePoint::from_angle(TAU * phi));
        let records = residual_records(&set, 1000);
        let ns: Vec<u64> = records.iter().map(|r| r.n).collect();
        assert_eq!(ns, vec![1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233, 377, 610, 987]);
    }

    #[test]
    fn dirichlet_poisoned_by_irrational_point() {
        // Roots of unity plus one golden-angle point: no exact hits remain.
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        let mut points: Vec<CirclePoint> = (0..4).map(|j| CirclePoint::root_of_unity(j, 4)).collect();
        points.push(CirclePoint::from_angle(TAU * phi));
        let set = CompactCircleSet::from_points(points);
        let hits = dirichlet_search(&set, 2000, 1e-6).unwrap();
        assert!(hits.is_empty(), "irrational point should poison exact recurrence");
        let floor = (1..=2000u64)
            .map(|n| power_residual(&set, n))
            .fold(f64::INFINITY, f64::min);
        assert!(floor > 1e-6);
    }

    #[test]
    fn rogosinski_e1_small() {
        let set = rogosinski_set(0.0, RogosinskiVariant::E1, 2).unwrap();
        let mut angles: Vec<f64> = set.points.iter().map(|p| p.angle).collect();
        angles.sort_by(f64::total_cmp);
        let mut expected = [PI / 2.0, TAU - PI / 2.0, PI / 4.0, TAU - PI / 4.0, 0.0].to_vec();
        expected.sort_by(f64::total_cmp);
        assert_eq!(angles.len(), 5);
        for (a, e) in angles.iter().zip(expected.iter()) {
            assert!((a - e).abs() < 1e-12);
        }
    }

    #[test]
    fn rogosinski_en_small() {
        let set = rogosinski_set(0.0, RogosinskiVariant::EN(5), 8).unwrap();
        let mut angles: Vec<f64> = set.points.iter().map(|p| p.angle).collect();
        angles.sort_by(f64::total_cmp);
        let mut expected = vec![0.0, PI / 8.0, PI / 7.0, PI / 6.0, PI / 5.0];
        expected.sort_by(f64::total_cmp);
        assert_eq!(angles.len(), 5);
        for (a, e) in angles.iter().zip(expected.iter()) {
            assert!((a - e).abs() < 1e-12);
        }
    }

    #[test]
    fn rogosinski_accumulates_at_zeta() {
        let set = rogosinski_set(1.2, RogosinskiVariant::E1, 40, ).unwrap();
        // Smallest |angle − ζ| shrinks with k; the accumulation point itself is ζ·1.
        assert!(set.points.iter().any(|p| (p.angle - 1.2).abs() < 1e-12));
        let nearest = set
            .points
            .iter()
            .map(|p| (p.angle - 1.2).abs())
            .filter(|d| *d > 1e-12)
            .fold(f64::INFINITY, f64::min);
        assert!(nearest < PI / 60.0);
    }

    #[test]
    fn invalid_n_rejected() {
        assert!(CantorSpec::new(1, 3).is_err());
        assert!(CantorSpec::new(0, 0).is_err());
    }

    #[test]
    fn underflow_reported_with_level() {
        // N = 1 escapes validation only through raw construction; its level-0
        // removal of length 1 cannot fit in the unit-length host arc.
        let raw = CantorSpec { n: 1, levels: 2 };
        match build_cantor(&raw) {
            Err(CoreError::ArcUnderflow { level, .. }) => assert_eq!(level, 0),
            other => panic!("expected underflow, got {other:?}"),
        }
    }
}
