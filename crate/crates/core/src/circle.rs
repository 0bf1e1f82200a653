//! Compact subsets of the unit circle: finite unions of closed arcs plus
//! isolated points, with a sampling grid. Points constructed as roots of
//! unity carry their rational angle (k, K) so that powers can be reduced
//! exactly; this is what makes "residual exactly zero" checks possible.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::domain::Domain;
use crate::error::{CoreError, Result};

pub const TAU: f64 = 2.0 * PI;

/// A closed arc on 𝕋 given by its angle interval. `theta1 <= theta2`;
/// `theta2 - theta1 <= 2π`. Arcs may wrap past 2π (theta2 > 2π) after
/// normalization of the start angle into [0, 2π).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleArc {
    pub theta1: f64,
    pub theta2: f64,
}

impl CircleArc {
    pub fn new(theta1: f64, theta2: f64) -> Self {
        assert!(theta2 >= theta1, "arc endpoints out of order");
        assert!(theta2 - theta1 <= TAU + 1e-12, "arc longer than the circle");
        let start = theta1.rem_euclid(TAU);
        CircleArc { theta1: start, theta2: start + (theta2 - theta1) }
    }

    pub fn angular_length(&self) -> f64 {
        self.theta2 - self.theta1
    }

    /// Arc length in normalized measure m (m(𝕋) = 1).
    pub fn normalized_length(&self) -> f64 {
        self.angular_length() / TAU
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.theta1 + self.theta2)
    }

    pub fn contains_angle(&self, theta: f64) -> bool {
        let t = theta.rem_euclid(TAU);
        (t >= self.theta1 - 1e-12 && t <= self.theta2 + 1e-12)
            || (t + TAU >= self.theta1 - 1e-12 && t + TAU <= self.theta2 + 1e-12)
    }

    pub fn endpoints(&self) -> (Complex64, Complex64) {
        (
            Complex64::from_polar(1.0, self.theta1),
            Complex64::from_polar(1.0, self.theta2),
        )
    }

    /// Euclidean distance from a point (anywhere in the plane) to this arc.
    pub fn distance_to_point(&self, z: Complex64) -> f64 {
        let theta = z.im.atan2(z.re);
        if self.contains_angle(theta) {
            return (z.norm() - 1.0).abs();
        }
        let (a, b) = self.endpoints();
        (z - a).norm().min((z - b).norm())
    }

    /// The difference-set arc A⁻¹Γ = {γ/a} of two arcs: angles
    /// [γ₁ − a₂, γ₂ − a₁].
    pub fn difference_arc(a: &CircleArc, gamma: &CircleArc) -> CircleArc {
        CircleArc::new(gamma.theta1 - a.theta2, gamma.theta2 - a.theta1)
    }

    /// Exact sup over the arc of |z^n − 1|: the image of the arc under
    /// z ↦ z^n is again an arc (or the full circle) and the sup is attained
    /// at an endpoint or at angle π.
    pub fn power_residual_sup(&self, n: u64) -> f64 {
        let width = self.angular_length() * n as f64;
        if width >= TAU {
            return 2.0;
        }
        let t1 = (self.theta1 * n as f64).rem_euclid(TAU);
        let t2 = t1 + width;
        let image = CircleArc { theta1: t1, theta2: t2 };
        let e1 = 2.0 * (t1 / 2.0).sin().abs();
        let e2 = 2.0 * ((t2.rem_euclid(TAU)) / 2.0).sin().abs();
        if image.contains_angle(PI) {
            2.0
        } else {
            e1.max(e2)
        }
    }
}

/// A point on 𝕋. Points built from rational angles 2π·num/den keep the
/// fraction so that z^n can be reduced mod den in integer arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CirclePoint {
    pub angle: f64,
    pub rational: Option<(u64, u64)>,
}

impl CirclePoint {
    pub fn from_angle(angle: f64) -> Self {
        CirclePoint { angle: angle.rem_euclid(TAU), rational: None }
    }

    /// The root of unity e^{2πi·num/den}.
    pub fn root_of_unity(num: u64, den: u64) -> Self {
        assert!(den > 0);
        let num = num % den;
        CirclePoint { angle: TAU * num as f64 / den as f64, rational: Some((num, den)) }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(1.0, self.angle)
    }

    /// |z^n − 1|, exact (0.0) for rational angles with n·num ≡ 0 mod den.
    pub fn power_residual(&self, n: u64) -> f64 {
        match self.rational {
            Some((num, den)) => {
                let r = ((n as u128 * num as u128) % den as u128) as u64;
                if r == 0 {
                    0.0
                } else {
                    2.0 * (PI * r as f64 / den as f64).sin().abs()
                }
            }
            None => {
                let frac = (self.angle / TAU * n as f64).rem_euclid(1.0);
                2.0 * (PI * frac).sin().abs()
            }
        }
    }
}

/// A finite union of closed arcs and isolated points on 𝕋, with a sampling
/// grid. Arcs are pairwise disjoint after normalization.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct CompactCircleSet {
    pub arcs: Vec<CircleArc>,
    pub points: Vec<CirclePoint>,
    #[serde(default = "default_samples_per_arc")]
    pub samples_per_arc: usize,
}

fn default_samples_per_arc() -> usize {
    32
}

impl Serialize for CompactCircleSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        // Arcs as [θ₁, θ₂] pairs, points as angle values.
        let mut st = serializer.serialize_struct("CompactCircleSet", 2)?;
        let arcs: Vec<[f64; 2]> = self.arcs.iter().map(|a| [a.theta1, a.theta2]).collect();
        let points: Vec<f64> = self.points.iter().map(|p| p.angle).collect();
        st.serialize_field("arcs", &arcs)?;
        st.serialize_field("points", &points)?;
        st.end()
    }
}

impl CompactCircleSet {
    pub fn new(arcs: Vec<CircleArc>, points: Vec<CirclePoint>) -> Result<Self> {
        let mut set = CompactCircleSet { arcs, points, samples_per_arc: default_samples_per_arc() };
        set.normalize()?;
        Ok(set)
    }

    pub fn from_points(points: Vec<CirclePoint>) -> Self {
        CompactCircleSet { arcs: Vec::new(), points, samples_per_arc: default_samples_per_arc() }
    }

    pub fn single_point(p: CirclePoint) -> Self {
        CompactCircleSet::from_points(vec![p])
    }

    /// The K-th roots of unity with exact rational angles.
    pub fn roots_of_unity(k: u64) -> Self {
        CompactCircleSet::from_points((0..k).map(|j| CirclePoint::root_of_unity(j, k)).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty() && self.points.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.arcs.is_empty()
    }

    fn normalize(&mut self) -> Result<()> {
        self.arcs.sort_by(|a, b| a.theta1.total_cmp(&b.theta1));
        for pair in self.arcs.windows(2) {
            if pair[1].theta1 < pair[0].theta2 - 1e-12 {
                return Err(CoreError::InvalidSpec(format!(
                    "arcs overlap: [{:.6}, {:.6}] and [{:.6}, {:.6}]",
                    pair[0].theta1, pair[0].theta2, pair[1].theta1, pair[1].theta2
                )));
            }
        }
        // Wrapping overlap between the last and first arcs.
        if let (Some(first), Some(last)) = (self.arcs.first(), self.arcs.last()) {
            if self.arcs.len() > 1 && last.theta2 > TAU && last.theta2 - TAU > first.theta1 + 1e-12 {
                return Err(CoreError::InvalidSpec("arcs overlap across the wrap point".into()));
            }
        }
        Ok(())
    }

    pub fn total_normalized_arc_length(&self) -> f64 {
        self.arcs.iter().map(|a| a.normalized_length()).sum()
    }

    /// Evaluation grid: per-arc equispaced closed grids (endpoints included)
    /// plus the isolated points. Every sample lies in the set.
    pub fn sample_points(&self) -> Vec<Complex64> {
        self.sample_points_with(self.samples_per_arc)
    }

    pub fn sample_points_with(&self, per_arc: usize) -> Vec<Complex64> {
        let mut out = Vec::new();
        for arc in &self.arcs {
            let n = per_arc.max(2);
            for k in 0..n {
                let t = arc.theta1 + arc.angular_length() * (k as f64) / ((n - 1) as f64);
                out.push(Complex64::from_polar(1.0, t));
            }
        }
        out.extend(self.points.iter().map(|p| p.to_complex()));
        out
    }

    pub fn contains_angle(&self, theta: f64) -> bool {
        self.arcs.iter().any(|a| a.contains_angle(theta))
            || self
                .points
                .iter()
                .any(|p| (p.angle - theta.rem_euclid(TAU)).abs() < 1e-12)
    }

    /// Euclidean distance from z to the set.
    pub fn distance_to_point(&self, z: Complex64) -> f64 {
        let mut best = f64::INFINITY;
        for arc in &self.arcs {
            best = best.min(arc.distance_to_point(z));
        }
        for p in &self.points {
            best = best.min((z - p.to_complex()).norm());
        }
        best
    }

    /// Rotates the whole set by the unimodular factor e^{iφ}.
    pub fn rotate(&self, phi: f64) -> CompactCircleSet {
        CompactCircleSet {
            arcs: self
                .arcs
                .iter()
                .map(|a| CircleArc::new(a.theta1 + phi, a.theta2 + phi))
                .collect(),
            points: self
                .points
                .iter()
                .map(|p| CirclePoint::from_angle(p.angle + phi))
                .collect(),
            samples_per_arc: self.samples_per_arc,
        }
    }
}

/// Report of the Lemma-type arc geometry: the difference arc A⁻¹Γ, its
/// distance to the part of the circle lying in Ω, and whether a prescribed
/// test arc sits in 𝕋 ∖ Ω.
#[derive(Debug, Clone, Serialize)]
pub struct ArcGeometryReport {
    pub difference_arc: CircleArc,
    /// dist(A⁻¹Γ, closure(𝕋 ∩ Ω)), by dense sampling of 𝕋 ∩ Ω.
    pub dist_to_circle_in_domain: f64,
    pub arc_in_complement: bool,
}

/// Checks the arc configuration used by the Cauchy-kernel span machinery:
/// A⁻¹Γ must stay away from the part of 𝕋 inside Ω, and the prescribed test
/// arc must lie in 𝕋 ∖ Ω.
pub fn arc_geometry_check(
    domain: &Domain,
    a: &CircleArc,
    gamma: &CircleArc,
    test_arc: &CircleArc,
) -> ArcGeometryReport {
    let difference_arc = CircleArc::difference_arc(a, gamma);
    let n = 16384;
    let mut dist = f64::INFINITY;
    let mut any_inside = false;
    for k in 0..n {
        let theta = TAU * k as f64 / n as f64;
        let z = Complex64::from_polar(1.0, theta);
        if domain.membership(z) {
            any_inside = true;
            dist = dist.min(difference_arc.distance_to_point(z));
        }
    }
    if !any_inside {
        // 𝕋 ∩ Ω empty: the constraint is vacuous.
        dist = f64::INFINITY;
    }
    let m = 4096;
    let mut in_complement = true;
    for k in 0..=m {
        let theta = test_arc.theta1 + test_arc.angular_length() * k as f64 / m as f64;
        if domain.membership(Complex64::from_polar(1.0, theta)) {
            in_complement = false;
            break;
        }
    }
    ArcGeometryReport { difference_arc, dist_to_circle_in_domain: dist, arc_in_complement: in_complement }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arc_normalization_and_length() {
        let arc = CircleArc::new(-0.2, 0.3);
        assert!((arc.theta1 - (TAU - 0.2)).abs() < 1e-12);
        assert!((arc.angular_length() - 0.5).abs() < 1e-12);
        assert!(arc.contains_angle(0.0));
        assert!(arc.contains_angle(-0.1));
        assert!(!arc.contains_angle(1.0));
    }

    #[test]
    fn overlapping_arcs_rejected() {
        let r = CompactCircleSet::new(
            vec![CircleArc::new(0.0, 1.0), CircleArc::new(0.5, 2.0)],
            vec![],
        );
        assert!(r.is_err());
    }

    #[test]
    fn samples_lie_in_set() {
        let set = CompactCircleSet::new(
            vec![CircleArc::new(0.0, 0.5), CircleArc::new(2.0, 2.5)],
            vec![CirclePoint::from_angle(4.0)],
        )
        .unwrap();
        for z in set.sample_points() {
            assert!((z.norm() - 1.0).abs() < 1e-12);
            let theta = z.im.atan2(z.re);
            assert!(set.contains_angle(theta));
        }
    }

    #[test]
    fn rational_power_residual_is_exact() {
        let p = CirclePoint::root_of_unity(3, 8);
        assert_eq!(p.power_residual(8), 0.0);
        assert_eq!(p.power_residual(16), 0.0);
        assert!(p.power_residual(4) > 0.1);
    }

    #[test]
    fn arc_power_residual_matches_sampling() {
        let arc = CircleArc::new(0.3, 0.45);
        for n in [1u64, 3, 17, 80] {
            let exact = arc.power_residual_sup(n);
            let mut sampled = 0.0f64;
            for k in 0..=2000 {
                let t = arc.theta1 + arc.angular_length() * k as f64 / 2000.0;
                let z = Complex64::from_polar(1.0, t * n as f64);
                sampled = sampled.max((z - Complex64::ONE).norm());
            }
            assert!(exact >= sampled - 1e-9, "n={n}: exact {exact} < sampled {sampled}");
            assert!(exact <= sampled + 2e-3 * n as f64, "n={n}");
        }
    }

    #[test]
    fn difference_arc_angles() {
        let a = CircleArc::new(0.0, 0.2);
        let gamma = CircleArc::new(PI - 0.1, PI + 0.1);
        let d = CircleArc::difference_arc(&a, &gamma);
        assert!((d.theta1 - (PI - 0.3)).abs() < 1e-12);
        assert!((d.theta2 - (PI + 0.1)).abs() < 1e-12);
    }

    #[test]
    fn geometry_check_on_standard_domain() {
        let domain = Domain::standard_two_disk();
        let a = CircleArc::new(-0.15, 0.15);
        let gamma = CircleArc::new(PI - 0.2, PI + 0.2);
        let test = CircleArc::new(PI - 0.5, PI + 0.5);
        let report = arc_geometry_check(&domain, &a, &gamma, &test);
        assert!(report.arc_in_complement);
        assert!(report.dist_to_circle_in_domain > 1.0, "got {}", report.dist_to_circle_in_domain);
    }

    #[test]
    fn geometry_check_unit_disk_complement() {
        // For Ω = 𝔻 every arc of 𝕋 lies in 𝕋 ∖ Ω.
        let domain = Domain::unit_disk();
        let a = CircleArc::new(0.0, 0.2);
        let gamma = CircleArc::new(1.0, 1.3);
        let report = arc_geometry_check(&domain, &a, &gamma, &CircleArc::new(2.0, 2.8));
        assert!(report.arc_in_complement);
    }
}
