//! Bounded plane domains with a membership oracle, bounding box, exact cell
//! classification (inside / outside / straddling the boundary) and a lower
//! bound on the distance to the boundary. These are the geometric inputs of
//! the area quadrature.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

const BOUNDARY_TOL: f64 = 1e-12;

/// Axis-aligned rectangle used as a quadrature cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    pub fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.x0, self.y0),
            Complex64::new(self.x1, self.y0),
            Complex64::new(self.x1, self.y1),
            Complex64::new(self.x0, self.y1),
        ]
    }

    pub fn split(&self) -> [Rect; 4] {
        let xm = 0.5 * (self.x0 + self.x1);
        let ym = 0.5 * (self.y0 + self.y1);
        [
            Rect { x0: self.x0, x1: xm, y0: self.y0, y1: ym },
            Rect { x0: xm, x1: self.x1, y0: self.y0, y1: ym },
            Rect { x0: self.x0, x1: xm, y0: ym, y1: self.y1 },
            Rect { x0: xm, x1: self.x1, y0: ym, y1: self.y1 },
        ]
    }

    /// Distance from a point to this rectangle (0 when inside).
    fn distance_to(&self, z: Complex64) -> f64 {
        let dx = (self.x0 - z.re).max(0.0).max(z.re - self.x1);
        let dy = (self.y0 - z.im).max(0.0).max(z.im - self.y1);
        (dx * dx + dy * dy).sqrt()
    }

    /// Largest distance from a point to the rectangle's corners.
    fn max_corner_distance(&self, z: Complex64) -> f64 {
        self.corners()
            .iter()
            .map(|c| (c - z).norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellClass {
    Inside,
    Outside,
    Boundary,
}

/// A bounded plane domain Ω. `TwoDiskUnion` with proper overlap is a Jordan
/// domain; `PolygonJordan` is given by its vertex list (positively or
/// negatively oriented, membership is by winding parity of the crossing
/// test).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    UnitDisk,
    Disk { center: [f64; 2], radius: f64 },
    TwoDiskUnion { c1: [f64; 2], r1: f64, c2: [f64; 2], r2: f64 },
    PolygonJordan { vertices: Vec<[f64; 2]> },
}

impl Domain {
    pub fn unit_disk() -> Self {
        Domain::UnitDisk
    }

    pub fn disk(center: Complex64, radius: f64) -> Result<Self> {
        if radius <= 0.0 {
            return Err(CoreError::InvalidSpec("disk radius must be positive".into()));
        }
        Ok(Domain::Disk { center: [center.re, center.im], radius })
    }

    /// Union of two overlapping disks. The overlap conditions (circles
    /// intersect, neither disk contains the other) make the union a Jordan
    /// domain.
    pub fn two_disk_union(c1: Complex64, r1: f64, c2: Complex64, r2: f64) -> Result<Self> {
        if r1 <= 0.0 || r2 <= 0.0 {
            return Err(CoreError::InvalidSpec("disk radii must be positive".into()));
        }
        let d = (c1 - c2).norm();
        if d >= r1 + r2 {
            return Err(CoreError::DomainRejected(format!(
                "disks do not overlap: |c1-c2| = {d:.6} >= r1+r2 = {:.6}",
                r1 + r2
            )));
        }
        if d + r2 <= r1 || d + r1 <= r2 {
            return Err(CoreError::DomainRejected(
                "one disk contains the other; the union is a plain disk".into(),
            ));
        }
        Ok(Domain::TwoDiskUnion { c1: [c1.re, c1.im], r1, c2: [c2.re, c2.im], r2 })
    }

    pub fn polygon(vertices: Vec<Complex64>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(CoreError::InvalidSpec("polygon needs at least 3 vertices".into()));
        }
        Ok(Domain::PolygonJordan { vertices: vertices.iter().map(|v| [v.re, v.im]).collect() })
    }

    /// The standard two-disk test configuration 𝔻 ∪ D(1, 0.3).
    pub fn standard_two_disk() -> Self {
        Domain::two_disk_union(Complex64::ZERO, 1.0, Complex64::new(1.0, 0.0), 0.3)
            .expect("standard configuration is a valid union")
    }

    pub fn membership(&self, z: Complex64) -> bool {
        match self {
            Domain::UnitDisk => z.norm_sqr() < 1.0 - BOUNDARY_TOL,
            Domain::Disk { center, radius } => {
                (z - complex(center)).norm() < radius - BOUNDARY_TOL
            }
            Domain::TwoDiskUnion { c1, r1, c2, r2 } => {
                (z - complex(c1)).norm() < r1 - BOUNDARY_TOL
                    || (z - complex(c2)).norm() < r2 - BOUNDARY_TOL
            }
            Domain::PolygonJordan { vertices } => polygon_contains(vertices, z),
        }
    }

    pub fn contains_origin(&self) -> bool {
        self.membership(Complex64::ZERO)
    }

    /// Requires 0 ∈ Ω, as the shift experiments do.
    pub fn require_origin(&self) -> Result<()> {
        if self.contains_origin() {
            Ok(())
        } else {
            Err(CoreError::DomainRejected("0 must lie in the domain".into()))
        }
    }

    pub fn bbox(&self) -> Rect {
        match self {
            Domain::UnitDisk => Rect { x0: -1.0, x1: 1.0, y0: -1.0, y1: 1.0 },
            Domain::Disk { center, radius } => Rect {
                x0: center[0] - radius,
                x1: center[0] + radius,
                y0: center[1] - radius,
                y1: center[1] + radius,
            },
            Domain::TwoDiskUnion { c1, r1, c2, r2 } => Rect {
                x0: (c1[0] - r1).min(c2[0] - r2),
                x1: (c1[0] + r1).max(c2[0] + r2),
                y0: (c1[1] - r1).min(c2[1] - r2),
                y1: (c1[1] + r1).max(c2[1] + r2),
            },
            Domain::PolygonJordan { vertices } => {
                let mut r = Rect {
                    x0: f64::INFINITY,
                    x1: f64::NEG_INFINITY,
                    y0: f64::INFINITY,
                    y1: f64::NEG_INFINITY,
                };
                for v in vertices {
                    r.x0 = r.x0.min(v[0]);
                    r.x1 = r.x1.max(v[0]);
                    r.y0 = r.y0.min(v[1]);
                    r.y1 = r.y1.max(v[1]);
                }
                r
            }
        }
    }

    /// Conservative exact classification of a cell against Ω. "Inside" and
    /// "Outside" are certain; anything uncertain is "Boundary" and gets
    /// refined by the quadrature.
    pub fn classify(&self, cell: &Rect) -> CellClass {
        match self {
            Domain::UnitDisk => disk_classify(cell, Complex64::ZERO, 1.0),
            Domain::Disk { center, radius } => disk_classify(cell, complex(center), *radius),
            Domain::TwoDiskUnion { c1, r1, c2, r2 } => {
                let a = disk_classify(cell, complex(c1), *r1);
                let b = disk_classify(cell, complex(c2), *r2);
                if a == CellClass::Inside || b == CellClass::Inside {
                    CellClass::Inside
                } else if a == CellClass::Outside && b == CellClass::Outside {
                    CellClass::Outside
                } else {
                    CellClass::Boundary
                }
            }
            Domain::PolygonJordan { vertices } => polygon_classify(vertices, cell),
        }
    }

    /// Lower bound on dist(z, ∂Ω); used for Whitney-style grading of interior
    /// cells toward the boundary.
    pub fn boundary_distance_lower(&self, z: Complex64) -> f64 {
        match self {
            Domain::UnitDisk => (1.0 - z.norm()).abs(),
            Domain::Disk { center, radius } => ((z - complex(center)).norm() - radius).abs(),
            Domain::TwoDiskUnion { c1, r1, c2, r2 } => {
                let d1 = ((z - complex(c1)).norm() - r1).abs();
                let d2 = ((z - complex(c2)).norm() - r2).abs();
                d1.min(d2)
            }
            Domain::PolygonJordan { vertices } => {
                let mut best = f64::INFINITY;
                let n = vertices.len();
                for i in 0..n {
                    let a = complex(&vertices[i]);
                    let b = complex(&vertices[(i + 1) % n]);
                    best = best.min(segment_distance(a, b, z));
                }
                best
            }
        }
    }

    /// True diameter bound from the bounding box.
    pub fn diameter_bound(&self) -> f64 {
        let b = self.bbox();
        (b.width().powi(2) + b.height().powi(2)).sqrt()
    }
}

fn complex(p: &[f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn disk_classify(cell: &Rect, center: Complex64, radius: f64) -> CellClass {
    if cell.max_corner_distance(center) <= radius - BOUNDARY_TOL {
        CellClass::Inside
    } else if cell.distance_to(center) >= radius + BOUNDARY_TOL {
        CellClass::Outside
    } else {
        CellClass::Boundary
    }
}

/// Even-odd crossing test; points within BOUNDARY_TOL of an edge count as
/// outside, consistent with the open-domain convention.
fn polygon_contains(vertices: &[[f64; 2]], z: Complex64) -> bool {
    let n = vertices.len();
    for i in 0..n {
        let a = complex(&vertices[i]);
        let b = complex(&vertices[(i + 1) % n]);
        if segment_distance(a, b, z) <= BOUNDARY_TOL {
            return false;
        }
    }
    let mut inside = false;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        if (a[1] > z.im) != (b[1] > z.im) {
            let t = (z.im - a[1]) / (b[1] - a[1]);
            let x = a[0] + t * (b[0] - a[0]);
            if z.re < x {
                inside = !inside;
            }
        }
    }
    inside
}

fn polygon_classify(vertices: &[[f64; 2]], cell: &Rect) -> CellClass {
    // Any polygon vertex inside the cell, or any edge crossing the cell,
    // means the cell straddles the boundary.
    let n = vertices.len();
    for v in vertices {
        let z = complex(v);
        if z.re >= cell.x0 - BOUNDARY_TOL
            && z.re <= cell.x1 + BOUNDARY_TOL
            && z.im >= cell.y0 - BOUNDARY_TOL
            && z.im <= cell.y1 + BOUNDARY_TOL
        {
            return CellClass::Boundary;
        }
    }
    for i in 0..n {
        let a = complex(&vertices[i]);
        let b = complex(&vertices[(i + 1) % n]);
        if segment_intersects_rect(a, b, cell) {
            return CellClass::Boundary;
        }
    }
    let inside_corners = cell
        .corners()
        .iter()
        .filter(|c| polygon_contains(vertices, **c))
        .count();
    match inside_corners {
        4 => CellClass::Inside,
        0 => CellClass::Outside,
        _ => CellClass::Boundary,
    }
}

fn segment_intersects_rect(a: Complex64, b: Complex64, r: &Rect) -> bool {
    // Cohen–Sutherland style reject, then exact segment-segment tests
    // against the four sides.
    if a.re < r.x0 && b.re < r.x0 || a.re > r.x1 && b.re > r.x1 {
        return false;
    }
    if a.im < r.y0 && b.im < r.y0 || a.im > r.y1 && b.im > r.y1 {
        return false;
    }
    let corners = r.corners();
    if (a.re >= r.x0 && a.re <= r.x1 && a.im >= r.y0 && a.im <= r.y1)
        || (b.re >= r.x0 && b.re <= r.x1 && b.im >= r.y0 && b.im <= r.y1)
    {
        return true;
    }
    for i in 0..4 {
        if segments_intersect(a, b, corners[i], corners[(i + 1) % 4]) {
            return true;
        }
    }
    false
}

fn segments_intersect(p1: Complex64, p2: Complex64, q1: Complex64, q2: Complex64) -> bool {
    let d1 = cross(q2 - q1, p1 - q1);
    let d2 = cross(q2 - q1, p2 - q1);
    let d3 = cross(p2 - p1, q1 - p1);
    let d4 = cross(p2 - p1, q2 - p1);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    d1 == 0.0 && on_segment(q1, q2, p1)
        || d2 == 0.0 && on_segment(q1, q2, p2)
        || d3 == 0.0 && on_segment(p1, p2, q1)
        || d4 == 0.0 && on_segment(p1, p2, q2)
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

fn on_segment(a: Complex64, b: Complex64, p: Complex64) -> bool {
    p.re >= a.re.min(b.re) && p.re <= a.re.max(b.re) && p.im >= a.im.min(b.im) && p.im <= a.im.max(b.im)
}

fn segment_distance(a: Complex64, b: Complex64, p: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a).re * ab.re + (p - a).im * ab.im) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_disk_membership() {
        let d = Domain::unit_disk();
        assert!(d.membership(Complex64::new(0.5, 0.3)));
        assert!(!d.membership(Complex64::new(1.0, 0.0)));
        assert!(!d.membership(Complex64::new(0.8, 0.7)));
        assert!(d.contains_origin());
    }

    #[test]
    fn two_disk_union_overlap_checks() {
        assert!(Domain::two_disk_union(Complex64::ZERO, 1.0, Complex64::new(3.0, 0.0), 0.5).is_err());
        assert!(Domain::two_disk_union(Complex64::ZERO, 1.0, Complex64::new(0.1, 0.0), 0.2).is_err());
        let ok = Domain::standard_two_disk();
        assert!(ok.membership(Complex64::new(1.2, 0.0)));
        assert!(ok.membership(Complex64::new(0.0, 0.5)));
        assert!(!ok.membership(Complex64::new(1.2, 0.25)));
    }

    #[test]
    fn membership_matches_analytic_description_near_boundary() {
        let d = Domain::standard_two_disk();
        // Just inside and outside the bump circle along the real axis.
        assert!(d.membership(Complex64::new(1.3 - 1e-9, 0.0)));
        assert!(!d.membership(Complex64::new(1.3 + 1e-9, 0.0)));
    }

    #[test]
    fn disk_cell_classification() {
        let d = Domain::unit_disk();
        let inside = Rect { x0: -0.2, x1: 0.2, y0: -0.2, y1: 0.2 };
        let outside = Rect { x0: 1.2, x1: 1.4, y0: 1.2, y1: 1.4 };
        let boundary = Rect { x0: 0.6, x1: 1.1, y0: 0.0, y1: 0.4 };
        assert_eq!(d.classify(&inside), CellClass::Inside);
        assert_eq!(d.classify(&outside), CellClass::Outside);
        assert_eq!(d.classify(&boundary), CellClass::Boundary);
    }

    #[test]
    fn polygon_membership_and_classification() {
        let square = Domain::polygon(vec![
            Complex64::new(-1.0, -1.0),
            Complex64::new(1.0, -1.0),
            Complex64::new(1.0, 1.0),
            Complex64::new(-1.0, 1.0),
        ])
        .unwrap();
        assert!(square.membership(Complex64::ZERO));
        assert!(!square.membership(Complex64::new(1.5, 0.0)));
        assert!(!square.membership(Complex64::new(1.0, 0.0)), "boundary is outside");
        let inside = Rect { x0: -0.5, x1: 0.5, y0: -0.5, y1: 0.5 };
        let straddle = Rect { x0: 0.5, x1: 1.5, y0: -0.5, y1: 0.5 };
        let outside = Rect { x0: 2.0, x1: 3.0, y0: 0.0, y1: 1.0 };
        assert_eq!(square.classify(&inside), CellClass::Inside);
        assert_eq!(square.classify(&straddle), CellClass::Boundary);
        assert_eq!(square.classify(&outside), CellClass::Outside);
    }

    #[test]
    fn boundary_distance_lower_bounds() {
        // The bound is conservative: at the origin the submerged part of the
        // bump circle caps it at 0.7 even though the true boundary is 1 away.
        let d = Domain::standard_two_disk();
        let z = Complex64::new(0.0, 0.0);
        let lower = d.boundary_distance_lower(z);
        assert!(lower <= 1.0 + 1e-12);
        assert!((lower - 0.7).abs() < 1e-12, "got {lower}");
        // Near the outer rim of the bump the bound tightens to the true value.
        let near_rim = Complex64::new(1.25, 0.0);
        assert!((d.boundary_distance_lower(near_rim) - 0.05).abs() < 1e-12);
    }

    #[test]
    fn domain_serialization_round_trip() {
        let d = Domain::standard_two_disk();
        let text = serde_json::to_string(&d).unwrap();
        let back: Domain = serde_json::from_str(&text).unwrap();
        assert_eq!(back, d);
    }
}
