//! Computational domains: spatial shape plus optional time extrusion.
//!
//! A point is laid out as `[x, y, ..., t]` with time, when present, in the
//! last coordinate. Membership tests are exact and deterministic, and every
//! boundary decomposes into a finite list of parametrized segments that the
//! sampler can draw from uniformly in arc length.

use std::fmt;
use std::sync::Arc;

/// Positive periodic radius `R(theta)` for star-shaped regions.
#[derive(Clone)]
pub struct RadiusFn {
    name: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl RadiusFn {
    pub fn new(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn radius(&self, theta: f64) -> f64 {
        (self.f)(theta)
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Debug for RadiusFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RadiusFn({})", self.name)
    }
}

/// Spatial part of a domain.
#[derive(Debug, Clone)]
pub enum SpatialShape {
    /// Axis-aligned box, one `[lo, hi]` interval per spatial coordinate.
    Box { bounds: Vec<[f64; 2]> },
    /// 2D region `r <= R(theta)` around `center`.
    PolarStar { center: [f64; 2], radius: RadiusFn },
    /// Disk of `radius` around `center` minus the angular sector within
    /// `gap_half_angle` of `gap_direction`.
    Pacman {
        center: [f64; 2],
        radius: f64,
        gap_direction: f64,
        gap_half_angle: f64,
    },
}

/// One parametrized piece of the spatial boundary.
///
/// `point_at(s)` maps the arc-length fraction `s in [0, 1]` onto the segment.
#[derive(Debug, Clone)]
pub struct BoundarySegment {
    pub label: String,
    kind: SegmentKind,
}

#[derive(Debug, Clone)]
enum SegmentKind {
    /// Single spatial point (a 1D box endpoint).
    Point(Vec<f64>),
    /// Straight segment from `a` to `b`.
    Line { a: Vec<f64>, b: Vec<f64> },
    /// Circular arc around `center` from `theta0` to `theta1`.
    Arc {
        center: [f64; 2],
        radius: f64,
        theta0: f64,
        theta1: f64,
    },
    /// Full star curve `center + R(theta) * e(theta)`; `table` maps uniform
    /// arc-length fractions onto theta (inverse CDF, linearly interpolated).
    StarCurve {
        center: [f64; 2],
        radius: RadiusFn,
        table: Arc<Vec<f64>>,
    },
}

/// Resolution of the arc-length inversion table for star curves.
const STAR_TABLE: usize = 2048;

impl BoundarySegment {
    /// Spatial point at arc-length fraction `s in [0, 1]`.
    pub fn point_at(&self, s: f64) -> Vec<f64> {
        match &self.kind {
            SegmentKind::Point(p) => p.clone(),
            SegmentKind::Line { a, b } => a
                .iter()
                .zip(b)
                .map(|(&ai, &bi)| ai + s * (bi - ai))
                .collect(),
            SegmentKind::Arc {
                center,
                radius,
                theta0,
                theta1,
            } => {
                let th = theta0 + s * (theta1 - theta0);
                vec![center[0] + radius * th.cos(), center[1] + radius * th.sin()]
            }
            SegmentKind::StarCurve {
                center,
                radius,
                table,
            } => {
                let pos = s.clamp(0.0, 1.0) * (table.len() - 1) as f64;
                let i = (pos.floor() as usize).min(table.len() - 2);
                let frac = pos - i as f64;
                let th = table[i] + frac * (table[i + 1] - table[i]);
                let r = radius.radius(th);
                vec![center[0] + r * th.cos(), center[1] + r * th.sin()]
            }
        }
    }

    /// True for zero-measure segments (isolated points).
    pub fn is_point(&self) -> bool {
        matches!(self.kind, SegmentKind::Point(_))
    }
}

/// Domain = spatial shape, optionally crossed with a time interval.
#[derive(Debug, Clone)]
pub struct Domain {
    shape: SpatialShape,
    time: Option<[f64; 2]>,
}

impl Domain {
    pub fn new(shape: SpatialShape, time: Option<[f64; 2]>) -> Self {
        Self { shape, time }
    }

    /// 1D interval, no time.
    pub fn interval(lo: f64, hi: f64) -> Self {
        Self::new(SpatialShape::Box { bounds: vec![[lo, hi]] }, None)
    }

    /// 1D interval crossed with `[t0, t1]`.
    pub fn interval_time(lo: f64, hi: f64, t0: f64, t1: f64) -> Self {
        Self::new(SpatialShape::Box { bounds: vec![[lo, hi]] }, Some([t0, t1]))
    }

    pub fn shape(&self) -> &SpatialShape {
        &self.shape
    }

    pub fn time(&self) -> Option<[f64; 2]> {
        self.time
    }

    pub fn spatial_dim(&self) -> usize {
        match &self.shape {
            SpatialShape::Box { bounds } => bounds.len(),
            SpatialShape::PolarStar { .. } | SpatialShape::Pacman { .. } => 2,
        }
    }

    /// Total input dimension (spatial + time when present).
    pub fn dim(&self) -> usize {
        self.spatial_dim() + usize::from(self.time.is_some())
    }

    /// Closed membership test on the full point `[spatial.., time?]`.
    pub fn contains(&self, v: &[f64]) -> bool {
        if v.len() != self.dim() {
            return false;
        }
        if let Some([t0, t1]) = self.time {
            let t = v[v.len() - 1];
            if !(t0..=t1).contains(&t) {
                return false;
            }
        }
        self.contains_spatial(&v[..self.spatial_dim()])
    }

    /// Closed membership of the spatial part alone.
    ///
    /// The curved shapes admit a 1e-12 relative slack at their boundary so
    /// that parametrized boundary points, which carry one ulp of trig
    /// roundoff, always test as members. The test stays deterministic.
    pub fn contains_spatial(&self, x: &[f64]) -> bool {
        const EDGE_TOL: f64 = 1e-12;
        match &self.shape {
            SpatialShape::Box { bounds } => bounds
                .iter()
                .zip(x)
                .all(|([lo, hi], xi)| (*lo..=*hi).contains(xi)),
            SpatialShape::PolarStar { center, radius } => {
                let (dx, dy) = (x[0] - center[0], x[1] - center[1]);
                let r = (dx * dx + dy * dy).sqrt();
                let rim = radius.radius(dy.atan2(dx));
                r <= rim * (1.0 + EDGE_TOL)
            }
            SpatialShape::Pacman {
                center,
                radius,
                gap_direction,
                gap_half_angle,
            } => {
                let (dx, dy) = (x[0] - center[0], x[1] - center[1]);
                let r = (dx * dx + dy * dy).sqrt();
                if r > *radius * (1.0 + EDGE_TOL) {
                    return false;
                }
                if r == 0.0 {
                    return true;
                }
                angular_distance(dy.atan2(dx), *gap_direction) >= *gap_half_angle - EDGE_TOL
            }
        }
    }

    /// Strict interior test used by the rejection sampler.
    pub(crate) fn strictly_inside_spatial(&self, x: &[f64]) -> bool {
        match &self.shape {
            SpatialShape::Box { bounds } => bounds
                .iter()
                .zip(x)
                .all(|([lo, hi], xi)| *lo < *xi && *xi < *hi),
            SpatialShape::PolarStar { center, radius } => {
                let (dx, dy) = (x[0] - center[0], x[1] - center[1]);
                let r = (dx * dx + dy * dy).sqrt();
                r < radius.radius(dy.atan2(dx))
            }
            SpatialShape::Pacman {
                center,
                radius,
                gap_direction,
                gap_half_angle,
            } => {
                let (dx, dy) = (x[0] - center[0], x[1] - center[1]);
                let r = (dx * dx + dy * dy).sqrt();
                if r >= *radius {
                    return false;
                }
                if r == 0.0 {
                    return false; // apex of the removed wedge
                }
                angular_distance(dy.atan2(dx), *gap_direction) > *gap_half_angle
            }
        }
    }

    /// Axis-aligned bounding box of the spatial part.
    ///
    /// Star shapes are scanned on a fine angular grid; the scan is
    /// deterministic so sampling stays reproducible.
    pub fn spatial_bounding_box(&self) -> Vec<[f64; 2]> {
        match &self.shape {
            SpatialShape::Box { bounds } => bounds.clone(),
            SpatialShape::PolarStar { center, radius } => {
                let mut bb = [[f64::INFINITY, f64::NEG_INFINITY]; 2];
                let n = 4096;
                for k in 0..=n {
                    let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                    let r = radius.radius(th);
                    let p = [center[0] + r * th.cos(), center[1] + r * th.sin()];
                    for i in 0..2 {
                        bb[i][0] = bb[i][0].min(p[i]);
                        bb[i][1] = bb[i][1].max(p[i]);
                    }
                }
                bb.to_vec()
            }
            SpatialShape::Pacman { center, radius, .. } => vec![
                [center[0] - radius, center[0] + radius],
                [center[1] - radius, center[1] + radius],
            ],
        }
    }

    /// Parametrized boundary segments of the spatial shape.
    ///
    /// Box: one face per coordinate side (two points for a 1D interval).
    /// Polar star: a single closed curve. Pacman: the outer arc plus the two
    /// radial edges of the removed sector.
    pub fn boundary_segments(&self) -> Vec<BoundarySegment> {
        match &self.shape {
            SpatialShape::Box { bounds } => {
                if bounds.len() == 1 {
                    let [lo, hi] = bounds[0];
                    return vec![
                        BoundarySegment {
                            label: format!("x={lo}"),
                            kind: SegmentKind::Point(vec![lo]),
                        },
                        BoundarySegment {
                            label: format!("x={hi}"),
                            kind: SegmentKind::Point(vec![hi]),
                        },
                    ];
                }
                let mut segs = Vec::new();
                for (axis, [lo, hi]) in bounds.iter().enumerate() {
                    for (side, val) in [("lo", *lo), ("hi", *hi)] {
                        // face: axis pinned to val, remaining coordinates swept
                        // (only 2D boxes occur in practice: faces are lines)
                        let mut a: Vec<f64> = bounds.iter().map(|b| b[0]).collect();
                        let mut b: Vec<f64> = bounds.iter().map(|b| b[1]).collect();
                        a[axis] = val;
                        b[axis] = val;
                        segs.push(BoundarySegment {
                            label: format!("axis{axis}-{side}"),
                            kind: SegmentKind::Line { a, b },
                        });
                    }
                }
                segs
            }
            SpatialShape::PolarStar { center, radius } => {
                vec![BoundarySegment {
                    label: format!("star({})", radius.name()),
                    kind: SegmentKind::StarCurve {
                        center: *center,
                        radius: radius.clone(),
                        table: Arc::new(star_arclength_table(radius)),
                    },
                }]
            }
            SpatialShape::Pacman {
                center,
                radius,
                gap_direction,
                gap_half_angle,
            } => {
                let th0 = gap_direction + gap_half_angle;
                let th1 = gap_direction + 2.0 * std::f64::consts::PI - gap_half_angle;
                let lip0 = [
                    center[0] + radius * th0.cos(),
                    center[1] + radius * th0.sin(),
                ];
                let lip1 = [
                    center[0] + radius * th1.cos(),
                    center[1] + radius * th1.sin(),
                ];
                vec![
                    BoundarySegment {
                        label: "arc".into(),
                        kind: SegmentKind::Arc {
                            center: *center,
                            radius: *radius,
                            theta0: th0,
                            theta1: th1,
                        },
                    },
                    BoundarySegment {
                        label: "edge-upper".into(),
                        kind: SegmentKind::Line {
                            a: center.to_vec(),
                            b: lip0.to_vec(),
                        },
                    },
                    BoundarySegment {
                        label: "edge-lower".into(),
                        kind: SegmentKind::Line {
                            a: center.to_vec(),
                            b: lip1.to_vec(),
                        },
                    },
                ]
            }
        }
    }
}

/// Smallest absolute angle between two directions, in `[0, pi]`.
fn angular_distance(a: f64, b: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut d = (a - b).rem_euclid(two_pi);
    if d > std::f64::consts::PI {
        d = two_pi - d;
    }
    d
}

/// Inverse arc-length table: entry `k` is the angle at which the cumulative
/// arc length reaches fraction `k / (len - 1)` of the full curve.
fn star_arclength_table(radius: &RadiusFn) -> Vec<f64> {
    let two_pi = 2.0 * std::f64::consts::PI;
    let n = STAR_TABLE;
    let dth = two_pi / n as f64;
    let mut cumulative = Vec::with_capacity(n + 1);
    cumulative.push(0.0);
    let mut prev = [radius.radius(0.0), 0.0];
    let mut total = 0.0;
    for k in 1..=n {
        let th = dth * k as f64;
        let r = radius.radius(th);
        let p = [r * th.cos(), r * th.sin()];
        total += ((p[0] - prev[0]).powi(2) + (p[1] - prev[1]).powi(2)).sqrt();
        cumulative.push(total);
        prev = p;
    }
    // invert: uniform arc-length fractions -> theta
    let mut table = Vec::with_capacity(n + 1);
    let mut j = 0;
    for k in 0..=n {
        let target = total * k as f64 / n as f64;
        while j + 1 < cumulative.len() && cumulative[j + 1] < target {
            j += 1;
        }
        let seg = cumulative[j + 1] - cumulative[j];
        let frac = if seg > 0.0 { (target - cumulative[j]) / seg } else { 0.0 };
        table.push(dth * (j as f64 + frac));
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pacman() -> Domain {
        Domain::new(
            SpatialShape::Pacman {
                center: [0.5, 0.5],
                radius: 0.5,
                gap_direction: 0.0,
                gap_half_angle: std::f64::consts::PI / 6.0,
            },
            None,
        )
    }

    #[test]
    fn box_membership() {
        let d = Domain::new(
            SpatialShape::Box {
                bounds: vec![[0.0, 1.0], [0.0, 1.0]],
            },
            None,
        );
        assert!(d.contains(&[0.5, 0.5]));
        assert!(d.contains(&[0.0, 1.0]));
        assert!(!d.contains(&[1.2, 0.5]));
    }

    #[test]
    fn pacman_wedge_removed() {
        let d = pacman();
        // half of the removed-sector direction, inside radius
        assert!(!d.contains(&[0.75, 0.5]));
        // opposite direction is inside
        assert!(d.contains(&[0.25, 0.5]));
        // outside the disk
        assert!(!d.contains(&[1.2, 0.5]));
        // on the radial edge: closed membership keeps it
        let th = std::f64::consts::PI / 6.0;
        assert!(d.contains(&[0.5 + 0.25 * th.cos(), 0.5 + 0.25 * th.sin()]));
    }

    #[test]
    fn star_membership() {
        let d = Domain::new(
            SpatialShape::PolarStar {
                center: [0.0, 0.0],
                radius: RadiusFn::new("unit", |_| 1.0),
            },
            None,
        );
        assert!(d.contains(&[0.5, 0.5]));
        assert!(!d.contains(&[1.2, 0.0]));
        assert!(d.contains(&[1.0, 0.0]));
    }

    #[test]
    fn time_extrusion_checks_last_coordinate() {
        let d = Domain::interval_time(0.0, 1.0, 0.0, 2.0);
        assert_eq!(d.dim(), 2);
        assert!(d.contains(&[0.5, 1.5]));
        assert!(!d.contains(&[0.5, 2.5]));
    }

    #[test]
    fn segments_lie_on_boundary() {
        for domain in [
            pacman(),
            Domain::new(
                SpatialShape::PolarStar {
                    center: [0.5, 0.5],
                    radius: RadiusFn::new("bat", |th| 0.45 + 0.12 * (5.0 * th).cos()),
                },
                None,
            ),
        ] {
            for seg in domain.boundary_segments() {
                for k in 0..=40 {
                    let p = seg.point_at(k as f64 / 40.0);
                    // parametrized points carry one ulp of trig roundoff, so
                    // membership is checked with a 1e-12 inward nudge
                    let nudged: Vec<f64> = p
                        .iter()
                        .map(|&x| 0.5 + (x - 0.5) * (1.0 - 1e-12))
                        .collect();
                    assert!(
                        domain.contains_spatial(&p) || domain.contains_spatial(&nudged),
                        "segment {} point {:?} is farther than 1e-12 outside",
                        seg.label,
                        p
                    );
                }
            }
        }
    }

    #[test]
    fn star_curve_points_sit_on_radius() {
        let radius = RadiusFn::new("bat", |th| 0.45 + 0.12 * (5.0 * th).cos());
        let domain = Domain::new(
            SpatialShape::PolarStar {
                center: [0.5, 0.5],
                radius: radius.clone(),
            },
            None,
        );
        let seg = &domain.boundary_segments()[0];
        for k in 0..=100 {
            let p = seg.point_at(k as f64 / 100.0);
            let (dx, dy) = (p[0] - 0.5, p[1] - 0.5);
            let r = (dx * dx + dy * dy).sqrt();
            let expect = radius.radius(dy.atan2(dx));
            assert!((r - expect).abs() <= 1e-12, "off-curve by {}", (r - expect).abs());
        }
    }

    #[test]
    fn interval_segments_are_points() {
        let d = Domain::interval(0.0, 1.0);
        let segs = d.boundary_segments();
        assert_eq!(segs.len(), 2);
        assert!(segs[0].is_point());
        assert_eq!(segs[0].point_at(0.3), vec![0.0]);
        assert_eq!(segs[1].point_at(0.9), vec![1.0]);
    }
}
