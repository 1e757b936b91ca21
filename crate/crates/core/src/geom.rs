//! Points, disks, and the tolerance policy that every predicate shares.
//!
//! All arithmetic is plain `f64`. Robustness comes from a two-tier margin:
//! `eps` decides predicates, `min_feature` is the general-position margin
//! that [`perturb_to_general_position`] enforces up front.

use std::collections::{BTreeSet, HashMap};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TAU: f64 = std::f64::consts::TAU;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn add(self, dx: f64, dy: f64) -> Point {
        Point::new(self.x + dx, self.y + dy)
    }

    /// Unit vector from `self` towards `to`. Length must be nonzero.
    pub fn dir_to(self, to: Point) -> (f64, f64) {
        let dx = to.x - self.x;
        let dy = to.y - self.y;
        let len = dx.hypot(dy);
        (dx / len, dy / len)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Disk {
    pub id: usize,
    pub center: Point,
    pub radius: f64,
}

impl Disk {
    pub fn new(id: usize, cx: f64, cy: f64, radius: f64) -> Self {
        Disk { id, center: Point::new(cx, cy), radius }
    }

    pub fn unit(id: usize, cx: f64, cy: f64) -> Self {
        Disk::new(id, cx, cy, 1.0)
    }

    /// Point on the boundary circle at the given angle.
    pub fn at_angle(&self, theta: f64) -> Point {
        Point::new(
            self.center.x + self.radius * theta.cos(),
            self.center.y + self.radius * theta.sin(),
        )
    }

    /// Angle of `p` as seen from the center, normalized to `[0, 2pi)`.
    pub fn angle_of(&self, p: Point) -> f64 {
        normalize_angle((p.y - self.center.y).atan2(p.x - self.center.x))
    }

    /// Signed distance of `p` to the boundary circle (negative inside).
    pub fn boundary_dist(&self, p: Point) -> f64 {
        self.center.dist(p) - self.radius
    }
}

pub fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Counterclockwise angular span from `a` to `b` in `(0, 2pi]`-ish range.
pub fn ccw_span(a: f64, b: f64) -> f64 {
    (b - a).rem_euclid(TAU)
}

/// True when `theta` lies in the ccw interval from `a` to `b` (exclusive ends).
pub fn in_ccw_interval(theta: f64, a: f64, b: f64) -> bool {
    let span = ccw_span(a, b);
    let off = ccw_span(a, theta);
    off > 0.0 && off < span
}

#[derive(Clone, Copy, Debug)]
pub struct TolerancePolicy {
    /// Predicate tolerance.
    pub eps: f64,
    /// General-position margin; `eps < min_feature`.
    pub min_feature: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        TolerancePolicy { eps: 1e-9, min_feature: 1e-6 }
    }
}

impl TolerancePolicy {
    pub fn new(eps: f64, min_feature: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < min_feature) {
            return Err(Error::InvalidInstance(format!(
                "tolerance policy requires 0 < eps < min_feature, got eps={eps}, min_feature={min_feature}"
            )));
        }
        Ok(TolerancePolicy { eps, min_feature })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Containment {
    Inside,
    Outside,
    Boundary,
}

/// Where `p` sits relative to disk `d`: `Boundary` within `eps` of the circle,
/// strictly inside or outside otherwise.
pub fn point_in_disk(p: Point, d: &Disk, tol: &TolerancePolicy) -> Containment {
    let bd = d.boundary_dist(p);
    if bd.abs() <= tol.eps {
        Containment::Boundary
    } else if bd < 0.0 {
        Containment::Inside
    } else {
        Containment::Outside
    }
}

/// True when the open disks share area. Tangency within `eps` counts as
/// non-overlapping.
pub fn disks_overlap(d1: &Disk, d2: &Disk, tol: &TolerancePolicy) -> bool {
    d1.center.dist(d2.center) < d1.radius + d2.radius - tol.eps
}

/// Intersection points of the two boundary circles.
///
/// Returns two points for properly crossing circles, none when they are
/// disjoint or nested. Tangency within `eps` is rejected as degenerate.
pub fn circle_circle_intersect(d1: &Disk, d2: &Disk, tol: &TolerancePolicy) -> Result<Vec<Point>> {
    if d1.id == d2.id {
        return Err(Error::DegenerateInput(format!("disk {} intersected with itself", d1.id)));
    }
    let d = d1.center.dist(d2.center);
    let rsum = d1.radius + d2.radius;
    let rdiff = (d1.radius - d2.radius).abs();
    if d <= tol.eps && rdiff <= tol.eps {
        return Err(Error::DegenerateInput(format!(
            "disks {} and {} are concentric with equal radii",
            d1.id, d2.id
        )));
    }
    if (d - rsum).abs() <= tol.eps || (d - rdiff).abs() <= tol.eps {
        return Err(Error::DegenerateInput(format!("disks {} and {} are tangent", d1.id, d2.id)));
    }
    if d > rsum || d < rdiff {
        return Ok(vec![]);
    }
    let a = (d * d + d1.radius * d1.radius - d2.radius * d2.radius) / (2.0 * d);
    let h = (d1.radius * d1.radius - a * a).max(0.0).sqrt();
    let (ux, uy) = ((d2.center.x - d1.center.x) / d, (d2.center.y - d1.center.y) / d);
    let bx = d1.center.x + a * ux;
    let by = d1.center.y + a * uy;
    Ok(vec![Point::new(bx - h * uy, by + h * ux), Point::new(bx + h * uy, by - h * ux)])
}

/// One violated general-position condition, with the items to nudge.
#[derive(Debug)]
pub struct PositionViolation {
    pub description: String,
    pub disk_indices: Vec<usize>,
    pub point_indices: Vec<usize>,
}

/// Checks the general-position conditions at `min_feature` margins:
/// no (near-)tangent circle pairs, no three circles through a common point,
/// circle intersection points pairwise separated, and no point near a circle.
pub fn check_general_position(
    disks: &[Disk],
    points: &[Point],
    tol: &TolerancePolicy,
) -> Vec<PositionViolation> {
    let mf = tol.min_feature;
    let mut violations = Vec::new();
    for i in 0..disks.len() {
        for j in (i + 1)..disks.len() {
            let (a, b) = (&disks[i], &disks[j]);
            let d = a.center.dist(b.center);
            let rsum = a.radius + b.radius;
            let rdiff = (a.radius - b.radius).abs();
            if (d - rsum).abs() <= mf || (d - rdiff).abs() <= mf {
                violations.push(PositionViolation {
                    description: format!("disks {} and {} are near-tangent", a.id, b.id),
                    disk_indices: vec![i, j],
                    point_indices: vec![],
                });
            }
        }
    }

    // Collect intersection points of properly crossing pairs.
    let mut xpoints: Vec<(Point, usize, usize)> = Vec::new();
    for i in 0..disks.len() {
        for j in (i + 1)..disks.len() {
            let (a, b) = (&disks[i], &disks[j]);
            let d = a.center.dist(b.center);
            let rsum = a.radius + b.radius;
            let rdiff = (a.radius - b.radius).abs();
            if d + mf < rsum && d > rdiff + mf {
                if let Ok(pts) = circle_circle_intersect(a, b, tol) {
                    for p in pts {
                        xpoints.push((p, i, j));
                    }
                }
            }
        }
    }

    // Three circles through a (near-)common point.
    for &(p, i, j) in &xpoints {
        for (k, d) in disks.iter().enumerate() {
            if k == i || k == j {
                continue;
            }
            if d.boundary_dist(p).abs() <= mf {
                violations.push(PositionViolation {
                    description: format!(
                        "circles {}, {}, {} pass near a common point",
                        disks[i].id, disks[j].id, d.id
                    ),
                    disk_indices: vec![i, j, k],
                    point_indices: vec![],
                });
            }
        }
    }

    // Pairwise separation of intersection points, bucketed to stay near-linear.
    let cell = (2.0 * mf).max(1e-12);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (idx, &(p, _, _)) in xpoints.iter().enumerate() {
        let key = ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64);
        grid.entry(key).or_default().push(idx);
    }
    for (idx, &(p, i, j)) in xpoints.iter().enumerate() {
        let kx = (p.x / cell).floor() as i64;
        let ky = (p.y / cell).floor() as i64;
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(bucket) = grid.get(&(kx + dx, ky + dy)) {
                    for &other in bucket {
                        if other <= idx {
                            continue;
                        }
                        let (q, a, b) = xpoints[other];
                        if (a, b) == (i, j) {
                            // Same pair: closeness means near-tangency, already reported.
                            continue;
                        }
                        if p.dist(q) <= mf {
                            violations.push(PositionViolation {
                                description: format!(
                                    "intersection points of ({},{}) and ({},{}) nearly coincide",
                                    disks[i].id, disks[j].id, disks[a].id, disks[b].id
                                ),
                                disk_indices: vec![i, j, a, b],
                                point_indices: vec![],
                            });
                        }
                    }
                }
            }
        }
    }

    for (pi, p) in points.iter().enumerate() {
        for (di, d) in disks.iter().enumerate() {
            if d.boundary_dist(*p).abs() <= mf {
                // Both sides move; the point alone cannot always reach the
                // margin within the per-coordinate displacement bound.
                violations.push(PositionViolation {
                    description: format!("point {pi} lies near the circle of disk {}", d.id),
                    disk_indices: vec![di],
                    point_indices: vec![pi],
                });
            }
        }
    }
    violations
}

const PERTURB_ATTEMPTS: usize = 64;

/// Nudges offending disks and points until the general-position conditions
/// hold at `min_feature` margins. Inputs already in general position are
/// returned unchanged, which also makes the operation idempotent. Every
/// coordinate moves by at most `min_feature` from its original value.
pub fn perturb_to_general_position(
    disks: &[Disk],
    points: &[Point],
    tol: &TolerancePolicy,
    seed: u64,
) -> Result<(Vec<Disk>, Vec<Point>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur_disks = disks.to_vec();
    let mut cur_points = points.to_vec();
    for attempt in 0..=PERTURB_ATTEMPTS {
        let violations = check_general_position(&cur_disks, &cur_points, tol);
        if violations.is_empty() {
            return Ok((cur_disks, cur_points));
        }
        if attempt == PERTURB_ATTEMPTS {
            break;
        }
        let mut disk_off: BTreeSet<usize> = BTreeSet::new();
        let mut point_off: BTreeSet<usize> = BTreeSet::new();
        for v in &violations {
            disk_off.extend(v.disk_indices.iter().copied());
            point_off.extend(v.point_indices.iter().copied());
        }
        // Fresh offsets from the original coordinates keep the total
        // displacement bounded across retries. The offset length must be
        // able to exceed the margin itself, so draw a direction and clip
        // the length per coordinate instead of sampling a small box.
        let offset = |rng: &mut ChaCha8Rng| -> (f64, f64) {
            let theta: f64 = rng.gen_range(0.0..TAU);
            let cap = 0.99 * tol.min_feature;
            let len = (1.35 * tol.min_feature)
                .min(cap / theta.cos().abs().max(1e-3))
                .min(cap / theta.sin().abs().max(1e-3));
            (len * theta.cos(), len * theta.sin())
        };
        for &i in &disk_off {
            let (dx, dy) = offset(&mut rng);
            cur_disks[i].center.x = disks[i].center.x + dx;
            cur_disks[i].center.y = disks[i].center.y + dy;
        }
        for &i in &point_off {
            let (dx, dy) = offset(&mut rng);
            cur_points[i].x = points[i].x + dx;
            cur_points[i].y = points[i].y + dy;
        }
    }
    Err(Error::PerturbationFailed(PERTURB_ATTEMPTS))
}
