//! The boundary of a union of disks and the faces of the complement.
//!
//! Under general position the boundary of the union is a disjoint set of
//! simple closed cycles of circular arcs. Faces of the complement are then in
//! one-to-one correspondence with enclosure signatures: the set of cycles a
//! ray from the point crosses an odd number of times. Two uncovered points
//! share a face exactly when their signatures are equal, which avoids
//! building a full face structure.

use std::collections::BTreeSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geom::{
    ccw_span, circle_circle_intersect, disks_overlap, normalize_angle, point_in_disk, Containment,
    Disk, Point, TolerancePolicy, TAU,
};

/// One circular arc on the union boundary, swept counterclockwise on its
/// owning circle from `start_angle` to `end_angle`.
#[derive(Clone, Debug)]
pub struct Arc {
    pub disk_id: usize,
    pub start_angle: f64,
    pub end_angle: f64,
    pub start: Point,
    pub end: Point,
    /// Whole circle; the angle fields are both 0.
    pub full: bool,
}

impl Arc {
    pub fn span(&self) -> f64 {
        if self.full {
            TAU
        } else {
            ccw_span(self.start_angle, self.end_angle)
        }
    }

    pub fn mid_angle(&self) -> f64 {
        if self.full {
            std::f64::consts::PI
        } else {
            normalize_angle(self.start_angle + 0.5 * self.span())
        }
    }
}

#[derive(Clone, Debug)]
pub struct BoundaryCycle {
    pub cycle_id: usize,
    pub arcs: Vec<Arc>,
}

/// Identity of a complement face: covered, or the set of boundary cycles
/// crossed an odd number of times by a ray to infinity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct FaceSignature {
    pub covered: bool,
    pub enclosing_cycles: BTreeSet<usize>,
}

impl FaceSignature {
    pub fn covered() -> Self {
        FaceSignature { covered: true, enclosing_cycles: BTreeSet::new() }
    }
}

/// The union boundary of a disk set, immutable after construction.
pub struct UnionBoundary {
    disks: Vec<Disk>,
    tol: TolerancePolicy,
    pub cycles: Vec<BoundaryCycle>,
    ray_dirs: Vec<(f64, f64)>,
}

const RAY_RETRIES: usize = 32;

struct Vertex {
    point: Point,
}

struct RawArc {
    disk_idx: usize,
    start_angle: f64,
    end_angle: f64,
    vstart: usize,
    vend: usize,
}

impl UnionBoundary {
    pub fn build(disks: &[Disk], tol: &TolerancePolicy) -> Result<UnionBoundary> {
        let mut seen = BTreeSet::new();
        for d in disks {
            if !seen.insert(d.id) {
                return Err(Error::InvalidInstance(format!("duplicate disk id {}", d.id)));
            }
            if !(d.radius > 0.0) || !d.center.is_finite() {
                return Err(Error::InvalidInstance(format!("disk {} is malformed", d.id)));
            }
        }

        // All circle-circle intersection points; tangency is rejected inside
        // the intersection primitive.
        let mut vertices: Vec<Vertex> = Vec::new();
        let mut events: Vec<Vec<(f64, usize)>> = vec![Vec::new(); disks.len()];
        for i in 0..disks.len() {
            for j in (i + 1)..disks.len() {
                for p in circle_circle_intersect(&disks[i], &disks[j], tol)? {
                    let vid = vertices.len();
                    events[i].push((disks[i].angle_of(p), vid));
                    events[j].push((disks[j].angle_of(p), vid));
                    vertices.push(Vertex { point: p });
                }
            }
        }

        let mut raw_arcs: Vec<RawArc> = Vec::new();
        let mut full_arcs: Vec<usize> = Vec::new();
        for (i, ev) in events.iter_mut().enumerate() {
            if ev.is_empty() {
                // Circle without crossings is either fully covered by one
                // disk or fully on the boundary.
                let probe = disks[i].at_angle(0.0);
                let mut covered = false;
                for (k, other) in disks.iter().enumerate() {
                    if k == i {
                        continue;
                    }
                    match point_in_disk(probe, other, tol) {
                        Containment::Inside => covered = true,
                        Containment::Boundary => {
                            return Err(Error::DegenerateInput(format!(
                                "circle of disk {} grazes the circle of disk {}",
                                disks[i].id, other.id
                            )))
                        }
                        Containment::Outside => {}
                    }
                }
                if !covered {
                    full_arcs.push(i);
                }
                continue;
            }
            ev.sort_by(|a, b| a.0.total_cmp(&b.0));
            let ang_eps = tol.eps / disks[i].radius;
            for m in 0..ev.len() {
                let (a0, v0) = ev[m];
                let (a1, v1) = ev[(m + 1) % ev.len()];
                let span = ccw_span(a0, a1);
                if span <= ang_eps || span >= TAU - ang_eps {
                    return Err(Error::DegenerateInput(format!(
                        "two intersection points nearly coincide on disk {}",
                        disks[i].id
                    )));
                }
                let mid = disks[i].at_angle(normalize_angle(a0 + 0.5 * span));
                let mut on_boundary = true;
                for (k, other) in disks.iter().enumerate() {
                    if k == i {
                        continue;
                    }
                    match point_in_disk(mid, other, tol) {
                        Containment::Inside => {
                            on_boundary = false;
                            break;
                        }
                        Containment::Boundary => {
                            return Err(Error::DegenerateInput(format!(
                                "arc midpoint of disk {} lies on the circle of disk {}",
                                disks[i].id, other.id
                            )))
                        }
                        Containment::Outside => {}
                    }
                }
                if on_boundary {
                    raw_arcs.push(RawArc {
                        disk_idx: i,
                        start_angle: a0,
                        end_angle: a1,
                        vstart: v0,
                        vend: v1,
                    });
                }
            }
        }

        // Each boundary vertex must join exactly two kept arcs.
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); vertices.len()];
        for (ai, arc) in raw_arcs.iter().enumerate() {
            incident[arc.vstart].push(ai);
            incident[arc.vend].push(ai);
        }
        for (vid, inc) in incident.iter().enumerate() {
            if !(inc.len() == 2 || inc.is_empty()) {
                return Err(Error::InternalError(format!(
                    "boundary vertex {vid} has {} incident arcs",
                    inc.len()
                )));
            }
        }

        let make_arc = |raw: &RawArc| -> Arc {
            Arc {
                disk_id: disks[raw.disk_idx].id,
                start_angle: raw.start_angle,
                end_angle: raw.end_angle,
                start: vertices[raw.vstart].point,
                end: vertices[raw.vend].point,
                full: false,
            }
        };

        let mut cycles: Vec<BoundaryCycle> = Vec::new();
        for &i in &full_arcs {
            cycles.push(BoundaryCycle {
                cycle_id: cycles.len(),
                arcs: vec![Arc {
                    disk_id: disks[i].id,
                    start_angle: 0.0,
                    end_angle: 0.0,
                    start: disks[i].at_angle(0.0),
                    end: disks[i].at_angle(0.0),
                    full: true,
                }],
            });
        }
        let mut visited = vec![false; raw_arcs.len()];
        for start in 0..raw_arcs.len() {
            if visited[start] {
                continue;
            }
            let mut cycle_arcs = vec![make_arc(&raw_arcs[start])];
            visited[start] = true;
            let origin = raw_arcs[start].vstart;
            let mut prev = start;
            let mut at = raw_arcs[start].vend;
            while at != origin {
                let inc = &incident[at];
                let next = if inc[0] == prev { inc[1] } else { inc[0] };
                if visited[next] {
                    return Err(Error::InternalError("boundary walk revisited an arc".into()));
                }
                visited[next] = true;
                cycle_arcs.push(make_arc(&raw_arcs[next]));
                at = if raw_arcs[next].vstart == at {
                    raw_arcs[next].vend
                } else {
                    raw_arcs[next].vstart
                };
                prev = next;
            }
            cycles.push(BoundaryCycle { cycle_id: cycles.len(), arcs: cycle_arcs });
        }

        let mut rng = ChaCha8Rng::seed_from_u64(0x9e37_79b9_7f4a_7c15);
        let ray_dirs = (0..RAY_RETRIES)
            .map(|_| {
                let t: f64 = rng.gen_range(0.0..TAU);
                (t.cos(), t.sin())
            })
            .collect();

        Ok(UnionBoundary { disks: disks.to_vec(), tol: *tol, cycles, ray_dirs })
    }

    pub fn disks(&self) -> &[Disk] {
        &self.disks
    }

    pub fn total_arcs(&self) -> usize {
        self.cycles.iter().map(|c| c.arcs.len()).sum()
    }

    /// Face identity of `p`. The point must not lie within `eps` of any
    /// circle; covered points get the covered signature.
    pub fn signature(&self, p: Point) -> Result<FaceSignature> {
        for d in &self.disks {
            match point_in_disk(p, d, &self.tol) {
                Containment::Inside => return Ok(FaceSignature::covered()),
                Containment::Boundary => {
                    return Err(Error::DegenerateInput(format!(
                        "query point lies within eps of the circle of disk {}",
                        d.id
                    )))
                }
                Containment::Outside => {}
            }
        }
        'attempt: for dir in &self.ray_dirs {
            let mut enclosing = BTreeSet::new();
            for cycle in &self.cycles {
                let mut crossings = 0usize;
                for arc in &cycle.arcs {
                    match self.ray_arc_crossings(p, *dir, arc) {
                        Some(c) => crossings += c,
                        None => continue 'attempt,
                    }
                }
                if crossings % 2 == 1 {
                    enclosing.insert(cycle.cycle_id);
                }
            }
            return Ok(FaceSignature { covered: false, enclosing_cycles: enclosing });
        }
        Err(Error::RayDegeneracy(RAY_RETRIES))
    }

    /// Number of times the ray `p + t*dir` (t > 0) crosses the arc, or `None`
    /// when the crossing is too close to an endpoint or a tangency to trust.
    fn ray_arc_crossings(&self, p: Point, dir: (f64, f64), arc: &Arc) -> Option<usize> {
        let disk = self.disk_by_id(arc.disk_id);
        let eps = self.tol.eps;
        let (cx, cy) = (disk.center.x, disk.center.y);
        let (px, py) = (p.x - cx, p.y - cy);
        let b = dir.0 * px + dir.1 * py;
        let line_dist = (dir.0 * py - dir.1 * px).abs();
        // Forward near-tangency makes the two roots untrustworthy.
        if (line_dist - disk.radius).abs() <= 4.0 * eps && -b > 0.0 {
            return None;
        }
        let disc = disk.radius * disk.radius - line_dist * line_dist;
        if disc <= 0.0 {
            return Some(0);
        }
        let sq = disc.sqrt();
        let mut count = 0usize;
        for t in [-b - sq, -b + sq] {
            if t <= eps {
                if t > -eps {
                    return None;
                }
                continue;
            }
            if arc.full {
                count += 1;
                continue;
            }
            let q = Point::new(p.x + t * dir.0, p.y + t * dir.1);
            let theta = disk.angle_of(q);
            let off = ccw_span(arc.start_angle, theta);
            let span = arc.span();
            let slack = (10.0 * eps) / disk.radius;
            if off <= slack || (off >= span - slack && off <= span + slack) {
                return None;
            }
            if off < span {
                count += 1;
            }
        }
        Some(count)
    }

    fn disk_by_id(&self, id: usize) -> &Disk {
        self.disks.iter().find(|d| d.id == id).expect("disk id present")
    }

    /// A point just off the cycle on its complement side. Every cycle bounds
    /// exactly one complement face, so the probe identifies that face.
    pub fn cycle_probe(&self, cycle_idx: usize) -> Result<Point> {
        let cycle = &self.cycles[cycle_idx];
        for arc in &cycle.arcs {
            let own = self.disk_by_id(arc.disk_id);
            let m = own.at_angle(arc.mid_angle());
            let mut clearance = f64::INFINITY;
            for d in &self.disks {
                if d.id == arc.disk_id {
                    continue;
                }
                clearance = clearance.min(d.boundary_dist(m).abs());
            }
            let delta = 0.5 * self.tol.min_feature.min(clearance);
            if delta < 4.0 * self.tol.eps {
                continue;
            }
            let nx = (m.x - own.center.x) / own.radius;
            let ny = (m.y - own.center.y) / own.radius;
            return Ok(Point::new(m.x + delta * nx, m.y + delta * ny));
        }
        Err(Error::DegenerateInput(format!(
            "no arc of cycle {cycle_idx} admits a complement-side probe"
        )))
    }

    /// Cycle ids whose adjacent complement face is the face with `sig`.
    pub fn face_cycles(&self, sig: &FaceSignature) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for idx in 0..self.cycles.len() {
            let probe = self.cycle_probe(idx)?;
            if self.signature(probe)? == *sig {
                out.push(idx);
            }
        }
        Ok(out)
    }

    pub fn separates(&self, p: Point, q: Point) -> Result<bool> {
        let sp = self.signature(p)?;
        let sq = self.signature(q)?;
        Ok(sp.covered || sq.covered || sp != sq)
    }

    /// Owning disks of the arcs on every cycle bounding the face of `p`.
    pub fn face_boundary_disks(&self, p: Point) -> Result<BTreeSet<usize>> {
        let sig = self.signature(p)?;
        if sig.covered {
            return Err(Error::InvalidInstance("query point is covered by a disk".into()));
        }
        let mut out = BTreeSet::new();
        for idx in self.face_cycles(&sig)? {
            for arc in &self.cycles[idx].arcs {
                out.insert(arc.disk_id);
            }
        }
        Ok(out)
    }

    /// Number of distinct complement faces: the outer face plus every face
    /// adjacent to some boundary cycle.
    pub fn complement_face_count(&self) -> Result<usize> {
        let mut sigs = BTreeSet::new();
        sigs.insert(FaceSignature { covered: false, enclosing_cycles: BTreeSet::new() });
        for idx in 0..self.cycles.len() {
            let probe = self.cycle_probe(idx)?;
            sigs.insert(self.signature(probe)?);
        }
        Ok(sigs.len())
    }
}

/// Builds the union boundary of `disks`.
pub fn union_boundary(disks: &[Disk], tol: &TolerancePolicy) -> Result<UnionBoundary> {
    UnionBoundary::build(disks, tol)
}

/// Face identity of `p` with respect to `disks`.
pub fn enclosure_signature(
    disks: &[Disk],
    p: Point,
    tol: &TolerancePolicy,
) -> Result<FaceSignature> {
    UnionBoundary::build(disks, tol)?.signature(p)
}

/// True when every path between `p` and `q` meets a disk: one of them is
/// covered or they lie in different complement faces.
pub fn separates(disks: &[Disk], p: Point, q: Point, tol: &TolerancePolicy) -> Result<bool> {
    UnionBoundary::build(disks, tol)?.separates(p, q)
}

/// Groups point indices by complement face. All points must be uncovered.
pub fn partition_by_face(
    disks: &[Disk],
    points: &[Point],
    tol: &TolerancePolicy,
) -> Result<Vec<Vec<usize>>> {
    let ub = UnionBoundary::build(disks, tol)?;
    let mut groups: std::collections::BTreeMap<FaceSignature, Vec<usize>> =
        std::collections::BTreeMap::new();
    for (i, &p) in points.iter().enumerate() {
        let sig = ub.signature(p)?;
        if sig.covered {
            return Err(Error::InvalidInstance(format!("point {i} is covered by a disk")));
        }
        groups.entry(sig).or_default().push(i);
    }
    Ok(groups.into_values().collect())
}

/// Disks owning arcs on the cycles that bound the face containing `p`.
pub fn face_boundary_disks(
    disks: &[Disk],
    p: Point,
    tol: &TolerancePolicy,
) -> Result<BTreeSet<usize>> {
    UnionBoundary::build(disks, tol)?.face_boundary_disks(p)
}

/// Number of faces of the complement of the union.
pub fn complement_face_count(disks: &[Disk], tol: &TolerancePolicy) -> Result<usize> {
    UnionBoundary::build(disks, tol)?.complement_face_count()
}

/// True when `g` has an acyclic overlap graph, in which case the union is
/// simply connected and cannot enclose any uncovered point.
pub fn overlap_graph_is_forest(disks: &[Disk], tol: &TolerancePolicy) -> bool {
    let n = disks.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if disks_overlap(&disks[i], &disks[j], tol) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri == rj {
                    return false;
                }
                parent[ri] = rj;
            }
        }
    }
    true
}

/// The canonical three-disk ring used throughout the tests: pairwise
/// overlapping unit disks around a small uncovered hole.
pub fn three_disk_ring() -> Vec<Disk> {
    vec![Disk::unit(0, 0.0, 0.0), Disk::unit(1, 1.8, 0.0), Disk::unit(2, 0.9, 1.5588457)]
}

/// Centroid of the ring hole.
pub fn ring_hole_point() -> Point {
    Point::new(0.9, 0.5196152)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    #[test]
    fn single_disk_boundary() {
        let disks = vec![Disk::unit(0, 0.0, 0.0)];
        let ub = UnionBoundary::build(&disks, &tol()).unwrap();
        assert_eq!(ub.cycles.len(), 1);
        assert_eq!(ub.cycles[0].arcs.len(), 1);
        assert!(ub.cycles[0].arcs[0].full);
    }

    #[test]
    fn two_disjoint_disks() {
        let disks = vec![Disk::unit(0, 0.0, 0.0), Disk::unit(1, 4.0, 0.0)];
        let ub = UnionBoundary::build(&disks, &tol()).unwrap();
        assert_eq!(ub.cycles.len(), 2);
        assert!(ub.cycles.iter().all(|c| c.arcs.len() == 1 && c.arcs[0].full));
    }

    #[test]
    fn ring_has_outer_and_hole_cycles() {
        let disks = three_disk_ring();
        let ub = UnionBoundary::build(&disks, &tol()).unwrap();
        assert_eq!(ub.cycles.len(), 2);
        let mut arc_counts: Vec<usize> = ub.cycles.iter().map(|c| c.arcs.len()).collect();
        arc_counts.sort_unstable();
        assert_eq!(arc_counts, vec![3, 3]);
        // Every kept arc midpoint lies on its own circle and outside the rest.
        for cycle in &ub.cycles {
            for arc in &cycle.arcs {
                let own = disks.iter().find(|d| d.id == arc.disk_id).unwrap();
                let m = own.at_angle(arc.mid_angle());
                assert!(own.boundary_dist(m).abs() < 1e-9);
                for d in &disks {
                    if d.id != arc.disk_id {
                        assert!(d.boundary_dist(m) > 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn signatures_and_separation_on_ring() {
        let disks = three_disk_ring();
        let ub = UnionBoundary::build(&disks, &tol()).unwrap();
        let hole = ring_hole_point();
        let far = Point::new(10.0, 10.0);
        let sig_far = ub.signature(far).unwrap();
        assert!(!sig_far.covered);
        assert!(sig_far.enclosing_cycles.is_empty());
        let sig_hole = ub.signature(hole).unwrap();
        assert!(!sig_hole.covered);
        assert!(!sig_hole.enclosing_cycles.is_empty());
        assert!(ub.signature(Point::new(0.0, 0.0)).unwrap().covered);
        assert!(ub.separates(hole, far).unwrap());
        assert!(ub.separates(far, hole).unwrap());
    }

    #[test]
    fn single_disk_never_separates_uncovered_points() {
        let disks = vec![Disk::unit(0, 0.0, 0.0)];
        assert!(!separates(&disks, Point::new(-3.0, 0.0), Point::new(3.0, 0.0), &tol()).unwrap());
    }

    #[test]
    fn equal_uncovered_points_are_not_separated() {
        let disks = three_disk_ring();
        let p = Point::new(10.0, 3.0);
        assert!(!separates(&disks, p, p, &tol()).unwrap());
    }

    #[test]
    fn partition_groups_by_face() {
        let disks = three_disk_ring();
        let pts = vec![ring_hole_point(), Point::new(5.0, 5.0), Point::new(6.0, 6.0)];
        let groups = partition_by_face(&disks, &pts, &tol()).unwrap();
        assert_eq!(groups.len(), 2);
        let mut sizes: Vec<usize> = groups.iter().map(|g| g.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 2]);
        let singleton = groups.iter().find(|g| g.len() == 1).unwrap();
        assert_eq!(singleton[0], 0);
    }

    #[test]
    fn partition_without_disks_is_one_group() {
        let groups =
            partition_by_face(&[], &[Point::new(0.0, 0.0), Point::new(1.0, 1.0)], &tol()).unwrap();
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0], vec![0, 1]);
    }

    #[test]
    fn face_boundary_examples() {
        let disks = three_disk_ring();
        let ids = face_boundary_disks(&disks, ring_hole_point(), &tol()).unwrap();
        assert_eq!(ids, BTreeSet::from([0, 1, 2]));

        let one = vec![Disk::unit(7, 0.0, 0.0)];
        let ids = face_boundary_disks(&one, Point::new(3.0, 0.0), &tol()).unwrap();
        assert_eq!(ids, BTreeSet::from([7]));

        let two = vec![Disk::unit(0, 0.0, 0.0), Disk::unit(1, 6.0, 0.0)];
        let ids = face_boundary_disks(&two, Point::new(3.0, 0.0), &tol()).unwrap();
        assert_eq!(ids, BTreeSet::from([0, 1]));
    }

    #[test]
    fn face_counts() {
        assert_eq!(complement_face_count(&[], &tol()).unwrap(), 1);
        assert_eq!(complement_face_count(&[Disk::unit(0, 0.0, 0.0)], &tol()).unwrap(), 1);
        assert_eq!(complement_face_count(&three_disk_ring(), &tol()).unwrap(), 2);
    }

    #[test]
    fn monotone_under_disk_insertion() {
        let mut disks = three_disk_ring();
        let (p, q) = (ring_hole_point(), Point::new(8.0, 8.0));
        assert!(separates(&disks, p, q, &tol()).unwrap());
        disks.push(Disk::unit(3, 5.0, -4.0));
        disks.push(Disk::unit(4, -3.0, 6.0));
        assert!(separates(&disks, p, q, &tol()).unwrap());
    }
}
