//! The two-point separator: route a cutting path through a shortest disk
//! sequence, slice the disks into pieces, and close the cheapest cycle of
//! pieces around one sequence disk.
//!
//! Pieces and their adjacencies are recovered without a global face
//! structure. The cutting chain is simple and crosses every circle
//! transversally, so inside any one disk (or lens of two disks) the chain
//! restricts to disjoint boundary-to-boundary cuts. Those cuts form a
//! laminar family: every resulting region touches the boundary circle in a
//! gap between consecutive crossing points, so sampling one point per gap
//! finds every region, and the side of each cut identifies the region.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::arrangement::{self, FaceSignature, UnionBoundary};
use crate::error::{Error, Result};
use crate::geom::{
    ccw_span, circle_circle_intersect, disks_overlap, in_ccw_interval, point_in_disk, Containment,
    Disk, Point, TolerancePolicy, TAU,
};
use crate::graph::{
    augmented_st_graph, connected_components, intersection_graph, shortest_disk_sequence, SigmaPath,
};

/// The cutting path. `waypoints` runs from a point on the first sequence
/// disk's circle (on the boundary of the source face) through one point per
/// consecutive lens to a point on the last disk's circle. `chain` is the
/// materialized polyline: the waypoints plus short lead-in and lead-out
/// segments inside the source and target faces, so every circle contact is a
/// proper transversal crossing.
#[derive(Clone, Debug)]
pub struct PiPath {
    pub waypoints: Vec<Point>,
    pub source_face: FaceSignature,
    pub target_face: FaceSignature,
    pub chain: Vec<Point>,
}

/// A connected component of one disk minus the cutting chain.
#[derive(Clone, Debug)]
pub struct DiskPiece {
    pub disk_id: usize,
    pub piece_index: usize,
    pub representative: Point,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PieceRef {
    pub disk_id: usize,
    pub piece_index: usize,
}

/// Crossing of the chain with one circle, ordered by chain parameter
/// (segment index plus fraction).
#[derive(Clone, Debug)]
struct Crossing {
    param: f64,
    point: Point,
    angle: f64,
}

/// One maximal piece of the chain inside a disk, entering and leaving
/// through the circle.
#[derive(Clone, Debug)]
struct CrossPolyline {
    enter_angle: f64,
    exit_angle: f64,
    points: Vec<Point>,
}

#[derive(Clone, Debug)]
struct Gap {
    sample: Point,
    piece: usize,
}

struct CutDisk {
    disk: Disk,
    crossings: Vec<Crossing>,
    polylines: Vec<CrossPolyline>,
    gaps: Vec<Gap>,
    /// Per piece, the side taken with respect to each crossing polyline.
    piece_sides: Vec<Vec<bool>>,
    representatives: Vec<Point>,
}

/// All disks of one cut: pieces plus enough structure to locate points.
pub struct DiskPieces {
    disks: Vec<Disk>,
    cut: BTreeMap<usize, CutDisk>,
    chain: Vec<Point>,
    tol: TolerancePolicy,
    ray_dirs: Vec<(f64, f64)>,
}

/// Intersection graph of disk pieces, unit cost each. Edges only join pieces
/// of different disks.
#[derive(Clone, Debug, Default)]
pub struct PieceGraph {
    pub pieces: Vec<DiskPiece>,
    pub adjacency: BTreeMap<PieceRef, BTreeSet<PieceRef>>,
    pub pieces_by_disk: BTreeMap<usize, Vec<PieceRef>>,
}

impl PieceGraph {
    pub fn add_piece(&mut self, piece: DiskPiece) {
        let r = PieceRef { disk_id: piece.disk_id, piece_index: piece.piece_index };
        self.adjacency.entry(r).or_default();
        self.pieces_by_disk.entry(piece.disk_id).or_default().push(r);
        self.pieces.push(piece);
    }

    pub fn add_edge(&mut self, a: PieceRef, b: PieceRef) {
        if a.disk_id == b.disk_id {
            return;
        }
        self.adjacency.entry(a).or_default().insert(b);
        self.adjacency.entry(b).or_default().insert(a);
    }
}

/// Result of one two-point run, with enough trace to render.
#[derive(Clone, Debug)]
pub struct TwoPointOutcome {
    pub chosen: BTreeSet<usize>,
    pub sigma: Vec<usize>,
    pub waypoints: Vec<Point>,
    pub piece_path: Vec<PieceRef>,
    pub piece_path_points: Vec<Point>,
}

fn dist_point_segment(p: Point, a: Point, b: Point) -> f64 {
    let (ex, ey) = (b.x - a.x, b.y - a.y);
    let len2 = ex * ex + ey * ey;
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = (((p.x - a.x) * ex + (p.y - a.y) * ey) / len2).clamp(0.0, 1.0);
    p.dist(Point::new(a.x + t * ex, a.y + t * ey))
}

fn dist_to_chain(p: Point, chain: &[Point]) -> f64 {
    chain.windows(2).map(|w| dist_point_segment(p, w[0], w[1])).fold(f64::INFINITY, f64::min)
}

/// All crossings of the chain with the circle of `disk`, sorted by chain
/// parameter. Chain vertices lying on the circle count as one transversal
/// crossing; tangential contact is degenerate.
fn chain_circle_crossings(
    chain: &[Point],
    disk: &Disk,
    tol: &TolerancePolicy,
) -> Result<Vec<Crossing>> {
    let eps = tol.eps;
    let n = chain.len();
    let bd: Vec<f64> = chain.iter().map(|&v| disk.boundary_dist(v)).collect();
    let on_circle: Vec<bool> = bd.iter().map(|d| d.abs() <= eps).collect();
    // Crossings pair up into entry/exit intervals only when the chain starts
    // and ends strictly outside the disk.
    if bd[0] <= eps || bd[n - 1] <= eps {
        return Err(Error::DegenerateInput(format!(
            "chain endpoint lies on or inside the circle of disk {}",
            disk.id
        )));
    }
    let mut crossings = Vec::new();
    for j in 1..n - 1 {
        if !on_circle[j] {
            continue;
        }
        // Side of the chain just before and just after the vertex. When the
        // neighbor vertex is itself on the circle the segment is a chord, so
        // its midpoint gives the side.
        let side = |k: usize| -> f64 {
            if on_circle[k] {
                let mid =
                    Point::new(0.5 * (chain[j].x + chain[k].x), 0.5 * (chain[j].y + chain[k].y));
                disk.boundary_dist(mid)
            } else {
                bd[k]
            }
        };
        let before = side(j - 1);
        let after = side(j + 1);
        if before.abs() <= eps || after.abs() <= eps || before * after >= 0.0 {
            return Err(Error::DegenerateInput(format!(
                "chain touches the circle of disk {} tangentially at a vertex",
                disk.id
            )));
        }
        crossings.push(Crossing {
            param: j as f64,
            point: chain[j],
            angle: disk.angle_of(chain[j]),
        });
    }
    // Window that keeps vertex crossings from double-counting as roots of
    // the two adjacent segments.
    const VERTEX_WINDOW: f64 = 1e-6;
    for j in 0..n - 1 {
        let (a, b) = (chain[j], chain[j + 1]);
        let (ex, ey) = (b.x - a.x, b.y - a.y);
        let (fx, fy) = (a.x - disk.center.x, a.y - disk.center.y);
        let qa = ex * ex + ey * ey;
        if qa == 0.0 {
            continue;
        }
        let qb = 2.0 * (ex * fx + ey * fy);
        let qc = fx * fx + fy * fy - disk.radius * disk.radius;
        let lo = if on_circle[j] { VERTEX_WINDOW } else { 0.0 };
        let hi = if on_circle[j + 1] { 1.0 - VERTEX_WINDOW } else { 1.0 };
        let tmin = (-qb / (2.0 * qa)).clamp(0.0, 1.0);
        let closest = Point::new(a.x + tmin * ex, a.y + tmin * ey);
        let dmin = disk.boundary_dist(closest);
        if dmin.abs() <= eps && tmin > lo && tmin < hi {
            return Err(Error::DegenerateInput(format!(
                "chain segment grazes the circle of disk {}",
                disk.id
            )));
        }
        let disc = qb * qb - 4.0 * qa * qc;
        if disc <= 0.0 {
            continue;
        }
        let sq = disc.sqrt();
        for t in [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)] {
            if t < lo || t > hi {
                continue;
            }
            let p = Point::new(a.x + t * ex, a.y + t * ey);
            crossings.push(Crossing { param: j as f64 + t, point: p, angle: disk.angle_of(p) });
        }
    }
    crossings.sort_by(|a, b| a.param.total_cmp(&b.param));
    if crossings.len() % 2 != 0 {
        return Err(Error::DegenerateInput(format!(
            "odd number of chain crossings on disk {}",
            disk.id
        )));
    }
    Ok(crossings)
}

/// Picks the cutting path for `sigma`: arc midpoints on the source and
/// target face boundaries, lens centers between consecutive disks, and the
/// short lead segments that turn the circle contacts into proper crossings.
/// All path invariants are verified before returning.
pub fn choose_waypoints(
    sigma: &SigmaPath,
    disks: &[Disk],
    s: Point,
    t: Point,
    tol: &TolerancePolicy,
) -> Result<PiPath> {
    if sigma.disks.is_empty() {
        return Err(Error::PiConstructionFailed("empty disk sequence".into()));
    }
    let ub = UnionBoundary::build(disks, tol)?;
    let source_face = ub.signature(s)?;
    let target_face = ub.signature(t)?;
    if source_face.covered || target_face.covered {
        return Err(Error::NotSeparated);
    }
    let s_prime = face_arc_midpoint(&ub, &source_face, sigma.disks[0])?;
    let t_prime = face_arc_midpoint(&ub, &target_face, *sigma.disks.last().unwrap())?;

    let by_id: BTreeMap<usize, &Disk> = disks.iter().map(|d| (d.id, d)).collect();
    let mut waypoints = vec![s_prime];
    for w in sigma.disks.windows(2) {
        let (da, db) = (by_id[&w[0]], by_id[&w[1]]);
        let pts = circle_circle_intersect(da, db, tol)?;
        let x = if pts.len() == 2 {
            Point::new(0.5 * (pts[0].x + pts[1].x), 0.5 * (pts[0].y + pts[1].y))
        } else {
            // Nested pair: the smaller center is interior to both.
            if da.radius < db.radius {
                da.center
            } else {
                db.center
            }
        };
        waypoints.push(x);
    }
    waypoints.push(t_prime);

    let lead_s = lead_point(s_prime, waypoints[1], disks, sigma.disks[0], tol)?;
    let lead_t = lead_point(
        t_prime,
        waypoints[waypoints.len() - 2],
        disks,
        *sigma.disks.last().unwrap(),
        tol,
    )?;
    let mut chain = Vec::with_capacity(waypoints.len() + 2);
    chain.push(lead_s);
    chain.extend_from_slice(&waypoints);
    chain.push(lead_t);

    validate_pi(&chain, &waypoints, sigma, disks, tol)?;
    Ok(PiPath { waypoints, source_face, target_face, chain })
}

/// Midpoint of the first arc of `disk_id` on a cycle bounding the face.
fn face_arc_midpoint(ub: &UnionBoundary, face: &FaceSignature, disk_id: usize) -> Result<Point> {
    for cycle_idx in ub.face_cycles(face)? {
        for arc in &ub.cycles[cycle_idx].arcs {
            if arc.disk_id == disk_id {
                let disk = ub.disks().iter().find(|d| d.id == disk_id).unwrap();
                return Ok(disk.at_angle(arc.mid_angle()));
            }
        }
    }
    Err(Error::InternalError(format!("disk {disk_id} owns no arc on the face boundary")))
}

/// Endpoint of the short lead segment: from the boundary point `from`,
/// step away from `inward` into the adjacent complement face.
fn lead_point(
    from: Point,
    inward: Point,
    disks: &[Disk],
    own_id: usize,
    tol: &TolerancePolicy,
) -> Result<Point> {
    let (ux, uy) = from.dir_to(inward);
    let clearance = disks
        .iter()
        .filter(|d| d.id != own_id)
        .map(|d| d.boundary_dist(from).abs())
        .fold(f64::INFINITY, f64::min);
    let eps = tol.eps;
    let mut len = 0.5 * tol.min_feature.min(clearance);
    for _ in 0..4 {
        if len < 4.0 * eps {
            break;
        }
        let tip = Point::new(from.x - len * ux, from.y - len * uy);
        let clear = disks.iter().all(|d| d.boundary_dist(tip) > 2.0 * eps);
        if clear {
            return Ok(tip);
        }
        len *= 0.25;
    }
    Err(Error::PiConstructionFailed(format!("no clear lead segment off disk {own_id}")))
}

fn segments_properly_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    let cross =
        |o: Point, p: Point, q: Point| (p.x - o.x) * (q.y - o.y) - (p.y - o.y) * (q.x - o.x);
    let d1 = cross(a, b, c);
    let d2 = cross(a, b, d);
    let d3 = cross(c, d, a);
    let d4 = cross(c, d, b);
    (d1 * d2 < 0.0) && (d3 * d4 < 0.0)
}

/// Checks the path invariants: simple chain, each lens waypoint inside its
/// two disks, exactly one chain interval inside each sequence disk, and the
/// sequence disks covering the chain from its first to its last waypoint.
fn validate_pi(
    chain: &[Point],
    waypoints: &[Point],
    sigma: &SigmaPath,
    disks: &[Disk],
    tol: &TolerancePolicy,
) -> Result<()> {
    let by_id: BTreeMap<usize, &Disk> = disks.iter().map(|d| (d.id, d)).collect();
    for (i, w) in sigma.disks.windows(2).enumerate() {
        let x = waypoints[i + 1];
        for id in w {
            if point_in_disk(x, by_id[id], tol) != Containment::Inside {
                return Err(Error::PiConstructionFailed(format!(
                    "lens waypoint {i} is not interior to disk {id}"
                )));
            }
        }
    }
    for i in 0..chain.len() - 1 {
        for j in (i + 2)..chain.len() - 1 {
            if segments_properly_cross(chain[i], chain[i + 1], chain[j], chain[j + 1]) {
                return Err(Error::PiConstructionFailed("chain self-intersects".into()));
            }
        }
    }

    // Property (c): one interval per sequence disk. Property (b): the
    // intervals cover the chain between the first and last waypoint.
    let mut intervals = Vec::new();
    for id in &sigma.disks {
        let crossings = chain_circle_crossings(chain, by_id[id], tol)
            .map_err(|e| Error::PiConstructionFailed(e.to_string()))?;
        if crossings.len() != 2 {
            return Err(Error::PiConstructionFailed(format!(
                "chain meets disk {id} in {} crossings instead of 2",
                crossings.len()
            )));
        }
        intervals.push((crossings[0].param, crossings[1].param));
    }
    intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
    let start = 1.0;
    let end = (chain.len() - 2) as f64;
    let slack = 1e-7;
    let mut reach = start;
    for (lo, hi) in intervals {
        if lo > reach + slack {
            return Err(Error::PiConstructionFailed(
                "sequence disks leave part of the chain uncovered".into(),
            ));
        }
        reach = reach.max(hi);
    }
    if reach + slack < end {
        return Err(Error::PiConstructionFailed(
            "sequence disks leave the chain tail uncovered".into(),
        ));
    }
    Ok(())
}

/// Cuts every disk along the chain of `pi`.
pub fn cut_into_pieces(disks: &[Disk], pi: &PiPath, tol: &TolerancePolicy) -> Result<DiskPieces> {
    cut_with_chain(disks, &pi.chain, tol)
}

pub(crate) fn cut_with_chain(
    disks: &[Disk],
    chain: &[Point],
    tol: &TolerancePolicy,
) -> Result<DiskPieces> {
    // A chain segment through a circle-circle vertex makes piece identity
    // ambiguous there.
    for i in 0..disks.len() {
        for j in (i + 1)..disks.len() {
            for v in circle_circle_intersect(&disks[i], &disks[j], tol)? {
                if dist_to_chain(v, chain) <= tol.eps {
                    return Err(Error::DegenerateInput(format!(
                        "chain passes through an intersection point of disks {} and {}",
                        disks[i].id, disks[j].id
                    )));
                }
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5ca1_ab1e_d15c_0000);
    let ray_dirs: Vec<(f64, f64)> = (0..32)
        .map(|_| {
            let t: f64 = rng.gen_range(0.0..TAU);
            (t.cos(), t.sin())
        })
        .collect();

    let mut cut = BTreeMap::new();
    for disk in disks {
        cut.insert(disk.id, cut_single_disk(disk, chain, tol, &ray_dirs)?);
    }
    Ok(DiskPieces { disks: disks.to_vec(), cut, chain: chain.to_vec(), tol: *tol, ray_dirs })
}

fn cut_single_disk(
    disk: &Disk,
    chain: &[Point],
    tol: &TolerancePolicy,
    ray_dirs: &[(f64, f64)],
) -> Result<CutDisk> {
    let crossings = chain_circle_crossings(chain, disk, tol)?;
    if crossings.is_empty() {
        return Ok(CutDisk {
            disk: disk.clone(),
            crossings,
            polylines: Vec::new(),
            gaps: Vec::new(),
            piece_sides: vec![vec![]],
            representatives: vec![disk.center],
        });
    }

    let mut polylines = Vec::new();
    for pair in crossings.chunks(2) {
        let (enter, exit) = (&pair[0], &pair[1]);
        let mut points = vec![enter.point];
        let lo = enter.param.floor() as usize;
        let hi = exit.param.ceil() as usize;
        for (j, &v) in chain.iter().enumerate().take(hi).skip(lo + 1) {
            let pj = j as f64;
            if pj > enter.param && pj < exit.param {
                points.push(v);
            }
        }
        points.push(exit.point);
        polylines.push(CrossPolyline { enter_angle: enter.angle, exit_angle: exit.angle, points });
    }

    // Boundary gaps between consecutive crossing angles; each gap belongs to
    // exactly one piece.
    let mut angles: Vec<f64> = crossings.iter().map(|c| c.angle).collect();
    angles.sort_by(f64::total_cmp);
    let ang_eps = 4.0 * tol.eps / disk.radius;
    let mut gaps = Vec::new();
    for m in 0..angles.len() {
        let a0 = angles[m];
        let a1 = angles[(m + 1) % angles.len()];
        let span = ccw_span(a0, a1);
        if span <= ang_eps {
            return Err(Error::DegenerateInput(format!(
                "chain crossings nearly coincide on the circle of disk {}",
                disk.id
            )));
        }
        let mid_angle = (a0 + 0.5 * span).rem_euclid(TAU);
        let mid = disk.at_angle(mid_angle);
        let sample = gap_sample(mid, disk.center, chain, disk.radius, tol)?;
        let sides: Vec<bool> = polylines
            .iter()
            .map(|p| in_ccw_interval(mid_angle, p.exit_angle, p.enter_angle))
            .collect();
        gaps.push((sample, sides));
    }

    // Group gaps by side vector; the laminar structure makes the groups the
    // pieces, one more than the number of cuts.
    let mut piece_sides: Vec<Vec<bool>> = Vec::new();
    let mut representatives: Vec<Point> = Vec::new();
    let mut out_gaps = Vec::new();
    for (sample, sides) in gaps {
        let piece = match piece_sides.iter().position(|s| *s == sides) {
            Some(i) => i,
            None => {
                piece_sides.push(sides.clone());
                representatives.push(sample);
                piece_sides.len() - 1
            }
        };
        out_gaps.push(Gap { sample, piece });
    }
    if piece_sides.len() != polylines.len() + 1 {
        return Err(Error::InternalError(format!(
            "disk {} split into {} pieces by {} cuts",
            disk.id,
            piece_sides.len(),
            polylines.len()
        )));
    }

    let cd = CutDisk {
        disk: disk.clone(),
        crossings,
        polylines,
        gaps: out_gaps,
        piece_sides,
        representatives,
    };
    // The angular side rule and the parity rule must agree on every sample.
    for gap in &cd.gaps {
        let parity = side_vector(&cd, gap.sample, tol, ray_dirs)?;
        if parity != cd.piece_sides[gap.piece] {
            return Err(Error::InternalError(format!(
                "side classification mismatch on disk {}",
                disk.id
            )));
        }
    }
    Ok(cd)
}

/// Point just inside the circle at a boundary gap, displaced towards an
/// interior anchor by less than the gap's clearance from the chain.
fn gap_sample(
    mid: Point,
    anchor: Point,
    chain: &[Point],
    limit: f64,
    tol: &TolerancePolicy,
) -> Result<Point> {
    let clearance = dist_to_chain(mid, chain).min(mid.dist(anchor)).min(limit);
    let delta = 0.5 * clearance.min(tol.min_feature);
    if delta < 4.0 * tol.eps {
        return Err(Error::DegenerateInput("chain leaves no room next to a boundary gap".into()));
    }
    let (ux, uy) = mid.dir_to(anchor);
    Ok(Point::new(mid.x + delta * ux, mid.y + delta * uy))
}

/// Side of `z` with respect to each crossing polyline of the disk, by the
/// parity of ray crossings with the cut closed off along the circle.
fn side_vector(
    cd: &CutDisk,
    z: Point,
    tol: &TolerancePolicy,
    ray_dirs: &[(f64, f64)],
) -> Result<Vec<bool>> {
    cd.polylines.iter().map(|p| jordan_parity(z, p, &cd.disk, tol, ray_dirs)).collect()
}

/// True when `z` is inside the closed curve formed by the polyline and the
/// counterclockwise circle arc from its exit back to its entry.
fn jordan_parity(
    z: Point,
    poly: &CrossPolyline,
    disk: &Disk,
    tol: &TolerancePolicy,
    ray_dirs: &[(f64, f64)],
) -> Result<bool> {
    let eps = tol.eps;
    'attempt: for &dir in ray_dirs {
        let mut count = 0usize;
        for w in poly.points.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (ex, ey) = (b.x - a.x, b.y - a.y);
            let seg_len = ex.hypot(ey);
            let denom = dir.0 * ey - dir.1 * ex;
            let (wx, wy) = (a.x - z.x, a.y - z.y);
            if denom.abs() <= 1e-14 {
                // Parallel; a forward segment near the ray line is unsafe.
                let line_off = (dir.0 * wy - dir.1 * wx).abs();
                if line_off <= 10.0 * eps && (wx * dir.0 + wy * dir.1) > -seg_len {
                    continue 'attempt;
                }
                continue;
            }
            let t = (wx * ey - wy * ex) / denom;
            let s = (wx * dir.1 - wy * dir.0) / denom;
            if t <= eps {
                if t > -eps && s > 0.0 && s < 1.0 {
                    continue 'attempt;
                }
                continue;
            }
            let s_slack = (10.0 * eps) / seg_len.max(1e-12);
            if (s > -s_slack && s < s_slack) || (s > 1.0 - s_slack && s < 1.0 + s_slack) {
                continue 'attempt;
            }
            if s > 0.0 && s < 1.0 {
                count += 1;
            }
        }
        // Closing arc, counterclockwise from exit to entry.
        let (cx, cy) = (disk.center.x, disk.center.y);
        let (px, py) = (z.x - cx, z.y - cy);
        let b = dir.0 * px + dir.1 * py;
        let line_dist = (dir.0 * py - dir.1 * px).abs();
        if (line_dist - disk.radius).abs() <= 4.0 * eps && -b > 0.0 {
            continue 'attempt;
        }
        let disc = disk.radius * disk.radius - line_dist * line_dist;
        if disc > 0.0 {
            let sq = disc.sqrt();
            let span = ccw_span(poly.exit_angle, poly.enter_angle);
            let slack = (10.0 * eps) / disk.radius;
            for t in [-b - sq, -b + sq] {
                if t <= eps {
                    if t > -eps {
                        continue 'attempt;
                    }
                    continue;
                }
                let q = Point::new(z.x + t * dir.0, z.y + t * dir.1);
                let theta = disk.angle_of(q);
                let off = ccw_span(poly.exit_angle, theta);
                if off <= slack || (off >= span - slack && off <= span + slack) {
                    continue 'attempt;
                }
                if off < span {
                    count += 1;
                }
            }
        }
        return Ok(count % 2 == 1);
    }
    Err(Error::RayDegeneracy(ray_dirs.len()))
}

impl DiskPieces {
    pub fn pieces(&self) -> Vec<DiskPiece> {
        let mut out = Vec::new();
        for (id, cd) in &self.cut {
            for (i, rep) in cd.representatives.iter().enumerate() {
                out.push(DiskPiece { disk_id: *id, piece_index: i, representative: *rep });
            }
        }
        out
    }

    pub fn piece_count(&self, disk_id: usize) -> usize {
        self.cut[&disk_id].piece_sides.len()
    }

    /// Which piece of `disk_id` contains `z`. The point must be strictly
    /// inside the disk and off the chain.
    pub fn piece_of_point(&self, disk_id: usize, z: Point) -> Result<usize> {
        let cd = &self.cut[&disk_id];
        let sides = side_vector(cd, z, &self.tol, &self.ray_dirs)?;
        cd.piece_sides.iter().position(|s| *s == sides).ok_or_else(|| {
            Error::InternalError(format!("point matches no piece of disk {disk_id}"))
        })
    }
}

/// Builds the piece intersection graph: pieces of different disks are
/// adjacent when they share a point off the chain. For each overlapping pair
/// the lens minus the chain is explored through its boundary gaps, which
/// reach every region of the lens.
pub fn piece_graph(pieces: &DiskPieces, tol: &TolerancePolicy) -> Result<PieceGraph> {
    let mut h = PieceGraph::default();
    for p in pieces.pieces() {
        h.add_piece(p);
    }
    let disks = &pieces.disks;
    for i in 0..disks.len() {
        for j in (i + 1)..disks.len() {
            if !disks_overlap(&disks[i], &disks[j], tol) {
                continue;
            }
            let (a, b) = (&disks[i], &disks[j]);
            let corners = circle_circle_intersect(a, b, tol)?;
            if corners.is_empty() {
                lens_edges_nested(pieces, a, b, &mut h)?;
            } else {
                lens_edges_crossing(pieces, a, b, &corners, tol, &mut h)?;
            }
        }
    }
    Ok(h)
}

/// Nested pair: the inner disk is the whole lens, so its own boundary gaps
/// already sample every region.
fn lens_edges_nested(pieces: &DiskPieces, a: &Disk, b: &Disk, h: &mut PieceGraph) -> Result<()> {
    let (inner, outer) = if a.radius < b.radius { (a, b) } else { (b, a) };
    let cd = &pieces.cut[&inner.id];
    let samples: Vec<(usize, Point)> = if cd.gaps.is_empty() {
        vec![(0, cd.representatives[0])]
    } else {
        cd.gaps.iter().map(|g| (g.piece, g.sample)).collect()
    };
    for (inner_piece, z) in samples {
        let outer_piece = pieces.piece_of_point(outer.id, z)?;
        h.add_edge(
            PieceRef { disk_id: inner.id, piece_index: inner_piece },
            PieceRef { disk_id: outer.id, piece_index: outer_piece },
        );
    }
    Ok(())
}

/// Properly crossing pair: walk both lens boundary arcs, cut them at the
/// chain crossings that fall inside the other disk, and sample each gap
/// towards the lens chord midpoint.
fn lens_edges_crossing(
    pieces: &DiskPieces,
    a: &Disk,
    b: &Disk,
    corners: &[Point],
    tol: &TolerancePolicy,
    h: &mut PieceGraph,
) -> Result<()> {
    let lens_mid =
        Point::new(0.5 * (corners[0].x + corners[1].x), 0.5 * (corners[0].y + corners[1].y));
    for (own, other) in [(a, b), (b, a)] {
        let cu = own.angle_of(corners[0]);
        let cv = own.angle_of(corners[1]);
        // The lens arc of `own` is the angular interval interior to `other`.
        let probe = own.at_angle((cu + 0.5 * ccw_span(cu, cv)).rem_euclid(TAU));
        let (lo, hi) = if point_in_disk(probe, other, tol) == Containment::Inside {
            (cu, cv)
        } else {
            (cv, cu)
        };
        let mut events = vec![0.0, ccw_span(lo, hi)];
        for c in &pieces.cut[&own.id].crossings {
            match point_in_disk(c.point, other, tol) {
                Containment::Inside => {
                    let off = ccw_span(lo, c.angle);
                    if off < ccw_span(lo, hi) {
                        events.push(off);
                    }
                }
                Containment::Boundary => {
                    return Err(Error::DegenerateInput(format!(
                        "chain crosses the circle of disk {} at a lens corner with disk {}",
                        own.id, other.id
                    )))
                }
                Containment::Outside => {}
            }
        }
        events.sort_by(f64::total_cmp);
        let ang_eps = 4.0 * tol.eps / own.radius;
        for w in events.windows(2) {
            let span = w[1] - w[0];
            if span <= ang_eps {
                return Err(Error::DegenerateInput(format!(
                    "degenerate boundary gap on the lens of disks {} and {}",
                    a.id, b.id
                )));
            }
            let mid_angle = (lo + w[0] + 0.5 * span).rem_euclid(TAU);
            let mid = own.at_angle(mid_angle);
            let z = gap_sample(mid, lens_mid, &pieces.chain, own.radius, tol)?;
            if point_in_disk(z, own, tol) != Containment::Inside
                || point_in_disk(z, other, tol) != Containment::Inside
            {
                return Err(Error::DegenerateInput(format!(
                    "lens sample escaped the lens of disks {} and {}",
                    a.id, b.id
                )));
            }
            let pa = pieces.piece_of_point(a.id, z)?;
            let pb = pieces.piece_of_point(b.id, z)?;
            h.add_edge(
                PieceRef { disk_id: a.id, piece_index: pa },
                PieceRef { disk_id: b.id, piece_index: pb },
            );
        }
    }
    Ok(())
}

/// For each sequence disk, the shortest piece path in `h` between its two
/// pieces; returns the owning disks of the overall best path. Ties resolve
/// by disk id, then by lexicographic piece sequence.
pub fn best_piece_cycle(
    h: &PieceGraph,
    sigma: &SigmaPath,
) -> Result<(BTreeSet<usize>, Vec<PieceRef>)> {
    let mut best: Option<(usize, usize, Vec<PieceRef>)> = None;
    for &d in &sigma.disks {
        let refs = h
            .pieces_by_disk
            .get(&d)
            .ok_or_else(|| Error::InternalError(format!("sigma disk {d} has no pieces")))?;
        if refs.len() != 2 {
            return Err(Error::InternalError(format!(
                "sigma disk {d} has {} pieces instead of 2",
                refs.len()
            )));
        }
        let (u, v) = (refs[0].min(refs[1]), refs[0].max(refs[1]));
        let Some(path) = lexicographic_shortest_path(h, u, v) else {
            continue;
        };
        let candidate = (path.len(), d, path);
        let better = match &best {
            None => true,
            Some(b) => (candidate.0, candidate.1, &candidate.2) < (b.0, b.1, &b.2),
        };
        if better {
            best = Some(candidate);
        }
    }
    let (_, _, path) = best.ok_or(Error::NoPieceCycle)?;
    let chosen = path.iter().map(|p| p.disk_id).collect();
    Ok((chosen, path))
}

fn lexicographic_shortest_path(h: &PieceGraph, u: PieceRef, v: PieceRef) -> Option<Vec<PieceRef>> {
    let mut dist: BTreeMap<PieceRef, usize> = BTreeMap::new();
    dist.insert(v, 0);
    let mut queue = VecDeque::from([v]);
    while let Some(x) = queue.pop_front() {
        let dx = dist[&x];
        for &y in &h.adjacency[&x] {
            if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(y) {
                e.insert(dx + 1);
                queue.push_back(y);
            }
        }
    }
    let total = *dist.get(&u)?;
    let mut path = vec![u];
    let mut cur = u;
    for remaining in (0..total).rev() {
        let next = *h.adjacency[&cur].iter().find(|y| dist.get(y) == Some(&remaining))?;
        path.push(next);
        cur = next;
    }
    Some(path)
}

/// The full two-point algorithm, applied per connected component of the
/// overlap graph; the best component solution wins. The output is always
/// re-verified against the separation verifier.
pub fn separate_two_points(
    disks: &[Disk],
    s: Point,
    t: Point,
    tol: &TolerancePolicy,
) -> Result<BTreeSet<usize>> {
    Ok(separate_two_points_traced(disks, s, t, tol)?.chosen)
}

pub fn separate_two_points_traced(
    disks: &[Disk],
    s: Point,
    t: Point,
    tol: &TolerancePolicy,
) -> Result<TwoPointOutcome> {
    for d in disks {
        if point_in_disk(s, d, tol) != Containment::Outside
            || point_in_disk(t, d, tol) != Containment::Outside
        {
            return Err(Error::NotSeparated);
        }
    }
    if !arrangement::separates(disks, s, t, tol)? {
        return Err(Error::NotSeparated);
    }
    let graph = intersection_graph(disks, tol);
    let by_id: BTreeMap<usize, &Disk> = disks.iter().map(|d| (d.id, d)).collect();
    let mut best: Option<(usize, usize, TwoPointOutcome)> = None;
    for component in connected_components(&graph) {
        let comp_disks: Vec<Disk> = component.iter().map(|id| by_id[id].clone()).collect();
        if arrangement::overlap_graph_is_forest(&comp_disks, tol) {
            continue;
        }
        if !arrangement::separates(&comp_disks, s, t, tol)? {
            continue;
        }
        let outcome = component_pipeline_with_retry(&comp_disks, s, t, tol)?;
        let chosen_disks: Vec<Disk> = outcome.chosen.iter().map(|id| by_id[id].clone()).collect();
        if !arrangement::separates(&chosen_disks, s, t, tol)? {
            return Err(Error::InternalError(
                "two-point output failed separation re-verification".into(),
            ));
        }
        let min_id = *component.iter().next().unwrap();
        let key = (outcome.chosen.len(), min_id);
        if best.as_ref().is_none_or(|(sz, id, _)| key < (*sz, *id)) {
            best = Some((key.0, key.1, outcome));
        }
    }
    best.map(|(_, _, o)| o).ok_or(Error::NoPieceCycle)
}

/// On a numerical degeneracy the component is re-perturbed with a fresh seed
/// and the pipeline rerun; the final answer is still verified against the
/// original geometry by the caller.
fn component_pipeline_with_retry(
    comp_disks: &[Disk],
    s: Point,
    t: Point,
    tol: &TolerancePolicy,
) -> Result<TwoPointOutcome> {
    let mut attempt_disks = comp_disks.to_vec();
    let mut last_err = None;
    for attempt in 0..3u64 {
        match component_pipeline(&attempt_disks, s, t, tol) {
            Ok(outcome) => return Ok(outcome),
            Err(
                e @ (Error::DegenerateInput(_)
                | Error::PiConstructionFailed(_)
                | Error::RayDegeneracy(_)),
            ) => {
                last_err = Some(e);
                let mut rng = ChaCha8Rng::seed_from_u64(0xfeed_beef ^ attempt);
                attempt_disks = comp_disks.to_vec();
                let amp = 0.5 * tol.min_feature;
                for d in &mut attempt_disks {
                    d.center.x += rng.gen_range(-amp..=amp);
                    d.center.y += rng.gen_range(-amp..=amp);
                }
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::InternalError("pipeline retry exhausted".into())))
}

fn component_pipeline(
    comp_disks: &[Disk],
    s: Point,
    t: Point,
    tol: &TolerancePolicy,
) -> Result<TwoPointOutcome> {
    let g = augmented_st_graph(comp_disks, s, t, tol)?;
    let sigma = shortest_disk_sequence(&g)?;
    let pi = choose_waypoints(&sigma, comp_disks, s, t, tol)?;
    let pieces = cut_into_pieces(comp_disks, &pi, tol)?;
    let h = piece_graph(&pieces, tol)?;
    let (chosen, path) = best_piece_cycle(&h, &sigma)?;
    let reps: BTreeMap<PieceRef, Point> = h
        .pieces
        .iter()
        .map(|p| (PieceRef { disk_id: p.disk_id, piece_index: p.piece_index }, p.representative))
        .collect();
    let piece_path_points = path.iter().map(|r| reps[r]).collect();
    Ok(TwoPointOutcome {
        chosen,
        sigma: sigma.disks.clone(),
        waypoints: pi.waypoints.clone(),
        piece_path: path,
        piece_path_points,
    })
}
