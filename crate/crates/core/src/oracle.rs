//! Ground truth at desk scale: exact minimum separators by subset
//! enumeration and an independent grid flood-fill verifier.

use std::collections::BTreeSet;

use crate::arrangement::{overlap_graph_is_forest, UnionBoundary};
use crate::error::{Error, Result};
use crate::geom::{point_in_disk, Containment, Disk, Point, TolerancePolicy};

pub const DEFAULT_MAX_N: usize = 20;
pub const DEFAULT_GRID_RESOLUTION: f64 = 0.02;

/// True when `disks` separate every pair of `points` (covered points are
/// separated from everything).
pub fn subset_separates_all_pairs(
    disks: &[Disk],
    points: &[Point],
    tol: &TolerancePolicy,
) -> Result<bool> {
    let mut uncovered: Vec<Point> = Vec::new();
    for &p in points {
        let mut inside = false;
        for d in disks {
            match point_in_disk(p, d, tol) {
                Containment::Inside => inside = true,
                Containment::Boundary => {
                    return Err(Error::DegenerateInput(
                        "point lies on a circle during separation check".into(),
                    ))
                }
                Containment::Outside => {}
            }
        }
        if !inside {
            uncovered.push(p);
        }
    }
    if uncovered.len() < 2 {
        return Ok(true);
    }
    // Uncovered points are pairwise separated exactly when their face
    // signatures are pairwise distinct.
    let ub = UnionBoundary::build(disks, tol)?;
    let mut sigs = BTreeSet::new();
    for &p in &uncovered {
        if !sigs.insert(ub.signature(p)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exact minimum-cardinality subset separating all pairs of `points`, found
/// by enumerating subsets in increasing size and lexicographic id order.
/// Subsets whose overlap graph is a forest cannot enclose anything and are
/// skipped whenever two or more points stay uncovered.
pub fn exact_min_separator(
    disks: &[Disk],
    points: &[Point],
    max_n: usize,
    tol: &TolerancePolicy,
) -> Result<BTreeSet<usize>> {
    if disks.len() > max_n {
        return Err(Error::TooLarge(disks.len(), max_n));
    }
    let mut order: Vec<&Disk> = disks.iter().collect();
    order.sort_by_key(|d| d.id);
    let n = order.len();

    // cover_mask[i]: which disks strictly contain point i.
    let mut cover_mask = vec![0u64; points.len()];
    for (pi, &p) in points.iter().enumerate() {
        for (di, d) in order.iter().enumerate() {
            match point_in_disk(p, d, tol) {
                Containment::Inside => cover_mask[pi] |= 1 << di,
                Containment::Boundary => {
                    return Err(Error::DegenerateInput(format!(
                        "point {pi} lies on the circle of disk {}",
                        d.id
                    )))
                }
                Containment::Outside => {}
            }
        }
    }

    if points.len() < 2 {
        return Ok(BTreeSet::new());
    }

    for size in 0..=n {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            let mask: u64 = combo.iter().map(|&i| 1u64 << i).sum();
            let uncovered = cover_mask.iter().filter(|&&m| m & mask == 0).count();
            let subset: Vec<Disk> = combo.iter().map(|&i| order[i].clone()).collect();
            let ok = if uncovered < 2 {
                // Every pair has a covered endpoint.
                true
            } else if overlap_graph_is_forest(&subset, tol) {
                // A forest of disks has simply connected union and encloses
                // nothing.
                false
            } else {
                subset_separates_all_pairs(&subset, points, tol)?
            };
            if ok {
                return Ok(subset.iter().map(|d| d.id).collect());
            }
            if !next_combination(&mut combo, n) {
                break;
            }
        }
    }
    Err(Error::InternalError("input disks do not separate the points".into()))
}

/// Exact minimum subset separating the single pair `(s, t)`.
pub fn exact_min_two_point(
    disks: &[Disk],
    s: Point,
    t: Point,
    max_n: usize,
    tol: &TolerancePolicy,
) -> Result<BTreeSet<usize>> {
    exact_min_separator(disks, &[s, t], max_n, tol)
}

fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    if k == 0 {
        return false;
    }
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] != i + n - k {
            combo[i] += 1;
            for j in (i + 1)..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

struct Grid {
    min_x: f64,
    min_y: f64,
    res: f64,
    nx: usize,
    ny: usize,
}

impl Grid {
    fn cell_of(&self, p: Point) -> (usize, usize) {
        let cx = ((p.x - self.min_x) / self.res).floor() as isize;
        let cy = ((p.y - self.min_y) / self.res).floor() as isize;
        (cx.clamp(0, self.nx as isize - 1) as usize, cy.clamp(0, self.ny as isize - 1) as usize)
    }

    fn center(&self, ix: usize, iy: usize) -> Point {
        Point::new(
            self.min_x + (ix as f64 + 0.5) * self.res,
            self.min_y + (iy as f64 + 0.5) * self.res,
        )
    }

    fn idx(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }
}

fn mark_blocked(grid: &Grid, disks: &[Disk], slack: f64) -> Vec<bool> {
    let mut blocked = vec![false; grid.nx * grid.ny];
    for d in disks {
        let reach = d.radius + slack;
        if reach <= 0.0 {
            continue;
        }
        let x0 = (((d.center.x - reach) - grid.min_x) / grid.res).floor().max(0.0) as usize;
        let x1 = ((((d.center.x + reach) - grid.min_x) / grid.res).ceil() as usize)
            .min(grid.nx.saturating_sub(1));
        let y0 = (((d.center.y - reach) - grid.min_y) / grid.res).floor().max(0.0) as usize;
        let y1 = ((((d.center.y + reach) - grid.min_y) / grid.res).ceil() as usize)
            .min(grid.ny.saturating_sub(1));
        for iy in y0..=y1 {
            for ix in x0..=x1 {
                if !blocked[grid.idx(ix, iy)] && grid.center(ix, iy).dist(d.center) <= reach {
                    blocked[grid.idx(ix, iy)] = true;
                }
            }
        }
    }
    blocked
}

const SUBCELL_DEPTH: usize = 4;

/// True when the square cell provably lies inside the union of the disks.
/// A cell inside one disk qualifies directly; otherwise the four subcells
/// are tested recursively, which certifies lens walls thinner than a cell.
fn cell_in_union(min_x: f64, min_y: f64, size: f64, disks: &[Disk], depth: usize) -> bool {
    let half = 0.5 * size;
    let cx = min_x + half;
    let cy = min_y + half;
    let half_diag = half * std::f64::consts::SQRT_2;
    for d in disks {
        if d.center.dist(Point::new(cx, cy)) <= d.radius - half_diag {
            return true;
        }
    }
    if depth == 0 {
        return false;
    }
    for (ox, oy) in [(0.0, 0.0), (half, 0.0), (0.0, half), (half, half)] {
        if !cell_in_union(min_x + ox, min_y + oy, half, disks, depth - 1) {
            return false;
        }
    }
    true
}

/// Blocked cells for the optimistic rasterization: every cell fully inside
/// the union, established per cell by subdivision.
fn mark_blocked_optimistic(grid: &Grid, disks: &[Disk]) -> Vec<bool> {
    let half_diag = grid.res * std::f64::consts::FRAC_1_SQRT_2;
    let mut blocked = mark_blocked(grid, disks, -half_diag);
    // Only cells the union touches at all can be fully covered.
    let candidates = mark_blocked(grid, disks, half_diag);
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            let id = grid.idx(ix, iy);
            if candidates[id] && !blocked[id] {
                let min_x = grid.min_x + ix as f64 * grid.res;
                let min_y = grid.min_y + iy as f64 * grid.res;
                blocked[id] = cell_in_union(min_x, min_y, grid.res, disks, SUBCELL_DEPTH);
            }
        }
    }
    blocked
}

fn flood_reaches(
    grid: &Grid,
    blocked: &[bool],
    from: (usize, usize),
    to: (usize, usize),
    diagonal: bool,
) -> bool {
    if blocked[grid.idx(from.0, from.1)] || blocked[grid.idx(to.0, to.1)] {
        return false;
    }
    let target = grid.idx(to.0, to.1);
    let mut seen = vec![false; blocked.len()];
    let mut queue = std::collections::VecDeque::new();
    let start = grid.idx(from.0, from.1);
    seen[start] = true;
    queue.push_back((from.0 as isize, from.1 as isize));
    let steps: &[(isize, isize)] = if diagonal {
        &[(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)]
    } else {
        &[(1, 0), (-1, 0), (0, 1), (0, -1)]
    };
    while let Some((x, y)) = queue.pop_front() {
        if grid.idx(x as usize, y as usize) == target {
            return true;
        }
        for (dx, dy) in steps {
            let (nx, ny) = (x + dx, y + dy);
            if nx < 0 || ny < 0 || nx >= grid.nx as isize || ny >= grid.ny as isize {
                continue;
            }
            let id = grid.idx(nx as usize, ny as usize);
            if !seen[id] && !blocked[id] {
                seen[id] = true;
                queue.push_back((nx, ny));
            }
        }
    }
    false
}

fn build_grid(disks: &[Disk], p: Point, q: Point, res: f64) -> Grid {
    let max_r = disks.iter().map(|d| d.radius).fold(1.0_f64, f64::max);
    let pad = 2.0 * max_r;
    let mut min_x = p.x.min(q.x);
    let mut max_x = p.x.max(q.x);
    let mut min_y = p.y.min(q.y);
    let mut max_y = p.y.max(q.y);
    for d in disks {
        min_x = min_x.min(d.center.x - d.radius);
        max_x = max_x.max(d.center.x + d.radius);
        min_y = min_y.min(d.center.y - d.radius);
        max_y = max_y.max(d.center.y + d.radius);
    }
    min_x -= pad;
    min_y -= pad;
    max_x += pad;
    max_y += pad;
    let nx = (((max_x - min_x) / res).ceil() as usize).max(4);
    let ny = (((max_y - min_y) / res).ceil() as usize).max(4);
    Grid { min_x, min_y, res, nx, ny }
}

const GRID_REFINEMENTS: usize = 4;

/// Independent separation verdict by rasterization.
///
/// Two rasterizations sandwich the union: the conservative one blocks any
/// cell the union might touch, the optimistic one blocks only cells fully
/// inside a disk. Conservative reachability certifies "not separated";
/// optimistic unreachability certifies "separated". When neither certificate
/// fires the resolution is halved, up to four times.
pub fn grid_flood_separates(
    disks: &[Disk],
    p: Point,
    q: Point,
    resolution: f64,
    tol: &TolerancePolicy,
) -> Result<bool> {
    if !(resolution > 0.0) {
        return Err(Error::InvalidInstance("resolution must be positive".into()));
    }
    for d in disks {
        if point_in_disk(p, d, tol) == Containment::Inside
            || point_in_disk(q, d, tol) == Containment::Inside
        {
            return Ok(true);
        }
    }
    if disks.is_empty() {
        return Ok(false);
    }
    let mut res = resolution;
    for _ in 0..=GRID_REFINEMENTS {
        let grid = build_grid(disks, p, q, res);
        let half_diag = res * std::f64::consts::FRAC_1_SQRT_2;
        let conservative = mark_blocked(&grid, disks, half_diag);
        let pc = grid.cell_of(p);
        let qc = grid.cell_of(q);
        if flood_reaches(&grid, &conservative, pc, qc, false) {
            return Ok(false);
        }
        let optimistic = mark_blocked_optimistic(&grid, disks);
        if !flood_reaches(&grid, &optimistic, pc, qc, true) {
            return Ok(true);
        }
        res *= 0.5;
    }
    Err(Error::ResolutionExhausted)
}

/// Number of 4-connected components of conservative free cells. Only
/// meaningful when every complement feature is much wider than `resolution`.
pub fn grid_complement_face_count(disks: &[Disk], resolution: f64) -> usize {
    if disks.is_empty() {
        return 1;
    }
    let far = Point::new(0.0, 0.0);
    let grid = build_grid(disks, far, far, resolution);
    let half_diag = resolution * std::f64::consts::FRAC_1_SQRT_2;
    let blocked = mark_blocked(&grid, disks, half_diag);
    let mut comp = vec![usize::MAX; blocked.len()];
    let mut count = 0;
    for sy in 0..grid.ny {
        for sx in 0..grid.nx {
            let sid = grid.idx(sx, sy);
            if blocked[sid] || comp[sid] != usize::MAX {
                continue;
            }
            comp[sid] = count;
            let mut queue = std::collections::VecDeque::from([(sx as isize, sy as isize)]);
            while let Some((x, y)) = queue.pop_front() {
                for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= grid.nx as isize || ny >= grid.ny as isize {
                        continue;
                    }
                    let id = grid.idx(nx as usize, ny as usize);
                    if !blocked[id] && comp[id] == usize::MAX {
                        comp[id] = count;
                        queue.push_back((nx, ny));
                    }
                }
            }
            count += 1;
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::{ring_hole_point, three_disk_ring};

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    #[test]
    fn flood_single_disk_does_not_separate() {
        let disks = vec![Disk::unit(0, 0.0, 0.0)];
        let sep =
            grid_flood_separates(&disks, Point::new(-3.0, 0.0), Point::new(3.0, 0.0), 0.02, &tol())
                .unwrap();
        assert!(!sep);
    }

    #[test]
    fn flood_ring_separates_hole_from_outside() {
        let sep = grid_flood_separates(
            &three_disk_ring(),
            ring_hole_point(),
            Point::new(6.0, 6.0),
            0.01,
            &tol(),
        )
        .unwrap();
        assert!(sep);
    }

    #[test]
    fn flood_no_disks() {
        let sep =
            grid_flood_separates(&[], Point::new(0.0, 0.0), Point::new(5.0, 5.0), 0.02, &tol())
                .unwrap();
        assert!(!sep);
    }

    #[test]
    fn flood_gives_up_on_razor_thin_walls() {
        // Ring with one wall 1e-5 thick; neither rasterization can certify.
        let disks =
            vec![Disk::unit(0, 0.0, 0.0), Disk::unit(1, 2.0 - 1e-5, 0.0), Disk::unit(2, 1.0, 1.6)];
        let hole = Point::new(1.0, 0.55);
        let res = grid_flood_separates(&disks, hole, Point::new(8.0, 8.0), 0.02, &tol());
        assert!(matches!(res, Err(Error::ResolutionExhausted)));
    }

    #[test]
    fn flood_face_count_matches_ring() {
        assert_eq!(grid_complement_face_count(&three_disk_ring(), 0.005), 2);
        assert_eq!(grid_complement_face_count(&[Disk::unit(0, 0.0, 0.0)], 0.01), 1);
    }

    #[test]
    fn oracle_ring_needs_all_three() {
        let disks = three_disk_ring();
        let pts = [ring_hole_point(), Point::new(5.0, 5.0)];
        let best = exact_min_separator(&disks, &pts, DEFAULT_MAX_N, &tol()).unwrap();
        assert_eq!(best, BTreeSet::from([0, 1, 2]));
        // Minimality: every proper subset fails.
        for drop in best.iter() {
            let rest: Vec<Disk> = disks.iter().filter(|d| d.id != *drop).cloned().collect();
            assert!(!subset_separates_all_pairs(&rest, &pts, &tol()).unwrap());
        }
    }

    #[test]
    fn oracle_singleton_point_is_empty() {
        let disks = three_disk_ring();
        let best =
            exact_min_separator(&disks, &[Point::new(5.0, 5.0)], DEFAULT_MAX_N, &tol()).unwrap();
        assert!(best.is_empty());
    }

    #[test]
    fn oracle_ring_of_four() {
        let disks = vec![
            Disk::unit(0, 1.2, 0.0),
            Disk::unit(1, -1.2, 0.0),
            Disk::unit(2, 0.0, 1.2),
            Disk::unit(3, 0.0, -1.2),
        ];
        let best = exact_min_two_point(
            &disks,
            Point::new(0.0, 0.0),
            Point::new(9.0, 9.0),
            DEFAULT_MAX_N,
            &tol(),
        )
        .unwrap();
        assert_eq!(best, BTreeSet::from([0, 1, 2, 3]));
    }

    #[test]
    fn oracle_minimal_input_returns_itself() {
        // The ring is already minimal, so the oracle returns it whole.
        let disks = three_disk_ring();
        let pts = [ring_hole_point(), Point::new(5.0, 5.0)];
        let best = exact_min_separator(&disks, &pts, DEFAULT_MAX_N, &tol()).unwrap();
        assert_eq!(best.len(), disks.len());
    }

    #[test]
    fn forest_pruning_skips_only_non_separators() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let mut checked = 0usize;
        for seed in 1..=20u64 {
            let inst = crate::instance::generate_random_instance(10, 2, 4.4, seed, &tol()).unwrap();
            for _ in 0..500 {
                let subset: Vec<Disk> =
                    inst.disks.iter().filter(|_| rng.gen_bool(0.4)).cloned().collect();
                if !overlap_graph_is_forest(&subset, &tol()) {
                    continue;
                }
                let uncovered = inst
                    .points
                    .iter()
                    .filter(|&&p| {
                        subset.iter().all(|d| point_in_disk(p, d, &tol()) != Containment::Inside)
                    })
                    .count();
                if uncovered < 2 {
                    continue;
                }
                assert!(
                    !subset_separates_all_pairs(&subset, &inst.points, &tol()).unwrap(),
                    "forest subset separated the points"
                );
                checked += 1;
            }
        }
        assert!(checked >= 5000, "only {checked} forest subsets exercised");
    }

    #[test]
    fn oracle_too_large() {
        let disks: Vec<Disk> = (0..25).map(|i| Disk::unit(i, 3.0 * i as f64, 0.0)).collect();
        let res = exact_min_separator(
            &disks,
            &[Point::new(0.0, 5.0), Point::new(9.0, 5.0)],
            DEFAULT_MAX_N,
            &tol(),
        );
        assert!(matches!(res, Err(Error::TooLarge(25, DEFAULT_MAX_N))));
    }
}
