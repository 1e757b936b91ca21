//! Overlap graphs on disks and the augmented s-t graph whose shortest path
//! yields the disk sequence fed to the two-point separator.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::arrangement::UnionBoundary;
use crate::error::{Error, Result};
use crate::geom::{disks_overlap, Disk, Point, TolerancePolicy};

/// Undirected graph on disk ids with an edge per overlapping pair.
#[derive(Clone, Debug)]
pub struct IntersectionGraph {
    pub adjacency: BTreeMap<usize, BTreeSet<usize>>,
}

impl IntersectionGraph {
    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.adjacency.keys().copied()
    }

    pub fn neighbors(&self, id: usize) -> &BTreeSet<usize> {
        &self.adjacency[&id]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency.get(&a).is_some_and(|s| s.contains(&b))
    }
}

pub fn intersection_graph(disks: &[Disk], tol: &TolerancePolicy) -> IntersectionGraph {
    let mut adjacency: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for d in disks {
        adjacency.entry(d.id).or_default();
    }
    for i in 0..disks.len() {
        for j in (i + 1)..disks.len() {
            if disks_overlap(&disks[i], &disks[j], tol) {
                adjacency.get_mut(&disks[i].id).unwrap().insert(disks[j].id);
                adjacency.get_mut(&disks[j].id).unwrap().insert(disks[i].id);
            }
        }
    }
    IntersectionGraph { adjacency }
}

/// Connected components as sorted id sets, ordered by smallest member.
pub fn connected_components(g: &IntersectionGraph) -> Vec<BTreeSet<usize>> {
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    let mut components = Vec::new();
    for v in g.vertices() {
        if seen.contains(&v) {
            continue;
        }
        let mut comp = BTreeSet::new();
        let mut queue = VecDeque::from([v]);
        seen.insert(v);
        while let Some(u) = queue.pop_front() {
            comp.insert(u);
            for &w in g.neighbors(u) {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        components.push(comp);
    }
    components
}

/// Overlap graph plus two zero-cost terminals attached to the disks bounding
/// the faces of `s` and `t`.
#[derive(Clone, Debug)]
pub struct AugmentedStGraph {
    pub graph: IntersectionGraph,
    pub s_adjacent: BTreeSet<usize>,
    pub t_adjacent: BTreeSet<usize>,
}

/// Builds the augmented graph. Fails with `NotSeparated` when the disks do
/// not separate `s` from `t`.
pub fn augmented_st_graph(
    disks: &[Disk],
    s: Point,
    t: Point,
    tol: &TolerancePolicy,
) -> Result<AugmentedStGraph> {
    let ub = UnionBoundary::build(disks, tol)?;
    if !ub.separates(s, t)? {
        return Err(Error::NotSeparated);
    }
    let s_adjacent = ub.face_boundary_disks(s)?;
    let t_adjacent = ub.face_boundary_disks(t)?;
    Ok(AugmentedStGraph { graph: intersection_graph(disks, tol), s_adjacent, t_adjacent })
}

/// Minimum-disk-count sequence linking the face of `s` to the face of `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaPath {
    pub disks: Vec<usize>,
}

/// Shortest path by number of disk vertices, terminals free. Ties resolve to
/// the lexicographically smallest disk-id sequence.
pub fn shortest_disk_sequence(g: &AugmentedStGraph) -> Result<SigmaPath> {
    if g.s_adjacent.is_empty() || g.t_adjacent.is_empty() {
        return Err(Error::NoPath);
    }
    // dist_t[d] = fewest disks on a path from d to t, counting d itself.
    let mut dist_t: BTreeMap<usize, usize> = BTreeMap::new();
    let mut queue = VecDeque::new();
    for &d in &g.t_adjacent {
        dist_t.insert(d, 1);
        queue.push_back(d);
    }
    while let Some(u) = queue.pop_front() {
        let du = dist_t[&u];
        for &w in g.graph.neighbors(u) {
            if let std::collections::btree_map::Entry::Vacant(e) = dist_t.entry(w) {
                e.insert(du + 1);
                queue.push_back(w);
            }
        }
    }
    let total =
        g.s_adjacent.iter().filter_map(|d| dist_t.get(d)).copied().min().ok_or(Error::NoPath)?;

    // Greedy reconstruction: at each layer take the smallest admissible id.
    let mut path = Vec::with_capacity(total);
    let first =
        *g.s_adjacent.iter().find(|d| dist_t.get(d) == Some(&total)).expect("layer nonempty");
    path.push(first);
    let mut cur = first;
    for remaining in (1..total).rev() {
        let next = *g
            .graph
            .neighbors(cur)
            .iter()
            .find(|d| dist_t.get(d) == Some(&remaining))
            .expect("bfs layer nonempty");
        path.push(next);
        cur = next;
    }
    let sigma = SigmaPath { disks: path };
    validate_sigma(&sigma, g)?;
    Ok(sigma)
}

/// Consecutive disks must overlap and non-consecutive ones must not; both
/// follow from shortest-path optimality and are checked on every sigma.
fn validate_sigma(sigma: &SigmaPath, g: &AugmentedStGraph) -> Result<()> {
    let d = &sigma.disks;
    for i in 0..d.len() {
        for j in (i + 1)..d.len() {
            let edge = g.graph.has_edge(d[i], d[j]);
            if j == i + 1 && !edge {
                return Err(Error::InternalError(format!(
                    "sigma disks {} and {} are consecutive but disjoint",
                    d[i], d[j]
                )));
            }
            if j > i + 1 && edge {
                return Err(Error::InternalError(format!(
                    "sigma disks {} and {} are non-consecutive but overlap",
                    d[i], d[j]
                )));
            }
        }
    }
    Ok(())
}
