//! Splitting input points into covered and uncovered sets and covering the
//! covered ones with a greedy set cover.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::geom::{point_in_disk, Containment, Disk, Point, TolerancePolicy};

/// Greedy cover outcome; `rounds` records the uncovered count after each pick.
#[derive(Clone, Debug)]
pub struct CoverResult {
    pub chosen: BTreeSet<usize>,
    pub rounds: Vec<usize>,
}

/// Partitions point indices into covered (inside at least one disk) and
/// uncovered. A point on a circle within `eps` is degenerate.
pub fn split_covered(
    disks: &[Disk],
    points: &[Point],
    tol: &TolerancePolicy,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut covered = Vec::new();
    let mut uncovered = Vec::new();
    for (i, &p) in points.iter().enumerate() {
        let mut inside = false;
        for d in disks {
            match point_in_disk(p, d, tol) {
                Containment::Inside => inside = true,
                Containment::Boundary => {
                    return Err(Error::DegenerateInput(format!(
                        "point {i} lies on the circle of disk {}",
                        d.id
                    )))
                }
                Containment::Outside => {}
            }
        }
        if inside {
            covered.push(i);
        } else {
            uncovered.push(i);
        }
    }
    Ok((covered, uncovered))
}

/// Repeatedly picks the disk covering the most still-uncovered targets,
/// breaking ties by smallest disk id.
pub fn greedy_cover(
    disks: &[Disk],
    targets: &[Point],
    tol: &TolerancePolicy,
) -> Result<CoverResult> {
    let mut remaining: BTreeSet<usize> = (0..targets.len()).collect();
    let mut chosen = BTreeSet::new();
    let mut rounds = Vec::new();
    while !remaining.is_empty() {
        let mut best: Option<(usize, usize)> = None; // (count, disk id)
        for d in disks {
            if chosen.contains(&d.id) {
                continue;
            }
            let count = remaining
                .iter()
                .filter(|&&i| point_in_disk(targets[i], d, tol) == Containment::Inside)
                .count();
            if count == 0 {
                continue;
            }
            let better = match best {
                None => true,
                Some((bc, bid)) => count > bc || (count == bc && d.id < bid),
            };
            if better {
                best = Some((count, d.id));
            }
        }
        let Some((_, id)) = best else {
            return Err(Error::Uncoverable);
        };
        let disk = disks.iter().find(|d| d.id == id).unwrap();
        remaining.retain(|&i| point_in_disk(targets[i], disk, tol) != Containment::Inside);
        chosen.insert(id);
        rounds.push(remaining.len());
    }
    Ok(CoverResult { chosen, rounds })
}
