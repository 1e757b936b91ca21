//! The recursive greedy separator: repeatedly extract the cheapest two-point
//! separator over all pairs, split the points by the faces it creates, and
//! recurse within each group.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::arrangement::{partition_by_face, separates};
use crate::cover::{greedy_cover, split_covered};
use crate::error::{Error, Result};
use crate::geom::{Disk, Point, TolerancePolicy};
use crate::two_point::separate_two_points_traced;

/// One recursion step: the point group it worked on, the winning pair, the
/// separator it chose, and how the group split.
#[derive(Clone, Debug, Serialize)]
pub struct TraceEntry {
    pub group: Vec<usize>,
    pub pair: (usize, usize),
    pub chosen: BTreeSet<usize>,
    pub group_sizes: Vec<usize>,
    #[serde(skip)]
    pub waypoints: Vec<Point>,
    #[serde(skip)]
    pub piece_path: Vec<Point>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SeparatorResult {
    pub chosen: BTreeSet<usize>,
    pub trace: Vec<TraceEntry>,
}

/// Separates every pair of `points` (all uncovered) by recursion on face
/// groups. Point indices in the trace refer to the input slice.
pub fn rec_sep(disks: &[Disk], points: &[Point], tol: &TolerancePolicy) -> Result<SeparatorResult> {
    let mut result = SeparatorResult::default();
    let group: Vec<usize> = (0..points.len()).collect();
    rec_sep_group(disks, points, group, tol, &mut result)?;
    // The recursion guarantees this, but the claim is cheap to check.
    let chosen_disks: Vec<Disk> =
        disks.iter().filter(|d| result.chosen.contains(&d.id)).cloned().collect();
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            if !separates(&chosen_disks, points[i], points[j], tol)? {
                return Err(Error::InternalError(format!(
                    "recursive separator fails to separate points {i} and {j}"
                )));
            }
        }
    }
    Ok(result)
}

fn rec_sep_group(
    disks: &[Disk],
    points: &[Point],
    group: Vec<usize>,
    tol: &TolerancePolicy,
    result: &mut SeparatorResult,
) -> Result<()> {
    if group.len() <= 1 {
        return Ok(());
    }
    // Cheapest two-point separator over all pairs, ties to the first pair in
    // index order, then to the smaller id set.
    let mut best: Option<(usize, (usize, usize), crate::two_point::TwoPointOutcome)> = None;
    for a in 0..group.len() {
        for b in (a + 1)..group.len() {
            let (i, j) = (group[a], group[b]);
            let outcome = separate_two_points_traced(disks, points[i], points[j], tol).map_err(
                |e| match e {
                    Error::NotSeparated => Error::InvalidInstance(format!(
                        "input disks do not separate points {i} and {j}"
                    )),
                    other => other,
                },
            )?;
            // Strict improvement only, so ties go to the first pair in
            // lexicographic order.
            let better = match &best {
                None => true,
                Some((size, _, _)) => outcome.chosen.len() < *size,
            };
            if better {
                best = Some((outcome.chosen.len(), (i, j), outcome));
            }
        }
    }
    let (_, pair, outcome) = best.expect("group has at least one pair");

    let b_disks: Vec<Disk> =
        disks.iter().filter(|d| outcome.chosen.contains(&d.id)).cloned().collect();
    let group_points: Vec<Point> = group.iter().map(|&i| points[i]).collect();
    let local_groups = partition_by_face(&b_disks, &group_points, tol)?;
    if local_groups.len() < 2 {
        return Err(Error::InternalError("chosen separator did not split the point group".into()));
    }
    let subgroups: Vec<Vec<usize>> =
        local_groups.iter().map(|g| g.iter().map(|&local| group[local]).collect()).collect();
    result.chosen.extend(outcome.chosen.iter().copied());
    result.trace.push(TraceEntry {
        group: group.clone(),
        pair,
        chosen: outcome.chosen.clone(),
        group_sizes: subgroups.iter().map(|g| g.len()).collect(),
        waypoints: outcome.waypoints.clone(),
        piece_path: outcome.piece_path_points.clone(),
    });
    for sub in subgroups {
        rec_sep_group(disks, points, sub, tol, result)?;
    }
    Ok(())
}

/// Top-level solver: cover the points lying inside disks with a greedy set
/// cover, separate the rest recursively, and return the union. The combined
/// output is re-verified before returning.
pub fn separate_points(
    disks: &[Disk],
    points: &[Point],
    tol: &TolerancePolicy,
) -> Result<BTreeSet<usize>> {
    Ok(separate_points_traced(disks, points, tol)?.chosen)
}

pub fn separate_points_traced(
    disks: &[Disk],
    points: &[Point],
    tol: &TolerancePolicy,
) -> Result<SeparatorResult> {
    let (covered_idx, uncovered_idx) = split_covered(disks, points, tol)?;
    let covered_points: Vec<Point> = covered_idx.iter().map(|&i| points[i]).collect();
    let cover = greedy_cover(disks, &covered_points, tol)?;

    let uncovered_points: Vec<Point> = uncovered_idx.iter().map(|&i| points[i]).collect();
    let mut result = rec_sep(disks, &uncovered_points, tol).map_err(|e| match e {
        Error::InvalidInstance(msg) => Error::InvalidInstance(msg),
        other => other,
    })?;
    // Map trace indices back to positions in the original point list.
    for entry in &mut result.trace {
        entry.group = entry.group.iter().map(|&i| uncovered_idx[i]).collect();
        entry.pair = (uncovered_idx[entry.pair.0], uncovered_idx[entry.pair.1]);
    }
    result.chosen.extend(cover.chosen.iter().copied());

    let chosen_disks: Vec<Disk> =
        disks.iter().filter(|d| result.chosen.contains(&d.id)).cloned().collect();
    for (k, &i) in covered_idx.iter().enumerate() {
        let p = covered_points[k];
        if !chosen_disks.iter().any(|d| d.boundary_dist(p) < -tol.eps) {
            return Err(Error::InternalError(format!(
                "covered point {i} is not inside any chosen disk"
            )));
        }
    }
    for a in 0..uncovered_points.len() {
        for b in (a + 1)..uncovered_points.len() {
            if !separates(&chosen_disks, uncovered_points[a], uncovered_points[b], tol)? {
                return Err(Error::InternalError(
                    "combined separator failed re-verification".into(),
                ));
            }
        }
    }
    Ok(result)
}
