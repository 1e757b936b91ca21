//! Instance files, validation, and random instance generation.
//!
//! An instance is UTF-8 JSON with top-level keys `disks` (list of
//! `{"id","cx","cy","r"}`), `points` (list of `{"x","y"}`), `seed`, `eps`
//! and `min_feature`. Serialization uses shortest round-trip decimals, so
//! write-then-parse reproduces coordinates exactly.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arrangement::UnionBoundary;
use crate::error::{Error, Result};
use crate::geom::{
    check_general_position, perturb_to_general_position, Disk, Point, TolerancePolicy,
};

#[derive(Clone, Debug)]
pub struct Instance {
    pub disks: Vec<Disk>,
    pub points: Vec<Point>,
    pub seed: u64,
    pub tol: TolerancePolicy,
}

#[derive(Serialize, Deserialize)]
struct DiskRecord {
    id: usize,
    cx: f64,
    cy: f64,
    r: f64,
}

#[derive(Serialize, Deserialize)]
struct PointRecord {
    x: f64,
    y: f64,
}

#[derive(Serialize, Deserialize)]
struct InstanceRecord {
    disks: Vec<DiskRecord>,
    points: Vec<PointRecord>,
    seed: u64,
    eps: f64,
    min_feature: f64,
}

pub fn write_instance(instance: &Instance) -> String {
    let record = InstanceRecord {
        disks: instance
            .disks
            .iter()
            .map(|d| DiskRecord { id: d.id, cx: d.center.x, cy: d.center.y, r: d.radius })
            .collect(),
        points: instance.points.iter().map(|p| PointRecord { x: p.x, y: p.y }).collect(),
        seed: instance.seed,
        eps: instance.tol.eps,
        min_feature: instance.tol.min_feature,
    };
    let mut text = serde_json::to_string_pretty(&record).expect("instance serializes");
    text.push('\n');
    text
}

/// Parses and fully validates an instance: well-formed fields, general
/// position at the declared margins, and pairwise separation of the points.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let record: InstanceRecord =
        serde_json::from_str(text).map_err(|e| Error::ParseError(e.to_string()))?;
    let tol = TolerancePolicy::new(record.eps, record.min_feature)?;
    let instance = Instance {
        disks: record.disks.iter().map(|d| Disk::new(d.id, d.cx, d.cy, d.r)).collect(),
        points: record.points.iter().map(|p| Point::new(p.x, p.y)).collect(),
        seed: record.seed,
        tol,
    };
    validate_instance(&instance)?;
    Ok(instance)
}

/// Structural and geometric validation used by both parsing and generation.
pub fn validate_instance(instance: &Instance) -> Result<()> {
    let mut ids = std::collections::BTreeSet::new();
    for d in &instance.disks {
        if !d.center.is_finite() || !d.radius.is_finite() {
            return Err(Error::InvalidInstance(format!("disk {} has non-finite fields", d.id)));
        }
        if d.radius <= 0.0 {
            return Err(Error::InvalidInstance(format!("disk {} has non-positive radius", d.id)));
        }
        if !ids.insert(d.id) {
            return Err(Error::InvalidInstance(format!("duplicate disk id {}", d.id)));
        }
    }
    for (i, p) in instance.points.iter().enumerate() {
        if !p.is_finite() {
            return Err(Error::InvalidInstance(format!("point {i} has non-finite coordinates")));
        }
    }
    let violations = check_general_position(&instance.disks, &instance.points, &instance.tol);
    if let Some(v) = violations.first() {
        return Err(Error::InvalidInstance(format!("not in general position: {}", v.description)));
    }
    let ub = UnionBoundary::build(&instance.disks, &instance.tol)?;
    let mut sigs = Vec::new();
    for (i, &p) in instance.points.iter().enumerate() {
        sigs.push((i, ub.signature(p)?));
    }
    for a in 0..sigs.len() {
        for b in (a + 1)..sigs.len() {
            let (i, si) = &sigs[a];
            let (j, sj) = &sigs[b];
            if !(si.covered || sj.covered || si != sj) {
                return Err(Error::InvalidInstance(format!(
                    "disks do not separate points {i} and {j}"
                )));
            }
        }
    }
    Ok(())
}

/// Clearance kept between generated points and every circle, in plane units.
/// Above twice the default grid verifier resolution.
pub const POINT_CLEARANCE: f64 = 0.05;

const POINT_SAMPLE_BUDGET: usize = 4000;
const LAYOUT_ROUNDS: usize = 500;
/// After this many rounds a layout with two separated points is accepted
/// even when the requested `k` was not reached.
const SETTLE_ROUNDS: usize = 120;
/// Layouts containing a pair this close to tangency are redrawn.
const OVERLAP_GUARD: f64 = 1e-3;

/// Places `n` unit disks uniformly in `[0, box_size]^2`, perturbs them into
/// general position, then samples uncovered points uniformly and keeps the
/// first one found in each complement face, up to `k` points. Layouts whose
/// union encloses nothing are redrawn from the same seeded stream, up to a
/// bounded number of rounds. Fails unless some round yields at least two
/// pairwise separated points.
pub fn generate_random_instance(
    n: usize,
    k: usize,
    box_size: f64,
    seed: u64,
    tol: &TolerancePolicy,
) -> Result<Instance> {
    if n < 3 || k < 2 {
        return Err(Error::GenerationFailed(format!("need n >= 3 and k >= 2, got n={n}, k={k}")));
    }
    if !(box_size > 0.0) {
        return Err(Error::GenerationFailed("box size must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(Vec<Disk>, Vec<Point>)> = None;
    for round in 0..LAYOUT_ROUNDS {
        let raw: Vec<Disk> = (0..n)
            .map(|i| Disk::unit(i, rng.gen_range(0.0..box_size), rng.gen_range(0.0..box_size)))
            .collect();
        let perturb_seed = rng.gen::<u64>();
        let (disks, _) = perturb_to_general_position(&raw, &[], tol, perturb_seed)?;
        // Near-tangent overlaps make walls the grid verifier cannot resolve;
        // redraw such layouts.
        let mut razor = false;
        'pairs: for i in 0..disks.len() {
            for j in (i + 1)..disks.len() {
                let depth =
                    disks[i].radius + disks[j].radius - disks[i].center.dist(disks[j].center);
                if depth > 0.0 && depth < OVERLAP_GUARD {
                    razor = true;
                    break 'pairs;
                }
            }
        }
        if razor {
            continue;
        }
        let ub = UnionBoundary::build(&disks, tol)?;
        // Two separated points need two complement faces.
        if ub.complement_face_count()? < 2 {
            continue;
        }
        let pad = 1.5;
        let mut sigs_seen = Vec::new();
        let mut points = Vec::new();
        for _ in 0..POINT_SAMPLE_BUDGET {
            if points.len() >= k {
                break;
            }
            let p = Point::new(
                rng.gen_range(-pad..box_size + pad),
                rng.gen_range(-pad..box_size + pad),
            );
            if disks.iter().any(|d| d.boundary_dist(p) < POINT_CLEARANCE) {
                continue;
            }
            let sig = ub.signature(p)?;
            debug_assert!(!sig.covered);
            if !sigs_seen.contains(&sig) {
                sigs_seen.push(sig);
                points.push(p);
            }
        }
        if points.len() > best.as_ref().map_or(1, |(_, p): &(Vec<Disk>, Vec<Point>)| p.len()) {
            best = Some((disks, points));
        }
        let found = best.as_ref().map_or(0, |(_, p)| p.len());
        if found == k || (found >= 2 && round >= SETTLE_ROUNDS) {
            break;
        }
    }
    let Some((disks, points)) = best else {
        return Err(Error::GenerationFailed(format!(
            "no layout with two separated points in {LAYOUT_ROUNDS} rounds"
        )));
    };
    let instance = Instance { disks, points, seed, tol: *tol };
    validate_instance(&instance)?;
    Ok(instance)
}

/// One row of the experiment CSV.
#[derive(Clone, Debug)]
pub struct ExperimentRecord {
    pub instance: String,
    pub n: usize,
    pub k: usize,
    pub alg_size: usize,
    pub opt_size: Option<usize>,
    pub ratio: Option<f64>,
    pub ms: f64,
}

impl ExperimentRecord {
    pub fn csv_header() -> &'static str {
        "instance,n,k,alg_size,opt_size,ratio,ms"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.3}",
            self.instance,
            self.n,
            self.k,
            self.alg_size,
            self.opt_size.map_or(String::new(), |v| v.to_string()),
            self.ratio.map_or(String::new(), |v| format!("{v:.4}")),
            self.ms
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::{ring_hole_point, separates, three_disk_ring};

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    fn ring_instance() -> Instance {
        Instance {
            disks: three_disk_ring(),
            points: vec![ring_hole_point(), Point::new(5.0, 5.0)],
            seed: 0,
            tol: tol(),
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let inst = ring_instance();
        let text = write_instance(&inst);
        let parsed = parse_instance(&text).unwrap();
        assert_eq!(parsed.disks, inst.disks);
        assert_eq!(parsed.points, inst.points);
        assert_eq!(parsed.seed, inst.seed);
        assert_eq!(write_instance(&parsed), text);
    }

    #[test]
    fn missing_radius_is_a_parse_error() {
        let text = r#"{"disks":[{"id":0,"cx":0.0,"cy":0.0}],"points":[],"seed":0,"eps":1e-9,"min_feature":1e-6}"#;
        assert!(matches!(parse_instance(text), Err(Error::ParseError(_))));
    }

    #[test]
    fn non_separating_document_is_invalid() {
        let inst = Instance {
            disks: vec![Disk::unit(0, 0.0, 0.0)],
            points: vec![Point::new(-3.0, 0.0), Point::new(3.0, 0.0)],
            seed: 0,
            tol: tol(),
        };
        let text = write_instance(&inst);
        assert!(matches!(parse_instance(&text), Err(Error::InvalidInstance(_))));
    }

    #[test]
    fn generated_instance_is_valid_and_deterministic() {
        let a = generate_random_instance(20, 4, 5.5, 1, &tol()).unwrap();
        let b = generate_random_instance(20, 4, 5.5, 1, &tol()).unwrap();
        assert_eq!(write_instance(&a), write_instance(&b));
        assert!(a.points.len() >= 2 && a.points.len() <= 4);
        for i in 0..a.points.len() {
            for j in (i + 1)..a.points.len() {
                assert!(separates(&a.disks, a.points[i], a.points[j], &tol()).unwrap());
            }
            for d in &a.disks {
                assert!(d.boundary_dist(a.points[i]) >= POINT_CLEARANCE);
            }
        }
    }

    #[test]
    fn tiny_box_yields_ring_like_triple() {
        // Three unit disks in a 2.2 box must pairwise overlap to enclose a
        // second face.
        let inst = generate_random_instance(3, 2, 2.2, 6, &tol()).unwrap();
        assert_eq!(inst.points.len(), 2);
        let g = crate::graph::intersection_graph(&inst.disks, &tol());
        assert!(g.adjacency.values().all(|s| s.len() == 2));
        assert!(separates(&inst.disks, inst.points[0], inst.points[1], &tol()).unwrap());
    }

    #[test]
    fn sparse_huge_box_fails_generation() {
        let res = generate_random_instance(3, 2, 1000.0, 7, &tol());
        assert!(matches!(res, Err(Error::GenerationFailed(_))));
    }

    #[test]
    fn csv_row_formats_blanks() {
        let rec = ExperimentRecord {
            instance: "i1".into(),
            n: 30,
            k: 2,
            alg_size: 5,
            opt_size: None,
            ratio: None,
            ms: 12.5,
        };
        assert_eq!(rec.csv_row(), "i1,30,2,5,,,12.500");
    }
}
