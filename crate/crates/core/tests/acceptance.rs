//! Acceptance suite. Each test is one criterion and prints a single
//! PASS/FAIL line; run with
//! `cargo test -p disksep --test acceptance -- --nocapture`.

use std::collections::BTreeSet;
use std::sync::OnceLock;
use std::time::Instant;

use rayon::prelude::*;

use disksep::arrangement::{self, ring_hole_point, separates, three_disk_ring, UnionBoundary};
use disksep::error::Error;
use disksep::geom::{disks_overlap, Disk, Point, TolerancePolicy};
use disksep::graph::{
    augmented_st_graph, connected_components, intersection_graph, shortest_disk_sequence,
};
use disksep::instance::{generate_random_instance, Instance};
use disksep::oracle::{
    exact_min_separator, exact_min_two_point, grid_flood_separates, subset_separates_all_pairs,
    DEFAULT_GRID_RESOLUTION, DEFAULT_MAX_N,
};
use disksep::recsep::{separate_points, separate_points_traced};
use disksep::two_point::separate_two_points;

/// Frozen regression bounds for the approximation ratios, calibrated once
/// from the first full run of the deterministic suites below.
const R2_MAX_RATIO: f64 = 4.0 / 3.0;
const RK_MAX_RATIO: f64 = 4.0 / 3.0;
const RATIO_EPS: f64 = 1e-12;

fn tol() -> TolerancePolicy {
    TolerancePolicy::default()
}

fn box_for(n: usize) -> f64 {
    ((n as f64) * std::f64::consts::PI / 1.6).sqrt()
}

/// 500 two-point instances, n cycling over [5,16], k = 2, seeds 1..=500.
fn two_point_suite() -> &'static [Instance] {
    static SUITE: OnceLock<Vec<Instance>> = OnceLock::new();
    SUITE.get_or_init(|| {
        (1..=500u64)
            .into_par_iter()
            .map(|seed| {
                let n = 5 + ((seed - 1) % 12) as usize;
                generate_random_instance(n, 2, box_for(n), seed, &tol())
                    .unwrap_or_else(|e| panic!("seed {seed}: generation failed: {e}"))
            })
            .collect()
    })
}

/// 200 multi-point instances, n in [8,16], k in [3,6], seeds 1..=200.
fn multi_suite() -> &'static [Instance] {
    static SUITE: OnceLock<Vec<Instance>> = OnceLock::new();
    SUITE.get_or_init(|| {
        (1..=200u64)
            .into_par_iter()
            .map(|seed| {
                let n = 8 + ((seed - 1) % 9) as usize;
                let k = 3 + ((seed - 1) % 4) as usize;
                generate_random_instance(n, k, box_for(n), seed, &tol())
                    .unwrap_or_else(|e| panic!("seed {seed}: generation failed: {e}"))
            })
            .collect()
    })
}

fn subset_of(instance: &Instance, ids: &BTreeSet<usize>) -> Vec<Disk> {
    instance.disks.iter().filter(|d| ids.contains(&d.id)).cloned().collect()
}

/// Random disk set without points, at a seed-dependent density.
fn random_disk_set(seed: u64) -> Vec<Disk> {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed * 7 + 1);
    let n = 5 + (seed % 46) as usize;
    let gamma = [0.8, 1.2, 1.6, 2.2, 3.0][(seed % 5) as usize];
    let box_size = ((n as f64) * std::f64::consts::PI / gamma).sqrt();
    let raw: Vec<Disk> = (0..n)
        .map(|i| Disk::unit(i, rng.gen_range(0.0..box_size), rng.gen_range(0.0..box_size)))
        .collect();
    let (disks, _) =
        disksep::geom::perturb_to_general_position(&raw, &[], &tol(), seed).expect("perturbable");
    disks
}

#[test]
fn criterion_1_two_point_correctness() {
    let suite = two_point_suite();
    let start = Instant::now();
    let failures: usize = suite
        .par_iter()
        .enumerate()
        .map(|(i, inst)| {
            let (s, t) = (inst.points[0], inst.points[1]);
            let chosen = match separate_two_points(&inst.disks, s, t, &tol()) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("instance {}: solve error {e}", i + 1);
                    return 1;
                }
            };
            let subset = subset_of(inst, &chosen);
            let a = separates(&subset, s, t, &tol()).unwrap();
            let g = grid_flood_separates(&subset, s, t, DEFAULT_GRID_RESOLUTION, &tol()).unwrap();
            if a && g {
                0
            } else {
                eprintln!("instance {}: arrangement={a} grid={g}", i + 1);
                1
            }
        })
        .sum();
    let elapsed = start.elapsed();
    let pass = failures == 0 && elapsed.as_secs_f64() < 60.0;
    println!(
        "criterion 1 (two-point correctness, both verifiers, 500 instances): {} ({} failures, {:.1?})",
        if pass { "PASS" } else { "FAIL" },
        failures,
        elapsed
    );
    assert!(pass);
}

#[test]
fn criterion_2_two_point_ratio() {
    let suite = two_point_suite();
    let ratios: Vec<f64> = suite
        .par_iter()
        .map(|inst| {
            let (s, t) = (inst.points[0], inst.points[1]);
            let chosen = separate_two_points(&inst.disks, s, t, &tol()).unwrap();
            let opt = exact_min_two_point(&inst.disks, s, t, DEFAULT_MAX_N, &tol()).unwrap();
            assert!(chosen.len() >= opt.len(), "algorithm beat the exact oracle");
            chosen.len() as f64 / opt.len() as f64
        })
        .collect();
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    let pass = max_ratio <= R2_MAX_RATIO + RATIO_EPS;
    println!(
        "criterion 2 (two-point ratio <= {R2_MAX_RATIO:.4} frozen): {} (max observed {max_ratio:.4})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass);
}

#[test]
fn criterion_3_recsep_correctness_and_ratio() {
    let suite = multi_suite();
    let results: Vec<(usize, f64)> = suite
        .par_iter()
        .enumerate()
        .map(|(i, inst)| {
            let result = separate_points_traced(&inst.disks, &inst.points, &tol())
                .unwrap_or_else(|e| panic!("instance {}: solve error {e}", i + 1));
            // Charging bound: one separator per internal recursion node.
            assert!(result.trace.len() < inst.points.len().max(2));
            let chosen = result.chosen;
            let subset = subset_of(inst, &chosen);
            let mut failures = 0;
            for a in 0..inst.points.len() {
                for b in (a + 1)..inst.points.len() {
                    let (p, q) = (inst.points[a], inst.points[b]);
                    let av = separates(&subset, p, q, &tol()).unwrap();
                    let gv = grid_flood_separates(&subset, p, q, DEFAULT_GRID_RESOLUTION, &tol())
                        .unwrap();
                    if !(av && gv) {
                        eprintln!("instance {}: pair ({a},{b}) arrangement={av} grid={gv}", i + 1);
                        failures += 1;
                    }
                }
            }
            let opt =
                exact_min_separator(&inst.disks, &inst.points, DEFAULT_MAX_N, &tol()).unwrap();
            assert!(chosen.len() >= opt.len(), "algorithm beat the exact oracle");
            (failures, chosen.len() as f64 / opt.len() as f64)
        })
        .collect();
    let failures: usize = results.iter().map(|r| r.0).sum();
    let max_ratio = results.iter().map(|r| r.1).fold(0.0, f64::max);
    let pass = failures == 0 && max_ratio <= RK_MAX_RATIO + RATIO_EPS;
    println!(
        "criterion 3 (recursive separator, 200 instances, ratio <= {RK_MAX_RATIO:.4} frozen): {} ({failures} failures, max ratio {max_ratio:.4})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass);
}

#[test]
fn criterion_4_canonical_instances() {
    let t = tol();
    let mut pass = true;

    // Three-disk ring.
    {
        let disks = three_disk_ring();
        let pts = [ring_hole_point(), Point::new(5.0, 5.0)];
        let opt = exact_min_separator(&disks, &pts, DEFAULT_MAX_N, &t).unwrap();
        let alg = separate_points(&disks, &pts, &t).unwrap();
        let sub: Vec<Disk> = disks.iter().filter(|d| alg.contains(&d.id)).cloned().collect();
        let grid = grid_flood_separates(&sub, pts[0], pts[1], 0.01, &t).unwrap();
        pass &= opt.len() == 3 && alg.len() == 3 && grid;
    }

    // Ring of four.
    {
        let disks = vec![
            Disk::unit(0, 1.2, 0.0),
            Disk::unit(1, -1.2, 0.0),
            Disk::unit(2, 0.0, 1.2),
            Disk::unit(3, 0.0, -1.2),
        ];
        let pts = [Point::new(0.0, 0.0), Point::new(9.0, 9.0)];
        let opt = exact_min_separator(&disks, &pts, DEFAULT_MAX_N, &t).unwrap();
        let alg = separate_points(&disks, &pts, &t).unwrap();
        let sub: Vec<Disk> = disks.iter().filter(|d| alg.contains(&d.id)).cloned().collect();
        let grid = grid_flood_separates(&sub, pts[0], pts[1], 0.01, &t).unwrap();
        pass &= opt.len() == 4 && alg.len() == 4 && grid;
    }

    // Two translated rings, two hole points; then with a third far point.
    {
        let mut disks = three_disk_ring();
        for (i, d) in three_disk_ring().into_iter().enumerate() {
            disks.push(Disk::unit(3 + i, d.center.x + 10.0, d.center.y));
        }
        let h1 = ring_hole_point();
        let h2 = Point::new(h1.x + 10.0, h1.y);
        let pts2 = [h1, h2];
        let opt2 = exact_min_separator(&disks, &pts2, DEFAULT_MAX_N, &t).unwrap();
        let alg2 = separate_points(&disks, &pts2, &t).unwrap();
        pass &= opt2.len() == 3 && alg2.len() == 3;

        let pts3 = [h1, h2, Point::new(20.0, 20.0)];
        let opt3 = exact_min_separator(&disks, &pts3, DEFAULT_MAX_N, &t).unwrap();
        let alg3 = separate_points(&disks, &pts3, &t).unwrap();
        let sub: Vec<Disk> = disks.iter().filter(|d| alg3.contains(&d.id)).cloned().collect();
        let mut grid_ok = true;
        for a in 0..3 {
            for b in (a + 1)..3 {
                grid_ok &= grid_flood_separates(&sub, pts3[a], pts3[b], 0.01, &t).unwrap();
            }
        }
        pass &= opt3.len() == 6 && alg3.len() == 6 && grid_ok;
    }

    println!(
        "criterion 4 (canonical instances, exact sizes 3/4/3/6): {}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass);
}

#[test]
fn criterion_5_union_complexity() {
    let violations: usize = (0..1000u64)
        .into_par_iter()
        .map(|seed| {
            let disks = random_disk_set(seed);
            let n = disks.len();
            let ub = UnionBoundary::build(&disks, &tol()).unwrap();
            let arcs = ub.total_arcs();
            let faces = ub.complement_face_count().unwrap();
            if arcs <= 7 * n && faces <= 7 * n + 1 {
                0
            } else {
                eprintln!("seed {seed}: n={n} arcs={arcs} faces={faces}");
                1
            }
        })
        .sum();
    println!(
        "criterion 5 (union complexity <= 7n, faces <= 7n+1, 1000 sets): {} ({} violations)",
        if violations == 0 { "PASS" } else { "FAIL" },
        violations
    );
    assert_eq!(violations, 0);
}

#[test]
fn criterion_6_one_point_per_face() {
    let violations: usize = (0..200u64)
        .into_par_iter()
        .map(|seed| {
            let disks = random_disk_set(seed + 5000);
            let n = disks.len();
            let ub = UnionBoundary::build(&disks, &tol()).unwrap();
            // One uncovered probe point per complement face: every cycle's
            // complement side plus a far point, deduplicated by face.
            let mut probes = vec![Point::new(1e4, 1e4)];
            for c in 0..ub.cycles.len() {
                probes.push(ub.cycle_probe(c).unwrap());
            }
            let mut sigs = BTreeSet::new();
            let mut count = 0usize;
            for p in probes {
                let sig = ub.signature(p).unwrap();
                assert!(!sig.covered, "face probe is covered");
                if sigs.insert(sig) {
                    count += 1;
                }
            }
            if count <= 7 * n + 1 {
                0
            } else {
                eprintln!("seed {seed}: n={n} faces with one point each = {count}");
                1
            }
        })
        .sum();
    println!(
        "criterion 6 (one uncovered point per face stays <= 7n+1, 200 sets): {} ({} violations)",
        if violations == 0 { "PASS" } else { "FAIL" },
        violations
    );
    assert_eq!(violations, 0);
}

#[test]
fn criterion_7_sigma_invariant() {
    let suite = two_point_suite();
    let violations: usize = suite
        .par_iter()
        .map(|inst| {
            let (s, t) = (inst.points[0], inst.points[1]);
            let graph = intersection_graph(&inst.disks, &tol());
            let mut bad = 0;
            for component in connected_components(&graph) {
                let comp: Vec<Disk> =
                    inst.disks.iter().filter(|d| component.contains(&d.id)).cloned().collect();
                if !separates(&comp, s, t, &tol()).unwrap() {
                    continue;
                }
                let g = augmented_st_graph(&comp, s, t, &tol()).unwrap();
                let sigma = shortest_disk_sequence(&g).unwrap();
                let ids = &sigma.disks;
                for i in 0..ids.len() {
                    for j in (i + 2)..ids.len() {
                        let di = comp.iter().find(|d| d.id == ids[i]).unwrap();
                        let dj = comp.iter().find(|d| d.id == ids[j]).unwrap();
                        if disks_overlap(di, dj, &tol()) {
                            bad += 1;
                        }
                    }
                }
            }
            bad
        })
        .sum();
    println!(
        "criterion 7 (non-consecutive sigma disks disjoint in every run): {} ({} violations)",
        if violations == 0 { "PASS" } else { "FAIL" },
        violations
    );
    assert_eq!(violations, 0);
}

/// Combinations in the oracle's order: by size, lexicographic within a size.
fn combinations(n: usize, max_size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for size in 0..=max_size.min(n) {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            out.push(combo.clone());
            let mut i = size;
            let mut advanced = false;
            while i > 0 {
                i -= 1;
                if combo[i] != i + n - size {
                    combo[i] += 1;
                    for j in (i + 1)..size {
                        combo[j] = combo[j - 1] + 1;
                    }
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                break;
            }
        }
    }
    out
}

#[test]
fn criterion_8_verifier_agreement() {
    let suite = two_point_suite();
    const TARGET: usize = 10_000;
    let per_instance = TARGET / suite.len() + 1;
    let outcomes: Vec<(usize, usize, usize)> = suite
        .par_iter()
        .map(|inst| {
            let (s, t) = (inst.points[0], inst.points[1]);
            let mut order: Vec<&Disk> = inst.disks.iter().collect();
            order.sort_by_key(|d| d.id);
            let combos = combinations(order.len(), 4);
            let step = (combos.len() / per_instance).max(1);
            let mut probes = 0;
            let mut inconclusive = 0;
            let mut disagreements = 0;
            for combo in combos.iter().step_by(step).take(per_instance) {
                let subset: Vec<Disk> = combo.iter().map(|&i| order[i].clone()).collect();
                let a = subset_separates_all_pairs(&subset, &[s, t], &tol()).unwrap();
                probes += 1;
                match grid_flood_separates(&subset, s, t, DEFAULT_GRID_RESOLUTION, &tol()) {
                    Ok(g) => {
                        if g != a {
                            eprintln!("disagreement on subset {combo:?}: arrangement={a} grid={g}");
                            disagreements += 1;
                        }
                    }
                    Err(Error::ResolutionExhausted) => inconclusive += 1,
                    Err(e) => panic!("grid verifier error: {e}"),
                }
            }
            (probes, inconclusive, disagreements)
        })
        .collect();
    let probes: usize = outcomes.iter().map(|o| o.0).sum();
    let inconclusive: usize = outcomes.iter().map(|o| o.1).sum();
    let disagreements: usize = outcomes.iter().map(|o| o.2).sum();
    let pass = probes >= TARGET && disagreements == 0 && inconclusive * 20 < probes;
    println!(
        "criterion 8 (verifier agreement on {probes} subset probes): {} ({} disagreements, {} inconclusive)",
        if pass { "PASS" } else { "FAIL" },
        disagreements,
        inconclusive
    );
    assert!(pass);
}

#[test]
fn criterion_9_performance_sanity() {
    let t = tol();
    let inst = generate_random_instance(60, 10, box_for(60), 3, &t).unwrap();
    let start = Instant::now();
    let chosen = separate_points(&inst.disks, &inst.points, &t).unwrap();
    let solve_time = start.elapsed();
    assert!(!chosen.is_empty());

    let inst18 = generate_random_instance(18, 2, box_for(18), 5, &t).unwrap();
    let start = Instant::now();
    let opt = exact_min_separator(&inst18.disks, &inst18.points, DEFAULT_MAX_N, &t).unwrap();
    let oracle_time = start.elapsed();
    assert!(!opt.is_empty());

    let pass = solve_time.as_secs_f64() < 10.0 && oracle_time.as_secs_f64() < 120.0;
    println!(
        "criterion 9 (solve n=60 k=10 in {:.2?} < 10 s; oracle n=18 in {:.2?} < 120 s): {}",
        solve_time,
        oracle_time,
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass);
}

#[test]
fn verifier_agreement_on_canonical_separators() {
    // The arrangement and grid verdicts must also agree on the canonical
    // instances' minimal and near-minimal subsets.
    let t = tol();
    let disks = three_disk_ring();
    let pts = [ring_hole_point(), Point::new(5.0, 5.0)];
    for combo in combinations(3, 3) {
        let subset: Vec<Disk> = combo.iter().map(|&i| disks[i].clone()).collect();
        let a = subset_separates_all_pairs(&subset, &pts, &t).unwrap();
        let g = grid_flood_separates(&subset, pts[0], pts[1], 0.01, &t).unwrap();
        assert_eq!(a, g, "subset {combo:?}");
        assert_eq!(a, combo.len() == 3);
    }
    let ids = arrangement::face_boundary_disks(&disks, ring_hole_point(), &t).unwrap();
    assert_eq!(ids, BTreeSet::from([0, 1, 2]));
}
