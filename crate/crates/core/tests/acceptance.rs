//! One line per acceptance criterion. Runs without the test harness so the
//! lines show up in every `cargo test` run; exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use broccoli_core::exactmath::{laurent_to_y, rat, Laurent, LaurentY};
use broccoli_core::invariant::{curve_groups, enumerate_leaves, gs_invariant, InvariantQuery, RunOptions};
use broccoli_core::oracle::{
    all_markings, battery, equivalence_check, invariance_harness, la1_table, psi2_symmetry_table, psi_limit_table,
    rectangle_degree, segment_count_check,
};
use broccoli_core::tropcurve::broccoli_status;
use broccoli_core::Direction;

type Outcome = Result<String, String>;

fn label(q: &InvariantQuery) -> String {
    format!("|D|={} g={} nv={}", q.degree.size(), q.genus, q.nv)
}

fn both_types() -> [Direction; 2] {
    [Direction::new(1, 7), Direction::new(9, 1)]
}

fn rectangle_example() -> Outcome {
    let mut slowest = Duration::ZERO;
    for q in all_markings(&rectangle_degree(), 1) {
        let t = Instant::now();
        let r = gs_invariant(&q).map_err(|e| e.to_string())?;
        slowest = slowest.max(t.elapsed());
        let c = rat(16 - 2 * q.nv as i64);
        let expect = LaurentY::new(Laurent::from_terms([(1, rat(2)), (0, c), (-1, rat(2))]));
        if r.value != expect {
            return Err(format!("nv={}: got {}, expected {}", q.nv, r.value, expect));
        }
    }
    if slowest > Duration::from_secs(120) {
        return Err(format!("slowest run took {slowest:?}"));
    }
    Ok(format!("n_v = 0..5 all match, slowest run {slowest:.2?}"))
}

fn invariance() -> Outcome {
    let mut n = 0;
    for q in battery() {
        let poly = q.polygon().map_err(|e| e.to_string())?;
        let dirs = Direction::family(&poly, 3);
        if !(dirs.iter().any(|d| d.0.x == 1) && dirs.iter().any(|d| d.0.y == 1)) {
            return Err(format!("{}: no direction of each type in {dirs:?}", label(&q)));
        }
        let r = invariance_harness(&q, &dirs).map_err(|e| e.to_string())?;
        if !r.passed() {
            return Err(format!("{}: {}", label(&q), r.details));
        }
        n += 1;
    }
    Ok(format!("{n} queries, 3 directions each"))
}

fn structure() -> Outcome {
    let mut bad = Vec::new();
    let mut n = 0;
    for q in battery() {
        let poly = q.polygon().map_err(|e| e.to_string())?;
        let r = gs_invariant(&q).map_err(|e| e.to_string())?;
        let want = poly.num_lattice_points() as i64 - q.degree.size() as i64 - 1;
        match r.value.symmetric_degree() {
            Ok(d) if d == want => {}
            Ok(d) => bad.push(format!("{}: degree {d}, formula {want}", label(&q))),
            Err(e) => bad.push(format!("{}: {e}", label(&q))),
        }
        let (leaves, _, _) = enumerate_leaves(&q, RunOptions::default()).map_err(|e| e.to_string())?;
        for (key, _, w) in curve_groups(&leaves) {
            n += 1;
            let ok = w.to_laurent().ok().and_then(|l| laurent_to_y(&l).ok()).is_some_and(|w| w.is_symmetric());
            if !ok {
                bad.push(format!("{}: curve {key:?} is not a symmetric Laurent polynomial in y", label(&q)));
            }
        }
    }
    if bad.is_empty() {
        Ok(format!("all symmetric with the expected degree, {n} curve weights Laurent"))
    } else {
        Err(format!("{} problems; {}", bad.len(), bad.join("; ")))
    }
}

fn specializations() -> Outcome {
    let mut curves = 0;
    for q in all_markings(&rectangle_degree(), 1) {
        for dir in both_types() {
            let q = q.clone().with_direction(dir);
            let r = gs_invariant(&q).map_err(|e| e.to_string())?;
            if q.nv > 0 && !(r.at_y1 > rat(0) && r.at_y1.is_integer()) {
                return Err(format!("{}: y=1 value {}", label(&q), r.at_y1));
            }
            let (leaves, _, _) = enumerate_leaves(&q, RunOptions::default()).map_err(|e| e.to_string())?;
            for (key, idx, w) in curve_groups(&leaves) {
                curves += 1;
                let w = w.to_laurent().and_then(|l| laurent_to_y(&l)).map_err(|e| e.to_string())?;
                let (one, minus_one) = (w.at_one(), w.at_minus_one());
                if !(one > rat(0) && one.is_integer()) {
                    return Err(format!("{}: curve {key:?} has y=1 value {one}", label(&q)));
                }
                let leaf = &leaves[idx[0]];
                if (minus_one != rat(0)) != broccoli_status(&leaf.curve, &leaf.class).is_broccoli {
                    return Err(format!("{}: curve {key:?} y=-1 value {minus_one} disagrees", label(&q)));
                }
            }
        }
    }
    Ok(format!("{curves} curves, no mismatches"))
}

fn identities() -> Outcome {
    let t = Instant::now();
    let reports = [
        la1_table(6),
        psi2_symmetry_table(5, 5).map_err(|e| e.to_string())?,
        psi_limit_table(6, 6).map_err(|e| e.to_string())?,
    ];
    let elapsed = t.elapsed();
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| !r.passed())
        .map(|r| format!("{}: {} of {} cases fail", r.subject, r.details["failures"], r.details["checked"]))
        .collect();
    if !failed.is_empty() {
        return Err(failed.join("; "));
    }
    if elapsed > Duration::from_secs(60) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("three tables pass in {elapsed:.2?}"))
}

fn oracle_equivalence() -> Outcome {
    let t = Instant::now();
    let mut n = 0;
    for q in battery() {
        if q.polygon().map_err(|e| e.to_string())?.lattice_area() > 12 {
            continue;
        }
        for dir in both_types() {
            let q = q.clone().with_direction(dir);
            let r = equivalence_check(&q, 12).map_err(|e| e.to_string())?;
            if !r.passed() {
                return Err(format!("{} {:?}: {}", label(&q), dir.0, r.details));
            }
            n += 1;
        }
    }
    let elapsed = t.elapsed();
    if elapsed > Duration::from_secs(600) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("{n} runs agree in {elapsed:.2?}"))
}

fn segment_counts() -> Outcome {
    let (mut leaves, mut bad) = (0, 0);
    let mut first = None;
    for q in battery() {
        for dir in both_types() {
            let q = q.clone().with_direction(dir);
            let r = segment_count_check(&q).map_err(|e| e.to_string())?;
            leaves += r.details["checked"].as_u64().unwrap_or(0);
            bad += r.details["failures"].as_u64().unwrap_or(0);
            if first.is_none() && !r.passed() {
                first = Some(format!("{} {:?}: {}", label(&q), dir.0, r.details["first"][0]));
            }
        }
    }
    match first {
        None => Ok(format!("{leaves} leaves, no mismatches")),
        Some(f) => Err(format!("{bad} of {leaves} leaves differ, first {f}")),
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("rectangle example", rectangle_example),
        ("direction invariance", invariance),
        ("symmetry and degree", structure),
        ("specializations", specializations),
        ("identity suites", identities),
        ("oracle equivalence", oracle_equivalence),
        ("segment count vs automorphisms", segment_counts),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(msg) => println!("criterion {} ({name}): PASS: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL: {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
