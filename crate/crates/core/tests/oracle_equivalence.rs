use std::collections::BTreeMap;

use broccoli_core::invariant::{enumerate_leaves, gs_invariant, Leaf, RunOptions};
use broccoli_core::oracle::{all_markings, battery, exhaustive_enumerator, exhaustive_leaves, rectangle_degree};
use broccoli_core::{Direction, Point};

fn per_path(leaves: &[Leaf]) -> BTreeMap<Vec<Point>, usize> {
    let mut m = BTreeMap::new();
    for l in leaves.iter().filter(|l| l.counted) {
        *m.entry(l.path.base.points.clone()).or_default() += 1;
    }
    m
}

#[test]
fn battery_agrees_in_both_direction_types() {
    for q in battery() {
        for dir in [Direction::new(1, 11), Direction::new(11, 1)] {
            let q = q.clone().with_direction(dir);
            assert_eq!(
                exhaustive_enumerator(&q).unwrap().value,
                gs_invariant(&q).unwrap().value,
                "{:?} nv={} dir={:?}",
                q.degree,
                q.nv,
                dir
            );
        }
    }
}

#[test]
fn rectangle_leaves_per_path() {
    for q in all_markings(&rectangle_degree(), 1) {
        for dir in [Direction::new(1, 7), Direction::new(9, 1)] {
            let q = q.clone().with_direction(dir);
            let (a, _, _) = enumerate_leaves(&q, RunOptions::default()).unwrap();
            let (b, _, _) = exhaustive_leaves(&q, 12).unwrap();
            assert_eq!(per_path(&a), per_path(&b), "nv={} dir={:?}", q.nv, dir);
        }
    }
}
