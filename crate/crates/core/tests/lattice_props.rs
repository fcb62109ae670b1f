use broccoli_core::lattice::{convex_hull, orient, DirectionOrder};
use broccoli_core::{pt, Direction, NewtonPolygon, Point};
use proptest::prelude::*;

fn polygon() -> impl Strategy<Value = NewtonPolygon> {
    prop::collection::vec((0i64..5, 0i64..4), 3..9)
        .prop_map(|v| v.into_iter().map(|(x, y)| pt(x, y)).collect::<Vec<Point>>())
        .prop_filter("two dimensional", |v| convex_hull(v).len() >= 3)
        .prop_map(|v| NewtonPolygon::from_perimeter(&convex_hull(&v)).unwrap())
}

proptest! {
    #[test]
    fn degree_round_trip(p in polygon()) {
        let d = p.degree();
        let q = NewtonPolygon::from_degree(&d).unwrap();
        let shift = p.vertices()[0] - q.vertices()[0];
        let moved: Vec<Point> = q.vertices().iter().map(|&v| v + shift).collect();
        prop_assert_eq!(moved.as_slice(), p.vertices());
        prop_assert_eq!(d.size(), p.boundary_points().len());
    }

    #[test]
    fn pick(p in polygon()) {
        let b = p.boundary_points().len() as i64;
        let i = p.interior_count() as i64;
        prop_assert_eq!(p.lattice_area(), 2 * i + b - 2);
        prop_assert_eq!(p.num_lattice_points() as i64, i + b);
    }

    #[test]
    fn generated_directions_are_generic(p in polygon(), k in 2usize..6) {
        let fam = Direction::family(&p, k);
        prop_assert_eq!(fam.len(), k);
        prop_assert_eq!(fam[0].0.x, 1);
        prop_assert_eq!(fam[1].0.y, 1);
        for d in fam.iter().copied().chain([Direction::default_for(&p)]) {
            prop_assert!(d.is_generic(&p));
            let o = DirectionOrder::new(&p, d).unwrap();
            prop_assert!(o.points().windows(2).all(|w| o.phi(w[0]) < o.phi(w[1])));
        }
    }

    #[test]
    fn orientation_is_alternating(a in (-5i64..5, -5i64..5), b in (-5i64..5, -5i64..5), c in (-5i64..5, -5i64..5)) {
        let (a, b, c) = (pt(a.0, a.1), pt(b.0, b.1), pt(c.0, c.1));
        prop_assert_eq!(orient(a, b, c), -orient(b, a, c));
        prop_assert_eq!(orient(a, b, c), orient(b, c, a));
    }
}

#[test]
fn rectangle_generic_directions() {
    let p = NewtonPolygon::from_perimeter(&[pt(0, 0), pt(3, 0), pt(3, 2), pt(0, 2)]).unwrap();
    assert!(Direction::new(1, 7).is_generic(&p));
    assert!(Direction::new(9, 1).is_generic(&p));
    assert!(!Direction::new(1, 1).is_generic(&p));
    assert!(!Direction::new(3, 1).is_generic(&p));
}
