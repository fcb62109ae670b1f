//! Lattice geometry: degrees, Newton polygons, generic directions and the
//! induced order on lattice points.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

pub const fn pt(x: i64, y: i64) -> Point {
    Point { x, y }
}

impl Point {
    pub fn dot(self, o: Point) -> i64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> i64 {
        self.x * o.y - self.y * o.x
    }

    /// Lattice length: the gcd of the coordinates.
    pub fn lattice_length(self) -> i64 {
        self.x.gcd(&self.y)
    }

    pub fn primitive(self) -> Point {
        let g = self.lattice_length();
        if g == 0 {
            self
        } else {
            pt(self.x / g, self.y / g)
        }
    }

    pub fn rot_ccw(self) -> Point {
        pt(-self.y, self.x)
    }

    pub fn rot_cw(self) -> Point {
        pt(self.y, -self.x)
    }

    pub fn is_zero(self) -> bool {
        self.x == 0 && self.y == 0
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        pt(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        pt(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        pt(-self.x, -self.y)
    }
}

impl Mul<Point> for i64 {
    type Output = Point;
    fn mul(self, p: Point) -> Point {
        pt(self * p.x, self * p.y)
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.x, self.y].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [x, y] = <[i64; 2]>::deserialize(d)?;
        Ok(pt(x, y))
    }
}

/// Twice the signed area of the triangle `a b c`.
pub fn orient(a: Point, b: Point, c: Point) -> i64 {
    (b - a).cross(c - a)
}

/// Strict convex hull, counterclockwise from the smallest point. Fewer than
/// three points come back sorted and deduplicated.
pub fn convex_hull(pts: &[Point]) -> Vec<Point> {
    let mut p: Vec<Point> = pts.to_vec();
    p.sort();
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let mut lower: Vec<Point> = Vec::new();
    for &q in &p {
        while lower.len() >= 2 && orient(lower[lower.len() - 2], lower[lower.len() - 1], q) <= 0 {
            lower.pop();
        }
        lower.push(q);
    }
    let mut upper: Vec<Point> = Vec::new();
    for &q in p.iter().rev() {
        while upper.len() >= 2 && orient(upper[upper.len() - 2], upper[upper.len() - 1], q) <= 0 {
            upper.pop();
        }
        upper.push(q);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Lattice area (twice the Euclidean area) of a polygon given in order.
pub fn polygon_lattice_area(vs: &[Point]) -> i64 {
    let n = vs.len();
    let s: i64 = (0..n).map(|i| vs[i].cross(vs[(i + 1) % n])).sum();
    s.abs()
}

/// A degree: a multiset of nonzero integer vectors summing to zero.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Degree {
    entries: Vec<(Point, u32)>,
}

impl Degree {
    pub fn new<I: IntoIterator<Item = (Point, u32)>>(it: I) -> Result<Self, Error> {
        let mut map: BTreeMap<Point, u32> = BTreeMap::new();
        for (v, m) in it {
            if v.is_zero() {
                return Err(Error::ZeroVector);
            }
            if m > 0 {
                *map.entry(v).or_default() += m;
            }
        }
        let d = Self { entries: map.into_iter().collect() };
        if d.is_empty() {
            return Err(Error::InvalidInput("degree is empty".into()));
        }
        let sum = d.entries.iter().fold(Point::default(), |acc, &(v, m)| acc + (m as i64) * v);
        if !sum.is_zero() {
            return Err(Error::Unbalanced(sum.x, sum.y));
        }
        Ok(d)
    }

    pub fn from_vectors(vs: &[Point]) -> Result<Self, Error> {
        Self::new(vs.iter().map(|&v| (v, 1)))
    }

    /// The degree of plane curves of degree `d`.
    pub fn plane(d: u32) -> Self {
        Self::new([(pt(-1, 0), d), (pt(0, -1), d), (pt(1, 1), d)]).unwrap()
    }

    pub fn entries(&self) -> &[(Point, u32)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of vectors counted with multiplicity.
    pub fn size(&self) -> usize {
        self.entries.iter().map(|e| e.1 as usize).sum()
    }

    pub fn vectors(&self) -> Vec<Point> {
        self.entries
            .iter()
            .flat_map(|&(v, m)| std::iter::repeat(v).take(m as usize))
            .collect()
    }

    pub fn is_primitive(&self) -> bool {
        self.entries.iter().all(|(v, _)| v.lattice_length() == 1)
    }

    pub fn has_even_vector(&self) -> bool {
        self.entries.iter().any(|(v, _)| v.lattice_length() % 2 == 0)
    }

    /// Multiset equality with a list of vectors.
    pub fn matches(&self, vs: &[Point]) -> bool {
        let mut map: BTreeMap<Point, u32> = BTreeMap::new();
        for &v in vs {
            *map.entry(v).or_default() += 1;
        }
        map.into_iter().collect::<Vec<_>>() == self.entries
    }
}

impl Serialize for Degree {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<[i64; 3]> = self.entries.iter().map(|(p, m)| [p.x, p.y, *m as i64]).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Degree {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = Vec::<Vec<i64>>::deserialize(d)?;
        let mut entries = Vec::new();
        for e in raw {
            match e.as_slice() {
                [x, y] => entries.push((pt(*x, *y), 1)),
                [x, y, m] if *m >= 0 => entries.push((pt(*x, *y), *m as u32)),
                _ => return Err(serde::de::Error::custom("degree entries are [dx,dy] or [dx,dy,mult]")),
            }
        }
        Degree::new(entries).map_err(serde::de::Error::custom)
    }
}

fn half(v: Point) -> u8 {
    if v.y > 0 || (v.y == 0 && v.x > 0) {
        0
    } else {
        1
    }
}

/// Angular order starting at the positive x axis.
fn angle_cmp(a: Point, b: Point) -> Ordering {
    half(a).cmp(&half(b)).then_with(|| 0.cmp(&a.cross(b)))
}

/// A convex lattice polygon with vertices counterclockwise, starting at the
/// lexicographically smallest vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    vertices: Vec<Point>,
    boundary: Vec<Point>,
    points: Vec<Point>,
    lattice_area: i64,
}

impl NewtonPolygon {
    /// Builds the polygon whose counterclockwise boundary segments, rotated
    /// clockwise by a quarter turn, are the vectors of the degree.
    pub fn from_degree(d: &Degree) -> Result<Self, Error> {
        let mut sides: Vec<Point> = d.vectors().into_iter().map(Point::rot_ccw).collect();
        sides.sort_by(|a, b| angle_cmp(*a, *b));
        let mut chain = vec![Point::default()];
        for s in &sides {
            chain.push(*chain.last().unwrap() + *s);
        }
        chain.pop();
        let origin = *chain.iter().min().unwrap();
        let start = chain.iter().position(|p| *p == origin).unwrap();
        let n = chain.len();
        let boundary_pts: Vec<Point> = (0..n).map(|i| chain[(start + i) % n] - origin).collect();
        let mut vertices = Vec::new();
        for i in 0..n {
            let prev = boundary_pts[(i + n - 1) % n];
            let cur = boundary_pts[i];
            let next = boundary_pts[(i + 1) % n];
            if orient(prev, cur, next) != 0 {
                vertices.push(cur);
            }
        }
        if vertices.len() < 3 {
            return Err(Error::Degenerate);
        }
        Ok(Self::from_vertices(vertices))
    }

    /// `vertices` must be a counterclockwise convex polygon without repeated
    /// or collinear vertices.
    pub fn from_vertices(vertices: Vec<Point>) -> Self {
        let origin_idx = (0..vertices.len()).min_by_key(|&i| vertices[i]).unwrap();
        let vertices: Vec<Point> =
            (0..vertices.len()).map(|i| vertices[(origin_idx + i) % vertices.len()]).collect();
        let n = vertices.len();
        let mut boundary = Vec::new();
        for i in 0..n {
            let a = vertices[i];
            let e = vertices[(i + 1) % n] - a;
            let g = e.lattice_length();
            let step = e.primitive();
            for k in 0..g {
                boundary.push(a + k * step);
            }
        }
        let (lo_x, hi_x) = minmax(vertices.iter().map(|p| p.x));
        let (lo_y, hi_y) = minmax(vertices.iter().map(|p| p.y));
        let mut points = Vec::new();
        for x in lo_x..=hi_x {
            for y in lo_y..=hi_y {
                let p = pt(x, y);
                if (0..n).all(|i| orient(vertices[i], vertices[(i + 1) % n], p) >= 0) {
                    points.push(p);
                }
            }
        }
        let lattice_area = polygon_lattice_area(&vertices);
        Self { vertices, boundary, points, lattice_area }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Boundary lattice points counterclockwise from the first vertex.
    pub fn boundary_points(&self) -> &[Point] {
        &self.boundary
    }

    /// All lattice points, sorted.
    pub fn lattice_points(&self) -> &[Point] {
        &self.points
    }

    pub fn num_lattice_points(&self) -> usize {
        self.points.len()
    }

    pub fn interior_count(&self) -> usize {
        self.points.len() - self.boundary.len()
    }

    /// Twice the Euclidean area.
    pub fn lattice_area(&self) -> i64 {
        self.lattice_area
    }

    pub fn contains(&self, p: Point) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| orient(self.vertices[i], self.vertices[(i + 1) % n], p) >= 0)
    }

    pub fn on_boundary(&self, p: Point) -> bool {
        let n = self.vertices.len();
        self.contains(p)
            && (0..n).any(|i| orient(self.vertices[i], self.vertices[(i + 1) % n], p) == 0)
    }

    /// Whether the closed segment `[a, b]` lies in the boundary.
    pub fn segment_on_boundary(&self, a: Point, b: Point) -> bool {
        let n = self.vertices.len();
        (0..n).any(|i| {
            let (u, v) = (self.vertices[i], self.vertices[(i + 1) % n]);
            orient(u, v, a) == 0 && orient(u, v, b) == 0
        })
    }

    /// Polygon given by its perimeter points in either orientation. Points
    /// in the middle of a side are allowed; a point off the hull boundary is not.
    pub fn from_perimeter(points: &[Point]) -> Result<Self, Error> {
        let hull = convex_hull(points);
        if hull.len() < 3 {
            return Err(Error::Degenerate);
        }
        let n = hull.len();
        for &p in points {
            let on_side = (0..n).any(|i| orient(hull[i], hull[(i + 1) % n], p) == 0);
            if !on_side {
                return Err(Error::InvalidInput(format!("polygon is not convex at {p}")));
            }
        }
        Ok(Self::from_vertices(hull))
    }

    /// The degree read off the perimeter: one primitive vector per lattice
    /// segment of the boundary.
    pub fn degree(&self) -> Degree {
        Degree::from_vectors(&self.primitive_degree()).expect("closed boundary is balanced")
    }

    /// Counterclockwise boundary sides rotated clockwise: recovers the degree
    /// with every side split into primitive pieces.
    pub fn primitive_degree(&self) -> Vec<Point> {
        let n = self.boundary.len();
        (0..n).map(|i| (self.boundary[(i + 1) % n] - self.boundary[i]).rot_cw()).collect()
    }
}

fn minmax(it: impl Iterator<Item = i64>) -> (i64, i64) {
    it.fold((i64::MAX, i64::MIN), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// A direction vector used to order lattice points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Direction(pub Point);

impl Direction {
    pub fn new(x: i64, y: i64) -> Self {
        Self(pt(x, y))
    }

    pub fn perp(self) -> Point {
        self.0.rot_ccw()
    }

    /// No two lattice points share a value of the functional or of its
    /// orthogonal complement.
    pub fn is_generic(self, poly: &NewtonPolygon) -> bool {
        let pts = poly.lattice_points();
        let b = self.perp();
        for (i, &u) in pts.iter().enumerate() {
            for &v in &pts[i + 1..] {
                let w = u - v;
                if w.dot(self.0) == 0 || w.dot(b) == 0 {
                    return false;
                }
            }
        }
        true
    }

    /// The default direction `(1, N)` for the smallest usable `N`.
    pub fn default_for(poly: &NewtonPolygon) -> Self {
        let (lo, hi) = minmax(poly.lattice_points().iter().map(|p| p.x));
        let mut n = hi - lo + 1;
        loop {
            let d = Self::new(1, n);
            if d.is_generic(poly) {
                return d;
            }
            n += 1;
        }
    }

    /// A family of `k` generic directions, used by the invariance harness.
    /// The first two are of the forms `(1, N)` and `(N, 1)`.
    pub fn family(poly: &NewtonPolygon, k: usize) -> Vec<Self> {
        let (lo_x, hi_x) = minmax(poly.lattice_points().iter().map(|p| p.x));
        let (lo_y, hi_y) = minmax(poly.lattice_points().iter().map(|p| p.y));
        let sx = hi_x - lo_x + 1;
        let sy = hi_y - lo_y + 1;
        let first = |make: &dyn Fn(i64) -> Self| (0..).map(make).find(|d| d.is_generic(poly)).unwrap();
        let mut out = vec![first(&|n| Self::new(1, sx + n)), first(&|n| Self::new(sy + n, 1))];
        let others = (0..).flat_map(|n: i64| {
            [
                Self::new(-1, sx + n),
                Self::new(sy + n, -1),
                Self::new(2, 2 * sx + 1 + 2 * n),
                Self::new(2 * sy + 1 + 2 * n, 3),
            ]
        });
        for d in others {
            if out.len() >= k {
                break;
            }
            if d.is_generic(poly) && !out.contains(&d) {
                out.push(d);
            }
        }
        out.truncate(k);
        out
    }
}

/// Lattice points of a polygon sorted by a generic direction.
#[derive(Clone, Debug)]
pub struct DirectionOrder {
    pub direction: Direction,
    order: Vec<Point>,
}

impl DirectionOrder {
    pub fn new(poly: &NewtonPolygon, a: Direction) -> Result<Self, Error> {
        if !a.is_generic(poly) {
            return Err(Error::NotGeneric(a.0.x, a.0.y));
        }
        let mut order = poly.lattice_points().to_vec();
        order.sort_by_key(|p| p.dot(a.0));
        Ok(Self { direction: a, order })
    }

    pub fn phi(&self, p: Point) -> i64 {
        p.dot(self.direction.0)
    }

    pub fn points(&self) -> &[Point] {
        &self.order
    }

    pub fn min(&self) -> Point {
        self.order[0]
    }

    pub fn max(&self) -> Point {
        *self.order.last().unwrap()
    }

    pub fn less(&self, a: Point, b: Point) -> bool {
        self.phi(a) < self.phi(b)
    }
}

/// The two boundary chains from the minimum to the maximum, both including
/// the endpoints. The `plus` chain lies to the left of the direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundarySplit {
    pub plus: Vec<Point>,
    pub minus: Vec<Point>,
}

pub fn boundary_split(poly: &NewtonPolygon, order: &DirectionOrder) -> BoundarySplit {
    let b = poly.boundary_points();
    let n = b.len();
    let imin = b.iter().position(|p| *p == order.min()).unwrap();
    let imax = b.iter().position(|p| *p == order.max()).unwrap();
    let mut minus = Vec::new();
    let mut i = imin;
    loop {
        minus.push(b[i]);
        if i == imax {
            break;
        }
        i = (i + 1) % n;
    }
    let mut plus = Vec::new();
    let mut i = imax;
    loop {
        plus.push(b[i]);
        if i == imin {
            break;
        }
        i = (i + 1) % n;
    }
    plus.reverse();
    BoundarySplit { plus, minus }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect() -> Degree {
        Degree::new([(pt(0, -1), 3), (pt(0, 1), 3), (pt(-1, 0), 2), (pt(1, 0), 2)]).unwrap()
    }

    #[test]
    fn perimeter_reading() {
        let p = NewtonPolygon::from_perimeter(&[pt(0, 2), pt(3, 2), pt(3, 0), pt(1, 0), pt(0, 0)]).unwrap();
        assert_eq!(p.vertices(), &[pt(0, 0), pt(3, 0), pt(3, 2), pt(0, 2)]);
        assert_eq!(p.degree(), rect());
        assert_eq!(NewtonPolygon::from_perimeter(&[pt(0, 0), pt(2, 0), pt(0, 2)]).unwrap().degree(), Degree::plane(2));
        assert!(matches!(
            NewtonPolygon::from_perimeter(&[pt(0, 0), pt(4, 0), pt(1, 1), pt(0, 4)]),
            Err(Error::InvalidInput(_))
        ));
        assert_eq!(NewtonPolygon::from_perimeter(&[pt(0, 0), pt(1, 1), pt(2, 2)]), Err(Error::Degenerate));
        let h = convex_hull(&[pt(1, 1), pt(0, 0), pt(2, 0), pt(1, 0), pt(0, 2)]);
        assert_eq!(h, vec![pt(0, 0), pt(2, 0), pt(0, 2)]);
    }

    #[test]
    fn plane_curves_give_standard_triangles() {
        for d in 1..=4 {
            let p = NewtonPolygon::from_degree(&Degree::plane(d)).unwrap();
            let d = d as i64;
            assert_eq!(p.vertices(), &[pt(0, 0), pt(d, 0), pt(0, d)]);
            assert_eq!(p.lattice_area(), d * d);
            assert_eq!(p.interior_count() as i64, (d - 1) * (d - 2) / 2);
        }
    }

    #[test]
    fn rectangle_degree() {
        let p = NewtonPolygon::from_degree(&rect()).unwrap();
        assert_eq!(p.vertices(), &[pt(0, 0), pt(3, 0), pt(3, 2), pt(0, 2)]);
        assert_eq!(p.num_lattice_points(), 12);
        assert_eq!(p.interior_count(), 2);
        assert!(rect().matches(&p.primitive_degree()));
    }

    #[test]
    fn degree_validation() {
        assert_eq!(Degree::from_vectors(&[pt(1, 0), pt(0, 1)]), Err(Error::Unbalanced(1, 1)));
        assert_eq!(Degree::from_vectors(&[pt(0, 0)]), Err(Error::ZeroVector));
        assert_eq!(
            NewtonPolygon::from_degree(&Degree::from_vectors(&[pt(1, 0), pt(-1, 0)]).unwrap()),
            Err(Error::Degenerate)
        );
    }

    #[test]
    fn non_primitive_sides() {
        let d = Degree::from_vectors(&[pt(-2, 0), pt(0, -2), pt(2, 2)]).unwrap();
        let p = NewtonPolygon::from_degree(&d).unwrap();
        assert_eq!(p.vertices(), &[pt(0, 0), pt(2, 0), pt(0, 2)]);
        assert!(!d.is_primitive());
    }

    #[test]
    fn generic_directions() {
        let p = NewtonPolygon::from_degree(&rect()).unwrap();
        assert!(Direction::new(1, 7).is_generic(&p));
        assert!(!Direction::new(1, 1).is_generic(&p));
        assert!(Direction::default_for(&p).is_generic(&p));
        let fam = Direction::family(&p, 5);
        assert_eq!(fam.len(), 5);
        assert!(fam.iter().all(|d| d.is_generic(&p)));
    }

    #[test]
    fn rectangle_split() {
        let p = NewtonPolygon::from_degree(&rect()).unwrap();
        let o = DirectionOrder::new(&p, Direction::new(1, 7)).unwrap();
        let s = boundary_split(&p, &o);
        assert_eq!(s.plus, vec![pt(0, 0), pt(0, 1), pt(0, 2), pt(1, 2), pt(2, 2), pt(3, 2)]);
        assert_eq!(s.minus, vec![pt(0, 0), pt(1, 0), pt(2, 0), pt(3, 0), pt(3, 1), pt(3, 2)]);
    }

    #[test]
    fn degree_json() {
        let d: Degree = serde_json::from_str("[[-1,0,2],[0,-1,2],[1,1,2]]").unwrap();
        assert_eq!(d, Degree::plane(2));
        assert_eq!(serde_json::to_string(&d).unwrap(), "[[-1,0,2],[0,-1,2],[1,1,2]]");
    }
}
