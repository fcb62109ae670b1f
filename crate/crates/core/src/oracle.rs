//! Brute-force verifiers that share no search code with the incremental
//! engine: an exhaustive tiling enumerator, a lattice-sum identity, closed
//! form limit tables for the vertex weights and a direction-invariance
//! harness.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::exactmath::{format_rational, rat, rat_frac, Gaussian, Laurent, Limit, Rational, RationalFunction, SpecialPoint};
use crate::invariant::{
    enumerate_leaves, gs_invariant, invariant_from_leaves, make_leaf, mark_duplicate_cycle_curves, InvariantQuery,
    Leaf, LeafStats, RefinedInvariant, RunOptions,
};
use crate::lattice::{orient, pt, Degree, Direction, NewtonPolygon, Point};
use crate::pathsub::{Cell, CouplingKind, CouplingTag, EnhancedPath, Insert, LatticePath, Side};
use crate::qweights::{bracket_minus, bracket_plus, bracket_star, psi1, psi2, SmallRational};

/// Largest lattice area the exhaustive enumerator accepts by default.
pub const DEFAULT_MAX_AREA: i64 = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub subject: String,
    pub status: Status,
    /// Cases checked, and on failure the first mismatches.
    pub details: serde_json::Value,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    fn from_failures(subject: String, checked: usize, failures: Vec<serde_json::Value>) -> Self {
        let status = if failures.is_empty() { Status::Pass } else { Status::Fail };
        let shown: Vec<_> = failures.iter().take(10).cloned().collect();
        OracleReport {
            subject,
            status,
            details: json!({ "checked": checked, "failures": failures.len(), "first": shown }),
        }
    }
}

// ---------------------------------------------------------------------------
// lattice sums over a triangle

fn laurent_rf(terms: &[(i64, i64)]) -> RationalFunction {
    RationalFunction::from_laurent(Laurent::from_terms(terms.iter().map(|&(e, c)| (e, rat(c)))))
}

/// Both sides of the weighted lattice-point identity for the triangle
/// `(0,0), (m,0), (k,l)`.
pub fn la1_sides(m: i64, k: i64, l: i64) -> (RationalFunction, RationalFunction) {
    let (a, b, c) = (pt(0, 0), pt(m, 0), pt(k, l));
    let mut lhs = Laurent::zero();
    for y in 1..l {
        for x in k.min(0)..=m.max(k) {
            let v = pt(x, y);
            let s = [orient(a, b, v), orient(b, c, v), orient(c, a, v)];
            if s.iter().any(|&o| o < 0) {
                continue;
            }
            let mult = if s.iter().all(|&o| o > 0) { 2 } else { 1 };
            let e = m * (l - 2 * y);
            lhs = &lhs + &Laurent::from_terms([(e, rat(mult)), (-e, rat(mult))]);
        }
    }
    let num = laurent_rf(&[(m * l - m, 2 * m), (m - m * l, -2 * m)]);
    let den = laurent_rf(&[(m, 1), (-m, -1)]);
    let rhs = num.checked_div(&den).expect("nonzero denominator");
    (RationalFunction::from_laurent(lhs), rhs)
}

pub fn la1_check(m: i64, k: i64, l: i64) -> OracleReport {
    let subject = format!("lattice sum ({m},{k},{l})");
    if m < 1 || l < 1 {
        return OracleReport::from_failures(subject, 0, vec![json!({ "error": "m and l must be positive" })]);
    }
    let (lhs, rhs) = la1_sides(m, k, l);
    let failures = if lhs == rhs {
        Vec::new()
    } else {
        vec![json!({ "m": m, "k": k, "l": l, "lhs": lhs.to_string(), "rhs": rhs.to_string() })]
    };
    OracleReport::from_failures(subject, 1, failures)
}

/// Runs the identity over `1 <= m, l <= max` and `|k| <= max`.
pub fn la1_table(max: i64) -> OracleReport {
    let mut failures = Vec::new();
    let mut checked = 0;
    for m in 1..=max {
        for l in 1..=max {
            for k in -max..=max {
                checked += 1;
                let r = la1_check(m, k, l);
                if !r.passed() {
                    failures.extend(r.details["first"].as_array().cloned().unwrap_or_default());
                }
            }
        }
    }
    OracleReport::from_failures(format!("lattice sum identity up to {max}"), checked, failures)
}

// ---------------------------------------------------------------------------
// closed form limits

fn sign(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn int(n: i64) -> SmallRational {
    SmallRational::from_integer(n)
}

/// `lim_{z -> p} f / (z + 1/z)^k`.
fn scaled_limit(f: &RationalFunction, p: SpecialPoint, k: i32) -> Limit {
    let h = laurent_rf(&[(1, 1), (-1, 1)]);
    let mut g = f.clone();
    for _ in 0..k.unsigned_abs() {
        g = if k > 0 { g.checked_div(&h).expect("nonzero") } else { &g * &h };
    }
    g.limit(p)
}

struct LimitTable {
    checked: usize,
    failures: Vec<serde_json::Value>,
}

impl LimitTable {
    fn expect(&mut self, what: String, f: &RationalFunction, p: SpecialPoint, k: i32, value: Rational) {
        self.checked += 1;
        let got = scaled_limit(f, p, k);
        if got != Limit::Finite(Gaussian::real(value.clone())) {
            self.failures.push(json!({
                "case": what,
                "point": format!("{p:?}"),
                "scale": k,
                "expected": format_rational(&value),
                "got": format!("{got:?}"),
            }));
        }
    }

    fn expect_pole(&mut self, what: String, f: &RationalFunction, p: SpecialPoint) {
        self.checked += 1;
        if !matches!(f.limit(p), Limit::Pole(_)) {
            self.failures.push(json!({ "case": what, "point": format!("{p:?}"), "expected": "pole" }));
        }
    }
}

/// Compares the limits of the bracket and cycle functions at `z = 1` and
/// `z = i` with their closed forms, for all `m <= max_m` and integral
/// parameters `nu <= max_nu`.
pub fn psi_limit_table(max_m: i64, max_nu: i64) -> Result<OracleReport> {
    use SpecialPoint::{One, I};
    let mut t = LimitTable { checked: 0, failures: Vec::new() };
    for m in 1..=max_m {
        let plus = bracket_plus(m)?;
        let minus = bracket_minus(m)?;
        let star = bracket_star(m)?;
        t.expect(format!("[{m}]+"), &plus, One, 0, rat(1));
        t.expect(format!("[{m}]-"), &minus, One, 0, rat(m));
        t.expect(format!("[{m}]*"), &star, One, 0, if m % 2 == 0 { rat(1) } else { rat_frac(1, m) });
        if m % 2 == 1 {
            let v = m * sign((m - 1) / 2);
            t.expect(format!("[{m}]+"), &plus, I, 0, rat(v));
            t.expect(format!("[{m}]*"), &star.scale(&rat(m)), I, 0, rat(v));
            t.expect(format!("[{m}]-"), &minus, I, 0, rat(sign((m - 1) / 2)));
        } else {
            t.expect(format!("[{m}]+"), &plus, I, -1, rat(2 * sign(m / 2)));
            let v = sign(m / 2 - 1) * m;
            t.expect(format!("[{m}]-"), &minus, I, 1, rat(v));
            t.expect(format!("[{m}]*"), &star.scale(&rat(m)), I, 1, rat(v));
        }
        for nu in 1..=max_nu {
            let f = psi1(m as u32, int(nu))?;
            let what = format!("psi1({m},{nu})");
            t.expect(what.clone(), &f, One, 0, rat_frac(nu * (nu - 1) * m * (m * m - 1), 12));
            if m % 2 == 1 {
                if nu % 2 == 1 {
                    let v = match (nu.rem_euclid(4), m.rem_euclid(4)) {
                        (1, 1) => (1 - nu) * (m * m - 1),
                        (1, 3) => (1 - nu) * (m * m + 1),
                        (3, 1) => (m - 1) * (nu * (m - 1) - m - 1),
                        _ => (nu - 1) * (m * m + 1) - 2 * nu,
                    };
                    t.expect(what, &f, I, 0, rat_frac(v, 4));
                } else {
                    let v = sign(nu / 2) * m * (m * m - 1) * nu * (nu - 3);
                    t.expect(what, &f, I, 1, rat_frac(v, 24));
                }
            } else {
                t.expect_pole(what.clone(), &f, I);
                let v = if nu % 2 == 0 { rat_frac(m * nu, 2) } else { rat_frac(sign(m / 2) * m * (nu - 1), 2) };
                t.expect(what, &f, I, -1, v);
            }
            for nu2 in 1..=max_nu {
                let (n1, n2) = (nu, nu2);
                let f = psi2(m as u32, int(n1), int(n2))?;
                let what = format!("psi2({m},{n1},{n2})");
                t.expect(what.clone(), &f, One, 0, rat_frac(n1 * n2 * (n1 + n2 - 1) * m * m * (m * m - 1), 12));
                if m % 2 == 0 {
                    let mp = m / 2;
                    let body = match (n1 % 2, n2 % 2) {
                        (1, 1) => mp * (n1 + n2),
                        (0, 0) => mp * (n1 + n2 - 2 * n1 * n2),
                        _ => mp * (n1 + n2 - n1 * n2),
                    };
                    t.expect(what, &f, I, 0, rat_frac(sign(mp * (n1 + n2)) * body, 2));
                } else if n1 % 2 == 1 && n2 % 2 == 1 {
                    let (a, b) = ((n1 - 1) / 2, (n2 - 1) / 2);
                    let v = sign(m * (a + b + 1)) * (m * m - 1) * (2 * a + 2 * b + 1);
                    t.expect(what, &f, I, 0, rat_frac(v, 4));
                } else if n1 % 2 == 1 {
                    let body = 2 * m * m * n1 * n2 - 2 * m * n2 - 2 * m * m * m * n1 * n2 + 2 * m * m * n2
                        - 2 * m * m * n1 * n2
                        + 2 * m * n1 * n2
                        + m * (m * m - 1) * n2 * n2;
                    let v = sign((1 + m * (n1 + n2)) / 2) * body;
                    t.expect(what, &f, I, 1, rat_frac(v, 16));
                } else if n1 % 2 == 0 && n2 % 2 == 0 {
                    let (a, b, mp) = (n1 / 2, n2 / 2, (m - 1) / 2);
                    let v = sign(a + b + 1) * a * b * (2 * a + 2 * b - 3) * mp * (mp + 1) * (2 * mp + 1) * (2 * mp + 1);
                    t.expect(what, &f, I, 2, rat_frac(v, 3));
                }
            }
        }
    }
    let mut by_point: BTreeMap<String, usize> = BTreeMap::new();
    for f in &t.failures {
        *by_point.entry(f["point"].as_str().unwrap_or_default().to_string()).or_default() += 1;
    }
    let mut r =
        OracleReport::from_failures(format!("weight limits up to m={max_m}, nu={max_nu}"), t.checked, t.failures);
    r.details["failures_by_point"] = json!(by_point);
    Ok(r)
}

/// The two-parameter cycle function is symmetric in its parameters.
pub fn psi2_symmetry_table(max_m: i64, max_nu: i64) -> Result<OracleReport> {
    let mut failures = Vec::new();
    let mut checked = 0;
    for m in 1..=max_m {
        for a in 1..=max_nu {
            for b in a + 1..=max_nu {
                checked += 1;
                if psi2(m as u32, int(a), int(b))? != psi2(m as u32, int(b), int(a))? {
                    failures.push(json!({ "m": m, "nu1": a, "nu2": b }));
                }
            }
        }
    }
    Ok(OracleReport::from_failures(format!("psi2 symmetry up to m={max_m}, nu={max_nu}"), checked, failures))
}

// ---------------------------------------------------------------------------
// direction invariance

pub fn invariance_harness(q: &InvariantQuery, dirs: &[Direction]) -> Result<OracleReport> {
    if dirs.len() < 2 {
        return Err(Error::InvalidInput("at least two directions are needed".into()));
    }
    let mut values = Vec::new();
    for &d in dirs {
        let r = gs_invariant(&q.clone().with_direction(d))?;
        values.push((d, r.value));
    }
    let first = &values[0].1;
    let same = values.iter().all(|(_, v)| v == first);
    let listed: Vec<_> = values.iter().map(|(d, v)| json!({ "direction": d, "value": v.to_string() })).collect();
    Ok(OracleReport {
        subject: format!("direction invariance of {}", serde_json::to_string(&q.degree).unwrap_or_default()),
        status: if same { Status::Pass } else { Status::Fail },
        details: json!({ "checked": dirs.len(), "values": listed }),
    })
}

// ---------------------------------------------------------------------------
// exhaustive enumeration

/// Enumerates every tiling of the polygon compatible with every marked
/// path, then reconstructs and weighs the curves with the shared code.
pub fn exhaustive_enumerator(q: &InvariantQuery) -> Result<RefinedInvariant> {
    exhaustive_enumerator_with(q, DEFAULT_MAX_AREA)
}

pub fn exhaustive_enumerator_with(q: &InvariantQuery, max_area: i64) -> Result<RefinedInvariant> {
    let (leaves, stats, dir) = exhaustive_leaves(q, max_area)?;
    invariant_from_leaves(&leaves, stats, dir)
}

pub fn exhaustive_leaves(q: &InvariantQuery, max_area: i64) -> Result<(Vec<Leaf>, LeafStats, Direction)> {
    let poly = q.polygon()?;
    q.validate(&poly)?;
    if poly.lattice_area() > max_area {
        return Err(Error::BudgetExceeded(max_area as u64));
    }
    let dir = q.direction.unwrap_or_else(|| Direction::default_for(&poly));
    let phi = |p: Point| p.dot(dir.0);
    let mut pts: Vec<Point> = poly.lattice_points().to_vec();
    pts.sort_by_key(|&p| phi(p));
    if pts.windows(2).any(|w| phi(w[0]) == phi(w[1])) || !dir.is_generic(&poly) {
        return Err(Error::NotGeneric(dir.0.x, dir.0.y));
    }
    let tiler = Tiler::new(&poly, &pts, dir);
    let mut leaves = Vec::new();
    let mut stats = LeafStats::default();
    for path in chains(&pts, q.nv + q.ne) {
        let mut path_leaves = Vec::new();
        for inserts in marked_choices(&path, q.nv, &tiler) {
            let gh = EnhancedPath { base: LatticePath { points: path.clone() }, inserts };
            for cells in tiler.tilings(&gh, &q.degree, &mut stats) {
                if let Some(leaf) = make_leaf(q, &poly, &gh, cells, &mut stats)? {
                    path_leaves.push(leaf);
                }
            }
        }
        stats.duplicates += mark_duplicate_cycle_curves(&mut path_leaves);
        leaves.extend(path_leaves);
    }
    stats.leaves = leaves.len() as u64;
    Ok((leaves, stats, dir))
}

/// Chains with `n` steps from the first to the last point of `pts`.
fn chains(pts: &[Point], n: usize) -> Vec<Vec<Point>> {
    fn go(pts: &[Point], from: usize, left: usize, cur: &mut Vec<Point>, out: &mut Vec<Vec<Point>>) {
        let last = pts.len() - 1;
        if left == 1 {
            cur.push(pts[last]);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for j in from + 1..last {
            cur.push(pts[j]);
            go(pts, j, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n >= 1 && pts.len() >= 2 {
        go(pts, 0, n, &mut vec![pts[0]], &mut out);
    }
    out
}

fn marked_choices(path: &[Point], nv: usize, t: &Tiler) -> Vec<Vec<Insert>> {
    if nv > path.len() - 1 {
        return Vec::new();
    }
    let mut out = vec![Vec::new()];
    for i in 0..nv {
        let (a, b) = (path[i], path[i + 1]);
        let mut opts = Vec::new();
        for &u in &t.pts {
            if t.phi(a) < t.phi(u) && t.phi(u) < t.phi(b) {
                match orient(a, b, u).signum() {
                    0 => {
                        opts.push(Insert { point: u, side: Side::Plus, degenerate: true });
                        opts.push(Insert { point: u, side: Side::Minus, degenerate: true });
                    }
                    s => opts.push(Insert {
                        point: u,
                        side: if s > 0 { Side::Plus } else { Side::Minus },
                        degenerate: false,
                    }),
                }
            }
        }
        out = out
            .into_iter()
            .flat_map(|pre| {
                opts.iter().map(move |o| {
                    let mut v = pre.clone();
                    v.push(o.clone());
                    v
                })
            })
            .collect();
    }
    out
}

#[derive(Clone, Debug)]
struct Tile {
    /// Counterclockwise.
    verts: Vec<Point>,
}

type Edge = (Point, Point);

struct Tiler<'a> {
    poly: &'a NewtonPolygon,
    pts: Vec<Point>,
    dir: Direction,
}

struct Front {
    open: BTreeMap<Edge, Side>,
    boundary: Vec<Edge>,
}

impl<'a> Tiler<'a> {
    fn new(poly: &'a NewtonPolygon, pts: &[Point], dir: Direction) -> Self {
        Self { poly, pts: pts.to_vec(), dir }
    }

    fn phi(&self, p: Point) -> i64 {
        p.dot(self.dir.0)
    }

    /// The polygon lies on the right of the edge, which is on its boundary.
    fn faces_outside(&self, e: Edge) -> bool {
        self.poly.segment_on_boundary(e.0, e.1) && self.poly.vertices().iter().all(|&v| orient(e.0, e.1, v) <= 0)
    }

    /// Registers an edge whose left side still has to be covered.
    fn open_edge(&self, f: &mut Front, e: Edge, side: Side) -> bool {
        if self.faces_outside(e) {
            f.boundary.push((e.1, e.0));
            return true;
        }
        if f.open.contains_key(&e) {
            return false;
        }
        f.open.insert(e, side);
        true
    }

    fn tilings(&self, gh: &EnhancedPath, degree: &crate::lattice::Degree, stats: &mut LeafStats) -> Vec<Vec<Cell>> {
        let path = &gh.base.points;
        let mut fixed = Vec::new();
        let mut plus = vec![path[0]];
        let mut minus = vec![path[0]];
        let mut obstacles: Vec<Vec<Point>> = Vec::new();
        let mut area = 0;
        for i in 1..path.len() {
            let (a, b) = (path[i - 1], path[i]);
            match gh.inserts.get(i - 1) {
                Some(ins) => {
                    let u = ins.point;
                    fixed.push(Cell::Marked { index: i, vertices: [a, u, b], side: ins.side });
                    let o = orient(a, u, b);
                    area += o.abs();
                    if o != 0 {
                        obstacles.push(if o > 0 { vec![a, u, b] } else { vec![a, b, u] });
                    }
                    match ins.side {
                        Side::Plus => plus.push(u),
                        Side::Minus => minus.push(u),
                    }
                }
                None => fixed.push(Cell::Segment { index: i, ends: [a, b] }),
            }
            plus.push(b);
            minus.push(b);
        }
        for w in plus.windows(2).chain(minus.windows(2)) {
            obstacles.push(vec![w[0], w[1]]);
        }
        let mut front = Front { open: BTreeMap::new(), boundary: Vec::new() };
        for w in plus.windows(2) {
            if !self.open_edge(&mut front, (w[0], w[1]), Side::Plus) {
                return Vec::new();
            }
        }
        for w in minus.windows(2) {
            if !self.open_edge(&mut front, (w[1], w[0]), Side::Minus) {
                return Vec::new();
            }
        }
        let mut found = Vec::new();
        let mut tiles = Vec::new();
        self.fill(&mut front, &mut tiles, &obstacles, area, &mut found);
        let mut out = Vec::new();
        for (tiles, boundary) in found {
            let vecs: Vec<Point> = boundary.iter().map(|&(a, b)| (b - a).rot_cw()).collect();
            if !degree.matches(&vecs) {
                stats.skipped_inadmissible += 1;
                continue;
            }
            if let Some(mut cells) = peel(gh, &tiles) {
                let mut all = fixed.clone();
                all.append(&mut cells);
                out.push(all);
            }
        }
        out
    }

    fn fill(
        &self,
        front: &mut Front,
        tiles: &mut Vec<Tile>,
        obstacles: &[Vec<Point>],
        area: i64,
        found: &mut Vec<(Vec<Tile>, Vec<Edge>)>,
    ) {
        let Some((&e, &side)) = front.open.iter().min_by_key(|(e, _)| (self.phi(e.0).min(self.phi(e.1)), **e)) else {
            if area == self.poly.lattice_area() {
                found.push((tiles.clone(), front.boundary.clone()));
            }
            return;
        };
        let (p, q) = e;
        for &r in &self.pts {
            if orient(p, q, r) <= 0 {
                continue;
            }
            let mut shapes = vec![vec![p, q, r]];
            let d = p + r - q;
            if self.poly.contains(d) {
                shapes.push(vec![p, q, r, d]);
            }
            for verts in shapes {
                if !self.monotone(&verts, side) {
                    continue;
                }
                if tiles.iter().any(|t| overlaps(&t.verts, &verts)) || obstacles.iter().any(|o| overlaps(o, &verts)) {
                    continue;
                }
                let tile_area = orient(verts[0], verts[1], verts[2]) * if verts.len() == 4 { 2 } else { 1 };
                if area + tile_area > self.poly.lattice_area() {
                    continue;
                }
                let saved_open = front.open.clone();
                let saved_boundary = front.boundary.len();
                front.open.remove(&e);
                let mut ok = true;
                let n = verts.len();
                for k in 1..n {
                    let (s, t) = (verts[k], verts[(k + 1) % n]);
                    match front.open.get(&(s, t)) {
                        Some(&other) if other == side => {
                            front.open.remove(&(s, t));
                        }
                        Some(_) => ok = false,
                        None => ok &= self.open_edge(front, (t, s), side),
                    }
                    if !ok {
                        break;
                    }
                }
                if ok {
                    tiles.push(Tile { verts: verts.clone() });
                    self.fill(front, tiles, obstacles, area + tile_area, found);
                    tiles.pop();
                }
                front.open = saved_open;
                front.boundary.truncate(saved_boundary);
            }
        }
    }

    /// Triangles bend towards the path; parallelograms have their extreme
    /// vertices opposite.
    fn monotone(&self, verts: &[Point], side: Side) -> bool {
        let mut s = verts.to_vec();
        s.sort_by_key(|&p| self.phi(p));
        if verts.len() == 3 {
            side.sign() * orient(s[0], s[1], s[2]) > 0
        } else {
            let i = verts.iter().position(|&p| p == s[0]).unwrap();
            verts[(i + 2) % 4] == s[3]
        }
    }
}

/// Interiors of two convex polygons (the first may be a segment) meet.
fn overlaps(a: &[Point], b: &[Point]) -> bool {
    !(separated_by(a, b) || separated_by(b, a))
}

/// Some edge line of `a` leaves all of `b` on its closed outer side.
fn separated_by(a: &[Point], b: &[Point]) -> bool {
    if a.len() == 2 {
        let all = |sgn: i64| b.iter().all(|&v| sgn * orient(a[0], a[1], v) >= 0);
        return all(1) || all(-1);
    }
    let n = a.len();
    (0..n).any(|k| {
        let (s, t) = (a[k], a[(k + 1) % n]);
        b.iter().all(|&v| orient(s, t, v) <= 0)
    })
}

#[derive(Clone)]
struct PairState {
    marked: usize,
    side: Side,
    middle: Point,
}

struct Waiting {
    pair: PairState,
    first: usize,
    triangle: bool,
    moved: Option<Point>,
    event: u32,
}

/// Replays a finished tiling in step order: on each side the first vertex
/// that bulges away from the uncovered region must carry a triangle or a
/// parallelogram on its two path edges, and a step next to the middle of a
/// flat marked pair is followed by a step at the middle. `None` if the tiling
/// does not peel off this way.
fn peel(gh: &EnhancedPath, tiles: &[Tile]) -> Option<Vec<Cell>> {
    let mut by_edge: HashMap<Edge, usize> = HashMap::new();
    for (i, t) in tiles.iter().enumerate() {
        let n = t.verts.len();
        for k in 0..n {
            by_edge.insert((t.verts[k], t.verts[(k + 1) % n]), i);
        }
    }
    let pts = &gh.base.points;
    let mut plus = vec![pts[0]];
    let mut minus = vec![pts[0]];
    let mut pairs = Vec::new();
    for i in 1..pts.len() {
        if let Some(ins) = gh.inserts.get(i - 1) {
            match ins.side {
                Side::Plus => plus.push(ins.point),
                Side::Minus => minus.push(ins.point),
            }
            if ins.degenerate {
                pairs.push(PairState { marked: i, side: ins.side, middle: ins.point });
            }
        }
        plus.push(pts[i]);
        minus.push(pts[i]);
    }
    let mut tags: Vec<Option<CouplingTag>> = vec![None; tiles.len()];
    let mut used = vec![false; tiles.len()];
    let mut waiting: Option<Waiting> = None;
    let mut events = 0;
    loop {
        let bulges = |path: &[Point], side: Side, k: usize| side.sign() * orient(path[k - 1], path[k], path[k + 1]) > 0;
        let first = |path: &[Point], side: Side| (1..path.len().saturating_sub(1)).find(|&k| bulges(path, side, k));
        let (side, k) = match &waiting {
            Some(w) => {
                let path = if w.pair.side == Side::Plus { &plus } else { &minus };
                let k = path.iter().position(|&x| x == w.pair.middle)?;
                if k == 0 || k + 1 == path.len() || !bulges(path, w.pair.side, k) {
                    return None;
                }
                (w.pair.side, k)
            }
            None => match first(&plus, Side::Plus) {
                Some(k) => (Side::Plus, k),
                None => match first(&minus, Side::Minus) {
                    Some(k) => (Side::Minus, k),
                    None => break,
                },
            },
        };
        let path = if side == Side::Plus { &mut plus } else { &mut minus };
        let (a, b, c) = (path[k - 1], path[k], path[k + 1]);
        let edge = if side == Side::Plus { (a, b) } else { (b, a) };
        let t = *by_edge.get(&edge)?;
        if used[t] {
            return None;
        }
        let verts = &tiles[t].verts;
        let triangle = verts.len() == 3;
        let expected: Vec<Point> = if triangle { vec![a, b, c] } else { vec![a, b, c, a + c - b] };
        if !expected.iter().all(|x| verts.contains(x)) {
            return None;
        }
        used[t] = true;
        let moved = if triangle {
            path.remove(k);
            None
        } else {
            path[k] = a + c - b;
            Some(a + c - b)
        };
        if let Some(w) = waiting.take() {
            let kind = match (w.triangle, triangle) {
                (true, true) => CouplingKind::Cycle,
                (false, false) => CouplingKind::Shift,
                _ => CouplingKind::Trapezoid,
            };
            let tag = CouplingTag { marked: w.pair.marked, event: w.event, kind };
            tags[w.first] = Some(tag);
            tags[t] = Some(tag);
            if kind == CouplingKind::Shift {
                pairs.push(PairState { middle: w.moved?, ..w.pair });
            }
            continue;
        }
        let touches = |q: &PairState| q.side == side && (q.middle == a || q.middle == c);
        if let Some(pair) = pairs.iter().find(|q| touches(q)).cloned() {
            pairs.retain(|q| !touches(q));
            waiting = Some(Waiting { pair, first: t, triangle, moved, event: events });
            events += 1;
        }
    }
    if used.iter().any(|&u| !u) {
        return None;
    }
    Some(
        tiles
            .iter()
            .zip(tags)
            .map(|(t, tag)| match t.verts.len() {
                3 => Cell::Triangle { vertices: [t.verts[0], t.verts[1], t.verts[2]], tag },
                _ => Cell::Parallelogram { vertices: [t.verts[0], t.verts[1], t.verts[2], t.verts[3]], tag },
            })
            .collect(),
    )
}

// ---------------------------------------------------------------------------
// the standard battery

/// Two ends each of directions `(±1, 0)` and three each of `(0, ±1)`.
pub fn rectangle_degree() -> Degree {
    Degree::new([(pt(-1, 0), 2), (pt(0, 1), 3), (pt(1, 0), 2), (pt(0, -1), 3)]).expect("balanced")
}

/// Every admissible marking for a degree and genus.
pub fn all_markings(degree: &Degree, genus: u8) -> Vec<InvariantQuery> {
    let n = degree.size() + genus as usize - 1;
    (0..=n / 2).map(|nv| InvariantQuery::new(degree.clone(), genus, nv, n - 2 * nv)).collect()
}

/// Rational plane curves of degree one to three and elliptic curves of the
/// rectangle degree, under every admissible marking.
pub fn battery() -> Vec<InvariantQuery> {
    let mut out = Vec::new();
    for d in 1..=3 {
        out.extend(all_markings(&Degree::plane(d), 0));
    }
    out.extend(all_markings(&rectangle_degree(), 1));
    out
}

fn query_label(q: &InvariantQuery) -> String {
    format!(
        "{} g={} nv={} ne={}",
        serde_json::to_string(&q.degree).unwrap_or_default(),
        q.genus,
        q.nv,
        q.ne
    )
}

/// Compares the exhaustive enumerator with the incremental engine.
pub fn equivalence_check(q: &InvariantQuery, max_area: i64) -> Result<OracleReport> {
    let a = gs_invariant(q)?;
    let b = exhaustive_enumerator_with(q, max_area)?;
    let failures = if a.value == b.value {
        Vec::new()
    } else {
        vec![json!({ "incremental": a.value.to_string(), "exhaustive": b.value.to_string() })]
    };
    Ok(OracleReport::from_failures(format!("exhaustive enumeration {}", query_label(q)), 1, failures))
}

/// On every leaf, the number of flat marked cells equals the number of
/// collinear marked vertices with two ends of equal weight.
pub fn segment_count_check(q: &InvariantQuery) -> Result<OracleReport> {
    let (leaves, _, _) = enumerate_leaves(q, RunOptions::default())?;
    let failures: Vec<_> = leaves
        .iter()
        .enumerate()
        .filter(|(_, l)| l.segments != l.class.aut_r)
        .map(|(i, l)| {
            json!({
                "leaf": i,
                "path": l.path.base.points,
                "segments": l.segments,
                "aut_r": l.class.aut_r,
            })
        })
        .collect();
    Ok(OracleReport::from_failures(format!("segment count {}", query_label(q)), leaves.len(), failures))
}

/// The whole oracle suite: identity tables, direction invariance with `k`
/// directions, and exhaustive enumeration up to `max_area` on the battery.
pub fn suite(max_area: i64, k: usize) -> Result<Vec<OracleReport>> {
    let mut out = vec![la1_table(6), psi2_symmetry_table(5, 5)?, psi_limit_table(6, 6)?];
    for q in battery() {
        let poly = q.polygon()?;
        out.push(invariance_harness(&q, &Direction::family(&poly, k.max(2)))?);
        if poly.lattice_area() <= max_area {
            out.push(equivalence_check(&q, max_area)?);
        }
    }
    Ok(out)
}

pub fn all_passed(reports: &[OracleReport]) -> bool {
    reports.iter().all(OracleReport::passed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::Limit;

    fn rf_const(n: i64) -> RationalFunction {
        RationalFunction::from_laurent(Laurent::constant(rat(n)))
    }

    #[test]
    fn lattice_sum_examples() {
        let (l, r) = la1_sides(1, 0, 1);
        assert!(l.is_zero() && r.is_zero());
        let (l, r) = la1_sides(1, 1, 2);
        assert_eq!(l, rf_const(2));
        assert_eq!(r, rf_const(2));
        assert!(la1_check(2, -3, 4).passed());
        assert!(!la1_check(0, 1, 1).passed());
    }

    #[test]
    fn limit_examples() {
        let f = psi2(2, int(1), int(1)).unwrap();
        assert_eq!(f.limit(SpecialPoint::I), Limit::Finite(Gaussian::real(rat(1))));
        let f = psi1(2, int(2)).unwrap();
        assert_eq!(scaled_limit(&f, SpecialPoint::I, -1), Limit::Finite(Gaussian::real(rat(2))));
        // [2]^- is z + 1/z itself
        let f = bracket_minus(2).unwrap();
        assert_eq!(scaled_limit(&f, SpecialPoint::I, 1), Limit::Finite(Gaussian::real(rat(1))));
    }

    #[test]
    fn tables_at_one_and_symmetry() {
        assert!(psi2_symmetry_table(3, 3).unwrap().passed());
        let r = psi_limit_table(6, 6).unwrap();
        assert!(r.details["failures_by_point"].get("One").is_none(), "{r:?}");
    }

    #[test]
    fn invariance_examples() {
        let q = InvariantQuery::with_nv(rectangle_degree(), 1, 1).unwrap();
        assert!(invariance_harness(&q, &[Direction::new(1, 7), Direction::new(9, 1)]).unwrap().passed());
        assert!(invariance_harness(&q, &[Direction::new(1, 7)]).is_err());
        let line = InvariantQuery::new(Degree::plane(1), 0, 0, 2);
        assert_eq!(
            invariance_harness(&line, &[Direction::new(1, 1), Direction::new(1, 3)]),
            Err(Error::NotGeneric(1, 1))
        );
    }

    #[test]
    fn exhaustive_examples() {
        let line = InvariantQuery::new(Degree::plane(1), 0, 0, 2);
        assert_eq!(exhaustive_enumerator(&line).unwrap().value.to_string(), "1");
        let q = InvariantQuery::with_nv(rectangle_degree(), 1, 1).unwrap();
        assert_eq!(exhaustive_enumerator(&q).unwrap().value.to_string(), "2*y + 14 + 2*y^-1");
        let conic = InvariantQuery::new(Degree::plane(2), 0, 0, 5);
        assert!(equivalence_check(&conic, 12).unwrap().passed());
        let quartic = InvariantQuery::with_nv(Degree::plane(4), 0, 0).unwrap();
        assert_eq!(exhaustive_enumerator_with(&quartic, 12).unwrap_err(), Error::BudgetExceeded(12));
    }

    #[test]
    fn chain_counts() {
        let pts: Vec<Point> = (0..6).map(|i| pt(i, 0)).collect();
        // interior choices: C(4, n - 1)
        assert_eq!(chains(&pts, 1).len(), 1);
        assert_eq!(chains(&pts, 3).len(), 6);
        assert_eq!(chains(&pts, 5).len(), 1);
        assert!(chains(&pts, 6).is_empty());
    }

    #[test]
    fn battery_shape() {
        let b = battery();
        assert_eq!(b.len(), 2 + 3 + 5 + 6);
        assert!(b.iter().all(|q| 2 * q.nv + q.ne + 1 == q.degree.size() + q.genus as usize));
    }
}
