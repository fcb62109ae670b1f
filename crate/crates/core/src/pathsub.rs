//! Lattice paths, their enhancements and the branching completion of the
//! initial subdivision into final subdivisions of the Newton polygon.
//!
//! Marked points lying on a path segment split that segment into two
//! collinear pieces on one side. The two pieces are kept as a coupled pair:
//! once a step consumes one of them, the next step is forced on the other,
//! and the outcome of the two steps is recorded as a [`CouplingTag`].

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{orient, DirectionOrder, NewtonPolygon, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Side {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Side {
    pub fn sign(self) -> i64 {
        match self {
            Side::Plus => 1,
            Side::Minus => -1,
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LatticePath {
    pub points: Vec<Point>,
}

impl LatticePath {
    pub fn len(&self) -> usize {
        self.points.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.points.len() <= 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Insert {
    pub point: Point,
    pub side: Side,
    /// The point lies on the segment it is inserted into.
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct EnhancedPath {
    pub base: LatticePath,
    /// `inserts[i - 1]` sits between `base.points[i - 1]` and `base.points[i]`.
    pub inserts: Vec<Insert>,
}

impl EnhancedPath {
    pub fn nv(&self) -> usize {
        self.inserts.len()
    }

    /// The segment `[u_{i-1}, u_i]` for a 1-based index.
    pub fn segment(&self, i: usize) -> (Point, Point) {
        (self.base.points[i - 1], self.base.points[i])
    }
}

/// How the two steps on a coupled pair combined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingKind {
    /// Two triangles with a common apex: a four-valent vertex.
    Cycle,
    /// A triangle and a parallelogram; the pair dissolves.
    Trapezoid,
    /// Two parallelograms; the pair moves on.
    Shift,
    /// First half of an event whose second step has not happened yet.
    Open,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CouplingTag {
    /// 1-based index of the insert that created the pair.
    pub marked: usize,
    pub event: u32,
    pub kind: CouplingKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Cell {
    /// Counterclockwise vertices.
    Triangle { vertices: [Point; 3], tag: Option<CouplingTag> },
    /// Counterclockwise vertices.
    Parallelogram { vertices: [Point; 4], tag: Option<CouplingTag> },
    /// `conv(u_{i-1}, u'_i, u_i)`, possibly flat.
    Marked { index: usize, vertices: [Point; 3], side: Side },
    /// Unmarked path segment `[u_{j-1}, u_j]`.
    Segment { index: usize, ends: [Point; 2] },
}

impl Cell {
    /// Lattice area (twice the Euclidean area).
    pub fn area(&self) -> i64 {
        match self {
            Cell::Triangle { vertices: v, .. } | Cell::Marked { vertices: v, .. } => {
                orient(v[0], v[1], v[2]).abs()
            }
            Cell::Parallelogram { vertices: v, .. } => 2 * orient(v[0], v[1], v[2]).abs(),
            Cell::Segment { .. } => 0,
        }
    }

    pub fn tag(&self) -> Option<CouplingTag> {
        match self {
            Cell::Triangle { tag, .. } | Cell::Parallelogram { tag, .. } => *tag,
            _ => None,
        }
    }

    fn set_tag_kind(&mut self, kind: CouplingKind) {
        match self {
            Cell::Triangle { tag: Some(t), .. } | Cell::Parallelogram { tag: Some(t), .. } => {
                t.kind = kind
            }
            _ => {}
        }
    }

    pub fn points(&self) -> Vec<Point> {
        match self {
            Cell::Triangle { vertices, .. } | Cell::Marked { vertices, .. } => vertices.to_vec(),
            Cell::Parallelogram { vertices, .. } => vertices.to_vec(),
            Cell::Segment { ends, .. } => ends.to_vec(),
        }
    }
}

fn ccw_triangle(a: Point, b: Point, c: Point) -> [Point; 3] {
    if orient(a, b, c) > 0 {
        [a, b, c]
    } else {
        [a, c, b]
    }
}

/// Parallelogram on `a, b, c` with fourth vertex `a + c - b`.
fn ccw_parallelogram(a: Point, b: Point, c: Point) -> [Point; 4] {
    let d = a + c - b;
    if orient(a, b, c) > 0 {
        [a, b, c, d]
    } else {
        [a, d, c, b]
    }
}

/// All strictly increasing chains of `n` steps from the minimum to the maximum.
pub fn enumerate_paths(order: &DirectionOrder, n: usize) -> Vec<LatticePath> {
    let pts = order.points();
    let inner = &pts[1..pts.len() - 1];
    let mut out = Vec::new();
    if n == 0 || n - 1 > inner.len() {
        return out;
    }
    let mut chosen: Vec<usize> = Vec::with_capacity(n - 1);
    fn rec(
        inner: &[Point],
        k: usize,
        start: usize,
        chosen: &mut Vec<usize>,
        ends: (Point, Point),
        out: &mut Vec<LatticePath>,
    ) {
        if chosen.len() == k {
            let mut points = vec![ends.0];
            points.extend(chosen.iter().map(|&i| inner[i]));
            points.push(ends.1);
            out.push(LatticePath { points });
            return;
        }
        let need = k - chosen.len();
        for i in start..=inner.len() - need {
            chosen.push(i);
            rec(inner, k, i + 1, chosen, ends, out);
            chosen.pop();
        }
    }
    rec(inner, n - 1, 0, &mut chosen, (order.min(), order.max()), &mut out);
    out
}

/// Candidate marked points for the gap `[a, b]` with their admissible sides.
pub fn gap_candidates(order: &DirectionOrder, a: Point, b: Point) -> Vec<Insert> {
    let mut out = Vec::new();
    for &u in order.points() {
        if !(order.less(a, u) && order.less(u, b)) {
            continue;
        }
        match orient(a, b, u).signum() {
            1 => out.push(Insert { point: u, side: Side::Plus, degenerate: false }),
            -1 => out.push(Insert { point: u, side: Side::Minus, degenerate: false }),
            _ => {
                out.push(Insert { point: u, side: Side::Plus, degenerate: true });
                out.push(Insert { point: u, side: Side::Minus, degenerate: true });
            }
        }
    }
    out
}

pub fn enumerate_enhancements(g: &LatticePath, nv: usize, order: &DirectionOrder) -> Vec<EnhancedPath> {
    let mut out = vec![EnhancedPath { base: g.clone(), inserts: Vec::new() }];
    for i in 1..=nv.min(g.len()) {
        let cands = gap_candidates(order, g.points[i - 1], g.points[i]);
        let mut next = Vec::with_capacity(out.len() * cands.len());
        for e in &out {
            for c in &cands {
                let mut e2 = e.clone();
                e2.inserts.push(c.clone());
                next.push(e2);
            }
        }
        out = next;
    }
    if nv > g.len() {
        out.clear();
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Pair {
    marked: usize,
    side: Side,
    middle: Point,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Pending {
    pair: Pair,
    first_cell: usize,
    first_triangle: bool,
    /// Point that replaced the vertex of the first step, if it was a parallelogram.
    moved: Option<Point>,
    event: u32,
}

/// A node of the completion search.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SubdivisionState {
    pub cells: Vec<Cell>,
    pub plus: Vec<Point>,
    pub minus: Vec<Point>,
    /// Covered lattice area.
    pub area: i64,
    #[serde(skip)]
    pairs: Vec<Pair>,
    #[serde(skip)]
    pending: Option<Pending>,
    #[serde(skip)]
    events: u32,
}

pub fn initial_subdivision(gh: &EnhancedPath) -> SubdivisionState {
    let pts = &gh.base.points;
    let mut cells = Vec::new();
    let mut plus = vec![pts[0]];
    let mut minus = vec![pts[0]];
    let mut pairs = Vec::new();
    let mut area = 0;
    for i in 1..pts.len() {
        let (a, b) = (pts[i - 1], pts[i]);
        if let Some(ins) = gh.inserts.get(i - 1) {
            let cell = Cell::Marked { index: i, vertices: [a, ins.point, b], side: ins.side };
            area += cell.area();
            cells.push(cell);
            match ins.side {
                Side::Plus => plus.push(ins.point),
                Side::Minus => minus.push(ins.point),
            }
            if ins.degenerate {
                pairs.push(Pair { marked: i, side: ins.side, middle: ins.point });
            }
        } else {
            cells.push(Cell::Segment { index: i, ends: [a, b] });
        }
        plus.push(b);
        minus.push(b);
    }
    SubdivisionState { cells, plus, minus, area, pairs, pending: None, events: 0 }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum StepKind {
    Triangle,
    Parallelogram,
}

impl SubdivisionState {
    fn path(&self, side: Side) -> &Vec<Point> {
        match side {
            Side::Plus => &self.plus,
            Side::Minus => &self.minus,
        }
    }

    fn path_mut(&mut self, side: Side) -> &mut Vec<Point> {
        match side {
            Side::Plus => &mut self.plus,
            Side::Minus => &mut self.minus,
        }
    }

    /// The vertex `k` bulges away from the uncovered region of `side`.
    fn is_step_vertex(&self, side: Side, k: usize) -> bool {
        let p = self.path(side);
        side.sign() * orient(p[k - 1], p[k], p[k + 1]) > 0
    }

    fn first_step(&self, side: Side) -> Option<usize> {
        let n = self.path(side).len();
        (1..n.saturating_sub(1)).find(|&k| self.is_step_vertex(side, k))
    }

    pub fn is_terminal(&self) -> bool {
        self.pending.is_none() && self.first_step(Side::Plus).is_none() && self.first_step(Side::Minus).is_none()
    }

    /// Applies one step at vertex `k`, returning the index of the new cell
    /// and the replacement point for a parallelogram step.
    fn apply(
        &mut self,
        side: Side,
        k: usize,
        kind: StepKind,
        tag: Option<CouplingTag>,
    ) -> (usize, Option<Point>) {
        let p = self.path(side);
        let (a, b, c) = (p[k - 1], p[k], p[k + 1]);
        let (cell, moved) = match kind {
            StepKind::Triangle => (Cell::Triangle { vertices: ccw_triangle(a, b, c), tag }, None),
            StepKind::Parallelogram => {
                (Cell::Parallelogram { vertices: ccw_parallelogram(a, b, c), tag }, Some(a + c - b))
            }
        };
        self.area += cell.area();
        self.cells.push(cell);
        let path = self.path_mut(side);
        match moved {
            None => {
                path.remove(k);
            }
            Some(q) => path[k] = q,
        }
        (self.cells.len() - 1, moved)
    }

    fn step_kinds(&self, side: Side, k: usize, poly: &NewtonPolygon) -> Vec<StepKind> {
        let p = self.path(side);
        let mut out = vec![StepKind::Triangle];
        if poly.contains(p[k - 1] + p[k + 1] - p[k]) {
            out.push(StepKind::Parallelogram);
        }
        out
    }

    fn forced_children(&self, pending: &Pending, poly: &NewtonPolygon) -> Vec<SubdivisionState> {
        let side = pending.pair.side;
        let k = self
            .path(side)
            .iter()
            .position(|&q| q == pending.pair.middle)
            .expect("pair middle stays on its path");
        debug_assert!(self.is_step_vertex(side, k));
        let mut out = Vec::new();
        for kind in self.step_kinds(side, k, poly) {
            let mut s = self.clone();
            s.pending = None;
            let second_triangle = kind == StepKind::Triangle;
            let outcome = match (pending.first_triangle, second_triangle) {
                (true, true) => CouplingKind::Cycle,
                (false, false) => CouplingKind::Shift,
                _ => CouplingKind::Trapezoid,
            };
            let tag = CouplingTag { marked: pending.pair.marked, event: pending.event, kind: outcome };
            s.apply(side, k, kind, Some(tag));
            s.cells[pending.first_cell].set_tag_kind(outcome);
            if outcome == CouplingKind::Shift {
                s.pairs.push(Pair { middle: pending.moved.expect("parallelogram moved"), ..pending.pair.clone() });
            }
            out.push(s);
        }
        out
    }

    /// Children of this node in the completion search; empty iff terminal.
    pub fn extension_choices(&self, poly: &NewtonPolygon) -> Vec<SubdivisionState> {
        if let Some(p) = &self.pending {
            return self.forced_children(p, poly);
        }
        let (side, k) = match self.first_step(Side::Plus) {
            Some(k) => (Side::Plus, k),
            None => match self.first_step(Side::Minus) {
                Some(k) => (Side::Minus, k),
                None => return Vec::new(),
            },
        };
        let path = self.path(side);
        let touches = |pair: &Pair| {
            pair.side == side && (path[k + 1] == pair.middle || path[k - 1] == pair.middle)
        };
        let hit: Vec<usize> = (0..self.pairs.len()).filter(|&j| touches(&self.pairs[j])).collect();
        let mut out = Vec::new();
        for kind in self.step_kinds(side, k, poly) {
            let mut s = self.clone();
            match hit.first() {
                None => {
                    s.apply(side, k, kind, None);
                }
                Some(&j) => {
                    let pair = s.pairs[j].clone();
                    // a vertex shared by two pairs dissolves the second one
                    s.pairs.retain(|q| !touches(q));
                    let event = s.events;
                    s.events += 1;
                    let tag = CouplingTag { marked: pair.marked, event, kind: CouplingKind::Open };
                    let (first_cell, moved) = s.apply(side, k, kind, Some(tag));
                    s.pending = Some(Pending {
                        pair,
                        first_cell,
                        first_triangle: kind == StepKind::Triangle,
                        moved,
                        event,
                    });
                }
            }
            out.push(s);
        }
        out
    }
}

/// Search statistics.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub terminals: u64,
}

/// Depth-first enumeration of the terminal states reachable from the
/// initial subdivision of `gh`. `budget` bounds the number of search nodes.
pub fn for_each_terminal<F: FnMut(SubdivisionState) -> Result<()>>(
    gh: &EnhancedPath,
    poly: &NewtonPolygon,
    budget: Option<u64>,
    mut visit: F,
) -> Result<SearchStats> {
    let mut stats = SearchStats::default();
    let mut stack = vec![initial_subdivision(gh)];
    while let Some(s) = stack.pop() {
        stats.nodes += 1;
        if let Some(b) = budget {
            if stats.nodes > b {
                return Err(Error::BudgetExceeded(b));
            }
        }
        let children = s.extension_choices(poly);
        if children.is_empty() {
            stats.terminals += 1;
            visit(s)?;
        } else {
            debug_assert!(children.iter().all(|c| c.area > s.area));
            stack.extend(children.into_iter().rev());
        }
    }
    Ok(stats)
}

pub fn complete_subdivisions(gh: &EnhancedPath, poly: &NewtonPolygon) -> Vec<SubdivisionState> {
    let mut out = Vec::new();
    for_each_terminal(gh, poly, None, |s| {
        out.push(s);
        Ok(())
    })
    .expect("no budget");
    out
}

/// Counterclockwise boundary sides of the covered region.
pub fn boundary_sides(s: &SubdivisionState) -> Vec<(Point, Point)> {
    let mut out: Vec<(Point, Point)> = s.minus.windows(2).map(|w| (w[0], w[1])).collect();
    out.extend(s.plus.windows(2).rev().map(|w| (w[1], w[0])));
    out
}

pub fn check_admissible(s: &SubdivisionState, poly: &NewtonPolygon, d: &crate::lattice::Degree) -> bool {
    if s.area != poly.lattice_area() {
        return false;
    }
    let sides = boundary_sides(s);
    if !sides.iter().all(|&(a, b)| poly.segment_on_boundary(a, b)) {
        return false;
    }
    let vecs: Vec<Point> = sides.iter().map(|&(a, b)| (b - a).rot_cw()).collect();
    d.matches(&vecs)
}

const SVG_SCALE: i64 = 60;
const SVG_PAD: i64 = 20;

fn svg_size(poly: &NewtonPolygon) -> (i64, i64) {
    let hx = poly.lattice_points().iter().map(|p| p.x).max().unwrap_or(0);
    let hy = poly.lattice_points().iter().map(|p| p.y).max().unwrap_or(0);
    (hx * SVG_SCALE + 2 * SVG_PAD, hy * SVG_SCALE + 2 * SVG_PAD)
}

fn svg_body(out: &mut String, poly: &NewtonPolygon, cells: &[Cell]) {
    let hy = poly.lattice_points().iter().map(|p| p.y).max().unwrap_or(0);
    let tx = |p: Point| (p.x * SVG_SCALE + SVG_PAD, (hy - p.y) * SVG_SCALE + SVG_PAD);
    let poly_attr = |pts: &[Point]| {
        pts.iter()
            .map(|&p| {
                let (x, y) = tx(p);
                format!("{x},{y}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    };
    let _ = writeln!(
        out,
        r#"<polygon points="{}" fill="none" stroke="black" stroke-width="2"/>"#,
        poly_attr(poly.vertices())
    );
    for c in cells {
        let (fill, pts) = match c {
            Cell::Triangle { vertices, tag } => (if tag.is_some() { "#f4c7a1" } else { "#c9dcf0" }, vertices.to_vec()),
            Cell::Parallelogram { vertices, tag } => {
                (if tag.is_some() { "#f0e09c" } else { "#d5ecc2" }, vertices.to_vec())
            }
            Cell::Marked { vertices, .. } => ("#e7b3d6", vertices.to_vec()),
            Cell::Segment { ends, .. } => ("none", ends.to_vec()),
        };
        let _ = writeln!(
            out,
            r##"<polygon points="{}" fill="{fill}" stroke="#333" stroke-width="1"/>"##,
            poly_attr(&pts)
        );
    }
    for p in poly.lattice_points() {
        let (x, y) = tx(*p);
        let _ = writeln!(out, r#"<circle cx="{x}" cy="{y}" r="3" fill="black"/>"#);
    }
}

/// Static SVG picture of the polygon with the given cells.
pub fn render_cells_svg(poly: &NewtonPolygon, cells: &[Cell]) -> String {
    let (w, h) = svg_size(poly);
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">"#);
    svg_body(&mut out, poly, cells);
    out.push_str("</svg>\n");
    out
}

pub fn render_svg(poly: &NewtonPolygon, s: &SubdivisionState) -> String {
    render_cells_svg(poly, &s.cells)
}

/// Several subdivisions of the same polygon side by side, `columns` per row.
pub fn render_gallery_svg(poly: &NewtonPolygon, subdivisions: &[&[Cell]], columns: usize) -> String {
    let (w, h) = svg_size(poly);
    let columns = columns.max(1);
    let rows = subdivisions.len().div_ceil(columns).max(1);
    let cols = columns.min(subdivisions.len()).max(1);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}">"#,
        w * cols as i64,
        h * rows as i64
    );
    for (i, cells) in subdivisions.iter().enumerate() {
        let (x, y) = ((i % columns) as i64 * w, (i / columns) as i64 * h);
        let _ = writeln!(out, r#"<g transform="translate({x},{y})">"#);
        svg_body(&mut out, poly, cells);
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}
