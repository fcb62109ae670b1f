//! Marked tropical curves dual to final subdivisions.
//!
//! Every cell side is registered as a directed segment with the cell on its
//! left. The neighbour across a side is whatever registered the reversed
//! segment; an edge of the curve is traced from a vertex cell through any
//! number of parallelograms until it reaches another vertex cell or the
//! boundary of the polygon.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{NewtonPolygon, Point};
use crate::pathsub::{Cell, CouplingKind, Side};
use crate::qweights::FragmentParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NodeKind {
    Trivalent { mu: i64 },
    /// Two triangles glued across a collinear marked vertex.
    FourValent { mu: i64, marked: usize },
    Marked { index: usize, mu: i64 },
    EdgeMark { index: usize },
    End,
}

impl NodeKind {
    pub fn valence(self) -> usize {
        match self {
            NodeKind::Trivalent { .. } | NodeKind::Marked { .. } => 3,
            NodeKind::FourValent { .. } => 4,
            NodeKind::EdgeMark { .. } => 2,
            NodeKind::End => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub ends: [usize; 2],
    pub weight: i64,
    /// Dual segment as seen from `ends[0]`, oriented with that cell on its left.
    pub dual: [Point; 2],
}

impl Edge {
    pub fn other(&self, n: usize) -> usize {
        if self.ends[0] == n {
            self.ends[1]
        } else {
            self.ends[0]
        }
    }

    /// Primitive direction times weight, pointing away from `ends[0]`.
    pub fn vector(&self) -> Point {
        (self.dual[1] - self.dual[0]).rot_cw()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MarkedTropicalCurve {
    pub nodes: Vec<NodeKind>,
    pub edges: Vec<Edge>,
}

impl MarkedTropicalCurve {
    pub fn incident(&self, n: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e].ends.contains(&n)).collect()
    }

    pub fn is_end(&self, e: usize) -> bool {
        let [a, b] = self.edges[e].ends;
        self.nodes[a] == NodeKind::End || self.nodes[b] == NodeKind::End
    }

    pub fn components(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.nodes.len()).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e.ends[0]), find(&mut parent, e.ends[1]));
            parent[a] = b;
        }
        (0..self.nodes.len()).filter(|&x| find(&mut parent, x) == x).count()
    }

    /// First Betti number via Euler characteristic.
    pub fn genus(&self) -> i64 {
        self.edges.len() as i64 - self.nodes.len() as i64 + self.components() as i64
    }

    /// First Betti number via a spanning forest: edges outside the forest.
    pub fn cycle_rank(&self) -> i64 {
        let mut seen = vec![false; self.nodes.len()];
        let mut tree_edges = 0;
        for start in 0..self.nodes.len() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            while let Some(n) = stack.pop() {
                for e in self.incident(n) {
                    let o = self.edges[e].other(n);
                    if !seen[o] {
                        seen[o] = true;
                        tree_edges += 1;
                        stack.push(o);
                    }
                }
            }
        }
        self.edges.len() as i64 - tree_edges
    }

    pub fn end_vectors(&self) -> Vec<Point> {
        let mut out = Vec::new();
        for e in &self.edges {
            if self.nodes[e.ends[1]] == NodeKind::End {
                out.push(e.vector());
            } else if self.nodes[e.ends[0]] == NodeKind::End {
                out.push(-e.vector());
            }
        }
        out
    }

    /// Sum of outgoing edge vectors at a node.
    pub fn balance(&self, n: usize) -> Point {
        let mut s = Point::default();
        for e in self.incident(n) {
            let v = self.edges[e].vector();
            let [a, b] = self.edges[e].ends;
            if a == n {
                s = s + v;
            }
            if b == n {
                s = s - v;
            }
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Elem {
    Node(usize),
    Para(usize),
}

/// Registration of one directed side: owning element and, for
/// parallelograms, the side index.
#[derive(Clone, Copy, Debug)]
struct Reg {
    elem: Elem,
    side: usize,
}

fn sides_of(v: &[Point]) -> Vec<(Point, Point)> {
    (0..v.len()).map(|i| (v[i], v[(i + 1) % v.len()])).collect()
}

/// Builds the dual curve of a complete subdivision.
pub fn reconstruct(cells: &[Cell], poly: &NewtonPolygon) -> Result<MarkedTropicalCurve> {
    let mut nodes: Vec<NodeKind> = Vec::new();
    let mut regs: HashMap<(Point, Point), Reg> = HashMap::new();
    // faces of flat elements, keyed by the side with the element on its left
    let mut flat: HashMap<(Point, Point), usize> = HashMap::new();
    let mut node_sides: Vec<Vec<(Point, Point)>> = Vec::new();
    let mut paras: Vec<[Point; 4]> = Vec::new();
    let mut cycle_nodes: BTreeMap<(usize, u32), usize> = BTreeMap::new();
    // shared side of two glued triangles: no edge
    let mut internal: BTreeSet<(Point, Point)> = BTreeSet::new();

    let register_flat = |flat: &mut HashMap<(Point, Point), usize>, s: (Point, Point), id: usize| -> Result<()> {
        if flat.insert(s, id).is_some() {
            return Err(Error::InconsistentDual(format!("flat side {:?}->{:?} registered twice", s.0, s.1)));
        }
        Ok(())
    };
    let register = |regs: &mut HashMap<(Point, Point), Reg>, s: (Point, Point), r: Reg| -> Result<()> {
        if regs.insert(s, r).is_some() {
            return Err(Error::InconsistentDual(format!("side {:?}->{:?} registered twice", s.0, s.1)));
        }
        Ok(())
    };

    for cell in cells {
        match cell {
            Cell::Triangle { vertices, tag } => {
                let glued = tag.filter(|t| t.kind == CouplingKind::Cycle);
                let id = match glued {
                    Some(t) => match cycle_nodes.get(&(t.marked, t.event)) {
                        Some(&id) => {
                            if let NodeKind::FourValent { mu, .. } = &mut nodes[id] {
                                *mu += cell.area();
                            }
                            id
                        }
                        None => {
                            nodes.push(NodeKind::FourValent { mu: cell.area(), marked: t.marked });
                            node_sides.push(Vec::new());
                            cycle_nodes.insert((t.marked, t.event), nodes.len() - 1);
                            nodes.len() - 1
                        }
                    },
                    None => {
                        nodes.push(NodeKind::Trivalent { mu: cell.area() });
                        node_sides.push(Vec::new());
                        nodes.len() - 1
                    }
                };
                for s in sides_of(vertices) {
                    if glued.is_some() && regs.get(&(s.1, s.0)).is_some_and(|r| r.elem == Elem::Node(id)) {
                        internal.insert(s);
                        internal.insert((s.1, s.0));
                    }
                    register(&mut regs, s, Reg { elem: Elem::Node(id), side: 0 })?;
                    node_sides[id].push(s);
                }
            }
            Cell::Parallelogram { vertices, .. } => {
                paras.push(*vertices);
                let pid = paras.len() - 1;
                for (k, s) in sides_of(vertices).into_iter().enumerate() {
                    register(&mut regs, s, Reg { elem: Elem::Para(pid), side: k })?;
                }
            }
            Cell::Marked { index, vertices, side } => {
                let [a, m, b] = *vertices;
                let mu = cell.area();
                nodes.push(NodeKind::Marked { index: *index, mu });
                let id = nodes.len() - 1;
                let sides = if mu > 0 {
                    let [p, q, r] = if crate::lattice::orient(a, m, b) > 0 { [a, m, b] } else { [a, b, m] };
                    let sides = vec![(p, q), (q, r), (r, p)];
                    for s in &sides {
                        register(&mut regs, *s, Reg { elem: Elem::Node(id), side: 0 })?;
                    }
                    sides
                } else {
                    let sides = match side {
                        Side::Plus => vec![(m, a), (b, m), (a, b)],
                        Side::Minus => vec![(a, m), (m, b), (b, a)],
                    };
                    for s in &sides {
                        register_flat(&mut flat, *s, id)?;
                    }
                    sides
                };
                node_sides.push(sides);
            }
            Cell::Segment { index, ends: [a, b] } => {
                nodes.push(NodeKind::EdgeMark { index: *index });
                let id = nodes.len() - 1;
                let sides = vec![(*a, *b), (*b, *a)];
                for s in &sides {
                    register_flat(&mut flat, *s, id)?;
                }
                node_sides.push(sides);
            }
        }
    }

    let mut edges = Vec::new();
    // (flat face?, directed side) pairs already consumed by an edge
    let mut used: BTreeSet<(bool, Point, Point)> = BTreeSet::new();
    let n_cells = nodes.len();
    for id in 0..n_cells {
        let is_flat = node_sides[id].iter().all(|s| flat.get(s) == Some(&id));
        for &s in &node_sides[id] {
            if used.contains(&(is_flat, s.0, s.1)) || internal.contains(&s) {
                continue;
            }
            used.insert((is_flat, s.0, s.1));
            let weight = (s.1 - s.0).lattice_length();
            let mut cur = s;
            let mut from_flat = is_flat;
            let target = loop {
                let back = (cur.1, cur.0);
                if !from_flat {
                    if let Some(&other) = flat.get(&back) {
                        used.insert((true, back.0, back.1));
                        break other;
                    }
                }
                from_flat = false;
                match regs.get(&back) {
                    None => {
                        if !poly.segment_on_boundary(cur.0, cur.1) {
                            return Err(Error::InconsistentDual(format!(
                                "open side {:?}->{:?} inside the polygon",
                                cur.0, cur.1
                            )));
                        }
                        nodes.push(NodeKind::End);
                        break nodes.len() - 1;
                    }
                    Some(Reg { elem: Elem::Node(other), .. }) => {
                        used.insert((false, back.0, back.1));
                        break *other;
                    }
                    Some(Reg { elem: Elem::Para(p), side }) => {
                        let opp = sides_of(&paras[*p])[(side + 2) % 4];
                        if (opp.1 - opp.0).lattice_length() != weight {
                            return Err(Error::InconsistentDual("parallelogram sides differ".into()));
                        }
                        cur = opp;
                    }
                }
            };
            edges.push(Edge { ends: [id, target], weight, dual: [s.0, s.1] });
        }
    }
    let curve = MarkedTropicalCurve { nodes, edges };
    for n in 0..curve.nodes.len() {
        let deg = curve.incident(n).len();
        if deg != curve.nodes[n].valence() {
            return Err(Error::InconsistentDual(format!(
                "node {n} ({:?}) has {deg} edges",
                curve.nodes[n]
            )));
        }
    }
    Ok(curve)
}

/// Parameters of a collinear cycle, read on the curve.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleFragment {
    pub marked: usize,
    pub marked_node: usize,
    pub four_valent: usize,
    /// Far end of the edge leaving the marked vertex away from the cycle.
    pub opposite: usize,
    pub opposite_edge: usize,
    pub params: FragmentParams,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurveClass {
    pub genus: i64,
    pub irreducible: bool,
    pub cycle: Option<CycleFragment>,
    pub aut_r: u32,
}

fn ratio(a: i64, b: i64) -> Ratio<i64> {
    Ratio::new(a, b)
}

pub fn find_cycle(c: &MarkedTropicalCurve) -> Option<CycleFragment> {
    let fv = c.nodes.iter().position(|n| matches!(n, NodeKind::FourValent { .. }))?;
    let NodeKind::FourValent { mu, marked } = c.nodes[fv] else { unreachable!() };
    let mv = c
        .nodes
        .iter()
        .position(|n| matches!(n, NodeKind::Marked { index, .. } if *index == marked))?;
    let inc = c.incident(mv);
    let opp: Vec<usize> = inc.iter().copied().filter(|&e| c.edges[e].other(mv) != fv).collect();
    if opp.len() != 1 {
        return None;
    }
    let oe = opp[0];
    let m = c.edges[oe].weight;
    let far = c.edges[oe].other(mv);
    let nu1 = ratio(mu, m);
    let params = match c.nodes[far] {
        NodeKind::End => FragmentParams::unbounded(m as u32, nu1),
        NodeKind::Trivalent { mu: mu2 } | NodeKind::FourValent { mu: mu2, .. } | NodeKind::Marked { mu: mu2, .. } => {
            FragmentParams::bounded(m as u32, nu1, ratio(mu2, m))
        }
        NodeKind::EdgeMark { .. } => return None,
    };
    Some(CycleFragment { marked, marked_node: mv, four_valent: fv, opposite: far, opposite_edge: oe, params })
}

/// Collinear marked vertices carrying two ends of equal weight.
pub fn symmetric_collinear_vertices(c: &MarkedTropicalCurve, skip: Option<usize>) -> Vec<usize> {
    (0..c.nodes.len())
        .filter(|&n| Some(n) != skip)
        .filter(|&n| matches!(c.nodes[n], NodeKind::Marked { mu: 0, .. }))
        .filter(|&n| {
            let ends: Vec<i64> =
                c.incident(n).into_iter().filter(|&e| c.is_end(e)).map(|e| c.edges[e].weight).collect();
            ends.len() >= 2 && ends.iter().enumerate().any(|(i, w)| ends[i + 1..].contains(w))
        })
        .collect()
}

pub fn classify(c: &MarkedTropicalCurve) -> CurveClass {
    let genus = c.genus();
    let irreducible = c.components() == 1;
    let cycle = find_cycle(c);
    let aut_r = symmetric_collinear_vertices(c, cycle.as_ref().map(|f| f.marked_node)).len() as u32;
    CurveClass { genus, irreducible, cycle, aut_r }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BroccoliWitness {
    MarkedVertex { node: usize },
    Component { nodes: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BroccoliStatus {
    pub is_broccoli: bool,
    pub witness: Option<BroccoliWitness>,
}

/// Checks the two conditions on the even-weight subgraph. In the cycle case
/// the curve is read with the cycle collapsed to the edge through the marked
/// point, and that edge is ignored when it is even and bounded.
pub fn broccoli_status(c: &MarkedTropicalCurve, class: &CurveClass) -> BroccoliStatus {
    // collapsed graph: edge list with node roles
    let mut edges: Vec<([usize; 2], i64)> = c.edges.iter().map(|e| (e.ends, e.weight)).collect();
    let mut marked_vertex: Vec<bool> =
        c.nodes.iter().map(|n| matches!(n, NodeKind::Marked { .. })).collect();
    let mut edge_marked: Vec<bool> = c.nodes.iter().map(|n| matches!(n, NodeKind::EdgeMark { .. })).collect();
    let mut skip_edges: BTreeSet<usize> = BTreeSet::new();
    if let Some(f) = &class.cycle {
        // drop the two cycle edges, the marked vertex becomes a point on the
        // edge of weight m: model it as an edge mark between the four-valent
        // vertex and the far end
        let mut kept = Vec::new();
        for (i, (ends, w)) in edges.iter().enumerate() {
            let touches_mv = ends.contains(&f.marked_node);
            let touches_fv = ends.contains(&f.four_valent);
            if touches_mv && touches_fv {
                continue;
            }
            kept.push((i, *ends, *w));
        }
        let m = f.params.m as i64;
        edges = kept.iter().map(|(_, e, w)| (*e, *w)).collect();
        edges.push(([f.four_valent, f.marked_node], m));
        marked_vertex[f.marked_node] = false;
        edge_marked[f.marked_node] = true;
        if m % 2 == 0 && c.nodes[f.opposite] != NodeKind::End {
            let n = edges.len();
            // both halves of the edge through the marked point
            skip_edges.insert(n - 1);
            if let Some(j) = edges.iter().position(|(e, _)| *e == c.edges[f.opposite_edge].ends) {
                skip_edges.insert(j);
            }
        }
    }
    let even: Vec<usize> =
        (0..edges.len()).filter(|&i| edges[i].1 % 2 == 0 && !skip_edges.contains(&i)).collect();
    for (n, is_mv) in marked_vertex.iter().enumerate() {
        if *is_mv {
            let k = even.iter().filter(|&&i| edges[i].0.contains(&n)).count();
            if k > 1 {
                return BroccoliStatus {
                    is_broccoli: false,
                    witness: Some(BroccoliWitness::MarkedVertex { node: n }),
                };
            }
        }
    }
    // components of the even subgraph
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &i in &even {
        let [a, b] = edges[i].0;
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    for &start in adj.keys() {
        if seen.contains(&start) {
            continue;
        }
        let mut comp = vec![start];
        seen.insert(start);
        let mut k = 0;
        while k < comp.len() {
            for &o in &adj[&comp[k]] {
                if seen.insert(o) {
                    comp.push(o);
                }
            }
            k += 1;
        }
        let bad = comp
            .iter()
            .filter(|&&n| adj[&n].len() == 1)
            .filter(|&&n| c.nodes[n] != NodeKind::End && !marked_vertex[n] && !edge_marked[n])
            .count();
        if bad > 1 {
            comp.sort_unstable();
            return BroccoliStatus { is_broccoli: false, witness: Some(BroccoliWitness::Component { nodes: comp }) };
        }
    }
    BroccoliStatus { is_broccoli: true, witness: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{pt, Degree};
    use crate::pathsub::Cell;

    #[test]
    fn unit_triangle_curve() {
        let p = NewtonPolygon::from_degree(&Degree::plane(1)).unwrap();
        let cells = vec![
            Cell::Segment { index: 1, ends: [pt(0, 0), pt(1, 0)] },
            Cell::Segment { index: 2, ends: [pt(1, 0), pt(0, 1)] },
            Cell::Triangle { vertices: [pt(0, 0), pt(1, 0), pt(0, 1)], tag: None },
        ];
        let c = reconstruct(&cells, &p).unwrap();
        let class = classify(&c);
        assert_eq!(class.genus, 0);
        assert!(class.irreducible);
        assert!(class.cycle.is_none());
        assert!(Degree::plane(1).matches(&c.end_vectors()));
        for n in 0..c.nodes.len() {
            if c.nodes[n] != NodeKind::End {
                assert!(c.balance(n).is_zero());
            }
        }
        assert_eq!(c.genus(), c.cycle_rank());
        assert!(broccoli_status(&c, &class).is_broccoli);
    }

    #[test]
    fn disconnected_is_reducible() {
        let p = NewtonPolygon::from_degree(&Degree::plane(1)).unwrap();
        // two edge marks on the boundary, each just an edge between two ends
        let cells = vec![
            Cell::Segment { index: 1, ends: [pt(0, 0), pt(1, 0)] },
            Cell::Segment { index: 2, ends: [pt(1, 0), pt(0, 1)] },
        ];
        let c = reconstruct(&cells, &p).unwrap();
        assert!(!classify(&c).irreducible);
    }
}
