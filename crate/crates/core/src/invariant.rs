//! Curve weights and the refined invariant.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::{format_rational, laurent_to_y, LaurentY, Rational, RationalFunction};
use crate::lattice::{convex_hull, Degree, Direction, DirectionOrder, NewtonPolygon, Point};
use crate::pathsub::{self, Cell, CouplingTag, EnhancedPath, Side};
use crate::qweights::{bracket_minus, bracket_plus, bracket_star, fragment_weight};
use crate::tropcurve::{self, CurveClass, MarkedTropicalCurve, NodeKind};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantQuery {
    pub degree: Degree,
    pub genus: u8,
    pub nv: usize,
    pub ne: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Direction>,
}

impl InvariantQuery {
    pub fn new(degree: Degree, genus: u8, nv: usize, ne: usize) -> Self {
        Self { degree, genus, nv, ne, direction: None }
    }

    /// Fills in `ne` from the dimension count.
    pub fn with_nv(degree: Degree, genus: u8, nv: usize) -> Result<Self> {
        let n = degree.size() as i64 - 1 + genus as i64 - 2 * nv as i64;
        if n < 0 {
            return Err(Error::InvalidInput(format!("n_v = {nv} is too large for this degree")));
        }
        Ok(Self::new(degree, genus, nv, n as usize))
    }

    pub fn with_direction(mut self, d: Direction) -> Self {
        self.direction = Some(d);
        self
    }

    pub fn polygon(&self) -> Result<NewtonPolygon> {
        NewtonPolygon::from_degree(&self.degree)
    }

    pub fn validate(&self, poly: &NewtonPolygon) -> Result<()> {
        let size = self.degree.size();
        let expected = match self.genus {
            0 => size - 1,
            1 => size,
            g => return Err(Error::InvalidInput(format!("genus {g} is not supported"))),
        };
        if 2 * self.nv + self.ne != expected {
            return Err(Error::InvalidInput(format!(
                "2*n_v + n_e = {} but genus {} needs {expected}",
                2 * self.nv + self.ne,
                self.genus
            )));
        }
        if self.genus as usize > poly.interior_count() {
            return Err(Error::InvalidInput(format!(
                "genus {} exceeds the {} interior lattice points",
                self.genus,
                poly.interior_count()
            )));
        }
        if self.nv + self.ne == 0 {
            return Err(Error::InvalidInput("at least one marked point is needed".into()));
        }
        Ok(())
    }
}

/// Identifies a curve across leaves that differ only in how a collinear
/// marked vertex was split.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CurveKey {
    pub path: Vec<Point>,
    pub inserts: Vec<(usize, Option<Point>, Side)>,
    pub collapsed: Option<usize>,
    pub cells: Vec<(u8, Vec<Point>)>,
}

/// Strict convex hull vertices, sorted.
fn hull_vertices(pts: &[Point]) -> Vec<Point> {
    let mut h = convex_hull(pts);
    h.sort();
    h
}

/// Canonical cell list in which the coupled events selected by `merge` are
/// replaced by their unions and split points of collinear marked vertices
/// are forgotten. `collapse` removes one marked vertex entirely.
pub fn canonical_cells(
    cells: &[Cell],
    merge: impl Fn(&CouplingTag) -> bool,
    collapse: Option<usize>,
) -> Vec<(u8, Vec<Point>)> {
    let mut out = Vec::new();
    let mut groups: BTreeMap<(usize, u32), Vec<Point>> = BTreeMap::new();
    for c in cells {
        if let Some(t) = c.tag().filter(|t| merge(t)) {
            groups.entry((t.marked, t.event)).or_default().extend(c.points());
            continue;
        }
        match c {
            Cell::Triangle { vertices, .. } => out.push((0, sorted(vertices))),
            Cell::Parallelogram { vertices, .. } => out.push((1, sorted(vertices))),
            Cell::Marked { index, vertices, side } => {
                if collapse == Some(*index) {
                    continue;
                }
                if c.area() == 0 {
                    out.push((3 + (*side == Side::Minus) as u8, sorted(&[vertices[0], vertices[2]])));
                } else {
                    out.push((2, sorted(vertices)));
                }
            }
            Cell::Segment { ends, .. } => out.push((5, sorted(ends))),
        }
    }
    for (_, pts) in groups {
        let hull = hull_vertices(&pts);
        // a collapsed pair leaves an ordinary cell behind
        let code = match (collapse.is_some(), hull.len()) {
            (true, 3) => 0,
            (true, 4) => 1,
            _ => 6,
        };
        out.push((code, hull));
    }
    out.sort();
    out
}

fn sorted(v: &[Point]) -> Vec<Point> {
    let mut v = v.to_vec();
    v.sort();
    v
}

/// One terminal state of the search, with its dual curve.
#[derive(Clone, Debug, Serialize)]
pub struct Leaf {
    pub path: EnhancedPath,
    pub cells: Vec<Cell>,
    pub curve: MarkedTropicalCurve,
    pub class: CurveClass,
    #[serde(skip)]
    pub weight: RationalFunction,
    /// Number of flat marked cells, the exponent of the division by two.
    pub segments: u32,
    pub curve_key: CurveKey,
    /// False for a collapsed cycle curve already counted by another leaf.
    pub counted: bool,
}

fn bracket_product(c: &MarkedTropicalCurve, skip: &BTreeSet<usize>) -> Result<(RationalFunction, u32)> {
    let mut w = RationalFunction::one();
    let mut flat = 0;
    for (n, kind) in c.nodes.iter().enumerate() {
        if skip.contains(&n) {
            continue;
        }
        match *kind {
            NodeKind::Marked { mu, .. } => {
                if mu == 0 {
                    flat += 1;
                }
                w = &w * &bracket_plus(mu)?;
            }
            NodeKind::Trivalent { mu } => w = &w * &bracket_minus(mu)?,
            NodeKind::FourValent { .. } => {
                return Err(Error::InconsistentDual("four-valent vertex outside a fragment".into()))
            }
            NodeKind::EdgeMark { .. } => {}
            NodeKind::End => {
                let e = c.incident(n)[0];
                w = &w * &bracket_star(c.edges[e].weight)?;
            }
        }
    }
    Ok((w, flat))
}

/// Refined weight of a curve; in the cycle case this is the weight of the
/// rational curve obtained by collapsing the cycle.
pub fn curve_weight(c: &MarkedTropicalCurve, class: &CurveClass) -> Result<RationalFunction> {
    curve_weight_parts(c, class).map(|(w, _)| w)
}

fn curve_weight_parts(c: &MarkedTropicalCurve, class: &CurveClass) -> Result<(RationalFunction, u32)> {
    let (base, skip) = match &class.cycle {
        None => (RationalFunction::one(), BTreeSet::new()),
        Some(f) => {
            let mut skip = BTreeSet::from([f.four_valent, f.marked_node]);
            if c.nodes[f.opposite] != NodeKind::End {
                skip.insert(f.opposite);
                if let NodeKind::Marked { .. } = c.nodes[f.opposite] {
                    // a marked far vertex keeps its own factor
                    skip.remove(&f.opposite);
                }
            }
            (fragment_weight(&f.params)?, skip)
        }
    };
    let (prod, flat) = bracket_product(c, &skip)?;
    let two_r = Rational::from_integer(num_bigint::BigInt::one() << flat);
    Ok(((&base * &prod).scale(&two_r.recip()), flat))
}

fn leaf_key(gh: &EnhancedPath, cells: &[Cell], class: &CurveClass) -> CurveKey {
    let path = gh.base.points.clone();
    match &class.cycle {
        Some(f) => {
            let i = f.marked;
            let inserts = gh
                .inserts
                .iter()
                .enumerate()
                .filter(|(j, _)| j + 1 != i)
                .map(|(j, ins)| (j + 1, (!ins.degenerate).then_some(ins.point), ins.side))
                .collect();
            // only the events of the collapsed pair merge; other pairs keep
            // their own split points through their open events
            let cells = canonical_cells(cells, |t| t.marked == i, Some(i));
            CurveKey { path, inserts, collapsed: Some(i), cells }
        }
        None => {
            let inserts = gh
                .inserts
                .iter()
                .enumerate()
                .map(|(j, ins)| (j + 1, (!ins.degenerate).then_some(ins.point), ins.side))
                .collect();
            CurveKey { path, inserts, collapsed: None, cells: canonical_cells(cells, |_| true, None) }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LeafStats {
    pub leaves: u64,
    pub skipped_reducible: u64,
    pub skipped_inadmissible: u64,
    pub skipped_genus: u64,
    pub duplicates: u64,
    pub nodes: u64,
}

impl LeafStats {
    fn add(&mut self, o: &LeafStats) {
        self.leaves += o.leaves;
        self.skipped_reducible += o.skipped_reducible;
        self.skipped_inadmissible += o.skipped_inadmissible;
        self.skipped_genus += o.skipped_genus;
        self.duplicates += o.duplicates;
        self.nodes += o.nodes;
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Maximum number of search nodes per enhanced path.
    pub budget: Option<u64>,
}

/// Turns a complete subdivision into a leaf, or `None` with the reason
/// recorded in `stats`.
pub fn make_leaf(
    q: &InvariantQuery,
    poly: &NewtonPolygon,
    gh: &EnhancedPath,
    cells: Vec<Cell>,
    stats: &mut LeafStats,
) -> Result<Option<Leaf>> {
    let curve = tropcurve::reconstruct(&cells, poly)?;
    if !q.degree.matches(&curve.end_vectors()) {
        stats.skipped_inadmissible += 1;
        return Ok(None);
    }
    let class = tropcurve::classify(&curve);
    if !class.irreducible {
        stats.skipped_reducible += 1;
        return Ok(None);
    }
    if class.genus != q.genus as i64 {
        stats.skipped_genus += 1;
        return Ok(None);
    }
    let (weight, segments) = curve_weight_parts(&curve, &class)?;
    let curve_key = leaf_key(gh, &cells, &class);
    Ok(Some(Leaf { path: gh.clone(), cells, curve, class, weight, segments, curve_key, counted: true }))
}

/// Collapsed cycle curves are counted once per lattice path. `leaves` must
/// all come from the same path; returns the number of leaves switched off.
pub fn mark_duplicate_cycle_curves(leaves: &mut [Leaf]) -> u64 {
    let mut seen = BTreeSet::new();
    let mut dups = 0;
    for leaf in leaves.iter_mut() {
        if leaf.class.cycle.is_some() && !seen.insert(leaf.curve_key.clone()) {
            leaf.counted = false;
            dups += 1;
        }
    }
    dups
}

fn leaves_for_path(
    q: &InvariantQuery,
    poly: &NewtonPolygon,
    order: &DirectionOrder,
    g: &pathsub::LatticePath,
    opts: RunOptions,
) -> Result<(Vec<Leaf>, LeafStats)> {
    let mut stats = LeafStats::default();
    let mut out = Vec::new();
    for gh in pathsub::enumerate_enhancements(g, q.nv, order) {
        let st = pathsub::for_each_terminal(&gh, poly, opts.budget, |s| {
            if !pathsub::check_admissible(&s, poly, &q.degree) {
                stats.skipped_inadmissible += 1;
                return Ok(());
            }
            if let Some(leaf) = make_leaf(q, poly, &gh, s.cells, &mut stats)? {
                out.push(leaf);
            }
            Ok(())
        })?;
        stats.nodes += st.nodes;
    }
    stats.duplicates += mark_duplicate_cycle_curves(&mut out);
    stats.leaves = out.len() as u64;
    Ok((out, stats))
}

/// All leaves of the enumeration for a fixed direction, in a deterministic order.
pub fn enumerate_leaves(q: &InvariantQuery, opts: RunOptions) -> Result<(Vec<Leaf>, LeafStats, Direction)> {
    let poly = q.polygon()?;
    q.validate(&poly)?;
    let dir = q.direction.unwrap_or_else(|| Direction::default_for(&poly));
    let order = DirectionOrder::new(&poly, dir)?;
    let paths = pathsub::enumerate_paths(&order, q.nv + q.ne);
    let per_path: Vec<Result<(Vec<Leaf>, LeafStats)>> =
        paths.par_iter().map(|g| leaves_for_path(q, &poly, &order, g, opts)).collect();
    let mut leaves = Vec::new();
    let mut stats = LeafStats::default();
    for r in per_path {
        let (l, s) = r?;
        leaves.extend(l);
        stats.add(&s);
    }
    Ok((leaves, stats, dir))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RefinedInvariant {
    pub value: LaurentY,
    #[serde(serialize_with = "ser_rational")]
    pub at_y1: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub at_yminus1: Rational,
    pub contribution_count: u64,
    pub no_cycle: LaurentY,
    pub cycle: LaurentY,
    pub stats: LeafStats,
    pub direction: Direction,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

fn to_y(f: &RationalFunction) -> Result<LaurentY> {
    Ok(laurent_to_y(&f.to_laurent()?)?)
}

pub fn sum_weights<'a>(it: impl Iterator<Item = &'a RationalFunction>) -> RationalFunction {
    let mut acc = RationalFunction::zero();
    for w in it {
        acc = &acc + w;
    }
    acc
}

pub fn invariant_from_leaves(leaves: &[Leaf], stats: LeafStats, direction: Direction) -> Result<RefinedInvariant> {
    let counted: Vec<&Leaf> = leaves.iter().filter(|l| l.counted).collect();
    let no_cycle = sum_weights(counted.iter().filter(|l| l.class.cycle.is_none()).map(|l| &l.weight));
    let cycle = sum_weights(counted.iter().filter(|l| l.class.cycle.is_some()).map(|l| &l.weight));
    let total = &no_cycle + &cycle;
    let value = to_y(&total)?;
    let (at_y1, at_yminus1) = evaluate_special(&value);
    Ok(RefinedInvariant {
        at_y1,
        at_yminus1,
        contribution_count: counted.len() as u64,
        no_cycle: to_y(&no_cycle).unwrap_or_default(),
        cycle: to_y(&cycle).unwrap_or_default(),
        value,
        stats,
        direction,
    })
}

pub fn gs_invariant_with(q: &InvariantQuery, opts: RunOptions) -> Result<RefinedInvariant> {
    let (leaves, stats, dir) = enumerate_leaves(q, opts)?;
    invariant_from_leaves(&leaves, stats, dir)
}

pub fn gs_invariant(q: &InvariantQuery) -> Result<RefinedInvariant> {
    gs_invariant_with(q, RunOptions::default())
}

pub fn evaluate_special(r: &LaurentY) -> (Rational, Rational) {
    (r.at_one(), r.at_minus_one())
}

/// Leaves grouped into curves, with the summed weight of each curve.
pub fn curve_groups(leaves: &[Leaf]) -> Vec<(CurveKey, Vec<usize>, RationalFunction)> {
    let mut groups: BTreeMap<CurveKey, Vec<usize>> = BTreeMap::new();
    for (i, l) in leaves.iter().enumerate() {
        if l.counted {
            groups.entry(l.curve_key.clone()).or_default().push(i);
        }
    }
    groups
        .into_iter()
        .map(|(k, idx)| {
            let w = sum_weights(idx.iter().map(|&i| &leaves[i].weight));
            (k, idx, w)
        })
        .collect()
}

/// Result document written by the command line tool.
pub fn result_json(q: &InvariantQuery, r: &RefinedInvariant) -> serde_json::Value {
    let mut query = serde_json::to_value(q).expect("query serializes");
    query["direction"] = serde_json::to_value(r.direction).unwrap();
    serde_json::json!({
        "query": query,
        "invariant": serde_json::to_value(&r.value).unwrap(),
        "y1": format_rational(&r.at_y1),
        "ym1": format_rational(&r.at_yminus1),
        "contributions": r.contribution_count,
        "skipped_reducible": r.stats.skipped_reducible,
        "skipped_inadmissible": r.stats.skipped_inadmissible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{rat, Laurent};
    use crate::lattice::pt;

    fn y(terms: &[(i64, i64)]) -> LaurentY {
        LaurentY::new(Laurent::from_terms(terms.iter().map(|&(e, c)| (e, rat(c)))))
    }

    #[test]
    fn line_through_two_points() {
        let q = InvariantQuery::new(Degree::plane(1), 0, 0, 2);
        let r = gs_invariant(&q).unwrap();
        assert_eq!(r.value, y(&[(0, 1)]));
    }

    #[test]
    fn conic_through_five_points() {
        let q = InvariantQuery::new(Degree::plane(2), 0, 0, 5);
        assert_eq!(gs_invariant(&q).unwrap().value, y(&[(0, 1)]));
    }

    #[test]
    fn query_validation() {
        let q = InvariantQuery::new(Degree::plane(2), 1, 0, 5);
        assert!(matches!(gs_invariant(&q), Err(Error::InvalidInput(_))));
        let q = InvariantQuery::new(Degree::plane(2), 0, 0, 4);
        assert!(matches!(gs_invariant(&q), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn evaluate_special_examples() {
        assert_eq!(evaluate_special(&y(&[(1, 2), (0, 16), (-1, 2)])), (rat(20), rat(12)));
        assert_eq!(evaluate_special(&y(&[(1, 2), (0, 6), (-1, 2)])), (rat(10), rat(2)));
        assert_eq!(evaluate_special(&LaurentY::default()), (rat(0), rat(0)));
    }

    #[test]
    fn hull() {
        let h = hull_vertices(&[pt(0, 0), pt(1, 0), pt(2, 0), pt(0, 1), pt(1, 1)]);
        assert_eq!(h, vec![pt(0, 0), pt(0, 1), pt(1, 1), pt(2, 0)]);
    }
}
