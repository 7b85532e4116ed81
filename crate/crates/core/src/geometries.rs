//! Builders for the concrete geometries: the 3-point line, the 3×3 grid,
//! the doily in its duad–syntheme model, the near hexagon L3 × GQ(2,2) with
//! its quads, and the sub-near-hexagons L3 × GQ(2,1) inside it.

use crate::error::{Error, Result};
use crate::incidence::IncidenceStructure;
use crate::pointset::PointSet;

/// Points in one doily fiber of the hexagon.
pub const DOILY_POINTS: usize = 15;
/// Points of the near hexagon.
pub const HEXAGON_POINTS: usize = 3 * DOILY_POINTS;

pub fn line3() -> IncidenceStructure {
    IncidenceStructure::new(3, vec![PointSet(0b111)]).expect("static geometry")
}

/// The 3×3 grid with point `3r + c` at row r, column c.
pub fn grid() -> IncidenceStructure {
    let rows = (0..3).map(|r| PointSet::from_points((0..3).map(|c| 3 * r + c)));
    let cols = (0..3).map(|c| PointSet::from_points((0..3).map(|r| 3 * r + c)));
    IncidenceStructure::new(9, rows.chain(cols).collect()).expect("static geometry")
}

/// The duad–syntheme model of GQ(2,2) on the symbols 1..=6.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoilyModel {
    /// 2-subsets of {1..6} in lexicographic order; index = doily point.
    pub duads: Vec<(u8, u8)>,
    /// Partitions into three duads, each a sorted triple of duad indices,
    /// in ascending order.
    pub synthemes: Vec<[usize; 3]>,
}

impl DoilyModel {
    pub fn new() -> Self {
        let duads: Vec<(u8, u8)> = (1..=6u8)
            .flat_map(|a| ((a + 1)..=6).map(move |b| (a, b)))
            .collect();
        let mut synthemes = Vec::new();
        for (i, &a) in duads.iter().enumerate() {
            for (j, &b) in duads.iter().enumerate().skip(i + 1) {
                for (k, &c) in duads.iter().enumerate().skip(j + 1) {
                    if symbols(&[a, b, c]) == 0b111_1110 {
                        synthemes.push([i, j, k]);
                    }
                }
            }
        }
        Self { duads, synthemes }
    }

    pub fn duad_index(&self, a: u8, b: u8) -> Option<usize> {
        let key = (a.min(b), a.max(b));
        self.duads.iter().position(|&d| d == key)
    }

    pub fn label(&self, p: usize) -> String {
        let (a, b) = self.duads[p];
        format!("{a}{b}")
    }

    /// Duad indices containing `symbol`.
    pub fn star(&self, symbol: u8) -> PointSet {
        self.duads
            .iter()
            .enumerate()
            .filter(|(_, d)| d.0 == symbol || d.1 == symbol)
            .map(|(i, _)| i)
            .collect()
    }
}

impl Default for DoilyModel {
    fn default() -> Self {
        Self::new()
    }
}

/// Bit mask of the symbols used, or 0 if any symbol repeats.
fn symbols(duads: &[(u8, u8)]) -> u8 {
    let mut seen = 0u8;
    for &(a, b) in duads {
        for s in [a, b] {
            if seen >> s & 1 == 1 {
                return 0;
            }
            seen |= 1 << s;
        }
    }
    seen
}

/// GQ(2,2): duads as points, synthemes as lines; collinear iff disjoint.
pub fn doily() -> (IncidenceStructure, DoilyModel) {
    let model = DoilyModel::new();
    let lines = model
        .synthemes
        .iter()
        .map(|s| PointSet::from_points(s.iter().copied()))
        .collect();
    let labels = (0..DOILY_POINTS).map(|p| model.label(p)).collect();
    let g = IncidenceStructure::new(DOILY_POINTS, lines)
        .and_then(|g| g.with_labels(labels))
        .expect("static geometry");
    (g, model)
}

/// Splits of {1..6} into two triples, given by the triple holding symbol 1,
/// in lexicographic order.
pub fn triple_splits() -> Vec<[u8; 3]> {
    (2..=6u8)
        .flat_map(|a| ((a + 1)..=6).map(move |b| [1, a, b]))
        .collect()
}

/// The ten 3×3 subgrids of the doily, one per triple split: the duads that
/// cross the split.
pub fn doily_grids() -> Vec<PointSet> {
    let model = DoilyModel::new();
    triple_splits()
        .iter()
        .map(|t| {
            model
                .duads
                .iter()
                .enumerate()
                .filter(|(_, &(a, b))| t.contains(&a) != t.contains(&b))
                .map(|(i, _)| i)
                .collect()
        })
        .collect()
}

/// The six ovoids of the doily: for each symbol, the five duads holding it.
pub fn doily_ovoids() -> Vec<PointSet> {
    let model = DoilyModel::new();
    (1..=6).map(|s| model.star(s)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QuadKind {
    Grid,
    Doily,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Quad {
    pub points: PointSet,
    pub kind: QuadKind,
    /// Base doily line id for a grid-quad, fiber index for a doily-quad.
    pub anchor: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LineType {
    /// `{(0,p), (1,p), (2,p)}`, joining the three doily copies.
    One,
    /// A doily line inside one fiber.
    Two,
}

/// L3 × GQ(2,2) with point `(k, p)` at index `15k + p`.
#[derive(Clone, Debug)]
pub struct Hexagon {
    pub geometry: IncidenceStructure,
    pub doily: IncidenceStructure,
    pub model: DoilyModel,
    /// 15 grid-quads (by base line id) followed by 3 doily-quads (by fiber).
    pub quads: Vec<Quad>,
    /// Indexed by line id of `geometry`.
    pub line_types: Vec<LineType>,
}

impl Hexagon {
    pub fn point(fiber: usize, base: usize) -> usize {
        DOILY_POINTS * fiber + base
    }

    pub fn fiber_of(p: usize) -> usize {
        p / DOILY_POINTS
    }

    pub fn base_of(p: usize) -> usize {
        p % DOILY_POINTS
    }

    /// Lifts a base doily set into fiber `k`.
    pub fn lift(fiber: usize, base: PointSet) -> PointSet {
        PointSet(base.mask() << (DOILY_POINTS * fiber))
    }

    /// Points of `set` in fiber `k`, as base doily indices.
    pub fn trace(set: PointSet, fiber: usize) -> PointSet {
        PointSet((set.mask() >> (DOILY_POINTS * fiber)) & PointSet::full(DOILY_POINTS).mask())
    }

    /// `L3 × base`.
    pub fn cylinder(base: PointSet) -> PointSet {
        (0..3).fold(PointSet::EMPTY, |acc, k| acc.union(Self::lift(k, base)))
    }

    pub fn grid_quads(&self) -> impl Iterator<Item = &Quad> {
        self.quads.iter().filter(|q| q.kind == QuadKind::Grid)
    }

    pub fn doily_quads(&self) -> impl Iterator<Item = &Quad> {
        self.quads.iter().filter(|q| q.kind == QuadKind::Doily)
    }
}

pub fn hexagon() -> Hexagon {
    let (doily, model) = doily();
    let geometry = IncidenceStructure::direct_product(&line3(), &doily).expect("static geometry");
    let line_types = geometry
        .lines()
        .iter()
        .map(|l| {
            let p = l.first().unwrap();
            if *l == Hexagon::cylinder(PointSet::singleton(Hexagon::base_of(p))) {
                LineType::One
            } else {
                LineType::Two
            }
        })
        .collect();
    let mut quads: Vec<Quad> = doily
        .lines()
        .iter()
        .enumerate()
        .map(|(id, &l)| Quad {
            points: Hexagon::cylinder(l),
            kind: QuadKind::Grid,
            anchor: id,
        })
        .collect();
    quads.extend((0..3).map(|k| Quad {
        points: Hexagon::lift(k, doily.points()),
        kind: QuadKind::Doily,
        anchor: k,
    }));
    Hexagon {
        geometry,
        doily,
        model,
        quads,
        line_types,
    }
}

/// A quad found by closing a distance-2 point pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiscoveredQuad {
    pub points: PointSet,
    /// Order (s, t) of the generalized quadrangle it induces.
    pub order: (usize, usize),
}

/// Proper quads of a dense near polygon: geodetic closures of point pairs at
/// distance 2 that induce a non-degenerate generalized quadrangle, sorted by
/// mask.
pub fn discover_quads(g: &IncidenceStructure) -> Result<Vec<DiscoveredQuad>> {
    let n = g.num_points();
    let mut seen = std::collections::BTreeSet::new();
    for x in 0..n {
        for y in (x + 1)..n {
            if g.dist(x, y) == Some(2) {
                seen.insert(g.geodetic_closure(PointSet::from_points([x, y]))?);
            }
        }
    }
    let mut quads = Vec::new();
    for pts in seen {
        if pts == g.points() {
            continue;
        }
        let (sub, _) = g.induced_substructure(pts)?;
        if let Some(order) = gq_order(&sub) {
            quads.push(DiscoveredQuad { points: pts, order });
        }
    }
    Ok(quads)
}

/// The order (s, t) if `g` is a non-degenerate generalized quadrangle.
pub fn gq_order(g: &IncidenceStructure) -> Option<(usize, usize)> {
    let s = g.lines().first()?.len().checked_sub(1)?;
    let t = g.lines_through(0).len().checked_sub(1)?;
    (s >= 1 && t >= 1 && g.validate_gq(s, t).is_ok()).then_some((s, t))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TriadKind {
    Unicentric,
    Tricentric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TriadClass {
    pub points: [usize; 3],
    pub centers: PointSet,
    pub kind: TriadKind,
}

/// Common neighbours of every point of `t`.
pub fn triad_centers(g: &IncidenceStructure, t: [usize; 3]) -> PointSet {
    t.iter()
        .fold(g.points(), |acc, &p| acc.intersection(g.neighbours(p)))
}

/// Every triad of pairwise non-collinear points with its centers. Anything
/// other than one or three centers is rejected.
pub fn classify_triads(g: &IncidenceStructure) -> Result<Vec<TriadClass>> {
    let n = g.num_points();
    let mut out = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            if g.collinear(a, b) {
                continue;
            }
            for c in (b + 1)..n {
                if g.collinear(a, c) || g.collinear(b, c) {
                    continue;
                }
                let points = [a, b, c];
                let centers = triad_centers(g, points);
                let kind = match centers.len() {
                    1 => TriadKind::Unicentric,
                    3 => TriadKind::Tricentric,
                    k => {
                        return Err(Error::Structure(format!(
                            "triad {points:?} has {k} centers"
                        )))
                    }
                };
                out.push(TriadClass {
                    points,
                    centers,
                    kind,
                });
            }
        }
    }
    Ok(out)
}

/// L3 × GQ(2,1) sitting over one doily grid.
#[derive(Clone, Debug)]
pub struct SubHexagon {
    pub geometry: IncidenceStructure,
    /// Sub-hexagon point index to hexagon point index.
    pub embedding: Vec<usize>,
    pub grid: PointSet,
}

pub fn sub_hexagon(hex: &Hexagon, grid_pts: PointSet) -> Result<SubHexagon> {
    if !doily_grids().contains(&grid_pts) {
        return Err(Error::InvalidInput(format!(
            "{grid_pts:?} is not a doily grid"
        )));
    }
    let (geometry, embedding) = hex
        .geometry
        .induced_substructure(Hexagon::cylinder(grid_pts))?;
    Ok(SubHexagon {
        geometry,
        embedding,
        grid: grid_pts,
    })
}

impl SubHexagon {
    pub fn points_in_hexagon(&self) -> PointSet {
        self.embedding.iter().copied().collect()
    }

    /// Pulls a hexagon point set back to sub-hexagon indices.
    pub fn restrict(&self, set: PointSet) -> PointSet {
        self.embedding
            .iter()
            .enumerate()
            .filter(|(_, &p)| set.contains(p))
            .map(|(i, _)| i)
            .collect()
    }
}

/// Geometry names accepted by [`named`].
pub const NAMES: [&str; 5] = ["line3", "grid", "doily", "hexagon", "subhex"];

/// A geometry looked up by name, with its hexagon when it has one.
#[derive(Clone, Debug)]
pub enum Named {
    Plain(IncidenceStructure),
    Doily(IncidenceStructure),
    Hexagon(Box<Hexagon>),
    SubHexagon(Box<SubHexagon>),
}

impl Named {
    pub fn geometry(&self) -> &IncidenceStructure {
        match self {
            Named::Plain(g) | Named::Doily(g) => g,
            Named::Hexagon(h) => &h.geometry,
            Named::SubHexagon(s) => &s.geometry,
        }
    }
}

/// Resolves `line3`, `grid`, `doily`, `hexagon` or `subhex`; `grid` picks the
/// doily grid under a sub-hexagon (0..9, default 0) and is rejected elsewhere.
pub fn named(name: &str, grid_index: Option<usize>) -> Result<Named> {
    if grid_index.is_some() && name != "subhex" {
        return Err(Error::InvalidInput(format!(
            "--grid applies only to subhex, not {name}"
        )));
    }
    Ok(match name {
        "line3" => Named::Plain(line3()),
        "grid" => Named::Plain(grid()),
        "doily" => Named::Doily(doily().0),
        "hexagon" => Named::Hexagon(Box::new(hexagon())),
        "subhex" => {
            let i = grid_index.unwrap_or(0);
            let grids = doily_grids();
            let g = *grids.get(i).ok_or_else(|| {
                Error::InvalidInput(format!(
                    "grid index {i} is out of range 0..{}",
                    grids.len() - 1
                ))
            })?;
            Named::SubHexagon(Box::new(sub_hexagon(&hexagon(), g)?))
        }
        other => return Err(Error::UnknownGeometry(other.to_string())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duad_indexing() {
        let m = DoilyModel::new();
        assert_eq!(m.duads.len(), 15);
        assert_eq!(m.duads[0], (1, 2));
        assert_eq!(m.duads[14], (5, 6));
        assert_eq!(m.duad_index(4, 3), Some(9));
        assert_eq!(m.synthemes.len(), 15);
        for d in 0..15 {
            assert_eq!(m.synthemes.iter().filter(|s| s.contains(&d)).count(), 3);
        }
    }

    #[test]
    fn doily_is_gq22() {
        let (g, _) = doily();
        assert!(g.validate_gq(2, 2).is_ok());
        assert!(g.validate_gq(2, 4).is_err());
        assert!(g.line_id(PointSet::from_points([0, 9, 14])).is_some());
        assert!((0..15).all(|p| g.lines_through(p).len() == 3));
        assert_eq!(g.validate_near_polygon().unwrap().diameter, 2);
    }

    #[test]
    fn doily_perp_of_12() {
        let (g, m) = doily();
        let labels: Vec<String> = g.perp(0).iter().map(|p| m.label(p)).collect();
        assert_eq!(labels, ["12", "34", "35", "36", "45", "46", "56"]);
    }

    #[test]
    fn collinear_iff_disjoint() {
        let (g, m) = doily();
        for a in 0..15 {
            for b in 0..15 {
                if a == b {
                    continue;
                }
                let (x, y) = (m.duads[a], m.duads[b]);
                let disjoint = x.0 != y.0 && x.0 != y.1 && x.1 != y.0 && x.1 != y.1;
                assert_eq!(g.collinear(a, b), disjoint);
            }
        }
    }

    #[test]
    fn grid_and_line3() {
        let g = grid();
        assert_eq!((g.num_points(), g.num_lines()), (9, 6));
        assert!(g.validate_gq(2, 1).is_ok());
        assert_eq!(line3().validate_near_polygon().unwrap().diameter, 1);
    }

    #[test]
    fn named_grid_and_ovoid() {
        assert_eq!(
            doily_grids()[0],
            PointSet::from_points([2, 3, 4, 6, 7, 8, 9, 10, 11])
        );
        assert_eq!(doily_ovoids()[0], PointSet::from_points([0, 1, 2, 3, 4]));
        assert_eq!(doily_grids().len(), 10);
        assert_eq!(doily_ovoids().len(), 6);
    }

    #[test]
    fn grids_meet_in_two_concurrent_lines() {
        let (g, _) = doily();
        let grids = doily_grids();
        for (i, &a) in grids.iter().enumerate() {
            let (sub, _) = g.induced_substructure(a).unwrap();
            assert!(sub.validate_gq(2, 1).is_ok());
            for &b in &grids[i + 1..] {
                let common = a.intersection(b);
                assert_eq!(common.len(), 5);
                let inside: Vec<PointSet> = g
                    .lines()
                    .iter()
                    .copied()
                    .filter(|l| l.is_subset(common))
                    .collect();
                assert_eq!(inside.len(), 2);
                assert_eq!(inside[0].intersection(inside[1]).len(), 1);
                assert_eq!(inside[0].union(inside[1]), common);
            }
        }
    }

    #[test]
    fn ovoids_meet_every_line_once() {
        let (g, _) = doily();
        for o in doily_ovoids() {
            assert!(g.lines().iter().all(|l| l.intersection(o).len() == 1));
        }
    }

    #[test]
    fn named_triads() {
        let (g, m) = doily();
        let d = |a, b| m.duad_index(a, b).unwrap();
        let t = [d(1, 2), d(1, 3), d(1, 4)];
        assert_eq!(triad_centers(&g, t), PointSet::singleton(d(5, 6)));
        let t = [d(1, 2), d(1, 3), d(2, 3)];
        assert_eq!(
            triad_centers(&g, t),
            PointSet::from_points([d(4, 5), d(4, 6), d(5, 6)])
        );
    }

    #[test]
    fn triad_census() {
        let (g, _) = doily();
        let triads = classify_triads(&g).unwrap();
        let uni = triads
            .iter()
            .filter(|t| t.kind == TriadKind::Unicentric)
            .count();
        let tri = triads
            .iter()
            .filter(|t| t.kind == TriadKind::Tricentric)
            .count();
        assert_eq!((uni, tri), (60, 20));
    }

    #[test]
    fn hexagon_structure() {
        let h = hexagon();
        let g = &h.geometry;
        assert_eq!((g.num_points(), g.num_lines()), (45, 60));
        let ones = h.line_types.iter().filter(|t| **t == LineType::One).count();
        assert_eq!(ones, 15);
        for p in 0..45 {
            let through = g.lines_through(p);
            assert_eq!(through.len(), 4);
            assert_eq!(
                through
                    .iter()
                    .filter(|&&l| h.line_types[l] == LineType::One)
                    .count(),
                1
            );
            assert_eq!(g.perp(p).len(), 9);
        }
        for q in h.grid_quads() {
            let inside: Vec<usize> = (0..60).filter(|&l| g.line(l).is_subset(q.points)).collect();
            assert_eq!(inside.len(), 6);
            assert_eq!(
                inside
                    .iter()
                    .filter(|&&l| h.line_types[l] == LineType::One)
                    .count(),
                3
            );
        }
        for q in h.doily_quads() {
            assert!((0..60)
                .filter(|&l| g.line(l).is_subset(q.points))
                .all(|l| h.line_types[l] == LineType::Two));
        }
    }

    #[test]
    fn hexagon_distance_three_pairs() {
        let h = hexagon();
        let g = &h.geometry;
        for a in 0..45 {
            for b in 0..45 {
                let (ka, pa) = (Hexagon::fiber_of(a), Hexagon::base_of(a));
                let (kb, pb) = (Hexagon::fiber_of(b), Hexagon::base_of(b));
                let expect = ka != kb && pa != pb && !h.doily.collinear(pa, pb);
                assert_eq!(g.dist(a, b) == Some(3), expect);
            }
        }
    }

    #[test]
    fn hexagon_closures() {
        let h = hexagon();
        let g = &h.geometry;
        // {1,2} and {1,3} in fiber 0: non-collinear, three common neighbours
        let seed = PointSet::from_points([0, 1]);
        assert_eq!(g.common_neighbours(0, 1).len(), 3);
        assert_eq!(
            g.geodetic_closure(seed).unwrap(),
            Hexagon::lift(0, h.doily.points())
        );
        // (0,{1,2}) and (1,{3,4}): two common neighbours
        let (a, b) = (0, Hexagon::point(1, 9));
        assert_eq!(g.dist(a, b), Some(2));
        assert_eq!(g.common_neighbours(a, b).len(), 2);
        let c = g.geodetic_closure(PointSet::from_points([a, b])).unwrap();
        assert_eq!(c.len(), 9);
        assert!(h.grid_quads().any(|q| q.points == c));
    }

    #[test]
    fn discovered_quads_match_constructive_ones() {
        let h = hexagon();
        let found = discover_quads(&h.geometry).unwrap();
        let mut built: Vec<PointSet> = h.quads.iter().map(|q| q.points).collect();
        built.sort();
        assert_eq!(found.iter().map(|q| q.points).collect::<Vec<_>>(), built);
        assert_eq!(found.iter().filter(|q| q.order == (2, 1)).count(), 15);
        assert_eq!(found.iter().filter(|q| q.order == (2, 2)).count(), 3);
        assert!(discover_quads(&doily().0).unwrap().is_empty());
        assert!(discover_quads(&grid()).unwrap().is_empty());
    }

    #[test]
    fn sub_hexagon_shape() {
        let h = hexagon();
        let s = sub_hexagon(&h, doily_grids()[0]).unwrap();
        assert_eq!((s.geometry.num_points(), s.geometry.num_lines()), (27, 27));
        let np = s.geometry.validate_near_polygon().unwrap();
        assert_eq!(
            np,
            crate::incidence::NearPolygonInfo {
                diameter: 3,
                dense: true,
                slim: true
            }
        );
        assert!(sub_hexagon(&h, doily_ovoids()[0]).is_err());
    }

    #[test]
    fn sub_hexagons_share_two_concurrent_grid_quads() {
        let h = hexagon();
        let grids = doily_grids();
        for (i, &a) in grids.iter().enumerate() {
            for &b in &grids[i + 1..] {
                let sa = sub_hexagon(&h, a).unwrap().points_in_hexagon();
                let sb = sub_hexagon(&h, b).unwrap().points_in_hexagon();
                let shared: Vec<PointSet> = h
                    .grid_quads()
                    .map(|q| q.points)
                    .filter(|q| q.is_subset(sa) && q.is_subset(sb))
                    .collect();
                assert_eq!(shared.len(), 2);
                let common = shared[0].intersection(shared[1]);
                assert!(h.geometry.line_id(common).is_some());
            }
        }
    }

    #[test]
    fn lookup_by_name() {
        assert_eq!(named("grid", None).unwrap().geometry().num_points(), 9);
        let sub = named("subhex", Some(9)).unwrap();
        assert_eq!(
            (sub.geometry().num_points(), sub.geometry().num_lines()),
            (27, 27)
        );
        assert!(matches!(
            named("fano", None),
            Err(Error::UnknownGeometry(_))
        ));
        assert!(named("subhex", Some(10)).is_err());
        assert!(named("doily", Some(0)).is_err());
    }
}
