//! Finite point-line incidence structures.
//!
//! Points are `0..num_points` (at most 64); each line is a [`PointSet`]. Lines
//! are kept sorted by mask value, so a line id is its rank in that order.

use std::collections::VecDeque;
use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::gf2::{Gf2Matrix, MAX_LEN};
use crate::pointset::PointSet;

const UNREACHABLE: u8 = u8::MAX;

/// Description of the first axiom violation found by a validator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation(pub String);

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub type Validation = std::result::Result<(), Violation>;

/// Outcome of near-polygon validation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NearPolygonInfo {
    /// Maximal point distance; the structure is a near 2d-gon.
    pub diameter: usize,
    pub dense: bool,
    pub slim: bool,
}

#[derive(Clone, Debug)]
pub struct IncidenceStructure {
    num_points: usize,
    lines: Vec<PointSet>,
    lines_through: Vec<Vec<usize>>,
    neighbours: Vec<PointSet>,
    dist: Vec<u8>,
    labels: Option<Vec<String>>,
}

impl IncidenceStructure {
    pub fn new(num_points: usize, mut lines: Vec<PointSet>) -> Result<Self> {
        if num_points == 0 || num_points > MAX_LEN {
            return Err(Error::Capacity(format!(
                "{num_points} points (supported: 1..={MAX_LEN})"
            )));
        }
        let all = PointSet::full(num_points);
        for l in &lines {
            if !l.is_subset(all) {
                return Err(Error::InvalidInput(format!(
                    "line {l:?} leaves the point range"
                )));
            }
            if l.len() < 2 {
                return Err(Error::InvalidInput(format!(
                    "line {l:?} has fewer than 2 points"
                )));
            }
        }
        lines.sort_unstable();

        let mut lines_through = vec![Vec::new(); num_points];
        let mut neighbours = vec![PointSet::EMPTY; num_points];
        for (id, &l) in lines.iter().enumerate() {
            for p in l {
                lines_through[p].push(id);
                neighbours[p] = neighbours[p].union(l);
            }
        }
        for (p, nb) in neighbours.iter_mut().enumerate() {
            *nb = nb.difference(PointSet::singleton(p));
        }

        let mut dist = vec![UNREACHABLE; num_points * num_points];
        let mut queue = VecDeque::new();
        for src in 0..num_points {
            let row = &mut dist[src * num_points..(src + 1) * num_points];
            row[src] = 0;
            queue.push_back(src);
            while let Some(u) = queue.pop_front() {
                for v in neighbours[u] {
                    if row[v] == UNREACHABLE {
                        row[v] = row[u] + 1;
                        queue.push_back(v);
                    }
                }
            }
        }

        Ok(Self {
            num_points,
            lines,
            lines_through,
            neighbours,
            dist,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.num_points {
            return Err(Error::InvalidInput(format!(
                "{} labels for {} points",
                labels.len(),
                self.num_points
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn num_lines(&self) -> usize {
        self.lines.len()
    }

    pub fn points(&self) -> PointSet {
        PointSet::full(self.num_points)
    }

    pub fn lines(&self) -> &[PointSet] {
        &self.lines
    }

    pub fn line(&self, id: usize) -> PointSet {
        self.lines[id]
    }

    pub fn line_id(&self, l: PointSet) -> Option<usize> {
        self.lines.binary_search(&l).ok()
    }

    pub fn lines_through(&self, p: usize) -> &[usize] {
        &self.lines_through[p]
    }

    /// Points collinear with `p`, excluding `p`.
    pub fn neighbours(&self, p: usize) -> PointSet {
        self.neighbours[p]
    }

    pub fn collinear(&self, a: usize, b: usize) -> bool {
        self.neighbours[a].contains(b)
    }

    /// `p` together with every point collinear with it.
    pub fn perp(&self, p: usize) -> PointSet {
        self.neighbours[p].union(PointSet::singleton(p))
    }

    /// Hop distance in the collinearity graph, `None` across components.
    pub fn dist(&self, a: usize, b: usize) -> Option<usize> {
        match self.dist[a * self.num_points + b] {
            UNREACHABLE => None,
            d => Some(d as usize),
        }
    }

    pub fn is_connected(&self) -> bool {
        !self.dist.contains(&UNREACHABLE)
    }

    pub fn diameter(&self) -> Option<usize> {
        self.is_connected()
            .then(|| self.dist.iter().copied().max().unwrap_or(0) as usize)
    }

    /// Points at distance exactly `d` from `p`.
    pub fn sphere(&self, p: usize, d: usize) -> PointSet {
        (0..self.num_points)
            .filter(|&q| self.dist(p, q) == Some(d))
            .collect()
    }

    pub fn label(&self, p: usize) -> String {
        match &self.labels {
            Some(l) => l[p].clone(),
            None => p.to_string(),
        }
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// One row per line, one column per point.
    pub fn line_incidence_matrix(&self) -> Gf2Matrix {
        Gf2Matrix::new(
            self.num_points,
            self.lines.iter().map(|l| l.mask()).collect(),
        )
        .expect("lines lie within the point range")
    }

    /// Every pair of distinct points lies on at most one line.
    pub fn validate_partial_linear_space(&self) -> Validation {
        for (i, &a) in self.lines.iter().enumerate() {
            for (j, &b) in self.lines.iter().enumerate().skip(i + 1) {
                let common = a.intersection(b);
                if common.len() >= 2 {
                    let mut it = common.iter();
                    let (p, q) = (it.next().unwrap(), it.next().unwrap());
                    return Err(Violation(format!(
                        "points {p} and {q} lie on both line {i} and line {j}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Generalized quadrangle axioms for order (s, t), plus the point and
    /// line counts they force.
    pub fn validate_gq(&self, s: usize, t: usize) -> Validation {
        self.validate_partial_linear_space()?;
        let (np, nl) = ((s + 1) * (s * t + 1), (t + 1) * (s * t + 1));
        if self.num_points != np {
            return Err(Violation(format!(
                "{} points, GQ({s},{t}) needs {np}",
                self.num_points
            )));
        }
        if self.lines.len() != nl {
            return Err(Violation(format!(
                "{} lines, GQ({s},{t}) needs {nl}",
                self.lines.len()
            )));
        }
        for (p, through) in self.lines_through.iter().enumerate() {
            if through.len() != t + 1 {
                return Err(Violation(format!(
                    "point {p} is on {} lines",
                    through.len()
                )));
            }
        }
        for (id, l) in self.lines.iter().enumerate() {
            if l.len() != s + 1 {
                return Err(Violation(format!("line {id} has {} points", l.len())));
            }
        }
        for x in 0..self.num_points {
            for (id, &l) in self.lines.iter().enumerate() {
                if l.contains(x) {
                    continue;
                }
                let k = self.neighbours[x].intersection(l).len();
                if k != 1 {
                    return Err(Violation(format!(
                        "point {x} is collinear with {k} points of line {id}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Checks that every line has a unique point nearest to every point, and
    /// reports the diameter together with density and slimness.
    pub fn validate_near_polygon(&self) -> Result<NearPolygonInfo> {
        if self.validate_partial_linear_space().is_err() {
            return Err(Error::Structure("not a partial linear space".into()));
        }
        let diameter = self.diameter().ok_or(Error::Disconnected)?;
        for x in 0..self.num_points {
            for (id, &l) in self.lines.iter().enumerate() {
                let nearest = l.iter().map(|p| self.dist(x, p).unwrap()).min().unwrap();
                let ties = l
                    .iter()
                    .filter(|&p| self.dist(x, p) == Some(nearest))
                    .count();
                if ties != 1 {
                    return Err(Error::NotNearPolygon { point: x, line: id });
                }
            }
        }
        let slim = self.lines.iter().all(|l| l.len() == 3);
        let dense = self.lines.iter().all(|l| l.len() >= 3)
            && (0..self.num_points).all(|x| {
                ((x + 1)..self.num_points)
                    .filter(|&y| self.dist(x, y) == Some(2))
                    .all(|y| self.common_neighbours(x, y).len() >= 2)
            });
        Ok(NearPolygonInfo {
            diameter,
            dense,
            slim,
        })
    }

    pub fn common_neighbours(&self, a: usize, b: usize) -> PointSet {
        self.neighbours[a].intersection(self.neighbours[b])
    }

    /// Smallest superset of `seed` that is a subspace and contains every
    /// point on a shortest path between two of its points.
    pub fn geodetic_closure(&self, seed: PointSet) -> Result<PointSet> {
        if seed.is_empty() {
            return Err(Error::InvalidInput("empty seed".into()));
        }
        if !seed.is_subset(self.points()) {
            return Err(Error::InvalidInput(format!(
                "seed {seed:?} leaves the point range"
            )));
        }
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        let mut cur = seed;
        loop {
            let mut next = cur;
            for l in &self.lines {
                if l.intersection(cur).len() >= 2 {
                    next = next.union(*l);
                }
            }
            let pts: Vec<usize> = cur.iter().collect();
            for (i, &x) in pts.iter().enumerate() {
                for &y in &pts[i + 1..] {
                    let dxy = self.dist(x, y).unwrap();
                    if dxy < 2 {
                        continue;
                    }
                    for z in 0..self.num_points {
                        if self.dist(x, z).unwrap() + self.dist(z, y).unwrap() == dxy {
                            next.insert(z);
                        }
                    }
                }
            }
            if next == cur {
                return Ok(cur);
            }
            cur = next;
        }
    }

    /// Substructure on `pts` keeping only lines wholly inside it. The second
    /// component maps new indices to old ones.
    pub fn induced_substructure(&self, pts: PointSet) -> Result<(IncidenceStructure, Vec<usize>)> {
        if pts.is_empty() || !pts.is_subset(self.points()) {
            return Err(Error::InvalidInput(format!("bad point set {pts:?}")));
        }
        let map: Vec<usize> = pts.iter().collect();
        let mut new_index = vec![usize::MAX; self.num_points];
        for (i, &p) in map.iter().enumerate() {
            new_index[p] = i;
        }
        let lines = self
            .lines
            .iter()
            .filter(|l| l.is_subset(pts))
            .map(|l| l.iter().map(|p| new_index[p]).collect())
            .collect();
        let mut sub = IncidenceStructure::new(map.len(), lines)?;
        if let Some(labels) = &self.labels {
            sub.labels = Some(map.iter().map(|&p| labels[p].clone()).collect());
        }
        Ok((sub, map))
    }

    /// Direct product: point (x, y) gets index `x * |P2| + y`; lines are
    /// `{x} × L2` and `L1 × {y}`.
    pub fn direct_product(a: &Self, b: &Self) -> Result<Self> {
        for g in [a, b] {
            if g.lines.is_empty() {
                return Err(Error::Degenerate("factor has no lines".into()));
            }
            if !g.is_connected() {
                return Err(Error::Disconnected);
            }
        }
        let n2 = b.num_points;
        let n = a.num_points * n2;
        if n > MAX_LEN {
            return Err(Error::Capacity(format!("product has {n} points")));
        }
        let mut lines = Vec::with_capacity(a.num_points * b.lines.len() + a.lines.len() * n2);
        for x in 0..a.num_points {
            for l in &b.lines {
                lines.push(l.iter().map(|y| x * n2 + y).collect());
            }
        }
        for l in &a.lines {
            for y in 0..n2 {
                lines.push(l.iter().map(|x| x * n2 + y).collect());
            }
        }
        let labels = (0..n)
            .map(|p| format!("{}:{}", a.label(p / n2), b.label(p % n2)))
            .collect();
        let g = Self::new(n, lines)?.with_labels(labels)?;
        g.validate_partial_linear_space()
            .map_err(|v| Error::Structure(v.0))?;
        Ok(g)
    }

    /// Collinearity graph in DOT, vertices in index order.
    pub fn collinearity_dot(&self, name: &str) -> String {
        let mut s = format!("graph {name} {{\n");
        for p in 0..self.num_points {
            let _ = writeln!(s, "  p{p} [label=\"{}\"];", self.label(p));
        }
        for p in 0..self.num_points {
            for q in self.neighbours[p].iter().filter(|&q| q > p) {
                let _ = writeln!(s, "  p{p} -- p{q};");
            }
        }
        s.push_str("}\n");
        s
    }

    /// Point-line incidence graph in DOT: points `p*` then lines `l*`.
    pub fn incidence_dot(&self, name: &str) -> String {
        let mut s = format!("graph {name} {{\n");
        for p in 0..self.num_points {
            let _ = writeln!(s, "  p{p} [shape=circle, label=\"{}\"];", self.label(p));
        }
        for id in 0..self.lines.len() {
            let _ = writeln!(s, "  l{id} [shape=box, label=\"L{id}\"];");
        }
        for (id, l) in self.lines.iter().enumerate() {
            for p in *l {
                let _ = writeln!(s, "  p{p} -- l{id};");
            }
        }
        s.push_str("}\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line3() -> IncidenceStructure {
        IncidenceStructure::new(3, vec![PointSet(0b111)]).unwrap()
    }

    fn grid() -> IncidenceStructure {
        let rows = (0..3).map(|r| PointSet::from_points((0..3).map(|c| 3 * r + c)));
        let cols = (0..3).map(|c| PointSet::from_points((0..3).map(|r| 3 * r + c)));
        IncidenceStructure::new(9, rows.chain(cols).collect()).unwrap()
    }

    #[test]
    fn single_line() {
        let g = line3();
        assert!(g.validate_partial_linear_space().is_ok());
        let np = g.validate_near_polygon().unwrap();
        assert_eq!(np.diameter, 1);
        assert!(np.slim);
    }

    #[test]
    fn doubled_line_is_not_a_partial_linear_space() {
        let g = IncidenceStructure::new(3, vec![PointSet(0b111), PointSet(0b111)]).unwrap();
        let v = g.validate_partial_linear_space().unwrap_err();
        assert!(v.0.contains("points 0 and 1"), "{v}");
    }

    #[test]
    fn grid_is_gq21() {
        let g = grid();
        assert!(g.validate_gq(2, 1).is_ok());
        assert!(g.validate_gq(2, 2).is_err());
        assert_eq!(g.perp(4).len(), 5);
        assert_eq!(g.validate_near_polygon().unwrap().diameter, 2);
    }

    #[test]
    fn line_ids_follow_mask_order() {
        let g = grid();
        assert!(g.lines().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(g.line_id(PointSet(0b111)), Some(0));
    }

    #[test]
    fn product_of_lines_is_the_grid() {
        let p = IncidenceStructure::direct_product(&line3(), &line3()).unwrap();
        assert_eq!(p.num_points(), 9);
        assert_eq!(p.lines(), grid().lines());
        assert_eq!(p.label(5), "1:2");
    }

    #[test]
    fn product_with_lineless_factor_is_rejected() {
        let point = IncidenceStructure::new(1, vec![]).unwrap();
        assert!(matches!(
            IncidenceStructure::direct_product(&line3(), &point),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn disconnected_structures() {
        let g = IncidenceStructure::new(6, vec![PointSet(0b000111), PointSet(0b111000)]).unwrap();
        assert!(!g.is_connected());
        assert_eq!(g.diameter(), None);
        assert_eq!(g.dist(0, 4), None);
        assert!(matches!(
            g.geodetic_closure(PointSet(1)),
            Err(Error::Disconnected)
        ));
        assert!(matches!(
            g.validate_near_polygon(),
            Err(Error::Disconnected)
        ));
    }

    #[test]
    fn closure_of_a_point_and_of_a_grid_pair() {
        let g = grid();
        assert_eq!(g.geodetic_closure(PointSet(1)).unwrap(), PointSet(1));
        // two opposite points of the grid span everything
        assert_eq!(
            g.geodetic_closure(PointSet::from_points([0, 4])).unwrap(),
            g.points()
        );
        assert_eq!(
            g.geodetic_closure(PointSet::from_points([0, 1])).unwrap(),
            PointSet(0b111)
        );
    }

    #[test]
    fn induced_on_everything_is_identity() {
        let g = grid();
        let (sub, map) = g.induced_substructure(g.points()).unwrap();
        assert_eq!(sub.lines(), g.lines());
        assert_eq!(map, (0..9).collect::<Vec<_>>());
    }

    #[test]
    fn non_near_polygon_is_reported() {
        // pentagon: the edge opposite a vertex has two nearest points
        let g = IncidenceStructure::new(
            5,
            (0..5)
                .map(|i| PointSet::from_points([i, (i + 1) % 5]))
                .collect(),
        )
        .unwrap();
        assert!(matches!(
            g.validate_near_polygon(),
            Err(Error::NotNearPolygon { .. })
        ));
    }

    #[test]
    fn dot_exports_are_deterministic() {
        let g = line3();
        let c = g.collinearity_dot("g");
        assert_eq!(c, "graph g {\n  p0 [label=\"0\"];\n  p1 [label=\"1\"];\n  p2 [label=\"2\"];\n  p0 -- p1;\n  p0 -- p2;\n  p1 -- p2;\n}\n");
        let b = g.incidence_dot("g");
        assert!(b.contains("p2 -- l0;"));
        assert_eq!(b, g.incidence_dot("g"));
    }
}
