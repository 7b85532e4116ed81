//! Geometric hyperplanes: enumeration by the GF(2) line code and by
//! backtracking, per-hyperplane invariants, quad relations, and the type
//! census of the near hexagon.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometries::{gq_order, Hexagon, QuadKind, SubHexagon};
use crate::gf2::{span_dimension, Gf2Vector};
use crate::incidence::{IncidenceStructure, Validation, Violation};
use crate::pointset::PointSet;

/// Proper subspace meeting every line in one point or the whole line.
pub fn is_hyperplane(g: &IncidenceStructure, pts: PointSet) -> bool {
    !pts.is_empty()
        && pts != g.points()
        && pts.is_subset(g.points())
        && g.lines().iter().all(|l| {
            let k = l.intersection(pts).len();
            k == 1 || k == l.len()
        })
}

/// A hyperplane with the invariants that do not depend on quads.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hyperplane {
    pub points: PointSet,
    pub pt_count: usize,
    /// Lines wholly inside the hyperplane.
    pub full_line_count: usize,
    /// `orders[k]` = number of points lying on exactly k full lines.
    pub orders: Vec<usize>,
    /// Points all of whose lines are full.
    pub deep_points: PointSet,
}

impl Hyperplane {
    pub fn new(g: &IncidenceStructure, points: PointSet) -> Result<Self> {
        if !is_hyperplane(g, points) {
            return Err(Error::Structure(format!("{points:?} is not a hyperplane")));
        }
        let full: Vec<bool> = g.lines().iter().map(|l| l.is_subset(points)).collect();
        let max_degree = (0..g.num_points())
            .map(|p| g.lines_through(p).len())
            .max()
            .unwrap_or(0);
        let mut orders = vec![0; max_degree + 1];
        let mut deep_points = PointSet::EMPTY;
        for p in points {
            let through = g.lines_through(p);
            let order = through.iter().filter(|&&l| full[l]).count();
            orders[order] += 1;
            if order == through.len() {
                deep_points.insert(p);
            }
        }
        Ok(Self {
            points,
            pt_count: points.len(),
            full_line_count: full.iter().filter(|&&f| f).count(),
            orders,
            deep_points,
        })
    }

    /// Characteristic vector of the complement, a codeword of the line code.
    pub fn complement_vector(&self, n: usize) -> Gf2Vector {
        self.points.complement(n).to_vector(n)
    }
}

fn require_slim(g: &IncidenceStructure) -> Result<()> {
    if !g.lines().iter().all(|l| l.len() == 3) {
        return Err(Error::InvalidInput("geometry is not slim".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(())
}

/// Hyperplanes as complements of the nonzero vectors orthogonal to every
/// line, sorted by mask.
pub fn enumerate_code(g: &IncidenceStructure) -> Result<Vec<Hyperplane>> {
    require_slim(g)?;
    let n = g.num_points();
    let code = g.line_incidence_matrix().nullspace();
    let mut out = code
        .enumerate_nonzero()?
        .into_iter()
        .map(|v| Hyperplane::new(g, PointSet(v.bits()).complement(n)))
        .collect::<Result<Vec<_>>>()?;
    out.sort_by_key(|h| h.points);
    Ok(out)
}

/// Node budget for [`enumerate_search`].
pub const DEFAULT_SEARCH_LIMIT: u64 = 20_000_000;

/// Hyperplanes by backtracking over point membership, sorted by mask.
pub fn enumerate_search(g: &IncidenceStructure) -> Result<Vec<Hyperplane>> {
    enumerate_search_with_limit(g, DEFAULT_SEARCH_LIMIT)
}

pub fn enumerate_search_with_limit(
    g: &IncidenceStructure,
    node_limit: u64,
) -> Result<Vec<Hyperplane>> {
    require_slim(g)?;
    let mut s = Search {
        g,
        found: Vec::new(),
        nodes: 0,
        node_limit,
    };
    s.branch(PointSet::EMPTY, PointSet::EMPTY)?;
    let mut out = s
        .found
        .into_iter()
        .map(|p| Hyperplane::new(g, p))
        .collect::<Result<Vec<_>>>()?;
    out.sort_by_key(|h| h.points);
    Ok(out)
}

struct Search<'a> {
    g: &'a IncidenceStructure,
    found: Vec<PointSet>,
    nodes: u64,
    node_limit: u64,
}

impl Search<'_> {
    /// Applies forced moves until stable; `None` on a violated line.
    ///
    /// A line must end with exactly one point or all points inside. One
    /// outside point forces exactly one inside; two inside points force all.
    fn propagate(
        &self,
        mut inside: PointSet,
        mut outside: PointSet,
    ) -> Option<(PointSet, PointSet)> {
        loop {
            let mut changed = false;
            for &l in self.g.lines() {
                let i = l.intersection(inside).len();
                let o = l.intersection(outside).len();
                let open = l.difference(inside).difference(outside);
                if o >= 1 {
                    match i {
                        0 if open.is_empty() => return None,
                        0 if open.len() == 1 => {
                            inside = inside.union(open);
                            changed = true;
                        }
                        1 if !open.is_empty() => {
                            outside = outside.union(open);
                            changed = true;
                        }
                        0 | 1 => {}
                        _ => return None,
                    }
                } else if i >= 2 && !open.is_empty() {
                    inside = inside.union(open);
                    changed = true;
                }
            }
            if !changed {
                return Some((inside, outside));
            }
        }
    }

    fn branch(&mut self, inside: PointSet, outside: PointSet) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.node_limit {
            return Err(Error::Capacity(format!(
                "hyperplane search exceeded {} nodes",
                self.node_limit
            )));
        }
        let Some((inside, outside)) = self.propagate(inside, outside) else {
            return Ok(());
        };
        let decided = inside.union(outside);
        // branch on the open line with the most decided points
        let pick = self
            .g
            .lines()
            .iter()
            .filter(|l| !l.is_subset(decided))
            .max_by_key(|l| (l.intersection(decided).len(), std::cmp::Reverse(l.mask())));
        match pick {
            None => {
                if inside != self.g.points() {
                    self.found.push(inside);
                }
                Ok(())
            }
            Some(l) => {
                let p = l.difference(decided).first().unwrap();
                let bit = PointSet::singleton(p);
                self.branch(inside.union(bit), outside)?;
                self.branch(inside, outside.union(bit))
            }
        }
    }
}

/// How a hyperplane meets a quad.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QuadRelation {
    Deep,
    /// Intersection is `x^⊥ ∩ Q` for the witness `x`.
    Singular(usize),
    Subquadrangular,
    Ovoidal,
}

/// A quad prepared for repeated relation queries.
#[derive(Clone, Debug)]
pub struct QuadProbe {
    pub points: PointSet,
    lines: Vec<PointSet>,
    order: (usize, usize),
}

impl QuadProbe {
    pub fn new(g: &IncidenceStructure, points: PointSet) -> Result<Self> {
        let (sub, _) = g.induced_substructure(points)?;
        let order =
            gq_order(&sub).ok_or_else(|| Error::Structure(format!("{points:?} is not a quad")))?;
        let lines = g
            .lines()
            .iter()
            .copied()
            .filter(|l| l.is_subset(points))
            .collect();
        Ok(Self {
            points,
            lines,
            order,
        })
    }

    /// Tries every case independently and insists that exactly one holds.
    pub fn relation(&self, g: &IncidenceStructure, h: PointSet) -> Result<QuadRelation> {
        let x = h.intersection(self.points);
        let mut cases = Vec::with_capacity(1);
        if x == self.points {
            cases.push(QuadRelation::Deep);
        }
        if let Some(w) = self
            .points
            .iter()
            .find(|&w| g.perp(w).intersection(self.points) == x)
        {
            cases.push(QuadRelation::Singular(w));
        }
        if x != self.points && !x.is_empty() {
            let (sub, _) = g.induced_substructure(x)?;
            if matches!(gq_order(&sub), Some((s, t)) if s == self.order.0 && t < self.order.1) {
                cases.push(QuadRelation::Subquadrangular);
            }
        }
        if self.lines.iter().all(|l| l.intersection(x).len() == 1) {
            cases.push(QuadRelation::Ovoidal);
        }
        match cases.as_slice() {
            [one] => Ok(*one),
            _ => Err(Error::Structure(format!(
                "quad {:?} meets {h:?} in {x:?}, matching {cases:?}",
                self.points
            ))),
        }
    }
}

pub fn quad_relation(g: &IncidenceStructure, h: PointSet, quad: PointSet) -> Result<QuadRelation> {
    QuadProbe::new(g, quad)?.relation(g, h)
}

/// Every invariant of one hexagon hyperplane used by the type table.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Signature {
    pub pt: usize,
    pub ln: usize,
    pub orders: Vec<usize>,
    /// Grid-quads that are deep, singular, ovoidal.
    pub grid_profile: [usize; 3],
    /// Grid-quads met subquadrangularly; always zero.
    pub grid_subquadrangular: usize,
    /// Doily-quads that are deep, singular, ovoidal, subquadrangular.
    pub doily_profile: [usize; 4],
}

impl Signature {
    pub fn family(&self) -> u8 {
        if self.doily_profile[0] >= 1 {
            1
        } else {
            2
        }
    }
}

/// Computes signatures of hexagon hyperplanes.
pub struct Analyzer<'a> {
    pub hex: &'a Hexagon,
    probes: Vec<(QuadKind, QuadProbe)>,
}

impl<'a> Analyzer<'a> {
    pub fn new(hex: &'a Hexagon) -> Result<Self> {
        let probes = hex
            .quads
            .iter()
            .map(|q| Ok((q.kind, QuadProbe::new(&hex.geometry, q.points)?)))
            .collect::<Result<_>>()?;
        Ok(Self { hex, probes })
    }

    /// Relation to each quad, in the order of `Hexagon::quads`.
    pub fn relations(&self, h: PointSet) -> Result<Vec<QuadRelation>> {
        self.probes
            .iter()
            .map(|(_, p)| p.relation(&self.hex.geometry, h))
            .collect()
    }

    pub fn signature(&self, h: &Hyperplane) -> Result<Signature> {
        let mut grid_profile = [0; 3];
        let mut grid_subquadrangular = 0;
        let mut doily_profile = [0; 4];
        for ((kind, _), rel) in self.probes.iter().zip(self.relations(h.points)?) {
            match (kind, rel) {
                (QuadKind::Grid, QuadRelation::Deep) => grid_profile[0] += 1,
                (QuadKind::Grid, QuadRelation::Singular(_)) => grid_profile[1] += 1,
                (QuadKind::Grid, QuadRelation::Ovoidal) => grid_profile[2] += 1,
                (QuadKind::Grid, QuadRelation::Subquadrangular) => grid_subquadrangular += 1,
                (QuadKind::Doily, QuadRelation::Deep) => doily_profile[0] += 1,
                (QuadKind::Doily, QuadRelation::Singular(_)) => doily_profile[1] += 1,
                (QuadKind::Doily, QuadRelation::Ovoidal) => doily_profile[2] += 1,
                (QuadKind::Doily, QuadRelation::Subquadrangular) => doily_profile[3] += 1,
            }
        }
        Ok(Signature {
            pt: h.pt_count,
            ln: h.full_line_count,
            orders: h.orders.clone(),
            grid_profile,
            grid_subquadrangular,
            doily_profile,
        })
    }
}

/// One hyperplane type: a distinct signature and how many hyperplanes carry it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeRow {
    pub label: String,
    pub family: u8,
    pub signature: Signature,
    pub count: usize,
}

/// Hexagon hyperplanes grouped into types by signature.
///
/// Types are labelled `H1, H2, ...` after sorting by family, then point
/// count descending, line count descending, and copy count ascending.
#[derive(Clone, Debug)]
pub struct Census {
    pub hyperplanes: Vec<Hyperplane>,
    pub signatures: Vec<Signature>,
    pub rows: Vec<TypeRow>,
    /// Row index for each hyperplane.
    pub assignment: Vec<usize>,
    by_signature: HashMap<Signature, usize>,
}

impl Census {
    pub fn build(analyzer: &Analyzer, hyperplanes: Vec<Hyperplane>) -> Result<Self> {
        let signatures = hyperplanes
            .par_iter()
            .map(|h| analyzer.signature(h))
            .collect::<Result<Vec<_>>>()?;
        let mut counts: BTreeMap<&Signature, usize> = BTreeMap::new();
        for s in &signatures {
            *counts.entry(s).or_default() += 1;
        }
        let mut rows: Vec<TypeRow> = counts
            .into_iter()
            .map(|(s, count)| TypeRow {
                label: String::new(),
                family: s.family(),
                signature: s.clone(),
                count,
            })
            .collect();
        rows.sort_by(|a, b| {
            (
                a.family,
                std::cmp::Reverse(a.signature.pt),
                std::cmp::Reverse(a.signature.ln),
                a.count,
            )
                .cmp(&(
                    b.family,
                    std::cmp::Reverse(b.signature.pt),
                    std::cmp::Reverse(b.signature.ln),
                    b.count,
                ))
                .then_with(|| a.signature.cmp(&b.signature))
        });
        for (i, r) in rows.iter_mut().enumerate() {
            r.label = format!("H{}", i + 1);
        }
        let by_signature: HashMap<Signature, usize> = rows
            .iter()
            .enumerate()
            .map(|(i, r)| (r.signature.clone(), i))
            .collect();
        let assignment = signatures.iter().map(|s| by_signature[s]).collect();
        Ok(Self {
            hyperplanes,
            signatures,
            rows,
            assignment,
            by_signature,
        })
    }

    pub fn classify(&self, sig: &Signature) -> Result<&TypeRow> {
        self.by_signature
            .get(sig)
            .map(|&i| &self.rows[i])
            .ok_or_else(|| Error::OrphanSignature(format!("{sig:?}")))
    }

    pub fn row(&self, label: &str) -> Option<&TypeRow> {
        self.rows.iter().find(|r| r.label == label)
    }

    pub fn label_of(&self, i: usize) -> &str {
        &self.rows[self.assignment[i]].label
    }

    /// Hyperplanes whose type label is one of `labels`.
    pub fn of_types<'s>(&'s self, labels: &'s [&str]) -> impl Iterator<Item = &'s Hyperplane> + 's {
        self.hyperplanes
            .iter()
            .enumerate()
            .filter(move |(i, _)| labels.contains(&self.label_of(*i)))
            .map(|(_, h)| h)
    }
}

/// The three kinds of doily hyperplane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DoilyKind {
    /// `x^⊥` for the recorded point.
    Perp(usize),
    Grid,
    Ovoid,
}

impl DoilyKind {
    pub fn name(self) -> &'static str {
        match self {
            DoilyKind::Perp(_) => "perp",
            DoilyKind::Grid => "grid",
            DoilyKind::Ovoid => "ovoid",
        }
    }
}

/// Classifies a doily hyperplane structurally; exactly one kind must apply.
pub fn classify_doily_hyperplane(doily: &IncidenceStructure, h: PointSet) -> Result<DoilyKind> {
    if !is_hyperplane(doily, h) {
        return Err(Error::Structure(format!("{h:?} is not a doily hyperplane")));
    }
    let mut kinds = Vec::new();
    if let Some(x) = (0..doily.num_points()).find(|&x| doily.perp(x) == h) {
        kinds.push(DoilyKind::Perp(x));
    }
    let (sub, _) = doily.induced_substructure(h)?;
    if sub.validate_gq(2, 1).is_ok() {
        kinds.push(DoilyKind::Grid);
    }
    if doily.lines().iter().all(|l| l.intersection(h).len() == 1) {
        kinds.push(DoilyKind::Ovoid);
    }
    match kinds.as_slice() {
        [k] => Ok(*k),
        _ => Err(Error::Structure(format!(
            "doily hyperplane {h:?} matches {kinds:?}"
        ))),
    }
}

/// Points at non-maximal distance from `x`.
pub fn singular_hyperplane(g: &IncidenceStructure, x: usize) -> Result<Hyperplane> {
    let d = g.diameter().ok_or(Error::Disconnected)?;
    let pts = (0..g.num_points())
        .filter(|&y| g.dist(x, y).unwrap() < d)
        .collect();
    Hyperplane::new(g, pts)
}

/// Intersection of a hexagon hyperplane with one doily fiber.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Trace {
    Full,
    Hyperplane(PointSet),
}

/// The three fiber traces of a hexagon hyperplane, in base doily indices.
pub fn doily_traces(hex: &Hexagon, h: PointSet) -> Result<[Trace; 3]> {
    let mut out = [Trace::Full; 3];
    for (k, slot) in out.iter_mut().enumerate() {
        let t = Hexagon::trace(h, k);
        *slot = if t == hex.doily.points() {
            Trace::Full
        } else if is_hyperplane(&hex.doily, t) {
            Trace::Hyperplane(t)
        } else {
            return Err(Error::Structure(format!(
                "fiber {k} trace {t:?} is not a hyperplane"
            )));
        };
    }
    Ok(out)
}

/// Dimension of the span of the complement vectors of `hs`.
pub fn complement_span_dimension<'h>(
    n: usize,
    hs: impl IntoIterator<Item = &'h Hyperplane>,
) -> usize {
    let v: Vec<Gf2Vector> = hs.into_iter().map(|h| h.complement_vector(n)).collect();
    span_dimension(&v)
}

/// Counts the sub-hexagon hyperplanes obtained as `h ∩ subhex` for some `h`
/// in `sources`.
pub fn restriction_coverage<'h>(
    sub: &SubHexagon,
    sub_hyperplanes: &[Hyperplane],
    sources: impl IntoIterator<Item = &'h Hyperplane>,
) -> usize {
    let restricted: std::collections::HashSet<PointSet> = sources
        .into_iter()
        .map(|h| sub.restrict(h.points))
        .collect();
    sub_hyperplanes
        .iter()
        .filter(|h| restricted.contains(&h.points))
        .count()
}

/// Connected components of the collinearity graph of `g` restricted to
/// `pts`, ordered by smallest point.
pub fn collinearity_components(g: &IncidenceStructure, pts: PointSet) -> Vec<PointSet> {
    let mut seen = PointSet::EMPTY;
    let mut out = Vec::new();
    for p in pts {
        if seen.contains(p) {
            continue;
        }
        let mut comp = PointSet::singleton(p);
        let mut frontier = comp;
        while !frontier.is_empty() {
            let next = frontier
                .iter()
                .fold(PointSet::EMPTY, |acc, u| acc.union(g.neighbours(u)))
                .intersection(pts)
                .difference(comp);
            comp = comp.union(next);
            frontier = next;
        }
        seen = seen.union(comp);
        out.push(comp);
    }
    out
}

/// Whether the collinearity graph of `g` on `pts` is K3,3.
fn is_k33(g: &IncidenceStructure, pts: PointSet) -> bool {
    let Some(v) = pts.first() else { return false };
    let side_b = g.neighbours(v).intersection(pts);
    let side_a = pts.difference(side_b);
    side_a.len() == 3
        && side_b.len() == 3
        && side_a
            .iter()
            .all(|a| g.neighbours(a).intersection(pts) == side_b)
        && side_b
            .iter()
            .all(|b| g.neighbours(b).intersection(pts) == side_a)
}

/// The 12 points off an H1-type hyperplane must form exactly two connected
/// components under the collinearity of `g`, each a K3,3.
pub fn h1_complement_check(g: &IncidenceStructure, h: PointSet) -> Validation {
    let comp = h.complement(g.num_points());
    if comp.len() != 12 {
        return Err(Violation(format!("complement has {} points", comp.len())));
    }
    let components = collinearity_components(g, comp);
    if components.len() != 2 {
        let degrees: BTreeMap<usize, usize> = comp.iter().fold(BTreeMap::new(), |mut m, p| {
            *m.entry(g.neighbours(p).intersection(comp).len())
                .or_default() += 1;
            m
        });
        return Err(Violation(format!(
            "complement collinearity graph has {} component(s), degree histogram {degrees:?}",
            components.len()
        )));
    }
    for c in components {
        if !is_k33(g, c) {
            return Err(Violation(format!("component {c:?} is not K3,3")));
        }
    }
    Ok(())
}

/// The complement of an H1-type hyperplane, split by doily-quad: it misses
/// the deep doily-quad and meets each of the other two in a dual grid
/// GQ(1,2), whose lines are the traces of that quad's lines. Type-one lines
/// pair the two dual grids point for point.
pub fn h1_complement_dual_grids(hex: &Hexagon, h: PointSet) -> Validation {
    let g = &hex.geometry;
    let comp = h.complement(g.num_points());
    let mut pieces = Vec::new();
    for q in hex.doily_quads() {
        let piece = comp.intersection(q.points);
        if piece.is_empty() {
            continue;
        }
        let quad_lines: Vec<PointSet> = g
            .lines()
            .iter()
            .copied()
            .filter(|l| l.is_subset(q.points))
            .collect();
        let map: Vec<usize> = piece.iter().collect();
        let lines = quad_lines
            .iter()
            .map(|l| l.intersection(piece))
            .filter(|t| t.len() >= 2)
            .map(|t| t.iter().map(|p| map.binary_search(&p).unwrap()).collect())
            .collect();
        let dual =
            IncidenceStructure::new(map.len(), lines).map_err(|e| Violation(e.to_string()))?;
        dual.validate_gq(1, 2)?;
        if !(0..dual.num_points()).all(|p| dual.neighbours(p).len() == 3) {
            return Err(Violation(format!("piece {piece:?} is not K3,3")));
        }
        pieces.push(piece);
    }
    if pieces.len() != 2 {
        return Err(Violation(format!(
            "complement meets {} doily-quads",
            pieces.len()
        )));
    }
    let (a, b) = (pieces[0], pieces[1]);
    let matched = a.iter().all(|p| g.neighbours(p).intersection(b).len() == 1);
    if !matched {
        return Err(Violation(
            "dual grids are not paired by type-one lines".into(),
        ));
    }
    Ok(())
}
