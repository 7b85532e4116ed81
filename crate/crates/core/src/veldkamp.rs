//! Veldkamp spaces: hyperplanes as points, and lines `{H', H'', H'''}` with
//! `H''' = complement(H' Δ H'')`.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperplanes::{classify_doily_hyperplane, is_hyperplane, DoilyKind};
use crate::incidence::IncidenceStructure;
use crate::pointset::PointSet;

/// The third hyperplane on the Veldkamp line through `a` and `b`.
pub fn third_hyperplane(g: &IncidenceStructure, a: PointSet, b: PointSet) -> Result<PointSet> {
    if a == b {
        return Err(Error::InvalidInput(
            "a Veldkamp line needs two distinct hyperplanes".into(),
        ));
    }
    let c = a.symmetric_difference(b).complement(g.num_points());
    if !is_hyperplane(g, c) {
        return Err(Error::Structure(format!(
            "third member {c:?} of {a:?}, {b:?} is not a hyperplane"
        )));
    }
    Ok(c)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VeldkampLine {
    /// Ascending hyperplane ids.
    pub members: [u32; 3],
    /// Points common to all three members.
    pub core: PointSet,
}

#[derive(Clone, Debug)]
pub struct VeldkampSpace {
    pub points: Vec<PointSet>,
    /// Sorted by member triple.
    pub lines: Vec<VeldkampLine>,
}

/// Number of points and lines of PG(d-1, 2).
pub fn projective_counts(d: u32) -> (u64, u64) {
    let points = (1u64 << d) - 1;
    let lines = if d < 2 {
        0
    } else {
        points * ((1u64 << (d - 1)) - 1) / 3
    };
    (points, lines)
}

/// All Veldkamp lines over a complete hyperplane list.
///
/// Each unordered pair is closed under [`third_hyperplane`]; a line is kept
/// from the pair of its two smallest ids. The pairwise intersections of every
/// line are checked to agree.
pub fn build_veldkamp(g: &IncidenceStructure, hyperplanes: &[PointSet]) -> Result<VeldkampSpace> {
    let index: HashMap<PointSet, u32> = hyperplanes
        .iter()
        .enumerate()
        .map(|(i, &h)| (h, i as u32))
        .collect();
    if index.len() != hyperplanes.len() {
        return Err(Error::InvalidInput("duplicate hyperplanes".into()));
    }
    let n = g.num_points();
    let mut lines: Vec<VeldkampLine> = (0..hyperplanes.len())
        .into_par_iter()
        .map(|i| {
            let a = hyperplanes[i];
            let mut found = Vec::new();
            for (j, &b) in hyperplanes.iter().enumerate().skip(i + 1) {
                let c = a.symmetric_difference(b).complement(n);
                let &k = index.get(&c).ok_or_else(|| {
                    Error::Structure(format!("pair ({i}, {j}) closes on a non-member {c:?}"))
                })?;
                if (k as usize) <= j {
                    continue;
                }
                let core = a.intersection(b);
                if a.intersection(c) != core || b.intersection(c) != core {
                    return Err(Error::Structure(format!(
                        "line ({i}, {j}, {k}) has unequal pairwise intersections"
                    )));
                }
                found.push(VeldkampLine {
                    members: [i as u32, j as u32, k],
                    core,
                });
            }
            Ok(found)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    lines.sort_unstable();
    Ok(VeldkampSpace {
        points: hyperplanes.to_vec(),
        lines,
    })
}

/// Kinds of Veldkamp line of the doily, named by their core.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CoreType {
    /// Five points: two concurrent lines.
    I,
    /// Three points of one line.
    II,
    /// Triad with three centers.
    III,
    /// Triad with one center.
    IV,
    /// A single point.
    V,
}

impl CoreType {
    pub const ALL: [CoreType; 5] = [
        CoreType::I,
        CoreType::II,
        CoreType::III,
        CoreType::IV,
        CoreType::V,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CoreType::I => "I",
            CoreType::II => "II",
            CoreType::III => "III",
            CoreType::IV => "IV",
            CoreType::V => "V",
        }
    }

    pub fn core_name(self) -> &'static str {
        match self {
            CoreType::I => "Pentad",
            CoreType::II => "Collinear Triple",
            CoreType::III => "Tricentric Triad",
            CoreType::IV => "Unicentric Triad",
            CoreType::V => "Single Point",
        }
    }
}

/// Hyperplane kinds present on one line.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Composition {
    pub perps: usize,
    pub ovoids: usize,
    pub grids: usize,
}

/// Core type and composition of a doily Veldkamp line, from structure alone.
pub fn classify_veldkamp_line(
    doily: &IncidenceStructure,
    space: &VeldkampSpace,
    line: &VeldkampLine,
) -> Result<(CoreType, Composition)> {
    let core = line.core;
    let pts: Vec<usize> = core.iter().collect();
    let core_type = match pts.len() {
        5 => CoreType::I,
        1 => CoreType::V,
        3 => {
            let pairs = [(pts[0], pts[1]), (pts[0], pts[2]), (pts[1], pts[2])];
            let collinear = pairs
                .iter()
                .filter(|&&(a, b)| doily.collinear(a, b))
                .count();
            let on_a_line = doily.lines().iter().any(|l| core.is_subset(*l));
            if collinear == 3 && on_a_line {
                CoreType::II
            } else if collinear == 0 {
                let centers = pts.iter().fold(doily.points(), |acc, &p| {
                    acc.intersection(doily.neighbours(p))
                });
                match centers.len() {
                    3 => CoreType::III,
                    1 => CoreType::IV,
                    k => {
                        return Err(Error::Structure(format!(
                            "core triad {core:?} has {k} centers"
                        )))
                    }
                }
            } else {
                return Err(Error::Structure(format!(
                    "core {core:?} is neither a line nor a triad"
                )));
            }
        }
        k => return Err(Error::Structure(format!("core {core:?} has {k} points"))),
    };
    let mut comp = Composition::default();
    for &m in &line.members {
        match classify_doily_hyperplane(doily, space.points[m as usize])? {
            DoilyKind::Perp(_) => comp.perps += 1,
            DoilyKind::Ovoid => comp.ovoids += 1,
            DoilyKind::Grid => comp.grids += 1,
        }
    }
    Ok((core_type, comp))
}

/// One row of the doily line table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineTypeRow {
    pub core_type: CoreType,
    pub composition: Composition,
    pub count: usize,
}

/// Classifies every doily Veldkamp line; all lines sharing a core type must
/// share a composition.
pub fn doily_line_table(
    doily: &IncidenceStructure,
    space: &VeldkampSpace,
) -> Result<Vec<LineTypeRow>> {
    let mut rows: BTreeMap<CoreType, LineTypeRow> = BTreeMap::new();
    for line in &space.lines {
        let (core_type, composition) = classify_veldkamp_line(doily, space, line)?;
        let row = rows.entry(core_type).or_insert(LineTypeRow {
            core_type,
            composition,
            count: 0,
        });
        if row.composition != composition {
            return Err(Error::Structure(format!(
                "type {} lines with compositions {:?} and {:?}",
                core_type.name(),
                row.composition,
                composition
            )));
        }
        row.count += 1;
    }
    Ok(rows.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometries::{doily, doily_ovoids};
    use crate::hyperplanes::enumerate_code;

    fn doily_space() -> (IncidenceStructure, VeldkampSpace) {
        let (g, _) = doily();
        let hs: Vec<PointSet> = enumerate_code(&g)
            .unwrap()
            .iter()
            .map(|h| h.points)
            .collect();
        let v = build_veldkamp(&g, &hs).unwrap();
        (g, v)
    }

    #[test]
    fn two_ovoids_give_a_perp() {
        let (g, m) = doily();
        let ov = doily_ovoids();
        let c = third_hyperplane(&g, ov[0], ov[1]).unwrap();
        assert_eq!(c, PointSet::from_points([0, 9, 10, 11, 12, 13, 14]));
        assert_eq!(c, g.perp(m.duad_index(1, 2).unwrap()));
        assert_eq!(third_hyperplane(&g, ov[0], c).unwrap(), ov[1]);
        assert!(third_hyperplane(&g, ov[0], ov[0]).is_err());
    }

    #[test]
    fn projective_identities() {
        assert_eq!(projective_counts(5), (31, 155));
        assert_eq!(projective_counts(8), (255, 10795));
        assert_eq!(projective_counts(10), (1023, 174251));
        assert_eq!(projective_counts(1), (1, 0));
    }

    #[test]
    fn doily_space_shape() {
        let (_, v) = doily_space();
        assert_eq!(v.points.len(), 31);
        assert_eq!(v.lines.len(), 155);
        // every pair of points lies on exactly one line
        let mut pair_count = vec![0u8; 31 * 31];
        for l in &v.lines {
            let [a, b, c] = l.members.map(|x| x as usize);
            for (x, y) in [(a, b), (a, c), (b, c)] {
                pair_count[x * 31 + y] += 1;
            }
        }
        for x in 0..31 {
            for y in (x + 1)..31 {
                assert_eq!(pair_count[x * 31 + y], 1);
            }
        }
    }

    #[test]
    fn doily_line_census() {
        let (g, v) = doily_space();
        let table = doily_line_table(&g, &v).unwrap();
        let counts: Vec<(CoreType, usize)> = table.iter().map(|r| (r.core_type, r.count)).collect();
        assert_eq!(
            counts,
            vec![
                (CoreType::I, 45),
                (CoreType::II, 15),
                (CoreType::III, 20),
                (CoreType::IV, 60),
                (CoreType::V, 15)
            ]
        );
        let ii = &table[1];
        assert_eq!(
            ii.composition,
            Composition {
                perps: 3,
                ovoids: 0,
                grids: 0
            }
        );
    }

    #[test]
    fn single_point_core_from_two_ovoids() {
        let (g, v) = doily_space();
        let ov = doily_ovoids();
        let id = |h| v.points.iter().position(|&p| p == h).unwrap() as u32;
        let line = v
            .lines
            .iter()
            .find(|l| l.members.contains(&id(ov[0])) && l.members.contains(&id(ov[1])))
            .unwrap();
        assert_eq!(line.core, PointSet::singleton(0));
        let (t, comp) = classify_veldkamp_line(&g, &v, line).unwrap();
        assert_eq!(t, CoreType::V);
        assert_eq!(
            comp,
            Composition {
                perps: 1,
                ovoids: 2,
                grids: 0
            }
        );
    }
}
