//! Isomorphism and automorphism search for small incidence structures.
//!
//! Points are first coloured by local invariants (number of lines through
//! the point, the sorted sizes of those lines, and the number of points at
//! each distance). Backtracking then assigns images in BFS order, requiring
//! equal colours and preserved distances to every earlier point; a line is
//! checked the moment all of its points have images.

use std::collections::HashSet;

use crate::incidence::IncidenceStructure;
use crate::pointset::PointSet;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
struct PointColour {
    degree: usize,
    line_sizes: Vec<usize>,
    distance_profile: Vec<usize>,
}

fn colours(g: &IncidenceStructure) -> Vec<PointColour> {
    let n = g.num_points();
    (0..n)
        .map(|p| {
            let mut line_sizes: Vec<usize> = g
                .lines_through(p)
                .iter()
                .map(|&l| g.line(l).len())
                .collect();
            line_sizes.sort_unstable();
            // last slot counts unreachable points
            let mut distance_profile = vec![0; n + 1];
            for q in 0..n {
                distance_profile[g.dist(p, q).unwrap_or(n)] += 1;
            }
            PointColour {
                degree: line_sizes.len(),
                line_sizes,
                distance_profile,
            }
        })
        .collect()
}

/// BFS order across all components, lowest index first.
fn search_order(g: &IncidenceStructure) -> Vec<usize> {
    let n = g.num_points();
    let mut seen = PointSet::EMPTY;
    let mut order = Vec::with_capacity(n);
    for start in 0..n {
        if seen.contains(start) {
            continue;
        }
        seen.insert(start);
        let mut head = order.len();
        order.push(start);
        while head < order.len() {
            let u = order[head];
            head += 1;
            for v in g.neighbours(u) {
                if !seen.contains(v) {
                    seen.insert(v);
                    order.push(v);
                }
            }
        }
    }
    order
}

struct Search<'a> {
    src: &'a IncidenceStructure,
    dst: &'a IncidenceStructure,
    order: Vec<usize>,
    src_colour: Vec<PointColour>,
    dst_colour: Vec<PointColour>,
    /// Lines of `src` whose last point (in search order) sits at each position.
    completes: Vec<Vec<PointSet>>,
    dst_lines: HashSet<u64>,
    image: Vec<usize>,
    used: PointSet,
}

impl<'a> Search<'a> {
    fn new(src: &'a IncidenceStructure, dst: &'a IncidenceStructure) -> Option<Self> {
        if src.num_points() != dst.num_points() || src.num_lines() != dst.num_lines() {
            return None;
        }
        let order = search_order(src);
        let mut position = vec![0; src.num_points()];
        for (i, &p) in order.iter().enumerate() {
            position[p] = i;
        }
        let mut completes = vec![Vec::new(); order.len()];
        for &l in src.lines() {
            let last = l.iter().map(|p| position[p]).max().unwrap();
            completes[last].push(l);
        }
        let src_colour = colours(src);
        let dst_colour = colours(dst);
        let mut a = src_colour.clone();
        let mut b = dst_colour.clone();
        a.sort();
        b.sort();
        if a != b {
            return None;
        }
        Some(Self {
            src,
            dst,
            order,
            src_colour,
            dst_colour,
            completes,
            dst_lines: dst.lines().iter().map(|l| l.mask()).collect(),
            image: vec![usize::MAX; src.num_points()],
            used: PointSet::EMPTY,
        })
    }

    fn candidate_ok(&self, depth: usize, a: usize, b: usize) -> bool {
        if self.used.contains(b) || self.src_colour[a] != self.dst_colour[b] {
            return false;
        }
        self.order[..depth]
            .iter()
            .all(|&c| self.src.dist(a, c) == self.dst.dist(b, self.image[c]))
    }

    fn lines_ok(&self, depth: usize) -> bool {
        self.completes[depth].iter().all(|l| {
            let img: PointSet = l.iter().map(|p| self.image[p]).collect();
            self.dst_lines.contains(&img.mask())
        })
    }

    /// Visits every complete isomorphism; the visitor returns `false` to stop.
    fn run(&mut self, depth: usize, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if depth == self.order.len() {
            return visit(&self.image);
        }
        let a = self.order[depth];
        for b in 0..self.dst.num_points() {
            if !self.candidate_ok(depth, a, b) {
                continue;
            }
            self.image[a] = b;
            self.used.insert(b);
            let keep_going = !self.lines_ok(depth) || self.run(depth + 1, visit);
            self.used = self.used.difference(PointSet::singleton(b));
            self.image[a] = usize::MAX;
            if !keep_going {
                return false;
            }
        }
        true
    }
}

/// Number of point permutations of `g` that map lines onto lines.
pub fn automorphism_count(g: &IncidenceStructure) -> u64 {
    let mut count = 0u64;
    if let Some(mut s) = Search::new(g, g) {
        s.run(0, &mut |_| {
            count += 1;
            true
        });
    }
    count
}

/// A point bijection `src -> dst` carrying lines onto lines, if one exists.
pub fn find_isomorphism(src: &IncidenceStructure, dst: &IncidenceStructure) -> Option<Vec<usize>> {
    let mut found = None;
    if let Some(mut s) = Search::new(src, dst) {
        s.run(0, &mut |img| {
            found = Some(img.to_vec());
            false
        });
    }
    found
}
