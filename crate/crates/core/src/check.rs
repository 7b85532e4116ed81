//! The acceptance run: every numbered criterion evaluated against an
//! [`Expected`] table, producing named pass/fail results.
//!
//! Result payloads are deterministic. Wall-clock timings are kept apart in
//! [`CheckRun::timings`]; time-budget checks only record whether the budget
//! held.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Display;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::automorphism::{automorphism_count, find_isomorphism};
use crate::error::Result;
use crate::expected::Expected;
use crate::geometries::{
    discover_quads, doily, doily_grids, grid, hexagon, line3, sub_hexagon, Hexagon, LineType,
    SubHexagon,
};
use crate::hyperplanes::{
    classify_doily_hyperplane, complement_span_dimension, doily_traces, enumerate_code,
    enumerate_search, h1_complement_check, h1_complement_dual_grids, restriction_coverage,
    singular_hyperplane, Analyzer, Census, DoilyKind, Hyperplane, Trace,
};
use crate::incidence::IncidenceStructure;
use crate::pointset::PointSet;
use crate::veldkamp::{
    build_veldkamp, classify_veldkamp_line, doily_line_table, projective_counts, LineTypeRow,
    VeldkampSpace,
};

/// Number of acceptance criteria evaluated by [`run_checks`].
pub const CRITERIA: u8 = 13;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub criterion: u8,
    pub name: String,
    pub passed: bool,
    pub expected: String,
    pub actual: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct CheckOptions {
    /// Skip the hexagon Veldkamp line build and the hexagon automorphism count.
    pub quick: bool,
}

#[derive(Clone, Debug, Default)]
pub struct CheckRun {
    pub results: Vec<CheckResult>,
    /// Wall-clock time per criterion.
    pub timings: Vec<(u8, Duration)>,
}

impl CheckRun {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.results.iter().filter(|r| !r.passed)
    }

    pub fn criterion(&self, n: u8) -> impl Iterator<Item = &CheckResult> {
        self.results.iter().filter(move |r| r.criterion == n)
    }

    pub fn criterion_passed(&self, n: u8) -> bool {
        self.criterion(n).all(|r| r.passed)
    }
}

/// Time budget per criterion, in seconds.
pub fn time_budget(criterion: u8) -> f64 {
    match criterion {
        1 | 2 | 3 | 7 | 8 | 10 => 1.0,
        4 => 60.0,
        5 => 30.0,
        6 | 11 => 5.0,
        9 => 10.0,
        12 | 13 => 60.0,
        _ => f64::INFINITY,
    }
}

struct Collector<'a> {
    criterion: u8,
    out: &'a mut Vec<CheckResult>,
}

impl Collector<'_> {
    fn eq<T: PartialEq + Display>(&mut self, name: impl Into<String>, expected: T, actual: T) {
        self.out.push(CheckResult {
            criterion: self.criterion,
            name: name.into(),
            passed: expected == actual,
            expected: expected.to_string(),
            actual: actual.to_string(),
            note: None,
        });
    }

    fn list<T: PartialEq + std::fmt::Debug>(
        &mut self,
        name: impl Into<String>,
        expected: &T,
        actual: &T,
    ) {
        self.out.push(CheckResult {
            criterion: self.criterion,
            name: name.into(),
            passed: expected == actual,
            expected: format!("{expected:?}"),
            actual: format!("{actual:?}"),
            note: None,
        });
    }

    fn holds(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        let detail = detail.into();
        self.out.push(CheckResult {
            criterion: self.criterion,
            name: name.into(),
            passed: ok,
            expected: "holds".into(),
            actual: if ok { "holds".into() } else { detail },
            note: None,
        });
    }

    fn note(&mut self, note: String) {
        if let Some(last) = self.out.last_mut() {
            last.note = Some(note);
        }
    }

    fn error(&mut self, name: &str, err: &str) {
        self.holds(format!("{name}.computed"), false, err.to_string());
    }

    fn timed(&mut self, name: &str, elapsed: Duration, budget: f64) {
        let ok = elapsed.as_secs_f64() < budget;
        self.out.push(CheckResult {
            criterion: self.criterion,
            name: name.into(),
            passed: ok,
            expected: format!("< {budget} s"),
            actual: if ok {
                "within budget".into()
            } else {
                "over budget".into()
            },
            note: None,
        });
    }
}

type Lazy<T> = OnceLock<Result<T, String>>;

fn lazy<T>(cell: &Lazy<T>, f: impl FnOnce() -> Result<T>) -> Result<&T, String> {
    cell.get_or_init(|| f().map_err(|e| e.to_string()))
        .as_ref()
        .map_err(Clone::clone)
}

fn masks(hs: &[Hyperplane]) -> Vec<PointSet> {
    hs.iter().map(|h| h.points).collect()
}

/// Shared intermediate results, computed on first use.
struct Context {
    hex: Hexagon,
    doily_hyperplanes: Lazy<Vec<Hyperplane>>,
    doily_space: Lazy<VeldkampSpace>,
    doily_table: Lazy<Vec<LineTypeRow>>,
    hex_code: Lazy<Vec<Hyperplane>>,
    census: Lazy<Census>,
    subhexes: Lazy<Vec<(SubHexagon, Vec<Hyperplane>)>>,
}

impl Context {
    fn new() -> Self {
        Self {
            hex: hexagon(),
            doily_hyperplanes: OnceLock::new(),
            doily_space: OnceLock::new(),
            doily_table: OnceLock::new(),
            hex_code: OnceLock::new(),
            census: OnceLock::new(),
            subhexes: OnceLock::new(),
        }
    }

    fn doily_hyperplanes(&self) -> Result<&Vec<Hyperplane>, String> {
        lazy(&self.doily_hyperplanes, || enumerate_code(&self.hex.doily))
    }

    fn doily_space(&self) -> Result<&VeldkampSpace, String> {
        let hs = self.doily_hyperplanes()?;
        lazy(&self.doily_space, || {
            build_veldkamp(&self.hex.doily, &masks(hs))
        })
    }

    fn doily_table(&self) -> Result<&Vec<LineTypeRow>, String> {
        let space = self.doily_space()?;
        lazy(&self.doily_table, || {
            doily_line_table(&self.hex.doily, space)
        })
    }

    fn hex_code(&self) -> Result<&Vec<Hyperplane>, String> {
        lazy(&self.hex_code, || enumerate_code(&self.hex.geometry))
    }

    fn census(&self) -> Result<&Census, String> {
        let hs = self.hex_code()?;
        lazy(&self.census, || {
            Census::build(&Analyzer::new(&self.hex)?, hs.clone())
        })
    }

    fn subhexes(&self) -> Result<&Vec<(SubHexagon, Vec<Hyperplane>)>, String> {
        lazy(&self.subhexes, || {
            doily_grids()
                .into_iter()
                .map(|g| {
                    let sub = sub_hexagon(&self.hex, g)?;
                    let hs = enumerate_code(&sub.geometry)?;
                    Ok((sub, hs))
                })
                .collect()
        })
    }
}

/// Runs criteria 1 through 13.
pub fn run_checks(exp: &Expected, opts: CheckOptions) -> CheckRun {
    let all: Vec<u8> = (1..=CRITERIA).collect();
    run_criteria(exp, opts, &all)
}

/// Runs the listed criteria in ascending order; unknown numbers are ignored.
pub fn run_criteria(exp: &Expected, opts: CheckOptions, criteria: &[u8]) -> CheckRun {
    let mut run = CheckRun::default();
    let ctx = Context::new();
    let selected: BTreeSet<u8> = criteria
        .iter()
        .copied()
        .filter(|n| (1..=CRITERIA).contains(n))
        .collect();
    for n in selected {
        if opts.quick && n == 12 {
            continue;
        }
        let start = Instant::now();
        let mut c = Collector {
            criterion: n,
            out: &mut run.results,
        };
        match n {
            1 => hexagon_construction(&ctx, exp, &mut c),
            2 => doily_hyperplanes(&ctx, exp, &mut c),
            3 => doily_veldkamp(&ctx, exp, &mut c),
            4 => hexagon_hyperplanes(&ctx, exp, &mut c),
            5 => type_table(&ctx, exp, &mut c),
            6 => derived_identities(&ctx, &mut c),
            7 => singular_hyperplanes(&ctx, exp, &mut c),
            8 => embedding_ranks(&ctx, exp, &mut c),
            9 => sub_hexagons(&ctx, exp, &mut c),
            10 => h1_complements(&ctx, exp, &mut c),
            11 => trace_correspondence(&ctx, exp, &mut c),
            12 => hexagon_veldkamp(&ctx, exp, &mut c),
            13 => automorphisms(&ctx, exp, opts.quick, &mut c),
            _ => unreachable!(),
        }
        let elapsed = start.elapsed();
        if n != 4 {
            c.timed(&format!("c{n}.time"), elapsed, time_budget(n));
        }
        run.timings.push((n, elapsed));
    }
    run
}

fn hexagon_construction(ctx: &Context, exp: &Expected, c: &mut Collector) {
    let e = &exp.hexagon;
    let hex = &ctx.hex;
    let g = &hex.geometry;
    c.eq("hexagon.points", e.points, g.num_points());
    c.eq("hexagon.lines", e.lines, g.num_lines());
    let degrees: BTreeSet<usize> = (0..g.num_points())
        .map(|p| g.lines_through(p).len())
        .collect();
    c.list(
        "hexagon.lines_per_point",
        &BTreeSet::from([e.lines_per_point]),
        &degrees,
    );
    match g.validate_near_polygon() {
        Ok(np) => {
            c.eq("hexagon.diameter", e.diameter, np.diameter);
            c.eq("hexagon.slim", true, np.slim);
            c.eq("hexagon.dense", true, np.dense);
        }
        Err(err) => c.error("hexagon.near_polygon", &err.to_string()),
    }
    let mut common = BTreeSet::new();
    for x in 0..g.num_points() {
        for y in (x + 1)..g.num_points() {
            if g.dist(x, y) == Some(2) {
                common.insert(g.common_neighbours(x, y).len());
            }
        }
    }
    c.list(
        "hexagon.common_neighbours_at_distance_2",
        &BTreeSet::from([2, 3]),
        &common,
    );
    let ones = hex
        .line_types
        .iter()
        .filter(|t| **t == LineType::One)
        .count();
    c.eq("hexagon.type_one_lines", e.type_one_lines, ones);
    c.eq(
        "hexagon.type_two_lines",
        e.type_two_lines,
        g.num_lines() - ones,
    );
    let per_point_ok = (0..g.num_points()).all(|p| {
        g.lines_through(p)
            .iter()
            .filter(|&&l| hex.line_types[l] == LineType::One)
            .count()
            == 1
    });
    c.holds(
        "hexagon.one_type_one_line_per_point",
        per_point_ok,
        "a point misses its type-one line",
    );
    c.eq("hexagon.grid_quads", e.grid_quads, hex.grid_quads().count());
    c.eq(
        "hexagon.doily_quads",
        e.doily_quads,
        hex.doily_quads().count(),
    );
    match discover_quads(g) {
        Ok(found) => {
            let mut built: Vec<PointSet> = hex.quads.iter().map(|q| q.points).collect();
            built.sort();
            let found: Vec<PointSet> = found.iter().map(|q| q.points).collect();
            c.holds(
                "hexagon.discovered_quads_match",
                found == built,
                format!("{} discovered", found.len()),
            );
        }
        Err(err) => c.error("hexagon.discovered_quads", &err.to_string()),
    }
}

fn doily_hyperplanes(ctx: &Context, exp: &Expected, c: &mut Collector) {
    let e = &exp.doily;
    let d = &ctx.hex.doily;
    let hs = match ctx.doily_hyperplanes() {
        Ok(h) => h,
        Err(err) => return c.error("doily.hyperplanes", &err),
    };
    c.eq("doily.hyperplanes", e.hyperplanes, hs.len());
    let mut kinds: BTreeMap<&str, usize> = BTreeMap::new();
    let mut sizes: BTreeMap<&str, BTreeSet<usize>> = BTreeMap::new();
    for h in hs {
        match classify_doily_hyperplane(d, h.points) {
            Ok(k) => {
                *kinds.entry(k.name()).or_default() += 1;
                sizes.entry(k.name()).or_default().insert(h.pt_count);
            }
            Err(err) => return c.error("doily.classify", &err.to_string()),
        }
    }
    let count = |k: &str| kinds.get(k).copied().unwrap_or(0);
    c.eq("doily.perps", e.perps, count("perp"));
    c.eq("doily.grids", e.grids, count("grid"));
    c.eq("doily.ovoids", e.ovoids, count("ovoid"));
    c.list(
        "doily.kind_sizes",
        &BTreeMap::from([
            ("grid", BTreeSet::from([9])),
            ("ovoid", BTreeSet::from([5])),
            ("perp", BTreeSet::from([7])),
        ]),
        &sizes,
    );
    c.holds(
        "doily.ovoid_count_note",
        e.perps + e.grids + e.ovoids == e.hyperplanes,
        "perp + grid + ovoid counts do not add up",
    );
    c.note(format!(
        "computed {} ovoids; the stated count {} would give {} + {} + {} = {} != {}",
        count("ovoid"),
        e.ovoids_stated,
        e.perps,
        e.grids,
        e.ovoids_stated,
        e.perps + e.grids + e.ovoids_stated,
        e.hyperplanes
    ));
    match enumerate_search(d) {
        Ok(s) => c.holds(
            "doily.search_matches_code",
            masks(&s) == masks(hs),
            "lists differ",
        ),
        Err(err) => c.error("doily.search", &err.to_string()),
    }
}

fn doily_veldkamp(ctx: &Context, exp: &Expected, c: &mut Collector) {
    let space = match ctx.doily_space() {
        Ok(s) => s,
        Err(err) => return c.error("doily.veldkamp", &err),
    };
    c.eq(
        "doily.veldkamp_points",
        exp.doily.hyperplanes,
        space.points.len(),
    );
    c.eq(
        "doily.veldkamp_lines",
        exp.doily.veldkamp_lines,
        space.lines.len(),
    );
    let table = match ctx.doily_table() {
        Ok(t) => t,
        Err(err) => return c.error("table1", &err),
    };
    for row in &exp.table1 {
        let p = format!("table1.{}", row.line_type);
        match table.iter().find(|r| r.core_type.name() == row.line_type) {
            Some(r) => {
                c.eq(
                    format!("{p}.core"),
                    row.core.as_str(),
                    r.core_type.core_name(),
                );
                c.eq(format!("{p}.perps"), row.perps, r.composition.perps);
                c.eq(format!("{p}.ovoids"), row.ovoids, r.composition.ovoids);
                c.eq(format!("{p}.grids"), row.grids, r.composition.grids);
                c.eq(format!("{p}.count"), row.count, r.count);
            }
            None => c.holds(
                format!("{p}.present"),
                false,
                "type not found among computed lines",
            ),
        }
    }
    for r in table {
        if !exp.table1.iter().any(|e| e.line_type == r.core_type.name()) {
            c.holds(
                format!("table1.{}.expected", r.core_type.name()),
                false,
                "computed type has no expected row",
            );
        }
    }
}

fn hexagon_hyperplanes(ctx: &Context, exp: &Expected, c: &mut Collector) {
    let start = Instant::now();
    let code = match ctx.hex_code() {
        Ok(h) => h,
        Err(err) => return c.error("hyperplanes.code", &err),
    };
    c.timed("c4.code_time", start.elapsed(), 1.0);
    c.eq("hyperplanes.code_count", exp.hyperplanes.total, code.len());
    let start = Instant::now();
    match enumerate_search(&ctx.hex.geometry) {
        Ok(s) => {
            c.timed("c4.search_time", start.elapsed(), time_budget(4));
            c.eq("hyperplanes.search_count", exp.hyperplanes.total, s.len());
            let first_diff = masks(&s).iter().zip(masks(code)).position(|(a, b)| *a != b);
            c.holds(
                "hyperplanes.search_matches_code",
                s.len() == code.len() && first_diff.is_none(),
                format!("first difference at index {first_diff:?}"),
            );
        }
        Err(err) => c.error("hyperplanes.search", &err.to_string()),
    }
}

fn type_table(ctx: &Context, exp: &Expected, c: &mut Collector) {
    let census = match ctx.census() {
        Ok(cs) => cs,
        Err(err) => return c.error("table2", &err),
    };
    c.eq("table2.types", exp.table2.len(), census.rows.len());
    for row in &exp.table2 {
        let p = format!("table2.{}", row.label);
        let Some(r) = census.row(&row.label) else {
            c.holds(
                format!("{p}.present"),
                false,
                "no computed type with this label",
            );
            continue;
        };
        let s = &r.signature;
        c.eq(format!("{p}.family"), row.family, r.family);
        c.eq(format!("{p}.pt"), row.pt, s.pt);
        c.eq(format!("{p}.ln"), row.ln, s.ln);
        c.list(format!("{p}.orders"), &row.orders, &s.orders);
        for (i, name) in ["dp", "sg", "ov"].iter().enumerate() {
            c.eq(format!("{p}.grid_{name}"), row.grid[i], s.grid_profile[i]);
        }
        c.eq(format!("{p}.grid_sq"), 0, s.grid_subquadrangular);
        for (i, name) in ["dp", "sg", "ov", "sq"].iter().enumerate() {
            c.eq(
                format!("{p}.doily_{name}"),
                row.doily[i],
                s.doily_profile[i],
            );
        }
        c.eq(format!("{p}.cd"), row.cd, r.count);
    }
    for r in &census.rows {
        if exp.table2_row(&r.label).is_none() {
            c.holds(
                format!("table2.{}.orphan", r.label),
                false,
                format!("{:?}", r.signature),
            );
        }
    }
    let fam = |f: u8| {
        census
            .rows
            .iter()
            .filter(|r| r.family == f)
            .map(|r| r.count)
            .sum::<usize>()
    };
    c.eq(
        "hyperplanes.first_family",
        exp.hyperplanes.first_family,
        fam(1),
    );
    c.eq(
        "hyperplanes.second_family",
        exp.hyperplanes.second_family,
        fam(2),
    );
    c.eq("hyperplanes.total", exp.hyperplanes.total, fam(1) + fam(2));
}

fn derived_identities(ctx: &Context, c: &mut Collector) {
    let census = match ctx.census() {
        Ok(cs) => cs,
        Err(err) => return c.error("identities", &err),
    };
    let n = ctx.hex.geometry.num_points();
    let all = |f: &dyn Fn(usize) -> bool| (0..census.hyperplanes.len()).find(|&i| !f(i));
    let report = |i: Option<usize>| match i {
        Some(i) => format!("fails for {}", census.hyperplanes[i].points.to_hex(n)),
        None => String::new(),
    };
    let sig = |i: usize| &census.signatures[i];

    let bad = all(&|i| sig(i).ln + 30 == 2 * sig(i).pt);
    c.holds(
        "identity.ln_equals_2pt_minus_30",
        bad.is_none(),
        report(bad),
    );
    let bad = all(&|i| {
        sig(i)
            .orders
            .iter()
            .enumerate()
            .map(|(k, x)| k * x)
            .sum::<usize>()
            == 3 * sig(i).ln
    });
    c.holds(
        "identity.weighted_orders_equal_3ln",
        bad.is_none(),
        report(bad),
    );
    let bad = all(&|i| sig(i).pt % 4 == 1);
    c.holds("identity.pt_is_1_mod_4", bad.is_none(), report(bad));
    let bad = all(&|i| sig(i).doily_profile[1] >= 1);
    c.holds(
        "identity.has_singular_doily_quad",
        bad.is_none(),
        report(bad),
    );
    let bad = all(&|i| sig(i).doily_profile[0] > 0 || sig(i).doily_profile[1] >= 1);
    c.holds(
        "identity.no_deep_doily_implies_singular_doily",
        bad.is_none(),
        report(bad),
    );
    let bad = all(&|i| sig(i).grid_profile[1] >= 1);
    c.holds(
        "identity.has_singular_grid_quad",
        bad.is_none(),
        report(bad),
    );
    let bad = all(&|i| sig(i).orders.contains(&0));
    c.holds(
        "identity.no_hyperplane_has_all_orders",
        bad.is_none(),
        report(bad),
    );
    let bad = all(&|i| sig(i).doily_profile.contains(&0));
    c.holds(
        "identity.no_hyperplane_has_all_doily_relations",
        bad.is_none(),
        report(bad),
    );

    let labels_where = |f: &dyn Fn(&crate::hyperplanes::Signature) -> bool| -> Vec<String> {
        census
            .rows
            .iter()
            .filter(|r| f(&r.signature))
            .map(|r| r.label.clone())
            .collect()
    };
    let deepless = labels_where(&|s| s.orders.last() == Some(&0));
    c.list(
        "identity.types_without_deep_points",
        &vec!["H6".to_string(), "H7".to_string()],
        &deepless,
    );
    let isolated = labels_where(&|s| s.orders[0] > 0);
    c.list(
        "identity.types_with_isolated_points",
        &vec!["H7".to_string(), "H8".to_string()],
        &isolated,
    );
    let all_grid_kinds = labels_where(&|s| s.grid_profile.iter().all(|&x| x > 0));
    c.list(
        "identity.types_with_all_grid_relations",
        &vec!["H4".to_string(), "H5".to_string()],
        &all_grid_kinds,
    );
    let doily_sq = labels_where(&|s| s.doily_profile[3] > 0);
    c.list(
        "identity.types_with_subquadrangular_doily",
        &vec!["H1".to_string(), "H4".to_string(), "H7".to_string()],
        &doily_sq,
    );
}

fn singular_hyperplanes(ctx: &Context, exp: &Expected, c: &mut Collector) {
    let census = match ctx.census() {
        Ok(cs) => cs,
        Err(err) => return c.error("singular", &err),
    };
    let g = &ctx.hex.geometry;
    let index: HashMap<PointSet, usize> = census
        .hyperplanes
        .iter()
        .enumerate()
        .map(|(i, h)| (h.points, i))
        .collect();
    let mut images = BTreeSet::new();
    let mut labels = BTreeSet::new();
    let mut valid = 0;
    for x in 0..g.num_points() {
        match singular_hyperplane(g, x) {
            Ok(h) => {
                valid += 1;
                images.insert(h.points);
                match index.get(&h.points) {
                    Some(&i) => labels.insert(census.label_of(i).to_string()),
                    None => labels.insert("missing".to_string()),
                };
            }
            Err(err) => return c.error("singular.hyperplane", &err.to_string()),
        }
    }
    c.eq("singular.valid", g.num_points(), valid);
    c.eq("singular.distinct", exp.singular.count, images.len());
    c.list(
        "singular.types",
        &BTreeSet::from([exp.singular.label.clone()]),
        &labels,
    );
    let of_type: BTreeSet<PointSet> = census
        .of_types(&[exp.singular.label.as_str()])
        .map(|h| h.points)
        .collect();
    c.holds(
        "singular.exhaust_type",
        of_type == images,
        format!("{} of type, {} singular", of_type.len(), images.len()),
    );
}

fn embedding_ranks(ctx: &Context, exp: &Expected, c: &mut Collector) {
    let e = &exp.embedding;
    let dim = |g: &IncidenceStructure| g.line_incidence_matrix().nullspace().dim();
    c.eq("embedding.grid", e.grid, dim(&grid()));
    c.eq("embedding.doily", e.doily, dim(&ctx.hex.doily));
    c.eq("embedding.hexagon", e.hexagon, dim(&ctx.hex.geometry));
    let sub_dims: BTreeSet<usize> = doily_grids()
        .into_iter()
        .filter_map(|g| sub_hexagon(&ctx.hex, g).ok())
        .map(|s| dim(&s.geometry))
        .collect();
    c.list("embedding.subhex", &BTreeSet::from([e.subhex]), &sub_dims);
    match ctx.census() {
        Ok(census) => {
            let labels: Vec<&str> = exp.subhex.sources.iter().map(String::as_str).collect();
            let span =
                complement_span_dimension(ctx.hex.geometry.num_points(), census.of_types(&labels));
            c.eq("embedding.h2_h5_h6_span", e.h2_h5_h6_span, span);
        }
        Err(err) => c.error("embedding.span", &err),
    }
}

fn sub_hexagons(ctx: &Context, exp: &Expected, c: &mut Collector) {
    let e = &exp.subhex;
    let subs = match ctx.subhexes() {
        Ok(s) => s,
        Err(err) => return c.error("subhex", &err),
    };
    let census = match ctx.census() {
        Ok(cs) => cs,
        Err(err) => return c.error("subhex.census", &err),
    };
    let labels: Vec<&str> = e.sources.iter().map(String::as_str).collect();
    for (i, (sub, hs)) in subs.iter().enumerate() {
        let p = format!("subhex.{i}");
        let g = &sub.geometry;
        c.eq(format!("{p}.points"), e.points, g.num_points());
        c.eq(format!("{p}.lines"), e.lines, g.num_lines());
        let np_ok =
            matches!(g.validate_near_polygon(), Ok(np) if np.diameter == 3 && np.dense && np.slim);
        c.holds(
            format!("{p}.dense_slim_near_hexagon"),
            np_ok,
            "near-hexagon validation failed",
        );
        c.eq(format!("{p}.hyperplanes"), e.hyperplanes, hs.len());
        match enumerate_search(g) {
            Ok(s) => c.holds(
                format!("{p}.search_matches_code"),
                masks(&s) == masks(hs),
                "lists differ",
            ),
            Err(err) => c.error(&format!("{p}.search"), &err.to_string()),
        }
        let classes: BTreeSet<(usize, usize, Vec<usize>)> = hs
            .iter()
            .map(|h| (h.pt_count, h.full_line_count, h.orders.clone()))
            .collect();
        c.eq(format!("{p}.classes"), e.classes, classes.len());
        let covered = restriction_coverage(sub, hs, census.of_types(&labels));
        c.eq(format!("{p}.restriction_coverage"), hs.len(), covered);
    }
    let hex = &ctx.hex;
    let mut pair_ok = true;
    let mut detail = String::new();
    for (i, (a, _)) in subs.iter().enumerate() {
        for (j, (b, _)) in subs.iter().enumerate().skip(i + 1) {
            let (pa, pb) = (a.points_in_hexagon(), b.points_in_hexagon());
            let shared: Vec<PointSet> = hex
                .grid_quads()
                .map(|q| q.points)
                .filter(|q| q.is_subset(pa) && q.is_subset(pb))
                .collect();
            let ok = shared.len() == 2
                && hex
                    .geometry
                    .line_id(shared[0].intersection(shared[1]))
                    .is_some();
            if !ok && pair_ok {
                pair_ok = false;
                detail = format!("sub-hexagons {i} and {j} share {} grid-quads", shared.len());
            }
        }
    }
    c.holds(
        "subhex.pairs_share_two_concurrent_grid_quads",
        pair_ok,
        detail,
    );
}

fn h1_complements(ctx: &Context, exp: &Expected, c: &mut Collector) {
    let census = match ctx.census() {
        Ok(cs) => cs,
        Err(err) => return c.error("h1_complement", &err),
    };
    let g = &ctx.hex.geometry;
    let h1: Vec<&Hyperplane> = census.of_types(&["H1"]).collect();
    let sizes: BTreeSet<usize> = h1
        .iter()
        .map(|h| h.points.complement(g.num_points()).len())
        .collect();
    c.list(
        "h1_complement.points",
        &BTreeSet::from([exp.h1_complement.points]),
        &sizes,
    );
    let literal = h1
        .iter()
        .find_map(|h| h1_complement_check(g, h.points).err());
    c.holds(
        "h1_complement.two_k33_components",
        !h1.is_empty() && literal.is_none(),
        literal
            .map(|v| v.0)
            .unwrap_or_else(|| "no H1 hyperplanes".into()),
    );
    let dual = h1
        .iter()
        .find_map(|h| h1_complement_dual_grids(&ctx.hex, h.points).err());
    c.holds(
        "h1_complement.dual_grid_pair",
        !h1.is_empty() && dual.is_none(),
        dual.map(|v| v.0)
            .unwrap_or_else(|| "no H1 hyperplanes".into()),
    );
    c.note(format!(
        "each complement meets the two non-deep doily-quads in {} dual grids GQ(1,2)",
        exp.h1_complement.components
    ));
}

fn trace_correspondence(ctx: &Context, exp: &Expected, c: &mut Collector) {
    let (census, space) = match (ctx.census(), ctx.doily_space()) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(err), _) | (_, Err(err)) => return c.error("traces", &err),
    };
    let doily = &ctx.hex.doily;
    let point_id: HashMap<PointSet, u32> = space
        .points
        .iter()
        .enumerate()
        .map(|(i, &h)| (h, i as u32))
        .collect();
    let line_id: HashMap<[u32; 3], usize> = space
        .lines
        .iter()
        .enumerate()
        .map(|(i, l)| (l.members, i))
        .collect();

    let mut pairing: BTreeMap<String, BTreeSet<&'static str>> = BTreeMap::new();
    let mut hits = vec![0usize; space.lines.len()];
    let mut first_family: BTreeMap<String, BTreeSet<&'static str>> = BTreeMap::new();
    let mut problem: Option<String> = None;

    for (i, h) in census.hyperplanes.iter().enumerate() {
        let label = census.label_of(i).to_string();
        let traces = match doily_traces(&ctx.hex, h.points) {
            Ok(t) => t,
            Err(err) => {
                problem.get_or_insert(err.to_string());
                continue;
            }
        };
        let planes: Vec<PointSet> = traces
            .iter()
            .filter_map(|t| match t {
                Trace::Hyperplane(p) => Some(*p),
                Trace::Full => None,
            })
            .collect();
        if census.rows[census.assignment[i]].family == 1 {
            let kind = match planes.as_slice() {
                [a, b] if a == b => classify_doily_hyperplane(doily, *a)
                    .map(DoilyKind::name)
                    .ok(),
                _ => None,
            };
            first_family
                .entry(label)
                .or_default()
                .insert(kind.unwrap_or("mismatch"));
            continue;
        }
        let [a, b, t] = match planes.as_slice() {
            [a, b, t] => [*a, *b, *t],
            _ => {
                problem.get_or_insert(format!("{label} hyperplane with a full trace"));
                continue;
            }
        };
        let third = crate::veldkamp::third_hyperplane(doily, a, b).ok();
        let mut ids = [point_id[&a], point_id[&b], point_id[&t]];
        ids.sort_unstable();
        match (third == Some(t), line_id.get(&ids)) {
            (true, Some(&l)) => {
                hits[l] += 1;
                match classify_veldkamp_line(doily, space, &space.lines[l]) {
                    Ok((ct, _)) => {
                        pairing.entry(label).or_default().insert(ct.name());
                    }
                    Err(err) => {
                        problem.get_or_insert(err.to_string());
                    }
                }
            }
            _ => {
                problem.get_or_insert(format!(
                    "{label} traces {a:?} {b:?} {t:?} are not a Veldkamp line"
                ));
            }
        }
    }
    c.holds(
        "traces.valid",
        problem.is_none(),
        problem.unwrap_or_default(),
    );
    let expected_pairing: BTreeMap<String, BTreeSet<&str>> = exp
        .pairing
        .types
        .iter()
        .map(|(k, v)| (k.clone(), BTreeSet::from([v.as_str()])))
        .collect();
    c.list("traces.pairing", &expected_pairing, &pairing);
    let per_line: BTreeSet<usize> = hits.iter().copied().collect();
    c.list(
        "traces.per_veldkamp_line",
        &BTreeSet::from([exp.pairing.per_line]),
        &per_line,
    );
    let expected_first: BTreeMap<String, BTreeSet<&str>> =
        [("H1", "grid"), ("H2", "perp"), ("H3", "ovoid")]
            .into_iter()
            .map(|(k, v)| (k.to_string(), BTreeSet::from([v])))
            .collect();
    c.list(
        "traces.first_family_equal_traces",
        &expected_first,
        &first_family,
    );
}

fn hexagon_veldkamp(ctx: &Context, exp: &Expected, c: &mut Collector) {
    let e = &exp.veldkamp;
    match ctx
        .hex_code()
        .and_then(|hs| build_veldkamp(&ctx.hex.geometry, &masks(hs)).map_err(|e| e.to_string()))
    {
        Ok(v) => {
            c.eq(
                "veldkamp.hexagon_points",
                e.hexagon_points,
                v.points.len() as u64,
            );
            c.eq(
                "veldkamp.hexagon_lines",
                e.hexagon_lines,
                v.lines.len() as u64,
            );
            c.eq(
                "veldkamp.hexagon_pg_identity",
                projective_counts(10).1,
                v.lines.len() as u64,
            );
        }
        Err(err) => c.error("veldkamp.hexagon", &err),
    }
    match ctx.subhexes() {
        Ok(subs) => {
            let (sub, hs) = &subs[0];
            match build_veldkamp(&sub.geometry, &masks(hs)) {
                Ok(v) => {
                    c.eq(
                        "veldkamp.subhex_points",
                        e.subhex_points,
                        v.points.len() as u64,
                    );
                    c.eq(
                        "veldkamp.subhex_lines",
                        e.subhex_lines,
                        v.lines.len() as u64,
                    );
                }
                Err(err) => c.error("veldkamp.subhex", &err.to_string()),
            }
        }
        Err(err) => c.error("veldkamp.subhex", &err),
    }
}

fn automorphisms(ctx: &Context, exp: &Expected, quick: bool, c: &mut Collector) {
    let e = &exp.automorphisms;
    c.eq("automorphisms.line3", e.line3, automorphism_count(&line3()));
    c.eq("automorphisms.grid", e.grid, automorphism_count(&grid()));
    c.eq(
        "automorphisms.doily",
        e.doily,
        automorphism_count(&ctx.hex.doily),
    );
    if quick {
        return;
    }
    c.eq(
        "automorphisms.hexagon",
        e.hexagon,
        automorphism_count(&ctx.hex.geometry),
    );
    let swapped = IncidenceStructure::direct_product(&doily().0, &line3());
    let iso = swapped.map(|s| find_isomorphism(&s, &ctx.hex.geometry).is_some());
    c.holds(
        "isomorphism.product_commutes",
        matches!(iso, Ok(true)),
        "no isomorphism found",
    );
}
