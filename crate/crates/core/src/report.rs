//! Report emitters: JSON, CSV and Markdown renderings of geometry stats,
//! hyperplane lists, type tables, Veldkamp censuses and check runs.
//!
//! Every emitter is a pure function of its input; nothing time-dependent is
//! written into a payload.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::check::{CheckResult, CheckRun};
use crate::error::{Error, Result};
use crate::geometries::{gq_order, Named};
use crate::hyperplanes::{classify_doily_hyperplane, Analyzer, Census, Hyperplane, TypeRow};
use crate::incidence::IncidenceStructure;
use crate::veldkamp::{LineTypeRow, VeldkampLine, VeldkampSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Md,
}

/// Lines shown in a Veldkamp report without `--lines`.
pub const LINES_SAMPLE: usize = 10;

fn json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report values serialize");
    s.push('\n');
    s
}

fn md_table(header: &[String], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "| {} |", header.join(" | "));
    let _ = writeln!(
        out,
        "|{}",
        header.iter().map(|_| "---|").collect::<String>()
    );
    for r in rows {
        let _ = writeln!(out, "| {} |", r.join(" | "));
    }
    out
}

fn csv_table(header: &[String], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn strings<const N: usize>(xs: [&str; N]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn table(format: Format, header: &[String], rows: &[Vec<String>]) -> String {
    match format {
        Format::Md => md_table(header, rows),
        _ => csv_table(header, rows),
    }
}

// ---------------------------------------------------------------- build

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BuildStats {
    pub name: String,
    pub points: usize,
    pub lines: usize,
    pub points_per_line: Vec<usize>,
    pub lines_per_point: Vec<usize>,
    pub diameter: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gq_order: Option<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub near_polygon_diameter: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dense: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slim: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_quads: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub doily_quads: Option<usize>,
}

fn distinct(xs: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut v: Vec<usize> = xs.collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Validates a named geometry and collects its stats.
///
/// Every geometry must be a connected partial linear space; a GQ must pass
/// the GQ axioms for its order and the hexagons must be near hexagons.
pub fn build_stats(name: &str, named: &Named) -> Result<BuildStats> {
    let g = named.geometry();
    g.validate_partial_linear_space()
        .map_err(|v| Error::Structure(v.0))?;
    let diameter = g.diameter().ok_or(Error::Disconnected)?;
    let order = gq_order(g);
    if let Some((s, t)) = order {
        g.validate_gq(s, t).map_err(|v| Error::Structure(v.0))?;
    }
    let np = match named {
        Named::Hexagon(_) | Named::SubHexagon(_) => Some(g.validate_near_polygon()?),
        _ => g.validate_near_polygon().ok(),
    };
    let (grid_quads, doily_quads) = match named {
        Named::Hexagon(h) => (Some(h.grid_quads().count()), Some(h.doily_quads().count())),
        _ => (None, None),
    };
    Ok(BuildStats {
        name: name.to_string(),
        points: g.num_points(),
        lines: g.num_lines(),
        points_per_line: distinct(g.lines().iter().map(|l| l.len())),
        lines_per_point: distinct((0..g.num_points()).map(|p| g.lines_through(p).len())),
        diameter,
        gq_order: order.map(|(s, t)| [s, t]),
        near_polygon_diameter: np.map(|n| n.diameter),
        dense: np.map(|n| n.dense),
        slim: np.map(|n| n.slim),
        grid_quads,
        doily_quads,
    })
}

pub fn emit_build(stats: &BuildStats, format: Format) -> String {
    if format == Format::Json {
        return json(stats);
    }
    let list = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
    let mut rows = vec![
        vec!["name".into(), stats.name.clone()],
        vec!["points".into(), stats.points.to_string()],
        vec!["lines".into(), stats.lines.to_string()],
        vec!["points_per_line".into(), list(&stats.points_per_line)],
        vec!["lines_per_point".into(), list(&stats.lines_per_point)],
        vec!["diameter".into(), stats.diameter.to_string()],
    ];
    if let Some([s, t]) = stats.gq_order {
        rows.push(vec!["gq_order".into(), format!("{s} {t}")]);
    }
    let optional = [
        (
            "near_polygon_diameter",
            stats.near_polygon_diameter.map(|d| d.to_string()),
        ),
        ("dense", stats.dense.map(|b| b.to_string())),
        ("slim", stats.slim.map(|b| b.to_string())),
        ("grid_quads", stats.grid_quads.map(|n| n.to_string())),
        ("doily_quads", stats.doily_quads.map(|n| n.to_string())),
    ];
    rows.extend(
        optional
            .into_iter()
            .filter_map(|(k, v)| v.map(|v| vec![k.to_string(), v])),
    );
    table(format, &strings(["property", "value"]), &rows)
}

// ---------------------------------------------------------- hyperplanes

/// One serialized hyperplane. Quad profiles, type and family are present
/// for the hexagon; the doily carries its kind as `type`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperplaneRecord {
    pub mask: String,
    pub pt: usize,
    pub ln: usize,
    pub orders: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_profile: Option<[usize; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub doily_profile: Option<[usize; 4]>,
    #[serde(rename = "type", default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<u8>,
}

fn plain_record(g: &IncidenceStructure, h: &Hyperplane) -> HyperplaneRecord {
    HyperplaneRecord {
        mask: h.points.to_hex(g.num_points()),
        pt: h.pt_count,
        ln: h.full_line_count,
        orders: h.orders.clone(),
        grid_profile: None,
        doily_profile: None,
        kind: None,
        family: None,
    }
}

/// Records for a hyperplane list; for the hexagon, also the census.
pub fn hyperplane_records(
    named: &Named,
    hs: Vec<Hyperplane>,
) -> Result<(Vec<HyperplaneRecord>, Option<Census>)> {
    let g = named.geometry();
    match named {
        Named::Hexagon(hex) => {
            let census = Census::build(&Analyzer::new(hex)?, hs)?;
            let records = census
                .hyperplanes
                .iter()
                .enumerate()
                .map(|(i, h)| {
                    let s = &census.signatures[i];
                    let row = &census.rows[census.assignment[i]];
                    HyperplaneRecord {
                        grid_profile: Some(s.grid_profile),
                        doily_profile: Some(s.doily_profile),
                        kind: Some(row.label.clone()),
                        family: Some(row.family),
                        ..plain_record(g, h)
                    }
                })
                .collect();
            Ok((records, Some(census)))
        }
        Named::Doily(d) => {
            let records = hs
                .iter()
                .map(|h| {
                    let kind = classify_doily_hyperplane(d, h.points)?;
                    Ok(HyperplaneRecord {
                        kind: Some(kind.name().to_string()),
                        ..plain_record(g, h)
                    })
                })
                .collect::<Result<_>>()?;
            Ok((records, None))
        }
        _ => Ok((hs.iter().map(|h| plain_record(g, h)).collect(), None)),
    }
}

pub fn emit_hyperplanes(records: &[HyperplaneRecord], format: Format) -> String {
    if format == Format::Json {
        return json(records);
    }
    let orders = records.first().map_or(0, |r| r.orders.len());
    let profiles = records.first().is_some_and(|r| r.grid_profile.is_some());
    let kind = records.first().is_some_and(|r| r.kind.is_some());
    let family = records.first().is_some_and(|r| r.family.is_some());
    let mut header = strings(["mask", "pt", "ln"]);
    header.extend((0..orders).map(|k| format!("o{k}")));
    if profiles {
        header.extend(strings([
            "grid_dp", "grid_sg", "grid_ov", "doily_dp", "doily_sg", "doily_ov", "doily_sq",
        ]));
    }
    if kind {
        header.push("type".into());
    }
    if family {
        header.push("family".into());
    }
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            let mut row = vec![r.mask.clone(), r.pt.to_string(), r.ln.to_string()];
            row.extend(r.orders.iter().map(usize::to_string));
            if let (Some(g), Some(d)) = (r.grid_profile, r.doily_profile) {
                row.extend(g.iter().chain(d.iter()).map(usize::to_string));
            }
            row.extend(r.kind.clone());
            row.extend(r.family.map(|f| f.to_string()));
            row
        })
        .collect();
    table(format, &header, &rows)
}

/// Human-readable count per type (or per size when untyped).
pub fn census_summary(records: &[HyperplaneRecord]) -> String {
    let mut by: BTreeMap<String, usize> = BTreeMap::new();
    for r in records {
        let key = r.kind.clone().unwrap_or_else(|| format!("size {}", r.pt));
        *by.entry(key).or_default() += 1;
    }
    let mut out = format!("{} hyperplanes\n", records.len());
    for (k, n) in by {
        let _ = writeln!(out, "  {k}: {n}");
    }
    out
}

// -------------------------------------------------------------- classify

#[derive(Serialize)]
struct Table2Json<'a> {
    label: &'a str,
    family: u8,
    pt: usize,
    ln: usize,
    orders: &'a [usize],
    grid_profile: [usize; 3],
    grid_sq: usize,
    doily_profile: [usize; 4],
    cd: usize,
}

/// The hexagon type table, one row per type, in the column layout
/// Tp, Pt, Ln, points of order 0..4, grid-quads dp/sg/ov/sq,
/// doily-quads dp/sg/ov/sq, Cd.
pub fn emit_type_table(rows: &[TypeRow], format: Format) -> String {
    if format == Format::Json {
        let out: Vec<Table2Json> = rows
            .iter()
            .map(|r| Table2Json {
                label: &r.label,
                family: r.family,
                pt: r.signature.pt,
                ln: r.signature.ln,
                orders: &r.signature.orders,
                grid_profile: r.signature.grid_profile,
                grid_sq: r.signature.grid_subquadrangular,
                doily_profile: r.signature.doily_profile,
                cd: r.count,
            })
            .collect();
        return json(&out);
    }
    let md = format == Format::Md;
    let mut header = strings(["Tp", "Pt", "Ln"]);
    header.extend((0..5).map(|k| if md { k.to_string() } else { format!("O{k}") }));
    let groups: [(&str, [&str; 4]); 2] = [
        ("Grid", ["dp", "sg", "ov", "sq"]),
        ("Doily", ["dp", "sg", "ov", "sq"]),
    ];
    for (g, cols) in groups {
        header.extend(
            cols.iter()
                .map(|c| if md { c.to_string() } else { format!("{g}{c}") }),
        );
    }
    header.push("Cd".into());
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let s = &r.signature;
            let mut row = vec![r.label.clone(), s.pt.to_string(), s.ln.to_string()];
            row.extend(s.orders.iter().map(usize::to_string));
            row.extend(s.grid_profile.iter().map(usize::to_string));
            row.push(match (md, s.grid_subquadrangular) {
                (true, 0) => "--".into(),
                (_, n) => n.to_string(),
            });
            row.extend(s.doily_profile.iter().map(usize::to_string));
            row.push(r.count.to_string());
            row
        })
        .collect();
    if md {
        let mut out = String::from(
            "Points of order 0-4 | grid-quads dp sg ov sq | doily-quads dp sg ov sq\n\n",
        );
        out.push_str(&md_table(&header, &body));
        out
    } else {
        csv_table(&header, &body)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KindRow {
    pub kind: String,
    pub size: usize,
    pub count: usize,
}

/// Doily hyperplane kinds with their sizes and counts.
pub fn doily_kind_rows(records: &[HyperplaneRecord]) -> Vec<KindRow> {
    let mut rows: Vec<KindRow> = Vec::new();
    for r in records {
        let kind = r.kind.clone().unwrap_or_default();
        match rows.iter_mut().find(|k| k.kind == kind) {
            Some(k) => k.count += 1,
            None => rows.push(KindRow {
                kind,
                size: r.pt,
                count: 1,
            }),
        }
    }
    rows.sort_by(|a, b| b.size.cmp(&a.size).then_with(|| a.kind.cmp(&b.kind)));
    rows
}

pub fn emit_kind_table(rows: &[KindRow], format: Format) -> String {
    if format == Format::Json {
        return json(rows);
    }
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![r.kind.clone(), r.size.to_string(), r.count.to_string()])
        .collect();
    table(format, &strings(["Kind", "Size", "Count"]), &body)
}

// -------------------------------------------------------------- veldkamp

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LineRecord {
    pub members: [u32; 3],
    pub core: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VeldkampReport {
    pub points: usize,
    pub lines: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line_types: Option<BTreeMap<String, usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lines_sample: Option<Vec<LineRecord>>,
    #[serde(rename = "lines_list", skip_serializing_if = "Option::is_none")]
    pub all_lines: Option<Vec<LineRecord>>,
    #[serde(skip)]
    pub table: Option<Vec<LineTypeRow>>,
}

fn line_record(n: usize, l: &VeldkampLine) -> LineRecord {
    LineRecord {
        members: l.members,
        core: l.core.to_hex(n),
    }
}

/// `table` is the doily line table when there is one; `full` keeps every line.
pub fn veldkamp_report(
    g: &IncidenceStructure,
    space: &VeldkampSpace,
    table: Option<Vec<LineTypeRow>>,
    full: bool,
) -> VeldkampReport {
    let n = g.num_points();
    let records = |k: usize| {
        space
            .lines
            .iter()
            .take(k)
            .map(|l| line_record(n, l))
            .collect()
    };
    VeldkampReport {
        points: space.points.len(),
        lines: space.lines.len(),
        line_types: table.as_ref().map(|t| {
            t.iter()
                .map(|r| (r.core_type.name().to_string(), r.count))
                .collect()
        }),
        lines_sample: (!full).then(|| records(LINES_SAMPLE)),
        all_lines: full.then(|| records(usize::MAX)),
        table,
    }
}

/// Doily line table with columns Type, Core, Perps, Ovoids, Grids, count.
pub fn emit_line_table(rows: &[LineTypeRow], format: Format) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.core_type.name().to_string(),
                r.core_type.core_name().to_string(),
                r.composition.perps.to_string(),
                r.composition.ovoids.to_string(),
                r.composition.grids.to_string(),
                r.count.to_string(),
            ]
        })
        .collect();
    let last = if format == Format::Md { "#" } else { "Count" };
    table(
        format,
        &strings(["Type", "Core", "Perps", "Ovoids", "Grids", last]),
        &body,
    )
}

pub fn emit_veldkamp(report: &VeldkampReport, format: Format) -> String {
    let lines = report.all_lines.as_ref().or(report.lines_sample.as_ref());
    let line_rows = |ls: &Vec<LineRecord>| -> Vec<Vec<String>> {
        ls.iter()
            .map(|l| {
                let mut row: Vec<String> = l.members.iter().map(u32::to_string).collect();
                row.push(l.core.clone());
                row
            })
            .collect()
    };
    let line_header = strings(["a", "b", "c", "core"]);
    match format {
        Format::Json => json(report),
        Format::Csv => match (&report.all_lines, &report.table) {
            (Some(ls), _) => csv_table(&line_header, &line_rows(ls)),
            (None, Some(t)) => emit_line_table(t, Format::Csv),
            (None, None) => csv_table(
                &strings(["points", "lines"]),
                &[vec![report.points.to_string(), report.lines.to_string()]],
            ),
        },
        Format::Md => {
            let mut out = format!("points: {}\nlines: {}\n", report.points, report.lines);
            if let Some(t) = &report.table {
                out.push('\n');
                out.push_str(&emit_line_table(t, Format::Md));
            }
            if let Some(ls) = lines {
                let title = if report.all_lines.is_some() {
                    "Lines"
                } else {
                    "First lines"
                };
                let _ = write!(out, "\n{title} (hyperplane ids, core mask):\n\n");
                out.push_str(&md_table(&line_header, &line_rows(ls)));
            }
            out
        }
    }
}

// ---------------------------------------------------------------- checks

pub fn emit_checks(run: &CheckRun, format: Format) -> String {
    if format == Format::Json {
        return json(&run.results);
    }
    let row = |r: &CheckResult| {
        vec![
            r.criterion.to_string(),
            r.name.clone(),
            if r.passed { "pass" } else { "FAIL" }.to_string(),
            r.expected.clone(),
            r.actual.clone(),
        ]
    };
    let header = strings(["criterion", "check", "result", "expected", "actual"]);
    if format == Format::Csv {
        let mut out = header.join(",");
        out.push('\n');
        for r in &run.results {
            out.push_str(
                &row(r)
                    .iter()
                    .map(|f| csv_field(f))
                    .collect::<Vec<_>>()
                    .join(","),
            );
            out.push('\n');
        }
        return out;
    }
    let rows: Vec<Vec<String>> = run
        .results
        .iter()
        .map(|r| row(r).into_iter().map(|f| f.replace('|', "\\|")).collect())
        .collect();
    let mut out = md_table(&header, &rows);
    let notes: Vec<&CheckResult> = run.results.iter().filter(|r| r.note.is_some()).collect();
    if !notes.is_empty() {
        out.push_str("\nNotes:\n\n");
        for r in notes {
            let _ = writeln!(
                out,
                "- {}: {}",
                r.name,
                r.note.as_deref().unwrap_or_default()
            );
        }
    }
    let failed = run.failures().count();
    let _ = write!(out, "\n{} checks, {} failed\n", run.results.len(), failed);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometries::named;
    use crate::hyperplanes::enumerate_code;
    use crate::pointset::PointSet;

    fn records(name: &str) -> Vec<HyperplaneRecord> {
        let n = named(name, None).unwrap();
        let hs = enumerate_code(n.geometry()).unwrap();
        hyperplane_records(&n, hs).unwrap().0
    }

    #[test]
    fn json_masks_round_trip() {
        for name in ["grid", "doily", "hexagon"] {
            let n = named(name, None).unwrap().geometry().num_points();
            let recs = records(name);
            let text = emit_hyperplanes(&recs, Format::Json);
            let back: Vec<HyperplaneRecord> = serde_json::from_str(&text).unwrap();
            assert_eq!(back, recs);
            for r in &back {
                let set = PointSet::from_hex(&r.mask, n).unwrap();
                assert_eq!(set.to_hex(n), r.mask);
                assert_eq!(set.len(), r.pt);
            }
        }
    }

    #[test]
    fn hexagon_record_shape() {
        let recs = records("hexagon");
        assert_eq!(recs.len(), 1023);
        let v: serde_json::Value =
            serde_json::from_str(&emit_hyperplanes(&recs[..1], Format::Json)).unwrap();
        let obj = v[0].as_object().unwrap();
        let keys: Vec<&str> = obj.keys().map(String::as_str).collect();
        for k in [
            "mask",
            "pt",
            "ln",
            "orders",
            "grid_profile",
            "doily_profile",
            "type",
            "family",
        ] {
            assert!(keys.contains(&k), "{k} missing");
        }
        assert_eq!(obj["mask"].as_str().unwrap().len(), 12);
        assert_eq!(obj["orders"].as_array().unwrap().len(), 5);
    }

    #[test]
    fn untyped_records_omit_optional_fields() {
        let recs = records("grid");
        assert_eq!(recs.len(), 15);
        let text = emit_hyperplanes(&recs, Format::Json);
        assert!(!text.contains("grid_profile") && !text.contains("\"type\""));
        let csv = emit_hyperplanes(&recs, Format::Csv);
        assert_eq!(csv.lines().next().unwrap(), "mask,pt,ln,o0,o1,o2");
        assert_eq!(csv.lines().count(), 16);
    }

    #[test]
    fn doily_kind_table() {
        let rows = doily_kind_rows(&records("doily"));
        let got: Vec<(&str, usize, usize)> = rows
            .iter()
            .map(|r| (r.kind.as_str(), r.size, r.count))
            .collect();
        assert_eq!(got, vec![("grid", 9, 10), ("perp", 7, 15), ("ovoid", 5, 6)]);
    }

    #[test]
    fn type_table_markdown_layout() {
        let n = named("hexagon", None).unwrap();
        let hs = enumerate_code(n.geometry()).unwrap();
        let census = hyperplane_records(&n, hs).unwrap().1.unwrap();
        let md = emit_type_table(&census.rows, Format::Md);
        assert!(md.contains(
            "| Tp | Pt | Ln | 0 | 1 | 2 | 3 | 4 | dp | sg | ov | sq | dp | sg | ov | sq | Cd |"
        ));
        assert!(md.contains(
            "| H3 | 25 | 20 | 0 | 10 | 0 | 10 | 5 | 0 | 15 | 0 | -- | 1 | 0 | 2 | 0 | 18 |"
        ));
        let csv = emit_type_table(&census.rows, Format::Csv);
        let cd: Vec<&str> = csv
            .lines()
            .skip(1)
            .map(|l| l.rsplit(',').next().unwrap())
            .collect();
        assert_eq!(cd, ["30", "45", "18", "270", "90", "120", "360", "90"]);
    }

    #[test]
    fn csv_quoting_only_when_needed() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("[1, 2]"), "\"[1, 2]\"");
        assert_eq!(csv_field("a\"b,"), "\"a\"\"b,\"");
    }
}
