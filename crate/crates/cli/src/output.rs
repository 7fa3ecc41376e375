//! Rendering of subcommand results as JSON, CSV or aligned text.

use std::fmt::Write as _;

use pcompact::report::CountReport;
use pcompact::snf::MatrixText;
use pcompact::{SmithValuations, Valuation};
use serde::Serialize;

use crate::commands::{Census, Crosscheck};
use crate::Format;

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn csv_rows(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory csv");
    for row in rows {
        w.write_record(&row).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8")
}

pub fn count_report(report: &CountReport, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = report.to_json();
            s.push('\n');
            s
        }
        Format::Csv => report.to_csv(),
        Format::Text => report.to_text(),
    }
}

fn torsion_text(vals: &[u32]) -> String {
    if vals.is_empty() {
        "-".into()
    } else {
        vals.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
    }
}

pub fn census(census: &Census, format: Format) -> String {
    match format {
        Format::Json => json(census),
        Format::Csv => csv_rows(
            &["group", "class", "representative", "class_size", "centralizer_order", "element_order", "rank", "torsion", "torsion_order"],
            census.classes.iter().map(|r| {
                vec![
                    census.group.clone(),
                    r.class.to_string(),
                    r.representative.to_string(),
                    r.class_size.to_string(),
                    r.centralizer_order.to_string(),
                    r.element_order.to_string(),
                    r.rank.to_string(),
                    r.torsion_vals.iter().map(u32::to_string).collect::<Vec<_>>().join(" "),
                    r.torsion_order.to_string(),
                ]
            }),
        ),
        Format::Text => {
            let mut s = format!(
                "group {}  p = {}  |W| = {}  Sylow order = {}\n{} classes, {} with torsion; torsion divides Sylow order: {}\n",
                census.group,
                census.p,
                census.order,
                census.sylow_order,
                census.classes.len(),
                census.torsion_classes,
                census.torsion_divides_sylow
            );
            let _ = writeln!(
                s,
                "{:>6} {:>8} {:>10} {:>12} {:>6} {:>5} {:>10} {:>8}",
                "class", "rep", "size", "centralizer", "order", "rank", "torsion", "|A_w|"
            );
            for r in &census.classes {
                let _ = writeln!(
                    s,
                    "{:>6} {:>8} {:>10} {:>12} {:>6} {:>5} {:>10} {:>8}",
                    r.class,
                    r.representative,
                    r.class_size,
                    r.centralizer_order,
                    r.element_order,
                    r.rank,
                    torsion_text(&r.torsion_vals),
                    r.torsion_order
                );
            }
            s
        }
    }
}

pub fn crosscheck(report: &Crosscheck, format: Format) -> String {
    match format {
        Format::Json => json(report),
        Format::Csv => csv_rows(
            &["group", "k", "method", "count", "agree"],
            report.comparisons.iter().flat_map(|c| {
                c.counts.iter().map(|(method, count)| {
                    vec![report.group.clone(), c.k.to_string(), method.to_string(), count.clone(), c.agree.to_string()]
                })
            }),
        ),
        Format::Text => {
            let mut s = format!("group {}  k = 1..={}\n", report.group, report.kmax);
            for c in &report.comparisons {
                let values: Vec<String> = c.counts.iter().map(|(m, v)| format!("{m}={v}")).collect();
                let _ = writeln!(s, "k={:<3} {:<8} {}", c.k, if c.agree { "agree" } else { "DIFFER" }, values.join("  "));
            }
            for note in &report.notes {
                let _ = writeln!(s, "note: {note}");
            }
            let _ = writeln!(s, "{}", if report.pass { "PASS" } else { "FAIL" });
            s
        }
    }
}

#[derive(Serialize)]
struct SmithOut {
    p: u64,
    exp: u32,
    rows: usize,
    cols: usize,
    /// Valuation per diagonal entry; `null` when the entry is zero mod `p^M`.
    valuations: Vec<Option<u32>>,
    /// Diagonal entries `p^e` as decimal strings, `"0"` for saturated entries.
    diagonal: Vec<String>,
    saturated: usize,
}

pub fn smith(matrix: &MatrixText, vals: &SmithValuations, format: Format) -> String {
    let out = SmithOut {
        p: matrix.modulus.p(),
        exp: matrix.modulus.exp(),
        rows: matrix.rows,
        cols: matrix.cols,
        valuations: vals.vals().iter().map(Valuation::finite).collect(),
        diagonal: vals.diagonal().iter().map(|d| d.to_string()).collect(),
        saturated: vals.saturated_count(),
    };
    match format {
        Format::Json => json(&out),
        Format::Csv => csv_rows(
            &["index", "valuation", "diagonal"],
            out.valuations.iter().zip(&out.diagonal).enumerate().map(|(i, (v, d))| {
                vec![i.to_string(), v.map(|e| e.to_string()).unwrap_or_else(|| "inf".into()), d.clone()]
            }),
        ),
        Format::Text => {
            let vals: Vec<String> =
                out.valuations.iter().map(|v| v.map(|e| e.to_string()).unwrap_or_else(|| "inf".into())).collect();
            format!(
                "{}x{} matrix mod {}^{}\nvaluations: {}\ndiagonal:   {}\n",
                out.rows,
                out.cols,
                out.p,
                out.exp,
                vals.join(" "),
                out.diagonal.join(" ")
            )
        }
    }
}
