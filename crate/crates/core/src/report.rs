//! Serializable results of a count.
//!
//! Counts are arbitrary-precision integers and are always written as decimal
//! strings in JSON, so no consumer ever sees a rounded value.

use std::fmt::Write as _;
use std::time::Duration;

use num_bigint::BigUint;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matgroup::ConjugacyClassRecord;

pub(crate) fn as_decimal<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_str_radix(10))
}

/// How a count was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Method {
    #[serde(rename = "burnside")]
    Burnside,
    #[serde(rename = "classes")]
    Classes,
    #[serde(rename = "formula")]
    Formula,
    #[serde(rename = "theoremA")]
    TheoremA,
    #[serde(rename = "theoremB")]
    TheoremB,
    #[serde(rename = "theoremC")]
    TheoremC,
    #[serde(rename = "oracle")]
    Oracle,
    #[serde(rename = "domain")]
    Domain,
    #[serde(rename = "closed-form")]
    ClosedForm,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Burnside => "burnside",
            Method::Classes => "classes",
            Method::Formula => "formula",
            Method::TheoremA => "theoremA",
            Method::TheoremB => "theoremB",
            Method::TheoremC => "theoremC",
            Method::Oracle => "oracle",
            Method::Domain => "domain",
            Method::ClosedForm => "closed-form",
        }
    }

    pub fn parse(s: &str) -> Result<Method> {
        Ok(match s {
            "burnside" => Method::Burnside,
            "classes" => Method::Classes,
            "formula" => Method::Formula,
            "theoremA" => Method::TheoremA,
            "theoremB" => Method::TheoremB,
            "theoremC" => Method::TheoremC,
            "oracle" => Method::Oracle,
            "domain" => Method::Domain,
            "closed-form" => Method::ClosedForm,
            other => return Err(Error::Parse(format!("unknown method {other:?}"))),
        })
    }
}

/// Contribution of one conjugacy class to a Burnside sum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassRow {
    pub class: usize,
    pub representative: usize,
    pub class_size: u64,
    pub centralizer_order: u64,
    pub element_order: u64,
    pub rank: u32,
    pub torsion: Vec<u32>,
    /// Fixed points of one class member on `(Z/p^k)^l`.
    #[serde(serialize_with = "as_decimal")]
    pub fixed_points: BigUint,
}

impl ClassRow {
    pub fn from_record(class: usize, r: &ConjugacyClassRecord, fixed_points: BigUint) -> Self {
        ClassRow {
            class,
            representative: r.representative,
            class_size: r.class_size,
            centralizer_order: r.centralizer_order,
            element_order: r.element_order,
            rank: r.rank,
            torsion: r.torsion_vals.clone(),
            fixed_points,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountReport {
    pub group: String,
    pub p: u64,
    pub k: u32,
    pub method: Method,
    #[serde(serialize_with = "as_decimal")]
    pub count: BigUint,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classes: Option<Vec<ClassRow>>,
    #[serde(skip)]
    pub elapsed: Option<Duration>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

impl CountReport {
    pub fn new(group: impl Into<String>, p: u64, k: u32, method: Method, count: BigUint) -> Self {
        CountReport {
            group: group.into(),
            p,
            k,
            method,
            count,
            classes: None,
            elapsed: None,
            elapsed_ms: None,
        }
    }

    pub fn with_classes(mut self, rows: Vec<ClassRow>) -> Self {
        self.classes = Some(rows);
        self
    }

    pub fn with_elapsed(mut self, d: Duration) -> Self {
        self.elapsed = Some(d);
        self.elapsed_ms = Some(d.as_secs_f64() * 1e3);
        self
    }

    /// Drop timing information so that output is byte-for-byte reproducible.
    pub fn without_timing(mut self) -> Self {
        self.elapsed = None;
        self.elapsed_ms = None;
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One CSV row per class; a single row with empty class columns when no
    /// breakdown is attached.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "group",
            "p",
            "k",
            "method",
            "count",
            "class",
            "representative",
            "class_size",
            "centralizer_order",
            "element_order",
            "rank",
            "torsion",
            "fixed_points",
        ])
        .expect("in-memory csv");
        let head = [
            self.group.clone(),
            self.p.to_string(),
            self.k.to_string(),
            self.method.as_str().to_string(),
            self.count.to_string(),
        ];
        match &self.classes {
            Some(rows) if !rows.is_empty() => {
                for r in rows {
                    let torsion: Vec<String> = r.torsion.iter().map(u32::to_string).collect();
                    let mut rec = head.to_vec();
                    rec.extend([
                        r.class.to_string(),
                        r.representative.to_string(),
                        r.class_size.to_string(),
                        r.centralizer_order.to_string(),
                        r.element_order.to_string(),
                        r.rank.to_string(),
                        torsion.join(" "),
                        r.fixed_points.to_string(),
                    ]);
                    w.write_record(&rec).expect("in-memory csv");
                }
            }
            _ => {
                let mut rec = head.to_vec();
                rec.extend(std::iter::repeat_n(String::new(), 8));
                w.write_record(&rec).expect("in-memory csv");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8")
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "group {}  p = {}  k = {}  method = {}\ncount = {}\n",
            self.group,
            self.p,
            self.k,
            self.method.as_str(),
            self.count
        );
        if let Some(rows) = &self.classes {
            let _ = writeln!(
                s,
                "{:>6} {:>8} {:>10} {:>12} {:>6} {:>5} {:>10} {:>14}",
                "class", "rep", "size", "centralizer", "order", "rank", "torsion", "fixed"
            );
            for r in rows {
                let torsion: Vec<String> = r.torsion.iter().map(u32::to_string).collect();
                let _ = writeln!(
                    s,
                    "{:>6} {:>8} {:>10} {:>12} {:>6} {:>5} {:>10} {:>14}",
                    r.class,
                    r.representative,
                    r.class_size,
                    r.centralizer_order,
                    r.element_order,
                    r.rank,
                    if torsion.is_empty() { "-".to_string() } else { torsion.join(",") },
                    r.fixed_points
                );
            }
        }
        if let Some(ms) = self.elapsed_ms {
            let _ = writeln!(s, "elapsed {ms:.1} ms");
        }
        s
    }
}
