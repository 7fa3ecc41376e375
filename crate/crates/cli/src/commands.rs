use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigUint;
use serde::Serialize;

use pcompact::catalog::{build_with_cap, exponents, GroupSpec};
use pcompact::closed_forms::{theorem_a, theorem_c, ClosedFormGroup};
use pcompact::counting::{
    count_burnside_classes, count_burnside_full, count_formula_general, p_part, torsion_census,
    torsion_divides_sylow, CensusRow,
};
use pcompact::grassmannian::{build_orbits, distinguished_in, enumerate_distinguished, sphere_count, theorem_b};
use pcompact::matgroup::{ClassTable, FiniteMatrixGroup};
use pcompact::oracle::orbit_count_bruteforce;
use pcompact::report::{CountReport, Method};
use pcompact::{Error, SquareMatrix};

use crate::output;
use crate::{
    ClassesArgs, Common, CountArgs, CrosscheckArgs, Failure, FormulaArgs, GroupArgs, MethodArg, SnfArgs,
};

/// Rendered output, or a failure with whatever output was produced first.
pub type Outcome = Result<String, (Option<String>, Failure)>;

fn fail<E: Into<Failure>>(e: E) -> (Option<String>, Failure) {
    (None, e.into())
}

/// What a `--group` flag can name.
#[derive(Clone, Copy, Debug)]
enum Target {
    Group(GroupSpec),
    /// X34 has no group realization, only its closed form.
    X34,
}

impl Target {
    fn label(&self) -> String {
        match self {
            Target::Group(spec) => spec.to_string(),
            Target::X34 => "x34".into(),
        }
    }
}

fn target(args: &GroupArgs) -> Result<Target, Error> {
    if let Some(g) = &args.group {
        let lower = g.trim().to_ascii_lowercase();
        return match lower.as_str() {
            "x34" | "g34" => Ok(Target::X34),
            "x12" | "x24" | "x29" | "x31" => Ok(Target::Group(lower.replacen('x', "g", 1).parse()?)),
            _ => Ok(Target::Group(lower.parse()?)),
        };
    }
    match (args.m, args.s, args.n, args.p) {
        (Some(m), Some(s), Some(n), Some(p)) => {
            let spec = GroupSpec::Family2a { m, s, n, p };
            spec.validate()?;
            Ok(Target::Group(spec))
        }
        (None, None, None, None) => Err(Error::Parse("missing --group (or --m --s --n --p)".into())),
        _ => Err(Error::Parse("family 2a needs all of --m --s --n --p".into())),
    }
}

fn group_spec(args: &GroupArgs) -> Result<GroupSpec, Error> {
    match target(args)? {
        Target::Group(spec) => Ok(spec),
        Target::X34 => Err(Error::SpecInvalid("x34 has no matrix group; only its closed form is available".into())),
    }
}

fn build_group(spec: &GroupSpec, k: u32, common: &Common) -> Result<FiniteMatrixGroup, Error> {
    build_with_cap(spec, spec.working_modulus(k)?, common.closure_cap)
}

fn classes_of(group: &FiniteMatrixGroup, common: &Common) -> Result<ClassTable, Error> {
    group.conjugacy_classes_with(common.precision_ceiling)
}

fn closed_form_of(spec: &GroupSpec) -> Option<ClosedFormGroup> {
    match spec {
        GroupSpec::G12 => Some(ClosedFormGroup::X12),
        GroupSpec::G24 => Some(ClosedFormGroup::X24),
        GroupSpec::G29 => Some(ClosedFormGroup::X29),
        GroupSpec::G31 => Some(ClosedFormGroup::X31),
        _ => None,
    }
}

fn is_modular(spec: &GroupSpec) -> bool {
    spec.expected_order().is_multiple_of(spec.prime())
}

fn check_k(k: u32) -> Result<(), Error> {
    if k == 0 {
        return Err(Error::SpecInvalid("k must be at least 1".into()));
    }
    Ok(())
}

fn finish(report: CountReport, common: &Common) -> String {
    let report = if common.no_timing { report.without_timing() } else { report };
    output::count_report(&report, common.format)
}

/// Evaluate one method; the group is built on demand.
fn run_method(
    target: Target,
    method: MethodArg,
    k: u32,
    custom_exponents: Option<&[u64]>,
    common: &Common,
) -> Result<CountReport, Error> {
    check_k(k)?;
    let start = Instant::now();
    let spec = match (target, method) {
        (Target::X34, MethodArg::TheoremC) => {
            let count = theorem_c(ClosedFormGroup::X34, k)?;
            return Ok(CountReport::new("x34", ClosedFormGroup::X34.prime(), k, Method::TheoremC, count)
                .with_elapsed(start.elapsed()));
        }
        (Target::X34, _) => {
            return Err(Error::SpecInvalid("x34 has no matrix group; use --method theoremC".into()));
        }
        (Target::Group(spec), _) => spec,
    };
    let label = spec.to_string();
    let p = spec.prime();
    let simple = |method: Method, count: BigUint| CountReport::new(label.clone(), p, k, method, count).with_elapsed(start.elapsed());
    match method {
        MethodArg::Burnside => count_burnside_full(&build_group(&spec, k, common)?, k),
        MethodArg::Classes => {
            let g = build_group(&spec, k, common)?;
            count_burnside_classes(&g, &classes_of(&g, common)?, k)
        }
        MethodArg::Formula => {
            let g = build_group(&spec, k, common)?;
            let exps = match custom_exponents {
                Some(e) => e.to_vec(),
                None => exponents(&spec)?.0,
            };
            count_formula_general(&g, &classes_of(&g, common)?, &exps, k)
        }
        MethodArg::TheoremA => {
            let exps = match custom_exponents {
                Some(e) => e.to_vec(),
                None => {
                    if is_modular(&spec) {
                        return Err(Error::SpecInvalid(format!(
                            "{spec} is modular (p = {p} divides |W| = {}); the product formula does not apply",
                            spec.expected_order()
                        )));
                    }
                    exponents(&spec)?.0
                }
            };
            Ok(simple(Method::TheoremA, theorem_a(&exps, p, k)?))
        }
        MethodArg::TheoremB => {
            let count = match spec {
                GroupSpec::Family2a { m, s, n, p } => theorem_b(m, s, n, p, k)?,
                GroupSpec::Sphere { m, p } => sphere_count(m, p, k)?,
                _ => return Err(Error::SpecInvalid(format!("theoremB applies to family 2a and spheres, not {spec}"))),
            };
            Ok(simple(Method::TheoremB, count))
        }
        MethodArg::TheoremC => {
            let cf = closed_form_of(&spec)
                .ok_or_else(|| Error::SpecInvalid(format!("theoremC applies to g12, g24, g29, g31, x34, not {spec}")))?;
            Ok(simple(Method::TheoremC, theorem_c(cf, k)?))
        }
        MethodArg::Oracle => {
            let g = build_group(&spec, k, common)?;
            let count = orbit_count_bruteforce(&g, k, common.oracle_cap)?;
            Ok(simple(Method::Oracle, count))
        }
        MethodArg::Domain => {
            let count = match spec {
                GroupSpec::Family2a { m, s, n, p } => enumerate_distinguished(m, s, n, p, k, false)?.count,
                GroupSpec::Sphere { m, p } => distinguished_in(&build_orbits(m, 1, p, k)?, 1, false)?.count,
                _ => return Err(Error::SpecInvalid(format!("domain applies to family 2a and spheres, not {spec}"))),
            };
            Ok(simple(Method::Domain, count))
        }
    }
}

pub fn count(args: &CountArgs) -> Outcome {
    let common = &args.group.common;
    let target = target(&args.group).map_err(fail)?;
    let report = run_method(target, args.method, args.k, args.exponents.as_deref(), common).map_err(fail)?;
    Ok(finish(report, common))
}

pub fn classes(args: &ClassesArgs) -> Outcome {
    let common = &args.group.common;
    check_k(args.k).map_err(fail)?;
    let spec = group_spec(&args.group).map_err(fail)?;
    let g = build_group(&spec, args.k, common).map_err(fail)?;
    let table = classes_of(&g, common).map_err(fail)?;
    let report = count_burnside_classes(&g, &table, args.k).map_err(fail)?;
    Ok(finish(report, common))
}

#[derive(Serialize)]
pub struct Census {
    pub group: String,
    pub p: u64,
    pub order: u64,
    pub sylow_order: u64,
    pub torsion_classes: usize,
    pub torsion_divides_sylow: bool,
    pub classes: Vec<CensusRow>,
}

pub fn census(args: &GroupArgs) -> Outcome {
    let common = &args.common;
    let spec = group_spec(args).map_err(fail)?;
    let g = build_group(&spec, 1, common).map_err(fail)?;
    let table = classes_of(&g, common).map_err(fail)?;
    let rows = torsion_census(&g, &table);
    let order = g.order() as u64;
    let census = Census {
        group: spec.to_string(),
        p: spec.prime(),
        order,
        sylow_order: p_part(order, spec.prime()),
        torsion_classes: rows.iter().filter(|r| !r.torsion_vals.is_empty()).count(),
        torsion_divides_sylow: torsion_divides_sylow(&rows, order, spec.prime()),
        classes: rows,
    };
    Ok(output::census(&census, common.format))
}

#[derive(Serialize)]
pub struct Comparison {
    pub k: u32,
    /// Count per method, as decimal strings.
    pub counts: BTreeMap<&'static str, String>,
    pub agree: bool,
}

#[derive(Serialize)]
pub struct Crosscheck {
    pub group: String,
    pub kmax: u32,
    pub pass: bool,
    pub comparisons: Vec<Comparison>,
    pub notes: Vec<String>,
}

fn applicable_methods(spec: &GroupSpec) -> Vec<MethodArg> {
    let mut methods = vec![MethodArg::Burnside, MethodArg::Classes, MethodArg::Formula, MethodArg::Oracle];
    if spec.is_exceptional() {
        methods.push(MethodArg::TheoremC);
    }
    if !is_modular(spec) {
        methods.push(MethodArg::TheoremA);
    }
    match spec {
        GroupSpec::Family2a { .. } | GroupSpec::Sphere { .. } => {
            methods.push(MethodArg::TheoremB);
            methods.push(MethodArg::Domain);
        }
        _ => {}
    }
    methods
}

fn method_name(m: MethodArg) -> &'static str {
    match m {
        MethodArg::Burnside => "burnside",
        MethodArg::Classes => "classes",
        MethodArg::Formula => "formula",
        MethodArg::TheoremA => "theoremA",
        MethodArg::TheoremB => "theoremB",
        MethodArg::TheoremC => "theoremC",
        MethodArg::Oracle => "oracle",
        MethodArg::Domain => "domain",
    }
}

pub fn crosscheck(args: &CrosscheckArgs) -> Outcome {
    let common = &args.group.common;
    check_k(args.kmax).map_err(fail)?;
    let target = target(&args.group).map_err(fail)?;
    let mut comparisons = Vec::new();
    let mut notes = Vec::new();
    let mut first_divergence = None;
    match target {
        Target::X34 => {
            notes.push("x34 has no matrix group; only integrality of the closed form is checked".into());
            for k in 1..=args.kmax {
                let mut counts = BTreeMap::new();
                let agree = match theorem_c(ClosedFormGroup::X34, k) {
                    Ok(v) => {
                        counts.insert("theoremC", v.to_string());
                        true
                    }
                    Err(e) => {
                        first_divergence.get_or_insert_with(|| format!("k={k}: {e}"));
                        false
                    }
                };
                comparisons.push(Comparison { k, counts, agree });
            }
        }
        Target::Group(spec) => {
            let g = build_group(&spec, args.kmax, common).map_err(fail)?;
            let table = classes_of(&g, common).map_err(fail)?;
            let exps = exponents(&spec).map_err(fail)?.0;
            let l = spec.rank() as u32;
            for k in 1..=args.kmax {
                let mut counts = BTreeMap::new();
                for method in applicable_methods(&spec) {
                    let value = match method {
                        MethodArg::Burnside => count_burnside_full(&g, k).map(|r| r.count),
                        MethodArg::Classes => count_burnside_classes(&g, &table, k).map(|r| r.count),
                        MethodArg::Formula => count_formula_general(&g, &table, &exps, k).map(|r| r.count),
                        MethodArg::Oracle => {
                            let points = (spec.prime() as u128).checked_pow(k * l);
                            if points.is_none_or(|n| n > common.oracle_cap as u128) {
                                notes.push(format!("k={k}: oracle skipped, point space exceeds the cap"));
                                continue;
                            }
                            orbit_count_bruteforce(&g, k, common.oracle_cap)
                        }
                        _ => run_method(target, method, k, None, common).map(|r| r.count),
                    };
                    match value {
                        Ok(v) => {
                            counts.insert(method_name(method), v.to_string());
                        }
                        Err(Error::SpaceTooLarge(..)) => {
                            notes.push(format!("k={k}: {} skipped, table too large", method_name(method)));
                        }
                        Err(e) => return Err(fail(e)),
                    }
                }
                let mut values = counts.iter();
                let agree = match values.next() {
                    Some((first_name, first)) => {
                        let mut ok = true;
                        for (name, v) in values {
                            if v != first {
                                ok = false;
                                first_divergence
                                    .get_or_insert_with(|| format!("k={k}: {first_name} {first} != {name} {v}"));
                            }
                        }
                        ok
                    }
                    None => true,
                };
                comparisons.push(Comparison { k, counts, agree });
            }
        }
    }
    let report = Crosscheck {
        group: target.label(),
        kmax: args.kmax,
        pass: first_divergence.is_none(),
        comparisons,
        notes,
    };
    let rendered = output::crosscheck(&report, common.format);
    match first_divergence {
        None => Ok(rendered),
        Some(d) => Err((Some(rendered), Failure::Divergence(d))),
    }
}

pub fn snf(args: &SnfArgs) -> Outcome {
    let text = std::fs::read_to_string(&args.file)
        .map_err(|e| fail(Failure::Io(format!("{}: {e}", args.file.display()))))?;
    let matrix = SquareMatrix::parse_text(&text).map_err(fail)?;
    Ok(output::smith(&matrix, &matrix.smith_valuations(), args.common.format))
}

pub fn formula(args: &FormulaArgs) -> Outcome {
    let common = &args.common;
    let start = Instant::now();
    let report = match (&args.exponents, &args.group) {
        (Some(exps), _) => {
            let p = args.p.expect("clap enforces --p");
            pcompact::Modulus::new(p, 1).map_err(fail)?;
            let label = format!(
                "exponents:{}",
                exps.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
            );
            let count = theorem_a(exps, p, args.k).map_err(fail)?;
            CountReport::new(label, p, args.k, Method::ClosedForm, count)
        }
        (None, Some(g)) => {
            let cf: ClosedFormGroup = g.parse().map_err(fail)?;
            let count = theorem_c(cf, args.k).map_err(fail)?;
            CountReport::new(cf.to_string(), cf.prime(), args.k, Method::ClosedForm, count)
        }
        (None, None) => return Err(fail(Error::Parse("formula needs --group or --exponents".into()))),
    };
    Ok(finish(report.with_elapsed(start.elapsed()), common))
}
