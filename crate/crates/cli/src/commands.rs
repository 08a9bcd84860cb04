use std::collections::BTreeSet;
use std::io::Write;
use std::process::ExitCode;
use std::str::FromStr;

use serde::Serialize;
use serde_json::json;

use quiddity_core::bridges::{self, Monodromy};
use quiddity_core::enumerate::{self, CellFilter};
use quiddity_core::series::{self, EquationSpec};
use quiddity_core::verify::{self, Scope};
use quiddity_core::{
    formulas, surgery, BigInt, BigRational, Dissection, HJContinuedFraction, RegularCF,
};

use crate::cache::{self, key_field, Cache};
use crate::{
    CfCommand, Cli, CliError, Command, FilterArgs, Global, ModularCommand, ScopeArg, Shape,
    SurgeryCommand,
};

type Out<'a> = &'a mut dyn Write;
type Res<T = ()> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Plain,
    Json,
    Csv,
}

fn format_of(g: &Global) -> Format {
    if g.json {
        Format::Json
    } else if g.csv {
        Format::Csv
    } else {
        Format::Plain
    }
}

fn no_csv(f: Format, what: &str) -> Res {
    if f == Format::Csv {
        return Err(CliError::Usage(format!(
            "--csv is not available for `{what}`"
        )));
    }
    Ok(())
}

fn filter_of(a: &FilterArgs) -> CellFilter {
    if let Some(l) = a.ell {
        CellFilter::EllPeriodic(l)
    } else if let Some(s) = &a.sizes {
        CellFilter::SizeSet(s.iter().copied().collect())
    } else if let Some(k) = a.equal {
        CellFilter::EqualSize(k)
    } else {
        CellFilter::All
    }
}

fn write_json(out: Out, v: &impl Serialize) -> Res {
    serde_json::to_writer_pretty(&mut *out, v)?;
    writeln!(out)?;
    Ok(())
}

/// Looks `key` up in the family's cache file, computing and storing on a miss. Cache
/// trouble never changes the answer, only whether it is remembered.
fn cached(
    g: &Global,
    family: &str,
    key: Vec<String>,
    compute: impl FnOnce() -> Res<String>,
) -> Res<String> {
    let store = match (g.no_cache, cache::resolve_dir(g.cache_dir.as_deref())) {
        (false, Some(dir)) => Cache::open(dir).ok(),
        _ => None,
    };
    let Some(store) = store else {
        return compute();
    };
    if let Some(v) = store.get(family, &key) {
        return Ok(v);
    }
    let v = compute()?;
    if let Err(e) = store.put(family, &key, &v) {
        eprintln!("warning: cache not updated: {e}");
    }
    Ok(v)
}

fn parse_dissection(s: &str) -> Res<Dissection> {
    Ok(Dissection::from_str(s)?)
}

fn parse_list(s: &str) -> Res<Vec<u64>> {
    s.split(',')
        .map(|t| t.trim().parse::<u64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| {
            CliError::Usage(format!(
                "expected comma-separated nonnegative integers, got `{s}`"
            ))
        })
}

fn parse_rational(s: &str) -> Res<BigRational> {
    let bad = || CliError::Usage(format!("expected a rational `p/q`, got `{s}`"));
    let (p, q) = s.split_once('/').ok_or_else(bad)?;
    let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
    let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
    if q == BigInt::from(0) {
        return Err(CliError::Domain(format!("zero denominator in `{s}`")));
    }
    Ok(BigRational::new(p, q))
}

pub fn run(cli: &Cli, out: Out) -> Res<ExitCode> {
    let g = &cli.global;
    let f = format_of(g);
    match &cli.command {
        Command::Enumerate { shape, max_results } => enumerate(shape, *max_results, f, out)?,
        Command::Count { shape } => counts(g, "count", shape, f, out)?,
        Command::Quiddities { shape } => counts(g, "quiddities", shape, f, out)?,
        Command::Classes { shape, reports } => classes(shape, *reports, f, out)?,
        Command::Of { dissection } => of(dissection, f, out)?,
        Command::Formula { name, args } => formula(g, name, args, f, out)?,
        Command::Series {
            equation,
            order,
            ell,
        } => series_dump(equation, *order, *ell, f, out)?,
        Command::Surgery(c) => surgery_cmd(c, f, out)?,
        Command::Cf(c) => cf_cmd(c, f, out)?,
        Command::Modular(c) => return modular_cmd(c, f, out),
        Command::Table { max_n } => table(g, *max_n, f, out)?,
        Command::VerifyAll { scope } => return verify_all(*scope, f, out),
    }
    Ok(ExitCode::SUCCESS)
}

fn enumerate(shape: &Shape, max_results: Option<usize>, f: Format, out: Out) -> Res {
    no_csv(f, "enumerate")?;
    let filter = filter_of(&shape.filter);
    let limit = max_results.unwrap_or(usize::MAX);
    let mut seen = 0usize;
    let mut lines = Vec::new();
    let mut io_err = None;
    enumerate::for_each_dissection(shape.n, shape.m, &filter, |d| {
        if seen >= limit || io_err.is_some() {
            return;
        }
        seen += 1;
        if f == Format::Json {
            lines.push(d.to_string());
        } else if let Err(e) = writeln!(out, "{d}") {
            io_err = Some(e);
        }
    })?;
    if let Some(e) = io_err {
        return Err(e.into());
    }
    if f == Format::Json {
        write_json(out, &lines)?;
    }
    Ok(())
}

/// `count` and `quiddities`: one row per cell count, `n` being the vertex count minus two.
fn counts(g: &Global, family: &str, shape: &Shape, f: Format, out: Out) -> Res {
    let filter = filter_of(&shape.filter);
    let n = shape.n;
    let ms: Vec<usize> = match shape.m {
        Some(m) => vec![m],
        None if n >= 3 => (1..=n - 2).collect(),
        None => vec![1],
    };
    let mut rows = Vec::new();
    for m in ms {
        let key = vec![n.to_string(), m.to_string(), key_field(&filter)];
        let value = cached(g, family, key, || {
            let v = if family == "count" {
                enumerate::count_dissections(n, m, &filter)?
            } else {
                enumerate::count_quiddities(n, m, &filter)?
            };
            Ok(v.to_string())
        })?;
        rows.push((n.saturating_sub(2), m, value));
    }
    match f {
        Format::Plain if shape.m.is_some() => writeln!(out, "{}", rows[0].2)?,
        Format::Json => write_json(
            out,
            &rows
                .iter()
                .map(|(n, m, v)| json!({"n": n, "m": m, "value": v}))
                .collect::<Vec<_>>(),
        )?,
        _ => write_csv(out, &rows)?,
    }
    Ok(())
}

fn write_csv(out: Out, rows: &[(usize, usize, String)]) -> Res {
    writeln!(out, "n,m,value")?;
    for (n, m, v) in rows {
        writeln!(out, "{n},{m},{v}")?;
    }
    Ok(())
}

fn classes(shape: &Shape, reports: bool, f: Format, out: Out) -> Res {
    no_csv(f, "classes")?;
    let m = shape
        .m
        .ok_or_else(|| CliError::Usage("`classes` needs --m".into()))?;
    let table = enumerate::quiddity_classes(shape.n, m, &filter_of(&shape.filter))?;
    if reports {
        write_json(out, &table.reports())
    } else {
        write_json(out, &table.export_map())
    }
}

fn of(text: &str, f: Format, out: Out) -> Res {
    no_csv(f, "of")?;
    let d = parse_dissection(text)?;
    let q = d.quiddity();
    if f == Format::Json {
        let list = d.cells();
        let cells: Vec<&Vec<usize>> = list.cells.iter().map(|c| &c.vertices).collect();
        return write_json(
            out,
            &json!({
                "dissection": d.to_string(),
                "quiddity": q.0,
                "cells": cells,
                "cell_count": d.cell_count(),
            }),
        );
    }
    writeln!(out, "{q}")?;
    Ok(())
}

fn arity(name: &str, args: &[i64], want: usize) -> Res {
    if args.len() != want {
        return Err(CliError::Usage(format!(
            "`formula {name}` takes {want} argument(s), got {}",
            args.len()
        )));
    }
    Ok(())
}

fn formula(g: &Global, name: &str, args: &[i64], f: Format, out: Out) -> Res {
    if name == "quiddity-3p" && args.is_empty() {
        return table(g, 14, f, out);
    }
    let want = match name {
        "catalan" => 1,
        "kirkman-cayley" | "fuss" | "tri-quad" | "quiddity-3p" | "binomial" => 2,
        "ell-periodic" => 3,
        _ => return Err(CliError::Usage(format!("unknown formula `{name}`"))),
    };
    arity(name, args, want)?;
    let key = vec![
        name.to_string(),
        args.iter()
            .map(i64::to_string)
            .collect::<Vec<_>>()
            .join(";"),
    ];
    let value = cached(g, "formula", key, || {
        let v = match name {
            "catalan" => formulas::catalan(args[0])?,
            "kirkman-cayley" => formulas::kirkman_cayley(args[0], args[1])?,
            "fuss" => formulas::fuss(args[0], args[1])?,
            "tri-quad" => formulas::tri_quad_count(args[0], args[1])?,
            "quiddity-3p" => formulas::quiddity_count_3periodic(args[0], args[1])?,
            "ell-periodic" => formulas::ell_periodic_count(args[0], args[1], args[2])?,
            _ => {
                if args[0] < 0 && args[1] >= 1 {
                    return Err(CliError::Domain("binomial top must be nonnegative".into()));
                }
                formulas::binomial(args[0], args[1])
            }
        };
        Ok(v.to_string())
    })?;
    match f {
        Format::Json => write_json(out, &json!({"formula": name, "args": args, "value": value})),
        _ => Ok(writeln!(out, "{value}")?),
    }
}

/// Rows `m = n, n-3, ...` with `m >= 1`, and the empty polygon at `(0, 0)`.
fn table(g: &Global, max_n: i64, f: Format, out: Out) -> Res {
    if max_n < 0 {
        return Err(CliError::Domain("--max-n must be nonnegative".into()));
    }
    let mut rows = Vec::new();
    for n in 0..=max_n {
        let mut m = n;
        while m >= 1 || (n == 0 && m == 0) {
            let key = vec!["quiddity-3p".to_string(), format!("{n};{m}")];
            let v = cached(g, "formula", key, || {
                Ok(formulas::quiddity_count_3periodic(n, m)?.to_string())
            })?;
            rows.push((n as usize, m as usize, v));
            if m < 3 {
                break;
            }
            m -= 3;
        }
    }
    match f {
        Format::Json => write_json(
            out,
            &rows
                .iter()
                .map(|(n, m, v)| json!({"n": n, "m": m, "value": v}))
                .collect::<Vec<_>>(),
        ),
        _ => write_csv(out, &rows),
    }
}

fn series_dump(name: &str, order: usize, ell: Option<usize>, f: Format, out: Out) -> Res {
    let spec = match (name, ell) {
        ("catalan", _) => Some(EquationSpec::Catalan),
        ("kirkman-cayley", _) => Some(EquationSpec::KirkmanCayley),
        ("ell-periodic", Some(l)) => Some(EquationSpec::EllPeriodic(l)),
        ("ell-periodic", None) => {
            return Err(CliError::Usage("`series ell-periodic` needs --ell".into()))
        }
        ("tri-quad", _) => Some(EquationSpec::TriQuad),
        ("p", _) => Some(EquationSpec::P),
        ("q", _) => None,
        _ => return Err(CliError::Usage(format!("unknown equation `{name}`"))),
    };
    let s = match spec {
        Some(spec) => series::solve_fixed_point(spec, order)?,
        None => series::compose_q(&series::solve_fixed_point(EquationSpec::P, order)?)?,
    };
    let terms = s.terms();
    match f {
        Format::Csv => {
            let rows: Vec<_> = terms.into_iter().map(|t| (t.n, t.m, t.coeff)).collect();
            write_csv(out, &rows)
        }
        _ => write_json(out, &terms),
    }
}

fn parse_removed(d: &Dissection, text: &str) -> Res<[quiddity_core::Chord; 2]> {
    let chords = Dissection::from_str(&format!("{}:{text}", d.n_vertices()))?;
    match chords.chords() {
        &[a, b] => Ok([a, b]),
        _ => Err(CliError::Usage(format!(
            "expected two chords `a-b,c-d`, got `{text}`"
        ))),
    }
}

fn surgery_cmd(c: &SurgeryCommand, f: Format, out: Out) -> Res {
    no_csv(f, "surgery")?;
    match c {
        SurgeryCommand::Moves { dissection, any } => {
            let d = parse_dissection(dissection)?;
            write_json(out, &surgery::find_surgeries(&d, !any)?)
        }
        SurgeryCommand::Apply {
            dissection,
            removed,
        } => {
            let d = parse_dissection(dissection)?;
            let removed = parse_removed(&d, removed)?;
            let mv = surgery::find_surgeries(&d, false)?
                .into_iter()
                .find(|mv| mv.removed == removed)
                .ok_or_else(|| {
                    CliError::Domain(format!(
                        "no surgery on {d} removes {}-{},{}-{}",
                        removed[0].0, removed[0].1, removed[1].0, removed[1].1
                    ))
                })?;
            let result = surgery::apply_surgery(&d, &mv)?;
            if f == Format::Json {
                return write_json(out, &json!({"dissection": result, "move": mv}));
            }
            Ok(writeln!(out, "{result}")?)
        }
        SurgeryCommand::Canon { dissection } => {
            let d = parse_dissection(dissection)?;
            let (open, moves) = surgery::canonicalize_traced(&d)?;
            if f == Format::Json {
                return write_json(
                    out,
                    &json!({"dissection": d, "maximally_open": open, "moves": moves}),
                );
            }
            Ok(writeln!(out, "{open}")?)
        }
        SurgeryCommand::Class { dissection, any } => {
            let d = parse_dissection(dissection)?;
            let members: BTreeSet<Dissection> = surgery::surgery_class(&d, !any)?;
            let open = if *any {
                None
            } else {
                Some(surgery::canonicalize_maximally_open(&d)?)
            };
            write_json(
                out,
                &json!({
                    "quiddity": d.quiddity().to_string(),
                    "members": members,
                    "maximally_open": open,
                }),
            )
        }
    }
}

fn cf_cmd(c: &CfCommand, f: Format, out: Out) -> Res {
    no_csv(f, "cf")?;
    match c {
        CfCommand::Eval { terms, hj } => {
            let t = parse_list(terms)?;
            let v = if *hj {
                bridges::eval_hj(&HJContinuedFraction::new(t)?)
            } else {
                bridges::eval_regular(&RegularCF::new(t)?)
            };
            match f {
                Format::Json => write_json(out, &json!({"value": v.to_string()})),
                _ => Ok(writeln!(out, "{v}")?),
            }
        }
        CfCommand::Convert { value, hj } => {
            let (q, regular, hjcf) = if value.contains('/') {
                let q = parse_rational(value)?;
                let r = RegularCF::from_rational(&q)?;
                let h = HJContinuedFraction::from_rational(&q)?;
                (q, r, h)
            } else if *hj {
                let h = HJContinuedFraction::new(parse_list(value)?)?;
                (bridges::eval_hj(&h), bridges::hj_to_regular(&h), h)
            } else {
                let r = RegularCF::new(parse_list(value)?)?;
                (
                    bridges::eval_regular(&r),
                    r.clone(),
                    bridges::regular_to_hj(&r),
                )
            };
            match f {
                Format::Json => write_json(
                    out,
                    &json!({"rational": q.to_string(), "regular": regular.terms(), "hj": hjcf.terms()}),
                ),
                _ => Ok(writeln!(out, "rational {q}\nregular {regular}\nhj {hjcf}")?),
            }
        }
        CfCommand::Strip { terms } => {
            let cf = RegularCF::new(parse_list(terms)?)?;
            let strip = bridges::strip_triangulation(&cf);
            if f == Format::Json {
                return write_json(
                    out,
                    &json!({
                        "dissection": strip.dissection,
                        "top_vertices": strip.top_vertices,
                        "bottom_vertices": strip.bottom_vertices,
                        "triangles": strip.triangles,
                        "top_quiddity": strip.top_quiddity(),
                    }),
                );
            }
            Ok(writeln!(out, "{}", strip.dissection)?)
        }
    }
}

fn monodromy_name(m: Monodromy) -> &'static str {
    match m {
        Monodromy::PlusIdentity => "+Id",
        Monodromy::MinusIdentity => "-Id",
        Monodromy::Neither => "neither",
    }
}

fn modular_cmd(c: &ModularCommand, f: Format, out: Out) -> Res<ExitCode> {
    no_csv(f, "modular")?;
    match c {
        ModularCommand::Product { entries } => {
            let m = bridges::elementary_product(&parse_list(entries)?)?;
            match f {
                Format::Json => write_json(out, &json!({"matrix": m.rows()}))?,
                _ => writeln!(out, "{m}")?,
            }
        }
        ModularCommand::Classify { entries } => {
            let r = bridges::classify_monodromy(&parse_list(entries)?)?;
            let name = monodromy_name(r.classification);
            match f {
                Format::Json => write_json(
                    out,
                    &json!({"matrix": r.matrix.rows(), "classification": name}),
                )?,
                _ => writeln!(out, "{name}")?,
            }
        }
        ModularCommand::Verify { n, bound } => {
            let bound = bound.unwrap_or((*n as u64).saturating_sub(2).max(1));
            let report = bridges::verify_theorem_val(*n, bound)?;
            write_json(out, &report)?;
            if !report.passed() {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn verify_all(scope: ScopeArg, f: Format, out: Out) -> Res<ExitCode> {
    no_csv(f, "verify-all")?;
    let scope = match scope {
        ScopeArg::Fast => Scope::Fast,
        ScopeArg::Full => Scope::Full,
    };
    let results = verify::verify_all(scope);
    for r in &results {
        eprintln!("{}: {:.2} s", r.name, r.seconds);
    }
    if f == Format::Json {
        let rows: Vec<_> = results
            .iter()
            .map(|r| json!({"name": r.name, "passed": r.passed, "detail": r.detail}))
            .collect();
        write_json(out, &rows)?;
    } else {
        for r in &results {
            writeln!(
                out,
                "{} {}: {}",
                if r.passed { "PASS" } else { "FAIL" },
                r.name,
                r.detail
            )?;
        }
    }
    Ok(if results.iter().all(|r| r.passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
