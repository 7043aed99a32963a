//! Command-line experiments with generator systems: build catalog examples,
//! enumerate orbits to CSV, classify them, estimate levels, inspect fixed
//! points, find witness intervals and transport words, and render SVG
//! pictures.
//!
//! Exit codes: 0 success, 1 domain errors (unusable maps, failing searches,
//! unreadable inputs), 2 usage errors.

mod config;
mod csv;
mod svg;

use config::{build_system, config_for_catalog, parse_config, render_config};
use orbitkit::action::{
    common_fixed_points, orbit, transport_word, witness_interval, ComponentDecomposition,
    GeneratorSystem, OrbitBudget,
};
use orbitkit::catalog::{build_example, ExampleParams};
use orbitkit::classify::{classify, estimate_level, ClassifyParams};
use orbitkit::homeo::DomainKind;
use orbitkit::rational::{format_rational, parse_rational, to_f64, Rational};
use std::collections::BTreeMap;
use std::process::ExitCode;

struct Usage(String);
struct Failure(String);

impl From<String> for Failure {
    fn from(s: String) -> Self {
        Failure(s)
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match dispatch(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Ok(Failure(m))) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Err(Usage(m))) => {
            eprintln!("usage error: {m}");
            eprintln!("{USAGE}");
            ExitCode::from(2)
        }
    }
}

const USAGE: &str = "\
usage: orbitkit <command> [options]

commands:
  example <name> [--param k=v]... [--as-printed] --out PATH
      write a catalog system configuration
  orbit --system PATH --point R [--max-word-len N] [--max-points N]
        [--prec R] [--dedup-tol R] --out CSV
      enumerate an orbit sample
  classify --system PATH --point R [--max-word-len N] [--max-points N]
        [--budget-double] [--prec R] [--dedup-tol R]
        [--min-points N] [--eps-dense FRACTION]
      classify an orbit sample
  level --system PATH --point R [--max-word-len N] [--max-points N]
      estimate the nesting level against the system ladder
  fixed-points --system PATH --map NAME [--resolution R]
      enclose the fixed points of one generator
  witness --system PATH
      find a witness interval with overlap certificates
  transport --system PATH --from I --to J [--max-word-len N] [--max-points N]
      find a word carrying complementary interval I onto interval J
  plot --orbit CSV --system PATH --out SVG
      render generator graphs with orbit points overlaid";

type CmdResult = Result<(), Result<Failure, Usage>>;

fn usage(m: impl Into<String>) -> CmdResult {
    Err(Err(Usage(m.into())))
}

fn fail(m: impl std::fmt::Display) -> Result<Failure, Usage> {
    Ok(Failure(m.to_string()))
}

fn dispatch(args: &[String]) -> CmdResult {
    let Some(cmd) = args.first() else {
        return usage("missing command");
    };
    let rest = &args[1..];
    match cmd.as_str() {
        "example" => cmd_example(rest),
        "orbit" => cmd_orbit(rest),
        "classify" => cmd_classify(rest),
        "level" => cmd_level(rest),
        "fixed-points" => cmd_fixed_points(rest),
        "witness" => cmd_witness(rest),
        "transport" => cmd_transport(rest),
        "plot" => cmd_plot(rest),
        other => usage(format!("unknown command {other:?}")),
    }
}

/// Parsed flag set: `--key value` pairs, bare flags, and positionals.
struct Flags {
    values: BTreeMap<String, String>,
    switches: Vec<String>,
    positional: Vec<String>,
    multi: Vec<(String, String)>,
}

fn parse_flags(args: &[String], value_flags: &[&str], bare_flags: &[&str]) -> Result<Flags, Usage> {
    let mut f = Flags {
        values: BTreeMap::new(),
        switches: Vec::new(),
        positional: Vec::new(),
        multi: Vec::new(),
    };
    let mut i = 0;
    while i < args.len() {
        let a = &args[i];
        if let Some(name) = a.strip_prefix("--") {
            if bare_flags.contains(&name) {
                f.switches.push(name.to_string());
            } else if value_flags.contains(&name) {
                i += 1;
                let v = args
                    .get(i)
                    .ok_or_else(|| Usage(format!("--{name} needs a value")))?;
                if name == "param" {
                    f.multi.push((name.to_string(), v.clone()));
                } else {
                    f.values.insert(name.to_string(), v.clone());
                }
            } else {
                return Err(Usage(format!("unknown flag --{name}")));
            }
        } else {
            f.positional.push(a.clone());
        }
        i += 1;
    }
    Ok(f)
}

impl Flags {
    fn rational(&self, name: &str) -> Result<Option<Rational>, Usage> {
        match self.values.get(name) {
            None => Ok(None),
            Some(v) => parse_rational(v)
                .map(Some)
                .map_err(|e| Usage(format!("--{name}: {e}"))),
        }
    }

    fn required_rational(&self, name: &str) -> Result<Rational, Usage> {
        self.rational(name)?
            .ok_or_else(|| Usage(format!("--{name} is required")))
    }

    fn integer(&self, name: &str, default: u64) -> Result<u64, Usage> {
        match self.values.get(name) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|e| Usage(format!("--{name}: {e}"))),
        }
    }

    fn path(&self, name: &str) -> Result<&str, Usage> {
        self.values
            .get(name)
            .map(|s| s.as_str())
            .ok_or_else(|| Usage(format!("--{name} is required")))
    }
}

fn load_system(path: &str) -> Result<GeneratorSystem, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure(format!("cannot read {path}: {e}")))?;
    let cfg = parse_config(&text).map_err(|e| Failure(format!("{path}: {e}")))?;
    build_system(&cfg).map_err(|e| Failure(format!("{path}: {e}")))
}

fn budget_from(f: &Flags) -> Result<OrbitBudget, Usage> {
    Ok(OrbitBudget::new(
        f.integer("max-word-len", 12)?,
        f.integer("max-points", 2000)? as usize,
    ))
}

fn decomposition_for(sys: &GeneratorSystem) -> ComponentDecomposition {
    match sys.domain_kind() {
        DomainKind::Circle if !sys.finite_orbit_points().is_empty() => {
            orbitkit::action::reduce_circle(
                sys,
                sys.finite_orbit_points(),
                OrbitBudget::new(3, 64),
            )
            .unwrap_or_else(|_| ComponentDecomposition::unit_interval())
        }
        _ => ComponentDecomposition::unit_interval(),
    }
}

fn cmd_example(args: &[String]) -> CmdResult {
    let f = parse_flags(args, &["out", "param"], &["as-printed"]).map_err(Err)?;
    let Some(name) = f.positional.first() else {
        return usage("example needs a catalog name");
    };
    let out_path = f.path("out").map_err(Err)?;
    let mut params = ExampleParams::default();
    for (_, pair) in &f.multi {
        let Some((k, v)) = pair.split_once('=') else {
            return usage(format!("--param expects key=value, got {pair:?}"));
        };
        params.values.insert(k.to_string(), v.to_string());
    }
    if f.switches.iter().any(|s| s == "as-printed") {
        params.values.insert("as-printed".into(), "1".into());
    }
    let sys = build_example(name, &params).map_err(|e| fail(e))?;
    let cfg = config_for_catalog(name, &params.values, &sys);
    std::fs::write(out_path, render_config(&cfg)).map_err(|e| fail(e))?;
    println!(
        "wrote {out_path}: {} with {} generator(s)",
        sys.name(),
        sys.generators().len()
    );
    Ok(())
}

fn cmd_orbit(args: &[String]) -> CmdResult {
    let f = parse_flags(
        args,
        &["system", "point", "max-word-len", "max-points", "prec", "dedup-tol", "out"],
        &[],
    )
    .map_err(Err)?;
    let sys = load_system(f.path("system").map_err(Err)?).map_err(Ok)?;
    let x = f.required_rational("point").map_err(Err)?;
    let budget = budget_from(&f).map_err(Err)?;
    let prec = f.rational("prec").map_err(Err)?;
    let dedup = f.rational("dedup-tol").map_err(Err)?;
    let out_path = f.path("out").map_err(Err)?;
    let sample = orbit(&sys, &x, budget, prec, dedup).map_err(|e| fail(e))?;
    std::fs::write(out_path, csv::write_orbit_csv(&sample)).map_err(|e| fail(e))?;
    println!(
        "wrote {out_path}: {} points, deepest word length {}",
        sample.len(),
        sample.budget_used().0
    );
    Ok(())
}

fn cmd_classify(args: &[String]) -> CmdResult {
    let f = parse_flags(
        args,
        &[
            "system", "point", "max-word-len", "max-points", "prec", "dedup-tol",
            "min-points", "eps-dense",
        ],
        &["budget-double"],
    )
    .map_err(Err)?;
    let sys = load_system(f.path("system").map_err(Err)?).map_err(Ok)?;
    let x = f.required_rational("point").map_err(Err)?;
    let budget = budget_from(&f).map_err(Err)?;
    let prec = f.rational("prec").map_err(Err)?;
    let dedup = f.rational("dedup-tol").map_err(Err)?;
    let sample = orbit(&sys, &x, budget, prec.clone(), dedup.clone()).map_err(|e| fail(e))?;
    let doubled = if f.switches.iter().any(|s| s == "budget-double") {
        Some(orbit(&sys, &x, budget.doubled(), prec, dedup).map_err(|e| fail(e))?)
    } else {
        None
    };
    let d = decomposition_for(&sys);
    let mut params = ClassifyParams::default();
    if let Some(n) = f.values.get("min-points") {
        params.min_points = n
            .parse()
            .map_err(|e| Err(Usage(format!("--min-points: {e}"))))?;
    }
    if let Some(eps) = f.rational("eps-dense").map_err(Err)? {
        params.eps_dense_frac = eps;
    }
    let c = classify(&sample, doubled.as_ref(), &d, &params).map_err(|e| fail(e))?;
    println!("verdict: {}", c.verdict);
    if let Some(l) = c.level {
        println!("level: {l}");
    }
    let ev = &c.evidence;
    println!(
        "evidence: core points {}, max gap {} (~{:.5})",
        ev.core_points,
        format_rational(&ev.max_gap_in_range),
        to_f64(&ev.max_gap_in_range)
    );
    println!(
        "  isolated fraction {:.3}, budget (len {}, points {})",
        ev.isolated_point_fraction, ev.budget.0, ev.budget.1
    );
    if !ev.accumulation_summary.is_empty() {
        println!("  structure: {}", ev.accumulation_summary);
    }
    match ev.stable {
        Some(true) => println!("  stable under one budget doubling"),
        Some(false) => println!("  NOT stable under one budget doubling"),
        None => println!("  stability not assessed (pass --budget-double)"),
    }
    Ok(())
}

fn cmd_level(args: &[String]) -> CmdResult {
    let f = parse_flags(
        args,
        &["system", "point", "max-word-len", "max-points"],
        &[],
    )
    .map_err(Err)?;
    let sys = load_system(f.path("system").map_err(Err)?).map_err(Ok)?;
    let x = f.required_rational("point").map_err(Err)?;
    let budget = budget_from(&f).map_err(Err)?;
    let est = estimate_level(&sys, &x, budget, &ClassifyParams::default())
        .map_err(|e| fail(e))?;
    println!("estimated level: {}", est.level);
    for r in &est.rungs {
        let status = if r.is_self {
            "self".to_string()
        } else {
            format!(
                "disjoint: {}, accumulation witnesses: {}{}",
                r.disjoint,
                r.accumulation_witnesses,
                r.nearest
                    .as_ref()
                    .map(|d| format!(", nearest ~{:.3e}", to_f64(d)))
                    .unwrap_or_default()
            )
        };
        println!("  rung {} ({}): {status}", r.rung, r.ladder_name);
    }
    Ok(())
}

fn cmd_fixed_points(args: &[String]) -> CmdResult {
    let f = parse_flags(args, &["system", "map", "resolution"], &[]).map_err(Err)?;
    let sys = load_system(f.path("system").map_err(Err)?).map_err(Ok)?;
    let resolution = f
        .rational("resolution")
        .map_err(Err)?
        .unwrap_or_else(|| orbitkit::rational::pow2(-12));
    let list = match f.values.get("map") {
        Some(name) => {
            let g = sys.generator(name).map_err(|e| fail(e))?;
            g.fixed_point_enclosures(&resolution).map_err(|e| fail(e))?
        }
        None => common_fixed_points(&sys, &resolution).map_err(|e| fail(e))?,
    };
    if let Some(name) = f.values.get("map") {
        println!("fixed points of {name} at resolution {resolution}:");
    } else {
        println!("common fixed points at resolution {resolution}:");
    }
    for (e, flag) in list {
        println!("  {e}  [{flag:?}]");
    }
    Ok(())
}

fn cmd_witness(args: &[String]) -> CmdResult {
    let f = parse_flags(args, &["system"], &[]).map_err(Err)?;
    let sys = load_system(f.path("system").map_err(Err)?).map_err(Ok)?;
    let w = witness_interval(&sys).map_err(|e| fail(e))?;
    println!(
        "witness interval [{}, {}]",
        format_rational(&w.interval.0),
        format_rational(&w.interval.1)
    );
    match &w.condition {
        orbitkit::action::WitnessCondition::IsolatedFixedPoints { generator } => {
            println!("condition: isolated fixed points of {generator}");
        }
        orbitkit::action::WitnessCondition::NoCommonFixedPoints => {
            println!("condition: no common interior fixed points");
        }
    }
    println!("resolution: {}", w.resolution);
    for c in &w.certificates {
        println!(
            "  {}: image of endpoints {} and {} meets the interval",
            c.generator, c.image_of_lo, c.image_of_hi
        );
    }
    Ok(())
}

fn cmd_transport(args: &[String]) -> CmdResult {
    let f = parse_flags(
        args,
        &["system", "from", "to", "max-word-len", "max-points"],
        &[],
    )
    .map_err(Err)?;
    let sys = load_system(f.path("system").map_err(Err)?).map_err(Ok)?;
    let i: i64 = f
        .values
        .get("from")
        .ok_or_else(|| Err(Usage("--from is required".into())))?
        .parse()
        .map_err(|e| Err(Usage(format!("--from: {e}"))))?;
    let j: i64 = f
        .values
        .get("to")
        .ok_or_else(|| Err(Usage("--to is required".into())))?
        .parse()
        .map_err(|e| Err(Usage(format!("--to: {e}"))))?;
    let budget = budget_from(&f).map_err(Err)?;
    let z0 = sys
        .designated_point("z0")
        .cloned()
        .ok_or_else(|| fail("system has no designated point z0 for the reference orbit"))?;
    let sample = orbit(&sys, &z0, budget, None, None).map_err(|e| fail(e))?;
    let w = transport_word(&sys, &sample, i, j, budget.max_word_len).map_err(|e| fail(e))?;
    println!("{w}");
    Ok(())
}

fn cmd_plot(args: &[String]) -> CmdResult {
    let f = parse_flags(args, &["orbit", "system", "out"], &[]).map_err(Err)?;
    let sys = load_system(f.path("system").map_err(Err)?).map_err(Ok)?;
    let out_path = f.path("out").map_err(Err)?;
    let orbit_path = f.path("orbit").map_err(Err)?;
    let text = std::fs::read_to_string(orbit_path)
        .map_err(|e| fail(format!("cannot read {orbit_path}: {e}")))?;
    let rows = csv::read_orbit_csv(&text).map_err(|e| fail(e))?;
    let points: Vec<(Rational, String)> = rows
        .iter()
        .map(|r| {
            (
                orbitkit::rational::midpoint(&r.lo, &r.hi),
                r.word.to_string(),
            )
        })
        .collect();
    let mut svg_text = String::new();
    svg::render_svg(&sys, &points, &mut svg_text).map_err(|e| fail(e))?;
    std::fs::write(out_path, svg_text).map_err(|e| fail(e))?;
    println!("wrote {out_path}");
    Ok(())
}
