//! `leavitt`: command-line front end. Every command prints one JSON document.
//!
//! Exit codes: 0 success, 1 malformed input or flags, 2 violated precondition,
//! 3 failed verification (the report carries the counterexample).

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use leavitt::boundary::{orbit_points, parse_point, point_to_json, BoundaryPoint, IsotropyDesc, RuleRegistry};
use leavitt::chen::ChenModule;
use leavitt::classify::catalog;
use leavitt::field::{parse_poly, FieldSpec};
use leavitt::graph::{simple_cycles, Digraph};
use leavitt::groupoid::{CoeffArgs, CoeffRegistry, InducedModule};
use leavitt::lpa::{Algebra, TwistParam};
use leavitt::module::{parse_point_vector, restrict, PointModule};
use leavitt::verify::{SuiteRegistry, SuiteReport, VerifyContext};
use leavitt::Error;

#[derive(Parser)]
#[command(name = "leavitt", version, about = "Exact computations in Leavitt path algebras and their simple modules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a graph file and summarize it.
    Validate {
        graph: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_cycle_len: usize,
    },
    /// Normal form of an algebra element.
    Nf {
        #[command(flatten)]
        alg: AlgArgs,
        expr: String,
    },
    /// Product of two algebra elements.
    Mul {
        #[command(flatten)]
        alg: AlgArgs,
        left: String,
        right: String,
    },
    /// Action of an algebra element on a module element.
    Act {
        #[command(flatten)]
        alg: AlgArgs,
        #[command(flatten)]
        module: ModuleArgs,
        expr: String,
        /// Module element such as `2*e.x + x>1`; `x` is the base point.
        element: String,
    },
    /// Isotropy group of a boundary point.
    Isotropy {
        #[arg(short, long)]
        graph: PathBuf,
        #[arg(long)]
        point: String,
    },
    /// Orbit of a boundary point up to a prefix length.
    Orbit {
        #[arg(short, long)]
        graph: PathBuf,
        #[arg(long)]
        point: String,
        #[arg(long, env = "LEAVITT_DEPTH", default_value_t = 8)]
        depth: usize,
    },
    /// Restriction of a module to a boundary point.
    Restrict {
        #[command(flatten)]
        alg: AlgArgs,
        #[command(flatten)]
        module: ModuleArgs,
        #[arg(long)]
        point: String,
        #[arg(long, env = "LEAVITT_DEPTH", default_value_t = 8)]
        depth: usize,
    },
    /// Catalog of simple modules.
    Classify {
        #[command(flatten)]
        alg: AlgArgs,
        #[arg(long)]
        max_deg: usize,
        #[arg(long)]
        max_cycle_len: usize,
        /// Extra irreducible polynomial for quotient entries (repeatable); needed over Q.
        #[arg(long = "poly")]
        polys: Vec<String>,
        #[arg(long, env = "LEAVITT_DEPTH", default_value_t = 8)]
        depth: usize,
    },
    /// Run a verification suite.
    Verify {
        #[command(flatten)]
        alg: AlgArgs,
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        point: Option<String>,
        /// Twist weights as JSON, inline or a file.
        #[arg(long)]
        twist: Option<String>,
        /// Second twist for comparisons.
        #[arg(long)]
        twist_b: Option<String>,
        #[arg(long)]
        poly: Option<String>,
        #[arg(long, env = "LEAVITT_DEPTH", default_value_t = 8)]
        depth: usize,
        #[arg(long, default_value_t = 4)]
        max_cycle_len: usize,
        #[arg(long, default_value_t = 2)]
        max_deg: usize,
    },
    /// List the registered coefficient modules, tail rules and suites.
    List,
}

#[derive(Args)]
struct AlgArgs {
    #[arg(short, long)]
    graph: PathBuf,
    /// `Q`, `F<p>`, or `<base>[t]/(<poly>)`.
    #[arg(short = 'K', long = "field", default_value = "Q")]
    field: String,
}

#[derive(Args)]
struct ModuleArgs {
    /// Base point of the module as JSON, inline or a file.
    #[arg(long)]
    module: String,
    /// Twist weights as JSON, inline or a file.
    #[arg(long, conflicts_with = "poly")]
    twist: Option<String>,
    /// Polynomial `f` for the quotient module over `K[t]/(f)`.
    #[arg(long)]
    poly: Option<String>,
    /// Use the induced module with this coefficient module instead of a Chen module.
    #[arg(long)]
    coeff: Option<String>,
    /// Scalar for the `twisted` coefficient module.
    #[arg(long)]
    a: Option<String>,
}

fn read_graph(path: &Path) -> leavitt::Result<Arc<Digraph>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Ok(Arc::new(Digraph::from_json_str(&text)?))
}

/// Inline JSON when the text starts with `{`, otherwise a file name.
fn read_json(text: &str) -> leavitt::Result<Value> {
    let body = if text.trim_start().starts_with('{') {
        text.to_string()
    } else {
        std::fs::read_to_string(text).map_err(|e| Error::Parse(format!("{text}: {e}")))?
    };
    serde_json::from_str(&body).map_err(|e| Error::Parse(format!("JSON: {e}")))
}

fn algebra(args: &AlgArgs) -> leavitt::Result<Algebra> {
    let g = read_graph(&args.graph)?;
    let k: FieldSpec = args.field.parse()?;
    Ok(Algebra::new(g, k))
}

fn point(g: &Digraph, text: &str) -> leavitt::Result<Arc<BoundaryPoint>> {
    Ok(Arc::new(parse_point(g, &read_json(text)?, &RuleRegistry::builtin())?))
}

fn twist(g: &Digraph, k: &FieldSpec, text: Option<&str>) -> leavitt::Result<TwistParam> {
    match text {
        Some(t) => TwistParam::from_json(g, k, &read_json(t)?),
        None => Ok(TwistParam::trivial()),
    }
}

fn build_module(alg: &Algebra, args: &ModuleArgs) -> leavitt::Result<Box<dyn PointModule>> {
    let g = alg.graph();
    let k = alg.field();
    let base = point(g, &args.module)?;
    if let Some(name) = &args.coeff {
        let coeff = CoeffRegistry::builtin().build(name, k, &CoeffArgs { a: args.a.clone(), poly: args.poly.clone() })?;
        return Ok(Box::new(InducedModule::new(alg.clone(), base, coeff)?));
    }
    if let Some(f) = &args.poly {
        return Ok(Box::new(ChenModule::akr(alg.clone(), base, parse_poly(f, k)?)?));
    }
    Ok(Box::new(ChenModule::twisted(alg.clone(), base, twist(g, k, args.twist.as_deref())?)))
}

fn module_json(m: &dyn PointModule) -> Value {
    json!({
        "label": m.label(),
        "base": point_to_json(m.graph(), m.base()),
        "coeff_field": m.coeff_field().to_string(),
    })
}

fn isotropy_json(g: &Digraph, iso: &IsotropyDesc) -> Value {
    match iso {
        IsotropyDesc::Trivial => json!({ "kind": "trivial" }),
        IsotropyDesc::Cyclic { period, cycle } => json!({
            "kind": "cyclic",
            "period": period,
            "cycle": g.edge_names_of(cycle.edges()),
        }),
    }
}

/// The command's JSON and whether it represents a failed verification.
fn run(command: Command) -> leavitt::Result<(Value, bool)> {
    let out = match command {
        Command::Validate { graph, max_cycle_len } => {
            let g = read_graph(&graph)?;
            json!({
                "valid": true,
                "vertices": g.vertex_count(),
                "edges": g.edge_count(),
                "sinks": g.sinks().map(|v| g.vertex_name(v)).collect::<Vec<_>>(),
                "cycles": simple_cycles(&g, max_cycle_len).iter().map(|c| g.edge_names_of(c.edges())).collect::<Vec<_>>(),
                "branching_components": g
                    .branching_components()
                    .iter()
                    .map(|comp| comp.iter().map(|v| g.vertex_name(*v)).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            })
        }
        Command::Nf { alg, expr } => {
            let a = algebra(&alg)?;
            let z = a.parse(&expr)?;
            json!({ "input": expr, "normal_form": a.show(&z), "terms": z.len() })
        }
        Command::Mul { alg, left, right } => {
            let a = algebra(&alg)?;
            let z = a.mul(&a.parse(&left)?, &a.parse(&right)?);
            json!({ "left": left, "right": right, "product": a.show(&z) })
        }
        Command::Act { alg, module, expr, element } => {
            let a = algebra(&alg)?;
            let m = build_module(&a, &module)?;
            let v = parse_point_vector(a.graph(), m.coeff_field(), m.base(), &element)?;
            let z = a.parse(&expr)?;
            let image = m.act(&z, &v);
            json!({
                "module": module_json(m.as_ref()),
                "element": v.show(a.graph()),
                "result": image.show(a.graph()),
                "terms": image.to_json(a.graph()),
            })
        }
        Command::Isotropy { graph, point: p } => {
            let g = read_graph(&graph)?;
            let x = point(&g, &p)?;
            json!({ "point": x.show(&g), "isotropy": isotropy_json(&g, &x.isotropy(&g)) })
        }
        Command::Orbit { graph, point: p, depth } => {
            let g = read_graph(&graph)?;
            let x = point(&g, &p)?;
            let orbit = orbit_points(&g, &x, depth);
            json!({
                "point": x.show(&g),
                "depth": depth,
                "exhausted": orbit.exhausted,
                "size": orbit.points.len(),
                "points": orbit.points.iter().map(|y| {
                    let d = y.degree();
                    json!({ "element": y.show(&g), "degree": d.value, "modulus": d.modulus })
                }).collect::<Vec<_>>(),
            })
        }
        Command::Restrict { alg, module, point: p, depth } => {
            let a = algebra(&alg)?;
            let m = build_module(&a, &module)?;
            let x = point(a.graph(), &p)?;
            let res = restrict(m.as_ref(), &x, depth);
            json!({
                "module": module_json(m.as_ref()),
                "point": x.show(a.graph()),
                "depth": depth,
                "restriction": res.to_json(a.graph(), a.field()),
            })
        }
        Command::Classify { alg, max_deg, max_cycle_len, polys, depth } => {
            let a = algebra(&alg)?;
            let polys = polys.iter().map(|f| parse_poly(f, a.field())).collect::<leavitt::Result<Vec<_>>>()?;
            let cat = catalog(a.graph(), a.field(), max_deg, max_cycle_len, &polys, depth)?;
            cat.to_json(a.graph())
        }
        Command::Verify { alg, suite, point: p, twist: tw, twist_b, poly, depth, max_cycle_len, max_deg } => {
            let a = algebra(&alg)?;
            let g = a.graph().clone();
            let k = a.field().clone();
            let mut ctx = VerifyContext::new(a, depth);
            ctx.point = p.as_deref().map(|p| point(&g, p)).transpose()?;
            ctx.twist = twist(&g, &k, tw.as_deref())?;
            ctx.twist_b = twist_b.as_deref().map(|t| twist(&g, &k, Some(t))).transpose()?;
            ctx.poly = poly.as_deref().map(|f| parse_poly(f, &k)).transpose()?;
            ctx.max_cycle_len = max_cycle_len;
            ctx.max_deg = max_deg;
            return Ok(verify_output(&SuiteRegistry::builtin().run(&suite, &ctx)?));
        }
        Command::List => {
            let names = |it: &mut dyn Iterator<Item = (&'static str, &'static str)>| {
                it.map(|(n, d)| json!({ "name": n, "description": d })).collect::<Vec<_>>()
            };
            json!({
                "coefficient_modules": CoeffRegistry::builtin().names().collect::<Vec<_>>(),
                "tail_rules": names(&mut RuleRegistry::builtin().names()),
                "suites": names(&mut SuiteRegistry::builtin().names()),
            })
        }
    };
    Ok((out, false))
}

/// The report, with the first failing claim lifted to `counterexample`.
fn verify_output(report: &SuiteReport) -> (Value, bool) {
    let mut out = report.to_json();
    if let Some(fail) = report.first_failure() {
        out["counterexample"] = json!({ "claim": fail.claim, "detail": fail.counterexample });
    }
    (out, !report.passed())
}

/// Document to print and exit code for the outcome of a command.
fn outcome(result: leavitt::Result<(Value, bool)>) -> (Value, u8) {
    match result {
        Ok((out, failed)) => (out, if failed { 3 } else { 0 }),
        Err(e) => {
            let code = if e.is_parse() { 1 } else { 2 };
            (json!({ "error": e.to_string(), "exit_code": code }), code)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let (out, code) = outcome(run(cli.command));
    // a closed pipe (`leavitt list | head`) is not an error worth reporting
    let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(&out).expect("JSON values serialize"));
    ExitCode::from(code)
}

#[cfg(test)]
mod tests {
    use super::*;
    use leavitt::verify::ClaimResult;

    fn claim(name: &str, passed: bool) -> ClaimResult {
        ClaimResult {
            claim: name.into(),
            passed,
            checks: 4,
            counterexample: (!passed).then(|| json!({"generator": "e"})),
            skipped: None,
        }
    }

    #[test]
    fn failing_claim_exits_with_three() {
        let report = SuiteReport { suite: "twist", claims: vec![claim("a", true), claim("b", false), claim("c", false)] };
        let (out, code) = outcome(Ok(verify_output(&report)));
        assert_eq!(code, 3);
        assert_eq!(out["counterexample"]["claim"], "b");
        assert_eq!(out["counterexample"]["detail"]["generator"], "e");
    }

    #[test]
    fn passing_report_has_no_counterexample() {
        let report = SuiteReport { suite: "triv", claims: vec![claim("a", true)] };
        let (out, code) = outcome(Ok(verify_output(&report)));
        assert_eq!(code, 0);
        assert!(out.get("counterexample").is_none());
    }

    #[test]
    fn errors_map_to_codes() {
        assert_eq!(outcome(Err(Error::Parse("x".into()))).1, 1);
        let (out, code) = outcome(Err(Error::Precondition("no sink".into())));
        assert_eq!(code, 2);
        assert_eq!(out["exit_code"], 2);
    }
}
