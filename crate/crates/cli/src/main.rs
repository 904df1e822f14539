use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use unitsum::acceptance::{self, Options};
use unitsum::decompose::{decompose_quadratic, decompose_rational, UnitList};
use unitsum::exec::Exec;
use unitsum::quadratic::{classify, fundamental_unit, unit_power_sequence, unit_powers, CurveSpec, OrderElement};
use unitsum::search::{bounded_witness, exact_witness_quadratic, nonrepresentable_n, Verdict};
use unitsum::{Error, FieldSpec, Place, Polynomial, RationalFunction};

const SCHEMA_VERSION: u64 = 1;

#[derive(Parser)]
#[command(name = "unitsum", version, about = "Unit sums in function fields over finite fields")]
struct Cli {
    /// Emit one JSON object instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Run searches on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct CurveArgs {
    #[arg(long)]
    field: String,
    /// `y^2 = f`, `y^2 + (B)y + (C) = 0` or `y^2 + y = g/D`.
    #[arg(long)]
    curve: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Unit sum number of the integral closure of K[x].
    Classify(CurveArgs),
    /// The unit a(x) + y of least norm.
    FundamentalUnit(CurveArgs),
    /// Coefficients of eps^k = a_k + b_k y for k = 0..n.
    Powers {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long, default_value_t = 10)]
        n: u64,
        /// Unit of the shape a(x) + y; defaults to the fundamental unit.
        #[arg(long)]
        elem: Option<String>,
    },
    /// Write an element as a sum of units.
    Decompose {
        #[arg(long)]
        field: String,
        /// Comma-separated places, e.g. `inf,x,x+1`.
        #[arg(long, required_unless_present = "curve")]
        places: Option<String>,
        /// Decompose in the integral closure of this curve instead.
        #[arg(long)]
        curve: Option<String>,
        #[arg(long)]
        elem: String,
        /// Series terms for the quadratic decomposer.
        #[arg(long, default_value_t = 32)]
        precision: usize,
        /// Write zero as a sum of units instead of the empty sum.
        #[arg(long)]
        nonempty_zero: bool,
    },
    /// Valuation of a rational function at a place.
    Valuation {
        #[arg(long)]
        field: String,
        #[arg(long)]
        elem: String,
        #[arg(long)]
        place: String,
    },
    /// Height and divisors of a rational function.
    Height {
        #[arg(long)]
        field: String,
        #[arg(long)]
        elem: String,
    },
    /// Search for a short sum of units equal to an element.
    Witness {
        #[arg(long)]
        field: String,
        #[arg(long, required_unless_present = "curve")]
        places: Option<String>,
        /// Certify a polynomial against the units of this curve.
        #[arg(long)]
        curve: Option<String>,
        #[arg(long)]
        elem: String,
        #[arg(long, default_value_t = 2)]
        max_units: usize,
        #[arg(long, default_value_t = 4)]
        height_bound: u64,
        #[arg(long, default_value_t = 1 << 24)]
        budget: u64,
    },
    /// Least n that is not a sum of M terms p^t k with |k| <= A.
    Nonrep {
        #[arg(long)]
        p: u32,
        #[arg(long = "M")]
        m: u32,
        #[arg(long = "A")]
        a: u64,
        #[arg(long, default_value_t = 10_000)]
        limit: u64,
    },
    /// Run the acceptance suite.
    Selftest {
        /// Only criteria whose name contains this text.
        #[arg(long)]
        filter: Option<String>,
        /// Corrupt the unit-power recursion (negative control).
        #[arg(long)]
        mutate: bool,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
}

struct Output {
    kind: &'static str,
    echo: Value,
    payload: Map<String, Value>,
    text: String,
    code: u8,
}

impl Output {
    fn new(kind: &'static str, echo: Value, payload: Value, text: String) -> Self {
        let payload = match payload {
            Value::Object(m) => m,
            _ => Map::new(),
        };
        Output { kind, echo, payload, text, code: 0 }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Internal(_) => 2,
        Error::BudgetExceeded { .. } | Error::NoneFound(_) | Error::PrecisionExhausted(_) => 3,
        _ => 1,
    }
}

fn places(field: &FieldSpec, text: &str) -> Result<Vec<Place>, Error> {
    text.split(',').map(|p| Place::parse(field, p.trim())).collect()
}

fn curve(args: &CurveArgs) -> Result<CurveSpec, Error> {
    CurveSpec::parse(&FieldSpec::parse(&args.field)?, &args.curve)
}

fn curve_echo(cmd: &str, args: &CurveArgs) -> Value {
    json!({ "subcommand": cmd, "field": args.field, "curve": args.curve })
}

fn units_json(units: &UnitList) -> Value {
    serde_json::to_value(units.records()).expect("records serialize")
}

fn verdict_output(verdict: &Verdict, echo: Value) -> Output {
    let mut payload = json!({ "verdict": verdict.kind() });
    match verdict {
        Verdict::Representable { certificate } => payload["certificate"] = units_json(certificate),
        Verdict::NotRepresentableExact { reason } => payload["reason"] = json!(reason),
        Verdict::NoneWithinBounds { height_bound, unit_count } => {
            payload["height_bound"] = json!(height_bound);
            payload["unit_count"] = json!(unit_count);
        }
    }
    let mut out = Output::new("witness", echo, payload, verdict.to_string());
    if matches!(verdict, Verdict::NoneWithinBounds { .. }) {
        out.code = 3;
    }
    out
}

fn dispatch(cmd: &Cmd, exec: Exec) -> Result<Output, (Value, Error)> {
    let echo = echo(cmd);
    run(cmd, exec, echo.clone()).map_err(|e| (echo, e))
}

fn echo(cmd: &Cmd) -> Value {
    match cmd {
        Cmd::Classify(a) => curve_echo("classify", a),
        Cmd::FundamentalUnit(a) => curve_echo("fundamental-unit", a),
        Cmd::Powers { curve, n, elem } => {
            let mut e = curve_echo("powers", curve);
            e["n"] = json!(n);
            e["elem"] = json!(elem);
            e
        }
        Cmd::Decompose { field, places, curve, elem, precision, nonempty_zero } => json!({
            "subcommand": "decompose", "field": field, "places": places, "curve": curve, "elem": elem,
            "precision": precision, "nonempty_zero": nonempty_zero,
        }),
        Cmd::Valuation { field, elem, place } => {
            json!({ "subcommand": "valuation", "field": field, "elem": elem, "place": place })
        }
        Cmd::Height { field, elem } => json!({ "subcommand": "height", "field": field, "elem": elem }),
        Cmd::Witness { field, places, curve, elem, max_units, height_bound, budget } => json!({
            "subcommand": "witness", "field": field, "places": places, "curve": curve, "elem": elem,
            "max_units": max_units, "height_bound": height_bound, "budget": budget,
        }),
        Cmd::Nonrep { p, m, a, limit } => json!({ "subcommand": "nonrep", "p": p, "M": m, "A": a, "limit": limit }),
        Cmd::Selftest { filter, mutate, seed } => {
            json!({ "subcommand": "selftest", "filter": filter, "mutate": mutate, "seed": seed })
        }
    }
}

fn run(cmd: &Cmd, exec: Exec, echo: Value) -> Result<Output, Error> {
    Ok(match cmd {
        Cmd::Classify(args) => {
            let report = classify(&curve(args)?)?;
            let mut payload = serde_json::to_value(&report).expect("report serializes");
            payload["trail"] = json!(report.trail());
            Output::new("classification", echo, payload, report.trail())
        }
        Cmd::FundamentalUnit(args) => {
            let c = curve(args)?;
            match fundamental_unit(&c)? {
                Some(fu) => {
                    let mu = c.field().format_value(fu.mu);
                    let text = format!("{} (norm {mu})", fu.unit);
                    Output::new("fundamental-unit", echo, json!({ "unit": fu.unit.to_string(), "mu": mu }), text)
                }
                None => Output::new(
                    "fundamental-unit",
                    echo,
                    json!({ "unit": null, "mu": null }),
                    "no unit of the shape a(x) + y".into(),
                ),
            }
        }
        Cmd::Powers { curve: args, n, elem } => {
            let c = curve(args)?;
            let eps = match elem {
                Some(text) => OrderElement::parse(&c, text)?,
                None => fundamental_unit(&c)?.ok_or(Error::NoFundamentalUnit)?.unit,
            };
            unit_powers(&eps, *n)?;
            let seq = unit_power_sequence(&eps, *n);
            let rows: Vec<Value> = seq
                .iter()
                .enumerate()
                .map(|(k, (a, b))| json!({ "k": k, "a": a.to_string(), "b": b.to_string(), "deg_a": a.deg(), "deg_b": b.deg() }))
                .collect();
            let text = seq
                .iter()
                .enumerate()
                .map(|(k, (a, b))| format!("eps^{k}: a = {a}, b = {b}"))
                .collect::<Vec<_>>()
                .join("\n");
            Output::new("powers", echo, json!({ "unit": eps.to_string(), "powers": rows }), text)
        }
        Cmd::Decompose { field, places: pl, curve: cv, elem, precision, nonempty_zero } => {
            let field = FieldSpec::parse(field)?;
            match cv {
                Some(cv) => {
                    let c = CurveSpec::parse(&field, cv)?;
                    let w = OrderElement::parse(&c, elem)?;
                    let units = decompose_quadratic(&w, *precision, *nonempty_zero)?;
                    let payload = json!({ "units": units_json(&units), "count": units.len() });
                    Output::new("decomposition", echo, payload, units.to_string())
                }
                None => {
                    let s = places(&field, pl.as_deref().unwrap_or_default())?;
                    let f = RationalFunction::parse(&field, elem)?;
                    let d = decompose_rational(&f, &s, *nonempty_zero)?;
                    let payload = json!({
                        "units": units_json(&d.units), "count": d.units.len(), "height_trace": d.height_trace,
                    });
                    Output::new("decomposition", echo, payload, d.units.to_string())
                }
            }
        }
        Cmd::Valuation { field, elem, place } => {
            let field = FieldSpec::parse(field)?;
            let f = RationalFunction::parse(&field, elem)?;
            let p = Place::parse(&field, place)?;
            let v = f.valuation(&p)?;
            Output::new("valuation", echo, json!({ "valuation": v }), format!("v_{p}({f}) = {v}"))
        }
        Cmd::Height { field, elem } => {
            let field = FieldSpec::parse(field)?;
            let f = RationalFunction::parse(&field, elem)?;
            let h = f.height()?;
            let (zero, pole) = f.divisors()?;
            let payload = json!({ "height": h, "zero_divisor": zero.to_string(), "pole_divisor": pole.to_string() });
            Output::new("height", echo, payload, format!("H({f}) = {h}\nzeros: {zero}\npoles: {pole}"))
        }
        Cmd::Witness { field, places: pl, curve: cv, elem, max_units, height_bound, budget } => {
            let field = FieldSpec::parse(field)?;
            let verdict = match cv {
                Some(cv) => {
                    let c = CurveSpec::parse(&field, cv)?;
                    exact_witness_quadratic(&c, &Polynomial::parse(&field, elem)?)?
                }
                None => {
                    let s = places(&field, pl.as_deref().unwrap_or_default())?;
                    let target = RationalFunction::parse(&field, elem)?;
                    bounded_witness(&field, &s, &target, *max_units, *height_bound, *budget, exec)?
                }
            };
            verdict_output(&verdict, echo)
        }
        Cmd::Nonrep { p, m, a, limit } => {
            let r = nonrepresentable_n(*p, *m, *a, *limit)?;
            let text = format!("n = {} (certified mod {p}^T, T = {})", r.n, r.t);
            let payload = json!({ "n": r.n, "T": r.t, "modulus": (*p as u64).pow(r.t) });
            Output::new("nonrep", echo, payload, text)
        }
        Cmd::Selftest { filter, mutate, seed } => {
            let opts = Options { filter: filter.clone(), mutate_recursion: *mutate, seed: *seed, exec };
            let outcomes = acceptance::run(&opts);
            let mut lines = vec![format!("seed {seed}")];
            let mut rows = Vec::new();
            for o in &outcomes {
                let status = if o.passed { "PASS" } else { "FAIL" };
                lines.push(format!("{status} {} {}: {}", o.id, o.name, o.detail));
                rows.push(json!({
                    "id": o.id, "name": o.name, "passed": o.passed, "detail": o.detail,
                    "elapsed_ms": o.elapsed.as_secs_f64() * 1000.0,
                }));
            }
            let all = outcomes.iter().all(|o| o.passed);
            let mut out = Output::new("selftest", echo, json!({ "seed": seed, "passed": all, "criteria": rows }), lines.join("\n"));
            if !all {
                out.code = 2;
            }
            out
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let exec = if cli.sequential { Exec::Sequential } else { Exec::default() };
    match dispatch(&cli.cmd, exec) {
        Ok(out) => {
            if cli.json {
                let mut obj = Map::new();
                obj.insert("kind".into(), json!(out.kind));
                obj.insert("schema_version".into(), json!(SCHEMA_VERSION));
                obj.insert("input_echo".into(), out.echo);
                obj.extend(out.payload);
                println!("{}", Value::Object(obj));
            } else {
                println!("{}", out.text);
            }
            ExitCode::from(out.code)
        }
        Err((echo, e)) => {
            let code = exit_code(&e);
            if cli.json {
                let mut err = json!({ "message": e.to_string() });
                if let Error::Parse(p) = &e {
                    err["line"] = json!(p.line);
                    err["column"] = json!(p.column);
                }
                let obj = json!({ "kind": "error", "schema_version": SCHEMA_VERSION, "input_echo": echo, "exit_code": code, "error": err });
                println!("{obj}");
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(code)
        }
    }
}
