mod config;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ggs_core::beauville::{beauville_verdict, BeauvilleVerdict, GeneratingPair};
use ggs_core::bigserde::Big;
use ggs_core::descent::{locate_b, recover_a, verify_locate};
use ggs_core::identities::{list_catalog, run_identity, run_suite, Binding, Bindings, IdentityResult, Verdict};
use ggs_core::quotients::{element_order_mod_level, enumerate_small_quotient, fingerprint_report, DEFAULT_SIZE_CAP};
use ggs_core::vectors::classify_vector;
use ggs_core::{Error, Params, Word, WordExpr};
use serde_json::{json, Value};

use config::Config;

#[derive(Parser)]
#[command(name = "ggs", version, about = "Exact computations in growing GGS-groups")]
struct Cli {
    /// JSON configuration {"p", "m", "e", "default_depth"?}; defaults to
    /// p = 3, m = (1,2,3,4), e = (1,-1).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Structural predicates of the defining vector.
    Classify,
    /// Order of a word in G/st(N).
    Order {
        expr: String,
        #[arg(long)]
        level: usize,
    },
    /// Portrait of a word at the given depth.
    Eval {
        expr: String,
        #[arg(long)]
        depth: Option<usize>,
        /// Write a Graphviz rendering to FILE.
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
    },
    /// First-level sections of a word in the level stabiliser.
    Sections { expr: String },
    /// Exponent maps (ε_a, ε_b).
    Abelianize { expr: String },
    #[command(subcommand)]
    Identities(IdentitiesCmd),
    #[command(subcommand)]
    Beauville(BeauvilleCmd),
    #[command(subcommand)]
    Descent(DescentCmd),
    #[command(subcommand)]
    Oracle(OracleCmd),
}

#[derive(Subcommand)]
enum IdentitiesCmd {
    /// Catalog of identity ids.
    List,
    /// Run one entry, or the whole catalog.
    Run {
        #[arg(long)]
        id: Option<String>,
        #[arg(long)]
        depth: Option<usize>,
        /// Entry parameter binding, e.g. `--bind i=1 --bind z=comm(a,b)`.
        #[arg(long = "bind", value_name = "NAME=VALUE")]
        bind: Vec<String>,
    },
}

#[derive(Subcommand)]
enum BeauvilleCmd {
    /// Beauville verdict for G/st(N).
    Verify {
        #[arg(long)]
        level: usize,
        #[arg(long, num_args = 4, value_names = ["X1", "Y1", "X2", "Y2"])]
        pairs: Option<Vec<String>>,
    },
}

#[derive(Subcommand)]
enum DescentCmd {
    /// Descend from x with ε_b(x) prime to p to a vertex section equal to a power of b.
    LocateB {
        expr: String,
        #[arg(long)]
        max_level: Option<usize>,
    },
    /// Witnesses in ⟨b^δ, a^n z⟩ projecting to a conjugate of a^n and to b^δ at a vertex.
    RecoverA(RecoverArgs),
}

#[derive(Args)]
struct RecoverArgs {
    #[arg(long, allow_hyphen_values = true)]
    delta: i64,
    #[arg(long)]
    z: String,
    #[arg(long, default_value_t = 10)]
    max_iter: usize,
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Enumerate G/st(N) when its ambient bound is below the cap.
    Enumerate {
        #[arg(long)]
        level: usize,
        #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
        cap: u64,
        /// Include the canonical encoding of every element.
        #[arg(long)]
        list: bool,
    },
}

/// Structured result plus its text rendering; `failed` maps to exit code 1.
struct Report {
    json: Value,
    text: String,
    failed: bool,
}

impl Report {
    fn ok(json: Value, text: String) -> Self {
        Report { json, text, failed: false }
    }
}

fn annotate(src: &str, e: Error) -> Error {
    match e {
        Error::Parse { message, start, end } => {
            let caret = " ".repeat(start) + &"^".repeat((end - start).max(1));
            Error::Parse { message: format!("{message}\n  {src}\n  {caret}"), start, end }
        }
        e => e,
    }
}

fn parse_word(params: &Params, src: &str) -> Result<Word, Error> {
    WordExpr::parse(src).map_err(|e| annotate(src, e)).and_then(|w| w.normalize(params, 0))
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serialisable report")
}

fn run(cli: Cli) -> Result<Report, Error> {
    let cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::builtin(),
    };
    let params = &cfg.params;
    match cli.command {
        Command::Classify => {
            let r = classify_vector(params);
            let json = to_value(&r);
            let mut text = String::new();
            for (k, v) in json.as_object().expect("object") {
                let _ = writeln!(text, "{k:>22}  {v}");
            }
            Ok(Report::ok(json, text))
        }
        Command::Order { expr, level } => {
            let w = parse_word(params, &expr)?;
            let o = element_order_mod_level(params, &w, level)?;
            Ok(Report::ok(
                json!({"expr": w.to_string(), "level": level, "order": to_value(&Big(o.clone().into()))}),
                format!("{o}\n"),
            ))
        }
        Command::Eval { expr, depth, dot } => {
            let w = parse_word(params, &expr)?;
            let f = w.evaluate(params, depth.unwrap_or(cfg.default_depth))?;
            if let Some(path) = dot {
                std::fs::write(&path, f.to_dot()).map_err(|e| Error::BadInput(format!("{}: {e}", path.display())))?;
            }
            let mut text = format!("{w}\n");
            for l in 0..f.depth() {
                let labels: Vec<String> = f.level(l).iter().map(u64::to_string).collect();
                let _ = writeln!(text, "level {l} (mod {}): {}", f.degrees()[l], labels.join(" "));
            }
            Ok(Report::ok(json!({"expr": w.to_string(), "portrait": to_value(&f)}), text))
        }
        Command::Sections { expr } => {
            let w = parse_word(params, &expr)?;
            let (ea, _) = w.exponent_maps();
            if ea != 0 {
                return Err(Error::NotInStabiliser(ea));
            }
            let secs: Vec<String> = w.first_level_sections(params)?.iter().map(Word::to_string).collect();
            let mut text = String::new();
            for (j, s) in secs.iter().enumerate() {
                let _ = writeln!(text, "{:>4}  {s}", j + 1);
            }
            Ok(Report::ok(json!({"expr": w.to_string(), "sections": secs}), text))
        }
        Command::Abelianize { expr } => {
            let w = parse_word(params, &expr)?;
            let (ea, eb) = w.exponent_maps();
            let json = json!({"expr": w.to_string(), "epsilon_a": ea, "epsilon_b": to_value(&Big(eb.clone()))});
            Ok(Report::ok(json, format!("({ea}, {eb})\n")))
        }
        Command::Identities(IdentitiesCmd::List) => {
            let cat = list_catalog();
            let mut text = String::new();
            for e in &cat {
                let _ = writeln!(text, "{:<20} {}", e.id, e.summary);
            }
            Ok(Report::ok(to_value(&cat), text))
        }
        Command::Identities(IdentitiesCmd::Run { id, depth, bind }) => {
            let depth = depth.unwrap_or(cfg.default_depth);
            params.check_range(0, depth)?;
            let results = match id {
                Some(id) => run_identity(&id, params, &parse_bindings(&bind)?, depth)?,
                None => run_suite(params, depth).results,
            };
            Ok(identity_report(results, depth))
        }
        Command::Beauville(BeauvilleCmd::Verify { level, pairs }) => {
            let pairs = match pairs {
                Some(ws) => {
                    let w: Vec<Word> = ws.iter().map(|s| parse_word(params, s)).collect::<Result<_, _>>()?;
                    Some((
                        GeneratingPair::new(w[0].clone(), w[1].clone()),
                        GeneratingPair::new(w[2].clone(), w[3].clone()),
                    ))
                }
                None => None,
            };
            let v = beauville_verdict(params, level, pairs)?;
            let text = beauville_text(&v);
            Ok(Report::ok(to_value(&v), text))
        }
        Command::Descent(DescentCmd::LocateB { expr, max_level }) => {
            let x = parse_word(params, &expr)?;
            let cert = locate_b(params, &x, max_level.unwrap_or(params.levels()))?;
            let verified = verify_locate(params, &x, &cert)?;
            let mut json = to_value(&cert);
            json["verified"] = json!(verified);
            let text = format!(
                "vertex {:?}  delta {}  conjugator a^{}  steps {}  verified {verified}\n",
                cert.vertex.path,
                cert.delta,
                cert.conjugator_exponent,
                cert.trace.len()
            );
            Ok(Report { json, text, failed: !verified })
        }
        Command::Descent(DescentCmd::RecoverA(args)) => {
            let z = parse_word(params, &args.z)?;
            let cert = recover_a(params, args.delta, &z, args.max_iter)?;
            let text = format!(
                "level {}  vertex {:?}  lambda {}\n  a-witness {}\n  b-witness {}\n  verified {}\n",
                cert.k, cert.vertex.path, cert.lambda, cert.witness_a, cert.witness_b, cert.verified
            );
            Ok(Report { json: to_value(&cert), text, failed: !cert.verified })
        }
        Command::Oracle(OracleCmd::Enumerate { level, cap, list }) => {
            let table = enumerate_small_quotient(params, level, cap)?;
            let fp = fingerprint_report(&table);
            let mut json = json!({"level": level, "size": table.len(), "fingerprint": to_value(&fp)});
            let mut text = format!(
                "|G/st({level})| = {}\nconjugacy classes {}  fingerprint sound {}  complete {}\n",
                table.len(),
                fp.classes,
                fp.sound,
                fp.complete
            );
            if list {
                let lines = table.export_lines();
                for l in &lines {
                    let _ = writeln!(text, "{l}");
                }
                json["elements"] = json!(lines);
            }
            Ok(Report { json, text, failed: !fp.sound })
        }
    }
}

fn parse_bindings(raw: &[String]) -> Result<Bindings, Error> {
    raw.iter()
        .map(|kv| {
            let (k, v) =
                kv.split_once('=').ok_or_else(|| Error::BadInput(format!("binding {kv:?} is not NAME=VALUE")))?;
            let b = v.parse::<i64>().map(Binding::Int).unwrap_or_else(|_| Binding::Word(v.to_string()));
            Ok((k.to_string(), b))
        })
        .collect()
}

fn identity_report(results: Vec<IdentityResult>, depth: usize) -> Report {
    let count = |f: fn(&Verdict) -> bool| results.iter().filter(|r| f(&r.verdict)).count();
    let pass = count(|v| matches!(v, Verdict::Pass));
    let fail = count(|v| matches!(v, Verdict::Fail { .. }));
    let skip = count(|v| matches!(v, Verdict::Skip { .. }));
    let mut text = String::new();
    for r in &results {
        let v = match &r.verdict {
            Verdict::Pass => "PASS".to_string(),
            Verdict::Fail { diff } => format!("FAIL {}", diff.join("; ")),
            Verdict::Skip { reason } => format!("SKIP ({reason})"),
        };
        let _ = writeln!(text, "{:<20} {:<28} {v}", r.id, r.instance);
    }
    let _ = writeln!(text, "depth {depth}: {pass} pass, {fail} fail, {skip} skip");
    let json = json!({"depth": depth, "pass": pass, "fail": fail, "skip": skip, "results": to_value(&results)});
    Report { json, text, failed: fail > 0 }
}

fn beauville_text(v: &BeauvilleVerdict) -> String {
    let mut text = String::new();
    let (name, generation, certs) = match v {
        BeauvilleVerdict::CertifiedBeauville { generation, certificates } => {
            ("CERTIFIED_BEAUVILLE", generation, certificates)
        }
        BeauvilleVerdict::Inconclusive { reason, generation, certificates } => {
            let _ = writeln!(text, "reason: {reason}");
            ("INCONCLUSIVE", generation, certificates)
        }
        BeauvilleVerdict::NotBeauville { obstruction: o } => {
            return format!(
                "NOT_BEAUVILLE\n  <({})^{e}> = <({})^{e}> (order {}, central {})\n",
                o.z1,
                o.z2,
                o.subgroup_order,
                o.central,
                e = o.exponent
            );
        }
    };
    let mut out = format!("{name}\n{text}");
    for g in generation {
        let _ = writeln!(out, "  generation {:?}: {}", g.verdict, g.caveat);
    }
    for c in certs {
        let _ = writeln!(out, "  {:<10} {:<10} {:?}  {}", c.u, c.v, c.rule, c.detail);
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let as_json = cli.json;
    match run(cli) {
        Ok(r) => {
            let out = if as_json { serde_json::to_string_pretty(&r.json).expect("json") + "\n" } else { r.text };
            // a closed pipe downstream is not an error of ours
            let _ = std::io::stdout().write_all(out.as_bytes());
            ExitCode::from(if r.failed { 1 } else { 0 })
        }
        Err(e) => {
            if as_json {
                eprintln!("{}", json!({"error": e.code(), "message": e.to_string()}));
            } else {
                eprintln!("error[{}]: {e}", e.code());
            }
            ExitCode::from(2)
        }
    }
}
