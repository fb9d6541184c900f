//! The `dynscope` command line: `check` one or all assertions of a model
//! file, or `--serve` the debugging API.

mod render;

use clap::{Args, Parser, Subcommand};
use dynscope_core::lang::error::render_diagnostic;
use dynscope_core::{
    check_problem, check_unroll_sufficiency, translate_assertion, Backend, Bounds, CheckOptions, TypedModel, Verdict,
};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

pub const EXIT_VALID: i32 = 0;
pub const EXIT_COUNTEREXAMPLE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "dynscope", version, about = "Bounded checker for relational programs")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    /// Serve the HTTP debugging API instead of running a command.
    #[arg(long)]
    serve: bool,
    #[arg(long, default_value_t = 8080, requires = "serve")]
    port: u16,
    /// Origin allowed to call the API from a browser.
    #[arg(long, requires = "serve")]
    allow_origin: Option<String>,
    /// Seconds before an analysis request gives up.
    #[arg(long, default_value_t = 60, requires = "serve")]
    timeout: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check assertions of a model file.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
struct CheckArgs {
    file: PathBuf,
    /// Assertion to check; all of them when omitted.
    #[arg(long = "assert", value_name = "NAME")]
    assertion: Option<String>,
    #[arg(long, default_value_t = 3)]
    scope: usize,
    #[arg(long, default_value_t = 3)]
    unroll: usize,
    #[arg(long, default_value_t = 4)]
    bitwidth: u32,
    /// `embedded` or `dimacs:<exe>`.
    #[arg(long, default_value = "embedded")]
    solver: Backend,
    /// Per-signature scope, e.g. `--scope-for Node=2`.
    #[arg(long = "scope-for", value_name = "SIG=N", value_parser = parse_scope_for)]
    scope_for: Vec<(String, usize)>,
    #[arg(long, value_name = "PATH")]
    trace_json: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    dump_circuit: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    dump_map: Option<PathBuf>,
}

fn parse_scope_for(s: &str) -> Result<(String, usize), String> {
    let (sig, n) = s.split_once('=').ok_or("expected SIG=N")?;
    let n = n.parse().map_err(|_| format!("`{n}` is not a number"))?;
    Ok((sig.to_string(), n))
}

/// Everything `check` needs.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub model: PathBuf,
    pub assertion: Option<String>,
    pub bounds: Bounds,
    pub backend: Backend,
    pub trace_json: Option<PathBuf>,
    pub dump_circuit: Option<PathBuf>,
    pub dump_map: Option<PathBuf>,
    pub color: bool,
}

impl RunConfig {
    pub fn new(model: impl Into<PathBuf>) -> Self {
        RunConfig {
            model: model.into(),
            assertion: None,
            bounds: Bounds::default(),
            backend: Backend::Embedded,
            trace_json: None,
            dump_circuit: None,
            dump_map: None,
            color: false,
        }
    }
}

/// Parses `args` and runs the command. Returns the exit code.
pub fn run(
    args: impl IntoIterator<Item = impl Into<OsString> + Clone>,
    color: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = write!(out, "{e}");
            return EXIT_VALID;
        }
        Err(e) => {
            let _ = write!(err, "{e}");
            let _ = writeln!(out, "ERROR: invalid arguments");
            return EXIT_ERROR;
        }
    };
    if cli.serve {
        let cfg = dynscope_service::ServiceConfig {
            allow_origin: cli.allow_origin,
            timeout: Duration::from_secs(cli.timeout),
            ..Default::default()
        };
        return serve(cli.port, cfg, out, err);
    }
    let Some(Command::Check(a)) = cli.command else {
        let _ = writeln!(err, "nothing to do; try `dynscope check <FILE>` or `dynscope --serve`");
        let _ = writeln!(out, "ERROR: no command");
        return EXIT_ERROR;
    };
    let cfg = RunConfig {
        model: a.file,
        assertion: a.assertion,
        bounds: Bounds {
            scope: a.scope,
            unroll: a.unroll,
            bitwidth: a.bitwidth,
            scope_for: a.scope_for.into_iter().collect(),
        },
        backend: a.solver,
        trace_json: a.trace_json,
        dump_circuit: a.dump_circuit,
        dump_map: a.dump_map,
        color,
    };
    cmd_check(&cfg, out, err)
}

fn serve(port: u16, cfg: dynscope_service::ServiceConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let addr = std::net::SocketAddr::from(([127, 0, 0, 1], port));
    let rt = match tokio::runtime::Runtime::new() {
        Ok(rt) => rt,
        Err(e) => return fail(out, err, &format!("could not start the runtime: {e}")),
    };
    let _ = writeln!(err, "listening on http://{addr}");
    match rt.block_on(dynscope_service::serve(addr, cfg)) {
        Ok(()) => EXIT_VALID,
        Err(e) => fail(out, err, &format!("could not serve on {addr}: {e}")),
    }
}

fn fail(out: &mut dyn Write, err: &mut dyn Write, message: &str) -> i32 {
    let _ = writeln!(err, "error: {message}");
    let _ = writeln!(out, "ERROR: {message}");
    EXIT_ERROR
}

fn write_file(path: &Path, text: &str) -> Result<(), String> {
    std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

/// Checks one assertion, or every assertion of the model. Exit code 0 when
/// all hold, 1 when some assertion has a counterexample, 2 on any error.
/// The first token of the last line on `out` is `VALID`, `COUNTEREXAMPLE`,
/// or `ERROR`.
pub fn cmd_check(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match check_inner(cfg, out, err) {
        Ok(code) => code,
        Err(message) => fail(out, err, &message),
    }
}

fn check_inner(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, String> {
    cfg.bounds.validate().map_err(|e| e.to_string())?;
    let file = cfg.model.display().to_string();
    let src = std::fs::read_to_string(&cfg.model).map_err(|e| format!("cannot read {file}: {e}"))?;
    let model = dynscope_core::load(&src).map_err(|e| {
        for d in e.diagnostics() {
            let _ = writeln!(err, "{}", render_diagnostic(&file, &src, &d));
        }
        format!("{file}: {e}")
    })?;
    let names: Vec<String> = match &cfg.assertion {
        Some(a) => vec![a.clone()],
        None => model.assertions.iter().map(|a| a.name.clone()).collect(),
    };
    if names.is_empty() {
        return Err(format!("{file} declares no assertions"));
    }
    let has_outputs = cfg.trace_json.is_some() || cfg.dump_circuit.is_some() || cfg.dump_map.is_some();
    if names.len() > 1 && has_outputs {
        return Err("--trace-json and the dump flags need --assert when the model has several assertions".into());
    }
    let mut failed = Vec::new();
    for name in &names {
        if !check_one(cfg, &model, name, out)? {
            failed.push(name.clone());
        }
    }
    let p = render::Painter { color: cfg.color };
    let b = &cfg.bounds;
    let bounds = format!("(scope {}, unroll {}, bitwidth {})", b.scope, b.unroll, b.bitwidth);
    let w = |e: std::io::Error| e.to_string();
    if failed.is_empty() {
        let what = if names.len() == 1 {
            names[0].clone()
        } else {
            format!("all {} assertions", names.len())
        };
        writeln!(out, "{} {what} {bounds}", p.good("VALID")).map_err(w)?;
        Ok(EXIT_VALID)
    } else {
        writeln!(out, "{} {} {bounds}", p.bad("COUNTEREXAMPLE"), failed.join(", ")).map_err(w)?;
        Ok(EXIT_COUNTEREXAMPLE)
    }
}

/// Returns whether the assertion holds.
fn check_one(cfg: &RunConfig, model: &TypedModel, name: &str, out: &mut dyn Write) -> Result<bool, String> {
    let problem = translate_assertion(model, name, &cfg.bounds).map_err(|e| e.to_string())?;
    if let Some(p) = &cfg.dump_circuit {
        write_file(p, &problem.dump_circuit())?;
    }
    if let Some(p) = &cfg.dump_map {
        write_file(p, &problem.dump_map())?;
    }
    let opts = CheckOptions::with_backend(cfg.backend.clone());
    let report = check_problem(model, &problem, &opts).map_err(|e| e.to_string())?;
    let s = &report.stats;
    let w = |e: std::io::Error| e.to_string();
    let p = render::Painter { color: cfg.color };
    writeln!(
        out,
        "{name}: {} states, {} variables, {} clauses, solved in {} ms",
        s.states,
        s.cnf_vars,
        s.clauses,
        s.solve.as_millis()
    )
    .map_err(w)?;
    match &report.verdict {
        Verdict::Valid => {
            if check_unroll_sufficiency(model, name, &cfg.bounds, &opts).map_err(|e| e.to_string())? {
                writeln!(
                    out,
                    "{} {name}: some loop can still iterate after {} unrollings; executions longer than that were not checked",
                    p.warn("warning:"),
                    cfg.bounds.unroll
                )
                .map_err(w)?;
            }
            writeln!(out, "{name}: holds").map_err(w)?;
            Ok(true)
        }
        Verdict::Counterexample(cx) => {
            if let Some(path) = &cfg.trace_json {
                write_file(path, &cx.trace.to_json_pretty())?;
            }
            render::trace(out, cx, &p).map_err(w)?;
            Ok(false)
        }
    }
}
