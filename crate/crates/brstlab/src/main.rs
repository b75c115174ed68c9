//! Batch CLI: verify, pages, appendix-b, catalog, reduce.  Exit codes:
//! 0 all requested checks pass, 1 a mathematical check failed, 2 bad
//! configuration.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use brstlab::report::{
    parse_checks, parse_module_dims, parse_module_dims_file, run_appendix, run_catalog,
    run_pages, run_reduce, run_verify, OutputFormat, Report, ReportError, RunConfig,
};

#[derive(Parser)]
#[command(name = "brstlab", about = "Exact-arithmetic BRST reduction laboratory")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Default)]
struct Common {
    /// spectral flow of the truncation
    #[arg(long)]
    flow: Option<i64>,
    /// inclusive conformal grade cutoff
    #[arg(long)]
    max_grade: Option<i64>,
    /// mu-window width
    #[arg(long)]
    window: Option<i64>,
    /// module dims: inline `0:1,1:2` or a path to a `grade dim` file
    #[arg(long)]
    module_dims: Option<String>,
    /// comma-separated subset of d2,grade,lemma,betti,structural,pages,audit
    #[arg(long)]
    checks: Option<String>,
    /// output format: json or text
    #[arg(long)]
    format: Option<String>,
    /// JSON config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// worker thread bound (default: env BRSTLAB_JOBS, then all cores)
    #[arg(long)]
    jobs: Option<usize>,
    /// emit real per-phase wall times (breaks byte-identical reports)
    #[arg(long, default_value_t = false)]
    timings: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the mathematical checks on one truncation
    Verify(Common),
    /// Dump filtration spectral-sequence pages per grade
    Pages {
        #[command(flatten)]
        common: Common,
        /// use the trivial (constant) filtration instead
        #[arg(long, default_value_t = false)]
        trivial_filtration: bool,
    },
    /// Run the gauged, gauged-lattice, and Cartan model complexes standalone
    AppendixB {
        #[command(flatten)]
        common: Common,
        /// zero-mode cap of the gauged model
        #[arg(long, default_value_t = 3)]
        cap: i64,
    },
    /// Exact weight tables and reduction predictions for an admissible level
    Catalog {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        u: i64,
        #[arg(long)]
        v: i64,
    },
    /// Compare predicted and computed reduction of a user module
    Reduce(Common),
}

fn merge_config(common: &Common) -> Result<RunConfig, ReportError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &common.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ReportError::Config(format!("config file {}: {e}", path.display())))?;
        let v: Value = serde_json::from_str(&text)
            .map_err(|e| ReportError::Config(format!("config file {}: {e}", path.display())))?;
        apply_file_config(&mut cfg, &v)?;
    }
    if let Some(flow) = common.flow {
        cfg.flow = flow;
    }
    if let Some(g) = common.max_grade {
        cfg.max_grade = g;
    }
    if let Some(w) = common.window {
        cfg.window = w;
    }
    if let Some(md) = &common.module_dims {
        cfg.module_dims = module_dims_from_arg(md)?;
    }
    if let Some(c) = &common.checks {
        cfg.checks = parse_checks(c)?;
    }
    if let Some(f) = &common.format {
        cfg.format = OutputFormat::parse(f)?;
    }
    cfg.timings = common.timings;
    Ok(cfg)
}

fn module_dims_from_arg(arg: &str) -> Result<BTreeMap<i64, usize>, ReportError> {
    if arg.contains(':') {
        parse_module_dims(arg)
    } else {
        let text = std::fs::read_to_string(arg)
            .map_err(|e| ReportError::Config(format!("module dims file {arg}: {e}")))?;
        parse_module_dims_file(&text)
    }
}

fn apply_file_config(cfg: &mut RunConfig, v: &Value) -> Result<(), ReportError> {
    let obj = v
        .as_object()
        .ok_or_else(|| ReportError::Config("config file must be a JSON object".into()))?;
    for (key, val) in obj {
        match key.as_str() {
            "flow" => cfg.flow = as_i64(val, key)?,
            "max_grade" => cfg.max_grade = as_i64(val, key)?,
            "window" => cfg.window = as_i64(val, key)?,
            "module_dims" => {
                cfg.module_dims = match val {
                    Value::String(s) => module_dims_from_arg(s)?,
                    Value::Object(m) => {
                        let mut out = BTreeMap::new();
                        for (g, d) in m {
                            let grade: i64 = g.parse().map_err(|_| {
                                ReportError::Config(format!("bad module_dims grade `{g}`"))
                            })?;
                            let dim = d.as_u64().ok_or_else(|| {
                                ReportError::Config(format!("bad module_dims dim for `{g}`"))
                            })? as usize;
                            out.insert(grade, dim);
                        }
                        out
                    }
                    _ => return Err(ReportError::Config("bad module_dims in config".into())),
                };
            }
            "checks" => {
                cfg.checks = parse_checks(
                    val.as_str()
                        .ok_or_else(|| ReportError::Config("checks must be a string".into()))?,
                )?;
            }
            "format" => {
                cfg.format = OutputFormat::parse(
                    val.as_str()
                        .ok_or_else(|| ReportError::Config("format must be a string".into()))?,
                )?;
            }
            other => {
                return Err(ReportError::Config(format!("unknown config key `{other}`")));
            }
        }
    }
    Ok(())
}

fn as_i64(v: &Value, key: &str) -> Result<i64, ReportError> {
    v.as_i64().ok_or_else(|| ReportError::Config(format!("`{key}` must be an integer")))
}

fn jobs_bound(common: &Common) -> Option<usize> {
    common.jobs.or_else(|| {
        std::env::var("BRSTLAB_JOBS").ok().and_then(|s| s.parse().ok()).filter(|&n| n > 0)
    })
}

fn dispatch(cli: &Cli) -> Result<Report, ReportError> {
    match &cli.cmd {
        Cmd::Verify(common) => run_verify(&merge_config(common)?),
        Cmd::Pages { common, trivial_filtration } => {
            run_pages(&merge_config(common)?, *trivial_filtration)
        }
        Cmd::AppendixB { common, cap } => run_appendix(&merge_config(common)?, *cap),
        Cmd::Catalog { common, u, v } => run_catalog(&merge_config(common)?, *u, *v),
        Cmd::Reduce(common) => run_reduce(&merge_config(common)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = match &cli.cmd {
        Cmd::Verify(c) | Cmd::Reduce(c) => c,
        Cmd::Pages { common, .. } | Cmd::AppendixB { common, .. } | Cmd::Catalog { common, .. } => {
            common
        }
    };
    let run = || dispatch(&cli);
    let outcome = match jobs_bound(common) {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build();
            match pool {
                Ok(pool) => pool.install(run),
                Err(e) => Err(ReportError::Config(format!("bad jobs bound: {e}"))),
            }
        }
        None => run(),
    };
    match outcome {
        Ok(report) => {
            print!("{}", report.render());
            ExitCode::from(report.exit_code as u8)
        }
        Err(e @ ReportError::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
