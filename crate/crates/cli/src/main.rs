use std::path::{Path, PathBuf};
use std::process::ExitCode;

use alexdb_cli::eval::{load_store, parse_join, pick_version};
use alexdb_cli::output::write_out;
use alexdb_cli::{evaluate, parse, render, CliError, Env, Expr, Format, Value};
use alexdb_core::Limits;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "alexdb", about = "Topological database over finite spaces")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Store directory; also the base for relative `load` paths
    #[arg(long, global = true)]
    store: Option<PathBuf>,
    /// Version to read (defaults to the single head)
    #[arg(long, global = true)]
    version: Option<String>,
    /// Consistency rule applied by merges (repeatable)
    #[arg(long = "rule", global = true)]
    rules: Vec<String>,
    /// Write the resulting space or store to this directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Summary)]
    format: OutputFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Summary,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Check keys, T0 and continuity of generalisations
    Validate {
        dir: Option<PathBuf>,
        #[arg(long)]
        surjective: bool,
        #[arg(long)]
        monotonic: bool,
    },
    /// Dimension of a version
    Dim { dir: Option<PathBuf> },
    /// Elements present at time t
    Slice {
        dir: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
    },
    /// Rebuild one version
    Reconstruct { dir: Option<PathBuf> },
    /// Merge the heads of two stores
    Merge { left: PathBuf, right: PathBuf },
    /// Whether two elements are connected inside a region
    Path {
        dir: PathBuf,
        a: String,
        b: String,
        /// Comma-separated element ids (defaults to everything)
        #[arg(long, value_delimiter = ',')]
        region: Option<Vec<String>>,
    },
    /// Versions in which two elements are connected inside a region
    VersionsWithPath {
        dir: PathBuf,
        a: String,
        b: String,
        #[arg(long, value_delimiter = ',')]
        region: Option<Vec<String>>,
        /// Answer through the coarser level when generalisations allow it
        #[arg(long)]
        monotone: bool,
    },
    /// Integration space over all levels of detail
    Telescope {
        dir: Option<PathBuf>,
        #[arg(long, default_value = "vertex-and-edge")]
        join: String,
    },
    /// Copy a store, or one version of it, to --out
    Export { dir: Option<PathBuf> },
    /// Evaluate a query expression
    Eval {
        expr: String,
        /// NAME=EXPR, referenced as @NAME
        #[arg(long = "bind")]
        binds: Vec<String>,
    },
    /// Write the example stores into a directory
    Demo { dir: PathBuf },
}

fn size_guard() -> Result<Limits, CliError> {
    match std::env::var("ALEXDB_SIZE_GUARD") {
        Err(_) => Ok(Limits::default()),
        Ok(s) => s
            .trim()
            .parse()
            .map(Limits::uniform)
            .map_err(|_| CliError::Usage(format!("ALEXDB_SIZE_GUARD must be a non-negative integer, got {s:?}"))),
    }
}

fn text(s: impl Into<String>) -> Expr {
    Expr::Str(s.into())
}

fn load(dir: &Path) -> Expr {
    Expr::call("load", vec![text(dir.to_string_lossy())])
}

fn named(op: &str, args: Vec<Expr>, named: Vec<(&str, Expr)>) -> Expr {
    Expr::Call {
        op: op.into(),
        args,
        named: named.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
    }
}

fn region(ids: Option<Vec<String>>) -> Vec<(&'static str, Expr)> {
    ids.map(|ids| vec![("region", Expr::Set(ids.into_iter().map(text).collect()))])
        .unwrap_or_default()
}

fn flag(on: bool) -> Expr {
    Expr::Word(if on { "yes" } else { "no" }.into())
}

/// Like `println!`, but a closed pipe ends output quietly instead of panicking.
fn emit(text: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let g = cli.global;
    let mut env = Env {
        base: g.store.clone(),
        version: g.version.clone(),
        rules: g.rules.clone(),
        limits: size_guard()?,
        ..Env::default()
    };
    let store_dir = |dir: Option<PathBuf>| {
        dir.or_else(|| g.store.clone())
            .ok_or_else(|| CliError::Usage("no store given; pass a directory or --store".into()))
    };
    let format = match g.format {
        OutputFormat::Summary => Format::Summary,
        OutputFormat::Csv => Format::Csv,
    };
    let mut fail_on_findings = false;
    let expr = match cli.command {
        Command::Demo { dir } => {
            let names = alexdb_core::demo::write_demo_stores(&dir)?;
            emit(&names.join("\n"));
            return Ok(ExitCode::SUCCESS);
        }
        Command::Validate {
            dir,
            surjective,
            monotonic,
        } => {
            fail_on_findings = true;
            let s = load(&store_dir(dir)?);
            named(
                "validate",
                vec![s],
                vec![("surjective", flag(surjective)), ("monotonic", flag(monotonic))],
            )
        }
        Command::Dim { dir } => Expr::call("dim", vec![load(&store_dir(dir)?)]),
        Command::Slice { dir, t } => named(
            "slice",
            vec![load(&store_dir(dir)?)],
            vec![("t", Expr::Num(t.to_string()))],
        ),
        Command::Reconstruct { dir } => {
            let dir = store_dir(dir)?;
            let v = pick_version(&load_store(&env, &dir)?, g.version.as_deref())?;
            Expr::call("version", vec![load(&dir), text(v)])
        }
        Command::Merge { left, right } => Expr::call("merge", vec![load(&left), load(&right)]),
        Command::Path { dir, a, b, region: r } => named("path", vec![load(&dir), text(a), text(b)], region(r)),
        Command::VersionsWithPath {
            dir,
            a,
            b,
            region: r,
            monotone,
        } => {
            let mut n = region(r);
            n.push(("monotone", flag(monotone)));
            named("versions_with_path", vec![load(&dir), text(a), text(b)], n)
        }
        Command::Telescope { dir, join } => {
            parse_join(&join).map_err(CliError::Usage)?;
            named("telescope", vec![load(&store_dir(dir)?)], vec![("join", text(join))])
        }
        Command::Export { dir } => {
            if g.out.is_none() {
                return Err(CliError::Usage("export needs --out".into()));
            }
            let s = load(&store_dir(dir)?);
            match &g.version {
                Some(v) => Expr::call("version", vec![s, text(v.clone())]),
                None => s,
            }
        }
        Command::Eval { expr, binds } => {
            for b in binds {
                let Some((name, src)) = b.split_once('=') else {
                    return Err(CliError::Usage(format!("--bind expects NAME=EXPR, got {b:?}")));
                };
                let value = evaluate(&env, &parse(src)?)?;
                env.bindings.insert(name.trim().to_string(), value);
            }
            parse(&expr)?
        }
    };
    let value = evaluate(&env, &expr)?;
    if let Some(out) = &g.out {
        let version = g.version.clone().unwrap_or_else(|| "v0".into());
        write_out(&value, out, &version)?;
    }
    emit(&render(&value, format));
    let findings = matches!(&value, Value::Report(r) if !r.is_clean());
    Ok(if fail_on_findings && findings {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
