//! The `survey` command line.
//!
//! Exit codes: 0 success, 1 violations or findings, 2 usage error, 3 I/O
//! error.

use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use survey_core::analysis::{analyze, snapshot, AnalysisConfig};
use survey_core::compiler::{compile, wrap_html};
use survey_core::csv_frontend::{emit_csv, parse_survey, ParseError};
use survey_core::simulator::{simulate, Profile};
use survey_core::static_analysis::{analyze_static, StaticConfig};
use survey_core::Survey;

use crate::http::{router, Deployment, DeployError, HTML_FILE, PAYLOAD_FILE, SOURCE_FILE};
use crate::store::read_log;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FINDINGS: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_IO: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "survey", version, about = "Check, compile, deploy, simulate and analyze CSV surveys")]
pub struct Cli {
    /// Omit timestamps so repeated runs produce identical output.
    #[arg(long, global = true)]
    pub deterministic: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and statically check a survey; exits 1 on violations.
    Check {
        survey: PathBuf,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
        /// Simulated respondents for the average path length.
        #[arg(long, default_value_t = 5000)]
        n_sim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compile a survey into payload.json, index.html and survey.csv.
    Compile {
        survey: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Serve a compiled survey directory and collect responses.
    Serve {
        dir: PathBuf,
        #[arg(long, env = "SURVEY_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Response log; defaults to responses.jsonl in the directory.
        #[arg(long)]
        store: Option<PathBuf>,
    },
    /// Write synthetic responses as JSON lines.
    Simulate {
        survey: PathBuf,
        /// Respondent profile JSON; uniform random when omitted.
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(short = 'n', long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Analyze collected responses; exits 1 when anything is flagged.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub survey: PathBuf,
    pub responses: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 2000)]
    pub bootstrap_b: usize,
    /// Goodness-of-fit order test with (m-1)^2 df, p*log2(p) scores and
    /// the pooled-percentile threshold.
    #[arg(long)]
    pub legacy: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Print the report as JSON instead of text.
    #[arg(long)]
    pub json: bool,
    /// Also write the JSON report to this file.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Io(String),
    /// Reported already; exit 1.
    Findings,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Findings => EXIT_FINDINGS,
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Io(_) => EXIT_IO,
        }
    }
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| io_failure(path, e))
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| io_failure(path, e))
}

fn report_parse_error(path: &Path, e: &ParseError) {
    for d in &e.diagnostics.errors {
        eprintln!("{}: {d}", path.display());
    }
}

fn load_survey(path: &Path) -> Result<Survey, Failure> {
    let text = read_text(path)?;
    match parse_survey(&text) {
        Ok((s, _)) => Ok(s),
        Err(e) => {
            report_parse_error(path, &e);
            Err(Failure::Findings)
        }
    }
}

fn now_unix() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Check {
            survey,
            json,
            n_sim,
            seed,
        } => {
            let text = read_text(&survey)?;
            let (s, diags) = match parse_survey(&text) {
                Ok(x) => x,
                Err(e) => {
                    report_parse_error(&survey, &e);
                    return Err(Failure::Findings);
                }
            };
            let report = analyze_static(&s, Some(&diags), StaticConfig { n_sim, seed });
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            } else {
                print!("{report}");
            }
            if report.is_valid() {
                Ok(())
            } else {
                Err(Failure::Findings)
            }
        }
        Command::Compile { survey, output } => {
            let s = load_survey(&survey)?;
            let payload = match compile(&s) {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("{}: {e}", survey.display());
                    let survey_core::CompileError::CompileOnInvalidSurvey(vs) = &e;
                    for v in vs {
                        eprintln!("  {} at {}: {}", v.code, v.location, v.message);
                    }
                    return Err(Failure::Findings);
                }
            };
            fs::create_dir_all(&output).map_err(|e| io_failure(&output, e))?;
            write_file(&output.join(PAYLOAD_FILE), payload.to_json().as_bytes())?;
            write_file(&output.join(HTML_FILE), wrap_html(&payload).as_bytes())?;
            write_file(&output.join(SOURCE_FILE), emit_csv(&s).as_bytes())?;
            println!("{} -> {}", payload.survey_id, output.display());
            Ok(())
        }
        Command::Serve {
            dir,
            port,
            host,
            store,
        } => serve(&dir, &host, port, store),
        Command::Simulate {
            survey,
            profile,
            n,
            seed,
            output,
        } => {
            let s = load_survey(&survey)?;
            let profile = match profile {
                Some(path) => Profile::from_json(&read_text(&path)?)
                    .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
                None => Profile::uniform(),
            };
            let mut out = Vec::new();
            for r in simulate(&s, &profile, n, seed) {
                serde_json::to_writer(&mut out, &r).expect("records serialize");
                out.push(b'\n');
            }
            write_file(&output, &out)?;
            println!("{n} responses -> {}", output.display());
            Ok(())
        }
        Command::Analyze(args) => analyze_cmd(args, cli.deterministic),
    }
}

fn analyze_cmd(args: AnalyzeArgs, deterministic: bool) -> Result<(), Failure> {
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(Failure::Usage(format!("--alpha must lie in (0, 1), got {}", args.alpha)));
    }
    let s = load_survey(&args.survey)?;
    let log = read_log(&args.responses).map_err(|e| Failure::Io(e.to_string()))?;
    let records = snapshot(log.records);
    let base = if args.legacy {
        AnalysisConfig::legacy()
    } else {
        AnalysisConfig::default()
    };
    let cfg = AnalysisConfig {
        alpha: args.alpha,
        bootstrap_b: args.bootstrap_b,
        seed: args.seed,
        ..base
    };
    let mut report = analyze(&s, &records, &cfg);
    report.rejected_records += log.malformed_lines;
    if !deterministic {
        report.generated_at_unix = Some(now_unix());
    }
    if let Some(path) = &args.output {
        write_file(path, report.to_json().as_bytes())?;
    }
    if args.json {
        print!("{}", report.to_json());
    } else {
        print!("{report}");
    }
    std::io::stdout().flush().ok();
    if report.finding_count() > 0 {
        Err(Failure::Findings)
    } else {
        Ok(())
    }
}

fn serve(dir: &Path, host: &str, port: u16, store: Option<PathBuf>) -> Result<(), Failure> {
    let deployment = Deployment::load(dir, store).map_err(|e| match e {
        DeployError::Invalid(msg) => Failure::Usage(msg),
        other => Failure::Io(other.to_string()),
    })?;
    let addr: SocketAddr = format!("{host}:{port}")
        .parse()
        .map_err(|e| Failure::Usage(format!("bad address {host}:{port}: {e}")))?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::Io(e.to_string()))?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|e| Failure::Io(format!("bind {addr}: {e}")))?;
        println!(
            "serving {} on http://{addr}/survey (responses in {})",
            deployment.survey.survey_id,
            deployment.store.path().display()
        );
        axum::serve(listener, router(Arc::new(deployment)))
            .with_graceful_shutdown(async {
                tokio::signal::ctrl_c().await.ok();
            })
            .await
            .map_err(|e| Failure::Io(e.to_string()))
    })
}

/// Parses `args` and runs; returns the process exit code.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            e.print().ok();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::from(EXIT_OK),
        Err(f) => {
            match &f {
                Failure::Usage(m) | Failure::Io(m) => eprintln!("error: {m}"),
                Failure::Findings => {}
            }
            ExitCode::from(f.code())
        }
    }
}
