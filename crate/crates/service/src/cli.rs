//! `acr` subcommands. Machine output is JSON on stdout, prose on stderr.
//! Exit codes: 0 success, 1 operation failure, 2 usage error.

use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::sync::Arc;

use acr_core::agent::{run_agent, AgentConfig, StepRole};
use acr_core::docparse::parse_fixture_schedule;
use acr_core::gbxml::{extract_attributes, parse_gbxml};
use acr_core::mcp::McpServer;
use acr_core::retrieval::{answer_with_rag, ingest_provisions, load_corpus, DEFAULT_BUDGET, DEFAULT_K};
use acr_core::rules::{check_interior_lighting, Area, AreaUnit, BuildingUseType, CodeVersion, ComplianceInput};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::bench::{default_prompts, run_bench, BenchPrompt, SystemClock};
use crate::chat::ChatService;
use crate::setup::{load_catalog, load_index, GeneratorArgs, ToolSources};
use crate::{read_file, ServiceError};

#[derive(Debug, Parser)]
#[command(name = "acr", version, about = "Building-code compliance toolkit", arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-surface geometry and construction attributes from a gbXML file.
    Extract { file: PathBuf },
    /// Fixture schedules and operating hours from design-document text.
    ParseDocs { file: PathBuf },
    /// Interior lighting power check (building area method).
    Check(CheckArgs),
    /// Build a provision index from a corpus file.
    Index {
        corpus: PathBuf,
        /// Write the index here instead of stdout.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Answer a question from retrieved provisions.
    Ask {
        query: String,
        #[arg(long, value_name = "FILE")]
        corpus: Option<PathBuf>,
        #[arg(long, value_name = "FILE", conflicts_with = "corpus")]
        index: Option<PathBuf>,
        #[arg(short, long, default_value_t = DEFAULT_K)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        #[command(flatten)]
        generator: GeneratorArgs,
    },
    /// Run one tool-calling agent episode.
    Agent {
        query: String,
        #[arg(long, default_value_t = acr_core::agent::DEFAULT_MAX_STEPS)]
        max_steps: usize,
        #[command(flatten)]
        tools: ToolSources,
        #[command(flatten)]
        generator: GeneratorArgs,
    },
    /// Serve the tool registry over MCP on stdin/stdout.
    McpServe {
        #[command(flatten)]
        tools: ToolSources,
    },
    /// Serve the chat HTTP API.
    ChatServe {
        #[arg(long, env = "PORT", default_value_t = 8080)]
        port: u16,
        /// Append-only session journal, replayed at startup.
        #[arg(long, value_name = "FILE")]
        journal: Option<PathBuf>,
        #[arg(long, default_value_t = acr_core::agent::DEFAULT_MAX_STEPS)]
        max_steps: usize,
        #[command(flatten)]
        tools: ToolSources,
        #[command(flatten)]
        generator: GeneratorArgs,
    },
    /// Time generator responses over a prompt set.
    Bench {
        /// JSON array of {id, text}; defaults to the built-in prompt set.
        #[arg(long, value_name = "FILE")]
        prompts: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        #[command(flatten)]
        generator: GeneratorArgs,
    },
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// ComplianceInput JSON document; replaces the individual flags.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["area", "unit", "use_type", "code", "designed_w"])]
    input: Option<PathBuf>,
    #[arg(long, required_unless_present = "input")]
    area: Option<f64>,
    #[arg(long, default_value = "ft2")]
    unit: String,
    #[arg(long = "use", value_name = "USE_TYPE", required_unless_present = "input")]
    use_type: Option<String>,
    #[arg(long, default_value = "ashrae_90_1_2022")]
    code: String,
    /// Designed interior lighting power in watts.
    #[arg(long)]
    designed_w: Option<f64>,
    #[arg(long, value_name = "FILE")]
    lpd_table: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, stdin: &mut dyn BufRead, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    2
                }
            };
        }
    };
    match dispatch(cli.command, stdin, stdout, stderr) {
        Ok(()) => 0,
        Err(failure) => {
            let _ = writeln!(stderr, "error: {}", failure.error);
            let mut doc = failure.error.document();
            if let Some(extra) = failure.detail {
                doc["error"]["detail"] = extra;
            }
            let _ = writeln!(stdout, "{}", pretty(&doc));
            1
        }
    }
}

struct Failure {
    error: ServiceError,
    detail: Option<serde_json::Value>,
}

impl<E: Into<ServiceError>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure { error: e.into(), detail: None }
    }
}

fn pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output documents serialize")
}

fn emit<T: Serialize>(stdout: &mut dyn Write, value: &T) -> Result<(), Failure> {
    writeln!(stdout, "{}", pretty(value)).map_err(io_failure)
}

fn io_failure(e: std::io::Error) -> Failure {
    ServiceError::new("IoError", e.to_string()).into()
}

fn dispatch(command: Command, stdin: &mut dyn BufRead, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Extract { file } => {
            let parsed = parse_gbxml(&read_file(&file)?)?;
            for w in &parsed.warnings {
                let _ = writeln!(stderr, "warning: {w}");
            }
            let doc = extract_attributes(&parsed.model);
            emit(stdout, &json!({ "model": doc, "warnings": parsed.warnings }))
        }
        Command::ParseDocs { file } => {
            let report = parse_fixture_schedule(&read_file(&file)?);
            if !report.missing.is_empty() {
                let _ = writeln!(stderr, "MISSING INFORMATION - review required:");
                for m in &report.missing {
                    let _ = writeln!(stderr, "  - {}: {} ({})", m.record, m.field, m.note);
                }
            }
            emit(stdout, &report)
        }
        Command::Check(args) => check(args, stdout, stderr),
        Command::Index { corpus, out } => {
            let index = ingest_provisions(load_corpus(&read_file(&corpus)?)?)?;
            match out {
                Some(path) => {
                    std::fs::write(&path, pretty(&index))
                        .map_err(|e| ServiceError::new("IoError", format!("{}: {e}", path.display())))?;
                    let _ = writeln!(stderr, "indexed {} provisions into {}", index.provisions.len(), path.display());
                    emit(stdout, &json!({ "index": path, "provisions": index.provisions.len(), "chunks": index.chunks.len() }))
                }
                None => emit(stdout, &index),
            }
        }
        Command::Ask { query, corpus, index, k, budget, generator } => {
            let index = load_index(corpus.as_deref(), index.as_deref())?
                .ok_or_else(|| ServiceError::new("InvalidInput", "ask needs --corpus or --index"))?;
            let llm = generator.build(false)?;
            let answer = answer_with_rag(&index, &query, llm.as_ref(), k, budget, &generator.params())?;
            let _ = writeln!(stderr, "{}", answer.answer);
            emit(stdout, &json!({ "query": query, "answer": answer.answer, "cited_ids": answer.cited_ids, "results": answer.results }))
        }
        Command::Agent { query, max_steps, tools, generator } => {
            let loaded = tools.load()?;
            for w in &loaded.warnings {
                let _ = writeln!(stderr, "warning: {w}");
            }
            let llm = generator.build(false)?;
            let config = AgentConfig { max_steps, params: generator.params(), ..Default::default() };
            match run_agent(&loaded.registry, llm.as_ref(), &query, &config) {
                Ok(run) => {
                    let chain_log: Vec<_> = run.transcript.steps.iter().filter(|s| s.role != StepRole::System).collect();
                    let _ = writeln!(stderr, "Tools Used: {}", run.tools_used.join(", "));
                    emit(
                        stdout,
                        &json!({
                            "input": run.input,
                            "output": run.output,
                            "tools_used": run.tools_used,
                            "chain_log": chain_log,
                            "metrics": run.transcript.metrics,
                        }),
                    )
                }
                Err(e) => {
                    let detail = e.transcript().map(|t| json!({ "chain_log": t.steps, "tools_used": t.tools_used }));
                    Err(Failure { error: ServiceError::new(e.kind(), e.to_string()), detail })
                }
            }
        }
        Command::McpServe { tools } => {
            let loaded = tools.load()?;
            for w in &loaded.warnings {
                let _ = writeln!(stderr, "warning: {w}");
            }
            let _ = writeln!(stderr, "serving {} tools over MCP on stdio", loaded.registry.len());
            McpServer::new(loaded.registry).serve(stdin, stdout).map_err(io_failure)
        }
        Command::ChatServe { port, journal, max_steps, tools, generator } => {
            let loaded = tools.load()?;
            let llm = generator.build(true);
            if let Err(e) = &llm {
                let _ = writeln!(stderr, "warning: {e}; chat requests will return 503");
            }
            let config = AgentConfig { max_steps, params: generator.params(), ..Default::default() };
            let mut service = ChatService::new(loaded.registry, llm, config);
            if let Some(path) = &journal {
                service = service.with_journal(path)?;
            }
            let runtime = tokio::runtime::Runtime::new().map_err(io_failure)?;
            let _ = writeln!(stderr, "chat service on port {port}");
            runtime.block_on(crate::http::serve(Arc::new(service), port)).map_err(io_failure)
        }
        Command::Bench { prompts, reps, generator } => {
            let prompts: Vec<BenchPrompt> = match prompts {
                Some(path) => serde_json::from_str(&read_file(&path)?)
                    .map_err(|e| ServiceError::new("PromptFormat", format!("{}: {e}", path.display())))?,
                None => default_prompts(),
            };
            let llm = generator.build(true)?;
            let report = run_bench(&prompts, llm.as_ref(), reps, &generator.params(), &SystemClock::new())?;
            for s in &report.summary {
                let _ = writeln!(
                    stderr,
                    "{}: {} runs, {} errors, mean {:.1} ms",
                    s.prompt_id,
                    s.runs,
                    s.errors,
                    s.mean_ms.unwrap_or(f64::NAN)
                );
            }
            emit(stdout, &report)
        }
    }
}

fn check(args: CheckArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    let catalog = load_catalog(args.lpd_table.as_deref())?;
    let input = match &args.input {
        Some(path) => serde_json::from_str::<ComplianceInput>(&read_file(path)?)
            .map_err(|e| ServiceError::new("InvalidInput", format!("{}: {e}", path.display())))?,
        None => {
            let unit: AreaUnit = args.unit.parse()?;
            ComplianceInput {
                floor_area: Area::new(args.area.expect("required by clap"), unit),
                use_type: BuildingUseType::new(args.use_type.clone().expect("required by clap"))?,
                code_version: CodeVersion::new(args.code.clone())?,
                designed_wattage: args.designed_w,
            }
        }
    };
    let result = check_interior_lighting(&catalog, &input)?;
    let _ = writeln!(stderr, "{}", result.summary());
    emit(stdout, &result)
}
