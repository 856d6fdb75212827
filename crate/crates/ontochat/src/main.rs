use std::io::Read;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use ontochat::chat::{answer_question, AnswerStatus, AskError, ChatService, ServiceOptions};
use ontochat::config::{ConfigError, EndpointMode, ProviderConfig, ServiceConfig};
use ontochat::core::gateway::DEFAULT_MAX_ATTEMPTS;
use ontochat::core::partition::{apply_comment_policy, partition, CommentPolicy};
use ontochat::core::pipeline::PreparedOntology;
use ontochat::core::rdf::serialize_turtle;
use ontochat::core::sparql::{evaluate, parse_query};
use ontochat::experiment::{run_experiment, write_reports};
use ontochat::load::{load_graph, load_registry, Benchmark, LoadError};
use ontochat::{results_json, server};

#[derive(Parser)]
#[command(name = "ontochat", version, about = "Ask questions about OWL ontologies through generated SPARQL")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split an ontology into TBox and ABox files.
    Partition {
        file: PathBuf,
        #[arg(long)]
        strip_comments: bool,
    },
    /// Run a SPARQL query against a Turtle file and print JSON results.
    Query {
        file: PathBuf,
        /// Query file, or `-` for standard input.
        query: String,
    },
    /// Translate one question, execute it and print the trace.
    Ask {
        ontology: PathBuf,
        question: String,
        #[arg(long)]
        no_comments: bool,
        #[arg(long)]
        provider: Option<PathBuf>,
        /// Remote SPARQL endpoint instead of the embedded engine.
        #[arg(long)]
        endpoint: Option<String>,
        #[arg(long, default_value_t = DEFAULT_MAX_ATTEMPTS)]
        max_attempts: usize,
        /// Print the answer record as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Start the chat HTTP API.
    Serve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the benchmark and write report.{md,csv,json}.
    Eval {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        fixtures: PathBuf,
        #[arg(long)]
        provider: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 4)]
        jobs: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_ATTEMPTS)]
        max_attempts: usize,
    },
}

enum Failure {
    Usage(String),
    Data(String),
    File(String),
    Unavailable(String),
    Software(String),
    Status(AnswerStatus),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 64,
            Failure::Data(_) => 65,
            Failure::File(_) => 66,
            Failure::Unavailable(_) => 69,
            Failure::Software(_) => 70,
            Failure::Status(AnswerStatus::TranslationFailed) => 2,
            Failure::Status(AnswerStatus::ExecutionFailed) => 3,
            Failure::Status(_) => 0,
        }
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        if e.is_io() {
            Failure::File(e.to_string())
        } else {
            Failure::Data(e.to_string())
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io { .. } => Failure::File(e.to_string()),
            ConfigError::MissingSecret(_) => Failure::Usage(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Usage(m)
                | Failure::Data(m)
                | Failure::File(m)
                | Failure::Unavailable(m)
                | Failure::Software(m) => eprintln!("error: {m}"),
                Failure::Status(_) => {}
            }
            ExitCode::from(failure.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Partition { file, strip_comments } => partition_cmd(&file, strip_comments),
        Command::Query { file, query } => query_cmd(&file, &query),
        Command::Ask {
            ontology,
            question,
            no_comments,
            provider,
            endpoint,
            max_attempts,
            json,
        } => ask_cmd(&ontology, &question, !no_comments, provider.as_deref(), endpoint, max_attempts, json),
        Command::Serve { config } => serve_cmd(&config),
        Command::Eval {
            corpus,
            fixtures,
            provider,
            out,
            jobs,
            max_attempts,
        } => eval_cmd(&corpus, &fixtures, &provider, &out, jobs, max_attempts),
    }
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::File(format!("cannot write {}: {e}", path.display())))
}

fn partition_cmd(file: &Path, strip_comments: bool) -> Result<(), Failure> {
    let graph = load_graph(file)?;
    let parts = partition(&graph);
    let tbox = apply_comment_policy(&parts.tbox, CommentPolicy::from_comments(!strip_comments));
    let stem = file.file_stem().map_or_else(|| "ontology".into(), |s| s.to_string_lossy().into_owned());
    let dir = file.parent().unwrap_or(Path::new("."));
    let tbox_path = dir.join(format!("{stem}.tbox.ttl"));
    let abox_path = dir.join(format!("{stem}.abox.ttl"));
    write(&tbox_path, &serialize_turtle(&tbox))?;
    write(&abox_path, &serialize_turtle(&parts.abox))?;
    println!("TBox: {} triples -> {}", tbox.len(), tbox_path.display());
    println!("ABox: {} triples -> {}", parts.abox.len(), abox_path.display());
    Ok(())
}

fn query_cmd(file: &Path, query: &str) -> Result<(), Failure> {
    let text = if query == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::File(format!("cannot read standard input: {e}")))?;
        s
    } else {
        std::fs::read_to_string(query).map_err(|e| Failure::File(format!("cannot read {query}: {e}")))?
    };
    let graph = load_graph(file)?;
    let parsed = parse_query(&text).map_err(|e| Failure::Data(e.to_string()))?;
    let results = evaluate(&parsed, &graph);
    println!("{}", serde_json::to_string_pretty(&results_json::encode(&results)).expect("JSON"));
    Ok(())
}

fn ask_cmd(
    ontology: &Path,
    question: &str,
    comments: bool,
    provider: Option<&Path>,
    endpoint: Option<String>,
    max_attempts: usize,
    json: bool,
) -> Result<(), Failure> {
    let Some(provider) = provider else {
        return Err(Failure::Usage("ask needs --provider <config>".into()));
    };
    let provider = ProviderConfig::load(provider)?.build()?;
    let graph = load_graph(ontology)?;
    let id = ontology.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    let prepared = PreparedOntology::new(id, graph);
    let endpoint = match endpoint {
        Some(url) => EndpointMode::Remote { url, timeout_secs: 60 },
        None => EndpointMode::Embedded,
    };
    let policy = CommentPolicy::from_comments(comments);
    let record = match answer_question(&prepared, policy, question, &provider, &endpoint, max_attempts) {
        Ok(r) => r,
        Err(AskError::EmptyQuestion) => return Err(Failure::Usage("the question is empty".into())),
        Err(e @ AskError::Provider { .. }) => return Err(Failure::Unavailable(e.to_string())),
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&record).expect("JSON"));
    } else {
        println!("Status: {:?}", record.status);
        println!("Query:\n{}", record.generated_query.as_deref().unwrap_or("(none)"));
        if let Some(results) = &record.results {
            println!("Results:\n{}", serde_json::to_string_pretty(results).expect("JSON"));
        }
        if let Some(e) = &record.execution_error {
            println!("Execution error: {e}");
        }
        println!("Attempts:");
        for (i, a) in record.translation.attempts.iter().enumerate() {
            let outcome = a.parse_error.as_deref().unwrap_or("ok");
            println!("  {}. prompt {} : {outcome}", i + 1, &a.prompt_bytes_hash[..12.min(a.prompt_bytes_hash.len())]);
        }
    }
    match record.status {
        AnswerStatus::Answered | AnswerStatus::EmptyResult => Ok(()),
        status => Err(Failure::Status(status)),
    }
}

fn serve_cmd(config_path: &Path) -> Result<(), Failure> {
    let config = ServiceConfig::load(config_path)?;
    let provider = config.provider_config()?.build()?;
    let ontologies = load_registry(&config.ontology_dir)?;
    let addr: SocketAddr = format!("{}:{}", config.host, config.port)
        .parse()
        .map_err(|e| Failure::Usage(format!("bad listen address: {e}")))?;
    let service = ChatService::new(
        ontologies,
        provider,
        ServiceOptions {
            endpoint: config.endpoint.clone(),
            max_attempts: config.max_attempts,
            provider_concurrency: config.provider_concurrency,
            sessions_file: config.sessions_file.clone(),
        },
    )
    .map_err(|e| Failure::Data(e.to_string()))?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::Software(e.to_string()))?;
    eprintln!("listening on http://{addr}");
    runtime
        .block_on(server::serve(server::router(Arc::new(service)), addr))
        .map_err(|e| Failure::Unavailable(format!("cannot serve on {addr}: {e}")))
}

fn eval_cmd(corpus: &Path, fixtures: &Path, provider: &Path, out: &Path, jobs: usize, max_attempts: usize) -> Result<(), Failure> {
    let bench = Benchmark::load(corpus, fixtures)?;
    let config = ProviderConfig::load(provider)?;
    let built = config.build()?;
    let report = run_experiment(&bench, &built, &config.describe(), jobs, max_attempts)
        .map_err(|e| Failure::Software(e.to_string()))?;
    write_reports(&report, out).map_err(|e| Failure::File(format!("cannot write reports to {}: {e}", out.display())))?;
    print!("{}", ontochat::core::bench::render_markdown(&report));
    Ok(())
}
