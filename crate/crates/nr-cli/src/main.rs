//! Command-line front end. Every operation goes through the HTTP service:
//! either a remote one (`--service URL`) or an ephemeral in-process server.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nr_client::{ApiErrorKind, Client, ClientError, DciBuildRequest, DciParseRequest};
use nr_core::scenario::Scenario;

/// Default output directory when `--out` is not given.
const OUT_DIR_ENV: &str = "NR_OUT_DIR";

const EXIT_CONFIG: u8 = 2;
const EXIT_RESCHEDULE: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(name = "nr", about = "5G NR resource-mapping service and simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP service in the foreground.
    Serve {
        /// Address to bind.
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
    },
    /// Run one or more scenario files and report the results.
    Run(RunArgs),
    /// Standalone codec operations.
    Codec {
        #[command(subcommand)]
        codec: CodecCommand,
    },
    /// List the DCI format registry.
    Formats(ServiceArgs),
}

#[derive(Args)]
struct ServiceArgs {
    /// Base URL of a running service; otherwise one is started in-process.
    #[arg(long)]
    service: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario files; multiple files run concurrently.
    #[arg(required = true)]
    scenarios: Vec<PathBuf>,
    /// Also write a grid rendering per scenario.
    #[arg(long, value_parser = ["text", "csv", "svg"])]
    render: Option<String>,
    /// Output directory for renderings (falls back to $NR_OUT_DIR, then `.`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Mapping policy name.
    #[arg(long)]
    policy: Option<String>,
    /// Seed recorded in the report.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    service: ServiceArgs,
}

#[derive(Subcommand)]
enum CodecCommand {
    Riv {
        #[command(subcommand)]
        op: RivCommand,
    },
    Sliv {
        #[command(subcommand)]
        op: SlivCommand,
    },
    Dci {
        #[command(subcommand)]
        op: DciCommand,
    },
}

#[derive(Subcommand)]
enum RivCommand {
    /// Encode a contiguous grant as a resource indication value.
    Encode {
        #[arg(long)]
        rb_start: u16,
        #[arg(long)]
        l_rbs: u16,
        #[arg(long)]
        n_size: u16,
        #[command(flatten)]
        service: ServiceArgs,
    },
    /// Decode a resource indication value.
    Decode {
        #[arg(long)]
        riv: u32,
        #[arg(long)]
        n_size: u16,
        #[command(flatten)]
        service: ServiceArgs,
    },
}

#[derive(Subcommand)]
enum SlivCommand {
    /// Encode a (start symbol, length) pair.
    Encode {
        #[arg(long)]
        start_symbol: u8,
        #[arg(long)]
        length: u8,
        #[command(flatten)]
        service: ServiceArgs,
    },
    /// Decode a start-and-length indicator value.
    Decode {
        #[arg(long)]
        sliv: u8,
        #[command(flatten)]
        service: ServiceArgs,
    },
}

#[derive(Subcommand)]
enum DciCommand {
    /// Build a DCI message from a JSON request file.
    Build {
        request: PathBuf,
        #[command(flatten)]
        service: ServiceArgs,
    },
    /// Parse a DCI message described by a JSON request file.
    Parse {
        request: PathBuf,
        #[command(flatten)]
        service: ServiceArgs,
    },
}

enum CliError {
    Config(String),
    Reschedule(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => EXIT_CONFIG,
            Self::Reschedule(_) => EXIT_RESCHEDULE,
            Self::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            Self::Config(m) | Self::Reschedule(m) | Self::Io(m) => m,
        }
    }
}

impl From<ClientError> for CliError {
    fn from(err: ClientError) -> Self {
        match err.kind() {
            Some(ApiErrorKind::Reschedule) => Self::Reschedule(err.to_string()),
            Some(_) => Self::Config(err.to_string()),
            None => Self::Io(err.to_string()),
        }
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path, raw: &str) -> Result<T, CliError> {
    serde_json::from_str(raw).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Connect to `--service` or start an in-process server.
async fn connect(service: &ServiceArgs) -> Result<Client, CliError> {
    match &service.service {
        Some(url) => Ok(Client::new(url.clone())),
        None => {
            let (addr, _handle) = nr_service::bind_ephemeral()
                .await
                .map_err(|e| CliError::Io(format!("cannot start embedded service: {e}")))?;
            // The server task lives as long as the runtime; leaking the
            // handle keeps it out of the caller's way.
            Ok(Client::new(format!("http://{addr}")))
        }
    }
}

fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

async fn run_one(
    client: &Client,
    path: &Path,
    args: &RunArgs,
    out: &Path,
) -> Result<String, CliError> {
    let raw = read_file(path)?;
    let mut scenario: Scenario = parse_json(path, &raw)?;
    if let Some(policy) = &args.policy {
        scenario.policy.name = policy.clone();
    }
    if let Some(seed) = args.seed {
        scenario.seed = Some(seed);
    }

    let mut summary = String::new();
    if let Some(format) = &args.render {
        let rendered = client.render(&scenario, format).await?;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "scenario".to_string());
        let ext = match format.as_str() {
            "text" => "txt",
            other => other,
        };
        let target = out.join(format!("{stem}.{ext}"));
        std::fs::write(&target, rendered.artifact)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", target.display())))?;
        let report = rendered.report;
        summary.push_str(&format!(
            "{}: {} grants, {} violations, {} signaling bits, rendering {}\n",
            path.display(),
            report.per_ue.iter().map(|u| u.grants).sum::<u32>(),
            report.violation_count,
            report.signaling_overhead_bits,
            target.display(),
        ));
        for ue in &report.per_ue {
            summary.push_str(&format!(
                "  {}: {} grants, +{} slots latency, {} RBs displaced\n",
                ue.ue_id, ue.grants, ue.added_latency_slots, ue.spectral_displacement_rbs
            ));
        }
    } else {
        let report = client.run_scenario(&scenario).await?;
        summary.push_str(&serde_json::to_string_pretty(&report).expect("report serializes"));
        summary.push('\n');
    }
    Ok(summary)
}

async fn run(args: RunArgs) -> Result<(), CliError> {
    let client = connect(&args.service).await?;
    let out = out_dir(args.out.clone());
    for path in &args.scenarios {
        print!("{}", run_one(&client, path, &args, &out).await?);
    }
    Ok(())
}

async fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Serve { addr } => {
            println!("listening on http://{addr}");
            nr_service::serve(addr)
                .await
                .map_err(|e| CliError::Io(e.to_string()))
        }
        Command::Run(args) => run(args).await,
        Command::Formats(service) => {
            let client = connect(&service).await?;
            for format in client.dci_formats().await? {
                let tag = if format.field_modeled { "modeled" } else { "registry" };
                println!("{:4}  [{tag:8}]  {}", format.name, format.usage);
            }
            Ok(())
        }
        Command::Codec { codec } => match codec {
            CodecCommand::Riv { op } => match op {
                RivCommand::Encode {
                    rb_start,
                    l_rbs,
                    n_size,
                    service,
                } => {
                    let client = connect(&service).await?;
                    let resp = client.riv_encode(rb_start, l_rbs, n_size).await?;
                    println!("riv={} field_bits={}", resp.riv, resp.field_bits);
                    Ok(())
                }
                RivCommand::Decode { riv, n_size, service } => {
                    let client = connect(&service).await?;
                    let resp = client.riv_decode(riv, n_size).await?;
                    println!("rb_start={} l_rbs={}", resp.rb_start, resp.l_rbs);
                    Ok(())
                }
            },
            CodecCommand::Sliv { op } => match op {
                SlivCommand::Encode {
                    start_symbol,
                    length,
                    service,
                } => {
                    let client = connect(&service).await?;
                    let resp = client.sliv_encode(start_symbol, length).await?;
                    println!("sliv={}", resp.sliv);
                    Ok(())
                }
                SlivCommand::Decode { sliv, service } => {
                    let client = connect(&service).await?;
                    let resp = client.sliv_decode(sliv).await?;
                    println!("start_symbol={} length={}", resp.start_symbol, resp.length);
                    Ok(())
                }
            },
            CodecCommand::Dci { op } => match op {
                DciCommand::Build { request, service } => {
                    let raw = read_file(&request)?;
                    let req: DciBuildRequest = parse_json(&request, &raw)?;
                    let client = connect(&service).await?;
                    let resp = client.dci_build(&req).await?;
                    println!("{}", serde_json::to_string_pretty(&resp).expect("serializes"));
                    Ok(())
                }
                DciCommand::Parse { request, service } => {
                    let raw = read_file(&request)?;
                    let req: DciParseRequest = parse_json(&request, &raw)?;
                    let client = connect(&service).await?;
                    let resp = client.dci_parse(&req).await?;
                    println!("{}", serde_json::to_string_pretty(&resp).expect("serializes"));
                    Ok(())
                }
            },
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let runtime = tokio::runtime::Runtime::new().expect("tokio runtime");
    match runtime.block_on(dispatch(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}
