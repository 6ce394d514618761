//! `qpn`: reduce, order, enumerate and prune qualitative decision models.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qpn::dominance::{admissible_set, AdmissibleOptions};
use qpn::dot::network_dot;
use qpn::format::{parse, serialize};
use qpn::oracle::{verify_reduction_signs, SamplerConfig};
use qpn::order::{induced_probability_order, induced_utility_order};
use qpn::reduction::reduce;
use qpn::strategy::{analysis_network, case_analysis, enumerate_strategies};
use qpn::{Error, Network};

const INVALID_MODEL: u8 = 1;
const CONTRADICTION: u8 = 2;
const USAGE: u8 = 3;

#[derive(Parser)]
#[command(name = "qpn", version, about = "Qualitative probabilistic network analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model file and list every structural problem.
    Validate { file: PathBuf },
    /// Remove, splice and reverse nodes down to the decision-relevant core.
    Reduce {
        file: PathBuf,
        /// Write the reduced network as Graphviz text.
        #[arg(long, value_name = "OUT")]
        dot: Option<PathBuf>,
    },
    /// Print the utility order, or a node's probability order with --node.
    Order {
        file: PathBuf,
        #[arg(long, value_name = "V")]
        node: Option<String>,
        #[arg(long, value_name = "OUT")]
        dot: Option<PathBuf>,
    },
    /// Enumerate strategies with their case analyses.
    Strategies { file: PathBuf },
    /// Prove strategies inadmissible and report the survivors.
    Admissible {
        file: PathBuf,
        /// Matched-case pairwise dominance only.
        #[arg(long, conflicts_with_all = ["kway", "mixed", "no_prune"])]
        pairwise_only: bool,
        /// Also try dominance by the best of several strategies.
        #[arg(long)]
        kway: bool,
        /// Also try dominance by mixed strategies.
        #[arg(long)]
        mixed: bool,
        /// Skip the hypothetical-optimality rules.
        #[arg(long)]
        no_prune: bool,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Check every reduced influence sign against sampled numeric models.
    Verify {
        file: PathBuf,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Print a built-in model file.
    Example { name: String },
}

#[derive(Args)]
struct Sampling {
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

enum Failure {
    Model(String),
    Contradiction(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::OracleContradiction(_) => Failure::Contradiction(e.to_string()),
            other => Failure::Model(other.to_string()),
        }
    }
}

fn load(path: &Path) -> Result<Network, Failure> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Usage(format!("stdin: {e}")))?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
    };
    parse(&text).map_err(|e| Failure::Model(format!("{}: {e}", path.display())))
}

fn valid(path: &Path) -> Result<Network, Failure> {
    let net = load(path)?;
    let problems = net.validate();
    if problems.is_empty() {
        return Ok(net);
    }
    let lines: Vec<String> = problems.iter().map(|v| format!("{}: {v}", path.display())).collect();
    Err(Failure::Model(lines.join("\n")))
}

fn write_dot(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn run(command: Command) -> Result<String, Failure> {
    let mut out = String::new();
    match command {
        Command::Validate { file } => {
            let net = valid(&file)?;
            let _ = writeln!(
                out,
                "ok: {} variables, {} influences, {} informational links",
                net.variables().len(),
                net.influences().count(),
                net.informational_links().len()
            );
        }
        Command::Reduce { file, dot } => {
            let net = valid(&file)?;
            let (reduced, log) = reduce(&net)?;
            let _ = writeln!(out, "== steps ({})", log.len());
            for step in &log {
                let _ = writeln!(out, "{step}");
            }
            let _ = writeln!(out, "\n== reduced network");
            out.push_str(&serialize(&reduced));
            if let Some(path) = dot {
                write_dot(&path, &network_dot(&reduced))?;
            }
        }
        Command::Order { file, node, dot } => {
            let net = valid(&file)?;
            let po = match &node {
                Some(v) => {
                    if !net.contains(v) {
                        return Err(Failure::Usage(format!("unknown node `{v}`")));
                    }
                    induced_probability_order(&net, v)?
                }
                None => induced_utility_order(&net)?,
            };
            out.push_str(&po.render());
            if let Some(path) = dot {
                write_dot(&path, &po.to_dot())?;
            }
        }
        Command::Strategies { file } => {
            let net = valid(&file)?;
            let analysis = analysis_network(&net)?;
            let all = enumerate_strategies(&analysis)?;
            let _ = writeln!(out, "== strategies ({})", all.len());
            for (i, s) in all.iter().enumerate() {
                let _ = writeln!(out, "{:>3}. {}", i + 1, s.describe(&analysis));
            }
            for s in &all {
                let _ = writeln!(out);
                out.push_str(&case_analysis(&analysis, s)?.table(&analysis, &s.describe(&analysis)));
            }
        }
        Command::Admissible {
            file,
            pairwise_only,
            kway,
            mixed,
            no_prune,
            sampling,
        } => {
            let net = valid(&file)?;
            let options = AdmissibleOptions {
                pairwise: true,
                kway,
                mixed,
                prune: !(no_prune || pairwise_only),
                samples: sampling.samples,
                seed: sampling.seed,
            };
            let report = admissible_set(&net, &options)?;
            out.push_str(&report.render());
        }
        Command::Verify { file, sampling } => {
            let net = valid(&file)?;
            let (reduced, log) = reduce(&net)?;
            let cfg = SamplerConfig::new(sampling.seed, sampling.samples);
            let report = verify_reduction_signs(&net, &reduced, &log, &cfg)?;
            out.push_str(&report.render());
            if report.violation_count() > 0 {
                return Err(Failure::Contradiction(out));
            }
        }
        Command::Example { name } => match qpn::models::builtin(&name) {
            Some(text) => out.push_str(text),
            None => return Err(Failure::Usage(format!("no built-in model `{name}` (try test-treat)"))),
        },
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(USAGE);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(cli.command) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Model(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(INVALID_MODEL)
        }
        Err(Failure::Contradiction(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(CONTRADICTION)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(USAGE)
        }
    }
}
