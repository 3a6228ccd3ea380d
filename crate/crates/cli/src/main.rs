use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ekrgl::certificate::{Certificate, Verdict};
use ekrgl::ekr::{ekr_bound, Mode};
use ekrgl::gfq::prime_power;
use ekrgl_cli::campaign::{parse_campaign, Overrides, GRAMMAR_HELP};
use ekrgl_cli::jobs::{execute, sizes, Caps, JobSpec};
use ekrgl_cli::{exit, run_campaign, summary_table, RunSettings};

#[derive(Parser)]
#[command(name = "ekrgl", version, about = "Verify bounds on intersecting families of invertible matrices")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Print JSON instead of a one-line summary.
    #[arg(long, global = true)]
    json: bool,
    /// Directory for certificate files.
    #[arg(long, global = true, env = "EKRGL_OUTPUT_DIR")]
    output_dir: Option<PathBuf>,
    /// Recompute even when a cached certificate exists.
    #[arg(long, global = true)]
    force: bool,
    /// Campaign jobs run concurrently.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: u64,
    /// Largest graph searched exhaustively.
    #[arg(long, global = true)]
    max_vertices: Option<usize>,
    /// Seed for sampled transitivity checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Print the bound, |GL_n(F_q)| and q^n - 1.
    Bound {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        q: u64,
    },
    /// Build the field-reduction spread of F_q^l and certify it.
    Spread {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        l: usize,
        #[arg(short)]
        q: u64,
        /// Also extract the coclique (needs l = 2n).
        #[arg(long)]
        emit_coclique: bool,
    },
    /// Run one verification and write its certificate.
    Verify {
        #[command(subcommand)]
        target: Target,
    },
    /// Run every job in a campaign file.
    #[command(after_help = GRAMMAR_HELP)]
    Campaign {
        /// Campaign file.
        config: PathBuf,
    },
    /// Re-check a certificate file from its witnesses.
    Check {
        certificate: PathBuf,
    },
}

#[derive(Subcommand)]
enum Target {
    /// Intersecting families in GL_n(F_q).
    Gl {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        q: u64,
        #[arg(long, default_value = "exhaustive")]
        mode: Mode,
        /// Enumerate and classify every maximum family (exhaustive mode).
        #[arg(long)]
        extremal: bool,
    },
    /// Intersecting families of permutations.
    Sn {
        #[arg(short)]
        n: usize,
        /// Check every maximum family is a point-map family.
        #[arg(long)]
        extremal: bool,
    },
    /// Audit a translated vector stabilizer against the spread coclique.
    Audit {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        q: u64,
        /// Fixed vector, comma separated.
        #[arg(long, value_delimiter = ',')]
        vector: Option<Vec<u32>>,
        /// Right translate, row-major, comma separated.
        #[arg(long, value_delimiter = ',')]
        translate: Option<Vec<u32>>,
    },
}

fn usage(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(exit::USAGE as u8)
}

fn verdict_code(v: Verdict) -> ExitCode {
    ExitCode::from(match v {
        Verdict::Pass => exit::PASS,
        Verdict::Fail => exit::FAIL,
    } as u8)
}

fn caps(global: &Global) -> Caps {
    let mut caps = Caps::default();
    if let Some(v) = global.max_vertices {
        caps.max_vertices = v;
    }
    caps
}

const DEFAULT_OUTPUT_DIR: &str = "certificates";

fn run_single(global: &Global, spec: JobSpec) -> ExitCode {
    let dir = global.output_dir.clone().unwrap_or_else(|| DEFAULT_OUTPUT_DIR.into());
    match execute(&spec, &caps(global), global.seed, &dir, global.force) {
        Err(message) => usage(message),
        Ok(outcome) => {
            if global.json {
                println!("{}", outcome.certificate.to_json());
            } else {
                let verdict = match outcome.verdict() {
                    Verdict::Pass => "pass",
                    Verdict::Fail => "fail",
                };
                println!(
                    "{} verdict={verdict} {} file={}{}",
                    spec.label(),
                    sizes(&outcome.certificate),
                    outcome.path.display(),
                    if outcome.cached { " (cached)" } else { "" }
                );
            }
            verdict_code(outcome.verdict())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let global = &cli.global;
    match cli.command {
        Command::Bound { n, q } => {
            if n == 0 {
                return usage("n must be at least 1");
            }
            if prime_power(q).is_none() {
                return usage(format!("{q} is not a prime power"));
            }
            let claim = ekr_bound(n, q);
            if global.json {
                println!("{}", serde_json::to_string_pretty(&claim.record()).expect("serializable"));
            } else {
                println!("{}", claim.summary());
            }
            ExitCode::SUCCESS
        }
        Command::Spread { n, l, q, emit_coclique } => {
            run_single(global, JobSpec::Spread { n, l, q, coclique: emit_coclique })
        }
        Command::Verify { target } => {
            let spec = match target {
                Target::Gl { n, q, mode, extremal } => JobSpec::Gl { n, q, mode, extremal },
                Target::Sn { n, extremal } => JobSpec::Sn { n, extremal },
                Target::Audit { n, q, vector, translate } => JobSpec::Audit { n, q, vector, translate },
            };
            run_single(global, spec)
        }
        Command::Campaign { config } => {
            let text = match fs::read_to_string(&config) {
                Ok(t) => t,
                Err(e) => return usage(format!("cannot read {}: {e}", config.display())),
            };
            let overrides = Overrides { max_vertices: global.max_vertices, max_q: None };
            let campaign = match parse_campaign(&text, &overrides) {
                Ok(c) => c,
                Err(errors) => {
                    for e in &errors {
                        eprintln!("{}: {e}", config.display());
                    }
                    return ExitCode::from(exit::USAGE as u8);
                }
            };
            let dir = global
                .output_dir
                .clone()
                .or_else(|| campaign.output_dir.clone())
                .unwrap_or_else(|| DEFAULT_OUTPUT_DIR.into());
            let settings = RunSettings { output_dir: &dir, force: global.force, jobs: global.jobs as usize, seed: global.seed };
            let results = run_campaign(&campaign, &settings);
            if global.json {
                let rows: Vec<serde_json::Value> = results
                    .iter()
                    .map(|r| {
                        serde_json::json!({
                            "job": r.spec().label(),
                            "passed": r.passed(),
                            "file": match r { ekrgl_cli::JobResult::Done(o) => Some(o.path.display().to_string()), _ => None },
                        })
                    })
                    .collect();
                println!("{}", serde_json::to_string_pretty(&rows).expect("serializable"));
            } else {
                print!("{}", summary_table(&results));
            }
            if results.iter().all(|r| r.passed()) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(exit::FAIL as u8)
            }
        }
        Command::Check { certificate } => {
            let text = match fs::read_to_string(&certificate) {
                Ok(t) => t,
                Err(e) => return usage(format!("cannot read {}: {e}", certificate.display())),
            };
            let cert = match Certificate::from_json(&text) {
                Ok(c) => c,
                Err(e) => return usage(e),
            };
            match cert.recheck() {
                Ok(()) => {
                    let verdict = cert.verdict();
                    println!("{} recheck=ok verdict={}", cert.kind(), if verdict == Verdict::Pass { "pass" } else { "fail" });
                    verdict_code(verdict)
                }
                Err(e) => {
                    println!("{} recheck=failed: {e}", cert.kind());
                    ExitCode::from(exit::FAIL as u8)
                }
            }
        }
    }
}
