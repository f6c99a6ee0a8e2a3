use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use websuite_core::attribution::attribute;
use websuite_core::environment::Environment;
use websuite_core::refagents::{ScriptedPolicy, BUILTIN_AGENTS};
use websuite_core::reporting::{diff_runs, render, Format};
use websuite_core::runner::{run_suite, Agent, Parallelism, RemoteAgent, RunArchive, RunOptions, DEFAULT_TRIALS};
use websuite_core::tasks::{builtin_suite, SuiteSelection};
use websuite_server::DEFAULT_PORT;

#[derive(Parser)]
#[command(name = "websuite", version, about = "Diagnostic benchmark harness for web agents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Serve the environment API and the frontend files.
    Serve {
        #[arg(long, env = "WEBSUITE_PORT", default_value_t = DEFAULT_PORT)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        /// Directory of built frontend files to expose under /ui/.
        #[arg(long)]
        ui: Option<PathBuf>,
    },
    /// Run an agent over the suite and archive the trials.
    Run {
        #[arg(long, default_value = "all")]
        suite: SuiteSelection,
        /// Builtin agent name, an http(s) URL, or a path on the local
        /// agent port (WEBSUITE_PORT).
        #[arg(long)]
        agent: String,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run trials one at a time.
        #[arg(long, conflicts_with = "threads")]
        sequential: bool,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, env = "WEBSUITE_PORT", default_value_t = DEFAULT_PORT)]
        port: u16,
    },
    /// Print the task manifest.
    List,
    /// Attribute archived runs and render tables.
    Report {
        /// Run directory; repeat to put agents side by side.
        #[arg(long, required = true)]
        run: Vec<PathBuf>,
        /// Second run to diff against the first.
        #[arg(long, conflicts_with = "ci")]
        compare: Option<PathBuf>,
        #[arg(long, default_value = "md")]
        format: String,
        #[arg(long)]
        ci: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn agent_from(name: &str, port: u16) -> Result<Box<dyn Agent>> {
    if name.starts_with("http://") || name.starts_with("https://") {
        return Ok(Box::new(RemoteAgent::new(name)));
    }
    if name.starts_with('/') {
        return Ok(Box::new(RemoteAgent::new(&format!("http://127.0.0.1:{port}{name}"))));
    }
    match name.parse::<ScriptedPolicy>() {
        Ok(policy) => Ok(Box::new(policy)),
        Err(e) => bail!("{e}; expected a URL or one of {}", BUILTIN_AGENTS.join(", ")),
    }
}

fn write_output(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Serve { port, host, ui } => {
            let env = Arc::new(Environment::new(Arc::new(builtin_suite())));
            let addr = SocketAddr::new(host, port);
            eprintln!("serving on http://{addr}");
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(websuite_server::serve(addr, websuite_server::router(env, ui)))?;
        }
        Command::Run {
            suite,
            agent,
            trials,
            seed,
            out,
            sequential,
            threads,
            port,
        } => {
            let agent = agent_from(&agent, port)?;
            let parallelism = match (sequential, threads) {
                (true, _) => Parallelism::Sequential,
                (false, Some(n)) => Parallelism::Threads(n),
                (false, None) => Parallelism::Parallel,
            };
            let tasks = builtin_suite().select(suite);
            let opts = RunOptions {
                trials,
                seed,
                out_dir: out.clone(),
                parallelism,
            };
            let archive = run_suite(agent.as_ref(), &tasks, &opts)?;
            for t in tasks.tasks() {
                let records: Vec<_> = archive.records_for(t.id()).collect();
                let passed = records.iter().filter(|r| r.passed).count();
                println!("{:<32} {passed}/{}", t.id(), records.len());
            }
            if let Some(dir) = out {
                eprintln!("archived to {}", dir.display());
            }
        }
        Command::List => {
            println!("{}", serde_json::to_string_pretty(&builtin_suite().manifest())?);
        }
        Command::Report {
            run,
            compare,
            format,
            ci,
            out,
        } => {
            let suite = builtin_suite();
            let load = |dir: &PathBuf| -> Result<_> {
                let archive = RunArchive::load(dir).with_context(|| format!("loading run {}", dir.display()))?;
                Ok(attribute(&suite, &archive)?)
            };
            let reports = run.iter().map(load).collect::<Result<Vec<_>>>()?;
            let doc = match compare {
                Some(other) => {
                    if reports.len() != 1 {
                        bail!("--compare takes exactly one --run");
                    }
                    diff_runs(&reports[0], &load(&other)?)?
                }
                None => render(&reports, format.parse::<Format>()?, ci),
            };
            write_output(&doc.to_string(), out.as_ref())?;
        }
    }
    Ok(())
}
