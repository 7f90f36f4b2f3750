use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use dram_petri::analysis::{
    count_traces, for_each_trace_with, k_min, unroll_with, Side, TraceOptions, UnrollOptions,
    DEFAULT_STATE_LIMIT,
};
use dram_petri::emit::{export_dot_stategraph, export_dram_dot};
use dram_petri::verify::{coverage_feed, run_probe_suite, ReplayReport};
use dram_petri::{
    emit, equivalent, parse_trace, render_trace, replay, DramNet, EmissionTarget, Equivalence,
    ProtocolConfig, ReplayMode, ReplayOptions,
};

#[derive(Parser)]
#[command(
    name = "dram-petri",
    version,
    about = "Petri-net models of DRAM command protocols"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the net and print a summary.
    Build {
        config: PathBuf,
        /// Print the net as Graphviz DOT instead.
        #[arg(long)]
        dot: bool,
    },
    /// Explore the reachable markings.
    Unroll {
        config: PathBuf,
        /// Print the state graph as Graphviz DOT.
        #[arg(long)]
        dot: bool,
        #[arg(long, default_value_t = DEFAULT_STATE_LIMIT)]
        limit: usize,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Enumerate legal command traces of length K.
    Traces {
        config: PathBuf,
        #[arg(short)]
        k: usize,
        #[arg(long)]
        count_only: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Fail once more than this many traces are found.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Replay a trace file against the protocol.
    Verify {
        config: PathBuf,
        trace: PathBuf,
        /// Report every violation instead of stopping at the first.
        #[arg(long)]
        collect_all: bool,
        #[arg(long)]
        json: bool,
        /// Check functional legality only.
        #[arg(long)]
        untimed: bool,
    },
    /// Probe every timing arc just before and exactly at its bound.
    Probe { config: PathBuf },
    /// Compare the depth-K trace sets of two configurations.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(short)]
        k: usize,
    },
    /// Emit DOT, constraint table or assertion text.
    Emit {
        config: PathBuf,
        /// dot-net, dot-stategraph, constraint-table or assertion-text
        #[arg(long)]
        target: EmissionTarget,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print every depth-K trace as timed stimulus.
    Feed {
        config: PathBuf,
        #[arg(short)]
        k: usize,
        /// Ticks between commands; defaults to the largest timing value.
        #[arg(long)]
        spacing: Option<u64>,
    },
}

fn load(path: &Path) -> Result<DramNet> {
    let config = ProtocolConfig::from_file(path)?;
    DramNet::from_config(&config).with_context(|| format!("building {}", path.display()))
}

fn output(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Ok(true) means the command found nothing wrong.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Build { config, dot } => {
            let dnet = load(&config)?;
            if dot {
                print!("{}", export_dram_dot(&dnet));
            } else {
                let net = dnet.net();
                println!(
                    "places: {}, transitions: {}, arcs: {}, timing arcs: {}, windows: {}",
                    net.places().len(),
                    net.transitions().len(),
                    net.arcs().len(),
                    dnet.timing_arcs().len(),
                    dnet.window_rules().len()
                );
            }
        }
        Command::Unroll {
            config,
            dot,
            limit,
            threads,
        } => {
            let dnet = load(&config)?;
            let opts = UnrollOptions {
                state_limit: limit,
                threads,
            };
            let sg = unroll_with(dnet.shared_net(), &opts)?;
            if dot {
                print!("{}", export_dot_stategraph(&sg));
            } else {
                println!("states: {}, k_min: {}", sg.state_count(), k_min(&sg));
            }
        }
        Command::Traces {
            config,
            k,
            count_only,
            out,
            threads,
            limit,
        } => {
            let dnet = load(&config)?;
            if count_only {
                writeln!(output(out.as_deref())?, "{}", count_traces(&dnet, k)?)?;
            } else {
                let mut w = output(out.as_deref())?;
                let mut failure = None;
                let opts = TraceOptions { limit, threads };
                for_each_trace_with(dnet.net(), k, &opts, |ids| {
                    if failure.is_none() {
                        let labels: Vec<_> = ids.iter().map(|&t| dnet.label(t)).collect();
                        if let Err(e) = writeln!(w, "{}", render_trace(&labels)) {
                            failure = Some(e);
                        }
                    }
                })?;
                if let Some(e) = failure {
                    return Err(e.into());
                }
                w.flush()?;
            }
        }
        Command::Verify {
            config,
            trace,
            collect_all,
            json,
            untimed,
        } => {
            let dnet = load(&config)?;
            let text = std::fs::read_to_string(&trace)
                .with_context(|| format!("reading {}", trace.display()))?;
            let mode = if collect_all {
                ReplayMode::CollectAll
            } else {
                ReplayMode::StopAtFirst
            };
            let report = match parse_trace(&text) {
                Ok(cmds) => replay(
                    &dnet,
                    &cmds,
                    ReplayOptions {
                        mode,
                        check_timing: !untimed,
                    },
                ),
                Err(e) => ReplayReport::from_parse_error(&dnet, &e),
            };
            if json {
                println!("{}", report.render_json(&dnet));
            } else {
                print!("{}", report.render_text());
            }
            return Ok(report.is_clean());
        }
        Command::Probe { config } => {
            let dnet = load(&config)?;
            let results = run_probe_suite(&dnet);
            let passed = results.iter().filter(|r| r.passed()).count();
            for r in &results {
                println!("{r}");
            }
            println!("probes: {passed}/{} pass", results.len());
            return Ok(passed == results.len());
        }
        Command::Compare { a, b, k } => {
            let (na, nb) = (load(&a)?, load(&b)?);
            match equivalent(&na, &nb, k)? {
                Equivalence::Equal => println!("equivalent up to depth {k}"),
                Equivalence::Divergent { witness, only_in } => {
                    let side = match only_in {
                        Side::First => &a,
                        Side::Second => &b,
                    };
                    println!(
                        "divergent: {} is legal only in {}",
                        render_trace(&witness),
                        side.display()
                    );
                    return Ok(false);
                }
            }
        }
        Command::Emit {
            config,
            target,
            out,
        } => {
            let dnet = load(&config)?;
            let mut w = output(out.as_deref())?;
            w.write_all(emit(&dnet, target)?.as_bytes())?;
            w.flush()?;
        }
        Command::Feed { config, k, spacing } => {
            let dnet = load(&config)?;
            let spacing = spacing
                .or_else(|| dnet.largest_timing_value().map(|(_, v)| v))
                .unwrap_or(1);
            let mut w = output(None)?;
            for (i, trace) in coverage_feed(&dnet, k, spacing)?.enumerate() {
                writeln!(w, "# trace {i}")?;
                for cmd in trace {
                    writeln!(w, "{cmd}")?;
                }
            }
            w.flush()?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
