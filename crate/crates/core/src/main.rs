use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use graphcombo::harness::{self, HarnessError, Options};

#[derive(Parser)]
#[command(name = "graphcombo", version, about = "Bayesian optimization over k-node subsets of a graph")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, env = "GRAPHCOMBO_OUT")]
    out: Option<PathBuf>,
    /// Worker threads (default: available processors).
    #[arg(long, env = "GRAPHCOMBO_JOBS")]
    jobs: Option<usize>,
    /// Base seed; overrides `search.seed`.
    #[arg(long)]
    seed: Option<u64>,
}

impl From<Common> for Options {
    fn from(c: Common) -> Self {
        Options {
            config: c.config,
            out: c.out,
            jobs: c.jobs,
            seed: c.seed,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write the configured graph as an edge list.
    Generate(Common),
    /// Every method for every seed, plus summary.csv.
    Run(Common),
    /// The run grid for each cell of the [sweep] axes.
    Sweep(Common),
    /// Spearman correlation of each kernel on brute-forced combo-graphs.
    KernelValidate(Common),
    /// Cumulative spectral energy of eigenvector signals.
    Smoothness(Common),
    /// Optimal value and subset, when computable.
    GroundTruth(Common),
    /// Aggregate a directory of run files.
    Summarize {
        dir: PathBuf,
        #[arg(long, env = "GRAPHCOMBO_OUT")]
        out: Option<PathBuf>,
    },
}

fn execute(command: Command) -> Result<(), HarnessError> {
    match command {
        Command::Generate(c) => {
            let path = harness::cmd_generate(&c.into())?;
            println!("wrote {}", path.display());
        }
        Command::Run(c) => {
            let o = harness::cmd_run(&c.into())?;
            println!("{} runs written to {}", o.run_files.len(), o.out.display());
            print_final(&o.summary);
        }
        Command::Sweep(c) => {
            let o = harness::cmd_sweep(&c.into())?;
            for (settings, cell) in &o.cells {
                println!("[{}]", harness::cell_label(settings));
                print_final(&cell.summary);
            }
            println!("sweep written to {}", o.out.display());
        }
        Command::KernelValidate(c) => {
            for k in harness::cmd_kernel_validate(&c.into())? {
                println!("{:<24} rho {:.4} ± {:.4} (n={})", k.kernel.name(), k.rho.mean, k.rho.stderr, k.rho.n);
            }
        }
        Command::Smoothness(c) => {
            for curve in harness::cmd_smoothness(&c.into())? {
                let head: Vec<String> = curve.points.iter().take(10).map(|m| format!("{:.3}", m.mean)).collect();
                println!("j={:<3} {} ...", curve.index, head.join(" "));
            }
        }
        Command::GroundTruth(c) => {
            let r = harness::cmd_ground_truth(&c.into())?;
            println!("{} k={} value {} subset {:?}", r.problem, r.k, r.value, r.subset);
        }
        Command::Summarize { dir, out } => {
            let r = harness::cmd_summarize(&dir, out.as_deref())?;
            println!("{} files, {} rows -> {}", r.files, r.rows, r.csv.display());
        }
    }
    Ok(())
}

fn print_final(rows: &[harness::SummaryRow]) {
    let mut last: Vec<&harness::SummaryRow> = Vec::new();
    for r in rows {
        match last.last_mut() {
            Some(prev) if prev.method == r.method => *prev = r,
            _ => last.push(r),
        }
    }
    for r in last {
        let regret = r.regret_mean.map(|m| format!("  regret {m:.6}")).unwrap_or_default();
        println!("{:<20} t={:<4} best {:.6} ± {:.6}{regret}", r.method, r.t, r.best_y_mean, r.best_y_stderr);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprint!("error: {e}");
            if matches!(e, HarnessError::Runtime(_)) {
                eprintln!();
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
