//! deraz — derived Azumaya verifier.
//!
//! `deraz run job.deraz` executes the task in a job file and prints a
//! deterministic report on stdout; `deraz verify-certificate cert.deraz`
//! re-checks a witness against its claim. Exit codes: 0 verified or
//! constructed, 1 refuted (report embeds a machine-checkable witness),
//! 2 not established within the configured caps, 3 malformed input.
//! Wall-clock timing goes to stderr so reports stay byte-identical
//! across runs and thread counts.

mod build;
mod job;
mod report;
mod tasks;

use std::path::PathBuf;
use std::process::exit;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use build::Caps;

#[derive(Parser)]
#[command(
    name = "deraz",
    version,
    about = "exact verifier for derived Azumaya algebras and glued compact generators"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Print the report as JSON instead of text
    #[arg(long)]
    json: bool,
    /// Worker threads for homology computations (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Weight window for Čech global sections
    #[arg(long)]
    window: Option<i64>,
    /// Resolution depth bound for the smoothness semidecision
    #[arg(long)]
    depth_bound: Option<usize>,
    /// Module-rank bound for the trivialization search
    #[arg(long)]
    rank_bound: Option<usize>,
    /// Step budget for the trivialization search
    #[arg(long)]
    step_budget: Option<u64>,
    /// Total-rank cap for constructed complexes
    #[arg(long)]
    rank_cap: Option<usize>,
}

impl Common {
    fn caps(&self) -> Caps {
        let mut caps = Caps::default();
        if let Some(w) = self.window {
            caps.window = w;
        }
        if let Some(d) = self.depth_bound {
            caps.depth_bound = d.max(1);
        }
        if let Some(r) = self.rank_bound {
            caps.rank_bound = r.max(1);
        }
        if let Some(s) = self.step_budget {
            caps.step_budget = s.max(1);
        }
        if let Some(c) = self.rank_cap {
            caps.rank_cap = c.max(1);
        }
        caps
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the task in a job file
    Run {
        /// Job file (see JOBFILE.md for the grammar)
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Re-check a witness block against its claim
    VerifyCertificate {
        /// Certificate file: objects plus one witness (a task block is optional)
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

fn main() {
    exit(real_main());
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help/version are successful outputs; everything else is an
            // input error (exit 3, like any other malformed input)
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return code;
        }
    };
    let (file, common, verify_mode) = match &cli.cmd {
        Cmd::Run { file, common } => (file, common, false),
        Cmd::VerifyCertificate { file, common } => (file, common, true),
    };
    if let Some(t) = common.threads {
        if rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global().is_err() {
            eprintln!("warning: thread pool already initialized; --threads ignored");
        }
    }
    let src = match std::fs::read_to_string(file) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", file.display());
            return 3;
        }
    };
    let caps = common.caps();
    let started = Instant::now();
    let outcome = if verify_mode {
        match job::parse_loose(&src) {
            Ok((objects, task, _)) => tasks::run_verify_subcommand(&objects, task.as_ref(), caps),
            Err(e) => {
                eprintln!("error: {e}");
                return 3;
            }
        }
    } else {
        match job::parse(&src) {
            Ok(jobfile) => tasks::run_job(&jobfile, caps),
            Err(e) => {
                eprintln!("error: {e}");
                return 3;
            }
        }
    };
    let elapsed = started.elapsed();
    match outcome {
        Ok((report, code)) => {
            if common.json {
                print!("{}", report.json());
            } else {
                print!("{}", report.text());
            }
            eprintln!("elapsed: {}ms", elapsed.as_millis());
            code
        }
        Err(e) => {
            eprintln!("error: {}", e.msg);
            e.code
        }
    }
}
