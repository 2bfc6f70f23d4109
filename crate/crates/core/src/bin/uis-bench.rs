use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use uis_bench::bench::{run_bench, summarize, BenchError};
use uis_bench::config::{parse_grid, parse_models, RunConfig};
use uis_bench::dist::{Family, Seed};
use uis_bench::io::{fmt_sig, read_dists, read_report, write_dists, write_report, write_summary};
use uis_bench::models::ModelKind;
use uis_bench::oracle::{standard_answer, EvidenceGrid, EvidencePair};

#[derive(Parser)]
#[command(
    name = "uis-bench",
    version,
    about = "Benchmark uncertain-inference rules against minimum cross-entropy updating"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a distribution file.
    Gen(RunArgs),
    /// Fit every model to each distribution in a file and score it.
    Bench {
        /// CSV written by `gen` (id plus eight atoms per row)
        dist_file: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Print the minimum cross-entropy P(C) for every distribution in a file.
    Oracle {
        dist_file: PathBuf,
        /// Posterior probability of E1, in [0, 1]
        #[arg(long, value_parser = probability)]
        e1: f64,
        /// Posterior probability of E2, in [0, 1]
        #[arg(long, value_parser = probability)]
        e2: f64,
    },
    /// Re-summarize an existing report file.
    Report {
        /// report.csv written by `bench`
        report_file: PathBuf,
        /// Directory for summary.json; printed only when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Number of distributions to generate [default: 109]
    #[arg(long)]
    n: Option<usize>,
    /// uniform or cond_indep [default: uniform]
    #[arg(long)]
    family: Option<Family>,
    /// Comma-separated evidence levels, e.g. .001,.25,.5,.75,.999
    #[arg(long, value_parser = grid)]
    grid: Option<EvidenceGrid>,
    /// Comma-separated, e.g. LINR,WRST,INDP,PRSP,PWR
    #[arg(long, value_parser = models)]
    models: Option<ModelList>,
    /// Output directory [default: out]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores). Results do not depend on this.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Clone)]
struct ModelList(Vec<ModelKind>);

fn probability(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is not a probability in [0, 1]"))
    }
}

fn grid(s: &str) -> Result<EvidenceGrid, String> {
    parse_grid(s).map_err(|e| e.to_string())
}

fn models(s: &str) -> Result<ModelList, String> {
    parse_models(s).map(ModelList).map_err(|e| e.to_string())
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig, String> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path).map_err(|e| e.to_string())?,
            None => RunConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = Seed(seed);
        }
        if let Some(n) = self.n {
            cfg.n_dists = n;
        }
        if let Some(family) = self.family {
            cfg.family = family;
        }
        if let Some(grid) = &self.grid {
            cfg.grid = grid.clone();
        }
        if let Some(models) = &self.models {
            cfg.models = models.0.clone();
        }
        if let Some(out) = &self.out {
            cfg.out = out.clone();
        }
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(&args),
        Command::Bench { dist_file, run } => cmd_bench(&dist_file, &run),
        Command::Oracle { dist_file, e1, e2 } => cmd_oracle(&dist_file, e1, e2),
        Command::Report { report_file, out } => cmd_report(&report_file, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>), String> {
    std::fs::create_dir_all(dir).map_err(|e| format!("creating {}: {e}", dir.display()))?;
    let path = dir.join(name);
    let file = File::create(&path).map_err(|e| format!("creating {}: {e}", path.display()))?;
    Ok((path, BufWriter::new(file)))
}

fn open(path: &Path) -> Result<BufReader<File>, String> {
    File::open(path).map(BufReader::new).map_err(|e| format!("opening {}: {e}", path.display()))
}

fn cmd_gen(args: &RunArgs) -> Result<(), String> {
    let cfg = args.resolve()?;
    let dists: Vec<_> = cfg
        .family
        .sample(cfg.seed, cfg.n_dists)
        .into_iter()
        .enumerate()
        .map(|(i, d)| (i as u64, d))
        .collect();
    let (path, mut w) = create(&cfg.out, "distributions.csv")?;
    write_dists(&mut w, &dists).map_err(|e| e.to_string())?;
    w.flush().map_err(|e| e.to_string())?;
    println!("{}", path.display());
    Ok(())
}

fn cmd_bench(dist_file: &Path, args: &RunArgs) -> Result<(), String> {
    let cfg = args.resolve()?;
    let rows = read_dists(open(dist_file)?).map_err(|e| format!("{}: {e}", dist_file.display()))?;
    let (ids, dists): (Vec<u64>, Vec<_>) = rows.into_iter().unzip();

    let pool = rayon::ThreadPoolBuilder::new().num_threads(args.jobs).build().map_err(|e| e.to_string())?;
    let reports = pool
        .install(|| run_bench(&dists, &cfg.models, &cfg.grid, &cfg.optim, cfg.seed))
        .map_err(|e| e.to_string())?;

    let mut failures = 0;
    for r in &reports {
        for m in &r.models {
            if let Err(msg) = &m.result {
                failures += 1;
                eprintln!("dist {} {}: {msg}", ids[r.dist_id], m.kind);
            }
        }
    }
    if failures > 0 {
        eprintln!("{failures} fit(s) failed");
    }

    let (report_path, mut w) = create(&cfg.out, "report.csv")?;
    write_report(&mut w, &reports, &ids).map_err(|e| e.to_string())?;
    w.flush().map_err(|e| e.to_string())?;
    println!("{}", report_path.display());

    let table = match summarize(&reports) {
        Ok(t) => t,
        Err(e @ BenchError::TooFewReports { .. }) => {
            eprintln!("summary skipped: {e}");
            return Ok(());
        }
        Err(e) => return Err(e.to_string()),
    };
    let (summary_path, mut w) = create(&cfg.out, "summary.json")?;
    write_summary(&mut w, &table).map_err(|e| e.to_string())?;
    w.flush().map_err(|e| e.to_string())?;
    println!("{}", summary_path.display());
    println!("{}", table.render());
    Ok(())
}

fn cmd_oracle(dist_file: &Path, e1: f64, e2: f64) -> Result<(), String> {
    let ev = EvidencePair::new(e1, e2).map_err(|e| e.to_string())?;
    let rows = read_dists(open(dist_file)?).map_err(|e| format!("{}: {e}", dist_file.display()))?;
    let mut failed = false;
    for (id, d) in rows {
        match standard_answer(&d, ev) {
            Ok(c) => println!("{id},{}", fmt_sig(c, 12)),
            Err(e) => {
                failed = true;
                eprintln!("dist {id}: {e}");
            }
        }
    }
    if failed {
        Err("some distributions could not be updated".into())
    } else {
        Ok(())
    }
}

fn cmd_report(report_file: &Path, out: Option<&Path>) -> Result<(), String> {
    let reports = read_report(open(report_file)?).map_err(|e| format!("{}: {e}", report_file.display()))?;
    let table = summarize(&reports).map_err(|e| e.to_string())?;
    match out {
        Some(dir) => {
            let (path, mut w) = create(dir, "summary.json")?;
            write_summary(&mut w, &table).map_err(|e| e.to_string())?;
            w.flush().map_err(|e| e.to_string())?;
            println!("{}", path.display());
        }
        None => write_summary(std::io::stdout().lock(), &table).map_err(|e| e.to_string())?,
    }
    println!("{}", table.render());
    Ok(())
}
