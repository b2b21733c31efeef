use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gausscq_harness::presets::{preset, stability_range, TABLE_NAMES};
use gausscq_harness::{
    parse_configs, run_batch, write_outcomes, ExperimentConfig, Outcome, Overrides, RunContext,
};

#[derive(Parser)]
#[command(
    name = "cq-harness",
    version,
    about = "Convergence experiments for Runge-Kutta convolution quadrature"
)]
struct Cli {
    /// Output directory for CSV/JSON files and index.json.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Panel count for boundary-element experiments.
    #[arg(long, global = true)]
    panels: Option<usize>,
    /// Reference step count.
    #[arg(long, global = true)]
    nref: Option<usize>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for weight sets and reference traces.
    #[arg(long, global = true)]
    weights_cache: Option<PathBuf>,
    /// Directory for assembled boundary-element matrices.
    #[arg(long, global = true)]
    matrix_cache: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Runs the experiments of a JSON config (one object or an array).
    Run {
        config: PathBuf,
    },
    Table1,
    Table2,
    Table3,
    Table4,
    Table5,
    /// Root, constant and cancellation report for a range of stage counts.
    StabilityReport {
        #[arg(long, default_value_t = 1)]
        m_min: usize,
        #[arg(long, default_value_t = 6)]
        m_max: usize,
    },
}

fn load(cli: &Cli) -> Result<(String, Vec<ExperimentConfig>), String> {
    let table = |k: usize| {
        (
            TABLE_NAMES[k].to_string(),
            preset(TABLE_NAMES[k]).expect("known preset"),
        )
    };
    Ok(match &cli.command {
        Command::Run { config } => {
            let text = std::fs::read_to_string(config)
                .map_err(|e| format!("{}: {e}", config.display()))?;
            let configs = parse_configs(&text).map_err(|e| e.to_string())?;
            let stem = config
                .file_stem()
                .map_or("run".into(), |s| s.to_string_lossy().into_owned());
            (stem, configs)
        }
        Command::Table1 => table(0),
        Command::Table2 => table(1),
        Command::Table3 => table(2),
        Command::Table4 => table(3),
        Command::Table5 => table(4),
        Command::StabilityReport { m_min, m_max } => {
            ("stability".into(), vec![stability_range(*m_min, *m_max)])
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    let (table, configs) = match load(&cli) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    let overrides = Overrides {
        n_ref: cli.nref,
        n_panels: cli.panels,
    };
    let configs: Vec<ExperimentConfig> = configs
        .into_iter()
        .map(|c| c.with_overrides(&overrides))
        .collect();
    let mut ctx = RunContext::new();
    if let Some(dir) = &cli.weights_cache {
        ctx = ctx.with_weights_cache(dir);
    }
    if let Some(dir) = &cli.matrix_cache {
        ctx = ctx.with_matrix_cache(dir);
    }
    let result = run_batch(&configs, &ctx).and_then(|outcomes| {
        let paths = write_outcomes(&cli.out, &table, &configs, &outcomes)?;
        Ok((outcomes, paths))
    });
    match result {
        Ok((outcomes, paths)) => {
            for (outcome, path) in outcomes.iter().zip(paths) {
                println!("{}", path.display());
                if let Outcome::Convergence(r) = outcome {
                    for row in &r.rows {
                        let eoc = row.eoc.map_or(String::new(), |e| format!("{e:.2}"));
                        println!("  {:>5}  {:.3e}  {eoc}", row.n_t, row.error);
                    }
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
