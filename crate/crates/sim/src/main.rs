use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use sixdma::config::{ExperimentConfig, Preset, SweepPoint};
use sixdma::layout::layout_entries;
use sixdma::seeds::trial_seed;
use sixdma::solve::{report, solve_scheme, write_trace};
use sixdma::trial::draw_scenario;
use sixdma::{run_sweep, selftest, SchemeId};

#[derive(Parser)]
#[command(
    name = "sixdma",
    version,
    about = "6DMA interference mitigation simulator for cellular-connected UAVs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scenario and print the result as JSON.
    Solve(SolveArgs),
    /// Run a Monte Carlo sweep and write trials.csv and summary.json.
    Sweep(SweepArgs),
    /// Print the BS layout as JSON.
    Layout(LayoutArgs),
    /// Run the property self-test.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Fig2,
    Fig3,
    Fig4,
}

impl From<PresetArg> for Preset {
    fn from(p: PresetArg) -> Self {
        match p {
            PresetArg::Fig2 => Preset::Fig2,
            PresetArg::Fig3 => Preset::Fig3,
            PresetArg::Fig4 => Preset::Fig4,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

/// Options shared by `solve` and `sweep`.
#[derive(Args)]
struct Common {
    /// JSON config file (sweep, solver and physical sections).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Start from a bundled figure preset instead of the defaults.
    #[arg(long, value_enum)]
    preset: Option<PresetArg>,
    /// Base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Optimize the FPA counterpart's rotation.
    #[arg(long, value_enum)]
    fpa_rotation: Option<Switch>,
    /// Only try the C available BSs nearest to the UAV.
    #[arg(long)]
    top_c: Option<usize>,
}

impl Common {
    fn load(&self) -> anyhow::Result<ExperimentConfig> {
        let mut cfg = match (&self.config, self.preset) {
            (Some(_), Some(_)) => bail!("--config and --preset are mutually exclusive"),
            (Some(path), None) => ExperimentConfig::load(path)?,
            (None, Some(p)) => Preset::from(p).config(),
            (None, None) => ExperimentConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.sweep.base_seed = s;
        }
        if let Some(f) = self.fpa_rotation {
            cfg.sweep.fpa_rotation = f == Switch::On;
        }
        if self.top_c.is_some() {
            cfg.solver.top_c_candidates = self.top_c;
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Trials per sweep point.
    #[arg(long)]
    trials: Option<usize>,
    /// Worker threads. Results do not depend on this.
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record per-trial wall time (makes the CSV non-reproducible).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: Common,
    /// Trial index; the scenario seed is derived from it and the base seed.
    #[arg(long, default_value_t = 0)]
    trial: u64,
    /// Number of occupied (interfering) BSs.
    #[arg(long = "j")]
    j: Option<usize>,
    /// Number of antennas.
    #[arg(long = "n")]
    n: Option<usize>,
    /// Normalized region size 2L/lambda.
    #[arg(long)]
    region: Option<f64>,
    /// Scheme, e.g. PROPOSED, S2_FIXED_ARV or S1_NEAREST_BS+FPA.
    #[arg(long, default_value = "PROPOSED")]
    scheme: SchemeId,
    /// Pin the UAV's horizontal position, as X,Y in meters.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    uav: Option<Vec<f64>>,
    /// Write every candidate's outer-iteration trace here as JSON lines.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct LayoutArgs {
    #[arg(long, default_value_t = 4)]
    tiers: u32,
    #[arg(long, default_value_t = 100.0)]
    radius: f64,
    #[arg(long, default_value_t = 30.0)]
    height: f64,
}

fn sweep(args: SweepArgs) -> anyhow::Result<()> {
    let mut cfg = args.common.load()?;
    if let Some(t) = args.trials {
        cfg.sweep.trials = t;
    }
    if let Some(w) = args.workers {
        cfg.sweep.workers = w;
    }
    if let Some(out) = args.out {
        cfg.sweep.out = out;
    }
    cfg.sweep.timing |= args.timing;
    let out = run_sweep(&cfg)?;
    let stdout = io::stdout();
    let mut w = stdout.lock();
    writeln!(w, "wrote {} rows to {}", out.records.len(), cfg.sweep.out.display())?;
    for p in &out.summary.points {
        write!(w, "{}={}:", out.summary.axis, p.axis_value)?;
        for s in &p.schemes {
            let fpa = if s.with_fpa { "+FPA" } else { "" };
            write!(w, " {}{}={:.2}dB", s.scheme, fpa, s.mean_sinr_db)?;
        }
        writeln!(w)?;
    }
    Ok(())
}

fn solve(args: SolveArgs) -> anyhow::Result<()> {
    let mut cfg = args.common.load()?;
    if let Some(uav) = &args.uav {
        cfg.physical.uav_position = Some([uav[0], uav[1]]);
    }
    let fixed = cfg.sweep.fixed;
    let point = SweepPoint {
        j: args.j.unwrap_or(fixed.j),
        n: args.n.unwrap_or(fixed.n),
        region: args.region.unwrap_or(fixed.region),
    };
    cfg.solver.validate()?;
    let phys = cfg.physical.phys_params(point.n, point.region);
    phys.validate()?;
    let layout = cfg.physical.layout()?;
    let seed = trial_seed(cfg.sweep.base_seed, args.trial);
    let scenario = draw_scenario(&cfg.physical, &layout, point, seed)?;
    let result = solve_scheme(&scenario, &cfg.solver, args.scheme, cfg.sweep.fpa_rotation)?;
    if let Some(path) = &args.trace {
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = BufWriter::new(file);
        write_trace(&mut w, &result)?;
        w.flush()?;
    }
    let stdout = io::stdout();
    let mut w = stdout.lock();
    serde_json::to_writer_pretty(&mut w, &report(seed, args.scheme, &scenario, &result))?;
    writeln!(w)?;
    Ok(())
}

fn layout(args: LayoutArgs) -> anyhow::Result<()> {
    let layout = sixdma_core::grid::build_hex_layout(args.tiers, args.radius, args.height)?;
    let stdout = io::stdout();
    let mut w = stdout.lock();
    serde_json::to_writer_pretty(&mut w, &layout_entries(&layout))?;
    writeln!(w)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Sweep(a) => sweep(a),
        Command::Layout(a) => layout(a),
        Command::Selftest { seed } => {
            let checks = selftest::run(seed);
            for c in &checks {
                println!("{}", c.line());
            }
            if checks.iter().all(|c| c.passed) {
                Ok(())
            } else {
                return ExitCode::FAILURE;
            }
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
