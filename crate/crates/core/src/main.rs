use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use pdrs::anneal::{anneal_all, SaConfig};
use pdrs::graph::generate;
use pdrs::ilp::{build_model, export_lp, postopt};
use pdrs::pst::SolutionFile;
use pdrs::report::{compute_rrt, prepare, render_svg, run_pipeline, PipelineConfig};
use pdrs::shapes::{format_shape_lists, parse_shape_lists};
use pdrs::{BenchSpec, ChipModel, CostWeights, Error, ShapeGenConfig, ShapeList, Solution, TaskGraph};

#[derive(Parser)]
#[command(name = "pdrs", version, about = "Partition, schedule and floorplan task modules on a partially reconfigurable FPGA")]
struct Cli {
    /// Chip description file, or `builtin:xc7vx485t`.
    #[arg(long, global = true, default_value = "builtin:xc7vx485t")]
    chip: String,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Independent runs for `run`.
    #[arg(long, global = true, default_value_t = 10)]
    runs: usize,
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct ShapeArgs {
    /// Precomputed shape lists; generated from the chip when omitted.
    #[arg(long)]
    shapes: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, default_value_t = 1.5)]
    gamma_ar: f64,
    /// Configuration time per tile of the minimum-area shape, for modules
    /// without an explicit `conf=`.
    #[arg(long, default_value_t = 0.001)]
    conf_rate: f64,
}

#[derive(Args, Clone)]
struct WeightArgs {
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma_comm: f64,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
}

impl WeightArgs {
    fn weights(&self) -> CostWeights {
        CostWeights::only(self.alpha, self.beta, self.gamma_comm, self.lambda)
    }
}

#[derive(Args, Clone)]
struct SaArgs {
    #[arg(long, default_value_t = 1)]
    restarts: usize,
    /// Wall-clock limit per annealing run, in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long, default_value_t = 0.95)]
    cooling_rate: f64,
    #[arg(long)]
    iterations_per_temperature: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a random task graph from a benchmark preset.
    GenBench {
        /// t10-1 ... t200-3
        #[arg(long, default_value = "t10-1")]
        preset: String,
        #[arg(long, default_value_t = 0.001)]
        conf_rate: f64,
        /// Output file; defaults to `<out-dir>/<preset>.graph`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the candidate shape lists of every module.
    Shapes {
        graph: PathBuf,
        #[command(flatten)]
        shape: ShapeArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulated-annealing exploration; writes solution.txt and trace.csv.
    Explore {
        graph: PathBuf,
        #[command(flatten)]
        shape: ShapeArgs,
        #[command(flatten)]
        weights: WeightArgs,
        #[command(flatten)]
        sa: SaArgs,
    },
    /// Shape reselection on an existing solution.
    Postopt {
        graph: PathBuf,
        solution: PathBuf,
        #[command(flatten)]
        shape: ShapeArgs,
        #[command(flatten)]
        weights: WeightArgs,
        /// Solver limit in seconds.
        #[arg(long, default_value_t = 60.0)]
        time_limit: f64,
        #[arg(long)]
        export_lp: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repeated exploration and repair with a batch report.
    Run {
        graph: PathBuf,
        #[command(flatten)]
        shape: ShapeArgs,
        #[command(flatten)]
        weights: WeightArgs,
        #[command(flatten)]
        sa: SaArgs,
        #[arg(long, default_value_t = 60.0)]
        postopt_time_limit: f64,
        /// Also draw every final floorplan.
        #[arg(long)]
        render: bool,
    },
    /// Draw one SVG per time layer plus a region overview.
    Render {
        graph: PathBuf,
        solution: PathBuf,
        #[command(flatten)]
        shape: ShapeArgs,
        #[command(flatten)]
        weights: WeightArgs,
    },
    /// Print the cost breakdown and resource reuse of a solution.
    Metrics {
        graph: PathBuf,
        solution: PathBuf,
        #[command(flatten)]
        shape: ShapeArgs,
        #[command(flatten)]
        weights: WeightArgs,
    },
}

enum Failure {
    Input(Error),
    Infeasible,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

fn read(path: &Path) -> pdrs::Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> pdrs::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load_chip(spec: &str) -> pdrs::Result<ChipModel> {
    match spec {
        "builtin:xc7vx485t" => Ok(ChipModel::builtin_xc7vx485t()),
        path => ChipModel::parse(&read(Path::new(path))?),
    }
}

fn load(graph: &Path, chip: &ChipModel, a: &ShapeArgs) -> pdrs::Result<(TaskGraph, Vec<ShapeList>)> {
    let mut g = TaskGraph::parse(&read(graph)?)?;
    let cfg = ShapeGenConfig { n: a.n, gamma_ar: a.gamma_ar, ..Default::default() };
    cfg.validate()?;
    let generated = prepare(&mut g, chip, &cfg, a.conf_rate)?;
    let lists = match &a.shapes {
        Some(p) => parse_shape_lists(&read(p)?, &g)?,
        None => generated,
    };
    Ok((g, lists))
}

fn load_solution(path: &Path, g: &TaskGraph, chip: &ChipModel, w: &CostWeights) -> pdrs::Result<Solution> {
    SolutionFile::parse(&read(path)?, g)?.evaluate(g, chip, w)
}

fn sa_config(seed: u64, w: &WeightArgs, sa: &SaArgs) -> SaConfig {
    SaConfig {
        seed,
        weights: w.weights(),
        restarts: sa.restarts,
        time_limit: sa.time_limit.map(Duration::from_secs_f64),
        cooling_rate: sa.cooling_rate,
        iterations_per_temperature: sa.iterations_per_temperature,
        ..Default::default()
    }
}

fn print_metrics(sol: &Solution, chip: &ChipModel) {
    let c = &sol.eval.cost;
    println!("feasible   {}", c.feasible);
    println!("makespan   {}", c.makespan);
    println!("extent     {}x{} (chip {}x{})", c.x_max, c.y_max, chip.width, chip.height);
    println!("cost       {:.6} (area {:.6}, schedule {:.6}, comm {:.6}, hetero {:.6})", c.total, c.area, c.schedule, c.comm, c.hetero);
    println!("comm_raw   {}", c.comm_raw);
    match compute_rrt(sol, chip) {
        Ok(r) => println!("rrt        clb {:.4} bram {:.4} dsp {:.4}", r.clb, r.bram, r.dsp),
        Err(e) => println!("rrt        {e}"),
    }
}

fn feasible_or_fail(ok: bool) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(Failure::Infeasible)
    }
}

fn run(cli: Cli) -> Outcome {
    let chip = load_chip(&cli.chip)?;
    let out = &cli.out_dir;
    match &cli.cmd {
        Cmd::GenBench { preset, conf_rate, out: file } => {
            let spec = BenchSpec::preset(preset, cli.seed)?;
            let mut g = generate(&spec)?;
            prepare(&mut g, &chip, &ShapeGenConfig::default(), *conf_rate)?;
            let path = file.clone().unwrap_or_else(|| out.join(format!("{preset}.graph")));
            write(&path, &g.to_text())?;
            println!("{}", path.display());
            Ok(())
        }
        Cmd::Shapes { graph, shape, out: file } => {
            let (g, lists) = load(graph, &chip, shape)?;
            let text = format_shape_lists(&g, &lists);
            match file {
                Some(p) => write(p, &text)?,
                None => print!("{text}"),
            }
            Ok(())
        }
        Cmd::Explore { graph, shape, weights, sa } => {
            let (g, lists) = load(graph, &chip, shape)?;
            let cfg = sa_config(cli.seed, weights, sa);
            let runs = anneal_all(&g, &lists, &chip, &cfg)?;
            let best = &runs[0];
            write(&out.join("solution.txt"), &best.best.to_text(&g))?;
            let mut trace = String::from("iteration,temperature,current,best\n");
            for t in &best.trace {
                trace += &format!("{},{},{},{}\n", t.iteration, t.temperature, t.current, t.best);
            }
            write(&out.join("trace.csv"), &trace)?;
            println!(
                "seed {} iterations {} accepted {} time {:.2}s",
                best.seed,
                best.iterations,
                best.accepted,
                best.elapsed.as_secs_f64()
            );
            print_metrics(&best.best, &chip);
            feasible_or_fail(best.best.feasible())
        }
        Cmd::Postopt { graph, solution, shape, weights, time_limit, export_lp: lp, out: file } => {
            let (g, lists) = load(graph, &chip, shape)?;
            let w = weights.weights();
            let sol = load_solution(solution, &g, &chip, &w)?;
            if let Some(p) = lp {
                write(p, &export_lp(&build_model(&sol.pst, &lists, &g, &chip)?))?;
            }
            let res = postopt(&sol, &lists, &g, &chip, &w, Some(Duration::from_secs_f64(*time_limit)))?;
            let path = file.clone().unwrap_or_else(|| out.join("solution_postopt.txt"));
            write(&path, &res.solution.to_text(&g))?;
            println!("{}", res.result.status_line());
            feasible_or_fail(res.solution.feasible())
        }
        Cmd::Run { graph, shape, weights, sa, postopt_time_limit, render } => {
            let (g, lists) = load(graph, &chip, shape)?;
            let cfg = PipelineConfig {
                runs: cli.runs,
                seed: cli.seed,
                sa: sa_config(cli.seed, weights, sa),
                postopt_time_limit: Some(Duration::from_secs_f64(*postopt_time_limit)),
            };
            let rep = run_pipeline(&g, &lists, &chip, &cfg)?;
            write(&out.join("runs.csv"), &rep.to_csv())?;
            write(&out.join("summary.txt"), &rep.summary())?;
            for r in &rep.records {
                if let Some(s) = &r.solution {
                    write(&out.join(format!("solutions/seed_{}.txt", r.seed)), &s.to_text(&g))?;
                    if *render {
                        for (name, svg) in render_svg(s, &g, &chip) {
                            write(&out.join(format!("render/seed_{}/{name}", r.seed)), &svg)?;
                        }
                    }
                }
            }
            print!("{}", rep.summary());
            feasible_or_fail(rep.success_after > 0.0)
        }
        Cmd::Render { graph, solution, shape, weights } => {
            let (g, _) = load(graph, &chip, shape)?;
            let sol = load_solution(solution, &g, &chip, &weights.weights())?;
            for (name, svg) in render_svg(&sol, &g, &chip) {
                let p = out.join(name);
                write(&p, &svg)?;
                println!("{}", p.display());
            }
            Ok(())
        }
        Cmd::Metrics { graph, solution, shape, weights } => {
            let (g, _) = load(graph, &chip, shape)?;
            let sol = load_solution(solution, &g, &chip, &weights.weights())?;
            print_metrics(&sol, &chip);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Infeasible) => ExitCode::from(1),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
