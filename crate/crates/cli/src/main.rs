//! `dualhead`: plan, execute and analyse unicycle feedback motion plans.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};

use dualhead_core::executor::{execute, ExecParams};
use dualhead_core::export::{path_csv, render_svg, trajectory_csv, GraphDump, SvgLayers};
use dualhead_core::metrics::{distance, DistanceKind, DEFAULT_KAPPA};
use dualhead_core::planner::plan;
use dualhead_core::sweep::{sweep_turning, turning_correlations, SweepConfig};
use dualhead_core::{load_scenario, ControlParams, Informed, Objective, Pose, Problem};

#[derive(Parser)]
#[command(
    name = "dualhead",
    version,
    about = "Unicycle feedback motion planning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a motion graph and write graph.json, path.csv and plan.svg.
    Plan {
        scenario: PathBuf,
        #[command(flatten)]
        flags: PlanFlags,
    },
    /// Execute a planned graph and write trajectory.csv and execute.svg.
    Execute {
        scenario: PathBuf,
        /// Graph dump written by `plan`.
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        flags: PlanFlags,
    },
    /// Simulate total turning over a grid of start and goal headings.
    SweepTurning {
        #[arg(long, default_value_t = 64)]
        resolution: usize,
        #[arg(long, default_value_t = -std::f64::consts::PI, allow_negative_numbers = true)]
        theta_min: f64,
        #[arg(long, default_value_t = std::f64::consts::PI, allow_negative_numbers = true)]
        theta_max: f64,
        #[arg(long, default_value_t = -std::f64::consts::PI, allow_negative_numbers = true)]
        goal_theta_min: f64,
        #[arg(long, default_value_t = std::f64::consts::PI, allow_negative_numbers = true)]
        goal_theta_max: f64,
        /// Integration step in seconds.
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long, default_value_t = DEFAULT_KAPPA)]
        kappa: f64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Print every pose distance between two poses given as `x,y,theta`.
    Distances {
        #[arg(allow_hyphen_values = true, value_parser = parse_pose)]
        from: Pose,
        #[arg(allow_hyphen_values = true, value_parser = parse_pose)]
        to: Pose,
        #[arg(long, default_value_t = DEFAULT_KAPPA)]
        kappa: f64,
    },
}

/// Overrides applied on top of the scenario file.
#[derive(Args, Default)]
struct PlanFlags {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, value_parser = clap::value_parser!(ObjectiveArg))]
    objective: Option<ObjectiveArg>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, value_parser = clap::value_parser!(InformedArg))]
    informed: Option<InformedArg>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ObjectiveArg {
    Euclidean,
    Euccos,
    Dualhead,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum InformedArg {
    Off,
    Zero,
    Euclidean,
}

fn parse_pose(s: &str) -> Result<Pose, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let [x, y, theta] = parts.as_slice() else {
        return Err(format!("expected x,y,theta, got `{s}`"));
    };
    let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
    Ok(Pose::new(num(x)?, num(y)?, num(theta)?))
}

/// Failure modes mapped to exit codes.
enum Failure {
    Input(anyhow::Error),
    NoSolution(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

fn load(path: &Path, flags: &PlanFlags) -> Result<Problem> {
    let mut problem = load_scenario(path)?;
    let p = &mut problem.planner;
    if let Some(v) = flags.seed {
        p.seed = v;
    }
    if let Some(v) = flags.samples {
        p.samples = v;
    }
    if let Some(v) = flags.objective {
        p.objective = match v {
            ObjectiveArg::Euclidean => Objective::Euclidean,
            ObjectiveArg::Euccos => Objective::Euccos,
            ObjectiveArg::Dualhead => Objective::Dualhead,
        };
    }
    if let Some(v) = flags.alpha {
        p.alpha = v;
    }
    if let Some(v) = flags.beta {
        p.beta = v;
    }
    if let Some(v) = flags.informed {
        p.informed = match v {
            InformedArg::Off => Informed::Off,
            InformedArg::Zero => Informed::Zero,
            InformedArg::Euclidean => Informed::Euclidean,
        };
    }
    Ok(problem.revalidate()?)
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn cmd_plan(scenario: &Path, flags: &PlanFlags) -> Result<(), Failure> {
    let problem = load(scenario, flags)?;
    let result = plan(&problem);
    let graph = &result.graph;
    let dump = GraphDump::new(graph, &problem, problem.planner.seed);
    write(&flags.out, "graph.json", &dump.to_json())?;
    write(&flags.out, "path.csv", &path_csv(graph))?;
    let svg = render_svg(
        &problem.world,
        &SvgLayers {
            graph: Some(graph),
            hulls: Some(&problem.control),
            start: Some(problem.start),
            goal: Some(problem.goal),
            ..SvgLayers::default()
        },
    );
    write(&flags.out, "plan.svg", &svg)?;
    println!("vertices: {}", graph.len());
    match graph.goal_index() {
        Some(_) => {
            println!("goal cost: {}", graph.goal_cost());
            println!("path vertices: {}", graph.best_path().len());
            Ok(())
        }
        None => Err(Failure::NoSolution("goal not connected".into())),
    }
}

fn cmd_execute(scenario: &Path, graph_path: &Path, flags: &PlanFlags) -> Result<(), Failure> {
    let problem = load(scenario, flags)?;
    let text = fs::read_to_string(graph_path)
        .with_context(|| format!("cannot read {}", graph_path.display()))?;
    let dump = GraphDump::from_json(&text).map_err(|e| anyhow!(e))?;
    let graph = dump.to_graph().map_err(|e| anyhow!(e))?;
    let wd = problem.planner.cost_distance().map_err(|e| anyhow!(e))?;
    let run = match execute(
        &graph,
        &problem.start,
        &problem.world,
        &problem.control,
        &wd,
        &ExecParams::default(),
    ) {
        Ok(run) => run,
        Err(e) => return Err(Failure::NoSolution(e.to_string())),
    };
    let vertices: Vec<usize> = (0..run.trajectory.samples.len())
        .map(|i| run.sample_vertex(i))
        .collect();
    write(
        &flags.out,
        "trajectory.csv",
        &trajectory_csv(&run.trajectory, Some(&vertices)),
    )?;
    let svg = render_svg(
        &problem.world,
        &SvgLayers {
            graph: Some(&graph),
            trajectory: Some(&run.trajectory),
            start: Some(problem.start),
            goal: Some(problem.goal),
            ..SvgLayers::default()
        },
    );
    write(&flags.out, "execute.svg", &svg)?;
    println!("path length: {}", run.trajectory.path_length);
    println!("total turning: {}", run.trajectory.turning);
    println!("segments: {}", run.segments.len());
    Ok(())
}

fn cmd_sweep(
    resolution: usize,
    theta: (f64, f64),
    goal_theta: (f64, f64),
    step: f64,
    kappa: f64,
    out: &Path,
) -> Result<(), Failure> {
    if resolution == 0 {
        return Err(anyhow!("resolution must be positive").into());
    }
    let control = ControlParams {
        step,
        ..ControlParams::default()
    };
    control.validate().map_err(|e| anyhow!(e))?;
    DistanceKind::DualheadOrient { kappa }
        .validate()
        .map_err(|e| anyhow!(e))?;
    let config = SweepConfig {
        resolution,
        theta_range: theta,
        goal_theta_range: goal_theta,
        kappa,
    };
    let cells = sweep_turning(&config, &control);
    let mut csv = String::from(
        "row,col,theta,goal_theta,motion,turning,path_length,converged,dualhead_orient,cosine\n",
    );
    let g = |x: f64| dualhead_core::export::format_g(x, 12);
    for c in &cells {
        let (motion, turning, length, conv) = match c.result {
            Some(r) => (
                match r.motion {
                    dualhead_core::Motion::Forward => "forward",
                    dualhead_core::Motion::Backward => "backward",
                },
                g(r.turning),
                g(r.path_length),
                r.converged.to_string(),
            ),
            None => ("", String::new(), String::new(), String::new()),
        };
        csv.push_str(&format!(
            "{},{},{},{},{motion},{turning},{length},{conv},{},{}\n",
            c.row,
            c.col,
            g(c.theta),
            g(c.goal_theta),
            g(c.dualhead_orient),
            g(c.cosine)
        ));
    }
    write(out, "sweep.csv", &csv)?;
    let (dual, cos) = turning_correlations(&cells);
    println!("spearman dualhead_orient vs turning: {dual}");
    println!("spearman cosine vs turning: {cos}");
    Ok(())
}

fn cmd_distances(from: &Pose, to: &Pose, kappa: f64) -> Result<(), Failure> {
    let kinds = [
        DistanceKind::Euclidean,
        DistanceKind::Cosine,
        DistanceKind::Euccos,
        DistanceKind::DualheadTrans { kappa },
        DistanceKind::DualheadOrient { kappa },
        DistanceKind::Headtail { kappa },
        DistanceKind::Geodesic,
    ];
    for k in kinds {
        k.validate().map_err(|e| anyhow!(e))?;
        println!("{:<16} {}", k.name(), distance(k, from, to));
    }
    Ok(())
}

fn main() -> ExitCode {
    // usage errors are input errors (exit 1), not clap's default 2
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Plan { scenario, flags } => cmd_plan(scenario, flags),
        Command::Execute {
            scenario,
            graph,
            flags,
        } => cmd_execute(scenario, graph, flags),
        Command::SweepTurning {
            resolution,
            theta_min,
            theta_max,
            goal_theta_min,
            goal_theta_max,
            step,
            kappa,
            out,
        } => cmd_sweep(
            *resolution,
            (*theta_min, *theta_max),
            (*goal_theta_min, *goal_theta_max),
            *step,
            *kappa,
            out,
        ),
        Command::Distances { from, to, kappa } => cmd_distances(from, to, *kappa),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::NoSolution(msg)) => {
            eprintln!("no solution: {msg}");
            ExitCode::from(2)
        }
    }
}
