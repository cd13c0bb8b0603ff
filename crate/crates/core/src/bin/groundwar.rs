use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use groundwar::engine::{trace::write_trace, World};
use groundwar::experiments::{
    accuracy_sweep, play_game, round_robin, run_map, write_marks, write_records, write_sweep_grid, write_sweep_marginal,
    write_win_rates, ExperimentConfig, Planner, SweepConfig, SweepMode, SweepResult, TournamentConfig,
};
use groundwar::selftest;
use groundwar::tuner::{tune_heuristic, write_eval_log, HeuristicTuneConfig};

#[derive(Parser, Debug)]
#[command(name = "groundwar", version, about = "Ground War experiments: games, tournaments, accuracy sweeps and tuning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Experiment config (JSON); built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Play one logged game.
    Play {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        blue: Option<String>,
        #[arg(long)]
        red: Option<String>,
        /// Index of the seeded random map.
        #[arg(long, default_value_t = 0)]
        map: usize,
    },
    /// Round-robin win-rate table with significance marks.
    Tournament {
        #[command(flatten)]
        common: Common,
        /// Maps per pair; each is played from both sides.
        #[arg(long)]
        maps: Option<usize>,
        /// Comma-separated roster.
        #[arg(long, value_delimiter = ',')]
        agents: Option<Vec<String>>,
    },
    /// Offence x defence accuracy sweep.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Fixed heuristic: the opponent in model mode, the planner's model in opponent mode.
        #[arg(long)]
        fixed: Option<String>,
        #[arg(long, value_enum)]
        algo: Option<AlgoArg>,
        /// Games per cell.
        #[arg(long)]
        games: Option<usize>,
        /// Baseline games in model mode.
        #[arg(long)]
        baseline_games: Option<usize>,
        /// Override the RHEA plan length.
        #[arg(long)]
        plan_length: Option<usize>,
    },
    /// NTBEA tuning of a heuristic against a target agent.
    Tune {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        target: Option<String>,
        #[arg(long)]
        budget: Option<usize>,
        /// Games per evaluation.
        #[arg(long)]
        games: Option<usize>,
    },
    /// Run the invariant checks.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Model,
    Opponent,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AlgoArg {
    #[value(name = "RHEA", alias = "rhea")]
    Rhea,
    #[value(name = "MCTS", alias = "mcts")]
    Mcts,
}

enum Failure {
    Usage(String),
    Run(String),
    Interrupted,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Run(e.to_string())
    }
}

struct Run {
    config: ExperimentConfig,
    out: PathBuf,
    files: Vec<String>,
}

impl Run {
    fn new(common: &Common) -> Result<Run, Failure> {
        let mut config = match &common.config {
            Some(path) => ExperimentConfig::load(path).map_err(|e| Failure::Usage(e.to_string()))?,
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = common.seed {
            config.seed = seed;
        }
        if let Some(w) = common.workers {
            config.workers = w;
        }
        if let Some(out) = &common.out {
            config.out_dir = out.clone();
        }
        let out = config.out_dir.clone();
        fs::create_dir_all(&out).map_err(|e| Failure::Run(format!("{}: {e}", out.display())))?;
        Ok(Run { config, out, files: Vec::new() })
    }

    fn create(&mut self, name: &str) -> Result<BufWriter<File>, Failure> {
        let path = self.out.join(name);
        let file = File::create(&path).map_err(|e| Failure::Run(format!("{}: {e}", path.display())))?;
        self.files.push(name.to_string());
        Ok(BufWriter::new(file))
    }

    fn manifest(&mut self, command: &str, extra: serde_json::Value, complete: bool) -> Result<(), Failure> {
        let argv: Vec<String> = std::env::args().skip(1).collect();
        let doc = json!({
            "command": command,
            "argv": argv,
            "version": env!("CARGO_PKG_VERSION"),
            "complete": complete,
            "config": self.config,
            "run": extra,
            "outputs": self.files,
        });
        let mut w = self.create("manifest.json")?;
        serde_json::to_writer_pretty(&mut w, &doc)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }
}

fn play(common: &Common, blue: Option<String>, red: Option<String>, map: usize) -> Result<(), Failure> {
    let mut run = Run::new(common)?;
    let c = &run.config;
    let blue_name = blue.unwrap_or_else(|| c.play.blue.clone());
    let red_name = red.unwrap_or_else(|| c.play.red.clone());
    let blue = c.agent(&blue_name).map_err(|e| Failure::Usage(e.to_string()))?;
    let red = c.agent(&red_name).map_err(|e| Failure::Usage(e.to_string()))?;
    let world = World::new(run_map(c.seed, map), c.engine)?;
    let mut log = Vec::new();
    let record = play_game(&world, map, &blue, &red, &c.search, c.seed, Some(&mut log))?;
    let mut w = run.create("map.json")?;
    writeln!(w, "{}", world.map().to_json())?;
    w.flush()?;
    let mut w = run.create("trace.csv")?;
    write_trace(&mut w, &log)?;
    w.flush()?;
    let mut w = run.create("games.csv")?;
    write_records(std::slice::from_ref(&record), &mut w)?;
    w.flush()?;
    run.manifest("play", json!({ "blue": blue.to_string(), "red": red.to_string(), "map": map }), true)?;
    println!(
        "{} (Blue) vs {} (Red) on map {map}: {:?}, Blue score {}, {} ticks",
        record.blue_agent, record.red_agent, record.winner, record.final_score_blue, record.ticks_played
    );
    Ok(())
}

fn tournament(common: &Common, maps: Option<usize>, agents: Option<Vec<String>>, cancel: &AtomicBool) -> Result<(), Failure> {
    let mut run = Run::new(common)?;
    let c = &run.config;
    let names = agents.unwrap_or_else(|| c.tournament.agents.clone());
    let specs = c.agents(&names).map_err(|e| Failure::Usage(e.to_string()))?;
    let maps = maps.unwrap_or(c.tournament.maps);
    if maps == 0 {
        return Err(Failure::Usage("--maps must be at least 1".into()));
    }
    let alpha = c.tournament.alpha;
    let config = TournamentConfig { agents: specs, maps, seed: c.seed, params: c.engine, settings: c.search.clone() };
    let result = round_robin(&config, c.workers, Some(cancel)).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut w = run.create("win_rates.csv")?;
    write_win_rates(&result.table, &mut w)?;
    w.flush()?;
    let mut w = run.create("marks.csv")?;
    write_marks(&result.table, alpha, &mut w)?;
    w.flush()?;
    let mut w = run.create("games.csv")?;
    write_records(&result.records, &mut w)?;
    w.flush()?;
    run.manifest("tournament", json!({ "agents": names, "maps": maps, "games": result.records.len() }), result.complete)?;
    let mut stdout = io::stdout().lock();
    write_win_rates(&result.table, &mut stdout)?;
    if result.complete {
        Ok(())
    } else {
        Err(Failure::Interrupted)
    }
}

fn write_sweep(run: &mut Run, result: &SweepResult) -> Result<(), Failure> {
    let mut w = run.create("sweep_grid.csv")?;
    write_sweep_grid(result, &mut w)?;
    w.flush()?;
    let mut w = run.create("sweep_marginal.csv")?;
    write_sweep_marginal(result, &mut w)?;
    w.flush()?;
    if result.mode == SweepMode::Opponent {
        let baseline = SweepResult { cells: result.baseline.clone(), ..result.clone() };
        let mut w = run.create("sweep_baseline_grid.csv")?;
        write_sweep_grid(&baseline, &mut w)?;
        w.flush()?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn sweep(
    common: &Common,
    mode: Option<ModeArg>,
    fixed: Option<String>,
    algo: Option<AlgoArg>,
    games: Option<usize>,
    baseline_games: Option<usize>,
    plan_length: Option<usize>,
    cancel: &AtomicBool,
) -> Result<(), Failure> {
    let mut run = Run::new(common)?;
    if let Some(l) = plan_length {
        run.config.search.rhea.plan_length = l;
        run.config.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let c = &run.config;
    let s = &c.sweep;
    let mode = match mode {
        Some(ModeArg::Model) => SweepMode::Model,
        Some(ModeArg::Opponent) => SweepMode::Opponent,
        None => s.mode,
    };
    let planner = match algo {
        Some(AlgoArg::Rhea) => Planner::Rhea,
        Some(AlgoArg::Mcts) => Planner::Mcts,
        None => s.planner,
    };
    let fixed_name = fixed.unwrap_or_else(|| s.fixed.clone());
    let fixed = c.heuristic(&fixed_name).map_err(|e| Failure::Usage(e.to_string()))?;
    let games = games.unwrap_or(s.games_per_cell);
    let mut config = SweepConfig::new(mode, planner, fixed, games, c.seed);
    config.baseline_games = baseline_games.or(s.baseline_games).unwrap_or(games * 10);
    config.params = c.engine;
    config.settings = c.search.clone();
    let result = accuracy_sweep(&config, c.workers, Some(cancel))?;
    write_sweep(&mut run, &result)?;
    let extra = json!({
        "mode": mode,
        "planner": planner,
        "fixed": fixed_name,
        "gamesPerCell": games,
        "baselineGames": config.baseline_games,
    });
    run.manifest("sweep", extra, result.complete)?;
    let mut stdout = io::stdout().lock();
    write_sweep_marginal(&result, &mut stdout)?;
    if result.complete {
        Ok(())
    } else {
        Err(Failure::Interrupted)
    }
}

fn tune(common: &Common, target: Option<String>, budget: Option<usize>, games: Option<usize>, cancel: &AtomicBool) -> Result<(), Failure> {
    let mut run = Run::new(common)?;
    let c = &run.config;
    let target_name = target.unwrap_or_else(|| c.tune.target.clone());
    let target = c.agent(&target_name).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut ntbea = c.tune.ntbea.clone();
    if let Some(b) = budget {
        ntbea.budget = b;
    }
    if ntbea.budget == 0 {
        return Err(Failure::Usage("--budget must be at least 1".into()));
    }
    let config = HeuristicTuneConfig {
        target,
        games_per_evaluation: games.unwrap_or(c.tune.games_per_evaluation),
        ntbea,
        seed: c.seed,
        params: c.engine,
        settings: c.search.clone(),
    };
    let tuning = tune_heuristic(&config, c.workers, Some(cancel))?;
    let mut w = run.create("tune_log.csv")?;
    write_eval_log(&tuning.space, &tuning.result.log, &mut w)?;
    w.flush()?;
    let best = json!({
        "agent": tuning.best.to_string(),
        "offence": tuning.best.offence,
        "defence": tuning.best.defence,
        "actions": tuning.best.action_string(),
        "meanFitness": tuning.result.best_stats.mean(),
        "evaluations": tuning.result.best_stats.count,
    });
    let mut w = run.create("tune_best.json")?;
    serde_json::to_writer_pretty(&mut w, &best)?;
    writeln!(w)?;
    w.flush()?;
    let extra = json!({ "target": target_name, "budget": config.ntbea.budget, "gamesPerEvaluation": config.games_per_evaluation });
    run.manifest("tune", extra, tuning.complete)?;
    println!("best {} (mean fitness {:.3} over {} evaluations)", tuning.best, tuning.result.best_stats.mean(), tuning.result.best_stats.count);
    if tuning.complete {
        Ok(())
    } else {
        Err(Failure::Interrupted)
    }
}

fn run_selftest(seed: u64) -> Result<(), Failure> {
    let checks = selftest::run(seed);
    let mut failed = 0;
    for c in &checks {
        match &c.failure {
            None => println!("PASS {}", c.name),
            Some(why) => {
                failed += 1;
                println!("FAIL {}: {why}", c.name);
            }
        }
    }
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Run(format!("{failed} of {} checks failed", checks.len())))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cancel = Arc::new(AtomicBool::new(false));
    {
        let cancel = Arc::clone(&cancel);
        let _ = ctrlc::set_handler(move || {
            if cancel.swap(true, Ordering::SeqCst) {
                std::process::exit(130);
            }
            eprintln!("interrupted: finishing running games and writing partial results");
        });
    }
    let outcome = match cli.command {
        Command::Play { common, blue, red, map } => play(&common, blue, red, map),
        Command::Tournament { common, maps, agents } => tournament(&common, maps, agents, &cancel),
        Command::Sweep { common, mode, fixed, algo, games, baseline_games, plan_length } => {
            sweep(&common, mode, fixed, algo, games, baseline_games, plan_length, &cancel)
        }
        Command::Tune { common, target, budget, games } => tune(&common, target, budget, games, &cancel),
        Command::Selftest { seed } => run_selftest(seed),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run `groundwar --help` for usage");
            ExitCode::from(2)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
        Err(Failure::Interrupted) => {
            eprintln!("interrupted: partial results written");
            ExitCode::from(130)
        }
    }
}
