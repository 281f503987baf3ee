//! `beltsort` command-line front end.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use beltsort::bench::{
    compare, export_csv, max_belt_speed, preset_patterns, realize, speed_gain_percent, ControllerSpec, SpeedSearch,
};
use beltsort::bridge::{serve_stdio, BridgeServer, PatternCatalog, PolicyClient};
use beltsort::patterns::{generate, load_pattern, save_pattern, DEFAULT_REGION_LENGTH};
use beltsort::strategy::{
    evaluate_on, grasp_over, greedy_gt, mixed_specs, sample_patterns, GraspParams, LabeledPattern,
};
use beltsort::{run_episode, Controller, Pattern, PatternSpec, StrategyCombo, WorldConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "beltsort", version, about = "Multi-robot conveyor-belt sorting simulator")]
struct Cli {
    #[command(flatten)]
    world: WorldArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct WorldArgs {
    /// JSON world configuration; missing fields take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Number of robots in the default station (ignored with --config).
    #[arg(long, global = true)]
    robots: Option<usize>,
    /// Belt speed in m/s, overriding the configuration.
    #[arg(long, global = true)]
    belt_speed: Option<f64>,
}

impl WorldArgs {
    fn load(&self) -> Result<WorldConfig> {
        let mut cfg = match (&self.config, self.robots) {
            (Some(path), _) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            (None, Some(n)) => WorldConfig::with_robots(n),
            (None, None) => WorldConfig::default(),
        };
        if let Some(v) = self.belt_speed {
            cfg.belt_speed = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Pattern generation.
    #[command(subcommand)]
    Pattern(PatternCmd),
    /// Rule-combo evaluation and search.
    #[command(subcommand)]
    Strategy(StrategyCmd),
    /// Controller comparisons and belt-speed analysis.
    #[command(subcommand)]
    Bench(BenchCmd),
    /// Runs one episode and writes its event log.
    Run(RunArgs),
    /// Serves the reset/step protocol over TCP or stdio.
    Serve(ServeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Poisson,
    Grid,
}

#[derive(Subcommand)]
enum PatternCmd {
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Poisson-disk minimum distance in meters.
        #[arg(long)]
        r: Option<f64>,
        /// Grid spacing in meters.
        #[arg(long)]
        s: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_REGION_LENGTH)]
        length: f64,
        /// Belt width; defaults to the configured one.
        #[arg(long)]
        width: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct PatternSource {
    /// Directory of pattern or pattern-spec JSON files.
    #[arg(long, conflicts_with = "preset")]
    patterns: Option<PathBuf>,
    /// Preset distribution (`paper-4` or a single slug such as `grid-0.15`).
    #[arg(long)]
    preset: Option<String>,
    /// Patterns drawn from generator specs.
    #[arg(long, default_value_t = 40)]
    samples: usize,
}

#[derive(Subcommand)]
enum StrategyCmd {
    /// Monte-Carlo evaluation of one combo.
    Eval {
        /// One rule per robot, e.g. `SPT,FIFO`.
        #[arg(long)]
        combo: StrategyCombo,
        #[command(flatten)]
        source: PatternSource,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// GRASP search for a robust combo.
    Search {
        #[command(flatten)]
        source: PatternSource,
        #[arg(long, default_value_t = 8)]
        iterations: usize,
        #[arg(long, default_value_t = 2)]
        rcl_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// JSON-lines search trace.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum BenchCmd {
    /// Runs every controller on every preset pattern.
    Compare {
        #[arg(long, default_value = "paper-4")]
        preset: String,
        /// Comma-separated: robust-gt[:RULES], greedy-gt, rule:RULES, bridge:ADDR.
        #[arg(long, default_value = "robust-gt,greedy-gt")]
        controllers: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Long-format CSV of the results.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Largest belt speed at which a controller picks everything.
    Maxspeed {
        #[arg(long, default_value = "robust-gt")]
        controller: ControllerSpec,
        /// Second controller; reports its speed gain over the first.
        #[arg(long)]
        against: Option<ControllerSpec>,
        /// Preset slug or pattern file.
        #[arg(long)]
        pattern: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.01)]
        lo: f64,
        #[arg(long, default_value_t = 0.20)]
        hi: f64,
        #[arg(long, default_value_t = 0.001)]
        tol: f64,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Preset slug or pattern file.
    #[arg(long)]
    pattern: String,
    #[arg(long, default_value = "robust-gt")]
    controller: ControllerSpec,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Event log destination (JSON lines).
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, conflicts_with = "stdio", required_unless_present = "stdio")]
    bind: Option<String>,
    #[arg(long)]
    stdio: bool,
    /// Extra pattern files exposed under their file stems.
    #[arg(long)]
    patterns: Option<PathBuf>,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let cfg = cli.world.load()?;
    match cli.command {
        Command::Pattern(PatternCmd::Gen {
            kind,
            r,
            s,
            length,
            width,
            seed,
            out,
        }) => {
            let width = width.unwrap_or(cfg.belt_width);
            let spec = match kind {
                Kind::Poisson => PatternSpec::poisson(r.context("--r is required for poisson")?, length, width, seed),
                Kind::Grid => PatternSpec::grid(s.context("--s is required for grid")?, length, width, seed),
            };
            let pattern = generate(&spec)?;
            match out {
                Some(path) => {
                    save_pattern(&pattern, &path)?;
                    eprintln!("{} objects -> {}", pattern.len(), path.display());
                }
                None => println!("{}", serde_json::to_string_pretty(&pattern)?),
            }
        }
        Command::Strategy(StrategyCmd::Eval { combo, source, seed }) => {
            let patterns = source.load(&cfg, seed)?;
            let report = evaluate_on(&combo, &patterns, &cfg)?;
            println!("combo              {}", report.combo);
            println!("patterns           {}", report.per_pattern.len());
            println!("picked fraction    {:.4}", report.mean_picked_fraction);
            println!("picks/min          {:.3}", report.mean_picks_per_minute);
            println!("reward/min         {:.3}", report.mean_reward_per_minute);
            println!("reward-weighted    {:.4}", report.mean_reward_weighted_rate);
        }
        Command::Strategy(StrategyCmd::Search {
            source,
            iterations,
            rcl_size,
            seed,
            trace,
        }) => {
            let patterns = source.load(&cfg, seed)?;
            let params = GraspParams {
                iterations,
                rcl_size,
                n_samples: patterns.len(),
            };
            let out = grasp_over(&patterns, &cfg, params, seed)?;
            if let Some(path) = trace {
                out.write_trace(&path).with_context(|| format!("writing {}", path.display()))?;
            }
            println!("best               {}", out.best);
            println!("reward/min         {:.3}", out.report.mean_reward_per_minute);
            println!("picked fraction    {:.4}", out.report.mean_picked_fraction);
        }
        Command::Bench(BenchCmd::Compare {
            preset,
            controllers,
            seed,
            out,
        }) => {
            let presets = preset_patterns(&preset, cfg.belt_width).with_context(|| format!("unknown preset {preset:?}"))?;
            let patterns = realize(&presets, seed)?;
            let cs = ControllerSpec::parse_list(&controllers)?;
            let table = compare(&cs, &patterns, &cfg)?;
            print!("{}", table.render());
            if let Some(base) = cs.first().map(ToString::to_string) {
                for other in cs.iter().skip(1).map(ToString::to_string) {
                    for (pattern, gain) in table.benefits(&base, &other) {
                        println!("benefit {other} over {base} on {pattern}: {gain:+.1}%");
                    }
                }
            }
            if let Some(path) = out {
                export_csv(&table, &path)?;
                eprintln!("{} rows -> {}", table.rows.len() * 3, path.display());
            }
        }
        Command::Bench(BenchCmd::Maxspeed {
            controller,
            against,
            pattern,
            seed,
            lo,
            hi,
            tol,
        }) => {
            let pattern = resolve_pattern(&pattern, &cfg, seed)?;
            let search = SpeedSearch {
                lo,
                hi,
                tol,
                ..SpeedSearch::default()
            };
            let base = max_belt_speed(&controller, &pattern, &cfg, search)?;
            println!("{controller}: {:.3} m/s", base.speed);
            if let Some(other) = against {
                let r = max_belt_speed(&other, &pattern, &cfg, search)?;
                println!("{other}: {:.3} m/s", r.speed);
                println!("speed gain: {:+.1}%", speed_gain_percent(base.speed, r.speed));
            }
        }
        Command::Run(args) => {
            let pattern = resolve_pattern(&args.pattern, &cfg, args.seed)?;
            let mut controller = episode_controller(&args.controller, &pattern, &cfg)?;
            let ep = run_episode(&cfg, &pattern, controller.as_mut())?;
            if let Some(path) = &args.log {
                ep.log.write_jsonl(path).with_context(|| format!("writing {}", path.display()))?;
            }
            println!("{}", serde_json::to_string_pretty(&ep.stats)?);
        }
        Command::Serve(args) => {
            let mut catalog = PatternCatalog::with_presets(cfg.belt_width);
            if let Some(dir) = &args.patterns {
                catalog.load_dir(dir)?;
            }
            if args.stdio {
                serve_stdio(cfg, catalog)?;
            } else {
                let addr = args.bind.expect("clap enforces --bind without --stdio");
                let server = BridgeServer::bind(addr.as_str(), cfg, catalog)?;
                eprintln!("listening on {}", server.local_addr()?);
                server.run()?;
            }
        }
    }
    Ok(())
}

impl PatternSource {
    /// Generator specs are sampled `samples` times in total; fixed pattern
    /// files are used once each. Without a source the mixed set is sampled.
    fn load(&self, cfg: &WorldConfig, seed: u64) -> Result<Vec<LabeledPattern>> {
        let (specs, mut fixed) = match (&self.patterns, &self.preset) {
            (Some(dir), _) => read_pattern_dir(dir)?,
            (None, Some(name)) => {
                let presets =
                    preset_patterns(name, cfg.belt_width).with_context(|| format!("unknown preset {name:?}"))?;
                (presets.into_iter().map(|p| p.spec).collect(), Vec::new())
            }
            (None, None) => (mixed_specs(DEFAULT_REGION_LENGTH, cfg.belt_width), Vec::new()),
        };
        let mut out = if specs.is_empty() {
            Vec::new()
        } else {
            sample_patterns(&specs, self.samples, seed)?
        };
        out.append(&mut fixed);
        if out.is_empty() {
            bail!("no patterns found");
        }
        Ok(out)
    }
}

fn read_pattern_dir(dir: &Path) -> Result<(Vec<PatternSpec>, Vec<LabeledPattern>)> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let (mut specs, mut fixed) = (Vec::new(), Vec::new());
    for path in paths {
        let text = fs::read_to_string(&path)?;
        if let Ok(spec) = serde_json::from_str::<PatternSpec>(&text) {
            spec.validate()?;
            specs.push(spec);
        } else {
            let pattern = load_pattern(&path).with_context(|| format!("loading {}", path.display()))?;
            let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            fixed.push(LabeledPattern { label, pattern });
        }
    }
    Ok((specs, fixed))
}

/// A preset slug drawn with `seed`, or a pattern file.
fn resolve_pattern(name: &str, cfg: &WorldConfig, seed: u64) -> Result<Pattern> {
    if let Some(presets) = preset_patterns(name, cfg.belt_width).filter(|p| p.len() == 1) {
        return Ok(generate(&presets[0].spec.with_seed(seed))?);
    }
    let path = Path::new(name);
    if path.exists() {
        return load_pattern(path).with_context(|| format!("loading {}", path.display()));
    }
    bail!("{name:?} is neither a preset slug nor a pattern file")
}

fn episode_controller(spec: &ControllerSpec, pattern: &Pattern, cfg: &WorldConfig) -> Result<Box<dyn Controller>> {
    Ok(match spec {
        ControllerSpec::RobustGt(combo) => {
            Box::new(combo.clone().unwrap_or_else(|| ControllerSpec::robust_default(cfg.robots.len())))
        }
        ControllerSpec::GreedyGt => Box::new(greedy_gt(pattern, cfg)?.combo),
        ControllerSpec::Rule(combo) => Box::new(combo.clone()),
        ControllerSpec::Bridge(addr) => Box::new(PolicyClient::connect(addr.as_str(), cfg)?),
    })
}
