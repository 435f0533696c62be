use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hcrsn::experiment::{run_experiment, ExperimentConfig, ExperimentId};
use hcrsn::scenario::{generate_scenario, load_scenario, save_scenario, scenario_to_toml, Counts, GeometrySpec, Settings};
use hcrsn::SimError;
use hcrsn_core::allocation::select_channels;
use hcrsn_core::RngStream;

#[derive(Parser)]
#[command(name = "hcrsn", version, about = "Spectrum-sensor scheduling and data-sensor allocation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a random scenario and write it as TOML.
    Generate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Spectrum sensors M.
        #[arg(long, default_value_t = 10)]
        spectrum_sensors: usize,
        /// Data sensors N.
        #[arg(long, default_value_t = 30)]
        data_sensors: usize,
        /// Licensed channels K.
        #[arg(long, default_value_t = 7)]
        channels: usize,
        /// Sink transceivers B.
        #[arg(long, default_value_t = 5)]
        transceivers: usize,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run one experiment and write `<out>/<experiment>.csv`.
    Run {
        /// Experiment id; may instead come from the config file.
        experiment: Option<String>,
        /// TOML experiment config; flags override its values.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Seeds, comma separated.
        #[arg(long, value_delimiter = ',')]
        seed: Vec<u64>,
        /// Use this many consecutive seeds starting at the first `--seed` (or 0).
        #[arg(long)]
        seed_count: Option<u64>,
        /// Sweep values, comma separated.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        sweep: Vec<f64>,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the effective config instead of running.
        #[arg(long)]
        dry_run: bool,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Check a scenario file and report whether its demands can be met.
    Validate { scenario: PathBuf },
}

/// Overrides of the scalar scenario settings.
#[derive(Args, Default)]
struct Overrides {
    #[arg(long)]
    period_s: Option<f64>,
    #[arg(long)]
    sensing_phase_s: Option<f64>,
    #[arg(long)]
    mini_slot_s: Option<f64>,
    #[arg(long)]
    sensing_energy_j: Option<f64>,
    #[arg(long)]
    harvest_rate_w: Option<f64>,
    #[arg(long)]
    target_false_alarm: Option<f64>,
    #[arg(long)]
    samples_per_sensing: Option<u32>,
    #[arg(long)]
    misdetect_threshold: Option<f64>,
    #[arg(long)]
    collision_bound: Option<f64>,
    #[arg(long)]
    bandwidth_hz: Option<f64>,
    #[arg(long)]
    demand_bits: Option<f64>,
    #[arg(long)]
    p_max_w: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    noise_power_dbm: Option<f64>,
}

impl Overrides {
    fn apply(&self, s: &mut Settings, g: &mut GeometrySpec) {
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut s.period_s, self.period_s);
        set(&mut s.sensing_phase_s, self.sensing_phase_s);
        set(&mut s.mini_slot_s, self.mini_slot_s);
        set(&mut s.sensing_energy_j, self.sensing_energy_j);
        set(&mut s.harvest_rate_w, self.harvest_rate_w);
        set(&mut s.target_false_alarm, self.target_false_alarm);
        set(&mut s.misdetect_threshold, self.misdetect_threshold);
        set(&mut s.collision_bound, self.collision_bound);
        set(&mut s.bandwidth_hz, self.bandwidth_hz);
        set(&mut s.demand_bits, self.demand_bits);
        set(&mut s.p_max_w, self.p_max_w);
        set(&mut g.noise_power_dbm, self.noise_power_dbm);
        if let Some(u) = self.samples_per_sensing {
            s.samples_per_sensing = u;
        }
    }
}

fn read(path: &PathBuf) -> Result<String, SimError> {
    std::fs::read_to_string(path).map_err(|source| SimError::Io {
        path: path.clone(),
        source,
    })
}

fn execute(cli: Cli) -> Result<(), SimError> {
    match cli.command {
        Command::Generate {
            seed,
            out,
            spectrum_sensors,
            data_sensors,
            channels,
            transceivers,
            overrides,
        } => {
            let mut settings = Settings::default();
            let mut geom = GeometrySpec::default();
            overrides.apply(&mut settings, &mut geom);
            let counts = Counts {
                spectrum_sensors,
                data_sensors,
                channels,
                transceivers,
            };
            let s = generate_scenario(&geom, counts, &settings, &mut RngStream::new(seed))
                .map_err(|e| SimError::Usage(e.to_string()))?;
            match out {
                Some(path) => save_scenario(&s, &path),
                None => {
                    print!("{}", scenario_to_toml(&s));
                    Ok(())
                }
            }
        }
        Command::Run {
            experiment,
            config,
            seed,
            seed_count,
            sweep,
            out,
            dry_run,
            overrides,
        } => {
            let id = experiment.as_deref().map(str::parse::<ExperimentId>).transpose()?;
            let mut cfg = match (&config, id) {
                (Some(path), _) => ExperimentConfig::from_toml(&read(path)?, id)?,
                (None, Some(id)) => ExperimentConfig::new(id),
                (None, None) => return Err(SimError::Usage("name an experiment or pass --config".into())),
            };
            if let Some(id) = id {
                if id != cfg.experiment {
                    return Err(SimError::Usage(format!(
                        "experiment `{id}` conflicts with `{}` in the config",
                        cfg.experiment
                    )));
                }
            }
            if let Some(n) = seed_count {
                let start = seed.first().copied().unwrap_or(0);
                cfg.seeds = (start..start + n).collect();
            } else if !seed.is_empty() {
                cfg.seeds = seed;
            }
            if !sweep.is_empty() {
                cfg.sweep = sweep;
            }
            if let Some(out) = out {
                cfg.output_dir = out;
            }
            overrides.apply(&mut cfg.settings, &mut cfg.geometry);
            cfg.validate()?;
            if dry_run {
                print!("{}", cfg.to_toml());
                return Ok(());
            }
            let path = run_experiment(&cfg)?;
            println!("{}", path.display());
            Ok(())
        }
        Command::Validate { scenario } => {
            let s = load_scenario(&scenario)?;
            let all: Vec<usize> = (0..s.num_channels).collect();
            let inst = select_channels(&s, &all)?;
            println!(
                "{}: M={} N={} K={} B={}",
                scenario.display(),
                s.num_spectrum_sensors,
                s.num_data_sensors,
                s.num_channels,
                s.num_transceivers
            );
            inst.precheck()
                .map_err(|e| SimError::Infeasible(format!("with every channel offered: {e}")))?;
            println!("demands achievable with every channel offered");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::try_parse().unwrap_or_else(|e| e.exit());
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
