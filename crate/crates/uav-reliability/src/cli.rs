//! Command-line interface: scenario generation, replay, and one-shot model
//! queries. All heavy lifting lives in the library; this module only maps
//! arguments onto it and formats output.
//!
//! Exit codes for `replay`: 0 when the mission completes, 2 when it aborts
//! at the threshold, 1 on any error. Other commands use 0/1.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::str::FromStr;
use uav_reliability::markov::{mttf_from_state, transient_distribution, StateDistribution};
use uav_reliability::models::{
    arrhenius_acceleration, battery_state_from_level, build_battery_model, build_propulsion_model,
    processor_mttf, propulsion_state_from_symptom, BatteryParams, MotorConfiguration, MotorStatus,
    ProcessorParams, PropulsionParams,
};
use uav_reliability::runtime::{
    format_results_csv, format_results_json_lines, read_telemetry_csv, write_telemetry_csv,
    MissionConfig, Verdict,
};
use uav_reliability::scenario::{generate_scenario, ScenarioSpec};

#[derive(Parser)]
#[command(
    name = "uav-reliability",
    version,
    about = "Runtime reliability evaluation for UAV-class systems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Generate a synthetic telemetry CSV for a mission scenario
    Scenario(ScenarioArgs),
    /// Replay a telemetry CSV through the evaluation engine
    Replay(ReplayArgs),
    /// Query one component model directly
    Query {
        #[command(subcommand)]
        query: QueryCommand,
    },
}

#[derive(Clone, Copy, ValueEnum)]
pub enum KindArg {
    /// Smooth battery decline, nominal temperature
    FaultFree,
    /// Battery step fault at X, overheat ramp from Y
    Faulty,
}

#[derive(Args)]
pub struct ScenarioArgs {
    #[arg(long, value_enum, default_value = "fault-free")]
    pub kind: KindArg,
    /// Mission length in seconds (one sample per second)
    #[arg(long, default_value_t = 750)]
    pub duration: u32,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Output CSV path
    #[arg(long)]
    pub out: PathBuf,
    /// Battery fault instant X in seconds (faulty kind; default 250)
    #[arg(long)]
    pub fault_at: Option<u32>,
    /// Overheat onset Y in seconds (faulty kind; default 400)
    #[arg(long)]
    pub overheat_at: Option<u32>,
    /// Battery level right before the fault
    #[arg(long, default_value_t = 80.0)]
    pub drop_from: f64,
    /// Battery level right after the fault
    #[arg(long, default_value_t = 40.0)]
    pub drop_to: f64,
    /// Fault-free end-of-mission battery level
    #[arg(long, default_value_t = 70.0)]
    pub reserve: f64,
    /// Temperature sensor noise half-width
    #[arg(long, default_value_t = 0.15)]
    pub noise: f64,
    /// Overheat climb rate in degrees C per second
    #[arg(long, default_value_t = 0.35)]
    pub ramp: f64,
    /// Motor configuration tag written into every sample
    #[arg(long, default_value = "PNPN")]
    pub config: String,
}

#[derive(Args)]
pub struct ReplayArgs {
    /// Telemetry CSV to replay
    #[arg(long)]
    pub telemetry: PathBuf,
    /// Mission configuration JSON; defaults apply when omitted
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Per-tick results file
    #[arg(long, default_value = "results.csv")]
    pub out: PathBuf,
    /// Write JSON lines instead of CSV
    #[arg(long)]
    pub json: bool,
    /// Override the abort threshold from the configuration
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Subcommand)]
pub enum QueryCommand {
    /// Mean time to failure of one component model
    Mttf(QueryArgs),
    /// Failure probability of one component model over a horizon
    Prob(QueryArgs),
}

#[derive(Args)]
pub struct QueryArgs {
    /// Model to query: propulsion | battery | processor
    pub model: String,
    /// Motor configuration (propulsion)
    #[arg(long)]
    pub config: Option<String>,
    /// Per-motor failure rate 1/h (propulsion) or battery failure rate
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Motor status string of O/F characters (propulsion)
    #[arg(long)]
    pub motors: Option<String>,
    /// Battery level percent (battery)
    #[arg(long)]
    pub level: Option<f64>,
    /// Battery degradation rate 1/h
    #[arg(long)]
    pub d: Option<f64>,
    /// Battery usage rate 1/h
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Battery inactivity rate 1/h
    #[arg(long)]
    pub beta: Option<f64>,
    /// Actual processor temperature in degrees C
    #[arg(long)]
    pub ta: Option<f64>,
    /// Reference MTTF in hours (processor)
    #[arg(long = "ref")]
    pub mttf_ref: Option<f64>,
    /// Activation energy in eV (processor)
    #[arg(long)]
    pub ea: Option<f64>,
    /// Boltzmann constant in eV/K (processor)
    #[arg(long)]
    pub k: Option<f64>,
    /// Reference temperature in degrees C (processor)
    #[arg(long)]
    pub tr: Option<f64>,
    /// Utilization fraction (processor; stored, not used by the equations)
    #[arg(long)]
    pub u: Option<f64>,
    /// Evaluation horizon in hours (prob queries)
    #[arg(long)]
    pub horizon: Option<f64>,
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let outcome = match cli.command {
        Command::Scenario(args) => run_scenario(args),
        Command::Replay(args) => return run_replay(args),
        Command::Query { query } => run_query(query),
    };
    match outcome {
        Ok(()) => 0,
        Err(message) => {
            eprintln!("error: {message}");
            1
        }
    }
}

fn run_scenario(args: ScenarioArgs) -> Result<(), String> {
    let mut spec = match args.kind {
        KindArg::FaultFree => ScenarioSpec::fault_free(args.duration),
        KindArg::Faulty => ScenarioSpec::faulty(
            args.duration,
            args.fault_at.unwrap_or(250),
            args.overheat_at.unwrap_or(400),
        ),
    };
    if matches!(args.kind, KindArg::FaultFree) {
        spec.battery_fault_at_s = args.fault_at;
        spec.overheat_at_s = args.overheat_at;
    }
    spec.drop_from_pct = args.drop_from;
    spec.drop_to_pct = args.drop_to;
    spec.landing_reserve_pct = args.reserve;
    spec.temp_noise_amplitude_c = args.noise;
    spec.overheat_ramp_c_per_s = args.ramp;
    spec.configuration = parse_configuration(&args.config)?;

    let samples = generate_scenario(&spec, args.seed).map_err(|e| e.to_string())?;
    write_telemetry_csv(&args.out, &samples).map_err(|e| e.to_string())?;
    println!("wrote {} samples to {}", samples.len(), args.out.display());
    Ok(())
}

fn run_replay(args: ReplayArgs) -> i32 {
    match try_replay(args) {
        Ok(verdict) => match verdict {
            Verdict::Completed => 0,
            Verdict::Aborted { .. } => 2,
        },
        Err(message) => {
            eprintln!("error: {message}");
            1
        }
    }
}

fn try_replay(args: ReplayArgs) -> Result<Verdict, String> {
    let mut config = match &args.config {
        Some(path) => MissionConfig::load(path).map_err(|e| e.to_string())?,
        None => MissionConfig::default(),
    };
    if let Some(threshold) = args.threshold {
        config.threshold = threshold;
    }
    let samples = read_telemetry_csv(&args.telemetry).map_err(|e| e.to_string())?;
    let outcome = uav_reliability::replay(&samples, &config).map_err(|e| e.to_string())?;

    let rendered = if args.json {
        format_results_json_lines(&outcome.results)
    } else {
        format_results_csv(&outcome.results)
    };
    std::fs::write(&args.out, rendered).map_err(|e| e.to_string())?;

    let max_system = outcome
        .results
        .iter()
        .map(|r| r.system_probability)
        .fold(0.0f64, f64::max);
    println!("{}", outcome.verdict);
    println!("samples={}", outcome.results.len());
    println!("max_system_probability={max_system}");
    println!("results={}", args.out.display());
    Ok(outcome.verdict)
}

fn parse_configuration(text: &str) -> Result<MotorConfiguration, String> {
    MotorConfiguration::from_str(text).map_err(|e| e.to_string())
}

fn run_query(query: QueryCommand) -> Result<(), String> {
    let defaults = MissionConfig::default();
    let (args, want_probability) = match query {
        QueryCommand::Mttf(args) => (args, false),
        QueryCommand::Prob(args) => (args, true),
    };
    let horizon = args.horizon.unwrap_or(defaults.evaluation_horizon_h);

    match args.model.as_str() {
        "propulsion" => {
            let configuration = parse_configuration(args.config.as_deref().unwrap_or("PNPN"))?;
            let lambda = args.lambda.unwrap_or(0.001);
            let params = PropulsionParams::new(configuration, lambda).map_err(|e| e.to_string())?;
            let model = build_propulsion_model(&params);
            let state = match &args.motors {
                Some(text) => {
                    let status: Vec<MotorStatus> = text
                        .chars()
                        .map(MotorStatus::from_char)
                        .collect::<Option<_>>()
                        .ok_or_else(|| format!("motor status `{text}` must be O/F characters"))?;
                    propulsion_state_from_symptom(configuration, &status)
                        .map_err(|e| e.to_string())?
                }
                None => 0,
            };
            println!("model=propulsion");
            println!("config={configuration}");
            println!("lambda={lambda}");
            println!("state={}", model.state_label(state));
            if want_probability {
                println!("horizon_h={horizon}");
                println!("probability={}", absorbed_within(&model, state, horizon)?);
            } else {
                let mttf = mttf_from_state(&model, state).map_err(|e| e.to_string())?;
                println!("mttf_h={mttf}");
            }
        }
        "battery" => {
            let params = BatteryParams::new(
                args.lambda.unwrap_or(defaults.battery.failure_rate_per_h),
                args.d.unwrap_or(defaults.battery.degradation_rate_per_h),
                args.alpha.unwrap_or(defaults.battery.usage_rate_per_h),
                args.beta.unwrap_or(defaults.battery.inactivity_rate_per_h),
            )
            .map_err(|e| e.to_string())?;
            let level = args.level.unwrap_or(100.0);
            let band = battery_state_from_level(level).map_err(|e| e.to_string())?;
            let model = build_battery_model(&params);
            println!("model=battery");
            println!("level={level}");
            println!("band={}", model.state_label(band));
            if want_probability {
                println!("horizon_h={horizon}");
                println!("probability={}", absorbed_within(&model, band, horizon)?);
            } else {
                let mttf = mttf_from_state(&model, band).map_err(|e| e.to_string())?;
                println!("mttf_h={mttf}");
            }
        }
        "processor" => {
            let params = ProcessorParams::new(
                args.mttf_ref.unwrap_or(defaults.processor.mttf_ref_h),
                args.ea.unwrap_or(defaults.processor.activation_energy_ev),
                args.k.unwrap_or(defaults.processor.boltzmann_ev_per_k),
                args.tr.unwrap_or(defaults.processor.ref_temperature_c),
                args.u.unwrap_or(defaults.processor.utilization),
            )
            .map_err(|e| e.to_string())?;
            let ta = args.ta.unwrap_or(params.ref_temperature);
            let factor = arrhenius_acceleration(ta, &params).map_err(|e| e.to_string())?;
            let mttf = processor_mttf(&params, ta).map_err(|e| e.to_string())?;
            println!("model=processor");
            println!("ta_c={ta}");
            println!("acceleration_factor={factor}");
            if want_probability {
                println!("horizon_h={horizon}");
                println!("probability={}", 1.0 - (-horizon / mttf).exp());
            } else {
                println!("mttf_h={mttf}");
            }
        }
        other => {
            return Err(format!(
                "unknown model `{other}` (propulsion, battery, processor)"
            ))
        }
    }
    Ok(())
}

fn absorbed_within(
    model: &uav_reliability::MarkovModel,
    state: usize,
    horizon: f64,
) -> Result<f64, String> {
    let p0 = StateDistribution::point(model.state_count(), state);
    let at = transient_distribution(model, &p0, horizon).map_err(|e| e.to_string())?;
    Ok(model.absorbing_mass(at.probabilities()))
}
