use clap::Args;
use serde::Serialize;

use dzd_core::montecarlo::empirical_vs_exact;
use dzd_core::{
    InitialCondition, JointState, SimulationConfig, SimulationReport, StrategySpec, PRNG_ID,
};

use super::{Failure, Outcome};
use crate::output::{emit_object, emit_table, num, RunManifest};
use crate::parse::{self, Initial};
use crate::{Common, Format};

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(value_parser = parse::strategy)]
    pub first: StrategySpec,
    #[arg(value_parser = parse::strategy)]
    pub second: StrategySpec,
    #[arg(long, default_value_t = 1_000_000)]
    pub rounds: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Trembling-hand noise in [0, 0.5]
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    #[arg(long, default_value = "uniform", value_parser = parse::initial)]
    pub initial: Initial,
    /// Leading rounds left out of the statistics [default: min(1000, rounds/10)]
    #[arg(long)]
    pub burn_in: Option<u64>,
    #[arg(long, default_value_t = 3)]
    pub k_max: u32,
    /// Width of the per-state frequency check, in binomial standard deviations
    #[arg(long, default_value_t = 5.0)]
    pub sigmas: f64,
}

#[derive(Debug, Serialize)]
struct Result {
    report: SimulationReport,
    exact_frequencies: [f64; 4],
    deviations: [f64; 4],
    bounds: [f64; 4],
    flagged: Vec<String>,
}

#[derive(Debug, Serialize)]
struct SummaryRow {
    state: &'static str,
    count: u64,
    frequency: f64,
    exact: f64,
    bound: f64,
}

pub fn run(common: &Common, args: &SimulateArgs) -> std::result::Result<Outcome, Failure> {
    let m = common.matrix()?;
    if args.rounds == 0 {
        return Err(Failure::usage("--rounds must be positive"));
    }
    if !(0.0..=0.5).contains(&args.epsilon) {
        return Err(Failure::usage(format!(
            "--epsilon {} is outside [0, 0.5]",
            args.epsilon
        )));
    }
    if !(args.sigmas > 0.0) {
        return Err(Failure::usage("--sigmas must be positive"));
    }
    let cfg = SimulationConfig {
        rounds: args.rounds,
        seed: args.seed,
        initial: match args.initial {
            Initial::State(s) => InitialCondition::State(s),
            Initial::Uniform => InitialCondition::Distribution([0.25; 4]),
        },
        burn_in: args.burn_in.unwrap_or(1000.min(args.rounds / 10)),
        epsilon: args.epsilon,
        max_moment: args.k_max,
    };
    let s1 = parse::resolve(&args.first);
    let s2 = parse::resolve(&args.second);
    let cmp = empirical_vs_exact(&s1, &s2, &m, &cfg, args.sigmas).map_err(Failure::usage)?;

    let mut manifest = RunManifest::new("simulate", common)
        .strategy(&args.first)
        .strategy(&args.second)
        .param("rounds", cfg.rounds)
        .param("seed", cfg.seed)
        .param("epsilon", cfg.epsilon)
        .param("initial", args.initial.label())
        .param("burn_in", cfg.burn_in)
        .param("k_max", cfg.max_moment)
        .param("sigmas", args.sigmas);
    manifest.prng = Some(PRNG_ID);

    let exact = cmp.exact.distribution.to_f64s();
    match common.format.unwrap_or(Format::Json) {
        Format::Json => {
            let result = Result {
                exact_frequencies: exact,
                deviations: cmp.deviations,
                bounds: cmp.bounds,
                flagged: cmp.flagged.iter().map(|s| s.label().to_string()).collect(),
                report: cmp.report,
            };
            emit_object(common, &manifest, &result)?;
        }
        Format::Csv => {
            let rows: Vec<SummaryRow> = JointState::ALL
                .iter()
                .map(|s| {
                    let i = s.index();
                    SummaryRow {
                        state: s.label(),
                        count: cmp.report.counts[i],
                        frequency: cmp.report.frequencies[i],
                        exact: exact[i],
                        bound: cmp.bounds[i],
                    }
                })
                .collect();
            let header = ["state", "count", "frequency", "exact", "bound"].map(String::from);
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.state.to_string(),
                        r.count.to_string(),
                        num(r.frequency),
                        num(r.exact),
                        num(r.bound),
                    ]
                })
                .collect();
            emit_table(common, Format::Csv, &manifest, &header, &cells, &rows)?;
        }
    }
    Ok(Outcome::Pass)
}
