use clap::Args;
use rayon::prelude::*;
use serde::Serialize;

use dzd_core::montecarlo::{random_strategy, trial_seed};
use dzd_core::verify::{check_tft, TftCheck, TftCheckConfig, DEFAULT_H_GRID, MAX_MOMENT_ORDER};
use dzd_core::{MemoryOneStrategy, StateDistribution, StrategySpec, PRNG_ID};

use super::{Failure, Outcome};
use crate::output::{emit_table, num, RunManifest};
use crate::parse::{self, Initial};
use crate::{Common, Format};

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Opponent strategy (repeatable)
    #[arg(long, value_parser = parse::strategy)]
    pub opponent: Vec<StrategySpec>,
    /// Number of seeded random opponents; opponent i uses seed + i
    #[arg(long, requires = "seed")]
    pub random: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 6)]
    pub k_max: u32,
    #[arg(long, value_parser = parse::float_list)]
    pub h_grid: Option<parse::List<f64>>,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value = "uniform", value_parser = parse::initial)]
    pub initial: Initial,
}

#[derive(Debug, Serialize)]
struct Row {
    opponent: String,
    opponent_p: [f64; 4],
    pi: [f64; 4],
    moment_deviations: Vec<(u32, f64)>,
    mgf_deviations: Vec<(f64, f64)>,
    cd_minus_dc: f64,
    distributions_equal: bool,
    converged: bool,
    passed: bool,
}

pub fn run(common: &Common, args: &VerifyArgs) -> Result<Outcome, Failure> {
    let m = common.matrix()?;
    if args.k_max == 0 || args.k_max > MAX_MOMENT_ORDER {
        return Err(Failure::usage(format!(
            "--k-max must be in 1..={MAX_MOMENT_ORDER}"
        )));
    }
    if !(args.tol > 0.0) {
        return Err(Failure::usage("--tol must be positive"));
    }
    let h_grid = args
        .h_grid
        .clone()
        .map(|l| l.0)
        .unwrap_or_else(|| DEFAULT_H_GRID.to_vec());
    if h_grid.iter().any(|&h| h == 0.0) {
        return Err(Failure::usage("--h-grid values must be non-zero"));
    }

    let mut opponents: Vec<(String, MemoryOneStrategy<f64>)> = args
        .opponent
        .iter()
        .map(|spec| (spec.to_string(), parse::resolve(spec)))
        .collect();
    if let (Some(n), Some(seed)) = (args.random, args.seed) {
        opponents.extend((0..n).map(|i| {
            let s = trial_seed(seed, i);
            (format!("random#{i}"), random_strategy(s))
        }));
    }
    if opponents.is_empty() {
        return Err(Failure::usage("give --opponent and/or --random N --seed S"));
    }

    let cfg = TftCheckConfig {
        max_moment: args.k_max,
        h_grid: h_grid.clone(),
        tol: args.tol,
        initial: StateDistribution::from_f64s(args.initial.distribution())
            .map_err(Failure::usage)?,
        ..TftCheckConfig::default()
    };
    let checks: Vec<(String, TftCheck)> = opponents
        .par_iter()
        .map(|(name, s)| check_tft(s, &m, &cfg).map(|c| (name.clone(), c)))
        .collect::<Result<_, _>>()
        .map_err(Failure::usage)?;

    let rows: Vec<Row> = checks
        .into_iter()
        .map(|(opponent, c)| Row {
            opponent,
            opponent_p: c.opponent,
            pi: c.limit.distribution.to_f64s(),
            moment_deviations: c.moment_deviations,
            mgf_deviations: c.mgf_deviations,
            cd_minus_dc: c.cd_minus_dc,
            distributions_equal: c.distributions_equal,
            converged: c.limit.converged,
            passed: c.passed,
        })
        .collect();
    let all_pass = rows.iter().all(|r| r.passed);

    let mut manifest = RunManifest::new("verify-tft", common)
        .strategy("tft")
        .param(
            "opponents",
            args.opponent
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>(),
        )
        .param("random", args.random)
        .param("seed", args.seed)
        .param("k_max", args.k_max)
        .param("h_grid", &h_grid)
        .param("tol", args.tol)
        .param("structural_tol", cfg.structural_tol)
        .param("initial", args.initial.label())
        .param("all_pass", all_pass);
    if args.random.is_some() {
        manifest.prng = Some(PRNG_ID);
    }

    let mut header: Vec<String> = [
        "opponent", "p_cc", "p_cd", "p_dc", "p_dd", "pi_cc", "pi_cd", "pi_dc", "pi_dd",
    ]
    .map(String::from)
    .to_vec();
    header.extend((1..=args.k_max).map(|k| format!("dev_k{k}")));
    header.extend(h_grid.iter().map(|h| format!("dev_h{}", num(*h))));
    header.extend(["cd_minus_dc", "distributions_equal", "converged", "passed"].map(String::from));
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut cells = vec![r.opponent.clone()];
            cells.extend(r.opponent_p.iter().map(|x| num(*x)));
            cells.extend(r.pi.iter().map(|x| num(*x)));
            cells.extend(r.moment_deviations.iter().map(|(_, d)| num(*d)));
            cells.extend(r.mgf_deviations.iter().map(|(_, d)| num(*d)));
            cells.push(num(r.cd_minus_dc));
            cells.push(r.distributions_equal.to_string());
            cells.push(r.converged.to_string());
            cells.push(r.passed.to_string());
            cells
        })
        .collect();

    emit_table(common, Format::Json, &manifest, &header, &csv_rows, &rows)?;
    Ok(Outcome::from_pass(all_pass))
}
