use clap::Args;
use serde::Serialize;

use dzd_core::press_dyson::decompose_with_rank_tol;
use dzd_core::{press_dyson, BasisSpec, Player, StrategySpec};

use super::{Failure, Outcome};
use crate::output::{emit_object, emit_table, num, RunManifest};
use crate::parse;
use crate::{Common, Format};

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[arg(value_parser = parse::strategy)]
    pub strategy: StrategySpec,
    /// zd, monomial:D, exp:h or wsls4
    #[arg(long, default_value = "zd", value_parser = basis)]
    pub basis: BasisArg,
    /// Seat whose Press-Dyson vector is decomposed
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub player: u8,
    /// Residual norm at or below which the fit counts as exact
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub rank_tol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisArg {
    pub name: String,
    pub spec: BasisSpec<f64>,
}

fn basis(s: &str) -> Result<BasisArg, String> {
    let s = s.trim().to_ascii_lowercase();
    let spec = match s.split_once(':') {
        None if s == "zd" => BasisSpec::Zd,
        None if s == "wsls4" => BasisSpec::Wsls4,
        Some(("monomial", d)) => BasisSpec::Monomial {
            max_total_degree: d.parse().map_err(|_| format!("bad degree `{d}`"))?,
        },
        Some(("exp", h)) => {
            let h: f64 = h.parse().map_err(|_| format!("bad h `{h}`"))?;
            if h == 0.0 || !h.is_finite() {
                return Err("exp:h needs a finite non-zero h".into());
            }
            BasisSpec::Exponential { h }
        }
        _ => {
            return Err(format!(
                "unknown basis `{s}`; expected zd, monomial:D, exp:h or wsls4"
            ))
        }
    };
    Ok(BasisArg { name: s, spec })
}

#[derive(Debug, Serialize)]
struct Coefficient {
    vector: String,
    value: f64,
}

#[derive(Debug, Serialize)]
struct Report {
    player: u8,
    press_dyson: [f64; 4],
    coefficients: Vec<Coefficient>,
    residual: [f64; 4],
    residual_norm: f64,
    rank: usize,
    basis_size: usize,
    full_rank: bool,
    exact: bool,
}

pub fn run(common: &Common, args: &DecomposeArgs) -> Result<Outcome, Failure> {
    let m = common.matrix()?;
    if !(args.tol > 0.0) || !(args.rank_tol > 0.0) {
        return Err(Failure::usage("tolerances must be positive"));
    }
    let player = if args.player == 1 {
        Player::One
    } else {
        Player::Two
    };
    let pd = press_dyson(&parse::resolve(&args.strategy), player);
    let r = decompose_with_rank_tol(&pd, &args.basis.spec, &m, args.tol, args.rank_tol)
        .map_err(Failure::usage)?;

    let report = Report {
        player: args.player,
        press_dyson: pd.values,
        full_rank: r.is_full_rank(),
        coefficients: r
            .coefficients
            .iter()
            .map(|(label, value)| Coefficient {
                vector: label.to_string(),
                value: *value,
            })
            .collect(),
        residual: r.residual,
        residual_norm: r.residual_norm,
        rank: r.rank,
        basis_size: r.basis_size,
        exact: r.exact,
    };
    let manifest = RunManifest::new("decompose", common)
        .strategy(&args.strategy)
        .param("basis", &args.basis.name)
        .param("player", args.player)
        .param("tol", args.tol)
        .param("rank_tol", args.rank_tol);

    match common.format.unwrap_or(Format::Json) {
        Format::Json => emit_object(common, &manifest, &report)?,
        Format::Csv => {
            let header = [
                "vector",
                "coefficient",
                "residual_norm",
                "rank",
                "basis_size",
                "exact",
            ]
            .map(String::from);
            let rows: Vec<Vec<String>> = report
                .coefficients
                .iter()
                .map(|c| {
                    vec![
                        c.vector.clone(),
                        num(c.value),
                        num(report.residual_norm),
                        report.rank.to_string(),
                        report.basis_size.to_string(),
                        report.exact.to_string(),
                    ]
                })
                .collect();
            emit_table(
                common,
                Format::Csv,
                &manifest,
                &header,
                &rows,
                &report.coefficients,
            )?;
        }
    }
    Ok(Outcome::Pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_names() {
        assert_eq!(basis("zd").unwrap().spec, BasisSpec::Zd);
        assert_eq!(basis("WSLS4").unwrap().spec, BasisSpec::Wsls4);
        assert_eq!(
            basis("monomial:3").unwrap().spec,
            BasisSpec::Monomial {
                max_total_degree: 3
            }
        );
        assert_eq!(
            basis("exp:0.5").unwrap().spec,
            BasisSpec::Exponential { h: 0.5 }
        );
        assert!(basis("exp:0").is_err());
        assert!(basis("monomial:x").is_err());
        assert!(basis("fourier").is_err());
    }
}
