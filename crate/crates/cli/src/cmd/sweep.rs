use clap::{ArgGroup, Args};
use serde_json::{Map, Value};

use dzd_core::{
    tft_exponential_identity, tft_power_identity, wsls_coefficients, IdentityCheck, PayoffMatrix,
};

use super::{Failure, Outcome};
use crate::output::{emit_table, num, RunManifest};
use crate::parse::{self, List};
use crate::{Common, Format};

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("mode").required(true).args(["wsls_coeffs", "tft_k_range", "h_range"])))]
pub struct SweepArgs {
    /// WSLS coefficients in the basis (s1, s2, s1*s2, 1)
    #[arg(long)]
    pub wsls_coeffs: bool,
    /// TFT power identity for k in a range such as 1..10
    #[arg(long, value_parser = parse::k_list)]
    pub tft_k_range: Option<List<u32>>,
    /// TFT exponential identity for these h values
    #[arg(long, value_parser = parse::float_list)]
    pub h_range: Option<List<f64>>,
    /// Payoff grid such as "R=3;S=0;T=4.5,5,5.5;P=1"; missing keys use --payoffs
    #[arg(long)]
    pub payoff_grid: Option<String>,
    /// Identity rows pass when max_abs_error is at or below this
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => num(*x),
            Cell::Int(x) => x.to_string(),
            Cell::Bool(x) => x.to_string(),
            Cell::Text(x) => x.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => serde_json::json!(x),
            Cell::Int(x) => Value::from(*x),
            Cell::Bool(x) => Value::from(*x),
            Cell::Text(x) => Value::from(x.as_str()),
        }
    }
}

fn point_cells(p: [f64; 4]) -> Vec<Cell> {
    p.into_iter().map(Cell::Num).collect()
}

fn identity_cells(
    check: Result<IdentityCheck<f64>, String>,
    tol: f64,
    failed: &mut bool,
) -> Vec<Cell> {
    match check {
        Ok(c) => {
            let passed = c.max_abs_error <= tol;
            *failed |= !passed;
            vec![
                Cell::Num(c.coefficient),
                Cell::Num(c.max_abs_error),
                Cell::Bool(passed),
                Cell::Text("ok".into()),
            ]
        }
        Err(e) => vec![
            Cell::Text(String::new()),
            Cell::Text(String::new()),
            Cell::Text(String::new()),
            Cell::Text(format!("skipped: {e}")),
        ],
    }
}

pub fn run(common: &Common, args: &SweepArgs) -> Result<Outcome, Failure> {
    if !(args.tol > 0.0) {
        return Err(Failure::usage("--tol must be positive"));
    }
    let grid = match &args.payoff_grid {
        Some(spec) => parse::payoff_grid(spec, common.payoffs).map_err(Failure::usage)?,
        None => vec![common.payoffs],
    };
    let mut header: Vec<String> = ["R", "S", "T", "P"].map(String::from).to_vec();
    let mut rows: Vec<Vec<Cell>> = Vec::new();
    let mut failed = false;
    let mode;

    if args.wsls_coeffs {
        mode = "wsls-coeffs";
        header.extend(
            [
                "c_s1",
                "c_s2",
                "c_s1s2",
                "c_1",
                "residual_norm",
                "rank",
                "status",
            ]
            .map(String::from),
        );
        for &p in &grid {
            let mut row = point_cells(p);
            match PayoffMatrix::from_f64s(p, common.ordering()) {
                Ok(m) => {
                    let r = wsls_coefficients(&m);
                    row.extend(r.coefficients.iter().map(|(_, c)| Cell::Num(*c)));
                    row.push(Cell::Num(r.residual_norm));
                    row.push(Cell::Int(r.rank as u64));
                    let status = if r.rank < 4 {
                        "rank<4".to_string()
                    } else {
                        "ok".to_string()
                    };
                    row.push(Cell::Text(status));
                }
                Err(e) => {
                    row.extend((0..6).map(|_| Cell::Text(String::new())));
                    row.push(Cell::Text(format!("invalid: {e}")));
                }
            }
            rows.push(row);
        }
    } else if let Some(ks) = &args.tft_k_range {
        mode = "tft-k-range";
        header.extend(["k", "coefficient", "max_abs_error", "passed", "status"].map(String::from));
        for &p in &grid {
            let m = PayoffMatrix::from_f64s(p, common.ordering());
            for &k in &ks.0 {
                let mut row = point_cells(p);
                row.push(Cell::Int(k.into()));
                let check = m
                    .as_ref()
                    .map_err(ToString::to_string)
                    .and_then(|m| tft_power_identity(m, k).map_err(|e| e.to_string()));
                row.extend(identity_cells(check, args.tol, &mut failed));
                rows.push(row);
            }
        }
    } else {
        mode = "h-range";
        let hs = args.h_range.as_ref().expect("mode group is required");
        header.extend(["h", "coefficient", "max_abs_error", "passed", "status"].map(String::from));
        for &p in &grid {
            let m = PayoffMatrix::from_f64s(p, common.ordering());
            for &h in &hs.0 {
                let mut row = point_cells(p);
                row.push(Cell::Num(h));
                let check = m
                    .as_ref()
                    .map_err(ToString::to_string)
                    .and_then(|m| tft_exponential_identity(m, h).map_err(|e| e.to_string()));
                row.extend(identity_cells(check, args.tol, &mut failed));
                rows.push(row);
            }
        }
    }

    let manifest = RunManifest::new("sweep", common)
        .param("mode", mode)
        .param("payoff_grid", &args.payoff_grid)
        .param("k_range", args.tft_k_range.as_ref().map(|l| &l.0))
        .param("h_range", args.h_range.as_ref().map(|l| &l.0))
        .param("tol", args.tol)
        .param("points", grid.len());
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| r.iter().map(Cell::csv).collect())
        .collect();
    let json_rows: Vec<Map<String, Value>> = rows
        .iter()
        .map(|r| {
            header
                .iter()
                .cloned()
                .zip(r.iter().map(Cell::json))
                .collect()
        })
        .collect();
    emit_table(
        common,
        Format::Csv,
        &manifest,
        &header,
        &csv_rows,
        &json_rows,
    )?;
    Ok(Outcome::from_pass(!failed))
}
