//! Flag value parsers.

use dzd_core::{JointState, MemoryOneStrategy, StrategySpec};

pub fn floats(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("`{x}` is not a finite number"))
        })
        .collect()
}

/// A comma-separated list taken as one flag value.
#[derive(Debug, Clone, PartialEq)]
pub struct List<T>(pub Vec<T>);

pub fn float_list(s: &str) -> Result<List<f64>, String> {
    floats(s).map(List)
}

pub fn k_list(s: &str) -> Result<List<u32>, String> {
    k_range(s).map(List)
}

pub fn payoffs(s: &str) -> Result<[f64; 4], String> {
    floats(s)?
        .try_into()
        .map_err(|_| "expected four payoffs R,S,T,P".to_string())
}

/// Named (`tft`, `wsls`, `all_c`, `all_d`, `random:q`), inline
/// `p_cc,p_cd,p_dc,p_dd`, or a JSON object with those four keys.
pub fn strategy(s: &str) -> Result<StrategySpec, String> {
    let spec = if s.trim_start().starts_with('{') {
        serde_json::from_str::<StrategySpec>(s).map_err(|e| e.to_string())?
    } else {
        StrategySpec::Name(s.trim().to_string())
    };
    spec.resolve::<f64>().map_err(|e| e.to_string())?;
    Ok(spec)
}

pub fn resolve(spec: &StrategySpec) -> MemoryOneStrategy<f64> {
    spec.resolve().expect("validated while parsing")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Initial {
    State(JointState),
    Uniform,
}

impl Initial {
    pub fn distribution(self) -> [f64; 4] {
        match self {
            Initial::State(s) => {
                let mut p = [0.0; 4];
                p[s.index()] = 1.0;
                p
            }
            Initial::Uniform => [0.25; 4],
        }
    }

    pub fn label(self) -> String {
        match self {
            Initial::State(s) => s.label().to_ascii_lowercase(),
            Initial::Uniform => "uniform".into(),
        }
    }
}

pub fn initial(s: &str) -> Result<Initial, String> {
    if s.trim().eq_ignore_ascii_case("uniform") {
        return Ok(Initial::Uniform);
    }
    s.parse::<JointState>()
        .map(Initial::State)
        .map_err(|_| "expected cc, cd, dc, dd or uniform".to_string())
}

/// `a..b`, `a-b` or a single `k`, inclusive.
pub fn k_range(s: &str) -> Result<Vec<u32>, String> {
    let bad = || format!("`{s}` is not a range like 1..10");
    let (lo, hi) = match s.split_once("..").or_else(|| s.split_once('-')) {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s.trim(), s.trim()),
    };
    let lo: u32 = lo.parse().map_err(|_| bad())?;
    let hi: u32 = hi.parse().map_err(|_| bad())?;
    if lo == 0 || hi < lo {
        return Err(bad());
    }
    Ok((lo..=hi).collect())
}

/// Payoff grid like `R=3;S=0;T=4.5,5,5.5;P=1`; unspecified keys take the
/// `--payoffs` value. Points are enumerated with P varying fastest.
pub fn payoff_grid(spec: &str, base: [f64; 4]) -> Result<Vec<[f64; 4]>, String> {
    let mut axes: [Vec<f64>; 4] = base.map(|v| vec![v]);
    for part in spec.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, values) = part
            .split_once('=')
            .ok_or_else(|| format!("`{part}` is not KEY=v1,v2,..."))?;
        let slot = match key.trim().to_ascii_uppercase().as_str() {
            "R" => 0,
            "S" => 1,
            "T" => 2,
            "P" => 3,
            other => return Err(format!("unknown payoff `{other}`")),
        };
        let values = if values.trim().is_empty() {
            Vec::new()
        } else {
            floats(values)?
        };
        axes[slot] = values;
    }
    let mut points = Vec::new();
    for &r in &axes[0] {
        for &s in &axes[1] {
            for &t in &axes[2] {
                for &p in &axes[3] {
                    points.push([r, s, t, p]);
                }
            }
        }
    }
    if points.is_empty() {
        return Err("payoff grid is empty".into());
    }
    Ok(points)
}
