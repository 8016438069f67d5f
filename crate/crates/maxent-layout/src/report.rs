//! Benchmark run reports and their CSV encoding.

use crate::error::{Error, Result};

pub const CSV_HEADER: &str =
    "graph,n,m,h,threads,mode,seed,t_coarsen_s,t_optimize_s,t_total_s,F,M,scale";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Static,
    Update,
    Scratch,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Mode::Static => "static",
            Mode::Update => "update",
            Mode::Scratch => "scratch",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "static" => Ok(Mode::Static),
            "update" => Ok(Mode::Update),
            "scratch" => Ok(Mode::Scratch),
            other => Err(format!("unknown mode '{other}'")),
        }
    }
}

/// One benchmark row. Metric fields are absent when metric evaluation was
/// disabled or gated off by the distance-matrix size limit.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub graph: String,
    pub n: usize,
    pub m: usize,
    pub h: usize,
    pub threads: usize,
    pub mode: Mode,
    pub seed: u64,
    pub t_coarsen_s: f64,
    pub t_optimize_s: f64,
    pub t_total_s: f64,
    pub full_stress: Option<f64>,
    pub maxent_stress: Option<f64>,
    pub scale: Option<f64>,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

fn parse_opt(s: &str, line: usize) -> Result<Option<f64>> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse::<f64>().map(Some).map_err(|_| Error::Parse {
        path: "<csv>".into(),
        line,
        msg: format!("invalid metric value '{s}'"),
    })
}

impl RunReport {
    pub fn csv_row(&self) -> String {
        debug_assert!(!self.graph.contains(','), "graph names must not contain commas");
        format!(
            "{},{},{},{},{},{},{},{:?},{:?},{:?},{},{},{}",
            self.graph,
            self.n,
            self.m,
            self.h,
            self.threads,
            self.mode,
            self.seed,
            self.t_coarsen_s,
            self.t_optimize_s,
            self.t_total_s,
            opt(self.full_stress),
            opt(self.maxent_stress),
            opt(self.scale),
        )
    }

    pub fn parse_csv_row(row: &str, line: usize) -> Result<RunReport> {
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 13 {
            return Err(Error::Parse {
                path: "<csv>".into(),
                line,
                msg: format!("expected 13 fields, got {}", fields.len()),
            });
        }
        let bad = |what: &str| Error::Parse {
            path: "<csv>".into(),
            line,
            msg: format!("invalid {what}"),
        };
        Ok(RunReport {
            graph: fields[0].to_string(),
            n: fields[1].parse().map_err(|_| bad("n"))?,
            m: fields[2].parse().map_err(|_| bad("m"))?,
            h: fields[3].parse().map_err(|_| bad("h"))?,
            threads: fields[4].parse().map_err(|_| bad("threads"))?,
            mode: fields[5].parse().map_err(|_| bad("mode"))?,
            seed: fields[6].parse().map_err(|_| bad("seed"))?,
            t_coarsen_s: fields[7].parse().map_err(|_| bad("t_coarsen_s"))?,
            t_optimize_s: fields[8].parse().map_err(|_| bad("t_optimize_s"))?,
            t_total_s: fields[9].parse().map_err(|_| bad("t_total_s"))?,
            full_stress: parse_opt(fields[10], line)?,
            maxent_stress: parse_opt(fields[11], line)?,
            scale: parse_opt(fields[12], line)?,
        })
    }
}
