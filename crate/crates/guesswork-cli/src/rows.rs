//! The record every command renders: one row per (m, method, order)
//! evaluation, in CSV, JSON or human-readable form.
//!
//! The CSV header is fixed:
//! `m,method,order,log10_G,ratio,lo_log10,hi_log10,N,S,T,seed,wall_ms,error`

use anyhow::{bail, Context};
use guesswork::GuessworkEstimate;
use serde::{Deserialize, Serialize};

pub const CSV_HEADER: &str =
    "m,method,order,log10_G,ratio,lo_log10,hi_log10,N,S,T,seed,wall_ms,error";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Row {
    pub m: u32,
    pub method: String,
    pub order: u8,
    pub log10_g: Option<f64>,
    pub ratio: Option<f64>,
    pub lo_log10: Option<f64>,
    pub hi_log10: Option<f64>,
    #[serde(rename = "N")]
    pub bins: Option<u32>,
    #[serde(rename = "S")]
    pub samples: Option<u64>,
    #[serde(rename = "T")]
    pub replicates: Option<u32>,
    pub seed: Option<u64>,
    pub wall_ms: f64,
    pub error: Option<String>,
}

impl Row {
    pub fn from_estimate(est: &GuessworkEstimate, order: u8, wall_ms: f64) -> Self {
        const LN_10: f64 = std::f64::consts::LN_10;
        Row {
            m: est.params.m,
            method: est.method.name().to_string(),
            order,
            log10_g: Some(est.log_value / LN_10),
            ratio: Some(est.ratio),
            lo_log10: est.interval.map(|(lo, _)| lo / LN_10),
            hi_log10: est.interval.map(|(_, hi)| hi / LN_10),
            bins: est.params.bins,
            samples: est.params.samples,
            replicates: est.params.replicates,
            seed: est.params.seed,
            wall_ms,
            error: None,
        }
    }

    pub fn from_error(m: u32, method: &str, order: u8, code: &str, wall_ms: f64) -> Self {
        Row {
            m,
            method: method.to_string(),
            order,
            log10_g: None,
            ratio: None,
            lo_log10: None,
            hi_log10: None,
            bins: None,
            samples: None,
            replicates: None,
            seed: None,
            wall_ms,
            error: Some(code.to_string()),
        }
    }

    pub fn to_csv(&self) -> String {
        fn num(v: Option<f64>) -> String {
            v.map(|x| format!("{x:.10}")).unwrap_or_default()
        }
        fn sci(v: Option<f64>) -> String {
            v.map(|x| format!("{x:.12e}")).unwrap_or_default()
        }
        fn int<T: ToString>(v: Option<T>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{:.3},{}",
            self.m,
            self.method,
            self.order,
            num(self.log10_g),
            sci(self.ratio),
            num(self.lo_log10),
            num(self.hi_log10),
            int(self.bins),
            int(self.samples),
            int(self.replicates),
            int(self.seed),
            self.wall_ms,
            self.error.as_deref().unwrap_or_default(),
        )
    }

    pub fn parse_csv_line(line: &str, header: &[&str]) -> anyhow::Result<Row> {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != header.len() {
            bail!(
                "row has {} fields, header has {}: {line}",
                fields.len(),
                header.len()
            );
        }
        let get = |name: &str| -> anyhow::Result<&str> {
            header
                .iter()
                .position(|h| *h == name)
                .map(|i| fields[i])
                .with_context(|| format!("missing column {name}"))
        };
        let opt_f64 = |s: &str| -> Option<f64> {
            if s.is_empty() {
                None
            } else {
                s.parse().ok()
            }
        };
        Ok(Row {
            m: get("m")?.parse().context("m column")?,
            method: get("method")?.to_string(),
            order: get("order")?.parse().context("order column")?,
            log10_g: opt_f64(get("log10_G")?),
            ratio: opt_f64(get("ratio")?),
            lo_log10: opt_f64(get("lo_log10")?),
            hi_log10: opt_f64(get("hi_log10")?),
            bins: get("N")?.parse().ok(),
            samples: get("S")?.parse().ok(),
            replicates: get("T")?.parse().ok(),
            seed: get("seed")?.parse().ok(),
            wall_ms: get("wall_ms")?.parse().unwrap_or(0.0),
            error: match get("error")? {
                "" => None,
                e => Some(e.to_string()),
            },
        })
    }

    /// Human-readable one-liner; with `ratio_first` the figures' G/n^m leads.
    pub fn to_human(&self, ratio_first: bool) -> String {
        let mut parts = vec![format!("method={}", self.method), format!("m={}", self.m)];
        parts.push(format!("order={}", self.order));
        if let Some(e) = &self.error {
            parts.push(format!("error={e}"));
        } else {
            let value_cols: Vec<String> = if ratio_first {
                vec![
                    format!("ratio={:.6e}", self.ratio.unwrap_or(f64::NAN)),
                    format!("log10_G={:.6}", self.log10_g.unwrap_or(f64::NAN)),
                ]
            } else {
                vec![
                    format!("log10_G={:.6}", self.log10_g.unwrap_or(f64::NAN)),
                    format!("ratio={:.6e}", self.ratio.unwrap_or(f64::NAN)),
                ]
            };
            parts.extend(value_cols);
            if let (Some(lo), Some(hi)) = (self.lo_log10, self.hi_log10) {
                parts.push(format!("interval_log10=[{lo:.6}, {hi:.6}]"));
            }
        }
        if let Some(n) = self.bins {
            parts.push(format!("N={n}"));
        }
        if let Some(s) = self.samples {
            parts.push(format!("S={s}"));
        }
        if let Some(t) = self.replicates {
            parts.push(format!("T={t}"));
        }
        if let Some(s) = self.seed {
            parts.push(format!("seed={s}"));
        }
        parts.push(format!("wall_ms={:.3}", self.wall_ms));
        parts.join(" ")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Human,
    Csv,
    Json,
}

pub fn render(rows: &[Row], format: OutputFormat, ratio_first: bool) -> String {
    match format {
        OutputFormat::Human => {
            let mut out = String::new();
            for r in rows {
                out.push_str(&r.to_human(ratio_first));
                out.push('\n');
            }
            out
        }
        OutputFormat::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for r in rows {
                out.push_str(&r.to_csv());
                out.push('\n');
            }
            out
        }
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(rows).expect("rows serialize");
            s.push('\n');
            s
        }
    }
}

pub fn parse_csv(text: &str) -> anyhow::Result<Vec<Row>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header_line = lines.next().context("empty CSV input")?;
    let header: Vec<&str> = header_line.split(',').collect();
    if !header.contains(&"m") || !header.contains(&"ratio") || !header.contains(&"method") {
        bail!("unrecognized CSV header: {header_line}");
    }
    lines.map(|l| Row::parse_csv_line(l, &header)).collect()
}
