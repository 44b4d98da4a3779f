//! `guesswork`: estimate the expected number of sequential guesses needed to
//! identify a word drawn from a first- or second-order language model.

mod rows;
mod run;

use std::io::Read;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use guesswork::*;
use rayon::prelude::*;

use rows::{parse_csv, render, OutputFormat, Row};
use run::{load_model, run_method, LoadedModel, RunParams};

#[derive(Parser)]
#[command(
    name = "guesswork",
    about = "Guesswork estimation for probabilistic language models",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ModelArgs {
    /// First-order model: probability file (one per line, # comments) or `uniform:N`
    #[arg(long, value_name = "FILE|uniform:N")]
    dist: Option<String>,
    /// Second-order model: digram count file, or `english` for the bundled table
    #[arg(long, value_name = "FILE|english")]
    digram: Option<String>,
    /// Treat --dist entries as weights and normalize them
    #[arg(long)]
    normalize: bool,
}

impl ModelArgs {
    fn load(&self) -> anyhow::Result<LoadedModel> {
        load_model(self.dist.as_deref(), self.digram.as_deref(), self.normalize)
    }
}

#[derive(Args)]
struct ParamArgs {
    /// Subranges per symbol (N)
    #[arg(long = "bins", default_value_t = 64)]
    bins: u32,
    /// Samples per unit word length (S)
    #[arg(long = "samples", default_value_t = 100_000)]
    samples: u64,
    /// Replicate count (T)
    #[arg(long = "replicates", default_value_t = 20)]
    replicates: u32,
    /// RNG seed
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Logarithm base for entropies: 2, e or 10
    #[arg(long, default_value = "e")]
    base: String,
}

impl ParamArgs {
    fn to_run_params(&self) -> anyhow::Result<RunParams> {
        Ok(RunParams {
            bins: self.bins,
            samples: self.samples,
            replicates: self.replicates,
            seed: self.seed,
            cap: enum_cap(),
            base: parse_base(&self.base)?,
        })
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Output format
    #[arg(long, value_parser = ["human", "csv", "json"], default_value = "human")]
    format: String,
    /// Write output to a file instead of stdout
    #[arg(long, value_name = "FILE")]
    out: Option<String>,
    /// Lead with the ratio G/n^m in human-readable output
    #[arg(long)]
    ratio: bool,
}

impl OutputArgs {
    fn format(&self) -> OutputFormat {
        match self.format.as_str() {
            "csv" => OutputFormat::Csv,
            "json" => OutputFormat::Json,
            _ => OutputFormat::Human,
        }
    }

    fn emit(&self, text: &str) -> anyhow::Result<()> {
        match &self.out {
            Some(path) => std::fs::write(path, text).with_context(|| format!("writing {path}")),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Exact guesswork by full enumeration (closed form in order 0)
    Exact {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        order: Option<u8>,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Histogram quantification estimate with its rigorous interval
    Quantify {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        order: Option<u8>,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Replicated random-selection estimate with a 99% confidence interval
    Sample {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        order: Option<u8>,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Normal-approximation estimates (binned, integral, erf, leading term)
    Normal {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        order: Option<u8>,
        /// Which members of the family to evaluate
        #[arg(long, value_parser = ["binned", "integral", "erf", "leading", "all"], default_value = "all")]
        variant: String,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Massey and Arikan lower bounds and the entropy ansatz
    Bounds {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        order: Option<u8>,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Word entropy of order 0, 1 or 2
    Entropy {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        order: Option<u8>,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Stationary distribution of a digram chain
    Stationary {
        /// Digram count file, or `english` for the bundled table
        #[arg(long, value_name = "FILE|english")]
        digram: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evaluate methods across a range of word lengths
    Sweep {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "m-min")]
        m_min: u32,
        #[arg(long = "m-max")]
        m_max: u32,
        /// Comma-separated methods: exact, quantify, sample, normal-binned,
        /// normal-integral, normal-erf, leading-term, massey, arikan,
        /// entropy-ansatz
        #[arg(long, value_name = "LIST")]
        method: String,
        /// Comma-separated orders (defaults to every order the model supports)
        #[arg(long, value_name = "LIST")]
        order: Option<String>,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Fit A·B^m·m^(-1/2) to a sweep series
    Fit {
        /// CSV input path, or `-` for stdin
        #[arg(long, value_name = "FILE|-")]
        input: String,
        #[arg(long = "m-min")]
        m_min: u32,
        #[arg(long = "m-max")]
        m_max: u32,
        /// Method to select when the series contains several
        #[arg(long)]
        method: Option<String>,
        /// Order to select when the series contains several
        #[arg(long)]
        order: Option<u8>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn parse_base(s: &str) -> anyhow::Result<f64> {
    match s {
        "2" => Ok(2.0),
        "e" => Ok(std::f64::consts::E),
        "10" => Ok(10.0),
        other => bail!("unsupported base {other}; use 2, e or 10"),
    }
}

fn enum_cap() -> u64 {
    std::env::var("GUESSWORK_ENUM_CAP")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_ENUM_CAP)
}

fn resolve_order(model: &LoadedModel, requested: Option<u8>) -> anyhow::Result<u8> {
    let order = requested.unwrap_or_else(|| model.default_order());
    if !model.valid_orders().contains(&order) {
        bail!(
            "order {order} is not available for this model (valid: {:?})",
            model.valid_orders()
        );
    }
    Ok(order)
}

/// Runs a fixed method set at one word length and renders the rows.
fn evaluate_cmd(
    model: &ModelArgs,
    methods: &[Method],
    m: u32,
    order: Option<u8>,
    params: &ParamArgs,
    output: &OutputArgs,
) -> anyhow::Result<ExitCode> {
    let model = model.load()?;
    let order = resolve_order(&model, order)?;
    let p = params.to_run_params()?;
    let rows: Vec<Row> = methods
        .iter()
        .map(|&method| run_method(&model, method, order, m, &p))
        .collect();
    output.emit(&render(&rows, output.format(), output.ratio))?;
    Ok(exit_for(&rows))
}

fn exit_for(rows: &[Row]) -> ExitCode {
    if rows.iter().any(|r| r.error.is_some()) {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn cmd_sweep(
    model_args: &ModelArgs,
    m_min: u32,
    m_max: u32,
    method_list: &str,
    order_list: Option<&str>,
    params: &ParamArgs,
    output: &OutputArgs,
) -> anyhow::Result<ExitCode> {
    if m_min < 1 || m_min > m_max {
        bail!("need 1 <= m-min <= m-max");
    }
    let methods: Vec<Method> = method_list
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| Method::from_name(s.trim()).with_context(|| format!("unknown method {s}")))
        .collect::<anyhow::Result<_>>()?;
    if methods.is_empty() {
        bail!("the method set must not be empty");
    }
    let model = model_args.load()?;
    let orders: Vec<u8> = match order_list {
        Some(list) => {
            let parsed: Vec<u8> = list
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.trim().parse().context("orders must be 0, 1 or 2"))
                .collect::<anyhow::Result<_>>()?;
            for o in &parsed {
                if !model.valid_orders().contains(o) {
                    bail!("order {o} is not available for this model");
                }
            }
            parsed
        }
        None => model.default_sweep_orders(),
    };
    if orders.is_empty() {
        bail!("the order set must not be empty");
    }
    let p = params.to_run_params()?;

    // grid in deterministic output order: ascending m, then method enum
    // order, then order; computed in parallel, emitted in order
    let mut grid = Vec::new();
    for m in m_min..=m_max {
        for (mi, &method) in Method::ALL.iter().enumerate() {
            if !methods.contains(&method) {
                continue;
            }
            for &order in &orders {
                grid.push((m, mi, order, method));
            }
        }
    }
    let mut rows: Vec<((u32, usize, u8), Row)> = grid
        .par_iter()
        .map(|&(m, mi, order, method)| ((m, mi, order), run_method(&model, method, order, m, &p)))
        .collect();
    rows.sort_by_key(|r| r.0);
    let rows: Vec<Row> = rows.into_iter().map(|(_, r)| r).collect();

    output.emit(&render(&rows, output.format(), output.ratio))?;
    Ok(exit_for(&rows))
}

fn cmd_fit(
    input: &str,
    m_min: u32,
    m_max: u32,
    method: Option<&str>,
    order: Option<u8>,
    output: &OutputArgs,
) -> anyhow::Result<ExitCode> {
    let text = if input == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        buf
    } else {
        std::fs::read_to_string(input).with_context(|| format!("reading {input}"))?
    };
    let rows = parse_csv(&text)?;
    let mut candidates: Vec<&Row> = rows.iter().filter(|r| r.error.is_none()).collect();

    let methods_present: Vec<String> = {
        let mut v: Vec<&str> = candidates.iter().map(|r| r.method.as_str()).collect();
        v.sort_unstable();
        v.dedup();
        v.into_iter().map(String::from).collect()
    };
    let selected_method = match method {
        Some(m) => m.to_string(),
        None if methods_present.len() == 1 => methods_present[0].clone(),
        None => bail!("series contains several methods ({methods_present:?}); pass --method"),
    };
    candidates.retain(|r| r.method == selected_method);

    let orders_present: Vec<u8> = {
        let mut v: Vec<u8> = candidates.iter().map(|r| r.order).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let selected_order = match order {
        Some(o) => o,
        None if orders_present.len() == 1 => orders_present[0],
        None => bail!("series contains several orders ({orders_present:?}); pass --order"),
    };
    candidates.retain(|r| r.order == selected_order);

    let series: Vec<(u32, f64)> = candidates
        .iter()
        .filter_map(|r| r.ratio.map(|ratio| (r.m, ratio.ln())))
        .collect();
    let fit = fit_power_law(&series, (m_min, m_max))?;
    let points = series
        .iter()
        .filter(|(m, _)| *m >= m_min && *m <= m_max)
        .count();

    let text = match output.format() {
        OutputFormat::Json => {
            let v = serde_json::json!({
                "A": fit.a,
                "B": fit.b,
                "residual": fit.residual,
                "m_min": m_min,
                "m_max": m_max,
                "method": selected_method,
                "order": selected_order,
                "points": points,
            });
            format!("{}\n", serde_json::to_string_pretty(&v)?)
        }
        _ => format!(
            "A = {:.6}\nB = {:.6}\nresidual = {:.6}\nG/n^m ~= {:.4} * {:.4}^m * m^(-1/2)   \
             ({points} {selected_method} points, {m_min} <= m <= {m_max})\n",
            fit.a, fit.b, fit.residual, fit.a, fit.b
        ),
    };
    output.emit(&text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_stationary(digram: &str, output: &OutputArgs) -> anyhow::Result<ExitCode> {
    let table = if digram == "english" {
        DigramCountTable::bundled_english()
    } else {
        let text = std::fs::read_to_string(digram).with_context(|| format!("reading {digram}"))?;
        DigramCountTable::parse(&text)?
    };
    let source = table.normalize_rows()?;
    let p = source.initial();
    let residual = model::fixed_point_residual(source.transitions(), p);

    let text = match output.format() {
        OutputFormat::Json => {
            let v = serde_json::json!({
                "labels": table.labels(),
                "p": p,
                "residual": residual,
            });
            format!("{}\n", serde_json::to_string_pretty(&v)?)
        }
        _ => {
            let mut s = String::new();
            for (label, prob) in table.labels().iter().zip(p) {
                s.push_str(&format!("{label} {prob:.12}\n"));
            }
            s.push_str(&format!("sum {:.12}\n", p.iter().sum::<f64>()));
            s.push_str(&format!("residual {residual:.3e}\n"));
            s
        }
    };
    output.emit(&text)?;
    if residual < 1e-10 {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

fn cmd_entropy(
    model_args: &ModelArgs,
    m: u32,
    order: Option<u8>,
    params: &ParamArgs,
    output: &OutputArgs,
) -> anyhow::Result<ExitCode> {
    let model = model_args.load()?;
    let order = resolve_order(&model, order)?;
    let base = parse_base(&params.base)?;
    let h = run::entropy_row(&model, order, m, base)?;
    let text = match output.format() {
        OutputFormat::Json => {
            let v = serde_json::json!({
                "order": h.order,
                "m": h.word_length,
                "n": h.alphabet_size,
                "base": params.base,
                "value": h.value,
                "nats": h.nats(),
            });
            format!("{}\n", serde_json::to_string_pretty(&v)?)
        }
        _ => format!(
            "order={} m={} n={} base={} H={:.9}\n",
            h.order, h.word_length, h.alphabet_size, params.base, h.value
        ),
    };
    output.emit(&text)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Exact {
            model,
            m,
            order,
            params,
            output,
        } => evaluate_cmd(model, &[Method::Exact], *m, *order, params, output),
        Command::Quantify {
            model,
            m,
            order,
            params,
            output,
        } => evaluate_cmd(model, &[Method::Quantify], *m, *order, params, output),
        Command::Sample {
            model,
            m,
            order,
            params,
            output,
        } => evaluate_cmd(model, &[Method::Sample], *m, *order, params, output),
        Command::Normal {
            model,
            m,
            order,
            variant,
            params,
            output,
        } => {
            let methods: Vec<Method> = match variant.as_str() {
                "binned" => vec![Method::NormalBinned],
                "integral" => vec![Method::NormalIntegral],
                "erf" => vec![Method::NormalErf],
                "leading" => vec![Method::LeadingTerm],
                _ => vec![
                    Method::NormalBinned,
                    Method::NormalIntegral,
                    Method::NormalErf,
                    Method::LeadingTerm,
                ],
            };
            evaluate_cmd(model, &methods, *m, *order, params, output)
        }
        Command::Bounds {
            model,
            m,
            order,
            params,
            output,
        } => evaluate_cmd(
            model,
            &[Method::Massey, Method::Arikan, Method::EntropyAnsatz],
            *m,
            *order,
            params,
            output,
        ),
        Command::Entropy {
            model,
            m,
            order,
            params,
            output,
        } => cmd_entropy(model, *m, *order, params, output),
        Command::Stationary { digram, output } => cmd_stationary(digram, output),
        Command::Sweep {
            model,
            m_min,
            m_max,
            method,
            order,
            params,
            output,
        } => cmd_sweep(
            model,
            *m_min,
            *m_max,
            method,
            order.as_deref(),
            params,
            output,
        ),
        Command::Fit {
            input,
            m_min,
            m_max,
            method,
            order,
            output,
        } => cmd_fit(input, *m_min, *m_max, method.as_deref(), *order, output),
    }
}
