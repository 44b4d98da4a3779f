//! Model loading and per-method evaluation shared by the subcommands.

use std::time::Instant;

use anyhow::{bail, Context};
use guesswork::histogram::Backend;
use guesswork::*;

use crate::rows::Row;

pub struct RunParams {
    pub bins: u32,
    pub samples: u64,
    pub replicates: u32,
    pub seed: u64,
    pub cap: u64,
    pub base: f64,
}

pub enum LoadedModel {
    Dist(SymbolDistribution),
    Markov(MarkovSource),
}

impl LoadedModel {
    pub fn alphabet_size(&self) -> usize {
        match self {
            LoadedModel::Dist(d) => d.len(),
            LoadedModel::Markov(s) => s.len(),
        }
    }

    /// Orders this model supports.
    pub fn valid_orders(&self) -> Vec<u8> {
        match self {
            LoadedModel::Dist(_) => vec![0, 1],
            LoadedModel::Markov(_) => vec![0, 1, 2],
        }
    }

    /// Orders a sweep runs when none are requested: the model's own order
    /// for a plain distribution, every order for a digram chain.
    pub fn default_sweep_orders(&self) -> Vec<u8> {
        match self {
            LoadedModel::Dist(_) => vec![1],
            LoadedModel::Markov(_) => vec![0, 1, 2],
        }
    }

    pub fn default_order(&self) -> u8 {
        match self {
            LoadedModel::Dist(_) => 1,
            LoadedModel::Markov(_) => 2,
        }
    }

    /// First-order view for a given order: uniform for order 0, the
    /// distribution itself or the chain's stationary marginal for order 1.
    pub fn first_order_view(&self, order: u8) -> anyhow::Result<SymbolDistribution> {
        match (order, self) {
            (0, _) => Ok(SymbolDistribution::uniform(self.alphabet_size())?),
            (1, LoadedModel::Dist(d)) => Ok(d.clone()),
            (1, LoadedModel::Markov(s)) => Ok(s.marginal_distribution()?),
            _ => bail!("order {order} has no first-order view for this model"),
        }
    }

    pub fn markov(&self) -> anyhow::Result<&MarkovSource> {
        match self {
            LoadedModel::Markov(s) => Ok(s),
            LoadedModel::Dist(_) => bail!("order 2 requires a digram model (--digram)"),
        }
    }
}

/// Loads `--dist FILE | uniform:N` / `--digram FILE|english`.
pub fn load_model(
    dist: Option<&str>,
    digram: Option<&str>,
    normalize: bool,
) -> anyhow::Result<LoadedModel> {
    match (dist, digram) {
        (Some(_), Some(_)) => bail!("--dist and --digram are mutually exclusive"),
        (None, None) => bail!("one of --dist or --digram is required"),
        (Some(spec), None) => {
            if let Some(n) = spec.strip_prefix("uniform:") {
                let n: usize = n.parse().context("uniform:N requires an integer N")?;
                Ok(LoadedModel::Dist(SymbolDistribution::uniform(n)?))
            } else {
                let text = std::fs::read_to_string(spec)
                    .with_context(|| format!("reading distribution file {spec}"))?;
                Ok(LoadedModel::Dist(SymbolDistribution::parse(
                    &text, normalize,
                )?))
            }
        }
        (None, Some(spec)) => {
            let table = if spec == "english" {
                DigramCountTable::bundled_english()
            } else {
                let text = std::fs::read_to_string(spec)
                    .with_context(|| format!("reading digram file {spec}"))?;
                DigramCountTable::parse(&text)?
            };
            Ok(LoadedModel::Markov(table.normalize_rows()?))
        }
    }
}

fn error_code(err: &Error) -> &'static str {
    match err {
        Error::EnumerationCapExceeded { .. } => "cap-exceeded",
        Error::SigmaZero => "sigma-zero",
        Error::AsymptoticInvalid => "asymptotic-invalid",
        Error::CountOverflow { .. } => "count-overflow",
        Error::ClosedFormDomain { .. } => "closed-form-domain",
        Error::BackendMismatch { .. } => "backend-mismatch",
        Error::OrderRequiresMarkov => "unsupported",
        Error::AllZeroSamples => "all-zero-samples",
        Error::TooFewReplicates => "too-few-replicates",
        _ => "error",
    }
}

/// Evaluates one (method, order, m) cell, never panicking: failures become
/// error rows so sweeps continue.
pub fn run_method(model: &LoadedModel, method: Method, order: u8, m: u32, p: &RunParams) -> Row {
    let t0 = Instant::now();
    let outcome = evaluate(model, method, order, m, p);
    let wall_ms = t0.elapsed().as_secs_f64() * 1e3;
    match outcome {
        Ok(est) => Row::from_estimate(&est, order, wall_ms),
        Err(RunError::Lib(e)) => Row::from_error(m, method.name(), order, error_code(&e), wall_ms),
        Err(RunError::Unsupported) => {
            Row::from_error(m, method.name(), order, "unsupported", wall_ms)
        }
    }
}

enum RunError {
    Lib(Error),
    Unsupported,
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Lib(e)
    }
}

fn evaluate(
    model: &LoadedModel,
    method: Method,
    order: u8,
    m: u32,
    p: &RunParams,
) -> std::result::Result<GuessworkEstimate, RunError> {
    let n = model.alphabet_size();
    let first_view = |order: u8| -> std::result::Result<SymbolDistribution, RunError> {
        model
            .first_order_view(order)
            .map_err(|_| RunError::Unsupported)
    };
    match method {
        Method::Exact => match order {
            0 => Ok(guesswork_uniform(n, m)),
            1 => Ok(exact::guesswork_exact_first_capped(
                &first_view(1)?,
                m,
                p.cap,
            )?),
            2 => Ok(exact::guesswork_exact_second_capped(
                model.markov().map_err(|_| RunError::Unsupported)?,
                m,
                p.cap,
            )?),
            _ => Err(RunError::Unsupported),
        },
        Method::Quantify => {
            let hist = match order {
                0 | 1 => {
                    let d = first_view(order)?;
                    let within_cap = exact::within_enumeration_cap(d.len(), m, p.cap);
                    let backend = if within_cap {
                        Backend::Full
                    } else {
                        Backend::Convolve
                    };
                    histogram::histogram_enumerate_capped(
                        ModelRef::First(&d),
                        m,
                        p.bins,
                        backend,
                        p.cap,
                    )?
                }
                2 => {
                    let s = model.markov().map_err(|_| RunError::Unsupported)?;
                    let within_cap = exact::within_enumeration_cap(n, m, p.cap);
                    let backend = if within_cap {
                        Backend::Full
                    } else {
                        Backend::DpChain
                    };
                    histogram::histogram_enumerate_capped(
                        ModelRef::Second(s),
                        m,
                        p.bins,
                        backend,
                        p.cap,
                    )?
                }
                _ => return Err(RunError::Unsupported),
            };
            Ok(guesswork_from_histogram(&hist)?)
        }
        Method::Sample => {
            let est = match order {
                0 | 1 => {
                    let d = first_view(order)?;
                    replicate_estimate(
                        ModelRef::First(&d),
                        m,
                        p.bins,
                        p.samples,
                        p.replicates,
                        p.seed,
                    )?
                }
                2 => {
                    let s = model.markov().map_err(|_| RunError::Unsupported)?;
                    replicate_estimate(
                        ModelRef::Second(s),
                        m,
                        p.bins,
                        p.samples,
                        p.replicates,
                        p.seed,
                    )?
                }
                _ => return Err(RunError::Unsupported),
            };
            Ok(est.estimate)
        }
        Method::NormalBinned | Method::NormalIntegral | Method::NormalErf | Method::LeadingTerm => {
            let nm = match order {
                0 | 1 => count_moments_analytic(&first_view(order)?),
                2 => {
                    let s = model.markov().map_err(|_| RunError::Unsupported)?;
                    count_moments_sampled(ModelRef::Second(s), p.samples.max(100), m, p.seed)?
                }
                _ => return Err(RunError::Unsupported),
            };
            let est = match method {
                Method::NormalBinned => guesswork_normal_binned(&nm, m, p.bins)?,
                Method::NormalIntegral => guesswork_normal_integral(&nm, m)?,
                Method::NormalErf => guesswork_normal_closed(&nm, m)?,
                Method::LeadingTerm => guesswork_leading_term(&nm, m)?,
                _ => unreachable!(),
            };
            Ok(est)
        }
        Method::Massey => {
            let h = entropy_for(model, order, m, p.base)?;
            Ok(massey_lower(&h))
        }
        Method::Arikan => match order {
            0 | 1 => Ok(arikan_lower(&first_view(order)?, m)),
            _ => Err(RunError::Unsupported),
        },
        Method::EntropyAnsatz => {
            let h = entropy_for(model, order, m, p.base)?;
            Ok(entropy_ansatz(&h))
        }
    }
}

fn entropy_for(
    model: &LoadedModel,
    order: u8,
    m: u32,
    base: f64,
) -> std::result::Result<EntropyValue, RunError> {
    match order {
        0 => Ok(entropy_order0(model.alphabet_size(), m, base)),
        1 => {
            let d = model
                .first_order_view(1)
                .map_err(|_| RunError::Unsupported)?;
            Ok(entropy_order1(&d, m, base))
        }
        2 => Ok(entropy_order2(
            model.markov().map_err(|_| RunError::Unsupported)?,
            m,
            base,
        )),
        _ => Err(RunError::Unsupported),
    }
}

pub fn entropy_row(
    model: &LoadedModel,
    order: u8,
    m: u32,
    base: f64,
) -> anyhow::Result<EntropyValue> {
    entropy_for(model, order, m, base).map_err(|_| anyhow::anyhow!("unsupported order {order}"))
}
