//! `zctiming`: command-line front end for the zc-timing library.
//!
//! Every run resolves its parameters from up to three layers (a `--repro`
//! preset, a `--config` JSON file, then flags; later layers win), computes
//! one table, and writes it as `<out>.csv` and/or a `<out>.json` summary.
//! Outputs are deterministic functions of the resolved parameters, seed
//! included, so reruns are byte-identical.

mod emit;
mod params;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use emit::{fmt_float, write_csv, write_json, Format};
use params::{need, preset, KappaModeSpec, Mode, Params};
use zc_timing::{
    autocorr_mag_sq, autocorr_offset, coprime_roots, critical_offset, error_floor, rank_roots,
    run_experiment, timing_distribution, timing_spectrum, DetectionScenario, FloorRegime,
    HypothesisWindow, KappaMode, PnSequence, SimulationConfig, ZcSequence, DEFAULT_PN_DEGREE,
    DEFAULT_PN_TAPS,
};

pub enum AppError {
    Usage(String),
    Compute(String),
}

fn usage(e: zc_timing::Error) -> AppError {
    AppError::Usage(e.to_string())
}

fn compute(e: zc_timing::Error) -> AppError {
    AppError::Compute(e.to_string())
}

#[derive(Parser)]
#[command(
    name = "zctiming",
    version,
    about = "Timing detection with Zadoff-Chu sequences under frequency offset",
    after_help = "Exit codes: 0 success, 2 invalid arguments or config, 3 runtime failure.\n\
                  RAYON_NUM_THREADS caps the worker pool (default: all cores)."
)]
struct Cli {
    /// Load a stored preset (table1, fig3, fig4, fig6 .. fig13); runs
    /// without a subcommand and flags override preset fields
    #[arg(long, value_name = "PRESET")]
    repro: Option<String>,

    #[command(flatten)]
    common: CommonArgs,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args)]
struct CommonArgs {
    /// Sequence period N (odd, at least 3)
    #[arg(short = 'N', long = "length", global = true, value_name = "N")]
    length: Option<usize>,

    /// Sequence root, coprime with N
    #[arg(long, global = true)]
    mu: Option<usize>,

    /// Hypothesis window size W
    #[arg(short = 'W', long = "window", global = true, value_name = "W")]
    window: Option<usize>,

    /// Frequency offset as a fraction of the carrier spacing
    #[arg(long, global = true, value_name = "DL", allow_negative_numbers = true)]
    delta_lambda: Option<f64>,

    /// Per-sample SNR in dB
    #[arg(long, global = true, value_name = "DB", allow_negative_numbers = true)]
    snr_db: Option<f64>,

    /// Monte Carlo trial count (default 10000)
    #[arg(long, global = true)]
    trials: Option<u64>,

    /// Monte Carlo seed (default 0)
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Cyclic prefix length (default W - 1)
    #[arg(long = "n-cp", global = true, value_name = "N_CP")]
    n_cp: Option<usize>,

    /// Pin the arrival delay instead of drawing it uniformly
    #[arg(long, global = true, value_name = "KAPPA")]
    kappa_fixed: Option<usize>,

    /// Frequency sweep lower edge for autocorr (default -3)
    #[arg(long, global = true, value_name = "DL", allow_negative_numbers = true)]
    dl_min: Option<f64>,

    /// Frequency sweep upper edge for autocorr (default 3)
    #[arg(long, global = true, value_name = "DL", allow_negative_numbers = true)]
    dl_max: Option<f64>,

    /// Frequency sweep step for autocorr (default 0.05)
    #[arg(long, global = true, value_name = "DL")]
    dl_step: Option<f64>,

    /// JSON parameter file; flags override its values
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<std::path::PathBuf>,

    /// Output stem; files land at <OUT>.csv and <OUT>.json
    #[arg(long, global = true, value_name = "OUT")]
    out: Option<String>,

    /// Which of the two files to write (default both)
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

impl CommonArgs {
    fn params(&self) -> Params {
        Params {
            n: self.length,
            mu: self.mu,
            w: self.window,
            delta_lambda: self.delta_lambda,
            eta_db: self.snr_db,
            trials: self.trials,
            seed: self.seed,
            n_cp: self.n_cp,
            kappa_fixed: self.kappa_fixed,
            dl_min: self.dl_min,
            dl_max: self.dl_max,
            dl_step: self.dl_step,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Emit sequence samples as CSV rows (n, re, im)
    Generate(GenerateArgs),
    /// Autocorrelation magnitude over a (shift, frequency) offset grid
    Autocorr,
    /// Critical-offset spectrum of one root inside one window
    Spectrum,
    /// Analytic timing distribution and error probability
    Analyze,
    /// Seeded Monte Carlo detection run
    Simulate,
    /// Rank candidate roots by their spectra
    Select(SelectArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Zadoff-Chu sequence of length N and root mu
    #[arg(long)]
    zc: bool,

    /// Binary m-sequence (+-1 symbols) truncated to length N
    #[arg(long)]
    pn: bool,

    /// Register size for --pn (default 25)
    #[arg(long)]
    degree: Option<u32>,

    /// Feedback taps for --pn, comma separated (default 25,3)
    #[arg(long, value_delimiter = ',')]
    taps: Option<Vec<u32>>,
}

#[derive(Args)]
struct SelectArgs {
    /// Frequency uncertainty bound used for the near-mass tiebreak
    #[arg(long, allow_negative_numbers = true)]
    freq_bound: Option<f64>,

    /// Comma-separated roots, or "all" for every root coprime with N
    #[arg(long)]
    candidates: Option<String>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(AppError::Compute(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    let flag_params = cli.common.params();
    let file_params = match &cli.common.config {
        Some(path) => params::load_file(path)?,
        None => Params::default(),
    };
    let format = cli.common.format.unwrap_or(Format::Both);

    if let Some(token) = &cli.repro {
        if cli.command.is_some() {
            return Err(AppError::Usage(
                "--repro picks its own command; drop the subcommand".into(),
            ));
        }
        let (mode, stored) =
            preset(token).ok_or_else(|| AppError::Usage(format!("unknown preset `{token}`")))?;
        let p = stored.overlay(file_params).overlay(flag_params);
        let stem = cli.common.out.clone().unwrap_or_else(|| token.clone());
        return match mode {
            Mode::Table => cmd_table(p, format, &stem),
            Mode::Autocorr => cmd_autocorr(p, format, &stem),
            Mode::Spectrum => cmd_spectrum(p, format, &stem),
            Mode::Analyze => cmd_analyze(p, format, &stem),
            Mode::Simulate => cmd_simulate(p, format, &stem),
        };
    }

    let command = cli
        .command
        .ok_or_else(|| AppError::Usage("give a subcommand or --repro <preset>".into()))?;
    let p = file_params.overlay(flag_params);
    let stem = |default: &str| cli.common.out.clone().unwrap_or_else(|| default.into());
    match command {
        Command::Generate(args) => cmd_generate(&args, p, format, &stem("generate")),
        Command::Autocorr => cmd_autocorr(p, format, &stem("autocorr")),
        Command::Spectrum => cmd_spectrum(p, format, &stem("spectrum")),
        Command::Analyze => cmd_analyze(p, format, &stem("analyze")),
        Command::Simulate => cmd_simulate(p, format, &stem("simulate")),
        Command::Select(args) => cmd_select(&args, p, format, &stem("select")),
    }
}

#[derive(Serialize)]
struct GenerateSummary {
    kind: &'static str,
    #[serde(rename = "N")]
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    mu: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    degree: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    taps: Option<Vec<u32>>,
    rows: usize,
}

fn cmd_generate(
    args: &GenerateArgs,
    p: Params,
    format: Format,
    stem: &str,
) -> Result<(), AppError> {
    if args.zc == args.pn {
        return Err(AppError::Usage("pick exactly one of --zc or --pn".into()));
    }
    let n = need(p.n, "N")?;
    let (samples, summary) = if args.zc {
        let mu = need(p.mu, "mu")?;
        let seq = ZcSequence::new(n, mu).map_err(usage)?;
        let summary = GenerateSummary {
            kind: "zc",
            n,
            mu: Some(mu),
            degree: None,
            taps: None,
            rows: n,
        };
        (seq.samples().to_vec(), summary)
    } else {
        let degree = args.degree.unwrap_or(DEFAULT_PN_DEGREE);
        let taps = args.taps.clone().unwrap_or_else(|| DEFAULT_PN_TAPS.to_vec());
        let seq = PnSequence::new(degree, &taps, n).map_err(usage)?;
        let summary = GenerateSummary {
            kind: "pn",
            n,
            mu: None,
            degree: Some(degree),
            taps: Some(taps),
            rows: n,
        };
        (seq.symbols().to_vec(), summary)
    };
    if format.wants_csv() {
        let rows: Vec<String> = samples
            .iter()
            .enumerate()
            .map(|(i, s)| format!("{i},{},{}", fmt_float(s.re), fmt_float(s.im)))
            .collect();
        write_csv(stem, "n,re,im", &rows)?;
    }
    if format.wants_json() {
        write_json(stem, &summary)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct AutocorrSummary {
    #[serde(rename = "N")]
    n: usize,
    mu: usize,
    #[serde(rename = "W")]
    w: usize,
    dl_min: f64,
    dl_max: f64,
    dl_step: f64,
    rows: usize,
}

fn cmd_autocorr(p: Params, format: Format, stem: &str) -> Result<(), AppError> {
    let n = need(p.n, "N")?;
    let mu = need(p.mu, "mu")?;
    let w = need(p.w, "W")?;
    let lo = p.dl_min.unwrap_or(-3.0);
    let hi = p.dl_max.unwrap_or(3.0);
    let step = p.dl_step.unwrap_or(0.05);
    if !(step.is_finite() && step > 0.0 && hi >= lo) {
        return Err(AppError::Usage(
            "need dl-max >= dl-min and a positive dl-step".into(),
        ));
    }
    HypothesisWindow::new(n, w).map_err(usage)?;
    let seq = ZcSequence::new(n, mu).map_err(usage)?;

    let span = w as i64 - 1;
    let steps = ((hi - lo) / step).round() as usize;
    let mut rows = Vec::new();
    for dk in -span..=span {
        for j in 0..=steps {
            let dl = lo + j as f64 * step;
            let closed = autocorr_mag_sq(n, mu, dk, dl);
            let brute = autocorr_offset(seq.samples(), dk, dl).norm_sqr();
            rows.push(format!(
                "{dk},{},{},{}",
                fmt_float(dl),
                fmt_float(closed),
                fmt_float(brute)
            ));
        }
    }
    if format.wants_csv() {
        write_csv(stem, "delta_kappa,delta_lambda,mag_sq_closed,mag_sq_brute", &rows)?;
    }
    if format.wants_json() {
        let summary = AutocorrSummary {
            n,
            mu,
            w,
            dl_min: lo,
            dl_max: hi,
            dl_step: step,
            rows: rows.len(),
        };
        write_json(stem, &summary)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SpectrumSummary {
    #[serde(rename = "N")]
    n: usize,
    mu: usize,
    #[serde(rename = "W")]
    w: usize,
    min_critical_offset: Option<i64>,
    floor_above_half: f64,
    floor_at_half: f64,
}

fn cmd_spectrum(p: Params, format: Format, stem: &str) -> Result<(), AppError> {
    let n = need(p.n, "N")?;
    let mu = need(p.mu, "mu")?;
    let w = need(p.w, "W")?;
    let spectrum = timing_spectrum(n, mu, w).map_err(usage)?;
    if format.wants_csv() {
        let rows: Vec<String> = spectrum
            .entries()
            .map(|(key, mag)| format!("{key},{}", fmt_float(mag)))
            .collect();
        write_csv(stem, "delta_lambda_dagger,magnitude", &rows)?;
    }
    if format.wants_json() {
        let summary = SpectrumSummary {
            n,
            mu,
            w,
            min_critical_offset: spectrum.min_abs_key(),
            floor_above_half: error_floor(n, mu, w, FloorRegime::AboveHalf).map_err(usage)?,
            floor_at_half: error_floor(n, mu, w, FloorRegime::AtHalf).map_err(usage)?,
        };
        write_json(stem, &summary)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ScenarioEcho {
    #[serde(rename = "N")]
    n: usize,
    mu: usize,
    #[serde(rename = "W")]
    w: usize,
    delta_lambda: f64,
    eta_db: f64,
}

#[derive(Serialize)]
struct AnalyzeSummary {
    error_probability: f64,
    scenario: ScenarioEcho,
}

fn scenario_from(p: Params) -> Result<DetectionScenario, AppError> {
    let n = need(p.n, "N")?;
    let mu = need(p.mu, "mu")?;
    let w = need(p.w, "W")?;
    let dl = p.delta_lambda.unwrap_or(0.0);
    let db = p.eta_db.unwrap_or(0.0);
    DetectionScenario::from_snr_db(n, mu, w, dl, db).map_err(usage)
}

fn cmd_analyze(p: Params, format: Format, stem: &str) -> Result<(), AppError> {
    let scenario = scenario_from(p)?;
    let dist = timing_distribution(&scenario).map_err(compute)?;
    if format.wants_csv() {
        let rows: Vec<String> = dist
            .entries()
            .map(|(dk, prob)| format!("{dk},{}", fmt_float(prob)))
            .collect();
        write_csv(stem, "delta_kappa,probability", &rows)?;
    }
    if format.wants_json() {
        let summary = AnalyzeSummary {
            error_probability: dist.error_mass(),
            scenario: ScenarioEcho {
                n: scenario.period(),
                mu: scenario.root(),
                w: scenario.hypotheses(),
                delta_lambda: scenario.frequency_offset(),
                eta_db: scenario.snr_db(),
            },
        };
        write_json(stem, &summary)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ConfigEcho {
    #[serde(rename = "N")]
    n: usize,
    mu: usize,
    #[serde(rename = "W")]
    w: usize,
    delta_lambda: f64,
    eta_db: f64,
    #[serde(rename = "N_CP")]
    n_cp: usize,
    trials: u64,
    seed: u64,
    kappa_mode: KappaModeSpec,
}

#[derive(Serialize)]
struct SimulateSummary {
    error_rate: f64,
    stderr: f64,
    config: ConfigEcho,
}

fn cmd_simulate(p: Params, format: Format, stem: &str) -> Result<(), AppError> {
    let scenario = scenario_from(p)?;
    let w = scenario.hypotheses();
    let n_cp = p.n_cp.unwrap_or(w.saturating_sub(1));
    let trials = p.trials.unwrap_or(10_000);
    let seed = p.seed.unwrap_or(0);
    let mode = match p.kappa_fixed {
        Some(k) => KappaMode::Fixed(k),
        None => KappaMode::Uniform,
    };
    let config = SimulationConfig::new(scenario, n_cp, trials, seed, mode).map_err(usage)?;
    let dist = run_experiment(&config).map_err(compute)?;
    if format.wants_csv() {
        let rows: Vec<String> = dist
            .entries()
            .map(|(dk, count)| {
                format!("{dk},{count},{}", fmt_float(dist.frequency(dk)))
            })
            .collect();
        write_csv(stem, "delta_kappa,count,frequency", &rows)?;
    }
    if format.wants_json() {
        let summary = SimulateSummary {
            error_rate: dist.error_rate(),
            stderr: dist.error_stderr(),
            config: ConfigEcho {
                n: scenario.period(),
                mu: scenario.root(),
                w,
                delta_lambda: scenario.frequency_offset(),
                eta_db: scenario.snr_db(),
                n_cp,
                trials,
                seed,
                kappa_mode: match mode {
                    KappaMode::Uniform => KappaModeSpec::Uniform,
                    KappaMode::Fixed(k) => KappaModeSpec::Fixed(k),
                },
            },
        };
        write_json(stem, &summary)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SelectRow {
    mu: usize,
    min_critical_offset: Option<i64>,
    floor: f64,
}

#[derive(Serialize)]
struct SelectSummary {
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "W")]
    w: usize,
    freq_bound: f64,
    ranked: Vec<SelectRow>,
}

fn cmd_select(args: &SelectArgs, p: Params, format: Format, stem: &str) -> Result<(), AppError> {
    let n = need(p.n, "N")?;
    let w = need(p.w, "W")?;
    let freq_bound = need(args.freq_bound, "freq-bound")?;
    let candidates: Vec<usize> = match args.candidates.as_deref() {
        None | Some("all") => coprime_roots(n),
        Some(list) => list
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| AppError::Usage(format!("bad root `{t}` in --candidates")))
            })
            .collect::<Result<_, _>>()?,
    };
    let ranked = rank_roots(n, w, &candidates, freq_bound).map_err(usage)?;
    if format.wants_csv() {
        let rows: Vec<String> = ranked
            .iter()
            .map(|r| {
                let min = r
                    .min_abs_critical_offset()
                    .map(|v| v.to_string())
                    .unwrap_or_default();
                format!("{},{min},{}", r.root(), fmt_float(r.floor_above_half()))
            })
            .collect();
        write_csv(stem, "mu,min_critical_offset,floor", &rows)?;
    }
    if format.wants_json() {
        let summary = SelectSummary {
            n,
            w,
            freq_bound,
            ranked: ranked
                .iter()
                .map(|r| SelectRow {
                    mu: r.root(),
                    min_critical_offset: r.min_abs_critical_offset(),
                    floor: r.floor_above_half(),
                })
                .collect(),
        };
        write_json(stem, &summary)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct TableRow {
    mu: usize,
    delta_kappa: i64,
    delta_lambda_dagger: i64,
}

#[derive(Serialize)]
struct TableSummary {
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "W")]
    w: usize,
    rows: Vec<TableRow>,
}

fn cmd_table(p: Params, format: Format, stem: &str) -> Result<(), AppError> {
    let n = need(p.n, "N")?;
    let w = need(p.w, "W")?;
    let roots = match p.mu {
        Some(mu) => vec![mu],
        None => vec![140, 367],
    };
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    for &mu in &roots {
        for dk in 1..w as i64 {
            let offset = critical_offset(n, mu, dk).map_err(usage)?;
            rows.push(format!("{mu},{dk},{offset}"));
            entries.push(TableRow {
                mu,
                delta_kappa: dk,
                delta_lambda_dagger: offset,
            });
        }
    }
    if format.wants_csv() {
        write_csv(stem, "mu,delta_kappa,delta_lambda_dagger", &rows)?;
    }
    if format.wants_json() {
        write_json(stem, &TableSummary { n, w, rows: entries })?;
    }
    Ok(())
}
