//! Parameter plumbing: stored presets, JSON config files, and the
//! precedence rule gluing them to the flags (preset, then file, then
//! flags; later sources win).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::AppError;

#[derive(Clone, Copy, Debug, Default)]
pub struct Params {
    pub n: Option<usize>,
    pub mu: Option<usize>,
    pub w: Option<usize>,
    pub delta_lambda: Option<f64>,
    pub eta_db: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub n_cp: Option<usize>,
    pub kappa_fixed: Option<usize>,
    pub dl_min: Option<f64>,
    pub dl_max: Option<f64>,
    pub dl_step: Option<f64>,
}

impl Params {
    /// Field-wise merge where `over` wins.
    pub fn overlay(self, over: Params) -> Params {
        Params {
            n: over.n.or(self.n),
            mu: over.mu.or(self.mu),
            w: over.w.or(self.w),
            delta_lambda: over.delta_lambda.or(self.delta_lambda),
            eta_db: over.eta_db.or(self.eta_db),
            trials: over.trials.or(self.trials),
            seed: over.seed.or(self.seed),
            n_cp: over.n_cp.or(self.n_cp),
            kappa_fixed: over.kappa_fixed.or(self.kappa_fixed),
            dl_min: over.dl_min.or(self.dl_min),
            dl_max: over.dl_max.or(self.dl_max),
            dl_step: over.dl_step.or(self.dl_step),
        }
    }
}

pub fn need<T>(v: Option<T>, name: &str) -> Result<T, AppError> {
    v.ok_or_else(|| {
        AppError::Usage(format!(
            "missing parameter {name}: pass a flag, a config file, or a preset"
        ))
    })
}

/// Serialized as a bare `"uniform"` or as `{"fixed": k}`.
#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum KappaModeSpec {
    Uniform,
    Fixed(usize),
}

/// One schema serves `analyze` and `simulate` alike: a scenario-only file
/// is valid for both, and the simulation fields are harmless extras to
/// `analyze`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(rename = "N")]
    n: Option<usize>,
    mu: Option<usize>,
    #[serde(rename = "W")]
    w: Option<usize>,
    delta_lambda: Option<f64>,
    eta_db: Option<f64>,
    #[serde(rename = "N_CP")]
    n_cp: Option<usize>,
    trials: Option<u64>,
    seed: Option<u64>,
    kappa_mode: Option<KappaModeSpec>,
}

pub fn load_file(path: &Path) -> Result<Params, AppError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let file: FileConfig = serde_json::from_str(&text)
        .map_err(|e| AppError::Usage(format!("bad config {}: {e}", path.display())))?;
    Ok(Params {
        n: file.n,
        mu: file.mu,
        w: file.w,
        delta_lambda: file.delta_lambda,
        eta_db: file.eta_db,
        n_cp: file.n_cp,
        trials: file.trials,
        seed: file.seed,
        kappa_fixed: match file.kappa_mode {
            Some(KappaModeSpec::Fixed(k)) => Some(k),
            _ => None,
        },
        ..Params::default()
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Table,
    Autocorr,
    Spectrum,
    Analyze,
    Simulate,
}

/// Stored parameter sets behind `--repro`. Each token is a stable name
/// for one canonical output; flags override individual fields.
pub fn preset(token: &str) -> Option<(Mode, Params)> {
    let base = Params {
        n: Some(839),
        ..Params::default()
    };
    let scenario = |mu, w, dl, db| Params {
        mu: Some(mu),
        w: Some(w),
        delta_lambda: Some(dl),
        eta_db: Some(db),
        ..base
    };
    let sim = |mu, w| Params {
        trials: Some(10_000),
        seed: Some(7),
        ..scenario(mu, w, 0.5, -15.0)
    };
    Some(match token {
        "table1" => (Mode::Table, Params { w: Some(16), ..base }),
        "fig3" => (
            Mode::Autocorr,
            Params {
                mu: Some(140),
                w: Some(16),
                ..base
            },
        ),
        "fig4" => (
            Mode::Spectrum,
            Params {
                mu: Some(140),
                w: Some(16),
                ..base
            },
        ),
        "fig6" => (Mode::Analyze, scenario(140, 16, 0.5, -15.0)),
        "fig7" => (Mode::Analyze, scenario(140, 16, 0.7, 0.0)),
        "fig8" => (
            Mode::Spectrum,
            Params {
                mu: Some(367),
                w: Some(20),
                ..base
            },
        ),
        "fig9" => (Mode::Simulate, sim(367, 20)),
        "fig10" => (Mode::Analyze, scenario(367, 20, 0.7, 0.0)),
        "fig11" => (
            Mode::Spectrum,
            Params {
                mu: Some(29),
                w: Some(20),
                ..base
            },
        ),
        "fig12" => (Mode::Simulate, sim(29, 20)),
        "fig13" => (Mode::Analyze, scenario(29, 20, 0.7, 0.0)),
        _ => return None,
    })
}
