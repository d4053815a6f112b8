//! Run configuration from a TOML file and command-line flags. Flags win.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use serde::Deserialize;

use crate::bsm::BsmNoise;
use crate::cbm::{AdversaryModel, FtConfig, SimMode, Strategy};
use crate::encoding::{EncodingParams, SecretSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExperimentKind {
    Teleport,
    Enumerate,
    Cbm,
    Sweep,
    FidelityPipeline,
}

impl ExperimentKind {
    pub fn needs_seed(self) -> bool {
        matches!(
            self,
            ExperimentKind::Teleport | ExperimentKind::Cbm | ExperimentKind::Sweep
        )
    }
}

/// Flags shared by every subcommand. List-valued flags take comma-separated
/// values; only `sweep` accepts more than one.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Number of senders.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Number of receivers.
    #[arg(long)]
    pub m: Option<usize>,
    /// Photons per block (parity encoding).
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<usize>,
    /// Maximum number of B_psi attempts per block (default p-1).
    #[arg(long, value_delimiter = ',')]
    pub q: Vec<usize>,
    /// Photon loss rate.
    #[arg(long, value_delimiter = ',')]
    pub eta: Vec<f64>,
    /// Failure detection efficiency.
    #[arg(long, value_delimiter = ',')]
    pub f: Vec<f64>,
    /// Sign/symbol flip error rate per report.
    #[arg(long, value_delimiter = ',')]
    pub epsilon: Vec<f64>,
    /// Number of Monte-Carlo trials
    #[arg(long)]
    pub trials: Option<u64>,
    /// Master seed (required for teleport, cbm and sweep)
    #[arg(long)]
    pub seed: Option<u64>,
    /// File for per-trial records (JSON lines, or CSV for sweeps with --csv).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Emit sweep results as CSV.
    #[arg(long)]
    pub csv: bool,
    /// TOML configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Secret amplitude alpha, real part
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_re: Option<f64>,
    /// Secret amplitude alpha, imaginary part
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_im: Option<f64>,
    /// Secret amplitude beta, real part
    #[arg(long, allow_hyphen_values = true)]
    pub beta_re: Option<f64>,
    /// Secret amplitude beta, imaginary part
    #[arg(long, allow_hyphen_values = true)]
    pub beta_im: Option<f64>,
    /// Simulation mode for the parity protocol: exact | label.
    #[arg(long)]
    pub mode: Option<String>,
    /// Dishonest senders (1-based).
    #[arg(long, value_delimiter = ',')]
    pub dishonest: Vec<usize>,
    /// flip-sign | flip-symbol | report-failure | random.
    #[arg(long)]
    pub strategy: Option<String>,
    /// Fidelity of the synthetic GHZ channel (fidelity-pipeline).
    #[arg(long)]
    pub channel_fidelity: Option<f64>,
    /// White-noise weight mixed into the inputs (fidelity-pipeline).
    #[arg(long)]
    pub input_noise: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunSection {
    trials: Option<u64>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    csv: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProtocolSection {
    n: Option<OneOrMany<usize>>,
    m: Option<usize>,
    p: Option<OneOrMany<usize>>,
    q: Option<OneOrMany<usize>>,
    mode: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoiseSection {
    f: Option<OneOrMany<f64>>,
    eta: Option<OneOrMany<f64>>,
    epsilon: Option<OneOrMany<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SecretSection {
    alpha_re: Option<f64>,
    alpha_im: Option<f64>,
    beta_re: Option<f64>,
    beta_im: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct AdversarySection {
    dishonest: Option<Vec<usize>>,
    strategy: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PipelineSection {
    channel_fidelity: Option<f64>,
    input_noise: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(default)]
    run: RunSection,
    #[serde(default)]
    protocol: ProtocolSection,
    #[serde(default)]
    noise: NoiseSection,
    #[serde(default)]
    secret: SecretSection,
    #[serde(default)]
    adversary: AdversarySection,
    #[serde(default)]
    pipeline: PipelineSection,
}

fn load_file(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("reading {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn pick<T: Clone>(flag: &[T], file: Option<OneOrMany<T>>) -> Vec<T> {
    if flag.is_empty() {
        file.map(OneOrMany::into_vec).unwrap_or_default()
    } else {
        flag.to_vec()
    }
}

/// Fully resolved parameters. List fields hold the sweep grid; every other
/// experiment uses exactly one value per list.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub experiment: ExperimentKind,
    pub n: Vec<usize>,
    pub m: usize,
    /// Empty selects the GHZ protocol.
    pub p: Vec<usize>,
    /// Empty means `p − 1` for each `p`.
    pub q: Vec<usize>,
    pub f: Vec<f64>,
    pub eta: Vec<f64>,
    pub epsilon: Vec<f64>,
    pub trials: u64,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub csv: bool,
    pub secret: SecretSpec,
    pub mode: SimMode,
    pub adversary: AdversaryModel,
    pub channel_fidelity: f64,
    pub input_noise: f64,
}

pub const DEFAULT_TRIALS: u64 = 1000;
pub const DEFAULT_CHANNEL_FIDELITY: f64 = 0.73;

impl RunConfig {
    pub fn resolve(experiment: ExperimentKind, args: &CommonArgs) -> Result<Self> {
        let file = match &args.config {
            Some(path) => load_file(path)?,
            None => FileConfig::default(),
        };
        let or_default = |v: Vec<f64>, d: f64| if v.is_empty() { vec![d] } else { v };
        let mut n = pick(&args.n, file.protocol.n);
        if n.is_empty() {
            n.push(2);
        }
        let mut p = pick(&args.p, file.protocol.p);
        if p.is_empty() && matches!(experiment, ExperimentKind::Cbm | ExperimentKind::Sweep) {
            p.push(2);
        }
        let secret_part = |flag: Option<f64>, file: Option<f64>, d: f64| flag.or(file).unwrap_or(d);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let secret = SecretSpec::from_parts(
            secret_part(args.alpha_re, file.secret.alpha_re, h),
            secret_part(args.alpha_im, file.secret.alpha_im, 0.0),
            secret_part(args.beta_re, file.secret.beta_re, h),
            secret_part(args.beta_im, file.secret.beta_im, 0.0),
        )?;
        let mode = match args.mode.clone().or(file.protocol.mode) {
            Some(s) => SimMode::from_str(&s)?,
            None => SimMode::LabelLevel,
        };
        let dishonest = if args.dishonest.is_empty() {
            file.adversary.dishonest.unwrap_or_default()
        } else {
            args.dishonest.clone()
        };
        let adversary = match args.strategy.clone().or(file.adversary.strategy) {
            Some(s) => AdversaryModel::new(dishonest, Strategy::from_str(&s)?),
            None if dishonest.is_empty() => AdversaryModel::honest(),
            None => {
                return Err(Error::Config(
                    "dishonest senders given without a strategy".into(),
                ))
            }
        };
        let cfg = RunConfig {
            experiment,
            n,
            m: args.m.or(file.protocol.m).unwrap_or(2),
            p,
            q: pick(&args.q, file.protocol.q),
            f: or_default(pick(&args.f, file.noise.f), 1.0),
            eta: or_default(pick(&args.eta, file.noise.eta), 0.0),
            epsilon: or_default(pick(&args.epsilon, file.noise.epsilon), 0.0),
            trials: args.trials.or(file.run.trials).unwrap_or(DEFAULT_TRIALS),
            seed: args.seed.or(file.run.seed),
            out: args.out.clone().or(file.run.out),
            csv: args.csv || file.run.csv.unwrap_or(false),
            secret,
            mode,
            adversary,
            channel_fidelity: args
                .channel_fidelity
                .or(file.pipeline.channel_fidelity)
                .unwrap_or(DEFAULT_CHANNEL_FIDELITY),
            input_noise: args
                .input_noise
                .or(file.pipeline.input_noise)
                .unwrap_or(0.0),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.experiment.needs_seed() && self.seed.is_none() {
            return Err(Error::Config(
                "--seed is required for sampling experiments".into(),
            ));
        }
        if self.experiment != ExperimentKind::Sweep {
            for (name, len) in [
                ("n", self.n.len()),
                ("p", self.p.len()),
                ("q", self.q.len()),
                ("f", self.f.len()),
                ("eta", self.eta.len()),
                ("epsilon", self.epsilon.len()),
            ] {
                if len > 1 {
                    return Err(Error::Config(format!("--{name} takes a single value here")));
                }
            }
        }
        if self.trials == 0 {
            return Err(Error::Config("--trials must be ≥ 1".into()));
        }
        if self.m == 0 || self.n.contains(&0) {
            return Err(Error::Config("n and m must be ≥ 1".into()));
        }
        if !(0.0..=1.0).contains(&self.channel_fidelity) || !(0.0..=1.0).contains(&self.input_noise)
        {
            return Err(Error::Config(
                "fidelity and noise weights must lie in [0, 1]".into(),
            ));
        }
        for f in &self.f {
            for eta in &self.eta {
                for eps in &self.epsilon {
                    BsmNoise::new(*f, *eta, *eps)?;
                }
            }
        }
        for n in &self.n {
            self.adversary.validate(*n)?;
        }
        Ok(())
    }

    pub fn noise(&self) -> Result<BsmNoise> {
        BsmNoise::new(self.f[0], self.eta[0], self.epsilon[0])
    }

    /// Parity encoding for the first grid point.
    pub fn encoding(&self) -> Result<Option<EncodingParams>> {
        let Some(&p) = self.p.first() else {
            return Ok(None);
        };
        let q = self.q.first().copied().unwrap_or(p - 1);
        EncodingParams::parity(self.n[0], p, q).map(Some)
    }

    pub fn ft_config(&self) -> Result<FtConfig> {
        let enc = self
            .encoding()?
            .ok_or_else(|| Error::Config("--p is required".into()))?;
        Ok(FtConfig::new(self.secret, enc, self.m)
            .with_noise(self.noise()?)
            .with_adversary(self.adversary.clone())
            .with_mode(self.mode))
    }

    /// Every point of the sweep grid, in a fixed order.
    pub fn grid(&self) -> Result<Vec<FtConfig>> {
        let mut out = Vec::new();
        for &n in &self.n {
            for &p in &self.p {
                let qs = if self.q.is_empty() {
                    vec![p - 1]
                } else {
                    self.q.clone()
                };
                for &q in &qs {
                    for &eta in &self.eta {
                        for &f in &self.f {
                            for &eps in &self.epsilon {
                                let enc = EncodingParams::parity(n, p, q)?;
                                out.push(
                                    FtConfig::new(self.secret, enc, self.m)
                                        .with_noise(BsmNoise::new(f, eta, eps)?)
                                        .with_adversary(self.adversary.clone())
                                        .with_mode(self.mode),
                                );
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn flags_override_file() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(
            file,
            "[run]\nseed = 5\ntrials = 20\n[protocol]\nn = [1, 2]\np = 3\n[noise]\neta = 0.1\n"
        )
        .unwrap();
        let args = CommonArgs {
            config: Some(file.path().to_path_buf()),
            trials: Some(7),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(ExperimentKind::Sweep, &args).unwrap();
        assert_eq!(cfg.trials, 7);
        assert_eq!(cfg.seed, Some(5));
        assert_eq!(cfg.n, vec![1, 2]);
        assert_eq!(cfg.p, vec![3]);
        assert_eq!(cfg.eta, vec![0.1]);
        assert_eq!(cfg.grid().unwrap().len(), 2);
    }

    #[test]
    fn rejects_bad_configs() {
        let args = CommonArgs::default();
        assert!(RunConfig::resolve(ExperimentKind::Cbm, &args).is_err());
        let args = CommonArgs {
            seed: Some(1),
            eta: vec![1.5],
            ..Default::default()
        };
        assert!(RunConfig::resolve(ExperimentKind::Teleport, &args).is_err());
        let args = CommonArgs {
            n: vec![1, 2],
            ..Default::default()
        };
        assert!(RunConfig::resolve(ExperimentKind::Enumerate, &args).is_err());
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "[protocol]\nbogus = 1").unwrap();
        let args = CommonArgs {
            config: Some(file.path().to_path_buf()),
            ..Default::default()
        };
        assert!(RunConfig::resolve(ExperimentKind::Enumerate, &args).is_err());
    }
}
