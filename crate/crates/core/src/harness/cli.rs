use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};

use clap::{Parser, Subcommand};
use serde::Serialize;

use super::config::{CommonArgs, ExperimentKind, RunConfig};
use super::pipeline::{
    expected_output_under_ideal_bsm, experiment_inputs, ghz_code_space, synthetic_channel_fidelity,
    SyntheticNoisyState,
};
use super::report::{write_csv, write_json_lines, SweepRow};
use crate::bsm::BellOutcome;
use crate::cbm::{
    enumerate_ft, estimate_success, ft_transcripts, ghz_transcripts, Estimate, Experiment, FtClass,
    FtConfig, SimMode,
};
use crate::encoding::ghz_state;
use crate::error::{Error, Result};
use crate::protocol::{
    enumerate_teleportation, receiver_target, recorded_event_distribution, success_probability,
    EventClass, LogicalBellOutcome,
};
use crate::qstate::DensityMatrix;
use crate::rational::Rational;

/// Label-level enumeration is printed next to `cbm` estimates up to this
/// many photons per logical qubit.
const ORACLE_MAX_PHOTONS: usize = 6;

#[derive(Debug, Parser)]
#[command(
    name = "secret-teleport",
    version,
    about = "Multiparty teleportation of shared quantum secrets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample runs of the GHZ protocol.
    Teleport(CommonArgs),
    /// Exact outcome distribution (GHZ protocol, or parity protocol with --p).
    Enumerate(CommonArgs),
    /// Sample runs of the parity-encoded protocol.
    Cbm(CommonArgs),
    /// Monte-Carlo grid over n, p, q, eta, f, epsilon.
    Sweep(CommonArgs),
    /// Ideal-measurement teleportation of the experiment's inputs through synthetic channels.
    FidelityPipeline(CommonArgs),
}

impl Command {
    fn parts(&self) -> (ExperimentKind, &CommonArgs) {
        match self {
            Command::Teleport(a) => (ExperimentKind::Teleport, a),
            Command::Enumerate(a) => (ExperimentKind::Enumerate, a),
            Command::Cbm(a) => (ExperimentKind::Cbm, a),
            Command::Sweep(a) => (ExperimentKind::Sweep, a),
            Command::FidelityPipeline(a) => (ExperimentKind::FidelityPipeline, a),
        }
    }
}

/// Parses `argv` (program name first), runs the experiment and returns the
/// process exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(&cli.command, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Runs a parsed command, writing the summary to `summary`.
pub fn execute(command: &Command, summary: &mut dyn Write) -> Result<()> {
    let (kind, args) = command.parts();
    let cfg = RunConfig::resolve(kind, args)?;
    match kind {
        ExperimentKind::Teleport => teleport(&cfg, summary),
        ExperimentKind::Enumerate if cfg.p.is_empty() => enumerate_ghz(&cfg, summary),
        ExperimentKind::Enumerate => enumerate_parity(&cfg, summary),
        ExperimentKind::Cbm => cbm(&cfg, summary),
        ExperimentKind::Sweep => sweep(&cfg, summary),
        ExperimentKind::FidelityPipeline => fidelity_pipeline(&cfg, summary),
    }
}

fn open_out(cfg: &RunConfig) -> Result<Option<BufWriter<File>>> {
    match &cfg.out {
        Some(path) => {
            let f = File::create(path)
                .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
            Ok(Some(BufWriter::new(f)))
        }
        None => Ok(None),
    }
}

fn fmt_exact(p: f64, exact: Option<Rational>) -> String {
    match exact {
        Some(r) => format!("{r} ({p:.12})"),
        None => format!("{p:.12}"),
    }
}

fn teleport(cfg: &RunConfig, w: &mut dyn Write) -> Result<()> {
    let (n, seed, noise) = (cfg.n[0], cfg.seed.unwrap_or_default(), cfg.noise()?);
    let records = ghz_transcripts(&cfg.secret, n, cfg.m, &noise, cfg.trials, seed)?;
    if let Some(out) = open_out(cfg)? {
        write_json_lines(&records, out)?;
    }
    let fids: Vec<f64> = records.iter().filter_map(|r| r.fidelity).collect();
    let est = estimate_success(
        &Experiment::Ghz {
            secret: cfg.secret,
            n,
            m: cfg.m,
            noise,
        },
        cfg.trials,
        seed,
    )?;
    writeln!(
        w,
        "teleport n={n} m={} f={} eta={} epsilon={} trials={} seed={seed}",
        cfg.m, noise.failure_detection, noise.loss_rate, noise.flip_error_rate, cfg.trials
    )?;
    writeln!(
        w,
        "identified: {}/{} ({:.6} ± {:.6})",
        est.identified,
        est.trials,
        est.identified_rate(),
        (est.identified_rate() * (1.0 - est.identified_rate()) / est.trials as f64).sqrt()
    )?;
    writeln!(w, "correct: {:.6}", est.success_rate())?;
    if !fids.is_empty() {
        let mean = fids.iter().sum::<f64>() / fids.len() as f64;
        let min = fids.iter().copied().fold(f64::INFINITY, f64::min);
        writeln!(
            w,
            "fidelity over identified runs: mean {mean:.12} min {min:.12}"
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct BranchRecord {
    outcomes: Vec<BellOutcome>,
    probability: f64,
    exact: Option<String>,
    logical_outcome: LogicalBellOutcome,
    event_class: EventClass,
    correction: Option<String>,
    fidelity: Option<f64>,
}

fn enumerate_ghz(cfg: &RunConfig, w: &mut dyn Write) -> Result<()> {
    let (n, noise) = (cfg.n[0], cfg.noise()?);
    let branches = enumerate_teleportation(&cfg.secret, n, cfg.m, &noise)?;
    if let Some(out) = open_out(cfg)? {
        let records: Vec<BranchRecord> = branches
            .iter()
            .map(|b| BranchRecord {
                outcomes: b.outcomes.clone(),
                probability: b.probability,
                exact: b.exact.map(|r| r.to_string()),
                logical_outcome: b.logical,
                event_class: b.event,
                correction: b.correction.as_ref().map(|c| c.to_string()),
                fidelity: b.fidelity,
            })
            .collect();
        write_json_lines(&records, out)?;
    }
    let (p, exact) = success_probability(&branches);
    writeln!(
        w,
        "enumerate ghz n={n} m={} f={} eta={} epsilon={}",
        cfg.m, noise.failure_detection, noise.loss_rate, noise.flip_error_rate
    )?;
    writeln!(w, "records: {}", branches.len())?;
    writeln!(w, "success probability: {}", fmt_exact(p, exact))?;
    for (event, (p, exact)) in recorded_event_distribution(&branches) {
        writeln!(w, "event {event} given recorded: {}", fmt_exact(p, exact))?;
    }
    let min_fid = branches
        .iter()
        .filter_map(|b| b.fidelity)
        .fold(f64::INFINITY, f64::min);
    if min_fid.is_finite() {
        writeln!(w, "min fidelity over identified records: {min_fid:.12}")?;
    }
    Ok(())
}

fn write_distribution(cfg: &FtConfig, w: &mut dyn Write) -> Result<()> {
    let d = enumerate_ft(cfg)?;
    for class in FtClass::ALL {
        writeln!(w, "  {class:?}: {:.12}", d.probability(class))?;
    }
    writeln!(w, "  signonly block rate: {:.12}", d.signonly_block_rate)?;
    if let (Some(mean), Some(min)) = (d.mean_fidelity, d.min_fidelity) {
        writeln!(
            w,
            "  fidelity over identified branches: mean {mean:.12} min {min:.12}"
        )?;
    }
    Ok(())
}

fn enumerate_parity(cfg: &RunConfig, w: &mut dyn Write) -> Result<()> {
    let ft = cfg.ft_config()?;
    writeln!(
        w,
        "enumerate parity n={} p={} q={} m={} f={} eta={} epsilon={} adversary={} mode={}",
        ft.enc.n,
        ft.enc.p,
        ft.enc.q,
        ft.m,
        ft.noise.failure_detection,
        ft.noise.loss_rate,
        ft.noise.flip_error_rate,
        ft.adversary,
        ft.mode
    )?;
    write_distribution(&ft, w)
}

fn write_estimate(est: &Estimate, w: &mut dyn Write) -> Result<()> {
    let se = |p: f64| (p * (1.0 - p) / est.trials as f64).sqrt();
    for (name, rate) in [
        ("success", est.success_rate()),
        ("identified", est.identified_rate()),
        ("failure", est.failure_rate()),
        ("inconsistent", est.inconsistent_rate()),
    ] {
        writeln!(w, "  {name}: {rate:.6} ± {:.6}", se(rate))?;
    }
    writeln!(w, "  signonly block rate: {:.6}", est.signonly_rate())?;
    Ok(())
}

fn cbm(cfg: &RunConfig, w: &mut dyn Write) -> Result<()> {
    let ft = cfg.ft_config()?;
    let seed = cfg.seed.unwrap_or_default();
    let records = ft_transcripts(&ft, cfg.trials, seed)?;
    if let Some(out) = open_out(cfg)? {
        write_json_lines(&records, out)?;
    }
    let est = estimate_success(&Experiment::Ft(ft.clone()), cfg.trials, seed)?;
    writeln!(
        w,
        "cbm n={} p={} q={} m={} f={} eta={} epsilon={} adversary={} mode={} trials={} seed={seed}",
        ft.enc.n,
        ft.enc.p,
        ft.enc.q,
        ft.m,
        ft.noise.failure_detection,
        ft.noise.loss_rate,
        ft.noise.flip_error_rate,
        ft.adversary,
        ft.mode,
        cfg.trials
    )?;
    write_estimate(&est, w)?;
    if ft.enc.photons_per_qubit() <= ORACLE_MAX_PHOTONS {
        writeln!(w, "label-level enumeration:")?;
        write_distribution(&ft.clone().with_mode(SimMode::LabelLevel), w)?;
    }
    Ok(())
}

fn sweep(cfg: &RunConfig, w: &mut dyn Write) -> Result<()> {
    let seed = cfg.seed.unwrap_or_default();
    let rows = cfg
        .grid()?
        .iter()
        .map(|ft| {
            let est = estimate_success(&Experiment::Ft(ft.clone()), cfg.trials, seed)?;
            Ok(SweepRow::new(ft, &est))
        })
        .collect::<Result<Vec<_>>>()?;
    match (open_out(cfg)?, cfg.csv) {
        (Some(out), true) => write_csv(&rows, out)?,
        (Some(out), false) => write_json_lines(&rows, out)?,
        (None, true) => write_csv(&rows, &mut *w)?,
        (None, false) => write_json_lines(&rows, &mut *w)?,
    }
    if cfg.out.is_some() {
        writeln!(
            w,
            "sweep: {} grid points, {} trials each",
            rows.len(),
            cfg.trials
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct PipelineRecord {
    input: &'static str,
    channel_fidelity: f64,
    output_fidelity: f64,
    input_noise: f64,
    noisy_input_fidelity: f64,
    noisy_output_fidelity: f64,
}

fn fidelity_pipeline(cfg: &RunConfig, w: &mut dyn Write) -> Result<()> {
    let (n, m) = (cfg.n[0], cfg.m);
    let pure_channel = DensityMatrix::from_pure(&ghz_state(n + m)?);
    let mut records = Vec::new();
    writeln!(
        w,
        "fidelity-pipeline n={n} m={m} channel_fidelity={} input_noise={}",
        cfg.channel_fidelity, cfg.input_noise
    )?;
    for (name, secret) in experiment_inputs() {
        let output_fidelity = synthetic_channel_fidelity(&secret, n, m, cfg.channel_fidelity)?;
        let target = receiver_target(&secret, n)?;
        let noisy =
            SyntheticNoisyState::within(target.clone(), cfg.input_noise, ghz_code_space(n)?)?;
        let out = expected_output_under_ideal_bsm(&noisy.density()?, &pure_channel, n, m)?;
        let rec = PipelineRecord {
            input: name,
            channel_fidelity: cfg.channel_fidelity,
            output_fidelity,
            input_noise: cfg.input_noise,
            noisy_input_fidelity: noisy.fidelity()?,
            noisy_output_fidelity: out.fidelity(&receiver_target(&secret, m)?)?,
        };
        writeln!(
            w,
            "input ({name}): synthetic channel -> {:.12}{}; noisy input {:.12} -> {:.12}",
            rec.output_fidelity,
            if rec.output_fidelity > 2.0 / 3.0 {
                " (above 2/3)"
            } else {
                ""
            },
            rec.noisy_input_fidelity,
            rec.noisy_output_fidelity
        )?;
        records.push(rec);
    }
    if let Some(out) = open_out(cfg)? {
        write_json_lines(&records, out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (Result<()>, String) {
        let cli = Cli::try_parse_from(args).unwrap();
        let mut buf = Vec::new();
        let r = execute(&cli.command, &mut buf);
        (r, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn enumerate_reports_three_quarters() {
        let (r, out) = run(&["st", "enumerate", "--n", "2", "--m", "2"]);
        r.unwrap();
        assert!(out.contains("success probability: 3/4"), "{out}");
    }

    #[test]
    fn parse_errors_give_nonzero_exit() {
        assert_eq!(run_cli(["st", "teleport", "--bogus"]), 2);
        assert_eq!(run_cli(["st", "teleport", "--n", "2"]), 1);
        assert_eq!(run_cli(["st", "nope"]), 2);
    }

    #[test]
    fn unwritable_output_is_an_error() {
        let (r, _) = run(&[
            "st",
            "teleport",
            "--seed",
            "1",
            "--trials",
            "3",
            "--out",
            "/nonexistent/dir/x.jsonl",
        ]);
        assert!(r.is_err());
    }
}
