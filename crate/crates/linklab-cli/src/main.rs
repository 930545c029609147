//! `linklab` — BER simulator for single-antenna OFDM and 2x2
//! space-frequency-coded links.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 I/O error,
//! 4 numerical failure (selftest violation or internal numerical error).

use clap::{Args, Parser, Subcommand};
use linklab::harness::{run_csi_sweep, run_mimo_sfbc, run_siso_ofdm, BerCurve, Scheme};
use linklab_cli::config::{PartialSettings, RunManifest, Settings, SettingsError};
use linklab_cli::{csvio, selftest, svg};
use std::path::PathBuf;

const EXIT_OK: i32 = 0;
const EXIT_USAGE: i32 = 2;
const EXIT_IO: i32 = 3;
const EXIT_NUMERICAL: i32 = 4;

#[derive(Parser)]
#[command(
    name = "linklab",
    version,
    about = "Link-level BER simulator: SISO-OFDM and 2x2 MIMO-SFBC over Rayleigh channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single-antenna OFDM over a frequency-selective Rayleigh channel
    SisoOfdm(RunArgs),
    /// 2x2 Alamouti-coded link, LS and MMSE detection (paired seeds)
    MimoSfbc(RunArgs),
    /// MMSE BER across a grid of CSI error variances (paired seeds)
    CsiSweep(RunArgs),
    /// Run the numerical invariant suite
    Selftest,
}

#[derive(Args, Default)]
struct RunArgs {
    /// SNR grid in dB: start:step:stop or a comma list [default: 0:2:20]
    #[arg(long)]
    snr: Option<String>,

    /// Master seed; env LINKLAB_SEED is the fallback [default: 1]
    #[arg(long)]
    seed: Option<u64>,

    /// Bits per trial at each SNR point [default: 51200]
    #[arg(long)]
    bits: Option<usize>,

    /// Keep simulating until this many bit errors per point, capped at
    /// 100 trials; 0 runs exactly one trial [default: 100]
    #[arg(long = "min-errors")]
    min_errors: Option<u64>,

    /// Subcarrier count (power of two) [default: 512]
    #[arg(long)]
    nfft: Option<usize>,

    /// Cyclic prefix length [default: 10]
    #[arg(long)]
    cp: Option<usize>,

    /// Channel taps for the SISO chain [default: 6]
    #[arg(long)]
    taps: Option<usize>,

    /// CSI error variance (mimo-sfbc only) [default: 0]
    #[arg(long = "csi-var")]
    csi_var: Option<f64>,

    /// CSI error variance grid (csi-sweep only)
    /// [default: 0,0.01,0.05,0.1,0.5]
    #[arg(long = "csi-grid")]
    csi_grid: Option<String>,

    /// CSV output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,

    /// Also render the curves as an SVG plot
    #[arg(long)]
    svg: Option<PathBuf>,

    /// Worker thread count; never affects output bytes
    #[arg(long)]
    threads: Option<usize>,

    /// Flat `key = value` config file (flags win over file values)
    #[arg(long)]
    config: Option<PathBuf>,
}

impl RunArgs {
    fn partial(&self) -> PartialSettings {
        PartialSettings {
            snr: self.snr.clone(),
            seed: self.seed,
            bits: self.bits,
            min_errors: self.min_errors,
            nfft: self.nfft,
            cp: self.cp,
            taps: self.taps,
            csi_var: self.csi_var,
            csi_grid: self.csi_grid.clone(),
            out: self.out.clone(),
            svg: self.svg.clone(),
            threads: self.threads,
        }
    }
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(), // usage errors exit 2; --help/--version exit 0
    };
    match cli.command {
        Command::Selftest => run_selftest(),
        Command::SisoOfdm(args) => run_experiment("siso-ofdm", &args),
        Command::MimoSfbc(args) => run_experiment("mimo-sfbc", &args),
        Command::CsiSweep(args) => run_experiment("csi-sweep", &args),
    }
}

fn run_selftest() -> i32 {
    let mut out = std::io::stdout();
    match selftest::run_selftest(&mut out) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_NUMERICAL,
        Err(e) => {
            eprintln!("linklab: cannot write selftest report: {e}");
            EXIT_IO
        }
    }
}

fn run_experiment(command: &str, args: &RunArgs) -> i32 {
    let env_seed = std::env::var("LINKLAB_SEED").ok();
    let settings = match Settings::resolve(args.partial(), args.config.as_deref(), env_seed.as_deref())
    {
        Ok(s) => s,
        Err(SettingsError::Usage(msg)) => {
            eprintln!("linklab: {msg}");
            return EXIT_USAGE;
        }
        Err(SettingsError::Io(msg)) => {
            eprintln!("linklab: {msg}");
            return EXIT_IO;
        }
    };

    if let Some(n) = settings.threads {
        // Build errors only occur if a pool already exists; harmless here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }

    let curves = match simulate(command, &settings) {
        Ok(curves) => curves,
        Err(linklab::Error::InvalidConfig(msg)) => {
            eprintln!("linklab: invalid configuration: {msg}");
            return EXIT_USAGE;
        }
        Err(e) => {
            eprintln!("linklab: numerical failure: {e}");
            return EXIT_NUMERICAL;
        }
    };

    let manifest = RunManifest::new(command, settings.clone());
    if let Err(code) = emit(&curves, &manifest, &settings) {
        return code;
    }
    EXIT_OK
}

fn simulate(command: &str, settings: &Settings) -> linklab::Result<Vec<BerCurve>> {
    match command {
        "siso-ofdm" => {
            let cfg = settings.experiment(Scheme::SisoOfdm, vec![0.0]);
            Ok(vec![run_siso_ofdm(&cfg)?])
        }
        "mimo-sfbc" => {
            let cfg = settings.experiment(Scheme::MimoSfbc, vec![settings.csi_var]);
            let curves = run_mimo_sfbc(&cfg)?;
            Ok(vec![curves.ls, curves.mmse])
        }
        "csi-sweep" => {
            let cfg = settings.experiment(Scheme::MimoSfbc, settings.csi_grid.clone());
            run_csi_sweep(&cfg)
        }
        other => unreachable!("unknown command {other}"),
    }
}

fn emit(curves: &[BerCurve], manifest: &RunManifest, settings: &Settings) -> Result<(), i32> {
    match &settings.out {
        Some(path) => {
            let mut file = std::fs::File::create(path).map_err(|e| {
                eprintln!("linklab: cannot create {}: {e}", path.display());
                EXIT_IO
            })?;
            csvio::write_csv(curves, manifest, &mut file).map_err(|e| {
                eprintln!("linklab: cannot write {}: {e}", path.display());
                EXIT_IO
            })?;
        }
        None => {
            let stdout = std::io::stdout();
            csvio::write_csv(curves, manifest, &mut stdout.lock()).map_err(|e| {
                eprintln!("linklab: cannot write to stdout: {e}");
                EXIT_IO
            })?;
        }
    }

    if let Some(path) = &settings.svg {
        if curves.iter().any(|c| c.points.len() < 2) {
            eprintln!("linklab: an SVG plot needs at least 2 SNR points per curve");
            return Err(EXIT_USAGE);
        }
        let mut file = std::fs::File::create(path).map_err(|e| {
            eprintln!("linklab: cannot create {}: {e}", path.display());
            EXIT_IO
        })?;
        svg::render_svg(curves, &mut file).map_err(|e| {
            eprintln!("linklab: cannot write {}: {e}", path.display());
            EXIT_IO
        })?;
    }
    Ok(())
}
