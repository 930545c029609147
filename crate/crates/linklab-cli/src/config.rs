//! Settings resolution: command-line flags override config-file values,
//! which override the built-in defaults (the reference simulation setup).
//! `LINKLAB_SEED` supplies the master seed when neither a flag nor a file
//! sets one.

use linklab::harness::{ExperimentConfig, Scheme};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// What went wrong while resolving settings, split by exit-code class.
#[derive(Debug)]
pub enum SettingsError {
    /// Bad value or unknown key: a usage error (exit code 2).
    Usage(String),
    /// The config file could not be read (exit code 3).
    Io(String),
}

impl std::fmt::Display for SettingsError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SettingsError::Usage(m) | SettingsError::Io(m) => f.write_str(m),
        }
    }
}

fn usage(msg: impl Into<String>) -> SettingsError {
    SettingsError::Usage(msg.into())
}

/// Raw option values as they arrive from one source (flags or file);
/// `None` means "not set here".
#[derive(Debug, Default, Clone)]
pub struct PartialSettings {
    pub snr: Option<String>,
    pub seed: Option<u64>,
    pub bits: Option<usize>,
    pub min_errors: Option<u64>,
    pub nfft: Option<usize>,
    pub cp: Option<usize>,
    pub taps: Option<usize>,
    pub csi_var: Option<f64>,
    pub csi_grid: Option<String>,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl PartialSettings {
    /// Fill any unset field from `fallback`.
    fn or(self, fallback: PartialSettings) -> PartialSettings {
        PartialSettings {
            snr: self.snr.or(fallback.snr),
            seed: self.seed.or(fallback.seed),
            bits: self.bits.or(fallback.bits),
            min_errors: self.min_errors.or(fallback.min_errors),
            nfft: self.nfft.or(fallback.nfft),
            cp: self.cp.or(fallback.cp),
            taps: self.taps.or(fallback.taps),
            csi_var: self.csi_var.or(fallback.csi_var),
            csi_grid: self.csi_grid.or(fallback.csi_grid),
            out: self.out.or(fallback.out),
            svg: self.svg.or(fallback.svg),
            threads: self.threads.or(fallback.threads),
        }
    }
}

/// Fully resolved run settings; every field has a value (possibly the
/// built-in default).
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub snr_grid_db: Vec<f64>,
    pub seed: u64,
    pub bits: usize,
    pub min_errors: u64,
    pub nfft: usize,
    pub cp: usize,
    pub taps: usize,
    pub csi_var: f64,
    pub csi_grid: Vec<f64>,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl Settings {
    /// Resolve flag values, an optional config file, the `LINKLAB_SEED`
    /// environment fallback, and defaults, in that precedence order.
    pub fn resolve(
        flags: PartialSettings,
        config_path: Option<&Path>,
        env_seed: Option<&str>,
    ) -> Result<Settings, SettingsError> {
        let mut merged = flags;
        if let Some(path) = config_path {
            merged = merged.or(load_config_file(path)?);
        }
        if merged.seed.is_none() {
            if let Some(raw) = env_seed {
                let seed = raw
                    .trim()
                    .parse::<u64>()
                    .map_err(|_| usage(format!("LINKLAB_SEED is not a valid seed: {raw:?}")))?;
                merged.seed = Some(seed);
            }
        }
        let snr_spec = merged.snr.unwrap_or_else(|| "0:2:20".to_string());
        let csi_grid_spec = merged
            .csi_grid
            .unwrap_or_else(|| "0,0.01,0.05,0.1,0.5".to_string());
        Ok(Settings {
            snr_grid_db: parse_snr_grid(&snr_spec)?,
            seed: merged.seed.unwrap_or(1),
            bits: merged.bits.unwrap_or(51200),
            min_errors: merged.min_errors.unwrap_or(100),
            nfft: merged.nfft.unwrap_or(512),
            cp: merged.cp.unwrap_or(10),
            taps: merged.taps.unwrap_or(6),
            csi_var: merged.csi_var.unwrap_or(0.0),
            csi_grid: parse_float_list(&csi_grid_spec)
                .map_err(|e| usage(format!("invalid csi-grid: {e}")))?,
            out: merged.out,
            svg: merged.svg,
            threads: merged.threads,
        })
    }

    /// The experiment configuration this run hands to the harness.
    pub fn experiment(&self, scheme: Scheme, csi_grid: Vec<f64>) -> ExperimentConfig {
        ExperimentConfig {
            scheme,
            snr_grid_db: self.snr_grid_db.clone(),
            bits_per_point: self.bits,
            min_error_events: self.min_errors,
            master_seed: self.seed,
            nfft: self.nfft,
            cp_len: self.cp,
            channel_taps: self.taps,
            csi_error_grid: csi_grid,
        }
    }
}

/// Parse an SNR grid: either `start:step:stop` (inclusive) or a comma list
/// of dB values.
pub fn parse_snr_grid(spec: &str) -> Result<Vec<f64>, SettingsError> {
    let spec = spec.trim();
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(usage(format!(
                "SNR range must be start:step:stop, got {spec:?}"
            )));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| usage(format!("invalid SNR range component {p:?}")))
            })
            .collect::<Result<_, _>>()?;
        let (start, step, stop) = (nums[0], nums[1], nums[2]);
        if step <= 0.0 || !step.is_finite() {
            return Err(usage(format!("SNR step must be positive, got {step}")));
        }
        if stop < start {
            return Err(usage(format!("SNR stop {stop} is below start {start}")));
        }
        let mut grid = Vec::new();
        let mut i = 0u32;
        loop {
            let v = start + step * i as f64;
            if v > stop + 1e-9 {
                break;
            }
            grid.push(v);
            i += 1;
        }
        Ok(grid)
    } else {
        let grid = parse_float_list(spec).map_err(|e| usage(format!("invalid SNR list: {e}")))?;
        for w in grid.windows(2) {
            if w[1] <= w[0] {
                return Err(usage("SNR list must be strictly increasing".to_string()));
            }
        }
        Ok(grid)
    }
}

/// Parse a comma-separated list of floats.
pub fn parse_float_list(spec: &str) -> Result<Vec<f64>, String> {
    let values: Vec<f64> = spec
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("not a number: {p:?}"))
        })
        .collect::<Result<_, _>>()?;
    if values.is_empty() {
        return Err("empty list".to_string());
    }
    Ok(values)
}

/// Read a flat `key = value` config file. Keys mirror the long flag names;
/// `#` starts a comment; blank lines are ignored.
pub fn load_config_file(path: &Path) -> Result<PartialSettings, SettingsError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SettingsError::Io(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(usage(format!(
                "{}:{}: expected key = value, got {raw:?}",
                path.display(),
                lineno + 1
            )));
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }

    let mut out = PartialSettings::default();
    for (key, value) in map {
        let bad = |what: &str| usage(format!("config {key} = {value:?}: invalid {what}"));
        match key.as_str() {
            "snr" => out.snr = Some(value),
            "seed" => out.seed = Some(value.parse().map_err(|_| bad("seed"))?),
            "bits" => out.bits = Some(value.parse().map_err(|_| bad("bit count"))?),
            "min-errors" => out.min_errors = Some(value.parse().map_err(|_| bad("count"))?),
            "nfft" => out.nfft = Some(value.parse().map_err(|_| bad("FFT size"))?),
            "cp" => out.cp = Some(value.parse().map_err(|_| bad("prefix length"))?),
            "taps" => out.taps = Some(value.parse().map_err(|_| bad("tap count"))?),
            "csi-var" => out.csi_var = Some(value.parse().map_err(|_| bad("variance"))?),
            "csi-grid" => out.csi_grid = Some(value),
            "out" => out.out = Some(PathBuf::from(value)),
            "svg" => out.svg = Some(PathBuf::from(value)),
            "threads" => out.threads = Some(value.parse().map_err(|_| bad("thread count"))?),
            other => return Err(usage(format!("unknown config key {other:?}"))),
        }
    }
    Ok(out)
}

/// Everything a CSV needs to be re-runnable: the resolved settings plus
/// tool identity. The timestamp honors `SOURCE_DATE_EPOCH` and is 0 when
/// unset, keeping output bytes a pure function of the configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub timestamp: u64,
    pub settings: Settings,
}

impl RunManifest {
    pub fn new(command: &str, settings: Settings) -> Self {
        let timestamp = std::env::var("SOURCE_DATE_EPOCH")
            .ok()
            .and_then(|v| v.parse::<u64>().ok())
            .unwrap_or(0);
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp,
            settings,
        }
    }

    /// Comment-prefixed preamble lines embedded at the top of every CSV.
    /// The thread count is deliberately omitted: it never affects output.
    pub fn preamble(&self) -> Vec<String> {
        let s = &self.settings;
        let mut lines = vec![
            format!("# linklab {}", self.version),
            format!("# command: {}", self.command),
            format!("# timestamp: {}", self.timestamp),
            format!("# snr: {}", join_floats(&s.snr_grid_db)),
            format!("# seed: {}", s.seed),
            format!("# bits: {}", s.bits),
            format!("# min-errors: {}", s.min_errors),
            format!("# nfft: {}", s.nfft),
            format!("# cp: {}", s.cp),
            format!("# taps: {}", s.taps),
        ];
        match self.command.as_str() {
            "mimo-sfbc" => lines.push(format!("# csi-var: {}", crate::csvio::format_float(s.csi_var))),
            "csi-sweep" => lines.push(format!("# csi-grid: {}", join_floats(&s.csi_grid))),
            _ => {}
        }
        lines.push(format!(
            "# out: {}",
            s.out
                .as_ref()
                .map_or_else(|| "-".to_string(), |p| p.display().to_string())
        ));
        if let Some(svg) = &s.svg {
            lines.push(format!("# svg: {}", svg.display()));
        }
        lines
    }
}

fn join_floats(values: &[f64]) -> String {
    values
        .iter()
        .map(|&v| crate::csvio::format_float(v))
        .collect::<Vec<_>>()
        .join(",")
}
