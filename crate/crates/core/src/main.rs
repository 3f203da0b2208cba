use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qvacheck::cartan_data::{Gcm, Level};
use qvacheck::runner::{run, suggested_windows, ConfigFile, Format, Suite, SuiteConfig};
use qvacheck::Error;

/// Exact identity checks for quantum affine vertex algebras.
#[derive(Parser, Debug)]
#[command(name = "qvacheck", version)]
struct Args {
    /// JSON configuration file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Preset name (A1, A2, B2, A1xA1, A1^(1)) or an inline JSON matrix.
    #[arg(long)]
    gcm: Option<String>,
    /// Level, an integer or a fraction p/q.
    #[arg(long)]
    level: Option<String>,
    /// ħ-adic truncation order.
    #[arg(long = "hbar-order")]
    hbar_order: Option<usize>,
    /// Highest compared z-exponent.
    #[arg(long = "z-order")]
    z_order: Option<i64>,
    #[arg(long = "weight-cap")]
    weight_cap: Option<u32>,
    /// Suite to run; repeat for several. Default: all.
    #[arg(long = "suite")]
    suites: Vec<String>,
    #[arg(long)]
    format: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

fn configure(args: &Args) -> Result<(SuiteConfig, Format, Option<PathBuf>), Error> {
    let file = match &args.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::InvalidConfig(format!("{}: {e}", p.display())))?;
            ConfigFile::parse(&text)?
        }
        None => ConfigFile::default(),
    };
    let gcm = match &args.gcm {
        Some(s) => s.parse()?,
        None => file.gcm()?.unwrap_or_else(Gcm::a1),
    };
    let level = match &args.level {
        Some(s) => s.parse()?,
        None => file.level()?.unwrap_or_else(|| Level::int(1)),
    };
    let mut cfg = SuiteConfig::new(gcm, level);
    if let Some(n) = args.hbar_order.or(file.n_hbar) {
        cfg.trunc.n_hbar = n;
    }
    if let Some(m) = args.z_order.or(file.m_z) {
        cfg.trunc.m_z = m;
    }
    cfg.weight_cap = args.weight_cap.or(file.weight_cap);
    cfg.seed = args.seed.or(file.seed).unwrap_or(0);
    let names = if args.suites.is_empty() { file.suites.clone().unwrap_or_default() } else { args.suites.clone() };
    if !names.is_empty() {
        cfg.suites = names.iter().map(|s| s.parse::<Suite>()).collect::<Result<_, _>>()?;
    }
    let format = match args.format.as_ref().or(file.format.as_ref()) {
        Some(f) => f.parse()?,
        None => Format::Json,
    };
    let out = args.out.clone().or(file.output.map(PathBuf::from));
    cfg.validate()?;
    Ok((cfg, format, out))
}

fn main() -> ExitCode {
    let args = Args::parse();
    let (cfg, format, out) = match configure(&args) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let output = match run(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return match suggested_windows(&e, cfg.trunc) {
                Some(t) => {
                    eprintln!("suggestion: --hbar-order {} --z-order {}", t.n_hbar, t.m_z);
                    ExitCode::from(3)
                }
                None => match e {
                    Error::InvalidGcm(_) | Error::InvalidConfig(_) => ExitCode::from(2),
                    _ => ExitCode::from(1),
                },
            };
        }
    };
    let body = match format {
        Format::Json => output.to_json() + "\n",
        Format::Text => output.to_text(),
    };
    match &out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &body) {
                eprintln!("error: {}: {e}", p.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{body}"),
    }
    if output.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
