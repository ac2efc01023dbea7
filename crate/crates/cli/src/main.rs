//! `biokey`: derive a DES key from a fingerprint PGM and encrypt/decrypt files with it.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use biokey_core::des::{self, DesError};
use biokey_core::{
    load_gray, save_binary, save_gray, ConfigError, DesKey, GrayImage, ImageError, KeyError,
    PipelineConfig, PipelineError, PipelineRun,
};
use clap::{Args, Parser, Subcommand};

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  2  usage error (including a key that is not 16 hex digits)
  3  file could not be read or written
  4  input is not an 8-bit PGM (P2/P5, maxval 255)
  5  too few minutiae survived to build a key
  6  ciphertext is not whole 8-byte blocks of hex
  7  ciphertext decrypted to invalid padding (wrong key?)
  8  invalid pipeline configuration";

#[derive(Parser)]
#[command(name = "biokey", version, about = "Fingerprint-derived DES keys", after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derive a 64-bit DES key from a grayscale PGM fingerprint and print it as hex
    Keygen {
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
        /// Write equalized.pgm, binary.pgm, cleaned.pgm, thinned.pgm and minutiae.txt here
        #[arg(long, value_name = "DIR")]
        dump: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Print per-stage counts for a fingerprint
    Inspect {
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
        #[arg(long, value_name = "DIR")]
        dump: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// DES-ECB encrypt a file (PKCS#7 padded) into uppercase hex
    Encrypt(CryptArgs),
    /// Decrypt a hex ciphertext file produced by `encrypt`
    Decrypt(CryptArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// `key = value` file with any of: block_size, flatness, false_minutiae_dist, border_trim
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Binarization tile size in pixels [default: 16]
    #[arg(long)]
    block_size: Option<usize>,
    /// Minimum intensity range of a tile holding ridges [default: 8]
    #[arg(long)]
    flatness: Option<usize>,
    /// Minutiae pairs closer than this many pixels are dropped [default: 6]
    #[arg(long)]
    min_distance: Option<usize>,
    /// Minutiae within this many pixels of the edge are dropped [default: 10]
    #[arg(long)]
    border: Option<usize>,
}

#[derive(Args)]
struct CryptArgs {
    /// 16 hex digits
    #[arg(long, value_parser = parse_key)]
    key: DesKey,
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    #[arg(long = "out", value_name = "FILE")]
    output: PathBuf,
}

fn parse_key(s: &str) -> Result<DesKey, String> {
    DesKey::from_hex(s).map_err(|e| e.to_string())
}

#[derive(Debug)]
enum CliError {
    Io(PathBuf, std::io::Error),
    Image(PathBuf, ImageError),
    Key(KeyError),
    Config(ConfigError),
    Ciphertext(String),
    Padding,
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(..) => 3,
            CliError::Image(..) => 4,
            CliError::Key(KeyError::InsufficientMinutiae { .. }) => 5,
            CliError::Key(_) => 2,
            CliError::Ciphertext(_) => 6,
            CliError::Padding => 7,
            CliError::Config(_) => 8,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Image(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Key(e) => write!(f, "{e}"),
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Ciphertext(msg) => write!(f, "malformed ciphertext: {msg}"),
            CliError::Padding => write!(
                f,
                "bad padding after decryption (wrong key or corrupted ciphertext)"
            ),
        }
    }
}

impl From<DesError> for CliError {
    fn from(e: DesError) -> Self {
        match e {
            DesError::MalformedCiphertext(_) => CliError::Ciphertext(e.to_string()),
            DesError::BadPadding => CliError::Padding,
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Config(c) => CliError::Config(c),
            // the pipeline always thins before extracting
            PipelineError::Minutiae(m) => {
                unreachable!("pipeline produced an unthinned skeleton: {m}")
            }
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Io(path.to_owned(), e))
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::Io(path.to_owned(), e))
}

fn resolve_config(args: &ConfigArgs) -> Result<PipelineConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = String::from_utf8_lossy(&read(path)?).into_owned();
            PipelineConfig::from_toml_str(&text).map_err(CliError::Config)?
        }
        None => PipelineConfig::default(),
    };
    if let Some(v) = args.block_size {
        cfg.block_size = v;
    }
    if let Some(v) = args.flatness {
        cfg.flatness = v;
    }
    if let Some(v) = args.min_distance {
        cfg.false_minutiae_dist = v;
    }
    if let Some(v) = args.border {
        cfg.border_trim = v;
    }
    cfg.validate().map_err(CliError::Config)?;
    Ok(cfg)
}

fn load_image(path: &Path) -> Result<GrayImage, CliError> {
    load_gray(&read(path)?).map_err(|e| CliError::Image(path.to_owned(), e))
}

fn dump_stages(dir: &Path, run: &PipelineRun) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.to_owned(), e))?;
    write(&dir.join("equalized.pgm"), save_gray(&run.equalized))?;
    write(&dir.join("binary.pgm"), save_binary(&run.binary))?;
    write(&dir.join("cleaned.pgm"), save_binary(&run.cleaned))?;
    write(&dir.join("thinned.pgm"), save_binary(&run.thinned))?;
    write(&dir.join("minutiae.txt"), run.minutiae.to_dump())
}

fn run_pipeline(
    input: &Path,
    config: &ConfigArgs,
    dump: Option<&Path>,
) -> Result<PipelineRun, CliError> {
    let cfg = resolve_config(config)?;
    let img = load_image(input)?;
    let run = PipelineRun::execute(&img, &cfg)?;
    if let Some(dir) = dump {
        dump_stages(dir, &run)?;
    }
    Ok(run)
}

fn keygen(input: &Path, config: &ConfigArgs, dump: Option<&Path>) -> Result<(), CliError> {
    let run = run_pipeline(input, config, dump)?;
    let key = run.key.clone().map_err(CliError::Key)?;
    if let Some(w) = run.weakness() {
        eprintln!("warning: derived key is a {w:?} DES key");
    }
    println!("{key}");
    Ok(())
}

fn inspect(input: &Path, config: &ConfigArgs, dump: Option<&Path>) -> Result<(), CliError> {
    print!("{}", run_pipeline(input, config, dump)?.report());
    Ok(())
}

fn encrypt(args: &CryptArgs) -> Result<(), CliError> {
    let plain = read(&args.input)?;
    write(
        &args.output,
        hex::encode_upper(des::encrypt_text(&plain, args.key)),
    )
}

fn decrypt(args: &CryptArgs) -> Result<(), CliError> {
    let text = read(&args.input)?;
    let cipher = hex::decode(text.trim_ascii()).map_err(|e| CliError::Ciphertext(e.to_string()))?;
    write(&args.output, des::decrypt_text(&cipher, args.key)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Keygen {
            input,
            dump,
            config,
        } => keygen(input, config, dump.as_deref()),
        Command::Inspect {
            input,
            dump,
            config,
        } => inspect(input, config, dump.as_deref()),
        Command::Encrypt(args) => encrypt(args),
        Command::Decrypt(args) => decrypt(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("biokey: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
