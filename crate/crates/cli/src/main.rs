use std::fs::File;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use qbeam::moments::moment_report;
use qbeam::report::{self, Format};
use qbeam::{coherent_series, excited_series, BeamGeometry, Deformation, Domain, Error, SampledProfile};

const EXIT_OTHER: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CONSTRAINT: u8 = 3;
const EXIT_INGESTION: u8 = 4;

#[derive(Parser)]
#[command(name = "qbeam", version, about = "q-deformed coherent states and beam quality")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Csv => Format::Csv,
            OutputFormat::Json => Format::Json,
        }
    }
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AlphaArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    alpha_re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    alpha_im: f64,
}

impl AlphaArgs {
    fn value(&self) -> Complex64 {
        Complex64::new(self.alpha_re, self.alpha_im)
    }
}

#[derive(Subcommand)]
enum Command {
    /// M_q² at |α| = 1 for p = 1..=P_MAX.
    Table {
        p_max: u32,
        #[command(flatten)]
        output: Output,
    },
    /// Closed form against the exact matrix computation.
    Mq2 {
        /// Root-of-unity order, or `inf` for q = 1.
        #[arg(long)]
        p: Deformation,
        #[command(flatten)]
        alpha: AlphaArgs,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
        /// Levels used to emulate q = 1.
        #[arg(long, default_value_t = 200)]
        levels: usize,
        #[command(flatten)]
        output: Output,
    },
    /// M_q² over a grid of orders and |α|.
    Sweep {
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<Deformation>,
        #[arg(long, value_delimiter = ',', required = true)]
        abs_alpha: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
        #[arg(long, default_value_t = 200)]
        levels: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Samples a level or coherent-state wavefunction series.
    Wavefunction {
        #[arg(long)]
        p: Deformation,
        /// Excitation level; mutually exclusive with --alpha-re/--alpha-im.
        #[arg(long, conflicts_with_all = ["alpha_re", "alpha_im"])]
        n: Option<usize>,
        #[arg(long, allow_negative_numbers = true)]
        alpha_re: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        alpha_im: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
        #[arg(long, default_value_t = 40)]
        order: usize,
        #[arg(long, default_value_t = -3.0, allow_negative_numbers = true)]
        x_min: f64,
        #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
        x_max: f64,
        #[arg(long, default_value_t = 101)]
        samples: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Second-moment M² from near-field and far-field profile CSVs.
    Moments {
        /// Columns x,intensity in the waist plane.
        #[arg(long)]
        near: PathBuf,
        /// Columns s,intensity in spatial frequency.
        #[arg(long)]
        far: PathBuf,
        #[arg(long)]
        wavelength: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Divergence, medium coupling and effective quality factor.
    Medium {
        #[arg(long)]
        p: Deformation,
        #[command(flatten)]
        alpha: AlphaArgs,
        #[arg(long)]
        wavelength: f64,
        #[arg(long)]
        waist: f64,
        #[command(flatten)]
        output: Output,
    },
}

enum Failure {
    Usage(String),
    Lib(Error),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Io(_) => EXIT_OTHER,
            Failure::Lib(e) => match e {
                Error::ConstraintViolation { .. } | Error::LevelOutOfRange { .. } => EXIT_CONSTRAINT,
                Error::Ingestion(_) | Error::AllZeroIntensity | Error::InvalidProfile(_) => EXIT_INGESTION,
                Error::InvalidOrder(_) | Error::InvalidParameter(_) => EXIT_USAGE,
                _ => EXIT_OTHER,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Lib(e) => e.to_string(),
            Failure::Io(e) => e.to_string(),
        }
    }
}

fn positive(name: &str, v: f64) -> Result<(), Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Failure::Usage(format!(
            "--{name} must be a positive finite number, got {v}"
        )))
    }
}

fn read_profile(path: &PathBuf, domain: Domain) -> Result<SampledProfile, Failure> {
    let f = File::open(path).map_err(|e| Failure::Lib(Error::Ingestion(format!("{}: {e}", path.display()))))?;
    Ok(SampledProfile::from_csv(f, domain)?)
}

fn run(command: Command) -> Result<(String, Output), Failure> {
    Ok(match command {
        Command::Table { p_max, output } => {
            if p_max < 1 {
                return Err(Failure::Usage("p_max must be at least 1".into()));
            }
            (report::table(p_max, output.format.into())?, output)
        }
        Command::Mq2 {
            p,
            alpha,
            hbar,
            levels,
            output,
        } => {
            positive("hbar", hbar)?;
            let r = report::mq2_report(p, alpha.value(), hbar, levels)?;
            (report::render_mq2(&r, output.format.into()), output)
        }
        Command::Sweep {
            p,
            abs_alpha,
            hbar,
            levels,
            output,
        } => {
            positive("hbar", hbar)?;
            let rows = report::sweep(&p, &abs_alpha, hbar, levels)?;
            (report::render_sweep(&rows, output.format.into()), output)
        }
        Command::Wavefunction {
            p,
            n,
            alpha_re,
            alpha_im,
            hbar,
            order,
            x_min,
            x_max,
            samples,
            output,
        } => {
            positive("hbar", hbar)?;
            let series = match (n, alpha_re, alpha_im) {
                (Some(n), None, None) => excited_series(p, hbar, n, order)?,
                (None, None, None) => excited_series(p, hbar, 0, order)?,
                (None, re, im) => {
                    let alpha = Complex64::new(re.unwrap_or(0.0), im.unwrap_or(0.0));
                    coherent_series(p, hbar, alpha, order)?
                }
                _ => return Err(Failure::Usage("give either --n or --alpha-re/--alpha-im".into())),
            };
            (
                report::wavefunction(&series, x_min, x_max, samples, output.format.into())?,
                output,
            )
        }
        Command::Moments {
            near,
            far,
            wavelength,
            output,
        } => {
            positive("wavelength", wavelength)?;
            let near = read_profile(&near, Domain::Space)?;
            let far = read_profile(&far, Domain::SpatialFrequency)?;
            let r = moment_report(&near, &far, wavelength)?;
            (report::render_moments(&r, output.format.into()), output)
        }
        Command::Medium {
            p,
            alpha,
            wavelength,
            waist,
            output,
        } => {
            let geometry = BeamGeometry::new(wavelength, waist)?;
            let r = report::medium_report(p, alpha.value(), geometry)?;
            (report::render_medium(&r, output.format.into()), output)
        }
    })
}

fn emit(text: &str, output: &Output) -> Result<(), Failure> {
    match &output.out {
        Some(path) => std::fs::write(path, text).map_err(Failure::Io),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(Failure::Io)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command).and_then(|(text, output)| emit(&text, &output)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
