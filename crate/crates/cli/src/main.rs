use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;

use output::CliError;

#[derive(Parser, Debug)]
#[command(name = "voltspec", version, about = "Spectra of memory-kernel wave symbols", long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Kernel JSON, inline or as a file path.
    #[arg(long)]
    pub kernel: Option<String>,
    #[arg(long, default_value_t = 0.0)]
    pub theta: f64,
    /// Comma-separated mode eigenvalues a_n.
    #[arg(long, conflicts_with = "a_grid")]
    pub modes: Option<String>,
    /// Geometric grid start:ratio:count.
    #[arg(long = "a-grid")]
    pub a_grid: Option<String>,
    /// Directory receiving every output file; stdout otherwise.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Zeros of every listed mode.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Also write a gnuplot script next to the CSV (needs --out).
        #[arg(long)]
        gnuplot: bool,
    },
    /// Convergence of the upper zero towards its asymptotic form.
    Asymptotics {
        #[command(flatten)]
        common: Common,
        /// Upper limit on terms kept from a power-law family.
        #[arg(long, default_value_t = 30_000)]
        max_terms: usize,
    },
    /// Stability verdict and asymptotic regime.
    Classify {
        #[command(flatten)]
        common: Common,
    },
    /// Analytic, companion and ODE-matrix roots compared, with Vieta residuals.
    OracleCheck {
        #[command(flatten)]
        common: Common,
        /// Random cases drawn when no kernel is given.
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, hide = true)]
        perturb: Option<f64>,
    },
    /// Time-domain integration against the spectral abscissa.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long = "T", default_value_t = 200.0)]
        t_end: f64,
        /// Step size; defaults to the smaller of 1e-2 and the stability limit.
        #[arg(long)]
        dt: Option<f64>,
        /// Keep every k-th trace sample; chosen to give about 5000 rows by default.
        #[arg(long)]
        every: Option<usize>,
    },
    /// Decay of |K^| and |lambda K^'| along rays, and |lambda (K^ - h)| for families.
    Probe {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1e-2)]
        delta: f64,
        /// Comma-separated ray angles in radians.
        #[arg(
            long,
            allow_hyphen_values = true,
            default_value = "0,2.356194490192345,-2.356194490192345"
        )]
        rays: String,
        /// Radii as start:ratio:count.
        #[arg(long, default_value = "10:10:4")]
        radii: String,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Spectrum { common, gnuplot } => commands::spectrum(&common, gnuplot),
        Command::Asymptotics { common, max_terms } => commands::asymptotics(&common, max_terms),
        Command::Classify { common } => commands::classify(&common),
        Command::OracleCheck { common, count, perturb } => commands::oracle_check(&common, count, perturb),
        Command::Simulate {
            common,
            t_end,
            dt,
            every,
        } => commands::simulate(&common, t_end, dt, every),
        Command::Probe {
            common,
            delta,
            rays,
            radii,
        } => commands::probe(&common, delta, &rays, &radii),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("voltspec: {e}");
            ExitCode::from(e.code())
        }
    }
}
