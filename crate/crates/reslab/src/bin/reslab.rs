//! Command-line driver: JSON config in, CSV tables out.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical or I/O failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use reslab::cli::{
    cmd_capmat, cmd_floquet, cmd_hamiltonian, cmd_tightbinding, CapmatOptions, FloquetOptions,
    HamiltonianOptions, TightBindingOptions,
};
use reslab::config::ExperimentConfig;
use reslab::Error;

#[derive(Parser)]
#[command(
    name = "reslab",
    version,
    about = "Capacitance matrices, Floquet spectra and tight-binding models of subwavelength resonator systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Path to the JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for the CSV tables (created if missing).
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Also emit an advisory plotting script template.
    #[arg(long)]
    plot_script: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Boundary-element capacitance matrix of the configured system.
    Capmat {
        #[command(flatten)]
        common: Common,
        /// Also emit a convergence table across refinements 0..=refinement.
        #[arg(long)]
        sweep_refinement: bool,
        /// Also emit the dilute-formula matrix and an entrywise comparison.
        #[arg(long)]
        dilute: bool,
        /// Export the surface mesh as an OFF file.
        #[arg(long)]
        mesh_off: bool,
    },
    /// Floquet quasifrequencies of the modulated Hill system.
    Floquet {
        #[command(flatten)]
        common: Common,
        /// Comma-separated modulation amplitudes, one table block each.
        #[arg(long, value_delimiter = ',')]
        epsilon_sweep: Option<Vec<f64>>,
    },
    /// Static Hamiltonian, modulated transform and Hermitianity diagnostics.
    Hamiltonian {
        #[command(flatten)]
        common: Common,
        /// Comma-separated amplitudes for the Hermitianity-defect sweep.
        #[arg(long, value_delimiter = ',')]
        epsilon_sweep: Option<Vec<f64>>,
        /// Emit only the static Hamiltonian.
        #[arg(long)]
        static_only: bool,
    },
    /// Dilute tight-binding approximant, spectra comparison and
    /// nearest-neighbour truncation report.
    Tightbinding {
        #[command(flatten)]
        common: Common,
        /// Comma-separated diluteness values for the sweep tables.
        #[arg(long, value_delimiter = ',')]
        eta_sweep: Option<Vec<f64>>,
    },
}

fn run() -> Result<Vec<PathBuf>, Error> {
    let cli = Cli::parse();

    if let Ok(threads) = std::env::var("RESLAB_THREADS") {
        let threads: usize = threads
            .parse()
            .map_err(|_| Error::Config(format!("RESLAB_THREADS must be an integer, got {threads:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Config(format!("cannot configure thread pool: {e}")))?;
    }

    match cli.command {
        Command::Capmat {
            common,
            sweep_refinement,
            dilute,
            mesh_off,
        } => {
            let config = ExperimentConfig::from_path(&common.config)?;
            let options = CapmatOptions {
                sweep_refinement,
                dilute,
                mesh_off,
                plot_script: common.plot_script,
            };
            cmd_capmat(&config, &options, &common.out)
        }
        Command::Floquet {
            common,
            epsilon_sweep,
        } => {
            let config = ExperimentConfig::from_path(&common.config)?;
            let options = FloquetOptions {
                epsilon_sweep,
                plot_script: common.plot_script,
            };
            cmd_floquet(&config, &options, &common.out)
        }
        Command::Hamiltonian {
            common,
            epsilon_sweep,
            static_only,
        } => {
            let config = ExperimentConfig::from_path(&common.config)?;
            let options = HamiltonianOptions {
                epsilon_sweep,
                static_only,
                plot_script: common.plot_script,
            };
            cmd_hamiltonian(&config, &options, &common.out)
        }
        Command::Tightbinding { common, eta_sweep } => {
            let config = ExperimentConfig::from_path(&common.config)?;
            let options = TightBindingOptions {
                eta_sweep,
                plot_script: common.plot_script,
            };
            cmd_tightbinding(&config, &options, &common.out)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(files) => {
            for file in files {
                println!("wrote {}", file.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Config(_) | Error::Geometry(_) => ExitCode::from(2),
                Error::Numerical(_) | Error::Io(_) => ExitCode::from(3),
            }
        }
    }
}
