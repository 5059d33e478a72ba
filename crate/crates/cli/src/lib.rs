//! The `skelss` command-line front end.

pub mod commands;
pub mod config;
pub mod error;
pub mod render;
pub mod rundir;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use skelss_core::Backend;

use crate::config::PathChoice;
pub use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "skelss", version, about = "Skeletonisation scale-spaces of binary shapes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the medial skeleton of a PBM image.
    Skeletonize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "thinned")]
        backend: Backend,
        /// Directory for `skeleton.skel`; without it the skeleton goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evolve a scale-space and write every artifact of the run.
    Evolve(EvolveArgs),
    /// Check a run directory against every applicable scale-space property.
    Verify {
        run: PathBuf,
        /// Print `key=value` lines instead of the text report.
        #[arg(long)]
        key_value: bool,
    },
    /// Tabulate skeleton size and missing pixels of several runs at checkpoints.
    Compare {
        #[arg(required = true)]
        runs: Vec<PathBuf>,
        /// Comma-separated skeleton sizes; defaults to the first run's config.
        #[arg(long)]
        checkpoints: Option<String>,
        /// Write the CSV here as well as to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw every frame of a run as a grayscale PGM overlay.
    Render {
        run: PathBuf,
        /// Output directory, `<run>/render` by default.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    /// `key=value` config file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub backend: Option<Backend>,
    #[arg(long)]
    pub path: Option<PathChoice>,
    #[arg(long, value_parser = config::parse_positive)]
    pub r: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_parser = config::parse_positive)]
    pub stride: Option<usize>,
    #[arg(long)]
    pub checkpoints: Option<String>,
}

/// Parse `args` (including the program name), run the command, and return
/// the exit status. Normal output goes to `out`, errors to `err`.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    match commands::dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
