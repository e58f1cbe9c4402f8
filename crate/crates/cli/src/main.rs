//! `niucert`: unipotent audits, distortion profiles, non-distortion
//! certificates and splitting audits for finitely generated matrix groups.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "niucert", version, about = "Exact audits of finitely generated matrix groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Where the group comes from.
#[derive(Args, Debug, Clone)]
pub struct Source {
    /// Built-in group, e.g. `bs12` or `lamplighter:3`.
    #[arg(long, conflicts_with = "input")]
    pub gallery: Option<String>,
    /// JSON group definition.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct BallArgs {
    /// Cayley-ball radius.
    #[arg(short = 'r', long, default_value_t = 6)]
    pub radius: u32,
    /// Maximum number of ball elements.
    #[arg(long, default_value_t = 2_000_000)]
    pub budget: usize,
}

#[derive(Args, Debug, Clone)]
pub struct Output {
    /// Emit JSON (the default for every command except `distortion`).
    #[arg(long, conflicts_with = "csv")]
    pub json: bool,
    /// Emit CSV (`distortion` only).
    #[arg(long)]
    pub csv: bool,
    /// Write the report here instead of standard output.
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
}

fn precision_bits(s: &str) -> Result<u64, String> {
    let p: u64 = s.parse().map_err(|e| format!("{e}"))?;
    if p < 8 {
        return Err("precision must be at least 8 bits".into());
    }
    Ok(p)
}

fn positive(s: &str) -> Result<u64, String> {
    let n: u64 = s.parse().map_err(|e| format!("{e}"))?;
    if n < 1 {
        return Err("must be at least 1".into());
    }
    Ok(n)
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Unipotent audit of a ball and per-generator virtual unipotence.
    Classify {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        ball: BallArgs,
        /// Largest order computed for finite-order elements.
        #[arg(long, default_value_t = 64)]
        order_bound: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Word lengths of an abelian subgroup against the l1 norm.
    Distortion {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        ball: BallArgs,
        /// Comma-separated basis words, e.g. `a` or `a,b`.
        #[arg(long, required = true)]
        subgroup: String,
        /// Exponent vectors with `||n||_1 <= range`.
        #[arg(long, default_value_t = 16, value_parser = positive)]
        range: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Build a non-distortion certificate for an abelian subgroup.
    Certify {
        #[command(flatten)]
        source: Source,
        #[arg(long, required = true)]
        subgroup: String,
        /// Interval precision in bits.
        #[arg(long, default_value_t = 64, value_parser = precision_bits)]
        precision: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Check a certificate against a Cayley ball.
    Verify {
        /// Certificate JSON written by `certify`.
        certificate: PathBuf,
        /// Optional gallery entry the certificate must belong to.
        #[arg(long)]
        gallery: Option<String>,
        #[command(flatten)]
        ball: BallArgs,
        #[arg(long, default_value_t = 20, value_parser = positive)]
        range: u64,
        /// Random ball pairs for the subadditivity check.
        #[arg(long, default_value_t = 1000)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Kernel audit of theta and a ball-scale splitting witness.
    Split {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        ball: BallArgs,
        /// Comma-separated words generating the central subgroup.
        #[arg(long, required = true)]
        central: String,
        #[arg(long, default_value_t = 10, value_parser = positive)]
        range: u64,
        #[arg(long, default_value_t = 64, value_parser = precision_bits)]
        precision: u64,
        #[arg(long, default_value_t = 64)]
        order_bound: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Built-in example groups.
    Gallery {
        #[command(subcommand)]
        action: GalleryAction,
    },
}

#[derive(Subcommand, Debug)]
enum GalleryAction {
    /// Names, descriptions and expected classifications.
    List {
        #[command(flatten)]
        out: Output,
    },
    /// Identity checks plus the unipotent audit, compared with expectations.
    Run {
        name: String,
        #[command(flatten)]
        ball: BallArgs,
        #[arg(long, default_value_t = 10, value_parser = positive)]
        range: u64,
        #[arg(long, default_value_t = 64)]
        order_bound: u64,
        #[command(flatten)]
        out: Output,
    },
    /// The JSON definition of an entry, usable with `--input`.
    Export {
        name: String,
        #[command(flatten)]
        out: Output,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Classify { source, ball, order_bound, out } => commands::classify(&source, &ball, order_bound, &out),
        Command::Distortion { source, ball, subgroup, range, out } => {
            commands::distortion(&source, &ball, &subgroup, range, &out)
        }
        Command::Certify { source, subgroup, precision, out } => commands::certify(&source, &subgroup, precision, &out),
        Command::Verify { certificate, gallery, ball, range, pairs, seed, out } => {
            commands::verify(&certificate, gallery.as_deref(), &ball, range, pairs, seed, &out)
        }
        Command::Split { source, ball, central, range, precision, order_bound, out } => {
            commands::split(&source, &ball, &central, range, precision, order_bound, &out)
        }
        Command::Gallery { action } => match action {
            GalleryAction::List { out } => commands::gallery_list(&out),
            GalleryAction::Run { name, ball, range, order_bound, out } => {
                commands::gallery_run(&name, &ball, range, order_bound, &out)
            }
            GalleryAction::Export { name, out } => commands::gallery_export(&name, &out),
        },
    };
    match result {
        Ok(status) => ExitCode::from(status as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
