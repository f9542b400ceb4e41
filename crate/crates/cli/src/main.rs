//! `iohfc`: command-line front end for encrypted history-feedback control.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use iohfc_core::bfv::Profile;

#[derive(Parser, Debug)]
#[command(name = "iohfc", version, about = "Encrypted dynamic control with leveled BFV")]
struct Cli {
    /// Parameter set: `default` (N = 4096) or `toy` (N = 16, insecure).
    #[arg(long, global = true, default_value = "default", value_parser = parse_profile)]
    profile: Profile,
    #[command(subcommand)]
    command: Command,
}

fn parse_profile(s: &str) -> Result<Profile, String> {
    s.parse().map_err(|e: iohfc_core::bfv::BfvError| e.to_string())
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a key set and write it in the binary wire format.
    Keygen(KeygenArgs),
    /// Convert a state-space controller into a history-feedback gain.
    Transform(TransformArgs),
    /// Quantization, stability and output-error bounds for a plant and gain.
    Analyze(AnalyzeArgs),
    /// Run the encrypted closed loop and write its trajectory.
    Simulate(SimulateArgs),
    /// Time the scheme primitives.
    Bench(BenchArgs),
    /// Transform, analyze and simulate the bundled quadruple-tank example.
    Demo(DemoArgs),
}

#[derive(Args, Debug)]
pub struct KeygenArgs {
    /// Output directory; receives params.json, pk.bin, sk.bin, rlk.bin and gk.bin.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "0", value_parser = io::parse_seed)]
    pub seed: [u8; 32],
}

#[derive(Args, Debug)]
pub struct TransformArgs {
    /// Controller JSON with row-major matrices A, B, C, D, E, F.
    #[arg(long)]
    pub controller: PathBuf,
    /// Data length L, at least the controller order.
    #[arg(long)]
    pub length: usize,
    /// Gain JSON; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Plant JSON with row-major matrices Ap, Bp, Cp.
    #[arg(long)]
    pub plant: PathBuf,
    /// Gain JSON as written by `transform`.
    #[arg(long)]
    pub gain: PathBuf,
    #[arg(long, default_value_t = 2e-4)]
    pub delta_k: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub delta_d: f64,
    /// Initial plant state; zero when omitted.
    #[arg(long, value_parser = io::parse_vector)]
    pub x0: Option<io::Floats>,
    /// Bound on the reference norm.
    #[arg(long, conflicts_with = "schedule")]
    pub b_r: Option<f64>,
    /// Reference schedule whose largest norm is used as the bound.
    #[arg(long)]
    pub schedule: Option<PathBuf>,
    /// Decay rate; the midpoint between the spectral radius and 1 when omitted.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Report JSON; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long)]
    pub plant: PathBuf,
    #[arg(long)]
    pub gain: PathBuf,
    /// Piecewise-constant references: `[{"start": 0, "r": [..]}, ..]`.
    #[arg(long)]
    pub schedule: PathBuf,
    #[arg(long)]
    pub steps: usize,
    #[arg(long, default_value_t = 2e-4)]
    pub delta_k: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub delta_d: f64,
    #[arg(long, default_value = "0", value_parser = io::parse_seed)]
    pub seed: [u8; 32],
    /// Also run the unencrypted loop and add its columns.
    #[arg(long)]
    pub plain: bool,
    /// Variance of Gaussian process and measurement noise.
    #[arg(long)]
    pub noise_var: Option<f64>,
    #[arg(long, value_parser = io::parse_vector)]
    pub x0: Option<io::Floats>,
    /// Compare every input with the plaintext integer oracle.
    #[arg(long)]
    pub check_oracle: bool,
    /// Trajectory CSV.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value = "0", value_parser = io::parse_seed)]
    pub seed: [u8; 32],
    /// Timing CSV; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DemoArgs {
    #[arg(long, default_value_t = 1400)]
    pub steps: usize,
    #[arg(long, default_value = "0", value_parser = io::parse_seed)]
    pub seed: [u8; 32],
    /// Directory for the gain, report and trajectory files.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Keygen(a) => commands::keygen(cli.profile, &a),
        Command::Transform(a) => commands::transform(&a),
        Command::Analyze(a) => commands::analyze(cli.profile, &a),
        Command::Simulate(a) => commands::simulate(cli.profile, &a),
        Command::Bench(a) => commands::bench(cli.profile, &a),
        Command::Demo(a) => commands::demo(cli.profile, &a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", format!("{e:#}").replace('\n', " "));
            ExitCode::from(1)
        }
    }
}
