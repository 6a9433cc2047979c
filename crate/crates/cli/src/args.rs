use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "skewcode", version, about = "Sum-rank and Hamming metric codes from skew polynomial quotients")]
pub struct Cli {
    /// Worker threads for codeword enumeration (results do not depend on it).
    #[arg(long, global = true, env = "SKEWCODE_JOBS")]
    pub jobs: Option<usize>,
    /// Write the document here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a code and print its generators and twist-condition certificate.
    Construct(CodeArgs),
    /// Build a code, compute its exact minimum distance and the optimality verdict.
    Verify(CodeArgs),
    /// Möbius counts of the polynomial sets with a brute-force cross-check.
    Count(CountArgs),
    /// Idealizers, centralizer and center of an S or D code.
    Invariants(CodeArgs),
    /// Export generators as JSON or CSV.
    Export(ExportArgs),
    /// Run the built-in acceptance suite.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug, Clone)]
pub struct CodeArgs {
    /// S, D, MDS_S or MDS_D.
    #[arg(long)]
    pub family: String,
    #[arg(long)]
    pub q: u32,
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    #[arg(long, default_value_t = 1)]
    pub s: u32,
    /// Number of blocks (S and D); ignored with --tuple.
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub k: usize,
    /// Twist automorphism y -> y^(p^h).
    #[arg(long)]
    pub h: Option<u32>,
    /// Twist for S and MDS_S: integer code, `alpha`, or `alpha^N`.
    #[arg(long)]
    pub eta: Option<String>,
    /// Twist for D and MDS_D, same syntax as --eta.
    #[arg(long)]
    pub gamma: Option<String>,
    /// Subgroup T for MDS_S: full, squares, trivial, an order, or q0:order.
    #[arg(long = "T")]
    pub subgroup: Option<String>,
    /// Explicit tuple: polynomials separated by `;`, coefficients (integer codes) low degree first.
    #[arg(long)]
    pub tuple: Option<String>,
    #[arg(long, default_value_t = skewcode::quotient::DEFAULT_SEED)]
    pub seed: u64,
    /// Codeword enumeration cap.
    #[arg(long, default_value_t = skewcode::codes::DEFAULT_CODE_CAP)]
    pub cap: u128,
    /// Samples used when the code exceeds the cap.
    #[arg(long, default_value_t = 1 << 16)]
    pub samples: u64,
}

#[derive(Args, Debug)]
pub struct CountArgs {
    #[arg(long)]
    pub q: u32,
    #[arg(long)]
    pub s: u32,
    /// Subgroup T: full, squares, trivial, an order, or q0:order.
    #[arg(long = "T", default_value = "full")]
    pub subgroup: String,
    /// Largest q^s enumerated for the cross-check.
    #[arg(long, default_value_t = 1 << 16)]
    pub cap: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct ExportArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = skewcode::selftest::DEFAULT_SELFTEST_SEED)]
    pub seed: u64,
    /// Run a single criterion (1-9).
    #[arg(long)]
    pub criterion: Option<u32>,
}
