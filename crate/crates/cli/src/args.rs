use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mlab_core::TolProfile;

#[derive(Debug, Parser)]
#[command(
    name = "mlab",
    version,
    about = "Conformal and Moebius invariants of surfaces, deformation families, Hazzidakis flows and similarity curves"
)]
pub struct Cli {
    /// Directory for output files and manifest.json; created if missing.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_parser = parse_profile, default_value = "default")]
    pub tol_profile: TolProfile,

    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

fn parse_profile(s: &str) -> Result<TolProfile, String> {
    TolProfile::parse(s).map_err(|e| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List or emit catalog surfaces.
    Catalog {
        #[command(subcommand)]
        action: CatalogCmd,
    },
    /// Metrical and conformal invariants of a surface.
    Invariants(SurfaceArgs),
    /// Integrability and classification residuals.
    Residuals(ResidualArgs),
    /// Apply a deformation family to invariant data.
    Deform(DeformArgs),
    /// Integrate the Hazzidakis equation.
    Hazzidakis(HazzidakisArgs),
    /// Similarity geometry of plane curves.
    Curve {
        #[command(subcommand)]
        action: CurveCmd,
    },
    /// Lightcone lift, Hill decomposition and central sphere congruence.
    Lightcone(SurfaceArgs),
    /// Run the acceptance suite.
    Selftest {
        /// Run a single criterion.
        #[arg(long)]
        criterion: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum CatalogCmd {
    List,
    /// Sample an entry on its recommended chart.
    Emit(SurfaceArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SurfaceArgs {
    /// Catalog entry name.
    #[arg(long, visible_alias = "name", conflicts_with = "graph")]
    pub surface: Option<String>,

    /// Height function z = f(x, y), e.g. "x*x - y*y" or "math::sin(x) * y".
    #[arg(long)]
    pub graph: Option<String>,

    /// Chart rectangle of a graph surface.
    #[arg(long, num_args = 4, value_names = ["X0", "X1", "Y0", "Y1"], allow_negative_numbers = true)]
    pub domain: Option<Vec<f64>>,

    /// Nodes per chart direction.
    #[arg(long, default_value_t = 64)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct ResidualArgs {
    #[command(flatten)]
    pub surface: SurfaceArgs,

    /// Constant q for the constrained Willmore residual, e.g. "-0.125" or "0.1+0.2i";
    /// fitted by least squares when omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    /// T-transform, param r (real).
    T,
    /// Constrained Willmore family, param lambda (unit complex or an angle).
    Cw,
    /// Metrical lambda-deformation, param "c0;c1;..." polynomial coefficients in z.
    Lambda,
    /// Bonnet rotation, param theta.
    Bonnet,
    /// HIMC associated family, param t.
    Himc,
}

#[derive(Debug, Args)]
pub struct DeformArgs {
    #[command(flatten)]
    pub surface: SurfaceArgs,

    #[arg(long, value_enum)]
    pub family: FamilyArg,

    #[arg(long, allow_hyphen_values = true)]
    pub param: String,

    /// Constant q carried by the constrained Willmore family.
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
}

#[derive(Debug, Args)]
pub struct HazzidakisArgs {
    /// Bonnet type A, B or C.
    #[arg(long = "type")]
    pub kind: String,

    #[arg(long, allow_negative_numbers = true)]
    pub s0: f64,

    #[arg(long = "H0", allow_negative_numbers = true)]
    pub h0: Option<f64>,

    #[arg(long = "Hs0", allow_negative_numbers = true)]
    pub hs0: Option<f64>,

    #[arg(long = "Hss0", allow_negative_numbers = true)]
    pub hss0: Option<f64>,

    #[arg(long = "s-end", allow_negative_numbers = true)]
    pub s_end: f64,

    #[arg(long, allow_negative_numbers = true)]
    pub step: f64,

    /// Start on the flat solution H = -2/(K_M s).
    #[arg(long, requires = "kmobius")]
    pub flat: bool,

    #[arg(long, allow_negative_numbers = true)]
    pub kmobius: Option<f64>,

    /// e^omega at s0; defaults to the flat value with --flat and to 1 otherwise.
    #[arg(long = "e-omega0")]
    pub e_omega0: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum CurveCmd {
    /// Curvatures and angle function of a sampled curve.
    Measure(CurveSource),
    /// Burgers evolution of similarity curvature.
    Evolve(EvolveArgs),
    /// Rebuild a curve from similarity curvature samples.
    Reconstruct(ReconstructArgs),
}

#[derive(Debug, Args)]
pub struct CurveSource {
    /// CSV with columns sigma,x,y on a uniform arclength grid.
    #[arg(long, conflicts_with_all = ["circle", "logspiral"])]
    pub input: Option<PathBuf>,

    /// The input samples are periodic.
    #[arg(long)]
    pub closed: bool,

    /// Radius of a sampled circle.
    #[arg(long)]
    pub circle: Option<f64>,

    /// Log-spiral with 1/kappa_E = c2 - c1 sigma, given as "c1,c2".
    #[arg(long, allow_hyphen_values = true)]
    pub logspiral: Option<String>,

    /// Arclength range of the log-spiral.
    #[arg(long, default_value_t = 1.0)]
    pub sigma_end: f64,

    #[arg(long, default_value_t = 512)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    /// Initial similarity curvature: an expression in s or a CSV file with columns s,u.
    #[arg(long, allow_hyphen_values = true)]
    pub u0: String,

    /// Samples when u0 is an expression.
    #[arg(long, default_value_t = 256)]
    pub n: usize,

    /// Period in s when u0 is an expression; defaults to 2 pi.
    #[arg(long)]
    pub period: Option<f64>,

    /// Time step; defaults to the stability limit.
    #[arg(long)]
    pub dt: Option<f64>,

    #[arg(long, default_value_t = 100)]
    pub steps: usize,

    /// Write a frame every k steps (and always the first and last).
    #[arg(long, default_value_t = 0)]
    pub dump_every: usize,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    /// CSV with columns s,u on a uniform grid.
    #[arg(long)]
    pub input: PathBuf,

    /// Treat u as one period and integrate across the wrap.
    #[arg(long)]
    pub periodic: bool,
}
