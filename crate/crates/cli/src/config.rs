//! Experiment descriptions. Each command's arguments double as the schema of
//! a config file, so a run is described either by flags or by a file. In
//! files, grouped flags live in nested objects (`lattice`, `domain`,
//! `sampling`, `rectangle`).

use std::fmt;
use std::str::FromStr;

use clap::{Args, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Where the modulus of a percolation lattice comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum AlphaSource {
    /// Random-walk isotropic modulus.
    Rw,
    /// Circle packing modulus of the dual triangulation.
    Cp,
    Explicit(Complex64),
}

impl FromStr for AlphaSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "rw" => Ok(AlphaSource::Rw),
            "cp" => Ok(AlphaSource::Cp),
            _ => {
                let [x, y] = parse_pair(s)?;
                if y == 0.0 {
                    return Err(format!("modulus {s} is real"));
                }
                Ok(AlphaSource::Explicit(Complex64::new(x, y)))
            }
        }
    }
}

impl TryFrom<String> for AlphaSource {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<AlphaSource> for String {
    fn from(a: AlphaSource) -> String {
        a.to_string()
    }
}

impl fmt::Display for AlphaSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaSource::Rw => f.write_str("rw"),
            AlphaSource::Cp => f.write_str("cp"),
            AlphaSource::Explicit(z) => write!(f, "{},{}", z.re, z.im),
        }
    }
}

fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [x, y] => Ok([
            x.parse().map_err(|_| format!("bad number {x:?} in {s:?}"))?,
            y.parse().map_err(|_| format!("bad number {y:?} in {s:?}"))?,
        ]),
        _ => Err(format!("expected \"x,y\", got {s:?}")),
    }
}

/// Points written `x,y;x,y;...`.
pub fn parse_points(s: &str) -> Result<Vec<Complex64>, String> {
    s.split(';').filter(|p| !p.trim().is_empty()).map(|p| parse_pair(p).map(|[x, y]| Complex64::new(x, y))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    /// Unit square, marks at its corners counterclockwise from the origin.
    Square,
    /// Equilateral triangle of side 1, marks at its corners.
    Triangle,
}

/// The lattice: a 3-regular graph with a modulus; percolation runs on the
/// triangulation dual to its embedding.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeArgs {
    /// Built-in graph name (T_h, T_s, T_s_refined) or a graph file.
    #[arg(long, default_value = "T_h")]
    #[serde(default = "default_graph")]
    pub graph: String,
    /// Modulus: rw, cp, or an explicit "x,y".
    #[arg(long, default_value = "rw")]
    #[serde(default = "default_alpha")]
    pub alpha: AlphaSource,
}

impl Default for LatticeArgs {
    fn default() -> Self {
        LatticeArgs { graph: default_graph(), alpha: default_alpha() }
    }
}

/// A polygon with boundary marks.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainArgs {
    #[arg(long, value_enum, default_value = "square")]
    #[serde(default = "default_shape")]
    pub shape: Shape,
    /// Custom polygon "x,y;x,y;..." (counterclockwise); overrides --shape.
    #[arg(long)]
    #[serde(default)]
    pub polygon: Option<String>,
    /// Boundary marks "x,y;..." in counterclockwise order; defaults to the
    /// first polygon corners.
    #[arg(long)]
    #[serde(default)]
    pub marks: Option<String>,
}

impl Default for DomainArgs {
    fn default() -> Self {
        DomainArgs { shape: default_shape(), polygon: None, marks: None }
    }
}

/// Trial count and seed for Monte Carlo commands.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingArgs {
    #[arg(long, default_value_t = 10_000)]
    #[serde(default = "default_trials")]
    pub trials: u64,
    /// Required: all randomness derives from it.
    #[arg(long)]
    #[serde(default)]
    pub seed: Option<u64>,
}

impl Default for SamplingArgs {
    fn default() -> Self {
        SamplingArgs { trials: default_trials(), seed: None }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbedArgs {
    #[command(flatten)]
    #[serde(default)]
    pub lattice: LatticeArgs,
    /// Also draw a patch of the embedding as SVG.
    #[arg(long)]
    #[serde(default)]
    pub svg: bool,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulusArgs {
    #[arg(long, default_value = "T_h")]
    #[serde(default = "default_graph")]
    pub graph: String,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PackArgs {
    /// Graph whose dual is packed (or a triangulation, packed as is).
    #[arg(long, default_value = "T_s")]
    #[serde(default = "default_pack_graph")]
    pub graph: String,
    #[arg(long, default_value_t = 1e-12)]
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[arg(long, default_value_t = 1_000_000)]
    #[serde(default = "default_max_iterations")]
    pub max_iterations: u64,
    #[arg(long)]
    #[serde(default)]
    pub svg: bool,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossArgs {
    #[command(flatten)]
    #[serde(default)]
    pub lattice: LatticeArgs,
    #[command(flatten)]
    #[serde(default)]
    pub domain: DomainArgs,
    /// Mesh sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub delta: Vec<f64>,
    #[arg(long, default_value_t = 0.5)]
    #[serde(default = "default_p")]
    pub p: f64,
    #[command(flatten)]
    #[serde(default)]
    pub sampling: SamplingArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CardyArgs {
    #[command(flatten)]
    #[serde(default)]
    pub lattice: LatticeArgs,
    /// Values of |CD|/|CA| in the equilateral triangle, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub ratio: Vec<f64>,
    #[arg(long)]
    pub delta: f64,
    #[command(flatten)]
    #[serde(default)]
    pub sampling: SamplingArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HfieldArgs {
    #[command(flatten)]
    #[serde(default)]
    pub lattice: LatticeArgs,
    #[command(flatten)]
    #[serde(default)]
    pub domain: DomainArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    pub delta: Vec<f64>,
    /// Contour circle centre "x,y".
    #[arg(long, default_value = "0.5,0.5")]
    #[serde(default = "default_centre")]
    pub centre: String,
    #[arg(long, default_value_t = 0.25)]
    #[serde(default = "default_radius")]
    pub radius: f64,
    /// Also write the pointwise fields along the contour.
    #[arg(long)]
    #[serde(default)]
    pub field: bool,
    #[command(flatten)]
    #[serde(default)]
    pub sampling: SamplingArgs,
}

/// A rectangle of the centered square lattice.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RectangleArgs {
    #[arg(long)]
    pub width: usize,
    #[arg(long)]
    pub height: usize,
    /// 1 swaps the two face-centre types.
    #[arg(long, default_value_t = 0)]
    #[serde(default)]
    pub parity: usize,
    /// Marks "x,y;..." counterclockwise; defaults to a left-to-right crossing.
    #[arg(long)]
    #[serde(default)]
    pub marks: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixedArgs {
    #[command(flatten)]
    pub rectangle: RectangleArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    pub q: Vec<f64>,
    #[command(flatten)]
    #[serde(default)]
    pub sampling: SamplingArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PivotalArgs {
    #[command(flatten)]
    pub rectangle: RectangleArgs,
    /// Sorted grid in [0, 1/2].
    #[arg(long, value_delimiter = ',', required = true)]
    pub q_grid: Vec<f64>,
    #[command(flatten)]
    #[serde(default)]
    pub sampling: SamplingArgs,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Experiment {
    /// Balanced embedding, edge vectors and psi.
    Embed(EmbedArgs),
    /// Random-walk and circle packing moduli with diagnostics.
    Modulus(ModulusArgs),
    /// Periodic circle packing.
    Pack(PackArgs),
    /// Crossing probabilities of a marked domain.
    Cross(CrossArgs),
    /// Crossing probabilities in the equilateral triangle.
    Cardy(CardyArgs),
    /// Contour integrals of the separation fields.
    Hfield(HfieldArgs),
    /// Mixed percolation crossing probabilities.
    Mixed(MixedArgs),
    /// Russo derivative estimates and their integral.
    Pivotal(PivotalArgs),
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Embed(_) => "embed",
            Experiment::Modulus(_) => "modulus",
            Experiment::Pack(_) => "pack",
            Experiment::Cross(_) => "cross",
            Experiment::Cardy(_) => "cardy",
            Experiment::Hfield(_) => "hfield",
            Experiment::Mixed(_) => "mixed",
            Experiment::Pivotal(_) => "pivotal",
        }
    }

    fn sampling(&self) -> Option<&SamplingArgs> {
        match self {
            Experiment::Cross(a) => Some(&a.sampling),
            Experiment::Cardy(a) => Some(&a.sampling),
            Experiment::Hfield(a) => Some(&a.sampling),
            Experiment::Mixed(a) => Some(&a.sampling),
            Experiment::Pivotal(a) => Some(&a.sampling),
            _ => None,
        }
    }

    pub fn seed(&self) -> Option<u64> {
        self.sampling().and_then(|s| s.seed)
    }

    /// Checks what the argument types cannot express.
    pub fn validate(&self) -> Result<(), String> {
        if let Some(s) = self.sampling() {
            if s.seed.is_none() {
                return Err(format!("{} needs an explicit seed", self.name()));
            }
            if s.trials == 0 {
                return Err("trials must be positive".into());
            }
        }
        let deltas: &[f64] = match self {
            Experiment::Cross(a) => &a.delta,
            Experiment::Cardy(a) => std::slice::from_ref(&a.delta),
            Experiment::Hfield(a) => &a.delta,
            _ => &[],
        };
        if deltas.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            return Err("mesh sizes must be positive".into());
        }
        if matches!(self, Experiment::Cross(a) if a.delta.is_empty()) || matches!(self, Experiment::Hfield(a) if a.delta.is_empty()) {
            return Err("at least one mesh size is required".into());
        }
        Ok(())
    }

    /// Canonical JSON, the input of the config hash.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("configs serialise")
    }
}

fn default_graph() -> String {
    "T_h".into()
}

fn default_pack_graph() -> String {
    "T_s".into()
}

fn default_alpha() -> AlphaSource {
    AlphaSource::Rw
}

fn default_shape() -> Shape {
    Shape::Square
}

fn default_trials() -> u64 {
    10_000
}

fn default_tolerance() -> f64 {
    1e-12
}

fn default_max_iterations() -> u64 {
    1_000_000
}

fn default_p() -> f64 {
    0.5
}

fn default_centre() -> String {
    "0.5,0.5".into()
}

fn default_radius() -> f64 {
    0.25
}
