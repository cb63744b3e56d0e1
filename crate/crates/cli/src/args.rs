use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "stokes", version, about = "Exact computations with finite Stokes structures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Input JSON file; repeat for several
    #[arg(long, short, global = true)]
    pub input: Vec<PathBuf>,
    /// Write the result here instead of stdout
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Worker threads for independent input files
    #[arg(long, default_value_t = 1, global = true)]
    pub jobs: usize,
    /// Algorithm variant for `split` and `cover`
    #[arg(long, global = true)]
    pub strategy: Option<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Check a fibration or functor
    Validate,
    /// Exponential data to its stratified circle
    BuildCircle,
    /// Substitute z ↦ z^d
    Kummer {
        #[arg(long)]
        d: u64,
    },
    /// Sorted Stokes directions of every pair of values
    Directions,
    /// Punctual splitting and cocartesian check, with witnesses
    IsStokes,
    /// Global splitting or a witness that none exists
    Split,
    /// Graded functor along a level map
    Grade {
        #[arg(long)]
        level: Option<usize>,
    },
    /// Induced functor along a level map
    Induce {
        #[arg(long)]
        level: Option<usize>,
    },
    /// Split a functor into its level data
    Disassemble {
        #[arg(long)]
        level: Option<usize>,
    },
    /// Rebuild a functor from level data
    Assemble {
        #[arg(long)]
        level: Option<usize>,
    },
    /// Cohomology of the Hom complex between one or two functors
    Ext,
    /// Ext of a functor with itself shifted by one
    TangentDims,
    /// Elementarity of a closed arc or of polyhedral data
    Elementary {
        /// Window as START:LEN in stratum positions
        #[arg(long, conflicts_with_all = ["from", "to"])]
        window: Option<String>,
        /// Start of the arc as a point `re,im`
        #[arg(long, requires = "to", allow_hyphen_values = true)]
        from: Option<String>,
        /// End of the arc as a point `re,im`
        #[arg(long, requires = "from", allow_hyphen_values = true)]
        to: Option<String>,
        #[arg(long)]
        level: Option<usize>,
    },
    /// Elementary cover of a stratified circle
    Cover {
        /// Cover the graded stage of this level instead
        #[arg(long)]
        level: Option<usize>,
    },
    /// Merge redundant strata of a circle fibration
    Collapse,
    /// DOT rendering of a base, fibration or functor
    ExportDot,
}
