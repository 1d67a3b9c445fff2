//! Command-line pipeline: mesh generation, eigenpairs, mode isolation,
//! reaction-diffusion simulation and pattern matching, driven by one TOML file.

pub mod commands;
pub mod config;
pub mod deform;
pub mod error;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::RunConfig;
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "modeiso", version, about = "Isolate Laplacian eigenmodes with reaction-diffusion patterns")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the mesh and write mesh.vtk.
    Mesh(CommonArgs),
    /// Compute eigenpairs; writes eigenvalues.csv and eigenvectors.vtk.
    Eigs(CommonArgs),
    /// Find (d, gamma) isolating the target mode; writes isolation.json.
    Isolate(CommonArgs),
    /// Simulate at the isolated or given (d, gamma); writes snapshots, history and outcome.
    Simulate(CommonArgs),
    /// Compare a pattern with the computed eigenspaces; writes match.json.
    Match(CommonArgs),
    /// Eigs, isolate, simulate and match in sequence.
    Pipeline(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// TOML run configuration.
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Output directory (overrides `output` in the configuration).
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Seed for the eigensolver and the initial condition (overrides the configuration).
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
}

impl Command {
    fn args(&self) -> &CommonArgs {
        match self {
            Self::Mesh(a) | Self::Eigs(a) | Self::Isolate(a) | Self::Simulate(a) | Self::Match(a) | Self::Pipeline(a) => a,
        }
    }
}

/// Loads the configuration, applies overrides and runs the command. Returns
/// the lines to print on success.
pub fn execute(command: &Command) -> Result<Vec<String>, CliError> {
    use commands::*;
    let args = command.args();
    let mut cfg = RunConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.override_seed(seed);
    }
    if let Some(out) = &args.out {
        cfg.output = out.clone();
    }
    let run = Run::new(&cfg, cfg.output.clone());
    let lines = match command {
        Command::Mesh(_) => {
            let s = cmd_mesh(&run)?;
            vec![format!(
                "{} mesh: {} vertices, {} cells, measure {} -> {}",
                s.kind,
                s.vertices,
                s.cells,
                s.measure,
                s.path.display()
            )]
        }
        Command::Eigs(_) => {
            let s = cmd_eigs(&run)?;
            let mut lines: Vec<String> = s
                .eigenvalues
                .iter()
                .zip(&s.residuals)
                .enumerate()
                .map(|(i, (l, r))| format!("{i:4} {l:.10} {r:.2e}"))
                .collect();
            lines.extend(s.files.iter().map(|f| format!("wrote {}", f.display())));
            lines
        }
        Command::Isolate(_) => {
            let r = cmd_isolate(&run)?;
            vec![isolation_line(&r)]
        }
        Command::Simulate(_) => {
            let s = cmd_simulate(&run)?;
            vec![outcome_line(&s.report)]
        }
        Command::Match(_) => {
            let m = cmd_match(&run)?;
            vec![match_line(&m)]
        }
        Command::Pipeline(_) => {
            let p = cmd_pipeline(&run)?;
            vec![isolation_line(&p.isolation), outcome_line(&p.outcome), match_line(&p.matching)]
        }
    };
    Ok(lines)
}

fn isolation_line(r: &commands::IsolationReport) -> String {
    format!(
        "{}: d = {}, gamma = {}, window = ({}, {}), excited {:?}",
        r.status, r.d, r.gamma, r.window[0], r.window[1], r.excited
    )
}

fn outcome_line(r: &commands::OutcomeJson) -> String {
    format!(
        "{} at t = {} after {} steps, derivative norm {:.3e}",
        r.status, r.time, r.steps, r.final_derivative
    )
}

fn match_line(m: &commands::MatchJson) -> String {
    if m.uniform {
        return "pattern is uniform; correlation 0".into();
    }
    format!(
        "best eigenspace {:?} (lambda = {}), correlation {:.6}, residual {:.6}",
        m.eigenspace, m.best_eigenvalue, m.correlation, m.projection_residual
    )
}
