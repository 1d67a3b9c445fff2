//! The subcommands. Each reads a validated [`RunConfig`] and writes its
//! outputs below the output directory.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use modeiso::isolation::{isolate_mode, verify_isolation, IsolationOptions, IsolationResult, IsolationStatus};
use modeiso::kinetics::KineticsModel;
use modeiso::mesh::io::{read_vtk, write_vtk};
use modeiso::mesh::{self, presets};
use modeiso::pattern::{match_pattern, MatchReport};
use modeiso::reference;
use modeiso::simulator::{initial_condition, simulate_from, SimulationConfig, SimulationOutcome};
use modeiso::{assemble_mass, assemble_stiffness, smallest_eigenpairs, CsrMatrix64, Mesh64, Spectrum64};
use serde::Serialize;

use crate::config::{Generator, RunConfig, SpectrumSource};
use crate::deform::ExprMap;
use crate::error::CliError;

/// Hash and seeds stamped into every output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub config_sha256: String,
    pub eigs_seed: u64,
    pub simulation_seed: u64,
}

impl Provenance {
    pub fn of(cfg: &RunConfig) -> Self {
        Self {
            config_sha256: cfg.hash(),
            eigs_seed: cfg.eigs.seed,
            simulation_seed: cfg.simulation.seed,
        }
    }

    fn line(&self) -> String {
        format!(
            "config_sha256={} eigs_seed={} simulation_seed={}",
            self.config_sha256, self.eigs_seed, self.simulation_seed
        )
    }

    fn csv_header(&self) -> String {
        format!("# {}\n", self.line())
    }
}

/// Everything a command needs besides the configuration.
pub struct Run<'a> {
    pub cfg: &'a RunConfig,
    pub out: PathBuf,
    pub provenance: Provenance,
}

impl<'a> Run<'a> {
    pub fn new(cfg: &'a RunConfig, out: impl Into<PathBuf>) -> Self {
        Self {
            cfg,
            out: out.into(),
            provenance: Provenance::of(cfg),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn ensure_out(&self) -> Result<(), CliError> {
        fs::create_dir_all(&self.out)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", self.out.display())))
    }

    fn write(&self, name: &str, text: &str) -> Result<PathBuf, CliError> {
        self.ensure_out()?;
        let p = self.path(name);
        fs::write(&p, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display())))?;
        Ok(p)
    }

    fn write_json<S: Serialize>(&self, name: &str, value: &S) -> Result<PathBuf, CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
        text.push('\n');
        self.write(name, &text)
    }

    fn write_vtk(&self, name: &str, mesh: &Mesh64, fields: &[(&str, &[f64])], what: &str) -> Result<PathBuf, CliError> {
        self.ensure_out()?;
        let p = self.path(name);
        let title = format!("modeiso {what} {}", self.provenance.line());
        write_vtk(mesh, fields, &title, &p).map_err(CliError::context(format!("writing {}", p.display())))?;
        Ok(p)
    }
}

pub fn build_mesh(cfg: &RunConfig) -> Result<Mesh64, CliError> {
    let m = &cfg.mesh;
    let base = match m.generator {
        Generator::Interval => mesh::generate_interval(m.length.unwrap_or(1.0), m.n_cells.unwrap_or(1)),
        Generator::Rectangle => mesh::generate_rectangle(
            m.lx.unwrap_or(1.0),
            m.ly.unwrap_or(1.0),
            m.nx.unwrap_or(1),
            m.ny.unwrap_or(1),
        ),
        Generator::Disk => mesh::generate_disk(m.radius.unwrap_or(1.0), m.refinement.unwrap_or(0)),
        Generator::Icosphere => mesh::generate_icosphere(m.refinement.unwrap_or(0)),
        Generator::Ball => mesh::generate_ball(m.refinement.unwrap_or(0)),
        Generator::Tube => mesh::generate_tube(
            m.length.unwrap_or(4.0),
            m.radius.unwrap_or(1.0),
            m.closed_ends.unwrap_or(false),
            m.refinement.unwrap_or(0),
        ),
        Generator::Off => {
            let path = m.path.as_ref().expect("validated");
            let mesh = mesh::io::read_off(path).map_err(CliError::context(format!("reading {}", path.display())))?;
            return deform(cfg, mesh);
        }
    }
    .map_err(CliError::context("building mesh"))?;
    deform(cfg, base)
}

fn deform(cfg: &RunConfig, base: Mesh64) -> Result<Mesh64, CliError> {
    let m = &cfg.mesh;
    if let Some(name) = &m.deformation {
        let map = presets::by_name::<f64>(name).expect("validated");
        return base.map_vertices(map).map_err(CliError::context(format!("applying deformation `{name}`")));
    }
    if let Some(expr) = &m.deformation_expr {
        let map = ExprMap::new(expr).map_err(|e| CliError::Config(format!("mesh.deformation_expr: {e}")))?;
        return map
            .deform(&base)
            .map_err(|e| CliError::Config(format!("mesh.deformation_expr: {e}")));
    }
    Ok(base)
}

/// Eigenvalues from the analytic formulas for the undeformed domain.
pub fn analytic_eigenvalues(cfg: &RunConfig) -> Result<Vec<f64>, CliError> {
    let m = &cfg.mesh;
    let n = cfg.eigs.count;
    let ctx = CliError::context("analytic spectrum");
    let values = match m.generator {
        Generator::Interval => reference::interval_neumann(m.length.unwrap_or(1.0), n),
        Generator::Rectangle => reference::rectangle_neumann(m.lx.unwrap_or(1.0), m.ly.unwrap_or(1.0), n).map_err(ctx)?,
        Generator::Icosphere => reference::sphere_surface_spectrum(n),
        Generator::Ball => reference::sphere_bulk_spectrum(n).map_err(ctx)?,
        _ => return Err(CliError::Config("eigs.source: no analytic spectrum for this generator".into())),
    };
    Ok(values.into_iter().map(|e| e.value).collect())
}

pub struct Discretization {
    pub mesh: Mesh64,
    pub mass: CsrMatrix64,
    pub stiffness: CsrMatrix64,
}

impl Discretization {
    pub fn new(mesh: Mesh64) -> Result<Self, CliError> {
        let mass = assemble_mass(&mesh).map_err(CliError::context("assembling mass matrix"))?;
        let stiffness = assemble_stiffness(&mesh).map_err(CliError::context("assembling stiffness matrix"))?;
        Ok(Self { mesh, mass, stiffness })
    }

    pub fn spectrum(&self, cfg: &RunConfig) -> Result<Spectrum64, CliError> {
        let e = &cfg.eigs;
        if e.count > self.mesh.n_vertices() {
            return Err(CliError::Config(format!(
                "eigs.count: {} exceeds the {} mesh vertices",
                e.count,
                self.mesh.n_vertices()
            )));
        }
        smallest_eigenpairs(&self.stiffness, &self.mass, e.count, e.tol, e.seed)
            .map_err(CliError::context("computing eigenpairs"))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MeshSummary {
    pub vertices: usize,
    pub cells: usize,
    pub kind: String,
    pub measure: f64,
    pub path: PathBuf,
}

pub fn cmd_mesh(run: &Run) -> Result<MeshSummary, CliError> {
    let mesh = build_mesh(run.cfg)?;
    let path = run.write_vtk("mesh.vtk", &mesh, &[], "mesh")?;
    Ok(MeshSummary {
        vertices: mesh.n_vertices(),
        cells: mesh.n_cells(),
        kind: format!("{:?}", mesh.kind()),
        measure: mesh.total_measure(),
        path,
    })
}

#[derive(Debug, Clone)]
pub struct EigsSummary {
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub files: Vec<PathBuf>,
}

fn eigenvalue_csv(run: &Run, values: &[f64], residuals: &[f64]) -> String {
    let mut s = run.provenance.csv_header();
    s.push_str("index,lambda,residual\n");
    for (i, (l, r)) in values.iter().zip(residuals).enumerate() {
        let _ = writeln!(s, "{i},{l},{r}");
    }
    s
}

pub fn cmd_eigs(run: &Run) -> Result<EigsSummary, CliError> {
    if run.cfg.eigs.source == SpectrumSource::Analytic {
        let values = analytic_eigenvalues(run.cfg)?;
        let residuals = vec![0.0; values.len()];
        let csv = run.write("eigenvalues.csv", &eigenvalue_csv(run, &values, &residuals))?;
        return Ok(EigsSummary {
            eigenvalues: values,
            residuals,
            files: vec![csv],
        });
    }
    let disc = Discretization::new(build_mesh(run.cfg)?)?;
    let spectrum = disc.spectrum(run.cfg)?;
    write_spectrum(run, &disc.mesh, &spectrum)
}

fn write_spectrum(run: &Run, mesh: &Mesh64, spectrum: &Spectrum64) -> Result<EigsSummary, CliError> {
    let csv = run.write(
        "eigenvalues.csv",
        &eigenvalue_csv(run, &spectrum.eigenvalues, &spectrum.residuals),
    )?;
    let names: Vec<String> = (0..spectrum.len()).map(|i| format!("phi_{i:04}")).collect();
    let fields: Vec<(&str, &[f64])> = names
        .iter()
        .zip(&spectrum.eigenvectors)
        .map(|(n, v)| (n.as_str(), v.as_slice()))
        .collect();
    let vtk = run.write_vtk("eigenvectors.vtk", mesh, &fields, "eigenvectors")?;
    Ok(EigsSummary {
        eigenvalues: spectrum.eigenvalues.clone(),
        residuals: spectrum.residuals.clone(),
        files: vec![csv, vtk],
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceJson {
    pub d: f64,
    pub gamma: f64,
    pub window: [f64; 2],
}

#[derive(Debug, Clone, Serialize)]
pub struct IsolationReport {
    #[serde(flatten)]
    pub provenance: Provenance,
    pub model: String,
    pub target: Option<usize>,
    pub status: String,
    pub d: f64,
    pub gamma: f64,
    pub window: [f64; 2],
    pub excited: Vec<usize>,
    pub excited_eigenvalues: Vec<f64>,
    pub critical_ratio: f64,
    pub iterations: usize,
    pub trace: Vec<TraceJson>,
}

/// Index of the first eigenvalue that is not the constant mode.
pub fn first_nonzero(values: &[f64]) -> Option<usize> {
    let scale = values.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    values.iter().position(|&x| x > 1e-8 * scale)
}

pub fn isolate(run: &Run, model: &KineticsModel, values: &[f64]) -> Result<IsolationReport, CliError> {
    let cfg = run.cfg;
    let iso = &cfg.isolation;
    let j = model.jacobian(model.steady_state().map_err(CliError::context("steady state"))?);
    let critical = j.critical_ratio().map_err(CliError::context("critical diffusion ratio"))?;
    let (result, target) = if let (Some(d), Some(gamma)) = (iso.d, iso.gamma) {
        let window = j
            .wavenumber_window(d, gamma)
            .map_err(CliError::context(format!("wavenumber window at d = {d}, gamma = {gamma}")))?;
        let excited = verify_isolation(values, &j, d, gamma);
        let status = explicit_status(values, &excited, iso.delta);
        let result = IsolationResult {
            status,
            d,
            gamma,
            window,
            excited,
            critical_ratio: critical,
            iterations: 0,
            trace: Vec::new(),
        };
        (result, None)
    } else {
        let target = match iso.target {
            Some(t) => t,
            None => first_nonzero(values)
                .ok_or_else(|| CliError::Config("isolation.target: spectrum has no nonzero eigenvalue".into()))?,
        };
        let opts = IsolationOptions {
            gamma0: iso.gamma0,
            eps0: iso.eps0,
            max_iters: iso.max_iters,
            delta: iso.delta,
        };
        let result = isolate_mode(values, target, &j, &opts).map_err(CliError::context("isolating mode"))?;
        (result, Some(target))
    };
    let report = IsolationReport {
        provenance: run.provenance.clone(),
        model: model.name().to_string(),
        target,
        status: result.status.as_str().to_string(),
        d: result.d,
        gamma: result.gamma,
        window: [result.window.0, result.window.1],
        excited_eigenvalues: result.excited.iter().map(|&i| values[i]).collect(),
        excited: result.excited,
        critical_ratio: result.critical_ratio,
        iterations: result.iterations,
        trace: result
            .trace
            .iter()
            .map(|t| TraceJson {
                d: t.d,
                gamma: t.gamma,
                window: [t.window.0, t.window.1],
            })
            .collect(),
    };
    run.write_json("isolation.json", &report)?;
    Ok(report)
}

fn explicit_status(values: &[f64], excited: &[usize], delta: f64) -> IsolationStatus {
    match excited {
        [] => IsolationStatus::Failed,
        [_] => IsolationStatus::Unique,
        [first, rest @ ..] => {
            let a = values[*first];
            if rest.iter().all(|&i| (values[i] - a).abs() <= delta * values[i].abs().max(a.abs())) {
                IsolationStatus::Clustered
            } else {
                IsolationStatus::Failed
            }
        }
    }
}

fn spectrum_values(run: &Run, disc: Option<&Discretization>) -> Result<(Vec<f64>, Option<Spectrum64>), CliError> {
    match (run.cfg.eigs.source, disc) {
        (SpectrumSource::Analytic, _) => Ok((analytic_eigenvalues(run.cfg)?, None)),
        (SpectrumSource::Mesh, Some(disc)) => {
            let s = disc.spectrum(run.cfg)?;
            Ok((s.eigenvalues.clone(), Some(s)))
        }
        (SpectrumSource::Mesh, None) => {
            let disc = Discretization::new(build_mesh(run.cfg)?)?;
            let s = disc.spectrum(run.cfg)?;
            Ok((s.eigenvalues.clone(), Some(s)))
        }
    }
}

pub fn cmd_isolate(run: &Run) -> Result<IsolationReport, CliError> {
    let model = run.cfg.model()?;
    let (values, _) = spectrum_values(run, None)?;
    isolate(run, &model, &values)
}

#[derive(Debug, Clone, Serialize)]
pub struct OutcomeJson {
    #[serde(flatten)]
    pub provenance: Provenance,
    pub model: String,
    pub d: f64,
    pub gamma: f64,
    pub tau: f64,
    pub status: String,
    pub time: f64,
    pub steps: usize,
    pub final_derivative: f64,
    pub snapshots: usize,
}

pub struct SimulationRun {
    pub outcome: SimulationOutcome<f64>,
    pub report: OutcomeJson,
}

/// Runs the simulation at `(d, gamma)`, writing snapshots, `final.vtk`,
/// `history.csv` and `outcome.json`.
pub fn run_simulation(
    run: &Run,
    mesh: &Mesh64,
    model: &KineticsModel,
    d: f64,
    gamma: f64,
) -> Result<SimulationRun, CliError> {
    let s = &run.cfg.simulation;
    let config = SimulationConfig {
        model: *model,
        d,
        gamma,
        tau: s.tau,
        stop_tol: s.stop_tol,
        max_time: s.max_time,
        min_time: s.min_time,
        seed: s.seed,
        amplitude: s.amplitude,
        history_stride: s.history_stride,
        snapshot_stride: s.snapshot_stride,
        cg_tol: 1e-10,
    };
    let state = model.steady_state().map_err(CliError::context("steady state"))?;
    let (u0, v0) = initial_condition(mesh, state, s.amplitude, s.seed);
    run.ensure_out()?;
    let mut count = 0usize;
    let outcome = simulate_from(mesh, &config, u0, v0, |step, t, u, v| {
        let title = format!("modeiso snapshot step={step} t={t} {}", run.provenance.line());
        let p = run.path(&format!("run_{count:04}.vtk"));
        count += 1;
        write_vtk(mesh, &[("u", u), ("v", v)], &title, p)
    })
    .map_err(CliError::context(format!("simulating at d = {d}, gamma = {gamma}")))?;
    run.write_vtk("final.vtk", mesh, &[("u", &outcome.u), ("v", &outcome.v)], "final")?;
    let mut csv = run.provenance.csv_header();
    csv.push_str("t,derivative_norm\n");
    for (t, n) in &outcome.history {
        let _ = writeln!(csv, "{t},{n}");
    }
    run.write("history.csv", &csv)?;
    let report = OutcomeJson {
        provenance: run.provenance.clone(),
        model: model.name().to_string(),
        d,
        gamma,
        tau: s.tau,
        status: outcome.status.as_str().to_string(),
        time: outcome.time,
        steps: outcome.steps,
        final_derivative: outcome.final_derivative,
        snapshots: count,
    };
    run.write_json("outcome.json", &report)?;
    Ok(SimulationRun { outcome, report })
}

fn isolated_pair(report: &IsolationReport) -> Result<(f64, f64), CliError> {
    if report.status == IsolationStatus::Failed.as_str() {
        return Err(CliError::Failed(format!(
            "isolation failed (d = {}, gamma = {}, excited {:?})",
            report.d, report.gamma, report.excited
        )));
    }
    Ok((report.d, report.gamma))
}

pub fn cmd_simulate(run: &Run) -> Result<SimulationRun, CliError> {
    let model = run.cfg.model()?;
    let mesh = build_mesh(run.cfg)?;
    let (d, gamma) = match (run.cfg.isolation.d, run.cfg.isolation.gamma) {
        (Some(d), Some(g)) => (d, g),
        _ => {
            let disc = Discretization::new(mesh.clone())?;
            let (values, _) = spectrum_values(run, Some(&disc))?;
            isolated_pair(&isolate(run, &model, &values)?)?
        }
    };
    run_simulation(run, &mesh, &model, d, gamma)
}

#[derive(Debug, Clone, Serialize)]
pub struct MatchJson {
    #[serde(flatten)]
    pub provenance: Provenance,
    pub field: String,
    pub uniform: bool,
    pub best_index: usize,
    pub best_eigenvalue: f64,
    pub correlation: f64,
    pub projection_residual: f64,
    pub eigenspace: Vec<usize>,
    pub threshold: f64,
    pub passed: bool,
    pub clusters: Vec<ClusterJson>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusterJson {
    pub indices: Vec<usize>,
    pub eigenvalue: f64,
    pub correlation: f64,
}

fn match_json(run: &Run, spectrum: &Spectrum64, report: &MatchReport) -> MatchJson {
    let m = &run.cfg.matching;
    MatchJson {
        provenance: run.provenance.clone(),
        field: m.field.as_str().to_string(),
        uniform: report.uniform,
        best_index: report.best_index,
        best_eigenvalue: spectrum.eigenvalues[report.best_index],
        correlation: report.correlation,
        projection_residual: report.projection_residual,
        eigenspace: report.eigenspace.clone(),
        threshold: m.threshold,
        passed: !report.uniform && report.correlation >= m.threshold,
        clusters: report
            .clusters
            .iter()
            .zip(&report.cluster_correlations)
            .map(|(c, &corr)| ClusterJson {
                indices: c.clone(),
                eigenvalue: spectrum.eigenvalues[c[0]],
                correlation: corr,
            })
            .collect(),
    }
}

fn match_field(run: &Run, disc: &Discretization, spectrum: &Spectrum64, pattern: &[f64]) -> Result<MatchJson, CliError> {
    let report = match_pattern(pattern, spectrum, &disc.mass, run.cfg.matching.cluster_gap)
        .map_err(CliError::context("matching pattern"))?;
    let json = match_json(run, spectrum, &report);
    run.write_json("match.json", &json)?;
    Ok(json)
}

fn require_mesh_source(run: &Run, command: &str) -> Result<(), CliError> {
    if run.cfg.eigs.source == SpectrumSource::Analytic {
        return Err(CliError::Config(format!("eigs.source: `{command}` needs eigenvectors, use \"mesh\"")));
    }
    Ok(())
}

pub fn cmd_match(run: &Run) -> Result<MatchJson, CliError> {
    require_mesh_source(run, "match")?;
    let disc = Discretization::new(build_mesh(run.cfg)?)?;
    let path = run.cfg.matching.pattern.clone().unwrap_or_else(|| run.path("final.vtk"));
    let data = read_vtk::<f64>(&path).map_err(CliError::context(format!("reading {}", path.display())))?;
    same_vertices(&data.mesh, &disc.mesh, &path)?;
    let name = run.cfg.matching.field.as_str();
    let pattern = data
        .field(name)
        .ok_or_else(|| CliError::Io(format!("{} has no point field `{name}`", path.display())))?
        .to_vec();
    let spectrum = disc.spectrum(run.cfg)?;
    match_field(run, &disc, &spectrum, &pattern)
}

fn same_vertices(a: &Mesh64, b: &Mesh64, path: &Path) -> Result<(), CliError> {
    let close = a.n_vertices() == b.n_vertices()
        && a.vertices().iter().zip(b.vertices()).all(|(p, q)| {
            p.iter().zip(q).all(|(x, y)| (x - y).abs() <= 1e-9 * (1.0 + y.abs()))
        });
    if close {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "match.pattern: {} is not on the configured mesh",
            path.display()
        )))
    }
}

#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub isolation: IsolationReport,
    pub outcome: OutcomeJson,
    pub matching: MatchJson,
}

/// Spectrum, isolation, simulation and matching in sequence. Fails with
/// [`CliError::BelowThreshold`] after writing all outputs when the
/// correlation misses the threshold.
pub fn cmd_pipeline(run: &Run) -> Result<PipelineReport, CliError> {
    require_mesh_source(run, "pipeline")?;
    let model = run.cfg.model()?;
    let disc = Discretization::new(build_mesh(run.cfg)?)?;
    let spectrum = disc.spectrum(run.cfg)?;
    write_spectrum(run, &disc.mesh, &spectrum)?;
    let isolation = isolate(run, &model, &spectrum.eigenvalues)?;
    let (d, gamma) = isolated_pair(&isolation)?;
    let sim = run_simulation(run, &disc.mesh, &model, d, gamma)?;
    let field = match run.cfg.matching.field {
        crate::config::Species::U => &sim.outcome.u,
        crate::config::Species::V => &sim.outcome.v,
    };
    let matching = match_field(run, &disc, &spectrum, field)?;
    if !matching.passed {
        return Err(CliError::BelowThreshold {
            correlation: matching.correlation,
            threshold: matching.threshold,
        });
    }
    Ok(PipelineReport {
        isolation,
        outcome: sim.report,
        matching,
    })
}
