//! Run configuration read from TOML. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use modeiso::kinetics::KineticsModel;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mesh: MeshSpec,
    #[serde(default)]
    pub kinetics: KineticsSpec,
    #[serde(default)]
    pub eigs: EigsSpec,
    #[serde(default)]
    pub isolation: IsolationSpec,
    #[serde(default)]
    pub simulation: SimulationSpec,
    #[serde(default, rename = "match")]
    pub matching: MatchSpec,
    /// Not part of the hash, so moving the outputs keeps them identical.
    #[serde(default = "default_output", skip_serializing)]
    pub output: PathBuf,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Generator {
    Interval,
    Rectangle,
    Disk,
    Icosphere,
    Ball,
    Tube,
    Off,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSpec {
    pub generator: Generator,
    pub length: Option<f64>,
    pub lx: Option<f64>,
    pub ly: Option<f64>,
    pub n_cells: Option<usize>,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    pub radius: Option<f64>,
    pub refinement: Option<usize>,
    pub closed_ends: Option<bool>,
    pub path: Option<PathBuf>,
    /// Named preset: ellipse, dumbbell or fish.
    pub deformation: Option<String>,
    /// Expressions in `x`, `y`, `z`; omitted components are left unchanged.
    pub deformation_expr: Option<DeformationExpr>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeformationExpr {
    pub x: Option<String>,
    pub y: Option<String>,
    pub z: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ModelName {
    #[default]
    Schnakenberg,
    GiererMeinhardt,
    Thomas,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct KineticsSpec {
    #[serde(default)]
    pub model: ModelName,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub k: Option<f64>,
    pub big_k: Option<f64>,
    pub alpha: Option<f64>,
    pub rho: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumSource {
    #[default]
    Mesh,
    Analytic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EigsSpec {
    pub count: usize,
    pub tol: f64,
    pub seed: u64,
    pub source: SpectrumSource,
}

impl Default for EigsSpec {
    fn default() -> Self {
        Self {
            count: 12,
            tol: 1e-9,
            seed: 1,
            source: SpectrumSource::Mesh,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IsolationSpec {
    pub target: Option<usize>,
    pub gamma0: f64,
    pub eps0: Option<f64>,
    pub delta: f64,
    pub max_iters: usize,
    pub d: Option<f64>,
    pub gamma: Option<f64>,
}

impl Default for IsolationSpec {
    fn default() -> Self {
        Self {
            target: None,
            gamma0: 10.0,
            eps0: None,
            delta: 1e-3,
            max_iters: 10_000,
            d: None,
            gamma: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationSpec {
    pub tau: f64,
    pub stop_tol: f64,
    pub max_time: f64,
    pub min_time: f64,
    pub seed: u64,
    pub amplitude: f64,
    pub history_stride: usize,
    pub snapshot_stride: usize,
}

impl Default for SimulationSpec {
    fn default() -> Self {
        Self {
            tau: 1e-3,
            stop_tol: 1e-4,
            max_time: 100.0,
            min_time: 50.0,
            seed: 0,
            amplitude: 0.01,
            history_stride: 10,
            snapshot_stride: 1000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Species {
    #[default]
    U,
    V,
}

impl Species {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::U => "u",
            Self::V => "v",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MatchSpec {
    pub threshold: f64,
    pub cluster_gap: f64,
    pub field: Species,
    /// VTK file holding the pattern; defaults to `final.vtk` in the output directory.
    pub pattern: Option<PathBuf>,
}

impl Default for MatchSpec {
    fn default() -> Self {
        Self {
            threshold: 0.8,
            cluster_gap: modeiso::pattern::DEFAULT_CLUSTER_GAP,
            field: Species::U,
            pattern: None,
        }
    }
}

fn bad(path: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{path}: {msg}"))
}

fn positive(path: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(bad(path, format!("must be positive, got {v}")))
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads the file and resolves a relative OFF path against its directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        if let (Some(p), Some(dir)) = (cfg.mesh.path.as_mut(), path.parent()) {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn override_seed(&mut self, seed: u64) {
        self.eigs.seed = seed;
        self.simulation.seed = seed;
    }

    /// SHA-256 of the canonical JSON form of the effective configuration.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    pub fn model(&self) -> Result<KineticsModel, CliError> {
        let k = &self.kinetics;
        let model = match k.model {
            ModelName::Schnakenberg => {
                let KineticsModel::Schnakenberg { a, b } = KineticsModel::schnakenberg() else { unreachable!() };
                self.reject_params(&[("k", k.k), ("big_k", k.big_k), ("alpha", k.alpha), ("rho", k.rho)])?;
                KineticsModel::Schnakenberg {
                    a: k.a.unwrap_or(a),
                    b: k.b.unwrap_or(b),
                }
            }
            ModelName::GiererMeinhardt => {
                let KineticsModel::GiererMeinhardt { a, b, k: kk } = KineticsModel::gierer_meinhardt() else {
                    unreachable!()
                };
                self.reject_params(&[("big_k", k.big_k), ("alpha", k.alpha), ("rho", k.rho)])?;
                KineticsModel::GiererMeinhardt {
                    a: k.a.unwrap_or(a),
                    b: k.b.unwrap_or(b),
                    k: k.k.unwrap_or(kk),
                }
            }
            ModelName::Thomas => {
                let KineticsModel::Thomas { a, b, big_k, alpha, rho } = KineticsModel::thomas() else {
                    unreachable!()
                };
                self.reject_params(&[("k", k.k)])?;
                KineticsModel::Thomas {
                    a: k.a.unwrap_or(a),
                    b: k.b.unwrap_or(b),
                    big_k: k.big_k.unwrap_or(big_k),
                    alpha: k.alpha.unwrap_or(alpha),
                    rho: k.rho.unwrap_or(rho),
                }
            }
        };
        model.validate().map_err(|e| bad("kinetics", e))?;
        Ok(model)
    }

    fn reject_params(&self, params: &[(&str, Option<f64>)]) -> Result<(), CliError> {
        match params.iter().find(|(_, v)| v.is_some()) {
            Some((name, _)) => Err(bad(
                &format!("kinetics.{name}"),
                format!("not a parameter of {:?}", self.kinetics.model),
            )),
            None => Ok(()),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.validate_mesh()?;
        self.model()?;
        let e = &self.eigs;
        if e.count == 0 {
            return Err(bad("eigs.count", "must be at least 1"));
        }
        positive("eigs.tol", e.tol)?;
        let i = &self.isolation;
        positive("isolation.gamma0", i.gamma0)?;
        positive("isolation.delta", i.delta)?;
        if let Some(eps) = i.eps0 {
            positive("isolation.eps0", eps)?;
        }
        if i.max_iters == 0 {
            return Err(bad("isolation.max_iters", "must be at least 1"));
        }
        match (i.d, i.gamma) {
            (Some(d), Some(g)) => {
                positive("isolation.d", d)?;
                positive("isolation.gamma", g)?;
                if i.target.is_some() {
                    return Err(bad("isolation.target", "give either a target or explicit d and gamma"));
                }
            }
            (None, None) => {
                if let Some(t) = i.target {
                    if t >= e.count {
                        return Err(bad(
                            "isolation.target",
                            format!("index {t} is not below eigs.count = {}", e.count),
                        ));
                    }
                }
            }
            _ => return Err(bad("isolation", "d and gamma must be given together")),
        }
        let s = &self.simulation;
        positive("simulation.tau", s.tau)?;
        if s.tau > modeiso::simulator::MAX_TAU {
            return Err(bad("simulation.tau", format!("must not exceed {}", modeiso::simulator::MAX_TAU)));
        }
        positive("simulation.stop_tol", s.stop_tol)?;
        positive("simulation.max_time", s.max_time)?;
        if !(s.min_time >= 0.0 && s.min_time.is_finite()) {
            return Err(bad("simulation.min_time", "must be non-negative"));
        }
        if !(s.amplitude >= 0.0 && s.amplitude.is_finite()) {
            return Err(bad("simulation.amplitude", "must be non-negative"));
        }
        if s.history_stride == 0 {
            return Err(bad("simulation.history_stride", "must be at least 1"));
        }
        if s.snapshot_stride == 0 {
            return Err(bad("simulation.snapshot_stride", "must be at least 1"));
        }
        let m = &self.matching;
        if !(0.0..=1.0).contains(&m.threshold) {
            return Err(bad("match.threshold", "must lie in [0, 1]"));
        }
        positive("match.cluster_gap", m.cluster_gap)?;
        Ok(())
    }

    fn validate_mesh(&self) -> Result<(), CliError> {
        let m = &self.mesh;
        let given: [(&str, bool); 10] = [
            ("length", m.length.is_some()),
            ("lx", m.lx.is_some()),
            ("ly", m.ly.is_some()),
            ("n_cells", m.n_cells.is_some()),
            ("nx", m.nx.is_some()),
            ("ny", m.ny.is_some()),
            ("radius", m.radius.is_some()),
            ("refinement", m.refinement.is_some()),
            ("closed_ends", m.closed_ends.is_some()),
            ("path", m.path.is_some()),
        ];
        let (required, optional): (&[&str], &[&str]) = match m.generator {
            Generator::Interval => (&["n_cells"], &["length"]),
            Generator::Rectangle => (&["nx", "ny"], &["lx", "ly"]),
            Generator::Disk => (&["refinement"], &["radius"]),
            Generator::Icosphere | Generator::Ball => (&["refinement"], &[]),
            Generator::Tube => (&["refinement"], &["length", "radius", "closed_ends"]),
            Generator::Off => (&["path"], &[]),
        };
        for (name, present) in given {
            if present && !required.contains(&name) && !optional.contains(&name) {
                return Err(bad(
                    &format!("mesh.{name}"),
                    format!("not a parameter of the {:?} generator", m.generator),
                ));
            }
            if !present && required.contains(&name) {
                return Err(bad(&format!("mesh.{name}"), format!("required by the {:?} generator", m.generator)));
            }
        }
        for (name, v) in [("length", m.length), ("lx", m.lx), ("ly", m.ly), ("radius", m.radius)] {
            if let Some(v) = v {
                positive(&format!("mesh.{name}"), v)?;
            }
        }
        for (name, v) in [("n_cells", m.n_cells), ("nx", m.nx), ("ny", m.ny)] {
            if v == Some(0) {
                return Err(bad(&format!("mesh.{name}"), "must be at least 1"));
            }
        }
        if m.refinement.is_some_and(|r| r > 8) {
            return Err(bad("mesh.refinement", "at most 8"));
        }
        if let Some(name) = &m.deformation {
            if !modeiso::mesh::presets::PRESET_NAMES.contains(&name.as_str()) {
                return Err(bad(
                    "mesh.deformation",
                    format!("unknown preset `{name}`, expected one of {:?}", modeiso::mesh::presets::PRESET_NAMES),
                ));
            }
            if m.deformation_expr.is_some() {
                return Err(bad("mesh.deformation_expr", "cannot be combined with mesh.deformation"));
            }
        }
        if let Some(expr) = &m.deformation_expr {
            crate::deform::ExprMap::new(expr).map_err(|e| bad("mesh.deformation_expr", e))?;
        }
        if self.eigs.source == SpectrumSource::Analytic {
            let ok = match m.generator {
                Generator::Interval | Generator::Rectangle | Generator::Icosphere | Generator::Ball => true,
                _ => false,
            };
            if !ok || m.deformation.is_some() || m.deformation_expr.is_some() {
                return Err(bad(
                    "eigs.source",
                    "analytic spectra exist only for undeformed interval, rectangle, icosphere and ball",
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQUARE: &str = r#"
[mesh]
generator = "rectangle"
nx = 8
ny = 8
"#;

    #[test]
    fn defaults_fill_in() {
        let c = RunConfig::from_toml(SQUARE).unwrap();
        assert_eq!(c.eigs.count, 12);
        assert_eq!(c.simulation.tau, 1e-3);
        assert_eq!(c.output, PathBuf::from("out"));
        assert_eq!(c.model().unwrap(), KineticsModel::schnakenberg());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = RunConfig::from_toml(&format!("{SQUARE}\n[simulation]\ntaux = 1e-3\n")).unwrap_err();
        assert!(err.to_string().contains("taux"), "{err}");
        let err = RunConfig::from_toml(&format!("{SQUARE}radius = 2.0\n")).unwrap_err();
        assert!(err.to_string().contains("mesh.radius"), "{err}");
    }

    #[test]
    fn negative_tau_names_the_field() {
        let err = RunConfig::from_toml(&format!("{SQUARE}\n[simulation]\ntau = -1e-3\n")).unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
        assert!(err.to_string().contains("simulation.tau"), "{err}");
    }

    #[test]
    fn target_and_explicit_pair_are_exclusive() {
        let text = format!("{SQUARE}\n[isolation]\ntarget = 1\nd = 10.0\ngamma = 15.0\n");
        assert!(RunConfig::from_toml(&text).is_err());
        let text = format!("{SQUARE}\n[isolation]\nd = 10.0\n");
        assert!(RunConfig::from_toml(&text).is_err());
    }

    #[test]
    fn hash_tracks_content_and_seed() {
        let mut c = RunConfig::from_toml(SQUARE).unwrap();
        let h = c.hash();
        assert_eq!(h.len(), 64);
        assert_eq!(h, RunConfig::from_toml(SQUARE).unwrap().hash());
        c.output = PathBuf::from("elsewhere");
        assert_eq!(h, c.hash());
        c.override_seed(99);
        assert_ne!(h, c.hash());
    }

    #[test]
    fn kinetics_overrides() {
        let text = format!("{SQUARE}\n[kinetics]\nmodel = \"gierer_meinhardt\"\nk = 0.25\n");
        let c = RunConfig::from_toml(&text).unwrap();
        assert_eq!(c.model().unwrap(), KineticsModel::GiererMeinhardt { a: 0.1, b: 1.0, k: 0.25 });
        let text = format!("{SQUARE}\n[kinetics]\nmodel = \"schnakenberg\"\nrho = 1.0\n");
        assert!(RunConfig::from_toml(&text).is_err());
    }
}
