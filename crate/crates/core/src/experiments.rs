//! Named scenarios for the study's standard runs, plus the generic
//! config-driven experiment runner.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::{
    all_up_state, evolve_static, evolve_time_dependent, initial_state_first_flipped,
    trajectory_metrics, RunMetadata, Trajectory, WaveMetrics,
};
use crate::error::{Error, Result};
use crate::hamiltonian::{build_lab_frame, build_static};
use crate::system::{Geometry, Model, ModelSpec, SystemSpec};

/// Gyromagnetic ratio of 1H, MHz/T.
pub const GAMMA_1H: f64 = 42.58;
/// Gyromagnetic ratio of 19F, MHz/T.
pub const GAMMA_19F: f64 = 40.08;

/// Identifier of a cataloged scenario.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScenarioId {
    Fig1a,
    Fig1b,
    Fig2a,
    Fig2b,
    Fig3a,
    Fig3b,
    Fig4a,
    Fig4b,
    Fig5a,
    Fig5b,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 10] = [
        ScenarioId::Fig1a,
        ScenarioId::Fig1b,
        ScenarioId::Fig2a,
        ScenarioId::Fig2b,
        ScenarioId::Fig3a,
        ScenarioId::Fig3b,
        ScenarioId::Fig4a,
        ScenarioId::Fig4b,
        ScenarioId::Fig5a,
        ScenarioId::Fig5b,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioId::Fig1a => "fig1a",
            ScenarioId::Fig1b => "fig1b",
            ScenarioId::Fig2a => "fig2a",
            ScenarioId::Fig2b => "fig2b",
            ScenarioId::Fig3a => "fig3a",
            ScenarioId::Fig3b => "fig3b",
            ScenarioId::Fig4a => "fig4a",
            ScenarioId::Fig4b => "fig4b",
            ScenarioId::Fig5a => "fig5a",
            ScenarioId::Fig5b => "fig5b",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ScenarioId::Fig1a => {
                "7-spin chain, rotating-frame ZZ model, nearest neighbors (M=1), omega1 = 0.15 d1"
            }
            ScenarioId::Fig1b => "7-spin chain, effective nearest-neighbor Hamiltonian",
            ScenarioId::Fig2a => "7-spin chain, rotating-frame ZZ model, M = 2",
            ScenarioId::Fig2b => "7-spin chain, rotating-frame ZZ model, all couplings (M = 6)",
            ScenarioId::Fig3a => "7-spin chain, secular dipolar Hamiltonian, no drive (omega1 = 0)",
            ScenarioId::Fig3b => "7-spin alternating 1H/19F chain with dipolar couplings",
            ScenarioId::Fig4a => "9-spin ring, rotating-frame ZZ model, all couplings (M = 4)",
            ScenarioId::Fig4b => "9-spin ring, effective ring Hamiltonian, M = 1",
            ScenarioId::Fig5a => "total polarization bundle: five 7-spin chain models",
            ScenarioId::Fig5b => "total polarization bundle: five 7-spin ring models",
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown scenario id `{s}`")))
    }
}

/// What to emit for a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputKind {
    Csv,
    Svg,
    Metrics,
}

/// Complete description of one simulation run.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub system: SystemSpec,
    pub model: ModelSpec,
    /// `None` starts from the all-up state.
    pub flipped_site: Option<usize>,
    pub t_max: f64,
    pub n_samples: usize,
    /// Step size for time-dependent propagation (lab_frame only).
    pub dt: Option<f64>,
    pub outputs: Vec<OutputKind>,
}

impl ExperimentConfig {
    pub fn new(system: SystemSpec, model: ModelSpec) -> Self {
        let t_max = default_t_max(&model);
        ExperimentConfig {
            system,
            model,
            flipped_site: Some(1),
            t_max,
            n_samples: 400,
            dt: None,
            outputs: vec![OutputKind::Csv, OutputKind::Metrics],
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate(&self.system)?;
        if let Some(site) = self.flipped_site {
            if site == 0 || site > self.system.n() {
                return Err(Error::SiteOutOfRange {
                    site,
                    n: self.system.n(),
                });
            }
        }
        if !(self.t_max > 0.0) {
            return Err(Error::Invalid(format!(
                "t_max must be positive, got {}",
                self.t_max
            )));
        }
        if self.n_samples == 0 {
            return Err(Error::Invalid("n_samples must be at least 1".into()));
        }
        match self.dt {
            Some(dt) if !self.model.model.is_time_dependent() => {
                return Err(Error::Invalid(format!(
                    "dt = {dt} only applies to time-dependent models (lab_frame)"
                )));
            }
            Some(dt) if !(dt > 0.0) => {
                return Err(Error::Invalid(format!("dt must be positive, got {dt}")));
            }
            _ => {}
        }
        if self.model.model.is_time_dependent() {
            let cap = lab_frame_dt_cap(self.model.omega0.unwrap_or(f64::INFINITY));
            let dt = self.dt.unwrap_or(cap);
            if dt > cap * (1.0 + 1e-12) {
                return Err(Error::StepTooLarge { dt, max: cap });
            }
        }
        Ok(())
    }

    /// Uniform sample grid over [0, t_max].
    pub fn sample_times(&self) -> Vec<f64> {
        if self.n_samples == 1 {
            return vec![0.0];
        }
        (0..self.n_samples)
            .map(|i| self.t_max * i as f64 / (self.n_samples - 1) as f64)
            .collect()
    }
}

/// Default sampling window: 60/d1, except for the effective
/// nearest-neighbor model whose only scale is 1/omega1 (30/omega1).
pub fn default_t_max(model: &ModelSpec) -> f64 {
    match model.model {
        Model::EffectiveNn if model.omega1 > 0.0 => 30.0 / model.omega1,
        _ if model.d1 != 0.0 => 60.0 / model.d1.abs(),
        _ => 60.0,
    }
}

/// Largest step size accepted for the driven lab-frame model: a twentieth
/// of the fast oscillation period 2 pi / omega0.
pub fn lab_frame_dt_cap(omega0: f64) -> f64 {
    2.0 * std::f64::consts::PI / (20.0 * omega0)
}

/// One run of a (possibly bundled) scenario.
#[derive(Clone, Debug)]
pub struct ScenarioRun {
    /// Curve label within a bundle; `None` for single-run scenarios.
    pub curve: Option<&'static str>,
    pub config: ExperimentConfig,
}

/// A cataloged scenario: one run, or a bundle of curves sharing a time
/// axis.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub id: ScenarioId,
    pub runs: Vec<ScenarioRun>,
}

impl Scenario {
    pub fn is_bundle(&self) -> bool {
        self.runs.len() > 1
    }
}

/// Window wide enough for the stimulated wave to traverse seven spins at
/// omega1 = 0.15 d1; shared by every catalog scenario so trajectories can
/// be compared sample-by-sample.
const CATALOG_T_MAX: f64 = 60.0;
const CATALOG_SAMPLES: usize = 400;

fn catalog_outputs() -> Vec<OutputKind> {
    vec![OutputKind::Csv, OutputKind::Svg, OutputKind::Metrics]
}

fn catalog_config(system: SystemSpec, model: ModelSpec) -> ExperimentConfig {
    let mut config = ExperimentConfig::new(system, model);
    config.t_max = CATALOG_T_MAX;
    config.n_samples = CATALOG_SAMPLES;
    config.outputs = catalog_outputs();
    config
}

fn chain7() -> SystemSpec {
    SystemSpec::homonuclear(7, Geometry::Chain).expect("valid")
}

fn ring_n(n: usize) -> SystemSpec {
    SystemSpec::homonuclear(n, Geometry::Ring).expect("valid")
}

fn hf_gammas() -> BTreeMap<char, f64> {
    let mut gammas = BTreeMap::new();
    gammas.insert('H', GAMMA_1H);
    gammas.insert('F', GAMMA_19F);
    gammas
}

fn hf_system(n: usize, geometry: Geometry) -> SystemSpec {
    SystemSpec::with_pattern(n, geometry, "HF", hf_gammas()).expect("valid")
}

/// The full catalog of named scenarios, fully parameterized.
pub fn scenario_catalog() -> Vec<Scenario> {
    ScenarioId::ALL.into_iter().map(scenario).collect()
}

/// Look up one scenario by id.
pub fn scenario(id: ScenarioId) -> Scenario {
    let single = |config: ExperimentConfig| Scenario {
        id,
        runs: vec![ScenarioRun {
            curve: None,
            config,
        }],
    };
    match id {
        ScenarioId::Fig1a => single(catalog_config(
            chain7(),
            ModelSpec::new(Model::RotatingZz),
        )),
        ScenarioId::Fig1b => single(catalog_config(chain7(), ModelSpec::new(Model::EffectiveNn))),
        ScenarioId::Fig2a => single(catalog_config(
            chain7(),
            ModelSpec::new(Model::RotatingZz).with_m_neighbors(2),
        )),
        ScenarioId::Fig2b => single(catalog_config(
            chain7(),
            ModelSpec::new(Model::RotatingZz).with_m_neighbors(6),
        )),
        ScenarioId::Fig3a => single(catalog_config(
            chain7(),
            ModelSpec::new(Model::SecularDipolar).with_omega1(0.0),
        )),
        ScenarioId::Fig3b => single(catalog_config(
            hf_system(7, Geometry::Chain),
            ModelSpec::new(Model::AlternatingHetero),
        )),
        ScenarioId::Fig4a => single(catalog_config(
            ring_n(9),
            ModelSpec::new(Model::RotatingZz).with_m_neighbors(4),
        )),
        ScenarioId::Fig4b => single(catalog_config(
            ring_n(9),
            ModelSpec::new(Model::EffectiveRing),
        )),
        ScenarioId::Fig5a => Scenario {
            id,
            runs: vec![
                ScenarioRun {
                    curve: Some("eff"),
                    config: catalog_config(chain7(), ModelSpec::new(Model::EffectiveNn)),
                },
                ScenarioRun {
                    curve: Some("zz-m1"),
                    config: catalog_config(chain7(), ModelSpec::new(Model::RotatingZz)),
                },
                ScenarioRun {
                    curve: Some("zz-m2"),
                    config: catalog_config(
                        chain7(),
                        ModelSpec::new(Model::RotatingZz).with_m_neighbors(2),
                    ),
                },
                ScenarioRun {
                    curve: Some("zz-m6"),
                    config: catalog_config(
                        chain7(),
                        ModelSpec::new(Model::RotatingZz).with_m_neighbors(6),
                    ),
                },
                ScenarioRun {
                    curve: Some("hetero"),
                    config: catalog_config(
                        hf_system(7, Geometry::Chain),
                        ModelSpec::new(Model::AlternatingHetero),
                    ),
                },
            ],
        },
        ScenarioId::Fig5b => Scenario {
            id,
            runs: vec![
                ScenarioRun {
                    curve: Some("eff-m1"),
                    config: catalog_config(ring_n(7), ModelSpec::new(Model::EffectiveRing)),
                },
                ScenarioRun {
                    curve: Some("zz-m1"),
                    config: catalog_config(ring_n(7), ModelSpec::new(Model::RotatingZz)),
                },
                ScenarioRun {
                    curve: Some("zz-m2"),
                    config: catalog_config(
                        ring_n(7),
                        ModelSpec::new(Model::RotatingZz).with_m_neighbors(2),
                    ),
                },
                ScenarioRun {
                    // all distinct couplings of a 7-ring (circular
                    // distances run up to 3)
                    curve: Some("zz-m3"),
                    config: catalog_config(
                        ring_n(7),
                        ModelSpec::new(Model::RotatingZz).with_m_neighbors(3),
                    ),
                },
                ScenarioRun {
                    // odd alternating ring: one like-species defect pair,
                    // flagged in the output metadata
                    curve: Some("hetero"),
                    config: catalog_config(
                        hf_system(7, Geometry::Ring),
                        ModelSpec::new(Model::AlternatingHetero),
                    ),
                },
            ],
        },
    }
}

/// Execute one run: build the Hamiltonian, evolve, and summarize.
/// Identical configs produce bit-identical trajectories on a given
/// platform.
pub fn run_experiment(config: &ExperimentConfig) -> Result<(Trajectory, WaveMetrics)> {
    config.validate()?;
    let n = config.system.n();
    let psi0 = match config.flipped_site {
        Some(site) => initial_state_first_flipped(n, site)?,
        None => all_up_state(n)?,
    };
    let times = config.sample_times();

    let (traj, dt_used) = if config.model.model.is_time_dependent() {
        let omega0 = config.model.omega0.expect("validated");
        let dt = config.dt.unwrap_or_else(|| lab_frame_dt_cap(omega0));
        let sys = &config.system;
        let model = &config.model;
        let traj = evolve_time_dependent(
            |t| build_lab_frame(sys, model, t),
            &psi0,
            config.t_max,
            dt,
            &times,
        )?;
        (traj, Some(dt))
    } else {
        let h = build_static(&config.system, &config.model)?;
        (evolve_static(&h, &psi0, &times)?, None)
    };

    let traj = traj.with_metadata(RunMetadata {
        system: config.system.clone(),
        model: config.model.clone(),
        flipped_site: config.flipped_site,
        dt: dt_used,
    });
    let metrics = trajectory_metrics(&traj);
    Ok((traj, metrics))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_has_ten_scenarios() {
        let catalog = scenario_catalog();
        assert_eq!(catalog.len(), 10);
        for sc in &catalog {
            for run in &sc.runs {
                run.config.validate().expect("catalog configs must be valid");
            }
        }
        assert_eq!(catalog.iter().filter(|s| s.is_bundle()).count(), 2);
    }

    #[test]
    fn fig1a_parameters() {
        let sc = scenario(ScenarioId::Fig1a);
        let config = &sc.runs[0].config;
        assert_eq!(config.system.n(), 7);
        assert_eq!(config.system.geometry(), Geometry::Chain);
        assert_eq!(config.model.model, Model::RotatingZz);
        assert_eq!(config.model.m_neighbors, 1);
        assert_eq!(config.model.omega1, 0.15);
        assert_eq!(config.model.d1, 1.0);
        assert_eq!(config.flipped_site, Some(1));
    }

    #[test]
    fn fig3a_parameters() {
        let sc = scenario(ScenarioId::Fig3a);
        let config = &sc.runs[0].config;
        assert_eq!(config.model.model, Model::SecularDipolar);
        assert_eq!(config.model.omega1, 0.0);
        assert_eq!(config.system.n(), 7);
        assert_eq!(config.system.geometry(), Geometry::Chain);
    }

    #[test]
    fn fig5b_bundle_models() {
        let sc = scenario(ScenarioId::Fig5b);
        assert_eq!(sc.runs.len(), 5);
        let models: Vec<Model> = sc.runs.iter().map(|r| r.config.model.model).collect();
        assert_eq!(
            models,
            vec![
                Model::EffectiveRing,
                Model::RotatingZz,
                Model::RotatingZz,
                Model::RotatingZz,
                Model::AlternatingHetero
            ]
        );
        let ms: Vec<usize> = sc.runs[1..4]
            .iter()
            .map(|r| r.config.model.m_neighbors)
            .collect();
        assert_eq!(ms, vec![1, 2, 3]);
        for run in &sc.runs {
            assert_eq!(run.config.system.geometry(), Geometry::Ring);
            assert_eq!(run.config.system.n(), 7);
        }
        // the odd alternating ring carries a defect pair
        assert!(sc.runs[4].config.system.has_adjacent_like_pair());
    }

    #[test]
    fn scenario_ids_round_trip() {
        for id in ScenarioId::ALL {
            assert_eq!(id.as_str().parse::<ScenarioId>().unwrap(), id);
        }
        assert!("fig9z".parse::<ScenarioId>().is_err());
    }

    #[test]
    fn fig1b_initial_total() {
        let sc = scenario(ScenarioId::Fig1b);
        let (traj, _) = run_experiment(&sc.runs[0].config).unwrap();
        assert!((traj.total()[0] - 2.5).abs() < 1e-12);
    }

    #[test]
    fn all_up_effective_nn_has_no_amplification() {
        let sc = scenario(ScenarioId::Fig1b);
        let mut config = sc.runs[0].config.clone();
        config.flipped_site = None;
        let (_, metrics) = run_experiment(&config).unwrap();
        assert!(metrics.amplification.abs() < 1e-9);
        assert!(metrics.arrival_times.iter().all(Option::is_none));
    }

    #[test]
    fn run_experiment_is_deterministic() {
        let mut config = scenario(ScenarioId::Fig1b).runs[0].config.clone();
        config.n_samples = 50;
        let (a, _) = run_experiment(&config).unwrap();
        let (b, _) = run_experiment(&config).unwrap();
        for i in 0..a.n_samples() {
            for k in 1..=a.n_sites() {
                assert_eq!(a.polarization(i, k), b.polarization(i, k));
            }
        }
    }

    #[test]
    fn config_validation_errors() {
        let sc = scenario(ScenarioId::Fig1a);
        let mut config = sc.runs[0].config.clone();
        config.flipped_site = Some(9);
        assert!(matches!(
            config.validate(),
            Err(Error::SiteOutOfRange { .. })
        ));
        let mut config = sc.runs[0].config.clone();
        config.dt = Some(0.01);
        assert!(config.validate().is_err()); // dt on a static model
        let mut config = sc.runs[0].config.clone();
        config.t_max = 0.0;
        assert!(config.validate().is_err());
    }

    #[test]
    fn lab_frame_dt_cap_enforced() {
        let system = SystemSpec::homonuclear(2, Geometry::Chain).unwrap();
        let model = ModelSpec::new(Model::LabFrame)
            .with_omega1(0.1)
            .with_omega0(50.0)
            .with_j_coupling(1.0);
        let mut config = ExperimentConfig::new(system, model);
        config.t_max = 1.0;
        config.n_samples = 5;
        config.dt = Some(1.0);
        assert!(matches!(
            config.validate(),
            Err(Error::StepTooLarge { .. })
        ));
        config.dt = Some(lab_frame_dt_cap(50.0) / 2.0);
        assert!(config.validate().is_ok());
        let (traj, _) = run_experiment(&config).unwrap();
        assert_eq!(traj.n_samples(), 5);
    }
}
