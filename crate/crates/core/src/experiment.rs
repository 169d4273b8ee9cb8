//! Experiment harness: configuration, target sampling and result files.
//!
//! Output files and their columns/keys:
//!
//! | file | contents |
//! |------|----------|
//! | `points.csv` | `x,y` |
//! | `histogram.csv` | `x,y,count` |
//! | `reach.json` | [`ReachSummary`] |
//! | `solution.json` | [`ArmSolution`] |
//! | `trajectory.csv` | `step,segment,node_index,angle,effector_x,effector_y` |
//! | `runs.csv` | [`RunRecord`] fields in declaration order |
//! | `summary.json` | [`ExperimentSummary`] |
//! | `configs.csv` | `target_x,target_y,method,unique_count` |
//! | `configs_summary.json` | [`ConfigsSummary`] |

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arm::{make_constrained_gripper, reachability, ArmModel, ArmSegmentSpec, ArmSolution, GridConfig, ReachabilityReport, DEFAULT_BASE_STATES};
use crate::error::{Error, Result};
use crate::factor::{FactorizerConfig, Method};
use crate::phasor::{BasisPair, DEFAULT_DIMENSION};
use crate::rng::{HdcRng, Stream};
use crate::stats::{mean, spearman, std_dev};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Pipeline {
    #[default]
    #[serde(rename = "2d")]
    Planar,
    #[serde(rename = "3d-gripper")]
    Gripper,
}

impl Pipeline {
    pub fn as_str(self) -> &'static str {
        match self {
            Pipeline::Planar => "2d",
            Pipeline::Gripper => "3d-gripper",
        }
    }
}

impl std::str::FromStr for Pipeline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2d" => Ok(Pipeline::Planar),
            "3d-gripper" => Ok(Pipeline::Gripper),
            other => Err(Error::InvalidConfig(format!("unknown pipeline {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodSelection {
    Resonator,
    Hopfield,
    #[default]
    Both,
}

impl MethodSelection {
    pub fn methods(self) -> Vec<Method> {
        match self {
            MethodSelection::Resonator => vec![Method::Resonator],
            MethodSelection::Hopfield => vec![Method::Hopfield],
            MethodSelection::Both => vec![Method::Resonator, Method::Hopfield],
        }
    }
}

impl std::str::FromStr for MethodSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "resonator" => Ok(MethodSelection::Resonator),
            "hopfield" => Ok(MethodSelection::Hopfield),
            "both" => Ok(MethodSelection::Both),
            other => Err(Error::InvalidConfig(format!("unknown method {other:?}"))),
        }
    }
}

/// Everything an experiment depends on. Loaded from TOML; every key is
/// optional and defaults to the standard setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub dimension: usize,
    pub pipeline: Pipeline,
    pub method: MethodSelection,
    /// States per segment for the pipeline's default arm.
    pub state_counts: Vec<usize>,
    /// Replaces the pipeline's default segments entirely.
    pub segments: Option<Vec<ArmSegmentSpec>>,
    pub base_states: usize,
    pub grid_cell_size: f64,
    /// Number of sampled targets.
    pub targets: usize,
    /// Fixed targets used instead of sampling, `[x, y]` or `[x, y, z]`.
    pub explicit_targets: Option<Vec<Vec<f64>>>,
    /// Factorizations per target for `configs`.
    pub inits: usize,
    pub factorizer: FactorizerConfig,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            dimension: DEFAULT_DIMENSION,
            pipeline: Pipeline::Planar,
            method: MethodSelection::Both,
            state_counts: vec![19, 23, 29],
            segments: None,
            base_states: DEFAULT_BASE_STATES,
            grid_cell_size: 0.1,
            targets: 100,
            explicit_targets: None,
            inits: 20,
            factorizer: FactorizerConfig::default(),
            out_dir: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let config: Self = toml::from_str(s)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if self.grid_cell_size.is_nan() || self.grid_cell_size <= 0.0 {
            return Err(Error::InvalidConfig("grid_cell_size must be positive".into()));
        }
        if self.inits == 0 {
            return Err(Error::InvalidConfig("inits must be at least 1".into()));
        }
        if self.segments.is_none() && self.pipeline == Pipeline::Gripper && self.state_counts.len() != 3 {
            return Err(Error::InvalidConfig("the gripper needs exactly three state counts".into()));
        }
        if let Some(targets) = &self.explicit_targets {
            let want = self.target_arity();
            if targets.iter().any(|t| t.len() != want) {
                return Err(Error::InvalidConfig(format!("explicit targets need {want} coordinates")));
            }
        }
        self.factorizer.validate()
    }

    pub fn target_arity(&self) -> usize {
        match self.pipeline {
            Pipeline::Planar => 2,
            Pipeline::Gripper => 3,
        }
    }

    pub fn grid(&self) -> GridConfig {
        GridConfig { cell_size: self.grid_cell_size, first_quadrant_only: self.pipeline == Pipeline::Gripper }
    }

    pub fn factorizer_for(&self, method: Method) -> FactorizerConfig {
        FactorizerConfig { method, ..self.factorizer.clone() }
    }

    pub fn build_arm(&self) -> Result<ArmModel> {
        self.validate()?;
        let basis = Arc::new(BasisPair::from_seed(self.dimension, self.seed)?);
        match (self.pipeline, &self.segments) {
            (Pipeline::Planar, None) => {
                ArmModel::unconstrained(basis, &vec![1.0; self.state_counts.len()], &self.state_counts)
            }
            (Pipeline::Planar, Some(segs)) => ArmModel::new(segs.clone(), basis),
            (Pipeline::Gripper, None) => {
                let m = [self.state_counts[0], self.state_counts[1], self.state_counts[2]];
                let arm = make_constrained_gripper(basis, m)?;
                if self.base_states == DEFAULT_BASE_STATES {
                    Ok(arm)
                } else {
                    arm.with_rotating_base(self.base_states)
                }
            }
            (Pipeline::Gripper, Some(segs)) => ArmModel::new(segs.clone(), basis)?.with_rotating_base(self.base_states),
        }
    }
}

/// A target as requested plus the point the planar arm aims for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub point: Vec<f64>,
    pub planar: [f64; 2],
}

impl Target {
    pub fn new(point: Vec<f64>) -> Result<Self> {
        let planar = match point.as_slice() {
            [a, b] => [*a, *b],
            [a, b, c] => [a.hypot(*b), *c],
            _ => return Err(Error::InvalidConfig("targets have 2 or 3 coordinates".into())),
        };
        Ok(Self { point, planar })
    }
}

/// Samples distinct covered cells uniformly from the `Targets` stream; the
/// gripper pipeline adds a uniform azimuth per target.
pub fn sample_targets(config: &ExperimentConfig, report: &ReachabilityReport) -> Result<Vec<Target>> {
    if let Some(explicit) = &config.explicit_targets {
        return explicit.iter().map(|p| Target::new(p.clone())).collect();
    }
    let cells = report.covered_centers();
    if cells.is_empty() {
        return Err(Error::NoTargets);
    }
    let mut rng = HdcRng::stream(config.seed, Stream::Targets, 0);
    let n = config.targets.min(cells.len());
    let picks = sample(&mut rng, cells.len(), n).into_vec();
    picks
        .into_iter()
        .map(|i| {
            let [h, v] = cells[i];
            match config.pipeline {
                Pipeline::Planar => Target::new(vec![h, v]),
                Pipeline::Gripper => {
                    let theta = rng.random::<f64>() * std::f64::consts::TAU;
                    Ok(Target { point: vec![h * theta.cos(), h * theta.sin(), v], planar: [h, v] })
                }
            }
        })
        .collect()
}

fn method_id(method: Method) -> u64 {
    match method {
        Method::Resonator => 0,
        Method::Hopfield => 1,
    }
}

fn solve_rng(seed: u64, target_index: usize, method: Method) -> HdcRng {
    HdcRng::stream(seed, Stream::Factorizer, ((target_index as u64) << 2) | method_id(method))
}

fn configs_rng(seed: u64, target_index: usize, method: Method) -> HdcRng {
    HdcRng::stream(seed, Stream::Custom(1), ((target_index as u64) << 2) | method_id(method))
}

/// Solves one target from the rest pose.
pub fn solve_target<R: rand::RngCore + ?Sized>(
    arm: &ArmModel,
    target: &Target,
    config: &FactorizerConfig,
    rng: &mut R,
) -> Result<(ArmModel, ArmSolution)> {
    let mut arm = arm.clone();
    arm.reset_pose();
    let solution = match target.point.as_slice() {
        [a, b] => arm.solve_2d([*a, *b], config, rng)?,
        [a, b, c] => arm.solve_3d([*a, *b, *c], config, rng)?,
        _ => return Err(Error::InvalidConfig("targets have 2 or 3 coordinates".into())),
    };
    Ok((arm, solution))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub target_index: usize,
    pub target_x: f64,
    pub target_y: f64,
    pub target_z: Option<f64>,
    pub method: Method,
    /// Planar distance between the aimed-for point and the final effector.
    pub displacement: f64,
    pub similarity_to_target: f64,
    pub initializations_used: usize,
    pub final_threshold: f64,
    /// Per-segment plan lengths joined with `;`.
    pub plan_lengths: String,
    pub plans_converged: bool,
    pub wall_micros: u64,
}

impl RunRecord {
    fn new(target_index: usize, target: &Target, method: Method, solution: &ArmSolution, wall_micros: u64) -> Self {
        let fr = &solution.factor_result;
        let mut lengths: Vec<String> = solution.trajectories.iter().map(|t| t.len().to_string()).collect();
        if let Some(base) = &solution.base {
            lengths.push(base.trajectory.len().to_string());
        }
        Self {
            target_index,
            target_x: target.point[0],
            target_y: target.point[1],
            target_z: target.point.get(2).copied(),
            method,
            displacement: solution.displacement,
            similarity_to_target: fr.similarity_to_target,
            initializations_used: fr.initializations_used,
            final_threshold: fr.final_threshold,
            plan_lengths: lengths.join(";"),
            plans_converged: solution.plans_converged,
            wall_micros,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub runs: usize,
    pub displacement_mean: Option<f64>,
    pub displacement_std: Option<f64>,
    pub initializations_mean: Option<f64>,
    pub initializations_std: Option<f64>,
    pub first_attempt_rate: Option<f64>,
    pub final_threshold_mean: Option<f64>,
    pub spearman_similarity_displacement: Option<f64>,
}

impl MethodSummary {
    pub fn from_records<'a>(records: impl IntoIterator<Item = &'a RunRecord>) -> Self {
        let records: Vec<&RunRecord> = records.into_iter().collect();
        let disp: Vec<f64> = records.iter().map(|r| r.displacement).collect();
        let sims: Vec<f64> = records.iter().map(|r| r.similarity_to_target).collect();
        let inits: Vec<f64> = records.iter().map(|r| r.initializations_used as f64).collect();
        let first: Vec<f64> = records.iter().map(|r| if r.initializations_used == 1 { 1.0 } else { 0.0 }).collect();
        let thresholds: Vec<f64> = records.iter().map(|r| r.final_threshold).collect();
        Self {
            runs: records.len(),
            displacement_mean: mean(&disp),
            displacement_std: std_dev(&disp),
            initializations_mean: mean(&inits),
            initializations_std: std_dev(&inits),
            first_attempt_rate: mean(&first),
            final_threshold_mean: mean(&thresholds),
            spearman_similarity_displacement: spearman(&sims, &disp),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub pipeline: Pipeline,
    pub seed: u64,
    pub targets: usize,
    /// Keyed by method name.
    pub methods: BTreeMap<String, MethodSummary>,
    /// Over all records of all methods.
    pub spearman_similarity_displacement: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub targets: Vec<Target>,
    pub records: Vec<RunRecord>,
    pub summary: ExperimentSummary,
}

/// Runs every selected method on every target. Records come out ordered by
/// target, then method, regardless of thread scheduling.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let arm = config.build_arm()?;
    let report = reachability(&arm, &config.grid())?;
    let targets = sample_targets(config, &report)?;
    let methods = config.method.methods();
    let jobs: Vec<(usize, Method)> =
        (0..targets.len()).flat_map(|t| methods.iter().map(move |&m| (t, m))).collect();
    let records = jobs
        .par_iter()
        .map(|&(t, method)| {
            let mut rng = solve_rng(config.seed, t, method);
            let start = Instant::now();
            let (_, solution) = solve_target(&arm, &targets[t], &config.factorizer_for(method), &mut rng)?;
            let micros = start.elapsed().as_micros() as u64;
            Ok(RunRecord::new(t, &targets[t], method, &solution, micros))
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize(config, targets.len(), &records);
    Ok(ExperimentOutput { targets, records, summary })
}

pub fn summarize(config: &ExperimentConfig, targets: usize, records: &[RunRecord]) -> ExperimentSummary {
    let methods = config
        .method
        .methods()
        .into_iter()
        .map(|m| (m.as_str().to_string(), MethodSummary::from_records(records.iter().filter(|r| r.method == m))))
        .collect();
    let sims: Vec<f64> = records.iter().map(|r| r.similarity_to_target).collect();
    let disp: Vec<f64> = records.iter().map(|r| r.displacement).collect();
    ExperimentSummary {
        pipeline: config.pipeline,
        seed: config.seed,
        targets,
        methods,
        spearman_similarity_displacement: spearman(&sims, &disp),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigRecord {
    pub target_x: f64,
    pub target_y: f64,
    pub method: Method,
    pub unique_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigsSummary {
    pub pipeline: Pipeline,
    pub seed: u64,
    pub targets: usize,
    pub inits: usize,
    /// Mean and standard deviation of `unique_count`, keyed by method name.
    pub unique_mean: BTreeMap<String, Option<f64>>,
    pub unique_std: BTreeMap<String, Option<f64>>,
}

/// Distinct accepted configurations per target over `config.inits`
/// factorizations. Targets are reported by their planar coordinates.
pub fn run_configs(config: &ExperimentConfig) -> Result<(Vec<ConfigRecord>, ConfigsSummary)> {
    let mut arm = config.build_arm()?;
    arm.reset_pose();
    let report = reachability(&arm, &config.grid())?;
    let targets = sample_targets(config, &report)?;
    let methods = config.method.methods();
    let jobs: Vec<(usize, Method)> =
        (0..targets.len()).flat_map(|t| methods.iter().map(move |&m| (t, m))).collect();
    let records = jobs
        .par_iter()
        .map(|&(t, method)| {
            let mut rng = configs_rng(config.seed, t, method);
            let [x, y] = targets[t].planar;
            let found = arm.enumerate_configurations([x, y], &config.factorizer_for(method), &mut rng, config.inits)?;
            Ok(ConfigRecord { target_x: x, target_y: y, method, unique_count: found.len() })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut unique_mean = BTreeMap::new();
    let mut unique_std = BTreeMap::new();
    for m in methods {
        let counts: Vec<f64> = records.iter().filter(|r| r.method == m).map(|r| r.unique_count as f64).collect();
        unique_mean.insert(m.as_str().to_string(), mean(&counts));
        unique_std.insert(m.as_str().to_string(), std_dev(&counts));
    }
    let summary = ConfigsSummary {
        pipeline: config.pipeline,
        seed: config.seed,
        targets: targets.len(),
        inits: config.inits,
        unique_mean,
        unique_std,
    };
    Ok((records, summary))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReachSummary {
    pub pipeline: Pipeline,
    pub state_counts: Vec<usize>,
    #[serde(flatten)]
    pub report: ReachabilityReport,
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let mut w = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn write_csv<T: Serialize>(dir: &Path, name: &str, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(dir, name)?);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `points.csv`, `histogram.csv` and `reach.json`.
pub fn cmd_reach(config: &ExperimentConfig) -> Result<ReachSummary> {
    let arm = config.build_arm()?;
    let report = reachability(&arm, &config.grid())?;
    let dir = &config.out_dir;
    fs::create_dir_all(dir)?;
    report.write_points_csv(create(dir, "points.csv")?)?;
    report.write_histogram_csv(create(dir, "histogram.csv")?)?;
    let summary = ReachSummary {
        pipeline: config.pipeline,
        state_counts: arm.segments().iter().map(|s| s.state_count).collect(),
        report,
    };
    write_json(dir, "reach.json", &summary)?;
    Ok(summary)
}

/// Writes `solution.json` and `trajectory.csv` for one target, solved with the
/// first selected method.
pub fn cmd_solve(config: &ExperimentConfig, point: Vec<f64>) -> Result<ArmSolution> {
    if point.len() != config.target_arity() {
        return Err(Error::InvalidConfig(format!(
            "the {} pipeline takes {} coordinates",
            config.pipeline.as_str(),
            config.target_arity()
        )));
    }
    let arm = config.build_arm()?;
    let method = config.method.methods()[0];
    let mut rng = solve_rng(config.seed, 0, method);
    let (arm, solution) = solve_target(&arm, &Target::new(point)?, &config.factorizer_for(method), &mut rng)?;
    let dir = &config.out_dir;
    fs::create_dir_all(dir)?;
    write_json(dir, "solution.json", &solution)?;
    write_csv(dir, "trajectory.csv", &arm.trajectory_rows(&solution)?)?;
    Ok(solution)
}

/// Writes `runs.csv` and `summary.json`.
pub fn cmd_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let out = run_experiment(config)?;
    let dir = &config.out_dir;
    fs::create_dir_all(dir)?;
    write_csv(dir, "runs.csv", &out.records)?;
    write_json(dir, "summary.json", &out.summary)?;
    Ok(out)
}

/// Writes `configs.csv` and `configs_summary.json`.
pub fn cmd_configs(config: &ExperimentConfig) -> Result<ConfigsSummary> {
    let (records, summary) = run_configs(config)?;
    let dir = &config.out_dir;
    fs::create_dir_all(dir)?;
    write_csv(dir, "configs.csv", &records)?;
    write_json(dir, "configs_summary.json", &summary)?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            dimension: 512,
            state_counts: vec![7, 9, 11],
            targets: 4,
            inits: 2,
            ..Default::default()
        }
    }

    #[test]
    fn toml_defaults_and_overrides() {
        let c = ExperimentConfig::from_toml_str("").unwrap();
        assert_eq!(c, ExperimentConfig::default());
        let c = ExperimentConfig::from_toml_str(
            "seed = 9\npipeline = \"3d-gripper\"\nmethod = \"hopfield\"\n[factorizer]\nthreshold_initial = 0.95\n",
        )
        .unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.pipeline, Pipeline::Gripper);
        assert_eq!(c.method.methods(), vec![Method::Hopfield]);
        assert_eq!(c.factorizer.threshold_initial, 0.95);
        assert_eq!(c.factorizer.max_iterations, 50);
        assert!(ExperimentConfig::from_toml_str("sede = 1").is_err());
        assert!(ExperimentConfig::from_toml_str("pipeline = \"3d-gripper\"\nstate_counts = [5, 5]").is_err());
    }

    #[test]
    fn sampled_targets_are_distinct_covered_cells() {
        let c = small();
        let arm = c.build_arm().unwrap();
        let report = reachability(&arm, &c.grid()).unwrap();
        let t = sample_targets(&c, &report).unwrap();
        assert_eq!(t.len(), 4);
        let covered = report.covered_centers();
        for (i, a) in t.iter().enumerate() {
            assert!(covered.contains(&a.planar));
            assert!(t[..i].iter().all(|b| b.planar != a.planar));
        }
        assert_eq!(t, sample_targets(&c, &report).unwrap());
    }

    #[test]
    fn gripper_targets_keep_planar_part() {
        let c = ExperimentConfig { pipeline: Pipeline::Gripper, ..small() };
        let arm = c.build_arm().unwrap();
        let report = reachability(&arm, &c.grid()).unwrap();
        for t in sample_targets(&c, &report).unwrap() {
            assert_eq!(t.point.len(), 3);
            assert!((t.point[0].hypot(t.point[1]) - t.planar[0]).abs() < 1e-12);
            assert_eq!(t.point[2], t.planar[1]);
        }
    }

    #[test]
    fn experiment_is_ordered_and_repeatable() {
        let c = small();
        let a = run_experiment(&c).unwrap();
        let b = run_experiment(&c).unwrap();
        assert_eq!(a.records.len(), 8);
        for (i, r) in a.records.iter().enumerate() {
            assert_eq!(r.target_index, i / 2);
            assert_eq!(r.method, if i % 2 == 0 { Method::Resonator } else { Method::Hopfield });
        }
        let strip = |rs: &[RunRecord]| rs.iter().map(|r| RunRecord { wall_micros: 0, ..r.clone() }).collect::<Vec<_>>();
        assert_eq!(strip(&a.records), strip(&b.records));
        assert_eq!(a.summary, b.summary);
    }

    #[test]
    fn explicit_targets_and_single_init() {
        let c = ExperimentConfig {
            explicit_targets: Some(vec![vec![1.0, 1.0], vec![-0.5, 2.0]]),
            inits: 1,
            method: MethodSelection::Resonator,
            ..small()
        };
        let (records, summary) = run_configs(&c).unwrap();
        assert_eq!(records.len(), 2);
        assert!(records.iter().all(|r| r.unique_count == 1));
        assert_eq!(summary.unique_mean["resonator"], Some(1.0));
        let bad = ExperimentConfig { explicit_targets: Some(vec![vec![1.0]]), ..small() };
        assert!(bad.validate().is_err());
    }
}
