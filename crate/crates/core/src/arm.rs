//! Arm geometry and the target-to-pose pipelines.
//!
//! Every segment has its own codebook of angle states, encoded with the
//! shared basis as the segment's Cartesian offset, plus a CML over those
//! states. A target point is encoded the same way and factored into one state
//! per segment. Each segment's CML then plans independently towards its state.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::cml::{CmlModel, GraphSpec, PlanResult, Topology};
use crate::error::{Error, Result};
use crate::factor::{orchestrate, FactorProblem, FactorResult, FactorizerConfig};
use crate::phasor::{circular_codebook, fpe_encode, similarity, BasisPair, Codebook, CodebookLabel, Hypervector};
use crate::rng::{HdcRng, Stream};

/// Largest joint-state product [`reachability`] will enumerate.
pub const ENUMERATION_GUARD: u128 = 10_000_000;

/// Default number of azimuth states of the rotating base.
pub const DEFAULT_BASE_STATES: usize = 64;

/// Angle ranges of the constrained gripper: `[lo, hi]` per segment.
pub const GRIPPER_RANGES: [[f64; 2]; 3] = [
    [0.0, PI],
    [1.5 * PI, 2.5 * PI],
    [15.0 * PI / 8.0, 15.0 * PI / 8.0 + PI / 2.0],
];
pub const GRIPPER_LENGTHS: [f64; 3] = [1.0, 1.0, 0.5];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmSegmentSpec {
    pub length: f64,
    pub state_count: usize,
    /// `None` for a full circle, else the inclusive `[lo, hi]` range.
    pub angle_range: Option<[f64; 2]>,
    pub topology: Topology,
}

impl ArmSegmentSpec {
    pub fn full_circle(length: f64, state_count: usize) -> Self {
        Self { length, state_count, angle_range: None, topology: Topology::Ring }
    }

    pub fn restricted(length: f64, state_count: usize, lo: f64, hi: f64) -> Self {
        Self { length, state_count, angle_range: Some([lo, hi]), topology: Topology::Linear }
    }

    pub fn validate(&self) -> Result<()> {
        if self.state_count < 2 {
            return Err(Error::InvalidCodebookSize(self.state_count));
        }
        if self.length.is_nan() || self.length <= 0.0 {
            return Err(Error::InvalidConfig(format!("segment length {} must be positive", self.length)));
        }
        match (self.angle_range, self.topology) {
            (None, Topology::Ring) => {
                if self.state_count < 3 {
                    return Err(Error::InvalidCodebookSize(self.state_count));
                }
            }
            (Some([lo, hi]), Topology::Linear) => {
                if !(lo < hi && hi <= lo + TAU) {
                    return Err(Error::InvalidRange { lo, hi });
                }
            }
            _ => {
                return Err(Error::InvalidConfig(
                    "full-circle segments use ring graphs and restricted ranges use linear graphs".into(),
                ))
            }
        }
        Ok(())
    }

    /// Angle of 0-based state `k`.
    pub fn angle(&self, k: usize) -> f64 {
        let m = self.state_count as f64;
        match self.angle_range {
            None => TAU * (k + 1) as f64 / m,
            Some([lo, hi]) => lo + (hi - lo) * k as f64 / (m - 1.0),
        }
    }

    fn graph(&self) -> Result<GraphSpec> {
        match self.topology {
            Topology::Ring => GraphSpec::ring(self.state_count),
            Topology::Linear => GraphSpec::linear(self.state_count),
            Topology::Custom => Err(Error::InvalidConfig("segments need ring or linear graphs".into())),
        }
    }

    fn contains_angle(&self, w: f64) -> bool {
        match self.angle_range {
            None => true,
            Some([lo, hi]) => (w - lo).rem_euclid(TAU) <= hi - lo + 1e-12,
        }
    }
}

/// Segment states encoded as `x^a ⊙ y^b` with `(a, b) = r (cos ω_k, sin ω_k)`.
pub fn angle_codebook(segment: &ArmSegmentSpec, basis: &BasisPair) -> Result<Codebook> {
    segment.validate()?;
    let mut entries = Vec::with_capacity(segment.state_count);
    let mut labels = Vec::with_capacity(segment.state_count);
    for k in 0..segment.state_count {
        let angle = segment.angle(k);
        let offset = [segment.length * angle.cos(), segment.length * angle.sin()];
        entries.push(fpe_encode(basis, offset[0], offset[1]));
        labels.push(CodebookLabel { index: k, angle, offset });
    }
    Codebook::new(entries, labels)
}

pub fn encode_target(basis: &BasisPair, point: [f64; 2]) -> Hypervector {
    fpe_encode(basis, point[0], point[1])
}

/// Ring of circular-coded azimuth states with a uniform angle dictionary.
#[derive(Debug, Clone)]
pub struct RotatingBase {
    codebook: Arc<Codebook>,
    cml: Arc<CmlModel>,
    pub current_index: usize,
}

impl RotatingBase {
    pub fn new<R: RngCore + ?Sized>(state_count: usize, d: usize, rng: &mut R) -> Result<Self> {
        let codebook = Arc::new(circular_codebook(state_count, d, rng)?);
        let cml = Arc::new(CmlModel::build(Arc::clone(&codebook), GraphSpec::ring(state_count)?)?);
        Ok(Self { codebook, cml, current_index: 0 })
    }

    pub fn state_count(&self) -> usize {
        self.codebook.len()
    }

    pub fn codebook(&self) -> &Codebook {
        &self.codebook
    }

    pub fn cml(&self) -> &CmlModel {
        &self.cml
    }

    /// Azimuth paired with index `k`: `2πk / m`.
    pub fn angle(&self, k: usize) -> f64 {
        TAU * k as f64 / self.state_count() as f64
    }

    /// Index whose azimuth is closest to `theta`.
    pub fn nearest_index(&self, theta: f64) -> usize {
        let m = self.state_count();
        ((theta.rem_euclid(TAU) / TAU * m as f64).round() as usize) % m
    }
}

#[derive(Debug, Clone)]
pub struct ArmModel {
    segments: Vec<ArmSegmentSpec>,
    basis: Arc<BasisPair>,
    codebooks: Vec<Arc<Codebook>>,
    cmls: Vec<Arc<CmlModel>>,
    pub current_indices: Vec<usize>,
    pub base: Option<RotatingBase>,
}

impl ArmModel {
    pub fn new(segments: Vec<ArmSegmentSpec>, basis: Arc<BasisPair>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Empty("arm segments"));
        }
        let mut codebooks = Vec::with_capacity(segments.len());
        let mut cmls = Vec::with_capacity(segments.len());
        for seg in &segments {
            let cb = Arc::new(angle_codebook(seg, &basis)?);
            cmls.push(Arc::new(CmlModel::build(Arc::clone(&cb), seg.graph()?)?));
            codebooks.push(cb);
        }
        let current_indices = vec![0; segments.len()];
        Ok(Self { segments, basis, codebooks, cmls, current_indices, base: None })
    }

    /// Full-circle segments with the given lengths and state counts.
    pub fn unconstrained(basis: Arc<BasisPair>, lengths: &[f64], state_counts: &[usize]) -> Result<Self> {
        if lengths.len() != state_counts.len() {
            return Err(Error::InvalidConfig("one length per state count required".into()));
        }
        let segments = lengths.iter().zip(state_counts).map(|(&r, &m)| ArmSegmentSpec::full_circle(r, m)).collect();
        Self::new(segments, basis)
    }

    pub fn with_rotating_base(mut self, state_count: usize) -> Result<Self> {
        let mut rng = HdcRng::stream(self.basis.seed, Stream::Codebook, 0);
        self.base = Some(RotatingBase::new(state_count, self.basis.dim(), &mut rng)?);
        Ok(self)
    }

    pub fn segments(&self) -> &[ArmSegmentSpec] {
        &self.segments
    }

    pub fn basis(&self) -> &BasisPair {
        &self.basis
    }

    pub fn codebooks(&self) -> &[Arc<Codebook>] {
        &self.codebooks
    }

    pub fn cmls(&self) -> &[Arc<CmlModel>] {
        &self.cmls
    }

    pub fn reach(&self) -> f64 {
        self.segments.iter().map(|s| s.length).sum()
    }

    pub fn reset_pose(&mut self) {
        self.current_indices.iter_mut().for_each(|i| *i = 0);
        if let Some(base) = &mut self.base {
            base.current_index = 0;
        }
    }

    fn check_indices(&self, indices: &[usize]) -> Result<()> {
        if indices.len() != self.segments.len() {
            return Err(Error::InvalidConfig(format!(
                "{} indices for {} segments",
                indices.len(),
                self.segments.len()
            )));
        }
        for (&i, seg) in indices.iter().zip(&self.segments) {
            if i >= seg.state_count {
                return Err(Error::IndexOutOfRange { index: i, len: seg.state_count });
            }
        }
        Ok(())
    }

    /// Effector position for the given per-segment states.
    ///
    /// Segment vectors are summed in a canonical order, so the result does not
    /// depend on segment order down to the last bit.
    pub fn forward_kinematics(&self, indices: &[usize]) -> Result<[f64; 2]> {
        self.check_indices(indices)?;
        let vectors: Vec<[f64; 2]> = indices
            .iter()
            .zip(&self.codebooks)
            .map(|(&i, cb)| cb.labels()[i].offset)
            .collect();
        Ok(canonical_sum(vectors))
    }

    /// Whether some continuous choice of in-range angles reaches `p`.
    pub fn continuously_reachable(&self, p: [f64; 2]) -> bool {
        let lengths: Vec<f64> = self.segments.iter().map(|s| s.length).collect();
        if self.segments.iter().all(|s| s.angle_range.is_none()) {
            let total: f64 = lengths.iter().sum();
            let longest = lengths.iter().copied().fold(0.0, f64::max);
            let inner = (2.0 * longest - total).max(0.0);
            let r = p[0].hypot(p[1]);
            return r >= inner && r <= total;
        }
        reachable_restricted(&self.segments, p)
    }

    fn current_states(&self) -> Vec<Hypervector> {
        self.current_indices
            .iter()
            .zip(&self.codebooks)
            .map(|(&i, cb)| cb.entries()[i].clone())
            .collect()
    }

    fn factor_problem(&self, target: [f64; 2]) -> Result<FactorProblem> {
        FactorProblem::new(encode_target(&self.basis, target), self.codebooks.clone())?
            .with_initial_estimates(&self.current_states())
    }

    /// Factors the encoded target with the current pose as the first estimate.
    pub fn factor_target<R: RngCore + ?Sized>(
        &self,
        target: [f64; 2],
        config: &FactorizerConfig,
        rng: &mut R,
    ) -> Result<FactorResult> {
        orchestrate(&self.factor_problem(target)?, config, rng)
    }

    /// Distinct accepted configurations over `attempts` factorizations.
    pub fn enumerate_configurations<R: RngCore + ?Sized>(
        &self,
        target: [f64; 2],
        config: &FactorizerConfig,
        rng: &mut R,
        attempts: usize,
    ) -> Result<std::collections::BTreeSet<Vec<usize>>> {
        crate::factor::enumerate_solutions(&self.factor_problem(target)?, config, rng, attempts)
    }

    /// Graph distance from the current pose summed over segments.
    pub fn total_change(&self, indices: &[usize]) -> Result<usize> {
        self.check_indices(indices)?;
        Ok(indices
            .iter()
            .zip(&self.current_indices)
            .zip(&self.segments)
            .map(|((&to, &from), seg)| {
                let diff = to.abs_diff(from);
                match seg.topology {
                    Topology::Ring => diff.min(seg.state_count - diff),
                    _ => diff,
                }
            })
            .sum())
    }

    /// Orders candidate configurations by [`total_change`](Self::total_change).
    pub fn rank_by_total_change<'a, I>(&self, candidates: I) -> Result<Vec<(Vec<usize>, usize)>>
    where
        I: IntoIterator<Item = &'a Vec<usize>>,
    {
        let mut ranked = candidates
            .into_iter()
            .map(|c| Ok((c.clone(), self.total_change(c)?)))
            .collect::<Result<Vec<_>>>()?;
        ranked.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        Ok(ranked)
    }

    /// Encodes, factors and repositions the arm towards a planar target.
    pub fn solve_2d<R: RngCore + ?Sized>(
        &mut self,
        target: [f64; 2],
        config: &FactorizerConfig,
        rng: &mut R,
    ) -> Result<ArmSolution> {
        let norm = target[0].hypot(target[1]);
        if norm > self.reach() + 1e-12 {
            return Err(Error::InvalidConfig(format!("target at distance {norm} exceeds reach {}", self.reach())));
        }
        self.solve_2d_unguarded(target, config, rng)
    }

    /// [`solve_2d`](Self::solve_2d) without the reach check.
    pub fn solve_2d_unguarded<R: RngCore + ?Sized>(
        &mut self,
        target: [f64; 2],
        config: &FactorizerConfig,
        rng: &mut R,
    ) -> Result<ArmSolution> {
        let factor_result = self.factor_target(target, config, rng)?;
        let desired = factor_result.indices.clone();
        let mut trajectories = Vec::with_capacity(desired.len());
        for ((cml, &from), &to) in self.cmls.iter().zip(&self.current_indices).zip(&desired) {
            trajectories.push(cml.plan(from, to, cml.default_max_steps())?);
        }
        let finals: Vec<usize> = trajectories.iter().map(PlanResult::last_node).collect();
        let initial_indices = std::mem::replace(&mut self.current_indices, finals.clone());
        let final_effector = self.forward_kinematics(&finals)?;
        let displacement = (target[0] - final_effector[0]).hypot(target[1] - final_effector[1]);
        Ok(ArmSolution {
            target: target.to_vec(),
            target_planar: target,
            initial_indices,
            desired_indices: desired,
            trajectories: trajectories.clone(),
            plans_converged: trajectories.iter().all(|t| t.converged),
            final_effector,
            displacement,
            base: None,
            factor_result,
        })
    }

    /// Solves a spatial target with the rotating base.
    ///
    /// `(a, b, c)` becomes azimuth `θ = atan2(b, a)` and the in-plane target
    /// `(hypot(a, b), c)`, i.e. `(ρ cos ϕ, ρ sin ϕ)` with elevation `ϕ`. The
    /// planar arm solves the in-plane target and the base rotates to the state
    /// nearest `θ`.
    pub fn solve_3d<R: RngCore + ?Sized>(
        &mut self,
        target: [f64; 3],
        config: &FactorizerConfig,
        rng: &mut R,
    ) -> Result<ArmSolution> {
        if self.base.is_none() {
            return Err(Error::InvalidConfig("3D solves need a rotating base".into()));
        }
        let [a, b, c] = target;
        let planar = [a.hypot(b), c];
        let azimuth = b.atan2(a);
        let mut solution = self.solve_2d(planar, config, rng)?;
        let base = self.base.as_mut().expect("checked above");
        let desired = base.nearest_index(azimuth);
        let plan = base.cml.plan(base.current_index, desired, base.cml.default_max_steps())?;
        let initial_index = base.current_index;
        base.current_index = plan.last_node();
        let base_angle = base.angle(base.current_index);
        let [h, v] = solution.final_effector;
        let effector = [h * base_angle.cos(), h * base_angle.sin(), v];
        let displacement_3d = ((a - effector[0]).powi(2) + (b - effector[1]).powi(2) + (c - effector[2]).powi(2)).sqrt();
        solution.plans_converged &= plan.converged;
        solution.target = target.to_vec();
        solution.base = Some(BaseSolution {
            azimuth,
            initial_index,
            desired_index: desired,
            trajectory: plan,
            final_effector_3d: effector,
            displacement_3d,
        });
        Ok(solution)
    }

    /// Per-step joint states and effector positions of a solution, with all
    /// segments moving together and finished segments holding still.
    pub fn trajectory_rows(&self, solution: &ArmSolution) -> Result<Vec<TrajectoryRow>> {
        let steps = solution
            .trajectories
            .iter()
            .map(PlanResult::len)
            .chain(solution.base.iter().map(|b| b.trajectory.len()))
            .max()
            .unwrap_or(0);
        let n = self.segments.len();
        let mut rows = Vec::new();
        for step in 0..=steps {
            let indices: Vec<usize> = solution
                .trajectories
                .iter()
                .map(|t| t.node_path[step.min(t.len())])
                .collect();
            let [effector_x, effector_y] = self.forward_kinematics(&indices)?;
            for (segment, &node_index) in indices.iter().enumerate() {
                rows.push(TrajectoryRow {
                    step,
                    segment,
                    node_index,
                    angle: self.segments[segment].angle(node_index),
                    effector_x,
                    effector_y,
                });
            }
            if let (Some(b), Some(base)) = (&solution.base, &self.base) {
                let node_index = b.trajectory.node_path[step.min(b.trajectory.len())];
                rows.push(TrajectoryRow {
                    step,
                    segment: n,
                    node_index,
                    angle: base.angle(node_index),
                    effector_x,
                    effector_y,
                });
            }
        }
        Ok(rows)
    }
}

fn canonical_sum(mut vectors: Vec<[f64; 2]>) -> [f64; 2] {
    vectors.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    vectors.iter().fold([0.0, 0.0], |acc, v| [acc[0] + v[0], acc[1] + v[1]])
}

/// Angle samples per leading segment in the restricted reachability test.
const REACH_SAMPLES: usize = 1441;

fn reachable_restricted(segments: &[ArmSegmentSpec], p: [f64; 2]) -> bool {
    match segments.len() {
        0 => p[0] == 0.0 && p[1] == 0.0,
        1 => {
            let s = &segments[0];
            ((p[0].hypot(p[1]) - s.length).abs() < 1e-9) && s.contains_angle(p[1].atan2(p[0]))
        }
        2 => two_link_reachable(&segments[0], &segments[1], p),
        _ => {
            let (first, rest) = segments.split_first().expect("non-empty");
            let samples = if rest.len() == 2 { REACH_SAMPLES } else { 181 };
            let (lo, span) = match first.angle_range {
                None => (0.0, TAU),
                Some([lo, hi]) => (lo, hi - lo),
            };
            (0..samples).any(|i| {
                let w = lo + span * i as f64 / (samples - 1) as f64;
                let q = [p[0] - first.length * w.cos(), p[1] - first.length * w.sin()];
                reachable_restricted(rest, q)
            })
        }
    }
}

fn two_link_reachable(s1: &ArmSegmentSpec, s2: &ArmSegmentSpec, q: [f64; 2]) -> bool {
    let (r1, r2) = (s1.length, s2.length);
    let dist = q[0].hypot(q[1]);
    if dist > r1 + r2 || dist < (r1 - r2).abs() {
        return false;
    }
    if dist == 0.0 {
        return (0..REACH_SAMPLES).any(|i| {
            let w = TAU * i as f64 / REACH_SAMPLES as f64;
            s1.contains_angle(w) && s2.contains_angle(w + PI)
        });
    }
    let base = q[1].atan2(q[0]);
    let cos_alpha = ((r1 * r1 + dist * dist - r2 * r2) / (2.0 * r1 * dist)).clamp(-1.0, 1.0);
    let alpha = cos_alpha.acos();
    [alpha, -alpha].iter().any(|&sign_alpha| {
        let w1 = base + sign_alpha;
        let rem = [q[0] - r1 * w1.cos(), q[1] - r1 * w1.sin()];
        s1.contains_angle(w1) && s2.contains_angle(rem[1].atan2(rem[0]))
    })
}

/// Rotation part of a spatial solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseSolution {
    pub azimuth: f64,
    pub initial_index: usize,
    pub desired_index: usize,
    pub trajectory: PlanResult,
    pub final_effector_3d: [f64; 3],
    pub displacement_3d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmSolution {
    /// The requested point, 2 or 3 coordinates.
    pub target: Vec<f64>,
    /// The point the planar arm aims for.
    pub target_planar: [f64; 2],
    pub initial_indices: Vec<usize>,
    pub desired_indices: Vec<usize>,
    pub trajectories: Vec<PlanResult>,
    pub plans_converged: bool,
    pub final_effector: [f64; 2],
    /// Planar distance between `target_planar` and `final_effector`.
    pub displacement: f64,
    pub base: Option<BaseSolution>,
    pub factor_result: FactorResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub step: usize,
    pub segment: usize,
    pub node_index: usize,
    pub angle: f64,
    pub effector_x: f64,
    pub effector_y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub cell_size: f64,
    /// Only cells with both center coordinates positive are admissible.
    pub first_quadrant_only: bool,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { cell_size: 0.1, first_quadrant_only: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellCount {
    pub ix: i64,
    pub iy: i64,
    pub x: f64,
    pub y: f64,
    pub count: u64,
    pub admissible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReachabilityReport {
    #[serde(skip)]
    pub attainable_points: Vec<[f64; 2]>,
    pub point_count: usize,
    pub grid_cell_size: f64,
    pub covered_cells: usize,
    pub total_cells: usize,
    pub coverage_fraction: f64,
    /// Admissible cells and any cell holding attainable points, by `(ix, iy)`.
    #[serde(skip)]
    pub histogram: Vec<CellCount>,
}

impl ReachabilityReport {
    /// Centers of admissible cells holding at least one attainable point.
    pub fn covered_centers(&self) -> Vec<[f64; 2]> {
        self.histogram.iter().filter(|c| c.admissible && c.count > 0).map(|c| [c.x, c.y]).collect()
    }

    pub fn write_points_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "y"])?;
        for p in &self.attainable_points {
            w.write_record([p[0].to_string(), p[1].to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_histogram_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "y", "count"])?;
        for c in &self.histogram {
            w.write_record([c.x.to_string(), c.y.to_string(), c.count.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Enumerates every joint-state combination and bins the effector points.
///
/// A cell is admissible when its center is continuously reachable (and, if
/// requested, lies in the open first quadrant); it is covered when it holds at
/// least one attainable point.
pub fn reachability(arm: &ArmModel, grid: &GridConfig) -> Result<ReachabilityReport> {
    if grid.cell_size.is_nan() || grid.cell_size <= 0.0 {
        return Err(Error::InvalidConfig("cell size must be positive".into()));
    }
    let sizes: Vec<usize> = arm.segments.iter().map(|s| s.state_count).collect();
    let total: u128 = sizes.iter().map(|&m| m as u128).product();
    if total > ENUMERATION_GUARD {
        return Err(Error::EnumerationGuard(total));
    }
    let offsets: Vec<&[CodebookLabel]> = arm.codebooks.iter().map(|cb| cb.labels()).collect();
    let mut points = Vec::with_capacity(total as usize);
    let mut idx = vec![0usize; sizes.len()];
    'outer: loop {
        points.push(canonical_sum(idx.iter().zip(&offsets).map(|(&i, l)| l[i].offset).collect()));
        for pos in (0..idx.len()).rev() {
            idx[pos] += 1;
            if idx[pos] < sizes[pos] {
                continue 'outer;
            }
            idx[pos] = 0;
        }
        break;
    }
    let c = grid.cell_size;
    let mut counts: HashMap<(i64, i64), u64> = HashMap::new();
    for p in &points {
        *counts.entry(((p[0] / c).floor() as i64, (p[1] / c).floor() as i64)).or_default() += 1;
    }
    let bound = (arm.reach() / c).ceil() as i64 + 1;
    let mut histogram = Vec::new();
    let (mut covered, mut admissible_total) = (0, 0);
    for ix in -bound..bound {
        for iy in -bound..bound {
            let (x, y) = ((ix as f64 + 0.5) * c, (iy as f64 + 0.5) * c);
            let quadrant_ok = !grid.first_quadrant_only || (x > 0.0 && y > 0.0);
            let admissible = quadrant_ok && arm.continuously_reachable([x, y]);
            let count = counts.get(&(ix, iy)).copied().unwrap_or(0);
            if admissible {
                admissible_total += 1;
                if count > 0 {
                    covered += 1;
                }
            }
            if admissible || count > 0 {
                histogram.push(CellCount { ix, iy, x, y, count, admissible });
            }
        }
    }
    Ok(ReachabilityReport {
        point_count: points.len(),
        attainable_points: points,
        grid_cell_size: c,
        covered_cells: covered,
        total_cells: admissible_total,
        coverage_fraction: if admissible_total == 0 { 0.0 } else { covered as f64 / admissible_total as f64 },
        histogram,
    })
}

/// Three-segment arm limited to the gripper ranges, linear graphs and an
/// optional rotating base.
pub fn make_constrained_gripper(basis: Arc<BasisPair>, state_counts: [usize; 3]) -> Result<ArmModel> {
    let segments = (0..3)
        .map(|i| {
            let [lo, hi] = GRIPPER_RANGES[i];
            ArmSegmentSpec::restricted(GRIPPER_LENGTHS[i], state_counts[i], lo, hi)
        })
        .collect();
    ArmModel::new(segments, basis)?.with_rotating_base(DEFAULT_BASE_STATES)
}

/// Solution audit: the reconstruction clears the recorded threshold against
/// the encoded planar target.
pub fn audit_solution(arm: &ArmModel, solution: &ArmSolution) -> Result<bool> {
    let target = encode_target(arm.basis(), solution.target_planar);
    let recon = FactorProblem::new(target.clone(), arm.codebooks().to_vec())?.reconstruct(&solution.desired_indices)?;
    Ok(similarity(&recon, &target)? >= solution.factor_result.final_threshold - 1e-12)
}
