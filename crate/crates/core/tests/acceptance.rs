//! Acceptance suite. Prints one PASS/FAIL line per criterion and always exits
//! successfully; the printed verdicts are the result.

use std::collections::VecDeque;
use std::fs;
use std::sync::Arc;
use std::time::{Duration, Instant};

use cml_arm::arm::{angle_codebook, reachability, ArmSegmentSpec};
use cml_arm::experiment::{cmd_experiment, run_configs, run_experiment, ExperimentOutput};
use cml_arm::factor::{brute_force_best, orchestrate};
use cml_arm::phasor::{random_phasor, similarity, ComplexVector};
use cml_arm::{
    ArmModel, BasisPair, CmlModel, Codebook, ExperimentConfig, FactorProblem, FactorizerConfig, GraphSpec, GridConfig,
    HdcRng, Hypervector, Method, Pipeline, Stream,
};
use rand::Rng;

struct Report {
    passed: usize,
    failed: usize,
}

impl Report {
    fn line(&mut self, id: &str, ok: bool, detail: String) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
        println!("{} {id}: {detail}", if ok { "PASS" } else { "FAIL" });
    }
}

fn within(x: Option<f64>, lo: f64, hi: f64) -> bool {
    x.is_some_and(|x| (lo..=hi).contains(&x))
}

fn fmt(x: Option<f64>) -> String {
    x.map_or("n/a".into(), |x| format!("{x:.4}"))
}

fn basis() -> Arc<BasisPair> {
    Arc::new(BasisPair::from_seed(1024, 1).unwrap())
}

fn planar_config(counts: [usize; 3]) -> ExperimentConfig {
    ExperimentConfig { state_counts: counts.to_vec(), ..ExperimentConfig::default() }
}

fn gripper_config() -> ExperimentConfig {
    ExperimentConfig { pipeline: Pipeline::Gripper, ..ExperimentConfig::default() }
}

fn enumeration(r: &mut Report) {
    for (counts, expected) in [([29, 29, 29], 24_389), ([19, 23, 29], 12_673)] {
        let start = Instant::now();
        let arm = ArmModel::unconstrained(basis(), &[1.0; 3], &counts).unwrap();
        let report = reachability(&arm, &GridConfig::default()).unwrap();
        let elapsed = start.elapsed();
        r.line(
            &format!("1 enumeration m={counts:?}"),
            report.point_count == expected && elapsed < Duration::from_secs(10),
            format!("{} points (expected {expected}) in {:.2?}", report.point_count, elapsed),
        );
    }
}

fn coverage(r: &mut Report) {
    let cases = [
        ("m=[29,29,29]", planar_config([29, 29, 29]), 74.5, 3.0),
        ("m=[19,23,29]", planar_config([19, 23, 29]), 98.8, 1.5),
        ("gripper", gripper_config(), 99.4, 1.5),
    ];
    for (name, config, centre, tol) in cases {
        let arm = config.build_arm().unwrap();
        let report = reachability(&arm, &config.grid()).unwrap();
        let pct = 100.0 * report.coverage_fraction;
        r.line(
            &format!("2 coverage {name}"),
            (pct - centre).abs() <= tol,
            format!(
                "{pct:.2}% ({}/{} cells), expected {centre} ± {tol}",
                report.covered_cells, report.total_cells
            ),
        );
    }
}

fn run(pipeline: &str, config: &ExperimentConfig) -> (ExperimentOutput, Duration) {
    let start = Instant::now();
    let out = run_experiment(config).unwrap();
    let elapsed = start.elapsed();
    println!("     {pipeline} experiment: {} targets in {elapsed:.2?}", out.summary.targets);
    (out, elapsed)
}

fn displacement(r: &mut Report, pipeline: &str, out: &ExperimentOutput, elapsed: Duration, resonator_hi: f64) {
    for (method, hi) in [("resonator", resonator_hi), ("hopfield", 0.12)] {
        let s = &out.summary.methods[method];
        r.line(
            &format!("3 displacement {pipeline} {method}"),
            out.summary.targets >= 100 && within(s.displacement_mean, 0.03, hi),
            format!(
                "mean {} ± {} over {} runs, expected [0.03, {hi}]",
                fmt(s.displacement_mean),
                fmt(s.displacement_std),
                s.runs
            ),
        );
    }
    r.line(
        &format!("3 runtime {pipeline}"),
        elapsed < Duration::from_secs(600),
        format!("{elapsed:.2?}, budget 10 min"),
    );
}

fn initializations(r: &mut Report, pipeline: &str, out: &ExperimentOutput) {
    let res = out.summary.methods["resonator"].initializations_mean;
    let hop = out.summary.methods["hopfield"].initializations_mean;
    r.line(
        &format!("4 initializations {pipeline}"),
        res.zip(hop).is_some_and(|(a, b)| a < b) && within(res, 5.0, 30.0) && within(hop, 15.0, 60.0),
        format!(
            "resonator {} (expected [5, 30]), hopfield {} (expected [15, 60]), resonator < hopfield required",
            fmt(res),
            fmt(hop)
        ),
    );
}

fn correlation(r: &mut Report, pipeline: &str, out: &ExperimentOutput) {
    let rho = out.summary.spearman_similarity_displacement;
    r.line(
        &format!("6 correlation {pipeline}"),
        rho.is_some_and(|x| x <= -0.7),
        format!("spearman {}, expected <= -0.7", fmt(rho)),
    );
}

fn multiplicity(r: &mut Report, pipeline: &str, config: &ExperimentConfig) {
    let start = Instant::now();
    let (_, summary) = run_configs(&ExperimentConfig { inits: 20, ..config.clone() }).unwrap();
    println!("     {pipeline} configs: {} targets x 20 in {:.2?}", summary.targets, start.elapsed());
    for method in ["resonator", "hopfield"] {
        let m = summary.unique_mean[method];
        r.line(
            &format!("5 multiplicity {pipeline} {method}"),
            within(m, 3.0, 9.0),
            format!("mean {} ± {} unique configurations, expected [3, 9]", fmt(m), fmt(summary.unique_std[method])),
        );
    }
}

fn max_diff<A: ComplexVector, B: ComplexVector>(a: &A, b: &B) -> f64 {
    a.elements().iter().zip(b.elements()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn fpe_identities(r: &mut Report) {
    for d in [512, 1024] {
        let mut rng = HdcRng::stream(7, Stream::Custom(70), d as u64);
        let basis = BasisPair::from_seed(d, 7).unwrap();
        let (mut hom, mut unb) = (0.0f64, 0.0f64);
        for _ in 0..1000 {
            let [a1, b1, a2, b2]: [f64; 4] = std::array::from_fn(|_| rng.random_range(-4.0..4.0));
            let sum = basis.encode(a1 + a2, b1 + b2);
            let prod = basis.encode(a1, b1).bind(&basis.encode(a2, b2)).unwrap();
            hom = hom.max(max_diff(&sum, &prod));
            let x = random_phasor(d, &mut rng).unwrap();
            let y = random_phasor(d, &mut rng).unwrap();
            unb = unb.max(max_diff(&x.bind(&y).unwrap().unbind(&y).unwrap(), &x));
        }
        r.line(
            &format!("7 fpe homomorphism d={d}"),
            hom < 1e-9,
            format!("max deviation {hom:.2e} over 1000 cases, tolerance 1e-9"),
        );
        r.line(
            &format!("7 exact unbinding d={d}"),
            unb < 1e-9,
            format!("max deviation {unb:.2e} over 1000 cases, tolerance 1e-9"),
        );
    }
}

fn noise_floor(r: &mut Report) {
    let mut rng = HdcRng::stream(8, Stream::Custom(71), 0);
    let mut total = 0.0;
    for _ in 0..1000 {
        let a = random_phasor(1024, &mut rng).unwrap();
        let b = random_phasor(1024, &mut rng).unwrap();
        total += similarity(&a, &b).unwrap().abs();
    }
    let m = total / 1000.0;
    r.line("7 noise floor", m < 0.05, format!("mean |similarity| {m:.4} over 1000 pairs at d=1024, expected < 0.05"));
}

fn bfs_distance(graph: &GraphSpec, start: usize, goal: usize) -> usize {
    let mut dist = vec![usize::MAX; graph.node_count];
    dist[start] = 0;
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for &(a, b) in &graph.edges {
            if a == u && dist[b] == usize::MAX {
                dist[b] = dist[u] + 1;
                queue.push_back(b);
            }
        }
    }
    dist[goal]
}

fn cml_bfs(r: &mut Report) {
    let graphs = [5, 11, 29]
        .map(|m| (format!("ring m={m}"), GraphSpec::ring(m).unwrap()))
        .into_iter()
        .chain([5, 10, 29].map(|m| (format!("linear m={m}"), GraphSpec::linear(m).unwrap())));
    for (name, graph) in graphs {
        let m = graph.node_count;
        let mut rng = HdcRng::stream(9, Stream::Custom(72), m as u64);
        let entries = (0..m).map(|_| random_phasor(1024, &mut rng).unwrap()).collect();
        let states = Arc::new(Codebook::from_entries(entries).unwrap());
        let cml = CmlModel::build(states, graph.clone()).unwrap();
        let mut mismatches = 0;
        for start in 0..m {
            for goal in 0..m {
                let plan = cml.plan(start, goal, cml.default_max_steps()).unwrap();
                let valid = plan.node_path.windows(2).all(|w| graph.edges.contains(&(w[0], w[1])));
                if !(plan.converged && valid && plan.len() == bfs_distance(&graph, start, goal)) {
                    mismatches += 1;
                }
            }
        }
        r.line(
            &format!("7 cml-bfs {name}"),
            mismatches == 0,
            format!("{mismatches} of {} pairs differ from BFS", m * m),
        );
    }
}

fn oracle_codebooks(angles: bool, counts: [usize; 3], basis: &BasisPair, rng: &mut HdcRng) -> Vec<Arc<Codebook>> {
    counts
        .iter()
        .map(|&m| {
            let cb = if angles {
                angle_codebook(&ArmSegmentSpec::full_circle(1.0, m), basis).unwrap()
            } else {
                Codebook::from_entries((0..m).map(|_| random_phasor(basis.dim(), rng).unwrap()).collect()).unwrap()
            };
            Arc::new(cb)
        })
        .collect()
}

fn factor_oracle(r: &mut Report) {
    let basis = BasisPair::from_seed(1024, 11).unwrap();
    for (family, angles) in [("random codebooks", false), ("angle codebooks", true)] {
        for method in [Method::Resonator, Method::Hopfield] {
            let config = FactorizerConfig::with_method(method);
            let mut rng = HdcRng::stream(11, Stream::Custom(73), angles as u64);
            let mut misses = 0;
            for _ in 0..50 {
                let counts: [usize; 3] = std::array::from_fn(|_| rng.random_range(3..=11));
                let codebooks = oracle_codebooks(angles, counts, &basis, &mut rng);
                let truth: Vec<usize> = counts.iter().map(|&m| rng.random_range(0..m)).collect();
                let target = truth
                    .iter()
                    .zip(&codebooks)
                    .fold(Hypervector::ones(1024), |acc, (&k, cb)| acc.bind(cb.entry(k).unwrap()).unwrap());
                let problem = FactorProblem::new(target.clone(), codebooks).unwrap();
                let (best, _) = brute_force_best(&problem).unwrap();
                let found = orchestrate(&problem, &config, &mut rng).unwrap();
                let sim = similarity(&problem.reconstruct(&found.indices).unwrap(), &target).unwrap();
                if found.indices != best && sim < config.threshold_initial {
                    misses += 1;
                }
            }
            r.line(
                &format!("7 factor oracle {} {family}", method.as_str()),
                misses == 0,
                format!("{misses} of 50 exact-product targets neither match nor tie (>= 0.99) the brute-force best"),
            );
        }
    }
}

fn determinism(r: &mut Report) {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let runs: Vec<(Vec<Vec<String>>, String)> = dirs
        .iter()
        .map(|dir| {
            let config = ExperimentConfig {
                state_counts: vec![7, 9, 11],
                dimension: 512,
                targets: 5,
                out_dir: dir.path().to_path_buf(),
                ..ExperimentConfig::default()
            };
            cmd_experiment(&config).unwrap();
            let mut csv = csv::Reader::from_path(dir.path().join("runs.csv")).unwrap();
            let header = csv.headers().unwrap().clone();
            let keep: Vec<usize> = (0..header.len()).filter(|&i| &header[i] != "wall_micros").collect();
            let rows = csv.records().map(|rec| keep.iter().map(|&i| rec.as_ref().unwrap()[i].to_string()).collect()).collect();
            (rows, fs::read_to_string(dir.path().join("summary.json")).unwrap())
        })
        .collect();
    r.line(
        "7 determinism",
        runs[0] == runs[1],
        format!("two seeded runs give {} CSV rows (timing column excluded)", if runs[0] == runs[1] { "identical" } else { "different" }),
    );
}

fn main() {
    let start = Instant::now();
    let mut r = Report { passed: 0, failed: 0 };

    enumeration(&mut r);
    coverage(&mut r);

    let planar = planar_config([19, 23, 29]);
    let gripper = gripper_config();
    for (name, config, resonator_hi) in [("2d", &planar, 0.12), ("gripper", &gripper, 0.14)] {
        let (out, elapsed) = run(name, config);
        displacement(&mut r, name, &out, elapsed, resonator_hi);
        initializations(&mut r, name, &out);
        correlation(&mut r, name, &out);
    }
    for (name, config) in [("2d", &planar), ("gripper", &gripper)] {
        multiplicity(&mut r, name, config);
    }

    fpe_identities(&mut r);
    noise_floor(&mut r);
    cml_bfs(&mut r);
    factor_oracle(&mut r);
    determinism(&mut r);

    println!("acceptance: {} passed, {} failed in {:.2?}", r.passed, r.failed, start.elapsed());
}
