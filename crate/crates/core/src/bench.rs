//! Solver dispatch, benchmark campaigns and their tables.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::contraction::{evaluate_sequence, optimal_cc, ContractionSequence};
use crate::decomposition::{
    eo_to_td, heuristic_order, ordering_width, read_td, treewidth_exact, validate_td, CancelToken, EliminationOrdering,
    ExactOptions, Heuristic, TreeDecomposition,
};
use crate::error::{Error, Result};
use crate::graph::{line_graph, read_gr, write_gr, Graph, LineGraphMap, TensorNetwork};

/// Slack allowed past a timeout before a run counts as overdue.
pub const GRACE: Duration = Duration::from_millis(100);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Algorithm {
    Exact,
    MinFill,
    MinDegree,
    /// Shell command reading `.gr` on stdin and writing `.td` on stdout.
    External(String),
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Exact => "exact",
            Algorithm::MinFill => "min-fill",
            Algorithm::MinDegree => "min-degree",
            Algorithm::External(_) => "external",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "exact" => Ok(Algorithm::Exact),
            "min-fill" => Ok(Algorithm::MinFill),
            "min-degree" => Ok(Algorithm::MinDegree),
            _ => Err(Error::Parameter(format!("unknown algorithm {name:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Optimal,
    TimeoutWithBound,
    /// A valid witness without an optimality certificate.
    Heuristic,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Optimal => "optimal",
            Status::TimeoutWithBound => "timeout-with-bound",
            Status::Heuristic => "heuristic",
            Status::Error => "error",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "optimal" => Ok(Status::Optimal),
            "timeout-with-bound" => Ok(Status::TimeoutWithBound),
            "heuristic" => Ok(Status::Heuristic),
            "error" => Ok(Status::Error),
            _ => Err(Error::Parameter(format!("unknown status {s:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub enum InstanceKind {
    Graph(Graph),
    Network(TensorNetwork),
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub id: String,
    pub kind: InstanceKind,
    pub provenance: Value,
}

impl Instance {
    /// Reads a `.gr` graph or a network JSON file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parameter(format!("cannot read {}: {e}", path.display())))?;
        let id = path
            .file_name()
            .and_then(|s| s.to_str())
            .map(|s| s.trim_end_matches(".json").trim_end_matches(".gr").to_string())
            .unwrap_or_default();
        let kind = if path.extension().is_some_and(|e| e == "gr") {
            InstanceKind::Graph(read_gr(&text)?)
        } else {
            InstanceKind::Network(TensorNetwork::from_json(&text)?)
        };
        Ok(Instance {
            id,
            kind,
            provenance: Value::Null,
        })
    }

    pub fn hash(&self) -> String {
        match &self.kind {
            InstanceKind::Graph(g) => g.hash(),
            InstanceKind::Network(n) => n.hash(),
        }
    }

    /// The graph a solver works on: the graph itself, or the line graph of
    /// a network with its wire map.
    pub fn solver_graph(&self) -> Result<(Graph, Option<LineGraphMap>)> {
        match &self.kind {
            InstanceKind::Graph(g) => Ok((g.clone(), None)),
            InstanceKind::Network(n) => {
                let map = line_graph(n)?;
                Ok((map.line_graph.clone(), Some(map)))
            }
        }
    }
}

/// Artifacts backing a reported width.
#[derive(Clone, Debug)]
pub struct Witness {
    /// Decomposition of the solver graph.
    pub td: TreeDecomposition,
    pub eo: EliminationOrdering,
    /// Present for network instances.
    pub sequence: Option<ContractionSequence>,
}

#[derive(Clone, Debug)]
pub struct Solved {
    pub status: Status,
    /// Treewidth for graphs, contraction complexity for networks.
    pub width: Option<usize>,
    pub lower_bound: Option<usize>,
    pub message: Option<String>,
    pub elapsed: Duration,
    pub witness: Option<Witness>,
}

impl Solved {
    fn error(e: impl ToString, start: Instant) -> Self {
        Solved {
            status: Status::Error,
            width: None,
            lower_bound: None,
            message: Some(e.to_string()),
            elapsed: start.elapsed(),
            witness: None,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    pub seed: u64,
    pub timeout: Option<Duration>,
    pub cancel: Option<CancelToken>,
}

/// Runs one solver on one instance. A result that arrives after the
/// timeout is reported as `timeout-with-bound`, its width kept as the bound.
pub fn solve(instance: &Instance, algorithm: &Algorithm, opts: &SolveOptions) -> Solved {
    let start = Instant::now();
    let (graph, map) = match instance.solver_graph() {
        Ok(x) => x,
        Err(e) => return Solved::error(e, start),
    };
    let mut solved = match run_solver(instance, &graph, map.as_ref(), algorithm, opts, start) {
        Ok(s) => s,
        Err(e) => Solved::error(e, start),
    };
    solved.elapsed = start.elapsed();
    let finished = matches!(solved.status, Status::Optimal | Status::Heuristic);
    if finished && opts.timeout.is_some_and(|t| solved.elapsed > t) {
        solved.status = Status::TimeoutWithBound;
    }
    solved
}

fn run_solver(
    instance: &Instance,
    graph: &Graph,
    map: Option<&LineGraphMap>,
    algorithm: &Algorithm,
    opts: &SolveOptions,
    start: Instant,
) -> Result<Solved> {
    let network = match &instance.kind {
        InstanceKind::Network(n) => Some(n),
        InstanceKind::Graph(_) => None,
    };
    let finish = |td: TreeDecomposition, eo: EliminationOrdering, status, lower| -> Result<Solved> {
        let sequence = match (network, map) {
            (Some(n), Some(m)) => Some(crate::contraction::td_to_sequence(n, &td, m)?),
            _ => None,
        };
        let width = match &sequence {
            Some(s) => s.complexity,
            None => td.width(),
        };
        Ok(Solved {
            status,
            width: Some(width),
            lower_bound: lower,
            message: None,
            elapsed: start.elapsed(),
            witness: Some(Witness { td, eo, sequence }),
        })
    };
    match algorithm {
        Algorithm::Exact => {
            let exact = ExactOptions {
                timeout: opts.timeout,
                cancel: opts.cancel.clone(),
                seed: opts.seed,
                ..Default::default()
            };
            if let Some(n) = network {
                let cc = optimal_cc(n, &exact)?;
                let status = if cc.is_optimal() {
                    Status::Optimal
                } else {
                    Status::TimeoutWithBound
                };
                let mut sequence = cc.sequence;
                sequence.optimal = status == Status::Optimal;
                let width = sequence.complexity;
                return Ok(Solved {
                    status,
                    width: Some(width),
                    lower_bound: Some(cc.lower_bound.min(width)),
                    message: None,
                    elapsed: start.elapsed(),
                    witness: Some(Witness {
                        td: cc.treewidth.decomposition,
                        eo: cc.treewidth.ordering,
                        sequence: Some(sequence),
                    }),
                });
            }
            let out = treewidth_exact(graph, &exact)?;
            let status = if out.is_optimal() {
                Status::Optimal
            } else {
                Status::TimeoutWithBound
            };
            let s = out.into_solution();
            finish(s.decomposition, s.ordering, status, Some(s.lower_bound))
        }
        Algorithm::MinFill | Algorithm::MinDegree => {
            let h = if *algorithm == Algorithm::MinFill {
                Heuristic::MinFill
            } else {
                Heuristic::MinDegree
            };
            let eo = heuristic_order(graph, h, opts.seed);
            let td = eo_to_td(graph, &eo)?;
            finish(td, eo, Status::Heuristic, None)
        }
        Algorithm::External(cmd) => match run_external(cmd, graph, opts.timeout)? {
            Some(td) => {
                let report = validate_td(graph, &td);
                if let Some(v) = report.violation {
                    return Err(Error::InvalidDecomposition(format!("external solver: {v}")));
                }
                let eo = crate::decomposition::td_to_eo(graph, &td)?;
                finish(td, eo, Status::Heuristic, None)
            }
            None => {
                let eo = heuristic_order(graph, Heuristic::MinFill, opts.seed);
                let td = eo_to_td(graph, &eo)?;
                let mut s = finish(td, eo, Status::TimeoutWithBound, None)?;
                s.message = Some("external solver timed out; min-fill bound attached".into());
                Ok(s)
            }
        },
    }
}

/// Runs `cmd` through the shell with the graph on stdin. Returns `None`
/// when the timeout expires (the process is killed).
pub fn run_external(cmd: &str, graph: &Graph, timeout: Option<Duration>) -> Result<Option<TreeDecomposition>> {
    let start = Instant::now();
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(cmd)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| Error::Parameter(format!("cannot start solver command: {e}")))?;
    let input = write_gr(graph);
    let mut stdin = child.stdin.take().expect("piped stdin");
    let writer = std::thread::spawn(move || {
        let _ = stdin.write_all(input.as_bytes());
    });
    let mut stdout = child.stdout.take().expect("piped stdout");
    let reader = std::thread::spawn(move || {
        let mut text = String::new();
        let _ = stdout.read_to_string(&mut text);
        text
    });
    loop {
        match child.try_wait() {
            Ok(Some(_)) => break,
            Ok(None) => {}
            Err(e) => return Err(Error::Parameter(format!("solver command failed: {e}"))),
        }
        if timeout.is_some_and(|t| start.elapsed() >= t) {
            let _ = child.kill();
            let _ = child.wait();
            return Ok(None);
        }
        std::thread::sleep(Duration::from_millis(2));
    }
    let _ = writer.join();
    let text = reader.join().unwrap_or_default();
    read_td(&text).map(Some)
}

/// Checks that a witness supports the reported width.
pub fn verify_witness(instance: &Instance, solved: &Solved) -> Result<()> {
    let (graph, _) = instance.solver_graph()?;
    let w = solved
        .witness
        .as_ref()
        .ok_or_else(|| Error::Contract("no witness".into()))?;
    let width = solved.width.ok_or_else(|| Error::Contract("no width".into()))?;
    if let Some(v) = validate_td(&graph, &w.td).violation {
        return Err(Error::InvalidDecomposition(v.to_string()));
    }
    let eo_width = ordering_width(&graph, &w.eo)?;
    match (&instance.kind, &w.sequence) {
        (InstanceKind::Network(n), Some(seq)) => {
            let eval = evaluate_sequence(n, seq)?;
            if !eval.complete || eval.complexity != width || seq.network != n.hash() {
                return Err(Error::Contract("sequence does not certify the width".into()));
            }
            if w.td.width() < width {
                return Err(Error::Contract("decomposition narrower than the sequence".into()));
            }
        }
        (InstanceKind::Graph(_), None) => {
            if w.td.width() != width || eo_width > width {
                return Err(Error::Contract("decomposition does not certify the width".into()));
            }
        }
        _ => return Err(Error::Contract("witness does not match the instance kind".into())),
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub instance: String,
    #[serde(default)]
    pub provenance: Value,
    pub algorithm: String,
    pub seed: u64,
    pub timeout_ms: Option<u64>,
    pub status: Status,
    pub width: Option<usize>,
    pub lower_bound: Option<usize>,
    pub time_ms: f64,
    #[serde(default)]
    pub message: Option<String>,
    #[serde(default)]
    pub artifacts: Vec<String>,
}

impl BenchRecord {
    pub fn new(instance: &Instance, algorithm: &Algorithm, opts: &SolveOptions, solved: &Solved) -> Self {
        BenchRecord {
            instance: instance.id.clone(),
            provenance: instance.provenance.clone(),
            algorithm: algorithm.name().into(),
            seed: opts.seed,
            timeout_ms: opts.timeout.map(|t| t.as_millis() as u64),
            status: solved.status,
            width: solved.width,
            lower_bound: solved.lower_bound,
            time_ms: solved.elapsed.as_secs_f64() * 1e3,
            message: solved.message.clone(),
            artifacts: Vec::new(),
        }
    }

    /// The record with its timing field zeroed, for reproducibility checks.
    pub fn without_timing(&self) -> Self {
        BenchRecord {
            time_ms: 0.0,
            ..self.clone()
        }
    }
}

/// Writes `.td`, ordering and (for networks) sequence files next to each
/// other under `dir`; returns their paths.
pub fn write_artifacts(dir: &Path, stem: &str, instance: &Instance, witness: &Witness) -> Result<Vec<String>> {
    let io = |e: std::io::Error| Error::Parameter(format!("cannot write artifacts: {e}"));
    std::fs::create_dir_all(dir).map_err(io)?;
    let hash = instance.hash();
    let mut paths = Vec::new();
    let td_path = dir.join(format!("{stem}.td"));
    std::fs::write(&td_path, witness.td.to_td_string(&[format!("instance {hash}")])).map_err(io)?;
    paths.push(td_path);
    let eo_path = dir.join(format!("{stem}.eo.json"));
    let eo = OrderingFile {
        instance: hash.clone(),
        order: witness.eo.as_slice().to_vec(),
    };
    std::fs::write(&eo_path, serde_json::to_string(&eo)?).map_err(io)?;
    paths.push(eo_path);
    if let Some(seq) = &witness.sequence {
        let seq_path = dir.join(format!("{stem}.seq.json"));
        std::fs::write(&seq_path, seq.to_json()).map_err(io)?;
        paths.push(seq_path);
    }
    Ok(paths.into_iter().map(|p| p.display().to_string()).collect())
}

/// Elimination ordering file: the solver-graph vertex order plus the hash
/// of the instance it belongs to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderingFile {
    pub instance: String,
    pub order: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub path: String,
    #[serde(default)]
    pub provenance: Value,
}

/// Instance list of a campaign. Paths are relative to the manifest file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    #[serde(default)]
    pub generator: Value,
    pub instances: Vec<ManifestEntry>,
    #[serde(skip)]
    pub base: PathBuf,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parameter(format!("cannot read {}: {e}", path.display())))?;
        let mut m: Manifest = serde_json::from_str(&text)?;
        m.base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(m)
    }

    pub fn load_instance(&self, entry: &ManifestEntry) -> Result<Instance> {
        let mut inst = Instance::load(&self.base.join(&entry.path))?;
        inst.id = entry.id.clone();
        inst.provenance = entry.provenance.clone();
        Ok(inst)
    }
}

#[derive(Clone, Debug)]
pub struct CampaignOptions {
    pub algorithms: Vec<Algorithm>,
    pub seed: u64,
    pub timeout: Option<Duration>,
    pub jobs: usize,
    /// One job at a time regardless of `jobs`.
    pub exclusive: bool,
    /// Artifact directory; nothing is written when absent.
    pub artifacts: Option<PathBuf>,
}

/// Runs every (instance, algorithm) pair. Rows come back in manifest order,
/// algorithms in the given order; failures become `error` rows.
pub fn run_campaign(manifest: &Manifest, opts: &CampaignOptions) -> Vec<BenchRecord> {
    let jobs: Vec<(usize, usize)> = (0..manifest.instances.len())
        .flat_map(|i| (0..opts.algorithms.len()).map(move |a| (i, a)))
        .collect();
    let workers = if opts.exclusive { 1 } else { opts.jobs.max(1) }.min(jobs.len().max(1));
    let next = AtomicUsize::new(0);
    let sink: Mutex<Vec<(usize, BenchRecord)>> = Mutex::new(Vec::with_capacity(jobs.len()));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::SeqCst);
                let Some(&(i, a)) = jobs.get(k) else { break };
                let record = run_job(manifest, &manifest.instances[i], &opts.algorithms[a], opts);
                sink.lock().expect("results sink").push((k, record));
            });
        }
    });
    let mut rows = sink.into_inner().expect("results sink");
    rows.sort_by_key(|r| r.0);
    rows.into_iter().map(|r| r.1).collect()
}

fn run_job(manifest: &Manifest, entry: &ManifestEntry, algorithm: &Algorithm, opts: &CampaignOptions) -> BenchRecord {
    let solve_opts = SolveOptions {
        seed: opts.seed,
        timeout: opts.timeout,
        cancel: None,
    };
    let instance = match manifest.load_instance(entry) {
        Ok(i) => i,
        Err(e) => {
            return BenchRecord {
                instance: entry.id.clone(),
                provenance: entry.provenance.clone(),
                algorithm: algorithm.name().into(),
                seed: opts.seed,
                timeout_ms: opts.timeout.map(|t| t.as_millis() as u64),
                status: Status::Error,
                width: None,
                lower_bound: None,
                time_ms: 0.0,
                message: Some(e.to_string()),
                artifacts: Vec::new(),
            }
        }
    };
    let solved = solve(&instance, algorithm, &solve_opts);
    let mut record = BenchRecord::new(&instance, algorithm, &solve_opts, &solved);
    if let (Some(dir), Some(w)) = (&opts.artifacts, &solved.witness) {
        match write_artifacts(dir, &format!("{}.{}", entry.id, algorithm.name()), &instance, w) {
            Ok(paths) => record.artifacts = paths,
            Err(e) => record.message = Some(e.to_string()),
        }
    }
    record
}

pub const CSV_HEADER: &str = "instance,algorithm,seed,status,width,time_ms";

/// Raw rows with the fixed column order.
pub fn records_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{:.3}",
            r.instance,
            r.algorithm,
            r.seed,
            r.status.as_str(),
            r.width.map(|w| w.to_string()).unwrap_or_default(),
            r.time_ms
        );
    }
    out
}

pub fn records_jsonl(records: &[BenchRecord]) -> String {
    records
        .iter()
        .map(|r| serde_json::to_string(r).expect("record serializes") + "\n")
        .collect()
}

/// One row of the raw CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvRow {
    pub instance: String,
    pub algorithm: String,
    pub seed: u64,
    pub status: Status,
    pub width: Option<usize>,
    pub time_ms: f64,
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(crate::error::parse_err(1, "unexpected CSV header"));
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, line)| {
            let bad = |m: &str| crate::error::parse_err(i + 2, m);
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 6 {
                return Err(bad("expected 6 fields"));
            }
            Ok(CsvRow {
                instance: f[0].into(),
                algorithm: f[1].into(),
                seed: f[2].parse().map_err(|_| bad("bad seed"))?,
                status: Status::parse(f[3]).map_err(|_| bad("bad status"))?,
                width: if f[4].is_empty() {
                    None
                } else {
                    Some(f[4].parse().map_err(|_| bad("bad width"))?)
                },
                time_ms: f[5].parse().map_err(|_| bad("bad time"))?,
            })
        })
        .collect()
}

impl From<&BenchRecord> for CsvRow {
    fn from(r: &BenchRecord) -> Self {
        CsvRow {
            instance: r.instance.clone(),
            algorithm: r.algorithm.clone(),
            seed: r.seed,
            status: r.status,
            width: r.width,
            time_ms: r.time_ms,
        }
    }
}

/// Width statistics per algorithm over rows that finished in time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub algorithm: String,
    pub samples: usize,
    pub mean: f64,
    /// Sample standard deviation.
    pub sd: f64,
    pub min: usize,
    pub median: f64,
    pub max: usize,
    pub timeouts: usize,
    pub errors: usize,
}

/// Timed-out and failed rows are counted but left out of the statistics.
pub fn aggregate(rows: &[CsvRow]) -> Vec<AggregateRow> {
    let mut algorithms: Vec<&str> = Vec::new();
    for r in rows {
        if !algorithms.contains(&r.algorithm.as_str()) {
            algorithms.push(&r.algorithm);
        }
    }
    algorithms
        .into_iter()
        .map(|alg| {
            let mine: Vec<&CsvRow> = rows.iter().filter(|r| r.algorithm == alg).collect();
            let mut widths: Vec<usize> = mine
                .iter()
                .filter(|r| matches!(r.status, Status::Optimal | Status::Heuristic))
                .filter_map(|r| r.width)
                .collect();
            widths.sort_unstable();
            let n = widths.len();
            let mean = if n == 0 {
                0.0
            } else {
                widths.iter().sum::<usize>() as f64 / n as f64
            };
            let sd = if n < 2 {
                0.0
            } else {
                (widths.iter().map(|&w| (w as f64 - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
            };
            let median = match n {
                0 => 0.0,
                _ if n % 2 == 1 => widths[n / 2] as f64,
                _ => (widths[n / 2 - 1] + widths[n / 2]) as f64 / 2.0,
            };
            AggregateRow {
                algorithm: alg.to_string(),
                samples: n,
                mean,
                sd,
                min: widths.first().copied().unwrap_or(0),
                median,
                max: widths.last().copied().unwrap_or(0),
                timeouts: mine.iter().filter(|r| r.status == Status::TimeoutWithBound).count(),
                errors: mine.iter().filter(|r| r.status == Status::Error).count(),
            }
        })
        .collect()
}

pub fn aggregate_csv(rows: &[AggregateRow]) -> String {
    let mut out = String::from("algorithm,samples,mean,sd,min,median,max,timeouts,errors\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{:.3},{:.3},{},{},{},{},{}",
            r.algorithm, r.samples, r.mean, r.sd, r.min, r.median, r.max, r.timeouts, r.errors
        );
    }
    out
}
