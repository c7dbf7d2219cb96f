use std::io::Write as _;
use std::path::Path;
use std::time::{Duration, Instant};

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Value};
use tenseq::bench::{
    aggregate, aggregate_csv, parse_csv, records_csv, records_jsonl, run_campaign, solve as run_solver,
    write_artifacts, Algorithm, BenchRecord, CampaignOptions, Instance, InstanceKind, Manifest, OrderingFile,
    SolveOptions, Status,
};
use tenseq::contraction::{evaluate_sequence, optimal_cc, sequence_to_eo, td_to_sequence, ContractionSequence};
use tenseq::decomposition::{
    eo_to_td, ordering_width, read_comments, read_td, td_to_eo, validate_td, EliminationOrdering, ExactOptions,
    TreeDecomposition,
};
use tenseq::executor::{contract_all_capped, statevector_oracle};
use tenseq::generators::{qaoa_circuit, QaoaOptions};
use tenseq::{Graph, Numeric64};

use crate::{ArtifactKind, BenchArgs, ContractArgs, ConvertArgs, Format, Outcome, SolveArgs};

fn seconds(s: f64) -> Result<Duration> {
    Duration::try_from_secs_f64(s).map_err(|_| anyhow!("timeout must be a non-negative number of seconds"))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn solve(args: SolveArgs) -> Result<Outcome> {
    let instance = Instance::load(&args.instance)?;
    let algorithm = match args.solver_cmd {
        Some(cmd) => Algorithm::External(cmd),
        None => Algorithm::parse(&args.algorithm)?,
    };
    let opts = SolveOptions {
        seed: args.seed,
        timeout: Some(seconds(args.timeout)?),
        cancel: None,
    };
    let solved = run_solver(&instance, &algorithm, &opts);
    let mut record = BenchRecord::new(&instance, &algorithm, &opts, &solved);
    if let Some(dir) = &args.out {
        if let Some(w) = &solved.witness {
            record.artifacts = write_artifacts(dir, &format!("{}.{}", instance.id, algorithm.name()), &instance, w)?;
        }
        let mut file = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(dir.join("results.jsonl"))
            .context("cannot open results.jsonl")?;
        file.write_all(records_jsonl(std::slice::from_ref(&record)).as_bytes())?;
    }
    match args.format {
        Format::Json => println!("{}", serde_json::to_string(&record)?),
        Format::Csv => print!("{}", records_csv(std::slice::from_ref(&record))),
    }
    match record.status {
        Status::Optimal | Status::Heuristic => Ok(Outcome::Done),
        Status::TimeoutWithBound => Ok(Outcome::TimedOut),
        Status::Error => bail!("solver failed: {}", record.message.unwrap_or_default()),
    }
}

enum Artifact {
    Td(TreeDecomposition),
    Eo(EliminationOrdering),
    Sequence(ContractionSequence),
}

fn load_artifact(path: &Path, hash: &str) -> Result<Artifact> {
    let text = read(path)?;
    let refuse = |found: &str| anyhow!("artifact belongs to instance {found}, not {hash}; refusing to convert");
    if path.extension().is_some_and(|e| e == "td") {
        let tag = read_comments(&text)
            .into_iter()
            .find_map(|c| c.strip_prefix("instance ").map(str::to_string))
            .ok_or_else(|| anyhow!("{} carries no instance comment", path.display()))?;
        if tag != hash {
            return Err(refuse(&tag));
        }
        return Ok(Artifact::Td(read_td(&text)?));
    }
    let value: Value = serde_json::from_str(&text).with_context(|| format!("{} is not JSON", path.display()))?;
    if value.get("steps").is_some() {
        let seq: ContractionSequence = serde_json::from_value(value)?;
        if seq.network != hash {
            return Err(refuse(&seq.network));
        }
        Ok(Artifact::Sequence(seq))
    } else {
        let eo: OrderingFile = serde_json::from_value(value)?;
        if eo.instance != hash {
            return Err(refuse(&eo.instance));
        }
        Ok(Artifact::Eo(EliminationOrdering::new(eo.order)?))
    }
}

pub fn convert(args: ConvertArgs) -> Result<Outcome> {
    let instance = Instance::load(&args.instance)?;
    let hash = instance.hash();
    let (graph, map) = instance.solver_graph()?;
    let source = load_artifact(&args.artifact, &hash)?;
    let network = match &instance.kind {
        InstanceKind::Network(n) => Some(n),
        InstanceKind::Graph(_) => None,
    };
    let need_network = || {
        network
            .zip(map.as_ref())
            .ok_or_else(|| anyhow!("contraction sequences need a network instance"))
    };
    let td_of = |a: &Artifact| -> Result<TreeDecomposition> {
        Ok(match a {
            Artifact::Td(td) => td.clone(),
            Artifact::Eo(eo) => eo_to_td(&graph, eo)?,
            Artifact::Sequence(seq) => {
                let (n, m) = need_network()?;
                eo_to_td(&graph, &sequence_to_eo(n, seq, m)?)?
            }
        })
    };
    let source_width = match &source {
        Artifact::Td(td) => {
            if let Some(v) = validate_td(&graph, td).violation {
                bail!("source decomposition is invalid: {v}");
            }
            td.width()
        }
        Artifact::Eo(eo) => ordering_width(&graph, eo)?,
        Artifact::Sequence(seq) => evaluate_sequence(need_network()?.0, seq)?.complexity,
    };
    let (text, width) = match args.to {
        ArtifactKind::Td => {
            let td = td_of(&source)?;
            (td.to_td_string(&[format!("instance {hash}")]), td.width())
        }
        ArtifactKind::Eo => {
            let eo = match &source {
                Artifact::Eo(eo) => eo.clone(),
                Artifact::Sequence(seq) => {
                    let (n, m) = need_network()?;
                    sequence_to_eo(n, seq, m)?
                }
                Artifact::Td(td) => td_to_eo(&graph, td)?,
            };
            let width = ordering_width(&graph, &eo)?;
            let file = OrderingFile {
                instance: hash.clone(),
                order: eo.into_vec(),
            };
            (serde_json::to_string(&file)?, width)
        }
        ArtifactKind::Sequence => {
            let (n, m) = need_network()?;
            let seq = match &source {
                Artifact::Sequence(seq) => seq.clone(),
                other => td_to_sequence(n, &td_of(other)?, m)?,
            };
            (seq.to_json(), seq.complexity)
        }
    };
    match &args.out {
        Some(path) => std::fs::write(path, &text).with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{text}"),
    }
    eprintln!("width {source_width} -> {width}");
    Ok(Outcome::Done)
}

/// Circuit description embedded by `generate qaoa`.
fn embedded_circuit(doc: &Value) -> Result<(Graph, QaoaOptions)> {
    let q = doc
        .get("qaoa")
        .ok_or_else(|| anyhow!("--oracle needs a network generated by `generate qaoa`"))?;
    let n = q["n"].as_u64().ok_or_else(|| anyhow!("qaoa.n missing"))? as usize;
    let edges: Vec<(usize, usize)> = serde_json::from_value(q["edges"].clone())?;
    let opts: QaoaOptions = serde_json::from_value(q["options"].clone())?;
    Ok((Graph::from_edges(n, edges)?, opts))
}

pub fn contract(args: ContractArgs) -> Result<Outcome> {
    let start = Instant::now();
    let text = read(&args.network)?;
    let numeric = Numeric64::from_json(&text)?;
    let net = numeric.network();
    let mut report = serde_json::Map::new();
    let mut timed_out = false;
    let seq = match &args.sequence {
        Some(path) => {
            let seq = ContractionSequence::from_json(&read(path)?)?;
            if seq.network != net.hash() {
                bail!("sequence belongs to network {}, not {}", seq.network, net.hash());
            }
            seq
        }
        None => {
            let opts = ExactOptions {
                timeout: Some(seconds(args.timeout)?),
                seed: args.seed,
                ..Default::default()
            };
            let solve_start = Instant::now();
            let cc = optimal_cc(net, &opts)?;
            report.insert("solve_seconds".into(), json!(solve_start.elapsed().as_secs_f64()));
            report.insert("optimal".into(), json!(cc.is_optimal()));
            timed_out = !cc.is_optimal();
            cc.sequence
        }
    };
    let complexity = evaluate_sequence(net, &seq)?.complexity;
    let (amp, trace) = contract_all_capped(&numeric, &seq, args.max_entries)?;
    report.insert("network".into(), json!(net.hash()));
    report.insert("amplitude".into(), json!([amp.re, amp.im]));
    report.insert("complexity".into(), json!(complexity));
    report.insert("max_rank".into(), json!(trace.max_rank));
    report.insert("max_degree".into(), json!(trace.max_degree));
    report.insert("total_madds".into(), json!(trace.total_madds));
    report.insert("contract_seconds".into(), json!(trace.wall_time.as_secs_f64()));
    if args.oracle {
        let doc: Value = serde_json::from_str(&text)?;
        let (g, opts) = embedded_circuit(&doc)?;
        let expected = statevector_oracle(&qaoa_circuit(&g, &opts)?)?;
        report.insert(
            "oracle".into(),
            json!({"amplitude": [expected.re, expected.im], "diff": (amp - expected).norm()}),
        );
    }
    report.insert("total_seconds".into(), json!(start.elapsed().as_secs_f64()));
    report.insert("steps".into(), serde_json::to_value(&trace.steps)?);
    let out = serde_json::to_string_pretty(&Value::Object(report))?;
    match &args.out {
        Some(path) => std::fs::write(path, &out).with_context(|| format!("cannot write {}", path.display()))?,
        None => println!("{out}"),
    }
    Ok(if timed_out { Outcome::TimedOut } else { Outcome::Done })
}

pub fn bench(args: BenchArgs) -> Result<Outcome> {
    let manifest = Manifest::load(&args.manifest)?;
    let mut algorithms = args
        .algorithms
        .iter()
        .filter(|a| !a.is_empty())
        .map(|a| Algorithm::parse(a))
        .collect::<tenseq::Result<Vec<_>>>()?;
    if let Some(cmd) = args.solver_cmd {
        algorithms.push(Algorithm::External(cmd));
    }
    if algorithms.is_empty() {
        bail!("no algorithms selected");
    }
    let out = &args.out;
    std::fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let opts = CampaignOptions {
        algorithms,
        seed: args.seed,
        timeout: Some(seconds(args.timeout)?),
        jobs: args.jobs,
        exclusive: args.exclusive,
        artifacts: Some(out.join("artifacts")),
    };
    let records = run_campaign(&manifest, &opts);
    let raw = records_csv(&records);
    let agg = aggregate(&parse_csv(&raw)?);
    let mut jsonl = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(out.join("results.jsonl"))
        .context("cannot open results.jsonl")?;
    jsonl.write_all(records_jsonl(&records).as_bytes())?;
    std::fs::write(out.join("results.csv"), &raw)?;
    std::fs::write(out.join("aggregate.csv"), aggregate_csv(&agg))?;
    std::fs::write(out.join("aggregate.json"), serde_json::to_string_pretty(&agg)?)?;
    match args.format {
        Format::Csv => print!("{}", aggregate_csv(&agg)),
        Format::Json => println!("{}", serde_json::to_string_pretty(&agg)?),
    }
    Ok(Outcome::Done)
}
