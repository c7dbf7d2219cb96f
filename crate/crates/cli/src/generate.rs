use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand};
use serde_json::{json, Value};
use tenseq::bench::{Manifest, ManifestEntry};
use tenseq::generators::{mera_corpus, qaoa_maxcut_network, qaoa_numeric_network, QaoaOptions};
use tenseq::graph::{random_regular, read_gr, write_gr};
use tenseq::Graph;

use crate::Outcome;

#[derive(Args)]
pub struct GenerateArgs {
    #[command(subcommand)]
    kind: Kind,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Base seed; instance i uses seed + i.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Kind {
    /// Random connected r-regular graphs as `.gr` files.
    Regular {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// QAOA MaxCut networks from a graph file or from random regular graphs.
    Qaoa {
        #[arg(long, conflicts_with_all = ["r", "n"])]
        from: Option<PathBuf>,
        #[arg(long, requires = "n")]
        r: Option<usize>,
        #[arg(long, requires = "r")]
        n: Option<usize>,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        rounds: usize,
        /// Attach tensor entries.
        #[arg(long)]
        numeric: bool,
        #[arg(long, default_value_t = 0.4)]
        gamma: f64,
        #[arg(long, default_value_t = 0.3)]
        beta: f64,
        /// Cost gate as CNOT, Rz, CNOT.
        #[arg(long)]
        decomposed: bool,
    },
    /// Reduced MERA causal-cone networks for every operator placement.
    Mera {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        d: u8,
        #[arg(long)]
        levels: usize,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        ops: u8,
    },
}

pub fn run(args: GenerateArgs) -> Result<Outcome> {
    std::fs::create_dir_all(&args.out).with_context(|| format!("cannot create {}", args.out.display()))?;
    let mut extra = serde_json::Map::new();
    let (generator, instances) = match args.kind {
        Kind::Regular { r, n, count } => {
            let mut list = Vec::new();
            for i in 0..count {
                let seed = args.seed.wrapping_add(i as u64);
                let g = random_regular(r, n, seed)?;
                let id = format!("regular_r{r}_n{n}_s{seed}");
                let path = format!("{id}.gr");
                write(&args.out.join(&path), &write_gr(&g))?;
                let provenance = json!({"generator": "regular", "r": r, "n": n, "seed": seed});
                list.push(ManifestEntry { id, path, provenance });
            }
            (
                json!({"kind": "regular", "r": r, "n": n, "count": count, "seed": args.seed}),
                list,
            )
        }
        Kind::Qaoa {
            from,
            r,
            n,
            count,
            rounds,
            numeric,
            gamma,
            beta,
            decomposed,
        } => {
            let opts = QaoaOptions {
                rounds,
                gammas: vec![gamma],
                betas: vec![beta],
                decomposed,
                terminal: Vec::new(),
            };
            let graphs: Vec<(String, Graph, Value)> = match (from, r, n) {
                (Some(path), _, _) => {
                    let text =
                        std::fs::read_to_string(&path).with_context(|| format!("cannot read {}", path.display()))?;
                    let g = read_gr(&text)?;
                    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("graph").to_string();
                    let prov = json!({"source": path.display().to_string(), "graph": g.hash()});
                    vec![(format!("qaoa_{stem}"), g, prov)]
                }
                (None, Some(r), Some(n)) => (0..count)
                    .map(|i| {
                        let seed = args.seed.wrapping_add(i as u64);
                        let g = random_regular(r, n, seed)?;
                        Ok((
                            format!("qaoa_r{r}_n{n}_p{rounds}_s{seed}"),
                            g,
                            json!({"r": r, "n": n, "seed": seed}),
                        ))
                    })
                    .collect::<Result<_>>()?,
                _ => bail!("qaoa needs --from <graph> or both --r and --n"),
            };
            let mut list = Vec::new();
            for (id, g, mut prov) in graphs {
                let mut doc = if numeric {
                    qaoa_numeric_network(&g, &opts)?.to_json_value()
                } else if decomposed {
                    tenseq::generators::qaoa_circuit(&g, &opts)?
                        .to_network()?
                        .network()
                        .to_json_value()
                } else {
                    qaoa_maxcut_network(&g, rounds)?.to_json_value()
                };
                doc["qaoa"] = json!({
                    "n": g.n(),
                    "edges": g.edges().collect::<Vec<_>>(),
                    "options": opts,
                });
                let path = format!("{id}.json");
                write(&args.out.join(&path), &serde_json::to_string_pretty(&doc)?)?;
                prov["generator"] = json!("qaoa");
                prov["rounds"] = json!(rounds);
                prov["numeric"] = json!(numeric);
                list.push(ManifestEntry {
                    id,
                    path,
                    provenance: prov,
                });
            }
            (json!({"kind": "qaoa", "options": opts, "seed": args.seed}), list)
        }
        Kind::Mera { d, levels, ops } => {
            let (d, ops) = (d as usize, ops as usize);
            let (corpus, summary) = mera_corpus(d, 1 << d, ops, levels)?;
            let mut list = Vec::new();
            for (i, inst) in corpus.iter().enumerate() {
                let sites: Vec<String> = inst
                    .spec
                    .operators
                    .iter()
                    .map(|c| c.iter().map(usize::to_string).collect::<Vec<_>>().join("."))
                    .collect();
                let id = format!("mera_d{d}_l{levels}_o{ops}_{}", sites.join("_"));
                let path = format!("{id}.json");
                write(&args.out.join(&path), &inst.network.to_json())?;
                let provenance = json!({
                    "generator": "mera",
                    "spec": inst.spec,
                    "class": corpus[inst.class_of].spec.operators,
                    "index": i,
                });
                list.push(ManifestEntry { id, path, provenance });
            }
            extra.insert("summary".into(), serde_json::to_value(&summary)?);
            write(&args.out.join("summary.json"), &summary.to_json())?;
            (json!({"kind": "mera", "d": d, "levels": levels, "ops": ops}), list)
        }
    };
    let manifest = Manifest {
        generator,
        instances,
        base: PathBuf::new(),
    };
    let mut doc = serde_json::to_value(&manifest)?;
    if let Value::Object(map) = &mut doc {
        map.extend(extra);
    }
    write(&args.out.join("manifest.json"), &serde_json::to_string_pretty(&doc)?)?;
    let mut brief = json!({
        "manifest": args.out.join("manifest.json").display().to_string(),
        "instances": manifest.instances.len(),
    });
    if let Some(summary) = doc.get("summary") {
        brief["summary"] = summary.clone();
    }
    println!("{brief}");
    Ok(Outcome::Done)
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}
