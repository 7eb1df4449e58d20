//! Argument parsing and subcommand dispatch.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use invmon::blocks::{block_action_with, disjointness_report, verify_cover_laws};
use invmon::gimage::{
    flag_trivial_nonloop_edges, roi_scan, validate_hom, FiniteGroupTable, HomSpec, RoiReport,
};
use invmon::green::{ClassificationResult, Classifier};
use invmon::igraph::{canonical_form, export_dot, export_json};
use invmon::stephen::{equal_in_approximations, idempotent_in, ExpansionLimits, Verdict};
use invmon::synth::{finite_subgroup_word, omega_graph_with, synthesize, verify_synthesis_with};
use invmon::{Presentation, Word};
use serde_json::{json, Value};

use crate::cache::{approximate_cached, ApproxCache};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "invmon",
    version,
    about = "Schützenberger graphs and maximal subgroups of special inverse monoids"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Number of expansion rounds.
    #[arg(long, global = true, default_value_t = 3)]
    pub rounds: usize,
    /// Abort when an approximation exceeds this many vertices.
    #[arg(long, global = true, default_value_t = 5_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub vertex_cap: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Write a DOT rendering here.
    #[arg(long, global = true)]
    pub dot: Option<PathBuf>,
    /// Cache approximations in this directory.
    #[arg(long, global = true, env = "INVMON_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Approximate a Schützenberger graph and export it.
    Sgraph {
        #[arg(long)]
        pres: PathBuf,
        #[arg(long, default_value = "")]
        word: String,
    },
    /// Green's-class verdicts for a word against the graph of right units.
    Classify {
        #[arg(long)]
        pres: PathBuf,
        #[arg(long)]
        word: String,
    },
    /// Certify that two words are equal.
    Equal {
        #[arg(long)]
        pres: PathBuf,
        #[arg(long)]
        word: String,
        #[arg(long)]
        other: String,
    },
    /// Certify that a word is idempotent.
    Idempotent {
        #[arg(long)]
        pres: PathBuf,
        #[arg(long)]
        word: String,
    },
    /// Scan right units for a collision under a group hom.
    Roi {
        #[arg(long)]
        pres: PathBuf,
        #[arg(long)]
        hom: PathBuf,
    },
    /// Block cover of a Schützenberger graph and its symmetry.
    Blocks {
        #[arg(long)]
        pres: PathBuf,
        #[arg(long)]
        word: String,
    },
    /// Build and check a presentation with prescribed maximal subgroup.
    Synth {
        /// Group table JSON, or `cyclic:N` / `symmetric:N`.
        #[arg(long)]
        group: String,
        /// Write the synthesized presentation here.
        #[arg(long)]
        pres_out: Option<PathBuf>,
        /// Write the maximal group image hom here.
        #[arg(long)]
        hom_out: Option<PathBuf>,
    },
    /// Word whose maximal subgroup is a given finite group of units.
    SubgroupWord {
        #[arg(long)]
        pres: PathBuf,
        /// A unit; repeat for each element, `""` for the identity.
        #[arg(long = "unit", required = true)]
        units: Vec<String>,
        /// Generator that is neither a left nor a right unit.
        #[arg(long)]
        generator: String,
    },
}

/// How the report should be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// The report's answer is an uncertified negative.
    Unknown,
    /// A check the command exists to perform did not pass.
    Failed,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Failed => 1,
            Status::Unknown => 2,
        }
    }
}

pub struct Outcome {
    pub report: Value,
    pub dot: Option<String>,
    pub files: Vec<(PathBuf, String)>,
    pub status: Status,
}

fn read_presentation(path: &Path) -> Result<Presentation> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Presentation::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn parse_word(p: &Presentation, text: &str) -> Result<Word> {
    p.parse_word(text).with_context(|| format!("word {text:?}"))
}

fn read_group(spec: &str) -> Result<FiniteGroupTable> {
    let sized = |prefix: &str| spec.strip_prefix(prefix).map(str::parse::<usize>);
    if let Some(n) = sized("cyclic:") {
        let n = n.context("cyclic group order")?;
        anyhow::ensure!(n >= 1, "cyclic group order must be positive");
        return Ok(FiniteGroupTable::cyclic(n));
    }
    if let Some(n) = sized("symmetric:") {
        let n = n.context("symmetric group degree")?;
        anyhow::ensure!((1..=5).contains(&n), "symmetric group degree must be 1..=5");
        return Ok(FiniteGroupTable::symmetric(n));
    }
    let text = fs::read_to_string(spec).with_context(|| format!("reading {spec}"))?;
    serde_json::from_str(&text).with_context(|| format!("parsing group table {spec}"))
}

fn header(command: &str, rounds: usize) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    m.insert("command".into(), json!(command));
    m.insert("rounds".into(), json!(rounds));
    m
}

fn verdict_status(v: Verdict) -> Status {
    match v {
        Verdict::Yes => Status::Ok,
        Verdict::Unknown => Status::Unknown,
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let c = &cli.common;
    let limits = ExpansionLimits {
        vertex_cap: usize::try_from(c.vertex_cap).unwrap_or(usize::MAX),
    };
    let cache = c.cache_dir.as_ref().map(ApproxCache::new);
    let cache = cache.as_ref();
    let k = c.rounds;
    match &cli.command {
        Command::Sgraph { pres, word } => {
            let p = read_presentation(pres)?;
            let w = parse_word(&p, word)?;
            let (a, _) = approximate_cached(cache, &p, &w, k, limits)?;
            let g = &a.graph;
            let mut r = header("sgraph", k);
            r.insert("presentation".into(), json!(p.to_string()));
            r.insert("word".into(), json!(w.to_string()));
            r.insert("vertices".into(), json!(g.vertex_count()));
            r.insert("edges".into(), json!(g.edge_count()));
            r.insert(
                "canonical_form".into(),
                json!(
                    String::from_utf8(canonical_form(g, g.root())).expect("canonical form is text")
                ),
            );
            r.insert("graph".into(), serde_json::from_str(&export_json(g))?);
            Ok(Outcome {
                report: Value::Object(r),
                dot: Some(export_dot(g)),
                files: vec![],
                status: Status::Ok,
            })
        }
        Command::Classify { pres, word } => {
            let p = read_presentation(pres)?;
            let w = parse_word(&p, word)?;
            let (a, _) = approximate_cached(cache, &p, &Word::empty(), k, limits)?;
            let classifier = Classifier::from_approximation(a);
            let results: Vec<ClassificationResult> = vec![
                classifier.is_right_unit(&w)?,
                classifier.is_left_unit(&w)?,
                classifier.is_unit(&w)?,
                classifier.in_d1(&w)?,
                classifier.in_j1(&w)?,
            ];
            let mut r = header("classify", k);
            r.insert("presentation".into(), json!(p.to_string()));
            r.insert("word".into(), json!(w.to_string()));
            r.insert("classes".into(), serde_json::to_value(&results)?);
            if let [s] = w.symbols() {
                r.insert(
                    "dichotomy".into(),
                    serde_json::to_value(classifier.generator_dichotomy(&s.letter)?)?,
                );
            }
            let status = if results.iter().any(ClassificationResult::is_yes) {
                Status::Ok
            } else {
                Status::Unknown
            };
            Ok(Outcome {
                report: Value::Object(r),
                dot: None,
                files: vec![],
                status,
            })
        }
        Command::Equal { pres, word, other } => {
            let p = read_presentation(pres)?;
            let (u, v) = (parse_word(&p, word)?, parse_word(&p, other)?);
            let (au, _) = approximate_cached(cache, &p, &u, k, limits)?;
            let (av, _) = approximate_cached(cache, &p, &v, k, limits)?;
            let cert = equal_in_approximations(&au, &av);
            let mut r = header("equal", k);
            r.insert("presentation".into(), json!(p.to_string()));
            r.insert("word".into(), json!(u.to_string()));
            r.insert("other".into(), json!(v.to_string()));
            r.insert("certificate".into(), serde_json::to_value(&cert)?);
            Ok(Outcome {
                report: Value::Object(r),
                dot: None,
                files: vec![],
                status: verdict_status(cert.verdict),
            })
        }
        Command::Idempotent { pres, word } => {
            let p = read_presentation(pres)?;
            let w = parse_word(&p, word)?;
            let (a, _) = approximate_cached(cache, &p, &w, k, limits)?;
            let cert = idempotent_in(&a);
            let mut r = header("idempotent", k);
            r.insert("presentation".into(), json!(p.to_string()));
            r.insert("word".into(), json!(w.to_string()));
            r.insert("certificate".into(), serde_json::to_value(&cert)?);
            Ok(Outcome {
                report: Value::Object(r),
                dot: Some(export_dot(&a.graph)),
                files: vec![],
                status: verdict_status(cert.verdict),
            })
        }
        Command::Roi { pres, hom } => {
            let p = read_presentation(pres)?;
            let text =
                fs::read_to_string(hom).with_context(|| format!("reading {}", hom.display()))?;
            let spec: HomSpec = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", hom.display()))?;
            let h = spec.build()?;
            validate_hom(&p, &h)?;
            let (a, _) = approximate_cached(cache, &p, &Word::empty(), k, limits)?;
            let report = roi_scan(&a.graph, &h, k)?;
            let flagged = flag_trivial_nonloop_edges(&p, &h, &a.graph)?;
            let mut r = header("roi", k);
            r.insert("presentation".into(), json!(p.to_string()));
            r.insert("hom".into(), serde_json::to_value(&spec)?);
            r.insert("result".into(), serde_json::to_value(&report)?);
            r.insert("flagged_edges".into(), serde_json::to_value(&flagged)?);
            let status = match report {
                RoiReport::InjectiveUpTo { .. } => Status::Ok,
                RoiReport::CandidateWitness { .. } => Status::Unknown,
            };
            Ok(Outcome {
                report: Value::Object(r),
                dot: Some(export_dot(&a.graph)),
                files: vec![],
                status,
            })
        }
        Command::Blocks { pres, word } => {
            let p = read_presentation(pres)?;
            let w = parse_word(&p, word)?;
            let (cover, action) = block_action_with(&p, &w, k, limits)?;
            let laws = verify_cover_laws(&cover);
            let disjoint = disjointness_report(&cover, action.order);
            let mut r = header("blocks", k);
            r.insert("presentation".into(), json!(p.to_string()));
            r.insert("word".into(), json!(w.to_string()));
            r.insert("vertices".into(), json!(cover.graph.vertex_count()));
            r.insert("block_count".into(), json!(cover.blocks.len()));
            r.insert("cover".into(), cover.to_json());
            r.insert("collapsed".into(), serde_json::to_value(&cover.collapsed)?);
            r.insert("laws".into(), serde_json::to_value(&laws)?);
            r.insert("laws_hold".into(), json!(laws.holds()));
            r.insert("action".into(), serde_json::to_value(&action)?);
            r.insert("disjointness".into(), serde_json::to_value(&disjoint)?);
            Ok(Outcome {
                report: Value::Object(r),
                dot: Some(cover.to_dot()),
                files: vec![],
                status: Status::Ok,
            })
        }
        Command::Synth {
            group,
            pres_out,
            hom_out,
        } => {
            let table = read_group(group)?;
            let s = synthesize(&table)?;
            let report = verify_synthesis_with(&s, &s.presentation, k)?;
            let mut files = Vec::new();
            if let Some(path) = pres_out {
                files.push((path.clone(), format!("{}\n", s.presentation)));
            }
            if let Some(path) = hom_out {
                files.push((
                    path.clone(),
                    serde_json::to_string_pretty(&HomSpec::from_hom(&s.hom))? + "\n",
                ));
            }
            let dot = match &cli.common.dot {
                Some(_) => Some(export_dot(&omega_graph_with(&s, k, limits)?)),
                None => None,
            };
            let mut r = header("synth", k);
            r.insert("group_elements".into(), json!(table.names()));
            r.insert("presentation".into(), json!(s.presentation.to_string()));
            r.insert("witness_word".into(), json!(s.witness_word().to_string()));
            r.insert("checks".into(), serde_json::to_value(&report)?);
            r.insert("passed".into(), json!(report.passed()));
            Ok(Outcome {
                report: Value::Object(r),
                dot,
                files,
                status: if report.passed() {
                    Status::Ok
                } else {
                    Status::Failed
                },
            })
        }
        Command::SubgroupWord {
            pres,
            units,
            generator,
        } => {
            let p = read_presentation(pres)?;
            let units = units
                .iter()
                .map(|u| parse_word(&p, u))
                .collect::<Result<Vec<_>>>()?;
            let Some(v) = p.generator(generator).cloned() else {
                bail!("{generator:?} is not a generator of {p}");
            };
            let (word, report) = finite_subgroup_word(&p, &units, &v, k)?;
            let mut r = header("subgroup-word", k);
            r.insert("presentation".into(), json!(p.to_string()));
            r.insert("report".into(), serde_json::to_value(&report)?);
            let dot = match &cli.common.dot {
                Some(_) => Some(export_dot(
                    &approximate_cached(cache, &p, &word, k, limits)?.0.graph,
                )),
                None => None,
            };
            Ok(Outcome {
                report: Value::Object(r),
                dot,
                files: vec![],
                status: Status::Ok,
            })
        }
    }
}

/// Renders the report as pretty JSON with a trailing newline.
pub fn render(report: &Value) -> String {
    serde_json::to_string_pretty(report).expect("report serializes") + "\n"
}
