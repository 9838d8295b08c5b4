use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use anyhow::{bail, Context, Result};
use qgeval_core::corpus::{read_items, read_jsonl, EvalItem};
use qgeval_core::human::simulate::{simulate_run, SimulationConfig};
use qgeval_core::human::{
    analyze, build_hit, correlate_metrics, donor_tokens, matrix_overlap, AnalysisConfig, CorrelationReport, Hit,
    RatingRecord, ScoreTable, SignificanceMatrix, SystemScoreTable,
};
use qgeval_core::metrics::{metric_suite, AnswerabilityConfig, SynonymTable, SUITE_METRICS};
use qgeval_core::qascore::{qascore_corpus, BridgeModel, MaskedLanguageModel, MockMlm, MockMode};
use qgeval_core::rng::derive;
use qgeval_core::stats::{wilcoxon_rank_sum, wilcoxon_signed_rank, williams_test, PairedSample};
use serde::Serialize;

use crate::output::{num, write_csv, write_json, write_text};
use crate::{Cli, Command, Global, HitsCommand, MockModeArg, ModelKind, TestCommand};

/// An analysis that ran but produced nothing to report.
#[derive(Debug)]
pub struct Degenerate(pub String);

impl fmt::Display for Degenerate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Degenerate {}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).with_context(|| format!("cannot open {}", path.display()))?))
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn run(cli: &Cli) -> Result<()> {
    let g = &cli.global;
    match &cli.command {
        Command::Metrics {
            input,
            answerability_config,
            synonyms,
        } => metrics(g, input, answerability_config.as_deref(), synonyms.as_deref()),
        Command::Qascore { input, mock_mode } => qascore(g, input, *mock_mode),
        Command::Hits {
            command: HitsCommand::Build { input },
        } => hits_build(g, input),
        Command::Analyze {
            ratings,
            metrics,
            deviation,
        } => analyze_cmd(g, ratings, metrics.as_deref(), (*deviation).into()),
        Command::Overlap { a, b } => overlap(a, b),
        Command::Correlate {
            table,
            report,
            human_column,
        } => correlate(g, table, report.as_deref(), human_column),
        Command::Simulate { run, hits } => simulate(g, run, *hits),
        Command::Test { command } => stat_test(command),
    }
}

fn metrics(g: &Global, input: &Path, config: Option<&Path>, synonyms: Option<&Path>) -> Result<()> {
    let items = read_items(open(input)?).with_context(|| format!("reading {}", input.display()))?;
    let config = match config {
        Some(p) => AnswerabilityConfig::load(p)?,
        None => AnswerabilityConfig::default(),
    };
    let synonyms = synonyms.map(SynonymTable::load).transpose()?;
    let mut header = vec!["id".to_string(), "system".to_string()];
    header.extend(SUITE_METRICS.iter().map(|m| m.to_string()));

    let mut rows = Vec::new();
    let mut by_system: BTreeMap<&str, Vec<Vec<f64>>> = BTreeMap::new();
    let mut skipped = 0usize;
    for it in &items {
        let Some(reference) = &it.reference else {
            skipped += 1;
            continue;
        };
        let scores = metric_suite(&it.question, reference, &config, synonyms.as_ref())
            .with_context(|| format!("item `{}`", it.id))?;
        let values: Vec<f64> = scores.iter().map(|s| s.value).collect();
        let mut row = vec![it.id.clone(), it.system.clone()];
        row.extend(values.iter().map(|v| num(*v)));
        rows.push(row);
        by_system.entry(&it.system).or_default().push(values);
    }
    if skipped > 0 {
        log::warn!("{skipped} items without a reference skipped");
    }
    let mut sys_header = vec!["system".to_string(), "n".to_string()];
    sys_header.extend(SUITE_METRICS.iter().map(|m| m.to_string()));
    let sys_rows: Vec<Vec<String>> = by_system
        .iter()
        .map(|(s, vs)| {
            let mut row = vec![s.to_string(), vs.len().to_string()];
            for k in 0..SUITE_METRICS.len() {
                row.push(num(vs.iter().map(|v| v[k]).sum::<f64>() / vs.len() as f64));
            }
            row
        })
        .collect();
    write_csv(&g.out, "metrics_items.csv", &header, &rows)?;
    write_csv(&g.out, "metrics_systems.csv", &sys_header, &sys_rows)?;
    println!("scored {} items ({skipped} skipped), {} systems", rows.len(), sys_rows.len());
    Ok(())
}

fn model_for(g: &Global, items: &[EvalItem], mode: MockModeArg) -> Result<Box<dyn MaskedLanguageModel>> {
    Ok(match g.model {
        ModelKind::Mock => {
            let mode = match mode {
                MockModeArg::Uniform => MockMode::Uniform,
                MockModeArg::Seeded => MockMode::Seeded { scale: 2.0 },
                MockModeArg::Cooccurrence => MockMode::Cooccurrence {
                    window: 3,
                    boost: 2.0,
                    noise: 1.0,
                },
            };
            Box::new(MockMlm::from_items(items, g.seed, mode))
        }
        ModelKind::Bridge => {
            let Some(addr) = &g.bridge_addr else {
                bail!("--model bridge needs --bridge-addr or QGEVAL_BRIDGE_ADDR");
            };
            Box::new(BridgeModel::connect(addr)?)
        }
    })
}

fn qascore(g: &Global, input: &Path, mode: MockModeArg) -> Result<()> {
    let items = read_items(open(input)?).with_context(|| format!("reading {}", input.display()))?;
    let header = ["id", "system", "words", "total", "per_word_mean"].map(String::from);
    let sys_header = ["system", "n", "QAScore"].map(String::from);
    if items.is_empty() {
        write_csv(&g.out, "qascore_items.csv", &header, &[])?;
        write_csv(&g.out, "qascore_systems.csv", &sys_header, &[])?;
        println!("scored 0 items");
        return Ok(());
    }
    let model = model_for(g, &items, mode)?;
    let (scored, systems) = qascore_corpus(&items, model.as_ref(), g.aggregation.into())?;
    let rows: Vec<Vec<String>> = items
        .iter()
        .zip(&scored)
        .map(|(it, r)| {
            vec![it.id.clone(), it.system.clone(), r.word_count.to_string(), num(r.total), num(r.per_word_mean)]
        })
        .collect();
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for it in &items {
        *counts.entry(&it.system).or_default() += 1;
    }
    let sys_rows: Vec<Vec<String>> = systems
        .iter()
        .map(|(s, v)| vec![s.clone(), counts[s.as_str()].to_string(), num(*v)])
        .collect();
    write_csv(&g.out, "qascore_items.csv", &header, &rows)?;
    write_csv(&g.out, "qascore_systems.csv", &sys_header, &sys_rows)?;
    println!("scored {} items with the {} model, {} systems", rows.len(), model.name(), sys_rows.len());
    Ok(())
}

fn hits_build(g: &Global, input: &Path) -> Result<()> {
    let items = read_items(open(input)?).with_context(|| format!("reading {}", input.display()))?;
    // (passage, answer) groups in order of first appearance
    let mut groups: Vec<((String, String), BTreeMap<String, String>)> = Vec::new();
    for it in &items {
        let key = (it.passage.clone(), it.answer.clone());
        let pos = match groups.iter().position(|(k, _)| *k == key) {
            Some(p) => p,
            None => {
                groups.push((key, BTreeMap::new()));
                groups.len() - 1
            }
        };
        if groups[pos].1.insert(it.system.clone(), it.question.clone()).is_some() {
            bail!("system `{}` has two questions for the passage of item `{}`", it.system, it.id);
        }
    }
    let donors: Vec<_> = groups.iter().map(|((p, _), _)| donor_tokens(p)).collect();
    let mut lines = String::new();
    for (k, ((passage, answer), questions)) in groups.iter().enumerate() {
        let hit_id = format!("hit-{k:04}");
        for (s, q) in questions {
            let n = q.split_whitespace().count();
            if (21..25).contains(&n) {
                log::warn!("{hit_id}/{s}: {n}-word question gets a shorter replacement span than 16-20 word questions");
            }
        }
        let mut rng = derive(g.seed, &format!("hits/{hit_id}"));
        let hit: Hit = build_hit(&hit_id, passage, answer, questions, &donors, k, &mut rng)
            .with_context(|| format!("building {hit_id}"))?;
        lines.push_str(&serde_json::to_string(&hit)?);
        lines.push('\n');
    }
    write_text(&g.out, "hits.jsonl", &lines)?;
    println!("built {} HITs", groups.len());
    Ok(())
}

#[derive(Serialize)]
struct Report<'a> {
    alpha: f64,
    sig_threshold: f64,
    #[serde(flatten)]
    analysis: &'a qgeval_core::human::Analysis,
    #[serde(skip_serializing_if = "Option::is_none")]
    correlation: Option<CorrelationReport>,
}

fn metric_columns(table: &ScoreTable, skip: Option<&str>) -> Vec<(String, BTreeMap<String, f64>)> {
    table
        .columns
        .iter()
        .filter(|c| Some(c.as_str()) != skip && c.as_str() != "n")
        .filter_map(|c| table.column(c).map(|v| (c.clone(), v)))
        .collect()
}

fn analyze_cmd(g: &Global, ratings: &Path, metrics: Option<&Path>, deviation: qgeval_core::human::Deviation) -> Result<()> {
    let records: Vec<RatingRecord> = read_jsonl(open(ratings)?).with_context(|| format!("reading {}", ratings.display()))?;
    if records.is_empty() {
        return Err(Degenerate(format!("{} holds no ratings", ratings.display())).into());
    }
    let config = AnalysisConfig {
        alpha: g.alpha,
        threshold: g.sig_threshold,
        deviation,
    };
    let analysis = analyze(&records, &config)?;
    let correlation = match metrics {
        Some(p) if !analysis.systems.is_empty() => {
            let table = ScoreTable::parse_csv(&read_text(p)?)?;
            Some(correlate_metrics(&analysis.systems, &metric_columns(&table, None))?)
        }
        _ => None,
    };
    write_json(
        &g.out,
        "report.json",
        &Report {
            alpha: g.alpha,
            sig_threshold: g.sig_threshold,
            analysis: &analysis,
            correlation,
        },
    )?;
    if let Some(m) = &analysis.significance {
        write_text(&g.out, "sigmatrix.csv", &m.to_csv())?;
        write_text(&g.out, "heatmap.svg", &m.to_svg())?;
    }
    let passed = analysis.qc.passed_workers.len();
    println!("{passed} of {} workers passed quality control", analysis.qc.report.len());
    if analysis.systems.is_empty() {
        return Err(Degenerate("no ratings survive quality control and standardization; system table is empty".into()).into());
    }
    for s in &analysis.systems.systems {
        println!("{}\t{:.3}\t{}", s.system, s.z_overall, s.n);
    }
    Ok(())
}

fn read_matrix(path: &Path) -> Result<SignificanceMatrix> {
    let mut r = csv::Reader::from_reader(open(path)?);
    let systems: Vec<String> = r.headers()?.iter().skip(1).map(String::from).collect();
    let mut cells = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.get(0) != systems.get(i).map(String::as_str) {
            bail!("{}: row {} is not in header order", path.display(), i + 1);
        }
        let row = rec
            .iter()
            .skip(1)
            .map(|c| match c {
                "0" => Ok(false),
                "1" => Ok(true),
                other => bail!("{}: cell `{other}` is not 0/1", path.display()),
            })
            .collect::<Result<Vec<bool>>>()?;
        cells.push(row);
    }
    Ok(SignificanceMatrix::from_cells(systems, cells, f64::NAN)?)
}

fn overlap(a: &Path, b: &Path) -> Result<()> {
    let v = matrix_overlap(&read_matrix(a)?, &read_matrix(b)?)?;
    println!("{v}");
    Ok(())
}

fn correlate(g: &Global, table: &Path, report: Option<&Path>, human_column: &str) -> Result<()> {
    let scores = ScoreTable::parse_csv(&read_text(table)?)?;
    let (human, skip) = match report {
        Some(p) => {
            let v: serde_json::Value = serde_json::from_str(&read_text(p)?)?;
            let systems: SystemScoreTable = serde_json::from_value(v["systems"].clone())
                .with_context(|| format!("{} has no system table", p.display()))?;
            (systems, None)
        }
        None => {
            let col = scores
                .column(human_column)
                .with_context(|| format!("no column `{human_column}` in {}", table.display()))?;
            (SystemScoreTable::from_overall(col), Some(human_column))
        }
    };
    let report = correlate_metrics(&human, &metric_columns(&scores, skip))?;
    write_json(&g.out, "correlation.json", &report)?;
    println!("metric\tn\tr\trho\ttau");
    for m in &report.metrics {
        println!("{}\t{}\t{:.3}\t{:.3}\t{:.3}", m.metric, m.n, m.pearson, m.spearman, m.kendall);
    }
    for w in &report.williams {
        println!("williams\t{} > {}\tn={}\tp={:.3}", w.better, w.worse, w.n, w.p_value);
    }
    Ok(())
}

fn simulate(g: &Global, run: &str, hits: usize) -> Result<()> {
    let cfg = SimulationConfig {
        hits,
        ..SimulationConfig::default()
    };
    let ratings = simulate_run(&cfg, g.seed, run)?;
    let mut lines = String::new();
    for r in &ratings {
        lines.push_str(&serde_json::to_string(r)?);
        lines.push('\n');
    }
    let name = format!("ratings_{run}.jsonl");
    write_text(&g.out, &name, &lines)?;
    println!("wrote {} ratings to {name}", ratings.len());
    Ok(())
}

fn stat_test(cmd: &TestCommand) -> Result<()> {
    let result = match cmd {
        TestCommand::RankSum { x, y, alternative } => wilcoxon_rank_sum(x, y, (*alternative).into())?,
        TestCommand::SignedRank { x, y, alternative } => {
            if x.len() != y.len() {
                bail!("--x and --y must have the same length ({} vs {})", x.len(), y.len());
            }
            let sample = PairedSample::new(x.iter().copied().zip(y.iter().copied()).collect())?;
            wilcoxon_signed_rank(&sample, (*alternative).into())?
        }
        TestCommand::Williams {
            r12,
            r13,
            r23,
            n,
            alternative,
        } => williams_test(*r12, *r13, *r23, *n, (*alternative).into())?,
    };
    println!("{}", serde_json::to_string(&result)?);
    Ok(())
}
