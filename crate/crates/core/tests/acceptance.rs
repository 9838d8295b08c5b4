//! One test per acceptance criterion. Each prints a single PASS/FAIL line;
//! run with `--nocapture` to see them.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use qgeval_core::corpus::EvalItem;
use qgeval_core::human::simulate::{rate_hit, simulate_hits, simulate_run, SimulationConfig, WorkerKind};
use qgeval_core::human::{
    analyze, badref_span_len, build_hit, correlate_metrics, donor_tokens, matrix_overlap, qc_filter, AnalysisConfig,
    ItemKind, ScoreTable, SystemScoreTable, HUMAN_SYSTEM,
};
use qgeval_core::metrics::{bleu, rouge_l, Smoothing};
use qgeval_core::qascore::{qascore_corpus, qascore_question, Aggregation, MockMlm, MockMode};
use qgeval_core::rng::derive;
use qgeval_core::stats::{pearson, wilcoxon_rank_sum, wilcoxon_signed_rank, Alternative, PairedSample};
use qgeval_core::text::{tokenize, TokenSequence};
use rand::Rng;
use rand_distr::{Distribution, Normal};

const TABLE1: &str = include_str!("../data/table1.csv");

fn verdict(criterion: &str, ok: bool, detail: &str) {
    println!("{} {criterion}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{criterion}: {detail}");
}

#[test]
fn worked_example() {
    let start = Instant::now();
    let reference = [tokenize("What is the address of DCU?", false)];
    let q1 = tokenize("address of DCU", false);
    let q2 = tokenize("What is the address of", false);
    let b1 = bleu(&q1, &reference, 1, Smoothing::None).unwrap().value;
    let b2 = bleu(&q2, &reference, 1, Smoothing::None).unwrap().value;
    let r1 = rouge_l(&q1, &reference[0]).unwrap().value;
    let r2 = rouge_l(&q2, &reference[0]).unwrap().value;
    let elapsed = start.elapsed();
    let close = |v: f64, want: f64| ((v * 10.0).round() / 10.0 - want).abs() <= 0.05;
    let ok = close(b1, 36.8) && close(b2, 81.9) && close(r1, 66.7) && close(r2, 90.9) && elapsed < Duration::from_secs(1);
    verdict(
        "worked example",
        ok,
        &format!("BLEU-1 {b2:.1}/{b1:.1}, ROUGE-L {r2:.1}/{r1:.1} in {elapsed:?}"),
    );
}

const TABLE2: [(&str, [f64; 3]); 7] = [
    ("QAScore", [0.864, 0.827, 0.709]),
    ("METEOR", [0.801, 0.612, 0.511]),
    ("ROUGE-L", [0.770, 0.503, 0.378]),
    ("BERTScore", [0.761, 0.430, 0.289]),
    ("BLEURT", [0.739, 0.503, 0.378]),
    ("Q-BLEU4", [0.725, 0.467, 0.289]),
    ("Q-BLEU1", [0.724, 0.467, 0.289]),
];

fn table1_report() -> qgeval_core::human::CorrelationReport {
    let table = ScoreTable::parse_csv(TABLE1).unwrap();
    let human = SystemScoreTable::from_overall(table.column("z").unwrap());
    let columns: Vec<(String, BTreeMap<String, f64>)> = TABLE2
        .iter()
        .map(|(m, _)| (m.to_string(), table.column(m).unwrap()))
        .collect();
    correlate_metrics(&human, &columns).unwrap()
}

#[test]
fn table2_reproduction() {
    let start = Instant::now();
    let report = table1_report();
    let elapsed = start.elapsed();
    let mut misses = Vec::new();
    for (metric, want) in TABLE2 {
        let got = report.get(metric).unwrap();
        let expected_n = if metric == "QAScore" { 11 } else { 10 };
        assert_eq!(got.n, expected_n, "{metric}");
        for (label, g, w) in [("r", got.pearson, want[0]), ("rho", got.spearman, want[1]), ("tau", got.kendall, want[2])] {
            if (g - w).abs() > 0.0005 {
                misses.push(format!("{metric} {label} {g:.5} vs {w}"));
            }
        }
    }
    let ok = misses.is_empty() && elapsed < Duration::from_secs(1);
    let detail = if misses.is_empty() {
        format!("21 cells within 0.0005 in {elapsed:?}")
    } else {
        format!("{} of 21 cells outside 0.0005: {}", misses.len(), misses.join("; "))
    };
    verdict("Table 2 reproduction", ok, &detail);
}

#[test]
fn williams_meteor_vs_qbleu1() {
    let report = table1_report();
    let w = report.williams("METEOR", "Q-BLEU1").unwrap();
    let ok = w.better == "METEOR" && w.n == 10 && (w.p_value - 0.248).abs() <= 0.02;
    verdict(
        "Williams METEOR vs Q-BLEU1",
        ok,
        &format!("p = {:.4} (r12 = {:.4}, n = {})", w.p_value, w.r_between, w.n),
    );
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Mann-Whitney U of `x` by pair counting (no ties).
fn u_stat(x: &[f64], y: &[f64]) -> usize {
    x.iter().map(|a| y.iter().filter(|b| a > *b).count()).sum()
}

fn brute_rank_sum(x: &[f64], y: &[f64]) -> (f64, f64) {
    let pooled: Vec<f64> = x.iter().chain(y).copied().collect();
    let (n, total) = (x.len(), pooled.len());
    let obs = u_stat(x, y);
    let (mut ge, mut le, mut all) = (0u64, 0u64, 0u64);
    let mut c: Vec<usize> = (0..n).collect();
    loop {
        let xs: Vec<f64> = c.iter().map(|&i| pooled[i]).collect();
        let ys: Vec<f64> = (0..total).filter(|i| !c.contains(i)).map(|i| pooled[i]).collect();
        let u = u_stat(&xs, &ys);
        ge += u64::from(u >= obs);
        le += u64::from(u <= obs);
        all += 1;
        if !next_combination(&mut c, total) {
            break;
        }
    }
    (ge as f64 / all as f64, le as f64 / all as f64)
}

fn brute_signed_rank(d: &[f64]) -> (f64, f64) {
    let n = d.len();
    let mut abs: Vec<f64> = d.iter().map(|v| v.abs()).collect();
    abs.sort_by(f64::total_cmp);
    let rank = |v: f64| abs.iter().position(|a| *a == v.abs()).unwrap() + 1;
    let obs: usize = d.iter().filter(|v| **v > 0.0).map(|v| rank(*v)).sum();
    let (mut ge, mut le) = (0u64, 0u64);
    for mask in 0u32..(1 << n) {
        let w: usize = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| i + 1).sum();
        ge += u64::from(w >= obs);
        le += u64::from(w <= obs);
    }
    let all = (1u64 << n) as f64;
    (ge as f64 / all, le as f64 / all)
}

#[test]
fn exact_tests_match_enumeration() {
    let start = Instant::now();
    let mut checked = 0usize;
    let mut worst = 0.0f64;
    for total in 2..=10usize {
        for n in 1..total {
            // x takes the values at positions `c`; values are a rotated
            // permutation of 1..=total so input order is not sorted
            let values: Vec<f64> = (0..total).map(|i| ((i + total / 2) % total + 1) as f64).collect();
            let mut c: Vec<usize> = (0..n).collect();
            loop {
                let x: Vec<f64> = c.iter().map(|&i| values[i]).collect();
                let y: Vec<f64> = (0..total).filter(|i| !c.contains(i)).map(|i| values[i]).collect();
                let (g, l) = brute_rank_sum(&x, &y);
                let two = (2.0 * g.min(l)).min(1.0);
                for (alt, want) in [(Alternative::Greater, g), (Alternative::Less, l), (Alternative::TwoSided, two)] {
                    let got = wilcoxon_rank_sum(&x, &y, alt).unwrap().p_value;
                    worst = worst.max((got - want).abs());
                }
                checked += 1;
                if !next_combination(&mut c, total) {
                    break;
                }
            }
        }
    }
    for n in 1..=10usize {
        for mask in 0u32..(1 << n) {
            // magnitudes 1..=n in a rotated order, signs from the mask
            let pairs: Vec<(f64, f64)> = (0..n)
                .map(|i| {
                    let mag = ((i + n / 2) % n + 1) as f64 + 0.5;
                    if mask & (1 << i) != 0 { (mag, 0.0) } else { (0.0, mag) }
                })
                .collect();
            let sample = PairedSample::new(pairs).unwrap();
            let (g, l) = brute_signed_rank(&sample.differences());
            let two = (2.0 * g.min(l)).min(1.0);
            for (alt, want) in [(Alternative::Greater, g), (Alternative::Less, l), (Alternative::TwoSided, two)] {
                let got = wilcoxon_signed_rank(&sample, alt).unwrap().p_value;
                worst = worst.max((got - want).abs());
            }
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    let ok = worst <= 1e-12 && elapsed < Duration::from_secs(60);
    verdict(
        "exact-test oracle equivalence",
        ok,
        &format!("{checked} inputs, max |diff| {worst:.1e}, {elapsed:?}"),
    );
}

fn fixture_items() -> Vec<EvalItem> {
    let rows = [
        ("a1", "A", "The treaty was signed in Paris in 1783 by both parties.", "Where was the treaty signed?", "in Paris"),
        ("a2", "A", "Marie Curie won two Nobel prizes for her research.", "How many Nobel prizes did Curie win?", "two"),
        ("a3", "A", "The river flows north through the valley into the lake.", "Which direction does the river flow?", "north"),
        ("b1", "B", "The treaty was signed in Paris in 1783 by both parties.", "What happened?", "in Paris 1783"),
        ("b2", "B", "Marie Curie won two Nobel prizes for her research.", "Who is she?", "two Nobel prizes"),
    ];
    rows.iter()
        .map(|(id, s, p, q, a)| EvalItem {
            id: (*id).into(),
            system: (*s).into(),
            passage: (*p).into(),
            question: (*q).into(),
            answer: (*a).into(),
            reference: None,
        })
        .collect()
}

#[test]
fn qascore_closed_forms_and_oracle() {
    let uniform = MockMlm::uniform(16, 0);
    let mut closed_diff = 0.0f64;
    for n in 1..=10 {
        let it = EvalItem { answer: vec!["w"; n].join(" "), ..fixture_items()[0].clone() };
        let got = qascore_question(&it, &uniform).unwrap().total;
        closed_diff = closed_diff.max((got - n as f64 * (1.0f64 / 16.0).ln()).abs());
    }

    let items = fixture_items();
    let mock = MockMlm::from_items(&items, 42, MockMode::Seeded { scale: 3.0 });
    let (_, systems) = qascore_corpus(&items, &mock, Aggregation::PerWordMean).unwrap();
    let (_, again) = qascore_corpus(&items, &mock, Aggregation::PerWordMean).unwrap();
    // scripted: log(exp(l_true) / sum exp(l)) per masked word
    let mut scripted: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for it in &items {
        let words: Vec<&str> = it.answer.split(' ').collect();
        let mut total = 0.0;
        for (w, word) in words.iter().enumerate() {
            let logits = mock.logits(&it.passage, &it.question, &it.answer, w).unwrap();
            let z: f64 = logits.iter().map(|l| l.exp()).sum();
            total += (logits[mock.token_index(word)].exp() / z).ln();
        }
        scripted.entry(it.system.clone()).or_default().push(total / words.len() as f64);
    }
    let oracle_diff = scripted
        .iter()
        .map(|(s, v)| (systems[s] - v.iter().sum::<f64>() / v.len() as f64).abs())
        .fold(0.0, f64::max);
    let ok = closed_diff <= 1e-12 && oracle_diff <= 1e-9 && systems == again;
    verdict(
        "QAScore closed form and seeded oracle",
        ok,
        &format!("uniform max |diff| {closed_diff:.1e}, seeded corpus max |diff| {oracle_diff:.1e}"),
    );
}

#[test]
fn self_replication() {
    let start = Instant::now();
    let cfg = SimulationConfig::default();
    let config = AnalysisConfig::default();
    let mut worst_r = f64::INFINITY;
    let mut worst_overlap = f64::INFINITY;
    for seed in 0..20u64 {
        let a = analyze(&simulate_run(&cfg, seed, "run1").unwrap(), &config).unwrap();
        let b = analyze(&simulate_run(&cfg, seed, "run2").unwrap(), &config).unwrap();
        let names = a.systems.names();
        let x: Vec<f64> = names.iter().map(|s| a.systems.get(s).unwrap().z_overall).collect();
        let y: Vec<f64> = names.iter().map(|s| b.systems.get(s).unwrap().z_overall).collect();
        worst_r = worst_r.min(pearson(&x, &y).unwrap());
        let o = matrix_overlap(a.significance.as_ref().unwrap(), b.significance.as_ref().unwrap()).unwrap();
        worst_overlap = worst_overlap.min(o);
    }
    let elapsed = start.elapsed();
    let ok = worst_r >= 0.9 && worst_overlap >= 0.8 && elapsed < Duration::from_secs(120);
    verdict(
        "pipeline self-replication",
        ok,
        &format!("20 seeds, min r {worst_r:.4}, min overlap {worst_overlap:.4}, {elapsed:?}"),
    );
}

#[test]
fn qc_discrimination() {
    let cfg = SimulationConfig {
        hits: 400,
        ..SimulationConfig::default()
    };
    let hits = simulate_hits(&cfg, 2024, "qc").unwrap();
    let mut rng = derive(2024, "qc/raters");
    let bias = Normal::new(0.0, cfg.worker_bias_sd).unwrap();
    let mut ratings = Vec::new();
    for (k, sim) in hits.iter().enumerate() {
        let (id, kind) = if k < 200 {
            (format!("diligent-{k:03}"), WorkerKind::Diligent)
        } else {
            (format!("random-{k:03}"), WorkerKind::RandomClicker)
        };
        let b = bias.sample(&mut rng);
        ratings.extend(rate_hit(sim, &id, kind, b, &cfg, &mut rng).unwrap());
    }
    let out = qc_filter(&ratings, 0.05).unwrap();
    assert!(out.report.values().all(|w| w.pairs == 24));
    let passed = |prefix: &str| out.passed_workers.iter().filter(|w| w.starts_with(prefix)).count();
    let diligent_pass = passed("diligent") as f64 / 200.0;
    let random_fail = 1.0 - passed("random") as f64 / 200.0;
    let ok = diligent_pass >= 0.95 && random_fail >= 0.95;
    verdict(
        "QC discrimination",
        ok,
        &format!("diligent pass rate {diligent_pass:.3}, random-clicker fail rate {random_fail:.3}"),
    );
}

#[test]
fn hit_builder_invariants() {
    let start = Instant::now();
    let passages: Vec<TokenSequence> = (0..6)
        .map(|p| donor_tokens(&(0..40).map(|i| format!("p{p}x{i}")).collect::<Vec<_>>().join(" ")))
        .collect();
    let mut violations = Vec::new();
    for seed in 0..10_000u64 {
        let mut rng = derive(seed, "hit-builder");
        let mut questions = BTreeMap::new();
        for s in 0..11 {
            let name = if s == 0 { HUMAN_SYSTEM.to_string() } else { format!("S{s:02}") };
            let len = rng.random_range(1..=30);
            let words: Vec<String> = (0..len).map(|i| format!("q{s}w{i}")).collect();
            questions.insert(name, words.join(" "));
        }
        let current = (seed % 6) as usize;
        let hit = build_hit(&format!("h{seed}"), "passage", "answer", &questions, &passages, current, &mut rng).unwrap();
        let counts = (hit.count(ItemKind::Ordinary), hit.count(ItemKind::BadReference), hit.count(ItemKind::Repeat));
        if hit.items.len() != 20 || counts != (11, 6, 3) {
            violations.push(format!("seed {seed}: composition {counts:?}"));
        }
        let human: Vec<ItemKind> = hit.items.iter().filter(|i| i.system == HUMAN_SYSTEM).map(|i| i.kind).collect();
        if human.len() != 3 {
            violations.push(format!("seed {seed}: Human has {} items", human.len()));
        }
        for item in hit.items.iter().filter(|i| i.kind != ItemKind::Ordinary) {
            let orig = &questions[&item.system];
            if item.kind == ItemKind::Repeat {
                if &item.question != orig {
                    violations.push(format!("seed {seed}: repeat differs"));
                }
                continue;
            }
            let a: Vec<&str> = orig.split_whitespace().collect();
            let b: Vec<&str> = item.question.split_whitespace().collect();
            let n = a.len();
            let m = badref_span_len(n);
            let diff: Vec<usize> = (0..n.min(b.len())).filter(|&i| a[i] != b[i]).collect();
            let donor_ok = b.iter().all(|w| !w.starts_with(&format!("p{current}x")));
            let span_ok = b.len() == n
                && !diff.is_empty()
                && diff[diff.len() - 1] - diff[0] < m
                && (n <= 2 || (diff[0] >= 1 && diff[diff.len() - 1] <= n - 2));
            if !span_ok || !donor_ok {
                violations.push(format!("seed {seed}: bad reference of {n} words {:?}", item.question));
            }
        }
    }
    let ok = violations.is_empty();
    verdict(
        "HIT builder",
        ok,
        &format!("10000 builds, {} violations{}, {:?}", violations.len(), violations.first().map(|v| format!(" (first: {v})")).unwrap_or_default(), start.elapsed()),
    );
}
