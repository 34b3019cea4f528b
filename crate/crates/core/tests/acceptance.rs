//! Acceptance criteria. Each test prints one PASS/FAIL line; run with
//! `cargo test -p textclust --test acceptance -- --nocapture` to see them.

use std::collections::{BTreeMap, HashMap};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use textclust::cluster::KMeans;
use textclust::explain::{explain_texts, sem_match};
use textclust::matrix::DenseMatrix;
use textclust::metrics::{cluster_accuracy, contingency, nmi, ContingencyTable};
use textclust::pipeline::{
    self, emit_report, features, run_with_inputs, select_prompt, synthetic, ExperimentConfig,
    Inputs, Representation, TextSelection,
};
use textclust::vectorize::{fit_tfidf, transform_tfidf, StopWords};
use textclust::SparseMatrix;

fn verdict(id: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "[{}] criterion {id:>2}: {name} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {id} failed: {name} ({detail})");
}

fn bundled_config(dir: &std::path::Path) -> ExperimentConfig {
    let corpus_path = dir.join("corpus.jsonl");
    std::fs::write(&corpus_path, synthetic::BUNDLED_CORPUS).unwrap();
    let mut config = ExperimentConfig::new(corpus_path);
    config.strategies = vec!["keywords".into()];
    config.representations = vec![Representation::Tfidf];
    config.k = Some(3);
    config.runs = 50;
    config.base_seed = 7;
    config
}

// Sports10 and LSUN rows: (ground truth, explanation, printed SEM bit).
const SEM_TABLE: [(&str, &str, &str, u8); 20] = [
    ("Sports10", "AmericanFootball", "football, nfl", 0),
    ("Sports10", "Basketball", "basketball, basketball game", 1),
    ("Sports10", "BikeRacing", "motorcycle, rider", 0),
    ("Sports10", "CarRacing", "car, speed", 0),
    ("Sports10", "Fighting", "fight, boxing", 0),
    ("Sports10", "Hockey", "hockey, hockey game", 1),
    ("Sports10", "Soccer", "soccer, soccer game", 1),
    ("Sports10", "TableTennis", "ping pong, table tennis", 0),
    ("Sports10", "Tennis", "tennis, tennis game", 1),
    ("Sports10", "Volleyball", "volleyball, beach", 1),
    ("LSUN", "bedroom", "bedroom, bed", 1),
    ("LSUN", "bridge", "bridge, river", 1),
    ("LSUN", "church_outdoor", "church, cathedral", 0),
    ("LSUN", "classroom", "classroom, teacher", 1),
    ("LSUN", "conference_room", "meeting, conference", 0),
    ("LSUN", "dining_room", "dining room, dining table", 1),
    ("LSUN", "kitchen", "kitchen, wood", 1),
    ("LSUN", "living_room", "living room, living", 1),
    ("LSUN", "restaurant", "restaurant, bar", 1),
    ("LSUN", "tower", "tower, city", 1),
];

#[test]
fn criterion_01_sem_fixture() {
    let start = Instant::now();
    let mut matched = 0;
    let mut averages: BTreeMap<&str, (u32, u32)> = BTreeMap::new();
    for (dataset, truth, explanation, expected) in SEM_TABLE {
        let keywords: Vec<&str> = explanation.split(", ").collect();
        let bit = u8::from(sem_match(truth, &keywords));
        if bit == expected {
            matched += 1;
        }
        let e = averages.entry(dataset).or_default();
        e.0 += u32::from(bit);
        e.1 += 1;
    }
    let avg = |d: &str| f64::from(averages[d].0) / f64::from(averages[d].1) * 100.0;
    let elapsed = start.elapsed();
    verdict(
        1,
        "SEM reproduces the explanation table",
        matched == 20 && avg("LSUN") == 80.0 && avg("Sports10") == 50.0 && elapsed < Duration::from_secs(1),
        &format!(
            "{matched}/20 bits, LSUN {:.0}, Sports10 {:.0}, {elapsed:?}",
            avg("LSUN"),
            avg("Sports10")
        ),
    );
}

fn random_table(rng: &mut ChaCha8Rng) -> ContingencyTable {
    let rows = rng.random_range(1..=6);
    let cols = rng.random_range(1..=6);
    loop {
        let counts: Vec<Vec<u64>> = (0..rows)
            .map(|_| (0..cols).map(|_| rng.random_range(0..10)).collect())
            .collect();
        let classes = (0..rows).map(|i| format!("class{i}")).collect();
        if let Ok(t) = ContingencyTable::from_counts(classes, counts) {
            return t;
        }
    }
}

fn permutations(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, out);
        items.swap(k, i);
    }
}

/// Best agreement over all one-to-one cluster/class matchings, by enumeration
/// of permutations of the padded square.
fn brute_force_matched(table: &ContingencyTable) -> u64 {
    let size = table.n_classes().max(table.n_clusters());
    let mut perms = Vec::new();
    permutations(&mut (0..size).collect(), 0, &mut perms);
    perms
        .iter()
        .map(|p| {
            (0..table.n_classes())
                .filter(|&c| p[c] < table.n_clusters())
                .map(|c| table.counts()[c][p[c]])
                .sum::<u64>()
        })
        .max()
        .unwrap()
}

#[test]
fn criterion_02_hungarian_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut agree = 0;
    for _ in 0..200 {
        let table = random_table(&mut rng);
        let expected = brute_force_matched(&table) as f64 / table.total() as f64;
        if cluster_accuracy(&table).raw == expected {
            agree += 1;
        }
    }
    let elapsed = start.elapsed();
    verdict(
        2,
        "cluster accuracy equals brute-force matching",
        agree == 200 && elapsed < Duration::from_secs(5),
        &format!("{agree}/200 exact, {elapsed:?}"),
    );
}

/// NMI straight from the definition over label pairs.
fn nmi_definition(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len() as f64;
    let mut pa: HashMap<usize, f64> = HashMap::new();
    let mut pb: HashMap<usize, f64> = HashMap::new();
    let mut pab: HashMap<(usize, usize), f64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *pa.entry(x).or_default() += 1.0 / n;
        *pb.entry(y).or_default() += 1.0 / n;
        *pab.entry((x, y)).or_default() += 1.0 / n;
    }
    let h = |p: &HashMap<usize, f64>| -> f64 { p.values().map(|&v| -v * v.ln()).sum() };
    let (ha, hb) = (h(&pa), h(&pb));
    if pa.len() == 1 && pb.len() == 1 {
        return 1.0;
    }
    if ha == 0.0 || hb == 0.0 {
        return 0.0;
    }
    let mi: f64 = pab
        .iter()
        .map(|(&(x, y), &p)| p * (p.ln() - pa[&x].ln() - pb[&y].ln()))
        .sum();
    mi / ((ha + hb) / 2.0)
}

#[test]
fn criterion_03_nmi_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.random_range(1..=50);
        let ka = rng.random_range(1..=6);
        let kb = rng.random_range(1..=6);
        let a: Vec<usize> = (0..n).map(|_| rng.random_range(0..ka)).collect();
        let b: Vec<usize> = (0..n).map(|_| rng.random_range(0..kb)).collect();
        let names: Vec<String> = a.iter().map(|x| format!("c{x}")).collect();
        let got = nmi(&contingency(&names, &b).unwrap()).raw;
        worst = worst.max((got - nmi_definition(&a, &b)).abs());
    }
    verdict(
        3,
        "NMI matches the definition",
        worst <= 1e-9,
        &format!("max |diff| = {worst:.3e}"),
    );
}

/// Ten Gaussian blobs (sigma 1) in 16 dimensions with centers at least 10 apart.
pub fn planted_blobs(seed: u64) -> (DenseMatrix<f64>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (k, d, per) = (10, 16, 100);
    let mut centers: Vec<Vec<f64>> = Vec::new();
    while centers.len() < k {
        let c: Vec<f64> = (0..d).map(|_| rng.random_range(-20.0..20.0)).collect();
        let far = centers.iter().all(|o| {
            o.iter().zip(&c).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() >= 10.0
        });
        if far {
            centers.push(c);
        }
    }
    let noise = Normal::new(0.0, 1.0).unwrap();
    let mut rows = Vec::with_capacity(k * per);
    let mut labels = Vec::with_capacity(k * per);
    for i in 0..k * per {
        let c = i % k;
        rows.push(centers[c].iter().map(|&m| m + noise.sample(&mut rng)).collect::<Vec<f64>>());
        labels.push(c);
    }
    (DenseMatrix::from_rows(&rows).unwrap(), labels)
}

#[test]
fn criterion_04_kmeans_recovery() {
    let (points, labels) = planted_blobs(4);
    let names: Vec<String> = labels.iter().map(|l| format!("blob{l}")).collect();
    let start = Instant::now();
    let summary = KMeans::new(10).fit_restarts(&points, 50, 0).unwrap();
    let elapsed = start.elapsed();
    let accs: Vec<f64> = summary
        .runs
        .iter()
        .map(|r| cluster_accuracy(&contingency(&names, &r.assignments).unwrap()).scaled)
        .collect();
    let mean = accs.iter().sum::<f64>() / accs.len() as f64;
    let best = summary.best().inertia;
    let best_is_min = summary.runs.iter().all(|r| best <= r.inertia);
    verdict(
        4,
        "K-Means recovers planted blobs",
        mean >= 99.0 && best_is_min && elapsed < Duration::from_secs(10),
        &format!("mean Acc {mean:.2}, best inertia {best:.2} minimal: {best_is_min}, {elapsed:?}"),
    );
}

#[test]
fn criterion_05_lloyd_monotonicity() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut violations = 0;
    let mut steps = 0;
    for dataset in 0..50 {
        let n = rng.random_range(10..200);
        let d = rng.random_range(1..8);
        let k = rng.random_range(2..=8.min(n));
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let points = DenseMatrix::from_rows(&rows).unwrap();
        let (_, trace) = KMeans::new(k).tol(0.0).fit_traced(&points, dataset).unwrap();
        for w in trace.windows(2) {
            steps += 1;
            if w[1] > w[0] + 1e-9 * w[0].abs() {
                violations += 1;
            }
        }
    }
    verdict(
        5,
        "per-iteration inertia is non-increasing",
        violations == 0,
        &format!("{violations} violations over {steps} iterations"),
    );
}

#[test]
fn criterion_06_tfidf_hand_check() {
    let docs = ["cat sat", "cat cat dog", "dog"];
    let vocab = fit_tfidf(&docs, 2000, &StopWords::english()).unwrap();
    let m: SparseMatrix = transform_tfidf(&docs, &vocab);
    let idf_cat = (4.0_f64 / 3.0).ln() + 1.0;
    let idf_dog = (4.0_f64 / 3.0).ln() + 1.0;
    let idf_sat = (4.0_f64 / 2.0).ln() + 1.0;
    let unit = |v: [f64; 3]| {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.map(|x| x / n)
    };
    // columns: cat, dog, sat
    let expected = [
        unit([idf_cat, 0.0, idf_sat]),
        unit([2.0 * idf_cat, idf_dog, 0.0]),
        [0.0, 1.0, 0.0],
    ];
    let mut worst: f64 = 0.0;
    for (r, row) in expected.iter().enumerate() {
        for (c, &e) in row.iter().enumerate() {
            worst = worst.max((m.get(r, c) - e).abs());
        }
    }
    let truncated = fit_tfidf(&docs, 2, &StopWords::english()).unwrap();
    let tie = fit_tfidf(&["bb aa cc"], 2, &StopWords::none()).unwrap();
    let pass = worst <= 1e-12
        && vocab.terms() == ["cat", "dog", "sat"]
        && truncated.terms() == ["cat", "dog"]
        && tie.terms() == ["aa", "bb"];
    verdict(
        6,
        "TF-IDF weights and vocabulary truncation",
        pass,
        &format!("max |diff| = {worst:.3e}, truncated {:?}", truncated.terms()),
    );
}

#[test]
fn criterion_07_end_to_end_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let config = bundled_config(dir.path());
    let first = pipeline::run_experiment(&config).unwrap();
    let second = pipeline::run_experiment(&config).unwrap();
    emit_report(&first, &dir.path().join("a")).unwrap();
    emit_report(&second, &dir.path().join("b")).unwrap();
    let a = std::fs::read(dir.path().join("a/metrics.json")).unwrap();
    let b = std::fs::read(dir.path().join("b/metrics.json")).unwrap();
    let acc = first.entries[0].acc.as_ref().unwrap().mean;
    verdict(
        7,
        "identical invocations give identical metrics.json; planted Acc 100",
        a == b && acc == 100.0,
        &format!("{} bytes identical: {}, Acc mean {acc}", a.len(), a == b),
    );
}

#[test]
fn criterion_08_prompt_selection() {
    let dir = tempfile::tempdir().unwrap();
    let base = bundled_config(dir.path());
    let configs = vec![base.for_strategy("caption"), base.for_strategy("keywords")];
    let selection = select_prompt(&configs).unwrap();
    let inertia = |s: &str| {
        selection
            .candidates
            .iter()
            .find(|c| c.strategy == s)
            .map(|c| c.best_inertia)
            .unwrap()
    };
    let listed = selection.candidates.len() == 2;
    let json = serde_json::to_value(&selection).unwrap();
    let pass = selection.chosen == "keywords"
        && inertia("keywords") < inertia("caption")
        && listed
        && json["candidates"].as_array().map(Vec::len) == Some(2);
    verdict(
        8,
        "prompt selection picks the lower-inertia strategy",
        pass,
        &format!(
            "chose {}, inertias keywords {:.4} caption {:.4}",
            selection.chosen,
            inertia("keywords"),
            inertia("caption")
        ),
    );
}

#[test]
fn criterion_09_explanation_exclusivity() {
    let pool = [
        "apple", "fruit", "car", "road", "tree", "sky", "dog", "cat", "house", "boat", "water",
        "sun",
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut exclusive = 0;
    for _ in 0..100 {
        let n = rng.random_range(1..40);
        let k = rng.random_range(1..6);
        let texts: Vec<Vec<String>> = (0..n)
            .map(|_| {
                (0..rng.random_range(1..4))
                    .map(|_| {
                        (0..rng.random_range(1..4))
                            .map(|_| pool[rng.random_range(0..pool.len())])
                            .collect::<Vec<_>>()
                            .join(", ")
                    })
                    .collect()
            })
            .collect();
        let assignments: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
        let refs: Vec<&[String]> = texts.iter().map(Vec::as_slice).collect();
        let top = rng.random_range(1..5);
        if explain_texts(&refs, &assignments, top).unwrap().is_exclusive() {
            exclusive += 1;
        }
    }
    let a = vec!["apple, fruit".to_string()];
    let b = vec!["car, fruit".to_string()];
    let refs: Vec<&[String]> = vec![&a, &a, &a, &b, &b];
    let worked = explain_texts(&refs, &[0, 0, 0, 1, 1], 2).unwrap();
    let pass = exclusive == 100 && worked.keywords(0) == ["apple", "fruit"] && worked.keywords(1) == ["car"];
    verdict(
        9,
        "explanations are exclusive; apple/fruit/car example",
        pass,
        &format!(
            "{exclusive}/100 exclusive, A {:?}, B {:?}",
            worked.keywords(0),
            worked.keywords(1)
        ),
    );
}

#[test]
fn criterion_10_metric_scaling() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = bundled_config(dir.path());
    config.strategies = vec!["keywords".into(), "caption".into()];
    config.runs = 20;
    let inputs = Inputs::load(&config).unwrap();
    let selection = TextSelection::First(config.m);
    let report = run_with_inputs(&config, &inputs, &selection).unwrap();
    let labels = inputs.corpus.labels().unwrap();
    let mut checked = 0;
    let mut bad = Vec::new();
    for (entry, artifacts) in report.entries.iter().zip(&report.artifacts) {
        let points = features(&config, &inputs, &entry.strategy, entry.representation, &selection).unwrap();
        let summary = KMeans::new(entry.k)
            .fit_restarts(&points, config.runs, config.base_seed)
            .unwrap();
        let acc = entry.acc.as_ref().unwrap();
        let nmi_values = entry.nmi.as_ref().unwrap();
        for (i, run) in summary.runs.iter().enumerate() {
            let table = contingency(&labels, &run.assignments).unwrap();
            let pairs = [
                (acc.values[i], cluster_accuracy(&table).raw),
                (nmi_values.values[i], nmi(&table).raw),
            ];
            for (scaled, raw) in pairs {
                checked += 1;
                if !(0.0..=100.0).contains(&scaled) || scaled != raw * 100.0 {
                    bad.push((entry.strategy.clone(), scaled, raw));
                }
            }
        }
        let sem = artifacts.explanations.sem.unwrap();
        checked += 1;
        if entry.explanation.sem != Some(sem.raw * 100.0) || !(0.0..=100.0).contains(&sem.scaled) {
            bad.push((entry.strategy.clone(), sem.scaled, sem.raw));
        }
        for m in [acc.mean, nmi_values.mean] {
            checked += 1;
            if !(0.0..=100.0).contains(&m) {
                bad.push((entry.strategy.clone(), m, f64::NAN));
            }
        }
    }
    verdict(
        10,
        "reported metrics are 100 x raw and within [0, 100]",
        bad.is_empty(),
        &format!("{checked} values checked, {} bad", bad.len()),
    );
}
