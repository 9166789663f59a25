//! Acceptance run: one line per criterion, non-zero exit if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use fo2::automata::Alphabet;
use fo2::cli;
use fo2::corpus::{self, Corpus, CorpusConfig, PropertyResult};
use fo2::rankers::Ranker;
use fo2::varieties::{self, Fo2Level};

type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn da_config() -> CorpusConfig {
    CorpusConfig {
        seed: 7,
        count: 220,
        max_states: 4,
        letters: 2,
        da_only: true,
        ..CorpusConfig::default()
    }
}

fn mixed_config() -> CorpusConfig {
    CorpusConfig {
        seed: 7,
        count: 200,
        max_states: 4,
        letters: 2,
        da_only: false,
        ..CorpusConfig::default()
    }
}

/// Sums a suite over several corpora; passes only with zero failures and
/// zero skips.
fn exhaustive(results: &[PropertyResult]) -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for r in results {
        ok &= r.failed == 0 && r.skipped == 0 && r.checked > 0;
        let mut s = format!(
            "{}: {} checked, {} failed, {} skipped",
            r.name, r.checked, r.failed, r.skipped
        );
        if let Some(e) = &r.example {
            s += &format!(" (first failure: {e})");
        }
        parts.push(s);
    }
    outcome(ok, parts.join("; "))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let alphabet = Alphabet::from_chars("abc").unwrap();
    let r = Ranker::parse("Xa Yb Xc", &alphabet).unwrap();
    let w = |s: &str| alphabet.parse_word(s).unwrap();
    let results = [
        r.eval(&w("bca")) == Some(2),
        r.eval(&w("bac")) == Some(3),
        r.eval(&w("cabc")).is_none(),
        r.eval(&w("bcba")).is_none(),
        r.is_condensed(&w("bca")),
        !r.is_condensed(&w("bac")),
    ];
    let elapsed = start.elapsed();
    let correct = results.iter().filter(|&&b| b).count();
    outcome(
        correct == results.len() && elapsed < Duration::from_millis(1),
        format!(
            "{correct}/{} examples reproduce, {elapsed:?} (limit 1 ms)",
            results.len()
        ),
    )
}

fn criterion_2(da: &Corpus) -> Outcome {
    let mut o = exhaustive(&[corpus::check_dual_route(da).unwrap()]);
    let n = da.entries.len();
    o.passed &= n >= 200 && da.entries.iter().all(|e| e.in_da);
    o.detail = format!("{n} distinct minimal DFAs in DA; {}", o.detail);
    o
}

fn criterion_3(da: &Corpus, mixed: &Corpus) -> Outcome {
    let mut o = exhaustive(&[
        corpus::check_anchors(da).unwrap(),
        corpus::check_anchors(mixed).unwrap(),
    ]);
    let level = |re: &str| {
        let input = cli::load_input(&cli::InputArgs {
            regex: Some(re.into()),
            dfa: None,
            monoid: None,
            alphabet: None,
        })
        .unwrap();
        varieties::fo2_level(&input.monoid, 6).unwrap()
    };
    let (a, ab) = (level("a(a|b)*"), level("(ab)*"));
    o.passed &= a == Fo2Level::Level(2) && ab == Fo2Level::NotFo2;
    o.detail = format!("a(a|b)* -> {a:?}, (ab)* -> {ab:?}; {}", o.detail);
    o
}

fn criterion_4(da: &Corpus, mixed: &Corpus) -> Outcome {
    exhaustive(&[
        corpus::check_monotonicity(da).unwrap(),
        corpus::check_monotonicity(mixed).unwrap(),
    ])
}

fn criterion_5(da: &Corpus, mixed: &Corpus) -> Outcome {
    let mut results = Vec::new();
    let mut hist = Vec::new();
    for c in [da, mixed] {
        let (r, n) = corpus::check_prop_main(c).unwrap();
        results.push(r);
        hist.push(format!("{n:?}"));
    }
    let mut o = exhaustive(&results);
    o.detail = format!("least n histograms {}; {}", hist.join(" / "), o.detail);
    o
}

fn criterion_6(da: &Corpus, mixed: &Corpus) -> Outcome {
    let mut results = vec![
        corpus::check_lemma_lift(da).unwrap(),
        corpus::check_lemma_lift(mixed).unwrap(),
        corpus::check_lemma_da(da).unwrap(),
        corpus::check_lemma_da(mixed).unwrap(),
    ];
    results.extend(corpus::check_factor_lemmas(2).unwrap());
    exhaustive(&results)
}

fn criterion_7(da: &Corpus, mixed: &Corpus) -> Outcome {
    let sampled = corpus::check_ranker_congruence(2, 2000, 7).unwrap();
    let enough = sampled.checked >= 1000;
    let mut o = exhaustive(&[
        corpus::check_quotient_congruences(da).unwrap(),
        corpus::check_quotient_congruences(mixed).unwrap(),
        sampled,
    ]);
    o.passed &= enough;
    o
}

fn criterion_8() -> Outcome {
    let args = [
        "fo2",
        "corpus",
        "--seed",
        "7",
        "--count",
        "220",
        "--max-states",
        "4",
        "--letters",
        "2",
        "--da-only",
    ];
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cli::run(args, &mut out, &mut err);
    let text = String::from_utf8(out).unwrap();
    let tally: Vec<&str> = text.lines().filter(|l| l.starts_with("straubing m=")).collect();
    let produced = tally.len() == 2 && tally[0].starts_with("straubing m=1") && tally[1].starts_with("straubing m=2");
    outcome(
        produced,
        format!(
            "corpus exit {code}; {}",
            if tally.is_empty() {
                "no tally".into()
            } else {
                tally.join("; ")
            }
        ),
    )
}

fn criterion_9(da: &Corpus, mixed: &Corpus) -> Outcome {
    let dir = std::env::temp_dir().join(format!("fo2-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut worst = Duration::ZERO;
    let mut runs = 0;
    let mut failures = Vec::new();
    for (name, c) in [("da", da), ("mixed", mixed)] {
        for (i, e) in c.entries.iter().enumerate() {
            let path = dir.join(format!("{name}-{i}.dfa"));
            std::fs::write(&path, e.dfa.to_string()).unwrap();
            let args = ["fo2", "analyze", "--dfa", path.to_str().unwrap(), "--json"];
            let (mut out, mut err) = (Vec::new(), Vec::new());
            let start = Instant::now();
            let code = cli::run(args, &mut out, &mut err);
            let elapsed = start.elapsed();
            worst = worst.max(elapsed);
            runs += 1;
            if code != 0 || elapsed >= Duration::from_secs(5) {
                failures.push(format!("{name} #{i}: exit {code} in {elapsed:?}"));
            }
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    outcome(
        failures.is_empty(),
        format!(
            "{runs} analyses, slowest {worst:?} (limit 5 s){}",
            if failures.is_empty() {
                String::new()
            } else {
                format!("; {}", failures.join(", "))
            }
        ),
    )
}

fn main() -> ExitCode {
    // `cargo test` passes harness flags such as `--quiet`; nothing to filter.
    let start = Instant::now();
    let da = corpus::generate(&da_config()).unwrap();
    let mixed = corpus::generate(&mixed_config()).unwrap();
    println!(
        "corpora: {} DA inputs (seed 7), {} mixed inputs (seed 7), generated in {:?}",
        da.entries.len(),
        mixed.entries.len(),
        start.elapsed()
    );
    let criteria: Vec<(&str, Check)> = vec![
        ("ranker examples", Box::new(criterion_1)),
        ("dual-route agreement", Box::new(|| criterion_2(&da))),
        ("level anchors", Box::new(|| criterion_3(&da, &mixed))),
        ("hierarchy monotonicity", Box::new(|| criterion_4(&da, &mixed))),
        (
            "ranker congruence inside the syntactic congruence",
            Box::new(|| criterion_5(&da, &mixed)),
        ),
        ("lemma property suites", Box::new(|| criterion_6(&da, &mixed))),
        ("congruence verification", Box::new(|| criterion_7(&da, &mixed))),
        ("Straubing tally reported", Box::new(criterion_8)),
        (
            "analyze under 5 s per corpus input",
            Box::new(|| criterion_9(&da, &mixed)),
        ),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = check();
        let status = if o.passed { "PASS" } else { "FAIL" };
        failed += usize::from(!o.passed);
        println!(
            "[{status}] criterion {}: {name} ({:?}): {}",
            i + 1,
            t.elapsed(),
            o.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
