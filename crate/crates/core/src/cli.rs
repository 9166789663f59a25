//! Command-line front end. [`run`] takes the argument list and two output
//! streams and returns the process exit code, so the binary is a one-liner
//! and tests can drive every subcommand in-process.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::automata::{parse_dfa_file, parse_regex, regex_to_min_dfa, Alphabet};
use crate::corpus::{self, CorpusConfig};
use crate::identities::{self, Side, DEFAULT_ASSIGNMENT_CAP};
use crate::monoid::{parse_monoid_file, FiniteMonoid, TransitionMonoid, DEFAULT_SIZE_CAP};
use crate::rankers::{self, Ranker, DEFAULT_ORACLE_BUDGET};
use crate::varieties::{self, Fo2Level};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "fo2",
    version,
    about = "Alternation depth of two-variable first-order logic for regular languages"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the least alternation level of a language or monoid.
    Analyze(AnalyzeArgs),
    /// Search for the least n with the ranker congruence inside the syntactic one.
    Oracle(OracleArgs),
    /// Evaluate a ranker on a word.
    Rankers(RankersArgs),
    /// List elements with their Green's classes.
    Greens(GreensArgs),
    /// Run the cross-validation properties on random automata.
    Corpus(CorpusArgs),
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Regular expression over single-character symbols.
    #[arg(long)]
    pub regex: Option<String>,
    /// DFA description file.
    #[arg(long)]
    pub dfa: Option<PathBuf>,
    /// Monoid multiplication table file.
    #[arg(long)]
    pub monoid: Option<PathBuf>,
    /// Alphabet for --regex, e.g. `abc` or `a b c`. Defaults to the letters used.
    #[arg(long)]
    pub alphabet: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Both,
    Quotient,
    Identities,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = varieties::DEFAULT_MAX_LEVEL)]
    pub max_m: usize,
    #[arg(long, value_enum, default_value_t = Method::Both)]
    pub method: Method,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = corpus::ORACLE_MAX_N)]
    pub max_n: usize,
    #[arg(long, default_value_t = corpus::ORACLE_MAX_LEN)]
    pub max_len: usize,
    /// Upper bound on words times rankers per partition.
    #[arg(long, default_value_t = DEFAULT_ORACLE_BUDGET)]
    pub budget: u128,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct RankersArgs {
    #[arg(long)]
    pub word: String,
    /// Ranker such as `Xa Yb Xc`.
    #[arg(long)]
    pub ranker: String,
    /// Defaults to the symbols occurring in the word and the ranker.
    #[arg(long)]
    pub alphabet: Option<String>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct GreensArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = 50)]
    pub count: usize,
    #[arg(long, default_value_t = 4)]
    pub max_states: usize,
    #[arg(long, default_value_t = 2)]
    pub letters: usize,
    /// Keep only automata whose monoid is in DA.
    #[arg(long)]
    pub da_only: bool,
    #[arg(long, default_value_t = varieties::DEFAULT_MAX_LEVEL)]
    pub max_m: usize,
    #[arg(long)]
    pub json: bool,
}

/// A loaded input: its description, minimal DFA size when it came from a
/// language, and the syntactic (or given) monoid.
#[derive(Debug, Clone)]
pub struct LoadedInput {
    pub description: String,
    pub dfa_states: Option<usize>,
    pub monoid: FiniteMonoid,
}

fn parse_alphabet(text: &str) -> Result<Alphabet> {
    if text.chars().any(|c| c.is_whitespace() || c == ',') {
        Alphabet::new(
            text.split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty()),
        )
    } else {
        Alphabet::from_chars(text)
    }
}

fn read_file(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))
}

pub fn load_input(args: &InputArgs) -> Result<LoadedInput> {
    let given = [args.regex.is_some(), args.dfa.is_some(), args.monoid.is_some()];
    if given.iter().filter(|&&g| g).count() != 1 {
        return Err(Error::InvalidArgument(
            "exactly one of --regex, --dfa, --monoid is required".into(),
        ));
    }
    if args.alphabet.is_some() && args.regex.is_none() {
        return Err(Error::InvalidArgument("--alphabet only applies to --regex".into()));
    }
    if let Some(text) = &args.regex {
        let alphabet = args.alphabet.as_deref().map(parse_alphabet).transpose()?;
        let regex = parse_regex(text, alphabet.as_ref())?;
        return from_dfa(format!("regex {text}"), &regex_to_min_dfa(&regex));
    }
    if let Some(path) = &args.dfa {
        let dfa = parse_dfa_file(&read_file(path)?)?.minimize();
        return from_dfa(format!("dfa {}", path.display()), &dfa);
    }
    let path = args.monoid.as_ref().expect("one input is present");
    Ok(LoadedInput {
        description: format!("monoid {}", path.display()),
        dfa_states: None,
        monoid: parse_monoid_file(&read_file(path)?)?,
    })
}

fn from_dfa(description: String, dfa: &crate::automata::Dfa) -> Result<LoadedInput> {
    let tm = TransitionMonoid::build(dfa, DEFAULT_SIZE_CAP)?;
    Ok(LoadedInput {
        description,
        dfa_states: Some(dfa.num_states()),
        monoid: tm.monoid,
    })
}

/// Level found by one route; `level` is null outside DA.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MethodLevel {
    pub level: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    pub identity: String,
    /// Element labels for `x1, x2, ...`.
    pub assignment: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    pub input: String,
    pub dfa_states: Option<usize>,
    pub monoid_size: usize,
    pub aperiodic: bool,
    pub in_da: bool,
    pub j_trivial: bool,
    pub r_trivial: bool,
    pub l_trivial: bool,
    pub fo2_level: Option<usize>,
    pub method_quotient: Option<MethodLevel>,
    pub method_identities: Option<MethodLevel>,
    pub agreement: bool,
    pub witness: Option<WitnessReport>,
}

fn bounded(level: Fo2Level) -> Result<Option<usize>> {
    match level {
        Fo2Level::NotFo2 => Ok(None),
        Fo2Level::Level(m) => Ok(Some(m)),
        Fo2Level::Exceeded(bound) => Err(Error::LevelBoundExceeded { bound }),
    }
}

fn witness_report(m: &FiniteMonoid, w: identities::Witness) -> WitnessReport {
    WitnessReport {
        identity: w.identity,
        assignment: w.assignment.iter().map(|&x| m.label(x)).collect(),
    }
}

/// Runs the requested routes on `input`. Disagreement between routes is an
/// [`Error::Inconsistency`].
pub fn analyze(input: &LoadedInput, max_m: usize, method: Method) -> Result<AnalysisReport> {
    let m = &input.monoid;
    let greens = m.greens();
    let quotient = match method {
        Method::Both | Method::Quotient => Some(bounded(varieties::fo2_level(m, max_m)?)?),
        Method::Identities => None,
    };
    let (by_ids, da_witness) = match method {
        Method::Both | Method::Identities => {
            let (level, w) = identities::fo2_level_by_identities(m, max_m, DEFAULT_ASSIGNMENT_CAP)?;
            (Some(bounded(level)?), w)
        }
        Method::Quotient => (None, None),
    };
    if let (Some(q), Some(i)) = (quotient, by_ids) {
        if q != i {
            return Err(Error::Inconsistency(format!(
                "quotient route gives {q:?}, identity route gives {i:?} for {}",
                input.description
            )));
        }
    }
    let fo2_level = quotient.or(by_ids).flatten();
    let witness = match (da_witness, fo2_level) {
        (Some(w), _) => Some(witness_report(m, w)),
        (None, None) => {
            let (x, y) = m
                .da_witness()
                .ok_or_else(|| Error::Inconsistency("the monoid is outside DA but no DA witness exists".into()))?;
            Some(WitnessReport {
                identity: identities::Identity::da().to_string(),
                assignment: vec![m.label(x), m.label(y)],
            })
        }
        (None, Some(level)) if level >= 2 => level_witness(m, level)?,
        _ => None,
    };
    Ok(AnalysisReport {
        input: input.description.clone(),
        dfa_states: input.dfa_states,
        monoid_size: m.size(),
        aperiodic: m.is_aperiodic(),
        in_da: m.is_in_da(),
        j_trivial: greens.is_j_trivial(),
        r_trivial: greens.is_r_trivial(),
        l_trivial: greens.is_l_trivial(),
        fo2_level,
        method_quotient: quotient.map(|level| MethodLevel { level }),
        method_identities: by_ids.map(|level| MethodLevel { level }),
        agreement: true,
        witness,
    })
}

/// Why the level is not `level - 1`: a failing assignment of the `R_level`
/// or `L_level` identity, when the search fits the assignment cap.
fn level_witness(m: &FiniteMonoid, level: usize) -> Result<Option<WitnessReport>> {
    for side in [Side::R, Side::L] {
        match identities::level_counterexample(m, level, side, DEFAULT_ASSIGNMENT_CAP) {
            Ok(Some(w)) => return Ok(Some(witness_report(m, w))),
            Ok(None) => {}
            Err(Error::IdentityCheckTooLarge { .. }) => return Ok(None),
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

fn opt<T: ToString>(v: Option<T>, none: &str) -> String {
    v.map_or_else(|| none.to_string(), |x| x.to_string())
}

impl AnalysisReport {
    pub fn render(&self) -> String {
        let method = |m: &Option<MethodLevel>| match m {
            None => "not run".to_string(),
            Some(MethodLevel { level }) => opt(*level, "not in DA"),
        };
        let witness = match &self.witness {
            None => "none".to_string(),
            Some(w) => {
                let vals: Vec<String> = w
                    .assignment
                    .iter()
                    .enumerate()
                    .map(|(i, v)| format!("x{}={v}", i + 1))
                    .collect();
                format!("{} fails at {}", w.identity, vals.join(", "))
            }
        };
        let mut lines = vec![
            format!("input: {}", self.input),
            format!("dfa states: {}", opt(self.dfa_states, "n/a")),
            format!("monoid size: {}", self.monoid_size),
            format!("aperiodic: {}", self.aperiodic),
            format!("in DA: {}", self.in_da),
            format!("J-trivial: {}", self.j_trivial),
            format!("R-trivial: {}", self.r_trivial),
            format!("L-trivial: {}", self.l_trivial),
            format!("fo2 level: {}", opt(self.fo2_level, "none (not in DA)")),
            format!("quotient route: {}", method(&self.method_quotient)),
            format!("identity route: {}", method(&self.method_identities)),
            format!("agreement: {}", self.agreement),
            format!("witness: {witness}"),
        ];
        lines.push(String::new());
        lines.join("\n")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub input: String,
    pub m: usize,
    pub max_n: usize,
    pub max_len: usize,
    /// Least passing n, null if none up to `max_n`.
    pub n: Option<usize>,
    /// Related words with different images at `max_n`, when no n passes.
    pub counterexample: Option<(String, String)>,
}

pub fn oracle(input: &LoadedInput, m: usize, max_n: usize, max_len: usize, budget: u128) -> Result<OracleReport> {
    if m == 0 || max_n == 0 {
        return Err(Error::InvalidArgument("--m and --max-n must be at least 1".into()));
    }
    let gens = input.monoid.generators().ok_or(Error::NoGenerators)?;
    let mut report = OracleReport {
        input: input.description.clone(),
        m,
        max_n,
        max_len,
        n: None,
        counterexample: None,
    };
    for n in 1..=max_n {
        match rankers::oracle_prop_main(&input.monoid, m, n, max_len, budget)? {
            None => {
                report.n = Some(n);
                report.counterexample = None;
                break;
            }
            Some((u, v)) => {
                report.counterexample = Some((gens.alphabet.format_word(&u), gens.alphabet.format_word(&v)));
            }
        }
    }
    Ok(report)
}

impl OracleReport {
    pub fn render(&self) -> String {
        let mut s = format!(
            "input: {}\nm: {}\nwords up to length {}\n",
            self.input, self.m, self.max_len
        );
        match (self.n, &self.counterexample) {
            (Some(n), _) => s += &format!("least n: {n}\n"),
            (None, Some((u, v))) => {
                s += &format!(
                    "least n: none up to {}\ncounterexample: `{u}` and `{v}` are related but differ in the monoid\n",
                    self.max_n
                )
            }
            (None, None) => s += &format!("least n: none up to {}\n", self.max_n),
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankerReport {
    pub word: String,
    pub ranker: String,
    pub depth: usize,
    pub blocks: usize,
    /// 1-based position, null when undefined.
    pub position: Option<usize>,
    pub condensed: bool,
}

pub fn evaluate_ranker(word: &str, ranker: &str, alphabet: Option<&str>) -> Result<RankerReport> {
    let alphabet = match alphabet {
        Some(a) => parse_alphabet(a)?,
        None => {
            let mut symbols: BTreeSet<String> = word.chars().filter(|c| !c.is_whitespace()).map(String::from).collect();
            for tok in ranker.split_whitespace() {
                let mut chars = tok.chars();
                if matches!(chars.next(), Some('X' | 'Y')) && !chars.as_str().is_empty() {
                    symbols.insert(chars.as_str().to_string());
                }
            }
            if symbols.is_empty() {
                return Err(Error::Syntax {
                    pos: 0,
                    msg: "empty ranker".into(),
                });
            }
            Alphabet::new(symbols)?
        }
    };
    let r = Ranker::parse(ranker, &alphabet)?;
    let u = alphabet.parse_word(word)?;
    Ok(RankerReport {
        word: alphabet.format_word(&u),
        ranker: r.format(&alphabet),
        depth: r.depth(),
        blocks: r.blocks(),
        position: r.eval(&u),
        condensed: r.is_condensed(&u),
    })
}

impl RankerReport {
    pub fn render(&self) -> String {
        format!(
            "word: {}\nranker: {} (depth {}, {} blocks)\nposition: {}\ncondensed: {}\n",
            self.word,
            self.ranker,
            self.depth,
            self.blocks,
            opt(self.position, "undefined"),
            self.condensed
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ElementReport {
    pub index: usize,
    pub label: String,
    pub j: usize,
    pub r: usize,
    pub l: usize,
    pub idempotent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GreensReport {
    pub input: String,
    pub size: usize,
    pub j_classes: usize,
    pub r_classes: usize,
    pub l_classes: usize,
    pub elements: Vec<ElementReport>,
}

/// Renumbers class ids by first occurrence in element order.
fn canonical_ids(raw: &[usize]) -> (Vec<usize>, usize) {
    let mut map = std::collections::HashMap::new();
    let ids = raw
        .iter()
        .map(|c| {
            let fresh = map.len();
            *map.entry(*c).or_insert(fresh)
        })
        .collect();
    (ids, map.len())
}

pub fn greens_report(input: &LoadedInput) -> GreensReport {
    let m = &input.monoid;
    let g = m.greens();
    let (j, nj) = canonical_ids(&g.j_class);
    let (r, nr) = canonical_ids(&g.r_class);
    let (l, nl) = canonical_ids(&g.l_class);
    GreensReport {
        input: input.description.clone(),
        size: m.size(),
        j_classes: nj,
        r_classes: nr,
        l_classes: nl,
        elements: (0..m.size())
            .map(|x| ElementReport {
                index: x,
                label: m.label(x),
                j: j[x],
                r: r[x],
                l: l[x],
                idempotent: m.mul(x, x) == x,
            })
            .collect(),
    }
}

impl GreensReport {
    pub fn render(&self) -> String {
        let mut s = format!(
            "input: {}\nsize: {}\nJ-classes: {}\nR-classes: {}\nL-classes: {}\n",
            self.input, self.size, self.j_classes, self.r_classes, self.l_classes
        );
        let width = self.elements.iter().map(|e| e.label.len()).max().unwrap_or(0).max(7);
        s += &format!(
            "{:>5}  {:<width$}  {:>3} {:>3} {:>3}  idempotent\n",
            "index", "element", "J", "R", "L"
        );
        for e in &self.elements {
            s += &format!(
                "{:>5}  {:<width$}  {:>3} {:>3} {:>3}  {}\n",
                e.index,
                e.label,
                e.j,
                e.r,
                e.l,
                if e.idempotent { "*" } else { "" }
            );
        }
        s
    }
}

fn emit<T: Serialize>(out: &mut dyn Write, value: &T, json: bool, text: impl FnOnce(&T) -> String) -> Result<()> {
    let body = if json {
        let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Inconsistency(e.to_string()))?;
        s.push('\n');
        s
    } else {
        text(value)
    };
    out.write_all(body.as_bytes())
        .map_err(|e| Error::InvalidArgument(format!("cannot write output: {e}")))
}

/// Executes a parsed command. `Ok(code)` covers commands that completed but
/// report a failure through their exit code.
pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Analyze(a) => {
            let input = load_input(&a.input)?;
            let report = analyze(&input, a.max_m, a.method)?;
            emit(out, &report, a.json, AnalysisReport::render)?;
        }
        Command::Oracle(a) => {
            let input = load_input(&a.input)?;
            let report = oracle(&input, a.m, a.max_n, a.max_len, a.budget)?;
            emit(out, &report, a.json, OracleReport::render)?;
        }
        Command::Rankers(a) => {
            let report = evaluate_ranker(&a.word, &a.ranker, a.alphabet.as_deref())?;
            emit(out, &report, a.json, RankerReport::render)?;
        }
        Command::Greens(a) => {
            let input = load_input(&a.input)?;
            emit(out, &greens_report(&input), a.json, GreensReport::render)?;
        }
        Command::Corpus(a) => {
            let config = CorpusConfig {
                seed: a.seed,
                count: a.count,
                max_states: a.max_states,
                letters: a.letters,
                da_only: a.da_only,
                max_level: a.max_m,
            };
            let report = corpus::run(&config)?;
            emit(out, &report, a.json, |r| r.render())?;
            if !report.all_passed() {
                return Ok(2);
            }
        }
    }
    Ok(0)
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code: 0 ok, 1 usage or parse error, 2 inconsistency, 3 budget.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
