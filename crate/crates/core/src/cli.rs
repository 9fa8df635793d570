//! The `freerot` command line.
//!
//! Exit status: 0 when everything holds, 1 when a verification fails,
//! 2 for usage and parse errors.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::freeness::{
    certify_mod3_machine, check_injectivity_upto, check_nonidentity_upto, invariant_exact,
    partition_census, InjectivityReport, Mod3State, NonidentityReport, PartitionReport, Violation,
};
use crate::rotmap::{check_rotation_axioms_upto, rotation, RotationAxiomsReport};
use crate::suites::{self, SuiteOutcome};
use crate::words::{
    compose, count_reduced, enumerate, inverse, parse_words, reduce, ParseWordsError,
    ReducedWord, Word,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Group,
    RotationAxioms,
    Freeness,
    Injectivity,
    All,
}

/// Exact free group of rotations: word algebra, rotation matrices and
/// verification suites.
#[derive(Debug, Parser)]
#[command(name = "freerot", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Write output to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct WordInput {
    /// A word over a/A/b/B (uppercase = inverse); `-` reads a listing from stdin.
    #[arg(allow_hyphen_values = true)]
    pub word: Option<String>,

    /// Read a listing (one word per line, `#` comments) from FILE.
    #[arg(long, short, value_name = "FILE", conflicts_with = "word")]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Freely reduce each word.
    Reduce(WordInput),
    /// Flip and reverse each word (no reduction).
    Inverse(WordInput),
    /// Group product of two reduced words.
    Compose { x: String, y: String },
    /// Exact rotation matrix of a word (reduced first).
    Rotation { word: String },
    /// Scaled integer image of (0,1,0) under a word's rotation.
    Invariant { word: String },
    /// List every reduced word of the given length.
    Enumerate { length: usize },
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Length bound for the exhaustive checks.
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..=16))]
        max_len: u64,
        /// Worker threads for the exhaustive checks.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        jobs: u64,
        /// Seed for the randomized suites.
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{source_name}: {err}")]
    Parse {
        source_name: String,
        err: ParseWordsError,
    },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse { .. } | CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_FAILED,
        }
    }
}

/// Rendered output plus the exit status it implies.
pub struct Output {
    pub body: String,
    pub status: u8,
}

fn ok(body: String) -> Output {
    Output {
        body,
        status: EXIT_OK,
    }
}

fn parse_listing(source_name: &str, text: &str) -> Result<Vec<Word>, CliError> {
    parse_words(text).map_err(|err| CliError::Parse {
        source_name: source_name.to_string(),
        err,
    })
}

fn parse_single(text: &str) -> Result<Word, CliError> {
    if text.contains('\n') {
        return Err(CliError::Usage("inline word must be a single line".into()));
    }
    let mut words = parse_listing("<argument>", text)?;
    Ok(words.pop().unwrap_or_default())
}

fn parse_reduced(text: &str) -> Result<ReducedWord, CliError> {
    ReducedWord::try_from(parse_single(text)?)
        .map_err(|e| CliError::Usage(format!("{text:?} is not reduced: {e}")))
}

fn read_input(input: &WordInput, stdin: &mut dyn Read) -> Result<Vec<Word>, CliError> {
    match (&input.word, &input.input) {
        (Some(w), None) if w == "-" => {
            let mut text = String::new();
            stdin.read_to_string(&mut text)?;
            parse_listing("<stdin>", &text)
        }
        (Some(w), None) => Ok(vec![parse_single(w)?]),
        (None, Some(path)) => {
            let text = fs::read_to_string(path)?;
            parse_listing(&path.display().to_string(), &text)
        }
        _ => Err(CliError::Usage("expected a WORD, `-`, or --input FILE".into())),
    }
}

fn lines<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().fold(String::new(), |mut s, x| {
        let _ = writeln!(s, "{}", x.to_string());
        s
    })
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string(v).expect("values serialize");
    s.push('\n');
    s
}

/// Indented form for the (larger) verification reports.
fn to_json_pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

/// Runs one command and renders its output.
pub fn run(cli: &Cli, stdin: &mut dyn Read) -> Result<Output, CliError> {
    let fmt = cli.format;
    match &cli.command {
        Command::Reduce(input) => {
            let words = read_input(input, stdin)?;
            let reduced: Vec<ReducedWord> = words.iter().map(reduce).collect();
            Ok(ok(match fmt {
                Format::Text => lines(&reduced),
                Format::Json => to_json(
                    &words
                        .iter()
                        .zip(&reduced)
                        .map(|(w, r)| json!({"input": w.to_string(), "reduced": r.to_string()}))
                        .collect::<Vec<_>>(),
                ),
            }))
        }
        Command::Inverse(input) => {
            let words = read_input(input, stdin)?;
            let inverses: Vec<Word> = words.iter().map(inverse).collect();
            Ok(ok(match fmt {
                Format::Text => lines(&inverses),
                Format::Json => to_json(
                    &words
                        .iter()
                        .zip(&inverses)
                        .map(|(w, r)| json!({"input": w.to_string(), "inverse": r.to_string()}))
                        .collect::<Vec<_>>(),
                ),
            }))
        }
        Command::Compose { x, y } => {
            let (x, y) = (parse_reduced(x)?, parse_reduced(y)?);
            let xy = compose(&x, &y);
            Ok(ok(match fmt {
                Format::Text => format!("{xy}\n"),
                Format::Json => to_json(&json!({
                    "x": x.to_string(), "y": y.to_string(), "composed": xy.to_string()
                })),
            }))
        }
        Command::Rotation { word } => {
            let w = parse_single(word)?;
            let r = reduce(&w);
            let m = rotation(&r);
            Ok(ok(match fmt {
                Format::Text => m.pretty(),
                Format::Json => to_json(&json!({
                    "word": w.to_string(),
                    "reduced": r.to_string(),
                    "matrix": m,
                    "det": m.det(),
                    "is_rotation": m.is_rotation(),
                })),
            }))
        }
        Command::Invariant { word } => {
            let r = reduce(&parse_single(word)?);
            let t = invariant_exact(&r).map_err(|e| CliError::Usage(e.to_string()))?;
            let cls = t.residues();
            Ok(ok(match fmt {
                Format::Text => format!(
                    "{} mod 3 = ({}, {}, {})\n",
                    t.value, cls[0], cls[1], cls[2]
                ),
                Format::Json => to_json(&json!({
                    "word": r.to_string(),
                    "length": t.length,
                    "triple": t.value,
                    "mod3": cls,
                })),
            }))
        }
        Command::Enumerate { length } => {
            if count_reduced(*length) > 50_000_000 {
                return Err(CliError::Usage(format!("length {length} is too large to list")));
            }
            let words = enumerate(*length);
            Ok(ok(match fmt {
                Format::Text => lines(&words),
                Format::Json => to_json(&words.iter().map(ToString::to_string).collect::<Vec<_>>()),
            }))
        }
        Command::Verify {
            suite,
            max_len,
            jobs,
            seed,
        } => {
            let report = verify(*suite, *max_len as usize, *jobs as usize, *seed);
            let status = if report.passed { EXIT_OK } else { EXIT_FAILED };
            let body = match fmt {
                Format::Text => report.text(),
                Format::Json => to_json_pretty(&report),
            };
            Ok(Output { body, status })
        }
    }
}

/// Sizes of the randomized suites run by `verify`.
pub mod trials {
    pub const GROUP: u64 = 10_000;
    pub const GROUP_MAX_LEN: usize = 40;
    pub const REDUCTION: u64 = 100_000;
    pub const REDUCTION_MAX_LEN: usize = 100;
    pub const FUSION: u64 = 10_000;
    pub const FUSION_MAX_LEN: usize = 40;
    pub const HOMOMORPHISM: u64 = 10_000;
    pub const HOMOMORPHISM_MAX_LEN: usize = 15;
    pub const MATRIX_LEMMAS: u64 = 1_000;
    pub const MATRIX_LEMMAS_MAX_LEN: usize = 10;
    pub const INJECTIVITY_SPOT_CHECKS: usize = 1_000;
}

#[derive(Debug, Serialize)]
pub struct CountCheck {
    pub length: usize,
    pub expected: u64,
    pub enumerated: u64,
}

#[derive(Debug, Default, Serialize)]
pub struct GroupSection {
    pub suites: Vec<SuiteOutcome>,
    pub counts: Vec<CountCheck>,
}

#[derive(Debug, Serialize)]
pub struct RotationSection {
    pub axioms: RotationAxiomsReport,
    pub suites: Vec<SuiteOutcome>,
}

/// Exhaustive walk plus the all-lengths certificate.
#[derive(Debug, Serialize)]
pub struct FreenessSection {
    pub max_len: usize,
    pub words_checked: std::collections::BTreeMap<usize, u64>,
    pub total_checked: u64,
    pub violations: Vec<Violation>,
    pub observed_states: Vec<Mod3State>,
    pub reachable_states: Vec<Mod3State>,
    pub witness_paths: std::collections::BTreeMap<String, String>,
    pub step_table_verified: bool,
    pub certificate_holds: bool,
}

impl FreenessSection {
    fn build(walk: NonidentityReport) -> Self {
        let cert = certify_mod3_machine();
        let mut violations = walk.violations;
        violations.extend(cert.replay());
        if let Some(w) = &cert.counterexample {
            violations.push(Violation::ZeroClass {
                word: w.clone(),
                triple: invariant_exact(w).map(|t| t.value).unwrap_or_default(),
            });
        }
        for s in &walk.observed_states {
            if !cert.contains(s) {
                // the walk saw a state the machine claims is unreachable
                violations.push(Violation::ReplayMismatch {
                    state: *s,
                    witness: ReducedWord::empty(),
                });
            }
        }
        FreenessSection {
            max_len: walk.max_len,
            words_checked: walk.words_checked,
            total_checked: walk.total_checked,
            observed_states: walk.observed_states.into_iter().collect(),
            reachable_states: cert.reachable_states.clone(),
            witness_paths: cert
                .witness_paths
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
            step_table_verified: cert.step_table_verified,
            certificate_holds: cert.holds(),
            violations,
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.certificate_holds
    }
}

#[derive(Debug, Serialize)]
pub struct InjectivitySection {
    pub injectivity: InjectivityReport,
    pub partition: PartitionReport,
}

/// Everything `verify` ran. Timing and worker count are deliberately left
/// out of the serialized form so output only depends on the inputs.
#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub max_len: usize,
    pub seed: u64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rotation_axioms: Option<RotationSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub freeness: Option<FreenessSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub injectivity: Option<InjectivitySection>,
    #[serde(skip)]
    pub elapsed_secs: f64,
}

impl VerifyReport {
    pub fn text(&self) -> String {
        let mut s = String::new();
        let verdict = |p: bool| if p { "PASS" } else { "FAIL" };
        let suite_line = |s: &mut String, o: &SuiteOutcome| {
            let _ = writeln!(
                s,
                "  {:<20} {:>7} trials  {:>3} failures  {}",
                o.name,
                o.trials,
                o.failure_count,
                verdict(o.passed())
            );
            for f in &o.failures {
                let _ = writeln!(s, "    counterexample: {f}");
            }
        };
        let _ = writeln!(s, "verify {} (max-len {}, seed {})", self.suite, self.max_len, self.seed);
        if let Some(g) = &self.group {
            let _ = writeln!(s, "group:");
            g.suites.iter().for_each(|o| suite_line(&mut s, o));
            let bad = g.counts.iter().filter(|c| c.expected != c.enumerated).count();
            let _ = writeln!(
                s,
                "  {:<20} lengths 1..={}  {}",
                "word counts",
                g.counts.len(),
                verdict(bad == 0)
            );
        }
        if let Some(r) = &self.rotation_axioms {
            let _ = writeln!(s, "rotation-axioms:");
            let _ = writeln!(
                s,
                "  {:<20} {:>7} words   {:>3} failures  {}",
                "exhaustive",
                r.axioms.words_checked,
                r.axioms.failures.len(),
                verdict(r.axioms.passed())
            );
            for f in &r.axioms.failures {
                let _ = writeln!(s, "    counterexample: {f}");
            }
            r.suites.iter().for_each(|o| suite_line(&mut s, o));
        }
        if let Some(f) = &self.freeness {
            let _ = writeln!(s, "freeness:");
            let _ = writeln!(
                s,
                "  {:<20} {:>7} words   {:>3} violations {}",
                "exhaustive",
                f.total_checked,
                f.violations.len(),
                verdict(f.violations.is_empty())
            );
            let _ = writeln!(
                s,
                "  {:<20} {:>7} states  zero class unreachable: {}  {}",
                "mod-3 machine",
                f.reachable_states.len(),
                f.certificate_holds,
                verdict(f.certificate_holds)
            );
            for v in &f.violations {
                let _ = writeln!(s, "    counterexample: {v}");
            }
        }
        if let Some(i) = &self.injectivity {
            let _ = writeln!(s, "injectivity:");
            let _ = writeln!(
                s,
                "  {:<20} {:>7} words   {:>7} distinct  {}",
                "images",
                i.injectivity.words,
                i.injectivity.distinct_matrices,
                verdict(i.injectivity.passed())
            );
            let sizes: Vec<String> = i.partition.buckets.values().map(u64::to_string).collect();
            let _ = writeln!(
                s,
                "  {:<20} buckets [{}]  {}",
                "partition",
                sizes.join(", "),
                verdict(i.partition.passed())
            );
            for v in i.injectivity.violations.iter().chain(&i.partition.violations) {
                let _ = writeln!(s, "    counterexample: {v}");
            }
        }
        let _ = writeln!(s, "result: {}", verdict(self.passed));
        s
    }
}

/// Runs the requested suite(s).
pub fn verify(suite: Suite, max_len: usize, jobs: usize, seed: u64) -> VerifyReport {
    let start = Instant::now();
    let want = |s: Suite| suite == s || suite == Suite::All;

    let group = want(Suite::Group).then(|| GroupSection {
        suites: vec![
            suites::group_axioms(seed, trials::GROUP, trials::GROUP_MAX_LEN),
            suites::reduction_oracle(seed, trials::REDUCTION, trials::REDUCTION_MAX_LEN),
            suites::fix_fusion(seed, trials::FUSION, trials::FUSION_MAX_LEN),
        ],
        counts: (1..=max_len)
            .map(|n| CountCheck {
                length: n,
                expected: 4 * 3u64.pow(n as u32 - 1),
                enumerated: enumerate(n).len() as u64,
            })
            .collect(),
    });
    let rotation_axioms = want(Suite::RotationAxioms).then(|| RotationSection {
        axioms: check_rotation_axioms_upto(max_len),
        suites: vec![
            suites::homomorphism(seed, trials::HOMOMORPHISM, trials::HOMOMORPHISM_MAX_LEN),
            suites::matrix_lemmas(seed, trials::MATRIX_LEMMAS, trials::MATRIX_LEMMAS_MAX_LEN),
        ],
    });
    let freeness = want(Suite::Freeness)
        .then(|| FreenessSection::build(check_nonidentity_upto(max_len, jobs)));
    let injectivity = want(Suite::Injectivity).then(|| InjectivitySection {
        injectivity: check_injectivity_upto(max_len, jobs, seed, trials::INJECTIVITY_SPOT_CHECKS),
        partition: partition_census(max_len, jobs),
    });

    let passed = group.as_ref().is_none_or(|g| {
        g.suites.iter().all(SuiteOutcome::passed) && g.counts.iter().all(|c| c.expected == c.enumerated)
    }) && rotation_axioms
        .as_ref()
        .is_none_or(|r| r.axioms.passed() && r.suites.iter().all(SuiteOutcome::passed))
        && freeness.as_ref().is_none_or(FreenessSection::passed)
        && injectivity
            .as_ref()
            .is_none_or(|i| i.injectivity.passed() && i.partition.passed());

    VerifyReport {
        suite: suite
            .to_possible_value()
            .map(|v| v.get_name().to_string())
            .unwrap_or_default(),
        max_len,
        seed,
        passed,
        group,
        rotation_axioms,
        freeness,
        injectivity,
        elapsed_secs: start.elapsed().as_secs_f64(),
    }
}

/// Parses `args`, runs, writes output to `--out` or `stdout`, and returns the
/// exit status. Diagnostics go to `stderr`.
pub fn main_with<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
            } else {
                let _ = write!(stdout, "{rendered}");
            }
            return code;
        }
    };
    match run(&cli, stdin) {
        Ok(out) => {
            let written = match &cli.out {
                Some(path) => fs::write(path, &out.body),
                None => stdout.write_all(out.body.as_bytes()),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_FAILED;
            }
            out.status
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str], stdin: &str) -> (u8, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut input = stdin.as_bytes();
        let code = main_with(
            std::iter::once("freerot").chain(args.iter().copied()),
            &mut input,
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn reduce_inline_and_stdin() {
        assert_eq!(run_args(&["reduce", "aA"], ""), (0, "\n".into(), String::new()));
        assert_eq!(run_args(&["reduce", "abB"], "").1, "a\n");
        assert_eq!(run_args(&["reduce", "-"], "abbB\n# c\n\nBb\n").1, "ab\n\n\n");
    }

    #[test]
    fn parse_errors_exit_2_with_position() {
        let (code, _, err) = run_args(&["reduce", "-"], "ab\nabx\n");
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("line 2, column 3"), "{err}");
        let (code, _, _) = run_args(&["rotation", "q"], "");
        assert_eq!(code, EXIT_USAGE);
        let (code, _, _) = run_args(&["verify", "everything"], "");
        assert_eq!(code, EXIT_USAGE);
        let (code, _, _) = run_args(&["verify", "group", "--max-len", "0"], "");
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn compose_requires_reduced_operands() {
        assert_eq!(run_args(&["compose", "abb", "B"], "").1, "ab\n");
        assert_eq!(run_args(&["compose", "aA", "b"], "").0, EXIT_USAGE);
    }

    #[test]
    fn invariant_command() {
        assert_eq!(run_args(&["invariant", "b"], "").1, "(-2, 1, 0) mod 3 = (1, 1, 0)\n");
    }

    #[test]
    fn verify_small_json_is_job_independent() {
        let a = run_args(&["verify", "freeness", "--max-len", "4", "--jobs", "1", "--format", "json"], "");
        let b = run_args(&["verify", "freeness", "--max-len", "4", "--jobs", "3", "--format", "json"], "");
        assert_eq!(a.0, 0);
        assert_eq!(a.1, b.1);
        let v: serde_json::Value = serde_json::from_str(&a.1).unwrap();
        assert_eq!(v["freeness"]["total_checked"], 160);
        assert_eq!(v["freeness"]["violations"], serde_json::json!([]));
    }
}
