use super::formula::{alpha, build_statne_formula, FormulaError};
use super::support::{enumerate_supports, support_count, Support};
use crate::analysis::{verify_ne, AnalysisError, Thresholds};
use crate::game::InitializedGame;
use crate::profile::StationaryProfile;
use crate::rational::{parse_rational, Rational};
use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;

/// How to run the external real-arithmetic solver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    /// command line with a `{file}` placeholder for the query file
    pub command: String,
    /// number of solver processes run at once
    pub jobs: usize,
    /// directory that keeps the query files; a temporary one otherwise
    pub keep_dir: Option<PathBuf>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            command: "z3 {file}".into(),
            jobs: 1,
            keep_dir: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("external solver `{0}` is not available")]
    Unavailable(String),
    #[error("solver gave an unusable answer for support #{index}: {message}")]
    Malformed { index: u64, message: String },
    #[error("cannot write query file: {0}")]
    Io(String),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

/// A value from a solver model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelValue {
    Rational(Rational),
    /// an irrational algebraic number, kept as the solver printed it
    Algebraic(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WitnessCheck {
    /// the model's profile re-passes the equilibrium check
    Verified,
    Failed,
    /// the model uses irrational values, which the exact checker cannot take
    SkippedIrrational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportReport {
    pub index: u64,
    pub support: Support,
    pub profile: Option<StationaryProfile>,
    pub witness: WitnessCheck,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StatNeOutcome {
    Found(SupportReport),
    NotFound { supports: u64 },
    CapExceeded { count: BigUint },
}

enum Answer {
    Sat(BTreeMap<String, ModelValue>),
    Unsat,
}

/// Tries every support in enumeration order and asks the external solver
/// whether its sentence is satisfiable. Batches of `jobs` queries run
/// concurrently; the earliest satisfiable support in enumeration order wins.
pub fn solve_statne(
    ig: &InitializedGame,
    t: &Thresholds,
    config: &SolverConfig,
    cap: u64,
) -> Result<StatNeOutcome, SolverError> {
    let count = support_count(ig);
    if count.to_u64().map_or(true, |c| c > cap) {
        return Ok(StatNeOutcome::CapExceeded { count });
    }
    let temp;
    let dir: &Path = match &config.keep_dir {
        Some(d) => {
            std::fs::create_dir_all(d).map_err(|e| SolverError::Io(e.to_string()))?;
            d
        }
        None => {
            temp = tempfile::tempdir().map_err(|e| SolverError::Io(e.to_string()))?;
            temp.path()
        }
    };
    let jobs = config.jobs.max(1);
    let mut supports = enumerate_supports(ig).enumerate().peekable();
    let mut checked = 0u64;
    while supports.peek().is_some() {
        let batch: Vec<(usize, Support)> = supports.by_ref().take(jobs).collect();
        let mut files = Vec::with_capacity(batch.len());
        for (k, s) in &batch {
            let f = build_statne_formula(ig, t, s)?;
            let path = dir.join(format!("support_{k:06}.smt2"));
            std::fs::write(&path, f.to_smtlib()).map_err(|e| SolverError::Io(e.to_string()))?;
            files.push(path);
        }
        let answers: Vec<Result<Answer, SolverError>> = std::thread::scope(|scope| {
            let handles: Vec<_> = batch
                .iter()
                .zip(&files)
                .map(|((k, _), path)| scope.spawn(move || run_solver(&config.command, path, *k as u64)))
                .collect();
            handles.into_iter().map(|h| h.join().expect("solver thread")).collect()
        });
        for ((k, s), answer) in batch.into_iter().zip(answers) {
            checked += 1;
            match answer? {
                Answer::Unsat => {}
                Answer::Sat(model) => {
                    let profile = profile_from_model(ig, &model);
                    let witness = match &profile {
                        None => WitnessCheck::SkippedIrrational,
                        Some(p) => {
                            if verify_ne(ig, p, t)?.accepted() {
                                WitnessCheck::Verified
                            } else {
                                WitnessCheck::Failed
                            }
                        }
                    };
                    return Ok(StatNeOutcome::Found(SupportReport {
                        index: k as u64,
                        support: s,
                        profile,
                        witness,
                    }));
                }
            }
        }
    }
    Ok(StatNeOutcome::NotFound { supports: checked })
}

/// Asks the solver about a single support. `Some(model)` means the
/// support carries an equilibrium within the thresholds.
pub fn query_support(
    ig: &InitializedGame,
    t: &Thresholds,
    s: &Support,
    command: &str,
) -> Result<Option<BTreeMap<String, ModelValue>>, SolverError> {
    let dir = tempfile::tempdir().map_err(|e| SolverError::Io(e.to_string()))?;
    let path = dir.path().join("support.smt2");
    std::fs::write(&path, build_statne_formula(ig, t, s)?.to_smtlib()).map_err(|e| SolverError::Io(e.to_string()))?;
    match run_solver(command, &path, 0)? {
        Answer::Sat(model) => Ok(Some(model)),
        Answer::Unsat => Ok(None),
    }
}

fn run_solver(template: &str, file: &Path, index: u64) -> Result<Answer, SolverError> {
    let path = file.display().to_string();
    let mut words: Vec<String> = template.split_whitespace().map(|w| w.replace("{file}", &path)).collect();
    if words.is_empty() {
        return Err(SolverError::Unavailable(template.to_string()));
    }
    if !template.contains("{file}") {
        words.push(path);
    }
    let output = Command::new(&words[0]).args(&words[1..]).output().map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound || e.kind() == std::io::ErrorKind::PermissionDenied {
            SolverError::Unavailable(words[0].clone())
        } else {
            SolverError::Io(e.to_string())
        }
    })?;
    let text = String::from_utf8_lossy(&output.stdout);
    let mut lines = text.lines().skip_while(|l| l.trim().is_empty());
    let malformed = |message: String| SolverError::Malformed { index, message };
    match lines.next().map(str::trim) {
        Some("sat") => {
            let rest: Vec<&str> = lines.collect();
            Ok(Answer::Sat(parse_model(&rest.join("\n")).map_err(malformed)?))
        }
        Some("unsat") => Ok(Answer::Unsat),
        Some("unknown") => Err(malformed("solver answered unknown".into())),
        Some(other) => Err(malformed(format!("unexpected first line `{other}`"))),
        None => Err(malformed(format!(
            "empty output (stderr: {})",
            String::from_utf8_lossy(&output.stderr).trim()
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

impl Sexp {
    fn render(&self) -> String {
        match self {
            Sexp::Atom(a) => a.clone(),
            Sexp::List(xs) => format!("({})", xs.iter().map(Sexp::render).collect::<Vec<_>>().join(" ")),
        }
    }
}

fn parse_sexps(text: &str) -> Result<Vec<Sexp>, String> {
    let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '(' => stack.push(Vec::new()),
            ')' => {
                let done = stack.pop().ok_or("unbalanced `)`")?;
                stack.last_mut().ok_or("unbalanced `)`")?.push(Sexp::List(done));
            }
            ';' => {
                for c in chars.by_ref() {
                    if c == '\n' {
                        break;
                    }
                }
            }
            c if c.is_whitespace() => {}
            '|' | '"' => {
                let mut s = String::from(c);
                for d in chars.by_ref() {
                    s.push(d);
                    if d == c {
                        break;
                    }
                }
                stack.last_mut().unwrap().push(Sexp::Atom(s));
            }
            c => {
                let mut s = String::from(c);
                while let Some(&d) = chars.peek() {
                    if d.is_whitespace() || d == '(' || d == ')' {
                        break;
                    }
                    s.push(d);
                    chars.next();
                }
                stack.last_mut().unwrap().push(Sexp::Atom(s));
            }
        }
    }
    if stack.len() != 1 {
        return Err("unbalanced `(`".into());
    }
    Ok(stack.pop().unwrap())
}

fn decimal(s: &str) -> Option<Rational> {
    match s.split_once('.') {
        None => parse_rational(s).ok(),
        Some((int, frac)) => {
            let digits = format!("{int}{frac}");
            let n: BigInt = digits.parse().ok()?;
            let d = BigInt::from(10u32).pow(frac.len() as u32);
            Some(Rational::new(n, d))
        }
    }
}

fn value(e: &Sexp) -> Option<Rational> {
    match e {
        Sexp::Atom(a) => decimal(a),
        Sexp::List(xs) => match xs.as_slice() {
            [Sexp::Atom(op), a] if op == "-" => Some(-value(a)?),
            [Sexp::Atom(op), a, b] if op == "/" => {
                let d = value(b)?;
                if d.is_zero() {
                    None
                } else {
                    Some(value(a)? / d)
                }
            }
            [Sexp::Atom(op), a, b] if op == "-" => Some(value(a)? - value(b)?),
            [Sexp::Atom(op), rest @ ..] if op == "+" => rest.iter().map(value).sum(),
            [Sexp::Atom(op), rest @ ..] if op == "*" => rest.iter().map(value).product(),
            _ => None,
        },
    }
}

/// Reads `(define-fun name () Real value)` entries of a solver model.
/// Rational values are exact; anything else (such as `root-obj`) is kept
/// as text.
pub fn parse_model(text: &str) -> Result<BTreeMap<String, ModelValue>, String> {
    fn walk(e: &Sexp, out: &mut BTreeMap<String, ModelValue>) {
        if let Sexp::List(xs) = e {
            if let [Sexp::Atom(head), Sexp::Atom(name), Sexp::List(args), _sort, body] = xs.as_slice() {
                if head == "define-fun" && args.is_empty() {
                    let v = match value(body) {
                        Some(q) => ModelValue::Rational(q),
                        None => ModelValue::Algebraic(body.render()),
                    };
                    out.insert(name.trim_matches('|').to_string(), v);
                    return;
                }
            }
            for x in xs {
                walk(x, out);
            }
        }
    }
    let mut out = BTreeMap::new();
    for e in parse_sexps(text)? {
        walk(&e, &mut out);
    }
    Ok(out)
}

/// The stationary profile encoded by the `alpha` variables of a model, if
/// all of them are rational.
pub fn profile_from_model(ig: &InitializedGame, model: &BTreeMap<String, ModelValue>) -> Option<StationaryProfile> {
    let mut dists = BTreeMap::new();
    for v in ig.owned_vertices() {
        let mut d = BTreeMap::new();
        for &w in ig.successors(v) {
            match model.get(&alpha(v, w))? {
                ModelValue::Rational(q) => d.insert(w, q.clone()),
                ModelValue::Algebraic(_) => return None,
            };
        }
        dists.insert(v, d);
    }
    StationaryProfile::new(ig, &dists).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn reads_rational_and_algebraic_values() {
        let text = r#"(
  (define-fun alpha_2_4 () Real
    (/ 1.0 2.0))
  (define-fun z_0_0 () Real
    1.0)
  (define-fun r_1_3 () Real
    (- (/ 3.0 4.0)))
  (define-fun x () Real
    (root-obj (+ (^ x 2) (- 2)) 2))
)"#;
        let m = parse_model(text).unwrap();
        assert_eq!(m["alpha_2_4"], ModelValue::Rational(ratio(1, 2)));
        assert_eq!(m["z_0_0"], ModelValue::Rational(int(1)));
        assert_eq!(m["r_1_3"], ModelValue::Rational(ratio(-3, 4)));
        assert!(matches!(m["x"], ModelValue::Algebraic(_)));
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(decimal("0.125"), Some(ratio(1, 8)));
        assert_eq!(decimal("3"), Some(int(3)));
    }

    #[test]
    fn missing_binary_is_unavailable() {
        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("q.smt2");
        std::fs::write(&f, "(check-sat)\n").unwrap();
        assert!(matches!(
            run_solver("definitely-not-a-solver-binary {file}", &f, 0),
            Err(SolverError::Unavailable(_))
        ));
    }

    #[test]
    fn unknown_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("q.smt2");
        std::fs::write(&f, "").unwrap();
        let script = |name: &str, answer: &str| {
            use std::os::unix::fs::PermissionsExt;
            let p = dir.path().join(name);
            std::fs::write(&p, format!("#!/bin/sh\necho {answer}\n")).unwrap();
            std::fs::set_permissions(&p, std::fs::Permissions::from_mode(0o755)).unwrap();
            format!("{} {{file}}", p.display())
        };
        assert!(matches!(
            run_solver(&script("a.sh", "unknown"), &f, 3),
            Err(SolverError::Malformed { index: 3, .. })
        ));
        assert!(matches!(run_solver(&script("b.sh", "unsat"), &f, 0), Ok(Answer::Unsat)));
    }
}
