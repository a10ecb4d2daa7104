//! Command-line front end.
//!
//! [`run`] takes the full argument vector and two output streams and
//! returns the process exit code, so the binary is a thin wrapper and the
//! whole front end can be driven from tests.
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | verification failed |
//! | 2 | bad input (flags, files, malformed systems or targets) |
//! | 3 | problem not solvable (uncontrollable, rank-deficient `B`, degree too high, eigenvalue collision) |
//! | 4 | internal error |
//!
//! Every failure writes one JSON line to the diagnostic stream. With
//! `--json`, standard output carries a JSON document for every exit code.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use crate::assigner::{
    assign_zeros, eigenvalue_collision, fmt_complex, verify_assignment, AssignmentReport,
    AssignmentRequest, CollisionPolicy, Target, Verification,
};
use crate::error::Error;
use crate::numkit::{format_sig, rank, Matrix, Polynomial, Tolerance};
use crate::placement::RandomPolicy;
use crate::serde_util;
use crate::sysmodel::{
    controllable, eigenvalues, invariant_zeros, load_system, observable, StateSpaceSystem,
    ZeroReport,
};

#[derive(Parser, Debug)]
#[command(
    name = "zeroassign",
    version,
    about = "Assign invariant zeros by choosing the output matrix"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize H so that (A, B, H) has the target zeros.
    Synth(SynthArgs),
    /// Compute the invariant zeros of a system with H present.
    Zeros(CommonArgs),
    /// Report controllability, rank B, eigenvalues and solvability.
    Check(CheckArgs),
    /// Compare the zeros of a system with H present against a target.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// System file (JSON with keys A, B and optionally H).
    #[arg(long, value_name = "PATH")]
    system: PathBuf,
    /// Relative singular-value threshold for rank decisions.
    #[arg(long)]
    tol_rank: Option<f64>,
    /// Root matching tolerance.
    #[arg(long)]
    tol_root: Option<f64>,
    /// Emit JSON on standard output.
    #[arg(long)]
    json: bool,
    /// Also write the JSON report to this file.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct TargetArgs {
    /// Target polynomial, ascending coefficients "b0,b1,...".
    #[arg(long, allow_hyphen_values = true)]
    poly: Option<String>,
    /// Target zeros "z1,z2,...", real or a+bi / a-bi / a±bi.
    #[arg(long, allow_hyphen_values = true)]
    zeros: Option<String>,
}

#[derive(Args, Debug)]
#[group(required = false, multiple = false)]
struct OptionalTargetArgs {
    /// Target polynomial, ascending coefficients "b0,b1,...".
    #[arg(long, allow_hyphen_values = true)]
    poly: Option<String>,
    /// Target zeros "z1,z2,...", real or a+bi / a-bi / a±bi.
    #[arg(long, allow_hyphen_values = true)]
    zeros: Option<String>,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    target: TargetArgs,
    /// Seed for the random search directions.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Warn instead of failing when a target zero is an eigenvalue of A.
    #[arg(long)]
    allow_eig_collision: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    target: TargetArgs,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    target: OptionalTargetArgs,
}

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    kind: String,
    message: String,
}

impl Failure {
    fn input(kind: &str, message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            kind: kind.to_string(),
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: exit_code(&e),
            kind: e.kind().to_string(),
            message: e.to_string(),
        }
    }
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    use Error::*;
    match e {
        VerificationFailed(_) => 1,
        Parse { .. }
        | DimensionMismatch(_)
        | NonSquareMatrix { .. }
        | NonFinite { .. }
        | NotSquare { .. }
        | MissingOutput
        | DegenerateSystem
        | InvalidPolicy(_)
        | InvalidTarget(_)
        | ZeroTargetPolynomial
        | ZeroPolynomial => 2,
        Uncontrollable { .. }
        | RankDeficientB { .. }
        | DegreeTooHigh { .. }
        | EigenvalueCollision { .. } => 3,
        SingularMatrix
        | DegreeOverflow { .. }
        | ZeroVector
        | SingularB2
        | AttemptsExhausted { .. }
        | NoConvergence { .. } => 4,
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: &'a str,
    exit_code: i32,
}

#[derive(Serialize)]
struct ErrorDoc<'a> {
    error: ErrorBody<'a>,
}

fn error_line(kind: &str, message: &str, code: i32) -> String {
    serde_json::to_string(&ErrorDoc {
        error: ErrorBody {
            kind,
            message,
            exit_code: code,
        },
    })
    .expect("error serialization cannot fail")
}

/// What a subcommand produced: a JSON document, a human rendering, and
/// the exit code (nonzero when a check ran but came out negative).
struct Outcome {
    json: String,
    human: String,
    code: i32,
    diagnostic: Option<(String, String)>,
}

/// Runs the CLI on `argv` (including the program name).
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let json = argv.iter().any(|a| a == "--json");
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{}", e.render());
                return 0;
            }
            let message = e.render().to_string();
            let first = message.lines().next().unwrap_or("invalid arguments");
            let first = first.trim_start_matches("error: ");
            return report_failure(&Failure::input("UsageError", first), json, stdout, stderr);
        }
    };

    let (common, result) = match &cli.command {
        Command::Synth(a) => (&a.common, synth(a)),
        Command::Zeros(a) => (a, zeros(a)),
        Command::Check(a) => (&a.common, check(a)),
        Command::Verify(a) => (&a.common, verify(a)),
    };
    match result {
        Ok(out) => {
            if let Some(path) = &common.out {
                if let Err(e) = std::fs::write(path, &out.json) {
                    let f =
                        Failure::input("IoError", format!("cannot write {}: {e}", path.display()));
                    return report_failure(&f, common.json, stdout, stderr);
                }
            }
            if common.json {
                let _ = writeln!(stdout, "{}", out.json);
            } else {
                let _ = write!(stdout, "{}", out.human);
                if let Some(path) = &common.out {
                    let _ = writeln!(stdout, "report: {}", path.display());
                }
            }
            if let Some((kind, message)) = &out.diagnostic {
                let _ = writeln!(stderr, "{}", error_line(kind, message, out.code));
            }
            out.code
        }
        Err(f) => report_failure(&f, common.json, stdout, stderr),
    }
}

fn report_failure(f: &Failure, json: bool, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let line = error_line(&f.kind, &f.message, f.code);
    if json {
        let _ = writeln!(stdout, "{line}");
    }
    let _ = writeln!(stderr, "{line}");
    f.code
}

fn tolerance(c: &CommonArgs) -> Result<Tolerance, Failure> {
    let d = Tolerance::default();
    Ok(Tolerance::new(
        c.tol_rank.unwrap_or(d.rank_tol),
        c.tol_root.unwrap_or(d.root_tol),
        d.det_tol,
    )?)
}

fn read_system(path: &Path) -> Result<StateSpaceSystem, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input("IoError", format!("cannot read {}: {e}", path.display())))?;
    Ok(load_system(&text)?)
}

fn target_from(poly: Option<&str>, zeros: Option<&str>) -> Result<Option<Target>, Failure> {
    match (poly, zeros) {
        (Some(p), None) => Ok(Some(Target::Polynomial(parse_poly(p)?))),
        (None, Some(z)) => Ok(Some(Target::Zeros(parse_zeros(z)?))),
        (None, None) => Ok(None),
        _ => Err(Failure::input(
            "UsageError",
            "--poly and --zeros are mutually exclusive",
        )),
    }
}

fn target_polynomial(t: &Target) -> Result<Polynomial, Failure> {
    Ok(match t {
        Target::Polynomial(p) => p.clone(),
        Target::Zeros(z) => Polynomial::from_roots(z)?,
    })
}

/// Parses ascending coefficients `"b0,b1,..."`.
pub fn parse_poly(text: &str) -> Result<Polynomial, Error> {
    let coeffs = text
        .split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::InvalidTarget(format!("bad coefficient {t:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Polynomial::new(coeffs))
}

/// Parses a zero list `"z1,z2,..."`. Each entry is real (`-2`), complex
/// (`1+2i`, `-1-0.5i`, `3i`) or a conjugate pair (`-1±2i`).
pub fn parse_zeros(text: &str) -> Result<Vec<Complex64>, Error> {
    let mut out = Vec::new();
    for raw in text.split(',') {
        let t: String = raw.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::InvalidTarget(format!("bad zero {:?}", raw.trim()));
        if t.is_empty() {
            return Err(bad());
        }
        if let Some((re, im)) = t.split_once('±') {
            let re = if re.is_empty() {
                0.0
            } else {
                parse_real(re).ok_or_else(bad)?
            };
            let im = parse_imag(im).ok_or_else(bad)?;
            out.push(Complex64::new(re, im));
            out.push(Complex64::new(re, -im));
        } else {
            out.push(parse_complex(&t).ok_or_else(bad)?);
        }
    }
    Ok(out)
}

fn parse_real(t: &str) -> Option<f64> {
    t.parse::<f64>().ok().filter(|x| x.is_finite())
}

/// `"2i"`, `"i"`, `"0.5i"`; sign handled by the caller.
fn parse_imag(t: &str) -> Option<f64> {
    let body = t.strip_suffix('i')?;
    match body {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        _ => parse_real(body),
    }
}

fn parse_complex(t: &str) -> Option<Complex64> {
    if !t.ends_with('i') {
        return parse_real(t).map(|x| Complex64::new(x, 0.0));
    }
    // split at the last sign that is not leading and not part of an exponent
    let bytes = t.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => Some(Complex64::new(parse_real(&t[..k])?, parse_imag(&t[k..])?)),
        None => Some(Complex64::new(0.0, parse_imag(t)?)),
    }
}

fn fmt_zeros(z: &[Complex64]) -> String {
    if z.is_empty() {
        return "(none)".to_string();
    }
    z.iter()
        .map(|&z| fmt_complex(z))
        .collect::<Vec<_>>()
        .join(", ")
}

fn indent(m: &Matrix) -> String {
    m.to_string().lines().map(|l| format!("  {l}\n")).collect()
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serialization cannot fail")
}

fn verification_lines(v: &Verification, out: &mut String) {
    zero_lines(&v.zeros, out);
    out.push_str(&format!(
        "scalar factor: {}\n",
        format_sig(v.scalar_factor, 6)
    ));
    out.push_str(&format!("coefficient error: {:.3e}\n", v.coefficient_error));
    match v.root_error {
        Some(e) => out.push_str(&format!("root error: {e:.3e}\n")),
        None => out.push_str("root error: not compared\n"),
    }
    out.push_str(&format!(
        "verification: {}\n",
        if v.passed { "passed" } else { "FAILED" }
    ));
}

fn zero_lines(z: &ZeroReport, out: &mut String) {
    out.push_str(&format!("zero polynomial: {}\n", z.zero_polynomial));
    out.push_str(&format!("finite zeros: {}\n", fmt_zeros(&z.finite_zeros)));
    out.push_str(&format!("finite count: {}\n", z.finite_count));
    out.push_str(&format!("infinite count: {}\n", z.infinite_count));
}

fn synth(args: &SynthArgs) -> Result<Outcome, Failure> {
    let tol = tolerance(&args.common)?;
    let sys = read_system(&args.common.system)?;
    let target = target_from(args.target.poly.as_deref(), args.target.zeros.as_deref())?
        .expect("clap enforces a target");
    let mut req = AssignmentRequest::new(sys, target);
    req.tol = tol;
    req.policy = RandomPolicy::with_seed(args.seed);
    if args.allow_eig_collision {
        req.eig_collision_policy = CollisionPolicy::Warn;
    }
    let report = assign_zeros(&req)?;
    Ok(Outcome {
        json: report.to_json(),
        human: render_synth(&report, req.system.name()),
        code: 0,
        diagnostic: None,
    })
}

fn render_synth(r: &AssignmentReport, name: Option<&str>) -> String {
    let mut s = String::new();
    if let Some(name) = name {
        s.push_str(&format!("system: {name}\n"));
    }
    s.push_str(&format!("target: {}\n", r.target));
    s.push_str(&format!(
        "path: {:?} (seed {})\n",
        r.placement.path, r.placement.seed_used
    ));
    s.push_str("H =\n");
    s.push_str(&indent(&r.h));
    verification_lines(&r.verification, &mut s);
    s.push_str(&format!("observable: {}\n", yes_no(r.observability)));
    s.push_str(&format!("rank H: {}\n", r.rank_h));
    s.push_str(&format!("equivalence error: {:.3e}\n", r.equivalence_error));
    for w in &r.warnings {
        s.push_str(&format!("warning: {w}\n"));
    }
    s
}

fn flush(x: f64, floor: f64) -> f64 {
    if x.abs() < floor {
        0.0
    } else {
        x
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn zeros(args: &CommonArgs) -> Result<Outcome, Failure> {
    let tol = tolerance(args)?;
    let sys = read_system(&args.system)?;
    let report = invariant_zeros(&sys, &tol)?;
    let mut human = String::new();
    zero_lines(&report, &mut human);
    Ok(Outcome {
        json: to_json(&report),
        human,
        code: 0,
        diagnostic: None,
    })
}

fn verify(args: &VerifyArgs) -> Result<Outcome, Failure> {
    let tol = tolerance(&args.common)?;
    let sys = read_system(&args.common.system)?;
    let target = target_from(args.target.poly.as_deref(), args.target.zeros.as_deref())?
        .expect("clap enforces a target");
    let psi = target_polynomial(&target)?;
    let v = verify_assignment(&sys, &psi, &tol)?;
    let mut human = format!("target: {}\n", psi.normalized());
    verification_lines(&v, &mut human);
    let (code, diagnostic) = if v.passed {
        (0, None)
    } else {
        let msg = format!(
            "zero polynomial {} does not match target {}",
            v.zeros.zero_polynomial,
            psi.normalized()
        );
        (1, Some(("VerificationFailed".to_string(), msg)))
    };
    Ok(Outcome {
        json: to_json(&v),
        human,
        code,
        diagnostic,
    })
}

#[derive(Serialize)]
struct CheckReport {
    states: usize,
    inputs: usize,
    rank_b: usize,
    controllable: bool,
    controllability_rank: usize,
    #[serde(serialize_with = "serde_util::zeros")]
    eigenvalues: Vec<Complex64>,
    observable: Option<bool>,
    target: Option<Polynomial>,
    max_degree: usize,
    solvable: bool,
    reasons: Vec<String>,
}

fn check(args: &CheckArgs) -> Result<Outcome, Failure> {
    let tol = tolerance(&args.common)?;
    let sys = read_system(&args.common.system)?;
    let target = target_from(args.target.poly.as_deref(), args.target.zeros.as_deref())?;
    let (n, r) = (sys.states(), sys.inputs());
    let rank_b = rank(sys.b(), &tol);
    let (ctrb, ctrb_rank) = controllable(sys.a(), sys.b(), &tol);
    let eig = eigenvalues(sys.a())?;
    let mut reasons = Vec::new();
    if !ctrb {
        reasons.push(format!(
            "(A, B) is not controllable: rank {ctrb_rank} < {n}"
        ));
    }
    if rank_b < r {
        reasons.push(format!("rank B = {rank_b} < {r} inputs"));
    }
    let psi = match &target {
        Some(t) => {
            let psi = target_polynomial(t)?.normalized();
            if psi.is_zero() {
                return Err(Error::ZeroTargetPolynomial.into());
            }
            let mu = psi.degree().unwrap_or(0);
            if mu > n - r {
                reasons.push(format!("target degree {mu} exceeds n - r = {}", n - r));
            }
            for z in crate::numkit::poly_roots(&psi)? {
                if let Some(l) = eigenvalue_collision(sys.a(), z, &tol) {
                    reasons.push(format!(
                        "target zero {} coincides with eigenvalue {}",
                        fmt_complex(z),
                        fmt_complex(l)
                    ));
                }
            }
            Some(psi)
        }
        None => None,
    };
    let report = CheckReport {
        states: n,
        inputs: r,
        rank_b,
        controllable: ctrb,
        controllability_rank: ctrb_rank,
        eigenvalues: eig,
        observable: sys.h().map(|h| observable(sys.a(), h, &tol)),
        target: psi,
        max_degree: n - r,
        solvable: reasons.is_empty(),
        reasons,
    };

    let mut s = String::new();
    s.push_str(&format!("states: {n}\ninputs: {r}\nrank B: {rank_b}\n"));
    s.push_str(&format!(
        "controllable: {} (rank {ctrb_rank})\n",
        yes_no(ctrb)
    ));
    let floor = 1e-12 * sys.a().max_abs().max(1.0);
    let shown: Vec<Complex64> = report
        .eigenvalues
        .iter()
        .map(|z| Complex64::new(flush(z.re, floor), flush(z.im, floor)))
        .collect();
    s.push_str(&format!("eigenvalues of A: {}\n", fmt_zeros(&shown)));
    if let Some(o) = report.observable {
        s.push_str(&format!("observable: {}\n", yes_no(o)));
    }
    if let Some(p) = &report.target {
        s.push_str(&format!("target: {p}\n"));
    }
    s.push_str(&format!("max target degree: {}\n", n - r));
    s.push_str(&format!("solvable: {}\n", yes_no(report.solvable)));
    for reason in &report.reasons {
        s.push_str(&format!("  - {reason}\n"));
    }
    let (code, diagnostic) = if report.solvable {
        (0, None)
    } else {
        (
            3,
            Some(("Unsolvable".to_string(), report.reasons.join("; "))),
        )
    };
    Ok(Outcome {
        json: to_json(&report),
        human: s,
        code,
        diagnostic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_list_grammar() {
        let z = parse_zeros("-1, 2.5, -1±2i, 3-4i, 3+4i, i, -2e-1").unwrap();
        let want = [
            (-1.0, 0.0),
            (2.5, 0.0),
            (-1.0, 2.0),
            (-1.0, -2.0),
            (3.0, -4.0),
            (3.0, 4.0),
            (0.0, 1.0),
            (-0.2, 0.0),
        ];
        assert_eq!(z.len(), want.len());
        for (got, (re, im)) in z.iter().zip(want) {
            assert_eq!((got.re, got.im), (re, im));
        }
    }

    #[test]
    fn malformed_entries_are_input_errors() {
        for bad in ["", "1,,2", "abc", "1+i2", "nan"] {
            let e = parse_zeros(bad).unwrap_err();
            assert_eq!(exit_code(&e), 2, "{bad}");
        }
        assert!(parse_poly("1,x").is_err());
        assert_eq!(parse_poly("2,3,1").unwrap().coeffs(), &[2.0, 3.0, 1.0]);
    }

    #[test]
    fn usage_errors_exit_two_with_json() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(
            ["zeroassign", "synth", "--json", "--system", "x.json"],
            &mut out,
            &mut err,
        );
        assert_eq!(code, 2);
        let doc: serde_json::Value = serde_json::from_slice(&out).unwrap();
        assert_eq!(doc["error"]["kind"], "UsageError");
        assert_eq!(String::from_utf8(err).unwrap().lines().count(), 1);
    }
}
