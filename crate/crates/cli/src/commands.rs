use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use achr_core::bounds::{feasible_frequency_profiles, upper_bound};
use achr_core::lemmas::{qset_generate, COUNTEREXAMPLE};
use achr_core::model::parse_matrix;
use achr_core::search::{
    achromatic as run_achromatic, extend_coloring, find_coloring, refute as run_refute,
    AchromaticValue,
};
use achr_core::{ColorMatrix, Error, Membership, SearchStatus};
use serde_json::json;

use crate::report::{Instance, RunReport, Stats};
use crate::Options;

pub const OK: u8 = 0;
pub const NEGATIVE: u8 = 1;
pub const USAGE: u8 = 2;
pub const ALARM: u8 = 3;

/// A completed command: plain text for stdout, an optional note for
/// stderr, and the report printed instead of the text under `--json`.
pub struct Finished {
    pub code: u8,
    pub text: String,
    pub note: String,
    pub report: RunReport,
}

pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotInFamily(_)
            | Error::NoExtension
            | Error::NotTotal
            | Error::Improper { .. } => NEGATIVE,
            _ => USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<Finished, Failure>;

fn read_matrix(path: &Path) -> Result<ColorMatrix, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    parse_matrix(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn write_witness(path: &Path, m: &ColorMatrix) -> Result<(), Failure> {
    std::fs::write(path, m.to_string())
        .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn positive(what: &str, v: usize) -> Result<(), Failure> {
    if v == 0 {
        return Err(Failure::usage(format!("{what} must be positive")));
    }
    Ok(())
}

/// Writes the witness to `-o` when given, otherwise appends it to `text`.
fn place_witness(
    m: Option<&ColorMatrix>,
    opts: &Options,
    text: &mut String,
    report: &mut RunReport,
) -> Result<(), Failure> {
    let Some(m) = m else { return Ok(()) };
    match &opts.output {
        Some(path) => {
            write_witness(path, m)?;
            report.witness_path = Some(path.display().to_string());
        }
        None => text.push_str(&m.to_string()),
    }
    Ok(())
}

fn search_note(seed: u64, stats: &Stats) -> String {
    format!(
        "seed {seed}, {} nodes, {:.3}s\n",
        stats.nodes, stats.wall_time_secs
    )
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn verify(path: &Path, opts: &Options, argv: &[String]) -> Outcome {
    let m = read_matrix(path)?;
    let (p, q, k) = m.shape();
    let verdict = m.membership(p, q, k);
    let freq = m.frequencies();
    let used = freq[1..].iter().filter(|&&f| f > 0).count();

    let mut text = String::new();
    writeln!(text, "matrix: {p}x{q}, k={k}").unwrap();
    let conflict = m.first_conflict();
    match &conflict {
        None => writeln!(text, "proper: yes").unwrap(),
        Some((c, line)) => writeln!(text, "proper: no (colour {c} repeats in {line})").unwrap(),
    }
    writeln!(
        text,
        "total: {} ({} of {} cells assigned)",
        yes_no(m.is_total()),
        m.assigned_count(),
        p * q
    )
    .unwrap();
    writeln!(text, "colours used: {used} of {k}").unwrap();
    writeln!(text, "frequency profile: {}", m.frequency_profile()).unwrap();

    let mut coverage = json!(null);
    if let Ok(ledger) = m.ledger() {
        let pairs = k * (k - 1) / 2;
        let uncovered: Vec<(u16, u16)> = ledger.uncovered_pairs().collect();
        writeln!(
            text,
            "pairs: {} of {pairs} good ({} row witnesses, {} column witnesses)",
            pairs - uncovered.len(),
            ledger.row_witnesses(),
            ledger.col_witnesses()
        )
        .unwrap();
        if !uncovered.is_empty() {
            let shown: Vec<String> = uncovered
                .iter()
                .take(12)
                .map(|(a, b)| format!("{{{a},{b}}}"))
                .collect();
            let more = if uncovered.len() > shown.len() {
                " ..."
            } else {
                ""
            };
            writeln!(text, "uncovered: {}{more}", shown.join(" ")).unwrap();
        }
        coverage = json!({
            "pairs": pairs,
            "good": pairs - uncovered.len(),
            "row_witnesses": ledger.row_witnesses(),
            "column_witnesses": ledger.col_witnesses(),
            "uncovered": uncovered,
        });
    }
    writeln!(text, "verdict: {verdict}").unwrap();

    let code = if verdict.is_member() { OK } else { NEGATIVE };
    let status = match verdict {
        Membership::Member => "MEMBER",
        Membership::NotTotal => "NOT_TOTAL",
        Membership::Improper => "IMPROPER",
        Membership::Incomplete { .. } => "INCOMPLETE",
        Membership::DimensionMismatch { .. } => "DIMENSION_MISMATCH",
    };
    let mut report = RunReport::new(argv.to_vec(), opts.seed, status);
    report.instance = Some(Instance { p, q, k: Some(k) });
    report.witness_path = Some(path.display().to_string());
    report.result = json!({
        "proper": conflict.is_none(),
        "total": m.is_total(),
        "complete": m.is_complete(),
        "colours_used": used,
        "frequency_profile": m.frequency_profile().entries().collect::<Vec<_>>(),
        "coverage": coverage,
        "verdict": verdict.to_string(),
    });
    Ok(Finished {
        code,
        text,
        note: String::new(),
        report,
    })
}

pub fn achromatic(p: usize, q: usize, opts: &Options, argv: &[String]) -> Outcome {
    positive("-p", p)?;
    positive("-q", q)?;
    let r = run_achromatic(p, q, &opts.search_config())?;
    let stats = Stats::total(r.probes.iter().map(|pr| &pr.outcome));
    let (code, status) = match r.value {
        AchromaticValue::Exact { .. } => (OK, "EXACT"),
        AchromaticValue::Bracket { .. } => (NEGATIVE, "BRACKET"),
    };

    let mut report =
        RunReport::new(argv.to_vec(), opts.seed, status).with_witness(r.witness.as_ref());
    report.instance = Some(Instance { p, q, k: None });
    let mut text = format!("{}\n", r.value);
    place_witness(r.witness.as_ref(), opts, &mut text, &mut report)?;
    let probes: Vec<_> = r
        .probes
        .iter()
        .map(|pr| json!({ "k": pr.k, "status": pr.outcome.status, "nodes": pr.outcome.nodes_expanded }))
        .collect();
    report.result = json!({ "value": r.value, "upper_bound": r.upper_bound, "probes": probes });
    let note = search_note(opts.seed, &stats);
    report.stats = Some(stats);
    Ok(Finished {
        code,
        text,
        note,
        report,
    })
}

pub fn find(p: usize, q: usize, k: usize, opts: &Options, argv: &[String]) -> Outcome {
    positive("-p", p)?;
    positive("-q", q)?;
    positive("-k", k)?;
    let out = find_coloring(p, q, k, &opts.search_config())?;
    let code = if out.status == SearchStatus::Found {
        OK
    } else {
        NEGATIVE
    };
    let mut report = RunReport::new(argv.to_vec(), opts.seed, out.status.to_string())
        .with_witness(out.witness.as_ref());
    report.instance = Some(Instance { p, q, k: Some(k) });
    let mut text = format!("{}\n", out.status);
    place_witness(out.witness.as_ref(), opts, &mut text, &mut report)?;
    let stats = Stats::of(&out);
    let note = search_note(opts.seed, &stats);
    report.stats = Some(stats);
    report.result = json!({ "status": out.status });
    Ok(Finished {
        code,
        text,
        note,
        report,
    })
}

pub fn refute(opts: &Options, argv: &[String]) -> Outcome {
    let (p, q, k) = COUNTEREXAMPLE;
    let out = run_refute(&opts.search_config())?;
    let mut report = RunReport::new(argv.to_vec(), opts.seed, out.status.to_string())
        .with_witness(out.witness.as_ref());
    report.instance = Some(Instance { p, q, k: Some(k) });
    let mut text = format!("{}\n", out.status);
    let stats = Stats::of(&out);
    let mut note = search_note(opts.seed, &stats);
    let code = match out.status {
        SearchStatus::Exhausted => OK,
        SearchStatus::BudgetExceeded => NEGATIVE,
        SearchStatus::Found => {
            note.push_str("ALARM: a complete 19-colouring of K_6 x K_7 was reported; the witness is dumped for audit\n");
            ALARM
        }
    };
    place_witness(out.witness.as_ref(), opts, &mut text, &mut report)?;
    report.result = json!({ "status": out.status, "lemmas": opts.lemmas });
    report.stats = Some(stats);
    Ok(Finished {
        code,
        text,
        note,
        report,
    })
}

pub fn qsets(r2_1: usize, p: usize, opts: &Options, argv: &[String]) -> Outcome {
    let sets = qset_generate(r2_1, p)?;
    let text: String = sets.iter().map(|s| format!("{s}\n")).collect();
    let code = if sets.is_empty() { NEGATIVE } else { OK };
    let mut report = RunReport::new(
        argv.to_vec(),
        opts.seed,
        if sets.is_empty() { "EMPTY" } else { "OK" },
    );
    report.result = json!({
        "r2_1": r2_1,
        "p": p,
        "size": sets.len(),
        "sequences": sets.iter().map(|s| s.values.clone()).collect::<Vec<_>>(),
    });
    Ok(Finished {
        code,
        text,
        note: format!("Q({r2_1},{p}) size={}\n", sets.len()),
        report,
    })
}

pub fn profiles(p: usize, q: usize, k: usize, opts: &Options, argv: &[String]) -> Outcome {
    positive("p", p)?;
    positive("q", q)?;
    positive("k", k)?;
    let all = feasible_frequency_profiles(p, q, k);
    let mut text: String = all.iter().map(|f| format!("{f}\n")).collect();
    writeln!(text, "{} profiles", all.len()).unwrap();
    let code = if all.is_empty() { NEGATIVE } else { OK };
    let mut report = RunReport::new(
        argv.to_vec(),
        opts.seed,
        if all.is_empty() { "EMPTY" } else { "OK" },
    );
    report.instance = Some(Instance { p, q, k: Some(k) });
    report.result = json!({
        "count": all.len(),
        "upper_bound": upper_bound(p, q),
        "profiles": all.iter().map(|f| f.entries().collect::<Vec<_>>()).collect::<Vec<_>>(),
    });
    Ok(Finished {
        code,
        text,
        note: String::new(),
        report,
    })
}

/// `witness{p}{q}.mat` next to the input.
fn default_extension_path(input: &Path, p: usize, q: usize) -> PathBuf {
    input.with_file_name(format!("witness{p}{q}.mat"))
}

pub fn extend(path: &Path, opts: &Options, argv: &[String]) -> Outcome {
    let m = read_matrix(path)?;
    let e = extend_coloring(&m)?;
    let (p, q, k) = e.shape();
    let target = opts
        .output
        .clone()
        .unwrap_or_else(|| default_extension_path(path, p, q));
    write_witness(&target, &e)?;
    let mut report = RunReport::new(argv.to_vec(), opts.seed, "EXTENDED").with_witness(Some(&e));
    report.instance = Some(Instance { p, q, k: Some(k) });
    report.witness_path = Some(target.display().to_string());
    report.result = json!({ "input": path.display().to_string(), "member": e.in_family(p, q, k) });
    Ok(Finished {
        code: OK,
        text: format!("wrote {} ({p}x{q}, k={k})\n", target.display()),
        note: String::new(),
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_extension_name_sits_next_to_input() {
        let got = default_extension_path(Path::new("/tmp/runs/witness66.mat"), 6, 7);
        assert_eq!(got, PathBuf::from("/tmp/runs/witness67.mat"));
        assert_eq!(
            default_extension_path(Path::new("w.mat"), 2, 3),
            PathBuf::from("witness23.mat")
        );
    }

    #[test]
    fn errors_map_to_exit_codes() {
        assert_eq!(Failure::from(Error::NoExtension).code, NEGATIVE);
        assert_eq!(Failure::from(Error::NotInFamily("x".into())).code, NEGATIVE);
        assert_eq!(Failure::from(Error::Config("x".into())).code, USAGE);
        let parse = Error::Parse {
            line: 2,
            column: 3,
            message: "bad".into(),
        };
        assert_eq!(Failure::from(parse).code, USAGE);
    }
}
